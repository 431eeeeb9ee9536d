#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gxt/grayordinates.hpp"

namespace gxt {

/// fwhm / (2 sqrt(2 ln 2)).
double fwhm_to_sigma(double fwhm);

struct SmoothParams {
  double surf_fwhm = 5.0;
  double vol_fwhm = 5.0;
  /// Kernel support in units of sigma.
  double truncation_sigmas = 3.0;
};

/// Precomputed geodesic kernel: for each in-ROI vertex, the in-ROI
/// vertices within the truncation radius and their Gaussian weights.
struct SurfaceKernel {
  std::vector<std::size_t> start;  // CSR offsets, one per ROI row + 1
  std::vector<Eigen::Index> row;   // neighbour ROI row
  std::vector<double> weight;
};

/// Edge-weighted Dijkstra distances from `source`, stopping past `radius`.
/// Unreached vertices hold +inf.
std::vector<double> geodesic_distances(const Surface& surface, const std::vector<std::vector<int>>& adjacency,
                                       int source, double radius);

SurfaceKernel build_surface_kernel(const Surface& surface, const Mask& roi, double fwhm,
                                   double truncation_sigmas = 3.0);

/// `values` has one row per in-ROI vertex. Each output is the normalised
/// Gaussian-weighted mean over in-ROI, non-NaN vertices within the radius.
/// NaN inputs stay NaN. fwhm = 0 returns the input.
Eigen::MatrixXd smooth_surface_metric(const Surface& surface, const Eigen::MatrixXd& values, const Mask& roi,
                                      double fwhm, double truncation_sigmas = 3.0);

/// Per-structure Gaussian on the voxel grid: only voxels with the same
/// label contribute, weights renormalised per voxel. Support is a box of
/// truncation_sigmas * sigma along each axis.
Eigen::MatrixXd smooth_volume(const Eigen::MatrixXd& values, const SubcortMeta& meta, double fwhm,
                              double truncation_sigmas = 3.0);

struct SmoothSurfaces {
  std::optional<Surface> left;
  std::optional<Surface> right;
  /// Use an icosphere of radius 100 mm when no surface is available.
  bool synthetic_sphere = false;
};

/// Surface for a hemisphere: `surfaces` first, then the object, then the
/// synthetic sphere when allowed. DomainError when none applies.
Surface surface_for(const Grayordinates& g, Hemisphere h, const SmoothSurfaces& surfaces);

/// Smooths every present structure. Surfaces come from `surfaces`, then
/// from the object; dlabel input raises DomainError.
Grayordinates smooth_gray(const Grayordinates& g, const SmoothParams& params, const SmoothSurfaces& surfaces = {});

/// File-to-file variant (reads all structures present, writes CIFTI).
void smooth_file(const std::filesystem::path& in, const std::filesystem::path& out, const SmoothParams& params,
                 const SmoothSurfaces& surfaces = {});

}  // namespace gxt
