#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "gxt/common.hpp"

namespace gxt {

struct Grayordinates;

/// Unit-sphere mesh from a frequency-k subdivided icosahedron:
/// 10k^2+2 vertices, 20k^2 faces.
struct SphereMesh {
  Surface surface;
  int k = 1;
};

/// Frequency whose vertex count is closest to `target` (ties go to the
/// smaller k). Throws DomainError when target < 12.
int icosphere_frequency(std::size_t target_vertices);
/// k such that 10k^2+2 == n, or 0.
int exact_icosphere_frequency(std::size_t n);

SphereMesh make_icosphere(std::size_t target_vertices);
SphereMesh make_icosphere_k(int k);

/// For each target vertex: the containing source face and three
/// (vertex, weight) pairs sorted by descending weight.
struct ResampleMap {
  std::size_t source_count = 0;
  std::vector<int> face;
  std::vector<std::array<int, 3>> vertex;
  std::vector<std::array<double, 3>> weight;

  std::size_t target_count() const { return face.size(); }
};

ResampleMap build_resample_map(const SphereMesh& src, const SphereMesh& dst);
ResampleMap build_resample_map(const Surface& src_sphere, const Surface& dst_sphere);

enum class ResampleKind { metric, label };

/// Metric: weighted mean skipping NaN sources (weights renormalised).
/// Label: key of the max-weight source vertex, ties to the lowest key.
Eigen::MatrixXd resample_values(const ResampleMap& map, const Eigen::MatrixXd& values,
                                ResampleKind kind);

/// Anatomical coordinates carried through the sphere correspondence.
Surface resample_surface(const Surface& surface, const SphereMesh& src, const SphereMesh& dst);

/// Cortical data, masks, and surfaces moved to the icosphere nearest
/// `target_vertices`; subcortex untouched.
Grayordinates resample_gray(const Grayordinates& g, std::size_t target_vertices);

/// Throws DomainError unless `rotation` is orthonormal with det +1.
Surface rotate_surface(const Surface& surface, const Eigen::Matrix3d& rotation);

/// Sorted neighbour lists from face edges.
std::vector<std::vector<int>> vertex_adjacency(const Surface& surface);

}  // namespace gxt
