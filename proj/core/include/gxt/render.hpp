#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gxt/grayordinates.hpp"
#include "gxt/image.hpp"
#include "gxt/nifti.hpp"
#include "gxt/smoothing.hpp"

namespace gxt {

enum class ColorKind { sequential, diverging, qualitative };

struct Palette {
  std::string name;
  ColorKind kind = ColorKind::sequential;
  std::vector<Rgba> anchors;
};

/// Built-ins: "sequential", "viridis", "BuPu", "diverging", "RdBu",
/// "qualitative".
std::optional<Palette> palette_by_name(std::string_view name);
std::vector<std::string> palette_names();

using ZLim = std::pair<double, double>;

/// Empty palette name picks one from the data (labels -> qualitative,
/// sign change -> diverging, else sequential).
struct ColorSpec {
  std::string palette;
  std::optional<ColorKind> kind;
  std::optional<ZLim> zlim;
};

/// Type-7 quantile of sorted data, p in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double p);

/// Rounds to 3 significant digits.
double signif3(double v);

/// Colour limits from finite values. q = 99th percentile of |x|:
/// straddling zero -> (-q, q); all >= 0 -> (0, p99); all <= 0 -> (p1, 0);
/// constant v -> (v - 0.5, v + 0.5). A forced sequential kind uses
/// (p1, p99) for straddling data. Endpoints rounded to 3 significant digits.
ZLim auto_zlim(const std::vector<double>& values, std::optional<ColorKind> forced = std::nullopt);

/// "`zlim` not provided: using color range LO - HI (data limits: MIN - MAX)."
std::string zlim_message(ZLim zlim, double data_min, double data_max);

using Rgba8 = std::array<std::uint8_t, 4>;
Rgba8 to_rgba8(const Rgba& c);

inline constexpr Rgba8 kWhite8{255, 255, 255, 255};

/// Piecewise-linear interpolation over zlim, clamped; NaN -> white.
std::vector<Rgba8> colorize(const std::vector<double>& values, const Palette& palette, ZLim zlim);
/// Label-table colours composited over white; NaN or unknown keys -> white.
std::vector<Rgba8> colorize_labels(const std::vector<double>& keys, const LabelTable& table);
/// Integer keys coloured from the qualitative cycle; DomainError otherwise.
std::vector<Rgba8> colorize_qualitative(const std::vector<double>& keys);

/// True where some neighbour carries a different key.
std::vector<bool> compute_borders(const std::vector<int>& keys, const std::vector<std::vector<int>>& adjacency);

enum class View { lateral, medial };

/// Orthographic mesh rendering. Lateral views look at the left hemisphere
/// from -x and the right from +x; medial views the opposite.
/// `world_per_pixel` <= 0 fits the mesh to the panel.
Image render_mesh(const Surface& surface, const std::vector<Rgba8>& vertex_colors, Hemisphere hemisphere, View view,
                  int width, int height, double world_per_pixel = 0.0);

struct ViewSpec {
  /// Empty means every hemisphere with data.
  std::vector<Hemisphere> hemispheres;
  std::vector<View> views{View::lateral, View::medial};
  /// 0-based data columns; one image per column.
  std::vector<Eigen::Index> columns{0};
  int panel_width = 320;
  int panel_height = 240;
  std::string title;
  bool borders = false;
  bool colorbar = true;
};

struct RenderOutput {
  std::vector<Image> images;
  /// Set when limits were chosen automatically.
  std::string message;
  std::optional<ZLim> zlim;
};

/// One row per hemisphere, one column per view, colour bar at the bottom.
/// Border keys come from the data when it is a dlabel, else from
/// `border_parc`. Surfaces are resolved as for smoothing.
RenderOutput render_surface(const Grayordinates& g, const ViewSpec& view, const ColorSpec& colors,
                            const SmoothSurfaces& surfaces = {}, const Grayordinates* border_parc = nullptr);

enum class Plane { axial, coronal, sagittal };
std::optional<Plane> plane_from_string(std::string_view name);

struct VolumeViewSpec {
  Plane plane = Plane::axial;
  /// 0-based slice indices along the plane normal.
  std::vector<std::int64_t> slices;
  Eigen::Index column = 0;
  /// Pixels per voxel edge.
  int scale = 3;
  /// Panels per row; 0 picks min(slices, 5).
  int ncol = 0;
  std::string title;
  bool colorbar = true;
};

/// Slices of the subcortical data over an optional underlay on the same
/// grid (dark background otherwise). NaN voxels show the underlay. In a
/// panel, the first in-plane axis runs left to right and the second
/// bottom to top.
RenderOutput render_volume(const Grayordinates& g, const VolumeViewSpec& view, const ColorSpec& colors,
                           const Volume* underlay = nullptr);

struct GridLayout {
  int ncol = 0;
  /// Two columns, pairing cortex and subcortex panels.
  bool pair = false;
};

/// Tiles left to right, top to bottom in cells of the largest image size.
Image compose_grid(const std::vector<Image>& images, GridLayout layout);

}  // namespace gxt
