#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace gxt {

/// Missing-value sentinel used inside continuous data matrices.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/// Ordered key/value text metadata. Order is preserved on round-trip.
using MetadataList = std::vector<std::pair<std::string, std::string>>;

const std::string* find_metadata(const MetadataList& md, std::string_view key);
void set_metadata(MetadataList& md, std::string key, std::string value);

enum class Hemisphere { left, right, none };

std::string_view to_string(Hemisphere h);

/// CIFTI intents supported by the toolkit.
enum class Intent : int {
  dtseries = 3002,
  dscalar = 3006,
  dlabel = 3007,
};

std::string_view intent_name(Intent intent);      // "dtseries"
std::string_view intent_nifti_name(Intent intent);  // "ConnDenseSeries"
std::optional<Intent> intent_from_code(int code);
std::optional<Intent> intent_from_string(std::string_view name);

struct Rgba {
  double r = 0, g = 0, b = 0, a = 1;
  friend bool operator==(const Rgba&, const Rgba&) = default;
};

struct LabelEntry {
  std::string name;
  Rgba color;
  friend bool operator==(const LabelEntry&, const LabelEntry&) = default;
};

/// Key -> (name, colour). Components of colour lie in [0, 1].
using LabelTable = std::map<int, LabelEntry>;

/// Triangle mesh with a hemisphere tag (the "surf" object).
struct Surface {
  Eigen::MatrixX3d vertices;
  Eigen::Matrix<int, Eigen::Dynamic, 3> faces;
  Hemisphere hemisphere = Hemisphere::none;

  Eigen::Index vertex_count() const { return vertices.rows(); }
  Eigen::Index face_count() const { return faces.rows(); }
};

/// Throws ConsistencyError when face indices are out of range, a face is
/// degenerate, or there are fewer than three vertices.
void check_surface(const Surface& s);

/// Subcortical structure vocabulary: 21 names in a fixed order. The first
/// two are the cortex placeholders, which never hold voxels.
inline constexpr std::size_t kSubcortStructureCount = 21;

struct SubcortStructure {
  std::string_view short_name;  // "Accumbens-L"
  std::string_view cifti_name;  // "CIFTI_STRUCTURE_ACCUMBENS_LEFT"
  std::array<std::uint8_t, 3> color;
};

const std::array<SubcortStructure, kSubcortStructureCount>& subcort_structures();

/// Index into subcort_structures() by CIFTI name, or nullopt.
std::optional<int> subcort_index_from_cifti(std::string_view cifti_name);

inline constexpr std::string_view kCortexLeft = "CIFTI_STRUCTURE_CORTEX_LEFT";
inline constexpr std::string_view kCortexRight = "CIFTI_STRUCTURE_CORTEX_RIGHT";

/// Colour i of the qualitative cycle used for new label tables.
Rgba qualitative_color(std::size_t i);

/// Shortest decimal text that round-trips the double ("0.72", "1e-05").
std::string format_number(double v);

/// Tool version string stamped into provenance metadata.
std::string_view tool_version();

}  // namespace gxt
