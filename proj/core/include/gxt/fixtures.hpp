#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "gxt/grayordinates.hpp"

namespace gxt {

/// Seeded generator with a fixed stream across platforms: std::mt19937_64
/// is specified exactly, the standard distributions are not, so those are
/// written out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// [0, 1)
  double uniform();
  double normal();
  /// [0, n)
  std::size_t below(std::size_t n);
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct FixtureSizes {
  int ico_k = 2;             // 10k^2+2 vertices per hemisphere
  std::size_t medial_wall = 6;
  Eigen::Index columns = 20;
  std::int64_t grid = 8;     // subcortical grid edge length
  std::uint64_t seed = 1;
};

/// The small synthetic corpus: a dtseries over both hemispheres of an
/// icosphere (radius 100 mm) plus three subcortical structures, a 5-parcel
/// dlabel at full resolution (key 0 on the medial wall), and the spheres.
struct FixtureSet {
  Grayordinates dtseries;
  Grayordinates parcellation;
  Surface left_sphere;
  Surface right_sphere;
};

FixtureSet make_fixture_set(const FixtureSizes& sizes = {});

struct FixturePaths {
  std::filesystem::path dtseries, parcellation, left_sphere, right_sphere;
};
FixturePaths write_fixture_set(const FixtureSet& set, const std::filesystem::path& outdir);

/// Vertex counts and per-structure voxel counts of the standard 32k
/// grayordinates layout, in vocabulary order.
inline constexpr std::int64_t kStdVertices = 32492;
inline constexpr std::int64_t kStdLeftData = 29696;
inline constexpr std::int64_t kStdRightData = 29716;
inline constexpr std::array<std::int64_t, kSubcortStructureCount> kStdSubcortCounts{
    0, 0, 135, 140, 315, 332, 3472, 728, 755, 8709, 9144, 706, 712, 764, 795, 297, 260, 1060, 1010, 1288, 1248};

/// Object with the standard layout counts (random masks and voxel
/// placement on the 91x109x91 2 mm grid), random float32-exact data.
Grayordinates standard_layout_gray(Eigen::Index columns, bool with_subcortex, std::uint64_t seed = 1);

struct RandomGrayOptions {
  std::size_t max_vertices = 60;
  std::int64_t max_grid = 6;
  Eigen::Index max_columns = 4;
};

/// Randomised valid object: random structure subset, masks, intent
/// (dlabel included), float32-exact values, names and metadata.
Grayordinates random_gray(Rng& rng, const RandomGrayOptions& options = {});

}  // namespace gxt
