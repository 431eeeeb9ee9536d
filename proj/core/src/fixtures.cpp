#include "gxt/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gxt/error.hpp"
#include "gxt/gifti.hpp"
#include "gxt/gray_io.hpp"
#include "gxt/surface_ops.hpp"

namespace gxt {

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u = 1.0 - uniform();
  const double v = uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw DomainError("empty range");
  return static_cast<std::size_t>(uniform() * static_cast<double>(n));
}

namespace {

double f32(double v) { return static_cast<double>(static_cast<float>(v)); }

// The n vertices closest to `dir`, ties to the lower index.
Mask cap_mask(const Surface& s, Eigen::Vector3d dir, std::size_t n) {
  dir.normalize();
  std::vector<std::pair<double, int>> d;
  for (Eigen::Index i = 0; i < s.vertex_count(); ++i) {
    d.emplace_back(-s.vertices.row(i).normalized().dot(dir), static_cast<int>(i));
  }
  std::sort(d.begin(), d.end());
  Mask m(static_cast<std::size_t>(s.vertex_count()), true);
  for (std::size_t i = 0; i < n && i < d.size(); ++i) m[static_cast<std::size_t>(d[i].second)] = false;
  return m;
}

int sector_key(const Eigen::RowVector3d& p) {
  const double a = std::atan2(p(1), p(2)) + std::numbers::pi;
  return 1 + static_cast<int>(std::floor(a / (2.0 * std::numbers::pi) * 5.0)) % 5;
}

}  // namespace

FixtureSet make_fixture_set(const FixtureSizes& sizes) {
  if (sizes.ico_k < 1) throw DomainError("icosphere frequency must be at least 1");
  if (sizes.columns < 2) throw DomainError("fixture needs at least 2 columns");
  if (sizes.grid < 4) throw DomainError("fixture grid must be at least 4");
  Rng rng(sizes.seed);
  FixtureSet fx;
  Surface sphere = make_icosphere_k(sizes.ico_k).surface;
  sphere.vertices *= 100.0;
  const auto v = static_cast<std::size_t>(sphere.vertex_count());
  if (sizes.medial_wall >= v) throw DomainError("medial wall would cover the hemisphere");
  fx.left_sphere = sphere;
  fx.left_sphere.hemisphere = Hemisphere::left;
  fx.right_sphere = sphere;
  fx.right_sphere.hemisphere = Hemisphere::right;
  const Mask mask_l = cap_mask(sphere, {1.0, 0.1, 0.05}, sizes.medial_wall);
  const Mask mask_r = cap_mask(sphere, {-1.0, 0.1, 0.05}, sizes.medial_wall);

  // Subcortex: two accumbens blocks and a brain-stem column.
  const std::int64_t n = sizes.grid;
  SubcortMeta sub;
  sub.grid.dims = {n, n, n};
  sub.grid.affine = Eigen::Matrix4d::Identity();
  sub.grid.affine.diagonal().head<3>().setConstant(2.0);
  sub.grid.affine.col(3).head<3>().setConstant(-static_cast<double>(n));
  sub.mask.assign(static_cast<std::size_t>(sub.grid.voxel_count()), false);
  const std::int64_t mid = n / 2;
  for (std::int64_t k = 0; k < n; ++k)
    for (std::int64_t j = 0; j < n; ++j)
      for (std::int64_t i = 0; i < n; ++i) {
        int label = -1;
        const bool inner = j >= 1 && j < n - 1 && k >= 1 && k < n - 1;
        if (inner && i >= 0 && i < mid - 1) label = 2;
        else if (inner && i > mid && i < n) label = 3;
        else if ((i == mid - 1 || i == mid) && j >= mid - 1 && j <= mid) label = 6;
        if (label < 0) continue;
        sub.mask[static_cast<std::size_t>(sub.grid.linear_index(i, j, k))] = true;
        sub.labels.push_back(label);
      }

  // Five parcels by angle around the y-z plane, shared by both hemispheres.
  auto keys_for = [&](const Mask& mask) {
    Eigen::MatrixXd keys(static_cast<Eigen::Index>(v), 1);
    for (std::size_t i = 0; i < v; ++i) {
      keys(static_cast<Eigen::Index>(i), 0) = mask[i] ? sector_key(sphere.vertices.row(static_cast<Eigen::Index>(i))) : 0;
    }
    return keys;
  };
  const Eigen::MatrixXd keys_l = keys_for(mask_l);
  const Eigen::MatrixXd keys_r = keys_for(mask_r);

  // Timeseries: one latent signal per parcel (and per structure) plus noise.
  const Eigen::Index m = sizes.columns;
  Eigen::MatrixXd signal(5 + static_cast<Eigen::Index>(kSubcortStructureCount), m);
  for (Eigen::Index r = 0; r < signal.rows(); ++r)
    for (Eigen::Index c = 0; c < m; ++c) signal(r, c) = rng.normal();
  auto cortex = [&](const Mask& mask, const Eigen::MatrixXd& keys) {
    const auto rows = std::count(mask.begin(), mask.end(), true);
    Eigen::MatrixXd d(rows, m);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < v; ++i) {
      if (!mask[i]) continue;
      const auto p = static_cast<Eigen::Index>(keys(static_cast<Eigen::Index>(i), 0)) - 1;
      for (Eigen::Index c = 0; c < m; ++c) d(row, c) = f32(100.0 + signal(p, c) + 0.5 * rng.normal());
      ++row;
    }
    return d;
  };
  MatrixParts parts;
  parts.cortex_left = cortex(mask_l, keys_l);
  parts.mask_left = mask_l;
  parts.cortex_right = cortex(mask_r, keys_r);
  parts.mask_right = mask_r;
  Eigen::MatrixXd sd(static_cast<Eigen::Index>(sub.labels.size()), m);
  for (Eigen::Index r = 0; r < sd.rows(); ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      sd(r, c) = f32(100.0 + signal(5 + sub.labels[static_cast<std::size_t>(r)], c) + 0.5 * rng.normal());
    }
  }
  parts.subcort = sd;
  parts.subcort_meta = sub;
  fx.dtseries = from_matrices(parts);
  fx.dtseries.meta.cifti.series = SeriesMap{0.0, 0.72, "second", m};
  fill_cifti_meta(fx.dtseries, Intent::dtseries);

  MatrixParts pp;
  pp.cortex_left = keys_l;
  pp.cortex_right = keys_r;
  fx.parcellation = from_matrices(pp);
  fx.parcellation.meta.cifti.names = {"parcels"};
  LabelTable table;
  table.emplace(0, LabelEntry{"???", {1, 1, 1, 0}});
  for (int k = 1; k <= 5; ++k) table.emplace(k, LabelEntry{"Parcel_" + std::to_string(k), qualitative_color(2 * static_cast<std::size_t>(k) - 1)});
  fx.parcellation.meta.cifti.label_tables = {table};
  fill_cifti_meta(fx.parcellation, Intent::dlabel);
  require_valid(fx.dtseries);
  require_valid(fx.parcellation);
  return fx;
}

FixturePaths write_fixture_set(const FixtureSet& set, const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);
  FixturePaths p{outdir / "fixture.dtseries.nii", outdir / "fixture_parc.dlabel.nii", outdir / "sphere.L.surf.gii",
                 outdir / "sphere.R.surf.gii"};
  write_grayordinates(set.dtseries, p.dtseries);
  write_grayordinates(set.parcellation, p.parcellation);
  write_surf(p.left_sphere, set.left_sphere);
  write_surf(p.right_sphere, set.right_sphere);
  return p;
}

Grayordinates standard_layout_gray(Eigen::Index columns, bool with_subcortex, std::uint64_t seed) {
  Rng rng(seed);
  auto mask_with = [&](std::int64_t in) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(kStdVertices));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    Mask m(idx.size(), false);
    for (std::int64_t i = 0; i < in; ++i) m[idx[static_cast<std::size_t>(i)]] = true;
    return m;
  };
  auto random_matrix = [&](Eigen::Index rows) {
    Eigen::MatrixXd d(rows, columns);
    for (Eigen::Index c = 0; c < columns; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) d(r, c) = f32(rng.normal());
    return d;
  };
  MatrixParts parts;
  parts.mask_left = mask_with(kStdLeftData);
  parts.cortex_left = random_matrix(kStdLeftData);
  parts.mask_right = mask_with(kStdRightData);
  parts.cortex_right = random_matrix(kStdRightData);
  if (with_subcortex) {
    SubcortMeta sub;
    sub.grid.dims = {91, 109, 91};
    sub.grid.affine << -2, 0, 0, 90, 0, 2, 0, -126, 0, 0, 2, -72, 0, 0, 0, 1;
    std::vector<int> labels;
    for (std::size_t s = 2; s < kSubcortStructureCount; ++s) {
      labels.insert(labels.end(), static_cast<std::size_t>(kStdSubcortCounts[s]), static_cast<int>(s));
    }
    rng.shuffle(labels);
    // A central box, filled in spatial order with the shuffled labels.
    sub.mask.assign(static_cast<std::size_t>(sub.grid.voxel_count()), false);
    std::size_t placed = 0;
    for (std::int64_t k = 20; k < 71 && placed < labels.size(); ++k)
      for (std::int64_t j = 25; j < 85 && placed < labels.size(); ++j)
        for (std::int64_t i = 20; i < 71 && placed < labels.size(); ++i) {
          sub.mask[static_cast<std::size_t>(sub.grid.linear_index(i, j, k))] = true;
          ++placed;
        }
    sub.labels = std::move(labels);
    parts.subcort = random_matrix(static_cast<Eigen::Index>(sub.labels.size()));
    parts.subcort_meta = std::move(sub);
  }
  Grayordinates g = from_matrices(std::move(parts));
  g.meta.cifti.series = SeriesMap{0.0, 0.72, "second", columns};
  fill_cifti_meta(g, Intent::dtseries);
  return g;
}

Grayordinates random_gray(Rng& rng, const RandomGrayOptions& opt) {
  const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.below(static_cast<std::size_t>(opt.max_columns)));
  const int which = 1 + static_cast<int>(rng.below(7));  // bitmask over L, R, subcortex
  const Intent intent = std::array{Intent::dtseries, Intent::dscalar, Intent::dlabel}[rng.below(3)];
  auto value = [&]() {
    if (intent == Intent::dlabel) return static_cast<double>(rng.below(5));
    return f32(rng.normal() * 10.0);
  };
  auto data = [&](Eigen::Index rows) {
    Eigen::MatrixXd d(rows, m);
    for (Eigen::Index c = 0; c < m; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) d(r, c) = value();
    return d;
  };
  auto random_mask = [&]() {
    const std::size_t v = 4 + rng.below(opt.max_vertices - 3);
    Mask mask(v);
    for (std::size_t i = 0; i < v; ++i) mask[i] = rng.uniform() < 0.8;
    mask[rng.below(v)] = true;
    return mask;
  };
  MatrixParts parts;
  if (which & 1) {
    parts.mask_left = random_mask();
    parts.cortex_left = data(std::count(parts.mask_left->begin(), parts.mask_left->end(), true));
  }
  if (which & 2) {
    parts.mask_right = random_mask();
    parts.cortex_right = data(std::count(parts.mask_right->begin(), parts.mask_right->end(), true));
  }
  if (which & 4) {
    SubcortMeta sub;
    for (auto& d : sub.grid.dims) d = 2 + static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(opt.max_grid - 1)));
    sub.grid.affine = Eigen::Matrix4d::Identity();
    const double vox = std::array{1.0, 1.5, 2.0}[rng.below(3)];
    sub.grid.affine.diagonal().head<3>().setConstant(vox);
    if (rng.uniform() < 0.5) sub.grid.affine(0, 0) = -vox;
    for (int a = 0; a < 3; ++a) sub.grid.affine(a, 3) = -static_cast<double>(rng.below(50));
    sub.mask.assign(static_cast<std::size_t>(sub.grid.voxel_count()), false);
    for (std::size_t i = 0; i < sub.mask.size(); ++i) {
      if (rng.uniform() < 0.5) continue;
      sub.mask[i] = true;
      sub.labels.push_back(2 + static_cast<int>(rng.below(kSubcortStructureCount - 2)));
    }
    if (sub.labels.empty()) {
      sub.mask[0] = true;
      sub.labels.push_back(6);
    }
    parts.subcort = data(static_cast<Eigen::Index>(sub.labels.size()));
    parts.subcort_meta = std::move(sub);
  }
  Grayordinates g = from_matrices(std::move(parts));
  if (intent == Intent::dtseries) {
    g.meta.cifti.series = SeriesMap{static_cast<double>(rng.below(10)), 0.25 * static_cast<double>(1 + rng.below(8)),
                                    "second", m};
  } else {
    for (Eigen::Index c = 0; c < m; ++c) g.meta.cifti.names.push_back("map_" + std::to_string(rng.below(1000)));
  }
  if (rng.uniform() < 0.5) g.meta.cifti.misc.emplace_back("Provenance", "seed " + std::to_string(rng.below(1u << 20)));
  fill_cifti_meta(g, intent);
  return g;
}

}  // namespace gxt
