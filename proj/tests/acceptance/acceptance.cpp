// Acceptance checks AC1..AC8. One line per criterion; exit status 1 when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "gxt/analysis.hpp"
#include "gxt/error.hpp"
#include "gxt/fixtures.hpp"
#include "gxt/gray_io.hpp"
#include "gxt/manip.hpp"
#include "gxt/render.hpp"
#include "gxt/smoothing.hpp"
#include "gxt/surface_ops.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gxt;
using namespace gxt::oracle;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects the first few failure notes of a criterion.
struct Checker {
  int failures = 0;
  std::vector<std::string> notes;

  void operator()(bool ok, const std::string& what) {
    if (ok) return;
    ++failures;
    if (notes.size() < 4) notes.push_back(what);
  }
  std::string summary() const {
    std::string s;
    for (const auto& n : notes) s += (s.empty() ? "" : "; ") + n;
    if (failures > static_cast<int>(notes.size())) s += "; +" + std::to_string(failures - notes.size()) + " more";
    return s;
  }
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

std::string strip_prefix(const std::string& block) {
  std::istringstream in(block);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("## ", 0) == 0) line = line.substr(3);
    else if (line == "##") line.clear();
    out += line + "\n";
  }
  return out;
}

std::string rstrip(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

// Summary blocks as printed for the demo data, with 1200 columns scaled to 20.
const char* kCortexSummary = R"(## =====CIFTI METADATA=====
## Intent:          3002 (dtseries)
## - time step     0.72 (seconds)
## - time start    0
## Measurements:   20 columns
##
## =====BRAIN STRUCTURES=====
## - left cortex   29696 data vertices
##                2796 medial wall vertices (32492 total)
##
## - right cortex  29716 data vertices
##                2776 medial wall vertices (32492 total))";

const char* kFullSummary = R"(## =====CIFTI METADATA=====
## Intent:          3002 (dtseries)
## - time step     0.72 (seconds)
## - time start    0
## Measurements:   20 columns
##
## =====BRAIN STRUCTURES=====
## - left cortex      29696 data vertices
##                   2796 medial wall vertices (32492 total)
##
## - right cortex     29716 data vertices
##                   2776 medial wall vertices (32492 total)
##
## - subcortex        31870 data voxels
##                   subcortical structures and number of voxels in each:
##                   Cortex-L (0), Cortex-R (0),
##                   Accumbens-L (135), Accumbens-R (140),
##                   Amygdala-L (315), Amygdala-R (332),
##                   Brain Stem (3472),
##                   Caudate-L (728), Caudate-R (755),
##                   Cerebellum-L (8709), Cerebellum-R (9144),
##                   Diencephalon-L (706), Diencephalon-R (712),
##                   Hippocampus-L (764), Hippocampus-R (795),
##                   Pallidum-L (297), Pallidum-R (260),
##                   Putamen-L (1060), Putamen-R (1010),
##                   Thalamus-L (1288), Thalamus-R (1248).)";

std::string ac1(Checker& c) {
  const auto t0 = Clock::now();
  test::TempDir dir("gxt_ac1");
  const auto g = standard_layout_gray(20, true);
  const auto path = dir / "std.dtseries.nii";
  write_grayordinates(g, path);

  const auto cortex = read_grayordinates(path);
  ReadOptions all;
  all.structures = BrainStructures::all();
  const auto full = read_grayordinates(path, all);
  c(dims(cortex) == Dims{59412, 20}, "cortex-only dims " + std::to_string(dims(cortex).rows));
  c(dims(full) == Dims{91282, 20}, "full dims " + std::to_string(dims(full).rows));
  c(dims(move_from_mwall(full)) == Dims{96854, 20}, "padded dims");
  c(rstrip(summary(cortex)) == rstrip(strip_prefix(kCortexSummary)), "cortex-only summary text");
  c(rstrip(summary(full)) == rstrip(strip_prefix(kFullSummary)), "full summary text");
  c(rstrip(info(path)) == rstrip(strip_prefix(kFullSummary)), "header-only summary text");
  const double t = seconds_since(t0);
  c(t < 5.0, "took " + fmt(t) + " s");
  return "59412/91282 rows, summaries exact, " + fmt(t) + " s";
}

std::string ac2(Checker& c) {
  const auto t0 = Clock::now();
  test::TempDir dir("gxt_ac2");
  Rng rng(2024);
  const char* suffix[] = {".dtseries.nii", ".dscalar.nii", ".dlabel.nii"};
  for (int n = 0; n < 200; ++n) {
    const auto g = random_gray(rng);
    const std::string tag = "#" + std::to_string(n);
    const int which = g.meta.cifti.intent == Intent::dtseries ? 0 : g.meta.cifti.intent == Intent::dscalar ? 1 : 2;
    const auto path = dir / ("g" + std::to_string(n) + suffix[which]);
    write_grayordinates(g, path);
    c(test::same_gray(read_all_structures(path), g), tag + " read(write(g)) != g");

    const auto sub = dir.path() / ("sep" + std::to_string(n));
    const auto files = separate(g, sub);
    const auto back = assemble(files, g.meta.cifti.intent);
    c(test::same_data(back, g) && test::same_layout(back, g), tag + " assemble(separate(g)) != g");

    c(test::same_gray(move_to_mwall(move_from_mwall(g)), g), tag + " move_to(move_from(g)) != g");
  }
  const double t = seconds_since(t0);
  c(t < 60.0, "took " + fmt(t) + " s");
  return "200 fixtures x 3 identities, " + fmt(t) + " s";
}

std::string ac3(Checker& c) {
  // (a)
  c(std::abs(fwhm_to_sigma(5.0) - 2.12332) <= 1e-4, "sigma(5) = " + fmt(fwhm_to_sigma(5.0)));

  // (b)
  Surface sphere = make_icosphere_k(8).surface;
  sphere.vertices *= 100.0;
  Rng rng(33);
  Mask roi(static_cast<std::size_t>(sphere.vertex_count()));
  for (std::size_t i = 0; i < roi.size(); ++i) roi[i] = rng.uniform() < 0.9;
  const auto n_roi = static_cast<Eigen::Index>(std::count(roi.begin(), roi.end(), true));
  const Eigen::MatrixXd k = Eigen::MatrixXd::Constant(n_roi, 1, -12.5);
  c((smooth_surface_metric(sphere, k, roi, 12.0).array() + 12.5).abs().maxCoeff() <= 1e-6, "constant surface field");
  const auto fx = make_fixture_set();
  const auto& meta = *fx.dtseries.meta.subcort;
  const Eigen::MatrixXd kv = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(meta.labels.size()), 1, 4.0);
  c((smooth_volume(kv, meta, 6.0).array() - 4.0).abs().maxCoeff() <= 1e-6, "constant volume field");

  // (c)
  const Surface grid = flat_grid(17, 1.0);
  const Mask all(289, true);
  Eigen::MatrixXd impulse = Eigen::MatrixXd::Zero(289, 1);
  impulse(8 * 17 + 8, 0) = 1.0;
  const auto dist = dense_distances(grid);
  double worst = 0;
  for (double fwhm : {2.2, 3.1, 4.4}) {
    const auto got = smooth_surface_metric(grid, impulse, all, fwhm);
    worst = std::max(worst, (got - dense_smooth(dist, all, impulse, fwhm)).cwiseAbs().maxCoeff());
  }
  c(worst <= 1e-9, "impulse vs dense oracle " + fmt(worst));

  // (d)
  Surface small = make_icosphere_k(5).surface;
  small.vertices *= 100.0;
  const auto small_dist = dense_distances(small);
  int bad_max = 0, bad_iso = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Mask r(static_cast<std::size_t>(small.vertex_count()));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rng.uniform() < 0.85;
    r[0] = true;
    const auto nr = static_cast<Eigen::Index>(std::count(r.begin(), r.end(), true));
    Eigen::MatrixXd x(nr, 1);
    for (Eigen::Index i = 0; i < nr; ++i) x(i, 0) = rng.normal() * 10;
    const auto y = smooth_surface_metric(small, x, r, 30.0);
    if (y.minCoeff() < x.minCoeff() - 1e-12 || y.maxCoeff() > x.maxCoeff() + 1e-12) ++bad_max;
    // Only in-ROI vertices may carry weight.
    if ((y - dense_smooth(small_dist, r, x, 30.0)).cwiseAbs().maxCoeff() > 1e-9) ++bad_iso;
  }
  c(bad_max == 0, std::to_string(bad_max) + " max-principle violations");
  c(bad_iso == 0, std::to_string(bad_iso) + " medial-wall isolation violations");

  // (e)
  int leaks = 0;
  for (int trial = 0; trial < 20; ++trial) {
    SubcortMeta m;
    m.grid.dims = {9, 8, 7};
    m.grid.affine.diagonal() << -2, 2, 2, 1;
    m.mask.assign(504, false);
    std::vector<double> vals;
    std::vector<bool> zero_struct;
    for (std::int64_t kk = 0; kk < 7; ++kk)
      for (std::int64_t j = 0; j < 8; ++j)
        for (std::int64_t i = 0; i < 9; ++i) {
          if (rng.uniform() < 0.15) continue;
          m.mask[static_cast<std::size_t>(m.grid.linear_index(i, j, kk))] = true;
          // Interleaved structures: a plane split plus random speckle.
          const bool first = (i + trial % 3 < 5) != (rng.uniform() < 0.1);
          m.labels.push_back(first ? 9 : 10);
          vals.push_back(first ? 0.0 : 50 + rng.normal() * 20);
          zero_struct.push_back(first);
        }
    const Eigen::MatrixXd x = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    const auto y = smooth_volume(x, m, 8.0);
    for (std::size_t r = 0; r < zero_struct.size(); ++r) {
      if (zero_struct[r] && y(static_cast<Eigen::Index>(r), 0) != 0.0) ++leaks;
    }
  }
  c(leaks == 0, std::to_string(leaks) + " voxels leaked across structures");
  return "sigma(5)=" + fmt(fwhm_to_sigma(5.0)) + ", impulse err " + fmt(worst) + ", 50 fields, 20 volumes";
}

std::string ac4(Checker& c) {
  // Constant fields.
  for (auto [a, b] : {std::pair{3, 7}, std::pair{8, 5}, std::pair{12, 11}}) {
    const auto src = make_icosphere_k(a), dst = make_icosphere_k(b);
    const auto map = build_resample_map(src, dst);
    const Eigen::MatrixXd k = Eigen::MatrixXd::Constant(src.surface.vertex_count(), 1, 0.1 + a);
    c((resample_values(map, k, ResampleKind::metric).array() == 0.1 + a).all(), "constant metric not exact");
    c((resample_values(map, k, ResampleKind::label).array() == 0.1 + a).all(), "constant label not exact");
  }

  // Linear field on the unit sphere.
  const auto s8 = make_icosphere_k(8), s5 = make_icosphere_k(5);
  const auto map85 = build_resample_map(s8, s5);
  double lin_err = 0;
  const std::vector<Eigen::Vector3d> directions{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                                Eigen::Vector3d::UnitZ(), Eigen::Vector3d(0.3, -0.8, 0.5).normalized()};
  for (const auto& u : directions) {
    const Eigen::MatrixXd f = s8.surface.vertices * u;
    const auto out = resample_values(map85, f, ResampleKind::metric);
    lin_err = std::max(lin_err, (out.col(0) - s5.surface.vertices * u).cwiseAbs().maxCoeff());
  }
  c(lin_err < 1e-3, "linear field k=8->5 max error " + fmt(lin_err) + " (bound 1e-3)");

  // Icosphere counts.
  for (int k = 1; k <= 64; ++k) {
    const auto m = make_icosphere_k(k);
    c(m.surface.vertex_count() == 10 * k * k + 2 && m.surface.face_count() == 20 * k * k,
      "icosphere k=" + std::to_string(k));
  }

  // Labels vs argmax-weight oracle.
  Rng rng(44);
  for (int n = 0; n < 20; ++n) {
    const int ka = 2 + static_cast<int>(rng.below(9)), kb = 2 + static_cast<int>(rng.below(9));
    const auto src = make_icosphere_k(ka), dst = make_icosphere_k(kb);
    const auto map = build_resample_map(src, dst);
    Eigen::MatrixXd keys(src.surface.vertex_count(), 2);
    for (Eigen::Index i = 0; i < keys.size(); ++i) keys.data()[i] = static_cast<double>(rng.below(7));
    const auto got = resample_values(map, keys, ResampleKind::label);
    int wrong = 0;
    for (std::size_t t = 0; t < map.target_count(); ++t) {
      for (Eigen::Index j = 0; j < 2; ++j) {
        double best_w = -1, best_k = 0;
        for (int v = 0; v < 3; ++v) {
          const double w = map.weight[t][static_cast<std::size_t>(v)];
          const double kk = keys(map.vertex[t][static_cast<std::size_t>(v)], j);
          if (w > best_w || (w == best_w && kk < best_k)) best_w = w, best_k = kk;
        }
        if (got(static_cast<Eigen::Index>(t), j) != best_k) ++wrong;
      }
    }
    c(wrong == 0, "label fixture " + std::to_string(n) + ": " + std::to_string(wrong) + " mismatches");
  }

  // Subcortex untouched.
  const auto g = make_fixture_set().dtseries;
  const auto r = resample_gray(g, 642);
  const bool same_bytes = r.data.subcort && r.data.subcort->size() == g.data.subcort->size() &&
                          std::memcmp(r.data.subcort->data(), g.data.subcort->data(),
                                      sizeof(double) * static_cast<std::size_t>(g.data.subcort->size())) == 0;
  c(same_bytes && r.meta.subcort == g.meta.subcort, "subcortex changed by resampling");
  return "linear field err " + fmt(lin_err) + ", k 1..64 counts, 20 label fixtures";
}

std::string ac5(Checker& c) {
  Rng rng(55);
  // parcel_means vs loop.
  Eigen::MatrixXd x(300, 15);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  for (int i = 0; i < 10; ++i) x(static_cast<Eigen::Index>(rng.below(300)), static_cast<Eigen::Index>(rng.below(15))) = std::nan("");
  ParcelVector pv;
  pv.n_regions = 12;
  for (int i = 0; i < 300; ++i) pv.keys.push_back(static_cast<int>(rng.below(12)));
  const auto means = parcel_means(x, pv);
  double err = 0;
  for (int p = 1; p <= 12; ++p)
    for (Eigen::Index j = 0; j < 15; ++j) {
      double s = 0;
      int n = 0;
      for (int i = 0; i < 300; ++i)
        if (pv.keys[static_cast<std::size_t>(i)] == p && !std::isnan(x(i, j))) s += x(i, j), ++n;
      if (n == 0) c(std::isnan(means(p - 1, j)), "empty parcel not NaN");
      else err = std::max(err, std::abs(means(p - 1, j) - s / n));
    }
  c(err <= 1e-12, "parcel means err " + fmt(err));

  // Correlation matrix.
  const Eigen::MatrixXd ts = means.topRows(11);
  const auto cm = correlation_matrix(ts);
  bool sym = true, unit = true, bounded = true;
  for (Eigen::Index i = 0; i < cm.rows(); ++i) {
    unit = unit && cm(i, i) == 1.0;
    for (Eigen::Index j = 0; j < cm.cols(); ++j) {
      sym = sym && cm(i, j) == cm(j, i);
      bounded = bounded && cm(i, j) >= -1.0 && cm(i, j) <= 1.0;
    }
  }
  c(sym, "correlation not symmetric");
  c(unit, "correlation diagonal not 1");
  c(bounded, "correlation outside [-1, 1]");
  for (Eigen::Index s = 0; s < ts.rows(); ++s) c(seed_correlation(ts, s)[s] == 1.0, "seed with itself != 1");

  // DCT.
  double orth = 0;
  for (auto [n, k] : {std::pair{64, 8}, std::pair{1200, 13}, std::pair{37, 36}}) {
    const auto b = dct_bases(n, k);
    orth = std::max(orth, (b.transpose() * b - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff());
  }
  c(orth <= 1e-10, "DCT orthonormality " + fmt(orth));
  const int kc = dct_count(1200, 0.72, 0.008);
  const double T = 1200 * 0.72;
  c(kc == 13, "dct_count = " + std::to_string(kc));
  c(kc / (2 * T) <= 0.008 && (kc + 1) / (2 * T) > 0.008, "frequency bracket");

  // Residuals orthogonal to the design.
  Eigen::MatrixXd data(40, 120);
  for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = rng.normal() + 3.0;
  Eigen::MatrixXd design(120, 1 + 6);
  design.col(0).setOnes();
  design.rightCols(6) = dct_bases(120, 6);
  const auto res = nuisance_regression(data, design).residuals;
  const double perp = (res * design).cwiseAbs().maxCoeff() / data.norm();
  c(perp < 1e-8, "residual projection " + fmt(perp));
  return "means err " + fmt(err) + ", DCT " + fmt(orth) + ", k=" + std::to_string(kc) + ", perp " + fmt(perp);
}

bool present(const Grayordinates& g, Component part) {
  switch (part) {
    case Component::cortex_left: return g.data.cortex_left.has_value();
    case Component::cortex_right: return g.data.cortex_right.has_value();
    case Component::subcortex: return g.data.subcort.has_value();
    default: return false;
  }
}

Grayordinates only(const Grayordinates& g, Component keep) {
  Grayordinates out = g;
  for (auto part : {Component::cortex_left, Component::cortex_right, Component::subcortex}) {
    if (part != keep && present(out, part)) out = remove(out, part);
  }
  return out;
}

std::string ac6(Checker& c) {
  Rng rng(66);
  for (int n = 0; n < 50; ++n) {
    const auto g = random_gray(rng);
    const std::string tag = "#" + std::to_string(n);
    const auto t = binary_op(BinaryOp::eq, binary_op(BinaryOp::sub, g, g), 0.0);
    c((as_matrix(t).array() == 1.0).all(), tag + " (g-g)==0 not all ones");
    c(validate(t).empty(), tag + " comparison result invalid");
    c(test::same_data(binary_op(BinaryOp::add, g, 0.0), g), tag + " g+0 != g");

    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      if (rng.uniform() < 0.6) idx.push_back(j);
    if (idx.empty()) idx.push_back(g.cols() - 1);
    c(validate(select_columns(g, idx)).empty(), tag + " select invalid");
    c(validate(merge_columns({g, g})).empty(), tag + " merge invalid");

    std::vector<Grayordinates> parts;
    for (auto keep : {Component::cortex_left, Component::cortex_right, Component::subcortex}) {
      if (present(g, keep)) parts.push_back(only(g, keep));
    }
    if (parts.size() > 1) {
      const auto joined = combine_structures(parts);
      c(validate(joined).empty() && test::same_data(joined, g), tag + " combine invalid");
    }
  }
  return "50 random objects";
}

std::string ac7(Checker& c) {
  test::TempDir dir("gxt_ac7");
  const auto fx = make_fixture_set();
  SmoothSurfaces surfs{fx.left_sphere, fx.right_sphere, false};
  ViewSpec v;
  v.title = "fixture";
  v.panel_width = 160;
  v.panel_height = 120;
  std::vector<std::uint8_t> first;
  for (int run = 0; run < 5; ++run) {
    const auto img = render_surface(fx.dtseries, v, {}, surfs).images.at(0);
    const auto path = dir / ("r" + std::to_string(run) + ".png");
    write_png(path, img);
    std::ifstream f(path, std::ios::binary);
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (run == 0) first = bytes;
    c(!bytes.empty() && bytes == first, "run " + std::to_string(run) + " PNG bytes differ");
  }

  Rng rng(77);
  int fired = 0;
  for (int n = 0; n < 100; ++n) {
    const std::size_t len = 1 + rng.below(400);
    const double scale = std::pow(10.0, -3 + 7 * rng.uniform());
    std::vector<double> x(len);
    for (auto& e : x) {
      switch (n % 4) {
        case 0: e = rng.normal() * scale; break;
        case 1: e = rng.uniform() * scale; break;
        case 2: e = -rng.uniform() * scale; break;
        default: e = (rng.uniform() < 0.1 ? std::nan("") : rng.normal() * scale + 0.4 * scale); break;
      }
    }
    const auto got = auto_zlim(x);
    const auto want = zlim_rule(x);
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
    c(close(got.first, want.first) && close(got.second, want.second),
      "vector " + std::to_string(n) + ": (" + fmt(got.first) + ", " + fmt(got.second) + ") vs (" + fmt(want.first) +
          ", " + fmt(want.second) + ")");
    double mn = INFINITY, mx = -INFINITY;
    for (double e : x)
      if (std::isfinite(e)) mn = std::min(mn, e), mx = std::max(mx, e);
    const bool straddle = mn < 0 && mx > 0;
    const bool symmetric = got.first == -got.second;
    fired += symmetric ? 1 : 0;
    c(symmetric == straddle, "vector " + std::to_string(n) + ": symmetric branch mismatch");
  }

  Surface s = make_icosphere_k(9).surface;
  const auto adj = vertex_adjacency(s);
  for (int n = 0; n < 10; ++n) {
    std::vector<int> keys(static_cast<std::size_t>(s.vertex_count()));
    const Eigen::Vector3d u = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized();
    for (std::size_t i = 0; i < keys.size(); ++i) {
      // Half the labelings are smooth bands, half random noise.
      keys[i] = n % 2 == 0 ? static_cast<int>(std::floor(3 * s.vertices.row(static_cast<Eigen::Index>(i)).dot(u)))
                           : static_cast<int>(rng.below(3));
    }
    c(compute_borders(keys, adj) == edge_scan_borders(s, keys), "labeling " + std::to_string(n) + " borders differ");
  }
  return "5 identical PNGs, 100 zlim vectors (" + std::to_string(fired) + " symmetric), 10 labelings";
}

std::string ac8(Checker& c) {
  const auto t0 = Clock::now();
  test::TempDir dir("gxt_ac8");
  const auto fx = make_fixture_set();
  const auto paths = write_fixture_set(fx, dir.path());

  SmoothParams sp;
  sp.surf_fwhm = 40;
  sp.vol_fwhm = 4;
  SmoothSurfaces surfs{read_surf(paths.left_sphere), read_surf(paths.right_sphere), false};
  smooth_file(paths.dtseries, dir / "sm.dtseries.nii", sp, surfs);
  const auto sm = read_all_structures(dir / "sm.dtseries.nii");
  const auto parc = read_grayordinates(paths.parcellation);

  const auto pv = parc_vector(parc, &sm, 400);
  const auto padded = move_from_mwall(sm);
  const auto region_ts = parcel_means(as_matrix(padded), pv);
  c(region_ts.rows() == 419, "region count " + std::to_string(region_ts.rows()));
  const Eigen::Index seed = 1;
  const auto cor = seed_correlation(region_ts, seed);
  c(cor[seed] == 1.0, "seed self-correlation " + fmt(cor[seed]));
  const auto mapped = map_region_values_to_locations(cor, pv);

  auto out = replace_data(select_columns(padded, {0}), mapped, std::vector<std::string>{"seed"});
  out = convert_intent(out, Intent::dscalar);
  write_grayordinates(out, dir / "seed.dscalar.nii");
  const auto back = read_all_structures(dir / "seed.dscalar.nii");
  c(back.meta.cifti.intent == Intent::dscalar, "re-read intent");
  Eigen::MatrixXd want = mapped;
  for (Eigen::Index i = 0; i < want.size(); ++i) want.data()[i] = static_cast<float>(want.data()[i]);
  c(test::same_matrix(as_matrix(back), want), "re-read values differ from the mapped values");

  const auto img = render_surface(back, ViewSpec{}, {}, surfs);
  write_png(dir / "seed.png", img.images.at(0));
  c(std::filesystem::file_size(dir / "seed.png") > 0, "render produced no PNG");
  c(img.zlim.has_value() && img.message.find("- 1).") != std::string::npos, "message: " + img.message);
  const double t = seconds_since(t0);
  c(t < 30.0, "took " + fmt(t) + " s");
  return "pipeline in " + fmt(t) + " s; " + img.message;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string(Checker&)>>> criteria{
      {"AC1 medial-wall algebra on the standard layout", ac1},
      {"AC2 round-trip identities on 200 random objects", ac2},
      {"AC3 smoothing", ac3},
      {"AC4 resampling", ac4},
      {"AC5 analysis", ac5},
      {"AC6 math semantics and closure", ac6},
      {"AC7 rendering", ac7},
      {"AC8 end-to-end pipeline", ac8},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Checker c;
    std::string detail;
    try {
      detail = fn(c);
    } catch (const std::exception& e) {
      c(false, std::string("exception: ") + e.what());
    }
    const bool ok = c.failures == 0;
    failed += ok ? 0 : 1;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " -- " << (ok ? detail : c.summary()) << std::endl;
  }
  std::cout << (8 - failed) << "/8 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
