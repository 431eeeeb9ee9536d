#include <doctest.h>

#include <cmath>

#include "gxt/error.hpp"
#include "gxt/fixtures.hpp"
#include "gxt/gray_io.hpp"
#include "gxt/smoothing.hpp"
#include "gxt/surface_ops.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gxt;
using namespace gxt::oracle;

namespace {

Mask random_roi(Rng& rng, std::size_t n, double keep) {
  Mask m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = rng.uniform() < keep;
  m[0] = true;
  return m;
}

std::int64_t count_true(const Mask& m) { return std::count(m.begin(), m.end(), true); }

}  // namespace

TEST_SUITE("smoothing") {
  TEST_CASE("fwhm to sigma") {
    CHECK(fwhm_to_sigma(5) == doctest::Approx(2.12332).epsilon(1e-5));
    CHECK(fwhm_to_sigma(0) == 0);
    CHECK(fwhm_to_sigma(2.35482) == doctest::Approx(1.0).epsilon(1e-5));
  }

  TEST_CASE("flat grid impulse matches the dense oracle") {
    const Surface s = flat_grid(15, 1.0);
    const Mask roi(225, true);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(225, 1);
    x(7 * 15 + 7, 0) = 1.0;
    const double fwhm = 3.1;
    const auto got = smooth_surface_metric(s, x, roi, fwhm);
    const auto want = dense_smooth(dense_distances(s), roi, x, fwhm);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("masked sphere matches the dense oracle") {
    Surface s = make_icosphere_k(4).surface;
    s.vertices *= 50.0;
    Rng rng(31);
    const Mask roi = random_roi(rng, 162, 0.8);
    Eigen::MatrixXd x(count_true(roi), 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    const auto got = smooth_surface_metric(s, x, roi, 14.0);
    const auto want = dense_smooth(dense_distances(s), roi, x, 14.0);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("constant field, max principle, variance") {
    Surface s = make_icosphere_k(6).surface;
    s.vertices *= 100.0;
    const Mask roi(static_cast<std::size_t>(s.vertex_count()), true);
    const Eigen::MatrixXd c = Eigen::MatrixXd::Constant(s.vertex_count(), 1, 3.25);
    CHECK((smooth_surface_metric(s, c, roi, 20.0).array() - 3.25).abs().maxCoeff() < 1e-6);

    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::MatrixXd x(s.vertex_count(), 1);
      for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = rng.normal();
      x.array() -= x.mean();
      const auto y = smooth_surface_metric(s, x, roi, 25.0);
      CHECK(y.minCoeff() >= x.minCoeff() - 1e-12);
      CHECK(y.maxCoeff() <= x.maxCoeff() + 1e-12);
      const double vx = (x.array() - x.mean()).square().sum(), vy = (y.array() - y.mean()).square().sum();
      CHECK(vy <= vx);
    }
  }

  TEST_CASE("locality and NaN handling") {
    Surface s = make_icosphere_k(5).surface;
    s.vertices *= 100.0;
    const auto n = s.vertex_count();
    const Mask roi(static_cast<std::size_t>(n), true);
    Rng rng(2);
    Eigen::MatrixXd x(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) x(i, 0) = rng.normal();
    const double fwhm = 15.0;
    const auto base = smooth_surface_metric(s, x, roi, fwhm);
    Eigen::MatrixXd x2 = x;
    x2(17, 0) += 10.0;
    const auto moved = smooth_surface_metric(s, x2, roi, fwhm);
    const auto d = geodesic_distances(s, vertex_adjacency(s), 17, INFINITY);
    const double radius = 3.0 * fwhm_to_sigma(fwhm);
    int far = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (d[static_cast<std::size_t>(i)] > radius) {
        ++far;
        CHECK(moved(i, 0) == base(i, 0));
      }
    }
    CHECK(far > 0);

    x2(3, 0) = std::nan("");
    const auto with_nan = smooth_surface_metric(s, x2, roi, fwhm);
    CHECK(std::isnan(with_nan(3, 0)));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != 3) CHECK(!std::isnan(with_nan(i, 0)));
    }
    CHECK(test::same_matrix(smooth_surface_metric(s, x, roi, 0.0), x));
    CHECK_THROWS_AS(smooth_surface_metric(s, x.topRows(5), roi, fwhm), ShapeError);
  }

  TEST_CASE("volume: other structures contribute nothing") {
    SubcortMeta m;
    m.grid.dims = {6, 4, 4};
    m.grid.affine.diagonal() << 2, 2, 2, 1;
    m.mask.assign(96, true);
    Eigen::MatrixXd x(96, 1);
    for (std::int64_t k = 0; k < 4; ++k)
      for (std::int64_t j = 0; j < 4; ++j)
        for (std::int64_t i = 0; i < 6; ++i) {
          const bool left = i < 3;
          m.labels.push_back(left ? 2 : 3);
          x(m.grid.linear_index(i, j, k), 0) = left ? 0.0 : 100.0 + static_cast<double>(i * j + k);
        }
    const auto y = smooth_volume(x, m, 6.0);
    for (Eigen::Index r = 0; r < 96; ++r) {
      if (m.labels[static_cast<std::size_t>(r)] == 2) CHECK(y(r, 0) == 0.0);
    }
    Eigen::MatrixXd c = x;
    for (Eigen::Index r = 0; r < 96; ++r) c(r, 0) = m.labels[static_cast<std::size_t>(r)] == 2 ? -4.0 : 9.5;
    const auto yc = smooth_volume(c, m, 6.0);
    CHECK((yc - c).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("volume: filled box vs separable oracle") {
    const std::array<int, 3> n{7, 6, 5};
    SubcortMeta m;
    m.grid.dims = {7, 6, 5};
    m.grid.affine.diagonal() << -2, 2, 2, 1;
    m.mask.assign(210, true);
    m.labels.assign(210, 9);
    Rng rng(77);
    Eigen::MatrixXd x(210, 1);
    std::vector<double> v(210);
    for (int i = 0; i < 210; ++i) v[static_cast<std::size_t>(i)] = x(i, 0) = rng.normal();
    const double fwhm = 5.0, sigma = fwhm_to_sigma(fwhm);
    const int half = static_cast<int>(std::floor(3.0 * sigma / 2.0));
    auto o = blur_axis(v, n, 0, sigma, 2.0, half);
    o = blur_axis(o, n, 1, sigma, 2.0, half);
    o = blur_axis(o, n, 2, sigma, 2.0, half);
    const auto y = smooth_volume(x, m, fwhm);
    for (int i = 0; i < 210; ++i) CHECK(std::abs(y(i, 0) - o[static_cast<std::size_t>(i)]) < 1e-6);
  }

  TEST_CASE("grayordinates smoothing composes the parts") {
    const auto fx = make_fixture_set();
    SmoothSurfaces surfs{fx.left_sphere, fx.right_sphere, false};
    SmoothParams p;
    p.surf_fwhm = 60;
    p.vol_fwhm = 4;
    const auto out = smooth_gray(fx.dtseries, p, surfs);
    const auto& g = fx.dtseries;
    CHECK(test::same_matrix(*out.data.cortex_left, smooth_surface_metric(fx.left_sphere, *g.data.cortex_left,
                                                                         *g.meta.cortex.medial_wall_mask_left, 60)));
    CHECK(test::same_matrix(*out.data.cortex_right, smooth_surface_metric(fx.right_sphere, *g.data.cortex_right,
                                                                          *g.meta.cortex.medial_wall_mask_right, 60)));
    CHECK(test::same_matrix(*out.data.subcort, smooth_volume(*g.data.subcort, *g.meta.subcort, 4)));
    CHECK(test::same_layout(out, g));
    CHECK(out.meta.cifti == g.meta.cifti);

    SmoothParams zero;
    zero.surf_fwhm = zero.vol_fwhm = 0;
    CHECK(test::same_gray(smooth_gray(g, zero, surfs), g));
    CHECK_THROWS_AS(smooth_gray(fx.parcellation, p, surfs), DomainError);
    CHECK_THROWS_AS(smooth_gray(g, p), DomainError);
    SmoothSurfaces synth;
    synth.synthetic_sphere = true;
    CHECK(test::same_gray(smooth_gray(g, p, synth), out));
  }

  TEST_CASE("file to file") {
    test::TempDir dir;
    const auto fx = make_fixture_set();
    const auto paths = write_fixture_set(fx, dir.path());
    SmoothSurfaces surfs{fx.left_sphere, fx.right_sphere, false};
    SmoothParams p;
    p.surf_fwhm = 60;
    smooth_file(paths.dtseries, dir / "sm.dtseries.nii", p, surfs);
    const auto back = read_all_structures(dir / "sm.dtseries.nii");
    const auto direct = smooth_gray(read_all_structures(paths.dtseries), p, surfs);
    CHECK(as_matrix(back).isApprox(as_matrix(direct), 1e-6));
    CHECK(dims(back) == dims(fx.dtseries));
  }
}
