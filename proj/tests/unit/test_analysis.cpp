#include <doctest.h>

#include <Eigen/LU>
#include <cmath>
#include <sstream>

#include "gxt/analysis.hpp"
#include "gxt/error.hpp"
#include "gxt/fixtures.hpp"
#include "gxt/manip.hpp"
#include "support.hpp"

using namespace gxt;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const auto n = static_cast<double>(a.size());
  const double ma = a.sum() / n, mb = b.sum() / n;
  double sab = 0, saa = 0, sbb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::string testing_join(const std::vector<Eigen::Index>& v) {
  std::string s;
  for (auto x : v) s += std::to_string(x) + " ";
  return s;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("parcel vector from the fixture parcellation") {
    const auto fx = make_fixture_set();
    const auto pv = parc_vector(fx.parcellation);
    CHECK(pv.keys.size() == 84);
    CHECK(pv.n_regions == 5);
    CHECK(*std::max_element(pv.keys.begin(), pv.keys.end()) == 5);
    const auto& wall = *fx.dtseries.meta.cortex.medial_wall_mask_left;
    for (std::size_t i = 0; i < 42; ++i) {
      if (!wall[i]) CHECK(pv.keys[i] == 0);
    }

    const auto with_sub = parc_vector(fx.parcellation, &fx.dtseries, 400);
    CHECK(with_sub.keys.size() == 84 + 248);
    CHECK(with_sub.n_regions == 419);
    const auto& labels = fx.dtseries.meta.subcort->labels;
    for (std::size_t r = 0; r < labels.size(); ++r) CHECK(with_sub.keys[84 + r] == 400 + labels[r] - 1);
    CHECK(std::count(with_sub.keys.begin(), with_sub.keys.end(), 401) == 108);
    CHECK(std::count(with_sub.keys.begin(), with_sub.keys.end(), 405) == 32);

    CHECK_THROWS_AS(parc_vector(fx.parcellation, &fx.parcellation), NotFound);
    CHECK_THROWS_AS(parc_vector(fx.parcellation, &fx.dtseries, 3), DomainError);
  }

  TEST_CASE("single parcel gives all ones and column means") {
    MatrixParts p;
    p.cortex_left = Eigen::MatrixXd::Ones(8, 1);
    auto parc = from_matrices(p);
    fill_cifti_meta(parc, Intent::dlabel);
    const auto pv = parc_vector(parc);
    CHECK(std::all_of(pv.keys.begin(), pv.keys.end(), [](int k) { return k == 1; }));
    const auto x = random_matrix(8, 4, 2);
    const auto means = parcel_means(x, pv);
    CHECK((means.row(0) - x.colwise().mean()).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("parcel means vs loop oracle") {
    Eigen::MatrixXd x = random_matrix(12, 3, 7);
    x(4, 1) = std::nan("");
    ParcelVector pv{{1, 2, 3, 1, 2, 3, 0, 1, 1, 2, 3, 3}, 4};
    const auto got = parcel_means(x, pv);
    REQUIRE(got.rows() == 4);
    for (int p = 1; p <= 4; ++p) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        double s = 0;
        int n = 0;
        for (Eigen::Index i = 0; i < 12; ++i) {
          if (pv.keys[static_cast<std::size_t>(i)] == p && !std::isnan(x(i, j))) s += x(i, j), ++n;
        }
        if (n == 0) {
          CHECK(std::isnan(got(p - 1, j)));
        } else {
          CHECK(std::abs(got(p - 1, j) - s / n) < 1e-12);
        }
      }
    }
    CHECK_THROWS_AS(parcel_means(x.topRows(5), pv), ShapeError);
  }

  TEST_CASE("correlations") {
    const auto ts = random_matrix(5, 40, 9);
    const auto c = correlation_matrix(ts);
    for (Eigen::Index i = 0; i < 5; ++i) {
      CHECK(c(i, i) == 1.0);
      for (Eigen::Index j = 0; j < 5; ++j) {
        CHECK(c(i, j) == c(j, i));
        CHECK(std::abs(c(i, j) - pearson(ts.row(i), ts.row(j))) < 1e-12);
      }
    }
    const auto s = seed_correlation(ts, 2);
    CHECK(s[2] == 1.0);
    CHECK((s - c.col(2)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(seed_correlation(ts, 5), IndexError);

    Eigen::MatrixXd pair(3, 10);
    pair.row(0) = ts.row(0).head(10);
    pair.row(1) = pair.row(0);
    pair.row(2) = -pair.row(0);
    const auto pc = correlation_matrix(pair);
    CHECK(pc(0, 1) == doctest::Approx(1.0));
    CHECK(pc(0, 2) == doctest::Approx(-1.0));
    pair.row(2).setConstant(4.0);
    const auto flat = correlation_matrix(pair);
    CHECK(std::isnan(flat(2, 2)));
    CHECK(std::isnan(flat(0, 2)));
  }

  TEST_CASE("mapping region values back to locations") {
    ParcelVector pv{{0, 2, 1, 2, 3, 0}, 3};
    Eigen::Vector3d v(10, 20, 30);
    const auto out = map_region_values_to_locations(v, pv);
    CHECK(std::isnan(out[0]));
    CHECK(out[1] == 20);
    CHECK(out[2] == 10);
    CHECK(out[4] == 30);
    CHECK(std::isnan(out[5]));
    ParcelVector zeros{{0, 0, 0}, 3};
    CHECK(map_region_values_to_locations(v, zeros).array().isNaN().all());
    CHECK_THROWS_AS(map_region_values_to_locations(Eigen::Vector2d(1, 2), pv), IndexError);

    // Parcel-constant field survives means then mapping.
    Eigen::MatrixXd field(6, 1);
    for (int i = 0; i < 6; ++i) field(i, 0) = pv.keys[static_cast<std::size_t>(i)] * 1.5;
    const auto back = map_region_values_to_locations(parcel_means(field, pv).col(0), pv);
    for (int i = 0; i < 6; ++i) {
      if (pv.keys[static_cast<std::size_t>(i)] != 0) CHECK(back[i] == field(i, 0));
    }
  }

  TEST_CASE("dct count") {
    CHECK(dct_count(1200, 0.72, 0.008) == 13);
    // Basis j has frequency j / (2T).
    const double T = 1200 * 0.72;
    CHECK(13 / (2 * T) <= 0.008);
    CHECK(14 / (2 * T) > 0.008);
    CHECK(dct_count(1200, 0.72, 0.0) == 0);
    CHECK(dct_count(100, 1.0, 0.05) == 10);
    CHECK_THROWS_AS(dct_count(100, 0.0, 0.01), DomainError);
    CHECK_THROWS_AS(dct_count(10, 1.0, 0.5), DomainError);
  }

  TEST_CASE("dct bases") {
    const auto b = dct_bases(64, 8);
    REQUIRE(b.rows() == 64);
    REQUIRE(b.cols() == 8);
    for (int i = 0; i < 8; ++i) {
      double mean = 0;
      for (int t = 0; t < 64; ++t) {
        CHECK(std::abs(b(t, i) - std::sqrt(2.0 / 64) * std::cos(M_PI * (i + 1) * (t + 0.5) / 64)) < 1e-14);
        mean += b(t, i) / 64;
      }
      CHECK(std::abs(mean) < 1e-12);
      for (int j = 0; j < 8; ++j) {
        double dot = 0;
        for (int t = 0; t < 64; ++t) dot += b(t, i) * b(t, j);
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-10);
      }
    }
    CHECK(dct_bases(64, 0).cols() == 0);
  }

  TEST_CASE("nuisance regression") {
    const auto x = random_matrix(6, 20, 4);
    Eigen::MatrixXd d(20, 3);
    d.col(0).setOnes();
    d.rightCols(2) = random_matrix(20, 2, 5);
    const auto r = nuisance_regression(x, d);
    CHECK(!r.rank_deficient);
    // Normal equations: beta = (D'D)^-1 D'x'.
    const Eigen::MatrixXd beta = (d.transpose() * d).inverse() * d.transpose() * x.transpose();
    const Eigen::MatrixXd want = x - (d * beta).transpose();
    CHECK((r.residuals - want).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((r.residuals * d).cwiseAbs().maxCoeff() < 1e-8 * x.norm());

    const auto demeaned = nuisance_regression(x, Eigen::MatrixXd::Ones(20, 1)).residuals;
    CHECK((demeaned - (x.colwise() - x.rowwise().mean())).cwiseAbs().maxCoeff() < 1e-12);

    const auto q = dct_bases(20, 4);
    const auto orth = nuisance_regression(x, q).residuals;
    CHECK((orth - (x - x * q * q.transpose())).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::MatrixXd dup(20, 3);
    dup << d.col(0), d.col(1), d.col(1);
    const auto rd = nuisance_regression(x, dup);
    CHECK(rd.rank_deficient);
    CHECK((rd.residuals * dup).cwiseAbs().maxCoeff() < 1e-8 * x.norm());
    CHECK_THROWS_AS(nuisance_regression(x, Eigen::MatrixXd::Ones(19, 1)), ShapeError);
  }

  TEST_CASE("dvars and flags") {
    const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(5, 12, 2.0);
    const auto d0 = rms_dvars(flat);
    CHECK(d0.size() == 11);
    CHECK(d0.isZero());
    const auto f0 = flag_by_threshold(d0, 3.0);
    CHECK(f0.size() == 12);
    CHECK(std::none_of(f0.begin(), f0.end(), [](bool b) { return b; }));

    Eigen::MatrixXd x = 0.1 * random_matrix(30, 50, 6);
    x.col(20).array() += 8.0;
    const auto d = rms_dvars(x);
    for (Eigen::Index t = 0; t < 49; ++t) {
      const double want = std::sqrt((x.col(t + 1) - x.col(t)).squaredNorm() / 30.0);
      CHECK(std::abs(d[t] - want) < 1e-12);
    }
    const auto flags = flag_by_threshold(d, 3.0);
    std::vector<Eigen::Index> hit;
    for (std::size_t t = 0; t < flags.size(); ++t)
      if (flags[t]) hit.push_back(static_cast<Eigen::Index>(t));
    INFO("flagged: " << testing_join(hit));
    CHECK(flags[20]);
    CHECK(flags[21]);
    CHECK(!flags[0]);
    for (Eigen::Index t = 0; t < 49; ++t) {
      if (t != 19 && t != 20) CHECK(d[t] < std::min(d[19], d[20]));
    }

    // median 2, MAD 1 -> threshold 2 + 2 * 1.4826 = 4.9652.
    Eigen::VectorXd v(7);
    v << 1, 2, 3, 2, 4.96, 4.97, 1;
    const auto fv = flag_by_threshold(v, 2.0);
    CHECK(fv == std::vector<bool>{false, false, false, false, false, false, true, false});
  }

  TEST_CASE("clean pipeline") {
    const auto g = make_fixture_set().dtseries;
    CleanParams p;
    p.tr = 0.72;
    p.highpass_hz = 0.1;
    const auto r = clean(g, p);
    CHECK(r.n_dct == dct_count(20, 0.72, 0.1));
    CHECK(r.gray.cols() == 20);
    CHECK(validate(r.gray).empty());
    Eigen::MatrixXd design(20, 1 + r.n_dct);
    design.col(0).setOnes();
    design.rightCols(r.n_dct) = dct_bases(20, r.n_dct);
    CHECK((as_matrix(r.gray) * design).cwiseAbs().maxCoeff() < 1e-8 * as_matrix(g).norm());

    auto spiked = g;
    spiked.data.subcort->col(9).array() += 500.0;
    p.scrub_z = 3.0;
    const auto s = clean(spiked, p);
    const auto n_flag = std::count(s.flagged.begin(), s.flagged.end(), true);
    CHECK(n_flag >= 1);
    CHECK(s.gray.cols() == 20 - n_flag);
    CHECK(validate(s.gray).empty());
  }

  TEST_CASE("tsv round trip") {
    Eigen::MatrixXd m = random_matrix(3, 4, 1);
    m(1, 2) = std::nan("");
    std::stringstream ss;
    write_tsv(ss, m);
    CHECK(ss.str().find("NaN") != std::string::npos);
    CHECK(test::same_matrix(read_tsv(ss), m));
  }
}
