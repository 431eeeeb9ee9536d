#include <doctest.h>

#include <fstream>

#include "gxt/error.hpp"
#include "gxt/fixtures.hpp"
#include "gxt/gifti.hpp"
#include "gxt/gray_io.hpp"
#include "gxt/surface_ops.hpp"
#include "support.hpp"

using namespace gxt;

namespace {

bool has_violation(const Grayordinates& g, std::string_view needle) {
  for (const auto& v : validate(g)) {
    if (v.find(needle) != std::string::npos) return true;
  }
  return false;
}

Grayordinates two_hemis(Eigen::Index rows, Eigen::Index cols) {
  MatrixParts p;
  p.cortex_left = Eigen::MatrixXd::Constant(rows, cols, 1.0);
  p.cortex_right = Eigen::MatrixXd::Constant(rows, cols, 2.0);
  return from_matrices(p);
}

}  // namespace

TEST_SUITE("grayordinates") {
  TEST_CASE("two 10x3 matrices with all-true masks") {
    const auto g = two_hemis(10, 3);
    CHECK(dims(g) == Dims{20, 3});
    CHECK(validate(g).empty());
    CHECK(!g.meta.cifti.intent.has_value());
    const auto m = as_matrix(g);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(10, 0) == 2.0);
  }

  TEST_CASE("mismatched column counts raise ShapeError") {
    MatrixParts p;
    p.cortex_left = Eigen::MatrixXd::Zero(4, 3);
    p.cortex_right = Eigen::MatrixXd::Zero(4, 2);
    CHECK_THROWS_AS(from_matrices(p), ShapeError);
    MatrixParts q;
    q.cortex_left = Eigen::MatrixXd::Zero(4, 3);
    q.mask_left = Mask{true, true, false, false};
    CHECK_THROWS_AS(from_matrices(q), ShapeError);
  }

  TEST_CASE("validation names the broken invariant") {
    auto g = two_hemis(5, 2);
    g.meta.cortex.medial_wall_mask_left->push_back(true);
    CHECK(has_violation(g, "medial_wall_mask.left"));

    auto lab = two_hemis(3, 1);
    fill_cifti_meta(lab, Intent::dlabel);
    CHECK(validate(lab).empty());
    lab.data.cortex_left->coeffRef(0, 0) = 1.5;
    CHECK(has_violation(lab, "non-integer"));
    lab.data.cortex_left->coeffRef(0, 0) = 77;
    CHECK(has_violation(lab, "dlabel"));
    CHECK_THROWS_AS(require_valid(lab), ConsistencyError);
  }

  TEST_CASE("write then read gives the same object") {
    test::TempDir dir;
    const auto fx = make_fixture_set();
    write_grayordinates(fx.dtseries, dir / "a.dtseries.nii");
    const auto back = read_all_structures(dir / "a.dtseries.nii");
    CHECK(test::same_gray(back, fx.dtseries));
    write_grayordinates(fx.parcellation, dir / "p.dlabel.nii");
    CHECK(test::same_gray(read_grayordinates(dir / "p.dlabel.nii"), fx.parcellation));
  }

  TEST_CASE("structure selection on read") {
    test::TempDir dir;
    const auto fx = make_fixture_set();
    write_grayordinates(fx.dtseries, dir / "a.dtseries.nii");
    const auto cortex = read_grayordinates(dir / "a.dtseries.nii");
    CHECK(!cortex.data.subcort.has_value());
    CHECK(dims(cortex).rows == 72);
    ReadOptions all;
    all.structures = BrainStructures::all();
    CHECK(dims(read_grayordinates(dir / "a.dtseries.nii", all)).rows == 72 + 248);
    write_grayordinates(fx.parcellation, dir / "p.dlabel.nii");
    CHECK_THROWS_AS(read_grayordinates(dir / "p.dlabel.nii", all), NotFound);
  }

  TEST_CASE("surfaces supplied on read are attached and resampled") {
    test::TempDir dir;
    const auto fx = make_fixture_set();
    write_grayordinates(fx.dtseries, dir / "a.dtseries.nii");
    Surface fine = make_icosphere_k(4).surface;
    fine.vertices *= 100.0;
    fine.hemisphere = Hemisphere::left;
    write_surf(dir / "fine.surf.gii", fine);
    ReadOptions o;
    o.surf_left = dir / "fine.surf.gii";
    const auto g = read_grayordinates(dir / "a.dtseries.nii", o);
    REQUIRE(g.surf.left.has_value());
    CHECK(g.surf.left->vertex_count() == 42);
    CHECK(validate(g).empty());
  }

  TEST_CASE("dlabel value missing from its table is refused on write") {
    test::TempDir dir;
    auto p = make_fixture_set().parcellation;
    p.data.cortex_left->coeffRef(3, 0) = 99;
    CHECK_THROWS_AS(write_grayordinates(p, dir / "bad.dlabel.nii"), ConsistencyError);
  }

  TEST_CASE("info reads the summary from the header") {
    test::TempDir dir;
    const auto fx = make_fixture_set();
    write_grayordinates(fx.dtseries, dir / "a.dtseries.nii");
    write_grayordinates(fx.parcellation, dir / "p.dlabel.nii");
    const auto t = info(dir / "a.dtseries.nii");
    CHECK(t.find("Intent:          3002 (dtseries)") != std::string::npos);
    CHECK(t.find("- time step     0.72 (seconds)") != std::string::npos);
    CHECK(t == summary(fx.dtseries));
    const auto p = info(dir / "p.dlabel.nii");
    CHECK(p.find("Intent:          3007 (dlabel)") != std::string::npos);
    CHECK(p.find("\"parcels\"") != std::string::npos);
  }

  TEST_CASE("medial wall moves") {
    const auto g = make_fixture_set().dtseries;
    const auto full = move_from_mwall(g);
    CHECK(dims(full).rows == 84 + 248);
    CHECK(std::count(full.meta.cortex.medial_wall_mask_left->begin(), full.meta.cortex.medial_wall_mask_left->end(),
                     false) == 0);
    CHECK(test::same_gray(move_to_mwall(full), g));
    CHECK(test::same_gray(move_to_mwall(g), g));
    CHECK(test::same_gray(move_from_mwall(full), full));

    const auto& wall = *g.meta.cortex.medial_wall_mask_left;
    const auto a = static_cast<Eigen::Index>(std::find(wall.begin(), wall.end(), true) - wall.begin());
    const auto b = static_cast<Eigen::Index>(std::find(wall.begin() + a + 1, wall.end(), true) - wall.begin());
    auto partial = full;
    partial.data.cortex_left->row(a).setConstant(std::nan(""));
    partial.data.cortex_left->row(b).setConstant(std::nan(""));
    partial.data.cortex_left->coeffRef(b, 1) = 5.0;
    // Row b keeps one real value, so only row a joins the wall.
    const auto moved = move_to_mwall(partial);
    CHECK(!(*moved.meta.cortex.medial_wall_mask_left)[static_cast<std::size_t>(a)]);
    CHECK((*moved.meta.cortex.medial_wall_mask_left)[static_cast<std::size_t>(b)]);
    CHECK(dims(moved).rows == dims(g).rows - 1);

    auto all_nan = full;
    all_nan.data.cortex_right->setConstant(std::nan(""));
    CHECK_THROWS_AS(move_to_mwall(all_nan), DegenerateError);
  }

  TEST_CASE("remove and add_surf") {
    const auto fx = make_fixture_set();
    const auto g = fx.dtseries;
    const auto no_sub = remove(g, Component::subcortex);
    CHECK(dims(no_sub).rows == dims(g).rows - 248);
    CHECK(test::same_part(no_sub.data.cortex_left, g.data.cortex_left));
    CHECK_THROWS_AS(remove(no_sub, Component::subcortex), NotFound);
    CHECK_THROWS_AS(remove(g, Component::surf_left), NotFound);

    const auto with = add_surf(g, fx.left_sphere);
    REQUIRE(with.surf.left.has_value());
    CHECK(with.surf.left->vertices == fx.left_sphere.vertices);
    CHECK(!remove(with, Component::surf_left).surf.left.has_value());
    Surface odd = fx.left_sphere;
    odd.vertices.conservativeResize(41, 3);
    odd.faces.resize(1, 3);
    odd.faces << 0, 1, 2;
    CHECK_THROWS_AS(add_surf(g, odd), ShapeError);
  }

  TEST_CASE("separate pads with zeros and assemble restores") {
    test::TempDir dir;
    const auto g = make_fixture_set().dtseries;
    const auto files = separate(g, dir.path(), "fx_");
    REQUIRE(files.cortexL.has_value());
    REQUIRE(files.subcortVol.has_value());
    const auto c = read_gifti_columns(*files.cortexL);
    CHECK(c.values.rows() == 42);
    const auto roi = read_gifti_columns(*files.ROIcortexL);
    for (Eigen::Index i = 0; i < 42; ++i) {
      const bool in = (*g.meta.cortex.medial_wall_mask_left)[static_cast<std::size_t>(i)];
      CHECK(roi.values(i, 0) == (in ? 1.0 : 0.0));
      if (!in) CHECK(c.values.row(i).isZero());
    }
    auto back = assemble(files);
    CHECK(!back.meta.cifti.intent.has_value());
    CHECK(test::same_data(back, g));
    CHECK(test::same_layout(back, g));
    back = assemble(files, Intent::dtseries);
    CHECK(back.meta.cifti.intent == Intent::dtseries);

    test::TempDir d2;
    const auto cortex_only = separate(remove(g, Component::subcortex), d2.path());
    CHECK(!cortex_only.subcortVol.has_value());
    CHECK(!cortex_only.subcortLabels.has_value());
  }

  TEST_CASE("assemble rejects mismatched ROI") {
    test::TempDir dir;
    Eigen::MatrixXd d = Eigen::MatrixXd::Ones(6, 2);
    Eigen::MatrixXd r = Eigen::MatrixXd::Ones(5, 1);
    write_gifti_columns(dir / "d.func.gii", d, {"a", "b"}, std::nullopt, Hemisphere::left);
    write_gifti_columns(dir / "r.func.gii", r, {"roi"}, std::nullopt, Hemisphere::left);
    SeparatedFiles f;
    f.cortexL = dir / "d.func.gii";
    f.ROIcortexL = dir / "r.func.gii";
    CHECK_THROWS_AS(assemble(f), ShapeError);
  }

  TEST_CASE("standard layout counts") {
    const auto g = standard_layout_gray(3, true);
    CHECK(dims(g) == Dims{91282, 3});
    CHECK(dims(move_from_mwall(g)) == Dims{96854, 3});
    CHECK(dims(remove(g, Component::subcortex)) == Dims{59412, 3});
    CHECK(subcort_counts(*g.meta.subcort) == kStdSubcortCounts);
  }
}
