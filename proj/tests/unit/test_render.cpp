#include <doctest.h>

#include <cmath>

#include "gxt/error.hpp"
#include "gxt/fixtures.hpp"
#include "gxt/render.hpp"
#include "gxt/surface_ops.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gxt;
using namespace gxt::oracle;

namespace {

bool is_white(const std::uint8_t* p) { return p[0] == 255 && p[1] == 255 && p[2] == 255; }

}  // namespace

TEST_SUITE("render") {
  TEST_CASE("auto zlim examples") {
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(i);
    const auto z = auto_zlim(grid);
    CHECK(z.first == 0.0);
    CHECK(z.second == 99.0);

    const std::vector<double> sym{-3.2, -1.0, 0.5, 1.0, 3.2};
    const auto s = auto_zlim(sym);
    CHECK(s.first == -s.second);
    CHECK(s.second == doctest::Approx(signif3(pct({3.2, 1.0, 0.5, 1.0, 3.2}, 0.99))));

    const auto c = auto_zlim({7, 7, 7});
    CHECK(c == ZLim{6.5, 7.5});
    CHECK(auto_zlim({}) == ZLim{0.0, 1.0});
    CHECK(auto_zlim({std::nan("")}) == ZLim{0.0, 1.0});

    std::vector<double> neg;
    for (int i = 1; i <= 50; ++i) neg.push_back(-i * 0.37);
    const auto n = auto_zlim(neg);
    CHECK(n.second == 0.0);
    CHECK(n.first == signif3(pct(neg, 0.01)));

    const auto forced = auto_zlim(sym, ColorKind::sequential);
    CHECK(forced.first == signif3(pct(sym, 0.01)));
    CHECK(forced.second == signif3(pct(sym, 0.99)));
  }

  TEST_CASE("signif3 and message") {
    CHECK(signif3(0.34549) == 0.345);
    CHECK(signif3(13456) == 13500);
    CHECK(signif3(-0.0037449) == -0.00374);
    CHECK(zlim_message({-0.345, 0.345}, -0.374, 1) ==
          "`zlim` not provided: using color range -0.345 - 0.345 (data limits: -0.374 - 1).");
  }

  TEST_CASE("colorize") {
    Palette two{"two", ColorKind::sequential, {{0, 0, 0, 1}, {1, 0.5, 0, 1}}};
    const auto c = colorize({0.0, 10.0, 5.0, -3.0, 99.0, std::nan("")}, two, {0, 10});
    CHECK(c[0] == Rgba8{0, 0, 0, 255});
    CHECK(c[1] == Rgba8{255, 128, 0, 255});
    CHECK(c[2] == to_rgba8({0.5, 0.25, 0, 1}));
    CHECK(c[3] == c[0]);
    CHECK(c[4] == c[1]);
    CHECK(c[5] == kWhite8);

    const auto pal = palette_by_name("viridis");
    REQUIRE(pal.has_value());
    CHECK(colorize({-1.0}, *pal, {-1, 1})[0] == to_rgba8(pal->anchors.front()));
    CHECK(palette_by_name("BuPu").has_value());
    CHECK(!palette_by_name("nope").has_value());

    LabelTable t{{0, {"???", {1, 1, 1, 0}}}, {3, {"A", {0.2, 0.4, 0.6, 1}}}};
    const auto lc = colorize_labels({3, 0, 8, std::nan("")}, t);
    CHECK(lc[0] == to_rgba8({0.2, 0.4, 0.6, 1}));
    CHECK(lc[1] == kWhite8);
    CHECK(lc[2] == kWhite8);
    CHECK(lc[3] == kWhite8);
    CHECK(colorize_qualitative({1, 13})[0] == colorize_qualitative({1, 13})[1]);
    CHECK_THROWS_AS(colorize_qualitative({1.5}), DomainError);
  }

  TEST_CASE("borders match an edge scan") {
    const Surface s = make_icosphere_k(5).surface;
    const auto adj = vertex_adjacency(s);
    const auto n = static_cast<std::size_t>(s.vertex_count());
    const auto flat = compute_borders(std::vector<int>(n, 4), adj);
    CHECK(std::none_of(flat.begin(), flat.end(), [](bool b) { return b; }));

    std::vector<int> half(n);
    for (std::size_t i = 0; i < n; ++i) half[i] = s.vertices(static_cast<Eigen::Index>(i), 0) >= 0 ? 1 : 2;
    const auto want = edge_scan_borders(s, half);
    CHECK(compute_borders(half, adj) == want);

    std::vector<int> island(n, 1);
    island[100] = 9;
    const auto b = compute_borders(island, adj);
    CHECK(b[100]);
    for (int w : adj[100]) CHECK(b[static_cast<std::size_t>(w)]);
    CHECK(std::count(b.begin(), b.end(), true) == static_cast<std::ptrdiff_t>(adj[100].size() + 1));
  }

  TEST_CASE("constant-colour mesh") {
    Surface s = make_icosphere_k(6).surface;
    s.vertices *= 100.0;
    const std::vector<Rgba8> col(static_cast<std::size_t>(s.vertex_count()), Rgba8{200, 100, 40, 255});
    const auto img = render_mesh(s, col, Hemisphere::left, View::lateral, 120, 100);
    CHECK(is_white(img.at(0, 0)));
    CHECK(is_white(img.at(119, 99)));
    int mesh = 0;
    for (int y = 0; y < 100; ++y)
      for (int x = 0; x < 120; ++x) {
        const auto* p = img.at(x, y);
        if (is_white(p)) continue;
        ++mesh;
        CHECK(p[0] >= 59);
        CHECK(std::abs(p[0] - 2 * p[1]) <= 2);
        CHECK(std::abs(p[0] - 5 * p[2]) <= 5);
      }
    CHECK(mesh > 3000);
    CHECK(encode_png(img) == encode_png(render_mesh(s, col, Hemisphere::left, View::lateral, 120, 100)));
  }

  TEST_CASE("surface scene") {
    const auto fx = make_fixture_set();
    SmoothSurfaces surfs{fx.left_sphere, fx.right_sphere, false};
    ViewSpec v;
    v.columns = {0, 3};
    v.panel_width = 100;
    v.panel_height = 80;
    v.title = "scene";
    const auto out = render_surface(fx.dtseries, v, {}, surfs);
    REQUIRE(out.images.size() == 2);
    CHECK(out.images[0].width == 200);
    CHECK(out.images[0].height >= 160);
    CHECK(out.zlim.has_value());
    CHECK(out.message.rfind("`zlim` not provided", 0) == 0);
    CHECK(find_metadata(out.images[0].text, "Title") != nullptr);
    const auto again = render_surface(fx.dtseries, v, {}, surfs);
    CHECK(encode_png(out.images[1]) == encode_png(again.images[1]));

    ColorSpec fixed;
    fixed.zlim = ZLim{-1, 1};
    CHECK(render_surface(fx.dtseries, v, fixed, surfs).message.empty());

    ViewSpec lab;
    lab.borders = true;
    lab.panel_width = 100;
    lab.panel_height = 80;
    CHECK(render_surface(fx.parcellation, lab, {}, surfs).images.size() == 1);
    CHECK_THROWS_AS(render_surface(remove(remove(fx.dtseries, Component::cortex_left), Component::cortex_right), v,
                                   {}, surfs),
                    DomainError);
  }

  TEST_CASE("volume slices") {
    SubcortMeta m;
    m.grid.dims = {5, 6, 4};
    m.grid.affine.diagonal() << 2, 2, 2, 1;
    m.mask.assign(120, false);
    m.mask[static_cast<std::size_t>(m.grid.linear_index(2, 3, 1))] = true;
    m.labels = {4};
    MatrixParts p;
    p.subcort = Eigen::MatrixXd::Constant(1, 1, 2.0);
    p.subcort_meta = m;
    const auto g = from_matrices(p);

    VolumeViewSpec v;
    v.plane = Plane::axial;
    v.slices = {1};
    v.scale = 3;
    v.colorbar = false;
    const auto img = render_volume(g, v, {}).images.at(0);
    REQUIRE(img.width == 15);
    REQUIRE(img.height == 18);
    // Voxel (i=2, j=3) lands at x = 2*3, y = (6-1-3)*3.
    for (int y = 0; y < 18; ++y)
      for (int x = 0; x < 15; ++x) {
        const bool inside = x >= 6 && x < 9 && y >= 6 && y < 9;
        const auto* px = img.at(x, y);
        const bool dark = px[0] == 40 && px[1] == 40 && px[2] == 40;
        CHECK(dark != inside);
      }

    v.slices = {0};
    const auto empty = render_volume(g, v, {}).images.at(0);
    for (int y = 0; y < 18; ++y)
      for (int x = 0; x < 15; ++x) CHECK(empty.at(x, y)[0] == 40);

    Volume under;
    under.grid = m.grid;
    under.values.resize(120);
    for (std::size_t i = 0; i < 120; ++i) under.values[i] = static_cast<double>(i);
    auto blank = g;
    blank.data.subcort->setConstant(std::nan(""));
    v.slices = {1};
    const auto u = render_volume(blank, v, {}, &under).images.at(0);
    const auto li = m.grid.linear_index(2, 3, 1);
    const auto want = static_cast<std::uint8_t>(std::lround(255.0 * static_cast<double>(li) / 119.0));
    CHECK(std::abs(u.at(6, 6)[0] - want) <= 1);
    CHECK(u.at(6, 6)[0] == u.at(6, 6)[2]);

    v.slices = {4};
    CHECK_THROWS_AS(render_volume(g, v, {}), IndexError);
    v.plane = Plane::sagittal;
    v.slices = {2};
    CHECK(render_volume(g, v, {}).images.at(0).width == 18);
    CHECK(plane_from_string("coronal") == Plane::coronal);
  }

  TEST_CASE("grid composition") {
    const Image a(10, 8, {1, 2, 3, 255}), b(6, 12, {9, 9, 9, 255});
    const auto two = compose_grid({a, a}, {2, false});
    CHECK(two.width == 20);
    CHECK(two.height == 8);
    const auto one = compose_grid({b}, {0, false});
    CHECK(one.width == b.width);
    CHECK(one.rgba == b.rgba);
    const auto pair = compose_grid({a, b, a, b}, {0, true});
    CHECK(pair.width == 20);
    CHECK(pair.height == 24);
    CHECK(is_white(pair.at(7, 10)));
    CHECK(pair.at(11, 0)[0] == 9);
  }

  TEST_CASE("png round trip") {
    test::TempDir dir;
    Image img(7, 5, {10, 20, 30, 255});
    img.at(3, 2)[0] = 200;
    img.text = {{"Title", "x"}};
    write_png(dir / "a.png", img);
    const auto back = read_png(dir / "a.png");
    CHECK(back.width == 7);
    CHECK(back.rgba == img.rgba);
    CHECK(back.text == img.text);
  }
}
