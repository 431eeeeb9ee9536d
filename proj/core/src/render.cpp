#include "gxt/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>

#include <Eigen/Geometry>

#include "gxt/error.hpp"
#include "gxt/surface_ops.hpp"

namespace gxt {
namespace {

Rgba hex(std::uint32_t v) {
  return {((v >> 16) & 0xFF) / 255.0, ((v >> 8) & 0xFF) / 255.0, (v & 0xFF) / 255.0, 1.0};
}

std::vector<Rgba> hexes(std::initializer_list<std::uint32_t> vs) {
  std::vector<Rgba> out;
  for (auto v : vs) out.push_back(hex(v));
  return out;
}

const std::vector<Palette>& builtin_palettes() {
  static const std::vector<Palette> all = [] {
    std::vector<Palette> p;
    const auto ylorrd =
        hexes({0xFFFFCC, 0xFFEDA0, 0xFED976, 0xFEB24C, 0xFD8D3C, 0xFC4E2A, 0xE31A1C, 0xBD0026, 0x800026});
    const auto rdbu =
        hexes({0x2166AC, 0x4393C3, 0x92C5DE, 0xD1E5F0, 0xF7F7F7, 0xFDDBC7, 0xF4A582, 0xD6604D, 0xB2182B});
    p.push_back({"sequential", ColorKind::sequential, ylorrd});
    p.push_back({"viridis", ColorKind::sequential,
                 hexes({0x440154, 0x482878, 0x3E4A89, 0x31688E, 0x26828E, 0x1F9E89, 0x35B779, 0x6DCD59, 0xB4DE2C,
                        0xFDE725})});
    p.push_back({"BuPu", ColorKind::sequential,
                 hexes({0xF7FCFD, 0xE0ECF4, 0xBFD3E6, 0x9EBCDA, 0x8C96C6, 0x8C6BB1, 0x88419D, 0x810F7C, 0x4D004B})});
    p.push_back({"diverging", ColorKind::diverging, rdbu});
    p.push_back({"RdBu", ColorKind::diverging, rdbu});
    std::vector<Rgba> q;
    for (std::size_t i = 0; i < 12; ++i) q.push_back(qualitative_color(i));
    p.push_back({"qualitative", ColorKind::qualitative, q});
    return p;
  }();
  return all;
}

std::uint8_t to_byte(double c) { return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0)); }

std::vector<double> finite_of(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) {
    if (std::isfinite(x)) out.push_back(x);
  }
  return out;
}

void draw_colorbar(Image& img, int y0, int height, const Palette& palette, bool qualitative,
                   const std::vector<Rgba8>& swatches) {
  const int x0 = img.width / 10;
  const int x1 = img.width - img.width / 10;
  const int top = y0 + height / 4;
  const int bottom = y0 + height - height / 4;
  if (x0 < 1 || top < 1 || x1 - x0 < 2 || bottom - top < 2) return;
  for (int x = x0; x < x1; ++x) {
    Rgba8 c;
    const double t = static_cast<double>(x - x0) / std::max(1, x1 - x0 - 1);
    if (qualitative) {
      if (swatches.empty()) continue;
      const auto i = std::min(swatches.size() - 1, static_cast<std::size_t>(t * static_cast<double>(swatches.size())));
      c = swatches[i];
    } else {
      c = colorize({t}, palette, {0.0, 1.0})[0];
    }
    for (int y = top; y < bottom; ++y) std::memcpy(img.at(x, y), c.data(), 4);
  }
  for (int x = x0 - 1; x <= x1; ++x) {
    std::memset(img.at(x, top - 1), 0, 3);
    std::memset(img.at(x, bottom), 0, 3);
  }
  for (int y = top - 1; y <= bottom; ++y) {
    std::memset(img.at(x0 - 1, y), 0, 3);
    std::memset(img.at(x1, y), 0, 3);
  }
}

bool all_integer(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isnan(x) || std::round(x) == x; });
}

// Palette and limits shared by the surface and volume paths.
struct Resolved {
  Palette palette;
  bool labels = false;
  bool qualitative = false;
  std::optional<ZLim> zlim;
  std::string message;
};

Resolved resolve_colors(const ColorSpec& spec, bool is_dlabel, const std::vector<double>& values) {
  Resolved r;
  const auto finite = finite_of(values);
  if (!spec.palette.empty()) {
    auto p = palette_by_name(spec.palette);
    if (!p) throw DomainError("unknown palette '" + spec.palette + "'");
    r.palette = *p;
  }
  ColorKind kind;
  if (spec.kind) kind = *spec.kind;
  else if (!spec.palette.empty()) kind = r.palette.kind;
  else if (is_dlabel) kind = ColorKind::qualitative;
  else {
    const bool straddle = !finite.empty() && *std::min_element(finite.begin(), finite.end()) < 0 &&
                          *std::max_element(finite.begin(), finite.end()) > 0;
    kind = straddle ? ColorKind::diverging : ColorKind::sequential;
  }
  if (spec.palette.empty()) {
    r.palette = *palette_by_name(kind == ColorKind::diverging     ? "diverging"
                                 : kind == ColorKind::qualitative ? "qualitative"
                                                                  : "sequential");
  }
  if (kind == ColorKind::qualitative) {
    r.qualitative = true;
    r.labels = is_dlabel;
    if (!is_dlabel && !all_integer(values)) throw DomainError("qualitative colours need integer values");
    return r;
  }
  if (spec.zlim) {
    if (!(spec.zlim->first < spec.zlim->second)) throw DomainError("zlim needs LO < HI");
    r.zlim = spec.zlim;
  } else {
    r.zlim = auto_zlim(values, spec.kind);
    if (!finite.empty()) {
      r.message = zlim_message(*r.zlim, *std::min_element(finite.begin(), finite.end()),
                               *std::max_element(finite.begin(), finite.end()));
    }
  }
  return r;
}

std::vector<Rgba8> colors_for(const Resolved& r, const std::vector<double>& values, const LabelTable* table) {
  if (r.labels) return colorize_labels(values, *table);
  if (r.qualitative) return colorize_qualitative(values);
  return colorize(values, r.palette, *r.zlim);
}

std::vector<Rgba8> legend_swatches(const Resolved& r, const std::vector<double>& values, const LabelTable* table) {
  std::vector<Rgba8> out;
  if (r.labels) {
    for (const auto& [key, e] : *table) {
      if (e.color.a > 0) out.push_back(colorize_labels({static_cast<double>(key)}, *table)[0]);
    }
  } else if (r.qualitative) {
    std::vector<double> keys;
    for (double v : values) {
      if (!std::isnan(v)) keys.push_back(v);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    out = colorize_qualitative(keys);
  }
  return out;
}

void stamp_text(Image& img, const std::string& title, const std::optional<ZLim>& zlim) {
  if (!title.empty()) img.text.emplace_back("Title", title);
  if (zlim) img.text.emplace_back("zlim", format_number(zlim->first) + " " + format_number(zlim->second));
  img.text.emplace_back("Software", "gxt " + std::string(tool_version()));
}

constexpr int kColorbarHeight = 28;

}  // namespace

std::optional<Palette> palette_by_name(std::string_view name) {
  for (const auto& p : builtin_palettes()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

std::vector<std::string> palette_names() {
  std::vector<std::string> out;
  for (const auto& p : builtin_palettes()) out.push_back(p.name);
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return kMissing;
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double signif3(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return std::strtod(buf, nullptr);
}

ZLim auto_zlim(const std::vector<double>& values, std::optional<ColorKind> forced) {
  auto v = finite_of(values);
  if (v.empty()) return {0.0, 1.0};
  std::sort(v.begin(), v.end());
  const double mn = v.front(), mx = v.back();
  if (mn == mx) return {signif3(mn - 0.5), signif3(mn + 0.5)};
  ZLim z;
  if (mn < 0 && mx > 0 && forced != ColorKind::sequential) {
    std::vector<double> a(v.size());
    std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
    std::sort(a.begin(), a.end());
    const double q = signif3(quantile_sorted(a, 0.99));
    z = {-q, q};
  } else if (mn >= 0) {
    z = {0.0, signif3(quantile_sorted(v, 0.99))};
  } else if (mx <= 0) {
    z = {signif3(quantile_sorted(v, 0.01)), 0.0};
  } else {
    z = {signif3(quantile_sorted(v, 0.01)), signif3(quantile_sorted(v, 0.99))};
  }
  // Heavily tied data can collapse the percentile range.
  if (!(z.first < z.second)) z = {signif3(mn), signif3(mx)};
  return z;
}

std::string zlim_message(ZLim zlim, double data_min, double data_max) {
  return "`zlim` not provided: using color range " + format_number(signif3(zlim.first)) + " - " +
         format_number(signif3(zlim.second)) + " (data limits: " + format_number(signif3(data_min)) + " - " +
         format_number(signif3(data_max)) + ").";
}

Rgba8 to_rgba8(const Rgba& c) { return {to_byte(c.r), to_byte(c.g), to_byte(c.b), to_byte(c.a)}; }

std::vector<Rgba8> colorize(const std::vector<double>& values, const Palette& palette, ZLim zlim) {
  if (palette.anchors.empty()) throw DomainError("palette has no colours");
  if (!(zlim.first < zlim.second)) throw DomainError("zlim needs LO < HI");
  const auto n = palette.anchors.size();
  std::vector<Rgba8> out(values.size(), kWhite8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v)) continue;
    const double t = std::clamp((v - zlim.first) / (zlim.second - zlim.first), 0.0, 1.0);
    if (n == 1) {
      out[i] = to_rgba8(palette.anchors[0]);
      continue;
    }
    const double s = t * static_cast<double>(n - 1);
    const auto k = std::min(n - 2, static_cast<std::size_t>(std::floor(s)));
    const double f = s - static_cast<double>(k);
    const Rgba& a = palette.anchors[k];
    const Rgba& b = palette.anchors[k + 1];
    out[i] = to_rgba8({a.r + f * (b.r - a.r), a.g + f * (b.g - a.g), a.b + f * (b.b - a.b), 1.0});
  }
  return out;
}

std::vector<Rgba8> colorize_labels(const std::vector<double>& keys, const LabelTable& table) {
  std::vector<Rgba8> out(keys.size(), kWhite8);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (std::isnan(keys[i])) continue;
    const auto it = table.find(static_cast<int>(std::lround(keys[i])));
    if (it == table.end()) continue;
    const Rgba& c = it->second.color;
    out[i] = to_rgba8({c.a * c.r + (1 - c.a), c.a * c.g + (1 - c.a), c.a * c.b + (1 - c.a), 1.0});
  }
  return out;
}

std::vector<Rgba8> colorize_qualitative(const std::vector<double>& keys) {
  if (!all_integer(keys)) throw DomainError("qualitative colours need integer values");
  std::vector<Rgba8> out(keys.size(), kWhite8);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (std::isnan(keys[i])) continue;
    const auto k = static_cast<long long>(keys[i]);
    out[i] = to_rgba8(qualitative_color(static_cast<std::size_t>(((k % 12) + 12) % 12)));
  }
  return out;
}

std::vector<bool> compute_borders(const std::vector<int>& keys, const std::vector<std::vector<int>>& adjacency) {
  if (keys.size() != adjacency.size()) throw ShapeError("key count does not match the mesh");
  std::vector<bool> out(keys.size(), false);
  for (std::size_t v = 0; v < keys.size(); ++v) {
    for (int w : adjacency[v]) {
      if (keys[static_cast<std::size_t>(w)] != keys[v]) {
        out[v] = true;
        break;
      }
    }
  }
  return out;
}

Image render_mesh(const Surface& surface, const std::vector<Rgba8>& colors, Hemisphere hemisphere, View view,
                  int width, int height, double world_per_pixel) {
  check_surface(surface);
  if (colors.size() != static_cast<std::size_t>(surface.vertex_count())) {
    throw ShapeError("one colour per vertex required");
  }
  if (width <= 0 || height <= 0) throw DomainError("panel size must be positive");
  // Viewer on -x for a left lateral or right medial view.
  const bool from_neg_x = (hemisphere == Hemisphere::right) == (view == View::medial);
  const double dir = from_neg_x ? -1.0 : 1.0;
  const Eigen::Index nv = surface.vertex_count();

  Eigen::MatrixX3d normals = Eigen::MatrixX3d::Zero(nv, 3);
  for (Eigen::Index f = 0; f < surface.face_count(); ++f) {
    const Eigen::RowVector3d a = surface.vertices.row(surface.faces(f, 0));
    const Eigen::RowVector3d b = surface.vertices.row(surface.faces(f, 1));
    const Eigen::RowVector3d c = surface.vertices.row(surface.faces(f, 2));
    const Eigen::RowVector3d n = (b - a).cross(c - a);
    for (int k = 0; k < 3; ++k) normals.row(surface.faces(f, k)) += n;
  }

  Eigen::VectorXd sx(nv), sy(nv), depth(nv);
  for (Eigen::Index i = 0; i < nv; ++i) {
    sx(i) = dir * surface.vertices(i, 1);
    sy(i) = surface.vertices(i, 2);
    depth(i) = dir * surface.vertices(i, 0);
  }
  const double cx = 0.5 * (sx.minCoeff() + sx.maxCoeff());
  const double cy = 0.5 * (sy.minCoeff() + sy.maxCoeff());
  if (world_per_pixel <= 0) {
    const double ex = std::max(sx.maxCoeff() - sx.minCoeff(), 1e-12);
    const double ey = std::max(sy.maxCoeff() - sy.minCoeff(), 1e-12);
    world_per_pixel = std::max(ex / (0.9 * width), ey / (0.9 * height));
  }

  std::vector<std::array<double, 3>> shaded(static_cast<std::size_t>(nv));
  for (Eigen::Index i = 0; i < nv; ++i) {
    const double len = normals.row(i).norm();
    const double nl = len > 0 ? std::abs(normals(i, 0)) / len : 0.0;
    const double s = 0.3 + 0.7 * nl;
    const auto& c = colors[static_cast<std::size_t>(i)];
    shaded[static_cast<std::size_t>(i)] = {c[0] * s, c[1] * s, c[2] * s};
    sx(i) = 0.5 * width + (sx(i) - cx) / world_per_pixel;
    sy(i) = 0.5 * height - (sy(i) - cy) / world_per_pixel;
  }

  Image img(width, height);
  std::vector<double> zbuf(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                           -std::numeric_limits<double>::infinity());
  for (Eigen::Index f = 0; f < surface.face_count(); ++f) {
    const int ia = surface.faces(f, 0), ib = surface.faces(f, 1), ic = surface.faces(f, 2);
    const double ax = sx(ia), ay = sy(ia), bx = sx(ib), by = sy(ib), cxp = sx(ic), cyp = sy(ic);
    const double area = (bx - ax) * (cyp - ay) - (by - ay) * (cxp - ax);
    if (std::abs(area) < 1e-12) continue;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({ax, bx, cxp}))));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::max({ax, bx, cxp}))));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({ay, by, cyp}))));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::max({ay, by, cyp}))));
    for (int y = y0; y <= y1; ++y) {
      const double py = y + 0.5;
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5;
        const double w0 = ((bx - px) * (cyp - py) - (by - py) * (cxp - px)) / area;
        const double w1 = ((cxp - px) * (ay - py) - (cyp - py) * (ax - px)) / area;
        const double w2 = 1.0 - w0 - w1;
        if (w0 < -1e-9 || w1 < -1e-9 || w2 < -1e-9) continue;
        const double z = w0 * depth(ia) + w1 * depth(ib) + w2 * depth(ic);
        double& zb = zbuf[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
        if (z <= zb) continue;
        zb = z;
        std::uint8_t* p = img.at(x, y);
        for (int k = 0; k < 3; ++k) {
          const double v = w0 * shaded[static_cast<std::size_t>(ia)][static_cast<std::size_t>(k)] +
                           w1 * shaded[static_cast<std::size_t>(ib)][static_cast<std::size_t>(k)] +
                           w2 * shaded[static_cast<std::size_t>(ic)][static_cast<std::size_t>(k)];
          p[k] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
        p[3] = 255;
      }
    }
  }
  return img;
}

RenderOutput render_surface(const Grayordinates& g, const ViewSpec& spec, const ColorSpec& colors,
                            const SmoothSurfaces& surfaces, const Grayordinates* border_parc) {
  std::vector<Hemisphere> hemis = spec.hemispheres;
  if (hemis.empty()) {
    if (g.data.cortex_left) hemis.push_back(Hemisphere::left);
    if (g.data.cortex_right) hemis.push_back(Hemisphere::right);
  }
  if (hemis.empty()) throw DomainError("no cortical data to render");
  if (spec.views.empty()) throw DomainError("no views requested");
  if (spec.columns.empty()) throw DomainError("no columns requested");
  for (Eigen::Index c : spec.columns) {
    if (c < 0 || c >= g.cols()) {
      throw IndexError("column " + std::to_string(c + 1) + " out of range 1.." + std::to_string(g.cols()));
    }
  }
  const bool is_dlabel = g.meta.cifti.intent == Intent::dlabel;

  struct Hemi {
    Hemisphere h;
    Surface surf;
    std::vector<std::vector<double>> values;  // per requested column, full resolution
    std::optional<std::vector<bool>> borders;
    std::vector<std::vector<int>> adj;
  };
  std::vector<Hemi> hs;
  std::vector<double> pooled;
  for (Hemisphere h : hemis) {
    const auto& data = h == Hemisphere::left ? g.data.cortex_left : g.data.cortex_right;
    const auto& mask = h == Hemisphere::left ? g.meta.cortex.medial_wall_mask_left : g.meta.cortex.medial_wall_mask_right;
    if (!data) throw NotFound(std::string(to_string(h)) + " cortex has no data");
    Hemi e{h, surface_for(g, h, surfaces), {}, std::nullopt, {}};
    if (static_cast<std::size_t>(e.surf.vertex_count()) != mask->size()) {
      throw ShapeError(std::string(to_string(h)) + " surface has " + std::to_string(e.surf.vertex_count()) +
                       " vertices but the data resolution is " + std::to_string(mask->size()));
    }
    for (Eigen::Index c : spec.columns) {
      std::vector<double> full(mask->size(), kMissing);
      Eigen::Index row = 0;
      for (std::size_t v = 0; v < mask->size(); ++v) {
        if ((*mask)[v]) full[v] = (*data)(row++, c);
      }
      pooled.insert(pooled.end(), full.begin(), full.end());
      e.values.push_back(std::move(full));
    }
    hs.push_back(std::move(e));
  }

  const Resolved res = resolve_colors(colors, is_dlabel, pooled);
  RenderOutput out;
  out.message = res.message;
  out.zlim = res.zlim;

  if (spec.borders) {
    for (auto& e : hs) {
      std::vector<double> keys;
      if (is_dlabel) {
        keys = e.values.front();
      } else {
        if (border_parc == nullptr) throw DomainError("borders need a dlabel input or a parcellation");
        const auto& pd = e.h == Hemisphere::left ? border_parc->data.cortex_left : border_parc->data.cortex_right;
        const auto& pm = e.h == Hemisphere::left ? border_parc->meta.cortex.medial_wall_mask_left
                                                 : border_parc->meta.cortex.medial_wall_mask_right;
        if (!pd || pm->size() != static_cast<std::size_t>(e.surf.vertex_count())) {
          throw ShapeError("border parcellation does not cover the " + std::string(to_string(e.h)) + " cortex");
        }
        keys.assign(pm->size(), kMissing);
        Eigen::Index row = 0;
        for (std::size_t v = 0; v < pm->size(); ++v) {
          if ((*pm)[v]) keys[v] = (*pd)(row++, 0);
        }
      }
      std::vector<int> ik(keys.size());
      for (std::size_t v = 0; v < keys.size(); ++v) ik[v] = std::isnan(keys[v]) ? -1 : static_cast<int>(std::lround(keys[v]));
      e.borders = compute_borders(ik, vertex_adjacency(e.surf));
    }
  }

  // One scale for every panel so hemispheres stay comparable.
  double wpp = 0.0;
  for (const auto& e : hs) {
    const double ey = e.surf.vertices.col(1).maxCoeff() - e.surf.vertices.col(1).minCoeff();
    const double ez = e.surf.vertices.col(2).maxCoeff() - e.surf.vertices.col(2).minCoeff();
    wpp = std::max({wpp, ey / (0.9 * spec.panel_width), ez / (0.9 * spec.panel_height), 1e-12});
  }

  const int cols = static_cast<int>(spec.views.size());
  const int rows = static_cast<int>(hs.size());
  const int bar = spec.colorbar ? kColorbarHeight : 0;
  for (std::size_t ci = 0; ci < spec.columns.size(); ++ci) {
    const Eigen::Index col = spec.columns[ci];
    const LabelTable* table = nullptr;
    if (res.labels) {
      if (static_cast<std::size_t>(col) >= g.meta.cifti.label_tables.size()) throw ConsistencyError("missing label table");
      table = &g.meta.cifti.label_tables[static_cast<std::size_t>(col)];
    }
    Image img(cols * spec.panel_width, rows * spec.panel_height + bar);
    std::vector<double> col_values;
    for (int r = 0; r < rows; ++r) {
      const auto& e = hs[static_cast<std::size_t>(r)];
      auto vc = colors_for(res, e.values[ci], table);
      if (e.borders) {
        for (std::size_t v = 0; v < vc.size(); ++v) {
          if ((*e.borders)[v]) vc[v] = {0, 0, 0, 255};
        }
      }
      col_values.insert(col_values.end(), e.values[ci].begin(), e.values[ci].end());
      for (int c = 0; c < cols; ++c) {
        const Image panel = render_mesh(e.surf, vc, e.h, spec.views[static_cast<std::size_t>(c)], spec.panel_width,
                                        spec.panel_height, wpp);
        img.blit(panel, c * spec.panel_width, r * spec.panel_height);
      }
    }
    if (spec.colorbar) {
      draw_colorbar(img, rows * spec.panel_height, bar, res.palette, res.qualitative,
                    legend_swatches(res, col_values, table));
    }
    stamp_text(img, spec.title, res.zlim);
    out.images.push_back(std::move(img));
  }
  return out;
}

std::optional<Plane> plane_from_string(std::string_view name) {
  if (name == "axial") return Plane::axial;
  if (name == "coronal") return Plane::coronal;
  if (name == "sagittal") return Plane::sagittal;
  return std::nullopt;
}

RenderOutput render_volume(const Grayordinates& g, const VolumeViewSpec& spec, const ColorSpec& colors,
                           const Volume* underlay) {
  if (!g.data.subcort || !g.meta.subcort) throw DomainError("no subcortical data to render");
  if (spec.column < 0 || spec.column >= g.cols()) {
    throw IndexError("column " + std::to_string(spec.column + 1) + " out of range 1.." + std::to_string(g.cols()));
  }
  if (spec.slices.empty()) throw DomainError("no slices requested");
  if (spec.scale < 1) throw DomainError("scale must be at least 1");
  const SubcortMeta& meta = *g.meta.subcort;
  const auto& dims = meta.grid.dims;
  if (underlay != nullptr && underlay->grid.dims != dims) throw ShapeError("underlay grid does not match the data grid");

  // Normal axis and the two in-plane axes (horizontal, vertical).
  int normal = 2, ha = 0, va = 1;
  if (spec.plane == Plane::coronal) normal = 1, ha = 0, va = 2;
  if (spec.plane == Plane::sagittal) normal = 0, ha = 1, va = 2;
  for (auto s : spec.slices) {
    if (s < 0 || s >= dims[static_cast<std::size_t>(normal)]) {
      throw IndexError("slice " + std::to_string(s) + " out of range 0.." +
                       std::to_string(dims[static_cast<std::size_t>(normal)] - 1));
    }
  }

  std::vector<double> dense(static_cast<std::size_t>(meta.grid.voxel_count()), kMissing);
  std::vector<double> col_values(static_cast<std::size_t>(g.data.subcort->rows()));
  {
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < meta.mask.size(); ++i) {
      if (!meta.mask[i]) continue;
      dense[i] = (*g.data.subcort)(row, spec.column);
      col_values[static_cast<std::size_t>(row)] = dense[i];
      ++row;
    }
  }
  const bool is_dlabel = g.meta.cifti.intent == Intent::dlabel;
  const Resolved res = resolve_colors(colors, is_dlabel, col_values);
  const LabelTable* table = res.labels ? &g.meta.cifti.label_tables.at(static_cast<std::size_t>(spec.column)) : nullptr;
  const auto dense_colors = colors_for(res, dense, table);

  double ulo = 0.0, uhi = 1.0;
  if (underlay != nullptr) {
    const auto f = finite_of(std::vector<double>(underlay->values.begin(),
                                                 underlay->values.begin() + meta.grid.voxel_count()));
    if (!f.empty()) {
      ulo = *std::min_element(f.begin(), f.end());
      uhi = *std::max_element(f.begin(), f.end());
    }
    if (!(uhi > ulo)) uhi = ulo + 1.0;
  }

  const auto W = dims[static_cast<std::size_t>(ha)], H = dims[static_cast<std::size_t>(va)];
  std::vector<Image> panels;
  for (auto s : spec.slices) {
    Image p(static_cast<int>(W) * spec.scale, static_cast<int>(H) * spec.scale, {40, 40, 40, 255});
    for (std::int64_t b = 0; b < H; ++b) {
      for (std::int64_t a = 0; a < W; ++a) {
        std::array<std::int64_t, 3> ijk{};
        ijk[static_cast<std::size_t>(normal)] = s;
        ijk[static_cast<std::size_t>(ha)] = a;
        ijk[static_cast<std::size_t>(va)] = b;
        const auto li = static_cast<std::size_t>(meta.grid.linear_index(ijk[0], ijk[1], ijk[2]));
        Rgba8 c{40, 40, 40, 255};
        if (underlay != nullptr) {
          const double u = underlay->values[li];
          const auto gray = std::isfinite(u) ? to_byte((u - ulo) / (uhi - ulo)) : std::uint8_t{0};
          c = {gray, gray, gray, 255};
        }
        if (!std::isnan(dense[li])) c = dense_colors[li];
        const int px = static_cast<int>(a) * spec.scale;
        const int py = static_cast<int>(H - 1 - b) * spec.scale;
        for (int dy = 0; dy < spec.scale; ++dy)
          for (int dx = 0; dx < spec.scale; ++dx) std::memcpy(p.at(px + dx, py + dy), c.data(), 4);
      }
    }
    panels.push_back(std::move(p));
  }
  const int ncol = spec.ncol > 0 ? spec.ncol : static_cast<int>(std::min<std::size_t>(panels.size(), 5));
  Image grid = compose_grid(panels, {ncol, false});
  Image img = grid;
  if (spec.colorbar) {
    img = Image(std::max(grid.width, 120), grid.height + kColorbarHeight);
    img.blit(grid, 0, 0);
    draw_colorbar(img, grid.height, kColorbarHeight, res.palette, res.qualitative,
                  legend_swatches(res, col_values, table));
  }
  img.text.clear();
  stamp_text(img, spec.title, res.zlim);
  RenderOutput out;
  out.images.push_back(std::move(img));
  out.message = res.message;
  out.zlim = res.zlim;
  return out;
}

Image compose_grid(const std::vector<Image>& images, GridLayout layout) {
  if (images.empty()) throw DomainError("nothing to compose");
  int ncol = layout.pair ? 2 : layout.ncol;
  if (ncol <= 0) ncol = static_cast<int>(images.size());
  ncol = std::min<int>(ncol, static_cast<int>(images.size()));
  if (images.size() == 1) return images.front();
  int cw = 0, ch = 0;
  for (const auto& im : images) {
    cw = std::max(cw, im.width);
    ch = std::max(ch, im.height);
  }
  const int nrow = (static_cast<int>(images.size()) + ncol - 1) / ncol;
  Image out(ncol * cw, nrow * ch);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const int r = static_cast<int>(i) / ncol, c = static_cast<int>(i) % ncol;
    out.blit(images[i], c * cw, r * ch);
  }
  return out;
}

}  // namespace gxt
