#include "gxt/grayordinates.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "gxt/error.hpp"
#include "gxt/surface_ops.hpp"

namespace gxt {
namespace {

std::int64_t count_true(const Mask& m) { return std::count(m.begin(), m.end(), true); }

const std::optional<Eigen::MatrixXd>& cortex_data(const Grayordinates& g, Hemisphere h) {
  return h == Hemisphere::left ? g.data.cortex_left : g.data.cortex_right;
}

const std::optional<Mask>& cortex_mask(const Grayordinates& g, Hemisphere h) {
  return h == Hemisphere::left ? g.meta.cortex.medial_wall_mask_left : g.meta.cortex.medial_wall_mask_right;
}

bool same_value(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

Eigen::Index Grayordinates::rows() const {
  Eigen::Index r = 0;
  if (data.cortex_left) r += data.cortex_left->rows();
  if (data.cortex_right) r += data.cortex_right->rows();
  if (data.subcort) r += data.subcort->rows();
  return r;
}

Eigen::Index Grayordinates::cols() const {
  if (data.cortex_left) return data.cortex_left->cols();
  if (data.cortex_right) return data.cortex_right->cols();
  if (data.subcort) return data.subcort->cols();
  return 0;
}

bool Grayordinates::empty() const { return !data.cortex_left && !data.cortex_right && !data.subcort; }

std::size_t resolution(const Grayordinates& g, Hemisphere h) {
  const auto& m = cortex_mask(g, h);
  if (m) return m->size();
  const auto& d = cortex_data(g, h);
  return d ? static_cast<std::size_t>(d->rows()) : 0;
}

std::array<std::int64_t, kSubcortStructureCount> subcort_counts(const SubcortMeta& m) {
  std::array<std::int64_t, kSubcortStructureCount> c{};
  for (int l : m.labels) {
    if (l >= 0 && static_cast<std::size_t>(l) < kSubcortStructureCount) ++c[static_cast<std::size_t>(l)];
  }
  return c;
}

std::vector<std::string> validate(const Grayordinates& g) {
  std::vector<std::string> v;
  std::optional<Eigen::Index> m;
  auto check_cols = [&](const char* what, const std::optional<Eigen::MatrixXd>& d) {
    if (!d) return;
    if (!m) m = d->cols();
    else if (*m != d->cols()) v.push_back(std::string(what) + ": column count " + std::to_string(d->cols()) +
                                          " differs from " + std::to_string(*m));
  };
  check_cols("data.cortex_left", g.data.cortex_left);
  check_cols("data.cortex_right", g.data.cortex_right);
  check_cols("data.subcort", g.data.subcort);
  if (g.empty()) v.push_back("data: no brain structure present");

  for (Hemisphere h : {Hemisphere::left, Hemisphere::right}) {
    const std::string side(to_string(h));
    const auto& d = cortex_data(g, h);
    const auto& mk = cortex_mask(g, h);
    if (d && !mk) v.push_back("meta.cortex.medial_wall_mask." + side + ": missing for present cortex data");
    if (d && mk && count_true(*mk) != d->rows()) {
      v.push_back("meta.cortex.medial_wall_mask." + side + ": " + std::to_string(count_true(*mk)) +
                  " in-mask vertices but data.cortex_" + side + " has " + std::to_string(d->rows()) + " rows");
    }
    const auto& s = h == Hemisphere::left ? g.surf.left : g.surf.right;
    if (s) {
      try {
        check_surface(*s);
      } catch (const Error& e) {
        v.push_back("surf." + side + ": " + e.what());
      }
      if (mk && static_cast<std::size_t>(s->vertex_count()) != mk->size()) {
        v.push_back("surf." + side + ": " + std::to_string(s->vertex_count()) + " vertices but resolution is " +
                    std::to_string(mk->size()));
      }
    }
  }

  if (g.data.subcort) {
    if (!g.meta.subcort) {
      v.push_back("meta.subcort: missing for present subcortical data");
    } else {
      const auto& sm = *g.meta.subcort;
      const auto rows = g.data.subcort->rows();
      if (static_cast<std::int64_t>(sm.mask.size()) != sm.grid.voxel_count()) {
        v.push_back("meta.subcort.mask: length differs from the grid voxel count");
      }
      if (count_true(sm.mask) != rows) {
        v.push_back("meta.subcort.mask: " + std::to_string(count_true(sm.mask)) +
                    " in-mask voxels but data.subcort has " + std::to_string(rows) + " rows");
      }
      if (static_cast<Eigen::Index>(sm.labels.size()) != rows) {
        v.push_back("meta.subcort.labels: length " + std::to_string(sm.labels.size()) + " but data.subcort has " +
                    std::to_string(rows) + " rows");
      }
      for (int l : sm.labels) {
        if (l < 2 || l >= static_cast<int>(kSubcortStructureCount)) {
          v.push_back("meta.subcort.labels: value " + std::to_string(l) + " is not a subcortical structure");
          break;
        }
      }
    }
  }

  const auto& c = g.meta.cifti;
  const auto ncol = static_cast<std::size_t>(g.cols());
  if (c.series && c.series->length != static_cast<std::int64_t>(ncol)) {
    v.push_back("meta.cifti.series: length " + std::to_string(c.series->length) + " but " + std::to_string(ncol) +
                " columns");
  }
  if (c.series && !(c.series->step > 0)) v.push_back("meta.cifti.series: step must be positive");
  if (!c.names.empty() && c.names.size() != ncol) {
    v.push_back("meta.cifti.names: " + std::to_string(c.names.size()) + " names for " + std::to_string(ncol) +
                " columns");
  }
  if (c.intent == Intent::dlabel && v.empty()) {
    if (c.label_tables.size() != ncol) {
      v.push_back("meta.cifti.label_tables: " + std::to_string(c.label_tables.size()) + " tables for " +
                  std::to_string(ncol) + " columns");
    } else {
      const Eigen::MatrixXd all = as_matrix(g);
      bool reported = false;
      for (Eigen::Index j = 0; j < all.cols() && !reported; ++j) {
        const auto& table = c.label_tables[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < all.rows(); ++i) {
          const double x = all(i, j);
          if (!(std::isfinite(x) && x == std::round(x))) {
            v.push_back("dlabel: non-integer value " + format_number(x) + " in column " + std::to_string(j + 1));
            reported = true;
            break;
          }
          if (!table.count(static_cast<int>(x))) {
            v.push_back("dlabel: value " + format_number(x) + " in column " + std::to_string(j + 1) +
                        " is not a key of its label table");
            reported = true;
            break;
          }
        }
      }
    }
  }
  return v;
}

void require_valid(const Grayordinates& g) {
  const auto v = validate(g);
  if (v.empty()) return;
  std::string msg = "invalid grayordinates object:";
  for (const auto& s : v) msg += "\n  " + s;
  throw ConsistencyError(msg);
}

Dims dims(const Grayordinates& g) { return {g.rows(), g.cols()}; }

Eigen::MatrixXd as_matrix(const Grayordinates& g) {
  Eigen::MatrixXd out(g.rows(), g.cols());
  Eigen::Index r = 0;
  for (const auto* d : {&g.data.cortex_left, &g.data.cortex_right, &g.data.subcort}) {
    if (!*d) continue;
    if ((*d)->cols() != out.cols()) throw ShapeError("data matrices differ in column count");
    out.middleRows(r, (*d)->rows()) = **d;
    r += (*d)->rows();
  }
  return out;
}

SummaryFacts summary_facts(const Grayordinates& g) {
  SummaryFacts f;
  f.intent = g.meta.cifti.intent;
  f.series = g.meta.cifti.series;
  f.names = g.meta.cifti.names;
  f.columns = g.cols();
  for (Hemisphere h : {Hemisphere::left, Hemisphere::right}) {
    const auto& d = cortex_data(g, h);
    if (!d) continue;
    SummaryFacts::Cortex c{d->rows(), static_cast<std::int64_t>(resolution(g, h))};
    (h == Hemisphere::left ? f.left : f.right) = c;
  }
  if (g.data.subcort && g.meta.subcort) f.subcort = subcort_counts(*g.meta.subcort);
  return f;
}

std::string format_summary(const SummaryFacts& f) {
  std::ostringstream o;
  o << "=====CIFTI METADATA=====\n";
  o << pad("Intent:", 17);
  if (f.intent) o << static_cast<int>(*f.intent) << " (" << intent_name(*f.intent) << ")\n";
  else o << "NA\n";
  if (f.intent == Intent::dtseries && f.series) {
    o << pad("- time step", 16) << format_number(f.series->step) << " (" << f.series->unit << "s)\n";
    o << pad("- time start", 16) << format_number(f.series->start) << "\n";
  } else if (!f.names.empty()) {
    o << pad("- names", 16);
    const std::size_t shown = std::min<std::size_t>(f.names.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) o << (i ? ", " : "") << '"' << f.names[i] << '"';
    if (shown < f.names.size()) o << ", ... (" << f.names.size() << " total)";
    o << "\n";
  }
  o << pad("Measurements:", 16) << f.columns << (f.columns == 1 ? " column" : " columns") << "\n";
  o << "\n=====BRAIN STRUCTURES=====\n";

  const bool wide = f.subcort.has_value();
  const std::size_t label_w = wide ? 19 : 16;
  const std::string indent(wide ? 18 : 15, ' ');
  bool first = true;
  for (const auto* c : {&f.left, &f.right}) {
    if (!*c) continue;
    if (!first) o << "\n";
    first = false;
    o << pad(c == &f.left ? "- left cortex" : "- right cortex", label_w) << (*c)->data << " data vertices\n";
    const auto wall = (*c)->total - (*c)->data;
    if (wall > 0) o << indent << wall << " medial wall vertices (" << (*c)->total << " total)\n";
  }
  if (f.subcort) {
    if (!first) o << "\n";
    const auto& counts = *f.subcort;
    std::int64_t total = 0;
    for (auto n : counts) total += n;
    o << pad("- subcortex", label_w) << total << " data voxels\n";
    o << indent << "subcortical structures and number of voxels in each:\n";
    const auto& vocab = subcort_structures();
    // Left/right pairs share a line; unpaired names sit alone.
    std::size_t i = 0;
    while (i < vocab.size()) {
      std::string line = std::string(vocab[i].short_name) + " (" + std::to_string(counts[i]) + ")";
      const std::string_view a = vocab[i].short_name;
      bool pair = false;
      if (i + 1 < vocab.size() && a.size() > 2 && a.substr(a.size() - 2) == "-L") {
        const std::string_view b = vocab[i + 1].short_name;
        pair = b.size() == a.size() && b.substr(0, b.size() - 2) == a.substr(0, a.size() - 2);
      }
      if (pair) line += ", " + std::string(vocab[i + 1].short_name) + " (" + std::to_string(counts[i + 1]) + ")";
      i += pair ? 2 : 1;
      o << indent << line << (i < vocab.size() ? "," : ".") << "\n";
    }
  }
  return o.str();
}

std::string summary(const Grayordinates& g) { return format_summary(summary_facts(g)); }

Grayordinates move_from_mwall(const Grayordinates& g, double fill) {
  Grayordinates out = g;
  for (Hemisphere h : {Hemisphere::left, Hemisphere::right}) {
    auto& d = h == Hemisphere::left ? out.data.cortex_left : out.data.cortex_right;
    auto& mk = h == Hemisphere::left ? out.meta.cortex.medial_wall_mask_left : out.meta.cortex.medial_wall_mask_right;
    if (!d) continue;
    if (!mk) {
      mk = Mask(static_cast<std::size_t>(d->rows()), true);
      continue;
    }
    if (count_true(*mk) != d->rows()) throw ConsistencyError("medial wall mask does not match the data rows");
    Eigen::MatrixXd full = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(mk->size()), d->cols(), fill);
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < mk->size(); ++i) {
      if ((*mk)[i]) full.row(static_cast<Eigen::Index>(i)) = d->row(r++);
    }
    d = std::move(full);
    mk = Mask(mk->size(), true);
  }
  return out;
}

Grayordinates move_to_mwall(const Grayordinates& g, double sentinel) {
  Grayordinates out = g;
  for (Hemisphere h : {Hemisphere::left, Hemisphere::right}) {
    auto& d = h == Hemisphere::left ? out.data.cortex_left : out.data.cortex_right;
    auto& mk = h == Hemisphere::left ? out.meta.cortex.medial_wall_mask_left : out.meta.cortex.medial_wall_mask_right;
    if (!d) continue;
    if (!mk) mk = Mask(static_cast<std::size_t>(d->rows()), true);
    std::vector<Eigen::Index> keep;
    Mask nm = *mk;
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < mk->size(); ++i) {
      if (!(*mk)[i]) continue;
      bool all = d->cols() > 0;
      for (Eigen::Index c = 0; c < d->cols() && all; ++c) all = same_value((*d)(r, c), sentinel);
      if (all) nm[i] = false;
      else keep.push_back(r);
      ++r;
    }
    if (keep.empty()) {
      throw DegenerateError(std::string(to_string(h)) + " cortex would have no data vertices left");
    }
    Eigen::MatrixXd nd(static_cast<Eigen::Index>(keep.size()), d->cols());
    for (std::size_t k = 0; k < keep.size(); ++k) nd.row(static_cast<Eigen::Index>(k)) = d->row(keep[k]);
    d = std::move(nd);
    mk = std::move(nm);
  }
  return out;
}

std::string_view to_string(Component c) {
  switch (c) {
    case Component::cortex_left: return "cortex_left";
    case Component::cortex_right: return "cortex_right";
    case Component::subcortex: return "subcortex";
    case Component::surf_left: return "surf_left";
    case Component::surf_right: return "surf_right";
  }
  return "";
}

Grayordinates remove(const Grayordinates& g, Component c) {
  Grayordinates out = g;
  auto require = [&](bool present) {
    if (!present) throw NotFound(std::string(to_string(c)) + " is not present");
  };
  switch (c) {
    case Component::cortex_left:
      require(out.data.cortex_left.has_value());
      out.data.cortex_left.reset();
      out.meta.cortex.medial_wall_mask_left.reset();
      break;
    case Component::cortex_right:
      require(out.data.cortex_right.has_value());
      out.data.cortex_right.reset();
      out.meta.cortex.medial_wall_mask_right.reset();
      break;
    case Component::subcortex:
      require(out.data.subcort.has_value());
      out.data.subcort.reset();
      out.meta.subcort.reset();
      break;
    case Component::surf_left:
      require(out.surf.left.has_value());
      out.surf.left.reset();
      break;
    case Component::surf_right:
      require(out.surf.right.has_value());
      out.surf.right.reset();
      break;
  }
  return out;
}

Grayordinates add_surf(const Grayordinates& g, const Surface& surface, Hemisphere hemisphere) {
  check_surface(surface);
  const Hemisphere h = surface.hemisphere != Hemisphere::none ? surface.hemisphere : hemisphere;
  if (h == Hemisphere::none) throw DomainError("surface hemisphere is unknown; specify left or right");
  Grayordinates out = g;
  Surface s = surface;
  s.hemisphere = h;
  const std::size_t v = resolution(g, h);
  if (v != 0 && static_cast<std::size_t>(s.vertex_count()) != v) {
    const int ks = exact_icosphere_frequency(static_cast<std::size_t>(s.vertex_count()));
    const int kd = exact_icosphere_frequency(v);
    if (ks == 0 || kd == 0) {
      throw ShapeError("surface has " + std::to_string(s.vertex_count()) + " vertices but the data resolution is " +
                       std::to_string(v) + "; resampling needs icosphere counts (10k^2+2) on both sides");
    }
    s = resample_surface(s, make_icosphere_k(ks), make_icosphere_k(kd));
  }
  (h == Hemisphere::left ? out.surf.left : out.surf.right) = std::move(s);
  return out;
}

Grayordinates from_matrices(MatrixParts p) {
  Grayordinates g;
  auto take = [](std::optional<Eigen::MatrixXd>& d, std::optional<Mask>& m, std::optional<Eigen::MatrixXd>& dst,
                 std::optional<Mask>& mdst, const char* side) {
    if (!d) {
      if (m) throw ShapeError(std::string(side) + " mask given without data");
      return;
    }
    if (!m) m = Mask(static_cast<std::size_t>(d->rows()), true);
    if (count_true(*m) != d->rows()) {
      throw ShapeError(std::string(side) + " cortex: " + std::to_string(d->rows()) + " rows but the mask has " +
                       std::to_string(count_true(*m)) + " in-mask vertices");
    }
    dst = std::move(d);
    mdst = std::move(m);
  };
  take(p.cortex_left, p.mask_left, g.data.cortex_left, g.meta.cortex.medial_wall_mask_left, "left");
  take(p.cortex_right, p.mask_right, g.data.cortex_right, g.meta.cortex.medial_wall_mask_right, "right");
  if (p.subcort) {
    if (!p.subcort_meta) throw ShapeError("subcortical data needs labels and a mask");
    if (static_cast<Eigen::Index>(p.subcort_meta->labels.size()) != p.subcort->rows() ||
        count_true(p.subcort_meta->mask) != p.subcort->rows()) {
      throw ShapeError("subcortical data rows differ from the mask/label count");
    }
    g.data.subcort = std::move(p.subcort);
    g.meta.subcort = std::move(p.subcort_meta);
  }
  if (g.empty()) throw ShapeError("at least one data component is required");
  std::optional<Eigen::Index> m;
  for (const auto* d : {&g.data.cortex_left, &g.data.cortex_right, &g.data.subcort}) {
    if (!*d) continue;
    if (m && *m != (*d)->cols()) throw ShapeError("data matrices differ in column count");
    m = (*d)->cols();
  }
  return g;
}

void fill_cifti_meta(Grayordinates& g, Intent intent) {
  auto& c = g.meta.cifti;
  const auto m = static_cast<std::size_t>(g.cols());
  c.intent = intent;
  if (intent == Intent::dtseries) {
    if (!c.series) c.series = SeriesMap{};
    c.series->length = static_cast<std::int64_t>(m);
    c.names.clear();
    c.label_tables.clear();
    return;
  }
  c.series.reset();
  if (c.names.size() != m) {
    c.names.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      if (c.names[j].empty()) c.names[j] = "Column " + std::to_string(j + 1);
    }
  }
  if (intent == Intent::dscalar) {
    c.label_tables.clear();
    return;
  }
  if (c.label_tables.size() == m) return;
  // New tables from the distinct keys of each column.
  const Eigen::MatrixXd all = as_matrix(g);
  c.label_tables.assign(m, {});
  for (std::size_t j = 0; j < m; ++j) {
    std::set<int> keys;
    for (Eigen::Index i = 0; i < all.rows(); ++i) {
      const double x = all(i, static_cast<Eigen::Index>(j));
      if (!(std::isfinite(x) && x == std::round(x))) {
        throw DomainError("dlabel needs integer values; column " + std::to_string(j + 1) + " holds " +
                          format_number(x));
      }
      keys.insert(static_cast<int>(x));
    }
    auto& t = c.label_tables[j];
    std::size_t n = 0;
    for (int k : keys) {
      LabelEntry e;
      e.name = k == 0 ? "???" : "Label " + std::to_string(k);
      e.color = k == 0 ? Rgba{1, 1, 1, 0} : qualitative_color(n++);
      t.emplace(k, e);
    }
  }
}

}  // namespace gxt
