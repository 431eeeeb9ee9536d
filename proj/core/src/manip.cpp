#include "gxt/manip.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gxt/error.hpp"

namespace gxt {
namespace {

// Splits a stacked matrix back into the structure blocks of `g`.
void put_matrix(Grayordinates& g, const Eigen::MatrixXd& all) {
  Eigen::Index r = 0;
  for (auto* d : {&g.data.cortex_left, &g.data.cortex_right, &g.data.subcort}) {
    if (!*d) continue;
    const Eigen::Index n = (*d)->rows();
    **d = all.middleRows(r, n);
    r += n;
  }
}

void demote_to_dscalar(Grayordinates& g) {
  auto& c = g.meta.cifti;
  if (!c.intent) return;
  c.label_tables.clear();
  c.series.reset();
  c.intent = Intent::dscalar;
  fill_cifti_meta(g, Intent::dscalar);
}

// Keeps dlabel only when every value is a key of its column's table.
bool labels_still_valid(const Grayordinates& g) {
  const auto& tables = g.meta.cifti.label_tables;
  if (tables.size() != static_cast<std::size_t>(g.cols())) return false;
  const Eigen::MatrixXd all = as_matrix(g);
  for (Eigen::Index j = 0; j < all.cols(); ++j) {
    for (Eigen::Index i = 0; i < all.rows(); ++i) {
      const double x = all(i, j);
      if (!(std::isfinite(x) && x == std::round(x))) return false;
      if (!tables[static_cast<std::size_t>(j)].count(static_cast<int>(x))) return false;
    }
  }
  return true;
}

bool same_layout(const Grayordinates& a, const Grayordinates& b) {
  return a.data.cortex_left.has_value() == b.data.cortex_left.has_value() &&
         a.data.cortex_right.has_value() == b.data.cortex_right.has_value() &&
         a.data.subcort.has_value() == b.data.subcort.has_value() &&
         a.meta.cortex.medial_wall_mask_left == b.meta.cortex.medial_wall_mask_left &&
         a.meta.cortex.medial_wall_mask_right == b.meta.cortex.medial_wall_mask_right &&
         a.meta.subcort == b.meta.subcort;
}

void require_same_layout(const Grayordinates& a, const Grayordinates& b, const char* what) {
  if (!same_layout(a, b)) {
    throw ConsistencyError(std::string(what) + ": brain structures, medial wall masks, or subcortical layout differ");
  }
}

}  // namespace

Grayordinates select_columns(const Grayordinates& g, const std::vector<Eigen::Index>& idx) {
  const Eigen::Index m = g.cols();
  for (auto i : idx) {
    if (i < 0 || i >= m) {
      throw IndexError("column " + std::to_string(i + 1) + " outside 1.." + std::to_string(m));
    }
  }
  if (idx.empty()) throw IndexError("no columns selected");
  Grayordinates out = g;
  for (auto* d : {&out.data.cortex_left, &out.data.cortex_right, &out.data.subcort}) {
    if (!*d) continue;
    Eigen::MatrixXd n((*d)->rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) n.col(static_cast<Eigen::Index>(k)) = (*d)->col(idx[k]);
    **d = std::move(n);
  }
  auto& c = out.meta.cifti;
  if (c.intent == Intent::dtseries) {
    bool contiguous = true;
    for (std::size_t k = 1; k < idx.size(); ++k) contiguous = contiguous && idx[k] == idx[k - 1] + 1;
    if (contiguous) {
      SeriesMap s = c.series.value_or(SeriesMap{});
      s.start += s.step * static_cast<double>(idx.front());
      s.length = static_cast<std::int64_t>(idx.size());
      c.series = s;
    } else {
      c.series.reset();
      c.intent = Intent::dscalar;
      c.names.clear();
      for (auto i : idx) c.names.push_back("Column " + std::to_string(i + 1));
    }
  } else {
    if (!c.names.empty()) {
      std::vector<std::string> n;
      for (auto i : idx) n.push_back(c.names[static_cast<std::size_t>(i)]);
      c.names = std::move(n);
    }
    if (!c.label_tables.empty()) {
      std::vector<LabelTable> t;
      for (auto i : idx) t.push_back(c.label_tables[static_cast<std::size_t>(i)]);
      c.label_tables = std::move(t);
    }
  }
  return out;
}

Grayordinates merge_columns(const std::vector<Grayordinates>& grays) {
  if (grays.empty()) throw ShapeError("merge needs at least one object");
  const Grayordinates& first = grays.front();
  if (grays.size() == 1) return first;
  std::optional<Intent> intent = first.meta.cifti.intent;
  for (const auto& g : grays) {
    require_same_layout(first, g, "merge");
    if (g.meta.cifti.intent != intent) intent = Intent::dscalar;
  }
  Grayordinates out = first;
  Eigen::Index total = 0;
  for (const auto& g : grays) total += g.cols();
  for (int s = 0; s < 3; ++s) {
    auto pick = [s](const Grayordinates& g) -> const std::optional<Eigen::MatrixXd>& {
      return s == 0 ? g.data.cortex_left : s == 1 ? g.data.cortex_right : g.data.subcort;
    };
    auto& dst = s == 0 ? out.data.cortex_left : s == 1 ? out.data.cortex_right : out.data.subcort;
    if (!dst) continue;
    Eigen::MatrixXd n(dst->rows(), total);
    Eigen::Index c = 0;
    for (const auto& g : grays) {
      n.middleCols(c, g.cols()) = *pick(g);
      c += g.cols();
    }
    *dst = std::move(n);
  }
  auto& meta = out.meta.cifti;
  meta.intent = intent;
  meta.names.clear();
  meta.label_tables.clear();
  if (intent == Intent::dtseries) {
    meta.series->length = total;
  } else if (intent) {
    meta.series.reset();
    for (const auto& g : grays) {
      Grayordinates tmp = g;
      if (tmp.meta.cifti.intent != intent || tmp.meta.cifti.names.size() != static_cast<std::size_t>(tmp.cols())) {
        if (tmp.meta.cifti.intent == Intent::dlabel && intent == Intent::dscalar) tmp.meta.cifti.label_tables.clear();
        fill_cifti_meta(tmp, *intent);
      }
      meta.names.insert(meta.names.end(), tmp.meta.cifti.names.begin(), tmp.meta.cifti.names.end());
      if (intent == Intent::dlabel) {
        meta.label_tables.insert(meta.label_tables.end(), tmp.meta.cifti.label_tables.begin(),
                                 tmp.meta.cifti.label_tables.end());
      }
    }
  }
  return out;
}

Grayordinates combine_structures(const std::vector<Grayordinates>& grays) {
  if (grays.empty()) throw ShapeError("combine needs at least one object");
  Grayordinates out;
  std::optional<Eigen::Index> m;
  bool have_meta = false;
  for (const auto& g : grays) {
    if (g.empty()) continue;
    if (m && *m != g.cols()) {
      throw ConsistencyError("combine: column counts differ (" + std::to_string(*m) + " vs " +
                             std::to_string(g.cols()) + ")");
    }
    m = g.cols();
    auto take = [](const char* what, const auto& src, auto& dst) {
      if (!src) return;
      if (dst) throw ConsistencyError(std::string("combine: ") + what + " present in more than one input");
      dst = src;
    };
    take("left cortex", g.data.cortex_left, out.data.cortex_left);
    take("right cortex", g.data.cortex_right, out.data.cortex_right);
    take("subcortex", g.data.subcort, out.data.subcort);
    if (g.data.cortex_left) out.meta.cortex.medial_wall_mask_left = g.meta.cortex.medial_wall_mask_left;
    if (g.data.cortex_right) out.meta.cortex.medial_wall_mask_right = g.meta.cortex.medial_wall_mask_right;
    if (g.data.subcort) out.meta.subcort = g.meta.subcort;
    if (g.surf.left && !out.surf.left) out.surf.left = g.surf.left;
    if (g.surf.right && !out.surf.right) out.surf.right = g.surf.right;
    if (!have_meta && g.meta.cifti.intent) {
      out.meta.cifti = g.meta.cifti;
      have_meta = true;
    }
  }
  if (out.empty()) throw ShapeError("combine: no data in any input");
  if (out.meta.cifti.intent == Intent::dlabel && !labels_still_valid(out)) demote_to_dscalar(out);
  return out;
}

Grayordinates replace_data(const Grayordinates& g, const Eigen::MatrixXd& matrix,
                           const std::optional<std::vector<std::string>>& names) {
  if (matrix.rows() != g.rows()) {
    throw ShapeError("replacement has " + std::to_string(matrix.rows()) + " rows but the object has " +
                     std::to_string(g.rows()));
  }
  if (names && names->size() != static_cast<std::size_t>(matrix.cols())) {
    throw ShapeError("replacement names do not match the column count");
  }
  Grayordinates out = g;
  const bool same_cols = matrix.cols() == g.cols();
  for (auto* d : {&out.data.cortex_left, &out.data.cortex_right, &out.data.subcort}) {
    if (*d) (*d)->resize((*d)->rows(), matrix.cols());
  }
  put_matrix(out, matrix);
  auto& c = out.meta.cifti;
  if (names) c.names = *names;
  else if (!same_cols && !c.names.empty()) c.names.clear();
  if (c.intent == Intent::dtseries) {
    c.names.clear();
    if (c.series) c.series->length = matrix.cols();
  } else if (c.intent == Intent::dlabel) {
    if (!same_cols) c.label_tables.clear();
    if (c.label_tables.empty()) {
      try {
        fill_cifti_meta(out, Intent::dlabel);
      } catch (const DomainError&) {
        demote_to_dscalar(out);
      }
    } else if (!labels_still_valid(out)) {
      demote_to_dscalar(out);
    }
  }
  if (c.intent && c.intent != Intent::dtseries && c.names.size() != static_cast<std::size_t>(matrix.cols())) {
    fill_cifti_meta(out, *c.intent);
  }
  return out;
}

std::optional<Reducer> reducer_from_string(std::string_view name) {
  if (name == "mean") return Reducer::mean;
  if (name == "sum") return Reducer::sum;
  if (name == "min") return Reducer::min;
  if (name == "max") return Reducer::max;
  if (name == "sd") return Reducer::sd;
  if (name == "var") return Reducer::var;
  if (name == "median") return Reducer::median;
  return std::nullopt;
}

double reduce(Reducer r, const Eigen::Ref<const Eigen::VectorXd>& v) {
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isnan(v[i])) x.push_back(v[i]);
  }
  if (x.empty()) return kMissing;
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  for (double a : x) sum += a;
  switch (r) {
    case Reducer::sum: return sum;
    case Reducer::mean: return sum / n;
    case Reducer::min: return *std::min_element(x.begin(), x.end());
    case Reducer::max: return *std::max_element(x.begin(), x.end());
    case Reducer::sd:
    case Reducer::var: {
      if (x.size() < 2) return kMissing;
      const double mu = sum / n;
      double ss = 0.0;
      for (double a : x) ss += (a - mu) * (a - mu);
      const double var = ss / (n - 1.0);
      return r == Reducer::var ? var : std::sqrt(var);
    }
    case Reducer::median: {
      std::sort(x.begin(), x.end());
      const std::size_t h = x.size() / 2;
      return x.size() % 2 ? x[h] : 0.5 * (x[h - 1] + x[h]);
    }
  }
  return kMissing;
}

Grayordinates apply_across_columns(const Grayordinates& g, Reducer r) {
  return apply_across_columns(g, [r](const Eigen::VectorXd& v) { return reduce(r, v); });
}

Grayordinates apply_across_columns(const Grayordinates& g, const std::function<double(const Eigen::VectorXd&)>& fn) {
  const Eigen::MatrixXd all = as_matrix(g);
  Eigen::MatrixXd out(all.rows(), 1);
  for (Eigen::Index i = 0; i < all.rows(); ++i) out(i, 0) = fn(all.row(i).transpose());
  Grayordinates res = g;
  if (res.meta.cifti.intent) {
    res.meta.cifti.intent = Intent::dscalar;
    res.meta.cifti.series.reset();
    res.meta.cifti.label_tables.clear();
  }
  res.meta.cifti.names.clear();
  return replace_data(res, out);
}

Eigen::VectorXd apply_across_rows(const Grayordinates& g, Reducer r) {
  return apply_across_rows(g, [r](const Eigen::VectorXd& v) { return reduce(r, v); });
}

Eigen::VectorXd apply_across_rows(const Grayordinates& g, const std::function<double(const Eigen::VectorXd&)>& fn) {
  const Eigen::MatrixXd all = as_matrix(g);
  Eigen::VectorXd out(all.cols());
  for (Eigen::Index j = 0; j < all.cols(); ++j) out[j] = fn(all.col(j));
  return out;
}

Grayordinates unary_transform(const Grayordinates& g, const std::function<double(double)>& fn, bool keep_labels,
                              TransformReport* report) {
  Grayordinates out = g;
  std::int64_t errors = 0;
  for (auto* d : {&out.data.cortex_left, &out.data.cortex_right, &out.data.subcort}) {
    if (!*d) continue;
    for (Eigen::Index i = 0; i < (*d)->size(); ++i) {
      const double x = (*d)->data()[i];
      const double y = fn(x);
      if (std::isnan(y) && !std::isnan(x)) ++errors;
      (*d)->data()[i] = y;
    }
  }
  bool demoted = false;
  if (out.meta.cifti.intent == Intent::dlabel && !(keep_labels && labels_still_valid(out))) {
    demote_to_dscalar(out);
    demoted = true;
  }
  if (report != nullptr) *report = {errors, demoted};
  return out;
}

Grayordinates named_transform(const Grayordinates& g, std::string_view name, TransformReport* report) {
  std::function<double(double)> fn;
  if (name == "abs") fn = [](double x) { return std::abs(x); };
  else if (name == "ceiling") fn = [](double x) { return std::ceil(x); };
  else if (name == "exp") fn = [](double x) { return std::exp(x); };
  else if (name == "floor") fn = [](double x) { return std::floor(x); };
  else if (name == "log") fn = [](double x) { return x < 0 ? kMissing : std::log(x); };
  // Half-to-even, as R does.
  else if (name == "round") fn = [](double x) { return std::nearbyint(x); };
  else if (name == "sign") fn = [](double x) { return std::isnan(x) ? x : double((x > 0) - (x < 0)); };
  else if (name == "sqrt") fn = [](double x) { return x < 0 ? kMissing : std::sqrt(x); };
  else throw DomainError("unknown transform '" + std::string(name) + "'");
  return unary_transform(g, fn, false, report);
}

std::optional<BinaryOp> binary_op_from_string(std::string_view s) {
  if (s == "+" || s == "add") return BinaryOp::add;
  if (s == "-" || s == "sub") return BinaryOp::sub;
  if (s == "*" || s == "x" || s == "mul") return BinaryOp::mul;
  if (s == "/" || s == "div") return BinaryOp::div;
  if (s == "^" || s == "pow") return BinaryOp::pow;
  if (s == "%%" || s == "mod") return BinaryOp::mod;
  if (s == "%/%" || s == "intdiv") return BinaryOp::intdiv;
  if (s == "==" || s == "eq") return BinaryOp::eq;
  if (s == "!=" || s == "ne") return BinaryOp::ne;
  return std::nullopt;
}

double apply_binary(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return a / b;
    case BinaryOp::pow: return std::pow(a, b);
    case BinaryOp::mod: {
      if (b == 0.0) return kMissing;
      return a - b * std::floor(a / b);
    }
    case BinaryOp::intdiv: return std::floor(a / b);
    case BinaryOp::eq:
      if (std::isnan(a) || std::isnan(b)) return kMissing;
      return a == b ? 1.0 : 0.0;
    case BinaryOp::ne:
      if (std::isnan(a) || std::isnan(b)) return kMissing;
      return a != b ? 1.0 : 0.0;
  }
  return kMissing;
}

namespace {

bool is_comparison(BinaryOp op) { return op == BinaryOp::eq || op == BinaryOp::ne; }

void finish_binary(Grayordinates& out, BinaryOp op) {
  if (!out.meta.cifti.intent) return;
  if (is_comparison(op)) {
    out.meta.cifti.series.reset();
    out.meta.cifti.label_tables.clear();
    out.meta.cifti.intent = Intent::dscalar;
    fill_cifti_meta(out, Intent::dscalar);
  } else if (out.meta.cifti.intent == Intent::dlabel) {
    demote_to_dscalar(out);
  }
}

template <class F>
Grayordinates map_data(const Grayordinates& g, F&& f) {
  Grayordinates out = g;
  for (auto* d : {&out.data.cortex_left, &out.data.cortex_right, &out.data.subcort}) {
    if (!*d) continue;
    for (Eigen::Index i = 0; i < (*d)->size(); ++i) (*d)->data()[i] = f((*d)->data()[i]);
  }
  return out;
}

}  // namespace

Grayordinates binary_op(BinaryOp op, const Grayordinates& a, const Grayordinates& b) {
  require_same_layout(a, b, "binary operation");
  if (a.cols() != b.cols()) {
    throw ConsistencyError("binary operation: column counts differ (" + std::to_string(a.cols()) + " vs " +
                           std::to_string(b.cols()) + ")");
  }
  Grayordinates out = a;
  const std::optional<Eigen::MatrixXd>* bs[3] = {&b.data.cortex_left, &b.data.cortex_right, &b.data.subcort};
  std::optional<Eigen::MatrixXd>* os[3] = {&out.data.cortex_left, &out.data.cortex_right, &out.data.subcort};
  for (int s = 0; s < 3; ++s) {
    if (!*os[s]) continue;
    auto& x = **os[s];
    const auto& y = **bs[s];
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = apply_binary(op, x.data()[i], y.data()[i]);
  }
  finish_binary(out, op);
  return out;
}

Grayordinates binary_op(BinaryOp op, const Grayordinates& a, double b) {
  Grayordinates out = map_data(a, [&](double x) { return apply_binary(op, x, b); });
  finish_binary(out, op);
  return out;
}

Grayordinates binary_op(BinaryOp op, double a, const Grayordinates& b) {
  Grayordinates out = map_data(b, [&](double x) { return apply_binary(op, a, x); });
  finish_binary(out, op);
  return out;
}

Grayordinates convert_intent(const Grayordinates& g, Intent target, const ConvertOptions& options) {
  Grayordinates out = g;
  auto& c = out.meta.cifti;
  if (options.names && options.names->size() != static_cast<std::size_t>(g.cols())) {
    throw ShapeError("convert: names do not match the column count");
  }
  switch (target) {
    case Intent::dtseries:
      c.names.clear();
      c.label_tables.clear();
      c.series = SeriesMap{options.series_start, options.series_step, options.series_unit, g.cols()};
      if (!(options.series_step > 0)) throw DomainError("series step must be positive");
      c.intent = Intent::dtseries;
      break;
    case Intent::dscalar:
      c.series.reset();
      c.label_tables.clear();
      if (options.names) c.names = *options.names;
      fill_cifti_meta(out, Intent::dscalar);
      break;
    case Intent::dlabel: {
      c.series.reset();
      if (options.names) c.names = *options.names;
      const bool keep = c.intent == Intent::dlabel && labels_still_valid(out);
      if (!keep) c.label_tables.clear();
      fill_cifti_meta(out, Intent::dlabel);
      break;
    }
  }
  return out;
}

}  // namespace gxt
