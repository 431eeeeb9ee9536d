#include "gxt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/QR>

#include "gxt/error.hpp"
#include "gxt/manip.hpp"
#include "gxt/parallel.hpp"

namespace gxt {
namespace {

int key_of(double v, const char* where) {
  if (std::isnan(v)) return 0;
  const double r = std::round(v);
  if (r != v || r < 0 || r > 1e9) {
    throw DomainError(std::string("non-integer or negative parcel key in ") + where);
  }
  return static_cast<int>(r);
}

void append_cortex(std::vector<int>& keys, const std::optional<Eigen::MatrixXd>& data,
                   const std::optional<Mask>& mask, const char* where) {
  if (!data) return;
  Eigen::Index row = 0;
  for (bool in : *mask) {
    keys.push_back(in ? key_of((*data)(row++, 0), where) : 0);
  }
}

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ParcelVector parc_vector(const Grayordinates& parc, const Grayordinates* subcort_of, int base_offset) {
  if (parc.cols() < 1) throw ShapeError("parcellation has no columns");
  ParcelVector pv;
  append_cortex(pv.keys, parc.data.cortex_left, parc.meta.cortex.medial_wall_mask_left, "left cortex");
  append_cortex(pv.keys, parc.data.cortex_right, parc.meta.cortex.medial_wall_mask_right, "right cortex");
  for (int k : pv.keys) pv.n_regions = std::max(pv.n_regions, k);

  const SubcortMeta* sub = nullptr;
  if (subcort_of != nullptr && subcort_of->meta.subcort) sub = &*subcort_of->meta.subcort;
  else if (subcort_of == nullptr && parc.meta.subcort) sub = &*parc.meta.subcort;
  if (subcort_of != nullptr && sub == nullptr) throw NotFound("no subcortical data to append parcels from");
  if (sub != nullptr) {
    if (base_offset < pv.n_regions) {
      throw DomainError("subcortical key offset " + std::to_string(base_offset) + " overlaps cortical keys up to " +
                        std::to_string(pv.n_regions));
    }
    for (int label : sub->labels) pv.keys.push_back(base_offset + label - 1);
    pv.n_regions = base_offset + static_cast<int>(kSubcortStructureCount) - 2;
  }
  return pv;
}

Eigen::MatrixXd parcel_means(const Eigen::MatrixXd& data, const ParcelVector& parc) {
  if (static_cast<std::size_t>(data.rows()) != parc.keys.size()) {
    throw ShapeError("data has " + std::to_string(data.rows()) + " rows but the parcellation has " +
                     std::to_string(parc.keys.size()) + " locations");
  }
  const auto n = static_cast<std::size_t>(parc.n_regions);
  std::vector<std::vector<Eigen::Index>> members(n);
  for (std::size_t r = 0; r < parc.keys.size(); ++r) {
    const int k = parc.keys[r];
    if (k == 0) continue;
    if (k < 0 || k > parc.n_regions) throw IndexError("parcel key " + std::to_string(k) + " out of range");
    members[static_cast<std::size_t>(k - 1)].push_back(static_cast<Eigen::Index>(r));
  }
  Eigen::MatrixXd out(parc.n_regions, data.cols());
  parallel_for(n, [&](std::size_t p) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      double sum = 0.0;
      std::int64_t count = 0;
      for (Eigen::Index r : members[p]) {
        const double x = data(r, c);
        if (std::isnan(x)) continue;
        sum += x;
        ++count;
      }
      out(static_cast<Eigen::Index>(p), c) = count > 0 ? sum / static_cast<double>(count) : kMissing;
    }
  });
  return out;
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& ts) {
  const Eigen::Index n = ts.rows();
  Eigen::MatrixXd z(n, ts.cols());
  std::vector<bool> ok(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd row = ts.row(i);
    if (!row.allFinite() || ts.cols() < 2) continue;
    const Eigen::RowVectorXd c = row.array() - row.mean();
    const double norm = c.norm();
    if (!(norm > 0)) continue;
    z.row(i) = c / norm;
    ok[static_cast<std::size_t>(i)] = true;
  }
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double v = kMissing;
      if (ok[static_cast<std::size_t>(i)] && ok[static_cast<std::size_t>(j)]) {
        v = i == j ? 1.0 : std::clamp(z.row(i).dot(z.row(j)), -1.0, 1.0);
      }
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Eigen::VectorXd seed_correlation(const Eigen::MatrixXd& ts, Eigen::Index seed) {
  if (seed < 0 || seed >= ts.rows()) {
    throw IndexError("seed " + std::to_string(seed + 1) + " out of range 1.." + std::to_string(ts.rows()));
  }
  return correlation_matrix(ts).col(seed);
}

Eigen::VectorXd map_region_values_to_locations(const Eigen::VectorXd& values, const ParcelVector& parc) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(parc.keys.size()));
  for (std::size_t r = 0; r < parc.keys.size(); ++r) {
    const int k = parc.keys[r];
    if (k == 0) {
      out(static_cast<Eigen::Index>(r)) = kMissing;
      continue;
    }
    if (k < 0 || k > values.size()) {
      throw IndexError("parcel key " + std::to_string(k) + " has no value (" + std::to_string(values.size()) +
                       " given)");
    }
    out(static_cast<Eigen::Index>(r)) = values(k - 1);
  }
  return out;
}

int dct_count(Eigen::Index n_columns, double tr, double highpass_hz) {
  if (!(tr > 0)) throw DomainError("TR must be positive");
  if (!(highpass_hz >= 0)) throw DomainError("highpass frequency must be non-negative");
  // Basis j has frequency j / (2 n tr); the epsilon keeps exact products
  // such as 2*100*0.05 from flooring to 9.
  const double k = std::floor(2.0 * static_cast<double>(n_columns) * tr * highpass_hz + 1e-9);
  if (k >= static_cast<double>(n_columns)) {
    throw DomainError("highpass of " + format_number(highpass_hz) + " Hz needs " + format_number(k) +
                      " bases but there are only " + std::to_string(n_columns) + " columns");
  }
  return static_cast<int>(k);
}

Eigen::MatrixXd dct_bases(Eigen::Index n, int k) {
  if (k < 0 || k > n) throw DomainError("basis count out of range");
  Eigen::MatrixXd b(n, k);
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  for (int j = 1; j <= k; ++j) {
    for (Eigen::Index t = 0; t < n; ++t) {
      b(t, j - 1) = scale * std::cos(std::numbers::pi * j * (static_cast<double>(t) + 0.5) / static_cast<double>(n));
    }
  }
  return b;
}

RegressionResult nuisance_regression(const Eigen::MatrixXd& data, const Eigen::MatrixXd& design) {
  if (design.rows() != data.cols()) {
    throw ShapeError("design has " + std::to_string(design.rows()) + " rows but data has " +
                     std::to_string(data.cols()) + " columns");
  }
  RegressionResult res;
  if (design.cols() == 0) {
    res.residuals = data;
    return res;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  res.rank_deficient = cod.rank() < design.cols();
  const Eigen::MatrixXd beta = cod.solve(data.transpose());  // q x p
  res.residuals = data - (design * beta).transpose();
  return res;
}

Eigen::VectorXd rms_dvars(const Eigen::MatrixXd& data) {
  const Eigen::Index m = data.cols();
  if (m < 2) return Eigen::VectorXd(0);
  std::vector<Eigen::Index> rows;
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    if (data.row(r).allFinite()) rows.push_back(r);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m - 1);
  if (rows.empty()) return out;
  for (Eigen::Index t = 0; t + 1 < m; ++t) {
    double s = 0.0;
    for (Eigen::Index r : rows) {
      const double d = data(r, t + 1) - data(r, t);
      s += d * d;
    }
    out(t) = std::sqrt(s / static_cast<double>(rows.size()));
  }
  return out;
}

std::vector<bool> flag_by_threshold(const Eigen::VectorXd& values, double z) {
  std::vector<bool> flags(static_cast<std::size_t>(values.size()) + 1, false);
  if (values.size() == 0) return flags;
  std::vector<double> v(values.data(), values.data() + values.size());
  const double med = median_of(v);
  for (double& x : v) x = std::abs(x - med);
  const double thresh = med + z * 1.4826 * median_of(v);
  for (Eigen::Index t = 0; t < values.size(); ++t) {
    if (values(t) > thresh) flags[static_cast<std::size_t>(t) + 1] = true;
  }
  return flags;
}

CleanResult clean(const Grayordinates& g, const CleanParams& params) {
  require_valid(g);
  if (g.meta.cifti.intent == Intent::dlabel) throw DomainError("cannot regress categorical (dlabel) data");
  const Eigen::Index m = g.cols();
  CleanResult res;
  res.n_dct = dct_count(m, params.tr, params.highpass_hz);
  Eigen::MatrixXd design(m, res.n_dct + 1);
  design.col(0).setOnes();
  design.rightCols(res.n_dct) = dct_bases(m, res.n_dct);
  const Eigen::MatrixXd x = as_matrix(g);
  auto reg = nuisance_regression(x, design);
  res.rank_deficient = reg.rank_deficient;
  res.gray = replace_data(g, reg.residuals);
  res.flagged.assign(static_cast<std::size_t>(m), false);
  if (params.scrub_z) {
    res.flagged = flag_by_threshold(rms_dvars(reg.residuals), *params.scrub_z);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index c = 0; c < m; ++c) {
      if (!res.flagged[static_cast<std::size_t>(c)]) keep.push_back(c);
    }
    if (keep.size() != static_cast<std::size_t>(m)) res.gray = select_columns(res.gray, keep);
  }
  return res;
}

void write_tsv(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) os << '\t';
      const double v = m(r, c);
      if (std::isnan(v)) os << "NaN";
      else os << format_number(v);
    }
    os << '\n';
  }
}

Eigen::MatrixXd read_tsv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) {
      if (cell == "NaN" || cell == "NA" || cell == "nan") {
        row.push_back(kMissing);
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw FormatError("bad number '" + cell + "' on TSV line " + std::to_string(lineno));
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ShapeError("TSV line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                       " fields, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

}  // namespace gxt
