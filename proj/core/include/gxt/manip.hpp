#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gxt/grayordinates.hpp"

namespace gxt {

/// Columns by 0-based index (repeats and reordering allowed). A dtseries
/// stays a series only for a contiguous ascending run; otherwise it
/// becomes a dscalar named after the original 1-based indices.
Grayordinates select_columns(const Grayordinates& g, const std::vector<Eigen::Index>& indices);

/// Concatenates columns; structures, masks, and subcortical layout must match.
Grayordinates merge_columns(const std::vector<Grayordinates>& grays);

/// Joins objects holding disjoint brain structures with equal column counts.
Grayordinates combine_structures(const std::vector<Grayordinates>& grays);

/// Swaps in a new (rows x any) matrix; location metadata untouched.
Grayordinates replace_data(const Grayordinates& g, const Eigen::MatrixXd& matrix,
                           const std::optional<std::vector<std::string>>& names = std::nullopt);

enum class Reducer { mean, sum, min, max, sd, var, median };
std::optional<Reducer> reducer_from_string(std::string_view name);
/// NaN entries are skipped; an all-NaN input gives NaN.
double reduce(Reducer r, const Eigen::Ref<const Eigen::VectorXd>& v);

/// Reduces each row across columns; returns a 1-column dscalar object.
Grayordinates apply_across_columns(const Grayordinates& g, Reducer r);
Grayordinates apply_across_columns(const Grayordinates& g,
                                   const std::function<double(const Eigen::VectorXd&)>& fn);
/// Reduces each column across rows; returns m values.
Eigen::VectorXd apply_across_rows(const Grayordinates& g, Reducer r);
Eigen::VectorXd apply_across_rows(const Grayordinates& g,
                                  const std::function<double(const Eigen::VectorXd&)>& fn);

struct TransformReport {
  /// Finite inputs that produced NaN (e.g. log of a negative).
  std::int64_t domain_errors = 0;
  bool demoted_labels = false;
};

/// Elementwise on data only. A dlabel input becomes dscalar unless
/// keep_labels is set and every output is a key of its column's table.
Grayordinates unary_transform(const Grayordinates& g, const std::function<double(double)>& fn,
                              bool keep_labels = false, TransformReport* report = nullptr);

/// abs, ceiling, exp, floor, log, round, sign, sqrt.
Grayordinates named_transform(const Grayordinates& g, std::string_view name, TransformReport* report = nullptr);

enum class BinaryOp { add, sub, mul, div, pow, mod, intdiv, eq, ne };
std::optional<BinaryOp> binary_op_from_string(std::string_view sym);
double apply_binary(BinaryOp op, double a, double b);

/// Gray-gray operands need identical structures, masks, and column counts.
/// Comparisons give a dscalar of 0/1 (NaN stays NaN).
Grayordinates binary_op(BinaryOp op, const Grayordinates& a, const Grayordinates& b);
Grayordinates binary_op(BinaryOp op, const Grayordinates& a, double b);
Grayordinates binary_op(BinaryOp op, double a, const Grayordinates& b);

struct ConvertOptions {
  double series_start = 0.0;
  double series_step = 1.0;
  std::string series_unit = "second";
  std::optional<std::vector<std::string>> names;
};

/// To dlabel requires integer values (DomainError otherwise); keys become
/// the sorted unique values, coloured from the qualitative cycle.
Grayordinates convert_intent(const Grayordinates& g, Intent target, const ConvertOptions& options = {});

}  // namespace gxt
