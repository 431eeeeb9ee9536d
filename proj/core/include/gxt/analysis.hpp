#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gxt/grayordinates.hpp"

namespace gxt {

/// One integer key per location: left then right cortex at full
/// resolution, then subcortical voxels when appended. Key 0 is unassigned.
struct ParcelVector {
  std::vector<int> keys;
  int n_regions = 0;
};

/// Flattens the first column of a dlabel object. Vertices outside the
/// medial-wall mask get key 0. When `subcort_of` is given (or the parcel
/// object carries a subcortex), voxels are appended with key
/// base_offset + (structure index - 1), so Accumbens-L maps to base+1.
ParcelVector parc_vector(const Grayordinates& parc, const Grayordinates* subcort_of = nullptr,
                         int base_offset = 400);

/// n_regions x m means; NaN entries skipped, empty parcels give NaN rows.
Eigen::MatrixXd parcel_means(const Eigen::MatrixXd& data, const ParcelVector& parc);

/// Pearson correlation between rows. Rows without variance give NaN
/// (including their diagonal entry).
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& region_ts);
Eigen::VectorXd seed_correlation(const Eigen::MatrixXd& region_ts, Eigen::Index seed);

/// values[p-1] at every location with key p; NaN at key 0.
Eigen::VectorXd map_region_values_to_locations(const Eigen::VectorXd& values, const ParcelVector& parc);

/// Number of cosine bases below a highpass cutoff: floor(2 n tr f).
int dct_count(Eigen::Index n_columns, double tr, double highpass_hz);

/// n x k orthonormal cosine bases, lowest frequency first.
Eigen::MatrixXd dct_bases(Eigen::Index n, int k);

struct RegressionResult {
  Eigen::MatrixXd residuals;
  bool rank_deficient = false;
};

/// Regresses each row of `data` (p x m) on the columns of `design` (m x q).
/// A rank-deficient design is solved by minimum-norm least squares.
RegressionResult nuisance_regression(const Eigen::MatrixXd& data, const Eigen::MatrixXd& design);

/// RMS over rows of successive column differences; rows holding NaN are
/// skipped. Length m - 1.
Eigen::VectorXd rms_dvars(const Eigen::MatrixXd& data);

/// Column flags (length values.size() + 1) from a DVARS-style vector:
/// values[t] exceeding median + z * 1.4826 * MAD flags column t + 1, the
/// later column of that transition. Column 0 is never flagged.
std::vector<bool> flag_by_threshold(const Eigen::VectorXd& values, double z);

struct CleanParams {
  double tr = 1.0;
  double highpass_hz = 0.0;
  std::optional<double> scrub_z;
};

struct CleanResult {
  Grayordinates gray;
  int n_dct = 0;
  bool rank_deficient = false;
  std::vector<bool> flagged;
};

/// Intercept + DCT regression, then optional scrubbing of flagged columns.
CleanResult clean(const Grayordinates& g, const CleanParams& params);

/// Tab-separated rows; NaN written as "NaN".
void write_tsv(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_tsv(std::istream& is);

}  // namespace gxt
