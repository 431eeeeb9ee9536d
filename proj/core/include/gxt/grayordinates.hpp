#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gxt/cifti_xml.hpp"
#include "gxt/common.hpp"
#include "gxt/nifti.hpp"

namespace gxt {

using Mask = std::vector<bool>;

struct GrayData {
  std::optional<Eigen::MatrixXd> cortex_left;
  std::optional<Eigen::MatrixXd> cortex_right;
  std::optional<Eigen::MatrixXd> subcort;
};

struct GraySurfaces {
  std::optional<Surface> left;
  std::optional<Surface> right;
};

struct CortexMeta {
  /// Length v; true marks vertices that carry data.
  std::optional<Mask> medial_wall_mask_left;
  std::optional<Mask> medial_wall_mask_right;
};

struct SubcortMeta {
  /// One vocabulary index (into subcort_structures()) per subcortical row.
  std::vector<int> labels;
  /// Grid extents plus trans_mat (voxel ijk -> mm).
  VolumeGrid grid;
  /// i-fastest, length grid.voxel_count(); rows follow this order.
  Mask mask;
  std::string trans_units = "mm";

  friend bool operator==(const SubcortMeta&, const SubcortMeta&) = default;
};

struct CiftiMeta {
  std::optional<Intent> intent;
  std::optional<SeriesMap> series;
  std::vector<std::string> names;
  std::vector<LabelTable> label_tables;
  MetadataList misc;

  friend bool operator==(const CiftiMeta&, const CiftiMeta&) = default;
};

struct GrayMeta {
  CortexMeta cortex;
  std::optional<SubcortMeta> subcort;
  CiftiMeta cifti;
};

/// Grayordinates: per-structure data, optional surfaces, and metadata.
/// Absent components are empty optionals.
struct Grayordinates {
  GrayData data;
  GraySurfaces surf;
  GrayMeta meta;

  Eigen::Index rows() const;
  /// Column count m (0 when no data).
  Eigen::Index cols() const;
  bool empty() const;
};

/// Violations of the structural invariants, in a fixed order; empty = ok.
std::vector<std::string> validate(const Grayordinates& g);
/// Throws ConsistencyError listing the violations.
void require_valid(const Grayordinates& g);

struct Dims {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};
Dims dims(const Grayordinates& g);

/// Rows stacked left cortex, right cortex, subcortex.
Eigen::MatrixXd as_matrix(const Grayordinates& g);

/// Human-readable overview in the conventional layout.
std::string summary(const Grayordinates& g);

/// Pads cortical data to full length v with `fill` at masked-out vertices;
/// masks become all-true.
Grayordinates move_from_mwall(const Grayordinates& g, double fill = kMissing);

/// Drops cortical rows whose every column equals `sentinel` (NaN matches
/// NaN) and marks them false in the mask.
Grayordinates move_to_mwall(const Grayordinates& g, double sentinel = kMissing);

enum class Component { cortex_left, cortex_right, subcortex, surf_left, surf_right };
std::string_view to_string(Component c);

Grayordinates remove(const Grayordinates& g, Component c);

/// Attaches a surface to the hemisphere named by its tag (or `hemisphere`
/// when the tag is none). Resamples when the vertex count differs from the
/// data resolution.
Grayordinates add_surf(const Grayordinates& g, const Surface& surface,
                       Hemisphere hemisphere = Hemisphere::none);

/// Builds an object from raw matrices. Missing masks mean all-true.
struct MatrixParts {
  std::optional<Eigen::MatrixXd> cortex_left;
  std::optional<Mask> mask_left;
  std::optional<Eigen::MatrixXd> cortex_right;
  std::optional<Mask> mask_right;
  std::optional<Eigen::MatrixXd> subcort;
  std::optional<SubcortMeta> subcort_meta;
};
Grayordinates from_matrices(MatrixParts parts);

/// Resolution v of a hemisphere (mask length), or 0 when absent.
std::size_t resolution(const Grayordinates& g, Hemisphere h);

/// Per-structure voxel counts, in vocabulary order.
std::array<std::int64_t, kSubcortStructureCount> subcort_counts(const SubcortMeta& m);

/// Default column names/tables so the object carries complete metadata
/// for `intent`.
void fill_cifti_meta(Grayordinates& g, Intent intent);

}  // namespace gxt

namespace gxt {

/// Counts behind a summary, obtainable from an object or from a header
/// alone (see info()).
struct SummaryFacts {
  std::optional<Intent> intent;
  std::optional<SeriesMap> series;
  std::vector<std::string> names;
  std::int64_t columns = 0;
  struct Cortex {
    std::int64_t data = 0;
    std::int64_t total = 0;
  };
  std::optional<Cortex> left, right;
  std::optional<std::array<std::int64_t, kSubcortStructureCount>> subcort;
};

SummaryFacts summary_facts(const Grayordinates& g);
std::string format_summary(const SummaryFacts& facts);

}  // namespace gxt
