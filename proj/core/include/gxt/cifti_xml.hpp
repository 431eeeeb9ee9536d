#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gxt/common.hpp"
#include "gxt/nifti.hpp"

namespace gxt {

enum class ModelKind { surface, voxels };

/// One BrainModel element: a contiguous block of rows for one structure.
struct BrainModelEntry {
  std::string structure_name;
  ModelKind kind = ModelKind::surface;
  std::int64_t index_offset = 0;
  std::int64_t index_count = 0;
  /// Total surface vertices (surface kind only).
  std::int64_t surface_vertex_count = 0;
  std::vector<std::int64_t> vertex_indices;
  std::vector<std::array<std::int64_t, 3>> voxel_ijk;

  friend bool operator==(const BrainModelEntry&, const BrainModelEntry&) = default;
};

struct SeriesMap {
  double start = 0.0;
  double step = 1.0;
  std::string unit = "second";
  std::int64_t length = 0;

  friend bool operator==(const SeriesMap&, const SeriesMap&) = default;
};

/// One named column of a scalars or labels map.
struct NamedMap {
  std::string name;
  MetadataList metadata;
  std::optional<LabelTable> label_table;

  friend bool operator==(const NamedMap&, const NamedMap&) = default;
};

enum class ColumnMapKind { series, scalars, labels };

struct ColumnMap {
  ColumnMapKind kind = ColumnMapKind::scalars;
  SeriesMap series;             // kind == series
  std::vector<NamedMap> named;  // kind == scalars or labels

  std::int64_t length() const {
    return kind == ColumnMapKind::series ? series.length : static_cast<std::int64_t>(named.size());
  }
  friend bool operator==(const ColumnMap&, const ColumnMap&) = default;
};

struct BrainModelMap {
  std::vector<BrainModelEntry> entries;
  std::optional<VolumeGrid> volume;

  /// Total rows covered by the entries.
  std::int64_t length() const;
  friend bool operator==(const BrainModelMap&, const BrainModelMap&) = default;
};

struct CiftiXmlHeader {
  std::string version = "2";
  Intent intent = Intent::dscalar;
  BrainModelMap models;
  ColumnMap columns;
  /// Matrix dimension (0 or 1) that the brain-models map applies to.
  int models_dimension = 1;
  MetadataList misc;
  /// Unrecognised child elements of <Matrix>, kept as XML text.
  std::vector<std::string> unknown_elements;
  /// Non-fatal findings from parsing (e.g. unknown structure names).
  std::vector<std::string> warnings;

  friend bool operator==(const CiftiXmlHeader& a, const CiftiXmlHeader& b) {
    return a.version == b.version && a.intent == b.intent && a.models == b.models &&
           a.columns == b.columns && a.models_dimension == b.models_dimension &&
           a.misc == b.misc && a.unknown_elements == b.unknown_elements;
  }
};

/// Parses the XML carried in a CIFTI NIFTI extension.
CiftiXmlHeader parse_cifti_xml(std::string_view payload);
inline CiftiXmlHeader parse_cifti_xml(std::span<const std::uint8_t> payload) {
  return parse_cifti_xml(std::string_view(reinterpret_cast<const char*>(payload.data()), payload.size()));
}

/// Serializes to CIFTI-2 XML; throws ConsistencyError if the header
/// violates its invariants.
std::string serialize_cifti_xml(const CiftiXmlHeader& header);

/// Throws ConsistencyError on tiling, index, or label-table violations.
void check_cifti_header(const CiftiXmlHeader& header);

const BrainModelEntry& lookup_brain_model(const CiftiXmlHeader& header,
                                          std::string_view structure_name);

}  // namespace gxt
