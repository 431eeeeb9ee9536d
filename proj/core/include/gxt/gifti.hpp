#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gxt/common.hpp"
#include "gxt/nifti.hpp"

namespace gxt {

enum class GiftiIntent { pointset, triangle, metric, label, roi };
enum class GiftiDatatype { float32, int32, uint8 };
enum class GiftiEncoding { ascii, base64, gzip_base64 };

std::string_view to_string(GiftiEncoding e);
std::optional<GiftiEncoding> encoding_from_string(std::string_view name);

struct GiftiDataArray {
  GiftiIntent intent = GiftiIntent::metric;
  GiftiDatatype datatype = GiftiDatatype::float32;
  /// Extents; values are stored row-major over them.
  std::vector<std::int64_t> dims;
  GiftiEncoding encoding = GiftiEncoding::gzip_base64;
  ByteOrder endian = ByteOrder::little;
  std::vector<double> values;
  MetadataList metadata;

  std::int64_t element_count() const;
};

struct GiftiFile {
  MetadataList metadata;
  std::optional<LabelTable> label_table;
  std::vector<GiftiDataArray> arrays;
  /// Set when the file holds a pointset + triangle pair.
  std::optional<Surface> surface;
};

/// Decodes every array. Throws FormatError on malformed XML or payloads and
/// ConsistencyError when triangle indices exceed the pointset size.
GiftiFile read_gifti(const std::filesystem::path& path);

/// Writes all arrays; `encoding`, when set, overrides the per-array choice.
void write_gifti(const std::filesystem::path& path, const GiftiFile& file,
                 std::optional<GiftiEncoding> encoding = std::nullopt);

Surface read_surf(const std::filesystem::path& path);
void write_surf(const std::filesystem::path& path, const Surface& surface,
                GiftiEncoding encoding = GiftiEncoding::gzip_base64);

/// Per-vertex columns from a metric or label GIFTI (one array per column).
struct GiftiColumns {
  Eigen::MatrixXd values;
  std::vector<std::string> names;
  std::optional<LabelTable> label_table;
  Hemisphere hemisphere = Hemisphere::none;
};

GiftiColumns read_gifti_columns(const std::filesystem::path& path);

/// Writes `values` one DataArray per column. A label table switches the
/// intent to label (int32 payload); `intent` may also be roi.
void write_gifti_columns(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                         const std::vector<std::string>& names,
                         const std::optional<LabelTable>& label_table, Hemisphere hemisphere,
                         GiftiIntent intent = GiftiIntent::metric,
                         GiftiEncoding encoding = GiftiEncoding::gzip_base64);

}  // namespace gxt
