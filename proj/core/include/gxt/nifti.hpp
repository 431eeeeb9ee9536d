#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gxt {

enum class NiftiVersion { n1, n2 };
enum class ByteOrder { little, big };

/// NIFTI datatype codes accepted on read. Writes use float32 or int32.
enum class Datatype : int {
  uint8 = 2,
  int16 = 4,
  int32 = 8,
  float32 = 16,
  float64 = 64,
};

int bits_per_voxel(Datatype dt);

inline constexpr std::int32_t kCiftiEcode = 32;
inline constexpr std::int32_t kCommentEcode = 6;
inline constexpr std::size_t kNifti1HeaderSize = 348;
inline constexpr std::size_t kNifti2HeaderSize = 540;

struct NiftiExtension {
  std::int32_t ecode = 0;
  /// Payload bytes without the trailing NUL padding.
  std::vector<std::uint8_t> payload;

  /// Bytes occupied in the file: payload + 8, rounded up to a multiple of 16.
  std::size_t serialized_size() const;

  friend bool operator==(const NiftiExtension&, const NiftiExtension&) = default;
};

struct NiftiContainer {
  NiftiVersion version = NiftiVersion::n2;
  std::array<std::int64_t, 8> dims{1, 1, 1, 1, 1, 1, 1, 1};
  Datatype datatype = Datatype::float32;
  int bitpix = 32;
  std::int64_t data_offset = 0;
  double scl_slope = 1.0;
  double scl_inter = 0.0;
  int intent_code = 0;
  std::string intent_name;
  std::array<double, 8> pixdim{1, 1, 1, 1, 1, 1, 1, 1};
  int qform_code = 0;
  int sform_code = 0;
  int xyzt_units = 0;
  Eigen::Matrix4d affine = Eigen::Matrix4d::Identity();
  std::string description;
  std::vector<NiftiExtension> extensions;
  ByteOrder byte_order = ByteOrder::little;

  std::size_t header_size() const {
    return version == NiftiVersion::n1 ? kNifti1HeaderSize : kNifti2HeaderSize;
  }
  /// Product of dims[1..dims[0]].
  std::int64_t element_count() const;
  /// header + 4-byte extender + extensions.
  std::int64_t minimum_data_offset() const;
};

/// Header plus the raw (still encoded) data region.
struct NiftiFile {
  NiftiContainer header;
  std::vector<std::uint8_t> raw;
  bool gzipped = false;

  /// Decoded values in file order: endianness normalised and scl_slope /
  /// scl_inter applied when the slope is nonzero.
  std::vector<double> values() const;
};

/// Reads header, extensions, and data. Gzip is detected from the leading
/// bytes, not from the file name.
NiftiFile read_container(const std::filesystem::path& path);

/// Reads header and extensions only; the data region is never touched.
NiftiContainer read_container_header(const std::filesystem::path& path);

/// Writes a NIFTI-2 container (NIFTI-1 writes are rejected). The data are
/// converted to the header datatype; slope/inter are emitted as 1/0 and
/// data_offset is recomputed. A ".gz" suffix selects gzip output. Returns
/// the header exactly as serialized.
NiftiContainer write_container(const std::filesystem::path& path, NiftiContainer header,
                               std::span<const double> data);

/// Regular voxel grid: three extents plus the voxel-to-mm affine.
struct VolumeGrid {
  std::array<std::int64_t, 3> dims{0, 0, 0};
  Eigen::Matrix4d affine = Eigen::Matrix4d::Identity();

  std::int64_t voxel_count() const { return dims[0] * dims[1] * dims[2]; }
  /// Linear index, i fastest.
  std::int64_t linear_index(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return i + dims[0] * (j + dims[1] * k);
  }
  friend bool operator==(const VolumeGrid& a, const VolumeGrid& b) {
    return a.dims == b.dims && a.affine == b.affine;
  }
};

struct Volume {
  VolumeGrid grid;
  std::int64_t frames = 1;
  /// i-fastest within a frame, frames consecutive.
  std::vector<double> values;
};

/// Reads a 3D or 4D volume (dims[0] in {3, 4}).
Volume read_volume(const std::filesystem::path& path);

void write_volume(const std::filesystem::path& path, const Volume& volume,
                  Datatype datatype = Datatype::float32,
                  std::vector<NiftiExtension> extensions = {});

}  // namespace gxt
