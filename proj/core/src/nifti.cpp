#include "gxt/nifti.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>

#include "gxt/error.hpp"

namespace gxt {
namespace {

constexpr char kN1Magic[4] = {'n', '+', '1', '\0'};
constexpr char kN2Magic[8] = {'n', '+', '2', '\0', '\r', '\n', '\032', '\n'};

bool host_is_little() { return std::endian::native == std::endian::little; }

template <typename T>
T byteswap_value(T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  std::reverse(bytes, bytes + sizeof(T));
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

/// Typed access into a byte buffer with a fixed file byte order.
class ByteView {
 public:
  ByteView(const std::uint8_t* data, std::size_t size, ByteOrder order)
      : data_(data), size_(size), swap_((order == ByteOrder::little) != host_is_little()) {}

  template <typename T>
  T get(std::size_t offset) const {
    if (offset + sizeof(T) > size_) throw TruncationError("header field beyond end of data");
    T v;
    std::memcpy(&v, data_ + offset, sizeof(T));
    return swap_ ? byteswap_value(v) : v;
  }

  std::string text(std::size_t offset, std::size_t len) const {
    if (offset + len > size_) throw TruncationError("header text beyond end of data");
    const char* p = reinterpret_cast<const char*>(data_ + offset);
    return std::string(p, strnlen(p, len));
  }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  bool swap_;
};

class ByteSink {
 public:
  ByteSink(std::vector<std::uint8_t>& out, ByteOrder order)
      : out_(out), swap_((order == ByteOrder::little) != host_is_little()) {}

  template <typename T>
  void put(std::size_t offset, T v) {
    if (swap_) v = byteswap_value(v);
    if (out_.size() < offset + sizeof(T)) out_.resize(offset + sizeof(T), 0);
    std::memcpy(out_.data() + offset, &v, sizeof(T));
  }

  void text(std::size_t offset, std::size_t len, const std::string& s) {
    if (out_.size() < offset + len) out_.resize(offset + len, 0);
    std::memset(out_.data() + offset, 0, len);
    std::memcpy(out_.data() + offset, s.data(), std::min(len, s.size()));
  }

 private:
  std::vector<std::uint8_t>& out_;
  bool swap_;
};

struct GzCloser {
  void operator()(gzFile f) const {
    if (f != nullptr) gzclose(f);
  }
};
using GzHandle = std::unique_ptr<std::remove_pointer_t<gzFile>, GzCloser>;

bool starts_with_gzip_magic(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  unsigned char magic[2] = {0, 0};
  in.read(reinterpret_cast<char*>(magic), 2);
  return in.gcount() == 2 && magic[0] == 0x1f && magic[1] == 0x8b;
}

/// Sequential reader over plain or gzip files (gzread passes plain files
/// through unchanged).
class InputStream {
 public:
  explicit InputStream(const std::filesystem::path& path) : path_(path) {
    gzipped_ = starts_with_gzip_magic(path);
    handle_.reset(gzopen(path.c_str(), "rb"));
    if (!handle_) throw IoError("cannot open " + path.string());
    gzbuffer(handle_.get(), 1 << 17);
  }

  /// Reads up to n bytes; returns the count actually read.
  std::size_t read(std::uint8_t* dst, std::size_t n) {
    std::size_t total = 0;
    while (total < n) {
      const auto chunk = static_cast<unsigned>(std::min<std::size_t>(n - total, 1u << 30));
      const int got = gzread(handle_.get(), dst + total, chunk);
      if (got < 0) {
        int errnum = 0;
        throw FormatError(path_.string() + ": " + gzerror(handle_.get(), &errnum));
      }
      if (got == 0) break;
      total += static_cast<std::size_t>(got);
    }
    return total;
  }

  bool gzipped() const { return gzipped_; }

 private:
  std::filesystem::path path_;
  GzHandle handle_;
  bool gzipped_ = false;
};

bool valid_datatype(int code) {
  switch (code) {
    case 2: case 4: case 8: case 16: case 64: return true;
    default: return false;
  }
}

Eigen::Matrix4d quaternion_affine(double b, double c, double d, double qx, double qy, double qz,
                                  const std::array<double, 8>& pixdim) {
  double a = 1.0 - (b * b + c * c + d * d);
  if (a < 1e-7) {
    const double norm = 1.0 / std::sqrt(b * b + c * c + d * d);
    b *= norm; c *= norm; d *= norm;
    a = 0.0;
  } else {
    a = std::sqrt(a);
  }
  const double qfac = pixdim[0] < 0 ? -1.0 : 1.0;
  const double xd = pixdim[1] > 0 ? pixdim[1] : 1.0;
  const double yd = pixdim[2] > 0 ? pixdim[2] : 1.0;
  const double zd = (pixdim[3] > 0 ? pixdim[3] : 1.0) * qfac;
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 0) = (a * a + b * b - c * c - d * d) * xd;
  m(0, 1) = 2 * (b * c - a * d) * yd;
  m(0, 2) = 2 * (b * d + a * c) * zd;
  m(1, 0) = 2 * (b * c + a * d) * xd;
  m(1, 1) = (a * a + c * c - b * b - d * d) * yd;
  m(1, 2) = 2 * (c * d - a * b) * zd;
  m(2, 0) = 2 * (b * d - a * c) * xd;
  m(2, 1) = 2 * (c * d + a * b) * yd;
  m(2, 2) = (a * a + d * d - c * c - b * b) * zd;
  m(0, 3) = qx;
  m(1, 3) = qy;
  m(2, 3) = qz;
  return m;
}

/// Parses the fixed header. `bytes` must hold at least the header size.
NiftiContainer parse_fixed_header(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) throw FormatError("file too short for a NIFTI header");
  std::int32_t le_size = 0;
  std::memcpy(&le_size, bytes.data(), 4);
  if (!host_is_little()) le_size = byteswap_value(le_size);
  const std::int32_t be_size = byteswap_value(le_size);

  NiftiContainer h;
  if (le_size == 348 || le_size == 540) {
    h.byte_order = ByteOrder::little;
  } else if (be_size == 348 || be_size == 540) {
    h.byte_order = ByteOrder::big;
  } else {
    throw FormatError("bad NIFTI magic: sizeof_hdr is neither 348 nor 540");
  }
  const std::int32_t hdr_size = h.byte_order == ByteOrder::little ? le_size : be_size;
  if (bytes.size() < static_cast<std::size_t>(hdr_size)) {
    throw TruncationError("file shorter than its NIFTI header");
  }
  const ByteView v(bytes.data(), bytes.size(), h.byte_order);
  int datatype_code = 0;
  std::array<double, 4> srow_x{}, srow_y{}, srow_z{};
  double qb = 0, qc = 0, qd = 0, qx = 0, qy = 0, qz = 0;

  if (hdr_size == 348) {
    if (std::memcmp(bytes.data() + 344, kN1Magic, 3) != 0 ||
        (bytes[347] != 0)) {
      throw FormatError("bad NIFTI-1 magic");
    }
    h.version = NiftiVersion::n1;
    for (int i = 0; i < 8; ++i) h.dims[i] = v.get<std::int16_t>(40 + 2 * i);
    h.intent_code = v.get<std::int16_t>(68);
    datatype_code = v.get<std::int16_t>(70);
    h.bitpix = v.get<std::int16_t>(72);
    for (int i = 0; i < 8; ++i) h.pixdim[i] = v.get<float>(76 + 4 * i);
    h.data_offset = static_cast<std::int64_t>(v.get<float>(108));
    h.scl_slope = v.get<float>(112);
    h.scl_inter = v.get<float>(116);
    h.xyzt_units = static_cast<std::uint8_t>(bytes[123]);
    h.description = v.text(148, 80);
    h.qform_code = v.get<std::int16_t>(252);
    h.sform_code = v.get<std::int16_t>(254);
    qb = v.get<float>(256); qc = v.get<float>(260); qd = v.get<float>(264);
    qx = v.get<float>(268); qy = v.get<float>(272); qz = v.get<float>(276);
    for (int i = 0; i < 4; ++i) {
      srow_x[i] = v.get<float>(280 + 4 * i);
      srow_y[i] = v.get<float>(296 + 4 * i);
      srow_z[i] = v.get<float>(312 + 4 * i);
    }
    h.intent_name = v.text(328, 16);
  } else {
    if (std::memcmp(bytes.data() + 4, kN2Magic, 8) != 0) throw FormatError("bad NIFTI-2 magic");
    h.version = NiftiVersion::n2;
    datatype_code = v.get<std::int16_t>(12);
    h.bitpix = v.get<std::int16_t>(14);
    for (int i = 0; i < 8; ++i) h.dims[i] = v.get<std::int64_t>(16 + 8 * i);
    for (int i = 0; i < 8; ++i) h.pixdim[i] = v.get<double>(104 + 8 * i);
    h.data_offset = v.get<std::int64_t>(168);
    h.scl_slope = v.get<double>(176);
    h.scl_inter = v.get<double>(184);
    h.description = v.text(240, 80);
    h.qform_code = v.get<std::int32_t>(344);
    h.sform_code = v.get<std::int32_t>(348);
    qb = v.get<double>(352); qc = v.get<double>(360); qd = v.get<double>(368);
    qx = v.get<double>(376); qy = v.get<double>(384); qz = v.get<double>(392);
    for (int i = 0; i < 4; ++i) {
      srow_x[i] = v.get<double>(400 + 8 * i);
      srow_y[i] = v.get<double>(432 + 8 * i);
      srow_z[i] = v.get<double>(464 + 8 * i);
    }
    h.xyzt_units = v.get<std::int32_t>(500);
    h.intent_code = v.get<std::int32_t>(504);
    h.intent_name = v.text(508, 16);
  }

  if (!valid_datatype(datatype_code)) {
    throw UnsupportedDatatype("unsupported NIFTI datatype code " + std::to_string(datatype_code));
  }
  h.datatype = static_cast<Datatype>(datatype_code);
  if (h.dims[0] < 1 || h.dims[0] > 7) {
    throw FormatError("dims[0] = " + std::to_string(h.dims[0]) + " outside [1, 7]");
  }
  for (std::int64_t i = 1; i <= h.dims[0]; ++i) {
    if (h.dims[i] < 1) throw FormatError("dimension " + std::to_string(i) + " is < 1");
  }

  if (h.sform_code > 0) {
    for (int c = 0; c < 4; ++c) {
      h.affine(0, c) = srow_x[c];
      h.affine(1, c) = srow_y[c];
      h.affine(2, c) = srow_z[c];
    }
  } else if (h.qform_code > 0) {
    h.affine = quaternion_affine(qb, qc, qd, qx, qy, qz, h.pixdim);
  } else {
    h.affine = Eigen::Matrix4d::Identity();
    for (int i = 0; i < 3; ++i) h.affine(i, i) = h.pixdim[i + 1] != 0 ? h.pixdim[i + 1] : 1.0;
  }
  return h;
}

void parse_extensions(NiftiContainer& h, const std::vector<std::uint8_t>& bytes) {
  const std::size_t hs = h.header_size();
  if (bytes.size() < hs + 4 || bytes[hs] == 0) return;
  const ByteView v(bytes.data(), bytes.size(), h.byte_order);
  std::size_t pos = hs + 4;
  while (pos + 8 <= static_cast<std::size_t>(h.data_offset)) {
    const std::int32_t esize = v.get<std::int32_t>(pos);
    const std::int32_t ecode = v.get<std::int32_t>(pos + 4);
    if (esize < 16 || esize % 16 != 0) {
      throw FormatError("extension size " + std::to_string(esize) + " is not a positive multiple of 16");
    }
    if (pos + static_cast<std::size_t>(esize) > static_cast<std::size_t>(h.data_offset) ||
        pos + static_cast<std::size_t>(esize) > bytes.size()) {
      throw TruncationError("extension runs past the data offset");
    }
    NiftiExtension ext;
    ext.ecode = ecode;
    const auto* start = bytes.data() + pos + 8;
    std::size_t len = static_cast<std::size_t>(esize) - 8;
    while (len > 0 && start[len - 1] == 0) --len;
    ext.payload.assign(start, start + len);
    h.extensions.push_back(std::move(ext));
    pos += static_cast<std::size_t>(esize);
  }
}

/// Reads header + extensions; leaves the stream positioned at data_offset.
NiftiContainer read_header_from(InputStream& in, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(kNifti2HeaderSize);
  const std::size_t got = in.read(bytes.data(), 4);
  if (got < 4) throw FormatError(path.string() + ": too short for a NIFTI header");
  std::int32_t raw_size = 0;
  std::memcpy(&raw_size, bytes.data(), 4);
  std::size_t hdr = 0;
  for (std::int32_t s : {raw_size, byteswap_value(raw_size)}) {
    if (s == 348 || s == 540) hdr = static_cast<std::size_t>(s);
  }
  if (hdr == 0) throw FormatError(path.string() + ": bad NIFTI magic");
  bytes.resize(hdr);
  if (in.read(bytes.data() + 4, hdr - 4) != hdr - 4) {
    throw TruncationError(path.string() + ": truncated NIFTI header");
  }
  NiftiContainer h = parse_fixed_header(bytes);
  if (h.data_offset < static_cast<std::int64_t>(hdr)) {
    throw FormatError(path.string() + ": vox_offset precedes end of header");
  }
  const auto rest = static_cast<std::size_t>(h.data_offset) - hdr;
  bytes.resize(hdr + rest);
  if (in.read(bytes.data() + hdr, rest) != rest) {
    throw TruncationError(path.string() + ": truncated before data offset");
  }
  parse_extensions(h, bytes);
  return h;
}

template <typename T>
void decode_into(const std::vector<std::uint8_t>& raw, bool swap, std::vector<double>& out) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    T v;
    std::memcpy(&v, raw.data() + i * sizeof(T), sizeof(T));
    if (swap) v = byteswap_value(v);
    out[i] = static_cast<double>(v);
  }
}

template <typename T>
void encode_from(std::span<const double> data, bool swap, std::uint8_t* dst) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    T v;
    if constexpr (std::is_integral_v<T>) {
      const double d = data[i];
      v = std::isfinite(d) ? static_cast<T>(std::llround(d)) : T{0};
    } else {
      v = static_cast<T>(data[i]);
    }
    if (swap) v = byteswap_value(v);
    std::memcpy(dst + i * sizeof(T), &v, sizeof(T));
  }
}

std::vector<std::uint8_t> serialize_header(const NiftiContainer& h) {
  std::vector<std::uint8_t> out(kNifti2HeaderSize, 0);
  ByteSink s(out, h.byte_order);
  s.put<std::int32_t>(0, static_cast<std::int32_t>(kNifti2HeaderSize));
  std::memcpy(out.data() + 4, kN2Magic, 8);
  s.put<std::int16_t>(12, static_cast<std::int16_t>(h.datatype));
  s.put<std::int16_t>(14, static_cast<std::int16_t>(h.bitpix));
  for (int i = 0; i < 8; ++i) s.put<std::int64_t>(16 + 8 * i, h.dims[i]);
  for (int i = 0; i < 8; ++i) s.put<double>(104 + 8 * i, h.pixdim[i]);
  s.put<std::int64_t>(168, h.data_offset);
  s.put<double>(176, h.scl_slope);
  s.put<double>(184, h.scl_inter);
  s.text(240, 80, h.description);
  s.put<std::int32_t>(344, h.qform_code);
  s.put<std::int32_t>(348, h.sform_code);
  for (int c = 0; c < 4; ++c) {
    s.put<double>(400 + 8 * c, h.affine(0, c));
    s.put<double>(432 + 8 * c, h.affine(1, c));
    s.put<double>(464 + 8 * c, h.affine(2, c));
  }
  s.put<std::int32_t>(500, h.xyzt_units);
  s.put<std::int32_t>(504, h.intent_code);
  s.text(508, 16, h.intent_name);
  return out;
}

bool has_suffix(const std::filesystem::path& p, std::string_view suffix) {
  const std::string s = p.string();
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int bits_per_voxel(Datatype dt) {
  switch (dt) {
    case Datatype::uint8: return 8;
    case Datatype::int16: return 16;
    case Datatype::int32: return 32;
    case Datatype::float32: return 32;
    case Datatype::float64: return 64;
  }
  return 0;
}

std::size_t NiftiExtension::serialized_size() const {
  return (payload.size() + 8 + 15) / 16 * 16;
}

std::int64_t NiftiContainer::element_count() const {
  std::int64_t n = 1;
  for (std::int64_t i = 1; i <= dims[0] && i < 8; ++i) n *= dims[i];
  return n;
}

std::int64_t NiftiContainer::minimum_data_offset() const {
  std::int64_t off = static_cast<std::int64_t>(header_size()) + 4;
  for (const auto& e : extensions) off += static_cast<std::int64_t>(e.serialized_size());
  return off;
}

std::vector<double> NiftiFile::values() const {
  const std::int64_t n = header.element_count();
  std::vector<double> out(static_cast<std::size_t>(n));
  const bool swap = (header.byte_order == ByteOrder::little) != host_is_little();
  switch (header.datatype) {
    case Datatype::uint8: decode_into<std::uint8_t>(raw, swap, out); break;
    case Datatype::int16: decode_into<std::int16_t>(raw, swap, out); break;
    case Datatype::int32: decode_into<std::int32_t>(raw, swap, out); break;
    case Datatype::float32: decode_into<float>(raw, swap, out); break;
    case Datatype::float64: decode_into<double>(raw, swap, out); break;
  }
  const double slope = header.scl_slope;
  const double inter = header.scl_inter;
  if (slope != 0.0 && std::isfinite(slope) && (slope != 1.0 || inter != 0.0)) {
    for (auto& x : out) x = x * slope + inter;
  }
  return out;
}

NiftiContainer read_container_header(const std::filesystem::path& path) {
  InputStream in(path);
  return read_header_from(in, path);
}

NiftiFile read_container(const std::filesystem::path& path) {
  InputStream in(path);
  NiftiFile file;
  file.header = read_header_from(in, path);
  file.gzipped = in.gzipped();
  const std::int64_t bytes_per = bits_per_voxel(file.header.datatype) / 8;
  const auto need = static_cast<std::size_t>(file.header.element_count() * bytes_per);
  file.raw.resize(need);
  const std::size_t got = in.read(file.raw.data(), need);
  if (got != need) {
    throw TruncationError(path.string() + ": data region holds " + std::to_string(got) +
                          " of " + std::to_string(need) + " bytes");
  }
  return file;
}

NiftiContainer write_container(const std::filesystem::path& path, NiftiContainer h,
                               std::span<const double> data) {
  if (h.version != NiftiVersion::n2) {
    throw FormatError("NIFTI-1 output is not supported; write NIFTI-2");
  }
  if (h.dims[0] < 1 || h.dims[0] > 7) throw ShapeError("dims[0] outside [1, 7]");
  for (std::int64_t i = 1; i <= h.dims[0]; ++i) {
    if (h.dims[i] < 1) throw ShapeError("dimension " + std::to_string(i) + " is < 1");
  }
  if (h.element_count() != static_cast<std::int64_t>(data.size())) {
    throw ShapeError("data holds " + std::to_string(data.size()) + " values but dims require " +
                     std::to_string(h.element_count()));
  }
  h.bitpix = bits_per_voxel(h.datatype);
  h.scl_slope = 1.0;
  h.scl_inter = 0.0;
  h.data_offset = h.minimum_data_offset();

  std::vector<std::uint8_t> bytes = serialize_header(h);
  bytes.resize(kNifti2HeaderSize + 4, 0);
  bytes[kNifti2HeaderSize] = h.extensions.empty() ? 0 : 1;
  for (const auto& e : h.extensions) {
    const std::size_t start = bytes.size();
    const std::size_t esize = e.serialized_size();
    bytes.resize(start + esize, 0);
    ByteSink s(bytes, h.byte_order);
    s.put<std::int32_t>(start, static_cast<std::int32_t>(esize));
    s.put<std::int32_t>(start + 4, e.ecode);
    std::memcpy(bytes.data() + start + 8, e.payload.data(), e.payload.size());
  }
  const std::size_t bytes_per = static_cast<std::size_t>(h.bitpix / 8);
  const std::size_t data_start = bytes.size();
  bytes.resize(data_start + data.size() * bytes_per);
  const bool swap = (h.byte_order == ByteOrder::little) != host_is_little();
  std::uint8_t* dst = bytes.data() + data_start;
  switch (h.datatype) {
    case Datatype::uint8: encode_from<std::uint8_t>(data, swap, dst); break;
    case Datatype::int16: encode_from<std::int16_t>(data, swap, dst); break;
    case Datatype::int32: encode_from<std::int32_t>(data, swap, dst); break;
    case Datatype::float32: encode_from<float>(data, swap, dst); break;
    case Datatype::float64: encode_from<double>(data, swap, dst); break;
  }

  if (has_suffix(path, ".gz")) {
    GzHandle out(gzopen(path.c_str(), "wb6"));
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    std::size_t pos = 0;
    while (pos < bytes.size()) {
      const auto chunk = static_cast<unsigned>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
      if (gzwrite(out.get(), bytes.data() + pos, chunk) != static_cast<int>(chunk)) {
        throw IoError("failed writing " + path.string());
      }
      pos += chunk;
    }
    if (gzclose(out.release()) != Z_OK) throw IoError("failed closing " + path.string());
  } else {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + path.string());
  }
  return h;
}

Volume read_volume(const std::filesystem::path& path) {
  NiftiFile file = read_container(path);
  const auto& h = file.header;
  if (h.dims[0] != 3 && h.dims[0] != 4) {
    throw ShapeError(path.string() + ": expected a 3D or 4D volume, dims[0] = " +
                     std::to_string(h.dims[0]));
  }
  Volume vol;
  vol.grid.dims = {h.dims[1], h.dims[2], h.dims[3]};
  vol.grid.affine = h.affine;
  vol.frames = h.dims[0] == 4 ? h.dims[4] : 1;
  vol.values = file.values();
  return vol;
}

void write_volume(const std::filesystem::path& path, const Volume& volume, Datatype datatype,
                  std::vector<NiftiExtension> extensions) {
  NiftiContainer h;
  h.dims = {volume.frames > 1 ? 4 : 3, volume.grid.dims[0], volume.grid.dims[1],
            volume.grid.dims[2], std::max<std::int64_t>(1, volume.frames), 1, 1, 1};
  h.datatype = datatype;
  h.affine = volume.grid.affine;
  h.sform_code = 1;
  h.qform_code = 0;
  h.xyzt_units = 2;  // mm
  for (int i = 0; i < 3; ++i) h.pixdim[i + 1] = volume.grid.affine.block<3, 1>(0, i).norm();
  h.pixdim[0] = 1.0;
  h.extensions = std::move(extensions);
  write_container(path, std::move(h), volume.values);
}

}  // namespace gxt
