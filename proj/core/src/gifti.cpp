#include "gxt/gifti.hpp"

#include <sodium.h>
#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gxt/error.hpp"
#include "xml_dom.hpp"

namespace gxt {
namespace {

constexpr std::string_view kStructureKey = "AnatomicalStructurePrimary";

std::string_view intent_tag(GiftiIntent i) {
  switch (i) {
    case GiftiIntent::pointset: return "NIFTI_INTENT_POINTSET";
    case GiftiIntent::triangle: return "NIFTI_INTENT_TRIANGLE";
    case GiftiIntent::label: return "NIFTI_INTENT_LABEL";
    case GiftiIntent::metric:
    case GiftiIntent::roi: return "NIFTI_INTENT_NONE";
  }
  return "NIFTI_INTENT_NONE";
}

std::string_view datatype_tag(GiftiDatatype d) {
  switch (d) {
    case GiftiDatatype::float32: return "NIFTI_TYPE_FLOAT32";
    case GiftiDatatype::int32: return "NIFTI_TYPE_INT32";
    case GiftiDatatype::uint8: return "NIFTI_TYPE_UINT8";
  }
  return "NIFTI_TYPE_FLOAT32";
}

std::string_view encoding_tag(GiftiEncoding e) {
  switch (e) {
    case GiftiEncoding::ascii: return "ASCII";
    case GiftiEncoding::base64: return "Base64Binary";
    case GiftiEncoding::gzip_base64: return "GZipBase64Binary";
  }
  return "ASCII";
}

std::size_t element_size(GiftiDatatype d) { return d == GiftiDatatype::uint8 ? 1 : 4; }

std::string_view hemisphere_tag(Hemisphere h) {
  return h == Hemisphere::left ? "CortexLeft" : h == Hemisphere::right ? "CortexRight" : "";
}

std::optional<Hemisphere> hemisphere_from_metadata(const MetadataList& md) {
  const std::string* v = find_metadata(md, kStructureKey);
  if (v == nullptr) return std::nullopt;
  if (*v == "CortexLeft") return Hemisphere::left;
  if (*v == "CortexRight") return Hemisphere::right;
  return Hemisphere::none;
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  const std::size_t n = sodium_base64_encoded_len(bytes.size(), sodium_base64_VARIANT_ORIGINAL);
  std::string out(n, '\0');
  sodium_bin2base64(out.data(), n, bytes.data(), bytes.size(), sodium_base64_VARIANT_ORIGINAL);
  out.resize(std::strlen(out.c_str()));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::vector<std::uint8_t> out(text.size() * 3 / 4 + 3);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), " \t\r\n", &len, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0) {
    throw FormatError("invalid base64 payload in GIFTI data array");
  }
  out.resize(len);
  return out;
}

std::vector<std::uint8_t> deflate_bytes(const std::vector<std::uint8_t>& in) {
  uLongf n = compressBound(static_cast<uLong>(in.size()));
  std::vector<std::uint8_t> out(n);
  if (compress2(out.data(), &n, in.data(), static_cast<uLong>(in.size()), 6) != Z_OK) {
    throw InternalError("zlib compression failed");
  }
  out.resize(n);
  return out;
}

std::vector<std::uint8_t> inflate_bytes(const std::vector<std::uint8_t>& in, std::size_t expected) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw InternalError("zlib init failed");
  std::vector<std::uint8_t> out(expected);
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) {
    throw FormatError("GIFTI gzip payload decompressed to " + std::to_string(produced) +
                      " bytes, expected " + std::to_string(expected));
  }
  return out;
}

bool host_little() { return std::endian::native == std::endian::little; }

std::vector<std::uint8_t> pack(const GiftiDataArray& a) {
  const std::size_t es = element_size(a.datatype);
  std::vector<std::uint8_t> bytes(a.values.size() * es);
  const bool swap = (a.endian == ByteOrder::little) != host_little();
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    std::uint8_t* p = bytes.data() + i * es;
    if (a.datatype == GiftiDatatype::float32) {
      const float f = static_cast<float>(a.values[i]);
      std::memcpy(p, &f, 4);
    } else if (a.datatype == GiftiDatatype::int32) {
      const auto v = static_cast<std::int32_t>(std::llround(a.values[i]));
      std::memcpy(p, &v, 4);
    } else {
      *p = static_cast<std::uint8_t>(std::llround(a.values[i]));
    }
    if (swap && es == 4) {
      std::swap(p[0], p[3]);
      std::swap(p[1], p[2]);
    }
  }
  return bytes;
}

void unpack(const std::vector<std::uint8_t>& bytes, GiftiDataArray& a, std::size_t count) {
  const std::size_t es = element_size(a.datatype);
  if (bytes.size() != count * es) {
    throw FormatError("GIFTI payload holds " + std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(count * es));
  }
  const bool swap = (a.endian == ByteOrder::little) != host_little();
  a.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint8_t p[4];
    std::memcpy(p, bytes.data() + i * es, es);
    if (swap && es == 4) {
      std::swap(p[0], p[3]);
      std::swap(p[1], p[2]);
    }
    if (a.datatype == GiftiDatatype::float32) {
      float f;
      std::memcpy(&f, p, 4);
      a.values[i] = f;
    } else if (a.datatype == GiftiDatatype::int32) {
      std::int32_t v;
      std::memcpy(&v, p, 4);
      a.values[i] = v;
    } else {
      a.values[i] = p[0];
    }
  }
}

MetadataList parse_metadata(const xml::Node* md_node) {
  MetadataList md;
  if (md_node == nullptr) return md;
  for (const xml::Node* entry : md_node->children_named("MD")) {
    const xml::Node* name = entry->child("Name");
    const xml::Node* value = entry->child("Value");
    if (name == nullptr) throw FormatError("GIFTI <MD> without <Name>");
    md.emplace_back(name->text, value != nullptr ? value->text : std::string());
  }
  return md;
}

void write_metadata(xml::Writer& w, const MetadataList& md) {
  w.open("MetaData");
  for (const auto& [k, v] : md) {
    w.open("MD");
    w.leaf("Name", k, {}, true);
    w.leaf("Value", v, {}, true);
    w.close();
  }
  w.close();
}

const std::string& attr(const xml::Node& n, std::string_view key) {
  const std::string* v = n.attribute(key);
  if (v == nullptr) throw FormatError("GIFTI <" + n.name + "> missing " + std::string(key));
  return *v;
}

GiftiDataArray parse_array(const xml::Node& node) {
  GiftiDataArray a;
  const std::string& intent = attr(node, "Intent");
  if (intent == "NIFTI_INTENT_POINTSET") a.intent = GiftiIntent::pointset;
  else if (intent == "NIFTI_INTENT_TRIANGLE") a.intent = GiftiIntent::triangle;
  else if (intent == "NIFTI_INTENT_LABEL") a.intent = GiftiIntent::label;
  else a.intent = GiftiIntent::metric;

  const std::string& dt = attr(node, "DataType");
  if (dt == "NIFTI_TYPE_FLOAT32") a.datatype = GiftiDatatype::float32;
  else if (dt == "NIFTI_TYPE_INT32") a.datatype = GiftiDatatype::int32;
  else if (dt == "NIFTI_TYPE_UINT8") a.datatype = GiftiDatatype::uint8;
  else throw UnsupportedDatatype("GIFTI DataType " + dt);

  const std::string& enc = attr(node, "Encoding");
  if (enc == "ExternalFileBinary") {
    throw FormatError("external-file GIFTI arrays are not supported; convert to an embedded encoding");
  }
  const auto e = encoding_from_string(enc);
  if (!e) throw FormatError("unknown GIFTI encoding " + enc);
  a.encoding = *e;
  if (const std::string* en = node.attribute("Endian")) {
    a.endian = *en == "BigEndian" ? ByteOrder::big : ByteOrder::little;
  }

  const auto rank = xml::parse_int(attr(node, "Dimensionality"), "Dimensionality");
  if (rank < 1 || rank > 6) throw FormatError("GIFTI Dimensionality out of range");
  for (std::int64_t d = 0; d < rank; ++d) {
    a.dims.push_back(xml::parse_int(attr(node, "Dim" + std::to_string(d)), "Dim"));
  }
  a.metadata = parse_metadata(node.child("MetaData"));
  if (a.intent == GiftiIntent::metric) {
    const std::string* name = find_metadata(a.metadata, "Name");
    if (name != nullptr && *name == "ROI") a.intent = GiftiIntent::roi;
  }

  const xml::Node* data = node.child("Data");
  const std::string text = data != nullptr ? data->text : std::string();
  const auto count = static_cast<std::size_t>(a.element_count());
  if (a.encoding == GiftiEncoding::ascii) {
    const auto toks = xml::tokens(text);
    if (toks.size() != count) {
      throw FormatError("ASCII GIFTI array holds " + std::to_string(toks.size()) +
                        " values, expected " + std::to_string(count));
    }
    a.values.reserve(count);
    for (auto t : toks) a.values.push_back(xml::parse_double(t, "GIFTI ASCII value"));
  } else {
    auto bytes = base64_decode(xml::trim(text));
    if (a.encoding == GiftiEncoding::gzip_base64) {
      bytes = inflate_bytes(bytes, count * element_size(a.datatype));
    }
    unpack(bytes, a, count);
  }

  const std::string* order = node.attribute("ArrayIndexingOrder");
  if (order != nullptr && *order == "ColumnMajorOrder" && a.dims.size() == 2) {
    const auto r = a.dims[0], c = a.dims[1];
    std::vector<double> t(a.values.size());
    for (std::int64_t i = 0; i < r; ++i)
      for (std::int64_t j = 0; j < c; ++j) t[static_cast<std::size_t>(i * c + j)] = a.values[static_cast<std::size_t>(j * r + i)];
    a.values = std::move(t);
  }
  return a;
}

void write_array(xml::Writer& w, const GiftiDataArray& a, GiftiEncoding enc) {
  if (static_cast<std::int64_t>(a.values.size()) != a.element_count()) {
    throw ShapeError("GIFTI array value count differs from its dims");
  }
  std::vector<std::pair<std::string, std::string>> attrs{
      {"Intent", std::string(intent_tag(a.intent))},
      {"DataType", std::string(datatype_tag(a.datatype))},
      {"ArrayIndexingOrder", "RowMajorOrder"},
      {"Dimensionality", std::to_string(a.dims.size())}};
  for (std::size_t d = 0; d < a.dims.size(); ++d) {
    attrs.emplace_back("Dim" + std::to_string(d), std::to_string(a.dims[d]));
  }
  attrs.emplace_back("Encoding", std::string(encoding_tag(enc)));
  attrs.emplace_back("Endian", a.endian == ByteOrder::big ? "BigEndian" : "LittleEndian");
  attrs.emplace_back("ExternalFileName", "");
  attrs.emplace_back("ExternalFileOffset", "");
  w.open("DataArray", attrs);
  MetadataList md = a.metadata;
  if (a.intent == GiftiIntent::roi) set_metadata(md, "Name", "ROI");
  write_metadata(w, md);
  if (a.intent == GiftiIntent::pointset) {
    w.open("CoordinateSystemTransformMatrix");
    w.leaf("DataSpace", "NIFTI_XFORM_TALAIRACH", {}, true);
    w.leaf("TransformedSpace", "NIFTI_XFORM_TALAIRACH", {}, true);
    w.leaf("MatrixData", "1 0 0 0 0 1 0 0 0 0 1 0 0 0 0 1");
    w.close();
  }
  std::string text;
  if (enc == GiftiEncoding::ascii) {
    std::size_t row = a.dims.size() > 1 ? static_cast<std::size_t>(a.dims[1]) : 1;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (i) text += (i % row == 0) ? '\n' : ' ';
      double v = a.values[i];
      if (a.datatype == GiftiDatatype::float32) v = static_cast<float>(v);
      else v = static_cast<double>(std::llround(v));
      text += format_number(v);
    }
  } else {
    auto bytes = pack(a);
    if (enc == GiftiEncoding::gzip_base64) bytes = deflate_bytes(bytes);
    text = base64_encode(bytes);
  }
  w.leaf("Data", text);
  w.close();
}

}  // namespace

std::string_view to_string(GiftiEncoding e) {
  switch (e) {
    case GiftiEncoding::ascii: return "ascii";
    case GiftiEncoding::base64: return "base64";
    case GiftiEncoding::gzip_base64: return "gzip_base64";
  }
  return "ascii";
}

std::optional<GiftiEncoding> encoding_from_string(std::string_view name) {
  if (name == "ascii" || name == "ASCII") return GiftiEncoding::ascii;
  if (name == "base64" || name == "Base64Binary") return GiftiEncoding::base64;
  if (name == "gzip_base64" || name == "GZipBase64Binary") return GiftiEncoding::gzip_base64;
  return std::nullopt;
}

std::int64_t GiftiDataArray::element_count() const {
  std::int64_t n = 1;
  for (auto d : dims) n *= d;
  return dims.empty() ? 0 : n;
}

GiftiFile read_gifti(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  std::unique_ptr<xml::Node> root;
  try {
    root = xml::parse(ss.str());
  } catch (const XmlError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (root->name != "GIFTI") throw FormatError(path.string() + ": root element is not <GIFTI>");

  GiftiFile f;
  f.metadata = parse_metadata(root->child("MetaData"));
  if (const xml::Node* lt = root->child("LabelTable")) {
    LabelTable table;
    for (const xml::Node* l : lt->children_named("Label")) {
      const int key = static_cast<int>(xml::parse_int(attr(*l, "Key"), "Label Key"));
      LabelEntry e;
      e.name = l->text;
      auto comp = [&](std::string_view k, double dflt) {
        const std::string* v = l->attribute(k);
        return v != nullptr ? xml::parse_double(*v, k) : dflt;
      };
      e.color = {comp("Red", 0), comp("Green", 0), comp("Blue", 0), comp("Alpha", 1)};
      table[key] = std::move(e);
    }
    // Writers emit an empty <LabelTable/> in metric files.
    if (!table.empty()) f.label_table = std::move(table);
  }
  for (const xml::Node* da : root->children_named("DataArray")) f.arrays.push_back(parse_array(*da));

  const GiftiDataArray* points = nullptr;
  const GiftiDataArray* tris = nullptr;
  for (const auto& a : f.arrays) {
    if (a.intent == GiftiIntent::pointset && points == nullptr) points = &a;
    if (a.intent == GiftiIntent::triangle && tris == nullptr) tris = &a;
  }
  if (points != nullptr && tris != nullptr) {
    if (points->dims.size() != 2 || points->dims[1] != 3 || tris->dims.size() != 2 || tris->dims[1] != 3) {
      throw FormatError(path.string() + ": pointset/triangle arrays must be N x 3");
    }
    Surface s;
    s.vertices.resize(points->dims[0], 3);
    for (Eigen::Index i = 0; i < s.vertices.rows(); ++i)
      for (int c = 0; c < 3; ++c) s.vertices(i, c) = points->values[static_cast<std::size_t>(i * 3 + c)];
    s.faces.resize(tris->dims[0], 3);
    for (Eigen::Index i = 0; i < s.faces.rows(); ++i)
      for (int c = 0; c < 3; ++c) s.faces(i, c) = static_cast<int>(tris->values[static_cast<std::size_t>(i * 3 + c)]);
    auto hemi = hemisphere_from_metadata(f.metadata);
    if (!hemi) hemi = hemisphere_from_metadata(points->metadata);
    s.hemisphere = hemi.value_or(Hemisphere::none);
    check_surface(s);
    f.surface = std::move(s);
  }
  return f;
}

void write_gifti(const std::filesystem::path& path, const GiftiFile& file,
                 std::optional<GiftiEncoding> encoding) {
  xml::Writer w;
  w.raw_line("<!DOCTYPE GIFTI SYSTEM \"http://www.nitrc.org/frs/download.php/115/gifti.dtd\">");
  w.open("GIFTI", {{"Version", "1.0"}, {"NumberOfDataArrays", std::to_string(file.arrays.size())}});
  write_metadata(w, file.metadata);
  w.open("LabelTable");
  if (file.label_table) {
    for (const auto& [key, e] : *file.label_table) {
      w.leaf("Label", e.name,
             {{"Key", std::to_string(key)},
              {"Red", format_number(e.color.r)},
              {"Green", format_number(e.color.g)},
              {"Blue", format_number(e.color.b)},
              {"Alpha", format_number(e.color.a)}},
             true);
    }
  }
  w.close();
  for (const auto& a : file.arrays) write_array(w, a, encoding.value_or(a.encoding));
  w.close();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string s = w.str();
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Surface read_surf(const std::filesystem::path& path) {
  GiftiFile f = read_gifti(path);
  if (!f.surface) throw FormatError(path.string() + ": no pointset/triangle pair (not a surface file)");
  return std::move(*f.surface);
}

void write_surf(const std::filesystem::path& path, const Surface& surface, GiftiEncoding encoding) {
  check_surface(surface);
  GiftiFile f;
  if (surface.hemisphere != Hemisphere::none) {
    f.metadata.emplace_back(kStructureKey, hemisphere_tag(surface.hemisphere));
  }
  GiftiDataArray p;
  p.intent = GiftiIntent::pointset;
  p.datatype = GiftiDatatype::float32;
  p.dims = {surface.vertex_count(), 3};
  p.encoding = encoding;
  p.values.resize(static_cast<std::size_t>(surface.vertex_count() * 3));
  for (Eigen::Index i = 0; i < surface.vertex_count(); ++i)
    for (int c = 0; c < 3; ++c) p.values[static_cast<std::size_t>(i * 3 + c)] = surface.vertices(i, c);
  f.arrays.push_back(std::move(p));
  GiftiDataArray t;
  t.intent = GiftiIntent::triangle;
  t.datatype = GiftiDatatype::int32;
  t.dims = {surface.face_count(), 3};
  t.encoding = encoding;
  t.values.resize(static_cast<std::size_t>(surface.face_count() * 3));
  for (Eigen::Index i = 0; i < surface.face_count(); ++i)
    for (int c = 0; c < 3; ++c) t.values[static_cast<std::size_t>(i * 3 + c)] = surface.faces(i, c);
  f.arrays.push_back(std::move(t));
  write_gifti(path, f);
}

GiftiColumns read_gifti_columns(const std::filesystem::path& path) {
  GiftiFile f = read_gifti(path);
  GiftiColumns out;
  out.label_table = f.label_table;
  std::vector<const GiftiDataArray*> cols;
  for (const auto& a : f.arrays) {
    if (a.intent == GiftiIntent::pointset || a.intent == GiftiIntent::triangle) continue;
    cols.push_back(&a);
  }
  if (cols.empty()) throw FormatError(path.string() + ": no metric or label arrays");
  const std::int64_t v = cols.front()->dims[0];
  // A single 2-D array is also accepted as a v x m block.
  if (cols.size() == 1 && cols.front()->dims.size() == 2) {
    const auto& a = *cols.front();
    out.values.resize(a.dims[0], a.dims[1]);
    for (std::int64_t i = 0; i < a.dims[0]; ++i)
      for (std::int64_t j = 0; j < a.dims[1]; ++j) out.values(i, j) = a.values[static_cast<std::size_t>(i * a.dims[1] + j)];
    out.names.assign(static_cast<std::size_t>(a.dims[1]), "");
  } else {
    out.values.resize(v, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (cols[c]->element_count() != v) throw ShapeError(path.string() + ": columns differ in length");
      for (std::int64_t i = 0; i < v; ++i) out.values(i, static_cast<Eigen::Index>(c)) = cols[c]->values[static_cast<std::size_t>(i)];
      const std::string* name = find_metadata(cols[c]->metadata, "Name");
      out.names.push_back(name != nullptr && cols[c]->intent != GiftiIntent::roi ? *name : "");
    }
  }
  auto hemi = hemisphere_from_metadata(f.metadata);
  if (!hemi && !cols.empty()) hemi = hemisphere_from_metadata(cols.front()->metadata);
  out.hemisphere = hemi.value_or(Hemisphere::none);
  return out;
}

void write_gifti_columns(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                         const std::vector<std::string>& names,
                         const std::optional<LabelTable>& label_table, Hemisphere hemisphere,
                         GiftiIntent intent, GiftiEncoding encoding) {
  GiftiFile f;
  if (hemisphere != Hemisphere::none) f.metadata.emplace_back(kStructureKey, hemisphere_tag(hemisphere));
  if (label_table) {
    f.label_table = label_table;
    intent = GiftiIntent::label;
  }
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    GiftiDataArray a;
    a.intent = intent;
    a.datatype = intent == GiftiIntent::label ? GiftiDatatype::int32
                 : intent == GiftiIntent::roi ? GiftiDatatype::uint8
                                              : GiftiDatatype::float32;
    a.dims = {values.rows()};
    a.encoding = encoding;
    a.values.assign(values.col(c).data(), values.col(c).data() + values.rows());
    if (static_cast<std::size_t>(c) < names.size() && !names[static_cast<std::size_t>(c)].empty()) {
      a.metadata.emplace_back("Name", names[static_cast<std::size_t>(c)]);
    }
    f.arrays.push_back(std::move(a));
  }
  write_gifti(path, f);
}

}  // namespace gxt
