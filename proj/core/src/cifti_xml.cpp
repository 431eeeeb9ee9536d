#include "gxt/cifti_xml.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "gxt/error.hpp"
#include "xml_dom.hpp"

namespace gxt {
namespace {

using Attrs = std::vector<std::pair<std::string, std::string>>;

constexpr std::string_view kBrainModels = "CIFTI_INDEX_TYPE_BRAIN_MODELS";
constexpr std::string_view kSeries = "CIFTI_INDEX_TYPE_SERIES";
constexpr std::string_view kScalars = "CIFTI_INDEX_TYPE_SCALARS";
constexpr std::string_view kLabels = "CIFTI_INDEX_TYPE_LABELS";

const std::string& required_attr(const xml::Node& node, std::string_view key) {
  const std::string* v = node.attribute(key);
  if (v == nullptr) {
    throw XmlError("<" + node.name + "> is missing attribute " + std::string(key));
  }
  return *v;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

MetadataList parse_metadata(const xml::Node* md_node) {
  MetadataList md;
  if (md_node == nullptr) return md;
  for (const xml::Node* entry : md_node->children_named("MD")) {
    const xml::Node* name = entry->child("Name");
    const xml::Node* value = entry->child("Value");
    if (name == nullptr) throw XmlError("<MD> without <Name>");
    md.emplace_back(name->text, value != nullptr ? value->text : std::string());
  }
  return md;
}

void write_metadata(xml::Writer& w, const MetadataList& md) {
  if (md.empty()) return;
  w.open("MetaData");
  for (const auto& [k, v] : md) {
    w.open("MD");
    w.leaf("Name", k);
    w.leaf("Value", v);
    w.close();
  }
  w.close();
}

LabelTable parse_label_table(const xml::Node& node) {
  LabelTable table;
  for (const xml::Node* label : node.children_named("Label")) {
    const int key = static_cast<int>(xml::parse_int(required_attr(*label, "Key"), "Label Key"));
    LabelEntry e;
    e.name = label->text;
    e.color.r = xml::parse_double(required_attr(*label, "Red"), "Label Red");
    e.color.g = xml::parse_double(required_attr(*label, "Green"), "Label Green");
    e.color.b = xml::parse_double(required_attr(*label, "Blue"), "Label Blue");
    const std::string* alpha = label->attribute("Alpha");
    e.color.a = alpha != nullptr ? xml::parse_double(*alpha, "Label Alpha") : 1.0;
    if (!table.emplace(key, std::move(e)).second) {
      throw ConsistencyError("duplicate label key " + std::to_string(key));
    }
  }
  return table;
}

void parse_model_map(const xml::Node& map, CiftiXmlHeader& h) {
  for (const auto& child : map.children) {
    if (child->name == "Volume") {
      VolumeGrid grid;
      const auto dims = xml::tokens(required_attr(*child, "VolumeDimensions"), true);
      if (dims.size() != 3) throw XmlError("VolumeDimensions must list three extents");
      for (int i = 0; i < 3; ++i) grid.dims[i] = xml::parse_int(dims[i], "VolumeDimensions");
      const xml::Node* tm = child->child("TransformationMatrixVoxelIndicesIJKtoXYZ");
      if (tm == nullptr) throw XmlError("<Volume> without a transformation matrix");
      const auto vals = xml::tokens(tm->text);
      if (vals.size() != 16) throw XmlError("transformation matrix must hold 16 numbers");
      double scale = 1.0;
      if (const std::string* e = tm->attribute("MeterExponent")) {
        scale = std::pow(10.0, static_cast<double>(xml::parse_int(*e, "MeterExponent")) + 3.0);
      }
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          double v = xml::parse_double(vals[static_cast<std::size_t>(r * 4 + c)], "transformation matrix");
          if (r < 3) v *= scale;
          grid.affine(r, c) = v;
        }
      }
      h.models.volume = grid;
    } else if (child->name == "BrainModel") {
      BrainModelEntry e;
      e.structure_name = required_attr(*child, "BrainStructure");
      e.index_offset = xml::parse_int(required_attr(*child, "IndexOffset"), "IndexOffset");
      e.index_count = xml::parse_int(required_attr(*child, "IndexCount"), "IndexCount");
      const std::string& type = required_attr(*child, "ModelType");
      if (type == "CIFTI_MODEL_TYPE_SURFACE") {
        e.kind = ModelKind::surface;
        e.surface_vertex_count =
            xml::parse_int(required_attr(*child, "SurfaceNumberOfVertices"), "SurfaceNumberOfVertices");
        const xml::Node* vi = child->child("VertexIndices");
        if (vi == nullptr) throw XmlError("surface BrainModel without <VertexIndices>");
        const auto toks = xml::tokens(vi->text);
        e.vertex_indices.reserve(toks.size());
        for (auto t : toks) e.vertex_indices.push_back(xml::parse_int(t, "VertexIndices"));
      } else if (type == "CIFTI_MODEL_TYPE_VOXELS") {
        e.kind = ModelKind::voxels;
        const xml::Node* vox = child->child("VoxelIndicesIJK");
        if (vox == nullptr) throw XmlError("voxel BrainModel without <VoxelIndicesIJK>");
        const auto toks = xml::tokens(vox->text);
        if (toks.size() % 3 != 0) throw XmlError("VoxelIndicesIJK length is not a multiple of 3");
        e.voxel_ijk.reserve(toks.size() / 3);
        for (std::size_t i = 0; i < toks.size(); i += 3) {
          e.voxel_ijk.push_back({xml::parse_int(toks[i], "VoxelIndicesIJK"),
                                 xml::parse_int(toks[i + 1], "VoxelIndicesIJK"),
                                 xml::parse_int(toks[i + 2], "VoxelIndicesIJK")});
        }
      } else {
        throw XmlError("unknown ModelType " + type);
      }
      const bool known = e.structure_name == kCortexLeft || e.structure_name == kCortexRight ||
                         subcort_index_from_cifti(e.structure_name).has_value();
      if (!known) h.warnings.push_back("unknown brain structure " + e.structure_name);
      h.models.entries.push_back(std::move(e));
    }
  }
}

void parse_column_map(const xml::Node& map, std::string_view type, CiftiXmlHeader& h) {
  if (type == kSeries) {
    h.columns.kind = ColumnMapKind::series;
    h.intent = Intent::dtseries;
    auto& s = h.columns.series;
    double scale = 1.0;
    if (const std::string* e = map.attribute("SeriesExponent")) {
      scale = std::pow(10.0, static_cast<double>(xml::parse_int(*e, "SeriesExponent")));
    }
    s.length = xml::parse_int(required_attr(map, "NumberOfSeriesPoints"), "NumberOfSeriesPoints");
    s.start = xml::parse_double(required_attr(map, "SeriesStart"), "SeriesStart") * scale;
    s.step = xml::parse_double(required_attr(map, "SeriesStep"), "SeriesStep") * scale;
    s.unit = lower(required_attr(map, "SeriesUnit"));
    return;
  }
  const bool labels = type == kLabels;
  h.columns.kind = labels ? ColumnMapKind::labels : ColumnMapKind::scalars;
  h.intent = labels ? Intent::dlabel : Intent::dscalar;
  for (const xml::Node* nm : map.children_named("NamedMap")) {
    NamedMap m;
    const xml::Node* name = nm->child("MapName");
    if (name == nullptr) throw XmlError("<NamedMap> without <MapName>");
    m.name = name->text;
    m.metadata = parse_metadata(nm->child("MetaData"));
    if (const xml::Node* lt = nm->child("LabelTable")) m.label_table = parse_label_table(*lt);
    h.columns.named.push_back(std::move(m));
  }
}

std::string join_ints(const std::vector<std::int64_t>& v) {
  std::string out;
  out.reserve(v.size() * 6);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::int64_t BrainModelMap::length() const {
  std::int64_t n = 0;
  for (const auto& e : entries) n += e.index_count;
  return n;
}

void check_cifti_header(const CiftiXmlHeader& h) {
  std::vector<const BrainModelEntry*> sorted;
  for (const auto& e : h.models.entries) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return a->index_offset < b->index_offset;
  });
  std::int64_t expected = 0;
  std::set<std::string> names;
  for (const auto* e : sorted) {
    if (!names.insert(e->structure_name).second) {
      throw ConsistencyError("brain structure " + e->structure_name + " appears twice");
    }
    if (e->index_count < 1) {
      throw ConsistencyError(e->structure_name + ": IndexCount must be positive");
    }
    if (e->index_offset < expected) {
      throw ConsistencyError(e->structure_name + ": IndexOffset " + std::to_string(e->index_offset) +
                             " overlaps the previous brain model");
    }
    if (e->index_offset > expected) {
      throw ConsistencyError(e->structure_name + ": gap before IndexOffset " +
                             std::to_string(e->index_offset));
    }
    expected += e->index_count;
    if (e->kind == ModelKind::surface) {
      if (static_cast<std::int64_t>(e->vertex_indices.size()) != e->index_count) {
        throw ConsistencyError(e->structure_name + ": VertexIndices length differs from IndexCount");
      }
      std::int64_t prev = -1;
      for (auto idx : e->vertex_indices) {
        if (idx < 0 || idx >= e->surface_vertex_count) {
          throw ConsistencyError(e->structure_name + ": vertex index " + std::to_string(idx) +
                                 " outside [0, " + std::to_string(e->surface_vertex_count) + ")");
        }
        if (idx <= prev) {
          throw ConsistencyError(e->structure_name + ": VertexIndices not strictly increasing");
        }
        prev = idx;
      }
    } else {
      if (static_cast<std::int64_t>(e->voxel_ijk.size()) != e->index_count) {
        throw ConsistencyError(e->structure_name + ": VoxelIndicesIJK length differs from IndexCount");
      }
      if (!h.models.volume) {
        throw ConsistencyError(e->structure_name + ": voxel model without a <Volume>");
      }
      const auto& dims = h.models.volume->dims;
      for (const auto& ijk : e->voxel_ijk) {
        for (int a = 0; a < 3; ++a) {
          if (ijk[a] < 0 || ijk[a] >= dims[a]) {
            throw ConsistencyError(e->structure_name + ": voxel index outside the volume");
          }
        }
      }
    }
  }
  if (h.models.entries.empty()) throw ConsistencyError("no brain models");

  const auto& cols = h.columns;
  if (cols.length() < 1) throw ConsistencyError("column map has no entries");
  const bool intent_ok = (h.intent == Intent::dtseries && cols.kind == ColumnMapKind::series) ||
                         (h.intent == Intent::dscalar && cols.kind == ColumnMapKind::scalars) ||
                         (h.intent == Intent::dlabel && cols.kind == ColumnMapKind::labels);
  if (!intent_ok) throw ConsistencyError("intent does not match the column map type");
  if (cols.kind == ColumnMapKind::series && !(cols.series.step > 0)) {
    throw ConsistencyError("series step must be positive");
  }
  if (cols.kind == ColumnMapKind::labels) {
    for (const auto& m : cols.named) {
      if (!m.label_table) throw ConsistencyError("dlabel column '" + m.name + "' lacks a label table");
      for (const auto& [key, e] : *m.label_table) {
        for (double c : {e.color.r, e.color.g, e.color.b, e.color.a}) {
          if (!(c >= 0.0 && c <= 1.0)) {
            throw ConsistencyError("label " + std::to_string(key) + " colour outside [0, 1]");
          }
        }
      }
    }
  }
}

CiftiXmlHeader parse_cifti_xml(std::string_view payload) {
  const auto root = xml::parse(payload);
  if (root->name != "CIFTI") throw XmlError("root element is <" + root->name + ">, expected <CIFTI>");
  CiftiXmlHeader h;
  if (const std::string* v = root->attribute("Version")) h.version = *v;
  const xml::Node* matrix = root->child("Matrix");
  if (matrix == nullptr) throw XmlError("<CIFTI> without <Matrix>");

  bool have_models = false, have_columns = false;
  for (const auto& child : matrix->children) {
    if (child->name == "MetaData") {
      h.misc = parse_metadata(child.get());
    } else if (child->name == "MatrixIndicesMap") {
      const std::string& applies = required_attr(*child, "AppliesToMatrixDimension");
      const std::string& type = required_attr(*child, "IndicesMapToDataType");
      const auto dims = xml::tokens(applies, true);
      if (dims.size() != 1) {
        throw UnsupportedIntent("a MatrixIndicesMap applying to dimensions " + applies +
                                " (dconn-style) is not supported");
      }
      const auto dim = xml::parse_int(dims[0], "AppliesToMatrixDimension");
      if (dim != 0 && dim != 1) throw XmlError("AppliesToMatrixDimension must be 0 or 1");
      if (type == kBrainModels) {
        if (have_models) throw UnsupportedIntent("two brain-model maps (dconn) are not supported");
        have_models = true;
        h.models_dimension = static_cast<int>(dim);
        parse_model_map(*child, h);
      } else if (type == kSeries || type == kScalars || type == kLabels) {
        if (have_columns) throw UnsupportedIntent("two non-brain-model maps are not supported");
        have_columns = true;
        parse_column_map(*child, type, h);
      } else {
        throw UnsupportedIntent("unsupported index map type " + type);
      }
    } else {
      xml::Writer w(false);
      w.subtree(*child);
      h.unknown_elements.push_back(w.str());
    }
  }
  if (!have_models) throw UnsupportedIntent("no brain-model map; only dense intents are supported");
  if (!have_columns) throw UnsupportedIntent("no series, scalars, or labels map");
  check_cifti_header(h);
  return h;
}

std::string serialize_cifti_xml(const CiftiXmlHeader& h) {
  check_cifti_header(h);
  xml::Writer w;
  w.open("CIFTI", {{"Version", h.version}});
  w.open("Matrix");
  write_metadata(w, h.misc);

  const int column_dim = 1 - h.models_dimension;
  const std::string column_dim_text = std::to_string(column_dim);
  const auto& cols = h.columns;
  if (cols.kind == ColumnMapKind::series) {
    w.empty("MatrixIndicesMap", {{"AppliesToMatrixDimension", column_dim_text},
                                 {"IndicesMapToDataType", std::string(kSeries)},
                                 {"NumberOfSeriesPoints", std::to_string(cols.series.length)},
                                 {"SeriesExponent", "0"},
                                 {"SeriesStart", format_number(cols.series.start)},
                                 {"SeriesStep", format_number(cols.series.step)},
                                 {"SeriesUnit", upper(cols.series.unit)}});
  } else {
    const bool labels = cols.kind == ColumnMapKind::labels;
    w.open("MatrixIndicesMap", {{"AppliesToMatrixDimension", column_dim_text},
                                {"IndicesMapToDataType", std::string(labels ? kLabels : kScalars)}});
    for (const auto& m : cols.named) {
      w.open("NamedMap");
      write_metadata(w, m.metadata);
      w.leaf("MapName", m.name);
      if (labels && m.label_table) {
        w.open("LabelTable");
        for (const auto& [key, e] : *m.label_table) {
          w.leaf("Label", e.name,
                 {{"Key", std::to_string(key)},
                  {"Red", format_number(e.color.r)},
                  {"Green", format_number(e.color.g)},
                  {"Blue", format_number(e.color.b)},
                  {"Alpha", format_number(e.color.a)}});
        }
        w.close();
      }
      w.close();
    }
    w.close();
  }

  w.open("MatrixIndicesMap", {{"AppliesToMatrixDimension", std::to_string(h.models_dimension)},
                              {"IndicesMapToDataType", std::string(kBrainModels)}});
  if (h.models.volume) {
    const auto& g = *h.models.volume;
    w.open("Volume", {{"VolumeDimensions", std::to_string(g.dims[0]) + "," + std::to_string(g.dims[1]) +
                                               "," + std::to_string(g.dims[2])}});
    std::string m;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        if (r || c) m += ' ';
        m += format_number(g.affine(r, c));
      }
    }
    w.leaf("TransformationMatrixVoxelIndicesIJKtoXYZ", m, {{"MeterExponent", "-3"}});
    w.close();
  }
  for (const auto& e : h.models.entries) {
    Attrs attrs{{"IndexOffset", std::to_string(e.index_offset)},
                {"IndexCount", std::to_string(e.index_count)},
                {"ModelType", e.kind == ModelKind::surface ? "CIFTI_MODEL_TYPE_SURFACE"
                                                           : "CIFTI_MODEL_TYPE_VOXELS"},
                {"BrainStructure", e.structure_name}};
    if (e.kind == ModelKind::surface) {
      attrs.emplace_back("SurfaceNumberOfVertices", std::to_string(e.surface_vertex_count));
      w.open("BrainModel", attrs);
      w.leaf("VertexIndices", join_ints(e.vertex_indices));
    } else {
      w.open("BrainModel", attrs);
      std::string text;
      text.reserve(e.voxel_ijk.size() * 12);
      for (std::size_t i = 0; i < e.voxel_ijk.size(); ++i) {
        if (i) text += '\n';
        const auto& v = e.voxel_ijk[i];
        text += std::to_string(v[0]) + ' ' + std::to_string(v[1]) + ' ' + std::to_string(v[2]);
      }
      w.leaf("VoxelIndicesIJK", text);
    }
    w.close();
  }
  w.close();

  for (const auto& raw : h.unknown_elements) {
    std::string chunk = raw;
    while (!chunk.empty() && chunk.back() == '\n') chunk.pop_back();
    w.raw_line(chunk);
  }
  w.close();
  w.close();
  return w.str();
}

const BrainModelEntry& lookup_brain_model(const CiftiXmlHeader& header,
                                          std::string_view structure_name) {
  for (const auto& e : header.models.entries) {
    if (e.structure_name == structure_name) return e;
  }
  std::string available;
  for (const auto& e : header.models.entries) {
    if (!available.empty()) available += ", ";
    available += e.structure_name;
  }
  throw NotFound("brain structure " + std::string(structure_name) + " not present (available: " +
                 available + ")");
}

}  // namespace gxt
