#include "gxt/gray_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gxt/error.hpp"
#include "gxt/surface_ops.hpp"

namespace gxt {
namespace {

namespace fs = std::filesystem;

const NiftiExtension& cifti_extension(const NiftiContainer& c, const fs::path& path) {
  for (const auto& e : c.extensions) {
    if (e.ecode == kCiftiEcode) return e;
  }
  throw FormatError(path.string() + ": no CIFTI extension (ecode 32); not a CIFTI file");
}

void check_container(const NiftiContainer& c, const CiftiXmlHeader& xml, const fs::path& path) {
  if (c.dims[0] < 6) throw FormatError(path.string() + ": CIFTI container needs 6 or more dimensions");
  for (int i = 1; i <= 4; ++i) {
    if (c.dims[static_cast<std::size_t>(i)] != 1) throw FormatError(path.string() + ": CIFTI dims 1-4 must be 1");
  }
  if (const auto code = intent_from_code(c.intent_code); code && *code != xml.intent) {
    throw ConsistencyError(path.string() + ": NIFTI intent " + std::to_string(c.intent_code) +
                           " disagrees with the XML index maps (" + std::string(intent_name(xml.intent)) + ")");
  } else if (!code && c.intent_code >= 3000 && c.intent_code < 3100) {
    throw UnsupportedIntent(path.string() + ": CIFTI intent code " + std::to_string(c.intent_code) +
                            " is not dtseries, dscalar, or dlabel");
  }
  const std::int64_t n0 = c.dims[5];
  const std::int64_t n1 = c.dims[0] >= 6 ? c.dims[6] : 1;
  const std::int64_t models = xml.models_dimension == 0 ? n0 : n1;
  const std::int64_t cols = xml.models_dimension == 0 ? n1 : n0;
  if (models != xml.models.length()) {
    throw ShapeError(path.string() + ": brain models cover " + std::to_string(xml.models.length()) +
                     " rows but the matrix dimension holds " + std::to_string(models));
  }
  if (cols != xml.columns.length()) {
    throw ShapeError(path.string() + ": column map has " + std::to_string(xml.columns.length()) +
                     " entries but the matrix dimension holds " + std::to_string(cols));
  }
}

std::vector<bool> mask_from_entry(const BrainModelEntry& e) {
  std::vector<bool> m(static_cast<std::size_t>(e.surface_vertex_count), false);
  for (auto i : e.vertex_indices) m[static_cast<std::size_t>(i)] = true;
  return m;
}

std::string available_structures(const CiftiXmlHeader& xml) {
  std::string s;
  for (const auto& e : xml.models.entries) s += (s.empty() ? "" : ", ") + e.structure_name;
  return s;
}

CiftiMeta meta_from_xml(const CiftiXmlHeader& xml) {
  CiftiMeta m;
  m.intent = xml.intent;
  m.misc = xml.misc;
  if (xml.columns.kind == ColumnMapKind::series) {
    m.series = xml.columns.series;
  } else {
    for (const auto& nm : xml.columns.named) {
      m.names.push_back(nm.name);
      if (xml.columns.kind == ColumnMapKind::labels) m.label_tables.push_back(nm.label_table.value_or(LabelTable{}));
    }
  }
  return m;
}

struct SubcortVoxel {
  std::int64_t linear;
  int label;
  std::int64_t row;
};

}  // namespace

BrainStructures BrainStructures::parse(std::string_view text) {
  BrainStructures b{false, false, false};
  std::string item;
  auto flush = [&] {
    if (item.empty()) return;
    if (item == "all") b = all();
    else if (item == "left") b.left = true;
    else if (item == "right") b.right = true;
    else if (item == "subcortical" || item == "subcortex" || item == "sub") b.subcortex = true;
    else throw DomainError("unknown brain structure '" + item + "' (use left, right, subcortical, all)");
    item.clear();
  };
  for (char ch : text) {
    if (ch == ',' || ch == ' ') flush();
    else item += ch;
  }
  flush();
  if (!b.left && !b.right && !b.subcortex) throw DomainError("no brain structures requested");
  return b;
}

fs::path cifti_stem(const fs::path& path) {
  std::string s = path.string();
  for (std::string_view suf : {".dtseries.nii", ".dscalar.nii", ".dlabel.nii", ".nii.gz", ".nii"}) {
    if (s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0) {
      s.resize(s.size() - suf.size());
      break;
    }
  }
  return s;
}

CiftiLayout read_cifti_layout(const fs::path& path) {
  CiftiLayout out;
  out.container = read_container_header(path);
  const auto& ext = cifti_extension(out.container, path);
  out.xml = parse_cifti_xml(std::span<const std::uint8_t>(ext.payload));
  check_container(out.container, out.xml, path);
  return out;
}

Grayordinates read_grayordinates(const fs::path& path, const ReadOptions& options) {
  const NiftiFile file = read_container(path);
  const auto& ext = cifti_extension(file.header, path);
  const CiftiXmlHeader xml = parse_cifti_xml(std::span<const std::uint8_t>(ext.payload));
  check_container(file.header, xml, path);

  const std::vector<double> vals = file.values();
  const std::int64_t n0 = file.header.dims[5];
  const std::int64_t ncol = xml.columns.length();
  auto at = [&](std::int64_t row, std::int64_t col) {
    return xml.models_dimension == 1 ? vals[static_cast<std::size_t>(col + n0 * row)]
                                     : vals[static_cast<std::size_t>(row + n0 * col)];
  };
  auto block = [&](const BrainModelEntry& e) {
    Eigen::MatrixXd m(e.index_count, ncol);
    for (std::int64_t r = 0; r < e.index_count; ++r)
      for (std::int64_t c = 0; c < ncol; ++c) m(r, c) = at(e.index_offset + r, c);
    return m;
  };

  Grayordinates g;
  auto read_cortex = [&](std::string_view name, const char* side, std::optional<Eigen::MatrixXd>& data,
                         std::optional<Mask>& mask) {
    const BrainModelEntry* e = nullptr;
    for (const auto& entry : xml.models.entries) {
      if (entry.structure_name == name) e = &entry;
    }
    if (e == nullptr) {
      throw NotFound(path.string() + ": " + side + " cortex requested but absent (available: " +
                     available_structures(xml) + ")");
    }
    if (e->kind != ModelKind::surface) throw FormatError(std::string(side) + " cortex is not a surface model");
    data = block(*e);
    mask = mask_from_entry(*e);
  };
  if (options.structures.left) {
    read_cortex(kCortexLeft, "left", g.data.cortex_left, g.meta.cortex.medial_wall_mask_left);
  }
  if (options.structures.right) {
    read_cortex(kCortexRight, "right", g.data.cortex_right, g.meta.cortex.medial_wall_mask_right);
  }
  if (options.structures.subcortex) {
    std::vector<SubcortVoxel> voxels;
    for (const auto& e : xml.models.entries) {
      if (e.kind != ModelKind::voxels) continue;
      const auto idx = subcort_index_from_cifti(e.structure_name);
      if (!idx || *idx < 2) {
        throw FormatError(path.string() + ": voxel model with unsupported structure " + e.structure_name);
      }
      for (std::int64_t r = 0; r < e.index_count; ++r) {
        const auto& ijk = e.voxel_ijk[static_cast<std::size_t>(r)];
        voxels.push_back({xml.models.volume->linear_index(ijk[0], ijk[1], ijk[2]), *idx, e.index_offset + r});
      }
    }
    if (voxels.empty()) {
      throw NotFound(path.string() + ": subcortex requested but absent (available: " + available_structures(xml) + ")");
    }
    // Rows are kept in spatial order (i fastest) so the mask alone unmasks them.
    std::sort(voxels.begin(), voxels.end(), [](const auto& a, const auto& b) { return a.linear < b.linear; });
    SubcortMeta sm;
    sm.grid = *xml.models.volume;
    sm.mask.assign(static_cast<std::size_t>(sm.grid.voxel_count()), false);
    Eigen::MatrixXd d(static_cast<Eigen::Index>(voxels.size()), ncol);
    for (std::size_t i = 0; i < voxels.size(); ++i) {
      if (i > 0 && voxels[i].linear == voxels[i - 1].linear) {
        throw ConsistencyError(path.string() + ": a voxel appears in two brain models");
      }
      sm.mask[static_cast<std::size_t>(voxels[i].linear)] = true;
      sm.labels.push_back(voxels[i].label);
      for (std::int64_t c = 0; c < ncol; ++c) d(static_cast<Eigen::Index>(i), c) = at(voxels[i].row, c);
    }
    g.data.subcort = std::move(d);
    g.meta.subcort = std::move(sm);
  }
  g.meta.cifti = meta_from_xml(xml);

  if (options.surf_left) g = add_surf(g, read_surf(*options.surf_left), Hemisphere::left);
  if (options.surf_right) g = add_surf(g, read_surf(*options.surf_right), Hemisphere::right);
  if (options.resample_to) g = resample_gray(g, *options.resample_to);
  return g;
}

namespace {

CiftiXmlHeader build_xml(const Grayordinates& g, Intent intent, std::vector<Eigen::Index>& subcort_order) {
  CiftiXmlHeader h;
  h.intent = intent;
  h.misc = g.meta.cifti.misc;
  h.models_dimension = 1;
  std::int64_t offset = 0;
  auto add_cortex = [&](std::string_view name, const Mask& mask) {
    BrainModelEntry e;
    e.structure_name = std::string(name);
    e.kind = ModelKind::surface;
    e.index_offset = offset;
    e.surface_vertex_count = static_cast<std::int64_t>(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) e.vertex_indices.push_back(static_cast<std::int64_t>(i));
    }
    e.index_count = static_cast<std::int64_t>(e.vertex_indices.size());
    offset += e.index_count;
    h.models.entries.push_back(std::move(e));
  };
  if (g.data.cortex_left) add_cortex(kCortexLeft, *g.meta.cortex.medial_wall_mask_left);
  if (g.data.cortex_right) add_cortex(kCortexRight, *g.meta.cortex.medial_wall_mask_right);
  if (g.data.subcort) {
    const auto& sm = *g.meta.subcort;
    h.models.volume = sm.grid;
    std::vector<std::array<std::int64_t, 3>> ijk;
    const auto nx = sm.grid.dims[0], ny = sm.grid.dims[1];
    for (std::size_t lin = 0; lin < sm.mask.size(); ++lin) {
      if (!sm.mask[lin]) continue;
      const auto l = static_cast<std::int64_t>(lin);
      ijk.push_back({l % nx, (l / nx) % ny, l / (nx * ny)});
    }
    // Grouped by structure in vocabulary order, spatial order within each.
    const auto& vocab = subcort_structures();
    for (std::size_t s = 2; s < vocab.size(); ++s) {
      BrainModelEntry e;
      e.structure_name = std::string(vocab[s].cifti_name);
      e.kind = ModelKind::voxels;
      e.index_offset = offset;
      for (std::size_t r = 0; r < sm.labels.size(); ++r) {
        if (sm.labels[r] != static_cast<int>(s)) continue;
        e.voxel_ijk.push_back(ijk[r]);
        subcort_order.push_back(static_cast<Eigen::Index>(r));
      }
      e.index_count = static_cast<std::int64_t>(e.voxel_ijk.size());
      if (e.index_count == 0) continue;
      offset += e.index_count;
      h.models.entries.push_back(std::move(e));
    }
  }

  const auto& c = g.meta.cifti;
  if (intent == Intent::dtseries) {
    h.columns.kind = ColumnMapKind::series;
    h.columns.series = c.series.value_or(SeriesMap{});
    h.columns.series.length = g.cols();
  } else {
    h.columns.kind = intent == Intent::dlabel ? ColumnMapKind::labels : ColumnMapKind::scalars;
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      NamedMap nm;
      nm.name = static_cast<std::size_t>(j) < c.names.size() ? c.names[static_cast<std::size_t>(j)] : "";
      if (intent == Intent::dlabel) nm.label_table = c.label_tables.at(static_cast<std::size_t>(j));
      h.columns.named.push_back(std::move(nm));
    }
  }
  return h;
}

}  // namespace

void write_grayordinates(const Grayordinates& input, const fs::path& path, const WriteOptions& options) {
  require_valid(input);
  Grayordinates g = input;
  const Intent intent = g.meta.cifti.intent.value_or(Intent::dscalar);
  if (g.meta.cifti.intent != intent || (intent == Intent::dlabel && g.meta.cifti.label_tables.empty()) ||
      (intent != Intent::dtseries && g.meta.cifti.names.size() != static_cast<std::size_t>(g.cols()))) {
    fill_cifti_meta(g, intent);
  }
  require_valid(g);

  auto say = [&](const char* line) {
    if (options.progress != nullptr) *options.progress << line << "\n";
  };
  if (g.data.cortex_left) say("Writing left cortex.");
  if (g.data.cortex_right) say("Writing right cortex.");
  if (g.data.subcort) say("Writing subcortical data and labels.");
  say("Creating CIFTI file from separated components.");

  std::vector<Eigen::Index> subcort_order;
  const CiftiXmlHeader xml = build_xml(g, intent, subcort_order);
  const std::string text = serialize_cifti_xml(xml);

  NiftiContainer c;
  const auto rows = g.rows();
  const auto cols = g.cols();
  c.dims = {6, 1, 1, 1, 1, cols, rows, 1};
  c.datatype = intent == Intent::dlabel ? Datatype::int32 : Datatype::float32;
  c.intent_code = static_cast<int>(intent);
  c.intent_name = std::string(intent_nifti_name(intent));
  c.pixdim = {1, 1, 1, 1, 1, 1, 1, 1};
  if (intent == Intent::dtseries) c.pixdim[5] = xml.columns.series.step;
  NiftiExtension ext;
  ext.ecode = kCiftiEcode;
  ext.payload.assign(text.begin(), text.end());
  c.extensions.push_back(std::move(ext));

  std::vector<double> data(static_cast<std::size_t>(rows * cols));
  Eigen::Index r = 0;
  auto put_rows = [&](const Eigen::MatrixXd& m, const std::vector<Eigen::Index>* order) {
    const Eigen::Index n = order != nullptr ? static_cast<Eigen::Index>(order->size()) : m.rows();
    for (Eigen::Index i = 0; i < n; ++i, ++r) {
      const Eigen::Index src = order != nullptr ? (*order)[static_cast<std::size_t>(i)] : i;
      for (Eigen::Index j = 0; j < cols; ++j) data[static_cast<std::size_t>(j + cols * r)] = m(src, j);
    }
  };
  if (g.data.cortex_left) put_rows(*g.data.cortex_left, nullptr);
  if (g.data.cortex_right) put_rows(*g.data.cortex_right, nullptr);
  if (g.data.subcort) put_rows(*g.data.subcort, &subcort_order);
  write_container(path, std::move(c), data);

  const fs::path stem = cifti_stem(path);
  if (g.surf.left) write_surf(options.surf_left.value_or(fs::path(stem.string() + ".L.surf.gii")), *g.surf.left);
  if (g.surf.right) write_surf(options.surf_right.value_or(fs::path(stem.string() + ".R.surf.gii")), *g.surf.right);
}

std::string info(const fs::path& path) {
  const CiftiLayout layout = read_cifti_layout(path);
  const auto& xml = layout.xml;
  SummaryFacts f;
  f.intent = xml.intent;
  f.columns = xml.columns.length();
  if (xml.columns.kind == ColumnMapKind::series) f.series = xml.columns.series;
  for (const auto& nm : xml.columns.named) f.names.push_back(nm.name);
  std::array<std::int64_t, kSubcortStructureCount> counts{};
  bool any_voxels = false;
  for (const auto& e : xml.models.entries) {
    if (e.kind == ModelKind::surface) {
      SummaryFacts::Cortex c{e.index_count, e.surface_vertex_count};
      if (e.structure_name == kCortexLeft) f.left = c;
      if (e.structure_name == kCortexRight) f.right = c;
    } else if (const auto idx = subcort_index_from_cifti(e.structure_name)) {
      counts[static_cast<std::size_t>(*idx)] += e.index_count;
      any_voxels = true;
    }
  }
  if (any_voxels) f.subcort = counts;
  std::string out = format_summary(f);
  for (const auto& w : xml.warnings) out += "warning: " + w + "\n";
  return out;
}

SeparatedFiles separate(const Grayordinates& g, const fs::path& outdir, const std::string& prefix,
                        GiftiEncoding encoding) {
  require_valid(g);
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create " + outdir.string() + ": " + ec.message());
  SeparatedFiles out;
  const bool labels = g.meta.cifti.intent == Intent::dlabel;
  std::optional<LabelTable> table;
  if (labels) {
    table = LabelTable{};
    for (const auto& t : g.meta.cifti.label_tables) table->insert(t.begin(), t.end());
  }
  const Grayordinates full = move_from_mwall(g, 0.0);
  const std::string data_suffix = labels ? ".label.gii" : ".func.gii";
  auto write_side = [&](Hemisphere h, const char* tag, std::optional<fs::path>& data_path,
                        std::optional<fs::path>& roi_path) {
    const auto& d = h == Hemisphere::left ? full.data.cortex_left : full.data.cortex_right;
    if (!d) return;
    const auto& mask = h == Hemisphere::left ? g.meta.cortex.medial_wall_mask_left : g.meta.cortex.medial_wall_mask_right;
    data_path = outdir / (prefix + "cortex" + tag + data_suffix);
    roi_path = outdir / (prefix + "ROIcortex" + tag + ".func.gii");
    write_gifti_columns(*data_path, *d, g.meta.cifti.names, table, h,
                        labels ? GiftiIntent::label : GiftiIntent::metric, encoding);
    Eigen::MatrixXd roi(static_cast<Eigen::Index>(mask->size()), 1);
    for (std::size_t i = 0; i < mask->size(); ++i) roi(static_cast<Eigen::Index>(i), 0) = (*mask)[i] ? 1.0 : 0.0;
    write_gifti_columns(*roi_path, roi, {}, std::nullopt, h, GiftiIntent::roi, encoding);
  };
  write_side(Hemisphere::left, "L", out.cortexL, out.ROIcortexL);
  write_side(Hemisphere::right, "R", out.cortexR, out.ROIcortexR);

  if (g.data.subcort) {
    const auto& sm = *g.meta.subcort;
    const auto& d = *g.data.subcort;
    const auto nvox = static_cast<std::size_t>(sm.grid.voxel_count());
    Volume vol;
    vol.grid = sm.grid;
    vol.frames = d.cols();
    vol.values.assign(nvox * static_cast<std::size_t>(d.cols()), 0.0);
    Volume lab;
    lab.grid = sm.grid;
    lab.values.assign(nvox, 0.0);
    Eigen::Index r = 0;
    for (std::size_t lin = 0; lin < nvox; ++lin) {
      if (!sm.mask[lin]) continue;
      for (Eigen::Index c = 0; c < d.cols(); ++c) vol.values[lin + nvox * static_cast<std::size_t>(c)] = d(r, c);
      lab.values[lin] = sm.labels[static_cast<std::size_t>(r)] + 1;
      ++r;
    }
    out.subcortVol = outdir / (prefix + "subcortVol.nii");
    out.subcortLabels = outdir / (prefix + "subcortLabels.nii");
    write_volume(*out.subcortVol, vol, labels ? Datatype::int32 : Datatype::float32);

    // Key -> name and colour, for tools that do not know the vocabulary.
    std::ostringstream tsv;
    tsv << "key\tname\tred\tgreen\tblue\n";
    const auto& vocab = subcort_structures();
    for (std::size_t s = 0; s < vocab.size(); ++s) {
      tsv << s + 1 << '\t' << vocab[s].cifti_name << '\t' << int(vocab[s].color[0]) << '\t' << int(vocab[s].color[1])
          << '\t' << int(vocab[s].color[2]) << '\n';
    }
    NiftiExtension ext;
    ext.ecode = kCommentEcode;
    const std::string t = tsv.str();
    ext.payload.assign(t.begin(), t.end());
    write_volume(*out.subcortLabels, lab, Datatype::int32, {ext});
  }
  return out;
}

SeparatedFiles separate(const fs::path& cifti, const fs::path& outdir, const std::string& prefix) {
  ReadOptions opt;
  const CiftiLayout layout = read_cifti_layout(cifti);
  opt.structures = {false, false, false};
  for (const auto& e : layout.xml.models.entries) {
    if (e.structure_name == kCortexLeft) opt.structures.left = true;
    else if (e.structure_name == kCortexRight) opt.structures.right = true;
    else if (e.kind == ModelKind::voxels) opt.structures.subcortex = true;
  }
  return separate(read_grayordinates(cifti, opt), outdir, prefix);
}

Grayordinates assemble(const SeparatedFiles& files, std::optional<Intent> intent) {
  MatrixParts parts;
  std::optional<LabelTable> table;
  std::vector<std::string> names;
  auto load_side = [&](const std::optional<fs::path>& data_path, const std::optional<fs::path>& roi_path,
                       std::optional<Eigen::MatrixXd>& data, std::optional<Mask>& mask) {
    if (!data_path) {
      if (roi_path) throw ShapeError("ROI given without cortical data: " + roi_path->string());
      return;
    }
    GiftiColumns cols = read_gifti_columns(*data_path);
    if (cols.label_table && !table) table = cols.label_table;
    if (names.empty()) names = cols.names;
    Mask m(static_cast<std::size_t>(cols.values.rows()), true);
    if (roi_path) {
      const GiftiColumns roi = read_gifti_columns(*roi_path);
      if (roi.values.rows() != cols.values.rows()) {
        throw ShapeError(roi_path->string() + " has " + std::to_string(roi.values.rows()) + " vertices but " +
                         data_path->string() + " has " + std::to_string(cols.values.rows()));
      }
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = roi.values(static_cast<Eigen::Index>(i), 0) != 0.0;
    }
    const auto keep = std::count(m.begin(), m.end(), true);
    Eigen::MatrixXd d(keep, cols.values.cols());
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i]) d.row(r++) = cols.values.row(static_cast<Eigen::Index>(i));
    }
    data = std::move(d);
    mask = std::move(m);
  };
  load_side(files.cortexL, files.ROIcortexL, parts.cortex_left, parts.mask_left);
  load_side(files.cortexR, files.ROIcortexR, parts.cortex_right, parts.mask_right);

  if (files.subcortVol || files.subcortLabels) {
    if (!files.subcortVol || !files.subcortLabels) {
      throw ShapeError("subcortical data and labels must be given together");
    }
    const Volume vol = read_volume(*files.subcortVol);
    const Volume lab = read_volume(*files.subcortLabels);
    if (vol.grid.dims != lab.grid.dims) throw ShapeError("subcortical data and label volumes differ in extent");
    SubcortMeta sm;
    sm.grid = lab.grid;
    const auto nvox = static_cast<std::size_t>(sm.grid.voxel_count());
    sm.mask.assign(nvox, false);
    std::vector<std::size_t> lins;
    for (std::size_t lin = 0; lin < nvox; ++lin) {
      const double l = lab.values[lin];
      if (l == 0.0) continue;
      const int idx = static_cast<int>(std::llround(l)) - 1;
      if (idx < 2 || idx >= static_cast<int>(kSubcortStructureCount)) {
        throw FormatError(files.subcortLabels->string() + ": label value " + format_number(l) +
                          " is not a subcortical structure");
      }
      sm.mask[lin] = true;
      sm.labels.push_back(idx);
      lins.push_back(lin);
    }
    Eigen::MatrixXd d(static_cast<Eigen::Index>(lins.size()), vol.frames);
    for (std::size_t r = 0; r < lins.size(); ++r)
      for (std::int64_t c = 0; c < vol.frames; ++c)
        d(static_cast<Eigen::Index>(r), c) = vol.values[lins[r] + nvox * static_cast<std::size_t>(c)];
    parts.subcort = std::move(d);
    parts.subcort_meta = std::move(sm);
  }
  Grayordinates g = from_matrices(std::move(parts));
  if (intent) {
    const bool named = std::any_of(names.begin(), names.end(), [](const auto& s) { return !s.empty(); });
    if (*intent != Intent::dtseries && named && names.size() == static_cast<std::size_t>(g.cols())) {
      g.meta.cifti.names = names;
    }
    if (*intent == Intent::dlabel && table) g.meta.cifti.label_tables.assign(static_cast<std::size_t>(g.cols()), *table);
    fill_cifti_meta(g, *intent);
  }
  return g;
}

BrainStructures structures_in(const CiftiLayout& layout) {
  BrainStructures b{false, false, false};
  for (const auto& e : layout.xml.models.entries) {
    if (e.structure_name == kCortexLeft) b.left = true;
    else if (e.structure_name == kCortexRight) b.right = true;
    else if (e.kind == ModelKind::voxels) b.subcortex = true;
  }
  return b;
}

Grayordinates read_all_structures(const std::filesystem::path& path) {
  ReadOptions opt;
  opt.structures = structures_in(read_cifti_layout(path));
  return read_grayordinates(path, opt);
}

}  // namespace gxt
