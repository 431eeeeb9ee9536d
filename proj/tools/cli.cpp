#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "gxt/analysis.hpp"
#include "gxt/error.hpp"
#include "gxt/fixtures.hpp"
#include "gxt/gray_io.hpp"
#include "gxt/manip.hpp"
#include "gxt/render.hpp"
#include "gxt/smoothing.hpp"
#include "gxt/surface_ops.hpp"

namespace gxt::cli {
namespace {

namespace fs = std::filesystem;

// Command-line indices are 1-based; everything below them is 0-based.
std::vector<Eigen::Index> to_zero_based(const std::vector<long long>& idx, const char* what) {
  std::vector<Eigen::Index> out;
  for (long long i : idx) {
    if (i < 1) throw IndexError(std::string(what) + " indices start at 1, got " + std::to_string(i));
    out.push_back(static_cast<Eigen::Index>(i - 1));
  }
  return out;
}

ZLim parse_zlim(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw DomainError("--zlim expects LO,HI");
  char* end = nullptr;
  const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
  const double lo = std::strtod(a.c_str(), &end);
  if (a.empty() || *end != '\0') throw DomainError("bad zlim lower bound '" + a + "'");
  const double hi = std::strtod(b.c_str(), &end);
  if (b.empty() || *end != '\0') throw DomainError("bad zlim upper bound '" + b + "'");
  return {lo, hi};
}

std::optional<double> as_number(const std::string& s) {
  if (fs::exists(s)) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') return std::nullopt;
  return v;
}

fs::path suffixed(const fs::path& p, Eigen::Index column) {
  fs::path out = p;
  out.replace_filename(p.stem().string() + "_" + std::to_string(column + 1) + p.extension().string());
  return out;
}

SmoothSurfaces load_surfaces(const std::string& left, const std::string& right, bool synthetic) {
  SmoothSurfaces s;
  if (!left.empty()) s.left = read_surf(left);
  if (!right.empty()) s.right = read_surf(right);
  s.synthetic_sphere = synthetic;
  return s;
}

Eigen::MatrixXd read_tsv_file(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw IoError("cannot open " + p.string());
  return read_tsv(f);
}

void write_tsv_file(const fs::path& p, const Eigen::MatrixXd& m) {
  std::ofstream f(p);
  if (!f) throw IoError("cannot open " + p.string() + " for writing");
  write_tsv(f, m);
}

// Parcel vector plus the data rows it indexes. Without subcortex the
// subcortical parts of both objects are dropped.
ParcelVector parcels_for(const Grayordinates& parc_in, const Grayordinates* data, bool include_subcort, int offset) {
  Grayordinates parc = parc_in;
  if (parc.data.subcort && (!include_subcort || data != nullptr)) parc = remove(parc, Component::subcortex);
  return parc_vector(parc, include_subcort ? data : nullptr, offset);
}

std::vector<Hemisphere> parse_hemis(const std::vector<std::string>& names) {
  std::vector<Hemisphere> out;
  for (const auto& n : names) {
    if (n == "left") out.push_back(Hemisphere::left);
    else if (n == "right") out.push_back(Hemisphere::right);
    else throw DomainError("unknown hemisphere '" + n + "'");
  }
  return out;
}

std::vector<View> parse_views(const std::vector<std::string>& names) {
  std::vector<View> out;
  for (const auto& n : names) {
    if (n == "lateral") out.push_back(View::lateral);
    else if (n == "medial") out.push_back(View::medial);
    else throw DomainError("unknown view '" + n + "'");
  }
  return out;
}

struct ColorOpts {
  std::string zlim, colors;
  void add(CLI::App* s) {
    s->add_option("--zlim", zlim, "Colour limits LO,HI");
    s->add_option("--colors", colors, "Palette name");
  }
  ColorSpec spec() const {
    ColorSpec c;
    c.palette = colors;
    if (!zlim.empty()) c.zlim = parse_zlim(zlim);
    return c;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grayordinate toolkit: CIFTI/GIFTI/NIFTI I/O, processing, analysis and rendering"};
  app.name("gxt");
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);
  std::function<void()> action;

  // info
  std::string in, out_path, outdir, prefix, parc_path;
  auto* info_cmd = app.add_subcommand("info", "Print the summary block of a CIFTI file");
  info_cmd->add_option("input", in)->required();
  info_cmd->callback([&] { action = [&] { out << info(in); }; });

  auto* val_cmd = app.add_subcommand("validate", "Check structural invariants");
  val_cmd->add_option("input", in)->required();
  val_cmd->callback([&] {
    action = [&] {
      const auto problems = validate(read_all_structures(in));
      if (problems.empty()) {
        out << "valid\n";
        return;
      }
      std::string msg = "invalid:";
      for (const auto& p : problems) msg += "\n  " + p;
      throw ConsistencyError(msg);
    };
  });

  std::string encoding = "gzip";
  auto* sep_cmd = app.add_subcommand("separate", "Split a CIFTI file into GIFTI and NIFTI components");
  sep_cmd->add_option("input", in)->required();
  sep_cmd->add_option("--outdir", outdir)->required();
  sep_cmd->add_option("--prefix", prefix);
  sep_cmd->add_option("--encoding", encoding, "GIFTI encoding: ascii, base64, gzip");
  sep_cmd->callback([&] {
    action = [&] {
      auto enc = encoding_from_string(encoding == "gzip" ? "GZipBase64Binary" : encoding == "base64" ? "Base64Binary" : encoding);
      if (!enc) throw DomainError("unknown encoding '" + encoding + "'");
      const auto files = separate(read_all_structures(in), outdir, prefix, *enc);
      for (const auto* p : {&files.cortexL, &files.ROIcortexL, &files.cortexR, &files.ROIcortexR, &files.subcortVol,
                            &files.subcortLabels}) {
        if (*p) out << p->value().string() << '\n';
      }
    };
  });

  SeparatedFiles parts;
  std::string cl, rl, cr, rr, sv, sl, intent_name_opt;
  auto* asm_cmd = app.add_subcommand("assemble", "Build a CIFTI file from separated components");
  asm_cmd->add_option("--cortexL", cl);
  asm_cmd->add_option("--ROIcortexL", rl);
  asm_cmd->add_option("--cortexR", cr);
  asm_cmd->add_option("--ROIcortexR", rr);
  asm_cmd->add_option("--subcortVol", sv);
  asm_cmd->add_option("--subcortLabels", sl);
  asm_cmd->add_option("--intent", intent_name_opt, "dtseries, dscalar or dlabel");
  asm_cmd->add_option("output", out_path)->required();
  asm_cmd->callback([&] {
    action = [&] {
      auto opt = [](const std::string& s) { return s.empty() ? std::optional<fs::path>() : fs::path(s); };
      parts = {opt(cl), opt(rl), opt(cr), opt(rr), opt(sv), opt(sl)};
      std::optional<Intent> it;
      if (!intent_name_opt.empty()) {
        it = intent_from_string(intent_name_opt);
        if (!it) throw DomainError("unknown intent '" + intent_name_opt + "'");
      }
      WriteOptions wo;
      wo.progress = &err;
      write_grayordinates(assemble(parts, it), out_path, wo);
    };
  });

  std::string to_intent;
  ConvertOptions conv;
  auto* conv_cmd = app.add_subcommand("convert", "Change the intent of a CIFTI file");
  conv_cmd->add_option("--to", to_intent, "dtseries, dscalar or dlabel")->required();
  conv_cmd->add_option("--start", conv.series_start);
  conv_cmd->add_option("--step", conv.series_step);
  conv_cmd->add_option("--unit", conv.series_unit);
  conv_cmd->add_option("input", in)->required();
  conv_cmd->add_option("output", out_path)->required();
  conv_cmd->callback([&] {
    action = [&] {
      const auto it = intent_from_string(to_intent);
      if (!it) throw DomainError("unknown intent '" + to_intent + "'");
      write_grayordinates(convert_intent(read_all_structures(in), *it, conv), out_path);
    };
  });

  std::vector<long long> idx;
  auto* sel_cmd = app.add_subcommand("select", "Keep columns (1-based)");
  sel_cmd->add_option("--idx", idx, "Column list, e.g. 1,3,5")->delimiter(',')->required();
  sel_cmd->add_option("input", in)->required();
  sel_cmd->add_option("output", out_path)->required();
  sel_cmd->callback([&] {
    action = [&] { write_grayordinates(select_columns(read_all_structures(in), to_zero_based(idx, "column")), out_path); };
  });

  std::vector<std::string> inputs;
  auto* merge_cmd = app.add_subcommand("merge", "Concatenate columns of files with the same layout");
  merge_cmd->add_option("-o,--output", out_path)->required();
  merge_cmd->add_option("inputs", inputs)->required();
  merge_cmd->callback([&] {
    action = [&] {
      std::vector<Grayordinates> gs;
      for (const auto& p : inputs) gs.push_back(read_all_structures(p));
      write_grayordinates(merge_columns(gs), out_path);
    };
  });

  auto* comb_cmd = app.add_subcommand("combine", "Join files holding disjoint structures");
  comb_cmd->add_option("-o,--output", out_path)->required();
  comb_cmd->add_option("inputs", inputs)->required();
  comb_cmd->callback([&] {
    action = [&] {
      std::vector<Grayordinates> gs;
      for (const auto& p : inputs) gs.push_back(read_all_structures(p));
      write_grayordinates(combine_structures(gs), out_path);
    };
  });

  std::string op, lhs, rhs;
  auto* math_cmd = app.add_subcommand("math", "Elementwise arithmetic: A OP B, either side a file or a number");
  math_cmd->add_option("--op", op, "+ - * / ^ %% %/% == !=")->required();
  math_cmd->add_option("a", lhs)->required();
  math_cmd->add_option("b", rhs)->required();
  math_cmd->add_option("output", out_path)->required();
  math_cmd->callback([&] {
    action = [&] {
      const auto bop = binary_op_from_string(op);
      if (!bop) throw DomainError("unknown operator '" + op + "'");
      const auto na = as_number(lhs), nb = as_number(rhs);
      Grayordinates r;
      if (na && nb) throw DomainError("at least one operand must be a file");
      if (na) r = binary_op(*bop, *na, read_all_structures(rhs));
      else if (nb) r = binary_op(*bop, read_all_structures(lhs), *nb);
      else r = binary_op(*bop, read_all_structures(lhs), read_all_structures(rhs));
      write_grayordinates(r, out_path);
    };
  });

  std::string fn, reducer;
  bool keep_labels = false;
  auto* tr_cmd = app.add_subcommand("transform", "Apply a named function, or reduce across columns");
  auto* fn_opt = tr_cmd->add_option("--fn", fn, "abs, ceiling, exp, floor, log, round, sign, sqrt");
  auto* red_opt = tr_cmd->add_option("--reduce", reducer, "mean, sum, min, max, sd, var, median");
  fn_opt->excludes(red_opt);
  tr_cmd->add_flag("--keep-labels", keep_labels, "Keep dlabel intent when outputs are valid keys");
  tr_cmd->add_option("input", in)->required();
  tr_cmd->add_option("output", out_path)->required();
  tr_cmd->callback([&] {
    action = [&] {
      const Grayordinates g = read_all_structures(in);
      if (!reducer.empty()) {
        const auto r = reducer_from_string(reducer);
        if (!r) throw DomainError("unknown reducer '" + reducer + "'");
        write_grayordinates(apply_across_columns(g, *r), out_path);
        return;
      }
      if (fn.empty()) throw DomainError("transform needs --fn or --reduce");
      TransformReport rep;
      Grayordinates r = named_transform(g, fn, &rep);
      if (keep_labels && g.meta.cifti.intent == Intent::dlabel && rep.demoted_labels) {
        err << "warning: outputs are not keys of the label table; writing dscalar\n";
      }
      if (rep.domain_errors > 0) err << "warning: " << rep.domain_errors << " values outside the domain of " << fn << '\n';
      write_grayordinates(r, out_path);
    };
  });

  std::size_t target = 0;
  auto* rs_cmd = app.add_subcommand("resample", "Resample cortex to an icosphere resolution");
  rs_cmd->add_option("--target", target, "Vertices per hemisphere (10k^2+2)")->required();
  rs_cmd->add_option("input", in)->required();
  rs_cmd->add_option("output", out_path)->required();
  rs_cmd->callback([&] { action = [&] { write_grayordinates(resample_gray(read_all_structures(in), target), out_path); }; });

  SmoothParams sp;
  std::string left_surf, right_surf;
  bool synthetic = false;
  auto* sm_cmd = app.add_subcommand("smooth", "Geodesic surface and per-structure volume Gaussian smoothing");
  sm_cmd->add_option("--surf-fwhm", sp.surf_fwhm, "mm");
  sm_cmd->add_option("--vol-fwhm", sp.vol_fwhm, "mm");
  sm_cmd->add_option("--truncate", sp.truncation_sigmas, "Kernel radius in sigmas");
  sm_cmd->add_option("--left-surf", left_surf);
  sm_cmd->add_option("--right-surf", right_surf);
  sm_cmd->add_flag("--synthetic-sphere", synthetic, "Use an icosphere when no surface is given");
  sm_cmd->add_option("input", in)->required();
  sm_cmd->add_option("output", out_path)->required();
  sm_cmd->callback([&] {
    action = [&] { smooth_file(in, out_path, sp, load_surfaces(left_surf, right_surf, synthetic)); };
  });

  CleanParams cp;
  double scrub_z = 0.0;
  auto* cl_cmd = app.add_subcommand("clean", "DCT highpass nuisance regression and optional scrubbing");
  cl_cmd->add_option("--tr", cp.tr, "Seconds per column")->required();
  cl_cmd->add_option("--highpass", cp.highpass_hz, "Hz");
  auto* scrub_opt = cl_cmd->add_option("--scrub-z", scrub_z, "Flag columns above median + z * MAD of DVARS");
  cl_cmd->add_option("input", in)->required();
  cl_cmd->add_option("output", out_path)->required();
  cl_cmd->callback([&] {
    action = [&] {
      if (scrub_opt->count() > 0) cp.scrub_z = scrub_z;
      const auto res = clean(read_all_structures(in), cp);
      if (res.rank_deficient) err << "warning: design is rank deficient; used the pseudo-inverse\n";
      const auto n_flag = std::count(res.flagged.begin(), res.flagged.end(), true);
      err << res.n_dct << " DCT bases; " << n_flag << " columns scrubbed\n";
      write_grayordinates(res.gray, out_path);
    };
  });

  bool include_subcort = false;
  int offset = 400;
  auto* pm_cmd = app.add_subcommand("parcmean", "Parcel mean timeseries as TSV (one row per parcel)");
  pm_cmd->add_option("--parc", parc_path)->required();
  pm_cmd->add_flag("--include-subcort", include_subcort);
  pm_cmd->add_option("--offset", offset, "Key base for subcortical structures");
  pm_cmd->add_option("input", in)->required();
  pm_cmd->add_option("output", out_path)->required();
  pm_cmd->callback([&] {
    action = [&] {
      Grayordinates data = move_from_mwall(read_all_structures(in));
      if (!include_subcort && data.data.subcort) data = remove(data, Component::subcortex);
      const ParcelVector pv = parcels_for(read_all_structures(parc_path), &data, include_subcort, offset);
      write_tsv_file(out_path, parcel_means(as_matrix(data), pv));
    };
  });

  long long seed = 0;
  bool full_matrix = false;
  auto* sc_cmd = app.add_subcommand("seedcor", "Correlation of each region with a seed region");
  sc_cmd->add_option("--seed", seed, "1-based seed row")->required();
  sc_cmd->add_flag("--matrix", full_matrix, "Write the full correlation matrix instead");
  sc_cmd->add_option("input", in, "Region timeseries TSV")->required();
  sc_cmd->add_option("output", out_path)->required();
  sc_cmd->callback([&] {
    action = [&] {
      const Eigen::MatrixXd ts = read_tsv_file(in);
      const Eigen::Index s = to_zero_based({seed}, "seed").front();
      if (full_matrix) write_tsv_file(out_path, correlation_matrix(ts));
      else write_tsv_file(out_path, seed_correlation(ts, s));
    };
  });

  std::string ref_path;
  long long value_col = 1;
  auto* mv_cmd = app.add_subcommand("mapvals", "Write per-region values to every location as a dscalar");
  mv_cmd->add_option("--parc", parc_path)->required();
  mv_cmd->add_flag("--include-subcort", include_subcort);
  mv_cmd->add_option("--offset", offset);
  mv_cmd->add_option("--ref", ref_path, "CIFTI supplying the subcortical layout");
  mv_cmd->add_option("--column", value_col, "1-based TSV column");
  mv_cmd->add_option("input", in, "Region values TSV")->required();
  mv_cmd->add_option("output", out_path)->required();
  mv_cmd->callback([&] {
    action = [&] {
      const Eigen::MatrixXd vals = read_tsv_file(in);
      const Eigen::Index c = to_zero_based({value_col}, "column").front();
      if (c >= vals.cols()) throw IndexError("TSV has " + std::to_string(vals.cols()) + " columns");
      Grayordinates parc = read_all_structures(parc_path);
      if (parc.data.subcort) parc = remove(parc, Component::subcortex);
      std::optional<Grayordinates> ref;
      if (include_subcort) {
        if (ref_path.empty()) throw DomainError("--include-subcort needs --ref");
        ref = read_all_structures(ref_path);
      }
      const ParcelVector pv = parcels_for(parc, ref ? &*ref : nullptr, include_subcort, offset);
      const Eigen::VectorXd mapped = map_region_values_to_locations(vals.col(c), pv);
      MatrixParts mp;
      Eigen::Index row = 0;
      auto take = [&](const std::optional<Mask>& mask, std::optional<Eigen::MatrixXd>& dst, std::optional<Mask>& dmask) {
        if (!mask) return;
        const auto n_in = std::count(mask->begin(), mask->end(), true);
        Eigen::MatrixXd d(n_in, 1);
        Eigen::Index r = 0;
        for (bool m : *mask) {
          if (m) d(r++, 0) = mapped(row);
          ++row;
        }
        dst = d;
        dmask = mask;
      };
      take(parc.meta.cortex.medial_wall_mask_left, mp.cortex_left, mp.mask_left);
      take(parc.meta.cortex.medial_wall_mask_right, mp.cortex_right, mp.mask_right);
      if (include_subcort) {
        mp.subcort = mapped.tail(mapped.size() - row);
        mp.subcort_meta = ref->meta.subcort;
      }
      Grayordinates g = from_matrices(std::move(mp));
      g.meta.cifti.names = {"mapped"};
      fill_cifti_meta(g, Intent::dscalar);
      write_grayordinates(g, out_path);
    };
  });

  ColorOpts rs_colors;
  std::vector<long long> cols{1};
  std::vector<std::string> hemis, views{"lateral", "medial"};
  std::string title, border_parc;
  bool borders = false, no_colorbar = false;
  int width = 320, height = 240;
  auto* rsf_cmd = app.add_subcommand("render-surface", "Render cortical data to PNG");
  rs_colors.add(rsf_cmd);
  rsf_cmd->add_option("--idx", cols, "1-based columns; one PNG each")->delimiter(',');
  rsf_cmd->add_option("--hemi", hemis, "left,right")->delimiter(',');
  rsf_cmd->add_option("--views", views, "lateral,medial")->delimiter(',');
  rsf_cmd->add_flag("--borders", borders, "Outline parcels (dlabel input or --border-parc)");
  rsf_cmd->add_option("--border-parc", border_parc);
  rsf_cmd->add_option("--left-surf", left_surf);
  rsf_cmd->add_option("--right-surf", right_surf);
  rsf_cmd->add_flag("--synthetic-sphere", synthetic);
  rsf_cmd->add_option("--width", width, "Panel width px");
  rsf_cmd->add_option("--height", height, "Panel height px");
  rsf_cmd->add_option("--title", title);
  rsf_cmd->add_flag("--no-colorbar", no_colorbar);
  rsf_cmd->add_option("--fname", out_path)->required();
  rsf_cmd->add_option("input", in)->required();
  rsf_cmd->callback([&] {
    action = [&] {
      ViewSpec vs;
      vs.hemispheres = parse_hemis(hemis);
      vs.views = parse_views(views);
      vs.columns = to_zero_based(cols, "column");
      vs.panel_width = width;
      vs.panel_height = height;
      vs.title = title;
      vs.borders = borders;
      vs.colorbar = !no_colorbar;
      const Grayordinates g = read_all_structures(in);
      std::optional<Grayordinates> bp;
      if (!border_parc.empty()) bp = read_all_structures(border_parc);
      const auto res = render_surface(g, vs, rs_colors.spec(), load_surfaces(left_surf, right_surf, synthetic),
                                      bp ? &*bp : nullptr);
      if (!res.message.empty()) err << res.message << '\n';
      for (std::size_t i = 0; i < res.images.size(); ++i) {
        const fs::path p = res.images.size() == 1 ? fs::path(out_path) : suffixed(out_path, vs.columns[i]);
        write_png(p, res.images[i]);
        out << p.string() << '\n';
      }
    };
  });

  ColorOpts rv_colors;
  std::string plane = "axial", underlay;
  std::vector<long long> slices;
  long long vol_col = 1;
  int scale = 3, ncol = 0;
  auto* rv_cmd = app.add_subcommand("render-volume", "Render subcortical slices to PNG");
  rv_colors.add(rv_cmd);
  rv_cmd->add_option("--plane", plane, "axial, coronal or sagittal");
  rv_cmd->add_option("--slices", slices, "1-based slice indices")->delimiter(',')->required();
  rv_cmd->add_option("--idx", vol_col, "1-based column");
  rv_cmd->add_option("--underlay", underlay, "NIFTI volume on the data grid");
  rv_cmd->add_option("--scale", scale, "Pixels per voxel");
  rv_cmd->add_option("--ncol", ncol);
  rv_cmd->add_option("--title", title);
  rv_cmd->add_flag("--no-colorbar", no_colorbar);
  rv_cmd->add_option("--fname", out_path)->required();
  rv_cmd->add_option("input", in)->required();
  rv_cmd->callback([&] {
    action = [&] {
      VolumeViewSpec vs;
      const auto pl = plane_from_string(plane);
      if (!pl) throw DomainError("unknown plane '" + plane + "'");
      vs.plane = *pl;
      for (auto s : to_zero_based(slices, "slice")) vs.slices.push_back(s);
      vs.column = to_zero_based({vol_col}, "column").front();
      vs.scale = scale;
      vs.ncol = ncol;
      vs.title = title;
      vs.colorbar = !no_colorbar;
      std::optional<Volume> u;
      if (!underlay.empty()) u = read_volume(underlay);
      const auto res = render_volume(read_all_structures(in), vs, rv_colors.spec(), u ? &*u : nullptr);
      if (!res.message.empty()) err << res.message << '\n';
      write_png(out_path, res.images.front());
      out << out_path << '\n';
    };
  });

  bool pair = false;
  auto* cmp_cmd = app.add_subcommand("compose", "Tile PNG files into one image");
  cmp_cmd->add_option("--ncol", ncol);
  cmp_cmd->add_flag("--pair", pair, "Two columns pairing cortex and subcortex panels");
  cmp_cmd->add_option("--fname", out_path)->required();
  cmp_cmd->add_option("inputs", inputs)->required();
  cmp_cmd->callback([&] {
    action = [&] {
      std::vector<Image> imgs;
      for (const auto& p : inputs) imgs.push_back(read_png(p));
      write_png(out_path, compose_grid(imgs, {ncol, pair}));
    };
  });

  FixtureSizes fsz;
  auto* fx_cmd = app.add_subcommand("gen-fixtures", "Write the synthetic test corpus");
  fx_cmd->add_option("--k", fsz.ico_k, "Icosphere frequency");
  fx_cmd->add_option("--medial-wall", fsz.medial_wall, "Masked vertices per hemisphere");
  fx_cmd->add_option("--columns", fsz.columns);
  fx_cmd->add_option("--seed", fsz.seed);
  fx_cmd->add_option("outdir", outdir)->required();
  fx_cmd->callback([&] {
    action = [&] {
      const auto p = write_fixture_set(make_fixture_set(fsz), outdir);
      for (const auto& f : {p.dtseries, p.parcellation, p.left_sphere, p.right_sphere}) out << f.string() << '\n';
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  try {
    if (action) action();
  } catch (const Error& e) {
    err << "error (" << e.kind() << "): " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error (IoError): " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace gxt::cli
