#include "gxt/common.hpp"

#include <algorithm>
#include <charconv>

#include "gxt/error.hpp"

#ifndef GXT_VERSION_STRING
#define GXT_VERSION_STRING "0.0.0"
#endif

namespace gxt {

const std::string* find_metadata(const MetadataList& md, std::string_view key) {
  for (const auto& [k, v] : md) {
    if (k == key) return &v;
  }
  return nullptr;
}

void set_metadata(MetadataList& md, std::string key, std::string value) {
  for (auto& [k, v] : md) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  md.emplace_back(std::move(key), std::move(value));
}

std::string_view to_string(Hemisphere h) {
  switch (h) {
    case Hemisphere::left: return "left";
    case Hemisphere::right: return "right";
    case Hemisphere::none: break;
  }
  return "none";
}

std::string_view intent_name(Intent intent) {
  switch (intent) {
    case Intent::dtseries: return "dtseries";
    case Intent::dscalar: return "dscalar";
    case Intent::dlabel: return "dlabel";
  }
  return "unknown";
}

std::string_view intent_nifti_name(Intent intent) {
  switch (intent) {
    case Intent::dtseries: return "ConnDenseSeries";
    case Intent::dscalar: return "ConnDenseScalar";
    case Intent::dlabel: return "ConnDenseLabel";
  }
  return "";
}

std::optional<Intent> intent_from_code(int code) {
  switch (code) {
    case 3002: return Intent::dtseries;
    case 3006: return Intent::dscalar;
    case 3007: return Intent::dlabel;
    default: return std::nullopt;
  }
}

std::optional<Intent> intent_from_string(std::string_view name) {
  if (name == "dtseries") return Intent::dtseries;
  if (name == "dscalar") return Intent::dscalar;
  if (name == "dlabel") return Intent::dlabel;
  return std::nullopt;
}

void check_surface(const Surface& s) {
  const auto nv = s.vertex_count();
  if (nv < 3) throw ConsistencyError("surface has fewer than 3 vertices");
  for (Eigen::Index f = 0; f < s.face_count(); ++f) {
    const int a = s.faces(f, 0), b = s.faces(f, 1), c = s.faces(f, 2);
    for (int idx : {a, b, c}) {
      if (idx < 0 || idx >= nv) {
        throw ConsistencyError("face " + std::to_string(f) + " references vertex " +
                               std::to_string(idx) + " outside [0, " +
                               std::to_string(nv) + ")");
      }
    }
    if (a == b || b == c || a == c) {
      throw ConsistencyError("face " + std::to_string(f) + " is degenerate");
    }
  }
}

// Colours follow the FreeSurfer lookup table entries for the matching
// structures.
const std::array<SubcortStructure, kSubcortStructureCount>& subcort_structures() {
  static const std::array<SubcortStructure, kSubcortStructureCount> table{{
      {"Cortex-L", "CIFTI_STRUCTURE_CORTEX_LEFT", {205, 62, 78}},
      {"Cortex-R", "CIFTI_STRUCTURE_CORTEX_RIGHT", {205, 62, 78}},
      {"Accumbens-L", "CIFTI_STRUCTURE_ACCUMBENS_LEFT", {255, 165, 0}},
      {"Accumbens-R", "CIFTI_STRUCTURE_ACCUMBENS_RIGHT", {255, 165, 0}},
      {"Amygdala-L", "CIFTI_STRUCTURE_AMYGDALA_LEFT", {103, 255, 255}},
      {"Amygdala-R", "CIFTI_STRUCTURE_AMYGDALA_RIGHT", {103, 255, 255}},
      {"Brain Stem", "CIFTI_STRUCTURE_BRAIN_STEM", {119, 159, 176}},
      {"Caudate-L", "CIFTI_STRUCTURE_CAUDATE_LEFT", {122, 186, 220}},
      {"Caudate-R", "CIFTI_STRUCTURE_CAUDATE_RIGHT", {122, 186, 220}},
      {"Cerebellum-L", "CIFTI_STRUCTURE_CEREBELLUM_LEFT", {230, 148, 34}},
      {"Cerebellum-R", "CIFTI_STRUCTURE_CEREBELLUM_RIGHT", {230, 148, 34}},
      {"Diencephalon-L", "CIFTI_STRUCTURE_DIENCEPHALON_VENTRAL_LEFT", {165, 42, 42}},
      {"Diencephalon-R", "CIFTI_STRUCTURE_DIENCEPHALON_VENTRAL_RIGHT", {165, 42, 42}},
      {"Hippocampus-L", "CIFTI_STRUCTURE_HIPPOCAMPUS_LEFT", {220, 216, 20}},
      {"Hippocampus-R", "CIFTI_STRUCTURE_HIPPOCAMPUS_RIGHT", {220, 216, 20}},
      {"Pallidum-L", "CIFTI_STRUCTURE_PALLIDUM_LEFT", {12, 48, 255}},
      {"Pallidum-R", "CIFTI_STRUCTURE_PALLIDUM_RIGHT", {13, 48, 255}},
      {"Putamen-L", "CIFTI_STRUCTURE_PUTAMEN_LEFT", {236, 13, 176}},
      {"Putamen-R", "CIFTI_STRUCTURE_PUTAMEN_RIGHT", {236, 13, 176}},
      {"Thalamus-L", "CIFTI_STRUCTURE_THALAMUS_LEFT", {0, 118, 14}},
      {"Thalamus-R", "CIFTI_STRUCTURE_THALAMUS_RIGHT", {0, 118, 14}},
  }};
  return table;
}

std::optional<int> subcort_index_from_cifti(std::string_view cifti_name) {
  const auto& table = subcort_structures();
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].cifti_name == cifti_name) return static_cast<int>(i);
  }
  return std::nullopt;
}

Rgba qualitative_color(std::size_t i) {
  // ColorBrewer "Paired", 12 colours.
  static constexpr std::array<std::array<int, 3>, 12> kCycle{{{166, 206, 227}, {31, 120, 180},
                                                              {178, 223, 138}, {51, 160, 44},
                                                              {251, 154, 153}, {227, 26, 28},
                                                              {253, 191, 111}, {255, 127, 0},
                                                              {202, 178, 214}, {106, 61, 154},
                                                              {255, 255, 153}, {177, 89, 40}}};
  const auto& c = kCycle[i % kCycle.size()];
  return {c[0] / 255.0, c[1] / 255.0, c[2] / 255.0, 1.0};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string_view tool_version() { return GXT_VERSION_STRING; }

}  // namespace gxt
