#include <doctest.h>

#include <numeric>

#include "gxt/cifti_xml.hpp"
#include "gxt/error.hpp"

using namespace gxt;

namespace {

std::string vertex_list(std::int64_t total, std::int64_t skip_every) {
  std::string s;
  for (std::int64_t i = 0; i < total; ++i) {
    if (skip_every > 0 && i % skip_every == 0) continue;
    s += std::to_string(i) + " ";
  }
  return s;
}

const char* kHandXml = R"(<?xml version="1.0" encoding="UTF-8"?>
<CIFTI Version="2">
  <Matrix>
    <MetaData><MD><Name>ScanLocation</Name><Value>Candy Land</Value></MD></MetaData>
    <MatrixIndicesMap AppliesToMatrixDimension="0" IndicesMapToDataType="CIFTI_INDEX_TYPE_SERIES"
        NumberOfSeriesPoints="3" SeriesExponent="0" SeriesStart="0" SeriesStep="720" SeriesUnit="SECOND"/>
    <MatrixIndicesMap AppliesToMatrixDimension="1" IndicesMapToDataType="CIFTI_INDEX_TYPE_BRAIN_MODELS">
      <Volume VolumeDimensions="4,4,4">
        <TransformationMatrixVoxelIndicesIJKtoXYZ MeterExponent="-3">
          -2 0 0 90 0 2 0 -126 0 0 2 -72 0 0 0 1
        </TransformationMatrixVoxelIndicesIJKtoXYZ>
      </Volume>
      <BrainModel IndexOffset="0" IndexCount="4" ModelType="CIFTI_MODEL_TYPE_SURFACE"
          BrainStructure="CIFTI_STRUCTURE_CORTEX_LEFT" SurfaceNumberOfVertices="6">
        <VertexIndices>0 1 3 5</VertexIndices>
      </BrainModel>
      <BrainModel IndexOffset="4" IndexCount="2" ModelType="CIFTI_MODEL_TYPE_VOXELS"
          BrainStructure="CIFTI_STRUCTURE_BRAIN_STEM">
        <VoxelIndicesIJK>1 1 1
 2 1 1</VoxelIndicesIJK>
      </BrainModel>
    </MatrixIndicesMap>
  </Matrix>
</CIFTI>
)";

CiftiXmlHeader two_structure(std::int64_t n1, std::int64_t n2) {
  CiftiXmlHeader h;
  h.intent = Intent::dscalar;
  h.columns.kind = ColumnMapKind::scalars;
  h.columns.named = {NamedMap{"a", {}, std::nullopt}};
  BrainModelEntry l{std::string(kCortexLeft), ModelKind::surface, 0, n1, n1 + 3, {}, {}};
  l.vertex_indices.resize(static_cast<std::size_t>(n1));
  std::iota(l.vertex_indices.begin(), l.vertex_indices.end(), 0);
  BrainModelEntry r{std::string(kCortexRight), ModelKind::surface, n1, n2, n2, {}, {}};
  r.vertex_indices.resize(static_cast<std::size_t>(n2));
  std::iota(r.vertex_indices.begin(), r.vertex_indices.end(), 0);
  h.models.entries = {l, r};
  return h;
}

}  // namespace

TEST_SUITE("cifti_xml") {
  TEST_CASE("hand-written dtseries header parses") {
    const auto h = parse_cifti_xml(std::string_view(kHandXml));
    CHECK(h.intent == Intent::dtseries);
    CHECK(h.models_dimension == 1);
    CHECK(h.columns.kind == ColumnMapKind::series);
    CHECK(h.columns.series.length == 3);
    CHECK(h.columns.series.step == doctest::Approx(720.0));
    CHECK(h.columns.series.unit == "second");
    REQUIRE(h.models.entries.size() == 2);
    const auto& l = lookup_brain_model(h, kCortexLeft);
    CHECK(l.surface_vertex_count == 6);
    CHECK(l.vertex_indices == std::vector<std::int64_t>{0, 1, 3, 5});
    const auto& bs = lookup_brain_model(h, "CIFTI_STRUCTURE_BRAIN_STEM");
    CHECK(bs.index_offset == 4);
    REQUIRE(bs.voxel_ijk.size() == 2);
    CHECK(bs.voxel_ijk[1] == std::array<std::int64_t, 3>{2, 1, 1});
    REQUIRE(h.models.volume.has_value());
    CHECK(h.models.volume->dims == std::array<std::int64_t, 3>{4, 4, 4});
    CHECK(h.models.volume->affine(0, 0) == -2.0);
    CHECK(h.misc.size() == 1);
    CHECK(h.misc[0].second == "Candy Land");
  }

  TEST_CASE("left cortex with the standard counts omits 2796 vertices") {
    CiftiXmlHeader h = two_structure(29696, 29716);
    // Rebuild the left entry over 32492 vertices with 2796 gaps.
    auto& l = h.models.entries[0];
    l.surface_vertex_count = 32492;
    l.vertex_indices.clear();
    for (std::int64_t i = 0, skipped = 0; i < 32492; ++i) {
      if (skipped < 2796 && i % 11 == 0) {
        ++skipped;
        continue;
      }
      l.vertex_indices.push_back(i);
    }
    REQUIRE(l.vertex_indices.size() == 29696);
    h.models.entries[1].surface_vertex_count = 32492;
    const auto back = parse_cifti_xml(serialize_cifti_xml(h));
    const auto& lb = lookup_brain_model(back, kCortexLeft);
    CHECK(lb.surface_vertex_count - lb.index_count == 2796);
    CHECK(lookup_brain_model(back, kCortexRight).index_count == 29716);
    CHECK(back == h);
  }

  TEST_CASE("all 21 structure names are known and Brain Stem is one of them") {
    CHECK(subcort_structures().size() == 21);
    CHECK(subcort_index_from_cifti("CIFTI_STRUCTURE_BRAIN_STEM").value() == 6);
    CHECK(subcort_structures()[6].short_name == "Brain Stem");
  }

  TEST_CASE("serialize then parse is the identity") {
    const auto h = parse_cifti_xml(std::string_view(kHandXml));
    const auto again = parse_cifti_xml(serialize_cifti_xml(h));
    CHECK(again == h);
  }

  TEST_CASE("misc metadata survives") {
    auto h = two_structure(3, 2);
    h.misc.emplace_back("ScanLocation", "Candy Land");
    CHECK(parse_cifti_xml(serialize_cifti_xml(h)).misc == h.misc);
  }

  TEST_CASE("401-key label table is preserved") {
    auto h = two_structure(3, 2);
    h.intent = Intent::dlabel;
    h.columns.kind = ColumnMapKind::labels;
    LabelTable t;
    for (int k = 0; k <= 400; ++k) {
      t.emplace(k, LabelEntry{"L" + std::to_string(k), {k / 400.0, 0.5, 1.0 - k / 400.0, 1.0}});
    }
    h.columns.named = {NamedMap{"parcels", {}, t}};
    const auto back = parse_cifti_xml(serialize_cifti_xml(h));
    REQUIRE(back.columns.named.size() == 1);
    CHECK(back.columns.named[0].label_table == t);
  }

  TEST_CASE("absent structure raises NotFound") {
    const auto h = two_structure(3, 2);
    CHECK_THROWS_AS(lookup_brain_model(h, "CIFTI_STRUCTURE_THALAMUS_LEFT"), NotFound);
  }

  TEST_CASE("two structures tile from zero") {
    const auto h = parse_cifti_xml(serialize_cifti_xml(two_structure(7, 5)));
    CHECK(h.models.entries[0].index_offset == 0);
    CHECK(h.models.entries[1].index_offset == 7);
    CHECK(h.models.length() == 12);
  }

  TEST_CASE("invariant violations are rejected") {
    auto gap = two_structure(3, 2);
    gap.models.entries[1].index_offset = 4;
    CHECK_THROWS_AS(check_cifti_header(gap), ConsistencyError);

    auto dup = two_structure(3, 2);
    dup.models.entries[1].structure_name = std::string(kCortexLeft);
    CHECK_THROWS_AS(check_cifti_header(dup), ConsistencyError);

    auto unsorted = two_structure(3, 2);
    std::swap(unsorted.models.entries[0].vertex_indices[0], unsorted.models.entries[0].vertex_indices[1]);
    CHECK_THROWS_AS(check_cifti_header(unsorted), ConsistencyError);

    auto range = two_structure(3, 2);
    range.models.entries[1].vertex_indices[1] = 2;
    CHECK_THROWS_AS(check_cifti_header(range), ConsistencyError);

    auto step = parse_cifti_xml(std::string_view(kHandXml));
    step.columns.series.step = 0;
    CHECK_THROWS_AS(serialize_cifti_xml(step), ConsistencyError);
  }

  TEST_CASE("malformed XML raises XmlError") {
    CHECK_THROWS_AS(parse_cifti_xml(std::string_view("<CIFTI Version=\"2\"><Matrix>")), XmlError);
  }

  TEST_CASE("unknown matrix children are kept") {
    std::string xml = kHandXml;
    xml.insert(xml.find("</Matrix>"), "<Extra a=\"1\">text</Extra>\n");
    const auto h = parse_cifti_xml(std::string_view(xml));
    REQUIRE(h.unknown_elements.size() == 1);
    CHECK(parse_cifti_xml(serialize_cifti_xml(h)).unknown_elements == h.unknown_elements);
  }

  TEST_CASE("vertex list helper sanity") { CHECK(vertex_list(4, 2) == "1 3 "); }
}
