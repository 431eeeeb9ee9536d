#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "gxt/gifti.hpp"
#include "gxt/grayordinates.hpp"

namespace gxt {

struct BrainStructures {
  bool left = true;
  bool right = true;
  bool subcortex = false;

  static BrainStructures all() { return {true, true, true}; }
  /// Comma list of left, right, subcortical (or "all").
  static BrainStructures parse(std::string_view text);
};

struct ReadOptions {
  BrainStructures structures;
  std::optional<std::filesystem::path> surf_left;
  std::optional<std::filesystem::path> surf_right;
  /// Resample cortex to this many vertices per hemisphere after reading.
  std::optional<std::size_t> resample_to;
};

/// Reads a dtseries/dscalar/dlabel CIFTI file.
Grayordinates read_grayordinates(const std::filesystem::path& path, const ReadOptions& options = {});

/// Builds the container header and XML without touching any data.
struct CiftiLayout {
  NiftiContainer container;
  CiftiXmlHeader xml;
};
CiftiLayout read_cifti_layout(const std::filesystem::path& path);

/// Structures present in a file's brain models.
BrainStructures structures_in(const CiftiLayout& layout);
/// Reads every structure the file holds.
Grayordinates read_all_structures(const std::filesystem::path& path);

struct WriteOptions {
  /// Surface outputs; defaults are derived from the CIFTI name when the
  /// object carries surfaces.
  std::optional<std::filesystem::path> surf_left;
  std::optional<std::filesystem::path> surf_right;
  /// Receives progress lines when set.
  std::ostream* progress = nullptr;
};

/// Validates, then writes CIFTI (float32, or int32 for dlabel) plus any
/// attached surfaces. Objects without an intent are written as dscalar.
void write_grayordinates(const Grayordinates& g, const std::filesystem::path& path,
                         const WriteOptions& options = {});

/// Summary of a CIFTI file from its header and XML only.
std::string info(const std::filesystem::path& path);

struct SeparatedFiles {
  std::optional<std::filesystem::path> cortexL, ROIcortexL, cortexR, ROIcortexR;
  std::optional<std::filesystem::path> subcortVol, subcortLabels;
};

/// Writes cortexL/ROIcortexL/cortexR/ROIcortexR GIFTIs (data zero-padded
/// to full resolution) and subcortVol/subcortLabels NIFTIs into `outdir`.
SeparatedFiles separate(const Grayordinates& g, const std::filesystem::path& outdir,
                        const std::string& prefix = "",
                        GiftiEncoding encoding = GiftiEncoding::gzip_base64);
SeparatedFiles separate(const std::filesystem::path& cifti, const std::filesystem::path& outdir,
                        const std::string& prefix = "");

/// Rebuilds an object from separated files. A missing ROI means all-true.
/// CIFTI metadata stays absent unless `intent` is given.
Grayordinates assemble(const SeparatedFiles& files, std::optional<Intent> intent = std::nullopt);

/// Stem with the CIFTI suffix removed ("a/b.dtseries.nii" -> "a/b").
std::filesystem::path cifti_stem(const std::filesystem::path& path);

}  // namespace gxt
