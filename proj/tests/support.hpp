#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "gxt/grayordinates.hpp"

namespace gxt::test {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "gxt") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Exact equality; NaN matches NaN.
inline bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double x = a.data()[i], y = b.data()[i];
    if (std::isnan(x) && std::isnan(y)) continue;
    if (x != y) return false;
  }
  return true;
}

inline bool same_part(const std::optional<Eigen::MatrixXd>& a, const std::optional<Eigen::MatrixXd>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same_matrix(*a, *b);
}

inline bool same_data(const Grayordinates& a, const Grayordinates& b) {
  return same_part(a.data.cortex_left, b.data.cortex_left) && same_part(a.data.cortex_right, b.data.cortex_right) &&
         same_part(a.data.subcort, b.data.subcort);
}

inline bool same_layout(const Grayordinates& a, const Grayordinates& b) {
  return a.meta.cortex.medial_wall_mask_left == b.meta.cortex.medial_wall_mask_left &&
         a.meta.cortex.medial_wall_mask_right == b.meta.cortex.medial_wall_mask_right &&
         a.meta.subcort == b.meta.subcort;
}

inline bool same_gray(const Grayordinates& a, const Grayordinates& b) {
  return same_data(a, b) && same_layout(a, b) && a.meta.cifti == b.meta.cifti;
}

}  // namespace gxt::test
