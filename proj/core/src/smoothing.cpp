#include "gxt/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "gxt/error.hpp"
#include "gxt/gray_io.hpp"
#include "gxt/parallel.hpp"
#include "gxt/surface_ops.hpp"

namespace gxt {

double fwhm_to_sigma(double fwhm) {
  if (fwhm < 0) throw DomainError("FWHM must be non-negative");
  return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

std::vector<double> geodesic_distances(const Surface& surface, const std::vector<std::vector<int>>& adj, int source,
                                       double radius) {
  const auto n = static_cast<std::size_t>(surface.vertex_count());
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(source)] = 0.0;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(u)] || d > radius) continue;
    for (int w : adj[static_cast<std::size_t>(u)]) {
      const double nd = d + (surface.vertices.row(u) - surface.vertices.row(w)).norm();
      if (nd < dist[static_cast<std::size_t>(w)] && nd <= radius) {
        dist[static_cast<std::size_t>(w)] = nd;
        pq.emplace(nd, w);
      }
    }
  }
  return dist;
}

SurfaceKernel build_surface_kernel(const Surface& surface, const Mask& roi, double fwhm, double truncation_sigmas) {
  if (static_cast<std::size_t>(surface.vertex_count()) != roi.size()) {
    throw ShapeError("surface has " + std::to_string(surface.vertex_count()) + " vertices but the mask has " +
                     std::to_string(roi.size()));
  }
  if (!(truncation_sigmas > 0)) throw DomainError("truncation must be positive");
  const double sigma = fwhm_to_sigma(fwhm);
  const double radius = truncation_sigmas * sigma;
  const auto adj = vertex_adjacency(surface);

  std::vector<Eigen::Index> row_of(roi.size(), -1);
  std::vector<int> vertex_of;
  for (std::size_t i = 0; i < roi.size(); ++i) {
    if (!roi[i]) continue;
    row_of[i] = static_cast<Eigen::Index>(vertex_of.size());
    vertex_of.push_back(static_cast<int>(i));
  }

  std::vector<std::vector<std::pair<Eigen::Index, double>>> lists(vertex_of.size());
  parallel_for(vertex_of.size(), [&](std::size_t r) {
    auto& out = lists[r];
    if (sigma == 0.0) {
      out.emplace_back(static_cast<Eigen::Index>(r), 1.0);
      return;
    }
    // Truncated Dijkstra with a sparse visited set so cost tracks the
    // neighbourhood size, not the mesh size.
    std::vector<std::pair<int, double>> settled;
    std::vector<std::pair<int, double>> best;
    auto lookup = [&](int v) -> double* {
      for (auto& [k, d] : best) {
        if (k == v) return &d;
      }
      return nullptr;
    };
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    const int src = vertex_of[r];
    best.emplace_back(src, 0.0);
    pq.emplace(0.0, src);
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > *lookup(u)) continue;
      settled.emplace_back(u, d);
      for (int w : adj[static_cast<std::size_t>(u)]) {
        const double nd = d + (surface.vertices.row(u) - surface.vertices.row(w)).norm();
        if (nd > radius) continue;
        double* cur = lookup(w);
        if (cur == nullptr) {
          best.emplace_back(w, nd);
          pq.emplace(nd, w);
        } else if (nd < *cur) {
          *cur = nd;
          pq.emplace(nd, w);
        }
      }
    }
    for (const auto& [v, d] : settled) {
      const Eigen::Index rr = row_of[static_cast<std::size_t>(v)];
      if (rr < 0) continue;
      out.emplace_back(rr, std::exp(-d * d / (2.0 * sigma * sigma)));
    }
    std::sort(out.begin(), out.end());
  });

  SurfaceKernel k;
  k.start.reserve(lists.size() + 1);
  k.start.push_back(0);
  for (const auto& l : lists) {
    for (const auto& [rr, w] : l) {
      k.row.push_back(rr);
      k.weight.push_back(w);
    }
    k.start.push_back(k.row.size());
  }
  return k;
}

Eigen::MatrixXd smooth_surface_metric(const Surface& surface, const Eigen::MatrixXd& values, const Mask& roi,
                                      double fwhm, double truncation_sigmas) {
  const auto in_roi = std::count(roi.begin(), roi.end(), true);
  if (values.rows() != in_roi) {
    throw ShapeError("values have " + std::to_string(values.rows()) + " rows but the mask has " +
                     std::to_string(in_roi) + " in-ROI vertices");
  }
  if (static_cast<std::size_t>(surface.vertex_count()) != roi.size()) {
    throw ShapeError("surface has " + std::to_string(surface.vertex_count()) + " vertices but the mask has " +
                     std::to_string(roi.size()));
  }
  if (fwhm == 0.0) return values;
  const SurfaceKernel k = build_surface_kernel(surface, roi, fwhm, truncation_sigmas);
  Eigen::MatrixXd out(values.rows(), values.cols());
  parallel_for(static_cast<std::size_t>(values.rows()), [&](std::size_t r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      const auto ri = static_cast<Eigen::Index>(r);
      if (std::isnan(values(ri, c))) {
        out(ri, c) = kMissing;
        continue;
      }
      double num = 0.0, den = 0.0;
      for (std::size_t e = k.start[r]; e < k.start[r + 1]; ++e) {
        const double x = values(k.row[e], c);
        if (std::isnan(x)) continue;
        num += k.weight[e] * x;
        den += k.weight[e];
      }
      out(ri, c) = num / den;
    }
  });
  return out;
}

Eigen::MatrixXd smooth_volume(const Eigen::MatrixXd& values, const SubcortMeta& meta, double fwhm,
                              double truncation_sigmas) {
  if (static_cast<std::size_t>(values.rows()) != meta.labels.size()) {
    throw ShapeError("values have " + std::to_string(values.rows()) + " rows but there are " +
                     std::to_string(meta.labels.size()) + " labelled voxels");
  }
  if (fwhm == 0.0) return values;
  if (!(truncation_sigmas > 0)) throw DomainError("truncation must be positive");
  const double sigma = fwhm_to_sigma(fwhm);
  const double radius = truncation_sigmas * sigma;
  const auto& g = meta.grid;
  const Eigen::Matrix3d lin = g.affine.block<3, 3>(0, 0);

  struct Offset {
    int di, dj, dk;
    double w;
  };
  std::array<int, 3> half{};
  for (int a = 0; a < 3; ++a) {
    const double spacing = lin.col(a).norm();
    if (!(spacing > 0)) throw DomainError("voxel spacing must be positive");
    half[static_cast<std::size_t>(a)] = static_cast<int>(std::floor(radius / spacing + 1e-9));
  }
  std::vector<Offset> offsets;
  for (int dk = -half[2]; dk <= half[2]; ++dk)
    for (int dj = -half[1]; dj <= half[1]; ++dj)
      for (int di = -half[0]; di <= half[0]; ++di) {
        const Eigen::Vector3d d = lin * Eigen::Vector3d(di, dj, dk);
        offsets.push_back({di, dj, dk, std::exp(-d.squaredNorm() / (2.0 * sigma * sigma))});
      }

  std::vector<Eigen::Index> row_of(meta.mask.size(), -1);
  std::vector<std::int64_t> lin_of;
  for (std::size_t i = 0; i < meta.mask.size(); ++i) {
    if (!meta.mask[i]) continue;
    row_of[i] = static_cast<Eigen::Index>(lin_of.size());
    lin_of.push_back(static_cast<std::int64_t>(i));
  }
  if (lin_of.size() != meta.labels.size()) throw ShapeError("mask and labels disagree");

  Eigen::MatrixXd out(values.rows(), values.cols());
  parallel_for(lin_of.size(), [&](std::size_t r) {
    const std::int64_t l = lin_of[r];
    const std::int64_t i = l % g.dims[0], j = (l / g.dims[0]) % g.dims[1], k = l / (g.dims[0] * g.dims[1]);
    const int label = meta.labels[r];
    std::vector<std::pair<Eigen::Index, double>> nb;
    for (const auto& o : offsets) {
      const std::int64_t a = i + o.di, b = j + o.dj, c = k + o.dk;
      if (a < 0 || b < 0 || c < 0 || a >= g.dims[0] || b >= g.dims[1] || c >= g.dims[2]) continue;
      const Eigen::Index rr = row_of[static_cast<std::size_t>(g.linear_index(a, b, c))];
      if (rr < 0 || meta.labels[static_cast<std::size_t>(rr)] != label) continue;
      nb.emplace_back(rr, o.w);
    }
    const auto ri = static_cast<Eigen::Index>(r);
    for (Eigen::Index col = 0; col < values.cols(); ++col) {
      if (std::isnan(values(ri, col))) {
        out(ri, col) = kMissing;
        continue;
      }
      double num = 0.0, den = 0.0;
      for (const auto& [rr, w] : nb) {
        const double x = values(rr, col);
        if (std::isnan(x)) continue;
        num += w * x;
        den += w;
      }
      out(ri, col) = num / den;
    }
  });
  return out;
}

Surface surface_for(const Grayordinates& g, Hemisphere h, const SmoothSurfaces& s) {
  const auto& given = h == Hemisphere::left ? s.left : s.right;
  const auto& attached = h == Hemisphere::left ? g.surf.left : g.surf.right;
  const std::size_t v = resolution(g, h);
  const std::string side(to_string(h));
  if (given) return *given;
  if (attached) return *attached;
  if (s.synthetic_sphere) {
    const int k = exact_icosphere_frequency(v);
    if (k == 0) {
      throw DomainError(side + " cortex has " + std::to_string(v) +
                        " vertices; the synthetic sphere needs an icosphere count (10k^2+2)");
    }
    Surface sphere = make_icosphere_k(k).surface;
    sphere.vertices *= 100.0;
    sphere.hemisphere = h;
    return sphere;
  }
  throw DomainError("no surface for the " + side + " cortex: supply one (e.g. --" + side +
                    "-surf) or opt into the synthetic sphere");
}

Grayordinates smooth_gray(const Grayordinates& g, const SmoothParams& params, const SmoothSurfaces& surfaces) {
  require_valid(g);
  if (g.meta.cifti.intent == Intent::dlabel) {
    throw DomainError("smoothing categorical data is undefined (dlabel input)");
  }
  if (params.surf_fwhm < 0 || params.vol_fwhm < 0) throw DomainError("FWHM must be non-negative");
  Grayordinates out = g;
  for (Hemisphere h : {Hemisphere::left, Hemisphere::right}) {
    auto& d = h == Hemisphere::left ? out.data.cortex_left : out.data.cortex_right;
    const auto& mask = h == Hemisphere::left ? g.meta.cortex.medial_wall_mask_left : g.meta.cortex.medial_wall_mask_right;
    if (!d || params.surf_fwhm == 0.0) continue;
    const Surface s = surface_for(g, h, surfaces);
    *d = smooth_surface_metric(s, *d, *mask, params.surf_fwhm, params.truncation_sigmas);
  }
  if (out.data.subcort && params.vol_fwhm > 0.0) {
    *out.data.subcort = smooth_volume(*out.data.subcort, *g.meta.subcort, params.vol_fwhm, params.truncation_sigmas);
  }
  return out;
}

void smooth_file(const std::filesystem::path& in, const std::filesystem::path& out, const SmoothParams& params,
                 const SmoothSurfaces& surfaces) {
  write_grayordinates(smooth_gray(read_all_structures(in), params, surfaces), out);
}

}  // namespace gxt
