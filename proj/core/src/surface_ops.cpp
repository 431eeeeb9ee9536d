#include "gxt/surface_ops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include <Eigen/Geometry>

#include "gxt/error.hpp"
#include "gxt/grayordinates.hpp"
#include "gxt/parallel.hpp"

namespace gxt {
namespace {

struct Icosahedron {
  std::array<Eigen::Vector3d, 12> v;
  std::vector<std::array<int, 3>> f;
};

const Icosahedron& icosahedron() {
  static const Icosahedron ico = [] {
    Icosahedron out;
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const double raw[12][3] = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                               {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                               {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    for (int i = 0; i < 12; ++i) out.v[i] = Eigen::Vector3d(raw[i][0], raw[i][1], raw[i][2]);
    auto adjacent = [&](int a, int b) { return std::abs((out.v[a] - out.v[b]).norm() - 2.0) < 1e-9; };
    for (int a = 0; a < 12; ++a)
      for (int b = a + 1; b < 12; ++b)
        for (int c = b + 1; c < 12; ++c) {
          if (!adjacent(a, b) || !adjacent(b, c) || !adjacent(a, c)) continue;
          const Eigen::Vector3d n = (out.v[b] - out.v[a]).cross(out.v[c] - out.v[a]);
          if (n.dot(out.v[a]) > 0) out.f.push_back({a, b, c});
          else out.f.push_back({a, c, b});
        }
    for (auto& p : out.v) p.normalize();
    return out;
  }();
  return ico;
}

}  // namespace

int exact_icosphere_frequency(std::size_t n) {
  if (n < 12) return 0;
  const auto k = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n - 2) / 10.0)));
  return k >= 1 && static_cast<std::size_t>(10 * k * k + 2) == n ? k : 0;
}

int icosphere_frequency(std::size_t target) {
  if (target < 12) throw DomainError("icosphere target must be at least 12 vertices");
  const auto count = [](long long k) { return 10 * k * k + 2; };
  long long k = static_cast<long long>(std::sqrt(static_cast<double>(target - 2) / 10.0));
  if (k < 1) k = 1;
  while (count(k) > static_cast<long long>(target) && k > 1) --k;
  while (count(k + 1) <= static_cast<long long>(target)) ++k;
  const long long t = static_cast<long long>(target);
  const long long below = std::llabs(count(k) - t);
  const long long above = std::llabs(count(k + 1) - t);
  return static_cast<int>(above < below ? k + 1 : k);
}

SphereMesh make_icosphere(std::size_t target_vertices) {
  return make_icosphere_k(icosphere_frequency(target_vertices));
}

SphereMesh make_icosphere_k(int k) {
  if (k < 1) throw DomainError("icosphere frequency must be >= 1");
  const auto& ico = icosahedron();
  std::vector<Eigen::Vector3d> pts(ico.v.begin(), ico.v.end());
  // Shared edge points are keyed by (low corner, high corner, steps from low).
  std::map<std::tuple<int, int, int>, int> edge_ids;
  std::vector<std::array<int, 3>> faces;
  faces.reserve(static_cast<std::size_t>(20 * k * k));

  for (const auto& tri : ico.f) {
    const int A = tri[0], B = tri[1], C = tri[2];
    const Eigen::Vector3d a = ico.v[A], b = ico.v[B], c = ico.v[C];
    std::vector<int> id(static_cast<std::size_t>((k + 1) * (k + 1)), -1);
    auto slot = [&](int i, int j) -> int& { return id[static_cast<std::size_t>(i * (k + 1) + j)]; };
    auto edge_point = [&](int u, int w, int steps_from_u, const Eigen::Vector3d& p) {
      const auto key = u < w ? std::make_tuple(u, w, steps_from_u) : std::make_tuple(w, u, k - steps_from_u);
      auto [it, inserted] = edge_ids.emplace(key, static_cast<int>(pts.size()));
      if (inserted) pts.push_back(p.normalized());
      return it->second;
    };
    for (int i = 0; i <= k; ++i) {
      for (int j = 0; i + j <= k; ++j) {
        const Eigen::Vector3d p = a + (b - a) * (double(i) / k) + (c - a) * (double(j) / k);
        int vid;
        if (i == 0 && j == 0) vid = A;
        else if (i == k && j == 0) vid = B;
        else if (i == 0 && j == k) vid = C;
        else if (j == 0) vid = edge_point(A, B, i, p);
        else if (i == 0) vid = edge_point(A, C, j, p);
        else if (i + j == k) vid = edge_point(B, C, j, p);
        else {
          vid = static_cast<int>(pts.size());
          pts.push_back(p.normalized());
        }
        slot(i, j) = vid;
      }
    }
    for (int i = 0; i < k; ++i) {
      for (int j = 0; i + j < k; ++j) {
        faces.push_back({slot(i, j), slot(i + 1, j), slot(i, j + 1)});
        if (i + j + 1 < k) faces.push_back({slot(i + 1, j), slot(i + 1, j + 1), slot(i, j + 1)});
      }
    }
  }

  SphereMesh out;
  out.k = k;
  out.surface.vertices.resize(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) out.surface.vertices.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  out.surface.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t f = 0; f < faces.size(); ++f)
    for (int c = 0; c < 3; ++c) out.surface.faces(static_cast<Eigen::Index>(f), c) = faces[f][static_cast<std::size_t>(c)];
  return out;
}

namespace {

// Uniform grid over [-1.05, 1.05]^3 holding, per cell, the faces whose
// spherical cap overlaps it.
class FaceGrid {
 public:
  FaceGrid(const Eigen::MatrixX3d& v, const Eigen::Matrix<int, Eigen::Dynamic, 3>& f) {
    const auto nf = f.rows();
    n_ = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(nf)) / 3.0), 4, 96);
    cell_ = 2.1 / n_;
    std::vector<std::array<int, 6>> boxes(static_cast<std::size_t>(nf));
    std::vector<std::size_t> count(static_cast<std::size_t>(n_ * n_ * n_) + 1, 0);
    for (Eigen::Index t = 0; t < nf; ++t) {
      const Eigen::Vector3d a = v.row(f(t, 0)), b = v.row(f(t, 1)), c = v.row(f(t, 2));
      const Eigen::Vector3d centre = (a + b + c).normalized();
      const double r = std::max({(a - centre).norm(), (b - centre).norm(), (c - centre).norm()}) + 1e-6;
      auto& bx = boxes[static_cast<std::size_t>(t)];
      for (int d = 0; d < 3; ++d) {
        bx[d] = cell_of(centre[d] - r);
        bx[d + 3] = cell_of(centre[d] + r);
      }
      for_cells(bx, [&](std::size_t cell) { ++count[cell + 1]; });
    }
    for (std::size_t i = 1; i < count.size(); ++i) count[i] += count[i - 1];
    start_ = count;
    items_.resize(count.back());
    std::vector<std::size_t> fill(count.begin(), count.end() - 1);
    for (Eigen::Index t = 0; t < nf; ++t) {
      for_cells(boxes[static_cast<std::size_t>(t)], [&](std::size_t cell) { items_[fill[cell]++] = static_cast<int>(t); });
    }
  }

  template <class F>
  void candidates(const Eigen::Vector3d& p, F&& fn) const {
    const std::size_t cell = index(cell_of(p[0]), cell_of(p[1]), cell_of(p[2]));
    for (std::size_t i = start_[cell]; i < start_[cell + 1]; ++i) fn(items_[i]);
  }

 private:
  int cell_of(double x) const { return std::clamp(static_cast<int>((x + 1.05) / cell_), 0, n_ - 1); }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(n_) * static_cast<std::size_t>(k));
  }
  template <class F>
  void for_cells(const std::array<int, 6>& bx, F&& fn) const {
    for (int k = bx[2]; k <= bx[5]; ++k)
      for (int j = bx[1]; j <= bx[4]; ++j)
        for (int i = bx[0]; i <= bx[3]; ++i) fn(index(i, j, k));
  }

  int n_ = 4;
  double cell_ = 0.5;
  std::vector<std::size_t> start_;
  std::vector<int> items_;
};

// Smallest of the three signed edge tests; >= 0 means p lies inside the
// spherical triangle (equivalently, inside its gnomonic projection).
double containment(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                   const Eigen::Vector3d& c) {
  return std::min({p.dot(a.cross(b)), p.dot(b.cross(c)), p.dot(c.cross(a))});
}

std::array<double, 3> planar_barycentric(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                         const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  const Eigen::Vector3d n = (b - a).cross(c - a);
  const double denom = n.dot(p);
  const Eigen::Vector3d q = denom != 0.0 ? Eigen::Vector3d(p * (n.dot(a) / denom)) : p;
  const Eigen::Vector3d v0 = b - a, v1 = c - a, v2 = q - a;
  const double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
  const double d20 = v2.dot(v0), d21 = v2.dot(v1);
  const double den = d00 * d11 - d01 * d01;
  double wb = (d11 * d20 - d01 * d21) / den;
  double wc = (d00 * d21 - d01 * d20) / den;
  double wa = 1.0 - wb - wc;
  std::array<double, 3> w{std::max(0.0, wa), std::max(0.0, wb), std::max(0.0, wc)};
  const double s = w[0] + w[1] + w[2];
  for (auto& x : w) x /= s;
  return w;
}

Eigen::MatrixX3d unit_rows(const Eigen::MatrixX3d& v) {
  Eigen::MatrixX3d out = v;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double n = out.row(i).norm();
    if (n == 0.0) throw DomainError("sphere vertex at the origin");
    out.row(i) /= n;
  }
  return out;
}

}  // namespace

ResampleMap build_resample_map(const SphereMesh& src, const SphereMesh& dst) {
  return build_resample_map(src.surface, dst.surface);
}

ResampleMap build_resample_map(const Surface& src_sphere, const Surface& dst_sphere) {
  check_surface(src_sphere);
  const Eigen::MatrixX3d sv = unit_rows(src_sphere.vertices);
  const Eigen::MatrixX3d dv = unit_rows(dst_sphere.vertices);
  const auto& sf = src_sphere.faces;
  const FaceGrid grid(sv, sf);

  ResampleMap map;
  map.source_count = static_cast<std::size_t>(sv.rows());
  const auto nt = static_cast<std::size_t>(dv.rows());
  map.face.assign(nt, -1);
  map.vertex.resize(nt);
  map.weight.resize(nt);

  parallel_for(nt, [&](std::size_t t) {
    const Eigen::Vector3d p = dv.row(static_cast<Eigen::Index>(t));
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    auto consider = [&](int f) {
      const double s = containment(p, sv.row(sf(f, 0)), sv.row(sf(f, 1)), sv.row(sf(f, 2)));
      // Lowest face id among containing faces wins; otherwise least violation.
      if (best_score >= 0.0 ? (s >= 0.0 && f < best) : s > best_score) {
        best = f;
        best_score = s;
      }
    };
    grid.candidates(p, consider);
    if (best_score < 0.0) {
      for (Eigen::Index f = 0; f < sf.rows(); ++f) consider(static_cast<int>(f));
    }
    if (best < 0 || best_score < -1e-9) {
      throw InternalError("target vertex " + std::to_string(t) + " not inside any source triangle");
    }
    std::array<int, 3> ids{sf(best, 0), sf(best, 1), sf(best, 2)};
    std::array<double, 3> w{0, 0, 0};
    bool snapped = false;
    for (int c = 0; c < 3; ++c) {
      if ((sv.row(ids[static_cast<std::size_t>(c)]).transpose() - p).norm() < 1e-12) {
        w[static_cast<std::size_t>(c)] = 1.0;
        snapped = true;
        break;
      }
    }
    if (!snapped) w = planar_barycentric(p, sv.row(ids[0]), sv.row(ids[1]), sv.row(ids[2]));
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      if (w[static_cast<std::size_t>(x)] != w[static_cast<std::size_t>(y)]) return w[static_cast<std::size_t>(x)] > w[static_cast<std::size_t>(y)];
      return ids[static_cast<std::size_t>(x)] < ids[static_cast<std::size_t>(y)];
    });
    map.face[t] = best;
    for (int c = 0; c < 3; ++c) {
      map.vertex[t][static_cast<std::size_t>(c)] = ids[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])];
      map.weight[t][static_cast<std::size_t>(c)] = w[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])];
    }
  });
  return map;
}

Eigen::MatrixXd resample_values(const ResampleMap& map, const Eigen::MatrixXd& values, ResampleKind kind) {
  if (static_cast<std::size_t>(values.rows()) != map.source_count) {
    throw ShapeError("resample input has " + std::to_string(values.rows()) + " rows, map expects " +
                     std::to_string(map.source_count));
  }
  const auto nt = static_cast<Eigen::Index>(map.target_count());
  Eigen::MatrixXd out(nt, values.cols());
  parallel_for(static_cast<std::size_t>(values.cols()), [&](std::size_t cc) {
    const auto c = static_cast<Eigen::Index>(cc);
    for (Eigen::Index t = 0; t < nt; ++t) {
      const auto& ids = map.vertex[static_cast<std::size_t>(t)];
      const auto& w = map.weight[static_cast<std::size_t>(t)];
      if (kind == ResampleKind::label) {
        // Weights are sorted descending; among equal maxima take the lowest key.
        double key = values(ids[0], c);
        for (int k = 1; k < 3; ++k) {
          if (w[static_cast<std::size_t>(k)] == w[0]) key = std::min(key, values(ids[static_cast<std::size_t>(k)], c));
        }
        out(t, c) = key;
      } else {
        // Offsets from the first usable value keep constant fields exact.
        double ref = kMissing, num = 0.0, den = 0.0;
        for (int k = 0; k < 3; ++k) {
          const double x = values(ids[static_cast<std::size_t>(k)], c);
          if (std::isnan(x) || w[static_cast<std::size_t>(k)] == 0.0) continue;
          if (std::isnan(ref)) ref = x;
          num += w[static_cast<std::size_t>(k)] * (x - ref);
          den += w[static_cast<std::size_t>(k)];
        }
        out(t, c) = den > 0.0 ? ref + num / den : kMissing;
      }
    }
  });
  return out;
}

Surface resample_surface(const Surface& surface, const SphereMesh& src, const SphereMesh& dst) {
  if (surface.vertex_count() != src.surface.vertex_count()) {
    throw ShapeError("surface has " + std::to_string(surface.vertex_count()) +
                     " vertices but the source sphere has " + std::to_string(src.surface.vertex_count()));
  }
  const ResampleMap map = build_resample_map(src, dst);
  Surface out;
  out.hemisphere = surface.hemisphere;
  out.faces = dst.surface.faces;
  out.vertices.resize(static_cast<Eigen::Index>(map.target_count()), 3);
  for (std::size_t t = 0; t < map.target_count(); ++t) {
    Eigen::RowVector3d p = Eigen::RowVector3d::Zero();
    for (int k = 0; k < 3; ++k) p += map.weight[t][static_cast<std::size_t>(k)] * surface.vertices.row(map.vertex[t][static_cast<std::size_t>(k)]);
    out.vertices.row(static_cast<Eigen::Index>(t)) = p;
  }
  return out;
}

Grayordinates resample_gray(const Grayordinates& g, std::size_t target_vertices) {
  require_valid(g);
  const SphereMesh dst = make_icosphere(target_vertices);
  Grayordinates out = g;
  const bool labels = g.meta.cifti.intent == Intent::dlabel;

  for (Hemisphere h : {Hemisphere::left, Hemisphere::right}) {
    auto& data = h == Hemisphere::left ? out.data.cortex_left : out.data.cortex_right;
    auto& mask = h == Hemisphere::left ? out.meta.cortex.medial_wall_mask_left : out.meta.cortex.medial_wall_mask_right;
    auto& surf = h == Hemisphere::left ? out.surf.left : out.surf.right;
    if (!data && !surf) continue;
    const std::size_t v = data ? resolution(g, h) : static_cast<std::size_t>(surf->vertex_count());
    const int k = exact_icosphere_frequency(v);
    if (k == 0) {
      throw DomainError(std::string(to_string(h)) + " cortex has " + std::to_string(v) +
                        " vertices, which is not an icosphere count (10k^2+2); cannot infer its sphere");
    }
    const SphereMesh src = make_icosphere_k(k);
    const ResampleMap map = build_resample_map(src, dst);
    if (data) {
      const Mask& m = *mask;
      Eigen::MatrixXd full = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(v), data->cols(), labels ? 0.0 : kMissing);
      Eigen::MatrixXd mcol(static_cast<Eigen::Index>(v), 1);
      Eigen::Index r = 0;
      for (std::size_t i = 0; i < v; ++i) {
        mcol(static_cast<Eigen::Index>(i), 0) = m[i] ? 1.0 : 0.0;
        if (m[i]) full.row(static_cast<Eigen::Index>(i)) = data->row(r++);
      }
      const Eigen::MatrixXd res = resample_values(map, full, labels ? ResampleKind::label : ResampleKind::metric);
      const Eigen::MatrixXd mres = resample_values(map, mcol, ResampleKind::label);
      Mask nm(map.target_count());
      Eigen::Index keep = 0;
      for (std::size_t t = 0; t < nm.size(); ++t) {
        nm[t] = mres(static_cast<Eigen::Index>(t), 0) > 0.5;
        keep += nm[t] ? 1 : 0;
      }
      Eigen::MatrixXd nd(keep, data->cols());
      Eigen::Index w = 0;
      for (std::size_t t = 0; t < nm.size(); ++t) {
        if (nm[t]) nd.row(w++) = res.row(static_cast<Eigen::Index>(t));
      }
      data = std::move(nd);
      mask = std::move(nm);
    }
    if (surf) surf = resample_surface(*surf, src, dst);
  }
  return out;
}

Surface rotate_surface(const Surface& surface, const Eigen::Matrix3d& rotation) {
  const Eigen::Matrix3d should_be_identity = rotation.transpose() * rotation;
  if (!should_be_identity.isApprox(Eigen::Matrix3d::Identity(), 1e-9) || rotation.determinant() < 0) {
    throw DomainError("rotation matrix must be orthonormal with determinant +1");
  }
  Surface out = surface;
  out.vertices = surface.vertices * rotation.transpose();
  return out;
}

std::vector<std::vector<int>> vertex_adjacency(const Surface& surface) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(surface.vertex_count()));
  for (Eigen::Index f = 0; f < surface.face_count(); ++f) {
    for (int e = 0; e < 3; ++e) {
      const int a = surface.faces(f, e), b = surface.faces(f, (e + 1) % 3);
      adj[static_cast<std::size_t>(a)].push_back(b);
      adj[static_cast<std::size_t>(b)].push_back(a);
    }
  }
  for (auto& n : adj) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  return adj;
}

}  // namespace gxt
