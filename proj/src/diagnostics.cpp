#include "weyl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace weyl {

std::vector<double> wall_gaps(const RootSystem& rs, std::span<const double> x) {
  std::vector<double> g(rs.size());
  for (std::size_t r = 0; r < rs.size(); ++r) g[r] = rs[r].dot(x);
  return g;
}

OccupationReport occupation_time(const RootSystem& rs, const Trajectory& traj,
                                 const std::vector<double>& ladder) {
  OccupationReport rep;
  rep.ladder = ladder;
  std::sort(rep.ladder.begin(), rep.ladder.end());
  rep.per_root.assign(rep.ladder.size(), std::vector<double>(rs.size(), 0.0));
  rep.any_wall.assign(rep.ladder.size(), 0.0);
  if (traj.size() == 0) return rep;
  rep.horizon = traj.times.back() - traj.times.front();
  for (std::size_t r = 0; r + 1 < traj.size(); ++r) {
    const double h = traj.times[r + 1] - traj.times[r];
    const auto g = wall_gaps(rs, traj.state(r));
    const double gmin = g.empty() ? INFINITY : *std::min_element(g.begin(), g.end());
    for (std::size_t l = 0; l < rep.ladder.size(); ++l) {
      for (std::size_t q = 0; q < g.size(); ++q)
        if (g[q] <= rep.ladder[l]) rep.per_root[l][q] += h;
      if (gmin <= rep.ladder[l]) rep.any_wall[l] += h;
    }
  }
  return rep;
}

namespace {

// One pass over R_+(phi), which must be given as its closure.
double S_of(std::span<const Root> closure, std::span<const double> x) {
  double s = 0.0;
  for (const auto& a : closure) {
    const double g = a.dot(x);
    s += g * g;
  }
  return s;
}

double h_dir_of(std::span<const Root> closure, std::span<const double> x, const Root& d) {
  double s = 0.0;
  for (const auto& a : closure) {
    const double ad = inner(a, d);
    if (ad != 0.0) s += ad * a.dot(x);
  }
  return s;
}

struct ClusterTable {
  std::vector<std::vector<Root>> clusters;
  std::vector<std::vector<Root>> closures;
  // image[d][c]: index of the cluster phi_delta for delta = root d.
  std::vector<std::vector<int>> image;
  // active[d][c]: sum over phi of <alpha,delta>^2 > 0.
  std::vector<std::vector<char>> active;
  std::vector<double> delta_sq;  // sum over R_+(phi) of <alpha,delta>^2, flattened [d][c]
};

std::vector<std::size_t> key_of(const RootSystem& rs, std::span<const Root> roots) {
  std::vector<std::size_t> k;
  for (const auto& a : roots) k.push_back(rs.index_of(a));
  std::sort(k.begin(), k.end());
  return k;
}

const ClusterTable& cluster_table(const RootSystem& rs, int m) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, ClusterTable> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_tuple(int(rs.type()), rs.dim(), m);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  ClusterTable tab;
  tab.clusters = enumerate_clusters(rs, m);
  std::map<std::vector<std::size_t>, int> index;
  for (std::size_t c = 0; c < tab.clusters.size(); ++c) {
    index[key_of(rs, tab.clusters[c])] = int(c);
    tab.closures.push_back(cluster_closure(rs, tab.clusters[c]));
  }
  const std::size_t nc = tab.clusters.size();
  tab.image.assign(rs.size(), std::vector<int>(nc, -1));
  tab.active.assign(rs.size(), std::vector<char>(nc, 0));
  tab.delta_sq.assign(rs.size() * nc, 0.0);
  for (std::size_t d = 0; d < rs.size(); ++d)
    for (std::size_t c = 0; c < nc; ++c) {
      double w = 0.0;
      std::vector<Root> img;
      for (const auto& a : tab.clusters[c]) {
        const double ad = inner(a, rs[d]);
        w += ad * ad;
        img.push_back(reflected_positive(a, rs[d]).root);
      }
      tab.active[d][c] = w > 0;
      tab.image[d][c] = index.at(key_of(rs, img));
      double ws = 0.0;
      for (const auto& a : tab.closures[c]) {
        const double ad = inner(a, rs[d]);
        ws += ad * ad;
      }
      tab.delta_sq[d * nc + c] = ws;
    }
  return cache.emplace(key, std::move(tab)).first->second;
}

}  // namespace

double cluster_S(const RootSystem& rs, std::span<const Root> phi, std::span<const double> x) {
  return S_of(cluster_closure(rs, phi), x);
}

double cluster_h(const RootSystem& rs, std::span<const Root> phi, std::span<const double> x, int k) {
  double s = 0.0;
  for (const auto& a : cluster_closure(rs, phi)) s += a.coord(k) * a.dot(x);
  return s;
}

double cluster_h_dir(const RootSystem& rs, std::span<const Root> phi, std::span<const double> x,
                     const Root& delta) {
  return h_dir_of(cluster_closure(rs, phi), x, delta);
}

std::vector<std::vector<Root>> enumerate_clusters(const RootSystem& rs, int m) {
  if (m < 1 || m > 4 || rs.dim() > 8)
    throw std::invalid_argument("enumerate_clusters: limited to m <= 4 and N <= 8");
  std::map<std::vector<std::size_t>, std::vector<Root>> found;
  for (int k = 0; k < rs.dim(); ++k) {
    std::vector<std::size_t> touching;
    for (std::size_t r = 0; r < rs.size(); ++r)
      if (rs[r].coord(k) != 0.0) touching.push_back(r);
    const int t = int(touching.size());
    if (t < m) continue;
    std::vector<int> pick(m);
    for (int q = 0; q < m; ++q) pick[q] = q;
    while (true) {
      std::vector<std::size_t> key;
      for (int q : pick) key.push_back(touching[q]);
      if (!found.count(key)) {
        std::vector<Root> roots;
        for (auto r : key) roots.push_back(rs[r]);
        found.emplace(key, std::move(roots));
      }
      int q = m - 1;
      while (q >= 0 && pick[q] == t - m + q) --q;
      if (q < 0) break;
      ++pick[q];
      for (int p = q + 1; p < m; ++p) pick[p] = pick[p - 1] + 1;
    }
  }
  std::vector<std::vector<Root>> out;
  for (auto& [key, roots] : found) out.push_back(std::move(roots));
  return out;
}

double q_m(const RootSystem& rs, std::span<const double> x, int m) {
  const auto& tab = cluster_table(rs, m);
  double q = 1.0;
  for (const auto& cl : tab.closures) {
    const double s = S_of(cl, x);
    if (s == 0.0) return 0.0;  // the product alone can overflow to inf first
    q *= s;
  }
  return q;
}

double log_q_m(const RootSystem& rs, std::span<const double> x, int m) {
  const auto& tab = cluster_table(rs, m);
  double l = 0.0;
  for (const auto& cl : tab.closures) l += std::log(S_of(cl, x));
  return l;
}

namespace {

std::vector<double> cluster_S_values(const ClusterTable& tab, std::span<const double> x) {
  std::vector<double> S(tab.closures.size());
  for (std::size_t c = 0; c < S.size(); ++c) {
    S[c] = S_of(tab.closures[c], x);
    if (!(S[c] > 0)) throw DegenerateClusterError("Qm drift undefined: a cluster polynomial vanishes");
  }
  return S;
}

}  // namespace

QmDrift Qm_drift(const CoefficientModel& model, const RootSystem& rs, double t,
                 std::span<const double> x, int m) {
  const auto& tab = cluster_table(rs, m);
  const auto S = cluster_S_values(tab, x);
  const int n = rs.dim();
  const Eigen::VectorXd sig = sigma_vector(model, t, x);
  const Eigen::VectorXd b = drift_vector(model, t, x);
  QmDrift out;
  for (std::size_t c = 0; c < S.size(); ++c) {
    const auto& cl = tab.closures[c];
    for (int k = 0; k < n; ++k) {
      double h = 0.0, a2 = 0.0;
      for (const auto& a : cl) {
        const double ak = a.coord(k);
        h += ak * a.dot(x);
        a2 += ak * ak;
      }
      out.h1 += (2 * h * h - S[c] * a2) * sig[k] * sig[k] / (S[c] * S[c]);
      out.h2 += -2.0 * h * b[k] / S[c];
    }
  }
  out.h3 = h3_desingularized(model, rs, t, x, m);
  return out;
}

double h3_naive(const CoefficientModel& model, const RootSystem& rs, double t,
                std::span<const double> x, int m) {
  const auto& tab = cluster_table(rs, m);
  const auto S = cluster_S_values(tab, x);
  double h3 = 0.0;
  for (std::size_t d = 0; d < rs.size(); ++d) {
    const double kd = model.k(t, x, rs[d]);
    if (kd == 0.0) continue;
    const double gd = rs[d].dot(x);
    double s = 0.0;
    for (std::size_t c = 0; c < S.size(); ++c) s += h_dir_of(tab.closures[c], x, rs[d]) / S[c];
    h3 += -2.0 * kd * s / gd;
  }
  return h3;
}

double h3_desingularized(const CoefficientModel& model, const RootSystem& rs, double t,
                         std::span<const double> x, int m) {
  const auto& tab = cluster_table(rs, m);
  const auto S = cluster_S_values(tab, x);
  const std::size_t nc = S.size();
  double h3 = 0.0;
  for (std::size_t d = 0; d < rs.size(); ++d) {
    const Root& delta = rs[d];
    const double kd = model.k(t, x, delta);
    if (kd == 0.0) continue;
    double s = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      if (!tab.active[d][c]) continue;
      const int ci = tab.image[d][c];
      const double hp = h_dir_of(tab.closures[c], x, delta);
      const double hi = h_dir_of(tab.closures[ci], x, delta);
      s += (1.0 / S[c] + 1.0 / S[ci]) * tab.delta_sq[d * nc + c] -
           (hp - hi) * (hp - hi) / (S[c] * S[ci]);
    }
    h3 += -kd / delta.norm2() * s;
  }
  return h3;
}

std::vector<CollisionEvent> multiple_collision_scan(const RootSystem& rs, const Trajectory& traj,
                                                    double eps) {
  std::vector<CollisionEvent> out;
  for (std::size_t r = 0; r < traj.size(); ++r) {
    if (!(traj.times[r] > traj.times.front())) continue;
    const auto x = traj.state(r);
    std::vector<std::size_t> close;
    for (std::size_t q = 0; q < rs.size(); ++q)
      if (rs[q].dot(x) <= eps) close.push_back(q);
    bool hit = false;
    for (std::size_t p = 0; p < close.size() && !hit; ++p)
      for (std::size_t q = p + 1; q < close.size() && !hit; ++q) {
        const Root &a = rs[close[p]], &b = rs[close[q]];
        double overlap = 0.0;
        for (int k : {a.i, a.j})
          if (k >= 0) overlap += a.coord(k) * a.coord(k) * b.coord(k) * b.coord(k);
        if (overlap > 0) {
          out.push_back({traj.times[r], a, b});
          hit = true;
        }
      }
  }
  return out;
}

std::vector<std::vector<DetectorSample>> detector_trace(const CoefficientModel& model,
                                                        const RootSystem& rs,
                                                        const Trajectory& traj,
                                                        const FaceSignature& face,
                                                        const std::vector<Detector>& detectors,
                                                        double eta, double radius) {
  std::vector<std::vector<DetectorSample>> out(detectors.size());
  for (std::size_t r = 0; r < traj.size(); ++r) {
    const auto x = traj.state(r);
    const double t = traj.times[r];
    bool inside = true;
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    if (std::sqrt(norm2) > radius) inside = false;
    for (const auto& b : rs.roots())
      if (!face.contains(b) && b.dot(x) < eta) inside = false;
    for (std::size_t d = 0; d < detectors.size(); ++d) {
      const auto& u = detectors[d].direction;
      DetectorSample s{t, inside, 0.0, NAN, NAN};
      for (int i = 0; i < rs.dim(); ++i) s.tau += u[i] * x[i];
      if (inside) {
        s.B = detector_drift(model, rs, face, u, t, x, 0.0);
        s.q = q_S_u(model, u, t, x);
      }
      out[d].push_back(s);
    }
  }
  return out;
}

}  // namespace weyl
