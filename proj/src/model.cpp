#include "weyl/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "weyl/rng.hpp"
#include "weyl/sampling.hpp"
#include "weyl/sympoly.hpp"

namespace weyl {

CoefficientModel zero_model(std::string name) {
  CoefficientModel m;
  m.name = std::move(name);
  m.sigma = [](double, std::span<const double>, int) { return 0.0; };
  m.drift = [](double, std::span<const double>, int) { return 0.0; };
  m.k = [](double, std::span<const double>, const Root&) { return 0.0; };
  return m;
}

Eigen::VectorXd sigma_vector(const CoefficientModel& m, double t, std::span<const double> x) {
  Eigen::VectorXd s(x.size());
  for (int i = 0; i < int(x.size()); ++i) s[i] = m.sigma(t, x, i);
  return s;
}

Eigen::VectorXd drift_vector(const CoefficientModel& m, double t, std::span<const double> x) {
  Eigen::VectorXd b(x.size());
  for (int i = 0; i < int(x.size()); ++i) b[i] = m.drift(t, x, i);
  return b;
}

Eigen::VectorXd singular_force(const CoefficientModel& m, const RootSystem& rs, double t,
                               std::span<const double> x, double wall_eps) {
  Eigen::VectorXd G = Eigen::VectorXd::Zero(rs.dim());
  for (const auto& a : rs.roots()) {
    const double g = a.dot(x);
    if (g <= wall_eps) continue;
    const double c = m.k(t, x, a) / g;
    G[a.i] += c;
    if (a.is_pair()) G[a.j] += a.coord(a.j) * c;
  }
  return G;
}

double a_alpha(const CoefficientModel& m, double t, std::span<const double> x, const Root& a) {
  const double si = m.sigma(t, x, a.i);
  double s = si * si;
  if (a.is_pair()) {
    const double sj = m.sigma(t, x, a.j);
    s += sj * sj;
  }
  return s;
}

double detector_drift(const CoefficientModel& m, const RootSystem& rs, const FaceSignature& face,
                      const Eigen::VectorXd& u, double t, std::span<const double> x, double tol) {
  double B = 0.0;
  for (int i = 0; i < rs.dim(); ++i) B += u[i] * m.drift(t, x, i);
  for (const auto& b : rs.roots()) {
    if (face.contains(b)) continue;
    const double ub = b.dot(u);
    if (ub == 0.0) continue;
    const double g = b.dot(x);
    if (g <= tol)
      throw LocalizationError("detector_drift: root " + b.name() + " outside the face is at its wall");
    B += m.k(t, x, b) * ub / g;
  }
  return B;
}

double q_S_u(const CoefficientModel& m, const Eigen::VectorXd& u, double t,
             std::span<const double> x) {
  double q = 0.0;
  for (int j = 0; j < int(x.size()); ++j) {
    if (u[j] == 0.0) continue;
    const double s = m.sigma(t, x, j);
    q += u[j] * u[j] * s * s;
  }
  return q;
}

UCoefficients u_sde_coeffs(const CoefficientModel& m, const RootSystem& rs, double t,
                           std::span<const double> x) {
  const int n = rs.dim();
  const Eigen::VectorXd sig = sigma_vector(m, t, x);
  const Eigen::VectorXd b = drift_vector(m, t, x);
  std::vector<double> kv(rs.size());
  for (std::size_t r = 0; r < rs.size(); ++r) kv[r] = m.k(t, x, rs[r]);

  UCoefficients c{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n),
                  Eigen::VectorXd::Zero(n)};
  const bool even = rs.type() != RootType::A;
  const int power_cols = rs.type() == RootType::D ? n - 1 : n;
  for (int k = 1; k <= power_cols; ++k) {
    const int deg = even ? 2 * k : k;  // invariant is p_deg
    for (int i = 0; i < n; ++i) {
      const double d1 = std::pow(x[i], deg - 1);
      c.a(i, k - 1) = d1 * sig[i];
      c.h(i, k - 1) = d1 * b[i];
      if (deg >= 2) c.h(i, k - 1) += 0.5 * (deg - 1) * std::pow(x[i], deg - 2) * sig[i] * sig[i];
    }
    double H = 0.0;
    for (std::size_t r = 0; r < rs.size(); ++r)
      if (kv[r] != 0.0) H += F_alpha_k(rs[r], deg, x) * kv[r];
    c.Hk[k - 1] = H;
  }
  if (rs.type() == RootType::D) {
    for (int i = 0; i < n; ++i) {
      const int ex[1] = {i};
      const double e = e_excl(x, n - 1, ex);
      c.a(i, n - 1) = e * sig[i];
      c.h(i, n - 1) = e * b[i];
    }
    double H = 0.0;
    for (std::size_t r = 0; r < rs.size(); ++r) {
      if (kv[r] == 0.0) continue;
      const double sign = rs[r].kind == RootKind::PairMinus ? -1.0 : 1.0;
      H += sign * G_alpha_n(rs[r], n, x) * kv[r];
    }
    c.Hk[n - 1] = H;
  }
  return c;
}

// ---------------------------------------------------------------------------

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

std::string fmt_point(double t, std::span<const double> x) {
  std::ostringstream os;
  os.precision(6);
  os << "t=" << t << " x=(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ")";
  return os.str();
}

std::string fmt_face(const FaceSignature& f) {
  std::string s = "S={";
  for (std::size_t k = 0; k < f.roots.size(); ++k) s += (k ? "," : "") + f.roots[k].name();
  return s + "}";
}

std::vector<double> time_grid(const CoefficientModel& m, const CheckGrid& g) {
  if (!(g.T < m.valid_until))
    throw std::invalid_argument("checker horizon T must lie below the model's validity limit");
  std::vector<double> ts;
  const int n = std::max(1, g.time_points);
  for (int q = 0; q < n; ++q) ts.push_back(n == 1 ? 0.0 : g.T * q / (n - 1));
  return ts;
}

int per_root_samples(const RootSystem& rs, const CheckGrid& g) {
  return std::max(2, g.samples / std::max<int>(1, int(rs.size()) / 4));
}

// Verdict for a quantity that must stay below tol.
Verdict below(double v, double tol) {
  if (!std::isfinite(v)) return Verdict::Fail;
  if (v <= tol) return Verdict::Pass;
  return v <= 10 * tol ? Verdict::Inconclusive : Verdict::Fail;
}

}  // namespace

AssumptionReport check_nonnegativity(const CoefficientModel& m, const RootSystem& rs,
                                     const CheckGrid& g) {
  AssumptionReport rep{"C1", Verdict::Pass, INFINITY, 0.0, "", ""};
  Stream rng(g.seed, 1);
  for (double t : time_grid(m, g))
    for (int s = 0; s < g.samples; ++s) {
      auto x = random_chamber_point(rs, rng, g.R);
      for (const auto& a : rs.roots()) {
        const double k = m.k(t, x, a);
        if (k < rep.margin || !std::isfinite(k)) {
          rep.margin = k;
          rep.witness = fmt_point(t, x) + " root=" + a.name();
        }
      }
    }
  for (const auto& a : rs.roots())
    for (int s = 0; s < per_root_samples(rs, g); ++s) {
      auto y = random_wall_point(rs, a, rng, g.R);
      const double k = m.k(0.0, y, a);
      if (k < rep.margin || !std::isfinite(k)) {
        rep.margin = k;
        rep.witness = fmt_point(0.0, y) + " root=" + a.name();
      }
    }
  rep.verdict = (rep.margin >= 0.0 && !std::isnan(rep.margin)) ? Verdict::Pass : Verdict::Fail;
  rep.detail = "min k_alpha over chamber and wall samples";
  return rep;
}

AssumptionReport check_sigma_compat(const CoefficientModel& m, const RootSystem& rs,
                                    const CheckGrid& g) {
  AssumptionReport rep{"C2", Verdict::Pass, 0.0, 1e-3, "", ""};
  Stream rng(g.seed, 2);
  const double finest = *std::min_element(g.approach.begin(), g.approach.end());
  double coarse_worst = 0.0;
  for (double t : time_grid(m, g))
    for (const auto& a : rs.roots()) {
      if (!a.is_pair()) continue;
      for (int s = 0; s < per_root_samples(rs, g); ++s) {
        const auto y = random_wall_point(rs, a, rng, g.R);
        for (double gap : g.approach) {
          const auto x = approach_wall(rs, y, a, gap, rng);
          const double si = m.sigma(t, x, a.i), sj = m.sigma(t, x, a.j);
          const double d =
              std::abs(si * si - sj * sj) / (1.0 + std::max(si * si, sj * sj));
          if (gap == finest) {
            if (d > rep.margin || !std::isfinite(d)) {
              rep.margin = d;
              rep.witness = fmt_point(t, x) + " root=" + a.name();
            }
          } else {
            coarse_worst = std::max(coarse_worst, d);
          }
        }
      }
    }
  rep.verdict = below(rep.margin, rep.tolerance);
  std::ostringstream os;
  os << "max scaled |sigma_i^2-sigma_j^2| at gap " << finest << "; coarser gaps reach "
     << coarse_worst;
  rep.detail = os.str();
  return rep;
}

AssumptionReport check_positivity(const CoefficientModel& m, const RootSystem& rs,
                                  const CheckGrid& g) {
  AssumptionReport rep{"A1", Verdict::Pass, INFINITY, 1e-9, "", ""};
  Stream rng(g.seed, 3);
  for (double t : time_grid(m, g))
    for (const auto& a : rs.roots())
      for (int s = 0; s < per_root_samples(rs, g); ++s) {
        const auto y = random_wall_point(rs, a, rng, g.R);
        const double k = m.k(t, y, a);
        if (k < rep.margin || !std::isfinite(k)) {
          rep.margin = k;
          rep.witness = fmt_point(t, y) + " root=" + a.name();
        }
      }
  if (std::isnan(rep.margin) || rep.margin <= 0.0)
    rep.verdict = Verdict::Fail;
  else
    rep.verdict = rep.margin > 10 * rep.tolerance ? Verdict::Pass : Verdict::Inconclusive;
  rep.detail = "min k_alpha on sampled wall points";
  return rep;
}

AssumptionReport check_dominance(const CoefficientModel& m, const RootSystem& rs,
                                 const CheckGrid& g) {
  AssumptionReport rep{"D1", Verdict::Fail, 0.0, 1e-9, "", ""};
  Stream rng(g.seed, 4);
  const auto ts = time_grid(m, g);
  std::ostringstream detail;
  detail << "gamma by band:";
  bool found = false;
  std::string first_witness;
  double first_gamma = INFINITY;
  for (double eps : g.bands) {
    double gamma = INFINITY;
    std::string wit;
    for (double t : ts)
      for (const auto& a : rs.roots())
        for (int s = 0; s < per_root_samples(rs, g); ++s) {
          const auto y = random_wall_point(rs, a, rng, g.R);
          const double gap = eps * std::pow(10.0, -6.0 * rng.uniform());
          const auto x = approach_wall(rs, y, a, gap, rng);
          const double aa = a_alpha(m, t, x, a);
          if (!(aa > 0.0)) continue;
          const double r = m.k(t, x, a) / aa;
          if (r < gamma || !std::isfinite(r)) {
            gamma = r;
            wit = fmt_point(t, x) + " root=" + a.name();
          }
        }
    detail << " eps=" << eps << ":" << gamma;
    if (first_witness.empty()) {
      first_witness = wit;
      first_gamma = gamma;
    }
    if (!found && std::isfinite(gamma) && gamma > 10 * rep.tolerance) {
      found = true;
      rep.margin = gamma;
      rep.witness = wit;
      detail << " (largest passing band)";
    }
  }
  if (found) {
    rep.verdict = Verdict::Pass;
  } else {
    rep.margin = first_gamma;
    rep.witness = first_witness.empty() ? "no samples with a_alpha > 0" : first_witness;
    rep.verdict = (std::isfinite(first_gamma) && first_gamma > 0) ? Verdict::Inconclusive
                                                                  : Verdict::Fail;
  }
  rep.detail = detail.str();
  return rep;
}

AssumptionReport check_face_sign(const CoefficientModel& m, const RootSystem& rs,
                                 const std::vector<FaceSignature>& faces, const CheckGrid& g) {
  AssumptionReport rep{"D2", Verdict::Pass, INFINITY, 1e-9, "", ""};
  Stream rng(g.seed, 5);
  std::size_t evaluated = 0;
  for (double t : time_grid(m, g))
    for (const auto& f : faces) {
      const auto family = detector_family(rs, f);
      for (int s = 0; s < g.face_samples; ++s) {
        const auto x = random_face_point(rs, f, rng, g.R);
        for (const auto& d : family) {
          const double B = detector_drift(m, rs, f, d.direction, t, x);
          ++evaluated;
          if (B < rep.margin || !std::isfinite(B)) {
            rep.margin = B;
            rep.witness = fmt_point(t, x) + " " + fmt_face(f) + " detector=" + d.label;
          }
        }
      }
    }
  if (!std::isfinite(rep.margin))
    rep.verdict = evaluated ? Verdict::Fail : Verdict::Pass;
  else if (rep.margin >= -rep.tolerance)
    rep.verdict = Verdict::Pass;
  else
    rep.verdict = rep.margin >= -10 * rep.tolerance ? Verdict::Inconclusive : Verdict::Fail;
  rep.detail = "min B_{S,u} over " + std::to_string(faces.size()) + " faces and their detector families";
  return rep;
}

AssumptionReport check_nonsticky(const CoefficientModel& m, const RootSystem& rs,
                                 const std::vector<FaceSignature>& faces, const CheckGrid& g) {
  AssumptionReport rep{"D3", Verdict::Pass, INFINITY, 1e-9, "", ""};
  Stream rng(g.seed, 6);
  std::size_t degenerate = 0;
  for (double t : time_grid(m, g))
    for (const auto& f : faces) {
      const auto family = detector_family(rs, f);
      for (int s = 0; s < g.face_samples; ++s) {
        const auto x0 = random_face_point(rs, f, rng, g.R);
        // type A faces are translation invariant; also pin each block at level 0
        std::vector<std::vector<double>> points{x0};
        if (rs.type() == RootType::A)
          for (const auto& blk : equality_blocks(x0)) {
            if (blk.size < 2) continue;
            auto y = x0;
            for (auto& v : y) v -= blk.level;
            points.push_back(std::move(y));
          }
        for (const auto& x : points) {
          double qmax = 0.0, Bmax = -INFINITY;
          for (const auto& d : family) {
            qmax = std::max(qmax, q_S_u(m, d.direction, t, x));
            Bmax = std::max(Bmax, detector_drift(m, rs, f, d.direction, t, x));
          }
          if (qmax > 1e-12) continue;
          ++degenerate;
          if (Bmax < rep.margin || !std::isfinite(Bmax)) {
            rep.margin = Bmax;
            rep.witness = fmt_point(t, x) + " " + fmt_face(f);
          }
        }
      }
    }
  if (degenerate == 0) {
    rep.verdict = Verdict::Pass;
    rep.margin = INFINITY;
    rep.detail = "no fully degenerate face points sampled";
    return rep;
  }
  if (!std::isfinite(rep.margin) || rep.margin < -10 * rep.tolerance)
    rep.verdict = Verdict::Fail;
  else
    rep.verdict = rep.margin > 10 * rep.tolerance ? Verdict::Pass : Verdict::Inconclusive;
  rep.detail = "min over " + std::to_string(degenerate) +
               " fully degenerate face points of max_u B_{S,u}";
  return rep;
}

AssumptionReport check_growth(const CoefficientModel& m, const RootSystem& rs, const CheckGrid& g) {
  AssumptionReport rep{"G1", Verdict::Pass, 0.0, 0.0, "", ""};
  Stream rng(g.seed, 7);
  bool any = false;
  for (double t : time_grid(m, g))
    for (double scale : {0.01 * g.R, 0.1 * g.R, g.R, 10 * g.R, 100 * g.R})
      for (int s = 0; s < g.samples; ++s) {
        const auto x = random_chamber_point(rs, rng, scale);
        double num = 0.0, r2 = 0.0;
        for (int i = 0; i < rs.dim(); ++i) {
          const double sg = m.sigma(t, x, i);
          num += x[i] * m.drift(t, x, i) + 0.5 * sg * sg;
          r2 += x[i] * x[i];
        }
        for (const auto& a : rs.roots()) num += m.k(t, x, a);
        const double c = num / (1.0 + r2);
        if (!any || c > rep.margin || !std::isfinite(c)) {
          any = true;
          rep.margin = c;
          rep.witness = fmt_point(t, x);
        }
      }
  rep.margin = std::max(rep.margin, 0.0);
  rep.verdict = std::isfinite(rep.margin) ? Verdict::Pass : Verdict::Fail;
  rep.detail = "C_T estimate";
  return rep;
}

namespace {

struct PairSample {
  double t;
  std::vector<double> x, y;
};

std::vector<PairSample> chamber_pairs(const CoefficientModel& m, const RootSystem& rs,
                                      const CheckGrid& g, std::uint64_t stream) {
  Stream rng(g.seed, stream);
  const auto ts = time_grid(m, g);
  std::vector<PairSample> out;
  for (int p = 0; p < g.pairs; ++p) {
    const double t = ts[p % ts.size()];
    auto x = random_chamber_point(rs, rng, g.R);
    std::vector<double> y;
    if (p % 2 == 0) {
      y = random_chamber_point(rs, rng, g.R);
    } else {
      y = x;
      const double h = g.R * std::pow(10.0, -1.0 - 3.0 * rng.uniform());
      for (auto& v : y) v += h * rng.normal();
      if (!chamber_contains(rs, y, false)) continue;
    }
    if (x == y) continue;
    out.push_back({t, std::move(x), std::move(y)});
  }
  return out;
}

}  // namespace

AssumptionReport check_sigma_modulus(const CoefficientModel& m, const RootSystem& rs,
                                     const CheckGrid& g) {
  AssumptionReport rep{"U1", Verdict::Pass, 0.0, 0.0, "", ""};
  double lip = 0.0;
  for (const auto& s : chamber_pairs(m, rs, g, 8)) {
    double dx = 0.0;
    for (int i = 0; i < rs.dim(); ++i) dx = std::max(dx, std::abs(s.x[i] - s.y[i]));
    for (int i = 0; i < rs.dim(); ++i) {
      const double ds = std::abs(m.sigma(s.t, s.x, i) - m.sigma(s.t, s.y, i));
      const double h = ds * ds / dx;
      lip = std::max(lip, ds / dx);
      if (h > rep.margin || !std::isfinite(h)) {
        rep.margin = h;
        rep.witness = fmt_point(s.t, s.x) + " vs " + fmt_point(s.t, s.y);
      }
    }
  }
  rep.verdict = std::isfinite(rep.margin) ? Verdict::Pass : Verdict::Fail;
  std::ostringstream os;
  os << "empirical 1/2-Hoelder constant (margin); empirical Lipschitz constant " << lip;
  rep.detail = os.str();
  return rep;
}

AssumptionReport check_drift_monotone(const CoefficientModel& m, const RootSystem& rs,
                                      const CheckGrid& g) {
  AssumptionReport rep{"U2", Verdict::Pass, -INFINITY, 0.0, "", ""};
  for (const auto& s : chamber_pairs(m, rs, g, 9)) {
    double num = 0.0, l1 = 0.0;
    for (int i = 0; i < rs.dim(); ++i) {
      const double d = s.x[i] - s.y[i];
      l1 += std::abs(d);
      num += (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) * (m.drift(s.t, s.x, i) - m.drift(s.t, s.y, i));
    }
    const double v = num / l1;
    if (v > rep.margin || !std::isfinite(v)) {
      rep.margin = v;
      rep.witness = fmt_point(s.t, s.x) + " vs " + fmt_point(s.t, s.y);
    }
  }
  rep.verdict = std::isfinite(rep.margin) ? Verdict::Pass : Verdict::Fail;
  rep.detail = "empirical one-sided l1 Lipschitz constant of b";
  return rep;
}

AssumptionReport check_force_l1_dissipative(const CoefficientModel& m, const RootSystem& rs,
                                            const CheckGrid& g) {
  AssumptionReport rep{"U3", Verdict::Pass, -INFINITY, 1e-9, "", ""};
  for (const auto& s : chamber_pairs(m, rs, g, 10)) {
    const auto Gx = singular_force(m, rs, s.t, s.x);
    const auto Gy = singular_force(m, rs, s.t, s.y);
    double num = 0.0;
    for (int i = 0; i < rs.dim(); ++i) {
      const double d = s.x[i] - s.y[i];
      num += (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) * (Gx[i] - Gy[i]);
    }
    const double v = num / (1.0 + Gx.lpNorm<1>() + Gy.lpNorm<1>());
    if (v > rep.margin || !std::isfinite(v)) {
      rep.margin = v;
      rep.witness = fmt_point(s.t, s.x) + " vs " + fmt_point(s.t, s.y);
    }
  }
  rep.verdict = below(rep.margin, rep.tolerance);
  rep.detail = "max of sum_i sgn(x_i-y_i)(G_i(x)-G_i(y)), scaled";
  return rep;
}

AssumptionReport check_force_monotone(const CoefficientModel& m, const RootSystem& rs,
                                      const CheckGrid& g) {
  AssumptionReport rep{"U3'", Verdict::Pass, -INFINITY, 1e-9, "", ""};
  for (const auto& s : chamber_pairs(m, rs, g, 11)) {
    const auto Gx = singular_force(m, rs, s.t, s.x);
    const auto Gy = singular_force(m, rs, s.t, s.y);
    const Eigen::Map<const Eigen::VectorXd> x(s.x.data(), rs.dim()), y(s.y.data(), rs.dim());
    const double v = (x - y).dot(Gx - Gy) / ((x - y).norm() * (1.0 + Gx.norm() + Gy.norm()));
    if (v > rep.margin || !std::isfinite(v)) {
      rep.margin = v;
      rep.witness = fmt_point(s.t, s.x) + " vs " + fmt_point(s.t, s.y);
    }
  }
  rep.verdict = below(rep.margin, rep.tolerance);
  rep.detail = "max of <x-y, G(x)-G(y)>, scaled";
  return rep;
}

std::vector<FaceSignature> checker_faces(const RootSystem& rs) {
  if (rs.dim() <= 8) return enumerate_faces(rs);
  std::vector<FaceSignature> out;
  Stream rng(1, 12);
  for (const auto& a : rs.roots()) {
    const auto y = random_wall_point(rs, a, rng);
    out.push_back(*face_signature(rs, y));
  }
  return out;
}

const std::vector<std::string>& all_check_ids() {
  static const std::vector<std::string> ids{"C1", "C2", "A1", "D1", "D2", "D3",
                                            "G1", "U1", "U2", "U3", "U3'"};
  return ids;
}

std::vector<AssumptionReport> run_checks(const CoefficientModel& m, const RootSystem& rs,
                                         const std::vector<std::string>& ids, const CheckGrid& g) {
  std::vector<AssumptionReport> out;
  std::vector<FaceSignature> faces;
  auto need_faces = [&] {
    if (faces.empty()) faces = checker_faces(rs);
    return faces;
  };
  for (const auto& id : ids) {
    if (id == "C1") out.push_back(check_nonnegativity(m, rs, g));
    else if (id == "C2") out.push_back(check_sigma_compat(m, rs, g));
    else if (id == "A1") out.push_back(check_positivity(m, rs, g));
    else if (id == "D1") out.push_back(check_dominance(m, rs, g));
    else if (id == "D2") out.push_back(check_face_sign(m, rs, need_faces(), g));
    else if (id == "D3") out.push_back(check_nonsticky(m, rs, need_faces(), g));
    else if (id == "G1") out.push_back(check_growth(m, rs, g));
    else if (id == "U1") out.push_back(check_sigma_modulus(m, rs, g));
    else if (id == "U2") out.push_back(check_drift_monotone(m, rs, g));
    else if (id == "U3") out.push_back(check_force_l1_dissipative(m, rs, g));
    else if (id == "U3'") out.push_back(check_force_monotone(m, rs, g));
    else throw std::invalid_argument("unknown assumption id '" + id + "'");
  }
  return out;
}

}  // namespace weyl
