#include "weyl/integrate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "weyl/rng.hpp"
#include "weyl/sympoly.hpp"

namespace weyl {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Direct: return "direct";
    case Scheme::Invariant: return "invariant";
    case Scheme::Both: return "both";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "direct") return Scheme::Direct;
  if (s == "invariant") return Scheme::Invariant;
  if (s == "both") return Scheme::Both;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

void SimConfig::validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(T >= dt)) throw std::invalid_argument("T must be at least dt");
  if (!(kappa > 0 && kappa <= 1)) throw std::invalid_argument("kappa must lie in (0, 1]");
  if (record_stride < 1) throw std::invalid_argument("record_stride must be positive");
  if (wall_eps && !(*wall_eps >= 0)) throw std::invalid_argument("wall_eps must be nonnegative");
  if (!(explosion_radius > 0)) throw std::invalid_argument("explosion_radius must be positive");
}

int SimConfig::steps() const { return int(std::llround(T / dt)); }

std::vector<double> step_direct(const CoefficientModel& m, const RootSystem& rs, double t,
                                std::span<const double> x, std::span<const double> dW,
                                const SimConfig& cfg, StepStats* stats) {
  const int n = rs.dim();
  const double eps = cfg.wall_eps.value_or(m.default_wall_eps);
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = x[i] + m.sigma(t, x, i) * dW[i] + m.drift(t, x, i) * cfg.dt;
  for (const auto& a : rs.roots()) {
    const double g = a.dot(x);
    if (g <= eps) {
      if (stats) ++stats->wall_contacts;
      continue;
    }
    double c = m.k(t, x, a) / g * cfg.dt;
    const double cap = cfg.kappa * g / a.norm2();
    if (c > cap) {
      c = cap;
      if (stats) ++stats->cap_activations;
    }
    y[a.i] += c;
    if (a.is_pair()) y[a.j] += a.coord(a.j) * c;
  }
  if (!chamber_contains(rs, y, true)) {
    project_to_chamber(rs.type(), y);
    if (stats) stats->projected = true;
  }
  return y;
}

namespace {

std::vector<double> invariant_update(const CoefficientModel& m, const RootSystem& rs, double t,
                                     std::span<const double> x, std::span<const double> u,
                                     std::span<const double> dW, double dt) {
  const auto c = u_sde_coeffs(m, rs, t, x);
  const Eigen::VectorXd drift = c.drift();
  const Eigen::Map<const Eigen::VectorXd> w(dW.data(), dW.size());
  const Eigen::VectorXd noise = c.a.transpose() * w;
  std::vector<double> out(u.begin(), u.end());
  for (int k = 0; k < rs.dim(); ++k) out[k] += noise[k] + drift[k] * dt;
  return out;
}

bool escaped(std::span<const double> x, double radius) {
  for (double v : x)
    if (!std::isfinite(v) || std::abs(v) > radius) return true;
  return false;
}

}  // namespace

std::vector<double> step_invariant(const CoefficientModel& m, const RootSystem& rs, double t,
                                   std::span<const double> u, std::span<const double> dW,
                                   const SimConfig& cfg) {
  const auto x = f_tilde(rs, u);
  return invariant_update(m, rs, t, x, u, dW, cfg.dt);
}

NoiseSource counter_noise(std::uint64_t seed, std::uint64_t stream, int n, double dt) {
  const double s = std::sqrt(dt);
  return [gen = CounterNormal(seed), stream, n, s](std::uint64_t step, std::span<double> dW) {
    for (int i = 0; i < n; ++i) dW[i] = s * gen(stream, step, std::uint32_t(i));
  };
}

Trajectory simulate_with_noise(const CoefficientModel& m, const RootSystem& rs,
                               std::span<const double> x0, const SimConfig& cfg,
                               const NoiseSource& noise) {
  cfg.validate();
  const int n = rs.dim();
  if (int(x0.size()) != n) throw std::invalid_argument("simulate: x0 has the wrong dimension");
  if (!chamber_contains(rs, x0, true))
    throw std::invalid_argument("simulate: x0 outside the closed chamber");
  if (cfg.T > m.valid_until)
    throw std::invalid_argument("simulate: horizon exceeds the model's validity limit");
  const double eps = cfg.wall_eps.value_or(m.default_wall_eps);
  const int steps = cfg.steps();
  const bool direct = cfg.scheme != Scheme::Invariant;
  const bool inv = cfg.scheme != Scheme::Direct;

  Trajectory tr;
  tr.n = n;
  tr.n_roots = int(rs.size());
  tr.scheme = cfg.scheme;
  std::vector<double> x(x0.begin(), x0.end()), xs(x), u;
  if (inv) u = w_map(rs, x0).u;
  std::vector<double> A(rs.size(), 0.0), dW(n);

  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.states.insert(tr.states.end(), x.begin(), x.end());
    if (inv) tr.invariant.insert(tr.invariant.end(), u.begin(), u.end());
    if (cfg.scheme == Scheme::Both) tr.shadow.insert(tr.shadow.end(), xs.begin(), xs.end());
    tr.accumulators.insert(tr.accumulators.end(), A.begin(), A.end());
  };
  record(0.0);

  for (int s = 0; s < steps; ++s) {
    const double t = s * cfg.dt;
    noise(std::uint64_t(s), dW);
    for (std::size_t r = 0; r < rs.size(); ++r) {
      const double g = rs[r].dot(x);
      if (g > eps) A[r] += m.k(t, x, rs[r]) / g * cfg.dt;
    }
    try {
      if (direct) {
        StepStats st;
        x = step_direct(m, rs, t, x, dW, cfg, &st);
        tr.events.wall_contacts += st.wall_contacts;
        tr.events.cap_activations += st.cap_activations;
        tr.events.projections += st.projected;
      }
      if (inv) {
        u = invariant_update(m, rs, t, xs, u, dW, cfg.dt);
        xs = escaped(u, INFINITY) ? u : f_tilde(rs, u);
        if (!direct) x = xs;
      }
    } catch (const RootFindingError&) {
      xs.assign(n, NAN);
      if (!direct) x = xs;
    }
    if (escaped(x, cfg.explosion_radius) || (inv && escaped(xs, cfg.explosion_radius))) {
      tr.events.exploded = true;
      tr.events.explosion_time = (s + 1) * cfg.dt;
      break;
    }
    if ((s + 1) % cfg.record_stride == 0 || s + 1 == steps) record((s + 1) * cfg.dt);
  }
  return tr;
}

Trajectory simulate(const CoefficientModel& m, const RootSystem& rs, std::span<const double> x0,
                    const SimConfig& cfg, std::uint64_t stream) {
  return simulate_with_noise(m, rs, x0, cfg, counter_noise(cfg.seed, stream, rs.dim(), cfg.dt));
}

void parallel_for(int M, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = int(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(M, 1));
  if (threads <= 1) {
    for (int k = 0; k < M; ++k) body(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int k; (k = next++) < M;) {
        if (failed) return;
        try {
          body(k);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

std::vector<Trajectory> simulate_ensemble(const CoefficientModel& m, const RootSystem& rs,
                                          std::span<const double> x0, const SimConfig& cfg, int M,
                                          int threads) {
  if (M < 1) throw std::invalid_argument("ensemble size must be positive");
  std::vector<Trajectory> out(M);
  parallel_for(M, threads, [&](int k) { out[k] = simulate(m, rs, x0, cfg, std::uint64_t(k)); });
  return out;
}

bool DiscrepancyReport::monotone() const {
  for (std::size_t l = 1; l < discrepancy.size(); ++l)
    if (!(discrepancy[l] < discrepancy[l - 1])) return false;
  return true;
}

double DiscrepancyReport::min_ratio() const {
  double r = INFINITY;
  for (double v : ratios) r = std::min(r, v);
  return r;
}

DiscrepancyReport shared_noise_compare(const CoefficientModel& m, const RootSystem& rs,
                                       std::span<const double> x0, const SimConfig& cfg,
                                       int halvings, int paths, int threads) {
  if (halvings < 0 || halvings > 20) throw std::invalid_argument("halvings out of range");
  const int n = rs.dim();
  const double dt_fine = cfg.dt / double(1 << halvings);
  DiscrepancyReport rep;
  rep.paths = paths;
  std::vector<std::vector<double>> sup(halvings + 1, std::vector<double>(paths, 0.0));
  for (int l = 0; l <= halvings; ++l) rep.dts.push_back(cfg.dt / double(1 << l));
  parallel_for(paths, threads, [&](int p) {
    const auto fine = counter_noise(cfg.seed, std::uint64_t(p), n, dt_fine);
    for (int l = 0; l <= halvings; ++l) {
      const std::uint64_t factor = std::uint64_t(1) << (halvings - l);
      SimConfig c = cfg;
      c.dt = rep.dts[l];
      c.scheme = Scheme::Both;
      c.record_stride = 1;
      NoiseSource coarse = [&fine, factor, n](std::uint64_t step, std::span<double> dW) {
        std::vector<double> buf(n);
        std::fill(dW.begin(), dW.end(), 0.0);
        for (std::uint64_t q = 0; q < factor; ++q) {
          fine(step * factor + q, buf);
          for (int i = 0; i < n; ++i) dW[i] += buf[i];
        }
      };
      const auto tr = simulate_with_noise(m, rs, x0, c, coarse);
      double d = tr.events.exploded ? INFINITY : 0.0;
      for (std::size_t r = 0; r < tr.size(); ++r)
        for (int i = 0; i < n; ++i)
          d = std::max(d, std::abs(tr.state(r)[i] - tr.shadow_state(r)[i]));
      sup[l][p] = d;
    }
  });
  for (int l = 0; l <= halvings; ++l) {
    double s = 0.0;
    for (double v : sup[l]) s += v;
    rep.discrepancy.push_back(s / paths);
  }
  for (int l = 0; l < halvings; ++l)
    rep.ratios.push_back(rep.discrepancy[l] / rep.discrepancy[l + 1]);
  return rep;
}

}  // namespace weyl
