#include "weyl/presets.hpp"

#include <cmath>
#include <sstream>

namespace weyl {

namespace {

CoordinateField constant_field(double v) {
  return [v](double, std::span<const double>, int) { return v; };
}

}  // namespace

System log_root_barrier(RootSystem rs, RootTimeFunction m, CoordinateField sigma,
                        CoordinateField drift) {
  CoefficientModel model;
  model.name = "log_root_barrier";
  model.sigma = std::move(sigma);
  model.drift = std::move(drift);
  model.k = [m = std::move(m)](double t, std::span<const double>, const Root& a) { return m(t, a); };
  model.advertised = {"C1", "C2", "A1", "G1"};
  return {std::move(rs), std::move(model)};
}

System dyson(int n, double beta) {
  if (!(beta > 0)) throw std::invalid_argument("dyson: beta must be positive");
  const double k = beta / 2;
  auto s = log_root_barrier(
      RootSystem(RootType::A, n), [k](double, const Root&) { return k; }, constant_field(1.0),
      constant_field(0.0));
  s.model.name = "dyson";
  s.model.parameters = {{"N", double(n)}, {"beta", beta}};
  s.model.advertised = {"C1", "C2", "A1", "G1", "U3", "U3'"};
  return s;
}

System constant_repulsion(RootType type, int n, double k) {
  if (!(k > 0)) throw std::invalid_argument("constant_repulsion: k must be positive");
  auto s = log_root_barrier(
      RootSystem(type, n), [k](double, const Root&) { return k; }, constant_field(1.0),
      constant_field(0.0));
  s.model.name = "constant_repulsion";
  s.model.parameters = {{"N", double(n)}, {"k", k}};
  s.model.advertised = {"C1", "C2", "A1", "G1", "U3", "U3'"};
  return s;
}

WishartParams resolve_wishart_thetas(WishartParams p) {
  if (p.theta0.has_value() != p.theta_plus.has_value())
    throw std::invalid_argument("beta_wishart: give both thetas or neither");
  if (!p.theta0) {
    p.theta_plus = p.beta;
    p.theta0 = (p.delta - p.beta * (p.n - 1)) / 2;
  }
  return p;
}

std::vector<double> wishart_thresholds(const WishartParams& in) {
  const auto p = resolve_wishart_thetas(in);
  std::vector<double> c(p.n);
  for (int r = 1; r <= p.n; ++r)
    c[r - 1] = p.delta - *p.theta0 - (p.n - r) * p.beta - (r - 1) * *p.theta_plus;
  return c;
}

System beta_wishart(WishartParams in, bool validate) {
  const auto p = resolve_wishart_thetas(in);
  if (p.n < 1) throw std::invalid_argument("beta_wishart: N must be positive");
  if (validate) {
    if (!(p.beta > 0)) throw WishartParameterError("beta_wishart: beta must be positive", 0, p.beta);
    const auto c = wishart_thresholds(p);
    for (int r = 1; r <= p.n; ++r)
      if (!(c[r - 1] > 0)) {
        std::ostringstream os;
        os << "beta_wishart: face threshold C_" << r << " = " << c[r - 1] << " is not positive";
        throw WishartParameterError(os.str(), r, c[r - 1]);
      }
    if (!(*p.theta0 > 0))
      throw WishartParameterError("beta_wishart: theta0 must be positive", 0, *p.theta0);
    if (!(*p.theta_plus > 0))
      throw WishartParameterError("beta_wishart: theta_plus must be positive", 0, *p.theta_plus);
  }
  const double beta = p.beta, th0 = *p.theta0, thp = *p.theta_plus;
  const double base = p.delta - th0 - (p.n - 1) * thp, gamma = p.gamma;
  CoefficientModel m;
  m.name = "beta_wishart";
  m.sigma = [](double, std::span<const double> x, int i) { return 2.0 * std::sqrt(std::max(0.0, x[i])); };
  m.drift = [base, gamma](double, std::span<const double> x, int i) { return base - 2 * gamma * x[i]; };
  m.k = [beta, th0, thp](double, std::span<const double> x, const Root& a) {
    switch (a.kind) {
      case RootKind::PairMinus: return beta * (x[a.i] + x[a.j]);
      case RootKind::PairPlus: return thp * (x[a.i] + x[a.j]);
      case RootKind::Short: return th0 * x[a.i];
    }
    return 0.0;
  };
  m.default_wall_eps = 1e-10;
  m.advertised = {"C1", "C2", "D1", "D2", "D3", "G1"};
  m.parameters = {{"N", double(p.n)}, {"beta", beta},   {"delta", p.delta},
                  {"gamma", gamma},   {"theta0", th0}, {"theta_plus", thp}};
  return {RootSystem(RootType::B, p.n), std::move(m)};
}

double wishart_interior_residual(const System& s, const WishartParams& p,
                                 std::span<const double> x) {
  const int n = s.rs.dim();
  const auto G = singular_force(s.model, s.rs, 0.0, x);
  double err = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    double want = p.delta - 2 * p.gamma * x[i];
    for (int j = 0; j < n; ++j)
      if (j != i) want += p.beta * (x[i] + x[j]) / (x[i] - x[j]);
    const double got = s.model.drift(0.0, x, i) + G[i];
    err = std::max(err, std::abs(got - want));
    scale = std::max(scale, std::abs(want));
  }
  return err / std::max(1.0, scale);
}

System abs_squared_bessel_A(int n, double beta, double delta, double gamma) {
  if (!(beta > 0)) throw std::invalid_argument("abs_squared_bessel_A: beta must be positive");
  CoefficientModel m;
  m.name = "abs_squared_bessel_A";
  m.sigma = [](double, std::span<const double> x, int i) { return 2.0 * std::sqrt(std::abs(x[i])); };
  m.drift = [delta, gamma](double, std::span<const double> x, int i) { return delta - 2 * gamma * x[i]; };
  m.k = [beta](double, std::span<const double> x, const Root& a) {
    return beta * (std::abs(x[a.i]) + std::abs(x[a.j]));
  };
  m.default_wall_eps = 1e-10;
  m.advertised = {"C1", "C2", "D1", "D2", "G1"};
  m.parameters = {{"N", double(n)}, {"beta", beta}, {"delta", delta}, {"gamma", gamma}};
  return {RootSystem(RootType::A, n), std::move(m)};
}

System gm_pair_system(int n, CoordinateField sigma, CoordinateField drift, PairFunction H) {
  for (double u : {-1.3, 0.0, 0.4, 2.5})
    for (double v : {-0.7, 0.2, 1.9})
      for (double t : {0.0, 0.5}) {
        const double a = H(t, u, v), b = H(t, v, u);
        if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a)))
          throw std::invalid_argument("gm_pair_system: H must be symmetric in its spatial arguments");
      }
  CoefficientModel m;
  m.name = "gm_pair_system";
  m.sigma = std::move(sigma);
  m.drift = std::move(drift);
  m.k = [H = std::move(H)](double t, std::span<const double> x, const Root& a) {
    return H(t, x[a.i], x[a.j]);
  };
  m.advertised = {"C1", "G1"};
  m.parameters = {{"N", double(n)}};
  return {RootSystem(RootType::A, n), std::move(m)};
}

namespace {

System bridge(RootType type, int n, double t_bridge) {
  if (!(t_bridge > 0)) throw std::invalid_argument("bridge: terminal time must be positive");
  CoefficientModel m;
  m.name = type == RootType::A ? "bridge_A" : "bridge_B";
  m.sigma = constant_field(1.0);
  m.drift = [t_bridge](double t, std::span<const double> x, int i) { return -x[i] / (t_bridge - t); };
  m.k = [](double, std::span<const double>, const Root&) { return 1.0; };
  m.valid_until = t_bridge;
  m.advertised = {"C1", "C2", "A1", "G1"};
  m.parameters = {{"N", double(n)}, {"T_bridge", t_bridge}};
  return {RootSystem(type, n), std::move(m)};
}

}  // namespace

System bridge_A(int n, double t_bridge) { return bridge(RootType::A, n, t_bridge); }
System bridge_B(int n, double t_bridge) { return bridge(RootType::B, n, t_bridge); }

System bessel_rank1(double k0) {
  if (!(k0 > 0)) throw std::invalid_argument("bessel_rank1: k0 must be positive");
  auto s = constant_repulsion(RootType::B, 1, k0);
  s.model.name = "bessel_rank1";
  s.model.parameters = {{"k0", k0}, {"dimension", bessel_dimension(k0)}};
  s.model.advertised = {"C1", "A1", "G1"};
  return s;
}

MeanFieldCoefficients dyson_meanfield_coefficients(double beta) {
  return {[](double, double) { return 1.0; }, [](double, double) { return 0.0; },
          [beta](double, double, double) { return beta; }, [](double, double) { return 0.0; }};
}

System meanfield_system(RootType type, int n, MeanFieldCoefficients c) {
  const double sn = 1.0 / std::sqrt(double(n)), inv = 1.0 / n;
  const bool d = type == RootType::D;
  auto arg = [d, n](std::span<const double> x, int i) {
    return d && i == n - 1 ? std::abs(x[i]) : x[i];
  };
  CoefficientModel m;
  m.name = "meanfield_system";
  m.sigma = [c, sn, arg](double t, std::span<const double> x, int i) { return sn * c.sigma(t, arg(x, i)); };
  m.drift = [c, arg](double t, std::span<const double> x, int i) { return c.drift(t, arg(x, i)); };
  m.k = [c, inv, arg](double t, std::span<const double> x, const Root& a) {
    if (a.kind == RootKind::Short) return c.k_short(t, x[a.i]);
    return inv * c.k_pair(t, arg(x, a.i), arg(x, a.j));
  };
  m.advertised = {"C1", "G1"};
  m.parameters = {{"N", double(n)}};
  return {RootSystem(type, n), std::move(m)};
}

}  // namespace weyl
