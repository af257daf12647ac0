#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "weyl/model.hpp"
#include "weyl/roots.hpp"

namespace weyl {

struct System {
  RootSystem rs;
  CoefficientModel model;
};

using RootTimeFunction = std::function<double(double t, const Root& a)>;

/// k_alpha(t, x) = m(t, alpha) > 0.
System log_root_barrier(RootSystem rs, RootTimeFunction m, CoordinateField sigma,
                        CoordinateField drift);

/// Type A, sigma = 1, b = 0, k = beta / 2 on every root.
System dyson(int n, double beta);

/// sigma = 1, b = 0, k constant on every root of the system.
System constant_repulsion(RootType type, int n, double k);

struct WishartParams {
  int n = 1;
  double beta = 1.0;
  double delta = 1.0;
  double gamma = 0.0;
  std::optional<double> theta0;      // auto when both thetas are absent
  std::optional<double> theta_plus;
};

class WishartParameterError : public std::invalid_argument {
 public:
  WishartParameterError(const std::string& what, int r, double value)
      : std::invalid_argument(what), r(r), value(value) {}
  int r;        // 1-based failing threshold index, 0 if not a threshold failure
  double value;
};

/// Resolves auto mode: theta_plus = beta, theta0 = (delta - beta(N-1)) / 2.
WishartParams resolve_wishart_thetas(WishartParams p);

/// C_r = delta - theta0 - (N - r) beta - (r - 1) theta_plus, r = 1..N.
std::vector<double> wishart_thresholds(const WishartParams& p);

/// Type B embedding of the beta-Wishart eigenvalue system. With validate, rejects
/// parameters violating C_r > 0 (reporting the failing r) or positivity.
System beta_wishart(WishartParams p, bool validate = true);

/// Relative mismatch between b + G and the eigenvalue drift at interior x.
double wishart_interior_residual(const System& s, const WishartParams& p,
                                 std::span<const double> x);

/// Type A model with sigma_i = 2 sqrt|x_i|, b_i = delta - 2 gamma x_i,
/// k = beta (|x_i| + |x_j|).
System abs_squared_bessel_A(int n, double beta, double delta, double gamma);

using PairFunction = std::function<double(double t, double xi, double xj)>;

/// Type A with k_{e_i - e_j} = H(t, x_i, x_j); H must be symmetric in its last two arguments.
System gm_pair_system(int n, CoordinateField sigma, CoordinateField drift, PairFunction H);

/// Noncolliding Brownian bridge to the origin at time t_bridge.
System bridge_A(int n, double t_bridge);
System bridge_B(int n, double t_bridge);

/// Type B, N = 1, sigma = 1, b = 0, k = k0: Bessel process of dimension 2 k0 + 1.
System bessel_rank1(double k0);
inline double bessel_dimension(double k0) { return 2.0 * k0 + 1.0; }
inline double bessel_index(double k0) { return k0 - 0.5; }

struct MeanFieldCoefficients {
  std::function<double(double t, double x)> sigma;
  std::function<double(double t, double x)> drift;
  std::function<double(double t, double x, double y)> k_pair;
  std::function<double(double t, double x)> k_short;  // type B only
};

MeanFieldCoefficients dyson_meanfield_coefficients(double beta);

/// sigma / sqrt(N), pair k / N, short-root k unscaled.
System meanfield_system(RootType type, int n, MeanFieldCoefficients c);

}  // namespace weyl
