#include "weyl/sympoly.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/Polynomials>

namespace weyl {

namespace {

// Newton identities with unnormalized power sums P_1..P_n.
std::vector<double> e_from_raw_power(std::span<const double> P) {
  const int n = int(P.size());
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += ((j % 2) ? 1.0 : -1.0) * e[k - j] * P[j - 1];
    e[k] = s / k;
  }
  return {e.begin() + 1, e.end()};
}

// Real parts of the roots of prod (t - r_i) given e_1..e_n, sorted descending.
// max_imag receives the largest imaginary part.
// split receives the start for polishing: conjugate pairs spread to re +- |im|.
std::vector<double> real_roots_from_e(std::span<const double> e, std::vector<double>* split = nullptr) {
  const int n = int(e.size());
  std::vector<double> c(n);
  for (int k = 1; k <= n; ++k) c[n - k] = ((k % 2) ? -1.0 : 1.0) * e[k - 1];
  const auto z = monic_roots(c);
  std::vector<double> r(n);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    r[k] = z[k].real();
    if (!std::isfinite(r[k])) worst = INFINITY;
  }
  if (split) {
    split->resize(n);
    for (int k = 0; k < n; ++k)
      (*split)[k] = z[k].real() + (z[k].imag() > 0 ? 1.0 : -1.0) * std::abs(z[k].imag());
    std::sort(split->begin(), split->end(), std::greater<>());
  }
  if (!std::isfinite(worst)) throw RootFindingError("f_tilde: non-finite polynomial root", worst);
  std::sort(r.begin(), r.end(), std::greater<>());
  return r;
}

std::complex<double> horner(std::span<const double> c, std::complex<double> t,
                            std::complex<double>* deriv) {
  const int n = int(c.size());
  std::complex<double> p = 1.0, dp = 0.0;
  for (int k = n - 1; k >= 0; --k) {
    dp = dp * t + p;
    p = p * t + c[k];
  }
  if (deriv) *deriv = dp;
  return p;
}

// Newton iterations on w(x) = u. Clustered roots lose about sqrt(eps) through the
// polynomial coefficients, while the power-sum system is far better conditioned.
// The result replaces x only if it is an exact preimage in the closed chamber, so
// f~ is unchanged off the image.
void polish_inverse(const RootSystem& rs, std::span<const double> u, std::vector<double> start,
                    std::vector<double>& x) {
  const int n = rs.dim();
  double scale = 1.0;
  for (double v : u) scale = std::max(scale, std::abs(v));
  auto residual = [&](const std::vector<double>& y) {
    const auto w = w_map(rs, y).u;
    Eigen::VectorXd r(n);
    for (int k = 0; k < n; ++k) r[k] = w[k] - u[k];
    return r;
  };
  std::vector<double> y = std::move(start);
  for (int it = 0; it < 12; ++it) {
    const Eigen::VectorXd r = residual(y);
    if (r.cwiseAbs().maxCoeff() <= 1e-13 * scale) break;
    Eigen::MatrixXd J(n, n);
    for (int j = 0; j < n; ++j) {
      for (int k = 1; k <= n; ++k)
        J(k - 1, j) = rs.type() == RootType::A ? std::pow(y[j], k - 1) : std::pow(y[j], 2 * k - 1);
      if (rs.type() == RootType::D) {
        double prod = 1.0;
        for (int i = 0; i < n; ++i)
          if (i != j) prod *= y[i];
        J(n - 1, j) = prod;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd dx = lu.solve(r);
    if (!dx.allFinite()) return;
    for (int j = 0; j < n; ++j) y[j] -= dx[j];
  }
  if (!chamber_contains(rs, y, true)) return;
  if (residual(y).cwiseAbs().maxCoeff() <= 1e-12 * scale) x = std::move(y);
}

}  // namespace

std::vector<double> power_sums(std::span<const double> x, int K, bool normalized) {
  if (K < 1) throw std::invalid_argument("power_sums: K must be positive");
  std::vector<double> p(K, 0.0);
  for (double v : x) {
    double t = 1.0;
    for (int k = 0; k < K; ++k) {
      t *= v;
      p[k] += t;
    }
  }
  if (normalized)
    for (int k = 0; k < K; ++k) p[k] /= (k + 1);
  return p;
}

std::vector<double> newton_e_from_p(std::span<const double> p) {
  std::vector<double> P(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) P[j] = double(j + 1) * p[j];
  return e_from_raw_power(P);
}

std::vector<double> newton_p_from_e(std::span<const double> e) {
  const int n = int(e.size());
  std::vector<double> P(n, 0.0);
  for (int k = 1; k <= n; ++k) {
    double s = ((k % 2) ? 1.0 : -1.0) * k * e[k - 1];
    for (int j = 1; j < k; ++j) s += ((j % 2) ? 1.0 : -1.0) * e[j - 1] * P[k - j - 1];
    P[k - 1] = s;
  }
  for (int k = 0; k < n; ++k) P[k] /= (k + 1);
  return P;
}

std::vector<double> elementary(std::span<const double> x) {
  const int n = int(x.size());
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k >= 1; --k) e[k] += x[i] * e[k - 1];
  return {e.begin() + 1, e.end()};
}

double e_excl(std::span<const double> x, int k, std::span<const int> excluded) {
  if (k < 0) return 0.0;
  std::vector<double> e(k + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < int(x.size()); ++i) {
    if (std::find(excluded.begin(), excluded.end(), i) != excluded.end()) continue;
    for (int m = k; m >= 1; --m) e[m] += x[i] * e[m - 1];
  }
  return e[k];
}

double F_alpha_k(const Root& a, int k, std::span<const double> x) {
  if (a.kind == RootKind::PairMinus) {
    if (k < 1) throw std::invalid_argument("F_alpha_k: degree must be >= 1");
    double s = 0.0;
    for (int j = 0; j <= k - 2; ++j) s += std::pow(x[a.i], j) * std::pow(x[a.j], k - 2 - j);
    return s;
  }
  if (k < 2 || k % 2 != 0)
    throw std::invalid_argument("F_alpha_k: plus and short roots need an even degree");
  if (a.kind == RootKind::Short) return std::pow(x[a.i], k - 2);
  double s = 0.0;
  for (int j = 0; j <= k - 2; ++j) s += std::pow(x[a.i], j) * std::pow(-x[a.j], k - 2 - j);
  return s;
}

double G_alpha_n(const Root& a, int n, std::span<const double> x) {
  if (!a.is_pair()) throw std::invalid_argument("G_alpha_n: pair root required");
  const int ex[2] = {a.i, a.j};
  return e_excl(x, n - 2, ex);
}

InvariantCoords w_map(const RootSystem& rs, std::span<const double> x) {
  const int n = rs.dim();
  if (int(x.size()) != n) throw std::invalid_argument("w_map: dimension mismatch");
  InvariantCoords out{std::vector<double>(n), rs.type(), n};
  if (rs.type() == RootType::A) {
    out.u = power_sums(x, n, true);
    return out;
  }
  const auto p = power_sums(x, 2 * n, true);
  for (int k = 1; k <= n; ++k) out.u[k - 1] = p[2 * k - 1];
  if (rs.type() == RootType::D) {
    double prod = 1.0;
    for (double v : x) prod *= v;
    out.u[n - 1] = prod;
  }
  return out;
}

std::vector<std::complex<double>> monic_roots(std::span<const double> c) {
  const int n = int(c.size());
  if (n == 0) return {};
  std::vector<std::complex<double>> z(n);
  if (n == 1) {
    z[0] = -c[0];
    return z;
  }
  Eigen::VectorXd coeffs(n + 1);
  for (int k = 0; k < n; ++k) coeffs[k] = c[k];
  coeffs[n] = 1.0;
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
  solver.compute(coeffs);
  const auto& r = solver.roots();
  for (int k = 0; k < n; ++k) {
    std::complex<double> t = r[k], d;
    const std::complex<double> p = horner(c, t, &d);
    if (std::abs(d) > 0.0) {
      const std::complex<double> t2 = t - p / d;
      if (std::abs(horner(c, t2, nullptr)) < std::abs(p)) t = t2;
    }
    z[k] = t;
  }
  return z;
}

std::vector<double> f_tilde(const RootSystem& rs, std::span<const double> u) {
  const int n = rs.dim();
  if (int(u.size()) != n) throw std::invalid_argument("f_tilde: dimension mismatch");
  std::vector<double> x, start;
  if (rs.type() == RootType::A) {
    x = real_roots_from_e(newton_e_from_p(u), &start);
  } else {
    std::vector<double> P(n);
    for (int k = 1; k <= n; ++k) P[k - 1] = 2.0 * k * u[k - 1];
    auto e = e_from_raw_power(P);
    if (rs.type() == RootType::D) e[n - 1] = u[n - 1] * u[n - 1];
    const auto y = real_roots_from_e(e, &start);
    x.resize(n);
    for (int k = 0; k < n; ++k) {
      x[k] = std::sqrt(std::max(0.0, y[k]));
      start[k] = std::sqrt(std::abs(start[k]));
    }
    if (rs.type() == RootType::D && u[n - 1] < 0) {
      x[n - 1] = -x[n - 1];
      start[n - 1] = -start[n - 1];
    }
  }
  polish_inverse(rs, u, std::move(start), x);
  return x;
}

Eigen::MatrixXd partial_x_wrt_p(std::span<const double> x, double min_gap) {
  const int n = int(x.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(x[i] - x[j]) < min_gap)
        throw std::domain_error("partial_x_wrt_p: coordinates closer than the gap threshold");
  Eigen::MatrixXd J(n, n);  // J(k, j) = d p_{k+1} / d x_j = x_j^k
  for (int j = 0; j < n; ++j) {
    double t = 1.0;
    for (int k = 0; k < n; ++k) {
      J(k, j) = t;
      t *= x[j];
    }
  }
  return J.fullPivLu().inverse();
}

Eigen::MatrixXd partial_x_wrt_p_closed_form(std::span<const double> x) {
  const int n = int(x.size());
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    double denom = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != i) denom *= x[i] - x[j];
    const int ex[1] = {i};
    for (int k = 1; k <= n; ++k)
      M(i, k - 1) = (((n - k) % 2) ? -1.0 : 1.0) * e_excl(x, n - k, ex) / denom;
  }
  return M;
}

double vandermonde_minor(std::span<const double> x, int k) {
  const int n = int(x.size());
  if (k < 1 || k > n + 1) throw std::invalid_argument("vandermonde_minor: k out of range");
  Eigen::MatrixXd V(n, n);
  for (int i = 0; i < n; ++i) {
    int col = 0;
    for (int m = 0; m <= n; ++m) {
      if (m == k - 1) continue;
      V(i, col++) = std::pow(x[i], m);
    }
  }
  return V.determinant();
}

}  // namespace weyl
