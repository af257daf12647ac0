#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "weyl/roots.hpp"

namespace weyl {

// Power sums are normalized as p_k = (1/k) sum x_i^k throughout unless stated.

std::vector<double> power_sums(std::span<const double> x, int K, bool normalized);

/// e_1..e_N from normalized p_1..p_N (Newton identities).
std::vector<double> newton_e_from_p(std::span<const double> p);

/// Normalized p_1..p_N from e_1..e_N.
std::vector<double> newton_p_from_e(std::span<const double> e);

/// e_1..e_N of the coordinates.
std::vector<double> elementary(std::span<const double> x);

/// e_k over the coordinates not listed in `excluded`.
double e_excl(std::span<const double> x, int k, std::span<const int> excluded);

/// Quotient with sum_i x_i^{k-1} alpha_i = <x,alpha> F_{alpha,k}(x).
double F_alpha_k(const Root& a, int k, std::span<const double> x);

/// e_{n-2} of the coordinates other than the two in the support of a pair root.
double G_alpha_n(const Root& a, int n, std::span<const double> x);

struct InvariantCoords {
  std::vector<double> u;
  RootType type = RootType::A;
  int n = 0;
};

InvariantCoords w_map(const RootSystem& rs, std::span<const double> x);

class RootFindingError : public std::runtime_error {
 public:
  RootFindingError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

/// All complex roots of a monic polynomial t^n + c[n-1] t^{n-1} + ... + c[0].
std::vector<std::complex<double>> monic_roots(std::span<const double> c);

/// Continuous extension of the inverse of w_map; lands in the closed chamber.
std::vector<double> f_tilde(const RootSystem& rs, std::span<const double> u);
inline std::vector<double> f_tilde(const RootSystem& rs, const InvariantCoords& u) {
  return f_tilde(rs, u.u);
}

/// d x_i / d p_k (row i, column k) for type A, by inverting [x_j^{k-1}].
Eigen::MatrixXd partial_x_wrt_p(std::span<const double> x, double min_gap = 1e-7);

/// Closed form (-1)^{N-k} e_{N-k}(x without x_i) / prod_{j != i}(x_i - x_j).
Eigen::MatrixXd partial_x_wrt_p_closed_form(std::span<const double> x);

/// Determinant of the N x N matrix [x_i^m], m in {0..N} without m = k-1 (1-based k).
double vandermonde_minor(std::span<const double> x, int k);

}  // namespace weyl
