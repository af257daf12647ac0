#include "weyl/meanfield.hpp"

#include <cmath>
#include <stdexcept>

#include "weyl/model.hpp"

namespace weyl {

double EmpiricalMeasure::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (double a : atoms) s += f(a);
  return s * weight;
}

EmpiricalMeasure empirical(const RootSystem& rs, std::span<const double> x, DAtoms d) {
  EmpiricalMeasure mu;
  const int n = rs.dim();
  if (rs.type() == RootType::D) {
    if (d == DAtoms::Leading) {
      mu.atoms.assign(x.begin(), x.begin() + (n - 1));
    } else {
      for (double v : x) mu.atoms.push_back(std::abs(v));
    }
  } else {
    mu.atoms.assign(x.begin(), x.end());
  }
  if (mu.atoms.empty()) throw std::invalid_argument("empirical: no atoms (type D needs N >= 2)");
  mu.weight = 1.0 / double(mu.atoms.size());
  return mu;
}

TestFunction monomial(int p) {
  if (p < 1) throw std::invalid_argument("monomial: degree must be >= 1");
  TestFunction tf;
  tf.name = p == 1 ? "x" : "x^" + std::to_string(p);
  tf.f = [p](double x) { return std::pow(x, p); };
  tf.df = [p](double x) { return p * std::pow(x, p - 1); };
  tf.d2f = [p](double x) { return p == 1 ? 0.0 : p * (p - 1) * std::pow(x, p - 2); };
  return tf;
}

std::vector<TestFunction> default_test_functions(RootType type) {
  if (type == RootType::A) return {monomial(1), monomial(2), monomial(3), monomial(4)};
  return {monomial(2), monomial(4)};
}

double D_f_minus(const TestFunction& f, double x, double y) {
  if (x == y) return f.d2f(x);
  return (f.df(x) - f.df(y)) / (x - y);
}

double D_f_plus(const TestFunction& f, double x, double y) {
  if (x < 0 || y < 0) throw std::domain_error("D_f_plus: arguments must be nonnegative");
  if (x + y > 0) return (f.df(x) + f.df(y)) / (x + y);
  if (f.df(0.0) != 0.0) throw std::domain_error("D_f_plus: f'(0) != 0 at x = y = 0");
  return f.d2f(0.0);
}

double D_f(RootType type, const TestFunction& f, double x, double y) {
  if (type == RootType::A) return D_f_minus(f, x, y);
  return D_f_minus(f, x, y) + D_f_plus(f, x, y);
}

double limit_rhs(RootType type, const EmpiricalMeasure& mu, const TestFunction& f, double t,
                 const MeanFieldCoefficients& c) {
  double drift = 0.0, shortterm = 0.0, pair = 0.0;
  for (double x : mu.atoms) {
    drift += c.drift(t, x) * f.df(x);
    if (type == RootType::B) {
      if (!c.k_short) throw std::invalid_argument("limit_rhs: type B needs a short-root k");
      shortterm += x == 0.0 ? c.k_short(t, 0.0) * f.d2f(0.0) : c.k_short(t, x) * f.df(x) / x;
    }
  }
  for (double x : mu.atoms)
    for (double y : mu.atoms) pair += D_f(type, f, x, y) * c.k_pair(t, x, y);
  const double w = mu.weight;
  return w * drift + w * shortterm + 0.5 * w * w * pair;
}

double finite_generator(const System& s, std::span<const double> x, const TestFunction& f,
                        double t, DAtoms d) {
  const auto& rs = s.rs;
  const int n = rs.dim();
  const Eigen::VectorXd sig = sigma_vector(s.model, t, x);
  const Eigen::VectorXd b = drift_vector(s.model, t, x);
  const Eigen::VectorXd g = singular_force(s.model, rs, t, x);
  const bool d_type = rs.type() == RootType::D;
  int count = n;
  if (d_type && d == DAtoms::Leading) count = n - 1;
  double acc = 0.0;
  for (int i = 0; i < count; ++i) {
    double xi = x[i], sgn = 1.0;
    if (d_type && xi < 0) {
      xi = -xi;
      sgn = -1.0;
    }
    // chain rule for |x_N| in the magnitude variant
    acc += sgn * f.df(xi) * (b[i] + g[i]) + 0.5 * f.d2f(xi) * sig[i] * sig[i];
  }
  return acc / count;
}

std::vector<ResidualStats> residual_check(const RootSystem& rs,
                                          const std::vector<Trajectory>& paths,
                                          const std::vector<TestFunction>& fs,
                                          const MeanFieldCoefficients& c, int cadence, DAtoms d) {
  if (cadence < 1) throw std::invalid_argument("residual_check: cadence must be >= 1");
  std::vector<ResidualStats> out(fs.size());
  for (std::size_t q = 0; q < fs.size(); ++q) out[q].name = fs[q].name;
  for (const auto& tr : paths) {
    const std::size_t len = tr.size();
    std::vector<std::vector<double>> vals(fs.size(), std::vector<double>(len));
    std::vector<EmpiricalMeasure> mus;
    mus.reserve(len);
    for (std::size_t r = 0; r < len; ++r) {
      mus.push_back(empirical(rs, tr.state(r), d));
      for (std::size_t q = 0; q < fs.size(); ++q) vals[q][r] = mus[r].integrate(fs[q].f);
    }
    for (std::size_t q = 0; q < fs.size(); ++q) {
      double sum = 0.0;
      int cnt = 0;
      for (std::size_t r = cadence; r + cadence < len; r += cadence) {
        const double dt = tr.times[r + cadence] - tr.times[r - cadence];
        const double deriv = (vals[q][r + cadence] - vals[q][r - cadence]) / dt;
        sum += deriv - limit_rhs(rs.type(), mus[r], fs[q], tr.times[r], c);
        ++cnt;
      }
      out[q].per_path.push_back(cnt > 0 ? sum / cnt : NAN);
      out[q].samples = cnt;
    }
  }
  for (auto& st : out) {
    const double m = double(st.per_path.size());
    if (m == 0) continue;
    double s = 0.0, sa = 0.0;
    for (double v : st.per_path) {
      s += v;
      sa += std::abs(v);
    }
    st.mean = s / m;
    st.mean_abs = sa / m;
    double var = 0.0;
    for (double v : st.per_path) var += (v - st.mean) * (v - st.mean);
    st.sd = m > 1 ? std::sqrt(var / (m - 1)) : 0.0;
  }
  return out;
}

DysonMoments dyson_moment_reference(double beta, double m2_0, double m4_0, double t, double m1_0) {
  return {m1_0, m2_0 + beta * t, m4_0 + 4 * beta * m2_0 * t + 2 * beta * beta * t * t};
}

}  // namespace weyl
