#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "weyl/integrate.hpp"
#include "weyl/presets.hpp"
#include "weyl/roots.hpp"

namespace weyl {

/// Which atoms represent a type D configuration.
enum class DAtoms { Leading, Magnitudes };

struct EmpiricalMeasure {
  std::vector<double> atoms;
  double weight = 0.0;  // 1 / atoms.size()

  double integrate(const std::function<double(double)>& f) const;
};

/// A, B: all coordinates. D: the first N-1 coordinates, or all magnitudes.
EmpiricalMeasure empirical(const RootSystem& rs, std::span<const double> x,
                           DAtoms d = DAtoms::Leading);

struct TestFunction {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
};

/// x^p with exact derivatives.
TestFunction monomial(int p);

/// Monomials x..x^4 for A, x^2 and x^4 for B and D.
std::vector<TestFunction> default_test_functions(RootType type);

double D_f_minus(const TestFunction& f, double x, double y);
/// Requires x, y >= 0; at x = y = 0 requires f'(0) = 0.
double D_f_plus(const TestFunction& f, double x, double y);
double D_f(RootType type, const TestFunction& f, double x, double y);

/// Right-hand side of the limiting equation at measure mu, diagonal pairs included.
double limit_rhs(RootType type, const EmpiricalMeasure& mu, const TestFunction& f, double t,
                 const MeanFieldCoefficients& c);

/// Generator of the finite system applied to x -> <mu_x, f>, at an interior point.
double finite_generator(const System& s, std::span<const double> x, const TestFunction& f,
                        double t, DAtoms d = DAtoms::Leading);

struct ResidualStats {
  std::string name;
  std::vector<double> per_path;  // time-averaged residual of each trajectory
  double mean = 0.0;
  double sd = 0.0;
  double mean_abs = 0.0;
  int samples = 0;               // time points per path
};

/// Central-difference d/dt <mu_t, f> minus limit_rhs, averaged over the interior
/// recorded times of each path. `cadence` counts recorded steps.
std::vector<ResidualStats> residual_check(const RootSystem& rs,
                                          const std::vector<Trajectory>& paths,
                                          const std::vector<TestFunction>& fs,
                                          const MeanFieldCoefficients& c, int cadence = 10,
                                          DAtoms d = DAtoms::Leading);

struct DysonMoments {
  double m1 = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
};

/// Moments of the Dyson limit with constant k = beta; m4 assumes m1_0 = 0.
DysonMoments dyson_moment_reference(double beta, double m2_0, double m4_0, double t,
                                    double m1_0 = 0.0);

}  // namespace weyl
