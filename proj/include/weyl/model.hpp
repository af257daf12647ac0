#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "weyl/roots.hpp"

namespace weyl {

using CoordinateField = std::function<double(double t, std::span<const double> x, int i)>;
using RootField = std::function<double(double t, std::span<const double> x, const Root& a)>;

/// Coefficients sigma_i, b_i, k_alpha of the singular system
///   dX_i = sigma_i dB_i + (b_i + sum_alpha alpha_i k_alpha / <X,alpha>) dt.
struct CoefficientModel {
  std::string name;
  CoordinateField sigma;
  CoordinateField drift;
  RootField k;
  double valid_until = std::numeric_limits<double>::infinity();
  double default_wall_eps = 0.0;
  std::vector<std::string> advertised;
  std::vector<std::pair<std::string, double>> parameters;
};

CoefficientModel zero_model(std::string name = "zero");

Eigen::VectorXd sigma_vector(const CoefficientModel& m, double t, std::span<const double> x);
Eigen::VectorXd drift_vector(const CoefficientModel& m, double t, std::span<const double> x);

/// G = sum_alpha alpha k_alpha / <x,alpha>, terms with <x,alpha> <= wall_eps dropped.
Eigen::VectorXd singular_force(const CoefficientModel& m, const RootSystem& rs, double t,
                               std::span<const double> x, double wall_eps = 0.0);

double a_alpha(const CoefficientModel& m, double t, std::span<const double> x, const Root& a);

class LocalizationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// B_{S,u}; throws LocalizationError if some root outside S has gap <= tol.
double detector_drift(const CoefficientModel& m, const RootSystem& rs, const FaceSignature& face,
                      const Eigen::VectorXd& u, double t, std::span<const double> x,
                      double tol = 1e-12);

double q_S_u(const CoefficientModel& m, const Eigen::VectorXd& u, double t,
             std::span<const double> x);

/// Coefficients of the invariant-coordinate system; column k is invariant k+1.
struct UCoefficients {
  Eigen::MatrixXd a;  // a(i,k)
  Eigen::MatrixXd h;  // h(i,k)
  Eigen::VectorXd Hk; // sum_alpha H_{alpha,k} k_alpha

  Eigen::VectorXd drift() const { return h.colwise().sum().transpose() + Hk; }
};

UCoefficients u_sde_coeffs(const CoefficientModel& m, const RootSystem& rs, double t,
                           std::span<const double> x);

// ---------------------------------------------------------------------------
// Assumption checkers.

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct AssumptionReport {
  std::string id;
  Verdict verdict = Verdict::Pass;
  double margin = 0.0;     // measured quantity the verdict is based on
  double tolerance = 0.0;
  std::string witness;     // worst case: time, point, root or face
  std::string detail;
};

struct CheckGrid {
  double T = 1.0;
  double R = 1.0;
  int time_points = 4;
  int samples = 48;
  int face_samples = 4;
  int pairs = 400;
  std::vector<double> approach{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> bands{1.0, 1e-1, 1e-2, 1e-3};
  std::uint64_t seed = 20240611;
};

AssumptionReport check_nonnegativity(const CoefficientModel& m, const RootSystem& rs,
                                     const CheckGrid& g);
AssumptionReport check_sigma_compat(const CoefficientModel& m, const RootSystem& rs,
                                    const CheckGrid& g);
AssumptionReport check_positivity(const CoefficientModel& m, const RootSystem& rs,
                                  const CheckGrid& g);
AssumptionReport check_dominance(const CoefficientModel& m, const RootSystem& rs,
                                 const CheckGrid& g);
AssumptionReport check_face_sign(const CoefficientModel& m, const RootSystem& rs,
                                 const std::vector<FaceSignature>& faces, const CheckGrid& g);
AssumptionReport check_nonsticky(const CoefficientModel& m, const RootSystem& rs,
                                 const std::vector<FaceSignature>& faces, const CheckGrid& g);
AssumptionReport check_growth(const CoefficientModel& m, const RootSystem& rs, const CheckGrid& g);
AssumptionReport check_sigma_modulus(const CoefficientModel& m, const RootSystem& rs,
                                     const CheckGrid& g);
AssumptionReport check_drift_monotone(const CoefficientModel& m, const RootSystem& rs,
                                      const CheckGrid& g);
AssumptionReport check_force_l1_dissipative(const CoefficientModel& m, const RootSystem& rs,
                                            const CheckGrid& g);
AssumptionReport check_force_monotone(const CoefficientModel& m, const RootSystem& rs,
                                      const CheckGrid& g);

/// Faces used by D2/D3: exhaustive for N <= 8, otherwise walls of single roots.
std::vector<FaceSignature> checker_faces(const RootSystem& rs);

/// Runs the checkers named in `ids` (C1 C2 A1 D1 D2 D3 G1 U1 U2 U3 U3').
std::vector<AssumptionReport> run_checks(const CoefficientModel& m, const RootSystem& rs,
                                         const std::vector<std::string>& ids, const CheckGrid& g);

const std::vector<std::string>& all_check_ids();

}  // namespace weyl
