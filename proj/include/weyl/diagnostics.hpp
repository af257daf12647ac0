#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "weyl/integrate.hpp"
#include "weyl/model.hpp"
#include "weyl/roots.hpp"

namespace weyl {

/// <x, alpha> for every positive root, in canonical order.
std::vector<double> wall_gaps(const RootSystem& rs, std::span<const double> x);

struct OccupationReport {
  std::vector<double> ladder;
  std::vector<std::vector<double>> per_root;  // per_root[l][r]
  std::vector<double> any_wall;               // time with min gap <= eps, per rung
  double horizon = 0.0;
};

/// Left-endpoint Riemann sums over the recorded grid.
OccupationReport occupation_time(const RootSystem& rs, const Trajectory& traj,
                                 const std::vector<double>& ladder);

double cluster_S(const RootSystem& rs, std::span<const Root> phi, std::span<const double> x);
double cluster_h(const RootSystem& rs, std::span<const Root> phi, std::span<const double> x, int k);
double cluster_h_dir(const RootSystem& rs, std::span<const Root> phi, std::span<const double> x,
                     const Root& delta);

/// All clusters with m elements, each as a sorted list of roots. Capped at
/// m <= 4 and N <= 8.
std::vector<std::vector<Root>> enumerate_clusters(const RootSystem& rs, int m);

double q_m(const RootSystem& rs, std::span<const double> x, int m);
/// log q_m, which stays finite when the product overflows; -inf on a degenerate face.
double log_q_m(const RootSystem& rs, std::span<const double> x, int m);

struct QmDrift {
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;
};

class DegenerateClusterError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Drift terms of log q_m along the system; h3 in the desingularized form.
QmDrift Qm_drift(const CoefficientModel& model, const RootSystem& rs, double t,
                 std::span<const double> x, int m);

/// h3 from the defining singular sum (diverges at walls).
double h3_naive(const CoefficientModel& model, const RootSystem& rs, double t,
                std::span<const double> x, int m);

/// h3 from the rearranged, singularity-free sum.
double h3_desingularized(const CoefficientModel& model, const RootSystem& rs, double t,
                         std::span<const double> x, int m);

struct CollisionEvent {
  double t = 0.0;
  Root first;
  Root second;
};

/// Recorded times t > 0 with two distinct roots sharing a coordinate both at gap <= eps.
std::vector<CollisionEvent> multiple_collision_scan(const RootSystem& rs, const Trajectory& traj,
                                                    double eps);

struct DetectorSample {
  double t = 0.0;
  bool inside = false;  // within the localized neighborhood
  double tau = 0.0;
  double B = 0.0;
  double q = 0.0;
};

/// tau_u, B_{S,u}, q_{S,u} along the path; B and q are NaN outside U_{S,eta,r}.
std::vector<std::vector<DetectorSample>> detector_trace(const CoefficientModel& model,
                                                        const RootSystem& rs,
                                                        const Trajectory& traj,
                                                        const FaceSignature& face,
                                                        const std::vector<Detector>& detectors,
                                                        double eta = 1e-3, double radius = 1e6);

}  // namespace weyl
