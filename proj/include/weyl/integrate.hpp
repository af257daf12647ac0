#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weyl/model.hpp"
#include "weyl/roots.hpp"

namespace weyl {

enum class Scheme { Direct, Invariant, Both };
std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct SimConfig {
  double dt = 1e-3;
  double T = 1.0;
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::Direct;
  std::optional<double> wall_eps;  // model default when absent
  double kappa = 0.5;
  int record_stride = 1;
  double explosion_radius = 1e8;

  void validate() const;
  int steps() const;
};

struct EventLog {
  std::uint64_t wall_contacts = 0;   // singular terms dropped by the indicator
  std::uint64_t cap_activations = 0;
  std::uint64_t projections = 0;     // direct steps that left the chamber
  bool exploded = false;
  double explosion_time = 0.0;
};

/// Row-major storage; `states` holds the chamber path (direct path for Both),
/// `invariant` the U path and `shadow` = f~(U) when both schemes ran.
struct Trajectory {
  int n = 0;
  int n_roots = 0;
  Scheme scheme = Scheme::Direct;
  std::vector<double> times;
  std::vector<double> states;
  std::vector<double> invariant;
  std::vector<double> shadow;
  std::vector<double> accumulators;
  EventLog events;

  std::size_t size() const { return times.size(); }
  std::span<const double> state(std::size_t r) const { return {states.data() + r * n, std::size_t(n)}; }
  std::span<const double> shadow_state(std::size_t r) const { return {shadow.data() + r * n, std::size_t(n)}; }
  std::span<const double> invariant_state(std::size_t r) const {
    return {invariant.data() + r * n, std::size_t(n)};
  }
  std::span<const double> accumulator(std::size_t r) const {
    return {accumulators.data() + r * n_roots, std::size_t(n_roots)};
  }
};

struct StepStats {
  std::uint64_t wall_contacts = 0;
  std::uint64_t cap_activations = 0;
  bool projected = false;
};

/// One Euler step of the singular system with drift capping and chamber projection.
std::vector<double> step_direct(const CoefficientModel& m, const RootSystem& rs, double t,
                                std::span<const double> x, std::span<const double> dW,
                                const SimConfig& cfg, StepStats* stats = nullptr);

/// One Euler step of the invariant-coordinate system.
std::vector<double> step_invariant(const CoefficientModel& m, const RootSystem& rs, double t,
                                   std::span<const double> u, std::span<const double> dW,
                                   const SimConfig& cfg);

/// Fills dW for step `step` (size N, variance dt).
using NoiseSource = std::function<void(std::uint64_t step, std::span<double> dW)>;

NoiseSource counter_noise(std::uint64_t seed, std::uint64_t stream, int n, double dt);

Trajectory simulate_with_noise(const CoefficientModel& m, const RootSystem& rs,
                               std::span<const double> x0, const SimConfig& cfg,
                               const NoiseSource& noise);

Trajectory simulate(const CoefficientModel& m, const RootSystem& rs, std::span<const double> x0,
                    const SimConfig& cfg, std::uint64_t stream = 0);

/// Trajectory m uses stream m. `threads` <= 0 uses hardware concurrency.
std::vector<Trajectory> simulate_ensemble(const CoefficientModel& m, const RootSystem& rs,
                                          std::span<const double> x0, const SimConfig& cfg, int M,
                                          int threads = 1);

/// Calls body(m) for m in [0, M) on a pool; order of completion is irrelevant.
void parallel_for(int M, int threads, const std::function<void(int)>& body);

struct DiscrepancyReport {
  std::vector<double> dts;
  std::vector<double> discrepancy;  // mean over paths of sup_t |X_direct - f~(U)|_inf
  std::vector<double> ratios;       // discrepancy[l] / discrepancy[l+1]
  int paths = 0;
  bool monotone() const;
  double min_ratio() const;
};

/// Runs both schemes on shared, nested Brownian increments at cfg.dt / 2^l for
/// l = 0..halvings and reports the sup-norm discrepancy per level.
DiscrepancyReport shared_noise_compare(const CoefficientModel& m, const RootSystem& rs,
                                       std::span<const double> x0, const SimConfig& cfg,
                                       int halvings = 3, int paths = 1, int threads = 1);

}  // namespace weyl
