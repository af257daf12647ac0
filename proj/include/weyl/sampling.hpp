#pragma once

#include <vector>

#include "weyl/rng.hpp"
#include "weyl/roots.hpp"

namespace weyl {

/// Random point of the open chamber, coordinates of order `scale`.
std::vector<double> random_chamber_point(const RootSystem& rs, Stream& rng, double scale = 1.0);

/// Random point with the same vanishing set as `face`.
std::vector<double> random_face_point(const RootSystem& rs, const FaceSignature& face, Stream& rng,
                                      double scale = 1.0);

/// Random closed-chamber point on the wall of `a`, as generic as the chamber allows.
std::vector<double> random_wall_point(const RootSystem& rs, const Root& a, Stream& rng,
                                      double scale = 1.0);

/// Moves a closed-chamber point y into the open chamber so that <x,a> = gap.
std::vector<double> approach_wall(const RootSystem& rs, const std::vector<double>& y, const Root& a,
                                  double gap, Stream& rng);

}  // namespace weyl
