#include "weyl/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace weyl {

namespace {

// Decreasing levels for `count` blocks; positive unless type A.
std::vector<double> random_levels(RootType type, int count, bool floor_at_zero, Stream& rng,
                                  double scale) {
  std::vector<double> lv(count);
  const double step = scale / std::max(1, count);
  double cur = 0.0;
  for (int b = count - 1; b >= 0; --b) {
    cur += step * rng.uniform(0.05, 2.0);
    lv[b] = cur;
  }
  if (type == RootType::A && !floor_at_zero && count > 0) {
    // roughly centered: the inverse invariant map degrades with a large common offset
    const double shift = 0.5 * (lv.front() + lv.back()) + rng.uniform(-0.25, 0.25) * scale;
    for (auto& v : lv) v -= shift;
  }
  return lv;
}

}  // namespace

std::vector<double> random_chamber_point(const RootSystem& rs, Stream& rng, double scale) {
  const int n = rs.dim();
  auto x = random_levels(rs.type(), n, false, rng, scale);
  if (rs.type() == RootType::D) {
    const double bound = n >= 2 ? x[n - 2] : scale;
    x[n - 1] = rng.uniform(-0.95, 0.95) * bound;
  }
  return x;
}

std::vector<double> random_face_point(const RootSystem& rs, const FaceSignature& face, Stream& rng,
                                      double scale) {
  const int n = rs.dim();
  const auto& w = face.witness;
  const bool mixed = rs.type() == RootType::D && w[n - 1] < 0 &&
                     std::abs(w[n - 2] + w[n - 1]) <= 1e-9;
  const int m = mixed ? n - 1 : n;
  auto blocks = equality_blocks(std::span<const double>(w.data(), m));
  const bool zero_block = rs.type() != RootType::A && std::abs(blocks.back().level) <= 1e-9;
  const int free = int(blocks.size()) - (zero_block ? 1 : 0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto lv = random_levels(rs.type(), free, zero_block, rng, scale);
    std::vector<double> y(n, 0.0);
    for (int b = 0; b < free; ++b)
      for (int p = blocks[b].start; p < blocks[b].start + blocks[b].size; ++p) y[p] = lv[b];
    if (mixed) y[n - 1] = -y[n - 2];
    if (rs.type() == RootType::D && !mixed && !zero_block && blocks.back().size == 1 && n >= 2 &&
        blocks.back().start == n - 1) {
      y[n - 1] = rng.uniform(-0.95, 0.95) * y[n - 2];
    }
    auto f = face_signature(rs, y);
    if (f && f->roots == face.roots) return y;
  }
  throw std::logic_error("random_face_point: could not reproduce face pattern");
}

std::vector<double> random_wall_point(const RootSystem& rs, const Root& a, Stream& rng,
                                      double scale) {
  const int n = rs.dim();
  std::vector<double> y(n);
  for (int p = 0; p < n; ++p) y[p] = double(n - p);
  auto fill = [&](int from, int to, double v) {
    for (int p = from; p <= to; ++p) y[p] = v;
  };
  switch (a.kind) {
    case RootKind::PairMinus:
      fill(a.i, a.j, y[a.i]);
      if (rs.type() != RootType::A)
        for (int p = a.j + 1; p < n; ++p) y[p] = 0.5 * double(n - p);
      break;
    case RootKind::Short:
      fill(a.i, n - 1, 0.0);
      break;
    case RootKind::PairPlus:
      if (rs.type() == RootType::D && a.j == n - 1) {
        fill(a.i, n - 2, y[a.i]);
        y[n - 1] = -y[a.i];
      } else {
        fill(a.i, n - 1, 0.0);
      }
      break;
  }
  auto f = face_signature(rs, y);
  if (!f || !f->contains(a)) throw std::logic_error("random_wall_point: construction failed");
  return random_face_point(rs, *f, rng, scale);
}

std::vector<double> approach_wall(const RootSystem& rs, const std::vector<double>& y, const Root& a,
                                  double gap, Stream& rng) {
  auto d = random_chamber_point(rs, rng, 1.0);
  const double c = a.dot(d);
  std::vector<double> x(y);
  for (int p = 0; p < rs.dim(); ++p) x[p] += (gap - a.dot(y)) / c * d[p];
  return x;
}

}  // namespace weyl
