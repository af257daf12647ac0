#include "weyl/roots.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace weyl {

std::string to_string(RootType t) {
  switch (t) {
    case RootType::A: return "A";
    case RootType::B: return "B";
    case RootType::D: return "D";
  }
  return "?";
}

RootType parse_root_type(std::string_view s) {
  if (s == "A") return RootType::A;
  if (s == "B") return RootType::B;
  if (s == "D") return RootType::D;
  throw std::invalid_argument("unknown root system type '" + std::string(s) + "'");
}

double Root::coord(int k) const {
  if (k == i) return 1.0;
  if (k == j) return kind == RootKind::PairMinus ? -1.0 : 1.0;
  return 0.0;
}

double Root::dot(std::span<const double> x) const {
  switch (kind) {
    case RootKind::PairMinus: return x[i] - x[j];
    case RootKind::PairPlus: return x[i] + x[j];
    case RootKind::Short: return x[i];
  }
  return 0.0;
}

Eigen::VectorXd Root::dense(int n) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v[i] = 1.0;
  if (is_pair()) v[j] = coord(j);
  return v;
}

std::string Root::name() const {
  const std::string a = "e" + std::to_string(i + 1);
  switch (kind) {
    case RootKind::PairMinus: return a + "-e" + std::to_string(j + 1);
    case RootKind::PairPlus: return a + "+e" + std::to_string(j + 1);
    case RootKind::Short: return a;
  }
  return a;
}

double inner(const Root& a, const Root& b) {
  double s = a.coord(b.i) * b.coord(b.i);
  if (b.is_pair()) s += a.coord(b.j) * b.coord(b.j);
  return s;
}

std::optional<SignedRoot> root_from_vector(std::span<const double> v, double tol) {
  std::vector<int> support;
  for (int k = 0; k < int(v.size()); ++k)
    if (std::abs(v[k]) > tol) support.push_back(k);
  auto unit = [&](int k) { return std::abs(std::abs(v[k]) - 1.0) <= tol; };
  if (support.size() == 1 && unit(support[0]))
    return SignedRoot{Root::shortroot(support[0]), v[support[0]] > 0 ? 1 : -1};
  if (support.size() == 2 && unit(support[0]) && unit(support[1])) {
    const int i = support[0], j = support[1];
    const int sign = v[i] > 0 ? 1 : -1;
    const bool same = (v[i] > 0) == (v[j] > 0);
    return SignedRoot{same ? Root::plus(i, j) : Root::minus(i, j), sign};
  }
  return std::nullopt;
}

RootSystem::RootSystem(RootType type, int n) : type_(type), n_(n) {
  if (n < 1) throw std::invalid_argument("root system dimension must be positive");
  if (type == RootType::D && n < 2) throw std::invalid_argument("type D requires N >= 2");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) roots_.push_back(Root::minus(i, j));
  if (type != RootType::A)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) roots_.push_back(Root::plus(i, j));
  if (type == RootType::B)
    for (int i = 0; i < n; ++i) roots_.push_back(Root::shortroot(i));
}

bool RootSystem::contains(const Root& a) const {
  if (a.i < 0 || a.i >= n_) return false;
  if (a.kind == RootKind::Short) return type_ == RootType::B && a.j == -1;
  if (a.j <= a.i || a.j >= n_) return false;
  return a.kind == RootKind::PairMinus || type_ != RootType::A;
}

std::size_t RootSystem::index_of(const Root& a) const {
  if (!contains(a)) throw std::invalid_argument("root " + a.name() + " not in system");
  const std::size_t pairs = std::size_t(n_) * (n_ - 1) / 2;
  if (a.kind == RootKind::Short) return 2 * pairs + a.i;
  const std::size_t p = std::size_t(a.i) * (2 * n_ - a.i - 1) / 2 + (a.j - a.i - 1);
  return a.kind == RootKind::PairMinus ? p : pairs + p;
}

Eigen::MatrixXd RootSystem::root_matrix() const {
  Eigen::MatrixXd m(roots_.size(), n_);
  for (std::size_t r = 0; r < roots_.size(); ++r) m.row(r) = roots_[r].dense(n_).transpose();
  return m;
}

std::vector<double> reflect(std::span<const double> x, const Root& a) {
  std::vector<double> y(x.begin(), x.end());
  const double c = 2.0 * a.dot(x) / a.norm2();
  y[a.i] -= c;
  if (a.is_pair()) y[a.j] -= c * a.coord(a.j);
  return y;
}

SignedRoot reflected_positive(const Root& alpha, const Root& beta) {
  const int n = std::max({alpha.i, alpha.j, beta.i, beta.j}) + 1;
  const Eigen::VectorXd a = alpha.dense(n);
  const auto v = reflect(std::span<const double>(a.data(), n), beta);
  auto r = root_from_vector(v);
  if (!r) throw std::logic_error("reflection of a root is not a root");
  return *r;
}

bool chamber_contains(const RootSystem& rs, std::span<const double> x, bool closed) {
  for (const auto& a : rs.roots()) {
    const double g = a.dot(x);
    if (closed ? g < 0.0 : g <= 0.0) return false;
  }
  return true;
}

void project_to_chamber(RootType type, std::span<double> x) {
  switch (type) {
    case RootType::A:
      std::sort(x.begin(), x.end(), std::greater<>());
      break;
    case RootType::B:
      for (auto& v : x) v = std::abs(v);
      std::sort(x.begin(), x.end(), std::greater<>());
      break;
    case RootType::D: {
      bool negative = false;
      for (auto& v : x) {
        if (v < 0) negative = !negative;
        v = std::abs(v);
      }
      std::sort(x.begin(), x.end(), std::greater<>());
      if (negative && x.back() != 0.0) x.back() = -x.back();
      break;
    }
  }
}

NeighborSets neighbor_sets(const RootSystem& rs, std::span<const Root> subset, const Root& alpha) {
  if (!rs.contains(alpha)) throw std::invalid_argument("alpha not a positive root");
  NeighborSets out;
  for (const auto& b : subset)
    if (!(b == alpha) && inner(alpha, b) != 0.0) out.first.push_back(b);
  for (const auto& b : subset) {
    if (inner(alpha, b) == 0.0) continue;
    for (const auto& c : subset) {
      if (b == c) continue;
      if (reflected_positive(b, c).root == alpha) out.second.emplace_back(b, c);
    }
  }
  return out;
}

std::optional<int> is_cluster(std::span<const Root> roots) {
  if (roots.empty()) return std::nullopt;
  std::set<int> common{roots[0].i};
  if (roots[0].is_pair()) common.insert(roots[0].j);
  for (const auto& a : roots.subspan(1)) {
    std::set<int> next;
    for (int k : common)
      if (a.coord(k) != 0.0) next.insert(k);
    common = std::move(next);
  }
  if (common.empty()) return std::nullopt;
  return *common.begin();
}

std::vector<Root> cluster_closure(const RootSystem& rs, std::span<const Root> phi) {
  std::set<std::size_t> idx;
  for (const auto& a : phi) idx.insert(rs.index_of(a));
  for (bool grew = true; grew;) {
    grew = false;
    const std::vector<std::size_t> cur(idx.begin(), idx.end());
    for (auto p : cur)
      for (auto q : cur)
        if (idx.insert(rs.index_of(reflected_positive(rs[p], rs[q]).root)).second) grew = true;
  }
  std::vector<Root> out;
  for (auto p : idx) out.push_back(rs[p]);
  return out;
}

bool FaceSignature::contains(const Root& a) const {
  return std::find(roots.begin(), roots.end(), a) != roots.end();
}

std::optional<FaceSignature> face_signature(const RootSystem& rs, std::span<const double> y,
                                            double tol) {
  if (int(y.size()) != rs.dim()) throw std::invalid_argument("face_signature: dimension mismatch");
  FaceSignature f;
  for (const auto& a : rs.roots()) {
    const double g = a.dot(y);
    if (g < -tol) throw std::invalid_argument("face_signature: point outside the closed chamber");
    if (std::abs(g) <= tol) f.roots.push_back(a);
  }
  if (f.roots.empty()) return std::nullopt;
  f.witness.assign(y.begin(), y.end());
  return f;
}

std::vector<FaceSignature> enumerate_faces(const RootSystem& rs) {
  const int n = rs.dim();
  if (n > 12) throw std::invalid_argument("enumerate_faces: N too large for exhaustive enumeration");
  std::map<std::vector<std::size_t>, FaceSignature> found;
  auto add = [&](const std::vector<double>& y) {
    auto f = face_signature(rs, y);
    if (!f) return;
    std::vector<std::size_t> key;
    for (const auto& a : f->roots) key.push_back(rs.index_of(a));
    found.emplace(key, *f);
  };
  auto levels_for = [](int m, unsigned mask, bool zero_last) {
    std::vector<int> block(m, 0);
    int b = 0;
    for (int p = 1; p < m; ++p) {
      if (mask & (1u << (p - 1))) ++b;
      block[p] = b;
    }
    const int nb = b + 1;
    std::vector<double> y(m);
    for (int p = 0; p < m; ++p) y[p] = double(nb - block[p]) - (zero_last ? 1.0 : 0.0);
    return y;
  };
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    add(levels_for(n, mask, false));
    if (rs.type() != RootType::A) add(levels_for(n, mask, true));
  }
  if (rs.type() == RootType::D) {
    for (unsigned mask = 0; mask < (1u << (n - 2)); ++mask) {
      auto y = levels_for(n - 1, mask, false);
      y.push_back(-y.back());
      add(y);
    }
  }
  std::vector<FaceSignature> out;
  for (auto& [key, f] : found) out.push_back(std::move(f));
  std::stable_sort(out.begin(), out.end(), [](const FaceSignature& a, const FaceSignature& b) {
    return a.roots.size() < b.roots.size();
  });
  return out;
}

Detector make_detector(const FaceSignature& face, Eigen::VectorXd u, std::string label) {
  Detector d{std::move(u), face, {}, std::move(label)};
  for (const auto& a : face.roots)
    if (a.dot(d.direction) > 1e-12) d.crossed.push_back(a);
  return d;
}

Detector canonical_detector(const FaceSignature& face) {
  if (face.roots.empty()) throw std::invalid_argument("canonical_detector: empty face");
  const int n = int(face.witness.size());
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (const auto& a : face.roots) u += a.dense(n);
  return make_detector(face, std::move(u), "canonical");
}

Eigen::VectorXd cut_direction(int n, int a, int k, int r) {
  if (k < 2 || r < 1 || r > k - 1 || a < 0 || a + k > n)
    throw std::invalid_argument("cut_direction: invalid block or cut");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (int p = a; p < a + r; ++p) u[p] = 1.0 / r;
  for (int p = a + r; p < a + k; ++p) u[p] = -1.0 / (k - r);
  return u;
}

Detector cut_detector(const FaceSignature& face, int a, int k, int r) {
  return make_detector(face, cut_direction(int(face.witness.size()), a, k, r),
                       "cut[" + std::to_string(a + 1) + ".." + std::to_string(a + k) + "|" +
                           std::to_string(r) + "]");
}

std::vector<CoordinateBlock> equality_blocks(std::span<const double> x, double tol) {
  std::vector<CoordinateBlock> out;
  for (int p = 0; p < int(x.size()); ++p) {
    if (!out.empty() && std::abs(x[p] - out.back().level) <= tol)
      ++out.back().size;
    else
      out.push_back({p, 1, x[p]});
  }
  return out;
}

std::vector<Detector> detector_family(const RootSystem& rs, const FaceSignature& face) {
  std::vector<Detector> out{canonical_detector(face)};
  const int n = rs.dim();
  // D: a block that meets -x_N is tied to the sign-flipped last coordinate
  double mixed_level = NAN;
  if (rs.type() == RootType::D && face.witness[n - 1] < -1e-9) mixed_level = -face.witness[n - 1];
  for (const auto& blk : equality_blocks(face.witness)) {
    const bool zero = std::abs(blk.level) <= 1e-9;
    if (blk.size < 2) continue;
    if (zero && rs.type() != RootType::A) continue;
    if (std::abs(blk.level - mixed_level) <= 1e-9) continue;
    for (int r = 1; r < blk.size; ++r) out.push_back(cut_detector(face, blk.start, blk.size, r));
  }
  if (rs.type() != RootType::A) {
    int z = n;
    while (z > 0 && std::abs(face.witness[z - 1]) <= 1e-9) --z;
    const int size = n - z;
    if (size >= 1 && (rs.type() == RootType::B || size >= 2)) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
      for (int p = z; p < n; ++p) u[p] = 1.0 / size;
      out.push_back(make_detector(face, std::move(u), "zero-block-center"));
    }
  }
  return out;
}

bool detector_admissible(const RootSystem& rs, const Detector& d,
                         const std::vector<std::vector<double>>& samples, double tol) {
  const int n = rs.dim();
  for (const auto& a : d.face.roots)
    if (a.dot(d.direction) < -tol) return false;
  const Eigen::Map<const Eigen::VectorXd> y(d.face.witness.data(), n);
  if (std::abs(d.direction.dot(y)) > tol * (1.0 + y.norm())) return false;
  for (const auto& s : samples) {
    const Eigen::Map<const Eigen::VectorXd> x(s.data(), n);
    if (d.direction.dot(x) < -tol * (1.0 + x.norm())) return false;
  }
  return true;
}

}  // namespace weyl
