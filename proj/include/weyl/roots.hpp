#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace weyl {

enum class RootType { A, B, D };

std::string to_string(RootType t);
RootType parse_root_type(std::string_view s);

enum class RootKind { PairMinus, PairPlus, Short };

/// Positive root e_i - e_j, e_i + e_j (i < j) or e_i. Indices are zero-based.
struct Root {
  RootKind kind = RootKind::PairMinus;
  int i = 0;
  int j = -1;

  static Root minus(int i, int j) { return {RootKind::PairMinus, i, j}; }
  static Root plus(int i, int j) { return {RootKind::PairPlus, i, j}; }
  static Root shortroot(int i) { return {RootKind::Short, i, -1}; }

  bool is_pair() const { return kind != RootKind::Short; }
  double coord(int k) const;
  double norm2() const { return is_pair() ? 2.0 : 1.0; }
  double dot(std::span<const double> x) const;
  double dot(const Eigen::VectorXd& x) const { return dot(std::span<const double>(x.data(), x.size())); }
  Eigen::VectorXd dense(int n) const;
  std::string name() const;

  friend bool operator==(const Root&, const Root&) = default;
};

double inner(const Root& a, const Root& b);

struct SignedRoot {
  Root root;
  int sign = 1;
};

/// Identifies a dense vector as +-(positive root); nullopt if it is not one.
std::optional<SignedRoot> root_from_vector(std::span<const double> v, double tol = 1e-12);

class RootSystem {
 public:
  RootSystem(RootType type, int n);

  RootType type() const { return type_; }
  int dim() const { return n_; }
  const std::vector<Root>& roots() const { return roots_; }
  std::size_t size() const { return roots_.size(); }
  const Root& operator[](std::size_t k) const { return roots_[k]; }

  bool contains(const Root& a) const;
  std::size_t index_of(const Root& a) const;
  Eigen::MatrixXd root_matrix() const;  // one root per row

 private:
  RootType type_;
  int n_;
  std::vector<Root> roots_;
};

inline RootSystem build_root_system(RootType type, int n) { return RootSystem(type, n); }

std::vector<double> reflect(std::span<const double> x, const Root& a);

/// gamma = +-s_beta(alpha) taken positive, and the sign used.
SignedRoot reflected_positive(const Root& alpha, const Root& beta);

bool chamber_contains(const RootSystem& rs, std::span<const double> x, bool closed);

/// Maps an arbitrary point into the closed chamber with the Weyl group action.
void project_to_chamber(RootType type, std::span<double> x);

struct NeighborSets {
  std::vector<Root> first;
  std::vector<std::pair<Root, Root>> second;
};

NeighborSets neighbor_sets(const RootSystem& rs, std::span<const Root> subset, const Root& alpha);

/// Smallest coordinate index shared by the support of every root, if any.
std::optional<int> is_cluster(std::span<const Root> roots);

/// Reflection closure R_+(phi), in canonical order.
std::vector<Root> cluster_closure(const RootSystem& rs, std::span<const Root> phi);

struct FaceSignature {
  std::vector<Root> roots;
  std::vector<double> witness;

  bool contains(const Root& a) const;
};

/// nullopt when y is interior. Throws if y is outside the closed chamber.
std::optional<FaceSignature> face_signature(const RootSystem& rs, std::span<const double> y,
                                            double tol = 1e-9);

/// Every face of the closed chamber, one witness each, ordered by |S| then roots.
std::vector<FaceSignature> enumerate_faces(const RootSystem& rs);

struct Detector {
  Eigen::VectorXd direction;
  FaceSignature face;
  std::vector<Root> crossed;
  std::string label;
};

Detector make_detector(const FaceSignature& face, Eigen::VectorXd u, std::string label);
Detector canonical_detector(const FaceSignature& face);

/// u_{I,r} for I = {a, ..., a+k-1} (zero-based a), cut after r elements.
Eigen::VectorXd cut_direction(int n, int a, int k, int r);
Detector cut_detector(const FaceSignature& face, int a, int k, int r);

struct CoordinateBlock {
  int start = 0;
  int size = 0;
  double level = 0.0;
};

/// Maximal runs of equal coordinates in a chamber point (tolerance tol).
std::vector<CoordinateBlock> equality_blocks(std::span<const double> x, double tol = 1e-9);

/// Canonical detector, all cut detectors of nonzero-level equality blocks, and
/// the block-center detector of a zero block in types B and D.
std::vector<Detector> detector_family(const RootSystem& rs, const FaceSignature& face);

/// Checks the three admissibility conditions, the chamber one on `samples`.
bool detector_admissible(const RootSystem& rs, const Detector& d,
                         const std::vector<std::vector<double>>& samples, double tol = 1e-12);

}  // namespace weyl
