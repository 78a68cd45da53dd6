#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fewbody/fock_basis.hpp"

namespace fewbody {

/// Largest particle count for which S_N tables are built.
inline constexpr int kMaxSymmetricDegree = 8;

/// Integer partition of N, parts non-increasing. Labels an S_N irrep; also
/// used as a cycle type.
class Partition {
 public:
  Partition() = default;
  /// Throws InvalidArgument unless parts are positive and non-increasing.
  explicit Partition(std::vector<int> parts);

  static Partition symmetric(int n);      // [N]
  static Partition antisymmetric(int n);  // [1^N]

  int degree() const { return degree_; }
  std::span<const int> parts() const { return parts_; }
  std::size_t length() const { return parts_.size(); }

  /// "[2,1]" style label.
  std::string label() const;
  /// Filesystem-friendly label, "2-1".
  std::string slug() const;

  /// Conjugate partition (transposed Young diagram).
  Partition conjugate() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) { return a.parts_ <=> b.parts_; }

 private:
  std::vector<int> parts_;
  int degree_ = 0;
};

std::ostream& operator<<(std::ostream& os, const Partition& p);

/// All partitions of n in reverse-lexicographic order: [n] first, [1^n] last.
/// Throws UnsupportedSize outside 1..kMaxSymmetricDegree.
std::vector<Partition> partitions(int n);

/// Permutation of {0..n-1} stored as its image list. Composition follows
/// (g*h)(i) = g(h(i)).
class Permutation {
 public:
  explicit Permutation(std::vector<int> image);
  static Permutation identity(int n);

  int degree() const { return static_cast<int>(image_.size()); }
  int operator()(int i) const { return image_[static_cast<std::size_t>(i)]; }
  std::span<const int> image() const { return image_; }

  Permutation inverse() const;
  Partition cycle_type() const;
  int sign() const;

  friend Permutation operator*(const Permutation& g, const Permutation& h);
  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> image_;
};

/// All n! permutations in lexicographic order of their image lists.
std::vector<Permutation> all_permutations(int n);

/// chi_shape(cycle_type) by the Murnaghan-Nakayama rule.
long long murnaghan_nakayama(const Partition& shape, const Partition& cycle_type);

class CharacterTable {
 public:
  explicit CharacterTable(int n);

  int degree() const { return degree_; }
  /// Irrep labels and class cycle types share the order of partitions(n).
  const std::vector<Partition>& irreps() const { return labels_; }
  const std::vector<Partition>& classes() const { return labels_; }
  const std::vector<long long>& class_sizes() const { return class_sizes_; }

  long long value(std::size_t irrep, std::size_t cls) const;
  long long value(const Partition& irrep, const Partition& cycle_type) const;
  /// chi(e), the irrep dimension.
  long long dimension(const Partition& irrep) const;

  std::size_t index_of(const Partition& p) const;

  /// Rows: irreps; columns: cycle types. Header row lists cycle types.
  void write_csv(std::ostream& os) const;

 private:
  int degree_;
  std::vector<Partition> labels_;
  std::vector<long long> class_sizes_;
  std::vector<long long> values_;  // row-major irrep x class
};

CharacterTable character_table(int n);

long long factorial(int n);

/// Index map of the coordinate permutation U(g) on a Fock basis:
/// U(g)|n_1..n_N> = |n_{g^-1(1)}..n_{g^-1(N)}>, so U(g)U(h) = U(gh).
std::vector<std::size_t> permutation_action(const Permutation& g, const FockBasis& fock);

/// Dense 0/1 matrix of U(g).
Eigen::MatrixXd permutation_operator(const Permutation& g, const FockBasis& fock);

enum class Parity { even, odd };

std::string to_string(Parity p);

/// Parity of a multi-index under reflection of every coordinate, (-1)^sum(n).
Parity multi_index_parity(const MultiIndex& n);

/// Central projector P = (d/N!) sum_g chi(g) U(g) onto one isotypic
/// component, optionally refined by the reflection parity of a symmetric trap.
///
/// U(g) never leaves a permutation orbit, so the projector is stored as one
/// small dense block per orbit together with an orthonormal basis of its
/// range in that orbit.
class SectorProjector {
 public:
  struct OrbitBlock {
    std::vector<std::size_t> states;  // basis indices of the orbit
    Eigen::MatrixXd projector;        // orbit-local block
    Eigen::MatrixXd range;            // orthonormal columns spanning the block's range
  };

  SectorProjector(Partition partition, std::optional<Parity> parity, const FockBasis& fock,
                  std::vector<OrbitBlock> blocks);

  const Partition& partition() const { return partition_; }
  std::optional<Parity> parity() const { return parity_; }
  std::size_t rank() const { return rank_; }
  std::size_t dimension() const { return dimension_; }
  std::uint64_t basis_id() const { return basis_id_; }
  const std::vector<OrbitBlock>& blocks() const { return blocks_; }

  /// Sum of diagonal entries; equals rank() for an exact projector.
  double trace() const;

  /// Full dim x dim projector matrix.
  Eigen::MatrixXd dense() const;

  /// dim x rank matrix with orthonormal columns spanning the sector, ordered
  /// by orbit and then by pivot order within the orbit.
  Eigen::MatrixXd sector_basis() const;

  /// Label combining partition and parity, e.g. "[2]" or "[2]+".
  std::string label() const;

 private:
  Partition partition_;
  std::optional<Parity> parity_;
  std::vector<OrbitBlock> blocks_;
  std::size_t rank_ = 0;
  std::size_t dimension_ = 0;
  std::uint64_t basis_id_ = 0;
};

/// Builds the projector. Throws MismatchError when the partition degree
/// differs from the basis particle count and UnsupportedTrap when a parity
/// refinement is requested for a trap without reflection symmetry.
SectorProjector sector_projector(const Partition& partition, const FockBasis& fock,
                                 std::optional<Parity> parity = std::nullopt);

/// Rank of the isotypic component of `partition` inside the permutation
/// module spanned by one orbit of multi-index `n`.
std::size_t orbit_rank(const Partition& partition, const MultiIndex& n);

namespace detail {

/// Orthonormal basis for the column space of m by column-pivoted
/// Gram-Schmidt, keeping directions with residual norm above `threshold`.
Eigen::MatrixXd pivoted_orthonormal_columns(const Eigen::MatrixXd& m, double threshold = 1e-8);

}  // namespace detail

}  // namespace fewbody
