#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "fewbody/fock_basis.hpp"
#include "fewbody/symmetry.hpp"

namespace fewbody {

/// Quartic mode integrals I(a,b,c,d) = int phi_a phi_b phi_c phi_d dx,
/// stored once per sorted index quadruple.
class TwoBodyTable {
 public:
  TwoBodyTable() = default;
  /// Table over modes 0..modes-1.
  TwoBodyTable(const SingleParticleBasis& sp, int modes);

  int modes() const { return modes_; }
  double operator()(int a, int b, int c, int d) const;

  /// Number of stored (sorted) quadruples, C(modes+3, 4).
  std::size_t stored() const { return values_.size(); }

  /// Rank of a sorted quadruple a <= b <= c <= d in the storage order.
  static std::size_t rank(int a, int b, int c, int d);

  /// Direct storage access for the fill kernels.
  std::vector<double>& storage() { return values_; }

 private:
  int modes_ = 0;
  std::vector<double> values_;
};

/// One quartic integral evaluated with the basis quadrature.
/// Throws InvalidArgument for indices outside the basis.
double interaction_element(const SingleParticleBasis& sp, int a, int b, int c, int d);

/// H(g) = diag(E_n) + g * V, with V = sum over pairs of delta(x_i - x_j)
/// assembled once and shared between couplings.
class HamiltonianMatrix {
 public:
  HamiltonianMatrix(double g, Eigen::VectorXd h0, std::shared_ptr<const Eigen::MatrixXd> vint,
                    std::uint64_t basis_id, double e_max);

  double g() const { return g_; }
  double e_max() const { return e_max_; }
  std::size_t dimension() const { return static_cast<std::size_t>(h0_.size()); }
  std::uint64_t basis_id() const { return basis_id_; }

  const Eigen::VectorXd& h0() const { return h0_; }
  const Eigen::MatrixXd& vint() const { return *vint_; }
  const std::shared_ptr<const Eigen::MatrixXd>& vint_ptr() const { return vint_; }

  Eigen::MatrixXd dense() const;

  /// Same basis and interaction operator at another coupling.
  HamiltonianMatrix with_coupling(double g) const;

 private:
  double g_;
  Eigen::VectorXd h0_;
  std::shared_ptr<const Eigen::MatrixXd> vint_;
  std::uint64_t basis_id_;
  double e_max_;
};

/// Contact-interaction operator V on the basis (parallel kernel).
Eigen::MatrixXd contact_interaction(const FockBasis& fock);

HamiltonianMatrix build_hamiltonian(const FockBasis& fock, double g);

/// B^T H B for the orthonormal sector basis B of `projector`.
/// Throws MismatchError when the projector was built on another basis.
Eigen::MatrixXd sector_block(const HamiltonianMatrix& h, const SectorProjector& projector);

/// Same for an arbitrary symmetric operator on the projector's basis.
Eigen::MatrixXd sector_block(const Eigen::MatrixXd& op, const SectorProjector& projector);

/// max |(P_a H P_b)_ij|, the coupling H leaves between two sectors.
double sector_coupling(const HamiltonianMatrix& h, const SectorProjector& a,
                       const SectorProjector& b);

// Export.
//
// Binary layout, native little-endian:
//   uint64 dimension, float64 g, float64 E_max,
//   then the lower triangle row by row (row i holds columns 0..i), float64.

void write_binary(std::ostream& os, const HamiltonianMatrix& h);
void write_binary(const std::filesystem::path& path, const HamiltonianMatrix& h);

struct BinaryMatrix {
  double g = 0.0;
  double e_max = 0.0;
  Eigen::MatrixXd matrix;
};
BinaryMatrix read_binary(std::istream& is);

/// Full matrix, one row per line, 17 significant digits.
void write_csv(std::ostream& os, const Eigen::MatrixXd& m);

namespace kernels {

// Each kernel has a serial reference and an OpenMP version; tests require
// them to agree and bench/ compares their speed.

void fill_two_body_serial(const SingleParticleBasis& sp, TwoBodyTable& table);
void fill_two_body_parallel(const SingleParticleBasis& sp, TwoBodyTable& table);

Eigen::MatrixXd contact_matrix_serial(const FockBasis& fock, const TwoBodyTable& table);
Eigen::MatrixXd contact_matrix_parallel(const FockBasis& fock, const TwoBodyTable& table);

}  // namespace kernels

}  // namespace fewbody
