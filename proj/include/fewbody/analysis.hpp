#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fewbody/fock_basis.hpp"
#include "fewbody/hamiltonian.hpp"

namespace fewbody {

// ---------------------------------------------------------------------------
// Spectral statistics
// ---------------------------------------------------------------------------

struct UnfoldingOptions {
  int degree = 7;
  double edge_fraction = 0.05;  // dropped at each end of the spectrum
};

struct SpacingStatistics {
  std::vector<double> spacings;  // unfolded, mean 1
  double ks_poisson = 0.0;
  double ks_wigner = 0.0;
  double brody_beta = 0.0;
};

inline constexpr std::size_t kMinimumLevels = 50;

/// Unfolds a single-sector spectrum with a polynomial fit of its staircase,
/// then measures the nearest-neighbour spacings against the Poisson and
/// Wigner-surmise laws. Mixing levels from several symmetry sectors makes the
/// result meaningless; keeping the input to one sector is the caller's job.
///
/// Throws InsufficientData below kMinimumLevels levels and InvalidArgument
/// when the spacings have zero variance and no Brody fit exists.
SpacingStatistics spacing_statistics(std::span<const double> eigenvalues,
                                     const UnfoldingOptions& options = {});

/// Unfolded spacings only (edges dropped, normalized to mean 1). A picket
/// fence comes back as all ones.
std::vector<double> unfolded_spacings(std::span<const double> eigenvalues,
                                      const UnfoldingOptions& options = {});

double poisson_density(double s);
double poisson_cdf(double s);
double wigner_density(double s);
double wigner_cdf(double s);
double brody_density(double s, double beta);

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// Maximum-likelihood Brody parameter by golden-section search on
/// [-0.1, 1.5]; the result is clamped to that interval.
double brody_fit(std::span<const double> spacings);

/// GOE matrix: independent Gaussian entries, diagonal variance 1, off-diagonal
/// variance 1/2. Deterministic per seed.
Eigen::MatrixXd goe_sample(std::size_t dim, std::uint64_t seed);

/// Histogram rows (s, empirical density, Poisson density, Wigner density).
struct HistogramRow {
  double s;
  double empirical;
  double poisson;
  double wigner;
};
std::vector<HistogramRow> spacing_histogram(std::span<const double> spacings, double bin_width,
                                            double s_max);
void write_histogram_csv(std::ostream& os, std::span<const HistogramRow> rows);

// ---------------------------------------------------------------------------
// States, entanglement, evolution
// ---------------------------------------------------------------------------

/// Unit-norm state vector.
class StateVector {
 public:
  /// Throws InvalidArgument unless |norm - 1| <= 1e-12.
  explicit StateVector(Eigen::VectorXcd amplitudes);
  /// Normalizes a nonzero vector.
  static StateVector normalized(Eigen::VectorXcd amplitudes);
  static StateVector basis_state(std::size_t dim, std::size_t index);

  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  std::complex<double> inner(const StateVector& other) const;  // <this|other>

 private:
  Eigen::VectorXcd amplitudes_;
};

/// Declares a basis as a product of two factors: state k sits at
/// coordinates[k] = (left, right) in a left_dim x right_dim grid. Grid cells
/// without a basis state carry zero amplitude.
struct BipartiteLayout {
  std::size_t left_dim = 0;
  std::size_t right_dim = 0;
  std::vector<std::pair<std::size_t, std::size_t>> coordinates;
};

/// Split of a Fock basis between the first `left_particles` particles and
/// the rest. Each side is indexed by its multi-index in base max_mode+1.
BipartiteLayout interparticle_layout(const FockBasis& fock, int left_particles = 1);

/// Reduced density matrix over the left factor.
Eigen::MatrixXcd reduced_density_matrix(const StateVector& state, const BipartiteLayout& layout);

/// Von Neumann entropy (natural log) of the left reduced state. Throws
/// InvalidArgument when the layout is not a product declaration: coordinates
/// out of range, repeated cells, or a size different from the state.
double entanglement_entropy(const StateVector& state, const BipartiteLayout& layout);

/// exp(-i H t) through a cached spectral decomposition.
class Propagator {
 public:
  explicit Propagator(const Eigen::MatrixXd& hamiltonian);
  explicit Propagator(const HamiltonianMatrix& hamiltonian);

  std::size_t dimension() const { return static_cast<std::size_t>(values_.size()); }
  StateVector evolve(const StateVector& state, double t) const;
  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Eigen::MatrixXd& eigenvectors() const { return vectors_; }

 private:
  Eigen::VectorXd values_;
  Eigen::MatrixXd vectors_;
};

StateVector evolve_state(const Eigen::MatrixXd& hamiltonian, const StateVector& state, double t);
StateVector evolve_state(const HamiltonianMatrix& hamiltonian, const StateVector& state, double t);

// ---------------------------------------------------------------------------
// Centre-of-mass / relative factorization (two particles, harmonic trap)
// ---------------------------------------------------------------------------

struct ComRelLabel {
  int com = 0;       // centre-of-mass quanta
  int relative = 0;  // relative-motion quanta
};

/// Simultaneous eigenbasis of H_com and H_rel on a two-particle harmonic
/// basis truncated by total quanta.
class ComRelMap {
 public:
  ComRelMap(Eigen::MatrixXd unitary, std::vector<ComRelLabel> labels, Eigen::MatrixXd h_com,
            Eigen::MatrixXd h_osc_rel, std::vector<int> shells, std::uint64_t basis_id);

  /// Columns are CoM/rel eigenstates in the product basis, ordered by
  /// (com, relative).
  const Eigen::MatrixXd& unitary() const { return unitary_; }
  const std::vector<ComRelLabel>& labels() const { return labels_; }

  /// H_com in the product basis.
  const Eigen::MatrixXd& h_com() const { return h_com_; }
  /// H_rel(g) = H(g) - H_com in the product basis.
  Eigen::MatrixXd h_rel(const HamiltonianMatrix& h) const;

  /// max |[H_com, H(g)]| over states below the top shell ("interior").
  double interior_commutator(const HamiltonianMatrix& h) const;
  /// Same over the whole truncated basis.
  double commutator(const HamiltonianMatrix& h) const;

  /// Rewrites a product-basis state in CoM/rel coordinates.
  StateVector to_com_rel(const StateVector& product_state) const;
  /// (com, relative) grid layout for entanglement_entropy on to_com_rel states.
  BipartiteLayout layout() const;

 private:
  Eigen::MatrixXd unitary_;
  std::vector<ComRelLabel> labels_;
  Eigen::MatrixXd h_com_;
  Eigen::MatrixXd h_osc_rel_;
  std::vector<int> shells_;  // total quanta of each basis state
  std::uint64_t basis_id_;
};

/// Builds the map. Throws UnsupportedTrap for non-harmonic traps and
/// InvalidArgument unless N = 2.
ComRelMap com_rel_map(const FockBasis& fock);

}  // namespace fewbody
