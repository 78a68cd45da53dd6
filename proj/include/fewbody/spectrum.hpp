#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fewbody/hamiltonian.hpp"
#include "fewbody/symmetry.hpp"

namespace fewbody {

struct Eigensystem {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

/// Full spectral decomposition of a real symmetric matrix. Each eigenvector
/// is signed so that its first component above 1e-8 in magnitude is positive.
/// Throws InvalidArgument when the input is not symmetric within 1e-10.
Eigensystem eigensolve_block(const Eigen::MatrixXd& block);

struct SectorSpectrum {
  Partition partition;
  std::optional<Parity> parity;
  double g = 0.0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // in the sector basis
};

SectorSpectrum sector_spectrum(const HamiltonianMatrix& h, const SectorProjector& projector);

/// Overlap match between adjacent grid points whose best and runner-up
/// overlaps differ by less than the ambiguity threshold.
struct AmbiguousMatch {
  std::size_t grid_index = 0;  // later of the two grid points
  std::size_t track = 0;
  double best = 0.0;
  double runner_up = 0.0;
};

struct SweepResult {
  Partition sector;
  std::optional<Parity> parity;
  std::vector<double> g_grid;
  /// tracks[t][k] = energy of track t at g_grid[k].
  std::vector<std::vector<double>> tracks;
  /// slopes[t][k] = <v|V|v>, the Hellmann-Feynman derivative dE/dg.
  std::vector<std::vector<double>> slopes;
  std::vector<AmbiguousMatch> ambiguities;
  std::size_t basis_size = 0;
  std::size_t sector_size = 0;

  std::size_t track_count() const { return tracks.size(); }
};

inline constexpr double kOverlapAmbiguity = 1e-6;

/// Diagonalizes one sector on every grid point and links eigenvectors of
/// neighbouring points by greedy maximal overlap. The grid must ascend.
SweepResult sweep_levels(const FockBasis& fock, const Partition& partition,
                         std::span<const double> g_grid,
                         std::optional<Parity> parity = std::nullopt);

/// Same, reusing an already assembled Hamiltonian family.
SweepResult sweep_levels(const HamiltonianMatrix& h, const SectorProjector& projector,
                         std::span<const double> g_grid);

/// Non-interacting spinless-fermion energies: sums of N distinct
/// single-particle energies, ascending. The g -> infinity limit of the
/// bosonic spectrum. Throws InsufficientBasis when cutoff < N.
std::vector<double> girardeau_reference(const SingleParticleBasis& sp, int particles);

struct DegeneracyCluster {
  double energy = 0.0;  // mean of the members
  std::size_t multiplicity = 0;
};

/// Groups consecutive ascending eigenvalues whose gap is below tol.
std::vector<DegeneracyCluster> degeneracy_clusters(std::span<const double> eigenvalues, double tol);

/// 1e-6 times the spectral span (or 1e-6 when the span is zero).
double default_degeneracy_tolerance(std::span<const double> eigenvalues);

}  // namespace fewbody
