#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fewbody/single_particle.hpp"

namespace fewbody {

/// Single-particle mode index of each particle, (n_1, ..., n_N).
using MultiIndex = std::vector<int>;

/// Truncated N-particle product basis. States with non-interacting energy
/// E_n <= E_max, sorted by (E_n, lexicographic multi-index). The list is
/// closed under coordinate permutation.
class FockBasis {
 public:
  FockBasis(std::shared_ptr<const SingleParticleBasis> sp, int particles, double e_max,
            std::vector<MultiIndex> states);

  int particles() const { return particles_; }
  double e_max() const { return e_max_; }
  std::size_t size() const { return states_.size(); }
  const SingleParticleBasis& single_particle() const { return *sp_; }
  const std::shared_ptr<const SingleParticleBasis>& single_particle_ptr() const { return sp_; }

  const MultiIndex& state(std::size_t i) const { return states_.at(i); }
  std::span<const MultiIndex> states() const { return states_; }
  double energy(std::size_t i) const { return energies_.at(i); }
  std::span<const double> energies() const { return energies_; }

  std::optional<std::size_t> find(const MultiIndex& n) const;

  /// Highest single-particle mode used by any state.
  int max_mode() const { return max_mode_; }

  /// Permutation orbits: each entry lists the basis indices sharing one
  /// sorted multi-index, in basis order. Orbits are ordered by first member.
  const std::vector<std::vector<std::size_t>>& orbits() const { return orbits_; }

  /// Identity used to detect operators built on different bases.
  std::uint64_t id() const { return id_; }

 private:
  std::shared_ptr<const SingleParticleBasis> sp_;
  int particles_;
  double e_max_;
  std::vector<MultiIndex> states_;
  std::vector<double> energies_;
  std::map<MultiIndex, std::size_t> index_;
  std::vector<std::vector<std::size_t>> orbits_;
  int max_mode_ = 0;
  std::uint64_t id_;
};

/// Non-interacting energy of a multi-index, summed in sorted-mode order so
/// that all permutations give bit-identical values.
double multi_index_energy(const SingleParticleBasis& sp, const MultiIndex& n);

/// Enumerates all multi-indices with E_n <= E_max.
///
/// Throws EmptyBasis when E_max < N*eps_0 and InsufficientBasis when E_max
/// could admit single-particle modes beyond sp.cutoff().
FockBasis build_basis(std::shared_ptr<const SingleParticleBasis> sp, int particles, double e_max);

}  // namespace fewbody
