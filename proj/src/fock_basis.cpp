#include "fewbody/fock_basis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "fewbody/errors.hpp"

namespace fewbody {

namespace {

std::uint64_t next_basis_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

double energy_slack(double e_max) { return 1e-9 * std::max(1.0, std::abs(e_max)); }

void enumerate(const std::vector<double>& eps, int particles, double limit, MultiIndex& current,
               double partial, double min_rest, std::vector<MultiIndex>& out) {
  const int placed = static_cast<int>(current.size());
  if (placed == particles) {
    out.push_back(current);
    return;
  }
  const double rest = static_cast<double>(particles - placed - 1) * min_rest;
  for (std::size_t n = 0; n < eps.size(); ++n) {
    if (partial + eps[n] + rest > limit) break;  // energies ascend
    current.push_back(static_cast<int>(n));
    enumerate(eps, particles, limit, current, partial + eps[n], min_rest, out);
    current.pop_back();
  }
}

}  // namespace

double multi_index_energy(const SingleParticleBasis& sp, const MultiIndex& n) {
  MultiIndex sorted = n;
  std::sort(sorted.begin(), sorted.end());
  double e = 0.0;
  for (int k : sorted) e += sp.energy(static_cast<std::size_t>(k));
  return e;
}

FockBasis::FockBasis(std::shared_ptr<const SingleParticleBasis> sp, int particles, double e_max,
                     std::vector<MultiIndex> states)
    : sp_(std::move(sp)), particles_(particles), e_max_(e_max), id_(next_basis_id()) {
  if (!sp_) throw InvalidArgument("FockBasis needs a single-particle basis");
  energies_.reserve(states.size());
  std::vector<std::pair<double, MultiIndex>> keyed;
  keyed.reserve(states.size());
  for (auto& s : states) {
    if (static_cast<int>(s.size()) != particles_) {
      throw InvalidArgument("multi-index length differs from particle count");
    }
    keyed.emplace_back(multi_index_energy(*sp_, s), std::move(s));
  }
  std::sort(keyed.begin(), keyed.end());
  for (auto& [e, s] : keyed) {
    if (!index_.emplace(s, states_.size()).second) {
      throw InvalidArgument("duplicate multi-index in basis");
    }
    for (int k : s) max_mode_ = std::max(max_mode_, k);
    energies_.push_back(e);
    states_.push_back(std::move(s));
  }

  std::map<MultiIndex, std::size_t> orbit_of;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    MultiIndex key = states_[i];
    std::sort(key.begin(), key.end());
    auto [it, inserted] = orbit_of.emplace(key, orbits_.size());
    if (inserted) orbits_.emplace_back();
    orbits_[it->second].push_back(i);
  }
  for (const auto& [key, k] : orbit_of) {
    // Distinct rearrangements of the sorted key: N! / prod(multiplicity!).
    std::size_t expected = 1, run = 0;
    for (std::size_t j = 0; j < key.size(); ++j) {
      run = (j > 0 && key[j] == key[j - 1]) ? run + 1 : 1;
      expected = expected * (j + 1) / run;
    }
    if (orbits_[k].size() != expected) {
      throw InvalidArgument("basis is not closed under coordinate permutations");
    }
  }
}

std::optional<std::size_t> FockBasis::find(const MultiIndex& n) const {
  const auto it = index_.find(n);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FockBasis build_basis(std::shared_ptr<const SingleParticleBasis> sp, int particles, double e_max) {
  if (!sp) throw InvalidArgument("build_basis needs a single-particle basis");
  if (particles < 1) throw InvalidArgument("particle count must be at least 1");
  const auto eps = sp->energies();
  const double ground = static_cast<double>(particles) * eps[0];
  const double limit = e_max + energy_slack(e_max);
  if (limit < ground) {
    throw EmptyBasis("E_max = " + std::to_string(e_max) + " is below the non-interacting ground " +
                     std::to_string(ground));
  }
  const double highest_reachable = static_cast<double>(particles - 1) * eps[0] + eps.back();
  if (highest_reachable < e_max - energy_slack(e_max)) {
    throw InsufficientBasis("E_max = " + std::to_string(e_max) +
                            " may need single-particle modes beyond cutoff " +
                            std::to_string(sp->cutoff()));
  }
  std::vector<double> e(eps.begin(), eps.end());
  std::vector<MultiIndex> states;
  MultiIndex current;
  current.reserve(static_cast<std::size_t>(particles));
  enumerate(e, particles, limit, current, 0.0, e[0], states);
  return FockBasis(std::move(sp), particles, e_max, std::move(states));
}

}  // namespace fewbody
