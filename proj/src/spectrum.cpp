#include "fewbody/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "fewbody/errors.hpp"

namespace fewbody {

namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kSignThreshold = 1e-8;

void enumerate_distinct(std::span<const double> eps, int remaining, std::size_t start,
                        double partial, std::vector<double>& out) {
  if (remaining == 0) {
    out.push_back(partial);
    return;
  }
  for (std::size_t n = start; n + static_cast<std::size_t>(remaining) <= eps.size(); ++n) {
    enumerate_distinct(eps, remaining - 1, n + 1, partial + eps[n], out);
  }
}

}  // namespace

Eigensystem eigensolve_block(const Eigen::MatrixXd& block) {
  if (block.rows() != block.cols()) throw InvalidArgument("eigensolve_block needs a square matrix");
  if (block.size() > 0) {
    const double scale = std::max(1.0, block.cwiseAbs().maxCoeff());
    if ((block - block.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
      throw InvalidArgument("eigensolve_block needs a symmetric matrix");
    }
  }
  Eigensystem out;
  if (block.size() == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    auto col = out.vectors.col(c);
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      if (std::abs(col(r)) > kSignThreshold) {
        if (col(r) < 0.0) col = -col;
        break;
      }
    }
  }
  return out;
}

SectorSpectrum sector_spectrum(const HamiltonianMatrix& h, const SectorProjector& projector) {
  auto eig = eigensolve_block(sector_block(h, projector));
  return SectorSpectrum{projector.partition(), projector.parity(), h.g(), std::move(eig.values),
                        std::move(eig.vectors)};
}

SweepResult sweep_levels(const FockBasis& fock, const Partition& partition,
                         std::span<const double> g_grid, std::optional<Parity> parity) {
  const auto projector = sector_projector(partition, fock, parity);
  const auto h = build_hamiltonian(fock, 0.0);
  return sweep_levels(h, projector, g_grid);
}

SweepResult sweep_levels(const HamiltonianMatrix& h, const SectorProjector& projector,
                         std::span<const double> g_grid) {
  if (g_grid.empty()) throw InvalidArgument("g grid is empty");
  for (std::size_t k = 1; k < g_grid.size(); ++k) {
    if (!(g_grid[k] > g_grid[k - 1])) throw InvalidArgument("g grid must be strictly ascending");
  }
  if (h.basis_id() != projector.basis_id()) {
    throw MismatchError("projector was built on a different basis than the Hamiltonian");
  }
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h.dimension()),
                                             static_cast<Eigen::Index>(h.dimension()));
  h0.diagonal() = h.h0();
  const Eigen::MatrixXd h0_block = sector_block(h0, projector);
  const Eigen::MatrixXd v_block = sector_block(h.vint(), projector);

  const std::size_t points = g_grid.size();
  std::vector<Eigensystem> solved(points);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(points); ++k) {
    const double g = g_grid[static_cast<std::size_t>(k)];
    solved[static_cast<std::size_t>(k)] = eigensolve_block(h0_block + g * v_block);
  }

  SweepResult out;
  out.sector = projector.partition();
  out.parity = projector.parity();
  out.g_grid.assign(g_grid.begin(), g_grid.end());
  out.basis_size = h.dimension();
  out.sector_size = projector.rank();
  const auto levels = static_cast<std::size_t>(h0_block.rows());
  out.tracks.assign(levels, std::vector<double>(points));
  out.slopes.assign(levels, std::vector<double>(points));

  // track_at[t] = eigen index that track t occupies at the current point.
  std::vector<std::size_t> track_at(levels);
  std::iota(track_at.begin(), track_at.end(), 0);
  for (std::size_t k = 0; k < points; ++k) {
    const auto& eig = solved[k];
    if (k > 0 && levels > 0) {
      const Eigen::MatrixXd overlap =
          (solved[k - 1].vectors.transpose() * eig.vectors).cwiseAbs();
      std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
      pairs.reserve(levels * levels);
      for (std::size_t i = 0; i < levels; ++i) {
        for (std::size_t j = 0; j < levels; ++j) {
          pairs.emplace_back(overlap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                             i, j);
        }
      }
      // Largest overlap first; ties broken by indices for determinism.
      std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
        return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
      });
      std::vector<std::size_t> next_of(levels, levels);
      std::vector<bool> taken(levels, false);
      std::size_t assigned = 0;
      for (const auto& [value, i, j] : pairs) {
        if (next_of[i] != levels || taken[j]) continue;
        next_of[i] = j;
        taken[j] = true;
        if (++assigned == levels) break;
      }
      std::vector<std::size_t> track_of_prev(levels);
      for (std::size_t t = 0; t < levels; ++t) track_of_prev[track_at[t]] = t;
      for (std::size_t i = 0; i < levels; ++i) {
        const auto row = overlap.row(static_cast<Eigen::Index>(i));
        double best = -1.0, second = -1.0;
        for (Eigen::Index j = 0; j < row.size(); ++j) {
          if (row(j) > best) {
            second = best;
            best = row(j);
          } else if (row(j) > second) {
            second = row(j);
          }
        }
        if (row.size() > 1 && best - second < kOverlapAmbiguity) {
          out.ambiguities.push_back({k, track_of_prev[i], best, second});
        }
      }
      for (std::size_t t = 0; t < levels; ++t) track_at[t] = next_of[track_at[t]];
    }
    for (std::size_t t = 0; t < levels; ++t) {
      const auto idx = static_cast<Eigen::Index>(track_at[t]);
      out.tracks[t][k] = eig.values(idx);
      const auto v = eig.vectors.col(idx);
      out.slopes[t][k] = v.dot(v_block * v);
    }
  }
  return out;
}

std::vector<double> girardeau_reference(const SingleParticleBasis& sp, int particles) {
  if (particles < 1) throw InvalidArgument("particle count must be at least 1");
  if (sp.cutoff() < static_cast<std::size_t>(particles)) {
    throw InsufficientBasis("Girardeau reference needs at least " + std::to_string(particles) +
                            " single-particle modes, basis has " + std::to_string(sp.cutoff()));
  }
  std::vector<double> out;
  enumerate_distinct(sp.energies(), particles, 0, 0.0, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<DegeneracyCluster> degeneracy_clusters(std::span<const double> eigenvalues,
                                                   double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("degeneracy tolerance must be positive");
  std::vector<DegeneracyCluster> out;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (count > 0 && eigenvalues[i] - eigenvalues[i - 1] >= tol) {
      out.push_back({sum / static_cast<double>(count), count});
      sum = 0.0;
      count = 0;
    }
    sum += eigenvalues[i];
    ++count;
  }
  if (count > 0) out.push_back({sum / static_cast<double>(count), count});
  return out;
}

double default_degeneracy_tolerance(std::span<const double> eigenvalues) {
  if (eigenvalues.size() < 2) return 1e-6;
  const double span = eigenvalues.back() - eigenvalues.front();
  return span > 0.0 ? 1e-6 * span : 1e-6;
}

}  // namespace fewbody
