#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace fewbody {

// Units: hbar = 1 throughout. The mass defaults to 1.

struct HarmonicTrap {
  double omega = 1.0;
};

struct InfiniteWell {
  double length = 1.0;  // domain [0, length]
};

/// Potential sampled on a uniform grid. The first and last samples are the
/// domain bounds, where Dirichlet conditions are imposed.
struct SampledPotential {
  std::vector<double> x;
  std::vector<double> v;
};

enum class TrapKind { harmonic, infinite_well, custom };

std::string to_string(TrapKind kind);

class TrapPotential {
 public:
  using Shape = std::variant<HarmonicTrap, InfiniteWell, SampledPotential>;

  static TrapPotential harmonic(double omega, double mass = 1.0);
  static TrapPotential infinite_well(double length, double mass = 1.0);
  static TrapPotential custom(std::vector<double> x, std::vector<double> v, double mass = 1.0);

  TrapKind kind() const;
  double mass() const { return mass_; }
  const Shape& shape() const { return shape_; }

  /// True when the trap is invariant under reflection about its centre, so
  /// mode n has parity (-1)^n. Analytic traps always are.
  bool reflection_symmetric(double tol = 1e-10) const;

  /// Domain bounds; infinite for the harmonic trap.
  std::pair<double, double> domain() const;

 private:
  TrapPotential(Shape shape, double mass);

  Shape shape_;
  double mass_ = 1.0;
};

/// Reads a two-column (x, V(x)) whitespace-delimited file. Lines starting
/// with '#' and blank lines are skipped.
TrapPotential load_potential_file(const std::filesystem::path& path, double mass = 1.0);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Hermite (harmonic), Gauss-Legendre on [0, L] (well) or trapezoid on
/// the sample grid (custom; `order` is ignored there).
///
/// The harmonic rule is scaled to the weight exp(-2 m omega x^2) and its
/// weights carry the inverse weight factor, so the rule integrates plain
/// functions f(x). Products of four oscillator modes are then integrated
/// exactly whenever 2*order - 1 >= 4*(cutoff - 1).
QuadratureRule quadrature_rule(const TrapPotential& trap, std::size_t order);

/// Default quadrature order for a given mode cutoff.
std::size_t default_quadrature_order(std::size_t cutoff);

/// Truncated eigenbasis of a one-dimensional trap.
///
/// Mode values at the quadrature nodes are tabulated once, so quadratures of
/// mode products never re-evaluate wavefunctions.
class SingleParticleBasis {
 public:
  SingleParticleBasis(TrapPotential trap, std::vector<double> energies, QuadratureRule quadrature,
                      Eigen::MatrixXd nodal_values);

  const TrapPotential& trap() const { return trap_; }
  std::size_t cutoff() const { return energies_.size(); }
  std::span<const double> energies() const { return energies_; }
  double energy(std::size_t n) const { return energies_.at(n); }

  /// Amplitude of mode n at position x.
  double amplitude(std::size_t n, double x) const;

  const QuadratureRule& quadrature() const { return quadrature_; }

  /// Mode values at quadrature nodes, one row per mode.
  const Eigen::MatrixXd& nodal_values() const { return nodal_values_; }

  /// Gram matrix of the modes under the quadrature rule.
  Eigen::MatrixXd overlap_matrix() const;

  /// Interior sign changes of mode n over the quadrature samples, ignoring
  /// samples below 1e-8 of the mode's peak magnitude.
  int sign_changes(std::size_t n) const;

 private:
  TrapPotential trap_;
  std::vector<double> energies_;
  QuadratureRule quadrature_;
  Eigen::MatrixXd nodal_values_;
};

/// Solves the single-particle problem: closed forms for the harmonic trap and
/// infinite well, a second-order finite-difference eigensolve for sampled
/// potentials. Throws ResolutionError when the result breaks the
/// orthonormality or node-count invariants.
SingleParticleBasis solve_trap(const TrapPotential& trap, std::size_t cutoff);
SingleParticleBasis solve_trap(const TrapPotential& trap, std::size_t cutoff,
                               std::size_t quadrature_order);

struct GridConvergence {
  std::vector<double> fine;
  std::vector<double> coarse;
  double max_change = 0.0;
  bool converged = false;
};

/// Compares the energies of a sampled trap on its own grid against its
/// every-other-point subgrid. The grid must have an odd number of samples.
GridConvergence check_grid_convergence(const TrapPotential& trap, std::size_t cutoff,
                                       double tolerance);

namespace detail {

/// Normalized Hermite functions phi_0..phi_{count-1} at x for m*omega = 1.
void hermite_functions(double x, std::span<double> out);

/// Lowest `count` eigenpairs of a symmetric tridiagonal matrix by Sturm
/// bisection and inverse iteration.
struct TridiagonalEigen {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // one column per eigenvalue
};
TridiagonalEigen lowest_tridiagonal_eigenpairs(std::span<const double> diag,
                                               std::span<const double> offdiag,
                                               std::size_t count);

}  // namespace detail

}  // namespace fewbody
