#include "fewbody/single_particle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fewbody/errors.hpp"

namespace fewbody {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZeroThreshold = 1e-8;
constexpr double kOrthonormalityTolerance = 1e-10;
constexpr int kMinLobeSamples = 3;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Gauss-Hermite nodes for weight exp(-t^2) with "total" weights w*exp(t^2),
// so that sum_i W_i f(t_i) approximates the plain integral of f.
void gauss_hermite_total(std::size_t n, std::vector<double>& t, std::vector<double>& w) {
  t.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pim4 = std::pow(kPi, -0.25);
  const std::size_t m = (n + 1) / 2;
  const double nd = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(nd, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * t[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * t[1];
    } else {
      z = 2.0 * z - t[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      // Recurrence on Hermite functions (Gaussian factor included) keeps the
      // values finite for large |z|.
      double p1 = pim4 * std::exp(-0.5 * z * z);
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / jd) * p2 - std::sqrt((jd - 1.0) / jd) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      // Newton step on p_n(z) exp(-z^2/2): the derivative of the function
      // equals pp - z*p1, and at a root p1 = 0.
      const double z1 = z;
      z = z1 - p1 / (pp - z1 * p1);
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    t[i] = z;
    t[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
}

void gauss_legendre(std::size_t n, double a, double b, std::vector<double>& x,
                    std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const std::size_t m = (n + 1) / 2;
  const double xm = 0.5 * (b + a);
  const double xl = 0.5 * (b - a);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = ((2.0 * jd - 1.0) * z * p2 - (jd - 1.0) * p3) / jd;
      }
      pp = nd * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-16) break;
    }
    x[i] = xm - xl * z;
    x[n - 1 - i] = xm + xl * z;
    w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

void validate_sampled(const SampledPotential& s) {
  if (s.x.size() < 3) throw InvalidArgument("custom potential needs at least 3 grid points");
  if (s.x.size() != s.v.size()) {
    throw InvalidArgument("custom potential: x and V(x) sample counts differ");
  }
  const double h = (s.x.back() - s.x.front()) / static_cast<double>(s.x.size() - 1);
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    if (!std::isfinite(s.x[i]) || !std::isfinite(s.v[i])) {
      throw InvalidArgument("custom potential: non-finite sample at index " + std::to_string(i));
    }
    if (i > 0) {
      const double step = s.x[i] - s.x[i - 1];
      if (step <= 0.0) {
        throw InvalidArgument("custom potential: abscissae not strictly increasing at index " +
                              std::to_string(i));
      }
      if (std::abs(step - h) > 1e-6 * h) {
        throw InvalidArgument("custom potential: grid is not uniform at index " +
                              std::to_string(i));
      }
    }
  }
}

double grid_step(const SampledPotential& s) {
  return (s.x.back() - s.x.front()) / static_cast<double>(s.x.size() - 1);
}

// Solves (T - shift) y = rhs for symmetric tridiagonal T by Gaussian
// elimination with partial pivoting. T - shift is nearly singular during
// inverse iteration, so pivoting matters.
std::vector<double> solve_shifted_tridiagonal(std::span<const double> diag,
                                              std::span<const double> off, double shift,
                                              std::vector<double> rhs) {
  const std::size_t n = diag.size();
  // Row i of the eliminated upper-triangular factor has entries u0 (diagonal),
  // u1, u2 (two superdiagonals).
  std::vector<double> u0(n), u1(n, 0.0), u2(n, 0.0);
  // Current working row: (a, b, c) = entries at columns i, i+1, i+2.
  double a = diag[0] - shift;
  double b = n > 1 ? off[0] : 0.0;
  double c = 0.0;
  const double tiny = std::numeric_limits<double>::min() * 1e10;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // Next raw row i+1: sub = off[i], dia = diag[i+1]-shift, sup = off[i+1].
    double sub = off[i];
    double dia = diag[i + 1] - shift;
    double sup = (i + 2 < n) ? off[i + 1] : 0.0;
    if (std::abs(sub) > std::abs(a)) {
      // Swap working row with row i+1.
      std::swap(a, sub);
      std::swap(b, dia);
      std::swap(c, sup);
      std::swap(rhs[i], rhs[i + 1]);
    }
    if (std::abs(a) < tiny) a = tiny;
    const double factor = sub / a;
    u0[i] = a;
    u1[i] = b;
    u2[i] = c;
    rhs[i + 1] -= factor * rhs[i];
    a = dia - factor * b;
    b = sup - factor * c;
    c = 0.0;
  }
  if (std::abs(a) < tiny) a = tiny;
  u0[n - 1] = a;
  std::vector<double> y(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = rhs[k];
    if (k + 1 < n) s -= u1[k] * y[k + 1];
    if (k + 2 < n) s -= u2[k] * y[k + 2];
    y[k] = s / u0[k];
  }
  return y;
}

std::size_t sturm_count(std::span<const double> diag, std::span<const double> off, double x) {
  std::size_t count = 0;
  double d = diag[0] - x;
  if (d < 0.0) ++count;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    if (d == 0.0) d = std::numeric_limits<double>::epsilon() * (std::abs(x) + 1.0);
    d = (diag[i] - x) - off[i - 1] * off[i - 1] / d;
    if (d < 0.0) ++count;
  }
  return count;
}

struct SampledSolution {
  std::vector<double> energies;
  Eigen::MatrixXd values;  // modes x grid points, Dirichlet endpoints included
};

// Fewest significant samples in any run of one sign.
int shortest_lobe(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const double peak = row.cwiseAbs().maxCoeff();
  int shortest = std::numeric_limits<int>::max(), run = 0, last_sign = 0;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (std::abs(row(i)) <= kZeroThreshold * peak) continue;
    const int s = row(i) > 0.0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) {
      shortest = std::min(shortest, run);
      run = 0;
    }
    ++run;
    last_sign = s;
  }
  return std::min(shortest, run);
}

SampledSolution solve_sampled(const SampledPotential& s, double mass, std::size_t cutoff) {
  const std::size_t points = s.x.size();
  const std::size_t interior = points - 2;
  if (cutoff > interior) {
    throw ResolutionError("mode " + std::to_string(interior) + " cannot be resolved: custom grid has " +
                          std::to_string(interior) + " interior points");
  }
  const double h = grid_step(s);
  const double kinetic = 1.0 / (2.0 * mass * h * h);
  std::vector<double> diag(interior), off(interior > 0 ? interior - 1 : 0, -kinetic);
  for (std::size_t i = 0; i < interior; ++i) diag[i] = 2.0 * kinetic + s.v[i + 1];

  const auto eig = detail::lowest_tridiagonal_eigenpairs(diag, off, cutoff);
  SampledSolution out;
  out.energies = eig.values;
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cutoff),
                                     static_cast<Eigen::Index>(points));
  for (std::size_t n = 0; n < cutoff; ++n) {
    Eigen::VectorXd col = eig.vectors.col(static_cast<Eigen::Index>(n));
    col /= std::sqrt(h * col.squaredNorm());
    // Leftmost significant sample positive.
    const double peak = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > kZeroThreshold * peak) {
        if (col(i) < 0.0) col = -col;
        break;
      }
    }
    out.values.row(static_cast<Eigen::Index>(n))
        .segment(1, static_cast<Eigen::Index>(interior)) = col.transpose();
  }
  return out;
}

}  // namespace

std::string to_string(TrapKind kind) {
  switch (kind) {
    case TrapKind::harmonic:
      return "harmonic";
    case TrapKind::infinite_well:
      return "infinite_well";
    case TrapKind::custom:
      return "custom";
  }
  return "unknown";
}

TrapPotential::TrapPotential(Shape shape, double mass) : shape_(std::move(shape)), mass_(mass) {
  if (!(mass_ > 0.0) || !std::isfinite(mass_)) throw InvalidArgument("mass must be positive");
}

TrapPotential TrapPotential::harmonic(double omega, double mass) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidArgument("omega must be positive");
  return TrapPotential(HarmonicTrap{omega}, mass);
}

TrapPotential TrapPotential::infinite_well(double length, double mass) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("well length must be positive");
  }
  return TrapPotential(InfiniteWell{length}, mass);
}

TrapPotential TrapPotential::custom(std::vector<double> x, std::vector<double> v, double mass) {
  SampledPotential s{std::move(x), std::move(v)};
  validate_sampled(s);
  return TrapPotential(std::move(s), mass);
}

TrapKind TrapPotential::kind() const {
  return std::visit(overloaded{[](const HarmonicTrap&) { return TrapKind::harmonic; },
                               [](const InfiniteWell&) { return TrapKind::infinite_well; },
                               [](const SampledPotential&) { return TrapKind::custom; }},
                    shape_);
}

bool TrapPotential::reflection_symmetric(double tol) const {
  const auto* s = std::get_if<SampledPotential>(&shape_);
  if (s == nullptr) return true;
  const std::size_t n = s->v.size();
  const double scale = std::max(1.0, std::abs(*std::max_element(
                                         s->v.begin(), s->v.end(), [](double a, double b) {
                                           return std::abs(a) < std::abs(b);
                                         })));
  for (std::size_t i = 0; i < n / 2; ++i) {
    if (std::abs(s->v[i] - s->v[n - 1 - i]) > tol * scale) return false;
  }
  return true;
}

std::pair<double, double> TrapPotential::domain() const {
  return std::visit(
      overloaded{[](const HarmonicTrap&) {
                   return std::pair{-std::numeric_limits<double>::infinity(),
                                    std::numeric_limits<double>::infinity()};
                 },
                 [](const InfiniteWell& w) { return std::pair{0.0, w.length}; },
                 [](const SampledPotential& s) { return std::pair{s.x.front(), s.x.back()}; }},
      shape_);
}

TrapPotential load_potential_file(const std::filesystem::path& path, double mass) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open potential file " + path.string());
  std::vector<double> x, v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double xi = 0.0, vi = 0.0;
    if (!(fields >> xi >> vi)) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) +
                            ": expected two numeric columns");
    }
    std::string rest;
    if (fields >> rest && rest[0] != '#') {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) +
                            ": unexpected extra column");
    }
    x.push_back(xi);
    v.push_back(vi);
  }
  return TrapPotential::custom(std::move(x), std::move(v), mass);
}

std::size_t default_quadrature_order(std::size_t cutoff) { return 4 * cutoff + 32; }

QuadratureRule quadrature_rule(const TrapPotential& trap, std::size_t order) {
  if (order == 0) throw InvalidArgument("quadrature order must be at least 1");
  QuadratureRule rule;
  std::visit(overloaded{
                 [&](const HarmonicTrap& h) {
                   std::vector<double> t, w;
                   gauss_hermite_total(order, t, w);
                   const double alpha = 2.0 * trap.mass() * h.omega;
                   const double scale = 1.0 / std::sqrt(alpha);
                   // Ascending nodes.
                   rule.nodes.resize(order);
                   rule.weights.resize(order);
                   for (std::size_t i = 0; i < order; ++i) {
                     rule.nodes[i] = t[order - 1 - i] * scale;
                     rule.weights[i] = w[order - 1 - i] * scale;
                   }
                 },
                 [&](const InfiniteWell& well) {
                   gauss_legendre(order, 0.0, well.length, rule.nodes, rule.weights);
                 },
                 [&](const SampledPotential& s) {
                   const double h = grid_step(s);
                   rule.nodes = s.x;
                   rule.weights.assign(s.x.size(), h);
                   rule.weights.front() = 0.5 * h;
                   rule.weights.back() = 0.5 * h;
                 }},
             trap.shape());
  return rule;
}

SingleParticleBasis::SingleParticleBasis(TrapPotential trap, std::vector<double> energies,
                                         QuadratureRule quadrature, Eigen::MatrixXd nodal_values)
    : trap_(std::move(trap)),
      energies_(std::move(energies)),
      quadrature_(std::move(quadrature)),
      nodal_values_(std::move(nodal_values)) {}

double SingleParticleBasis::amplitude(std::size_t n, double x) const {
  if (n >= cutoff()) throw InvalidArgument("mode index out of range");
  const double mass = trap_.mass();
  return std::visit(
      overloaded{[&](const HarmonicTrap& h) {
                   const double s = std::sqrt(mass * h.omega);
                   std::vector<double> buf(n + 1);
                   detail::hermite_functions(s * x, buf);
                   return std::sqrt(s) * buf[n];
                 },
                 [&](const InfiniteWell& w) {
                   if (x < 0.0 || x > w.length) return 0.0;
                   return std::sqrt(2.0 / w.length) *
                          std::sin(static_cast<double>(n + 1) * kPi * x / w.length);
                 },
                 [&](const SampledPotential& s) {
                   if (x <= s.x.front() || x >= s.x.back()) return 0.0;
                   const double h = grid_step(s);
                   const auto i = static_cast<std::size_t>((x - s.x.front()) / h);
                   const std::size_t j = std::min(i, s.x.size() - 2);
                   const double f = (x - s.x[j]) / h;
                   const auto row = static_cast<Eigen::Index>(n);
                   return (1.0 - f) * nodal_values_(row, static_cast<Eigen::Index>(j)) +
                          f * nodal_values_(row, static_cast<Eigen::Index>(j + 1));
                 }},
      trap_.shape());
}

Eigen::MatrixXd SingleParticleBasis::overlap_matrix() const {
  const Eigen::Map<const Eigen::VectorXd> w(quadrature_.weights.data(),
                                            static_cast<Eigen::Index>(quadrature_.size()));
  return nodal_values_ * w.asDiagonal() * nodal_values_.transpose();
}

int SingleParticleBasis::sign_changes(std::size_t n) const {
  const auto row = nodal_values_.row(static_cast<Eigen::Index>(n));
  const double peak = row.cwiseAbs().maxCoeff();
  int changes = 0;
  int last_sign = 0;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    const double v = row(i);
    if (std::abs(v) <= kZeroThreshold * peak) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return changes;
}

SingleParticleBasis solve_trap(const TrapPotential& trap, std::size_t cutoff) {
  return solve_trap(trap, cutoff, default_quadrature_order(cutoff));
}

SingleParticleBasis solve_trap(const TrapPotential& trap, std::size_t cutoff,
                               std::size_t quadrature_order) {
  if (cutoff == 0) throw InvalidArgument("cutoff must be at least 1");
  const double mass = trap.mass();
  std::vector<double> energies(cutoff);
  QuadratureRule rule;
  Eigen::MatrixXd values;

  switch (trap.kind()) {
    case TrapKind::harmonic: {
      const double omega = std::get<HarmonicTrap>(trap.shape()).omega;
      if (2 * quadrature_order < 4 * (cutoff - 1) + 1) {
        throw ResolutionError("quadrature order " + std::to_string(quadrature_order) +
                              " cannot integrate quartic products of " + std::to_string(cutoff) +
                              " modes");
      }
      for (std::size_t n = 0; n < cutoff; ++n) {
        energies[n] = omega * (static_cast<double>(n) + 0.5);
      }
      rule = quadrature_rule(trap, quadrature_order);
      values.resize(static_cast<Eigen::Index>(cutoff), static_cast<Eigen::Index>(rule.size()));
      const double s = std::sqrt(mass * omega);
      std::vector<double> buf(cutoff);
      for (std::size_t i = 0; i < rule.size(); ++i) {
        detail::hermite_functions(s * rule.nodes[i], buf);
        for (std::size_t n = 0; n < cutoff; ++n) {
          values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) =
              std::sqrt(s) * buf[n];
        }
      }
      break;
    }
    case TrapKind::infinite_well: {
      const double length = std::get<InfiniteWell>(trap.shape()).length;
      for (std::size_t n = 0; n < cutoff; ++n) {
        const double k = static_cast<double>(n + 1) * kPi / length;
        energies[n] = k * k / (2.0 * mass);
      }
      rule = quadrature_rule(trap, quadrature_order);
      values.resize(static_cast<Eigen::Index>(cutoff), static_cast<Eigen::Index>(rule.size()));
      const double norm = std::sqrt(2.0 / length);
      for (std::size_t i = 0; i < rule.size(); ++i) {
        for (std::size_t n = 0; n < cutoff; ++n) {
          values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) =
              norm * std::sin(static_cast<double>(n + 1) * kPi * rule.nodes[i] / length);
        }
      }
      break;
    }
    case TrapKind::custom: {
      const auto& s = std::get<SampledPotential>(trap.shape());
      auto sol = solve_sampled(s, mass, cutoff);
      energies = std::move(sol.energies);
      values = std::move(sol.values);
      rule = quadrature_rule(trap, quadrature_order);
      break;
    }
  }

  SingleParticleBasis basis(trap, std::move(energies), std::move(rule), std::move(values));

  for (std::size_t n = 0; n < cutoff; ++n) {
    if (basis.sign_changes(n) != static_cast<int>(n)) {
      throw ResolutionError("mode " + std::to_string(n) + " has " +
                            std::to_string(basis.sign_changes(n)) +
                            " sign changes on the sample grid, expected " + std::to_string(n));
    }
    if (trap.kind() == TrapKind::custom) {
      const int lobe = shortest_lobe(basis.nodal_values().row(static_cast<Eigen::Index>(n)));
      if (lobe < kMinLobeSamples) {
        throw ResolutionError("mode " + std::to_string(n) + " is under-resolved: a lobe spans " +
                              std::to_string(lobe) + " grid samples");
      }
    }
    if (n > 0 && !(basis.energies()[n] > basis.energies()[n - 1])) {
      throw ResolutionError("energies not strictly increasing at mode " + std::to_string(n));
    }
  }
  const Eigen::MatrixXd gram = basis.overlap_matrix();
  const double err =
      (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (err > kOrthonormalityTolerance) {
    throw ResolutionError("modes are orthonormal only to " + std::to_string(err) +
                          " under a quadrature of order " + std::to_string(quadrature_order));
  }
  return basis;
}

GridConvergence check_grid_convergence(const TrapPotential& trap, std::size_t cutoff,
                                       double tolerance) {
  const auto* s = std::get_if<SampledPotential>(&trap.shape());
  if (s == nullptr) throw InvalidArgument("grid convergence applies to sampled potentials only");
  if (s->x.size() % 2 == 0) {
    throw InvalidArgument("grid convergence needs an odd number of samples");
  }
  std::vector<double> xc, vc;
  for (std::size_t i = 0; i < s->x.size(); i += 2) {
    xc.push_back(s->x[i]);
    vc.push_back(s->v[i]);
  }
  const auto coarse_trap = TrapPotential::custom(std::move(xc), std::move(vc), trap.mass());
  GridConvergence out;
  const auto fine = solve_trap(trap, cutoff);
  const auto coarse = solve_trap(coarse_trap, cutoff);
  out.fine.assign(fine.energies().begin(), fine.energies().end());
  out.coarse.assign(coarse.energies().begin(), coarse.energies().end());
  for (std::size_t n = 0; n < cutoff; ++n) {
    out.max_change = std::max(out.max_change, std::abs(out.fine[n] - out.coarse[n]));
  }
  out.converged = out.max_change < tolerance;
  return out;
}

namespace detail {

void hermite_functions(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (out.size() > 1) out[1] = std::sqrt(2.0) * x * out[0];
  for (std::size_t n = 2; n < out.size(); ++n) {
    const double nd = static_cast<double>(n);
    out[n] = std::sqrt(2.0 / nd) * x * out[n - 1] - std::sqrt((nd - 1.0) / nd) * out[n - 2];
  }
}

TridiagonalEigen lowest_tridiagonal_eigenpairs(std::span<const double> diag,
                                               std::span<const double> offdiag,
                                               std::size_t count) {
  const std::size_t n = diag.size();
  if (count > n) throw InvalidArgument("more eigenpairs requested than the matrix dimension");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(offdiag[i - 1]);
    if (i + 1 < n) r += std::abs(offdiag[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));

  TridiagonalEigen out;
  out.values.resize(count);
  out.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k) {
    // k-th smallest: largest x with fewer than k+1 eigenvalues below it.
    double a = lo, b = hi;
    while (b - a > 4.0 * std::numeric_limits<double>::epsilon() * scale) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (sturm_count(diag, offdiag, mid) > k) {
        b = mid;
      } else {
        a = mid;
      }
    }
    const double lambda = 0.5 * (a + b);
    out.values[k] = lambda;

    Eigen::VectorXd yv(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      // Deterministic start vector with no special symmetry.
      yv(static_cast<Eigen::Index>(i)) = 1.0 + 0.1 * std::sin(1.0 + 0.7 * static_cast<double>(i));
    }
    for (int it = 0; it < 3; ++it) {
      const auto y = solve_shifted_tridiagonal(diag, offdiag, lambda,
                                               std::vector<double>(yv.data(), yv.data() + n));
      yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(n));
      for (std::size_t j = 0; j < k; ++j) {
        const auto prev = out.vectors.col(static_cast<Eigen::Index>(j));
        yv -= prev.dot(yv) * prev;
      }
      yv.normalize();
    }
    out.vectors.col(static_cast<Eigen::Index>(k)) = yv;
  }
  return out;
}

}  // namespace detail

}  // namespace fewbody
