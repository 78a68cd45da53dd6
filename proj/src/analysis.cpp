#include "fewbody/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include "fewbody/errors.hpp"

namespace fewbody {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBrodyLow = -0.1;
constexpr double kBrodyHigh = 1.5;
constexpr double kNormTolerance = 1e-12;

double brody_b(double beta) {
  return std::pow(std::tgamma((beta + 2.0) / (beta + 1.0)), beta + 1.0);
}

double brody_log_likelihood(std::span<const double> s, double beta) {
  const double b = brody_b(beta);
  const double a = (beta + 1.0) * b;
  double sum_log = 0.0, sum_pow = 0.0;
  for (double x : s) {
    const double xs = std::max(x, 1e-12);
    sum_log += std::log(xs);
    sum_pow += std::pow(xs, beta + 1.0);
  }
  return static_cast<double>(s.size()) * std::log(a) + beta * sum_log - b * sum_pow;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> unfolded_spacings(std::span<const double> eigenvalues,
                                      const UnfoldingOptions& options) {
  const std::size_t n = eigenvalues.size();
  if (n < 3) throw InsufficientData("unfolding needs at least 3 levels");
  if (options.degree < 1) throw InvalidArgument("unfolding degree must be at least 1");
  if (!(options.edge_fraction >= 0.0 && options.edge_fraction < 0.5)) {
    throw InvalidArgument("edge fraction must lie in [0, 0.5)");
  }
  std::vector<double> e(eigenvalues.begin(), eigenvalues.end());
  std::sort(e.begin(), e.end());
  const double lo = e.front(), hi = e.back();
  if (!(hi > lo)) throw InvalidArgument("spectrum has zero width");
  const double centre = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
  const int degree = std::min<int>(options.degree, static_cast<int>(n) - 1);

  // Least-squares fit of the staircase N(E_i) = i + 1/2 on scaled energies.
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), degree + 1);
  Eigen::VectorXd target(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (e[i] - centre) / half;
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
      design(static_cast<Eigen::Index>(i), k) = p;
      p *= u;
    }
    target(static_cast<Eigen::Index>(i)) = static_cast<double>(i) + 0.5;
  }
  const Eigen::VectorXd coeff = design.colPivHouseholderQr().solve(target);
  const Eigen::VectorXd unfolded = design * coeff;

  const auto drop = static_cast<std::size_t>(std::floor(options.edge_fraction * static_cast<double>(n)));
  if (n < 2 * drop + 2) throw InsufficientData("too few levels left after edge removal");
  std::vector<double> spacings;
  spacings.reserve(n - 2 * drop - 1);
  for (std::size_t i = drop; i + 1 < n - drop; ++i) {
    spacings.push_back(unfolded(static_cast<Eigen::Index>(i + 1)) -
                       unfolded(static_cast<Eigen::Index>(i)));
  }
  const double mean = std::accumulate(spacings.begin(), spacings.end(), 0.0) /
                      static_cast<double>(spacings.size());
  for (double& s : spacings) s /= mean;
  return spacings;
}

SpacingStatistics spacing_statistics(std::span<const double> eigenvalues,
                                     const UnfoldingOptions& options) {
  if (eigenvalues.size() < kMinimumLevels) {
    throw InsufficientData("spacing statistics need at least " + std::to_string(kMinimumLevels) +
                           " levels, got " + std::to_string(eigenvalues.size()));
  }
  SpacingStatistics out;
  out.spacings = unfolded_spacings(eigenvalues, options);
  double var = 0.0;
  for (double s : out.spacings) var += (s - 1.0) * (s - 1.0);
  var /= static_cast<double>(out.spacings.size());
  if (var < 1e-20) {
    throw InvalidArgument("unfolded spacings have zero variance; no Brody fit exists");
  }
  out.ks_poisson = ks_distance(out.spacings, poisson_cdf);
  out.ks_wigner = ks_distance(out.spacings, wigner_cdf);
  out.brody_beta = brody_fit(out.spacings);
  return out;
}

double poisson_density(double s) { return s < 0.0 ? 0.0 : std::exp(-s); }
double poisson_cdf(double s) { return s < 0.0 ? 0.0 : 1.0 - std::exp(-s); }
double wigner_density(double s) {
  return s < 0.0 ? 0.0 : 0.5 * kPi * s * std::exp(-0.25 * kPi * s * s);
}
double wigner_cdf(double s) { return s < 0.0 ? 0.0 : 1.0 - std::exp(-0.25 * kPi * s * s); }

double brody_density(double s, double beta) {
  if (s <= 0.0) return 0.0;
  const double b = brody_b(beta);
  return (beta + 1.0) * b * std::pow(s, beta) * std::exp(-b * std::pow(s, beta + 1.0));
}

double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw InsufficientData("KS distance of an empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InsufficientData("KS distance of an empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(x.size()) -
                             static_cast<double>(j) / static_cast<double>(y.size())));
  }
  return d;
}

double brody_fit(std::span<const double> spacings) {
  if (spacings.empty()) throw InsufficientData("Brody fit of an empty sample");
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = kBrodyLow, b = kBrodyHigh;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = brody_log_likelihood(spacings, c), fd = brody_log_likelihood(spacings, d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = brody_log_likelihood(spacings, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = brody_log_likelihood(spacings, d);
    }
  }
  return std::clamp(0.5 * (a + b), kBrodyLow, kBrodyHigh);
}

Eigen::MatrixXd goe_sample(std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw InvalidArgument("GOE sample needs dimension at least 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> diag(0.0, 1.0);
  std::normal_distribution<double> off(0.0, std::sqrt(0.5));
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diag(rng);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      m(i, j) = off(rng);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

std::vector<HistogramRow> spacing_histogram(std::span<const double> spacings, double bin_width,
                                            double s_max) {
  if (!(bin_width > 0.0) || !(s_max > 0.0)) {
    throw InvalidArgument("histogram bin width and range must be positive");
  }
  const auto bins = static_cast<std::size_t>(std::ceil(s_max / bin_width));
  std::vector<std::size_t> counts(bins, 0);
  for (double s : spacings) {
    if (s < 0.0) continue;
    const auto k = static_cast<std::size_t>(s / bin_width);
    if (k < bins) ++counts[k];
  }
  std::vector<HistogramRow> rows;
  rows.reserve(bins);
  const double norm = static_cast<double>(spacings.size()) * bin_width;
  for (std::size_t k = 0; k < bins; ++k) {
    const double s = (static_cast<double>(k) + 0.5) * bin_width;
    rows.push_back({s, static_cast<double>(counts[k]) / norm, poisson_density(s), wigner_density(s)});
  }
  return rows;
}

void write_histogram_csv(std::ostream& os, std::span<const HistogramRow> rows) {
  const auto old = os.precision(17);
  os << "s,empirical_density,poisson_density,wigner_density\n";
  for (const auto& r : rows) {
    os << r.s << ',' << r.empirical << ',' << r.poisson << ',' << r.wigner << '\n';
  }
  os.precision(old);
}

// ---------------------------------------------------------------------------

StateVector::StateVector(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (std::abs(amplitudes_.norm() - 1.0) > kNormTolerance) {
    throw InvalidArgument("state vector is not normalized");
  }
}

StateVector StateVector::normalized(Eigen::VectorXcd amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) throw InvalidArgument("cannot normalize a zero vector");
  return StateVector(amplitudes / norm);
}

StateVector StateVector::basis_state(std::size_t dim, std::size_t index) {
  if (index >= dim) throw InvalidArgument("basis state index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

std::complex<double> StateVector::inner(const StateVector& other) const {
  if (other.dimension() != dimension()) throw InvalidArgument("state dimensions differ");
  return amplitudes_.dot(other.amplitudes_);  // conjugates the left operand
}

BipartiteLayout interparticle_layout(const FockBasis& fock, int left_particles) {
  const int n = fock.particles();
  if (left_particles < 1 || left_particles >= n) {
    throw InvalidArgument("interparticle split needs 1 <= left particles < N");
  }
  const std::size_t base = static_cast<std::size_t>(fock.max_mode()) + 1;
  BipartiteLayout layout;
  layout.left_dim = 1;
  layout.right_dim = 1;
  for (int k = 0; k < left_particles; ++k) layout.left_dim *= base;
  for (int k = left_particles; k < n; ++k) layout.right_dim *= base;
  layout.coordinates.reserve(fock.size());
  for (const auto& s : fock.states()) {
    std::size_t left = 0, right = 0;
    for (int k = left_particles - 1; k >= 0; --k) left = left * base + static_cast<std::size_t>(s[static_cast<std::size_t>(k)]);
    for (int k = n - 1; k >= left_particles; --k) right = right * base + static_cast<std::size_t>(s[static_cast<std::size_t>(k)]);
    layout.coordinates.emplace_back(left, right);
  }
  return layout;
}

namespace {

Eigen::MatrixXcd coefficient_grid(const StateVector& state, const BipartiteLayout& layout) {
  if (layout.coordinates.size() != state.dimension()) {
    throw InvalidArgument("layout declares " + std::to_string(layout.coordinates.size()) +
                          " states, state has " + std::to_string(state.dimension()));
  }
  if (layout.left_dim == 0 || layout.right_dim == 0) {
    throw InvalidArgument("layout factor dimensions must be positive");
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(layout.left_dim),
                                              static_cast<Eigen::Index>(layout.right_dim));
  for (std::size_t k = 0; k < layout.coordinates.size(); ++k) {
    const auto [l, r] = layout.coordinates[k];
    if (l >= layout.left_dim || r >= layout.right_dim) {
      throw InvalidArgument("not a product basis: coordinate outside the factor grid");
    }
    if (!seen.insert({l, r}).second) {
      throw InvalidArgument("not a product basis: two states share a product cell");
    }
    c(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r)) =
        state.amplitudes()(static_cast<Eigen::Index>(k));
  }
  return c;
}

}  // namespace

Eigen::MatrixXcd reduced_density_matrix(const StateVector& state, const BipartiteLayout& layout) {
  const Eigen::MatrixXcd c = coefficient_grid(state, layout);
  return c * c.adjoint();
}

double entanglement_entropy(const StateVector& state, const BipartiteLayout& layout) {
  const Eigen::MatrixXcd c = coefficient_grid(state, layout);
  // Both reduced states share their nonzero spectrum; use the smaller one.
  const Eigen::MatrixXcd rho = c.rows() <= c.cols() ? Eigen::MatrixXcd(c * c.adjoint())
                                                    : Eigen::MatrixXcd(c.adjoint() * c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double p = solver.eigenvalues()(i);
    if (p > 1e-300) s -= p * std::log(p);
  }
  return std::max(s, 0.0);
}

Propagator::Propagator(const Eigen::MatrixXd& hamiltonian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  if (solver.info() != Eigen::Success) throw Error("propagator eigensolve failed");
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

Propagator::Propagator(const HamiltonianMatrix& hamiltonian) : Propagator(hamiltonian.dense()) {}

StateVector Propagator::evolve(const StateVector& state, double t) const {
  if (state.dimension() != dimension()) {
    throw InvalidArgument("state dimension " + std::to_string(state.dimension()) +
                          " differs from Hamiltonian dimension " + std::to_string(dimension()));
  }
  Eigen::VectorXcd c = vectors_.transpose().cast<std::complex<double>>() * state.amplitudes();
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    c(k) *= std::polar(1.0, -values_(k) * t);
  }
  Eigen::VectorXcd out = vectors_.cast<std::complex<double>>() * c;
  // Remove the last-bit drift so the unit-norm invariant holds exactly.
  out /= out.norm();
  return StateVector(std::move(out));
}

StateVector evolve_state(const Eigen::MatrixXd& hamiltonian, const StateVector& state, double t) {
  if (hamiltonian.rows() != static_cast<Eigen::Index>(state.dimension())) {
    throw InvalidArgument("state and Hamiltonian dimensions differ");
  }
  return Propagator(hamiltonian).evolve(state, t);
}

StateVector evolve_state(const HamiltonianMatrix& hamiltonian, const StateVector& state, double t) {
  return evolve_state(hamiltonian.dense(), state, t);
}

// ---------------------------------------------------------------------------

ComRelMap::ComRelMap(Eigen::MatrixXd unitary, std::vector<ComRelLabel> labels,
                     Eigen::MatrixXd h_com, Eigen::MatrixXd h_osc_rel, std::vector<int> shells,
                     std::uint64_t basis_id)
    : unitary_(std::move(unitary)),
      labels_(std::move(labels)),
      h_com_(std::move(h_com)),
      h_osc_rel_(std::move(h_osc_rel)),
      shells_(std::move(shells)),
      basis_id_(basis_id) {}

Eigen::MatrixXd ComRelMap::h_rel(const HamiltonianMatrix& h) const {
  if (h.basis_id() != basis_id_) throw MismatchError("Hamiltonian built on another basis");
  return h.dense() - h_com_;
}

double ComRelMap::commutator(const HamiltonianMatrix& h) const {
  if (h.basis_id() != basis_id_) throw MismatchError("Hamiltonian built on another basis");
  const Eigen::MatrixXd hd = h.dense();
  return (h_com_ * hd - hd * h_com_).cwiseAbs().maxCoeff();
}

double ComRelMap::interior_commutator(const HamiltonianMatrix& h) const {
  if (h.basis_id() != basis_id_) throw MismatchError("Hamiltonian built on another basis");
  const Eigen::MatrixXd hd = h.dense();
  const Eigen::MatrixXd c = h_com_ * hd - hd * h_com_;
  const int top = *std::max_element(shells_.begin(), shells_.end());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    if (shells_[static_cast<std::size_t>(i)] >= top) continue;
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      if (shells_[static_cast<std::size_t>(j)] >= top) continue;
      worst = std::max(worst, std::abs(c(i, j)));
    }
  }
  return worst;
}

StateVector ComRelMap::to_com_rel(const StateVector& product_state) const {
  if (product_state.dimension() != static_cast<std::size_t>(unitary_.rows())) {
    throw InvalidArgument("state dimension differs from the CoM/rel map");
  }
  Eigen::VectorXcd v = unitary_.transpose().cast<std::complex<double>>() * product_state.amplitudes();
  v /= v.norm();
  return StateVector(std::move(v));
}

BipartiteLayout ComRelMap::layout() const {
  const int top = *std::max_element(shells_.begin(), shells_.end());
  BipartiteLayout out;
  out.left_dim = static_cast<std::size_t>(top) + 1;
  out.right_dim = static_cast<std::size_t>(top) + 1;
  for (const auto& l : labels_) {
    out.coordinates.emplace_back(static_cast<std::size_t>(l.com),
                                 static_cast<std::size_t>(l.relative));
  }
  return out;
}

ComRelMap com_rel_map(const FockBasis& fock) {
  const auto& trap = fock.single_particle().trap();
  if (trap.kind() != TrapKind::harmonic) {
    throw UnsupportedTrap("centre-of-mass separation needs a harmonic trap, got " +
                          to_string(trap.kind()));
  }
  if (fock.particles() != 2) throw InvalidArgument("CoM/rel map is defined for two particles");
  const double omega = std::get<HarmonicTrap>(trap.shape()).omega;
  const auto dim = static_cast<Eigen::Index>(fock.size());

  std::vector<int> shells(fock.size());
  std::map<int, std::vector<std::size_t>> by_shell;
  for (std::size_t i = 0; i < fock.size(); ++i) {
    shells[i] = fock.state(i)[0] + fock.state(i)[1];
    by_shell[shells[i]].push_back(i);
  }
  for (const auto& [q, members] : by_shell) {
    if (members.size() != static_cast<std::size_t>(q) + 1) {
      throw InvalidArgument("CoM/rel map needs complete shells of total quanta; shell " +
                            std::to_string(q) + " is partial");
    }
  }

  // hop = a1^dag a2 + a2^dag a1
  Eigen::MatrixXd hop = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t j = 0; j < fock.size(); ++j) {
    const int n1 = fock.state(j)[0], n2 = fock.state(j)[1];
    if (n2 > 0) {
      const auto i = fock.find({n1 + 1, n2 - 1});
      if (i) hop(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(j)) += std::sqrt(double(n1 + 1) * n2);
    }
    if (n1 > 0) {
      const auto i = fock.find({n1 - 1, n2 + 1});
      if (i) hop(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(j)) += std::sqrt(double(n1) * (n2 + 1));
    }
  }
  Eigen::VectorXd quanta(dim);
  for (Eigen::Index i = 0; i < dim; ++i) quanta(i) = shells[static_cast<std::size_t>(i)];
  Eigen::MatrixXd h_com = 0.5 * omega * hop;
  h_com.diagonal().array() += omega * (0.5 * quanta.array() + 0.5);
  Eigen::MatrixXd h_osc_rel = -0.5 * omega * hop;
  h_osc_rel.diagonal().array() += omega * (0.5 * quanta.array() + 0.5);

  struct Column {
    ComRelLabel label;
    Eigen::VectorXd vector;
  };
  std::vector<Column> columns;
  columns.reserve(fock.size());
  for (const auto& [q, members] : by_shell) {
    const auto d = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd block(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        block(a, b) = h_com(static_cast<Eigen::Index>(members[static_cast<std::size_t>(a)]),
                            static_cast<Eigen::Index>(members[static_cast<std::size_t>(b)]));
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
    for (Eigen::Index k = 0; k < d; ++k) {
      const int com = static_cast<int>(std::lround(solver.eigenvalues()(k) / omega - 0.5));
      const int rel = q - com;
      // Ladder reference (b_c^dag)^com (b_r^dag)^rel |0,0> / sqrt(com! rel!)
      // on the shell, indexed by n1.
      std::vector<double> ref(static_cast<std::size_t>(q) + 1, 0.0);
      std::vector<double> work{1.0};  // vacuum, shell 0
      const double r2 = 1.0 / std::sqrt(2.0);
      for (int step = 0; step < q; ++step) {
        const double s2 = step < com ? 1.0 : -1.0;  // b_c^dag, then b_r^dag
        std::vector<double> next(work.size() + 1, 0.0);
        const int shell = static_cast<int>(work.size()) - 1;
        for (int n1 = 0; n1 <= shell; ++n1) {
          const int n2 = shell - n1;
          const double c = work[static_cast<std::size_t>(n1)];
          next[static_cast<std::size_t>(n1 + 1)] += r2 * std::sqrt(double(n1 + 1)) * c;
          next[static_cast<std::size_t>(n1)] += s2 * r2 * std::sqrt(double(n2 + 1)) * c;
        }
        work = std::move(next);
      }
      const double norm = std::sqrt(std::tgamma(com + 1.0) * std::tgamma(rel + 1.0));
      for (std::size_t n1 = 0; n1 < work.size(); ++n1) ref[n1] = work[n1] / norm;

      Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
      double overlap = 0.0;
      for (Eigen::Index a = 0; a < d; ++a) {
        const auto idx = members[static_cast<std::size_t>(a)];
        v(static_cast<Eigen::Index>(idx)) = solver.eigenvectors()(a, k);
        overlap += solver.eigenvectors()(a, k) * ref[static_cast<std::size_t>(fock.state(idx)[0])];
      }
      if (overlap < 0.0) v = -v;
      const double residual =
          (h_osc_rel * v - omega * (rel + 0.5) * v).cwiseAbs().maxCoeff();
      if (std::abs(std::abs(overlap) - 1.0) > 1e-8 || residual > 1e-8) {
        throw Error("CoM/rel eigenbasis failed its ladder cross-check in shell " + std::to_string(q));
      }
      columns.push_back({{com, rel}, std::move(v)});
    }
  }
  std::sort(columns.begin(), columns.end(), [](const Column& a, const Column& b) {
    return std::tie(a.label.com, a.label.relative) < std::tie(b.label.com, b.label.relative);
  });
  Eigen::MatrixXd unitary(dim, dim);
  std::vector<ComRelLabel> labels;
  labels.reserve(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    unitary.col(static_cast<Eigen::Index>(k)) = columns[k].vector;
    labels.push_back(columns[k].label);
  }
  return ComRelMap(std::move(unitary), std::move(labels), std::move(h_com), std::move(h_osc_rel),
                   std::move(shells), fock.id());
}

}  // namespace fewbody
