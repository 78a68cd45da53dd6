#include "fewbody/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "fewbody/errors.hpp"

namespace fewbody {

namespace {

constexpr std::size_t binom(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::array<int, 4> sorted4(int a, int b, int c, int d) {
  std::array<int, 4> q{a, b, c, d};
  // Five-comparator sorting network.
  if (q[0] > q[1]) std::swap(q[0], q[1]);
  if (q[2] > q[3]) std::swap(q[2], q[3]);
  if (q[0] > q[2]) std::swap(q[0], q[2]);
  if (q[1] > q[3]) std::swap(q[1], q[3]);
  if (q[1] > q[2]) std::swap(q[1], q[2]);
  return q;
}

double quartic_integral(const SingleParticleBasis& sp, int a, int b, int c, int d) {
  const auto& v = sp.nodal_values();
  const auto& w = sp.quadrature().weights;
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    s += w[k] * v(a, kk) * v(b, kk) * v(c, kk) * v(d, kk);
  }
  return s;
}

void fill_for_top(const SingleParticleBasis& sp, TwoBodyTable& table, int d) {
  auto& store = table.storage();
  for (int c = 0; c <= d; ++c) {
    for (int b = 0; b <= c; ++b) {
      for (int a = 0; a <= b; ++a) {
        store[TwoBodyTable::rank(a, b, c, d)] = quartic_integral(sp, a, b, c, d);
      }
    }
  }
}

// Matrix element <m| sum_{p<q} delta(x_p - x_q) |n>.
double contact_element(const MultiIndex& m, const MultiIndex& n, const TwoBodyTable& table) {
  const int count = static_cast<int>(n.size());
  int diff[3];
  int ndiff = 0;
  for (int k = 0; k < count; ++k) {
    if (m[static_cast<std::size_t>(k)] != n[static_cast<std::size_t>(k)]) {
      if (ndiff == 2) return 0.0;
      diff[ndiff++] = k;
    }
  }
  auto pair_term = [&](int p, int q) {
    const auto up = static_cast<std::size_t>(p);
    const auto uq = static_cast<std::size_t>(q);
    return table(m[up], m[uq], n[up], n[uq]);
  };
  double s = 0.0;
  if (ndiff == 2) return pair_term(diff[0], diff[1]);
  if (ndiff == 1) {
    for (int q = 0; q < count; ++q) {
      if (q != diff[0]) s += pair_term(diff[0], q);
    }
    return s;
  }
  for (int p = 0; p < count; ++p) {
    for (int q = p + 1; q < count; ++q) s += pair_term(p, q);
  }
  return s;
}

TwoBodyTable make_table(const FockBasis& fock) {
  TwoBodyTable table(fock.single_particle(), fock.max_mode() + 1);
  kernels::fill_two_body_parallel(fock.single_particle(), table);
  return table;
}

}  // namespace

TwoBodyTable::TwoBodyTable(const SingleParticleBasis& sp, int modes) : modes_(modes) {
  if (modes < 1 || static_cast<std::size_t>(modes) > sp.cutoff()) {
    throw InvalidArgument("two-body table needs 1..cutoff modes");
  }
  values_.assign(binom(static_cast<std::size_t>(modes) + 3, 4), 0.0);
}

std::size_t TwoBodyTable::rank(int a, int b, int c, int d) {
  return binom(static_cast<std::size_t>(a), 1) + binom(static_cast<std::size_t>(b) + 1, 2) +
         binom(static_cast<std::size_t>(c) + 2, 3) + binom(static_cast<std::size_t>(d) + 3, 4);
}

double TwoBodyTable::operator()(int a, int b, int c, int d) const {
  const auto q = sorted4(a, b, c, d);
  return values_[rank(q[0], q[1], q[2], q[3])];
}

double interaction_element(const SingleParticleBasis& sp, int a, int b, int c, int d) {
  const auto cutoff = static_cast<int>(sp.cutoff());
  for (int idx : {a, b, c, d}) {
    if (idx < 0 || idx >= cutoff) {
      throw InvalidArgument("mode index " + std::to_string(idx) + " outside basis of " +
                            std::to_string(cutoff) + " modes");
    }
  }
  const auto q = sorted4(a, b, c, d);
  return quartic_integral(sp, q[0], q[1], q[2], q[3]);
}

HamiltonianMatrix::HamiltonianMatrix(double g, Eigen::VectorXd h0,
                                     std::shared_ptr<const Eigen::MatrixXd> vint,
                                     std::uint64_t basis_id, double e_max)
    : g_(g), h0_(std::move(h0)), vint_(std::move(vint)), basis_id_(basis_id), e_max_(e_max) {}

Eigen::MatrixXd HamiltonianMatrix::dense() const {
  Eigen::MatrixXd h = g_ * (*vint_);
  h.diagonal() += h0_;
  return h;
}

HamiltonianMatrix HamiltonianMatrix::with_coupling(double g) const {
  return HamiltonianMatrix(g, h0_, vint_, basis_id_, e_max_);
}

Eigen::MatrixXd contact_interaction(const FockBasis& fock) {
  if (fock.size() == 0) throw EmptyBasis("contact interaction on an empty basis");
  const auto table = make_table(fock);
  return kernels::contact_matrix_parallel(fock, table);
}

HamiltonianMatrix build_hamiltonian(const FockBasis& fock, double g) {
  auto vint = std::make_shared<const Eigen::MatrixXd>(contact_interaction(fock));
  Eigen::VectorXd h0(static_cast<Eigen::Index>(fock.size()));
  for (std::size_t i = 0; i < fock.size(); ++i) h0(static_cast<Eigen::Index>(i)) = fock.energy(i);
  return HamiltonianMatrix(g, std::move(h0), std::move(vint), fock.id(), fock.e_max());
}

Eigen::MatrixXd sector_block(const Eigen::MatrixXd& op, const SectorProjector& projector) {
  if (static_cast<std::size_t>(op.rows()) != projector.dimension() || op.rows() != op.cols()) {
    throw MismatchError("operator and projector dimensions differ");
  }
  const Eigen::MatrixXd b = projector.sector_basis();
  Eigen::MatrixXd block = b.transpose() * (op * b);
  // Symmetrize away rounding so downstream symmetry checks see an exact
  // symmetric matrix.
  return 0.5 * (block + block.transpose());
}

Eigen::MatrixXd sector_block(const HamiltonianMatrix& h, const SectorProjector& projector) {
  if (h.basis_id() != projector.basis_id()) {
    throw MismatchError("projector " + projector.label() +
                        " was built on a different basis than the Hamiltonian");
  }
  return sector_block(h.dense(), projector);
}

double sector_coupling(const HamiltonianMatrix& h, const SectorProjector& a,
                       const SectorProjector& b) {
  if (h.basis_id() != a.basis_id() || h.basis_id() != b.basis_id()) {
    throw MismatchError("projectors and Hamiltonian use different bases");
  }
  const Eigen::MatrixXd pa = a.dense();
  const Eigen::MatrixXd pb = b.dense();
  return (pa * h.dense() * pb).cwiseAbs().maxCoeff();
}

void write_binary(std::ostream& os, const HamiltonianMatrix& h) {
  static_assert(sizeof(double) == 8);
  const std::uint64_t dim = h.dimension();
  const double g = h.g();
  const double e_max = h.e_max();
  os.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  os.write(reinterpret_cast<const char*>(&g), sizeof g);
  os.write(reinterpret_cast<const char*>(&e_max), sizeof e_max);
  const Eigen::MatrixXd m = h.dense();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = m(i, j);
      os.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
}

void write_binary(const std::filesystem::path& path, const HamiltonianMatrix& h) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_binary(os, h);
  if (!os) throw Error("write failed for " + path.string());
}

BinaryMatrix read_binary(std::istream& is) {
  std::uint64_t dim = 0;
  BinaryMatrix out;
  is.read(reinterpret_cast<char*>(&dim), sizeof dim);
  is.read(reinterpret_cast<char*>(&out.g), sizeof out.g);
  is.read(reinterpret_cast<char*>(&out.e_max), sizeof out.e_max);
  if (!is) throw Error("truncated matrix header");
  const auto n = static_cast<Eigen::Index>(dim);
  out.matrix.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double v = 0.0;
      is.read(reinterpret_cast<char*>(&v), sizeof v);
      out.matrix(i, j) = v;
      out.matrix(j, i) = v;
    }
  }
  if (!is) throw Error("truncated matrix payload");
  return out;
}

void write_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  const auto old = os.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  os.precision(old);
}

namespace kernels {

void fill_two_body_serial(const SingleParticleBasis& sp, TwoBodyTable& table) {
  for (int d = 0; d < table.modes(); ++d) fill_for_top(sp, table, d);
}

void fill_two_body_parallel(const SingleParticleBasis& sp, TwoBodyTable& table) {
  const int modes = table.modes();
  // Work per top index grows like d^3; hand out the heavy ones first.
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < modes; ++k) fill_for_top(sp, table, modes - 1 - k);
}

Eigen::MatrixXd contact_matrix_serial(const FockBasis& fock, const TwoBodyTable& table) {
  const auto dim = static_cast<Eigen::Index>(fock.size());
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto& m = fock.state(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double e = contact_element(m, fock.state(static_cast<std::size_t>(j)), table);
      v(i, j) = e;
      v(j, i) = e;
    }
  }
  return v;
}

Eigen::MatrixXd contact_matrix_parallel(const FockBasis& fock, const TwoBodyTable& table) {
  const auto dim = static_cast<Eigen::Index>(fock.size());
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dim, dim);
  // Row i owns entries (i, j) and (j, i) for j <= i, so writes never overlap.
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto& m = fock.state(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double e = contact_element(m, fock.state(static_cast<std::size_t>(j)), table);
      v(i, j) = e;
      v(j, i) = e;
    }
  }
  return v;
}

}  // namespace kernels

}  // namespace fewbody
