#include "fewbody/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "fewbody/errors.hpp"

namespace fewbody {

namespace {

void check_supported(int n) {
  if (n < 1 || n > kMaxSymmetricDegree) {
    throw UnsupportedSize("symmetric group degree " + std::to_string(n) +
                          " outside supported range 1.." + std::to_string(kMaxSymmetricDegree));
  }
}

void generate_partitions(int remaining, int max_part, std::vector<int>& current,
                         std::vector<Partition>& out) {
  if (remaining == 0) {
    out.emplace_back(current);
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    current.push_back(part);
    generate_partitions(remaining - part, part, current, out);
    current.pop_back();
  }
}

// Murnaghan-Nakayama on beta-sets: removing a rim hook of length r moves one
// bead from position b to b - r; the sign counts beads jumped over.
long long mn_beta(std::vector<int>& beta, std::span<const int> cycles) {
  if (cycles.empty()) return 1;
  const int r = cycles.front();
  long long total = 0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const int b = beta[i];
    const int target = b - r;
    if (target < 0) continue;
    if (std::find(beta.begin(), beta.end(), target) != beta.end()) continue;
    int between = 0;
    for (int other : beta) {
      if (other > target && other < b) ++between;
    }
    beta[i] = target;
    const long long sub = mn_beta(beta, cycles.subspan(1));
    beta[i] = b;
    total += (between % 2 == 0 ? 1 : -1) * sub;
  }
  return total;
}

}  // namespace

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw InvalidArgument("partition must have at least one part");
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] <= 0) throw InvalidArgument("partition parts must be positive");
    if (i > 0 && parts_[i] > parts_[i - 1]) {
      throw InvalidArgument("partition parts must be non-increasing");
    }
    degree_ += parts_[i];
  }
}

Partition Partition::symmetric(int n) { return Partition({n}); }

Partition Partition::antisymmetric(int n) {
  return Partition(std::vector<int>(static_cast<std::size_t>(n), 1));
}

std::string Partition::label() const {
  std::string s = "[";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(parts_[i]);
  }
  return s + "]";
}

std::string Partition::slug() const {
  std::string s;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i > 0) s += "-";
    s += std::to_string(parts_[i]);
  }
  return s;
}

Partition Partition::conjugate() const {
  std::vector<int> out(static_cast<std::size_t>(parts_.front()), 0);
  for (int p : parts_) {
    for (int j = 0; j < p; ++j) ++out[static_cast<std::size_t>(j)];
  }
  return Partition(std::move(out));
}

std::ostream& operator<<(std::ostream& os, const Partition& p) { return os << p.label(); }

std::vector<Partition> partitions(int n) {
  check_supported(n);
  std::vector<Partition> out;
  std::vector<int> current;
  generate_partitions(n, n, current, out);
  return out;
}

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (int v : image_) {
    if (v < 0 || v >= static_cast<int>(image_.size()) || seen[static_cast<std::size_t>(v)]) {
      throw InvalidArgument("not a permutation");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> img(static_cast<std::size_t>(n));
  std::iota(img.begin(), img.end(), 0);
  return Permutation(std::move(img));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(image_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) {
    inv[static_cast<std::size_t>(image_[i])] = static_cast<int>(i);
  }
  return Permutation(std::move(inv));
}

Partition Permutation::cycle_type() const {
  std::vector<bool> seen(image_.size(), false);
  std::vector<int> lengths;
  for (std::size_t i = 0; i < image_.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(image_[j])) {
      seen[j] = true;
      ++len;
    }
    lengths.push_back(len);
  }
  std::sort(lengths.rbegin(), lengths.rend());
  return Partition(std::move(lengths));
}

int Permutation::sign() const {
  const auto type = cycle_type();
  int transpositions = 0;
  for (int len : type.parts()) transpositions += len - 1;
  return transpositions % 2 == 0 ? 1 : -1;
}

Permutation operator*(const Permutation& g, const Permutation& h) {
  if (g.degree() != h.degree()) throw MismatchError("composing permutations of different degree");
  std::vector<int> img(h.image_.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    img[i] = g.image_[static_cast<std::size_t>(h.image_[i])];
  }
  return Permutation(std::move(img));
}

std::vector<Permutation> all_permutations(int n) {
  check_supported(n);
  std::vector<int> img(static_cast<std::size_t>(n));
  std::iota(img.begin(), img.end(), 0);
  std::vector<Permutation> out;
  do {
    out.emplace_back(img);
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

long long factorial(int n) {
  long long f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

long long murnaghan_nakayama(const Partition& shape, const Partition& cycle_type) {
  if (shape.degree() != cycle_type.degree()) {
    throw MismatchError("shape and cycle type have different degrees");
  }
  const auto len = static_cast<int>(shape.length());
  std::vector<int> beta(shape.length());
  for (int i = 0; i < len; ++i) beta[static_cast<std::size_t>(i)] = shape.parts()[i] + (len - 1 - i);
  return mn_beta(beta, cycle_type.parts());
}

CharacterTable::CharacterTable(int n) : degree_(n), labels_(partitions(n)) {
  const std::size_t k = labels_.size();
  class_sizes_.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    // |class| = N! / z, z = prod_i i^{m_i} m_i!
    std::map<int, int> mult;
    for (int p : labels_[c].parts()) ++mult[p];
    long long z = 1;
    for (auto [len, m] : mult) {
      for (int j = 0; j < m; ++j) z *= len;
      z *= factorial(m);
    }
    class_sizes_[c] = factorial(n) / z;
  }
  values_.resize(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t c = 0; c < k; ++c) values_[i * k + c] = murnaghan_nakayama(labels_[i], labels_[c]);
  }
}

long long CharacterTable::value(std::size_t irrep, std::size_t cls) const {
  return values_.at(irrep * labels_.size() + cls);
}

std::size_t CharacterTable::index_of(const Partition& p) const {
  const auto it = std::find(labels_.begin(), labels_.end(), p);
  if (it == labels_.end()) throw MismatchError("partition " + p.label() + " not in table");
  return static_cast<std::size_t>(it - labels_.begin());
}

long long CharacterTable::value(const Partition& irrep, const Partition& cycle_type) const {
  return value(index_of(irrep), index_of(cycle_type));
}

long long CharacterTable::dimension(const Partition& irrep) const {
  return value(irrep, Partition(std::vector<int>(static_cast<std::size_t>(degree_), 1)));
}

void CharacterTable::write_csv(std::ostream& os) const {
  os << "irrep";
  for (const auto& c : labels_) os << ",\"" << c.label() << "\"";
  os << "\n";
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    os << '"' << labels_[i].label() << '"';
    for (std::size_t c = 0; c < labels_.size(); ++c) os << "," << value(i, c);
    os << "\n";
  }
}

CharacterTable character_table(int n) { return CharacterTable(n); }

std::vector<std::size_t> permutation_action(const Permutation& g, const FockBasis& fock) {
  if (g.degree() != fock.particles()) {
    throw MismatchError("permutation degree differs from particle count");
  }
  const Permutation inv = g.inverse();
  std::vector<std::size_t> out(fock.size());
  MultiIndex m(static_cast<std::size_t>(fock.particles()));
  for (std::size_t j = 0; j < fock.size(); ++j) {
    const auto& n = fock.state(j);
    for (int i = 0; i < fock.particles(); ++i) {
      m[static_cast<std::size_t>(i)] = n[static_cast<std::size_t>(inv(i))];
    }
    out[j] = *fock.find(m);  // bases are permutation-closed
  }
  return out;
}

Eigen::MatrixXd permutation_operator(const Permutation& g, const FockBasis& fock) {
  const auto action = permutation_action(g, fock);
  const auto dim = static_cast<Eigen::Index>(fock.size());
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t j = 0; j < action.size(); ++j) {
    u(static_cast<Eigen::Index>(action[j]), static_cast<Eigen::Index>(j)) = 1.0;
  }
  return u;
}

std::string to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

Parity multi_index_parity(const MultiIndex& n) {
  const int total = std::accumulate(n.begin(), n.end(), 0);
  return total % 2 == 0 ? Parity::even : Parity::odd;
}

SectorProjector::SectorProjector(Partition partition, std::optional<Parity> parity,
                                 const FockBasis& fock, std::vector<OrbitBlock> blocks)
    : partition_(std::move(partition)),
      parity_(parity),
      blocks_(std::move(blocks)),
      dimension_(fock.size()),
      basis_id_(fock.id()) {
  for (const auto& b : blocks_) rank_ += static_cast<std::size_t>(b.range.cols());
}

double SectorProjector::trace() const {
  double t = 0.0;
  for (const auto& b : blocks_) t += b.projector.trace();
  return t;
}

Eigen::MatrixXd SectorProjector::dense() const {
  const auto dim = static_cast<Eigen::Index>(dimension_);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& b : blocks_) {
    for (std::size_t i = 0; i < b.states.size(); ++i) {
      for (std::size_t j = 0; j < b.states.size(); ++j) {
        p(static_cast<Eigen::Index>(b.states[i]), static_cast<Eigen::Index>(b.states[j])) =
            b.projector(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return p;
}

Eigen::MatrixXd SectorProjector::sector_basis() const {
  Eigen::MatrixXd basis =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dimension_), static_cast<Eigen::Index>(rank_));
  Eigen::Index col = 0;
  for (const auto& b : blocks_) {
    for (Eigen::Index c = 0; c < b.range.cols(); ++c, ++col) {
      for (std::size_t i = 0; i < b.states.size(); ++i) {
        basis(static_cast<Eigen::Index>(b.states[i]), col) = b.range(static_cast<Eigen::Index>(i), c);
      }
    }
  }
  return basis;
}

std::string SectorProjector::label() const {
  std::string s = partition_.label();
  if (parity_) s += (*parity_ == Parity::even ? "+" : "-");
  return s;
}

SectorProjector sector_projector(const Partition& partition, const FockBasis& fock,
                                 std::optional<Parity> parity) {
  const int n = fock.particles();
  if (partition.degree() != n) {
    throw MismatchError("partition " + partition.label() + " has degree " +
                        std::to_string(partition.degree()) + " but the basis has " +
                        std::to_string(n) + " particles");
  }
  if (parity && !fock.single_particle().trap().reflection_symmetric()) {
    throw UnsupportedTrap("parity sectors need a reflection-symmetric trap");
  }
  const CharacterTable table(n);
  const auto perms = all_permutations(n);
  const double prefactor =
      static_cast<double>(table.dimension(partition)) / static_cast<double>(factorial(n));
  std::vector<double> coeff(perms.size());
  std::vector<Permutation> inverses;
  inverses.reserve(perms.size());
  for (std::size_t k = 0; k < perms.size(); ++k) {
    coeff[k] = prefactor * static_cast<double>(table.value(partition, perms[k].cycle_type()));
    inverses.push_back(perms[k].inverse());
  }

  const auto& orbits = fock.orbits();
  std::vector<SectorProjector::OrbitBlock> blocks(orbits.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t o = 0; o < static_cast<std::ptrdiff_t>(orbits.size()); ++o) {
    const auto& members = orbits[static_cast<std::size_t>(o)];
    auto& block = blocks[static_cast<std::size_t>(o)];
    block.states = members;
    const auto d = static_cast<Eigen::Index>(members.size());
    block.projector = Eigen::MatrixXd::Zero(d, d);
    if (parity && multi_index_parity(fock.state(members.front())) != *parity) {
      block.range.resize(d, 0);
      continue;
    }
    std::map<std::size_t, Eigen::Index> local;
    for (Eigen::Index i = 0; i < d; ++i) local[members[static_cast<std::size_t>(i)]] = i;
    MultiIndex image(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < perms.size(); ++k) {
      if (coeff[k] == 0.0) continue;
      for (Eigen::Index j = 0; j < d; ++j) {
        const auto& src = fock.state(members[static_cast<std::size_t>(j)]);
        for (int i = 0; i < n; ++i) {
          image[static_cast<std::size_t>(i)] = src[static_cast<std::size_t>(inverses[k](i))];
        }
        block.projector(local.at(*fock.find(image)), j) += coeff[k];
      }
    }
    block.range = detail::pivoted_orthonormal_columns(block.projector);
  }
  return SectorProjector(partition, parity, fock, std::move(blocks));
}

std::size_t orbit_rank(const Partition& partition, const MultiIndex& n) {
  const int degree = static_cast<int>(n.size());
  if (partition.degree() != degree) throw MismatchError("partition degree differs from multi-index");
  const CharacterTable table(degree);
  // Multiplicity of the irrep in the permutation module is <chi_M, chi>,
  // where chi_M(g) counts multi-indices in the orbit fixed by g.
  MultiIndex sorted = n;
  std::sort(sorted.begin(), sorted.end());
  std::vector<MultiIndex> orbit;
  do {
    orbit.push_back(sorted);
  } while (std::next_permutation(sorted.begin(), sorted.end()));
  long long inner = 0;
  for (const auto& g : all_permutations(degree)) {
    long long fixed = 0;
    for (const auto& m : orbit) {
      bool same = true;
      for (int i = 0; i < degree && same; ++i) {
        same = m[static_cast<std::size_t>(g(i))] == m[static_cast<std::size_t>(i)];
      }
      if (same) ++fixed;
    }
    inner += fixed * table.value(partition, g.cycle_type());
  }
  const long long multiplicity = inner / factorial(degree);
  return static_cast<std::size_t>(multiplicity * table.dimension(partition));
}

namespace detail {

Eigen::MatrixXd pivoted_orthonormal_columns(const Eigen::MatrixXd& m, double threshold) {
  Eigen::MatrixXd residual = m;
  std::vector<Eigen::VectorXd> kept;
  const Eigen::Index cols = m.cols();
  for (Eigen::Index step = 0; step < cols; ++step) {
    Eigen::Index best = 0;
    const double norm = std::sqrt(residual.colwise().squaredNorm().maxCoeff(&best));
    if (norm <= threshold) break;
    Eigen::VectorXd q = residual.col(best) / norm;
    // Second pass restores orthogonality lost to cancellation.
    for (const auto& prev : kept) q -= prev.dot(q) * prev;
    q.normalize();
    residual -= q * (q.transpose() * residual);
    kept.push_back(std::move(q));
  }
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = kept[i];
  return out;
}

}  // namespace detail

}  // namespace fewbody
