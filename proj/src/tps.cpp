#include "fewbody/tps.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fewbody/errors.hpp"

namespace fewbody {

namespace {

using cd = std::complex<double>;

void require_square(const auto& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument(std::string(what) + " must be square, got " + std::to_string(m.rows()) +
                          "x" + std::to_string(m.cols()));
  }
}

// Orthonormal basis of a subspace of dim x dim matrices, Frobenius inner product.
class SpanBasis {
 public:
  SpanBasis(std::size_t dim, double threshold) : dim_(dim), threshold_(threshold) {}

  // Adds the part of m orthogonal to the span; false when already spanned.
  // The threshold is absolute, so callers feed operands of unit norm.
  bool add(const Eigen::MatrixXcd& m, Eigen::MatrixXcd* added = nullptr) {
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis_) v -= b.dot(v) * b;
    }
    const double r = v.norm();
    if (r <= threshold_) return false;
    v /= r;
    basis_.push_back(v);
    if (added) {
      *added = Eigen::Map<const Eigen::MatrixXcd>(v.data(), static_cast<Eigen::Index>(dim_),
                                                  static_cast<Eigen::Index>(dim_));
    }
    return true;
  }

  std::size_t size() const { return basis_.size(); }

 private:
  std::size_t dim_;
  double threshold_;
  std::vector<Eigen::VectorXcd> basis_;
};

}  // namespace

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Eigen::MatrixXcd kron_sum(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  require_square(a, "first Kronecker-sum factor");
  require_square(b, "second Kronecker-sum factor");
  const auto ia = Eigen::MatrixXcd::Identity(a.rows(), a.rows());
  const auto ib = Eigen::MatrixXcd::Identity(b.rows(), b.rows());
  return kron(a, ib) + kron(ia, b);
}

Eigen::MatrixXd kron_sum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return kron_sum(Eigen::MatrixXcd(a.cast<cd>()), Eigen::MatrixXcd(b.cast<cd>())).real();
}

Eigen::MatrixXcd kron_sum(std::span<const Eigen::MatrixXcd> factors) {
  if (factors.empty()) throw InvalidArgument("Kronecker sum of no factors");
  require_square(factors[0], "Kronecker-sum factor");
  Eigen::MatrixXcd out = factors[0];
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron_sum(out, factors[k]);
  return out;
}

bool is_hermitian(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& h, double t) {
  require_square(h, "Hamiltonian");
  if (!is_hermitian(h)) throw InvalidArgument("expm_hermitian needs a Hermitian matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  Eigen::VectorXcd phases(solver.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::polar(1.0, -solver.eigenvalues()(k) * t);
  }
  const auto& v = solver.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

Eigen::MatrixXcd factorized_evolution(std::span<const Eigen::MatrixXcd> hamiltonians, double t) {
  if (hamiltonians.empty()) throw InvalidArgument("factorized evolution of no factors");
  for (std::size_t k = 0; k < hamiltonians.size(); ++k) {
    if (!is_hermitian(hamiltonians[k])) {
      throw InvalidArgument("factor " + std::to_string(k) + " is not Hermitian");
    }
  }
  Eigen::MatrixXcd u = expm_hermitian(hamiltonians[0], t);
  for (std::size_t k = 1; k < hamiltonians.size(); ++k) u = kron(u, expm_hermitian(hamiltonians[k], t));
  return u;
}

OperatorSet OperatorSet::make(std::string label, std::vector<Eigen::MatrixXcd> generators) {
  OperatorSet s;
  s.label = std::move(label);
  s.dim = generators.empty() ? 0 : static_cast<std::size_t>(generators.front().rows());
  for (const auto& g : generators) s.hermitian.push_back(is_hermitian(g));
  s.generators = std::move(generators);
  return s;
}

std::size_t generated_algebra_dimension(std::span<const Eigen::MatrixXcd> generators,
                                        std::size_t dim, double rank_threshold) {
  const auto n = static_cast<Eigen::Index>(dim);
  const std::size_t full = dim * dim;
  std::vector<Eigen::MatrixXcd> gens;
  for (const auto& g : generators) {
    if (g.rows() != n || g.cols() != n) {
      throw InvalidArgument("generator is not " + std::to_string(dim) + "x" + std::to_string(dim));
    }
    const double norm = g.norm();
    if (norm == 0.0) continue;
    gens.push_back(g / norm);
    if (!is_hermitian(g)) gens.push_back(g.adjoint() / norm);
  }
  SpanBasis span(dim, rank_threshold);
  std::deque<Eigen::MatrixXcd> fresh;
  Eigen::MatrixXcd added;
  if (span.add(Eigen::MatrixXcd::Identity(n, n) / std::sqrt(static_cast<double>(dim)), &added)) {
    fresh.push_back(added);
  }
  for (const auto& g : gens) {
    if (span.add(g, &added)) fresh.push_back(added);
  }
  // Every element of the algebra is a span of words in the generators, so
  // multiplying each new basis element by each generator reaches the fixpoint.
  while (!fresh.empty() && span.size() < full) {
    const Eigen::MatrixXcd x = std::move(fresh.front());
    fresh.pop_front();
    for (const auto& g : gens) {
      if (span.add(x * g, &added)) fresh.push_back(added);
      if (span.add(g * x, &added)) fresh.push_back(added);
      if (span.size() == full) break;
    }
  }
  return span.size();
}

TpsReport zanardi_check(std::span<const OperatorSet> sets, std::size_t dim,
                        const ZanardiOptions& options) {
  if (dim > kMaxTpsDimension) {
    throw UnsupportedSize("TPS check supports dimension up to " +
                          std::to_string(kMaxTpsDimension) + ", got " + std::to_string(dim));
  }
  if (dim == 0) throw InvalidArgument("TPS check needs a positive dimension");
  if (sets.size() < 2) throw InvalidArgument("TPS check needs at least two operator sets");
  const auto n = static_cast<Eigen::Index>(dim);
  for (const auto& s : sets) {
    if (s.generators.empty()) throw InvalidArgument("operator set '" + s.label + "' is empty");
    for (const auto& g : s.generators) {
      if (g.rows() != n || g.cols() != n) {
        throw InvalidArgument("operator set '" + s.label + "' has a generator that is not " +
                              std::to_string(dim) + "x" + std::to_string(dim));
      }
    }
  }

  TpsReport report;
  report.full_dimension = dim * dim;
  double worst = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      for (const auto& a : sets[i].generators) {
        for (const auto& b : sets[j].generators) {
          worst = std::max(worst, (a * b - b * a).cwiseAbs().maxCoeff());
          // The *-algebra also contains adjoints.
          worst = std::max(worst, (a.adjoint() * b - b * a.adjoint()).cwiseAbs().maxCoeff());
        }
      }
    }
  }
  report.worst_commutator = worst;
  report.independent = worst <= options.commutator_tol;

  std::vector<Eigen::MatrixXcd> all;
  for (const auto& s : sets) {
    report.subalgebra_dimensions.push_back(
        generated_algebra_dimension(s.generators, dim, options.rank_threshold));
    all.insert(all.end(), s.generators.begin(), s.generators.end());
  }
  report.algebra_dimension = generated_algebra_dimension(all, dim, options.rank_threshold);
  report.complete = report.algebra_dimension == report.full_dimension;

  if (report.independent && report.complete) {
    std::vector<std::size_t> dims;
    std::size_t product = 1;
    for (std::size_t d : report.subalgebra_dimensions) {
      const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d))));
      if (r * r != d) {
        dims.clear();
        break;
      }
      dims.push_back(r);
      product *= r;
    }
    if (!dims.empty() && product == dim) report.factor_dims = std::move(dims);
  }
  return report;
}

OperatorSetFile parse_operator_sets(const std::string& json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("operator-set JSON: ") + e.what());
  }
  try {
    OperatorSetFile out;
    out.dim = doc.at("dim").get<std::size_t>();
    const auto n = static_cast<Eigen::Index>(out.dim);
    for (const auto& js : doc.at("sets")) {
      std::vector<Eigen::MatrixXcd> gens;
      for (const auto& jm : js.at("generators")) {
        if (!jm.is_array() || static_cast<Eigen::Index>(jm.size()) != n) {
          throw ValidationError("generator must have " + std::to_string(out.dim) + " rows");
        }
        Eigen::MatrixXcd m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
          const auto& row = jm[static_cast<std::size_t>(i)];
          if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            throw ValidationError("generator row must have " + std::to_string(out.dim) + " entries");
          }
          for (Eigen::Index j = 0; j < n; ++j) {
            const auto& z = row[static_cast<std::size_t>(j)];
            if (!z.is_array() || z.size() != 2) {
              throw ValidationError("matrix entries must be [re, im] pairs");
            }
            m(i, j) = cd(z[0].get<double>(), z[1].get<double>());
          }
        }
        gens.push_back(std::move(m));
      }
      out.sets.push_back(OperatorSet::make(js.value("label", std::string("set")), std::move(gens)));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("operator-set JSON: ") + e.what());
  }
}

OperatorSetFile load_operator_sets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_operator_sets(text.str());
}

}  // namespace fewbody
