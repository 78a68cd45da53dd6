#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fewbody {

/// A (x) I + I (x) B. Throws InvalidArgument for non-square input.
Eigen::MatrixXcd kron_sum(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
Eigen::MatrixXd kron_sum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
/// Left-associated Kronecker sum of k factors.
Eigen::MatrixXcd kron_sum(std::span<const Eigen::MatrixXcd> factors);

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

bool is_hermitian(const Eigen::MatrixXcd& m, double tol = 1e-12);

/// exp(-i H t) for Hermitian H through its eigendecomposition.
Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& h, double t);

/// exp(-i H_1 t) (x) exp(-i H_2 t) (x) ... Throws InvalidArgument when a
/// factor is not Hermitian or the list is empty.
Eigen::MatrixXcd factorized_evolution(std::span<const Eigen::MatrixXcd> hamiltonians, double t);

struct OperatorSet {
  std::string label;
  std::size_t dim = 0;
  std::vector<Eigen::MatrixXcd> generators;
  std::vector<bool> hermitian;  // per generator

  static OperatorSet make(std::string label, std::vector<Eigen::MatrixXcd> generators);
};

struct ZanardiOptions {
  double commutator_tol = 1e-10;
  double rank_threshold = 1e-9;
};

inline constexpr std::size_t kMaxTpsDimension = 64;

struct TpsReport {
  bool independent = false;
  double worst_commutator = 0.0;
  bool complete = false;
  std::size_t algebra_dimension = 0;  // generated by all sets together
  std::size_t full_dimension = 0;     // dim^2
  std::vector<std::size_t> subalgebra_dimensions;
  std::vector<std::size_t> factor_dims;  // empty unless both criteria pass
  std::string accessibility = "caller-asserted";
};

/// Subsystem independence and completeness of a candidate tensor-product
/// structure. Accessibility is never computed; the report carries it as a
/// caller assertion. Throws UnsupportedSize above kMaxTpsDimension and
/// InvalidArgument for fewer than two sets or mis-sized generators.
TpsReport zanardi_check(std::span<const OperatorSet> sets, std::size_t dim,
                        const ZanardiOptions& options = {});

/// Dimension of the unital matrix algebra generated by the given matrices
/// (and their adjoints).
std::size_t generated_algebra_dimension(std::span<const Eigen::MatrixXcd> generators,
                                        std::size_t dim, double rank_threshold = 1e-9);

struct OperatorSetFile {
  std::size_t dim = 0;
  std::vector<OperatorSet> sets;
};

/// {"dim": d, "sets": [{"label": "...", "generators": [matrix, ...]}, ...]}
/// with each matrix a nested row array of [re, im] pairs.
OperatorSetFile parse_operator_sets(const std::string& json_text);
OperatorSetFile load_operator_sets(const std::filesystem::path& path);

}  // namespace fewbody
