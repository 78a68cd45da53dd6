#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fewbody/single_particle.hpp"
#include "fewbody/symmetry.hpp"

namespace fewbody::cli {

enum class Analysis { spectrum, sweep, stats, entangle, comrel, tps_demo };

std::string to_string(Analysis a);
/// Throws ValidationError listing the accepted names.
Analysis analysis_from_string(std::string_view name);

struct TrapConfig {
  TrapKind kind = TrapKind::harmonic;
  double omega = 1.0;
  double length = 1.0;
  std::filesystem::path file;  // custom traps; resolved against the config directory
  double mass = 1.0;
};

/// Numerical tolerances. Profiles "standard" and "strict" set every field;
/// explicit keys override the profile.
struct Tolerances {
  std::string profile = "standard";
  double degeneracy = 1e-6;  // relative to the spectral span
  double commutator = 1e-10;
  double rank = 1e-9;
  double grid = 1e-6;
  double ladder = 1e-4;
};

struct StatsConfig {
  std::string source = "hamiltonian";  // hamiltonian | goe | poisson
  std::size_t goe_dim = 500;
  std::size_t poisson_count = 10000;
  int unfolding_degree = 7;
  double edge_fraction = 0.05;
  double bin_width = 0.1;
  double s_max = 4.0;
};

struct EntangleConfig {
  std::string state = "random";  // random | ground
  std::vector<double> times{0.0, 0.5, 1.0, 2.0, 4.0};
};

struct ComrelConfig {
  std::vector<double> times{0.0, 0.5, 1.0, 2.0, 4.0};
};

struct TpsConfig {
  std::filesystem::path file;  // empty: built-in two-qubit demonstration
};

struct JobConfig {
  TrapConfig trap;
  int particles = 0;
  double e_max = 0.0;
  std::optional<std::size_t> cutoff;  // default: smallest cutoff covering E_max
  bool all_sectors = true;
  std::vector<Partition> sectors;     // used when all_sectors is false
  std::optional<Parity> parity;
  std::vector<double> g{0.0};         // strictly ascending
  std::vector<Analysis> analyses;
  Tolerances tolerances;
  std::filesystem::path output = "fewbody_out";
  std::optional<std::uint64_t> seed;
  StatsConfig stats;
  EntangleConfig entangle;
  ComrelConfig comrel;
  TpsConfig tps;

  /// Sectors to process: the explicit list, or every partition of N.
  std::vector<Partition> resolved_sectors() const;
};

/// Parses a JSON job document. Relative file paths are resolved against
/// `base_dir`. Unknown keys are rejected at every level. Throws
/// ValidationError.
JobConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
JobConfig load_config(const std::filesystem::path& path);

/// Checks that the listed analyses can run on this job (seed present for
/// stochastic work, single sector for Hamiltonian statistics, ...).
/// Throws ValidationError.
void validate_analyses(const JobConfig& job, const std::vector<Analysis>& analyses);

struct OutputFile {
  std::string name;  // relative to the output directory
  std::string content;
};

struct ManifestEntry {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

struct Manifest {
  static constexpr int kSchemaVersion = 1;
  std::vector<ManifestEntry> files;
};

/// Computes every artifact of the listed analyses in memory. Deterministic in
/// (job, seed) and independent of thread scheduling.
std::vector<OutputFile> compute_outputs(const JobConfig& job, const std::vector<Analysis>& analyses);

/// Runs the job's analyses (or `only`, when given), writes the artifacts and
/// manifest.json into job.output. Throws Error naming the path on I/O
/// failure.
Manifest run_job(const JobConfig& job, const std::optional<std::vector<Analysis>>& only = {});

std::string manifest_json(const JobConfig& job, const Manifest& manifest);

std::string sha256_hex(std::string_view data);

/// 17 significant digits, "%.17g".
std::string format_double(double x);

}  // namespace fewbody::cli
