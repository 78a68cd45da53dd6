#include "fewbody/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "fewbody/analysis.hpp"
#include "fewbody/errors.hpp"
#include "fewbody/fock_basis.hpp"
#include "fewbody/hamiltonian.hpp"
#include "fewbody/spectrum.hpp"
#include "fewbody/tps.hpp"

namespace fewbody::cli {

namespace {

using json = nlohmann::json;
using cd = std::complex<double>;

constexpr std::size_t kMaxDefaultCutoff = 4096;

// ---------------------------------------------------------------------------
// config parsing helpers

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      std::string list;
      for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      throw ValidationError("unknown key '" + key + "' in " + where + "; expected one of: " + list);
    }
  }
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ValidationError(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(what + " must be finite");
  return x;
}

double positive(const json& v, const std::string& what) {
  const double x = number(v, what);
  if (!(x > 0.0)) throw ValidationError(what + " must be positive");
  return x;
}

std::size_t count(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ValidationError(what + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string text(const json& v, const std::string& what) {
  if (!v.is_string()) throw ValidationError(what + " must be a string");
  return v.get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& what) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(number(v, what));
    return out;
  }
  if (!v.is_array()) throw ValidationError(what + " must be a number or a list of numbers");
  for (const auto& x : v) out.push_back(number(x, what));
  return out;
}

void require_ascending(const std::vector<double>& xs, const std::string& what) {
  if (xs.empty()) throw ValidationError(what + " is empty");
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (!(xs[k] > xs[k - 1])) throw ValidationError(what + " must be strictly ascending");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

TrapConfig parse_trap(const json& j, const std::filesystem::path& base) {
  reject_unknown(j, {"kind", "omega", "length", "file", "mass"}, "trap");
  TrapConfig t;
  const std::string kind = text(j.at("kind"), "trap.kind");
  if (kind == "harmonic") {
    t.kind = TrapKind::harmonic;
  } else if (kind == "infinite_well") {
    t.kind = TrapKind::infinite_well;
  } else if (kind == "custom") {
    t.kind = TrapKind::custom;
  } else {
    throw ValidationError("unknown trap kind '" + kind +
                          "'; expected one of: harmonic, infinite_well, custom");
  }
  if (j.contains("omega")) t.omega = positive(j["omega"], "trap.omega");
  if (j.contains("length")) t.length = positive(j["length"], "trap.length");
  if (j.contains("mass")) t.mass = positive(j["mass"], "trap.mass");
  if (j.contains("file")) t.file = resolve(base, text(j["file"], "trap.file"));
  if (t.kind == TrapKind::custom && t.file.empty()) {
    throw ValidationError("custom trap needs a potential file (trap.file)");
  }
  return t;
}

Partition parse_partition(const json& j, int n) {
  if (!j.is_array() || j.empty()) throw ValidationError("a sector must be a non-empty list of parts");
  std::vector<int> parts;
  int sum = 0;
  for (const auto& p : j) {
    if (!p.is_number_integer()) throw ValidationError("partition parts must be integers");
    parts.push_back(p.get<int>());
    sum += parts.back();
  }
  Partition out;
  try {
    out = Partition(parts);
  } catch (const InvalidArgument& e) {
    throw ValidationError(std::string("invalid partition: ") + e.what());
  }
  if (sum != n) {
    throw ValidationError("partition sums to " + std::to_string(sum) + ", expected " +
                          std::to_string(n));
  }
  return out;
}

std::vector<double> parse_grid(const json& j) {
  reject_unknown(j, {"start", "stop", "points", "spacing"}, "g_grid");
  const double start = number(j.at("start"), "g_grid.start");
  const double stop = number(j.at("stop"), "g_grid.stop");
  const std::size_t points = count(j.at("points"), "g_grid.points");
  const std::string spacing = j.contains("spacing") ? text(j["spacing"], "g_grid.spacing") : "linear";
  if (points < 2) throw ValidationError("g_grid.points must be at least 2");
  if (!(stop > start)) throw ValidationError("g_grid.stop must exceed g_grid.start");
  std::vector<double> out(points);
  if (spacing == "linear") {
    for (std::size_t k = 0; k < points; ++k) {
      out[k] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(points - 1);
    }
  } else if (spacing == "log") {
    if (!(start > 0.0)) throw ValidationError("logarithmic g_grid needs start > 0");
    const double a = std::log(start), b = std::log(stop);
    for (std::size_t k = 0; k < points; ++k) {
      out[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1));
    }
    out.front() = start;
    out.back() = stop;
  } else {
    throw ValidationError("unknown g_grid.spacing '" + spacing + "'; expected one of: linear, log");
  }
  return out;
}

Tolerances parse_tolerances(const json& j) {
  reject_unknown(j, {"profile", "degeneracy", "commutator", "rank", "grid", "ladder"}, "tolerances");
  Tolerances t;
  if (j.contains("profile")) {
    t.profile = text(j["profile"], "tolerances.profile");
    if (t.profile == "strict") {
      t.degeneracy = 1e-9;
      t.commutator = 1e-12;
      t.rank = 1e-10;
      t.grid = 1e-8;
      t.ladder = 1e-6;
    } else if (t.profile != "standard") {
      throw ValidationError("unknown tolerance profile '" + t.profile +
                            "'; expected one of: standard, strict");
    }
  }
  if (j.contains("degeneracy")) t.degeneracy = positive(j["degeneracy"], "tolerances.degeneracy");
  if (j.contains("commutator")) t.commutator = positive(j["commutator"], "tolerances.commutator");
  if (j.contains("rank")) t.rank = positive(j["rank"], "tolerances.rank");
  if (j.contains("grid")) t.grid = positive(j["grid"], "tolerances.grid");
  if (j.contains("ladder")) t.ladder = positive(j["ladder"], "tolerances.ladder");
  return t;
}

StatsConfig parse_stats(const json& j) {
  reject_unknown(j, {"source", "goe_dim", "poisson_count", "unfolding_degree", "edge_fraction",
                     "bin_width", "s_max"},
                 "stats");
  StatsConfig s;
  if (j.contains("source")) {
    s.source = text(j["source"], "stats.source");
    if (s.source != "hamiltonian" && s.source != "goe" && s.source != "poisson") {
      throw ValidationError("unknown stats.source '" + s.source +
                            "'; expected one of: hamiltonian, goe, poisson");
    }
  }
  if (j.contains("goe_dim")) s.goe_dim = count(j["goe_dim"], "stats.goe_dim");
  if (j.contains("poisson_count")) s.poisson_count = count(j["poisson_count"], "stats.poisson_count");
  if (j.contains("unfolding_degree")) {
    s.unfolding_degree = static_cast<int>(count(j["unfolding_degree"], "stats.unfolding_degree"));
  }
  if (j.contains("edge_fraction")) {
    s.edge_fraction = number(j["edge_fraction"], "stats.edge_fraction");
    if (s.edge_fraction < 0.0 || s.edge_fraction >= 0.5) {
      throw ValidationError("stats.edge_fraction must lie in [0, 0.5)");
    }
  }
  if (j.contains("bin_width")) s.bin_width = positive(j["bin_width"], "stats.bin_width");
  if (j.contains("s_max")) s.s_max = positive(j["s_max"], "stats.s_max");
  if (s.goe_dim < 2) throw ValidationError("stats.goe_dim must be at least 2");
  if (s.poisson_count < 2) throw ValidationError("stats.poisson_count must be at least 2");
  if (s.unfolding_degree < 1) throw ValidationError("stats.unfolding_degree must be at least 1");
  return s;
}

std::vector<double> parse_times(const json& j, const std::string& what) {
  auto t = number_list(j, what);
  if (t.empty()) throw ValidationError(what + " is empty");
  return t;
}

// ---------------------------------------------------------------------------
// output helpers

std::string csv_quote(const std::string& s) { return '"' + s + '"'; }

std::string sector_slug(const Partition& p, std::optional<Parity> parity) {
  std::string s = p.slug();
  if (parity) s += "_" + to_string(*parity);
  return s;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json parity_json(std::optional<Parity> p) { return p ? json(to_string(*p)) : json(nullptr); }

// Lazily built physics shared between analyses of one job.
class Workspace {
 public:
  explicit Workspace(const JobConfig& job) : job_(job) {}

  const TrapPotential& trap() {
    if (!trap_) {
      const auto& t = job_.trap;
      switch (t.kind) {
        case TrapKind::harmonic:
          trap_ = std::make_unique<TrapPotential>(TrapPotential::harmonic(t.omega, t.mass));
          break;
        case TrapKind::infinite_well:
          trap_ = std::make_unique<TrapPotential>(TrapPotential::infinite_well(t.length, t.mass));
          break;
        case TrapKind::custom:
          trap_ = std::make_unique<TrapPotential>(load_potential_file(t.file, t.mass));
          break;
      }
    }
    return *trap_;
  }

  std::shared_ptr<const SingleParticleBasis> single_particle() {
    if (!sp_) {
      if (job_.cutoff) {
        sp_ = std::make_shared<const SingleParticleBasis>(solve_trap(trap(), *job_.cutoff));
      } else {
        std::size_t c = std::max<std::size_t>(static_cast<std::size_t>(job_.particles), 4);
        for (;;) {
          auto sp = std::make_shared<const SingleParticleBasis>(solve_trap(trap(), c));
          const auto e = sp->energies();
          const double reach = (job_.particles - 1) * e.front() + e.back();
          if (reach >= job_.e_max) {
            // Shrink to the smallest cutoff that still reaches E_max.
            std::size_t need = c;
            while (need > 1 && (job_.particles - 1) * e.front() + e[need - 2] >= job_.e_max) --need;
            need = std::max(need, static_cast<std::size_t>(job_.particles));
            sp_ = need == c ? sp : std::make_shared<const SingleParticleBasis>(solve_trap(trap(), need));
            break;
          }
          if (c >= kMaxDefaultCutoff) {
            throw InsufficientBasis("no cutoff up to " + std::to_string(kMaxDefaultCutoff) +
                                    " reaches E_max = " + format_double(job_.e_max));
          }
          c *= 2;
        }
      }
    }
    return sp_;
  }

  const FockBasis& fock() {
    if (!fock_) fock_ = std::make_unique<FockBasis>(build_basis(single_particle(), job_.particles, job_.e_max));
    return *fock_;
  }

  const HamiltonianMatrix& h0() {
    if (!h0_) h0_ = std::make_unique<HamiltonianMatrix>(build_hamiltonian(fock(), 0.0));
    return *h0_;
  }

  const std::vector<SectorProjector>& projectors() {
    if (projectors_.empty()) {
      for (const auto& p : job_.resolved_sectors()) {
        projectors_.push_back(sector_projector(p, fock(), job_.parity));
      }
    }
    return projectors_;
  }

  bool built() const { return static_cast<bool>(sp_); }

  OutputFile basis_report() {
    const auto& sp = *single_particle();
    json j;
    j["trap"] = to_string(sp.trap().kind());
    j["mass"] = sp.trap().mass();
    j["cutoff"] = sp.cutoff();
    j["single_particle_energies"] = std::vector<double>(sp.energies().begin(), sp.energies().end());
    if (fock_) {
      j["particles"] = fock_->particles();
      j["e_max"] = fock_->e_max();
      j["basis_size"] = fock_->size();
    }
    if (!projectors_.empty()) {
      json sectors = json::array();
      for (const auto& p : projectors_) sectors.push_back({{"sector", p.label()}, {"rank", p.rank()}});
      j["sectors"] = sectors;
    }
    if (sp.trap().kind() == TrapKind::custom) {
      const auto conv = check_grid_convergence(sp.trap(), sp.cutoff(), job_.tolerances.grid);
      j["grid_convergence"] = {{"max_change", conv.max_change}, {"converged", conv.converged},
                               {"tolerance", job_.tolerances.grid}};
    }
    return {"basis.json", dump(j)};
  }

 private:
  const JobConfig& job_;
  std::unique_ptr<TrapPotential> trap_;
  std::shared_ptr<const SingleParticleBasis> sp_;
  std::unique_ptr<FockBasis> fock_;
  std::unique_ptr<HamiltonianMatrix> h0_;
  std::vector<SectorProjector> projectors_;
};

// ---------------------------------------------------------------------------
// analyses

void run_spectrum(const JobConfig& job, Workspace& ws, std::vector<OutputFile>& out) {
  const auto& h0 = ws.h0();
  const auto& projs = ws.projectors();
  const std::size_t ng = job.g.size();
  const std::size_t items = projs.size() * ng;
  std::vector<SectorSpectrum> results(items);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t w = 0; w < static_cast<std::ptrdiff_t>(items); ++w) {
    const auto s = static_cast<std::size_t>(w) / ng;
    const auto k = static_cast<std::size_t>(w) % ng;
    results[static_cast<std::size_t>(w)] = sector_spectrum(h0.with_coupling(job.g[k]), projs[s]);
  }
  for (std::size_t s = 0; s < projs.size(); ++s) {
    std::ostringstream csv;
    csv << "g,index,energy,cluster,sector\n";
    for (std::size_t k = 0; k < ng; ++k) {
      const auto& ev = results[s * ng + k].eigenvalues;
      const std::span<const double> values(ev.data(), static_cast<std::size_t>(ev.size()));
      double tol = job.tolerances.degeneracy;
      if (values.size() > 1 && values.back() > values.front()) tol *= values.back() - values.front();
      std::size_t cluster = 0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0 && values[i] - values[i - 1] >= tol) ++cluster;
        csv << format_double(job.g[k]) << ',' << i << ',' << format_double(values[i]) << ','
            << cluster << ',' << csv_quote(projs[s].label()) << '\n';
      }
    }
    out.push_back({"spectrum_" + sector_slug(projs[s].partition(), projs[s].parity()) + ".csv",
                   csv.str()});
  }
}

void run_sweep(const JobConfig& job, Workspace& ws, std::vector<OutputFile>& out) {
  const auto& h0 = ws.h0();
  for (const auto& proj : ws.projectors()) {
    const auto sweep = sweep_levels(h0, proj, job.g);
    const std::string slug = sector_slug(proj.partition(), proj.parity());
    std::ostringstream csv;
    csv << "g,track,energy,slope,sector\n";
    for (std::size_t k = 0; k < sweep.g_grid.size(); ++k) {
      for (std::size_t t = 0; t < sweep.track_count(); ++t) {
        csv << format_double(sweep.g_grid[k]) << ',' << t << ',' << format_double(sweep.tracks[t][k])
            << ',' << format_double(sweep.slopes[t][k]) << ',' << csv_quote(proj.label()) << '\n';
      }
    }
    out.push_back({"sweep_" + slug + ".csv", csv.str()});
    json meta;
    meta["sector"] = proj.partition().label();
    meta["parity"] = parity_json(proj.parity());
    meta["basis_size"] = sweep.basis_size;
    meta["sector_size"] = sweep.sector_size;
    meta["tracks"] = sweep.track_count();
    meta["grid_points"] = sweep.g_grid.size();
    json amb = json::array();
    for (const auto& a : sweep.ambiguities) {
      amb.push_back({{"grid_index", a.grid_index}, {"g", sweep.g_grid[a.grid_index]},
                     {"track", a.track}, {"best", a.best}, {"runner_up", a.runner_up}});
    }
    meta["ambiguities"] = amb;
    out.push_back({"sweep_" + slug + ".json", dump(meta)});
  }
}

double bosonic_ground(const FockBasis& fock, double g) {
  const auto h = build_hamiltonian(fock, g);
  const auto p = sector_projector(Partition::symmetric(fock.particles()), fock);
  return sector_spectrum(h, p).eigenvalues(0);
}

// At strong coupling the truncated ground energy converges slowly; report how
// much it moves when the basis shrinks so the caller can judge the cut.
OutputFile truncation_report(const JobConfig& job, Workspace& ws) {
  const double g = job.g.back();
  const auto& fock = ws.fock();
  json j;
  j["g"] = g;
  j["e_max"] = job.e_max;
  const double e = bosonic_ground(fock, g);
  j["ground_energy"] = e;
  const double reduced = 0.75 * job.e_max;
  j["reduced_e_max"] = reduced;
  try {
    const auto small = build_basis(ws.single_particle(), job.particles, reduced);
    const double er = bosonic_ground(small, g);
    j["reduced_ground_energy"] = er;
    j["change"] = e - er;
  } catch (const EmptyBasis&) {
    j["reduced_ground_energy"] = nullptr;
    j["change"] = nullptr;
  }
  const auto ref = girardeau_reference(*ws.single_particle(), job.particles);
  j["hard_core_limit"] = ref.front();
  j["gap_to_hard_core_limit"] = ref.front() - e;
  return {"truncation_report.json", dump(j)};
}

void run_stats(const JobConfig& job, Workspace& ws, std::vector<OutputFile>& out) {
  const auto& cfg = job.stats;
  std::vector<double> levels;
  json summary;
  summary["source"] = cfg.source;
  if (cfg.source == "hamiltonian") {
    // Brody flow over the grid; the summary and histogram describe the last g.
    const auto& proj = ws.projectors().front();
    const UnfoldingOptions opts{cfg.unfolding_degree, cfg.edge_fraction};
    std::ostringstream flow;
    flow << "g,levels,ks_poisson,ks_wigner,brody_beta\n";
    for (double g : job.g) {
      const auto spec = sector_spectrum(ws.h0().with_coupling(g), proj);
      levels.assign(spec.eigenvalues.data(), spec.eigenvalues.data() + spec.eigenvalues.size());
      if (job.g.size() > 1) {
        const auto st = spacing_statistics(levels, opts);
        flow << format_double(g) << ',' << levels.size() << ',' << format_double(st.ks_poisson) << ','
             << format_double(st.ks_wigner) << ',' << format_double(st.brody_beta) << '\n';
      }
    }
    if (job.g.size() > 1) out.push_back({"stats_flow.csv", flow.str()});
    summary["sector"] = proj.label();
    summary["g"] = job.g.back();
  } else if (cfg.source == "goe") {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(goe_sample(cfg.goe_dim, *job.seed),
                                                          Eigen::EigenvaluesOnly);
    levels.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    summary["goe_dim"] = cfg.goe_dim;
  } else {
    std::mt19937_64 rng(*job.seed);
    std::exponential_distribution<double> spacing(1.0);
    levels.resize(cfg.poisson_count + 1);
    levels[0] = 0.0;
    for (std::size_t i = 1; i < levels.size(); ++i) levels[i] = levels[i - 1] + spacing(rng);
    summary["poisson_count"] = cfg.poisson_count;
  }
  if (job.seed) summary["seed"] = *job.seed;
  const UnfoldingOptions opts{cfg.unfolding_degree, cfg.edge_fraction};
  const auto st = spacing_statistics(levels, opts);
  summary["levels"] = levels.size();
  summary["spacings"] = st.spacings.size();
  summary["unfolding_degree"] = cfg.unfolding_degree;
  summary["edge_fraction"] = cfg.edge_fraction;
  summary["ks_poisson"] = st.ks_poisson;
  summary["ks_wigner"] = st.ks_wigner;
  summary["brody_beta"] = st.brody_beta;
  out.push_back({"stats_summary.json", dump(summary)});
  std::ostringstream csv;
  const auto rows = spacing_histogram(st.spacings, cfg.bin_width, cfg.s_max);
  write_histogram_csv(csv, rows);
  out.push_back({"stats_histogram.csv", csv.str()});
}

StateVector random_state(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = cd(re, im);
  }
  return StateVector::normalized(std::move(v));
}

void run_entangle(const JobConfig& job, Workspace& ws, std::vector<OutputFile>& out) {
  const auto& fock = ws.fock();
  const auto layout = interparticle_layout(fock);
  std::ostringstream csv;
  csv << "g,t,entropy\n";
  json meta;
  meta["state"] = job.entangle.state;
  meta["layout"] = "particle 1 | particles 2..N";
  json per_g = json::array();
  for (double g : job.g) {
    const Propagator u(ws.h0().with_coupling(g));
    const auto start = job.entangle.state == "random"
                           ? random_state(fock.size(), *job.seed)
                           : StateVector::normalized(u.eigenvectors().col(0).cast<cd>());
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (double t : job.entangle.times) {
      const double s = entanglement_entropy(u.evolve(start, t), layout);
      csv << format_double(g) << ',' << format_double(t) << ',' << format_double(s) << '\n';
      lo = first ? s : std::min(lo, s);
      hi = first ? s : std::max(hi, s);
      first = false;
    }
    per_g.push_back({{"g", g}, {"entropy_spread", hi - lo}});
  }
  meta["couplings"] = per_g;
  if (job.seed) meta["seed"] = *job.seed;
  out.push_back({"entangle.csv", csv.str()});
  out.push_back({"entangle.json", dump(meta)});
}

void run_comrel(const JobConfig& job, Workspace& ws, std::vector<OutputFile>& out) {
  const auto& fock = ws.fock();
  const auto map = com_rel_map(fock);
  const auto layout = map.layout();
  const auto inter = interparticle_layout(fock);
  const double omega = job.trap.omega;
  std::ostringstream csv;
  csv << "g,t,comrel_entropy,interparticle_entropy\n";
  json report = json::array();
  for (double g : job.g) {
    const auto h = ws.h0().with_coupling(g);
    json entry;
    entry["g"] = g;
    entry["interior_commutator"] = map.interior_commutator(h);
    entry["commutator"] = map.commutator(h);
    const Propagator u(h);
    const auto& ev = u.eigenvalues();

    // Superposition of the ground state with the lowest isolated level that
    // differs in both CoM and relative quanta.
    auto isolated = [&](Eigen::Index k) {
      const double below = k > 0 ? ev(k) - ev(k - 1) : 1.0;
      const double above = k + 1 < ev.size() ? ev(k + 1) - ev(k) : 1.0;
      return std::min(below, above) > job.tolerances.degeneracy;
    };
    auto label_of = [&](Eigen::Index k) {
      const auto cr = map.to_com_rel(StateVector::normalized(u.eigenvectors().col(k).cast<cd>()));
      Eigen::Index best = 0;
      cr.amplitudes().cwiseAbs().maxCoeff(&best);
      return map.labels()[static_cast<std::size_t>(best)];
    };
    // Ladder copies E + omega of the lowest CoM-ground levels.
    json ladder = json::array();
    for (Eigen::Index i = 0; i < ev.size() && ladder.size() < 5; ++i) {
      const auto li = label_of(i);
      if (li.com != 0) continue;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < ev.size(); ++j) best = std::min(best, std::abs(ev(j) - ev(i) - omega));
      ladder.push_back({{"energy", ev(i)}, {"relative", li.relative}, {"deviation", best},
                        {"matched", best <= job.tolerances.ladder}});
    }
    entry["ladder"] = ladder;

    std::optional<Eigen::Index> partner;
    if (isolated(0)) {
      const auto l0 = label_of(0);
      for (Eigen::Index k = 1; k < ev.size() && !partner; ++k) {
        const auto lk = label_of(k);
        if (isolated(k) && lk.com != l0.com && lk.relative != l0.relative) partner = k;
      }
    }
    if (!partner) {
      entry["superposition"] = nullptr;
    } else {
      const auto l0 = label_of(0), l1 = label_of(*partner);
      const Eigen::VectorXcd mix =
          (0.8 * u.eigenvectors().col(0) + 0.6 * u.eigenvectors().col(*partner)).cast<cd>();
      const auto start = StateVector::normalized(mix);
      double lo = 0.0, hi = 0.0;
      bool first = true;
      for (double t : job.comrel.times) {
        const auto st = u.evolve(start, t);
        const double s = entanglement_entropy(map.to_com_rel(st), layout);
        const double si = entanglement_entropy(st, inter);
        csv << format_double(g) << ',' << format_double(t) << ',' << format_double(s) << ','
            << format_double(si) << '\n';
        lo = first ? s : std::min(lo, s);
        hi = first ? s : std::max(hi, s);
        first = false;
      }
      entry["superposition"] = {{"levels", {0, *partner}},
                                {"weights", {0.8, 0.6}},
                                {"labels", {{l0.com, l0.relative}, {l1.com, l1.relative}}},
                                {"comrel_entropy_spread", hi - lo}};
    }
    report.push_back(entry);
  }
  out.push_back({"comrel.json", dump(report)});
  out.push_back({"comrel_entropy.csv", csv.str()});
}

Eigen::MatrixXcd pauli(int k) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  if (k == 0) {
    m(0, 1) = m(1, 0) = 1.0;
  } else if (k == 1) {
    m(0, 1) = cd(0, -1);
    m(1, 0) = cd(0, 1);
  } else {
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
  }
  return m;
}

Eigen::MatrixXcd random_unitary(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd z(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = cd(re, im);
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(z.rows(), z.cols());
}

json report_json(const std::string& label, std::size_t dim, const TpsReport& r) {
  return {{"label", label},
          {"dim", dim},
          {"independent", r.independent},
          {"worst_commutator", r.worst_commutator},
          {"complete", r.complete},
          {"algebra_dimension", r.algebra_dimension},
          {"full_dimension", r.full_dimension},
          {"subalgebra_dimensions", r.subalgebra_dimensions},
          {"factor_dims", r.factor_dims},
          {"accessibility", r.accessibility}};
}

void run_tps(const JobConfig& job, std::vector<OutputFile>& out) {
  const ZanardiOptions opts{job.tolerances.commutator, job.tolerances.rank};
  json cases = json::array();
  if (!job.tps.file.empty()) {
    const auto file = load_operator_sets(job.tps.file);
    cases.push_back(report_json(job.tps.file.filename().string(), file.dim,
                                zanardi_check(file.sets, file.dim, opts)));
  } else {
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
    std::vector<Eigen::MatrixXcd> left, right;
    for (int k = 0; k < 3; ++k) {
      left.push_back(kron(pauli(k), id));
      right.push_back(kron(id, pauli(k)));
    }
    const std::vector<OperatorSet> canonical{OperatorSet::make("A", left), OperatorSet::make("B", right)};
    const std::vector<OperatorSet> duplicated{OperatorSet::make("A", left), OperatorSet::make("A'", left)};
    cases.push_back(report_json("canonical_two_qubit", 4, zanardi_check(canonical, 4, opts)));
    cases.push_back(report_json("duplicated_factor", 4, zanardi_check(duplicated, 4, opts)));
    if (job.seed) {
      const auto w = random_unitary(4, *job.seed);
      auto conjugate = [&](const std::vector<OperatorSet>& sets) {
        std::vector<OperatorSet> outsets;
        for (const auto& s : sets) {
          std::vector<Eigen::MatrixXcd> gens;
          for (const auto& g : s.generators) gens.push_back(w * g * w.adjoint());
          outsets.push_back(OperatorSet::make(s.label, std::move(gens)));
        }
        return outsets;
      };
      cases.push_back(report_json("canonical_two_qubit_conjugated", 4,
                                  zanardi_check(conjugate(canonical), 4, opts)));
      cases.push_back(report_json("duplicated_factor_conjugated", 4,
                                  zanardi_check(conjugate(duplicated), 4, opts)));
    }
  }
  json j;
  j["commutator_tolerance"] = opts.commutator_tol;
  j["rank_threshold"] = opts.rank_threshold;
  j["cases"] = cases;
  out.push_back({"tps_report.json", dump(j)});
}

bool needs_basis(const JobConfig& job, Analysis a) {
  switch (a) {
    case Analysis::spectrum:
    case Analysis::sweep:
    case Analysis::entangle:
    case Analysis::comrel:
      return true;
    case Analysis::stats:
      return job.stats.source == "hamiltonian";
    case Analysis::tps_demo:
      return false;
  }
  return false;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  os.close();
  if (!os) throw Error("failed writing " + path.string());
}

}  // namespace

std::string to_string(Analysis a) {
  switch (a) {
    case Analysis::spectrum: return "spectrum";
    case Analysis::sweep: return "sweep";
    case Analysis::stats: return "stats";
    case Analysis::entangle: return "entangle";
    case Analysis::comrel: return "comrel";
    case Analysis::tps_demo: return "tps-demo";
  }
  return "?";
}

Analysis analysis_from_string(std::string_view name) {
  for (auto a : {Analysis::spectrum, Analysis::sweep, Analysis::stats, Analysis::entangle,
                 Analysis::comrel, Analysis::tps_demo}) {
    if (to_string(a) == name) return a;
  }
  throw ValidationError("unknown analysis '" + std::string(name) +
                        "'; expected one of: spectrum, sweep, stats, entangle, comrel, tps-demo");
}

std::vector<Partition> JobConfig::resolved_sectors() const {
  return all_sectors ? partitions(particles) : sectors;
}

JobConfig parse_config(const std::string& text_in, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text_in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    reject_unknown(doc, {"trap", "N", "E_max", "cutoff", "sectors", "parity", "g", "g_grid",
                         "analyses", "tolerances", "output", "seed", "stats", "entangle", "comrel",
                         "tps"},
                   "config");
    JobConfig job;
    if (doc.contains("trap")) job.trap = parse_trap(doc["trap"], base_dir);
    if (doc.contains("N")) {
      if (!doc["N"].is_number_integer()) throw ValidationError("N must be an integer");
      job.particles = doc["N"].get<int>();
      if (job.particles < 1) throw ValidationError("N must be at least 1");
      if (job.particles > kMaxSymmetricDegree) {
        throw ValidationError("N must be at most " + std::to_string(kMaxSymmetricDegree));
      }
    }
    if (doc.contains("E_max")) job.e_max = positive(doc["E_max"], "E_max");
    if (doc.contains("cutoff")) {
      job.cutoff = count(doc["cutoff"], "cutoff");
      if (*job.cutoff == 0) throw ValidationError("cutoff must be positive");
    }
    if (doc.contains("sectors")) {
      const auto& s = doc["sectors"];
      if (s.is_string()) {
        if (s.get<std::string>() != "all") {
          throw ValidationError("sectors must be \"all\" or a list of partitions");
        }
      } else if (s.is_array()) {
        if (job.particles < 1) throw ValidationError("sectors need N");
        if (s.empty()) throw ValidationError("sectors list is empty");
        job.all_sectors = false;
        for (const auto& p : s) {
          auto part = parse_partition(p, job.particles);
          if (std::find(job.sectors.begin(), job.sectors.end(), part) != job.sectors.end()) {
            throw ValidationError("sector " + part.label() + " listed twice");
          }
          job.sectors.push_back(std::move(part));
        }
      } else {
        throw ValidationError("sectors must be \"all\" or a list of partitions");
      }
    }
    if (doc.contains("parity") && !doc["parity"].is_null()) {
      const std::string p = text(doc["parity"], "parity");
      if (p == "even") {
        job.parity = Parity::even;
      } else if (p == "odd") {
        job.parity = Parity::odd;
      } else {
        throw ValidationError("unknown parity '" + p + "'; expected one of: even, odd");
      }
    }
    if (doc.contains("g") && doc.contains("g_grid")) {
      throw ValidationError("give either g or g_grid, not both");
    }
    if (doc.contains("g")) job.g = number_list(doc["g"], "g");
    if (doc.contains("g_grid")) job.g = parse_grid(doc["g_grid"]);
    require_ascending(job.g, "g grid");
    if (doc.contains("analyses")) {
      const auto& a = doc["analyses"];
      if (!a.is_array()) throw ValidationError("analyses must be a list");
      for (const auto& name : a) {
        const auto an = analysis_from_string(text(name, "analysis name"));
        if (std::find(job.analyses.begin(), job.analyses.end(), an) == job.analyses.end()) {
          job.analyses.push_back(an);
        }
      }
    } else {
      job.analyses = {Analysis::spectrum};
    }
    if (doc.contains("tolerances")) job.tolerances = parse_tolerances(doc["tolerances"]);
    if (doc.contains("output")) job.output = resolve(base_dir, text(doc["output"], "output"));
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_unsigned()) throw ValidationError("seed must be a non-negative integer");
      job.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("stats")) job.stats = parse_stats(doc["stats"]);
    if (doc.contains("entangle")) {
      const auto& e = doc["entangle"];
      reject_unknown(e, {"state", "times"}, "entangle");
      if (e.contains("state")) {
        job.entangle.state = text(e["state"], "entangle.state");
        if (job.entangle.state != "random" && job.entangle.state != "ground") {
          throw ValidationError("unknown entangle.state '" + job.entangle.state +
                                "'; expected one of: random, ground");
        }
      }
      if (e.contains("times")) job.entangle.times = parse_times(e["times"], "entangle.times");
    }
    if (doc.contains("comrel")) {
      const auto& c = doc["comrel"];
      reject_unknown(c, {"times"}, "comrel");
      if (c.contains("times")) job.comrel.times = parse_times(c["times"], "comrel.times");
    }
    if (doc.contains("tps")) {
      const auto& t = doc["tps"];
      reject_unknown(t, {"file"}, "tps");
      if (t.contains("file")) job.tps.file = resolve(base_dir, text(t["file"], "tps.file"));
    }
    validate_analyses(job, job.analyses);
    return job;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

JobConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  std::ostringstream text_in;
  text_in << in.rdbuf();
  return parse_config(text_in.str(), path.parent_path());
}

void validate_analyses(const JobConfig& job, const std::vector<Analysis>& analyses) {
  for (auto a : analyses) {
    const std::string name = to_string(a);
    if (needs_basis(job, a)) {
      if (job.particles < 1) throw ValidationError(name + " needs N");
      if (!(job.e_max > 0.0)) throw ValidationError(name + " needs E_max");
    }
    switch (a) {
      case Analysis::stats:
        if (job.stats.source == "hamiltonian") {
          if (job.resolved_sectors().size() != 1) {
            throw ValidationError(
                "stats on a Hamiltonian needs exactly one sector; mixing sectors spoils spacing "
                "statistics");
          }
        } else if (!job.seed) {
          throw ValidationError("stats from a " + job.stats.source + " sample needs a seed");
        }
        break;
      case Analysis::entangle:
        if (job.particles < 2) throw ValidationError("entangle needs N >= 2");
        if (job.entangle.state == "random" && !job.seed) {
          throw ValidationError("entangle with a random state needs a seed");
        }
        break;
      case Analysis::comrel:
        if (job.particles != 2) throw ValidationError("comrel needs N = 2");
        if (job.trap.kind != TrapKind::harmonic) throw ValidationError("comrel needs a harmonic trap");
        break;
      default:
        break;
    }
  }
}

std::vector<OutputFile> compute_outputs(const JobConfig& job, const std::vector<Analysis>& analyses) {
  validate_analyses(job, analyses);
  Workspace ws(job);
  std::vector<OutputFile> out;
  bool truncation_done = false;
  for (auto a : analyses) {
    switch (a) {
      case Analysis::spectrum:
        run_spectrum(job, ws, out);
        break;
      case Analysis::sweep:
        run_sweep(job, ws, out);
        break;
      case Analysis::stats:
        run_stats(job, ws, out);
        break;
      case Analysis::entangle:
        run_entangle(job, ws, out);
        break;
      case Analysis::comrel:
        run_comrel(job, ws, out);
        break;
      case Analysis::tps_demo:
        run_tps(job, out);
        break;
    }
    if ((a == Analysis::spectrum || a == Analysis::sweep) && !truncation_done &&
        job.g.back() >= 100.0) {
      out.push_back(truncation_report(job, ws));
      truncation_done = true;
    }
  }
  if (ws.built()) out.push_back(ws.basis_report());
  return out;
}

Manifest run_job(const JobConfig& job, const std::optional<std::vector<Analysis>>& only) {
  const auto& analyses = only ? *only : job.analyses;
  const auto files = compute_outputs(job, analyses);
  std::error_code ec;
  std::filesystem::create_directories(job.output, ec);
  if (ec) throw Error("cannot create output directory " + job.output.string() + ": " + ec.message());
  Manifest manifest;
  for (const auto& f : files) {
    write_file(job.output / f.name, f.content);
    manifest.files.push_back({f.name, sha256_hex(f.content), f.content.size()});
  }
  write_file(job.output / "manifest.json", manifest_json(job, manifest));
  return manifest;
}

std::string manifest_json(const JobConfig& job, const Manifest& manifest) {
  json j;
  j["schema_version"] = Manifest::kSchemaVersion;
  json jobj;
  jobj["trap"] = to_string(job.trap.kind);
  jobj["N"] = job.particles;
  jobj["E_max"] = job.e_max;
  jobj["g"] = job.g;
  if (job.seed) jobj["seed"] = *job.seed;
  j["job"] = jobj;
  json files = json::array();
  for (const auto& f : manifest.files) {
    files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  j["files"] = files;
  return dump(j);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace fewbody::cli
