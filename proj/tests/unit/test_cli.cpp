#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "fewbody/analysis.hpp"
#include "fewbody/cli.hpp"
#include "fewbody/errors.hpp"

using namespace fewbody;
using namespace fewbody::cli;
namespace fs = std::filesystem;

namespace {

struct Row {
  double g;
  std::size_t index;
  double energy;
};

// Parses "g,index,energy,..." rows, skipping the header.
std::vector<Row> rows(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  std::vector<Row> out;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string a, b, c;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    std::getline(ls, c, ',');
    out.push_back({std::stod(a), std::stoul(b), std::stod(c)});
  }
  return out;
}

const OutputFile& find(const std::vector<OutputFile>& files, const std::string& name) {
  auto it = std::find_if(files.begin(), files.end(), [&](const auto& f) { return f.name == name; });
  REQUIRE(it != files.end());
  return *it;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fewbody_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config parsing applies defaults") {
  const auto job = parse_config(
      R"({"trap": {"kind": "harmonic", "omega": 1}, "N": 2, "E_max": 12, "analyses": ["spectrum"], "g": [0]})");
  CHECK(job.trap.kind == TrapKind::harmonic);
  CHECK(job.trap.mass == 1.0);
  CHECK(job.trap.omega == 1.0);
  CHECK(job.particles == 2);
  CHECK(job.e_max == 12.0);
  CHECK(job.all_sectors);
  CHECK(job.resolved_sectors().size() == 2);
  CHECK(job.tolerances.profile == "standard");
  CHECK(job.g == std::vector<double>{0.0});
  CHECK(job.analyses == std::vector<Analysis>{Analysis::spectrum});
  CHECK_FALSE(job.seed.has_value());
  CHECK_FALSE(job.cutoff.has_value());
  CHECK_FALSE(job.parity.has_value());
}

TEST_CASE("config validation") {
  SUBCASE("misspelled trap kind lists the choices") {
    try {
      parse_config(R"({"trap": {"kind": "squarewell"}, "N": 2, "E_max": 12})");
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("squarewell") != std::string::npos);
      CHECK(msg.find("harmonic, infinite_well, custom") != std::string::npos);
    }
  }
  SUBCASE("partition of the wrong size") {
    try {
      parse_config(R"({"trap": {"kind": "harmonic"}, "N": 2, "E_max": 12, "sectors": [[2,1]]})");
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()) == "partition sums to 3, expected 2");
    }
  }
  SUBCASE("rejections") {
    const std::vector<std::string> bad{
        "not json",
        R"({"N": 2, "E_max": 12, "colour": 1})",
        R"({"trap": {"kind": "harmonic", "spring": 2}, "N": 2, "E_max": 12})",
        R"({"N": 0, "E_max": 12})",
        R"({"N": 2, "E_max": -1})",
        R"({"N": 2, "E_max": 12, "g": [1, 0]})",
        R"({"N": 2, "E_max": 12, "g": [0, 0]})",
        R"({"N": 2, "E_max": 12, "g": [0], "g_grid": {"start": 0, "stop": 1, "points": 3}})",
        R"({"N": 2, "E_max": 12, "sectors": [[1,2]]})",
        R"({"N": 2, "E_max": 12, "sectors": "some"})",
        R"({"N": 2, "E_max": 12, "parity": "up"})",
        R"({"N": 2, "E_max": 12, "analyses": ["plot"]})",
        R"({"analyses": ["stats"], "stats": {"source": "goe"}})",
        R"({"N": 2, "E_max": 12, "analyses": ["stats"]})",
        R"({"N": 2, "E_max": 12, "analyses": ["entangle"]})",
        R"({"N": 3, "E_max": 12, "analyses": ["comrel"]})",
        R"({"trap": {"kind": "infinite_well"}, "N": 2, "E_max": 12, "analyses": ["comrel"]})",
        R"({"trap": {"kind": "custom"}, "N": 2, "E_max": 12})",
        R"({"N": 2, "E_max": 12, "tolerances": {"profile": "loose"}})",
        R"({"N": 2, "E_max": 12, "seed": -3})",
        R"({"analyses": ["spectrum"]})",
    };
    for (const auto& text : bad) {
      CAPTURE(text);
      CHECK_THROWS_AS(parse_config(text), ValidationError);
    }
  }
  SUBCASE("grids") {
    const auto lin = parse_config(
        R"({"N": 2, "E_max": 6, "g_grid": {"start": 0, "stop": 2, "points": 5}})");
    CHECK(lin.g == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
    const auto lg = parse_config(
        R"({"N": 2, "E_max": 6, "g_grid": {"start": 1, "stop": 100, "points": 3, "spacing": "log"}})");
    REQUIRE(lg.g.size() == 3);
    CHECK(lg.g[1] == doctest::Approx(10.0));
  }
  SUBCASE("profiles and overrides") {
    const auto job = parse_config(
        R"({"N": 2, "E_max": 6, "tolerances": {"profile": "strict", "ladder": 0.5}})");
    CHECK(job.tolerances.commutator == 1e-12);
    CHECK(job.tolerances.ladder == 0.5);
  }
}

TEST_CASE("spectrum job at g = 0 gives the non-interacting bosonic ground state") {
  for (const char* text : {
           R"({"trap": {"kind": "harmonic", "omega": 1.5}, "N": 2, "E_max": 12, "sectors": [[2]]})",
           R"({"trap": {"kind": "harmonic"}, "N": 3, "E_max": 9, "sectors": [[3]]})",
           R"({"trap": {"kind": "infinite_well", "length": 2}, "N": 2, "E_max": 30, "sectors": [[2]]})",
       }) {
    CAPTURE(text);
    const auto job = parse_config(text);
    const auto files = compute_outputs(job, {Analysis::spectrum});
    const auto slug = job.resolved_sectors().front().slug();
    const auto r = rows(find(files, "spectrum_" + slug + ".csv").content);
    REQUIRE_FALSE(r.empty());
    double eps0 = 0.0;
    if (job.trap.kind == TrapKind::harmonic) {
      eps0 = 0.5 * job.trap.omega;
    } else {
      eps0 = std::numbers::pi * std::numbers::pi / (2.0 * job.trap.length * job.trap.length);
    }
    CHECK(r.front().index == 0);
    CHECK(r.front().energy == doctest::Approx(job.particles * eps0).epsilon(1e-12));
  }
}

TEST_CASE("fermionic sweep rows do not move with g") {
  const auto job = parse_config(
      R"({"N": 3, "E_max": 9, "sectors": [[1,1,1]], "g": [0, 1, 10, 100], "analyses": ["sweep"]})");
  const auto files = compute_outputs(job, job.analyses);
  const auto r = rows(find(files, "sweep_1-1-1.csv").content);
  std::map<std::size_t, std::vector<double>> tracks;
  for (const auto& row : r) tracks[row.index].push_back(row.energy);
  REQUIRE_FALSE(tracks.empty());
  for (const auto& [t, e] : tracks) {
    CHECK(e.size() == 4);
    for (double x : e) CHECK(std::abs(x - e.front()) <= 1e-8);
  }
  // Strong coupling triggers the truncation report.
  const auto report = nlohmann::json::parse(find(files, "truncation_report.json").content);
  CHECK(report["g"] == 100.0);
  CHECK(report["hard_core_limit"].get<double>() == doctest::Approx(0.5 + 1.5 + 2.5));
}

TEST_CASE("GOE statistics job") {
  const auto job = parse_config(R"({"analyses": ["stats"], "seed": 42, "stats": {"source": "goe"}})");
  const auto files = compute_outputs(job, job.analyses);
  const auto summary = nlohmann::json::parse(find(files, "stats_summary.json").content);
  CHECK(summary["ks_wigner"].get<double>() < 0.05);
  // Same numbers as driving the library directly on the seeded sample.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(goe_sample(500, 42), Eigen::EigenvaluesOnly);
  const std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 500);
  const auto direct = spacing_statistics(ev);
  CHECK(summary["ks_wigner"].get<double>() == direct.ks_wigner);
  CHECK(summary["brody_beta"].get<double>() == direct.brody_beta);
  CHECK(summary["spacings"].get<std::size_t>() == direct.spacings.size());
  const auto& hist = find(files, "stats_histogram.csv").content;
  CHECK(hist.rfind("s,empirical_density,poisson_density,wigner_density\n", 0) == 0);
}

TEST_CASE("Brody flow of one sector across g") {
  const auto job = parse_config(
      R"({"trap": {"kind": "infinite_well"}, "N": 3, "E_max": 300, "sectors": [[2,1]], "parity": "even",
          "g": [0, 5, 20], "analyses": ["stats"]})");
  const auto files = compute_outputs(job, job.analyses);
  const auto flow = find(files, "stats_flow.csv").content;
  CHECK(flow.rfind("g,levels,ks_poisson,ks_wigner,brody_beta\n", 0) == 0);
  CHECK(std::count(flow.begin(), flow.end(), '\n') == 4);
  const auto summary = nlohmann::json::parse(find(files, "stats_summary.json").content);
  CHECK(summary["g"] == 20.0);
  CHECK(summary["sector"] == "[2,1]+");
}

TEST_CASE("Poisson statistics job") {
  const auto job = parse_config(R"({"analyses": ["stats"], "seed": 3, "stats": {"source": "poisson"}})");
  const auto summary = nlohmann::json::parse(find(compute_outputs(job, job.analyses), "stats_summary.json").content);
  CHECK(summary["ks_poisson"].get<double>() < 0.02);
}

TEST_CASE("entanglement and CoM jobs") {
  const auto job = parse_config(
      R"({"N": 2, "E_max": 12, "g": [0, 1], "seed": 11,
          "analyses": ["entangle", "comrel"], "entangle": {"times": [0, 0.7, 1.9]}})");
  const auto files = compute_outputs(job, job.analyses);
  const auto ent = nlohmann::json::parse(find(files, "entangle.json").content);
  CHECK(ent["couplings"][0]["entropy_spread"].get<double>() <= 1e-10);
  CHECK(ent["couplings"][1]["entropy_spread"].get<double>() > 1e-6);
  const auto com = nlohmann::json::parse(find(files, "comrel.json").content);
  const auto& g1 = com[1];
  CHECK(g1["interior_commutator"].get<double>() < 1e-6);
  REQUIRE(g1["superposition"].is_object());
  CHECK(g1["superposition"]["comrel_entropy_spread"].get<double>() <= 1e-8);
  for (const auto& l : g1["ladder"]) CHECK(l["matched"].get<bool>());
}

TEST_CASE("TPS demonstration job") {
  const auto job = parse_config(R"({"analyses": ["tps-demo"], "seed": 5})");
  const auto report = nlohmann::json::parse(find(compute_outputs(job, job.analyses), "tps_report.json").content);
  const auto& cases = report["cases"];
  REQUIRE(cases.size() == 4);
  for (const auto& c : cases) {
    const bool canonical = c["label"].get<std::string>().rfind("canonical", 0) == 0;
    CHECK(c["independent"].get<bool>() == canonical);
    CHECK(c["complete"].get<bool>() == canonical);
    CHECK(c["accessibility"] == "caller-asserted");
  }
}

TEST_CASE("TPS job from an operator-set file") {
  const auto dir = scratch("tps_file");
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "sets.json");
    os << R"({"dim": 2, "sets": [
      {"label": "x", "generators": [[[[0,0],[1,0]],[[1,0],[0,0]]]]},
      {"label": "z", "generators": [[[[1,0],[0,0]],[[0,0],[-1,0]]]]}]})";
  }
  {
    std::ofstream os(dir / "job.json");
    os << R"({"analyses": ["tps-demo"], "tps": {"file": "sets.json"}})";
  }
  const auto job = load_config(dir / "job.json");
  CHECK(job.tps.file == dir / "sets.json");
  const auto report = nlohmann::json::parse(find(compute_outputs(job, job.analyses), "tps_report.json").content);
  REQUIRE(report["cases"].size() == 1);
  CHECK_FALSE(report["cases"][0]["independent"].get<bool>());
  fs::remove_all(dir);
}

TEST_CASE("run_job writes a manifest whose digests reproduce") {
  const std::string text =
      R"({"N": 2, "E_max": 10, "g": [0, 1, 100], "seed": 9,
          "analyses": ["spectrum", "sweep", "entangle", "comrel", "tps-demo"]})";
  auto job = parse_config(text);
  const auto a = scratch("a"), b = scratch("b");
  job.output = a;
  const auto ma = run_job(job);
  job.output = b;
  const auto mb = run_job(job);
  REQUIRE(ma.files.size() == mb.files.size());
  for (std::size_t i = 0; i < ma.files.size(); ++i) {
    CHECK(ma.files[i].name == mb.files[i].name);
    CHECK(ma.files[i].sha256 == mb.files[i].sha256);
    const auto content = slurp(a / ma.files[i].name);
    CHECK(sha256_hex(content) == ma.files[i].sha256);
    CHECK(content.size() == ma.files[i].bytes);
  }
  // Every written file is declared.
  std::size_t on_disk = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().filename() != "manifest.json") ++on_disk;
  }
  CHECK(on_disk == ma.files.size());
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["schema_version"] == 1);
  CHECK(manifest["files"].size() == ma.files.size());

  // Only the requested analysis runs.
  const auto c = scratch("c");
  job.output = c;
  const auto mc = run_job(job, std::vector<Analysis>{Analysis::tps_demo});
  REQUIRE(mc.files.size() == 1);
  CHECK(mc.files[0].name == "tps_report.json");
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST_CASE("I/O failures name the offending path") {
  const auto dir = scratch("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  auto job = parse_config(R"({"analyses": ["tps-demo"]})");
  job.output = dir / "file" / "out";
  try {
    run_job(job);
    FAIL("expected an I/O error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find((dir / "file" / "out").string()) != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("formatting and digests") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(std::stod(format_double(std::numbers::pi)) == std::numbers::pi);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
