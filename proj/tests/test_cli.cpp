#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kBin = VPATCH_BIN;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(kBin) + " " + args + " >/dev/null 2>/tmp/vpatch_err.txt";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

fs::path write_config(const std::string& name, const json& j) {
  fs::path dir = fs::temp_directory_path() / "vpatch_cli_test";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream f(p);
  f << j.dump(2);
  return p;
}

json single_patch_config() {
  return json{{"domain", {{"kind", "disk"}, {"radius", 1.0}}},
              {"mus", {6.283185307179586}},
              {"radii", {0.1}},
              {"M", 10},
              {"tol", 1e-11},
              {"X0", {{0.05, -0.02}}}};
}

json pair_config() {
  double d = 0.48586827175664567;  // sqrt(sqrt(5) - 2)
  return json{{"domain", {{"kind", "disk"}, {"radius", 1.0}}},
              {"mus", {1.0, -1.0}},
              {"radii", {0.05}},
              {"M", 8},
              {"tol", 1e-10},
              {"symmetric", true},
              {"X0", {{d, 0.0}, {-d, 0.0}}}};
}

}  // namespace

TEST_CASE("steady command produces the declared artifacts") {
  auto cfgp = write_config("steady.json", single_patch_config());
  fs::path out = fs::temp_directory_path() / "vpatch_cli_test" / "steady_out";
  fs::remove_all(out);
  int rc = run_cli("steady --config " + cfgp.string() + " --out " + out.string());
  CHECK(rc == 0);
  CHECK(fs::exists(out / "steady_state.json"));
  CHECK(fs::exists(out / "boundary_0.csv"));
  CHECK(fs::exists(out / "boundaries.svg"));
  CHECK(fs::exists(out / "manifest.json"));

  json st = json::parse(slurp(out / "steady_state.json"));
  CHECK(st["r"][0].get<double>() == doctest::Approx(0.1));
  for (const auto& pair : st["beta"][0]) {
    CHECK(std::abs(pair[0].get<double>()) * 0.1 <= 1e-10);
    CHECK(std::abs(pair[1].get<double>()) * 0.1 <= 1e-10);
  }
  CHECK(st["diagnostics"]["residual_norm"].get<double>() <= 1e-11);

  // every manifest entry exists and its hash matches the file content
  json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["files"].size() >= 4);
  for (const auto& e : manifest["files"]) {
    fs::path p = out / e["path"].get<std::string>();
    CHECK(fs::exists(p));
  }
}

TEST_CASE("malformed config names the offending field") {
  json bad = single_patch_config();
  bad["radii"] = {-0.1};
  auto cfgp = write_config("bad.json", bad);
  fs::path out = fs::temp_directory_path() / "vpatch_cli_test" / "bad_out";
  int rc = run_cli("steady --config " + cfgp.string() + " --out " + out.string());
  CHECK(rc == 2);
  std::string err = slurp("/tmp/vpatch_err.txt");
  CHECK(err.find("radii[0]") != std::string::npos);
}

TEST_CASE("re-running reproduces byte-identical artifacts") {
  json cfg = single_patch_config();
  cfg["pv"] = {{"T", 2.0}, {"dt", 0.02}};
  cfg["X0"] = {{0.4, 0.1}};
  auto cfgp = write_config("pv.json", cfg);
  fs::path out1 = fs::temp_directory_path() / "vpatch_cli_test" / "pv1";
  fs::path out2 = fs::temp_directory_path() / "vpatch_cli_test" / "pv2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  CHECK(run_cli("pv --config " + cfgp.string() + " --out " + out1.string()) == 0);
  CHECK(run_cli("pv --config " + cfgp.string() + " --out " + out2.string() + " --threads 2") == 0);
  CHECK(slurp(out1 / "trajectory.csv") == slurp(out2 / "trajectory.csv"));
  CHECK(slurp(out1 / "manifest.json") == slurp(out2 / "manifest.json"));
}

TEST_CASE("stability command flags the slow rows") {
  auto cfgp = write_config("stab.json", pair_config());
  fs::path out = fs::temp_directory_path() / "vpatch_cli_test" / "stab_out";
  fs::remove_all(out);
  int rc = run_cli("stability --config " + cfgp.string() + " --out " + out.string());
  CHECK(rc == 0);
  std::string csv = slurp(out / "spectrum.csv");
  int slow = 0;
  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);  // header
  CHECK(line == "re,im,class,mode_hint");
  while (std::getline(ss, line))
    if (line.find(",slow,") != std::string::npos) ++slow;
  CHECK(slow == 4);  // 2N rows for N = 2
  json rep = json::parse(slurp(out / "report.json"));
  CHECK(rep.contains("verdict"));
  CHECK(rep["positive_on_ZY"].get<bool>());
}

TEST_CASE("evolve command writes snapshot records with energy entries") {
  json cfg = single_patch_config();
  cfg["radii"] = {0.1};
  cfg["M"] = 6;
  cfg["evolve"] = {{"T", 0.05}, {"save_stride", 8}, {"kick", {{"mode", 4}, {"amp", 1e-3}}}};
  auto cfgp = write_config("evolve.json", cfg);
  fs::path out = fs::temp_directory_path() / "vpatch_cli_test" / "evolve_out";
  fs::remove_all(out);
  CHECK(run_cli("evolve --config " + cfgp.string() + " --out " + out.string()) == 0);
  std::string jsonl = slurp(out / "trajectory.jsonl");
  std::istringstream ss(jsonl);
  std::string line;
  int records = 0, with_energy = 0;
  while (std::getline(ss, line)) {
    json rec = json::parse(line);
    CHECK(rec.contains("t"));
    CHECK(rec.contains("X"));
    CHECK(rec.contains("beta"));
    CHECK(rec["diagnostics"]["area_drift"].get<double>() < 1e-12);
    if (rec.contains("Ep")) ++with_energy;
    ++records;
  }
  CHECK(records > 3);
  CHECK(with_energy >= 1);
}

TEST_CASE("smooth command emits the profile and the interior grids") {
  json cfg = single_patch_config();
  cfg["mus"] = {1.0};
  cfg["radii"] = {0.1};
  cfg["M"] = 6;
  cfg["tol"] = 1e-9;
  cfg["X0"] = {{0.0, 0.0}};
  cfg["profile"] = {{"lambda", 1.0}, {"kappa", 1.0}, {"n_r", 24}};
  auto cfgp = write_config("smooth.json", cfg);
  fs::path out = fs::temp_directory_path() / "vpatch_cli_test" / "smooth_out";
  fs::remove_all(out);
  CHECK(run_cli("smooth --config " + cfgp.string() + " --out " + out.string()) == 0);
  json prof = json::parse(slurp(out / "profile.json"));
  CHECK(prof["psi0"].get<double>() < -1.0);
  CHECK(prof["nondegeneracy_margin"].get<double>() > 1.0);
  json st = json::parse(slurp(out / "smooth_steady.json"));
  CHECK(st["diagnostics"]["interior_oscillation"][0].get<double>() <= 1e-8);
  CHECK(st["psi_grids"].size() == 1);
}

TEST_CASE("field samples are written on request") {
  json cfg = single_patch_config();
  cfg["field_samples"] = {{0.5, 0.0}, {0.0, 0.6}};
  auto cfgp = write_config("steady_field.json", cfg);
  fs::path out = fs::temp_directory_path() / "vpatch_cli_test" / "field_out";
  fs::remove_all(out);
  CHECK(run_cli("steady --config " + cfgp.string() + " --out " + out.string()) == 0);
  std::string csv = slurp(out / "field.csv");
  CHECK(csv.rfind("x,y,ux,uy\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(fs::exists(out / "stream_0.csv"));
}

TEST_CASE("critical command reports the dipole separation") {
  auto cfgp = write_config("crit.json", pair_config());
  fs::path out = fs::temp_directory_path() / "vpatch_cli_test" / "crit_out";
  int rc = run_cli("critical --config " + cfgp.string() + " --out " + out.string());
  CHECK(rc == 0);
  json rep = json::parse(slurp(out / "critical.json"));
  CHECK(rep["X_star"][0].get<double>() ==
        doctest::Approx(std::sqrt(std::sqrt(5.0) - 2.0)).epsilon(1e-9));
  CHECK(rep["grad_norm"].get<double>() <= 1e-12);
}
