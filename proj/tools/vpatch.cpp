// Batch front end: reads a JSON config, runs one of the solver pipelines, and
// writes deterministic artifacts plus a hashed manifest.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "vp/contour.hpp"
#include "vp/jsonio.hpp"

using namespace vp;

namespace {

struct RunConfig {
  json raw;
  GreenEvaluator ev;
  VecX mus;
  std::vector<VecX> radii_schedule;
  int M = 16;
  double tol = 1e-10;
  VecX X0;
  bool symmetric = false;
};

VecX parse_radii_entry(const json& e, int N, const std::string& path) {
  if (e.is_number()) {
    double r = e.get<double>();
    require(r > 0, ErrorCode::ConfigInvalid, path + " must be positive");
    return VecX::Constant(N, r);
  }
  require(e.is_array() && static_cast<int>(e.size()) == N, ErrorCode::ConfigInvalid,
          path + " must be a number or an N-vector");
  VecX r(N);
  for (int i = 0; i < N; ++i) {
    r[i] = e[i].get<double>();
    require(r[i] > 0, ErrorCode::ConfigInvalid,
            path + "[" + std::to_string(i) + "] must be positive");
  }
  return r;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), ErrorCode::ConfigInvalid, "cannot open config: " + path);
  RunConfig cfg;
  try {
    f >> cfg.raw;
  } catch (const std::exception& e) {
    fail(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  require(cfg.raw.contains("domain"), ErrorCode::ConfigInvalid, "domain block missing");
  cfg.ev = build_green_evaluator(domain_from_json(cfg.raw.at("domain")),
                                 cfg.raw.value("bem_nodes", 0));

  require(cfg.raw.contains("mus") && cfg.raw.at("mus").is_array() && !cfg.raw.at("mus").empty(),
          ErrorCode::ConfigInvalid, "mus must be a nonempty array");
  int N = static_cast<int>(cfg.raw.at("mus").size());
  cfg.mus.resize(N);
  for (int i = 0; i < N; ++i) {
    cfg.mus[i] = cfg.raw.at("mus")[i].get<double>();
    require(cfg.mus[i] != 0, ErrorCode::ConfigInvalid, "mus[" + std::to_string(i) + "] is zero");
  }

  if (cfg.raw.contains("radii")) {
    const auto& rr = cfg.raw.at("radii");
    require(rr.is_array() && !rr.empty(), ErrorCode::ConfigInvalid, "radii must be nonempty");
    double last = 1e300;
    for (size_t i = 0; i < rr.size(); ++i) {
      VecX entry = parse_radii_entry(rr[i], N, "radii[" + std::to_string(i) + "]");
      require(entry.maxCoeff() < last * (1 + 1e-12), ErrorCode::ConfigInvalid,
              "radii must be non-increasing along the continuation schedule");
      last = entry.maxCoeff();
      cfg.radii_schedule.push_back(entry);
    }
  }

  cfg.M = cfg.raw.value("M", 16);
  require(cfg.M >= 4 && cfg.M <= 128, ErrorCode::ConfigInvalid, "M out of range");
  cfg.tol = cfg.raw.value("tol", 1e-10);
  require(cfg.tol > 0, ErrorCode::ConfigInvalid, "tol must be positive");
  cfg.symmetric = cfg.raw.value("symmetric", false);

  require(cfg.raw.contains("X0") && static_cast<int>(cfg.raw.at("X0").size()) == N,
          ErrorCode::ConfigInvalid, "X0 must list one [x,y] per vortex");
  cfg.X0.resize(2 * N);
  for (int i = 0; i < N; ++i) {
    const auto& p = cfg.raw.at("X0")[i];
    require(p.is_array() && p.size() == 2, ErrorCode::ConfigInvalid,
            "X0[" + std::to_string(i) + "] must be [x,y]");
    cfg.X0[2 * i] = p[0].get<double>();
    cfg.X0[2 * i + 1] = p[1].get<double>();
  }
  return cfg;
}

SteadyState run_steady(const RunConfig& cfg) {
  require(!cfg.radii_schedule.empty(), ErrorCode::ConfigInvalid, "radii schedule missing");
  SteadyOptions opts;
  opts.M = cfg.M;
  opts.symmetric_axis = cfg.symmetric;
  return solve_steady(cfg.ev, cfg.mus, cfg.radii_schedule, cfg.X0, cfg.tol, opts);
}

json vec_json(const VecX& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

int run(const std::string& command, const RunConfig& cfg, ArtifactWriter& out, bool verbose) {
  if (command == "pv") {
    const auto& block = cfg.raw.value("pv", json::object());
    double T = block.value("T", 10.0), dt = block.value("dt", 0.01);
    require(dt != 0, ErrorCode::ConfigInvalid, "pv.dt must be nonzero");
    VortexConfig vc;
    vc.ev = cfg.ev;
    vc.mu = cfg.mus;
    vc.X = cfg.X0;
    vc.rho = cfg.raw.value("rho", 0.05 * cfg.ev.diameter());
    auto traj = integrate_pv(vc, cfg.X0, T, dt);
    out.write("trajectory.csv", trajectory_csv(traj));
    if (verbose)
      std::cerr << "pv: " << traj.t.size() << " states, H drift "
                << std::abs(traj.H.back() - traj.H.front()) << "\n";
    return 0;
  }

  if (command == "critical") {
    VortexConfig vc;
    vc.ev = cfg.ev;
    vc.mu = cfg.mus;
    vc.X = cfg.X0;
    vc.rho = cfg.raw.value("rho", 0.05 * cfg.ev.diameter());
    CriticalOptions copts;
    copts.symmetric_axis = cfg.symmetric;
    auto rep = find_critical(vc, cfg.X0, cfg.raw.value("tol", 1e-12), copts);
    out.write_json("critical.json", critical_to_json(rep));
    return 0;
  }

  if (command == "steady") {
    auto st = run_steady(cfg);
    auto rep = verify_steady(st);
    out.write_json("steady_state.json", steady_to_json(st, rep));
    auto shapes = st.shapes();
    for (size_t j = 0; j < shapes.size(); ++j)
      out.write("boundary_" + std::to_string(j) + ".csv", boundary_csv(shapes[j], 256));
    // boundary stream constancy diagnostic
    {
      PatchSystem sys = st.system();
      auto vals = boundary_stream_values(sys);
      for (size_t j = 0; j < shapes.size(); ++j) {
        std::string csv = "theta,Psi\n";
        for (int i = 0; i < sys.grid->size(); ++i)
          csv += fmt_double(sys.grid->theta(i)) + "," + fmt_double(vals[j][i]) + "\n";
        out.write("stream_" + std::to_string(j) + ".csv", csv);
      }
      if (cfg.raw.contains("field_samples")) {
        std::vector<Vec2> pts;
        for (const auto& p : cfg.raw.at("field_samples")) {
          require(p.is_array() && p.size() == 2, ErrorCode::ConfigInvalid,
                  "field_samples entries must be [x,y]");
          pts.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        auto us = velocity_field(sys, pts);
        std::string csv = "x,y,ux,uy\n";
        for (size_t i = 0; i < pts.size(); ++i)
          csv += fmt_double(pts[i].x()) + "," + fmt_double(pts[i].y()) + "," +
                 fmt_double(us[i].x()) + "," + fmt_double(us[i].y()) + "\n";
        out.write("field.csv", csv);
      }
    }
    out.write("boundaries.svg", svg_boundaries(shapes, 0.5 * cfg.ev.diameter()));
    out.write("residual_slopes.svg", svg_slopes(st.history));
    if (verbose) std::cerr << "steady: residual " << st.residual_norm << "\n";
    return (rep.steady_ok && rep.area_ok && rep.budget_ok) ? 0 : 4;
  }

  if (command == "stability") {
    auto st = run_steady(cfg);
    auto sys = assemble_L(st);
    auto rep = spectrum_classify(sys, st.radii);
    auto split = invariant_split(sys, st.radii);
    auto pos = positivity_on_ZY(sys, split.SY);
    out.write("spectrum.csv", spectrum_csv(rep, sys.basis));
    out.write_json("report.json", spectrum_report_to_json(rep, split, pos));
    out.write("spectrum.svg", svg_spectrum(rep));
    if (verbose) std::cerr << "stability: verdict " << rep.verdict << "\n";
    bool ok = rep.pairing_defect <= 1e-8 && rep.fast_real_rel <= 1e-8 && pos.positive;
    return ok ? 0 : 4;
  }

  if (command == "evolve") {
    auto st = run_steady(cfg);
    const auto& block = cfg.raw.value("evolve", json::object());
    auto shapes = st.shapes();
    if (block.contains("kick")) {
      int mode = block.at("kick").value("mode", 4);
      double amp = block.at("kick").value("amp", 1e-3);
      for (auto& s : shapes) {
        VecXc c = s.coef();
        require(mode >= 3 && mode <= s.order(), ErrorCode::ConfigInvalid,
                "evolve.kick.mode out of range");
        c[mode] += amp;
        s = s.with_coef(c);
      }
    }
    double rmin = st.radii.minCoeff(), mumax = cfg.mus.cwiseAbs().maxCoeff();
    double dt_bound = 0.1 * two_pi * rmin * rmin / (mumax * (st.M - 1));
    double T = block.value("T", 1.0);
    double dt = block.value("dt", dt_bound);
    EvolveOptions eo;
    eo.save_stride = block.value("save_stride", 16);
    std::string scheme = block.value("scheme", "rk4");
    require(scheme == "rk4" || scheme == "midpoint", ErrorCode::ConfigInvalid,
            "evolve.scheme must be rk4 or midpoint");
    eo.scheme = (scheme == "rk4") ? Scheme::Rk4 : Scheme::ImplicitMidpoint;
    auto traj = evolve(cfg.ev, cfg.mus, shapes, T, dt, eo);
    std::string jsonl;
    for (size_t i = 0; i < traj.t.size(); ++i) {
      json rec;
      rec["t"] = traj.t[i];
      rec["X"] = vec_json(traj.X[i]);
      json betas = json::array();
      for (const auto& b : traj.beta[i]) {
        json bb = json::array();
        for (int m = 3; m < b.size(); ++m) bb.push_back({b[m].real(), b[m].imag()});
        betas.push_back(bb);
      }
      rec["beta"] = betas;
      json diag;
      diag["area_drift"] = traj.area_drift[i].maxCoeff();
      diag["angular_impulse"] = traj.angular_impulse[i];
      rec["diagnostics"] = diag;
      for (size_t e = 0; e < traj.Ep_t.size(); ++e)
        if (traj.Ep_t[e] == traj.t[i]) rec["Ep"] = traj.Ep[e];
      jsonl += rec.dump() + "\n";
    }
    out.write("trajectory.jsonl", jsonl);
    json eng;
    eng["t"] = json::array();
    eng["Ep"] = json::array();
    for (size_t i = 0; i < traj.Ep.size(); ++i) {
      eng["t"].push_back(traj.Ep_t[i]);
      eng["Ep"].push_back(traj.Ep[i]);
    }
    out.write_json("energy.json", eng);
    if (block.value("svg_frames", false)) {
      size_t stride = std::max<size_t>(1, traj.t.size() / 100);  // at most ~100 frames
      for (size_t i = 0; i < traj.t.size(); i += stride) {
        std::vector<PatchShape> frame;
        for (size_t j = 0; j < shapes.size(); ++j)
          frame.emplace_back(st.radii[j], Vec2(traj.X[i][2 * j], traj.X[i][2 * j + 1]),
                             traj.beta[i][j]);
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%05zu.svg", i);
        out.write(name, svg_boundaries(frame, 0.5 * cfg.ev.diameter()));
      }
    }
    return 0;
  }

  if (command == "smooth") {
    const auto& block = cfg.raw.value("profile", json::object());
    ProfileParams pp;
    pp.lambda = block.value("lambda", 1.0);
    pp.kappa = block.value("kappa", 1.0);
    auto profile =
        radial_ground_state(pp, block.value("guess_amplitude", 2.0), block.value("n_r", 32));
    out.write_json("profile.json", profile_to_json(profile));
    require(!cfg.radii_schedule.empty(), ErrorCode::ConfigInvalid, "radii schedule missing");
    SteadyOptions opts;
    opts.M = cfg.M;
    opts.symmetric_axis = cfg.symmetric;
    auto sm = solve_steady_smooth(cfg.ev, cfg.mus, cfg.radii_schedule, cfg.X0, profile,
                                  cfg.raw.value("tol", 1e-9), opts);
    json j;
    j["r"] = vec_json(sm.state.radii);
    j["X"] = vec_json(sm.state.X);
    json betas = json::array();
    for (const auto& b : sm.state.beta) {
      json bb = json::array();
      for (int m = 3; m < b.size(); ++m) bb.push_back({b[m].real(), b[m].imag()});
      betas.push_back(bb);
    }
    j["beta"] = betas;
    json d;
    d["residual_norm"] = sm.state.residual_norm;
    d["interior_oscillation"] = vec_json(sm.interior_osc);
    d["mass"] = vec_json(sm.mass);
    d["boundary_vorticity_max"] = vec_json(sm.boundary_vorticity_max);
    j["diagnostics"] = d;
    json grids = json::array();
    for (const auto& f : sm.psi) {
      json g;
      g["rho"] = vec_json(f.rho);
      g["theta"] = vec_json(f.theta);
      json rows = json::array();
      for (int i = 0; i < f.values.rows(); ++i) {
        json row = json::array();
        for (int k = 0; k < f.values.cols(); ++k) row.push_back(f.values(i, k));
        rows.push_back(row);
      }
      g["psi_tilde"] = rows;
      grids.push_back(g);
    }
    j["psi_grids"] = grids;
    out.write_json("smooth_steady.json", j);
    return sm.interior_osc.maxCoeff() <= 1e-8 ? 0 : 4;
  }

  fail(ErrorCode::ConfigInvalid, "unknown command: " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady vortex patches on bounded planar domains"};
  std::string command, config_path, outdir = "out";
  int threads = 0;
  bool verbose = false;
  app.add_option("command", command, "pv | critical | steady | stability | evolve | smooth")
      ->required();
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", outdir, "output directory");
  app.add_option("--threads", threads, "worker thread count (default: hardware)");
  app.add_flag("--verbose", verbose, "progress notes on stderr");
  CLI11_PARSE(app, argc, argv);

  if (threads > 0) set_default_thread_count(threads);
  try {
    RunConfig cfg = load_config(config_path);
    ArtifactWriter out(outdir);
    int rc = run(command, cfg, out, verbose);
    out.finalize();
    return rc;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigInvalid ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
