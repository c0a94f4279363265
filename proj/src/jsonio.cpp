#include "vp/jsonio.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace vp {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

DomainSpec domain_from_json(const json& j) {
  require(j.is_object() && j.contains("kind"), ErrorCode::ConfigInvalid, "domain.kind missing");
  std::string kind = j.at("kind").get<std::string>();
  DomainSpec spec;
  if (kind == "disk") {
    spec.kind = DomainKind::AnalyticDisk;
    spec.radius = j.value("radius", 1.0);
    require(spec.radius > 0, ErrorCode::ConfigInvalid, "domain.radius must be positive");
    spec.circulations = VecX::Zero(0);
  } else if (kind == "annulus") {
    spec.kind = DomainKind::AnalyticAnnulus;
    require(j.contains("inner_radius"), ErrorCode::ConfigInvalid,
            "domain.inner_radius missing");
    spec.inner_radius = j.at("inner_radius").get<double>();
    require(spec.inner_radius > 0 && spec.inner_radius < 1, ErrorCode::ConfigInvalid,
            "domain.inner_radius must lie in (0,1)");
    spec.circulations = VecX::Constant(1, 0.0);
    if (j.contains("circulations")) {
      auto c = j.at("circulations");
      require(c.is_array() && c.size() == 1, ErrorCode::ConfigInvalid,
              "domain.circulations must have one entry");
      spec.circulations[0] = c[0].get<double>();
    }
  } else if (kind == "bem") {
    spec.kind = DomainKind::Bem;
    require(j.contains("curves") && j.at("curves").is_array() && !j.at("curves").empty(),
            ErrorCode::ConfigInvalid, "domain.curves missing");
    for (const auto& curve : j.at("curves")) {
      std::vector<Vec2> pts;
      for (const auto& p : curve) {
        require(p.is_array() && p.size() == 2, ErrorCode::ConfigInvalid,
                "domain.curves entries must be [x,y] pairs");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      spec.curves.push_back(std::move(pts));
    }
    int n = static_cast<int>(spec.curves.size()) - 1;
    spec.circulations = VecX::Zero(n);
    if (j.contains("circulations")) {
      auto c = j.at("circulations");
      require(static_cast<int>(c.size()) == n, ErrorCode::ConfigInvalid,
              "domain.circulations length must match interior curves");
      for (int i = 0; i < n; ++i) spec.circulations[i] = c[i].get<double>();
    }
  } else {
    fail(ErrorCode::ConfigInvalid, "domain.kind must be disk, annulus, or bem");
  }
  return spec;
}

namespace {

json vecx(const VecX& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json beta_json(const VecXc& c) {
  json a = json::array();
  for (int m = 3; m < c.size(); ++m) a.push_back({c[m].real(), c[m].imag()});
  return a;
}

}  // namespace

json steady_to_json(const SteadyState& st, const VerifyReport& rep) {
  json j;
  j["r"] = vecx(st.radii);
  j["X"] = vecx(st.X);
  json betas = json::array();
  for (const auto& b : st.beta) betas.push_back(beta_json(b));
  j["beta"] = betas;
  json shapes = json::array();
  auto shp = st.shapes();
  for (size_t k = 0; k < shp.size(); ++k) {
    json sj;
    sj["r"] = shp[k].r();
    sj["x"] = {shp[k].center().x(), shp[k].center().y()};
    sj["beta"] = beta_json(shp[k].coef());
    shapes.push_back(sj);
  }
  j["shapes"] = shapes;  // actual-scale coefficients
  j["M"] = st.M;
  j["symmetric"] = st.symmetric;
  json d;
  d["residual_norm"] = st.residual_norm;
  d["boundary_stream_oscillation"] = vecx(rep.stream_osc);
  d["area_error"] = vecx(rep.area_error);
  d["vorticity_budget_error"] = vecx(rep.budget_error);
  d["mode3_amplitude"] = st.mode3_amplitude;
  json hist = json::array();
  for (const auto& h : st.history)
    hist.push_back({{"radii", vecx(h.radii)},
                    {"newton_iters", h.newton_iters},
                    {"residual_norm", h.residual_norm},
                    {"beta_norm", h.beta_norm}});
  d["continuation"] = hist;
  j["diagnostics"] = d;
  return j;
}

json critical_to_json(const CriticalPointReport& rep) {
  json j;
  j["X_star"] = vecx(rep.X_star);
  j["grad_norm"] = rep.grad_norm;
  j["hessian_eigs"] = vecx(rep.hessian_eigs);
  j["nondegenerate"] = rep.nondegenerate;
  j["definite"] = rep.definite == 1 ? "positive" : (rep.definite == -1 ? "negative" : "indefinite");
  j["iterations"] = rep.iterations;
  return j;
}

json spectrum_report_to_json(const SpectrumReport& rep, const InvariantSplit& split,
                             const PositivityReport& pos) {
  json j;
  j["verdict"] = rep.verdict;
  j["slow_deviation"] = rep.slow_dev;
  j["fast_min_abs"] = rep.fast_min_abs;
  j["fast_real_rel"] = rep.fast_real_rel;
  j["pairing_defect"] = rep.pairing_defect;
  j["gap_ratio"] = rep.gap_ratio;
  j["gap_position"] = rep.gap_position;
  j["graph_norm_S0"] = split.norm_S0;
  j["graph_norm_SY"] = split.norm_SY;
  j["invariance_residual_S0"] = split.invariance_S0;
  j["invariance_residual_SY"] = split.invariance_SY;
  j["graph_fixed_point_contraction"] = split.contraction;
  j["positivity_margin"] = pos.min_quadratic;
  j["positive_on_ZY"] = pos.positive;
  return j;
}

json profile_to_json(const ProfileSpec& p) {
  json j;
  j["lambda"] = p.params.lambda;
  j["kappa"] = p.params.kappa;
  j["rho"] = vecx(p.rho);
  j["psi"] = vecx(p.psi);
  j["psi0"] = p.psi0;
  j["ode_residual"] = p.ode_residual;
  j["nondegeneracy_margin"] = p.nondeg_margin;
  j["modes_checked"] = p.modes_checked;
  return j;
}

std::string spectrum_csv(const SpectrumReport& rep, const ModeBasis& basis) {
  std::string out = "re,im,class,mode_hint\n";
  int dim = static_cast<int>(rep.eigenvalues.size());
  // mode hint from the nearest Kelvin index by position in the sorted order
  std::vector<int> order(dim);
  for (int i = 0; i < dim; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(rep.eigenvalues[a]) < std::abs(rep.eigenvalues[b]);
  });
  std::vector<int> hint(dim, 0);
  for (int i = 2 * basis.N; i < dim; ++i)
    hint[order[i]] = 2 + (i - 2 * basis.N) / (2 * basis.N);
  for (int i = 0; i < dim; ++i) {
    out += fmt_double(rep.eigenvalues[i].real()) + "," + fmt_double(rep.eigenvalues[i].imag()) +
           "," + (rep.cls[i] == 0 ? "slow" : "fast") + "," + std::to_string(hint[i]) + "\n";
  }
  return out;
}

std::string trajectory_csv(const PvTrajectory& traj) {
  std::string out = "t";
  int N = traj.X.empty() ? 0 : static_cast<int>(traj.X[0].size()) / 2;
  for (int j = 1; j <= N; ++j)
    out += ",x" + std::to_string(j) + ",y" + std::to_string(j);
  out += ",H\n";
  for (size_t i = 0; i < traj.t.size(); ++i) {
    out += fmt_double(traj.t[i]);
    for (int c = 0; c < 2 * N; ++c) out += "," + fmt_double(traj.X[i][c]);
    out += "," + fmt_double(traj.H[i]) + "\n";
  }
  return out;
}

std::string boundary_csv(const PatchShape& shape, int n) {
  std::string out = "theta,x,y\n";
  for (int i = 0; i < n; ++i) {
    double th = two_pi * i / n;
    auto [p, t] = boundary_eval(shape, th);
    (void)t;
    out += fmt_double(th) + "," + fmt_double(p.x()) + "," + fmt_double(p.y()) + "\n";
  }
  return out;
}

namespace {

std::string svg_head(double w, double h) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                "viewBox=\"0 0 %g %g\">\n",
                w, h, w, h);
  return buf;
}

}  // namespace

std::string svg_boundaries(const std::vector<PatchShape>& shapes, double domain_radius) {
  double W = 480, C = W / 2;
  double scale = 0.45 * W / domain_radius;
  std::string s = svg_head(W, W);
  s += "<circle cx=\"" + fmt_double(C) + "\" cy=\"" + fmt_double(C) + "\" r=\"" +
       fmt_double(domain_radius * scale) + "\" fill=\"none\" stroke=\"black\"/>\n";
  const char* colors[] = {"crimson", "navy", "seagreen", "darkorange", "purple"};
  for (size_t j = 0; j < shapes.size(); ++j) {
    s += "<polyline fill=\"none\" stroke=\"";
    s += colors[j % 5];
    s += "\" points=\"";
    int n = 128;
    for (int i = 0; i <= n; ++i) {
      auto [p, t] = boundary_eval(shapes[j], two_pi * i / n);
      (void)t;
      s += fmt_double(C + scale * p.x()) + "," + fmt_double(C - scale * p.y()) + " ";
    }
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string svg_spectrum(const SpectrumReport& rep) {
  double W = 480, C = W / 2;
  double m = 1e-12;
  for (int i = 0; i < rep.eigenvalues.size(); ++i)
    m = std::max({m, std::abs(rep.eigenvalues[i].real()), std::abs(rep.eigenvalues[i].imag())});
  double scale = 0.45 * W / m;
  std::string s = svg_head(W, W);
  s += "<line x1=\"0\" y1=\"" + fmt_double(C) + "\" x2=\"" + fmt_double(W) + "\" y2=\"" +
       fmt_double(C) + "\" stroke=\"gray\"/>\n";
  s += "<line x1=\"" + fmt_double(C) + "\" y1=\"0\" x2=\"" + fmt_double(C) + "\" y2=\"" +
       fmt_double(W) + "\" stroke=\"gray\"/>\n";
  for (int i = 0; i < rep.eigenvalues.size(); ++i) {
    cplx l = rep.eigenvalues[i];
    s += "<circle cx=\"" + fmt_double(C + scale * l.real()) + "\" cy=\"" +
         fmt_double(C - scale * l.imag()) + "\" r=\"3\" fill=\"" +
         (rep.cls[i] == 0 ? "crimson" : "navy") + "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string svg_slopes(const std::vector<ContinuationRecord>& history) {
  double W = 480, H = 360, pad = 40;
  std::string s = svg_head(W, H);
  if (history.size() >= 2) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    std::vector<Vec2> pts;
    for (const auto& h : history) {
      if (h.beta_norm <= 0) continue;
      double x = std::log10(h.radii.maxCoeff());
      double y = std::log10(h.beta_norm);
      pts.emplace_back(x, y);
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    auto mapx = [&](double x) {
      return pad + (W - 2 * pad) * (x - xmin) / std::max(1e-12, xmax - xmin);
    };
    auto mapy = [&](double y) {
      return H - pad - (H - 2 * pad) * (y - ymin) / std::max(1e-12, ymax - ymin);
    };
    s += "<polyline fill=\"none\" stroke=\"crimson\" points=\"";
    for (const auto& p : pts) s += fmt_double(mapx(p.x())) + "," + fmt_double(mapy(p.y())) + " ";
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

ArtifactWriter::ArtifactWriter(std::string outdir) : outdir_(std::move(outdir)) {
  std::filesystem::create_directories(outdir_);
}

void ArtifactWriter::write(const std::string& name, const std::string& content) {
  std::ofstream f(outdir_ + "/" + name, std::ios::binary);
  require(f.good(), ErrorCode::ConfigInvalid, "output directory not writable: " + outdir_);
  f << content;
  entries_.emplace_back(name, fnv1a64(content));
}

void ArtifactWriter::write_json(const std::string& name, const json& j) {
  write(name, j.dump(2) + "\n");
}

void ArtifactWriter::finalize() {
  std::sort(entries_.begin(), entries_.end());
  json files = json::array();
  for (const auto& [name, hash] : entries_) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, hash);
    files.push_back({{"path", name}, {"fnv1a64", buf}});
  }
  json m;
  m["files"] = files;
  std::ofstream f(outdir_ + "/manifest.json", std::ios::binary);
  f << m.dump(2) << "\n";
}

}  // namespace vp
