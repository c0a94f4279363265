#pragma once

#include <string>

#include <json.hpp>  // vendored nlohmann/json

#include "vp/linstab.hpp"
#include "vp/smoothprofile.hpp"

namespace vp {

using json = nlohmann::json;

// deterministic decimal formatting used in every artifact
std::string fmt_double(double v);

DomainSpec domain_from_json(const json& j);

json steady_to_json(const SteadyState& st, const VerifyReport& rep);
json critical_to_json(const CriticalPointReport& rep);
json spectrum_report_to_json(const SpectrumReport& rep, const InvariantSplit& split,
                             const PositivityReport& pos);
json profile_to_json(const ProfileSpec& p);

std::string spectrum_csv(const SpectrumReport& rep, const ModeBasis& basis);
std::string trajectory_csv(const PvTrajectory& traj);
std::string boundary_csv(const PatchShape& shape, int n);

// self-contained plots
std::string svg_boundaries(const std::vector<PatchShape>& shapes, double domain_radius);
std::string svg_spectrum(const SpectrumReport& rep);
std::string svg_slopes(const std::vector<ContinuationRecord>& history);

// artifact bookkeeping
class ArtifactWriter {
public:
  explicit ArtifactWriter(std::string outdir);
  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const json& j);
  void finalize();  // writes manifest.json

private:
  std::string outdir_;
  std::vector<std::pair<std::string, uint64_t>> entries_;
};

uint64_t fnv1a64(const std::string& data);

}  // namespace vp
