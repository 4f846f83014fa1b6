#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fluidq/ctmc.hpp"
#include "fluidq/netmodel.hpp"
#include "fluidq/regions.hpp"
#include "fluidq/sim.hpp"
#include "fluidq/stability.hpp"

namespace fluidq {

struct AnalysisSettings {
  CertificateSettings cert;
  double bisect_tol = 0.5;  // veh/hr
  OracleSettings oracle;
  // Optional externally supplied certificate to audit against the
  // mode-wise inequality (reported, never trusted).
  std::optional<std::vector<double>> audit_alpha;
  std::optional<double> audit_beta;
};

// One scenario file drives every command. Sections: [network], [generator],
// required; [analysis], [sim] optional with defaults.
struct Scenario {
  NetworkParams network;
  GeneratorMatrix generator;
  AnalysisSettings analysis;
  SimSettings sim;
  std::vector<std::string> warnings;  // collected at load (non-fatal)
};

Scenario parse_scenario(const std::string& text, const std::string& source_name);
Scenario load_scenario(const std::string& path);

// Canonical text form; parse(serialize(s)) reproduces s exactly.
std::string serialize_scenario(const Scenario& s);

}  // namespace fluidq
