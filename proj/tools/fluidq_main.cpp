#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fluidq/error.hpp"
#include "fluidq/report.hpp"

namespace {

// Grid spec: either a comma list "0,100,200" or a range "lo..hi:step".
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  auto range_pos = spec.find("..");
  if (range_pos != std::string::npos) {
    auto colon = spec.find(':', range_pos);
    if (colon == std::string::npos)
      throw CLI::ValidationError("--grid", "range form is lo..hi:step");
    double lo = std::stod(spec.substr(0, range_pos));
    double hi = std::stod(spec.substr(range_pos + 2, colon - range_pos - 2));
    double step = std::stod(spec.substr(colon + 1));
    if (step <= 0) throw CLI::ValidationError("--grid", "step must be positive");
    for (double x = lo; x <= hi + 1e-12; x += step) out.push_back(x);
    return out;
  }
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto comma = spec.find(',', start);
    std::string tok = spec.substr(start, comma == std::string::npos
                                             ? std::string::npos
                                             : comma - start);
    if (!tok.empty()) out.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability analysis for fluid queue networks with Markov-switching capacities"};
  app.require_subcommand(1);

  fluidq::RunOptions opts;
  std::string grid_spec;
  std::uint64_t seed = 0;
  double tol = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", opts.scenario_path, "scenario file")->required();
    sub->add_option("--out", opts.out_dir, "output directory (default: .)");
    sub->add_option("--seed", seed, "override the scenario RNG seed");
    sub->add_option("--tol", tol, "bisection tolerance [veh/hr]");
  };

  for (const char* name : {"steady-state", "check", "certify", "max-throughput",
                           "simulate", "stationary-dist"}) {
    add_common(app.add_subcommand(name));
  }
  CLI::App* sw = app.add_subcommand("sweep");
  add_common(sw);
  std::string axis;
  sw->add_option("--axis", axis, "sweep axis: mu or delta_c")->required();
  sw->add_option("--grid", grid_spec, "values: a,b,c or lo..hi:step")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* sub = app.get_subcommands().front();
  opts.command = sub->get_name();
  if (sub->count("--seed") > 0) opts.seed = seed;
  if (sub->count("--tol") > 0) opts.tol = tol;
  if (opts.command == "sweep") {
    opts.axis = axis;
    try {
      opts.grid = parse_grid(grid_spec);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: bad --grid: %s\n", e.what());
      return 2;
    }
  }
  return fluidq::run_command(opts);
}
