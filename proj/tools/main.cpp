#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "glmcf/config.hpp"
#include "glmcf/errors.hpp"
#include "glmcf/runner.hpp"

namespace {

std::string resolve_outdir(const std::string& out) {
  if (!out.empty() && out[0] == '/') return out;
  const char* root = std::getenv("GLMCF_OUT_ROOT");
  if (root && *root) return std::string(root) + "/" + out;
  return out;
}

int default_parallelism() {
  const char* env = std::getenv("GLMCF_PARALLELISM");
  if (env && *env) return std::max(1, std::atoi(env));
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted Lagrangian variational calculus and generalized mean curvature flow"};
  app.require_subcommand(1);

  std::string config_path, outdir = ".", a_flag, r_flag;
  unsigned long long seed = 1;
  int parallel = default_parallelism();
  long long n_override = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (flat key = value)");
    sub->add_option("--out", outdir, "output directory");
    sub->add_option("--seed", seed, "random seed for trial functions and perturbations");
    sub->add_option("--N", n_override, "override curve resolution");
  };

  CLI::App* lat = app.add_subcommand("lattice", "flat-torus lattice spectrum");
  add_common(lat);
  lat->add_option("--a", a_flag, "weights, e.g. 1,2,3");
  lat->add_option("--r", r_flag, "torus radius");

  CLI::App* spectrum = app.add_subcommand("spectrum", "weighted Laplacian spectrum of a curve");
  add_common(spectrum);
  CLI::App* variation = app.add_subcommand("variation", "first/second variation checks");
  add_common(variation);
  CLI::App* flowcmd = app.add_subcommand("flow", "generalized Lagrangian mean curvature flow");
  add_common(flowcmd);
  CLI::App* orbitcmd = app.add_subcommand("orbit", "torus orbits in weighted projective space");
  add_common(orbitcmd);
  orbitcmd->add_option("--a", a_flag, "weights, e.g. 1,2");
  orbitcmd->add_option("--r", r_flag, "torus radius for the monotone level");

  CLI::App* sweepcmd = app.add_subcommand("sweep", "run a sweep specification");
  add_common(sweepcmd);
  sweepcmd->add_option("--parallel", parallel, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    glmcf::Config cfg;
    if (!config_path.empty()) cfg = glmcf::Config::parse_file(config_path);
    if (!a_flag.empty()) cfg.set("a", a_flag);
    if (!r_flag.empty()) cfg.set("r", r_flag);
    if (n_override > 0) cfg.set("N", std::to_string(n_override));
    if (cfg.has("seed") && seed == 1) seed = static_cast<unsigned long long>(cfg.get_int("seed"));

    std::string out = resolve_outdir(outdir);
    if (app.got_subcommand(sweepcmd)) {
      return glmcf::runner::sweep(cfg, out, parallel);
    }
    glmcf::runner::RunSpec spec;
    spec.subcommand = app.get_subcommands().front()->get_name();
    spec.config = cfg;
    spec.outdir = out;
    spec.seed = seed;
    return glmcf::runner::run(spec);
  } catch (const glmcf::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
