#pragma once

#include <memory>
#include <string>
#include <vector>

#include "glmcf/ambient.hpp"
#include "glmcf/config.hpp"
#include "glmcf/curve.hpp"

namespace glmcf::runner {

// Exit codes: 0 ok, 2 validation error, 3 numerical terminal error (blowup),
// 4 enumeration budget exceeded.
struct RunSpec {
  std::string subcommand;  // lattice | spectrum | variation | flow | orbit
  Config config;
  std::string outdir = ".";
  unsigned long long seed = 1;
};

int run(const RunSpec& spec);

// Sweep driver; spec list executed with bounded parallelism, summaries merged
// into <outdir>/sweep.csv in input order.
int sweep(const Config& sweep_config, const std::string& outdir, int parallelism);

// Shared builders (also used by the acceptance suite).
std::shared_ptr<ambient::AmbientModel> build_model(const Config& cfg);
immersion::DiscreteCurve build_curve(const Config& cfg,
                                     const std::shared_ptr<ambient::AmbientModel>& model);

}  // namespace glmcf::runner
