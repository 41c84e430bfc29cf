#include "glmcf/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "glmcf/errors.hpp"
#include "glmcf/flow.hpp"
#include "glmcf/io.hpp"
#include "glmcf/lattice.hpp"
#include "glmcf/numerics.hpp"
#include "glmcf/orbit.hpp"
#include "glmcf/projective.hpp"
#include "glmcf/spectral.hpp"

namespace glmcf::runner {

namespace fs = std::filesystem;
using immersion::DiscreteCurve;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string join_ints(const std::vector<long long>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  return os.str();
}

void write_error(const std::string& outdir, const std::string& kind, const std::string& reason) {
  JsonObject err;
  err.set_string("error", kind);
  err.set_string("reason", reason);
  err.write(outdir + "/error.json");
}

std::vector<std::string> lattice_row(const lattice::WeightVector& w,
                                     const lattice::SpectrumReport& rep) {
  return {join_ints(w.a),        num17(w.r),          std::to_string(0) /* placeholder */,
          num17(rep.dSquared),   num17(rep.lambda1),  num17(rep.C),
          rep.equality ? "true" : "false", rep.restrictedEqualsFull ? "true" : "false"};
}

int run_lattice(const RunSpec& spec) {
  lattice::WeightVector w;
  w.a = spec.config.get_int_list("a");
  w.r = spec.config.get_double("r", 1.0);
  w.validate();
  long long cap = spec.config.get_int("node_cap", 10'000'000);
  lattice::TorusLattice lat = lattice::build_lattice(w);
  lattice::SpectrumReport rep = lattice::spectrum_report(w, cap);

  CsvWriter csv(spec.outdir + "/lattice.csv",
                {"a", "r", "S", "d2", "lambda1", "C", "equality", "restricted_equals_full"},
                ';');
  auto row = lattice_row(w, rep);
  row[2] = std::to_string(lat.S);
  csv.row(row);

  std::cout << "lambda1=" << num_short(rep.lambda1) << " C=" << num_short(rep.C)
            << " stable=" << (rep.stable ? "true" : "false")
            << " equality=" << (rep.equality ? "true" : "false") << "\n";
  return 0;
}

DiscreteCurve perturb_curve(const Config& cfg, DiscreteCurve curve) {
  std::vector<double> amps;
  std::vector<long long> modes;
  if (cfg.has("perturb_amps")) {
    amps = cfg.get_double_list("perturb_amps");
    modes = cfg.get_int_list("perturb_modes");
    if (amps.size() != modes.size()) {
      throw ValidationError("perturb_amps and perturb_modes must have equal length");
    }
  } else if (cfg.get_double("perturb_amp", 0.0) != 0.0) {
    amps.push_back(cfg.get_double("perturb_amp"));
    modes.push_back(cfg.get_int("perturb_mode", 2));
  }
  if (!amps.empty()) {
    double phase = cfg.get_double("perturb_phase", 0.0);
    auto geom = immersion::compute_geometry(curve);
    double L = 0.0;
    for (double l : geom.ell) L += l;
    std::vector<double> u = immersion::sample_by_arclength(geom, [&](double s) {
      double v = 0.0;
      for (std::size_t m = 0; m < amps.size(); ++m) {
        v += amps[m] * std::sin(static_cast<double>(modes[m]) * kTwoPi * s / L + phase);
      }
      return v;
    });
    if (cfg.get_bool("essential", false)) {
      auto eigen = spectral::first_eigenvalue(immersion::assemble_laplacian(geom));
      auto field = immersion::make_essential_perturbation(geom, eigen, u);
      curve = immersion::displace(curve, field.V, 1.0);
    } else {
      curve = immersion::apply_hamiltonian(curve, u);
    }
  }
  double scale = cfg.get_double("perturb_scale", 1.0);
  if (scale != 1.0) {
    for (auto& n : curve.nodes) n.xy *= scale;
  }
  if (cfg.get_bool("holonomy_fix", false)) {
    curve = immersion::holonomy_correct(curve);
  }
  return curve;
}

flow::FlowConfig flow_config_from(const Config& cfg) {
  flow::FlowConfig fc;
  fc.dt_safety = cfg.get_double("dt_safety", 0.4);
  if (!(fc.dt_safety > 0.0 && fc.dt_safety <= 0.5)) {
    throw ValidationError("dt_safety must lie in (0, 0.5]");
  }
  fc.dt_cap = cfg.get_double("dt_cap", 1e300);
  fc.max_time = cfg.get_double("max_time", 10.0);
  fc.stop_tol_kmax = cfg.get_double("stop_tol_kmax", 1e-6);
  fc.diag_every = static_cast<int>(cfg.get_int("diag_every", 25));
  fc.resample_ratio = cfg.get_double("resample_ratio", 1.5);
  fc.exactness_projection = cfg.get_bool("exactness_projection", false);
  fc.projection_every = static_cast<int>(cfg.get_int("projection_every", 25));
  fc.exact_tol = cfg.get_double("exact_tol", 1e-5);
  fc.dt_min = cfg.get_double("dt_min", 1e-13);
  fc.rate_fit_window = cfg.get_double("rate_fit_window", 0.3);
  fc.rate_fit_threshold = cfg.get_double("rate_fit_threshold", 1e-3);
  fc.blowup_b = cfg.get_double("blowup_b", 1e6);
  if (cfg.has("snapshot_times")) fc.snapshot_times = cfg.get_double_list("snapshot_times");
  return fc;
}

std::string cell(double v) { return num17(v); }

void write_trace(const std::string& path, const flow::FlowTrace& trace) {
  CsvWriter csv(path, {"t", "vol_f", "k_l2", "lambda1", "max_b", "max_grad_b", "hol_alpha_k",
                       "angle_resid", "dl2_slack", "ef_resid"});
  for (const auto& r : trace.samples) {
    csv.row({cell(r.t), cell(r.vol_f), cell(r.k_l2), cell(r.lambda1), cell(r.max_b),
             cell(r.max_grad_b), cell(r.hol_alpha_k),
             r.angle_skipped ? "nan" : cell(r.angle_resid),
             r.dl2_skipped ? "nan" : cell(r.dl2_slack),
             r.ef_skipped ? "nan" : cell(r.ef_resid)});
  }
}

void write_snapshot(const std::string& outdir, int index, double t, const DiscreteCurve& curve) {
  char name[64];
  std::snprintf(name, sizeof(name), "snapshot_%03d", index);
  CsvWriter csv(outdir + "/" + name + ".csv", {"index", "chart", "x", "y"});
  for (int i = 0; i < curve.N(); ++i) {
    csv.row({std::to_string(i), std::to_string(curve.nodes[i].chart),
             num17(curve.nodes[i].xy.x()), num17(curve.nodes[i].xy.y())});
  }
  JsonObject hdr;
  hdr.set_string("model", curve.model->name());
  hdr.set("N", curve.N());
  hdr.set("time", t);
  hdr.write(outdir + "/" + name + ".json");
}

int run_flow_cmd(const RunSpec& spec) {
  auto model = build_model(spec.config);
  DiscreteCurve curve = build_curve(spec.config, model);
  flow::FlowConfig fc = flow_config_from(spec.config);

  int snap_index = 0;
  DiscreteCurve final_curve;
  flow::FlowTrace trace = flow::run_flow(
      curve, fc, &final_curve, [&](double t, const DiscreteCurve& c) {
        write_snapshot(spec.outdir, snap_index++, t, c);
      });

  write_trace(spec.outdir + "/trace.csv", trace);
  JsonObject summary;
  summary.set_string("status", flow::to_string(trace.status));
  summary.set("fitted_rate", trace.rate_fitted ? trace.fitted_rate : 0.0);
  summary.set("predicted_rate", trace.predicted_rate);
  summary.set("lambda1_limit", trace.lambda1_limit);
  summary.set("t_end", trace.t_end);
  summary.set("final_max_k", trace.final_max_k);
  summary.set("rate_fitted", trace.rate_fitted);
  summary.write(spec.outdir + "/summary.json");

  std::cout << "flow status=" << flow::to_string(trace.status) << " t_end=" << num_short(trace.t_end)
            << " max_k=" << num_short(trace.final_max_k) << "\n";
  if (trace.status == flow::Status::blowup) {
    write_error(spec.outdir, "blowup", trace.message.empty() ? "flow blowup" : trace.message);
    return 3;
  }
  return 0;
}

int run_spectrum(const RunSpec& spec) {
  auto model = build_model(spec.config);
  DiscreteCurve curve = build_curve(spec.config, model);
  auto geom = immersion::compute_geometry(curve);
  auto eigen = spectral::first_eigenvalue(immersion::assemble_laplacian(geom));
  double C = model->einstein_constant();
  auto verdict = spectral::stability_verdict(eigen, C);

  JsonObject out;
  out.set("lambda1", eigen.lambda1);
  out.set("gap", eigen.gap);
  out.set("C", C);
  out.set_string("verdict", spectral::to_string(verdict));
  out.set("residual", eigen.residual);
  out.set("max_k", geom.maxK);  // caller-attested f-minimality, recorded
  out.set("simple", eigen.simple);
  out.write(spec.outdir + "/spectrum.json");
  std::cout << "lambda1=" << num_short(eigen.lambda1) << " C=" << num_short(C)
            << " verdict=" << spectral::to_string(verdict) << "\n";
  return 0;
}

int run_variation(const RunSpec& spec) {
  auto model = build_model(spec.config);
  DiscreteCurve curve = build_curve(spec.config, model);
  auto geom = immersion::compute_geometry(curve);
  int trials = static_cast<int>(spec.config.get_int("trials", 20));
  Rng rng(spec.seed);

  double L = 0.0;
  for (double l : geom.ell) L += l;
  double max_err = 0.0;
  for (int k = 0; k < trials; ++k) {
    // random band-limited Hamiltonian potential
    std::vector<double> a(8), b(8);
    for (int m = 0; m < 8; ++m) {
      a[m] = rng.normal() / ((m + 1.0) * (m + 1.0));
      b[m] = rng.normal() / ((m + 1.0) * (m + 1.0));
    }
    std::vector<double> u = immersion::sample_by_arclength(geom, [&](double s) {
      double v = 0.0;
      for (int m = 0; m < 8; ++m) {
        v += a[m] * std::cos((m + 1) * kTwoPi * s / L) + b[m] * std::sin((m + 1) * kTwoPi * s / L);
      }
      return v;
    });
    auto field = immersion::build_hamiltonian_field(geom, u);
    max_err = std::max(max_err, immersion::first_variation_check(curve, field));
  }

  JsonObject out;
  out.set("first_variation_max_rel_err", max_err);
  out.set("trials", trials);
  out.set("max_k", geom.maxK);
  out.set("vol_f", geom.volF);
  out.set("holonomy", geom.holonomy);
  out.write(spec.outdir + "/variation.json");
  std::cout << "first_variation_max_rel_err=" << num_short(max_err) << "\n";
  return 0;
}

int run_orbit(const RunSpec& spec) {
  std::vector<long long> a = spec.config.get_int_list("a");
  double c;
  if (spec.config.has("level")) {
    c = spec.config.get_double("level");
  } else {
    double r = spec.config.get_double("r", 1.0);
    double sum = 0.0;
    for (long long ai : a) sum += static_cast<double>(ai);
    c = -r * r / 2.0 * sum;  // the monotone level of the radius-r torus
  }
  projective::WeightedProjective model(a, c);

  orbit::TorusOrbit orb;
  orb.model = &model;
  std::vector<double> rho;
  if (spec.config.has("rho")) {
    rho = spec.config.get_double_list("rho");
  } else {
    double r = spec.config.get_double("r", 1.0);
    rho.assign(a.size(), r * r);
  }
  orb.rho = Eigen::Map<Eigen::VectorXd>(rho.data(), static_cast<int>(rho.size()));
  orb.validate();

  long long steps = spec.config.get_int("steps", 0);
  double dt = spec.config.get_double("dt", 1e-3);

  auto data = orbit::orbit_generalized_mean_curvature(orb);
  JsonObject out;
  out.set("k_norm", data.k_norm);
  out.set("delta_f_alpha", std::abs(data.delta_f_alpha));
  out.set("C", model.einstein_constant());
  out.set("log_weighted_volume", data.log_weighted_volume);
  for (int s = 0; s < data.periods.size(); ++s) {
    out.set("period_" + std::to_string(s + 1), data.periods(s));
  }
  out.write(spec.outdir + "/orbit.json");

  if (steps > 0) {
    std::vector<std::string> cols = {"t"};
    for (std::size_t j = 0; j < a.size(); ++j) cols.push_back("rho_" + std::to_string(j + 1));
    cols.push_back("k_norm");
    for (int s = 0; s < data.periods.size(); ++s) cols.push_back("period_" + std::to_string(s + 1));
    CsvWriter csv(spec.outdir + "/orbit_trace.csv", cols);
    double t = 0.0;
    orbit::TorusOrbit cur = orb;
    for (long long k = 0; k <= steps; ++k) {
      auto d = orbit::orbit_generalized_mean_curvature(cur);
      std::vector<std::string> row = {num17(t)};
      for (int j = 0; j < cur.rho.size(); ++j) row.push_back(num17(cur.rho(j)));
      row.push_back(num17(d.k_norm));
      for (int s = 0; s < d.periods.size(); ++s) row.push_back(num17(d.periods(s)));
      csv.row(row);
      if (k < steps) {
        cur = orbit::step_orbit(cur, dt);
        t += dt;
      }
    }
  }
  std::cout << "orbit k_norm=" << num_short(data.k_norm)
            << " delta_f_alpha=" << num_short(std::abs(data.delta_f_alpha)) << "\n";
  return 0;
}

}  // namespace

std::shared_ptr<ambient::AmbientModel> build_model(const Config& cfg) {
  std::string name = cfg.get_string("model");
  double C = cfg.get_double("C", 1.0);
  return ambient::make_model(name, C, cfg.get_string("profile", ""),
                             cfg.get_string("profile_file", ""));
}

DiscreteCurve build_curve(const Config& cfg,
                          const std::shared_ptr<ambient::AmbientModel>& model) {
  auto* conf = dynamic_cast<ambient::ConformalModel*>(model.get());
  if (!conf) throw ValidationError("curves require a complex-dimension-1 chart model");
  int N = static_cast<int>(cfg.get_int("N", 256));
  std::string kind = cfg.get_string("curve", "chart_circle");
  DiscreteCurve curve;
  if (kind == "chart_circle" || kind == "circle") {
    curve = immersion::make_chart_circle(conf, cfg.get_double("radius", 1.0), N);
  } else if (kind == "latitude") {
    auto* warped = dynamic_cast<ambient::WarpedSphere*>(model.get());
    if (!warped) throw ValidationError("latitude curves require the warped sphere model");
    curve = immersion::make_latitude(warped, cfg.get_double("theta", std::numbers::pi / 2), N);
  } else if (kind == "great_circle") {
    curve = immersion::make_chart_circle(conf, 1.0, N);
  } else {
    throw ValidationError("unknown curve kind: " + kind);
  }
  return perturb_curve(cfg, curve);
}

int run(const RunSpec& spec) {
  try {
    fs::create_directories(spec.outdir);
    if (spec.subcommand == "lattice") return run_lattice(spec);
    if (spec.subcommand == "spectrum") return run_spectrum(spec);
    if (spec.subcommand == "variation") return run_variation(spec);
    if (spec.subcommand == "flow") return run_flow_cmd(spec);
    if (spec.subcommand == "orbit") return run_orbit(spec);
    throw ValidationError("unknown subcommand: " + spec.subcommand);
  } catch (const ValidationError& e) {
    write_error(spec.outdir, "validation", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EnumerationBudgetError& e) {
    write_error(spec.outdir, "enumeration_budget", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const NumericalError& e) {
    write_error(spec.outdir, "numerical", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

int sweep(const Config& sweep_config, const std::string& outdir, int parallelism) {
  fs::create_directories(outdir);
  std::string type = sweep_config.get_string("type", "runs");

  if (type == "lattice_exhaustive") {
    // every a = (1, a2..a_{n+1}) with entries <= amax and n <= nmax
    long long amax = sweep_config.get_int("amax", 6);
    long long nmax = sweep_config.get_int("nmax", 5);
    double r = sweep_config.get_double("r", 1.0);
    long long cap = sweep_config.get_int("node_cap", 10'000'000);
    CsvWriter csv(outdir + "/sweep.csv",
                  {"a", "r", "S", "d2", "lambda1", "C", "equality", "restricted_equals_full"},
                  ';');
    long long count = 0;
    for (long long n = 1; n <= nmax; ++n) {
      std::vector<long long> tail(n, 1);
      while (true) {
        lattice::WeightVector w;
        w.a.assign(1, 1);
        w.a.insert(w.a.end(), tail.begin(), tail.end());
        w.r = r;
        lattice::TorusLattice lat = lattice::build_lattice(w);
        lattice::SpectrumReport rep = lattice::spectrum_report(w, cap);
        auto row = lattice_row(w, rep);
        row[2] = std::to_string(lat.S);
        csv.row(row);
        ++count;
        // odometer over the tail entries
        int pos = static_cast<int>(n) - 1;
        while (pos >= 0 && tail[pos] == amax) tail[pos--] = 1;
        if (pos < 0) break;
        ++tail[pos];
      }
    }
    std::cout << "lattice sweep rows=" << count << "\n";
    return 0;
  }

  if (type == "runs") {
    std::vector<std::pair<std::string, std::string>> entries;  // name, config path
    for (const auto& [key, value] : sweep_config.items()) {
      if (key.rfind("run", 0) == 0 && key != "runs") entries.emplace_back(key, value);
    }
    if (entries.empty()) throw ValidationError("sweep: empty spec list");

    std::vector<int> codes(entries.size(), 0);
    std::vector<std::string> summaries(entries.size());
    std::size_t next = 0;
    std::mutex mtx;
    auto worker = [&]() {
      while (true) {
        std::size_t idx;
        {
          std::lock_guard<std::mutex> lock(mtx);
          if (next >= entries.size()) return;
          idx = next++;
        }
        RunSpec rs;
        try {
          Config cfg = Config::parse_file(entries[idx].second);
          rs.subcommand = cfg.get_string("subcommand");
          rs.config = cfg;
          rs.outdir = outdir + "/" + entries[idx].first;
          rs.seed = static_cast<unsigned long long>(cfg.get_int("seed", 1));
          codes[idx] = run(rs);
          summaries[idx] = rs.subcommand;
        } catch (const std::exception& e) {
          codes[idx] = 2;
          summaries[idx] = std::string("error: ") + e.what();
        }
      }
    };
    int nthreads = std::max(1, parallelism);
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    CsvWriter csv(outdir + "/sweep.csv", {"name", "subcommand", "exit"});
    bool any_fail = false;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      csv.row({entries[i].first, summaries[i], std::to_string(codes[i])});
      if (codes[i] != 0) any_fail = true;
    }
    return any_fail ? 1 : 0;
  }

  throw ValidationError("unknown sweep type: " + type);
}

}  // namespace glmcf::runner
