#pragma once

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gds/app/config.hpp"
#include "gds/app/models.hpp"
#include "gds/evidence/marglik.hpp"
#include "gds/math/densities.hpp"
#include "gds/sampler/run_gds.hpp"
#include "gds/simulate/designs.hpp"

namespace gds::app {

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::ofstream open_output(const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) fs::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

inline void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("error while writing '" + path + "'");
}

inline json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) rows.push_back(vector_json(m.row(r).transpose()));
  return rows;
}

// ---------------------------------------------------------------- simulate

inline SimulatedData simulate_design(const ModelParams& m, std::uint64_t seed) {
  const Index t = default_t_per_unit(m);
  if (m.name == "hier_gauss") {
    HierGaussDesign d;
    d.n = m.n > 0 ? m.n : d.n;
    d.k = m.k > 0 ? m.k : d.k;
    d.t_per_unit = t;
    return simulate_hier_gauss(d, seed);
  }
  if (m.name == "lin_reg") {
    LinRegDesign d;
    d.n = m.n > 0 ? m.n : d.n;
    d.k = m.k > 0 ? m.k : d.k;
    d.t_per_unit = t;
    return simulate_lin_reg(d, seed);
  }
  throw ConfigError("simulate supports hier_gauss and lin_reg, not '" + m.name + "'");
}

/// Writes the dataset to `cfg.out` and a `.meta.json` sidecar with seed, truth, and config hash.
inline void cmd_simulate(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("simulate needs an output path (--out)");
  const SimulatedData sim = simulate_design(cfg.model, cfg.seed);

  auto out = open_output(cfg.out);
  write_dataset_csv(out, sim.data);
  finish_output(out, cfg.out);

  json truth{{"beta", vector_json(sim.beta)}, {"noise_var", sim.noise_var}};
  if (cfg.model.name == "hier_gauss") {
    truth = {{"beta_bar", vector_json(sim.beta)}, {"Omega", matrix_json(sim.omega)},
             {"unit_betas", matrix_json(sim.unit_betas)}, {"noise_var", sim.noise_var}};
  }
  const json meta{{"seed", cfg.seed},
                  {"config_hash", config_hash(cfg)},
                  {"model", model_to_json(cfg.model)},
                  {"rows", sim.data.rows()},
                  {"T", default_t_per_unit(cfg.model)},
                  {"truth", truth}};
  const std::string meta_path = cfg.out + ".meta.json";
  auto meta_out = open_output(meta_path);
  meta_out << meta.dump(2) << '\n';
  finish_output(meta_out, meta_path);
}

// ---------------------------------------------------------------- run

inline GdsConfig sampler_config(const RunConfig& cfg) {
  GdsConfig g;
  g.M = cfg.M;
  g.N = cfg.N;
  g.scale = cfg.scale;
  g.s0 = cfg.start_scale();
  g.pilot_size = cfg.pilot_size;
  g.seed = cfg.seed;
  g.workers = cfg.workers;
  g.accept.tolerate_tail_violations = cfg.tolerate_tail_violations;
  return g;
}

template <HasTransformMap Model>
void write_draws_csv(std::ostream& out, const Model& model, const GdsRunResult& run, bool unconstrained) {
  const Index d = model.dimension();
  out << "draw_index,attempts,threshold_v";
  for (Index j = 0; j < d; ++j) out << ",p" << (j + 1);
  out << '\n';
  for (std::size_t i = 0; i < run.draws.size(); ++i) {
    const auto& draw = run.draws[i];
    const Vector values = unconstrained ? Vector(draw.theta) : flatten_constrained(model.transform_map(), draw.theta);
    out << (i + 1) << ',' << draw.attempts << ',' << format_double(draw.threshold_v);
    for (Index j = 0; j < d; ++j) out << ',' << format_double(values[j]);
    out << '\n';
  }
}

template <HasTransformMap Model>
json diagnostics_json(const Model& model, const RunConfig& cfg, const GdsRunResult& run, const std::string& hash) {
  std::vector<std::uint64_t> attempts;
  for (const auto& d : run.draws) attempts.push_back(d.attempts);
  json j{{"model", cfg.model.name},
         {"dimension", model.dimension()},
         {"log_c1", run.log_c1},
         {"log_c2", run.log_c2},
         {"scale", run.scale},
         {"M", cfg.M},
         {"N", cfg.N},
         {"seed", cfg.seed},
         {"acceptance_rate", run.acceptance_rate()},
         {"gamma_hat", estimate_gamma(attempts)},
         {"log_marginal_likelihood", nullptr},
         {"total_attempts", run.total_attempts},
         {"retunes", run.retunes},
         {"tail_violations", run.tail_violations},
         {"mode", {{"theta_star", vector_json(run.mode.theta_star)},
                   {"iterations", run.mode.iterations},
                   {"gradient_norm", run.mode.gradient_norm}}},
         {"wall_time_seconds", {{"mode", run.seconds.mode},
                                {"proposals", run.seconds.proposals},
                                {"accept_reject", run.seconds.accept_reject}}},
         {"config_hash", hash},
         {"iw_convention", math::kInverseWishartConvention},
         {"parameter_scale", cfg.unconstrained ? "unconstrained" : "constrained"}};
  if (run.draws.size() >= 30) j["log_marginal_likelihood"] = estimate_log_evidence(run).log_marginal_likelihood;
  json names = json::object();
  const auto flat = flat_parameter_names(model.transform_map());
  for (std::size_t i = 0; i < flat.size(); ++i) names["p" + std::to_string(i + 1)] = flat[i];
  j["parameter_names"] = names;
  return j;
}

struct RunOutput {
  GdsRunResult result;
  std::string config_hash;
  std::string draws_path;
  std::string diagnostics_path;
};

/// Writes `{out}draws.csv` and `{out}diagnostics.json`.
inline RunOutput cmd_run(const RunConfig& cfg) {
  std::optional<Dataset> data;
  std::string data_bytes;
  if (model_needs_data(cfg.model.name)) {
    if (cfg.data.empty()) throw ConfigError("model '" + cfg.model.name + "' needs a dataset (--data)");
    data_bytes = read_file_bytes(cfg.data);
    std::istringstream in(data_bytes);
    data = parse_dataset_csv(in);
  }
  const AnyModel model = build_model(cfg.model, data ? &*data : nullptr);

  RunOutput out;
  out.config_hash = config_hash(cfg, data_bytes);
  out.draws_path = cfg.out + "draws.csv";
  out.diagnostics_path = cfg.out + "diagnostics.json";
  std::visit(
      [&](const auto& m) {
        out.result = run_gds(m, sampler_config(cfg));
        auto draws = open_output(out.draws_path);
        write_draws_csv(draws, m, out.result, cfg.unconstrained);
        finish_output(draws, out.draws_path);
        auto diag = open_output(out.diagnostics_path);
        diag << diagnostics_json(m, cfg, out.result, out.config_hash).dump(2) << '\n';
        finish_output(diag, out.diagnostics_path);
      },
      model);
  return out;
}

// ---------------------------------------------------------------- evidence study

struct StudyReplicate {
  double analytic = kNaN;
  double estimate = kNaN;
  double ape = kNaN;  // percent
  double acceptance = kNaN;
  double seconds = kNaN;
};

struct StudyCell {
  Index k = 0;
  Index n = 0;
  std::size_t M = 0;
  double scale = 0.0;  // precision factor
  std::vector<StudyReplicate> replicates;

  template <class F>
  double mean(F field) const {
    double s = 0.0;
    for (const auto& r : replicates) s += field(r);
    return s / static_cast<double>(replicates.size());
  }
  template <class F>
  double sd(F field) const {
    if (replicates.size() < 2) return 0.0;
    const double m = mean(field);
    double s = 0.0;
    for (const auto& r : replicates) s += (field(r) - m) * (field(r) - m);
    return std::sqrt(s / static_cast<double>(replicates.size() - 1));
  }
};

inline std::uint64_t double_bits(double x) {
  std::uint64_t b;
  std::memcpy(&b, &x, sizeof b);
  return b;
}

/// Each (k, n, replicate) gets one simulated lin_reg dataset shared by every (M, scale) cell,
/// so differences across cells reflect the sampler only. The proposal covariance scale is
/// 1/scale because the grid's scale multiplies the proposal precision.
inline std::vector<StudyCell> evidence_study(const RunConfig& cfg) {
  std::vector<StudyCell> cells;
  ModelParams mp = cfg.model;
  mp.name = "lin_reg";
  for (Index k : cfg.study.k) {
    for (Index n : cfg.study.n) {
      const std::size_t first = cells.size();
      for (std::size_t M : cfg.study.M)
        for (double s : cfg.study.scale) cells.push_back({k, n, M, s, {}});
      for (std::size_t rep = 0; rep < cfg.study.replicates; ++rep) {
        const std::uint64_t data_seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(k),
                                                               static_cast<std::uint64_t>(n), rep});
        mp.n = n;
        mp.k = k;
        const SimulatedData sim = simulate_design(mp, data_seed);
        const LinRegHyper hyper = lin_reg_hyper(mp, k + 1);
        const LinRegConjugateModel model(sim.data, hyper);
        const double truth = analytic_log_evidence_linreg(sim.data, hyper);
        const ModeResult mode = find_mode(model, ParameterVector::Zero(model.dimension()));
        for (std::size_t c = first; c < cells.size(); ++c) {
          GdsConfig g = sampler_config(cfg);
          g.M = cells[c].M;
          g.scale = 1.0 / cells[c].scale;
          g.seed = derive_seed(data_seed, {cells[c].M, double_bits(cells[c].scale)});
          const auto start = std::chrono::steady_clock::now();
          const GdsRunResult run = run_gds(model, mode, g);
          const double est = estimate_log_evidence(run).log_marginal_likelihood;
          const double secs = gds::detail::seconds_since(start);
          cells[c].replicates.push_back(
              {truth, est, 100.0 * std::abs(est - truth) / std::abs(truth), run.acceptance_rate(), secs});
        }
      }
    }
  }
  return cells;
}

inline void write_study_report(std::ostream& out, const std::vector<StudyCell>& cells, const std::string& hash,
                               std::uint64_t seed) {
  out << "k,n,M,scale,replicates,mvt_mean,gds_mean,ape_mean,ape_sd,accept_pct_mean,wall_time_mean,config_hash,seed\n";
  for (const auto& c : cells) {
    out << c.k << ',' << c.n << ',' << c.M << ',' << format_double(c.scale) << ',' << c.replicates.size() << ','
        << format_double(c.mean([](const auto& r) { return r.analytic; })) << ','
        << format_double(c.mean([](const auto& r) { return r.estimate; })) << ','
        << format_double(c.mean([](const auto& r) { return r.ape; })) << ','
        << format_double(c.sd([](const auto& r) { return r.ape; })) << ','
        << format_double(100.0 * c.mean([](const auto& r) { return r.acceptance; })) << ','
        << format_double(c.mean([](const auto& r) { return r.seconds; })) << ',' << hash << ',' << seed << '\n';
  }
}

/// Writes `{out}report.csv`, one row per grid cell.
inline std::vector<StudyCell> cmd_evidence_study(const RunConfig& cfg) {
  const auto cells = evidence_study(cfg);
  const std::string path = cfg.out + "report.csv";
  auto out = open_output(path);
  write_study_report(out, cells, config_hash(cfg), cfg.seed);
  finish_output(out, path);
  return cells;
}

// ---------------------------------------------------------------- errors

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return 4;
  if (dynamic_cast<const SamplerError*>(&e)) return 3;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DataError*>(&e) ||
      dynamic_cast<const ContractViolation*>(&e)) {
    return 2;
  }
  return 3;
}

inline std::string error_type(const std::exception& e) {
  if (dynamic_cast<const DominanceViolation*>(&e)) return "dominance_violation";
  if (dynamic_cast<const TuningFailed*>(&e)) return "tuning_failed";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence_error";
  if (dynamic_cast<const NotNegativeDefinite*>(&e)) return "not_negative_definite";
  if (dynamic_cast<const AttemptCapExceeded*>(&e)) return "attempt_cap_exceeded";
  if (dynamic_cast<const NonFiniteError*>(&e)) return "non_finite";
  if (dynamic_cast<const SamplerError*>(&e)) return "sampler_error";
  if (dynamic_cast<const IoError*>(&e)) return "io_error";
  if (dynamic_cast<const DataError*>(&e)) return "data_error";
  if (dynamic_cast<const ConfigError*>(&e)) return "config_error";
  if (dynamic_cast<const ContractViolation*>(&e)) return "contract_violation";
  return "internal_error";
}

inline json error_record(const std::exception& e) {
  json err{{"type", error_type(e)}, {"message", e.what()}, {"exit_code", exit_code_for(e)}};
  if (auto* d = dynamic_cast<const DominanceViolation*>(&e)) {
    err["log_phi"] = d->log_phi;
    err["hint"] = "re-tune the scale factor";
    if (std::isfinite(d->scale)) err["scale"] = d->scale;
  }
  if (auto* a = dynamic_cast<const AttemptCapExceeded*>(&e)) {
    err["threshold_v"] = a->threshold_v;
    err["attempts"] = a->attempts;
  }
  if (auto* c = dynamic_cast<const ConvergenceError*>(&e)) {
    err["best_log_density"] = c->best_log_density;
    err["iterations"] = c->iterations;
  }
  return json{{"error", err}};
}

/// Runs one command; on failure prints the JSON error record to `err` and returns the exit code.
inline int execute(const RunConfig& cfg, std::ostream& err = std::cerr) {
  try {
    validate(cfg);
    if (cfg.command == "simulate") cmd_simulate(cfg);
    else if (cfg.command == "run") cmd_run(cfg);
    else cmd_evidence_study(cfg);
    return 0;
  } catch (const std::exception& e) {
    err << error_record(e).dump() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace gds::app
