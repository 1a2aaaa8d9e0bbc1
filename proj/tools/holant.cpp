// Command-line entry point. All randomness flows from --seed through the
// library's splitting rule; outputs are CSV and byte-identical across runs
// and worker counts (HOLANT_THREADS only changes scheduling).

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "holant/holant.hpp"

namespace {

using namespace holant;

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;

// Output sink: --out file or stdout.
struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;
  void open(const std::string& path) {
    if (path.empty()) return;
    file.open(path, std::ios::binary);
    if (!file) throw HolantError(Errc::parse_error, "cannot open output file: " + path);
    os = &file;
  }
};

Pinning parse_pin_flag(const std::string& text) {
  Pinning pin;
  if (text.empty()) return pin;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto eq = part.find('=');
    if (eq == std::string::npos)
      throw HolantError(Errc::parse_error, "bad --pin entry (want e=v): " + part);
    int e = std::stoi(part.substr(0, eq));
    int v = std::stoi(part.substr(eq + 1));
    if (v != 0 && v != 1)
      throw HolantError(Errc::parse_error, "pin values must be 0 or 1");
    pin = pin.with(e, v == 1);
  }
  return pin;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(std::stoi(part));
  return out;
}

std::string edge_list_field(const EdgeConfig& cfg) {
  std::string s;
  for (EdgeId e : cfg.occupied()) {
    if (!s.empty()) s += ' ';
    s += std::to_string(e);
  }
  return s;
}

int cmd_sample(const std::string& config, long samples, long steps, std::uint64_t seed,
               const std::string& out_path) {
  LoadedModel model = load_model_config(config);
  Sink sink;
  sink.open(out_path);
  csv_row(*sink.os, {"sample", "edges"});
  auto batch = glauber::sample_batch(model.instance, static_cast<int>(samples),
                                     static_cast<std::uint64_t>(steps), seed);
  for (long i = 0; i < samples; ++i) {
    EdgeConfig cfg = batch[static_cast<std::size_t>(i)];
    if (model.complemented) cfg = complement_config(cfg);
    csv_row(*sink.os, {std::to_string(i), edge_list_field(cfg)});
  }
  return kExitOk;
}

int cmd_count(const std::string& config, double eps, std::uint64_t seed,
              const std::string& out_path) {
  LoadedModel model = load_model_config(config);
  analysis::CountEstimate est = analysis::estimate_log_z(model.instance, eps, seed);
  double log_z = est.log_z;
  if (model.complemented) {
    // Z_cover(lambda) = lambda^m * Z_complement(1/lambda)
    log_z += model.instance.edge_count() * std::log(model.cover_lambda);
  }
  Sink sink;
  sink.open(out_path);
  csv_row(*sink.os, {"model", "log_z", "z", "relative_error_target", "samples_per_marginal",
                     "edges"});
  csv_row(*sink.os,
          {model.model, fmt_double(log_z), fmt_double(std::exp(log_z)), fmt_double(eps),
           std::to_string(est.samples_per_marginal), std::to_string(model.instance.edge_count())});
  return kExitOk;
}

int cmd_verify_si(const std::string& sweep_path, const std::string& out_path) {
  analysis::SiSweepSpec spec;
  {
    std::ifstream in(sweep_path);
    if (!in) throw HolantError(Errc::parse_error, "cannot open sweep file: " + sweep_path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::exception& e) {
      throw HolantError(Errc::parse_error, "sweep JSON error: " + std::string(e.what()));
    }
    spec.max_vertices = doc.value("max_vertices", 5);
    if (doc.contains("b")) spec.bs = doc.at("b").get<std::vector<int>>();
    if (doc.contains("lambda")) spec.lambdas = doc.at("lambda").get<std::vector<double>>();
  }
  auto rows = analysis::si_sweep(spec);
  Sink sink;
  sink.open(out_path);
  csv_row(*sink.os, {"graph_index", "n", "m", "b", "lambda", "si_constant",
                     "bound_2pmax_minus_1", "remark_bound", "pass"});
  bool all_pass = true;
  for (const auto& r : rows) {
    all_pass = all_pass && r.pass;
    csv_row(*sink.os,
            {std::to_string(r.graph_index), std::to_string(r.n), std::to_string(r.m),
             std::to_string(r.b), fmt_double(r.lambda), fmt_double(r.si_constant),
             fmt_double(r.bound), fmt_double(r.remark_bound), r.pass ? "1" : "0"});
  }
  if (!all_pass) {
    std::cerr << "verify-si: spectral independence bound violated\n";
    return kExitVerificationFailure;
  }
  return kExitOk;
}

int cmd_couple_w1(const std::string& config, int vertex, long trials, std::uint64_t seed,
                  const std::string& out_path) {
  LoadedModel model = load_model_config(config);
  const HolantInstance& inst = model.instance;
  InstanceParams params = compute_params(inst);
  coupling::W1Estimate est = coupling::estimate_w1(inst, vertex, trials, seed);
  double bound = params.p_max - 1.0;
  double se = est.ci_half_width / coupling::kZ99;
  bool pass = est.mean - 3.0 * se <= bound + 1e-9;
  Sink sink;
  sink.open(out_path);
  csv_row(*sink.os, {"vertex", "trials", "mean", "ci_half_width", "w1_bound", "pass"});
  csv_row(*sink.os, {std::to_string(vertex), std::to_string(trials), fmt_double(est.mean),
                     fmt_double(est.ci_half_width), fmt_double(bound), pass ? "1" : "0"});
  if (!pass) {
    std::cerr << "couple-w1: estimated W1 exceeds p_max - 1\n";
    return kExitVerificationFailure;
  }
  return kExitOk;
}

int cmd_mix_diag(const std::string& family, const std::string& sizes_text, std::uint64_t seed,
                 const std::string& out_path) {
  std::vector<int> sizes = parse_int_list(sizes_text);
  analysis::MixingFamily fam;
  if (family == "random_d3_b1")
    fam = analysis::MixingFamily::random_d3_b1;
  else if (family == "path_b1")
    fam = analysis::MixingFamily::path_b1;
  else
    throw HolantError(Errc::parse_error, "unknown mixing family: " + family);
  analysis::MixingProfile prof = analysis::mixing_profile(sizes, seed, fam);
  Sink sink;
  sink.open(out_path);
  csv_row(*sink.os, {"m", "steps_to_tv_0.1", "method", "fitted_c", "residual"});
  for (std::size_t i = 0; i < prof.rows.size(); ++i) {
    const auto& r = prof.rows[i];
    csv_row(*sink.os, {std::to_string(r.m), std::to_string(r.steps),
                       r.exact ? "exact" : "coalescence-heuristic", fmt_double(prof.fitted_c),
                       fmt_double(prof.residuals[i])});
  }
  return kExitOk;
}

int cmd_counterexample(int family, const std::string& n_list, const std::string& out_path) {
  std::vector<int> ns = parse_int_list(n_list);
  Sink sink;
  sink.open(out_path);
  if (family == 1) {
    csv_row(*sink.os, {"n", "count_pin1", "count_pin0", "row_sum"});
    for (int n : ns) {
      auto ce = analysis::build_counterexample(
          analysis::CounterexampleFamily::path_mixed_signatures, n);
      double c1 = oracle::restricted_sum(ce.inst, 1u, 1u);
      double c0 = oracle::restricted_sum(ce.inst, 1u, 0u);
      double rs = analysis::influence_row_sum_edge0(ce.inst);
      csv_row(*sink.os,
              {std::to_string(n), fmt_double(c1), fmt_double(c0), fmt_double(rs)});
    }
  } else if (family == 2) {
    csv_row(*sink.os, {"n", "reduction_tv", "row_sum"});
    for (int n : ns) {
      auto ce = analysis::build_counterexample(
          analysis::CounterexampleFamily::path_with_pendants, n);
      HolantInstance reduced = ce.inst.induced(ce.pendant_pinning).first;
      auto f1 = analysis::build_counterexample(
          analysis::CounterexampleFamily::path_mixed_signatures, n);
      double tv = oracle::tv_between(reduced, f1.inst);
      double rs = analysis::influence_row_sum_edge0(reduced);
      csv_row(*sink.os, {std::to_string(n), fmt_double(tv), fmt_double(rs)});
    }
  } else {
    throw HolantError(Errc::parse_error, "family must be 1 or 2");
  }
  return kExitOk;
}

// Lower-bound verification report: one row per checked bound.
int cmd_oracle_verify(const HolantInstance& inst, Sink& sink) {
  csv_row(*sink.os, {"report", "pin_id", "key", "lhs", "rhs", "pass"});
  bool all_pass = true;
  for (const auto& r : oracle::verify_all_zero_bound(inst)) {
    all_pass = all_pass && r.pass;
    csv_row(*sink.os, {"all_zero", "-1", std::to_string(r.v), fmt_double(r.lhs),
                       fmt_double(r.rhs), r.pass ? "1" : "0"});
  }
  static const char* kCheckNames[] = {"marginal0", "marginal1", "cannot_occupy"};
  for (const auto& r : oracle::verify_marginal_bounds(inst)) {
    all_pass = all_pass && r.pass;
    csv_row(*sink.os, {kCheckNames[r.check], std::to_string(r.pin_id), std::to_string(r.e),
                       fmt_double(r.lhs), fmt_double(r.rhs), r.pass ? "1" : "0"});
  }
  if (!all_pass) {
    std::cerr << "oracle: a verified bound failed\n";
    return kExitVerificationFailure;
  }
  return kExitOk;
}

int cmd_oracle(const std::string& config, const std::string& pin_text, bool verify_bounds,
               const std::string& out_path) {
  LoadedModel model = load_model_config(config);
  const HolantInstance& inst = model.instance;
  Pinning pin = parse_pin_flag(pin_text);
  Sink sink;
  sink.open(out_path);
  if (verify_bounds) return cmd_oracle_verify(inst, sink);
  csv_row(*sink.os, {"kind", "i", "j", "value"});
  double z = oracle::restricted_sum(inst, pin.domain_mask(), pin.value_mask());
  if (!(z > 0.0))
    throw HolantError(Errc::zero_probability_pinning, "pinning has zero probability");
  csv_row(*sink.os, {"z_restricted", "", "", fmt_double(z)});
  csv_row(*sink.os, {"z", "", "", fmt_double(oracle::partition_function(inst))});
  for (EdgeId e = 0; e < inst.edge_count(); ++e) {
    if (pin.contains(e)) continue;
    csv_row(*sink.os,
            {"marginal", std::to_string(e), "", fmt_double(oracle::marginal(inst, pin, e))});
  }
  if (inst.edge_count() <= oracle::kMaxEdgesSweep) {
    oracle::InfluenceMatrix jm = oracle::influence_matrix(inst, pin);
    for (int i = 0; i < jm.dim; ++i)
      for (int j = 0; j < jm.dim; ++j)
        csv_row(*sink.os, {"influence", std::to_string(jm.basis[static_cast<std::size_t>(i)]),
                           std::to_string(jm.basis[static_cast<std::size_t>(j)]),
                           fmt_double(jm.at(i, j))});
    csv_row(*sink.os, {"influence_lambda_max", "", "",
                       fmt_double(oracle::influence_lambda_max(jm))});
  }
  return kExitOk;
}

}  // namespace

// Every run is fully determined by these flags plus the referenced input
// files; HOLANT_THREADS only changes scheduling, never results.
struct RunConfig {
  std::string config;
  std::string out_path;
  std::string sweep_path;
  std::string pin_text;
  std::string sizes_text = "6,8,10,12,14";
  std::string n_list = "4,6,8,12";
  std::string mix_family = "random_d3_b1";
  long samples = 1;
  long steps = 1000;
  long trials = 10000;
  std::uint64_t seed = 1;
  double eps = 0.05;
  int vertex = 0;
  int family = 1;
  bool verify_bounds = false;
};

int main(int argc, char** argv) {
  CLI::App app{"Sampling and approximate counting for binary symmetric Holant problems"};
  app.require_subcommand(1);
  RunConfig rc;

  auto* sample = app.add_subcommand("sample", "Draw Glauber samples");
  sample->add_option("--config", rc.config)->required();
  sample->add_option("--samples", rc.samples);
  sample->add_option("--steps", rc.steps);
  sample->add_option("--seed", rc.seed);
  sample->add_option("--out", rc.out_path);

  auto* count = app.add_subcommand("count", "Estimate log Z by telescoping");
  count->add_option("--config", rc.config)->required();
  count->add_option("--eps", rc.eps);
  count->add_option("--seed", rc.seed);
  count->add_option("--out", rc.out_path);

  auto* verify = app.add_subcommand("verify-si", "Spectral independence sweep");
  verify->add_option("--sweep", rc.sweep_path)->required();
  verify->add_option("--out", rc.out_path);

  auto* cw1 = app.add_subcommand("couple-w1", "Wasserstein estimate of the shift coupling");
  cw1->add_option("--config", rc.config)->required();
  cw1->add_option("--vertex", rc.vertex)->required();
  cw1->add_option("--trials", rc.trials);
  cw1->add_option("--seed", rc.seed);
  cw1->add_option("--out", rc.out_path);

  auto* mix = app.add_subcommand("mix-diag", "Mixing-time profile");
  mix->add_option("--family", rc.mix_family)
      ->check(CLI::IsMember({"random_d3_b1", "path_b1"}));
  mix->add_option("--sizes", rc.sizes_text);
  mix->add_option("--seed", rc.seed);
  mix->add_option("--out", rc.out_path);

  auto* ce = app.add_subcommand("counterexample", "Influence growth path families");
  ce->add_option("--family", rc.family);
  ce->add_option("--n-list", rc.n_list);
  ce->add_option("--out", rc.out_path);

  auto* orc = app.add_subcommand("oracle", "Dump exact Z / marginals / influence matrix");
  orc->add_option("--config", rc.config)->required();
  orc->add_option("--pin", rc.pin_text);
  orc->add_flag("--verify-bounds", rc.verify_bounds,
                "emit the all-zero and marginal lower-bound report instead");
  orc->add_option("--out", rc.out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(sample))
      return cmd_sample(rc.config, rc.samples, rc.steps, rc.seed, rc.out_path);
    if (app.got_subcommand(count)) return cmd_count(rc.config, rc.eps, rc.seed, rc.out_path);
    if (app.got_subcommand(verify)) return cmd_verify_si(rc.sweep_path, rc.out_path);
    if (app.got_subcommand(cw1))
      return cmd_couple_w1(rc.config, rc.vertex, rc.trials, rc.seed, rc.out_path);
    if (app.got_subcommand(mix))
      return cmd_mix_diag(rc.mix_family, rc.sizes_text, rc.seed, rc.out_path);
    if (app.got_subcommand(ce)) return cmd_counterexample(rc.family, rc.n_list, rc.out_path);
    if (app.got_subcommand(orc))
      return cmd_oracle(rc.config, rc.pin_text, rc.verify_bounds, rc.out_path);
  } catch (const HolantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
