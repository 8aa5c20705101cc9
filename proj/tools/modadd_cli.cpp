// Command-line surface: construct networks, verify claims, train,
// sweep, evaluate OOD accuracy, run lemma oracles, and re-aggregate
// reports. Exit codes: 0 success, 2 verification failure, 3 divergence.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "modadd/sweep.hpp"
#include "modadd/verify.hpp"

using namespace modadd;
using nlohmann::json;

namespace {

constexpr int kExitVerifyFailure = 2;
constexpr int kExitDivergence = 3;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

int emit_certificate(const Certificate& cert) {
  std::cout << cert.to_json().dump(2) << std::endl;
  return cert.passed ? 0 : kExitVerifyFailure;
}

int cmd_construct(const std::string& kind, int m, int p, double tau,
                  const std::string& out_path, const std::string& cert_path,
                  std::uint64_t cap) {
  const TaskSpec spec{p, m};
  MlpParams theta;
  if (kind == "sine_width2") theta = sine_width2_fixed(spec);
  else if (kind == "sine_biased") theta = sine_width2_biased_uniform(p);
  else if (kind == "sine_halfp") theta = sine_halfp_unbiased(p);
  else if (kind == "sine_highmargin") theta = sine_highmargin_2p(spec);
  else if (kind == "relu_m2") theta = relu_construction_m2(p);
  else if (kind == "relu_general") theta = relu_construction(spec, tau);
  else throw std::invalid_argument("unknown construction kind: " + kind);

  save_checkpoint(theta, out_path);
  const Certificate cert = certify_construction(kind, spec, tau, cap);
  if (!cert_path.empty()) {
    std::ofstream out(cert_path);
    out << cert.to_json().dump(2) << "\n";
  }
  std::cout << cert.to_json().dump(2) << std::endl;
  return cert.passed ? 0 : kExitVerifyFailure;
}

int cmd_verify(const std::string& claim, int m, int p, double tau, int s,
               int n_arg, int trials, std::uint64_t seed, int m2, int d,
               int L, int r, int K, std::uint64_t cap) {
  if (claim == "gram_identity") return emit_certificate(check_gram_identity(p));
  if (claim == "uniformity")
    return emit_certificate(check_uniformity(TaskSpec{p, m}));
  if (claim.rfind("construction:", 0) == 0)
    return emit_certificate(
        certify_construction(claim.substr(13), TaskSpec{p, m}, tau, cap));
  if (claim == "newton_counts") return emit_certificate(check_newton_counts(m));
  if (claim == "polarization") {
    RngStream rng(seed, 1);
    return emit_certificate(check_polarization(s, trials, rng));
  }
  if (claim == "spline_bound")
    return emit_certificate(check_spline_bound(s, n_arg));
  if (claim == "newton_reconstruction") {
    RngStream rng(seed, 2);
    return emit_certificate(check_newton_reconstruction(m, trials, rng));
  }
  if (claim == "trig_poly") {
    RngStream rng(seed, 3);
    return emit_certificate(
        check_trig_polynomialization(TaskSpec{p, m}, trials, rng));
  }
  if (claim == "relu_mode_errors")
    return emit_certificate(check_relu_mode_errors(TaskSpec{p, m}, tau));
  if (claim == "scale_invariance") {
    // Fresh random no-bias ReLU net; the witness holds for any theta.
    RngStream rng(seed, 4);
    MlpParams theta;
    theta.act = Activation::Relu;
    theta.W = Matrix(d, p);
    theta.V = Matrix(p, d);
    for (double& v : theta.W.data) v = rng.normal(0.0, 1.0);
    for (double& v : theta.V.data) v = rng.normal(0.0, 1.0);
    RngStream trial_rng(seed, 5);
    return emit_certificate(
        relu_scale_invariance_witness(theta, m, m2, trials, trial_rng));
  }
  if (claim == "path_probe") {
    const MlpParams theta = relu_construction(TaskSpec{p, m}, tau);
    return emit_certificate(relu_path_probe(theta, TaskSpec{p, m}));
  }
  if (claim.rfind("capacity:", 0) == 0) {
    CapacityArgs args;
    args.d = d;
    args.p = p;
    args.m = m;
    args.L = L;
    args.r = r;
    args.K = K;
    const double bound = capacity_bound(claim.substr(9), args);
    std::cout << json{{"family", claim.substr(9)},
                      {"bound", bound},
                      {"ceil", std::ceil(bound)}}
                     .dump(2)
              << std::endl;
    return 0;
  }
  throw std::invalid_argument("unknown claim: " + claim);
}

// The full closed-form oracle battery; mirrors the lemma suite.
int cmd_lemma(const std::string& name, std::uint64_t seed) {
  std::vector<Certificate> certs;
  auto want = [&](const std::string& n) { return name == "all" || name == n; };
  if (want("gram_identity"))
    for (int p = 2; p <= 64; ++p) certs.push_back(check_gram_identity(p));
  if (want("uniformity"))
    for (int m = 2; m <= 12; ++m)
      for (int p = 2; p <= 12; ++p)
        certs.push_back(check_uniformity(TaskSpec{p, m}));
  if (want("polarization"))
    for (int s = 1; s <= 8; ++s) {
      RngStream rng(seed, 100 + s);
      certs.push_back(check_polarization(s, 100, rng));
    }
  if (want("newton_reconstruction"))
    for (int m = 1; m <= 6; ++m) {
      RngStream rng(seed, 200 + m);
      certs.push_back(check_newton_reconstruction(m, 100, rng));
    }
  if (want("newton_counts"))
    for (int m = 1; m <= 10; ++m) certs.push_back(check_newton_counts(m));
  if (want("spline_bound"))
    for (int s = 1; s <= 6; ++s)
      for (int N : {1, 2, 4, 8, 16, 32, 64})
        certs.push_back(check_spline_bound(s, N));
  if (want("trig_poly")) {
    RngStream rng(seed, 300);
    certs.push_back(
        check_trig_polynomialization(TaskSpec{7, 6}, 100, rng));
  }
  if (certs.empty()) throw std::invalid_argument("unknown lemma: " + name);
  bool all_passed = true;
  for (const auto& cert : certs) {
    all_passed = all_passed && cert.passed;
    std::cout << (cert.passed ? "PASS " : "FAIL ") << cert.claim_id << " "
              << cert.params.dump() << "\n";
  }
  return all_passed ? 0 : kExitVerifyFailure;
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
  TrainConfig cfg = train_config_from_json(load_json_file(config_path));
  std::filesystem::create_directories(out_dir);
  const std::uint64_t hash = config_hash(cfg);
  const std::string run_path = out_dir + "/run_" + std::to_string(hash) + "_" +
                               std::to_string(cfg.seed) + ".jsonl";
  std::ofstream run_file(run_path);
  run_file << json{{"schema", "modadd-run-v1"},
                   {"config", train_config_to_json(cfg)},
                   {"config_hash", hash},
                   {"seed", cfg.seed}}
                  .dump()
           << "\n";
  const TrainResult result = train(cfg, [&](const RunRecord& rec) {
    json ood = json::object();
    for (const auto& [m, acc] : rec.ood_acc) ood[std::to_string(m)] = acc;
    run_file << json{{"epoch", rec.epoch},
                     {"train_acc", rec.train_acc},
                     {"test_acc", rec.test_acc},
                     {"loss", rec.loss},
                     {"pct05_margin", rec.pct05_margin},
                     {"min_margin", rec.min_margin},
                     {"v_spectral", rec.v_spectral},
                     {"w_frobenius", rec.w_frobenius},
                     {"v_row_l1", rec.v_row_l1},
                     {"norm_margin_relu", rec.norm_margin_relu},
                     {"norm_margin_sine", rec.norm_margin_sine},
                     {"ood_acc", ood},
                     {"wallclock_sec", rec.wallclock_sec}}
                    .dump()
             << "\n";
  });
  save_checkpoint(result.params, out_dir + "/final_" + std::to_string(hash) +
                                     "_" + std::to_string(cfg.seed) + ".json");
  if (result.diverged) {
    std::cerr << "training diverged; partial records in " << run_path << "\n";
    return kExitDivergence;
  }
  if (!result.records.empty()) {
    const RunRecord& last = result.records.back();
    std::cout << json{{"train_acc", last.train_acc},
                      {"test_acc", last.test_acc},
                      {"loss", last.loss}}
                     .dump(2)
              << std::endl;
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& preset_name,
              const std::string& out_dir, int parallel,
              const std::string& seeds_csv) {
  SweepSpec spec;
  if (!preset_name.empty())
    spec = preset(preset_name);
  else
    spec = sweep_spec_from_json(load_json_file(config_path));
  if (!seeds_csv.empty()) {
    spec.seeds.clear();
    std::stringstream ss(seeds_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) spec.seeds.push_back(std::stoull(tok));
  }
  std::vector<RunOutcome> outcomes;
  const ReportTable table = run_sweep(spec, parallel, out_dir, &outcomes);
  bool any_failed = false;
  for (const auto& run : outcomes) any_failed = any_failed || run.failed;
  std::cout << "sweep complete: " << outcomes.size() << " runs, table at "
            << out_dir << "/table.csv" << std::endl;
  return any_failed ? kExitDivergence : 0;
}

int cmd_ood(const std::string& checkpoint, const std::string& lengths_csv,
            std::size_t test_n, std::uint64_t seed) {
  const MlpParams theta = load_checkpoint(checkpoint);
  std::vector<int> lengths;
  std::stringstream ss(lengths_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) lengths.push_back(std::stoi(tok));
  const auto result = evaluate_ood(theta, lengths, test_n, seed);
  json out = json::object();
  for (const auto& [m, summary] : result) {
    out[std::to_string(m)] = {{"accuracy", summary.accuracy},
                              {"invalid_rate", summary.invalid_rate},
                              {"n", summary.n}};
  }
  std::cout << out.dump(2) << std::endl;
  return 0;
}

int cmd_report(const std::string& runs_dir, const std::string& out_path,
               const std::string& heatmap_axes, const std::string& metric,
               const std::string& svg_path) {
  // Re-aggregate from the per-run JSONL files.
  std::vector<RunOutcome> outcomes;
  for (const auto& entry : std::filesystem::directory_iterator(runs_dir)) {
    if (entry.path().extension() != ".jsonl") continue;
    std::ifstream in(entry.path());
    std::string line;
    if (!std::getline(in, line)) continue;
    json header = json::parse(line);
    if (header.value("schema", "") != "modadd-run-v1") continue;
    RunOutcome out;
    out.seed = header.value("seed", std::uint64_t{0});
    out.cfg_hash = header.value("config_hash", std::uint64_t{0});
    if (header.contains("assignment")) {
      for (auto it = header["assignment"].begin();
           it != header["assignment"].end(); ++it)
        out.assignment[it.key()] = it.value();
    } else {
      // Standalone `train` runs carry no grid assignment; group by a few
      // config fields instead.
      const TrainConfig cfg = train_config_from_json(header.at("config"));
      out.assignment = {{"act", json(activation_name(cfg.act))},
                        {"weight_decay", json(cfg.optim.weight_decay)},
                        {"d", json(cfg.d)},
                        {"n_train", json(cfg.n_train)}};
    }
    json last;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json rec = json::parse(line);
      if (rec.contains("diverged") || rec.contains("error")) {
        out.failed = true;
        continue;
      }
      last = rec;
    }
    if (!last.is_null()) {
      RunRecord& r = out.final_record;
      r.epoch = last.value("epoch", 0);
      r.train_acc = last.value("train_acc", 0.0);
      r.test_acc = last.value("test_acc", 0.0);
      r.loss = last.value("loss", 0.0);
      r.min_margin = last.value("min_margin", 0.0);
      r.pct05_margin = last.value("pct05_margin", 0.0);
      r.v_spectral = last.value("v_spectral", 0.0);
      r.w_frobenius = last.value("w_frobenius", 0.0);
      r.v_row_l1 = last.value("v_row_l1", 0.0);
      r.norm_margin_relu = last.value("norm_margin_relu", 0.0);
      r.norm_margin_sine = last.value("norm_margin_sine", 0.0);
      if (last.contains("ood_acc"))
        for (auto it = last["ood_acc"].begin(); it != last["ood_acc"].end();
             ++it)
          r.ood_acc[std::stoi(it.key())] = it.value().get<double>();
    }
    outcomes.push_back(std::move(out));
  }
  if (outcomes.empty())
    throw std::runtime_error("report: no run files in " + runs_dir);
  const ReportTable table = aggregate_runs(outcomes);
  write_table_csv(table, out_path);
  if (!svg_path.empty()) {
    const auto comma = heatmap_axes.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("--heatmap must be <axis_x>,<axis_y>");
    emit_heatmap(table, heatmap_axes.substr(0, comma),
                 heatmap_axes.substr(comma + 1), metric, svg_path);
  }
  std::cout << "report written to " << out_path << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-layer sine/ReLU MLPs on modular addition: explicit "
               "constructions, verification oracles, and training sweeps"};
  app.require_subcommand(1);

  // construct
  std::string kind = "sine_width2", out_path = "checkpoint.json";
  std::string cert_path;
  int m = 2, p = 5;
  double tau = 0.1;
  std::uint64_t cap = 10'000'000;
  auto* construct = app.add_subcommand("construct", "emit a closed-form network");
  construct->add_option("--kind", kind,
                        "sine_width2|sine_biased|sine_halfp|sine_highmargin|"
                        "relu_m2|relu_general");
  construct->add_option("--m", m);
  construct->add_option("--p", p);
  construct->add_option("--tau", tau);
  construct->add_option("--out", out_path);
  construct->add_option("--certificate", cert_path);
  construct->add_option("--cap", cap);

  // verify
  std::string claim;
  int s = 2, n_arg = 7, trials = 100, m2 = 3, d = 8, L = 2, r = 1, K = 1;
  std::uint64_t seed = 1337;
  auto* verify = app.add_subcommand("verify", "run one verification oracle");
  verify->add_option("claim", claim)->required();
  verify->add_option("--m", m);
  verify->add_option("--m2", m2);
  verify->add_option("--p", p);
  verify->add_option("--tau", tau);
  verify->add_option("--s", s);
  verify->add_option("--N", n_arg);
  verify->add_option("--trials", trials);
  verify->add_option("--seeds", seed, "rng seed");
  verify->add_option("--d", d);
  verify->add_option("--L", L);
  verify->add_option("--r", r);
  verify->add_option("--K", K);
  verify->add_option("--cap", cap);

  // lemma
  std::string lemma_name = "all";
  auto* lemma = app.add_subcommand("lemma", "run the lemma oracle battery");
  lemma->add_option("name", lemma_name,
                    "all|gram_identity|uniformity|polarization|"
                    "newton_reconstruction|newton_counts|spline_bound|trig_poly");
  lemma->add_option("--seeds", seed);

  // train
  std::string config_path, out_dir = "out";
  auto* train_cmd = app.add_subcommand("train", "run one training config");
  train_cmd->add_option("--config", config_path)->required();
  train_cmd->add_option("--out", out_dir);

  // sweep
  std::string preset_name, seeds_csv;
  int parallel = 2;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a sweep grid");
  sweep_cmd->add_option("--config", config_path);
  sweep_cmd->add_option("--preset", preset_name,
                        "underparam|overparam-sine|overparam-relu|ood-p97|"
                        "ood-p53|ood-bias");
  sweep_cmd->add_option("--out", out_dir);
  sweep_cmd->add_option("--parallel", parallel);
  sweep_cmd->add_option("--seeds", seeds_csv, "comma-separated seed list");

  // ood
  std::string checkpoint, lengths_csv = "14,38,53,97,201,303,401,512,602,705,811";
  std::size_t test_n = 10000;
  auto* ood = app.add_subcommand("ood", "evaluate a checkpoint at OOD lengths");
  ood->add_option("--checkpoint", checkpoint)->required();
  ood->add_option("--lengths", lengths_csv);
  ood->add_option("--test-n", test_n);
  ood->add_option("--seeds", seed);

  // report
  std::string runs_dir, table_out = "table.csv", heatmap_axes, metric = "test_acc";
  std::string svg_path;
  auto* report = app.add_subcommand("report", "re-aggregate runs into a table");
  report->add_option("--runs", runs_dir)->required();
  report->add_option("--out", table_out);
  report->add_option("--heatmap", heatmap_axes, "axis_x,axis_y");
  report->add_option("--metric", metric);
  report->add_option("--svg", svg_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (construct->parsed())
      return cmd_construct(kind, m, p, tau, out_path, cert_path, cap);
    if (verify->parsed())
      return cmd_verify(claim, m, p, tau, s, n_arg, trials, seed, m2, d, L, r,
                        K, cap);
    if (lemma->parsed()) return cmd_lemma(lemma_name, seed);
    if (train_cmd->parsed()) return cmd_train(config_path, out_dir);
    if (sweep_cmd->parsed())
      return cmd_sweep(config_path, preset_name, out_dir, parallel, seeds_csv);
    if (ood->parsed()) return cmd_ood(checkpoint, lengths_csv, test_n, seed);
    if (report->parsed())
      return cmd_report(runs_dir, table_out, heatmap_axes, metric, svg_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
