#include "modadd/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace modadd {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw std::invalid_argument(where + ": unknown field '" + it.key() + "'");
  }
}

json optim_to_json(const OptimConfig& o) {
  return {{"kind", optim_kind_name(o.kind)},
          {"lr", o.lr},
          {"weight_decay", o.weight_decay},
          {"beta1", o.beta1},
          {"beta2", o.beta2},
          {"eps", o.eps},
          {"momentum", o.momentum},
          {"nesterov", o.nesterov},
          {"ns_steps", o.ns_steps},
          {"wd_policy", wd_policy_name(o.wd_policy)}};
}

OptimConfig optim_from_json(const json& j) {
  check_keys(j,
             {"kind", "lr", "weight_decay", "beta1", "beta2", "eps",
              "momentum", "nesterov", "ns_steps", "wd_policy"},
             "optim config");
  OptimConfig o;
  o.kind = optim_kind_from_name(j.value("kind", "adamw"));
  o.lr = j.value("lr", 1e-3);
  o.weight_decay = j.value("weight_decay", 0.0);
  o.beta1 = j.value("beta1", 0.9);
  o.beta2 = j.value("beta2", 0.999);
  o.eps = j.value("eps", 1e-8);
  o.momentum = j.value("momentum", 0.95);
  o.nesterov = j.value("nesterov", true);
  o.ns_steps = j.value("ns_steps", 5);
  o.wd_policy = wd_policy_from_name(j.value("wd_policy", "none"));
  return o;
}

}  // namespace

json train_config_to_json(const TrainConfig& cfg) {
  return {{"schema", "modadd-train-config-v1"},
          {"p", cfg.p},
          {"lengths", cfg.lengths},
          {"d", cfg.d},
          {"act", activation_name(cfg.act)},
          {"bias", cfg.bias},
          {"n_train", cfg.n_train},
          {"epochs", cfg.epochs},
          {"batch", cfg.batch},
          {"optim", optim_to_json(cfg.optim)},
          {"seed", cfg.seed},
          {"init_std", cfg.init_std},
          {"eval_lengths", cfg.eval_lengths},
          {"test_n", cfg.test_n},
          {"log_every", cfg.log_every}};
}

TrainConfig train_config_from_json(const json& j) {
  check_keys(j,
             {"schema", "p", "lengths", "d", "act", "bias", "n_train",
              "epochs", "batch", "optim", "seed", "init_std", "eval_lengths",
              "test_n", "log_every"},
             "train config");
  if (j.value("schema", "") != "modadd-train-config-v1")
    throw std::invalid_argument("train config: unknown schema");
  TrainConfig cfg;
  cfg.p = j.at("p").get<int>();
  if (j.contains("lengths")) cfg.lengths = j.at("lengths").get<std::vector<int>>();
  cfg.d = j.at("d").get<int>();
  cfg.act = activation_from_name(j.value("act", "sine"));
  cfg.bias = j.value("bias", false);
  cfg.n_train = j.at("n_train").get<std::size_t>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.batch = j.value("batch", std::size_t{1024});
  if (j.contains("optim")) cfg.optim = optim_from_json(j.at("optim"));
  cfg.seed = j.value("seed", std::uint64_t{1337});
  cfg.init_std = j.value("init_std", 0.01);
  if (j.contains("eval_lengths"))
    cfg.eval_lengths = j.at("eval_lengths").get<std::vector<int>>();
  cfg.test_n = j.value("test_n", std::size_t{10000});
  cfg.log_every = j.value("log_every", 0);
  return cfg;
}

json sweep_spec_to_json(const SweepSpec& spec) {
  json grid = json::object();
  for (const auto& [k, vals] : spec.grid) grid[k] = vals;
  return {{"schema", "modadd-sweep-config-v1"},
          {"base", train_config_to_json(spec.base)},
          {"grid", grid},
          {"seeds", spec.seeds},
          {"report", spec.report == ReportMode::BestOverWd ? "best_over_wd"
                                                           : "all"}};
}

SweepSpec sweep_spec_from_json(const json& j) {
  check_keys(j, {"schema", "base", "grid", "seeds", "report"}, "sweep config");
  if (j.value("schema", "") != "modadd-sweep-config-v1")
    throw std::invalid_argument("sweep config: unknown schema");
  SweepSpec spec;
  spec.base = train_config_from_json(j.at("base"));
  if (j.contains("grid")) {
    for (auto it = j.at("grid").begin(); it != j.at("grid").end(); ++it)
      spec.grid[it.key()] = it.value().get<std::vector<json>>();
  }
  if (j.contains("seeds"))
    spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  const std::string rep = j.value("report", "all");
  if (rep == "best_over_wd")
    spec.report = ReportMode::BestOverWd;
  else if (rep == "all")
    spec.report = ReportMode::All;
  else
    throw std::invalid_argument("sweep config: unknown report mode " + rep);
  return spec;
}

TrainConfig apply_assignment(
    TrainConfig cfg, const std::map<std::string, json>& assignment) {
  // Assigning the activation also selects the default decay policy
  // (sine decays V only, ReLU decays both layers) unless the assignment
  // pins wd_policy explicitly.
  if (auto it = assignment.find("act"); it != assignment.end()) {
    const Activation act = activation_from_name(it->second.get<std::string>());
    if (!assignment.count("wd_policy"))
      cfg.optim.wd_policy =
          act == Activation::Sine ? WdPolicy::VOnly : WdPolicy::Both;
  }
  for (const auto& [key, value] : assignment) {
    if (key == "weight_decay") {
      cfg.optim.weight_decay = value.get<double>();
    } else if (key == "lr") {
      cfg.optim.lr = value.get<double>();
    } else if (key == "d") {
      cfg.d = value.get<int>();
    } else if (key == "n_train") {
      cfg.n_train = value.get<std::size_t>();
    } else if (key == "act") {
      cfg.act = activation_from_name(value.get<std::string>());
    } else if (key == "epochs") {
      cfg.epochs = value.get<int>();
    } else if (key == "batch") {
      cfg.batch = value.get<std::size_t>();
    } else if (key == "bias") {
      cfg.bias = value.get<bool>();
    } else if (key == "optim") {
      cfg.optim.kind = optim_kind_from_name(value.get<std::string>());
    } else if (key == "wd_policy") {
      cfg.optim.wd_policy = wd_policy_from_name(value.get<std::string>());
    } else {
      throw std::invalid_argument("apply_assignment: unknown grid key '" +
                                  key + "'");
    }
  }
  return cfg;
}

namespace {

json record_to_json(const RunRecord& rec) {
  json ood = json::object();
  for (const auto& [m, acc] : rec.ood_acc) ood[std::to_string(m)] = acc;
  return {{"epoch", rec.epoch},
          {"train_acc", rec.train_acc},
          {"test_acc", rec.test_acc},
          {"loss", rec.loss},
          {"min_margin", rec.min_margin},
          {"pct05_margin", rec.pct05_margin},
          {"v_spectral", rec.v_spectral},
          {"w_frobenius", rec.w_frobenius},
          {"v_row_l1", rec.v_row_l1},
          {"norm_margin_relu", rec.norm_margin_relu},
          {"norm_margin_sine", rec.norm_margin_sine},
          {"ood_acc", ood},
          {"wallclock_sec", rec.wallclock_sec}};
}

std::string assignment_key(const std::map<std::string, json>& a) {
  std::string s;
  for (const auto& [k, v] : a)
    s += k + "=" + (v.is_string() ? v.get<std::string>() : v.dump()) + ";";
  return s;
}

std::map<std::string, double> record_metrics(const RunRecord& rec) {
  std::map<std::string, double> m = {
      {"train_acc", rec.train_acc},
      {"test_acc", rec.test_acc},
      {"loss", rec.loss},
      {"min_margin", rec.min_margin},
      {"pct05_margin", rec.pct05_margin},
      {"v_spectral", rec.v_spectral},
      {"w_frobenius", rec.w_frobenius},
      {"v_row_l1", rec.v_row_l1},
      {"norm_margin_relu", rec.norm_margin_relu},
      {"norm_margin_sine", rec.norm_margin_sine}};
  for (const auto& [len, acc] : rec.ood_acc)
    m["ood_acc_" + std::to_string(len)] = acc;
  return m;
}

}  // namespace

ReportTable aggregate_runs(const std::vector<RunOutcome>& runs) {
  // Group by assignment, keyed deterministically.
  std::map<std::string, std::vector<const RunOutcome*>> groups;
  for (const auto& run : runs) groups[assignment_key(run.assignment)].push_back(&run);

  ReportTable table;
  for (const auto& [key, members] : groups) {
    ReportRow row;
    row.assignment = members.front()->assignment;
    row.seeds = members.size();
    std::map<std::string, std::vector<double>> samples;
    for (const RunOutcome* run : members) {
      if (run->failed) {
        row.failed = true;
        continue;
      }
      for (const auto& [metric, value] : record_metrics(run->final_record))
        samples[metric].push_back(value);
    }
    for (const auto& [metric, vals] : samples) {
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= static_cast<double>(vals.size());
      double var = 0.0;
      for (double v : vals) var += (v - mean) * (v - mean);
      var /= static_cast<double>(vals.size());
      row.mean[metric] = mean;
      row.stdev[metric] = std::sqrt(var);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

double best_over_wd(const ReportTable& table, const std::string& metric,
                    const std::map<std::string, json>& filter) {
  bool found = false;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& row : table.rows) {
    if (row.failed) continue;
    bool match = true;
    for (const auto& [k, v] : filter) {
      auto it = row.assignment.find(k);
      if (it == row.assignment.end() || it->second != v) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    auto it = row.mean.find(metric);
    if (it == row.mean.end()) continue;
    found = true;
    best = std::max(best, it->second);
  }
  if (!found)
    throw std::runtime_error("best_over_wd: no rows matched metric " + metric);
  return best;
}

ReportTable run_sweep(const SweepSpec& spec, int parallelism,
                      const std::string& out_dir,
                      std::vector<RunOutcome>* outcomes_out) {
  if (parallelism < 1) parallelism = 1;
  std::filesystem::create_directories(out_dir);

  // Cartesian product of the grid.
  std::vector<std::map<std::string, json>> cells;
  cells.emplace_back();
  for (const auto& [key, values] : spec.grid) {
    if (values.empty())
      throw std::invalid_argument("run_sweep: empty grid for " + key);
    std::vector<std::map<std::string, json>> next;
    for (const auto& cell : cells) {
      for (const auto& value : values) {
        auto c = cell;
        c[key] = value;
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }

  struct Job {
    std::map<std::string, json> assignment;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& cell : cells)
    for (std::uint64_t seed : spec.seeds) jobs.push_back({cell, seed});

  std::vector<RunOutcome> outcomes(jobs.size());
  std::atomic<std::size_t> next_job{0};
  std::mutex io_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next_job.fetch_add(1);
      if (idx >= jobs.size()) return;
      const Job& job = jobs[idx];
      TrainConfig cfg = apply_assignment(spec.base, job.assignment);
      cfg.seed = job.seed;

      RunOutcome& out = outcomes[idx];
      out.assignment = job.assignment;
      out.seed = job.seed;
      out.cfg_hash = config_hash(cfg);

      const std::string run_path =
          out_dir + "/run_" + std::to_string(out.cfg_hash) + "_" +
          std::to_string(job.seed) + ".jsonl";
      json assignment = json::object();
      for (const auto& [k, v] : job.assignment) assignment[k] = v;
      std::ofstream run_file(run_path);
      run_file << json{{"schema", "modadd-run-v1"},
                       {"config", train_config_to_json(cfg)},
                       {"assignment", assignment},
                       {"config_hash", out.cfg_hash},
                       {"seed", job.seed}}
                      .dump()
               << "\n";

      TrainResult result;
      try {
        result = train(cfg, [&](const RunRecord& rec) {
          run_file << record_to_json(rec).dump() << "\n";
        });
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        out.failed = true;
        run_file << json{{"error", e.what()}}.dump() << "\n";
        continue;
      }
      out.failed = result.diverged;
      if (!result.records.empty()) out.final_record = result.records.back();
      if (result.diverged)
        run_file << json{{"diverged", true}}.dump() << "\n";
    }
  };

  std::vector<std::thread> threads;
  const int workers = std::min<int>(parallelism, static_cast<int>(jobs.size()));
  threads.reserve(workers);
  for (int i = 0; i < workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  write_runs_csv(outcomes, out_dir + "/runs.csv");
  ReportTable table = aggregate_runs(outcomes);
  write_table_csv(table, out_dir + "/table.csv");
  if (outcomes_out) *outcomes_out = std::move(outcomes);
  return table;
}

namespace {

std::vector<int> collect_lengths(const std::vector<RunOutcome>& runs) {
  std::set<int> lengths;
  for (const auto& run : runs)
    for (const auto& [m, acc] : run.final_record.ood_acc) lengths.insert(m);
  return {lengths.begin(), lengths.end()};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

void write_runs_csv(const std::vector<RunOutcome>& runs,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_runs_csv: cannot open " + path);
  const auto lengths = collect_lengths(runs);
  out << "config_hash,seed,assignment,failed,train_acc,test_acc,loss,"
         "min_margin,pct05_margin,v_spectral,w_frobenius,v_row_l1,"
         "norm_margin_relu,norm_margin_sine";
  for (int m : lengths) out << ",ood_acc_" << m;
  out << "\n";
  for (const auto& run : runs) {
    const RunRecord& r = run.final_record;
    out << run.cfg_hash << "," << run.seed << ",\""
        << assignment_key(run.assignment) << "\"," << run.failed << ","
        << fmt(r.train_acc) << "," << fmt(r.test_acc) << "," << fmt(r.loss)
        << "," << fmt(r.min_margin) << "," << fmt(r.pct05_margin) << ","
        << fmt(r.v_spectral) << "," << fmt(r.w_frobenius) << ","
        << fmt(r.v_row_l1) << "," << fmt(r.norm_margin_relu) << ","
        << fmt(r.norm_margin_sine);
    for (int m : lengths) {
      auto it = r.ood_acc.find(m);
      out << "," << (it == r.ood_acc.end() ? "" : fmt(it->second));
    }
    out << "\n";
  }
}

void write_table_csv(const ReportTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_table_csv: cannot open " + path);
  // Union of metrics, deterministic order.
  std::set<std::string> metrics;
  for (const auto& row : table.rows)
    for (const auto& [metric, v] : row.mean) metrics.insert(metric);
  out << "assignment,seeds,failed";
  for (const auto& metric : metrics) out << "," << metric << "_mean," << metric << "_std";
  out << "\n";
  for (const auto& row : table.rows) {
    out << "\"" << assignment_key(row.assignment) << "\"," << row.seeds << ","
        << row.failed;
    for (const auto& metric : metrics) {
      auto itm = row.mean.find(metric);
      auto its = row.stdev.find(metric);
      out << "," << (itm == row.mean.end() ? "" : fmt(itm->second)) << ","
          << (its == row.stdev.end() ? "" : fmt(its->second));
    }
    out << "\n";
  }
}

void emit_heatmap(const ReportTable& table, const std::string& axis_x,
                  const std::string& axis_y, const std::string& metric,
                  const std::string& out_path) {
  if (table.rows.empty())
    throw std::invalid_argument("emit_heatmap: empty table");

  // Axis values: either grid assignments or per-length metric expansion.
  auto axis_values = [&](const std::string& axis) {
    std::vector<std::string> values;
    if (axis == "length") {
      std::set<int> lengths;
      for (const auto& row : table.rows)
        for (const auto& [m, v] : row.mean)
          if (m.rfind("ood_acc_", 0) == 0) lengths.insert(std::stoi(m.substr(8)));
      for (int m : lengths) values.push_back(std::to_string(m));
    } else {
      std::set<std::string> raw;
      for (const auto& row : table.rows) {
        auto it = row.assignment.find(axis);
        if (it != row.assignment.end()) raw.insert(it->second.dump());
      }
      values.assign(raw.begin(), raw.end());
    }
    if (values.empty())
      throw std::invalid_argument("emit_heatmap: axis '" + axis +
                                  "' not present in table");
    return values;
  };
  const auto xs = axis_values(axis_x);
  const auto ys = axis_values(axis_y);

  auto cell_value = [&](const std::string& xv,
                        const std::string& yv) -> std::optional<double> {
    for (const auto& row : table.rows) {
      auto matches = [&](const std::string& axis, const std::string& v) {
        if (axis == "length") return true;
        auto it = row.assignment.find(axis);
        return it != row.assignment.end() && it->second.dump() == v;
      };
      if (!matches(axis_x, xv) || !matches(axis_y, yv)) continue;
      std::string key = metric;
      if (axis_x == "length") key = "ood_acc_" + xv;
      if (axis_y == "length") key = "ood_acc_" + yv;
      auto it = row.mean.find(key);
      if (it != row.mean.end()) return it->second;
    }
    return std::nullopt;
  };

  const int cell = 64, margin_left = 90, margin_top = 40;
  const int width = margin_left + cell * static_cast<int>(xs.size()) + 20;
  const int height = margin_top + cell * static_cast<int>(ys.size()) + 20;

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("emit_heatmap: cannot open " + out_path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<text x=\"" << margin_left << "\" y=\"16\" font-size=\"13\">"
      << metric << " (" << axis_x << " vs " << axis_y << ")</text>\n";
  for (std::size_t xi = 0; xi < xs.size(); ++xi) {
    out << "<text x=\"" << margin_left + cell * xi + cell / 2 << "\" y=\""
        << margin_top - 6 << "\" font-size=\"11\" text-anchor=\"middle\">"
        << xs[xi] << "</text>\n";
  }
  for (std::size_t yi = 0; yi < ys.size(); ++yi) {
    out << "<text x=\"" << margin_left - 6 << "\" y=\""
        << margin_top + cell * yi + cell / 2 + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << ys[yi]
        << "</text>\n";
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
      const auto value = cell_value(xs[xi], ys[yi]);
      std::string fill = "#dddddd";
      std::string label = "-";
      if (value) {
        const double v = std::clamp(*value, 0.0, 1.0);
        const int r = static_cast<int>(255 * (1.0 - v));
        const int g = static_cast<int>(255 * v);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "#%02x%02x50", r, g);
        fill = buf;
        std::snprintf(buf, sizeof(buf), "%.3f", *value);
        label = buf;
      }
      out << "<rect x=\"" << margin_left + cell * xi << "\" y=\""
          << margin_top + cell * yi << "\" width=\"" << cell << "\" height=\""
          << cell << "\" fill=\"" << fill
          << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
      out << "<text x=\"" << margin_left + cell * xi + cell / 2 << "\" y=\""
          << margin_top + cell * yi + cell / 2 + 4
          << "\" font-size=\"11\" text-anchor=\"middle\">" << label
          << "</text>\n";
    }
  }
  out << "</svg>\n";
}

SweepSpec preset(const std::string& name) {
  SweepSpec spec;
  TrainConfig& base = spec.base;
  if (name == "underparam") {
    base.p = 31;
    base.lengths = {3};
    base.d = 64;
    base.n_train = 3000;
    base.epochs = 5000;
    base.optim.kind = OptimKind::AdamW;
    base.optim.lr = 1e-3;
    base.optim.weight_decay = 0.0;
    base.optim.wd_policy = WdPolicy::None;
    spec.grid["act"] = {json("sine"), json("relu")};
    spec.report = ReportMode::All;
  } else if (name == "overparam-sine" || name == "overparam-relu") {
    base.p = 23;
    base.lengths = {2};
    base.d = 1024;
    base.n_train = 2000;
    base.epochs = 1500;
    base.optim.kind = OptimKind::Muon;
    base.optim.lr = 1e-3;
    if (name == "overparam-sine") {
      base.act = Activation::Sine;
      base.optim.wd_policy = WdPolicy::VOnly;
    } else {
      base.act = Activation::Relu;
      base.optim.wd_policy = WdPolicy::Both;
    }
    spec.grid["weight_decay"] = {json(0.3), json(0.1),  json(0.03),
                                 json(0.01), json(0.003), json(0.001),
                                 json(0.0)};
    spec.report = ReportMode::BestOverWd;
  } else if (name == "ood-p97" || name == "ood-p53") {
    base.p = name == "ood-p97" ? 97 : 53;
    base.lengths = {2, 3, 4, 5, 7, 13, 19};
    base.d = 256;
    base.n_train = name == "ood-p97" ? 8000 : 4000;
    base.epochs = 2000;
    base.optim.kind = OptimKind::Muon;
    base.optim.lr = 1e-3;
    base.eval_lengths = {14, 38, 53, 97, 201, 303, 401, 512, 602, 705, 811};
    spec.grid["act"] = {json("sine"), json("relu")};
    spec.grid["weight_decay"] = {json(0.3), json(0.1),  json(0.03),
                                 json(0.01), json(0.003), json(0.001),
                                 json(0.0)};
    spec.report = ReportMode::BestOverWd;
  } else if (name == "ood-bias") {
    base.p = 53;
    base.lengths = {2, 3, 4, 5, 7, 13, 19};
    base.d = 256;
    base.n_train = 4000;
    base.epochs = 2000;
    base.act = Activation::Sine;
    base.optim.kind = OptimKind::Muon;
    base.optim.lr = 1e-3;
    base.optim.wd_policy = WdPolicy::VOnly;
    base.eval_lengths = {14, 38, 53, 97, 201, 303, 401, 512, 602, 705, 811};
    spec.grid["bias"] = {json(false), json(true)};
    spec.grid["weight_decay"] = {json(0.3), json(0.1),  json(0.03),
                                 json(0.01), json(0.003), json(0.001),
                                 json(0.0)};
    spec.report = ReportMode::BestOverWd;
  } else {
    throw std::invalid_argument("preset: unknown name '" + name + "'");
  }
  return spec;
}

}  // namespace modadd
