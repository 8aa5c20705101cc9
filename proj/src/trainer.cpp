#include "modadd/trainer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace modadd {

void TrainConfig::validate() const {
  if (p < 2) throw std::invalid_argument("TrainConfig: p must be >= 2");
  if (lengths.empty())
    throw std::invalid_argument("TrainConfig: lengths must be nonempty");
  for (int m : lengths) {
    if (m < 2) throw std::invalid_argument("TrainConfig: lengths must be >= 2");
  }
  if (d < 1) throw std::invalid_argument("TrainConfig: d must be >= 1");
  if (n_train < lengths.size())
    throw std::invalid_argument("TrainConfig: per-length budgets must be >= 1");
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (batch < 1) throw std::invalid_argument("TrainConfig: batch must be >= 1");
  if (test_n < 1) throw std::invalid_argument("TrainConfig: test_n must be >= 1");
  if (!(init_std > 0))
    throw std::invalid_argument("TrainConfig: init_std must be > 0");
  optim.validate();
}

std::uint64_t train_stream_id(std::uint64_t seed, int m) {
  return seed * 1009 + static_cast<std::uint64_t>(m);
}
std::uint64_t test_stream_id(std::uint64_t seed, int m) {
  return seed * 2009 + static_cast<std::uint64_t>(m);
}
std::uint64_t shuffle_stream_id(std::uint64_t seed, int epoch) {
  return seed * 3009 + static_cast<std::uint64_t>(epoch);
}
std::uint64_t init_stream_id(std::uint64_t seed) { return seed * 4009; }

std::vector<std::size_t> shard_budgets(std::size_t total, std::size_t k) {
  if (k == 0) throw std::invalid_argument("shard_budgets: k must be >= 1");
  std::vector<std::size_t> out(k, total / k);
  for (std::size_t i = 0; i < total % k; ++i) ++out[i];
  return out;
}

std::uint64_t config_hash(const TrainConfig& cfg) {
  std::ostringstream os;
  os << "p=" << cfg.p << ";lengths=";
  for (int m : cfg.lengths) os << m << ",";
  os << ";d=" << cfg.d << ";act=" << activation_name(cfg.act)
     << ";bias=" << cfg.bias << ";n=" << cfg.n_train
     << ";epochs=" << cfg.epochs << ";batch=" << cfg.batch
     << ";optim=" << optim_kind_name(cfg.optim.kind)
     << ";lr=" << cfg.optim.lr << ";wd=" << cfg.optim.weight_decay
     << ";b1=" << cfg.optim.beta1 << ";b2=" << cfg.optim.beta2
     << ";eps=" << cfg.optim.eps << ";mom=" << cfg.optim.momentum
     << ";nesterov=" << cfg.optim.nesterov << ";ns=" << cfg.optim.ns_steps
     << ";wdp=" << wd_policy_name(cfg.optim.wd_policy)
     << ";init=" << cfg.init_std << ";testn=" << cfg.test_n << ";eval=";
  for (int m : cfg.eval_lengths) os << m << ",";
  const std::string s = os.str();
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

MlpParams init_params(const TrainConfig& cfg) {
  MlpParams theta;
  theta.act = cfg.act;
  theta.W = Matrix(cfg.d, cfg.p);
  theta.V = Matrix(cfg.p, cfg.d);
  RngStream rng(cfg.seed, init_stream_id(cfg.seed));
  for (double& v : theta.W.data) v = rng.normal(0.0, cfg.init_std);
  for (double& v : theta.V.data) v = rng.normal(0.0, cfg.init_std);
  if (cfg.bias) {
    theta.bias = std::vector<double>(cfg.d);
    for (double& v : *theta.bias) v = rng.normal(0.0, cfg.init_std);
  }
  return theta;
}

struct Shard {
  Matrix X;                 // n x p
  std::vector<int> labels;
  std::vector<std::size_t> order;
};

}  // namespace

std::map<int, EvalSummary> evaluate_ood(const MlpParams& theta,
                                        const std::vector<int>& lengths,
                                        std::size_t test_n,
                                        std::uint64_t seed) {
  std::map<int, EvalSummary> out;
  const int p = static_cast<int>(theta.p());
  for (int m : lengths) {
    RngStream rng(seed, test_stream_id(seed, m));
    const LabeledSet set = sample_set(TaskSpec{p, m}, test_n, rng);
    out[m] = evaluate(theta, set);
  }
  return out;
}

TrainResult train(const TrainConfig& cfg,
                  const std::function<void(const RunRecord&)>& on_record) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  // Static per-length training shards.
  const auto budgets = shard_budgets(cfg.n_train, cfg.lengths.size());
  std::vector<Shard> shards(cfg.lengths.size());
  LabeledSet full_train;  // concatenation, for metric reports
  full_train.spec = TaskSpec{cfg.p, cfg.lengths[0]};
  for (std::size_t si = 0; si < cfg.lengths.size(); ++si) {
    RngStream rng(cfg.seed, train_stream_id(cfg.seed, cfg.lengths[si]));
    const LabeledSet set =
        sample_set(TaskSpec{cfg.p, cfg.lengths[si]}, budgets[si], rng);
    shards[si].X = batch_inputs(set);
    shards[si].labels.resize(set.items.size());
    for (std::size_t i = 0; i < set.items.size(); ++i)
      shards[si].labels[i] = set.items[i].y;
    shards[si].order.resize(set.items.size());
    for (std::size_t i = 0; i < set.items.size(); ++i) shards[si].order[i] = i;
    full_train.items.insert(full_train.items.end(), set.items.begin(),
                            set.items.end());
  }

  // Fixed test sets, one per in-domain length, identical across epochs.
  std::vector<LabeledSet> test_sets;
  for (int m : cfg.lengths) {
    RngStream rng(cfg.seed, test_stream_id(cfg.seed, m));
    test_sets.push_back(sample_set(TaskSpec{cfg.p, m}, cfg.test_n, rng));
  }

  TrainResult result;
  result.config_hash = config_hash(cfg);
  result.params = init_params(cfg);
  OptimState state = OptimState::init_for(result.params);

  const int log_every =
      cfg.log_every > 0 ? cfg.log_every
                        : std::max(1, (cfg.epochs + 199) / 200);

  Matrix bx;
  std::vector<int> blabels;
  auto log_record = [&](int epoch) {
    RunRecord rec;
    rec.epoch = epoch;
    rec.loss = cross_entropy(result.params, full_train);
    rec.train_acc = evaluate(result.params, full_train).accuracy;
    const MarginReport rep = margin_report(result.params, full_train);
    rec.min_margin = rep.min_margin;
    rec.pct05_margin = rep.pct05_margin;
    rec.v_spectral = rep.v_spectral;
    rec.w_frobenius = rep.w_frobenius;
    rec.v_row_l1 = rep.v_row_l1;
    rec.norm_margin_relu = rep.norm_margin_relu;
    rec.norm_margin_sine = rep.norm_margin_sine;
    double acc_sum = 0.0;
    for (std::size_t si = 0; si < test_sets.size(); ++si) {
      const EvalSummary s = evaluate(result.params, test_sets[si]);
      rec.ood_acc[cfg.lengths[si]] = s.accuracy;
      acc_sum += s.accuracy;
    }
    rec.test_acc = acc_sum / static_cast<double>(test_sets.size());
    if (!cfg.eval_lengths.empty()) {
      const auto ood =
          evaluate_ood(result.params, cfg.eval_lengths, cfg.test_n, cfg.seed);
      for (const auto& [m, s] : ood) rec.ood_acc[m] = s.accuracy;
    }
    rec.wallclock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    result.records.push_back(rec);
    if (on_record) on_record(rec);
  };

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // Reshuffle every shard; one stream per epoch, shards in order.
    RngStream shuffle_rng(cfg.seed, shuffle_stream_id(cfg.seed, epoch));
    for (auto& shard : shards) {
      for (std::size_t i = shard.order.size(); i > 1; --i) {
        const std::size_t j = shuffle_rng.uniform_int(i);
        std::swap(shard.order[i - 1], shard.order[j]);
      }
    }

    std::size_t max_batches = 0;
    for (const auto& shard : shards)
      max_batches = std::max(
          max_batches, (shard.order.size() + cfg.batch - 1) / cfg.batch);

    for (std::size_t b = 0; b < max_batches; ++b) {
      for (auto& shard : shards) {
        const std::size_t lo = b * cfg.batch;
        if (lo >= shard.order.size()) continue;
        const std::size_t hi =
            std::min(shard.order.size(), lo + cfg.batch);
        bx = Matrix(hi - lo, cfg.p);
        blabels.resize(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
          const std::size_t src = shard.order[i];
          std::copy(shard.X.row(src), shard.X.row(src) + cfg.p,
                    bx.row(i - lo));
          blabels[i - lo] = shard.labels[src];
        }
        double loss = 0.0;
        const Gradients g =
            grad_cross_entropy(result.params, bx, blabels, &loss);
        if (!std::isfinite(loss)) {
          result.diverged = true;
          return result;
        }
        optimizer_step(result.params, g, cfg.optim, state);
      }
    }

    if (epoch % log_every == 0 && epoch != cfg.epochs) log_record(epoch);
  }
  log_record(cfg.epochs);
  return result;
}

}  // namespace modadd
