// Training loop: seeded init, static (re)shuffled training sets,
// mini-batches, per-epoch metric logging, multi-length shards, and
// fixed held-out OOD evaluation sets.
#pragma once

#include <functional>
#include <map>

#include "modadd/metrics.hpp"
#include "modadd/optim.hpp"

namespace modadd {

struct TrainConfig {
  int p = 2;
  std::vector<int> lengths = {2};  // one entry = single-length training
  int d = 32;
  Activation act = Activation::Sine;
  bool bias = false;
  std::size_t n_train = 1000;      // total budget, split across lengths
  int epochs = 1000;
  std::size_t batch = 1024;
  OptimConfig optim;
  std::uint64_t seed = 1337;
  double init_std = 0.01;
  std::vector<int> eval_lengths;   // extra OOD lengths evaluated at log time
  std::size_t test_n = 10000;
  int log_every = 0;               // 0 = ceil(epochs / 200)

  void validate() const;
};

struct RunRecord {
  int epoch = 0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double loss = 0.0;
  double min_margin = 0.0;
  double pct05_margin = 0.0;
  double v_spectral = 0.0;
  double w_frobenius = 0.0;
  double v_row_l1 = 0.0;
  double norm_margin_relu = 0.0;
  double norm_margin_sine = 0.0;
  std::map<int, double> ood_acc;   // length -> accuracy
  double wallclock_sec = 0.0;
};

struct TrainResult {
  std::vector<RunRecord> records;
  MlpParams params;
  bool diverged = false;
  std::uint64_t config_hash = 0;
};

// Stream-id conventions (per length m): training data seed*1009+m,
// test data seed*2009+m, epoch shuffles seed*3009+epoch, init seed*4009.
std::uint64_t train_stream_id(std::uint64_t seed, int m);
std::uint64_t test_stream_id(std::uint64_t seed, int m);
std::uint64_t shuffle_stream_id(std::uint64_t seed, int epoch);
std::uint64_t init_stream_id(std::uint64_t seed);

// Split a total budget across lengths as evenly as possible; earlier
// lengths receive the remainder.
std::vector<std::size_t> shard_budgets(std::size_t total, std::size_t k);

// Deterministic hash of the serialized config.
std::uint64_t config_hash(const TrainConfig& cfg);

// Runs single- or multi-length training depending on cfg.lengths.
// Non-finite loss aborts with the partial records and diverged = true.
TrainResult train(const TrainConfig& cfg,
                  const std::function<void(const RunRecord&)>& on_record = {});

// Accuracy on fixed held-out sets, one per length (stream seed*2009+m).
std::map<int, EvalSummary> evaluate_ood(const MlpParams& theta,
                                        const std::vector<int>& lengths,
                                        std::size_t test_n,
                                        std::uint64_t seed);

}  // namespace modadd
