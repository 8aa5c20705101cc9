#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "modadd/constructions.hpp"
#include "modadd/trainer.hpp"

using namespace modadd;

namespace {

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.p = 7;
  cfg.lengths = {2};
  cfg.d = 32;
  cfg.act = Activation::Sine;
  cfg.n_train = 500;
  cfg.epochs = 40;
  cfg.batch = 1024;
  cfg.optim.kind = OptimKind::AdamW;
  cfg.optim.lr = 1e-3;
  cfg.seed = 1337;
  cfg.test_n = 500;
  cfg.log_every = 10;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  TrainConfig cfg = small_config();
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.lengths = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.lengths = {2, 3, 4, 5, 6, 7, 8};
  cfg.n_train = 3;  // fewer samples than lengths
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("shard budgets split evenly with leading remainders") {
  const auto b = shard_budgets(4000, 7);
  int n572 = 0, n571 = 0;
  std::size_t total = 0;
  for (std::size_t v : b) {
    total += v;
    n572 += v == 572;
    n571 += v == 571;
  }
  CHECK(total == 4000);
  CHECK(n572 == 3);
  CHECK(n571 == 4);
}

TEST_CASE("training is bitwise deterministic") {
  const TrainConfig cfg = small_config();
  const TrainResult a = train(cfg);
  const TrainResult b = train(cfg);
  REQUIRE(a.params.W.size() == b.params.W.size());
  for (std::size_t i = 0; i < a.params.W.size(); ++i)
    CHECK(a.params.W.data[i] == b.params.W.data[i]);
  for (std::size_t i = 0; i < a.params.V.size(); ++i)
    CHECK(a.params.V.data[i] == b.params.V.data[i]);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].loss == b.records[i].loss);
    CHECK(a.records[i].train_acc == b.records[i].train_acc);
  }
}

TEST_CASE("loss is non-increasing over the first ten epochs at lr 1e-3") {
  for (Activation act : {Activation::Sine, Activation::Relu}) {
    TrainConfig cfg = small_config();
    cfg.act = act;
    cfg.epochs = 10;
    cfg.log_every = 1;
    const TrainResult result = train(cfg);
    REQUIRE(result.records.size() == 10);
    for (std::size_t i = 1; i < result.records.size(); ++i)
      CHECK(result.records[i].loss <= result.records[i - 1].loss + 1e-12);
  }
}

TEST_CASE("desk-scale sine run interpolates (m,p,d,n)=(2,7,32,500)") {
  TrainConfig cfg = small_config();
  cfg.epochs = 1200;
  cfg.log_every = 1200;
  const TrainResult result = train(cfg);
  CHECK(!result.diverged);
  CHECK(result.records.back().train_acc == 1.0);
}

TEST_CASE("multi-length shards are per-length prefixes of larger budgets") {
  // Budgets 300 vs 600 over lengths {2,3}: per-length shards must agree
  // on their common prefix because the stream id depends only on m.
  TrainConfig small = small_config();
  small.lengths = {2, 3};
  small.n_train = 300;

  const auto budgets_small = shard_budgets(300, 2);
  const auto budgets_large = shard_budgets(600, 2);
  for (std::size_t si = 0; si < 2; ++si) {
    const int m = small.lengths[si];
    RngStream r1(small.seed, train_stream_id(small.seed, m));
    RngStream r2(small.seed, train_stream_id(small.seed, m));
    const LabeledSet a = sample_set({small.p, m}, budgets_small[si], r1);
    const LabeledSet b = sample_set({small.p, m}, budgets_large[si], r2);
    REQUIRE(b.items.size() >= a.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i)
      CHECK(a.items[i].x == b.items[i].x);
  }
}

TEST_CASE("ood evaluation: constructions hit their population accuracies") {
  // Uniform-in-length biased net: accuracy 1 at every length.
  const MlpParams biased = sine_width2_biased_uniform(5);
  const auto perfect = evaluate_ood(biased, {2, 3, 7, 19, 50}, 2000, 1337);
  for (const auto& [m, summary] : perfect) CHECK(summary.accuracy == 1.0);

  // Half-width net at p=11: accuracy ~ 1 - 1/11 within 3 sigma.
  const MlpParams halfp = sine_halfp_unbiased(11);
  const auto near = evaluate_ood(halfp, {2, 5, 23}, 10000, 1337);
  const double target = 1.0 - 1.0 / 11.0;
  const double sigma = std::sqrt(target * (1 - target) / 10000.0);
  for (const auto& [m, summary] : near)
    CHECK(std::fabs(summary.accuracy - target) <= 3 * sigma);

  // Untrained random net: chance level within 3 sigma.
  RngStream rng(42, 42);
  MlpParams random_net;
  random_net.act = Activation::Relu;
  random_net.W = Matrix(16, 11);
  random_net.V = Matrix(11, 16);
  for (double& v : random_net.W.data) v = rng.normal(0, 1);
  for (double& v : random_net.V.data) v = rng.normal(0, 1);
  const auto chance = evaluate_ood(random_net, {3}, 10000, 1337);
  const double c = 1.0 / 11.0;
  CHECK(std::fabs(chance.at(3).accuracy - c) <=
        3 * std::sqrt(c * (1 - c) / 10000.0));
}

TEST_CASE("ood test sets are identical across calls") {
  const MlpParams theta = sine_width2_biased_uniform(5);
  const auto a = evaluate_ood(theta, {4, 9}, 500, 7);
  const auto b = evaluate_ood(theta, {4, 9}, 500, 7);
  for (const auto& [m, summary] : a) {
    CHECK(b.at(m).accuracy == summary.accuracy);
    CHECK(b.at(m).n == summary.n);
  }
}

TEST_CASE("multi-length training with bias routes bias through adamw") {
  TrainConfig cfg;
  cfg.p = 5;
  cfg.lengths = {2, 3};
  cfg.d = 16;
  cfg.act = Activation::Sine;
  cfg.bias = true;
  cfg.n_train = 200;
  cfg.epochs = 30;
  cfg.optim.kind = OptimKind::Muon;
  cfg.optim.lr = 1e-3;
  cfg.optim.weight_decay = 0.01;
  cfg.optim.wd_policy = WdPolicy::VOnly;
  cfg.seed = 1337;
  cfg.test_n = 200;
  cfg.log_every = 30;
  const TrainResult result = train(cfg);
  CHECK(!result.diverged);
  REQUIRE(result.params.bias.has_value());
  bool moved = false;
  for (double v : *result.params.bias) moved = moved || v != 0.0;
  CHECK(moved);
}

TEST_CASE("config hash distinguishes configs") {
  TrainConfig a = small_config();
  TrainConfig b = small_config();
  CHECK(config_hash(a) == config_hash(b));
  b.optim.weight_decay = 0.123;
  CHECK(config_hash(a) != config_hash(b));
  b = small_config();
  b.d = 33;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("stream id conventions") {
  CHECK(train_stream_id(1337, 3) == 1337 * 1009 + 3);
  CHECK(test_stream_id(1337, 3) == 1337 * 2009 + 3);
  CHECK(shuffle_stream_id(1337, 17) == 1337 * 3009 + 17);
}
