#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "modadd/constructions.hpp"
#include "modadd/model.hpp"

using namespace modadd;

namespace {

constexpr double kPi = 3.14159265358979323846;

MlpParams random_net(RngStream& rng, int d, int p, Activation act, bool bias) {
  MlpParams theta;
  theta.act = act;
  theta.W = Matrix(d, p);
  theta.V = Matrix(p, d);
  for (double& v : theta.W.data) v = rng.normal(0.0, 0.5);
  for (double& v : theta.V.data) v = rng.normal(0.0, 0.5);
  if (bias) {
    theta.bias = std::vector<double>(d);
    for (double& v : *theta.bias) v = rng.normal(0.0, 0.5);
  }
  return theta;
}

}  // namespace

TEST_CASE("width-2 sine scores are cosines of the label gap") {
  const TaskSpec spec{3, 2};
  const MlpParams theta = sine_width2_fixed(spec);
  const LabeledSet dom = enumerate_domain(spec);
  for (const auto& item : dom.items) {
    const auto s = scores(theta, item.x);
    for (int q = 0; q < 3; ++q) {
      const double expect = std::cos(2.0 * kPi / 3.0 * (item.y - q));
      CHECK(s[q] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero network gives zero scores") {
  MlpParams theta;
  theta.act = Activation::Relu;
  theta.W = Matrix(4, 3);
  theta.V = Matrix(3, 4);
  const auto s = scores(theta, BagVector{1, 1, 0});
  for (double v : s) CHECK(v == 0.0);
}

TEST_CASE("sine scores are 2pi-periodic in W entries on integer inputs") {
  RngStream rng(5, 5);
  MlpParams theta = random_net(rng, 6, 4, Activation::Sine, false);
  const BagVector x{2, 0, 1, 0};
  const auto before = scores(theta, x);
  theta.W.at(2, 0) += 2.0 * kPi;  // x[0] = 2: shifts the preactivation by 4pi
  const auto after = scores(theta, x);
  for (std::size_t q = 0; q < before.size(); ++q)
    CHECK(std::fabs(before[q] - after[q]) <= 1e-12);
}

TEST_CASE("predict handles unique maxima and ties") {
  CHECK(predict_from_scores({2.0, 0.0, 1.0}) == 0);
  CHECK(predict_from_scores({1.0, 1.0, 0.0}) == kInvalidPrediction);

  // Half-width net with odd p: residue 0 inputs score zero everywhere.
  const MlpParams theta = sine_halfp_unbiased(5);
  const BagVector x{2, 0, 0, 0, 0};  // label 0
  CHECK(predict(theta, x) == kInvalidPrediction);
}

TEST_CASE("cross entropy on zero scores and a hand case") {
  MlpParams theta;
  theta.act = Activation::Relu;
  theta.W = Matrix(2, 4);
  theta.V = Matrix(4, 2);
  LabeledSet set;
  set.spec = {4, 2};
  set.items = {{{2, 0, 0, 0}, 0}};
  CHECK(cross_entropy(theta, set) == doctest::Approx(std::log(4.0)));

  // Single item, scores (ln 2, 0), y = 0, p = 2: -ln(2/3).
  MlpParams two;
  two.act = Activation::Relu;
  two.W = Matrix(1, 2);
  two.W.at(0, 0) = std::log(2.0) / 2.0;
  two.V = Matrix(2, 1);
  two.V.at(0, 0) = 1.0;
  LabeledSet single;
  single.spec = {2, 2};
  single.items = {{{2, 0}, 0}};
  const auto s = scores(two, BagVector{2, 0});
  CHECK(s[0] == doctest::Approx(std::log(2.0)));
  CHECK(s[1] == 0.0);
  CHECK(cross_entropy(two, single) == doctest::Approx(-std::log(2.0 / 3.0)));
}

TEST_CASE("cross entropy decreases as the margin grows") {
  LabeledSet set;
  set.spec = {3, 2};
  set.items = {{{1, 1, 0}, 1}};
  double prev = std::numeric_limits<double>::infinity();
  for (double scale : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    MlpParams theta = sine_width2_fixed({3, 2});
    for (double& v : theta.V.data) v *= scale;
    const double ce = cross_entropy(theta, set);
    CHECK(ce < prev);
    prev = ce;
  }
}

TEST_CASE("V=0 makes dW vanish") {
  RngStream rng(8, 2);
  MlpParams theta = random_net(rng, 5, 3, Activation::Sine, false);
  theta.V = Matrix(3, 5);
  LabeledSet batch;
  batch.spec = {3, 2};
  batch.items = {{{1, 1, 0}, 1}, {{0, 2, 0}, 2}};
  const Gradients g = grad_cross_entropy(theta, batch);
  for (double v : g.dW.data) CHECK(v == 0.0);
}

TEST_CASE("relu unit dead on the whole batch has zero W-row gradient") {
  MlpParams theta;
  theta.act = Activation::Relu;
  theta.W = Matrix(2, 3, -1.0);  // both units strictly negative on any bag
  theta.W.at(1, 0) = 2.0;        // second unit alive on bags containing 0
  theta.V = Matrix(3, 2, 0.7);
  LabeledSet batch;
  batch.spec = {3, 2};
  batch.items = {{{1, 1, 0}, 1}, {{1, 0, 1}, 2}};
  const Gradients g = grad_cross_entropy(theta, batch);
  for (int j = 0; j < 3; ++j) CHECK(g.dW.at(0, j) == 0.0);
  bool any_alive = false;
  for (int j = 0; j < 3; ++j) any_alive = any_alive || g.dW.at(1, j) != 0.0;
  CHECK(any_alive);
}

TEST_CASE("analytic gradients match central finite differences") {
  RngStream rng(1337, 77);
  const double h = 1e-5;
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform_int(8));
    const int p = 2 + static_cast<int>(rng.uniform_int(4));
    const Activation act =
        trial % 2 == 0 ? Activation::Sine : Activation::Relu;
    const bool bias = (trial / 2) % 2 == 0;
    MlpParams theta = random_net(rng, d, p, act, bias);

    LabeledSet batch;
    batch.spec = {p, 3};
    for (int i = 0; i < 4; ++i) {
      std::vector<int> seq;
      for (int j = 0; j < 3; ++j)
        seq.push_back(static_cast<int>(rng.uniform_int(p)));
      LabeledItem item;
      item.x = encode(seq, batch.spec);
      item.y = label_of(item.x, batch.spec);
      batch.items.push_back(item);
    }

    const Gradients g = grad_cross_entropy(theta, batch);
    auto check_entry = [&](double* param, double analytic) {
      const double saved = *param;
      *param = saved + h;
      const double up = cross_entropy(theta, batch);
      *param = saved - h;
      const double down = cross_entropy(theta, batch);
      *param = saved;
      const double fd = (up - down) / (2.0 * h);
      const double denom = std::max({std::fabs(fd), std::fabs(analytic), 1e-4});
      CHECK(std::fabs(fd - analytic) / denom <= 1e-6);
      ++checked;
    };
    // Probe a few entries of each parameter rather than every coordinate.
    const std::size_t wi = rng.uniform_int(theta.W.size());
    check_entry(&theta.W.data[wi], g.dW.data[wi]);
    const std::size_t vi = rng.uniform_int(theta.V.size());
    check_entry(&theta.V.data[vi], g.dV.data[vi]);
    if (bias) {
      const std::size_t bi = rng.uniform_int(theta.bias->size());
      check_entry(&(*theta.bias)[bi], (*g.db)[bi]);
    }
  }
  CHECK(checked >= 250);
}

TEST_CASE("relu scores are positively homogeneous without bias") {
  RngStream rng(4, 4);
  const MlpParams theta = random_net(rng, 7, 5, Activation::Relu, false);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(5);
    for (double& v : x) v = rng.normal(0.0, 1.0);
    const double alpha = 0.25 + 3.0 * rng.uniform01();
    const auto s1 = scores(theta, x);
    std::vector<double> ax(x);
    for (double& v : ax) v *= alpha;
    const auto s2 = scores(theta, ax);
    for (std::size_t q = 0; q < s1.size(); ++q)
      CHECK(s2[q] == doctest::Approx(alpha * s1[q]).epsilon(1e-10));
  }
}

TEST_CASE("predict never returns a non-strict maximum") {
  RngStream rng(12, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(4);
    for (double& v : s) v = std::round(rng.normal(0.0, 1.0) * 4.0) / 4.0;
    const int pred = predict_from_scores(s);
    if (pred == kInvalidPrediction) continue;
    for (std::size_t q = 0; q < s.size(); ++q) {
      if (static_cast<int>(q) != pred) CHECK(s[pred] > s[q]);
    }
  }
}

TEST_CASE("checkpoint round trip is bit stable") {
  RngStream rng(31, 9);
  const MlpParams theta = random_net(rng, 6, 4, Activation::Sine, true);
  const std::string path = "test_model_ckpt.json";
  save_checkpoint(theta, path);
  const MlpParams loaded = load_checkpoint(path);
  CHECK(loaded.act == theta.act);
  REQUIRE(loaded.W.data.size() == theta.W.data.size());
  for (std::size_t i = 0; i < theta.W.data.size(); ++i)
    CHECK(loaded.W.data[i] == theta.W.data[i]);
  for (std::size_t i = 0; i < theta.V.data.size(); ++i)
    CHECK(loaded.V.data[i] == theta.V.data[i]);
  REQUIRE(loaded.bias.has_value());
  for (std::size_t i = 0; i < theta.bias->size(); ++i)
    CHECK((*loaded.bias)[i] == (*theta.bias)[i]);
  std::remove(path.c_str());
}

TEST_CASE("batched forward agrees with single-input scores") {
  RngStream rng(15, 2);
  const MlpParams theta = random_net(rng, 9, 6, Activation::Sine, true);
  LabeledSet set;
  set.spec = {6, 3};
  for (int i = 0; i < 10; ++i) {
    std::vector<int> seq;
    for (int j = 0; j < 3; ++j)
      seq.push_back(static_cast<int>(rng.uniform_int(6)));
    LabeledItem item;
    item.x = encode(seq, set.spec);
    item.y = label_of(item.x, set.spec);
    set.items.push_back(item);
  }
  const Matrix S = forward_batch(theta, batch_inputs(set));
  for (std::size_t i = 0; i < set.items.size(); ++i) {
    const auto s = scores(theta, set.items[i].x);
    for (int q = 0; q < 6; ++q)
      CHECK(S.at(i, q) == doctest::Approx(s[q]).epsilon(1e-13));
  }
}
