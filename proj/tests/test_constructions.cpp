#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "modadd/constructions.hpp"
#include "modadd/metrics.hpp"

using namespace modadd;

namespace {
constexpr double kPi = 3.14159265358979323846;

double exhaustive_accuracy(const MlpParams& theta, const TaskSpec& spec) {
  return evaluate(theta, enumerate_domain(spec)).accuracy;
}

double min_margin(const MlpParams& theta, const TaskSpec& spec) {
  return margin_report(theta, enumerate_domain(spec)).min_margin;
}
}  // namespace

TEST_CASE("width-2 sine: exact on X_m, margin 1-cos(2pi/p)") {
  CHECK(exhaustive_accuracy(sine_width2_fixed({3, 2}), {3, 2}) == 1.0);
  CHECK(min_margin(sine_width2_fixed({4, 3}), {4, 3}) ==
        doctest::Approx(1.0).epsilon(1e-9));  // 1 - cos(pi/2) = 1
  for (int p = 2; p <= 50; ++p) {
    const TaskSpec spec{p, 2};
    const double margin = min_margin(sine_width2_fixed(spec), spec);
    CHECK(margin >= 8.0 / (static_cast<double>(p) * p) - 1e-9);
    CHECK(margin == doctest::Approx(1.0 - std::cos(2.0 * kPi / p)).epsilon(1e-9));
  }
}

TEST_CASE("width-2 sine entries lie in [-pi, pi)") {
  const MlpParams theta = sine_width2_fixed({7, 4});
  for (double v : theta.W.data) {
    CHECK(v >= -kPi);
    CHECK(v < kPi);
  }
}

TEST_CASE("biased width-2 sine is exact at every length") {
  for (int m : {2, 3, 4}) {
    CHECK(exhaustive_accuracy(sine_width2_biased_uniform(5), {5, m}) == 1.0);
  }
  CHECK(exhaustive_accuracy(sine_width2_biased_uniform(2), {2, 7}) == 1.0);

  // Correct-class score is exactly 1.
  const MlpParams theta = sine_width2_biased_uniform(7);
  const LabeledSet dom = enumerate_domain({7, 3});
  for (const auto& item : dom.items)
    CHECK(scores(theta, item.x)[item.y] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("half-width sine accuracy is 1-1/p (odd) and 1-2/p (even)") {
  CHECK(exhaustive_accuracy(sine_halfp_unbiased(5), {5, 3}) ==
        doctest::Approx(4.0 / 5.0));
  CHECK(evaluate_weighted(sine_halfp_unbiased(5), enumerate_domain({5, 3})) ==
        doctest::Approx(4.0 / 5.0).epsilon(1e-12));
  CHECK(evaluate_weighted(sine_halfp_unbiased(6), enumerate_domain({6, 2})) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // Correct score is p/4 for nonzero residues (odd p).
  const MlpParams theta = sine_halfp_unbiased(5);
  const LabeledSet dom = enumerate_domain({5, 3});
  for (const auto& item : dom.items) {
    if (item.y == 0) continue;
    CHECK(scores(theta, item.x)[item.y] ==
          doctest::Approx(5.0 / 4.0).epsilon(1e-9));
  }
}

TEST_CASE("2p-width sine: margin exactly p, singular values sqrt(p)") {
  const TaskSpec spec{5, 3};
  const MlpParams theta = sine_highmargin_2p(spec);
  const MarginReport rep = margin_report(theta, enumerate_domain(spec));
  CHECK(rep.min_margin == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(exhaustive_accuracy(theta, spec) == 1.0);
  CHECK(exhaustive_accuracy(sine_highmargin_2p({2, 2}), {2, 2}) == 1.0);

  for (int p : {2, 3, 5, 7, 11, 13, 17}) {
    const MlpParams net = sine_highmargin_2p({p, 2});
    Matrix gram;
    gemm_nt(net.V, net.V, gram);
    for (int q = 0; q < p; ++q) {
      for (int r = 0; r < p; ++r) {
        CHECK(std::fabs(gram.at(q, r) - (q == r ? p : 0.0)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("polarization identity") {
  // s = 1 is the identity.
  const auto id = polarize(1);
  CHECK(polarize_eval(id, {3.5}) == doctest::Approx(3.5));

  // s = 2 hand case: ((x1+x2)^2 - (x1-x2)^2) / 8 = x1 x2 / 2... scaled form.
  const auto two = polarize(2);
  CHECK(polarize_eval(two, {3.0, 4.0}) == doctest::Approx(12.0).epsilon(1e-12));

  RngStream rng(17, 4);
  const auto five = polarize(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(5);
    double prod = 1.0;
    for (double& v : x) {
      v = 2.0 * rng.uniform01() - 1.0;
      prod *= v;
    }
    CHECK(std::fabs(polarize_eval(five, x) - prod) <= 1e-9);
  }
  CHECK_THROWS_AS(polarize(0), std::invalid_argument);
  CHECK_THROWS_AS(polarize(13), std::invalid_argument);
}

TEST_CASE("relu spline: s=2 N=7 table and exactness for s=1") {
  const auto units = relu_spline_power(2, 7);
  REQUIRE(units.size() == 8);
  CHECK(units[0].c == doctest::Approx(-17.0 / 14.0));
  CHECK(units[0].a == 1.0);
  CHECK(units[0].b == -1.0);
  CHECK(units[1].c == doctest::Approx(0.5));
  CHECK(units[1].a == -1.0);
  CHECK(units[1].b == -1.0);
  for (std::size_t i = 2; i < units.size(); ++i)
    CHECK(units[i].c == doctest::Approx(4.0 / 7.0));

  // s = 1: exact for any N.
  for (int N : {1, 5, 16}) {
    const auto lin = relu_spline_power(1, N);
    for (double z = -1.0; z <= 1.0; z += 0.01)
      CHECK(spline_eval(lin, z) == doctest::Approx(z).epsilon(1e-12));
  }

  // s=3, N=20: sup error within 3*2/(2*400).
  const auto cubic = relu_spline_power(3, 20);
  double sup = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double z = -1.0 + 2.0 * i / 9999.0;
    sup = std::max(sup, std::fabs(spline_eval(cubic, z) - z * z * z));
  }
  CHECK(sup <= 0.0075 + 1e-12);
}

TEST_CASE("spline coefficient bounds") {
  for (int s = 1; s <= 6; ++s) {
    for (int N : {1, 3, 7, 20, 64}) {
      const auto units = relu_spline_power(s, N);
      CHECK(units.size() <= static_cast<std::size_t>(N + 1));
      const double cap =
          std::max(s + 0.5, 2.0 * s * (s - 1) / static_cast<double>(N));
      for (const auto& u : units) {
        CHECK(std::fabs(u.a) <= 1.0);
        CHECK(std::fabs(u.b) <= 1.0);
        CHECK(std::fabs(u.c) <= cap + 1e-12);
      }
    }
  }
}

TEST_CASE("newton expansion: counts and coefficient bound") {
  CHECK(newton_term_count(1) == 4);
  CHECK(newton_term_count(2) == 16);
  for (int m = 1; m <= 10; ++m) {
    const std::uint64_t n = newton_term_count(m);
    const std::uint64_t lo = static_cast<std::uint64_t>(m) << m;
    CHECK(n >= lo);
    CHECK(n <= 13 * lo);
  }
  // Generated terms match the closed-form count and respect |coeff| <= 1/2.
  for (int m = 1; m <= 6; ++m) {
    const auto terms = newton_expansion(m);
    CHECK(terms.size() == newton_term_count(m));
    for (const auto& t : terms)
      CHECK(std::fabs(t.coeff.to_double()) <= 0.5 + 1e-15);
  }
}

TEST_CASE("newton expansion reconstructs cos and sin of angle sums") {
  // m=2 exactness corresponds to cos(a+b) = (C1^2 - S1^2 - C2)/2.
  const auto terms2 = newton_expansion(2);
  RngStream rng(23, 8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> angles{kPi * (2 * rng.uniform01() - 1),
                               kPi * (2 * rng.uniform01() - 1)};
    const TrigPair rec = newton_eval(terms2, angles);
    CHECK(rec.cos_value ==
          doctest::Approx(std::cos(angles[0] + angles[1])).epsilon(1e-12));
    CHECK(rec.sin_value ==
          doctest::Approx(std::sin(angles[0] + angles[1])).epsilon(1e-12));
  }

  const auto terms4 = newton_expansion(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> angles(4);
    double sum = 0.0;
    for (double& a : angles) {
      a = kPi * (2 * rng.uniform01() - 1);
      sum += a;
    }
    const TrigPair rec = newton_eval(terms4, angles);
    CHECK(std::fabs(rec.cos_value - std::cos(sum)) <= 1e-9);
    CHECK(std::fabs(rec.sin_value - std::sin(sum)) <= 1e-9);
  }
}

TEST_CASE("stirling numbers and lambda_m") {
  const auto s5 = stirling_first_unsigned(5);
  CHECK(s5[1] == 24);
  CHECK(s5[2] == 50);
  CHECK(s5[3] == 35);
  CHECK(s5[4] == 10);
  CHECK(s5[5] == 1);
  // Lambda_2 = 2^1*2^1*[2 1]/(1!2!) + 2^2*4^2*[2 2]/(2!2!) = 2 + 16 = 18.
  CHECK(lambda_m(2) == doctest::Approx(18.0).epsilon(1e-12));
  // Lambda_3 = 2*3*2/6 + 4*36*3/12 + 8*729/36 = 2 + 36 + 162 = 200.
  CHECK(lambda_m(3) == doctest::Approx(200.0).epsilon(1e-12));
}

TEST_CASE("general relu construction width accounting") {
  // m=2, tau=0.1: delta = 1/180, N_2 = 14 (15 units), N_1 = 1 (2 units);
  // 12 order-2 triples and 4 order-1 triples per frequency.
  CHECK(relu_construction_width({3, 2}, 0.1) == 3 * (12 * 15 + 4 * 2));
  const MlpParams theta = relu_construction({3, 2}, 0.1);
  CHECK(theta.d() == relu_construction_width({3, 2}, 0.1));
}

TEST_CASE("general relu construction interpolates with the stated margin") {
  {
    const TaskSpec spec{3, 2};
    const MlpParams theta = relu_construction(spec, 0.1);
    CHECK(exhaustive_accuracy(theta, spec) == 1.0);
    CHECK(min_margin(theta, spec) >= 0.6 * 3 - 1e-9);
    double w_inf = 0.0;
    for (double v : theta.W.data) w_inf = std::max(w_inf, std::fabs(v));
    CHECK(w_inf <= 2.0 / 2 + 1e-12);
  }
  {
    const TaskSpec spec{3, 3};
    const MlpParams theta = relu_construction(spec, 0.1);
    CHECK(exhaustive_accuracy(theta, spec) == 1.0);

    // ||V||_inf <= (m + 1/2) m^{2m} / (m! 2^m) for m = 3.
    double v_inf = 0.0;
    for (double v : theta.V.data) v_inf = std::max(v_inf, std::fabs(v));
    CHECK(v_inf <= 3.5 * std::pow(3.0, 6.0) / (6.0 * 8.0) + 1e-9);
  }
  CHECK_THROWS_AS(relu_construction({3, 2}, 0.3), std::invalid_argument);
  CHECK_THROWS_WITH_AS(relu_construction({5, 3}, 0.1, 100),
                       doctest::Contains("exceeds the memory cap"),
                       std::runtime_error);
}

TEST_CASE("relu m2 network: width, margins, norms, agreement") {
  for (int p : {3, 5}) {
    const TaskSpec spec{p, 2};
    const MlpParams theta = relu_construction_m2(p);
    CHECK(theta.d() == 36 * static_cast<std::size_t>(p));
    CHECK(exhaustive_accuracy(theta, spec) == 1.0);
    CHECK(min_margin(theta, spec) >= 25.0 * p / 49.0 + 20.0 / 49.0 - 1e-9);
    double w_inf = 0.0, v_inf = 0.0;
    for (double v : theta.W.data) w_inf = std::max(w_inf, std::fabs(v));
    for (double v : theta.V.data) v_inf = std::max(v_inf, std::fabs(v));
    CHECK(w_inf <= 1.0 + 1e-12);
    CHECK(v_inf <= 34.0 / 7.0 + 1e-12);
    CHECK(spectral_norm(theta.V) <= 11.0 * std::sqrt(double(p)) + 1e-8);
  }

  // Predictions agree with the general construction on X_2 at p = 3.
  const MlpParams general = relu_construction({3, 2}, 4.0 / 49.0);
  const MlpParams cor = relu_construction_m2(3);
  const LabeledSet dom = enumerate_domain({3, 2});
  for (const auto& item : dom.items)
    CHECK(predict(general, item.x) == predict(cor, item.x));
}

TEST_CASE("trig sum polynomialization") {
  // Zero bag: S = 0, C = 1.
  const TrigPolyPair zero = trig_sum_polynomialize(BagVector{0, 0, 0});
  CHECK(zero.sin_poly.terms.empty());
  REQUIRE(zero.cos_poly.terms.size() == 1);
  CHECK(zero.cos_poly.terms.begin()->second == 1);
  CHECK(zero.cos_poly.degree() == 0);

  // Single token: S = s_u, C = c_u.
  const TrigPolyPair single = trig_sum_polynomialize(BagVector{0, 1, 0});
  CHECK(single.sin_poly.terms.size() == 1);
  CHECK(single.sin_poly.degree() == 1);
  std::vector<double> angles{0.3, 0.9, -1.2};
  CHECK(single.sin_poly.eval(angles) == doctest::Approx(std::sin(0.9)));
  CHECK(single.cos_poly.eval(angles) == doctest::Approx(std::cos(0.9)));

  RngStream rng(61, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 3 + static_cast<int>(rng.uniform_int(4));
    const int m = 2 + static_cast<int>(rng.uniform_int(6));
    BagVector x(p, 0);
    for (int i = 0; i < m; ++i) ++x[rng.uniform_int(p)];
    const TrigPolyPair pair = trig_sum_polynomialize(x);
    CHECK(pair.sin_poly.degree() <= m);
    CHECK(pair.cos_poly.degree() <= m);
    std::vector<double> alpha(p);
    double sum = 0.0;
    for (int v = 0; v < p; ++v) {
      alpha[v] = kPi * (2 * rng.uniform01() - 1);
      sum += x[v] * alpha[v];
    }
    CHECK(std::fabs(pair.sin_poly.eval(alpha) - std::sin(sum)) <= 1e-10);
    CHECK(std::fabs(pair.cos_poly.eval(alpha) - std::cos(sum)) <= 1e-10);
  }
}

TEST_CASE("rational arithmetic normalizes and detects overflow") {
  const Rational half = Rational::make(2, 4);
  CHECK(half.num == 1);
  CHECK(half.den == 2);
  const Rational neg = Rational::make(3, -6);
  CHECK(neg.num == -1);
  CHECK(neg.den == 2);
  const auto sum = rat_add(Rational::make(1, 3), Rational::make(1, 6));
  REQUIRE(sum.has_value());
  CHECK(sum->num == 1);
  CHECK(sum->den == 2);
  const long long big = (1LL << 62);
  CHECK(!rat_mul(Rational{big, 1}, Rational{big, 1}).has_value());
}
