#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "modadd/verify.hpp"

using namespace modadd;

TEST_CASE("gram identity certificates for all p up to 64") {
  for (int p = 2; p <= 64; ++p) {
    const Certificate cert = check_gram_identity(p);
    CHECK(cert.passed);
  }
}

TEST_CASE("gram identity case values") {
  // Spot values: S(1,1) = p/4 and S(1,p-1) = -p/4 for odd p; p even,
  // a = p/2 gives 0 rows. Evaluated through the same sums the
  // certificate uses, so just assert the certificate accepted them.
  CHECK(check_gram_identity(5).passed);
  CHECK(check_gram_identity(6).passed);
}

TEST_CASE("uniformity certificates for all m,p up to 12") {
  for (int m = 2; m <= 12; ++m)
    for (int p = 2; p <= 12; ++p)
      CHECK(check_uniformity(TaskSpec{p, m}).passed);
}

TEST_CASE("construction grid certificates") {
  // All cheap constructions over m <= 5, p <= 13, |X_m| <= 1e5.
  for (int m = 2; m <= 5; ++m) {
    for (int p = 2; p <= 13; ++p) {
      const TaskSpec spec{p, m};
      const auto size = domain_size(spec);
      if (!size || *size > 100000) continue;
      CHECK(certify_construction("sine_width2", spec).passed);
      CHECK(certify_construction("sine_biased", spec).passed);
      CHECK(certify_construction("sine_halfp", spec).passed);
      CHECK(certify_construction("sine_highmargin", spec).passed);
      if (m == 2) CHECK(certify_construction("relu_m2", spec).passed);
    }
  }
}

TEST_CASE("certify_construction examples from the contracts") {
  const Certificate c1 = certify_construction("sine_width2", {7, 3});
  CHECK(c1.passed);
  CHECK(c1.witness.at("accuracy").get<double>() == 1.0);
  CHECK(c1.witness.at("min_margin").get<double>() >=
        1.0 - std::cos(2.0 * 3.14159265358979323846 / 7) - 1e-9);

  const Certificate c2 = certify_construction("relu_m2", {11, 2});
  CHECK(c2.passed);
  CHECK(c2.witness.at("width").get<int>() == 396);
  CHECK(c2.witness.at("min_margin").get<double>() >= 275.0 / 49 + 20.0 / 49 - 1e-9);

  const Certificate c3 = certify_construction("sine_halfp", {6, 2});
  CHECK(c3.passed);
  CHECK(c3.witness.at("weighted_accuracy").get<double>() ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("scale invariance witness") {
  RngStream init(2025, 8);
  MlpParams theta;
  theta.act = Activation::Relu;
  theta.W = Matrix(16, 5);
  theta.V = Matrix(5, 16);
  for (double& v : theta.W.data) v = init.normal(0, 1);
  for (double& v : theta.V.data) v = init.normal(0, 1);

  RngStream rng(2025, 9);
  const Certificate cert = relu_scale_invariance_witness(theta, 2, 3, 50, rng);
  CHECK(cert.passed);
  CHECK((cert.witness.at("missed_m1").get<bool>() ||
         cert.witness.at("missed_m2").get<bool>()));

  // A construction that is perfect on X_2 must err at the longer ray.
  const MlpParams perfect = relu_construction_m2(5);
  CHECK(certify_construction("relu_m2", {5, 2}).passed);
  RngStream rng2(2025, 10);
  const Certificate witness =
      relu_scale_invariance_witness(perfect, 2, 3, 10, rng2);
  CHECK(witness.passed);
  CHECK(witness.witness.at("missed_m2").get<bool>());

  // Biased networks are rejected.
  MlpParams biased = theta;
  biased.bias = std::vector<double>(16, 0.1);
  RngStream rng3(1, 1);
  CHECK_THROWS_AS(relu_scale_invariance_witness(biased, 2, 3, 1, rng3),
                  std::invalid_argument);
}

TEST_CASE("path probe") {
  // The m=2 construction fits the path exactly.
  const MlpParams good = relu_construction({3, 2}, 0.1);
  const Certificate pass = relu_path_probe(good, {3, 2});
  CHECK(pass.passed);
  CHECK(pass.witness.at("alternations_achieved") ==
        pass.witness.at("alternations_required"));

  // A width-1 network cannot fit a long path.
  RngStream rng(4, 2);
  MlpParams narrow;
  narrow.act = Activation::Relu;
  narrow.W = Matrix(1, 3);
  narrow.V = Matrix(3, 1);
  for (double& v : narrow.W.data) v = rng.normal(0, 1);
  for (double& v : narrow.V.data) v = rng.normal(0, 1);
  const Certificate fail = relu_path_probe(narrow, {3, 20});
  CHECK(!fail.passed);
  CHECK(!fail.witness.at("width_budget_ok").get<bool>());

  // Constant scores: no alternations anywhere.
  MlpParams constant;
  constant.act = Activation::Relu;
  constant.W = Matrix(2, 3);
  constant.V = Matrix(3, 2);
  const Certificate flat = relu_path_probe(constant, {3, 6});
  CHECK(!flat.passed);
  CHECK(flat.witness.at("alternations_achieved").get<int>() == 0);
}

TEST_CASE("capacity bounds") {
  // (m - p) / (p + 2) for m=100, p=5 is 95/7; integer width >= 14.
  const double lb = capacity_bound("relu_width_lb", {0, 5, 100, 0, 0, 0});
  CHECK(lb == doctest::Approx(95.0 / 7.0));
  CHECK(static_cast<int>(std::ceil(lb)) == 14);

  // ppoly bound grows with d at fixed p.
  double prev = 0.0;
  for (int d : {4, 8, 16, 32}) {
    const double b = capacity_bound("ppoly", {d, 7, 0, 2, 1, 0});
    CHECK(b > prev);
    prev = b;
  }

  // trigpoly with K=1 equals the sine instantiation.
  const CapacityArgs args{16, 7, 3, 0, 0, 1};
  const double got = capacity_bound("trigpoly", args);
  const double dp = 16.0 * 7.0;
  const double e = std::exp(1.0);
  const double expect =
      2.0 * dp * (6.0 * std::log(6.0 * dp) + 2.0 * std::log(e * 7.0 * 4.0));
  CHECK(got == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS_AS(capacity_bound("unknown", {1, 1, 1, 1, 1, 1}),
                  std::invalid_argument);
}

TEST_CASE("newton counts certificates and monotonicity") {
  std::uint64_t prev = 0;
  for (int m = 1; m <= 10; ++m) {
    const Certificate cert = check_newton_counts(m);
    CHECK(cert.passed);
    const std::uint64_t n = cert.witness.at("n_tot").get<std::uint64_t>();
    CHECK(n > prev);
    prev = n;
  }
  CHECK(check_newton_counts(2).witness.at("n_tot").get<std::uint64_t>() == 16);
  CHECK(check_newton_counts(1).witness.at("n_tot").get<std::uint64_t>() == 4);
  const std::uint64_t n5 =
      check_newton_counts(5).witness.at("n_tot").get<std::uint64_t>();
  CHECK(n5 >= 160);
  CHECK(n5 <= 2080);
}

TEST_CASE("polarization certificates up to s=10") {
  for (int s = 1; s <= 10; ++s) {
    RngStream rng(900 + s, 1);
    CHECK(check_polarization(s, 50, rng).passed);
  }
}

TEST_CASE("spline bound certificates") {
  CHECK(check_spline_bound(2, 7).passed);
  CHECK(check_spline_bound(1, 9).witness.at("sup_error").get<double>() <=
        1e-12);
  CHECK(check_spline_bound(4, 32).passed);
  const Certificate c = check_spline_bound(2, 7);
  CHECK(c.witness.at("sup_error").get<double>() <= 1.0 / 49.0 + 1e-12);
}

TEST_CASE("newton reconstruction and trig polynomialization certificates") {
  for (int m = 1; m <= 5; ++m) {
    RngStream rng(7000 + m, 1);
    CHECK(check_newton_reconstruction(m, 40, rng, 1e-8).passed);
  }
  RngStream rng(8000, 1);
  CHECK(check_trig_polynomialization({7, 5}, 50, rng).passed);
}

TEST_CASE("relu mode errors stay within tau") {
  CHECK(check_relu_mode_errors({3, 2}, 0.1).passed);
  CHECK(check_relu_mode_errors({5, 3}, 0.1).passed);
}

TEST_CASE("certificates serialize deterministically") {
  const Certificate a = check_newton_counts(4);
  const Certificate b = check_newton_counts(4);
  CHECK(a.to_json().dump() == b.to_json().dump());
  // Failed certificates carry a witness.
  RngStream rng(1, 2);
  MlpParams narrow;
  narrow.act = Activation::Relu;
  narrow.W = Matrix(1, 3);
  narrow.V = Matrix(3, 1);
  for (double& v : narrow.W.data) v = rng.normal(0, 1);
  for (double& v : narrow.V.data) v = rng.normal(0, 1);
  const Certificate fail = relu_path_probe(narrow, {3, 20});
  CHECK(!fail.passed);
  CHECK(!fail.witness.is_null());
}
