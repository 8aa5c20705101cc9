#include "modadd/verify.hpp"

#include <cmath>
#include <limits>

namespace modadd {

using nlohmann::json;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double linf_norm(const Matrix& m) {
  double v = 0.0;
  for (double x : m.data) v = std::max(v, std::fabs(x));
  return v;
}
}  // namespace

json Certificate::to_json() const {
  json j = {{"claim_id", claim_id},
            {"params", params},
            {"passed", passed},
            {"tolerance", tolerance}};
  if (!witness.is_null()) j["witness"] = witness;
  return j;
}

Certificate check_gram_identity(int p) {
  if (p < 2 || p > 64)
    throw std::invalid_argument("check_gram_identity: p must be in [2,64]");
  Certificate cert;
  cert.claim_id = "gram_identity";
  cert.params = {{"p", p}};
  cert.tolerance = 1e-9 * p;
  cert.passed = true;

  const int K = (p - 1) / 2;
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) {
      long double s = 0.0L;
      for (int k = 1; k <= K; ++k) {
        s += std::sin(kTwoPi * k * a / p) * std::sin(kTwoPi * k * b / p);
      }
      double expected = 0.0;
      const bool a_null = (a == 0) || (p % 2 == 0 && a == p / 2);
      const bool b_null = (b == 0) || (p % 2 == 0 && b == p / 2);
      if (!a_null && !b_null) {
        if (a == b)
          expected = p / 4.0;
        else if ((a + b) % p == 0)
          expected = -p / 4.0;
      }
      const double err = std::fabs(static_cast<double>(s) - expected);
      if (err > cert.tolerance) {
        cert.passed = false;
        cert.witness = {{"a", a}, {"b", b}, {"value", static_cast<double>(s)},
                        {"expected", expected}, {"error", err}};
        return cert;
      }
    }
  }
  return cert;
}

Certificate check_uniformity(const TaskSpec& spec) {
  Certificate cert;
  cert.claim_id = "uniformity";
  cert.params = {{"m", spec.m}, {"p", spec.p}};
  cert.tolerance = 1e-15;
  const auto dist = exact_label_distribution(spec);
  const double target = 1.0 / spec.p;
  cert.passed = true;
  for (int r = 0; r < spec.p; ++r) {
    if (std::fabs(dist[r] - target) > cert.tolerance) {
      cert.passed = false;
      cert.witness = {{"residue", r}, {"probability", dist[r]}};
      return cert;
    }
  }
  return cert;
}

namespace {

struct ExhaustiveEval {
  double accuracy;
  double weighted_accuracy;
  double min_margin;
};

// Single forward pass over the domain for accuracy (unweighted and
// multinomially weighted) plus the minimum margin.
ExhaustiveEval eval_exhaustive(const MlpParams& theta, const LabeledSet& dom) {
  const Matrix S = forward_batch(theta, batch_inputs(dom));
  const std::size_t p = theta.p();
  std::size_t correct = 0;
  double weighted = 0.0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::vector<double> row(p);
  for (std::size_t i = 0; i < dom.items.size(); ++i) {
    const double* s = S.row(i);
    row.assign(s, s + p);
    min_margin = std::min(min_margin, margin_from_scores(row, dom.items[i].y));
    if (predict_from_scores(row) == dom.items[i].y) {
      ++correct;
      weighted += multinomial_weight(dom.items[i].x, dom.spec);
    }
  }
  return {static_cast<double>(correct) / dom.items.size(), weighted,
          min_margin};
}

void require_bound(Certificate& cert, const std::string& name, double value,
                   double bound, bool upper) {
  if (!cert.passed) return;
  const bool ok = upper ? (value <= bound) : (value >= bound);
  if (!ok) {
    cert.passed = false;
    cert.witness = {{"check", name}, {"value", value}, {"bound", bound}};
  }
}

}  // namespace

Certificate certify_construction(const std::string& kind, const TaskSpec& spec,
                                 double tau, std::uint64_t cap) {
  Certificate cert;
  cert.claim_id = "construction:" + kind;
  cert.params = {{"m", spec.m}, {"p", spec.p}};
  cert.tolerance = 1e-8;
  cert.passed = true;
  const double slack = 1e-9;
  const int p = spec.p;

  MlpParams theta;
  if (kind == "sine_width2") {
    theta = sine_width2_fixed(spec);
  } else if (kind == "sine_biased") {
    theta = sine_width2_biased_uniform(p);
  } else if (kind == "sine_halfp") {
    theta = sine_halfp_unbiased(p);
  } else if (kind == "sine_highmargin") {
    theta = sine_highmargin_2p(spec);
  } else if (kind == "relu_m2") {
    if (spec.m != 2)
      throw std::invalid_argument("certify_construction: relu_m2 needs m=2");
    theta = relu_construction_m2(p);
  } else if (kind == "relu_general") {
    cert.params["tau"] = tau;
    theta = relu_construction(spec, tau);
  } else {
    throw std::invalid_argument("certify_construction: unknown kind " + kind);
  }

  const LabeledSet dom = enumerate_domain(spec, cap);
  const ExhaustiveEval ev = eval_exhaustive(theta, dom);
  cert.witness = {{"accuracy", ev.accuracy},
                  {"weighted_accuracy", ev.weighted_accuracy},
                  {"min_margin", ev.min_margin},
                  {"width", theta.d()}};

  if (kind == "sine_width2") {
    const double gamma = 1.0 - std::cos(kTwoPi / p);
    require_bound(cert, "accuracy", ev.accuracy, 1.0, false);
    require_bound(cert, "min_margin", ev.min_margin, gamma - slack, false);
    require_bound(cert, "min_margin_8p2", ev.min_margin,
                  8.0 / (static_cast<double>(p) * p) - slack, false);
    require_bound(cert, "w_inf", linf_norm(theta.W), kPi + 1e-12, true);
    require_bound(cert, "v_inf", linf_norm(theta.V), 1.0 + 1e-12, true);
  } else if (kind == "sine_biased") {
    require_bound(cert, "accuracy", ev.accuracy, 1.0, false);
    // Correct-class score is exactly 1 for every bag.
    double max_dev = 0.0;
    for (const auto& item : dom.items) {
      const auto s = scores(theta, item.x);
      max_dev = std::max(max_dev, std::fabs(s[item.y] - 1.0));
    }
    cert.witness["max_correct_score_deviation"] = max_dev;
    require_bound(cert, "correct_score_one", -max_dev, -1e-9, false);
  } else if (kind == "sine_halfp") {
    const double expect =
        p % 2 == 1 ? 1.0 - 1.0 / p : 1.0 - 2.0 / p;
    cert.witness["expected_weighted_accuracy"] = expect;
    if (std::fabs(ev.weighted_accuracy - expect) > 1e-12) {
      cert.passed = false;
      cert.witness["check"] = "weighted_accuracy";
    }
    // Failures are exactly the vanishing-score residues. In exact
    // arithmetic those bags are all-zero ties; in floats the surviving
    // score noise resolves them to a wrong class or an exact tie, and
    // the antisymmetric second layer guarantees never to the true label.
    for (const auto& item : dom.items) {
      if (!cert.passed) break;
      const bool bad_residue =
          item.y == 0 || (p % 2 == 0 && item.y == p / 2);
      const int pred = predict(theta, item.x);
      if (bad_residue && pred == item.y) {
        cert.passed = false;
        cert.witness["check"] = "vanishing_residue_must_err";
      } else if (!bad_residue && pred != item.y) {
        cert.passed = false;
        cert.witness["check"] = "nonzero_residue_should_be_correct";
      }
    }
  } else if (kind == "sine_highmargin") {
    require_bound(cert, "accuracy", ev.accuracy, 1.0, false);
    require_bound(cert, "min_margin_low", ev.min_margin, p - 1e-9, false);
    require_bound(cert, "min_margin_high", ev.min_margin, p + 1e-9, true);
    require_bound(cert, "v_spectral", std::fabs(spectral_norm(theta.V) -
                                                std::sqrt(double(p))),
                  1e-8, true);
    require_bound(cert, "w_frobenius", frobenius_norm(theta.W),
                  kPi * std::sqrt(2.0) * p + 1e-8, true);
    // All singular values sqrt(p): V V^T must equal p I.
    Matrix gram;
    gemm_nt(theta.V, theta.V, gram);
    double dev = 0.0;
    for (int q = 0; q < p; ++q)
      for (int r = 0; r < p; ++r)
        dev = std::max(dev, std::fabs(gram.at(q, r) - (q == r ? p : 0.0)));
    cert.witness["gram_deviation"] = dev;
    require_bound(cert, "gram_identity", dev, 1e-8 * p, true);
  } else if (kind == "relu_m2") {
    require_bound(cert, "accuracy", ev.accuracy, 1.0, false);
    require_bound(cert, "width", static_cast<double>(theta.d()),
                  36.0 * p, false);
    require_bound(cert, "width_exact", static_cast<double>(theta.d()),
                  36.0 * p, true);
    require_bound(cert, "min_margin", ev.min_margin,
                  25.0 * p / 49.0 + 20.0 / 49.0 - slack, false);
    require_bound(cert, "w_inf", linf_norm(theta.W), 1.0 + 1e-12, true);
    require_bound(cert, "v_inf", linf_norm(theta.V), 34.0 / 7.0 + 1e-12,
                  true);
    require_bound(cert, "v_spectral", spectral_norm(theta.V),
                  11.0 * std::sqrt(double(p)) + 1e-8, true);
  } else if (kind == "relu_general") {
    require_bound(cert, "accuracy", ev.accuracy, 1.0, false);
    require_bound(cert, "min_margin", ev.min_margin,
                  (1.0 - 4.0 * tau) * p - slack, false);
    require_bound(cert, "w_inf", linf_norm(theta.W),
                  2.0 / spec.m + 1e-12, true);
    const double v_inf_bound =
        (spec.m + 0.5) * std::pow(double(spec.m), 2.0 * spec.m) /
        (std::tgamma(spec.m + 1.0) * std::ldexp(1.0, spec.m));
    require_bound(cert, "v_inf", linf_norm(theta.V), v_inf_bound + 1e-8,
                  true);
    require_bound(cert, "width_bound", static_cast<double>(theta.d()),
                  relu_width_bound(spec.m, p, tau), true);
  }
  return cert;
}

Certificate relu_scale_invariance_witness(const MlpParams& theta, int m1,
                                          int m2, int trials,
                                          RngStream& rng) {
  if (theta.bias)
    throw std::invalid_argument(
        "relu_scale_invariance_witness: network must have no bias");
  if (theta.act != Activation::Relu)
    throw std::invalid_argument(
        "relu_scale_invariance_witness: network must be ReLU");
  const int p = static_cast<int>(theta.p());
  if ((m1 - m2) % p == 0)
    throw std::invalid_argument(
        "relu_scale_invariance_witness: m1 and m2 must differ mod p");

  Certificate cert;
  cert.claim_id = "relu_scale_invariance";
  cert.params = {{"m1", m1}, {"m2", m2}, {"trials", trials}, {"p", p},
                 {"seed", rng.seed()}, {"stream_id", rng.stream_id()}};
  cert.passed = true;

  const double alphas[] = {0.5, 2.0, 10.0};
  for (int t = 0; t < trials && cert.passed; ++t) {
    // Random bag of length m1.
    std::vector<double> x(p, 0.0);
    for (int i = 0; i < m1; ++i) x[rng.uniform_int(p)] += 1.0;
    const int base = predict_from_scores(scores(theta, x));
    for (double alpha : alphas) {
      std::vector<double> xs(x);
      for (double& v : xs) v *= alpha;
      const int pred = predict_from_scores(scores(theta, xs));
      if (pred != base) {
        cert.passed = false;
        cert.witness = {{"check", "ray_invariance"},
                        {"alpha", alpha},
                        {"base_prediction", base},
                        {"scaled_prediction", pred}};
        break;
      }
    }
  }

  // The two all-token-1 bags lie on one ray but carry different labels,
  // so a shared prediction misses at least one. (Token 1, not token 0:
  // the label of m * e_1 is m mod p.)
  BagVector x1(p, 0), x2(p, 0);
  x1[1 % p] = m1;
  x2[1 % p] = m2;
  const int pred1 = predict(theta, x1);
  const int pred2 = predict(theta, x2);
  const int label1 = label_of(x1, TaskSpec{p, m1});
  const int label2 = label_of(x2, TaskSpec{p, m2});
  const bool miss_guaranteed = pred1 != label1 || pred2 != label2;
  if (pred1 != pred2) {
    cert.passed = false;
    cert.witness = {{"check", "ray_predictions_differ"},
                    {"pred_m1", pred1},
                    {"pred_m2", pred2}};
  } else if (!miss_guaranteed) {
    cert.passed = false;  // impossible when m1 != m2 mod p
    cert.witness = {{"check", "no_miss"},
                    {"pred", pred1}};
  }
  if (cert.passed) {
    cert.witness = {{"ray_prediction", pred1},
                    {"label_m1", label1},
                    {"label_m2", label2},
                    {"missed_m1", pred1 != label1},
                    {"missed_m2", pred2 != label2}};
  }
  return cert;
}

Certificate relu_path_probe(const MlpParams& theta, const TaskSpec& spec) {
  if (theta.bias)
    throw std::invalid_argument("relu_path_probe: network must have no bias");
  if (theta.act != Activation::Relu)
    throw std::invalid_argument("relu_path_probe: network must be ReLU");
  const int p = spec.p, m = spec.m;
  const int d = static_cast<int>(theta.d());

  Certificate cert;
  cert.claim_id = "relu_path_probe";
  cert.params = {{"m", m}, {"p", p}, {"d", d}};

  // Unit k has preactivation m*W(k,0) + s*(W(k,1)-W(k,0)); breakpoints of
  // the piecewise-affine scores lie where a preactivation crosses zero.
  std::vector<double> breakpoints;
  for (int k = 0; k < d; ++k) {
    const double y = theta.W.at(k, 0);
    const double z = theta.W.at(k, 1) - theta.W.at(k, 0);
    if (z == 0.0) continue;
    const double s = -static_cast<double>(m) * y / z;
    if (s >= 0.0 && s <= m) breakpoints.push_back(s);
  }

  std::vector<bool> spoiled(m, false);
  for (double b : breakpoints) {
    const double lo = std::floor(b);
    if (b == lo) {  // integer breakpoint spoils both adjacent intervals
      const int j = static_cast<int>(lo);
      if (j - 1 >= 0 && j - 1 < m) spoiled[j - 1] = true;
      if (j >= 0 && j < m) spoiled[j] = true;
    } else {
      const int j = static_cast<int>(lo);
      if (j >= 0 && j < m) spoiled[j] = true;
    }
  }

  // Score the path at integer points.
  std::vector<std::vector<double>> path_scores(m + 1);
  bool all_correct = true;
  int first_failure = -1;
  for (int s = 0; s <= m; ++s) {
    std::vector<double> x(p, 0.0);
    x[0] = m - s;
    x[1] = s;
    path_scores[s] = scores(theta, x);
    const int pred = predict_from_scores(path_scores[s]);
    if (pred != s % p && all_correct) {
      all_correct = false;
      first_failure = s;
    }
  }

  int clean = 0, achieved = 0;
  for (int s = 0; s < m; ++s) {
    if (spoiled[s]) continue;
    ++clean;
    const int label = s % p;
    const int next = (label + 1) % p;
    const double g_here = path_scores[s][label] - path_scores[s][next];
    const double g_there = path_scores[s + 1][label] - path_scores[s + 1][next];
    if (g_here > 0.0 && g_there < 0.0) ++achieved;
  }

  const double lb = capacity_bound("relu_width_lb", {d, p, m, 0, 0, 0});
  cert.passed = all_correct;
  cert.witness = {{"breakpoints", breakpoints.size()},
                  {"clean_intervals", clean},
                  {"alternations_achieved", achieved},
                  {"alternations_required", clean},
                  {"width_budget_ok", static_cast<double>(d) >= lb},
                  {"width_lower_bound", lb}};
  if (!all_correct) cert.witness["first_failure_s"] = first_failure;
  return cert;
}

double capacity_bound(const std::string& family, const CapacityArgs& a) {
  const double e = std::exp(1.0);
  const double dp = static_cast<double>(a.d) * a.p;
  if (family == "ppoly") {
    if (a.d < 1 || a.p < 1 || a.L < 1 || a.r < 1)
      throw std::invalid_argument("capacity_bound(ppoly): need d,p,L,r >= 1");
    return 2.0 * dp *
           (6.0 * std::log(6.0 * dp) + std::log(2.0 * e * a.L) +
            2.0 * std::log(e * a.p * a.r));
  }
  if (family == "trigpoly") {
    if (a.d < 1 || a.p < 1 || a.K < 0 || a.m < 1)
      throw std::invalid_argument("capacity_bound(trigpoly): bad args");
    return 2.0 * dp *
           (6.0 * std::log(6.0 * dp) +
            2.0 * std::log(e * a.p * (static_cast<double>(a.K) * a.m + 1.0)));
  }
  if (family == "ratexp") {
    if (a.d < 1 || a.p < 1 || a.r < 0 || a.m < 1)
      throw std::invalid_argument("capacity_bound(ratexp): bad args");
    return 2.0 * dp *
           (6.0 * std::log(6.0 * dp) +
            2.0 * std::log(e * a.p *
                           (static_cast<double>(a.d) * a.m + a.r + 1.0)));
  }
  if (family == "relu_width_lb") {
    if (a.p < 1 || a.m < 1)
      throw std::invalid_argument("capacity_bound(relu_width_lb): bad args");
    return (static_cast<double>(a.m) - a.p) / (a.p + 2.0);
  }
  throw std::invalid_argument("capacity_bound: unknown family " + family);
}

Certificate check_newton_counts(int m) {
  Certificate cert;
  cert.claim_id = "newton_counts";
  cert.params = {{"m", m}};
  const std::uint64_t n = newton_term_count(m);
  const std::uint64_t lo = static_cast<std::uint64_t>(m) << m;
  const std::uint64_t hi = 13 * lo;
  cert.passed = n >= lo && n <= hi;
  cert.witness = {{"n_tot", n}, {"lower", lo}, {"upper", hi}};
  return cert;
}

Certificate check_polarization(int s, int trials, RngStream& rng) {
  Certificate cert;
  cert.claim_id = "polarization";
  cert.params = {{"s", s}, {"trials", trials},
                 {"seed", rng.seed()}, {"stream_id", rng.stream_id()}};
  cert.tolerance = 1e-9;
  const auto terms = polarize(s);
  double max_err = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(s);
    double prod = 1.0;
    for (int i = 0; i < s; ++i) {
      x[i] = 2.0 * rng.uniform01() - 1.0;
      prod *= x[i];
    }
    max_err = std::max(max_err, std::fabs(polarize_eval(terms, x) - prod));
  }
  cert.passed = max_err <= cert.tolerance;
  cert.witness = {{"max_error", max_err}};
  return cert;
}

Certificate check_spline_bound(int s, int N, int grid_points) {
  Certificate cert;
  cert.claim_id = "spline_bound";
  cert.params = {{"s", s}, {"N", N}, {"grid_points", grid_points}};
  const double bound = s * (s - 1) / (2.0 * N * N);
  cert.tolerance = bound + 1e-12;
  const auto units = relu_spline_power(s, N);
  double sup = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double z = -1.0 + 2.0 * i / (grid_points - 1.0);
    double zp = 1.0;
    for (int j = 0; j < s; ++j) zp *= z;
    sup = std::max(sup, std::fabs(spline_eval(units, z) - zp));
  }
  cert.passed = sup <= cert.tolerance;
  cert.witness = {{"sup_error", sup}, {"bound", bound},
                  {"units", units.size()}};
  return cert;
}

Certificate check_newton_reconstruction(int m, int trials, RngStream& rng,
                                        double tol) {
  Certificate cert;
  cert.claim_id = "newton_reconstruction";
  cert.params = {{"m", m}, {"trials", trials},
                 {"seed", rng.seed()}, {"stream_id", rng.stream_id()}};
  cert.tolerance = tol;
  const auto terms = newton_expansion(m);
  double max_err = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> angles(m);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      angles[i] = kPi * (2.0 * rng.uniform01() - 1.0);
      sum += angles[i];
    }
    const TrigPair rec = newton_eval(terms, angles);
    max_err = std::max(max_err, std::fabs(rec.cos_value - std::cos(sum)));
    max_err = std::max(max_err, std::fabs(rec.sin_value - std::sin(sum)));
  }
  cert.passed = max_err <= tol;
  cert.witness = {{"max_error", max_err}, {"terms", terms.size()}};
  return cert;
}

Certificate check_trig_polynomialization(const TaskSpec& spec, int trials,
                                         RngStream& rng) {
  Certificate cert;
  cert.claim_id = "trig_polynomialization";
  cert.params = {{"m", spec.m}, {"p", spec.p}, {"trials", trials},
                 {"seed", rng.seed()}, {"stream_id", rng.stream_id()}};
  cert.tolerance = 1e-10;
  double max_err = 0.0;
  for (int t = 0; t < trials; ++t) {
    BagVector x(spec.p, 0);
    for (int i = 0; i < spec.m; ++i) ++x[rng.uniform_int(spec.p)];
    const TrigPolyPair pair = trig_sum_polynomialize(x);
    if (pair.sin_poly.degree() > spec.m || pair.cos_poly.degree() > spec.m) {
      cert.passed = false;
      cert.witness = {{"check", "degree"}, {"bag", x}};
      return cert;
    }
    std::vector<double> angles(spec.p);
    double sum = 0.0;
    for (int v = 0; v < spec.p; ++v) {
      angles[v] = kPi * (2.0 * rng.uniform01() - 1.0);
      sum += x[v] * angles[v];
    }
    max_err = std::max(
        max_err, std::fabs(pair.sin_poly.eval(angles) - std::sin(sum)));
    max_err = std::max(
        max_err, std::fabs(pair.cos_poly.eval(angles) - std::cos(sum)));
  }
  cert.passed = max_err <= cert.tolerance;
  cert.witness = {{"max_error", max_err}};
  return cert;
}

Certificate check_relu_mode_errors(const TaskSpec& spec, double tau) {
  Certificate cert;
  cert.claim_id = "relu_mode_errors";
  cert.params = {{"m", spec.m}, {"p", spec.p}, {"tau", tau}};
  cert.tolerance = tau;
  const int m = spec.m, p = spec.p;

  const auto terms = newton_expansion(m);
  const double delta = tau / lambda_m(m);
  std::vector<std::vector<SplineUnit>> splines(m + 1);
  for (int r = 1; r <= m; ++r) {
    const int N = std::max(
        1, static_cast<int>(std::ceil(std::sqrt(r * (r - 1) / (2.0 * delta)))));
    splines[r] = relu_spline_power(r, N);
  }

  const LabeledSet dom = enumerate_domain(spec);
  double max_err = 0.0;
  std::vector<int> cw, sw;
  for (int nu = 0; nu < p && max_err <= tau; ++nu) {
    for (const auto& item : dom.items) {
      long long weighted = 0;
      for (int t = 0; t < p; ++t) weighted += static_cast<long long>(t) * item.x[t];
      const double true_angle = kTwoPi * nu * weighted / p;
      double c_hat = 0.0, s_hat = 0.0;
      for (const auto& term : terms) {
        const int r = term.order();
        term.linear_weights(cw, sw);
        double dot = 0.0;
        for (int j = 0; j < m; ++j) {
          if (cw[j] == 0 && sw[j] == 0) continue;
          double cj = 0.0, sj = 0.0;
          for (int t = 0; t < p; ++t) {
            if (item.x[t] == 0) continue;
            const double ang = kTwoPi * nu * (j + 1) * t / p;
            cj += item.x[t] * std::cos(ang);
            sj += item.x[t] * std::sin(ang);
          }
          dot += cw[j] * cj + sw[j] * sj;
        }
        double scale = term.coeff.to_double();
        for (int i = 0; i < r; ++i) scale *= static_cast<double>(m) * r;
        const double val =
            scale * spline_eval(splines[r], dot / (static_cast<double>(m) * r));
        if (term.is_cos)
          c_hat += val;
        else
          s_hat += val;
      }
      max_err = std::max(max_err, std::fabs(c_hat - std::cos(true_angle)));
      max_err = std::max(max_err, std::fabs(s_hat - std::sin(true_angle)));
      if (max_err > tau) break;
    }
  }
  cert.passed = max_err <= tau;
  cert.witness = {{"max_mode_error", max_err}};
  return cert;
}

}  // namespace modadd
