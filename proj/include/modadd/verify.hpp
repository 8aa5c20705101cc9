// Executable certificates for the closed-form claims: exhaustive
// construction checks, trigonometric identities, counting bounds,
// the ReLU impossibility witness, and capacity-bound calculators.
#pragma once

#include <string>

#include <json.hpp>

#include "modadd/constructions.hpp"
#include "modadd/metrics.hpp"

namespace modadd {

struct Certificate {
  std::string claim_id;
  nlohmann::json params;
  bool passed = false;
  nlohmann::json witness;  // first counterexample / extremal values
  double tolerance = 0.0;

  nlohmann::json to_json() const;
};

// S(a,b) = sum_{k=1..K} sin(2 pi k a / p) sin(2 pi k b / p) equals
// +-p/4 or 0 depending on a,b mod p. Checked for all pairs, tol 1e-9*p.
Certificate check_gram_identity(int p);

// exact_label_distribution is uniform to 1e-15.
Certificate check_uniformity(const TaskSpec& spec);

// Exhaustive accuracy, min margin, and norm bounds for one construction.
// kind: sine_width2 | sine_biased | sine_halfp | sine_highmargin |
//       relu_m2 | relu_general (relu_general takes tau).
Certificate certify_construction(const std::string& kind,
                                 const TaskSpec& spec, double tau = 0.1,
                                 std::uint64_t cap = 10'000'000);

// Ray invariance of no-bias ReLU networks: predictions agree on alpha*x,
// and the two all-token-1 bags of lengths m1, m2 (labels m1 mod p and
// m2 mod p) receive the same prediction, so at least one is missed.
Certificate relu_scale_invariance_witness(const MlpParams& theta, int m1,
                                          int m2, int trials, RngStream& rng);

// Adjacent-class margins along the path (m-s) e_0 + s e_1, s = 0..m:
// counts achieved sign alternations on clean unit intervals against the
// breakpoint budget d.
Certificate relu_path_probe(const MlpParams& theta, const TaskSpec& spec);

// Closed-form capacity bounds.
//   ppoly:          2dp (6 log(6dp) + log(2eL) + 2 log(e p r))
//   trigpoly:       2dp (6 log(6dp) + 2 log(e p (K m + 1)))
//   ratexp:         2dp (6 log(6dp) + 2 log(e p (d m + r + 1)))
//   relu_width_lb:  (m - p) / (p + 2)
struct CapacityArgs {
  int d = 0, p = 0, m = 0;
  int L = 0, r = 0, K = 0;
};
double capacity_bound(const std::string& family, const CapacityArgs& args);

// N_tot(m) within [m 2^m, 13 m 2^m].
Certificate check_newton_counts(int m);

// Random-input polarization reconstruction, err <= 1e-9.
Certificate check_polarization(int s, int trials, RngStream& rng);

// Dense-grid sup error of the spline against z^s, <= s(s-1)/(2N^2).
Certificate check_spline_bound(int s, int N, int grid_points = 10000);

// Polarized Newton reconstruction on random angle tuples.
Certificate check_newton_reconstruction(int m, int trials, RngStream& rng,
                                        double tol = 1e-8);

// Trig-sum polynomialization on random bags + angles, err <= 1e-10.
Certificate check_trig_polynomialization(const TaskSpec& spec, int trials,
                                         RngStream& rng);

// Per-frequency spline mode errors of the general ReLU construction stay
// within tau on all of X_m.
Certificate check_relu_mode_errors(const TaskSpec& spec, double tau);

}  // namespace modadd
