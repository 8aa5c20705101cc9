// Accuracy, multiclass margins, percentile margins, layer norms,
// normalized margins, and the Q2 input statistic.
#pragma once

#include "modadd/model.hpp"

namespace modadd {

struct MarginReport {
  std::vector<double> per_sample_margins;
  double min_margin = 0.0;
  double pct05_margin = 0.0;   // 0.5th percentile, nearest rank
  double v_spectral = 0.0;     // ||V||_2
  double w_frobenius = 0.0;    // ||W||_F
  double v_row_l1 = 0.0;       // ||V||_{1,inf}
  double norm_margin_relu = 0.0;  // pct05 / (||V||_2 ||W||_F)
  double norm_margin_sine = 0.0;  // pct05 / ||V||_{1,inf}
};

struct EvalSummary {
  double accuracy = 0.0;      // invalid predictions count as errors
  double invalid_rate = 0.0;
  std::size_t n = 0;
};

// s_y(x) - max_{k != y} s_k(x)
double margin(const MlpParams& theta, const BagVector& x, int y);
double margin_from_scores(const std::vector<double>& s, int y);

MarginReport margin_report(const MlpParams& theta, const LabeledSet& set);

EvalSummary evaluate(const MlpParams& theta, const LabeledSet& set);

// Population accuracy over an exhaustive domain, weighting each bag by
// its multinomial sequence count, i.e. the true population accuracy
// under uniform token draws; evaluate() gives the per-bag fraction.
double evaluate_weighted(const MlpParams& theta, const LabeledSet& set);

// Root mean squared l2 norm of the inputs.
double q2_statistic(const LabeledSet& set);

}  // namespace modadd
