#include "modadd/metrics.hpp"

#include <cmath>
#include <limits>

namespace modadd {

double margin_from_scores(const std::vector<double>& s, int y) {
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < s.size(); ++q) {
    if (static_cast<int>(q) != y) best_other = std::max(best_other, s[q]);
  }
  return s[y] - best_other;
}

double margin(const MlpParams& theta, const BagVector& x, int y) {
  return margin_from_scores(scores(theta, x), y);
}

MarginReport margin_report(const MlpParams& theta, const LabeledSet& set) {
  if (set.items.empty())
    throw std::invalid_argument("margin_report: empty set");
  MarginReport rep;
  const Matrix X = batch_inputs(set);
  const Matrix S = forward_batch(theta, X);
  rep.per_sample_margins.resize(set.items.size());
  std::vector<double> row(theta.p());
  for (std::size_t i = 0; i < set.items.size(); ++i) {
    const double* s = S.row(i);
    row.assign(s, s + theta.p());
    rep.per_sample_margins[i] = margin_from_scores(row, set.items[i].y);
  }
  rep.min_margin = rep.per_sample_margins[0];
  for (double g : rep.per_sample_margins)
    rep.min_margin = std::min(rep.min_margin, g);
  rep.pct05_margin = percentile_nearest_rank(rep.per_sample_margins, 0.5);
  rep.v_spectral = spectral_norm(theta.V);
  rep.w_frobenius = frobenius_norm(theta.W);
  rep.v_row_l1 = row_max_l1(theta.V);
  const double denom_relu = rep.v_spectral * rep.w_frobenius;
  rep.norm_margin_relu = denom_relu > 0 ? rep.pct05_margin / denom_relu : 0.0;
  rep.norm_margin_sine =
      rep.v_row_l1 > 0 ? rep.pct05_margin / rep.v_row_l1 : 0.0;
  return rep;
}

EvalSummary evaluate(const MlpParams& theta, const LabeledSet& set) {
  if (set.items.empty()) throw std::invalid_argument("evaluate: empty set");
  const Matrix X = batch_inputs(set);
  const Matrix S = forward_batch(theta, X);
  EvalSummary out;
  out.n = set.items.size();
  std::size_t correct = 0, invalid = 0;
  std::vector<double> row(theta.p());
  for (std::size_t i = 0; i < set.items.size(); ++i) {
    const double* s = S.row(i);
    row.assign(s, s + theta.p());
    const int pred = predict_from_scores(row);
    if (pred == kInvalidPrediction)
      ++invalid;
    else if (pred == set.items[i].y)
      ++correct;
  }
  out.accuracy = static_cast<double>(correct) / out.n;
  out.invalid_rate = static_cast<double>(invalid) / out.n;
  return out;
}

double evaluate_weighted(const MlpParams& theta, const LabeledSet& set) {
  if (set.items.empty())
    throw std::invalid_argument("evaluate_weighted: empty set");
  if (!set.provenance.exhaustive)
    throw std::invalid_argument(
        "evaluate_weighted: requires an exhaustive domain");
  const Matrix X = batch_inputs(set);
  const Matrix S = forward_batch(theta, X);
  double acc = 0.0;
  std::vector<double> row(theta.p());
  for (std::size_t i = 0; i < set.items.size(); ++i) {
    const double* s = S.row(i);
    row.assign(s, s + theta.p());
    if (predict_from_scores(row) == set.items[i].y)
      acc += multinomial_weight(set.items[i].x, set.spec);
  }
  return acc;
}

double q2_statistic(const LabeledSet& set) {
  if (set.items.empty())
    throw std::invalid_argument("q2_statistic: empty set");
  double total = 0.0;
  for (const auto& item : set.items) {
    double sq = 0.0;
    for (int c : item.x) sq += static_cast<double>(c) * c;
    total += sq;
  }
  return std::sqrt(total / static_cast<double>(set.items.size()));
}

}  // namespace modadd
