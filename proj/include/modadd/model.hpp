// Two-layer MLP: scores V*sigma(Wx [+ b]), unique-argmax prediction with
// an invalid symbol on ties, cross-entropy, and analytic gradients.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modadd/data.hpp"
#include "modadd/numerics.hpp"

namespace modadd {

enum class Activation { Sine, Relu };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct MlpParams {
  Matrix W;  // d x p
  Matrix V;  // p x d
  std::optional<std::vector<double>> bias;  // length d
  Activation act = Activation::Sine;

  std::size_t d() const { return W.rows; }
  std::size_t p() const { return W.cols; }
  void validate() const;
};

// Prediction: a label in [p], or invalid when the max score is not
// strictly unique (ties decided by exact float equality).
constexpr int kInvalidPrediction = -1;

std::vector<double> scores(const MlpParams& theta,
                           const std::vector<double>& x);
std::vector<double> scores(const MlpParams& theta, const BagVector& x);

int predict_from_scores(const std::vector<double>& s);
int predict(const MlpParams& theta, const BagVector& x);

// Batched forward pass. X is n x p (one bag per row); returns n x p scores.
Matrix forward_batch(const MlpParams& theta, const Matrix& X);
Matrix batch_inputs(const LabeledSet& set);

// Mean of -log softmax(scores)[y], max-stabilized.
double cross_entropy(const MlpParams& theta, const LabeledSet& set);

struct Gradients {
  Matrix dW;
  Matrix dV;
  std::optional<std::vector<double>> db;
};

// Exact mean gradients over the batch. Sine gates by cos(Wx+b);
// ReLU uses the 0/1 gate with subgradient 0 at 0.
Gradients grad_cross_entropy(const MlpParams& theta, const LabeledSet& batch);
Gradients grad_cross_entropy(const MlpParams& theta, const Matrix& X,
                             const std::vector<int>& labels,
                             double* loss_out = nullptr);

// Checkpoint JSON: {d, p, act, bias?, W, V} with plain-array weights.
// Round-trips bit-stably.
void save_checkpoint(const MlpParams& theta, const std::string& path);
MlpParams load_checkpoint(const std::string& path);

}  // namespace modadd
