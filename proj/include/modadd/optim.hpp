// First-order optimizers: vanilla SGD, AdamW with decoupled weight decay,
// and Muon with Newton-Schulz orthogonalization. Bias parameters are
// always routed to AdamW when the optimizer is Muon.
#pragma once

#include <cstdint>
#include <string>

#include "modadd/model.hpp"
#include "modadd/numerics.hpp"

namespace modadd {

enum class OptimKind { Sgd, AdamW, Muon };
enum class WdPolicy { VOnly, Both, None };

std::string optim_kind_name(OptimKind k);
OptimKind optim_kind_from_name(const std::string& name);
std::string wd_policy_name(WdPolicy p);
WdPolicy wd_policy_from_name(const std::string& name);

struct OptimConfig {
  OptimKind kind = OptimKind::AdamW;
  double lr = 1e-3;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double momentum = 0.95;
  bool nesterov = true;
  int ns_steps = 5;
  WdPolicy wd_policy = WdPolicy::None;

  void validate() const;
};

// Moment buffers mirroring the parameter shapes.
struct OptimState {
  Matrix mW, vW, mV, vV;          // Adam first/second moments
  Matrix bufW, bufV;              // momentum buffers (SGD momentum / Muon)
  std::vector<double> m_bias, v_bias;
  std::uint64_t step = 0;

  static OptimState init_for(const MlpParams& theta);
};

// Prenormalize to unit Frobenius norm, then run `steps` iterations of
// X <- a X + b X(X^T X) + c X(X^T X)^2 with the fixed odd quintic
// (3.4445, -4.7750, 2.0315). Zero input returns zero.
Matrix newton_schulz_orthogonalize(const Matrix& g, int steps);

// Scalar quintic composed `steps` times, applied to sigma in [0,1];
// this is what the iteration does to each singular value.
double newton_schulz_scalar(double sigma, int steps);

void sgd_step(MlpParams& theta, const Gradients& g, const OptimConfig& cfg,
              OptimState& state);
void adamw_step(MlpParams& theta, const Gradients& g, const OptimConfig& cfg,
                OptimState& state);
// Muon on the 2-D parameters W and V; bias (if any) is stepped with AdamW
// using the same learning rate and no weight decay.
void muon_step(MlpParams& theta, const Gradients& g, const OptimConfig& cfg,
               OptimState& state);

// Dispatch on cfg.kind.
void optimizer_step(MlpParams& theta, const Gradients& g,
                    const OptimConfig& cfg, OptimState& state);

}  // namespace modadd
