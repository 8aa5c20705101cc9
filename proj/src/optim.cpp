#include "modadd/optim.hpp"

#include <cmath>

namespace modadd {

std::string optim_kind_name(OptimKind k) {
  switch (k) {
    case OptimKind::Sgd: return "sgd";
    case OptimKind::AdamW: return "adamw";
    case OptimKind::Muon: return "muon";
  }
  return "?";
}

OptimKind optim_kind_from_name(const std::string& name) {
  if (name == "sgd") return OptimKind::Sgd;
  if (name == "adamw") return OptimKind::AdamW;
  if (name == "muon") return OptimKind::Muon;
  throw std::invalid_argument("unknown optimizer: " + name);
}

std::string wd_policy_name(WdPolicy p) {
  switch (p) {
    case WdPolicy::VOnly: return "v_only";
    case WdPolicy::Both: return "both";
    case WdPolicy::None: return "none";
  }
  return "?";
}

WdPolicy wd_policy_from_name(const std::string& name) {
  if (name == "v_only") return WdPolicy::VOnly;
  if (name == "both") return WdPolicy::Both;
  if (name == "none") return WdPolicy::None;
  throw std::invalid_argument("unknown wd policy: " + name);
}

void OptimConfig::validate() const {
  if (!(lr > 0)) throw std::invalid_argument("OptimConfig: lr must be > 0");
  if (weight_decay < 0)
    throw std::invalid_argument("OptimConfig: weight_decay must be >= 0");
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1))
    throw std::invalid_argument("OptimConfig: betas must be in [0,1)");
  if (ns_steps < 1)
    throw std::invalid_argument("OptimConfig: ns_steps must be >= 1");
}

OptimState OptimState::init_for(const MlpParams& theta) {
  OptimState s;
  s.mW = Matrix(theta.W.rows, theta.W.cols);
  s.vW = Matrix(theta.W.rows, theta.W.cols);
  s.bufW = Matrix(theta.W.rows, theta.W.cols);
  s.mV = Matrix(theta.V.rows, theta.V.cols);
  s.vV = Matrix(theta.V.rows, theta.V.cols);
  s.bufV = Matrix(theta.V.rows, theta.V.cols);
  if (theta.bias) {
    s.m_bias.assign(theta.bias->size(), 0.0);
    s.v_bias.assign(theta.bias->size(), 0.0);
  }
  return s;
}

namespace {

constexpr double kNsA = 3.4445;
constexpr double kNsB = -4.7750;
constexpr double kNsC = 2.0315;

void decay_matrix(Matrix& m, double factor) {
  for (double& v : m.data) v *= factor;
}

bool decays_w(WdPolicy p) { return p == WdPolicy::Both; }
bool decays_v(WdPolicy p) {
  return p == WdPolicy::Both || p == WdPolicy::VOnly;
}

void adamw_update_matrix(Matrix& theta, const Matrix& g, Matrix& m, Matrix& v,
                         const OptimConfig& cfg, std::uint64_t t,
                         bool apply_decay) {
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double gi = g.data[i];
    m.data[i] = cfg.beta1 * m.data[i] + (1.0 - cfg.beta1) * gi;
    v.data[i] = cfg.beta2 * v.data[i] + (1.0 - cfg.beta2) * gi * gi;
    const double mhat = m.data[i] / bc1;
    const double vhat = v.data[i] / bc2;
    theta.data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
  if (apply_decay && cfg.weight_decay > 0)
    decay_matrix(theta, 1.0 - cfg.lr * cfg.weight_decay);
}

void adamw_update_vector(std::vector<double>& theta,
                         const std::vector<double>& g, std::vector<double>& m,
                         std::vector<double>& v, const OptimConfig& cfg,
                         std::uint64_t t) {
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    theta[i] -= cfg.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.eps);
  }
}

}  // namespace

Matrix newton_schulz_orthogonalize(const Matrix& g, int steps) {
  const double fnorm = frobenius_norm(g);
  if (fnorm == 0.0) return Matrix(g.rows, g.cols);

  // Work with rows <= cols so the Gram matrix X X^T is the small one.
  const bool flip = g.rows > g.cols;
  Matrix x = flip ? transposed(g) : g;
  for (double& v : x.data) v /= fnorm;

  Matrix a, a2, bx;
  for (int it = 0; it < steps; ++it) {
    gemm_nt(x, x, a);    // A = X X^T
    gemm_nn(a, a, a2);   // A^2
    // X <- a X + (b A + c A^2) X
    for (std::size_t i = 0; i < a.size(); ++i)
      a.data[i] = kNsB * a.data[i] + kNsC * a2.data[i];
    gemm_nn(a, x, bx);
    for (std::size_t i = 0; i < x.size(); ++i)
      x.data[i] = kNsA * x.data[i] + bx.data[i];
  }
  return flip ? transposed(x) : x;
}

double newton_schulz_scalar(double sigma, int steps) {
  double s = sigma;
  for (int i = 0; i < steps; ++i)
    s = kNsA * s + kNsB * s * s * s + kNsC * s * s * s * s * s;
  return s;
}

void sgd_step(MlpParams& theta, const Gradients& g, const OptimConfig& cfg,
              OptimState& state) {
  cfg.validate();
  ++state.step;
  for (std::size_t i = 0; i < theta.W.size(); ++i)
    theta.W.data[i] -= cfg.lr * g.dW.data[i];
  for (std::size_t i = 0; i < theta.V.size(); ++i)
    theta.V.data[i] -= cfg.lr * g.dV.data[i];
  if (theta.bias && g.db) {
    for (std::size_t i = 0; i < theta.bias->size(); ++i)
      (*theta.bias)[i] -= cfg.lr * (*g.db)[i];
  }
  if (cfg.weight_decay > 0) {
    const double f = 1.0 - cfg.lr * cfg.weight_decay;
    if (decays_w(cfg.wd_policy)) decay_matrix(theta.W, f);
    if (decays_v(cfg.wd_policy)) decay_matrix(theta.V, f);
  }
}

void adamw_step(MlpParams& theta, const Gradients& g, const OptimConfig& cfg,
                OptimState& state) {
  cfg.validate();
  ++state.step;
  adamw_update_matrix(theta.W, g.dW, state.mW, state.vW, cfg, state.step,
                      decays_w(cfg.wd_policy));
  adamw_update_matrix(theta.V, g.dV, state.mV, state.vV, cfg, state.step,
                      decays_v(cfg.wd_policy));
  if (theta.bias && g.db)
    adamw_update_vector(*theta.bias, *g.db, state.m_bias, state.v_bias, cfg,
                        state.step);
}

namespace {

void muon_update_matrix(Matrix& theta, const Matrix& g, Matrix& buf,
                        const OptimConfig& cfg, bool apply_decay) {
  for (std::size_t i = 0; i < buf.size(); ++i)
    buf.data[i] = cfg.momentum * buf.data[i] + g.data[i];
  Matrix upd(theta.rows, theta.cols);
  if (cfg.nesterov) {
    for (std::size_t i = 0; i < upd.size(); ++i)
      upd.data[i] = g.data[i] + cfg.momentum * buf.data[i];
  } else {
    upd.data = buf.data;
  }
  const Matrix ortho = newton_schulz_orthogonalize(upd, cfg.ns_steps);
  const double rows = static_cast<double>(theta.rows);
  const double cols = static_cast<double>(theta.cols);
  const double scale =
      std::sqrt(std::max(rows, cols) / std::min(rows, cols));
  for (std::size_t i = 0; i < theta.size(); ++i)
    theta.data[i] -= cfg.lr * scale * ortho.data[i];
  if (apply_decay && cfg.weight_decay > 0)
    decay_matrix(theta, 1.0 - cfg.lr * cfg.weight_decay);
}

}  // namespace

void muon_step(MlpParams& theta, const Gradients& g, const OptimConfig& cfg,
               OptimState& state) {
  cfg.validate();
  ++state.step;
  muon_update_matrix(theta.W, g.dW, state.bufW, cfg, decays_w(cfg.wd_policy));
  muon_update_matrix(theta.V, g.dV, state.bufV, cfg, decays_v(cfg.wd_policy));
  if (theta.bias && g.db) {
    // 1-D parameters are not orthogonalizable; AdamW with zero decay.
    OptimConfig bias_cfg = cfg;
    bias_cfg.weight_decay = 0.0;
    bias_cfg.beta1 = 0.9;
    bias_cfg.beta2 = 0.999;
    bias_cfg.eps = 1e-8;
    adamw_update_vector(*theta.bias, *g.db, state.m_bias, state.v_bias,
                        bias_cfg, state.step);
  }
}

void optimizer_step(MlpParams& theta, const Gradients& g,
                    const OptimConfig& cfg, OptimState& state) {
  switch (cfg.kind) {
    case OptimKind::Sgd: return sgd_step(theta, g, cfg, state);
    case OptimKind::AdamW: return adamw_step(theta, g, cfg, state);
    case OptimKind::Muon: return muon_step(theta, g, cfg, state);
  }
}

}  // namespace modadd
