#include "modadd/model.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace modadd {

using nlohmann::json;

std::string activation_name(Activation a) {
  return a == Activation::Sine ? "sine" : "relu";
}

Activation activation_from_name(const std::string& name) {
  if (name == "sine") return Activation::Sine;
  if (name == "relu") return Activation::Relu;
  throw std::invalid_argument("unknown activation: " + name);
}

void MlpParams::validate() const {
  if (W.rows == 0 || W.cols == 0)
    throw std::invalid_argument("MlpParams: empty W");
  if (V.rows != W.cols || V.cols != W.rows)
    throw std::invalid_argument("MlpParams: V shape must be p x d");
  if (bias && bias->size() != W.rows)
    throw std::invalid_argument("MlpParams: bias length must be d");
}

namespace {

inline double apply_act(Activation act, double z) {
  return act == Activation::Sine ? std::sin(z) : (z > 0.0 ? z : 0.0);
}

inline double act_gate(Activation act, double z) {
  return act == Activation::Sine ? std::cos(z) : (z > 0.0 ? 1.0 : 0.0);
}

}  // namespace

std::vector<double> scores(const MlpParams& theta,
                           const std::vector<double>& x) {
  const std::size_t d = theta.d(), p = theta.p();
  if (x.size() != p) throw std::invalid_argument("scores: input length != p");
  std::vector<double> h(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double* wrow = theta.W.row(i);
    double a = theta.bias ? (*theta.bias)[i] : 0.0;
    for (std::size_t j = 0; j < p; ++j) a += wrow[j] * x[j];
    h[i] = apply_act(theta.act, a);
  }
  std::vector<double> s(p, 0.0);
  for (std::size_t q = 0; q < p; ++q) {
    const double* vrow = theta.V.row(q);
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) acc += vrow[i] * h[i];
    s[q] = acc;
  }
  return s;
}

std::vector<double> scores(const MlpParams& theta, const BagVector& x) {
  std::vector<double> xr(x.begin(), x.end());
  return scores(theta, xr);
}

int predict_from_scores(const std::vector<double>& s) {
  std::size_t best = 0;
  for (std::size_t q = 1; q < s.size(); ++q) {
    if (s[q] > s[best]) best = q;
  }
  for (std::size_t q = 0; q < s.size(); ++q) {
    if (q != best && s[q] == s[best]) return kInvalidPrediction;
  }
  return static_cast<int>(best);
}

int predict(const MlpParams& theta, const BagVector& x) {
  return predict_from_scores(scores(theta, x));
}

Matrix batch_inputs(const LabeledSet& set) {
  Matrix X(set.items.size(), set.spec.p);
  for (std::size_t i = 0; i < set.items.size(); ++i) {
    double* row = X.row(i);
    for (int j = 0; j < set.spec.p; ++j) row[j] = set.items[i].x[j];
  }
  return X;
}

Matrix forward_batch(const MlpParams& theta, const Matrix& X) {
  if (X.cols != theta.p())
    throw std::invalid_argument("forward_batch: input cols != p");
  Matrix H;
  gemm_nt(X, theta.W, H);  // n x d preactivations
  if (theta.bias) {
    for (std::size_t i = 0; i < H.rows; ++i) {
      double* row = H.row(i);
      for (std::size_t j = 0; j < H.cols; ++j) row[j] += (*theta.bias)[j];
    }
  }
  for (double& v : H.data) v = apply_act(theta.act, v);
  Matrix S;
  gemm_nt(H, theta.V, S);  // n x p
  return S;
}

namespace {

// log(sum exp) stabilized; also writes softmax into probs.
double softmax_row(const double* s, std::size_t p, std::vector<double>& probs) {
  double mx = s[0];
  for (std::size_t q = 1; q < p; ++q) mx = std::max(mx, s[q]);
  double z = 0.0;
  for (std::size_t q = 0; q < p; ++q) {
    probs[q] = std::exp(s[q] - mx);
    z += probs[q];
  }
  for (std::size_t q = 0; q < p; ++q) probs[q] /= z;
  return mx + std::log(z);
}

}  // namespace

double cross_entropy(const MlpParams& theta, const LabeledSet& set) {
  if (set.items.empty())
    throw std::invalid_argument("cross_entropy: empty set");
  const Matrix X = batch_inputs(set);
  const Matrix S = forward_batch(theta, X);
  const std::size_t p = theta.p();
  std::vector<double> probs(p);
  double total = 0.0;
  for (std::size_t i = 0; i < S.rows; ++i) {
    const double lse = softmax_row(S.row(i), p, probs);
    total += lse - S.at(i, set.items[i].y);
  }
  return total / static_cast<double>(S.rows);
}

Gradients grad_cross_entropy(const MlpParams& theta, const Matrix& X,
                             const std::vector<int>& labels,
                             double* loss_out) {
  if (X.rows == 0) throw std::invalid_argument("grad_cross_entropy: empty batch");
  if (X.rows != labels.size())
    throw std::invalid_argument("grad_cross_entropy: labels size mismatch");
  const std::size_t n = X.rows, d = theta.d(), p = theta.p();

  Matrix A;  // preactivations, n x d
  gemm_nt(X, theta.W, A);
  if (theta.bias) {
    for (std::size_t i = 0; i < n; ++i) {
      double* row = A.row(i);
      for (std::size_t j = 0; j < d; ++j) row[j] += (*theta.bias)[j];
    }
  }
  Matrix H(n, d);
  for (std::size_t i = 0; i < A.size(); ++i)
    H.data[i] = apply_act(theta.act, A.data[i]);

  Matrix S;
  gemm_nt(H, theta.V, S);

  // dL/dS = (softmax - onehot) / n
  Matrix G(n, p);
  std::vector<double> probs(p);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lse = softmax_row(S.row(i), p, probs);
    loss += lse - S.at(i, labels[i]);
    double* grow = G.row(i);
    for (std::size_t q = 0; q < p; ++q) grow[q] = probs[q] * inv_n;
    grow[labels[i]] -= inv_n;
  }
  if (loss_out) *loss_out = loss * inv_n;

  Gradients g;
  gemm_tn(G, H, g.dV);  // p x d

  Matrix dH;
  gemm_nn(G, theta.V, dH);  // n x d
  for (std::size_t i = 0; i < dH.size(); ++i)
    dH.data[i] *= act_gate(theta.act, A.data[i]);

  gemm_tn(dH, X, g.dW);  // d x p
  if (theta.bias) {
    std::vector<double> db(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = dH.row(i);
      for (std::size_t j = 0; j < d; ++j) db[j] += row[j];
    }
    g.db = std::move(db);
  }
  return g;
}

Gradients grad_cross_entropy(const MlpParams& theta, const LabeledSet& batch) {
  if (batch.items.empty())
    throw std::invalid_argument("grad_cross_entropy: empty batch");
  const Matrix X = batch_inputs(batch);
  std::vector<int> labels(batch.items.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = batch.items[i].y;
  return grad_cross_entropy(theta, X, labels);
}

void save_checkpoint(const MlpParams& theta, const std::string& path) {
  theta.validate();
  json j = {{"schema", "modadd-checkpoint-v1"},
            {"d", theta.d()},
            {"p", theta.p()},
            {"act", activation_name(theta.act)},
            {"W", theta.W.data},
            {"V", theta.V.data}};
  if (theta.bias) j["bias"] = *theta.bias;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << j.dump() << "\n";
}

MlpParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  json j;
  in >> j;
  if (j.value("schema", "") != "modadd-checkpoint-v1")
    throw std::runtime_error("load_checkpoint: unknown schema");
  MlpParams theta;
  const std::size_t d = j.at("d").get<std::size_t>();
  const std::size_t p = j.at("p").get<std::size_t>();
  theta.act = activation_from_name(j.at("act").get<std::string>());
  theta.W = Matrix(d, p);
  theta.W.data = j.at("W").get<std::vector<double>>();
  theta.V = Matrix(p, d);
  theta.V.data = j.at("V").get<std::vector<double>>();
  if (theta.W.data.size() != d * p || theta.V.data.size() != d * p)
    throw std::runtime_error("load_checkpoint: weight size mismatch");
  if (j.contains("bias"))
    theta.bias = j.at("bias").get<std::vector<double>>();
  theta.validate();
  return theta;
}

}  // namespace modadd
