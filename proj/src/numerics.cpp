#include "modadd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace modadd {

bool Matrix::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix transposed(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* src = m.row(i);
    for (std::size_t j = 0; j < m.cols; ++j) t.at(j, i) = src[j];
  }
  return t;
}

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols != b.rows) throw std::invalid_argument("gemm_nn: shape mismatch");
  c = Matrix(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* crow = c.row(i);
    const double* arow = a.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double av = arow[k];
      if (av == 0.0) continue;
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols != b.cols) throw std::invalid_argument("gemm_nt: shape mismatch");
  c = Matrix(a.rows, b.rows);
  const std::size_t k = a.cols;
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* brow = b.row(j);
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      std::size_t t = 0;
      for (; t + 4 <= k; t += 4) {
        s0 += arow[t] * brow[t];
        s1 += arow[t + 1] * brow[t + 1];
        s2 += arow[t + 2] * brow[t + 2];
        s3 += arow[t + 3] * brow[t + 3];
      }
      for (; t < k; ++t) s0 += arow[t] * brow[t];
      crow[j] = (s0 + s1) + (s2 + s3);
    }
  }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.rows != b.rows) throw std::invalid_argument("gemm_tn: shape mismatch");
  c = Matrix(a.cols, b.cols);
  for (std::size_t k = 0; k < a.rows; ++k) {
    const double* arow = a.row(k);
    const double* brow = b.row(k);
    for (std::size_t i = 0; i < a.cols; ++i) {
      const double av = arow[i];
      if (av == 0.0) continue;
      double* crow = c.row(i);
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
    }
  }
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data) s += v * v;
  return std::sqrt(s);
}

double row_max_l1(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* r = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += std::fabs(r[j]);
    best = std::max(best, s);
  }
  return best;
}

namespace {

// y = M^T (M x), without forming M^T M.
void mtm_apply(const Matrix& m, const std::vector<double>& x,
               std::vector<double>& tmp, std::vector<double>& y) {
  tmp.assign(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* r = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += r[j] * x[j];
    tmp[i] = s;
  }
  y.assign(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double ti = tmp[i];
    if (ti == 0.0) continue;
    const double* r = m.row(i);
    for (std::size_t j = 0; j < m.cols; ++j) y[j] += ti * r[j];
  }
}

double vec_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double spectral_norm(const Matrix& m, double tol, std::size_t max_iter) {
  if (tol <= 0) throw std::invalid_argument("spectral_norm: tol must be > 0");
  if (m.rows == 0 || m.cols == 0) return 0.0;
  bool zero = true;
  for (double v : m.data) {
    if (v != 0.0) { zero = false; break; }
  }
  if (zero) return 0.0;

  const std::size_t n = m.cols;
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y, tmp;
  double lambda = 0.0;
  std::size_t restarts = 0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    mtm_apply(m, x, tmp, y);
    const double ynorm = vec_norm(y);
    if (ynorm == 0.0) {
      // Start vector landed in the null space; restart from a basis vector.
      if (restarts >= n) return 0.0;
      x.assign(n, 0.0);
      x[restarts++] = 1.0;
      lambda = 0.0;
      continue;
    }
    // Rayleigh quotient with unit x.
    double lam = 0.0;
    for (std::size_t j = 0; j < n; ++j) lam += x[j] * y[j];
    for (std::size_t j = 0; j < n; ++j) x[j] = y[j] / ynorm;
    if (it > 0 && std::fabs(lam - lambda) <= tol * std::fabs(lam)) {
      return std::sqrt(std::fabs(lam));
    }
    lambda = lam;
  }
  throw ConvergenceError("spectral_norm: power iteration did not converge",
                         std::sqrt(std::fabs(lambda)));
}

double percentile_nearest_rank(std::vector<double> values, double q) {
  if (values.empty())
    throw std::invalid_argument("percentile_nearest_rank: empty input");
  if (!(q > 0.0 && q <= 100.0))
    throw std::invalid_argument("percentile_nearest_rank: q must be in (0,100]");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::size_t idx = static_cast<std::size_t>(std::ceil(q / 100.0 * n));
  if (idx == 0) idx = 1;
  if (idx > values.size()) idx = values.size();
  return values[idx - 1];
}

// ------------------------------------------------------------- RngStream

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t avalanche(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  key_ = avalanche(seed ^ avalanche(stream_id + kGolden));
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return avalanche(key_ + kGolden * counter_);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_int(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_int: bound must be > 0");
  const std::uint64_t limit = (~std::uint64_t{0} / bound) * bound;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return r % bound;
}

double RngStream::normal(double mean, double stddev) {
  // Box-Muller without a cached spare: stateless beyond the counter.
  double u1;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double z = r * std::cos(2.0 * 3.14159265358979323846 * u2);
  return mean + stddev * z;
}

}  // namespace modadd
