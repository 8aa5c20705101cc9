// Dense row-major matrices, deterministic norms/percentiles, and
// reproducible counter-based random streams. Everything downstream
// (data generation, models, optimizers, verification) builds on this.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace modadd {

// ---------------------------------------------------------------- Matrix

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  std::size_t size() const { return data.size(); }

  bool all_finite() const;
};

Matrix transposed(const Matrix& m);

// C = A * B               (A: n x k, B: k x m)
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c);
// C = A * B^T             (A: n x k, B: m x k)
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c);
// C = A^T * B             (A: k x n, B: k x m)
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c);

// ----------------------------------------------------------------- norms

// Thrown when power iteration fails to converge; carries the last iterate.
struct ConvergenceError : std::runtime_error {
  double last_estimate;
  ConvergenceError(const std::string& what, double last)
      : std::runtime_error(what), last_estimate(last) {}
};

// Largest singular value via power iteration on M^T M, started from the
// normalized all-ones vector. Zero matrix returns 0 exactly.
double spectral_norm(const Matrix& m, double tol = 1e-10,
                     std::size_t max_iter = 10000);

double frobenius_norm(const Matrix& m);

// max_i sum_j |M_ij|  (the (1,inf) operator norm)
double row_max_l1(const Matrix& m);

// Nearest-rank percentile: sort ascending, take element ceil(q/100*n)-1.
// q in (0, 100]; empty input is an error.
double percentile_nearest_rank(std::vector<double> values, double q);

// ------------------------------------------------------------- RngStream

// Counter-based 64-bit generator (splitmix-style avalanche over
// key + counter). Same (seed, stream_id) always yields the same sequence;
// distinct stream ids give independent streams. Single-owner, not shared.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  double uniform01();                       // [0, 1)
  std::uint64_t uniform_int(std::uint64_t bound);  // [0, bound), unbiased
  double normal(double mean = 0.0, double stddev = 1.0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace modadd
