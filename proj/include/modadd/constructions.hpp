// Closed-form networks that solve modular addition, plus the building
// blocks they compose: sign polarization, ReLU spline interpolants of
// power functions, the polarized Newton expansion of cos/sin of angle
// sums, and integer trig-sum polynomials.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "modadd/model.hpp"

namespace modadd {

// Exact 64-bit rational with overflow-checked arithmetic.
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational make(long long n, long long d);
  double to_double() const { return static_cast<double>(num) / den; }
};
std::optional<Rational> rat_add(Rational a, Rational b);
std::optional<Rational> rat_mul(Rational a, Rational b);

// Reduce an angle to [-pi, pi) with floor-based modulo.
double reduce_to_pi(double v);

// --------------------------------------------------- sine constructions

// Width-2, no bias: exact on every bag of length exactly m, margin
// 1 - cos(2*pi/p).
MlpParams sine_width2_fixed(const TaskSpec& spec);

// Width-2 with bias (0, pi/2): exact for every length m >= 2; the
// correct-class score is always 1.
MlpParams sine_width2_biased_uniform(int p);

// Width floor((p-1)/2), no bias: length-agnostic, correct except on
// residue 0 (odd p) or residues {0, p/2} (even p), where all scores
// vanish. For p = 2 the width would be 0; a single zero unit is kept so
// the network stays well formed.
MlpParams sine_halfp_unbiased(int p);

// Width 2p: score p on the correct class and 0 elsewhere, so margin p;
// all singular values of V equal sqrt(p).
MlpParams sine_highmargin_2p(const TaskSpec& spec);

// ------------------------------------------------------ building blocks

// x1*...*xs = sum over sign vectors of weight * (sum eps_i x_i)^s.
struct PolarTerm {
  std::vector<std::int8_t> signs;  // entries +-1
  double weight;                   // prod(signs) / (s! 2^s)
};
std::vector<PolarTerm> polarize(int s);  // 1 <= s <= 12
double polarize_eval(const std::vector<PolarTerm>& terms,
                     const std::vector<double>& x);

// One hidden unit of a ReLU spline: c * ReLU(a z - b).
struct SplineUnit {
  double a;
  double b;
  double c;
};

// Linear-spline interpolant of z^s on [-1,1] with N uniform intervals,
// expressed as at most N+1 ReLU units. Sup error <= s(s-1)/(2 N^2).
std::vector<SplineUnit> relu_spline_power(int s, int N);
double spline_eval(const std::vector<SplineUnit>& units, double z);

// One term of the polarized Newton expansion of cos/sin(sum of angles).
struct NewtonTerm {
  std::vector<int> k;         // multi-index in K_m: sum j*k_j = m
  std::vector<int> p_select;  // componentwise <= k
  std::vector<std::int8_t> eps;  // length |k|, entries +-1
  Rational coeff;             // signed, |coeff| <= 1/2; includes prod(eps)
  bool is_cos;                // parity of |k|-|p|: even -> cos, odd -> sin

  int order() const {  // |k|
    int r = 0;
    for (int v : k) r += v;
    return r;
  }
  // Weight of C_j / S_j inside the linear form G.
  void linear_weights(std::vector<int>& cw, std::vector<int>& sw) const;
};

std::vector<NewtonTerm> newton_expansion(int m);  // 1 <= m <= 8

// Exact number of (k, p, eps) triples; in [m 2^m, 13 m 2^m] for m <= 10.
std::uint64_t newton_term_count(int m);

// Evaluate the expansion at concrete angles; returns (cos_sum, sin_sum)
// reconstructions for comparison against cos/sin of the true angle sum.
struct TrigPair {
  double cos_value;
  double sin_value;
};
TrigPair newton_eval(const std::vector<NewtonTerm>& terms,
                     const std::vector<double>& angles);

// Unsigned Stirling numbers of the first kind [m r] for r = 0..m.
std::vector<std::uint64_t> stirling_first_unsigned(int m);

// Lambda_m = sum_r 2^r (mr)^r [m r] / (r! m!), the exact spline-budget
// constant; delta = tau / Lambda_m.
double lambda_m(int m);

// Closed-form width bound 13 p m 2^m (m sqrt(em/tau) (1+2em)^((m-1)/2) + 2).
double relu_width_bound(int m, int p, double tau);

// ------------------------------------------------- ReLU constructions

// General multi-frequency ReLU interpolant with margin >= (1-4 tau) p.
// Practical for m <= 6; throws if the weight count would exceed entry_cap.
MlpParams relu_construction(const TaskSpec& spec, double tau,
                            std::uint64_t entry_cap = 200'000'000);

// Width of relu_construction without materializing it.
std::uint64_t relu_construction_width(const TaskSpec& spec, double tau);

// Explicit m = 2 network of width exactly 36 p with margin
// >= 25 p / 49 + 20 / 49.
MlpParams relu_construction_m2(int p);

// --------------------------------------------- trig-sum polynomials

// Integer-coefficient polynomial in variables c_0, s_0, ..., c_{p-1},
// s_{p-1}; exponent key layout: index 2v is c_v, index 2v+1 is s_v.
struct TrigPoly {
  int p = 0;
  std::map<std::vector<std::uint8_t>, long long> terms;

  int degree() const;
  double eval(const std::vector<double>& angles) const;
};

struct TrigPolyPair {
  TrigPoly sin_poly;  // evaluates to sin(sum_v x_v alpha_v)
  TrigPoly cos_poly;  // evaluates to cos(sum_v x_v alpha_v)
};

// Recursive construction peeling the smallest-index positive coordinate;
// degree <= m, integer coefficients.
TrigPolyPair trig_sum_polynomialize(const BagVector& x);

}  // namespace modadd
