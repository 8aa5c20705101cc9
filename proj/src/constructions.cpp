#include "modadd/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace modadd {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

std::optional<long long> ipow_checked(long long base, int e) {
  long long acc = 1;
  for (int i = 0; i < e; ++i) {
    if (__builtin_mul_overflow(acc, base, &acc)) return std::nullopt;
  }
  return acc;
}
}  // namespace

Rational Rational::make(long long n, long long d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const long long g = std::gcd(n < 0 ? -n : n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  return Rational{n, d};
}

std::optional<Rational> rat_add(Rational a, Rational b) {
  long long n1, n2, n, d;
  if (__builtin_mul_overflow(a.num, b.den, &n1)) return std::nullopt;
  if (__builtin_mul_overflow(b.num, a.den, &n2)) return std::nullopt;
  if (__builtin_add_overflow(n1, n2, &n)) return std::nullopt;
  if (__builtin_mul_overflow(a.den, b.den, &d)) return std::nullopt;
  return Rational::make(n, d);
}

std::optional<Rational> rat_mul(Rational a, Rational b) {
  // Cross-reduce before multiplying to keep intermediates small.
  const long long g1 = std::gcd(a.num < 0 ? -a.num : a.num, b.den);
  const long long g2 = std::gcd(b.num < 0 ? -b.num : b.num, a.den);
  a.num /= g1;
  b.den /= g1;
  b.num /= g2;
  a.den /= g2;
  long long n, d;
  if (__builtin_mul_overflow(a.num, b.num, &n)) return std::nullopt;
  if (__builtin_mul_overflow(a.den, b.den, &d)) return std::nullopt;
  return Rational::make(n, d);
}

double reduce_to_pi(double v) {
  return v - kTwoPi * std::floor((v + kPi) / kTwoPi);
}

// --------------------------------------------------- sine constructions

MlpParams sine_width2_fixed(const TaskSpec& spec) {
  spec.validate();
  const int p = spec.p;
  const double phi = kTwoPi / p;
  MlpParams theta;
  theta.act = Activation::Sine;
  theta.W = Matrix(2, p);
  theta.V = Matrix(p, 2);
  for (int r = 0; r < p; ++r) {
    theta.W.at(0, r) = reduce_to_pi(phi * r);
    theta.W.at(1, r) = reduce_to_pi(phi * r + kPi / (2.0 * spec.m));
  }
  for (int q = 0; q < p; ++q) {
    theta.V.at(q, 0) = std::sin(phi * q);
    theta.V.at(q, 1) = std::cos(phi * q);
  }
  return theta;
}

MlpParams sine_width2_biased_uniform(int p) {
  if (p < 2) throw std::invalid_argument("sine_width2_biased_uniform: p >= 2");
  const double phi = kTwoPi / p;
  MlpParams theta;
  theta.act = Activation::Sine;
  theta.W = Matrix(2, p);
  theta.V = Matrix(p, 2);
  theta.bias = std::vector<double>{0.0, kPi / 2.0};
  for (int r = 0; r < p; ++r) {
    const double w = reduce_to_pi(phi * r);
    theta.W.at(0, r) = w;
    theta.W.at(1, r) = w;
  }
  for (int q = 0; q < p; ++q) {
    theta.V.at(q, 0) = std::sin(phi * q);
    theta.V.at(q, 1) = std::cos(phi * q);
  }
  return theta;
}

MlpParams sine_halfp_unbiased(int p) {
  if (p < 2) throw std::invalid_argument("sine_halfp_unbiased: p >= 2");
  const int K = (p - 1) / 2;
  MlpParams theta;
  theta.act = Activation::Sine;
  if (K == 0) {
    // p = 2: the construction is empty; keep one inert unit.
    theta.W = Matrix(1, p);
    theta.V = Matrix(p, 1);
    return theta;
  }
  theta.W = Matrix(K, p);
  theta.V = Matrix(p, K);
  for (int k = 1; k <= K; ++k) {
    for (int r = 0; r < p; ++r)
      theta.W.at(k - 1, r) = kTwoPi * k / p * r;
    // V rows are antisymmetric under q <-> p-q and vanish at q = 0 (and
    // q = p/2 for even p). Writing the zeros and negations exactly makes
    // the score vector exactly antisymmetric, so bags whose residue sits
    // in the vanishing set always come out as errors (wrong class or an
    // exact tie), matching the intended population accuracy bit for bit.
    theta.V.at(0, k - 1) = 0.0;
    if (p % 2 == 0) theta.V.at(p / 2, k - 1) = 0.0;
    for (int q = 1; 2 * q < p; ++q) {
      const double v = std::sin(kTwoPi * k / p * q);
      theta.V.at(q, k - 1) = v;
      theta.V.at(p - q, k - 1) = -v;
    }
  }
  return theta;
}

MlpParams sine_highmargin_2p(const TaskSpec& spec) {
  spec.validate();
  const int p = spec.p;
  MlpParams theta;
  theta.act = Activation::Sine;
  theta.W = Matrix(2 * p, p);
  theta.V = Matrix(p, 2 * p);
  for (int k = 1; k <= p; ++k) {
    const double phik = kTwoPi * k / p;
    for (int r = 0; r < p; ++r) {
      theta.W.at(2 * k - 2, r) = reduce_to_pi(phik * r);
      theta.W.at(2 * k - 1, r) = reduce_to_pi(phik * r + kPi / (2.0 * spec.m));
    }
    for (int q = 0; q < p; ++q) {
      theta.V.at(q, 2 * k - 2) = std::sin(phik * q);
      theta.V.at(q, 2 * k - 1) = std::cos(phik * q);
    }
  }
  return theta;
}

// ------------------------------------------------------ building blocks

std::vector<PolarTerm> polarize(int s) {
  if (s < 1 || s > 12) throw std::invalid_argument("polarize: s must be in [1,12]");
  double fact = 1.0;
  for (int i = 2; i <= s; ++i) fact *= i;
  const double base = 1.0 / (fact * std::ldexp(1.0, s));
  std::vector<PolarTerm> terms;
  terms.reserve(std::size_t{1} << s);
  for (std::uint32_t mask = 0; mask < (1u << s); ++mask) {
    PolarTerm t;
    t.signs.resize(s);
    int prod = 1;
    for (int i = 0; i < s; ++i) {
      t.signs[i] = (mask >> i) & 1 ? 1 : -1;
      prod *= t.signs[i];
    }
    t.weight = prod * base;
    terms.push_back(std::move(t));
  }
  return terms;
}

double polarize_eval(const std::vector<PolarTerm>& terms,
                     const std::vector<double>& x) {
  double total = 0.0;
  for (const auto& t : terms) {
    double lin = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) lin += t.signs[i] * x[i];
    double pw = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) pw *= lin;
    total += t.weight * pw;
  }
  return total;
}

std::vector<SplineUnit> relu_spline_power(int s, int N) {
  if (s < 1 || N < 1)
    throw std::invalid_argument("relu_spline_power: s, N must be >= 1");

  // Knots z_j = (2j - N) / N. Coefficients are exact rationals whenever
  // N^(s+1) fits comfortably in 64 bits; otherwise long double.
  const auto cap = ipow_checked(N, s + 1);
  const bool exact = cap.has_value() && *cap < (1LL << 59);

  auto knot_pow = [&](int j) -> long double {
    long double z = static_cast<long double>(2 * j - N) / N;
    long double r = 1.0L;
    for (int i = 0; i < s; ++i) r *= z;
    return r;
  };

  std::vector<SplineUnit> units;
  double c1, c2;
  std::vector<double> gamma(std::max(0, N - 1));
  if (exact) {
    const long long Ns = *ipow_checked(N, s);
    auto znum = [&](int j) {  // numerator of z_j^s over N^s
      long long b = 2LL * j - N, acc = 1;
      for (int i = 0; i < s; ++i) acc *= b;
      return acc;
    };
    // m0 = (z_1^s - z_0^s) * N / 2 ; c1 = m0 + (-1)^s / 2 ; c2 = (-1)^s / 2
    const Rational m0 =
        *rat_mul(Rational::make(znum(1) - znum(0), Ns), Rational::make(N, 2));
    const Rational half = Rational::make(s % 2 == 0 ? 1 : -1, 2);
    c1 = rat_add(m0, half)->to_double();
    c2 = half.to_double();
    for (int j = 1; j <= N - 1; ++j) {
      const Rational g = *rat_mul(
          Rational::make(znum(j + 1) - 2 * znum(j) + znum(j - 1), Ns),
          Rational::make(N, 2));
      gamma[j - 1] = g.to_double();
    }
  } else {
    const long double h = 2.0L / N;
    const long double m0 = (knot_pow(1) - knot_pow(0)) / h;
    const long double half = (s % 2 == 0 ? 0.5L : -0.5L);
    c1 = static_cast<double>(m0 + half);
    c2 = static_cast<double>(half);
    for (int j = 1; j <= N - 1; ++j)
      gamma[j - 1] = static_cast<double>(
          (knot_pow(j + 1) - 2.0L * knot_pow(j) + knot_pow(j - 1)) / h);
  }

  if (c1 != 0.0) units.push_back({1.0, -1.0, c1});
  if (c2 != 0.0) units.push_back({-1.0, -1.0, c2});
  for (int j = 1; j <= N - 1; ++j) {
    if (gamma[j - 1] != 0.0)
      units.push_back({1.0, static_cast<double>(2 * j - N) / N, gamma[j - 1]});
  }
  return units;
}

double spline_eval(const std::vector<SplineUnit>& units, double z) {
  double v = 0.0;
  for (const auto& u : units) {
    const double a = u.a * z - u.b;
    if (a > 0.0) v += u.c * a;
  }
  return v;
}

// ----------------------------------------------- polarized Newton terms

namespace {

// All k in Z_{>=0}^m with sum j*k_j = m, lexicographic in k.
void enumerate_kset(int m, std::vector<std::vector<int>>& out) {
  std::vector<int> k(m, 0);
  auto rec = [&](auto&& self, int j, int remaining) -> void {
    if (j == m + 1) {
      if (remaining == 0) out.push_back(k);
      return;
    }
    for (int kj = 0; kj * j <= remaining; ++kj) {
      k[j - 1] = kj;
      self(self, j + 1, remaining - kj * j);
    }
    k[j - 1] = 0;
  };
  rec(rec, 1, m);
}

long long factorial_ll(int n) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

void NewtonTerm::linear_weights(std::vector<int>& cw,
                                std::vector<int>& sw) const {
  const int m = static_cast<int>(k.size());
  cw.assign(m, 0);
  sw.assign(m, 0);
  int idx = 0;
  for (int j = 0; j < m; ++j) {
    for (int l = 0; l < k[j]; ++l) {
      if (l < p_select[j])
        cw[j] += eps[idx];
      else
        sw[j] += eps[idx];
      ++idx;
    }
  }
}

std::vector<NewtonTerm> newton_expansion(int m) {
  if (m < 1 || m > 8)
    throw std::invalid_argument("newton_expansion: m must be in [1,8]");
  std::vector<std::vector<int>> kset;
  enumerate_kset(m, kset);

  std::vector<NewtonTerm> terms;
  for (const auto& k : kset) {
    int r = 0;
    long long jpow = 1;
    for (int j = 0; j < m; ++j) {
      r += k[j];
      for (int c = 0; c < k[j]; ++c) jpow *= (j + 1);
    }
    // Odometer over p <= k (componentwise).
    std::vector<int> psel(m, 0);
    while (true) {
      int psum = 0;
      long long factprod = 1;
      for (int j = 0; j < m; ++j) {
        psum += psel[j];
        factprod *= factorial_ll(psel[j]) * factorial_ll(k[j] - psel[j]);
      }
      const int diff = r - psum;  // |k| - |p|
      const bool is_cos = diff % 2 == 0;
      const int half = is_cos ? diff / 2 : (diff - 1) / 2;
      int sign = ((m - r) % 2 == 0 ? 1 : -1) * (half % 2 == 0 ? 1 : -1);

      long long den = jpow;
      if (__builtin_mul_overflow(den, factprod, &den) ||
          __builtin_mul_overflow(den, factorial_ll(r), &den) ||
          __builtin_mul_overflow(den, 1LL << r, &den))
        throw std::overflow_error("newton_expansion: coefficient overflow");

      for (std::uint32_t mask = 0; mask < (1u << r); ++mask) {
        NewtonTerm t;
        t.k = k;
        t.p_select = psel;
        t.eps.resize(r);
        int eprod = 1;
        for (int i = 0; i < r; ++i) {
          t.eps[i] = (mask >> i) & 1 ? 1 : -1;
          eprod *= t.eps[i];
        }
        t.coeff = Rational::make(sign * eprod, den);
        t.is_cos = is_cos;
        terms.push_back(std::move(t));
      }

      int j = m - 1;
      while (j >= 0 && psel[j] == k[j]) psel[j--] = 0;
      if (j < 0) break;
      ++psel[j];
    }
  }
  return terms;
}

std::uint64_t newton_term_count(int m) {
  if (m < 1 || m > 10)
    throw std::invalid_argument("newton_term_count: m must be in [1,10]");
  std::vector<std::vector<int>> kset;
  enumerate_kset(m, kset);
  std::uint64_t total = 0;
  for (const auto& k : kset) {
    int r = 0;
    std::uint64_t prod = 1;
    for (int kj : k) {
      r += kj;
      prod *= static_cast<std::uint64_t>(kj + 1);
    }
    total += prod << r;
  }
  return total;
}

TrigPair newton_eval(const std::vector<NewtonTerm>& terms,
                     const std::vector<double>& angles) {
  const int m = static_cast<int>(angles.size());
  std::vector<double> C(m + 1, 0.0), S(m + 1, 0.0);
  for (int j = 1; j <= m; ++j) {
    for (double th : angles) {
      C[j] += std::cos(j * th);
      S[j] += std::sin(j * th);
    }
  }
  TrigPair out{0.0, 0.0};
  std::vector<int> cw, sw;
  for (const auto& t : terms) {
    t.linear_weights(cw, sw);
    double g = 0.0;
    for (int j = 0; j < m; ++j) g += cw[j] * C[j + 1] + sw[j] * S[j + 1];
    const int r = t.order();
    double gp = 1.0;
    for (int i = 0; i < r; ++i) gp *= g;
    const double contrib = t.coeff.to_double() * gp;
    if (t.is_cos)
      out.cos_value += contrib;
    else
      out.sin_value += contrib;
  }
  return out;
}

std::vector<std::uint64_t> stirling_first_unsigned(int m) {
  // [m r] via [n r] = [n-1 r-1] + (n-1) [n-1 r]
  std::vector<std::uint64_t> row(m + 1, 0);
  row[0] = 1;
  for (int n = 1; n <= m; ++n) {
    std::vector<std::uint64_t> next(m + 1, 0);
    for (int r = 1; r <= n; ++r)
      next[r] = row[r - 1] + static_cast<std::uint64_t>(n - 1) * row[r];
    next[0] = 0;
    row = std::move(next);
  }
  return row;
}

double lambda_m(int m) {
  const auto stirling = stirling_first_unsigned(m);
  long double total = 0.0L;
  const long double mfact = factorial_ll(m);
  for (int r = 1; r <= m; ++r) {
    long double term = std::pow(2.0L, static_cast<long double>(r));
    for (int i = 0; i < r; ++i) term *= static_cast<long double>(m) * r;
    term *= static_cast<long double>(stirling[r]);
    term /= factorial_ll(r) * mfact;
    total += term;
  }
  return static_cast<double>(total);
}

double relu_width_bound(int m, int p, double tau) {
  const double e = std::exp(1.0);
  return 13.0 * p * m * std::ldexp(1.0, m) *
         (m * std::sqrt(e * m / tau) *
              std::pow(1.0 + 2.0 * e * m, (m - 1) / 2.0) +
          2.0);
}

// ------------------------------------------------- ReLU constructions

namespace {

struct ReluPlan {
  std::vector<NewtonTerm> terms;
  std::vector<std::vector<SplineUnit>> splines;  // indexed by r = 1..m
  double delta;
  std::uint64_t units_per_freq;
};

ReluPlan relu_plan(const TaskSpec& spec, double tau) {
  spec.validate();
  if (!(tau > 0.0 && tau <= 0.25))
    throw std::invalid_argument("relu_construction: tau must be in (0, 1/4]");
  ReluPlan plan;
  plan.terms = newton_expansion(spec.m);
  plan.delta = tau / lambda_m(spec.m);
  plan.splines.resize(spec.m + 1);
  for (int r = 1; r <= spec.m; ++r) {
    const double need = std::sqrt(r * (r - 1) / (2.0 * plan.delta));
    const int N = std::max(1, static_cast<int>(std::ceil(need)));
    plan.splines[r] = relu_spline_power(r, N);
  }
  plan.units_per_freq = 0;
  for (const auto& t : plan.terms)
    plan.units_per_freq += plan.splines[t.order()].size();
  return plan;
}

}  // namespace

std::uint64_t relu_construction_width(const TaskSpec& spec, double tau) {
  const ReluPlan plan = relu_plan(spec, tau);
  return plan.units_per_freq * static_cast<std::uint64_t>(spec.p);
}

MlpParams relu_construction(const TaskSpec& spec, double tau,
                            std::uint64_t entry_cap) {
  const ReluPlan plan = relu_plan(spec, tau);
  const int p = spec.p, m = spec.m;
  const std::uint64_t d = plan.units_per_freq * static_cast<std::uint64_t>(p);
  if (2 * d * static_cast<std::uint64_t>(p) > entry_cap)
    throw std::runtime_error(
        "relu_construction: required width " + std::to_string(d) +
        " exceeds the memory cap (" + std::to_string(2 * d * p) + " > " +
        std::to_string(entry_cap) + " weight entries)");

  MlpParams theta;
  theta.act = Activation::Relu;
  theta.W = Matrix(d, p);
  theta.V = Matrix(p, d);

  std::vector<int> cw, sw;
  std::vector<double> u(p);
  std::size_t unit = 0;
  for (int nu = 0; nu < p; ++nu) {
    // Frequency-nu cosine/sine embeddings for harmonics j = 1..m.
    std::vector<std::vector<double>> cvec(m + 1, std::vector<double>(p));
    std::vector<std::vector<double>> svec(m + 1, std::vector<double>(p));
    for (int j = 1; j <= m; ++j) {
      for (int t = 0; t < p; ++t) {
        const double ang = kTwoPi * nu * j * t / p;
        cvec[j][t] = std::cos(ang);
        svec[j][t] = std::sin(ang);
      }
    }
    for (const auto& term : plan.terms) {
      const int r = term.order();
      term.linear_weights(cw, sw);
      std::fill(u.begin(), u.end(), 0.0);
      for (int j = 0; j < m; ++j) {
        if (cw[j] != 0)
          for (int t = 0; t < p; ++t) u[t] += cw[j] * cvec[j + 1][t];
        if (sw[j] != 0)
          for (int t = 0; t < p; ++t) u[t] += sw[j] * svec[j + 1][t];
      }
      double scale = term.coeff.to_double();  // coeff * (m r)^r
      for (int i = 0; i < r; ++i) scale *= static_cast<double>(m) * r;
      for (const auto& su : plan.splines[r]) {
        double* wrow = theta.W.row(unit);
        for (int t = 0; t < p; ++t)
          wrow[t] = su.a / (static_cast<double>(m) * r) * u[t] - su.b / m;
        for (int q = 0; q < p; ++q) {
          const double ang = kTwoPi * nu * q / p;
          theta.V.at(q, unit) =
              (term.is_cos ? std::cos(ang) : std::sin(ang)) * scale * su.c;
        }
        ++unit;
      }
    }
  }
  return theta;
}

MlpParams relu_construction_m2(int p) {
  if (p < 2) throw std::invalid_argument("relu_construction_m2: p >= 2");
  const auto spline = relu_spline_power(2, 7);  // 8 units, exact table
  if (spline.size() != 8)
    throw std::logic_error("relu_construction_m2: unexpected spline size");

  const std::size_t d = 36 * static_cast<std::size_t>(p);
  MlpParams theta;
  theta.act = Activation::Relu;
  theta.W = Matrix(d, p);
  theta.V = Matrix(p, d);

  std::size_t unit = 0;
  std::vector<double> c1(p), s1(p), c2(p), s2(p);
  for (int nu = 0; nu < p; ++nu) {
    for (int t = 0; t < p; ++t) {
      c1[t] = std::cos(kTwoPi * nu * t / p);
      s1[t] = std::sin(kTwoPi * nu * t / p);
      c2[t] = std::cos(kTwoPi * (2 * nu) * t / p);
      s2[t] = std::sin(kTwoPi * (2 * nu) * t / p);
    }
    auto vcos = [&](int q) { return std::cos(kTwoPi * nu * q / p); };
    auto vsin = [&](int q) { return std::sin(kTwoPi * nu * q / p); };

    // Four spline groups: arguments C1/2, S1/2, (C1+S1)/4, (C1-S1)/4.
    for (const auto& su : spline) {
      double* w = theta.W.row(unit);
      for (int t = 0; t < p; ++t) w[t] = su.a / 2.0 * c1[t] - su.b / 2.0;
      for (int q = 0; q < p; ++q) theta.V.at(q, unit) = 2.0 * su.c * vcos(q);
      ++unit;
    }
    for (const auto& su : spline) {
      double* w = theta.W.row(unit);
      for (int t = 0; t < p; ++t) w[t] = su.a / 2.0 * s1[t] - su.b / 2.0;
      for (int q = 0; q < p; ++q) theta.V.at(q, unit) = -2.0 * su.c * vcos(q);
      ++unit;
    }
    for (const auto& su : spline) {
      double* w = theta.W.row(unit);
      for (int t = 0; t < p; ++t)
        w[t] = su.a / 4.0 * (c1[t] + s1[t]) - su.b / 2.0;
      for (int q = 0; q < p; ++q) theta.V.at(q, unit) = 4.0 * su.c * vsin(q);
      ++unit;
    }
    for (const auto& su : spline) {
      double* w = theta.W.row(unit);
      for (int t = 0; t < p; ++t)
        w[t] = su.a / 4.0 * (c1[t] - s1[t]) - su.b / 2.0;
      for (int q = 0; q < p; ++q) theta.V.at(q, unit) = -4.0 * su.c * vsin(q);
      ++unit;
    }
    // C2 and S2 pass-through pairs: ReLU(z) - ReLU(-z) = z.
    for (int sign : {+1, -1}) {
      double* w = theta.W.row(unit);
      for (int t = 0; t < p; ++t) w[t] = sign * 0.5 * c2[t];
      for (int q = 0; q < p; ++q) theta.V.at(q, unit) = -sign * vcos(q);
      ++unit;
    }
    for (int sign : {+1, -1}) {
      double* w = theta.W.row(unit);
      for (int t = 0; t < p; ++t) w[t] = sign * 0.5 * s2[t];
      for (int q = 0; q < p; ++q) theta.V.at(q, unit) = -sign * vsin(q);
      ++unit;
    }
  }
  return theta;
}

// --------------------------------------------- trig-sum polynomials

namespace {

TrigPoly poly_zero(int p) {
  TrigPoly poly;
  poly.p = p;
  return poly;
}

TrigPoly poly_one(int p) {
  TrigPoly poly;
  poly.p = p;
  poly.terms[std::vector<std::uint8_t>(2 * p, 0)] = 1;
  return poly;
}

TrigPoly poly_mul_var(const TrigPoly& a, int var) {
  TrigPoly out;
  out.p = a.p;
  for (const auto& [expo, coeff] : a.terms) {
    auto e = expo;
    ++e[var];
    out.terms[std::move(e)] = coeff;
  }
  return out;
}

void poly_add_into(TrigPoly& a, const TrigPoly& b, long long sign) {
  for (const auto& [expo, coeff] : b.terms) {
    auto it = a.terms.find(expo);
    if (it == a.terms.end()) {
      a.terms[expo] = sign * coeff;
    } else {
      it->second += sign * coeff;
      if (it->second == 0) a.terms.erase(it);
    }
  }
}

}  // namespace

int TrigPoly::degree() const {
  int deg = 0;
  for (const auto& [expo, coeff] : terms) {
    int d = 0;
    for (auto e : expo) d += e;
    deg = std::max(deg, d);
  }
  return deg;
}

double TrigPoly::eval(const std::vector<double>& angles) const {
  double total = 0.0;
  for (const auto& [expo, coeff] : terms) {
    double prod = static_cast<double>(coeff);
    for (int v = 0; v < p; ++v) {
      for (int i = 0; i < expo[2 * v]; ++i) prod *= std::cos(angles[v]);
      for (int i = 0; i < expo[2 * v + 1]; ++i) prod *= std::sin(angles[v]);
    }
    total += prod;
  }
  return total;
}

TrigPolyPair trig_sum_polynomialize(const BagVector& x) {
  const int p = static_cast<int>(x.size());
  int m = 0;
  for (int c : x) {
    if (c < 0) throw std::invalid_argument("trig_sum_polynomialize: negative count");
    m += c;
  }
  if (m > 8) throw std::invalid_argument("trig_sum_polynomialize: m must be <= 8");

  // The recursion peels the smallest positive index first, so build up by
  // folding tokens in nonincreasing index order.
  TrigPolyPair pair{poly_zero(p), poly_one(p)};
  for (int v = p - 1; v >= 0; --v) {
    for (int c = 0; c < x[v]; ++c) {
      const TrigPoly sy = pair.sin_poly;
      const TrigPoly cy = pair.cos_poly;
      // S = s_v * C + c_v * S ; C = c_v * C - s_v * S
      TrigPoly s_new = poly_mul_var(cy, 2 * v + 1);
      poly_add_into(s_new, poly_mul_var(sy, 2 * v), +1);
      TrigPoly c_new = poly_mul_var(cy, 2 * v);
      poly_add_into(c_new, poly_mul_var(sy, 2 * v + 1), -1);
      pair.sin_poly = std::move(s_new);
      pair.cos_poly = std::move(c_new);
    }
  }
  return pair;
}

}  // namespace modadd
