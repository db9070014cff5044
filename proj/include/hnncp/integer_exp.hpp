#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hnncp/decision.hpp"

namespace hnncp {

/// gamma * alpha^a = delta * beta^b over a, b >= 0, subject to
/// a*ca + l >= b*cb + m.
struct IntegerExpInstance {
  long long gamma = 1, alpha = 1, delta = 1, beta = 1;
  long long ca = 0, l = 0, cb = 0, m = 0;
};

struct ExponentSolution {
  long long a = 0, b = 0;
};

namespace detail {

inline void factor_into(long long n, std::map<long long, int>& primes) {
  n = std::llabs(n);
  for (long long p = 2; p * p <= n; ++p)
    while (n % p == 0) {
      ++primes[p];
      n /= p;
    }
  if (n > 1) ++primes[n];
}

inline int valuation(long long n, long long p) {
  n = std::llabs(n);
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

inline long long floor_div(long long x, long long y) {
  long long q = x / y;
  if ((x % y != 0) && ((x < 0) != (y < 0))) --q;
  return q;
}
inline long long ceil_div(long long x, long long y) { return -floor_div(-x, y); }

struct Equation {
  long long A, B, C;  // A a - B b = C
};

// Least b >= 0 for fixed a, or nothing.
inline std::optional<long long> best_b(long long a, const std::vector<Equation>& eqs, int sa, int sb, int sg, int sd,
                                       bool constrained, const IntegerExpInstance& in) {
  std::optional<long long> fixed;
  for (const auto& e : eqs) {
    if (e.B == 0) {
      if (e.A * a != e.C) return std::nullopt;
      continue;
    }
    long long num = e.A * a - e.C;
    if (num % e.B != 0) return std::nullopt;
    long long b = num / e.B;
    if (fixed && *fixed != b) return std::nullopt;
    fixed = b;
  }
  // parity of the sign: sg + a*sa == sd + b*sb (mod 2)
  auto parity_ok = [&](long long b) { return ((sg + (a % 2) * sa) % 2) == ((sd + (b % 2) * sb) % 2); };
  auto constraint_ok = [&](long long b) { return !constrained || a * in.ca + in.l >= b * in.cb + in.m; };
  if (fixed) {
    if (*fixed < 0 || !parity_ok(*fixed) || !constraint_ok(*fixed)) return std::nullopt;
    return fixed;
  }
  // b is free: smallest admissible value
  long long lo = 0;
  std::optional<long long> hi;
  if (constrained) {
    long long rhs = a * in.ca + in.l - in.m;  // b*cb <= rhs
    if (in.cb > 0) hi = floor_div(rhs, in.cb);
    else if (in.cb < 0) lo = std::max(lo, ceil_div(rhs, in.cb));
    else if (rhs < 0) return std::nullopt;
  }
  for (long long b = lo; b <= lo + 1; ++b) {
    if (hi && b > *hi) break;
    if (parity_ok(b)) return b;
  }
  return std::nullopt;
}

inline std::optional<ExponentSolution> scan(const IntegerExpInstance& in, bool constrained) {
  std::map<long long, int> primes;
  for (long long v : {in.gamma, in.alpha, in.delta, in.beta}) factor_into(v, primes);
  std::vector<Equation> eqs;
  long long period = 2, cmax = 0;
  for (const auto& [p, unused] : primes) {
    Equation e{valuation(in.alpha, p), valuation(in.beta, p), valuation(in.delta, p) - valuation(in.gamma, p)};
    if (e.A == 0 && e.B == 0) {
      if (e.C != 0) return std::nullopt;
      continue;
    }
    eqs.push_back(e);
    if (e.B != 0) period = std::min<long long>(period * e.B, 1LL << 20);
    cmax = std::max(cmax, std::llabs(e.C));
  }
  int sa = in.alpha < 0, sb = in.beta < 0, sg = in.gamma < 0, sd = in.delta < 0;
  long long k = constrained ? std::llabs(in.m - in.l) : 0;
  long long ca = constrained ? std::max(1LL, std::llabs(in.ca)) : 1;
  long long cb = constrained ? std::max(1LL, std::llabs(in.cb)) : 1;
  // Past the point where the sign of every bound is settled, feasibility in
  // a is periodic, so one more period decides.
  long long limit = std::min<long long>((k + cmax + 4) * (2 * period * ca * cb + 1), 10'000'000);
  for (long long a = 0; a <= limit; ++a)
    if (auto b = best_b(a, eqs, sa, sb, sg, sd, constrained, in)) return ExponentSolution{a, *b};
  return std::nullopt;
}

}  // namespace detail

/// Exact: lexicographically least (a, b), or No with a prime-support or
/// constraint certificate.
inline Decision<ExponentSolution> integer_exp_solve(const IntegerExpInstance& in) {
  if (in.gamma == 0 || in.alpha == 0 || in.delta == 0 || in.beta == 0)
    throw std::invalid_argument("integer_exp_solve: zero coefficient or base");
  if (auto s = detail::scan(in, true)) return Decision<ExponentSolution>::yes(*s, "integer-exponent");
  if (detail::scan(in, false)) return Decision<ExponentSolution>::no(NoReason::IntegerConstraint, "integer-exponent");
  return Decision<ExponentSolution>::no(NoReason::PrimeSupport, "integer-exponent");
}

}  // namespace hnncp
