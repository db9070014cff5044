#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hnncp {

enum class Verdict { Yes, No, Inconclusive };

/// Analytic reason attached to every No.
enum class NoReason {
  None,
  RetractionExponent,  // stable-letter exponents differ
  PrimeSupport,        // integer equation impossible by prime valuations
  IntegerConstraint,   // integer solutions exist but violate the index constraint
  OrbitPeriodic,       // conjugacy-class orbit is periodic and misses the target
  ExactOracle,         // an exact oracle excluded every candidate
  NotCarried,          // no iterate is carried by the stable system
  EmptyStableIterate,  // the stable system is empty
  AllSubcallsNo,       // every branch of a finite case split said No
  RankOne,             // closed-form answer in rank one
  Trivial,             // identity versus non-identity and similar
  NotInSubgroup,       // folded graph rejects the word
};

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

inline const char* to_string(NoReason r) {
  switch (r) {
    case NoReason::None: return "none";
    case NoReason::RetractionExponent: return "retraction-exponent";
    case NoReason::PrimeSupport: return "prime-support";
    case NoReason::IntegerConstraint: return "integer-constraint";
    case NoReason::OrbitPeriodic: return "orbit-periodic";
    case NoReason::ExactOracle: return "exact-oracle";
    case NoReason::NotCarried: return "not-carried";
    case NoReason::EmptyStableIterate: return "empty-stable-iterate";
    case NoReason::AllSubcallsNo: return "all-subcalls-no";
    case NoReason::RankOne: return "rank-one";
    case NoReason::Trivial: return "trivial";
    case NoReason::NotInSubgroup: return "not-in-subgroup";
  }
  return "?";
}

inline std::optional<NoReason> no_reason_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(NoReason::NotInSubgroup); ++i)
    if (s == to_string(static_cast<NoReason>(i))) return static_cast<NoReason>(i);
  return std::nullopt;
}

inline std::optional<Verdict> verdict_from_string(const std::string& s) {
  for (auto v : {Verdict::Yes, Verdict::No, Verdict::Inconclusive})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

/// Three-valued answer. Yes carries a witness; No carries a reason; the trace
/// lists the pipeline steps that fired.
template <class W>
struct Decision {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<W> witness;
  NoReason reason = NoReason::None;
  long long bound = 0;
  std::string detail;
  std::vector<std::string> trace;

  static Decision yes(W w, std::string step = {}) {
    Decision d;
    d.verdict = Verdict::Yes;
    d.witness = std::move(w);
    if (!step.empty()) d.trace.push_back(std::move(step));
    return d;
  }
  static Decision no(NoReason r, std::string step = {}, std::string detail = {}) {
    Decision d;
    d.verdict = Verdict::No;
    d.reason = r;
    d.detail = std::move(detail);
    if (!step.empty()) d.trace.push_back(std::move(step));
    return d;
  }
  static Decision inconclusive(long long bound, std::string detail, std::string step = {}) {
    Decision d;
    d.bound = bound;
    d.detail = std::move(detail);
    if (!step.empty()) d.trace.push_back(std::move(step));
    return d;
  }

  bool is_yes() const noexcept { return verdict == Verdict::Yes; }
  bool is_no() const noexcept { return verdict == Verdict::No; }
  bool is_inconclusive() const noexcept { return verdict == Verdict::Inconclusive; }

  Decision& step(std::string s) {
    trace.insert(trace.begin(), std::move(s));
    return *this;
  }

  /// Same verdict and trace with a transformed witness.
  template <class F>
  auto map(F&& f) const -> Decision<decltype(f(std::declval<const W&>()))> {
    Decision<decltype(f(std::declval<const W&>()))> out;
    out.verdict = verdict;
    out.reason = reason;
    out.bound = bound;
    out.detail = detail;
    out.trace = trace;
    if (witness) out.witness = f(*witness);
    return out;
  }
};

}  // namespace hnncp
