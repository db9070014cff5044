#pragma once

// JSON encoding of decisions. Needs nlohmann/json (vendor/json.hpp).

#include <string>
#include <vector>

#include "hnncp/brinkmann.hpp"
#include "hnncp/hnn.hpp"
#include "json.hpp"

namespace hnncp {

using Json = nlohmann::json;

inline Json bounds_to_json(const Bounds& b) {
  Json j{{"orbit", b.orbit}, {"conjugator", b.conjugator}, {"image", b.image}, {"max_word_length", b.max_word_length}};
  j["max_k"] = b.max_k ? Json(*b.max_k) : Json(nullptr);
  return j;
}

inline Bounds bounds_from_json(const Json& j) {
  Bounds b;
  b.orbit = j.at("orbit").get<int>();
  b.conjugator = j.at("conjugator").get<int>();
  b.image = j.at("image").get<int>();
  b.max_word_length = j.at("max_word_length").get<int>();
  if (!j.at("max_k").is_null()) b.max_k = j.at("max_k").get<int>();
  return b;
}

inline Json witness_json(const ExponentPair& w) {
  return {{"p", w.p}, {"q", w.q}, {"x", to_string(w.x)}, {"swapped", w.swapped}};
}
inline Json witness_json(const TwistedPair& w) { return {{"p", w.p}, {"q", w.q}, {"x", to_string(w.x)}}; }
inline Json witness_json(const LiftWitness& w) { return {{"p", w.p}, {"k", to_string(w.k)}, {"x", to_string(w.x)}}; }
inline Json witness_json(const Word& w) { return {{"x", to_string(w)}}; }
inline Json element_json(const HnnElement& e) { return {{"i", e.i}, {"x", to_string(e.x)}, {"j", e.j}}; }
inline Json witness_json(const ConjugacyWitness& w) {
  return {{"p", w.p},
          {"q", w.q},
          {"x", to_string(w.x)},
          {"assembled", to_string(w.assembled)},
          {"conjugator", element_json(w.conjugator)}};
}
inline Json witness_json(const StableIterate& s) {
  Json comps = Json::array();
  for (const auto& c : s.components)
    comps.push_back({{"c", to_string(c.c)}, {"t", c.t}, {"d", c.d}, {"root", to_string(c.root)}, {"ell", c.ell}});
  return {{"k", s.k}, {"components", comps}};
}

/// Schema-stable result record: {command, query, decision, reason, witness,
/// pair, trace, bounds, bound, detail}.
struct RunResult {
  std::string command;
  Json query = Json::object();
  Verdict verdict = Verdict::Inconclusive;
  NoReason reason = NoReason::None;
  Json witness;  // null when absent
  std::vector<std::string> trace;
  Bounds bounds;
  long long bound = 0;
  std::string detail;

  friend bool operator==(const RunResult& a, const RunResult& b) {
    return a.command == b.command && a.query == b.query && a.verdict == b.verdict && a.reason == b.reason &&
           a.witness == b.witness && a.trace == b.trace && bounds_to_json(a.bounds) == bounds_to_json(b.bounds) &&
           a.bound == b.bound && a.detail == b.detail;
  }
};

template <class W>
RunResult make_result(std::string command, Json query, const Decision<W>& d, const Bounds& b) {
  RunResult r;
  r.command = std::move(command);
  r.query = std::move(query);
  r.verdict = d.verdict;
  r.reason = d.reason;
  if (d.witness) r.witness = witness_json(*d.witness);
  r.trace = d.trace;
  r.bounds = b;
  r.bound = d.bound;
  r.detail = d.detail;
  return r;
}

inline Json to_json(const RunResult& r) {
  Json j{{"command", r.command},
         {"query", r.query},
         {"decision", to_string(r.verdict)},
         {"reason", to_string(r.reason)},
         {"witness", r.witness},
         {"trace", r.trace},
         {"bounds", bounds_to_json(r.bounds)},
         {"bound", r.bound},
         {"detail", r.detail}};
  if (r.witness.is_object() && r.witness.contains("p") && r.witness.contains("q"))
    j["pair"] = Json::array({r.witness["p"], r.witness["q"]});
  else
    j["pair"] = nullptr;
  return j;
}

inline RunResult result_from_json(const Json& j) {
  RunResult r;
  r.command = j.at("command").get<std::string>();
  r.query = j.at("query");
  auto v = verdict_from_string(j.at("decision").get<std::string>());
  auto n = no_reason_from_string(j.at("reason").get<std::string>());
  if (!v || !n) throw std::invalid_argument("unknown decision or reason in JSON result");
  r.verdict = *v;
  r.reason = *n;
  r.witness = j.at("witness");
  r.trace = j.at("trace").get<std::vector<std::string>>();
  r.bounds = bounds_from_json(j.at("bounds"));
  r.bound = j.at("bound").get<long long>();
  r.detail = j.at("detail").get<std::string>();
  return r;
}

/// 0 yes, 1 no, 2 inconclusive.
inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Yes: return 0;
    case Verdict::No: return 1;
    case Verdict::Inconclusive: return 2;
  }
  return 2;
}

}  // namespace hnncp
