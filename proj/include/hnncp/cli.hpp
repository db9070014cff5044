#pragma once

// Command-line front end. Needs CLI11 and nlohmann/json from vendor/.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hnncp/brinkmann.hpp"
#include "hnncp/dynamics.hpp"
#include "hnncp/hnn.hpp"
#include "hnncp/json_result.hpp"
#include "hnncp/presentation.hpp"
#include "hnncp/twisted.hpp"

namespace hnncp::cli {

/// Bounds plus output choices.
struct RunConfig {
  Bounds bounds;
  std::string format = "json";  // json | text
  std::string dot_dir;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(InputErrorCode::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Word word_arg(const std::string& text, int rank) {
  try {
    return parse_word(text, rank);
  } catch (const WordError& e) {
    throw InputError(InputErrorCode::UnknownLetter, e.what());
  }
}

inline HnnWord hnn_arg(const std::string& text, int rank) {
  try {
    return parse_hnn_word(text, rank);
  } catch (const WordError& e) {
    throw InputError(InputErrorCode::UnknownLetter, e.what());
  }
}

inline std::vector<Word> gens_arg(const std::string& text, int rank) {
  std::vector<Word> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(word_arg(item, rank));
  return out;
}

inline std::string indices(const Word& w) {
  std::string s;
  for (Letter x : w) {
    if (!s.empty()) s += ' ';
    s += std::to_string(x);
  }
  return s;
}

inline void emit(const RunResult& r, const RunConfig& cfg, std::ostream& out) {
  if (cfg.format == "json") {
    out << to_json(r).dump(2) << "\n";
    return;
  }
  out << "decision: " << to_string(r.verdict) << "\n";
  if (r.verdict == Verdict::No) out << "reason: " << to_string(r.reason) << "\n";
  if (!r.witness.is_null()) out << "witness: " << r.witness.dump() << "\n";
  if (!r.detail.empty()) out << "detail: " << r.detail << "\n";
  out << "trace:";
  for (const auto& t : r.trace) out << " " << t;
  out << "\n";
}

}  // namespace detail

/// Parses argv and dispatches. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conjugacy in ascending HNN extensions of free groups"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::optional<int> orbit, conjugator, image, max_k, max_len;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--orbit-bound", orbit, "iterates tried per conjugacy class");
    sub->add_option("--conjugator-bound", conjugator, "length of searched twisted conjugators");
    sub->add_option("--image-bound", image, "depth of image-power probes");
    sub->add_option("--max-k", max_k, "last pullback stage searched");
    sub->add_option("--max-word-length", max_len, "abandon iterates longer than this");
  };

  std::string pres_file, endo_file, g_text, h_text, u_text, v_text, mode = "pair", gens_text, word_text, out_file;
  int n = 0, stages = 0, rank = 0;
  std::optional<int> twisted_n;
  bool unbased = false;

  auto* conj_cmd = app.add_subcommand("conj", "conjugacy of two elements of the HNN extension");
  conj_cmd->set_help_flag("--help", "print this help");  // frees -h for --h
  conj_cmd->add_option("--presentation", pres_file, "presentation file")->required();
  conj_cmd->add_option("--g", g_text, "first element (base letters, t, T)")->required();
  conj_cmd->add_option("--h", h_text, "second element")->required();
  add_common(conj_cmd);

  auto* tw_cmd = app.add_subcommand("twisted", "twisted conjugacy u = x^-1 v phi(x)");
  tw_cmd->add_option("--endo", endo_file, "endomorphism file")->required();
  tw_cmd->add_option("--u", u_text)->required();
  tw_cmd->add_option("--v", v_text)->required();
  tw_cmd->add_option("--n", twisted_n, "search exponent pairs under phi^n instead");
  tw_cmd->add_option("--bound", conjugator, "length of searched conjugators");
  add_common(tw_cmd);

  auto* br_cmd = app.add_subcommand("brinkmann", "exponent problems phi^p(u) ~ phi^q(v) and relatives");
  br_cmd->add_option("--mode", mode)->check(CLI::IsMember({"single", "pair", "twisted", "equal"}));
  br_cmd->add_option("--endo", endo_file, "endomorphism file")->required();
  br_cmd->add_option("--u", u_text)->required();
  br_cmd->add_option("--v", v_text)->required();
  br_cmd->add_option("--n", n, "twist exponent for --mode twisted")->check(CLI::NonNegativeNumber);
  add_common(br_cmd);

  auto* dyn_cmd = app.add_subcommand("dynamics", "iterated pullbacks and the stable iterate");
  dyn_cmd->add_option("--endo", endo_file, "endomorphism file")->required();
  dyn_cmd->add_option("--stages", stages, "stages to report (default: up to the stable iterate)");
  dyn_cmd->add_option("--dot-dir", cfg.dot_dir, "write one DOT file per stage here");
  add_common(dyn_cmd);

  auto* fold_cmd = app.add_subcommand("fold", "fold a subgroup; optionally test membership");
  fold_cmd->add_option("--rank", rank, "rank of the free group")->required()->check(CLI::Range(1, kMaxNamedRank));
  fold_cmd->add_option("--gens", gens_text, "comma-separated generators")->required();
  fold_cmd->add_option("--word", word_text, "word to test");
  fold_cmd->add_flag("--unbased", unbased, "core of the conjugacy class instead");
  add_common(fold_cmd);

  auto* dot_cmd = app.add_subcommand("dot", "DOT drawing of a folded subgroup");
  dot_cmd->add_option("--rank", rank, "rank of the free group")->required()->check(CLI::Range(1, kMaxNamedRank));
  dot_cmd->add_option("--gens", gens_text, "comma-separated generators")->required();
  dot_cmd->add_option("--out", out_file, "output file (default stdout)");
  dot_cmd->add_flag("--unbased", unbased, "core of the conjugacy class instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(InputErrorCode::Usage);
  }

  try {
    Bounds b = Bounds::from_env();
    if (orbit) b.orbit = *orbit;
    if (conjugator) b.conjugator = *conjugator;
    if (image) b.image = *image;
    if (max_k) b.max_k = *max_k;
    if (max_len) b.max_word_length = *max_len;
    try {
      b.validate();
    } catch (const std::invalid_argument& e) {
      throw InputError(InputErrorCode::Usage, e.what());
    }
    cfg.bounds = b;

    if (*conj_cmd) {
      auto P = parse_presentation(detail::read_file(pres_file));
      auto g = detail::hnn_arg(g_text, P.rank()), h = detail::hnn_arg(h_text, P.rank());
      auto d = conj(g, h, P, {}, b);
      Json q{{"presentation", format_endomorphism(P.phi())}, {"g", g_text}, {"h", h_text}};
      auto r = make_result("conj", q, d, b);
      detail::emit(r, cfg, out);
      return exit_code(r.verdict);
    }
    if (*tw_cmd) {
      auto phi = parse_endomorphism(detail::read_file(endo_file));
      Word u = detail::word_arg(u_text, phi.rank()), v = detail::word_arg(v_text, phi.rank());
      Json q{{"endo", format_endomorphism(phi)}, {"u", u_text}, {"v", v_text}};
      RunResult r;
      if (twisted_n) {
        if (*twisted_n < 1) throw InputError(InputErrorCode::Usage, "--n must be at least 1");
        q["n"] = *twisted_n;
        r = make_result("twisted", q, phi_n_twisted_pairs(phi, *twisted_n, u, v, nullptr, b.conjugator), b);
      } else {
        r = make_result("twisted", q, twisted_conjugate({phi, u, v}, nullptr, b.conjugator), b);
      }
      detail::emit(r, cfg, out);
      return exit_code(r.verdict);
    }
    if (*br_cmd) {
      auto phi = parse_endomorphism(detail::read_file(endo_file));
      Word u = detail::word_arg(u_text, phi.rank()), v = detail::word_arg(v_text, phi.rank());
      Json q{{"endo", format_endomorphism(phi)}, {"u", u_text}, {"v", v_text}, {"mode", mode}};
      RunResult r;
      if (mode == "single") r = make_result("brinkmann", q, retract_lift_conj(phi, u, v, {}, b), b);
      else if (mode == "pair") r = make_result("brinkmann", q, two_exp_general(phi, u, v, {}, b), b);
      else if (mode == "equal") r = make_result("brinkmann", q, equality_search(phi, u, v, {}, b), b);
      else {
        q["n"] = n;
        r = make_result("brinkmann", q, twisted_pair_general(phi, n, u, v, {}, b), b);
      }
      detail::emit(r, cfg, out);
      return exit_code(r.verdict);
    }
    if (*dyn_cmd) {
      auto phi = parse_endomorphism(detail::read_file(endo_file));
      if (!phi.is_injective()) throw InputError(InputErrorCode::NonInjective, "dynamics needs an injective endomorphism");
      if (phi.is_surjective()) throw InputError(InputErrorCode::Usage, "dynamics needs a non-surjective endomorphism");
      Dynamics dyn(phi, b);
      auto d = stable_iterate_search(dyn, b.max_k_for(phi.rank()));
      int last = stages > 0 ? stages : (d.is_yes() ? d.witness->k : std::max(1, k0(phi.rank())));
      Json report = Json::array();
      std::ostringstream text;
      for (int i = 1; i <= last; ++i) {
        const PullbackStage* st = nullptr;
        try {
          st = &dyn.stage(i);
        } catch (const LengthBoundExceeded&) {
          break;
        }
        Json reps = Json::array();
        for (const auto& rep : st->representatives) reps.push_back(rep ? Json(to_string(*rep)) : Json(nullptr));
        report.push_back({{"stage", i},
                          {"lambda_components", st->lambda.size()},
                          {"hat_components", st->hat_lambda.size()},
                          {"representatives", reps}});
        text << "stage " << i << ": lambda " << st->lambda.size() << ", hat " << st->hat_lambda.size();
        for (const auto& rep : st->representatives) text << " [" << (rep ? to_string(*rep) : std::string("?")) << "]";
        text << "\n";
        if (!cfg.dot_dir.empty()) {
          std::filesystem::create_directories(cfg.dot_dir);
          std::ofstream f(std::filesystem::path(cfg.dot_dir) / ("stage_" + std::to_string(i) + ".dot"));
          if (!f) throw InputError(InputErrorCode::Io, "cannot write into " + cfg.dot_dir);
          f << "digraph stage_" << i << " {\n";
          for (std::size_t c = 0; c < st->hat_lambda.size(); ++c) {
            std::string body = to_dot(st->hat_lambda[c], "c" + std::to_string(c));
            auto open = body.find('{'), close = body.rfind('}');
            f << "  subgraph cluster_" << c << " {\n" << body.substr(open + 1, close - open - 1) << "  }\n";
          }
          f << "}\n";
        }
      }
      Json q{{"endo", format_endomorphism(phi)}};
      auto r = make_result("dynamics", q, d, b);
      if (cfg.format == "json") {
        Json j = to_json(r);
        j["stages"] = report;
        out << j.dump(2) << "\n";
      } else {
        out << text.str();
        detail::emit(r, cfg, out);
      }
      return exit_code(r.verdict);
    }
    if (*fold_cmd) {
      auto gens = detail::gens_arg(gens_text, rank);
      auto g = CoreGraph::fold(gens, rank, !unbased);
      Json q{{"rank", rank}, {"gens", gens_text}, {"unbased", unbased}};
      Json info{{"vertices", g.vertex_count()}, {"edges", g.edge_count()}, {"subgroup_rank", g.rank()}};
      Decision<Json> d = Decision<Json>::yes(info, "fold");
      if (!word_text.empty()) {
        Word w = detail::word_arg(word_text, rank);
        q["word"] = word_text;
        if (unbased) {
          auto x = conjugate_into(w, g);
          if (x) info["conjugator"] = to_string(*x);
          d = x ? Decision<Json>::yes(info, "conjugate-into") : Decision<Json>::no(NoReason::NotInSubgroup, "conjugate-into");
        } else {
          auto m = membership(w, g);
          if (m) info["generator_word"] = detail::indices(*m);
          d = m ? Decision<Json>::yes(info, "membership") : Decision<Json>::no(NoReason::NotInSubgroup, "membership");
        }
      }
      RunResult r;
      r.command = "fold";
      r.query = q;
      r.verdict = d.verdict;
      r.reason = d.reason;
      r.witness = d.witness ? *d.witness : Json(nullptr);
      r.trace = d.trace;
      r.bounds = b;
      detail::emit(r, cfg, out);
      return exit_code(r.verdict);
    }
    if (*dot_cmd) {
      auto g = CoreGraph::fold(detail::gens_arg(gens_text, rank), rank, !unbased);
      if (out_file.empty()) {
        write_dot(out, g);
      } else {
        std::ofstream f(out_file);
        if (!f) throw InputError(InputErrorCode::Io, "cannot write " + out_file);
        write_dot(f, g);
      }
      return 0;
    }
  } catch (const InputError& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::invalid_argument& e) {
    err << "error (usage): " << e.what() << "\n";
    return static_cast<int>(InputErrorCode::Usage);
  } catch (const std::exception& e) {
    err << "error (internal): " << e.what() << "\n";
    return static_cast<int>(InputErrorCode::Internal);
  }
  return static_cast<int>(InputErrorCode::Usage);
}

}  // namespace hnncp::cli
