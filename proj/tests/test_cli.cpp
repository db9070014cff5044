#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "hnncp/cli.hpp"

using namespace hnncp;

namespace {

InputErrorCode code_of(const std::string& text) {
  try {
    parse_presentation(text);
  } catch (const InputError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return InputErrorCode::Internal;
}

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hnncp");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = hnncp::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / ("hnncp_test_" + name);
  std::ofstream(p) << body;
  return p.string();
}

}  // namespace

TEST(Parse, Fixtures) {
  auto bs = parse_presentation("# BS(1,2)\nrank 1\na -> aa\n");
  EXPECT_EQ(bs.rank(), 1);
  EXPECT_EQ(bs.phi().image(1), parse_word("aa"));
  auto ds = parse_presentation("rank 2\n\na -> b   # comment\nb -> aa\n");
  EXPECT_EQ(ds.phi().image(1), parse_word("b"));
  EXPECT_EQ(ds.phi().image(2), parse_word("aa"));
  auto id = parse_endomorphism("rank 2\na -> 1\nb -> b\n");
  EXPECT_TRUE(id.image(1).empty());
  EXPECT_EQ(parse_endomorphism(format_endomorphism(ds.phi())).image(2), ds.phi().image(2));
}

TEST(Parse, ErrorCodes) {
  EXPECT_EQ(code_of("rank 2\na -> a\nb -> a\n"), InputErrorCode::NonInjective);
  EXPECT_EQ(code_of("rank 2\na -> a\na -> b\nb -> b\n"), InputErrorCode::DuplicateGenerator);
  EXPECT_EQ(code_of("rank 2\na -> c\nb -> b\n"), InputErrorCode::UnknownLetter);
  EXPECT_EQ(code_of("rank 2\na -> ab\n"), InputErrorCode::MissingGenerator);
  EXPECT_EQ(code_of("rank two\na -> a\n"), InputErrorCode::Syntax);
  EXPECT_EQ(code_of("a -> a\n"), InputErrorCode::Syntax);
  EXPECT_EQ(code_of("rank 1\na = a\n"), InputErrorCode::Syntax);
  try {
    parse_endomorphism("rank 1\n\nb -> a\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Json, RoundTrip) {
  Endomorphism ds(2, {parse_word("b"), parse_word("aa")});
  HnnPresentation P(ds);
  Bounds b;
  b.max_k = 7;
  std::vector<RunResult> rs;
  rs.push_back(make_result("conj", Json{{"g", "a"}}, conj(parse_hnn_word("a", 2), parse_hnn_word("b", 2), P), b));
  rs.push_back(make_result("conj", Json{{"g", "a"}}, conj(parse_hnn_word("a", 2), parse_hnn_word("t", 2), P), Bounds{}));
  rs.push_back(make_result("brinkmann", Json::object(), two_exp_injective(ds, parse_word("a"), parse_word("aaa")), b));
  rs.push_back(make_result("dynamics", Json::object(), stable_iterate_search(ds, 4), b));
  for (const auto& r : rs) {
    Json j = to_json(r);
    EXPECT_EQ(result_from_json(j), r);
    EXPECT_EQ(result_from_json(Json::parse(j.dump())), r);
    for (const char* key : {"command", "query", "decision", "reason", "witness", "pair", "trace", "bounds", "bound", "detail"})
      EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(to_json(rs[0])["pair"].size(), 2u);
  EXPECT_TRUE(to_json(rs[1])["pair"].is_null());
}

TEST(Json, ExitCodesAreDistinct) {
  EXPECT_EQ(exit_code(Verdict::Yes), 0);
  EXPECT_EQ(exit_code(Verdict::No), 1);
  EXPECT_EQ(exit_code(Verdict::Inconclusive), 2);
  std::set<int> codes{0, 1, 2};
  for (auto c : {InputErrorCode::Usage, InputErrorCode::Io, InputErrorCode::Syntax, InputErrorCode::DuplicateGenerator,
                 InputErrorCode::UnknownLetter, InputErrorCode::MissingGenerator, InputErrorCode::NonInjective,
                 InputErrorCode::Internal})
    EXPECT_TRUE(codes.insert(static_cast<int>(c)).second);
}

TEST(Cli, Conj) {
  auto ds = temp_file("ds.txt", "rank 2\na -> b\nb -> aa\n");
  auto r = run_cli({"conj", "--presentation", ds, "--g", "a", "--h", "b"});
  EXPECT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["decision"], "yes");
  auto bs = temp_file("bs.txt", "rank 1\na -> aa\n");
  r = run_cli({"conj", "--presentation", bs, "--g", "a", "--h", "aaa", "--format", "text"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("reason: prime-support"), std::string::npos);
  r = run_cli({"conj", "--presentation", bs, "--g", "a", "--h", "t"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(Json::parse(r.out)["reason"], "retraction-exponent");
}

TEST(Cli, Errors) {
  auto bad = temp_file("bad.txt", "rank 2\na -> a\nb -> a\n");
  EXPECT_EQ(run_cli({"conj", "--presentation", bad, "--g", "a", "--h", "b"}).code, 9);
  EXPECT_EQ(run_cli({"conj", "--presentation", "/nonexistent/x", "--g", "a", "--h", "b"}).code, 4);
  auto ds = temp_file("ds.txt", "rank 2\na -> b\nb -> aa\n");
  EXPECT_EQ(run_cli({"conj", "--presentation", ds, "--g", "a", "--h", "c"}).code, 7);
  EXPECT_EQ(run_cli({"conj", "--presentation", ds}).code, 3);
  EXPECT_EQ(run_cli({"bogus"}).code, 3);
  EXPECT_EQ(run_cli({"conj", "--presentation", ds, "--g", "a", "--h", "b", "--orbit-bound", "-1"}).code, 3);
}

TEST(Cli, OtherCommands) {
  auto ds = temp_file("ds.txt", "rank 2\na -> b\nb -> aa\n");
  auto r = run_cli({"brinkmann", "--mode", "pair", "--endo", ds, "--u", "a", "--v", "b"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["pair"], Json::array({1, 0}));
  for (const char* m : {"single", "twisted", "equal"})
    EXPECT_LE(run_cli({"brinkmann", "--mode", m, "--endo", ds, "--u", "a", "--v", "b"}).code, 2) << m;
  r = run_cli({"twisted", "--endo", ds, "--u", "a", "--v", "a"});
  EXPECT_EQ(r.code, 0) << r.err;
  auto dir = (std::filesystem::temp_directory_path() / "hnncp_test_dots").string();
  r = run_cli({"dynamics", "--endo", ds, "--dot-dir", dir});
  EXPECT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_FALSE(j["stages"].empty());
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(dir) / "stage_1.dot"));
  r = run_cli({"fold", "--rank", "2", "--gens", "ab,b", "--word", "a"});
  EXPECT_EQ(r.code, 0) << r.err;
  r = run_cli({"fold", "--rank", "2", "--gens", "aa,b", "--word", "a"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(Json::parse(r.out)["reason"], "not-in-subgroup");
  r = run_cli({"dot", "--rank", "2", "--gens", "aa,b"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("digraph"), std::string::npos);
}
