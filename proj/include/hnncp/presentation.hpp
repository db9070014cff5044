#pragma once

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hnncp/hnn.hpp"

namespace hnncp {

/// Input problems, each with its own process exit code (all >= 3).
enum class InputErrorCode {
  Usage = 3,
  Io = 4,
  Syntax = 5,
  DuplicateGenerator = 6,
  UnknownLetter = 7,
  MissingGenerator = 8,
  NonInjective = 9,
  Internal = 10,
};

inline const char* to_string(InputErrorCode c) {
  switch (c) {
    case InputErrorCode::Usage: return "usage";
    case InputErrorCode::Io: return "io";
    case InputErrorCode::Syntax: return "syntax";
    case InputErrorCode::DuplicateGenerator: return "duplicate-generator";
    case InputErrorCode::UnknownLetter: return "unknown-letter";
    case InputErrorCode::MissingGenerator: return "missing-generator";
    case InputErrorCode::NonInjective: return "non-injective";
    case InputErrorCode::Internal: return "internal";
  }
  return "?";
}

class InputError : public std::runtime_error {
 public:
  InputError(InputErrorCode code, const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), code_(code), line_(line) {}
  InputErrorCode code() const noexcept { return code_; }
  int line() const noexcept { return line_; }

 private:
  InputErrorCode code_;
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline Word parse_checked(std::string_view text, int rank, int line) {
  try {
    return parse_word(text, rank);
  } catch (const WordError& e) {
    throw InputError(InputErrorCode::UnknownLetter, e.what(), line);
  }
}

}  // namespace detail

/// "rank N" then one "GEN -> WORD" line per generator. Blank lines and
/// text after '#' are ignored.
inline Endomorphism parse_endomorphism(std::string_view text) {
  std::optional<int> rank;
  std::vector<std::optional<Word>> images;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (!rank) {
      if (line.substr(0, 4) != "rank") throw InputError(InputErrorCode::Syntax, "expected 'rank N'", line_no);
      auto num = detail::trim(line.substr(4));
      int r = 0;
      std::size_t used = 0;
      try {
        r = std::stoi(std::string(num), &used);
      } catch (const std::exception&) {
        throw InputError(InputErrorCode::Syntax, "rank is not an integer", line_no);
      }
      if (used != num.size() || r < 1 || r > kMaxNamedRank)
        throw InputError(InputErrorCode::Syntax, "rank must be an integer in 1.." + std::to_string(kMaxNamedRank), line_no);
      rank = r;
      images.assign(r, std::nullopt);
      continue;
    }
    auto arrow = line.find("->");
    if (arrow == std::string_view::npos) throw InputError(InputErrorCode::Syntax, "expected 'GEN -> WORD'", line_no);
    auto lhs = detail::trim(line.substr(0, arrow));
    auto rhs = detail::trim(line.substr(arrow + 2));
    if (lhs.size() != 1) throw InputError(InputErrorCode::Syntax, "left side must be one generator", line_no);
    Letter g = 0;
    try {
      g = parse_generator(lhs[0]);
    } catch (const WordError& e) {
      throw InputError(InputErrorCode::UnknownLetter, e.what(), line_no);
    }
    if (g > *rank) throw InputError(InputErrorCode::UnknownLetter, "generator outside the declared rank", line_no);
    if (images[g - 1]) throw InputError(InputErrorCode::DuplicateGenerator, "generator defined twice", line_no);
    images[g - 1] = detail::parse_checked(rhs, *rank, line_no);
  }
  if (!rank) throw InputError(InputErrorCode::Syntax, "missing 'rank N' line");
  Substitution img;
  for (int i = 0; i < *rank; ++i) {
    if (!images[i]) throw InputError(InputErrorCode::MissingGenerator, std::string("no image for generator ") + letter_name(i + 1));
    img.push_back(*images[i]);
  }
  return Endomorphism(*rank, std::move(img));
}

/// Same format; the map must be injective.
inline HnnPresentation parse_presentation(std::string_view text) {
  Endomorphism phi = parse_endomorphism(text);
  if (!phi.is_injective()) throw InputError(InputErrorCode::NonInjective, "endomorphism is not injective");
  return HnnPresentation(std::move(phi));
}

inline std::string format_endomorphism(const Endomorphism& phi) {
  std::string s = "rank " + std::to_string(phi.rank()) + "\n";
  for (int i = 1; i <= phi.rank(); ++i) {
    s += letter_name(i);
    s += " -> ";
    s += phi.image(i).empty() ? "1" : to_string(phi.image(i));
    s += "\n";
  }
  return s;
}

}  // namespace hnncp
