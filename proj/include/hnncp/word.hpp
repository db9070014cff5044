#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hnncp {

// A letter is a nonzero signed generator index; -x is the inverse of x.
using Letter = int;

inline constexpr Letter inverse(Letter x) noexcept { return -x; }

// Generator names skip 't', which is reserved for the stable letter of an
// HNN-extension: a=1, b=2, ..., s=19, u=20, ..., z=25.
inline constexpr std::string_view kGeneratorNames = "abcdefghijklmnopqrsuvwxyz";
inline constexpr int kMaxNamedRank = static_cast<int>(kGeneratorNames.size());

class WordError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Alphabet {
  int rank = 1;

  explicit Alphabet(int r) : rank(r) {
    if (r < 1) throw WordError("alphabet rank must be at least 1");
  }
  bool contains(Letter x) const noexcept { return x != 0 && x >= -rank && x <= rank; }
};

/// Freely reduced word. Every constructor reduces, so a Word never holds an
/// adjacent letter/inverse pair.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Letter> letters) : Word(std::vector<Letter>(letters)) {}
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) { reduce_in_place(); }

  static Word letter(Letter x) {
    Word w;
    w.letters_.push_back(x);
    return w;
  }

  const std::vector<Letter>& letters() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }
  auto begin() const noexcept { return letters_.begin(); }
  auto end() const noexcept { return letters_.end(); }

  Word inverse() const {
    Word w;
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(-*it);
    return w;
  }

  Word& operator*=(const Word& rhs) {
    letters_.reserve(letters_.size() + rhs.size());
    for (Letter x : rhs.letters_) push(x);
    return *this;
  }

  // Appends one letter, cancelling against the last letter if needed.
  void push(Letter x) {
    if (!letters_.empty() && letters_.back() == -x)
      letters_.pop_back();
    else
      letters_.push_back(x);
  }

  Word subword(std::size_t pos, std::size_t len) const {
    Word w;
    w.letters_.assign(letters_.begin() + pos, letters_.begin() + pos + len);
    return w;
  }

  int max_generator() const noexcept {
    int m = 0;
    for (Letter x : letters_) m = std::max(m, x < 0 ? -x : x);
    return m;
  }

  friend Word operator*(Word lhs, const Word& rhs) { return lhs *= rhs; }
  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& a, const Word& b) { return a.letters_ <=> b.letters_; }

 private:
  void reduce_in_place() {
    std::vector<Letter> out;
    out.reserve(letters_.size());
    for (Letter x : letters_) {
      if (x == 0) throw WordError("letter 0 is not a generator");
      if (!out.empty() && out.back() == -x)
        out.pop_back();
      else
        out.push_back(x);
    }
    letters_ = std::move(out);
  }

  std::vector<Letter> letters_;
};

/// Free reduction of an arbitrary letter sequence, checked against the alphabet.
inline Word reduce(const std::vector<Letter>& raw, const Alphabet& alphabet) {
  for (Letter x : raw)
    if (!alphabet.contains(x)) throw WordError("letter index out of alphabet range");
  return Word(raw);
}

inline Word power(const Word& w, long long n) {
  Word base = n < 0 ? w.inverse() : w;
  Word out;
  for (long long i = 0; i < (n < 0 ? -n : n); ++i) out *= base;
  return out;
}

inline Word conjugate(const Word& w, const Word& x) { return x.inverse() * w * x; }

// ---------------------------------------------------------------------------
// Text syntax

inline char letter_name(Letter x) {
  int g = x < 0 ? -x : x;
  if (g < 1 || g > kMaxNamedRank) return '?';
  char c = kGeneratorNames[g - 1];
  return x < 0 ? static_cast<char>(c - 'a' + 'A') : c;
}

inline std::string to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (Letter x : w) {
    int g = x < 0 ? -x : x;
    if (g <= kMaxNamedRank) {
      s.push_back(letter_name(x));
    } else {
      s += "[" + std::to_string(x) + "]";
    }
  }
  return s;
}

/// Parses a base-group word. Whitespace is ignored; "1" or "" is the identity.
/// Letters 't'/'T' are rejected because they name the stable letter.
inline Word parse_word(std::string_view text, std::optional<int> rank = std::nullopt) {
  std::vector<Letter> raw;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '1') continue;
    if (c == 't' || c == 'T') throw WordError("stable letter 't' inside a base-group word");
    char lower = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    auto pos = kGeneratorNames.find(lower);
    if (pos == std::string_view::npos) throw WordError(std::string("unknown letter '") + c + "'");
    Letter x = static_cast<Letter>(pos) + 1;
    if (rank && x > *rank) throw WordError(std::string("letter '") + c + "' outside rank " + std::to_string(*rank));
    raw.push_back(c == lower ? x : -x);
  }
  return Word(std::move(raw));
}

inline Letter parse_generator(char c) {
  if (c == 't' || c == 'T') throw WordError("stable letter 't' is not a base generator");
  auto pos = kGeneratorNames.find(c);
  if (pos == std::string_view::npos) throw WordError(std::string("not a generator name: '") + c + "'");
  return static_cast<Letter>(pos) + 1;
}

// ---------------------------------------------------------------------------
// Cyclic words and conjugacy

/// Cyclically reduced word kept in canonical form: the lexicographically least
/// rotation (letters compared as signed integers).
class CyclicWord {
 public:
  CyclicWord() = default;
  explicit CyclicWord(const Word& cyclically_reduced);

  const Word& word() const noexcept { return word_; }
  std::size_t size() const noexcept { return word_.size(); }
  bool empty() const noexcept { return word_.empty(); }

  friend bool operator==(const CyclicWord&, const CyclicWord&) = default;
  friend auto operator<=>(const CyclicWord& a, const CyclicWord& b) { return a.word_ <=> b.word_; }

 private:
  Word word_;
};

/// Index of the least rotation (Booth's algorithm).
inline std::size_t least_rotation(const std::vector<Letter>& s) {
  const std::size_t n = s.size();
  if (n == 0) return 0;
  std::vector<long> f(2 * n, -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < 2 * n; ++j) {
    Letter sj = s[j % n];
    long i = f[j - k - 1];
    while (i != -1 && sj != s[(k + i + 1) % n]) {
      if (sj < s[(k + i + 1) % n]) k = j - i - 1;
      i = f[i];
    }
    if (i == -1 && sj != s[(k + i + 1) % n]) {
      if (sj < s[(k + i + 1) % n]) k = j;
      f[j - k] = -1;
    } else {
      f[j - k] = i + 1;
    }
  }
  return k % n;
}

inline Word rotate(const Word& w, std::size_t k) {
  if (w.empty()) return w;
  k %= w.size();
  std::vector<Letter> r(w.begin() + k, w.end());
  r.insert(r.end(), w.begin(), w.begin() + k);
  return Word(std::move(r));
}

inline CyclicWord::CyclicWord(const Word& w) : word_(rotate(w, least_rotation(w.letters()))) {}

struct CyclicReduction {
  Word core;        // cyclically reduced
  Word conjugator;  // w == conjugator^-1 * core * conjugator
};

inline CyclicReduction cyclic_reduce(const Word& w) {
  const auto& s = w.letters();
  std::size_t lo = 0, hi = s.size();
  while (hi - lo >= 2 && s[lo] == -s[hi - 1]) {
    ++lo;
    --hi;
  }
  CyclicReduction r;
  r.core = w.subword(lo, hi - lo);
  r.conjugator = w.subword(0, lo).inverse();
  return r;
}

inline CyclicWord cyclic_word(const Word& w) { return CyclicWord(cyclic_reduce(w).core); }

inline std::size_t cyclic_length(const Word& w) { return cyclic_reduce(w).core.size(); }

/// Position k with rotate(hay, k) == needle, if the two cyclic words agree.
inline std::optional<std::size_t> rotation_offset(const Word& hay, const Word& needle) {
  if (hay.size() != needle.size()) return std::nullopt;
  if (hay.empty()) return 0;
  std::vector<Letter> doubled(hay.begin(), hay.end());
  doubled.insert(doubled.end(), hay.begin(), hay.end());
  doubled.pop_back();
  auto it = std::search(doubled.begin(), doubled.end(),
                        std::boyer_moore_horspool_searcher(needle.begin(), needle.end()));
  if (it == doubled.end()) return std::nullopt;
  return static_cast<std::size_t>(it - doubled.begin());
}

/// Returns x with u == x^-1 v x when u and v are conjugate in the free group.
inline std::optional<Word> free_conjugacy(const Word& u, const Word& v) {
  auto cu = cyclic_reduce(u);
  auto cv = cyclic_reduce(v);
  auto k = rotation_offset(cv.core, cu.core);
  if (!k) return std::nullopt;
  // cu.core = P^-1 cv.core P with P the first k letters of cv.core.
  Word prefix = cv.core.subword(0, *k);
  return cv.conjugator.inverse() * prefix * cu.conjugator;
}

inline bool is_conjugate(const Word& u, const Word& v) {
  return cyclic_length(u) == cyclic_length(v) && cyclic_word(u) == cyclic_word(v);
}

struct Root {
  Word root;
  long long exponent = 1;
};

/// Maximal root: w == root^exponent with exponent maximal. Requires w != 1.
inline Root root(const Word& w) {
  if (w.empty()) throw WordError("root of the identity is undefined");
  auto cr = cyclic_reduce(w);
  const auto& s = cr.core.letters();
  const std::size_t n = s.size();
  // Smallest period from the prefix function.
  std::vector<std::size_t> pi(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t k = pi[i - 1];
    while (k > 0 && s[i] != s[k]) k = pi[k - 1];
    if (s[i] == s[k]) ++k;
    pi[i] = k;
  }
  std::size_t period = n - pi[n - 1];
  if (n % period != 0) period = n;
  Root r;
  r.root = conjugate(cr.core.subword(0, period), cr.conjugator);
  r.exponent = static_cast<long long>(n / period);
  return r;
}

}  // namespace hnncp

template <>
struct std::hash<hnncp::Word> {
  std::size_t operator()(const hnncp::Word& w) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto x : w) h = (h ^ static_cast<std::size_t>(x + 1024)) * 1099511628211ull;
    return h;
  }
};
