#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hnncp/config.hpp"
#include "hnncp/stallings.hpp"
#include "hnncp/substitution.hpp"
#include "hnncp/word.hpp"

namespace hnncp {

/// Endomorphism of the free group of rank `rank()`, given by basis images.
/// Rank zero (the trivial group) is allowed; it shows up as the bottom of a
/// retraction chain.
class Endomorphism {
 public:
  Endomorphism() : Endomorphism(0, {}) {}

  Endomorphism(int rank, Substitution images) : rank_(rank), images_(std::move(images)), cache_(std::make_shared<Cache>()) {
    if (rank < 0) throw std::invalid_argument("negative rank");
    if (static_cast<int>(images_.size()) != rank) throw std::invalid_argument("need exactly one image per generator");
    for (const auto& w : images_)
      if (w.max_generator() > rank) throw WordError("image uses a letter outside the alphabet");
  }

  static Endomorphism identity(int rank) { return {rank, identity_substitution(rank)}; }

  int rank() const noexcept { return rank_; }
  const Substitution& images() const noexcept { return images_; }
  const Word& image(int generator) const { return images_.at(generator - 1); }

  /// |phi|: longest basis image.
  std::size_t norm() const noexcept {
    std::size_t n = 0;
    for (const auto& w : images_) n = std::max(n, w.size());
    return n;
  }

  Word apply(const Word& w) const {
    if (w.max_generator() > rank_) throw WordError("word outside the alphabet of the endomorphism");
    return substitute(images_, w);
  }
  Word operator()(const Word& w) const { return apply(w); }

  /// phi^n(w), abandoning once an intermediate result exceeds max_length.
  Word iterate(const Word& w, int n, std::size_t max_length = static_cast<std::size_t>(-1)) const {
    if (n < 0) throw std::invalid_argument("negative exponent");
    Word cur = w;
    for (int i = 0; i < n; ++i) {
      cur = apply(cur);
      if (cur.size() > max_length) throw LengthBoundExceeded("iterate exceeds the word-length bound");
    }
    return cur;
  }

  /// (*this) after g.
  Endomorphism compose(const Endomorphism& g) const {
    if (g.rank_ != rank_) throw std::invalid_argument("rank mismatch in composition");
    return {rank_, hnncp::compose(images_, g.images_)};
  }

  Endomorphism power(int n, std::size_t max_length = static_cast<std::size_t>(-1)) const {
    if (n < 0) throw std::invalid_argument("negative exponent");
    Substitution img = identity_substitution(rank_);
    for (int i = 0; i < n; ++i) {
      img = hnncp::compose(images_, img);
      for (const auto& w : img)
        if (w.size() > max_length) throw LengthBoundExceeded("power exceeds the word-length bound");
    }
    return {rank_, std::move(img)};
  }

  /// Extension to a larger alphabet; generator rank()+i maps to extra[i-1].
  Endomorphism extend(const std::vector<Word>& extra) const {
    Substitution img = images_;
    img.insert(img.end(), extra.begin(), extra.end());
    return {rank_ + static_cast<int>(extra.size()), std::move(img)};
  }

  /// Folded image subgroup. Its generators are the basis images, so a
  /// membership witness is literally a preimage.
  const CoreGraph& image_graph() const {
    std::call_once(cache_->image_once, [&] { cache_->image = CoreGraph::fold(images_, std::max(rank_, 1), true); });
    return cache_->image;
  }

  /// Hopficity: injective iff the image has full rank.
  bool is_injective() const {
    std::call_once(cache_->injective_once, [&] {
      cache_->injective = rank_ == 0 || image_graph().rank() == rank_;
    });
    return cache_->injective;
  }

  /// Image graph equals the rose.
  bool is_surjective() const {
    if (rank_ == 0) return true;
    const auto& g = image_graph();
    return g.vertex_count() == 1 && g.edge_count() == rank_;
  }

  bool is_automorphism() const { return is_surjective(); }

  /// The unique x with phi(x) = w, if w lies in the image. Needs phi injective.
  std::optional<Word> pullback_element(const Word& w) const {
    if (!is_injective()) throw std::logic_error("pullback_element needs an injective endomorphism");
    if (rank_ == 0) return w.empty() ? std::optional<Word>(Word{}) : std::nullopt;
    return membership(w, image_graph());
  }

  friend bool operator==(const Endomorphism& a, const Endomorphism& b) {
    return a.rank_ == b.rank_ && a.images_ == b.images_;
  }

 private:
  struct Cache {
    std::once_flag image_once, injective_once;
    CoreGraph image;
    bool injective = false;
  };

  int rank_;
  Substitution images_;
  std::shared_ptr<Cache> cache_;
};

inline std::string to_string(const Endomorphism& phi) {
  std::string s;
  for (int i = 1; i <= phi.rank(); ++i) {
    if (i > 1) s += ", ";
    s += to_string(Word::letter(i));
    s += " -> ";
    s += to_string(phi.image(i));
  }
  return s;
}

/// Result of probing membership in the image powers phi^m(F).
struct ImageProbe {
  bool left = false;        // w is not in phi^m(F) for the reported m
  int m = 0;                // minimal such m (when left)
  Word last_preimage;       // phi^-(m-1)(w) when left; phi^-reached(w) otherwise
  int reached = 0;          // number of successful pullbacks
};

/// Minimal m <= bound with w not in phi^m(F), found by pulling back one step
/// at a time; otherwise reports that w lies in every phi^m(F), m <= bound.
inline ImageProbe stable_image_probe(const Endomorphism& phi, const Word& w, int bound) {
  if (bound < 1) throw std::invalid_argument("probe bound must be positive");
  ImageProbe out;
  Word cur = w;
  for (int m = 1; m <= bound; ++m) {
    auto pre = phi.pullback_element(cur);
    if (!pre) {
      out.left = true;
      out.m = m;
      out.last_preimage = cur;
      out.reached = m - 1;
      return out;
    }
    cur = *pre;
  }
  out.last_preimage = cur;
  out.reached = bound;
  return out;
}

/// {x : phi(x) in H} for injective phi and based H.
inline CoreGraph preimage_subgroup(const Endomorphism& phi, const CoreGraph& h) {
  if (!phi.is_injective()) throw std::logic_error("preimage_subgroup needs an injective endomorphism");
  if (!h.is_based()) throw std::logic_error("preimage_subgroup needs a based subgroup");
  const auto& img = phi.image_graph();
  CoreGraph j = intersect(img, h);
  std::vector<Word> pre;
  for (const auto& g : j.schreier_basis()) {
    auto w = membership(g, img);
    if (!w) throw std::logic_error("intersection element outside the image");
    pre.push_back(*w);
  }
  return CoreGraph::fold(pre, phi.rank(), true);
}

}  // namespace hnncp
