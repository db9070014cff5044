#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hnncp/substitution.hpp"
#include "hnncp/word.hpp"

namespace hnncp {

/// Positively labelled edge src --letter--> tgt of a core graph.
struct Edge {
  int src = 0;
  Letter letter = 1;
  int tgt = 0;
};

/// Expression of an element as a word in the generators of a core graph:
/// letter i stands for generators()[i-1].
using Witness = Word;

class CoreGraph;

namespace detail {

// Mutable graph used while folding. Every edge carries a tag, a word over the
// tag generators, and the folder maintains
//   eval(tag(e)) = P(src) * label(e) * P(tgt)^-1
// for a potential P with P(base) = 1, so reading a closed path at the base and
// multiplying the tags expresses its label in the tag generators.
class Folder {
 public:
  explicit Folder(int rank) : rank_(rank) {}

  int add_vertex() {
    inc_.emplace_back();
    alive_.push_back(true);
    return static_cast<int>(inc_.size()) - 1;
  }

  void set_base(int v) { base_ = v; }

  void add_edge(int src, Letter x, int tgt, Word tag = {}) {
    if (x < 0) {
      std::swap(src, tgt);
      x = -x;
      tag = tag.inverse();
    }
    int id = static_cast<int>(edges_.size());
    edges_.push_back({src, tgt, x, std::move(tag), true});
    inc_[src].push_back(id);
    if (tgt != src) inc_[tgt].push_back(id);
  }

  // Closed path at the base spelling w; the last edge carries `tag`.
  void add_loop(const Word& w, const Word& tag) {
    if (w.empty()) return;
    int cur = base_;
    for (std::size_t i = 0; i < w.size(); ++i) {
      int nxt = (i + 1 == w.size()) ? base_ : add_vertex();
      add_edge(cur, w[i], nxt, i + 1 == w.size() ? tag : Word{});
      cur = nxt;
    }
  }

  void fold() {
    std::deque<int> work;
    for (int v = 0; v < static_cast<int>(inc_.size()); ++v) work.push_back(v);
    std::vector<std::pair<int, int>> seen(2 * rank_);  // slot -> (edge, end)
    while (!work.empty()) {
      int v = work.front();
      work.pop_front();
      if (!alive_[v]) continue;
      bool again = true;
      while (again && alive_[v]) {
        again = false;
        std::fill(seen.begin(), seen.end(), std::pair{-1, 0});
        compact(v);
        for (int id : inc_[v]) {
          const auto& e = edges_[id];
          for (int end = 0; end < 2 && !again; ++end) {
            int at = end == 0 ? e.src : e.tgt;
            if (at != v) continue;
            Letter s = end == 0 ? e.x : -e.x;
            auto& slot = seen[slot_of(s)];
            if (slot.first == -1) {
              slot = {id, end};
            } else if (slot.first != id) {
              int survivor = merge(v, slot.first, slot.second, id, end);
              work.push_back(survivor);
              again = true;
            }
          }
          if (again) break;
        }
      }
    }
  }

  // Removes hair. Based mode keeps the base; free mode strips every vertex of
  // degree at most one.
  void trim(bool based) {
    std::vector<int> degree(inc_.size(), 0);
    for (const auto& e : edges_) {
      if (!e.alive) continue;
      ++degree[e.src];
      ++degree[e.tgt];
    }
    std::deque<int> work;
    for (int v = 0; v < static_cast<int>(inc_.size()); ++v)
      if (alive_[v] && degree[v] <= 1) work.push_back(v);
    while (!work.empty()) {
      int v = work.front();
      work.pop_front();
      if (!alive_[v] || degree[v] > 1) continue;
      if (based && v == base_) continue;
      alive_[v] = false;
      for (int id : inc_[v]) {
        auto& e = edges_[id];
        if (!e.alive) continue;
        e.alive = false;
        int other = e.src == v ? e.tgt : e.src;
        --degree[e.src];
        --degree[e.tgt];
        if (other != v && alive_[other] && degree[other] <= 1) work.push_back(other);
      }
      inc_[v].clear();
    }
  }

  CoreGraph build(bool based, std::vector<Word> generators, std::vector<int>* old_to_new = nullptr);

 private:
  struct RawEdge {
    int src, tgt;
    Letter x;
    Word tag;
    bool alive;
  };

  int slot_of(Letter s) const { return s > 0 ? s - 1 : rank_ - s - 1; }

  void compact(int v) {
    auto& list = inc_[v];
    std::vector<int> out;
    out.reserve(list.size());
    for (int id : list) {
      const auto& e = edges_[id];
      if (!e.alive || (e.src != v && e.tgt != v)) continue;
      if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
    list = std::move(out);
  }

  // Two edges leave v with the same signed label. Identify them and return
  // the surviving far vertex.
  int merge(int v, int ea, int enda, int eb, int endb) {
    auto far = [&](int id, int end) { return end == 0 ? edges_[id].tgt : edges_[id].src; };
    auto read = [&](int id, int end) { return end == 0 ? edges_[id].tag : edges_[id].tag.inverse(); };
    int va = far(ea, enda), vb = far(eb, endb);
    Word ta = read(ea, enda), tb = read(eb, endb);
    if (va == vb) {
      edges_[ea].alive = false;
      return v;
    }
    if (va == base_) {
      std::swap(va, vb);
      std::swap(ta, tb);
      std::swap(ea, eb);
    }
    edges_[ea].alive = false;
    Word left = tb.inverse() * ta;
    Word right = ta.inverse() * tb;
    for (int id : inc_[va]) {
      auto& e = edges_[id];
      if (!e.alive) continue;
      if (e.src == va) {
        e.tag = left * e.tag;
        e.src = vb;
      }
      if (e.tgt == va) {
        e.tag = e.tag * right;
        e.tgt = vb;
      }
      inc_[vb].push_back(id);
    }
    inc_[va].clear();
    alive_[va] = false;
    return vb;
  }

  int rank_;
  int base_ = 0;
  std::vector<std::vector<int>> inc_;
  std::vector<bool> alive_;
  std::vector<RawEdge> edges_;
};

}  // namespace detail

/// Folded Stallings graph over the free group of rank `alphabet_rank()`. A
/// based graph represents a subgroup; a basepoint-free one represents its
/// conjugacy class. Immutable after construction.
class CoreGraph {
 public:
  CoreGraph() = default;

  /// Folds the wedge of generator loops. Based mode keeps the basepoint (and
  /// any hair at it); free mode returns the cyclic core, empty for the
  /// trivial subgroup. Based graphs record the input words as their
  /// generators, so membership witnesses are words in the inputs.
  static CoreGraph fold(const std::vector<Word>& generators, int rank, bool based = true) {
    detail::Folder f(rank);
    f.set_base(f.add_vertex());
    for (std::size_t i = 0; i < generators.size(); ++i) {
      if (generators[i].max_generator() > rank) throw WordError("generator outside the alphabet");
      f.add_loop(generators[i], Word::letter(static_cast<Letter>(i) + 1));
    }
    f.fold();
    f.trim(based);
    if (based) return f.build(true, generators);
    return f.build(false, {});
  }

  /// The rose with one petal per generator: the whole free group.
  static CoreGraph rose(int rank) { return fold(identity_substitution(rank), rank, true); }

  int alphabet_rank() const noexcept { return rank_; }
  int vertex_count() const noexcept { return static_cast<int>(next_.size()) / std::max(1, 2 * rank_); }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  bool empty() const noexcept { return vertex_count() == 0; }
  bool is_based() const noexcept { return base_.has_value(); }
  int basepoint() const { return base_.value_or(0); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<Word>& generators() const noexcept { return generators_; }
  const Word& tag(int edge) const { return tags_[edge]; }

  /// First Betti number: rank of the represented subgroup.
  int rank() const noexcept { return empty() ? 0 : edge_count() - vertex_count() + 1; }

  int slot(Letter x) const noexcept { return x > 0 ? x - 1 : rank_ - x - 1; }
  int next(int v, Letter x) const { return next_[v * 2 * rank_ + slot(x)]; }
  int edge_at(int v, Letter x) const { return edge_of_[v * 2 * rank_ + slot(x)]; }
  int degree(int v) const {
    int d = 0;
    for (int s = 0; s < 2 * rank_; ++s) d += next_[v * 2 * rank_ + s] >= 0;
    return d;
  }

  /// End vertex of the path spelling w from `start`, if it can be read.
  std::optional<int> read(int start, const Word& w) const {
    int v = start;
    for (Letter x : w) {
      if (x > rank_ || -x > rank_) return std::nullopt;
      v = next(v, x);
      if (v < 0) return std::nullopt;
    }
    return v;
  }

  /// Label of the spanning-tree path from the basepoint (vertex 0 when free).
  Word tree_path(int v) const { return tree_paths_.at(v); }

  /// Schreier basis relative to the spanning tree, one word per non-tree edge.
  std::vector<Word> schreier_basis() const {
    std::vector<Word> out;
    for (int id = 0; id < edge_count(); ++id) {
      if (is_tree_edge_[id]) continue;
      const auto& e = edges_[id];
      out.push_back(tree_paths_[e.src] * Word::letter(e.letter) * tree_paths_[e.tgt].inverse());
    }
    return out;
  }

  /// Copy whose generators are the Schreier basis and whose tags express it.
  CoreGraph with_schreier_generators() const {
    CoreGraph g = *this;
    g.generators_.clear();
    for (int id = 0; id < edge_count(); ++id) {
      if (is_tree_edge_[id]) {
        g.tags_[id] = Word{};
      } else {
        const auto& e = edges_[id];
        g.generators_.push_back(tree_paths_[e.src] * Word::letter(e.letter) * tree_paths_[e.tgt].inverse());
        g.tags_[id] = Word::letter(static_cast<Letter>(g.generators_.size()));
      }
    }
    return g;
  }

  CoreGraph unbased() const {
    detail::Folder f(rank_);
    for (int v = 0; v < vertex_count(); ++v) f.add_vertex();
    for (const auto& e : edges_) f.add_edge(e.src, e.letter, e.tgt);
    f.trim(false);
    return f.build(false, {});
  }

  /// Canonical form up to labelled isomorphism (fixing the basepoint when
  /// based). Equal keys mean equal subgroups (based) or conjugate subgroups.
  std::vector<int> canonical_key() const {
    if (empty()) return {};
    if (is_based()) return encode_from(basepoint());
    std::vector<int> best;
    for (int v = 0; v < vertex_count(); ++v) {
      auto k = encode_from(v);
      if (best.empty() || k < best) best = std::move(k);
    }
    return best;
  }

  friend bool operator==(const CoreGraph& a, const CoreGraph& b) {
    return a.rank_ == b.rank_ && a.base_.has_value() == b.base_.has_value() && a.canonical_key() == b.canonical_key();
  }

 private:
  friend class detail::Folder;

  std::vector<int> encode_from(int start) const {
    const int n = vertex_count();
    std::vector<int> order(n, -1);
    std::vector<int> queue{start};
    order[start] = 0;
    std::vector<int> key;
    key.reserve(static_cast<std::size_t>(n) * 2 * rank_ + 1);
    key.push_back(n);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int v = queue[qi];
      for (int s = 0; s < 2 * rank_; ++s) {
        int w = next_[v * 2 * rank_ + s];
        if (w >= 0 && order[w] < 0) {
          order[w] = static_cast<int>(queue.size());
          queue.push_back(w);
        }
        key.push_back(w < 0 ? -1 : order[w]);
      }
    }
    return key;
  }

  void index_tree() {
    const int n = vertex_count();
    tree_paths_.assign(n, Word{});
    is_tree_edge_.assign(edges_.size(), false);
    if (n == 0) return;
    std::vector<bool> seen(n, false);
    int start = basepoint();
    std::vector<int> queue{start};
    seen[start] = true;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int v = queue[qi];
      for (int s = 0; s < 2 * rank_; ++s) {
        Letter x = s < rank_ ? s + 1 : -(s - rank_ + 1);
        int w = next(v, x);
        if (w < 0 || seen[w]) continue;
        seen[w] = true;
        is_tree_edge_[edge_at(v, x)] = true;
        tree_paths_[w] = tree_paths_[v] * Word::letter(x);
        queue.push_back(w);
      }
    }
  }

  int rank_ = 1;
  std::optional<int> base_;
  std::vector<int> next_;
  std::vector<int> edge_of_;
  std::vector<Edge> edges_;
  std::vector<Word> tags_;
  std::vector<Word> generators_;
  std::vector<Word> tree_paths_;
  std::vector<bool> is_tree_edge_;
};

inline CoreGraph detail::Folder::build(bool based, std::vector<Word> generators, std::vector<int>* old_to_new) {
  CoreGraph g;
  g.rank_ = rank_;
  const int n_old = static_cast<int>(inc_.size());
  std::vector<int> order(n_old, -1);
  // Adjacency by slot among live edges.
  std::vector<int> adj(static_cast<std::size_t>(n_old) * 2 * rank_, -1);
  for (int id = 0; id < static_cast<int>(edges_.size()); ++id) {
    const auto& e = edges_[id];
    if (!e.alive) continue;
    adj[e.src * 2 * rank_ + slot_of(e.x)] = id;
    adj[e.tgt * 2 * rank_ + slot_of(-e.x)] = id;
  }
  int start = -1;
  if (based) {
    start = base_;
  } else {
    for (int v = 0; v < n_old; ++v)
      if (alive_[v]) {
        start = v;
        break;
      }
  }
  std::vector<int> queue;
  if (start >= 0 && alive_[start]) {
    queue.push_back(start);
    order[start] = 0;
  }
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    for (int s = 0; s < 2 * rank_; ++s) {
      int id = adj[v * 2 * rank_ + s];
      if (id < 0) continue;
      const auto& e = edges_[id];
      int w = s < rank_ ? e.tgt : e.src;
      if (order[w] < 0) {
        order[w] = static_cast<int>(queue.size());
        queue.push_back(w);
      }
    }
  }
  const int n = static_cast<int>(queue.size());
  g.next_.assign(static_cast<std::size_t>(n) * 2 * rank_, -1);
  g.edge_of_.assign(g.next_.size(), -1);
  for (int nv = 0; nv < n; ++nv) {
    int v = queue[nv];
    for (int s = 0; s < rank_; ++s) {
      int id = adj[v * 2 * rank_ + s];
      if (id < 0) continue;
      const auto& e = edges_[id];
      int eid = static_cast<int>(g.edges_.size());
      int t = order[e.tgt];
      g.edges_.push_back({nv, e.x, t});
      g.tags_.push_back(e.tag);
      g.next_[nv * 2 * rank_ + s] = t;
      g.edge_of_[nv * 2 * rank_ + s] = eid;
      g.next_[t * 2 * rank_ + rank_ + s] = nv;
      g.edge_of_[t * 2 * rank_ + rank_ + s] = eid;
    }
  }
  if (based) g.base_ = 0;
  g.generators_ = std::move(generators);
  if (!based) g.tags_.assign(g.edges_.size(), Word{});
  g.index_tree();
  if (!based) g = g.with_schreier_generators();
  if (old_to_new) *old_to_new = std::move(order);
  return g;
}

// ---------------------------------------------------------------------------
// Queries

/// Some(witness) iff w is in the subgroup of the based graph g; the witness is
/// a word in g.generators() evaluating to w.
inline std::optional<Witness> membership(const Word& w, const CoreGraph& g) {
  if (!g.is_based()) throw std::logic_error("membership needs a based core graph");
  Word witness;
  int v = g.basepoint();
  for (Letter x : w) {
    if (x > g.alphabet_rank() || -x > g.alphabet_rank()) return std::nullopt;
    int id = g.edge_at(v, x);
    if (id < 0) return std::nullopt;
    witness *= x > 0 ? g.tag(id) : g.tag(id).inverse();
    v = g.next(v, x);
  }
  if (v != g.basepoint()) return std::nullopt;
  return witness;
}

inline bool contains(const CoreGraph& g, const Word& w) {
  auto end = g.read(g.basepoint(), w);
  return end && *end == g.basepoint();
}

inline Word evaluate(const Witness& witness, const std::vector<Word>& generators) {
  return substitute(generators, witness);
}

/// Pullback component together with the vertex pairs it came from.
struct PullbackComponent {
  CoreGraph graph;
  std::vector<std::pair<int, int>> pairs;  // new vertex -> (vertex of G, vertex of H)
};

namespace detail {

inline PullbackComponent product_component(const CoreGraph& g, const CoreGraph& h, int gs, int hs, bool based,
                                           std::unordered_map<long long, int>& visited_global) {
  const int r = g.alphabet_rank();
  const long long hn = h.vertex_count();
  std::unordered_map<long long, int> local;
  std::vector<std::pair<int, int>> pairs;
  Folder f(r);
  auto vertex_for = [&](int a, int b) {
    long long key = a * hn + b;
    auto it = local.find(key);
    if (it != local.end()) return std::pair{it->second, false};
    int id = f.add_vertex();
    local.emplace(key, id);
    visited_global.emplace(key, id);
    pairs.emplace_back(a, b);
    return std::pair{id, true};
  };
  std::vector<int> queue{vertex_for(gs, hs).first};
  f.set_base(queue.front());
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int id = queue[qi];
    auto [a, b] = pairs[id];
    for (Letter x = 1; x <= r; ++x) {
      for (Letter s : {x, -x}) {
        int a2 = g.next(a, s), b2 = h.next(b, s);
        if (a2 < 0 || b2 < 0) continue;
        auto [id2, fresh] = vertex_for(a2, b2);
        if (fresh) queue.push_back(id2);
        if (s > 0) f.add_edge(id, x, id2);
      }
    }
  }
  f.trim(based);
  std::vector<int> old_to_new;
  PullbackComponent out;
  out.graph = f.build(based, {}, &old_to_new);
  if (based) out.graph = out.graph.with_schreier_generators();
  out.pairs.resize(out.graph.vertex_count());
  for (std::size_t old = 0; old < old_to_new.size(); ++old)
    if (old_to_new[old] >= 0) out.pairs[old_to_new[old]] = pairs[old];
  return out;
}

}  // namespace detail

/// Based pullback: the core of the component of (base_G, base_H). Its
/// subgroup is the intersection of the two subgroups.
inline CoreGraph intersect(const CoreGraph& g, const CoreGraph& h) {
  if (g.alphabet_rank() != h.alphabet_rank()) throw std::invalid_argument("alphabet ranks differ");
  std::unordered_map<long long, int> visited;
  return detail::product_component(g, h, g.basepoint(), h.basepoint(), true, visited).graph;
}

/// Basepoint-free pullback: every non-contractible core component of the
/// fibre product, each with its vertex pairs. Only pairs reachable from a
/// synchronised edge are ever built.
inline std::vector<PullbackComponent> pullback_components(const CoreGraph& g, const CoreGraph& h) {
  if (g.alphabet_rank() != h.alphabet_rank()) throw std::invalid_argument("alphabet ranks differ");
  std::vector<PullbackComponent> out;
  std::unordered_map<long long, int> visited;
  const long long hn = h.vertex_count();
  for (int a = 0; a < g.vertex_count(); ++a) {
    for (int b = 0; b < h.vertex_count(); ++b) {
      if (visited.count(a * hn + b)) continue;
      if (g.degree(a) < 2 || h.degree(b) < 2) continue;
      int common = 0;
      for (Letter x = 1; x <= g.alphabet_rank(); ++x)
        for (Letter s : {x, -x}) common += g.next(a, s) >= 0 && h.next(b, s) >= 0;
      if (common < 2) continue;
      auto comp = detail::product_component(g, h, a, b, false, visited);
      if (!comp.graph.empty()) out.push_back(std::move(comp));
    }
  }
  return out;
}

inline std::vector<CoreGraph> pullback(const CoreGraph& g, const CoreGraph& h) {
  std::vector<CoreGraph> out;
  for (auto& c : pullback_components(g, h)) out.push_back(std::move(c.graph));
  return out;
}

/// Some(x) with x * w * x^-1 in the subgroup read at the basepoint of g
/// (vertex 0 when g is basepoint-free), iff w is conjugate into it.
inline std::optional<Word> conjugate_into(const Word& w, const CoreGraph& g) {
  if (w.empty()) return Word{};
  if (g.empty()) return std::nullopt;
  if (g.is_based() && contains(g, w)) return Word{};
  auto cr = cyclic_reduce(w);
  for (int v = 0; v < g.vertex_count(); ++v) {
    auto end = g.read(v, cr.core);
    if (end && *end == v) return g.tree_path(v) * cr.conjugator;
  }
  return std::nullopt;
}

/// A finite list of basepoint-free core graphs.
using SubgroupSystem = std::vector<CoreGraph>;

/// Vertex of `big` onto which vertex 0 of `small` maps under a label-preserving
/// graph morphism; exists iff the subgroup of `small` is conjugate into the
/// subgroup of `big`.
inline std::optional<int> immersion_into(const CoreGraph& small, const CoreGraph& big) {
  if (small.empty()) return 0;
  const int r = small.alphabet_rank();
  for (int start = 0; start < big.vertex_count(); ++start) {
    std::vector<int> image(small.vertex_count(), -1);
    image[0] = start;
    std::vector<int> queue{0};
    bool ok = true;
    for (std::size_t qi = 0; qi < queue.size() && ok; ++qi) {
      int v = queue[qi];
      for (int s = 0; s < 2 * r && ok; ++s) {
        Letter x = s < r ? s + 1 : -(s - r + 1);
        int w = small.next(v, x);
        if (w < 0) continue;
        int bw = big.next(image[v], x);
        if (bw < 0) {
          ok = false;
        } else if (image[w] < 0) {
          image[w] = bw;
          queue.push_back(w);
        } else if (image[w] != bw) {
          ok = false;
        }
      }
    }
    if (ok) return start;
  }
  return std::nullopt;
}

struct CarryResult {
  bool carries = false;
  std::vector<int> component_map;  // component of B -> component of A (-1 if none)
};

/// Whether every component of B is conjugate into some component of A.
inline CarryResult carries(const SubgroupSystem& a, const SubgroupSystem& b) {
  CarryResult out;
  out.carries = true;
  for (const auto& comp : b) {
    int found = -1;
    if (comp.rank() == 0) {
      found = a.empty() ? -1 : 0;
    } else {
      for (std::size_t i = 0; i < a.size() && found < 0; ++i) {
        CoreGraph core = a[i].is_based() ? a[i].unbased() : a[i];
        CoreGraph sub = comp.is_based() ? comp.unbased() : comp;
        if (immersion_into(sub, core)) found = static_cast<int>(i);
      }
    }
    out.component_map.push_back(found);
    if (found < 0) out.carries = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// DOT export

inline void write_dot(std::ostream& os, const CoreGraph& g, const std::string& name = "core") {
  os << "digraph " << name << " {\n";
  for (int v = 0; v < g.vertex_count(); ++v) {
    os << "  v" << v;
    if (g.is_based() && v == g.basepoint()) os << " [shape=doublecircle]";
    else os << " [shape=circle]";
    os << ";\n";
  }
  for (const auto& e : g.edges())
    os << "  v" << e.src << " -> v" << e.tgt << " [label=\"" << to_string(Word::letter(e.letter)) << "\"];\n";
  os << "}\n";
}

inline std::string to_dot(const CoreGraph& g, const std::string& name = "core") {
  std::ostringstream os;
  write_dot(os, g, name);
  return os.str();
}

}  // namespace hnncp
