#include "fsg/paths.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace fsg {

Path Path::word(const DirectedMultigraph& g, std::vector<int> edge_seq) {
  if (edge_seq.empty()) throw std::invalid_argument("Path::word: empty word");
  for (std::size_t j = 0; j + 1 < edge_seq.size(); ++j)
    if (g.edge(edge_seq[j]).src != g.edge(edge_seq[j + 1]).dst)
      throw std::invalid_argument("Path::word: edges not composable");
  Path p;
  p.edges = std::move(edge_seq);
  p.rng = g.edge(p.edges.front()).dst;
  p.src = g.edge(p.edges.back()).src;
  p.base = -1;
  return p;
}

std::string path_to_string(const DirectedMultigraph& g, const Path& p) {
  if (p.is_vertex()) return g.vertex_id(p.base);
  std::string out;
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    if (i) out += '.';
    out += g.edge(p.edges[i]).id;
  }
  return out;
}

std::optional<Path> path_from_string(const DirectedMultigraph& g, const std::string& s) {
  if (auto v = g.find_vertex(s)) return Path::vertex(*v);
  std::vector<int> word;
  std::string tok;
  std::istringstream in(s);
  while (std::getline(in, tok, '.')) {
    auto e = g.find_edge(tok);
    if (!e) return std::nullopt;
    word.push_back(*e);
  }
  if (word.empty()) return std::nullopt;
  for (std::size_t j = 0; j + 1 < word.size(); ++j)
    if (g.edge(word[j]).src != g.edge(word[j + 1]).dst) return std::nullopt;
  return Path::word(g, word);
}

std::optional<Path> compose(const DirectedMultigraph& g, const Path& p, const Path& q) {
  if (p.src != q.rng) return std::nullopt;
  if (p.is_vertex()) return q;
  if (q.is_vertex()) return p;
  std::vector<int> word = p.edges;
  word.insert(word.end(), q.edges.begin(), q.edges.end());
  return Path::word(g, word);
}

PathBasis::PathBasis(const DirectedMultigraph& g, int depth, std::size_t cap)
    : g_(&g), depth_(depth) {
  if (depth < 0) throw std::invalid_argument("PathBasis: negative depth");
  offsets_.push_back(0);
  for (int v = 0; v < g.vertex_count(); ++v) paths_.push_back(Path::vertex(v));
  // Length k+1 words e.w in lexicographic order: outer loop over the
  // first edge in declaration order, inner over the length-k block.
  for (int len = 1; len <= depth; ++len) {
    offsets_.push_back(static_cast<int>(paths_.size()));
    int begin = offsets_[len - 1], end = offsets_[len];
    for (int e = 0; e < g.edge_count(); ++e) {
      for (int i = begin; i < end; ++i) {
        const Path& w = paths_[i];
        if (w.rng != g.edge(e).src) continue;
        Path p;
        p.edges.reserve(len);
        p.edges.push_back(e);
        p.edges.insert(p.edges.end(), w.edges.begin(), w.edges.end());
        p.rng = g.edge(e).dst;
        p.src = w.src;
        if (paths_.size() >= cap)
          throw budget_error("PathBasis: cap of " + std::to_string(cap) +
                             " paths exceeded at depth " + std::to_string(len));
        paths_.push_back(std::move(p));
      }
    }
    if (static_cast<int>(paths_.size()) == offsets_[len]) break;  // no longer paths
  }
  while (static_cast<int>(offsets_.size()) <= depth + 1)
    offsets_.push_back(static_cast<int>(paths_.size()));
  for (int i = 0; i < static_cast<int>(paths_.size()); ++i) index_[paths_[i]] = i;
}

std::shared_ptr<const PathBasis> PathBasis::make(const DirectedMultigraph& g, int depth,
                                                 std::size_t cap) {
  return std::make_shared<const PathBasis>(g, depth, cap);
}

std::optional<int> PathBasis::index_of(const Path& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int PathBasis::length_offset(int len) const {
  if (len < 0) return 0;
  if (len >= static_cast<int>(offsets_.size())) return static_cast<int>(paths_.size());
  return offsets_[len];
}

std::vector<Path> minimal_circles_at(const DirectedMultigraph& g, int v, int maxlen,
                                     bool* truncated, std::size_t cap) {
  if (maxlen < 1) throw std::invalid_argument("minimal_circles_at: maxlen < 1");
  std::vector<Path> out;
  bool extra = false;
  std::size_t count = 0;
  // Chronological walk from v; interior vertices may repeat but must
  // differ from v (first return). The edge word is the reversed walk.
  std::vector<int> walk;
  std::function<void(int)> dfs = [&](int at) {
    if (static_cast<int>(walk.size()) >= maxlen + 1) return;
    for (int e : g.out_edges(at)) {
      int to = g.edge(e).dst;
      walk.push_back(e);
      if (to == v) {
        if (static_cast<int>(walk.size()) <= maxlen) {
          if (++count > cap) throw budget_error("minimal_circles_at: cap exceeded");
          std::vector<int> word(walk.rbegin(), walk.rend());
          out.push_back(Path::word(g, word));
        } else {
          extra = true;
        }
      } else {
        dfs(to);
      }
      walk.pop_back();
    }
  };
  dfs(v);
  std::sort(out.begin(), out.end());
  if (truncated) *truncated = extra;
  return out;
}

std::pair<Path, int> root_power_decomposition(const DirectedMultigraph& g, const Path& w) {
  if (!w.is_circle()) throw std::invalid_argument("root_power_decomposition: not a circle");
  if (w.is_vertex()) return {w, 1};
  int n = w.length();
  // Smallest period d dividing n with w = root^(n/d).
  for (int d = 1; d <= n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (int i = d; i < n && ok; ++i)
      if (w.edges[i] != w.edges[i - d]) ok = false;
    if (ok) {
      std::vector<int> root(w.edges.begin(), w.edges.begin() + d);
      return {Path::word(g, root), n / d};
    }
  }
  return {w, 1};  // unreachable
}

bool commutes_with(const DirectedMultigraph& g, const Path& p, const Path& w) {
  auto pw = compose(g, p, w);
  auto wp = compose(g, w, p);
  if (!pw || !wp) return false;
  return *pw == *wp;
}

}  // namespace fsg
