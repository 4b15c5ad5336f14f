#ifndef FSG_PATHS_HPP
#define FSG_PATHS_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fsg/graph.hpp"

namespace fsg {

// A directed path. The edge word e_1 e_2 ... e_n is stored left to right
// in the paper's order: s(e_j) = r(e_{j+1}), r(p) = r(e_1), s(p) = s(e_n).
// Chronologically the path is walked from e_n to e_1. Vertices are the
// length-zero paths.
struct Path {
  int base = -1;           // vertex, for length-zero paths
  std::vector<int> edges;  // empty iff length zero
  int src = -1;            // s(p), cached
  int rng = -1;            // r(p), cached

  int length() const { return static_cast<int>(edges.size()); }
  bool is_vertex() const { return edges.empty(); }
  bool is_circle() const { return src == rng; }

  static Path vertex(int v) { return Path{v, {}, v, v}; }
  // Validates composability of consecutive edges.
  static Path word(const DirectedMultigraph& g, std::vector<int> edge_seq);

  friend bool operator==(const Path& a, const Path& b) {
    if (a.edges.empty() != b.edges.empty()) return false;
    return a.edges.empty() ? a.base == b.base : a.edges == b.edges;
  }
  friend bool operator<(const Path& a, const Path& b) {
    if (a.length() != b.length()) return a.length() < b.length();
    return a.edges.empty() ? a.base < b.base : a.edges < b.edges;
  }
};

// "v" for vertices, "e1.e2.e3" otherwise (range-to-source order).
std::string path_to_string(const DirectedMultigraph& g, const Path& p);
std::optional<Path> path_from_string(const DirectedMultigraph& g, const std::string& s);

// Product pq, defined iff s(p) = r(q); vertices act as units.
std::optional<Path> compose(const DirectedMultigraph& g, const Path& p, const Path& q);

// All paths of length <= N, ordered by (length, lexicographic edge word);
// length-zero paths ordered by vertex declaration. Closed under prefixes
// and suffixes.
class PathBasis {
 public:
  PathBasis(const DirectedMultigraph& g, int depth, std::size_t cap = 50000);

  const DirectedMultigraph& graph() const { return *g_; }
  int depth() const { return depth_; }
  std::size_t size() const { return paths_.size(); }
  const Path& path(int i) const { return paths_[i]; }
  std::optional<int> index_of(const Path& p) const;
  // First index of the given length (== size() past the longest).
  int length_offset(int len) const;

  static std::shared_ptr<const PathBasis> make(const DirectedMultigraph& g, int depth,
                                               std::size_t cap = 50000);

 private:
  const DirectedMultigraph* g_;
  int depth_;
  std::vector<Path> paths_;
  std::map<Path, int> index_;
  std::vector<int> offsets_;
};

// Minimal circles at v (first-return circles) of length <= maxlen, in
// (length, lex) order. truncated reports a first return of length
// maxlen+1.
std::vector<Path> minimal_circles_at(const DirectedMultigraph& g, int v, int maxlen,
                                     bool* truncated = nullptr,
                                     std::size_t cap = 100000);

// w = w1^m with m maximal; w1 is the primitive root.
std::pair<Path, int> root_power_decomposition(const DirectedMultigraph& g, const Path& w);

// True iff pw and wp are both defined and equal as edge words.
bool commutes_with(const DirectedMultigraph& g, const Path& p, const Path& w);

}  // namespace fsg

#endif
