#ifndef FSG_GRAPH_HPP
#define FSG_GRAPH_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace fsg {

// A directed multigraph. Edges carry a source vertex s(e) and a range
// vertex r(e); an edge is drawn as an arrow from s(e) to r(e). Parallel
// edges and loops are permitted. Iteration order over vertices and edges
// is declaration order and is treated as canonical everywhere.
struct Edge {
  std::string id;
  int src = -1;  // s(e)
  int dst = -1;  // r(e)
};

class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, int line, int col)
      : std::runtime_error(msg), line(line), col(col) {}
  int line;
  int col;
};

class budget_error : public std::runtime_error {
 public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

class DirectedMultigraph {
 public:
  int add_vertex(const std::string& id);
  int add_edge(const std::string& id, const std::string& src,
               const std::string& dst);
  int add_edge(const std::string& id, int src, int dst);

  int vertex_count() const { return static_cast<int>(vertex_ids_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::string& vertex_id(int v) const { return vertex_ids_[v]; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::optional<int> find_vertex(const std::string& id) const;
  std::optional<int> find_edge(const std::string& id) const;

  // Edge indices with s(e) = v, in declaration order.
  const std::vector<int>& out_edges(int v) const { return out_edges_[v]; }
  // Edge indices with r(e) = v, in declaration order.
  const std::vector<int>& in_edges(int v) const { return in_edges_[v]; }

 private:
  std::vector<std::string> vertex_ids_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, int> vertex_index_;
  std::unordered_map<std::string, int> edge_index_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<std::vector<int>> in_edges_;
};

// Text format: lines "vertex <id>" and "edge <id>: <src> -> <dst>", with
// "#" comments. A JSON document {"vertices":[...],"edges":[...]} is also
// accepted (detected by a leading '{').
DirectedMultigraph parse_graph(const std::string& text);
std::string to_text(const DirectedMultigraph& g);
std::string to_json_string(const DirectedMultigraph& g);

// Vertex sets of the maximal strongly connected components, ordered by
// least vertex in declaration order; members sorted the same way.
std::vector<std::vector<int>> scc_decomposition(const DirectedMultigraph& g);

// Connected components in the undirected sense, same ordering rules.
std::vector<std::vector<int>> connected_components(const DirectedMultigraph& g);

// reachable[x][y] == true iff there is a directed path from x to y
// (always true for x == y; paths of length zero count).
std::vector<std::vector<bool>> reachability(const DirectedMultigraph& g);

struct Budgets {
  std::size_t simple_paths = 2000000;   // alternating-number enumeration
  std::size_t polygons = 1000000;       // polygon/fake-circle enumeration
  int polygon_vertex_limit = 20;        // refuse polygon search above this
  std::size_t minimal_paths = 200000;   // reduced-subgraph enumeration
};

// A polygon: distinct vertices v_1..v_n and edges e_1..e_n with
// {r(e_j), s(e_j)} = {v_j, v_{j+1 mod n}}.
struct Polygon {
  std::vector<int> vertices;
  std::vector<int> edges;
  bool directed_circle = false;
};

struct StructureProbes {
  std::vector<int> acyclic_edges;        // no directed path r(e) -> s(e)
  std::optional<Polygon> fake_circle;    // first polygon that is not a circle
  long polygon_count = 0;
  bool polygon_budget_hit = false;
};

StructureProbes structure_probes(const DirectedMultigraph& g,
                                 const Budgets& budgets = {});

// Maximum over lines (simple undirected paths; vertices distinct, parallel
// edges usable as distinct edges) of the number of alternating vertices.
// nullopt means the enumeration budget was exceeded on a non-tree graph.
std::optional<long> alternating_number(const DirectedMultigraph& g,
                                       const Budgets& budgets = {});

// The reduced subgraph G_F: vertices F, one edge per minimal path at F of
// length <= maxlen. "truncated" reports whether a minimal path of length
// maxlen+1 exists.
DirectedMultigraph reduced_subgraph(const DirectedMultigraph& g,
                                    const std::vector<int>& F, int maxlen,
                                    bool* truncated = nullptr,
                                    const Budgets& budgets = {});

enum class Verdict {
  VertexGraph,
  CircleGraph,
  StronglyConnectedOther,
  FruitTree,
  GeneralizedTreeOnly,
  NotFruitTree,
};

const char* verdict_name(Verdict v);

struct Fruit {
  int attach_vertex = -1;            // v_lambda
  std::vector<int> circle_vertices;  // fruit circle, attach vertex first
  std::vector<int> circle_edges;
  int trunk_edge = -1;               // e_lambda
  bool out_fruit = false;            // s(e_lambda) == attach vertex
};

struct FruitDecomposition {
  std::vector<int> trunk_vertices;
  std::vector<int> trunk_edges;
  std::vector<Fruit> fruits;
};

// Which of properties (i)-(iv) failed, with a concrete witness.
struct FruitViolation {
  int property = 0;  // 1..4
  std::string witness;
  std::vector<int> witness_edges;
  std::vector<int> witness_vertices;
};

// Constructive decomposition of a connected, not strongly connected graph.
// Returns the decomposition or the first violated property.
std::optional<FruitDecomposition> fruit_tree_decomposition(
    const DirectedMultigraph& g, FruitViolation* violation = nullptr);

// Independent property check of (i)-(iv), used to cross-validate the
// constructive decomposition.
std::optional<FruitViolation> fruit_tree_property_check(
    const DirectedMultigraph& g, const Budgets& budgets = {});

struct ComponentReport {
  std::vector<int> vertices;
  Verdict verdict = Verdict::VertexGraph;
  int circle_n = 0;  // for CircleGraph
  std::optional<FruitDecomposition> decomposition;
  std::optional<FruitViolation> violation;
  std::optional<long> alternating;  // nullopt: budget exceeded
  StructureProbes probes;
  std::optional<std::string> unknown_reason;  // set when budgets preempt a verdict
};

struct ClassificationReport {
  std::vector<ComponentReport> components;
};

// Classify one connected component (given as an induced-subgraph view of
// g restricted to comp). classify() runs it per component.
ComponentReport classify_component(const DirectedMultigraph& g,
                                   const Budgets& budgets = {});
ClassificationReport classify(const DirectedMultigraph& g,
                              const Budgets& budgets = {});

// The subgraph induced on a vertex subset, original ids preserved.
DirectedMultigraph induced_subgraph(const DirectedMultigraph& g,
                                    const std::vector<int>& vertices);

// Fixture families.
DirectedMultigraph make_circle(int n);
DirectedMultigraph make_zigzag(int vertices);
DirectedMultigraph make_star_in_tree(int n);
DirectedMultigraph make_upper_triangle_tree(int n);
DirectedMultigraph make_parallel_edges(int n);

// G_t \sqcup_V G_f: attach an n_j-circle fruit at each attachment leaf of
// the trunk; fruit vertices are fresh except the identified one.
DirectedMultigraph amalgamate(const DirectedMultigraph& trunk,
                              const std::vector<std::pair<std::string, int>>&
                                  fruits_at_leaves);

bool is_tree(const DirectedMultigraph& g);

}  // namespace fsg

#endif
