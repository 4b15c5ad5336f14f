#include "fsg/graph.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fsg {

int DirectedMultigraph::add_vertex(const std::string& id) {
  if (vertex_index_.count(id))
    throw std::invalid_argument("duplicate vertex id: " + id);
  int v = vertex_count();
  vertex_index_[id] = v;
  vertex_ids_.push_back(id);
  out_edges_.emplace_back();
  in_edges_.emplace_back();
  return v;
}

int DirectedMultigraph::add_edge(const std::string& id, const std::string& src,
                                 const std::string& dst) {
  auto s = find_vertex(src);
  auto r = find_vertex(dst);
  if (!s) throw std::invalid_argument("edge " + id + ": undeclared vertex " + src);
  if (!r) throw std::invalid_argument("edge " + id + ": undeclared vertex " + dst);
  return add_edge(id, *s, *r);
}

int DirectedMultigraph::add_edge(const std::string& id, int src, int dst) {
  if (edge_index_.count(id))
    throw std::invalid_argument("duplicate edge id: " + id);
  if (src < 0 || src >= vertex_count() || dst < 0 || dst >= vertex_count())
    throw std::invalid_argument("edge " + id + ": vertex index out of range");
  int e = edge_count();
  edge_index_[id] = e;
  edges_.push_back(Edge{id, src, dst});
  out_edges_[src].push_back(e);
  in_edges_[dst].push_back(e);
  return e;
}

std::optional<int> DirectedMultigraph::find_vertex(const std::string& id) const {
  auto it = vertex_index_.find(id);
  if (it == vertex_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> DirectedMultigraph::find_edge(const std::string& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

namespace {

bool valid_id(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

struct LineLexer {
  const std::string& text;
  std::size_t pos = 0;
  int line;
  int col_offset;

  LineLexer(const std::string& t, int line, int col_offset = 0)
      : text(t), line(line), col_offset(col_offset) {}

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  int col() const { return static_cast<int>(pos) + 1 + col_offset; }

  bool done() {
    skip_ws();
    return pos >= text.size();
  }

  std::string token() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != ':')
      ++pos;
    return text.substr(start, pos - start);
  }

  void expect(const std::string& tok) {
    skip_ws();
    int c = col();
    if (text.compare(pos, tok.size(), tok) != 0)
      throw parse_error("expected '" + tok + "'", line, c);
    pos += tok.size();
  }
};

DirectedMultigraph parse_json_graph(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("json: ") + e.what(), 1, 1);
  }
  DirectedMultigraph g;
  try {
    for (const auto& v : j.at("vertices")) g.add_vertex(v.get<std::string>());
    for (const auto& e : j.at("edges"))
      g.add_edge(e.at("id").get<std::string>(), e.at("src").get<std::string>(),
                 e.at("dst").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("json: ") + e.what(), 1, 1);
  } catch (const std::invalid_argument& e) {
    throw parse_error(e.what(), 1, 1);
  }
  return g;
}

}  // namespace

DirectedMultigraph parse_graph(const std::string& text) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return parse_json_graph(text);

  DirectedMultigraph g;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::size_t hash = raw.find('#');
    std::string line_body = hash == std::string::npos ? raw : raw.substr(0, hash);
    // ';' separates statements within a line
    std::vector<std::pair<std::string, int>> segments;
    std::size_t start = 0;
    while (start <= line_body.size()) {
      std::size_t semi = line_body.find(';', start);
      std::size_t end = semi == std::string::npos ? line_body.size() : semi;
      segments.emplace_back(line_body.substr(start, end - start), static_cast<int>(start));
      if (semi == std::string::npos) break;
      start = semi + 1;
    }
    for (const auto& [body, offset] : segments) {
    LineLexer lex(body, lineno, offset);
    if (lex.done()) continue;
    int kw_col = lex.col();
    std::string kw = lex.token();
    if (kw == "vertex") {
      int c = lex.col();
      lex.skip_ws();
      c = lex.col();
      std::string id = lex.token();
      if (!valid_id(id)) throw parse_error("expected vertex id", lineno, c);
      if (g.find_vertex(id)) throw parse_error("duplicate vertex id: " + id, lineno, c);
      g.add_vertex(id);
      if (!lex.done()) throw parse_error("trailing tokens", lineno, lex.col());
    } else if (kw == "edge") {
      lex.skip_ws();
      int c = lex.col();
      std::string id = lex.token();
      if (!valid_id(id)) throw parse_error("expected edge id", lineno, c);
      lex.expect(":");
      lex.skip_ws();
      c = lex.col();
      std::string src = lex.token();
      if (!valid_id(src)) throw parse_error("expected source vertex", lineno, c);
      lex.expect("->");
      lex.skip_ws();
      c = lex.col();
      std::string dst = lex.token();
      if (!valid_id(dst)) throw parse_error("expected target vertex", lineno, c);
      if (g.find_edge(id)) throw parse_error("duplicate edge id: " + id, lineno, c);
      if (!g.find_vertex(src))
        throw parse_error("edge " + id + ": undeclared vertex " + src, lineno, c);
      if (!g.find_vertex(dst))
        throw parse_error("edge " + id + ": undeclared vertex " + dst, lineno, c);
      g.add_edge(id, src, dst);
      if (!lex.done()) throw parse_error("trailing tokens", lineno, lex.col());
    } else {
      throw parse_error("expected 'vertex' or 'edge', got '" + kw + "'", lineno, kw_col);
    }
    }
  }
  return g;
}

std::string to_text(const DirectedMultigraph& g) {
  std::ostringstream out;
  for (int v = 0; v < g.vertex_count(); ++v) out << "vertex " << g.vertex_id(v) << "\n";
  for (const Edge& e : g.edges())
    out << "edge " << e.id << ": " << g.vertex_id(e.src) << " -> " << g.vertex_id(e.dst)
        << "\n";
  return out.str();
}

std::string to_json_string(const DirectedMultigraph& g) {
  nlohmann::ordered_json j;
  j["vertices"] = nlohmann::json::array();
  for (int v = 0; v < g.vertex_count(); ++v) j["vertices"].push_back(g.vertex_id(v));
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges())
    j["edges"].push_back({{"id", e.id},
                          {"src", g.vertex_id(e.src)},
                          {"dst", g.vertex_id(e.dst)}});
  return j.dump();
}

std::vector<std::vector<int>> scc_decomposition(const DirectedMultigraph& g) {
  // Iterative Tarjan over the directed adjacency.
  int n = g.vertex_count();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int next = 0;

  struct Frame {
    int v;
    std::size_t ei;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.ei < g.out_edges(f.v).size()) {
        int w = g.edge(g.out_edges(f.v)[f.ei++]).dst;
        if (index[w] == -1) {
          index[w] = low[w] = next++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          std::vector<int> comp;
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
          } while (w != f.v);
          std::sort(comp.begin(), comp.end());
          comps.push_back(std::move(comp));
        }
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

std::vector<std::vector<int>> connected_components(const DirectedMultigraph& g) {
  int n = g.vertex_count();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < n; ++start) {
    if (comp[start] != -1) continue;
    int c = static_cast<int>(out.size());
    std::vector<int> members, todo{start};
    comp[start] = c;
    while (!todo.empty()) {
      int v = todo.back();
      todo.pop_back();
      members.push_back(v);
      auto visit = [&](int u) {
        if (comp[u] == -1) {
          comp[u] = c;
          todo.push_back(u);
        }
      };
      for (int e : g.out_edges(v)) visit(g.edge(e).dst);
      for (int e : g.in_edges(v)) visit(g.edge(e).src);
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

std::vector<std::vector<bool>> reachability(const DirectedMultigraph& g) {
  int n = g.vertex_count();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int s = 0; s < n; ++s) {
    std::vector<int> todo{s};
    reach[s][s] = true;
    while (!todo.empty()) {
      int v = todo.back();
      todo.pop_back();
      for (int e : g.out_edges(v)) {
        int w = g.edge(e).dst;
        if (!reach[s][w]) {
          reach[s][w] = true;
          todo.push_back(w);
        }
      }
    }
  }
  return reach;
}

namespace {

// Enumerates polygons: loops, parallel/antiparallel pairs, then simple
// undirected cycles of length >= 3 rooted at their smallest vertex.
void enumerate_polygons(const DirectedMultigraph& g, const Budgets& budgets,
                        const std::function<void(const Polygon&)>& emit) {
  std::size_t steps = 0;
  auto tick = [&] {
    if (++steps > budgets.polygons) throw budget_error("enumeration budget exceeded");
  };

  for (int e = 0; e < g.edge_count(); ++e) {
    tick();
    if (g.edge(e).src == g.edge(e).dst) {
      Polygon p;
      p.vertices = {g.edge(e).src};
      p.edges = {e};
      p.directed_circle = true;  // a loop is a directed 1-circle
      emit(p);
    }
  }
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& a = g.edge(e);
    if (a.src == a.dst) continue;
    for (int f = e + 1; f < g.edge_count(); ++f) {
      tick();
      const Edge& b = g.edge(f);
      if (b.src == b.dst) continue;
      bool same_pair = (a.src == b.src && a.dst == b.dst) ||
                       (a.src == b.dst && a.dst == b.src);
      if (!same_pair) continue;
      Polygon p;
      p.vertices = {std::min(a.src, a.dst), std::max(a.src, a.dst)};
      p.edges = {e, f};
      p.directed_circle = (a.src == b.dst && a.dst == b.src);
      emit(p);
    }
  }

  // Length >= 3: DFS from each root over vertices larger than the root.
  int n = g.vertex_count();
  std::vector<bool> used(n, false);
  std::vector<int> vpath, epath;
  std::function<void(int, int)> dfs = [&](int root, int v) {
    auto step = [&](int e, int to) {
      tick();
      if (to == root && vpath.size() >= 3) {
        // Dedupe the two traversal directions.
        if (vpath[1] < vpath.back()) {
          Polygon p;
          p.vertices = vpath;
          p.edges = epath;
          p.edges.push_back(e);
          bool fwd = true, bwd = true;
          int len = static_cast<int>(p.vertices.size());
          for (int j = 0; j < len; ++j) {
            const Edge& ed = g.edge(p.edges[j]);
            int vj = p.vertices[j], vj1 = p.vertices[(j + 1) % len];
            if (!(ed.src == vj && ed.dst == vj1)) fwd = false;
            if (!(ed.src == vj1 && ed.dst == vj)) bwd = false;
          }
          p.directed_circle = fwd || bwd;
          emit(p);
        }
        return;
      }
      if (to <= root || used[to]) return;
      used[to] = true;
      vpath.push_back(to);
      epath.push_back(e);
      dfs(root, to);
      epath.pop_back();
      vpath.pop_back();
      used[to] = false;
    };
    for (int e : g.out_edges(v))
      if (g.edge(e).dst != v) step(e, g.edge(e).dst);
    for (int e : g.in_edges(v))
      if (g.edge(e).src != v) step(e, g.edge(e).src);
  };
  for (int root = 0; root < n; ++root) {
    used[root] = true;
    vpath = {root};
    epath.clear();
    dfs(root, root);
    used[root] = false;
  }
}

}  // namespace

StructureProbes structure_probes(const DirectedMultigraph& g, const Budgets& budgets) {
  StructureProbes out;
  auto reach = reachability(g);
  for (int e = 0; e < g.edge_count(); ++e)
    if (!reach[g.edge(e).dst][g.edge(e).src]) out.acyclic_edges.push_back(e);

  if (g.vertex_count() > budgets.polygon_vertex_limit) {
    out.polygon_budget_hit = true;
    return out;
  }
  try {
    enumerate_polygons(g, budgets, [&](const Polygon& p) {
      ++out.polygon_count;
      if (!p.directed_circle && !out.fake_circle) out.fake_circle = p;
    });
  } catch (const budget_error&) {
    out.polygon_budget_hit = true;
  }
  return out;
}

bool is_tree(const DirectedMultigraph& g) {
  if (g.vertex_count() < 2) return false;
  if (g.edge_count() != g.vertex_count() - 1) return false;
  if (connected_components(g).size() != 1) return false;
  for (const Edge& e : g.edges())
    if (e.src == e.dst) return false;
  return true;  // connected with |E| = |V|-1 and no loop has no polygon
}

std::optional<long> alternating_number(const DirectedMultigraph& g,
                                       const Budgets& budgets) {
  // DFS over lines (simple undirected paths, distinct vertices, distinct
  // edges). Every line is reached from one of its endpoints.
  int n = g.vertex_count();
  long best = 0;
  std::size_t steps = 0;
  std::vector<bool> used(n, false);
  std::vector<int> epath, vpath;

  // Alternating vertices of the current line: deg+ or deg- within the
  // line equals 2. Only interior vertices qualify; recompute locally.
  auto count_alternating = [&]() {
    long a = 0;
    for (std::size_t i = 1; i + 1 < vpath.size(); ++i) {
      const Edge& e1 = g.edge(epath[i - 1]);
      const Edge& e2 = g.edge(epath[i]);
      int v = vpath[i];
      int outd = (e1.src == v) + (e2.src == v);
      int ind = (e1.dst == v) + (e2.dst == v);
      if (outd == 2 || ind == 2) ++a;
    }
    return a;
  };

  std::function<bool(int)> dfs = [&](int v) -> bool {
    if (++steps > budgets.simple_paths) return false;
    if (!epath.empty()) best = std::max(best, count_alternating());
    auto step = [&](int e, int to) -> bool {
      if (used[to]) return true;
      used[to] = true;
      vpath.push_back(to);
      epath.push_back(e);
      bool ok = dfs(to);
      epath.pop_back();
      vpath.pop_back();
      used[to] = false;
      return ok;
    };
    for (int e : g.out_edges(v)) {
      if (g.edge(e).dst == v) continue;  // loops never lie on a line
      if (!step(e, g.edge(e).dst)) return false;
    }
    for (int e : g.in_edges(v)) {
      if (g.edge(e).src == v) continue;
      if (!step(e, g.edge(e).src)) return false;
    }
    return true;
  };

  for (int s = 0; s < n; ++s) {
    used[s] = true;
    vpath = {s};
    epath.clear();
    bool ok = dfs(s);
    used[s] = false;
    if (!ok) return std::nullopt;
  }
  return best;
}

DirectedMultigraph reduced_subgraph(const DirectedMultigraph& g,
                                    const std::vector<int>& F, int maxlen,
                                    bool* truncated, const Budgets& budgets) {
  if (maxlen < 1) throw std::invalid_argument("reduced_subgraph: maxlen < 1");
  std::vector<bool> in_F(g.vertex_count(), false);
  for (int v : F) {
    if (v < 0 || v >= g.vertex_count())
      throw std::invalid_argument("reduced_subgraph: vertex out of range");
    in_F[v] = true;
  }

  DirectedMultigraph out;
  std::vector<int> sorted_F = F;
  std::sort(sorted_F.begin(), sorted_F.end());
  for (int v : sorted_F) out.add_vertex(g.vertex_id(v));

  bool hit_extra = false;
  std::size_t count = 0;
  // Chronological walks from x in F through vertices outside F; the edge
  // word reads range-to-source, so the walk is collected reversed.
  struct Found {
    std::vector<int> word;
    int src, dst;
  };
  std::vector<Found> found;
  std::vector<int> walk;
  std::function<void(int, int)> dfs = [&](int x, int v) {
    if (static_cast<int>(walk.size()) >= maxlen + 1) return;
    for (int e : g.out_edges(v)) {
      int to = g.edge(e).dst;
      walk.push_back(e);
      if (in_F[to]) {
        if (static_cast<int>(walk.size()) <= maxlen) {
          if (++count > budgets.minimal_paths)
            throw budget_error("enumeration budget exceeded");
          Found f;
          f.word.assign(walk.rbegin(), walk.rend());
          f.src = x;
          f.dst = to;
          found.push_back(std::move(f));
        } else {
          hit_extra = true;
        }
      } else {
        dfs(x, to);
      }
      walk.pop_back();
    }
  };
  for (int x : sorted_F) {
    walk.clear();
    dfs(x, x);
  }

  std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
    if (a.word.size() != b.word.size()) return a.word.size() < b.word.size();
    return a.word < b.word;
  });
  for (const Found& f : found) {
    std::string id;
    for (std::size_t i = 0; i < f.word.size(); ++i) {
      if (i) id += '.';
      id += g.edge(f.word[i]).id;
    }
    out.add_edge(id, g.vertex_id(f.src), g.vertex_id(f.dst));
  }
  if (truncated) *truncated = hit_extra;
  return out;
}

DirectedMultigraph induced_subgraph(const DirectedMultigraph& g,
                                    const std::vector<int>& vertices) {
  DirectedMultigraph out;
  std::vector<int> sorted = vertices;
  std::sort(sorted.begin(), sorted.end());
  std::vector<bool> keep(g.vertex_count(), false);
  for (int v : sorted) {
    out.add_vertex(g.vertex_id(v));
    keep[v] = true;
  }
  for (const Edge& e : g.edges())
    if (keep[e.src] && keep[e.dst]) out.add_edge(e.id, g.vertex_id(e.src), g.vertex_id(e.dst));
  return out;
}

namespace {

bool is_strongly_connected(const DirectedMultigraph& g) {
  auto sccs = scc_decomposition(g);
  return sccs.size() == 1;
}

// Is the induced subgraph on comp an n-circle graph (n = |comp|)?
// Requires: comp is a strongly connected component with >= 1 internal edge.
bool component_is_circle(const DirectedMultigraph& g, const std::vector<int>& comp,
                         std::vector<int>* circle_vertices,
                         std::vector<int>* circle_edges) {
  std::set<int> members(comp.begin(), comp.end());
  std::vector<int> out_deg(g.vertex_count(), 0), in_deg(g.vertex_count(), 0);
  int internal_edges = 0;
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (members.count(ed.src) && members.count(ed.dst)) {
      ++internal_edges;
      ++out_deg[ed.src];
      ++in_deg[ed.dst];
    }
  }
  if (internal_edges != static_cast<int>(comp.size())) return false;
  for (int v : comp)
    if (out_deg[v] != 1 || in_deg[v] != 1) return false;
  // Walk the circle starting at the least vertex, following arrows
  // backward (from range to source) so that vertices are listed in the
  // paper's e_j order: r(e_j) = v_j, s(e_j) = v_{j+1}.
  if (circle_vertices) {
    circle_vertices->clear();
    circle_edges->clear();
    int start = comp.front();
    int v = start;
    do {
      circle_vertices->push_back(v);
      int edge_at_v = -1;
      for (int e : g.in_edges(v))
        if (members.count(g.edge(e).src)) edge_at_v = e;
      circle_edges->push_back(edge_at_v);
      v = g.edge(edge_at_v).src;
    } while (v != start);
  }
  return true;
}

int count_internal_edges(const DirectedMultigraph& g, const std::set<int>& members) {
  int k = 0;
  for (const Edge& e : g.edges())
    if (members.count(e.src) && members.count(e.dst)) ++k;
  return k;
}

}  // namespace

std::optional<FruitViolation> fruit_tree_property_check(const DirectedMultigraph& g,
                                                        const Budgets& budgets) {
  auto sccs = scc_decomposition(g);
  std::vector<int> comp_of(g.vertex_count());
  std::vector<bool> nontrivial(sccs.size(), false);
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    std::set<int> members(sccs[c].begin(), sccs[c].end());
    for (int v : sccs[c]) comp_of[v] = static_cast<int>(c);
    nontrivial[c] = count_internal_edges(g, members) > 0;
  }

  // (i) every nontrivial maximal SCC is an n-circle graph.
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    if (!nontrivial[c]) continue;
    if (!component_is_circle(g, sccs[c], nullptr, nullptr)) {
      FruitViolation v;
      v.property = 1;
      v.witness = "strongly connected component is neither a vertex graph nor a circle";
      v.witness_vertices = sccs[c];
      return v;
    }
  }
  // (ii) no edge between two nontrivial components.
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    int cs = comp_of[ed.src], cr = comp_of[ed.dst];
    if (cs != cr && nontrivial[cs] && nontrivial[cr]) {
      FruitViolation v;
      v.property = 2;
      v.witness = "edge " + ed.id + " joins two nontrivial components";
      v.witness_edges = {e};
      return v;
    }
  }
  // (iii) exactly one edge between each nontrivial component and the rest.
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    if (!nontrivial[c]) continue;
    std::vector<int> boundary;
    for (int e = 0; e < g.edge_count(); ++e) {
      const Edge& ed = g.edge(e);
      bool s_in = comp_of[ed.src] == static_cast<int>(c);
      bool r_in = comp_of[ed.dst] == static_cast<int>(c);
      if (s_in != r_in) boundary.push_back(e);
    }
    if (boundary.size() != 1) {
      FruitViolation v;
      v.property = 3;
      v.witness = std::to_string(boundary.size()) +
                  " edges meet the nontrivial component at " +
                  g.vertex_id(sccs[c].front());
      v.witness_edges = boundary;
      v.witness_vertices = sccs[c];
      return v;
    }
  }
  // (iv) no fake circle.
  StructureProbes probes = structure_probes(g, budgets);
  if (probes.polygon_budget_hit)
    throw budget_error("enumeration budget exceeded");
  if (probes.fake_circle) {
    FruitViolation v;
    v.property = 4;
    v.witness = "fake circle";
    v.witness_edges = probes.fake_circle->edges;
    v.witness_vertices = probes.fake_circle->vertices;
    return v;
  }
  return std::nullopt;
}

std::optional<FruitDecomposition> fruit_tree_decomposition(const DirectedMultigraph& g,
                                                           FruitViolation* violation) {
  auto fail = [&](FruitViolation v) -> std::optional<FruitDecomposition> {
    if (violation) *violation = std::move(v);
    return std::nullopt;
  };
  if (g.vertex_count() < 2)
    return fail({0, "fewer than two vertices", {}, {}});
  if (is_strongly_connected(g))
    return fail({0, "strongly connected", {}, {}});

  auto sccs = scc_decomposition(g);
  std::vector<int> comp_of(g.vertex_count());
  for (std::size_t c = 0; c < sccs.size(); ++c)
    for (int v : sccs[c]) comp_of[v] = static_cast<int>(c);

  FruitDecomposition dec;
  std::vector<bool> in_fruit(g.vertex_count(), false);
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    std::set<int> members(sccs[c].begin(), sccs[c].end());
    if (count_internal_edges(g, members) == 0) continue;

    Fruit fruit;
    if (!component_is_circle(g, sccs[c], &fruit.circle_vertices, &fruit.circle_edges))
      return fail({1, "non-circle strongly connected component", {}, sccs[c]});

    std::vector<int> boundary;
    for (int e = 0; e < g.edge_count(); ++e) {
      const Edge& ed = g.edge(e);
      bool s_in = members.count(ed.src) > 0, r_in = members.count(ed.dst) > 0;
      if (s_in && r_in) continue;
      if (s_in || r_in) {
        if ((s_in && in_fruit[ed.dst]) || (r_in && in_fruit[ed.src]))
          return fail({2, "edge " + ed.id + " joins two nontrivial components", {e}, {}});
        boundary.push_back(e);
      }
    }
    if (boundary.size() != 1)
      return fail({3,
                   std::to_string(boundary.size()) + " edges meet the nontrivial component",
                   boundary,
                   sccs[c]});
    const Edge& be = g.edge(boundary[0]);
    // Property (ii) when the far endpoint lies in another circle component.
    int far = members.count(be.src) ? be.dst : be.src;
    {
      std::set<int> far_members(sccs[comp_of[far]].begin(), sccs[comp_of[far]].end());
      if (count_internal_edges(g, far_members) > 0)
        return fail({2, "edge " + be.id + " joins two nontrivial components",
                     {boundary[0]}, {}});
    }
    fruit.trunk_edge = boundary[0];
    fruit.attach_vertex = members.count(be.src) ? be.src : be.dst;
    fruit.out_fruit = members.count(be.src) > 0;
    // Rotate the circle so the attachment vertex comes first; e_j stays
    // the in-edge at v_j.
    auto& cv = fruit.circle_vertices;
    auto it = std::find(cv.begin(), cv.end(), fruit.attach_vertex);
    auto shift = it - cv.begin();
    std::rotate(cv.begin(), cv.begin() + shift, cv.end());
    std::rotate(fruit.circle_edges.begin(), fruit.circle_edges.begin() + shift,
                fruit.circle_edges.end());
    for (int v : sccs[c]) in_fruit[v] = true;
    dec.fruits.push_back(std::move(fruit));
  }

  std::vector<int> trunk_only;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (!in_fruit[v]) trunk_only.push_back(v);
  if (trunk_only.empty())
    return fail({2, "no vertices outside the circle components", {}, {}});

  // The induced trunk must be a generalized tree once the attachment
  // leaves are glued back.
  DirectedMultigraph trunk_core = induced_subgraph(g, trunk_only);
  StructureProbes probes = structure_probes(trunk_core);
  if (probes.fake_circle) {
    FruitViolation v;
    v.property = 4;
    v.witness = "fake circle in the trunk";
    for (int e : probes.fake_circle->edges)
      v.witness_edges.push_back(*g.find_edge(trunk_core.edge(e).id));
    return fail(std::move(v));
  }
  if (probes.polygon_count > 0) {
    // A directed polygon in the trunk would be a second nontrivial SCC,
    // already consumed above.
    throw std::logic_error("fruit_tree_decomposition: unexpected trunk circle");
  }

  dec.trunk_vertices = trunk_only;
  for (const Fruit& f : dec.fruits) dec.trunk_vertices.push_back(f.attach_vertex);
  std::sort(dec.trunk_vertices.begin(), dec.trunk_vertices.end());
  std::set<int> fruit_edges;
  for (const Fruit& f : dec.fruits)
    for (int e : f.circle_edges) fruit_edges.insert(e);
  for (int e = 0; e < g.edge_count(); ++e)
    if (!fruit_edges.count(e)) dec.trunk_edges.push_back(e);

  // V != V_t: with a nonempty non-fruit trunk this holds; degenerate
  // two-vertex trunks with both vertices attachments were rejected above.
  if (dec.trunk_vertices.size() < 2)
    return fail({0, "trunk has fewer than two vertices", {}, {}});
  return dec;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::VertexGraph: return "VertexGraph";
    case Verdict::CircleGraph: return "CircleGraph";
    case Verdict::StronglyConnectedOther: return "StronglyConnectedOther";
    case Verdict::FruitTree: return "FruitTree";
    case Verdict::GeneralizedTreeOnly: return "GeneralizedTreeOnly";
    case Verdict::NotFruitTree: return "NotFruitTree";
  }
  return "?";
}

ComponentReport classify_component(const DirectedMultigraph& g, const Budgets& budgets) {
  ComponentReport rep;
  for (int v = 0; v < g.vertex_count(); ++v) rep.vertices.push_back(v);
  rep.probes = structure_probes(g, budgets);
  rep.alternating = alternating_number(g, budgets);

  if (is_strongly_connected(g)) {
    if (g.vertex_count() == 1 && g.edge_count() == 0) {
      rep.verdict = Verdict::VertexGraph;
    } else {
      std::vector<int> cv, ce;
      std::vector<int> all(g.vertex_count());
      for (int v = 0; v < g.vertex_count(); ++v) all[v] = v;
      if (component_is_circle(g, all, &cv, &ce)) {
        rep.verdict = Verdict::CircleGraph;
        rep.circle_n = g.vertex_count();
      } else {
        rep.verdict = Verdict::StronglyConnectedOther;
      }
    }
    return rep;
  }

  if (rep.probes.polygon_budget_hit) {
    rep.unknown_reason = "polygon enumeration budget exceeded";
    return rep;
  }

  FruitViolation cons_violation;
  auto dec = fruit_tree_decomposition(g, &cons_violation);
  auto prop_violation = fruit_tree_property_check(g, budgets);
  if (dec.has_value() == prop_violation.has_value())
    throw std::logic_error(
        "classify_component: property check and constructive decomposition disagree");
  if (dec) {
    rep.verdict = dec->fruits.empty() ? Verdict::GeneralizedTreeOnly : Verdict::FruitTree;
    rep.decomposition = std::move(dec);
  } else {
    rep.verdict = Verdict::NotFruitTree;
    rep.violation = std::move(prop_violation);
  }
  return rep;
}

ClassificationReport classify(const DirectedMultigraph& g, const Budgets& budgets) {
  ClassificationReport rep;
  for (const auto& comp : connected_components(g)) {
    DirectedMultigraph sub = induced_subgraph(g, comp);
    ComponentReport r = classify_component(sub, budgets);
    r.vertices = comp;  // report in the ambient graph's vertex indices
    if (r.decomposition) {
      auto remap_v = [&](int v) { return *g.find_vertex(sub.vertex_id(v)); };
      auto remap_e = [&](int e) { return *g.find_edge(sub.edge(e).id); };
      auto& d = *r.decomposition;
      for (auto& v : d.trunk_vertices) v = remap_v(v);
      for (auto& e : d.trunk_edges) e = remap_e(e);
      for (auto& f : d.fruits) {
        f.attach_vertex = remap_v(f.attach_vertex);
        f.trunk_edge = remap_e(f.trunk_edge);
        for (auto& v : f.circle_vertices) v = remap_v(v);
        for (auto& e : f.circle_edges) e = remap_e(e);
      }
    }
    rep.components.push_back(std::move(r));
  }
  return rep;
}

DirectedMultigraph make_circle(int n) {
  if (n < 1) throw std::invalid_argument("make_circle: n < 1");
  DirectedMultigraph g;
  for (int j = 1; j <= n; ++j) g.add_vertex("v" + std::to_string(j));
  for (int j = 1; j <= n; ++j) {
    int next = j % n + 1;  // s(e_j) = v_{j+1 mod n}, r(e_j) = v_j
    g.add_edge("e" + std::to_string(j), "v" + std::to_string(next),
               "v" + std::to_string(j));
  }
  return g;
}

DirectedMultigraph make_zigzag(int vertices) {
  if (vertices < 2) throw std::invalid_argument("make_zigzag: need >= 2 vertices");
  DirectedMultigraph g;
  for (int j = 1; j <= vertices; ++j) g.add_vertex("v" + std::to_string(j));
  for (int j = 1; j < vertices; ++j) {
    std::string a = "v" + std::to_string(j), b = "v" + std::to_string(j + 1);
    if (j % 2 == 1)
      g.add_edge("e" + std::to_string(j), b, a);  // v_{j+1} -> v_j
    else
      g.add_edge("e" + std::to_string(j), a, b);  // v_j -> v_{j+1}
  }
  return g;
}

DirectedMultigraph make_star_in_tree(int n) {
  if (n < 1) throw std::invalid_argument("make_star_in_tree: n < 1");
  DirectedMultigraph g;
  for (int j = 0; j <= n; ++j) g.add_vertex("v" + std::to_string(j));
  for (int j = 1; j <= n; ++j)
    g.add_edge("e" + std::to_string(j), "v" + std::to_string(j), "v0");
  return g;
}

DirectedMultigraph make_upper_triangle_tree(int n) {
  if (n < 2) throw std::invalid_argument("make_upper_triangle_tree: n < 2");
  DirectedMultigraph g;
  for (int j = 1; j <= n; ++j) g.add_vertex("v" + std::to_string(j));
  for (int j = 1; j < n; ++j)
    g.add_edge("e" + std::to_string(j), "v" + std::to_string(j + 1),
               "v" + std::to_string(j));
  return g;
}

DirectedMultigraph make_parallel_edges(int n) {
  if (n < 1) throw std::invalid_argument("make_parallel_edges: n < 1");
  DirectedMultigraph g;
  g.add_vertex("v1");
  g.add_vertex("v2");
  for (int j = 1; j <= n; ++j) g.add_edge("f" + std::to_string(j), "v2", "v1");
  return g;
}

DirectedMultigraph amalgamate(const DirectedMultigraph& trunk,
                              const std::vector<std::pair<std::string, int>>&
                                  fruits_at_leaves) {
  DirectedMultigraph g;
  for (int v = 0; v < trunk.vertex_count(); ++v) g.add_vertex(trunk.vertex_id(v));
  for (const Edge& e : trunk.edges())
    g.add_edge(e.id, trunk.vertex_id(e.src), trunk.vertex_id(e.dst));

  for (const auto& [leaf, n] : fruits_at_leaves) {
    auto lv = trunk.find_vertex(leaf);
    if (!lv) throw std::invalid_argument("amalgamate: no such vertex " + leaf);
    int degree = static_cast<int>(trunk.out_edges(*lv).size() + trunk.in_edges(*lv).size());
    if (degree != 1) throw std::invalid_argument("amalgamate: " + leaf + " is not a leaf");
    if (n < 1) throw std::invalid_argument("amalgamate: fruit size < 1");
    // circle vertices u_1 = leaf, u_2..u_n fresh; r(f_j) = u_j, s(f_j) = u_{j+1}
    std::vector<std::string> u{leaf};
    for (int j = 2; j <= n; ++j) {
      std::string id = leaf + "_c" + std::to_string(j);
      g.add_vertex(id);
      u.push_back(id);
    }
    for (int j = 1; j <= n; ++j)
      g.add_edge(leaf + "_f" + std::to_string(j), u[j % n], u[j - 1]);
  }
  return g;
}

}  // namespace fsg
