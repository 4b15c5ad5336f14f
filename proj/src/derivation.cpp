#include "fsg/derivation.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include <Eigen/SVD>

namespace fsg {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the combined word
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

FockOperator DerivationSpec::vertex_value(int v) const {
  auto it = vertex_values.find(v);
  return it == vertex_values.end() ? FockOperator::zero(basis) : it->second;
}

FockOperator DerivationSpec::edge_value(int e) const {
  auto it = edge_values.find(e);
  return it == edge_values.end() ? FockOperator::zero(basis) : it->second;
}

bool DerivationSpec::vertex_vanishing(double tol) const {
  for (const auto& [v, val] : vertex_values)
    if (val.max_abs() > tol) return false;
  return true;
}

int DerivationSpec::max_value_support() const {
  int m = 0;
  auto scan = [&](const FockOperator& val) {
    for (const auto& [i, a] : val.fourier().coeffs)
      if (a != cplx(0.0)) m = std::max(m, basis->path(i).length());
  };
  for (const auto& [v, val] : vertex_values) scan(val);
  for (const auto& [e, val] : edge_values) scan(val);
  return m;
}

void DerivationSpec::validate(double tol) const {
  const DirectedMultigraph& g = basis->graph();
  for (const auto& [e, val] : edge_values) {
    const Edge& ed = g.edge(e);
    for (const auto& [i, a] : val.fourier().coeffs) {
      if (a == cplx(0.0)) continue;
      const Path& p = basis->path(i);
      if (p.rng != ed.dst || p.src != ed.src)
        throw std::invalid_argument("edge value for " + ed.id + " leaves its corner");
      if (p.is_vertex())
        throw std::invalid_argument("edge value for " + ed.id +
                                    " has a vertex (degree -1) term");
      if (grade && p.length() != 1 + *grade)
        throw std::invalid_argument("edge value for " + ed.id + " breaks the grade tag");
    }
    // Values must be honest algebra elements over the window.
    if (FockOperator::reconstruct(basis, val.fourier()).max_abs_diff(val) > tol)
      throw std::invalid_argument("edge value for " + ed.id +
                                  " is not a left Fourier polynomial");
  }
  // Vertex values must satisfy the idempotent identities
  // delta(v) = delta(v)v + v delta(v) and 0 = delta(u)v + u delta(v).
  for (int v = 0; v < g.vertex_count(); ++v) {
    FockOperator dv = vertex_value(v);
    FockOperator Lv = FockOperator::left(basis, Path::vertex(v));
    if (dv.multiply(Lv).add(Lv.multiply(dv)).max_abs_diff(dv) > tol)
      throw std::invalid_argument("vertex value at " + g.vertex_id(v) +
                                  " violates the idempotent identity");
    for (int u = 0; u < g.vertex_count(); ++u) {
      if (u == v) continue;
      FockOperator du = vertex_value(u);
      FockOperator Lu = FockOperator::left(basis, Path::vertex(u));
      if (du.multiply(Lv).add(Lu.multiply(dv)).max_abs() > tol)
        throw std::invalid_argument("vertex values at " + g.vertex_id(u) + "," +
                                    g.vertex_id(v) + " violate orthogonality");
    }
  }
}

FockOperator extend(const DerivationSpec& spec, const FourierSeries& series) {
  const PathBasis& b = *spec.basis;
  const DirectedMultigraph& g = b.graph();
  int vmax = spec.max_value_support();
  FockOperator out = FockOperator::zero(spec.basis);
  for (const auto& [idx, a] : series.coeffs) {
    if (a == cplx(0.0)) continue;
    const Path& p = b.path(idx);
    if (p.is_vertex()) {
      out = out.add(spec.vertex_value(p.base).scale(a));
      continue;
    }
    int n = p.length();
    if (n - 1 + vmax > b.depth())
      throw budget_error("extend: Leibniz term exceeds the basis depth");
    for (int j = 0; j < n; ++j) {
      auto it = spec.edge_values.find(p.edges[j]);
      if (it == spec.edge_values.end()) continue;
      FockOperator term = it->second;
      if (j + 1 < n) {
        std::vector<int> suffix(p.edges.begin() + j + 1, p.edges.end());
        term = term.multiply(FockOperator::left(spec.basis, Path::word(g, suffix)));
      }
      if (j > 0) {
        std::vector<int> prefix(p.edges.begin(), p.edges.begin() + j);
        term = FockOperator::left(spec.basis, Path::word(g, prefix)).multiply(term);
      }
      out = out.add(term.scale(a));
    }
  }
  return out;
}

FockOperator extend(const DerivationSpec& spec, const FockOperator& A) {
  return extend(spec, A.fourier());
}

std::pair<DerivationSpec, FockOperator> normalize_vertices(const DerivationSpec& spec) {
  const DirectedMultigraph& g = spec.basis->graph();
  FockOperator T0 = FockOperator::zero(spec.basis);
  for (int v = 0; v < g.vertex_count(); ++v) {
    FockOperator Lv = FockOperator::left(spec.basis, Path::vertex(v));
    T0 = T0.add(Lv.multiply(spec.vertex_value(v)));
  }
  DerivationSpec out;
  out.basis = spec.basis;
  out.grade = spec.grade;
  auto delta_T0 = [&](const FockOperator& L) { return L.multiply(T0).sub(T0.multiply(L)); };
  for (int v = 0; v < g.vertex_count(); ++v) {
    FockOperator Lv = FockOperator::left(spec.basis, Path::vertex(v));
    FockOperator rem = spec.vertex_value(v).sub(delta_T0(Lv));
    if (rem.max_abs() > 1e-9)
      throw std::invalid_argument("normalize_vertices: vertex values are inconsistent");
  }
  for (int e = 0; e < g.edge_count(); ++e) {
    FockOperator Le = FockOperator::left(spec.basis, Path::word(g, {e}));
    FockOperator val = spec.edge_value(e).sub(delta_T0(Le));
    if (!val.is_zero()) out.edge_values.emplace(e, std::move(val));
  }
  out.grade.reset();  // the correction can mix degrees
  if (spec.grade && T0.is_zero()) out.grade = spec.grade;
  return {std::move(out), std::move(T0)};
}

namespace {

// Corner-diagonal unknowns: circle paths (vertices included) up to
// depth-1, in basis order.
std::vector<int> circle_unknowns(const PathBasis& b) {
  std::vector<int> out;
  int cap = b.depth() - 1;
  for (int i = 0; i < static_cast<int>(b.size()); ++i) {
    const Path& p = b.path(i);
    if (p.length() > cap) break;
    if (p.is_circle()) out.push_back(i);
  }
  return out;
}

struct AssembledSystem {
  std::vector<int> unknowns;              // basis indices
  std::map<int, int> unknown_pos;         // basis index -> column
  std::vector<std::pair<int, int>> rows;  // (edge, target basis index)
  std::vector<std::map<int, double>> coeffs;  // row -> col -> +-1
  std::vector<cplx> rhs;
};

AssembledSystem assemble_inner_system(const DerivationSpec& spec) {
  const PathBasis& b = *spec.basis;
  const DirectedMultigraph& g = b.graph();
  AssembledSystem sys;
  sys.unknowns = circle_unknowns(b);
  for (int c = 0; c < static_cast<int>(sys.unknowns.size()); ++c)
    sys.unknown_pos[sys.unknowns[c]] = c;

  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    Path pe = Path::word(g, {e});
    std::map<int, std::map<int, double>> rows_for_edge;  // target -> coeffs
    for (int c = 0; c < static_cast<int>(sys.unknowns.size()); ++c) {
      const Path& q = b.path(sys.unknowns[c]);
      if (q.rng == ed.src) {  // L_e L_q term: target e.q
        auto p = compose(g, pe, q);
        if (auto idx = b.index_of(*p)) rows_for_edge[*idx][c] += 1.0;
      }
      if (q.src == ed.dst) {  // -(L_q L_e): target q.e
        auto p = compose(g, q, pe);
        if (auto idx = b.index_of(*p)) rows_for_edge[*idx][c] -= 1.0;
      }
    }
    FourierSeries val = spec.edge_value(e).fourier();
    for (const auto& [idx, a] : val.coeffs)
      if (a != cplx(0.0)) rows_for_edge[idx];  // ensure the row exists
    for (auto& [idx, row] : rows_for_edge) {
      sys.rows.emplace_back(e, idx);
      sys.coeffs.push_back(std::move(row));
      auto it = val.coeffs.find(idx);
      sys.rhs.push_back(it == val.coeffs.end() ? cplx(0.0) : it->second);
    }
  }
  return sys;
}

}  // namespace

SolveResult solve_inner(const DerivationSpec& spec, double tol) {
  if (!spec.vertex_vanishing(1e-14))
    throw std::invalid_argument("solve_inner: spec must be vertex-vanishing");
  const auto& basis = spec.basis;
  const PathBasis& b = *basis;
  const DirectedMultigraph& g = b.graph();

  AssembledSystem sys = assemble_inner_system(spec);
  int m = static_cast<int>(sys.rows.size());
  int n = static_cast<int>(sys.unknowns.size());
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(std::max(m, 1), n);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(std::max(m, 1));
  for (int r = 0; r < m; ++r) {
    for (const auto& [c, v] : sys.coeffs[r]) M(r, c) = v;
    rhs[r] = sys.rhs[r];
  }
  Eigen::VectorXcd x =
      m == 0 ? Eigen::VectorXcd::Zero(n)
             : Eigen::VectorXcd(M.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                                    .solve(rhs));

  FourierSeries ts;
  for (int c = 0; c < n; ++c)
    if (x[c] != cplx(0.0)) ts.coeffs[sys.unknowns[c]] = x[c];
  FockOperator T = FockOperator::reconstruct(basis, ts);

  // Residual per edge: the coefficient mismatch as an algebra element.
  double worst = 0.0;
  int worst_edge = -1;
  std::map<int, FourierSeries> mismatch;
  for (int r = 0; r < m; ++r) {
    cplx lhs = 0.0;
    for (const auto& [c, v] : sys.coeffs[r]) lhs += v * x[c];
    cplx diff = sys.rhs[r] - lhs;
    if (diff != cplx(0.0)) mismatch[sys.rows[r].first].coeffs[sys.rows[r].second] = diff;
  }
  for (auto& [e, series] : mismatch) {
    double res = FockOperator::reconstruct(basis, series).norm();
    if (res > worst) {
      worst = res;
      worst_edge = e;
    }
  }
  if (worst > tol) return NotInner{worst_edge, worst};

  InnerSolution sol{std::move(T), worst, {}, {}};

  // Center basis: per connected component the component identity; for
  // circle components also sum_i L_{c_i^j} up to the unknown cap.
  auto comps = connected_components(g);
  int cap = b.depth() - 1;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    FourierSeries s;
    for (int v : comps[c]) s.coeffs[*b.index_of(Path::vertex(v))] = 1.0;
    sol.center_basis.push_back(FockOperator::reconstruct(basis, s));
    sol.center_components.push_back(comps[c]);

    DirectedMultigraph sub = induced_subgraph(g, comps[c]);
    auto circ = circle_order(sub);
    if (!circ) continue;
    int nc = static_cast<int>(circ->second.size());
    for (int j = 1; j * nc <= cap; ++j) {
      FourierSeries zs;
      for (int i = 0; i < nc; ++i) {
        std::vector<int> word;
        for (int t = 0; t < j; ++t)
          for (int u = 0; u < nc; ++u) {
            int sub_edge = circ->second[(i + u) % nc];
            word.push_back(*g.find_edge(sub.edge(sub_edge).id));
          }
        zs.coeffs[*b.index_of(Path::word(g, word))] = 1.0;
      }
      sol.center_basis.push_back(FockOperator::reconstruct(basis, zs));
      sol.center_components.push_back(comps[c]);
    }
  }
  return sol;
}

namespace {

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol, double* arg) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, bnd = hi;
  double c = bnd - phi * (bnd - a), d = a + phi * (bnd - a);
  double fc = f(c), fd = f(d);
  while (bnd - a > tol) {
    if (fc <= fd) {
      bnd = d;
      d = c;
      fd = fc;
      c = bnd - phi * (bnd - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (bnd - a);
      fd = f(d);
    }
  }
  *arg = (a + bnd) / 2;
  return f(*arg);
}

// Exact-ish 1-D minimization with the interval-midpoint tie-break.
double line_min(const std::function<double(double)>& f, double radius, double* arg) {
  double t0;
  double fmin = golden_min(f, -radius, radius, 1e-11, &t0);
  // widen to the flat interval, if any
  auto edge_of = [&](double dir) {
    double lo = t0, hi = t0 + dir * radius;
    for (int it = 0; it < 200; ++it) {
      double mid = (lo + hi) / 2;
      if (f(mid) <= fmin + 1e-13)
        lo = mid;
      else
        hi = mid;
      if (std::abs(hi - lo) < 1e-12) break;
    }
    return lo;
  };
  double left = edge_of(-1.0), right = edge_of(1.0);
  *arg = (left + right) / 2;
  return f(*arg);
}

}  // namespace

MinNormResult minimal_inner_norm(const InnerSolution& sol) {
  const auto& basis = sol.implementer.basis();
  int k = static_cast<int>(sol.center_basis.size());
  MinNormResult out;
  out.lambda.assign(k, 0.0);
  if (k == 0) {
    out.min_norm = sol.implementer.norm();
    return out;
  }

  // Blocks over distinct components are independent; minimize per
  // component and take the max.
  std::map<std::vector<int>, std::vector<int>> groups;  // component -> center ids
  for (int i = 0; i < k; ++i) groups[sol.center_components[i]].push_back(i);

  double total = 0.0;
  for (const auto& [comp, ids] : groups) {
    // Restrict T to the component's paths.
    std::set<int> members(comp.begin(), comp.end());
    std::vector<std::map<int, cplx>> cols(basis->size());
    for (int j = 0; j < static_cast<int>(basis->size()); ++j) {
      if (!members.count(basis->path(j).src)) continue;
      for (const auto& [i, v] : sol.implementer.column(j)) cols[j][i] = v;
    }
    FockOperator Tc = FockOperator::from_entries(basis, std::move(cols));
    double radius = 2.0 * Tc.norm() + 1.0;

    std::vector<cplx> lam(ids.size(), 0.0);
    auto value = [&]() {
      FockOperator R = Tc;
      for (std::size_t i = 0; i < ids.size(); ++i)
        if (lam[i] != cplx(0.0)) R = R.sub(sol.center_basis[ids[i]].scale(lam[i]));
      return R.norm();
    };
    double best = value();
    for (int sweep = 0; sweep < 60; ++sweep) {
      double before = best;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        for (int part = 0; part < 2; ++part) {
          double t;
          auto f = [&](double tt) {
            cplx save = lam[i];
            lam[i] = part == 0 ? cplx(tt, save.imag()) : cplx(save.real(), tt);
            double v = value();
            lam[i] = save;
            return v;
          };
          double base = part == 0 ? lam[i].real() : lam[i].imag();
          double fv = line_min([&](double tt) { return f(base + tt); }, radius, &t);
          if (fv < best - 1e-15) {
            best = fv;
            lam[i] = part == 0 ? cplx(base + t, lam[i].imag()) : cplx(lam[i].real(), base + t);
          }
        }
      }
      if (before - best < 1e-13) break;
    }
    for (std::size_t i = 0; i < ids.size(); ++i) out.lambda[ids[i]] = lam[i];
    total = std::max(total, best);
  }
  out.min_norm = total;
  return out;
}

NormBounds derivation_norm_bounds(const DerivationSpec& spec, int budget,
                                  std::uint64_t seed) {
  const auto& basis = spec.basis;
  const PathBasis& b = *basis;
  const DirectedMultigraph& g = b.graph();
  int vmax = spec.max_value_support();
  int window = b.depth() - std::max(vmax - 1, 0);  // inputs whose image stays in depth

  NormBounds out;
  auto consider = [&](const FourierSeries& s) {
    bool any = false;
    for (const auto& [i, a] : s.coeffs)
      if (a != cplx(0.0)) any = true;
    if (!any) return 0.0;
    FockOperator A = FockOperator::reconstruct(basis, s);
    double na = A.norm();
    if (na < 1e-14) return 0.0;
    double nd = extend(spec, s).norm();
    double ratio = nd / na;
    if (ratio > out.lower) {
      out.lower = ratio;
      out.best_witness = s;
    }
    return ratio;
  };

  // Generators and the tight two-term corner witnesses.
  for (int e = 0; e < g.edge_count(); ++e) {
    Path pe = Path::word(g, {e});
    FourierSeries s;
    s.coeffs[*b.index_of(pe)] = 1.0;
    consider(s);
    // a L_{s(e)} + b L_e with a = -conj(t), b = conj(s) where
    // delta(L_e) = s L_e + ..., delta(L_{s(e)}) = -t L_e + ...
    cplx sc = 0.0, tc = 0.0;
    auto fe = spec.edge_value(e).fourier();
    if (auto it = fe.coeffs.find(*b.index_of(pe)); it != fe.coeffs.end()) sc = it->second;
    auto fv = spec.vertex_value(g.edge(e).src).fourier();
    if (auto it = fv.coeffs.find(*b.index_of(pe)); it != fv.coeffs.end())
      tc = -it->second;
    if (sc != cplx(0.0) || tc != cplx(0.0)) {
      FourierSeries s2;
      s2.coeffs[*b.index_of(Path::vertex(g.edge(e).src))] = -std::conj(tc);
      s2.coeffs[*b.index_of(pe)] = std::conj(sc);
      consider(s2);
    }
  }

  // Seeded random polynomials plus hill-climb refinement.
  std::mt19937_64 rng(mix_seed(seed, 0));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, std::max(0, b.length_offset(window + 1) - 1));
  FourierSeries best = out.best_witness;
  for (int trial = 0; trial < budget; ++trial) {
    FourierSeries s;
    int terms = 1 + static_cast<int>(rng() % 6);
    for (int t = 0; t < terms; ++t)
      s.coeffs[pick(rng)] += cplx(unif(rng), unif(rng));
    consider(s);
  }
  if (!out.best_witness.coeffs.empty()) {
    FourierSeries s = out.best_witness;
    for (int it = 0; it < budget; ++it) {
      FourierSeries cand = s;
      int idx = pick(rng);
      cand.coeffs[idx] += 0.3 * cplx(unif(rng), unif(rng));
      double before = out.lower;
      if (consider(cand) >= before) s = out.best_witness;
    }
  }

  // Crude upper estimate: triangle bound over generator values. Labeled
  // an estimate; never used on the favorable side of an inequality.
  double est = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) est += spec.edge_value(e).norm();
  for (int v = 0; v < g.vertex_count(); ++v) est += spec.vertex_value(v).norm();
  out.estimate = std::max(out.lower, est);
  return out;
}

AlternatingAdversary adversary_alternating(const DirectedMultigraph& g, int m, int depth) {
  if (!is_tree(g)) throw std::invalid_argument("adversary_alternating: not a tree");
  // Find a line whose alternating vertices, in order, start with an
  // out-type vertex and number at least 2m. Try both traversal
  // directions of every enumerated line.
  struct Line {
    std::vector<int> verts;
    std::vector<int> edges;
  };
  std::optional<Line> found;
  std::vector<int> vpath, epath;
  std::vector<bool> used(g.vertex_count(), false);

  auto alternating_of = [&](const Line& L) {
    std::vector<std::pair<int, bool>> alts;  // (position, out-type)
    for (std::size_t i = 1; i + 1 < L.verts.size(); ++i) {
      const Edge& e1 = g.edge(L.edges[i - 1]);
      const Edge& e2 = g.edge(L.edges[i]);
      int v = L.verts[i];
      int outd = (e1.src == v) + (e2.src == v);
      int ind = (e1.dst == v) + (e2.dst == v);
      if (outd == 2)
        alts.emplace_back(static_cast<int>(i), true);
      else if (ind == 2)
        alts.emplace_back(static_cast<int>(i), false);
    }
    return alts;
  };

  std::function<void(int)> dfs = [&](int v) {
    if (found) return;
    if (vpath.size() >= 2) {
      Line L{vpath, epath};
      for (int dir = 0; dir < 2 && !found; ++dir) {
        auto alts = alternating_of(L);
        // scan for 2m alternating vertices starting at an out-type
        for (std::size_t s = 0; s + 2 * m <= alts.size(); ++s) {
          if (!alts[s].second) continue;
          bool ok = true;
          for (int j = 0; j < 2 * m; ++j)
            if (alts[s + j].second != (j % 2 == 0)) ok = false;
          if (ok) {
            Line picked = L;
            found = picked;
            // trim bookkeeping happens below via alts positions
          }
          if (found) break;
        }
        std::reverse(L.verts.begin(), L.verts.end());
        std::reverse(L.edges.begin(), L.edges.end());
      }
    }
    if (found) return;
    auto step = [&](int e, int to) {
      if (used[to] || found) return;
      used[to] = true;
      vpath.push_back(to);
      epath.push_back(e);
      dfs(to);
      epath.pop_back();
      vpath.pop_back();
      used[to] = false;
    };
    for (int e : g.out_edges(v)) step(e, g.edge(e).dst);
    for (int e : g.in_edges(v)) step(e, g.edge(e).src);
  };
  for (int s = 0; s < g.vertex_count() && !found; ++s) {
    used[s] = true;
    vpath = {s};
    epath.clear();
    dfs(s);
    used[s] = false;
  }
  if (!found)
    throw std::invalid_argument("adversary_alternating: alternating number below 2m");

  // Recompute the chosen block on the found line (both directions again).
  for (int dir = 0; dir < 2; ++dir) {
    auto alts = alternating_of(*found);
    for (std::size_t s = 0; s + 2 * m <= alts.size(); ++s) {
      bool ok = alts[s].second;
      for (int j = 0; ok && j < 2 * m; ++j)
        if (alts[s + j].second != (j % 2 == 0)) ok = false;
      if (!ok) continue;
      AlternatingAdversary out;
      out.spec.basis = PathBasis::make(g, depth);
      for (int j = 0; j < 2 * m; ++j)
        out.alternating_vertices.push_back(found->verts[alts[s + j].first]);
      for (int j = 0; j < 2 * m; j += 2) {
        int e = found->edges[alts[s + j].first];  // edge between v_k and v_{k+1}
        out.marked_edges.push_back(e);
        out.spec.edge_values.emplace(
            e, FockOperator::left(out.spec.basis, Path::word(g, {e})));
      }
      out.spec.grade = 0;
      return out;
    }
    std::reverse(found->verts.begin(), found->verts.end());
    std::reverse(found->edges.begin(), found->edges.end());
  }
  throw std::logic_error("adversary_alternating: lost the chosen line");
}

DerivationSpec adversary_acyclic_edge(std::shared_ptr<const PathBasis> basis, int e0,
                                      const Path& w1, const Path& w2) {
  const DirectedMultigraph& g = basis->graph();
  const Edge& ed = g.edge(e0);
  auto reach = reachability(g);
  if (reach[ed.dst][ed.src])
    throw std::invalid_argument("adversary_acyclic_edge: edge is not acyclic");
  if (!(w1.is_circle() && w1.rng == ed.dst))
    throw std::invalid_argument("adversary_acyclic_edge: w1 must be a circle at r(e0)");
  if (!(w2.is_circle() && w2.rng == ed.src))
    throw std::invalid_argument("adversary_acyclic_edge: w2 must be a circle at s(e0)");
  auto p = compose(g, w1, Path::word(g, {e0}));
  p = compose(g, *p, w2);
  if (!basis->index_of(*p))
    throw std::invalid_argument("adversary_acyclic_edge: w1 e0 w2 exceeds the depth");
  DerivationSpec spec;
  spec.basis = basis;
  spec.edge_values.emplace(e0, FockOperator::left(basis, *p));
  return spec;
}

DerivationSpec adversary_in_fruit(std::shared_ptr<const PathBasis> basis,
                                  const Fruit& fruit, const std::vector<cplx>& f_coeffs) {
  if (fruit.out_fruit)
    throw std::invalid_argument("adversary_in_fruit: fruit is an out-fruit");
  const DirectedMultigraph& g = basis->graph();
  // Minimal circle at the attachment vertex: the whole fruit circle.
  std::vector<int> word = fruit.circle_edges;
  Path w = Path::word(g, word);
  Path e = Path::word(g, {fruit.trunk_edge});
  FourierSeries val;
  for (std::size_t d = 0; d < f_coeffs.size(); ++d) {
    if (f_coeffs[d] == cplx(0.0)) continue;
    Path term = e;
    for (std::size_t t = 0; t < d; ++t) term = *compose(g, w, term);
    auto idx = basis->index_of(term);
    if (!idx) throw std::invalid_argument("adversary_in_fruit: f degree exceeds depth");
    val.coeffs[*idx] = f_coeffs[d];
  }
  DerivationSpec spec;
  spec.basis = basis;
  spec.edge_values.emplace(fruit.trunk_edge,
                           FockOperator::reconstruct(basis, val));
  return spec;
}

namespace {

Rational rational_from_double(double x) {
  if (x == 0.0) return 0;
  int exp;
  double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
  long long num = static_cast<long long>(std::ldexp(mant, 53));
  int e2 = exp - 53;
  Rational r(num);
  if (e2 > 0)
    r *= Rational(boost::multiprecision::pow(boost::multiprecision::cpp_int(2), e2));
  else if (e2 < 0)
    r /= Rational(boost::multiprecision::pow(boost::multiprecision::cpp_int(2), -e2));
  return r;
}

}  // namespace

ExactSolve solve_inner_exact(const DerivationSpec& spec) {
  if (!spec.vertex_vanishing(0.0))
    throw std::invalid_argument("solve_inner_exact: spec must be vertex-vanishing");
  AssembledSystem sys = assemble_inner_system(spec);
  int m = static_cast<int>(sys.rows.size());
  int n = static_cast<int>(sys.unknowns.size());
  std::vector<std::vector<Rational>> M(m, std::vector<Rational>(n + 1, 0));
  for (int r = 0; r < m; ++r) {
    for (const auto& [c, v] : sys.coeffs[r]) M[r][c] = rational_from_double(v);
    if (sys.rhs[r].imag() != 0.0)
      throw std::invalid_argument("solve_inner_exact: complex values unsupported");
    M[r][n] = rational_from_double(sys.rhs[r].real());
  }
  // Gaussian elimination, first nonzero pivot per column.
  std::vector<int> pivot_of_row;
  int row = 0;
  for (int col = 0; col < n && row < m; ++col) {
    int pr = -1;
    for (int r = row; r < m; ++r)
      if (M[r][col] != 0) {
        pr = r;
        break;
      }
    if (pr == -1) continue;
    std::swap(M[row], M[pr]);
    Rational inv = M[row][col];
    for (int c = col; c <= n; ++c) M[row][c] /= inv;
    for (int r = 0; r < m; ++r) {
      if (r == row || M[r][col] == 0) continue;
      Rational f = M[r][col];
      for (int c = col; c <= n; ++c) M[r][c] -= f * M[row][c];
    }
    pivot_of_row.push_back(col);
    ++row;
  }
  ExactSolve out;
  for (int r = row; r < m; ++r)
    if (M[r][n] != 0) {
      out.consistent = false;
      out.witness_edge = sys.rows[r].first;
      return out;
    }
  // Particular solution with free unknowns zero.
  std::vector<Rational> x(n, 0);
  for (int r = 0; r < row; ++r) x[pivot_of_row[r]] = M[r][n];
  for (int c = 0; c < n; ++c)
    if (x[c] != 0) out.coefficients[sys.unknowns[c]] = x[c];
  return out;
}

std::optional<int> in_tree_root(const DirectedMultigraph& g) {
  if (!is_tree(g)) return std::nullopt;
  int root = -1;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.out_edges(v).empty()) {
      if (root != -1) return std::nullopt;
      root = v;
    } else if (g.out_edges(v).size() != 1) {
      return std::nullopt;
    }
  }
  if (root == -1) return std::nullopt;
  return root;
}

ProbeReport conjecture_probe(const DirectedMultigraph& g, int trials, std::uint64_t seed) {
  if (!in_tree_root(g))
    throw std::invalid_argument("conjecture_probe: graph is not an in-tree");
  int depth = 0;
  {
    // longest path length in a tree is bounded by |V|-1
    depth = g.vertex_count() - 1;
  }
  auto basis = PathBasis::make(g, std::max(depth, 2));
  ProbeReport rep;
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(mix_seed(seed, trial));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    // Random implementer draw T = sum s_v L_v + sum t_e L_e.
    FourierSeries ts;
    for (int v = 0; v < g.vertex_count(); ++v)
      ts.coeffs[*basis->index_of(Path::vertex(v))] = unif(rng);
    for (int e = 0; e < g.edge_count(); ++e)
      ts.coeffs[*basis->index_of(Path::word(g, {e}))] = unif(rng);
    FockOperator T = FockOperator::reconstruct(basis, ts);

    DerivationSpec spec;
    spec.basis = basis;
    auto delta_T = [&](const FockOperator& L) { return L.multiply(T).sub(T.multiply(L)); };
    for (int v = 0; v < g.vertex_count(); ++v) {
      FockOperator val = delta_T(FockOperator::left(basis, Path::vertex(v)));
      if (!val.is_zero()) spec.vertex_values.emplace(v, std::move(val));
    }
    for (int e = 0; e < g.edge_count(); ++e) {
      FockOperator val = delta_T(FockOperator::left(basis, Path::word(g, {e})));
      if (!val.is_zero()) spec.edge_values.emplace(e, std::move(val));
    }

    NormBounds bounds = derivation_norm_bounds(spec, 60, mix_seed(seed, trial) ^ 0xabcd);
    auto [vspec, T0] = normalize_vertices(spec);
    auto solved = solve_inner(vspec, 1e-8);
    if (!std::holds_alternative<InnerSolution>(solved))
      throw std::logic_error("conjecture_probe: tree derivation failed to solve");
    InnerSolution sol = std::get<InnerSolution>(solved);
    sol.implementer = sol.implementer.add(T0);
    MinNormResult mn = minimal_inner_norm(sol);

    ProbeTrial t;
    t.min_norm = mn.min_norm;
    t.lower = bounds.lower;
    t.estimate = bounds.estimate;
    t.ratio_vs_lower = bounds.lower > 1e-14 ? mn.min_norm / bounds.lower : 0.0;
    t.ratio_vs_estimate = bounds.estimate > 1e-14 ? mn.min_norm / bounds.estimate : 0.0;
    rep.sup_ratio_vs_lower = std::max(rep.sup_ratio_vs_lower, t.ratio_vs_lower);
    rep.sup_ratio_vs_estimate = std::max(rep.sup_ratio_vs_estimate, t.ratio_vs_estimate);
    rep.trials.push_back(t);
  }
  return rep;
}

}  // namespace fsg
