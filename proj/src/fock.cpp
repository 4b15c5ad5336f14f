#include "fsg/fock.hpp"

#include <algorithm>
#include <random>
#include <set>

#include <Eigen/SVD>

namespace fsg {

FockOperator::FockOperator(std::shared_ptr<const PathBasis> basis)
    : basis_(std::move(basis)), cols_(basis_->size()) {}

void FockOperator::finalize() {
  lo_shift_ = 0;
  hi_shift_ = 0;
  nnz_ = 0;
  bool first = true;
  for (int j = 0; j < dim(); ++j) {
    // Drop numeric zeros so grade ranges and sparsity stay meaningful.
    for (auto it = cols_[j].begin(); it != cols_[j].end();) {
      if (it->second == cplx(0.0, 0.0))
        it = cols_[j].erase(it);
      else
        ++it;
    }
    int in_len = basis_->path(j).length();
    for (const auto& [i, v] : cols_[j]) {
      int shift = basis_->path(i).length() - in_len;
      if (first) {
        lo_shift_ = hi_shift_ = shift;
        first = false;
      } else {
        lo_shift_ = std::min(lo_shift_, shift);
        hi_shift_ = std::max(hi_shift_, shift);
      }
      ++nnz_;
    }
  }
}

FockOperator FockOperator::zero(std::shared_ptr<const PathBasis> basis) {
  return FockOperator(std::move(basis));
}

FockOperator FockOperator::identity(std::shared_ptr<const PathBasis> basis) {
  FockOperator A(std::move(basis));
  for (int j = 0; j < A.dim(); ++j) A.cols_[j][j] = 1.0;
  A.finalize();
  return A;
}

FockOperator FockOperator::from_entries(std::shared_ptr<const PathBasis> basis,
                                        std::vector<std::map<int, cplx>> cols) {
  FockOperator A(std::move(basis));
  if (cols.size() != static_cast<std::size_t>(A.dim()))
    throw std::invalid_argument("from_entries: wrong column count");
  A.cols_ = std::move(cols);
  A.finalize();
  return A;
}

FockOperator FockOperator::left(std::shared_ptr<const PathBasis> basis, const Path& p) {
  FockOperator A(std::move(basis));
  const PathBasis& b = *A.basis_;
  if (!b.index_of(p)) throw std::invalid_argument("left: path not in basis");
  const DirectedMultigraph& g = b.graph();
  for (int j = 0; j < A.dim(); ++j) {
    const Path& w = b.path(j);
    if (w.rng != p.src) continue;
    if (w.length() + p.length() > b.depth()) continue;  // truncation
    auto pw = compose(g, p, w);
    auto idx = b.index_of(*pw);
    if (idx) A.cols_[j][*idx] = 1.0;
  }
  A.finalize();
  return A;
}

FockOperator FockOperator::right(std::shared_ptr<const PathBasis> basis, const Path& p) {
  FockOperator A(std::move(basis));
  const PathBasis& b = *A.basis_;
  if (!b.index_of(p)) throw std::invalid_argument("right: path not in basis");
  const DirectedMultigraph& g = b.graph();
  for (int j = 0; j < A.dim(); ++j) {
    const Path& w = b.path(j);
    if (w.src != p.rng) continue;
    if (w.length() + p.length() > b.depth()) continue;
    auto wp = compose(g, w, p);
    auto idx = b.index_of(*wp);
    if (idx) A.cols_[j][*idx] = 1.0;
  }
  A.finalize();
  return A;
}

FockOperator FockOperator::generator(std::shared_ptr<const PathBasis> basis, Gen kind,
                                     const Path& p) {
  switch (kind) {
    case Gen::Left: return left(std::move(basis), p);
    case Gen::Right: return right(std::move(basis), p);
    case Gen::VertexProj:
      if (!p.is_vertex()) throw std::invalid_argument("VertexProj needs a vertex");
      return left(std::move(basis), p);
  }
  throw std::logic_error("generator: bad kind");
}

cplx FockOperator::entry(int i, int j) const {
  auto it = cols_[j].find(i);
  return it == cols_[j].end() ? cplx(0.0) : it->second;
}

FockOperator FockOperator::multiply(const FockOperator& other) const {
  if (basis_ != other.basis_)
    throw std::invalid_argument("multiply: basis mismatch");
  FockOperator C(basis_);
  for (int j = 0; j < dim(); ++j) {
    auto& out = C.cols_[j];
    for (const auto& [k, bkj] : other.cols_[j])
      for (const auto& [i, aik] : cols_[k]) out[i] += aik * bkj;
  }
  C.finalize();
  return C;
}

FockOperator FockOperator::add(const FockOperator& other) const {
  if (basis_ != other.basis_) throw std::invalid_argument("add: basis mismatch");
  FockOperator C(basis_);
  C.cols_ = cols_;
  for (int j = 0; j < dim(); ++j)
    for (const auto& [i, v] : other.cols_[j]) C.cols_[j][i] += v;
  C.finalize();
  return C;
}

FockOperator FockOperator::sub(const FockOperator& other) const {
  return add(other.scale(-1.0));
}

FockOperator FockOperator::scale(cplx c) const {
  FockOperator C(basis_);
  if (c != cplx(0.0)) {
    C.cols_ = cols_;
    for (auto& col : C.cols_)
      for (auto& [i, v] : col) v *= c;
  }
  C.finalize();
  return C;
}

FockOperator FockOperator::adjoint() const {
  FockOperator C(basis_);
  for (int j = 0; j < dim(); ++j)
    for (const auto& [i, v] : cols_[j]) C.cols_[i][j] = std::conj(v);
  C.finalize();
  return C;
}

FockOperator FockOperator::pow(int k) const {
  if (k < 0) throw std::invalid_argument("pow: negative exponent");
  FockOperator R = identity(basis_);
  for (int i = 0; i < k; ++i) R = R.multiply(*this);
  return R;
}

FockOperator FockOperator::restrict_inputs(int max_input_len) const {
  FockOperator C(basis_);
  for (int j = 0; j < dim(); ++j)
    if (basis_->path(j).length() <= max_input_len) C.cols_[j] = cols_[j];
  C.finalize();
  return C;
}

double FockOperator::max_abs() const {
  double m = 0.0;
  for (const auto& col : cols_)
    for (const auto& [i, v] : col) m = std::max(m, std::abs(v));
  return m;
}

double FockOperator::max_abs_diff(const FockOperator& other) const {
  return sub(other).max_abs();
}

Eigen::MatrixXcd FockOperator::to_dense() const {
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim(), dim());
  for (int j = 0; j < dim(); ++j)
    for (const auto& [i, v] : cols_[j]) M(i, j) = v;
  return M;
}

Eigen::VectorXcd FockOperator::apply(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dim());
  for (int j = 0; j < dim(); ++j) {
    if (x[j] == cplx(0.0)) continue;
    for (const auto& [i, v] : cols_[j]) y[i] += v * x[j];
  }
  return y;
}

Eigen::VectorXcd FockOperator::apply_adjoint(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dim());
  for (int j = 0; j < dim(); ++j)
    for (const auto& [i, v] : cols_[j]) y[j] += std::conj(v) * x[i];
  return y;
}

double FockOperator::norm(int dense_limit) const {
  if (nnz_ == 0) return 0.0;
  if (dim() <= dense_limit) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_dense());
    return svd.singularValues()(0);
  }
  // Shifted power iteration on A*A with a fixed-seed start vector.
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXcd v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = cplx(unif(rng), unif(rng));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXcd w = apply_adjoint(apply(v));
    double next = w.norm();
    if (next == 0.0) return 0.0;
    w /= next;
    if (std::abs(next - lambda) < 1e-12 * std::max(1.0, next) && it > 4) {
      lambda = next;
      break;
    }
    lambda = next;
    v = w;
  }
  return std::sqrt(lambda);
}

FourierSeries FockOperator::fourier() const {
  FourierSeries s;
  const PathBasis& b = *basis_;
  for (int v = 0; v < b.graph().vertex_count(); ++v) {
    auto jv = b.index_of(Path::vertex(v));
    if (!jv) continue;
    for (const auto& [i, val] : cols_[*jv])
      if (b.path(i).src == v) s.coeffs[i] = val;
  }
  return s;
}

FockOperator FockOperator::reconstruct(std::shared_ptr<const PathBasis> basis,
                                       const FourierSeries& series) {
  FockOperator A = zero(basis);
  for (const auto& [i, a] : series.coeffs) {
    if (a == cplx(0.0)) continue;
    A = A.add(left(basis, basis->path(i)).scale(a));
  }
  return A;
}

FockOperator conditional_expectation(const FockOperator& A, const Path& w,
                                     ExpectationMode mode) {
  const auto& basis = A.basis();
  if (!w.is_circle() || !basis->index_of(w))
    throw std::invalid_argument("conditional_expectation: w must be a circle in basis");
  if (mode.limit) {
    FourierSeries s = A.fourier();
    FourierSeries kept;
    const DirectedMultigraph& g = basis->graph();
    for (const auto& [i, a] : s.coeffs)
      if (commutes_with(g, basis->path(i), w)) kept.coeffs[i] = a;
    return FockOperator::reconstruct(basis, kept);
  }
  if (mode.k < 1) throw std::invalid_argument("FiniteK: k < 1");
  if (mode.k * w.length() > basis->depth())
    throw std::invalid_argument("FiniteK: window violated (k*len(w) exceeds depth)");
  FockOperator Lwk = FockOperator::left(basis, w).pow(mode.k);
  return Lwk.adjoint().multiply(A).multiply(Lwk);
}

std::optional<std::pair<std::vector<int>, std::vector<int>>> circle_order(
    const DirectedMultigraph& g) {
  int n = g.vertex_count();
  if (g.edge_count() != n || n < 1) return std::nullopt;
  for (int v = 0; v < n; ++v)
    if (g.out_edges(v).size() != 1 || g.in_edges(v).size() != 1) return std::nullopt;
  std::vector<int> verts, edges;
  int start = 0, v = start;
  do {
    verts.push_back(v);
    int e = g.in_edges(v)[0];  // e_j with r(e_j) = v_j
    edges.push_back(e);
    v = g.edge(e).src;  // v_{j+1}
  } while (v != start && static_cast<int>(verts.size()) <= n);
  if (static_cast<int>(verts.size()) != n) return std::nullopt;
  return std::make_pair(verts, edges);
}

FockOperator dixmier_average_circle(const FockOperator& A) {
  const auto& basis = A.basis();
  auto circ = circle_order(basis->graph());
  if (!circ) throw std::invalid_argument("dixmier_average_circle: not a circle graph");
  const auto& edges = circ->second;
  int n = static_cast<int>(edges.size());
  if (n > 16) throw budget_error("dixmier_average_circle: n too large");
  const DirectedMultigraph& g = basis->graph();

  // W_{pi,i} = sum_j pi(j) L_{e_j e_{j+1} ... e_{j+i-1}}
  std::vector<std::vector<FockOperator>> shift(n + 1);
  for (int i = 1; i <= n; ++i) {
    shift[i].reserve(n);
    for (int j = 0; j < n; ++j) {
      std::vector<int> word;
      for (int t = 0; t < i; ++t) word.push_back(edges[(j + t) % n]);
      shift[i].push_back(FockOperator::left(basis, Path::word(g, word)));
    }
  }

  FockOperator total = FockOperator::zero(basis);
  for (int mask = 0; mask < (1 << n); ++mask) {
    for (int i = 1; i <= n; ++i) {
      FockOperator W = FockOperator::zero(basis);
      for (int j = 0; j < n; ++j) {
        double sign = (mask >> j) & 1 ? -1.0 : 1.0;
        W = W.add(shift[i][j].scale(sign));
      }
      total = total.add(W.adjoint().multiply(A).multiply(W));
    }
  }
  return total.scale(1.0 / (std::pow(2.0, n) * n));
}

DixmierFiniteReport dixmier_average_finite(const FockOperator& A, int k) {
  const auto& basis = A.basis();
  const DirectedMultigraph& g = basis->graph();
  if (scc_decomposition(g).size() != 1)
    throw std::invalid_argument("dixmier_average_finite: graph not strongly connected");
  if (circle_order(g))
    throw std::invalid_argument("dixmier_average_finite: circle graphs use Circle mode");
  int n = g.vertex_count();

  // Two lexicographically smallest minimal circles per vertex.
  std::vector<Path> c(n), d(n);
  for (int v = 0; v < n; ++v) {
    auto mins = minimal_circles_at(g, v, basis->depth());
    if (mins.size() < 2)
      throw std::invalid_argument("dixmier_average_finite: vertex " + g.vertex_id(v) +
                                  " lacks two distinct minimal circles");
    c[v] = mins[0];
    d[v] = mins[1];
  }
  // Exponents with strictly increasing m_j * len(c_j).
  std::vector<int> m(n, 1);
  int prev = 0;
  for (int j = 0; j < n; ++j) {
    m[j] = prev / c[j].length() + 1;
    prev = m[j] * c[j].length();
  }
  // Shortest path from `from` to `to` (s = from, r = to) with the
  // lexicographically least edge word. BFS extends words on the source
  // side, keeping one best path per reached source vertex.
  auto reach_path = [&](int from, int to) -> Path {
    if (from == to) return Path::vertex(from);
    std::vector<Path> frontier{Path::vertex(to)};
    std::set<int> seen{to};
    for (int len = 1; len <= g.vertex_count(); ++len) {
      std::vector<Path> next;
      for (const Path& p : frontier)
        for (int e : g.in_edges(p.src)) {
          std::vector<int> word = p.edges;
          word.push_back(e);
          next.push_back(Path::word(g, word));
        }
      std::sort(next.begin(), next.end());
      std::vector<Path> pruned;
      for (const Path& q : next) {
        if (q.src == from) return q;
        if (seen.insert(q.src).second) pruned.push_back(q);
      }
      frontier = std::move(pruned);
      if (frontier.empty()) break;
    }
    throw std::logic_error("dixmier_average_finite: no path in strongly connected graph");
  };

  DixmierFiniteReport rep{FockOperator::zero(basis), 0.0, 0.0, {}};
  FockOperator total = FockOperator::zero(basis);
  for (int i = 0; i < n; ++i) {
    FockOperator U = FockOperator::zero(basis);
    for (int j = 0; j < n; ++j) {
      int target = (j + i + 1) % n;  // v_{j + i (mod n)} with i = 1..n
      std::vector<int> word;
      for (int t = 0; t < m[j] * k; ++t)
        word.insert(word.end(), c[j].edges.begin(), c[j].edges.end());
      word.insert(word.end(), d[j].edges.begin(), d[j].edges.end());
      Path pj = reach_path(target, j);  // p_{j, j+i}: from v_{j+i} to v_j
      word.insert(word.end(), pj.edges.begin(), pj.edges.end());
      Path full = Path::word(g, word);
      if (full.length() > basis->depth())
        throw std::invalid_argument("dixmier_average_finite: isometry path exceeds depth");
      rep.isometry_paths.push_back(path_to_string(g, full));
      U = U.add(FockOperator::left(basis, full));
    }
    total = total.add(U.adjoint().multiply(A).multiply(U));
  }
  rep.averaged = total.scale(1.0 / n);

  FourierSeries fa = A.fourier();
  cplx mean = 0.0;
  for (int v = 0; v < n; ++v) {
    auto jv = basis->index_of(Path::vertex(v));
    auto it = fa.coeffs.find(*jv);
    if (it != fa.coeffs.end()) mean += it->second;
  }
  mean /= static_cast<double>(n);
  rep.mean = mean;
  FourierSeries favg = rep.averaged.fourier();
  double drift = 0.0;
  for (int v = 0; v < n; ++v) {
    auto jv = basis->index_of(Path::vertex(v));
    cplx coef = 0.0;
    auto it = favg.coeffs.find(*jv);
    if (it != favg.coeffs.end()) coef = it->second;
    drift = std::max(drift, std::abs(coef - mean));
  }
  rep.vertex_drift = drift;
  return rep;
}

CenterTestResult center_test(const FockOperator& A, double tolerance) {
  const auto& basis = A.basis();
  const DirectedMultigraph& g = basis->graph();
  int hi = std::max(A.hi_shift(), 0);
  CenterTestResult out;
  out.central = true;
  auto check = [&](const FockOperator& L, int raise) {
    int window = basis->depth() - hi - raise;
    if (window < 0)
      throw std::invalid_argument("center_test: no degree-safe window at this depth");
    FockOperator comm = A.multiply(L).sub(L.multiply(A)).restrict_inputs(window);
    double r = comm.norm();
    out.residual = std::max(out.residual, r);
    if (r > tolerance) out.central = false;
  };
  for (int v = 0; v < g.vertex_count(); ++v)
    check(FockOperator::left(basis, Path::vertex(v)), 0);
  for (int e = 0; e < g.edge_count(); ++e)
    check(FockOperator::left(basis, Path::word(g, {e})), 1);
  return out;
}

std::optional<std::vector<int>> out_tree_order(const DirectedMultigraph& g) {
  if (!is_tree(g)) return std::nullopt;
  int n = g.vertex_count();
  int root = -1;
  for (int v = 0; v < n; ++v) {
    if (g.in_edges(v).empty()) {
      if (root != -1) return std::nullopt;
      root = v;
    } else if (g.in_edges(v).size() != 1) {
      return std::nullopt;
    }
  }
  if (root == -1) return std::nullopt;
  // Depth from the root; order descendants before ancestors.
  std::vector<int> depth(n, -1);
  depth[root] = 0;
  std::vector<int> todo{root};
  while (!todo.empty()) {
    int v = todo.back();
    todo.pop_back();
    for (int e : g.out_edges(v)) {
      int w = g.edge(e).dst;
      if (depth[w] == -1) {
        depth[w] = depth[v] + 1;
        todo.push_back(w);
      }
    }
  }
  for (int v = 0; v < n; ++v)
    if (depth[v] == -1) return std::nullopt;
  std::vector<int> order(n);
  for (int v = 0; v < n; ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return depth[a] > depth[b]; });
  return order;
}

Eigen::MatrixXcd ut_embed(const FockOperator& A) {
  const auto& basis = A.basis();
  const DirectedMultigraph& g = basis->graph();
  auto order = out_tree_order(g);
  if (!order) throw std::invalid_argument("ut_embed: graph is not an out-tree");
  int n = g.vertex_count();
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[(*order)[i]] = i;

  // In a tree the connecting path between two vertices is unique, so the
  // Fourier coefficient at p lands at the matrix unit (pos[r(p)], pos[s(p)]).
  FourierSeries s = A.fourier();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [idx, a] : s.coeffs) {
    const Path& p = basis->path(idx);
    M(pos[p.rng], pos[p.src]) += a;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (M(i, j) != cplx(0.0)) throw std::logic_error("ut_embed: not upper triangular");
  return M;
}

}  // namespace fsg
