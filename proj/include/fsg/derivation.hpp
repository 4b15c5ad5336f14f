#ifndef FSG_DERIVATION_HPP
#define FSG_DERIVATION_HPP

#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

#include "fsg/fock.hpp"

namespace fsg {

using Rational = boost::multiprecision::cpp_rational;

// A derivation given by its values on vertex projections and edge
// generators; extended everywhere else by the Leibniz rule. Edge values
// live in the corner L_{r(e)} . L_{s(e)}, with no vertex-path terms
// (degree -1 components are excluded; they generate unbounded
// derivations).
struct DerivationSpec {
  std::shared_ptr<const PathBasis> basis;
  std::map<int, FockOperator> vertex_values;  // vertex index -> value
  std::map<int, FockOperator> edge_values;    // edge index -> value
  std::optional<int> grade;                   // homogeneous degree, if any

  FockOperator vertex_value(int v) const;
  FockOperator edge_value(int e) const;
  bool vertex_vanishing(double tol = 0.0) const;
  // Corner membership, grade support, and vertex-product consistency.
  void validate(double tol = 1e-12) const;
  int max_value_support() const;  // longest path in any value's support
};

// Leibniz extension to a Fourier polynomial in the window. Throws
// budget_error when a term would land past the basis depth.
FockOperator extend(const DerivationSpec& spec, const FourierSeries& series);
FockOperator extend(const DerivationSpec& spec, const FockOperator& A);

// Subtract delta_{T0} with T0 = sum_v L_v delta(L_v); the result vanishes
// on every vertex projection.
std::pair<DerivationSpec, FockOperator> normalize_vertices(const DerivationSpec& spec);

struct InnerSolution {
  FockOperator implementer;  // particular corner-diagonal T
  double residual = 0.0;     // max_e ||delta(L_e) - delta_T(L_e)|| on the window
  std::vector<FockOperator> center_basis;
  std::vector<std::vector<int>> center_components;  // component index per element
};

struct NotInner {
  int witness_edge = -1;
  double residual = 0.0;
};

using SolveResult = std::variant<InnerSolution, NotInner>;

// Least-squares solve of delta(L_e) = L_e T - T L_e over corner-diagonal
// unknowns (circle paths up to depth-1). Exact for DAG graphs at full
// depth; tolerance applies to the residual verdict.
SolveResult solve_inner(const DerivationSpec& spec, double tol = 1e-9);

struct MinNormResult {
  std::vector<cplx> lambda;  // center coefficients, basis order
  double min_norm = 0.0;
};

// min ||T - Z|| over the center span; scalar centers are minimized
// exactly, interval ties resolve to the midpoint.
MinNormResult minimal_inner_norm(const InnerSolution& sol);

struct NormBounds {
  double lower = 0.0;     // certified: max ||delta(A)||/||A|| over witnesses
  double estimate = 0.0;  // labeled heuristic, never a certified bound
  FourierSeries best_witness;
};

NormBounds derivation_norm_bounds(const DerivationSpec& spec, int budget,
                                  std::uint64_t seed);

struct AlternatingAdversary {
  DerivationSpec spec;
  std::vector<int> alternating_vertices;  // v_{k_1}..v_{k_2m}, line order
  std::vector<int> marked_edges;          // the e_{k_{2j-1}}
};

// delta(L_e) = L_e on the odd-indexed alternating edges of a line with 2m
// alternating vertices; any implementer satisfies
// lambda_{k_1} - lambda_{k_2m} = m.
AlternatingAdversary adversary_alternating(const DirectedMultigraph& g, int m,
                                           int depth = 4);

// delta(L_{e0}) = L_{w1 e0 w2} for an acyclic edge e0; w1, w2 are circles
// at r(e0), s(e0) or those vertices themselves.
DerivationSpec adversary_acyclic_edge(std::shared_ptr<const PathBasis> basis, int e0,
                                      const Path& w1, const Path& w2);

// delta(L_{e_fruit}) = f(L_w) L_{e_fruit} on an in-fruit with minimal
// circle w; the solved implementer's fruit corner is forced to lambda - f
// beyond degree zero.
DerivationSpec adversary_in_fruit(std::shared_ptr<const PathBasis> basis,
                                  const Fruit& fruit,
                                  const std::vector<cplx>& f_coeffs);

// Exact rational corner-diagonal solve (free unknowns pinned to zero).
// Requires real rational spec values; intended for DAG-window-exact and
// forced-coefficient checks.
struct ExactSolve {
  bool consistent = true;
  int witness_edge = -1;                 // inconsistent equation, if any
  std::map<int, Rational> coefficients;  // unknown basis index -> value
};
ExactSolve solve_inner_exact(const DerivationSpec& spec);

// The range root of an in-tree (every vertex has a path to it).
std::optional<int> in_tree_root(const DirectedMultigraph& g);

struct ProbeTrial {
  double min_norm = 0.0;
  double lower = 0.0;     // certified ||delta|| lower bound
  double estimate = 0.0;  // heuristic upper estimate
  double ratio_vs_lower = 0.0;
  double ratio_vs_estimate = 0.0;
};

struct ProbeReport {
  std::vector<ProbeTrial> trials;
  double sup_ratio_vs_lower = 0.0;
  double sup_ratio_vs_estimate = 0.0;
};

// Random inner derivations on an in-tree; reports min-norm/norm-bound
// ratios without asserting any uncertified inequality.
ProbeReport conjecture_probe(const DirectedMultigraph& g, int trials,
                             std::uint64_t seed);

// Deterministic per-trial RNG stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace fsg

#endif
