#ifndef FSG_COHOMOLOGY_HPP
#define FSG_COHOMOLOGY_HPP

#include "fsg/derivation.hpp"

namespace fsg {

struct DegreeEntry {
  long dim_der = 0;
  long dim_inn = 0;
  long dim_h1 = 0;
  bool truncated = false;  // minimal-circle enumeration hit its cap
};

struct GradedWitness {
  int degree = 0;
  DerivationSpec spec;
};

struct GradedOptions {
  int minimal_circle_cap = 24;   // length cap for corner generators
  std::size_t path_cap = 200000;  // per-degree unknown enumeration cap
  bool with_witnesses = false;
  int threads = 1;
};

struct GradedH1Report {
  int max_degree = 0;
  std::vector<DegreeEntry> degrees;  // 0..K
  bool truncated = false;
  std::vector<GradedWitness> witnesses;
};

// Exact per-degree dimensions of Der/Inn/H1 after corner normalization
// (vanishing on vertex projections and on every minimal-circle generator);
// integer matrices, fraction-free ranks.
GradedH1Report graded_h1(const DirectedMultigraph& g, int max_degree,
                         const GradedOptions& opts = {});

enum class H1Verdict { Trivial, Nontrivial, Unknown };

struct ComponentH1 {
  std::vector<int> vertices;
  H1Verdict verdict = H1Verdict::Unknown;
  std::string reason;
  std::optional<FruitViolation> violation;
  // Ready-made non-inner derivation exhibiting the obstruction.
  std::optional<DerivationSpec> witness;
};

struct H1Result {
  H1Verdict combined = H1Verdict::Trivial;
  std::vector<ComponentH1> components;
};

// Trivial iff every connected component is strongly connected or a fruit
// tree; Nontrivial carries the violated property and an adversarial spec.
H1Result h1_verdict(const DirectedMultigraph& g, const Budgets& budgets = {},
                    int witness_depth = 6);

struct ComponentSplit {
  std::vector<std::vector<int>> components;       // ambient vertex indices
  std::vector<DirectedMultigraph> subgraphs;      // induced, ids preserved
};

// Verdicts AND across components; graded dimensions add.
ComponentSplit decompose_by_components(const DirectedMultigraph& g);

}  // namespace fsg

#endif
