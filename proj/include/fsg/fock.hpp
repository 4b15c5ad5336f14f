#ifndef FSG_FOCK_HPP
#define FSG_FOCK_HPP

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fsg/paths.hpp"

namespace fsg {

using cplx = std::complex<double>;

// Fourier coefficients a_p = <A xi_{s(p)}, xi_p>, keyed by basis index.
struct FourierSeries {
  std::map<int, cplx> coeffs;
};

enum class Gen { Left, Right, VertexProj };

// A sparse complex matrix over a PathBasis, representing an element of
// the depth-truncated free semigroupoid algebra. Entry (i, j) is
// <A xi_{p_j}, xi_{p_i}>. Immutable after construction.
class FockOperator {
 public:
  explicit FockOperator(std::shared_ptr<const PathBasis> basis);

  static FockOperator zero(std::shared_ptr<const PathBasis> basis);
  static FockOperator identity(std::shared_ptr<const PathBasis> basis);
  static FockOperator generator(std::shared_ptr<const PathBasis> basis, Gen kind,
                                const Path& p);
  // L_p (vertices give projections). Truncation drops outputs past depth.
  static FockOperator left(std::shared_ptr<const PathBasis> basis, const Path& p);
  static FockOperator right(std::shared_ptr<const PathBasis> basis, const Path& p);
  static FockOperator from_entries(std::shared_ptr<const PathBasis> basis,
                                   std::vector<std::map<int, cplx>> cols);

  const std::shared_ptr<const PathBasis>& basis() const { return basis_; }
  int dim() const { return static_cast<int>(cols_.size()); }
  const std::map<int, cplx>& column(int j) const { return cols_[j]; }
  cplx entry(int i, int j) const;

  // Degree-shift range over nonzero entries: len(out) - len(in).
  int lo_shift() const { return lo_shift_; }
  int hi_shift() const { return hi_shift_; }
  bool is_zero() const { return nnz_ == 0; }

  FockOperator multiply(const FockOperator& other) const;  // this * other
  FockOperator add(const FockOperator& other) const;
  FockOperator sub(const FockOperator& other) const;
  FockOperator scale(cplx c) const;
  FockOperator adjoint() const;
  FockOperator pow(int k) const;

  // Zero out columns whose input path is longer than max_input_len.
  FockOperator restrict_inputs(int max_input_len) const;

  double max_abs() const;
  double max_abs_diff(const FockOperator& other) const;

  // Largest singular value: dense SVD up to dense_limit, then shifted
  // power iteration; absolute accuracy ~1e-10.
  double norm(int dense_limit = 2000) const;

  Eigen::MatrixXcd to_dense() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& x) const;

  FourierSeries fourier() const;
  static FockOperator reconstruct(std::shared_ptr<const PathBasis> basis,
                                  const FourierSeries& series);

  friend FockOperator operator*(const FockOperator& a, const FockOperator& b) {
    return a.multiply(b);
  }
  friend FockOperator operator+(const FockOperator& a, const FockOperator& b) {
    return a.add(b);
  }
  friend FockOperator operator-(const FockOperator& a, const FockOperator& b) {
    return a.sub(b);
  }
  friend FockOperator operator*(cplx c, const FockOperator& a) { return a.scale(c); }

 private:
  void finalize();

  std::shared_ptr<const PathBasis> basis_;
  std::vector<std::map<int, cplx>> cols_;
  int lo_shift_ = 0, hi_shift_ = 0;
  std::size_t nnz_ = 0;
};

struct ExpectationMode {
  bool limit = true;
  int k = 0;
  static ExpectationMode Limit() { return {true, 0}; }
  static ExpectationMode FiniteK(int k) { return {false, k}; }
};

// E_w: FiniteK computes L_w^{*k} A L_w^k exactly; Limit keeps exactly the
// Fourier coefficients a_p with pw = wp.
FockOperator conditional_expectation(const FockOperator& A, const Path& w,
                                     ExpectationMode mode);

// The circle edge order (v_j, e_j with r(e_j) = v_j, s(e_j) = v_{j+1}),
// when the whole graph is an n-circle graph.
std::optional<std::pair<std::vector<int>, std::vector<int>>> circle_order(
    const DirectedMultigraph& g);

// Exact average over the 2^n * n sign-twisted shift isometries of an
// n-circle graph. Output Fourier support lies in the center basis.
FockOperator dixmier_average_circle(const FockOperator& A);

struct DixmierFiniteReport {
  FockOperator averaged;
  cplx mean;           // lambda_F(A), mean of vertex Fourier coefficients
  double vertex_drift;  // max_j |coef_j(averaged) - mean|
  std::vector<std::string> isometry_paths;
};

// Finite-k averaging over the partial isometries built from two distinct
// minimal circles per vertex (strongly connected, non-circle graphs).
DixmierFiniteReport dixmier_average_finite(const FockOperator& A, int k);

struct CenterTestResult {
  bool central = false;
  double residual = 0.0;
};

// Max commutator norm against every generator, evaluated on the
// degree-safe input window.
CenterTestResult center_test(const FockOperator& A, double tolerance);

// Position ordering for an out-tree: descendants before ancestors, source
// root last. nullopt if the graph is not an out-tree.
std::optional<std::vector<int>> out_tree_order(const DirectedMultigraph& g);

// The isometric embedding into the upper triangle algebra.
Eigen::MatrixXcd ut_embed(const FockOperator& A);

}  // namespace fsg

#endif
