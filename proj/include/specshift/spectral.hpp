#ifndef SPECSHIFT_SPECTRAL_HPP
#define SPECSHIFT_SPECTRAL_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "specshift/dataset.hpp"
#include "specshift/graph.hpp"
#include "specshift/matrix.hpp"

namespace specshift {

/// Dense symmetric matrix; the constructor rejects asymmetry beyond 1e-12.
class SymMatrix {
 public:
  explicit SymMatrix(Matrix m);

  int order() const { return m_.rows; }
  double operator()(int r, int c) const { return m_(r, c); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

/// Sorted ascending multiset of reals treated as an empirical distribution
/// with uniform weights (eigenvalues or degrees).
struct SpectrumDistribution {
  std::vector<double> values;  // ascending

  int size() const { return static_cast<int>(values.size()); }
};

/// Polynomial spectral filter f(x) = c0 + c1 x + ... + ck x^k, k <= 8.
struct FilterCoefficients {
  std::vector<double> c;
};

/// Self-loop-augmented degree-normalized adjacency
/// T[i][j] = (A[i][j] + [i==j]) / sqrt((d_i + 1)(d_j + 1)).
SymMatrix normalized_adjacency(const Graph& g);

/// I - T, the self-loop-augmented normalized Laplacian variant.
SymMatrix normalized_laplacian(const Graph& g);

/// All eigenvalues of a symmetric matrix, ascending. Householder
/// tridiagonalization followed by implicit-shift QL; an off-diagonal entry
/// counts as negligible when below 1e-12 * (|d_i| + |d_{i+1}|). Throws
/// NumericError after 50 sweeps on one eigenvalue.
SpectrumDistribution symmetric_eigenvalues(const SymMatrix& m);

/// Eigendecomposition m = U diag(values) U^T with the same algorithm;
/// column j of U is the eigenvector for values[j].
struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // orthogonal, columns are eigenvectors
};
EigenDecomposition symmetric_eigendecomposition(const SymMatrix& m);

/// Exact 1-D Wasserstein-1 between empirical measures with uniform
/// weights: the integral of |F_a - F_b| over the merged sorted support.
/// No binning. Throws DataError on an empty input.
double wasserstein1(const SpectrumDistribution& a,
                    const SpectrumDistribution& b);

/// Sorted degree multiset of a graph.
SpectrumDistribution degree_distribution(const Graph& g);

enum class SpectrumSource { eigenvalues, degrees };

/// Pairwise W1 distances between per-graph distributions, graphs sorted
/// ascending by node count (ties by original index). Pair entries are
/// computed in parallel; output is deterministic.
struct DistanceMatrix {
  int n = 0;
  std::vector<double> values;  // row-major n x n, symmetric, zero diagonal
  std::vector<int> order;      // row i holds dataset index order[i]
  std::vector<int> sizes;      // node count of the graph in row i

  double operator()(int i, int j) const {
    return values[static_cast<std::size_t>(i) * n + j];
  }
};
DistanceMatrix spectrum_distance_matrix(const Dataset& d,
                                        SpectrumSource source);

/// The similar-size vs different-size shift statistic: for each graph the
/// k nearest graphs by |node count difference| (ties to the smaller
/// original index, self excluded) are its similar set; everything else is
/// different. relative_difference = (different - similar) / similar, and 0
/// when both averages are 0.
struct ShiftSummary {
  double avg_similar = 0.0;
  double avg_different = 0.0;
  double relative_difference = 0.0;
};
ShiftSummary similar_vs_different(const DistanceMatrix& m, int k = 20);

/// Formats a summary as `similar=<v> different=<v> relative=<v%>`.
std::string format_shift_summary(const ShiftSummary& s);

/// Applies the spectral filter through the eigendomain: U f(Lambda) U^T X.
/// Equals the Horner polynomial sum c_i T^i X; the property suite certifies
/// the identity.
Matrix spectral_filter_apply(const Graph& g, const FilterCoefficients& coeffs,
                             const Matrix& x);

/// Horner evaluation of sum c_i T^i X without eigendecomposition.
Matrix polynomial_filter_apply(const SymMatrix& t,
                               const FilterCoefficients& coeffs,
                               const Matrix& x);

/// CSV export: header row of `<dataset index>:<node count>` tokens in size
/// order, then n rows of distances at 17 significant digits.
void write_distance_csv(const DistanceMatrix& m,
                        const std::filesystem::path& path);
DistanceMatrix read_distance_csv(const std::filesystem::path& path);

/// Binary 8-bit PGM of the matrix, min-max normalized.
void write_distance_pgm(const DistanceMatrix& m,
                        const std::filesystem::path& path);

}  // namespace specshift

#endif
