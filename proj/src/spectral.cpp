#include "specshift/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "specshift/errors.hpp"
#include "specshift/parallel.hpp"

namespace specshift {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kOffDiagonalTolerance = 1e-12;
constexpr int kMaxSweeps = 50;

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// `a` is overwritten; with `want_vectors` it accumulates the orthogonal
/// transform. `d` receives the diagonal, `e` the subdiagonal (e[0] unused).
void householder_tridiagonalize(Matrix& a, std::vector<double>& d,
                                std::vector<double>& e, bool want_vectors) {
  const int n = a.rows;
  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          if (want_vectors) a(j, i) = a(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (int k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  if (want_vectors) d[0] = 0.0;
  e[0] = 0.0;

  for (int i = 0; i < n; ++i) {
    if (want_vectors) {
      const int l = i - 1;
      if (d[i] != 0.0) {
        for (int j = 0; j <= l; ++j) {
          double g = 0.0;
          for (int k = 0; k <= l; ++k) g += a(i, k) * a(k, j);
          for (int k = 0; k <= l; ++k) a(k, j) -= g * a(k, i);
        }
      }
      d[i] = a(i, i);
      a(i, i) = 1.0;
      for (int j = 0; j <= l; ++j) a(j, i) = a(i, j) = 0.0;
    } else {
      d[i] = a(i, i);
    }
  }
}

/// Implicit-shift QL sweeps on the tridiagonal (d, e). An off-diagonal
/// entry is treated as zero once |e[m]| <= 1e-12 (|d[m]| + |d[m+1]|);
/// more than 50 sweeps on one eigenvalue raises NumericError.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e,
                    Matrix* z) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return;
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kOffDiagonalTolerance * dd) break;
      }
      if (m != l) {
        if (iter++ == kMaxSweeps)
          throw NumericError("eigensolver failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          e[i + 1] = r = std::hypot(f, g);
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          d[i + 1] = g + (p = s * r);
          g = c * r - b;
          if (z) {
            for (int k = 0; k < n; ++k) {
              f = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
              (*z)(k, i) = c * (*z)(k, i) - s * f;
            }
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

void sort_eigensystem(std::vector<double>& d, Matrix* z) {
  const int n = static_cast<int>(d.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return d[a] < d[b]; });
  std::vector<double> sorted(n);
  for (int i = 0; i < n; ++i) sorted[i] = d[perm[i]];
  d = std::move(sorted);
  if (z) {
    Matrix v(n, n);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) v(r, c) = (*z)(r, perm[c]);
    *z = std::move(v);
  }
}

double evaluate_polynomial(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows != m_.cols) throw DataError("symmetric matrix must be square");
  for (int i = 0; i < m_.rows; ++i)
    for (int j = i + 1; j < m_.cols; ++j)
      if (std::abs(m_(i, j) - m_(j, i)) > kSymmetryTolerance)
        throw DataError("matrix is not symmetric within 1e-12");
}

SymMatrix normalized_adjacency(const Graph& g) {
  const int n = g.node_count();
  if (n == 0) throw DataError("empty graph");
  const std::vector<int> degree = degree_vector(g);
  std::vector<double> inv_sqrt(n);
  for (int i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(degree[i] + 1.0);

  Matrix t(n, n);
  for (int i = 0; i < n; ++i) t(i, i) = inv_sqrt[i] * inv_sqrt[i];
  for (const auto& [u, v] : g.edges())
    t(u, v) = t(v, u) = inv_sqrt[u] * inv_sqrt[v];
  return SymMatrix(std::move(t));
}

SymMatrix normalized_laplacian(const Graph& g) {
  Matrix t = normalized_adjacency(g).matrix();
  for (auto& x : t.data) x = -x;
  for (int i = 0; i < t.rows; ++i) t(i, i) += 1.0;
  return SymMatrix(std::move(t));
}

SpectrumDistribution symmetric_eigenvalues(const SymMatrix& m) {
  const int n = m.order();
  Matrix a = m.matrix();
  std::vector<double> d(n, 0.0), e(n, 0.0);
  householder_tridiagonalize(a, d, e, false);
  tridiagonal_ql(d, e, nullptr);
  std::sort(d.begin(), d.end());
  return SpectrumDistribution{std::move(d)};
}

EigenDecomposition symmetric_eigendecomposition(const SymMatrix& m) {
  const int n = m.order();
  Matrix a = m.matrix();
  std::vector<double> d(n, 0.0), e(n, 0.0);
  householder_tridiagonalize(a, d, e, true);
  tridiagonal_ql(d, e, &a);
  sort_eigensystem(d, &a);
  return EigenDecomposition{std::move(d), std::move(a)};
}

double wasserstein1(const SpectrumDistribution& a,
                    const SpectrumDistribution& b) {
  if (a.values.empty() || b.values.empty())
    throw DataError("empty distribution");
  const auto& av = a.values;
  const auto& bv = b.values;
  const double na = static_cast<double>(av.size());
  const double nb = static_cast<double>(bv.size());

  std::size_t i = 0, j = 0;
  double total = 0.0, prev = 0.0;
  bool started = false;
  while (i < av.size() || j < bv.size()) {
    const double x = (i < av.size() && (j >= bv.size() || av[i] <= bv[j]))
                         ? av[i]
                         : bv[j];
    if (started)
      total += std::abs(static_cast<double>(i) / na -
                        static_cast<double>(j) / nb) *
               (x - prev);
    while (i < av.size() && av[i] == x) ++i;
    while (j < bv.size() && bv[j] == x) ++j;
    prev = x;
    started = true;
  }
  return total;
}

SpectrumDistribution degree_distribution(const Graph& g) {
  const auto deg = degree_vector(g);
  std::vector<double> values(deg.begin(), deg.end());
  std::sort(values.begin(), values.end());
  return SpectrumDistribution{std::move(values)};
}

DistanceMatrix spectrum_distance_matrix(const Dataset& d,
                                        SpectrumSource source) {
  if (d.graphs.empty()) throw DataError("dataset is empty");
  const int n = d.size();

  DistanceMatrix out;
  out.n = n;
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    return d.graphs[a].node_count() < d.graphs[b].node_count();
  });
  out.sizes.resize(n);
  for (int i = 0; i < n; ++i)
    out.sizes[i] = d.graphs[out.order[i]].node_count();

  std::vector<SpectrumDistribution> dists(n);
  parallel_for(n, [&](std::int64_t i) {
    const Graph& g = d.graphs[out.order[i]];
    try {
      dists[i] = source == SpectrumSource::eigenvalues
                     ? symmetric_eigenvalues(normalized_adjacency(g))
                     : degree_distribution(g);
    } catch (const NumericError& err) {
      throw NumericError(std::string(err.what()) + " (graph " +
                         std::to_string(out.order[i]) + ")");
    }
  });

  out.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  parallel_for(n, [&](std::int64_t i) {
    for (int j = static_cast<int>(i) + 1; j < n; ++j) {
      const double w = wasserstein1(dists[i], dists[j]);
      out.values[i * n + j] = w;
      out.values[static_cast<std::size_t>(j) * n + i] = w;
    }
  });
  return out;
}

ShiftSummary similar_vs_different(const DistanceMatrix& m, int k) {
  if (k < 1) throw DataError("neighbor count must be positive");
  if (m.n <= k + 1)
    throw DataError("dataset too small for k-neighbor summary");

  double sum_similar = 0.0, sum_different = 0.0;
  std::int64_t count_similar = 0, count_different = 0;
  std::vector<int> candidates(m.n - 1);
  for (int i = 0; i < m.n; ++i) {
    int slot = 0;
    for (int j = 0; j < m.n; ++j)
      if (j != i) candidates[slot++] = j;
    std::partial_sort(candidates.begin(), candidates.begin() + k,
                      candidates.end(), [&](int a, int b) {
                        const int da = std::abs(m.sizes[a] - m.sizes[i]);
                        const int db = std::abs(m.sizes[b] - m.sizes[i]);
                        if (da != db) return da < db;
                        return m.order[a] < m.order[b];
                      });
    for (int s = 0; s < m.n - 1; ++s) {
      const double v = m(i, candidates[s]);
      if (s < k) {
        sum_similar += v;
        ++count_similar;
      } else {
        sum_different += v;
        ++count_different;
      }
    }
  }

  ShiftSummary out;
  out.avg_similar = sum_similar / static_cast<double>(count_similar);
  out.avg_different = sum_different / static_cast<double>(count_different);
  if (out.avg_similar == 0.0) {
    if (out.avg_different != 0.0) throw DataError("degenerate summary");
    out.relative_difference = 0.0;
  } else {
    out.relative_difference =
        (out.avg_different - out.avg_similar) / out.avg_similar;
  }
  return out;
}

std::string format_shift_summary(const ShiftSummary& s) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "similar=%.6g different=%.6g relative=%.6g%%",
                s.avg_similar, s.avg_different,
                s.relative_difference * 100.0);
  return buf;
}

Matrix polynomial_filter_apply(const SymMatrix& t,
                               const FilterCoefficients& coeffs,
                               const Matrix& x) {
  const int n = t.order();
  if (x.rows != n) throw DataError("feature row count must match graph size");
  if (coeffs.c.empty()) return Matrix(x.rows, x.cols, 0.0);

  // Horner: result = (...((c_k X) T-applied + c_{k-1} X)...) .
  Matrix result(x.rows, x.cols);
  for (std::size_t idx = 0; idx < x.data.size(); ++idx)
    result.data[idx] = coeffs.c.back() * x.data[idx];
  for (int deg = static_cast<int>(coeffs.c.size()) - 2; deg >= 0; --deg) {
    Matrix next(x.rows, x.cols, 0.0);
    for (int i = 0; i < n; ++i)
      for (int kk = 0; kk < n; ++kk) {
        const double tv = t(i, kk);
        if (tv == 0.0) continue;
        for (int c = 0; c < x.cols; ++c) next(i, c) += tv * result(kk, c);
      }
    for (std::size_t idx = 0; idx < x.data.size(); ++idx)
      next.data[idx] += coeffs.c[deg] * x.data[idx];
    result = std::move(next);
  }
  return result;
}

Matrix spectral_filter_apply(const Graph& g, const FilterCoefficients& coeffs,
                             const Matrix& x) {
  if (coeffs.c.size() > 9)
    throw DataError("filter degree must be at most 8");
  if (x.rows != g.node_count())
    throw DataError("feature row count must match graph size");
  const int n = g.node_count();
  const EigenDecomposition eig =
      symmetric_eigendecomposition(normalized_adjacency(g));

  // U f(Lambda) U^T X, evaluated as U * (f(Lambda) * (U^T X)).
  Matrix ut_x(n, x.cols, 0.0);
  for (int r = 0; r < n; ++r)
    for (int k = 0; k < n; ++k) {
      const double u = eig.vectors(k, r);  // column r of U, entry k
      for (int c = 0; c < x.cols; ++c) ut_x(r, c) += u * x(k, c);
    }
  for (int r = 0; r < n; ++r) {
    const double f = evaluate_polynomial(coeffs.c, eig.values[r]);
    for (int c = 0; c < x.cols; ++c) ut_x(r, c) *= f;
  }
  Matrix result(n, x.cols, 0.0);
  for (int k = 0; k < n; ++k)
    for (int r = 0; r < n; ++r) {
      const double u = eig.vectors(k, r);
      for (int c = 0; c < x.cols; ++c) result(k, c) += u * ut_x(r, c);
    }
  return result;
}

void write_distance_csv(const DistanceMatrix& m,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path.string());
  for (int i = 0; i < m.n; ++i)
    out << (i ? "," : "") << m.order[i] << ':' << m.sizes[i];
  out << '\n';
  char buf[64];
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

DistanceMatrix read_distance_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("dataset file missing: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw DataError("empty distance matrix file: " + path.string());

  DistanceMatrix m;
  std::stringstream header(line);
  std::string token;
  while (std::getline(header, token, ',')) {
    const auto colon = token.find(':');
    if (colon == std::string::npos)
      throw DataError("malformed distance matrix header token: " + token);
    m.order.push_back(std::stoi(token.substr(0, colon)));
    m.sizes.push_back(std::stoi(token.substr(colon + 1)));
  }
  m.n = static_cast<int>(m.order.size());
  m.values.reserve(static_cast<std::size_t>(m.n) * m.n);
  for (int i = 0; i < m.n; ++i) {
    if (!std::getline(in, line))
      throw DataError("distance matrix row count mismatch");
    std::stringstream row(line);
    int cols = 0;
    while (std::getline(row, token, ',')) {
      m.values.push_back(std::stod(token));
      ++cols;
    }
    if (cols != m.n) throw DataError("distance matrix column count mismatch");
  }
  return m;
}

void write_distance_pgm(const DistanceMatrix& m,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path.string());
  const auto [lo_it, hi_it] =
      std::minmax_element(m.values.begin(), m.values.end());
  const double lo = *lo_it, hi = *hi_it;
  const double span = hi > lo ? hi - lo : 1.0;
  out << "P5\n" << m.n << ' ' << m.n << "\n255\n";
  for (double v : m.values) {
    const int level =
        static_cast<int>(std::lround(255.0 * (v - lo) / span));
    out.put(static_cast<char>(std::clamp(level, 0, 255)));
  }
}

}  // namespace specshift
