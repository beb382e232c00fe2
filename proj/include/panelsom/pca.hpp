#ifndef PANELSOM_PCA_HPP
#define PANELSOM_PCA_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "panelsom/errors.hpp"
#include "panelsom/panel.hpp"

namespace panelsom {

struct PcaResult {
    std::vector<std::string> variables;
    std::vector<double> eigenvalues;  // descending, non-negative
    std::vector<double> loadings;     // variable-major [variable][component], columns orthonormal
    std::vector<double> scores;       // row-major [observation][component]
    std::vector<double> explained;    // cumulative variance fractions

    std::size_t n_components() const { return eigenvalues.size(); }
    double loading(std::size_t var, std::size_t comp) const {
        return loadings[var * n_components() + comp];
    }
};

namespace detail {

/// Pairwise-complete correlation matrix with a positive-semidefinite repair:
/// negative eigenvalues are clipped at zero and the diagonal renormalized.
inline Eigen::MatrixXd pairwise_correlation(const ObservationMatrix& m) {
    const std::size_t V = m.n_vars();
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(V),
                                                  static_cast<Eigen::Index>(V));
    for (std::size_t a = 0; a < V; ++a) {
        for (std::size_t b = a; b < V; ++b) {
            double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
            std::size_t n = 0;
            for (std::size_t r = 0; r < m.n_rows; ++r) {
                if (m.missing[r * V + a] || m.missing[r * V + b]) continue;
                const double x = m.values[r * V + a];
                const double y = m.values[r * V + b];
                sa += x; sb += y; saa += x * x; sbb += y * y; sab += x * y;
                ++n;
            }
            if (n < 2)
                throw ConfigError("pca: variables " + m.variables[a] + " and " + m.variables[b] +
                                  " share fewer than 2 complete observations");
            const double nn = static_cast<double>(n);
            const double cov = sab / nn - (sa / nn) * (sb / nn);
            const double va = saa / nn - (sa / nn) * (sa / nn);
            const double vb = sbb / nn - (sb / nn) * (sb / nn);
            double rho;
            if (a == b) {
                rho = 1.0;
            } else if (va <= 0.0 || vb <= 0.0) {
                rho = 0.0;
            } else {
                rho = cov / std::sqrt(va * vb);
                rho = std::clamp(rho, -1.0, 1.0);
            }
            R(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = rho;
            R(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = rho;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
    if (es.eigenvalues().minCoeff() < -1e-12) {
        Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
        R = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
        for (std::size_t i = 0; i < V; ++i) {
            const double d = R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
            if (d > 0.0) {
                const double s = 1.0 / std::sqrt(d);
                R.row(static_cast<Eigen::Index>(i)) *= s;
                R.col(static_cast<Eigen::Index>(i)) *= s;
            }
        }
    }
    return R;
}

} // namespace detail

/// Eigendecomposition of the (pairwise-complete) correlation matrix.
/// Components ordered by descending eigenvalue; each loading column's
/// largest-magnitude entry is made positive so results are comparable
/// across runs.
inline PcaResult correlation_pca(const ObservationMatrix& m) {
    const std::size_t V = m.n_vars();
    if (m.n_rows < 2 || V < 2) throw ConfigError("pca: need at least 2 rows and 2 variables");

    const Eigen::MatrixXd R = detail::pairwise_correlation(m);
    if (R.cwiseAbs().maxCoeff() == 0.0) throw ConfigError("pca: degenerate correlation matrix");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
    // Eigen returns ascending order; reverse.
    PcaResult res;
    res.variables = m.variables;
    res.eigenvalues.resize(V);
    res.loadings.resize(V * V);
    for (std::size_t c = 0; c < V; ++c) {
        const Eigen::Index src = static_cast<Eigen::Index>(V - 1 - c);
        res.eigenvalues[c] = std::max(es.eigenvalues()(src), 0.0);
        Eigen::VectorXd col = es.eigenvectors().col(src);
        Eigen::Index imax = 0;
        col.cwiseAbs().maxCoeff(&imax);
        if (col(imax) < 0.0) col = -col;
        for (std::size_t v = 0; v < V; ++v)
            res.loadings[v * V + c] = col(static_cast<Eigen::Index>(v));
    }

    double total = 0.0;
    for (double e : res.eigenvalues) total += e;
    if (!(total > 0.0)) throw ConfigError("pca: rank-0 input");
    res.explained.resize(V);
    double run = 0.0;
    for (std::size_t c = 0; c < V; ++c) {
        run += res.eigenvalues[c];
        res.explained[c] = run / total;
    }

    // Scores on the column-centered matrix, missing cells treated as centered-zero.
    std::vector<double> mean(V, 0.0);
    std::vector<std::size_t> cnt(V, 0);
    for (std::size_t r = 0; r < m.n_rows; ++r)
        for (std::size_t v = 0; v < V; ++v)
            if (!m.missing[r * V + v]) {
                mean[v] += m.values[r * V + v];
                ++cnt[v];
            }
    for (std::size_t v = 0; v < V; ++v)
        if (cnt[v]) mean[v] /= static_cast<double>(cnt[v]);
    res.scores.assign(m.n_rows * V, 0.0);
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        for (std::size_t c = 0; c < V; ++c) {
            double s = 0.0;
            for (std::size_t v = 0; v < V; ++v) {
                if (m.missing[r * V + v]) continue;
                s += (m.values[r * V + v] - mean[v]) * res.loadings[v * V + c];
            }
            res.scores[r * V + c] = s;
        }
    }
    return res;
}

/// Correlation-circle coordinates: loading * sqrt(eigenvalue) on each of the
/// two requested axes (1-based component indices).
inline std::vector<std::array<double, 2>> variable_projection(const PcaResult& res, int axis_a,
                                                              int axis_b) {
    const int C = static_cast<int>(res.n_components());
    if (axis_a < 1 || axis_a > C || axis_b < 1 || axis_b > C)
        throw ConfigError("pca projection: axis out of range");
    const std::size_t a = static_cast<std::size_t>(axis_a - 1);
    const std::size_t b = static_cast<std::size_t>(axis_b - 1);
    std::vector<std::array<double, 2>> out(res.variables.size());
    for (std::size_t v = 0; v < res.variables.size(); ++v) {
        out[v] = {res.loading(v, a) * std::sqrt(res.eigenvalues[a]),
                  res.loading(v, b) * std::sqrt(res.eigenvalues[b])};
    }
    return out;
}

} // namespace panelsom

#endif
