#ifndef PANELSOM_MARKOV_HPP
#define PANELSOM_MARKOV_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "panelsom/csv.hpp"
#include "panelsom/errors.hpp"
#include "panelsom/rng.hpp"
#include "panelsom/trajectory.hpp"

namespace panelsom {

struct TransitionCounts {
    std::vector<std::string> labels;
    std::vector<long> counts;  // row-major
    bool include_self = true;

    long at(std::size_t i, std::size_t j) const { return counts[i * labels.size() + j]; }
    long total() const {
        long t = 0;
        for (long c : counts) t += c;
        return t;
    }
};

struct TransitionMatrix {
    std::vector<std::string> labels;
    std::vector<double> p;  // row-major

    double at(std::size_t i, std::size_t j) const { return p[i * labels.size() + j]; }
    std::size_t size() const { return labels.size(); }

    double max_row_sum_deviation() const {
        double dev = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < size(); ++j) s += at(i, j);
            dev = std::max(dev, std::abs(s - 1.0));
        }
        return dev;
    }
    bool row_stochastic(double tol = 1e-9) const { return max_row_sum_deviation() <= tol; }
};

struct Distribution {
    std::vector<std::string> labels;
    std::vector<double> p;
};

inline TransitionCounts count_transitions(const TrajectorySet& ts, bool include_self) {
    if (ts.T() < 2) throw ConfigError("transitions: trajectories must span at least 2 years");
    TransitionCounts c;
    c.labels = ts.alphabet;
    c.include_self = include_self;
    const std::size_t A = ts.alphabet.size();
    c.counts.assign(A * A, 0);
    for (std::size_t i = 0; i < ts.n(); ++i) {
        const auto seq = ts.sequence(i);
        for (std::size_t t = 0; t + 1 < ts.T(); ++t) {
            if (!include_self && seq[t] == seq[t + 1]) continue;
            ++c.counts[static_cast<std::size_t>(seq[t]) * A + static_cast<std::size_t>(seq[t + 1])];
        }
    }
    return c;
}

/// Off-diagonal fractions of the total number of changes.
inline TransitionMatrix change_frequencies(const TransitionCounts& c) {
    if (c.include_self)
        throw ConfigError("change_frequencies: counts must exclude self transitions");
    const long total = c.total();
    if (total == 0) throw DomainError("change_frequencies: no changes observed");
    TransitionMatrix f;
    f.labels = c.labels;
    f.p.resize(c.counts.size());
    for (std::size_t i = 0; i < c.counts.size(); ++i)
        f.p[i] = static_cast<double>(c.counts[i]) / static_cast<double>(total);
    return f;
}

/// Row-normalized counts. An all-zero row is kept as a self-loop and a
/// warning is recorded instead of failing.
inline TransitionMatrix transition_matrix(const TransitionCounts& c,
                                          std::vector<std::string>* warnings = nullptr) {
    const std::size_t A = c.labels.size();
    TransitionMatrix m;
    m.labels = c.labels;
    m.p.assign(A * A, 0.0);
    for (std::size_t i = 0; i < A; ++i) {
        long row = 0;
        for (std::size_t j = 0; j < A; ++j) row += c.at(i, j);
        if (row == 0) {
            m.p[i * A + i] = 1.0;
            if (warnings)
                warnings->push_back("transition_matrix: no transitions out of state " +
                                    c.labels[i] + "; kept as self-loop");
            continue;
        }
        for (std::size_t j = 0; j < A; ++j)
            m.p[i * A + j] = static_cast<double>(c.at(i, j)) / static_cast<double>(row);
    }
    return m;
}

/// True iff the digraph of strictly positive entries is strongly connected.
inline bool is_irreducible(const TransitionMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return false;
    auto reach_all = [&](bool transpose) {
        std::vector<std::uint8_t> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                const double w = transpose ? m.at(v, u) : m.at(u, v);
                if (w > 0.0 && !seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        for (auto s : seen)
            if (!s) return false;
        return true;
    };
    return reach_all(false) && reach_all(true);
}

struct StationaryResult {
    Distribution pi;
    double eigenvalue = 0.0;
    long iterations = 0;
    bool used_cesaro = false;
    std::vector<std::string> warnings;
};

/// Dominant left eigenvector by power iteration, renormalized to sum 1 each
/// step; Cesaro-averaged iterates as a fallback for periodic chains. For a
/// row-stochastic matrix the eigenvalue is 1 and pi P = pi. Matrices whose
/// rows do not sum to 1 (e.g. tables transcribed with rounding error) are
/// accepted as a general non-negative dominant-eigenvector problem with a
/// warning. Cross-checked against a direct linear solve of (P' - lambda I).
inline StationaryResult stationary_distribution(const TransitionMatrix& m, double tol = 1e-12,
                                                long max_iter = 1000000) {
    const std::size_t n = m.size();
    if (n == 0) throw ConfigError("stationary: empty matrix");
    for (double x : m.p)
        if (x < 0.0 || !std::isfinite(x)) throw DomainError("stationary: negative or non-finite entry");
    if (!is_irreducible(m))
        throw NumericError("stationary: matrix is reducible, stationary distribution undefined");

    StationaryResult res;
    if (!m.row_stochastic(1e-6))
        res.warnings.push_back("stationary: rows do not sum to 1 (max deviation " +
                               std::to_string(m.max_row_sum_deviation()) +
                               "); treating as a general non-negative matrix");

    auto step = [&](const std::vector<double>& x) {
        std::vector<double> y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) y[j] += x[i] * m.at(i, j);
        return y;
    };
    auto residual = [&](const std::vector<double>& x, double lambda) {
        const auto y = step(x);
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) r = std::max(r, std::abs(y[j] - lambda * x[j]));
        return r;
    };

    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    double lambda = 1.0;
    bool converged = false;
    long it = 0;
    for (; it < max_iter; ++it) {
        auto y = step(x);
        double s = 0.0;
        for (double v : y) s += v;
        if (!(s > 0.0)) throw NumericError("stationary: iterate collapsed to zero");
        lambda = s;  // sum of x P with sum(x) = 1 estimates the dominant eigenvalue
        for (double& v : y) v /= s;
        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(y[j] - x[j]));
        x = std::move(y);
        if (diff <= tol) {
            converged = true;
            break;
        }
    }
    if (converged && residual(x, lambda) > std::max(tol, 1e-11) * 10.0) converged = false;

    if (!converged) {
        // Periodic chains oscillate; the running average of iterates converges.
        std::vector<double> avg(n, 0.0), cur(n, 1.0 / static_cast<double>(n));
        const long burn = 1000;
        for (long k = 0; k < burn + 100000; ++k) {
            auto y = step(cur);
            double s = 0.0;
            for (double v : y) s += v;
            if (!(s > 0.0)) throw NumericError("stationary: iterate collapsed to zero");
            lambda = s;
            for (double& v : y) v /= s;
            cur = std::move(y);
            if (k >= burn)
                for (std::size_t j = 0; j < n; ++j) avg[j] += cur[j];
        }
        double s = 0.0;
        for (double v : avg) s += v;
        for (double& v : avg) v /= s;
        x = std::move(avg);
        res.used_cesaro = true;
        // Refine lambda against the averaged vector.
        const auto y = step(x);
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            num += y[j] * x[j];
            den += x[j] * x[j];
        }
        lambda = num / den;
        if (residual(x, lambda) > 1e-8)
            throw NumericError("stationary: power iteration did not converge");
    }

    // Independent route: solve (P' - lambda I) pi = 0 with sum(pi) = 1 by
    // least squares, and require agreement.
    {
        Eigen::MatrixXd A(n + 1, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                    m.at(i, j) - (i == j ? lambda : 0.0);
        for (std::size_t i = 0; i < n; ++i) A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) = 1.0;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + 1));
        b(static_cast<Eigen::Index>(n)) = 1.0;
        const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
        double dev = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            dev = std::max(dev, std::abs(sol(static_cast<Eigen::Index>(j)) - x[j]));
        if (dev > 1e-8)
            throw NumericError("stationary: power iteration and linear solve disagree by " +
                               std::to_string(dev));
        // The linear solve is the sharper of the two; return it.
        for (std::size_t j = 0; j < n; ++j) x[j] = sol(static_cast<Eigen::Index>(j));
    }

    res.pi.labels = m.labels;
    res.pi.p = std::move(x);
    res.eigenvalue = lambda;
    res.iterations = it;
    return res;
}

inline Distribution distribution_at_year(const TrajectorySet& ts, int year) {
    std::size_t t = 0;
    for (; t < ts.T(); ++t)
        if (ts.years[t] == year) break;
    if (t == ts.T()) throw ConfigError("distribution: year " + std::to_string(year) + " not present");
    Distribution d;
    d.labels = ts.alphabet;
    d.p.assign(ts.alphabet.size(), 0.0);
    for (std::size_t i = 0; i < ts.n(); ++i) d.p[static_cast<std::size_t>(ts.label(i, t))] += 1.0;
    for (double& v : d.p) v /= static_cast<double>(ts.n());
    return d;
}

/// Independent trajectories sampled from the chain; deterministic per seed.
inline TrajectorySet simulate_chain(const TransitionMatrix& P, const Distribution& initial,
                                    int steps, int n_individuals, std::uint64_t seed) {
    if (!P.row_stochastic(1e-9))
        throw DomainError("simulate: matrix is not row-stochastic");
    if (initial.labels != P.labels)
        throw ConfigError("simulate: initial distribution labels do not match the matrix");
    if (steps < 1 || n_individuals < 1)
        throw ConfigError("simulate: steps and n_individuals must be >= 1");

    const std::size_t A = P.size();
    auto cumulative = [A](const std::vector<double>& row) {
        std::vector<double> c(A);
        double s = 0.0;
        for (std::size_t j = 0; j < A; ++j) c[j] = (s += row[j]);
        return c;
    };
    const std::vector<double> cum0 = cumulative(initial.p);
    std::vector<std::vector<double>> cumP(A);
    for (std::size_t i = 0; i < A; ++i) {
        std::vector<double> row(A);
        for (std::size_t j = 0; j < A; ++j) row[j] = P.at(i, j);
        cumP[i] = cumulative(row);
    }

    TrajectorySet ts;
    ts.alphabet = P.labels;
    ts.years.resize(steps);
    for (int t = 0; t < steps; ++t) ts.years[t] = t + 1;
    ts.individual_ids.resize(n_individuals);
    ts.labels.resize(static_cast<std::size_t>(n_individuals) * steps);
    Rng rng(seed);
    for (int i = 0; i < n_individuals; ++i) {
        ts.individual_ids[i] = "sim" + std::to_string(i + 1);
        std::size_t state = rng.categorical(cum0);
        ts.labels[static_cast<std::size_t>(i) * steps] = static_cast<int>(state);
        for (int t = 1; t < steps; ++t) {
            state = rng.categorical(cumP[state]);
            ts.labels[static_cast<std::size_t>(i) * steps + t] = static_cast<int>(state);
        }
    }
    return ts;
}

// -- CSV I/O -----------------------------------------------------------------

inline void write_matrix_csv(std::ostream& out, const TransitionMatrix& m) {
    out << "label";
    for (const auto& l : m.labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << m.labels[i];
        char buf[32];
        for (std::size_t j = 0; j < m.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m.at(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
}

inline TransitionMatrix load_matrix_csv(std::istream& in) {
    csv::Table t = csv::read(in);
    if (t.header.size() < 2)
        throw ParseError("matrix: need a label column plus one column per state");
    TransitionMatrix m;
    m.labels.assign(t.header.begin() + 1, t.header.end());
    const std::size_t n = m.labels.size();
    if (t.rows.size() != n)
        throw ParseError("matrix: expected " + std::to_string(n) + " rows, got " +
                         std::to_string(t.rows.size()));
    m.p.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (t.rows[i][0] != m.labels[i])
            throw ParseError("matrix: row label '" + t.rows[i][0] + "' does not match header order");
        for (std::size_t j = 0; j < n; ++j)
            m.p[i * n + j] = csv::parse_double(t.rows[i][j + 1], i + 2, m.labels[j]);
    }
    return m;
}

inline void write_distribution_csv(std::ostream& out, const Distribution& d) {
    for (std::size_t i = 0; i < d.labels.size(); ++i) out << (i ? "," : "") << d.labels[i];
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < d.p.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", d.p[i]);
        out << (i ? "," : "") << buf;
    }
    out << '\n';
}

} // namespace panelsom

#endif
