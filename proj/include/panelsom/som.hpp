#ifndef PANELSOM_SOM_HPP
#define PANELSOM_SOM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "panelsom/errors.hpp"
#include "panelsom/panel.hpp"
#include "panelsom/rng.hpp"

namespace panelsom {

/// Fixed neighborhood structure of the map: a 2D grid or a 1D chain.
/// Units are indexed 0-based row-major internally; external surfaces
/// present them 1-based from the upper-left corner.
struct Topology {
    enum class Kind { Grid2d, Chain };
    Kind kind = Kind::Chain;
    int rows = 1;
    int cols = 1;  // chain length lives here for Kind::Chain

    static Topology grid(int rows, int cols) {
        if (rows < 1 || cols < 1) throw ConfigError("topology: grid dimensions must be >= 1");
        return {Kind::Grid2d, rows, cols};
    }
    static Topology chain(int length) {
        if (length < 1) throw ConfigError("topology: chain length must be >= 1");
        return {Kind::Chain, 1, length};
    }

    int units() const { return rows * cols; }

    // Chain: |i - j|. Grid: Chebyshev distance, so radius 1 is the 3x3 block.
    int grid_distance(int a, int b) const {
        if (a < 0 || a >= units() || b < 0 || b >= units())
            throw ConfigError("topology: unit index out of range");
        if (kind == Kind::Chain) return std::abs(a - b);
        const int dr = std::abs(a / cols - b / cols);
        const int dc = std::abs(a % cols - b % cols);
        return std::max(dr, dc);
    }
};

struct CodeBook {
    Topology topology;
    int dim = 0;
    std::vector<double> weights;  // unit-major

    std::span<double> unit(int u) {
        return {weights.data() + static_cast<std::size_t>(u) * dim, static_cast<std::size_t>(dim)};
    }
    std::span<const double> unit(int u) const {
        return {weights.data() + static_cast<std::size_t>(u) * dim, static_cast<std::size_t>(dim)};
    }
};

enum class Kernel { Hard, Gaussian };
enum class Decay { Linear, Exponential };

struct TrainingSchedule {
    int epochs = 50;
    double lr_start = 0.5;
    double lr_end = 0.01;
    Decay lr_decay = Decay::Linear;
    double radius_start = 0.0;
    double radius_end = 0.0;
    Decay radius_decay = Decay::Linear;
    Kernel kernel = Kernel::Hard;
    std::uint64_t seed = 0;
    bool shuffle = true;

    void validate() const {
        if (epochs < 1) throw ConfigError("schedule: epochs must be >= 1");
        if (!(lr_end > 0.0) || lr_end > lr_start)
            throw ConfigError("schedule: need 0 < lr_end <= lr_start");
        if (radius_end < 0.0 || radius_start < radius_end)
            throw ConfigError("schedule: need radius_start >= radius_end >= 0");
    }

    // Default used by the CLI when no schedule file is given.
    static TrainingSchedule defaults_for(const Topology& t) {
        TrainingSchedule s;
        s.radius_start = std::max(t.rows, t.cols) / 2.0;
        return s;
    }
};

namespace detail {
inline double interpolate(double start, double end, Decay decay, double frac) {
    if (decay == Decay::Linear) return start + (end - start) * frac;
    if (start <= 0.0) return 0.0;
    const double floor_ = std::max(end, 1e-12);
    return start * std::pow(floor_ / start, frac);
}
} // namespace detail

inline double neighborhood_weight(Kernel kernel, double radius, int distance) {
    if (kernel == Kernel::Hard)
        return static_cast<double>(distance) <= radius ? 1.0 : 0.0;
    const double r = std::max(radius, 1e-9);
    const double d = static_cast<double>(distance);
    return std::exp(-(d * d) / (2.0 * r * r));
}

struct BmuResult {
    int unit = -1;
    double distance = 0.0;
};

/// Partial-distance best matching unit: Euclidean over the non-missing
/// coordinates only. Ties break toward the lowest unit index.
inline BmuResult bmu(const CodeBook& cb, std::span<const double> x,
                     std::span<const std::uint8_t> miss) {
    if (static_cast<int>(x.size()) != cb.dim)
        throw ConfigError("bmu: observation dimension mismatch");
    bool any = false;
    for (std::size_t v = 0; v < miss.size(); ++v)
        if (!miss[v]) { any = true; break; }
    if (!any) throw DomainError("bmu: observation has no observed coordinate");

    BmuResult best;
    double best_sq = std::numeric_limits<double>::infinity();
    for (int u = 0; u < cb.topology.units(); ++u) {
        const auto w = cb.unit(u);
        double sq = 0.0;
        for (int v = 0; v < cb.dim; ++v) {
            if (miss[v]) continue;
            const double d = x[v] - w[v];
            sq += d * d;
        }
        if (sq < best_sq) {
            best_sq = sq;
            best.unit = u;
        }
    }
    best.distance = std::sqrt(best_sq);
    return best;
}

inline BmuResult bmu(const CodeBook& cb, const ObservationMatrix& m, std::size_t row) {
    return bmu(cb, m.row(row), m.row_mask(row));
}

enum class InitMethod { Sample, UniformBox };

inline CodeBook init_codebook(const Topology& topo, const ObservationMatrix& data,
                              std::uint64_t seed, InitMethod method = InitMethod::Sample) {
    if (data.n_rows == 0) throw ConfigError("init: empty data");
    const std::size_t V = data.n_vars();
    std::vector<double> col_mean(V, 0.0), col_min(V, 0.0), col_max(V, 0.0);
    for (std::size_t v = 0; v < V; ++v) {
        double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
        std::size_t n = 0;
        for (std::size_t r = 0; r < data.n_rows; ++r) {
            if (data.missing[r * V + v]) continue;
            const double x = data.values[r * V + v];
            sum += x;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            ++n;
        }
        col_mean[v] = n ? sum / static_cast<double>(n) : 0.0;
        col_min[v] = n ? lo : 0.0;
        col_max[v] = n ? hi : 0.0;
    }

    CodeBook cb;
    cb.topology = topo;
    cb.dim = static_cast<int>(V);
    cb.weights.resize(static_cast<std::size_t>(topo.units()) * V);
    Rng rng(seed);
    for (int u = 0; u < topo.units(); ++u) {
        auto w = cb.unit(u);
        if (method == InitMethod::Sample) {
            const std::size_t r = static_cast<std::size_t>(rng.below(data.n_rows));
            for (std::size_t v = 0; v < V; ++v)
                w[v] = data.missing[r * V + v] ? col_mean[v] : data.values[r * V + v];
        } else {
            for (std::size_t v = 0; v < V; ++v)
                w[v] = rng.uniform(col_min[v], col_max[v]);
        }
    }
    return cb;
}

/// Mean partial-distance BMU distance over all rows.
inline double quantization_error(const CodeBook& cb, const ObservationMatrix& data) {
    if (data.n_rows == 0) throw ConfigError("quantization_error: empty data");
    double sum = 0.0;
    for (std::size_t r = 0; r < data.n_rows; ++r)
        sum += bmu(cb, data, r).distance;
    return sum / static_cast<double>(data.n_rows);
}

struct TrainResult {
    CodeBook codebook;
    std::vector<double> qe_trace;  // quantization error after each epoch
};

/// Sequential Kohonen updates; eta and radius interpolate across total steps.
/// Updates touch only the coordinates observed in the presented row.
inline TrainResult train_online(CodeBook cb, const ObservationMatrix& data,
                                const TrainingSchedule& sched) {
    sched.validate();
    if (static_cast<int>(data.n_vars()) != cb.dim)
        throw ConfigError("train: data dimension mismatch");
    const std::size_t V = data.n_vars();
    const std::size_t total_steps = static_cast<std::size_t>(sched.epochs) * data.n_rows;
    Rng rng(sched.seed);
    std::vector<std::size_t> order(data.n_rows);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult out;
    std::size_t step = 0;
    for (int e = 0; e < sched.epochs; ++e) {
        if (sched.shuffle) rng.shuffle(order);
        for (std::size_t r : order) {
            const double frac =
                total_steps > 1 ? static_cast<double>(step) / static_cast<double>(total_steps - 1)
                                : 0.0;
            const double eta = detail::interpolate(sched.lr_start, sched.lr_end, sched.lr_decay, frac);
            const double radius =
                detail::interpolate(sched.radius_start, sched.radius_end, sched.radius_decay, frac);
            const auto x = data.row(r);
            const auto miss = data.row_mask(r);
            const int winner = bmu(cb, x, miss).unit;
            for (int u = 0; u < cb.topology.units(); ++u) {
                const double h =
                    neighborhood_weight(sched.kernel, radius, cb.topology.grid_distance(winner, u));
                if (h == 0.0) continue;
                auto w = cb.unit(u);
                for (std::size_t v = 0; v < V; ++v) {
                    if (miss[v]) continue;
                    w[v] += eta * h * (x[v] - w[v]);
                }
            }
            ++step;
        }
        out.qe_trace.push_back(quantization_error(cb, data));
    }
    out.codebook = std::move(cb);
    return out;
}

/// Batch variant: each epoch assigns every row to its BMU and replaces each
/// unit by the neighborhood-weighted mean. With radius 0 and the hard kernel
/// an epoch is exactly one Lloyd k-means iteration. Units receiving zero
/// total weight keep their previous weights.
inline TrainResult train_batch(CodeBook cb, const ObservationMatrix& data,
                               const TrainingSchedule& sched) {
    sched.validate();
    if (static_cast<int>(data.n_vars()) != cb.dim)
        throw ConfigError("train: data dimension mismatch");
    const std::size_t V = data.n_vars();
    const int U = cb.topology.units();

    TrainResult out;
    for (int e = 0; e < sched.epochs; ++e) {
        const double frac =
            sched.epochs > 1 ? static_cast<double>(e) / static_cast<double>(sched.epochs - 1) : 0.0;
        const double radius =
            detail::interpolate(sched.radius_start, sched.radius_end, sched.radius_decay, frac);

        std::vector<int> assign(data.n_rows);
        for (std::size_t r = 0; r < data.n_rows; ++r)
            assign[r] = bmu(cb, data, r).unit;

        std::vector<double> num(static_cast<std::size_t>(U) * V, 0.0);
        std::vector<double> den(static_cast<std::size_t>(U) * V, 0.0);
        for (std::size_t r = 0; r < data.n_rows; ++r) {
            const auto x = data.row(r);
            const auto miss = data.row_mask(r);
            for (int u = 0; u < U; ++u) {
                const double h =
                    neighborhood_weight(sched.kernel, radius, cb.topology.grid_distance(assign[r], u));
                if (h == 0.0) continue;
                for (std::size_t v = 0; v < V; ++v) {
                    if (miss[v]) continue;
                    num[u * V + v] += h * x[v];
                    den[u * V + v] += h;
                }
            }
        }
        for (int u = 0; u < U; ++u) {
            auto w = cb.unit(u);
            for (std::size_t v = 0; v < V; ++v)
                if (den[u * V + v] > 0.0) w[v] = num[u * V + v] / den[u * V + v];
        }
        out.qe_trace.push_back(quantization_error(cb, data));
    }
    out.codebook = std::move(cb);
    return out;
}

inline ObservationMatrix codebook_as_observations(const CodeBook& cb) {
    ObservationMatrix m;
    m.variables.resize(cb.dim);
    for (int v = 0; v < cb.dim; ++v) m.variables[v] = "w" + std::to_string(v);
    m.n_rows = static_cast<std::size_t>(cb.topology.units());
    m.values = cb.weights;
    m.missing.assign(m.values.size(), 0);
    m.origins.resize(m.n_rows);
    for (std::size_t u = 0; u < m.n_rows; ++u) m.origins[u] = {u, 0};
    return m;
}

} // namespace panelsom

#endif
