#ifndef PANELSOM_SYNTH_HPP
#define PANELSOM_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "panelsom/errors.hpp"
#include "panelsom/markov.hpp"
#include "panelsom/panel.hpp"
#include "panelsom/rng.hpp"
#include "panelsom/trajectory.hpp"

namespace panelsom {

/// Generator configuration: latent class dynamics plus class-conditional
/// emission parameters, one (mean, spread) pair per variable and class.
struct SynthConfig {
    int n_individuals = 0;
    std::vector<int> years;
    TransitionMatrix latent_P;  // labels name the latent classes
    Distribution initial;
    std::vector<std::string> variables;
    struct ClassEmission {
        std::vector<double> mean;    // per variable
        std::vector<double> spread;  // per variable, > 0
    };
    std::vector<ClassEmission> emissions;  // one per latent class
    double missing_rate = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_individuals < 1) throw ConfigError("synth: n_individuals must be >= 1");
        if (years.size() < 1) throw ConfigError("synth: at least one year required");
        for (std::size_t t = 1; t < years.size(); ++t)
            if (years[t] <= years[t - 1]) throw ConfigError("synth: years must be increasing");
        if (!latent_P.row_stochastic(1e-12))
            throw ConfigError("synth: latent_P rows must sum to 1");
        if (initial.labels != latent_P.labels)
            throw ConfigError("synth: initial distribution labels must match latent_P");
        if (emissions.size() != latent_P.size())
            throw ConfigError("synth: one emission profile per latent class required");
        for (const auto& e : emissions) {
            if (e.mean.size() != variables.size() || e.spread.size() != variables.size())
                throw ConfigError("synth: emission parameter arity must match variables");
            for (double s : e.spread)
                if (!(s > 0.0)) throw ConfigError("synth: spreads must be positive");
        }
        if (missing_rate < 0.0 || missing_rate >= 1.0)
            throw ConfigError("synth: missing_rate must lie in [0, 1)");
    }
};

struct SynthResult {
    PanelDataset panel;
    TrajectorySet ground_truth;  // latent class per (individual, year)
};

/// Latent sequences from the chain, then independent normal draws per
/// variable around the class mean; cells masked independently at
/// missing_rate. Fully deterministic given the seed.
inline SynthResult generate_panel(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t A = cfg.latent_P.size();
    const std::size_t V = cfg.variables.size();
    const std::size_t T = cfg.years.size();
    const std::size_t N = static_cast<std::size_t>(cfg.n_individuals);

    SynthResult out;
    out.ground_truth =
        simulate_chain(cfg.latent_P, cfg.initial, static_cast<int>(T), cfg.n_individuals, cfg.seed);
    out.ground_truth.years = cfg.years;

    PanelDataset& d = out.panel;
    d.years = cfg.years;
    d.variables = cfg.variables;
    d.individual_ids.resize(N);
    for (std::size_t i = 0; i < N; ++i) d.individual_ids[i] = "ind" + std::to_string(i + 1);
    out.ground_truth.individual_ids = d.individual_ids;
    d.values.assign(N * T * V, 0.0);
    d.missing.assign(N * T * V, 0);

    // Separate stream from the chain sampler so emission draws do not
    // depend on the trajectory sampling order.
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            const std::size_t cls = static_cast<std::size_t>(out.ground_truth.label(i, t));
            (void)A;
            const auto& em = cfg.emissions[cls];
            for (std::size_t v = 0; v < V; ++v) {
                d.values[d.cell(i, t, v)] = em.mean[v] + em.spread[v] * rng.normal();
                if (cfg.missing_rate > 0.0 && rng.uniform() < cfg.missing_rate)
                    d.missing[d.cell(i, t, v)] = 1;
            }
        }
    }
    return out;
}

} // namespace panelsom

#endif
