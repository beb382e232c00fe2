#ifndef PANELSOM_TRAJECTORY_HPP
#define PANELSOM_TRAJECTORY_HPP

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "panelsom/errors.hpp"
#include "panelsom/grouping.hpp"
#include "panelsom/panel.hpp"
#include "panelsom/som.hpp"

namespace panelsom {

/// Fixed-length label sequences, one per individual, over a finite alphabet.
/// Labels are stored as alphabet indices; the alphabet carries the external
/// names ("1".."64", "1".."7", or "A".."D").
struct TrajectorySet {
    std::vector<std::string> individual_ids;
    std::vector<int> years;           // length T
    std::vector<std::string> alphabet;
    std::vector<int> labels;          // individual-major, alphabet indices

    std::size_t n() const { return individual_ids.size(); }
    std::size_t T() const { return years.size(); }
    int label(std::size_t i, std::size_t t) const { return labels[i * T() + t]; }
    std::span<const int> sequence(std::size_t i) const { return {labels.data() + i * T(), T()}; }
};

enum class Granularity { Unit, Super, Main };

/// Standardize a raw record with the training-time parameters, then
/// partial-distance BMU. Returns the 0-based unit index.
inline int project_year(const Standardization& params, const CodeBook& cb,
                        const std::vector<std::string>& codes, std::span<const double> raw,
                        std::span<const std::uint8_t> miss) {
    std::vector<double> z(raw.begin(), raw.end());
    standardize_row(params, codes, z, miss);
    return bmu(cb, z, miss).unit;
}

inline TrajectorySet build_trajectories(const PanelDataset& d, const std::vector<int>& years,
                                        const Standardization& params, const CodeBook& cb,
                                        Granularity gran, const SuperClassMap* supers = nullptr,
                                        const MainClassMap* mains = nullptr) {
    if (gran != Granularity::Unit && supers == nullptr)
        throw ConfigError("trajectories: super-class map required for this granularity");
    if (gran == Granularity::Main && mains == nullptr)
        throw ConfigError("trajectories: main-class map required for main granularity");

    std::vector<std::size_t> year_idx, var_idx;
    for (int y : years) year_idx.push_back(d.year_index(y));
    for (const auto& c : params.variables) var_idx.push_back(d.var_index(c));

    TrajectorySet ts;
    ts.individual_ids = d.individual_ids;
    ts.years = years;
    if (gran == Granularity::Unit) {
        for (int u = 1; u <= cb.topology.units(); ++u) ts.alphabet.push_back(std::to_string(u));
    } else if (gran == Granularity::Super) {
        for (int s = 1; s <= supers->k; ++s) ts.alphabet.push_back(std::to_string(s));
    } else {
        std::set<char> mains_used;
        for (int s = 1; s <= supers->k; ++s) mains_used.insert(mains->at(s));
        for (char c : mains_used) ts.alphabet.push_back(std::string(1, c));
    }
    std::map<std::string, int> alpha_idx;
    for (std::size_t a = 0; a < ts.alphabet.size(); ++a) alpha_idx[ts.alphabet[a]] = static_cast<int>(a);

    ts.labels.resize(d.n_individuals() * years.size());
    std::vector<double> raw(var_idx.size());
    std::vector<std::uint8_t> miss(var_idx.size());
    for (std::size_t i = 0; i < d.n_individuals(); ++i) {
        for (std::size_t k = 0; k < year_idx.size(); ++k) {
            for (std::size_t v = 0; v < var_idx.size(); ++v) {
                raw[v] = d.values[d.cell(i, year_idx[k], var_idx[v])];
                miss[v] = d.missing[d.cell(i, year_idx[k], var_idx[v])];
            }
            int unit;
            try {
                unit = project_year(params, cb, params.variables, raw, miss);
            } catch (const DomainError&) {
                throw DomainError("trajectories: all variables missing for individual " +
                                  d.individual_ids[i] + " year " + std::to_string(years[k]));
            }
            int a;
            if (gran == Granularity::Unit) {
                a = unit;
            } else {
                const int s = supers->unit_to_super[unit];
                a = gran == Granularity::Super ? s - 1
                                               : alpha_idx[std::string(1, mains->at(s))];
            }
            ts.labels[i * years.size() + k] = a;
        }
    }
    return ts;
}

/// The label occurring at least `threshold` times, if any. Unique whenever
/// threshold > T/2.
inline std::optional<int> dominant_position(std::span<const int> traj, int threshold = 5) {
    if (threshold < 1) throw ConfigError("dominant_position: threshold must be >= 1");
    std::map<int, int> counts;
    for (int l : traj) ++counts[l];
    for (const auto& [label, n] : counts)
        if (n >= threshold) return label;
    return std::nullopt;
}

/// Groups individuals by dominant label (or none); per group, the share of
/// all person-years spent in each label.
struct DominantPositionReport {
    std::vector<std::string> alphabet;
    std::vector<std::size_t> group_sizes;     // per label, then the no-dominant group last
    std::vector<double> occupancy;            // group-major [group][label], rows sum to 1
    std::size_t cohort_size = 0;

    std::size_t n_groups() const { return group_sizes.size(); }
    double prob(std::size_t g, std::size_t l) const { return occupancy[g * alphabet.size() + l]; }
    std::size_t no_dominant_size() const { return group_sizes.back(); }
};

inline DominantPositionReport occupancy_report(const TrajectorySet& ts, int threshold = 5) {
    if (ts.n() == 0) throw ConfigError("occupancy: empty trajectory set");
    const std::size_t A = ts.alphabet.size();
    DominantPositionReport rep;
    rep.alphabet = ts.alphabet;
    rep.cohort_size = ts.n();
    rep.group_sizes.assign(A + 1, 0);
    std::vector<std::size_t> cells((A + 1) * A, 0);
    for (std::size_t i = 0; i < ts.n(); ++i) {
        const auto seq = ts.sequence(i);
        const auto dom = dominant_position(seq, threshold);
        const std::size_t g = dom ? static_cast<std::size_t>(*dom) : A;
        ++rep.group_sizes[g];
        for (int l : seq) ++cells[g * A + static_cast<std::size_t>(l)];
    }
    rep.occupancy.assign((A + 1) * A, 0.0);
    for (std::size_t g = 0; g <= A; ++g) {
        const double denom = static_cast<double>(rep.group_sizes[g]) * static_cast<double>(ts.T());
        if (denom == 0.0) continue;
        for (std::size_t l = 0; l < A; ++l)
            rep.occupancy[g * A + l] = static_cast<double>(cells[g * A + l]) / denom;
    }
    return rep;
}

struct StabilityCensus {
    std::size_t stayers = 0;                // max label multiplicity >= min_years
    std::size_t distinct_trajectories = 0;
};

inline StabilityCensus stability_census(const TrajectorySet& ts, int min_years) {
    if (min_years < 1 || static_cast<std::size_t>(min_years) > ts.T())
        throw ConfigError("stability: min_years out of range");
    StabilityCensus c;
    std::set<std::vector<int>> distinct;
    for (std::size_t i = 0; i < ts.n(); ++i) {
        const auto seq = ts.sequence(i);
        std::map<int, int> counts;
        int maxc = 0;
        for (int l : seq) maxc = std::max(maxc, ++counts[l]);
        if (maxc >= min_years) ++c.stayers;
        distinct.insert(std::vector<int>(seq.begin(), seq.end()));
    }
    c.distinct_trajectories = distinct.size();
    return c;
}

} // namespace panelsom

#endif
