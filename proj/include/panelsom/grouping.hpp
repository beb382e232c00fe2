#ifndef PANELSOM_GROUPING_HPP
#define PANELSOM_GROUPING_HPP

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "panelsom/errors.hpp"
#include "panelsom/som.hpp"

namespace panelsom {

/// Reduction of the trained map's units to k ordered super-classes,
/// obtained with a 1D Kohonen chain over the code vectors.
/// Super-class indices are 1-based.
struct SuperClassMap {
    int k = 0;
    std::vector<int> unit_to_super;  // per unit, 1..k
    CodeBook chain_codebook;

    std::vector<int> empty_superclasses() const {
        std::vector<int> counts(k + 1, 0);
        for (int s : unit_to_super) ++counts[s];
        std::vector<int> empty;
        for (int s = 1; s <= k; ++s)
            if (counts[s] == 0) empty.push_back(s);
        return empty;
    }
};

struct MainClassMap {
    std::map<int, char> super_to_main;  // super-class -> 'A'..'D'

    char at(int super) const {
        auto it = super_to_main.find(super);
        if (it == super_to_main.end())
            throw ConfigError("main-class map: super-class " + std::to_string(super) +
                              " is not mapped");
        return it->second;
    }

    // A = {1,3}, B = {2,4,5}, C = {6}, D = {7}.
    static MainClassMap default_map() {
        MainClassMap m;
        m.super_to_main = {{1, 'A'}, {2, 'B'}, {3, 'A'}, {4, 'B'}, {5, 'B'}, {6, 'C'}, {7, 'D'}};
        return m;
    }
};

/// Train a chain(k) SOM on the code vectors and assign each unit to its BMU
/// on the chain. The chain order is normalized so super-class 1 has the
/// lower code-vector value of `orient_dim` (a 1D SOM order is defined only
/// up to reversal).
inline SuperClassMap reduce_superclasses(const CodeBook& map_codebook, int k,
                                         const TrainingSchedule& sched, int orient_dim = 0) {
    if (k < 2) throw ConfigError("reduce: k must be >= 2");
    if (k > map_codebook.topology.units())
        throw ConfigError("reduce: k exceeds the number of map units");
    if (orient_dim < 0 || orient_dim >= map_codebook.dim)
        throw ConfigError("reduce: orientation variable index out of range");

    const ObservationMatrix obs = codebook_as_observations(map_codebook);
    CodeBook chain = init_codebook(Topology::chain(k), obs, sched.seed, InitMethod::Sample);
    chain = train_online(std::move(chain), obs, sched).codebook;

    // Orientation: reverse the chain if its first unit sits above its last
    // on the orientation coordinate.
    const double first = chain.unit(0)[orient_dim];
    const double last = chain.unit(k - 1)[orient_dim];
    if (first > last) {
        std::vector<double> rev(chain.weights.size());
        for (int u = 0; u < k; ++u)
            std::copy_n(chain.unit(k - 1 - u).data(), chain.dim,
                        rev.begin() + static_cast<std::size_t>(u) * chain.dim);
        chain.weights = std::move(rev);
    }

    SuperClassMap sm;
    sm.k = k;
    sm.chain_codebook = std::move(chain);
    sm.unit_to_super.resize(map_codebook.topology.units());
    std::vector<std::uint8_t> no_miss(map_codebook.dim, 0);
    for (int u = 0; u < map_codebook.topology.units(); ++u)
        sm.unit_to_super[u] = bmu(sm.chain_codebook, map_codebook.unit(u), no_miss).unit + 1;
    return sm;
}

inline std::vector<char> map_main_classes(const SuperClassMap& sm, const MainClassMap& mm,
                                          const std::vector<int>& super_labels) {
    for (int s = 1; s <= sm.k; ++s)
        mm.at(s);  // totality check up front
    std::vector<char> out;
    out.reserve(super_labels.size());
    for (int s : super_labels) out.push_back(mm.at(s));
    return out;
}

/// Per-class per-variable means over non-missing cells, plus the overall
/// column and a size row. Classes with zero rows keep masked means.
struct ClassMeansTable {
    std::vector<std::string> variables;
    std::vector<std::string> class_labels;    // ascending label order
    std::vector<double> overall_mean;         // per variable
    std::vector<std::size_t> class_sizes;     // rows per class
    std::size_t total_rows = 0;
    std::vector<double> means;                // class-major [class][variable]
    std::vector<std::uint8_t> means_missing;  // same shape

    double mean(std::size_t c, std::size_t v) const { return means[c * variables.size() + v]; }
};

inline ClassMeansTable class_means(const ObservationMatrix& m,
                                   const std::vector<std::string>& labels) {
    if (labels.size() != m.n_rows)
        throw ConfigError("class_means: one label per row required");
    ClassMeansTable t;
    t.variables = m.variables;
    t.total_rows = m.n_rows;

    std::vector<std::string> uniq = labels;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    t.class_labels = uniq;
    std::map<std::string, std::size_t> cidx;
    for (std::size_t c = 0; c < uniq.size(); ++c) cidx[uniq[c]] = c;

    const std::size_t C = uniq.size(), V = m.n_vars();
    std::vector<double> sum(C * V, 0.0), osum(V, 0.0);
    std::vector<std::size_t> cnt(C * V, 0), ocnt(V, 0);
    t.class_sizes.assign(C, 0);
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        const std::size_t c = cidx[labels[r]];
        ++t.class_sizes[c];
        for (std::size_t v = 0; v < V; ++v) {
            if (m.missing[r * V + v]) continue;
            sum[c * V + v] += m.values[r * V + v];
            ++cnt[c * V + v];
            osum[v] += m.values[r * V + v];
            ++ocnt[v];
        }
    }
    t.overall_mean.resize(V);
    for (std::size_t v = 0; v < V; ++v)
        t.overall_mean[v] = ocnt[v] ? osum[v] / static_cast<double>(ocnt[v]) : 0.0;
    t.means.assign(C * V, 0.0);
    t.means_missing.assign(C * V, 1);
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t v = 0; v < V; ++v) {
            if (!cnt[c * V + v]) continue;
            t.means[c * V + v] = sum[c * V + v] / static_cast<double>(cnt[c * V + v]);
            t.means_missing[c * V + v] = 0;
        }
    }
    return t;
}

/// Column-percentage table of one categorical attribute per class.
struct FrequencyTable {
    std::string attribute;
    std::vector<std::string> categories;    // sorted
    std::vector<std::string> class_labels;  // ascending
    std::vector<double> overall_pct;        // per category
    std::vector<double> pct;                // class-major [class][category]
    std::vector<std::size_t> class_counts;  // rows with an observed category
};

inline FrequencyTable qualitative_frequencies(const std::vector<std::string>& categories_per_row,
                                              const std::vector<std::string>& labels,
                                              const std::string& attribute) {
    if (categories_per_row.size() != labels.size())
        throw ConfigError("frequencies: label/category length mismatch");
    FrequencyTable t;
    t.attribute = attribute;

    std::vector<std::string> cats, uniq = labels;
    for (const auto& c : categories_per_row)
        if (!c.empty()) cats.push_back(c);
    std::sort(cats.begin(), cats.end());
    cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    t.categories = cats;
    t.class_labels = uniq;

    std::map<std::string, std::size_t> kidx, cidx;
    for (std::size_t i = 0; i < cats.size(); ++i) kidx[cats[i]] = i;
    for (std::size_t i = 0; i < uniq.size(); ++i) cidx[uniq[i]] = i;

    const std::size_t C = uniq.size(), K = cats.size();
    std::vector<std::size_t> cnt(C * K, 0), ocnt(K, 0);
    t.class_counts.assign(C, 0);
    std::size_t total = 0;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (categories_per_row[r].empty()) continue;
        const std::size_t c = cidx[labels[r]];
        const std::size_t k = kidx[categories_per_row[r]];
        ++cnt[c * K + k];
        ++ocnt[k];
        ++t.class_counts[c];
        ++total;
    }
    t.overall_pct.resize(K);
    for (std::size_t k = 0; k < K; ++k)
        t.overall_pct[k] = total ? 100.0 * static_cast<double>(ocnt[k]) / static_cast<double>(total)
                                 : 0.0;
    t.pct.assign(C * K, 0.0);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t k = 0; k < K; ++k)
            if (t.class_counts[c])
                t.pct[c * K + k] = 100.0 * static_cast<double>(cnt[c * K + k]) /
                                   static_cast<double>(t.class_counts[c]);
    return t;
}

} // namespace panelsom

#endif
