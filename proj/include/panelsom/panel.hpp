#ifndef PANELSOM_PANEL_HPP
#define PANELSOM_PANEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "panelsom/csv.hpp"
#include "panelsom/errors.hpp"

namespace panelsom {

enum class VariableKind { Observed, DerivedGrowth, DerivedDifference, DerivedDeflated };

struct CatalogEntry {
    std::string code;
    VariableKind kind = VariableKind::Observed;
    std::string description;
};

/// Ordered catalog of quantitative variables; codes unique, sorted lexicographically.
struct VariableCatalog {
    std::vector<CatalogEntry> entries;

    void add(CatalogEntry e) {
        for (const auto& x : entries)
            if (x.code == e.code)
                throw ConfigError("catalog: duplicate variable code " + e.code);
        entries.push_back(std::move(e));
        std::sort(entries.begin(), entries.end(),
                  [](const CatalogEntry& a, const CatalogEntry& b) { return a.code < b.code; });
    }

    bool contains(std::string_view code) const {
        for (const auto& e : entries)
            if (e.code == code) return true;
        return false;
    }

    std::vector<std::string> codes() const {
        std::vector<std::string> out;
        out.reserve(entries.size());
        for (const auto& e : entries) out.push_back(e.code);
        return out;
    }

    // The 15 household-level variables: 12 observed, 3 constructed.
    static VariableCatalog household_default() {
        VariableCatalog c;
        auto obs = [&](const char* code, const char* d) {
            c.entries.push_back({code, VariableKind::Observed, d});
        };
        obs("AGEH", "age of the head of the household");
        obs("ANCH", "number of years worked since the age of 18");
        c.entries.push_back({"GRSALH", VariableKind::DerivedGrowth, "annual growth of hourly wage"});
        obs("HEXJH", "annual work hours in extra jobs");
        obs("HMJH", "annual work hours in main job");
        obs("HWMJH", "hours of work per week in main job");
        obs("NBXJH", "number of extra jobs");
        c.entries.push_back({"RSALH", VariableKind::DerivedDeflated, "real hourly wage"});
        obs("SENH", "seniority in main job (months)");
        obs("SIZFAM", "family size");
        c.entries.push_back(
            {"VHWMJH", VariableKind::DerivedDifference, "variation of work hours per week since baseline"});
        obs("VWMJH", "variation of weeks of work since baseline");
        obs("WMJH", "number of weeks of work in main job");
        obs("WOUTH", "number of weeks out of labor force");
        obs("WUNEH", "number of weeks of unemployment");
        std::sort(c.entries.begin(), c.entries.end(),
                  [](const CatalogEntry& a, const CatalogEntry& b) { return a.code < b.code; });
        return c;
    }
};

/// individuals x years x variables panel with an explicit missing mask.
/// A masked cell's numeric content is never read.
struct PanelDataset {
    std::vector<std::string> individual_ids;
    std::vector<int> years;              // strictly increasing
    std::vector<std::string> variables;  // column codes, load order
    std::vector<double> values;          // [ind][year][var], row-major
    std::vector<std::uint8_t> missing;   // same shape
    // attribute name -> per (individual, year) category label ("" = absent)
    std::map<std::string, std::vector<std::string>> categoricals;

    std::size_t n_individuals() const { return individual_ids.size(); }
    std::size_t n_years() const { return years.size(); }
    std::size_t n_variables() const { return variables.size(); }

    std::size_t cell(std::size_t i, std::size_t y, std::size_t v) const {
        return (i * n_years() + y) * n_variables() + v;
    }
    std::size_t record(std::size_t i, std::size_t y) const { return i * n_years() + y; }

    std::size_t year_index(int year) const {
        for (std::size_t t = 0; t < years.size(); ++t)
            if (years[t] == year) return t;
        throw ConfigError("panel: year " + std::to_string(year) + " not present");
    }

    std::size_t var_index(std::string_view code) const {
        for (std::size_t v = 0; v < variables.size(); ++v)
            if (variables[v] == code) return v;
        throw ConfigError("panel: unknown variable code " + std::string(code));
    }

    bool has_variable(std::string_view code) const {
        return std::any_of(variables.begin(), variables.end(),
                           [&](const std::string& c) { return c == code; });
    }
};

/// Pooled observation rows with provenance back to (individual, year).
struct ObservationMatrix {
    std::vector<std::string> variables;
    std::size_t n_rows = 0;
    std::vector<double> values;          // row-major
    std::vector<std::uint8_t> missing;
    struct Origin {
        std::size_t individual;  // index into the source panel
        int year;
    };
    std::vector<Origin> origins;

    std::size_t n_vars() const { return variables.size(); }
    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * n_vars(), n_vars()};
    }
    std::span<const std::uint8_t> row_mask(std::size_t r) const {
        return {missing.data() + r * n_vars(), n_vars()};
    }
};

struct Standardization {
    std::vector<std::string> variables;
    std::vector<double> mean;
    std::vector<double> scale;  // population standard deviation, > 0

    std::size_t var_index(std::string_view code) const {
        for (std::size_t v = 0; v < variables.size(); ++v)
            if (variables[v] == code) return v;
        throw ConfigError("standardization: no parameters for variable " + std::string(code));
    }
};

struct LoadOptions {
    std::set<std::string> categorical_columns;
};

inline PanelDataset load_panel(std::istream& in, const LoadOptions& opts = {}) {
    csv::Table t = csv::read(in);
    if (t.header.size() < 2 || t.header[0] != "individual_id" || t.header[1] != "year")
        throw ParseError("panel: header must start with individual_id,year");

    std::vector<std::size_t> num_cols, cat_cols;
    for (std::size_t c = 2; c < t.header.size(); ++c) {
        if (opts.categorical_columns.count(t.header[c]))
            cat_cols.push_back(c);
        else
            num_cols.push_back(c);
    }

    PanelDataset d;
    for (std::size_t c : num_cols) d.variables.push_back(t.header[c]);

    std::map<std::string, std::size_t> ind_index;
    std::set<int> year_set;
    std::set<std::pair<std::string, int>> seen;
    struct Raw {
        std::string id;
        int year;
        std::size_t line;
        const std::vector<std::string>* fields;
    };
    std::vector<Raw> raws;
    raws.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::size_t line_no = r + 2;
        const auto& row = t.rows[r];
        const std::string& id = row[0];
        const int year = static_cast<int>(csv::parse_long(row[1], line_no, "year"));
        if (!seen.insert({id, year}).second)
            throw ParseError("panel: duplicate (individual_id, year) = (" + id + ", " +
                             std::to_string(year) + ") at line " + std::to_string(line_no));
        if (!ind_index.count(id)) {
            ind_index[id] = d.individual_ids.size();
            d.individual_ids.push_back(id);
        }
        year_set.insert(year);
        raws.push_back({id, year, line_no, &row});
    }
    d.years.assign(year_set.begin(), year_set.end());

    const std::size_t nrec = d.n_individuals() * d.n_years();
    d.values.assign(nrec * d.n_variables(), 0.0);
    d.missing.assign(nrec * d.n_variables(), 1);
    for (std::size_t c : cat_cols)
        d.categoricals[t.header[c]].assign(nrec, "");

    for (const Raw& raw : raws) {
        const std::size_t i = ind_index[raw.id];
        const std::size_t y = d.year_index(raw.year);
        for (std::size_t k = 0; k < num_cols.size(); ++k) {
            const std::string& field = (*raw.fields)[num_cols[k]];
            if (field.empty()) continue;  // missing stays masked
            d.values[d.cell(i, y, k)] = csv::parse_double(field, raw.line, t.header[num_cols[k]]);
            d.missing[d.cell(i, y, k)] = 0;
        }
        for (std::size_t c : cat_cols)
            d.categoricals[t.header[c]][d.record(i, y)] = (*raw.fields)[c];
    }
    return d;
}

namespace detail {
inline std::size_t append_variable(PanelDataset& d, const std::string& out) {
    if (d.has_variable(out))
        throw ConfigError("panel: output code " + out + " already present");
    const std::size_t oldV = d.n_variables();
    const std::size_t newV = oldV + 1;
    const std::size_t nrec = d.n_individuals() * d.n_years();
    std::vector<double> values(nrec * newV, 0.0);
    std::vector<std::uint8_t> missing(nrec * newV, 1);
    for (std::size_t r = 0; r < nrec; ++r) {
        std::copy_n(d.values.begin() + r * oldV, oldV, values.begin() + r * newV);
        std::copy_n(d.missing.begin() + r * oldV, oldV, missing.begin() + r * newV);
    }
    d.variables.push_back(out);
    d.values = std::move(values);
    d.missing = std::move(missing);
    return oldV;  // index of the new column
}
} // namespace detail

/// out(t) = (var(t) - var(t-1)) / var(t-1); masked on first year and whenever
/// var(t-1) is missing or zero.
inline PanelDataset derive_growth_rate(PanelDataset d, const std::string& var,
                                       const std::string& out) {
    const std::size_t v = d.var_index(var);
    const std::size_t o = detail::append_variable(d, out);
    for (std::size_t i = 0; i < d.n_individuals(); ++i) {
        for (std::size_t t = 1; t < d.n_years(); ++t) {
            if (d.missing[d.cell(i, t, v)] || d.missing[d.cell(i, t - 1, v)]) continue;
            const double prev = d.values[d.cell(i, t - 1, v)];
            if (prev == 0.0) continue;
            d.values[d.cell(i, t, o)] = (d.values[d.cell(i, t, v)] - prev) / prev;
            d.missing[d.cell(i, t, o)] = 0;
        }
    }
    return d;
}

/// out(t) = var(t) - var(baseline_year); masked if either operand missing.
inline PanelDataset derive_difference(PanelDataset d, const std::string& var, int baseline_year,
                                      const std::string& out) {
    const std::size_t v = d.var_index(var);
    const std::size_t b = d.year_index(baseline_year);
    const std::size_t o = detail::append_variable(d, out);
    for (std::size_t i = 0; i < d.n_individuals(); ++i) {
        if (d.missing[d.cell(i, b, v)]) continue;  // whole row stays masked
        const double base = d.values[d.cell(i, b, v)];
        for (std::size_t t = 0; t < d.n_years(); ++t) {
            if (d.missing[d.cell(i, t, v)]) continue;
            d.values[d.cell(i, t, o)] = d.values[d.cell(i, t, v)] - base;
            d.missing[d.cell(i, t, o)] = 0;
        }
    }
    return d;
}

/// out(t) = var(t) / deflator(t). Deflator must cover every year and be positive.
inline PanelDataset deflate(PanelDataset d, const std::string& var,
                            const std::map<int, double>& deflator, const std::string& out) {
    const std::size_t v = d.var_index(var);
    for (int year : d.years) {
        auto it = deflator.find(year);
        if (it == deflator.end())
            throw ConfigError("deflate: no deflator for year " + std::to_string(year));
        if (!(it->second > 0.0))
            throw DomainError("deflate: non-positive deflator for year " + std::to_string(year));
    }
    const std::size_t o = detail::append_variable(d, out);
    for (std::size_t i = 0; i < d.n_individuals(); ++i) {
        for (std::size_t t = 0; t < d.n_years(); ++t) {
            if (d.missing[d.cell(i, t, v)]) continue;
            d.values[d.cell(i, t, o)] = d.values[d.cell(i, t, v)] / deflator.at(d.years[t]);
            d.missing[d.cell(i, t, o)] = 0;
        }
    }
    return d;
}

/// Stack the requested years as if they were different individuals.
/// Row order: individual-major, then year order.
inline ObservationMatrix pool_years(const PanelDataset& d, const std::vector<int>& years,
                                    const std::vector<std::string>& codes) {
    std::vector<std::size_t> year_idx, var_idx;
    for (int y : years) year_idx.push_back(d.year_index(y));
    for (const auto& c : codes) var_idx.push_back(d.var_index(c));

    ObservationMatrix m;
    m.variables = codes;
    m.n_rows = d.n_individuals() * years.size();
    m.values.reserve(m.n_rows * codes.size());
    m.missing.reserve(m.n_rows * codes.size());
    m.origins.reserve(m.n_rows);
    for (std::size_t i = 0; i < d.n_individuals(); ++i) {
        for (std::size_t k = 0; k < year_idx.size(); ++k) {
            m.origins.push_back({i, years[k]});
            for (std::size_t v : var_idx) {
                m.values.push_back(d.values[d.cell(i, year_idx[k], v)]);
                m.missing.push_back(d.missing[d.cell(i, year_idx[k], v)]);
            }
        }
    }
    return m;
}

/// Per-variable mean and population standard deviation over non-missing cells.
inline Standardization fit_standardization(const ObservationMatrix& m) {
    Standardization s;
    s.variables = m.variables;
    s.mean.resize(m.n_vars());
    s.scale.resize(m.n_vars());
    for (std::size_t v = 0; v < m.n_vars(); ++v) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t r = 0; r < m.n_rows; ++r) {
            if (m.missing[r * m.n_vars() + v]) continue;
            sum += m.values[r * m.n_vars() + v];
            ++n;
        }
        if (n < 2)
            throw ConfigError("standardize: variable " + m.variables[v] +
                              " has fewer than 2 observed values");
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < m.n_rows; ++r) {
            if (m.missing[r * m.n_vars() + v]) continue;
            const double dlt = m.values[r * m.n_vars() + v] - mean;
            ss += dlt * dlt;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        if (!(sd > 0.0))
            throw ConfigError("standardize: variable " + m.variables[v] + " is constant");
        s.mean[v] = mean;
        s.scale[v] = sd;
    }
    return s;
}

inline void standardize_row(const Standardization& s, const std::vector<std::string>& codes,
                            std::span<double> row, std::span<const std::uint8_t> mask) {
    for (std::size_t v = 0; v < codes.size(); ++v) {
        const std::size_t p = s.var_index(codes[v]);
        if (!mask[v]) row[v] = (row[v] - s.mean[p]) / s.scale[p];
    }
}

inline ObservationMatrix apply_standardization(const Standardization& s, ObservationMatrix m) {
    std::vector<std::size_t> pidx;
    for (const auto& c : m.variables) pidx.push_back(s.var_index(c));
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        for (std::size_t v = 0; v < m.n_vars(); ++v) {
            const std::size_t c = r * m.n_vars() + v;
            if (m.missing[c]) continue;
            m.values[c] = (m.values[c] - s.mean[pidx[v]]) / s.scale[pidx[v]];
        }
    }
    return m;
}

inline ObservationMatrix invert_standardization(const Standardization& s, ObservationMatrix m) {
    std::vector<std::size_t> pidx;
    for (const auto& c : m.variables) pidx.push_back(s.var_index(c));
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        for (std::size_t v = 0; v < m.n_vars(); ++v) {
            const std::size_t c = r * m.n_vars() + v;
            if (m.missing[c]) continue;
            m.values[c] = m.values[c] * s.scale[pidx[v]] + s.mean[pidx[v]];
        }
    }
    return m;
}

inline std::map<int, double> load_deflator(std::istream& in) {
    csv::Table t = csv::read(in);
    if (t.header.size() != 2 || t.header[0] != "year" || t.header[1] != "deflator")
        throw ParseError("deflator: header must be year,deflator");
    std::map<int, double> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const int year = static_cast<int>(csv::parse_long(t.rows[r][0], r + 2, "year"));
        out[year] = csv::parse_double(t.rows[r][1], r + 2, "deflator");
    }
    return out;
}

} // namespace panelsom

#endif
