#include <doctest.h>

#include <cmath>
#include <sstream>

#include "panelsom/panel.hpp"

using namespace panelsom;

namespace {

PanelDataset tiny_panel() {
    std::istringstream in(
        "individual_id,year,A,B\n"
        "p1,2000,1,10\n"
        "p1,2001,2,11\n"
        "p1,2002,3,\n"
        "p2,2000,4,0\n"
        "p2,2001,5,12\n"
        "p2,2002,6,13\n");
    return load_panel(in);
}

} // namespace

TEST_CASE("default variable catalog holds the 15 codes in lexicographic order") {
    const auto cat = VariableCatalog::household_default();
    const std::vector<std::string> expect = {"AGEH",  "ANCH",   "GRSALH", "HEXJH", "HMJH",
                                             "HWMJH", "NBXJH",  "RSALH",  "SENH",  "SIZFAM",
                                             "VHWMJH", "VWMJH", "WMJH",   "WOUTH", "WUNEH"};
    CHECK(cat.codes() == expect);
    int observed = 0, derived = 0;
    for (const auto& e : cat.entries)
        (e.kind == VariableKind::Observed ? observed : derived)++;
    CHECK(observed == 12);
    CHECK(derived == 3);
    auto cat2 = cat;
    CHECK_THROWS_AS(cat2.add({"AGEH", VariableKind::Observed, "dup"}), ConfigError);
}

TEST_CASE("load_panel shape bookkeeping") {
    const auto d = tiny_panel();
    CHECK(d.n_individuals() == 2);
    CHECK(d.n_years() == 3);
    CHECK(d.n_variables() == 2);
    CHECK(d.years == std::vector<int>{2000, 2001, 2002});
    CHECK(d.values[d.cell(1, 2, 0)] == 6.0);
}

TEST_CASE("empty cell becomes a masked entry") {
    const auto d = tiny_panel();
    CHECK(d.missing[d.cell(0, 2, 1)] == 1);
    CHECK(d.missing[d.cell(0, 2, 0)] == 0);
}

TEST_CASE("duplicate (id, year) is rejected with the line number") {
    std::istringstream in(
        "individual_id,year,A\n"
        "p1,2000,1\n"
        "p1,2000,2\n");
    CHECK_THROWS_WITH_AS(load_panel(in), doctest::Contains("line 3"), ParseError);
}

TEST_CASE("malformed rows name the offending line") {
    std::istringstream bad_arity(
        "individual_id,year,A\n"
        "p1,2000,1,9\n");
    CHECK_THROWS_WITH_AS(load_panel(bad_arity), doctest::Contains("line 2"), ParseError);
    std::istringstream bad_number(
        "individual_id,year,A\n"
        "p1,2000,xyz\n");
    CHECK_THROWS_WITH_AS(load_panel(bad_number), doctest::Contains("line 2"), ParseError);
}

TEST_CASE("categorical columns are kept apart from numeric variables") {
    std::istringstream in(
        "individual_id,year,A,RACE\n"
        "p1,2000,1,white\n"
        "p1,2001,2,black\n");
    LoadOptions opts;
    opts.categorical_columns = {"RACE"};
    const auto d = load_panel(in, opts);
    CHECK(d.n_variables() == 1);
    CHECK(d.categoricals.at("RACE")[d.record(0, 1)] == "black");
}

TEST_CASE("growth rate: direct arithmetic and masking rules") {
    auto d = tiny_panel();
    d = derive_growth_rate(std::move(d), "A", "GA");
    const std::size_t g = d.var_index("GA");
    // first year masked
    CHECK(d.missing[d.cell(0, 0, g)] == 1);
    // 1 -> 2 is +100%
    CHECK(d.values[d.cell(0, 1, g)] == doctest::Approx(1.0));
    // 10 then 11 -> 0.10
    auto e = derive_growth_rate(tiny_panel(), "B", "GB");
    CHECK(e.values[e.cell(0, 1, e.var_index("GB"))] == doctest::Approx(0.10));
    // zero denominator masked (p2 B: 0 -> 12)
    CHECK(e.missing[e.cell(1, 1, e.var_index("GB"))] == 1);
    // missing denominator masked (p1 B masked at 2002 -> no growth possible beyond)
    CHECK(e.missing[e.cell(0, 2, e.var_index("GB"))] == 1);
    CHECK_THROWS_AS(derive_growth_rate(tiny_panel(), "NOPE", "X"), ConfigError);
}

TEST_CASE("growth rate round trip: prev * (1 + g) recovers the value") {
    auto d = derive_growth_rate(tiny_panel(), "A", "GA");
    const std::size_t a = d.var_index("A"), g = d.var_index("GA");
    for (std::size_t i = 0; i < d.n_individuals(); ++i)
        for (std::size_t t = 1; t < d.n_years(); ++t) {
            if (d.missing[d.cell(i, t, g)]) continue;
            const double back = d.values[d.cell(i, t - 1, a)] * (1.0 + d.values[d.cell(i, t, g)]);
            CHECK(back == doctest::Approx(d.values[d.cell(i, t, a)]).epsilon(1e-12));
        }
}

TEST_CASE("difference since baseline") {
    auto d = derive_difference(tiny_panel(), "A", 2000, "DA");
    const std::size_t o = d.var_index("DA");
    CHECK(d.values[d.cell(0, 0, o)] == 0.0);
    CHECK(d.values[d.cell(0, 1, o)] == 1.0);
    CHECK(d.values[d.cell(0, 2, o)] == 2.0);

    SUBCASE("missing baseline masks the whole individual") {
        std::istringstream in(
            "individual_id,year,V\n"
            "p1,2000,\n"
            "p1,2001,38\n"
            "p1,2002,45\n");
        auto e = derive_difference(load_panel(in), "V", 2000, "DV");
        const std::size_t v = e.var_index("DV");
        for (std::size_t t = 0; t < 3; ++t) CHECK(e.missing[e.cell(0, t, v)] == 1);
    }
    SUBCASE("colliding output code is a catalog error") {
        CHECK_THROWS_AS(derive_difference(tiny_panel(), "A", 2000, "B"), ConfigError);
    }
    SUBCASE("absent baseline year is a configuration error") {
        CHECK_THROWS_AS(derive_difference(tiny_panel(), "A", 1999, "DA"), ConfigError);
    }
}

TEST_CASE("deflate") {
    std::map<int, double> defl{{2000, 1.25}, {2001, 1.0}, {2002, 1.0}};
    auto d = deflate(tiny_panel(), "B", defl, "RB");
    const std::size_t o = d.var_index("RB");
    CHECK(d.values[d.cell(0, 0, o)] == doctest::Approx(8.0));
    CHECK(d.values[d.cell(0, 1, o)] == doctest::Approx(11.0));  // deflator 1 is the identity
    CHECK(d.missing[d.cell(0, 2, o)] == 1);

    SUBCASE("zero deflator is a domain error") {
        defl[2001] = 0.0;
        CHECK_THROWS_AS(deflate(tiny_panel(), "B", defl, "RB"), DomainError);
    }
    SUBCASE("missing deflator year is a configuration error") {
        defl.erase(2002);
        CHECK_THROWS_AS(deflate(tiny_panel(), "B", defl, "RB"), ConfigError);
    }
}

TEST_CASE("pool_years stacks year-major within individual") {
    const auto d = tiny_panel();
    const auto m = pool_years(d, {2000, 2002}, {"A", "B"});
    CHECK(m.n_rows == 4);
    CHECK(m.row(0)[0] == 1.0);
    CHECK(m.row(1)[0] == 3.0);
    CHECK(m.row(2)[0] == 4.0);
    CHECK(m.origins[1].individual == 0);
    CHECK(m.origins[1].year == 2002);

    SUBCASE("provenance is a bijection onto (individual, year) pairs") {
        std::set<std::pair<std::size_t, int>> seen;
        for (const auto& o : m.origins) CHECK(seen.insert({o.individual, o.year}).second);
        CHECK(seen.size() == d.n_individuals() * 2);
    }
    SUBCASE("empty year list gives zero rows") {
        const auto e = pool_years(d, {}, {"A"});
        CHECK(e.n_rows == 0);
    }
    SUBCASE("absent year is a configuration error") {
        CHECK_THROWS_AS(pool_years(d, {1999}, {"A"}), ConfigError);
    }
}

TEST_CASE("fit_standardization uses the population convention") {
    ObservationMatrix m;
    m.variables = {"X"};
    m.n_rows = 3;
    m.values = {1, 2, 3};
    m.missing = {0, 0, 0};
    const auto s = fit_standardization(m);
    CHECK(s.mean[0] == doctest::Approx(2.0));
    CHECK(s.scale[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));  // 0.8165

    SUBCASE("constant column is a degenerate-variable error naming the code") {
        m.values = {5, 5, 5};
        CHECK_THROWS_WITH_AS(fit_standardization(m), doctest::Contains("X"), ConfigError);
    }
    SUBCASE("missing entries are excluded") {
        m.values = {1, 99, 3};
        m.missing = {0, 1, 0};
        const auto s2 = fit_standardization(m);
        CHECK(s2.mean[0] == doctest::Approx(2.0));
        CHECK(s2.scale[0] == doctest::Approx(1.0));
    }
}

TEST_CASE("apply_standardization") {
    ObservationMatrix m;
    m.variables = {"X"};
    m.n_rows = 3;
    m.values = {1, 2, 3};
    m.missing = {0, 0, 0};
    const auto s = fit_standardization(m);
    const auto z = apply_standardization(s, m);
    CHECK(z.values[0] == doctest::Approx(-1.224744871).epsilon(1e-6));
    CHECK(z.values[1] == doctest::Approx(0.0));
    CHECK(z.values[2] == doctest::Approx(1.224744871).epsilon(1e-6));

    SUBCASE("values at the mean map to zero") {
        m.values = {2, 2, 2};
        const auto z2 = apply_standardization(s, m);
        for (double v : z2.values) CHECK(v == 0.0);
    }
    SUBCASE("masked cells stay masked") {
        m.missing = {0, 1, 0};
        const auto z2 = apply_standardization(s, m);
        CHECK(z2.missing[1] == 1);
        CHECK(z2.values[1] == m.values[1]);
    }
    SUBCASE("unknown variable is a configuration error") {
        m.variables = {"Y"};
        CHECK_THROWS_AS(apply_standardization(s, m), ConfigError);
    }
}

TEST_CASE("standardization round trip and re-fit invariants") {
    ObservationMatrix m;
    m.variables = {"X", "Y"};
    m.n_rows = 5;
    m.values = {1.5, -3, 2.25, 8, -0.5, 4, 7.75, 1, 3.25, -2};
    m.missing.assign(10, 0);
    const auto s = fit_standardization(m);
    const auto z = apply_standardization(s, m);
    const auto back = invert_standardization(s, z);
    for (std::size_t i = 0; i < m.values.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(m.values[i]).epsilon(1e-12));

    const auto s2 = fit_standardization(z);
    for (std::size_t v = 0; v < 2; ++v) {
        CHECK(std::abs(s2.mean[v]) <= 1e-12);
        CHECK(s2.scale[v] == doctest::Approx(1.0).epsilon(1e-12));
    }
}
