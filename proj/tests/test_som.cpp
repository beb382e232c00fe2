#include <doctest.h>

#include <cmath>
#include <set>

#include "panelsom/rng.hpp"
#include "panelsom/serialize.hpp"
#include "panelsom/som.hpp"

using namespace panelsom;

namespace {

ObservationMatrix make_matrix(std::vector<std::vector<double>> rows) {
    ObservationMatrix m;
    m.n_rows = rows.size();
    const std::size_t V = rows.empty() ? 0 : rows[0].size();
    m.variables.resize(V);
    for (std::size_t v = 0; v < V; ++v) m.variables[v] = "v" + std::to_string(v);
    for (const auto& r : rows) {
        m.values.insert(m.values.end(), r.begin(), r.end());
        m.missing.insert(m.missing.end(), r.size(), 0);
    }
    m.origins.resize(m.n_rows);
    return m;
}

CodeBook two_unit_codebook() {
    CodeBook cb;
    cb.topology = Topology::chain(2);
    cb.dim = 2;
    cb.weights = {0, 0, 1, 1};
    return cb;
}

// Four well-separated clusters in 2D.
ObservationMatrix clustered_data(std::uint64_t seed, std::size_t per_cluster = 40) {
    Rng rng(seed);
    const double centers[4][2] = {{0, 0}, {10, 0}, {0, 10}, {10, 10}};
    std::vector<std::vector<double>> rows;
    for (int c = 0; c < 4; ++c)
        for (std::size_t i = 0; i < per_cluster; ++i)
            rows.push_back({centers[c][0] + 0.3 * rng.normal(), centers[c][1] + 0.3 * rng.normal()});
    return make_matrix(rows);
}

} // namespace

TEST_CASE("grid_distance") {
    const auto g = Topology::grid(8, 8);
    CHECK(g.grid_distance(0, 9) == 1);    // (0,0) -> (1,1), Chebyshev
    CHECK(g.grid_distance(0, 0) == 0);
    CHECK(g.grid_distance(0, 63) == 7);
    CHECK(g.grid_distance(7, 56) == 7);
    const auto c = Topology::chain(7);
    CHECK(c.grid_distance(2, 6) == 4);
    CHECK(c.grid_distance(3, 3) == 0);
    CHECK_THROWS_AS(c.grid_distance(0, 7), ConfigError);
    // symmetry on random pairs
    for (int a = 0; a < 64; ++a)
        for (int b = 0; b < 64; b += 7) CHECK(g.grid_distance(a, b) == g.grid_distance(b, a));
}

TEST_CASE("neighborhood_weight") {
    CHECK(neighborhood_weight(Kernel::Hard, 0.0, 0) == 1.0);
    CHECK(neighborhood_weight(Kernel::Gaussian, 0.5, 0) == 1.0);
    CHECK(neighborhood_weight(Kernel::Hard, 1.0, 2) == 0.0);
    CHECK(neighborhood_weight(Kernel::Hard, 1.0, 1) == 1.0);
    CHECK(neighborhood_weight(Kernel::Gaussian, 1.0, 1) == doctest::Approx(std::exp(-0.5)));
    // non-increasing in distance
    for (double r : {0.5, 1.0, 3.0})
        for (int d = 0; d < 6; ++d)
            CHECK(neighborhood_weight(Kernel::Gaussian, r, d) >=
                  neighborhood_weight(Kernel::Gaussian, r, d + 1));
}

TEST_CASE("bmu with partial distance") {
    const auto cb = two_unit_codebook();
    const std::vector<double> x1{0.1, 0.1};
    const std::vector<std::uint8_t> none{0, 0};
    CHECK(bmu(cb, x1, none).unit == 0);

    SUBCASE("missing coordinate compares the rest only") {
        const std::vector<double> x2{123.0, 0.9};
        const std::vector<std::uint8_t> first_missing{1, 0};
        const auto r = bmu(cb, x2, first_missing);
        CHECK(r.unit == 1);
        CHECK(r.distance == doctest::Approx(0.1));
    }
    SUBCASE("tie breaks to the lowest unit index") {
        const std::vector<double> x3{0.5, 0.5};
        CHECK(bmu(cb, x3, none).unit == 0);
    }
    SUBCASE("all-missing observation is an error") {
        const std::vector<double> x4{0, 0};
        const std::vector<std::uint8_t> all{1, 1};
        CHECK_THROWS_AS(bmu(cb, x4, all), DomainError);
    }
}

TEST_CASE("bmu equals brute force over units on random masked observations") {
    Rng rng(7);
    CodeBook cb;
    cb.topology = Topology::grid(4, 5);
    cb.dim = 6;
    cb.weights.resize(20 * 6);
    for (double& w : cb.weights) w = rng.uniform(-2, 2);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(6);
        std::vector<std::uint8_t> miss(6, 0);
        for (int v = 0; v < 6; ++v) {
            x[v] = rng.uniform(-2, 2);
            miss[v] = rng.uniform() < 0.3 ? 1 : 0;
        }
        if (std::all_of(miss.begin(), miss.end(), [](auto m) { return m == 1; })) miss[0] = 0;
        // brute force
        int best = -1;
        double best_d = 1e300;
        for (int u = 0; u < 20; ++u) {
            double sq = 0;
            for (int v = 0; v < 6; ++v)
                if (!miss[v]) sq += (x[v] - cb.unit(u)[v]) * (x[v] - cb.unit(u)[v]);
            if (sq < best_d) {
                best_d = sq;
                best = u;
            }
        }
        const auto r = bmu(cb, x, miss);
        CHECK(r.unit == best);
        CHECK(r.distance == doctest::Approx(std::sqrt(best_d)));
    }
}

TEST_CASE("bmu invariant under appending a missing coordinate") {
    Rng rng(21);
    CodeBook cb;
    cb.topology = Topology::chain(5);
    cb.dim = 3;
    cb.weights.resize(15);
    for (double& w : cb.weights) w = rng.uniform(-1, 1);
    CodeBook cb2 = cb;
    cb2.dim = 4;
    cb2.weights.clear();
    for (int u = 0; u < 5; ++u) {
        for (int v = 0; v < 3; ++v) cb2.weights.push_back(cb.unit(u)[v]);
        cb2.weights.push_back(rng.uniform(-9, 9));
    }
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        std::vector<std::uint8_t> miss{0, 0, 0};
        auto x4 = x;
        x4.push_back(0.0);
        std::vector<std::uint8_t> miss4{0, 0, 0, 1};
        CHECK(bmu(cb, x, miss).unit == bmu(cb2, x4, miss4).unit);
    }
}

TEST_CASE("init_codebook") {
    const auto data = make_matrix({{0, 5}, {1, 6}, {2, 7}, {3, 8}});
    SUBCASE("same seed gives bit-identical codebooks") {
        const auto a = init_codebook(Topology::grid(3, 3), data, 42);
        const auto b = init_codebook(Topology::grid(3, 3), data, 42);
        CHECK(a.weights == b.weights);
    }
    SUBCASE("sample initialization copies data rows when fully observed") {
        const auto cb = init_codebook(Topology::chain(6), data, 3, InitMethod::Sample);
        for (int u = 0; u < 6; ++u) {
            bool found = false;
            for (std::size_t r = 0; r < data.n_rows; ++r)
                if (cb.unit(u)[0] == data.row(r)[0] && cb.unit(u)[1] == data.row(r)[1]) found = true;
            CHECK(found);
        }
    }
    SUBCASE("uniform-box respects a degenerate [0,0] range") {
        const auto flat = make_matrix({{0, 1}, {0, 2}, {0, 3}});
        const auto cb = init_codebook(Topology::chain(4), flat, 5, InitMethod::UniformBox);
        for (int u = 0; u < 4; ++u) CHECK(cb.unit(u)[0] == 0.0);
    }
    SUBCASE("empty data is a configuration error") {
        ObservationMatrix empty;
        empty.variables = {"x"};
        CHECK_THROWS_AS(init_codebook(Topology::chain(2), empty, 0), ConfigError);
    }
}

TEST_CASE("online update formula on a single unit") {
    CodeBook cb;
    cb.topology = Topology::chain(1);
    cb.dim = 2;
    cb.weights = {0, 0};
    auto data = make_matrix({{1, 0}});
    TrainingSchedule s;
    s.epochs = 1;
    s.lr_start = s.lr_end = 0.5;
    s.shuffle = false;
    const auto r = train_online(cb, data, s);
    CHECK(r.codebook.weights[0] == doctest::Approx(0.5));
    CHECK(r.codebook.weights[1] == 0.0);
}

TEST_CASE("online training contracts toward a repeated observation") {
    CodeBook cb;
    cb.topology = Topology::chain(1);
    cb.dim = 1;
    cb.weights = {10.0};
    auto data = make_matrix({{2.0}});
    TrainingSchedule s;
    s.epochs = 20;
    s.lr_start = s.lr_end = 0.3;
    s.shuffle = false;
    double prev = 8.0;
    CodeBook cur = cb;
    for (int e = 0; e < 20; ++e) {
        TrainingSchedule one = s;
        one.epochs = 1;
        cur = train_online(cur, data, one).codebook;
        const double dist = std::abs(cur.weights[0] - 2.0);
        CHECK(dist < prev);
        prev = dist;
    }
}

TEST_CASE("online update locality: missing coordinates untouched") {
    CodeBook cb;
    cb.topology = Topology::chain(3);
    cb.dim = 3;
    cb.weights = {0, 0, 0, 1, 1, 1, 2, 2, 2};
    ObservationMatrix data = make_matrix({{0.5, 99.0, 0.5}});
    data.missing = {0, 1, 0};
    TrainingSchedule s;
    s.epochs = 1;
    s.lr_start = s.lr_end = 0.5;
    s.radius_start = s.radius_end = 2.0;  // every unit updated
    s.shuffle = false;
    const auto r = train_online(cb, data, s);
    for (int u = 0; u < 3; ++u)
        CHECK(r.codebook.unit(u)[1] == cb.unit(u)[1]);  // masked coordinate unchanged
    CHECK(r.codebook.unit(0)[0] == doctest::Approx(0.25));
}

TEST_CASE("training is deterministic given data, schedule and seed") {
    const auto data = clustered_data(11);
    const auto topo = Topology::grid(4, 4);
    auto sched = TrainingSchedule::defaults_for(topo);
    sched.epochs = 10;
    sched.seed = 99;
    const auto cb = init_codebook(topo, data, 99);
    const auto a = train_online(cb, data, sched);
    const auto b = train_online(cb, data, sched);
    CHECK(a.codebook.weights == b.codebook.weights);
    CHECK(a.qe_trace == b.qe_trace);
    const auto ba = train_batch(cb, data, sched);
    const auto bb = train_batch(cb, data, sched);
    CHECK(ba.codebook.weights == bb.codebook.weights);
}

TEST_CASE("batch training at radius 0 is Lloyd k-means") {
    // Independent oracle: one assignment + centroid step.
    const auto data = make_matrix({{0, 0}, {0.4, 0.1}, {1, 1}, {1.2, 0.8}, {5, 5},
                                   {5.3, 4.9}, {4.8, 5.1}, {9, 0}, {9.2, 0.3}, {8.8, -0.2}});
    CodeBook seeds;
    seeds.topology = Topology::chain(3);
    seeds.dim = 2;
    seeds.weights = {0, 0, 5, 5, 9, 0};

    auto lloyd_step = [&](const CodeBook& cb) {
        std::vector<std::vector<double>> sums(3, std::vector<double>(2, 0.0));
        std::vector<int> counts(3, 0);
        std::vector<int> assign(data.n_rows);
        for (std::size_t r = 0; r < data.n_rows; ++r) {
            int best = 0;
            double bd = 1e300;
            for (int u = 0; u < 3; ++u) {
                double sq = 0;
                for (int v = 0; v < 2; ++v)
                    sq += (data.row(r)[v] - cb.unit(u)[v]) * (data.row(r)[v] - cb.unit(u)[v]);
                if (sq < bd) {
                    bd = sq;
                    best = u;
                }
            }
            assign[r] = best;
            ++counts[best];
            for (int v = 0; v < 2; ++v) sums[best][v] += data.row(r)[v];
        }
        CodeBook next = cb;
        for (int u = 0; u < 3; ++u)
            if (counts[u])
                for (int v = 0; v < 2; ++v) next.unit(u)[v] = sums[u][v] / counts[u];
        return next;
    };

    TrainingSchedule s;
    s.epochs = 1;
    s.radius_start = s.radius_end = 0.0;
    CodeBook expect = seeds;
    CodeBook got = seeds;
    for (int iter = 0; iter < 4; ++iter) {
        expect = lloyd_step(expect);
        got = train_batch(got, data, s).codebook;
        for (std::size_t i = 0; i < expect.weights.size(); ++i)
            CHECK(got.weights[i] == doctest::Approx(expect.weights[i]).epsilon(1e-12));
    }
}

TEST_CASE("k-means objective is non-increasing across radius-0 batch epochs") {
    // Lloyd steps are monotone in the summed squared BMU distance; the mean
    // unsquared distance reported as QE can wobble, so assert the objective.
    auto sse = [](const CodeBook& cb, const ObservationMatrix& data) {
        double s = 0;
        for (std::size_t r = 0; r < data.n_rows; ++r) {
            const double d = bmu(cb, data, r).distance;
            s += d * d;
        }
        return s;
    };
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto data = clustered_data(seed, 25);
        auto cb = init_codebook(Topology::chain(6), data, seed);
        TrainingSchedule s;
        s.epochs = 1;
        s.radius_start = s.radius_end = 0.0;
        double prev = sse(cb, data);
        for (int e = 0; e < 8; ++e) {
            cb = train_batch(std::move(cb), data, s).codebook;
            const double cur = sse(cb, data);
            CHECK(cur <= prev + 1e-9);
            prev = cur;
        }
    }
}

TEST_CASE("batch: identical rows collapse reachable units; empty clusters keep weights") {
    const auto data = make_matrix({{3, 3}, {3, 3}, {3, 3}});
    CodeBook cb;
    cb.topology = Topology::chain(2);
    cb.dim = 2;
    cb.weights = {0, 0, 100, 100};
    TrainingSchedule s;
    s.epochs = 1;
    s.radius_start = s.radius_end = 0.0;
    const auto r = train_batch(cb, data, s);
    CHECK(r.codebook.unit(0)[0] == doctest::Approx(3.0));
    CHECK(r.codebook.unit(1)[0] == 100.0);  // no assignment, unchanged
}

TEST_CASE("quantization_error") {
    const auto data = make_matrix({{0, 0}, {2, 0}});
    CodeBook cb;
    cb.topology = Topology::chain(1);
    cb.dim = 2;
    cb.weights = {1, 0};  // centroid, both points at distance 1
    CHECK(quantization_error(cb, data) == doctest::Approx(1.0));

    CodeBook exact;
    exact.topology = Topology::chain(2);
    exact.dim = 2;
    exact.weights = {0, 0, 2, 0};
    CHECK(quantization_error(exact, data) == 0.0);

    SUBCASE("duplicating a present row leaves the mean unchanged") {
        auto dup = make_matrix({{0, 0}, {2, 0}, {2, 0}});
        CHECK(quantization_error(cb, dup) == doctest::Approx(1.0));
    }
    SUBCASE("empty data is an error") {
        ObservationMatrix empty;
        empty.variables = {"a", "b"};
        CHECK_THROWS_AS(quantization_error(cb, empty), ConfigError);
    }
}

TEST_CASE("trained neighbors have closer profiles than arbitrary unit pairs") {
    const auto data = clustered_data(5, 50);
    const auto topo = Topology::grid(4, 4);
    auto sched = TrainingSchedule::defaults_for(topo);
    sched.epochs = 40;
    sched.seed = 5;
    const auto cb = train_online(init_codebook(topo, data, 5), data, sched).codebook;

    double adj_sum = 0, all_sum = 0;
    int adj_n = 0, all_n = 0;
    auto wdist = [&](int a, int b) {
        double sq = 0;
        for (int v = 0; v < cb.dim; ++v)
            sq += (cb.unit(a)[v] - cb.unit(b)[v]) * (cb.unit(a)[v] - cb.unit(b)[v]);
        return std::sqrt(sq);
    };
    for (int a = 0; a < 16; ++a)
        for (int b = a + 1; b < 16; ++b) {
            const double d = wdist(a, b);
            all_sum += d;
            ++all_n;
            if (topo.grid_distance(a, b) == 1) {
                adj_sum += d;
                ++adj_n;
            }
        }
    CHECK(adj_sum / adj_n < all_sum / all_n);
}

TEST_CASE("codebook JSON round trip preserves weights bit-for-bit") {
    const auto data = clustered_data(13, 10);
    auto sched = TrainingSchedule::defaults_for(Topology::grid(3, 3));
    sched.epochs = 3;
    sched.seed = 13;
    const auto cb = train_online(init_codebook(Topology::grid(3, 3), data, 13), data, sched).codebook;
    MapArtifact art{cb, fit_standardization(data), sched, 13};
    const auto j = to_json(art);
    const auto back = map_artifact_from_json(json::parse(j.dump()));
    CHECK(back.codebook.weights == cb.weights);
    CHECK(back.codebook.topology.rows == 3);
    CHECK(back.standardization.mean == art.standardization.mean);
    CHECK(back.schedule.epochs == 3);
}
