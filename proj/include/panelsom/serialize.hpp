#ifndef PANELSOM_SERIALIZE_HPP
#define PANELSOM_SERIALIZE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "panelsom/errors.hpp"
#include "panelsom/grouping.hpp"
#include "panelsom/panel.hpp"
#include "panelsom/pca.hpp"
#include "panelsom/som.hpp"
#include "panelsom/synth.hpp"

namespace panelsom {

using json = nlohmann::json;

// -- schedule ----------------------------------------------------------------

inline json to_json(const TrainingSchedule& s) {
    auto decay = [](Decay d) { return d == Decay::Linear ? "linear" : "exponential"; };
    return json{{"epochs", s.epochs},
                {"learning_rate", {{"start", s.lr_start}, {"end", s.lr_end}, {"decay", decay(s.lr_decay)}}},
                {"radius", {{"start", s.radius_start}, {"end", s.radius_end}, {"decay", decay(s.radius_decay)}}},
                {"kernel", s.kernel == Kernel::Hard ? "hard" : "gaussian"},
                {"seed", s.seed},
                {"shuffle", s.shuffle}};
}

inline TrainingSchedule schedule_from_json(const json& j) {
    auto decay = [](const std::string& d) {
        if (d == "linear") return Decay::Linear;
        if (d == "exponential") return Decay::Exponential;
        throw ConfigError("schedule: unknown decay '" + d + "'");
    };
    TrainingSchedule s;
    s.epochs = j.at("epochs").get<int>();
    s.lr_start = j.at("learning_rate").at("start").get<double>();
    s.lr_end = j.at("learning_rate").at("end").get<double>();
    s.lr_decay = decay(j.at("learning_rate").at("decay").get<std::string>());
    s.radius_start = j.at("radius").at("start").get<double>();
    s.radius_end = j.at("radius").at("end").get<double>();
    s.radius_decay = decay(j.at("radius").at("decay").get<std::string>());
    const std::string k = j.at("kernel").get<std::string>();
    if (k == "hard")
        s.kernel = Kernel::Hard;
    else if (k == "gaussian")
        s.kernel = Kernel::Gaussian;
    else
        throw ConfigError("schedule: unknown kernel '" + k + "'");
    s.seed = j.at("seed").get<std::uint64_t>();
    s.shuffle = j.at("shuffle").get<bool>();
    s.validate();
    return s;
}

// -- codebook artifact -------------------------------------------------------

/// Trained map plus everything needed to reproduce projections exactly:
/// variable codes, standardization parameters, seed and schedule.
struct MapArtifact {
    CodeBook codebook;
    Standardization standardization;
    TrainingSchedule schedule;
    std::uint64_t seed = 0;
};

inline json to_json(const Topology& t) {
    if (t.kind == Topology::Kind::Grid2d)
        return json{{"kind", "grid2d"}, {"rows", t.rows}, {"cols", t.cols}};
    return json{{"kind", "chain"}, {"length", t.cols}};
}

inline Topology topology_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "grid2d") return Topology::grid(j.at("rows").get<int>(), j.at("cols").get<int>());
    if (kind == "chain") return Topology::chain(j.at("length").get<int>());
    throw ConfigError("topology: unknown kind '" + kind + "'");
}

inline json to_json(const CodeBook& cb) {
    return json{{"topology", to_json(cb.topology)}, {"dimension", cb.dim}, {"weights", cb.weights}};
}

inline CodeBook codebook_from_json(const json& j) {
    CodeBook cb;
    cb.topology = topology_from_json(j.at("topology"));
    cb.dim = j.at("dimension").get<int>();
    cb.weights = j.at("weights").get<std::vector<double>>();
    if (cb.weights.size() != static_cast<std::size_t>(cb.topology.units()) * cb.dim)
        throw ConfigError("codebook: weight count does not match topology and dimension");
    for (double w : cb.weights)
        if (!std::isfinite(w)) throw ConfigError("codebook: non-finite weight");
    return cb;
}

inline json to_json(const Standardization& s) {
    return json{{"variables", s.variables}, {"mean", s.mean}, {"scale", s.scale}};
}

inline Standardization standardization_from_json(const json& j) {
    Standardization s;
    s.variables = j.at("variables").get<std::vector<std::string>>();
    s.mean = j.at("mean").get<std::vector<double>>();
    s.scale = j.at("scale").get<std::vector<double>>();
    if (s.mean.size() != s.variables.size() || s.scale.size() != s.variables.size())
        throw ConfigError("standardization: arity mismatch");
    for (double sc : s.scale)
        if (!(sc > 0.0)) throw ConfigError("standardization: non-positive scale");
    return s;
}

inline json to_json(const MapArtifact& a) {
    return json{{"codebook", to_json(a.codebook)},
                {"catalog", a.standardization.variables},
                {"standardization", to_json(a.standardization)},
                {"schedule", to_json(a.schedule)},
                {"seed", a.seed}};
}

inline MapArtifact map_artifact_from_json(const json& j) {
    MapArtifact a;
    a.codebook = codebook_from_json(j.at("codebook"));
    a.standardization = standardization_from_json(j.at("standardization"));
    a.schedule = schedule_from_json(j.at("schedule"));
    a.seed = j.at("seed").get<std::uint64_t>();
    return a;
}

// -- grouping ----------------------------------------------------------------

inline json to_json(const SuperClassMap& m) {
    return json{{"k", m.k},
                {"unit_to_super", m.unit_to_super},
                {"chain_codebook", to_json(m.chain_codebook)},
                {"empty_superclasses", m.empty_superclasses()}};
}

inline SuperClassMap superclassmap_from_json(const json& j) {
    SuperClassMap m;
    m.k = j.at("k").get<int>();
    m.unit_to_super = j.at("unit_to_super").get<std::vector<int>>();
    m.chain_codebook = codebook_from_json(j.at("chain_codebook"));
    for (int s : m.unit_to_super)
        if (s < 1 || s > m.k) throw ConfigError("super-class map: label out of range");
    return m;
}

inline json to_json(const MainClassMap& m) {
    json j = json::object();
    for (const auto& [s, c] : m.super_to_main) j[std::to_string(s)] = std::string(1, c);
    return json{{"super_to_main", j}};
}

inline MainClassMap mainclassmap_from_json(const json& j) {
    MainClassMap m;
    for (const auto& [k, v] : j.at("super_to_main").items()) {
        const std::string label = v.get<std::string>();
        if (label.size() != 1) throw ConfigError("main-class map: labels must be single characters");
        m.super_to_main[std::stoi(k)] = label[0];
    }
    return m;
}

// -- pca ---------------------------------------------------------------------

inline json to_json(const PcaResult& r) {
    return json{{"variables", r.variables},
                {"eigenvalues", r.eigenvalues},
                {"loadings", r.loadings},
                {"explained", r.explained}};
}

// -- synth config ------------------------------------------------------------

inline json to_json(const SynthConfig& c) {
    json rows = json::array();
    const std::size_t A = c.latent_P.size();
    for (std::size_t i = 0; i < A; ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < A; ++k) row.push_back(c.latent_P.at(i, k));
        rows.push_back(std::move(row));
    }
    json em = json::array();
    for (const auto& e : c.emissions) em.push_back(json{{"mean", e.mean}, {"spread", e.spread}});
    return json{{"n_individuals", c.n_individuals},
                {"years", c.years},
                {"variables", c.variables},
                {"classes", c.latent_P.labels},
                {"latent_P", rows},
                {"initial", c.initial.p},
                {"emissions", em},
                {"missing_rate", c.missing_rate},
                {"seed", c.seed}};
}

inline SynthConfig synth_config_from_json(const json& j) {
    SynthConfig c;
    c.n_individuals = j.at("n_individuals").get<int>();
    c.years = j.at("years").get<std::vector<int>>();
    c.variables = j.at("variables").get<std::vector<std::string>>();
    c.latent_P.labels = j.at("classes").get<std::vector<std::string>>();
    const auto& rows = j.at("latent_P");
    for (const auto& row : rows)
        for (const auto& v : row) c.latent_P.p.push_back(v.get<double>());
    if (c.latent_P.p.size() != c.latent_P.labels.size() * c.latent_P.labels.size())
        throw ConfigError("synth config: latent_P shape mismatch");
    c.initial.labels = c.latent_P.labels;
    c.initial.p = j.at("initial").get<std::vector<double>>();
    for (const auto& e : j.at("emissions")) {
        SynthConfig::ClassEmission em;
        em.mean = e.at("mean").get<std::vector<double>>();
        em.spread = e.at("spread").get<std::vector<double>>();
        c.emissions.push_back(std::move(em));
    }
    c.missing_rate = j.value("missing_rate", 0.0);
    c.seed = j.value("seed", std::uint64_t{0});
    c.validate();
    return c;
}

} // namespace panelsom

#endif
