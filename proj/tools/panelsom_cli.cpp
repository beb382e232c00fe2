// Command-line pipeline: synth -> train -> group -> trajectories -> markov,
// plus pca diagnostics and SVG reports. Every subcommand writes its outputs
// together with a run manifest into --out-dir.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "panelsom/errors.hpp"
#include "panelsom/grouping.hpp"
#include "panelsom/manifest.hpp"
#include "panelsom/markov.hpp"
#include "panelsom/panel.hpp"
#include "panelsom/pca.hpp"
#include "panelsom/serialize.hpp"
#include "panelsom/som.hpp"
#include "panelsom/svg.hpp"
#include "panelsom/synth.hpp"
#include "panelsom/trajectory.hpp"

namespace ps = panelsom;
namespace fs = std::filesystem;

namespace {

using Outputs = std::map<std::string, std::string>;

std::vector<int> parse_years(const std::string& spec) {
    std::vector<int> years;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        years.push_back(std::stoi(tok));
    }
    if (years.empty()) throw ps::ConfigError("no years given");
    return years;
}

std::vector<std::string> parse_list(const std::string& spec) {
    std::vector<std::string> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

ps::json load_json_file(const std::string& path) {
    return ps::json::parse(ps::read_file(path));
}

std::string panel_to_csv(const ps::PanelDataset& d) {
    std::ostringstream out;
    out << "individual_id,year";
    for (const auto& v : d.variables) out << ',' << v;
    for (const auto& [attr, _] : d.categoricals) out << ',' << attr;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < d.n_individuals(); ++i) {
        for (std::size_t t = 0; t < d.n_years(); ++t) {
            out << d.individual_ids[i] << ',' << d.years[t];
            for (std::size_t v = 0; v < d.n_variables(); ++v) {
                out << ',';
                if (!d.missing[d.cell(i, t, v)]) {
                    std::snprintf(buf, sizeof buf, "%.17g", d.values[d.cell(i, t, v)]);
                    out << buf;
                }
            }
            for (const auto& [attr, vals] : d.categoricals) out << ',' << vals[d.record(i, t)];
            out << '\n';
        }
    }
    return out.str();
}

std::string trajectories_to_csv(const ps::TrajectorySet& ts) {
    std::ostringstream out;
    out << "individual_id";
    for (int y : ts.years) out << ",y" << y;
    out << '\n';
    for (std::size_t i = 0; i < ts.n(); ++i) {
        out << ts.individual_ids[i];
        for (std::size_t t = 0; t < ts.T(); ++t) out << ',' << ts.alphabet[ts.label(i, t)];
        out << '\n';
    }
    return out.str();
}

ps::TrajectorySet trajectories_from_csv(std::istream& in) {
    auto t = ps::csv::read(in);
    if (t.header.size() < 2 || t.header[0] != "individual_id")
        throw ps::ParseError("trajectories: header must be individual_id,y<year>,...");
    ps::TrajectorySet ts;
    for (std::size_t c = 1; c < t.header.size(); ++c) {
        if (t.header[c].size() < 2 || t.header[c][0] != 'y')
            throw ps::ParseError("trajectories: year column '" + t.header[c] + "' must look like y1984");
        ts.years.push_back(std::stoi(t.header[c].substr(1)));
    }
    std::set<std::string> labels;
    for (const auto& row : t.rows)
        for (std::size_t c = 1; c < row.size(); ++c) labels.insert(row[c]);
    ts.alphabet.assign(labels.begin(), labels.end());
    const bool numeric = std::all_of(ts.alphabet.begin(), ts.alphabet.end(), [](const std::string& s) {
        return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
    });
    if (numeric)
        std::sort(ts.alphabet.begin(), ts.alphabet.end(),
                  [](const std::string& a, const std::string& b) { return std::stoi(a) < std::stoi(b); });
    std::map<std::string, int> idx;
    for (std::size_t a = 0; a < ts.alphabet.size(); ++a) idx[ts.alphabet[a]] = static_cast<int>(a);
    for (const auto& row : t.rows) {
        ts.individual_ids.push_back(row[0]);
        for (std::size_t c = 1; c < row.size(); ++c) ts.labels.push_back(idx[row[c]]);
    }
    return ts;
}

std::string occupancy_to_csv(const ps::DominantPositionReport& rep) {
    std::ostringstream out;
    out << "dominant,size";
    for (const auto& l : rep.alphabet) out << ",p_" << l;
    out << '\n';
    char buf[32];
    for (std::size_t g = 0; g < rep.n_groups(); ++g) {
        out << (g < rep.alphabet.size() ? rep.alphabet[g] : std::string("none")) << ','
            << rep.group_sizes[g];
        for (std::size_t l = 0; l < rep.alphabet.size(); ++l) {
            std::snprintf(buf, sizeof buf, "%.6f", rep.prob(g, l));
            out << ',' << buf;
        }
        out << '\n';
    }
    return out.str();
}

std::string class_means_to_csv(const ps::ClassMeansTable& t) {
    std::ostringstream out;
    out << "variable,overall";
    for (const auto& c : t.class_labels) out << ',' << c;
    out << '\n';
    char buf[32];
    for (std::size_t v = 0; v < t.variables.size(); ++v) {
        std::snprintf(buf, sizeof buf, "%.6g", t.overall_mean[v]);
        out << t.variables[v] << ',' << buf;
        for (std::size_t c = 0; c < t.class_labels.size(); ++c) {
            out << ',';
            if (!t.means_missing[c * t.variables.size() + v]) {
                std::snprintf(buf, sizeof buf, "%.6g", t.mean(c, v));
                out << buf;
            }
        }
        out << '\n';
    }
    out << "Size," << t.total_rows;
    for (std::size_t c = 0; c < t.class_labels.size(); ++c) out << ',' << t.class_sizes[c];
    out << '\n';
    return out.str();
}

void write_outputs(const std::string& out_dir, const std::string& command,
                   const ps::json& params, const std::vector<std::string>& input_files,
                   const std::function<Outputs()>& produce, bool verify) {
    fs::create_directories(out_dir);
    Outputs outs = produce();
    if (verify) {
        Outputs again = produce();
        if (again != outs) throw ps::NumericError("verify-manifest: re-run produced different outputs");
    }
    ps::RunManifest man;
    man.command = command;
    man.parameters = params;
    for (const auto& f : input_files) man.add_input_file(f);
    for (const auto& [name, content] : outs) man.add_output(name, content);
    outs["manifest.json"] = man.to_json().dump(2) + "\n";
    for (const auto& [name, content] : outs) {
        std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
        f << content;
    }
    for (const auto& [name, digest] : man.output_digests)
        std::cout << name << "  " << digest << "\n";
}

ps::MainClassMap identity_main_map(int k) {
    ps::MainClassMap mm;
    for (int s = 1; s <= k; ++s) mm.super_to_main[s] = static_cast<char>('A' + (s - 1) % 26);
    return mm;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Panel SOM segmentation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");

    bool verify = false;
    app.add_flag("--verify-manifest", verify, "re-run the computation and require identical outputs");

    // ---- synth ----
    auto* c_synth = app.add_subcommand("synth", "generate a synthetic panel with known ground truth");
    std::string synth_cfg, synth_out = "out";
    c_synth->add_option("--config-file", synth_cfg, "SynthConfig JSON")->required();
    c_synth->add_option("--out-dir", synth_out);

    // ---- train ----
    auto* c_train = app.add_subcommand("train", "train a Kohonen map on pooled standardized data");
    std::string tr_input, tr_years, tr_out = "out", tr_sched_file, tr_vars, tr_init = "sample";
    std::vector<std::string> tr_growth, tr_diff, tr_deflate;
    std::string tr_deflator_file;
    int tr_rows = 8, tr_cols = 8, tr_baseline = 0;
    std::uint64_t tr_seed = 1;
    bool tr_batch = false;
    c_train->add_option("--input", tr_input, "panel CSV")->required();
    c_train->add_option("--years", tr_years, "comma-separated training years")->required();
    c_train->add_option("--rows", tr_rows);
    c_train->add_option("--cols", tr_cols);
    c_train->add_option("--seed", tr_seed);
    c_train->add_option("--schedule-file", tr_sched_file, "TrainingSchedule JSON");
    c_train->add_option("--vars", tr_vars, "variable codes (default: all numeric columns)");
    c_train->add_option("--init", tr_init)->check(CLI::IsMember({"sample", "uniform-box"}));
    c_train->add_flag("--batch", tr_batch, "batch training instead of online");
    c_train->add_option("--derive-growth", tr_growth, "VAR:OUT growth-rate columns");
    c_train->add_option("--derive-diff", tr_diff, "VAR:OUT difference-from-baseline columns");
    c_train->add_option("--baseline-year", tr_baseline, "baseline year for --derive-diff");
    c_train->add_option("--deflate", tr_deflate, "VAR:OUT deflated columns");
    c_train->add_option("--deflator-file", tr_deflator_file, "year,deflator CSV");
    c_train->add_option("--out-dir", tr_out);

    // ---- group ----
    auto* c_group = app.add_subcommand("group", "reduce the map to k ordered super-classes");
    std::string g_codebook, g_out = "out", g_orient, g_main_map;
    int g_k = 7;
    std::uint64_t g_seed = 1;
    c_group->add_option("--codebook", g_codebook)->required();
    c_group->add_option("--k", g_k);
    c_group->add_option("--seed", g_seed);
    c_group->add_option("--orient-var", g_orient, "orientation variable (default RSALH when present)");
    c_group->add_option("--main-map", g_main_map, "super-to-main map JSON");
    c_group->add_option("--out-dir", g_out);

    // ---- trajectories ----
    auto* c_traj = app.add_subcommand("trajectories", "project records and build label sequences");
    std::string j_input, j_codebook, j_supers, j_mains, j_years, j_gran = "unit", j_out = "out";
    int j_threshold = 0;
    c_traj->add_option("--input", j_input)->required();
    c_traj->add_option("--codebook", j_codebook)->required();
    c_traj->add_option("--superclasses", j_supers);
    c_traj->add_option("--mainclasses", j_mains);
    c_traj->add_option("--years", j_years, "default: all panel years");
    c_traj->add_option("--granularity", j_gran)->check(CLI::IsMember({"unit", "super", "main"}));
    c_traj->add_option("--threshold", j_threshold, "dominant-position threshold (default floor(T/2)+1)");
    c_traj->add_option("--out-dir", j_out);

    // ---- markov ----
    auto* c_markov = app.add_subcommand("markov", "transition analysis");
    c_markov->require_subcommand(1);
    auto* c_est = c_markov->add_subcommand("estimate", "estimate from trajectories");
    std::string m_traj, m_out = "out";
    c_est->add_option("--trajectories", m_traj)->required();
    c_est->add_option("--out-dir", m_out);
    auto* c_stat = c_markov->add_subcommand("stationary", "stationary distribution of a matrix");
    std::string s_matrix, s_out = "out";
    double s_tol = 1e-12;
    long s_max_iter = 1000000;
    c_stat->add_option("--matrix", s_matrix)->required();
    c_stat->add_option("--tol", s_tol);
    c_stat->add_option("--max-iter", s_max_iter);
    c_stat->add_option("--out-dir", s_out);

    // ---- pca ----
    auto* c_pca = app.add_subcommand("pca", "correlation PCA of the pooled standardized matrix");
    std::string p_input, p_years, p_vars, p_out = "out";
    c_pca->add_option("--input", p_input)->required();
    c_pca->add_option("--years", p_years, "default: all panel years");
    c_pca->add_option("--vars", p_vars);
    c_pca->add_option("--out-dir", p_out);

    // ---- report ----
    auto* c_rep = app.add_subcommand("report", "render SVG figures from pipeline artifacts");
    std::string r_codebook, r_supers, r_traj, r_individual, r_pca, r_out = "out";
    c_rep->add_option("--codebook", r_codebook)->required();
    c_rep->add_option("--superclasses", r_supers);
    c_rep->add_option("--trajectories", r_traj, "unit-granularity trajectories CSV");
    c_rep->add_option("--individual", r_individual, "id for the trajectory overlay (default: first)");
    c_rep->add_option("--pca", r_pca, "pca.json for variable-projection scatters");
    c_rep->add_option("--out-dir", r_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 1;
    }

    try {
        if (*c_synth) {
            const auto cfg = ps::synth_config_from_json(load_json_file(synth_cfg));
            write_outputs(synth_out, "synth", {{"config", synth_cfg}}, {synth_cfg}, [&] {
                const auto res = ps::generate_panel(cfg);
                Outputs o;
                o["panel.csv"] = panel_to_csv(res.panel);
                o["truth.csv"] = trajectories_to_csv(res.ground_truth);
                return o;
            }, verify);
        } else if (*c_train) {
            std::ifstream in(tr_input);
            if (!in) throw ps::ConfigError("cannot open " + tr_input);
            ps::PanelDataset panel = ps::load_panel(in);
            auto split2 = [](const std::string& s) {
                const auto p = s.find(':');
                if (p == std::string::npos)
                    throw ps::ConfigError("expected VAR:OUT, got '" + s + "'");
                return std::pair{s.substr(0, p), s.substr(p + 1)};
            };
            if (!tr_deflate.empty()) {
                if (tr_deflator_file.empty())
                    throw ps::ConfigError("--deflate requires --deflator-file");
                std::ifstream df(tr_deflator_file);
                if (!df) throw ps::ConfigError("cannot open " + tr_deflator_file);
                const auto deflator = ps::load_deflator(df);
                for (const auto& spec : tr_deflate) {
                    const auto [var, out] = split2(spec);
                    panel = ps::deflate(std::move(panel), var, deflator, out);
                }
            }
            for (const auto& spec : tr_growth) {
                const auto [var, out] = split2(spec);
                panel = ps::derive_growth_rate(std::move(panel), var, out);
            }
            for (const auto& spec : tr_diff) {
                const auto [var, out] = split2(spec);
                if (tr_baseline == 0) throw ps::ConfigError("--derive-diff requires --baseline-year");
                panel = ps::derive_difference(std::move(panel), var, tr_baseline, out);
            }
            std::vector<std::string> codes =
                tr_vars.empty() ? panel.variables : parse_list(tr_vars);
            std::sort(codes.begin(), codes.end());  // catalog order is lexicographic
            const auto years = parse_years(tr_years);
            const ps::Topology topo = tr_rows == 1 ? ps::Topology::chain(tr_cols)
                                                   : ps::Topology::grid(tr_rows, tr_cols);
            ps::TrainingSchedule sched = tr_sched_file.empty()
                                             ? ps::TrainingSchedule::defaults_for(topo)
                                             : ps::schedule_from_json(load_json_file(tr_sched_file));
            sched.seed = tr_seed;

            std::vector<std::string> inputs{tr_input};
            if (!tr_sched_file.empty()) inputs.push_back(tr_sched_file);
            if (!tr_deflator_file.empty()) inputs.push_back(tr_deflator_file);
            ps::json params{{"years", years},    {"rows", tr_rows},  {"cols", tr_cols},
                            {"seed", tr_seed},   {"vars", codes},    {"init", tr_init},
                            {"batch", tr_batch}, {"schedule", ps::to_json(sched)}};
            write_outputs(tr_out, "train", params, inputs, [&] {
                const auto pooled = ps::pool_years(panel, years, codes);
                const auto params_std = ps::fit_standardization(pooled);
                const auto z = ps::apply_standardization(params_std, pooled);
                const auto method = tr_init == "sample" ? ps::InitMethod::Sample
                                                        : ps::InitMethod::UniformBox;
                ps::CodeBook cb = ps::init_codebook(topo, z, tr_seed, method);
                ps::TrainResult tr = tr_batch ? ps::train_batch(std::move(cb), z, sched)
                                              : ps::train_online(std::move(cb), z, sched);
                ps::MapArtifact art{std::move(tr.codebook), params_std, sched, tr_seed};
                Outputs o;
                o["codebook.json"] = ps::to_json(art).dump(2) + "\n";
                std::ostringstream qe;
                qe << "epoch,quantization_error\n";
                char buf[32];
                for (std::size_t e = 0; e < tr.qe_trace.size(); ++e) {
                    std::snprintf(buf, sizeof buf, "%.12g", tr.qe_trace[e]);
                    qe << (e + 1) << ',' << buf << '\n';
                }
                o["qe_trace.csv"] = qe.str();
                return o;
            }, verify);
        } else if (*c_group) {
            const auto art = ps::map_artifact_from_json(load_json_file(g_codebook));
            int orient_dim = 0;
            {
                std::string code = g_orient;
                if (code.empty()) {
                    const auto& vars = art.standardization.variables;
                    code = std::find(vars.begin(), vars.end(), "RSALH") != vars.end() ? "RSALH"
                                                                                      : vars.front();
                }
                orient_dim = static_cast<int>(art.standardization.var_index(code));
            }
            ps::TrainingSchedule sched = ps::TrainingSchedule::defaults_for(ps::Topology::chain(g_k));
            sched.seed = g_seed;
            ps::MainClassMap mm;
            if (!g_main_map.empty())
                mm = ps::mainclassmap_from_json(load_json_file(g_main_map));
            else if (g_k == 7)
                mm = ps::MainClassMap::default_map();
            else
                mm = identity_main_map(g_k);
            std::vector<std::string> inputs{g_codebook};
            if (!g_main_map.empty()) inputs.push_back(g_main_map);
            write_outputs(g_out, "group",
                          {{"k", g_k}, {"seed", g_seed}, {"orient_dim", orient_dim}}, inputs, [&] {
                const auto sm = ps::reduce_superclasses(art.codebook, g_k, sched, orient_dim);
                Outputs o;
                o["superclasses.json"] = ps::to_json(sm).dump(2) + "\n";
                o["mainclasses.json"] = ps::to_json(mm).dump(2) + "\n";
                std::ostringstream qe;
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.12g",
                              ps::quantization_error(sm.chain_codebook,
                                                     ps::codebook_as_observations(art.codebook)));
                qe << "k,quantization_error\n" << g_k << ',' << buf << '\n';
                o["chain_qe.csv"] = qe.str();
                return o;
            }, verify);
        } else if (*c_traj) {
            std::ifstream in(j_input);
            if (!in) throw ps::ConfigError("cannot open " + j_input);
            const ps::PanelDataset panel = ps::load_panel(in);
            const auto art = ps::map_artifact_from_json(load_json_file(j_codebook));
            const auto years = j_years.empty() ? panel.years : parse_years(j_years);
            ps::Granularity gran = j_gran == "unit"    ? ps::Granularity::Unit
                                   : j_gran == "super" ? ps::Granularity::Super
                                                       : ps::Granularity::Main;
            ps::SuperClassMap sm;
            ps::MainClassMap mm;
            if (gran != ps::Granularity::Unit) {
                if (j_supers.empty())
                    throw ps::ConfigError("--superclasses required for this granularity");
                sm = ps::superclassmap_from_json(load_json_file(j_supers));
            }
            if (gran == ps::Granularity::Main) {
                if (j_mains.empty())
                    throw ps::ConfigError("--mainclasses required for main granularity");
                mm = ps::mainclassmap_from_json(load_json_file(j_mains));
            }
            const int threshold =
                j_threshold > 0 ? j_threshold : static_cast<int>(years.size()) / 2 + 1;
            std::vector<std::string> inputs{j_input, j_codebook};
            if (!j_supers.empty()) inputs.push_back(j_supers);
            if (!j_mains.empty()) inputs.push_back(j_mains);
            write_outputs(j_out, "trajectories",
                          {{"years", years}, {"granularity", j_gran}, {"threshold", threshold}},
                          inputs, [&] {
                const auto ts = ps::build_trajectories(
                    panel, years, art.standardization, art.codebook, gran,
                    gran != ps::Granularity::Unit ? &sm : nullptr,
                    gran == ps::Granularity::Main ? &mm : nullptr);
                Outputs o;
                o["trajectories.csv"] = trajectories_to_csv(ts);
                o["occupancy.csv"] = occupancy_to_csv(ps::occupancy_report(ts, threshold));
                const auto census = ps::stability_census(ts, static_cast<int>(ts.T()) - 1);
                ps::json stats{{"stayers_T_minus_1", census.stayers},
                               {"distinct_trajectories", census.distinct_trajectories},
                               {"threshold", threshold}};
                o["stats.json"] = stats.dump(2) + "\n";
                return o;
            }, verify);
        } else if (*c_est) {
            std::ifstream in(m_traj);
            if (!in) throw ps::ConfigError("cannot open " + m_traj);
            const ps::TrajectorySet ts = trajectories_from_csv(in);
            write_outputs(m_out, "markov estimate", {{"trajectories", m_traj}}, {m_traj}, [&] {
                Outputs o;
                const auto all = ps::count_transitions(ts, true);
                const auto changes = ps::count_transitions(ts, false);
                {
                    std::ostringstream s;
                    s << "label";
                    for (const auto& l : all.labels) s << ',' << l;
                    s << '\n';
                    for (std::size_t i = 0; i < all.labels.size(); ++i) {
                        s << all.labels[i];
                        for (std::size_t j2 = 0; j2 < all.labels.size(); ++j2)
                            s << ',' << all.at(i, j2);
                        s << '\n';
                    }
                    o["counts.csv"] = s.str();
                }
                {
                    std::ostringstream s;
                    ps::write_matrix_csv(s, ps::change_frequencies(changes));
                    o["change_frequencies.csv"] = s.str();
                }
                std::vector<std::string> warnings;
                const auto P = ps::transition_matrix(all, &warnings);
                {
                    std::ostringstream s;
                    ps::write_matrix_csv(s, P);
                    o["matrix.csv"] = s.str();
                }
                const auto st = ps::stationary_distribution(P);
                {
                    std::ostringstream s;
                    ps::write_distribution_csv(s, st.pi);
                    o["stationary.csv"] = s.str();
                }
                {
                    std::ostringstream s;
                    s << "year";
                    for (const auto& l : ts.alphabet) s << ',' << l;
                    s << '\n';
                    char buf[32];
                    for (int y : ts.years) {
                        const auto d = ps::distribution_at_year(ts, y);
                        s << y;
                        for (double p : d.p) {
                            std::snprintf(buf, sizeof buf, "%.6f", p);
                            s << ',' << buf;
                        }
                        s << '\n';
                    }
                    o["distributions.csv"] = s.str();
                }
                ps::json info{{"eigenvalue", st.eigenvalue},
                              {"irreducible", ps::is_irreducible(P)},
                              {"warnings", warnings},
                              {"stationary_warnings", st.warnings}};
                o["markov.json"] = info.dump(2) + "\n";
                return o;
            }, verify);
        } else if (*c_stat) {
            std::ifstream in(s_matrix);
            if (!in) throw ps::ConfigError("cannot open " + s_matrix);
            const auto P = ps::load_matrix_csv(in);
            const auto st = ps::stationary_distribution(P, s_tol, s_max_iter);
            for (const auto& w : st.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "lambda " << st.eigenvalue << "\n";
            for (std::size_t i = 0; i < st.pi.labels.size(); ++i)
                std::cout << st.pi.labels[i] << " " << st.pi.p[i] << "\n";
            write_outputs(s_out, "markov stationary", {{"matrix", s_matrix}, {"tol", s_tol}},
                          {s_matrix}, [&] {
                Outputs o;
                std::ostringstream s;
                ps::write_distribution_csv(s, st.pi);
                o["stationary.csv"] = s.str();
                ps::json info{{"eigenvalue", st.eigenvalue}, {"warnings", st.warnings}};
                o["markov.json"] = info.dump(2) + "\n";
                return o;
            }, verify);
        } else if (*c_pca) {
            std::ifstream in(p_input);
            if (!in) throw ps::ConfigError("cannot open " + p_input);
            const ps::PanelDataset panel = ps::load_panel(in);
            const auto years = p_years.empty() ? panel.years : parse_years(p_years);
            std::vector<std::string> codes = p_vars.empty() ? panel.variables : parse_list(p_vars);
            std::sort(codes.begin(), codes.end());
            write_outputs(p_out, "pca", {{"years", years}, {"vars", codes}}, {p_input}, [&] {
                const auto pooled = ps::pool_years(panel, years, codes);
                const auto std_params = ps::fit_standardization(pooled);
                const auto z = ps::apply_standardization(std_params, pooled);
                const auto res = ps::correlation_pca(z);
                Outputs o;
                o["pca.json"] = ps::to_json(res).dump(2) + "\n";
                const int naxes = std::min<int>(3, static_cast<int>(res.n_components()));
                for (int a = 1; a <= naxes; ++a) {
                    for (int b = a + 1; b <= naxes; ++b) {
                        const auto proj = ps::variable_projection(res, a, b);
                        const std::string stem =
                            "projection_" + std::to_string(a) + "_" + std::to_string(b);
                        std::ostringstream s;
                        s << "variable,axis" << a << ",axis" << b << '\n';
                        char buf[32];
                        for (std::size_t v = 0; v < res.variables.size(); ++v) {
                            std::snprintf(buf, sizeof buf, "%.8f", proj[v][0]);
                            s << res.variables[v] << ',' << buf;
                            std::snprintf(buf, sizeof buf, "%.8f", proj[v][1]);
                            s << ',' << buf << '\n';
                        }
                        o[stem + ".csv"] = s.str();
                        o[stem + ".svg"] = ps::svg::scatter(
                            res.variables, proj,
                            "variables on axes " + std::to_string(a) + " x " + std::to_string(b));
                    }
                }
                return o;
            }, verify);
        } else if (*c_rep) {
            const auto art = ps::map_artifact_from_json(load_json_file(r_codebook));
            std::vector<std::string> inputs{r_codebook};
            if (!r_supers.empty()) inputs.push_back(r_supers);
            if (!r_traj.empty()) inputs.push_back(r_traj);
            if (!r_pca.empty()) inputs.push_back(r_pca);
            write_outputs(r_out, "report", {{"codebook", r_codebook}}, inputs, [&] {
                Outputs o;
                o["profiles.svg"] =
                    ps::svg::profile_grid(art.codebook, art.standardization.variables);
                if (!r_supers.empty()) {
                    const auto sm = ps::superclassmap_from_json(load_json_file(r_supers));
                    o["partition.svg"] =
                        ps::svg::partition_grid(art.codebook.topology, sm.unit_to_super, sm.k, false);
                    o["partition_gray.svg"] =
                        ps::svg::partition_grid(art.codebook.topology, sm.unit_to_super, sm.k, true);
                    o["chain_profiles.svg"] =
                        ps::svg::chain_profiles(sm.chain_codebook, art.standardization.variables);
                }
                if (!r_traj.empty()) {
                    std::ifstream tin(r_traj);
                    const auto ts = trajectories_from_csv(tin);
                    std::size_t pick = 0;
                    if (!r_individual.empty()) {
                        for (pick = 0; pick < ts.n(); ++pick)
                            if (ts.individual_ids[pick] == r_individual) break;
                        if (pick == ts.n())
                            throw ps::ConfigError("individual " + r_individual + " not found");
                    }
                    std::vector<int> units;
                    for (std::size_t t = 0; t < ts.T(); ++t)
                        units.push_back(std::stoi(ts.alphabet[ts.label(pick, t)]));
                    o["trajectory_" + ts.individual_ids[pick] + ".svg"] =
                        ps::svg::trajectory_overlay(art.codebook.topology, units, ts.years);
                    std::vector<std::size_t> sizes(ts.alphabet.size(), 0);
                    for (int l : ts.labels) ++sizes[static_cast<std::size_t>(l)];
                    o["sizes.svg"] = ps::svg::size_bars(ts.alphabet, sizes);
                }
                if (!r_pca.empty()) {
                    const auto pj = load_json_file(r_pca);
                    ps::PcaResult res;
                    res.variables = pj.at("variables").get<std::vector<std::string>>();
                    res.eigenvalues = pj.at("eigenvalues").get<std::vector<double>>();
                    res.loadings = pj.at("loadings").get<std::vector<double>>();
                    res.explained = pj.at("explained").get<std::vector<double>>();
                    if (res.n_components() >= 2)
                        o["pca_axes_1_2.svg"] = ps::svg::scatter(
                            res.variables, ps::variable_projection(res, 1, 2), "variables on axes 1 x 2");
                }
                return o;
            }, verify);
        }
        return 0;
    } catch (const ps::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ps::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ps::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ps::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
