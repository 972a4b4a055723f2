#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggeval/embed_metrics.hpp"
#include "ggeval/generators.hpp"
#include "ggeval/gin.hpp"
#include "ggeval/graph_io.hpp"
#include "ggeval/mmd.hpp"

namespace ggeval {

inline constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Spearman rank correlation

struct SpearmanResult {
    double abs_rho = 0.0;
    bool degenerate = false; // constant input, correlation undefined
};

namespace detail {

inline std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace detail

/// |Spearman rho| with average-rank tie handling. Constant sequences are
/// flagged degenerate and scored 0.
inline SpearmanResult spearman_abs(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("spearman_abs: length mismatch");
    if (x.size() < 2) throw ValidationError("spearman_abs: need at least two points");
    const auto rx = detail::average_ranks(x);
    const auto ry = detail::average_ranks(y);
    const double n = static_cast<double>(x.size());
    double mean = (n + 1.0) / 2.0;
    double cov = 0.0, var_x = 0.0, var_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if (var_x == 0.0 || var_y == 0.0) return {0.0, true};
    return {std::abs(cov / std::sqrt(var_x * var_y)), false};
}

// ---------------------------------------------------------------------------
// Dataset configurations

enum class DatasetKind { Base, Ladder, Full };

inline const char* to_string(DatasetKind k) {
    switch (k) {
        case DatasetKind::Base: return "base";
        case DatasetKind::Ladder: return "ladder";
        case DatasetKind::Full: return "full";
    }
    return "?";
}

inline DatasetKind dataset_kind_from_string(const std::string& s) {
    if (s == "base") return DatasetKind::Base;
    if (s == "ladder") return DatasetKind::Ladder;
    if (s == "full") return DatasetKind::Full;
    throw ValidationError("unknown dataset config '" + s + "'");
}

struct NamedSet {
    std::string name;
    GraphSet set;
};

/// Synthetic class catalog. Full-scale parameters follow the experiment
/// protocol; desk scale keeps 100 graphs per class and divides the size
/// ranges of the large classes by five (small-community ranges stay viable).
struct DatasetBundle {
    DatasetKind kind = DatasetKind::Base;
    bool desk_scale = false;
    std::vector<NamedSet> classes; // labels are assigned 0..k-1 in order
};

/// One synthetic class by name (BA, WS, C2L, C2S, Gr, Ld) with the pinned
/// experiment parameters at either scale.
inline GraphSet generate_named_class(const std::string& name, bool desk_scale, std::uint64_t seed) {
    const int count = desk_scale ? 100 : 500;
    Rng rng(seed);
    if (name == "BA") return desk_scale ? generate_ba(count, 20, 40, 4, rng) : generate_ba(count, 100, 200, 4, rng);
    if (name == "WS")
        return desk_scale ? generate_ws(count, 20, 40, 4, 0.1, rng) : generate_ws(count, 100, 200, 4, 0.1, rng);
    if (name == "C2L") return generate_community2(count, 6, 10, 0.7, 0.1, rng);
    if (name == "C2S")
        return desk_scale ? generate_community2(count, 6, 16, 0.3, 0.05, rng)
                          : generate_community2(count, 30, 80, 0.3, 0.05, rng);
    // desk grids keep a 40-node floor; below that the set degenerates into
    // near-path strips whose embeddings crowd together
    if (name == "Gr") return desk_scale ? generate_grid(100, 40, 80) : generate_grid(100, 100, 400);
    if (name == "Ld") return desk_scale ? generate_ladder(count, 20, 40) : generate_ladder(count, 100, 200);
    throw ValidationError("generate_named_class: unknown class '" + name + "'");
}

inline DatasetBundle build_dataset(DatasetKind kind, bool desk_scale, std::uint64_t master_seed) {
    DatasetBundle bundle;
    bundle.kind = kind;
    bundle.desk_scale = desk_scale;
    std::vector<std::string> names = {"BA", "WS", "C2L", "C2S", "Gr"};
    if (kind != DatasetKind::Base) names.push_back("Ld");
    std::vector<NamedSet> classes;
    for (std::size_t i = 0; i < names.size(); ++i)
        classes.push_back({names[i], generate_named_class(names[i], desk_scale, derive_seed(master_seed, i))});
    if (kind == DatasetKind::Full) {
        // one matched-ER class per non-grid class, eleven classes in total
        const std::size_t base_count = classes.size();
        for (std::size_t i = 0; i < base_count; ++i) {
            if (classes[i].name == "Gr") continue;
            Rng rng(derive_seed(master_seed, 10 + i));
            classes.push_back({"ER-" + classes[i].name, generate_er_matched(classes[i].set, rng)});
        }
    }
    for (std::size_t i = 0; i < classes.size(); ++i) classes[i].set.label = static_cast<int>(i);
    bundle.classes = std::move(classes);
    return bundle;
}

// ---------------------------------------------------------------------------
// Pipeline configuration and metric reports

struct PipelineConfig {
    DatasetKind dataset_config = DatasetKind::Base;
    bool desk_scale = true;
    FeatureMode feature_mode = FeatureMode::OneHotDegree;
    Readout readout = Readout::Sum;
    bool untrained = false;
    GinHyper hyper;
    std::vector<std::string> metrics = {"fd", "prdc"};
    std::vector<double> levels = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    int repetitions = 1;
    std::uint64_t master_seed = 42;
    int k = 5;
    double sigma = 1.0;
    int orbit_cap = 500;
    bool orbit_four_node_only = false;
    bool include_level_zero = true; // include the unperturbed copy in Spearman
    std::vector<std::string> experiments = {"perturbation"};
    std::vector<std::string> targets = {"Gr"};
    std::vector<std::pair<std::string, std::string>> external_candidates; // name -> graph file
    bool write_csv = false;
};

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
    PipelineConfig cfg;
    if (j.contains("dataset_config")) cfg.dataset_config = dataset_kind_from_string(j.at("dataset_config"));
    cfg.desk_scale = j.value("desk_scale", cfg.desk_scale);
    if (j.contains("feature_mode")) cfg.feature_mode = feature_mode_from_string(j.at("feature_mode"));
    if (j.contains("readout")) cfg.readout = readout_from_string(j.at("readout"));
    cfg.untrained = j.value("untrained", cfg.untrained);
    cfg.hyper.epochs = j.value("epochs", cfg.hyper.epochs);
    cfg.hyper.batch_size = j.value("batch_size", cfg.hyper.batch_size);
    if (j.contains("metrics")) cfg.metrics = j.at("metrics").get<std::vector<std::string>>();
    if (j.contains("levels")) cfg.levels = j.at("levels").get<std::vector<double>>();
    cfg.repetitions = j.value("repetitions", cfg.repetitions);
    if (j.contains("seeds")) {
        const auto& seeds = j.at("seeds");
        if (seeds.is_object())
            cfg.master_seed = seeds.value("master", cfg.master_seed);
        else
            cfg.master_seed = seeds.get<std::uint64_t>();
    }
    cfg.k = j.value("k", cfg.k);
    cfg.sigma = j.value("sigma", cfg.sigma);
    cfg.orbit_cap = j.value("orbit_cap", cfg.orbit_cap);
    cfg.orbit_four_node_only = j.value("orbit_four_node_only", cfg.orbit_four_node_only);
    cfg.include_level_zero = j.value("include_level_zero", cfg.include_level_zero);
    if (j.contains("experiments")) cfg.experiments = j.at("experiments").get<std::vector<std::string>>();
    if (j.contains("datasets")) cfg.targets = j.at("datasets").get<std::vector<std::string>>();
    if (j.contains("candidates"))
        for (const auto& c : j.at("candidates"))
            cfg.external_candidates.emplace_back(c.at("name").get<std::string>(), c.at("path").get<std::string>());
    cfg.write_csv = j.value("csv", cfg.write_csv);
    return cfg;
}

inline nlohmann::json pipeline_config_to_json(const PipelineConfig& cfg) {
    nlohmann::json j;
    j["dataset_config"] = to_string(cfg.dataset_config);
    j["desk_scale"] = cfg.desk_scale;
    j["feature_mode"] = to_string(cfg.feature_mode);
    j["readout"] = to_string(cfg.readout);
    j["untrained"] = cfg.untrained;
    j["epochs"] = cfg.hyper.epochs;
    j["batch_size"] = cfg.hyper.batch_size;
    j["metrics"] = cfg.metrics;
    j["levels"] = cfg.levels;
    j["repetitions"] = cfg.repetitions;
    j["seeds"] = {{"master", cfg.master_seed}};
    j["k"] = cfg.k;
    j["sigma"] = cfg.sigma;
    j["orbit_cap"] = cfg.orbit_cap;
    j["orbit_four_node_only"] = cfg.orbit_four_node_only;
    j["include_level_zero"] = cfg.include_level_zero;
    j["experiments"] = cfg.experiments;
    j["datasets"] = cfg.targets;
    if (!cfg.external_candidates.empty()) {
        j["candidates"] = nlohmann::json::array();
        for (const auto& [name, path] : cfg.external_candidates)
            j["candidates"].push_back({{"name", name}, {"path", path}});
    }
    j["csv"] = cfg.write_csv;
    return j;
}

inline nlohmann::json hyperparameter_record(const PipelineConfig& cfg) {
    nlohmann::json j;
    j["sigma"] = cfg.sigma;
    j["k"] = cfg.k;
    j["feature_mode"] = to_string(cfg.feature_mode);
    j["readout"] = to_string(cfg.readout);
    j["dataset_config"] = to_string(cfg.dataset_config);
    j["desk_scale"] = cfg.desk_scale;
    j["untrained"] = cfg.untrained;
    j["epochs"] = cfg.hyper.epochs;
    j["batch_size"] = cfg.hyper.batch_size;
    j["orbit_cap"] = cfg.orbit_cap;
    j["orbit_mask"] = cfg.orbit_four_node_only ? "four-node-only" : "all-15";
    j["prdc_boundary"] = "inclusive";
    return j;
}

// Lower is better for distances, higher for manifold scores.
inline bool metric_ascending(const std::string& name) {
    return name.rfind("fd", 0) == 0 || name.rfind("mmd", 0) == 0;
}

/// Metric values between a reference set and a candidate set under one model.
/// Enabled metric families: "fd" (adds fd_raw/fd), "prdc" (adds precision,
/// recall, density, coverage, f1_pr, f1_dc), and "mmd_degree",
/// "mmd_clustering", "mmd_orbit", "mmd_spectral".
inline std::map<std::string, double> compare_sets(const GinModel& model, const GraphSet& reference,
                                                  const EmbeddingMatrix& reference_embedding,
                                                  const GraphSet& candidate, const PipelineConfig& cfg,
                                                  Rng& embed_rng) {
    std::map<std::string, double> values;
    auto enabled = [&](const std::string& m) {
        return std::find(cfg.metrics.begin(), cfg.metrics.end(), m) != cfg.metrics.end();
    };
    const bool needs_embedding = enabled("fd") || enabled("prdc");
    EmbeddingMatrix candidate_embedding;
    if (needs_embedding) candidate_embedding = embed(model, candidate, embed_rng);
    if (enabled("fd")) {
        const auto fd =
            frechet_distance(gaussian_summary(reference_embedding), gaussian_summary(candidate_embedding));
        values["fd_raw"] = fd.raw;
        values["fd"] = fd.clamped;
    }
    if (enabled("prdc")) {
        const auto p = prdc(reference_embedding, candidate_embedding, cfg.k);
        values["precision"] = p.precision;
        values["recall"] = p.recall;
        values["density"] = p.density;
        values["coverage"] = p.coverage;
        values["f1_pr"] = f1(p.precision, p.recall);
        values["f1_dc"] = f1(p.density, p.coverage);
    }
    const bool any_mmd =
        enabled("mmd_degree") || enabled("mmd_clustering") || enabled("mmd_orbit") || enabled("mmd_spectral");
    if (any_mmd) {
        MmdSuiteConfig mc;
        mc.sigma = cfg.sigma;
        mc.orbit_cap = cfg.orbit_cap;
        mc.orbit_four_node_only = cfg.orbit_four_node_only;
        const auto suite = mmd_suite(reference, candidate, mc);
        if (enabled("mmd_degree")) values["mmd_degree"] = suite.degree;
        if (enabled("mmd_clustering")) values["mmd_clustering"] = suite.clustering;
        if (enabled("mmd_orbit")) values["mmd_orbit"] = suite.orbit;
        if (enabled("mmd_spectral")) values["mmd_spectral"] = suite.spectral;
    }
    return values;
}

// ---------------------------------------------------------------------------
// Experiments

struct SeriesStats {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation, 0 when R = 1
};

inline SeriesStats series_stats(std::span<const double> xs) {
    SeriesStats s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

struct PerturbationMetricSeries {
    std::vector<std::vector<double>> values_per_rep; // [rep][level]
    std::vector<double> spearman_per_rep;
    SeriesStats spearman;
    bool any_degenerate = false;
};

struct PerturbationOutcome {
    std::vector<double> levels;
    std::map<std::string, PerturbationMetricSeries> metrics;
};

struct RankingMetricSeries {
    std::vector<std::vector<std::string>> order_per_rep; // best first
    std::vector<std::map<std::string, double>> values_per_rep;
    std::map<std::string, double> mean_rank;
    std::vector<double> spearman_vs_severity_per_rep; // only for builtin candidates
    SeriesStats spearman_vs_severity;
};

struct RankingOutcome {
    std::vector<std::string> candidates;
    bool builtin_severity_order = false;
    std::map<std::string, RankingMetricSeries> metrics;
};

/// Supplies the model of repetition r; run_config trains once per repetition
/// and shares the model across experiments.
using ModelProvider = std::function<const GinModel&(int repetition)>;

/// Compares the reference against perturbed copies of itself at each level,
/// once per repetition, and scores each metric's level ranking by |Spearman|.
inline PerturbationOutcome perturbation_experiment(const GraphSet& reference, const std::vector<double>& levels,
                                                   const PipelineConfig& cfg, const ModelProvider& model_of,
                                                   std::uint64_t experiment_seed) {
    if (levels.empty()) throw ValidationError("perturbation_experiment: empty level list");
    for (double l : levels)
        if (l < 0.0 || l > 1.0) throw ValidationError("perturbation_experiment: level outside [0,1]");
    PerturbationOutcome outcome;
    outcome.levels = levels;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        const GinModel& model = model_of(rep);
        const std::uint64_t rep_seed = derive_seed(experiment_seed, static_cast<std::uint64_t>(rep));
        Rng ref_embed_rng(derive_seed(rep_seed, 0));
        const EmbeddingMatrix reference_embedding = embed(model, reference, ref_embed_rng);
        for (std::size_t li = 0; li < levels.size(); ++li) {
            Rng perturb_rng(derive_seed(rep_seed, 100 + li));
            const GraphSet candidate = perturb_set(reference, levels[li], perturb_rng);
            Rng embed_rng(derive_seed(rep_seed, 200 + li));
            const auto values = compare_sets(model, reference, reference_embedding, candidate, cfg, embed_rng);
            for (const auto& [name, value] : values) {
                auto& series = outcome.metrics[name];
                if (series.values_per_rep.size() <= static_cast<std::size_t>(rep))
                    series.values_per_rep.resize(static_cast<std::size_t>(rep) + 1);
                series.values_per_rep[static_cast<std::size_t>(rep)].push_back(value);
            }
        }
    }
    for (auto& [name, series] : outcome.metrics) {
        for (const auto& per_level : series.values_per_rep) {
            std::vector<double> xs, ys;
            for (std::size_t li = 0; li < levels.size(); ++li) {
                if (!cfg.include_level_zero && levels[li] == 0.0) continue;
                xs.push_back(levels[li]);
                ys.push_back(per_level[li]);
            }
            // fewer than two usable points: correlation undefined, score 0
            const SpearmanResult rho = xs.size() < 2 ? SpearmanResult{0.0, true} : spearman_abs(xs, ys);
            series.spearman_per_rep.push_back(rho.abs_rho);
            series.any_degenerate |= rho.degenerate;
        }
        series.spearman = series_stats(series.spearman_per_rep);
    }
    return outcome;
}

/// Ranks candidate sets against the reference per metric and repetition.
/// With no external candidates the builtin scenario is used: the resampled
/// class, 10% and 50% perturbed copies, and matched ER, in that severity
/// order (which also provides the ground truth for the Spearman column).
inline RankingOutcome ranking_experiment(const GraphSet& reference,
                                         const std::function<GraphSet(Rng&)>& resample_reference,
                                         const PipelineConfig& cfg, const ModelProvider& model_of,
                                         std::uint64_t experiment_seed) {
    RankingOutcome outcome;
    const bool builtin = cfg.external_candidates.empty();
    outcome.builtin_severity_order = builtin;
    std::vector<NamedSet> external;
    if (builtin) {
        outcome.candidates = {"resampled", "perturb-0.10", "perturb-0.50", "er-matched"};
    } else {
        for (const auto& [name, path] : cfg.external_candidates) {
            external.push_back({name, read_graphset(path)});
            outcome.candidates.push_back(name);
        }
    }
    if (outcome.candidates.size() < 2) throw ValidationError("ranking_experiment: need at least two candidates");

    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        const GinModel& model = model_of(rep);
        const std::uint64_t rep_seed = derive_seed(experiment_seed, static_cast<std::uint64_t>(rep));
        Rng ref_embed_rng(derive_seed(rep_seed, 0));
        const EmbeddingMatrix reference_embedding = embed(model, reference, ref_embed_rng);

        std::vector<NamedSet> candidates;
        if (builtin) {
            Rng resample_rng(derive_seed(rep_seed, 1));
            Rng p10_rng(derive_seed(rep_seed, 2));
            Rng p50_rng(derive_seed(rep_seed, 3));
            Rng er_rng(derive_seed(rep_seed, 4));
            candidates.push_back({"resampled", resample_reference(resample_rng)});
            candidates.push_back({"perturb-0.10", perturb_set(reference, 0.10, p10_rng)});
            candidates.push_back({"perturb-0.50", perturb_set(reference, 0.50, p50_rng)});
            candidates.push_back({"er-matched", generate_er_matched(reference, er_rng)});
        } else {
            candidates = external;
        }

        std::map<std::string, std::map<std::string, double>> values_by_metric;
        for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
            Rng embed_rng(derive_seed(rep_seed, 100 + ci));
            const auto values =
                compare_sets(model, reference, reference_embedding, candidates[ci].set, cfg, embed_rng);
            for (const auto& [name, value] : values) values_by_metric[name][candidates[ci].name] = value;
        }
        for (const auto& [metric, by_candidate] : values_by_metric) {
            auto& series = outcome.metrics[metric];
            std::vector<std::string> order = outcome.candidates;
            const bool ascending = metric_ascending(metric);
            std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
                const double va = by_candidate.at(a), vb = by_candidate.at(b);
                return ascending ? va < vb : va > vb;
            });
            series.order_per_rep.push_back(order);
            series.values_per_rep.push_back(by_candidate);
            for (std::size_t pos = 0; pos < order.size(); ++pos)
                series.mean_rank[order[pos]] += static_cast<double>(pos + 1);
            if (builtin) {
                std::vector<double> severity, measured;
                for (std::size_t ci = 0; ci < outcome.candidates.size(); ++ci) {
                    severity.push_back(static_cast<double>(ci));
                    measured.push_back(by_candidate.at(outcome.candidates[ci]));
                }
                series.spearman_vs_severity_per_rep.push_back(spearman_abs(severity, measured).abs_rho);
            }
        }
    }
    for (auto& [metric, series] : outcome.metrics) {
        for (auto& [name, total] : series.mean_rank) total /= static_cast<double>(cfg.repetitions);
        series.spearman_vs_severity = series_stats(series.spearman_vs_severity_per_rep);
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// Config-driven pipeline

namespace detail {

// Writes text to path atomically (temp file + rename).
inline void atomic_write(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ValidationError("cannot open '" + tmp.string() + "' for writing");
        out << text;
        out.flush();
        if (!out) throw ValidationError("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline nlohmann::json perturbation_to_json(const PerturbationOutcome& outcome, const PipelineConfig& cfg,
                                           const std::string& target) {
    nlohmann::json j;
    j["experiment"] = "perturbation";
    j["target"] = target;
    j["levels"] = outcome.levels;
    j["repetitions"] = cfg.repetitions;
    j["hyperparameters"] = hyperparameter_record(cfg);
    j["seeds"] = {{"master", cfg.master_seed}};
    j["include_level_zero"] = cfg.include_level_zero;
    nlohmann::json metrics;
    for (const auto& [name, series] : outcome.metrics) {
        nlohmann::json m;
        m["values_per_rep"] = series.values_per_rep;
        nlohmann::json level_stats = nlohmann::json::array();
        for (std::size_t li = 0; li < outcome.levels.size(); ++li) {
            std::vector<double> xs;
            for (const auto& rep : series.values_per_rep) xs.push_back(rep[li]);
            const auto st = series_stats(xs);
            level_stats.push_back({{"level", outcome.levels[li]}, {"mean", st.mean}, {"stddev", st.stddev}});
        }
        m["per_level"] = level_stats;
        m["spearman_abs_per_rep"] = series.spearman_per_rep;
        m["spearman_abs_mean"] = series.spearman.mean;
        m["spearman_abs_stddev"] = series.spearman.stddev;
        m["degenerate"] = series.any_degenerate;
        metrics[name] = m;
    }
    j["metrics"] = metrics;
    return j;
}

inline nlohmann::json ranking_to_json(const RankingOutcome& outcome, const PipelineConfig& cfg,
                                      const std::string& target) {
    nlohmann::json j;
    j["experiment"] = "ranking";
    j["target"] = target;
    j["candidates"] = outcome.candidates;
    j["repetitions"] = cfg.repetitions;
    j["hyperparameters"] = hyperparameter_record(cfg);
    j["seeds"] = {{"master", cfg.master_seed}};
    nlohmann::json metrics;
    for (const auto& [name, series] : outcome.metrics) {
        nlohmann::json m;
        m["order_per_rep"] = series.order_per_rep;
        m["values_per_rep"] = series.values_per_rep;
        m["mean_rank"] = series.mean_rank;
        if (outcome.builtin_severity_order) {
            m["spearman_vs_severity_per_rep"] = series.spearman_vs_severity_per_rep;
            m["spearman_vs_severity_mean"] = series.spearman_vs_severity.mean;
            m["spearman_vs_severity_stddev"] = series.spearman_vs_severity.stddev;
        }
        metrics[name] = m;
    }
    j["metrics"] = metrics;
    return j;
}

inline std::string perturbation_csv(const PerturbationOutcome& outcome) {
    std::string csv = "metric,repetition,level,value\n";
    for (const auto& [name, series] : outcome.metrics)
        for (std::size_t rep = 0; rep < series.values_per_rep.size(); ++rep)
            for (std::size_t li = 0; li < outcome.levels.size(); ++li) {
                nlohmann::json v = series.values_per_rep[rep][li];
                nlohmann::json l = outcome.levels[li];
                csv += name + "," + std::to_string(rep) + "," + l.dump() + "," + v.dump() + "\n";
            }
    return csv;
}

} // namespace detail

struct RunResult {
    std::filesystem::path output_dir;
    nlohmann::json manifest;
};

/// End-to-end pipeline: build the dataset configuration, fit features, train
/// (or instantiate) one GIN per repetition, run the enabled experiments for
/// every target class, and write reports plus a manifest. Stage failures are
/// recorded in the manifest under the stage name before rethrowing.
inline RunResult run_config(const PipelineConfig& cfg, const std::filesystem::path& output_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(output_dir / "reports");
    RunResult result;
    result.output_dir = output_dir;
    nlohmann::json& manifest = result.manifest;
    manifest["version"] = kToolVersion;
    manifest["config"] = pipeline_config_to_json(cfg);
    manifest["stages"] = nlohmann::json::array();
    auto record_stage = [&](const std::string& name, const std::string& status, const std::string& error = {}) {
        nlohmann::json stage{{"name", name}, {"status", status}};
        if (!error.empty()) stage["error"] = error;
        manifest["stages"].push_back(stage);
    };
    auto flush_manifest = [&] { detail::atomic_write(output_dir / "manifest.json", manifest.dump(2) + "\n"); };

    try {
        // datasets
        DatasetBundle bundle;
        try {
            bundle = build_dataset(cfg.dataset_config, cfg.desk_scale, cfg.master_seed);
            nlohmann::json classes = nlohmann::json::array();
            for (const auto& c : bundle.classes)
                classes.push_back({{"name", c.name},
                                   {"label", c.set.label},
                                   {"count", c.set.graphs.size()},
                                   {"generator", c.set.provenance.generator}});
            manifest["classes"] = classes;
            record_stage("datasets", "ok");
        } catch (const std::exception& e) {
            record_stage("datasets", "failed", e.what());
            throw;
        }

        // feature fitting (refit per dataset configuration)
        FeatureConfig feature_cfg;
        try {
            std::vector<GraphSet> all;
            for (const auto& c : bundle.classes) all.push_back(c.set);
            feature_cfg = fit_features(all, cfg.feature_mode);
            manifest["feature_config"] = {{"mode", to_string(feature_cfg.mode)},
                                          {"degree_vocab", feature_cfg.degree_vocab},
                                          {"random_dim", feature_cfg.random_dim}};
            record_stage("features", "ok");
        } catch (const std::exception& e) {
            record_stage("features", "failed", e.what());
            throw;
        }

        // one model per repetition, shared by all experiments
        std::vector<GinModel> models;
        try {
            std::vector<GraphSet> all;
            for (const auto& c : bundle.classes) all.push_back(c.set);
            nlohmann::json training = nlohmann::json::array();
            for (int rep = 0; rep < cfg.repetitions; ++rep) {
                const std::uint64_t rep_seed = derive_seed(cfg.master_seed, 1000 + static_cast<std::uint64_t>(rep));
                if (cfg.untrained) {
                    Rng init_rng(derive_seed(rep_seed, 0));
                    models.push_back(
                        init_gin(feature_cfg, cfg.readout, static_cast<int>(bundle.classes.size()), cfg.hyper, init_rng));
                } else {
                    models.push_back(train(all, feature_cfg, cfg.readout, cfg.hyper, rep_seed));
                }
                const auto& m = models.back();
                training.push_back({{"repetition", rep},
                                    {"seed", rep_seed},
                                    {"trained", m.trained},
                                    {"train_accuracy", m.train_accuracy},
                                    {"test_accuracy", m.test_accuracy}});
            }
            detail::atomic_write(output_dir / "reports" / "classifier.json", training.dump(2) + "\n");
            record_stage("model", "ok");
        } catch (const std::exception& e) {
            record_stage("model", "failed", e.what());
            throw;
        }

        const ModelProvider model_of = [&](int rep) -> const GinModel& {
            return models[static_cast<std::size_t>(rep)];
        };

        // experiments per target class
        for (const std::string& target : cfg.targets) {
            const NamedSet* target_class = nullptr;
            for (const auto& c : bundle.classes)
                if (c.name == target) target_class = &c;
            if (target_class == nullptr)
                throw ValidationError("run_config: target '" + target + "' is not a class of this dataset config");
            const std::uint64_t target_seed =
                derive_seed(cfg.master_seed, 2000 + static_cast<std::uint64_t>(target_class->set.label));

            for (const std::string& experiment : cfg.experiments) {
                const std::string stage_name = experiment + ":" + target;
                try {
                    if (experiment == "perturbation") {
                        const auto outcome = perturbation_experiment(target_class->set, cfg.levels, cfg, model_of,
                                                                     derive_seed(target_seed, 1));
                        detail::atomic_write(output_dir / "reports" / ("perturbation_" + target + ".json"),
                                             detail::perturbation_to_json(outcome, cfg, target).dump(2) + "\n");
                        if (cfg.write_csv)
                            detail::atomic_write(output_dir / "reports" / ("perturbation_" + target + ".csv"),
                                                 detail::perturbation_csv(outcome));
                    } else if (experiment == "ranking") {
                        const bool desk = cfg.desk_scale;
                        const std::string name = target;
                        auto resample = [desk, name](Rng& rng) {
                            return generate_named_class(name, desk, rng.seed());
                        };
                        const auto outcome = ranking_experiment(target_class->set, resample, cfg, model_of,
                                                                derive_seed(target_seed, 2));
                        detail::atomic_write(output_dir / "reports" / ("ranking_" + target + ".json"),
                                             detail::ranking_to_json(outcome, cfg, target).dump(2) + "\n");
                    } else {
                        throw ValidationError("run_config: unknown experiment '" + experiment + "'");
                    }
                    record_stage(stage_name, "ok");
                } catch (const std::exception& e) {
                    record_stage(stage_name, "failed", e.what());
                    throw;
                }
            }
        }
        flush_manifest();
    } catch (...) {
        flush_manifest();
        throw;
    }
    return result;
}

} // namespace ggeval
