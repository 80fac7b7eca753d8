// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line pipeline: gen-data, train-dnn, train-ensemble, build-transfer,
// distill, evaluate, ablate. Every command works inside one run directory
// (--out) and is a pure function of its config and input files.

#include "endd/error.hpp"
#include "endd/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <typeinfo>

namespace fs = std::filesystem;
using endd::pipeline::RunConfig;

namespace {

struct SharedFlags {
    std::string config;
    std::string out = "run";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

void add_shared(CLI::App* cmd, SharedFlags& f) {
    cmd->add_option("--config", f.config, "JSON run config (flags override it)");
    cmd->add_option("--out", f.out, "Run directory")->capture_default_str();
    cmd->add_option("--seed", f.seed, "Global seed");
    cmd->add_option("--threads", f.threads, "Worker threads for ensemble training (0 = all cores)");
}

RunConfig resolve(const SharedFlags& f) {
    RunConfig cfg = f.config.empty() ? RunConfig{} : endd::pipeline::load_config(f.config);
    if (f.seed) {
        cfg.seed = *f.seed;
    }
    if (f.threads) {
        cfg.threads = *f.threads;
    }
    return cfg;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

template <typename Fn>
int guarded(const std::string& command, Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const std::exception& e) {
        std::string kind = "Error";
        if (dynamic_cast<const endd::ConfigError*>(&e) != nullptr) {
            kind = "ConfigError";
        } else if (dynamic_cast<const endd::ParseError*>(&e) != nullptr) {
            kind = "ParseError";
        } else if (dynamic_cast<const endd::IoError*>(&e) != nullptr) {
            kind = "IoError";
        } else if (dynamic_cast<const endd::DomainError*>(&e) != nullptr) {
            kind = "DomainError";
        } else if (dynamic_cast<const endd::ShapeError*>(&e) != nullptr) {
            kind = "ShapeError";
        }
        const nlohmann::json line = {{"error", {{"command", command}, {"kind", kind}, {"message", e.what()}}}};
        std::cerr << line.dump() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ensemble distribution distillation on synthetic 2-D data"};
    app.require_subcommand(1);

    // gen-data
    SharedFlags gen_flags;
    std::optional<int> gen_k;
    std::optional<std::size_t> gen_n;
    auto* gen = app.add_subcommand("gen-data", "Generate train/test/ood/aux CSVs and a manifest in OUT/data");
    add_shared(gen, gen_flags);
    gen->add_option("--k", gen_k, "Number of classes");
    gen->add_option("--n-per-class", gen_n, "Training points per class");

    // train-dnn
    SharedFlags dnn_flags;
    std::string dnn_data;
    auto* dnn = app.add_subcommand("train-dnn", "Train the single-model baseline into OUT/dnn");
    add_shared(dnn, dnn_flags);
    dnn->add_option("--data", dnn_data, "Dataset directory (default OUT/data)");

    // train-ensemble
    SharedFlags ens_flags;
    std::string ens_data;
    std::optional<std::size_t> ens_size;
    auto* ens = app.add_subcommand("train-ensemble", "Train M seed-varied members into OUT/ensemble");
    add_shared(ens, ens_flags);
    ens->add_option("--data", ens_data, "Dataset directory (default OUT/data)");
    ens->add_option("--size", ens_size, "Ensemble size M");

    // build-transfer
    SharedFlags tr_flags;
    std::string tr_data;
    std::string tr_ens;
    std::string tr_path;
    bool tr_aux = false;
    auto* tr = app.add_subcommand("build-transfer", "Evaluate the ensemble on the transfer inputs");
    add_shared(tr, tr_flags);
    tr->add_option("--data", tr_data, "Dataset directory (default OUT/data)");
    tr->add_option("--ensemble", tr_ens, "Ensemble directory (default OUT/ensemble)");
    tr->add_option("--transfer", tr_path, "Output file (default OUT/transfer.json)");
    tr->add_flag("--aux", tr_aux, "Append auxiliary rows from aux.csv");

    // distill
    SharedFlags dist_flags;
    std::string dist_mode;
    std::optional<double> dist_t0;
    std::optional<double> dist_tfixed;
    std::optional<double> dist_gamma;
    bool dist_no_anneal = false;
    std::string dist_transfer;
    std::string dist_name;
    auto* dist = app.add_subcommand("distill", "Distill the transfer set into an EnD or EnD^2 student");
    add_shared(dist, dist_flags);
    dist->add_option("--mode", dist_mode, "end | end2");
    dist->add_option("--t0", dist_t0, "Initial temperature for end2 (default 10)");
    dist->add_option("--t-fixed", dist_tfixed, "Temperature for end (default 2.5)");
    dist->add_option("--gamma", dist_gamma, "Central smoothing weight (default 1e-4)");
    dist->add_flag("--no-anneal", dist_no_anneal, "Keep the temperature fixed at its initial value");
    dist->add_option("--transfer", dist_transfer, "Transfer set file (default OUT/transfer.json)");
    dist->add_option("--name", dist_name, "Output subdirectory (default: the mode)");

    // evaluate
    SharedFlags ev_flags;
    std::vector<std::string> ev_models;
    std::string ev_data;
    std::string ev_ood;
    std::optional<int> ev_bins;
    auto* ev = app.add_subcommand("evaluate", "Score models on test and OOD data into OUT/eval");
    add_shared(ev, ev_flags);
    ev->add_option("--models", ev_models,
                   "Models as [name=]kind:path, kind in dnn|end|ensemble|end2 (default: those present in OUT)")
        ->delimiter(',');
    ev->add_option("--data", ev_data, "Labeled test CSV (default OUT/data/test.csv)");
    ev->add_option("--ood", ev_ood, "OOD CSV (default OUT/data/ood.csv)");
    ev->add_option("--ece-bins", ev_bins, "Equal-width ECE bins (default 15)");

    // ablate
    SharedFlags ab_flags;
    std::string ab_sizes = "5,20,50,100";
    std::string ab_temps = "1,2,5,10,20";
    int ab_seeds = 3;
    auto* ab = app.add_subcommand("ablate", "Ensemble-size and initial-temperature sweeps into OUT/ablate");
    add_shared(ab, ab_flags);
    ab->add_option("--sizes", ab_sizes, "Comma-separated ensemble sizes")->capture_default_str();
    ab->add_option("--temps", ab_temps, "Comma-separated initial temperatures")->capture_default_str();
    ab->add_option("--seeds", ab_seeds, "Seeds per arm")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        return guarded("gen-data", [&] {
            RunConfig cfg = resolve(gen_flags);
            if (gen_k) {
                cfg.data.spiral.num_classes = *gen_k;
            }
            if (gen_n) {
                cfg.data.spiral.n_per_class = *gen_n;
            }
            endd::pipeline::gen_data(cfg, fs::path(gen_flags.out) / "data");
        });
    }
    if (dnn->parsed()) {
        return guarded("train-dnn", [&] {
            const RunConfig cfg = resolve(dnn_flags);
            const fs::path out(dnn_flags.out);
            endd::pipeline::train_dnn_command(cfg, dnn_data.empty() ? out / "data" : fs::path(dnn_data), out / "dnn");
        });
    }
    if (ens->parsed()) {
        return guarded("train-ensemble", [&] {
            RunConfig cfg = resolve(ens_flags);
            if (ens_size) {
                cfg.ensemble_size = *ens_size;
            }
            if (cfg.ensemble_size == 0) {
                throw endd::ConfigError("--size must be >= 1");
            }
            const fs::path out(ens_flags.out);
            endd::pipeline::train_ensemble_command(cfg, ens_data.empty() ? out / "data" : fs::path(ens_data),
                                                   out / "ensemble");
        });
    }
    if (tr->parsed()) {
        return guarded("build-transfer", [&] {
            const RunConfig cfg = resolve(tr_flags);
            const fs::path out(tr_flags.out);
            endd::pipeline::build_transfer_command(cfg, tr_data.empty() ? out / "data" : fs::path(tr_data),
                                                   tr_ens.empty() ? out / "ensemble" : fs::path(tr_ens),
                                                   tr_path.empty() ? out / "transfer.json" : fs::path(tr_path),
                                                   tr_aux);
        });
    }
    if (dist->parsed()) {
        return guarded("distill", [&] {
            RunConfig cfg = resolve(dist_flags);
            if (!dist_mode.empty()) {
                cfg.distill.mode = endd::distill::parse_mode(dist_mode);
            }
            if (dist_t0) {
                cfg.distill.t0 = *dist_t0;
            }
            if (dist_tfixed) {
                cfg.distill.t_fixed = *dist_tfixed;
            }
            if (dist_gamma) {
                cfg.distill.gamma = *dist_gamma;
            }
            if (dist_no_anneal) {
                cfg.distill.annealed = false;
            }
            const fs::path out(dist_flags.out);
            const std::string name =
                dist_name.empty() ? std::string(endd::distill::to_string(cfg.distill.mode)) : dist_name;
            endd::pipeline::distill_command(
                cfg, dist_transfer.empty() ? out / "transfer.json" : fs::path(dist_transfer), out / name);
        });
    }
    if (ev->parsed()) {
        return guarded("evaluate", [&] {
            RunConfig cfg = resolve(ev_flags);
            if (ev_bins) {
                cfg.ece_bins = *ev_bins;
            }
            const fs::path out(ev_flags.out);
            std::vector<endd::pipeline::ModelSpec> specs;
            for (const auto& m : ev_models) {
                specs.push_back(endd::pipeline::parse_model_spec(m));
            }
            if (specs.empty()) {
                using endd::metrics::ModelKind;
                const std::pair<ModelKind, fs::path> candidates[] = {
                    {ModelKind::dnn, out / "dnn" / "model.json"},
                    {ModelKind::ensemble, out / "ensemble"},
                    {ModelKind::end, out / "end" / "model.json"},
                    {ModelKind::end2, out / "end2" / "model.json"},
                };
                for (const auto& [kind, path] : candidates) {
                    if (fs::exists(path)) {
                        specs.push_back({std::string(endd::metrics::to_string(kind)), kind, path});
                    }
                }
            }
            const fs::path test_csv = ev_data.empty() ? out / "data" / "test.csv" : fs::path(ev_data);
            const int k = endd::pipeline::dataset_num_classes(test_csv.parent_path(), cfg.data.spiral.num_classes);
            endd::pipeline::evaluate_command(specs, test_csv, ev_ood.empty() ? out / "data" / "ood.csv" : fs::path(ev_ood),
                                             k, cfg.ece_bins, out / "eval");
        });
    }
    if (ab->parsed()) {
        return guarded("ablate", [&] {
            const RunConfig cfg = resolve(ab_flags);
            endd::pipeline::AblationPlan plan;
            plan.sizes.clear();
            plan.temps.clear();
            for (const auto& s : split_list(ab_sizes)) {
                plan.sizes.push_back(static_cast<std::size_t>(std::stoul(s)));
            }
            for (const auto& t : split_list(ab_temps)) {
                plan.temps.push_back(std::stod(t));
            }
            plan.seeds = ab_seeds;
            endd::pipeline::ablate_command(cfg, plan, fs::path(ab_flags.out) / "ablate");
        });
    }
    return 0;
}
