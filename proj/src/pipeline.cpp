// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#include "endd/pipeline.hpp"

#include "endd/error.hpp"
#include "endd/io.hpp"
#include "endd/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

namespace endd::pipeline {

using nlohmann::json;

RunConfig::RunConfig() {
    member.hidden = {64, 64};
    member.epochs = 40;
    member.cycle_len = 30;
    member.peak_lr = 1e-2;
    member.keep_prob = 1.0;
    member.batch_size = 128;
    student = member;
    student.epochs = 1000;
    student.cycle_len = 800;
}

// ---------------------------------------------------------------------------
// Config <-> JSON

namespace {

json train_to_json(const train::TrainConfig& t) {
    return {{"hidden", t.hidden},       {"epochs", t.epochs},       {"cycle_len", t.cycle_len},
            {"peak_lr", t.peak_lr},     {"keep_prob", t.keep_prob}, {"batch_size", t.batch_size}};
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError("config: '" + where + "' must be an object");
    }
    const std::set<std::string> keys(known.begin(), known.end());
    for (const auto& [key, value] : j.items()) {
        if (keys.count(key) == 0) {
            throw ConfigError("config: unknown key '" + where + key + "'");
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        out = j.at(key).get<T>();
    }
}

train::TrainConfig train_from_json(const json& j, train::TrainConfig t, const std::string& where) {
    reject_unknown(j, {"hidden", "epochs", "cycle_len", "peak_lr", "keep_prob", "batch_size"}, where);
    read(j, "hidden", t.hidden);
    read(j, "epochs", t.epochs);
    read(j, "cycle_len", t.cycle_len);
    read(j, "peak_lr", t.peak_lr);
    read(j, "keep_prob", t.keep_prob);
    read(j, "batch_size", t.batch_size);
    return t;
}

} // namespace

json config_to_json(const RunConfig& cfg) {
    const auto& d = cfg.data;
    json j;
    j["seed"] = cfg.seed;
    j["ensemble_size"] = cfg.ensemble_size;
    j["ece_bins"] = cfg.ece_bins;
    j["data"] = {{"n_per_class", d.spiral.n_per_class},
                 {"num_classes", d.spiral.num_classes},
                 {"noise_base", d.spiral.noise_base},
                 {"noise_growth", d.spiral.noise_growth},
                 {"n_test_per_class", d.n_test_per_class},
                 {"n_ood", d.n_ood},
                 {"ood_inner", d.ood.inner},
                 {"ood_outer", d.ood.outer},
                 {"n_aux", d.n_aux},
                 {"aux_half_width", d.aux.half_width},
                 {"aux_exclusion", d.aux.exclusion}};
    j["member"] = train_to_json(cfg.member);
    j["student"] = train_to_json(cfg.student);
    j["distill"] = {{"mode", std::string(distill::to_string(cfg.distill.mode))},
                    {"t_fixed", cfg.distill.t_fixed},
                    {"t0", cfg.distill.t0},
                    {"annealed", cfg.distill.annealed ? json(*cfg.distill.annealed) : json(nullptr)},
                    {"gamma", cfg.distill.gamma},
                    {"aux", cfg.distill.use_aux}};
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    try {
        // threads only affects scheduling, never results, so it is accepted
        // here but left out of the canonical form and the hash.
        reject_unknown(j, {"seed", "ensemble_size", "ece_bins", "threads", "data", "member", "student", "distill"}, "");
        read(j, "seed", cfg.seed);
        read(j, "ensemble_size", cfg.ensemble_size);
        read(j, "ece_bins", cfg.ece_bins);
        read(j, "threads", cfg.threads);
        if (j.contains("data")) {
            const auto& d = j.at("data");
            reject_unknown(d, {"n_per_class", "num_classes", "noise_base", "noise_growth", "n_test_per_class",
                               "n_ood", "ood_inner", "ood_outer", "n_aux", "aux_half_width", "aux_exclusion"},
                           "data.");
            read(d, "n_per_class", cfg.data.spiral.n_per_class);
            read(d, "num_classes", cfg.data.spiral.num_classes);
            read(d, "noise_base", cfg.data.spiral.noise_base);
            read(d, "noise_growth", cfg.data.spiral.noise_growth);
            read(d, "n_test_per_class", cfg.data.n_test_per_class);
            read(d, "n_ood", cfg.data.n_ood);
            read(d, "ood_inner", cfg.data.ood.inner);
            read(d, "ood_outer", cfg.data.ood.outer);
            read(d, "n_aux", cfg.data.n_aux);
            read(d, "aux_half_width", cfg.data.aux.half_width);
            read(d, "aux_exclusion", cfg.data.aux.exclusion);
        }
        if (j.contains("member")) {
            cfg.member = train_from_json(j.at("member"), cfg.member, "member.");
        }
        if (j.contains("student")) {
            cfg.student = train_from_json(j.at("student"), cfg.student, "student.");
        }
        if (j.contains("distill")) {
            const auto& d = j.at("distill");
            reject_unknown(d, {"mode", "t_fixed", "t0", "annealed", "gamma", "aux"}, "distill.");
            if (d.contains("mode")) {
                cfg.distill.mode = distill::parse_mode(d.at("mode").get<std::string>());
            }
            read(d, "t_fixed", cfg.distill.t_fixed);
            read(d, "t0", cfg.distill.t0);
            if (d.contains("annealed") && !d.at("annealed").is_null()) {
                cfg.distill.annealed = d.at("annealed").get<bool>();
            }
            read(d, "gamma", cfg.distill.gamma);
            read(d, "aux", cfg.distill.use_aux);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (cfg.ensemble_size == 0) {
        throw ConfigError("config: ensemble_size must be >= 1");
    }
    train::validate(cfg.member);
    train::validate(cfg.student);
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    try {
        return config_from_json(json::parse(io::read_file(path)));
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
}

std::string config_hash(const RunConfig& cfg) {
    const std::string text = config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

distill::DistillConfig distill_config(const RunConfig& cfg) {
    distill::DistillConfig d;
    d.mode = cfg.distill.mode;
    d.t_fixed = cfg.distill.t_fixed;
    d.t0 = cfg.distill.t0;
    d.annealed = cfg.distill.annealed;
    d.gamma = cfg.distill.gamma;
    d.train = cfg.student;
    d.seed = derive_seed(cfg.seed, "student");
    return d;
}

// ---------------------------------------------------------------------------
// Data

DataBundle generate_data(const RunConfig& cfg) {
    DataBundle b;
    auto test_params = cfg.data.spiral;
    test_params.n_per_class = cfg.data.n_test_per_class;
    b.train = data::make_spiral(cfg.data.spiral, derive_seed(cfg.seed, "data", 0), data::Split::train);
    b.test = data::make_spiral(test_params, derive_seed(cfg.seed, "data", 1), data::Split::test);
    b.ood = data::make_ood(cfg.data.ood, cfg.data.n_ood, derive_seed(cfg.seed, "data", 2), data::Split::ood);
    b.aux = data::make_ood(cfg.data.aux, cfg.data.n_aux, derive_seed(cfg.seed, "data", 3), data::Split::aux);
    b.ood.num_classes = b.aux.num_classes = cfg.data.spiral.num_classes;
    return b;
}

void gen_data(const RunConfig& cfg, const fs::path& dir) {
    const auto b = generate_data(cfg);
    data::save_csv(b.train, dir / "train.csv");
    data::save_csv(b.test, dir / "test.csv");
    data::save_csv(b.ood, dir / "ood.csv");
    data::save_csv(b.aux, dir / "aux.csv");
    json manifest;
    manifest["generator"] = "spiral";
    manifest["seed"] = cfg.seed;
    manifest["params"] = config_to_json(cfg).at("data");
    manifest["files"] = {{"train", {{"file", "train.csv"}, {"rows", b.train.size()}}},
                         {"test", {{"file", "test.csv"}, {"rows", b.test.size()}}},
                         {"ood", {{"file", "ood.csv"}, {"rows", b.ood.size()}}},
                         {"aux", {{"file", "aux.csv"}, {"rows", b.aux.size()}}}};
    io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

DataBundle load_data(const fs::path& dir, int num_classes) {
    DataBundle b;
    b.train = data::load_csv(dir / "train.csv", num_classes, data::Split::train);
    b.test = data::load_csv(dir / "test.csv", num_classes, data::Split::test);
    b.ood = data::load_csv(dir / "ood.csv", num_classes, data::Split::ood);
    b.aux = data::load_csv(dir / "aux.csv", num_classes, data::Split::aux);
    if (!b.train.labeled() || !b.test.labeled()) {
        throw ConfigError("dataset: train and test CSVs must carry labels");
    }
    return b;
}

int dataset_num_classes(const fs::path& data_dir, int fallback) {
    const fs::path manifest = data_dir / "manifest.json";
    if (!fs::exists(manifest)) {
        return fallback;
    }
    try {
        return json::parse(io::read_file(manifest)).at("params").at("num_classes").get<int>();
    } catch (const json::exception& e) {
        throw ParseError(manifest.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Training commands

namespace {

data::Dataset2D load_train(const fs::path& data_dir, int k) {
    if (!fs::exists(data_dir / "train.csv")) {
        throw IoError("missing dataset: " + (data_dir / "train.csv").string());
    }
    auto ds = data::load_csv(data_dir / "train.csv", k, data::Split::train);
    if (!ds.labeled()) {
        throw ConfigError("dataset: train.csv carries no labels");
    }
    return ds;
}

} // namespace

void train_dnn_command(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir) {
    const auto ds = load_train(data_dir, dataset_num_classes(data_dir, cfg.data.spiral.num_classes));
    const auto seed = ensemble::member_seed(cfg.seed, 0);
    std::vector<train::EpochStats> log;
    Mlp model = train::train_dnn(ds, cfg.member, seed, &log);
    save_checkpoint(out_dir / "model.json", Checkpoint{model, {seed, cfg.member.epochs, "dnn"}});
    io::write_file(out_dir / "train_log.csv", train::epoch_log_csv(log));
}

void train_ensemble_command(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir) {
    const auto ds = load_train(data_dir, dataset_num_classes(data_dir, cfg.data.spiral.num_classes));
    std::vector<std::vector<train::EpochStats>> logs;
    const auto e = ensemble::train_ensemble(ds, cfg.member, cfg.ensemble_size, cfg.seed, cfg.threads, &logs);
    ensemble::save_ensemble(out_dir, e, cfg.member.epochs, config_hash(cfg));
    for (std::size_t i = 0; i < logs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "member_%03zu.csv", i);
        io::write_file(out_dir / "logs" / name, train::epoch_log_csv(logs[i]));
    }
}

void build_transfer_command(const RunConfig& cfg, const fs::path& data_dir, const fs::path& ensemble_dir,
                            const fs::path& out_path, bool with_aux) {
    const auto e = ensemble::load_ensemble(ensemble_dir);
    const int k = e.num_classes;
    const int data_k = dataset_num_classes(data_dir, cfg.data.spiral.num_classes);
    if (k != data_k) {
        throw ConfigError("build-transfer: ensemble has K=" + std::to_string(k) + " but the dataset has K=" +
                          std::to_string(data_k));
    }
    const auto train_ds = load_train(data_dir, k);
    std::optional<data::Dataset2D> aux;
    if (with_aux) {
        aux = data::load_csv(data_dir / "aux.csv", k, data::Split::aux);
    }
    ensemble::save_transfer(out_path, ensemble::build_transfer_set(e, train_ds, aux));
}

void distill_command(const RunConfig& cfg, const fs::path& transfer_path, const fs::path& out_dir) {
    const auto transfer = ensemble::load_transfer(transfer_path);
    const auto dcfg = distill_config(cfg);
    std::vector<train::EpochStats> log;
    const Mlp student = distill::train_distilled(transfer, dcfg, &log);
    save_checkpoint(out_dir / "model.json",
                    Checkpoint{student, {dcfg.seed, dcfg.train.epochs, std::string(distill::to_string(dcfg.mode))}});
    io::write_file(out_dir / "train_log.csv", train::epoch_log_csv(log));
}

// ---------------------------------------------------------------------------
// Evaluation

ModelSpec parse_model_spec(const std::string& text) {
    ModelSpec spec;
    std::string rest = text;
    const auto eq = rest.find('=');
    if (eq != std::string::npos) {
        spec.name = rest.substr(0, eq);
        rest = rest.substr(eq + 1);
    }
    const auto colon = rest.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size()) {
        throw ConfigError("model spec '" + text + "' must look like [name=]kind:path");
    }
    spec.kind = metrics::parse_model_kind(rest.substr(0, colon));
    spec.path = rest.substr(colon + 1);
    if (spec.name.empty()) {
        spec.name = std::string(metrics::to_string(spec.kind));
    }
    return spec;
}

LoadedModel load_model(const ModelSpec& spec) {
    LoadedModel m{spec.name, spec.kind, {}};
    if (spec.kind == metrics::ModelKind::ensemble) {
        m.nets = ensemble::load_ensemble(spec.path).members;
    } else {
        m.nets.push_back(load_checkpoint(spec.path).model);
    }
    return m;
}

namespace {

using metrics::Measure;

constexpr Measure kMeasures[] = {Measure::confidence, Measure::total, Measure::expected_data, Measure::knowledge};

bool has_measure(const metrics::ScoredPredictions& s, Measure m) {
    return m == Measure::confidence || m == Measure::total || (m == Measure::knowledge ? s.knowledge.has_value()
                                                                                       : s.expected_data.has_value());
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

json mean_uncertainty(const metrics::ScoredPredictions& s) {
    json j;
    j["total"] = mean_of(s.total);
    j["expected_data"] = s.expected_data ? json(mean_of(*s.expected_data)) : json(nullptr);
    j["knowledge"] = s.knowledge ? json(mean_of(*s.knowledge)) : json(nullptr);
    return j;
}

} // namespace

ModelEvaluation evaluate_model(const LoadedModel& model, const data::Dataset2D& test, const data::Dataset2D& ood,
                               int ece_bins) {
    ModelEvaluation ev;
    ev.name = model.name;
    ev.kind = model.kind;
    ev.test = metrics::score_model(model.kind, model.nets, test.points, test.labels);
    ev.ood = metrics::score_model(model.kind, model.nets, ood.points);

    json test_j;
    test_j["n"] = test.size();
    test_j["error"] = metrics::error_rate(ev.test.probs, test.labels);
    test_j["nll"] = metrics::nll(ev.test.probs, test.labels);
    test_j["ece"] = metrics::ece(ev.test.probs, test.labels, ece_bins);
    json prr_j;
    json auroc_j;
    json aupr_j;
    for (Measure m : kMeasures) {
        const std::string key(metrics::to_string(m));
        if (!has_measure(ev.test, m)) {
            prr_j[key] = nullptr;
            auroc_j[key] = nullptr;
            aupr_j[key] = nullptr;
            continue;
        }
        try {
            prr_j[key] = metrics::prr(metrics::rejection_curve(ev.test, m));
        } catch (const UndefinedMetricError&) {
            prr_j[key] = nullptr;
        }
        const auto id_scores = ev.test.scores(m);
        const auto ood_scores = ev.ood.scores(m);
        auroc_j[key] = metrics::roc_auc(ood_scores, id_scores);
        aupr_j[key] = metrics::pr_auc(ood_scores, id_scores);
    }
    test_j["prr"] = std::move(prr_j);
    ev.metrics["kind"] = std::string(metrics::to_string(model.kind));
    ev.metrics["test"] = std::move(test_j);
    ev.metrics["ood"] = {{"n", ood.size()}, {"auroc", std::move(auroc_j)}, {"aupr", std::move(aupr_j)}};
    ev.metrics["mean_uncertainty"] = {{"id", mean_uncertainty(ev.test)}, {"ood", mean_uncertainty(ev.ood)}};
    return ev;
}

namespace {

std::string cell(const std::optional<std::vector<double>>& column, std::size_t i) {
    return column ? io::format_double((*column)[i]) : std::string();
}

void append_histogram_rows(std::string& out, const std::string& model, const char* split,
                           const metrics::ScoredPredictions& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += model + "," + split + "," + std::to_string(i) + "," + io::format_double(s.confidence[i]) + "," +
               io::format_double(s.total[i]) + "," + cell(s.expected_data, i) + "," + cell(s.knowledge, i) + "\n";
    }
}

} // namespace

void write_reports(const std::vector<ModelEvaluation>& evals, const fs::path& out_dir) {
    json report;
    report["schema"] = "endd.metrics/1";
    report["models"] = json::object();
    std::string hist = "model,split,index,confidence,total,expected_data,knowledge\n";
    std::string rejection = "model,measure,fraction,measured,random,oracle\n";
    std::string roc = "model,measure,fpr,tpr\n";
    for (const auto& ev : evals) {
        report["models"][ev.name] = ev.metrics;
        append_histogram_rows(hist, ev.name, "id", ev.test);
        append_histogram_rows(hist, ev.name, "ood", ev.ood);
        for (Measure m : kMeasures) {
            if (!has_measure(ev.test, m)) {
                continue;
            }
            const std::string prefix = ev.name + "," + std::string(metrics::to_string(m)) + ",";
            const auto curve = metrics::rejection_curve(ev.test, m);
            for (std::size_t k = 0; k < curve.fraction.size(); ++k) {
                rejection += prefix + io::format_double(curve.fraction[k]) + "," + io::format_double(curve.measured[k]) +
                             "," + io::format_double(curve.random[k]) + "," + io::format_double(curve.oracle[k]) + "\n";
            }
            for (const auto& [fpr, tpr] : metrics::roc_curve(ev.ood.scores(m), ev.test.scores(m))) {
                roc += prefix + io::format_double(fpr) + "," + io::format_double(tpr) + "\n";
            }
        }
    }
    io::write_file(out_dir / "metrics.json", report.dump(2) + "\n");
    io::write_file(out_dir / "histograms.csv", hist);
    io::write_file(out_dir / "rejection.csv", rejection);
    io::write_file(out_dir / "roc.csv", roc);
}

std::vector<ModelEvaluation> evaluate_command(const std::vector<ModelSpec>& models, const fs::path& test_csv,
                                              const fs::path& ood_csv, int num_classes, int ece_bins,
                                              const fs::path& out_dir) {
    if (models.empty()) {
        throw ConfigError("evaluate: no models given");
    }
    const auto test = data::load_csv(test_csv, num_classes, data::Split::test);
    if (!test.labeled()) {
        throw ConfigError("evaluate: test set must carry labels");
    }
    const auto ood = data::load_csv(ood_csv, num_classes, data::Split::ood);
    std::set<std::string> names;
    std::vector<ModelEvaluation> evals;
    for (const auto& spec : models) {
        if (!names.insert(spec.name).second) {
            throw ConfigError("evaluate: duplicate model name '" + spec.name + "'");
        }
        const auto model = load_model(spec);
        if (static_cast<int>(model.nets.front().num_classes()) != num_classes) {
            throw ConfigError("evaluate: model '" + spec.name + "' has a different number of classes");
        }
        evals.push_back(evaluate_model(model, test, ood, ece_bins));
    }
    write_reports(evals, out_dir);
    return evals;
}

// ---------------------------------------------------------------------------
// Ablation

namespace {

json null_or(const json& j) {
    return j.is_null() ? json(nullptr) : j;
}

std::string csv_value(const json& v) {
    if (v.is_null()) {
        return "";
    }
    if (v.is_number_float()) {
        return io::format_double(v.get<double>());
    }
    if (v.is_string()) {
        return v.get<std::string>();
    }
    return v.dump();
}

const char* const kSweepColumns[] = {
    "arm",           "ensemble_size",   "t0",          "annealed",     "seed",
    "error",         "nll",             "ece",         "prr",          "ood_auroc_total",
    "ood_auroc_knowledge", "mean_total_id", "mean_knowledge_id", "mean_total_ood", "mean_knowledge_ood",
    "config_hash",
};

ensemble::Ensemble cached_ensemble(const RunConfig& cfg, const data::Dataset2D& train, const fs::path& dir) {
    if (fs::exists(dir / "done.json")) {
        return ensemble::load_ensemble(dir);
    }
    auto e = ensemble::train_ensemble(train, cfg.member, cfg.ensemble_size, cfg.seed, cfg.threads);
    ensemble::save_ensemble(dir, e, cfg.member.epochs, config_hash(cfg));
    io::write_file(dir / "done.json", "{}\n");
    return e;
}

json run_arm(const std::string& arm, const RunConfig& cfg, const DataBundle& data, const ensemble::Ensemble& e,
             const fs::path& arm_dir) {
    const fs::path done = arm_dir / "done.json";
    if (fs::exists(done)) {
        return json::parse(io::read_file(done));
    }
    std::optional<data::Dataset2D> aux;
    if (cfg.distill.use_aux) {
        aux = data.aux;
    }
    const auto transfer = ensemble::build_transfer_set(e, data.train, aux);
    const auto dcfg = distill_config(cfg);
    const Mlp student = distill::train_distilled(transfer, dcfg);
    save_checkpoint(arm_dir / "model.json", Checkpoint{student, {dcfg.seed, dcfg.train.epochs, "end2"}});
    const auto ev = evaluate_model({arm, metrics::ModelKind::end2, {student}}, data.test, data.ood, cfg.ece_bins);
    const auto& m = ev.metrics;
    json row;
    row["arm"] = arm;
    row["ensemble_size"] = cfg.ensemble_size;
    row["t0"] = cfg.distill.t0;
    row["annealed"] = dcfg.is_annealed();
    row["seed"] = cfg.seed;
    row["error"] = m["test"]["error"];
    row["nll"] = m["test"]["nll"];
    row["ece"] = m["test"]["ece"];
    row["prr"] = null_or(m["test"]["prr"]["confidence"]);
    row["ood_auroc_total"] = m["ood"]["auroc"]["total"];
    row["ood_auroc_knowledge"] = m["ood"]["auroc"]["knowledge"];
    row["mean_total_id"] = m["mean_uncertainty"]["id"]["total"];
    row["mean_knowledge_id"] = m["mean_uncertainty"]["id"]["knowledge"];
    row["mean_total_ood"] = m["mean_uncertainty"]["ood"]["total"];
    row["mean_knowledge_ood"] = m["mean_uncertainty"]["ood"]["knowledge"];
    row["config_hash"] = config_hash(cfg);
    io::write_file(done, row.dump() + "\n");
    return row;
}

std::string temp_label(double t) {
    return io::format_double(t);
}

} // namespace

std::size_t ablate_command(const RunConfig& base, const AblationPlan& plan, const fs::path& out_dir) {
    if (plan.sizes.empty() || plan.seeds < 1) {
        throw ConfigError("ablate: need at least one ensemble size and one seed");
    }
    for (auto s : plan.sizes) {
        if (s == 0) {
            throw ConfigError("ablate: ensemble sizes must be >= 1");
        }
    }
    const std::size_t largest = *std::max_element(plan.sizes.begin(), plan.sizes.end());
    std::vector<json> rows;
    for (int s = 0; s < plan.seeds; ++s) {
        RunConfig seed_cfg = base;
        seed_cfg.seed = base.seed + static_cast<std::uint64_t>(s);
        seed_cfg.distill.mode = distill::Mode::end2;
        const auto data = generate_data(seed_cfg);
        const std::string seed_tag = "seed" + std::to_string(seed_cfg.seed);
        for (std::size_t size : plan.sizes) {
            RunConfig cfg = seed_cfg;
            cfg.ensemble_size = size;
            const auto e = cached_ensemble(cfg, data.train,
                                           out_dir / "ensembles" / (seed_tag + "_m" + std::to_string(size)));
            rows.push_back(run_arm("size", cfg, data, e,
                                   out_dir / "arms" / (seed_tag + "_size" + std::to_string(size))));
        }
        for (double t : plan.temps) {
            RunConfig cfg = seed_cfg;
            cfg.ensemble_size = largest;
            cfg.distill.t0 = t;
            const auto e = cached_ensemble(cfg, data.train,
                                           out_dir / "ensembles" / (seed_tag + "_m" + std::to_string(largest)));
            rows.push_back(run_arm("temp", cfg, data, e, out_dir / "arms" / (seed_tag + "_t0_" + temp_label(t))));
        }
    }
    std::string csv;
    for (const char* col : kSweepColumns) {
        csv += csv.empty() ? col : std::string(",") + col;
    }
    csv += "\n";
    for (const auto& row : rows) {
        std::string line;
        for (const char* col : kSweepColumns) {
            if (col != kSweepColumns[0]) {
                line += ",";
            }
            line += csv_value(row.at(col));
        }
        csv += line + "\n";
    }
    io::write_file(out_dir / "sweep.csv", csv);
    return rows.size();
}

} // namespace endd::pipeline
