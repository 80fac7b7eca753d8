// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "endd/data.hpp"
#include "endd/distill.hpp"
#include "endd/ensemble.hpp"
#include "endd/metrics.hpp"
#include "endd/train.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace endd::pipeline {

namespace fs = std::filesystem;

struct DataConfig {
    data::SpiralParams spiral;
    std::size_t n_test_per_class = 1000;
    std::size_t n_ood = 1000;
    data::Ring ood{2.0, 3.0};
    std::size_t n_aux = 3000;
    data::Box aux{4.0, 1.25};
};

struct DistillSettings {
    distill::Mode mode = distill::Mode::end2;
    double t_fixed = 2.5;
    double t0 = 10.0;
    std::optional<bool> annealed;
    double gamma = 1e-4;
    bool use_aux = true;
};

/// Everything a run needs; every field has a default.
struct RunConfig {
    DataConfig data;
    train::TrainConfig member;  // DNN baseline and ensemble members
    train::TrainConfig student; // EnD and EnD^2 students
    std::size_t ensemble_size = 20;
    DistillSettings distill;
    std::uint64_t seed = 0;
    int ece_bins = 15;
    unsigned threads = 0;

    RunConfig();
};

nlohmann::json config_to_json(const RunConfig& cfg);
/// Missing keys keep their defaults; unknown keys raise ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const fs::path& path);
/// 16 hex digits of FNV-1a over the canonical JSON form.
std::string config_hash(const RunConfig& cfg);

/// Distillation settings resolved into a trainer config (student seed derived
/// from the run seed).
distill::DistillConfig distill_config(const RunConfig& cfg);

struct DataBundle {
    data::Dataset2D train;
    data::Dataset2D test;
    data::Dataset2D ood;
    data::Dataset2D aux;
};

DataBundle generate_data(const RunConfig& cfg);

/// train.csv, test.csv, ood.csv, aux.csv and manifest.json.
void gen_data(const RunConfig& cfg, const fs::path& dir);
DataBundle load_data(const fs::path& dir, int num_classes);

/// Class count recorded in `data_dir`/manifest.json, or `fallback` when the
/// directory has no manifest.
int dataset_num_classes(const fs::path& data_dir, int fallback);

/// model.json (kind dnn) and train_log.csv in `out_dir`.
void train_dnn_command(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir);

/// member_XXX.json, manifest.json and logs/member_XXX.csv in `out_dir`.
void train_ensemble_command(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir);

/// Transfer set over the training inputs, plus auxiliary rows when `with_aux`.
void build_transfer_command(const RunConfig& cfg, const fs::path& data_dir, const fs::path& ensemble_dir,
                            const fs::path& out_path, bool with_aux);

/// model.json (kind end or end2) and train_log.csv in `out_dir`.
void distill_command(const RunConfig& cfg, const fs::path& transfer_path, const fs::path& out_dir);

/// A model to evaluate: a checkpoint file, or an ensemble directory.
struct ModelSpec {
    std::string name;
    metrics::ModelKind kind;
    fs::path path;
};

/// Parses `name=kind:path` or `kind:path` (name defaults to kind).
ModelSpec parse_model_spec(const std::string& text);

struct ModelEvaluation {
    std::string name;
    metrics::ModelKind kind;
    metrics::ScoredPredictions test;
    metrics::ScoredPredictions ood;
    nlohmann::json metrics; // one entry of metrics.json "models"
};

struct LoadedModel {
    std::string name;
    metrics::ModelKind kind;
    std::vector<Mlp> nets;
};

LoadedModel load_model(const ModelSpec& spec);

/// Scores one model on the labeled test set and the OOD set.
ModelEvaluation evaluate_model(const LoadedModel& model, const data::Dataset2D& test,
                               const data::Dataset2D& ood, int ece_bins);

/// metrics.json, histograms.csv, rejection.csv and roc.csv in `out_dir`.
std::vector<ModelEvaluation> evaluate_command(const std::vector<ModelSpec>& models, const fs::path& test_csv,
                                              const fs::path& ood_csv, int num_classes, int ece_bins,
                                              const fs::path& out_dir);

/// Writes the four report files for already-computed evaluations.
void write_reports(const std::vector<ModelEvaluation>& evals, const fs::path& out_dir);

struct AblationPlan {
    std::vector<std::size_t> sizes{5, 20, 50, 100};
    std::vector<double> temps{1, 2, 5, 10, 20};
    int seeds = 3;
};

/// Size sweep and initial-temperature sweep of EnD^2. Each finished arm
/// leaves out_dir/arms/<arm>/done.json; reruns reuse finished arms.
/// Writes out_dir/sweep.csv and returns its row count.
std::size_t ablate_command(const RunConfig& cfg, const AblationPlan& plan, const fs::path& out_dir);

} // namespace endd::pipeline
