// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "endd/data.hpp"
#include "endd/net.hpp"
#include "endd/train.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace endd::ensemble {

struct Ensemble {
    std::vector<Mlp> members;
    std::vector<std::uint64_t> member_seeds;
    int num_classes = 0;

    std::size_t size() const noexcept { return members.size(); }
    /// Throws ConfigError if empty or members disagree on architecture.
    void validate() const;
};

/// Seed of member `index` for a global run seed; member 0 is also the seed a
/// single DNN baseline uses, so a one-member ensemble equals that baseline.
std::uint64_t member_seed(std::uint64_t global_seed, std::size_t index);

/// Trains `size` members on the same data, each with its own seed
/// (initialisation, shuffling, dropout). Members are trained on up to
/// `threads` workers (0 = hardware concurrency); output order and content do
/// not depend on scheduling.
Ensemble train_ensemble(const data::Dataset2D& data, const train::TrainConfig& cfg, std::size_t size,
                        std::uint64_t global_seed, unsigned threads = 0,
                        std::vector<std::vector<train::EpochStats>>* logs = nullptr);

/// Arithmetic mean over members.
CategoricalProbs ensemble_predictive(std::span<const CategoricalProbs> member_probs);

struct Uncertainties {
    double total = 0.0;         // H[mean]
    double expected_data = 0.0; // mean member entropy
    double knowledge = 0.0;     // mutual information
};

Uncertainties ensemble_uncertainties(std::span<const CategoricalProbs> member_probs);

/// Inputs with every member's raw logits, so temperature can be re-applied
/// when distilling. Unlabeled rows carry label -1.
struct TransferSet {
    Matrix inputs;                    // N x d
    std::vector<double> member_logits; // N x M x K, row-major
    std::vector<int> labels;          // N entries, -1 where absent
    std::vector<bool> aux_mask;       // N flags
    std::size_t num_members = 0;
    std::size_t num_classes = 0;

    std::size_t size() const noexcept { return inputs.rows(); }
    std::span<const double> logits(std::size_t row, std::size_t member) const {
        return {member_logits.data() + (row * num_members + member) * num_classes, num_classes};
    }
    /// Throws ShapeError on inconsistent dimensions or unlabeled in-domain rows.
    void validate() const;
    bool operator==(const TransferSet&) const = default;
};

/// Evaluates every member (eval mode) on the in-domain inputs followed by the
/// optional auxiliary inputs.
TransferSet build_transfer_set(const Ensemble& e, const data::Dataset2D& inputs,
                               const std::optional<data::Dataset2D>& aux = std::nullopt);

std::string transfer_to_json(const TransferSet& t);
TransferSet transfer_from_json(const std::string& text);
void save_transfer(const std::filesystem::path& path, const TransferSet& t);
TransferSet load_transfer(const std::filesystem::path& path);

/// Member softmax outputs at T = 1 for every row of `inputs`: result[row][m].
std::vector<std::vector<CategoricalProbs>> member_probs(const Ensemble& e, const Matrix& inputs);

/// Writes member_000.json ... and manifest.json into `dir`.
void save_ensemble(const std::filesystem::path& dir, const Ensemble& e, int epochs,
                   const std::string& config_hash);
Ensemble load_ensemble(const std::filesystem::path& dir);

} // namespace endd::ensemble
