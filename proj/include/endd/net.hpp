// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "endd/matrix.hpp"
#include "endd/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace endd {

/// A point on the probability simplex.
class CategoricalProbs {
public:
    CategoricalProbs() = default;
    /// Throws DomainError unless entries are >= 0 and sum to 1 within 1e-9.
    explicit CategoricalProbs(std::vector<double> probs);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> values() const noexcept { return probs_; }
    const std::vector<double>& vector() const noexcept { return probs_; }

    auto begin() const noexcept { return probs_.begin(); }
    auto end() const noexcept { return probs_.end(); }

    bool operator==(const CategoricalProbs&) const = default;

private:
    std::vector<double> probs_;
};

/// Tempered softmax exp(z_c/T) / sum_k exp(z_k/T), max-subtracted.
/// Throws DomainError on non-finite logits or T <= 0.
CategoricalProbs softmax(std::span<const double> logits, double temperature = 1.0);

/// Unchecked variant writing into `out`; used on hot paths.
void softmax_into(std::span<const double> logits, double temperature, std::span<double> out);

/// Shannon entropy in nats, with 0 ln 0 = 0.
double entropy(std::span<const double> probs);

enum class Activation { relu, identity };

struct Layer {
    Matrix weight;            // out x in
    std::vector<double> bias; // out
    Activation activation = Activation::relu;

    std::size_t in_dim() const noexcept { return weight.cols(); }
    std::size_t out_dim() const noexcept { return weight.rows(); }
    bool operator==(const Layer&) const = default;
};

/// Feed-forward classifier producing raw logits.
struct Mlp {
    std::vector<Layer> layers;

    std::size_t input_dim() const;
    std::size_t num_classes() const;
    /// {input_dim, hidden..., num_classes}
    std::vector<std::size_t> dims() const;
    std::size_t parameter_count() const;
    /// Throws ShapeError if dimensions do not chain or the last layer is not identity.
    void validate() const;

    bool operator==(const Mlp&) const = default;
};

/// He-uniform initialised MLP with ReLU hidden layers and identity output.
/// Weight bound is sqrt(3 g^2 / fan_in) with gain g = sqrt(2) before a ReLU
/// and 1 for the linear output layer; biases start at zero.
Mlp make_mlp(std::span<const std::size_t> dims, Rng& rng);

/// All weights and biases zero.
Mlp zero_mlp(std::span<const std::size_t> dims);

struct EvalMode {};

/// Inverted dropout on hidden activations with the given keep probability.
struct TrainMode {
    double keep_prob = 1.0;
    Rng* rng = nullptr;
};

using ForwardMode = std::variant<EvalMode, TrainMode>;

/// Everything backward() needs from a forward pass.
struct ForwardTrace {
    Matrix inputs;
    std::vector<Matrix> pre;   // per layer, batch x out
    std::vector<Matrix> post;  // per layer, after activation and dropout
    std::vector<Matrix> masks; // per hidden layer, scaled keep masks; empty in eval mode
};

struct ForwardResult {
    Matrix logits;
    ForwardTrace trace;
};

ForwardResult forward(const Mlp& model, const Matrix& batch, const ForwardMode& mode = EvalMode{});

/// Eval-mode logits without keeping a trace.
Matrix predict_logits(const Mlp& model, const Matrix& batch);

/// Parameter gradients, shaped like the model.
struct Gradients {
    std::vector<Matrix> weight;
    std::vector<std::vector<double>> bias;

    static Gradients zeros_like(const Mlp& model);
};

/// Backpropagates dL/dlogits through the traced forward pass. The batch
/// reduction is whatever the loss applied when producing `dlogits`.
Gradients backward(const Mlp& model, const ForwardTrace& trace, const Matrix& dlogits);

/// Scalar loss of a logits matrix. When `grad` is non-null it must be filled
/// with dL/dlogits (same shape as logits).
using LogitLoss = std::function<double(const Matrix& logits, Matrix* grad)>;

/// Compares backward() against central differences (step h) over every
/// parameter in eval mode. Relative error per entry is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6); returns the worst.
double grad_check(const Mlp& model, const LogitLoss& loss, const Matrix& batch, double h = 1e-5);

/// Mean cross-entropy of softmax(logits) against integer labels.
double cross_entropy(const Matrix& logits, std::span<const int> labels, Matrix* grad);

// ---------------------------------------------------------------------------
// Checkpoints

struct CheckpointMeta {
    std::uint64_t seed = 0;
    int epochs = 0;
    std::string model_kind = "dnn"; // dnn | end | end2 | member

    bool operator==(const CheckpointMeta&) const = default;
};

struct Checkpoint {
    Mlp model;
    CheckpointMeta meta;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace endd
