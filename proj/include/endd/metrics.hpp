// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "endd/matrix.hpp"
#include "endd/net.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace endd::metrics {

enum class ModelKind { dnn, end, ensemble, end2 };

std::string_view to_string(ModelKind kind);
/// "dnn" | "end" | "ensemble" | "end2"; throws ConfigError otherwise.
ModelKind parse_model_kind(std::string_view text);

/// Uncertainty measure used to rank samples. `confidence` ranks by negative
/// max-class probability so that larger always means more uncertain.
enum class Measure { confidence, total, expected_data, knowledge };

std::string_view to_string(Measure measure);

/// Per-sample predictions and uncertainties of one model on one dataset.
struct ScoredPredictions {
    ModelKind kind = ModelKind::dnn;
    Matrix probs;                // N x K predictive distribution
    std::vector<int> predicted;  // argmax, ties to the lowest class
    std::vector<int> labels;     // empty for unlabeled data
    std::vector<bool> correct;   // empty for unlabeled data
    std::vector<double> confidence;
    std::vector<double> total;
    std::optional<std::vector<double>> expected_data; // ensemble / end2 only
    std::optional<std::vector<double>> knowledge;     // ensemble / end2 only

    std::size_t size() const noexcept { return predicted.size(); }
    bool labeled() const noexcept { return !labels.empty(); }
    /// Scores where larger means more uncertain. Throws
    /// UnsupportedMeasureError for a measure this model kind does not define.
    std::vector<double> scores(Measure measure) const;
};

/// Softmax classifier (dnn / end): confidence and total uncertainty only.
ScoredPredictions score_softmax(ModelKind kind, const Mlp& model, const Matrix& inputs,
                                std::span<const int> labels = {});

/// Ensemble: mean predictive plus the mutual-information decomposition.
ScoredPredictions score_ensemble(std::span<const Mlp> members, const Matrix& inputs,
                                 std::span<const int> labels = {});

/// Prior network: Dirichlet at T = 1, closed-form decomposition.
ScoredPredictions score_end2(const Mlp& model, const Matrix& inputs, std::span<const int> labels = {});

/// Dispatches on `kind`; `nets` holds one model except for ensembles.
ScoredPredictions score_model(ModelKind kind, std::span<const Mlp> nets, const Matrix& inputs,
                              std::span<const int> labels = {});

/// Mean of -ln p(label), probabilities floored at 1e-12. Throws DomainError
/// on an out-of-range label.
double nll(const Matrix& probs, std::span<const int> labels);

double error_rate(const Matrix& probs, std::span<const int> labels);

/// Equal-width bins on the max-class confidence; empty bins contribute 0.
double ece(const Matrix& probs, std::span<const int> labels, int bins = 15);

/// P(score_pos > score_neg) with ties counted 1/2. Throws ConfigError if
/// either set is empty.
double roc_auc(std::span<const double> pos, std::span<const double> neg);

/// Average precision with step interpolation, thresholds at every observed
/// score. Throws ConfigError if either set is empty.
double pr_auc(std::span<const double> pos, std::span<const double> neg);

/// (false positive rate, true positive rate) at every distinct threshold,
/// starting at (0,0) and ending at (1,1).
std::vector<std::pair<double, double>> roc_curve(std::span<const double> pos,
                                                 std::span<const double> neg);

/// Error-rate curves on the per-sample grid k/N, k = 0..N. Rejected
/// samples count as correct (answered by an oracle).
struct RejectionCurve {
    std::vector<double> fraction;
    std::vector<double> measured;
    std::vector<double> random;
    std::vector<double> oracle;
    double base_error = 0.0;
};

/// Rejects the most uncertain samples first; ties keep sample order.
/// Throws ConfigError if fewer than two samples or sizes differ.
RejectionCurve rejection_curve(std::span<const double> uncertainty, const std::vector<bool>& correct);

RejectionCurve rejection_curve(const ScoredPredictions& scores, Measure measure);

/// Area between measured and random curves over area between oracle and
/// random curves (trapezoidal). Throws UndefinedMetricError at zero base error.
double prr(const RejectionCurve& curve);

/// Spearman rank correlation with average ranks for ties; 0 when either
/// sample is constant.
double spearman(std::span<const double> a, std::span<const double> b);

} // namespace endd::metrics
