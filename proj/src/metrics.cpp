// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#include "endd/metrics.hpp"

#include "endd/dirichlet.hpp"
#include "endd/ensemble.hpp"
#include "endd/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace endd::metrics {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::dnn: return "dnn";
    case ModelKind::end: return "end";
    case ModelKind::ensemble: return "ensemble";
    case ModelKind::end2: return "end2";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view text) {
    for (auto k : {ModelKind::dnn, ModelKind::end, ModelKind::ensemble, ModelKind::end2}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    throw ConfigError("unknown model kind '" + std::string(text) + "'");
}

std::string_view to_string(Measure measure) {
    switch (measure) {
    case Measure::confidence: return "confidence";
    case Measure::total: return "total";
    case Measure::expected_data: return "expected_data";
    case Measure::knowledge: return "knowledge";
    }
    return "?";
}

std::vector<double> ScoredPredictions::scores(Measure measure) const {
    switch (measure) {
    case Measure::confidence: {
        std::vector<double> s(confidence.size());
        std::transform(confidence.begin(), confidence.end(), s.begin(), [](double c) { return -c; });
        return s;
    }
    case Measure::total: return total;
    case Measure::expected_data:
    case Measure::knowledge: {
        const auto& column = measure == Measure::knowledge ? knowledge : expected_data;
        if (!column) {
            throw UnsupportedMeasureError(std::string(to_string(kind)) + " models do not provide " +
                                          std::string(to_string(measure)) + " uncertainty");
        }
        return *column;
    }
    }
    return {};
}

namespace {

void check_labels(std::span<const int> labels, std::size_t n) {
    if (!labels.empty() && labels.size() != n) {
        throw ShapeError("score: label count does not match inputs");
    }
}

// Fills probs-derived columns (prediction, confidence, correctness, total).
void fill_common(ScoredPredictions& s, std::span<const int> labels) {
    const std::size_t n = s.probs.rows();
    s.predicted.resize(n);
    s.confidence.resize(n);
    s.total.resize(n);
    s.labels.assign(labels.begin(), labels.end());
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = s.probs.row(i);
        const auto best = std::max_element(p.begin(), p.end());
        s.predicted[i] = static_cast<int>(best - p.begin());
        s.confidence[i] = *best;
        s.total[i] = entropy(p);
    }
    if (!labels.empty()) {
        s.correct.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            s.correct[i] = s.predicted[i] == labels[i];
        }
    }
}

} // namespace

ScoredPredictions score_softmax(ModelKind kind, const Mlp& model, const Matrix& inputs,
                                std::span<const int> labels) {
    check_labels(labels, inputs.rows());
    ScoredPredictions s;
    s.kind = kind;
    const Matrix logits = predict_logits(model, inputs);
    s.probs = Matrix(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        softmax_into(logits.row(i), 1.0, s.probs.row(i));
    }
    fill_common(s, labels);
    return s;
}

ScoredPredictions score_ensemble(std::span<const Mlp> members, const Matrix& inputs,
                                 std::span<const int> labels) {
    if (members.empty()) {
        throw ConfigError("score_ensemble: no members");
    }
    check_labels(labels, inputs.rows());
    const std::size_t n = inputs.rows();
    const std::size_t k = members.front().num_classes();
    std::vector<Matrix> member_probs;
    for (const auto& m : members) {
        const Matrix logits = predict_logits(m, inputs);
        Matrix p(n, k);
        for (std::size_t i = 0; i < n; ++i) {
            softmax_into(logits.row(i), 1.0, p.row(i));
        }
        member_probs.push_back(std::move(p));
    }
    ScoredPredictions s;
    s.kind = ModelKind::ensemble;
    s.probs = Matrix(n, k);
    std::vector<double> data_u(n, 0.0);
    std::vector<double> know_u(n, 0.0);
    std::vector<CategoricalProbs> row_members;
    for (std::size_t i = 0; i < n; ++i) {
        row_members.clear();
        for (const auto& p : member_probs) {
            const auto r = p.row(i);
            row_members.emplace_back(std::vector<double>(r.begin(), r.end()));
        }
        const auto mean = ensemble::ensemble_predictive(row_members);
        std::copy(mean.begin(), mean.end(), s.probs.row(i).begin());
        const auto u = ensemble::ensemble_uncertainties(row_members);
        data_u[i] = u.expected_data;
        know_u[i] = u.knowledge;
    }
    fill_common(s, labels);
    s.expected_data = std::move(data_u);
    s.knowledge = std::move(know_u);
    return s;
}

ScoredPredictions score_end2(const Mlp& model, const Matrix& inputs, std::span<const int> labels) {
    check_labels(labels, inputs.rows());
    const Matrix logits = predict_logits(model, inputs);
    const std::size_t n = logits.rows();
    ScoredPredictions s;
    s.kind = ModelKind::end2;
    s.probs = Matrix(n, logits.cols());
    std::vector<double> data_u(n);
    std::vector<double> know_u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto alpha = dirichlet::alphas_from_logits(logits.row(i), 1.0);
        const auto mean = dirichlet::expected_categorical(alpha);
        std::copy(mean.begin(), mean.end(), s.probs.row(i).begin());
        const auto u = dirichlet::uncertainties(alpha);
        data_u[i] = u.expected_data;
        know_u[i] = u.knowledge;
    }
    fill_common(s, labels);
    s.expected_data = std::move(data_u);
    s.knowledge = std::move(know_u);
    return s;
}

ScoredPredictions score_model(ModelKind kind, std::span<const Mlp> nets, const Matrix& inputs,
                              std::span<const int> labels) {
    if (kind == ModelKind::ensemble) {
        return score_ensemble(nets, inputs, labels);
    }
    if (nets.size() != 1) {
        throw ConfigError("score_model: " + std::string(to_string(kind)) + " expects exactly one network");
    }
    if (kind == ModelKind::end2) {
        return score_end2(nets.front(), inputs, labels);
    }
    return score_softmax(kind, nets.front(), inputs, labels);
}

// ---------------------------------------------------------------------------

namespace {

void check_prob_labels(const Matrix& probs, std::span<const int> labels) {
    if (labels.size() != probs.rows()) {
        throw ShapeError("label count does not match prediction rows");
    }
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= probs.cols()) {
            throw DomainError("label " + std::to_string(y) + " out of range");
        }
    }
}

std::size_t argmax(std::span<const double> p) {
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

} // namespace

double nll(const Matrix& probs, std::span<const int> labels) {
    check_prob_labels(probs, labels);
    if (labels.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        sum -= std::log(std::max(probs(i, static_cast<std::size_t>(labels[i])), 1e-12));
    }
    return sum / static_cast<double>(labels.size());
}

double error_rate(const Matrix& probs, std::span<const int> labels) {
    check_prob_labels(probs, labels);
    if (labels.empty()) {
        return 0.0;
    }
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        wrong += argmax(probs.row(i)) != static_cast<std::size_t>(labels[i]);
    }
    return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

double ece(const Matrix& probs, std::span<const int> labels, int bins) {
    check_prob_labels(probs, labels);
    if (bins < 1) {
        throw ConfigError("ece: need at least one bin");
    }
    if (labels.empty()) {
        return 0.0;
    }
    std::vector<double> conf_sum(static_cast<std::size_t>(bins), 0.0);
    std::vector<double> acc_sum(static_cast<std::size_t>(bins), 0.0);
    std::vector<std::size_t> count(static_cast<std::size_t>(bins), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto p = probs.row(i);
        const std::size_t pred = argmax(p);
        const double conf = p[pred];
        auto b = static_cast<std::size_t>(std::floor(conf * bins));
        b = std::min(b, static_cast<std::size_t>(bins - 1));
        conf_sum[b] += conf;
        acc_sum[b] += pred == static_cast<std::size_t>(labels[i]) ? 1.0 : 0.0;
        count[b] += 1;
    }
    const double n = static_cast<double>(labels.size());
    double total = 0.0;
    for (std::size_t b = 0; b < count.size(); ++b) {
        if (count[b] == 0) {
            continue;
        }
        const double nb = static_cast<double>(count[b]);
        total += (nb / n) * std::abs(acc_sum[b] / nb - conf_sum[b] / nb);
    }
    return total;
}

namespace {

struct Scored {
    double score;
    bool positive;
};

std::vector<Scored> merged_descending(std::span<const double> pos, std::span<const double> neg) {
    std::vector<Scored> all;
    all.reserve(pos.size() + neg.size());
    for (double s : pos) {
        all.push_back({s, true});
    }
    for (double s : neg) {
        all.push_back({s, false});
    }
    std::stable_sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
    return all;
}

void check_nonempty(std::span<const double> pos, std::span<const double> neg, const char* fn) {
    if (pos.empty() || neg.empty()) {
        throw ConfigError(std::string(fn) + ": positive and negative sets must be non-empty");
    }
}

} // namespace

double roc_auc(std::span<const double> pos, std::span<const double> neg) {
    check_nonempty(pos, neg, "roc_auc");
    // Walk tie groups from the top; each positive wins against every negative
    // below its group and half-wins against negatives inside it.
    const auto all = merged_descending(pos, neg);
    double wins = 0.0;
    double neg_remaining = static_cast<double>(neg.size());
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        double p_group = 0.0;
        double n_group = 0.0;
        while (j < all.size() && all[j].score == all[i].score) {
            (all[j].positive ? p_group : n_group) += 1.0;
            ++j;
        }
        neg_remaining -= n_group;
        wins += p_group * neg_remaining + 0.5 * p_group * n_group;
        i = j;
    }
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

double pr_auc(std::span<const double> pos, std::span<const double> neg) {
    check_nonempty(pos, neg, "pr_auc");
    const auto all = merged_descending(pos, neg);
    const double total_pos = static_cast<double>(pos.size());
    double tp = 0.0;
    double fp = 0.0;
    double prev_recall = 0.0;
    double area = 0.0;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].score == all[i].score) {
            (all[j].positive ? tp : fp) += 1.0;
            ++j;
        }
        const double recall = tp / total_pos;
        area += (recall - prev_recall) * (tp / (tp + fp));
        prev_recall = recall;
        i = j;
    }
    return area;
}

std::vector<std::pair<double, double>> roc_curve(std::span<const double> pos, std::span<const double> neg) {
    check_nonempty(pos, neg, "roc_curve");
    const auto all = merged_descending(pos, neg);
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    double tp = 0.0;
    double fp = 0.0;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].score == all[i].score) {
            (all[j].positive ? tp : fp) += 1.0;
            ++j;
        }
        pts.emplace_back(fp / static_cast<double>(neg.size()), tp / static_cast<double>(pos.size()));
        i = j;
    }
    return pts;
}

RejectionCurve rejection_curve(std::span<const double> uncertainty, const std::vector<bool>& correct) {
    const std::size_t n = uncertainty.size();
    if (n < 2 || correct.size() != n) {
        throw ConfigError("rejection_curve: need >= 2 samples with matching correctness flags");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return uncertainty[a] > uncertainty[b]; });
    const double nd = static_cast<double>(n);
    std::size_t errors = 0;
    for (bool c : correct) {
        errors += c ? 0 : 1;
    }
    RejectionCurve curve;
    curve.base_error = static_cast<double>(errors) / nd;
    curve.fraction.resize(n + 1);
    curve.measured.resize(n + 1);
    curve.random.resize(n + 1);
    curve.oracle.resize(n + 1);
    std::size_t remaining = errors;
    for (std::size_t k = 0; k <= n; ++k) {
        const double f = static_cast<double>(k) / nd;
        curve.fraction[k] = f;
        curve.measured[k] = static_cast<double>(remaining) / nd;
        curve.random[k] = curve.base_error * (1.0 - f);
        curve.oracle[k] = static_cast<double>(errors - std::min(k, errors)) / nd;
        if (k < n && !correct[order[k]]) {
            --remaining;
        }
    }
    return curve;
}

RejectionCurve rejection_curve(const ScoredPredictions& scores, Measure measure) {
    if (!scores.labeled()) {
        throw ConfigError("rejection_curve: predictions carry no labels");
    }
    return rejection_curve(scores.scores(measure), scores.correct);
}

double prr(const RejectionCurve& curve) {
    if (!(curve.base_error > 0.0)) {
        throw UndefinedMetricError("prr: undefined when the base error rate is zero");
    }
    double area_uns = 0.0;
    double area_orc = 0.0;
    for (std::size_t k = 1; k < curve.fraction.size(); ++k) {
        const double w = 0.5 * (curve.fraction[k] - curve.fraction[k - 1]);
        area_uns += w * ((curve.random[k] - curve.measured[k]) + (curve.random[k - 1] - curve.measured[k - 1]));
        area_orc += w * ((curve.random[k] - curve.oracle[k]) + (curve.random[k - 1] - curve.oracle[k - 1]));
    }
    if (!(area_orc > 0.0)) {
        throw UndefinedMetricError("prr: undefined when every prediction is wrong");
    }
    return area_uns / area_orc;
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && x[order[j]] == x[order[i]]) {
            ++j;
        }
        const double r = 0.5 * static_cast<double>(i + j - 1) + 1.0;
        for (std::size_t t = i; t < j; ++t) {
            ranks[order[t]] = r;
        }
        i = j;
    }
    return ranks;
}

} // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw ConfigError("spearman: need two equally sized samples of length >= 2");
    }
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double mean = (n + 1.0) / 2.0;
    double cov = 0.0;
    double va = 0.0;
    double vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - mean) * (rb[i] - mean);
        va += (ra[i] - mean) * (ra[i] - mean);
        vb += (rb[i] - mean) * (rb[i] - mean);
    }
    if (va == 0.0 || vb == 0.0) {
        return 0.0;
    }
    return cov / std::sqrt(va * vb);
}

} // namespace endd::metrics
