// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#include "endd/distill.hpp"

#include "endd/dirichlet.hpp"
#include "endd/error.hpp"

#include <cmath>
#include <string>

namespace endd::distill {

std::string_view to_string(Mode mode) {
    return mode == Mode::end ? "end" : "end2";
}

Mode parse_mode(std::string_view text) {
    if (text == "end") {
        return Mode::end;
    }
    if (text == "end2") {
        return Mode::end2;
    }
    throw ConfigError("unknown distillation mode '" + std::string(text) + "' (expected end|end2)");
}

optim::TemperatureSchedule DistillConfig::temperature_schedule() const {
    const double start = mode == Mode::end ? t_fixed : t0;
    return {start, train.cycle_len, train.epochs, is_annealed()};
}

void DistillConfig::validate() const {
    train::validate(train);
    if (!(t_fixed > 0.0) || !(t0 >= 1.0)) {
        throw ConfigError("distill: temperatures must be positive (T0 >= 1)");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw ConfigError("distill: gamma must be in [0, 1)");
    }
}

namespace {

// T^2 KL(q || softmax(z/T)); gradient T (softmax(z/T) - q).
void end_from_target(std::span<const double> z, std::span<const double> target, double t,
                     LossAndGrad& out) {
    const std::size_t k = z.size();
    double zmax = z[0];
    for (double v : z) {
        zmax = std::max(zmax, v);
    }
    double sum = 0.0;
    for (double v : z) {
        sum += std::exp((v - zmax) / t);
    }
    const double log_norm = std::log(sum);
    out.grad.resize(k);
    double kl = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        const double log_p = (z[c] - zmax) / t - log_norm;
        if (target[c] > 0.0) {
            kl += target[c] * (std::log(target[c]) - log_p);
        }
        out.grad[c] = t * (std::exp(log_p) - target[c]);
    }
    out.loss = t * t * kl;
}

} // namespace

LossAndGrad end_loss(std::span<const double> student_logits, const Matrix& member_logits, double temperature) {
    const std::size_t k = student_logits.size();
    if (member_logits.cols() != k || member_logits.rows() == 0) {
        throw ShapeError("end_loss: member logits must be M x K");
    }
    std::vector<double> target(k, 0.0);
    std::vector<double> tmp(k);
    for (std::size_t m = 0; m < member_logits.rows(); ++m) {
        softmax_into(member_logits.row(m), temperature, tmp);
        for (std::size_t c = 0; c < k; ++c) {
            target[c] += tmp[c];
        }
    }
    for (double& q : target) {
        q /= static_cast<double>(member_logits.rows());
    }
    LossAndGrad out;
    end_from_target(student_logits, target, temperature, out);
    return out;
}

namespace {

void mean_smoothed_log(const Matrix& member_logits, std::size_t row_offset, std::size_t m_count,
                       std::size_t k, double temperature, double gamma, std::span<const double> flat,
                       std::span<double> mean_log) {
    std::vector<double> tmp(k);
    std::fill(mean_log.begin(), mean_log.end(), 0.0);
    const double uniform = gamma / static_cast<double>(k);
    for (std::size_t m = 0; m < m_count; ++m) {
        const std::span<const double> z =
            flat.empty() ? member_logits.row(m) : flat.subspan(row_offset + m * k, k);
        softmax_into(z, temperature, tmp);
        for (std::size_t c = 0; c < k; ++c) {
            const double p = (1.0 - gamma) * tmp[c] + uniform;
            if (!(p > 0.0)) {
                throw DomainError("EnD^2: member probability is zero; increase gamma");
            }
            mean_log[c] += std::log(p);
        }
    }
    for (double& v : mean_log) {
        v /= static_cast<double>(m_count);
    }
}

void end2_from_mean_log(std::span<const double> student_logits, std::span<const double> mean_log,
                        double temperature, LossAndGrad& out) {
    const auto alpha = dirichlet::alphas_from_logits(student_logits, temperature);
    out.loss = dirichlet::end2_nll_from_mean_log(alpha, mean_log);
    out.grad.resize(student_logits.size());
    dirichlet::end2_nll_grad_from_mean_log(alpha, mean_log, out.grad);
    for (std::size_t c = 0; c < out.grad.size(); ++c) {
        out.grad[c] *= alpha[c] / temperature;
    }
}

} // namespace

LossAndGrad end2_loss(std::span<const double> student_logits, const Matrix& member_logits,
                      double temperature, double gamma) {
    const std::size_t k = student_logits.size();
    if (member_logits.cols() != k || member_logits.rows() == 0) {
        throw ShapeError("end2_loss: member logits must be M x K");
    }
    std::vector<double> mean_log(k);
    mean_smoothed_log(member_logits, 0, member_logits.rows(), k, temperature, gamma, {}, mean_log);
    LossAndGrad out;
    end2_from_mean_log(student_logits, mean_log, temperature, out);
    return out;
}

Mlp train_distilled(const ensemble::TransferSet& transfer, const DistillConfig& cfg,
                    std::vector<train::EpochStats>* log) {
    cfg.validate();
    transfer.validate();
    const std::size_t n = transfer.size();
    const std::size_t m_count = transfer.num_members;
    const std::size_t k = transfer.num_classes;
    const auto schedule = cfg.temperature_schedule();

    // Per-row targets depend only on T, so they are rebuilt when T changes:
    // mean smoothed log-probs (EnD^2) or the tempered ensemble mean (EnD).
    Matrix targets(n, k);
    double cached_t = -1.0;
    auto refresh = [&](double t) {
        if (t == cached_t) {
            return;
        }
        std::vector<double> tmp(k);
        for (std::size_t i = 0; i < n; ++i) {
            auto row = targets.row(i);
            if (cfg.mode == Mode::end2) {
                mean_smoothed_log(Matrix{}, i * m_count * k, m_count, k, t, cfg.gamma,
                                  transfer.member_logits, row);
            } else {
                std::fill(row.begin(), row.end(), 0.0);
                for (std::size_t m = 0; m < m_count; ++m) {
                    softmax_into(transfer.logits(i, m), t, tmp);
                    for (std::size_t c = 0; c < k; ++c) {
                        row[c] += tmp[c] / static_cast<double>(m_count);
                    }
                }
            }
        }
        cached_t = t;
    };

    LossAndGrad per_row;
    const train::BatchLoss loss = [&](std::span<const std::size_t> rows, const Matrix& logits,
                                      Matrix& grad, double t) {
        refresh(t);
        const double inv_b = 1.0 / static_cast<double>(rows.size());
        double total = 0.0;
        for (std::size_t b = 0; b < rows.size(); ++b) {
            const auto z = logits.row(b);
            const auto target = targets.row(rows[b]);
            if (cfg.mode == Mode::end2) {
                end2_from_mean_log(z, target, t, per_row);
            } else {
                end_from_target(z, target, t, per_row);
            }
            total += per_row.loss;
            auto g = grad.row(b);
            for (std::size_t c = 0; c < k; ++c) {
                g[c] = per_row.grad[c] * inv_b;
            }
        }
        return total * inv_b;
    };

    Mlp student = train::init_model(transfer.inputs.cols(), k, cfg.train, cfg.seed);
    return train::train_loop(std::move(student), transfer.inputs, cfg.train, cfg.seed, loss,
                             [&](int epoch) { return optim::annealed_temperature(epoch, schedule); },
                             log);
}

} // namespace endd::distill
