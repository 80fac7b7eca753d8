// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "endd/net.hpp"

#include <span>
#include <vector>

namespace endd::dirichlet {

/// Concentration parameters of a Prior Network output.
class DirichletParams {
public:
    /// Throws DomainError unless every alpha is finite and > 0.
    explicit DirichletParams(std::vector<double> alpha);

    std::size_t size() const noexcept { return alpha_.size(); }
    double operator[](std::size_t c) const { return alpha_[c]; }
    std::span<const double> alpha() const noexcept { return alpha_; }
    /// Precision, the sum of all alphas.
    double alpha0() const noexcept { return alpha0_; }

private:
    std::vector<double> alpha_;
    double alpha0_ = 0.0;
};

/// The M member distributions for one input; M >= 1, shared K.
class MemberSample {
public:
    /// Throws ShapeError on empty input or inconsistent K.
    explicit MemberSample(std::vector<CategoricalProbs> members);

    std::size_t num_members() const noexcept { return members_.size(); }
    std::size_t num_classes() const noexcept { return members_.front().size(); }
    const CategoricalProbs& operator[](std::size_t m) const { return members_[m]; }
    const std::vector<CategoricalProbs>& members() const noexcept { return members_; }

private:
    std::vector<CategoricalProbs> members_;
};

/// alpha_c = exp(z_c / T). Throws DomainError when an exponent exceeds the
/// double range (z_c / T > 700) or T <= 0.
DirichletParams alphas_from_logits(std::span<const double> logits, double temperature = 1.0);

/// Mean of the Dirichlet, alpha_c / alpha0.
CategoricalProbs expected_categorical(const DirichletParams& d);

/// Entropy of the expected categorical.
double total_uncertainty(const DirichletParams& d);

/// E[H[Cat(pi)]] under the Dirichlet: psi(alpha0 + 1) - sum_c (alpha_c/alpha0) psi(alpha_c + 1).
double expected_data_uncertainty(const DirichletParams& d);

/// Mutual information: total minus expected data uncertainty. Rounding
/// residue in (-1e-10, 0) is clamped to 0.
double knowledge_uncertainty(const DirichletParams& d);

struct Uncertainties {
    double total = 0.0;
    double expected_data = 0.0;
    double knowledge = 0.0;
};

/// All three measures; knowledge is computed as total - expected_data.
Uncertainties uncertainties(const DirichletParams& d);

/// (1 - gamma) p + gamma / K. Throws DomainError unless 0 <= gamma < 1.
CategoricalProbs central_smooth(const CategoricalProbs& p, double gamma);

/// Negative log-likelihood of the member sample under the Dirichlet:
/// -[lnG(a0) - sum lnG(a_c) + (1/M) sum_m sum_c (a_c - 1) ln pi_c^(m)].
/// Throws DomainError if any member probability is zero (smooth first).
double end2_nll(const DirichletParams& d, const MemberSample& s);

/// dL/dalpha_c = -[psi(a0) - psi(a_c) + (1/M) sum_m ln pi_c^(m)].
std::vector<double> end2_nll_grad(const DirichletParams& d, const MemberSample& s);

/// Per-input sufficient statistics for the loss: the mean member log-probs.
/// Callers on hot paths compute these once and use the *_from_mean_log forms.
double end2_nll_from_mean_log(const DirichletParams& d, std::span<const double> mean_log_probs);
void end2_nll_grad_from_mean_log(const DirichletParams& d, std::span<const double> mean_log_probs,
                                 std::span<double> grad);

} // namespace endd::dirichlet
