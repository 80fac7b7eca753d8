// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#include "endd/dirichlet.hpp"

#include "endd/error.hpp"
#include "endd/specfn.hpp"

#include <cmath>
#include <string>

namespace endd::dirichlet {

DirichletParams::DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.empty()) {
        throw DomainError("DirichletParams: empty concentration vector");
    }
    for (double a : alpha_) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw DomainError("DirichletParams: concentrations must be finite and > 0");
        }
        alpha0_ += a;
    }
}

MemberSample::MemberSample(std::vector<CategoricalProbs> members) : members_(std::move(members)) {
    if (members_.empty()) {
        throw ShapeError("MemberSample: need at least one member");
    }
    for (const auto& m : members_) {
        if (m.size() != members_.front().size()) {
            throw ShapeError("MemberSample: members disagree on the number of classes");
        }
    }
}

DirichletParams alphas_from_logits(std::span<const double> logits, double temperature) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw DomainError("alphas_from_logits: temperature must be finite and > 0");
    }
    std::vector<double> alpha(logits.size());
    for (std::size_t c = 0; c < logits.size(); ++c) {
        const double scaled = logits[c] / temperature;
        if (!std::isfinite(scaled) || scaled > 700.0) {
            throw DomainError("alphas_from_logits: exp(" + std::to_string(scaled) +
                              ") overflows; logit " + std::to_string(c) + " saturated");
        }
        alpha[c] = std::exp(scaled);
    }
    return DirichletParams(std::move(alpha));
}

CategoricalProbs expected_categorical(const DirichletParams& d) {
    std::vector<double> p(d.size());
    for (std::size_t c = 0; c < d.size(); ++c) {
        p[c] = d[c] / d.alpha0();
    }
    return CategoricalProbs(std::move(p));
}

double total_uncertainty(const DirichletParams& d) {
    double h = 0.0;
    for (double a : d.alpha()) {
        const double p = a / d.alpha0();
        if (p > 0.0) {
            h -= p * std::log(p);
        }
    }
    return h;
}

double expected_data_uncertainty(const DirichletParams& d) {
    double acc = specfn::digamma(d.alpha0() + 1.0);
    for (double a : d.alpha()) {
        acc -= (a / d.alpha0()) * specfn::digamma(a + 1.0);
    }
    return acc;
}

Uncertainties uncertainties(const DirichletParams& d) {
    Uncertainties u;
    u.total = total_uncertainty(d);
    u.expected_data = expected_data_uncertainty(d);
    u.knowledge = u.total - u.expected_data;
    if (u.knowledge < 0.0 && u.knowledge > -1e-10) {
        u.knowledge = 0.0;
    }
    return u;
}

double knowledge_uncertainty(const DirichletParams& d) {
    return uncertainties(d).knowledge;
}

CategoricalProbs central_smooth(const CategoricalProbs& p, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw DomainError("central_smooth: gamma must be in [0, 1)");
    }
    const double k = static_cast<double>(p.size());
    std::vector<double> out(p.size());
    for (std::size_t c = 0; c < p.size(); ++c) {
        out[c] = (1.0 - gamma) * p[c] + gamma / k;
    }
    return CategoricalProbs(std::move(out));
}

namespace {

std::vector<double> mean_log_probs(const DirichletParams& d, const MemberSample& s) {
    if (s.num_classes() != d.size()) {
        throw ShapeError("end2_nll: member sample and Dirichlet disagree on K");
    }
    std::vector<double> mean(d.size(), 0.0);
    for (const auto& member : s.members()) {
        for (std::size_t c = 0; c < d.size(); ++c) {
            if (!(member[c] > 0.0)) {
                throw DomainError("end2_nll: member probability is zero; apply central_smooth first");
            }
            mean[c] += std::log(member[c]);
        }
    }
    for (double& v : mean) {
        v /= static_cast<double>(s.num_members());
    }
    return mean;
}

} // namespace

double end2_nll_from_mean_log(const DirichletParams& d, std::span<const double> mean_log) {
    double ll = specfn::ln_gamma(d.alpha0());
    for (std::size_t c = 0; c < d.size(); ++c) {
        ll -= specfn::ln_gamma(d[c]);
        ll += (d[c] - 1.0) * mean_log[c];
    }
    return -ll;
}

void end2_nll_grad_from_mean_log(const DirichletParams& d, std::span<const double> mean_log,
                                 std::span<double> grad) {
    const double psi0 = specfn::digamma(d.alpha0());
    for (std::size_t c = 0; c < d.size(); ++c) {
        grad[c] = -(psi0 - specfn::digamma(d[c]) + mean_log[c]);
    }
}

double end2_nll(const DirichletParams& d, const MemberSample& s) {
    return end2_nll_from_mean_log(d, mean_log_probs(d, s));
}

std::vector<double> end2_nll_grad(const DirichletParams& d, const MemberSample& s) {
    const auto mean = mean_log_probs(d, s);
    std::vector<double> grad(d.size());
    end2_nll_grad_from_mean_log(d, mean, grad);
    return grad;
}

} // namespace endd::dirichlet
