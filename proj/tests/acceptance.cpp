// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL verdict line per criterion, preceded by
// indented detail lines. Exit status is the number of failed criteria.
// Usage: acceptance [criterion ...] (default: all nine).

#include "endd/dirichlet.hpp"
#include "endd/distill.hpp"
#include "endd/ensemble.hpp"
#include "endd/io.hpp"
#include "endd/metrics.hpp"
#include "endd/optim.hpp"
#include "endd/pipeline.hpp"
#include "endd/specfn.hpp"

#include "mc_oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace endd;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct OraclePoint {
    double x;
    double ln_gamma;
    double digamma;
};

// 50-digit mpmath values, see oracle/gen_specfn_oracle.py.
const OraclePoint kOracle[] = {
#include "oracle/specfn_oracle.inc"
};

struct Verdict {
    bool pass = true;
    std::string summary;
};

void detail(const char* f, auto... args) {
    std::printf("    ");
    std::printf(f, args...);
    std::printf("\n");
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> random_simplex(Rng& rng, std::size_t k, double sharpness) {
    std::vector<double> p(k);
    double s = 0.0;
    for (double& v : p) {
        v = std::exp(sharpness * rng.normal());
        s += v;
    }
    for (double& v : p) {
        v /= s;
    }
    return p;
}

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double scale) {
    Matrix m(r, c);
    for (double& v : m.values()) {
        v = rng.uniform(-scale, scale);
    }
    return m;
}

// ---------------------------------------------------------------------------

Verdict special_functions() {
    double worst_lg = 0.0;
    double worst_dg = 0.0;
    for (const auto& p : kOracle) {
        worst_lg = std::max(worst_lg, std::abs(specfn::ln_gamma(p.x) - p.ln_gamma));
        worst_dg = std::max(worst_dg, std::abs(specfn::digamma(p.x) - p.digamma));
    }
    // Recurrences on log-spaced points where |ln Gamma| stays below ~400,
    // so a double can resolve a 1e-11 residual.
    double worst_rlg = 0.0;
    double worst_rdg = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = 1e-4 * std::pow(1e6, i / 999.0);
        worst_rlg = std::max(worst_rlg, std::abs(specfn::ln_gamma(x + 1.0) - specfn::ln_gamma(x) - std::log(x)));
        worst_rdg = std::max(worst_rdg, std::abs(specfn::digamma(x + 1.0) - specfn::digamma(x) - 1.0 / x));
    }
    detail("oracle points: %zu in [1e-4, 1e6]", std::size(kOracle));
    detail("ln_gamma worst abs error %.3e (limit 1e-12), digamma %.3e (limit 1e-10)", worst_lg, worst_dg);
    detail("recurrence residuals on [1e-4, 100]: ln_gamma %.3e (limit 1e-11), digamma %.3e (limit 1e-10)",
           worst_rlg, worst_rdg);
    Verdict v;
    v.pass = worst_lg <= 1e-12 && worst_dg <= 1e-10 && worst_rlg < 1e-11 && worst_rdg < 1e-10;
    v.summary = fmt("ln_gamma %.1e, digamma %.1e, recurrences %.1e / %.1e", worst_lg, worst_dg, worst_rlg, worst_rdg);
    return v;
}

// Max relative error of an analytic gradient against central differences.
double fd_relative_error(const std::function<double(std::span<const double>)>& f, std::vector<double> x,
                         std::span<const double> grad) {
    constexpr double h = 1e-5;
    double worst = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double keep = x[c];
        x[c] = keep + h;
        const double up = f(x);
        x[c] = keep - h;
        const double down = f(x);
        x[c] = keep;
        const double fd = (up - down) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - grad[c]) / std::max({std::abs(fd), std::abs(grad[c]), 1e-6}));
    }
    return worst;
}

Verdict gradients() {
    Rng rng(2);
    Verdict v;
    std::string parts;
    auto record = [&](const std::string& name, double worst) {
        detail("%-18s worst relative error %.3e over 100 instances", name.c_str(), worst);
        v.pass = v.pass && worst < 1e-5;
        parts += fmt("%s%s %.1e", parts.empty() ? "" : ", ", name.c_str(), worst);
    };

    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t k = 2 + rng.below(9);
        std::vector<double> alpha(k);
        for (double& a : alpha) {
            a = std::exp(rng.uniform(std::log(0.1), std::log(50.0)));
        }
        std::vector<CategoricalProbs> ms;
        const std::size_t m_count = 1 + rng.below(10);
        for (std::size_t m = 0; m < m_count; ++m) {
            ms.push_back(dirichlet::central_smooth(CategoricalProbs(random_simplex(rng, k, 1.5)), 1e-4));
        }
        const dirichlet::MemberSample sample(ms);
        const auto grad = dirichlet::end2_nll_grad(dirichlet::DirichletParams(alpha), sample);
        auto f = [&](std::span<const double> a) {
            return dirichlet::end2_nll(dirichlet::DirichletParams({a.begin(), a.end()}), sample);
        };
        worst = std::max(worst, fd_relative_error(f, alpha, grad));
    }
    record("end2 via alpha", worst);

    for (const auto mode : {distill::Mode::end2, distill::Mode::end}) {
        for (const double t : {1.0, 2.5, 10.0}) {
            worst = 0.0;
            for (int i = 0; i < 100; ++i) {
                const std::size_t k = 2 + rng.below(9);
                const auto members = random_matrix(rng, 1 + rng.below(10), k, 5.0);
                const auto zm = random_matrix(rng, 1, k, 3.0 * t);
                const std::vector<double> z(zm.values().begin(), zm.values().end());
                auto loss = [&](std::span<const double> x) {
                    return mode == distill::Mode::end ? distill::end_loss(x, members, t)
                                                      : distill::end2_loss(x, members, t, 1e-4);
                };
                const auto r = loss(z);
                worst = std::max(worst, fd_relative_error([&](std::span<const double> x) { return loss(x).loss; }, z,
                                                          r.grad));
            }
            record(fmt("%s logits T=%g", mode == distill::Mode::end ? "end" : "end2", t), worst);
        }
    }
    v.summary = parts;
    return v;
}

Verdict monte_carlo() {
    Rng rng(3);
    std::mt19937_64 gen(33);
    constexpr std::size_t kDraws = 500000;
    double worst_z = 0.0;
    std::size_t failures = 0;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> alpha;
        if (i == 0) {
            alpha = {1.0, 1.0, 1.0};
        } else {
            const std::size_t k = std::array<std::size_t, 3>{2, 3, 10}[i % 3];
            alpha.resize(k);
            for (double& a : alpha) {
                a = std::exp(rng.uniform(std::log(0.05), std::log(100.0)));
            }
        }
        const double closed = dirichlet::expected_data_uncertainty(dirichlet::DirichletParams(alpha));
        const auto mc = test_oracle::mc_expected_entropy(alpha, kDraws, gen);
        const double z = std::abs(closed - mc.mean) / mc.std_error;
        worst_z = std::max(worst_z, z);
        failures += z > 3.0 ? 1 : 0;
        if (i == 0) {
            detail("alpha=(1,1,1): closed form %.7f (5/6 = %.7f), Monte Carlo %.7f +- %.1e", closed, 5.0 / 6.0,
                   mc.mean, mc.std_error);
        }
    }
    detail("50 Dirichlets, K in {2,3,10}, alpha_c in [0.05, 100], %zu draws each: worst |z| = %.2f, %zu beyond 3 SE",
           kDraws, worst_z, failures);
    return {failures == 0, fmt("worst deviation %.2f SE over 50 Dirichlets", worst_z)};
}

Verdict decomposition() {
    Rng rng(4);
    double min_k = INFINITY;
    double worst_identity = 0.0;
    double worst_identical = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const std::size_t k = 2 + rng.below(9);
        const std::size_t m_count = 1 + rng.below(20);
        std::vector<CategoricalProbs> members;
        for (std::size_t m = 0; m < m_count; ++m) {
            members.emplace_back(random_simplex(rng, k, rng.uniform(0.1, 6.0)));
        }
        const auto u = ensemble::ensemble_uncertainties(members);
        min_k = std::min(min_k, u.knowledge);
        worst_identity = std::max(worst_identity, std::abs(u.total - (u.expected_data + u.knowledge)));
        const std::vector<CategoricalProbs> twins(m_count, members.front());
        worst_identical = std::max(worst_identical, ensemble::ensemble_uncertainties(twins).knowledge);
    }
    detail("ensembles: min knowledge %.3e, identity residual %.3e, identical-member knowledge %.3e", min_k,
           worst_identity, worst_identical);
    double min_kd = INFINITY;
    double worst_identity_d = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const std::size_t k = 2 + rng.below(9);
        std::vector<double> alpha(k);
        for (double& a : alpha) {
            a = std::exp(rng.uniform(std::log(1e-3), std::log(1e6)));
        }
        const auto u = dirichlet::uncertainties(dirichlet::DirichletParams(alpha));
        min_kd = std::min(min_kd, u.knowledge);
        worst_identity_d = std::max(worst_identity_d, std::abs(u.total - (u.expected_data + u.knowledge)));
    }
    detail("Dirichlets: min knowledge %.3e, identity residual %.3e", min_kd, worst_identity_d);
    Verdict v;
    v.pass = min_k >= -1e-10 && min_kd >= -1e-10 && worst_identical < 1e-12 && worst_identity <= 1e-12 &&
             worst_identity_d <= 1e-12;
    v.summary = fmt("min knowledge %.1e / %.1e, identity %.1e / %.1e, identical members %.1e", min_k, min_kd,
                    worst_identity, worst_identity_d, worst_identical);
    return v;
}

double pairwise_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
    double wins = 0.0;
    for (double p : pos) {
        for (double q : neg) {
            wins += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
        }
    }
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

double brute_ece(const Matrix& probs, const std::vector<int>& labels, int bins) {
    double total = 0.0;
    const double n = static_cast<double>(labels.size());
    for (int b = 0; b < bins; ++b) {
        const double lo = static_cast<double>(b) / bins;
        const double hi = static_cast<double>(b + 1) / bins;
        double count = 0.0;
        double acc = 0.0;
        double conf = 0.0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const auto row = probs.row(i);
            const auto it = std::max_element(row.begin(), row.end());
            if ((*it >= lo && *it < hi) || (b == bins - 1 && *it == 1.0)) {
                count += 1.0;
                conf += *it;
                acc += (it - row.begin()) == labels[i] ? 1.0 : 0.0;
            }
        }
        if (count > 0.0) {
            total += count / n * std::abs(acc / count - conf / count);
        }
    }
    return total;
}

std::vector<bool> shuffled_errors(Rng& rng, std::size_t n, std::size_t errors) {
    std::vector<bool> correct(n, true);
    std::fill(correct.begin(), correct.begin() + static_cast<std::ptrdiff_t>(errors), false);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = rng.below(i + 1);
        const bool tmp = correct[i];
        correct[i] = correct[j];
        correct[j] = tmp;
    }
    return correct;
}

Verdict metric_oracles() {
    Rng rng(5);
    double worst_auc = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n_pos = 1 + rng.below(100);
        const std::size_t n_neg = 1 + rng.below(100);
        const double levels = trial % 2 == 0 ? 0.0 : static_cast<double>(2 + rng.below(10));
        auto draw = [&](double shift) {
            const double u = rng.uniform() + shift;
            return levels > 0.0 ? std::floor(u * levels) : u;
        };
        std::vector<double> pos(n_pos);
        std::vector<double> neg(n_neg);
        for (double& v : pos) {
            v = draw(0.3);
        }
        for (double& v : neg) {
            v = draw(0.0);
        }
        worst_auc = std::max(worst_auc, std::abs(metrics::roc_auc(pos, neg) - pairwise_auc(pos, neg)));
    }
    detail("roc_auc vs pairwise oracle, 500 cases with n <= 200 (half tied): worst %.3e", worst_auc);

    constexpr std::size_t n = 200;
    double worst_oracle = 0.0;
    double max_reversed = -INFINITY;
    for (int trial = 0; trial < 100; ++trial) {
        const auto correct = shuffled_errors(rng, n, 1 + rng.below(n - 1));
        std::vector<double> good(n);
        std::vector<double> bad(n);
        for (std::size_t i = 0; i < n; ++i) {
            good[i] = (correct[i] ? 0.0 : 1.0) + 0.1 * rng.uniform();
            bad[i] = 1.5 - good[i];
        }
        worst_oracle = std::max(worst_oracle, std::abs(metrics::prr(metrics::rejection_curve(good, correct)) - 1.0));
        max_reversed = std::max(max_reversed, metrics::prr(metrics::rejection_curve(bad, correct)));
    }
    double mean = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto correct = shuffled_errors(rng, n, n / 5);
        std::vector<double> u(n);
        for (double& x : u) {
            x = rng.uniform();
        }
        mean += metrics::prr(metrics::rejection_curve(u, correct)) / 1000.0;
    }
    detail("PRR: oracle ordering |PRR - 1| <= %.1e, reversed max %.4f, random mean %.4f over 1000", worst_oracle,
           max_reversed, mean);

    double worst_ece = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = 1 + rng.below(300);
        const std::size_t k = 2 + rng.below(5);
        Matrix probs(rows, k);
        std::vector<int> labels(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            const auto p = random_simplex(rng, k, rng.uniform(0.0, 5.0));
            std::copy(p.begin(), p.end(), probs.row(i).begin());
            labels[i] = static_cast<int>(rng.below(k));
        }
        const int bins = 1 + static_cast<int>(rng.below(20));
        worst_ece = std::max(worst_ece, std::abs(metrics::ece(probs, labels, bins) - brute_ece(probs, labels, bins)));
    }
    detail("ECE vs brute-force bins, 200 cases: worst %.3e", worst_ece);

    Verdict v;
    v.pass = worst_auc <= 1e-12 && worst_oracle <= 1e-12 && max_reversed < 0.0 && mean > -0.05 && mean < 0.05 &&
             worst_ece <= 1e-12;
    v.summary = fmt("auroc %.1e, prr oracle %.1e / reversed %.3f / random %.4f, ece %.1e", worst_auc, worst_oracle,
                    max_reversed, mean, worst_ece);
    return v;
}

Verdict schedule() {
    const optim::TemperatureSchedule s{10.0, 60, 90, true};
    double worst = 0.0;
    for (int e = 0; e < 90; ++e) {
        double expect = 1.0;
        if (e < 30) {
            expect = 10.0;
        } else if (e < 60) {
            expect = 10.0 + (1.0 - 10.0) * (e - 30) / 30.0;
        }
        worst = std::max(worst, std::abs(optim::annealed_temperature(e, s) - expect));
    }
    const bool anchors = optim::annealed_temperature(29, s) == 10.0 && optim::annealed_temperature(45, s) == 5.5 &&
                         optim::annealed_temperature(75, s) == 1.0;
    detail("T0=10, C=60, 90 epochs: worst deviation %.3e; epochs 29/45/75 -> %g/%g/%g", worst,
           optim::annealed_temperature(29, s), optim::annealed_temperature(45, s), optim::annealed_temperature(75, s));
    return {worst <= 1e-15 && anchors, fmt("worst deviation %.1e over 90 epochs", worst)};
}

// ---------------------------------------------------------------------------
// Toy reproduction.

struct SeedResult {
    double ens_error = 0.0;
    double member_error = 0.0;
    double member_prr = 0.0;
    double ens_auroc = 0.0;
    double end2_auroc = 0.0;
    double end2_t1_auroc = 0.0;
    double sp_total = 0.0;
    double sp_knowledge = 0.0;
    double end_error = 0.0;
    bool end_knowledge_null = false;
    double end2_error = 0.0;
    double end2_prr = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

SeedResult run_seed(std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    pipeline::RunConfig cfg;
    cfg.seed = seed;
    const auto data = pipeline::generate_data(cfg);
    const auto ens = ensemble::train_ensemble(data.train, cfg.member, cfg.ensemble_size, cfg.seed, cfg.threads);
    const auto transfer = cfg.distill.use_aux ? ensemble::build_transfer_set(ens, data.train, data.aux)
                                              : ensemble::build_transfer_set(ens, data.train);
    auto evaluate = [&](const std::string& name, metrics::ModelKind kind, std::vector<Mlp> nets) {
        return pipeline::evaluate_model({name, kind, std::move(nets)}, data.test, data.ood, cfg.ece_bins);
    };
    auto distill_with = [&](const pipeline::RunConfig& c) { return distill::train_distilled(transfer, pipeline::distill_config(c)); };

    SeedResult r;
    const auto e_ens = evaluate("ensemble", metrics::ModelKind::ensemble, ens.members);
    for (const auto& m : ens.members) {
        const auto e = evaluate("member", metrics::ModelKind::dnn, {m});
        r.member_error += e.metrics["test"]["error"].get<double>() / static_cast<double>(ens.size());
        r.member_prr += e.metrics["test"]["prr"]["confidence"].get<double>() / static_cast<double>(ens.size());
    }

    const auto e_end2 = evaluate("end2", metrics::ModelKind::end2, {distill_with(cfg)});
    auto t1 = cfg;
    t1.distill.t0 = 1.0;
    t1.distill.annealed = false;
    const auto e_t1 = evaluate("end2_t1", metrics::ModelKind::end2, {distill_with(t1)});
    auto end = cfg;
    end.distill.mode = distill::Mode::end;
    const auto e_end = evaluate("end", metrics::ModelKind::end, {distill_with(end)});

    r.ens_error = e_ens.metrics["test"]["error"].get<double>();
    r.ens_auroc = e_ens.metrics["ood"]["auroc"]["knowledge"].get<double>();
    r.end2_auroc = e_end2.metrics["ood"]["auroc"]["knowledge"].get<double>();
    r.end2_t1_auroc = e_t1.metrics["ood"]["auroc"]["knowledge"].get<double>();
    r.end2_error = e_end2.metrics["test"]["error"].get<double>();
    r.end2_prr = e_end2.metrics["test"]["prr"]["confidence"].get<double>();
    r.sp_total = metrics::spearman(e_end2.test.total, e_ens.test.total);
    r.sp_knowledge = metrics::spearman(*e_end2.test.knowledge, *e_ens.test.knowledge);
    r.end_error = e_end.metrics["test"]["error"].get<double>();
    r.end_knowledge_null = e_end.metrics["ood"]["auroc"]["knowledge"].is_null() && !e_end.test.knowledge;

    detail("seed %llu (%.0f s): error ensemble %.4f, mean member %.4f, EnD2 %.4f, EnD %.4f",
           static_cast<unsigned long long>(seed), seconds_since(start), r.ens_error, r.member_error, r.end2_error,
           r.end_error);
    detail("seed %llu: knowledge AUROC ensemble %.5f, EnD2 %.5f, EnD2 T0=1 %.5f; Spearman total %.4f, knowledge %.4f",
           static_cast<unsigned long long>(seed), r.ens_auroc, r.end2_auroc, r.end2_t1_auroc, r.sp_total,
           r.sp_knowledge);
    detail("seed %llu: PRR EnD2 %.4f, mean member %.4f", static_cast<unsigned long long>(seed), r.end2_prr,
           r.member_prr);
    return r;
}

Verdict toy_reproduction(const std::vector<SeedResult>& runs) {
    int a = 0;
    int c = 0;
    bool b = true;
    bool d = true;
    bool e = true;
    for (const auto& r : runs) {
        a += r.ens_error <= r.member_error ? 1 : 0;
        b = b && r.sp_total >= 0.8 && r.sp_knowledge >= 0.7;
        c += r.ens_auroc >= 0.95 && r.end2_auroc >= 0.95 && std::abs(r.end2_auroc - r.ens_auroc) <= 0.05 ? 1 : 0;
        d = d && std::abs(r.end_error - r.ens_error) <= 0.02 && r.end_knowledge_null;
        e = e && r.end2_prr >= r.member_prr - 0.05;
    }
    auto mark = [](bool ok) { return ok ? "ok" : "FAIL"; };
    detail("a. ensemble beats mean member in %d/3 seeds: %s", a, mark(a >= 2));
    detail("b. EnD2 Spearman total >= 0.8 and knowledge >= 0.7 in every seed: %s", mark(b));
    detail("c. knowledge AUROC >= 0.95 for both and within 0.05 in %d/3 seeds: %s", c, mark(c >= 2));
    detail("d. EnD error within 2 points of the ensemble, knowledge column null, every seed: %s", mark(d));
    detail("e. EnD2 PRR >= mean member PRR - 0.05 in every seed: %s", mark(e));
    return {a >= 2 && b && c >= 2 && d && e,
            fmt("a %s, b %s, c %s, d %s, e %s", mark(a >= 2), mark(b), mark(c >= 2), mark(d), mark(e))};
}

Verdict temperature_ablation(const std::vector<SeedResult>& runs) {
    int wins = 0;
    for (const auto& r : runs) {
        wins += r.end2_auroc >= r.end2_t1_auroc ? 1 : 0;
    }
    detail("T0=10 knowledge AUROC >= T0=1 (no annealing) in %d/3 seeds", wins);
    return {wins >= 2, fmt("T0=10 at least as good in %d/3 seeds", wins)};
}

// ---------------------------------------------------------------------------

std::map<fs::path, std::string> snapshot(const fs::path& root) {
    std::map<fs::path, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) {
            files[fs::relative(entry.path(), root)] = io::read_file(entry.path());
        }
    }
    return files;
}

void run_all_commands(const pipeline::RunConfig& cfg, const fs::path& out) {
    pipeline::gen_data(cfg, out / "data");
    pipeline::train_dnn_command(cfg, out / "data", out / "dnn");
    pipeline::train_ensemble_command(cfg, out / "data", out / "ensemble");
    pipeline::build_transfer_command(cfg, out / "data", out / "ensemble", out / "transfer.json", true);
    pipeline::distill_command(cfg, out / "transfer.json", out / "end2");
    auto end = cfg;
    end.distill.mode = distill::Mode::end;
    pipeline::distill_command(end, out / "transfer.json", out / "end");
    const std::vector<pipeline::ModelSpec> specs = {
        {"dnn", metrics::ModelKind::dnn, out / "dnn" / "model.json"},
        {"ensemble", metrics::ModelKind::ensemble, out / "ensemble"},
        {"end", metrics::ModelKind::end, out / "end" / "model.json"},
        {"end2", metrics::ModelKind::end2, out / "end2" / "model.json"},
    };
    pipeline::evaluate_command(specs, out / "data" / "test.csv", out / "data" / "ood.csv", 3, cfg.ece_bins,
                               out / "eval");
    pipeline::AblationPlan plan;
    plan.sizes = {2, 3};
    plan.temps = {1, 10};
    plan.seeds = 1;
    pipeline::ablate_command(cfg, plan, out / "ablation");
}

Verdict reproducibility() {
    const fs::path root = fs::temp_directory_path() / "endd_acceptance_repro";
    fs::remove_all(root);
    auto cfg = pipeline::config_from_json(json::parse(R"({
        "seed": 7, "ensemble_size": 3,
        "data": {"n_per_class": 60, "n_test_per_class": 50, "n_ood": 60, "n_aux": 90},
        "member": {"hidden": [16, 16], "epochs": 8, "cycle_len": 6, "keep_prob": 0.9},
        "student": {"hidden": [16, 16], "epochs": 10, "cycle_len": 8, "keep_prob": 0.9}
    })"));
    cfg.threads = 1;
    run_all_commands(cfg, root / "a");
    cfg.threads = 3;
    run_all_commands(cfg, root / "b");
    const auto a = snapshot(root / "a");
    const auto b = snapshot(root / "b");
    std::size_t differing = a.size() == b.size() ? 0 : 1;
    for (const auto& [path, bytes] : a) {
        const auto it = b.find(path);
        if (it == b.end() || it->second != bytes) {
            ++differing;
            detail("differs: %s", path.string().c_str());
        }
    }
    detail("rerun of every command (threads 1 vs 3): %zu files compared, %zu differ", a.size(), differing);

    Rng rng(9);
    Matrix inputs = random_matrix(rng, 1000, 2, 6.0);
    std::size_t checkpoints = 0;
    std::size_t mismatched = 0;
    for (const auto& [path, bytes] : a) {
        if (path.extension() != ".json" || bytes.find("\"arch\"") == std::string::npos) {
            continue;
        }
        const auto ckpt = checkpoint_from_json(bytes);
        const fs::path copy = root / "roundtrip.json";
        save_checkpoint(copy, ckpt);
        const auto again = load_checkpoint(copy);
        const auto before = predict_logits(ckpt.model, inputs);
        const auto after = predict_logits(again.model, inputs);
        ++checkpoints;
        mismatched += before.values().size() == after.values().size() &&
                              std::equal(before.values().begin(), before.values().end(), after.values().begin())
                          ? 0
                          : 1;
    }
    detail("save -> load round trip: %zu checkpoints, %zu with differing predictions on 1000 inputs", checkpoints,
           mismatched);
    fs::remove_all(root);
    return {differing == 0 && checkpoints > 0 && mismatched == 0,
            fmt("%zu files identical on rerun: %s; %zu checkpoints round-trip bitwise: %s", a.size(),
                differing == 0 ? "yes" : "no", checkpoints, mismatched == 0 ? "yes" : "no")};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"endd acceptance suite"};
    std::vector<int> selected;
    app.add_option("criteria", selected, "Criteria to run (default: all)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);
    const std::set<int> wanted = selected.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9}
                                                  : std::set<int>(selected.begin(), selected.end());

    int failed = 0;
    auto report = [&](int id, const char* title, double limit_s, const std::function<Verdict()>& body) {
        if (wanted.count(id) == 0) {
            return;
        }
        std::printf("criterion %d: %s\n", id, title);
        std::fflush(stdout);
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = body();
        } catch (const std::exception& ex) {
            v = {false, std::string("exception: ") + ex.what()};
        }
        const double secs = seconds_since(start);
        if (limit_s > 0.0 && secs >= limit_s) {
            v.pass = false;
            v.summary += fmt("; runtime %.1f s exceeds %.0f s", secs, limit_s);
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s %d %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", id, title, secs, v.summary.c_str());
        std::fflush(stdout);
    };

    report(1, "special-function accuracy", 1.0, special_functions);
    report(2, "gradient correctness", 5.0, gradients);
    report(3, "closed form vs Monte Carlo", 60.0, monte_carlo);
    report(4, "decomposition invariants", 0.0, decomposition);
    report(5, "metric oracles", 30.0, metric_oracles);
    report(6, "temperature schedule", 0.0, schedule);

    std::vector<SeedResult> runs;
    std::string toy_error;
    if (wanted.count(7) != 0 || wanted.count(8) != 0) {
        std::printf("toy runs: seeds 0, 1, 2 at the default configuration\n");
        std::fflush(stdout);
        try {
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                runs.push_back(run_seed(seed));
            }
        } catch (const std::exception& ex) {
            toy_error = ex.what();
        }
    }
    auto toy = [&](auto fn) {
        return [&, fn]() -> Verdict {
            if (!toy_error.empty()) {
                return {false, "toy run failed: " + toy_error};
            }
            return fn(runs);
        };
    };
    report(7, "end-to-end toy reproduction", 0.0, toy(toy_reproduction));
    report(8, "temperature ablation direction", 0.0, toy(temperature_ablation));
    report(9, "reproducibility", 0.0, reproducibility);

    std::printf("%d of %zu criteria failed\n", failed, wanted.size());
    return failed;
}
