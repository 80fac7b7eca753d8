// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#include "endd/ensemble.hpp"

#include "endd/error.hpp"
#include "endd/io.hpp"
#include "endd/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace endd::ensemble {

using nlohmann::json;

void Ensemble::validate() const {
    if (members.empty()) {
        throw ConfigError("ensemble: no members");
    }
    if (member_seeds.size() != members.size()) {
        throw ConfigError("ensemble: seed list does not match member count");
    }
    const auto dims = members.front().dims();
    for (const auto& m : members) {
        if (m.dims() != dims) {
            throw ConfigError("ensemble: members have different architectures");
        }
    }
    if (static_cast<int>(dims.back()) != num_classes) {
        throw ConfigError("ensemble: member output width does not match K");
    }
}

std::uint64_t member_seed(std::uint64_t global_seed, std::size_t index) {
    return derive_seed(global_seed, "member", index);
}

Ensemble train_ensemble(const data::Dataset2D& data, const train::TrainConfig& cfg, std::size_t size,
                        std::uint64_t global_seed, unsigned threads,
                        std::vector<std::vector<train::EpochStats>>* logs) {
    if (size == 0) {
        throw ConfigError("train_ensemble: ensemble size must be >= 1");
    }
    if (data.size() == 0) {
        throw ConfigError("train_ensemble: empty dataset");
    }
    train::validate(cfg);
    Ensemble e;
    e.num_classes = data.num_classes;
    e.members.resize(size);
    e.member_seeds.resize(size);
    std::vector<std::vector<train::EpochStats>> member_logs(size);
    for (std::size_t i = 0; i < size; ++i) {
        e.member_seeds[i] = member_seed(global_seed, i);
    }

    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, size));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < size; i = next++) {
            try {
                e.members[i] = train::train_dnn(data, cfg, e.member_seeds[i], &member_logs[i]);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    if (logs != nullptr) {
        *logs = std::move(member_logs);
    }
    return e;
}

CategoricalProbs ensemble_predictive(std::span<const CategoricalProbs> member_probs) {
    if (member_probs.empty()) {
        throw ShapeError("ensemble_predictive: no members");
    }
    // Mean as an offset from the first member, so identical members give
    // that member back bit for bit.
    const auto& first = member_probs.front();
    const std::size_t k = first.size();
    std::vector<double> offset(k, 0.0);
    for (const auto& p : member_probs) {
        if (p.size() != k) {
            throw ShapeError("ensemble_predictive: members disagree on K");
        }
        for (std::size_t c = 0; c < k; ++c) {
            offset[c] += p[c] - first[c];
        }
    }
    std::vector<double> mean(k);
    for (std::size_t c = 0; c < k; ++c) {
        mean[c] = first[c] + offset[c] / static_cast<double>(member_probs.size());
    }
    return CategoricalProbs(std::move(mean));
}

Uncertainties ensemble_uncertainties(std::span<const CategoricalProbs> member_probs) {
    const auto mean = ensemble_predictive(member_probs);
    const double m = static_cast<double>(member_probs.size());
    Uncertainties u;
    u.total = entropy(mean.values());
    // Mutual information as the mean KL(member || mean): every term is exactly
    // zero for a member equal to the mean.
    double kl_sum = 0.0;
    for (const auto& p : member_probs) {
        u.expected_data += entropy(p.values());
        for (std::size_t c = 0; c < p.size(); ++c) {
            if (p[c] > 0.0) {
                kl_sum += p[c] * (std::log(p[c]) - std::log(mean[c]));
            }
        }
    }
    u.expected_data /= m;
    u.knowledge = std::max(0.0, kl_sum / m);
    return u;
}

void TransferSet::validate() const {
    const std::size_t n = inputs.rows();
    if (n == 0) {
        throw ShapeError("transfer set: no rows");
    }
    if (num_members == 0 || num_classes == 0 ||
        member_logits.size() != n * num_members * num_classes) {
        throw ShapeError("transfer set: member_logits is not N x M x K");
    }
    if (labels.size() != n || aux_mask.size() != n) {
        throw ShapeError("transfer set: labels/aux_mask length differs from N");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!aux_mask[i] && (labels[i] < 0 || labels[i] >= static_cast<int>(num_classes))) {
            throw ShapeError("transfer set: in-domain row " + std::to_string(i) + " lacks a valid label");
        }
    }
}

TransferSet build_transfer_set(const Ensemble& e, const data::Dataset2D& inputs,
                               const std::optional<data::Dataset2D>& aux) {
    e.validate();
    if (inputs.size() == 0) {
        throw ShapeError("build_transfer_set: no inputs");
    }
    const std::size_t d = e.members.front().input_dim();
    if (inputs.points.cols() != d || (aux && aux->points.cols() != d)) {
        throw ShapeError("build_transfer_set: input width does not match the ensemble");
    }
    if (inputs.labeled() && inputs.num_classes != e.num_classes) {
        throw ShapeError("build_transfer_set: dataset K differs from ensemble K");
    }
    const std::size_t n_main = inputs.size();
    const std::size_t n_aux = aux ? aux->size() : 0;
    const std::size_t n = n_main + n_aux;
    TransferSet t;
    t.num_members = e.size();
    t.num_classes = static_cast<std::size_t>(e.num_classes);
    t.inputs = Matrix(n, d);
    for (std::size_t i = 0; i < n_main; ++i) {
        std::copy_n(inputs.points.row(i).begin(), d, t.inputs.row(i).begin());
    }
    for (std::size_t i = 0; i < n_aux; ++i) {
        std::copy_n(aux->points.row(i).begin(), d, t.inputs.row(n_main + i).begin());
    }
    t.labels.assign(n, -1);
    if (inputs.labeled()) {
        std::copy(inputs.labels.begin(), inputs.labels.end(), t.labels.begin());
    }
    t.aux_mask.assign(n, false);
    std::fill(t.aux_mask.begin() + static_cast<std::ptrdiff_t>(n_main), t.aux_mask.end(), true);
    t.member_logits.resize(n * t.num_members * t.num_classes);
    for (std::size_t m = 0; m < t.num_members; ++m) {
        const Matrix logits = predict_logits(e.members[m], t.inputs);
        for (std::size_t i = 0; i < n; ++i) {
            const auto src = logits.row(i);
            std::copy(src.begin(), src.end(),
                      t.member_logits.begin() +
                          static_cast<std::ptrdiff_t>((i * t.num_members + m) * t.num_classes));
        }
    }
    return t;
}

std::vector<std::vector<CategoricalProbs>> member_probs(const Ensemble& e, const Matrix& inputs) {
    e.validate();
    std::vector<std::vector<CategoricalProbs>> out(inputs.rows());
    for (auto& row : out) {
        row.reserve(e.size());
    }
    for (const auto& member : e.members) {
        const Matrix logits = predict_logits(member, inputs);
        for (std::size_t i = 0; i < inputs.rows(); ++i) {
            out[i].push_back(softmax(logits.row(i), 1.0));
        }
    }
    return out;
}

std::string transfer_to_json(const TransferSet& t) {
    t.validate();
    json j;
    json inputs = json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto r = t.inputs.row(i);
        inputs.push_back(std::vector<double>(r.begin(), r.end()));
    }
    json labels = json::array();
    for (int l : t.labels) {
        labels.push_back(l < 0 ? json(nullptr) : json(l));
    }
    json logits = json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        json per_member = json::array();
        for (std::size_t m = 0; m < t.num_members; ++m) {
            const auto z = t.logits(i, m);
            per_member.push_back(std::vector<double>(z.begin(), z.end()));
        }
        logits.push_back(std::move(per_member));
    }
    j["inputs"] = std::move(inputs);
    j["labels"] = std::move(labels);
    j["aux_mask"] = std::vector<bool>(t.aux_mask.begin(), t.aux_mask.end());
    j["member_logits"] = std::move(logits);
    return j.dump() + "\n";
}

TransferSet transfer_from_json(const std::string& text) {
    TransferSet t;
    try {
        const json j = json::parse(text);
        const auto& inputs = j.at("inputs");
        const auto& logits = j.at("member_logits");
        const std::size_t n = inputs.size();
        if (n == 0 || logits.size() != n) {
            throw ParseError("transfer set: inputs/member_logits row counts differ or are zero");
        }
        const std::size_t d = inputs[0].size();
        t.num_members = logits[0].size();
        t.num_classes = t.num_members > 0 ? logits[0][0].size() : 0;
        t.inputs = Matrix(n, d);
        t.member_logits.reserve(n * t.num_members * t.num_classes);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = inputs[i].get<std::vector<double>>();
            if (row.size() != d) {
                throw ParseError("transfer set: ragged inputs at row " + std::to_string(i));
            }
            std::copy(row.begin(), row.end(), t.inputs.row(i).begin());
            if (logits[i].size() != t.num_members) {
                throw ParseError("transfer set: ragged member_logits at row " + std::to_string(i));
            }
            for (const auto& z : logits[i]) {
                const auto zv = z.get<std::vector<double>>();
                if (zv.size() != t.num_classes) {
                    throw ParseError("transfer set: ragged logits at row " + std::to_string(i));
                }
                t.member_logits.insert(t.member_logits.end(), zv.begin(), zv.end());
            }
        }
        for (const auto& l : j.at("labels")) {
            t.labels.push_back(l.is_null() ? -1 : l.get<int>());
        }
        for (const auto& a : j.at("aux_mask")) {
            t.aux_mask.push_back(a.get<bool>());
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("transfer set: ") + e.what());
    }
    try {
        t.validate();
    } catch (const ShapeError& e) {
        throw ParseError(e.what());
    }
    return t;
}

void save_transfer(const std::filesystem::path& path, const TransferSet& t) {
    io::write_file(path, transfer_to_json(t));
}

TransferSet load_transfer(const std::filesystem::path& path) {
    return transfer_from_json(io::read_file(path));
}

namespace {

std::string member_file(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "member_%03zu.json", i);
    return buf;
}

} // namespace

void save_ensemble(const std::filesystem::path& dir, const Ensemble& e, int epochs,
                   const std::string& config_hash) {
    e.validate();
    json files = json::array();
    for (std::size_t i = 0; i < e.size(); ++i) {
        const std::string name = member_file(i);
        save_checkpoint(dir / name, Checkpoint{e.members[i], {e.member_seeds[i], epochs, "member"}});
        files.push_back(name);
    }
    json manifest;
    manifest["size"] = e.size();
    manifest["num_classes"] = e.num_classes;
    manifest["dims"] = e.members.front().dims();
    manifest["seeds"] = e.member_seeds;
    manifest["members"] = std::move(files);
    manifest["config_hash"] = config_hash;
    io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

Ensemble load_ensemble(const std::filesystem::path& dir) {
    Ensemble e;
    try {
        const json manifest = json::parse(io::read_file(dir / "manifest.json"));
        e.num_classes = manifest.at("num_classes").get<int>();
        e.member_seeds = manifest.at("seeds").get<std::vector<std::uint64_t>>();
        for (const auto& f : manifest.at("members")) {
            e.members.push_back(load_checkpoint(dir / f.get<std::string>()).model);
        }
    } catch (const json::exception& ex) {
        throw ParseError("ensemble manifest: " + std::string(ex.what()));
    }
    e.validate();
    return e;
}

} // namespace endd::ensemble
