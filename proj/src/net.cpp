// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#include "endd/net.hpp"

#include "endd/error.hpp"
#include "endd/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace endd {

using nlohmann::json;

CategoricalProbs::CategoricalProbs(std::vector<double> probs) : probs_(std::move(probs)) {
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw DomainError("CategoricalProbs: entries must be finite and >= 0");
        }
        sum += p;
    }
    if (probs_.empty() || std::abs(sum - 1.0) > 1e-9) {
        throw DomainError("CategoricalProbs: entries must sum to 1");
    }
}

void softmax_into(std::span<const double> logits, double temperature, std::span<double> out) {
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.size(); ++c) {
        out[c] = std::exp((logits[c] - zmax) / temperature);
        sum += out[c];
    }
    for (double& p : out) {
        p /= sum;
    }
}

CategoricalProbs softmax(std::span<const double> logits, double temperature) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw DomainError("softmax: temperature must be finite and > 0");
    }
    if (logits.empty()) {
        throw DomainError("softmax: empty logits");
    }
    for (double z : logits) {
        if (!std::isfinite(z)) {
            throw DomainError("softmax: non-finite logit");
        }
    }
    std::vector<double> probs(logits.size());
    softmax_into(logits, temperature, probs);
    return CategoricalProbs(std::move(probs));
}

double entropy(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) {
            h -= p * std::log(p);
        }
    }
    return h;
}

// ---------------------------------------------------------------------------

std::size_t Mlp::input_dim() const {
    return layers.empty() ? 0 : layers.front().in_dim();
}

std::size_t Mlp::num_classes() const {
    return layers.empty() ? 0 : layers.back().out_dim();
}

std::vector<std::size_t> Mlp::dims() const {
    std::vector<std::size_t> d;
    if (layers.empty()) {
        return d;
    }
    d.push_back(layers.front().in_dim());
    for (const auto& l : layers) {
        d.push_back(l.out_dim());
    }
    return d;
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) {
        n += l.weight.size() + l.bias.size();
    }
    return n;
}

void Mlp::validate() const {
    if (layers.empty()) {
        throw ShapeError("Mlp: no layers");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.bias.size() != l.out_dim() || l.in_dim() == 0 || l.out_dim() == 0) {
            throw ShapeError("Mlp: layer " + std::to_string(i) + " has inconsistent bias/weight shape");
        }
        if (i > 0 && layers[i - 1].out_dim() != l.in_dim()) {
            throw ShapeError("Mlp: layer " + std::to_string(i) + " input does not match previous output");
        }
    }
    if (layers.back().activation != Activation::identity) {
        throw ShapeError("Mlp: final layer must output raw logits");
    }
}

namespace {

void check_dims(std::span<const std::size_t> dims) {
    if (dims.size() < 2) {
        throw ShapeError("Mlp: need at least input and output dimensions");
    }
    for (auto d : dims) {
        if (d == 0) {
            throw ShapeError("Mlp: zero-width layer");
        }
    }
}

} // namespace

Mlp zero_mlp(std::span<const std::size_t> dims) {
    check_dims(dims);
    Mlp m;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        Layer l;
        l.weight = Matrix(dims[i + 1], dims[i]);
        l.bias.assign(dims[i + 1], 0.0);
        l.activation = (i + 2 == dims.size()) ? Activation::identity : Activation::relu;
        m.layers.push_back(std::move(l));
    }
    return m;
}

Mlp make_mlp(std::span<const std::size_t> dims, Rng& rng) {
    Mlp m = zero_mlp(dims);
    for (auto& l : m.layers) {
        const double gain_sq = l.activation == Activation::relu ? 2.0 : 1.0;
        const double bound = std::sqrt(3.0 * gain_sq / static_cast<double>(l.in_dim()));
        for (double& w : l.weight.values()) {
            w = rng.uniform(-bound, bound);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------

namespace {

// out = in * W^T + b
void affine(const Matrix& in, const Layer& layer, Matrix& out) {
    const std::size_t n_out = layer.out_dim();
    const std::size_t n_in = layer.in_dim();
    out = Matrix(in.rows(), n_out);
    for (std::size_t r = 0; r < in.rows(); ++r) {
        const double* x = in.row(r).data();
        double* y = out.row(r).data();
        for (std::size_t j = 0; j < n_out; ++j) {
            const double* w = layer.weight.row(j).data();
            double acc = layer.bias[j];
            for (std::size_t k = 0; k < n_in; ++k) {
                acc += w[k] * x[k];
            }
            y[j] = acc;
        }
    }
}

} // namespace

ForwardResult forward(const Mlp& model, const Matrix& batch, const ForwardMode& mode) {
    if (model.layers.empty() || batch.cols() != model.input_dim()) {
        throw ShapeError("forward: batch has " + std::to_string(batch.cols()) +
                         " columns, model expects " + std::to_string(model.input_dim()));
    }
    const TrainMode* train = std::get_if<TrainMode>(&mode);
    if (train != nullptr) {
        if (!(train->keep_prob > 0.0 && train->keep_prob <= 1.0)) {
            throw DomainError("forward: keep_prob must be in (0, 1]");
        }
        if (train->keep_prob < 1.0 && train->rng == nullptr) {
            throw DomainError("forward: dropout requires a generator");
        }
    }
    const bool dropout = train != nullptr && train->keep_prob < 1.0;

    ForwardResult res;
    auto& tr = res.trace;
    tr.inputs = batch;
    tr.pre.resize(model.layers.size());
    tr.post.resize(model.layers.size());
    const Matrix* in = &tr.inputs;
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const Layer& layer = model.layers[li];
        affine(*in, layer, tr.pre[li]);
        Matrix& post = tr.post[li];
        post = tr.pre[li];
        if (layer.activation == Activation::relu) {
            for (double& v : post.values()) {
                v = v > 0.0 ? v : 0.0;
            }
        }
        const bool hidden = li + 1 < model.layers.size();
        if (dropout && hidden) {
            Matrix mask(post.rows(), post.cols());
            const double scale = 1.0 / train->keep_prob;
            auto mv = mask.values();
            auto pv = post.values();
            for (std::size_t i = 0; i < mv.size(); ++i) {
                mv[i] = train->rng->uniform() < train->keep_prob ? scale : 0.0;
                pv[i] *= mv[i];
            }
            tr.masks.push_back(std::move(mask));
        }
        in = &post;
    }
    res.logits = tr.post.back();
    return res;
}

Matrix predict_logits(const Mlp& model, const Matrix& batch) {
    if (model.layers.empty() || batch.cols() != model.input_dim()) {
        throw ShapeError("predict_logits: input width does not match model");
    }
    Matrix cur = batch;
    Matrix next;
    for (const auto& layer : model.layers) {
        affine(cur, layer, next);
        if (layer.activation == Activation::relu) {
            for (double& v : next.values()) {
                v = v > 0.0 ? v : 0.0;
            }
        }
        std::swap(cur, next);
    }
    return cur;
}

Gradients Gradients::zeros_like(const Mlp& model) {
    Gradients g;
    for (const auto& l : model.layers) {
        g.weight.emplace_back(l.out_dim(), l.in_dim());
        g.bias.emplace_back(l.out_dim(), 0.0);
    }
    return g;
}

Gradients backward(const Mlp& model, const ForwardTrace& trace, const Matrix& dlogits) {
    const std::size_t n_layers = model.layers.size();
    if (trace.pre.size() != n_layers || trace.post.size() != n_layers) {
        throw ShapeError("backward: trace does not match model depth");
    }
    const std::size_t batch = trace.inputs.rows();
    if (dlogits.rows() != batch || dlogits.cols() != model.num_classes()) {
        throw ShapeError("backward: dL/dlogits must be batch x K");
    }
    const bool dropout = !trace.masks.empty();
    if (dropout && trace.masks.size() + 1 != n_layers) {
        throw ShapeError("backward: dropout masks do not match hidden layers");
    }
    for (std::size_t li = 0; li < n_layers; ++li) {
        if (trace.pre[li].rows() != batch || trace.pre[li].cols() != model.layers[li].out_dim()) {
            throw ShapeError("backward: trace layer " + std::to_string(li) + " has wrong shape");
        }
    }

    Gradients g = Gradients::zeros_like(model);
    Matrix delta = dlogits; // dL/dpre of the current layer
    for (std::size_t li = n_layers; li-- > 0;) {
        const Layer& layer = model.layers[li];
        const Matrix& in = li == 0 ? trace.inputs : trace.post[li - 1];
        const std::size_t n_out = layer.out_dim();
        const std::size_t n_in = layer.in_dim();
        Matrix& gw = g.weight[li];
        auto& gb = g.bias[li];
        for (std::size_t r = 0; r < batch; ++r) {
            const double* d = delta.row(r).data();
            const double* x = in.row(r).data();
            for (std::size_t j = 0; j < n_out; ++j) {
                gb[j] += d[j];
                double* gwj = gw.row(j).data();
                for (std::size_t k = 0; k < n_in; ++k) {
                    gwj[k] += d[j] * x[k];
                }
            }
        }
        if (li == 0) {
            break;
        }
        // Propagate to the previous layer's pre-activation.
        Matrix prev(batch, n_in);
        const Layer& below = model.layers[li - 1];
        for (std::size_t r = 0; r < batch; ++r) {
            const double* d = delta.row(r).data();
            double* p = prev.row(r).data();
            for (std::size_t j = 0; j < n_out; ++j) {
                const double* w = layer.weight.row(j).data();
                const double dj = d[j];
                for (std::size_t k = 0; k < n_in; ++k) {
                    p[k] += dj * w[k];
                }
            }
            const double* pre = trace.pre[li - 1].row(r).data();
            const double* mask = dropout ? trace.masks[li - 1].row(r).data() : nullptr;
            for (std::size_t k = 0; k < n_in; ++k) {
                if (mask != nullptr) {
                    p[k] *= mask[k];
                }
                if (below.activation == Activation::relu && !(pre[k] > 0.0)) {
                    p[k] = 0.0;
                }
            }
        }
        delta = std::move(prev);
    }
    return g;
}

double cross_entropy(const Matrix& logits, std::span<const int> labels, Matrix* grad) {
    if (labels.size() != logits.rows()) {
        throw ShapeError("cross_entropy: label count does not match batch");
    }
    const std::size_t n = logits.rows();
    const std::size_t k = logits.cols();
    if (grad != nullptr) {
        *grad = Matrix(n, k);
    }
    std::vector<double> p(k);
    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const auto z = logits.row(r);
        const int y = labels[r];
        if (y < 0 || static_cast<std::size_t>(y) >= k) {
            throw DomainError("cross_entropy: label out of range");
        }
        const double zmax = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            sum += std::exp(z[c] - zmax);
        }
        const double lse = zmax + std::log(sum);
        loss += lse - z[static_cast<std::size_t>(y)];
        if (grad != nullptr) {
            auto gr = grad->row(r);
            for (std::size_t c = 0; c < k; ++c) {
                gr[c] = std::exp(z[c] - lse) / static_cast<double>(n);
            }
            gr[static_cast<std::size_t>(y)] -= 1.0 / static_cast<double>(n);
        }
    }
    return loss / static_cast<double>(n);
}

double grad_check(const Mlp& model, const LogitLoss& loss, const Matrix& batch, double h) {
    auto fwd = forward(model, batch, EvalMode{});
    Matrix dlogits;
    loss(fwd.logits, &dlogits);
    const Gradients analytic = backward(model, fwd.trace, dlogits);

    Mlp probe = model;
    auto eval = [&] { return loss(predict_logits(probe, batch), nullptr); };
    double worst = 0.0;
    auto compare = [&](double& param, double a) {
        const double saved = param;
        param = saved + h;
        const double up = eval();
        param = saved - h;
        const double down = eval();
        param = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(a - numeric) / denom);
    };
    for (std::size_t li = 0; li < probe.layers.size(); ++li) {
        auto w = probe.layers[li].weight.values();
        const auto gw = analytic.weight[li].values();
        for (std::size_t i = 0; i < w.size(); ++i) {
            compare(w[i], gw[i]);
        }
        auto& b = probe.layers[li].bias;
        for (std::size_t i = 0; i < b.size(); ++i) {
            compare(b[i], analytic.bias[li][i]);
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Checkpoint JSON

std::string checkpoint_to_json(const Checkpoint& ckpt) {
    ckpt.model.validate();
    json j;
    j["arch"] = {{"dims", ckpt.model.dims()}, {"activation", "relu"}};
    json layers = json::array();
    for (const auto& l : ckpt.model.layers) {
        json w = json::array();
        for (std::size_t r = 0; r < l.weight.rows(); ++r) {
            const auto row = l.weight.row(r);
            w.push_back(std::vector<double>(row.begin(), row.end()));
        }
        layers.push_back({{"w", std::move(w)}, {"b", l.bias}});
    }
    j["layers"] = std::move(layers);
    j["meta"] = {{"seed", ckpt.meta.seed},
                 {"epochs", ckpt.meta.epochs},
                 {"model_kind", ckpt.meta.model_kind}};
    return j.dump() + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
    Checkpoint ckpt;
    try {
        const json j = json::parse(text);
        const auto dims = j.at("arch").at("dims").get<std::vector<std::size_t>>();
        if (j.at("arch").at("activation").get<std::string>() != "relu") {
            throw ParseError("checkpoint: unsupported activation");
        }
        ckpt.model = zero_mlp(dims);
        const auto& layers = j.at("layers");
        if (layers.size() != ckpt.model.layers.size()) {
            throw ParseError("checkpoint: layer count does not match arch.dims");
        }
        for (std::size_t li = 0; li < layers.size(); ++li) {
            auto& l = ckpt.model.layers[li];
            const auto& w = layers[li].at("w");
            const auto b = layers[li].at("b").get<std::vector<double>>();
            if (w.size() != l.out_dim() || b.size() != l.out_dim()) {
                throw ParseError("checkpoint: layer " + std::to_string(li) + " shape mismatch");
            }
            for (std::size_t r = 0; r < w.size(); ++r) {
                const auto row = w[r].get<std::vector<double>>();
                if (row.size() != l.in_dim()) {
                    throw ParseError("checkpoint: layer " + std::to_string(li) + " row width mismatch");
                }
                std::copy(row.begin(), row.end(), l.weight.row(r).begin());
            }
            l.bias = b;
        }
        const auto& meta = j.at("meta");
        ckpt.meta.seed = meta.at("seed").get<std::uint64_t>();
        ckpt.meta.epochs = meta.at("epochs").get<int>();
        ckpt.meta.model_kind = meta.at("model_kind").get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("checkpoint: ") + e.what());
    }
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    io::write_file(path, checkpoint_to_json(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    return checkpoint_from_json(io::read_file(path));
}

} // namespace endd
