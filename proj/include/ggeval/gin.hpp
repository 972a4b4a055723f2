#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggeval/graph.hpp"
#include "ggeval/linalg.hpp"
#include "ggeval/parallel.hpp"
#include "ggeval/rng.hpp"

namespace ggeval {

enum class FeatureMode { OneHotDegree, Constant, Random };

inline const char* to_string(FeatureMode m) {
    switch (m) {
        case FeatureMode::OneHotDegree: return "degree";
        case FeatureMode::Constant: return "constant";
        case FeatureMode::Random: return "random";
    }
    return "?";
}

inline FeatureMode feature_mode_from_string(const std::string& s) {
    if (s == "degree") return FeatureMode::OneHotDegree;
    if (s == "constant") return FeatureMode::Constant;
    if (s == "random") return FeatureMode::Random;
    throw ValidationError("unknown feature mode '" + s + "'");
}

/// Node feature recipe. OneHotDegree keeps the sorted degree vocabulary seen
/// at fit time; unseen degrees map to the closest entry (ties to the smaller).
struct FeatureConfig {
    FeatureMode mode = FeatureMode::OneHotDegree;
    std::vector<int> degree_vocab;
    int random_dim = 16;

    int input_dim() const {
        switch (mode) {
            case FeatureMode::OneHotDegree: return static_cast<int>(degree_vocab.size());
            case FeatureMode::Constant: return 1;
            case FeatureMode::Random: return random_dim;
        }
        return 0;
    }
};

inline FeatureConfig fit_features(const std::vector<GraphSet>& training, FeatureMode mode, int random_dim = 16) {
    if (training.empty()) throw ValidationError("fit_features: no training data");
    FeatureConfig cfg;
    cfg.mode = mode;
    cfg.random_dim = random_dim;
    if (mode == FeatureMode::OneHotDegree) {
        std::vector<int> degrees;
        for (const auto& gs : training)
            for (const auto& g : gs.graphs)
                for (int v = 0; v < g.n; ++v) degrees.push_back(g.degree(v));
        std::sort(degrees.begin(), degrees.end());
        degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
        if (degrees.empty()) throw ValidationError("fit_features: no nodes in training data");
        cfg.degree_vocab = std::move(degrees);
    }
    return cfg;
}

/// Node feature matrix (n x input_dim). Random mode draws fresh one-hot
/// symbols on every call.
inline Matrix featurize(const Graph& g, const FeatureConfig& cfg, Rng& rng) {
    Matrix x(g.n, cfg.input_dim());
    switch (cfg.mode) {
        case FeatureMode::Constant:
            for (int v = 0; v < g.n; ++v) x(v, 0) = 1.0;
            break;
        case FeatureMode::OneHotDegree: {
            const auto& vocab = cfg.degree_vocab;
            if (vocab.empty()) throw ValidationError("featurize: feature config not fitted");
            for (int v = 0; v < g.n; ++v) {
                const int d = g.degree(v);
                auto it = std::lower_bound(vocab.begin(), vocab.end(), d);
                std::size_t idx;
                if (it == vocab.end())
                    idx = vocab.size() - 1;
                else if (it == vocab.begin())
                    idx = 0;
                else {
                    const std::size_t hi = static_cast<std::size_t>(it - vocab.begin());
                    // tie goes to the smaller vocab entry
                    idx = (d - vocab[hi - 1]) <= (vocab[hi] - d) ? hi - 1 : hi;
                }
                x(v, static_cast<int>(idx)) = 1.0;
            }
            break;
        }
        case FeatureMode::Random:
            for (int v = 0; v < g.n; ++v)
                x(v, static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(cfg.random_dim)))) = 1.0;
            break;
    }
    return x;
}

enum class Readout { Sum, Concat };

inline const char* to_string(Readout r) { return r == Readout::Sum ? "sum" : "concat"; }

inline Readout readout_from_string(const std::string& s) {
    if (s == "sum") return Readout::Sum;
    if (s == "concat") return Readout::Concat;
    throw ValidationError("unknown readout '" + s + "'");
}

struct GinHyper {
    int layers = 5;
    int hidden = 64;
    double epsilon = 0.0; // GIN-0
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int epochs = 64;
    int batch_size = 32;
};

/// y = x W^T + b with W of shape (out_dim x in_dim).
struct LinearLayer {
    Matrix w;
    std::vector<double> b;
};

struct GinLayer {
    LinearLayer l1, l2;
};

struct GinModel {
    GinHyper hyper;
    FeatureConfig feature_config;
    Readout readout = Readout::Sum;
    int class_count = 0;
    int input_dim = 0;
    std::vector<GinLayer> layers;      // message-passing MLPs
    std::vector<LinearLayer> head;     // per-layer pooled -> logits, summed
    bool trained = false;
    std::vector<double> train_accuracy; // per epoch
    std::vector<double> test_accuracy;

    int embedding_dim() const {
        return readout == Readout::Concat ? hyper.layers * hyper.hidden : hyper.hidden;
    }
};

namespace detail {

inline LinearLayer glorot_linear(int out_dim, int in_dim, Rng& rng) {
    LinearLayer layer;
    layer.w = Matrix(out_dim, in_dim);
    layer.b.assign(static_cast<std::size_t>(out_dim), 0.0);
    const double limit = std::sqrt(6.0 / (in_dim + out_dim));
    for (double& w : layer.w.a) w = (rng.uniform() * 2.0 - 1.0) * limit;
    return layer;
}

} // namespace detail

/// Glorot-initialized, untrained model.
inline GinModel init_gin(const FeatureConfig& cfg, Readout readout, int class_count, const GinHyper& hyper,
                         Rng& rng) {
    if (class_count < 1) throw ValidationError("init_gin: class_count must be positive");
    GinModel m;
    m.hyper = hyper;
    m.feature_config = cfg;
    m.readout = readout;
    m.class_count = class_count;
    m.input_dim = cfg.input_dim();
    int in = m.input_dim;
    for (int k = 0; k < hyper.layers; ++k) {
        GinLayer layer;
        layer.l1 = detail::glorot_linear(hyper.hidden, in, rng);
        layer.l2 = detail::glorot_linear(hyper.hidden, hyper.hidden, rng);
        m.layers.push_back(std::move(layer));
        in = hyper.hidden;
    }
    for (int k = 0; k < hyper.layers; ++k) m.head.push_back(detail::glorot_linear(class_count, hyper.hidden, rng));
    return m;
}

// Yields every parameter tensor's flat storage, in a fixed order.
template <typename ModelT, typename F>
void visit_param_vectors(ModelT& model, F&& f) {
    for (auto& layer : model.layers) {
        f(layer.l1.w.a);
        f(layer.l1.b);
        f(layer.l2.w.a);
        f(layer.l2.b);
    }
    for (auto& h : model.head) {
        f(h.w.a);
        f(h.b);
    }
}

// Names matching visit_param_vectors order, for diagnostics.
inline std::vector<std::string> param_tensor_names(const GinModel& model) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < model.layers.size(); ++k)
        for (const char* part : {"w1", "b1", "w2", "b2"})
            names.push_back("layer" + std::to_string(k) + "." + part);
    for (std::size_t k = 0; k < model.head.size(); ++k) {
        names.push_back("head" + std::to_string(k) + ".w");
        names.push_back("head" + std::to_string(k) + ".b");
    }
    return names;
}

namespace detail {

inline Matrix linear_apply(const LinearLayer& layer, const Matrix& x) {
    const int n = x.rows, in = x.cols, out = layer.w.rows;
    Matrix y(n, out);
    for (int v = 0; v < n; ++v) {
        const double* xv = &x.a[static_cast<std::size_t>(v) * in];
        double* yv = &y.a[static_cast<std::size_t>(v) * out];
        for (int o = 0; o < out; ++o) {
            const double* wo = &layer.w.a[static_cast<std::size_t>(o) * in];
            double acc = layer.b[static_cast<std::size_t>(o)];
            for (int i = 0; i < in; ++i) acc += xv[i] * wo[i];
            yv[o] = acc;
        }
    }
    return y;
}

// (1+eps) h(v) + sum over neighbours of h(u)
inline Matrix gin_aggregate(const Graph& g, const Matrix& h, double eps) {
    Matrix out(h.rows, h.cols);
    const double self = 1.0 + eps;
    for (int v = 0; v < g.n; ++v) {
        double* ov = &out.a[static_cast<std::size_t>(v) * h.cols];
        const double* hv = &h.a[static_cast<std::size_t>(v) * h.cols];
        for (int c = 0; c < h.cols; ++c) ov[c] = self * hv[c];
        for (int u : g.adjacency[v]) {
            const double* hu = &h.a[static_cast<std::size_t>(u) * h.cols];
            for (int c = 0; c < h.cols; ++c) ov[c] += hu[c];
        }
    }
    return out;
}

inline void relu_inplace(Matrix& m) {
    for (double& x : m.a) x = x > 0.0 ? x : 0.0;
}

struct LayerCache {
    Matrix agg; // aggregated input of the MLP
    Matrix z1;  // first linear pre-activation
    Matrix r1;  // relu(z1)
    Matrix z2;  // second linear pre-activation
    Matrix h;   // relu(z2), the layer output
};

struct ForwardCache {
    std::vector<LayerCache> layers;
    std::vector<std::vector<double>> pooled; // per layer, column sums of h
    std::vector<double> logits;
};

inline ForwardCache forward_cached(const GinModel& model, const Graph& g, const Matrix& features) {
    if (features.cols != model.input_dim)
        throw ValidationError("forward: feature dim " + std::to_string(features.cols) + " != model input dim " +
                              std::to_string(model.input_dim));
    if (features.rows != g.n) throw ValidationError("forward: feature rows != node count");
    ForwardCache cache;
    cache.layers.resize(model.layers.size());
    cache.pooled.resize(model.layers.size());
    const Matrix* h_prev = &features;
    for (std::size_t k = 0; k < model.layers.size(); ++k) {
        LayerCache& lc = cache.layers[k];
        lc.agg = gin_aggregate(g, *h_prev, model.hyper.epsilon);
        lc.z1 = linear_apply(model.layers[k].l1, lc.agg);
        lc.r1 = lc.z1;
        relu_inplace(lc.r1);
        lc.z2 = linear_apply(model.layers[k].l2, lc.r1);
        lc.h = lc.z2;
        relu_inplace(lc.h);
        auto& pooled = cache.pooled[k];
        pooled.assign(static_cast<std::size_t>(model.hyper.hidden), 0.0);
        for (int v = 0; v < g.n; ++v) {
            const double* hv = &lc.h.a[static_cast<std::size_t>(v) * lc.h.cols];
            for (int c = 0; c < lc.h.cols; ++c) pooled[static_cast<std::size_t>(c)] += hv[c];
        }
        h_prev = &lc.h;
    }
    cache.logits.assign(static_cast<std::size_t>(model.class_count), 0.0);
    for (std::size_t k = 0; k < model.head.size(); ++k) {
        const auto& head = model.head[k];
        for (int c = 0; c < model.class_count; ++c) {
            double acc = head.b[static_cast<std::size_t>(c)];
            const double* wc = &head.w.a[static_cast<std::size_t>(c) * head.w.cols];
            for (int i = 0; i < head.w.cols; ++i) acc += wc[i] * cache.pooled[k][static_cast<std::size_t>(i)];
            cache.logits[static_cast<std::size_t>(c)] += acc;
        }
    }
    return cache;
}

} // namespace detail

struct ForwardResult {
    std::vector<std::vector<double>> pooled; // layers 1..K
    std::vector<double> logits;
};

/// Full forward pass: per-layer sum-pooled representations and class logits.
inline ForwardResult forward(const GinModel& model, const Graph& g, const Matrix& features) {
    auto cache = detail::forward_cached(model, g, features);
    return {std::move(cache.pooled), std::move(cache.logits)};
}

/// Graph embedding from the pooled layer representations.
inline std::vector<double> readout_embedding(const GinModel& model, const std::vector<std::vector<double>>& pooled) {
    const int hidden = model.hyper.hidden;
    if (model.readout == Readout::Concat) {
        std::vector<double> e;
        e.reserve(pooled.size() * static_cast<std::size_t>(hidden));
        for (const auto& p : pooled) e.insert(e.end(), p.begin(), p.end());
        return e;
    }
    std::vector<double> e(static_cast<std::size_t>(hidden), 0.0);
    for (const auto& p : pooled)
        for (int c = 0; c < hidden; ++c) e[static_cast<std::size_t>(c)] += p[static_cast<std::size_t>(c)];
    return e;
}

/// N x d matrix of graph representations, one row per input graph.
struct EmbeddingMatrix {
    int dim = 0;
    std::vector<std::vector<double>> rows;
    std::vector<int> graph_ids;
};

/// Embeds every graph of a set. Random-mode features use one child stream per
/// graph index, so results do not depend on the thread count.
inline EmbeddingMatrix embed(const GinModel& model, const GraphSet& gs, Rng& rng) {
    EmbeddingMatrix em;
    em.dim = model.embedding_dim();
    em.rows.resize(gs.graphs.size());
    em.graph_ids.resize(gs.graphs.size());
    parallel_for(gs.graphs.size(), [&](std::size_t i) {
        Rng feature_rng = rng.child(i);
        const Matrix x = featurize(gs.graphs[i], model.feature_config, feature_rng);
        const auto fwd = forward(model, gs.graphs[i], x);
        em.rows[i] = readout_embedding(model, fwd.pooled);
        em.graph_ids[i] = static_cast<int>(i);
    });
    return em;
}

/// One supervised example: graph, its fixed feature matrix, class index.
struct TrainExample {
    const Graph* graph = nullptr;
    Matrix features;
    int class_index = 0;
};

/// Mirrors the model's parameter tensors, zero-filled.
inline GinModel zero_like(const GinModel& model) {
    GinModel z = model;
    visit_param_vectors(z, [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); });
    return z;
}

namespace detail {

inline double cross_entropy_from_logits(std::span<const double> logits, int target,
                                        std::vector<double>* softmax_out = nullptr) {
    double max_logit = logits[0];
    for (double l : logits) max_logit = std::max(max_logit, l);
    double denom = 0.0;
    for (double l : logits) denom += std::exp(l - max_logit);
    const double log_denom = std::log(denom);
    if (softmax_out) {
        softmax_out->resize(logits.size());
        for (std::size_t c = 0; c < logits.size(); ++c)
            (*softmax_out)[c] = std::exp(logits[c] - max_logit) / denom;
    }
    return -(logits[static_cast<std::size_t>(target)] - max_logit - log_denom);
}

} // namespace detail

/// Mean cross-entropy of a batch.
inline double batch_loss(const GinModel& model, std::span<const TrainExample> batch) {
    if (batch.empty()) throw ValidationError("batch_loss: empty batch");
    double total = 0.0;
    for (const auto& ex : batch) {
        const auto fwd = detail::forward_cached(model, *ex.graph, ex.features);
        total += detail::cross_entropy_from_logits(fwd.logits, ex.class_index);
    }
    return total / static_cast<double>(batch.size());
}

/// Mean cross-entropy and its gradient w.r.t. every parameter, by hand-derived
/// reverse-mode differentiation of the fixed architecture.
inline std::pair<double, GinModel> batch_gradients(const GinModel& model, std::span<const TrainExample> batch) {
    if (batch.empty()) throw ValidationError("batch_gradients: empty batch");
    GinModel grads = zero_like(model);
    const int hidden = model.hyper.hidden;
    const int K = model.hyper.layers;
    double total_loss = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    for (const auto& ex : batch) {
        const Graph& g = *ex.graph;
        const auto cache = detail::forward_cached(model, g, ex.features);
        std::vector<double> softmax;
        total_loss += detail::cross_entropy_from_logits(cache.logits, ex.class_index, &softmax);

        // d loss / d logits, scaled by the batch mean
        std::vector<double> dlogits(softmax);
        dlogits[static_cast<std::size_t>(ex.class_index)] -= 1.0;
        for (double& d : dlogits) d *= inv_batch;

        // head maps and pooled gradients
        std::vector<std::vector<double>> dpooled(static_cast<std::size_t>(K),
                                                 std::vector<double>(static_cast<std::size_t>(hidden), 0.0));
        for (int k = 0; k < K; ++k) {
            auto& gh = grads.head[static_cast<std::size_t>(k)];
            const auto& head = model.head[static_cast<std::size_t>(k)];
            const auto& pooled = cache.pooled[static_cast<std::size_t>(k)];
            for (int c = 0; c < model.class_count; ++c) {
                const double dc = dlogits[static_cast<std::size_t>(c)];
                gh.b[static_cast<std::size_t>(c)] += dc;
                double* gw = &gh.w.a[static_cast<std::size_t>(c) * gh.w.cols];
                const double* hw = &head.w.a[static_cast<std::size_t>(c) * head.w.cols];
                for (int i = 0; i < hidden; ++i) {
                    gw[i] += dc * pooled[static_cast<std::size_t>(i)];
                    dpooled[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] += dc * hw[i];
                }
            }
        }

        // backprop through the message-passing layers
        Matrix dh(g.n, hidden);
        for (int v = 0; v < g.n; ++v)
            for (int c = 0; c < hidden; ++c)
                dh(v, c) = dpooled[static_cast<std::size_t>(K - 1)][static_cast<std::size_t>(c)];

        for (int k = K - 1; k >= 0; --k) {
            const auto& lc = cache.layers[static_cast<std::size_t>(k)];
            const auto& layer = model.layers[static_cast<std::size_t>(k)];
            auto& gl = grads.layers[static_cast<std::size_t>(k)];
            const int in_dim = lc.agg.cols;

            // dZ2 = dh o relu'(z2)
            Matrix dz2 = dh;
            for (std::size_t i = 0; i < dz2.a.size(); ++i)
                if (lc.z2.a[i] <= 0.0) dz2.a[i] = 0.0;
            // dW2 += dZ2^T R1 ; db2 += column sums ; dR1 = dZ2 W2
            Matrix dr1(g.n, hidden);
            for (int v = 0; v < g.n; ++v) {
                const double* dz = &dz2.a[static_cast<std::size_t>(v) * hidden];
                const double* r1 = &lc.r1.a[static_cast<std::size_t>(v) * hidden];
                double* dr = &dr1.a[static_cast<std::size_t>(v) * hidden];
                for (int o = 0; o < hidden; ++o) {
                    const double d = dz[o];
                    if (d != 0.0) {
                        double* gw = &gl.l2.w.a[static_cast<std::size_t>(o) * hidden];
                        for (int i = 0; i < hidden; ++i) gw[i] += d * r1[i];
                        gl.l2.b[static_cast<std::size_t>(o)] += d;
                        const double* w = &layer.l2.w.a[static_cast<std::size_t>(o) * hidden];
                        for (int i = 0; i < hidden; ++i) dr[i] += d * w[i];
                    }
                }
            }
            // dZ1 = dR1 o relu'(z1)
            Matrix& dz1 = dr1;
            for (std::size_t i = 0; i < dz1.a.size(); ++i)
                if (lc.z1.a[i] <= 0.0) dz1.a[i] = 0.0;
            // dW1 += dZ1^T agg ; db1 += column sums ; dAgg = dZ1 W1
            Matrix dagg(g.n, in_dim);
            for (int v = 0; v < g.n; ++v) {
                const double* dz = &dz1.a[static_cast<std::size_t>(v) * hidden];
                const double* agg = &lc.agg.a[static_cast<std::size_t>(v) * in_dim];
                double* da = &dagg.a[static_cast<std::size_t>(v) * in_dim];
                for (int o = 0; o < hidden; ++o) {
                    const double d = dz[o];
                    if (d != 0.0) {
                        double* gw = &gl.l1.w.a[static_cast<std::size_t>(o) * in_dim];
                        for (int i = 0; i < in_dim; ++i) gw[i] += d * agg[i];
                        gl.l1.b[static_cast<std::size_t>(o)] += d;
                        const double* w = &layer.l1.w.a[static_cast<std::size_t>(o) * in_dim];
                        for (int i = 0; i < in_dim; ++i) da[i] += d * w[i];
                    }
                }
            }
            if (k > 0) {
                // aggregation is self-adjoint on undirected graphs
                dh = detail::gin_aggregate(g, dagg, model.hyper.epsilon);
                const auto& dp = dpooled[static_cast<std::size_t>(k - 1)];
                for (int v = 0; v < g.n; ++v)
                    for (int c = 0; c < hidden; ++c) dh(v, c) += dp[static_cast<std::size_t>(c)];
            }
        }
    }
    return {total_loss * inv_batch, std::move(grads)};
}

struct AdamState {
    GinModel m, v;
    long step = 0;
};

inline void adam_step(GinModel& model, const GinModel& grads, AdamState& state, const GinHyper& hyper) {
    ++state.step;
    const double bias1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
    std::vector<std::vector<double>*> params, gs, ms, vs;
    visit_param_vectors(model, [&](std::vector<double>& t) { params.push_back(&t); });
    visit_param_vectors(const_cast<GinModel&>(grads), [&](std::vector<double>& t) { gs.push_back(&t); });
    visit_param_vectors(state.m, [&](std::vector<double>& t) { ms.push_back(&t); });
    visit_param_vectors(state.v, [&](std::vector<double>& t) { vs.push_back(&t); });
    for (std::size_t t = 0; t < params.size(); ++t) {
        auto& p = *params[t];
        const auto& grad = *gs[t];
        auto& m1 = *ms[t];
        auto& m2 = *vs[t];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m1[i] = hyper.beta1 * m1[i] + (1.0 - hyper.beta1) * grad[i];
            m2[i] = hyper.beta2 * m2[i] + (1.0 - hyper.beta2) * grad[i] * grad[i];
            const double mhat = m1[i] / bias1;
            const double vhat = m2[i] / bias2;
            p[i] -= hyper.learning_rate * mhat / (std::sqrt(vhat) + hyper.adam_eps);
        }
    }
}

/// Deterministic stratified 80-20 split: per class, indices are shuffled and
/// the first floor(0.8 n) go to training.
struct SplitIndices {
    std::vector<std::size_t> train, test;
};

inline SplitIndices stratified_split(std::span<const int> class_of, int class_count, Rng& rng) {
    SplitIndices split;
    for (int c = 0; c < class_count; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < class_of.size(); ++i)
            if (class_of[i] == c) members.push_back(i);
        shuffle(members, rng);
        const std::size_t train_n = members.size() * 4 / 5;
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < train_n ? split.train : split.test).push_back(members[i]);
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

/// Trains a GIN classifier on the labeled sets. Labels are mapped to class
/// indices in sorted order; per-epoch train/test accuracies are recorded on
/// the model. Throws NumericalError if the loss stops being finite.
inline GinModel train(const std::vector<GraphSet>& datasets, const FeatureConfig& cfg, Readout readout,
                      const GinHyper& hyper, std::uint64_t seed) {
    std::vector<int> labels;
    for (const auto& gs : datasets) labels.push_back(gs.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    if (labels.size() < 2) throw ValidationError("train: need at least two classes");

    struct Item {
        const Graph* graph;
        int class_index;
    };
    std::vector<Item> items;
    for (const auto& gs : datasets) {
        const int cls = static_cast<int>(std::lower_bound(labels.begin(), labels.end(), gs.label) - labels.begin());
        for (const auto& g : gs.graphs) items.push_back({&g, cls});
    }
    if (items.empty()) throw ValidationError("train: no graphs");

    Rng init_rng = Rng(derive_seed(seed, 0));
    Rng split_rng = Rng(derive_seed(seed, 1));
    Rng shuffle_rng = Rng(derive_seed(seed, 2));
    Rng feature_rng = Rng(derive_seed(seed, 3));

    GinModel model = init_gin(cfg, readout, static_cast<int>(labels.size()), hyper, init_rng);

    std::vector<int> class_of;
    for (const auto& it : items) class_of.push_back(it.class_index);
    const auto split = stratified_split(class_of, model.class_count, split_rng);

    // static features are reused across epochs; random ones are redrawn per use
    const bool static_features = cfg.mode != FeatureMode::Random;
    std::vector<Matrix> cached;
    if (static_features) {
        cached.resize(items.size());
        Rng unused(0);
        for (std::size_t i = 0; i < items.size(); ++i) cached[i] = featurize(*items[i].graph, cfg, unused);
    }
    auto features_of = [&](std::size_t i) {
        return static_features ? cached[i] : featurize(*items[i].graph, cfg, feature_rng);
    };

    AdamState adam{zero_like(model), zero_like(model), 0};
    std::vector<std::size_t> train_idx = split.train;

    auto accuracy_over = [&](const std::vector<std::size_t>& indices) {
        if (indices.empty()) return 0.0;
        std::size_t hits = 0;
        for (std::size_t i : indices) {
            const Matrix x = features_of(i);
            const auto fwd = forward(model, *items[i].graph, x);
            const auto best = std::max_element(fwd.logits.begin(), fwd.logits.end());
            if (static_cast<int>(best - fwd.logits.begin()) == items[i].class_index) ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(indices.size());
    };

    for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
        shuffle(train_idx, shuffle_rng);
        for (std::size_t start = 0; start < train_idx.size(); start += static_cast<std::size_t>(hyper.batch_size)) {
            const std::size_t end = std::min(train_idx.size(), start + static_cast<std::size_t>(hyper.batch_size));
            std::vector<TrainExample> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i)
                batch.push_back({items[train_idx[i]].graph, features_of(train_idx[i]), items[train_idx[i]].class_index});
            auto [loss, grads] = batch_gradients(model, batch);
            if (!std::isfinite(loss))
                throw NumericalError("train: loss diverged at epoch " + std::to_string(epoch));
            adam_step(model, grads, adam, hyper);
        }
        model.train_accuracy.push_back(accuracy_over(split.train));
        model.test_accuracy.push_back(accuracy_over(split.test));
    }
    model.trained = true;
    return model;
}

inline constexpr const char* kGinModelFormat = "ggeval.gin.v1";

inline nlohmann::json model_to_json(const GinModel& m) {
    nlohmann::json j;
    j["version"] = kGinModelFormat;
    j["hyper"] = {{"layers", m.hyper.layers},
                  {"hidden", m.hyper.hidden},
                  {"epsilon", m.hyper.epsilon},
                  {"learning_rate", m.hyper.learning_rate},
                  {"beta1", m.hyper.beta1},
                  {"beta2", m.hyper.beta2},
                  {"adam_eps", m.hyper.adam_eps},
                  {"epochs", m.hyper.epochs},
                  {"batch_size", m.hyper.batch_size}};
    j["feature_config"] = {{"mode", to_string(m.feature_config.mode)},
                           {"degree_vocab", m.feature_config.degree_vocab},
                           {"random_dim", m.feature_config.random_dim}};
    j["readout"] = to_string(m.readout);
    j["class_count"] = m.class_count;
    j["input_dim"] = m.input_dim;
    j["trained"] = m.trained;
    j["train_accuracy"] = m.train_accuracy;
    j["test_accuracy"] = m.test_accuracy;
    auto linear_to_json = [](const LinearLayer& l) {
        nlohmann::json out;
        out["rows"] = l.w.rows;
        out["cols"] = l.w.cols;
        out["w"] = l.w.a;
        out["b"] = l.b;
        return out;
    };
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : m.layers)
        j["layers"].push_back({{"l1", linear_to_json(layer.l1)}, {"l2", linear_to_json(layer.l2)}});
    j["head"] = nlohmann::json::array();
    for (const auto& h : m.head) j["head"].push_back(linear_to_json(h));
    return j;
}

inline GinModel model_from_json(const nlohmann::json& j) {
    if (!j.contains("version") || j.at("version").get<std::string>() != kGinModelFormat)
        throw ValidationError("load_model: unsupported model version '" +
                              (j.contains("version") ? j.at("version").get<std::string>() : std::string("?")) + "'");
    GinModel m;
    const auto& hyper = j.at("hyper");
    m.hyper.layers = hyper.at("layers").get<int>();
    m.hyper.hidden = hyper.at("hidden").get<int>();
    m.hyper.epsilon = hyper.at("epsilon").get<double>();
    m.hyper.learning_rate = hyper.at("learning_rate").get<double>();
    m.hyper.beta1 = hyper.at("beta1").get<double>();
    m.hyper.beta2 = hyper.at("beta2").get<double>();
    m.hyper.adam_eps = hyper.at("adam_eps").get<double>();
    m.hyper.epochs = hyper.at("epochs").get<int>();
    m.hyper.batch_size = hyper.at("batch_size").get<int>();
    const auto& fc = j.at("feature_config");
    m.feature_config.mode = feature_mode_from_string(fc.at("mode").get<std::string>());
    m.feature_config.degree_vocab = fc.at("degree_vocab").get<std::vector<int>>();
    m.feature_config.random_dim = fc.at("random_dim").get<int>();
    m.readout = readout_from_string(j.at("readout").get<std::string>());
    m.class_count = j.at("class_count").get<int>();
    m.input_dim = j.at("input_dim").get<int>();
    m.trained = j.at("trained").get<bool>();
    m.train_accuracy = j.value("train_accuracy", std::vector<double>{});
    m.test_accuracy = j.value("test_accuracy", std::vector<double>{});
    auto linear_from_json = [](const nlohmann::json& in) {
        LinearLayer l;
        l.w.rows = in.at("rows").get<int>();
        l.w.cols = in.at("cols").get<int>();
        l.w.a = in.at("w").get<std::vector<double>>();
        l.b = in.at("b").get<std::vector<double>>();
        if (l.w.a.size() != static_cast<std::size_t>(l.w.rows) * static_cast<std::size_t>(l.w.cols) ||
            l.b.size() != static_cast<std::size_t>(l.w.rows))
            throw ValidationError("load_model: corrupted weight tensor dimensions");
        for (double x : l.w.a)
            if (!std::isfinite(x)) throw ValidationError("load_model: non-finite weight");
        for (double x : l.b)
            if (!std::isfinite(x)) throw ValidationError("load_model: non-finite bias");
        return l;
    };
    for (const auto& layer : j.at("layers"))
        m.layers.push_back({linear_from_json(layer.at("l1")), linear_from_json(layer.at("l2"))});
    for (const auto& h : j.at("head")) m.head.push_back(linear_from_json(h));
    if (static_cast<int>(m.layers.size()) != m.hyper.layers || m.head.size() != m.layers.size())
        throw ValidationError("load_model: layer count mismatch");
    if (m.input_dim != m.feature_config.input_dim())
        throw ValidationError("load_model: input dim inconsistent with feature config");
    return m;
}

inline void save_model(const GinModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("save_model: cannot open '" + path + "'");
    out << model_to_json(m).dump() << '\n';
    out.flush();
    if (!out) throw ValidationError("save_model: write failed for '" + path + "'");
}

inline GinModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("load_model: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("load_model: malformed JSON in '" + path + "': " + e.what());
    }
    return model_from_json(j);
}

} // namespace ggeval
