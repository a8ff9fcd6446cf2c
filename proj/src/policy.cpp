#include "rnadesign/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace rnadesign {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'R', 'N', 'A', 'D', 'P', 'O', 'L', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// FNV-1a over a byte stream; used to fingerprint configs.
struct Fnv1a {
    std::uint64_t state = 1469598103934665603ull;
    void feed(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state ^= p[i];
            state *= 1099511628211ull;
        }
    }
    void feed_i64(std::int64_t v) { feed(&v, sizeof v); }
    void feed_f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        feed(&bits, sizeof bits);
    }
};

}  // namespace

void PolicyConfig::validate() const {
    if (state_radius < 0) throw InvalidConfig("state_radius must be >= 0");
    if (input_mode == InputMode::embedding && embedding_dim < 1)
        throw InvalidConfig("embedding_dim must be >= 1");
    if (conv_layers.size() > 2) throw InvalidConfig("at most two conv layers");
    for (const auto& c : conv_layers) {
        if (c.filters < 1) throw InvalidConfig("conv filters must be >= 1");
        if (c.kernel < 1 || c.kernel % 2 == 0)
            throw InvalidConfig("conv kernel must be odd and >= 1");
    }
    if (recurrent_layers.size() > 2) throw InvalidConfig("at most two recurrent layers");
    for (int u : recurrent_layers)
        if (u < 1) throw InvalidConfig("recurrent units must be >= 1");
    if (dense_layers.empty() || dense_layers.size() > 2)
        throw InvalidConfig("dense layer count must be 1 or 2");
    for (int u : dense_layers)
        if (u < 1) throw InvalidConfig("dense units must be >= 1");
    if (!(learning_rate > 0.0)) throw InvalidConfig("learning_rate must be > 0");
    if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
    if (entropy_coeff < 0.0) throw InvalidConfig("entropy_coeff must be >= 0");
    if (!(reward_exponent > 1.0)) throw InvalidConfig("reward_exponent must be > 1");
}

std::uint64_t PolicyConfig::hash() const {
    Fnv1a h;
    h.feed_i64(state_radius);
    h.feed_i64(input_mode == InputMode::embedding ? 1 : 0);
    h.feed_i64(input_mode == InputMode::embedding ? embedding_dim : 0);
    h.feed_i64(static_cast<std::int64_t>(conv_layers.size()));
    for (const auto& c : conv_layers) {
        h.feed_i64(c.filters);
        h.feed_i64(c.kernel);
    }
    h.feed_i64(static_cast<std::int64_t>(recurrent_layers.size()));
    for (int u : recurrent_layers) h.feed_i64(u);
    h.feed_i64(static_cast<std::int64_t>(dense_layers.size()));
    for (int u : dense_layers) h.feed_i64(u);
    h.feed_f64(learning_rate);
    h.feed_i64(batch_size);
    h.feed_f64(entropy_coeff);
    h.feed_f64(reward_exponent);
    return h.state;
}

PolicyConfig PolicyConfig::defaults() { return PolicyConfig{}; }

PolicyEvaluator::PolicyEvaluator(const PolicyConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    layout_.window = cfg_.window_length();
    const bool embed = cfg_.input_mode == InputMode::embedding;
    layout_.has_embedding = embed;
    layout_.in_channels = embed ? cfg_.embedding_dim : 3;

    std::size_t off = 0;
    if (embed) {
        layout_.emb_off = off;
        off += 4 * static_cast<std::size_t>(cfg_.embedding_dim);
    }

    int channels = layout_.in_channels;
    for (const auto& spec : cfg_.conv_layers) {
        ConvBlock b;
        b.filters = spec.filters;
        b.in_ch = channels;
        b.kernel = spec.kernel;
        b.w_off = off;
        off += static_cast<std::size_t>(spec.filters) * channels * spec.kernel;
        b.b_off = off;
        off += static_cast<std::size_t>(spec.filters);
        layout_.convs.push_back(b);
        channels = spec.filters;
    }

    int seq_dim = channels;
    for (int units : cfg_.recurrent_layers) {
        LstmBlock b;
        b.units = units;
        b.in_dim = seq_dim;
        b.wx_off = off;
        off += 4ull * units * seq_dim;
        b.wh_off = off;
        off += 4ull * units * units;
        b.b_off = off;
        off += 4ull * units;
        layout_.lstms.push_back(b);
        seq_dim = units;
    }

    layout_.trunk_dim =
        layout_.lstms.empty() ? layout_.window * channels : layout_.lstms.back().units;

    int in_dim = layout_.trunk_dim;
    for (int units : cfg_.dense_layers) {
        Block b;
        b.rows = units;
        b.cols = in_dim;
        b.w_off = off;
        off += static_cast<std::size_t>(units) * in_dim;
        b.b_off = off;
        off += static_cast<std::size_t>(units);
        layout_.denses.push_back(b);
        in_dim = units;
    }

    layout_.logits.rows = 4;
    layout_.logits.cols = in_dim;
    layout_.logits.w_off = off;
    off += 4ull * in_dim;
    layout_.logits.b_off = off;
    off += 4;
    layout_.policy_count = off;

    layout_.value.rows = 1;
    layout_.value.cols = in_dim;
    layout_.value.w_off = off;
    off += static_cast<std::size_t>(in_dim);
    layout_.value.b_off = off;
    off += 1;
    layout_.total_count = off;
}

void PolicyEvaluator::encode(std::span<const double> params, const StateWindow& state,
                             std::vector<double>& enc) const {
    const int W = layout_.window;
    const int C = layout_.in_channels;
    enc.assign(static_cast<std::size_t>(W) * C, 0.0);
    if (state.size() != static_cast<std::size_t>(W))
        throw ShapeMismatch("state window length does not match the configured radius");
    for (int p = 0; p < W; ++p) {
        const std::uint8_t sym = state[static_cast<std::size_t>(p)];
        if (sym >= kStateSymbolCount) throw ShapeMismatch("state symbol out of range");
        double* row = enc.data() + static_cast<std::size_t>(p) * C;
        if (layout_.has_embedding) {
            const double* emb = params.data() + layout_.emb_off + std::size_t{sym} * C;
            std::copy(emb, emb + C, row);
        } else {
            // channels: unpaired, paired (either bracket), padding
            if (sym == kSymUnpaired) row[0] = 1.0;
            else if (sym == kSymOpen || sym == kSymClose) row[1] = 1.0;
            else row[2] = 1.0;
        }
    }
}

PolicyEvaluator::Output PolicyEvaluator::forward(std::span<const double> params,
                                                 const StateWindow& state) const {
    Cache cache;
    return forward(params, state, cache);
}

PolicyEvaluator::Output PolicyEvaluator::forward(std::span<const double> params,
                                                 const StateWindow& state, Cache& cache) const {
    if (params.size() != layout_.total_count)
        throw ShapeMismatch("parameter vector size does not match the config");
    const int W = layout_.window;

    encode(params, state, cache.enc);
    const std::vector<double>* seq = &cache.enc;
    int seq_dim = layout_.in_channels;

    cache.conv_act.resize(layout_.convs.size());
    for (std::size_t l = 0; l < layout_.convs.size(); ++l) {
        const ConvBlock& b = layout_.convs[l];
        const int pad = (b.kernel - 1) / 2;
        auto& act = cache.conv_act[l];
        act.assign(static_cast<std::size_t>(W) * b.filters, 0.0);
        for (int p = 0; p < W; ++p) {
            for (int f = 0; f < b.filters; ++f) {
                double z = params[b.b_off + static_cast<std::size_t>(f)];
                for (int t = 0; t < b.kernel; ++t) {
                    const int q = p + t - pad;
                    if (q < 0 || q >= W) continue;
                    const double* x = seq->data() + static_cast<std::size_t>(q) * seq_dim;
                    const double* w = params.data() + b.w_off +
                                      (static_cast<std::size_t>(f) * seq_dim) * b.kernel;
                    for (int c = 0; c < seq_dim; ++c)
                        z += w[static_cast<std::size_t>(c) * b.kernel + t] * x[c];
                }
                act[static_cast<std::size_t>(p) * b.filters + f] = std::tanh(z);
            }
        }
        seq = &act;
        seq_dim = b.filters;
    }

    cache.lstm_gates.resize(layout_.lstms.size());
    cache.lstm_cell.resize(layout_.lstms.size());
    cache.lstm_hidden.resize(layout_.lstms.size());
    for (std::size_t l = 0; l < layout_.lstms.size(); ++l) {
        const LstmBlock& b = layout_.lstms[l];
        const int H = b.units;
        auto& gates = cache.lstm_gates[l];
        auto& cell = cache.lstm_cell[l];
        auto& hidden = cache.lstm_hidden[l];
        gates.assign(static_cast<std::size_t>(W) * 4 * H, 0.0);
        cell.assign(static_cast<std::size_t>(W) * H, 0.0);
        hidden.assign(static_cast<std::size_t>(W) * H, 0.0);
        for (int t = 0; t < W; ++t) {
            const double* x = seq->data() + static_cast<std::size_t>(t) * seq_dim;
            const double* h_prev = t > 0 ? hidden.data() + static_cast<std::size_t>(t - 1) * H
                                         : nullptr;
            const double* c_prev = t > 0 ? cell.data() + static_cast<std::size_t>(t - 1) * H
                                         : nullptr;
            double* g = gates.data() + static_cast<std::size_t>(t) * 4 * H;
            for (int r = 0; r < 4 * H; ++r) {
                double z = params[b.b_off + static_cast<std::size_t>(r)];
                const double* wx = params.data() + b.wx_off + static_cast<std::size_t>(r) * seq_dim;
                for (int c = 0; c < seq_dim; ++c) z += wx[c] * x[c];
                if (h_prev) {
                    const double* wh = params.data() + b.wh_off + static_cast<std::size_t>(r) * H;
                    for (int c = 0; c < H; ++c) z += wh[c] * h_prev[c];
                }
                g[r] = z;
            }
            double* ct = cell.data() + static_cast<std::size_t>(t) * H;
            double* ht = hidden.data() + static_cast<std::size_t>(t) * H;
            for (int u = 0; u < H; ++u) {
                const double in = sigmoid(g[u]);
                const double fg = sigmoid(g[H + u]);
                const double cn = std::tanh(g[2 * H + u]);
                const double ou = sigmoid(g[3 * H + u]);
                g[u] = in;
                g[H + u] = fg;
                g[2 * H + u] = cn;
                g[3 * H + u] = ou;
                ct[u] = (c_prev ? fg * c_prev[u] : 0.0) + in * cn;
                ht[u] = ou * std::tanh(ct[u]);
            }
        }
        seq = &hidden;
        seq_dim = H;
    }

    if (layout_.lstms.empty()) {
        cache.trunk = *seq;  // flatten position-major
    } else {
        const int H = layout_.lstms.back().units;
        const auto& hidden = cache.lstm_hidden.back();
        cache.trunk.assign(hidden.end() - H, hidden.end());
    }

    const std::vector<double>* vec = &cache.trunk;
    cache.dense_act.resize(layout_.denses.size());
    for (std::size_t l = 0; l < layout_.denses.size(); ++l) {
        const Block& b = layout_.denses[l];
        auto& act = cache.dense_act[l];
        act.assign(static_cast<std::size_t>(b.rows), 0.0);
        for (int r = 0; r < b.rows; ++r) {
            double z = params[b.b_off + static_cast<std::size_t>(r)];
            const double* w = params.data() + b.w_off + static_cast<std::size_t>(r) * b.cols;
            for (int c = 0; c < b.cols; ++c) z += w[c] * (*vec)[static_cast<std::size_t>(c)];
            act[static_cast<std::size_t>(r)] = std::tanh(z);
        }
        vec = &act;
    }

    Output out;
    for (int r = 0; r < 4; ++r) {
        double z = params[layout_.logits.b_off + static_cast<std::size_t>(r)];
        const double* w = params.data() + layout_.logits.w_off +
                          static_cast<std::size_t>(r) * layout_.logits.cols;
        for (int c = 0; c < layout_.logits.cols; ++c)
            z += w[c] * (*vec)[static_cast<std::size_t>(c)];
        out.logits[static_cast<std::size_t>(r)] = z;
    }
    {
        double z = params[layout_.value.b_off];
        const double* w = params.data() + layout_.value.w_off;
        for (int c = 0; c < layout_.value.cols; ++c)
            z += w[c] * (*vec)[static_cast<std::size_t>(c)];
        out.value = z;
    }
    return out;
}

void PolicyEvaluator::backward(std::span<const double> params, const StateWindow& state,
                               const Cache& cache, const std::array<double, 4>& dlogits,
                               double dvalue, std::span<double> grad) const {
    if (params.size() != layout_.total_count || grad.size() != layout_.total_count)
        throw ShapeMismatch("parameter/gradient vector size does not match the config");
    const int W = layout_.window;

    const std::vector<double>* head_in =
        layout_.denses.empty() ? &cache.trunk : &cache.dense_act.back();

    // logits and value heads
    std::vector<double>& d_in = const_cast<Cache&>(cache).d_a;
    d_in.assign(head_in->size(), 0.0);
    for (int r = 0; r < 4; ++r) {
        const double d = dlogits[static_cast<std::size_t>(r)];
        if (d == 0.0) continue;
        grad[layout_.logits.b_off + static_cast<std::size_t>(r)] += d;
        const std::size_t w0 = layout_.logits.w_off + static_cast<std::size_t>(r) * layout_.logits.cols;
        for (int c = 0; c < layout_.logits.cols; ++c) {
            grad[w0 + static_cast<std::size_t>(c)] += d * (*head_in)[static_cast<std::size_t>(c)];
            d_in[static_cast<std::size_t>(c)] += d * params[w0 + static_cast<std::size_t>(c)];
        }
    }
    if (dvalue != 0.0) {
        grad[layout_.value.b_off] += dvalue;
        for (int c = 0; c < layout_.value.cols; ++c) {
            grad[layout_.value.w_off + static_cast<std::size_t>(c)] +=
                dvalue * (*head_in)[static_cast<std::size_t>(c)];
            d_in[static_cast<std::size_t>(c)] +=
                dvalue * params[layout_.value.w_off + static_cast<std::size_t>(c)];
        }
    }

    // dense stack, top down
    std::vector<double>& d_out = const_cast<Cache&>(cache).d_b;
    for (std::size_t li = layout_.denses.size(); li-- > 0;) {
        const Block& b = layout_.denses[li];
        const std::vector<double>& a = cache.dense_act[li];
        const std::vector<double>& below = li == 0 ? cache.trunk : cache.dense_act[li - 1];
        d_out.assign(below.size(), 0.0);
        for (int r = 0; r < b.rows; ++r) {
            const double ar = a[static_cast<std::size_t>(r)];
            const double dz = d_in[static_cast<std::size_t>(r)] * (1.0 - ar * ar);
            grad[b.b_off + static_cast<std::size_t>(r)] += dz;
            const std::size_t w0 = b.w_off + static_cast<std::size_t>(r) * b.cols;
            for (int c = 0; c < b.cols; ++c) {
                grad[w0 + static_cast<std::size_t>(c)] += dz * below[static_cast<std::size_t>(c)];
                d_out[static_cast<std::size_t>(c)] += dz * params[w0 + static_cast<std::size_t>(c)];
            }
        }
        std::swap(d_in, d_out);
    }
    // d_in now holds d(trunk)

    // sequence gradient flowing down to conv output / encoding
    std::vector<double> d_seq;
    if (layout_.lstms.empty()) {
        d_seq = d_in;  // flattened position-major already
    } else {
        // BPTT through the LSTM stack; only the last hidden state feeds up.
        std::vector<double> d_hidden_seq;  // gradient w.r.t. this layer's hidden sequence
        for (std::size_t li = layout_.lstms.size(); li-- > 0;) {
            const LstmBlock& b = layout_.lstms[li];
            const int H = b.units;
            const int D = b.in_dim;
            const auto& gates = cache.lstm_gates[li];
            const auto& cell = cache.lstm_cell[li];
            const std::vector<double>& below =
                li == 0 ? (layout_.convs.empty() ? cache.enc : cache.conv_act.back())
                        : cache.lstm_hidden[li - 1];

            std::vector<double> d_below(static_cast<std::size_t>(W) * D, 0.0);
            // dh_next/dc_next: gradient arriving from step t+1; dh_prev/dc_prev:
            // gradient we emit toward step t-1. Kept separate to avoid aliasing.
            std::vector<double> dh_next(static_cast<std::size_t>(H), 0.0);
            std::vector<double> dc_next(static_cast<std::size_t>(H), 0.0);
            std::vector<double> dh_prev(static_cast<std::size_t>(H), 0.0);
            std::vector<double> dc_prev(static_cast<std::size_t>(H), 0.0);
            for (int t = W - 1; t >= 0; --t) {
                const double* g = gates.data() + static_cast<std::size_t>(t) * 4 * H;
                const double* ct = cell.data() + static_cast<std::size_t>(t) * H;
                const double* c_prev =
                    t > 0 ? cell.data() + static_cast<std::size_t>(t - 1) * H : nullptr;
                std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
                std::fill(dc_prev.begin(), dc_prev.end(), 0.0);
                for (int u = 0; u < H; ++u) {
                    double dht = dh_next[static_cast<std::size_t>(u)];
                    if (li + 1 == layout_.lstms.size()) {
                        if (t == W - 1) dht += d_in[static_cast<std::size_t>(u)];
                    } else {
                        dht += d_hidden_seq[static_cast<std::size_t>(t) * H + u];
                    }
                    const double in = g[u], fg = g[H + u], cn = g[2 * H + u], ou = g[3 * H + u];
                    const double tc = std::tanh(ct[u]);
                    const double d_ou = dht * tc;
                    const double d_ct =
                        dc_next[static_cast<std::size_t>(u)] + dht * ou * (1.0 - tc * tc);
                    const double d_in_gate = d_ct * cn;
                    const double d_cn = d_ct * in;
                    const double d_fg = c_prev ? d_ct * c_prev[u] : 0.0;
                    if (c_prev) dc_prev[static_cast<std::size_t>(u)] = d_ct * fg;

                    const double dz_i = d_in_gate * in * (1.0 - in);
                    const double dz_f = d_fg * fg * (1.0 - fg);
                    const double dz_g = d_cn * (1.0 - cn * cn);
                    const double dz_o = d_ou * ou * (1.0 - ou);
                    const std::array<std::pair<int, double>, 4> dz{{{u, dz_i},
                                                                   {H + u, dz_f},
                                                                   {2 * H + u, dz_g},
                                                                   {3 * H + u, dz_o}}};
                    const double* x = below.data() + static_cast<std::size_t>(t) * D;
                    const double* h_prev =
                        t > 0 ? cache.lstm_hidden[li].data() + static_cast<std::size_t>(t - 1) * H
                              : nullptr;
                    for (const auto& [r, d] : dz) {
                        if (d == 0.0) continue;
                        grad[b.b_off + static_cast<std::size_t>(r)] += d;
                        const std::size_t wx0 = b.wx_off + static_cast<std::size_t>(r) * D;
                        for (int c = 0; c < D; ++c) {
                            grad[wx0 + static_cast<std::size_t>(c)] += d * x[c];
                            d_below[static_cast<std::size_t>(t) * D + c] +=
                                d * params[wx0 + static_cast<std::size_t>(c)];
                        }
                        if (h_prev) {
                            const std::size_t wh0 = b.wh_off + static_cast<std::size_t>(r) * H;
                            for (int c = 0; c < H; ++c) {
                                grad[wh0 + static_cast<std::size_t>(c)] += d * h_prev[c];
                                dh_prev[static_cast<std::size_t>(c)] +=
                                    d * params[wh0 + static_cast<std::size_t>(c)];
                            }
                        }
                    }
                }
                std::swap(dh_next, dh_prev);
                std::swap(dc_next, dc_prev);
            }
            d_hidden_seq = std::move(d_below);
        }
        d_seq = std::move(d_hidden_seq);
    }

    // conv stack, top down
    for (std::size_t li = layout_.convs.size(); li-- > 0;) {
        const ConvBlock& b = layout_.convs[li];
        const int pad = (b.kernel - 1) / 2;
        const auto& act = cache.conv_act[li];
        const std::vector<double>& below = li == 0 ? cache.enc : cache.conv_act[li - 1];
        std::vector<double> d_below(static_cast<std::size_t>(W) * b.in_ch, 0.0);
        for (int p = 0; p < W; ++p) {
            for (int f = 0; f < b.filters; ++f) {
                const double a = act[static_cast<std::size_t>(p) * b.filters + f];
                const double dz = d_seq[static_cast<std::size_t>(p) * b.filters + f] * (1.0 - a * a);
                if (dz == 0.0) continue;
                grad[b.b_off + static_cast<std::size_t>(f)] += dz;
                for (int t = 0; t < b.kernel; ++t) {
                    const int q = p + t - pad;
                    if (q < 0 || q >= W) continue;
                    const double* x = below.data() + static_cast<std::size_t>(q) * b.in_ch;
                    const std::size_t w0 =
                        b.w_off + (static_cast<std::size_t>(f) * b.in_ch) * b.kernel;
                    for (int c = 0; c < b.in_ch; ++c) {
                        const std::size_t wi = w0 + static_cast<std::size_t>(c) * b.kernel + t;
                        grad[wi] += dz * x[c];
                        d_below[static_cast<std::size_t>(q) * b.in_ch + c] += dz * params[wi];
                    }
                }
            }
        }
        d_seq = std::move(d_below);
    }

    // embedding table
    if (layout_.has_embedding) {
        const int C = layout_.in_channels;
        for (int p = 0; p < W; ++p) {
            const std::uint8_t sym = state[static_cast<std::size_t>(p)];
            for (int c = 0; c < C; ++c)
                grad[layout_.emb_off + std::size_t{sym} * C + c] +=
                    d_seq[static_cast<std::size_t>(p) * C + c];
        }
    }
}

void PolicyEvaluator::init(std::span<double> params, std::uint64_t seed) const {
    if (params.size() != layout_.total_count)
        throw ShapeMismatch("parameter vector size does not match the config");
    std::fill(params.begin(), params.end(), 0.0);
    Rng rng(seed);

    auto glorot = [&](std::size_t off, std::size_t count, int fan_in, int fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (std::size_t i = 0; i < count; ++i) params[off + i] = rng.uniform(-limit, limit);
    };

    if (layout_.has_embedding) {
        const std::size_t n = 4ull * layout_.in_channels;
        for (std::size_t i = 0; i < n; ++i)
            params[layout_.emb_off + i] = rng.uniform(-0.1, 0.1);
    }
    for (const auto& b : layout_.convs) {
        glorot(b.w_off, static_cast<std::size_t>(b.filters) * b.in_ch * b.kernel,
               b.in_ch * b.kernel, b.filters * b.kernel);
        // biases stay zero
    }
    for (const auto& b : layout_.lstms) {
        glorot(b.wx_off, 4ull * b.units * b.in_dim, b.in_dim, 4 * b.units);
        glorot(b.wh_off, 4ull * b.units * b.units, b.units, 4 * b.units);
        // forget-gate biases start at one so early training does not wipe state
        for (int u = 0; u < b.units; ++u)
            params[b.b_off + static_cast<std::size_t>(b.units + u)] = 1.0;
    }
    for (const auto& b : layout_.denses)
        glorot(b.w_off, static_cast<std::size_t>(b.rows) * b.cols, b.cols, b.rows);
    glorot(layout_.logits.w_off, 4ull * layout_.logits.cols, layout_.logits.cols, 4);
    glorot(layout_.value.w_off, static_cast<std::size_t>(layout_.value.cols),
           layout_.value.cols, 1);
}

std::size_t policy_param_count_for(const PolicyConfig& cfg) {
    return PolicyEvaluator(cfg).policy_params();
}

std::size_t total_param_count_for(const PolicyConfig& cfg) {
    return PolicyEvaluator(cfg).total_params();
}

PolicyParams::PolicyParams(PolicyConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), seed_(seed) {}

PolicyParams PolicyParams::build(const PolicyConfig& cfg, std::uint64_t seed) {
    PolicyEvaluator eval(cfg);
    PolicyParams p(cfg, seed);
    p.values_.resize(eval.total_params());
    eval.init(p.values_, seed);
    return p;
}

std::size_t PolicyParams::policy_param_count() const {
    return policy_param_count_for(cfg_);
}

std::size_t PolicyParams::value_param_count() const {
    return values_.size() - policy_param_count();
}

void PolicyParams::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
    out.write(kMagic, sizeof kMagic);
    const std::uint32_t version = kCheckpointVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    const std::uint64_t hash = cfg_.hash();
    out.write(reinterpret_cast<const char*>(&hash), sizeof hash);
    out.write(reinterpret_cast<const char*>(&seed_), sizeof seed_);
    const std::uint64_t count = values_.size();
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    out.write(reinterpret_cast<const char*>(values_.data()),
              static_cast<std::streamsize>(count * sizeof(double)));
    if (!out) throw std::runtime_error("short write to checkpoint: " + path.string());
}

PolicyParams PolicyParams::load(const std::filesystem::path& path, const PolicyConfig& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw ConfigMismatch("not a policy checkpoint: " + path.string());
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    if (!in || version != kCheckpointVersion)
        throw ConfigMismatch("unsupported checkpoint version");
    std::uint64_t hash = 0, seed = 0, count = 0;
    in.read(reinterpret_cast<char*>(&hash), sizeof hash);
    in.read(reinterpret_cast<char*>(&seed), sizeof seed);
    in.read(reinterpret_cast<char*>(&count), sizeof count);
    if (!in) throw ConfigMismatch("truncated checkpoint header");
    if (hash != expected.hash())
        throw ConfigMismatch("checkpoint was written for a different config");
    PolicyEvaluator eval(expected);
    if (count != eval.total_params())
        throw ConfigMismatch("checkpoint parameter count does not match the config");
    PolicyParams p(expected, seed);
    p.values_.resize(count);
    in.read(reinterpret_cast<char*>(p.values_.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw ConfigMismatch("truncated checkpoint payload");
    return p;
}

std::array<double, 4> softmax(const std::array<double, 4>& logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::array<double, 4> p{};
    double z = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        p[i] = std::exp(logits[i] - m);
        z += p[i];
    }
    for (double& v : p) v /= z;
    return p;
}

ActResult act(const PolicyParams& params, const StateWindow& state, ActMode mode, Rng& rng) {
    PolicyEvaluator eval(params.config());
    const auto out = eval.forward(params.values(), state);
    const auto probs = softmax(out.logits);

    int action = 0;
    if (mode == ActMode::greedy) {
        for (int a = 1; a < 4; ++a)
            if (probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(action)])
                action = a;
    } else {
        const double u = rng.next_double();
        double acc = 0.0;
        action = 3;
        for (int a = 0; a < 4; ++a) {
            acc += probs[static_cast<std::size_t>(a)];
            if (u < acc) {
                action = a;
                break;
            }
        }
    }

    ActResult r;
    r.action = action;
    r.log_prob = std::log(std::max(probs[static_cast<std::size_t>(action)], 1e-300));
    r.entropy = 0.0;
    for (double p : probs)
        if (p > 0.0) r.entropy -= p * std::log(p);
    return r;
}

std::vector<std::array<double, 4>> action_distribution(const PolicyParams& params,
                                                       std::span<const StateWindow> states) {
    PolicyEvaluator eval(params.config());
    std::vector<std::array<double, 4>> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(softmax(eval.forward(params.values(), s).logits));
    return out;
}

}  // namespace rnadesign
