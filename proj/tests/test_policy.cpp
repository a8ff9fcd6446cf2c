#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rnadesign/policy.hpp"
#include "rnadesign/rng.hpp"

using namespace rnadesign;

namespace {

// Parameter count recomputed from the topology alone, independent of the
// library's layout bookkeeping.
std::size_t count_params(const PolicyConfig& cfg, bool include_value_head) {
    const std::size_t w = static_cast<std::size_t>(cfg.window_length());
    std::size_t total = 0;
    std::size_t channels = cfg.input_mode == InputMode::binary
                               ? 3
                               : static_cast<std::size_t>(cfg.embedding_dim);
    if (cfg.input_mode == InputMode::embedding)
        total += 4 * static_cast<std::size_t>(cfg.embedding_dim);
    for (const auto& c : cfg.conv_layers) {
        total += static_cast<std::size_t>(c.filters) * channels *
                     static_cast<std::size_t>(c.kernel) +
                 static_cast<std::size_t>(c.filters);
        channels = static_cast<std::size_t>(c.filters);
    }
    std::size_t feature_dim = w * channels;
    std::size_t in_dim = channels;  // per-position input to the first LSTM
    for (int units : cfg.recurrent_layers) {
        const std::size_t h = static_cast<std::size_t>(units);
        total += 4 * h * (in_dim + h + 1);
        in_dim = h;
        feature_dim = h;  // trunk becomes the last hidden state
    }
    std::size_t dim = feature_dim;
    for (int units : cfg.dense_layers) {
        const std::size_t u = static_cast<std::size_t>(units);
        total += u * dim + u;
        dim = u;
    }
    total += 4 * dim + 4;                       // logits head
    if (include_value_head) total += dim + 1;   // shared-trunk baseline head
    return total;
}

PolicyConfig random_config(Rng& rng) {
    PolicyConfig cfg;
    cfg.state_radius = static_cast<int>(rng.next_below(4));
    cfg.input_mode = rng.bernoulli(0.5) ? InputMode::binary : InputMode::embedding;
    cfg.embedding_dim = 1 + static_cast<int>(rng.next_below(4));
    const auto convs = rng.next_below(3);
    for (std::size_t i = 0; i < convs; ++i) {
        ConvSpec c;
        c.filters = 1 + static_cast<int>(rng.next_below(4));
        c.kernel = rng.bernoulli(0.5) ? 3 : 5;
        cfg.conv_layers.push_back(c);
    }
    const auto lstms = rng.next_below(3);
    for (std::size_t i = 0; i < lstms; ++i)
        cfg.recurrent_layers.push_back(1 + static_cast<int>(rng.next_below(5)));
    cfg.dense_layers.clear();
    const auto denses = 1 + rng.next_below(2);
    for (std::size_t i = 0; i < denses; ++i)
        cfg.dense_layers.push_back(2 + static_cast<int>(rng.next_below(5)));
    return cfg;
}

StateWindow random_state(Rng& rng, std::size_t len) {
    StateWindow s(len);
    for (auto& v : s) v = static_cast<std::uint8_t>(rng.next_below(4));
    return s;
}

// Zero every weight and pin the policy logits to `bias` via the logits-head
// bias entries (the last four parameters before the value head).
PolicyParams params_with_logit_bias(const PolicyConfig& cfg, const std::array<double, 4>& bias) {
    PolicyParams params = PolicyParams::build(cfg, 0);
    auto vals = params.values();
    std::fill(vals.begin(), vals.end(), 0.0);
    const std::size_t pc = params.policy_param_count();
    for (std::size_t k = 0; k < 4; ++k) vals[pc - 4 + k] = bias[k];
    return params;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(PolicyConfig::defaults().validate());
    PolicyConfig cfg;
    cfg.state_radius = -1;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = PolicyConfig{};
    cfg.input_mode = InputMode::embedding;
    cfg.embedding_dim = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = PolicyConfig{};
    cfg.conv_layers = {ConvSpec{2, 4}};  // even kernel
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = PolicyConfig{};
    cfg.conv_layers = {ConvSpec{}, ConvSpec{}, ConvSpec{}};
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = PolicyConfig{};
    cfg.dense_layers = {};
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = PolicyConfig{};
    cfg.reward_exponent = 1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = PolicyConfig{};
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = PolicyConfig{};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
}

TEST_CASE("config hash distinguishes configs and ignores nothing") {
    const PolicyConfig a = PolicyConfig::defaults();
    PolicyConfig b = a;
    CHECK(a.hash() == b.hash());
    b.dense_layers = {33};
    CHECK(a.hash() != b.hash());
    b = a;
    b.learning_rate *= 2;
    CHECK(a.hash() != b.hash());
}

TEST_CASE("build is deterministic in (config, seed)") {
    Rng rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        const PolicyConfig cfg = random_config(rng);
        const PolicyParams p1 = PolicyParams::build(cfg, 42);
        const PolicyParams p2 = PolicyParams::build(cfg, 42);
        const PolicyParams p3 = PolicyParams::build(cfg, 43);
        REQUIRE(p1.param_count() == p2.param_count());
        CHECK(std::equal(p1.values().begin(), p1.values().end(), p2.values().begin()));
        CHECK(!std::equal(p1.values().begin(), p1.values().end(), p3.values().begin()));
    }
}

TEST_CASE("hand-counted parameter totals") {
    // binary input, radius 2 (window 5), no conv, no recurrent, one dense
    // layer of u units: (3*5)*u + u + u*4 + 4 policy parameters
    for (int u : {8, 32}) {
        PolicyConfig cfg;
        cfg.state_radius = 2;
        cfg.input_mode = InputMode::binary;
        cfg.conv_layers.clear();
        cfg.recurrent_layers.clear();
        cfg.dense_layers = {u};
        const std::size_t expected_policy = static_cast<std::size_t>(15 * u + u + 4 * u + 4);
        CHECK(policy_param_count_for(cfg) == expected_policy);
        CHECK(total_param_count_for(cfg) == expected_policy + static_cast<std::size_t>(u) + 1);
        const PolicyParams p = PolicyParams::build(cfg, 7);
        CHECK(p.param_count() == total_param_count_for(cfg));
        CHECK(p.policy_param_count() == expected_policy);
    }
    // embedding table contributes 4*d entries
    PolicyConfig emb;
    emb.input_mode = InputMode::embedding;
    emb.embedding_dim = 6;
    PolicyConfig bin = emb;
    bin.input_mode = InputMode::binary;
    const std::size_t d = 6, w = static_cast<std::size_t>(emb.window_length());
    const std::size_t first_dense_in_diff = (d - 3) * w * static_cast<std::size_t>(emb.dense_layers[0]);
    CHECK(total_param_count_for(emb) == total_param_count_for(bin) + 4 * d + first_dense_in_diff);
}

TEST_CASE("parameter count formula matches direct enumeration on random configs") {
    Rng rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        const PolicyConfig cfg = random_config(rng);
        CAPTURE(trial);
        const PolicyParams p = PolicyParams::build(cfg, 5);
        CHECK(p.param_count() == count_params(cfg, true));
        CHECK(p.policy_param_count() == count_params(cfg, false));
        CHECK(policy_param_count_for(cfg) == count_params(cfg, false));
        CHECK(total_param_count_for(cfg) == count_params(cfg, true));
    }
}

TEST_CASE("zero parameters give the uniform distribution") {
    PolicyConfig cfg;
    cfg.state_radius = 1;
    PolicyParams params = PolicyParams::build(cfg, 3);
    std::fill(params.values().begin(), params.values().end(), 0.0);
    Rng rng(5);
    const StateWindow state{kSymOpen, kSymUnpaired, kSymPad};
    const ActResult res = act(params, state, ActMode::sample, rng);
    CHECK(res.log_prob == doctest::Approx(std::log(0.25)).epsilon(1e-12));
    CHECK(res.entropy == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    const auto dist = action_distribution(params, std::vector<StateWindow>{state});
    for (double p : dist[0]) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("greedy takes the argmax with lowest-index tie-break") {
    PolicyConfig cfg;
    cfg.state_radius = 1;
    const StateWindow state{kSymPad, kSymOpen, kSymClose};
    Rng rng(1);
    {
        const PolicyParams params = params_with_logit_bias(cfg, {2.0, 0.0, 0.0, 0.0});
        const PolicyEvaluator eval(cfg);
        const auto out = eval.forward(params.values(), state);
        CHECK(out.logits == std::array<double, 4>{2.0, 0.0, 0.0, 0.0});
        CHECK(act(params, state, ActMode::greedy, rng).action == 0);
    }
    {
        const PolicyParams params = params_with_logit_bias(cfg, {0.0, 1.0, 1.0, 0.0});
        CHECK(act(params, state, ActMode::greedy, rng).action == 1);  // tie -> lowest index
    }
}

TEST_CASE("sampling follows the stated distribution") {
    PolicyConfig cfg;
    cfg.state_radius = 0;
    const PolicyParams params = params_with_logit_bias(
        cfg, {std::log(0.7), std::log(0.1), std::log(0.1), std::log(0.1)});
    const StateWindow state{kSymUnpaired};
    Rng rng(20240817);
    std::array<int, 4> counts{0, 0, 0, 0};
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[act(params, state, ActMode::sample, rng).action];
    // 3 sigma binomial bounds
    CHECK(counts[0] > 70000 - 435);
    CHECK(counts[0] < 70000 + 435);
    for (int k = 1; k < 4; ++k) {
        CHECK(counts[k] > 10000 - 285);
        CHECK(counts[k] < 10000 + 285);
    }
}

TEST_CASE("action distribution batches match single-state forwards") {
    Rng rng(12);
    const PolicyConfig cfg = random_config(rng);
    const PolicyParams params = PolicyParams::build(cfg, 9);
    const std::size_t w = static_cast<std::size_t>(cfg.window_length());
    std::vector<StateWindow> batch;
    for (int i = 0; i < 6; ++i) batch.push_back(random_state(rng, w));

    const auto dist = action_distribution(params, batch);
    REQUIRE(dist.size() == batch.size());
    const PolicyEvaluator eval(cfg);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        double sum = 0.0;
        for (double p : dist[i]) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
        const auto expect = softmax(eval.forward(params.values(), batch[i]).logits);
        for (int k = 0; k < 4; ++k) CHECK(dist[i][k] == doctest::Approx(expect[k]).epsilon(1e-12));
    }
    // permuting rows permutes outputs
    std::vector<StateWindow> reversed(batch.rbegin(), batch.rend());
    const auto rdist = action_distribution(params, reversed);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        CHECK(rdist[i] == dist[batch.size() - 1 - i]);
    }
}

TEST_CASE("softmax is shift-invariant and normalized") {
    const std::array<double, 4> l{0.3, -1.2, 2.0, 0.0};
    const auto p = softmax(l);
    double sum = 0.0;
    for (double v : p) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    std::array<double, 4> shifted;
    for (int i = 0; i < 4; ++i) shifted[i] = l[i] + 100.0;
    const auto q = softmax(shifted);
    for (int i = 0; i < 4; ++i) CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-12));
    const auto u = softmax({0.0, 0.0, 0.0, 0.0});
    for (double v : u) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("act rejects mismatched windows") {
    const PolicyConfig cfg;  // radius 4 -> window 9
    const PolicyParams params = PolicyParams::build(cfg, 3);
    Rng rng(2);
    CHECK_THROWS_AS(act(params, StateWindow{kSymPad, kSymPad}, ActMode::sample, rng),
                    ShapeMismatch);
}

TEST_CASE("backward matches finite differences through every layer type") {
    Rng rng(4242);
    std::vector<PolicyConfig> configs;
    {
        PolicyConfig c;  // dense only, binary
        c.state_radius = 1;
        c.input_mode = InputMode::binary;
        c.dense_layers = {5};
        configs.push_back(c);
    }
    {
        PolicyConfig c;  // embedding + conv
        c.state_radius = 2;
        c.input_mode = InputMode::embedding;
        c.embedding_dim = 3;
        c.conv_layers = {ConvSpec{3, 3}};
        c.dense_layers = {4};
        configs.push_back(c);
    }
    {
        PolicyConfig c;  // embedding + lstm
        c.state_radius = 1;
        c.input_mode = InputMode::embedding;
        c.embedding_dim = 2;
        c.recurrent_layers = {4};
        c.dense_layers = {4};
        configs.push_back(c);
    }
    {
        PolicyConfig c;  // the full stack, two of each
        c.state_radius = 2;
        c.input_mode = InputMode::binary;
        c.conv_layers = {ConvSpec{2, 3}, ConvSpec{3, 5}};
        c.recurrent_layers = {3, 4};
        c.dense_layers = {4, 3};
        configs.push_back(c);
    }

    for (const auto& cfg : configs) {
        CAPTURE(cfg.conv_layers.size());
        CAPTURE(cfg.recurrent_layers.size());
        const PolicyEvaluator eval(cfg);
        const PolicyParams built = PolicyParams::build(cfg, 31);
        std::vector<double> x(built.values().begin(), built.values().end());
        const StateWindow state = random_state(rng, static_cast<std::size_t>(cfg.window_length()));

        // random linear functional of the network outputs
        std::array<double, 4> wl{};
        for (auto& v : wl) v = rng.uniform(-1.0, 1.0);
        const double wv = rng.uniform(-1.0, 1.0);

        const auto f = [&](const std::vector<double>& p) {
            const auto out = eval.forward(p, state);
            double s = out.value * wv;
            for (int k = 0; k < 4; ++k) s += wl[k] * out.logits[k];
            return s;
        };

        PolicyEvaluator::Cache cache;
        eval.forward(x, state, cache);
        std::vector<double> analytic(x.size(), 0.0);
        eval.backward(x, state, cache, wl, wv, analytic);
        const std::vector<double> numeric = testoracle::fd_gradient(f, x, 1e-5);
        const double agree = testoracle::gradient_agreement(analytic, numeric, 1e-4);
        CHECK(agree >= 0.95);
    }
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "rnadesign_policy_test.ckpt";
    Rng rng(64);
    const PolicyConfig cfg = random_config(rng);
    const PolicyParams params = PolicyParams::build(cfg, 1234);
    params.save(path);

    const PolicyParams loaded = PolicyParams::load(path, cfg);
    REQUIRE(loaded.param_count() == params.param_count());
    CHECK(std::equal(params.values().begin(), params.values().end(), loaded.values().begin()));
    CHECK(loaded.seed() == params.seed());
    CHECK(loaded.config() == cfg);

    // identical forwards after the round trip
    const PolicyEvaluator eval(cfg);
    const StateWindow state = random_state(rng, static_cast<std::size_t>(cfg.window_length()));
    const auto a = eval.forward(params.values(), state);
    const auto b = eval.forward(loaded.values(), state);
    CHECK(a.logits == b.logits);
    CHECK(a.value == b.value);

    // loading against a different config is refused
    PolicyConfig other = cfg;
    other.dense_layers[0] += 1;
    CHECK_THROWS_AS(PolicyParams::load(path, other), ConfigMismatch);

    // garbage is refused
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << "not a checkpoint at all";
    }
    CHECK_THROWS_AS(PolicyParams::load(path, cfg), ConfigMismatch);
    fs::remove(path);
}

TEST_CASE("evaluator init equals a fresh build") {
    // Restarts reinitialize parameters in place through PolicyEvaluator::init;
    // the result must be indistinguishable from building from scratch with
    // the same seed.
    Rng rng(99);
    for (int trial = 0; trial < 3; ++trial) {
        const PolicyConfig cfg = random_config(rng);
        const PolicyEvaluator eval(cfg);
        for (std::uint64_t seed : {7ull, 1234567ull}) {
            const PolicyParams built = PolicyParams::build(cfg, seed);
            std::vector<double> buf(eval.total_params(), -1.0);
            eval.init(buf, seed);
            CHECK(std::equal(buf.begin(), buf.end(), built.values().begin()));
        }
    }
}
