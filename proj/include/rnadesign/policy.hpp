#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rnadesign/environment.hpp"
#include "rnadesign/rng.hpp"

namespace rnadesign {

class InvalidConfig : public std::runtime_error {
public:
    explicit InvalidConfig(const std::string& what) : std::runtime_error(what) {}
};

class ShapeMismatch : public std::runtime_error {
public:
    explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

class ConfigMismatch : public std::runtime_error {
public:
    explicit ConfigMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct ConvSpec {
    int filters = 1;
    int kernel = 3;  // odd

    bool operator==(const ConvSpec&) const = default;
};

enum class InputMode { binary, embedding };

// One point in the joint architecture + hyperparameter space: the state
// window radius, the input encoding, an optional CNN (up to two layers), an
// optional LSTM stack (up to two layers), one or two dense layers, and the
// training/environment hyperparameters tuned jointly with them.
struct PolicyConfig {
    int state_radius = 4;
    InputMode input_mode = InputMode::embedding;
    int embedding_dim = 4;               // used iff input_mode == embedding
    std::vector<ConvSpec> conv_layers;   // 0..2 entries
    std::vector<int> recurrent_layers;   // 0..2 entries of LSTM units
    std::vector<int> dense_layers{32};   // 1..2 entries of units
    double learning_rate = 1e-3;
    int batch_size = 32;                 // episodes per update
    double entropy_coeff = 3e-3;
    double reward_exponent = 2.0;        // alpha

    int window_length() const { return 2 * state_radius + 1; }
    void validate() const;  // throws InvalidConfig
    std::uint64_t hash() const;

    static PolicyConfig defaults();

    bool operator==(const PolicyConfig&) const = default;
};

// Knows the flat parameter layout for a config and runs the network.
// Stateless; one instance may serve concurrent forward calls.
class PolicyEvaluator {
public:
    explicit PolicyEvaluator(const PolicyConfig& cfg);

    const PolicyConfig& config() const { return cfg_; }
    std::size_t window_length() const { return static_cast<std::size_t>(layout_.window); }
    std::size_t total_params() const { return layout_.total_count; }
    std::size_t policy_params() const { return layout_.policy_count; }
    std::size_t value_params() const { return layout_.total_count - layout_.policy_count; }

    struct Output {
        std::array<double, 4> logits{};
        double value = 0.0;
    };

    // Per-layer activations kept for backpropagation. Reusable across calls.
    struct Cache {
        std::vector<double> enc;                       // window x in_channels
        std::vector<std::vector<double>> conv_act;     // per conv layer, window x filters
        std::vector<std::vector<double>> lstm_gates;   // per lstm layer, window x 4H (post-nonlin)
        std::vector<std::vector<double>> lstm_cell;    // per lstm layer, window x H
        std::vector<std::vector<double>> lstm_hidden;  // per lstm layer, window x H
        std::vector<double> trunk;                     // flattened features or last hidden
        std::vector<std::vector<double>> dense_act;    // per dense layer

        // scratch used by backward
        std::vector<double> d_a, d_b;
    };

    Output forward(std::span<const double> params, const StateWindow& state) const;
    Output forward(std::span<const double> params, const StateWindow& state, Cache& cache) const;

    // Accumulates d(loss)/d(params) into grad given upstream gradients at the
    // logits and the value head. cache must come from the matching forward.
    void backward(std::span<const double> params, const StateWindow& state, const Cache& cache,
                  const std::array<double, 4>& dlogits, double dvalue,
                  std::span<double> grad) const;

    // Deterministic initialization; fills params in declaration order.
    void init(std::span<double> params, std::uint64_t seed) const;

private:
    struct Block {
        std::size_t w_off = 0, b_off = 0;
        int rows = 0, cols = 0;  // weight matrix shape rows x cols
    };
    struct ConvBlock {
        std::size_t w_off = 0, b_off = 0;
        int filters = 0, in_ch = 0, kernel = 0;
    };
    struct LstmBlock {
        std::size_t wx_off = 0, wh_off = 0, b_off = 0;
        int units = 0, in_dim = 0;
    };
    struct Layout {
        int window = 0;
        int in_channels = 0;
        bool has_embedding = false;
        std::size_t emb_off = 0;
        std::vector<ConvBlock> convs;
        std::vector<LstmBlock> lstms;
        int trunk_dim = 0;
        std::vector<Block> denses;
        Block logits;
        Block value;
        std::size_t policy_count = 0;
        std::size_t total_count = 0;
    };

    void encode(std::span<const double> params, const StateWindow& state,
                std::vector<double>& enc) const;

    PolicyConfig cfg_;
    Layout layout_;
};

// Trainable weights plus their provenance. Serialization round-trips
// bit-exactly; the checkpoint header carries a config hash so a checkpoint
// can only be loaded against the config that built it.
class PolicyParams {
public:
    static PolicyParams build(const PolicyConfig& cfg, std::uint64_t seed);

    const PolicyConfig& config() const { return cfg_; }
    std::uint64_t seed() const { return seed_; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    std::size_t param_count() const { return values_.size(); }   // includes baseline head
    std::size_t policy_param_count() const;                      // through the logits head
    std::size_t value_param_count() const;

    void save(const std::filesystem::path& path) const;
    static PolicyParams load(const std::filesystem::path& path, const PolicyConfig& expected);

private:
    PolicyParams(PolicyConfig cfg, std::uint64_t seed);

    PolicyConfig cfg_;
    std::uint64_t seed_ = 0;
    std::vector<double> values_;
};

// Number of parameters build() will allocate for a config (policy head only,
// excluding the shared-trunk baseline head).
std::size_t policy_param_count_for(const PolicyConfig& cfg);
std::size_t total_param_count_for(const PolicyConfig& cfg);

enum class ActMode { sample, greedy };

struct ActResult {
    int action = 0;
    double log_prob = 0.0;
    double entropy = 0.0;
};

// Forward pass to a 4-way categorical; sample draws from it, greedy takes the
// argmax with lowest-index tie-break.
ActResult act(const PolicyParams& params, const StateWindow& state, ActMode mode, Rng& rng);

// Row-wise action probabilities for a batch of equal-length windows.
std::vector<std::array<double, 4>> action_distribution(const PolicyParams& params,
                                                       std::span<const StateWindow> states);

std::array<double, 4> softmax(const std::array<double, 4>& logits);

}  // namespace rnadesign
