#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rnadesign/environment.hpp"
#include "rnadesign/folding.hpp"
#include "rnadesign/policy.hpp"

namespace rnadesign {

// Sub-stream indices used with derive_seed(master, stream[, index]); every
// random decision in a training run is reproducible from the master seed
// alone. kParams index 0 builds the initial parameters; index k seeds the
// k-th restart.
namespace seed_stream {
inline constexpr std::uint64_t kParams = 1;
inline constexpr std::uint64_t kActions = 2;
inline constexpr std::uint64_t kTargets = 3;
inline constexpr std::uint64_t kWorker = 4;
}  // namespace seed_stream

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

class Adam {
public:
    Adam(std::size_t dim, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
         double epsilon = 1e-8);

    void step(std::span<double> params, std::span<const double> grad);
    void reset();  // clears moments and the step counter

    double learning_rate() const { return lr_; }
    std::uint64_t steps_taken() const { return t_; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::vector<double> m_, v_;
    std::uint64_t t_ = 0;
};

// ---------------------------------------------------------------------------
// Episodes and PPO
// ---------------------------------------------------------------------------

struct EpisodeStep {
    StateWindow state;
    int action = 0;
    double log_prob = 0.0;  // behavior log-probability at collection time
};

struct Episode {
    std::size_t target_id = 0;
    std::vector<EpisodeStep> steps;
    double terminal_reward = 0.0;
    std::size_t distance = 0;  // post-LIS
    bool solved = false;
    double duration_s = 0.0;
};

struct PpoConfig {
    double clip_epsilon = 0.2;
    int epochs_per_batch = 4;
    double value_coeff = 0.5;

    void validate() const;  // throws InvalidConfig
};

// Flattened batch with frozen returns/advantages (the baseline predictions
// used for the advantages are taken before any gradient step).
struct PpoBatch {
    std::vector<StateWindow> states;
    std::vector<int> actions;
    std::vector<double> old_log_probs;
    std::vector<double> returns;     // terminal reward, broadcast to every step
    std::vector<double> advantages;  // return - baseline prediction

    std::size_t size() const { return states.size(); }
};

PpoBatch make_ppo_batch(const PolicyEvaluator& eval, std::span<const double> params,
                        std::span<const Episode> episodes);

// Mean loss the optimizer minimizes: -(clipped surrogate) - entropy_coeff *
// entropy + value_coeff * squared baseline error.
double ppo_loss(const PolicyEvaluator& eval, std::span<const double> params, const PpoBatch& batch,
                const PpoConfig& cfg, double entropy_coeff);

struct PpoStats {
    double total_loss = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double mean_ratio = 0.0;
    std::size_t step_count = 0;
};

// Accumulates the gradient of ppo_loss into grad (grad is zeroed first).
PpoStats ppo_loss_grad(const PolicyEvaluator& eval, std::span<const double> params,
                       const PpoBatch& batch, const PpoConfig& cfg, double entropy_coeff,
                       std::span<double> grad);

// One PPO update: freeze returns/advantages, then run cfg.epochs_per_batch
// full-batch gradient steps through the optimizer. Stats are from the final
// epoch.
PpoStats ppo_update(const PolicyEvaluator& eval, std::span<double> params,
                    std::span<const Episode> episodes, const PpoConfig& cfg, double entropy_coeff,
                    Adam& opt);

// ---------------------------------------------------------------------------
// Training loop configuration
// ---------------------------------------------------------------------------

enum class Strategy { learna, meta_learna, meta_learna_adapt };

std::string to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);  // throws InvalidConfig

struct TrainLoopConfig {
    Strategy strategy = Strategy::learna;
    double restart_period_s = 0.0;  // <= 0 disables restarts
    PpoConfig ppo;
    int worker_count = 1;           // must be 1 for strategy learna
    double time_budget_s = 60.0;
    std::uint64_t max_episodes = 0;  // 0 = no episode cap (budget only)
    bool lis_enabled = true;
    std::size_t lis_xi = 5;
    bool stop_on_solve = true;
    std::uint64_t seed = 0;

    void validate() const;  // throws InvalidConfig
};

// Per-update progress record, also the line format for emitted stats.
struct TrainStats {
    double time_s = 0.0;
    std::uint64_t episodes = 0;
    double mean_reward = 0.0;
    std::size_t best_distance = std::numeric_limits<std::size_t>::max();
    std::uint64_t restarts = 0;
};

using StatsSink = std::function<void(const TrainStats&)>;

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

struct RestartEvent {
    double time_s = 0.0;
    std::uint64_t episode = 0;
    std::uint64_t seed = 0;  // params after the restart equal build(cfg, seed)
};

struct DesignResult {
    std::string target;
    bool solved = false;
    std::size_t best_distance = std::numeric_limits<std::size_t>::max();
    std::string best_sequence;
    double best_reward = 0.0;
    double time_to_best_s = 0.0;
    double time_to_solve_s = -1.0;  // < 0 when unsolved
    std::uint64_t episodes = 0;
    std::uint64_t env_steps = 0;
    std::uint64_t updates = 0;
    std::uint64_t lis_candidates = 0;
    std::uint64_t distance_sum = 0;  // summed per-episode post-LIS distances
    std::vector<RestartEvent> restarts;
    double elapsed_s = 0.0;
};

// Fresh policy trained online on the single target; restarts reinitialize the
// parameters and every optimizer/batch internal from a recorded seed.
DesignResult run_learna(const DotBracket& target, const PolicyConfig& policy_cfg,
                        const TrainLoopConfig& cfg, const FoldingOracle& oracle,
                        const StatsSink& sink = {});

struct MetaTrainResult {
    PolicyParams params;
    std::uint64_t episodes = 0;
    std::uint64_t updates = 0;
    std::uint64_t episodes_produced = 0;  // == episodes_consumed (audit)
    std::uint64_t episodes_consumed = 0;
    double elapsed_s = 0.0;
};

// Multi-task PPO across the training set. worker_count == 1 runs a
// deterministic sequential loop; otherwise workers roll out episodes on
// parameter snapshots and a single learner applies the updates.
MetaTrainResult run_meta_train(std::span<const DotBracket> train_targets,
                               const PolicyConfig& policy_cfg, const TrainLoopConfig& cfg,
                               const FoldingOracle& oracle, const StatsSink& sink = {});

// adapt=false: parameters frozen, sample until solved/budget. adapt=true:
// continue PPO updates from the meta-trained parameters; a restart reverts to
// those parameters and resets the optimizer.
DesignResult run_meta_apply(const PolicyParams& params, const DotBracket& target,
                            const TrainLoopConfig& cfg, const FoldingOracle& oracle,
                            bool adapt, const StatsSink& sink = {});

// Uniform-random action policy in the same episode harness (control arm for
// first-sample comparisons).
DesignResult run_uniform_policy(const DotBracket& target, const TrainLoopConfig& cfg,
                                const FoldingOracle& oracle, double reward_exponent = 2.0);

}  // namespace rnadesign
