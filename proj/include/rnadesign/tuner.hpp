#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rnadesign/folding.hpp"
#include "rnadesign/policy.hpp"
#include "rnadesign/rng.hpp"
#include "rnadesign/trainer.hpp"

namespace rnadesign {

class InvalidLadder : public std::runtime_error {
public:
    explicit InvalidLadder(const std::string& what) : std::runtime_error(what) {}
};

// Sub-stream indices for derive_seed within a tuning run. kEval index i
// seeds the i-th config evaluation.
namespace tune_stream {
inline constexpr std::uint64_t kSampler = 1;
inline constexpr std::uint64_t kEval = 2;
}  // namespace tune_stream

// ---------------------------------------------------------------------------
// Search space
// ---------------------------------------------------------------------------

enum class ParamType { integer, real, categorical };
enum class Prior { linear, log_uniform };

// One tunable dimension. A parameter may be conditional on a parent taking
// one of a set of values (rendered as strings); conditional parameters are
// only sampled/assigned when active.
struct ParamDescriptor {
    std::string name;
    ParamType type = ParamType::real;
    double lo = 0.0, hi = 0.0;          // integer/real bounds, inclusive
    Prior prior = Prior::linear;        // real parameters only
    std::vector<std::string> choices;   // categorical only
    std::string condition_parent;       // empty = always active
    std::vector<std::string> condition_values;
};

// A concrete point: numeric values plus categorical choices. Inactive
// conditional parameters are absent.
struct Assignment {
    std::map<std::string, double> nums;
    std::map<std::string, std::string> cats;

    bool has(const std::string& name) const {
        return nums.count(name) > 0 || cats.count(name) > 0;
    }
};

class SearchSpace {
public:
    void add(ParamDescriptor d);  // throws InvalidConfig; parents must precede children
    const std::vector<ParamDescriptor>& params() const { return params_; }
    std::size_t dimension() const { return params_.size(); }
    const ParamDescriptor& descriptor(const std::string& name) const;

    bool is_active(const ParamDescriptor& d, const Assignment& a) const;
    Assignment sample_uniform(Rng& rng) const;
    void check(const Assignment& a) const;  // bounds + conditionality; throws InvalidConfig

    // The 14-dimensional joint architecture + hyperparameter space.
    static SearchSpace default_space();

private:
    std::vector<ParamDescriptor> params_;
};

// Maps a point of default_space() onto a runnable PolicyConfig.
PolicyConfig to_policy_config(const Assignment& a);

// ---------------------------------------------------------------------------
// Budgets and objectives
// ---------------------------------------------------------------------------

// Geometric ladder of evaluation budgets (seconds), factor 3 between rungs.
struct BudgetLadder {
    std::vector<double> rung_budgets_s;

    static BudgetLadder geometric(double base_s, int rungs);
    void validate() const;  // throws InvalidLadder
};

enum class TuneObjective { unsolved_count, sum_mean_distance, sum_min_distance };

std::string to_string(TuneObjective o);
TuneObjective objective_from_string(std::string_view name);

// Aggregated result of evaluating one config on a validation set. Distances
// are normalized by target length. unsolved/sum_min are recorded regardless
// of the active objective so the final re-ranking can use them.
struct EvalOutcome {
    double loss = 0.0;
    std::size_t solved_count = 0;
    std::size_t unsolved_count = 0;
    double sum_min_distance = 0.0;
    double sum_mean_distance = 0.0;
};

struct EvaluateOptions {
    Strategy strategy = Strategy::learna;
    TuneObjective objective = TuneObjective::sum_min_distance;
    double restart_period_s = 0.0;          // 0 = reinit every budget interval is disabled
    bool lis_enabled = true;
    std::size_t lis_xi = 5;
    std::span<const DotBracket> train_targets;  // meta strategies only
    double apply_timeout_s = 10.0;              // per-target, meta strategies only
};

// Runs the configured strategy on every validation target under the budget
// (per-target timeout for learna, total meta-train time for meta) and
// aggregates per the objective.
EvalOutcome evaluate_config(const PolicyConfig& cfg, std::span<const DotBracket> validation,
                            double budget_s, const FoldingOracle& oracle, std::uint64_t seed,
                            const EvaluateOptions& opts);

// ---------------------------------------------------------------------------
// Sampler
// ---------------------------------------------------------------------------

// Model-based proposer: univariate kernel densities fitted to the best third
// of the observations at the deepest rung with enough data (>= dimension+2),
// mixed with a uniform-exploration fraction. Falls back to uniform sampling
// until the model activates.
class KdeSampler {
public:
    KdeSampler(const SearchSpace& space, std::uint64_t seed, double uniform_fraction = 0.10);

    void observe(int rung, const Assignment& a, double loss);
    Assignment propose();
    bool model_active() const;

private:
    struct Obs {
        Assignment a;
        double loss;
    };
    const std::vector<Obs>* model_rung() const;
    Assignment sample_model(const std::vector<Obs>& obs);

    const SearchSpace& space_;
    Rng rng_;
    double uniform_fraction_;
    std::map<int, std::vector<Obs>> by_rung_;
};

// ---------------------------------------------------------------------------
// Hyperband-style successive halving
// ---------------------------------------------------------------------------

struct TuneObservation {
    std::size_t config_id = 0;
    int rung = 0;
    double budget_s = 0.0;
    double loss = 0.0;
    std::size_t solved_count = 0;
    std::size_t unsolved_count = 0;
    double sum_min_distance = 0.0;
    double sum_mean_distance = 0.0;
};

struct RankedConfig {
    std::size_t config_id = 0;
    Assignment assignment;
    int deepest_rung = 0;
    double loss = 0.0;        // loss at the deepest rung reached
    EvalOutcome outcome;      // validation records at that rung
};

struct HyperbandResult {
    std::vector<RankedConfig> ranked;       // deepest rung first, then loss ascending
    std::vector<TuneObservation> history;
};

struct HyperbandOptions {
    int eta = 3;
    std::size_t initial_configs = 9;     // n at the bottom rung of each bracket
    std::size_t brackets = 1;
    std::size_t max_evaluations = 0;     // 0 = unlimited; stops starting new evals
    std::uint64_t seed = 0;
    double uniform_fraction = 0.10;
};

using TuneEvalFn =
    std::function<EvalOutcome(const Assignment&, double budget_s, std::uint64_t seed)>;

// Successive-halving brackets over the ladder: floor(n/eta^k) configs survive
// to rung k; new configs come from the sampler. Ranked output merges all
// brackets.
HyperbandResult run_hyperband(const SearchSpace& space, const BudgetLadder& ladder,
                              const HyperbandOptions& opts, const TuneEvalFn& eval);

// Re-ranks the top five by unsolved count (ties: sum of min distances, then
// original rank) and returns the winner.
const RankedConfig& select_final(std::span<const RankedConfig> ranked);

}  // namespace rnadesign
