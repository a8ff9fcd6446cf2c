#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rnadesign/folding.hpp"
#include "rnadesign/trainer.hpp"

namespace rnadesign {

class InsufficientYield : public std::runtime_error {
public:
    explicit InsufficientYield(const std::string& what) : std::runtime_error(what) {}
};

class UnknownSolver : public std::runtime_error {
public:
    explicit UnknownSolver(const std::string& what) : std::runtime_error(what) {}
};

// Sub-stream indices for derive_seed in dataset generation. Benchmark cells
// use derive_seed(master, target_index, run) directly.
namespace bench_stream {
inline constexpr std::uint64_t kGenerate = 1;
inline constexpr std::uint64_t kFilter = 2;
}  // namespace bench_stream

// ---------------------------------------------------------------------------
// Benchmark specs
// ---------------------------------------------------------------------------

struct BenchmarkSpec {
    std::string name;
    double timeout_s = 60.0;   // per target
    int evaluation_runs = 1;
    std::vector<DotBracket> targets;

    void validate() const;  // throws InvalidConfig
};

// Timeout/run-count shells for the published benchmark shapes plus
// desk-scale variants; the caller supplies the targets.
BenchmarkSpec benchmark_preset(std::string_view name);  // throws UnknownSolver

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct RunRecord {
    std::string benchmark;
    std::string solver;
    std::size_t target_index = 0;
    std::string target;
    int run = 0;
    std::uint64_t seed = 0;
    bool solved = false;
    double solve_time_s = -1.0;  // < 0 when unsolved
    std::size_t best_distance = 0;
    std::string best_sequence;
    std::uint64_t episodes = 0;
    std::uint64_t restarts = 0;
    double elapsed_s = 0.0;
};

struct EvalReport {
    std::string benchmark;
    std::string solver;
    double timeout_s = 0.0;
    int evaluation_runs = 0;
    std::size_t target_count = 0;
    std::vector<RunRecord> records;
};

// Aggregates, recomputable from the raw records.
// counts[k-1] = number of targets solved in at least k of the runs.
std::vector<std::size_t> solved_in_at_least(const EvalReport& report);
// number of (target, run) cells solved with solve time <= t, per time point.
std::vector<std::size_t> solved_by_time(const EvalReport& report, std::span<const double> times);
// Rendered text tables: per-target details, solved-in->=k, solved-by-time.
std::string report_tables(const EvalReport& report);

// Line-delimited JSON record I/O.
void write_records(std::ostream& out, const EvalReport& report);
EvalReport read_records(std::istream& in);

// ---------------------------------------------------------------------------
// Dataset generation
// ---------------------------------------------------------------------------

struct DatasetConfig {
    std::size_t count_train = 500;
    std::size_t count_val = 50;
    std::size_t count_test = 50;
    std::size_t min_length = 20;
    std::size_t max_length = 100;
    double filter_budget_s = 2.0;  // hill-climb filter per structure; 0 = no filter
    std::uint64_t seed = 0;
    std::size_t max_attempts = 0;  // 0 = derived from the requested counts

    void validate() const;  // throws InvalidConfig
};

struct Dataset {
    std::vector<DotBracket> train, val, test;
};

// Folds random sequences, drops structures sampled more than once (multiple
// known solutions), keeps only structures the hill-climb baseline cannot
// solve within filter_budget_s, and splits disjointly.
Dataset make_dataset(const DatasetConfig& cfg, const FoldingOracle& oracle);

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

// Uniform sequence sampling respecting Watson-Crick pairing at paired sites.
DesignResult baseline_random(const DotBracket& target, const FoldingOracle& oracle,
                             double timeout_s, std::uint64_t seed, std::uint64_t max_samples = 0);

// Stochastic hill climbing: mutate one unpaired site or one pair, accept iff
// the Hamming distance does not increase, random restart after 50*|target|
// non-improving steps.
DesignResult baseline_hillclimb(const DotBracket& target, const FoldingOracle& oracle,
                                double timeout_s, std::uint64_t seed,
                                std::uint64_t max_steps = 0);

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

struct SolverSpec {
    std::string name;           // learna | meta | meta-adapt | random | hillclimb
    PolicyConfig policy;        // learna
    TrainLoopConfig loop;       // restart/LIS/PPO toggles; budget comes from the spec
    const PolicyParams* checkpoint = nullptr;  // meta strategies
};

// Runs every (target, run) cell with a per-cell derived seed and the spec's
// per-target timeout.
EvalReport run_benchmark(const BenchmarkSpec& spec, const SolverSpec& solver,
                         const FoldingOracle& oracle, std::uint64_t seed);

}  // namespace rnadesign
