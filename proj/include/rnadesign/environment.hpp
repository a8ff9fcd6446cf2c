#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rnadesign/core.hpp"
#include "rnadesign/folding.hpp"

namespace rnadesign {

class EpisodeFinished : public std::logic_error {
public:
    explicit EpisodeFinished(const std::string& what) : std::logic_error(what) {}
};

// Terminal reward shaping and local improvement settings.
struct RewardConfig {
    double alpha = 2.0;      // reward exponent, > 1
    std::size_t xi = 5;      // LIS distance cutoff
    bool lis_enabled = true;

    void validate() const;
};

// State window symbol codes. The state alphabet has exactly four symbols:
// the three dot-bracket characters plus padding.
inline constexpr std::uint8_t kSymUnpaired = 0;
inline constexpr std::uint8_t kSymOpen = 1;
inline constexpr std::uint8_t kSymClose = 2;
inline constexpr std::uint8_t kSymPad = 3;
inline constexpr int kStateSymbolCount = 4;

// A (2*kappa+1)-symbol window centered on the current decision site.
using StateWindow = std::vector<std::uint8_t>;

// Nucleotide placed at an unpaired site for action index 0..3.
Nucleotide dot_action_nucleotide(int action);
// (opening-site, closing-site) Watson-Crick pair for action index 0..3.
std::array<Nucleotide, 2> pair_action_nucleotides(int action);

// Result of the exhaustive local improvement step.
struct LisResult {
    std::size_t distance = 0;           // minimum Hamming distance found
    std::uint64_t candidates_tried = 0; // folds performed (4^delta unless early exit)
    // candidate achieving the minimum, set only on strict improvement
    std::optional<Sequence> best_sequence;
};

// Enumerates all 4^delta nucleotide assignments at the delta mismatched
// structure positions, refolding each candidate. Returns 0 immediately on the
// first exact solve, otherwise the minimum distance observed. delta must be
// hamming(fold(phi), omega) and positive.
LisResult local_improvement(const Sequence& phi, const DotBracket& omega, std::size_t delta,
                            const FoldingOracle& oracle);

// Everything the environment knows at episode end.
struct TerminalOutcome {
    double reward = 0.0;
    std::size_t distance = 0;  // post-LIS Hamming distance
    Sequence built;            // the sequence the agent assembled
    Sequence solution;         // built, or the LIS-repaired sequence on strict improvement
    bool solved = false;
    std::uint64_t lis_candidates = 0;
};

TerminalOutcome terminal_outcome(const Sequence& phi, const DotBracket& omega,
                                 const RewardConfig& cfg, const FoldingOracle& oracle);

// (1 - delta/|omega|)^alpha after the optional local improvement step.
double terminal_reward(const Sequence& phi, const DotBracket& omega, const RewardConfig& cfg,
                       const FoldingOracle& oracle);

// The undiscounted sequential design process for one target structure.
// Decision sites are all sites except closing brackets, visited left to
// right; at opening brackets the action places both partners at once. A
// single instance serves one episode at a time; independent instances may
// run concurrently.
class DesignEnv {
public:
    DesignEnv(DotBracket target, std::size_t state_radius, RewardConfig reward_cfg,
              const FoldingOracle& oracle);

    StateWindow reset();

    struct StepResult {
        std::optional<StateWindow> state;  // empty once terminal
        double reward = 0.0;
        bool done = false;
        std::optional<TerminalOutcome> outcome;
    };
    StepResult step(int action);

    std::size_t horizon() const { return decision_sites_.size(); }  // T
    std::size_t cursor() const { return cursor_; }
    std::size_t state_radius() const { return state_radius_; }
    const DotBracket& target() const { return target_; }
    const RewardConfig& reward_config() const { return reward_cfg_; }

private:
    StateWindow window_at(std::size_t site) const;

    DotBracket target_;
    std::size_t state_radius_;
    RewardConfig reward_cfg_;
    const FoldingOracle* oracle_;
    std::vector<std::size_t> decision_sites_;
    std::vector<int> partial_;  // nucleotide index per site, -1 unset
    std::size_t cursor_ = 0;
    bool terminal_ = false;
};

}  // namespace rnadesign
