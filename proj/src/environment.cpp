#include "rnadesign/environment.hpp"

#include <cmath>
#include <utility>

namespace rnadesign {

void RewardConfig::validate() const {
    if (!(alpha > 1.0)) {
        throw std::invalid_argument("RewardConfig: alpha must be > 1");
    }
}

Nucleotide dot_action_nucleotide(int action) {
    static constexpr std::array<Nucleotide, 4> kMap = {Nucleotide::A, Nucleotide::C, Nucleotide::G,
                                                       Nucleotide::U};
    return kMap.at(static_cast<std::size_t>(action));
}

std::array<Nucleotide, 2> pair_action_nucleotides(int action) {
    static constexpr std::array<std::array<Nucleotide, 2>, 4> kMap = {{
        {Nucleotide::G, Nucleotide::C},
        {Nucleotide::C, Nucleotide::G},
        {Nucleotide::A, Nucleotide::U},
        {Nucleotide::U, Nucleotide::A},
    }};
    return kMap.at(static_cast<std::size_t>(action));
}

LisResult local_improvement(const Sequence& phi, const DotBracket& omega, std::size_t delta,
                            const FoldingOracle& oracle) {
    if (delta == 0) throw std::invalid_argument("local_improvement: delta must be positive");
    if (delta > 12) throw std::invalid_argument("local_improvement: delta too large to enumerate");

    DotBracket folded = oracle.fold(phi);
    std::vector<std::size_t> mismatched;
    mismatched.reserve(delta);
    for (std::size_t p = 0; p < omega.length(); ++p) {
        if (folded.symbol(p) != omega.symbol(p)) mismatched.push_back(p);
    }
    if (mismatched.size() != delta) {
        throw std::invalid_argument("local_improvement: delta does not match the mismatch count");
    }

    LisResult result;
    result.distance = delta;

    std::vector<Nucleotide> work = phi.nucleotides();
    std::vector<int> combo(delta, 0);
    const std::uint64_t total = std::uint64_t{1} << (2 * delta);  // 4^delta
    std::optional<Sequence> best;
    for (std::uint64_t c = 0; c < total; ++c) {
        std::uint64_t rest = c;
        for (std::size_t d = 0; d < delta; ++d) {
            combo[delta - 1 - d] = static_cast<int>(rest & 3);  // last site fastest
            rest >>= 2;
        }
        for (std::size_t d = 0; d < delta; ++d) {
            work[mismatched[d]] = nucleotide_from_index(combo[d]);
        }
        Sequence candidate(work);
        std::size_t dist = hamming(oracle.fold(candidate), omega);
        ++result.candidates_tried;
        if (dist < result.distance) {
            result.distance = dist;
            best = std::move(candidate);
            if (dist == 0) break;  // first exact solve
        }
    }
    result.best_sequence = std::move(best);
    return result;
}

TerminalOutcome terminal_outcome(const Sequence& phi, const DotBracket& omega,
                                 const RewardConfig& cfg, const FoldingOracle& oracle) {
    if (phi.length() != omega.length()) {
        throw LengthMismatch("terminal_outcome: sequence length " + std::to_string(phi.length()) +
                             " vs target length " + std::to_string(omega.length()));
    }
    TerminalOutcome out{.reward = 0.0,
                        .distance = 0,
                        .built = phi,
                        .solution = phi,
                        .solved = false,
                        .lis_candidates = 0};
    std::size_t delta = hamming(oracle.fold(phi), omega);
    if (delta == 0) {
        out.reward = 1.0;
        out.solved = true;
        return out;
    }
    if (cfg.lis_enabled && delta < cfg.xi) {
        LisResult lis = local_improvement(phi, omega, delta, oracle);
        delta = lis.distance;
        out.lis_candidates = lis.candidates_tried;
        if (lis.best_sequence) out.solution = *std::move(lis.best_sequence);
    }
    out.distance = delta;
    out.solved = (delta == 0);
    const double loss = static_cast<double>(delta) / static_cast<double>(omega.length());
    out.reward = std::pow(1.0 - loss, cfg.alpha);
    return out;
}

double terminal_reward(const Sequence& phi, const DotBracket& omega, const RewardConfig& cfg,
                       const FoldingOracle& oracle) {
    return terminal_outcome(phi, omega, cfg, oracle).reward;
}

DesignEnv::DesignEnv(DotBracket target, std::size_t state_radius, RewardConfig reward_cfg,
                     const FoldingOracle& oracle)
    : target_(std::move(target)),
      state_radius_(state_radius),
      reward_cfg_(reward_cfg),
      oracle_(&oracle) {
    reward_cfg_.validate();
    for (std::size_t i = 0; i < target_.length(); ++i) {
        if (target_.symbol(i) != ')') decision_sites_.push_back(i);
    }
    partial_.assign(target_.length(), -1);
}

StateWindow DesignEnv::window_at(std::size_t site) const {
    const int radius = static_cast<int>(state_radius_);
    const int n = static_cast<int>(target_.length());
    StateWindow window;
    window.reserve(2 * state_radius_ + 1);
    for (int off = -radius; off <= radius; ++off) {
        const int idx = static_cast<int>(site) + off;
        if (idx < 0 || idx >= n) {
            window.push_back(kSymPad);
        } else {
            switch (target_.symbol(static_cast<std::size_t>(idx))) {
                case '.': window.push_back(kSymUnpaired); break;
                case '(': window.push_back(kSymOpen); break;
                default: window.push_back(kSymClose); break;
            }
        }
    }
    return window;
}

StateWindow DesignEnv::reset() {
    partial_.assign(target_.length(), -1);
    cursor_ = 0;
    terminal_ = false;
    return window_at(decision_sites_[0]);
}

DesignEnv::StepResult DesignEnv::step(int action) {
    if (terminal_ || cursor_ >= horizon()) {
        throw EpisodeFinished("step called after the terminal time step");
    }
    if (action < 0 || action >= 4) {
        throw std::out_of_range("action index must be in [0, 4)");
    }
    const std::size_t site = decision_sites_[cursor_];
    if (target_.symbol(site) == '.') {
        partial_[site] = index_of(dot_action_nucleotide(action));
    } else {
        const auto pair = pair_action_nucleotides(action);
        partial_[site] = index_of(pair[0]);
        partial_[static_cast<std::size_t>(target_.partner(site))] = index_of(pair[1]);
    }
    ++cursor_;

    StepResult result;
    if (cursor_ == horizon()) {
        terminal_ = true;
        std::vector<Nucleotide> nts;
        nts.reserve(partial_.size());
        for (int v : partial_) nts.push_back(nucleotide_from_index(v));
        result.outcome = terminal_outcome(Sequence(std::move(nts)), target_, reward_cfg_, *oracle_);
        result.reward = result.outcome->reward;
        result.done = true;
    } else {
        result.state = window_at(decision_sites_[cursor_]);
    }
    return result;
}

}  // namespace rnadesign
