#include "rnadesign/folding.hpp"

#include <limits>
#include <vector>

namespace rnadesign {

namespace {

constexpr int kSpan = static_cast<int>(DotBracket::kMinHairpin) + 1;  // min j - i for a pair
constexpr int kInf = std::numeric_limits<int>::max() / 4;

DotBracket structure_from_pairs(std::size_t n, const std::vector<int>& partner) {
    std::string text(n, '.');
    for (std::size_t i = 0; i < n; ++i) {
        if (partner[i] > static_cast<int>(i)) {
            text[i] = '(';
            text[static_cast<std::size_t>(partner[i])] = ')';
        } else if (partner[i] >= 0) {
            text[i] = ')';
        }
    }
    return DotBracket::parse(text);
}

}  // namespace

bool PairRule::watson_crick(Nucleotide a, Nucleotide b) {
    auto is = [&](Nucleotide x, Nucleotide y) {
        return (a == x && b == y) || (a == y && b == x);
    };
    return is(Nucleotide::G, Nucleotide::C) || is(Nucleotide::A, Nucleotide::U);
}

bool PairRule::canonical(Nucleotide a, Nucleotide b) {
    auto is = [&](Nucleotide x, Nucleotide y) {
        return (a == x && b == y) || (a == y && b == x);
    };
    return watson_crick(a, b) || is(Nucleotide::G, Nucleotide::U);
}

int pair_energy(Nucleotide a, Nucleotide b) {
    auto is = [&](Nucleotide x, Nucleotide y) {
        return (a == x && b == y) || (a == y && b == x);
    };
    if (is(Nucleotide::G, Nucleotide::C)) return -3;
    if (is(Nucleotide::A, Nucleotide::U)) return -2;
    if (is(Nucleotide::G, Nucleotide::U)) return -1;
    return 0;  // not an admissible pair
}

int stacked_energy(const Sequence& seq, const DotBracket& structure) {
    int e = 0;
    const std::size_t n = structure.length();
    for (std::size_t i = 0; i < n; ++i) {
        int j = structure.partner(i);
        if (j > static_cast<int>(i)) {
            e += pair_energy(seq.at(i), seq.at(static_cast<std::size_t>(j)));
            // stacked if the enclosed adjacent sites pair with each other
            if (structure.partner(i + 1) == j - 1 && j - 1 > static_cast<int>(i) + 1) e -= 1;
        }
    }
    return e;
}

DotBracket NussinovFolder::fold(const Sequence& seq) const {
    const int n = static_cast<int>(seq.length());
    // best[i][j] = max admissible pairs in [i..j]
    std::vector<std::vector<int>> best(static_cast<std::size_t>(n),
                                       std::vector<int>(static_cast<std::size_t>(n), 0));
    auto score = [&](int i, int j) -> int {
        if (i > j || i < 0 || j >= n) return 0;
        return best[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    };
    auto admissible = [&](int i, int j) {
        return PairRule::canonical(seq.at(static_cast<std::size_t>(i)),
                                   seq.at(static_cast<std::size_t>(j)));
    };

    for (int span = kSpan; span < n; ++span) {
        for (int i = 0; i + span < n; ++i) {
            const int j = i + span;
            int v = score(i + 1, j);
            for (int k = i + kSpan; k <= j; ++k) {
                if (!admissible(i, k)) continue;
                int cand = score(i + 1, k - 1) + 1 + score(k + 1, j);
                if (cand > v) v = cand;
            }
            best[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
        }
    }

    // traceback: prefer unpaired i, then smallest partner k
    std::vector<int> partner(static_cast<std::size_t>(n), -1);
    std::vector<std::pair<int, int>> work;
    if (n > 0) work.emplace_back(0, n - 1);
    while (!work.empty()) {
        auto [i, j] = work.back();
        work.pop_back();
        if (j - i < kSpan) continue;
        const int target = score(i, j);
        if (target == score(i + 1, j)) {
            work.emplace_back(i + 1, j);
            continue;
        }
        for (int k = i + kSpan; k <= j; ++k) {
            if (!admissible(i, k)) continue;
            if (score(i + 1, k - 1) + 1 + score(k + 1, j) == target) {
                partner[static_cast<std::size_t>(i)] = k;
                partner[static_cast<std::size_t>(k)] = i;
                work.emplace_back(i + 1, k - 1);
                work.emplace_back(k + 1, j);
                break;
            }
        }
    }
    return structure_from_pairs(static_cast<std::size_t>(n), partner);
}

DotBracket StackedFolder::fold(const Sequence& seq) const {
    const int n = static_cast<int>(seq.length());
    // paired[i][j] = min energy of [i..j] given (i,j) paired; whole[i][j] = min energy of [i..j]
    std::vector<std::vector<int>> paired(static_cast<std::size_t>(n),
                                         std::vector<int>(static_cast<std::size_t>(n), kInf));
    std::vector<std::vector<int>> whole(static_cast<std::size_t>(n),
                                        std::vector<int>(static_cast<std::size_t>(n), 0));
    auto wh = [&](int i, int j) -> int {
        if (i > j || i < 0 || j >= n) return 0;
        return whole[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    };
    auto pe = [&](int i, int j) {
        return pair_energy(seq.at(static_cast<std::size_t>(i)), seq.at(static_cast<std::size_t>(j)));
    };
    auto admissible = [&](int i, int j) {
        return PairRule::canonical(seq.at(static_cast<std::size_t>(i)),
                                   seq.at(static_cast<std::size_t>(j)));
    };

    // interior of an enclosing pair (a-1, b+1): region [a..b], with the -1
    // stacking bonus when the region's outermost decision pairs (a,b)
    auto interior = [&](int a, int b) -> int {
        if (b - a < kSpan) return 0;
        int v = wh(a + 1, b);  // a unpaired
        for (int k = a + kSpan; k <= b; ++k) {
            if (!admissible(a, k)) continue;
            int base = paired[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)];
            if (base >= kInf) continue;
            int cand = base + wh(k + 1, b) - (k == b ? 1 : 0);
            if (cand < v) v = cand;
        }
        return v;
    };

    for (int span = kSpan; span < n; ++span) {
        for (int i = 0; i + span < n; ++i) {
            const int j = i + span;
            if (admissible(i, j)) {
                paired[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    pe(i, j) + interior(i + 1, j - 1);
            }
            int v = wh(i + 1, j);
            for (int k = i + kSpan; k <= j; ++k) {
                if (!admissible(i, k)) continue;
                int base = paired[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                if (base >= kInf) continue;
                int cand = base + wh(k + 1, j);
                if (cand < v) v = cand;
            }
            whole[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
        }
    }

    // traceback; frames carry whether the region sits directly inside a pair
    // (then pairing the region's ends earns the stacking bonus)
    std::vector<int> partner(static_cast<std::size_t>(n), -1);
    struct Frame {
        int i, j;
        bool inside_pair;
    };
    std::vector<Frame> work;
    if (n > 0) work.push_back({0, n - 1, false});
    while (!work.empty()) {
        Frame f = work.back();
        work.pop_back();
        if (f.j - f.i < kSpan) continue;
        const int target = f.inside_pair ? interior(f.i, f.j)
                                         : wh(f.i, f.j);
        if (wh(f.i + 1, f.j) == target) {
            work.push_back({f.i + 1, f.j, false});
            continue;
        }
        for (int k = f.i + kSpan; k <= f.j; ++k) {
            if (!admissible(f.i, k)) continue;
            int base = paired[static_cast<std::size_t>(f.i)][static_cast<std::size_t>(k)];
            if (base >= kInf) continue;
            int bonus = (f.inside_pair && k == f.j) ? 1 : 0;
            if (base + wh(k + 1, f.j) - bonus == target) {
                partner[static_cast<std::size_t>(f.i)] = k;
                partner[static_cast<std::size_t>(k)] = f.i;
                work.push_back({f.i + 1, k - 1, true});
                work.push_back({k + 1, f.j, false});
                break;
            }
        }
    }
    return structure_from_pairs(static_cast<std::size_t>(n), partner);
}

std::unique_ptr<FoldingOracle> make_oracle(std::string_view name) {
    if (name == "nussinov") return std::make_unique<NussinovFolder>();
    if (name == "stacked") return std::make_unique<StackedFolder>();
    throw std::invalid_argument("unknown folder '" + std::string(name) +
                                "' (expected nussinov or stacked)");
}

}  // namespace rnadesign
