#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "rnadesign/core.hpp"

namespace rnadesign {

// Admissible base pairs for the built-in folders: Watson-Crick plus GU wobble.
// The design action space stays Watson-Crick; the folder seeing more pairs is
// what makes the design problem nontrivial.
struct PairRule {
    static bool watson_crick(Nucleotide a, Nucleotide b);
    static bool canonical(Nucleotide a, Nucleotide b);  // WC + GU/UG
};

// Deterministic folding algorithm mapping a sequence to its structure.
// Implementations are stateless after construction; fold() may be called
// concurrently.
class FoldingOracle {
public:
    virtual ~FoldingOracle() = default;
    virtual DotBracket fold(const Sequence& seq) const = 0;
    virtual std::string_view name() const = 0;
};

// Maximizes the number of admissible base pairs subject to nesting and the
// minimum hairpin length, via the O(n^3) interval dynamic program. Ties are
// broken by a deterministic traceback: prefer leaving site i unpaired, then
// the smallest pairing partner k.
class NussinovFolder final : public FoldingOracle {
public:
    DotBracket fold(const Sequence& seq) const override;
    std::string_view name() const override { return "nussinov"; }
};

// Integer pair energies used by StackedFolder: -3 GC/CG, -2 AU/UA, -1 GU/UG.
int pair_energy(Nucleotide a, Nucleotide b);

// Total energy of a structure on a sequence: sum of pair energies plus an
// extra -1 for every stacked pair ((i,j) with (i+1,j-1) also paired).
int stacked_energy(const Sequence& seq, const DotBracket& structure);

// Minimizes stacked_energy over all nested structures; same tie-breaking
// discipline as NussinovFolder. Returns the all-dots structure when no
// structure has negative energy.
class StackedFolder final : public FoldingOracle {
public:
    DotBracket fold(const Sequence& seq) const override;
    std::string_view name() const override { return "stacked"; }
};

// Folder lookup by name: "nussinov" | "stacked".
std::unique_ptr<FoldingOracle> make_oracle(std::string_view name);

}  // namespace rnadesign
