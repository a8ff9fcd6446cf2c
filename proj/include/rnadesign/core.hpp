#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rnadesign {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class UnbalancedBrackets : public std::runtime_error {
public:
    explicit UnbalancedBrackets(const std::string& what) : std::runtime_error(what) {}
};

class IllegalCharacter : public std::runtime_error {
public:
    explicit IllegalCharacter(const std::string& what) : std::runtime_error(what) {}
};

class HairpinTooShort : public std::runtime_error {
public:
    explicit HairpinTooShort(const std::string& what) : std::runtime_error(what) {}
};

class LengthMismatch : public std::runtime_error {
public:
    explicit LengthMismatch(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Nucleotides and sequences
// ---------------------------------------------------------------------------

enum class Nucleotide : std::uint8_t { A = 0, C = 1, G = 2, U = 3 };

inline constexpr int kNucleotideCount = 4;

char to_char(Nucleotide n);
Nucleotide nucleotide_from_char(char c);          // case-insensitive; throws IllegalCharacter
Nucleotide nucleotide_from_index(int i);          // throws on i outside {0,1,2,3}
inline int index_of(Nucleotide n) { return static_cast<int>(n); }

// A candidate primary sequence over {A,G,C,U}. Immutable after construction.
class Sequence {
public:
    Sequence() = default;
    static Sequence parse(std::string_view text);  // case-insensitive
    explicit Sequence(std::vector<Nucleotide> nts);

    std::size_t length() const { return nts_.size(); }
    Nucleotide at(std::size_t i) const { return nts_[i]; }
    const std::vector<Nucleotide>& nucleotides() const { return nts_; }
    std::string str() const;

    bool operator==(const Sequence& other) const = default;

private:
    std::vector<Nucleotide> nts_;
};

// ---------------------------------------------------------------------------
// Dot-bracket secondary structures
// ---------------------------------------------------------------------------

// Validated secondary structure. Brackets are balanced and properly nested,
// every pair encloses at least kMinHairpin sites, and the pair map is an
// involution. Pseudoknots are unrepresentable: a single bracket type cannot
// express crossing pairs. Immutable after construction.
class DotBracket {
public:
    static constexpr std::size_t kMinHairpin = 3;

    static DotBracket parse(std::string_view text);

    std::size_t length() const { return text_.size(); }
    const std::string& str() const { return text_; }
    char symbol(std::size_t i) const { return text_[i]; }

    bool paired(std::size_t i) const { return pair_[i] >= 0; }
    // partner site for '(' and ')' positions, -1 for '.'
    int partner(std::size_t i) const { return pair_[i]; }
    const std::vector<int>& pair_map() const { return pair_; }

    std::size_t pair_count() const { return pair_count_; }
    std::size_t unpaired_count() const { return text_.size() - 2 * pair_count_; }

    bool operator==(const DotBracket& other) const { return text_ == other.text_; }

private:
    DotBracket(std::string text, std::vector<int> pair, std::size_t pairs)
        : text_(std::move(text)), pair_(std::move(pair)), pair_count_(pairs) {}

    std::string text_;
    std::vector<int> pair_;
    std::size_t pair_count_ = 0;
};

inline DotBracket parse_dot_bracket(std::string_view text) { return DotBracket::parse(text); }

// Number of positions where the two structure strings differ.
std::size_t hamming(const DotBracket& a, const DotBracket& b);

// hamming(folded, target) / length, in [0, 1]
double normalized_loss(const DotBracket& folded, const DotBracket& target);

}  // namespace rnadesign
