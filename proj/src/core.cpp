#include "rnadesign/core.hpp"

#include <cctype>
#include <utility>

namespace rnadesign {

char to_char(Nucleotide n) {
    switch (n) {
        case Nucleotide::A: return 'A';
        case Nucleotide::C: return 'C';
        case Nucleotide::G: return 'G';
        case Nucleotide::U: return 'U';
    }
    return '?';
}

Nucleotide nucleotide_from_char(char c) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
        case 'A': return Nucleotide::A;
        case 'C': return Nucleotide::C;
        case 'G': return Nucleotide::G;
        case 'U': return Nucleotide::U;
    }
    throw IllegalCharacter(std::string("illegal nucleotide character '") + c + "'");
}

Nucleotide nucleotide_from_index(int i) {
    if (i < 0 || i >= kNucleotideCount) {
        throw std::out_of_range("nucleotide index out of range");
    }
    return static_cast<Nucleotide>(i);
}

Sequence Sequence::parse(std::string_view text) {
    if (text.empty()) throw IllegalCharacter("empty sequence");
    std::vector<Nucleotide> nts;
    nts.reserve(text.size());
    for (char c : text) nts.push_back(nucleotide_from_char(c));
    return Sequence(std::move(nts));
}

Sequence::Sequence(std::vector<Nucleotide> nts) : nts_(std::move(nts)) {
    if (nts_.empty()) throw IllegalCharacter("empty sequence");
}

std::string Sequence::str() const {
    std::string out;
    out.reserve(nts_.size());
    for (Nucleotide n : nts_) out.push_back(to_char(n));
    return out;
}

DotBracket DotBracket::parse(std::string_view text) {
    if (text.empty()) throw IllegalCharacter("empty structure");
    std::vector<int> pair(text.size(), -1);
    std::vector<int> stack;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') continue;
        if (c == '(') {
            stack.push_back(static_cast<int>(i));
        } else if (c == ')') {
            if (stack.empty()) {
                throw UnbalancedBrackets("unmatched ')' at site " + std::to_string(i));
            }
            int open = stack.back();
            stack.pop_back();
            std::size_t enclosed = i - static_cast<std::size_t>(open) - 1;
            if (enclosed < kMinHairpin) {
                throw HairpinTooShort("pair (" + std::to_string(open) + ", " + std::to_string(i) +
                                      ") encloses " + std::to_string(enclosed) +
                                      " sites; minimum is " + std::to_string(kMinHairpin));
            }
            pair[static_cast<std::size_t>(open)] = static_cast<int>(i);
            pair[i] = open;
            ++pairs;
        } else {
            throw IllegalCharacter(std::string("illegal structure character '") + c + "' at site " +
                                   std::to_string(i));
        }
    }
    if (!stack.empty()) {
        throw UnbalancedBrackets("unclosed '(' at site " + std::to_string(stack.back()));
    }
    return DotBracket(std::string(text), std::move(pair), pairs);
}

std::size_t hamming(const DotBracket& a, const DotBracket& b) {
    if (a.length() != b.length()) {
        throw LengthMismatch("hamming: lengths " + std::to_string(a.length()) + " vs " +
                             std::to_string(b.length()));
    }
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.length(); ++i) {
        if (a.symbol(i) != b.symbol(i)) ++d;
    }
    return d;
}

double normalized_loss(const DotBracket& folded, const DotBracket& target) {
    return static_cast<double>(hamming(folded, target)) / static_cast<double>(target.length());
}

}  // namespace rnadesign
