#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rnadesign/core.hpp"
#include "rnadesign/rng.hpp"

using namespace rnadesign;

TEST_CASE("nucleotide conversions") {
    CHECK(to_char(Nucleotide::A) == 'A');
    CHECK(to_char(Nucleotide::C) == 'C');
    CHECK(to_char(Nucleotide::G) == 'G');
    CHECK(to_char(Nucleotide::U) == 'U');
    for (char c : {'A', 'C', 'G', 'U'}) CHECK(to_char(nucleotide_from_char(c)) == c);
    CHECK(nucleotide_from_char('a') == Nucleotide::A);
    CHECK(nucleotide_from_char('u') == Nucleotide::U);
    CHECK_THROWS_AS(nucleotide_from_char('T'), IllegalCharacter);
    CHECK_THROWS_AS(nucleotide_from_char('.'), IllegalCharacter);
    for (int i = 0; i < 4; ++i) CHECK(index_of(nucleotide_from_index(i)) == i);
    CHECK_THROWS(nucleotide_from_index(4));
    CHECK_THROWS(nucleotide_from_index(-1));
}

TEST_CASE("sequence parse and round-trip") {
    const Sequence s = Sequence::parse("GACU");
    CHECK(s.length() == 4);
    CHECK(s.str() == "GACU");
    CHECK(Sequence::parse("gacu").str() == "GACU");
    CHECK(Sequence::parse("gacu") == s);
    CHECK_THROWS_AS(Sequence::parse("GAXU"), IllegalCharacter);
}

TEST_CASE("dot-bracket parse populates the pair map") {
    const DotBracket s = DotBracket::parse("((....))");
    CHECK(s.length() == 8);
    CHECK(s.partner(0) == 7);
    CHECK(s.partner(7) == 0);
    CHECK(s.partner(1) == 6);
    CHECK(s.partner(6) == 1);
    for (std::size_t i = 2; i <= 5; ++i) {
        CHECK(!s.paired(i));
        CHECK(s.partner(i) == -1);
    }
    CHECK(s.pair_count() == 2);
    CHECK(s.unpaired_count() == 4);
}

TEST_CASE("dot-bracket parse rejects invalid input") {
    CHECK_THROWS_AS(DotBracket::parse("((."), UnbalancedBrackets);
    CHECK_THROWS_AS(DotBracket::parse("...)"), UnbalancedBrackets);
    CHECK_THROWS_AS(DotBracket::parse(")...("), UnbalancedBrackets);
    CHECK_THROWS_AS(DotBracket::parse("(..)"), HairpinTooShort);
    CHECK_THROWS_AS(DotBracket::parse("(())...."), HairpinTooShort);
    CHECK_THROWS_AS(DotBracket::parse("..x.."), IllegalCharacter);
    CHECK_THROWS_AS(DotBracket::parse("(...]"), IllegalCharacter);
}

TEST_CASE("parse/render round-trip over every structure up to length 10") {
    for (std::size_t n = 1; n <= 10; ++n) {
        for (const auto& text : testoracle::all_structures(n)) {
            const DotBracket s = DotBracket::parse(text);
            CHECK(s.str() == text);
            CHECK(s.length() == n);
        }
    }
}

TEST_CASE("pair map is a nested involution covering exactly the brackets") {
    for (const auto& text : testoracle::all_structures(9)) {
        const DotBracket s = DotBracket::parse(text);
        for (std::size_t i = 0; i < s.length(); ++i) {
            if (s.symbol(i) == '.') {
                CHECK(s.partner(i) == -1);
            } else {
                const int j = s.partner(i);
                REQUIRE(j >= 0);
                CHECK(s.partner(static_cast<std::size_t>(j)) == static_cast<int>(i));
                const std::size_t lo = std::min<std::size_t>(i, j);
                const std::size_t hi = std::max<std::size_t>(i, j);
                CHECK(hi - lo - 1 >= DotBracket::kMinHairpin);
            }
        }
        // agreement with an independent stack matcher
        for (const auto& [i, j] : testoracle::pairs_of(text)) {
            CHECK(s.partner(i) == static_cast<int>(j));
        }
    }
}

TEST_CASE("hamming distance on fixed pairs") {
    const auto d = [](const char* a, const char* b) {
        return hamming(DotBracket::parse(a), DotBracket::parse(b));
    };
    CHECK(d("((...))", "((...))") == 0);
    CHECK(d("(....)", "......") == 2);
    CHECK(d("((....))", "(......)") == 2);
    CHECK_THROWS_AS(hamming(DotBracket::parse("...."), DotBracket::parse(".....")),
                    LengthMismatch);
}

TEST_CASE("hamming is a metric on random structure pairs") {
    const auto& structs = testoracle::all_structures(12);
    Rng rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        const auto& a = structs[rng.next_below(structs.size())];
        const auto& b = structs[rng.next_below(structs.size())];
        const auto& c = structs[rng.next_below(structs.size())];
        const DotBracket da = DotBracket::parse(a);
        const DotBracket db = DotBracket::parse(b);
        const DotBracket dc = DotBracket::parse(c);
        const std::size_t ab = hamming(da, db);
        CHECK(ab == hamming(db, da));
        CHECK((ab == 0) == (a == b));
        CHECK(ab <= hamming(da, dc) + hamming(dc, db));
    }
}

TEST_CASE("normalized loss") {
    const DotBracket a = DotBracket::parse("((....))");
    CHECK(normalized_loss(a, a) == 0.0);
    // two valid structures can differ at every site
    const DotBracket x = DotBracket::parse("...(((...)))");
    const DotBracket y = DotBracket::parse("(((...)))...");
    CHECK(hamming(x, y) == 12);
    CHECK(normalized_loss(x, y) == 1.0);
    // 2 mismatches over length 8
    CHECK(normalized_loss(DotBracket::parse("((....))"), DotBracket::parse("(......)")) ==
          doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(normalized_loss(DotBracket::parse("...."), DotBracket::parse("...")),
                    LengthMismatch);
}

TEST_CASE("derived seed streams decorrelate") {
    CHECK(derive_seed(1, 1) != derive_seed(1, 2));
    CHECK(derive_seed(1, 1) != derive_seed(2, 1));
    CHECK(derive_seed(7, 3, 0) != derive_seed(7, 3, 1));
    CHECK(derive_seed(7, 3, 0) == derive_seed(7, 3, 0));
}

TEST_CASE("rng value mappings stay in range") {
    Rng rng(123);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const auto k = rng.next_below(7);
        CHECK(k < 7);
        const auto v = rng.uniform_int(-3, 3);
        CHECK(v >= -3);
        CHECK(v <= 3);
    }
    // deterministic across instances with the same seed
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng categorical draws follow the weights") {
    Rng rng(7);
    const std::vector<double> w = {1.0, 3.0};  // p = 0.25 / 0.75
    int ones = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) ones += static_cast<int>(rng.categorical(w));
    // 5 sigma around 30000 (sigma ~ 86.6)
    CHECK(ones > 30000 - 433);
    CHECK(ones < 30000 + 433);
}
