#include <gtest/gtest.h>

#include "l2tor/catalog.hpp"
#include "l2tor/wordproblem.hpp"

using namespace l2tor;

TEST(WordProblem, FreeGroupIsExact) {
    const GroupPresentation f("f2", {"a", "b"}, {});
    EXPECT_EQ(oracle_free(f, f.parse_word("a b B A")).value, Verdict::Identity);
    EXPECT_EQ(oracle_free(f, f.parse_word("a b A B")).value, Verdict::NotIdentity);
    EXPECT_THROW(oracle_free(catalog_get("trefoil").presentation, Word{}), std::invalid_argument);
}

TEST(WordProblem, AbelianExponentSums) {
    EXPECT_EQ(oracle_abelian(Word::commutator(Word::generator(0), Word::generator(1)), 2).value, Verdict::Identity);
    EXPECT_EQ(oracle_abelian(Word::generator(1, 2), 2).value, Verdict::NotIdentity);
}

TEST(WordProblem, QuotientWitnessIsCheckable) {
    const auto tre = catalog_get("trefoil").presentation;
    const auto qs = quotient_search(tre, 3, 10);
    const Word w = tre.parse_word("a B");  // a b^-1: nontrivial (a != b in S_3)
    const auto v = oracle_quotients(tre, w, qs);
    ASSERT_EQ(v.value, Verdict::NotIdentity);
    ASSERT_TRUE(v.witness.has_value());
    // the witness is a genuine homomorphism that separates w from 1
    EXPECT_TRUE(v.witness->is_valid_for(tre));
    EXPECT_FALSE(v.witness->image(w).is_identity());
}

TEST(WordProblem, RelatorConsequencesAreIdentity) {
    const auto tre = catalog_get("trefoil").presentation;
    const auto qs = quotient_search(tre, 3, 10);
    const Word r = tre.relators()[0];
    EXPECT_EQ(oracle_quotients(tre, r, qs).value, Verdict::Identity);
    // conjugate of a rotation of r
    const Word u = tre.parse_word("b");
    const auto rot = tre.parse_word("b a B A B a");
    EXPECT_EQ(oracle_quotients(tre, u * rot * u.inverse(), qs).value, Verdict::Identity);
    // product of two relator conjugates
    EXPECT_EQ(oracle_quotients(tre, r * (u * r.inverse() * u.inverse()), qs).value, Verdict::Identity);
}

TEST(WordProblem, InfiniteOrderCertificates) {
    const auto e = catalog_get("borromean");
    const auto& p = e.presentation;
    // phi(b) = -1 != 0
    EXPECT_EQ(has_infinite_order(p, Word::generator(1), e.phi, true).certainty, Certainty::Certain);
    // a has phi(a) = 0 but infinite image in H_1
    const auto a = has_infinite_order(p, Word::generator(0), e.phi, true);
    EXPECT_TRUE(a.value);
    EXPECT_EQ(a.certainty, Certainty::Certain);
    // a nontrivial commutator in a non-torsion-free setting: no certificate
    const auto c = has_infinite_order(p, p.parse_word("a b A B"), e.phi, false);
    EXPECT_FALSE(c.value);
    EXPECT_EQ(c.certainty, Certainty::Unknown);
    EXPECT_THROW(has_infinite_order(p, Word{}, e.phi, true), std::invalid_argument);
}
