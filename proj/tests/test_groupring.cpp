#include <gtest/gtest.h>

#include "l2tor/catalog.hpp"
#include "l2tor/groupring.hpp"
#include "oracles.hpp"

using namespace l2tor;

namespace {

ExactElement g(const GroupPresentation& p, const std::string& w, std::int64_t c = 1) {
    return ExactElement::monomial(Rational(c), p.parse_word(w));
}

// Fox derivative by the product rule applied letter by letter from the right:
// d(u x)/dg = du/dg + u dx/dg, with dg/dg = 1 and d(g^-1)/dg = -g^-1.
ExactElement fox_reference(const Word& r, std::uint32_t i) {
    const auto syl = r.syllables();
    ExactElement d;
    for (std::size_t k = 0; k < syl.size(); ++k) {
        if (syl[k].gen != i) continue;
        const Word u = Word::reduce(std::vector<Letter>(syl.begin(), syl.begin() + static_cast<std::ptrdiff_t>(k)));
        if (syl[k].exp > 0) d += ExactElement::group(u);
        else d -= ExactElement::group(u * Word::generator(i, -1));
    }
    return d;
}

std::vector<double> alexander(const GroupPresentation& p) {
    return oracle::normalized(oracle::abelianize(fox_derivative(p.relators()[0], 0), {1, 1}));
}

}  // namespace

TEST(GroupRing, FoxMatchesProductRule) {
    for (const auto& name : catalog_names()) {
        const auto e = catalog_get(name);
        if (!e.meta.has_presentation) continue;
        for (const auto& r : e.presentation.relators())
            for (std::uint32_t j = 0; j < e.presentation.generator_count(); ++j)
                EXPECT_EQ(fox_derivative(r, j), fox_reference(r, j)) << name;
    }
}

TEST(GroupRing, FoxFundamentalIdentity) {
    for (const auto& name : catalog_names()) {
        const auto e = catalog_get(name);
        if (!e.meta.has_presentation) continue;
        for (const auto& r : e.presentation.relators())
            EXPECT_TRUE(fox_identity_residual(r, e.presentation.generator_count()).is_zero()) << name;
    }
}

TEST(GroupRing, AlexanderPolynomials) {
    EXPECT_EQ(alexander(catalog_get("trefoil").presentation), (std::vector<double>{1, -1, 1}));
    EXPECT_EQ(alexander(catalog_get("figure8").presentation), (std::vector<double>{1, -3, 1}));
    const auto k52 = load_presentation(std::string(L2TOR_SOURCE_DIR) + "/samples/knot_5_2.pres");
    ASSERT_TRUE(k52.phi);
    EXPECT_TRUE(validate_class(k52.presentation, *k52.phi));
    EXPECT_EQ(alexander(k52.presentation), (std::vector<double>{2, -3, 2}));
}

TEST(GroupRing, RingAxioms) {
    const auto p = catalog_get("borromean").presentation;
    const auto x = g(p, "a") - g(p, "b C", 2) + ExactElement::scalar(Rational(3));
    const auto y = g(p, "c a") + g(p, "A", -1);
    const auto z = g(p, "b") - ExactElement::one();
    EXPECT_EQ((x * y) * z, x * (y * z));
    EXPECT_EQ(x * (y + z), x * y + x * z);
    EXPECT_EQ((x + y) * z, x * z + y * z);
    EXPECT_EQ(x * ExactElement::one(), x);
    EXPECT_TRUE((x - x).is_zero());
    // group-ring multiplication cancels: (1 - a)(1 + a) = 1 - a^2
    EXPECT_EQ((ExactElement::one() - g(p, "a")) * (ExactElement::one() + g(p, "a")),
              ExactElement::one() - g(p, "a^2"));
}

TEST(GroupRing, AdjointReversesProducts) {
    const auto p = catalog_get("borromean").presentation;
    const auto x = g(p, "a b") - g(p, "C", 4);
    const auto y = g(p, "b c A") + ExactElement::scalar(Rational(2));
    EXPECT_EQ((x * y).adjoint(), y.adjoint() * x.adjoint());
    EXPECT_EQ(x.adjoint().adjoint(), x);
    EXPECT_EQ(g(p, "a b").adjoint(), g(p, "B A"));
}

TEST(GroupRing, MatrixProductAndAdjoint) {
    const auto p = catalog_get("borromean").presentation;
    ExactMatrix m(2, 2), n(2, 2);
    m(0, 0) = g(p, "a");
    m(0, 1) = g(p, "b", 2);
    m(1, 1) = ExactElement::one() - g(p, "c");
    n(0, 0) = g(p, "B");
    n(1, 0) = g(p, "c");
    n(1, 1) = g(p, "a c");
    EXPECT_EQ((m * n).adjoint(), n.adjoint() * m.adjoint());
    EXPECT_EQ(m * ExactMatrix::identity(2), m);
    EXPECT_EQ((m * n)(0, 0), g(p, "a B") + g(p, "b c", 2));
}

TEST(GroupRing, SupportCap) {
    const GroupPresentation f("f2", {"a", "b"}, {});
    const auto x = g(f, "a") + g(f, "b") + g(f, "A") + g(f, "B");
    auto y = x;
    EXPECT_THROW(
        {
            for (int i = 0; i < 10; ++i) y = y.mul(x, 200);
        },
        SupportCapExceeded);
}

TEST(GroupRing, KappaTwistIsMultiplicative) {
    const auto e = catalog_get("borromean");
    const auto& p = e.presentation;
    const auto x = g(p, "a b") - g(p, "C", 4) + g(p, "b b");
    const auto y = g(p, "B c A") + ExactElement::scalar(Rational(2));
    const TwistParameters tw{e.phi, 1.7};
    const auto lhs = kappa_twist(x * y, tw);
    const auto rhs = kappa_twist(x, tw) * kappa_twist(y, tw);
    ASSERT_EQ(lhs.support_size(), rhs.support_size());
    for (const auto& [w, c] : lhs.terms()) EXPECT_NEAR(std::abs(c - rhs.coefficient(w)), 0.0, 1e-12);
    // exact variant agrees with the floating one
    const auto ex = kappa_twist_exact(x, e.phi, Rational(3, 2));
    const auto fl = kappa_twist(x, TwistParameters{e.phi, 1.5});
    for (const auto& [w, c] : ex.terms()) EXPECT_NEAR(c.to_double(), fl.coefficient(w).real(), 1e-12);
    EXPECT_THROW(kappa_twist(x, TwistParameters{e.phi, 0.0}), std::invalid_argument);
}

TEST(GroupRing, TraceIsCentral) {
    const GroupPresentation f("f2", {"a", "b"}, {});
    const auto x = g(f, "a b") - g(f, "B", 3) + ExactElement::scalar(Rational(2));
    const auto y = g(f, "B A") + g(f, "b") + g(f, "a");
    const auto oracle = free_oracle();
    EXPECT_DOUBLE_EQ(trace(x * y, oracle).value.real(), trace(y * x, oracle).value.real());
    // tr(x x^*) = sum of squared coefficients
    EXPECT_DOUBLE_EQ(trace(x * x.adjoint(), oracle).value.real(), 1 + 9 + 4);
    // abelian oracle: a b A B is the identity in Z^2
    EXPECT_DOUBLE_EQ(trace(g(f, "a b A B", 5), abelian_oracle(2)).value.real(), 5.0);
}

TEST(GroupRing, TraceMarksUnknownWords) {
    const auto fig = catalog_get("figure8").presentation;
    const auto oracle = quotient_oracle(fig, {});
    // a long word with no finite-quotient witness and no short derivation
    const auto tv = trace(g(fig, "a b a b A A b b a B"), oracle);
    EXPECT_TRUE(tv.heuristic);
}

TEST(GroupRing, NeumannInverse) {
    const GroupPresentation f("f2", {"a", "b"}, {});
    // x = 1 - y with ||y||_1 = 0.5
    const auto y = g(f, "a").scaled(Rational(1, 4)) + g(f, "B").scaled(Rational(1, 4));
    const auto x = ExactElement::one() - y;
    const auto inv = neumann_inverse(x, 12);
    const auto r = x * inv.value - ExactElement::one();
    EXPECT_LE(r.l1_norm(), std::pow(0.5, 13) + 1e-15);
    EXPECT_NEAR(inv.residual_bound, std::pow(0.5, 13) / 0.5, 1e-15);
    EXPECT_THROW(neumann_inverse(ExactElement::one() - g(f, "a"), 3), std::domain_error);
}
