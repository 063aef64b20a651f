#include <gtest/gtest.h>

#include "l2tor/torsion.hpp"

using namespace l2tor;

namespace {

const InfiniteOrderTest any_inf = free_group_infinite_order();

Estimator rules_estimator() {
    return [](const Matrix& m) {
        auto r = det_rules(m, any_inf);
        if (!r) throw std::runtime_error("not rules-decomposable");
        return to_estimate(*r);
    };
}

}  // namespace

TEST(Torsion, TrefoilTorusIsExact) {
    auto spec = TorsionSpec::from_catalog(catalog_get("trefoil-torus"));
    spec.estimator.method = TorsionMethod::Rules;
    const auto c = torsion_curve(spec);
    ASSERT_EQ(c.points.size(), 17u);
    for (const auto& p : c.points) {
        // (1 + t^3 x) / (t^2 y - 1): max(1, t^3) / max(1, t^2)
        EXPECT_DOUBLE_EQ(p.value, std::max(1.0, p.t)) << p.t;
        EXPECT_EQ(p.numerator.method, DetMethod::Rules);
        EXPECT_FALSE(p.heuristic);
    }
}

TEST(Torsion, ScaledClassIsReparametrized) {
    auto base = TorsionSpec::from_catalog(catalog_get("trefoil-torus"));
    base.estimator.method = TorsionMethod::Rules;
    auto twice = base;
    twice.phi = base.phi.scaled(Rational(2));
    for (double t : {0.3, 0.8, 1.7, 5.0})
        EXPECT_DOUBLE_EQ(torsion_at(twice, t).value, torsion_at(base, t * t).value);
}

TEST(Torsion, LemmaMatchesThePresentationFormula) {
    const auto e = catalog_get("trefoil-torus");
    const auto& p = e.presentation;
    for (double t : {0.5, 2.0, 3.0}) {
        const TwistParameters tw{e.phi, t};
        const Matrix B = kappa_twist(fox_matrix(p), tw);  // 1 x 2
        ExactMatrix a(2, 1);
        for (std::uint32_t j = 0; j < 2; ++j)
            a(j, 0) = ExactElement::group(Word::generator(j)) - ExactElement::one();
        const Matrix A = kappa_twist(a, tw);
        const auto lem = lemma_torsion(A, B, Matrix{}, {1}, {}, rules_estimator());
        auto spec = TorsionSpec::from_catalog(e);
        spec.estimator.method = TorsionMethod::Rules;
        EXPECT_DOUBLE_EQ(lem.value, torsion_at(spec, t).value) << t;
        EXPECT_EQ(lem.method, DetMethod::Rules);
    }
}

TEST(Torsion, LemmaRejectsVanishingFactors) {
    Matrix A(1, 1), B(1, 1);
    B(0, 0) = Element::one();
    EXPECT_THROW(lemma_torsion(A, B, Matrix{}, {0}, {}, rules_estimator()), VanishingFactor);
    EXPECT_THROW(lemma_torsion(A, B, Matrix{}, {0, 1}, {}, rules_estimator()), std::invalid_argument);
}

TEST(Torsion, ChainAlternatingProduct) {
    Matrix d1(1, 1), d2(1, 1);
    d1(0, 0) = Element::monomial(Complex(2, 0), Word::generator(0));
    d2(0, 0) = Element::scalar(Complex(3, 0));
    const auto e = chain_torsion({d1, d2}, rules_estimator());
    EXPECT_DOUBLE_EQ(e.value, 1.5);
    ASSERT_FALSE(e.notes.empty());
    EXPECT_NE(e.notes.front().find("not zero"), std::string::npos);
    // a genuine complex: d2 d1 = 0
    Matrix z1(1, 1);
    z1(0, 0) = Element::one() - Element::group(Word::generator(0));
    const auto ok = chain_torsion({z1}, rules_estimator());
    EXPECT_DOUBLE_EQ(ok.value, 1.0);
    EXPECT_THROW(chain_torsion({Matrix(1, 2), Matrix(3, 3)}, rules_estimator()), std::invalid_argument);
}

TEST(Torsion, Validation) {
    auto spec = TorsionSpec::from_catalog(catalog_get("trefoil"));
    spec.phi = CohomologyClass::parse("1,0");
    EXPECT_THROW(spec.validate(), std::invalid_argument);

    spec = TorsionSpec::from_catalog(catalog_get("borromean"));
    spec.dropped_relator = std::nullopt;
    spec.presentation = dehn_fill(spec.presentation, Word::generator(2));  // deficiency zero
    spec.phi = CohomologyClass::parse("0,-1,0");
    EXPECT_THROW(spec.validate(), std::invalid_argument);

    spec = TorsionSpec::from_catalog(catalog_get("trefoil"));
    spec.grid = {1.0, 0.5};
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec.grid = {0.0, 1.0};
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec.grid = default_grid();
    spec.dropped_generator = 7;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    EXPECT_THROW(log_grid(1, 1, 5), std::invalid_argument);
}

TEST(Torsion, EstimatorFailuresAreFlagged) {
    auto spec = TorsionSpec::from_catalog(catalog_get("figure8"));
    spec.estimator.method = TorsionMethod::Rules;
    spec.grid = {0.5, 2.0};
    EXPECT_THROW(torsion_curve(spec), std::runtime_error);
    std::vector<std::string> errors;
    const auto c = torsion_curve(spec, &errors);
    EXPECT_EQ(errors.size(), 2u);
    for (const auto& p : c.points) {
        EXPECT_EQ(p.value, 0.0);
        ASSERT_FALSE(p.flags.empty());
        EXPECT_NE(p.flags[0].find("estimator failure"), std::string::npos);
    }
}

TEST(Torsion, QuotientFamilyOnTrefoil) {
    auto spec = TorsionSpec::from_catalog(catalog_get("trefoil"));
    spec.estimator.method = TorsionMethod::Quotient;
    configure_quotient_family(spec);
    ASSERT_EQ(spec.estimator.family.size(), 2u);
    EXPECT_EQ(spec.estimator.family[1].cyclic_order, 2 * spec.estimator.family[0].cyclic_order);
    EXPECT_EQ(spec.estimator.cover.size(), 1u);
    EXPECT_EQ(spec.estimator.frequency_offset, 0.5);
    for (double t : {0.25, 4.0}) {
        const auto p = torsion_at(spec, t);
        EXPECT_NEAR(p.value, std::max(1.0, t), 1e-6 * std::max(1.0, t)) << t;
        EXPECT_TRUE(p.heuristic);
    }
}

TEST(Torsion, DefaultGrid) {
    const auto g = default_grid();
    ASSERT_EQ(g.size(), 17u);
    EXPECT_EQ(g.front(), 0.125);
    EXPECT_EQ(g.back(), 8.0);
    EXPECT_NEAR(g[8], 1.0, 1e-12);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i] * g[g.size() - 1 - i], 1.0, 1e-12);
}
