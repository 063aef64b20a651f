#include <gtest/gtest.h>

#include <numbers>

#include "l2tor/fkdet.hpp"
#include "oracles.hpp"

using namespace l2tor;

namespace {

const GroupPresentation Z("z", {"a"}, {});
const GroupPresentation Z2("z2", {"a", "b"}, {Word::commutator(Word::generator(0), Word::generator(1))});
const GroupPresentation F2("f2", {"a", "b"}, {});

CohomologyClass unit(std::size_t n, std::size_t i) {
    CohomologyClass c;
    for (std::size_t j = 0; j < n; ++j) c.weights.emplace_back(i == j ? 1 : 0);
    return c;
}

// sum_k c_k a^k on Z
Element poly(const std::vector<double>& c) {
    Element x;
    for (std::size_t k = 0; k < c.size(); ++k) x += Element::monomial(Complex(c[k], 0), Word::generator(0, static_cast<std::int32_t>(k)));
    return x;
}

DeterminantEstimate on_z(const Element& x, std::size_t N, double offset = 0.0) {
    QuotientOptions o;
    o.phi = unit(1, 0);
    o.cyclic_order = N;
    o.frequency_offset = offset;
    return det_quotient(Matrix::single(x), FiniteQuotient::trivial(1), o);
}

}  // namespace

TEST(Rules, MonomialAndTwoTerm) {
    const auto inf = free_group_infinite_order();
    const Word a = Word::generator(0), b = Word::generator(1);
    for (double lam : {0.3, 1.0, 2.5, -4.0}) {
        EXPECT_EQ(det_rules(Matrix::single(Element::monomial(Complex(lam, 0), a * b)), inf)->value, std::fabs(lam));
        // 1 - t g
        const auto x = Element::one() - Element::monomial(Complex(lam, 0), b);
        EXPECT_EQ(det_rules(Matrix::single(x), inf)->value, std::max(1.0, std::fabs(lam)));
    }
    EXPECT_EQ(det_rules(Matrix::single(Element::monomial(Complex(0, 2), a)), inf)->value, 2.0);
}

TEST(Rules, RefusesWhatItCannotProve) {
    const auto inf = free_group_infinite_order();
    const auto three = poly({1, 2, 1});
    EXPECT_FALSE(det_rules(Matrix::single(three), inf).has_value());
    // two-term with g^-1 h of unknown order (no certificate in Z/6)
    const GroupPresentation c6("c6", {"a"}, {Word::generator(0, 6)});
    const auto tor = infinite_order_test(c6, CohomologyClass::parse("0"), false);
    EXPECT_FALSE(det_rules(Matrix::single(poly({1, 1})), tor).has_value());
    EXPECT_THROW(det_rules(Matrix(1, 2), inf), std::invalid_argument);
}

TEST(Rules, StructurallySingularAndTriangular) {
    const auto inf = free_group_infinite_order();
    Matrix m(2, 2);
    m(0, 0) = Element::monomial(Complex(3, 0), Word::generator(0));
    m(1, 0) = poly({5, 1, 7});  // arbitrary below the diagonal
    EXPECT_EQ(det_rules(m, inf)->value, 0.0);  // column 1 is empty
    m(1, 1) = Element::one() - Element::monomial(Complex(2, 0), Word::generator(1));
    EXPECT_EQ(det_rules(m, inf)->value, 6.0);
    // permuted copy
    Matrix p(2, 2);
    p(0, 0) = m(1, 0);
    p(0, 1) = m(1, 1);
    p(1, 0) = m(0, 0);
    EXPECT_EQ(det_rules(p, inf)->value, 6.0);
    EXPECT_EQ(det_rules(m.transpose(), inf)->value, 6.0);
}

TEST(Quotient, MahlerMeasureOnZ) {
    // roots off the unit circle: the N-point rule converges geometrically
    for (const auto& c : std::vector<std::vector<double>>{{1, -0.5, 0.3}, {2, -3, 0.5}, {0.2, 1, 3}, {1, 0, 0, -0.7}}) {
        const double ref = oracle::mahler(c);
        EXPECT_NEAR(on_z(poly(c), 512).value, ref, 1e-8 * ref);
        EXPECT_NEAR(on_z(poly(c), 512, 0.5).value, ref, 1e-8 * ref);
    }
    // 1 - t a for t in a range
    for (double t : {0.25, 0.5, 2.0, 4.0}) EXPECT_NEAR(on_z(poly({1, -t}), 256).value, std::max(1.0, t), 1e-9);
}

TEST(Quotient, KernelAtTrivialCharacter) {
    // 1 - a vanishes at the trivial character; the plain rule sees a one-dimensional kernel
    const auto e = on_z(poly({1, -1}), 16);
    EXPECT_NEAR(e.kernel_defect, 1.0 / 16, 1e-12);
    // midpoint characters: prod |1 - w zeta| = |1 + 1| = 2 exactly, so det_N = 2^(1/N)
    const auto m = on_z(poly({1, -1}), 16, 0.5);
    EXPECT_EQ(m.kernel_defect, 0.0);
    EXPECT_NEAR(m.value, std::pow(2.0, 1.0 / 16), 1e-12);
}

TEST(Quotient, PlainCyclicRuleDropsTheKernel) {
    // prod_{j != 0} |1 - w^j| = N for the N-th roots of unity
    const auto e = on_z(poly({1, -1}), 8);
    EXPECT_NEAR(e.value, std::pow(8.0, 1.0 / 8), 1e-12);
    EXPECT_NEAR(e.kernel_defect, 1.0 / 8, 1e-15);
}

TEST(Quotient, RichardsonRemovesTheFirstOrderTerm) {
    const Matrix m = Matrix::single(poly({1, -1}));
    const auto q = FiniteQuotient::trivial(1);
    QuotientOptions o;
    o.phi = unit(1, 0);
    o.frequency_offset = 0.5;
    const auto plain = det_quotient_family(m, {{q, 32}, {q, 64}}, o, false);
    const auto rich = det_quotient_family(m, {{q, 32}, {q, 64}}, o, true);
    EXPECT_NEAR(plain.value, std::pow(2.0, 1.0 / 64), 1e-12);
    EXPECT_NEAR(rich.value, 1.0, 1e-12);
    EXPECT_EQ(rich.params.at("richardson"), 1.0);
    ASSERT_EQ(rich.diagnostics.size(), 2u);
    EXPECT_NEAR(rich.log_uncertainty, std::log(2.0) / 64, 1e-12);
}

TEST(Quotient, TwoClassCoverOnZ2) {
    // m(3 + x + y) = log 3 since |x + y| <= 2 < 3
    QuotientOptions o;
    o.cover = {unit(2, 0), unit(2, 1)};
    o.cyclic_order = 32;
    const auto x = Element::scalar(Complex(3, 0)) + Element::group(Word::generator(0)) + Element::group(Word::generator(1));
    EXPECT_NEAR(det_quotient(Matrix::single(x), FiniteQuotient::trivial(2), o).value, 3.0, 1e-9);

    // 1 + x + y: compare with a direct midpoint double integral of log|1 + x + y|
    const auto y = Element::one() + Element::group(Word::generator(0)) + Element::group(Word::generator(1));
    o.cyclic_order = 64;
    o.frequency_offset = 0.5;
    double s = 0;
    const int M = 2000;
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            const double u = 2 * std::numbers::pi * (i + 0.5) / M, v = 2 * std::numbers::pi * (j + 0.5) / M;
            s += std::log(std::abs(Complex(1 + std::cos(u) + std::cos(v), std::sin(u) + std::sin(v))));
        }
    const double ref = std::exp(s / (double(M) * M));
    EXPECT_NEAR(det_quotient(Matrix::single(y), FiniteQuotient::trivial(2), o).value, ref, 2e-2);
}

TEST(Quotient, UnitaryAgreesWithRules) {
    // monomial matrices are unitary up to scale; every estimator must give the exact value
    const auto q = select_quotient(F2, 4);
    ASSERT_TRUE(q);
    Matrix m(2, 2);
    m(0, 1) = Element::monomial(Complex(1.5, 0), Word::generator(0));
    m(1, 0) = Element::monomial(Complex(-2, 0), F2.parse_word("a B a"));
    EXPECT_NEAR(det_quotient(m, *q).value, 3.0, 1e-9);
    EXPECT_EQ(det_rules(m, free_group_infinite_order())->value, 3.0);
}

TEST(Quotient, RepresentationCap) {
    QuotientOptions o;
    o.max_dimension = 4;
    const auto q = quotient_search(F2, 3, 1).front();
    EXPECT_THROW(det_quotient(Matrix::single(Element::one()), q, o), RepresentationTooLarge);
    QuotientOptions no_class;
    no_class.cyclic_order = 4;
    EXPECT_THROW(det_quotient(Matrix::single(Element::one()), FiniteQuotient::trivial(2), no_class),
                 std::invalid_argument);
}

TEST(Series, FixedNormalizationConstant) {
    const Matrix m = Matrix::single(poly({1, -0.5}));
    EXPECT_NEAR(det_series(m, 1.5, 40, abelian_oracle(1)).value, 1.0, 0.02);
}

TEST(Series, PartialValuesDecreaseToTheLimit) {
    // on Z the trace oracle is exact; 1 - 0.5 a has det 1
    const Matrix m = Matrix::single(poly({1, -0.5}));
    const auto e = det_series(m, default_series_K(m), 40, abelian_oracle(1));
    for (std::size_t i = 1; i < e.diagnostics.size(); ++i) EXPECT_LE(e.diagnostics[i], e.diagnostics[i - 1] + 1e-12);
    EXPECT_GE(e.value, 1.0 - 1e-9);
    EXPECT_NEAR(e.value, 1.0, 0.02);
    EXPECT_FALSE(e.heuristic);
    EXPECT_THROW(det_series(m, 0.5, 4, abelian_oracle(1)), std::domain_error);
}

TEST(Schur, BlockFormula) {
    // [[1, 0], [C, 2]] is triangular with det 2; the Schur route inverts C = 1 - a/4
    Matrix A(1, 1), B(1, 1), C(1, 1), D(1, 1);
    A(0, 0) = Element::one();
    C(0, 0) = poly({1, -0.25});
    D(0, 0) = Element::scalar(Complex(2, 0));
    const Estimator est = [](const Matrix& x) {
        if (auto r = det_rules(x, free_group_infinite_order())) return to_estimate(*r);
        QuotientOptions o;
        o.phi = unit(1, 0);
        o.cyclic_order = 64;
        return det_quotient(x, FiniteQuotient::trivial(1), o);
    };
    const auto e = det_schur(A, B, C, D, 30, est);
    EXPECT_NEAR(e.value, 2.0, 1e-8);
    EXPECT_LT(e.params.at("neumann_residual"), 1e-15);
}
