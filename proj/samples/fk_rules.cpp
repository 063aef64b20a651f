// Exact Fuglede-Kadison determinants from the rules engine, next to the
// finite-quotient estimate of the same matrix.
#include <iostream>

#include "l2tor/l2tor.hpp"

using namespace l2tor;

int main() {
    const Word g = Word::generator(0), h = Word::generator(1);
    Matrix m(2, 2);
    m(0, 0) = Element::monomial(3.0, g);
    m(0, 1) = Element::one() + Element::monomial(5.0, g * h);
    m(1, 1) = Element::one() - Element::monomial(2.0, h);

    const auto r = det_rules(m, free_group_infinite_order());
    std::cout << "rules: det = " << r->value << "\n";
    for (const auto& line : r->trace) std::cout << "  " << line << "\n";

    // F(g, h) -> S3 x Z/N along phi = (1, 1): an approximation, not exact for 1 - 2h
    QuotientOptions qo;
    qo.phi = CohomologyClass::parse("1,1");
    for (std::size_t N : {1, 8, 64, 512}) {
        qo.cyclic_order = N;
        const auto q = FiniteQuotient::make({Permutation(std::vector<std::uint16_t>{1, 0, 2}),
                                             Permutation(std::vector<std::uint16_t>{0, 2, 1})});
        std::cout << "quotient S3 x Z/" << N << ": " << det_quotient(m, q, qo).value << "\n";
    }
}
