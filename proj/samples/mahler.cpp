// det over Z of a Laurent polynomial is its Mahler measure; watch both estimators converge.
#include <cstdio>

#include "l2tor/l2tor.hpp"

using namespace l2tor;

int main() {
    const Word z = Word::generator(0);
    // p(z) = 1 - 3z + z^2: roots (3 +- sqrt 5)/2, Mahler measure (3 + sqrt 5)/2
    const Matrix m = Matrix::single(Element::one() - Element::monomial(3.0, z) + Element::monomial(1.0, z * z));
    std::printf("target %.10f\n", (3 + std::sqrt(5.0)) / 2);
    QuotientOptions qo;
    qo.phi = CohomologyClass::parse("1");
    for (std::size_t N : {16, 64, 256, 1024}) {
        qo.cyclic_order = N;
        std::printf("Z/%-5zu %.10f\n", N, det_quotient(m, FiniteQuotient::trivial(1), qo).value);
    }
    const auto s = det_series(m, default_series_K(m), 60, free_oracle());
    std::printf("series  %.10f (depth 60, K = %.4f)\n", s.value, default_series_K(m));
}
