// Small permutation quotients of the figure-eight knot group.
#include <iostream>

#include "l2tor/l2tor.hpp"

using namespace l2tor;

int main() {
    const auto e = catalog_get("figure8");
    for (const auto& q : quotient_search(e.presentation, 5, 20)) std::cout << q.order << "  " << q.str() << "\n";
    for (const auto& q : riley_quotients(e.presentation, 7)) std::cout << "PSL(2,7): " << q.order << "\n";
}
