// Trefoil torsion curve via PSL(2,7) x Z and its fitted asymptotics.
#include <cstdio>

#include "l2tor/l2tor.hpp"

using namespace l2tor;

int main() {
    auto spec = TorsionSpec::from_catalog(catalog_get("trefoil"));
    spec.estimator.method = TorsionMethod::Quotient;
    configure_quotient_family(spec);
    const auto curve = torsion_curve(spec);
    for (const auto& p : curve.points) std::printf("%10.5f  %12.8f\n", p.t, p.value);
    const auto fit = leading_fit(samples(curve), 1.0);
    std::printf("thurston %.4f  gauge %.0f  C %.6f  band [%.6f, %.6f]\n", fit.thurston_estimate, *fit.gauge_k,
                *fit.leading_coefficient, fit.c_low, fit.c_high);
}
