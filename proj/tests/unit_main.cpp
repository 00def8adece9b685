#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"

namespace fixtures {

const qeilab::testfn::TestFunction& canonical_f() {
    static const qeilab::testfn::TestFunction f = [] {
        qeilab::testfn::Mollifier chi(1.0);
        return qeilab::testfn::build_test_function(qeilab::testfn::self_convolve(chi), 1.0);
    }();
    return f;
}

const qeilab::testfn::ExponentialEnvelope& canonical_env() {
    static const qeilab::testfn::ExponentialEnvelope env =
        qeilab::testfn::kappa_envelope(canonical_f());
    return env;
}

const qeilab::negstate::RadialAngularProfile& default_profile() {
    static const qeilab::negstate::RadialAngularProfile b =
        qeilab::negstate::build_profile({}, {});
    return b;
}

const qeilab::negstate::KernelC& default_kernel() {
    static const qeilab::negstate::KernelC c = qeilab::negstate::derive_kernel(default_profile());
    return c;
}

double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) acc += f(a + i * h);
    return acc * h;
}

}  // namespace fixtures
