#pragma once

#include "qeilab/negstate.hpp"
#include "qeilab/testfn.hpp"

#include <functional>

namespace fixtures {

// The canonical test function (mollifier radius 1, beta0 = 1) costs a few
// seconds to construct, so suites share one lazily built copy.
const qeilab::testfn::TestFunction& canonical_f();
const qeilab::testfn::ExponentialEnvelope& canonical_env();

// Default two-particle profile and the kernel contracted from it.
const qeilab::negstate::RadialAngularProfile& default_profile();
const qeilab::negstate::KernelC& default_kernel();

// Equispaced trapezoid rule.  For smooth integrands whose derivatives all
// vanish at the endpoints (bumps, products of bumps with trig factors) the
// Euler-Maclaurin correction terms vanish and the rule converges faster than
// any power of 1/n -- an independent high-accuracy oracle that shares no code
// with the adaptive quadrature under test.
double trapezoid(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace fixtures
