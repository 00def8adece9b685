#pragma once

#include "qeilab/chebyshev.hpp"

#include <memory>

namespace qeilab::testfn {

enum class MollifierShape { Bump };

// Smooth compactly supported mollifier chi.  The (only) built-in shape is
// the standard bump chi(t) = exp(-1/(1-(t/a)^2)) on |t| < a, identically
// zero outside.  Even, nonnegative, C-infinity.
class Mollifier {
public:
    explicit Mollifier(double support_radius, MollifierShape shape = MollifierShape::Bump);

    double operator()(double t) const;
    double support_radius() const { return a_; }
    double integral() const { return integral_; }  // cached quadrature of chi

    // Cosine transform 2*int_0^a chi(t) cos(ut) dt.  Real by evenness.
    double transform(double u) const;

private:
    double a_;
    MollifierShape shape_;
    double integral_;
};

// eta = chi * chi (autoconvolution).  Supported on |t| <= 2a, even,
// nonnegative, and its transform eta-hat = (chi-hat)^2 is nonnegative --
// the property everything downstream leans on.  Point evaluation goes
// through a certified Chebyshev proxy; eval_direct() exposes the raw
// convolution quadrature so tests can audit the proxy independently.
class EtaFunction {
public:
    double operator()(double t) const;
    double eval_direct(double t) const;
    double transform(double u) const;  // 2*int_0^{2a} eta(t) cos(ut) dt
    double support_radius() const { return radius_; }
    double integral() const { return integral_; }  // equals (int chi)^2
    double proxy_error() const { return proxy_.fit_error(); }
    const Mollifier& mollifier() const { return chi_; }

private:
    friend EtaFunction self_convolve(const Mollifier& chi);
    EtaFunction(Mollifier chi, ChebyshevSeries proxy);

    Mollifier chi_;
    double radius_;
    double integral_;
    ChebyshevSeries proxy_;
};

EtaFunction self_convolve(const Mollifier& chi);

// Pointwise-valid exponential lower envelope for a transform:
//   f-hat(u) >= kappa * exp(-beta0 * u)   for u >= m0   (here m0 = 0).
struct ExponentialEnvelope {
    double kappa = 0.0;
    double beta0 = 1.0;
    double m0 = 0.0;

    double operator()(double u) const;
};

// Normalized even test function
//   f(t) = beta0 * eta(t) / (pi * Z * (t^2 + beta0^2)),   Z such that int f = 1.
// Its transform is the Lorentzian-smeared eta-hat
//   f-hat(u) = (1/(2 pi Z)) int eta-hat(u') exp(-beta0 |u - u'|) du',
// which is strictly positive and admits the exponential envelope above.
// Rescaling f -> f_lambda(t) = f(t/lambda)/lambda stays inside the family:
// only the Lorentzian width (beta0 * lambda) and the eta argument scale,
// so the class stores the shared base eta plus the two scale parameters.
class TestFunction {
public:
    double operator()(double t) const;

    // f-hat(u) by adaptive quadrature over the compact support.  The
    // imaginary part (an asymmetry integral, zero for even f) is computed
    // as a cross-check and must stay below `imag_tol`; a violation means
    // the evaluator or the quadrature is misconfigured and raises
    // NumericError.
    double fourier(double u, double imag_tol = 1e-8) const;

    double support_radius() const;
    double beta0() const { return beta0_eff_; }      // effective Lorentzian width
    double eta_scale() const { return scale_; }
    double normalization() const { return Z_; }      // base-family normalizer
    const EtaFunction& eta() const { return *eta_; }

private:
    friend TestFunction build_test_function(EtaFunction eta, double beta0);
    friend TestFunction rescale(const TestFunction& f, double lambda);
    TestFunction(std::shared_ptr<const EtaFunction> eta, double beta0_eff, double scale, double Z);

    std::shared_ptr<const EtaFunction> eta_;
    double beta0_eff_;
    double scale_;
    double Z_;
};

TestFunction build_test_function(EtaFunction eta, double beta0);

// Convenience free function used throughout reports and tests.
double fourier_eval(const TestFunction& f, double u);

// f_lambda(t) = f(t/lambda)/lambda.  Mass normalization and kappa are
// invariant; the envelope decay rate becomes lambda * beta0.
TestFunction rescale(const TestFunction& f, double lambda);

// Certified envelope parameters for f-hat.  kappa is computed from the
// truncated half-line integral of eta-hat (an underestimate, hence safe)
// with the truncation error bounded analytically via |eta-hat| <= int eta.
// When `verify` is set, the envelope inequality is additionally spot-checked
// on a coarse grid; the exhaustive sweep lives in verify_envelope().
ExponentialEnvelope kappa_envelope(const TestFunction& f, bool verify = true);

// Exhaustive envelope check: min over the grid of f-hat(u) - kappa e^{-beta0 u}
// for u in [0, u_max] at the given spacing.  Nonnegative up to quadrature
// noise when the envelope is sound.
double verify_envelope(const TestFunction& f, const ExponentialEnvelope& env,
                       double u_max, double spacing);

}  // namespace qeilab::testfn
