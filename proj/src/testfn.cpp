#include "qeilab/testfn.hpp"

#include "qeilab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qeilab::testfn {

namespace {
const double kPi = std::acos(-1.0);

// Composite-Gauss evaluation of int_0^R fn(t) dt for integrands carrying a
// cos(u t) or sin(u t) factor.  The panel width is tied to the oscillation
// (each 16-point panel sees at most about half a period), so every panel is
// resolved to machine precision without adaptive recursion -- the adaptive
// integrator wastes orders of magnitude more work fighting the cancellation
// in the oscillatory tail.
double oscillatory_integral(const std::function<double(double)>& fn, double R, double u) {
    const double turns = R * std::abs(u) / 3.0;
    // The floor of 12 panels is what the non-oscillatory bump factor itself
    // needs for machine accuracy; the turn count only adds panels once the
    // cosine varies faster than the bump.
    const int panels = std::max(12, static_cast<int>(std::ceil(std::min(turns, 4096.0))));
    const quad::Panel p = quad::composite_gauss(panels, 0.0, R);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.x.size(); ++i) acc += p.w[i] * fn(p.x[i]);
    return acc;
}
}  // namespace

// ---------------------------------------------------------------------------
// Mollifier

Mollifier::Mollifier(double support_radius, MollifierShape shape)
    : a_(support_radius), shape_(shape), integral_(0.0) {
    if (!(support_radius > 0.0))
        throw std::invalid_argument("Mollifier: support radius must be positive");
    integral_ = 2.0 * quad::integrate([this](double t) { return (*this)(t); }, 0.0, a_).value;
}

double Mollifier::operator()(double t) const {
    const double x = t / a_;
    const double r2 = x * x;
    if (r2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r2));
}

double Mollifier::transform(double u) const {
    return 2.0 * oscillatory_integral(
                     [this, u](double t) { return (*this)(t) * std::cos(u * t); }, a_, u);
}

// ---------------------------------------------------------------------------
// EtaFunction

EtaFunction::EtaFunction(Mollifier chi, ChebyshevSeries proxy)
    : chi_(std::move(chi)),
      radius_(2.0 * chi_.support_radius()),
      integral_(chi_.integral() * chi_.integral()),
      proxy_(std::move(proxy)) {}

double EtaFunction::eval_direct(double t) const {
    t = std::abs(t);
    const double a = chi_.support_radius();
    if (t >= radius_) return 0.0;
    const double lo = std::max(-a, t - a);
    const double hi = std::min(a, t + a);
    if (!(lo < hi)) return 0.0;
    return quad::integrate([this, t](double s) { return chi_(s) * chi_(t - s); }, lo, hi).value;
}

double EtaFunction::operator()(double t) const {
    t = std::abs(t);
    if (t >= radius_) return 0.0;
    // eta >= 0; the proxy may dip a hair below zero near the flat edge.
    return std::max(0.0, proxy_(t));
}

double EtaFunction::transform(double u) const {
    return 2.0 * oscillatory_integral(
                     [this, u](double t) { return (*this)(t) * std::cos(u * t); }, radius_, u);
}

EtaFunction self_convolve(const Mollifier& chi) {
    const double radius = 2.0 * chi.support_radius();
    // Build the proxy against the convolution quadrature, then certify it on
    // an off-node grid (done inside fit()).  The observed fit error is kept
    // on the object for downstream error budgets.
    auto direct = [&chi, radius](double t) {
        t = std::abs(t);
        const double a = chi.support_radius();
        if (t >= radius) return 0.0;
        const double lo = std::max(-a, t - a);
        const double hi = std::min(a, t + a);
        if (!(lo < hi)) return 0.0;
        return quad::integrate([&chi, t](double s) { return chi(s) * chi(t - s); }, lo, hi).value;
    };
    ChebyshevSeries proxy = ChebyshevSeries::fit(direct, 0.0, radius, 1e-13);
    if (proxy.fit_error() > 1e-11)
        throw NumericError("self_convolve: proxy certification failed");
    return EtaFunction(chi, std::move(proxy));
}

// ---------------------------------------------------------------------------
// ExponentialEnvelope

double ExponentialEnvelope::operator()(double u) const {
    return kappa * std::exp(-beta0 * u);
}

// ---------------------------------------------------------------------------
// TestFunction

TestFunction::TestFunction(std::shared_ptr<const EtaFunction> eta, double beta0_eff,
                           double scale, double Z)
    : eta_(std::move(eta)), beta0_eff_(beta0_eff), scale_(scale), Z_(Z) {}

double TestFunction::operator()(double t) const {
    const double e = (*eta_)(t / scale_);
    if (e == 0.0) return 0.0;
    return beta0_eff_ * e / (kPi * Z_ * (t * t + beta0_eff_ * beta0_eff_));
}

double TestFunction::support_radius() const { return scale_ * eta_->support_radius(); }

double TestFunction::fourier(double u, double imag_tol) const {
    const double R = support_radius();
    const double real = 2.0 * oscillatory_integral(
                                  [this, u](double t) { return (*this)(t) * std::cos(u * t); },
                                  R, u);
    // Asymmetry residue: for even f this is the zero function integrated,
    // so anything above tolerance flags a broken evaluator.
    const double imag = oscillatory_integral(
        [this, u](double t) { return ((*this)(t) - (*this)(-t)) * std::sin(u * t); }, R, u);
    if (std::abs(imag) > imag_tol)
        throw NumericError("TestFunction::fourier: imaginary residue above tolerance");
    return real;
}

TestFunction build_test_function(EtaFunction eta, double beta0) {
    if (!(beta0 > 0.0)) throw std::invalid_argument("build_test_function: beta0 must be positive");
    auto shared = std::make_shared<const EtaFunction>(std::move(eta));
    // Normalize: Z = int beta0 eta(t) / (pi (t^2 + beta0^2)) dt over the support.
    const double R = shared->support_radius();
    const quad::Result z = quad::integrate(
        [&shared, beta0](double t) {
            return beta0 * (*shared)(t) / (kPi * (t * t + beta0 * beta0));
        },
        -R, R);
    if (!(z.value > 0.0) || z.error > 1e-10 * z.value)
        throw NumericError("build_test_function: normalization quadrature failed");
    return TestFunction(std::move(shared), beta0, 1.0, z.value);
}

double fourier_eval(const TestFunction& f, double u) { return f.fourier(u); }

TestFunction rescale(const TestFunction& f, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("rescale: lambda must be positive");
    return TestFunction(f.eta_, f.beta0_eff_ * lambda, f.scale_ * lambda, f.Z_);
}

ExponentialEnvelope kappa_envelope(const TestFunction& f, bool verify) {
    const double beta0 = f.beta0();
    const double scale = f.eta_scale();
    const EtaFunction& eta = f.eta();

    // kappa = (1/(2 pi Z)) int_{-inf}^{0} eta_s-hat(u') e^{beta0 u'} du'
    // where eta_s(t) = eta(t/scale), so eta_s-hat(u) = scale * eta-hat(scale u).
    // Truncating the half-line at -U underestimates kappa (integrand >= 0 is
    // not guaranteed pointwise, but |eta-hat| <= int eta bounds the discarded
    // tail); we enlarge U until the analytic tail bound is negligible.
    auto etas_hat = [&](double up) { return scale * eta.transform(scale * up); };
    const double eta_mass = scale * eta.integral();  // int eta_s = bound for |eta_s-hat|

    double U = 8.0 / beta0;
    double integral = 0.0;
    for (int attempt = 0;; ++attempt) {
        integral = quad::integrate([&](double up) { return etas_hat(up) * std::exp(beta0 * up); },
                                   -U, 0.0).value;
        const double tail_bound = eta_mass * std::exp(-beta0 * U) / beta0;
        if (tail_bound < 1e-13 * std::max(std::abs(integral), 1e-30)) break;
        if (attempt >= 8) throw NumericError("kappa_envelope: half-line truncation stalled");
        U *= 2.0;
    }

    ExponentialEnvelope env;
    env.kappa = integral / (2.0 * kPi * f.normalization());
    env.beta0 = beta0;
    env.m0 = 0.0;
    if (!(env.kappa > 0.0) || env.kappa > 1.0 + 1e-12)
        throw NumericError("kappa_envelope: kappa outside (0, 1]");

    if (verify) {
        // Coarse spot-check here; the dense sweep is verify_envelope().
        const double slack = verify_envelope(f, env, 12.0 / beta0, 0.25 / beta0);
        if (slack < -1e-10)
            throw NumericError("kappa_envelope: envelope inequality violated on spot grid");
    }
    return env;
}

double verify_envelope(const TestFunction& f, const ExponentialEnvelope& env,
                       double u_max, double spacing) {
    if (!(spacing > 0.0) || !(u_max > 0.0))
        throw std::invalid_argument("verify_envelope: grid parameters must be positive");
    double min_slack = std::numeric_limits<double>::infinity();
    const long n = std::lround(u_max / spacing);
    for (long i = 0; i <= n; ++i) {
        const double u = i * spacing;
        const double slack = f.fourier(u) - env(u);
        min_slack = std::min(min_slack, slack);
    }
    return min_slack;
}

}  // namespace qeilab::testfn
