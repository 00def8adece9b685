#include "qeilab/negstate.hpp"

#include "qeilab/chebyshev.hpp"
#include "qeilab/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qeilab::negstate {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrt5 = std::sqrt(5.0);
const double kTwoPi3 = std::pow(2.0 * kPi, 3);
const double kTwoPi6 = std::pow(2.0 * kPi, 6);

// splitmix64 step; all Monte Carlo sampling below draws from this generator
// so that runs are reproducible across standard-library implementations.
inline std::uint64_t splitmix_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix_next(state) >> 11) * 0x1.0p-53;
}

// Certified log-Chebyshev proxies of f-hat on the two kinematic windows: the
// difference frequencies |omega' - omega| <= (sqrt2 - sqrt5/2) m and the sum
// frequencies in [sqrt5 m, 2 sqrt2 m], both padded by a few percent.  The
// direct transform costs two adaptive quadratures per call, far too slow for
// tensor-product or Monte Carlo inner loops.  Its absolute noise floor caps
// the achievable relative accuracy when f-hat is exponentially small, so the
// fit tolerances follow the envelope value at the far end of each window.
struct TransformProxies {
    ChebyshevSeries diff;
    ChebyshevSeries sum;
};

TransformProxies make_proxies(double m, const testfn::TestFunction& f,
                              const testfn::ExponentialEnvelope& env) {
    const double diff_hi = 1.05 * (kSqrt2 - kSqrt5 / 2.0) * m;
    const double sum_lo = 0.97 * kSqrt5 * m;
    const double sum_hi = 1.03 * 2.0 * kSqrt2 * m;
    const double noise_abs = 3e-13;
    const double tol_diff = std::max(1e-12, noise_abs / env(diff_hi));
    const double tol_sum = std::max(1e-12, noise_abs / env(sum_hi));
    if (tol_sum > 1e-4)
        throw NumericError(
            "negstate: transform too small to certify a proxy at this mass");
    auto log_fhat = [&f](double w) {
        const double v = f.fourier(std::abs(w));
        if (!(v > 0.0))
            throw NumericError("negstate: transform not positive in a proxy window");
        return std::log(v);
    };
    return TransformProxies{ChebyshevSeries::fit(log_fhat, 0.0, diff_hi, tol_diff),
                            ChebyshevSeries::fit(log_fhat, sum_lo, sum_hi, tol_sum)};
}

double pair_threshold_phi(double m, const testfn::ExponentialEnvelope& env,
                          const char* caller) {
    using std::string_literals::operator""s;
    if (!(m > 0.0))
        throw std::invalid_argument(caller + ": mass must be positive"s);
    if (2.0 * kSqrt2 * m < env.m0)
        throw std::invalid_argument(caller + ": pair threshold below envelope validity"s);
    return env(2.0 * kSqrt2 * m);
}

}  // namespace

// ---------------------------------------------------------------------------
// Profile

double IntervalBump::operator()(double x) const {
    const double y = (x - center) / halfwidth;
    const double arg = 1.0 - y * y;
    if (!(arg > 0.0)) return 0.0;
    return std::exp(-1.0 / arg);
}

double RadialAngularProfile::radial(double rho) const { return g_(rho); }

double RadialAngularProfile::angular(double c) const { return h_(c); }

double RadialAngularProfile::value(double rho, double rho_p, double c) const {
    return n_b_ * g_(rho) * g_(rho_p) * h_(c);
}

double RadialAngularProfile::value_vec(const std::array<double, 3>& u,
                                       const std::array<double, 3>& up) const {
    const double r = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    const double rp = std::sqrt(up[0] * up[0] + up[1] * up[1] + up[2] * up[2]);
    if (r == 0.0 || rp == 0.0) return 0.0;  // radial bump vanishes at the origin anyway
    const double c = (u[0] * up[0] + u[1] * up[1] + u[2] * up[2]) / (r * rp);
    return value(r, rp, c);
}

RadialAngularProfile build_profile(const ProfileSpec& g, const ProfileSpec& h) {
    auto validate = [](const ProfileSpec& s, const char* which) {
        using std::string_literals::operator""s;
        if (!(s.halfwidth > 0.0))
            throw std::invalid_argument("build_profile: "s + which +
                                        " bump halfwidth must be positive");
        if (s.center - s.halfwidth < 0.5 - 1e-12 || s.center + s.halfwidth > 1.0 + 1e-12)
            throw std::invalid_argument("build_profile: "s + which +
                                        " bump support must lie inside [1/2, 1]");
    };
    validate(g, "radial");
    validate(h, "angular");

    RadialAngularProfile p;
    p.g_ = IntervalBump{g.center, g.halfwidth};
    p.h_ = IntervalBump{h.center, h.halfwidth};
    const IntervalBump gb = p.g_;
    const IntervalBump hb = p.h_;
    p.i_g2_ = quad::integrate([gb](double r) { return gb(r) * r * r; },
                              g.center - g.halfwidth, g.center + g.halfwidth)
                  .value;
    p.i_h_ = quad::integrate([hb](double c) { return hb(c); }, h.center - h.halfwidth,
                             h.center + h.halfwidth)
                 .value;
    // (1/(2 pi)^6) int B = n_B * 8 pi^2 * I_g2^2 * I_h / (2 pi)^6 = 1.
    p.n_b_ = 8.0 * std::pow(kPi, 4) / (p.i_g2_ * p.i_g2_ * p.i_h_);
    return p;
}

// ---------------------------------------------------------------------------
// Correlation kernel

double KernelC::radial(double rho) const { return g_(rho); }

double KernelC::angular(double c) const {
    // Legendre series via the three-term recurrence.  A >= 0 holds exactly
    // (every series weight is a square), so truncation noise is clamped away.
    c = std::clamp(c, -1.0, 1.0);
    double acc = 4.0 * kPi * h_l_[0] * h_l_[0];
    if (h_l_.size() > 1) acc += (4.0 * kPi / 3.0) * h_l_[1] * h_l_[1] * c;
    double pm1 = 1.0;  // P_0
    double p0 = c;     // P_1
    for (std::size_t l = 1; l + 1 < h_l_.size(); ++l) {
        const double ld = static_cast<double>(l);
        const double p1 = ((2.0 * ld + 1.0) * c * p0 - ld * pm1) / (ld + 1.0);
        const double hl = h_l_[l + 1];
        acc += (4.0 * kPi / (2.0 * ld + 3.0)) * hl * hl * p1;
        pm1 = p0;
        p0 = p1;
    }
    return std::max(acc, 0.0);
}

double KernelC::value(double rho, double rho_p, double c) const {
    return k_c_ * g_(rho) * g_(rho_p) * angular(c);
}

double KernelC::angular_at_one() const { return a1_closed_; }

KernelC derive_kernel(const RadialAngularProfile& b) {
    KernelC k;
    k.g_ = b.radial_bump();
    const IntervalBump h = b.angular_bump();
    const double clo = h.center - h.halfwidth;
    const double chi = h.center + h.halfwidth;

    // Projections h_l = (2l+1)/2 int h P_l for the series
    // A(1) = sum (4 pi/(2l+1)) h_l^2.  P_l has ~l/3 sign changes inside the
    // support, so the integral is evaluated on a composite Gauss grid with at
    // most half a wave per 16-point panel -- adaptive refinement would fight
    // the oscillation at every level.  The floor of 8 panels resolves the
    // flat bump itself at low l.
    const auto panel_integral = [](const std::function<double(double)>& fn, double a,
                                   double b, int panels) {
        const quad::Panel p = quad::composite_gauss(panels, a, b);
        double acc = 0.0;
        for (std::size_t i = 0; i < p.x.size(); ++i) acc += p.w[i] * fn(p.x[i]);
        return acc;
    };

    // The bump's coefficients decay subexponentially and non-monotonically
    // (spiky triplets), so truncation is decided by a trailing-window tail
    // estimate rather than individual terms; the Parseval comparison below
    // is the hard certificate that the truncation was safe.
    std::vector<double> hl;
    std::vector<double> terms;
    double a1_series = 0.0;
    bool settled = false;
    constexpr int kWindow = 24;
    for (int l = 0; l < 1024; ++l) {
        const double proj =
            0.5 * (2.0 * l + 1.0) *
            panel_integral(
                [&h, l](double c) { return h(c) * boost::math::legendre_p(l, c); }, clo,
                chi, std::max(8, l / 2 + 1));
        hl.push_back(proj);
        const double term = 4.0 * kPi / (2.0 * l + 1.0) * proj * proj;
        terms.push_back(term);
        a1_series += term;
        if (l >= 2 * kWindow) {
            double window = 0.0;
            for (int j = l - kWindow + 1; j <= l; ++j)
                window += terms[static_cast<std::size_t>(j)];
            if (window <= 1e-10 * a1_series) {
                settled = true;
                break;
            }
        }
    }
    if (!settled)
        throw NumericError(
            "derive_kernel: angular Legendre coefficients did not decay within 1024 terms");
    k.h_l_ = std::move(hl);

    // Parseval pins A(1) = 2 pi int h^2; the truncated series must agree.
    k.a1_closed_ =
        2.0 * kPi *
        quad::integrate([&h](double c) { return h(c) * h(c); }, clo, chi).value;
    if (std::abs(a1_series - k.a1_closed_) > 1e-8 * k.a1_closed_)
        throw NumericError("derive_kernel: A(1) series disagrees with the Parseval value (series " +
                           std::to_string(a1_series) + ", closed " + std::to_string(k.a1_closed_) +
                           ", kept " + std::to_string(k.h_l_.size()) + " terms)");

    const IntervalBump g = k.g_;
    const double rlo = g.center - g.halfwidth;
    const double rhi = g.center + g.halfwidth;
    const double i_gg2 =
        quad::integrate([&g](double r) { return g(r) * g(r) * r * r; }, rlo, rhi).value;
    k.k_c_ = b.normalization() * b.normalization() * i_gg2 / kTwoPi3;
    k.trace_ = k.k_c_ * 4.0 * kPi * i_gg2 * k.a1_closed_ / kTwoPi3;

    // Normalized double integral two ways: quadrature of the assembled series
    // against the closed form that only uses the l = 0 projection (the higher
    // harmonics integrate to zero over [-1, 1]).
    const double i_g2 = b.radial_weighted_integral();
    const double i_h = b.angular_integral();
    // The assembled A(c) carries oscillations up to the highest kept P_l, so
    // the same panelization applies (a full period spans [-1, 1]/l here).
    const double int_a =
        panel_integral([&k](double c) { return k.angular(c); }, -1.0, 1.0,
                       std::max(8, static_cast<int>(k.h_l_.size())));
    const double route_series = k.k_c_ * i_g2 * i_g2 * 8.0 * kPi * kPi * int_a / kTwoPi6;
    const double route_closed = k.k_c_ * i_g2 * i_g2 * i_h * i_h / (4.0 * std::pow(kPi, 3));
    if (std::abs(route_series - route_closed) > 1e-6 * route_closed)
        throw NumericError("derive_kernel: double-integral routes disagree");
    k.i_c_ = route_closed;
    return k;
}

// ---------------------------------------------------------------------------
// Coupling optimization

LambdaOptimum optimize_lambda(const KernelC& c) {
    const double i_c = c.double_integral();
    if (!(i_c > 0.0))
        throw std::invalid_argument("optimize_lambda: kernel double integral must be positive");
    LambdaOptimum opt;
    opt.lambda0 = 3.0 * kSqrt5 / (256.0 * i_c);
    opt.p_max = (3.0 / 32.0) * opt.lambda0;
    return opt;
}

double lambda_polynomial(const KernelC& c, double lambda) {
    return (3.0 / 16.0) * lambda - (8.0 / kSqrt5) * c.double_integral() * lambda * lambda;
}

double gamma_constant(const KernelC& c, const LambdaOptimum& opt) {
    return opt.p_max / (1.0 + opt.lambda0 * opt.lambda0 * c.trace());
}

// ---------------------------------------------------------------------------
// Energy expectation

EnergyResult averaged_energy(double m, double lambda, const testfn::TestFunction& f,
                             const testfn::ExponentialEnvelope& env,
                             const RadialAngularProfile& b, const KernelC& c,
                             const EnergyOptions& opt) {
    if (!(lambda >= 0.0))
        throw std::invalid_argument("averaged_energy: coupling must be nonnegative");
    if (opt.max_panels < 2 || !(opt.rel_tol > 0.0))
        throw std::invalid_argument("averaged_energy: need max_panels >= 2 and rel_tol > 0");

    EnergyResult out;
    out.phi = pair_threshold_phi(m, env, "averaged_energy");
    out.normalization_sq = 1.0 / (1.0 + lambda * lambda * out.phi * out.phi * c.trace());
    if (lambda == 0.0) return out;  // vacuum: the expectation is exactly zero

    const TransformProxies proxies = make_proxies(m, f, env);

    // The angular integrals factor out of the (x, x') double sum: each level
    // needs only the four moments below plus an O(nodes^2) radial pass.
    double jp = 0.0, jm = 0.0;
    double djp = std::numeric_limits<double>::infinity();
    double djm = std::numeric_limits<double>::infinity();
    int levels = 0;
    bool have_prev = false;
    bool checks_ok = true;
    for (int panels = 1; panels <= opt.max_panels; panels *= 2) {
        ++levels;
        const quad::Panel pc_a = quad::composite_gauss(panels, -0.5, 1.0);
        const quad::Panel pc_h = quad::composite_gauss(panels, 0.5, 1.0);
        double s0 = 0.0, s1 = 0.0, t0 = 0.0, t1 = 0.0;
        for (std::size_t i = 0; i < pc_a.x.size(); ++i) {
            const double a = c.angular(pc_a.x[i]);
            s0 += pc_a.w[i] * a;
            s1 += pc_a.w[i] * a * pc_a.x[i];
        }
        for (std::size_t i = 0; i < pc_h.x.size(); ++i) {
            const double hv = b.angular(pc_h.x[i]);
            t0 += pc_h.w[i] * hv;
            t1 += pc_h.w[i] * hv * pc_h.x[i];
        }

        const quad::Panel px = quad::composite_gauss(panels, 0.5, 1.0);
        const std::size_t n = px.x.size();
        std::vector<double> gx(n), shell(n), root(n);
        for (std::size_t i = 0; i < n; ++i) {
            gx[i] = b.radial(px.x[i]);
            shell[i] = std::sqrt(1.0 + px.x[i] * px.x[i]);
            root[i] = std::sqrt(shell[i]);
        }
        double jpl = 0.0, jml = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (gx[i] == 0.0) continue;
            const double xi = px.x[i];
            const double base_i = px.w[i] * xi * xi * gx[i] / root[i];
            for (std::size_t j = 0; j < n; ++j) {
                if (gx[j] == 0.0) continue;
                const double xj = px.x[j];
                const double base = base_i * px.w[j] * xj * xj * gx[j] / root[j];
                const double ww = shell[i] * shell[j];
                const double fd = std::exp(proxies.diff(std::abs(m * (shell[j] - shell[i]))));
                const double fs = std::exp(proxies.sum(m * (shell[i] + shell[j])));
                if (fd > 1.0 + 1e-9 || fs < out.phi * (1.0 - 1e-9)) checks_ok = false;
                jpl += base * fd * ((ww + 1.0) * s0 + xi * xj * s1);
                jml += base * fs * ((ww - 1.0) * t0 + xi * xj * t1);
            }
        }
        if (have_prev) {
            djp = std::abs(jpl - jp);
            djm = std::abs(jml - jm);
        }
        jp = jpl;
        jm = jml;
        if (have_prev && djp <= opt.rel_tol * std::abs(jp) &&
            djm <= opt.rel_tol * std::abs(jm))
            break;
        have_prev = true;
    }

    const double pref = out.normalization_sq * std::pow(m, 4) / (8.0 * std::pow(kPi, 4));
    const double cpos = lambda * lambda * out.phi * out.phi * c.prefactor();
    const double cneg = lambda * out.phi * b.normalization() / kSqrt2;
    out.positive_term = pref * cpos * jp;
    out.negative_term = -pref * cneg * jm;
    out.value = out.positive_term + out.negative_term;
    const double eps_d = std::expm1(proxies.diff.fit_error());
    const double eps_s = std::expm1(proxies.sum.fit_error());
    out.error = pref * (cpos * (djp + eps_d * std::abs(jp)) +
                        cneg * (djm + eps_s * std::abs(jm)));
    out.levels = levels;
    out.transform_checks_ok = checks_ok;
    return out;
}

McResult mc_crosscheck(double m, double lambda, const testfn::TestFunction& f,
                       const testfn::ExponentialEnvelope& env,
                       const RadialAngularProfile& b, const KernelC& c,
                       std::uint64_t samples, std::uint64_t seed) {
    if (!(lambda >= 0.0))
        throw std::invalid_argument("mc_crosscheck: coupling must be nonnegative");
    if (samples == 0)
        throw std::invalid_argument("mc_crosscheck: need at least one sample");
    const double phi = pair_threshold_phi(m, env, "mc_crosscheck");

    McResult out;
    out.samples = samples;
    if (lambda == 0.0) return out;  // vacuum state: exactly zero, no sampling needed

    const TransformProxies proxies = make_proxies(m, f, env);
    const double n2 = 1.0 / (1.0 + lambda * lambda * phi * phi * c.trace());
    const double scale = n2 * std::pow(2.0 * m, 6) / kTwoPi6;
    const double kc = c.prefactor();
    const double nb = b.normalization();
    const double m2 = m * m;
    const double m3 = m2 * m;

    double sum = 0.0, sumsq = 0.0;
    std::uint64_t accepted = 0;
    const std::uint64_t batch = std::uint64_t{1} << 16;
    std::uint64_t done = 0;
    for (std::uint64_t ib = 0; done < samples; ++ib) {
        const std::uint64_t n = std::min(batch, samples - done);
        // Per-batch generator state: deterministic in (seed, batch index), so
        // a longer run extends a shorter one sample for sample.
        std::uint64_t st = seed ^ (0xA0761D6478BD642Full * (ib + 1));
        (void)splitmix_next(st);
        for (std::uint64_t s = 0; s < n; ++s) {
            double k[6];
            for (double& comp : k) comp = m * (2.0 * uniform01(st) - 1.0);
            const double r1 = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
            const double r2 = std::sqrt(k[3] * k[3] + k[4] * k[4] + k[5] * k[5]);
            const double gg = b.radial(r1 / m) * b.radial(r2 / m);
            if (gg == 0.0) continue;  // off the momentum shell before any transform work
            ++accepted;
            const double dot = k[0] * k[3] + k[1] * k[4] + k[2] * k[5];
            const double cth = dot / (r1 * r2);
            const double av = c.angular(cth);
            const double hv = b.angular(cth);
            if (av == 0.0 && hv == 0.0) continue;  // on shell but angularly dark
            const double w1 = std::sqrt(m2 + r1 * r1);
            const double w2 = std::sqrt(m2 + r2 * r2);
            double term = 0.0;
            if (av != 0.0)
                term += lambda * lambda * (phi * phi / m3) * kc * gg * av *
                        (w1 * w2 + dot + m2) *
                        std::exp(proxies.diff(std::abs(w2 - w1)));
            if (hv != 0.0)
                term -= (lambda / kSqrt2) * (phi / m3) * nb * gg * hv *
                        (w1 * w2 + dot - m2) * std::exp(proxies.sum(w1 + w2));
            term /= std::sqrt(w1 * w2);
            sum += term;
            sumsq += term * term;
        }
        done += n;
    }
    out.accepted = accepted;
    out.estimate = scale * (sum / static_cast<double>(samples));
    if (samples > 1) {
        const double nd = static_cast<double>(samples);
        const double var = std::max(0.0, (sumsq - sum * sum / nd) / (nd - 1.0));
        out.stderr_est = scale * std::sqrt(var / nd);
    }
    return out;
}

SupportSweep kinematic_sweep(double m, const RadialAngularProfile& b,
                             std::uint64_t samples, std::uint64_t seed) {
    if (!(m > 0.0)) throw std::invalid_argument("kinematic_sweep: mass must be positive");
    if (samples == 0)
        throw std::invalid_argument("kinematic_sweep: need at least one sample");

    const IntervalBump g = b.radial_bump();
    const IntervalBump h = b.angular_bump();
    const double omega_lo = 0.5 * kSqrt5 * m * (1.0 - 1e-12);
    const double omega_hi = kSqrt2 * m * (1.0 + 1e-12);
    const double plus_cap = (8.0 / kSqrt5) * m * (1.0 + 1e-12);
    const double minus_floor = 3.0 / (8.0 * kSqrt2) * m * (1.0 - 1e-12);

    SupportSweep out;
    out.samples = samples;
    double omin = std::numeric_limits<double>::infinity();
    double omax = -omin, pmax = -omin, mmin = omin;
    std::uint64_t weighted = 0;
    std::uint64_t st = seed;
    (void)splitmix_next(st);
    for (std::uint64_t s = 0; s < samples; ++s) {
        const double x1 = g.center + g.halfwidth * (2.0 * uniform01(st) - 1.0);
        const double x2 = g.center + g.halfwidth * (2.0 * uniform01(st) - 1.0);
        const double cth = h.center + h.halfwidth * (2.0 * uniform01(st) - 1.0);
        if (g(x1) * g(x2) * h(cth) <= 0.0) continue;  // support boundary carries no weight
        ++weighted;
        const double w1 = m * std::sqrt(1.0 + x1 * x1);
        const double w2 = m * std::sqrt(1.0 + x2 * x2);
        const double dot = m * m * x1 * x2 * cth;
        const double root = std::sqrt(w1 * w2);
        const double bp = (w1 * w2 + dot + m * m) / root;
        const double bm = (w1 * w2 + dot - m * m) / root;
        omin = std::min({omin, w1, w2});
        omax = std::max({omax, w1, w2});
        pmax = std::max(pmax, bp);
        mmin = std::min(mmin, bm);
        if (w1 < omega_lo || w1 > omega_hi || w2 < omega_lo || w2 > omega_hi ||
            bp > plus_cap || bm < minus_floor)
            ++out.violations;
    }
    if (weighted == 0) {
        omin = omax = pmax = mmin = 0.0;
    }
    out.omega_min = omin;
    out.omega_max = omax;
    out.bracket_plus_max = pmax;
    out.bracket_minus_min = mmin;
    return out;
}

// ---------------------------------------------------------------------------
// Theorem verification

TheoremReport verify_theorem(const std::vector<double>& m_list, double m0,
                             const testfn::TestFunction& f,
                             const testfn::ExponentialEnvelope& env,
                             const RadialAngularProfile& b, const KernelC& c,
                             const EnergyOptions& opt) {
    if (m_list.empty())
        throw std::invalid_argument("verify_theorem: need at least one mass");

    const LambdaOptimum lam = optimize_lambda(c);
    TheoremReport report;
    report.lambda0 = lam.lambda0;
    report.gamma = gamma_constant(c, lam);
    report.all_hold = true;
    for (double m : m_list) {
        if (!(m >= m0) || !(m >= env.m0))
            throw std::invalid_argument(
                "verify_theorem: every mass must sit at or above the threshold");
        const EnergyResult e = averaged_energy(m, lam.lambda0, f, env, b, c, opt);
        MassRow row;
        row.m = m;
        row.energy = e.value;
        row.energy_error = e.error;
        row.bound = -report.gamma * std::pow(m, 4) * e.phi * e.phi;
        row.margin_ratio = e.value / row.bound;
        row.holds = e.transform_checks_ok && (e.value + e.error <= row.bound);
        report.all_hold = report.all_hold && row.holds;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace qeilab::negstate
