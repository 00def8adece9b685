#pragma once

#include "qeilab/testfn.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qeilab::negstate {

// Smooth bump supported on [center - halfwidth, center + halfwidth]:
//   exp(-1 / (1 - ((x - center)/halfwidth)^2))  inside, 0 outside.
struct IntervalBump {
    double center = 0.75;
    double halfwidth = 0.25;
    double operator()(double x) const;
};

struct ProfileSpec {
    double center = 0.75;
    double halfwidth = 0.25;
};

// Separable two-particle profile on dimensionless momenta u = k/m:
//   B(u, u') = n_B * g(|u|) * g(|u'|) * h(cos theta),
// with g, h smooth bumps (g supported in [1/2, 1], h in (1/2, 1]) and n_B
// fixed by the normalization
//   (1/(2 pi)^6) int B(u, u') d^3u d^3u' = 1.
class RadialAngularProfile {
public:
    double radial(double rho) const;           // g(rho)
    double angular(double c) const;            // h(cos theta)
    double value(double rho, double rho_p, double c) const;  // B in separable coords
    double value_vec(const std::array<double, 3>& u, const std::array<double, 3>& up) const;

    double normalization() const { return n_b_; }   // n_B
    double radial_weighted_integral() const { return i_g2_; }  // int g(r) r^2 dr
    double angular_integral() const { return i_h_; }           // int h(c) dc
    const IntervalBump& radial_bump() const { return g_; }
    const IntervalBump& angular_bump() const { return h_; }

private:
    friend RadialAngularProfile build_profile(const ProfileSpec& g, const ProfileSpec& h);
    IntervalBump g_, h_;
    double n_b_ = 0.0, i_g2_ = 0.0, i_h_ = 0.0;
};

// Validates the supports (radial inside [1/2, 1] so the momenta live on the
// shell |k| in [m/2, m]; angular inside (1/2, 1] so pair momenta never
// cancel) and computes the normalization.
RadialAngularProfile build_profile(const ProfileSpec& g, const ProfileSpec& h);

// Two-point kernel obtained by contracting B with itself over the middle leg:
//   C(u, u') = K_c * g(|u|) g(|u'|) A(u-hat . u'-hat),
//   A(c) = sum_l (4 pi / (2l + 1)) h_l^2 P_l(c),  h_l = (2l+1)/2 int h P_l.
// Carries its trace and double integral (both ways of computing the latter
// agree analytically; the constructor checks them against each other).
class KernelC {
public:
    double radial(double rho) const;   // g(rho), shared with the profile
    double angular(double c) const;    // A(c), clamped below at 0
    double value(double rho, double rho_p, double c) const;

    double prefactor() const { return k_c_; }
    double trace() const { return trace_; }
    double double_integral() const { return i_c_; }  // int C(u,u') over both legs / (2 pi)^6
    double angular_at_one() const;    // A(1) = 2 pi int h^2 (closed-form check)
    int legendre_terms() const { return int(h_l_.size()); }

private:
    friend KernelC derive_kernel(const RadialAngularProfile& b);
    IntervalBump g_;
    std::vector<double> h_l_;
    double k_c_ = 0.0, trace_ = 0.0, i_c_ = 0.0, a1_closed_ = 0.0;
};

KernelC derive_kernel(const RadialAngularProfile& b);

// Coupling optimization.  With I_C the normalized double integral of the
// correlation kernel, the worst-case energy estimate in the pair state
// carries the concave quadratic
//   P(lambda) = (3/16) lambda - (8 I_C / sqrt5) lambda^2,
// positive on (0, 2 lambda0) and maximized at
//   lambda0 = 3 sqrt5 / (256 I_C),   P(lambda0) = (3/32) lambda0.
struct LambdaOptimum {
    double lambda0 = 0.0;   // optimizer
    double p_max = 0.0;     // P(lambda0) = (3/32) lambda0
};

LambdaOptimum optimize_lambda(const KernelC& c);

// P(lambda) itself (nonnegative on [0, 2 lambda0], zero at both ends).
double lambda_polynomial(const KernelC& c, double lambda);

// Mass-independent lower-bound constant Gamma = P(lambda0) / (1 + lambda0^2 Tr C).
double gamma_constant(const KernelC& c, const LambdaOptimum& opt);

// ---------------------------------------------------------------------------
// Energy expectation

struct EnergyResult {
    double value = 0.0;           // time-averaged energy density in the state
    double positive_term = 0.0;   // lambda^2-term (correlation kernel C)
    double negative_term = 0.0;   // -lambda-term (interference through B)
    double error = 0.0;           // refinement difference + proxy certification
    int levels = 0;               // tensor-quadrature refinement levels used
    double normalization_sq = 0.0;  // |N|^2 of the state
    double phi = 0.0;             // envelope value at the pair threshold 2 sqrt2 m
    bool transform_checks_ok = true;  // f-hat(diff) <= 1 and f-hat(sum) >= phi at all nodes
};

struct EnergyOptions {
    double rel_tol = 1e-6;
    int max_panels = 16;  // per dimension, doubling from 2
};

// Time-averaged energy density in the vacuum-plus-pair state at mass m and
// coupling lambda, by reduction of the 6-dimensional momentum integral to the
// 3 separable variables (x, x', cos theta) and tensor Gauss-Legendre
// quadrature.  The state is built from the envelope value phi = env(2 sqrt2 m)
// while the integrand keeps the true transform f-hat, entering through
// certified log-Chebyshev proxies on the two kinematic windows (difference
// and sum frequencies); their fit errors are folded into `error`.
EnergyResult averaged_energy(double m, double lambda, const testfn::TestFunction& f,
                             const testfn::ExponentialEnvelope& env,
                             const RadialAngularProfile& b, const KernelC& c,
                             const EnergyOptions& opt = {});

// Plain Monte Carlo cross-check of the same expectation over the 6-dimensional
// box [-m, m]^6, rejecting off-shell samples before touching the transform.
// Deterministic for a fixed seed: samples are drawn in batches with
// splitmix-derived per-batch seeds and accumulated in batch order.
struct McResult {
    double estimate = 0.0;
    double stderr_est = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t accepted = 0;
};

McResult mc_crosscheck(double m, double lambda, const testfn::TestFunction& f,
                       const testfn::ExponentialEnvelope& env,
                       const RadialAngularProfile& b, const KernelC& c,
                       std::uint64_t samples, std::uint64_t seed);

// Kinematic support sweep: random points of the interaction support are
// checked against the three inequalities that drive the energy estimate
// (shell energies inside [sqrt5 m / 2, sqrt2 m], the correlation bracket
// bounded above by 8m/sqrt5, the interference bracket bounded below by
// 3m/(8 sqrt2)).
struct SupportSweep {
    std::uint64_t samples = 0;
    std::uint64_t violations = 0;
    double omega_min = 0.0, omega_max = 0.0;
    double bracket_plus_max = 0.0;   // max of (omega omega' + k.k' + m^2)/sqrt(omega omega')
    double bracket_minus_min = 0.0;  // min of (omega omega' + k.k' - m^2)/sqrt(omega omega')
};

SupportSweep kinematic_sweep(double m, const RadialAngularProfile& b, std::uint64_t samples,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Theorem verification

struct MassRow {
    double m = 0.0;
    double energy = 0.0;
    double energy_error = 0.0;
    double bound = 0.0;        // -Gamma m^4 phi^2
    double margin_ratio = 0.0; // |energy| / |bound| (>= 1 when the theorem holds)
    bool holds = false;
};

struct TheoremReport {
    double lambda0 = 0.0;
    double gamma = 0.0;
    std::vector<MassRow> rows;
    bool all_hold = false;
};

// For each mass in m_list (every entry must be >= max(m0, env.m0)), build the
// optimally coupled pair state and verify that the averaged energy undercuts
// -Gamma m^4 phi^2 with phi = env(2 sqrt2 m).
TheoremReport verify_theorem(const std::vector<double>& m_list, double m0,
                             const testfn::TestFunction& f, const testfn::ExponentialEnvelope& env,
                             const RadialAngularProfile& b, const KernelC& c,
                             const EnergyOptions& opt = {});

}  // namespace qeilab::negstate
