#pragma once

#include "qeilab/testfn.hpp"
#include "qeilab/tower.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace qeilab::qei {

// Transform of a real even sampling function, supplied as |g-hat|(u) >= 0.
using Transform = std::function<double(double)>;

// Worldline energy-density lower bound.  For a single field of mass m in
// d spacetime dimensions the averaged energy density obeys
//   <rho>_g >= -C int_m^inf u^d |g-hat(u)|^2 du,
// and for a mass tower the species sum turns the measure into the counting
// function:
//   <rho>_g >= -C int_0^inf u^d N(u) |g-hat(u)|^2 du.
// `value` is the (nonpositive) right-hand side; Divergent states that the
// doubling tail test never saw the increments die out.
struct QeiBound {
    enum class Status { Finite, Divergent };
    Status status = Status::Divergent;
    double value = 0.0;
    int dimension = 4;
    double constant = 1.0;
    double error = 0.0;        // quadrature error estimate (Finite only)
    double upper_limit = 0.0;  // where the tail test stopped probing
    std::string diagnostic;
    std::vector<std::array<double, 2>> integrand_samples;  // (u, integrand)
};

QeiBound single_field_bound(const Transform& g_hat, double m, int d, double C);

QeiBound tower_bound(const Transform& g_hat, const tower::MassTower& tower, int d, double C);

// The quartic tempering sums sum_r kappa^2 m_r^4 exp(-4 sqrt2 beta0 lambda m_r)
// controlling the QEI at sampling scale lambda: one verdict per grid point.
std::vector<tower::SumVerdict> qei_mass_sum_test(const testfn::ExponentialEnvelope& env,
                                                 const tower::MassTower& tower,
                                                 const std::vector<double>& lambda_grid);

// |tower QEI bound| at sampling scale lambda, with g-hat = f-hat(lambda * .).
// The raw material for the scaling fit below.
QeiBound scaled_tower_bound(const testfn::TestFunction& f, const tower::MassTower& tower,
                            double lambda, int d = 4, double C = 1.0);

// Least-squares fit of log Q(lambda) = log C_fit - n log lambda over a grid of
// finite bound magnitudes Q(lambda) = |value(lambda)|.
struct ScalingFit {
    double C_fit = 0.0;
    double n_fit = 0.0;
    double rms = 0.0;
    std::vector<double> lambda;
    std::vector<double> q;
};

ScalingFit fit_scaling(const std::vector<double>& lambda, const std::vector<double>& q);

// QEI => nuclearity direction: from a polynomial scaling law Q(lambda) <=
// C_fit lambda^{-n} and the exponential envelope of f-hat, conclude
// G(beta) <= C_G (1/beta)^{n_G} via beta = 16 sqrt2 beta0 lambda, and check
// the local-normality sums along the way.  `gamma_theorem` is the lower-bound
// constant of the negative-energy theorem feeding the chain; it only scales
// C_G, so it defaults to 1.
struct PipelineReport {
    bool envelope_ok = false;          // f-hat admits an exponential envelope
    tower::TriState fulfilled = tower::TriState::Undetermined;
    double n_G = 0.0;                  // fitted exponent for G(beta)
    double C_G = 0.0;                  // fitted constant for G(beta)
    std::vector<double> beta_probes;
    std::vector<tower::SumVerdict> quartic_sums;   // hypothesis sums at the probes
    std::vector<tower::LocalNormality> normality;  // local normality at the probes
    // The theorem's conclusion quantifies over every temperature, so the
    // hypothesis sum is also probed well below the fitted grid; spectra whose
    // tempering sums diverge at small beta are caught here.
    std::vector<double> small_beta_probes;
    std::vector<tower::SumVerdict> small_quartic_sums;
    std::string detail;
};

PipelineReport qei_to_nuclearity_pipeline(const testfn::TestFunction& f,
                                          const testfn::ExponentialEnvelope& env,
                                          const tower::MassTower& tower,
                                          const ScalingFit& scaling,
                                          double gamma_theorem = 1.0);

// Nuclearity => QEI direction: given the nuclearity exponent n (so that the
// Tauberian envelope is N(v) <= B v^{2/(n+1)} exp(C v^{n/(n+1)})), decide
// whether sampling transforms decaying like exp(-gamma u^alpha) keep the
// tower bound finite.  Admissible iff alpha > n/(n+1), or alpha = n/(n+1)
// with gamma above the envelope growth constant C (a conservative threshold:
// square-integrability would allow gamma > C/2).
struct QeiDomain {
    bool admissible = false;
    double alpha_threshold = 0.0;  // n/(n+1)
    double gamma_threshold = 0.0;  // envelope C, relevant at alpha == threshold
    std::string reason;
};

QeiDomain nuclearity_to_qei_domain(double n, double gamma, double alpha, double beta0 = 1.0);

// Spectral-side finiteness probe used by tests: the tower integrand with an
// arbitrary counting majorant N(u), so Tauberian envelopes can be fed in
// directly.
QeiBound spectral_bound(const Transform& g_hat, const std::function<double(double)>& counting,
                        double lower, int d, double C);

}  // namespace qeilab::qei
