#pragma once

#include <functional>
#include <string>
#include <vector>

namespace qeilab::distal {

// Radial diffeomorphism of flat space: x -> psi(|x|) x/|x| with psi a smooth
// increasing map of [0, inf), psi(0) = 0, and psi(s) = s at and beyond the
// stated cutoff radius (the global scaling map relaxes the compact cutoff and
// reports it as infinite).  The calculus below is dimension-independent for
// ambient dimension >= 2: the derivative of the inverse map has the radial
// stretch 1/psi'(psi^{-1}(s)) and the tangential stretch psi^{-1}(s)/s as its
// only distinct eigenvalues.
class RadialDiffeo {
public:
    double operator()(double s) const { return psi_(s); }
    double derivative(double s) const { return dpsi_(s); }
    // Monotone inversion: closed form where the factory provides one, else
    // bisection with a Newton polish; arguments beyond the cutoff use the
    // identity tail directly.
    double inverse(double t) const;

    double cutoff() const { return cutoff_; }
    const std::string& label() const { return label_; }

    static RadialDiffeo identity();
    // Global map psi(s) = s / lambda (contracts for lambda >= 1); no compact
    // cutoff, so the cutoff reports as infinite.
    static RadialDiffeo scaling(double lambda);
    // psi(s) = s / lambda for s <= inner, identity for s >= outer, smoothstep
    // blend in between (monotone for lambda >= 1 by construction, verified).
    static RadialDiffeo scaling_region(double lambda, double inner, double outer);
    // f after g; cutoff is the larger of the two.
    static RadialDiffeo compose(const RadialDiffeo& f, const RadialDiffeo& g);
    // Escape hatch for bespoke maps (the shrink construction uses it): psi
    // and its derivative, identity at and beyond `cutoff`.  Monotonicity and
    // the identity tail are verified on a dense grid; violations throw.
    static RadialDiffeo custom(std::function<double(double)> psi,
                               std::function<double(double)> dpsi, double cutoff,
                               std::string label,
                               std::function<double(double)> inverse = {});

private:
    RadialDiffeo() = default;

    std::function<double(double)> psi_;
    std::function<double(double)> dpsi_;
    std::function<double(double)> inv_;  // optional closed-form inverse
    double cutoff_ = 0.0;
    std::string label_;
};

// Open Euclidean ball about the origin (radial maps fix the center).
struct Ball {
    double radius = 1.0;
};

// Smallest growth rho such that the image of B(S, R + rho) covers the
// r-enlargement of the image of S:
//   inf{rho > 0 : B(f(S), r) subset f(B(S, rho))} = psi^{-1}(psi(R) + r) - R.
// `slack` is an optional additive allowance for the suppressed epsilons of
// the covering argument; it is simply added to the result.
double covering_radius(const RadialDiffeo& f, const Ball& S, double r, double slack = 0.0);

// Supremum of the derivative norm of f^{-1} over the annulus
// B(f(S), r) \ f(S), i.e. of max(1/psi'(psi^{-1}(s)), psi^{-1}(s)/s) for
// s in [psi(R), psi(R) + r].  Grid scan plus golden-section refinement.
double derivative_kappa(const RadialDiffeo& f, const Ball& S, double r);

// Ball-shrinking construction: a radial map with psi(R) = R and
// psi(R + d_S/2) >= R + d_S, identity beyond R + 2 d_S.  Its covering radius
// at separation d_S is at most d_S/2, so any finite splitting distance halves
// under iteration: the dichotomy trace records d_S/2, d_S/4, ...
struct ShrinkResult {
    RadialDiffeo map;
    double achieved = 0.0;   // psi(R + d_S/2) - R, >= d_S by construction
    double covering = 0.0;   // covering_radius(map, S, d_S), <= d_S/2
    bool certified = false;  // both inequalities checked numerically
    std::vector<double> dichotomy;
    std::string conclusion;
};

ShrinkResult shrink_construction(Ball S, double d_S, int iterations = 12);

// Known splitting-distance band of the logarithmic-spectrum model: the
// distance lies in (d0, 2 d0) for every separation r.  The inverse lower
// edge 1/d0 sets the maximal-temperature scale quoted in reports.
struct ModelBand {
    double lower = 0.0;
    double upper = 0.0;
    double inverse_lower = 0.0;
};

ModelBand distal_model_band(double d0, double r);

}  // namespace qeilab::distal
