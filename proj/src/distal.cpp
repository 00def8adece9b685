#include "qeilab/distal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace qeilab::distal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// C-infinity step: 0 for x <= 0, 1 for x >= 1, sigma(x)/(sigma(x)+sigma(1-x))
// in between with sigma(x) = exp(-1/x).  Its slope peaks at 2 (midpoint), the
// constant that sizes the shrink construction's monotonicity margins.
double sigma(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double dsigma(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }

double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = sigma(x);
    const double b = sigma(1.0 - x);
    return a / (a + b);
}

double dsmoothstep(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double a = sigma(x);
    const double b = sigma(1.0 - x);
    const double da = dsigma(x);
    const double db = -dsigma(1.0 - x);
    const double denom = a + b;
    return (da * b - a * db) / (denom * denom);
}

// Dense-grid certificate for the RadialDiffeo invariants: positive slope,
// strict growth, origin fixed, identity at and beyond the cutoff.
void verify_radial(const std::function<double(double)>& psi,
                   const std::function<double(double)>& dpsi, double cutoff,
                   const std::string& label) {
    if (std::abs(psi(0.0)) > 1e-14)
        throw std::invalid_argument("radial map '" + label + "' must fix the origin");
    const double hi = std::isfinite(cutoff) ? 1.25 * cutoff + 1.0 : 8.0;
    const int n = 4096;
    double prev = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double s = hi * i / n;
        const double v = psi(s);
        if (!(dpsi(s) > 0.0))
            throw std::invalid_argument("radial map '" + label +
                                        "' has nonpositive slope at s=" + std::to_string(s));
        if (!(v > prev))
            throw std::invalid_argument("radial map '" + label +
                                        "' fails strict monotonicity at s=" + std::to_string(s));
        if (std::isfinite(cutoff) && s >= cutoff && std::abs(v - s) > 1e-12 * std::max(1.0, s))
            throw std::invalid_argument("radial map '" + label +
                                        "' is not the identity beyond its cutoff");
        prev = v;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// RadialDiffeo

double RadialDiffeo::inverse(double t) const {
    if (!(t >= 0.0))
        throw std::invalid_argument("RadialDiffeo::inverse: argument must be nonnegative");
    if (inv_) return inv_(t);
    if (t == 0.0) return 0.0;
    if (std::isfinite(cutoff_) && t >= cutoff_) return t;  // identity tail

    double lo = 0.0;
    double hi = std::isfinite(cutoff_) ? std::max(cutoff_, t) : std::max(1.0, t);
    while (psi_(hi) < t) hi *= 2.0;
    for (int i = 0; i < 128; ++i) {
        const double mid = 0.5 * (lo + hi);
        (psi_(mid) < t ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    }
    double s = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {  // Newton polish, guarded to the bracket
        const double d = dpsi_(s);
        if (!(d > 0.0)) break;
        const double next = s - (psi_(s) - t) / d;
        if (!(next >= lo && next <= hi)) break;
        s = next;
    }
    return s;
}

RadialDiffeo RadialDiffeo::identity() {
    RadialDiffeo f;
    f.psi_ = [](double s) { return s; };
    f.dpsi_ = [](double) { return 1.0; };
    f.inv_ = [](double t) { return t; };
    f.cutoff_ = 0.0;
    f.label_ = "identity";
    return f;
}

RadialDiffeo RadialDiffeo::scaling(double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("RadialDiffeo::scaling: factor must be positive");
    RadialDiffeo f;
    f.psi_ = [lambda](double s) { return s / lambda; };
    f.dpsi_ = [lambda](double) { return 1.0 / lambda; };
    f.inv_ = [lambda](double t) { return lambda * t; };
    f.cutoff_ = kInf;
    f.label_ = "scaling";
    return f;
}

RadialDiffeo RadialDiffeo::scaling_region(double lambda, double inner, double outer) {
    if (!(lambda >= 1.0))
        throw std::invalid_argument("RadialDiffeo::scaling_region: need lambda >= 1");
    if (!(inner > 0.0 && inner < outer))
        throw std::invalid_argument("RadialDiffeo::scaling_region: need 0 < inner < outer");
    RadialDiffeo f;
    const double width = outer - inner;
    // psi = s/lambda + S(t) (s - s/lambda): every slope contribution is
    // nonnegative for lambda >= 1, so monotonicity holds by construction
    // (and is verified below all the same).
    f.psi_ = [lambda, inner, width](double s) {
        const double t = smoothstep((s - inner) / width);
        return s / lambda + t * (s - s / lambda);
    };
    f.dpsi_ = [lambda, inner, width](double s) {
        const double x = (s - inner) / width;
        const double gap = 1.0 - 1.0 / lambda;
        return 1.0 / lambda + smoothstep(x) * gap + dsmoothstep(x) / width * s * gap;
    };
    f.cutoff_ = outer;
    f.label_ = "scaling_region";
    verify_radial(f.psi_, f.dpsi_, f.cutoff_, f.label_);
    return f;
}

RadialDiffeo RadialDiffeo::compose(const RadialDiffeo& f, const RadialDiffeo& g) {
    RadialDiffeo h;
    h.psi_ = [fp = f.psi_, gp = g.psi_](double s) { return fp(gp(s)); };
    h.dpsi_ = [fd = f.dpsi_, fp = f.psi_, gp = g.psi_, gd = g.dpsi_](double s) {
        return fd(gp(s)) * gd(s);
    };
    if (f.inv_ && g.inv_)
        h.inv_ = [fi = f.inv_, gi = g.inv_](double t) { return gi(fi(t)); };
    h.cutoff_ = std::max(f.cutoff_, g.cutoff_);
    h.label_ = f.label_ + " . " + g.label_;
    return h;
}

RadialDiffeo RadialDiffeo::custom(std::function<double(double)> psi,
                                  std::function<double(double)> dpsi, double cutoff,
                                  std::string label,
                                  std::function<double(double)> inverse) {
    if (!psi || !dpsi)
        throw std::invalid_argument("RadialDiffeo::custom: psi and dpsi are required");
    if (!(cutoff >= 0.0))
        throw std::invalid_argument("RadialDiffeo::custom: cutoff must be nonnegative");
    RadialDiffeo f;
    f.psi_ = std::move(psi);
    f.dpsi_ = std::move(dpsi);
    f.inv_ = std::move(inverse);
    f.cutoff_ = cutoff;
    f.label_ = std::move(label);
    verify_radial(f.psi_, f.dpsi_, f.cutoff_, f.label_);
    return f;
}

// ---------------------------------------------------------------------------
// Covering calculus

double covering_radius(const RadialDiffeo& f, const Ball& S, double r, double slack) {
    if (!(S.radius > 0.0))
        throw std::invalid_argument("covering_radius: ball radius must be positive");
    if (!(r > 0.0))
        throw std::invalid_argument("covering_radius: separation must be positive");
    if (!(slack >= 0.0))
        throw std::invalid_argument("covering_radius: slack must be nonnegative");
    return f.inverse(f(S.radius) + r) - S.radius + slack;
}

double derivative_kappa(const RadialDiffeo& f, const Ball& S, double r) {
    if (!(S.radius > 0.0))
        throw std::invalid_argument("derivative_kappa: ball radius must be positive");
    if (!(r > 0.0))
        throw std::invalid_argument("derivative_kappa: separation must be positive");

    const double lo = f(S.radius);
    const double hi = lo + r;
    auto norm = [&f](double s) {
        const double pre = f.inverse(s);
        return std::max(1.0 / f.derivative(pre), pre / s);
    };

    const int n = 2048;
    double best = -kInf;
    double arg = lo;
    for (int i = 0; i <= n; ++i) {
        const double s = lo + (hi - lo) * i / n;
        const double v = norm(s);
        if (v > best) {
            best = v;
            arg = s;
        }
    }
    // Golden-section refinement in the winning grid cell's neighbourhood.
    const double cell = (hi - lo) / n;
    double a = std::max(lo, arg - cell);
    double b = std::min(hi, arg + cell);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    for (int i = 0; i < 120 && (b - a) > 1e-14 * std::max(1.0, hi); ++i) {
        if (norm(c) > norm(d)) {
            b = d;
            d = c;
            c = b - gr * (b - a);
        } else {
            a = c;
            c = d;
            d = a + gr * (b - a);
        }
    }
    return std::max({best, norm(a), norm(0.5 * (a + b)), norm(b)});
}

ShrinkResult shrink_construction(Ball S, double d_S, int iterations) {
    if (!(S.radius > 0.0))
        throw std::invalid_argument("shrink_construction: ball radius must be positive");
    if (!(d_S > 0.0))
        throw std::invalid_argument("shrink_construction: d_S must be positive");
    if (iterations < 1)
        throw std::invalid_argument("shrink_construction: need at least one iteration");

    const double R = S.radius;
    const double half = 0.5 * d_S;
    const double rise_w = half;        // rise on [R, R + d_S/2]: slope <= +2
    const double fall_w = 1.5 * d_S;   // fall on [R + d_S/2, R + 2 d_S]: slope >= -2/3
    auto bump = [R, half, rise_w, fall_w](double s) {
        return half * (smoothstep((s - R) / rise_w) -
                       smoothstep((s - R - rise_w) / fall_w));
    };
    auto dbump = [R, half, rise_w, fall_w](double s) {
        return half * (dsmoothstep((s - R) / rise_w) / rise_w -
                       dsmoothstep((s - R - rise_w) / fall_w) / fall_w);
    };

    ShrinkResult out{RadialDiffeo::custom(
                         [bump](double s) { return s + bump(s); },
                         [dbump](double s) { return 1.0 + dbump(s); }, R + 2.0 * d_S, "shrink"),
                     0.0, 0.0, false, {}, {}};
    out.achieved = out.map(R + half) - R;
    out.covering = covering_radius(out.map, S, d_S);
    out.certified = out.achieved >= d_S * (1.0 - 1e-12) &&
                    out.covering <= half * (1.0 + 1e-10);
    out.dichotomy.reserve(static_cast<std::size_t>(iterations));
    double bound = d_S;
    for (int k = 0; k < iterations; ++k) {
        bound *= 0.5;
        out.dichotomy.push_back(bound);
    }
    out.conclusion =
        "any finite splitting distance halves under iteration, so it is 0 or infinite";
    return out;
}

ModelBand distal_model_band(double d0, double r) {
    if (!(d0 > 0.0))
        throw std::invalid_argument("distal_model_band: d0 must be positive");
    if (!(r > 0.0))
        throw std::invalid_argument("distal_model_band: separation must be positive");
    return ModelBand{d0, 2.0 * d0, 1.0 / d0};
}

}  // namespace qeilab::distal
