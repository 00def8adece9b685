#include "qeilab/chebyshev.hpp"

#include "qeilab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace qeilab {

namespace {

// Coefficients of the degree-N interpolant through the Chebyshev-Lobatto
// points, by the direct cosine sum.  O(N^2), which is irrelevant at the
// sizes used here.
std::vector<double> lobatto_coefficients(const std::vector<double>& fv) {
    const std::size_t n = fv.size() - 1;
    std::vector<double> c(n + 1, 0.0);
    const double pi = std::acos(-1.0);
    for (std::size_t j = 0; j <= n; ++j) {
        double s = 0.5 * (fv[0] + (j % 2 == 0 ? fv[n] : -fv[n]));
        for (std::size_t k = 1; k < n; ++k) s += fv[k] * std::cos(pi * double(j * k) / double(n));
        c[j] = 2.0 * s / double(n);
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
    return c;
}

}  // namespace

ChebyshevSeries ChebyshevSeries::fit(const std::function<double(double)>& f, double lo, double hi,
                                     double tol, int max_points, int verify_points) {
    if (!(lo < hi)) throw std::invalid_argument("ChebyshevSeries::fit: empty interval");
    if (!(tol > 0)) throw std::invalid_argument("ChebyshevSeries::fit: tolerance must be positive");

    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double pi = std::acos(-1.0);

    std::vector<double> coef;
    bool converged = false;
    for (int n = 64; n + 1 <= max_points; n *= 2) {
        std::vector<double> fv(n + 1);
        for (int k = 0; k <= n; ++k) fv[k] = f(mid + half * std::cos(pi * k / n));
        coef = lobatto_coefficients(fv);

        double cmax = 0.0;
        for (double c : coef) cmax = std::max(cmax, std::abs(c));
        double tail = 0.0;
        for (int j = (3 * n) / 4; j <= n; ++j) tail = std::max(tail, std::abs(coef[j]));
        if (cmax == 0.0 || tail <= tol * std::max(cmax, 1.0)) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NumericError("ChebyshevSeries::fit: coefficients did not decay to tolerance");

    // Drop the negligible high-order part (it only adds rounding noise).
    double cmax = 0.0;
    for (double c : coef) cmax = std::max(cmax, std::abs(c));
    std::size_t keep = coef.size();
    while (keep > 1 && std::abs(coef[keep - 1]) < 0.01 * tol * std::max(cmax, 1.0)) --keep;
    coef.resize(keep);

    ChebyshevSeries s;
    s.lo_ = lo;
    s.hi_ = hi;
    s.coef_ = std::move(coef);

    // Certify against the source away from the interpolation nodes.
    double worst = 0.0;
    for (int i = 0; i < verify_points; ++i) {
        const double x = lo + (hi - lo) * (i + 0.5) / verify_points;
        worst = std::max(worst, std::abs(s(x) - f(x)));
    }
    s.fit_error_ = worst;
    return s;
}

double ChebyshevSeries::operator()(double x) const {
    x = std::clamp(x, lo_, hi_);
    const double t = (2.0 * x - (lo_ + hi_)) / (hi_ - lo_);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t j = coef_.size(); j-- > 1;) {
        const double b0 = 2.0 * t * b1 - b2 + coef_[j];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + coef_[0];
}

}  // namespace qeilab
