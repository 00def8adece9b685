#pragma once

#include <functional>
#include <vector>

namespace qeilab {

// Chebyshev interpolation proxy for an expensive smooth function on [lo, hi].
//
// The fit doubles the node count until the high-order coefficients have
// decayed below `tol` relative to the largest one, then certifies itself
// against the source function on an equispaced verification grid that is
// disjoint from the interpolation nodes.  The observed maximum deviation is
// kept and must be folded into any error budget by callers that substitute
// the proxy for the source.  (Construction throws NumericError if the
// coefficients refuse to decay.)
class ChebyshevSeries {
public:
    static ChebyshevSeries fit(const std::function<double(double)>& f, double lo, double hi,
                               double tol = 1e-13, int max_points = 4097,
                               int verify_points = 211);

    double operator()(double x) const;  // Clenshaw evaluation; clamps x to [lo, hi]

    double lower() const { return lo_; }
    double upper() const { return hi_; }
    int degree() const { return static_cast<int>(coef_.size()) - 1; }
    // Max |proxy - source| observed on the verification grid.
    double fit_error() const { return fit_error_; }

private:
    ChebyshevSeries() = default;
    double lo_ = 0.0, hi_ = 1.0;
    std::vector<double> coef_;
    double fit_error_ = 0.0;
};

}  // namespace qeilab
