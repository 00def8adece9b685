#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qeilab {

// Raised when a numerical routine cannot deliver its advertised accuracy
// (quadrature failure, interpolation failure, degenerate normalization, ...).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

namespace quad {

struct Result {
    double value;
    double error;  // estimated absolute error
};

// Adaptive Gauss-Kronrod quadrature over the finite interval [a, b].
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13, int max_depth = 18);

struct TailResult {
    enum class Status { Converged, Divergent };
    Status status = Status::Divergent;
    double value = 0.0;   // partial integral up to `upper`
    double error = 0.0;   // last increment plus accumulated quadrature error
    double upper = 0.0;   // where integration stopped
    int doublings = 0;
};

// Semi-infinite integral of a nonnegative-decay integrand: integrate over
// [a, a + w], then keep doubling the probed width until the last increment
// falls below increment_rel_tol * |partial|.  If that never happens within
// max_doublings, the integral is declared Divergent -- a deterministic
// verdict, not an exception, since callers treat divergence as data.
//
// `split_points` (optional, ascending) are honored as panel boundaries so
// integrands with known jump locations are never integrated across a jump.
TailResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 double initial_width = 8.0,
                                 double increment_rel_tol = 1e-10,
                                 int max_doublings = 20,
                                 const std::vector<double>* split_points = nullptr,
                                 double rel_tol = 1e-9);

// Nodes and weights of an n-panel composite 16-point Gauss-Legendre rule
// on [a, b].  Used for the smooth tensor-product integrals where nested
// adaptivity would be wasteful.
struct Panel {
    std::vector<double> x;
    std::vector<double> w;
};
Panel composite_gauss(int panels, double a, double b);

}  // namespace quad
}  // namespace qeilab
