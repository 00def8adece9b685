#include "qeilab/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace qeilab::quad {

Result integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, int max_depth) {
    if (!(a <= b)) throw std::invalid_argument("quad::integrate: interval is reversed");
    if (a == b) return {0.0, 0.0};
    double err = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, rel_tol, &err);
    if (!std::isfinite(value)) throw NumericError("quad::integrate: non-finite result");
    return {value, err};
}

namespace {

// Integrate over [a, b] honoring the listed interior breakpoints.  When a
// segment contains too many of them to subdivide exactly, the integrand is
// effectively smooth at the sampling resolution and we fall back to a single
// adaptive call.
Result integrate_split(const std::function<double(double)>& f, double a, double b,
                       const std::vector<double>* splits, double rel_tol) {
    constexpr std::size_t kMaxSplits = 96;
    if (splits == nullptr || splits->empty()) return integrate(f, a, b, rel_tol);

    auto lo = std::upper_bound(splits->begin(), splits->end(), a);
    auto hi = std::lower_bound(splits->begin(), splits->end(), b);
    const std::size_t n = static_cast<std::size_t>(hi - lo);
    if (n == 0 || n > kMaxSplits) return integrate(f, a, b, rel_tol);

    Result total{0.0, 0.0};
    double left = a;
    for (auto it = lo; it != hi; ++it) {
        const Result r = integrate(f, left, *it, rel_tol);
        total.value += r.value;
        total.error += r.error;
        left = *it;
    }
    const Result r = integrate(f, left, b, rel_tol);
    total.value += r.value;
    total.error += r.error;
    return total;
}

}  // namespace

TailResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 double initial_width, double increment_rel_tol,
                                 int max_doublings, const std::vector<double>* split_points,
                                 double rel_tol) {
    if (!(initial_width > 0)) throw std::invalid_argument("integrate_to_infinity: width must be positive");

    TailResult out;
    Result head = integrate_split(f, a, a + initial_width, split_points, rel_tol);
    out.value = head.value;
    out.error = head.error;
    out.upper = a + initial_width;

    double width = initial_width;
    for (int k = 0; k < max_doublings; ++k) {
        const Result inc = integrate_split(f, out.upper, out.upper + width, split_points, rel_tol);
        out.value += inc.value;
        out.error += inc.error;
        out.upper += width;
        width *= 2.0;
        out.doublings = k + 1;
        const double scale = std::max(std::abs(out.value), 1e-300);
        if (std::abs(inc.value) < increment_rel_tol * scale) {
            out.status = TailResult::Status::Converged;
            out.error += std::abs(inc.value);  // crude bound on the discarded tail
            return out;
        }
    }
    out.status = TailResult::Status::Divergent;
    return out;
}

Panel composite_gauss(int panels, double a, double b) {
    if (panels < 1) throw std::invalid_argument("composite_gauss: need at least one panel");
    if (!(a < b)) throw std::invalid_argument("composite_gauss: interval is empty");

    using rule = boost::math::quadrature::gauss<double, 16>;
    // Boost stores only the non-negative abscissas of the symmetric rule.
    std::vector<double> xs, ws;
    for (std::size_t i = 0; i < rule::abscissa().size(); ++i) {
        const double x = rule::abscissa()[i];
        const double w = rule::weights()[i];
        if (x > 0.0) {
            xs.push_back(-x);
            ws.push_back(w);
        }
    }
    std::reverse(xs.begin(), xs.end());
    std::reverse(ws.begin(), ws.end());
    for (std::size_t i = 0; i < rule::abscissa().size(); ++i) {
        xs.push_back(rule::abscissa()[i]);
        ws.push_back(rule::weights()[i]);
    }

    Panel out;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            out.x.push_back(mid + 0.5 * h * xs[i]);
            out.w.push_back(0.5 * h * ws[i]);
        }
    }
    return out;
}

}  // namespace qeilab::quad
