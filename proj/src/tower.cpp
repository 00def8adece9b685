// Weighted sums, counting functions and nuclearity diagnostics for discrete
// mass spectra.
//
// Every infinite sum here is settled analytically, never by watching partial
// sums stagnate: convergent tails carry a geometric or integral-test
// remainder bound, divergent ones carry the comparison that proves
// divergence, and towers whose tail is not certified come back Undetermined.
// For the logarithmic family m_r = log(r+1)/(2 d0) the weights reduce to
// p-series with polylog corrections,
//     exp(-c m_r) = (r+1)^{-s},   s = c / (2 d0),
// so the convergence frontier is s = 1; the F-weight carries an extra
// 1/m^2 = (2 d0 / log(r+1))^2 which rescues exactly the s = 1 boundary.

#include "qeilab/tower.hpp"

#include "qeilab/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qeilab::tower {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One weight term: prefactor * m^poly * exp(-rate * m).
struct TermSpec {
    double rate = 1.0;
    double poly = 0.0;
    double prefactor = 1.0;

    double operator()(double m) const {
        return prefactor * std::pow(m, poly) * std::exp(-rate * m);
    }
};

TermSpec make_term(Weight w, const WeightParams& p) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("weighted_mass_sum: ") + what);
    };
    switch (w) {
        case Weight::F:
            require(p.beta > 0.0, "beta must be positive");
            return {4.0 * p.beta, -2.0, 1.0};
        case Weight::G:
            require(p.beta > 0.0, "beta must be positive");
            return {p.beta / 4.0, 0.0, 1.0};
        case Weight::Half:
            require(p.beta > 0.0, "beta must be positive");
            return {p.beta / 2.0, 0.0, 1.0};
        case Weight::Double:
            require(p.beta > 0.0, "beta must be positive");
            return {2.0 * p.beta, 0.0, 1.0};
        case Weight::Plain:
            require(p.beta > 0.0, "beta must be positive");
            return {p.beta, 0.0, 1.0};
        case Weight::QuarticPhi:
            require(p.lambda > 0.0, "lambda must be positive");
            require(p.beta0 > 0.0, "beta0 must be positive");
            require(p.kappa >= 0.0, "kappa must be nonnegative");
            return {4.0 * std::sqrt(2.0) * p.beta0 * p.lambda, 4.0, p.kappa * p.kappa};
    }
    throw std::logic_error("weighted_mass_sum: unknown weight");
}

SumVerdict convergent(double value, double remainder) {
    SumVerdict v;
    v.status = SumVerdict::Status::Convergent;
    v.value = value;
    v.remainder_bound = remainder;
    return v;
}

SumVerdict divergent_with_witness(std::string comparison,
                                  const std::function<double(std::uint64_t)>& term_of_rank) {
    SumVerdict v;
    v.status = SumVerdict::Status::Divergent;
    v.value = kInf;
    v.remainder_bound = kInf;
    GrowthWitness w;
    w.comparison = std::move(comparison);
    double partial = 0.0;
    std::uint64_t next = 100;
    for (std::uint64_t r = 1; r <= 1'000'000; ++r) {
        partial += term_of_rank(r);
        if (r == next) {
            w.partial_sums.emplace_back(r, partial);
            next *= 10;
        }
    }
    v.witness = std::move(w);
    return v;
}

SumVerdict undetermined(std::string why) {
    SumVerdict v;
    v.status = SumVerdict::Status::Undetermined;
    v.value = std::numeric_limits<double>::quiet_NaN();
    v.remainder_bound = kInf;
    GrowthWitness w;
    w.comparison = std::move(why);
    v.witness = std::move(w);
    return v;
}

// --- arithmetic towers: geometric-dominated tail -------------------------

SumVerdict sum_arithmetic(const TermSpec& t, double m1) {
    const double q = std::exp(-t.rate * m1);
    double partial = 0.0;
    double remainder = kInf;
    constexpr std::uint64_t cap = 50'000'000;
    for (std::uint64_t r = 1; r <= cap; ++r) {
        partial += t(m1 * double(r));
        // Beyond rank r the term ratio is at most ((r+2)/(r+1))^poly * q.
        double ratio = q;
        if (t.poly > 0.0) ratio *= std::pow(double(r + 2) / double(r + 1), t.poly);
        if (ratio < 1.0) {
            remainder = t(m1 * double(r + 1)) / (1.0 - ratio);
            if (remainder <= 1e-15 * partial + 1e-300) break;
        }
    }
    return convergent(partial, std::isfinite(remainder) ? remainder : 0.0);
}

// --- logarithmic towers: p-series with polylog factors -------------------

// Closed-form integral-test bound: int_A^inf (log(x+1)/(2 d0))^p (x+1)^{-s} dx
// via y = log(x+1).  Exact for p in {0, 4}; for p = -2 an upper bound using
// 1/y^2 <= 1/y_A^2 (and the exact value at s = 1).
double log_tail_integral_upper(double A, double s, double p, double d0) {
    const double yA = std::log(A + 1.0);
    if (p == 0.0) return std::exp((1.0 - s) * yA) / (s - 1.0);
    if (p == 4.0) {
        const double z = (s - 1.0) * yA;
        return boost::math::tgamma(5.0, z) / std::pow(s - 1.0, 5.0) / std::pow(2.0 * d0, 4.0);
    }
    if (p == -2.0) {
        const double c = std::pow(2.0 * d0, 2.0);
        if (std::abs(s - 1.0) <= 1e-12) return c / yA;  // exact: int dy / y^2
        return c / (yA * yA) * std::exp((1.0 - s) * yA) / (s - 1.0);
    }
    throw std::logic_error("log_tail_integral_upper: unsupported poly degree");
}

double log_tail_integral_lower(double A, double s, double p, double d0) {
    const double yA = std::log(A + 1.0);
    if (p == 0.0) return std::exp((1.0 - s) * yA) / (s - 1.0);
    if (p == 4.0) {
        const double z = (s - 1.0) * yA;
        return boost::math::tgamma(5.0, z) / std::pow(s - 1.0, 5.0) / std::pow(2.0 * d0, 4.0);
    }
    if (p == -2.0) {
        if (std::abs(s - 1.0) <= 1e-12) return std::pow(2.0 * d0, 2.0) / yA;
        return 0.0;  // crude but valid
    }
    throw std::logic_error("log_tail_integral_lower: unsupported poly degree");
}

SumVerdict sum_logarithmic(const TermSpec& t, double d0) {
    const double s = t.rate / (2.0 * d0);
    const double p = t.poly;
    auto term_of_rank = [&](std::uint64_t r) {
        const double m = std::log(double(r) + 1.0) / (2.0 * d0);
        return t(m);
    };

    const bool at_boundary = std::abs(s - 1.0) <= 1e-12;
    if (s < 1.0 - 1e-12 || (at_boundary && p >= 0.0)) {
        std::ostringstream why;
        why << "terms ~ log(r+1)^" << p << " (r+1)^{-s} with s = " << s
            << (at_boundary ? " (harmonic boundary)" : " < 1");
        return divergent_with_witness(why.str(), term_of_rank);
    }

    // Convergent: s > 1, or the s = 1 boundary with the 1/m^2 weight.
    double partial = 0.0;
    std::uint64_t summed = 0;
    double value = 0.0, remainder = kInf;
    for (std::uint64_t target : {std::uint64_t(4096), std::uint64_t(65536),
                                 std::uint64_t(1048576), std::uint64_t(4194304)}) {
        for (std::uint64_t r = summed + 1; r <= target; ++r) partial += term_of_rank(r);
        summed = target;
        // Terms are decreasing beyond y = p/s, i.e. well before rank 4096.
        const double hi = log_tail_integral_upper(double(summed), s, p, d0) * t.prefactor;
        const double lo =
            std::min(hi, log_tail_integral_lower(double(summed) + 1.0, s, p, d0) * t.prefactor);
        value = partial + 0.5 * (lo + hi);
        remainder = 0.5 * (hi - lo) + 1e-15 * partial;
        if (remainder <= 1e-11 * value + 1e-300) break;
    }
    return convergent(value, remainder);
}

// --- custom towers: certified prefix + linear tail bound ------------------

SumVerdict sum_custom(const TermSpec& t, const MassTower& tw) {
    double prefix = 0.0;
    for (std::uint64_t r = 1; r <= tw.prefix_size(); ++r) prefix += t(tw.mass(r));

    const auto& cert = tw.tail_certificate();
    if (!cert || !(cert->slope > 0.0))
        return undetermined("custom tower without a positive-slope tail certificate");

    // For ranks past the prefix only the lower bound on the mass is known, so
    // the tail contribution is pinned to [0, T]; report the midpoint with the
    // half-width as remainder.
    const double peak = t.poly > 0.0 ? t.poly / t.rate : 0.0;  // argmax of m^p e^{-rate m}
    const double last = tw.mass(tw.prefix_size());
    double T = 0.0;
    for (std::uint64_t r = tw.prefix_size() + 1;; ++r) {
        double L = last;
        if (r >= cert->from_rank) L = std::max(L, cert->offset + cert->slope * double(r));
        const double b = (L >= peak) ? t(L) : t(peak);  // sup of t over masses >= L
        T += b;
        if (r >= cert->from_rank && L > peak) {
            // From here on the bounds shrink at least geometrically.
            const double ratio = t(L + cert->slope) / t(L);
            if (ratio < 1.0) {
                const double rem = b * ratio / (1.0 - ratio);
                if (rem <= 1e-15 * (prefix + T) + 1e-300) {
                    T += rem;
                    break;
                }
            }
        }
        if (r > tw.prefix_size() + 100'000'000) {
            return undetermined("custom tower: tail certificate too weak to sum");
        }
    }
    return convergent(prefix + 0.5 * T, 0.5 * T);
}

}  // namespace

// ---------------------------------------------------------------------------
// MassTower

MassTower MassTower::arithmetic(double m1) {
    if (!(m1 > 0.0)) throw std::invalid_argument("MassTower: mass gap must be positive");
    MassTower t;
    t.kind_ = Kind::Arithmetic;
    t.m1_ = m1;
    return t;
}

MassTower MassTower::logarithmic(double d0) {
    if (!(d0 > 0.0)) throw std::invalid_argument("MassTower: d0 must be positive");
    MassTower t;
    t.kind_ = Kind::Logarithmic;
    t.d0_ = d0;
    t.m1_ = std::log(2.0) / (2.0 * d0);
    return t;
}

namespace {
void check_mass_list(const std::vector<double>& m) {
    if (m.empty()) throw std::invalid_argument("MassTower: mass list must be nonempty");
    if (!(m.front() > 0.0))
        throw std::invalid_argument("MassTower: mass gap must be positive");
    if (!std::is_sorted(m.begin(), m.end()))
        throw std::invalid_argument("MassTower: masses must be nondecreasing");
}
}  // namespace

MassTower MassTower::finite(std::vector<double> masses) {
    check_mass_list(masses);
    MassTower t;
    t.kind_ = Kind::Finite;
    t.masses_ = std::move(masses);
    t.m1_ = t.masses_.front();
    return t;
}

MassTower MassTower::custom(std::vector<double> masses, std::optional<LinearTailCertificate> tail) {
    check_mass_list(masses);
    if (tail) {
        if (tail->from_rank < 1)
            throw std::invalid_argument("MassTower: certificate from_rank must be >= 1");
        for (std::uint64_t r = tail->from_rank;
             r <= masses.size(); ++r) {
            if (masses[r - 1] < tail->offset + tail->slope * double(r) - 1e-12)
                throw std::invalid_argument("MassTower: certificate contradicts listed masses");
        }
    }
    MassTower t;
    t.kind_ = Kind::Custom;
    t.masses_ = std::move(masses);
    t.m1_ = t.masses_.front();
    t.tail_ = tail;
    return t;
}

double MassTower::m1() const { return m1_; }

double MassTower::d0() const {
    if (kind_ != Kind::Logarithmic) throw std::logic_error("MassTower::d0: not a logarithmic tower");
    return d0_;
}

double MassTower::mass(std::uint64_t r) const {
    if (r < 1) throw std::out_of_range("MassTower::mass: ranks are 1-based");
    switch (kind_) {
        case Kind::Arithmetic: return double(r) * m1_;
        case Kind::Logarithmic: return std::log(double(r) + 1.0) / (2.0 * d0_);
        case Kind::Finite:
        case Kind::Custom:
            if (r > masses_.size())
                throw std::out_of_range("MassTower::mass: rank beyond the listed masses");
            return masses_[r - 1];
    }
    throw std::logic_error("MassTower::mass: unknown kind");
}

double MassTower::counting(double u) const {
    if (!(u > 0.0)) return 0.0;
    switch (kind_) {
        case Kind::Arithmetic: {
            if (u < m1_) return 0.0;
            double n = std::floor(u / m1_);
            // Settle the boundary by direct comparison, immune to the division rounding.
            while ((n + 1.0) * m1_ <= u) n += 1.0;
            while (n >= 1.0 && n * m1_ > u) n -= 1.0;
            return n;
        }
        case Kind::Logarithmic: {
            const double x = std::expm1(2.0 * d0_ * u);
            if (!(x >= 1.0)) return 0.0;
            if (x > 4.5e15) return std::floor(x);  // boundary fuzz is meaningless here
            double n = std::floor(x);
            while (std::log(n + 2.0) <= 2.0 * d0_ * u) n += 1.0;
            while (n >= 1.0 && std::log(n + 1.0) > 2.0 * d0_ * u) n -= 1.0;
            return n;
        }
        case Kind::Finite:
            return double(std::upper_bound(masses_.begin(), masses_.end(), u) - masses_.begin());
        case Kind::Custom:
            if (u >= masses_.back())
                throw std::domain_error("MassTower::counting: beyond the listed prefix of a custom tower");
            return double(std::upper_bound(masses_.begin(), masses_.end(), u) - masses_.begin());
    }
    throw std::logic_error("MassTower::counting: unknown kind");
}

std::vector<double> MassTower::masses_between(double lo, double hi, std::size_t max_count) const {
    std::vector<double> out;
    if (!(hi > lo)) return out;
    switch (kind_) {
        case Kind::Arithmetic:
        case Kind::Logarithmic: {
            const double n_lo = counting(std::max(lo, 0.0));
            const double n_hi = counting(hi);
            if (n_hi - n_lo > double(max_count)) return out;  // too dense to split
            for (std::uint64_t r = std::uint64_t(n_lo) + 1; r <= std::uint64_t(n_hi); ++r) {
                const double m = mass(r);
                if (m > lo && m <= hi) out.push_back(m);
            }
            return out;
        }
        case Kind::Finite:
        case Kind::Custom: {
            for (double m : masses_) {
                if (m > lo && m <= hi) {
                    out.push_back(m);
                    if (out.size() > max_count) {
                        out.clear();
                        return out;
                    }
                }
            }
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Weighted sums

SumVerdict weighted_mass_sum(const MassTower& tower, Weight w, const WeightParams& p) {
    const TermSpec t = make_term(w, p);
    switch (tower.kind()) {
        case MassTower::Kind::Arithmetic: return sum_arithmetic(t, tower.m1());
        case MassTower::Kind::Logarithmic: return sum_logarithmic(t, tower.d0());
        case MassTower::Kind::Finite: {
            double total = 0.0;
            for (std::uint64_t r = 1; r <= tower.prefix_size(); ++r) total += t(tower.mass(r));
            return convergent(total, 1e-15 * total * double(tower.prefix_size()));
        }
        case MassTower::Kind::Custom: return sum_custom(t, tower);
    }
    throw std::logic_error("weighted_mass_sum: unknown tower kind");
}

SumVerdict log_weight_sum(const MassTower& tower, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("log_weight_sum: beta must be positive");
    auto term = [beta](double m) { return -std::log1p(-std::exp(-beta * m / 2.0)); };

    switch (tower.kind()) {
        case MassTower::Kind::Finite: {
            double total = 0.0;
            for (std::uint64_t r = 1; r <= tower.prefix_size(); ++r) total += term(tower.mass(r));
            return convergent(total, 1e-15 * total * double(tower.prefix_size()));
        }
        case MassTower::Kind::Arithmetic: {
            const double m1 = tower.m1();
            double partial = 0.0;
            for (std::uint64_t r = 1; r <= 50'000'000; ++r) {
                partial += term(m1 * double(r));
                const double x = std::exp(-beta * m1 * double(r + 1) / 2.0);
                if (x <= 0.5) {
                    // |log(1-x)| <= 2x for x <= 1/2, then geometric.
                    const double rem = 2.0 * x / (1.0 - std::exp(-beta * m1 / 2.0));
                    if (rem <= 1e-15 * partial + 1e-300) return convergent(partial, rem);
                }
            }
            return convergent(partial, kInf);
        }
        case MassTower::Kind::Logarithmic: {
            const double s2 = beta / (4.0 * tower.d0());
            auto term_of_rank = [&](std::uint64_t r) {
                return term(std::log(double(r) + 1.0) / (2.0 * tower.d0()));
            };
            if (s2 <= 1.0 + 1e-12) {
                std::ostringstream why;
                why << "|log(1 - (r+1)^{-s})| >= (r+1)^{-s} with s = " << s2 << " <= 1";
                return divergent_with_witness(why.str(), term_of_rank);
            }
            double partial = 0.0;
            for (std::uint64_t r = 1; r <= 20'000'000; ++r) {
                partial += term_of_rank(r);
                const double x = std::pow(double(r) + 2.0, -s2);
                if (x <= 0.5) {
                    const double rem = 2.0 * std::pow(double(r) + 1.0, 1.0 - s2) / (s2 - 1.0);
                    if (rem <= 1e-11 * partial + 1e-300) return convergent(partial, rem);
                }
            }
            return convergent(partial, std::pow(2e7, 1.0 - s2) / (s2 - 1.0) * 2.0);
        }
        case MassTower::Kind::Custom: {
            double prefix = 0.0;
            for (std::uint64_t r = 1; r <= tower.prefix_size(); ++r) prefix += term(tower.mass(r));
            const auto& cert = tower.tail_certificate();
            if (!cert || !(cert->slope > 0.0))
                return undetermined("custom tower without a positive-slope tail certificate");
            double T = 0.0;
            const double last = tower.mass(tower.prefix_size());
            for (std::uint64_t r = tower.prefix_size() + 1;; ++r) {
                double L = last;
                if (r >= cert->from_rank) L = std::max(L, cert->offset + cert->slope * double(r));
                T += term(L);
                const double x = std::exp(-beta * (L + cert->slope) / 2.0);
                if (r >= cert->from_rank && x <= 0.5) {
                    const double rem = 2.0 * x / (1.0 - std::exp(-beta * cert->slope / 2.0));
                    if (rem <= 1e-15 * (prefix + T) + 1e-300) {
                        T += rem;
                        break;
                    }
                }
                if (r > tower.prefix_size() + 100'000'000)
                    return undetermined("custom tower: tail certificate too weak to sum");
            }
            return convergent(prefix + 0.5 * T, 0.5 * T);
        }
    }
    throw std::logic_error("log_weight_sum: unknown tower kind");
}

// ---------------------------------------------------------------------------
// Counting-integral identity

IdentityCheck counting_integral_identity_check(const MassTower& tower, double beta) {
    if (!(beta > 0.0))
        throw std::invalid_argument("counting_integral_identity_check: beta must be positive");

    IdentityCheck out;
    const SumVerdict series = weighted_mass_sum(tower, Weight::G, {.beta = beta});
    if (series.status == SumVerdict::Status::Divergent) {
        out.status = IdentityCheck::Status::DivergentG;
        out.series = kInf;
        return out;
    }
    if (series.status == SumVerdict::Status::Undetermined) {
        out.status = IdentityCheck::Status::Undetermined;
        return out;
    }
    out.series = series.value;

    // RHS = (beta/4) int_0^inf e^{-beta u / 4} N(u) du with N sampled pointwise.
    // Phase 1 walks the masses one by one (each inter-mass interval is smooth),
    // phase 2 covers the dense remainder in fixed-width panels, and the far
    // tail is bounded with the descriptor's counting majorant.
    auto integrand = [&](double u) { return std::exp(-beta * u / 4.0) * tower.counting(u); };

    // Choose the truncation point from the tail bound.
    auto tail_bound_at = [&](double U) -> double {
        const double e = std::exp(-beta * U / 4.0);
        switch (tower.kind()) {
            case MassTower::Kind::Arithmetic:
                return (4.0 / beta) * (U + 4.0 / beta) * e / tower.m1();
            case MassTower::Kind::Logarithmic: {
                const double gap = beta / 4.0 - 2.0 * tower.d0();
                return std::exp(-gap * U) / gap;  // gap > 0 whenever G converges
            }
            case MassTower::Kind::Finite:
                return double(tower.prefix_size()) * (4.0 / beta) * e;
            case MassTower::Kind::Custom:
                return kInf;  // not reached: custom G is never Convergent-with-counting
        }
        return kInf;
    };

    double U = 16.0 / beta;
    for (int i = 0; i < 40 && tail_bound_at(U) * (beta / 4.0) >
                                  1e-13 * std::max(out.series, 1e-30);
         ++i)
        U *= 1.5;
    out.tail_bound = tail_bound_at(U) * (beta / 4.0);

    double acc = 0.0;
    double left = 0.0;
    // Phase 1: follow individual masses while they remain sparse.  N is
    // exactly constant between consecutive masses and the jumps sit on the
    // panel edges (Gauss nodes are strictly interior), so each piece is a
    // plain exponential and a fixed Gauss rule is exact to rounding.  An
    // error-estimate-driven adaptive rule is deliberately avoided here: on
    // intervals this narrow the piece integral is so small that the demanded
    // absolute error falls below the rounding noise of the rule's own error
    // estimate and it recurses to full depth chasing it.
    const double scale = 4.0 / beta;
    const double gap_min = scale / 4096.0;
    const std::size_t walk_cap = 200'000;
    for (std::size_t r = 1; r <= walk_cap; ++r) {
        if ((tower.is_finite() || tower.kind() == MassTower::Kind::Custom) &&
            r > tower.prefix_size())
            break;
        const double m = tower.mass(r);
        if (m > U) break;
        if (m <= left) continue;
        if (r > 1 && m - left < gap_min) break;  // dense regime: hand off to phase 2
        const double ratio = (m - left) / scale;
        const int n_panels = ratio >= 4095.0 ? 4096 : 1 + int(ratio);
        const quad::Panel panel = quad::composite_gauss(n_panels, left, m);
        double piece = 0.0;
        for (std::size_t i = 0; i < panel.x.size(); ++i)
            piece += panel.w[i] * integrand(panel.x[i]);
        acc += piece;
        left = m;
    }
    // Phase 2: the dense remainder up to U.  The integrand is a nondecreasing
    // staircase times the positive decreasing weight w(u) = e^{-beta u/4}, so
    // on a panel [x, y] the piece integral is bracketed between N(x)W and
    // N(y)W with W = (4/beta)(w(x) - w(y)) in closed form.  Adaptive rules
    // are hopeless here -- they would try to resolve each of the ~N(U) unit
    // jumps -- while the bracket only needs enough panels to make the
    // enclosure width small; it is reported as part of the remainder.
    if (left < U) {
        const double target = 1e-8 * std::max(out.series, 1e-30) * (4.0 / beta);
        const std::size_t panel_cap = std::size_t(1) << 22;
        double h = 4.0 / beta;
        for (int round = 0;; ++round) {
            const double n_est = (U - left) / h;
            bool final_round = round >= 8;
            std::size_t n;
            if (n_est >= double(panel_cap)) {
                n = panel_cap;
                h = (U - left) / double(n);
                final_round = true;
            } else {
                n = std::size_t(n_est) + 1;
            }
            double mid_sum = 0.0;
            double half_width = 0.0;
            double x = left;
            double nx = tower.counting(x);
            double wx = std::exp(-beta * x / 4.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double y = (i + 1 == n) ? U : left + h * double(i + 1);
                const double ny = tower.counting(y);
                const double wy = std::exp(-beta * y / 4.0);
                const double W = (4.0 / beta) * (wx - wy);
                mid_sum += 0.5 * (nx + ny) * W;
                half_width += 0.5 * (ny - nx) * W;
                x = y;
                nx = ny;
                wx = wy;
            }
            if (half_width <= target || final_round) {
                acc += mid_sum;
                out.tail_bound += half_width * (beta / 4.0);
                break;
            }
            // The enclosure width scales linearly with h; jump straight to
            // the panel width that should land under the target, then verify.
            h *= std::min(0.5, 0.5 * target / half_width);
        }
    }

    out.integral = acc * beta / 4.0;
    out.residual = std::abs(out.series - out.integral);
    out.status = IdentityCheck::Status::Ok;
    return out;
}

// ---------------------------------------------------------------------------
// Nuclearity classification

namespace {

struct LineFit {
    double slope = 0.0, intercept = 0.0, rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ssr += r * r;
    }
    f.rms = std::sqrt(ssr / double(n));
    return f;
}

}  // namespace

NuclearityVerdict classify_nuclearity(const MassTower& tower, const ClassifyOptions& opt) {
    if (!(opt.beta_lo > 0.0) || !(opt.beta_hi > opt.beta_lo) || opt.probe_points < 3)
        throw std::invalid_argument("classify_nuclearity: bad probe grid");

    NuclearityVerdict v;
    std::ostringstream detail;

    switch (tower.kind()) {
        case MassTower::Kind::Custom:
            v.necessary = TriState::Undetermined;
            v.sufficient = TriState::Undetermined;
            detail << "custom tower: infinite-sum verdicts require a tail certificate "
                      "strong enough to pin values; classification left undetermined";
            v.detail = detail.str();
            return v;

        case MassTower::Kind::Logarithmic: {
            // F diverges once 2 beta / d0 <= 1 and G once beta / (8 d0) <= 1,
            // so neither weight is finite for every beta.
            const double d0 = tower.d0();
            const SumVerdict f_bad =
                weighted_mass_sum(tower, Weight::F, {.beta = 0.25 * d0});
            const SumVerdict g_bad =
                weighted_mass_sum(tower, Weight::G, {.beta = 4.0 * d0});
            v.necessary =
                f_bad.status == SumVerdict::Status::Divergent ? TriState::No : TriState::Undetermined;
            v.sufficient =
                g_bad.status == SumVerdict::Status::Divergent ? TriState::No : TriState::Undetermined;
            detail << "logarithmic tower (d0 = " << d0 << "): F diverges for beta <= " << d0 / 2.0
                   << ", G diverges for beta <= " << 8.0 * d0;
            v.detail = detail.str();
            return v;
        }

        case MassTower::Kind::Finite: {
            // Both weights are finite sums, bounded uniformly in beta by the
            // level count, hence trivially of polynomial growth.
            v.necessary = TriState::Yes;
            v.sufficient = TriState::Yes;
            v.n_fit = 4.0;
            v.beta0_fit = std::pow(double(tower.prefix_size()) / tower.m1(), 0.25);
            detail << "finite tower with " << tower.prefix_size()
                   << " levels: F and G bounded by the level count for every beta";
            v.detail = detail.str();
            return v;
        }

        case MassTower::Kind::Arithmetic:
            break;  // handled below
    }

    // Arithmetic tower.  F(beta) increases to sum 1/m_r^2 = pi^2/(6 m1^2) as
    // beta -> 0, so log F is bounded and in particular polynomial in 1/beta.
    const double m1 = tower.m1();
    std::vector<double> X, logF, logG;
    for (int j = 0; j < opt.probe_points; ++j) {
        const double beta =
            opt.beta_lo * std::pow(opt.beta_hi / opt.beta_lo, double(j) / (opt.probe_points - 1));
        const SumVerdict f = weighted_mass_sum(tower, Weight::F, {.beta = beta});
        const SumVerdict g = weighted_mass_sum(tower, Weight::G, {.beta = beta});
        if (f.status != SumVerdict::Status::Convergent ||
            g.status != SumVerdict::Status::Convergent) {
            v.necessary = TriState::No;
            v.sufficient = TriState::No;
            v.detail = "arithmetic tower: unexpected divergence on the probe grid";
            return v;
        }
        X.push_back(std::log(1.0 / beta));
        logF.push_back(std::log(f.value));
        logG.push_back(std::log(g.value));
    }

    const double f_cap = std::acos(-1.0) * std::acos(-1.0) / (6.0 * m1 * m1);
    v.necessary = TriState::Yes;

    // Sufficient criterion: G must grow at most polynomially in 1/beta, i.e.
    // log G linear in log(1/beta).  The fit residual is RMS per point.
    const LineFit fit = least_squares(X, logG);
    v.fit_residual = fit.rms;
    if (fit.rms < opt.residual_threshold && fit.slope >= 0.0) {
        v.sufficient = TriState::Yes;
        // With unit bound constants, log ||Xi|| <= R^3/(m1 beta^4) G(beta)
        // ~ (beta0/beta)^n gives n = slope + 4.
        v.n_fit = fit.slope + 4.0;
        v.beta0_fit = std::pow(std::exp(fit.intercept) / m1, 1.0 / v.n_fit);
    } else {
        v.sufficient = TriState::Undetermined;
    }
    detail << "arithmetic tower (m1 = " << m1 << "): F(beta) <= " << f_cap
           << " for all beta; log G fit slope " << fit.slope << ", rms " << fit.rms;
    v.detail = detail.str();
    return v;
}

// ---------------------------------------------------------------------------
// Index bounds and local normality

IndexBounds nuclearity_index_bounds(const MassTower& tower, const IndexBoundParams& p) {
    if (!(p.beta > 0.0)) throw std::invalid_argument("nuclearity_index_bounds: beta must be positive");
    if (!(p.radius > 1.0 / tower.m1()))
        throw std::invalid_argument(
            "nuclearity_index_bounds: localization radius must exceed the inverse mass gap");

    IndexBounds out;
    const SumVerdict F = weighted_mass_sum(tower, Weight::F, {.beta = p.beta});
    const SumVerdict G = weighted_mass_sum(tower, Weight::G, {.beta = p.beta});
    const SumVerdict L = log_weight_sum(tower, p.beta);

    auto worst = [](SumVerdict::Status a, SumVerdict::Status b) {
        using S = SumVerdict::Status;
        if (a == S::Divergent || b == S::Divergent) return S::Divergent;
        if (a == S::Undetermined || b == S::Undetermined) return S::Undetermined;
        return S::Convergent;
    };
    out.status = worst(F.status, worst(G.status, L.status));
    if (out.status != SumVerdict::Status::Convergent) {
        out.lower = F.status == SumVerdict::Status::Convergent
                        ? std::sqrt(p.c_lower * F.value)
                        : kInf;
        out.upper_exact = kInf;
        out.upper_simplified = kInf;
        return out;
    }

    const double R3 = p.radius * p.radius * p.radius;
    out.lower = std::sqrt(p.c_lower * F.value);
    out.upper_exact = std::exp(p.c_exact * R3 / std::pow(p.beta, 3.0) * L.value);
    out.upper_simplified =
        std::exp(p.c_simplified * R3 / (tower.m1() * std::pow(p.beta, 4.0)) * G.value);
    return out;
}

LocalNormality local_normality_check(const MassTower& tower, double beta) {
    LocalNormality out;
    out.half = weighted_mass_sum(tower, Weight::Half, {.beta = beta});
    out.twice = weighted_mass_sum(tower, Weight::Double, {.beta = beta});
    out.holds = out.half.status == SumVerdict::Status::Convergent &&
                out.twice.status == SumVerdict::Status::Convergent;
    return out;
}

// ---------------------------------------------------------------------------
// Tauberian bound

double tauberian_family(double A, double beta0, double n, double v, double beta) {
    if (!(A > 0) || !(beta0 > 0) || !(n > 0) || !(v > 0) || !(beta > 0))
        throw std::invalid_argument("tauberian_family: all parameters must be positive");
    return A / (beta * beta) * std::exp(std::pow(beta0 / beta, n) + beta * v);
}

TauberianBound tauberian_counting_bound(double A, double beta0, double n, double v) {
    if (!(A > 0) || !(beta0 > 0) || !(n > 0) || !(v > 0))
        throw std::invalid_argument("tauberian_counting_bound: all parameters must be positive");

    TauberianBound b;
    b.beta_star = std::pow(beta0, n / (n + 1.0)) * std::pow(n / v, 1.0 / (n + 1.0));
    b.bound_at_beta_star = tauberian_family(A, beta0, n, v, b.beta_star);
    b.B = A * std::pow(std::pow(beta0, n) * n, -2.0 / (n + 1.0));
    b.C = (1.0 + n) * std::pow(n, -n / (n + 1.0)) * std::pow(beta0, n / (n + 1.0));
    b.envelope_at_v = b.B * std::pow(v, 2.0 / (n + 1.0)) * std::exp(b.C * std::pow(v, n / (n + 1.0)));
    return b;
}

}  // namespace qeilab::tower
