#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qeilab::tower {

// Certified linear lower bound on the masses of a custom tower:
//   m_r >= offset + slope * r   for all r >= from_rank.
// Without such a certificate every infinite-sum question about a custom
// tower is answered Undetermined rather than guessed at.
struct LinearTailCertificate {
    double offset = 0.0;
    double slope = 0.0;
    std::uint64_t from_rank = 1;
};

// Discrete mass spectrum 0 < m_1 <= m_2 <= ... with a positive mass gap.
// Four families:
//   arithmetic   m_r = r * m1                      (equally spaced)
//   logarithmic  m_r = log(r+1) / (2 d0)           (exponentially clustering)
//   finite       an explicit nondecreasing list
//   custom       explicit prefix + optional linear tail certificate
class MassTower {
public:
    enum class Kind { Arithmetic, Logarithmic, Finite, Custom };

    static MassTower arithmetic(double m1);
    static MassTower logarithmic(double d0);
    static MassTower finite(std::vector<double> masses);
    static MassTower custom(std::vector<double> masses,
                            std::optional<LinearTailCertificate> tail = std::nullopt);

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    std::size_t prefix_size() const { return masses_.size(); }
    double m1() const;        // smallest mass = mass gap
    double d0() const;        // logarithmic density parameter (Logarithmic only)
    double mass(std::uint64_t r) const;  // 1-based rank; prefix-only for Custom
    const std::optional<LinearTailCertificate>& tail_certificate() const { return tail_; }

    // Counting function N(u) = #{r : m_r <= u}.  Integer-valued but returned
    // as double: for logarithmic towers N(u) = floor(e^{2 d0 u} - 1) exceeds
    // every integer type long before the QEI integrals stop probing it.
    double counting(double u) const;

    // All masses in (lo, hi], capped at max_count (used to split quadrature
    // panels at the jump locations of N).
    std::vector<double> masses_between(double lo, double hi, std::size_t max_count) const;

private:
    MassTower() = default;
    Kind kind_ = Kind::Finite;
    double m1_ = 0.0;
    double d0_ = 0.0;
    std::vector<double> masses_;
    std::optional<LinearTailCertificate> tail_;
};

// ---------------------------------------------------------------------------
// Weighted sums over the spectrum

enum class Weight {
    F,           // sum exp(-4 beta m) / m^2          (necessary criterion)
    G,           // sum exp(-beta m / 4)              (sufficient criterion)
    Half,        // sum exp(-beta m / 2)              (local normality)
    Double,      // sum exp(-2 beta m)                (local normality)
    Plain,       // sum exp(-beta m)
    QuarticPhi,  // sum kappa^2 m^4 exp(-4 sqrt2 beta0 lambda m)
};

struct WeightParams {
    double beta = 1.0;    // F/G/Half/Double/Plain
    double lambda = 1.0;  // QuarticPhi
    double kappa = 1.0;   // QuarticPhi envelope amplitude
    double beta0 = 1.0;   // QuarticPhi envelope rate
};

// Divergence evidence: the analytic comparison that settles the verdict plus
// sampled partial sums showing the growth.
struct GrowthWitness {
    std::string comparison;
    std::vector<std::pair<std::uint64_t, double>> partial_sums;
};

struct SumVerdict {
    enum class Status { Convergent, Divergent, Undetermined };
    Status status = Status::Undetermined;
    double value = 0.0;            // meaningful when Convergent
    double remainder_bound = 0.0;  // |true sum - value| <= remainder_bound
    std::optional<GrowthWitness> witness;
};

// Evaluate the weighted sum with a rigorous verdict: closed-tail geometric or
// integral-test remainder bounds for convergence, analytic comparison for
// divergence, Undetermined only for custom towers without a certificate.
SumVerdict weighted_mass_sum(const MassTower& tower, Weight w, const WeightParams& p);

// sum_r |log(1 - exp(-beta m_r / 2))| -- the exponent of the exact nuclearity
// upper bound.  Same convergence threshold as Weight::Half.
SumVerdict log_weight_sum(const MassTower& tower, double beta);

// ---------------------------------------------------------------------------
// Identity check: G(beta) = (beta/4) int_0^inf exp(-beta u / 4) N(u) du

struct IdentityCheck {
    enum class Status { Ok, DivergentG, Undetermined };
    Status status = Status::Undetermined;
    double series = 0.0;     // G(beta) by summation
    double integral = 0.0;   // right-hand side by quadrature + certified tail
    double residual = 0.0;   // |series - integral|
    double tail_bound = 0.0; // analytic bound on the discarded integral tail
};

IdentityCheck counting_integral_identity_check(const MassTower& tower, double beta);

// ---------------------------------------------------------------------------
// Nuclearity classification

enum class TriState { Yes, No, Undetermined };

struct NuclearityVerdict {
    TriState necessary = TriState::Undetermined;   // F finite for all beta, log F poly in 1/beta
    TriState sufficient = TriState::Undetermined;  // G finite, poly growth in 1/beta
    double n_fit = 0.0;      // fitted exponent of log ||Xi|| <= (beta0/beta)^n (sufficient path)
    double beta0_fit = 0.0;
    double fit_residual = 0.0;  // RMS residual of the log G fit
    std::string detail;
};

struct ClassifyOptions {
    double beta_lo = 1e-3;
    double beta_hi = 1.0;
    int probe_points = 13;
    // RMS residual threshold for "log G linear in log(1/beta)"; saturating
    // (bounded) weight sums are accepted as polynomial without a fit.
    double residual_threshold = 0.05;
};

NuclearityVerdict classify_nuclearity(const MassTower& tower, const ClassifyOptions& opt = {});

// ---------------------------------------------------------------------------
// Nuclearity index bounds at inverse temperature beta and localization radius R

struct IndexBounds {
    double lower = 0.0;            // sqrt(C_lower * F(beta))
    double upper_exact = 0.0;      // exp(c R^3 / beta^3 * sum |log(1 - e^{-beta m_r/2})|)
    double upper_simplified = 0.0; // exp(C R^3 / (m1 beta^4) * G(beta))
    SumVerdict::Status status = SumVerdict::Status::Undetermined;
};

struct IndexBoundParams {
    double beta = 1.0;
    double radius = 2.0;   // must exceed 1/m1
    double c_exact = 1.0;
    double c_simplified = 1.0;
    double c_lower = 1.0;
};

IndexBounds nuclearity_index_bounds(const MassTower& tower, const IndexBoundParams& p);

// ---------------------------------------------------------------------------
// Local normality probe: both tempering sums convergent at the given beta.

struct LocalNormality {
    SumVerdict half;    // sum exp(-beta m_r / 2)
    SumVerdict twice;   // sum exp(-2 beta m_r)
    bool holds = false;
};

LocalNormality local_normality_check(const MassTower& tower, double beta);

// ---------------------------------------------------------------------------
// Tauberian counting bound.  From ||Xi|| <= exp((beta0/beta)^n) one gets
//   N(v) <= (A / beta^2) exp((beta0/beta)^n + beta v)   for every beta,
// minimized near beta* = beta0^{n/(n+1)} (n/v)^{1/(n+1)}, giving
//   N(v) <= B v^{2/(n+1)} exp(C v^{n/(n+1)}).
struct TauberianBound {
    double beta_star = 0.0;
    double bound_at_beta_star = 0.0;
    double B = 0.0;  // A (beta0^n n)^{-2/(n+1)}
    double C = 0.0;  // (1+n) n^{-n/(n+1)} beta0^{n/(n+1)}
    double envelope_at_v = 0.0;  // B v^{2/(n+1)} exp(C v^{n/(n+1)})
};

TauberianBound tauberian_counting_bound(double A, double beta0, double n, double v);

// The raw family member (A/beta^2) exp((beta0/beta)^n + beta v), exposed so
// tests can confirm beta* is (near-)optimal by direct minimization.
double tauberian_family(double A, double beta0, double n, double v, double beta);

}  // namespace qeilab::tower
