#pragma once

#include "qeilab/negstate.hpp"
#include "qeilab/tower.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qeilab::cli {

// Configuration failure (malformed JSON, unknown keys, module invariant
// violations).  The CLI maps it to exit status 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Analysis { TowerReport, QeiReport, NegstateVerify, TestfnBuild, DistalDemo };

std::string analysis_name(Analysis a);
Analysis parse_analysis(const std::string& name);  // throws ConfigError on unknown names

struct OutputSpec {
    std::string dir = "out";
    std::string prefix = "run";
    bool plots = false;
};

struct TestFunctionSpec {
    double support_radius = 1.0;  // mollifier radius a; eta is supported in [-2a, 2a]
    double beta0 = 1.0;           // Lorentzian width = envelope decay rate
    std::string shape = "bump";   // only the exponential bump is implemented
};

struct TowerSpec {
    std::string kind = "arithmetic";  // arithmetic | logarithmic | finite
    double m1 = 1.0;                  // arithmetic: m_r = r m1
    double d0 = 1.0;                  // logarithmic: m_r = log(r+1)/(2 d0)
    std::vector<double> masses;       // finite: explicit nondecreasing list
};

struct ConstantsSpec {
    double C = 1.0;             // energy-bound constant
    double c_exact = 1.0;       // exact index-bound constant
    double c_simplified = 1.0;  // simplified index-bound constant
    double C_lower = 1.0;       // lower index-bound constant
    double A = 1.0;             // Tauberian amplitude
    int d = 4;                  // spacetime dimension
    double R = 2.0;             // localization radius (must exceed 1/m1)
};

struct GridsSpec {
    std::vector<double> beta{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> lambda{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> m{1.0, 2.0, 4.0};
    std::vector<double> u;  // empty: the analysis picks its canonical grid
};

struct NegstateSpec {
    double m0 = 0.5;  // smallest admissible field mass
    negstate::ProfileSpec radial{0.75, 0.25};
    negstate::ProfileSpec angular{0.75, 0.25};
    std::uint64_t mc_samples = 200000;  // 0 disables the Monte Carlo cross-check
};

struct DistalSpec {
    double lambda = 2.0;       // scaling factor probed for kappa
    double ball_radius = 1.0;  // origin-centered ball S
    double separation = 0.5;   // enlargement r
    double d_s = 1.0;          // shrink-construction distance
    int iterations = 12;       // dichotomy halving steps
    double d0 = 1.0;           // model band parameter
};

struct RunConfig {
    Analysis analysis = Analysis::TowerReport;
    bool analysis_specified = false;  // whether the file named the analysis
    std::uint64_t seed = 0;
    OutputSpec output;
    TestFunctionSpec test_function;
    TowerSpec tower;
    ConstantsSpec constants;
    GridsSpec grids;
    NegstateSpec negstate;
    DistalSpec distal;
};

// Strict parse: unknown keys anywhere are rejected with their section named,
// and every referenced module spec is validated (by constructing it) before
// any analysis runs.  `origin` labels error messages.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<memory>");
RunConfig parse_config(const std::string& path);

// Tower construction shared by validation and the analyses.
tower::MassTower build_tower(const TowerSpec& spec);

}  // namespace qeilab::cli
