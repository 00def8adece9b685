#include "qeilab/analyses.hpp"

#include "qeilab/chebyshev.hpp"
#include "qeilab/distal.hpp"
#include "qeilab/negstate.hpp"
#include "qeilab/qei.hpp"
#include "qeilab/quadrature.hpp"
#include "qeilab/report.hpp"
#include "qeilab/testfn.hpp"
#include "qeilab/tower.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <utility>

namespace qeilab::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kSqrt2 = 1.4142135623730951;

// ---------------------------------------------------------------------------
// Small shared plumbing

struct Emitter {
    const RunConfig& cfg;
    RunArtifacts& art;

    std::string path(const std::string& stem) const {
        return cfg.output.dir + "/" + cfg.output.prefix + "-" + stem;
    }
    void file(const std::string& stem, const std::string& content) {
        const std::string p = path(stem);
        write_text_file(p, content);
        art.files_written.push_back(p);
    }
    void plot(const std::string& stem, const PlotSpec& spec) {
        if (!cfg.output.plots) return;
        const std::string p = path(stem);
        emit_plot(spec, p);
        art.files_written.push_back(p);
    }
};

struct BuiltTestFunction {
    testfn::TestFunction f;
    testfn::ExponentialEnvelope env;
};

BuiltTestFunction make_test_function(const TestFunctionSpec& spec) {
    testfn::Mollifier chi(spec.support_radius);
    testfn::EtaFunction eta = testfn::self_convolve(chi);
    testfn::TestFunction f = testfn::build_test_function(std::move(eta), spec.beta0);
    testfn::ExponentialEnvelope env = testfn::kappa_envelope(f);
    return {std::move(f), env};
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * double(i) / double(n - 1);
    return out;
}

const char* sum_status_str(tower::SumVerdict::Status s) {
    switch (s) {
        case tower::SumVerdict::Status::Convergent: return "convergent";
        case tower::SumVerdict::Status::Divergent: return "divergent";
        case tower::SumVerdict::Status::Undetermined: return "undetermined";
    }
    return "undetermined";
}

const char* tristate_str(tower::TriState t) {
    switch (t) {
        case tower::TriState::Yes: return "yes";
        case tower::TriState::No: return "no";
        case tower::TriState::Undetermined: return "undetermined";
    }
    return "undetermined";
}

const char* identity_status_str(tower::IdentityCheck::Status s) {
    switch (s) {
        case tower::IdentityCheck::Status::Ok: return "ok";
        case tower::IdentityCheck::Status::DivergentG: return "divergent-G";
        case tower::IdentityCheck::Status::Undetermined: return "undetermined";
    }
    return "undetermined";
}

const char* qei_status_str(qei::QeiBound::Status s) {
    return s == qei::QeiBound::Status::Finite ? "finite" : "divergent";
}

ordered_json verdict_json(const tower::SumVerdict& v) {
    ordered_json j;
    j["status"] = sum_status_str(v.status);
    if (v.status == tower::SumVerdict::Status::Convergent) {
        j["value"] = v.value;
        j["remainder_bound"] = v.remainder_bound;
    }
    if (v.witness) j["comparison"] = v.witness->comparison;
    return j;
}

ordered_json tower_json(const TowerSpec& spec, const tower::MassTower& tw) {
    ordered_json j;
    j["kind"] = spec.kind;
    j["m1"] = tw.m1();
    if (tw.kind() == tower::MassTower::Kind::Logarithmic) j["d0"] = tw.d0();
    if (tw.is_finite()) j["levels"] = tw.prefix_size();
    return j;
}

// Fast |f-hat| usable inside adaptive integrals: a certified Chebyshev proxy
// over the window where the transform is measurable, continued at the
// asymptotic decay rate beta0 beyond it (where the true value is ~e^{-60}
// and a direct quadrature would only return noise).
qei::Transform make_transform_proxy(const testfn::TestFunction& f) {
    const double w_cap = 60.0 / f.beta0();
    ChebyshevSeries proxy =
        ChebyshevSeries::fit([&f](double w) { return f.fourier(w); }, 0.0, w_cap, 1e-12);
    const double tail_amp = std::abs(proxy(w_cap));
    const double rate = f.beta0();
    return [proxy = std::move(proxy), w_cap, tail_amp, rate](double u) {
        return u <= w_cap ? std::abs(proxy(u)) : tail_amp * std::exp(-rate * (u - w_cap));
    };
}

// ---------------------------------------------------------------------------
// tower-report

RunArtifacts tower_report(const RunConfig& cfg) {
    RunArtifacts art;
    Emitter em{cfg, art};
    const tower::MassTower tw = build_tower(cfg.tower);

    ordered_json summary;
    summary["analysis"] = "tower-report";
    summary["seed"] = cfg.seed;
    summary["tower"] = tower_json(cfg.tower, tw);

    const bool radius_ok = cfg.constants.R * tw.m1() > 1.0;
    summary["radius"] = cfg.constants.R;
    summary["radius_admissible"] = radius_ok;

    CsvWriter csv({"beta", "F_status", "F_value", "F_remainder", "G_status", "G_value",
                   "G_remainder", "bounds_status", "lower", "upper_exact",
                   "upper_simplified"});
    ordered_json sums = ordered_json::array();
    PlotSpec sum_plot;
    sum_plot.title = "tempering sums over the mass spectrum";
    sum_plot.x_label = "beta";
    sum_plot.y_label = "sum value";
    sum_plot.log_x = true;
    sum_plot.log_y = true;
    Series f_series{"F(beta)", {}, {}, false, true};
    Series g_series{"G(beta)", {}, {}, false, true};

    for (double beta : cfg.grids.beta) {
        const auto F = tower::weighted_mass_sum(tw, tower::Weight::F, {.beta = beta});
        const auto G = tower::weighted_mass_sum(tw, tower::Weight::G, {.beta = beta});

        std::vector<std::string> row{CsvWriter::format(beta), sum_status_str(F.status)};
        if (F.status == tower::SumVerdict::Status::Convergent) {
            row.push_back(CsvWriter::format(F.value));
            row.push_back(CsvWriter::format(F.remainder_bound));
            if (F.value > 0.0) {
                f_series.x.push_back(beta);
                f_series.y.push_back(F.value);
            }
        } else {
            row.push_back("");
            row.push_back("");
        }
        row.push_back(sum_status_str(G.status));
        if (G.status == tower::SumVerdict::Status::Convergent) {
            row.push_back(CsvWriter::format(G.value));
            row.push_back(CsvWriter::format(G.remainder_bound));
            if (G.value > 0.0) {
                g_series.x.push_back(beta);
                g_series.y.push_back(G.value);
            }
        } else {
            row.push_back("");
            row.push_back("");
        }

        ordered_json entry;
        entry["beta"] = beta;
        entry["F"] = verdict_json(F);
        entry["G"] = verdict_json(G);
        if (radius_ok) {
            const tower::IndexBounds ib = tower::nuclearity_index_bounds(
                tw, {.beta = beta, .radius = cfg.constants.R, .c_exact = cfg.constants.c_exact,
                     .c_simplified = cfg.constants.c_simplified,
                     .c_lower = cfg.constants.C_lower});
            row.push_back(sum_status_str(ib.status));
            if (ib.status == tower::SumVerdict::Status::Convergent) {
                // The exponential upper bounds can exceed double range at
                // small beta; report that explicitly instead of inf/null.
                const auto cell = [](double v) {
                    return std::isfinite(v) ? CsvWriter::format(v) : std::string("overflow");
                };
                const auto jval = [](double v) {
                    return std::isfinite(v) ? ordered_json(v) : ordered_json("overflow");
                };
                row.push_back(cell(ib.lower));
                row.push_back(cell(ib.upper_exact));
                row.push_back(cell(ib.upper_simplified));
                entry["index_bounds"] = {{"status", sum_status_str(ib.status)},
                                         {"lower", jval(ib.lower)},
                                         {"upper_exact", jval(ib.upper_exact)},
                                         {"upper_simplified", jval(ib.upper_simplified)}};
            } else {
                row.push_back("");
                row.push_back("");
                row.push_back("");
                entry["index_bounds"] = {{"status", sum_status_str(ib.status)}};
            }
        } else {
            row.insert(row.end(), {"skipped", "", "", ""});
            entry["index_bounds"] = {{"status", "skipped (radius <= 1/m1)"}};
        }
        csv.add_row(row);
        sums.push_back(std::move(entry));
    }
    em.file("tower-sums.csv", csv.str());
    summary["sums"] = std::move(sums);

    const tower::NuclearityVerdict verdict = tower::classify_nuclearity(tw);
    summary["classification"] = {{"necessary", tristate_str(verdict.necessary)},
                                 {"sufficient", tristate_str(verdict.sufficient)},
                                 {"n_fit", verdict.n_fit},
                                 {"beta0_fit", verdict.beta0_fit},
                                 {"fit_residual", verdict.fit_residual},
                                 {"detail", verdict.detail}};

    const double beta_id =
        tw.kind() == tower::MassTower::Kind::Logarithmic ? 16.0 * tw.d0() : 4.0;
    const tower::IdentityCheck id = tower::counting_integral_identity_check(tw, beta_id);
    summary["identity_check"] = {{"beta", beta_id},
                                 {"status", identity_status_str(id.status)},
                                 {"series", id.series},
                                 {"integral", id.integral},
                                 {"residual", id.residual},
                                 {"tail_bound", id.tail_bound}};

    // Counting function on the canonical (or user-supplied) grid.
    std::vector<double> u_grid = cfg.grids.u;
    if (u_grid.empty()) {
        double u_hi = 12.0 * tw.m1();
        if (tw.kind() == tower::MassTower::Kind::Logarithmic)
            u_hi = std::log(100.0) / (2.0 * tw.d0());
        if (tw.is_finite()) u_hi = 1.25 * tw.mass(tw.prefix_size());
        u_grid = linspace(0.0, u_hi, 241);
    }
    CsvWriter counting_csv({"u", "N"});
    Series n_series{"N(u)", {}, {}, true, false};
    for (double u : u_grid) {
        const double n = tw.counting(u);
        counting_csv.add_row(std::vector<double>{u, n});
        n_series.x.push_back(u);
        n_series.y.push_back(n);
    }
    em.file("tower-counting.csv", counting_csv.str());
    summary["counting_grid"] = {{"u_max", u_grid.back()},
                                {"points", u_grid.size()}};

    em.file("tower-report.json", summary.dump(2) + "\n");

    if (!f_series.x.empty() || !g_series.x.empty()) {
        if (!f_series.x.empty()) sum_plot.series.push_back(std::move(f_series));
        if (!g_series.x.empty()) sum_plot.series.push_back(std::move(g_series));
        em.plot("tower-sums.svg", sum_plot);
    }
    PlotSpec count_plot;
    count_plot.title = "mass counting function";
    count_plot.x_label = "u";
    count_plot.y_label = "N(u)";
    count_plot.series.push_back(std::move(n_series));
    em.plot("tower-counting.svg", count_plot);

    art.summary = std::move(summary);
    return art;
}

// ---------------------------------------------------------------------------
// qei-report

RunArtifacts qei_report(const RunConfig& cfg) {
    RunArtifacts art;
    Emitter em{cfg, art};
    const tower::MassTower tw = build_tower(cfg.tower);
    const BuiltTestFunction btf = make_test_function(cfg.test_function);

    ordered_json summary;
    summary["analysis"] = "qei-report";
    summary["seed"] = cfg.seed;
    summary["test_function"] = {{"support_radius", btf.f.support_radius()},
                                {"beta0", btf.f.beta0()},
                                {"normalization", btf.f.normalization()},
                                {"kappa", btf.env.kappa}};
    summary["tower"] = tower_json(cfg.tower, tw);

    // Scaled tower bounds and the scaling-law fit.
    CsvWriter csv({"lambda", "status", "q", "error"});
    ordered_json rows = ordered_json::array();
    std::vector<double> fit_lambda, fit_q;
    for (double lambda : cfg.grids.lambda) {
        const qei::QeiBound b =
            qei::scaled_tower_bound(btf.f, tw, lambda, cfg.constants.d, cfg.constants.C);
        ordered_json entry;
        entry["lambda"] = lambda;
        entry["status"] = qei_status_str(b.status);
        std::vector<std::string> row{CsvWriter::format(lambda), qei_status_str(b.status)};
        if (b.status == qei::QeiBound::Status::Finite) {
            const double q = std::abs(b.value);
            entry["q"] = q;
            entry["error"] = b.error;
            row.push_back(CsvWriter::format(q));
            row.push_back(CsvWriter::format(b.error));
            if (q > 0.0) {
                fit_lambda.push_back(lambda);
                fit_q.push_back(q);
            }
        } else {
            entry["diagnostic"] = b.diagnostic;
            row.push_back("");
            row.push_back("");
        }
        csv.add_row(row);
        rows.push_back(std::move(entry));
    }
    em.file("qei-scaling.csv", csv.str());

    ordered_json scaling;
    scaling["rows"] = std::move(rows);
    bool have_fit = fit_lambda.size() >= 2;
    qei::ScalingFit fit;
    if (have_fit) {
        fit = qei::fit_scaling(fit_lambda, fit_q);
        scaling["fit"] = {{"C_fit", fit.C_fit}, {"n_fit", fit.n_fit}, {"rms", fit.rms}};
    } else {
        scaling["fit"] = nullptr;
        scaling["note"] = "fewer than two finite bounds; no scaling fit";
    }
    summary["scaling"] = std::move(scaling);

    if (have_fit) {
        const qei::PipelineReport pipe =
            qei::qei_to_nuclearity_pipeline(btf.f, btf.env, tw, fit);
        ordered_json pj;
        pj["envelope_ok"] = pipe.envelope_ok;
        pj["fulfilled"] = tristate_str(pipe.fulfilled);
        pj["n_G"] = pipe.n_G;
        pj["C_G"] = pipe.C_G;
        pj["beta_probes"] = pipe.beta_probes;
        ordered_json quartic = ordered_json::array();
        for (const auto& v : pipe.quartic_sums) quartic.push_back(sum_status_str(v.status));
        pj["quartic_sums"] = std::move(quartic);
        ordered_json normality = ordered_json::array();
        for (const auto& n : pipe.normality) normality.push_back(n.holds);
        pj["local_normality"] = std::move(normality);
        pj["small_beta_probes"] = pipe.small_beta_probes;
        ordered_json small_quartic = ordered_json::array();
        for (const auto& v : pipe.small_quartic_sums)
            small_quartic.push_back(sum_status_str(v.status));
        pj["small_quartic_sums"] = std::move(small_quartic);
        pj["detail"] = pipe.detail;
        summary["pipeline"] = std::move(pj);
    } else {
        summary["pipeline"] = nullptr;
    }

    // Reverse direction: which decay classes stay admissible under the
    // Tauberian envelope with n = 1, gamma = 1.
    ordered_json domain = ordered_json::array();
    for (double alpha : {0.4, 0.5, 0.6, 0.75, 1.0}) {
        const qei::QeiDomain d =
            qei::nuclearity_to_qei_domain(1.0, 1.0, alpha, cfg.test_function.beta0);
        domain.push_back({{"alpha", alpha},
                          {"admissible", d.admissible},
                          {"alpha_threshold", d.alpha_threshold},
                          {"gamma_threshold", d.gamma_threshold},
                          {"reason", d.reason}});
    }
    summary["reverse_domain"] = std::move(domain);

    // Single-field bounds across the mass grid.
    const qei::Transform g_hat = make_transform_proxy(btf.f);
    ordered_json single = ordered_json::array();
    for (double m : cfg.grids.m) {
        const qei::QeiBound b = qei::single_field_bound(g_hat, m, cfg.constants.d,
                                                        cfg.constants.C);
        ordered_json entry;
        entry["m"] = m;
        entry["status"] = qei_status_str(b.status);
        if (b.status == qei::QeiBound::Status::Finite) {
            entry["value"] = b.value;
            entry["error"] = b.error;
        }
        single.push_back(std::move(entry));
    }
    summary["single_field"] = std::move(single);

    em.file("qei-report.json", summary.dump(2) + "\n");

    if (have_fit) {
        PlotSpec plot;
        plot.title = "tower QEI bound vs sampling scale";
        plot.x_label = "lambda";
        plot.y_label = "|bound|";
        plot.log_x = true;
        plot.log_y = true;
        Series pts{"measured", fit_lambda, fit_q, false, true};
        Series line{"fit", {}, {}, false, false};
        for (double lambda : fit_lambda) {
            line.x.push_back(lambda);
            line.y.push_back(fit.C_fit * std::pow(lambda, -fit.n_fit));
        }
        plot.series.push_back(std::move(pts));
        plot.series.push_back(std::move(line));
        em.plot("qei-scaling.svg", plot);
    }

    art.summary = std::move(summary);
    return art;
}

// ---------------------------------------------------------------------------
// negstate-verify

RunArtifacts negstate_verify(const RunConfig& cfg) {
    RunArtifacts art;
    Emitter em{cfg, art};
    const BuiltTestFunction btf = make_test_function(cfg.test_function);
    const negstate::RadialAngularProfile b =
        negstate::build_profile(cfg.negstate.radial, cfg.negstate.angular);
    const negstate::KernelC c = negstate::derive_kernel(b);
    const negstate::LambdaOptimum opt = negstate::optimize_lambda(c);

    const negstate::TheoremReport report = negstate::verify_theorem(
        cfg.grids.m, cfg.negstate.m0, btf.f, btf.env, b, c);

    ordered_json summary;
    summary["analysis"] = "negstate-verify";
    summary["seed"] = cfg.seed;
    summary["profile"] = {{"radial",
                           {{"center", cfg.negstate.radial.center},
                            {"halfwidth", cfg.negstate.radial.halfwidth}}},
                          {"angular",
                           {{"center", cfg.negstate.angular.center},
                            {"halfwidth", cfg.negstate.angular.halfwidth}}}};
    summary["kernel"] = {{"normalization", b.normalization()},
                         {"radial_weighted_integral", b.radial_weighted_integral()},
                         {"angular_integral", b.angular_integral()},
                         {"prefactor", c.prefactor()},
                         {"trace", c.trace()},
                         {"double_integral", c.double_integral()},
                         {"legendre_terms", c.legendre_terms()}};
    summary["lambda0"] = report.lambda0;
    summary["p_max"] = opt.p_max;
    summary["gamma"] = report.gamma;

    CsvWriter csv({"m", "energy", "energy_error", "bound", "margin_ratio", "holds",
                   "mc_estimate", "mc_stderr", "mc_sigma"});
    ordered_json rows = ordered_json::array();
    bool mc_all_within = true;
    bool mc_ran = false;
    Series e_series{"|energy|", {}, {}, false, true};
    Series b_series{"|bound|", {}, {}, false, true};

    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const negstate::MassRow& row = report.rows[i];
        ordered_json entry;
        entry["m"] = row.m;
        entry["phi"] = btf.env(2.0 * kSqrt2 * row.m);
        entry["energy"] = row.energy;
        entry["energy_error"] = row.energy_error;
        entry["bound"] = row.bound;
        entry["margin_ratio"] = row.margin_ratio;
        entry["holds"] = row.holds;

        std::vector<std::string> cells{
            CsvWriter::format(row.m),       CsvWriter::format(row.energy),
            CsvWriter::format(row.energy_error), CsvWriter::format(row.bound),
            CsvWriter::format(row.margin_ratio), row.holds ? "1" : "0"};

        if (cfg.negstate.mc_samples > 0) {
            mc_ran = true;
            const std::uint64_t seed_m =
                cfg.seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(i) + 1));
            const negstate::McResult mc =
                negstate::mc_crosscheck(row.m, report.lambda0, btf.f, btf.env, b, c,
                                        cfg.negstate.mc_samples, seed_m);
            const double denom = std::max(mc.stderr_est, 1e-300);
            const double sigma = std::abs(mc.estimate - row.energy) / denom;
            const bool within = sigma <= 3.0;
            mc_all_within = mc_all_within && within;
            entry["mc"] = {{"estimate", mc.estimate},   {"stderr", mc.stderr_est},
                           {"samples", mc.samples},     {"accepted", mc.accepted},
                           {"sigma_distance", sigma},   {"within_3sigma", within}};
            cells.push_back(CsvWriter::format(mc.estimate));
            cells.push_back(CsvWriter::format(mc.stderr_est));
            cells.push_back(CsvWriter::format(sigma));
        } else {
            entry["mc"] = nullptr;
            cells.insert(cells.end(), {"", "", ""});
        }
        csv.add_row(cells);
        rows.push_back(std::move(entry));

        if (row.energy < 0.0 && row.bound < 0.0) {
            e_series.x.push_back(row.m);
            e_series.y.push_back(-row.energy);
            b_series.x.push_back(row.m);
            b_series.y.push_back(-row.bound);
        }
    }
    em.file("negstate-rows.csv", csv.str());
    summary["rows"] = std::move(rows);
    summary["all_hold"] = report.all_hold;
    summary["mc_within_3sigma"] = mc_ran ? ordered_json(mc_all_within) : ordered_json(nullptr);

    // Kinematic support sweep at the smallest mass on the grid.
    const negstate::SupportSweep sweep =
        negstate::kinematic_sweep(cfg.grids.m.front(), b, 500, cfg.seed);
    summary["kinematic_sweep"] = {{"m", cfg.grids.m.front()},
                                  {"samples", sweep.samples},
                                  {"violations", sweep.violations},
                                  {"omega_min", sweep.omega_min},
                                  {"omega_max", sweep.omega_max},
                                  {"bracket_plus_max", sweep.bracket_plus_max},
                                  {"bracket_minus_min", sweep.bracket_minus_min}};

    em.file("negstate-verify.json", summary.dump(2) + "\n");

    if (!e_series.x.empty()) {
        PlotSpec plot;
        plot.title = "averaged energy vs theorem bound";
        plot.x_label = "m";
        plot.y_label = "magnitude";
        plot.log_x = true;
        plot.log_y = true;
        plot.series.push_back(std::move(e_series));
        plot.series.push_back(std::move(b_series));
        em.plot("negstate-verify.svg", plot);
    }

    art.theorem_ok = report.all_hold;
    art.summary = std::move(summary);
    return art;
}

// ---------------------------------------------------------------------------
// testfn-build

RunArtifacts testfn_build(const RunConfig& cfg) {
    RunArtifacts art;
    Emitter em{cfg, art};
    const BuiltTestFunction btf = make_test_function(cfg.test_function);

    std::vector<double> u_grid = cfg.grids.u;
    if (u_grid.empty()) u_grid = linspace(0.0, 50.0, 201);

    CsvWriter csv({"u", "fhat", "envelope", "slack"});
    double min_slack = std::numeric_limits<double>::infinity();
    Series fhat_series{"fhat", {}, {}, false, false};
    Series env_series{"envelope", {}, {}, false, false};
    for (double u : u_grid) {
        const double fh = btf.f.fourier(u);
        const double ev = btf.env(u);
        const double slack = fh - ev;
        min_slack = std::min(min_slack, slack);
        csv.add_row(std::vector<double>{u, fh, ev, slack});
        if (fh > 1e-13) {
            fhat_series.x.push_back(u);
            fhat_series.y.push_back(fh);
        }
        if (ev > 1e-13) {
            env_series.x.push_back(u);
            env_series.y.push_back(ev);
        }
    }
    em.file("testfn-transform.csv", csv.str());

    const bool slack_ok = min_slack >= -1e-10;
    ordered_json summary;
    summary["analysis"] = "testfn-build";
    summary["seed"] = cfg.seed;
    summary["support_radius"] = cfg.test_function.support_radius;
    summary["f_support_radius"] = btf.f.support_radius();
    summary["beta0"] = btf.f.beta0();
    summary["normalization"] = btf.f.normalization();
    summary["kappa"] = btf.env.kappa;
    summary["eta_proxy_error"] = btf.f.eta().proxy_error();
    summary["grid"] = {{"u_max", u_grid.back()}, {"points", u_grid.size()}};
    summary["min_slack"] = min_slack;
    summary["slack_ok"] = slack_ok;
    em.file("testfn-build.json", summary.dump(2) + "\n");

    if (!fhat_series.x.empty() && !env_series.x.empty()) {
        PlotSpec plot;
        plot.title = "transform and its exponential envelope";
        plot.x_label = "u";
        plot.y_label = "value";
        plot.log_y = true;
        plot.series.push_back(std::move(fhat_series));
        plot.series.push_back(std::move(env_series));
        em.plot("testfn-transform.svg", plot);
    }

    art.theorem_ok = slack_ok;
    art.summary = std::move(summary);
    return art;
}

// ---------------------------------------------------------------------------
// distal-demo

RunArtifacts distal_demo(const RunConfig& cfg) {
    RunArtifacts art;
    Emitter em{cfg, art};
    const distal::Ball S{cfg.distal.ball_radius};
    const double r = cfg.distal.separation;
    const double lambda = cfg.distal.lambda;
    const double d_s = cfg.distal.d_s;
    const double R = S.radius;

    ordered_json summary;
    summary["analysis"] = "distal-demo";
    summary["seed"] = cfg.seed;
    summary["ball_radius"] = R;
    summary["separation"] = r;

    // Identity: the covering radius reproduces the separation.
    const distal::RadialDiffeo ident = distal::RadialDiffeo::identity();
    const double cov_id = distal::covering_radius(ident, S, r);
    const bool identity_ok = std::abs(cov_id - r) <= 1e-12 * std::max(1.0, r);
    summary["identity"] = {{"covering", cov_id}, {"expected", r}, {"ok", identity_ok}};

    // Global scaling: covering dilates to lambda * r and kappa equals lambda.
    const distal::RadialDiffeo scal = distal::RadialDiffeo::scaling(lambda);
    const double cov_scal = distal::covering_radius(scal, S, r);
    const double kappa = distal::derivative_kappa(scal, S, r);
    const double kappa_dev = std::abs(kappa - lambda);
    const bool scaling_ok =
        kappa_dev <= 1e-10 && std::abs(cov_scal - lambda * r) <= 1e-9 * std::max(1.0, lambda * r);
    summary["scaling"] = {{"lambda", lambda},
                          {"covering", cov_scal},
                          {"covering_expected", lambda * r},
                          {"kappa", kappa},
                          {"kappa_deviation", kappa_dev},
                          {"ok", scaling_ok}};

    // Compactly supported scaling region: same covering as the global map
    // when the region swallows the enlarged ball, but identity far away.
    const double inner = 1.25 * (R + lambda * r);
    const double outer = 2.0 * inner;
    const distal::RadialDiffeo region = distal::RadialDiffeo::scaling_region(lambda, inner, outer);
    const double cov_region = distal::covering_radius(region, S, r);
    const bool region_ok = std::abs(cov_region - lambda * r) <= 1e-9 * std::max(1.0, lambda * r);
    summary["scaling_region"] = {{"inner", inner},
                                 {"outer", outer},
                                 {"covering", cov_region},
                                 {"covering_expected", lambda * r},
                                 {"ok", region_ok}};

    // Shrink construction and the dichotomy it feeds.
    const distal::ShrinkResult shrink =
        distal::shrink_construction(S, d_s, cfg.distal.iterations);
    summary["shrink"] = {{"d_s", d_s},
                         {"achieved", shrink.achieved},
                         {"covering", shrink.covering},
                         {"certified", shrink.certified},
                         {"dichotomy", shrink.dichotomy},
                         {"conclusion", shrink.conclusion}};

    // Composition: inverse consistency of scaling composed with the shrink map.
    const distal::RadialDiffeo comp = distal::RadialDiffeo::compose(scal, shrink.map);
    double comp_dev = 0.0;
    for (double s : linspace(0.0, R + 3.0 * d_s, 41))
        comp_dev = std::max(comp_dev, std::abs(comp.inverse(comp(s)) - s));
    const bool comp_ok = comp_dev <= 1e-10;
    summary["composition"] = {{"label", comp.label()},
                              {"max_roundtrip_deviation", comp_dev},
                              {"ok", comp_ok}};

    const distal::ModelBand band = distal::distal_model_band(cfg.distal.d0, r);
    summary["model_band"] = {{"d0", cfg.distal.d0},
                             {"lower", band.lower},
                             {"upper", band.upper},
                             {"inverse_lower", band.inverse_lower}};

    const bool all_ok = identity_ok && scaling_ok && region_ok && comp_ok && shrink.certified;
    summary["all_ok"] = all_ok;

    // Map samples for the CSV/plot.
    const double s_max = std::max(R + 3.0 * d_s, 1.1 * outer);
    CsvWriter csv({"s", "identity", "scaling", "region", "shrink"});
    Series id_series{"identity", {}, {}, false, false};
    Series sc_series{"scaling", {}, {}, false, false};
    Series rg_series{"region", {}, {}, false, false};
    Series sh_series{"shrink", {}, {}, false, false};
    for (double s : linspace(0.0, s_max, 257)) {
        const double vi = ident(s);
        const double vs = scal(s);
        const double vr = region(s);
        const double vh = shrink.map(s);
        csv.add_row(std::vector<double>{s, vi, vs, vr, vh});
        id_series.x.push_back(s);
        id_series.y.push_back(vi);
        sc_series.x.push_back(s);
        sc_series.y.push_back(vs);
        rg_series.x.push_back(s);
        rg_series.y.push_back(vr);
        sh_series.x.push_back(s);
        sh_series.y.push_back(vh);
    }
    em.file("distal-maps.csv", csv.str());
    em.file("distal-demo.json", summary.dump(2) + "\n");

    PlotSpec plot;
    plot.title = "radial maps";
    plot.x_label = "s";
    plot.y_label = "psi(s)";
    plot.series.push_back(std::move(id_series));
    plot.series.push_back(std::move(sc_series));
    plot.series.push_back(std::move(rg_series));
    plot.series.push_back(std::move(sh_series));
    em.plot("distal-maps.svg", plot);

    art.theorem_ok = all_ok;
    art.summary = std::move(summary);
    return art;
}

}  // namespace

RunArtifacts run(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output.dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + cfg.output.dir +
                                 "': " + ec.message());
    switch (cfg.analysis) {
        case Analysis::TowerReport: return tower_report(cfg);
        case Analysis::QeiReport: return qei_report(cfg);
        case Analysis::NegstateVerify: return negstate_verify(cfg);
        case Analysis::TestfnBuild: return testfn_build(cfg);
        case Analysis::DistalDemo: return distal_demo(cfg);
    }
    throw std::logic_error("run: unhandled analysis");
}

}  // namespace qeilab::cli
