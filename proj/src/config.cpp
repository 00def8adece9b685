#include "qeilab/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <utility>

namespace qeilab::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void expect_object(const json& j, const std::string& section) {
    if (!j.is_object()) fail("section '" + section + "' must be a JSON object");
}

void expect_keys(const json& obj, const std::string& section,
                 std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) {
            return item.key() == k;
        });
        if (!known) fail("unknown key '" + item.key() + "' in section '" + section + "'");
    }
}

double get_number(const json& obj, const std::string& section, const char* key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        fail("key '" + std::string(key) + "' in section '" + section + "' must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& section, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        fail("key '" + std::string(key) + "' in section '" + section + "' must be an integer");
    return v.get<int>();
}

std::uint64_t get_uint64(const json& obj, const std::string& section, const char* key,
                         std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_unsigned())
        fail("key '" + std::string(key) + "' in section '" + section +
             "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& section, const char* key,
                       std::string fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string())
        fail("key '" + std::string(key) + "' in section '" + section + "' must be a string");
    return v.get<std::string>();
}

bool get_bool(const json& obj, const std::string& section, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        fail("key '" + std::string(key) + "' in section '" + section + "' must be a boolean");
    return v.get<bool>();
}

std::vector<double> get_number_list(const json& obj, const std::string& section,
                                    const char* key, std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array())
        fail("key '" + std::string(key) + "' in section '" + section +
             "' must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& e : v) {
        if (!e.is_number())
            fail("key '" + std::string(key) + "' in section '" + section +
                 "' must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void check_grid(const std::string& name, const std::vector<double>& grid, bool allow_empty) {
    if (grid.empty()) {
        if (!allow_empty) fail("grid '" + name + "' must not be empty");
        return;
    }
    double prev = 0.0;
    for (double v : grid) {
        if (!(v > prev))
            fail("grid '" + name + "' must be positive and strictly increasing");
        prev = v;
    }
}

negstate::ProfileSpec parse_profile(const json& obj, const std::string& section,
                                    const negstate::ProfileSpec& fallback) {
    expect_object(obj, section);
    expect_keys(obj, section, {"center", "halfwidth"});
    negstate::ProfileSpec p = fallback;
    p.center = get_number(obj, section, "center", p.center);
    p.halfwidth = get_number(obj, section, "halfwidth", p.halfwidth);
    return p;
}

void require_positive(const std::string& section, const char* key, double v) {
    if (!(v > 0.0)) fail(std::string(key) + " in section '" + section + "' must be positive");
}

void validate(const RunConfig& c) {
    require_positive("test_function", "support_radius", c.test_function.support_radius);
    require_positive("test_function", "beta0", c.test_function.beta0);
    if (c.test_function.shape != "bump")
        fail("test_function: unsupported shape '" + c.test_function.shape +
             "' (only 'bump' is implemented)");

    (void)build_tower(c.tower);  // throws ConfigError with the tower invariant named

    require_positive("constants", "C", c.constants.C);
    require_positive("constants", "c_exact", c.constants.c_exact);
    require_positive("constants", "c_simplified", c.constants.c_simplified);
    require_positive("constants", "C_lower", c.constants.C_lower);
    require_positive("constants", "A", c.constants.A);
    require_positive("constants", "R", c.constants.R);
    if (c.constants.d < 2) fail("constants: dimension d must be at least 2");

    check_grid("beta", c.grids.beta, false);
    check_grid("lambda", c.grids.lambda, false);
    check_grid("m", c.grids.m, false);
    check_grid("u", c.grids.u, true);

    require_positive("negstate", "m0", c.negstate.m0);
    try {
        (void)negstate::build_profile(c.negstate.radial, c.negstate.angular);
    } catch (const std::invalid_argument& e) {
        fail(std::string("negstate: ") + e.what());
    }

    if (!(c.distal.lambda >= 1.0)) fail("distal: lambda must be >= 1");
    require_positive("distal", "ball_radius", c.distal.ball_radius);
    require_positive("distal", "separation", c.distal.separation);
    require_positive("distal", "d_s", c.distal.d_s);
    require_positive("distal", "d0", c.distal.d0);
    if (c.distal.iterations < 1 || c.distal.iterations > 60)
        fail("distal: iterations must lie in [1, 60]");
}

}  // namespace

std::string analysis_name(Analysis a) {
    switch (a) {
        case Analysis::TowerReport: return "tower-report";
        case Analysis::QeiReport: return "qei-report";
        case Analysis::NegstateVerify: return "negstate-verify";
        case Analysis::TestfnBuild: return "testfn-build";
        case Analysis::DistalDemo: return "distal-demo";
    }
    return "unknown";
}

Analysis parse_analysis(const std::string& name) {
    if (name == "tower-report") return Analysis::TowerReport;
    if (name == "qei-report") return Analysis::QeiReport;
    if (name == "negstate-verify") return Analysis::NegstateVerify;
    if (name == "testfn-build") return Analysis::TestfnBuild;
    if (name == "distal-demo") return Analysis::DistalDemo;
    throw ConfigError(
        "config: unknown analysis '" + name +
        "' (use tower-report|qei-report|negstate-verify|testfn-build|distal-demo)");
}

tower::MassTower build_tower(const TowerSpec& spec) {
    if (spec.kind == "arithmetic") {
        if (!(spec.m1 > 0.0))
            throw ConfigError("config: tower: mass gap violated (m1 must be positive)");
        return tower::MassTower::arithmetic(spec.m1);
    }
    if (spec.kind == "logarithmic") {
        if (!(spec.d0 > 0.0)) throw ConfigError("config: tower: d0 must be positive");
        return tower::MassTower::logarithmic(spec.d0);
    }
    if (spec.kind == "finite") {
        if (spec.masses.empty())
            throw ConfigError("config: tower: finite tower needs a nonempty mass list");
        try {
            return tower::MassTower::finite(spec.masses);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: tower: ") + e.what());
        }
    }
    throw ConfigError("config: tower: unknown kind '" + spec.kind +
                      "' (use arithmetic|logarithmic|finite)");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(origin + ": " + e.what());
    }
    expect_object(root, "<root>");
    expect_keys(root, "<root>",
                {"analysis", "seed", "output", "test_function", "tower", "constants",
                 "grids", "negstate", "distal"});

    RunConfig c;
    if (root.contains("analysis")) {
        const json& a = root.at("analysis");
        if (!a.is_string()) fail("key 'analysis' must be a string");
        c.analysis = parse_analysis(a.get<std::string>());
        c.analysis_specified = true;
    }
    c.seed = get_uint64(root, "<root>", "seed", c.seed);

    if (root.contains("output")) {
        const json& o = root.at("output");
        expect_object(o, "output");
        expect_keys(o, "output", {"dir", "prefix", "plots"});
        c.output.dir = get_string(o, "output", "dir", c.output.dir);
        c.output.prefix = get_string(o, "output", "prefix", c.output.prefix);
        c.output.plots = get_bool(o, "output", "plots", c.output.plots);
        if (c.output.dir.empty() || c.output.prefix.empty())
            fail("output: dir and prefix must not be empty");
    }

    if (root.contains("test_function")) {
        const json& t = root.at("test_function");
        expect_object(t, "test_function");
        expect_keys(t, "test_function", {"support_radius", "beta0", "shape"});
        c.test_function.support_radius =
            get_number(t, "test_function", "support_radius", c.test_function.support_radius);
        c.test_function.beta0 = get_number(t, "test_function", "beta0", c.test_function.beta0);
        c.test_function.shape = get_string(t, "test_function", "shape", c.test_function.shape);
    }

    if (root.contains("tower")) {
        const json& t = root.at("tower");
        expect_object(t, "tower");
        expect_keys(t, "tower", {"kind", "m1", "d0", "masses"});
        c.tower.kind = get_string(t, "tower", "kind", c.tower.kind);
        c.tower.m1 = get_number(t, "tower", "m1", c.tower.m1);
        c.tower.d0 = get_number(t, "tower", "d0", c.tower.d0);
        c.tower.masses = get_number_list(t, "tower", "masses", c.tower.masses);
    }

    if (root.contains("constants")) {
        const json& k = root.at("constants");
        expect_object(k, "constants");
        expect_keys(k, "constants",
                    {"C", "c_exact", "c_simplified", "C_lower", "A", "d", "R"});
        c.constants.C = get_number(k, "constants", "C", c.constants.C);
        c.constants.c_exact = get_number(k, "constants", "c_exact", c.constants.c_exact);
        c.constants.c_simplified =
            get_number(k, "constants", "c_simplified", c.constants.c_simplified);
        c.constants.C_lower = get_number(k, "constants", "C_lower", c.constants.C_lower);
        c.constants.A = get_number(k, "constants", "A", c.constants.A);
        c.constants.d = get_int(k, "constants", "d", c.constants.d);
        c.constants.R = get_number(k, "constants", "R", c.constants.R);
    }

    if (root.contains("grids")) {
        const json& g = root.at("grids");
        expect_object(g, "grids");
        expect_keys(g, "grids", {"beta", "lambda", "m", "u"});
        c.grids.beta = get_number_list(g, "grids", "beta", c.grids.beta);
        c.grids.lambda = get_number_list(g, "grids", "lambda", c.grids.lambda);
        c.grids.m = get_number_list(g, "grids", "m", c.grids.m);
        c.grids.u = get_number_list(g, "grids", "u", c.grids.u);
    }

    if (root.contains("negstate")) {
        const json& n = root.at("negstate");
        expect_object(n, "negstate");
        expect_keys(n, "negstate", {"m0", "radial", "angular", "mc_samples"});
        c.negstate.m0 = get_number(n, "negstate", "m0", c.negstate.m0);
        if (n.contains("radial"))
            c.negstate.radial = parse_profile(n.at("radial"), "negstate.radial", c.negstate.radial);
        if (n.contains("angular"))
            c.negstate.angular =
                parse_profile(n.at("angular"), "negstate.angular", c.negstate.angular);
        c.negstate.mc_samples = get_uint64(n, "negstate", "mc_samples", c.negstate.mc_samples);
    }

    if (root.contains("distal")) {
        const json& d = root.at("distal");
        expect_object(d, "distal");
        expect_keys(d, "distal",
                    {"lambda", "ball_radius", "separation", "d_s", "iterations", "d0"});
        c.distal.lambda = get_number(d, "distal", "lambda", c.distal.lambda);
        c.distal.ball_radius = get_number(d, "distal", "ball_radius", c.distal.ball_radius);
        c.distal.separation = get_number(d, "distal", "separation", c.distal.separation);
        c.distal.d_s = get_number(d, "distal", "d_s", c.distal.d_s);
        c.distal.iterations = get_int(d, "distal", "iterations", c.distal.iterations);
        c.distal.d0 = get_number(d, "distal", "d0", c.distal.d0);
    }

    validate(c);
    return c;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

}  // namespace qeilab::cli
