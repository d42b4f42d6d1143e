#include "config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include <toml.hpp>

#include "dpw/capacity/capacity.hpp"
#include "dpw/error.hpp"
#include "dpw/io/csv.hpp"
#include "dpw/lab/convergence.hpp"

namespace dpw::cli {

namespace {

double as_double(const toml::node& n, const std::string& key) {
    if (auto v = n.value_exact<double>()) return *v;
    if (auto v = n.value_exact<int64_t>()) return static_cast<double>(*v);
    throw ConfigError(key, key + ": expected a number");
}

int64_t as_integer(const toml::node& n, const std::string& key) {
    if (auto v = n.value_exact<int64_t>()) return *v;
    throw ConfigError(key, key + ": expected an integer");
}

int as_int(const toml::node& n, const std::string& key) {
    const auto v = as_integer(n, key);
    if (v < -1000000000 || v > 1000000000) throw ConfigError(key, key + ": integer out of range");
    return static_cast<int>(v);
}

bool as_bool(const toml::node& n, const std::string& key) {
    if (auto v = n.value_exact<bool>()) return *v;
    throw ConfigError(key, key + ": expected true or false");
}

std::string as_string(const toml::node& n, const std::string& key) {
    if (auto v = n.value_exact<std::string>()) return *v;
    throw ConfigError(key, key + ": expected a string");
}

template <class T, class F>
std::vector<T> as_array(const toml::node& n, const std::string& key, F element) {
    const auto* a = n.as_array();
    if (!a) throw ConfigError(key, key + ": expected an array");
    std::vector<T> out;
    for (const auto& e : *a) out.push_back(element(e, key));
    return out;
}

using Reader = std::function<void(Config&, const toml::node&, const std::string&)>;

const std::map<std::string, Reader>& readers() {
    static const std::map<std::string, Reader> r = {
        {"domain.L_minus", [](Config& c, const toml::node& n, const std::string& k) { c.L_minus = as_double(n, k); }},
        {"domain.L_plus", [](Config& c, const toml::node& n, const std::string& k) { c.L_plus = as_double(n, k); }},
        {"potential.breakpoints",
         [](Config& c, const toml::node& n, const std::string& k) { c.breakpoints = as_array<double>(n, k, as_double); }},
        {"potential.values",
         [](Config& c, const toml::node& n, const std::string& k) { c.values = as_array<double>(n, k, as_double); }},
        {"interaction.kind",
         [](Config& c, const toml::node& n, const std::string& k) { c.interaction = as_string(n, k); }},
        {"interaction.strength",
         [](Config& c, const toml::node& n, const std::string& k) { c.strength = as_double(n, k); }},
        {"cross_section.s_a", [](Config& c, const toml::node& n, const std::string& k) { c.s_a = as_double(n, k); }},
        {"cross_section.s_b", [](Config& c, const toml::node& n, const std::string& k) { c.s_b = as_double(n, k); }},
        {"cross_section.r", [](Config& c, const toml::node& n, const std::string& k) { c.r = as_double(n, k); }},
        {"window.eps", [](Config& c, const toml::node& n, const std::string& k) { c.eps = as_double(n, k); }},
        {"window.d", [](Config& c, const toml::node& n, const std::string& k) { c.d = as_double(n, k); }},
        {"window.gamma", [](Config& c, const toml::node& n, const std::string& k) { c.gamma = as_double(n, k); }},
        {"mesh.ratio", [](Config& c, const toml::node& n, const std::string& k) { c.ratio = as_double(n, k); }},
        {"mesh.min_frac", [](Config& c, const toml::node& n, const std::string& k) { c.min_frac = as_double(n, k); }},
        {"mesh.far_cell", [](Config& c, const toml::node& n, const std::string& k) { c.far_cell = as_double(n, k); }},
        {"mesh.far_cell_z",
         [](Config& c, const toml::node& n, const std::string& k) { c.far_cell_z = as_double(n, k); }},
        {"mesh.refine", [](Config& c, const toml::node& n, const std::string& k) { c.refine = as_int(n, k); }},
        {"solver.m", [](Config& c, const toml::node& n, const std::string& k) { c.m = as_int(n, k); }},
        {"solver.tol", [](Config& c, const toml::node& n, const std::string& k) { c.tol = as_double(n, k); }},
        {"solver.seed",
         [](Config& c, const toml::node& n, const std::string& k) {
             const auto v = as_integer(n, k);
             if (v < 0) throw ConfigError(k, k + ": seed must be non-negative");
             c.seed = static_cast<std::uint64_t>(v);
         }},
        {"capacity.half_widths",
         [](Config& c, const toml::node& n, const std::string& k) { c.half_widths = as_array<double>(n, k, as_double); }},
        {"capacity.r", [](Config& c, const toml::node& n, const std::string& k) { c.cap_r = as_double(n, k); }},
        {"capacity.n_phi", [](Config& c, const toml::node& n, const std::string& k) { c.n_phi = as_int(n, k); }},
        {"capacity.levels",
         [](Config& c, const toml::node& n, const std::string& k) { c.levels = as_array<int>(n, k, as_int); }},
        {"study.gamma", [](Config& c, const toml::node& n, const std::string& k) { c.study_gamma = as_double(n, k); }},
        {"study.eps",
         [](Config& c, const toml::node& n, const std::string& k) { c.study_eps = as_array<double>(n, k, as_double); }},
        {"study.richardson",
         [](Config& c, const toml::node& n, const std::string& k) { c.richardson = as_bool(n, k); }},
        {"study.cutoff", [](Config& c, const toml::node& n, const std::string& k) { c.cutoff = as_double(n, k); }},
        {"bands.period", [](Config& c, const toml::node& n, const std::string& k) { c.period = as_double(n, k); }},
        {"bands.gamma", [](Config& c, const toml::node& n, const std::string& k) { c.bands_gamma = as_double(n, k); }},
        {"bands.lambda_max",
         [](Config& c, const toml::node& n, const std::string& k) { c.lambda_max = as_double(n, k); }},
        {"bands.thetas", [](Config& c, const toml::node& n, const std::string& k) { c.thetas = as_int(n, k); }},
    };
    return r;
}

void apply_override(toml::table& tbl, const std::string& item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError(item, "--set expects key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq), text = item.substr(eq + 1);
    const auto dot = key.find('.');
    if (dot == std::string::npos || key.find('.', dot + 1) != std::string::npos)
        throw ConfigError(key, "--set key must be section.name, got '" + key + "'");
    if (!readers().count(key)) throw ConfigError(key, "unknown configuration key '" + key + "'");

    toml::table parsed;
    try {
        parsed = toml::parse("v = " + text);
    } catch (const toml::parse_error&) {
        parsed.insert_or_assign("v", text);  // bare word: a string
    }
    const std::string section = key.substr(0, dot), name = key.substr(dot + 1);
    if (!tbl.contains(section)) tbl.insert_or_assign(section, toml::table{});
    auto* sec = tbl[section].as_table();
    if (!sec) throw ConfigError(section, "'" + section + "' must be a table");
    sec->insert_or_assign(name, *parsed.get("v"));
}

std::string list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + io::format_number(v[i]);
    return s + "]";
}

std::string list(const std::vector<int>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s + "]";
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

[[noreturn]] void fail(const std::string& key, const std::string& what) { throw ConfigError(key, key + ": " + what); }

void check_window(const waveguide::WaveguideGeometry& g, const std::string& d_key) {
    try {
        g.check_paper_conditions();
    } catch (const InfeasibleError& e) {
        const std::string key = e.condition() == "d_eps <= eps" ? d_key : "cross_section.r";
        throw ConfigError(key, key + ": violates " + e.condition() + " (" + e.what() + ")");
    }
    try {
        g.validate_structure();
    } catch (const ContractError& e) {
        throw ConfigError("window", e.what());
    }
}

waveguide::WaveguideGeometry window_geometry(const Config& c, const std::optional<double>& gamma,
                                             const std::string& gamma_key) {
    try {
        auto g = c.geometry();
        if (gamma) {
            g.d = std::isinf(*gamma) ? g.eps
                                     : capacity::window_for_gamma(*gamma, g.eps, g.s_b - g.s_a, 2);
        }
        return g;
    } catch (const InfeasibleError& e) {
        throw ConfigError(gamma_key, gamma_key + ": violates " + e.condition() + " (" + e.what() + ")");
    } catch (const ContractError& e) {
        throw ConfigError(gamma_key, e.what());
    }
}

void check_mesh(const Config& c) {
    if (!(c.ratio > 1)) fail("mesh.ratio", "must exceed 1");
    if (!(c.min_frac > 0 && c.min_frac <= 1)) fail("mesh.min_frac", "must lie in (0, 1]");
    if (!(c.far_cell >= 0)) fail("mesh.far_cell", "must be >= 0");
    if (!(c.far_cell_z >= 0)) fail("mesh.far_cell_z", "must be >= 0");
    if (c.refine < 0 || c.refine > 6) fail("mesh.refine", "must lie in [0, 6]");
}

void check_cross_section(const Config& c) {
    if (!(c.eps > 0 && c.eps < 1)) fail("window.eps", "must lie in (0, 1)");
    if (!(c.s_a < 0 && c.s_b > 0)) fail("cross_section.s_a", "need s_a < 0 < s_b");
    if (!(c.r > 0)) fail("cross_section.r", "must be positive");
    if (!(c.d >= 0)) fail("window.d", "must be >= 0");
    if (c.gamma && !(*c.gamma > 0)) fail("window.gamma", "must be positive");
}

}  // namespace

solvable1d::PiecewisePotential Config::potential() const {
    solvable1d::PiecewisePotential p;
    p.breakpoints = breakpoints;
    p.values = values;
    return p;
}

solvable1d::PointInteraction Config::point_interaction() const {
    using solvable1d::PointInteraction;
    if (interaction == "delta_prime")
        return std::isinf(strength) ? PointInteraction::decoupled() : PointInteraction::delta_prime(strength);
    if (interaction == "delta") return PointInteraction::delta(strength);
    if (interaction == "free") return PointInteraction::free();
    if (interaction == "decoupled") return PointInteraction::decoupled();
    throw ConfigError("interaction.kind", "interaction.kind: expected delta_prime, delta, free or decoupled");
}

waveguide::WaveguideGeometry Config::geometry() const {
    waveguide::WaveguideGeometry g;
    g.L_minus = L_minus;
    g.L_plus = L_plus;
    g.eps = eps;
    g.d = d;
    g.s_a = s_a;
    g.s_b = s_b;
    g.r = r;
    if (gamma) g.d = std::isinf(*gamma) ? eps : capacity::window_for_gamma(*gamma, eps, s_b - s_a, 2);
    return g;
}

waveguide::Grading Config::grading() const {
    waveguide::Grading gr;
    gr.ratio = ratio;
    gr.min_frac = min_frac;
    gr.far_cell = far_cell;
    gr.far_cell_z = far_cell_z;
    gr.refine = refine;
    return gr;
}

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
    toml::table tbl;
    if (!path.empty()) {
        try {
            tbl = toml::parse_file(path);
        } catch (const toml::parse_error& e) {
            std::ostringstream os;
            os << "cannot read config '" << path << "': " << e.description();
            if (e.source().begin) os << " at line " << e.source().begin.line;
            throw ConfigError("config", os.str());
        }
    }
    for (const auto& item : overrides) apply_override(tbl, item);

    if (const auto* w = tbl["window"].as_table(); w && w->contains("d") && w->contains("gamma"))
        throw ConfigError("window.d", "window.d: set either window.d or window.gamma, not both");

    Config cfg;
    const auto& known = readers();
    for (auto&& [section, node] : tbl) {
        const std::string sec(section.str());
        const auto* t = node.as_table();
        if (!t) throw ConfigError(sec, "'" + sec + "' must be a table");
        for (auto&& [name, value] : *t) {
            const std::string key = sec + "." + std::string(name.str());
            const auto it = known.find(key);
            if (it == known.end()) throw ConfigError(key, "unknown configuration key '" + key + "'");
            it->second(cfg, value, key);
        }
    }
    cfg.point_interaction();
    return cfg;
}

std::string to_toml(const Config& c) {
    using io::format_number;
    std::ostringstream os;
    os << "[domain]\nL_minus = " << format_number(c.L_minus) << "\nL_plus = " << format_number(c.L_plus) << "\n\n";
    os << "[potential]\nbreakpoints = " << list(c.breakpoints) << "\nvalues = " << list(c.values) << "\n\n";
    os << "[interaction]\nkind = " << quoted(c.interaction) << "\nstrength = " << format_number(c.strength) << "\n\n";
    os << "[cross_section]\ns_a = " << format_number(c.s_a) << "\ns_b = " << format_number(c.s_b)
       << "\nr = " << format_number(c.r) << "\n\n";
    os << "[window]\neps = " << format_number(c.eps) << '\n';
    if (c.gamma)
        os << "gamma = " << format_number(*c.gamma) << "\n\n";
    else
        os << "d = " << format_number(c.d) << "\n\n";
    os << "[mesh]\nratio = " << format_number(c.ratio) << "\nmin_frac = " << format_number(c.min_frac)
       << "\nfar_cell = " << format_number(c.far_cell) << "\nfar_cell_z = " << format_number(c.far_cell_z)
       << "\nrefine = " << c.refine << "\n\n";
    os << "[solver]\nm = " << c.m << "\ntol = " << format_number(c.tol) << "\nseed = " << c.seed << "\n\n";
    os << "[capacity]\nhalf_widths = " << list(c.half_widths) << "\nr = " << format_number(c.cap_r)
       << "\nn_phi = " << c.n_phi << "\nlevels = " << list(c.levels) << "\n\n";
    os << "[study]\ngamma = " << format_number(c.study_gamma) << "\neps = " << list(c.study_eps)
       << "\nrichardson = " << (c.richardson ? "true" : "false") << "\ncutoff = " << format_number(c.cutoff)
       << "\n\n";
    os << "[bands]\nperiod = " << format_number(c.period) << '\n';
    if (c.bands_gamma) os << "gamma = " << format_number(*c.bands_gamma) << '\n';
    os << "lambda_max = " << format_number(c.lambda_max) << "\nthetas = " << c.thetas << '\n';
    return os.str();
}

void validate(const Config& c, const std::string& command) {
    if (c.m < 1 || c.m > 10000) fail("solver.m", "must lie in [1, 10000]");
    if (!(c.tol > 0 && c.tol < 1)) fail("solver.tol", "must lie in (0, 1)");
    try {
        c.potential().validate();
    } catch (const ContractError& e) {
        throw ConfigError("potential.values", std::string("potential.values: ") + e.what());
    }
    try {
        c.point_interaction().validate();
    } catch (const ContractError& e) {
        throw ConfigError("interaction.strength", std::string("interaction.strength: ") + e.what());
    }

    if (command == "eig1d" || command == "eig2d" || command == "converge") {
        if (!(c.L_minus < 0)) fail("domain.L_minus", "need L_minus < 0");
        if (!(c.L_plus > 0)) fail("domain.L_plus", "need L_plus > 0");
    }
    if (command == "eig2d") {
        check_cross_section(c);
        check_mesh(c);
        check_window(window_geometry(c, c.gamma, "window.gamma"), c.gamma ? "window.gamma" : "window.d");
    } else if (command == "capacity") {
        if (c.half_widths.empty()) fail("capacity.half_widths", "must not be empty");
        if (!(c.cap_r > 0)) fail("capacity.r", "must be positive");
        for (double h : c.half_widths)
            if (!(h > 0 && h * c.cap_r < 1)) fail("capacity.half_widths", "need 0 < d r < 1");
        if (c.n_phi < 12 || c.n_phi % 2) fail("capacity.n_phi", "must be even and >= 12");
        if (c.levels.empty()) fail("capacity.levels", "must not be empty");
        for (int l : c.levels)
            if (l < 0 || l > 6) fail("capacity.levels", "levels must lie in [0, 6]");
    } else if (command == "converge") {
        check_cross_section(c);
        check_mesh(c);
        if (!(c.study_gamma > 0)) fail("study.gamma", "must be positive (inf for the d = eps design)");
        if (!(c.cutoff >= 0 && c.cutoff < 1)) fail("study.cutoff", "must lie in [0, 1)");
        for (std::size_t i = 0; i < c.study_eps.size(); ++i) {
            if (!(c.study_eps[i] > 0 && c.study_eps[i] < 1)) fail("study.eps", "every eps must lie in (0, 1)");
            if (i && !(c.study_eps[i] < c.study_eps[i - 1])) fail("study.eps", "must be strictly decreasing");
        }
        Config base = c;
        base.gamma.reset();
        lab::StudyConfig sc;
        sc.geometry = base.geometry();
        if (!std::isinf(c.study_gamma)) sc.gamma = c.study_gamma;
        int feasible = 0;
        std::string violated;
        for (double e : c.study_eps) {
            const auto why = lab::row_feasibility(sc, e);
            if (why.empty())
                ++feasible;
            else if (violated.empty())
                violated = why;
        }
        if (feasible < 3) {
            std::string msg = "study.eps: need ≥ 3 feasible ε, got " + std::to_string(feasible);
            if (!violated.empty()) msg += " (violated: " + violated + ")";
            throw ConfigError("study.eps", msg);
        }
    } else if (command == "bands") {
        check_cross_section(c);
        check_mesh(c);
        if (!(c.period > 0)) fail("bands.period", "must be positive");
        if (!(c.lambda_max > 0)) fail("bands.lambda_max", "must be positive");
        if (c.thetas < 2) fail("bands.thetas", "must be at least 2");
        if (c.bands_gamma && !(*c.bands_gamma > 0)) fail("bands.gamma", "must be positive");
        auto g = window_geometry(c, c.bands_gamma, "bands.gamma");
        g.L_minus = -c.period / 2;
        g.L_plus = c.period / 2;
        check_window(g, c.bands_gamma ? "bands.gamma" : "window.d");
    }
}

}  // namespace dpw::cli
