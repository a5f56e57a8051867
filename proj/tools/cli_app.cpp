#include "cli_app.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "opo/cavity.hpp"
#include "opo/entangle.hpp"
#include "opo/fock.hpp"
#include "opo/lattice.hpp"
#include "opo/sde.hpp"
#include "opo/spectra.hpp"
#include "opo/steady.hpp"
#include "opo/validation.hpp"

namespace opo::cli {

namespace {

using K = KeyType;

const std::map<std::string, KeyType> kCommon = {
    {"command", K::String}, {"output", K::String}, {"format", K::String}, {"threads", K::Integer}};

const std::map<std::string, KeyType> kModel = {
    {"model", K::String},         {"sigma", K::Number},         {"kappa", K::Number},
    {"g", K::Number},             {"delta", K::Number},         {"r", K::Number},
    {"r-l", K::String},           {"f", K::Integer},            {"inj-intensity", K::Number},
    {"inj-phase", K::Number},     {"lock-intensity", K::Number}};

std::map<std::string, KeyType> merged(std::initializer_list<std::map<std::string, KeyType>> parts) {
    std::map<std::string, KeyType> m;
    for (const auto& p : parts) m.insert(p.begin(), p.end());
    return m;
}

const std::map<std::string, std::map<std::string, KeyType>>& schema() {
    static const std::map<std::string, std::map<std::string, KeyType>> s = {
        {"steady-scan",
         merged({kCommon, kModel,
                 {{"parameter", K::String}, {"lo", K::Number}, {"hi", K::Number}, {"n", K::Integer}}})},
        {"spectrum", merged({kCommon, kModel,
                             {{"case", K::String},
                              {"quadrature", K::String},
                              {"omega", K::String},
                              {"method", K::String},
                              {"l", K::Integer},
                              {"parity", K::String}}})},
        {"simulate", merged({kCommon, kModel,
                             {{"dt", K::Number},
                              {"t-end", K::Number},
                              {"trajectories", K::Integer},
                              {"seed", K::Integer},
                              {"burn-in", K::Number},
                              {"every", K::Integer}}})},
        {"lattice", merged({kCommon,
                            {{"M", K::Integer},
                             {"xi", K::Number},
                             {"gamma0", K::Number},
                             {"d0-over-x0", K::Number},
                             {"detuning", K::String},
                             {"dissipative-only", K::Bool},
                             {"initial", K::String},
                             {"N", K::Number},
                             {"t-end", K::Number},
                             {"n", K::Integer}}})},
        {"entangle", merged({kCommon, {{"lambda", K::Number}, {"k-max", K::Integer}, {"tol", K::Number}}})},
        {"cavity", merged({kCommon,
                           {{"R1", K::NumberOrInf},
                            {"R2", K::NumberOrInf},
                            {"L", K::Number},
                            {"lc", K::Number},
                            {"nc", K::Number},
                            {"Ts", K::Number},
                            {"Tp", K::Number},
                            {"lambda", K::Number},
                            {"chi2", K::Number},
                            {"P", K::Number}}})},
        {"validate", merged({kCommon, {{"criteria", K::String}, {"scale", K::Number}, {"seed", K::Integer}}})},
    };
    return s;
}

std::string type_name(KeyType t) {
    switch (t) {
    case K::Number: return "number";
    case K::Integer: return "integer";
    case K::String: return "string";
    case K::Bool: return "boolean";
    case K::NumberOrInf: return "number or \"inf\"";
    }
    return "?";
}

// Checks the JSON type of one config value and normalises numbers.
Json check_value(const std::string& command, const std::string& key, const Json& v, const std::string& path) {
    const auto& keys = command_keys(command);
    const auto it = keys.find(key);
    if (it == keys.end()) throw config_error(path, "unknown key for command '" + command + "'");
    switch (it->second) {
    case K::Number:
        if (!v.is_number()) throw config_error(path, "expected number");
        return Json(v.get<double>());
    case K::Integer:
        if (!v.is_number_integer()) throw config_error(path, "expected integer");
        return Json(v.get<long long>());
    case K::String:
        if (!v.is_string()) throw config_error(path, "expected string");
        return v;
    case K::Bool:
        if (!v.is_boolean()) throw config_error(path, "expected boolean");
        return v;
    case K::NumberOrInf:
        if (v.is_number()) return Json(v.get<double>());
        if (v.is_string() && v.get<std::string>() == "inf") return v;
        throw config_error(path, "expected number or \"inf\"");
    }
    return v;
}

double num(const Json& c, const std::string& k, double def) {
    if (!c.contains(k)) return def;
    if (c[k].is_string()) return std::numeric_limits<double>::infinity();  // "inf"
    return c[k].get<double>();
}
long long integer(const Json& c, const std::string& k, long long def) {
    return c.contains(k) ? c[k].get<long long>() : def;
}
std::string str(const Json& c, const std::string& k, const std::string& def) {
    return c.contains(k) ? c[k].get<std::string>() : def;
}
bool boolean(const Json& c, const std::string& k, bool def) { return c.contains(k) ? c[k].get<bool>() : def; }

std::vector<double> parse_list(const std::string& s, const std::string& path) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw config_error(path, "bad number '" + item + "'");
        }
    }
    return out;
}

ModelConfig model_config(const Json& c) {
    if (!c.contains("model")) throw config_error("config.model", "required");
    ModelConfig m;
    try {
        m.kind = model_kind_from_string(c["model"].get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw config_error("config.model", e.what());
    }
    m.sigma = num(c, "sigma", m.sigma);
    m.kappa = num(c, "kappa", m.kappa);
    m.g = num(c, "g", m.g);
    m.delta = num(c, "delta", m.delta);
    m.r = num(c, "r", m.r);
    m.f = int(integer(c, "f", m.f));
    if (c.contains("r-l")) m.r_l = parse_list(c["r-l"].get<std::string>(), "config.r-l");
    m.inj_intensity = num(c, "inj-intensity", m.inj_intensity);
    m.inj_phase = num(c, "inj-phase", m.inj_phase);
    m.lock_intensity = num(c, "lock-intensity", m.lock_intensity);
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error("config", e.what());
    }
    return m;
}

std::string write_csv_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

std::string write_json_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) return format_double(*d);
        return Json(format_double(*d)).dump();  // JSON has no inf / nan literals
    }
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return Json(std::get<std::string>(c)).dump();
}

// ---- commands

Table cmd_steady_scan(const Json& c) {
    const ModelConfig m = model_config(c);
    const std::string param = str(c, "parameter", "sigma");
    const double lo = num(c, "lo", 0.0), hi = num(c, "hi", 3.0);
    const long long n = integer(c, "n", 301);
    if (n < 2) throw config_error("config.n", "must be >= 2");
    ScanTable tab;
    try {
        tab = bifurcation_scan(m, param, lo, hi, int(n));
    } catch (const std::invalid_argument& e) {
        throw config_error("config.parameter", e.what());
    }
    Table t;
    t.columns = {"kind", "param", "control", "branch", "stable", "max_re"};
    for (const auto& p : tab.points)
        t.rows.push_back({std::string("point"), p.param, p.control, p.branch, (long long)(p.stable), p.max_re});
    for (const auto& e : tab.events)
        t.rows.push_back({"event:" + to_string(e.type), e.param, e.control, e.branch, 0LL, 0.0});
    t.summary.push_back({"parameter", tab.parameter});
    t.summary.push_back({"events", (long long)tab.events.size()});
    return t;
}

SpectrumCase case_for(const Json& c, const CaseParams& p) {
    if (c.contains("case")) {
        try {
            return spectrum_case_from_string(c["case"].get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw config_error("config.case", e.what());
        }
    }
    if (!c.contains("model")) throw config_error("config", "spectrum needs 'case' or 'model'");
    const std::string m = c["model"].get<std::string>();
    if (m == "dopo") return p.sigma > 1 ? SpectrumCase::DopoAbove : SpectrumCase::DopoBelow;
    if (m == "opo") return p.sigma > 1 ? SpectrumCase::TwinBeams : SpectrumCase::OpoBelowJoint;
    if (m == "two-channel") return SpectrumCase::TwoChannel;
    if (m == "ttm-dopo") return SpectrumCase::TtmDopo;
    if (m == "injected-ttm-dopo") return SpectrumCase::InjectedDark;
    if (m == "family-dopo") return SpectrumCase::Family;
    throw config_error("config.model", "model '" + m + "' has no spectrum case");
}

Table cmd_spectrum(const Json& c) {
    CaseParams p;
    p.sigma = num(c, "sigma", p.sigma);
    p.kappa = num(c, "kappa", p.kappa);
    p.r = num(c, "r", p.r);
    p.phi_i = num(c, "inj-phase", p.phi_i);
    p.Ii = num(c, "inj-intensity", p.Ii);
    p.f = int(integer(c, "f", p.f));
    if (c.contains("r-l")) p.r_l = parse_list(c["r-l"].get<std::string>(), "config.r-l");
    p.l = int(integer(c, "l", p.f));
    const std::string parity = str(c, "parity", "cos");
    if (parity != "cos" && parity != "sin") throw config_error("config.parity", "expected cos or sin");
    p.sin_parity = parity == "sin";
    const SpectrumCase sc = case_for(c, p);
    const auto quads = case_quadratures(sc);
    const std::string q = str(c, "quadrature", quads.front());
    if (std::find(quads.begin(), quads.end(), q) == quads.end())
        throw config_error("config.quadrature", "not available for case " + to_string(sc));
    const std::string method = str(c, "method", "closed-form");
    if (method != "closed-form" && method != "engine")
        throw config_error("config.method", "expected closed-form or engine");
    std::vector<double> om;
    try {
        om = parse_grid(str(c, "omega", "0:10:0.1"));
    } catch (const std::invalid_argument& e) {
        throw config_error("config.omega", e.what());
    }

    Table t;
    t.columns = {"omega", "V", "stderr", "quadrature", "method"};
    if (method == "engine") {
        const auto cs = case_setup(sc, p, q);
        for (double w : om) t.rows.push_back({w, linear_spectrum(cs.sys, cs.u, w).V, 0.0, q, cs.method});
    } else {
        for (double w : om) t.rows.push_back({w, closed_form_spectrum(sc, p, q, w), 0.0, q, std::string("closed-form")});
    }
    t.summary.push_back({"case", to_string(sc)});
    return t;
}

Eigen::VectorXcd simulation_start(const ModelConfig& m) {
    std::vector<SteadyBranch> bs;
    if (m.kind == ModelKind::InjectedTtmDopo) {
        const auto one = injected_one_mode(m.sigma, m.inj_phase, m.inj_intensity, m.kappa);
        for (std::size_t j = one.branches.size(); j-- > 0;)
            if (one.stable[j]) return to_doubled(one.branches[j].state);
    } else if (m.kind != ModelKind::ActiveLockClassical) {
        bs = analytic_steady(m, 0.0);
    }
    for (const auto& b : bs) {
        try {
            if (stability_matrix(m, b.state).stable) return to_doubled(b.state);
        } catch (const std::exception&) {
        }
    }
    if (!bs.empty()) return to_doubled(bs.front().state);
    return Eigen::VectorXcd::Zero(m.dim());
}

Table cmd_simulate(const Json& c) {
    if (!c.contains("seed")) throw config_error("config.seed", "required for simulate");
    const ModelConfig m = model_config(c);
    if (m.kind == ModelKind::ActiveLockClassical) throw config_error("config.model", "classical model has no noise");
    IntegratorConfig ic;
    ic.dt = num(c, "dt", 1e-3);
    ic.t_end = num(c, "t-end", 10.0);
    ic.trajectories = long(integer(c, "trajectories", 1000));
    ic.seed = std::uint64_t(integer(c, "seed", 1));
    ic.threads = int(integer(c, "threads", 0));
    ic.burn_in = num(c, "burn-in", 0.0);
    try {
        ic.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error("config", e.what());
    }
    const int every = int(integer(c, "every", 10));
    if (every < 1) throw config_error("config.every", "must be >= 1");
    const Eigen::VectorXcd init = simulation_start(m);
    Table t;
    if (m.kind == ModelKind::TtmDopo) {
        auto theta = [](const cd* s) { return 0.5 * std::arg(s[4] * s[3]); };
        TimeSeriesObserver obs({[theta](const cd* s) { return cd(theta(s)); },
                                [theta](const cd* s) { const double x = theta(s); return cd(x * x); }},
                               ic.steps() / every + 1, every);
        const auto st = run_model_ensemble(m, ic, init, obs);
        const double D = orientation_diffusion(m.g, m.sigma).D;
        t.columns = {"tau", "V_theta", "V_theta_over_D", "stderr"};
        const auto& acc = obs.real_parts();
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < obs.times().size(); ++i) {
            const double m1 = acc[0][i].mean, m2 = acc[1][i].mean, v = m2 - m1 * m1;
            // stderr of a variance from N samples of a near-Gaussian variable
            const double se = v * std::sqrt(2.0 / std::max(1.0, acc[0][i].n - 1));
            t.rows.push_back({obs.times()[i], v, v / D, se / D});
            if (obs.times()[i] >= ic.burn_in) {
                xs.push_back(obs.times()[i]);
                ys.push_back(v / D);
            }
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        const double nn = double(xs.size());
        t.summary.push_back({"D", D});
        t.summary.push_back({"slope", (nn * sxy - sx * sy) / (nn * sxx - sx * sx)});
        t.summary.push_back({"failed", (long long)st.failed});
        return t;
    }
    std::vector<Observable> obs_fns;
    for (int k = 0; k < m.dim(); ++k) obs_fns.push_back([k](const cd* s) { return s[k]; });
    TimeAverageObserver obs(obs_fns, ic.burn_in, every);
    const auto st = run_model_ensemble(m, ic, init, obs);
    const auto mu = obs.mean(), se = obs.stderr_();
    t.columns = {"index", "mean_re", "mean_im", "stderr_re", "stderr_im"};
    for (int k = 0; k < m.dim(); ++k)
        t.rows.push_back({(long long)k, mu[k].real(), mu[k].imag(), se[k].real(), se[k].imag()});
    t.summary.push_back({"failed", (long long)st.failed});
    return t;
}

Table cmd_lattice(const Json& c) {
    LatticeSpec s;
    s.M = int(integer(c, "M", s.M));
    s.xi = num(c, "xi", s.xi);
    s.Gamma0 = num(c, "gamma0", s.Gamma0);
    s.d0_over_X0 = num(c, "d0-over-x0", s.d0_over_X0);
    const std::string det = str(c, "detuning", "positive");
    if (det != "positive" && det != "negative") throw config_error("config.detuning", "expected positive or negative");
    s.detuning = det == "positive" ? DetuningSign::Positive : DetuningSign::Negative;
    s.dissipative_only = boolean(c, "dissipative-only", false);
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error("config", e.what());
    }
    const double T = num(c, "t-end", 3.0);
    const long long n = integer(c, "n", 101);
    if (n < 2 || !(T > 0)) throw config_error("config", "need n >= 2 and t-end > 0");
    std::vector<double> grid;
    for (long long i = 0; i < n; ++i) grid.push_back(T * double(i) / double(n - 1));
    const std::string init = str(c, "initial", "mott");
    LatticeSeries ser;
    if (init == "hardcore") {
        ser = evolve_hardcore(s, grid);
    } else if (init == "mott" || init == "superfluid") {
        const double N = num(c, "N", double(s.sites()));
        ser = evolve_bosons(s, init == "mott" ? LatticeInitial::Mott : LatticeInitial::Superfluid, N, grid);
    } else {
        throw config_error("config.initial", "expected mott, superfluid or hardcore");
    }
    Table t;
    t.columns = {"t", "n_T", "R"};
    for (std::size_t i = 0; i < ser.t.size(); ++i) t.rows.push_back({ser.t[i], ser.n_T[i], ser.R[i]});
    t.summary.push_back({"initial_rate_derivative", initial_rate_derivative(s)});
    return t;
}

Table cmd_entangle(const Json& c) {
    const double lambda = num(c, "lambda", 0.5);
    const long long kmax = integer(c, "k-max", 12);
    const double tol = num(c, "tol", 1e-12);
    if (kmax < 0) throw config_error("config.k-max", "must be >= 0");
    Table t;
    t.columns = {"k", "entropy", "n_max", "tail"};
    for (int k = 0; k <= kmax; ++k) {
        const int n = required_n_max(lambda, k, tol);
        const auto r = added_subtracted(lambda, k, n);
        t.rows.push_back({(long long)k, r.entropy, (long long)n, r.dist.tail});
    }
    t.summary.push_back({"tmsv_entropy", tmsv_entropy(lambda)});
    return t;
}

Table cmd_cavity(const Json& c) {
    CavityGeometry g;
    g.R1 = num(c, "R1", g.R1);
    g.R2 = num(c, "R2", g.R2);
    g.L = num(c, "L", 5e-3);
    g.lc = num(c, "lc", 0.0);
    g.nc = num(c, "nc", 1.0);
    g.Ts = num(c, "Ts", g.Ts);
    g.Tp = num(c, "Tp", g.Tp);
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error("config", e.what());
    }
    const double lambda = num(c, "lambda", 1064e-9);
    Table t;
    t.columns = {"quantity", "value"};
    const auto rep = analyze_geometry(g);
    t.rows.push_back({std::string("g1"), rep.g1});
    t.rows.push_back({std::string("g2"), rep.g2});
    t.rows.push_back({std::string("stable"), rep.stable ? 1.0 : 0.0});
    t.rows.push_back({std::string("gouy"), rep.gouy});
    t.rows.push_back({std::string("fsr"), rep.fsr});
    t.rows.push_back({std::string("gamma_s"), cavity_decay_rate(g.Ts, g.L_opt())});
    t.rows.push_back({std::string("gamma_p"), cavity_decay_rate(g.Tp, g.L_opt())});
    if (rep.stable) {
        const auto mg = gaussian_mode_geometry(g, lambda);
        t.rows.push_back({std::string("w0"), mg.w0});
        t.rows.push_back({std::string("zR"), mg.zR});
        t.rows.push_back({std::string("z1"), mg.z1_eff});
    }
    if (c.contains("chi2")) {
        PhysicalParams p;
        p.chi2 = num(c, "chi2", 0.0);
        p.P = num(c, "P", 0.0);
        p.lambda0 = lambda;
        p.geom = g;
        const auto r = physical_rates(p, 4 * phys::pi * phys::c / lambda);
        t.rows.push_back({std::string("kappa"), r.kappa});
        t.rows.push_back({std::string("chi"), r.chi});
        t.rows.push_back({std::string("E"), r.E});
        t.rows.push_back({std::string("g"), r.g});
        t.rows.push_back({std::string("sigma"), r.sigma});
    }
    return t;
}

Table cmd_validate(const Json& c, bool& all_pass) {
    ValidationOptions o;
    o.scale = num(c, "scale", 1.0);
    if (!(o.scale > 0)) throw config_error("config.scale", "must be > 0");
    o.threads = int(integer(c, "threads", 0));
    if (c.contains("seed")) o.seed = (unsigned long long)integer(c, "seed", 0);
    std::vector<int> ids;
    if (c.contains("criteria"))
        for (double x : parse_list(c["criteria"].get<std::string>(), "config.criteria")) {
            if (x != std::floor(x) || x < 1 || x > kCriterionCount)
                throw config_error("config.criteria", "ids are 1.." + std::to_string(kCriterionCount));
            ids.push_back(int(x));
        }
    const auto rs = run_validation(o, ids);
    Table t;
    t.columns = {"id", "name", "status", "seconds", "detail"};
    all_pass = true;
    for (const auto& r : rs) {
        t.rows.push_back({(long long)r.id, r.name, status_word(r), r.seconds, r.detail});
        all_pass = all_pass && r.pass;
    }
    return t;
}

std::string module_of(const std::string& command) {
    if (command == "steady-scan") return "steady";
    if (command == "spectrum") return "spectra";
    if (command == "simulate") return "sde";
    if (command == "validate") return "validation";
    return command;
}

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> c = {"steady-scan", "spectrum", "simulate", "lattice",
                                               "entangle",    "cavity",   "validate"};
    return c;
}

const std::map<std::string, KeyType>& command_keys(const std::string& command) {
    const auto it = schema().find(command);
    if (it == schema().end()) throw config_error("command", "unknown command '" + command + "'");
    return it->second;
}

Json coerce(const std::string& command, const std::string& key, const std::string& text, const std::string& path) {
    const auto& keys = command_keys(command);
    const auto it = keys.find(key);
    if (it == keys.end()) throw config_error(path, "unknown key for command '" + command + "'");
    auto as_double = [&]() {
        try {
            std::size_t pos = 0;
            const double v = std::stod(text, &pos);
            if (pos != text.size() || !std::isfinite(v)) throw std::invalid_argument("not a finite number");
            return v;
        } catch (const std::exception&) {
            throw config_error(path, "expected " + type_name(it->second) + ", got '" + text + "'");
        }
    };
    switch (it->second) {
    case K::Number: return Json(as_double());
    case K::NumberOrInf:
        if (text == "inf") return Json("inf");
        return Json(as_double());
    case K::Integer: {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(text, &pos);
            if (pos != text.size()) throw std::invalid_argument("trailing");
            return Json(v);
        } catch (const std::exception&) {
            throw config_error(path, "expected integer, got '" + text + "'");
        }
    }
    case K::Bool:
        if (text == "true" || text == "1") return Json(true);
        if (text == "false" || text == "0") return Json(false);
        throw config_error(path, "expected boolean, got '" + text + "'");
    case K::String: return Json(text);
    }
    return Json(text);
}

Json parse_config_text(const std::string& text, const std::string& command) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw config_error("config", std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw config_error("config", "expected a JSON object");
    // an output document carries its configuration under "config"
    if (doc.contains("config") && doc.contains("tool")) doc = doc["config"];
    if (!doc.is_object()) throw config_error("config", "expected a JSON object");
    Json out = Json::object();
    for (auto it = doc.begin(); it != doc.end(); ++it)
        out[it.key()] = check_value(command, it.key(), it.value(), "config." + it.key());
    if (out.contains("command") && out["command"].get<std::string>() != command)
        throw config_error("config.command", "file is for '" + out["command"].get<std::string>() + "'");
    return out;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const Json& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a64(config.dump()));
    return buf;
}

std::vector<double> parse_grid(const std::string& s) {
    auto number = [](const std::string& x) {
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(x, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad number '" + x + "'");
        }
        if (pos != x.size()) throw std::invalid_argument("bad number '" + x + "'");
        return v;
    };
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string p;
        while (std::getline(ss, p, ':')) parts.push_back(p);
        if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step");
        const double a = number(parts[0]), b = number(parts[1]), h = number(parts[2]);
        if (!(h > 0) || b < a) throw std::invalid_argument("range needs step > 0 and stop >= start");
        const long n = long(std::floor((b - a) / h + 1e-9));
        if (n > 10000000) throw std::invalid_argument("range has too many points");
        for (long i = 0; i <= n; ++i) out.push_back(a + double(i) * h);
        return out;
    }
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, ',')) out.push_back(number(p));
    if (out.empty()) throw std::invalid_argument("empty grid");
    return out;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string emit(const Table& t, const Json& config, const std::string& format) {
    std::ostringstream os;
    if (format == "csv") {
        os << "# tool: " << kToolName << " " << kToolVersion << "\n";
        os << "# config: " << config.dump() << "\n";
        os << "# config_hash: " << config_hash(config) << "\n";
        for (const auto& [k, v] : t.summary) os << "# " << k << ": " << write_csv_cell(v) << "\n";
        for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
        os << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << write_csv_cell(row[i]);
            os << "\n";
        }
        return os.str();
    }
    if (format != "json") throw config_error("config.format", "expected csv or json");
    os << "{\"tool\":" << Json(kToolName).dump() << ",\"version\":" << Json(kToolVersion).dump()
       << ",\"config\":" << config.dump() << ",\"config_hash\":\"" << config_hash(config) << "\",\"summary\":{";
    for (std::size_t i = 0; i < t.summary.size(); ++i)
        os << (i ? "," : "") << Json(t.summary[i].first).dump() << ":" << write_json_cell(t.summary[i].second);
    os << "},\"columns\":[";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << Json(t.columns[i]).dump();
    os << "],\"rows\":[";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        os << (r ? "," : "") << "[";
        for (std::size_t i = 0; i < t.rows[r].size(); ++i) os << (i ? "," : "") << write_json_cell(t.rows[r][i]);
        os << "]";
    }
    os << "]}\n";
    return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-mode OPO simulator and analysis tool", kToolName};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    std::map<std::string, std::map<std::string, std::string>> flags;
    std::map<std::string, std::string> config_path;
    for (const auto& cmd : commands()) {
        CLI::App* sub = app.add_subcommand(cmd);
        sub->add_option("--config", config_path[cmd], "JSON configuration file; flags override its keys");
        for (const auto& [key, type] : command_keys(cmd)) {
            if (key == "command") continue;
            sub->add_option("--" + key, flags[cmd][key], type_name(type));
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kSchemaError;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    CLI::App* sub = app.get_subcommand(cmd);

    Json config;
    try {
        config = Json::object();
        if (!config_path[cmd].empty()) {
            std::ifstream in(config_path[cmd]);
            if (!in) throw config_error("--config", "cannot read '" + config_path[cmd] + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            config = parse_config_text(ss.str(), cmd);
        }
        for (const auto& [key, text] : flags[cmd])
            if (sub->count("--" + key) > 0) config[key] = coerce(cmd, key, text, "--" + key);
        config["command"] = cmd;
    } catch (const config_error& e) {
        err << "error: " << e.what() << "\n";
        return kSchemaError;
    }

    const std::string format = config.value("format", std::string("csv"));
    if (format != "csv" && format != "json") {
        err << "error: config.format: expected csv or json\n";
        return kSchemaError;
    }
    Table table;
    bool all_pass = true;
    try {
        if (cmd == "steady-scan") table = cmd_steady_scan(config);
        else if (cmd == "spectrum") table = cmd_spectrum(config);
        else if (cmd == "simulate") table = cmd_simulate(config);
        else if (cmd == "lattice") table = cmd_lattice(config);
        else if (cmd == "entangle") table = cmd_entangle(config);
        else if (cmd == "cavity") table = cmd_cavity(config);
        else table = cmd_validate(config, all_pass);
    } catch (const config_error& e) {
        err << "error: " << e.what() << "\n";
        return kSchemaError;
    } catch (const std::exception& e) {
        err << "error: " << module_of(cmd) << ": " << e.what() << "\n";
        return kNumericError;
    }

    const std::string text = emit(table, config, format);
    const std::string path = config.value("output", std::string());
    if (path.empty() || path == "-") {
        out << text;
    } else {
        std::ofstream f(path, std::ios::binary);
        if (!f || !(f << text) || !f.flush()) {
            err << "error: cannot write '" << path << "'\n";
            return kIoError;
        }
    }
    if (cmd == "validate") {
        for (const auto& row : table.rows)
            err << std::get<std::string>(row[2]) << " " << std::get<long long>(row[0]) << " "
                << std::get<std::string>(row[1]) << "\n";
        return all_pass ? kOk : kValidationFailed;
    }
    return kOk;
}

}  // namespace opo::cli
