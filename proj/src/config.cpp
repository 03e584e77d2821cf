#include "eesim/config.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "eesim/coherent.hpp"
#include "eesim/errors.hpp"
#include "eesim/onephoton.hpp"
#include "eesim/protocols.hpp"
#include "eesim/spectrum.hpp"
#include "eesim/twophoton.hpp"

namespace eesim {

namespace {

struct RawValue {
    std::string value;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, RawValue>;
using Table = std::map<std::string, Section>;

std::string trim(const std::string &s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

Table tokenize(const std::string &text) {
    Table table;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno)
                                  + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno)
                                  + ": empty section name");
            table[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno)
                              + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno)
                              + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno)
                              + ": empty key or value");
        auto [it, inserted] = table[section].emplace(key,
                                                     RawValue{value, lineno});
        if (!inserted)
            throw ConfigError("line " + std::to_string(lineno)
                              + ": duplicate key '" + key + "'");
    }
    return table;
}

class Reader {
public:
    Reader(Table table) : table_(std::move(table)) {}

    bool has_section(const std::string &s) const { return table_.count(s); }

    std::optional<std::string> get(const std::string &sec,
                                   const std::string &key) {
        auto s = table_.find(sec);
        if (s == table_.end())
            return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end())
            return std::nullopt;
        k->second.used = true;
        return k->second.value;
    }

    double get_num(const std::string &sec, const std::string &key,
                   double fallback) {
        auto v = get(sec, key);
        if (!v)
            return fallback;
        return parse_num(sec, key, *v);
    }

    // numeric value or one of the allowed named values mapped to NaN-tagged
    double parse_num(const std::string &sec, const std::string &key,
                     const std::string &v) {
        try {
            size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size())
                throw std::invalid_argument(v);
            return x;
        } catch (const std::exception &) {
            throw ConfigError("[" + sec + "] " + key + ": '" + v
                              + "' is not a number");
        }
    }

    int get_int(const std::string &sec, const std::string &key, int fallback) {
        auto v = get(sec, key);
        if (!v)
            return fallback;
        const double x = parse_num(sec, key, *v);
        if (x != std::floor(x))
            throw ConfigError("[" + sec + "] " + key + ": expected an integer");
        return static_cast<int>(x);
    }

    bool get_bool(const std::string &sec, const std::string &key,
                  bool fallback) {
        auto v = get(sec, key);
        if (!v)
            return fallback;
        if (*v == "true")
            return true;
        if (*v == "false")
            return false;
        throw ConfigError("[" + sec + "] " + key + ": expected true or false");
    }

    std::vector<double> get_list(const std::string &sec, const std::string &key,
                                 std::vector<double> fallback) {
        auto v = get(sec, key);
        if (!v)
            return fallback;
        std::vector<double> out;
        std::istringstream is(*v);
        std::string tok;
        while (std::getline(is, tok, ','))
            out.push_back(parse_num(sec, key, trim(tok)));
        if (out.empty())
            throw ConfigError("[" + sec + "] " + key + ": empty list");
        return out;
    }

    void reject_unused() const {
        for (const auto &[sec, kv] : table_)
            for (const auto &[key, raw] : kv)
                if (!raw.used)
                    throw ConfigError("line " + std::to_string(raw.line)
                                      + ": unknown key '" + key + "' in ["
                                      + sec + "]");
    }

private:
    Table table_;
};

const std::vector<std::string> kModes = {
    "linear",        "coherent",      "trap",        "release",
    "pipeline",      "sweep-vc-sigma", "sweep-k-sigma", "loss-compare"};

RunConfig::CfgPulse read_pulse(Reader &r, const std::string &sec,
                               const RunConfig::CfgPulse &defaults) {
    RunConfig::CfgPulse p = defaults;
    p.sigma_gamma = r.get_num(sec, "sigma_gamma", p.sigma_gamma);
    if (p.sigma_gamma <= 0)
        throw ConfigError("[" + sec + "] sigma_gamma must be positive");
    if (auto v = r.get(sec, "x_center_gamma")) {
        if (*v != "auto")
            p.x_center_gamma = r.parse_num(sec, "x_center_gamma", *v);
    }
    if (auto v = r.get(sec, "carrier")) {
        if (*v != "bright" && *v != "ee")
            r.parse_num(sec, "carrier", *v); // must be numeric
        p.carrier = *v;
    }
    return p;
}

} // namespace

RunConfig parse_config_text(const std::string &text) {
    Reader r(tokenize(text));
    RunConfig cfg;

    if (auto v = r.get("system", "kind"))
        cfg.kind = *v;
    if (cfg.kind != "cavity-atom" && cfg.kind != "two-cavity"
        && cfg.kind != "three-mode")
        throw ConfigError("[system] kind must be cavity-atom, two-cavity or "
                          "three-mode");

    if (cfg.kind == "three-mode") {
        cfg.three.omega_1 = r.get_num("system", "omega_1", 1.0);
        cfg.three.omega_2 = r.get_num("system", "omega_2", 1.0);
        cfg.three.omega_a = r.get_num("system", "omega_a", 1.0);
        cfg.three.v_1 = r.get_num("system", "v_1", 0.0);
        cfg.three.v_2 = r.get_num("system", "v_2", 0.0);
        cfg.three.j_coupling = r.get_num("system", "j_coupling", 0.0);
        cfg.three.gamma_prime_1 = r.get_num("system", "gamma_prime_1", 0.0);
        cfg.three.gamma_prime_2 = r.get_num("system", "gamma_prime_2", 0.0);
        cfg.three.gamma_prime_a = r.get_num("system", "gamma_prime_a", 0.0);
        if (auto v = r.get("system", "g_coupling")) {
            if (*v == "ee-condition")
                cfg.g_from_condition = true;
            else
                cfg.three.g_coupling = r.parse_num("system", "g_coupling", *v);
        }
    } else {
        cfg.sys.omega_a = r.get_num("system", "omega_a", 1.0);
        cfg.sys.omega_c = r.get_num("system", "omega_c", 1.0);
        cfg.sys.v_a = r.get_num("system", "v_a", 0.0);
        if (auto v = r.get("system", "v_c")) {
            cfg.sys.v_c = r.parse_num("system", "v_c", *v);
        } else if (auto f = r.get("system", "vc_over_va")) {
            cfg.sys.v_c = r.parse_num("system", "vc_over_va", *f) * cfg.sys.v_a;
        }
        cfg.sys.gamma_prime_c = r.get_num("system", "gamma_prime_c", 0.0);
        cfg.sys.gamma_prime_a = r.get_num("system", "gamma_prime_a", 0.0);
        if (auto v = r.get("system", "j_coupling")) {
            if (*v == "ee-condition")
                cfg.j_from_condition = true;
            else
                cfg.sys.j_coupling = r.parse_num("system", "j_coupling", *v);
        }
    }

    cfg.dx_gamma = r.get_num("grid", "dx_gamma", cfg.dx_gamma);
    if (cfg.dx_gamma <= 0)
        throw ConfigError("[grid] dx_gamma must be positive");
    if (auto v = r.get("grid", "m")) {
        if (*v != "auto") {
            cfg.grid_m = r.get_int("grid", "m", 0);
            (void)0;
        }
    }
    if (auto v = r.get("grid", "x0_gamma")) {
        if (*v != "auto")
            cfg.grid_x0_gamma = r.parse_num("grid", "x0_gamma", *v);
    }

    cfg.pulse = read_pulse(r, "pulse", cfg.pulse);
    if (r.has_section("pulse_b")) {
        cfg.has_pulse_b = true;
        cfg.pulse_b = read_pulse(r, "pulse_b", cfg.pulse);
    } else {
        cfg.pulse_b = cfg.pulse;
    }

    cfg.mean_n = r.get_num("drive", "mean_n", cfg.mean_n);
    cfg.sigma_t_gamma = r.get_num("drive", "sigma_t_gamma", cfg.sigma_t_gamma);
    cfg.t0_gamma = r.get_num("drive", "t0_gamma", cfg.t0_gamma);
    if (auto v = r.get("drive", "carrier")) {
        if (*v != "bright" && *v != "ee")
            r.parse_num("drive", "carrier", *v);
        cfg.drive_carrier = *v;
    }
    if (auto v = r.get("drive", "n_max")) {
        if (*v != "auto")
            cfg.n_max = r.get_int("drive", "n_max", 0);
    }

    if (auto v = r.get("experiment", "mode"))
        cfg.mode = *v;
    if (std::find(kModes.begin(), kModes.end(), cfg.mode) == kModes.end())
        throw ConfigError("[experiment] mode is required and must be one of "
                          "linear, coherent, trap, release, pipeline, "
                          "sweep-vc-sigma, sweep-k-sigma, loss-compare");
    cfg.gamma_prime_ratios =
        r.get_list("experiment", "gamma_prime_ratios", cfg.gamma_prime_ratios);
    cfg.sigma_release_gamma =
        r.get_num("experiment", "sigma_release_gamma", cfg.sigma_release_gamma);
    cfg.sigma_list_gamma =
        r.get_list("experiment", "sigma_list_gamma", cfg.sigma_list_gamma);

    cfg.t_final_gamma = r.get_num("numerics", "t_final_gamma", cfg.t_final_gamma);
    cfg.t_max_gamma = r.get_num("numerics", "t_max_gamma", cfg.t_max_gamma);
    cfg.steady_window_gamma =
        r.get_num("numerics", "steady_window_gamma", cfg.steady_window_gamma);
    cfg.steady_rel_tol =
        r.get_num("numerics", "steady_rel_tol", cfg.steady_rel_tol);

    if (auto v = r.get("output", "directory"))
        cfg.directory = *v;
    cfg.write_grids = r.get_bool("output", "write_grids", cfg.write_grids);

    r.reject_unused();

    if (cfg.mode == "coherent" && std::isnan(cfg.mean_n))
        throw ConfigError("[drive] mean_n is required for coherent runs");
    if (cfg.kind == "three-mode" && cfg.mode != "coherent")
        throw ConfigError("three-mode systems support only coherent runs");
    return cfg;
}

RunConfig parse_config_file(const std::string &path) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string list_str(const std::vector<double> &xs) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i)
        out += (i ? "," : "") + num(xs[i]);
    return out;
}

void emit_pulse(std::ostringstream &os, const std::string &sec,
                const RunConfig::CfgPulse &p) {
    os << "[" << sec << "]\n";
    os << "sigma_gamma = " << num(p.sigma_gamma) << "\n";
    os << "x_center_gamma = "
       << (std::isnan(p.x_center_gamma) ? "auto" : num(p.x_center_gamma))
       << "\n";
    os << "carrier = " << p.carrier << "\n";
}

} // namespace

std::string emit_config(const RunConfig &cfg) {
    std::ostringstream os;
    os << "[system]\n";
    os << "kind = " << cfg.kind << "\n";
    if (cfg.kind == "three-mode") {
        os << "omega_1 = " << num(cfg.three.omega_1) << "\n";
        os << "omega_2 = " << num(cfg.three.omega_2) << "\n";
        os << "omega_a = " << num(cfg.three.omega_a) << "\n";
        os << "v_1 = " << num(cfg.three.v_1) << "\n";
        os << "v_2 = " << num(cfg.three.v_2) << "\n";
        os << "j_coupling = " << num(cfg.three.j_coupling) << "\n";
        os << "g_coupling = "
           << (cfg.g_from_condition ? "ee-condition"
                                    : num(cfg.three.g_coupling))
           << "\n";
        os << "gamma_prime_1 = " << num(cfg.three.gamma_prime_1) << "\n";
        os << "gamma_prime_2 = " << num(cfg.three.gamma_prime_2) << "\n";
        os << "gamma_prime_a = " << num(cfg.three.gamma_prime_a) << "\n";
    } else {
        os << "omega_a = " << num(cfg.sys.omega_a) << "\n";
        os << "omega_c = " << num(cfg.sys.omega_c) << "\n";
        os << "v_a = " << num(cfg.sys.v_a) << "\n";
        os << "v_c = " << num(cfg.sys.v_c) << "\n";
        os << "j_coupling = "
           << (cfg.j_from_condition ? "ee-condition" : num(cfg.sys.j_coupling))
           << "\n";
        os << "gamma_prime_c = " << num(cfg.sys.gamma_prime_c) << "\n";
        os << "gamma_prime_a = " << num(cfg.sys.gamma_prime_a) << "\n";
    }
    os << "[grid]\n";
    os << "dx_gamma = " << num(cfg.dx_gamma) << "\n";
    os << "m = " << (cfg.grid_m > 0 ? std::to_string(cfg.grid_m) : "auto")
       << "\n";
    os << "x0_gamma = "
       << (std::isnan(cfg.grid_x0_gamma) ? "auto" : num(cfg.grid_x0_gamma))
       << "\n";
    emit_pulse(os, "pulse", cfg.pulse);
    if (cfg.has_pulse_b)
        emit_pulse(os, "pulse_b", cfg.pulse_b);
    os << "[drive]\n";
    if (!std::isnan(cfg.mean_n))
        os << "mean_n = " << num(cfg.mean_n) << "\n";
    os << "sigma_t_gamma = " << num(cfg.sigma_t_gamma) << "\n";
    os << "t0_gamma = " << num(cfg.t0_gamma) << "\n";
    os << "carrier = " << cfg.drive_carrier << "\n";
    os << "n_max = " << (cfg.n_max > 0 ? std::to_string(cfg.n_max) : "auto")
       << "\n";
    os << "[experiment]\n";
    os << "mode = " << cfg.mode << "\n";
    os << "gamma_prime_ratios = " << list_str(cfg.gamma_prime_ratios) << "\n";
    os << "sigma_release_gamma = " << num(cfg.sigma_release_gamma) << "\n";
    if (!cfg.sigma_list_gamma.empty())
        os << "sigma_list_gamma = " << list_str(cfg.sigma_list_gamma) << "\n";
    os << "[numerics]\n";
    if (!std::isnan(cfg.t_final_gamma))
        os << "t_final_gamma = " << num(cfg.t_final_gamma) << "\n";
    os << "t_max_gamma = " << num(cfg.t_max_gamma) << "\n";
    os << "steady_window_gamma = " << num(cfg.steady_window_gamma) << "\n";
    os << "steady_rel_tol = " << num(cfg.steady_rel_tol) << "\n";
    os << "[output]\n";
    os << "directory = " << cfg.directory << "\n";
    os << "write_grids = " << (cfg.write_grids ? "true" : "false") << "\n";
    return os.str();
}

ResolvedRun resolve(const RunConfig &cfg_in) {
    ResolvedRun run;
    run.cfg = cfg_in;
    try {
        if (cfg_in.kind == "three-mode") {
            ThreeModeParams &p = run.cfg.three;
            p.validate();
            if (run.cfg.g_from_condition)
                p.g_coupling = solve_g_for_three_mode_ee(p);
            run.gamma_unit = p.gamma_unit();
            run.eq5_residual = three_mode_ee_residual(p);
            const ComplexSpectrum s = spectrum_of(three_mode_heff(p));
            for (int i = 0; i < 3; ++i) {
                run.heff_eigen_re.push_back(s.eigenvalues[i].real());
                run.heff_eigen_im.push_back(s.eigenvalues[i].imag());
            }
            run.omega_ee = s.eigenvalues[0].real();
        } else {
            SystemParams &p = run.cfg.sys;
            p.validate();
            if (run.cfg.j_from_condition)
                p.j_coupling = solve_j_for_ee(p);
            run.gamma_unit = p.gamma_unit();
            run.ee_residual = ee_condition_residual(p);
            run.omega_ee = ee_frequency(p);
            run.omega_bright = bright_frequency(p);
            run.bright_amplitude_decay = p.gamma_a() + p.gamma_c();
            const ComplexSpectrum s1 = spectrum_of(single_excitation_heff(p));
            for (int i = 0; i < 2; ++i) {
                run.heff_eigen_re.push_back(s1.eigenvalues[i].real());
                run.heff_eigen_im.push_back(s1.eigenvalues[i].imag());
            }
            const ComplexSpectrum s2 = spectrum_of(two_excitation_heff(p));
            for (int i = 0; i < 2; ++i) {
                run.two_exc_eigen_re.push_back(s2.eigenvalues[i].real());
                run.two_exc_eigen_im.push_back(s2.eigenvalues[i].imag());
            }
            if (p.v_a != 0.0 || p.v_c != 0.0) {
                const EEAmplitudes ee = ee_state(p);
                run.ee_atom_weight = ee.atom * ee.atom;
                run.ee_cavity_weight = ee.cavity * ee.cavity;
            }
        }
    } catch (const ConfigError &) {
        throw;
    } catch (const SimulationError &err) {
        throw ConfigError(err.what());
    }
    if (run.gamma_unit <= 0.0)
        throw ConfigError("waveguide couplings give Gamma = 0; dynamics "
                          "units are undefined");
    return run;
}

std::string spectrum_report(const ResolvedRun &run) {
    std::ostringstream os;
    char buf[160];
    auto row = [&](const char *k, double v) {
        std::snprintf(buf, sizeof buf, "  %-28s %.10g\n", k, v);
        os << buf;
    };
    os << "spectrum (" << run.cfg.kind << ")\n";
    row("gamma_unit", run.gamma_unit);
    if (run.cfg.kind == "three-mode") {
        row("g_coupling", run.cfg.three.g_coupling);
        row("eq5_residual", run.eq5_residual);
        for (size_t i = 0; i < run.heff_eigen_re.size(); ++i) {
            std::snprintf(buf, sizeof buf,
                          "  heff_eigenvalue_%zu           %.10g %+.3e i\n", i,
                          run.heff_eigen_re[i], run.heff_eigen_im[i]);
            os << buf;
        }
    } else {
        row("j_coupling", run.cfg.sys.j_coupling);
        row("ee_residual", run.ee_residual);
        row("omega_ee", run.omega_ee);
        row("omega_bright", run.omega_bright);
        row("bright_amplitude_decay", run.bright_amplitude_decay);
        row("ee_atom_weight", run.ee_atom_weight);
        row("ee_cavity_weight", run.ee_cavity_weight);
        for (size_t i = 0; i < run.two_exc_eigen_re.size(); ++i) {
            std::snprintf(buf, sizeof buf,
                          "  two_exc_eigenvalue_%zu        %.10g %+.3e i\n", i,
                          run.two_exc_eigen_re[i], run.two_exc_eigen_im[i]);
            os << buf;
        }
    }
    return os.str();
}

std::uint64_t fnv1a64_file(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open '" + path + "' for checksumming");
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < is.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

namespace {

double resolve_carrier(const std::string &carrier, const ResolvedRun &run) {
    if (carrier == "ee")
        return run.omega_ee;
    if (carrier == "bright")
        return run.omega_bright;
    return std::stod(carrier);
}

PulseSpec pulse_spec_from(const RunConfig::CfgPulse &p, const ResolvedRun &run,
                          double omega_ref) {
    const double gamma = run.gamma_unit;
    PulseSpec spec;
    spec.width = p.sigma_gamma / gamma;
    spec.center = std::isnan(p.x_center_gamma)
                      ? -std::max(5.0, 3.0 * p.sigma_gamma) / gamma
                      : p.x_center_gamma / gamma;
    spec.carrier = resolve_carrier(p.carrier, run) - omega_ref;
    return spec;
}

GridSpec grid_for(const ResolvedRun &run, double left_gamma,
                  double right_gamma) {
    const double gamma = run.gamma_unit;
    const double dx = run.cfg.dx_gamma / gamma;
    if (run.cfg.grid_m > 0) {
        GridSpec g;
        g.n_cells = run.cfg.grid_m;
        g.dx = dx;
        if (!std::isnan(run.cfg.grid_x0_gamma)) {
            g.coupling_index = static_cast<int>(
                std::lround(-run.cfg.grid_x0_gamma / run.cfg.dx_gamma));
        } else {
            g.coupling_index = static_cast<int>(
                std::lround(left_gamma / run.cfg.dx_gamma));
        }
        g.x0 = -g.coupling_index * dx;
        g.validate();
        return g;
    }
    return GridSpec::make(left_gamma / gamma, right_gamma / gamma, dx);
}

using nlohmann::json;

struct Executor {
    const ResolvedRun &run;
    const std::string out;
    RunArtifacts artifacts;
    json summary = json::object();

    std::string path(const std::string &name) const { return out + "/" + name; }

    void add(const std::string &p) { artifacts.files.push_back(p); }

    void record(const std::string &key, double value) {
        summary[key] = value;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        artifacts.summary[key] = buf;
    }

    void write_traj(const Trajectory &t, const std::string &name) {
        const std::string p = path(name);
        t.write_csv_file(p);
        add(p);
    }

    void run_linear() {
        const RunConfig &cfg = run.cfg;
        const double gamma = run.gamma_unit;
        const double t_final_gamma =
            std::isnan(cfg.t_final_gamma) ? 20.0 : cfg.t_final_gamma;
        const PulseSpec ps = pulse_spec_from(cfg.pulse, run, run.omega_ee);
        const double left = -ps.center * gamma + 7.0 * cfg.pulse.sigma_gamma + 2.0;
        const GridSpec grid = grid_for(run, left, t_final_gamma + 2.0);
        EvolveOptions opts;
        opts.omega_ref = run.omega_ee;
        SingleRunResult res;
        if (cfg.kind == "two-cavity") {
            res = classical_two_cavity(cfg.sys, grid, ps, t_final_gamma / gamma,
                                       opts);
        } else {
            SingleExcState st;
            st.xi = input_pulse(ps, grid);
            res = evolve_single(cfg.sys, grid, std::move(st),
                                t_final_gamma / gamma, opts);
        }
        write_traj(res.traj, "trajectory.csv");
        record("peak_stored",
               [&] {
                   double m = 0;
                   const int ca = res.traj.col("pop_atom");
                   const int cc = res.traj.col("pop_cavity");
                   for (const auto &r : res.traj.rows)
                       m = std::max(m, r[ca] + r[cc]);
                   return m;
               }());
        record("final_stored", res.traj.last("pop_atom")
                                   + res.traj.last("pop_cavity"));
    }

    void run_coherent() {
        const RunConfig &cfg = run.cfg;
        const double gamma = run.gamma_unit;
        const double t_final_gamma = std::isnan(cfg.t_final_gamma)
                                         ? (cfg.kind == "three-mode" ? 40.0
                                                                     : 80.0)
                                         : cfg.t_final_gamma;
        const int n_max = cfg.n_max > 0
                              ? cfg.n_max
                              : FockSpaceSpec::auto_cutoff(cfg.mean_n);
        DriveEnvelope drive;
        drive.mean_n = cfg.mean_n;
        drive.sigma_t = cfg.sigma_t_gamma / gamma;
        drive.t0 = cfg.t0_gamma / gamma;
        MasterOptions opts;
        opts.gamma_unit = gamma;
        MasterRunResult res;
        if (cfg.kind == "three-mode") {
            LindbladGenerator gen = build_generator(cfg.three, n_max);
            drive.detuning = resolve_carrier(cfg.drive_carrier, run)
                             - run.omega_ee;
            res = evolve_master(gen, drive, t_final_gamma / gamma, opts);
            record("p_ee1_final", res.traj.last("p_ee"));
            record("p_ee2_final", res.traj.last("p_ee2"));
        } else {
            LindbladGenerator gen = build_generator(cfg.sys, n_max,
                                                    run.omega_ee);
            drive.detuning = resolve_carrier(cfg.drive_carrier, run)
                             - run.omega_ee;
            res = evolve_master(gen, drive, t_final_gamma / gamma, opts);
            record("p_ee_final", res.traj.last("p_ee"));
            record("n_cavity_final", res.traj.last("n_cavity"));
            record("p_atom_final", res.traj.last("p_atom"));
        }
        record("n_max", n_max);
        write_traj(res.traj, "trajectory.csv");
    }

    void run_trap() {
        const RunConfig &cfg = run.cfg;
        TrapOptions topts;
        topts.dx_gamma = cfg.dx_gamma;
        topts.t_max_gamma = cfg.t_max_gamma;
        topts.keep_trajectory = true;

        const PulseSpec pa = pulse_spec_from(cfg.pulse, run, run.omega_ee);
        const PulseSpec pb = pulse_spec_from(cfg.pulse_b, run, run.omega_ee);
        const double gamma = run.gamma_unit;
        const double sig_max = std::max(cfg.pulse.sigma_gamma,
                                        cfg.pulse_b.sigma_gamma);
        const double left = std::max(-pa.center, -pb.center) * gamma
                            + 7.0 * sig_max + 2.0;
        const double right = cfg.t_max_gamma + 5.0 * sig_max + 2.0;
        const GridSpec grid = grid_for(run, left, right);
        const TwoPhotonPulse pulse = build_gaussian_two_photon(pa, pb, grid);
        const TrapOutcome outcome =
            trap_efficiency(run.cfg.sys, pulse, topts);
        write_traj(outcome.traj, "trajectory.csv");
        record("p_ee_inf", outcome.p_ee_inf);
        record("t_steady_gamma", outcome.t_steady_gamma);
    }

    void run_release() {
        const RunConfig &cfg = run.cfg;
        if (!cfg.sigma_list_gamma.empty()) {
            const ReleaseReport report = optimize_release_pulse(
                cfg.sys, cfg.sigma_list_gamma, 0.03, cfg.dx_gamma);
            Trajectory tab;
            tab.columns = {"sigma_gamma", "residual_stored", "p_ee_residual"};
            for (const auto &o : report.outcomes)
                tab.rows.push_back(
                    {o.sigma_gamma, o.residual_stored, o.p_ee_residual});
            write_traj(tab, "release_report.csv");
            record("best_sigma_gamma", report.best_sigma_gamma);
            record("monotone", report.monotone ? 1.0 : 0.0);
            return;
        }
        const ReleaseRun rel =
            release_run(cfg.sys, cfg.pulse.sigma_gamma, cfg.dx_gamma);
        write_traj(rel.traj, "trajectory.csv");
        record("residual_stored", rel.residual_stored);
        record("p_ee_residual", rel.p_ee_residual);
    }

    void run_pipeline() {
        const RunConfig &cfg = run.cfg;
        const PipelineResult res = optimal_trap_pipeline(
            cfg.sys, cfg.sigma_release_gamma, cfg.dx_gamma,
            cfg.write_grids ? std::optional<std::string>(out) : std::nullopt);
        for (const auto &p : res.artifacts)
            add(p);
        record("release_residual", res.release_residual);
        record("final_p_ee", res.final_p_ee);
        record("t_steady_gamma", res.t_steady_gamma);
        record("bunching_reversed", res.bunching_reversed);
        record("bunching_gaussian", res.bunching_gaussian);
    }

    void run_sweep(bool k_axis) {
        const RunConfig &cfg = run.cfg;
        SystemParams base = cfg.sys;
        if (k_axis && cfg.j_from_condition)
            base.j_coupling = cfg.sys.j_coupling;
        SweepSpec spec = k_axis ? default_k_sigma_spec(base)
                                : default_vc_sigma_spec(base);
        spec.dx_gamma = cfg.dx_gamma;
        spec.t_max_gamma = cfg.t_max_gamma;
        const SweepResult result =
            k_axis ? sweep_k_sigma(spec) : sweep_vc_sigma(spec);
        const std::string p = path("sweep.csv");
        result.write_csv_file(p);
        add(p);
        const SweepPoint best = result.argmax();
        record("argmax_row", best.row_value);
        record("argmax_col", best.col_value);
        record("argmax_p_ee", best.p_ee);
        json overlays = json::array();
        for (const auto &o : result.overlays)
            overlays.push_back({{"label", o.label}, {"value", o.value}});
        summary["overlays"] = overlays;
    }

    void run_loss() {
        const RunConfig &cfg = run.cfg;
        const double t_final_gamma =
            std::isnan(cfg.t_final_gamma) ? 40.0 : cfg.t_final_gamma;
        const LossComparison cmp = loss_comparison(
            cfg.sys, cfg.gamma_prime_ratios, cfg.dx_gamma, t_final_gamma);
        json branches = json::array();
        for (const auto &b : cmp.branches) {
            char tag[32];
            std::snprintf(tag, sizeof tag, "%g", b.gamma_prime_ratio);
            write_traj(b.full, std::string("loss_full_r") + tag + ".csv");
            write_traj(b.reference, std::string("loss_ref_r") + tag + ".csv");
            branches.push_back({{"gamma_prime_ratio", b.gamma_prime_ratio},
                                {"fitted_decay_full", b.fitted_decay_full},
                                {"predicted_decay_full", b.predicted_decay_full},
                                {"fitted_decay_ref", b.fitted_decay_ref},
                                {"predicted_decay_ref", b.predicted_decay_ref},
                                {"peak_pop_full", b.peak_pop_full},
                                {"peak_pop_ref", b.peak_pop_ref},
                                {"peak_rate_full", b.peak_rate_full},
                                {"peak_rate_ref", b.peak_rate_ref}});
        }
        summary["branches"] = branches;
    }
};

} // namespace

RunArtifacts execute_run(const ResolvedRun &run, const std::string &out_dir,
                         bool dry_run) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    Executor ex{run, out_dir};

    const auto t_start = std::chrono::steady_clock::now();
    if (!dry_run) {
        try {
            const std::string &mode = run.cfg.mode;
            if (mode == "linear")
                ex.run_linear();
            else if (mode == "coherent")
                ex.run_coherent();
            else if (mode == "trap")
                ex.run_trap();
            else if (mode == "release")
                ex.run_release();
            else if (mode == "pipeline")
                ex.run_pipeline();
            else if (mode == "sweep-vc-sigma")
                ex.run_sweep(false);
            else if (mode == "sweep-k-sigma")
                ex.run_sweep(true);
            else if (mode == "loss-compare")
                ex.run_loss();
        } catch (...) {
            for (const auto &f : ex.artifacts.files)
                fs::remove(f);
            throw;
        }
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now()
                                      - t_start)
            .count();

    json manifest;
    manifest["status"] = dry_run ? "dry-run" : "ok";
    manifest["mode"] = run.cfg.mode;
    manifest["config_normalized"] = emit_config(run.cfg);
    json derived;
    derived["gamma_unit"] = run.gamma_unit;
    derived["omega_ee"] = run.omega_ee;
    if (run.cfg.kind == "three-mode") {
        derived["g_coupling"] = run.cfg.three.g_coupling;
        derived["eq5_residual"] = run.eq5_residual;
    } else {
        derived["j_coupling"] = run.cfg.sys.j_coupling;
        derived["ee_residual"] = run.ee_residual;
        derived["omega_bright"] = run.omega_bright;
        derived["bright_amplitude_decay"] = run.bright_amplitude_decay;
        derived["two_exc_eigen_re"] = run.two_exc_eigen_re;
        derived["two_exc_eigen_im"] = run.two_exc_eigen_im;
    }
    derived["heff_eigen_re"] = run.heff_eigen_re;
    derived["heff_eigen_im"] = run.heff_eigen_im;
    manifest["derived"] = derived;
    manifest["summary"] = ex.summary;
    manifest["wall_seconds"] = wall;
    json files = json::array();
    for (const auto &f : ex.artifacts.files) {
        char sum[24];
        std::snprintf(sum, sizeof sum, "%016llx",
                      static_cast<unsigned long long>(fnv1a64_file(f)));
        files.push_back({{"path", f}, {"fnv1a64", sum}});
    }
    manifest["artifacts"] = files;

    ex.artifacts.manifest_path = out_dir + "/manifest.json";
    std::ofstream os(ex.artifacts.manifest_path, std::ios::binary);
    if (!os)
        throw IoError("cannot write manifest");
    os << manifest.dump(2) << "\n";
    os.close();
    ex.artifacts.files.push_back(ex.artifacts.manifest_path);
    return ex.artifacts;
}

} // namespace eesim
