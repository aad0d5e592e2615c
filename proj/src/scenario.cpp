#include "flexlink/scenario.hpp"
#include "flexlink/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

namespace flexlink {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_vec(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt(v[i]);
    }
    return out;
}

struct Line {
    int number;
    std::string section;
    std::string key;
    std::string value;
};

[[noreturn]] void parse_fail(const std::string& name, int line, const std::string& what) {
    std::ostringstream msg;
    msg << name << ":" << line << ": " << what;
    throw ConfigError(msg.str());
}

double to_double(const Line& ln, const std::string& name) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(ln.value, &pos);
    } catch (const std::exception&) {
        parse_fail(name, ln.number, "expected a number for '" + ln.key + "'");
    }
    if (trim(ln.value.substr(pos)) != "")
        parse_fail(name, ln.number, "trailing text after number for '" + ln.key + "'");
    return v;
}

int to_int(const Line& ln, const std::string& name) {
    const double v = to_double(ln, name);
    if (v != std::floor(v)) parse_fail(name, ln.number, "'" + ln.key + "' must be an integer");
    return static_cast<int>(v);
}

bool to_bool(const Line& ln, const std::string& name) {
    const std::string v = trim(ln.value);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    parse_fail(name, ln.number, "'" + ln.key + "' must be true or false");
}

std::vector<double> to_vector(const Line& ln, const std::string& name) {
    std::istringstream in(ln.value);
    std::vector<double> out;
    double v;
    while (in >> v) out.push_back(v);
    std::string rest;
    if (in.fail() && !in.eof() && (in.clear(), in >> rest))
        parse_fail(name, ln.number, "expected numbers for '" + ln.key + "'");
    if (out.empty()) parse_fail(name, ln.number, "'" + ln.key + "' needs at least one number");
    return out;
}

Vec2 to_vec2(const Line& ln, const std::string& name) {
    const auto v = to_vector(ln, name);
    if (v.size() != 2) parse_fail(name, ln.number, "'" + ln.key + "' needs exactly two numbers");
    return {v[0], v[1]};
}

void resolve_auto_contact(SimConfig& cfg) {
    if (!cfg.environment) return;
    Environment& env = *cfg.environment;
    // Place the plane so the tracking target presses the desired force into it:
    // P0 = target + Ke^-1 fd_vec shifted back along the inward normal.
    const Vec2 fd_vec = cfg.desired_force * (-env.normal);
    const Vec2 depth = env.stiffness.fullPivLu().solve(fd_vec);
    env.contact_point = cfg.target - depth;
}

void build_echo(ScenarioFile& sc) {
    auto& e = sc.echo;
    e.clear();
    const SimConfig& c = sc.base;
    auto add = [&](const std::string& k, const std::string& v) { e.emplace_back(k, v); };
    add("beam.length", fmt(c.beam.length));
    add("beam.area", fmt(c.beam.area));
    add("beam.density", fmt(c.beam.density));
    add("beam.ei", fmt(c.beam.flexural_rigidity));
    add("beam.joint_inertia", fmt(c.beam.joint_inertia));
    add("beam.gravity", fmt(c.beam.gravity));
    add("beam.modes", std::to_string(c.beam.mode_count));
    add("environment.present", sc.has_environment ? "true" : "false");
    if (sc.has_environment) {
        const Environment& env = *c.environment;
        const Eigen::Matrix2d& ke = env.stiffness;
        const bool scalar = std::abs(ke(0, 1)) < 1e-300 && std::abs(ke(1, 0)) < 1e-300 &&
                            ke(0, 0) == ke(1, 1);
        if (scalar)
            add("environment.ke", fmt(ke(0, 0)));
        else
            add("environment.ke_matrix", fmt(ke(0, 0)) + " " + fmt(ke(0, 1)) + " " +
                                             fmt(ke(1, 0)) + " " + fmt(ke(1, 1)));
        add("environment.normal", fmt(env.normal.x()) + " " + fmt(env.normal.y()));
        add("environment.contact_point",
            fmt(env.contact_point.x()) + " " + fmt(env.contact_point.y()));
        add("environment.contact_mode", sc.contact_auto ? "auto" : "explicit");
        add("environment.unilateral", env.unilateral ? "true" : "false");
    }
    add("gains.kp", fmt_vec({c.kp_diag.data(), c.kp_diag.data() + c.kp_diag.size()}));
    add("gains.kv", fmt_vec({c.kv_diag.data(), c.kv_diag.data() + c.kv_diag.size()}));
    add("force.fd", fmt(c.desired_force));
    add("force.kf", fmt(c.force_gain));
    add("simulation.step", fmt(c.step));
    add("simulation.duration", fmt(c.duration));
    add("simulation.rise_time", fmt(c.rise_time));
    add("simulation.theta0", fmt(c.theta0));
    add("simulation.target", fmt(c.target.x()) + " " + fmt(c.target.y()));
    add("simulation.decimation", std::to_string(c.log_decimation));
    add("simulation.quad_panels", std::to_string(c.basis.quad_panels));
    if (!sc.sweep_ke.empty()) add("sweep.ke", fmt_vec(sc.sweep_ke));
    if (!sc.sweep_fd.empty()) add("sweep.fd", fmt_vec(sc.sweep_fd));
    if (!sc.sweep_lengths.empty()) add("sweep.lengths", fmt_vec(sc.sweep_lengths));
    if (!sc.sweep_diameters.empty()) add("sweep.diameters", fmt_vec(sc.sweep_diameters));
    if (sc.young_modulus > 0.0) add("sweep.young_modulus", fmt(sc.young_modulus));
}

} // namespace

ScenarioFile parse_scenario_text(const std::string& text, const std::string& name) {
    ScenarioFile sc;
    SimConfig& c = sc.base;

    // Paper-style defaults: two modes, unit beam, no environment.
    c.beam = BeamParams{};
    c.kp_diag = Eigen::VectorXd::Zero(0);
    c.kv_diag = Eigen::VectorXd::Zero(0);

    bool env_section = false;
    double env_ke = 0.0;
    bool env_ke_set = false;
    Eigen::Matrix2d env_ke_matrix = Eigen::Matrix2d::Zero();
    bool env_ke_matrix_set = false;
    Vec2 env_normal(-std::numbers::sqrt2 / 2.0, -std::numbers::sqrt2 / 2.0);
    bool env_unilateral = true;
    Vec2 env_point = Vec2::Zero();
    bool env_point_auto = true;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(name, line_no, "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"beam", "environment", "gains",
                                          "force", "simulation", "sweep"};
            if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
                    return section == k;
                }) == std::end(known))
                parse_fail(name, line_no, "unknown section [" + section + "]");
            if (section == "environment") env_section = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(name, line_no, "expected key = value");
        Line ln{line_no, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
        if (ln.key.empty()) parse_fail(name, line_no, "empty key");
        if (section.empty()) parse_fail(name, line_no, "key outside any [section]");

        if (section == "beam") {
            if (ln.key == "length") c.beam.length = to_double(ln, name);
            else if (ln.key == "area") c.beam.area = to_double(ln, name);
            else if (ln.key == "density") c.beam.density = to_double(ln, name);
            else if (ln.key == "ei") { c.beam.flexural_rigidity = to_double(ln, name); sc.ei_explicit = true; }
            else if (ln.key == "joint_inertia") c.beam.joint_inertia = to_double(ln, name);
            else if (ln.key == "gravity") c.beam.gravity = to_double(ln, name);
            else if (ln.key == "modes") c.beam.mode_count = to_int(ln, name);
            else parse_fail(name, line_no, "unknown key '" + ln.key + "' in section [beam]");
        } else if (section == "environment") {
            if (ln.key == "ke") { env_ke = to_double(ln, name); env_ke_set = true; }
            else if (ln.key == "ke_matrix") {
                const auto v = to_vector(ln, name);
                if (v.size() != 4) parse_fail(name, line_no, "ke_matrix needs four numbers");
                env_ke_matrix << v[0], v[1], v[2], v[3];
                env_ke_matrix_set = true;
            }
            else if (ln.key == "normal") env_normal = to_vec2(ln, name);
            else if (ln.key == "contact_point") {
                if (trim(ln.value) == "auto") env_point_auto = true;
                else { env_point = to_vec2(ln, name); env_point_auto = false; }
            }
            else if (ln.key == "unilateral") env_unilateral = to_bool(ln, name);
            else parse_fail(name, line_no, "unknown key '" + ln.key + "' in section [environment]");
        } else if (section == "gains") {
            if (ln.key == "kp") {
                const auto v = to_vector(ln, name);
                c.kp_diag = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
            } else if (ln.key == "kv") {
                const auto v = to_vector(ln, name);
                c.kv_diag = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
            } else parse_fail(name, line_no, "unknown key '" + ln.key + "' in section [gains]");
        } else if (section == "force") {
            if (ln.key == "fd") c.desired_force = to_double(ln, name);
            else if (ln.key == "kf") c.force_gain = to_double(ln, name);
            else parse_fail(name, line_no, "unknown key '" + ln.key + "' in section [force]");
        } else if (section == "simulation") {
            if (ln.key == "step") c.step = to_double(ln, name);
            else if (ln.key == "duration") c.duration = to_double(ln, name);
            else if (ln.key == "rise_time") c.rise_time = to_double(ln, name);
            else if (ln.key == "theta0") c.theta0 = to_double(ln, name);
            else if (ln.key == "target") c.target = to_vec2(ln, name);
            else if (ln.key == "decimation") c.log_decimation = to_int(ln, name);
            else if (ln.key == "quad_panels") c.basis.quad_panels = to_int(ln, name);
            else parse_fail(name, line_no, "unknown key '" + ln.key + "' in section [simulation]");
        } else if (section == "sweep") {
            if (ln.key == "ke") sc.sweep_ke = to_vector(ln, name);
            else if (ln.key == "fd") sc.sweep_fd = to_vector(ln, name);
            else if (ln.key == "lengths") sc.sweep_lengths = to_vector(ln, name);
            else if (ln.key == "diameters") sc.sweep_diameters = to_vector(ln, name);
            else if (ln.key == "young_modulus") sc.young_modulus = to_double(ln, name);
            else parse_fail(name, line_no, "unknown key '" + ln.key + "' in section [sweep]");
        }
    }

    // Environment override from the process environment (CLI surface).
    if (const char* panels = std::getenv("FLEXLINK_QUAD_PANELS")) {
        try {
            c.basis.quad_panels = std::stoi(panels);
        } catch (const std::exception&) {
            throw ConfigError("FLEXLINK_QUAD_PANELS must be an integer");
        }
    }

    // Default gains when the file names none: unit PD on every coordinate.
    const int n = c.beam.mode_count + 1;
    if (c.kp_diag.size() == 0) c.kp_diag = Eigen::VectorXd::Ones(n);
    if (c.kv_diag.size() == 0) c.kv_diag = Eigen::VectorXd::Ones(n);
    if (c.kp_diag.size() != n || c.kv_diag.size() != n)
        throw ConfigError(name + ": gains must list modes+1 = " + std::to_string(n) + " entries");
    for (int i = 0; i < n; ++i) {
        if (!(c.kp_diag[i] > 0.0))
            throw ConfigError(name + ": Kp must be positive definite");
        if (!(c.kv_diag[i] > 0.0))
            throw ConfigError(name + ": Kv must be positive definite");
    }

    sc.has_environment = env_section;
    sc.contact_auto = env_point_auto;
    if (env_section) {
        Environment env;
        if (env_ke_matrix_set && env_ke_set)
            throw ConfigError(name + ": give either ke or ke_matrix, not both");
        if (env_ke_matrix_set) env.stiffness = env_ke_matrix;
        else if (env_ke_set) env.stiffness = env_ke * Eigen::Matrix2d::Identity();
        else throw ConfigError(name + ": [environment] requires ke or ke_matrix");
        env.normal = env_normal;
        env.unilateral = env_unilateral;
        env.contact_point = env_point;
        env.validate();
        c.environment = env;
        if (env_point_auto) resolve_auto_contact(c);
    }

    c.beam.validate();
    build_echo(sc);
    return sc;
}

ScenarioFile parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

std::vector<SimConfig> expand_sweep(const ScenarioFile& sc) {
    auto axis = [](const std::vector<double>& v) {
        return v.empty() ? std::vector<double>{std::nan("")} : v;
    };
    const auto kes = axis(sc.sweep_ke);
    const auto fds = axis(sc.sweep_fd);
    const auto lengths = axis(sc.sweep_lengths);
    const auto diameters = axis(sc.sweep_diameters);

    std::vector<SimConfig> out;
    for (double ke : kes)
        for (double fd : fds)
            for (double len : lengths)
                for (double dia : diameters) {
                    SimConfig cfg = sc.base;
                    if (!std::isnan(ke)) {
                        if (!cfg.environment)
                            throw ConfigError("sweep over ke requires an [environment] section");
                        cfg.environment->stiffness = ke * Eigen::Matrix2d::Identity();
                    }
                    if (!std::isnan(fd)) cfg.desired_force = fd;
                    if (!std::isnan(len)) cfg.beam.length = len;
                    if (!std::isnan(dia)) {
                        cfg.beam.area = std::numbers::pi * dia * dia / 4.0;
                        if (!sc.ei_explicit) {
                            if (!(sc.young_modulus > 0.0))
                                throw ConfigError(
                                    "sweep over diameters needs beam.ei or sweep.young_modulus");
                            cfg.beam.flexural_rigidity =
                                sc.young_modulus * std::numbers::pi * std::pow(dia, 4) / 64.0;
                        }
                    }
                    if (sc.contact_auto) resolve_auto_contact(cfg);
                    out.push_back(std::move(cfg));
                }
    return out;
}

std::string scenario_text_from_echo(
    const std::vector<std::pair<std::string, std::string>>& echo) {
    std::map<std::string, std::string> kv(echo.begin(), echo.end());
    auto get = [&](const std::string& k) -> std::string {
        auto it = kv.find(k);
        return it == kv.end() ? "" : it->second;
    };
    std::ostringstream out;
    out << "[beam]\n";
    for (const char* k : {"length", "area", "density", "ei", "joint_inertia", "gravity", "modes"})
        out << k << " = " << get(std::string("beam.") + k) << "\n";
    if (get("environment.present") == "true") {
        out << "[environment]\n";
        if (!get("environment.ke").empty()) out << "ke = " << get("environment.ke") << "\n";
        else out << "ke_matrix = " << get("environment.ke_matrix") << "\n";
        out << "normal = " << get("environment.normal") << "\n";
        out << "contact_point = " << get("environment.contact_point") << "\n";
        out << "unilateral = " << get("environment.unilateral") << "\n";
    }
    out << "[gains]\nkp = " << get("gains.kp") << "\nkv = " << get("gains.kv") << "\n";
    out << "[force]\nfd = " << get("force.fd") << "\nkf = " << get("force.kf") << "\n";
    out << "[simulation]\n";
    for (const char* k :
         {"step", "duration", "rise_time", "theta0", "target", "decimation", "quad_panels"})
        out << k << " = " << get(std::string("simulation.") + k) << "\n";
    return out.str();
}

namespace {

std::string log_header(int nu) {
    std::string h = "t,theta,theta_dot";
    for (int j = 1; j <= nu; ++j) {
        h += ",q1" + std::to_string(j);
        h += ",q1" + std::to_string(j) + "_dot";
    }
    h += ",px,py,fcx,fcy,fnorm,u_theta";
    for (int j = 1; j <= nu; ++j) h += ",u_q1" + std::to_string(j);
    h += ",V,Vdot,w_tip,K,Vpot";
    return h;
}

} // namespace

void write_log_csv(const std::string& path, const SimConfig& config, const SimLog& log) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    const int nu = config.beam.mode_count;
    out << log_header(nu) << "\n";
    for (int i = 0; i < log.samples(); ++i) {
        out << fmt(log.t[i]) << ',' << fmt(log.theta[i]) << ',' << fmt(log.theta_dot[i]);
        for (int j = 0; j < nu; ++j)
            out << ',' << fmt(log.q(i, j)) << ',' << fmt(log.q_dot(i, j));
        out << ',' << fmt(log.px[i]) << ',' << fmt(log.py[i]) << ',' << fmt(log.fcx[i]) << ','
            << fmt(log.fcy[i]) << ',' << fmt(log.fnorm[i]);
        for (int j = 0; j <= nu; ++j) out << ',' << fmt(log.u(i, j));
        out << ',' << fmt(log.lyapunov[i]) << ',' << fmt(log.lyapunov_rate[i]) << ','
            << fmt(log.w_tip[i]) << ',' << fmt(log.kinetic[i]) << ',' << fmt(log.potential[i])
            << "\n";
    }
}

void write_summary_csv(const std::string& path, const ScenarioFile& scenario,
                       const SimSummary& s) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "key,value\n";
    for (const auto& [k, v] : scenario.echo) out << "config." << k << "," << v << "\n";
    auto put = [&](const char* k, const std::string& v) { out << "summary." << k << "," << v << "\n"; };
    put("contact_made", s.contact_made ? "true" : "false");
    put("contact_time", fmt(s.contact_time));
    put("window_start", fmt(s.window_start));
    put("force_norm_mean", fmt(s.force_norm_mean));
    put("force_norm_min", fmt(s.force_norm_min));
    put("force_norm_max", fmt(s.force_norm_max));
    put("force_error_limsup", fmt(s.force_error_limsup));
    put("penetration_mean", fmt(s.penetration_mean));
    put("max_deflection_window", fmt(s.max_deflection_window));
    put("settling_time_force", fmt(s.settling_time_force));
    put("tracking_error_final", fmt(s.tracking_error_final));
    put("tip_error_final", fmt(s.tip_error_final));
    put("final_theta", fmt(s.final_theta));
    put("final_tip_x", fmt(s.final_tip.x()));
    put("final_tip_y", fmt(s.final_tip.y()));
    put("lyapunov_initial", fmt(s.lyapunov_initial));
    put("lyapunov_violations_phase1", std::to_string(s.lyapunov_violations_phase1));
    put("velocity_error_sup", fmt(s.velocity_error_sup));
    put("force_error_bound", fmt(s.force_error_bound));
    put("reference_clamps", std::to_string(s.reference_clamps));
    put("energy_kinetic_final", fmt(s.energy_kinetic_final));
    put("energy_potential_final", fmt(s.energy_potential_final));
    for (size_t j = 0; j < s.natural_frequencies.size(); ++j)
        put(("omega" + std::to_string(j + 1)).c_str(), fmt(s.natural_frequencies[j]));
    put("wall_seconds", fmt(s.wall_seconds));
}

void write_constants_csv(const std::string& path, const ModalBasis& basis) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "mode_index,beta_l,a0,a1,a2,a3\n";
    const ModalConstants& k = basis.constants();
    for (int j = 0; j < basis.mode_count(); ++j) {
        out << basis.mode(j).index << ',' << fmt(basis.mode(j).root) << ',' << fmt(k.a0[j]) << ','
            << fmt(k.a1[j]) << ',' << fmt(k.a2[j]) << ',' << fmt(k.a3[j]) << "\n";
    }
}

void write_sweep_summary_csv(const std::string& path, const std::vector<SimConfig>& configs,
                             const std::vector<SweepOutcome>& outcomes) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "row,ke,fd,length,area,ei,omega1,contact_made,force_norm_mean,penetration_mean,"
           "force_error_limsup,settling_time_force,max_deflection_window,error\n";
    for (size_t i = 0; i < configs.size(); ++i) {
        const SimConfig& c = configs[i];
        const double ke = c.environment ? c.environment->stiffness(0, 0) : 0.0;
        out << i << ',' << fmt(ke) << ',' << fmt(c.desired_force) << ',' << fmt(c.beam.length)
            << ',' << fmt(c.beam.area) << ',' << fmt(c.beam.flexural_rigidity) << ',';
        if (outcomes[i].result) {
            const SimSummary& s = outcomes[i].result->summary;
            out << fmt(s.natural_frequencies.empty() ? 0.0 : s.natural_frequencies[0]) << ','
                << (s.contact_made ? "true" : "false") << ',' << fmt(s.force_norm_mean) << ','
                << fmt(s.penetration_mean) << ',' << fmt(s.force_error_limsup) << ','
                << fmt(s.settling_time_force) << ',' << fmt(s.max_deflection_window) << ",";
        } else {
            out << ",,,,,,,";
        }
        out << outcomes[i].error << "\n";
    }
}

namespace {

struct LogTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int col(const std::string& name) const {
        for (size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        throw ConfigError("log.csv is missing column '" + name + "'");
    }
};

LogTable read_log_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing file: " + path);
    LogTable t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty log file: " + path);
    std::istringstream hdr(line);
    std::string cell;
    while (std::getline(hdr, cell, ',')) t.columns.push_back(trim(cell));
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::istringstream row(line);
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != t.columns.size())
            throw ConfigError("malformed row in " + path);
        t.rows.push_back(std::move(vals));
    }
    if (t.rows.empty()) throw ConfigError("log file has no samples: " + path);
    return t;
}

std::map<std::string, std::string> read_summary_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("malformed row in " + path);
        kv[trim(line.substr(0, comma))] = trim(line.substr(comma + 1));
    }
    return kv;
}

} // namespace

VerifyReport verify_outputs(const std::string& out_dir) {
    namespace fs = std::filesystem;
    const std::string log_path = (fs::path(out_dir) / "log.csv").string();
    const std::string summary_path = (fs::path(out_dir) / "summary.csv").string();
    const LogTable log = read_log_csv(log_path);
    const auto meta = read_summary_csv(summary_path);

    auto meta_num = [&](const std::string& k, double fallback,
                        bool* found = nullptr) -> double {
        auto it = meta.find(k);
        if (found) *found = it != meta.end();
        return it == meta.end() ? fallback : std::stod(it->second);
    };

    VerifyReport report;
    const int ct = log.col("t");
    const int cf = log.col("fnorm");
    const int cv = log.col("V");
    const int cw = log.col("w_tip");
    const int cpx = log.col("px");
    const int cpy = log.col("py");
    const size_t n = log.rows.size();

    // Phase 1 = samples before the first nonzero contact force.
    size_t first_contact = n;
    for (size_t i = 0; i < n; ++i)
        if (log.rows[i][cf] > 0.0) {
            first_contact = i;
            break;
        }

    {
        VerifyCheck c{"lyapunov_monotone", true, ""};
        const double v0 = log.rows[0][cv];
        const double tol = 1e-6 * v0;
        int violations = 0;
        bool nonneg = true;
        for (size_t i = 0; i < first_contact; ++i) {
            if (log.rows[i][cv] < -1e-12) nonneg = false;
            if (i > 0 && log.rows[i][cv] > log.rows[i - 1][cv] + tol) ++violations;
        }
        std::ostringstream d;
        d << "V(0)=" << v0 << ", phase-1 samples=" << first_contact
          << ", violations=" << violations << (nonneg ? "" : ", negative V seen");
        c.detail = d.str();
        c.passed = nonneg && violations == 0;
        report.checks.push_back(c);
    }

    const double duration = log.rows.back()[ct];
    const double window_start = meta_num("summary.window_start", 0.9 * duration);
    const double fd = meta_num("config.force.fd", 0.0);
    bool have_ke = false;
    const double ke = meta_num("config.environment.ke", 0.0, &have_ke);
    const bool env_present = meta.count("config.environment.present") &&
                             meta.at("config.environment.present") == "true";

    {
        VerifyCheck c{"force_steady", true, ""};
        if (!env_present) {
            c.detail = "no environment configured; nothing to check";
        } else {
            double worst = 0.0;
            for (size_t i = 0; i < n; ++i)
                if (log.rows[i][ct] >= window_start)
                    worst = std::max(worst, std::abs(log.rows[i][cf] - fd));
            const double limit = fd > 0.0 ? 0.02 * fd : 0.02;
            std::ostringstream d;
            d << "max | ||fc|| - fd | = " << worst << " over t >= " << window_start
              << " (limit " << limit << ")";
            c.detail = d.str();
            c.passed = worst <= limit;
        }
        report.checks.push_back(c);
    }

    {
        VerifyCheck c{"penetration_law", true, ""};
        if (!env_present || !have_ke || fd <= 0.0) {
            c.detail = "needs a scalar-stiffness environment with fd > 0; skipped";
        } else {
            auto it_n = meta.find("config.environment.normal");
            auto it_p = meta.find("config.environment.contact_point");
            if (it_n == meta.end() || it_p == meta.end())
                throw ConfigError("summary.csv is missing environment metadata");
            std::istringstream ns(it_n->second), ps(it_p->second);
            Vec2 normal, p0;
            ns >> normal.x() >> normal.y();
            ps >> p0.x() >> p0.y();
            double pen_sum = 0.0;
            long count = 0;
            for (size_t i = 0; i < n; ++i) {
                if (log.rows[i][ct] < window_start) continue;
                const Vec2 tip(log.rows[i][cpx], log.rows[i][cpy]);
                pen_sum += std::max(0.0, -(tip - p0).dot(normal));
                ++count;
            }
            const double pen = count ? pen_sum / count : 0.0;
            const double expected = fd / ke;
            std::ostringstream d;
            d << "mean penetration " << pen << " vs fd/Ke = " << expected;
            c.detail = d.str();
            c.passed = std::abs(pen - expected) <= 0.02 * expected;
        }
        report.checks.push_back(c);
    }

    {
        VerifyCheck c{"tip_deflection", true, ""};
        double worst = 0.0;
        for (size_t i = 0; i < n; ++i)
            if (log.rows[i][ct] >= window_start)
                worst = std::max(worst, std::abs(log.rows[i][cw]));
        std::ostringstream d;
        d << "max |w(l)| = " << worst << " over t >= " << window_start << " (limit 1e-4)";
        c.detail = d.str();
        c.passed = worst < 1e-4;
        report.checks.push_back(c);
    }

    return report;
}

int run_command(const std::string& config_path, const std::string& out_dir, bool sweep_all,
                bool seed_constants_only) {
    namespace fs = std::filesystem;
    try {
        const ScenarioFile sc = parse_scenario_file(config_path);
        fs::create_directories(out_dir);

        const ModalBasis basis(sc.base.beam, sc.base.basis);
        write_constants_csv((fs::path(out_dir) / "constants.csv").string(), basis);
        if (seed_constants_only) return 0;

        if (sweep_all) {
            const std::vector<SimConfig> configs = expand_sweep(sc);
            const std::vector<SweepOutcome> outcomes = sweep(configs);
            write_sweep_summary_csv((fs::path(out_dir) / "sweep_summary.csv").string(), configs,
                                    outcomes);
            char name[32];
            for (size_t i = 0; i < outcomes.size(); ++i) {
                if (!outcomes[i].result) continue;
                std::snprintf(name, sizeof name, "row_%03zu", i);
                const fs::path row_dir = fs::path(out_dir) / name;
                fs::create_directories(row_dir);
                ScenarioFile row_sc = sc;
                row_sc.base = configs[i];
                row_sc.sweep_ke.clear();
                row_sc.sweep_fd.clear();
                row_sc.sweep_lengths.clear();
                row_sc.sweep_diameters.clear();
                build_echo(row_sc);
                write_log_csv((row_dir / "log.csv").string(), configs[i],
                              outcomes[i].result->log);
                write_summary_csv((row_dir / "summary.csv").string(), row_sc,
                                  outcomes[i].result->summary);
            }
            for (const auto& o : outcomes)
                if (!o.error.empty()) std::cerr << "sweep row failed: " << o.error << "\n";
            return 0;
        }

        const SimResult result = run_scenario(sc.base);
        write_log_csv((fs::path(out_dir) / "log.csv").string(), sc.base, result.log);
        write_summary_csv((fs::path(out_dir) / "summary.csv").string(), sc, result.summary);
        return 0;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

int verify_command(const std::string& out_dir) {
    try {
        const VerifyReport report = verify_outputs(out_dir);
        for (const auto& c : report.checks)
            std::cout << (c.passed ? "PASS" : "FAIL") << " " << c.name << ": " << c.detail
                      << "\n";
        return report.all_passed() ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace flexlink
