#include "pairlind/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace pairlind {

std::string to_string(SweepMode mode) {
    switch (mode) {
        case SweepMode::Analytic: return "analytic";
        case SweepMode::ReducedNumeric: return "reduced-numeric";
        case SweepMode::FullNumeric: return "full-numeric";
    }
    return "analytic";
}

SweepMode sweep_mode_from_string(const std::string& s) {
    if (s == "analytic") return SweepMode::Analytic;
    if (s == "reduced-numeric") return SweepMode::ReducedNumeric;
    if (s == "full-numeric") return SweepMode::FullNumeric;
    throw ConfigError("unknown mode '" + s +
                      "' (expected analytic, reduced-numeric or full-numeric)");
}

// ---------------------------------------------------------------------------
// config parsing

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& value, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                          "' is not a number: '" + value + "'");
    }
}

int parse_int(const std::string& value, int line, const std::string& key) {
    const double v = parse_number(value, line, key);
    if (v != std::floor(v)) {
        throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                          "' must be an integer");
    }
    return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& value, int line,
                               const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_number(item, line, key));
    }
    if (out.empty()) {
        throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                          "' is an empty list");
    }
    return out;
}

std::vector<double> parse_j(const std::string& value, int line) {
    if (value == "both") return {kBargmannEven, kBargmannOdd};
    const double j = parse_number(value, line, "j");
    if (j != kBargmannEven && j != kBargmannOdd) {
        throw ConfigError("line " + std::to_string(line) +
                          ": j must be 0.25, 0.75 or both");
    }
    return {j};
}

struct RawConfig {
    std::map<std::string, std::pair<std::string, int>> values; // key -> (value, line)
};

const char* const kKnownKeys[] = {
    "model.omega_c_hz", "model.delta_q_hz", "model.g_hz", "model.gamma0_hz",
    "model.kappa_hz", "model.n_bar", "model.chi_bar_hz", "model.omega_r_hz",
    "model.omega_hz",
    "sweep.delta_omega_min_hz", "sweep.delta_omega_max_hz", "sweep.points",
    "sweep.n_bar_list", "sweep.j", "sweep.mode", "sweep.full_cutoff",
    "tolerances.tail", "tolerances.solver_residual",
    "tolerances.much_less_factor", "tolerances.resonance_hz",
    "outputs.csv", "outputs.svg", "outputs.svg_y",
};

RawConfig read_raw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    RawConfig raw;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "sweep" &&
                section != "tolerances" && section != "outputs") {
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key = value");
        }
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(lineno) +
                              ": key outside any [section]");
        }
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find_if(std::begin(kKnownKeys), std::end(kKnownKeys),
                         [&](const char* k) { return key == k; }) ==
            std::end(kKnownKeys)) {
            throw ConfigError("line " + std::to_string(lineno) +
                              ": unknown field '" + key + "'");
        }
        raw.values[key] = {value, lineno};
    }
    return raw;
}

} // namespace

SweepConfig load_config(const std::string& path) {
    RawConfig raw = read_raw(path);

    auto get = [&](const std::string& key) -> const std::pair<std::string, int>* {
        const auto it = raw.values.find(key);
        return it == raw.values.end() ? nullptr : &it->second;
    };
    auto require_number = [&](const std::string& key) {
        const auto* v = get(key);
        if (!v) throw ConfigError("missing required field '" + key + "'");
        return parse_number(v->first, v->second, key);
    };
    auto number_or = [&](const std::string& key, double fallback) {
        const auto* v = get(key);
        return v ? parse_number(v->first, v->second, key) : fallback;
    };

    // required keys reported in a stable order
    for (const char* key : {"model.omega_c_hz", "model.delta_q_hz", "model.g_hz",
                            "model.gamma0_hz", "model.kappa_hz"}) {
        if (!get(key)) throw ConfigError(std::string("missing required field '") + key + "'");
    }

    SweepConfig cfg;
    Drive drive_hz;
    if (const auto* v = get("model.omega_r_hz")) {
        drive_hz.omega_r = parse_number(v->first, v->second, "model.omega_r_hz");
    }
    if (const auto* v = get("model.omega_hz")) {
        drive_hz.omega = parse_number(v->first, v->second, "model.omega_hz");
    }
    const double omega_c_hz = require_number("model.omega_c_hz");
    cfg.model = params_from_cyclic(
        omega_c_hz, require_number("model.delta_q_hz"),
        require_number("model.g_hz"), require_number("model.gamma0_hz"),
        require_number("model.kappa_hz"), number_or("model.n_bar", 0.0),
        number_or("model.chi_bar_hz", 0.0), drive_hz);

    cfg.grid.min_hz = number_or("sweep.delta_omega_min_hz", -2.0 * omega_c_hz);
    cfg.grid.max_hz = number_or("sweep.delta_omega_max_hz", 2.0 * omega_c_hz);
    if (const auto* v = get("sweep.points")) {
        cfg.grid.points = parse_int(v->first, v->second, "sweep.points");
    }
    if (const auto* v = get("sweep.n_bar_list")) {
        cfg.n_bar_list = parse_list(v->first, v->second, "sweep.n_bar_list");
    } else {
        cfg.n_bar_list = {cfg.model.n_bar};
    }
    if (const auto* v = get("sweep.j")) {
        cfg.j_list = parse_j(v->first, v->second);
    }
    if (const auto* v = get("sweep.mode")) {
        try {
            cfg.mode = sweep_mode_from_string(v->first);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(v->second) + ": " + e.what());
        }
    }
    if (const auto* v = get("sweep.full_cutoff")) {
        cfg.full_cutoff = parse_int(v->first, v->second, "sweep.full_cutoff");
    }

    cfg.tol.tail = number_or("tolerances.tail", 1e-12);
    cfg.tol.solver_residual = number_or("tolerances.solver_residual", 1e-10);
    cfg.tol.much_less_factor = number_or("tolerances.much_less_factor", 10.0);
    cfg.tol.resonance_hz = number_or("tolerances.resonance_hz", 0.1);

    if (const auto* v = get("outputs.csv")) cfg.outputs.csv_path = v->first;
    if (const auto* v = get("outputs.svg")) cfg.outputs.svg_path = v->first;
    if (const auto* v = get("outputs.svg_y")) cfg.outputs.svg_y = v->first;

    if (!(cfg.grid.min_hz < cfg.grid.max_hz)) {
        throw ConfigError("sweep grid: delta_omega_min_hz must be < delta_omega_max_hz");
    }
    if (cfg.grid.points < 2) throw ConfigError("sweep grid: points must be >= 2");
    for (double nb : cfg.n_bar_list) {
        if (nb < 0) throw ConfigError("sweep: n_bar_list entries must be >= 0");
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// sweep

namespace {

/// Resonance with <beta_z> frozen at the sector floor j; used for points
/// where the self-consistent iteration leaves the cooling regime.
double resonance_floor(const ModelParams& p, double j, double tol, int max_iter) {
    const double target = 2.0 * (p.omega_c + p.chi_bar * p.n_bar);
    if (p.drive.delta_omega == 0.0) return target;
    double omega_r = target;
    ModelParams q = p;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(p.drive.delta_omega) > omega_r) {
            throw InvalidArgument("resonance: |delta_omega| exceeds the resonant omega_r");
        }
        q.drive.omega_r = omega_r;
        q.drive.omega.reset();
        const DerivedRates r = derive_rates(q);
        const double next = target + 2.0 * r.g0 * j;
        const double step = std::abs(next - omega_r);
        omega_r = next;
        if (step < tol) return omega_r;
    }
    throw NoConvergence("resonance (sector-floor seed): no fixed point", omega_r, 0.0);
}

/// Applies the model policy: explicit omega_r/omega wins, otherwise the
/// self-consistent resonance with the floor-seed fallback.
ModelParams resolve_drive(const ModelParams& base, double delta_omega, double j,
                          double resonance_tol_hz) {
    ModelParams p = base;
    p.drive.delta_omega = delta_omega;
    if (p.drive.omega_r || p.drive.omega) return p;
    const double tol = angular(resonance_tol_hz);
    try {
        p.drive.omega_r = resonance_omega_r(p, j, tol).omega_r;
    } catch (const OutsideCoolingRegime&) {
        p.drive.omega_r = resonance_floor(p, j, tol, 100);
    }
    return p;
}

int suggest_m_cutoff(double eta, double tail_tol, int cap) {
    // geometric tail eta^-M below tail_tol, with margin for the top-4 window
    const double needed =
        std::log(1.0 / std::max(tail_tol, 1e-300)) / std::log(eta) + 8.0;
    return static_cast<int>(std::clamp(std::ceil(needed), 16.0, double(cap)));
}

struct PointStats {
    StateMoments m;
    bool ok = false;
};

PointStats evaluate_numeric(const SweepConfig& cfg, const ModelParams& p,
                            const DerivedRates& r, double j) {
    PointStats out;
    const AutoSteadyResult res = [&] {
        AutoSteadyOptions opts;
        opts.tail_tol = cfg.tol.tail;
        opts.max_cutoff = 512;
        if (cfg.mode == SweepMode::ReducedNumeric) {
            opts.start_cutoff = suggest_m_cutoff(r.eta, cfg.tol.tail, 512);
            return steady_state_auto(
                [&](int m_cutoff) {
                    return build_reduced_generator(r, p, j, m_cutoff, nullptr);
                },
                opts);
        }
        opts.start_cutoff = cfg.full_cutoff;
        const int parity = j == kBargmannEven ? 0 : 1;
        return steady_state_auto(
            [&](int cutoff) { return build_full_generator(p, r, cutoff); }, opts,
            [parity](const Generator& g) {
                return std::vector<MassConstraint>{
                    {parity_states(g.basis(), parity), 1.0},
                    {parity_states(g.basis(), 1 - parity), 0.0}};
            });
    }();
    const auto& sol = res.solution;
    if (!(sol.residual_norm <=
          cfg.tol.solver_residual * sol.generator_norm * sol.state_norm)) {
        std::ostringstream os;
        os << "steady-state residual " << sol.residual_norm
           << " exceeds the configured bound";
        throw NoConvergence(os.str(), sol.residual_norm,
                            sol.residual_norm / (sol.generator_norm * sol.state_norm));
    }
    out.m = moments(sol.rho, MomentOps::for_basis(sol.rho.basis()));
    out.ok = true;
    return out;
}

} // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& cfg,
                                std::vector<std::string>* diagnostics) {
    if (!(cfg.grid.min_hz < cfg.grid.max_hz) || cfg.grid.points < 2) {
        throw ConfigError("run_sweep: invalid grid");
    }
    for (double j : cfg.j_list) require_bargmann(j);

    std::vector<SweepRow> rows;
    rows.reserve(cfg.n_bar_list.size() * cfg.j_list.size() * cfg.grid.points);

    for (double n_bar : cfg.n_bar_list) {
        for (double j : cfg.j_list) {
            for (int k = 0; k < cfg.grid.points; ++k) {
                const double frac = double(k) / double(cfg.grid.points - 1);
                const double dw_hz =
                    cfg.grid.min_hz + frac * (cfg.grid.max_hz - cfg.grid.min_hz);
                SweepRow row;
                row.delta_omega_hz = dw_hz;
                row.n_bar = n_bar;
                row.j = j;
                row.mode = to_string(cfg.mode);
                try {
                    ModelParams base = cfg.model;
                    base.n_bar = n_bar;
                    const ModelParams p =
                        resolve_drive(base, angular(dw_hz), j, cfg.tol.resonance_hz);
                    const DerivedRates r = derive_rates(p);
                    row.eta = r.eta;
                    row.sz0 = r.sz0;
                    if (std::isfinite(r.n_sat)) row.n_sat = r.n_sat;
                    // good_cavity and cooling do not need the statistics, so a
                    // later solver failure still leaves them truthful
                    const ValidityFlags pre = validity_flags(
                        r, p, std::numeric_limits<double>::infinity(),
                        cfg.tol.much_less_factor);
                    row.good_cavity = pre.good_cavity;
                    row.cooling_regime = pre.cooling_regime;
                    row.below_saturation = false;

                    if (r.eta > 1.0) {
                        // eta <= 1 points keep empty statistics by contract
                        SteadyStats stats;
                        if (cfg.mode == SweepMode::Analytic) {
                            stats = analytic_moments(r.eta, j);
                            const auto [g2, g4] = analytic_g(r.eta, j);
                            stats.g2 = g2;
                            stats.g4 = g4;
                        } else {
                            stats = evaluate_numeric(cfg, p, r, j).m.as_stats();
                        }
                        row.n_mean = stats.n_mean;
                        row.g2 = stats.g2;
                        row.g4 = stats.g4;
                        row.below_saturation =
                            validity_flags(r, p, stats.n_mean,
                                           cfg.tol.much_less_factor)
                                .below_saturation;
                    }
                } catch (const std::exception& e) {
                    if (diagnostics) {
                        std::ostringstream os;
                        os << "point delta_omega_hz=" << dw_hz << " n_bar=" << n_bar
                           << " j=" << j << ": " << e.what();
                        diagnostics->push_back(os.str());
                    }
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

const char* const kCsvHeader =
    "delta_omega_hz,n_bar,j,eta,n_mean,n_sat,g2,g4,sz0,"
    "good_cavity,below_saturation,cooling_regime,mode";

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? format_number(*v) : std::string{};
}

std::optional<double> parse_optional(const std::string& field, int line) {
    if (field.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument("junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("csv line " + std::to_string(line) +
                          ": bad numeric field '" + field + "'");
    }
}

bool parse_bool(const std::string& field, int line) {
    if (field == "true") return true;
    if (field == "false") return false;
    throw ConfigError("csv line " + std::to_string(line) + ": bad boolean '" +
                      field + "'");
}

} // namespace

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write CSV file '" + path + "'");
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << format_number(r.delta_omega_hz) << ',' << format_number(r.n_bar)
            << ',' << format_number(r.j) << ',' << format_optional(r.eta) << ','
            << format_optional(r.n_mean) << ',' << format_optional(r.n_sat) << ','
            << format_optional(r.g2) << ',' << format_optional(r.g4) << ','
            << format_optional(r.sz0) << ',' << (r.good_cavity ? "true" : "false")
            << ',' << (r.below_saturation ? "true" : "false") << ','
            << (r.cooling_regime ? "true" : "false") << ',' << r.mode << '\n';
    }
    if (!out) throw ConfigError("write failed for CSV file '" + path + "'");
}

std::vector<SweepRow> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader) {
        throw ConfigError("csv: unexpected header in '" + path + "'");
    }
    std::vector<SweepRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(trim(field));
        if (line.back() == ',') fields.emplace_back();
        if (fields.size() != 13) {
            throw ConfigError("csv line " + std::to_string(lineno) +
                              ": expected 13 fields, got " +
                              std::to_string(fields.size()));
        }
        auto required = [&](const std::string& f) {
            const auto v = parse_optional(f, lineno);
            if (!v) {
                throw ConfigError("csv line " + std::to_string(lineno) +
                                  ": required field is empty");
            }
            return *v;
        };
        SweepRow r;
        r.delta_omega_hz = required(fields[0]);
        r.n_bar = required(fields[1]);
        r.j = required(fields[2]);
        r.eta = parse_optional(fields[3], lineno);
        r.n_mean = parse_optional(fields[4], lineno);
        r.n_sat = parse_optional(fields[5], lineno);
        r.g2 = parse_optional(fields[6], lineno);
        r.g4 = parse_optional(fields[7], lineno);
        r.sz0 = parse_optional(fields[8], lineno);
        r.good_cavity = parse_bool(fields[9], lineno);
        r.below_saturation = parse_bool(fields[10], lineno);
        r.cooling_regime = parse_bool(fields[11], lineno);
        r.mode = fields[12];
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::optional<double> row_column(const SweepRow& r, const std::string& column) {
    if (column == "eta") return r.eta;
    if (column == "n_mean") return r.n_mean;
    if (column == "n_sat") return r.n_sat;
    if (column == "g2") return r.g2;
    if (column == "g4") return r.g4;
    if (column == "sz0") return r.sz0;
    throw InvalidArgument("emit_svg: unknown column '" + column + "'");
}

std::string svg_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace

void emit_svg(const std::vector<SweepRow>& rows, const PlotSpec& spec,
              const std::string& path) {
    if (rows.empty()) throw InvalidArgument("emit_svg: no rows");

    // series keyed by (n_bar, j), in first-appearance order
    std::vector<std::pair<double, double>> keys;
    std::map<std::pair<double, double>, std::vector<std::pair<double, std::optional<double>>>>
        series;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& r : rows) {
        const auto key = std::make_pair(r.n_bar, r.j);
        if (!series.count(key)) keys.push_back(key);
        const auto y = row_column(r, spec.y_column);
        series[key].emplace_back(r.delta_omega_hz, y);
        xmin = std::min(xmin, r.delta_omega_hz);
        xmax = std::max(xmax, r.delta_omega_hz);
        if (y && std::isfinite(*y)) {
            ymin = std::min(ymin, *y);
            ymax = std::max(ymax, *y);
        }
    }
    if (!(ymin <= ymax)) {
        throw InvalidArgument("emit_svg: column '" + spec.y_column +
                              "' has no finite values");
    }
    if (xmin == xmax) xmax = xmin + 1.0;
    if (ymin == ymax) ymax = ymin + 1.0;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double width = 960, height = 600;
    const double left = 90, right = 780, top = 50, bottom = 540;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
    auto sy = [&](double y) { return bottom - (y - ymin) / (ymax - ymin) * (bottom - top); };

    static const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                           "#9467bd", "#ff7f0e", "#8c564b",
                                           "#17becf", "#e377c2"};

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write SVG file '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty()) {
        out << "<text x=\"" << (left + right) / 2 << "\" y=\"28\" font-size=\"18\""
            << " text-anchor=\"middle\">" << svg_escape(spec.title) << "</text>\n";
    }

    // axes with 5 ticks per side
    out << "<g stroke=\"black\" fill=\"none\">\n"
        << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
        << "\" y2=\"" << bottom << "\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
        << "\" y2=\"" << bottom << "\"/>\n</g>\n";
    out << "<g font-size=\"13\" fill=\"black\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        out << "<line x1=\"" << sx(fx) << "\" y1=\"" << bottom << "\" x2=\""
            << sx(fx) << "\" y2=\"" << bottom + 6 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << sx(fx) << "\" y=\"" << bottom + 22
            << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
        out << "<line x1=\"" << left - 6 << "\" y1=\"" << sy(fy) << "\" x2=\""
            << left << "\" y2=\"" << sy(fy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << left - 10 << "\" y=\"" << sy(fy) + 4
            << "\" text-anchor=\"end\">" << tick_label(fy) << "</text>\n";
    }
    out << "<text x=\"" << (left + right) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">delta_omega_hz</text>\n";
    out << "<text x=\"24\" y=\"" << (top + bottom) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 24 "
        << (top + bottom) / 2 << ")\">" << svg_escape(spec.y_column)
        << "</text>\n</g>\n";

    int color = 0;
    double legend_y = top + 10;
    for (const auto& key : keys) {
        const char* stroke = kPalette[color % (sizeof kPalette / sizeof *kPalette)];
        ++color;
        // gaps in the data split the polyline
        std::vector<std::string> segments;
        std::string current;
        for (const auto& [x, y] : series[key]) {
            if (y && std::isfinite(*y)) {
                current += std::to_string(sx(x)) + "," + std::to_string(sy(*y)) + " ";
            } else if (!current.empty()) {
                segments.push_back(std::move(current));
                current.clear();
            }
        }
        if (!current.empty()) segments.push_back(std::move(current));
        for (const auto& seg : segments) {
            out << "<polyline fill=\"none\" stroke=\"" << stroke
                << "\" stroke-width=\"1.5\" points=\"" << seg << "\"/>\n";
        }
        out << "<text x=\"" << right + 12 << "\" y=\"" << legend_y
            << "\" font-size=\"13\" fill=\"" << stroke << "\">n_bar="
            << tick_label(key.first) << ", j=" << tick_label(key.second)
            << "</text>\n";
        legend_y += 18;
    }
    out << "</svg>\n";
    if (!out) throw ConfigError("write failed for SVG file '" + path + "'");
}

// ---------------------------------------------------------------------------
// cross-validation

namespace {

SteadyStats stats_from_reduced_numeric(const CrossValidationInput& in, double eta) {
    DerivedRates r{};
    r.gamma_up = in.gamma_up;
    r.gamma_down = in.gamma_down;
    r.eta = eta;
    ModelParams p{};
    p.kappa = in.kappa;
    p.n_bar = in.n_bar;
    p.chi_bar = in.chi_bar;
    AutoSteadyOptions opts;
    opts.tail_tol = in.tail_tol;
    opts.start_cutoff = suggest_m_cutoff(eta, in.tail_tol, 512);
    const AutoSteadyResult res = steady_state_auto(
        [&](int m_cutoff) {
            return build_reduced_generator(r, p, in.j, m_cutoff, nullptr);
        },
        opts);
    return moments(res.solution.rho, MomentOps::for_basis(res.solution.rho.basis()))
        .as_stats();
}

} // namespace

double CrossValidationReport::deviation(const std::string& a,
                                        const std::string& b) const {
    const PathStats* pa = nullptr;
    const PathStats* pb = nullptr;
    for (const auto& p : paths) {
        if (p.label == a) pa = &p;
        if (p.label == b) pb = &p;
    }
    if (!pa || !pb) throw InvalidArgument("deviation: unknown path label");
    auto rel = [](double x, double y) {
        const double scale = std::max(std::abs(x), std::abs(y));
        return scale > 0 ? std::abs(x - y) / scale : 0.0;
    };
    double worst = rel(pa->stats.n_mean, pb->stats.n_mean);
    worst = std::max(worst, rel(pa->stats.beta_z_mean, pb->stats.beta_z_mean));
    worst = std::max(worst, rel(pa->stats.b2, pb->stats.b2));
    worst = std::max(worst, rel(pa->stats.b4, pb->stats.b4));
    if (pa->stats.g2 && pb->stats.g2) worst = std::max(worst, rel(*pa->stats.g2, *pb->stats.g2));
    if (pa->stats.g4 && pb->stats.g4) worst = std::max(worst, rel(*pa->stats.g4, *pb->stats.g4));
    return worst;
}

std::string CrossValidationReport::render() const {
    std::ostringstream os;
    os << "cross-validation at eta = " << format_number(eta) << ", j = " << j
       << "\n\n";
    os << "  path                     n_mean          b2              b4"
          "              g2              g4\n";
    auto cell = [](const std::optional<double>& v) {
        char buf[24];
        if (v) {
            std::snprintf(buf, sizeof buf, "%-15.8g", *v);
        } else {
            std::snprintf(buf, sizeof buf, "%-15s", "-");
        }
        return std::string(buf);
    };
    for (const auto& p : paths) {
        char label[28];
        std::snprintf(label, sizeof label, "%-24s", p.label.c_str());
        os << "  " << label << ' ' << cell(p.stats.n_mean) << ' '
           << cell(p.stats.b2) << ' ' << cell(p.stats.b4) << ' '
           << cell(p.stats.g2) << ' ' << cell(p.stats.g4) << '\n';
    }
    os << "\n  pairwise max relative deviation:\n";
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (std::size_t k = i + 1; k < paths.size(); ++k) {
            os << "    " << paths[i].label << " vs " << paths[k].label << ": "
               << format_number(deviation(paths[i].label, paths[k].label)) << '\n';
        }
    }
    return os.str();
}

CrossValidationReport cross_validate(const CrossValidationInput& in) {
    require_bargmann(in.j);
    const double pump = in.kappa * in.n_bar + in.gamma_up;
    const double decay = in.kappa * (1.0 + in.n_bar) + in.gamma_down;
    if (!(pump > 0)) {
        throw InvalidArgument("cross_validate: pump rate kappa*n_bar + Gamma_+ is zero");
    }
    const double eta = decay / pump;

    CrossValidationReport report;
    report.eta = eta;
    report.j = in.j;

    SteadyStats analytic = analytic_moments(eta, in.j); // throws outside cooling
    const auto [g2, g4] = analytic_g(eta, in.j);
    analytic.g2 = g2;
    analytic.g4 = g4;
    report.paths.push_back({"analytic", analytic});

    const int m_oracle = std::max(
        64, static_cast<int>(std::ceil(std::log(1e16) / std::log(eta))) + 2);
    report.paths.push_back({"oracle", oracle_moments(eta, in.j, m_oracle)});

    report.paths.push_back({"reduced-numeric", stats_from_reduced_numeric(in, eta)});
    return report;
}

CrossValidationReport cross_validate_point(const SweepConfig& cfg,
                                           double delta_omega_hz, double n_bar,
                                           double j, bool include_full,
                                           std::vector<std::string>* diagnostics) {
    require_bargmann(j);
    ModelParams base = cfg.model;
    base.n_bar = n_bar;
    const ModelParams p =
        resolve_drive(base, angular(delta_omega_hz), j, cfg.tol.resonance_hz);
    const DerivedRates r = derive_rates(p);

    CrossValidationInput in;
    in.kappa = p.kappa;
    in.n_bar = p.n_bar;
    in.gamma_up = r.gamma_up;
    in.gamma_down = r.gamma_down;
    in.chi_bar = p.chi_bar;
    in.j = j;
    in.tail_tol = cfg.tol.tail;
    CrossValidationReport report = cross_validate(in);

    if (include_full) {
        const int parity = j == kBargmannEven ? 0 : 1;
        AutoSteadyOptions opts;
        opts.tail_tol = cfg.tol.tail;
        opts.start_cutoff = cfg.full_cutoff;
        opts.max_cutoff = 512;
        const AutoSteadyResult res = steady_state_auto(
            [&](int cutoff) { return build_full_generator(p, r, cutoff); }, opts,
            [parity](const Generator& g) {
                return std::vector<MassConstraint>{
                    {parity_states(g.basis(), parity), 1.0},
                    {parity_states(g.basis(), 1 - parity), 0.0}};
            });
        report.paths.push_back(
            {"full-numeric",
             moments(res.solution.rho, MomentOps::for_basis(res.solution.rho.basis()))
                 .as_stats()});
        if (diagnostics) {
            std::ostringstream os;
            os << "full-numeric cutoff " << res.cutoff << ", tail mass "
               << res.tail_mass;
            diagnostics->push_back(os.str());
        }
    }
    return report;
}

} // namespace pairlind
