#include "csmpd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "csmpd/calibration.hpp"
#include "csmpd/constants.hpp"
#include "csmpd/csv.hpp"
#include "csmpd/dynamics.hpp"
#include "csmpd/errors.hpp"
#include "csmpd/fixtures.hpp"
#include "csmpd/metrics.hpp"
#include "csmpd/montecarlo.hpp"
#include "csmpd/scattering.hpp"

namespace csmpd {

namespace {

using json = nlohmann::ordered_json;

struct CommonOpts {
    std::string config_path;
    std::string fixture = "reference";
    std::string out;
    std::string format;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, const std::string& default_format,
                const std::vector<std::string>& formats) {
    opts.format = default_format;
    cmd->add_option("--config", opts.config_path,
                    "device config file (sections per mode/qubit/pump, plus "
                    "cycle, environment, noise; frequencies in Hz)");
    cmd->add_option("--fixture", opts.fixture,
                    "bundled parameter set when --config is absent")
        ->check(CLI::IsMember(fixture_names()));
    cmd->add_option("--out", opts.out, "output file (default: stdout)");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember(formats));
    cmd->add_option("--seed", opts.seed, "random stream seed");
}

DeviceConfig load(const CommonOpts& opts) {
    if (!opts.config_path.empty()) return load_device_file(opts.config_path);
    return fixture_device(opts.fixture);
}

/// Writes through a std::ostream, to --out (binary, exact bytes) or stdout.
void emit(const CommonOpts& opts, const std::function<void(std::ostream&)>& write) {
    if (opts.out.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream file(opts.out, std::ios::binary);
    if (!file) throw ConfigError("out", "cannot open '" + opts.out + "' for writing");
    write(file);
}

void emit_json(const CommonOpts& opts, const json& j) {
    emit(opts, [&](std::ostream& out) { out << j.dump(2) << "\n"; });
}

double default_span(const ChainSpec& chain) {
    return 5.0 * (chain.modes.front().kappa_total() + chain.modes.back().kappa_total());
}

BandwidthMethod parse_method(const std::string& name, const ChainSpec& chain) {
    if (name == "analytic") return BandwidthMethod::analytic_n1;
    if (name == "sum") return BandwidthMethod::approx_sum;
    if (name == "numeric") return BandwidthMethod::numeric_fwhm;
    // auto: the per-size defaults used throughout
    if (chain.n_stages() == 1) return BandwidthMethod::analytic_n1;
    if (chain.n_stages() == 2) return BandwidthMethod::approx_sum;
    return BandwidthMethod::numeric_fwhm;
}

// ---------------------------------------------------------------- s21

struct S21Opts {
    CommonOpts common;
    double delta_min_hz = 0.0;
    double delta_max_hz = 0.0;
    std::size_t points = 1001;
    bool span_set = false;
};

int run_s21(const S21Opts& opts) {
    const DeviceConfig dev = load(opts.common);
    double lo = hz_to_angular(opts.delta_min_hz), hi = hz_to_angular(opts.delta_max_hz);
    if (!opts.span_set) {
        hi = default_span(dev.chain);
        lo = -hi;
    }
    const ScatteringResult r = compute_scattering(dev.chain, lo, hi, opts.points);
    if (opts.common.format == "json") {
        // ordered_json invalidates references on key insertion, so the
        // arrays are built before they are attached.
        json delta = json::array(), re = json::array(), im = json::array(),
             tr = json::array();
        for (std::size_t i = 0; i < r.delta_grid.size(); ++i) {
            delta.push_back(angular_to_hz(r.delta_grid[i]));
            re.push_back(r.s21[i].real());
            im.push_back(r.s21[i].imag());
            tr.push_back(std::norm(r.s21[i]));
        }
        json j;
        j["delta_hz"] = std::move(delta);
        j["re_s21"] = std::move(re);
        j["im_s21"] = std::move(im);
        j["transmission"] = std::move(tr);
        emit_json(opts.common, j);
    } else {
        emit(opts.common, [&](std::ostream& out) {
            CsvWriter csv(out);
            csv.row({"delta_hz", "re_s21", "im_s21", "transmission"});
            for (std::size_t i = 0; i < r.delta_grid.size(); ++i)
                csv.numeric_row({angular_to_hz(r.delta_grid[i]), r.s21[i].real(),
                                 r.s21[i].imag(), std::norm(r.s21[i])});
        });
    }
    return 0;
}

// ---------------------------------------------------------------- bandwidth

struct BandwidthOpts {
    CommonOpts common;
    std::string method = "auto";
};

int run_bandwidth(const BandwidthOpts& opts) {
    const DeviceConfig dev = load(opts.common);
    const ChainSpec& chain = dev.chain;
    const double c = cooperativity(chain);
    const double e4 = eta_4wm(c);
    const double em =
        chain.n_stages() == 2
            ? memory_efficiency(chain.gamma_mb(), chain.gamma_mw(),
                                chain.modes[1].kappa_total())
            : 1.0;
    const double kappa_d = bandwidth(chain, parse_method(opts.method, chain));
    if (opts.common.format == "csv") {
        emit(opts.common, [&](std::ostream& out) {
            CsvWriter csv(out);
            csv.row({"c", "eta_4wm", "eta_m", "kappa_d_hz"});
            csv.numeric_row({c, e4, em, angular_to_hz(kappa_d)});
        });
    } else {
        json j;
        j["c"] = c;
        j["eta_4wm"] = e4;
        j["eta_m"] = em;
        j["kappa_d_hz"] = angular_to_hz(kappa_d);
        emit_json(opts.common, j);
    }
    return 0;
}

// ---------------------------------------------------------------- budget

struct BudgetResult {
    EfficiencyBudget efficiency;
    NoiseBudget noise;
    double kappa_d = 0.0;
};

BudgetResult compute_budget(const DeviceConfig& dev) {
    const double span = default_span(dev.chain);
    const ScatteringResult scat = compute_scattering(dev.chain, -span, span, 2001);
    BudgetResult r;
    r.efficiency = efficiency_budget(dev.chain, dev.cycle, scat);
    r.noise = noise_budget(dev.chain.qubits, dev.cycle, r.efficiency.eta_total,
                           scat.kappa_d, dev.environment,
                           angular_to_hz(dev.chain.modes.front().omega),
                           dev.alpha_pump, dev.alpha_ro);
    r.kappa_d = scat.kappa_d;
    return r;
}

int run_budget(const CommonOpts& opts) {
    const DeviceConfig dev = load(opts);
    const BudgetResult r = compute_budget(dev);
    const auto& e = r.efficiency;
    const auto& a = r.noise;

    std::vector<std::pair<std::string, double>> rows;
    rows.emplace_back("eta_4wm", e.eta_4wm);
    rows.emplace_back("eta_m", e.eta_m);
    rows.emplace_back("eta_cycle", e.eta_cycle);
    for (std::size_t k = 0; k < e.eta_q.size(); ++k)
        rows.emplace_back("eta_q" + std::to_string(k), e.eta_q[k]);
    for (std::size_t k = 0; k < e.f_ro.size(); ++k)
        rows.emplace_back("f_ro" + std::to_string(k), e.f_ro[k]);
    rows.emplace_back("eta_total", e.eta_total);
    std::vector<std::pair<std::string, double>> noise_rows = {
        {"alpha_q", a.alpha_q},     {"alpha_pump", a.alpha_pump},
        {"alpha_ro", a.alpha_ro},   {"alpha_th", a.alpha_th},
        {"alpha_total", a.alpha_total}};

    if (opts.format == "json") {
        json j;
        for (const auto& [name, value] : rows) j["efficiency"][name] = value;
        for (const auto& [name, value] : noise_rows) j["noise"][name] = value;
        j["kappa_d_hz"] = angular_to_hz(r.kappa_d);
        emit_json(opts, j);
    } else if (opts.format == "csv") {
        emit(opts, [&](std::ostream& out) {
            CsvWriter csv(out);
            csv.row({"group", "name", "value"});
            for (const auto& [name, value] : rows)
                csv.row({"efficiency", name, format_number(value)});
            for (const auto& [name, value] : noise_rows)
                csv.row({"noise", name, format_number(value)});
        });
    } else {
        emit(opts, [&](std::ostream& out) {
            const auto block = [&](const char* title,
                                   const std::vector<std::pair<std::string, double>>&
                                       entries) {
                out << title << "\n";
                std::size_t width = 0;
                for (const auto& [name, value] : entries)
                    width = std::max(width, name.size());
                for (const auto& [name, value] : entries)
                    out << "  " << name << std::string(width - name.size() + 2, ' ')
                        << format_number(value) << "\n";
            };
            block("efficiency", rows);
            block("dark counts [1/s]", noise_rows);
        });
    }
    return 0;
}

// ---------------------------------------------------------------- dynamics

struct DynamicsOpts {
    CommonOpts common;
    double t_max = 5e-5;
    std::size_t samples = 600;
    std::string initial = "photon";
};

int run_dynamics(const DynamicsOpts& opts) {
    const DeviceConfig dev = load(opts.common);
    ChainSpec chain = dev.chain;
    // Detection-window picture: the buffer holds the prepared photon and is
    // not itself decaying; its ports only matter for the scattering view.
    chain.modes.front().kappa_ext = 0.0;
    chain.modes.front().kappa_int = 0.0;

    double rate = 0.0;
    for (const auto& m : chain.modes) rate = std::max(rate, m.kappa_total());
    for (std::size_t k = 0; k < chain.n_stages(); ++k)
        rate = std::max(rate, std::abs(chain.g4(k)));
    double delta_r = 0.0;
    for (const auto& p : chain.pumps) {
        delta_r -= p.delta_p;
        rate = std::max(rate, std::abs(delta_r));
    }
    double dt = opts.t_max / static_cast<double>(std::max<std::size_t>(1, opts.samples));
    if (rate > 0.0) dt = std::min(dt, 0.05 / rate * 0.999);

    const SubspaceState initial = opts.initial == "vacuum"
                                      ? vacuum_state(chain.n_stages())
                                      : photon_in_buffer(chain.n_stages());
    const EvolutionTrace trace = evolve_master_equation(chain, initial, opts.t_max, dt);

    std::vector<std::string> header = {"t"};
    header.push_back("n_b");
    for (std::size_t k = 0; k < chain.n_stages(); ++k) {
        header.push_back("n_Q" + std::to_string(k));
        const ModeRole role = chain.modes[k + 1].role;
        header.push_back(role == ModeRole::waste ? "n_w" : "n_m");
    }
    const auto row_values = [&](std::size_t i) {
        std::vector<double> row = {trace.t[i], trace.mode_occupation[0][i]};
        for (std::size_t k = 0; k < chain.n_stages(); ++k) {
            row.push_back(trace.qubit_occupation[k][i]);
            row.push_back(trace.mode_occupation[k + 1][i]);
        }
        return row;
    };
    if (opts.common.format == "json") {
        json j;
        for (const auto& name : header) j[name] = json::array();
        for (std::size_t i = 0; i < trace.t.size(); ++i) {
            const auto row = row_values(i);
            for (std::size_t c = 0; c < header.size(); ++c)
                j[header[c]].push_back(row[c]);
        }
        emit_json(opts.common, j);
    } else {
        emit(opts.common, [&](std::ostream& out) {
            CsvWriter csv(out);
            csv.row(header);
            for (std::size_t i = 0; i < trace.t.size(); ++i)
                csv.numeric_row(row_values(i));
        });
    }
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    CommonOpts common;
    std::vector<double> flux = {0.0};
    double duration = 1.0;
    std::string scheme = "and";
};

CycleModel device_cycle_model(const DeviceConfig& dev) {
    const double span = default_span(dev.chain);
    const ScatteringResult scat = compute_scattering(dev.chain, -span, span, 2001);
    const EfficiencyBudget budget = efficiency_budget(dev.chain, dev.cycle, scat);
    const FilteredTransmission t =
        pulse_filtered_transmissions(dev.chain, dev.cycle.t_d);
    const double capture = t.to_waste + t.to_memory_loss;

    CycleModel model;
    model.t_d = dev.cycle.t_d;
    model.t_cycle = dev.cycle.t_cycle();
    StageModel s0;
    s0.conversion = capture;
    s0.flag = budget.eta_q[0] * budget.f_ro[0];
    StageModel s1;
    s1.conversion = capture > 0.0 ? t.to_waste / capture : 0.0;
    s1.flag = budget.eta_q[1] * budget.f_ro[1];
    model.stages = {s0, s1};
    for (const auto& q : dev.chain.qubits)
        model.intrinsic_flip.push_back(alpha_q(q, dev.cycle) * model.t_cycle);
    const double n_bar = mean_occupation(dev.environment,
                                         angular_to_hz(dev.chain.modes.front().omega));
    model.thermal_rate = alpha_th(budget.eta_total, scat.kappa_d, n_bar);
    return model;
}

int run_simulate(const SimulateOpts& opts) {
    const DeviceConfig dev = load(opts.common);
    if (dev.chain.n_stages() != 2)
        throw Error("simulate models the two-stage detector; got " +
                    std::to_string(dev.chain.n_stages()) + " stages");
    const CycleModel model = device_cycle_model(dev);
    const DecodeScheme scheme = opts.scheme == "majority" ? DecodeScheme::majority
                                                          : DecodeScheme::all_or_nothing;

    std::vector<ClickTrace> traces;
    traces.reserve(opts.flux.size());
    for (std::size_t i = 0; i < opts.flux.size(); ++i)
        traces.push_back(simulate(model, opts.flux[i], opts.duration,
                                  opts.common.seed + i));

    if (opts.common.format == "json") {
        const BenchmarkResult r = estimate_benchmark(traces, opts.flux, scheme);
        json j;
        j["efficiency"] = r.efficiency;
        j["efficiency_err"] = r.efficiency_err;
        j["dark_rate"] = r.dark_rate;
        j["dark_rate_err"] = r.dark_rate_err;
        const auto fit_json = [](const LineFit& f) {
            json o;
            o["slope"] = f.slope;
            o["slope_err"] = f.slope_err;
            o["intercept"] = f.intercept;
            o["intercept_err"] = f.intercept_err;
            return o;
        };
        j["decoded"] = fit_json(r.decoded);
        j["per_qubit"] = json::array();
        for (const auto& f : r.per_qubit) j["per_qubit"].push_back(fit_json(f));
        bool saturated = false;
        for (const auto& t : traces) saturated = saturated || t.saturated;
        j["saturated"] = saturated;
        emit_json(opts.common, j);
    } else {
        // Compact traces: all-zero cycles are omitted; cycle count follows
        // from duration / t_cycle.
        const bool multi = opts.flux.size() > 1;
        emit(opts.common, [&](std::ostream& out) {
            CsvWriter csv(out);
            csv.row(multi ? std::vector<std::string>{"flux", "cycle", "outcome"}
                          : std::vector<std::string>{"cycle", "outcome"});
            for (std::size_t i = 0; i < traces.size(); ++i) {
                const auto& tr = traces[i];
                for (std::size_t c = 0; c < tr.outcomes.size(); ++c) {
                    if (!tr.outcomes[c]) continue;
                    std::vector<std::string> cells;
                    if (multi) cells.push_back(format_number(opts.flux[i]));
                    cells.push_back(std::to_string(c));
                    cells.push_back(bitstring(tr.outcomes[c], tr.n_qubits));
                    csv.row(cells);
                }
            }
        });
    }
    return 0;
}

// ---------------------------------------------------------------- fit

struct FitOpts {
    CommonOpts common;
    std::string family;
    std::string data_path;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ConfigError("data", "missing column '" + name + "'");
    }
};

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("data", "cannot open '" + path + "'");
    Table t;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (t.header.empty()) {
            t.header = cells;
            continue;
        }
        std::vector<double> values;
        for (const auto& c : cells) {
            char* end = nullptr;
            values.push_back(std::strtod(c.c_str(), &end));
            if (end == c.c_str())
                throw ConfigError("data", "not a number: '" + c + "'");
        }
        if (values.size() != t.header.size())
            throw ConfigError("data", "ragged row in '" + path + "'");
        t.rows.push_back(values);
    }
    if (t.header.empty() || t.rows.empty())
        throw ConfigError("data", "no data rows in '" + path + "'");
    return t;
}

std::vector<double> column_of(const Table& t, const std::string& name) {
    const std::size_t c = t.column(name);
    std::vector<double> v;
    v.reserve(t.rows.size());
    for (const auto& row : t.rows) v.push_back(row[c]);
    return v;
}

json report_json(const FitReport& r) {
    json j;
    j["parameters"] = json::array();
    for (std::size_t i = 0; i < r.names.size(); ++i) {
        json p;
        p["name"] = r.names[i];
        p["estimate"] = r.estimates[i];
        p["error"] = r.errors[i];
        p["well_determined"] = static_cast<bool>(r.well_determined[i]);
        j["parameters"].push_back(p);
    }
    j["rss"] = r.rss;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    return j;
}

int run_fit(const FitOpts& opts) {
    const DeviceConfig dev = load(opts.common);
    const Table data = read_table(opts.data_path);
    FitOptions fit_opts;
    fit_opts.seed = opts.common.seed;
    const double inf = std::numeric_limits<double>::infinity();
    FitReport report;

    if (opts.family == "decay") {
        const auto t = column_of(data, "t");
        const auto y = column_of(data, "y");
        const double y0 = y.front(), y_end = y.back();
        const double t_span = t.back() - t.front();
        const ScalarModel model = [](const std::vector<double>& p, double x) {
            return p[0] * std::exp(-x / p[1]) + p[2];
        };
        report = fit(model, t, y, {"amplitude", "tau", "offset"},
                     {y0 - y_end, std::max(t_span / 3.0, 1e-12), y_end},
                     {-inf, 1e-15, -inf}, {inf, inf, inf}, fit_opts);
    } else if (opts.family == "stark") {
        const auto delta = column_of(data, "delta_b_hz");
        const auto shift = column_of(data, "shift_hz");
        const auto dephasing = column_of(data, "dephasing");
        std::vector<StarkDataPoint> points;
        for (std::size_t i = 0; i < delta.size(); ++i)
            points.push_back({hz_to_angular(delta[i]), hz_to_angular(shift[i]),
                              dephasing[i]});
        const double kappa_b = dev.chain.modes.front().kappa_total();
        const double chi_guess = dev.chain.qubits.front().chi_left;
        double peak = 0.0;
        for (const auto& p : points) peak = std::max(peak, std::abs(p.shift));
        const double eps_guess = std::sqrt(
            peak * (kappa_b * kappa_b + chi_guess * chi_guess) /
            (4.0 * std::abs(chi_guess)));
        report = stark_fit(points, kappa_b, {chi_guess, eps_guess, 0.0}, fit_opts);
    } else if (opts.family == "temperature") {
        const auto temperature = column_of(data, "temperature_k");
        const auto rate = column_of(data, "rate");
        const double f_b = angular_to_hz(dev.chain.modes.front().omega);
        const ScalarModel model = [f_b](const std::vector<double>& p, double t) {
            return temperature_model(p[0], p[1], t, {f_b});
        };
        const auto [lo_it, hi_it] = std::minmax_element(rate.begin(), rate.end());
        const auto [tlo_it, thi_it] =
            std::minmax_element(temperature.begin(), temperature.end());
        const double n_span = thermal_occupation(*thi_it, f_b) -
                              thermal_occupation(*tlo_it, f_b);
        const double k_guess =
            n_span > 0.0 ? std::max((*hi_it - *lo_it) / n_span, 1.0) : 1.0;
        report = fit(model, temperature, rate, {"k_th", "c_th"},
                     {k_guess, std::max(*lo_it, 0.0)}, {0.0, 0.0}, {inf, inf},
                     fit_opts);
    } else if (opts.family == "cofit") {
        EfficiencyCurves curves;
        curves.amplitude = column_of(data, "amplitude");
        curves.eta_q0 = column_of(data, "eta_q0");
        curves.eta_q1 = column_of(data, "eta_q1");
        curves.eta_and = column_of(data, "eta_and");
        CofitFixed fixed;
        fixed.t_d = dev.cycle.t_d;
        fixed.eta_cycle = eta_cycle(dev.cycle);
        if (dev.chain.n_stages() != 2)
            throw Error("cofit needs a two-stage device config");
        fixed.f_ro0 = dev.chain.qubits[0].f_ro;
        fixed.f_ro1 = dev.chain.qubits[1].f_ro;
        fixed.kappa_b_ext = dev.chain.modes.front().kappa_ext;
        fixed.kappa_b_int = dev.chain.modes.front().kappa_int;
        fixed.kappa_w_ext = dev.chain.modes.back().kappa_ext;
        fixed.kappa_w_int = dev.chain.modes.back().kappa_int;
        fixed.t1_q0 = column_of(data, "t1_q0");
        fixed.t1_q1 = column_of(data, "t1_q1");
        const double g40 = dev.chain.g4(0).real();
        const double g41 = dev.chain.g4(1).real();
        report = efficiency_cofit(curves, fixed,
                                  {g40, g41, dev.chain.modes[1].kappa_total()},
                                  fit_opts);
    } else {
        throw ConfigError("family", "unknown fit family '" + opts.family +
                                        "'; use decay, stark, temperature, cofit");
    }
    emit_json(opts.common, report_json(report));
    return 0;
}

// ---------------------------------------------------------------- sweeps

struct TemperatureSweepOpts {
    CommonOpts common;
    double t_min = 0.02;
    double t_max = 0.06;
    std::size_t points = 21;
};

int run_sweep_temperature(const TemperatureSweepOpts& opts) {
    const DeviceConfig dev = load(opts.common);
    if (!(opts.t_min >= 0.0) || !(opts.t_max > opts.t_min) || opts.points < 2)
        throw ConfigError("sweep", "need 0 <= t-min < t-max and points >= 2");
    const BudgetResult base = compute_budget(dev);
    const double f_b = angular_to_hz(dev.chain.modes.front().omega);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < opts.points; ++i) {
        const double t = opts.t_min + (opts.t_max - opts.t_min) *
                                          static_cast<double>(i) /
                                          static_cast<double>(opts.points - 1);
        Environment env = dev.environment;
        env.temperature = t;
        const double n_bar = mean_occupation(env, f_b);
        const NoiseBudget noise =
            noise_budget(dev.chain.qubits, dev.cycle, base.efficiency.eta_total,
                         base.kappa_d, env, f_b, dev.alpha_pump, dev.alpha_ro);
        rows.push_back({t, n_bar, noise.alpha_th, noise.alpha_total});
    }
    const std::vector<std::string> header = {"temperature_k", "n_bar", "alpha_th",
                                             "alpha_total"};
    if (opts.common.format == "json") {
        json j;
        for (const auto& name : header) j[name] = json::array();
        for (const auto& row : rows)
            for (std::size_t c = 0; c < header.size(); ++c)
                j[header[c]].push_back(row[c]);
        emit_json(opts.common, j);
    } else {
        emit(opts.common, [&](std::ostream& out) {
            CsvWriter csv(out);
            csv.row(header);
            for (const auto& row : rows) csv.numeric_row(row);
        });
    }
    return 0;
}

struct PumpSweepOpts {
    CommonOpts common;
    double a_min = 0.2;
    double a_max = 1.5;
    std::size_t points = 27;
};

int run_sweep_pump(const PumpSweepOpts& opts) {
    const DeviceConfig dev = load(opts.common);
    if (!(opts.a_min > 0.0) || !(opts.a_max > opts.a_min) || opts.points < 2)
        throw ConfigError("sweep", "need 0 < a-min < a-max and points >= 2");

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < opts.points; ++i) {
        const double a = opts.a_min + (opts.a_max - opts.a_min) *
                                          static_cast<double>(i) /
                                          static_cast<double>(opts.points - 1);
        DeviceConfig scaled = dev;
        for (auto& pump : scaled.chain.pumps) pump.xi *= a;
        const double span = default_span(scaled.chain);
        const ScatteringResult scat =
            compute_scattering(scaled.chain, -span, span, 2001);
        const EfficiencyBudget budget =
            efficiency_budget(scaled.chain, scaled.cycle, scat);
        rows.push_back({a, scat.cooperativity, scat.eta_4wm, scat.eta_m,
                        angular_to_hz(scat.kappa_d), budget.eta_total});
    }
    const std::vector<std::string> header = {"amplitude", "c",          "eta_4wm",
                                             "eta_m",     "kappa_d_hz", "eta_total"};
    if (opts.common.format == "json") {
        json j;
        for (const auto& name : header) j[name] = json::array();
        for (const auto& row : rows)
            for (std::size_t c = 0; c < header.size(); ++c)
                j[header[c]].push_back(row[c]);
        emit_json(opts.common, j);
    } else {
        emit(opts.common, [&](std::ostream& out) {
            CsvWriter csv(out);
            csv.row(header);
            for (const auto& row : rows) csv.numeric_row(row);
        });
    }
    return 0;
}

// ---------------------------------------------------------------- resonance-lines

int run_resonance_lines(const CommonOpts& opts) {
    const DeviceConfig dev = load(opts);
    const PumpResonanceLines lines = pump_resonance_lines(dev.chain);
    if (opts.format == "csv") {
        emit(opts, [&](std::ostream& out) {
            CsvWriter csv(out);
            csv.row({"line", "slope", "intercept_hz", "omega_p_hz"});
            csv.row({"first_stage", format_number(lines.first_stage.slope),
                     format_number(angular_to_hz(lines.first_stage.intercept)),
                     format_number(angular_to_hz(lines.omega_p0))});
            csv.row({"cascade", format_number(lines.cascade.slope),
                     format_number(angular_to_hz(lines.cascade.intercept)),
                     format_number(angular_to_hz(lines.omega_p1))});
        });
    } else {
        json j;
        j["first_stage"]["slope"] = lines.first_stage.slope;
        j["first_stage"]["intercept_hz"] = angular_to_hz(lines.first_stage.intercept);
        j["cascade"]["slope"] = lines.cascade.slope;
        j["cascade"]["intercept_hz"] = angular_to_hz(lines.cascade.intercept);
        j["omega_p0_hz"] = angular_to_hz(lines.omega_p0);
        j["omega_p1_hz"] = angular_to_hz(lines.omega_p1);
        emit_json(opts, j);
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Cascaded microwave photon detector modeling toolkit"};
    app.require_subcommand(0, 1);

    const std::vector<std::string> known = {
        "s21",      "bandwidth",        "budget",     "dynamics",
        "simulate", "fit",              "sweep-temperature",
        "sweep-pump", "resonance-lines"};
    if (argc >= 2) {
        const std::string first = argv[1];
        if (!first.empty() && first.front() != '-' &&
            std::find(known.begin(), known.end(), first) == known.end()) {
            std::cerr << "unknown subcommand '" << first << "'\n"
                      << app.help() << std::flush;
            return 64;
        }
    }

    S21Opts s21_opts;
    auto* s21_cmd = app.add_subcommand("s21", "sampled transmission response");
    add_common(s21_cmd, s21_opts.common, "csv", {"csv", "json"});
    auto* dmin = s21_cmd->add_option("--delta-min", s21_opts.delta_min_hz,
                                     "lowest probe detuning [Hz]");
    auto* dmax = s21_cmd->add_option("--delta-max", s21_opts.delta_max_hz,
                                     "highest probe detuning [Hz]");
    s21_cmd->add_option("--points", s21_opts.points, "grid size")
        ->check(CLI::Range(std::size_t{2}, std::size_t{2000001}));

    BandwidthOpts bw_opts;
    auto* bw_cmd = app.add_subcommand("bandwidth", "cooperativity and bandwidth summary");
    add_common(bw_cmd, bw_opts.common, "json", {"csv", "json"});
    bw_cmd->add_option("--method", bw_opts.method, "fwhm method")
        ->check(CLI::IsMember({"auto", "analytic", "sum", "numeric"}));

    CommonOpts budget_opts;
    auto* budget_cmd =
        app.add_subcommand("budget", "efficiency and dark-count budgets");
    add_common(budget_cmd, budget_opts, "text", {"text", "csv", "json"});

    DynamicsOpts dyn_opts;
    auto* dyn_cmd = app.add_subcommand(
        "dynamics", "single-photon conversion dynamics (closed buffer)");
    add_common(dyn_cmd, dyn_opts.common, "csv", {"csv", "json"});
    dyn_cmd->add_option("--t-max", dyn_opts.t_max, "evolution time [s]")
        ->check(CLI::PositiveNumber);
    dyn_cmd->add_option("--samples", dyn_opts.samples, "minimum output samples")
        ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
    dyn_cmd->add_option("--initial", dyn_opts.initial, "initial state")
        ->check(CLI::IsMember({"photon", "vacuum"}));

    SimulateOpts sim_opts;
    auto* sim_cmd =
        app.add_subcommand("simulate", "stochastic cycle-level detector run");
    add_common(sim_cmd, sim_opts.common, "csv", {"csv", "json"});
    sim_cmd->add_option("--flux", sim_opts.flux,
                        "input photon flux [photons/s]; repeat for a sweep");
    sim_cmd->add_option("--duration", sim_opts.duration, "trace length [s]")
        ->check(CLI::PositiveNumber);
    sim_cmd->add_option("--scheme", sim_opts.scheme, "decoder")
        ->check(CLI::IsMember({"and", "majority"}));

    FitOpts fit_opts;
    auto* fit_cmd = app.add_subcommand("fit", "least-squares parameter fits");
    add_common(fit_cmd, fit_opts.common, "json", {"json"});
    fit_cmd
        ->add_option("--family", fit_opts.family,
                     "decay: columns t,y; stark: delta_b_hz,shift_hz,dephasing; "
                     "temperature: temperature_k,rate; cofit: amplitude,eta_q0,"
                     "eta_q1,eta_and,t1_q0,t1_q1")
        ->required();
    fit_cmd->add_option("--data", fit_opts.data_path, "input CSV")->required();

    TemperatureSweepOpts temp_opts;
    auto* temp_cmd = app.add_subcommand("sweep-temperature",
                                        "dark-count budget against temperature");
    add_common(temp_cmd, temp_opts.common, "csv", {"csv", "json"});
    temp_cmd->add_option("--t-min", temp_opts.t_min, "lowest temperature [K]");
    temp_cmd->add_option("--t-max", temp_opts.t_max, "highest temperature [K]");
    temp_cmd->add_option("--points", temp_opts.points, "sweep size");

    PumpSweepOpts pump_opts;
    auto* pump_cmd = app.add_subcommand(
        "sweep-pump", "conversion figures against relative pump amplitude");
    add_common(pump_cmd, pump_opts.common, "csv", {"csv", "json"});
    pump_cmd->add_option("--a-min", pump_opts.a_min, "lowest relative amplitude");
    pump_cmd->add_option("--a-max", pump_opts.a_max, "highest relative amplitude");
    pump_cmd->add_option("--points", pump_opts.points, "sweep size");

    CommonOpts lines_opts;
    auto* lines_cmd = app.add_subcommand("resonance-lines",
                                         "pump frequency-matching conditions");
    add_common(lines_cmd, lines_opts, "json", {"csv", "json"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (s21_cmd->parsed()) {
            s21_opts.span_set = dmin->count() > 0 || dmax->count() > 0;
            if (s21_opts.span_set && !(dmin->count() && dmax->count()))
                throw ConfigError("delta", "give both --delta-min and --delta-max");
            return run_s21(s21_opts);
        }
        if (bw_cmd->parsed()) return run_bandwidth(bw_opts);
        if (budget_cmd->parsed()) return run_budget(budget_opts);
        if (dyn_cmd->parsed()) return run_dynamics(dyn_opts);
        if (sim_cmd->parsed()) return run_simulate(sim_opts);
        if (fit_cmd->parsed()) return run_fit(fit_opts);
        if (temp_cmd->parsed()) return run_sweep_temperature(temp_opts);
        if (pump_cmd->parsed()) return run_sweep_pump(pump_opts);
        if (lines_cmd->parsed()) return run_resonance_lines(lines_opts);
        std::cout << app.help() << std::flush;
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace csmpd
