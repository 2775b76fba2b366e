#include "csmpd/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "csmpd/errors.hpp"
#include "csmpd/rng.hpp"

namespace csmpd {

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(std::string(what) + " must be a probability, got " +
                    std::to_string(p));
}

/// Gaussian upper-tail probability P(X >= v) for X ~ N(mean, sigma).
double upper_tail(double v, double mean, double sigma) {
    return 0.5 * std::erfc((v - mean) / (sigma * std::sqrt(2.0)));
}

} // namespace

double CycleModel::coincidence_efficiency() const {
    double eta = 1.0;
    for (const auto& s : stages) eta *= s.conversion * s.flag;
    return eta;
}

ClickTrace simulate(const CycleModel& model, double photon_flux, double duration,
                    std::uint64_t seed) {
    if (model.stages.empty()) throw Error("cycle model has no stages");
    if (model.intrinsic_flip.size() != model.stages.size())
        throw Error("need one intrinsic flip probability per stage");
    for (const auto& s : model.stages) {
        check_probability(s.conversion, "stage conversion");
        check_probability(s.flag, "stage flag probability");
    }
    for (double p : model.intrinsic_flip) check_probability(p, "intrinsic flip");
    if (!(model.t_d > 0.0) || !(model.t_cycle >= model.t_d))
        throw Error("need 0 < t_d <= t_cycle");
    if (photon_flux < 0.0) throw Error("photon flux must be nonnegative");
    if (model.thermal_rate < 0.0) throw Error("thermal rate must be nonnegative");

    const double p_signal = photon_flux * model.t_d;
    double p_thermal = 0.0;
    if (model.thermal_rate > 0.0) {
        const double eta = model.coincidence_efficiency();
        if (!(eta > 0.0))
            throw Error("thermal rate needs a chain with nonzero efficiency");
        p_thermal = model.thermal_rate / eta * model.t_cycle;
    }
    if (p_signal >= 1.0 || p_thermal >= 1.0)
        throw Error("per-cycle photon probability reached 1; model out of scope");

    ClickTrace trace;
    trace.seed = seed;
    trace.t_cycle = model.t_cycle;
    trace.n_qubits = model.stages.size();
    trace.saturated = p_signal >= 0.1;

    const auto n_cycles =
        static_cast<std::uint64_t>(std::floor(duration / model.t_cycle + 0.5));
    trace.outcomes.reserve(n_cycles);
    for (std::uint64_t cycle = 0; cycle < n_cycles; ++cycle) {
        CounterRng rng(seed, cycle);
        std::uint32_t flags = 0;
        // At most one photon event per cycle, signal taking priority; thermal
        // photons traverse the identical conversion chain.
        bool photon = rng.bernoulli(p_signal);
        if (!photon && p_thermal > 0.0) photon = rng.bernoulli(p_thermal);
        if (photon) {
            for (std::size_t k = 0; k < model.stages.size(); ++k) {
                if (!rng.bernoulli(model.stages[k].conversion)) break;
                if (rng.bernoulli(model.stages[k].flag))
                    flags |= std::uint32_t{1} << k;
            }
        }
        for (std::size_t k = 0; k < model.intrinsic_flip.size(); ++k)
            if (model.intrinsic_flip[k] > 0.0 &&
                rng.bernoulli(model.intrinsic_flip[k]))
                flags |= std::uint32_t{1} << k;
        trace.outcomes.push_back(flags);
    }
    return trace;
}

ReadoutSample readout_sample(const IQReadoutModel& model, std::size_t qubit,
                             ReadoutOutcome true_state, CounterRng& rng) {
    if (qubit >= model.mean_ground.size() || qubit >= model.mean_excited.size())
        throw Error("readout model has no qubit " + std::to_string(qubit));
    if (model.sigma < 0.0) throw Error("readout sigma must be nonnegative");
    if (model.v_th_reset > model.v_th)
        throw Error("readout thresholds must satisfy v_th_reset <= v_th");
    const double mean = true_state == ReadoutOutcome::excited
                            ? model.mean_excited[qubit]
                            : model.mean_ground[qubit];
    ReadoutSample s;
    for (;;) {
        const double i = mean + model.sigma * rng.gaussian();
        if (i >= model.v_th) {
            s.outcome = ReadoutOutcome::excited;
            return s;
        }
        if (i <= model.v_th_reset) {
            s.outcome = ReadoutOutcome::ground;
            return s;
        }
        if (++s.redraws >= 10) {
            // Stuck in the re-read band: fall back to the nearer mean.
            s.outcome = std::abs(i - model.mean_excited[qubit]) <
                                std::abs(i - model.mean_ground[qubit])
                            ? ReadoutOutcome::excited
                            : ReadoutOutcome::ground;
            return s;
        }
    }
}

ClickTrace apply_readout(const ClickTrace& trace, const IQReadoutModel& model,
                         std::uint64_t seed) {
    if (model.mean_ground.size() != trace.n_qubits ||
        model.mean_excited.size() != trace.n_qubits)
        throw Error("readout model size does not match the trace");
    ClickTrace out = trace;
    for (std::size_t j = 0; j < trace.outcomes.size(); ++j) {
        // Distinct stream family from simulate(): same seed, offset key space.
        CounterRng rng(seed ^ 0x524541444f5554ull, j);
        std::uint32_t assigned = 0;
        for (std::size_t k = 0; k < trace.n_qubits; ++k) {
            const auto truth = (trace.outcomes[j] >> k) & 1u
                                   ? ReadoutOutcome::excited
                                   : ReadoutOutcome::ground;
            if (readout_sample(model, k, truth, rng).outcome ==
                ReadoutOutcome::excited)
                assigned |= std::uint32_t{1} << k;
        }
        out.outcomes[j] = assigned;
    }
    return out;
}

void optimize_threshold(IQReadoutModel& model, std::size_t grid_points) {
    if (model.mean_ground.empty() || model.mean_excited.empty())
        throw Error("readout model has no qubits");
    if (!(model.sigma > 0.0)) throw Error("threshold optimization needs sigma > 0");
    if (grid_points < 3) throw Error("threshold grid needs at least 3 points");
    // The rotated quadrature is normalized per qubit, so qubit 0's pair
    // defines the shared thresholds.
    const double mg = model.mean_ground.front();
    const double me = model.mean_excited.front();
    if (mg == me) throw Error("degenerate readout model: equal means");

    const double lo_mean = std::min(mg, me);
    const double hi_mean = std::max(mg, me);
    const double sep = hi_mean - lo_mean;
    const double midpoint = 0.5 * (mg + me);
    const double lo = lo_mean - 0.5 * sep - 2.0 * model.sigma;
    const double hi = hi_mean + 2.5 * sep + 2.0 * model.sigma;

    // Ground-biased objective: false-positive tail over squared excited tail.
    const auto objective = [&](double v) {
        const double te = upper_tail(v, me, model.sigma);
        if (te <= 0.0) return std::numeric_limits<double>::infinity();
        const double tg = upper_tail(v, mg, model.sigma);
        return tg / (te * te);
    };

    const double step = (hi - lo) / static_cast<double>(grid_points - 1);
    std::vector<double> obj(grid_points);
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double v = lo + step * static_cast<double>(i);
        obj[i] = objective(v);
        if (obj[i] < obj[best]) best = i;
        else if (obj[i] == obj[best] &&
                 std::abs(v - midpoint) <
                     std::abs(lo + step * static_cast<double>(best) - midpoint))
            best = i;  // ties go to the value nearest the midpoint
    }
    double v_th = lo + step * static_cast<double>(best);

    // Refine only a strict interior minimum; a plateau keeps the tie-break.
    if (best > 0 && best + 1 < grid_points && obj[best] < obj[best - 1] &&
        obj[best] < obj[best + 1]) {
        double a = v_th - step, b = v_th + step;
        const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
        double f1 = objective(x1), f2 = objective(x2);
        for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + std::abs(v_th));
             ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = objective(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = objective(x2);
            }
        }
        v_th = 0.5 * (a + b);
    }

    model.v_th = v_th;
    model.v_th_reset = midpoint - std::abs(midpoint - v_th);
}

DecodeResult decode(const ClickTrace& trace, DecodeScheme scheme) {
    if (trace.n_qubits == 0) throw Error("trace has no qubits");
    if (scheme == DecodeScheme::majority && trace.n_qubits % 2 == 0)
        throw Error("majority vote needs an odd number of qubits");
    const std::uint32_t full = (std::uint32_t{1} << trace.n_qubits) - 1;
    const auto quorum = (trace.n_qubits + 1) / 2;
    DecodeResult r;
    r.clicks.reserve(trace.outcomes.size());
    std::size_t clicks = 0;
    for (std::uint32_t word : trace.outcomes) {
        const bool click = scheme == DecodeScheme::all_or_nothing
                               ? word == full
                               : std::popcount(word) >= static_cast<int>(quorum);
        r.clicks.push_back(click);
        clicks += click;
    }
    if (!trace.outcomes.empty() && trace.t_cycle > 0.0)
        r.count_rate = static_cast<double>(clicks) /
                       (static_cast<double>(trace.outcomes.size()) * trace.t_cycle);
    return r;
}

namespace {

/// WLS line y = slope*x + intercept; weights are inverse variances.
LineFit weighted_line_fit(const std::vector<double>& x,
                          const std::vector<double>& y,
                          const std::vector<double>& w) {
    double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
        sxx += w[i] * x[i] * x[i];
        sxy += w[i] * x[i] * y[i];
    }
    const double delta = s * sxx - sx * sx;
    if (!(delta > 0.0)) throw NumericalError("degenerate flux design for line fit");
    LineFit f;
    f.slope = (s * sxy - sx * sy) / delta;
    f.intercept = (sxx * sy - sx * sxy) / delta;
    f.slope_err = std::sqrt(s / delta);
    f.intercept_err = std::sqrt(sxx / delta);
    return f;
}

} // namespace

BenchmarkResult estimate_benchmark(const std::vector<ClickTrace>& traces,
                                   const std::vector<double>& fluxes,
                                   DecodeScheme scheme) {
    if (traces.size() != fluxes.size())
        throw Error("need one calibrated flux per trace");
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < traces.size(); ++i)
        if (!traces[i].saturated) keep.push_back(i);
    if (keep.empty()) throw Error("all flux points are saturated; no linear fit");
    if (keep.size() < 3)
        throw Error("need at least 3 unsaturated flux points, got " +
                    std::to_string(keep.size()));
    if (std::none_of(keep.begin(), keep.end(),
                     [&](std::size_t i) { return fluxes[i] == 0.0; }))
        throw Error("flux sweep must include a zero-flux point");
    const std::size_t n_qubits = traces[keep.front()].n_qubits;
    for (std::size_t i : keep)
        if (traces[i].n_qubits != n_qubits || traces[i].outcomes.empty() ||
            !(traces[i].t_cycle > 0.0))
            throw Error("traces must be nonempty with matching qubit counts");

    // Poisson count statistics: var(rate) = counts / duration^2.
    const auto fit_rates = [&](const std::vector<std::size_t>& counts) {
        std::vector<double> x, y, w;
        for (std::size_t j = 0; j < keep.size(); ++j) {
            const auto& tr = traces[keep[j]];
            const double duration =
                static_cast<double>(tr.outcomes.size()) * tr.t_cycle;
            const double n = std::max<double>(1.0, static_cast<double>(counts[j]));
            x.push_back(fluxes[keep[j]]);
            y.push_back(static_cast<double>(counts[j]) / duration);
            w.push_back(duration * duration / n);
        }
        return weighted_line_fit(x, y, w);
    };

    BenchmarkResult result;
    for (std::size_t k = 0; k < n_qubits; ++k) {
        std::vector<std::size_t> counts;
        for (std::size_t i : keep) {
            std::size_t n = 0;
            for (std::uint32_t word : traces[i].outcomes) n += (word >> k) & 1u;
            counts.push_back(n);
        }
        result.per_qubit.push_back(fit_rates(counts));
    }
    {
        std::vector<std::size_t> counts;
        for (std::size_t i : keep) {
            const auto d = decode(traces[i], scheme);
            counts.push_back(static_cast<std::size_t>(
                std::count(d.clicks.begin(), d.clicks.end(), true)));
        }
        result.decoded = fit_rates(counts);
    }
    result.efficiency = result.decoded.slope;
    result.efficiency_err = result.decoded.slope_err;
    result.dark_rate = result.decoded.intercept;
    result.dark_rate_err = result.decoded.intercept_err;
    return result;
}

std::string bitstring(std::uint32_t outcome, std::size_t n_qubits) {
    std::string s(n_qubits, '0');
    for (std::size_t k = 0; k < n_qubits; ++k)
        if ((outcome >> k) & 1u) s[k] = '1';  // leftmost character is qubit 0
    return s;
}

} // namespace csmpd
