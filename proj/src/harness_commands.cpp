#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <thread>

#include "stablab/harness.hpp"

namespace stablab::harness {

namespace {

OrderedJson num(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunSummary start(const std::string& command, const ExperimentConfig& cfg) {
    RunSummary s;
    s.command = command;
    s.config_digest = cfg.digest();
    s.timestamp = utc_timestamp();
    return s;
}

void finish(RunSummary& s, int exit_override = kExitSatisfied) {
    s.verdict = combine(s.checks);
    if (exit_override != kExitSatisfied) {
        s.exit_code = exit_override;
    } else {
        s.exit_code = s.verdict == Verdict::Violated ? kExitViolated : kExitSatisfied;
    }
}

std::string prefixed(std::size_t dim, const std::string& name) {
    return "dim=" + std::to_string(dim) + ": " + name;
}

CheckReport renamed(CheckReport r, std::size_t dim) {
    r.name = prefixed(dim, r.name);
    return r;
}

Element draw(const SamplingConfig& s, std::size_t dim, std::uint64_t k) {
    Element a = random_element(s.seed + k, dim, s.norm_cap);
    if (s.support == SampleSupport::LeadingBlock && dim > 1) {
        a = leading_block(a);
    }
    return a;
}

// Static strided partition over [0, n); each index is written by exactly one
// thread, and the first exception in index order is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, Fn fn) {
    const std::size_t threads = std::min(max_threads(), std::max<std::size_t>(n, 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += threads) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

CheckReport exactness_report(const JordanStarVerdict& v, std::size_t dim, int samples,
                             const std::string& name) {
    CheckReport r;
    r.name = prefixed(dim, name);
    r.max_residual = std::max({v.max_jordan, v.max_star, v.max_additive, v.max_homogeneous});
    r.worst_slack = -r.max_residual;
    r.num_samples = samples;
    r.verdict = v.exact ? Verdict::Satisfied : Verdict::Violated;
    if (v.witness) {
        r.worst_witness = Witness{v.witness->a, v.witness->b, Element(dim), v.witness->mu};
    }
    return r;
}

SamplingSpec sampling_spec(const SamplingConfig& s) {
    return SamplingSpec{s.seed, s.samples, s.norm_cap};
}

}  // namespace

RunSummary cmd_lemma_check(const ExperimentConfig& cfg) {
    RunSummary s = start("lemma-check", cfg);
    const SamplingSpec sampling = sampling_spec(cfg.sampling);
    for (std::size_t dim : cfg.sampling.dims) {
        const MapFn f = build_map(cfg.map, dim, "$.map").as_function();
        for (auto& r : lemma_2_1_steps(f, dim, sampling, cfg.checks.tol)) {
            s.checks.push_back(renamed(std::move(r), dim));
        }
        s.checks.push_back(renamed(telescoping_check(f, dim, sampling, cfg.checks.tol), dim));
        if (cfg.checks.mu_sweep) {
            s.checks.push_back(
                renamed(mu_sweep_report(f, dim, sampling, MuGrid(cfg.mu_grid_size)), dim));
        }
    }
    for (const auto& c : s.checks) {
        if (c.verdict == Verdict::Violated) {
            s.notes.push_back("first violated step: " + c.name);
            break;
        }
    }
    finish(s);
    return s;
}

RunSummary cmd_stability(const ExperimentConfig& cfg) {
    if (!cfg.bound) {
        throw ConfigError("$.bound", "the stability command requires a bound");
    }
    RunSummary s = start("stability", cfg);
    s.columns = {"dim",        "sample",   "norm_a", "direction",   "status", "iterations",
                 "final_residual", "distance", "bound",  "slack"};
    bool diverged = false;

    for (std::size_t dim : cfg.sampling.dims) {
        const MapSpec spec = build_map(cfg.map, dim, "$.map");
        const MapFn f = spec.as_function();
        const auto hint = exponent_hint(spec);

        // Reject an incompatible control before spending time on calibration.
        Direction planned = cfg.stabilizer.direction;
        if (planned == Direction::Auto && hint && *hint != 1.0) {
            planned = *hint > 1.0 ? Direction::Forward : Direction::Backward;
        }
        if (planned != Direction::Auto) {
            cfg.bound->spec.require_compatible(planned);
        }

        BoundSpec bound = cfg.bound->spec;
        if (cfg.bound->calibrate) {
            try {
                bound = calibrate_phi(
                    f, dim, bound,
                    CalibrationOptions{cfg.sampling.seed, std::max(cfg.sampling.samples, 10),
                                       cfg.sampling.norm_cap, 8});
            } catch (const CalibrationFailure& e) {
                CheckReport r;
                r.name = prefixed(dim, "control calibration");
                r.verdict = Verdict::Violated;
                s.checks.push_back(r);
                s.notes.push_back(prefixed(dim, e.what()));
                continue;
            }
            s.notes.push_back(prefixed(dim, "calibrated theta = " + format_double(bound.theta)));
        }

        const auto n = static_cast<std::size_t>(cfg.sampling.samples);
        std::vector<Element> points(n);
        std::vector<StabilizationResult> results(n);
        parallel_for(n, [&](std::size_t k) {
            points[k] = random_element(cfg.sampling.seed + k, dim, cfg.sampling.norm_cap);
            results[k] = stabilize_point(f, points[k], cfg.stabilizer, hint);
        });

        CheckAccumulator convergence(prefixed(dim, "stabilization converged"), 0.0);
        CheckAccumulator certificate(prefixed(dim, "stability certificate |h(a)-f(a)| <= bound"),
                                     1e-9);
        bool dim_diverged = false;
        bool all_converged = true;
        for (std::size_t k = 0; k < n; ++k) {
            const Element& a = points[k];
            StabilizationResult& r = results[k];
            const double norm_a = op_norm(a);
            const Witness w{a, Element(dim), Element(dim), std::nullopt};
            OrderedJson row;
            row["dim"] = dim;
            row["sample"] = k;
            row["norm_a"] = num(norm_a);
            row["direction"] = to_string(r.direction);
            row["status"] = to_string(r.status);
            row["iterations"] = r.iterations_used;
            row["final_residual"] =
                r.cauchy_residuals.empty() ? OrderedJson(nullptr) : num(r.cauchy_residuals.back());
            convergence.add(r.converged() ? 0.0 : 1.0, 0.0, 1.0, w);
            if (r.status == StabilizationStatus::Diverged) {
                dim_diverged = true;
            }
            if (r.converged()) {
                const double distance = op_norm(r.limit() - f(a));
                const double b = bound_closed_form(bound, norm_a, r.direction);
                r.certified_bound = b;
                certificate.add(distance, b, 1.0 + norm_a, w);
                row["distance"] = num(distance);
                row["bound"] = num(b);
                row["slack"] = num(b - distance);
            } else {
                all_converged = false;
                row["distance"] = nullptr;
                row["bound"] = nullptr;
                row["slack"] = nullptr;
            }
            OrderedJson trace = OrderedJson::array();
            for (double x : r.cauchy_residuals) trace.push_back(num(x));
            row["residuals"] = std::move(trace);
            s.rows.push_back(std::move(row));
        }
        s.checks.push_back(convergence.finish());
        if (dim_diverged) {
            diverged = true;
            s.notes.push_back(prefixed(dim, "stabilization diverged; residual traces in rows"));
            continue;
        }
        s.checks.push_back(certificate.finish());
        if (!all_converged) {
            continue;
        }

        s.checks.push_back(renamed(verify_uniqueness(f, dim, cfg.stabilizer,
                                                     sampling_spec(cfg.sampling), hint, 1e-9),
                                   dim));
        try {
            const MapFn h = limit_map(f, cfg.stabilizer, hint);
            const int m = std::min(cfg.checks.exactness_samples, cfg.sampling.samples);
            const auto v = is_exact_jordan_star(h, dim, m, cfg.sampling.seed, cfg.checks.exactness_tol,
                                                cfg.sampling.norm_cap, MuGrid(cfg.mu_grid_size));
            s.checks.push_back(
                exactness_report(v, dim, m, "recovered map is a Jordan *-homomorphism"));
        } catch (const std::exception& e) {
            CheckReport r;
            r.name = prefixed(dim, "recovered map is a Jordan *-homomorphism");
            r.verdict = Verdict::Violated;
            s.checks.push_back(r);
            s.notes.push_back(prefixed(dim, e.what()));
        }
    }
    finish(s, diverged ? kExitDiverged : kExitSatisfied);
    return s;
}

RunSummary cmd_superstability(const ExperimentConfig& cfg) {
    RunSummary s = start("superstability", cfg);
    s.columns = {"dim",    "sample", "norm_a",         "d_1",        "d_n_max",
                 "slope",  "expected_slope", "terminal_ratio", "verdict"};
    const auto& sc = cfg.superstability;

    for (std::size_t dim : cfg.sampling.dims) {
        const MapSpec spec = build_map(cfg.map, dim, "$.map");
        const MapFn f = spec.as_function();
        std::optional<double> p = sc.p;
        if (!p) {
            p = exponent_hint(spec);
        }
        if (!p) {
            throw ConfigError("$.superstability.p",
                              "required when the map has no perturbation exponent");
        }
        if (*p == 1.0) {
            throw ConfigError("$.superstability.p", "p = 1 has no superstability decay");
        }
        const DecayScaling scaling = *p < 1.0 ? DecayScaling::Up : DecayScaling::Down;
        const double expected = *p < 1.0 ? 2.0 * *p - 2.0 : 2.0 - 2.0 * *p;
        const double n_max = static_cast<double>(sc.n_max);

        const auto n = static_cast<std::size_t>(cfg.sampling.samples);
        std::vector<Element> points(n);
        std::vector<std::vector<double>> decay(n);
        try {
            parallel_for(n, [&](std::size_t k) {
                points[k] = draw(cfg.sampling, dim, k);
                decay[k] = superstability_decay(f, points[k], sc.n_max, scaling);
            });
        } catch (const DecayOverflow& e) {
            throw ConfigError("$.sampling.norm_cap", e.what());
        }

        CheckAccumulator slope_check(prefixed(dim, "decay slope <= expected + 0.1"), 0.0);
        CheckAccumulator terminal_check(
            prefixed(dim, "terminal decay d_nmax <= 1.1 d_1 n_max^expected"), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& d = decay[k];
            const Element& a = points[k];
            const double norm_a = op_norm(a);
            const Witness w{a, Element(dim), Element(dim), std::nullopt};
            const double peak = *std::max_element(d.begin(), d.end());
            const bool flat_zero = peak <= sc.zero_tol * (1.0 + norm_a * norm_a);
            const double slope = loglog_slope(d, sc.fit_from, sc.n_max);
            const double terminal_limit = 1.1 * d.front() * std::pow(n_max, expected);
            bool ok = true;
            if (flat_zero) {
                slope_check.add(0.0, 0.0, 1.0, w);
                terminal_check.add(0.0, 0.0, 1.0, w);
            } else {
                slope_check.add(slope, expected + 0.1, 1.0, w);
                terminal_check.add(d.back(), terminal_limit, 1.0, w);
                ok = slope <= expected + 0.1 && d.back() <= terminal_limit;
            }
            OrderedJson row;
            row["dim"] = dim;
            row["sample"] = k;
            row["norm_a"] = num(norm_a);
            row["d_1"] = num(d.front());
            row["d_n_max"] = num(d.back());
            row["slope"] = num(slope);
            row["expected_slope"] = num(expected);
            row["terminal_ratio"] =
                d.front() > 0.0 ? num(d.back() / (d.front() * std::pow(n_max, expected)))
                                : OrderedJson(nullptr);
            row["verdict"] = flat_zero ? "zero" : (ok ? "satisfied" : "violated");
            OrderedJson seq = OrderedJson::array();
            for (double x : d) seq.push_back(num(x));
            row["decay"] = std::move(seq);
            s.rows.push_back(std::move(row));
        }
        s.checks.push_back(slope_check.finish());
        s.checks.push_back(terminal_check.finish());
    }
    finish(s);
    return s;
}

RunSummary cmd_bounds_table(const ExperimentConfig& cfg) {
    RunSummary s = start("bounds-table", cfg);
    s.columns = {"control", "direction", "theta",       "exponent", "norm_a",
                 "closed_form", "series", "tail_estimate", "rel_diff", "relation"};
    const auto& bt = cfg.bounds_table;
    CheckAccumulator dominance("closed form >= truncated series", bt.rel_tol);
    CheckAccumulator consistency("psi(t)=t^q matches power p=q (forward)", bt.rel_tol);

    auto emit = [&](const BoundSpec& spec, Direction dir, double exponent, double norm_a) {
        const Element a(1, {Complex(norm_a, 0.0)});
        const double closed = bound_closed_form(spec, norm_a, dir);
        const auto series = bound_series_truncated(
            [&spec](const Element& x, const Element& y, const Element& z) {
                return spec.phi(x, y, z);
            },
            a, dir, bt.terms);
        const double denom = std::max(std::abs(closed), 1e-300);
        const double rel = (closed - series.value) / denom;
        std::string relation = "agree";
        if (std::abs(rel) > bt.rel_tol) {
            relation = rel > 0 ? "dominates" : "violates";
        }
        dominance.add(series.value, closed, denom,
                      Witness{a, Element(1), Element(1), std::nullopt});
        OrderedJson row;
        row["control"] = to_string(spec.kind);
        row["direction"] = to_string(dir);
        row["theta"] = num(spec.theta);
        row["exponent"] = num(exponent);
        row["norm_a"] = num(norm_a);
        row["closed_form"] = num(closed);
        row["series"] = num(series.value);
        row["tail_estimate"] = num(series.tail_estimate);
        row["rel_diff"] = num(rel);
        row["relation"] = relation;
        s.rows.push_back(std::move(row));
        return closed;
    };

    for (double theta : bt.thetas) {
        for (double p : bt.backward_ps) {
            for (double na : bt.norms) emit(BoundSpec::power(theta, p, p, p), Direction::Backward, p, na);
        }
        for (double p : bt.forward_ps) {
            for (double na : bt.norms) emit(BoundSpec::power(theta, p, p, p), Direction::Forward, p, na);
        }
        for (double q : bt.psi_forward_qs) {
            for (double na : bt.norms) {
                const double psi = emit(BoundSpec::psi_power(theta, q), Direction::Forward, q, na);
                if (std::find(bt.forward_ps.begin(), bt.forward_ps.end(), q) != bt.forward_ps.end()) {
                    const double power =
                        bound_closed_form(BoundSpec::power(theta, q, q, q), na, Direction::Forward);
                    consistency.add(std::abs(psi - power), 0.0, std::max(std::abs(power), 1e-300),
                                    Witness{Element(1, {Complex(na, 0.0)}), Element(1), Element(1),
                                            std::nullopt});
                }
            }
        }
        for (double q : bt.psi_backward_qs) {
            for (double na : bt.norms) emit(BoundSpec::psi_power(theta, q), Direction::Backward, q, na);
        }
        for (double na : bt.norms) emit(BoundSpec::constant(theta), Direction::Backward, 0.0, na);
    }
    s.checks.push_back(dominance.finish());
    s.checks.push_back(consistency.finish());
    finish(s);
    return s;
}

}  // namespace stablab::harness
