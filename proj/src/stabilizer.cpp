#include "stablab/stabilizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stablab {

std::string to_string(Direction d) {
    switch (d) {
        case Direction::Forward: return "forward";
        case Direction::Backward: return "backward";
        case Direction::Auto: return "auto";
    }
    return "unknown";
}

std::string to_string(StabilizationStatus s) {
    switch (s) {
        case StabilizationStatus::Converged: return "converged";
        case StabilizationStatus::Diverged: return "diverged";
        case StabilizationStatus::NotConverged: return "not_converged";
    }
    return "unknown";
}

std::string to_string(BoundKind k) {
    switch (k) {
        case BoundKind::Power: return "power";
        case BoundKind::Psi: return "psi";
        case BoundKind::Constant: return "constant";
    }
    return "unknown";
}

void StabilizerConfig::validate() const {
    if (max_iter < 2) {
        throw std::invalid_argument("StabilizerConfig: max_iter must be >= 2");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("StabilizerConfig: tol must be > 0");
    }
}

const Element& StabilizationResult::limit() const {
    if (!converged()) {
        throw std::logic_error("StabilizationResult: no limit, status is " + to_string(status));
    }
    return last_iterate;
}

namespace {

constexpr int kDivergenceRun = 5;

// 3^n, exact up to n = 33.
double pow3(int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) {
        r *= 3.0;
    }
    return r;
}

// n-th iterate of the given direction.
Element iterate(const MapFn& f, const Element& a, Direction d, int n) {
    const double s = pow3(n);
    if (d == Direction::Forward) {
        return scale(s, f(divide(a, s)));
    }
    return divide(f(scale(s, a)), s);
}

bool diverging(const std::vector<double>& r) {
    if (r.size() < static_cast<std::size_t>(kDivergenceRun) + 1) {
        return false;
    }
    const std::size_t last = r.size() - 1;
    for (std::size_t k = last - kDivergenceRun + 1; k <= last; ++k) {
        if (!(r[k] > r[k - 1])) {
            return false;
        }
    }
    return r[last] > r.front();
}

StabilizationResult run(const MapFn& f, const Element& a, const StabilizerConfig& cfg,
                        Direction d) {
    StabilizationResult res;
    res.direction = d;
    const double threshold = cfg.tol * (1.0 + op_norm(a));
    Element prev = f(a);
    for (int n = 1; n <= cfg.max_iter; ++n) {
        Element next = iterate(f, a, d, n);
        const double r = op_norm(next - prev);
        res.cauchy_residuals.push_back(r);
        res.iterations_used = n;
        prev = std::move(next);
        if (r <= threshold) {
            res.status = StabilizationStatus::Converged;
            break;
        }
        if (diverging(res.cauchy_residuals)) {
            res.status = StabilizationStatus::Diverged;
            break;
        }
    }
    res.last_iterate = std::move(prev);
    return res;
}

}  // namespace

StabilizationResult stabilize_point(const MapFn& f, const Element& a, const StabilizerConfig& cfg,
                                    std::optional<double> exponent_hint) {
    cfg.validate();
    Direction d = cfg.direction;
    if (d == Direction::Auto && exponent_hint) {
        if (*exponent_hint > 1.0) {
            d = Direction::Forward;
        } else if (*exponent_hint < 1.0) {
            d = Direction::Backward;
        }
    }
    if (d != Direction::Auto) {
        return run(f, a, cfg, d);
    }
    StabilizationResult forward = run(f, a, cfg, Direction::Forward);
    if (forward.converged()) {
        return forward;
    }
    StabilizationResult backward = run(f, a, cfg, Direction::Backward);
    if (backward.converged()) {
        return backward;
    }
    return forward;
}

std::optional<double> exponent_hint(const MapSpec& f) {
    if (f.perturbation()) {
        return f.perturbation()->exponent();
    }
    return std::nullopt;
}

StabilizationResult stabilize_point(const MapSpec& f, const Element& a,
                                    const StabilizerConfig& cfg) {
    if (a.dim() != f.domain_dim()) {
        throw DimensionMismatch(a.dim(), f.domain_dim());
    }
    return stabilize_point(f.as_function(), a, cfg, exponent_hint(f));
}

MapFn limit_map(const MapFn& f, const StabilizerConfig& cfg, std::optional<double> hint) {
    return [f, cfg, hint](const Element& x) {
        StabilizationResult r = stabilize_point(f, x, cfg, hint);
        if (r.status == StabilizationStatus::Diverged) {
            throw StabilizationDiverged("limit_map: stabilization diverged");
        }
        if (!r.converged()) {
            throw std::runtime_error("limit_map: stabilization did not converge within max_iter");
        }
        return r.last_iterate;
    };
}

// ---------------------------------------------------------------------------

BoundSpec BoundSpec::power(double theta, double p1, double p2, double p3) {
    return BoundSpec{BoundKind::Power, theta, p1, p2, p3, 2.0};
}

BoundSpec BoundSpec::psi_power(double theta, double q) {
    return BoundSpec{BoundKind::Psi, theta, 0.0, 0.0, 0.0, q};
}

BoundSpec BoundSpec::constant(double theta) {
    return BoundSpec{BoundKind::Constant, theta, 0.0, 0.0, 0.0, 2.0};
}

double BoundSpec::psi(double t) const { return t == 0.0 ? 0.0 : std::pow(t, q); }

namespace {

double power_weight(double t, double p) { return t == 0.0 ? 0.0 : std::pow(t, p); }

}  // namespace

double BoundSpec::weight(double na, double nb, double nc) const {
    switch (kind) {
        case BoundKind::Power:
            return power_weight(na, p1) + power_weight(nb, p2) + power_weight(nc, p3);
        case BoundKind::Psi: return psi(na) + psi(nb) + psi(nc);
        case BoundKind::Constant:
            return (na != 0.0 ? 1.0 : 0.0) + (nb != 0.0 ? 1.0 : 0.0) + (nc != 0.0 ? 1.0 : 0.0);
    }
    return 0.0;
}

double BoundSpec::phi(const Element& a, const Element& b, const Element& c) const {
    return phi_norms(op_norm(a), op_norm(b), op_norm(c));
}

void BoundSpec::require_compatible(Direction d) const {
    if (d == Direction::Auto) {
        throw IncompatibleBound("bound direction must be forward or backward");
    }
    const bool fwd = d == Direction::Forward;
    switch (kind) {
        case BoundKind::Power:
            if (fwd && !(p1 > 1.0 && p2 > 1.0)) {
                throw IncompatibleBound("power control, forward: requires p1 > 1 and p2 > 1");
            }
            if (!fwd && !(p1 < 1.0 && p2 < 1.0)) {
                throw IncompatibleBound("power control, backward: requires p1 < 1 and p2 < 1");
            }
            return;
        case BoundKind::Psi:
            if (fwd && !(3.0 * psi(1.0 / 3.0) < 1.0)) {
                throw IncompatibleBound("psi control, forward: requires 3 psi(1/3) < 1");
            }
            if (!fwd && !(psi(3.0) / 3.0 < 1.0)) {
                throw IncompatibleBound("psi control, backward: requires psi(3)/3 < 1");
            }
            return;
        case BoundKind::Constant:
            if (fwd) {
                throw IncompatibleBound(
                    "constant control, forward: sum 3^i phi(a/3^i, ...) diverges; use backward");
            }
            return;
    }
}

bool BoundSpec::compatible(Direction d) const {
    try {
        require_compatible(d);
        return true;
    } catch (const IncompatibleBound&) {
        return false;
    }
}

SeriesBound bound_series_truncated(const PhiFn& phi, const Element& a, Direction direction,
                                   int terms) {
    if (terms < 1) {
        throw std::invalid_argument("bound_series_truncated: terms must be >= 1");
    }
    if (direction == Direction::Auto) {
        throw std::invalid_argument("bound_series_truncated: direction must be explicit");
    }
    const Element zero(a.dim());
    const Element two_a = scale(2.0, a);
    double sum = 0.0;
    double prev_term = 0.0;
    double last_term = 0.0;
    for (int k = 0; k < terms; ++k) {
        double term = 0.0;
        if (direction == Direction::Forward) {
            const double s = pow3(k);
            term = s * phi(divide(a, s), divide(two_a, s), zero);
        } else {
            const double s = pow3(k + 1);
            term = phi(scale(s, a), scale(s, two_a), zero) / s;
        }
        sum += term;
        prev_term = last_term;
        last_term = term;
    }
    SeriesBound out{sum, 0.0};
    if (last_term == 0.0) {
        return out;
    }
    if (terms < 2 || prev_term == 0.0) {
        out.tail_estimate = std::numeric_limits<double>::infinity();
        return out;
    }
    const double ratio = last_term / prev_term;
    out.tail_estimate =
        ratio >= 1.0 ? std::numeric_limits<double>::infinity() : last_term * ratio / (1.0 - ratio);
    return out;
}

double bound_closed_form(const BoundSpec& spec, double norm_a, Direction direction) {
    spec.require_compatible(direction);
    const bool fwd = direction == Direction::Forward;
    const double t = spec.theta;
    switch (spec.kind) {
        case BoundKind::Power: {
            const double first = t * power_weight(norm_a, spec.p1);
            const double second = t * std::pow(2.0, spec.p2) * power_weight(norm_a, spec.p2);
            if (fwd) {
                return first / (1.0 - std::pow(3.0, 1.0 - spec.p1)) +
                       second / (1.0 - std::pow(3.0, 1.0 - spec.p2));
            }
            return first / (std::pow(3.0, 1.0 - spec.p1) - 1.0) +
                   second / (std::pow(3.0, 1.0 - spec.p2) - 1.0);
        }
        case BoundKind::Psi: {
            const double numer = t * (1.0 + spec.psi(2.0)) * spec.psi(norm_a);
            if (fwd) {
                return numer / (1.0 - 3.0 * spec.psi(1.0 / 3.0));
            }
            return numer / (1.0 - spec.psi(3.0) / 3.0);
        }
        case BoundKind::Constant:
            return t;
    }
    return 0.0;
}

BoundSpec calibrate_phi(const MapFn& f, std::size_t dim, const BoundSpec& templ,
                        const CalibrationOptions& options) {
    if (options.samples < 10) {
        throw std::invalid_argument("calibrate_phi: samples must be >= 10");
    }
    const UnitScalar one(Complex(1.0, 0.0));
    const Element zero(dim);

    auto ratio = [&](const Element& a, const Element& b, const Element& c) {
        const double na = op_norm(a);
        const double nb = op_norm(b);
        const double nc = op_norm(c);
        double residual = residual_eq_2_8(f, a, b, c, one);
        if (residual <= 1e-13 * (1.0 + std::max({na, nb, nc}))) {
            residual = 0.0;
        }
        const double w = templ.weight(na, nb, nc);
        if (residual == 0.0) {
            return 0.0;
        }
        if (w == 0.0) {
            throw CalibrationFailure(
                "calibrate_phi: nonzero residual where the control weight vanishes");
        }
        return residual / w;
    };

    double theta = 0.0;
    const int span = options.sweep_span;
    for (int s = 0; s < options.samples; ++s) {
        const auto k = static_cast<std::uint64_t>(s);
        const Element a = random_element(options.seed + 3 * k, dim, options.norm_cap);
        const Element b = random_element(options.seed + 3 * k + 1, dim, options.norm_cap);
        const Element c = random_element(options.seed + 3 * k + 2, dim, options.norm_cap);
        theta = std::max(theta, ratio(a, b, c));

        std::vector<double> sweep;
        for (int j = -span; j <= span; ++j) {
            const double s3 = std::pow(3.0, j);
            const Element aj = scale(s3, a);
            sweep.push_back(ratio(aj, scale(2.0, aj), zero));
        }
        const auto centre = static_cast<std::size_t>(span);
        const double mid = sweep[centre];
        const double peak = *std::max_element(sweep.begin(), sweep.end());
        const bool at_end = peak == sweep.front() || peak == sweep.back();
        if (span > 0 && peak > 0.0 && at_end && peak >= 2.0 * mid) {
            throw CalibrationFailure(
                "calibrate_phi: residual/phi ratio grows along the (a, 2a, 0) scale sweep; "
                "the control exponents do not dominate the defect");
        }
        theta = std::max(theta, peak);
    }
    BoundSpec out = templ;
    out.theta = theta;
    return out;
}

CheckReport verify_uniqueness(const MapFn& f, std::size_t dim, const StabilizerConfig& cfg,
                              const SamplingSpec& sampling, std::optional<double> hint,
                              std::optional<double> accept_tol) {
    CheckAccumulator acc("uniqueness (depth and scale)", accept_tol.value_or(cfg.tol));
    StabilizerConfig deep = cfg;
    deep.max_iter = 2 * cfg.max_iter;
    deep.tol = cfg.tol / 100.0;
    const Element zero(dim);

    auto checked = [](StabilizationResult r) {
        if (r.status == StabilizationStatus::Diverged) {
            throw StabilizationDiverged("verify_uniqueness: stabilization diverged");
        }
        return r;
    };

    for (int s = 0; s < sampling.samples; ++s) {
        const Element a =
            random_element(sampling.seed + static_cast<std::uint64_t>(s), dim, sampling.norm_cap);
        const auto base = checked(stabilize_point(f, a, cfg, hint));
        const auto deeper = checked(stabilize_point(f, a, deep, hint));
        const auto shifted = checked(stabilize_point(f, scale(3.0, a), cfg, hint));
        const double scale_a = 1.0 + op_norm(a);
        if (!base.converged() || !shifted.converged()) {
            acc.add(std::numeric_limits<double>::infinity(), 0.0, scale_a,
                    Witness{a, zero, zero, std::nullopt});
            continue;
        }
        const double depth_gap = op_norm(deeper.last_iterate - base.last_iterate);
        const double scale_gap = op_norm(divide(shifted.last_iterate, 3.0) - base.last_iterate);
        acc.add(std::max(depth_gap, scale_gap), 0.0, scale_a, Witness{a, zero, zero, std::nullopt});
    }
    return acc.finish();
}

}  // namespace stablab
