#include "stablab/checkers.hpp"

#include <algorithm>
#include <cmath>

namespace stablab {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return "satisfied";
        case Verdict::Violated: return "violated";
        case Verdict::Vacuous: return "vacuous";
    }
    return "unknown";
}

void CheckAccumulator::add(double lhs, double rhs, double scale, const Witness& witness) {
    const double excess = (lhs - rhs) / scale;
    report_.max_residual = std::max(report_.max_residual, std::max(lhs - rhs, 0.0));
    if (report_.num_samples == 0) {
        report_.worst_slack = rhs - lhs;
    } else {
        report_.worst_slack = std::min(report_.worst_slack, rhs - lhs);
    }
    ++report_.num_samples;
    // Ties keep the earliest sample so reports do not depend on evaluation order
    // beyond the sample index.
    if (excess > worst_excess_) {
        worst_excess_ = excess;
        report_.worst_witness = witness;
    }
    if (lhs - rhs > tol_ * scale) {
        violated_ = true;
    }
}

CheckReport CheckAccumulator::finish() const {
    CheckReport r = report_;
    r.name = name_;
    if (r.num_samples == 0) {
        r.verdict = Verdict::Vacuous;
    } else {
        r.verdict = violated_ ? Verdict::Violated : Verdict::Satisfied;
    }
    return r;
}

namespace {

constexpr double kThird = 1.0 / 3.0;

double input_scale(std::initializer_list<const Element*> xs) {
    double m = 0.0;
    for (const Element* x : xs) {
        m = std::max(m, op_norm(*x));
    }
    return 1.0 + m;
}

Element third(const Element& x) { return divide(x, 3.0); }

// The shared core of the plain and mu-twisted inequalities; mu == nullopt skips every mu product.
InequalitySides three_term(const MapFn& f, const Element& a, const Element& b, const Element& c,
                           std::optional<Complex> mu) {
    const Element c3 = scale(3.0, c);
    const Element mu_c3 = mu ? scale(*mu, c3) : c3;
    const Element first = f(third(b - a));
    const Element second = f(third(a - mu_c3));
    const Element inner = f(third(scale(3.0, a) + c3 - b));
    const Element third_term = mu ? scale(*mu, inner) : inner;
    return {op_norm(first + second + third_term), op_norm(f(a))};
}

}  // namespace

InequalitySides residual_ineq_2_1(const MapFn& f, const Element& a, const Element& b,
                                  const Element& c) {
    return three_term(f, a, b, c, std::nullopt);
}

InequalitySides residual_ineq_2_2(const MapFn& f, const Element& a, const Element& b,
                                  const Element& c, UnitScalar mu) {
    if (mu.is_one()) {
        return three_term(f, a, b, c, std::nullopt);
    }
    return three_term(f, a, b, c, mu.value());
}

double residual_eq_2_8(const MapFn& f, const Element& a, const Element& b, const Element& c,
                       UnitScalar mu) {
    const Complex m = mu.value();
    const Element fc = f(c);
    // (3a - b)/3 + c is the same argument as (3a + 3c - b)/3.
    const Element sum = f(third(scale(m, b) - a)) + f(third(a - scale(3.0, c))) +
                        scale(m, f(third(scale(3.0, a) - b) + c)) - f(a) + f(mul(c, c)) -
                        mul(fc, fc);
    return op_norm(sum);
}

double residual_defect_jordan(const MapFn& f, const Element& a) {
    const Element fa = f(a);
    return op_norm(f(mul(a, a)) - mul(fa, fa));
}

double residual_defect_star(const MapFn& f, const Element& a) {
    return op_norm(f(involution(a)) - involution(f(a)));
}

std::vector<CheckReport> lemma_2_1_steps(const MapFn& f, std::size_t dim,
                                         const SamplingSpec& sampling, double tol) {
    if (sampling.samples < 1) {
        throw std::invalid_argument("lemma_2_1_steps: samples must be >= 1");
    }
    const Element zero(dim);
    std::vector<CheckReport> out;

    {
        CheckAccumulator acc("f(0)=0", tol);
        acc.add(op_norm(f(zero)), 0.0, 1.0, Witness{zero, zero, zero, std::nullopt});
        out.push_back(acc.finish());
    }

    CheckAccumulator odd("oddness f(-c)=-f(c)", tol);
    CheckAccumulator twice("doubling f(2c)=2f(c)", tol);
    CheckAccumulator thrice("tripling f(3c)=3f(c)", tol);
    CheckAccumulator identity("three-term f(b/3)+f(-c)+f(c-b/3)=0", tol);
    CheckAccumulator additive("additivity f(s+t)=f(s)+f(t)", tol);

    for (int s = 0; s < sampling.samples; ++s) {
        const auto k = static_cast<std::uint64_t>(s);
        const Element c = random_element(sampling.seed + 3 * k, dim, sampling.norm_cap);
        const Element b = random_element(sampling.seed + 3 * k + 1, dim, sampling.norm_cap);
        const Element t = random_element(sampling.seed + 3 * k + 2, dim, sampling.norm_cap);
        const Element fc = f(c);
        const double sc = input_scale({&c});
        const double sbc = input_scale({&b, &c});
        const double sct = input_scale({&c, &t});

        odd.add(op_norm(f(neg(c)) + fc), 0.0, sc, Witness{zero, zero, c, std::nullopt});
        twice.add(op_norm(f(scale(2.0, c)) - scale(2.0, fc)), 0.0, sc,
                  Witness{zero, scale(6.0, c), c, std::nullopt});
        thrice.add(op_norm(f(scale(3.0, c)) - scale(3.0, fc)), 0.0, sc,
                   Witness{zero, scale(9.0, c), c, std::nullopt});
        const Element b3 = third(b);
        identity.add(op_norm(f(b3) + f(neg(c)) + f(c - b3)), 0.0, sbc,
                     Witness{zero, b, c, std::nullopt});
        additive.add(op_norm(f(c + t) - fc - f(t)), 0.0, sct, Witness{c, t, zero, std::nullopt});
    }
    out.push_back(odd.finish());
    out.push_back(twice.finish());
    out.push_back(thrice.finish());
    out.push_back(identity.finish());
    out.push_back(additive.finish());
    return out;
}

CheckReport telescoping_check(const MapFn& f, std::size_t dim, const SamplingSpec& sampling,
                              double tol) {
    // Equality check: record |lhs - rhs| as the lhs of a residual.
    CheckAccumulator acc("telescoping |three-term| = |f(a)|", tol);
    for (int s = 0; s < sampling.samples; ++s) {
        const auto k = static_cast<std::uint64_t>(s);
        const Element a = random_element(sampling.seed + 3 * k, dim, sampling.norm_cap);
        const Element b = random_element(sampling.seed + 3 * k + 1, dim, sampling.norm_cap);
        const Element c = random_element(sampling.seed + 3 * k + 2, dim, sampling.norm_cap);
        const auto sides = residual_ineq_2_1(f, a, b, c);
        acc.add(std::abs(sides.lhs - sides.rhs), 0.0, input_scale({&a, &b, &c}),
                Witness{a, b, c, std::nullopt});
    }
    return acc.finish();
}

std::vector<CheckReport> defect_checks(const MapFn& f, std::size_t dim,
                                       const SamplingSpec& sampling, double tol) {
    CheckAccumulator jordan("jordan defect f(a^2)=f(a)^2", tol);
    CheckAccumulator star("star defect f(a*)=f(a)*", tol);
    const Element zero(dim);
    for (int s = 0; s < sampling.samples; ++s) {
        const Element a =
            random_element(sampling.seed + static_cast<std::uint64_t>(s), dim, sampling.norm_cap);
        const double sa = input_scale({&a});
        const Witness w{a, zero, zero, std::nullopt};
        jordan.add(residual_defect_jordan(f, a), 0.0, sa, w);
        star.add(residual_defect_star(f, a), 0.0, sa, w);
    }
    return {jordan.finish(), star.finish()};
}

CheckReport mu_substitution_check(const MapFn& f, std::size_t dim, const SamplingSpec& sampling,
                                  const MuGrid& grid, double tol) {
    CheckAccumulator acc("mu-substitution a=b=0: |f(-mu c)+mu f(c)| <= |f(0)|", tol);
    const Element zero(dim);
    for (int s = 0; s < sampling.samples; ++s) {
        const Element c =
            random_element(sampling.seed + static_cast<std::uint64_t>(s), dim, sampling.norm_cap);
        const double sc = input_scale({&c});
        for (const auto& mu : grid.values()) {
            const auto sides = residual_ineq_2_2(f, zero, zero, c, mu);
            acc.add(sides.lhs, sides.rhs, sc, Witness{zero, zero, c, mu.value()});
        }
    }
    return acc.finish();
}

CheckReport mu_sweep_report(const MapFn& f, std::size_t dim, const SamplingSpec& sampling,
                            const MuGrid& grid) {
    CheckAccumulator acc("mu-sweep of the Jordan-coupled residual, reported only",
                         std::numeric_limits<double>::infinity());
    for (int s = 0; s < sampling.samples; ++s) {
        const auto k = static_cast<std::uint64_t>(s);
        const Element a = random_element(sampling.seed + 3 * k, dim, sampling.norm_cap);
        const Element b = random_element(sampling.seed + 3 * k + 1, dim, sampling.norm_cap);
        const Element c = random_element(sampling.seed + 3 * k + 2, dim, sampling.norm_cap);
        const double sabc = input_scale({&a, &b, &c});
        for (const auto& mu : grid.values()) {
            acc.add(residual_eq_2_8(f, a, b, c, mu), 0.0, sabc, Witness{a, b, c, mu.value()});
        }
    }
    CheckReport r = acc.finish();
    r.verdict = Verdict::Vacuous;
    return r;
}

std::vector<double> superstability_decay(const MapFn& f, const Element& a, int n_max,
                                         DecayScaling scaling) {
    if (n_max < 2) {
        throw std::invalid_argument("superstability_decay: n_max must be >= 2");
    }
    const Element a2 = mul(a, a);
    const double a2_norm = op_norm(a2);
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const double nn = static_cast<double>(n);
        if (scaling == DecayScaling::Up) {
            if (nn * nn * a2_norm > kDecayOverflowNorm) {
                throw DecayOverflow("superstability_decay: |n^2 a^2| exceeds 1e100 at n = " +
                                    std::to_string(n));
            }
            const Element fna = f(scale(nn, a));
            d.push_back(op_norm(f(scale(nn * nn, a2)) - mul(fna, fna)) / (nn * nn));
        } else {
            const Element fna = f(divide(a, nn));
            d.push_back(op_norm(f(divide(a2, nn * nn)) - mul(fna, fna)) * (nn * nn));
        }
    }
    return d;
}

double loglog_slope(const std::vector<double>& d, int n_from, int n_to) {
    if (n_from < 1 || n_to > static_cast<int>(d.size()) || n_to <= n_from) {
        throw std::invalid_argument("loglog_slope: bad index range");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(n_to - n_from + 1);
    for (int n = n_from; n <= n_to; ++n) {
        const double value = d[static_cast<std::size_t>(n - 1)];
        if (!(value > 0.0)) {
            return -std::numeric_limits<double>::infinity();
        }
        const double x = std::log(static_cast<double>(n));
        const double y = std::log(value);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace stablab
