#include "stablab/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stablab {

Element PerturbationSpec::defect(const Element& a) const {
    const std::size_t n = a.dim();
    const bool zero_arg = a.is_zero();
    double magnitude = 0.0;
    switch (mode) {
        case PerturbationMode::PowerNorm:
            magnitude = zero_arg ? 0.0 : theta * std::pow(op_norm(a), p);
            break;
        case PerturbationMode::Constant:
            magnitude = zero_arg ? 0.0 : theta;
            break;
        case PerturbationMode::Affine:
            magnitude = theta;
            break;
    }
    if (magnitude == 0.0) {
        return Element(n);
    }
    Complex phase{1.0, 0.0};
    if (field == DirectionField::TracePhase) {
        const Complex tr = a.trace();
        const double abs_tr = std::abs(tr);
        if (abs_tr == 0.0) {
            return Element(n);
        }
        phase = tr / abs_tr;
    }
    return scale(magnitude * phase, direction);
}

double PerturbationSpec::exponent() const {
    return mode == PerturbationMode::PowerNorm ? p : 0.0;
}

std::string to_string(MapKind kind) {
    switch (kind) {
        case MapKind::Identity: return "identity";
        case MapKind::Transpose: return "transpose";
        case MapKind::UnitaryConjugation: return "unitary_conjugation";
        case MapKind::Negation: return "negation";
        case MapKind::Zero: return "zero";
        case MapKind::Perturbed: return "perturbed";
    }
    return "unknown";
}

std::string to_string(PerturbationMode mode) {
    switch (mode) {
        case PerturbationMode::PowerNorm: return "power_norm";
        case PerturbationMode::Constant: return "constant";
        case PerturbationMode::Affine: return "affine";
    }
    return "unknown";
}

std::string to_string(DirectionField field) {
    return field == DirectionField::Fixed ? "fixed" : "trace_phase";
}

MapSpec MapSpec::identity(std::size_t dim) { return MapSpec(MapKind::Identity, dim); }
MapSpec MapSpec::transpose(std::size_t dim) { return MapSpec(MapKind::Transpose, dim); }
MapSpec MapSpec::negation(std::size_t dim) { return MapSpec(MapKind::Negation, dim); }
MapSpec MapSpec::zero(std::size_t dim) { return MapSpec(MapKind::Zero, dim); }

MapSpec MapSpec::unitary_conjugation(Element u) {
    const std::size_t n = u.dim();
    const double defect = op_norm(mul(involution(u), u) - Element::identity(n));
    if (defect > 1e-10) {
        throw std::invalid_argument("unitary_conjugation: |u*u - I| = " + std::to_string(defect));
    }
    MapSpec m(MapKind::UnitaryConjugation, n);
    m.unitary_ = std::move(u);
    return m;
}

MapSpec MapSpec::perturbed(const MapSpec& base, PerturbationSpec perturbation) {
    if (base.kind() == MapKind::Perturbed) {
        throw std::invalid_argument("perturbed: base must be an exact map");
    }
    if (perturbation.direction.dim() != base.domain_dim()) {
        throw DimensionMismatch(perturbation.direction.dim(), base.domain_dim());
    }
    if (!(perturbation.theta >= 0.0) || !std::isfinite(perturbation.theta)) {
        throw std::invalid_argument("perturbed: theta must be finite and >= 0");
    }
    if (op_norm(perturbation.direction) > 1.0 + 1e-12) {
        throw std::invalid_argument("perturbed: direction must have operator norm <= 1");
    }
    MapSpec m(MapKind::Perturbed, base.domain_dim());
    m.base_ = std::make_shared<const MapSpec>(base);
    m.perturbation_ = std::move(perturbation);
    return m;
}

const MapSpec& MapSpec::base() const {
    if (!base_) {
        throw std::logic_error("MapSpec::base: not a perturbed map");
    }
    return *base_;
}

Element MapSpec::evaluate(const Element& a) const {
    if (a.dim() != dim_) {
        throw DimensionMismatch(a.dim(), dim_);
    }
    switch (kind_) {
        case MapKind::Identity: return a;
        case MapKind::Transpose: return stablab::transpose(a);
        case MapKind::UnitaryConjugation: return mul(mul(unitary_, a), involution(unitary_));
        case MapKind::Negation: return stablab::neg(a);
        case MapKind::Zero: return Element(dim_);
        case MapKind::Perturbed: return add(base_->evaluate(a), perturbation_->defect(a));
    }
    throw std::logic_error("MapSpec::evaluate: unknown kind");
}

MapFn MapSpec::as_function() const {
    return [self = *this](const Element& a) { return self.evaluate(a); };
}

MuGrid::MuGrid(std::size_t k) {
    values_.emplace_back(Complex(1.0, 0.0));
    values_.emplace_back(Complex(-1.0, 0.0));
    values_.emplace_back(Complex(0.0, 1.0));
    values_.emplace_back(Complex(0.0, -1.0));
    for (std::size_t j = 0; j < k; ++j) {
        const double phase =
            2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(k);
        values_.push_back(UnitScalar::from_phase(phase));
    }
}

namespace {

void consider(JordanStarVerdict& v, double& slot, const char* property, double residual,
              double limit, const Element& a, const Element& b, Complex mu) {
    slot = std::max(slot, residual);
    if (residual > limit) {
        const double excess = residual / limit;
        if (!v.witness || excess > v.witness->residual / limit) {
            v.witness = JordanStarWitness{property, a, b, mu, residual};
        }
        v.exact = false;
    }
}

}  // namespace

JordanStarVerdict is_exact_jordan_star(const MapFn& f, std::size_t dim, int samples,
                                       std::uint64_t seed, double tol, double norm_cap,
                                       const MuGrid& grid) {
    if (samples < 1) {
        throw std::invalid_argument("is_exact_jordan_star: samples must be >= 1");
    }
    JordanStarVerdict v;
    for (int s = 0; s < samples; ++s) {
        const auto k = static_cast<std::uint64_t>(s);
        const Element a = random_element(seed + 2 * k, dim, norm_cap);
        const Element b = random_element(seed + 2 * k + 1, dim, norm_cap);
        const double scale_ab = 1.0 + std::max(op_norm(a), op_norm(b));
        const double limit = tol * scale_ab;
        const Element fa = f(a);

        const double jordan = op_norm(f(mul(a, a)) - mul(fa, fa));
        consider(v, v.max_jordan, "jordan", jordan, limit, a, b, 1.0);

        const double star = op_norm(f(involution(a)) - involution(fa));
        consider(v, v.max_star, "star", star, limit, a, b, 1.0);

        const double additive = op_norm(f(add(a, b)) - fa - f(b));
        consider(v, v.max_additive, "additive", additive, limit, a, b, 1.0);

        for (const auto& mu : grid.values()) {
            const double hom = op_norm(f(scale(mu.value(), a)) - scale(mu.value(), fa));
            consider(v, v.max_homogeneous, "homogeneous", hom, limit, a, b, mu.value());
        }
    }
    return v;
}

JordanStarVerdict is_exact_jordan_star(const MapSpec& f, int samples, std::uint64_t seed,
                                       double tol, double norm_cap, const MuGrid& grid) {
    return is_exact_jordan_star(f.as_function(), f.domain_dim(), samples, seed, tol, norm_cap,
                                grid);
}

}  // namespace stablab
