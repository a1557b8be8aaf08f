#pragma once

// Catalog of finitely described maps f: A -> B between matrix algebras of the
// same dimension: exact Jordan *-homomorphisms and controlled perturbations.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stablab/algebra.hpp"

namespace stablab {

/// Pointwise evaluation x -> f(x). Checkers and the stabilizer work on this so
/// that recovered limit maps can be checked like catalog maps.
using MapFn = std::function<Element(const Element&)>;

enum class PerturbationMode {
    PowerNorm,  ///< eps(a) = theta * |a|^p * D(a),  eps(0) = 0
    Constant,   ///< eps(a) = theta * D(a) for a != 0,  eps(0) = 0
    Affine,     ///< eps(a) = theta * D(a) for every a (f(0) != 0 counterexample)
};

enum class DirectionField {
    Fixed,       ///< D(a) = direction
    TracePhase,  ///< D(a) = direction * tr(a)/|tr(a)|, 0 when tr(a) = 0 (odd in a)
};

struct PerturbationSpec {
    double theta = 0.0;
    double p = 1.0;
    Element direction;
    PerturbationMode mode = PerturbationMode::PowerNorm;
    DirectionField field = DirectionField::Fixed;

    /// The additive defect eps(a).
    [[nodiscard]] Element defect(const Element& a) const;

    /// Growth exponent of |eps(a)| in |a|: p for PowerNorm, 0 otherwise.
    [[nodiscard]] double exponent() const;
};

enum class MapKind { Identity, Transpose, UnitaryConjugation, Negation, Zero, Perturbed };

std::string to_string(MapKind kind);
std::string to_string(PerturbationMode mode);
std::string to_string(DirectionField field);

class MapSpec {
public:
    static MapSpec identity(std::size_t dim);
    static MapSpec transpose(std::size_t dim);
    /// a -> u a u*. Throws unless |u*u - I| <= 1e-10.
    static MapSpec unitary_conjugation(Element u);
    /// a -> -a. C-linear and *-preserving, but not Jordan: a negative control.
    static MapSpec negation(std::size_t dim);
    static MapSpec zero(std::size_t dim);
    /// base + eps. Throws if base is itself perturbed, the direction does not
    /// match the dimension, or |direction| > 1.
    static MapSpec perturbed(const MapSpec& base, PerturbationSpec perturbation);

    [[nodiscard]] MapKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t domain_dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t codomain_dim() const noexcept { return dim_; }
    [[nodiscard]] const Element& unitary() const { return unitary_; }
    /// Only for kind() == Perturbed.
    [[nodiscard]] const MapSpec& base() const;
    [[nodiscard]] const std::optional<PerturbationSpec>& perturbation() const noexcept {
        return perturbation_;
    }

    /// Throws DimensionMismatch when a.dim() != domain_dim().
    [[nodiscard]] Element evaluate(const Element& a) const;
    [[nodiscard]] MapFn as_function() const;

private:
    MapSpec(MapKind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

    MapKind kind_;
    std::size_t dim_;
    Element unitary_;
    std::shared_ptr<const MapSpec> base_;
    std::optional<PerturbationSpec> perturbation_;
};

inline Element evaluate(const MapSpec& f, const Element& a) { return f.evaluate(a); }

/// Grid of unit scalars: 1, -1, i, -i followed by `k` equally spaced phases
/// exp(2 pi i (j + 1/2) / k). The half-step offset keeps the scalar 1 unique.
class MuGrid {
public:
    static constexpr std::size_t kDefaultPhases = 16;

    explicit MuGrid(std::size_t k = kDefaultPhases);

    [[nodiscard]] const std::vector<UnitScalar>& values() const noexcept { return values_; }

private:
    std::vector<UnitScalar> values_;
};

struct JordanStarWitness {
    std::string property;  ///< "jordan", "star", "additive" or "homogeneous"
    Element a;
    Element b;
    Complex mu{1.0, 0.0};
    double residual = 0.0;
};

struct JordanStarVerdict {
    bool exact = true;
    double max_jordan = 0.0;
    double max_star = 0.0;
    double max_additive = 0.0;
    double max_homogeneous = 0.0;
    std::optional<JordanStarWitness> witness;  ///< worst violation when !exact
};

/// Samples a, b with random_element(seed + k, dim, norm_cap) and checks
/// |f(a^2) - f(a)^2|, |f(a*) - f(a)*|, |f(a+b) - f(a) - f(b)| and
/// |f(mu a) - mu f(a)| over the mu grid against tol * (1 + |a| + |b|).
JordanStarVerdict is_exact_jordan_star(const MapFn& f, std::size_t dim, int samples,
                                       std::uint64_t seed, double tol, double norm_cap = 10.0,
                                       const MuGrid& grid = MuGrid{});
JordanStarVerdict is_exact_jordan_star(const MapSpec& f, int samples, std::uint64_t seed,
                                       double tol, double norm_cap = 10.0,
                                       const MuGrid& grid = MuGrid{});

}  // namespace stablab
