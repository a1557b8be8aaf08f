#pragma once

// Direct-method stabilization. Forward iterates h_n(a) = 3^n f(a / 3^n),
// Backward iterates h_n(a) = 3^-n f(3^n a); both stop on the Cauchy residual
// |h_{n+1}(a) - h_n(a)|. Also the control-function bounds: closed forms for the
// power, psi and constant controls and the truncated series they sum.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stablab/algebra.hpp"
#include "stablab/checkers.hpp"
#include "stablab/mappings.hpp"

namespace stablab {

enum class Direction { Forward, Backward, Auto };

std::string to_string(Direction d);

struct StabilizerConfig {
    int max_iter = 64;
    double tol = 1e-10;
    Direction direction = Direction::Auto;

    void validate() const;
};

enum class StabilizationStatus { Converged, Diverged, NotConverged };

std::string to_string(StabilizationStatus s);

class StabilizationDiverged : public std::runtime_error {
public:
    explicit StabilizationDiverged(const std::string& what) : std::runtime_error(what) {}
};

struct StabilizationResult {
    StabilizationStatus status = StabilizationStatus::NotConverged;
    Direction direction = Direction::Forward;  ///< the direction actually iterated
    int iterations_used = 0;
    std::vector<double> cauchy_residuals;  ///< residual of step n at index n-1
    Element last_iterate;
    std::optional<double> certified_bound;

    [[nodiscard]] bool converged() const noexcept {
        return status == StabilizationStatus::Converged;
    }
    /// h(a). Throws std::logic_error unless converged().
    [[nodiscard]] const Element& limit() const;
};

/// Iterates until the Cauchy residual is at most tol * (1 + |a|), the
/// divergence detector fires (5 consecutive residual increases with the last
/// residual above the first) or max_iter steps are used.
///
/// Auto uses `exponent_hint` when present: Forward for > 1, Backward for < 1.
/// Otherwise it probes Forward, then Backward, and keeps the first that
/// converges.
StabilizationResult stabilize_point(const MapFn& f, const Element& a, const StabilizerConfig& cfg,
                                    std::optional<double> exponent_hint = std::nullopt);

/// Uses the perturbation exponent of `f` as the Auto hint.
StabilizationResult stabilize_point(const MapSpec& f, const Element& a,
                                    const StabilizerConfig& cfg);

/// Exponent hint of a catalog map: the perturbation exponent, if any.
std::optional<double> exponent_hint(const MapSpec& f);

/// x -> h(x). Throws StabilizationDiverged on divergence and std::runtime_error
/// when the iteration cap is reached.
MapFn limit_map(const MapFn& f, const StabilizerConfig& cfg,
                std::optional<double> exponent_hint = std::nullopt);

// ---------------------------------------------------------------------------
// Control functions and bounds

enum class BoundKind { Power, Psi, Constant };

std::string to_string(BoundKind k);

class IncompatibleBound : public std::invalid_argument {
public:
    explicit IncompatibleBound(const std::string& what) : std::invalid_argument(what) {}
};

/// phi(a,b,c) = theta (w1(|a|) + w2(|b|) + w3(|c|)) with
///   Power:    w_k(t) = t^{p_k}, and 0^p = 0 for every p (including p = 0)
///   Psi:      w_k(t) = psi(t) = t^q
///   Constant: w_k(t) = [t != 0], the Power control at p = 0.
struct BoundSpec {
    BoundKind kind = BoundKind::Constant;
    double theta = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double p3 = 0.0;
    double q = 2.0;  ///< psi profile exponent

    static BoundSpec power(double theta, double p1, double p2, double p3);
    static BoundSpec psi_power(double theta, double q);
    static BoundSpec constant(double theta);

    [[nodiscard]] double psi(double t) const;
    /// theta-free weight sum w1(na) + w2(nb) + w3(nc).
    [[nodiscard]] double weight(double norm_a, double norm_b, double norm_c) const;
    [[nodiscard]] double phi_norms(double norm_a, double norm_b, double norm_c) const {
        return theta * weight(norm_a, norm_b, norm_c);
    }
    [[nodiscard]] double phi(const Element& a, const Element& b, const Element& c) const;

    /// Throws IncompatibleBound naming the violated convergence condition.
    void require_compatible(Direction d) const;
    [[nodiscard]] bool compatible(Direction d) const;
};

using PhiFn = std::function<double(const Element&, const Element&, const Element&)>;

struct SeriesBound {
    double value = 0.0;
    double tail_estimate = 0.0;  ///< +infinity when the empirical ratio is >= 1
};

/// Forward: sum_{i=0}^{terms-1} 3^i phi(a/3^i, 2a/3^i, 0).
/// Backward: sum_{i=1}^{terms} 3^-i phi(3^i a, 2 3^i a, 0).
/// The tail estimate is geometric in the ratio of the last two terms.
SeriesBound bound_series_truncated(const PhiFn& phi, const Element& a, Direction direction,
                                   int terms);

/// Closed forms of the series bound for each control kind. Backward psi uses
/// theta (1 + psi(2)) psi(|a|) / (1 - psi(3)/3), which dominates the series.
double bound_closed_form(const BoundSpec& spec, double norm_a, Direction direction);

class CalibrationFailure : public std::runtime_error {
public:
    explicit CalibrationFailure(const std::string& what) : std::runtime_error(what) {}
};

struct CalibrationOptions {
    std::uint64_t seed = 0;
    int samples = 200;
    double norm_cap = 10.0;
    int sweep_span = 8;  ///< substitution sweep over scales 3^k, |k| <= sweep_span
};

/// Fits theta so that phi dominates the mu = 1 Jordan-coupled residual on
///   * random triples (a, b, c) with norms up to norm_cap, and
///   * the substitution (a, 2a, 0) at scales 3^k a, |k| <= sweep_span,
/// the latter being the only arguments the series bounds evaluate phi at.
/// Residuals at rounding level (<= 1e-13 (1 + |args|)) count as zero; 0/0
/// counts as 0. Throws CalibrationFailure when a residual is positive where the
/// weight vanishes, or when the substitution ratio grows towards an end of the
/// scale sweep (unbounded ratio).
BoundSpec calibrate_phi(const MapFn& f, std::size_t dim, const BoundSpec& templ,
                        const CalibrationOptions& options);

/// Runs each sample at (max_iter, tol), at (2 max_iter, tol / 100), and at 3a
/// rescaled by 1/3; reports the largest discrepancy against the first run.
/// Satisfied iff every discrepancy is at most tol * (1 + |a|) (or `accept_tol`
/// when given). Throws StabilizationDiverged when any run diverges.
CheckReport verify_uniqueness(const MapFn& f, std::size_t dim, const StabilizerConfig& cfg,
                              const SamplingSpec& sampling,
                              std::optional<double> exponent_hint = std::nullopt,
                              std::optional<double> accept_tol = std::nullopt);

}  // namespace stablab
