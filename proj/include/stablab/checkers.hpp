#pragma once

// Residual functionals for the three-term inequality and its mu-twisted and
// Jordan-coupled variants, the additivity derivation steps, and the
// superstability decay sequence.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stablab/algebra.hpp"
#include "stablab/mappings.hpp"

namespace stablab {

enum class Verdict { Satisfied, Violated, Vacuous };

std::string to_string(Verdict v);

struct Witness {
    Element a;
    Element b;
    Element c;
    std::optional<Complex> mu;
};

/// Sampled check outcome. `worst_slack` is min over samples of (rhs - lhs);
/// for residual checks rhs is 0, so it equals -max_residual.
struct CheckReport {
    std::string name;
    double max_residual = 0.0;
    double worst_slack = 0.0;
    int num_samples = 0;
    std::optional<Witness> worst_witness;
    Verdict verdict = Verdict::Vacuous;
};

/// Accumulates per-sample (lhs, rhs) pairs into a CheckReport. A sample is a
/// violation when lhs - rhs > tol * scale.
class CheckAccumulator {
public:
    CheckAccumulator(std::string name, double tol) : name_(std::move(name)), tol_(tol) {}

    void add(double lhs, double rhs, double scale, const Witness& witness);
    [[nodiscard]] CheckReport finish() const;

private:
    std::string name_;
    double tol_;
    CheckReport report_{};
    double worst_excess_ = -std::numeric_limits<double>::infinity();
    bool violated_ = false;
};

struct InequalitySides {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// lhs = |f((b-a)/3) + f((a-3c)/3) + f((3a+3c-b)/3)|, rhs = |f(a)|.
InequalitySides residual_ineq_2_1(const MapFn& f, const Element& a, const Element& b,
                                  const Element& c);

/// lhs = |f((b-a)/3) + f((a-3 mu c)/3) + mu f((3a+3c-b)/3)|, rhs = |f(a)|.
/// At mu = 1 this is bitwise the mu-free form.
InequalitySides residual_ineq_2_2(const MapFn& f, const Element& a, const Element& b,
                                  const Element& c, UnitScalar mu);

/// |f((mu b - a)/3) + f((a-3c)/3) + mu f((3a-b)/3 + c) - f(a) + f(c^2) - f(c)^2|.
double residual_eq_2_8(const MapFn& f, const Element& a, const Element& b, const Element& c,
                       UnitScalar mu);

/// |f(a^2) - f(a)^2|
double residual_defect_jordan(const MapFn& f, const Element& a);

/// |f(a*) - f(a)*|
double residual_defect_star(const MapFn& f, const Element& a);

struct SamplingSpec {
    std::uint64_t seed = 0;
    int samples = 1000;
    double norm_cap = 10.0;
};

/// Additivity derivation, one report per step in order: f(0)=0, oddness,
/// doubling, tripling, the three-term identity f(b/3)+f(-c)+f(c-b/3)=0, and
/// full additivity f(s+t)=f(s)+f(t). Sample k uses seeds seed+3k, +3k+1, +3k+2.
std::vector<CheckReport> lemma_2_1_steps(const MapFn& f, std::size_t dim,
                                         const SamplingSpec& sampling, double tol);

/// Telescoping equality: lhs == rhs of residual_ineq_2_1 on random triples.
CheckReport telescoping_check(const MapFn& f, std::size_t dim, const SamplingSpec& sampling,
                              double tol);

/// Jordan and star defects on random samples, as two reports.
std::vector<CheckReport> defect_checks(const MapFn& f, std::size_t dim,
                                       const SamplingSpec& sampling, double tol);

/// The mu-twisted inequality at the substitution a = b = 0 over the full mu grid.
CheckReport mu_substitution_check(const MapFn& f, std::size_t dim, const SamplingSpec& sampling,
                                  const MuGrid& grid, double tol);

/// Full mu-grid sweep of the Jordan-coupled residual on random triples. Reported with
/// verdict Vacuous: the value does not vanish for exact maps at mu != 1.
CheckReport mu_sweep_report(const MapFn& f, std::size_t dim, const SamplingSpec& sampling,
                            const MuGrid& grid);

class DecayOverflow : public std::runtime_error {
public:
    explicit DecayOverflow(const std::string& what) : std::runtime_error(what) {}
};

enum class DecayScaling {
    Up,    ///< d_n = n^-2 |f(n^2 a^2) - f(n a)^2|       (exponent p < 1)
    Down,  ///< d_n = n^2  |f(a^2 / n^2) - f(a / n)^2|   (exponent p > 1)
};

inline constexpr double kDecayOverflowNorm = 1e100;

/// Returns d_1 .. d_{n_max} verbatim. Throws DecayOverflow when |n^2 a^2|
/// exceeds 1e100 and std::invalid_argument when n_max < 2.
std::vector<double> superstability_decay(const MapFn& f, const Element& a, int n_max,
                                         DecayScaling scaling = DecayScaling::Up);

/// Least-squares slope of log d_n against log n over n in [n_from, n_to].
/// Zero entries make the slope -infinity.
double loglog_slope(const std::vector<double>& d, int n_from, int n_to);

}  // namespace stablab
