#pragma once

// Finite-dimensional C*-algebra arithmetic: dim x dim complex matrices with
// the conjugate-transpose involution and the operator (spectral) norm.

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stablab {

using Complex = std::complex<double>;

class DimensionMismatch : public std::invalid_argument {
public:
    DimensionMismatch(std::size_t lhs, std::size_t rhs);
};

/// Raised when the spectral-norm power iteration exhausts its iteration cap.
class NormNotConverged : public std::runtime_error {
public:
    explicit NormNotConverged(const std::string& what) : std::runtime_error(what) {}
};

/// A square complex matrix, row-major. All entries are finite.
class Element {
public:
    Element() = default;

    /// Zero matrix of side `dim`.
    explicit Element(std::size_t dim);

    /// Takes ownership of `entries`; throws if the size is not dim*dim or an
    /// entry is not finite.
    Element(std::size_t dim, std::vector<Complex> entries);

    /// Row-by-row literal, e.g. Element{{1, 0}, {0, 1}}.
    Element(std::initializer_list<std::initializer_list<Complex>> rows);

    static Element zero(std::size_t dim) { return Element(dim); }
    static Element identity(std::size_t dim);
    /// Matrix unit e_{row,col}.
    static Element unit(std::size_t dim, std::size_t row, std::size_t col);
    static Element diagonal(std::span<const Complex> diag);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::span<const Complex> entries() const noexcept { return entries_; }

    [[nodiscard]] const Complex& operator()(std::size_t row, std::size_t col) const {
        return entries_[row * dim_ + col];
    }
    Complex& operator()(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }

    [[nodiscard]] Complex trace() const;
    [[nodiscard]] bool is_zero() const;

    friend bool operator==(const Element&, const Element&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<Complex> entries_;
};

/// Unit-modulus scalar, the carrier of the circle group T^1.
class UnitScalar {
public:
    static constexpr double kModulusTol = 1e-12;

    /// Throws std::invalid_argument when ||value| - 1| > kModulusTol.
    explicit UnitScalar(Complex value);
    static UnitScalar from_phase(double radians);

    [[nodiscard]] Complex value() const noexcept { return value_; }
    [[nodiscard]] bool is_one() const noexcept { return value_ == Complex(1.0, 0.0); }

    friend bool operator==(const UnitScalar&, const UnitScalar&) = default;

private:
    Complex value_;
};

struct AlgebraSpec {
    std::size_t dim = 3;
    double norm_tol = 1e-12;

    /// Throws std::invalid_argument unless dim >= 1 and norm_tol in (0, 1e-3].
    void validate() const;
};

inline constexpr double kDefaultNormTol = 1e-12;
inline constexpr int kNormIterationCap = 10'000;

Element add(const Element& x, const Element& y);
Element sub(const Element& x, const Element& y);
Element neg(const Element& x);
Element mul(const Element& x, const Element& y);
Element involution(const Element& x);
Element transpose(const Element& x);
Element scale(Complex mu, const Element& x);
/// Entrywise division by a real scalar; one rounding per entry.
Element divide(const Element& x, double denom);

/// Largest singular value.
///
/// Power iteration on x*x starting from a phase-perturbed all-ones vector.
/// Stops once the Rayleigh quotient changes by at most `rel_tol` (relative)
/// and the eigen-residual is at most sqrt(rel_tol) relative. Throws
/// NormNotConverged after kNormIterationCap iterations.
double op_norm(const Element& x, double rel_tol = kDefaultNormTol);

/// Entries i.i.d. uniform on the square [-1,1] x [-1,1]i, then rescaled so
/// that op_norm(result) = norm_cap * u * (1 - 1e-9) with u ~ U[0,1) drawn
/// from the same stream. Deterministic in (seed, dim, norm_cap).
Element random_element(std::uint64_t seed, std::size_t dim, double norm_cap);

/// Unitary from Gram-Schmidt on a seeded random matrix.
Element random_unitary(std::uint64_t seed, std::size_t dim);

/// Copy of x with the last row and column set to zero (support on the leading
/// (dim-1) block).
Element leading_block(const Element& x);

inline Element operator+(const Element& x, const Element& y) { return add(x, y); }
inline Element operator-(const Element& x, const Element& y) { return sub(x, y); }
inline Element operator-(const Element& x) { return neg(x); }
inline Element operator*(const Element& x, const Element& y) { return mul(x, y); }
inline Element operator*(Complex mu, const Element& x) { return scale(mu, x); }

}  // namespace stablab
