#include "stablab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

namespace stablab {

DimensionMismatch::DimensionMismatch(std::size_t lhs, std::size_t rhs)
    : std::invalid_argument("dimension mismatch: " + std::to_string(lhs) + " vs " +
                            std::to_string(rhs)) {}

namespace {

void require_same_dim(const Element& x, const Element& y) {
    if (x.dim() != y.dim()) {
        throw DimensionMismatch(x.dim(), y.dim());
    }
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

using Vec = std::vector<Complex>;

double vec_norm(const Vec& v) {
    double s = 0.0;
    for (const auto& z : v) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

// y = M v for row-major M.
void apply(const Element& m, const Vec& v, Vec& y) {
    const std::size_t n = m.dim();
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc{};
        for (std::size_t k = 0; k < n; ++k) {
            acc += m(i, k) * v[k];
        }
        y[i] = acc;
    }
}

}  // namespace

Element::Element(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

Element::Element(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
    if (entries_.size() != dim_ * dim_) {
        throw std::invalid_argument("Element: expected " + std::to_string(dim_ * dim_) +
                                    " entries, got " + std::to_string(entries_.size()));
    }
    if (!std::all_of(entries_.begin(), entries_.end(), finite)) {
        throw std::invalid_argument("Element: non-finite entry");
    }
}

Element::Element(std::initializer_list<std::initializer_list<Complex>> rows) : dim_(rows.size()) {
    entries_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
        if (row.size() != dim_) {
            throw std::invalid_argument("Element: ragged literal");
        }
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
    if (!std::all_of(entries_.begin(), entries_.end(), finite)) {
        throw std::invalid_argument("Element: non-finite entry");
    }
}

Element Element::identity(std::size_t dim) {
    Element e(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        e(i, i) = 1.0;
    }
    return e;
}

Element Element::unit(std::size_t dim, std::size_t row, std::size_t col) {
    Element e(dim);
    e(row, col) = 1.0;
    return e;
}

Element Element::diagonal(std::span<const Complex> diag) {
    Element e(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) {
        e(i, i) = diag[i];
    }
    return e;
}

Complex Element::trace() const {
    Complex t{};
    for (std::size_t i = 0; i < dim_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

bool Element::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](Complex z) { return z == Complex{}; });
}

UnitScalar::UnitScalar(Complex value) : value_(value) {
    if (std::abs(std::abs(value) - 1.0) > kModulusTol) {
        throw std::invalid_argument("UnitScalar: |value| != 1");
    }
}

UnitScalar UnitScalar::from_phase(double radians) {
    return UnitScalar(std::polar(1.0, radians));
}

void AlgebraSpec::validate() const {
    if (dim < 1) {
        throw std::invalid_argument("AlgebraSpec: dim must be >= 1");
    }
    if (!(norm_tol > 0.0 && norm_tol <= 1e-3)) {
        throw std::invalid_argument("AlgebraSpec: norm_tol must lie in (0, 1e-3]");
    }
}

Element add(const Element& x, const Element& y) {
    require_same_dim(x, y);
    Element r(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        for (std::size_t j = 0; j < x.dim(); ++j) {
            r(i, j) = x(i, j) + y(i, j);
        }
    }
    return r;
}

Element sub(const Element& x, const Element& y) {
    require_same_dim(x, y);
    Element r(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        for (std::size_t j = 0; j < x.dim(); ++j) {
            r(i, j) = x(i, j) - y(i, j);
        }
    }
    return r;
}

Element neg(const Element& x) {
    Element r(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        for (std::size_t j = 0; j < x.dim(); ++j) {
            r(i, j) = -x(i, j);
        }
    }
    return r;
}

Element mul(const Element& x, const Element& y) {
    require_same_dim(x, y);
    const std::size_t n = x.dim();
    Element r(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex xik = x(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                r(i, j) += xik * y(k, j);
            }
        }
    }
    return r;
}

Element involution(const Element& x) {
    Element r(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        for (std::size_t j = 0; j < x.dim(); ++j) {
            r(j, i) = std::conj(x(i, j));
        }
    }
    return r;
}

Element transpose(const Element& x) {
    Element r(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        for (std::size_t j = 0; j < x.dim(); ++j) {
            r(j, i) = x(i, j);
        }
    }
    return r;
}

Element scale(Complex mu, const Element& x) {
    Element r(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        for (std::size_t j = 0; j < x.dim(); ++j) {
            r(i, j) = mu * x(i, j);
        }
    }
    return r;
}

Element divide(const Element& x, double denom) {
    Element r(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        for (std::size_t j = 0; j < x.dim(); ++j) {
            r(i, j) = Complex(x(i, j).real() / denom, x(i, j).imag() / denom);
        }
    }
    return r;
}

namespace {

constexpr int kPlainPowerSteps = 200;
constexpr int kMaxSquarings = 64;

// Power iteration on the Hermitian PSD matrix `gram` from unit vector v.
// Returns the settled Rayleigh quotient, or nullopt after `steps` iterations.
std::optional<double> power_iterate(const Element& gram, Vec& v, int steps, double rel_tol) {
    const std::size_t n = gram.dim();
    Vec w(n);
    double lambda = -1.0;
    const double residual_tol = std::sqrt(rel_tol);
    for (int iter = 0; iter < steps; ++iter) {
        apply(gram, v, w);
        Complex rq{};
        for (std::size_t k = 0; k < n; ++k) {
            rq += std::conj(v[k]) * w[k];
        }
        const double next = rq.real();
        double residual_sq = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            residual_sq += std::norm(w[k] - next * v[k]);
        }
        const bool settled = std::abs(next - lambda) <= rel_tol * std::abs(next) &&
                             std::sqrt(residual_sq) <= residual_tol * std::abs(next);
        lambda = next;
        if (settled) {
            return std::max(lambda, 0.0);
        }
        const double wn = vec_norm(w);
        if (wn == 0.0) {
            // v lies in the kernel; any vector orthogonal to it is better.
            std::rotate(v.begin(), v.begin() + 1, v.end());
            continue;
        }
        for (std::size_t k = 0; k < n; ++k) {
            v[k] = w[k] / wn;
        }
    }
    return std::nullopt;
}

// Column of the trace-normalised power gram^(2^k) with the largest norm. The
// squarings raise the eigenvalue ratios to the 2^k-th power, so the result lies
// in the top eigenspace to working precision even when the spectral gap is
// far too small for plain power iteration.
Vec top_space_vector(const Element& gram) {
    const std::size_t n = gram.dim();
    Element p = gram;
    for (int s = 0; s < kMaxSquarings; ++s) {
        Element sq = mul(p, p);
        const double tr = sq.trace().real();
        if (!(tr > 0.0)) {
            break;
        }
        sq = divide(sq, tr);
        double change = 0.0;
        for (std::size_t k = 0; k < sq.entries().size(); ++k) {
            change = std::max(change, std::abs(sq.entries()[k] - p.entries()[k]));
        }
        p = std::move(sq);
        if (change <= 1e-15) {
            break;
        }
    }
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            c += std::norm(p(i, j));
        }
        if (c > best_norm) {
            best_norm = c;
            best = j;
        }
    }
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = p(i, best);
    }
    const double nv = vec_norm(v);
    for (auto& z : v) {
        z /= nv;
    }
    return v;
}

}  // namespace

double op_norm(const Element& x, double rel_tol) {
    const std::size_t n = x.dim();
    if (n == 0) {
        return 0.0;
    }
    double max_abs = 0.0;
    for (const auto& z : x.entries()) {
        if (!finite(z)) {
            throw std::invalid_argument("op_norm: non-finite entry");
        }
        max_abs = std::max(max_abs, std::abs(z));
    }
    if (max_abs == 0.0) {
        return 0.0;
    }

    // Work with y = x / max_abs so that y*y stays well inside double range.
    const Element y = divide(x, max_abs);
    const Element gram = mul(involution(y), y);

    Vec v(n);
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = std::polar(1.0, 0.7 * static_cast<double>(k) + 0.1 * static_cast<double>(k * k));
    }
    const double v0 = vec_norm(v);
    for (auto& z : v) {
        z /= v0;
    }

    auto lambda = power_iterate(gram, v, kPlainPowerSteps, rel_tol);
    if (!lambda) {
        v = top_space_vector(gram);
        lambda = power_iterate(gram, v, kNormIterationCap - kPlainPowerSteps, rel_tol);
    }
    if (!lambda) {
        throw NormNotConverged("op_norm: power iteration did not converge within " +
                               std::to_string(kNormIterationCap) + " iterations");
    }
    return max_abs * std::sqrt(*lambda);
}

Element random_element(std::uint64_t seed, std::size_t dim, double norm_cap) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Complex> entries(dim * dim);
    for (auto& z : entries) {
        const double re = entry(rng);
        const double im = entry(rng);
        z = Complex(re, im);
    }
    const double u = unit(rng);
    Element raw(dim, std::move(entries));
    if (norm_cap <= 0.0) {
        return Element(dim);
    }
    const double norm = op_norm(raw);
    if (norm == 0.0) {
        return raw;
    }
    return scale(norm_cap * u * (1.0 - 1e-9) / norm, raw);
}

Element random_unitary(std::uint64_t seed, std::size_t dim) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec> cols(dim, Vec(dim));
    for (auto& col : cols) {
        for (auto& z : col) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z = Complex(re, im);
        }
    }
    // Modified Gram-Schmidt, applied twice for orthogonality to working precision.
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < dim; ++j) {
            for (std::size_t k = 0; k < j; ++k) {
                Complex proj{};
                for (std::size_t i = 0; i < dim; ++i) {
                    proj += std::conj(cols[k][i]) * cols[j][i];
                }
                for (std::size_t i = 0; i < dim; ++i) {
                    cols[j][i] -= proj * cols[k][i];
                }
            }
            const double nrm = vec_norm(cols[j]);
            for (auto& z : cols[j]) {
                z /= nrm;
            }
        }
    }
    Element u(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            u(i, j) = cols[j][i];
        }
    }
    return u;
}

Element leading_block(const Element& x) {
    Element r = x;
    const std::size_t last = x.dim() - 1;
    for (std::size_t k = 0; k < x.dim(); ++k) {
        r(last, k) = 0.0;
        r(k, last) = 0.0;
    }
    return r;
}

}  // namespace stablab
