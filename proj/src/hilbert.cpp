#include "sconv/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sconv {

namespace {

void require_same_dim(const StateVector& a, const StateVector& b)
{
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                                    std::to_string(b.dim()));
    }
}

void require_dim(const DiagonalGenerator& gen, const StateVector& x)
{
    if (gen.dim() != x.dim()) {
        throw std::invalid_argument("state dimension " + std::to_string(x.dim()) +
                                    " does not match generator dimension " +
                                    std::to_string(gen.dim()));
    }
}

void require_resolvent_domain(const DiagonalGenerator& gen, double lambda)
{
    if (!(lambda > std::max(0.0, gen.alpha()))) {
        throw std::domain_error("Yosida operators need lambda > max(0, alpha); got lambda = " +
                                std::to_string(lambda));
    }
}

}  // namespace

StateVector& StateVector::operator+=(const StateVector& other)
{
    require_same_dim(*this, other);
    for (std::size_t i = 0; i < coords_.size(); ++i)
        coords_[i] += other.coords_[i];
    return *this;
}

StateVector& StateVector::operator-=(const StateVector& other)
{
    require_same_dim(*this, other);
    for (std::size_t i = 0; i < coords_.size(); ++i)
        coords_[i] -= other.coords_[i];
    return *this;
}

StateVector& StateVector::operator*=(double s)
{
    for (double& c : coords_)
        c *= s;
    return *this;
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
StateVector operator-(StateVector a) { return a *= -1.0; }
StateVector operator*(double s, StateVector a) { return a *= s; }
StateVector operator*(StateVector a, double s) { return a *= s; }

double inner(const StateVector& x, const StateVector& y)
{
    require_same_dim(x, y);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i)
        sum += x[i] * y[i];
    return sum;
}

double norm_squared(const StateVector& x) { return inner(x, x); }

double norm(const StateVector& x) { return std::sqrt(norm_squared(x)); }

double norm_pow(const StateVector& x, double p)
{
    if (p == 2.0)
        return norm_squared(x);
    return std::pow(norm(x), p);
}

DiagonalGenerator::DiagonalGenerator(std::vector<double> eigenvalues)
    : eigenvalues_(std::move(eigenvalues))
{
    if (eigenvalues_.empty())
        throw std::invalid_argument("generator needs at least one eigenvalue");
    for (double a : eigenvalues_) {
        if (!std::isfinite(a))
            throw std::invalid_argument("generator eigenvalues must be finite");
    }
    alpha_ = *std::max_element(eigenvalues_.begin(), eigenvalues_.end());
}

DiagonalGenerator DiagonalGenerator::laplacian(std::size_t dim, double scale, double shift)
{
    if (dim == 0)
        throw std::invalid_argument("laplacian family needs dim >= 1");
    if (scale < 0.0)
        throw std::invalid_argument("laplacian scale must be nonnegative");
    std::vector<double> a(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const double k = static_cast<double>(i + 1);
        a[i] = shift - scale * k * k;
    }
    return DiagonalGenerator(std::move(a));
}

DiagonalGenerator DiagonalGenerator::zero(std::size_t dim)
{
    return DiagonalGenerator(std::vector<double>(dim, 0.0));
}

DiagonalGenerator DiagonalGenerator::shifted(std::span<const double> shift) const
{
    if (shift.size() != eigenvalues_.size())
        throw std::invalid_argument("shift dimension does not match generator");
    std::vector<double> a(eigenvalues_);
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] += shift[i];
    return DiagonalGenerator(std::move(a));
}

StateVector apply_semigroup(const DiagonalGenerator& gen, double t, const StateVector& x)
{
    if (t < 0.0)
        throw std::domain_error("semigroup time must be nonnegative");
    require_dim(gen, x);
    StateVector out(x);
    for (std::size_t i = 0; i < out.dim(); ++i)
        out[i] *= std::exp(gen.eigenvalue(i) * t);
    return out;
}

StateVector apply_generator(const DiagonalGenerator& gen, const StateVector& x)
{
    require_dim(gen, x);
    StateVector out(x);
    for (std::size_t i = 0; i < out.dim(); ++i)
        out[i] *= gen.eigenvalue(i);
    return out;
}

StateVector yosida_resolvent(const DiagonalGenerator& gen, double lambda, const StateVector& x)
{
    require_resolvent_domain(gen, lambda);
    require_dim(gen, x);
    StateVector out(x);
    for (std::size_t i = 0; i < out.dim(); ++i)
        out[i] *= lambda / (lambda - gen.eigenvalue(i));
    return out;
}

StateVector yosida_generator(const DiagonalGenerator& gen, double lambda, const StateVector& x)
{
    require_resolvent_domain(gen, lambda);
    require_dim(gen, x);
    StateVector out(x);
    for (std::size_t i = 0; i < out.dim(); ++i) {
        const double a = gen.eigenvalue(i);
        out[i] *= a * lambda / (lambda - a);
    }
    return out;
}

double yosida_resolvent_norm(const DiagonalGenerator& gen, double lambda)
{
    require_resolvent_domain(gen, lambda);
    double best = 0.0;
    for (double a : gen.eigenvalues())
        best = std::max(best, std::abs(lambda / (lambda - a)));
    return best;
}

double yosida_generator_norm(const DiagonalGenerator& gen, double lambda)
{
    require_resolvent_domain(gen, lambda);
    double best = 0.0;
    for (double a : gen.eigenvalues())
        best = std::max(best, std::abs(a * lambda / (lambda - a)));
    return best;
}

}  // namespace sconv
