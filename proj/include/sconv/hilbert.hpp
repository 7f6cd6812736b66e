#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sconv {

/// Coordinates of a point of H in a fixed d-dimensional spectral truncation.
///
/// The eigenbasis of the generator is taken orthonormal, so every inner
/// product and norm is the Euclidean one on coordinates.
class StateVector {
public:
    StateVector() = default;
    explicit StateVector(std::size_t dim, double value = 0.0) : coords_(dim, value) {}
    StateVector(std::initializer_list<double> values) : coords_(values) {}
    explicit StateVector(std::vector<double> coords) : coords_(std::move(coords)) {}

    std::size_t dim() const noexcept { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    double& operator[](std::size_t i) { return coords_[i]; }
    std::span<const double> coords() const noexcept { return coords_; }
    std::span<double> coords() noexcept { return coords_; }

    StateVector& operator+=(const StateVector& other);
    StateVector& operator-=(const StateVector& other);
    StateVector& operator*=(double s);

    bool operator==(const StateVector&) const = default;

private:
    std::vector<double> coords_;
};

StateVector operator+(StateVector a, const StateVector& b);
StateVector operator-(StateVector a, const StateVector& b);
StateVector operator-(StateVector a);
StateVector operator*(double s, StateVector a);
StateVector operator*(StateVector a, double s);

double inner(const StateVector& x, const StateVector& y);
double norm_squared(const StateVector& x);
double norm(const StateVector& x);

/// ‖x‖^p with the convention 0^0 = 1, so p = 2 weights ‖x‖^{p-2} are 1 at the origin.
double norm_pow(const StateVector& x, double p);

/// Diagonal generator A = diag(a_1..a_d) of the semigroup S_t = diag(e^{a_i t}).
///
/// The growth bound alpha is always max_i a_i, which makes ‖S_t‖ = e^{alpha t}
/// an equality rather than an estimate.
class DiagonalGenerator {
public:
    explicit DiagonalGenerator(std::vector<double> eigenvalues);

    /// a_i = shift - scale * i^2, i = 1..dim (scaled Dirichlet Laplacian spectrum).
    static DiagonalGenerator laplacian(std::size_t dim, double scale, double shift = 0.0);
    static DiagonalGenerator zero(std::size_t dim);

    std::size_t dim() const noexcept { return eigenvalues_.size(); }
    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    double eigenvalue(std::size_t i) const { return eigenvalues_[i]; }
    double alpha() const noexcept { return alpha_; }
    bool is_contraction() const noexcept { return alpha_ <= 0.0; }

    /// Generator with a_i + shift_i (used to fold a diagonal linear drift into the exponential).
    DiagonalGenerator shifted(std::span<const double> shift) const;

private:
    std::vector<double> eigenvalues_;
    double alpha_;
};

StateVector apply_semigroup(const DiagonalGenerator& gen, double t, const StateVector& x);
StateVector apply_generator(const DiagonalGenerator& gen, const StateVector& x);

/// R(lambda) x = lambda (lambda I - A)^{-1} x. Requires lambda > max(0, alpha).
StateVector yosida_resolvent(const DiagonalGenerator& gen, double lambda, const StateVector& x);

/// A(lambda) x = A R(lambda) x. Same domain restriction as yosida_resolvent.
StateVector yosida_generator(const DiagonalGenerator& gen, double lambda, const StateVector& x);

/// Operator norms of the diagonal maps R(lambda) and A(lambda).
double yosida_resolvent_norm(const DiagonalGenerator& gen, double lambda);
double yosida_generator_norm(const DiagonalGenerator& gen, double lambda);

}  // namespace sconv
