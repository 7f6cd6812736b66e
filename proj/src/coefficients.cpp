#include "sconv/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace sconv {

namespace {

Eigen::MatrixXd to_eigen(const SquareMatrix& m)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.dim()), static_cast<Eigen::Index>(m.dim()));
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return out;
}

/// Uniform point in the ball of the given radius.
StateVector sample_ball(RngStream& stream, std::size_t dim, double radius)
{
    StateVector x(dim);
    for (std::size_t i = 0; i < dim; ++i)
        x[i] = stream.normal();
    const double n = norm(x);
    if (n == 0.0)
        return x;
    const double r = radius * std::pow(stream.uniform(), 1.0 / static_cast<double>(dim));
    return (r / n) * x;
}

StateVector sample_direction(RngStream& stream, std::size_t dim)
{
    for (;;) {
        StateVector u(dim);
        for (std::size_t i = 0; i < dim; ++i)
            u[i] = stream.normal();
        const double n = norm(u);
        if (n > 0.0)
            return (1.0 / n) * u;
    }
}

double jump_sum_sq_difference(const JumpCoefficientSpec& k, const MarkSpace& marks, const StateVector& x,
                              const StateVector& y, double p)
{
    double sum = 0.0;
    for (std::size_t j = 0; j < k.marks(); ++j)
        sum += marks.nu(j) * norm_pow(k(j, x) - k(j, y), p);
    return sum;
}

double jump_sum_pow(const JumpCoefficientSpec& k, const MarkSpace& marks, const StateVector& x, double p)
{
    double sum = 0.0;
    for (std::size_t j = 0; j < k.marks(); ++j)
        sum += marks.nu(j) * norm_pow(k(j, x), p);
    return sum;
}

}  // namespace

SquareMatrix::SquareMatrix(std::vector<std::vector<double>> rows) : dim_(rows.size()), entries_()
{
    entries_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
        if (row.size() != dim_)
            throw std::invalid_argument("matrix must be square");
        for (double v : row) {
            if (!std::isfinite(v))
                throw std::invalid_argument("matrix entries must be finite");
            entries_.push_back(v);
        }
    }
}

SquareMatrix SquareMatrix::diagonal(std::span<const double> values)
{
    SquareMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        m(i, i) = values[i];
    return m;
}

StateVector SquareMatrix::apply(const StateVector& x) const
{
    if (x.dim() != dim_)
        throw std::invalid_argument("matrix-vector dimension mismatch");
    StateVector out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < dim_; ++j)
            sum += (*this)(i, j) * x[j];
        out[i] = sum;
    }
    return out;
}

std::vector<std::vector<double>> SquareMatrix::rows() const
{
    std::vector<std::vector<double>> out(dim_, std::vector<double>(dim_));
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j)
            out[i][j] = (*this)(i, j);
    return out;
}

double SquareMatrix::max_symmetric_eigenvalue() const
{
    if (dim_ == 0)
        return 0.0;
    const Eigen::MatrixXd m = to_eigen(*this);
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

double SquareMatrix::operator_norm() const
{
    if (dim_ == 0)
        return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(*this));
    return svd.singularValues()(0);
}

DriftSpec DriftSpec::affine(StateVector b, SquareMatrix l)
{
    if (b.dim() != l.dim())
        throw std::invalid_argument("affine drift: offset and matrix dimensions differ");
    DriftSpec d;
    d.family = DriftFamily::affine;
    d.dim = b.dim();
    d.offset = std::move(b);
    d.linear = std::move(l);
    return d;
}

DriftSpec DriftSpec::monotone_cubic(std::size_t dim, double mu, double c, double growth_radius)
{
    if (!(c >= 0.0))
        throw std::invalid_argument("cubic drift needs c >= 0");
    if (!(growth_radius > 0.0))
        throw std::invalid_argument("cubic drift needs a positive growth radius");
    DriftSpec d;
    d.family = DriftFamily::cubic;
    d.dim = dim;
    d.mu = mu;
    d.cubic = c;
    d.growth_radius = growth_radius;
    return d;
}

DriftSpec DriftSpec::custom(std::size_t dim, DriftField f, double sample_radius)
{
    if (!f)
        throw std::invalid_argument("custom drift needs a field");
    DriftSpec d;
    d.family = DriftFamily::custom;
    d.dim = dim;
    d.field = std::move(f);
    d.growth_radius = sample_radius;
    return d;
}

StateVector DriftSpec::operator()(double t, const StateVector& x) const
{
    switch (family) {
    case DriftFamily::affine:
        return offset + linear.apply(x);
    case DriftFamily::cubic: {
        StateVector out(x.dim());
        for (std::size_t i = 0; i < x.dim(); ++i)
            out[i] = mu * x[i] - cubic * x[i] * x[i] * x[i];
        return out;
    }
    case DriftFamily::custom:
        return field(t, x);
    }
    return StateVector(dim);
}

std::vector<double> DriftSpec::diagonal_part() const
{
    std::vector<double> diag(dim, 0.0);
    if (family == DriftFamily::affine) {
        for (std::size_t i = 0; i < dim; ++i)
            diag[i] = linear(i, i);
    } else if (family == DriftFamily::cubic) {
        std::fill(diag.begin(), diag.end(), mu);
    }
    return diag;
}

StateVector DriftSpec::remainder(double t, const StateVector& x) const
{
    switch (family) {
    case DriftFamily::affine: {
        StateVector out(offset);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                if (i != j)
                    out[i] += linear(i, j) * x[j];
            }
        }
        return out;
    }
    case DriftFamily::cubic: {
        StateVector out(x.dim());
        for (std::size_t i = 0; i < x.dim(); ++i)
            out[i] = -cubic * x[i] * x[i] * x[i];
        return out;
    }
    case DriftFamily::custom:
        return field(t, x);
    }
    return StateVector(dim);
}

bool DriftSpec::is_zero() const
{
    switch (family) {
    case DriftFamily::affine:
        return norm_squared(offset) == 0.0 && linear.operator_norm() == 0.0;
    case DriftFamily::cubic:
        return mu == 0.0 && cubic == 0.0;
    case DriftFamily::custom:
        return false;
    }
    return false;
}

JumpCoefficientSpec JumpCoefficientSpec::none(std::size_t marks, std::size_t dim)
{
    return {std::vector<double>(marks, 0.0), std::vector<StateVector>(marks, StateVector(dim))};
}

StateVector JumpCoefficientSpec::operator()(std::size_t mark, const StateVector& x) const
{
    if (mark >= gamma.size())
        throw std::out_of_range("jump coefficient: mark index out of range");
    StateVector out(beta[mark]);
    if (gamma[mark] != 0.0)
        out += gamma[mark] * x;
    return out;
}

bool JumpCoefficientSpec::is_additive() const
{
    return std::all_of(gamma.begin(), gamma.end(), [](double g) { return g == 0.0; });
}

bool JumpCoefficientSpec::is_zero() const
{
    return is_additive() &&
           std::all_of(beta.begin(), beta.end(), [](const StateVector& b) { return norm_squared(b) == 0.0; });
}

double HypothesisConstants::jump_p() const
{
    return std::max(jump_p_lipschitz, jump_p_growth);
}

namespace {

struct DriftEstimate {
    double monotonicity = -std::numeric_limits<double>::infinity();
    double growth = 0.0;
};

DriftEstimate estimate_custom_drift(const DriftSpec& drift, std::uint64_t seed)
{
    // Pairs at shrinking separations; half of them near the origin, where
    // roots and similar singular fields lose their one-sided Lipschitz bound.
    constexpr std::array<double, 3> separations{1.0, 1e-2, 1e-4};
    constexpr std::size_t pairs_per_scale = 33334;
    RngStream stream = derive_stream(seed, 0, StreamPurpose::audit);
    const double radius = drift.growth_radius;

    std::array<double, separations.size()> per_scale{};
    DriftEstimate est;
    for (std::size_t s = 0; s < separations.size(); ++s) {
        const double delta = separations[s];
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pairs_per_scale; ++i) {
            const double centre_radius = (i % 2 == 0) ? radius : std::min(radius, 10.0 * delta);
            const StateVector x = sample_ball(stream, drift.dim, centre_radius);
            const StateVector y = x + (delta * stream.uniform(0.5, 1.0)) * sample_direction(stream, drift.dim);
            const double t = stream.uniform();
            const StateVector fx = drift(t, x);
            const StateVector fy = drift(t, y);
            const StateVector dx = x - y;
            const double ratio = inner(fx - fy, dx) / norm_squared(dx);
            if (!std::isfinite(ratio) || !std::isfinite(norm_squared(fx)))
                throw HypothesisViolation("custom drift is not finite on the sampled region");
            best = std::max(best, ratio);
            est.growth = std::max(est.growth, norm_squared(fx) / (1.0 + norm_squared(x)));
        }
        per_scale[s] = best;
    }
    const double finest = per_scale.back();
    const double previous = per_scale[per_scale.size() - 2];
    if (finest > 1e6 || finest > 10.0 * std::max(std::abs(previous), 1.0)) {
        std::ostringstream msg;
        msg << "custom drift has no finite monotonicity constant: estimate grows from " << previous
            << " to " << finest << " as pairs approach each other";
        throw HypothesisViolation(msg.str());
    }
    est.monotonicity = *std::max_element(per_scale.begin(), per_scale.end());
    est.monotonicity += 0.1 * std::abs(est.monotonicity);
    est.growth *= 1.1;
    return est;
}

}  // namespace

HypothesisConstants hypothesis_constants(const DriftSpec& drift, const JumpCoefficientSpec& jump,
                                         const MarkSpace& marks, double p, std::uint64_t seed)
{
    if (!(p >= 2.0))
        throw std::domain_error("hypothesis constants need p >= 2");
    if (jump.marks() != marks.size() || jump.beta.size() != marks.size())
        throw std::invalid_argument("jump coefficient needs one (gamma, beta) per mark");

    HypothesisConstants h;
    h.p = p;
    h.growth_radius = std::numeric_limits<double>::infinity();
    switch (drift.family) {
    case DriftFamily::affine: {
        h.monotonicity = drift.linear.max_symmetric_eigenvalue();
        const double l = drift.linear.operator_norm();
        h.drift_growth = 2.0 * std::max(norm_squared(drift.offset), l * l);
        break;
    }
    case DriftFamily::cubic: {
        h.monotonicity = drift.mu;
        const double r = drift.growth_radius;
        const double slope = std::abs(drift.mu) + drift.cubic * r * r;
        h.drift_growth = slope * slope;
        if (drift.cubic > 0.0)
            h.growth_radius = r;
        break;
    }
    case DriftFamily::custom: {
        const DriftEstimate est = estimate_custom_drift(drift, seed);
        h.monotonicity = est.monotonicity;
        h.drift_growth = est.growth;
        h.estimated = true;
        h.growth_radius = drift.growth_radius;
        break;
    }
    }

    double c = 0.0, f_lip = 0.0, beta_sq = 0.0, beta_p = 0.0;
    for (std::size_t j = 0; j < marks.size(); ++j) {
        const double nu = marks.nu(j);
        c += jump.gamma[j] * jump.gamma[j] * nu;
        f_lip += std::pow(std::abs(jump.gamma[j]), p) * nu;
        beta_sq += norm_squared(jump.beta[j]) * nu;
        beta_p += norm_pow(jump.beta[j], p) * nu;
    }
    h.jump_lipschitz = c;
    h.jump_p_lipschitz = f_lip;
    h.jump_growth = 2.0 * std::max(c, beta_sq);
    h.jump_p_growth = std::pow(2.0, p - 1.0) * std::max(f_lip, beta_p);
    return h;
}

bool HypothesisAudit::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.violations == 0; });
}

HypothesisAudit audit_hypothesis(const DriftSpec& drift, const JumpCoefficientSpec& jump,
                                 const MarkSpace& marks, const HypothesisConstants& constants,
                                 std::size_t pairs, std::uint64_t seed)
{
    const double radius = std::isfinite(constants.growth_radius) ? constants.growth_radius : 10.0;
    const double p = constants.p;
    RngStream stream = derive_stream(seed, 1, StreamPurpose::audit);

    HypothesisAudit audit;
    audit.pairs = pairs;
    audit.checks = {{"monotonicity", 0, 0.0},
                    {"jump_lipschitz", 0, 0.0},
                    {"linear_growth", 0, 0.0},
                    {"jump_p_lipschitz", 0, 0.0},
                    {"jump_p_growth", 0, 0.0}};

    // `amplification` widens the tolerance for checks built from differences
    // f(x) - f(y), whose relative rounding error grows like (‖x‖+‖y‖)/‖x-y‖.
    auto record = [](AuditCheck& check, double lhs, double rhs, double amplification = 0.0) {
        if (rhs > 0.0)
            check.worst_ratio = std::max(check.worst_ratio, lhs / rhs);
        else if (lhs > 0.0)
            check.worst_ratio = std::numeric_limits<double>::infinity();
        const double rel = 1e-10 + 1e-13 * amplification;
        if (lhs > rhs + rel * (std::abs(lhs) + std::abs(rhs)) + 1e-300)
            ++check.violations;
    };

    for (std::size_t i = 0; i < pairs; ++i) {
        const StateVector x = sample_ball(stream, drift.dim, radius);
        StateVector y = sample_ball(stream, drift.dim, radius);
        if (i % 2 == 1) {
            // nearby pair, pulled back inside the ball if needed
            y = x + (1e-3 * radius * stream.uniform()) * sample_direction(stream, drift.dim);
            if (norm(y) > radius)
                y = (radius / norm(y)) * y;
        }
        const double t = stream.uniform();
        const StateVector dx = x - y;
        const double dx_sq = norm_squared(dx);
        const double cancel = dx_sq > 0.0 ? p * (norm(x) + norm(y)) / std::sqrt(dx_sq) : 0.0;

        // M may be negative, so compare <f(x)-f(y), x-y> - M‖x-y‖² against 0
        // with the tolerance scaled by both parts.
        const double mono = inner(drift(t, x) - drift(t, y), dx);
        record(audit.checks[0], mono, constants.monotonicity * dx_sq, cancel);
        record(audit.checks[1], jump_sum_sq_difference(jump, marks, x, y, 2.0), constants.jump_lipschitz * dx_sq, cancel);
        record(audit.checks[2], norm_squared(drift(t, x)) + jump_sum_pow(jump, marks, x, 2.0),
               constants.growth() * (1.0 + norm_squared(x)));
        record(audit.checks[3], jump_sum_sq_difference(jump, marks, x, y, p),
               constants.jump_p_lipschitz * norm_pow(dx, p), cancel);
        record(audit.checks[4], jump_sum_pow(jump, marks, x, p), constants.jump_p_growth * (1.0 + norm_pow(x, p)));
    }
    return audit;
}

InitialCondition InitialCondition::gaussian(StateVector mean, double stddev, double radius)
{
    if (!(stddev > 0.0) || !(radius > 0.0))
        throw std::invalid_argument("gaussian initial condition needs positive stddev and radius");
    return {std::move(mean), stddev, radius};
}

StateVector InitialCondition::sample(RngStream& stream) const
{
    if (is_deterministic())
        return mean;
    for (int attempt = 0; attempt < 100000; ++attempt) {
        StateVector offset(mean.dim());
        for (std::size_t i = 0; i < mean.dim(); ++i)
            offset[i] = stddev * stream.normal();
        if (norm(offset) <= radius)
            return mean + offset;
    }
    throw std::runtime_error("truncated gaussian: truncation radius too small for the stddev");
}

}  // namespace sconv
