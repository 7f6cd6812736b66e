#include "sconv/inequalities.hpp"

#include <cmath>
#include <stdexcept>

namespace sconv {

namespace {

long double pow_norm(long double sq, long double p)
{
    // sq = ‖v‖², returns ‖v‖^p with 0^0 = 1
    if (p == 0.0L)
        return 1.0L;
    return std::pow(sq, p / 2.0L);
}

}  // namespace

TaylorCheck check_taylor_lemma(const StateVector& x, const StateVector& y, double p)
{
    if (!(p >= 2.0))
        throw std::domain_error("Taylor inequality needs p >= 2");
    if (x.dim() != y.dim())
        throw std::invalid_argument("Taylor inequality: dimension mismatch");

    long double xx = 0.0L, yy = 0.0L, xy = 0.0L, ss = 0.0L;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        const long double xi = x[i];
        const long double yi = y[i];
        xx += xi * xi;
        yy += yi * yi;
        xy += xi * yi;
        ss += (xi + yi) * (xi + yi);
    }
    const long double pl = p;
    const long double x_pm2 = pow_norm(xx, pl - 2.0L);
    const long double lhs = pow_norm(ss, pl) - pow_norm(xx, pl) - pl * x_pm2 * xy;
    const long double rhs = 0.5L * pl * (pl - 1.0L) * (x_pm2 + pow_norm(ss, pl - 2.0L)) * yy;

    TaylorCheck out;
    out.lhs = static_cast<double>(lhs);
    out.rhs = static_cast<double>(rhs);
    out.holds = out.lhs <= out.rhs * (1.0 + 1e-12) + 1e-12;
    return out;
}

}  // namespace sconv
