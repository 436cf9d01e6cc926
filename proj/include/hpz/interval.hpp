#ifndef HPZ_INTERVAL_HPP_
#define HPZ_INTERVAL_HPP_

#include <algorithm>
#include <vector>

#include "set.hpp"

namespace hpz
{

/// Closed interval [lo, hi]. Plain rounding-to-nearest; callers add tolerances.
struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    static Interval unit() { return {-1.0, 1.0}; }
    static Interval point(double v) { return {v, v}; }

    bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }

    Interval operator+(const Interval& o) const { return {lo + o.lo, hi + o.hi}; }
    Interval operator-(const Interval& o) const { return {lo - o.hi, hi - o.lo}; }
    Interval operator-() const { return {-hi, -lo}; }
    Interval& operator+=(const Interval& o)
    {
        lo += o.lo;
        hi += o.hi;
        return *this;
    }

    Interval operator*(const Interval& o) const
    {
        const double a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
        return {std::min({a, b, c, d}), std::max({a, b, c, d})};
    }
};

inline Interval operator*(double s, const Interval& x)
{
    return s >= 0 ? Interval{s * x.lo, s * x.hi} : Interval{s * x.hi, s * x.lo};
}

/// x^e over an interval; even powers are nonnegative.
inline Interval pow(const Interval& x, int e)
{
    if (e == 0)
        return Interval::point(1.0);
    const double a = detail::ipow(x.lo, e);
    const double b = detail::ipow(x.hi, e);
    if (e % 2 == 1)
        return {a, b};
    if (x.lo >= 0)
        return {a, b};
    if (x.hi <= 0)
        return {b, a};
    return {0.0, std::max(a, b)};
}

/// Range of the monomial prod_k x_k^exps(k,col) over the box `dom`.
inline Interval monomial_range(const IntMatrix& exps, Index col, const std::vector<Interval>& dom)
{
    Interval r = Interval::point(1.0);
    for (Index k = 0; k < exps.rows(); ++k)
    {
        if (exps(k, col) != 0)
            r = r * pow(dom[static_cast<std::size_t>(k)], exps(k, col));
    }
    return r;
}

} // namespace hpz

#endif
