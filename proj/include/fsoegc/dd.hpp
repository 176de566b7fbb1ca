#pragma once

// Minimal double-double (~31 significant digits) arithmetic kernel.
// Needed because the ascending hypergeometric expansions behind the
// Meijer-G evaluator cancel by roughly e^x, which exhausts plain doubles
// long before the crossover to the reflected large-argument expansion.

#include <cmath>
#include <cstdlib>
#include <limits>

namespace fsoegc::detail {

struct DD {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DD() = default;
    constexpr DD(double h) : hi(h), lo(0.0) {}
    constexpr DD(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
};

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

// requires |a| >= |b| (or a == 0)
inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    double err = b - (s - a);
    return {s, err};
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    double err = std::fma(a, b, -p);
    return {p, err};
}

inline DD add(const DD& a, const DD& b) {
    DD s = two_sum(a.hi, b.hi);
    DD t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline DD sub(const DD& a, const DD& b) { return add(a, DD{-b.hi, -b.lo}); }

inline DD mul(const DD& a, const DD& b) {
    DD p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline DD div(const DD& a, const DD& b) {
    double q1 = a.hi / b.hi;
    DD r = sub(a, mul(b, DD{q1}));
    double q2 = r.hi / b.hi;
    r = sub(r, mul(b, DD{q2}));
    double q3 = r.hi / b.hi;
    DD q = quick_two_sum(q1, q2);
    return add(q, DD{q3});
}

inline DD neg(const DD& a) { return {-a.hi, -a.lo}; }
inline double dd_abs(const DD& a) { return std::fabs(a.hi + a.lo); }

inline DD operator+(const DD& a, const DD& b) { return add(a, b); }
inline DD operator-(const DD& a, const DD& b) { return sub(a, b); }
inline DD operator*(const DD& a, const DD& b) { return mul(a, b); }
inline DD operator/(const DD& a, const DD& b) { return div(a, b); }
inline DD operator-(const DD& a) { return neg(a); }

inline constexpr DD DD_LN2{0.6931471805599453, 2.3190468138462996e-17};
inline constexpr DD DD_PI{3.141592653589793, 1.2246467991473532e-16};
inline constexpr DD DD_HALF_LN_2PI{0.9189385332046728, -3.8782941580672414e-17};

// exp of a double-double, range-reduced against ln 2
inline DD dd_exp(const DD& x) {
    if (x.hi > 690.0) return {std::numeric_limits<double>::infinity(), 0.0};
    if (x.hi < -745.0) return {0.0, 0.0};
    double k = std::round(x.hi / DD_LN2.hi);
    DD r = sub(x, mul(DD{k}, DD_LN2));
    // |r| <= ln2/2; Taylor series in dd
    DD sum{1.0};
    DD term{1.0};
    for (int i = 1; i <= 24; ++i) {
        term = mul(term, r);
        term = div(term, DD{static_cast<double>(i)});
        sum = add(sum, term);
        if (std::fabs(term.hi) < 1e-35 * std::fabs(sum.hi)) break;
    }
    int ki = static_cast<int>(k);
    return {std::ldexp(sum.hi, ki), std::ldexp(sum.lo, ki)};
}

// natural log of a positive double-double (Newton polish of the double log)
inline DD dd_log(const DD& a) {
    double y0 = std::log(a.hi);
    DD e = dd_exp(DD{-y0});
    DD r = sub(mul(a, e), DD{1.0});
    // log(a) = y0 + log1p(r), r ~ 1e-16
    DD corr = sub(r, div(mul(r, r), DD{2.0}));
    return add(DD{y0}, corr);
}

// a^b for positive a
inline DD dd_pow(const DD& a, const DD& b) { return dd_exp(mul(b, dd_log(a))); }

namespace ddtrig {
// sin/cos by Taylor on |t| <= pi/8, then two angle doublings
inline void sincos_small(const DD& t, DD& s, DD& c) {
    DD t2 = mul(t, t);
    DD term = t;
    DD sum = t;
    for (int i = 1; i <= 14; ++i) {
        term = mul(term, t2);
        term = div(term, DD{static_cast<double>((2 * i) * (2 * i + 1))});
        term = neg(term);
        sum = add(sum, term);
        if (std::fabs(term.hi) < 1e-36) break;
    }
    s = sum;
    term = DD{1.0};
    sum = DD{1.0};
    for (int i = 1; i <= 14; ++i) {
        term = mul(term, t2);
        term = div(term, DD{static_cast<double>((2 * i - 1) * (2 * i))});
        term = neg(term);
        sum = add(sum, term);
        if (std::fabs(term.hi) < 1e-36) break;
    }
    c = sum;
}
}  // namespace ddtrig

// sin(pi * x) in double-double; |x| should be moderate (< 2^40)
inline DD dd_sinpi(const DD& x) {
    double n = std::round(x.hi);
    DD r = sub(x, DD{n});           // exact: r in [-0.5, 0.5]
    DD arg = mul(DD_PI, r);         // |arg| <= pi/2
    DD t = {arg.hi / 4.0, arg.lo / 4.0};
    DD s, c;
    ddtrig::sincos_small(t, s, c);
    // double twice: sin 2t = 2 s c, cos 2t = 1 - 2 s^2
    for (int i = 0; i < 2; ++i) {
        DD s2 = mul(DD{2.0}, mul(s, c));
        DD c2 = sub(DD{1.0}, mul(DD{2.0}, mul(s, s)));
        s = s2;
        c = c2;
    }
    bool flip = (static_cast<long long>(n) % 2LL) != 0;
    return flip ? neg(s) : s;
}

namespace ddgamma {
// c_j = B_{2j} / (2j (2j-1)), Stirling-series coefficients
inline constexpr DD STIRLING_C[] = {
    {0.08333333333333333, 4.625929269271485e-18},
    {-0.002777777777777778, 1.0601087908747154e-19},
    {0.0007936507936507937, 6.883823317368282e-22},
    {-0.0005952380952380953, 5.36938218754726e-20},
    {0.0008417508417508417, 3.6870174889237694e-20},
    {-0.0019175269175269176, 1.0675702776872475e-19},
    {0.00641025641025641, 2.2240044563805217e-19},
    {-0.029550653594771242, 4.861760957508855e-19},
    {0.17964437236883057, -6.401600482710946e-19},
    {-1.3924322169059011, 1.5837056989230303e-17},
    {13.402864044168393, -6.154114101993966e-16},
    {-156.84828462600203, 9.391823141715389e-15},
    {2193.1033333333335, -1.3339255626002948e-13},
    {-36108.77125372499, 5.897583353514365e-13},
    {691472.268851313, 2.5585296305158e-11},
    {-15238221.539407415, -8.76774522490625e-10},
    {382900751.39141417, -2.4082684757733585e-08},
    {-10882266035.784391, 3.141830930219749e-07},
    {347320283765.00226, -6.048528997747748e-06},
    {-12369602142269.275, 0.0009363732896507286},
    {488788064793079.3, 0.022575815162518022},
    {-2.1320333960919372e+16, -1.8969750589821368},
    {1.0217752965257001e+18, -18.434712371946414},
    {-5.35754721733002e+19, -90.8277091919692},
    {3.0615782637048834e+21, -14332.848948670377},
    {-1.8999917426399204e+23, -1259161.1429306944},
    {1.2763374033828835e+25, -644253432.6223022},
    {-9.252847176120416e+26, -53092754794.83476},
    {7.218822595185611e+28, -3236401453454.9834},
    {-6.045183405995857e+30, 226514861971549.44},
    {5.4206704715700946e+32, -656273188931470.0},
    {-5.192957815314082e+34, 4.115957613443205e+18},
    {5.303658855119701e+36, -2.605543773787007e+20},
    {-5.763325348164964e+38, -2.137311915777353e+22},
    {6.651155714848453e+40, 4.7810483168784347e+24},
    {-8.13737835813668e+42, -4.3111864277839465e+26},
    {1.0536966953357141e+45, 6.483380370787348e+28},
    {-1.4418180599962207e+47, 6.051327079642469e+30},
    {2.0817356522089566e+49, -8.384344823409712e+32},
    {-3.167022663488666e+51, -2.641349399124396e+35},
};

// ln Gamma(z) for z >= 13 by the Stirling asymptotic series in dd
inline DD stirling(const DD& z) {
    DD res = mul(sub(z, DD{0.5}), dd_log(z));
    res = sub(res, z);
    res = add(res, DD_HALF_LN_2PI);
    DD w = div(DD{1.0}, mul(z, z));
    DD zp = div(DD{1.0}, z);
    double prev = std::numeric_limits<double>::infinity();
    for (const DD& c : STIRLING_C) {
        DD term = mul(c, zp);
        double mag = std::fabs(term.hi);
        if (mag >= prev) break;  // asymptotic: stop at the smallest term
        res = add(res, term);
        if (mag < 1e-37) break;
        prev = mag;
        zp = mul(zp, w);
    }
    return res;
}
}  // namespace ddgamma

// ln Gamma for positive dd argument
inline DD dd_lngamma_pos(DD x) {
    DD shift{0.0};
    while (x.hi < 13.0) {
        shift = add(shift, dd_log(x));
        x = add(x, DD{1.0});
    }
    return sub(ddgamma::stirling(x), shift);
}

// ln |Gamma(x)| and sign for non-integer real x (reflection for x < 0.5).
// Returns sign 0 with log = +inf when x sits on a pole (x a non-positive
// integer within tol), so exp(-inf) = 0 can absorb reciprocal-Gamma zeros.
struct SignedLog {
    DD log;
    int sign;  // +1, -1, or 0 for "at a pole"
};

inline SignedLog dd_lngamma_signed(const DD& x) {
    if (x.hi >= 0.5) return {dd_lngamma_pos(x), +1};
    double nearest = std::round(x.hi + x.lo);
    if (nearest <= 0.0 && std::fabs((x.hi - nearest) + x.lo) < 1e-13) {
        return {DD{std::numeric_limits<double>::infinity()}, 0};
    }
    // Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
    DD s = dd_sinpi(x);
    int sign = (s.hi + s.lo) < 0.0 ? -1 : +1;
    DD abss = (s.hi < 0.0) ? neg(s) : s;
    DD res = sub(dd_log(DD_PI), dd_log(abss));
    res = sub(res, dd_lngamma_pos(sub(DD{1.0}, x)));
    return {res, sign};
}

}  // namespace fsoegc::detail
