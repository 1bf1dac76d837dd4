#ifndef MCLD_NUMERICS_HPP
#define MCLD_NUMERICS_HPP

// Small numerical toolbox shared by the chain kernels: a double-double
// scalar for the badly conditioned large-n solves, exact rational
// exponents, dense LU, subtraction-free GTH elimination, log-log fits and
// Richardson/Neville extrapolation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "mcld/errors.hpp"

namespace mcld {

// ---------------------------------------------------------------------------
// dd: double-double arithmetic (~31 significant digits).
//
// Classic error-free transformations (Dekker, Knuth; see also Bailey's QD
// package).  Only the operations the solvers need are provided.
// ---------------------------------------------------------------------------
struct dd {
    double hi = 0.0;
    double lo = 0.0;

    constexpr dd() = default;
    constexpr dd(double h) : hi(h), lo(0.0) {}
    constexpr dd(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi; }
};

namespace dd_detail {

inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

} // namespace dd_detail

inline dd operator+(dd a, dd b) {
    using namespace dd_detail;
    dd s = two_sum(a.hi, b.hi);
    dd t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }

inline dd operator*(dd a, dd b) {
    using namespace dd_detail;
    dd p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline dd operator/(dd a, dd b) {
    using namespace dd_detail;
    double q1 = a.hi / b.hi;
    dd r = a - b * dd(q1);
    double q2 = r.hi / b.hi;
    r = r - b * dd(q2);
    double q3 = r.hi / b.hi;
    dd q = quick_two_sum(q1, q2);
    return q + dd(q3);
}

inline dd &operator+=(dd &a, dd b) { return a = a + b; }
inline dd &operator-=(dd &a, dd b) { return a = a - b; }
inline dd &operator*=(dd &a, dd b) { return a = a * b; }
inline dd &operator/=(dd &a, dd b) { return a = a / b; }

inline bool operator==(dd a, dd b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(dd a, dd b) { return !(a == b); }
inline bool operator<(dd a, dd b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(dd a, dd b) { return b < a; }
inline bool operator<=(dd a, dd b) { return !(b < a); }
inline bool operator>=(dd a, dd b) { return !(a < b); }

inline dd abs(dd a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }
inline double to_double(dd a) { return a.hi; }
inline double to_double(double a) { return a; }

// double overloads so scalar-generic code resolves inside this namespace
inline double abs(double a) { return std::fabs(a); }
inline double exp(double a) { return std::exp(a); }
inline double log(double a) { return std::log(a); }
inline double sqrt(double a) { return std::sqrt(a); }

inline dd ldexp(dd a, int k) { return {std::ldexp(a.hi, k), std::ldexp(a.lo, k)}; }

// ln 2 to double-double accuracy (QD constant).
inline constexpr dd dd_ln2{6.931471805599452862e-01, 2.3190468138462995584e-17};

inline dd exp(dd a) {
    if (a.hi > 709.0)
        return {std::numeric_limits<double>::infinity(), 0.0};
    if (a.hi < -709.0)
        return {0.0, 0.0};
    // a = k ln2 + r with |r| <= ln2/2, then Taylor in r.
    int k = static_cast<int>(std::lround(a.hi / dd_ln2.hi));
    dd r = a - dd_ln2 * dd(static_cast<double>(k));
    dd sum = dd(1.0) + r;
    dd term = r;
    for (int i = 2; i < 40; ++i) {
        term = term * r / dd(static_cast<double>(i));
        sum += term;
        if (std::fabs(term.hi) < 1e-35 * std::fabs(sum.hi))
            break;
    }
    return ldexp(sum, k);
}

inline dd log(dd a) {
    if (!(a.hi > 0.0))
        throw NumericalError("dd log of non-positive value");
    dd x(std::log(a.hi));
    // Newton: x <- x + a e^{-x} - 1, doubles the digits per step.
    for (int it = 0; it < 2; ++it)
        x = x + a * exp(-x) - dd(1.0);
    return x;
}

inline dd pow(dd base, dd e) { return exp(e * log(base)); }

inline dd sqrt(dd a) {
    if (a.hi == 0.0 && a.lo == 0.0)
        return dd(0.0);
    if (a.hi < 0.0)
        throw NumericalError("dd sqrt of negative value");
    dd x(std::sqrt(a.hi));
    x = (x + a / x) * dd(0.5);
    x = (x + a / x) * dd(0.5);
    return x;
}

// ---------------------------------------------------------------------------
// Rational exponents for scale-parametrized rate families.
// ---------------------------------------------------------------------------
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d = 1) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0)
            throw ValidationError("rational exponent with zero denominator");
        if (den < 0) {
            den = -den;
            num = -num;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_zero() const { return num == 0; }

    static Rational parse(const std::string &s);
    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }

    friend bool operator==(const Rational &a, const Rational &b) {
        return a.num == b.num && a.den == b.den;
    }
};

inline Rational Rational::parse(const std::string &s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos)
            return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception &) {
        throw ValidationError("cannot parse rational '" + s + "'");
    }
}

// ---------------------------------------------------------------------------
// Dense linear algebra, templated so the hierarchy grid can run in dd.
// ---------------------------------------------------------------------------
template <class S> class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows) * cols, S(0)) {}

    int rows() const { return r_; }
    int cols() const { return c_; }
    S &operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
    const S &operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

private:
    int r_ = 0, c_ = 0;
    std::vector<S> a_;
};

// Solves A x = b by LU with partial pivoting.  A is consumed.
template <class S> std::vector<S> lu_solve(Mat<S> a, std::vector<S> b) {
    const int n = a.rows();
    if (n != a.cols() || static_cast<int>(b.size()) != n)
        throw ValidationError("lu_solve: shape mismatch");
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i)
        perm[i] = i;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        S best = abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            S v = abs(a(i, k));
            if (best < v) {
                best = v;
                piv = i;
            }
        }
        if (!(to_double(best) > 0.0))
            throw SingularSystem("lu_solve: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j)
                std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            S f = a(i, k) / a(k, k);
            a(i, k) = f;
            for (int j = k + 1; j < n; ++j)
                a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<S> x(n, S(0));
    for (int i = n - 1; i >= 0; --i) {
        S s = b[i];
        for (int j = i + 1; j < n; ++j)
            s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

// Stationary vector of an irreducible rate matrix by GTH elimination.
// q(i,j), i != j, are the jump rates.  No subtractions occur anywhere, so
// every entry is computed to full relative accuracy even when the chain has
// rates spanning many orders of magnitude.
template <class S> std::vector<S> gth_stationary(Mat<S> q) {
    const int n = q.rows();
    if (n == 1)
        return {S(1)};
    for (int k = n - 1; k >= 1; --k) {
        S s(0);
        for (int j = 0; j < k; ++j)
            s += q(k, j);
        if (!(to_double(s) > 0.0))
            throw NotIrreducible("gth: chain is not irreducible");
        for (int i = 0; i < k; ++i) {
            if (!(to_double(q(i, k)) != 0.0))
                continue;
            S f = q(i, k) / s;
            for (int j = 0; j < k; ++j)
                if (j != i)
                    q(i, j) += f * q(k, j);
        }
        q(k, k) = s; // stash the normalizer for the back-substitution
    }
    std::vector<S> pi(n, S(0));
    pi[0] = S(1);
    for (int k = 1; k < n; ++k) {
        S s(0);
        for (int i = 0; i < k; ++i)
            s += pi[i] * q(i, k);
        pi[k] = s / q(k, k);
    }
    S total(0);
    for (const S &v : pi)
        total += v;
    for (S &v : pi)
        v /= total;
    return pi;
}

// ---------------------------------------------------------------------------
// Log-log least squares and polynomial extrapolation.
// ---------------------------------------------------------------------------
struct LogLogFit {
    double coefficient = 0.0; // exp(intercept)
    double exponent = 0.0;    // slope
    double max_residual = 0.0;
};

inline LogLogFit loglog_least_squares(const std::vector<std::pair<double, double>> &samples) {
    const int m = static_cast<int>(samples.size());
    if (m < 2)
        throw ValidationError("loglog fit needs at least two samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto &[x, y] : samples) {
        if (!(x > 0.0) || !(y > 0.0))
            throw ValidationError("loglog fit needs positive samples");
        double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double det = m * sxx - sx * sx;
    double slope = (m * sxy - sx * sy) / det;
    double intercept = (sy - slope * sx) / m;
    double maxres = 0.0;
    for (const auto &[x, y] : samples)
        maxres = std::max(maxres, std::fabs(std::log(y) - intercept - slope * std::log(x)));
    return {std::exp(intercept), slope, maxres};
}

// Neville extrapolation of v(h) to h = 0 given samples at distinct h > 0.
inline double neville_to_zero(std::vector<std::pair<double, double>> rows) {
    const int m = static_cast<int>(rows.size());
    if (m == 0)
        throw ValidationError("neville: empty table");
    std::vector<double> t(m);
    for (int i = 0; i < m; ++i)
        t[i] = rows[i].second;
    for (int level = 1; level < m; ++level)
        for (int i = 0; i < m - level; ++i) {
            double h0 = rows[i].first, h1 = rows[i + level].first;
            t[i] = (h0 * t[i + 1] - h1 * t[i]) / (h0 - h1);
        }
    return t[0];
}

// ---------------------------------------------------------------------------
// Deterministic, platform-independent RNG: xoshiro256++ seeded by splitmix64.
// ---------------------------------------------------------------------------
inline uint64_t splitmix64_next(uint64_t &state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic sub-seed for stream `index` of a master seed.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    uint64_t sm = master;
    (void)splitmix64_next(sm);
    return splitmix64_next(sm) ^ (0x9e3779b97f4a7c15ULL * (index + 1));
}

class Xoshiro256 {
public:
    explicit Xoshiro256(uint64_t seed) {
        uint64_t sm = seed;
        for (auto &w : s_)
            w = splitmix64_next(sm);
    }

    // Deterministic stream split for replica i of a master seed.
    static Xoshiro256 for_replica(uint64_t master, uint64_t replica) {
        return Xoshiro256(derive_seed(master, replica));
    }

    uint64_t next() {
        auto rotl = [](uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(1.0 - uniform01()) / rate; }

    // Index drawn proportionally to the (nonnegative) weights.
    int pick(const std::vector<double> &weights, double total) {
        double u = uniform01() * total;
        double acc = 0.0;
        for (size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc)
                return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    uint64_t s_[4];
};

} // namespace mcld

#endif
