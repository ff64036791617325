#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "errors.hpp"

namespace ising {

using BigRational = mpq_class;
using BigInt = mpz_class;

inline std::string to_string(const BigRational& r) {
    return r.get_str();  // "p" or "p/q", already canonical
}

inline BigRational parse_rational(const std::string& s) {
    BigRational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("not a rational: " + s);
    r.canonicalize();
    return r;
}

inline BigRational rat(long p, long q = 1) {
    BigRational r(p, q);
    r.canonicalize();
    return r;
}

inline BigInt binomial(unsigned long n, unsigned long k) {
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

inline BigInt factorial(unsigned long n) {
    BigInt r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

inline BigInt catalan(unsigned long n) {
    return binomial(2 * n, n) / (n + 1);
}

// ---------------------------------------------------------------------------
// Truncated power series with exact coefficients

enum class Var { t, x, z, q_quarter };

inline const char* var_name(Var v) {
    switch (v) {
        case Var::t: return "t";
        case Var::x: return "x";
        case Var::z: return "z";
        case Var::q_quarter: return "q_quarter";
    }
    return "?";
}

inline Var parse_var(const std::string& s) {
    if (s == "t") return Var::t;
    if (s == "x") return Var::x;
    if (s == "z") return Var::z;
    if (s == "q_quarter") return Var::q_quarter;
    throw std::invalid_argument("unknown series variable: " + s);
}

struct ExactSeries {
    Var variable = Var::t;
    std::vector<BigRational> coefficients;  // size == order (exclusive truncation)

    ExactSeries() = default;
    ExactSeries(Var v, std::vector<BigRational> c) : variable(v), coefficients(std::move(c)) {}
    ExactSeries(Var v, int order) : variable(v), coefficients(std::max(order, 0)) {}

    int order() const { return int(coefficients.size()); }
    const BigRational& operator[](int i) const { return coefficients[i]; }
    BigRational& operator[](int i) { return coefficients[i]; }

    double eval(double v) const {
        double s = 0.0;
        for (int i = order() - 1; i >= 0; --i) s = s * v + coefficients[i].get_d();
        return s;
    }
    bool operator==(const ExactSeries& o) const {
        return variable == o.variable && coefficients == o.coefficients;
    }
};

enum class SeriesOp { add, mul, scalar_mul, shift, invert };

namespace detail {
inline void require_same_var(const ExactSeries& a, const ExactSeries& b) {
    if (a.variable != b.variable)
        throw TagMismatch(std::string("series variable mismatch: ") + var_name(a.variable) +
                          " vs " + var_name(b.variable));
}
}  // namespace detail

inline ExactSeries operator+(const ExactSeries& a, const ExactSeries& b) {
    detail::require_same_var(a, b);
    int n = std::min(a.order(), b.order());
    ExactSeries r(a.variable, n);
    for (int i = 0; i < n; ++i) r[i] = a[i] + b[i];
    return r;
}

inline ExactSeries operator-(const ExactSeries& a, const ExactSeries& b) {
    detail::require_same_var(a, b);
    int n = std::min(a.order(), b.order());
    ExactSeries r(a.variable, n);
    for (int i = 0; i < n; ++i) r[i] = a[i] - b[i];
    return r;
}

inline ExactSeries operator*(const ExactSeries& a, const ExactSeries& b) {
    detail::require_same_var(a, b);
    int n = std::min(a.order(), b.order());
    ExactSeries r(a.variable, n);
    for (int i = 0; i < n; ++i) {
        if (sgn(a[i]) == 0) continue;
        for (int j = 0; i + j < n; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

inline ExactSeries operator*(const BigRational& s, const ExactSeries& a) {
    ExactSeries r = a;
    for (auto& c : r.coefficients) c *= s;
    return r;
}

// Multiply by v^k, keeping the truncation order.
inline ExactSeries shift(const ExactSeries& a, int k) {
    ExactSeries r(a.variable, a.order());
    for (int i = 0; i + k < a.order(); ++i)
        if (i + k >= 0) r[i + k] = a[i];
    return r;
}

inline ExactSeries invert(const ExactSeries& a) {
    if (a.order() == 0 || sgn(a[0]) == 0) throw DomainError("invert: zero constant term");
    int n = a.order();
    ExactSeries r(a.variable, n);
    BigRational inv0 = 1 / a[0];
    r[0] = inv0;
    for (int i = 1; i < n; ++i) {
        BigRational s = 0;
        for (int j = 1; j <= i; ++j) s += a[j] * r[i - j];
        r[i] = -s * inv0;
    }
    return r;
}

inline ExactSeries derivative(const ExactSeries& a) {
    ExactSeries r(a.variable, std::max(a.order() - 1, 0));
    for (int i = 1; i < a.order(); ++i) r[i - 1] = a[i] * i;
    return r;
}

inline ExactSeries series_arith(const ExactSeries& a, const ExactSeries& b, SeriesOp op,
                                const BigRational& scalar = 1, int k = 0) {
    switch (op) {
        case SeriesOp::add: return a + b;
        case SeriesOp::mul: return a * b;
        case SeriesOp::scalar_mul: return scalar * a;
        case SeriesOp::shift: return shift(a, k);
        case SeriesOp::invert: return invert(a);
    }
    return a;
}

inline ExactSeries series_poly(Var v, const std::vector<BigRational>& c, int order) {
    ExactSeries r(v, order);
    for (int i = 0; i < int(c.size()) && i < order; ++i) r[i] = c[i];
    return r;
}

// ---------------------------------------------------------------------------
// Hypergeometric series

inline ExactSeries series_2f1(const BigRational& a, const BigRational& b, const BigRational& c,
                              int order) {
    if (c <= 0 && c.get_den() == 1) throw DomainError("series_2f1: c is a nonpositive integer");
    ExactSeries r(Var::t, order);
    if (order == 0) return r;
    r[0] = 1;
    for (int n = 0; n + 1 < order; ++n) r[n + 1] = r[n] * (a + n) * (b + n) / ((c + n) * (n + 1));
    return r;
}

// (2/pi) K = F(1/2,1/2;1;t)
inline ExactSeries series_K(int order) {
    if (order < 1) throw DomainError("series_K: order must be >= 1");
    return series_2f1(rat(1, 2), rat(1, 2), 1, order);
}

// (2/pi) E = F(-1/2,1/2;1;t)
inline ExactSeries series_E(int order) {
    if (order < 1) throw DomainError("series_E: order must be >= 1");
    return series_2f1(rat(-1, 2), rat(1, 2), 1, order);
}

// ---------------------------------------------------------------------------
// Half-integer Beta moments:
//   (1/pi) int_0^1 x^{p + sx/2} (1-x)^{s1/2} dx,  sx, s1 odd
// = Gamma(a)Gamma(b)/(pi Gamma(a+b)) with a = p+1+sx/2, b = 1+s1/2.

namespace detail {
// Gamma(n+1/2)/sqrt(pi) = (2n)!/(4^n n!)
inline BigRational gamma_half(long n) {
    if (n < 0) {
        // Gamma(1/2 - j) = (-4)^j j! sqrt(pi) / (2j)!
        long j = -n;
        BigRational r(factorial(j) * (BigInt(1) << (2 * j)), factorial(2 * j));
        r.canonicalize();
        if (j & 1) r = -r;
        return r;
    }
    BigRational r(factorial(2 * n), factorial(n) << (2 * n));
    r.canonicalize();
    return r;
}
}  // namespace detail

inline BigRational beta_moment(long p, int sx, int s1) {
    if ((sx & 1) == 0 || (s1 & 1) == 0)
        throw UnsupportedError("beta_moment: Beta value is not pi times a rational");
    long a2 = 2 * p + 2 + sx, b2 = 2 + s1;
    if (a2 <= 0 || b2 <= 0) throw DomainError("beta_moment: divergent moment");
    BigRational g = detail::gamma_half((a2 - 1) / 2) * detail::gamma_half((b2 - 1) / 2);
    BigRational r = g / BigRational(factorial((a2 + b2) / 2 - 1));
    r.canonicalize();
    return r;
}

struct HalfIntMoment {
    long p = 0;
    int sx = -1;
    int s1 = -1;
    BigRational value() const { return beta_moment(p, sx, s1); }
};

// Coefficients of (1-u)^{-1/2} and (1-u)^{1/2}
inline std::vector<BigRational> binomial_minus_half(int n) {
    std::vector<BigRational> r(n);
    for (int j = 0; j < n; ++j) {
        r[j] = BigRational(binomial(2 * j, j), BigInt(1) << (2 * j));
        r[j].canonicalize();
    }
    return r;
}

inline std::vector<BigRational> binomial_plus_half(int n) {
    auto m = binomial_minus_half(n);
    std::vector<BigRational> r(n);
    for (int j = 0; j < n; ++j) r[j] = j == 0 ? BigRational(1) : BigRational(-m[j] / (2 * j - 1));
    return r;
}

// ---------------------------------------------------------------------------
// Exact diagonal susceptibility sectors chi~_d^(n), n = 1, 2, 3.
//
// Every t-dependent integrand factor is expanded into monomials and
// integrated against the half-integer Beta moments. Odd sectors are series
// in x = t^{1/2}, even sectors in t.

namespace detail {

// geometric expansion of (1+sP)/(1-sP) = sum c_m (sP)^m
inline int geometric_coef(int m) { return m == 0 ? 1 : 2; }

inline ExactSeries chid1_series(int order) {
    // one odd variable, weight (x(1-x)(1-tx))^{-1/2}, s = t^{1/2}
    ExactSeries r(Var::x, order);
    int T = order / 2 + 1;
    auto bm = binomial_minus_half(T + 1);
    for (int m = 0; m < order; ++m)
        for (int j = 0; m + 2 * j < order; ++j)
            r[m + 2 * j] += geometric_coef(m) * bm[j] * beta_moment(m + j, -1, -1);
    return r;
}

inline ExactSeries chid2_series(int order) {
    // prefactor t; x1: x^{1/2}(1-x)^{-1/2}(1-tx)^{-1/2}, x2: x^{-1/2}(1-x)^{1/2}(1-tx)^{1/2};
    // coupling (1 - t x1 x2)^{-2}; geometric factor in s = t.
    ExactSeries r(Var::t, order);
    int T = order;  // t-index budget after the prefactor
    auto bm = binomial_minus_half(T + 1);
    auto bp = binomial_plus_half(T + 1);
    for (int s = 0; s + 1 < order; ++s) {
        // both variables carry x^s; weight W(s) = sum_{m+a=s} c_m (a+1)
        BigRational W = 0;
        for (int m = 0; m <= s; ++m) W += geometric_coef(m) * (s - m + 1);
        int len = order - 1 - s;
        std::vector<BigRational> A(len), B(len);
        for (int j = 0; j < len; ++j) {
            A[j] = bm[j] * beta_moment(s + j, +1, -1);
            B[j] = bp[j] * beta_moment(s + j, -1, +1);
        }
        for (int i = 0; i < len; ++i) {
            if (sgn(A[i]) == 0) continue;
            for (int j = 0; i + j < len; ++j) r[1 + s + i + j] += W * A[i] * B[j];
        }
    }
    return r;
}

// Dyadic fast path for chi~^(3). All moments in this sector are dyadic:
//   Lo(p)_j = binm_j M(p+j,-1,-1) = C(2j,j) C(2p+2j,p+j) / 2^{2p+4j}
//   Le(p)_j = binp_j M(p+j,+1,+1) = l_j / 2^{2p+3+4j},
//     l_0 = Cat(p+1), l_j = -2 Cat(j-1) Cat(p+j+1)
// so the contraction runs on integers with implicit power-of-two scales.
inline ExactSeries chid3_series(int order) {
    ExactSeries r(Var::x, order);
    if (order <= 4) return r;
    int Tmax = (order - 5) / 2;
    int pmax = (order - 5) / 3 + Tmax + 4;
    int jmax = Tmax + 1;
    std::vector<BigInt> cb(pmax + jmax + 2), cat(pmax + jmax + 3);
    for (int i = 0; i < int(cb.size()); ++i) cb[i] = binomial(2 * i, i);
    for (int i = 0; i < int(cat.size()); ++i) cat[i] = catalan(i);
    auto Lo = [&](int p, int len) {
        std::vector<BigInt> v(len);
        for (int j = 0; j < len; ++j) v[j] = cb[j] * cb[p + j];
        return v;
    };
    auto Le = [&](int p, int len) {
        std::vector<BigInt> v(len);
        for (int j = 0; j < len; ++j) v[j] = j == 0 ? cat[p + 1] : BigInt(-2 * cat[j - 1] * cat[p + j + 1]);
        return v;
    };
    BigInt acc;
    for (int m = 0; 4 + 3 * m < order; ++m) {
        int Tm = (order - 5 - 3 * m) / 2;
        int len = Tm + 1;
        // X_a = (a+1) Lo(m+a+2), Y_b = (b+1) Lo(m+b), Z_a = (a+1) Lo(m+a+1)
        std::vector<std::vector<BigInt>> X(len), Y(len), Z(len);
        for (int a = 0; a < len; ++a) {
            X[a] = Lo(m + a + 2, len - a);
            Y[a] = Lo(m + a, len - a);
            Z[a] = Lo(m + a + 1, len - a);
            for (auto& v : X[a]) v *= a + 1;
            for (auto& v : Y[a]) v *= a + 1;
            for (auto& v : Z[a]) v *= a + 1;
        }
        // tot[n] / 2^{6m+7+4n}
        std::vector<BigInt> tot(len);
        std::vector<BigInt> B;
        for (int K = 0; K < len; ++K) {
            int L = len - K;
            B.assign(L, BigInt(0));
            for (int a = 0; a <= K; ++a) {
                const auto& xa = X[a];
                const auto& yb = Y[K - a];
                for (int i = 0; i < L; ++i) {
                    acc = 0;
                    for (int j = 0; j <= i; ++j) mpz_addmul(acc.get_mpz_t(), xa[j].get_mpz_t(), yb[i - j].get_mpz_t());
                    B[i] += acc;
                }
            }
            for (int a = 0; 2 * a <= K; ++a) {
                int b = K - a;
                const auto& za = Z[a];
                const auto& zb = Z[b];
                for (int i = 0; i < L; ++i) {
                    acc = 0;
                    for (int j = 0; j <= i; ++j) mpz_addmul(acc.get_mpz_t(), za[j].get_mpz_t(), zb[i - j].get_mpz_t());
                    if (a == b) B[i] -= acc;
                    else B[i] -= 2 * acc;
                }
            }
            auto le = Le(m + K, L);
            for (int i = 0; i < L; ++i) {
                if (B[i] == 0) continue;
                for (int j = 0; i + j < L; ++j)
                    mpz_addmul(tot[K + i + j].get_mpz_t(), B[i].get_mpz_t(), le[j].get_mpz_t());
            }
        }
        for (int n = 0; n < len; ++n) {
            int e = 4 + 3 * m + 2 * n;
            if (e >= order) break;
            BigRational v(tot[n] * geometric_coef(m), BigInt(1) << (6 * m + 7 + 4 * n));
            v.canonicalize();
            r[e] += v;
        }
    }
    return r;
}

}  // namespace detail

inline ExactSeries series_chid(int n, int order) {
    if (order < 1) throw DomainError("series_chid: order must be >= 1");
    switch (n) {
        case 1: return detail::chid1_series(order);
        case 2: return detail::chid2_series(order);
        case 3: return detail::chid3_series(order);
        default: throw UnsupportedError("series_chid: only n = 1, 2, 3 are available exactly");
    }
}

// ---------------------------------------------------------------------------
// Phi0: sum c_n z^n -> sum c_n q^{n^2/4}, kept sparse.

struct QTerm {
    BigRational exponent;
    BigRational coefficient;
};

struct QSeriesSparse {
    std::vector<QTerm> terms;  // exponents strictly increasing

    double eval(double q) const {
        double s = 0.0;
        for (const auto& t : terms) s += t.coefficient.get_d() * std::pow(q, t.exponent.get_d());
        return s;
    }
};

inline QSeriesSparse phi0_transform(const ExactSeries& s) {
    if (s.variable != Var::z) throw TagMismatch("phi0_transform: input must be a series in z");
    QSeriesSparse r;
    for (int n = 0; n < s.order(); ++n) {
        if (sgn(s[n]) == 0) continue;
        BigRational e(n * n, 4);
        e.canonicalize();
        r.terms.push_back({e, s[n]});
    }
    return r;
}

}  // namespace ising
