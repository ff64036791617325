#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "exact_series.hpp"
#include "special_fn.hpp"

namespace ising {

// ---------------------------------------------------------------------------
// Arithmetic modulo a 61-bit prime

namespace modp {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mul(u64 a, u64 b, u64 p) { return u64(u128(a) * b % p); }
inline u64 add(u64 a, u64 b, u64 p) { return a + b >= p ? a + b - p : a + b; }
inline u64 sub(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }
inline u64 pow(u64 a, u64 e, u64 p) {
    u64 r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mul(r, a, p);
        a = mul(a, a, p);
        e >>= 1;
    }
    return r;
}
inline u64 inv(u64 a, u64 p) { return pow(a, p - 2, p); }

inline u64 reduce(const BigInt& z, u64 p) {
    BigInt pp;
    mpz_import(pp.get_mpz_t(), 1, -1, sizeof(u64), 0, 0, &p);
    BigInt m;
    mpz_fdiv_r(m.get_mpz_t(), z.get_mpz_t(), pp.get_mpz_t());
    u64 out = 0;
    std::size_t cnt = 0;
    mpz_export(&out, &cnt, -1, sizeof(u64), 0, 0, m.get_mpz_t());
    return out;
}

// Returns false when the denominator vanishes mod p.
inline bool reduce(const BigRational& q, u64 p, u64& out) {
    u64 d = reduce(q.get_den(), p);
    if (d == 0) return false;
    out = mul(reduce(q.get_num(), p), inv(d, p), p);
    return true;
}

inline BigInt to_big(u64 v) {
    BigInt z;
    mpz_import(z.get_mpz_t(), 1, -1, sizeof(u64), 0, 0, &v);
    return z;
}

// Descending primes below 2^61, starting with the Mersenne prime 2^61 - 1.
inline std::vector<u64> primes(std::size_t count) {
    static std::vector<u64> cache;
    while (cache.size() < count) {
        u64 c = cache.empty() ? (u64(1) << 61) - 1 : cache.back() - 2;
        while (true) {
            BigInt z = to_big(c);
            if (mpz_probab_prime_p(z.get_mpz_t(), 40) > 0) break;
            c -= 2;
        }
        cache.push_back(c);
    }
    return {cache.begin(), cache.begin() + count};
}

struct Echelon {
    std::vector<std::vector<u64>> rows;  // reduced rows, one per pivot
    std::vector<int> pivots;
};

// Reduced row echelon form; pivot rule: first nonzero entry in column order.
inline Echelon rref(std::vector<std::vector<u64>> a, int ncols, u64 p) {
    Echelon e;
    int rk = 0, nrows = int(a.size());
    for (int c = 0; c < ncols && rk < nrows; ++c) {
        int piv = -1;
        for (int i = rk; i < nrows; ++i)
            if (a[i][c]) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(a[rk], a[piv]);
        u64 iv = inv(a[rk][c], p);
        for (int k = c; k < ncols; ++k) a[rk][k] = mul(a[rk][k], iv, p);
        for (int i = 0; i < nrows; ++i) {
            if (i == rk || !a[i][c]) continue;
            u64 f = a[i][c];
            for (int k = c; k < ncols; ++k)
                if (a[rk][k]) a[i][k] = sub(a[i][k], mul(f, a[rk][k], p), p);
        }
        e.pivots.push_back(c);
        ++rk;
    }
    a.resize(rk);
    e.rows = std::move(a);
    return e;
}

}  // namespace modp

// ---------------------------------------------------------------------------
// Operators

struct FuchsianODE {
    Var variable = Var::t;
    int order = 0;         // r
    int degree = 0;        // max degree of the D-form polynomials
    int theta_degree = 0;  // degree in the x^j theta^i search space
    // coefficients[i][e]: coefficient of x^e in the polynomial multiplying D^i; integers
    std::vector<std::vector<BigRational>> coefficients;
    int margin = 0;   // equations beyond those needed to fix the nullspace
    int nullity = 1;
    int series_order = 0;
};

struct GuessOptions {
    int max_order = 8;
    int max_degree = 40;
    int min_margin = 10;
};

namespace detail {

// Matrix of the linear system for operators sum c_ij x^j theta^i, column index i*(d+1)+j:
// row n is the coefficient of x^n, sum c_ij (n-j)^i s_{n-j}.
inline std::vector<std::vector<modp::u64>> ode_system_mod(const std::vector<modp::u64>& sm, int r, int d,
                                                          modp::u64 p) {
    int N = int(sm.size());
    int U = (r + 1) * (d + 1);
    std::vector<std::vector<modp::u64>> rows(N, std::vector<modp::u64>(U, 0));
    for (int n = 0; n < N; ++n)
        for (int j = 0; j <= d && j <= n; ++j) {
            int k = n - j;
            modp::u64 kp = modp::u64(k) % p, pw = 1;
            for (int i = 0; i <= r; ++i) {
                rows[n][i * (d + 1) + j] = modp::mul(pw, sm[k], p);
                pw = modp::mul(pw, kp, p);
            }
        }
    return rows;
}

inline std::optional<std::vector<modp::u64>> series_mod(const ExactSeries& s, modp::u64 p) {
    std::vector<modp::u64> out(s.order());
    for (int i = 0; i < s.order(); ++i)
        if (!modp::reduce(s[i], p, out[i])) return std::nullopt;
    return out;
}

// Nullspace vector with the first free column set to 1 and the other free columns 0.
inline std::vector<modp::u64> first_null_vector(const modp::Echelon& e, int U, int free_col, modp::u64 p) {
    std::vector<modp::u64> v(U, 0);
    v[free_col] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = e.rows[r][free_col] ? p - e.rows[r][free_col] : 0;
    return v;
}

inline int first_free_column(const std::vector<int>& pivots, int U) {
    std::size_t k = 0;
    for (int c = 0; c < U; ++c) {
        if (k < pivots.size() && pivots[k] == c) {
            ++k;
            continue;
        }
        return c;
    }
    return -1;
}

// a/b with |a|, b <= sqrt(M/2) and a = b v (mod M)
inline std::optional<BigRational> rational_reconstruct(const BigInt& v, const BigInt& M) {
    BigInt bound;
    BigInt half = M / 2;
    mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
    BigInt r0 = M, r1 = v, t0 = 0, t1 = 1;
    while (r1 > bound) {
        BigInt q = r0 / r1;
        BigInt r2 = r0 - q * r1;
        BigInt t2 = t0 - q * t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if (t1 == 0 || abs(t1) > bound) return std::nullopt;
    BigInt g;
    mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), t1.get_mpz_t());
    if (g != 1) return std::nullopt;
    BigRational q(r1, t1);
    q.canonicalize();
    return q;
}

// Exact residual of sum c_ij x^j theta^i applied to s, coefficient of x^n.
inline BigRational theta_residual(const std::vector<BigRational>& c, int r, int d, const ExactSeries& s, int n) {
    BigRational acc = 0;
    for (int j = 0; j <= d && j <= n; ++j) {
        int k = n - j;
        if (sgn(s[k]) == 0) continue;
        BigInt pw = 1;
        BigRational part = 0;
        for (int i = 0; i <= r; ++i) {
            const BigRational& cij = c[i * (d + 1) + j];
            if (sgn(cij) != 0) part += cij * pw;
            pw *= k;
        }
        acc += part * s[k];
    }
    return acc;
}

// Stirling numbers of the second kind S(i,l), theta^i = sum_l S(i,l) x^l D^l
inline std::vector<std::vector<BigInt>> stirling2(int n) {
    std::vector<std::vector<BigInt>> S(n + 1, std::vector<BigInt>(n + 1, 0));
    S[0][0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int l = 1; l <= i; ++l) S[i][l] = BigInt(l) * S[i - 1][l] + S[i - 1][l - 1];
    return S;
}

// Integer content removal; sign fixed so the leading polynomial's top coefficient is positive.
inline void normalize_integer(std::vector<std::vector<BigRational>>& P) {
    BigInt L = 1;
    for (auto& row : P)
        for (auto& v : row)
            if (sgn(v) != 0) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), v.get_den().get_mpz_t());
    BigInt G = 0;
    for (auto& row : P)
        for (auto& v : row) {
            v *= L;
            v.canonicalize();
            if (sgn(v) != 0) mpz_gcd(G.get_mpz_t(), G.get_mpz_t(), v.get_num().get_mpz_t());
        }
    if (G == 0) return;
    const auto& lead = P.back();
    int top = int(lead.size()) - 1;
    while (top >= 0 && sgn(lead[top]) == 0) --top;
    if (top >= 0 && sgn(lead[top]) < 0) G = -G;
    for (auto& row : P)
        for (auto& v : row) {
            v /= G;
            v.canonicalize();
        }
}

inline FuchsianODE theta_to_ode(const std::vector<BigRational>& c, int r, int d, Var var) {
    auto S = stirling2(r);
    std::vector<std::vector<BigRational>> P(r + 1, std::vector<BigRational>(d + r + 1, 0));
    for (int i = 0; i <= r; ++i)
        for (int j = 0; j <= d; ++j) {
            const BigRational& cij = c[i * (d + 1) + j];
            if (sgn(cij) == 0) continue;
            for (int l = 0; l <= i; ++l)
                if (S[i][l] != 0) P[l][j + l] += cij * S[i][l];
        }
    // drop trailing zero orders (a theta-form of order r always has D^r with x^r factor)
    while (P.size() > 1) {
        bool zero = true;
        for (auto& v : P.back()) zero = zero && sgn(v) == 0;
        if (!zero) break;
        P.pop_back();
    }
    // remove the common power of x
    int shift = int(P[0].size());
    for (auto& row : P)
        for (int e = 0; e < int(row.size()); ++e)
            if (sgn(row[e]) != 0) {
                shift = std::min(shift, e);
                break;
            }
    int maxdeg = 0;
    for (auto& row : P) {
        row.erase(row.begin(), row.begin() + std::min<int>(shift, int(row.size())));
        for (int e = 0; e < int(row.size()); ++e)
            if (sgn(row[e]) != 0) maxdeg = std::max(maxdeg, e);
    }
    for (auto& row : P) row.resize(maxdeg + 1, BigRational(0));
    normalize_integer(P);
    FuchsianODE ode;
    ode.variable = var;
    ode.order = int(P.size()) - 1;
    ode.degree = maxdeg;
    ode.theta_degree = d;
    ode.coefficients = std::move(P);
    return ode;
}

}  // namespace detail

// True when some operator of theta-order r and theta-degree d annihilates the series
// through its order with at least min_margin spare equations (modular rank test).
inline bool operator_exists_mod(const ExactSeries& s, int r, int d, int min_margin) {
    int N = s.order();
    int U = (r + 1) * (d + 1);
    if (N - (U - 1) < min_margin) return false;
    for (modp::u64 p : modp::primes(4)) {
        auto sm = detail::series_mod(s, p);
        if (!sm) continue;
        auto e = modp::rref(detail::ode_system_mod(*sm, r, d, p), U, p);
        return int(e.pivots.size()) < U;
    }
    throw PrecisionError("operator_exists_mod: no usable prime");
}

struct GuessResult {
    std::optional<FuchsianODE> ode;
    int largest_order_tried = 0;
    std::string note;
};

// Exact nullspace over Q for the (r,d) system by multi-modular elimination,
// certified by exact substitution into every coefficient of the series.
inline std::optional<std::vector<BigRational>> exact_null_vector(const ExactSeries& s, int r, int d,
                                                                 int* nullity_out = nullptr) {
    int N = s.order();
    int U = (r + 1) * (d + 1);
    std::vector<int> ref_pivots;
    std::vector<BigInt> residues;  // CRT accumulators per component
    BigInt M = 1;
    std::vector<BigRational> prev;
    int free_col = -1;
    std::size_t used = 0;
    for (std::size_t attempt = 1; attempt <= 512; ++attempt) {
        modp::u64 p = modp::primes(attempt).back();
        auto sm = detail::series_mod(s, p);
        if (!sm) continue;
        auto e = modp::rref(detail::ode_system_mod(*sm, r, d, p), U, p);
        if (int(e.pivots.size()) == U) return std::nullopt;
        if (used == 0 || e.pivots.size() > ref_pivots.size()) {
            ref_pivots = e.pivots;
            free_col = detail::first_free_column(ref_pivots, U);
            residues.assign(U, BigInt(0));
            M = 1;
            used = 0;
            prev.clear();
        } else if (e.pivots != ref_pivots) {
            continue;  // unlucky prime
        }
        if (nullity_out) *nullity_out = U - int(ref_pivots.size());
        auto v = detail::first_null_vector(e, U, free_col, p);
        BigInt P = modp::to_big(p);
        // CRT: x = r mod M, x = v mod P
        BigInt Minv;
        mpz_invert(Minv.get_mpz_t(), M.get_mpz_t(), P.get_mpz_t());
        for (int i = 0; i < U; ++i) {
            BigInt diff = modp::to_big(v[i]) - residues[i];
            BigInt t = diff * Minv;
            mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), P.get_mpz_t());
            residues[i] += M * t;
        }
        M *= P;
        ++used;
        std::vector<BigRational> cand(U);
        bool ok = true;
        for (int i = 0; i < U && ok; ++i) {
            auto q = detail::rational_reconstruct(residues[i], M);
            if (!q) ok = false;
            else cand[i] = *q;
        }
        if (!ok) continue;
        if (cand != prev) {
            prev = cand;
            continue;
        }
        bool certified = true;
        for (int n = 0; n < N && certified; ++n)
            if (sgn(detail::theta_residual(cand, r, d, s, n)) != 0) certified = false;
        if (certified) return cand;
    }
    throw PrecisionError("exact_null_vector: reconstruction did not stabilize");
}

// Smallest operator (order first, then theta-degree) annihilating the series with
// at least min_margin spare equations. Not finding one is a normal outcome.
inline GuessResult guess_ode(const ExactSeries& s, const GuessOptions& opt = {}) {
    if (s.order() < 2) throw DomainError("guess_ode: series too short");
    GuessResult res;
    int N = s.order();
    for (int r = 1; r <= opt.max_order; ++r) {
        res.largest_order_tried = r;
        for (int d = 0; d <= opt.max_degree; ++d) {
            int U = (r + 1) * (d + 1);
            if (N - (U - 1) < opt.min_margin) break;
            if (!operator_exists_mod(s, r, d, opt.min_margin)) continue;
            int nullity = 1;
            auto c = exact_null_vector(s, r, d, &nullity);
            if (!c) continue;
            FuchsianODE ode = detail::theta_to_ode(*c, r, d, s.variable);
            ode.margin = N - (U - 1);
            ode.nullity = nullity;
            ode.series_order = N;
            res.ode = std::move(ode);
            return res;
        }
    }
    res.note = "no operator with order <= " + std::to_string(opt.max_order) + " and margin >= " +
               std::to_string(opt.min_margin) + " from " + std::to_string(N) + " coefficients";
    return res;
}

// ---------------------------------------------------------------------------
// Verification in D-form: coefficient of x^n in sum_l p_l(x) D^l y.

struct AnnihilationReport {
    bool annihilates = false;
    int first_failure = -1;
    int checked = 0;
};

inline AnnihilationReport verify_annihilation(const FuchsianODE& ode, const ExactSeries& s) {
    if (ode.variable != s.variable) throw TagMismatch("verify_annihilation: variable tags differ");
    AnnihilationReport rep;
    int N = s.order();
    int last = N - 1 - ode.order;
    rep.annihilates = true;
    for (int n = 0; n <= last; ++n) {
        BigRational acc = 0;
        for (int l = 0; l <= ode.order; ++l)
            for (int e = 0; e < int(ode.coefficients[l].size()) && e <= n; ++e) {
                const BigRational& c = ode.coefficients[l][e];
                if (sgn(c) == 0) continue;
                int m = n - e + l;  // index of the series coefficient
                BigInt ff = 1;
                for (int k = 0; k < l; ++k) ff *= m - k;
                acc += c * ff * s[m];
            }
        ++rep.checked;
        if (sgn(acc) != 0) {
            rep.annihilates = false;
            rep.first_failure = n;
            return rep;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Polynomials over Q (low to high) and the singular points of an operator

using Poly = std::vector<BigRational>;

namespace poly {

inline void trim(Poly& p) {
    while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}
inline int deg(const Poly& p) { return int(p.size()) - 1; }

inline Poly derivative(const Poly& p) {
    Poly d;
    for (int i = 1; i < int(p.size()); ++i) d.push_back(p[i] * i);
    trim(d);
    return d;
}

inline void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
    r = a;
    trim(r);
    q.assign(std::max(0, deg(r) - deg(b) + 1), BigRational(0));
    while (!r.empty() && deg(r) >= deg(b)) {
        BigRational c = r.back() / b.back();
        int sh = deg(r) - deg(b);
        q[sh] = c;
        for (int i = 0; i <= deg(b); ++i) r[i + sh] -= c * b[i];
        trim(r);
    }
    trim(q);
}

inline Poly monic(Poly p) {
    trim(p);
    if (p.empty()) return p;
    BigRational l = p.back();
    for (auto& v : p) v /= l;
    return p;
}

inline Poly gcd(Poly a, Poly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly q, r;
        divmod(a, b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a);
}

inline Poly sub(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), BigRational(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

inline Poly exact_div(const Poly& a, const Poly& b) {
    Poly q, r;
    divmod(a, b, q, r);
    return q;
}

// Yun's algorithm: factors f_i (monic, squarefree, pairwise coprime) with f = c prod f_i^i
inline std::vector<std::pair<Poly, int>> squarefree(Poly f) {
    f = monic(f);
    std::vector<std::pair<Poly, int>> out;
    if (deg(f) < 1) return out;
    Poly fp = derivative(f);
    Poly a = gcd(f, fp);
    Poly b = exact_div(f, a);
    Poly c = exact_div(fp, a);
    Poly d = sub(c, derivative(b));
    for (int i = 1; deg(b) >= 1; ++i) {
        Poly g = gcd(b, d);
        if (deg(g) >= 1) out.push_back({g, i});
        Poly b2 = exact_div(b, g);
        Poly c2 = exact_div(d, g);
        d = sub(c2, derivative(b2));
        b = std::move(b2);
    }
    return out;
}

// Cyclotomic polynomial Phi_m by exact division of x^m - 1
inline Poly cyclotomic(int m) {
    Poly p(m + 1, BigRational(0));
    p[0] = -1;
    p[m] = 1;
    for (int d = 1; d < m; ++d)
        if (m % d == 0) p = exact_div(p, cyclotomic(d));
    return p;
}

// Aberth iteration for the roots of a squarefree polynomial
inline std::vector<cplx> roots(const Poly& p) {
    int n = deg(p);
    std::vector<cplx> z;
    if (n < 1) return z;
    std::vector<double> c(n + 1);
    for (int i = 0; i <= n; ++i) c[i] = BigRational(p[i] / p[n]).get_d();
    if (n == 1) return {cplx(-c[0])};
    double R = 0.0;
    for (int i = 0; i < n; ++i) R = std::max(R, std::pow(std::abs(c[i]), 1.0 / (n - i)));
    R = std::max(R, 1e-3);
    for (int k = 0; k < n; ++k) z.push_back(std::polar(R, 2.0 * pi * k / n + 0.4));
    auto eval = [&](cplx x, cplx& dv) {
        cplx v = c[n];
        dv = 0.0;
        for (int i = n - 1; i >= 0; --i) {
            dv = dv * x + v;
            v = v * x + c[i];
        }
        return v;
    };
    for (int it = 0; it < 2000; ++it) {
        double move = 0.0;
        for (int k = 0; k < n; ++k) {
            cplx dv;
            cplx v = eval(z[k], dv);
            if (v == cplx(0.0)) continue;
            cplx ratio = v / dv;
            cplx s = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != k) s += 1.0 / (z[k] - z[j]);
            cplx w = ratio / (1.0 - ratio * s);
            z[k] -= w;
            move = std::max(move, std::abs(w) / std::max(1.0, std::abs(z[k])));
        }
        if (move < 1e-15) break;
    }
    for (auto& r : z) {
        if (std::abs(r.imag()) < 1e-12 * std::max(1.0, std::abs(r))) r = cplx(r.real(), 0.0);
        if (std::abs(r.real()) < 1e-14) r = cplx(0.0, r.imag());
    }
    return z;
}

}  // namespace poly

struct SingularPoint {
    cplx root{};
    int multiplicity = 1;
};

struct CyclotomicFactor {
    int m = 0;
    int multiplicity = 0;
};

struct SingularPointReport {
    std::vector<SingularPoint> points;
    std::vector<CyclotomicFactor> cyclotomic;
    int x_power = 0;  // multiplicity of the root 0
};

inline Poly leading_polynomial(const FuchsianODE& ode) {
    Poly p = ode.coefficients.back();
    poly::trim(p);
    return p;
}

inline SingularPointReport singular_points(const FuchsianODE& ode, int max_cyclotomic = 60) {
    Poly L = leading_polynomial(ode);
    if (poly::deg(L) < 1) throw DomainError("singular_points: leading polynomial is constant");
    SingularPointReport rep;
    for (const auto& [f, mult] : poly::squarefree(L))
        for (cplx z : poly::roots(f)) rep.points.push_back({z, mult});
    std::sort(rep.points.begin(), rep.points.end(), [](const SingularPoint& a, const SingularPoint& b) {
        double ma = std::abs(a.root), mb = std::abs(b.root);
        if (std::abs(ma - mb) > 1e-9) return ma < mb;
        return std::arg(a.root) < std::arg(b.root);
    });
    Poly rest = L;
    while (!rest.empty() && sgn(rest[0]) == 0) {
        rest.erase(rest.begin());
        ++rep.x_power;
    }
    for (int m = 1; m <= max_cyclotomic && poly::deg(rest) >= 1; ++m) {
        Poly phi = poly::cyclotomic(m);
        if (poly::deg(phi) > poly::deg(rest)) continue;
        int k = 0;
        while (poly::deg(rest) >= poly::deg(phi)) {
            Poly q, r;
            poly::divmod(rest, phi, q, r);
            if (!r.empty()) break;
            rest = std::move(q);
            ++k;
        }
        if (k > 0) rep.cyclotomic.push_back({m, k});
    }
    return rep;
}

// Whether every root of x^e = 1 is a root of the leading polynomial (exact test:
// each cyclotomic factor Phi_m, m | e, divides it).
inline bool contains_roots_of_unity(const SingularPointReport& rep, int e) {
    for (int m = 1; m <= e; ++m) {
        if (e % m) continue;
        bool found = false;
        for (const auto& c : rep.cyclotomic) found = found || c.m == m;
        if (!found) return false;
    }
    return true;
}

}  // namespace ising
