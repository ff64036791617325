#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "config.hpp"
#include "errors.hpp"

namespace ising {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Arithmetic-geometric mean

inline double agm(double a, double b, double tol = default_config().agm_tol) {
    for (int it = 0; it < 64; ++it) {
        double an = 0.5 * (a + b);
        double bn = std::sqrt(a * b);
        a = an;
        b = bn;
        if (std::abs(a - b) <= tol * std::abs(a)) break;
    }
    return 0.5 * (a + b);
}

// Complex AGM with the "right choice" of square root at every step: the
// root is chosen so that |a' - b'| <= |a' + b'|, ties going to Re >= 0.
// This selects the principal value of the AGM.
inline cplx agm(cplx a, cplx b, double tol = default_config().agm_tol) {
    for (int it = 0; it < 128; ++it) {
        cplx an = 0.5 * (a + b);
        cplx bn = std::sqrt(a * b);
        double dm = std::abs(an - bn), dp = std::abs(an + bn);
        if (dm > dp || (dm == dp && bn.real() < 0)) bn = -bn;
        a = an;
        b = bn;
        if (std::abs(a - b) <= tol * std::abs(a)) break;
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Complete elliptic integrals. The argument is the parameter m = k^2.

inline double ellip_K(double m) {
    if (!(m >= 0.0)) throw DomainError("ellip_K: parameter m must be >= 0");
    if (m >= 1.0) throw DomainError("ellip_K: logarithmic singularity at m = 1");
    return pi / (2.0 * agm(1.0, std::sqrt(1.0 - m)));
}

inline double ellip_E(double m) {
    if (!(m >= 0.0) || m > 1.0) throw DomainError("ellip_E: parameter m outside [0,1]");
    if (m == 1.0) return 1.0;
    double a = 1.0, b = std::sqrt(1.0 - m);
    double c = std::sqrt(m);
    double sum = 0.5 * m;
    double pw = 0.5;
    // c_{n+1} = c_n^2 / (4 a_{n+1}) avoids the cancellation in (a_n - b_n)/2
    for (int it = 0; it < 64; ++it) {
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
        c = c * c / (4.0 * a);
        pw *= 2.0;
        double term = pw * c * c;
        sum += term;
        if (term <= 1e-18 * sum) break;
    }
    return pi / (2.0 * a) * (1.0 - sum);
}

inline cplx ellip_K(cplx m) {
    cplx kp = std::sqrt(1.0 - m);
    if (std::abs(kp) == 0.0) throw DomainError("ellip_K: logarithmic singularity at m = 1");
    return pi / (2.0 * agm(cplx(1.0), kp));
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric function 2F1(a,b;c;t), real t < 1.

namespace detail {

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && std::floor(x) == x;
}

inline bool is_integer(double x, double eps = 1e-12) {
    return std::abs(x - std::round(x)) < eps;
}

inline double inv_gamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    return 1.0 / std::tgamma(x);
}

// Plain power series with a ratio-based tail bound.
inline double hyp2f1_series(double a, double b, double c, double z) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 100000; ++n) {
        double ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        term *= ratio;
        sum += term;
        if (term == 0.0) return sum;
        // once the ratio settles below 1 the remainder is bounded geometrically
        double r = std::abs((a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2.0)) * z);
        if (r < 1.0 && n > std::abs(a) + std::abs(b) &&
            std::abs(term) * r / (1.0 - r) < 1e-17 * std::abs(sum))
            return sum;
    }
    throw DomainError("hyp2f1: series did not converge");
}

}  // namespace detail

inline double hyp2f1(double a, double b, double c, double t,
                     const Config& cfg = default_config()) {
    if (detail::is_nonpositive_integer(c)) throw DomainError("hyp2f1: c is a nonpositive integer");
    if (!(t < 1.0) || t <= -1.0) throw DomainError("hyp2f1: need -1 < t < 1");
    if (t == 0.0) return 1.0;
    if (t <= cfg.hyp_near_one) return detail::hyp2f1_series(a, b, c, t);

    double w = 1.0 - t;
    double s = c - a - b;
    if (!detail::is_integer(s)) {
        double g1 = std::tgamma(c) * std::tgamma(s) * detail::inv_gamma(c - a) * detail::inv_gamma(c - b);
        double g2 = std::tgamma(c) * std::tgamma(-s) * detail::inv_gamma(a) * detail::inv_gamma(b);
        double f1 = g1 == 0.0 ? 0.0 : detail::hyp2f1_series(a, b, 1.0 - s, w);
        double f2 = g2 == 0.0 ? 0.0 : detail::hyp2f1_series(c - a, c - b, s + 1.0, w);
        return g1 * f1 + std::pow(w, s) * g2 * f2;
    }
    if (std::abs(s) < 1e-12) {
        // c = a + b: logarithmic case
        using boost::math::digamma;
        double pref = std::tgamma(a + b) * detail::inv_gamma(a) * detail::inv_gamma(b);
        double lw = std::log(w);
        double coef = 1.0, sum = 0.0;
        for (int n = 0; n < 10000; ++n) {
            double term = coef * (2.0 * digamma(n + 1.0) - digamma(a + n) - digamma(b + n) - lw);
            sum += term;
            if (n > 4 && std::abs(term) < 1e-18 * std::abs(sum)) break;
            coef *= (a + n) * (b + n) / ((n + 1.0) * (n + 1.0)) * w;
        }
        return pref * sum;
    }
    throw UnsupportedError("hyp2f1: integer c-a-b != 0 near t = 1 is not supported");
}

// ---------------------------------------------------------------------------
// Jacobi theta functions
//   th1 = 2 sum (-1)^n q^{(n+1/2)^2} sin((2n+1)u)
//   th2 = 2 sum q^{(n+1/2)^2} cos((2n+1)u)
//   th3 = 1 + 2 sum q^{n^2} cos(2nu)
//   th4 = 1 + 2 sum (-1)^n q^{n^2} cos(2nu)

struct ThetaValue {
    int index = 3;
    cplx u{};
    cplx q{};
    cplx value{};
    cplx u_derivative{};
};

namespace detail {

inline void check_nome(cplx q, const Config& cfg) {
    if (std::abs(q) > 1.0 - cfg.eps_q)
        throw PrecisionError("theta: |q| = " + std::to_string(std::abs(q)) +
                             " too close to 1 for series evaluation");
}

// q^e for real e via the principal logarithm
inline cplx qpow(cplx q, double e) {
    if (q == cplx(0.0)) return e == 0.0 ? cplx(1.0) : cplx(0.0);
    if (q.imag() == 0.0 && q.real() > 0.0) return std::pow(q.real(), e);
    return std::exp(e * std::log(q));
}

// d^k/du^k of cos(w u) and sin(w u)
inline cplx dcos(double w, cplx u, int k) {
    cplx v = std::cos(w * u + 0.5 * pi * k);
    return std::pow(w, k) * v;
}
inline cplx dsin(double w, cplx u, int k) {
    cplx v = std::sin(w * u + 0.5 * pi * k);
    return std::pow(w, k) * v;
}

}  // namespace detail

// Derivatives d^k theta_index/du^k for k = 0..kmax, term by term on one
// truncated series.
inline std::vector<cplx> theta_derivs(int index, cplx u, cplx q, int kmax,
                                      const Config& cfg = default_config()) {
    if (index < 1 || index > 4) throw DomainError("theta: index must be 1..4");
    detail::check_nome(q, cfg);
    std::vector<cplx> out(kmax + 1, cplx(0.0));
    if (index >= 3) out[0] = 1.0;
    if (q == cplx(0.0)) return out;
    double growth = std::exp(2.0 * std::abs(u.imag()));
    double aq = std::abs(q);
    for (int n = (index >= 3 ? 1 : 0); n < 100000; ++n) {
        double e = index >= 3 ? double(n) * n : (n + 0.5) * (n + 0.5);
        double w = index >= 3 ? 2.0 * n : 2.0 * n + 1.0;
        cplx qe = detail::qpow(q, e);
        double sign = ((index == 1 || index == 4) && (n & 1)) ? -1.0 : 1.0;
        for (int k = 0; k <= kmax; ++k) {
            cplx f = index == 1 ? detail::dsin(w, u, k) : detail::dcos(w, u, k);
            out[k] += 2.0 * sign * qe * f;
        }
        // bound on the next term including the worst trig/derivative growth
        double en = index >= 3 ? double(n + 1) * (n + 1) : (n + 1.5) * (n + 1.5);
        double wn = w + 2.0;
        double bound = 2.0 * std::pow(aq, en) * std::pow(growth, 0.5 * wn) * std::pow(wn, kmax);
        double scale = 0.0;
        for (auto& v : out) scale = std::max(scale, std::abs(v));
        if (scale == 0.0) scale = 1.0;
        if (bound < cfg.series_tol * scale && std::pow(aq, 2 * n + 3) * growth < 0.5) break;
    }
    return out;
}

inline ThetaValue theta(int index, cplx u, cplx q, const Config& cfg = default_config()) {
    auto d = theta_derivs(index, u, q, 1, cfg);
    return ThetaValue{index, u, q, d[0], d[1]};
}

inline double theta0(int index, double q, const Config& cfg = default_config()) {
    return theta_derivs(index, 0.0, q, 0, cfg)[0].real();
}

// q d/dq theta_index(0,q), term by term
inline double theta_qdq(int index, double q, const Config& cfg = default_config()) {
    if (index == 1) return 0.0;
    detail::check_nome(q, cfg);
    if (q == 0.0) return 0.0;
    double sum = 0.0;
    for (int n = (index >= 3 ? 1 : 0); n < 100000; ++n) {
        double e = index >= 3 ? double(n) * n : (n + 0.5) * (n + 0.5);
        double sign = (index == 4 && (n & 1)) ? -1.0 : 1.0;
        double term = 2.0 * sign * e * std::pow(q, e);
        sum += term;
        if (std::abs(term) < cfg.series_tol * std::abs(sum) && n > 1) break;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Nome and modulus

struct Nome {
    cplx q{};
    cplx tau_ratio{};       // i K(k') / K(k)
    bool boundary = false;  // exact limit (k = 0 or k = 1)
    bool branch_ambiguous = false;
};

inline Nome nome_from_modulus(cplx k) {
    Nome r;
    if (k == cplx(0.0)) {
        r.q = 0.0;
        r.tau_ratio = cplx(0.0, std::numeric_limits<double>::infinity());
        r.boundary = true;
        return r;
    }
    cplx m = k * k;
    if (std::abs(1.0 - m) == 0.0) {
        r.q = 1.0;
        r.tau_ratio = 0.0;
        r.boundary = true;
        return r;
    }
    cplx kp = std::sqrt(1.0 - m);
    // 1 - k^2 on the negative real axis sits on the principal branch cut
    cplx om = 1.0 - m;
    r.branch_ambiguous = om.real() < 0.0 && std::abs(om.imag()) < 1e-14 * std::abs(om);
    // K(k')/K(k) = agm(1,k')/agm(1,k) with K(k) = pi/(2 agm(1,k'))
    cplx ratio = agm(cplx(1.0), kp) / agm(cplx(1.0), k);
    r.tau_ratio = cplx(0.0, 1.0) * ratio;
    r.q = std::exp(-pi * ratio);
    if (k.imag() == 0.0 && k.real() > 0.0 && k.real() < 1.0) r.q = r.q.real();
    return r;
}

inline double nome_from_modulus(double k) {
    if (!(k >= 0.0) || k > 1.0) throw DomainError("nome_from_modulus: real k must lie in [0,1]");
    if (k == 0.0) return 0.0;
    if (k == 1.0) return 1.0;
    return std::exp(-pi * agm(1.0, std::sqrt((1.0 - k) * (1.0 + k))) / agm(1.0, k));
}

// k = 4 q^{1/2} prod_{n>=1} [(1+q^{2n})/(1+q^{2n-1})]^4
inline cplx modulus_from_nome(cplx q, const Config& cfg = default_config()) {
    if (std::abs(q) >= 1.0) throw DomainError("modulus_from_nome: |q| >= 1");
    detail::check_nome(q, cfg);
    if (q == cplx(0.0)) return 0.0;
    cplx prod = 1.0;
    cplx qn = q;  // q^{2n-1}
    for (int n = 1; n < 100000; ++n) {
        cplx f = (1.0 + qn * q) / (1.0 + qn);
        cplx f2 = f * f;
        prod *= f2 * f2;
        // remaining factors differ from 1 by O(|q|^{2n})
        if (std::abs(qn) * 4.0 < 1e-18) break;
        qn *= q * q;
    }
    return 4.0 * detail::qpow(q, 0.5) * prod;
}

inline double modulus_from_nome(double q, const Config& cfg = default_config()) {
    return modulus_from_nome(cplx(q), cfg).real();
}

// Second route for the same map: k = th2^2 / th3^2
inline double modulus_from_nome_theta(double q, const Config& cfg = default_config()) {
    double t2 = theta0(2, q, cfg), t3 = theta0(3, q, cfg);
    return t2 * t2 / (t3 * t3);
}

}  // namespace ising
