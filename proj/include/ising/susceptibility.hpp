#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "exact_series.hpp"
#include "correlations.hpp"
#include "form_factors.hpp"
#include "quadrature.hpp"
#include "special_fn.hpp"

namespace ising {

// ---------------------------------------------------------------------------
// Diagonal sectors chi~_d^(n)(t)

inline double chid_closed(int n, double t) {
    if (!(t >= 0.0) || t >= 1.0) throw DomainError("chid_closed: t must lie in [0,1)");
    if (n == 1) return 1.0 / (1.0 - std::sqrt(t));
    if (n == 2) return t / (4.0 * (1.0 - t));
    throw UnsupportedError("chid_closed: closed forms exist for n = 1, 2 only");
}

// n-fold integral for chi~_d^(n), n <= 3. Odd-index variables carry
// (x(1-x))^{-1/2} (even n: x^{1/2}(1-x)^{-1/2}), even-index ones the reciprocal
// square roots; see ff_integrand for the same layout without the geometric factor.
inline IntegrandHandle chid_integrand(int n, double t, double* prefactor) {
    if (n < 1 || n > 3) throw UnsupportedError("chid_quad: n must be 1..3");
    if (!(t > 0.0) || t > 0.9) throw DomainError("chid_quad: t must lie in (0, 0.9]");
    bool even = n % 2 == 0;
    int m = even ? n / 2 : (n - 1) / 2;
    IntegrandHandle f;
    f.dim = n;
    for (int i = 0; i < n; ++i) {
        bool odd_index = i % 2 == 0;
        if (even) f.exponents.push_back(odd_index ? std::pair{0.5, -0.5} : std::pair{-0.5, 0.5});
        else f.exponents.push_back(odd_index ? std::pair{-0.5, -0.5} : std::pair{0.5, 0.5});
    }
    double s = even ? std::pow(t, m) : std::pow(t, m + 0.5);
    f.smooth = [n, t, s](const double* x) {
        double v = 1.0, prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= x[i];
        for (int i = 0; i < n; i += 2) v /= std::sqrt(1.0 - t * x[i]);
        for (int i = 1; i < n; i += 2) v *= std::sqrt(1.0 - t * x[i]);
        for (int i = 0; i < n; i += 2)
            for (int j = 1; j < n; j += 2) {
                double c = 1.0 - t * x[i] * x[j];
                v /= c * c;
            }
        for (int i = 0; i < n; i += 2)
            for (int j = i + 2; j < n; j += 2) v *= (x[i] - x[j]) * (x[i] - x[j]);
        for (int i = 1; i < n; i += 2)
            for (int j = i + 2; j < n; j += 2) v *= (x[i] - x[j]) * (x[i] - x[j]);
        return v * (1.0 + s * prod) / (1.0 - s * prod);
    };
    double norm = even ? std::pow(std::tgamma(m + 1.0), 2) * std::pow(pi, 2 * m)
                       : std::tgamma(m + 1.0) * std::tgamma(m + 2.0) * std::pow(pi, 2 * m + 1);
    double tpow = even ? double(m) * m : double(m) * (m + 1);
    *prefactor = std::pow(t, tpow) / norm;
    return f;
}

struct SectorValue {
    double value = 0.0;
    double error = 0.0;
    std::size_t nodes = 0;
    bool flagged = false;
};

inline SectorValue chid_quad(int n, double t, double tol = 1e-12, unsigned threads = 0,
                             const Config& cfg = default_config()) {
    double pre = 0.0;
    IntegrandHandle f = chid_integrand(n, t, &pre);
    QuadratureSpec spec;
    spec.dim = n;
    spec.nodes_per_axis = n == 1 ? 64 : n == 2 ? 32 : 24;
    spec.threads = threads;
    QuadResult q = refine_until(f, spec, tol / pre, cfg);
    return {pre * q.value, pre * q.error, q.nodes, q.flagged};
}

// minus: (1-t)^{1/4} sum_{n=1}^{n_max} chi~^(2n);  plus: (1-t)^{1/4} sum_{n=0}^{n_max} chi~^(2n+1).
// Available sectors: chi~^(1), chi~^(2) closed, chi~^(3) by quadrature.
struct ChidSum {
    double value = 0.0;
    double last_term = 0.0;
    double tail = 0.0;
};

inline double chid_sector(int n, double t) {
    if (n <= 2) return chid_closed(n, t);
    if (n == 3) return chid_quad(3, t).value;
    throw UnsupportedError("chid_sum: sector " + std::to_string(n) + " is not available");
}

inline ChidSum chid_sum(CorrSign sign, double t, int n_max) {
    if (!(t > 0.0) || t >= 1.0) throw DomainError("chid_sum: t must lie in (0,1)");
    std::vector<double> terms;
    if (sign == CorrSign::minus) {
        if (n_max < 1) throw DomainError("chid_sum: minus sign needs n_max >= 1");
        for (int n = 1; n <= n_max; ++n) terms.push_back(chid_sector(2 * n, t));
    } else {
        if (n_max < 0) throw DomainError("chid_sum: n_max must be >= 0");
        for (int n = 0; n <= n_max; ++n) terms.push_back(chid_sector(2 * n + 1, t));
    }
    double pre = std::pow(1.0 - t, 0.25);
    ChidSum r;
    double s = 0.0;
    for (double v : terms) s += v;
    r.value = pre * s;
    r.last_term = pre * terms.back();
    if (terms.size() >= 2 && std::abs(terms.back()) < std::abs(terms[terms.size() - 2])) {
        double q = std::abs(terms.back() / terms[terms.size() - 2]);
        r.tail = std::abs(r.last_term) * q / (1.0 - q);
    } else {
        r.tail = std::abs(r.last_term);
    }
    return r;
}

// chi~^(1) rebuilt from the diagonal form factors: f_0 + 2 sum_{N>=1} f^{(1)}_{N,N},
// stopping when the hypergeometric terms fall below tol and adding a geometric tail bound.
struct GeometricSum {
    double value = 0.0;
    double tail_bound = 0.0;
    int terms = 0;
};

inline GeometricSum chid1_from_form_factors(double t, double tol = 1e-17) {
    if (!(t > 0.0) || t > 0.9) throw DomainError("chid1_from_form_factors: t must lie in (0, 0.9]");
    GeometricSum g;
    double prev = ff_hypergeometric({1, 0}, t);
    g.value = prev;
    for (int N = 1; N < 2000; ++N) {
        double f = ff_hypergeometric({1, N}, t);
        g.value += 2.0 * f;
        g.terms = N + 1;
        double r = f / prev;
        prev = f;
        if (2.0 * f < tol && r < 1.0) {
            g.tail_bound = 2.0 * f * r / (1.0 - r);
            break;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// The three blocks of the chi~_d^(3) decomposition, each evaluated verbatim.

struct Chid3Components {
    double k = 0.0;
    double chi1_term = 0.0;  // 1/(1-k)
    double ke_term = 0.0;    // (2/pi)K/(k-1) + (2/pi)E/(k-1)^2
    double f16_term = 0.0;   // (1+2k)(k+2)/((1-k)(1+k+k^2)) {F^2 + (2Q/9) F F(7/6,4/3;2;Q)}
    double Q = 0.0;
};

inline double chid3_Q(double k) {
    double a = (1.0 + k) * k, b = k * k + k + 1.0;
    return 27.0 / 4.0 * a * a / (b * b);
}

// Q(k) = 1 at k^2 + k = 2/(3 sqrt(3) - 2)
inline double chid3_Q_threshold() {
    double y = 2.0 / (3.0 * std::sqrt(3.0) - 2.0);
    return 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * y));
}

inline Chid3Components chid3_components(double k) {
    if (!(k > 0.0) || k >= 1.0) throw DomainError("chid3_components: k must lie in (0,1)");
    double ks = chid3_Q_threshold();
    Chid3Components c;
    c.k = k;
    c.Q = chid3_Q(k);
    c.chi1_term = 1.0 / (1.0 - k);
    double m = k * k;
    c.ke_term = 2.0 / pi * ellip_K(m) / (k - 1.0) + 2.0 / pi * ellip_E(m) / ((k - 1.0) * (k - 1.0));
    if (!(k < ks))
        throw DomainError("chid3_components: Q(k) >= 1 for k >= " + std::to_string(ks) +
                          "; the 2F1 block is only defined here for Q < 1");
    double F = hyp2f1(1.0 / 6.0, 1.0 / 3.0, 1.0, c.Q);
    double G = hyp2f1(7.0 / 6.0, 4.0 / 3.0, 2.0, c.Q);
    double pre = (1.0 + 2.0 * k) * (k + 2.0) / ((1.0 - k) * (1.0 + k + k * k));
    c.f16_term = pre * (F * F + 2.0 * c.Q / 9.0 * F * G);
    return c;
}

// Exact x-series (x = k = t^{1/2}) of the three blocks, for testing them
// against an operator guessed from the chi~_d^(3) series.
struct Chid3BlockSeries {
    ExactSeries chi1, ke, f16;
};

namespace detail {

// sum_i c_i Q^i by Horner; Q must have zero constant term
inline ExactSeries compose(const ExactSeries& outer, const ExactSeries& Q) {
    int order = Q.order();
    ExactSeries r(Var::x, order);
    ExactSeries qx(Var::x, Q.coefficients);
    for (int i = outer.order() - 1; i >= 0; --i) {
        r = r * qx;
        r[0] += outer[i];
    }
    return r;
}

inline ExactSeries substitute_square(const ExactSeries& s, int order) {
    ExactSeries r(Var::x, order);
    for (int i = 0; 2 * i < order && i < s.order(); ++i) r[2 * i] = s[i];
    return r;
}

}  // namespace detail

inline Chid3BlockSeries chid3_block_series(int order) {
    if (order < 4) throw DomainError("chid3_block_series: order must be >= 4");
    Chid3BlockSeries b;
    ExactSeries one_minus_x = series_poly(Var::x, {1, -1}, order);
    ExactSeries inv1 = invert(one_minus_x);
    b.chi1 = inv1;
    // (2/pi)K/(x-1) + (2/pi)E/(x-1)^2 = -K/(1-x) + E/(1-x)^2
    int half = order / 2 + 1;
    ExactSeries Kx = detail::substitute_square(series_K(half), order);
    ExactSeries Ex = detail::substitute_square(series_E(half), order);
    b.ke = Ex * inv1 * inv1 - Kx * inv1;
    // Q = 27/4 x^2 (1+x)^2 / (1+x+x^2)^2
    ExactSeries num = series_poly(Var::x, {0, 0, rat(27, 4), rat(27, 2), rat(27, 4)}, order);
    ExactSeries cyc = series_poly(Var::x, {1, 1, 1}, order);
    ExactSeries Q = num * invert(cyc * cyc);
    ExactSeries F = detail::compose(series_2f1(rat(1, 6), rat(1, 3), 1, half), Q);
    ExactSeries G = detail::compose(series_2f1(rat(7, 6), rat(4, 3), 2, half), Q);
    ExactSeries pre = series_poly(Var::x, {2, 5, 2}, order) * invert(one_minus_x * cyc);
    b.f16 = pre * (F * F + rat(2, 9) * (Q * F * G));
    return b;
}

// ---------------------------------------------------------------------------
// Bulk leading sectors (isotropic lattice), K and E at m = k^2

inline double chi_bulk(int n, double k) {
    if (!(k >= 0.0) || k >= 1.0) throw DomainError("chi_bulk: k must lie in [0,1)");
    if (n == 1) {
        double d = 1.0 - std::sqrt(k);
        return 1.0 / (d * d);
    }
    if (n == 2) {
        double m = k * k;
        return ((1.0 + m) * ellip_E(m) - (1.0 - m) * ellip_K(m)) / (3.0 * pi * (1.0 - k) * (1.0 - m));
    }
    throw UnsupportedError("chi_bulk: closed forms exist for n = 1, 2 only");
}

// ---------------------------------------------------------------------------
// Critical behaviour

struct AmplitudeConstants {
    // 52-digit reference values, stored as given; I_minus includes the 1/(12 pi) factor separately
    static constexpr const char* I_plus = "1.000815260440212647119476363047210236937534925597789";
    static constexpr const char* I_minus_mantissa = "1.000960328725262189480934955172097320572505951770117";
    static double i_plus() { return std::stod(I_plus); }
    static double i_minus() { return std::stod(I_minus_mantissa) / (12.0 * pi); }
};

// C0 at I = 1 for equal couplings K^v = K^h = K_c:
//   2^{-1/2} coth^2(2K_c) [2 K_c coth(2K_c)]^{-7/4}
inline double critical_Kc() { return 0.5 * std::asinh(1.0); }

inline double c0_isotropic_unit() {
    double Kc = critical_Kc();
    double cth = 1.0 / std::tanh(2.0 * Kc);
    return std::pow(2.0, -0.5) * cth * cth * std::pow(2.0 * Kc * cth, -1.75);
}

// Amplitude of (1-t)^{1/4} chi^(1) in the variable (1-k), predicted from C0 at I = 1.
// With k = 1/sinh^2(2K) above T_c, 1 - k ~ K_c |dk/dK|_c (T-T_c)/T_c.
inline double amplitude_in_k(double c0) {
    double Kc = critical_Kc();
    double dk = 4.0 * std::cosh(2.0 * Kc) / std::pow(std::sinh(2.0 * Kc), 3);
    return c0 * std::pow(Kc * dk, 1.75);
}

struct ExponentFit {
    double slope = 0.0;         // fitted exponent with the (1-t)^{1/4} prefactor
    double slope_bare = 0.0;    // fitted exponent of chi^(1) alone
    double amplitude = 0.0;     // A in (1-k)^{-7/4} A (1 + c (1-k))
    double amplitude_asymptotic = 0.0;
    double I_estimate = 0.0;
    double I_reference = 0.0;
    std::vector<double> ks;
};

inline std::vector<double> default_exponent_grid(int points = 41) {
    // logarithmically spaced in 1-k from 1e-2 to 1e-4
    std::vector<double> ks;
    for (int i = 0; i < points; ++i) {
        double e = std::pow(10.0, -2.0 - 2.0 * i / double(points - 1));
        ks.push_back(1.0 - e);
    }
    return ks;
}

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double n = double(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    if (std::abs(den) < 1e-300) throw DomainError("exponent fit: degenerate grid");
    return (n * sxy - sx * sy) / den;
}

inline ExponentFit critical_exponent_fit(const std::vector<double>& ks = default_exponent_grid()) {
    if (ks.size() < 3) throw DomainError("exponent fit: need at least three grid points");
    for (double k : ks)
        if (!(k > 0.0) || k >= 1.0) throw DomainError("exponent fit: k must lie in (0,1)");
    ExponentFit r;
    r.ks = ks;
    std::vector<double> lx, ly, lb, eps, yscaled;
    for (double k : ks) {
        double e = 1.0 - k;
        double chi = chi_bulk(1, k);
        double full = std::pow((1.0 - k) * (1.0 + k), 0.25) * chi;
        lx.push_back(std::log(e));
        ly.push_back(std::log(full));
        lb.push_back(std::log(chi));
        eps.push_back(e);
        yscaled.push_back(full * std::pow(e, 1.75));
    }
    r.slope = ls_slope(lx, ly);
    r.slope_bare = ls_slope(lx, lb);
    // y = A + B eps by least squares; A is the amplitude
    double n = double(eps.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        sx += eps[i];
        sy += yscaled[i];
        sxx += eps[i] * eps[i];
        sxy += eps[i] * yscaled[i];
    }
    double B = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.amplitude = (sy - B * sx) / n;
    r.amplitude_asymptotic = amplitude_in_k(c0_isotropic_unit());
    r.I_estimate = r.amplitude / r.amplitude_asymptotic;
    r.I_reference = AmplitudeConstants::i_plus();
    return r;
}

// Local exponent of chi~^(2) near t = 1 from two points: log ratio / log ratio of (1-t)
inline double local_exponent_chid2(double e1 = 1e-4, double e2 = 1e-5) {
    double a = chid_closed(2, 1.0 - e1), b = chid_closed(2, 1.0 - e2);
    return std::log(b / a) / std::log(e2 / e1);
}

}  // namespace ising
