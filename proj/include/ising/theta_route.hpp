#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "config.hpp"
#include "errors.hpp"
#include "exact_series.hpp"
#include "special_fn.hpp"

namespace ising {

enum class ZKind { f00, f11 };

// n is the particle number.
//   f00:  2^n z^n (1-z^2) / (1+z^2)^{n+1}
//   f11:  2^n 2(n+1) z^{n+1} (1-z^2) / (1+z^2)^{n+2}
// computed by exact division of the numerator by the power of (1+z^2).
inline ExactSeries rational_z_expansion(int n, ZKind kind, int order) {
    if (n < 0) throw DomainError("rational_z_expansion: n must be >= 0");
    int lead = kind == ZKind::f00 ? n : n + 1;
    int pw = kind == ZKind::f00 ? n + 1 : n + 2;
    BigRational scale = BigRational(BigInt(1) << n) * (kind == ZKind::f00 ? 1 : 2 * (n + 1));
    ExactSeries num(Var::z, order), den(Var::z, order);
    if (lead < order) num[lead] = scale;
    if (lead + 2 < order) num[lead + 2] = -scale;
    // (1+z^2)^pw by binomial coefficients
    for (int j = 0; j <= pw && 2 * j < order; ++j) den[2 * j] = BigRational(binomial(pw, j));
    return num * invert(den);
}

// Coefficients from the closed product forms, used as a second route:
//   even n = 2p:  2(-1)^p/(2p)! (-1)^j 4^p prod_{m<p} (j^2 - m^2)            at z^{2j}
//   odd n = 2p+1: 2(-1)^p/(2p+1)! (-1)^j (2j+1) prod_{m<p} ((2j+1)^2-(2m+1)^2) at z^{2j+1}
inline ExactSeries f00_product_expansion(int n, int order) {
    ExactSeries r(Var::z, order);
    int p = n / 2;
    bool odd = n % 2 == 1;
    BigRational pref(2, factorial(n));
    pref.canonicalize();
    if (p & 1) pref = -pref;
    for (int j = 0;; ++j) {
        int e = odd ? 2 * j + 1 : 2 * j;
        if (e >= order) break;
        BigInt prod = 1;
        if (odd) {
            prod = 2 * j + 1;
            for (int m = 0; m < p; ++m) prod *= BigInt((2 * j + 1) * (2 * j + 1) - (2 * m + 1) * (2 * m + 1));
        } else {
            prod = BigInt(1) << (2 * p);
            for (int m = 0; m < p; ++m) prod *= BigInt(j * j - m * m);
        }
        BigRational v = pref * prod;
        r[e] = (j & 1) ? BigRational(-v) : v;
    }
    return r;
}

namespace detail {

struct ThetaAtZero {
    double q = 0, th2 = 0, th3 = 0, th4 = 0;
};

inline ThetaAtZero thetas_for_modulus(double k, const Config& cfg) {
    if (!(k > 0.0) || !(k < 1.0)) throw DomainError("theta route: k must lie in (0,1)");
    ThetaAtZero r;
    r.q = nome_from_modulus(k);
    if (r.q > 1.0 - cfg.eps_q) throw PrecisionError("theta route: q too close to 1 (k near 1)");
    r.th2 = theta0(2, r.q, cfg);
    r.th3 = theta0(3, r.q, cfg);
    r.th4 = theta0(4, r.q, cfg);
    return r;
}

// number of z-coefficients so that q^{M^2/4} is negligible against the leading term
inline int z_order_for(double q, int n) {
    double lq = -std::log(std::max(q, 1e-300));
    double lead = (n + 1.0) * (n + 1.0) / 4.0;
    int M = int(std::ceil(2.0 * std::sqrt(lead + 75.0 / lq))) + 2 * n + 8;
    return std::min(M, 4000);
}

inline const ExactSeries& cached_expansion(int n, ZKind kind, int order) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, ExactSeries> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n, int(kind), order);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, rational_z_expansion(n, kind, order)).first;
    return it->second;
}

}  // namespace detail

inline constexpr int theta_route_max_n = 8;

// f^{(n)}_{0,0}(k) from the theta-derivative sums. The operator product
// prod (q d/dq - m^2) acting on a q^{j^2} term is the polynomial prod (j^2 - m^2),
// so everything reduces to one lacunary q-series.
inline double f00_theta(int n, double k, const Config& cfg = default_config()) {
    if (n < 1 || n > theta_route_max_n) throw DomainError("f00_theta: n must be in 1..8");
    auto th = detail::thetas_for_modulus(k, cfg);
    double q = th.q;
    int p = n / 2;
    bool odd = n % 2 == 1;
    double sum = 0.0;
    for (int j = p; j < 100000; ++j) {
        double term;
        if (odd) {
            double a = 2.0 * j + 1.0;
            term = a * std::pow(q, a * a / 4.0);
            for (int m = 0; m < p; ++m) term *= a * a - (2.0 * m + 1.0) * (2.0 * m + 1.0);
        } else {
            term = std::pow(q, double(j) * j);
            for (int m = 0; m < p; ++m) term *= double(j) * j - double(m) * m;
        }
        if (j & 1) term = -term;
        sum += term;
        if (j > p + 1 && std::abs(term) < 1e-18 * std::abs(sum)) break;
        if (term == 0.0 && j > p) break;
    }
    double fact = std::tgamma(n + 1.0);
    double pref = 2.0 / fact * ((p & 1) ? -1.0 : 1.0);
    if (odd) return th.th3 / (th.th2 * th.th4) * pref * sum;
    return pref * std::pow(4.0, p) * sum / th.th4;
}

// f^{(n)}_{1,1}(k) = ph / (th2 th3 th4) * Phi0(f11 expansion),
// ph = 1 for even n and k^{-1/2} = th3/th2 for odd n.
inline double f11_theta(int n, double k, const Config& cfg = default_config()) {
    if (n < 1 || n > theta_route_max_n) throw DomainError("f11_theta: n must be in 1..8");
    auto th = detail::thetas_for_modulus(k, cfg);
    int order = detail::z_order_for(th.q, n + 1);
    const ExactSeries& zs = detail::cached_expansion(n, ZKind::f11, order);
    double sum = 0.0;
    for (int e = 0; e < zs.order(); ++e) {
        if (sgn(zs[e]) == 0) continue;
        sum += zs[e].get_d() * std::pow(th.q, double(e) * e / 4.0);
    }
    double ph = n % 2 == 1 ? th.th3 / th.th2 : 1.0;
    return ph * sum / (th.th2 * th.th3 * th.th4);
}

// Same f00 through the generic Phi0 of the exact z-expansion.
inline double f00_theta_phi0(int n, double k, const Config& cfg = default_config()) {
    if (n < 1 || n > theta_route_max_n) throw DomainError("f00_theta: n must be in 1..8");
    auto th = detail::thetas_for_modulus(k, cfg);
    int order = detail::z_order_for(th.q, n);
    QSeriesSparse qs = phi0_transform(detail::cached_expansion(n, ZKind::f00, order));
    double ph = n % 2 == 1 ? th.th3 / th.th2 : 1.0;
    return ph * qs.eval(th.q) / th.th4;
}

}  // namespace ising
