#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "exact_series.hpp"
#include "quadrature.hpp"
#include "special_fn.hpp"
#include "theta_route.hpp"

namespace ising {

struct FormFactorKey {
    int n = 1;  // particle number
    int N = 0;  // diagonal separation
    bool below_tc() const { return n % 2 == 0; }
    auto operator<=>(const FormFactorKey&) const = default;
};

// f = scale * t^{t_power} * sum_j poly_j(t) Kh^{a_j} Eh^{b_j},
// Kh = (2/pi) K(t), Eh = (2/pi) E(t); polynomials in ascending order.
struct KETerm {
    int a = 0;
    int b = 0;
    std::vector<BigRational> poly;
};

struct KEExpression {
    BigRational scale = 1;
    BigRational t_power = 0;
    std::vector<KETerm> terms;

    double eval(double t) const {
        double kh = 2.0 / pi * ellip_K(t), eh = 2.0 / pi * ellip_E(t);
        double s = 0.0;
        for (const auto& term : terms) {
            double p = 0.0;
            for (int i = int(term.poly.size()) - 1; i >= 0; --i) p = p * t + term.poly[i].get_d();
            s += p * std::pow(kh, term.a) * std::pow(eh, term.b);
        }
        return scale.get_d() * std::pow(t, t_power.get_d()) * s;
    }

    // Exact t-series of sum_j poly_j Kh^a Eh^b (without scale and t_power).
    ExactSeries bracket_series(int order) const {
        ExactSeries K = series_K(order), E = series_E(order);
        ExactSeries total(Var::t, order);
        for (const auto& term : terms) {
            ExactSeries s = series_poly(Var::t, term.poly, order);
            for (int i = 0; i < term.a; ++i) s = s * K;
            for (int i = 0; i < term.b; ++i) s = s * E;
            total = total + s;
        }
        return total;
    }
};

enum class CatalogueVariant { printed, corrected };

namespace detail {

inline std::vector<BigRational> P(std::initializer_list<long> c) {
    std::vector<BigRational> r;
    for (long v : c) r.emplace_back(v);
    return r;
}

inline KEExpression ke(long lhs, int lhs_t2, std::vector<KETerm> terms) {
    KEExpression e;
    e.scale = BigRational(1, lhs);
    e.scale.canonicalize();
    e.t_power = BigRational(-lhs_t2, 2);
    e.t_power.canonicalize();
    e.terms = std::move(terms);
    return e;
}

// Each entry: left-hand factor L t^{t2/2} f = sum poly * Kh^a Eh^b.
inline std::map<FormFactorKey, KEExpression> build_catalogue(CatalogueVariant v) {
    bool fix = v == CatalogueVariant::corrected;
    std::map<FormFactorKey, KEExpression> c;
    // f(1,0) = Kh
    c[{1, 0}] = ke(1, 0, {{1, 0, P({1})}});
    // t^{1/2} f(1,1) = Kh - Eh
    c[{1, 1}] = ke(1, 1, {{1, 0, P({1})}, {0, 1, P({-1})}});
    // 3t f(1,2) = (t+2)Kh - 2(t+1)Eh
    c[{1, 2}] = ke(3, 2, {{1, 0, P({2, 1})}, {0, 1, P({-2, -2})}});
    // 15 t^{3/2} f(1,3) = (4t^2+3t+8)Kh - (8t^2+7t+8)Eh
    c[{1, 3}] = ke(15, 3, {{1, 0, P({8, 3, 4})}, {0, 1, P({-8, -7, -8})}});
    // 105 t^2 f(1,4) = (24t^3+17t^2+16t+48)Kh - (48t^3+40t^2+40t+48)Eh
    c[{1, 4}] = ke(105, 4, {{1, 0, P({48, 16, 17, 24})}, {0, 1, P({-48, -40, -40, -48})}});

    // 2 f(2,0) = Kh (Kh - Eh)
    c[{2, 0}] = ke(2, 0, {{2, 0, P({1})}, {1, 1, P({-1})}});
    // 2 f(2,1) = 1 - Kh {(t-2)Kh + 3Eh}
    c[{2, 1}] = ke(2, 0, {{0, 0, P({1})}, {2, 0, P({2, -1})}, {1, 1, P({-3})}});
    // 6t f(2,2) = 6t - {(6t^2-11t+2)Kh^2 + (15t-4)KhEh + 2(t+1)Eh^2}
    c[{2, 2}] = ke(6, 2, {{0, 0, P({0, 6})}, {2, 0, P({-2, 11, -6})}, {1, 1, P({4, -15})}, {0, 2, P({-2, -2})}});
    // 90 t^2 f(2,3) = 135t^2 - {(137t^3-242t^2+52t+8)Kh^2 - (8t^3-319t^2+122t+16)KhEh
    //                           + 4(t+1)(2t^2+13t+2)Eh^2}      [corrected: 122t -> 112t]
    c[{2, 3}] = ke(90, 4, {{0, 0, P({0, 0, 135})},
                           {2, 0, P({-8, -52, 242, -137})},
                           {1, 1, fix ? P({16, 112, -319, 8}) : P({16, 122, -319, 8})},
                           {0, 2, P({-8, -60, -60, -8})}});
    // 3150 t^3 f(2,4) = 6300 t^2 - {(32t^5+6440t^4-1119t^3+2552t^2+464t+128)Kh^2
    //     - (128t^5+576t^4-14519t^3+548t^2+1056t+256)KhEh + (1+t)(16t^4+58t^3+333t^2+58t+16)Eh^2}
    // corrected: 6300t^3, -11191t^3, 5648t^2, and 8(1+t)(...) on Eh^2
    if (fix)
        c[{2, 4}] = ke(3150, 6, {{0, 0, P({0, 0, 0, 6300})},
                                 {2, 0, P({-128, -464, -2552, 11191, -6440, -32})},
                                 {1, 1, P({256, 1056, 5648, -14519, 576, 128})},
                                 {0, 2, P({-128, -592, -3128, -3128, -592, -128})}});
    else
        c[{2, 4}] = ke(3150, 6, {{0, 0, P({0, 0, 6300})},
                                 {2, 0, P({-128, -464, -2552, 1119, -6440, -32})},
                                 {1, 1, P({256, 1056, 548, -14519, 576, 128})},
                                 {0, 2, P({-16, -74, -391, -391, -74, -16})}});

    // 6 f(3,0) = Kh - Kh^2 {(t-2)Kh + 3Eh}
    c[{3, 0}] = ke(6, 0, {{1, 0, P({1})}, {3, 0, P({2, -1})}, {2, 1, P({-3})}});
    // 6 t^{1/2} f(3,1) = 4(Kh - Eh) - Kh {(2t-3)Kh^2 + 6KhEh - 3Eh^2}
    c[{3, 1}] = ke(6, 1, {{1, 0, P({4})}, {0, 1, P({-4})}, {3, 0, P({3, -2})}, {2, 1, P({-6})}, {1, 2, P({3})}});
    // 18 t f(3,2) = 7{(t+2)Kh - 2(t+1)Eh}
    //   - {3(t^2-2)Kh^3 - 3(2t^2-11t+2)Kh^2Eh - 36(t-1)KhEh^2 - 24Eh^3}
    c[{3, 2}] = ke(18, 2, {{1, 0, P({14, 7})},
                           {0, 1, P({-14, -14})},
                           {3, 0, P({6, 0, -3})},
                           {2, 1, P({6, -33, 6})},
                           {1, 2, P({-36, 36})},
                           {0, 3, P({24})}});
    // 270 t^{5/2} f(3,3) = 30{(4t^2+3t+8)Kh - (8t^2+7t+8) t Eh}
    //   - {(72t^4-158t^3+189t^2-156t+8)Kh^3 - 6(24t^4-108t^3+29t^2-6t+4)Kh^2Eh
    //      - 3(232t^3-111t^2-180t-8)KhEh^2 - 4(t+1)(2t^2+103t+2) t Eh^3}
    // corrected: the factor t multiplies the whole first brace, not Eh; no t on Eh^3
    c[{3, 3}] = ke(270, 5, {{1, 0, fix ? P({0, 240, 90, 120}) : P({240, 90, 120})},
                            {0, 1, P({0, -240, -210, -240})},
                            {3, 0, P({-8, 156, -189, 158, -72})},
                            {2, 1, P({24, -36, 174, -648, 144})},
                            {1, 2, P({-24, -540, -333, 696})},
                            {0, 3, fix ? P({8, 420, 420, 8}) : P({0, 8, 420, 420, 8})}});

    // 24 f(4,0) = 4 Kh(Kh - Eh) - Kh^2 {(2t-3)Kh^2 + 6KhEh - 3Eh^2}
    c[{4, 0}] = ke(24, 0, {{2, 0, P({4})}, {1, 1, P({-4})}, {4, 0, P({3, -2})}, {3, 1, P({-6})}, {2, 2, P({3})}});
    // 24 f(4,1) = 9 - 10 Kh{(t-2)Kh + 3Eh} + Kh^2 {(t^2-6t+6)Kh^2 + 10(t-2)KhEh + 15Eh^2}
    c[{4, 1}] = ke(24, 0, {{0, 0, P({9})},
                           {2, 0, P({20, -10})},
                           {1, 1, P({-30})},
                           {4, 0, P({6, -6, 1})},
                           {3, 1, P({-20, 10})},
                           {2, 2, P({15})}});
    // 72 t f(4,2) = 72t - 16{(6t^2-11t+2)Kh^2 + (15t-4)KhEh + 2(t+1)Eh^2}
    //   + {(24t^3-98t^2+113t-36)Kh^4 + 2(74t^2-157t+66)Kh^3Eh + 3(71t-60)Kh^2Eh^2
    //      + 12(t+9)KhEh^3 - 24Eh^4}
    c[{4, 2}] = ke(72, 2, {{0, 0, P({0, 72})},
                           {2, 0, P({-32, 176, -96})},
                           {1, 1, P({64, -240})},
                           {0, 2, P({-32, -32})},
                           {4, 0, P({-36, 113, -98, 24})},
                           {3, 1, P({132, -314, 148})},
                           {2, 2, P({-180, 213})},
                           {1, 3, P({108, 12})},
                           {0, 4, P({-24})}});
    return c;
}

inline const std::map<FormFactorKey, KEExpression>& catalogue(CatalogueVariant v) {
    static const auto printed = build_catalogue(CatalogueVariant::printed);
    static const auto corrected = build_catalogue(CatalogueVariant::corrected);
    return v == CatalogueVariant::printed ? printed : corrected;
}

}  // namespace detail

inline bool in_catalogue(FormFactorKey key) {
    return detail::catalogue(CatalogueVariant::printed).count(key) > 0;
}

// Entries whose printed transcription disagrees with the defining integral.
inline bool catalogue_has_correction(FormFactorKey key) {
    return key == FormFactorKey{2, 3} || key == FormFactorKey{2, 4} || key == FormFactorKey{3, 3};
}

inline std::vector<FormFactorKey> catalogue_keys() {
    std::vector<FormFactorKey> keys;
    for (const auto& [k, v] : detail::catalogue(CatalogueVariant::printed)) keys.push_back(k);
    return keys;
}

inline KEExpression ff_closed_form(FormFactorKey key, CatalogueVariant v = CatalogueVariant::corrected) {
    const auto& c = detail::catalogue(v);
    auto it = c.find(key);
    if (it == c.end())
        throw UnsupportedError("ff_closed_form: (n=" + std::to_string(key.n) + ", N=" + std::to_string(key.N) +
                               ") is not in the closed-form catalogue");
    return it->second;
}

// ---------------------------------------------------------------------------
// Quadrature route

struct FFIntegral {
    IntegrandHandle integrand;
    double prefactor = 1.0;
    double t_exponent = 0.0;  // prefactor = t^{t_exponent} / norm
};

// Leading power of t in f^{(n)}_{N,N}
inline BigRational ff_leading_power(FormFactorKey key) {
    if (key.n % 2 == 0) {
        long m = key.n / 2;
        return BigRational(m * (key.N + m));
    }
    long m = (key.n - 1) / 2;
    BigRational r = BigRational(2 * m + 1, 2) * key.N + m * (m + 1);
    r.canonicalize();
    return r;
}

// Variables x_1..x_n are stored at index 0..n-1; odd-index variables
// (x_1, x_3, ...) form one group, even-index ones the other.
inline FFIntegral ff_integrand(FormFactorKey key, double t, const Config& cfg = default_config()) {
    if (key.n < 1 || key.n > 4) throw UnsupportedError("ff_integrand: quadrature route supports n <= 4");
    if (key.N < 0) throw DomainError("ff_integrand: N must be >= 0");
    if (!(t > 0.0) || t > cfg.t_max_quadrature) throw DomainError("ff_integrand: t must lie in (0, 0.95]");
    int n = key.n, N = key.N;
    bool even = n % 2 == 0;
    int m = even ? n / 2 : (n - 1) / 2;
    FFIntegral r;
    r.integrand.dim = n;
    for (int i = 0; i < n; ++i) {
        bool odd_index = i % 2 == 0;
        double a, b;
        if (even) {
            // odd index: x^{1/2}(1-x)^{-1/2}; even index: x^{-1/2}(1-x)^{1/2}
            a = odd_index ? 0.5 : -0.5;
            b = odd_index ? -0.5 : 0.5;
        } else {
            // odd index: x^{-1/2}(1-x)^{-1/2}; even index: x^{1/2}(1-x)^{1/2}
            a = odd_index ? -0.5 : 0.5;
            b = odd_index ? -0.5 : 0.5;
        }
        r.integrand.exponents.push_back({a + N, b});
    }
    // (1 - t x)^{-1/2} on the group carrying (1-x)^{-1/2}, (1 - t x)^{+1/2} on the other
    r.integrand.smooth = [n, t](const double* x) {
        double s = 1.0;
        for (int i = 0; i < n; i += 2) s /= std::sqrt(1.0 - t * x[i]);
        for (int i = 1; i < n; i += 2) s *= std::sqrt(1.0 - t * x[i]);
        for (int i = 0; i < n; i += 2)
            for (int j = 1; j < n; j += 2) {
                double c = 1.0 - t * x[i] * x[j];
                s /= c * c;
            }
        for (int i = 0; i < n; i += 2)
            for (int j = i + 2; j < n; j += 2) s *= (x[i] - x[j]) * (x[i] - x[j]);
        for (int i = 1; i < n; i += 2)
            for (int j = i + 2; j < n; j += 2) s *= (x[i] - x[j]) * (x[i] - x[j]);
        return s;
    };
    double norm;
    if (even) norm = std::pow(std::tgamma(m + 1.0), 2) * std::pow(pi, 2 * m);
    else norm = std::tgamma(m + 1.0) * std::tgamma(m + 2.0) * std::pow(pi, 2 * m + 1);
    r.t_exponent = ff_leading_power(key).get_d();
    r.prefactor = std::pow(t, r.t_exponent) / norm;
    return r;
}

inline std::size_t ff_default_nodes(int n) {
    switch (n) {
        case 1: return 96;
        case 2: return 64;
        case 3: return 48;
        default: return 32;
    }
}

struct FFValue {
    double value = 0.0;
    double error = 0.0;
    bool flagged = false;
};

enum class FFRoute { quadrature, closed_form, hypergeometric, theta };

inline const char* route_name(FFRoute r) {
    switch (r) {
        case FFRoute::quadrature: return "quad";
        case FFRoute::closed_form: return "closed";
        case FFRoute::hypergeometric: return "hyp";
        case FFRoute::theta: return "theta";
    }
    return "?";
}

inline FFRoute parse_route(const std::string& s) {
    if (s == "quad" || s == "quadrature") return FFRoute::quadrature;
    if (s == "closed" || s == "closed_form") return FFRoute::closed_form;
    if (s == "hyp" || s == "hypergeometric") return FFRoute::hypergeometric;
    if (s == "theta") return FFRoute::theta;
    throw std::invalid_argument("unknown route: " + s);
}

inline FFValue ff_quadrature(FormFactorKey key, double t, std::size_t nodes = 0, unsigned threads = 0,
                             double tol = 1e-10) {
    FFIntegral fi = ff_integrand(key, t);
    QuadratureSpec spec;
    spec.dim = key.n;
    spec.nodes_per_axis = nodes ? nodes : ff_default_nodes(key.n);
    spec.substitution = Substitution::trig;
    spec.threads = threads;
    spec.tol = tol;
    QuadResult q = integrate(fi.integrand, spec);
    return {fi.prefactor * q.value, fi.prefactor * q.error, fi.prefactor * q.error > tol};
}

// f^{(1)}_{N,N} = t^{N/2} C(2N,N)/4^N F(1/2, N+1/2; N+1; t)
inline double ff_hypergeometric(FormFactorKey key, double t) {
    if (key.n != 1) throw UnsupportedError("hypergeometric route exists for n = 1 only");
    int N = key.N;
    double c = std::exp(std::lgamma(N + 0.5) - std::lgamma(N + 1.0)) / std::sqrt(pi);
    return std::pow(t, 0.5 * N) * c * hyp2f1(0.5, N + 0.5, N + 1.0, t);
}

inline FFValue ff_eval(FormFactorKey key, double t, FFRoute route,
                       CatalogueVariant variant = CatalogueVariant::corrected, std::size_t nodes = 0,
                       unsigned threads = 0) {
    if (t == 0.0) {
        // every route reduces to the leading behaviour at t = 0
        double v = (key.n == 1 && key.N == 0) ? 1.0 : 0.0;
        return {v, 0.0, false};
    }
    if (!(t > 0.0) || t > default_config().t_max_quadrature)
        throw DomainError("ff_eval: t must lie in [0, 0.95]");
    switch (route) {
        case FFRoute::quadrature: return ff_quadrature(key, t, nodes, threads);
        case FFRoute::closed_form: return {ff_closed_form(key, variant).eval(t), 0.0, false};
        case FFRoute::hypergeometric: return {ff_hypergeometric(key, t), 0.0, false};
        case FFRoute::theta: {
            double k = std::sqrt(t);
            if (key.N == 0) return {f00_theta(key.n, k), 0.0, false};
            if (key.N == 1) return {f11_theta(key.n, k), 0.0, false};
            throw UnsupportedError("theta route exists for N = 0, 1 only");
        }
    }
    throw UnsupportedError("ff_eval: unknown route");
}

// Best available non-quadrature value: catalogue first, theta route otherwise.
inline double ff_value_analytic(FormFactorKey key, double t) {
    if (in_catalogue(key)) return ff_closed_form(key).eval(t);
    return ff_eval(key, t, FFRoute::theta).value;
}

// ---------------------------------------------------------------------------
// Relations between f_{1,1} and f_{0,0}:
//   rel1: Kh f^{(2n)}_{1,1} = (2n+1) f^{(2n+1)}_{0,0}
//   rel2: Kh t^{1/2} f^{(2n+1)}_{1,1} = 2(n+1) f^{(2n+2)}_{0,0}

struct RelationReport {
    std::string name;
    int n = 0;
    double t = 0.0;
    double lhs = 0.0, rhs = 0.0, diff = 0.0;
    bool pass = false;
};

inline std::vector<RelationReport> ff_relations_check(int n, double t, double tol = 1e-10) {
    std::vector<RelationReport> out;
    double kh = 2.0 / pi * ellip_K(t);
    if (n >= 1) {
        RelationReport r{"rel1", n, t};
        r.lhs = kh * ff_value_analytic({2 * n, 1}, t);
        r.rhs = (2 * n + 1) * ff_value_analytic({2 * n + 1, 0}, t);
        r.diff = std::abs(r.lhs - r.rhs);
        r.pass = r.diff < tol;
        out.push_back(r);
    }
    RelationReport r{"rel2", n, t};
    r.lhs = kh * std::sqrt(t) * ff_value_analytic({2 * n + 1, 1}, t);
    r.rhs = 2 * (n + 1) * ff_value_analytic({2 * n + 2, 0}, t);
    r.diff = std::abs(r.lhs - r.rhs);
    r.pass = r.diff < tol;
    out.push_back(r);
    return out;
}

// ---------------------------------------------------------------------------
// Structure of the catalogued closed forms. A term of total K/E degree d
// belongs to the component g^{(d)}; for that component the allowed
// t-prefactor and the maximal E power depend on (parity, N).

struct DecompositionReport {
    FormFactorKey key;
    CatalogueVariant variant = CatalogueVariant::corrected;
    bool structure_ok = true;
    bool leading_order_ok = true;   // exact series vanishes below the leading power
    double series_vs_quad = 0.0;    // |series value - quadrature| at the check point
    double check_t = 0.1;
    std::vector<std::string> issues;
    bool pass() const { return structure_ok && leading_order_ok; }
};

inline BigRational allowed_t_power(FormFactorKey key) {
    if (key.n % 2 == 0) return key.N >= 2 ? BigRational(1 - key.N) : BigRational(0);
    if (key.N == 0) return 0;
    if (key.N == 1) return BigRational(-1, 2);
    BigRational r(-key.N, 2);
    r.canonicalize();
    return r;
}

inline int allowed_e_power(FormFactorKey key, int degree) {
    if (key.n % 2 == 0) {
        int j = degree / 2;
        return key.N >= 2 ? 2 * j : j;
    }
    int j = (degree - 1) / 2;
    if (key.N == 0) return j;
    if (key.N == 1) return j + 1;
    return 2 * j + 1;
}

inline DecompositionReport ff_decomposition_check(FormFactorKey key, int order = 40,
                                                  CatalogueVariant variant = CatalogueVariant::corrected,
                                                  double check_t = 0.1, bool with_quadrature = true) {
    DecompositionReport rep;
    rep.key = key;
    rep.variant = variant;
    rep.check_t = check_t;
    KEExpression e = ff_closed_form(key, variant);
    BigRational allowed = allowed_t_power(key);
    std::map<int, int> valuation;  // degree -> lowest t power present in its polynomials
    for (const auto& term : e.terms) {
        int d = term.a + term.b;
        if (d > 0 && (d % 2) != (key.n % 2)) {
            rep.structure_ok = false;
            rep.issues.push_back("term of degree " + std::to_string(d) + " has the wrong parity");
        }
        if (d > 0 && term.b > allowed_e_power(key, d)) {
            rep.structure_ok = false;
            rep.issues.push_back("E power " + std::to_string(term.b) + " exceeds the bound for degree " +
                                 std::to_string(d));
        }
        int v = 0;
        while (v < int(term.poly.size()) && sgn(term.poly[v]) == 0) ++v;
        if (v == int(term.poly.size())) continue;
        if (!valuation.count(d) || v < valuation[d]) valuation[d] = v;
    }
    for (auto [d, v] : valuation) {
        if (d == 0) continue;
        BigRational p = e.t_power + v;
        if (p < allowed) {
            rep.structure_ok = false;
            rep.issues.push_back("degree-" + std::to_string(d) + " component carries t^" + to_string(p) +
                                 ", expected no lower than t^" + to_string(allowed));
        }
    }
    // exact series: scale t^{t_power} bracket must start at the leading power
    ExactSeries br = e.bracket_series(order);
    BigRational lead = ff_leading_power(key) - e.t_power;
    if (lead.get_den() != 1) {
        rep.leading_order_ok = false;
        rep.issues.push_back("half-integer mismatch between t_power and leading power");
    } else {
        long l = lead.get_num().get_si();
        for (long i = 0; i < l && i < br.order(); ++i)
            if (sgn(br[i]) != 0) {
                rep.leading_order_ok = false;
                rep.issues.push_back("exact series has a nonzero t^" + std::to_string(i) +
                                     " coefficient below the leading power");
                break;
            }
        if (l < br.order() && sgn(br[l]) == 0) {
            rep.leading_order_ok = false;
            rep.issues.push_back("leading coefficient vanishes");
        }
    }
    if (with_quadrature && key.n <= 4) {
        double sv = e.scale.get_d() * std::pow(check_t, e.t_power.get_d()) * br.eval(check_t);
        rep.series_vs_quad = std::abs(sv - ff_quadrature(key, check_t).value);
    }
    return rep;
}

}  // namespace ising
