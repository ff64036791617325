#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "form_factors.hpp"
#include "special_fn.hpp"
#include "theta_route.hpp"

namespace ising {

enum class CorrSign { plus, minus };  // plus: T > T_c, minus: T < T_c

inline const char* sign_name(CorrSign s) { return s == CorrSign::plus ? "plus" : "minus"; }

inline CorrSign parse_sign(const std::string& s) {
    if (s == "plus" || s == "+") return CorrSign::plus;
    if (s == "minus" || s == "-") return CorrSign::minus;
    throw std::invalid_argument("unknown sign: " + s);
}

struct LambdaCorrelationQuery {
    CorrSign sign = CorrSign::minus;
    int N = 0;
    double lambda = 1.0;
    double u = 0.0;  // arccos(lambda)
    double t = 0.25;
    int n_max = 0;   // 0: largest available
};

inline LambdaCorrelationQuery make_query(CorrSign sign, int N, double lambda, double t, int n_max = 0) {
    if (N != 0 && N != 1) throw DomainError("correlations: N must be 0 or 1");
    if (!(lambda >= 0.0) || lambda > 1.0) throw DomainError("correlations: lambda must lie in [0,1]");
    if (!(t > 0.0) || t > default_config().t_max_quadrature) throw DomainError("correlations: t must lie in (0,0.95]");
    return {sign, N, lambda, std::acos(lambda), t, n_max};
}

struct CorrValue {
    double value = 0.0;
    double tail = 0.0;
    int terms = 0;
    bool flagged = false;
};

// theta'(u)/sin(u), with the removable u = 0 singularity handled by
// [th'' + th'''' u^2/6 + th^(6) u^4/120] / [1 - u^2/6 + u^4/120].
inline double theta_prime_over_sin(int index, double u, double q, const Config& cfg) {
    if (u < cfg.corr_taylor_switch) {
        auto d = theta_derivs(index, 0.0, q, 6, cfg);
        double u2 = u * u;
        double num = d[2].real() + d[4].real() * u2 / 6.0 + d[6].real() * u2 * u2 / 120.0;
        double den = 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
        return num / den;
    }
    auto d = theta_derivs(index, u, q, 1, cfg);
    return d[1].real() / std::sin(u);
}

inline double corr_theta(const LambdaCorrelationQuery& qy, const Config& cfg = default_config()) {
    if (qy.u < 0.0 || qy.u > 0.5 * pi + 1e-15) throw DomainError("corr_theta: u must lie in [0, pi/2]");
    double q = nome_from_modulus(std::sqrt(qy.t));
    if (q > 1.0 - cfg.eps_q) throw PrecisionError("corr_theta: nome too close to 1");
    double th2 = theta0(2, q, cfg), th3 = theta0(3, q, cfg);
    if (qy.N == 0) {
        int idx = qy.sign == CorrSign::minus ? 3 : 2;
        double num = theta_derivs(idx, qy.u, q, 0, cfg)[0].real();
        return num / (idx == 3 ? th3 : th2);
    }
    if (qy.sign == CorrSign::minus) return -theta_prime_over_sin(2, qy.u, q, cfg) / (th2 * th3 * th3);
    return -theta_prime_over_sin(3, qy.u, q, cfg) / (th2 * th2 * th3);
}

// Particle numbers used by the series for a given sign: even (2..2n_max) for
// minus, odd (1..2n_max+1) for plus; bounded by the theta route.
inline int corr_series_max_terms(CorrSign sign) {
    return sign == CorrSign::minus ? theta_route_max_n / 2 : (theta_route_max_n - 1) / 2;
}

inline double ff_for_correlation(int n, int N, double t) {
    double k = std::sqrt(t);
    return N == 0 ? f00_theta(n, k) : f11_theta(n, k);
}

inline CorrValue corr_series(const LambdaCorrelationQuery& qy, double tol = 1e-9) {
    int nmax = qy.n_max > 0 ? qy.n_max : corr_series_max_terms(qy.sign);
    if (nmax > corr_series_max_terms(qy.sign))
        throw UnsupportedError("corr_series: n_max exceeds the available form-factor route");
    double pre = std::pow(1.0 - qy.t, 0.25);
    double lam = qy.lambda;
    std::vector<double> terms;
    if (qy.sign == CorrSign::minus) {
        double lam2 = lam * lam;
        double p = 1.0;
        for (int n = 1; n <= nmax; ++n) {
            p *= lam2;
            terms.push_back(p * ff_for_correlation(2 * n, qy.N, qy.t));
        }
    } else {
        double p = lam;
        for (int n = 0; n <= nmax; ++n) {
            terms.push_back(p * ff_for_correlation(2 * n + 1, qy.N, qy.t));
            p *= lam * lam;
        }
    }
    CorrValue r;
    double s = qy.sign == CorrSign::minus ? 1.0 : 0.0;
    for (double v : terms) s += v;
    r.value = pre * s;
    r.terms = int(terms.size());
    if (terms.size() >= 2) {
        double a = std::abs(terms[terms.size() - 2]), b = std::abs(terms.back());
        if (b == 0.0) r.tail = 0.0;
        else if (a > 0.0 && b < a) r.tail = pre * b * (b / a) / (1.0 - b / a);
        else r.tail = std::numeric_limits<double>::infinity();
    } else if (!terms.empty()) {
        r.tail = terms.back() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    r.flagged = r.tail > tol;
    return r;
}

struct CorrRow {
    CorrSign sign;
    int N;
    double t, lambda, theta_value, series_value, tail, diff;
    bool pass;
};

struct CorrGridReport {
    std::vector<CorrRow> rows;
    double max_diff = 0.0;
    bool pass = true;
    std::vector<std::string> observations;  // observed properties that did not hold
};

inline const std::vector<double>& default_corr_t_grid() {
    static const std::vector<double> g{0.1, 0.25, 0.5};
    return g;
}
inline const std::vector<double>& default_corr_lambda_grid() {
    static const std::vector<double> g{0.0, 0.3, 0.7, 1.0};
    return g;
}

inline CorrGridReport corr_check_grid(CorrSign sign, int N, const std::vector<double>& ts,
                                      const std::vector<double>& lambdas, double slack = 1e-9) {
    CorrGridReport rep;
    for (double t : ts)
        for (double l : lambdas) {
            auto qy = make_query(sign, N, l, t);
            double a = corr_theta(qy);
            CorrValue b = corr_series(qy);
            CorrRow row{sign, N, t, l, a, b.value, b.tail, std::abs(a - b.value), false};
            row.pass = row.diff <= b.tail + slack;
            rep.max_diff = std::max(rep.max_diff, row.diff);
            rep.pass = rep.pass && row.pass;
            rep.rows.push_back(row);
        }
    // lambda = 1 column decreasing in t for the minus sign
    if (sign == CorrSign::minus) {
        double prev = std::numeric_limits<double>::infinity();
        for (double t : ts) {
            double v = corr_theta(make_query(sign, N, 1.0, t));
            if (v > prev) rep.observations.push_back("lambda=1 column not decreasing at t=" + std::to_string(t));
            prev = v;
        }
        if (N == 0)
            for (double t : ts) {
                double prevl = -std::numeric_limits<double>::infinity();
                for (double l : lambdas) {
                    double v = corr_theta(make_query(sign, N, l, t));
                    if (v < prevl) rep.observations.push_back("not monotone in lambda at t=" + std::to_string(t));
                    prevl = v;
                }
            }
    }
    return rep;
}

}  // namespace ising
