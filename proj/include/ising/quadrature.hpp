#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "special_fn.hpp"

namespace ising {

enum class Substitution { none, trig, tanh_sinh };

inline const char* substitution_name(Substitution s) {
    switch (s) {
        case Substitution::none: return "none";
        case Substitution::trig: return "trig";
        case Substitution::tanh_sinh: return "tanh_sinh";
    }
    return "?";
}

struct QuadratureSpec {
    int dim = 1;
    std::size_t nodes_per_axis = 64;
    Substitution substitution = Substitution::trig;
    double tol = 1e-10;
    unsigned threads = 0;  // 0: hardware concurrency
};

// The integrand is  prod_i x_i^{a_i} (1-x_i)^{b_i} * smooth(x).
// The power weights are declared rather than evaluated so the substitution
// can absorb them exactly; the callback only returns the smooth factor.
struct IntegrandHandle {
    int dim = 1;
    std::function<double(const double* x)> smooth;
    std::vector<std::pair<double, double>> exponents;  // (a_i, b_i) per axis
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t nodes = 0;
    bool flagged = false;  // error estimate above tolerance / budget exhausted
};

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes on [0,1] by Newton iteration on P_n.

struct Rule1D {
    std::vector<double> x, w;
};

inline Rule1D gauss_legendre01(std::size_t n) {
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double p1 = 1.0, p2 = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        double w = 1.0 / ((1.0 - z * z) * pp * pp);  // weight on [0,1]
        r.x[i] = 0.5 * (1.0 - z);
        r.x[n - 1 - i] = 0.5 * (1.0 + z);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return r;
}

inline const Rule1D& cached_gauss_legendre01(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::shared_ptr<Rule1D>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<Rule1D>(gauss_legendre01(n));
    return *slot;
}

// Nodes in x together with weights that already include the declared
// endpoint weight x^a (1-x)^b and the Jacobian of the substitution.
inline Rule1D axis_rule(std::size_t n, Substitution sub, double a, double b) {
    if (!(a > -1.0) || !(b > -1.0))
        throw DomainError("quadrature: declared endpoint exponent <= -1 is not integrable");
    Rule1D out;
    out.x.resize(n);
    out.w.resize(n);
    if (sub == Substitution::tanh_sinh) {
        // x = 1/(1+exp(-pi sinh s)), s in [-smax, smax]
        const double smax = 3.2;
        double h = 2.0 * smax / double(n - 1);
        for (std::size_t k = 0; k < n; ++k) {
            double s = -smax + h * k;
            double e = pi * std::sinh(s);
            double x = 1.0 / (1.0 + std::exp(-e));
            double omx = 1.0 / (1.0 + std::exp(e));
            double dx = pi * std::cosh(s) * x * omx;  // dx/ds
            out.x[k] = x;
            out.w[k] = h * dx * std::pow(x, a) * std::pow(omx, b);
        }
        return out;
    }
    const Rule1D& gl = cached_gauss_legendre01(n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = gl.x[k];
        if (sub == Substitution::trig) {
            // x = sin^2(pi s/2), dx = pi sin cos ds;  1-x evaluated as cos^2
            double sn = std::sin(0.5 * pi * s), cs = std::cos(0.5 * pi * s);
            out.x[k] = sn * sn;
            out.w[k] = gl.w[k] * pi * std::pow(sn, 2.0 * a + 1.0) * std::pow(cs, 2.0 * b + 1.0);
        } else {
            out.x[k] = s;
            out.w[k] = gl.w[k] * std::pow(s, a) * std::pow(1.0 - s, b);
        }
    }
    return out;
}

namespace detail {

// One fixed-n tensor product rule. Each slice of the first axis is summed
// sequentially; slices are combined in index order, so the value does not
// depend on how many threads computed the slices.
inline double tensor_sum(const IntegrandHandle& f, std::size_t n, Substitution sub, unsigned threads) {
    int d = f.dim;
    std::vector<Rule1D> rules;
    for (int i = 0; i < d; ++i) {
        auto [a, b] = i < int(f.exponents.size()) ? f.exponents[i] : std::pair<double, double>{0.0, 0.0};
        rules.push_back(axis_rule(n, sub, a, b));
    }
    std::vector<double> slice(n, 0.0);
    auto work = [&](std::size_t i0) {
        std::vector<double> x(d);
        std::vector<std::size_t> idx(d, 0);
        std::vector<double> wprod(d + 1, 1.0);
        x[0] = rules[0].x[i0];
        wprod[1] = rules[0].w[i0];
        double s = 0.0;
        if (d == 1) {
            slice[i0] = wprod[1] * f.smooth(x.data());
            return;
        }
        for (int k = 1; k < d; ++k) {
            x[k] = rules[k].x[0];
            wprod[k + 1] = wprod[k] * rules[k].w[0];
        }
        while (true) {
            s += wprod[d] * f.smooth(x.data());
            int k = d - 1;
            while (k >= 1) {
                if (++idx[k] < n) break;
                idx[k] = 0;
                --k;
            }
            if (k < 1) break;
            for (int j = k; j < d; ++j) {
                x[j] = rules[j].x[idx[j]];
                wprod[j + 1] = wprod[j] * rules[j].w[idx[j]];
            }
        }
        slice[i0] = s;
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || d == 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < n; i += threads) work(i);
            });
        for (auto& th : pool) th.join();
    }
    double total = 0.0;
    for (double v : slice) total += v;
    return total;
}

}  // namespace detail

inline QuadResult integrate(const IntegrandHandle& f, const QuadratureSpec& spec) {
    if (f.dim < 1 || f.dim > 4) throw DomainError("integrate: dimension must be 1..4");
    if (spec.dim != f.dim) throw DomainError("integrate: spec and integrand dimensions differ");
    if (spec.nodes_per_axis < 8) throw DomainError("integrate: need at least 8 nodes per axis");
    QuadResult r;
    r.nodes = spec.nodes_per_axis;
    r.value = detail::tensor_sum(f, spec.nodes_per_axis, spec.substitution, spec.threads);
    double coarse = detail::tensor_sum(f, spec.nodes_per_axis / 2, spec.substitution, spec.threads);
    r.error = std::abs(r.value - coarse);
    r.flagged = r.error > spec.tol;
    return r;
}

// Doubling schedule until two successive estimates agree to target_tol or
// the per-dimension node budget is spent.
inline QuadResult refine_until(const IntegrandHandle& f, QuadratureSpec spec, double target_tol,
                               const Config& cfg = default_config()) {
    std::size_t budget = node_budget(f.dim, cfg);
    spec.dim = f.dim;
    std::size_t n = std::max<std::size_t>(spec.nodes_per_axis, 8);
    double prev = detail::tensor_sum(f, n, spec.substitution, spec.threads);
    double last_diff = std::numeric_limits<double>::infinity();
    while (true) {
        std::size_t n2 = 2 * n;
        if (n2 > budget) {
            QuadResult r;
            r.value = prev;
            r.nodes = n;
            r.error = last_diff;
            r.flagged = true;
            return r;
        }
        double cur = detail::tensor_sum(f, n2, spec.substitution, spec.threads);
        if (std::abs(cur - prev) < target_tol) return QuadResult{cur, std::abs(cur - prev), n2, false};
        last_diff = std::abs(cur - prev);
        prev = cur;
        n = n2;
    }
}

}  // namespace ising
