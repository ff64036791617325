#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "exact_series.hpp"
#include "special_fn.hpp"

namespace ising {

struct SingularityRecord {
    int n = 0;
    cplx location{};
    double theta = 0.0;  // angle in [0, 2 pi)
    BigRational exponent;
    bool log_flag = false;
    int j = 0, k = 0;    // first (j,k) producing the angle; k is the root index for diagonal sectors
};

inline std::string exponent_string(const BigRational& e, bool log_flag) {
    std::string s = "eps^" + to_string(e);
    if (log_flag) s += " ln eps";
    return s;
}

// Bulk sector n: odd n = 2m+1 -> eps^{2m(m+1)-1} ln eps; even n = 2m -> eps^{2m^2-3/2}.
inline std::pair<BigRational, bool> nickel_exponent(int n) {
    if (n < 1) throw DomainError("nickel_exponent: n must be >= 1");
    if (n % 2 == 1) {
        long m = (n - 1) / 2;
        return {BigRational(2 * m * (m + 1) - 1), true};
    }
    long m = n / 2;
    BigRational e(4 * m * m - 3, 2);
    e.canonicalize();
    return {e, false};
}

namespace detail {

inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * pi);
    if (a < 0.0) a += 2.0 * pi;
    if (a >= 2.0 * pi) a -= 2.0 * pi;
    return a;
}

inline void sort_records(std::vector<SingularityRecord>& v) {
    std::sort(v.begin(), v.end(), [](const SingularityRecord& a, const SingularityRecord& b) {
        if (a.theta != b.theta) return a.theta < b.theta;
        if (a.j != b.j) return a.j < b.j;
        return a.k < b.k;
    });
}

// Distinct values of c = (cos(2 pi k/n) + cos(2 pi j/n))/2 with their first (j,k).
// Deduplication runs on c, where values are well separated; acos is only
// applied afterwards.
struct CValue {
    double c;
    int j, k;
};

inline std::vector<CValue> nickel_c_values(int n) {
    std::vector<CValue> all;
    all.reserve(std::size_t(n) * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            all.push_back({0.5 * (std::cos(2.0 * pi * k / n) + std::cos(2.0 * pi * j / n)), j, k});
    std::sort(all.begin(), all.end(), [](const CValue& a, const CValue& b) {
        if (a.c != b.c) return a.c < b.c;
        if (a.j != b.j) return a.j < b.j;
        return a.k < b.k;
    });
    std::vector<CValue> out;
    for (const auto& v : all) {
        if (!out.empty() && std::abs(v.c - out.back().c) < 1e-13) {
            if (std::make_pair(v.j, v.k) < std::make_pair(out.back().j, out.back().k)) {
                out.back().j = v.j;
                out.back().k = v.k;
            }
            continue;
        }
        out.push_back(v);
    }
    return out;
}

inline double clamp_acos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }

}  // namespace detail

// All distinct unit-circle points s = e^{i theta} with 2 cos(theta) = cos(2 pi k/n) + cos(2 pi j/n),
// (j,k) in {0..n-1}^2, both +theta and -theta.
inline std::vector<SingularityRecord> nickel_enumerate(int n) {
    if (n < 1 || n > 200) throw DomainError("nickel_enumerate: n must be in 1..200");
    auto [e, lg] = nickel_exponent(n);
    std::vector<SingularityRecord> out;
    for (const auto& cv : detail::nickel_c_values(n)) {
        double th = detail::clamp_acos(cv.c);
        bool self_conjugate = cv.c >= 1.0 - 1e-15 || cv.c <= -1.0 + 1e-15;
        for (int s = 0; s < (self_conjugate ? 1 : 2); ++s) {
            SingularityRecord r;
            r.n = n;
            r.theta = s == 0 ? th : detail::wrap_angle(-th);
            if (self_conjugate) r.theta = cv.c > 0 ? 0.0 : pi;
            r.location = std::polar(1.0, r.theta);
            r.exponent = e;
            r.log_flag = lg;
            r.j = cv.j;
            r.k = cv.k;
            out.push_back(r);
        }
    }
    detail::sort_records(out);
    return out;
}

enum class Parity { even, odd };

inline const char* parity_name(Parity p) { return p == Parity::even ? "even" : "odd"; }

// even: chi~^(2n), points t^n = 1, eps^{2n^2-1} ln eps
// odd:  chi~^(2n+1), points t^{n+1/2} = 1 read as t = exp(4 pi i m/(2n+1)), eps^{(n+1)^2-1/2}
inline std::vector<SingularityRecord> diagonal_singularities(int n, Parity parity) {
    if (n < 0 || n > 200) throw DomainError("diagonal_singularities: n must be in 0..200");
    std::vector<SingularityRecord> out;
    if (parity == Parity::even) {
        if (n < 1) throw DomainError("diagonal_singularities: even sector needs n >= 1");
        for (int m = 0; m < n; ++m) {
            SingularityRecord r;
            r.n = 2 * n;
            r.theta = 2.0 * pi * m / n;
            r.exponent = BigRational(2L * n * n - 1);
            r.log_flag = true;
            r.k = m;
            out.push_back(r);
        }
    } else {
        int d = 2 * n + 1;
        BigRational e(2L * (n + 1) * (n + 1) - 1, 2);
        e.canonicalize();
        for (int m = 0; m < d; ++m) {
            SingularityRecord r;
            r.n = d;
            r.theta = detail::wrap_angle(4.0 * pi * m / d);
            r.exponent = e;
            r.log_flag = false;
            r.k = m;
            out.push_back(r);
        }
    }
    for (auto& r : out) r.location = std::polar(1.0, r.theta);
    detail::sort_records(out);
    return out;
}

// ---------------------------------------------------------------------------
// Accumulation of singular angles over sectors 1..n

struct DensityRow {
    int n = 0;
    std::size_t cumulative_count = 0;
    double max_gap = 0.0;
};

struct DensityReport {
    std::vector<DensityRow> rows;
    bool gap_non_increasing = true;
    bool count_non_decreasing = true;
    bool gap_shrinks_overall = false;  // last gap strictly below the first
};

inline double max_circular_gap(const std::vector<double>& sorted) {
    if (sorted.empty()) return 2.0 * pi;
    double g = 2.0 * pi - sorted.back() + sorted.front();
    for (std::size_t i = 1; i < sorted.size(); ++i) g = std::max(g, sorted[i] - sorted[i - 1]);
    return g;
}

inline DensityReport density_report(int n_max) {
    if (n_max < 1 || n_max > 200) throw DomainError("density_report: n_max must be in 1..200");
    DensityReport rep;
    std::vector<double> acc;
    for (int n = 1; n <= n_max; ++n) {
        std::vector<double> add;
        for (const auto& r : nickel_enumerate(n)) add.push_back(r.theta);
        std::vector<double> merged;
        merged.reserve(acc.size() + add.size());
        std::merge(acc.begin(), acc.end(), add.begin(), add.end(), std::back_inserter(merged));
        acc.clear();
        for (double a : merged)
            if (acc.empty() || a - acc.back() > 1e-12) acc.push_back(a);
        if (acc.size() > 1 && 2.0 * pi - acc.back() + acc.front() <= 1e-12) acc.pop_back();
        DensityRow row{n, acc.size(), max_circular_gap(acc)};
        if (!rep.rows.empty()) {
            if (row.max_gap > rep.rows.back().max_gap) rep.gap_non_increasing = false;
            if (row.cumulative_count < rep.rows.back().cumulative_count) rep.count_non_decreasing = false;
        }
        rep.rows.push_back(row);
    }
    rep.gap_shrinks_overall = rep.rows.back().max_gap < rep.rows.front().max_gap;
    return rep;
}

// ---------------------------------------------------------------------------
// Image of the unit circle |k| = 1 in the nome plane

struct QPoint {
    double phi = 0.0;
    cplx q{};
};

struct QCurve {
    std::vector<QPoint> points;
    bool passes_through_one = false;
    double conjugation_defect = 0.0;  // max |q(2pi - phi) - conj q(phi)|
    double max_abs_q = 0.0;
};

// Points where k^2 = 1 (phi = 0, pi, 2 pi) map to the limit q = 1.
inline bool qcurve_is_boundary(int j, int samples) { return (2 * j) % samples == 0; }

inline cplx q_on_unit_circle(double phi) {
    return nome_from_modulus(std::polar(1.0, phi)).q;
}

namespace detail {

// A continuous path keeps shrinking jumps under bisection; a branch jump does not.
inline void check_segment(double a, cplx qa, double b, cplx qb, int depth, double jump_tol) {
    if (std::abs(qb - qa) <= jump_tol) return;
    if (depth >= 40)
        throw PrecisionError("qcurve: branch-tracking discontinuity near phi = " + std::to_string(a));
    double m = 0.5 * (a + b);
    cplx qm = q_on_unit_circle(m);
    check_segment(a, qa, m, qm, depth + 1, jump_tol);
    check_segment(m, qm, b, qb, depth + 1, jump_tol);
}

// Near k^2 = 1 the nome approaches 1 only like 1/log; the check there is that
// |q - 1| decreases monotonically along phi_k -> boundary.
inline void check_boundary_approach(double boundary, double inner) {
    double prev = std::abs(q_on_unit_circle(inner) - 1.0);
    for (int i = 1; i <= 40; ++i) {
        double phi = boundary + (inner - boundary) * std::ldexp(1.0, -i);
        if (phi == boundary) break;
        double d = std::abs(q_on_unit_circle(phi) - 1.0);
        if (!(d <= prev))
            throw PrecisionError("qcurve: non-monotone approach to q = 1 near phi = " + std::to_string(phi));
        prev = d;
    }
}

}  // namespace detail

inline QCurve qcurve(int samples, double jump_tol = 0.05) {
    if (samples < 16) throw DomainError("qcurve: need at least 16 samples");
    QCurve c;
    c.points.resize(samples + 1);
    for (int j = 0; j <= samples; ++j) {
        double phi = 2.0 * pi * j / samples;
        c.points[j].phi = phi;
        c.points[j].q = qcurve_is_boundary(j, samples) ? cplx(1.0) : q_on_unit_circle(phi);
    }
    for (int j = 0; j < samples; ++j) {
        bool ba = qcurve_is_boundary(j, samples), bb = qcurve_is_boundary(j + 1, samples);
        const auto& A = c.points[j];
        const auto& B = c.points[j + 1];
        if (ba) detail::check_boundary_approach(A.phi, B.phi);
        else if (bb) detail::check_boundary_approach(B.phi, A.phi);
        else detail::check_segment(A.phi, A.q, B.phi, B.q, 0, jump_tol);
    }
    for (int j = 0; j <= samples; ++j) {
        const cplx& q = c.points[j].q;
        const cplx& r = c.points[samples - j].q;
        c.conjugation_defect = std::max(c.conjugation_defect, std::abs(r - std::conj(q)));
        c.max_abs_q = std::max(c.max_abs_q, std::abs(q));
        if (q == cplx(1.0)) c.passes_through_one = true;
    }
    return c;
}

}  // namespace ising
