// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "ising/ising.hpp"

using namespace ising;

namespace {

int failures = 0;

void report(int k, bool pass, const std::string& detail) {
    std::printf("CRITERION %d: %s  %s\n", k, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void info(const std::string& s) {
    std::printf("  info: %s\n", s.c_str());
    std::fflush(stdout);
}

std::string num(double v, int digits = 3) {
    char b[40];
    std::snprintf(b, sizeof b, "%.*g", digits, v);
    return b;
}

// Runs a criterion body; an exception counts as FAIL with its message.
void run(int k, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(k, false, std::string("exception: ") + e.what());
    }
}

std::string suite_output(unsigned threads) {
    std::ostringstream os;
    json all = json::array();
    for (const auto& r : run_suite("all", threads)) all.push_back(json{{"suite", r.name}, {"pass", r.pass}, {"details", r.details}});
    write_json(os, RunInfo{"verify all"}, all);
    Table t{{"t", "chid3"}, {}};
    for (double x : {0.1, 0.2, 0.3}) t.rows.push_back({x, chid_quad(3, x, 1e-12, threads).value});
    write_csv(os, RunInfo{"chid table"}, t);
    auto rep = density_report(30);
    Table d{{"n", "count", "max_gap"}, {}};
    for (const auto& r : rep.rows) d.rows.push_back({long(r.n), long(r.cumulative_count), r.max_gap});
    write_csv(os, RunInfo{"sing density"}, d);
    return os.str();
}

}  // namespace

int main() {
    run(1, [] {
        auto r = suite_routes_n1();
        report(1, r.pass, "max diff " + num(r.details.value("max_diff", 0.0)) + " (tol 1e-10)");
    });

    run(2, [] {
        auto r = suite_routes_catalogue();
        std::string d;
        for (const auto& e : r.details["transcription_discrepancies"])
            d += " (" + std::to_string(e["n"].get<int>()) + "," + std::to_string(e["N"].get<int>()) + ")";
        report(2, r.pass, "quadrature vs catalogue; printed forms differing:" + (d.empty() ? std::string(" none") : d));
    });

    run(3, [] {
        auto a = suite_routes_theta();
        auto b = suite_relations();
        report(3, a.pass && b.pass,
               "theta vs catalogue max diff " +
                   num(std::max(a.details["f00_max_diff"].get<double>(), a.details["f11_max_diff"].get<double>())) +
                   ", relations max diff " +
                   num(std::max(b.details["rel1_max_diff"].get<double>(), b.details["rel2_max_diff"].get<double>())) +
                   " (tol 1e-9)");
    });

    run(4, [] {
        auto r = suite_identities();
        report(4, r.pass, "identity chain over k-grid (tol 1e-10)");
    });

    run(5, [] {
        bool pass = true;
        double worst = 0.0;
        for (auto sign : {CorrSign::minus, CorrSign::plus})
            for (int N : {0, 1}) {
                auto g = corr_check_grid(sign, N, default_corr_t_grid(), default_corr_lambda_grid());
                pass = pass && g.pass;
                worst = std::max(worst, g.max_diff);
            }
        double end = 0.0;
        for (double t : default_corr_t_grid()) {
            end = std::max(end, std::abs(corr_theta(make_query(CorrSign::minus, 0, 1.0, t)) - 1.0));
            end = std::max(end, std::abs(corr_theta(make_query(CorrSign::plus, 0, 1.0, t)) - 1.0));
            end = std::max(end, std::abs(corr_theta(make_query(CorrSign::minus, 0, 0.0, t)) - std::pow(1 - t, 0.25)));
        }
        pass = pass && end < 1e-12;
        report(5, pass, "grid max diff " + num(worst) + " within tail+1e-9, endpoint max diff " + num(end));
    });

    run(6, [] {
        double closed = 0.0;
        for (double t : {0.05, 0.1, 0.25, 0.5, 0.8}) {
            closed = std::max(closed, std::abs(chid_quad(1, t).value - chid_closed(1, t)));
            closed = std::max(closed, std::abs(chid_quad(2, t).value - chid_closed(2, t)));
        }
        auto s40 = series_chid(3, 40);
        int lead = 0;
        while (lead < s40.order() && sgn(s40[lead]) == 0) ++lead;
        bool lead_ok = lead == 4 && s40[lead] == rat(1, 64);
        double sq = 0.0;
        for (double t : {0.05, 0.1, 0.2, 0.3}) sq = std::max(sq, std::abs(s40.eval(std::sqrt(t)) - chid_quad(3, t).value));
        double geo = 0.0;
        for (double t : {0.1, 0.25, 0.5}) geo = std::max(geo, std::abs(chid1_from_form_factors(t).value - chid_closed(1, t)));
        bool pass = closed < 1e-9 && lead_ok && sq < 1e-6 && geo < 1e-8;
        report(6, pass,
               "quad vs closed " + num(closed) + ", leading coeff " + to_string(s40[lead]) + " at x^" +
                   std::to_string(lead) + ", series vs quad " + num(sq) + ", geometric sum " + num(geo));
    });

    run(7, [] {
        auto K = series_K(40);
        auto gk = guess_ode(K);
        bool k_ok = gk.ode && gk.ode->order == 2 && verify_annihilation(*gk.ode, K).annihilates;
        for (int n = 0; n + 1 < K.order(); ++n)
            k_ok = k_ok && BigRational((n + 1) * (n + 1)) * K[n + 1] == (n + rat(1, 2)) * (n + rat(1, 2)) * K[n];
        auto s = series_chid(3, 40);
        auto g = guess_ode(s, {8, 40, 5});
        bool c_ok = g.ode && g.ode->margin >= 5 && verify_annihilation(*g.ode, s).annihilates;
        std::string d = std::string("K operator ") + (k_ok ? "exact" : "not recovered") + "; order-40 third sector: ";
        if (c_ok) {
            auto rep = singular_points(*g.ode);
            d += "order " + std::to_string(g.ode->order) + " margin " + std::to_string(g.ode->margin) +
                 ", cube roots of unity " + (contains_roots_of_unity(rep, 3) ? "present" : "absent");
        } else {
            d += g.note.empty() ? "no certified operator" : g.note;
        }
        report(7, k_ok && c_ok, d);
        // Same pipeline on a longer series, reported for information only.
        auto l = series_chid(3, 160);
        auto gl = guess_ode(l, {8, 40, 5});
        if (gl.ode) {
            auto rep = singular_points(*gl.ode);
            auto b = chid3_block_series(160);
            info("order-160 series: operator order " + std::to_string(gl.ode->order) + ", theta-degree " +
                 std::to_string(gl.ode->theta_degree) + ", margin " + std::to_string(gl.ode->margin) +
                 ", annihilates " + (verify_annihilation(*gl.ode, l).annihilates ? "yes" : "no") +
                 ", roots t^(3/2)=1 " + (contains_roots_of_unity(rep, 3) ? "present" : "absent") +
                 ", printed third block annihilated " + (verify_annihilation(*gl.ode, b.f16).annihilates ? "yes" : "no"));
        } else {
            info("order-160 series: " + gl.note);
        }
    });

    run(8, [] {
        auto f = critical_exponent_fit();
        double ratio_diff = std::abs(f.I_estimate - f.I_reference);
        bool pass = std::abs(f.slope + 1.75) <= 0.01 && ratio_diff < 1e-2;
        report(8, pass,
               "slope " + num(f.slope, 7) + " (bare " + num(f.slope_bare, 7) + "), amplitude ratio " +
                   num(f.I_estimate, 9) + " vs stored " + num(f.I_reference, 16));
    });

    run(9, [] {
        bool has = false;
        for (const auto& r : nickel_enumerate(3)) has = has || std::abs(r.theta - 2 * pi / 3) < 1e-12;
        bool expo = true;
        for (int m = 1; m <= 10; ++m) {
            auto [eo, lo] = nickel_exponent(2 * m + 1);
            auto [ee, le] = nickel_exponent(2 * m);
            expo = expo && exponent_string(eo, lo) == "eps^" + std::to_string(2 * m * (m + 1) - 1) + " ln eps";
            expo = expo && exponent_string(ee, le) == "eps^" + std::to_string(4 * m * m - 3) + "/2";
        }
        auto d = density_report(50);
        bool dens = d.gap_non_increasing && d.gap_shrinks_overall;
        auto q = qcurve(720);  // throws on a branch-tracking discontinuity
        bool qc = q.passes_through_one && q.conjugation_defect < 1e-12;
        report(9, has && expo && dens && qc,
               std::string("2pi/3 ") + (has ? "found" : "missing") + ", exponents " + (expo ? "match" : "differ") +
                   ", max gap " + num(d.rows.front().max_gap) + " -> " + num(d.rows.back().max_gap) +
                   ", qcurve defect " + num(q.conjugation_defect));
    });

    run(10, [] {
        std::string a = suite_output(1), b = suite_output(1), c = suite_output(4);
        report(10, a == b && a == c, "rerun " + std::string(a == b ? "identical" : "differs") + ", threads 1 vs 4 " +
                                         (a == c ? "identical" : "differs") + " (" + std::to_string(a.size()) + " bytes)");
    });

    return failures ? 1 : 0;
}
