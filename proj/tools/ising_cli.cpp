#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ising/ising.hpp"
#include "ising/io.hpp"
#include "ising/verify.hpp"

using namespace ising;

namespace {

enum Exit { ok = 0, verification_failure = 1, usage_error = 2, budget_exhausted = 3 };

struct Globals {
    std::string format;  // empty: csv for tables, json for exact objects and reports
    std::string out;
    double tol = 1e-10;
    std::size_t nodes = 0;
    int order = 0;
    unsigned threads = 0;
    std::string variant = "corrected";
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw UsageError("cannot open output file " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void json_default(Globals& g) {
    if (g.format.empty()) g.format = "json";
}

CatalogueVariant variant_of(const Globals& g) {
    if (g.variant == "printed") return CatalogueVariant::printed;
    if (g.variant == "corrected") return CatalogueVariant::corrected;
    throw UsageError("--variant must be printed or corrected");
}

RunInfo info_for(const std::string& command, const Globals& g, json options) {
    RunInfo info;
    info.command = command;
    options["tol"] = g.tol;
    options["format"] = g.format;
    info.options = std::move(options);
    return info;
}

void emit(const Globals& g, const RunInfo& info, const Table& t) {
    Output out(g.out);
    write_table(out.stream(), info, t, g.format);
}

void emit_json(const Globals& g, const RunInfo& info, const json& payload) {
    Output out(g.out);
    write_json(out.stream(), info, payload);
}

// --------------------------------------------------------------------------- ff

struct FFArgs {
    int n = 1, N = 0;
    std::vector<double> ts{0.25};
    std::vector<std::string> routes{"quad", "closed"};
};

int cmd_ff(const Globals& g, const FFArgs& a) {
    Table t{{"n", "N", "t", "route", "value", "error", "flagged"}, {}};
    bool exhausted = false;
    for (double tv : a.ts)
        for (const auto& rn : a.routes) {
            FFRoute route = parse_route(rn);
            FFValue v;
            if (route == FFRoute::quadrature && tv > 0.0) {
                FormFactorKey key{a.n, a.N};
                FFIntegral fi = ff_integrand(key, tv);
                QuadratureSpec spec;
                spec.dim = a.n;
                spec.nodes_per_axis = g.nodes ? g.nodes : ff_default_nodes(a.n);
                spec.threads = g.threads;
                QuadResult q = integrate(fi.integrand, spec);
                v = {fi.prefactor * q.value, fi.prefactor * q.error, fi.prefactor * q.error > g.tol};
            } else {
                v = ff_eval({a.n, a.N}, tv, route, variant_of(g), g.nodes, g.threads);
            }
            exhausted = exhausted || v.flagged;
            t.rows.push_back({long(a.n), long(a.N), tv, std::string(route_name(route)), v.value, v.error, v.flagged});
        }
    json opts{{"n", a.n}, {"N", a.N}, {"t", a.ts}, {"routes", a.routes}, {"variant", g.variant},
              {"nodes", g.nodes ? g.nodes : ff_default_nodes(a.n)}};
    emit(g, info_for("ff", g, opts), t);
    return exhausted ? budget_exhausted : ok;
}

// --------------------------------------------------------------------------- corr

struct CorrArgs {
    std::string sign = "minus";
    int N = 0;
    std::vector<double> ts{0.1, 0.25, 0.5};
    std::vector<double> lambdas{0.0, 0.3, 0.7, 1.0};
};

int cmd_corr(const Globals& g, const CorrArgs& a) {
    CorrSign s = parse_sign(a.sign);
    Table t{{"sign", "N", "t", "lambda", "theta_value", "series_value", "tail"}, {}};
    for (double tv : a.ts)
        for (double l : a.lambdas) {
            auto qy = make_query(s, a.N, l, tv);
            CorrValue sv = corr_series(qy);
            t.rows.push_back({std::string(sign_name(s)), long(a.N), tv, l, corr_theta(qy), sv.value, sv.tail});
        }
    emit(g, info_for("corr", g, json{{"sign", a.sign}, {"N", a.N}, {"t", a.ts}, {"lambda", a.lambdas}}), t);
    return ok;
}

// --------------------------------------------------------------------------- chid

struct ChidArgs {
    int n = 3;
    std::vector<double> ts{0.1, 0.25, 0.5};
    std::vector<double> ks{0.1, 0.2, 0.3, 0.4};
    std::string sign = "plus";
    int n_max = 1;
};

int cmd_chid_series(const Globals& g, const ChidArgs& a) {
    int order = g.order ? g.order : (a.n == 3 ? default_config().chid3_default_order : default_config().chid12_default_order);
    ExactSeries s = series_chid(a.n, order);
    RunInfo info = info_for("chid series", g, json{{"n", a.n}, {"order", order}});
    if (g.format == "csv") {
        Table t{{"index", "coefficient"}, {}};
        for (int i = 0; i < s.order(); ++i) t.rows.push_back({long(i), to_string(s[i])});
        emit(g, info, t);
    } else {
        emit_json(g, info, json{{"n", a.n}, {"series", series_json(s)}});
    }
    return ok;
}

int cmd_chid_table(const Globals& g, const ChidArgs& a) {
    Table t{{"t", "n", "closed_or_series", "quadrature", "quad_error"}, {}};
    int order = g.order ? g.order : default_config().chid3_default_order;
    ExactSeries s3 = series_chid(3, order);
    bool exhausted = false;
    for (double tv : a.ts)
        for (int n = 1; n <= 3; ++n) {
            SectorValue q = chid_quad(n, tv, g.tol, g.threads);
            exhausted = exhausted || q.flagged;
            double ref = n <= 2 ? chid_closed(n, tv) : s3.eval(std::sqrt(tv));
            t.rows.push_back({tv, long(n), ref, q.value, q.error});
        }
    emit(g, info_for("chid table", g, json{{"t", a.ts}, {"order", order}}), t);
    return exhausted ? budget_exhausted : ok;
}

int cmd_chid_components(const Globals& g, const ChidArgs& a) {
    Table t{{"k", "Q", "chi1_term", "ke_term", "f16_term"}, {}};
    for (double k : a.ks) {
        auto c = chid3_components(k);
        t.rows.push_back({k, c.Q, c.chi1_term, c.ke_term, c.f16_term});
    }
    emit(g, info_for("chid components", g, json{{"k", a.ks}, {"Q_threshold_k", chid3_Q_threshold()}}), t);
    return ok;
}

int cmd_chid_bulk(const Globals& g, const ChidArgs& a) {
    Table t{{"k", "chi_hat_1", "chi_hat_2"}, {}};
    for (double k : a.ks) t.rows.push_back({k, chi_bulk(1, k), chi_bulk(2, k)});
    emit(g, info_for("chid bulk", g, json{{"k", a.ks}}), t);
    return ok;
}

int cmd_chid_sum(const Globals& g, const ChidArgs& a) {
    CorrSign s = parse_sign(a.sign);
    Table t{{"sign", "t", "n_max", "value", "tail"}, {}};
    for (double tv : a.ts) {
        ChidSum r = chid_sum(s, tv, a.n_max);
        t.rows.push_back({std::string(sign_name(s)), tv, long(a.n_max), r.value, r.tail});
    }
    emit(g, info_for("chid sum", g, json{{"sign", a.sign}, {"t", a.ts}, {"n_max", a.n_max}}), t);
    return ok;
}

int cmd_chid_exponent(const Globals& g) {
    ExponentFit f = critical_exponent_fit();
    json payload{{"k_min", f.ks.front()},
                 {"k_max", f.ks.back()},
                 {"points", f.ks.size()},
                 {"slope_with_prefactor", f.slope},
                 {"slope_bare", f.slope_bare},
                 {"amplitude_fit", f.amplitude},
                 {"amplitude_from_C0_at_I1", f.amplitude_asymptotic},
                 {"I_plus_estimate", f.I_estimate},
                 {"I_plus_reference", AmplitudeConstants::I_plus}};
    RunInfo info = info_for("chid exponent", g, json::object());
    if (g.format == "csv") {
        Table t{{"quantity", "value"}, {}};
        for (auto it = payload.begin(); it != payload.end(); ++it) {
            if (it->is_number_float()) t.rows.push_back({it.key(), it->get<double>()});
            else if (it->is_number()) t.rows.push_back({it.key(), it->get<long>()});
            else t.rows.push_back({it.key(), it->get<std::string>()});
        }
        emit(g, info, t);
    } else {
        emit_json(g, info, payload);
    }
    return ok;
}

// --------------------------------------------------------------------------- ode

struct OdeArgs {
    std::string input;
    int max_order = 8;
    int max_degree = 40;
    int min_margin = default_config().ode_min_margin;
};

int cmd_ode_guess(const Globals& g, const OdeArgs& a) {
    std::ifstream in(a.input);
    if (!in) throw UsageError("cannot read " + a.input);
    json j = json::parse(in);
    ExactSeries s = series_from_json(j);
    GuessOptions opt{a.max_order, a.max_degree, a.min_margin};
    GuessResult r = guess_ode(s, opt);
    json payload{{"series_order", s.order()}, {"variable", var_name(s.variable)}, {"found", bool(r.ode)}};
    if (r.ode) {
        payload["ode"] = ode_json(*r.ode);
        auto ann = verify_annihilation(*r.ode, s);
        payload["annihilates"] = ann.annihilates;
        payload["coefficients_checked"] = ann.checked;
        payload["min_margin"] = a.min_margin;
        payload["margin_ok"] = r.ode->margin >= a.min_margin;
        if (poly::deg(leading_polynomial(*r.ode)) >= 1) payload["singular_points"] = singular_points_json(singular_points(*r.ode));
    } else {
        payload["note"] = r.note;
    }
    json opts{{"input", a.input}, {"max_order", a.max_order}, {"max_degree", a.max_degree}, {"min_margin", a.min_margin}};
    emit_json(g, info_for("ode guess", g, opts), payload);
    if (r.ode && !payload["annihilates"].get<bool>()) return verification_failure;
    return ok;
}

// --------------------------------------------------------------------------- sing

struct SingArgs {
    int n = 3;
    std::string parity = "odd";
    int n_max = 50;
};

void push_records(Table& t, const std::vector<SingularityRecord>& recs, const std::string& parity) {
    for (const auto& r : recs)
        t.rows.push_back({long(r.n), parity, r.location.real(), r.location.imag(), r.theta, to_string(r.exponent),
                          r.log_flag, long(r.j), long(r.k)});
}

int cmd_sing_nickel(const Globals& g, const SingArgs& a) {
    Table t{{"n", "parity", "re", "im", "theta", "exponent", "log_flag", "j", "k"}, {}};
    push_records(t, nickel_enumerate(a.n), a.n % 2 ? "odd" : "even");
    emit(g, info_for("sing nickel", g, json{{"n", a.n}}), t);
    return ok;
}

int cmd_sing_diagonal(const Globals& g, const SingArgs& a) {
    Parity p = a.parity == "even" ? Parity::even : Parity::odd;
    if (a.parity != "even" && a.parity != "odd") throw UsageError("--parity must be even or odd");
    Table t{{"n", "parity", "re", "im", "theta", "exponent", "log_flag", "j", "k"}, {}};
    push_records(t, diagonal_singularities(a.n, p), a.parity);
    emit(g, info_for("sing diagonal", g, json{{"n", a.n}, {"parity", a.parity}}), t);
    return ok;
}

int cmd_sing_density(const Globals& g, const SingArgs& a) {
    DensityReport rep = density_report(a.n_max);
    Table t{{"n", "cumulative_count", "max_gap"}, {}};
    for (const auto& r : rep.rows) t.rows.push_back({long(r.n), long(r.cumulative_count), r.max_gap});
    emit(g, info_for("sing density", g, json{{"n_max", a.n_max}}), t);
    return rep.gap_non_increasing && rep.count_non_decreasing ? ok : verification_failure;
}

// --------------------------------------------------------------------------- qcurve

int cmd_qcurve(const Globals& g, int samples) {
    QCurve c = qcurve(samples);
    Table t{{"phi", "re_q", "im_q"}, {}};
    for (const auto& p : c.points) t.rows.push_back({p.phi, p.q.real(), p.q.imag()});
    json opts{{"samples", samples},
              {"conjugation_defect", c.conjugation_defect},
              {"max_abs_q", c.max_abs_q},
              {"passes_through_one", c.passes_through_one}};
    emit(g, info_for("qcurve", g, opts), t);
    return c.max_abs_q <= 1.0 ? ok : verification_failure;
}

// --------------------------------------------------------------------------- verify

int cmd_verify(const Globals& g, const std::string& suite) {
    auto reports = run_suite(suite, g.threads);
    json payload = json::array();
    bool pass = true;
    for (const auto& r : reports) {
        payload.push_back(json{{"suite", r.name}, {"pass", r.pass}, {"details", r.details}});
        pass = pass && r.pass;
    }
    emit_json(g, info_for("verify " + suite, g, json::object()), json{{"pass", pass}, {"suites", payload}});
    return pass ? ok : verification_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diagonal Ising form factors, susceptibility sectors, singularities and series-to-ODE tools"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", g.out, "Output file (default: stdout)");
    app.add_option("--tol", g.tol, "Tolerance for error flags and quadrature refinement");
    app.add_option("--nodes", g.nodes, "Quadrature nodes per axis (0: default for the dimension)");
    app.add_option("--order", g.order, "Series order (0: default)");
    app.add_option("--threads", g.threads, "Worker threads (0: hardware); never changes results");
    app.add_option("--variant", g.variant, "Catalogue variant")->check(CLI::IsMember({"printed", "corrected"}));

    std::function<int()> action;

    FFArgs ffa;
    auto* ff = app.add_subcommand("ff", "Diagonal form factors f^(n)_{N,N}(t) by route");
    ff->add_option("--n", ffa.n, "Particle number")->required();
    ff->add_option("--N", ffa.N, "Diagonal index");
    ff->add_option("--t", ffa.ts, "t values")->delimiter(',');
    ff->add_option("--routes", ffa.routes, "Routes: quad, closed, hyp, theta")->delimiter(',');
    ff->callback([&] { action = [&] { return cmd_ff(g, ffa); }; });

    CorrArgs ca;
    auto* corr = app.add_subcommand("corr", "Lambda-extended correlations, theta and series routes");
    corr->add_option("--sign", ca.sign, "plus (T>Tc) or minus (T<Tc)")->check(CLI::IsMember({"plus", "minus"}));
    corr->add_option("--N", ca.N, "0 or 1");
    corr->add_option("--t", ca.ts, "t values")->delimiter(',');
    corr->add_option("--lambda", ca.lambdas, "lambda values in [0,1]")->delimiter(',');
    corr->callback([&] { action = [&] { return cmd_corr(g, ca); }; });

    ChidArgs cha;
    auto* chid = app.add_subcommand("chid", "Diagonal susceptibility sectors");
    chid->require_subcommand(1);
    auto* chs = chid->add_subcommand("series", "Exact series of chi~_d^(n)");
    chs->add_option("--n", cha.n, "Sector 1..3");
    chs->callback([&] {
        json_default(g);
        action = [&] { return cmd_chid_series(g, cha); };
    });
    auto* cht = chid->add_subcommand("table", "Sector values: closed form or series vs quadrature");
    cht->add_option("--t", cha.ts, "t values")->delimiter(',');
    cht->callback([&] { action = [&] { return cmd_chid_table(g, cha); }; });
    auto* chc = chid->add_subcommand("components", "Blocks of the chi~_d^(3) decomposition");
    chc->add_option("--k", cha.ks, "k values")->delimiter(',');
    chc->callback([&] { action = [&] { return cmd_chid_components(g, cha); }; });
    auto* chb = chid->add_subcommand("bulk", "Bulk chi^(1), chi^(2)");
    chb->add_option("--k", cha.ks, "k values")->delimiter(',');
    chb->callback([&] { action = [&] { return cmd_chid_bulk(g, cha); }; });
    auto* chsum = chid->add_subcommand("sum", "Sector sum with the (1-t)^{1/4} prefactor");
    chsum->add_option("--sign", cha.sign, "plus or minus")->check(CLI::IsMember({"plus", "minus"}));
    chsum->add_option("--t", cha.ts, "t values")->delimiter(',');
    chsum->add_option("--n-max", cha.n_max, "Summation index bound");
    chsum->callback([&] { action = [&] { return cmd_chid_sum(g, cha); }; });
    auto* che = chid->add_subcommand("exponent", "Critical exponent and amplitude fit");
    che->callback([&] {
        json_default(g);
        action = [&] { return cmd_chid_exponent(g); };
    });

    OdeArgs oa;
    auto* ode = app.add_subcommand("ode", "Linear ODE guessing from exact series");
    ode->require_subcommand(1);
    auto* og = ode->add_subcommand("guess", "Guess an operator for a series JSON file");
    og->add_option("--input", oa.input, "Series JSON (as written by chid series --format json)")->required();
    og->add_option("--max-order", oa.max_order, "Largest operator order");
    og->add_option("--max-degree", oa.max_degree, "Largest theta-form degree");
    og->add_option("--min-margin", oa.min_margin, "Required spare equations");
    og->callback([&] {
        json_default(g);
        action = [&] { return cmd_ode_guess(g, oa); };
    });

    SingArgs sa;
    auto* sing = app.add_subcommand("sing", "Singularity enumeration");
    sing->require_subcommand(1);
    auto* sn = sing->add_subcommand("nickel", "Bulk sector singularities");
    sn->add_option("--n", sa.n, "Sector");
    sn->callback([&] { action = [&] { return cmd_sing_nickel(g, sa); }; });
    auto* sd = sing->add_subcommand("diagonal", "Diagonal sector singularities");
    sd->add_option("--n", sa.n, "Index n of chi~^(2n) or chi~^(2n+1)");
    sd->add_option("--parity", sa.parity, "even or odd");
    sd->callback([&] { action = [&] { return cmd_sing_diagonal(g, sa); }; });
    auto* sden = sing->add_subcommand("density", "Cumulative singular angles and maximal gap");
    sden->add_option("--n-max", sa.n_max, "Largest sector");
    sden->callback([&] { action = [&] { return cmd_sing_density(g, sa); }; });

    int samples = 720;
    auto* qc = app.add_subcommand("qcurve", "Image of |k| = 1 in the nome plane");
    qc->add_option("--samples", samples, "Number of phi steps");
    qc->callback([&] { action = [&] { return cmd_qcurve(g, samples); }; });

    std::string suite;
    auto* ver = app.add_subcommand("verify", "Cross-route verification suites");
    ver->add_option("suite", suite, "identities, routes, relations, decomposition or all")
        ->required()
        ->check(CLI::IsMember({"identities", "routes", "relations", "decomposition", "all"}));
    ver->callback([&] {
        json_default(g);
        action = [&] { return cmd_verify(g, suite); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage_error;
    }
    if (g.format.empty()) g.format = "csv";
    try {
        return action();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage_error;
    } catch (const BudgetExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return budget_exhausted;
    } catch (const PrecisionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return budget_exhausted;
    } catch (const std::exception& e) {
        // domain, unsupported and malformed-input errors are usage errors
        std::cerr << "error: " << e.what() << "\n";
        return usage_error;
    }
}
