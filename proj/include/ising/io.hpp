#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "config.hpp"
#include "exact_series.hpp"
#include "ode_guesser.hpp"

namespace ising {

using json = nlohmann::ordered_json;

inline json config_json(const Config& c) {
    return json{{"eps_q", c.eps_q},
                {"series_tol", c.series_tol},
                {"agm_tol", c.agm_tol},
                {"hyp_near_one", c.hyp_near_one},
                {"q_cutoff", c.q_cutoff},
                {"t_max_quadrature", c.t_max_quadrature},
                {"corr_taylor_switch", c.corr_taylor_switch},
                {"budget_1d", c.budget_1d},
                {"budget_2d", c.budget_2d},
                {"budget_3d", c.budget_3d},
                {"budget_4d", c.budget_4d},
                {"chid3_default_order", c.chid3_default_order},
                {"chid12_default_order", c.chid12_default_order},
                {"ode_min_margin", c.ode_min_margin}};
}

// 17 significant digits, the round-trip precision of a double
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Cell = std::variant<double, long, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// Everything that determines the output; the thread count is deliberately absent.
struct RunInfo {
    std::string command;
    json options = json::object();
    Config config = default_config();
};

inline json run_header(const RunInfo& info) {
    return json{{"command", info.command}, {"options", info.options}, {"config", config_json(info.config)}};
}

inline std::string cell_csv(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) return fmt17(*d);
    if (auto l = std::get_if<long>(&c)) return std::to_string(*l);
    if (auto b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

inline json cell_json(const Cell& c) {
    return std::visit([](const auto& v) { return json(v); }, c);
}

inline void write_csv(std::ostream& os, const RunInfo& info, const Table& t) {
    os << "# " << run_header(info).dump() << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_csv(row[i]);
        os << "\n";
    }
}

inline json table_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
        rows.push_back(r);
    }
    return rows;
}

inline void write_json(std::ostream& os, const RunInfo& info, const json& payload) {
    json doc = run_header(info);
    doc["result"] = payload;
    os << doc.dump(2) << "\n";
}

inline void write_table(std::ostream& os, const RunInfo& info, const Table& t, const std::string& format) {
    if (format == "csv") write_csv(os, info, t);
    else write_json(os, info, table_json(t));
}

// ---------------------------------------------------------------------------
// Exact objects

inline json series_json(const ExactSeries& s) {
    json c = json::array();
    for (const auto& v : s.coefficients) c.push_back(to_string(v));
    return json{{"variable", var_name(s.variable)}, {"order", s.order()}, {"coefficients", c}};
}

inline ExactSeries series_from_json(const json& j) {
    const json& body = j.contains("result") ? j.at("result") : j;
    const json& sj = body.contains("series") ? body.at("series") : body;
    ExactSeries s;
    s.variable = parse_var(sj.at("variable").get<std::string>());
    for (const auto& c : sj.at("coefficients")) s.coefficients.push_back(parse_rational(c.get<std::string>()));
    return s;
}

inline json ode_json(const FuchsianODE& ode) {
    json rows = json::array();
    for (const auto& row : ode.coefficients) {
        json r = json::array();
        for (const auto& v : row) r.push_back(to_string(v));
        rows.push_back(r);
    }
    return json{{"variable", var_name(ode.variable)},
                {"order", ode.order},
                {"degree", ode.degree},
                {"theta_degree", ode.theta_degree},
                {"series_order", ode.series_order},
                {"margin", ode.margin},
                {"nullity", ode.nullity},
                {"coefficients", rows}};
}

inline json singular_points_json(const SingularPointReport& rep) {
    json pts = json::array();
    for (const auto& p : rep.points)
        pts.push_back(json{{"re", p.root.real()}, {"im", p.root.imag()}, {"multiplicity", p.multiplicity}});
    json cyc = json::array();
    for (const auto& c : rep.cyclotomic) cyc.push_back(json{{"m", c.m}, {"multiplicity", c.multiplicity}});
    return json{{"roots", pts}, {"cyclotomic_factors", cyc}, {"root_zero_multiplicity", rep.x_power}};
}

}  // namespace ising
