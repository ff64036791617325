#pragma once

#include <cstddef>

namespace ising {

// Tolerances and budgets shared by every module. Kept in one place so that
// the CLI can echo the effective values into output headers.
struct Config {
    double eps_q = 1e-6;            // theta series refuse |q| > 1 - eps_q
    double series_tol = 1e-17;      // relative truncation for theta / q-series
    double agm_tol = 1e-16;
    double hyp_near_one = 0.9;      // switch to the connection formula above this
    double q_cutoff = 1e-30;        // keep q^{j^2} terms above this
    double t_max_quadrature = 0.95;
    double corr_taylor_switch = 1e-3;

    std::size_t budget_1d = 1u << 14;
    std::size_t budget_2d = 512;
    std::size_t budget_3d = 160;
    std::size_t budget_4d = 64;

    int chid3_default_order = 40;
    int chid12_default_order = 200;
    int ode_min_margin = 10;
};

inline const Config& default_config() {
    static const Config c{};
    return c;
}

inline std::size_t node_budget(int dim, const Config& c = default_config()) {
    switch (dim) {
        case 1: return c.budget_1d;
        case 2: return c.budget_2d;
        case 3: return c.budget_3d;
        default: return c.budget_4d;
    }
}

}  // namespace ising
