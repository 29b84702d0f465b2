#pragma once

#include <Eigen/Dense>

namespace todatri {

// Explicit coordinate charts on the space of operators.
//   PhiK1: potentials phi_1..phi_n with a_i^{(1)} = e^{phi_i - phi_{i-1}}  (k = 1)
//   XK1:   x_i = xi_1^-(i) together with the leaf value e_1               (k = 1)
//   XYK2:  x_i = xi_1^-(i), y_i = xi_2^-(i) with leaf values e_1, e_2     (k = 2)
enum class Chart { PhiK1, XK1, XYK2 };

struct ChartPoint {
    Chart chart = Chart::XK1;
    int n = 0;
    Eigen::VectorXd x;  // phi for PhiK1; x otherwise (site i at slot i-1)
    Eigen::VectorXd y;  // XYK2 only
    double e1 = 0.0;
    double e2 = 0.0;
    // PhiK1 leaf offset: phi is quasi-periodic, phi_{i-n} = phi_i - lnr with
    // lnr = ln prod a^{(1)}; carried so wrapped differences reproduce the
    // true coefficients.
    double lnr = 0.0;
};

inline const char* chart_name(Chart c) {
    switch (c) {
        case Chart::PhiK1: return "phi-k1";
        case Chart::XK1: return "x-k1";
        case Chart::XYK2: return "xy-k2";
    }
    return "?";
}

}  // namespace todatri
