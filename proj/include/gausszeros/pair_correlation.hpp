#pragma once

#include "gausszeros/correlation.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gausszeros {

struct QuadratureSpec {
    double truncation_radius = 40.0;
    double abs_tolerance = 1e-8;
    long max_nodes = 5'000'000;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;  // estimate
    bool converged = false;
    long nodes = 0;
};

// Compactly supported (or truncated at negligible decay) test function.
struct TestFunction {
    std::function<double(double)> eval;
    double lo = 0.0, hi = 0.0;   // eval vanishes (or is negligible) outside [lo, hi]
    double sup = 0.0;
    std::vector<double> kinks;   // points where eval is not smooth, inside [lo, hi]
    std::string description;
    bool is_indicator = false;

    double operator()(double x) const { return eval(x); }

    static TestFunction indicator(double a, double b);
    // exp(-((x - center) / width)^2)
    static TestFunction gaussian(double center, double width);
    // linear interpolation through (xs, ys), zero outside [xs.front(), xs.back()]
    static TestFunction table(std::vector<double> xs, std::vector<double> ys);
    // "indicator:a,b" | "gaussian:c,w" | "table:x0,x1,...|y0,y1,..."
    static TestFunction parse(const std::string& text);
};

double integral(const TestFunction& phi);
double inner_product(const TestFunction& a, const TestFunction& b);

// rho_2(0, z) - 1/pi^2 in closed form.
double two_point_F(const CorrelationModel& model, double z);
// the correlation coefficient a(z) inside F, before clamping
double two_point_a(const CorrelationModel& model, double z);

// 1/pi + 2 int_0^inf F
QuadratureResult sigma_squared(const CorrelationModel& model, const QuadratureSpec& quad = {});
// (1/pi^2) int_0^inf (kappa + kappa'')^2
QuadratureResult sigma_lower_bound(const CorrelationModel& model, const QuadratureSpec& quad = {});

// R int int phi1(x) phi2(x + z/R) F(z) dx dz + (R/pi) int phi1 phi2
QuadratureResult predicted_covariance(const CorrelationModel& model, const TestFunction& phi1,
                                      const TestFunction& phi2, double R,
                                      const QuadratureSpec& quad = {});

double expected_linear_statistic(const TestFunction& phi, double R);

// Integral of f over [a, inf) on unit panels up to `start`, then doubling
// blocks with geometric extrapolation of the remainder.
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f,
                                       const std::vector<double>& breakpoints,
                                       const QuadratureSpec& quad);

}  // namespace gausszeros
