#include "gausszeros/pair_correlation.hpp"

#include "gausszeros/errors.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gausszeros {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kNearZero = 1e-4;   // F switches to its limit inside this
constexpr double kExtendedBelow = 0.5;

template <class T>
T a_coefficient(const T* k, T& den) {
    den = 1 - k[0] * k[0] - k[1] * k[1];
    const T num = k[0] * k[1] * k[1] - k[0] * k[0] * k[2] + k[2];
    return num / den;
}

template <class T>
T F_impl(const CorrelationModel& model, const T& z) {
    using std::asin;
    using std::sqrt;
    T k[3];
    model.derivs(z, 2, k);
    const T u = k[0] * k[0];
    const T one = 1 - u;
    if (one < T(1e-14))
        throw NearSingular("1 - kappa(z)^2 vanishes at z = " + std::to_string(static_cast<double>(z)));
    T den;
    T a = a_coefficient(k, den);
    if (a > 1) a = 1;
    if (a < -1) a = -1;
    // factor * h(a) - 1 = (factor - 1) + factor (h(a) - 1), each part written
    // without cancellation so F keeps relative accuracy as kappa -> 0
    const T root = sqrt(one);
    const T factor = den / (one * root);
    const T factor_m1 = (one * u / (1 + root) - k[1] * k[1]) / (one * root);
    const T h_m1 = a * asin(a) - a * a / (1 + sqrt(1 - a * a));
    const T pi = boost::math::constants::pi<T>();
    return (factor_m1 + factor * h_m1) / (pi * pi);
}

struct Counted {
    const std::function<double(double)>& f;
    long* nodes;
    double operator()(double x) const {
        ++*nodes;
        return f(x);
    }
};

// Gauss-Kronrod 15 with bisection until the Kronrod error estimate is
// below `target` (absolute) or the depth runs out.
double gk_adaptive(const std::function<double(double)>& f, double a, double b, double target, int depth,
                   long* nodes, double* err) {
    double e = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        Counted{f, nodes}, a, b, 0, 0.0, &e);
    if (e <= target || depth == 0) {
        *err += e;
        return v;
    }
    const double m = 0.5 * (a + b);
    return gk_adaptive(f, a, m, target / 2, depth - 1, nodes, err) +
           gk_adaptive(f, m, b, target / 2, depth - 1, nodes, err);
}

constexpr double kPanelTarget = 1e-14;

double gk_panel(const std::function<double(double)>& f, double a, double b, long* nodes, double* err) {
    return gk_adaptive(f, a, b, kPanelTarget, 12, nodes, err);
}

// sum over unit-or-shorter panels of [a, b]
double panels(const std::function<double(double)>& f, double a, double b, double width, long* nodes,
              double* err) {
    if (b <= a) return 0.0;
    const long n = std::max(1L, static_cast<long>(std::ceil((b - a) / width)));
    double s = 0.0;
    for (long i = 0; i < n; ++i) s += gk_panel(f, a + (b - a) * i / n, a + (b - a) * (i + 1) / n, nodes, err);
    return s;
}

constexpr double kIntegrandFloor = 1e-6;

// F for quadrature: the closed form all the way down to 1e-6 (the public
// switch at kNearZero would bias integrals by about 1e-9).
double F_integrand(const CorrelationModel& model, double z) {
    z = std::abs(z);
    if (z < kIntegrandFloor) return -1.0 / (kPi * kPi);
    if (z < kExtendedBelow) return static_cast<double>(F_impl<Extended>(model, Extended(z)));
    return F_impl<double>(model, z);
}

}  // namespace

double two_point_F(const CorrelationModel& model, double z) {
    model.require_order(2);
    z = std::abs(z);
    if (z < kNearZero) return -1.0 / (kPi * kPi);
    if (z < kExtendedBelow) return static_cast<double>(F_impl<Extended>(model, Extended(z)));
    return F_impl<double>(model, z);
}

double two_point_a(const CorrelationModel& model, double z) {
    model.require_order(2);
    Extended k[3];
    model.derivs(Extended(z), 2, k);
    Extended den;
    return static_cast<double>(a_coefficient(k, den));
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f,
                                       const std::vector<double>& breakpoints,
                                       const QuadratureSpec& quad) {
    QuadratureResult out;
    if (breakpoints.empty()) throw ConfigError("integrate_to_infinity: need a start point");
    std::vector<double> bp = breakpoints;
    std::sort(bp.begin(), bp.end());
    const double start = std::max(bp.back(), bp.front() + quad.truncation_radius);
    bp.push_back(start);
    double err = 0.0, body = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) body += panels(f, bp[i], bp[i + 1], 1.0, &out.nodes, &err);

    // doubling blocks; remainder extrapolated from the block ratio
    double t = start, prev_piece = 0.0, prev_est = 0.0, prev_change = 0.0, tail = 0.0;
    bool have_prev = false;
    for (int blk = 0; blk < 64; ++blk) {
        const double piece = panels(f, t, 2 * t, 1.0, &out.nodes, &err);
        tail += piece;
        t *= 2;
        double rem = 0.0;
        if (have_prev && prev_piece != 0.0) {
            const double r = piece / prev_piece;
            rem = (r > 0 && r < 0.9) ? piece * r / (1 - r) : std::abs(piece);
        } else if (piece != 0.0) {
            rem = std::abs(piece);
        }
        const double est = body + tail + rem;
        const double change = have_prev ? std::abs(est - prev_est) : std::abs(piece);
        out.value = est;
        const bool negligible =
            std::abs(piece) < quad.abs_tolerance / 10 && std::abs(rem) < quad.abs_tolerance / 10;
        out.abs_error = err + (negligible ? change : std::max(change, prev_change));
        // two quiet doublings in a row: one can be a lucky oscillation
        if (negligible || (have_prev && std::max(change, prev_change) < quad.abs_tolerance / 2)) {
            out.converged = out.abs_error <= quad.abs_tolerance;
            return out;
        }
        if (out.nodes > quad.max_nodes) break;
        prev_piece = piece;
        prev_est = est;
        prev_change = change;
        have_prev = true;
    }
    out.converged = false;
    return out;
}

QuadratureResult sigma_squared(const CorrelationModel& model, const QuadratureSpec& quad) {
    model.require_order(2);
    std::function<double(double)> f = [&model](double z) { return F_integrand(model, z); };
    auto r = integrate_to_infinity(f, {0.0, kIntegrandFloor, kNearZero, kExtendedBelow, 1.0}, quad);
    if (!std::isfinite(r.value)) throw QuadratureNotConverged("sigma_squared: non-finite integral");
    r.value = 1.0 / kPi + 2.0 * r.value;
    r.abs_error *= 2.0;
    r.converged = r.abs_error <= quad.abs_tolerance;
    return r;
}

QuadratureResult sigma_lower_bound(const CorrelationModel& model, const QuadratureSpec& quad) {
    model.require_order(2);
    std::function<double(double)> f = [&model](double z) {
        double k[3];
        model.derivs(z, 2, k);
        return (k[0] + k[2]) * (k[0] + k[2]) / (kPi * kPi);
    };
    auto r = integrate_to_infinity(f, {0.0, 1.0}, quad);
    if (!std::isfinite(r.value)) throw QuadratureNotConverged("sigma_lower_bound: non-finite integral");
    return r;
}

TestFunction TestFunction::indicator(double a, double b) {
    if (!(b > a)) throw ConfigError("indicator needs a < b");
    TestFunction t;
    t.eval = [a, b](double x) { return (x >= a && x <= b) ? 1.0 : 0.0; };
    t.lo = a;
    t.hi = b;
    t.sup = 1.0;
    t.is_indicator = true;
    std::ostringstream os;
    os << "indicator:" << a << ',' << b;
    t.description = os.str();
    return t;
}

TestFunction TestFunction::gaussian(double center, double width) {
    if (!(width > 0)) throw ConfigError("gaussian needs width > 0");
    TestFunction t;
    t.eval = [center, width](double x) {
        const double u = (x - center) / width;
        return std::exp(-u * u);
    };
    // exp(-81) is below 1e-35
    t.lo = center - 9 * width;
    t.hi = center + 9 * width;
    t.sup = 1.0;
    t.kinks = {center};
    std::ostringstream os;
    os << "gaussian:" << center << ',' << width;
    t.description = os.str();
    return t;
}

TestFunction TestFunction::table(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() < 2 || xs.size() != ys.size())
        throw ConfigError("table test function needs at least two (x, y) pairs");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw ConfigError("table xs must be increasing");
    TestFunction t;
    t.lo = xs.front();
    t.hi = xs.back();
    for (double y : ys) t.sup = std::max(t.sup, std::abs(y));
    t.kinks = xs;
    std::ostringstream os;
    os << "table:";
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
    os << '|';
    for (std::size_t i = 0; i < ys.size(); ++i) os << (i ? "," : "") << ys[i];
    t.description = os.str();
    t.eval = [xs = std::move(xs), ys = std::move(ys)](double x) {
        if (x < xs.front() || x > xs.back()) return 0.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        if (it == xs.end()) return ys.back();
        const std::size_t i = it - xs.begin();
        const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return (1 - w) * ys[i - 1] + w * ys[i];
    };
    return t;
}

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size() && item.find_first_not_of(' ', used) != std::string::npos)
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number '" + item + "'");
        }
    }
    return v;
}

}  // namespace

TestFunction TestFunction::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("test function '" + text + "' lacks ':'");
    const std::string kind = text.substr(0, colon), args = text.substr(colon + 1);
    if (kind == "indicator" || kind == "gaussian") {
        const auto v = parse_list(args);
        if (v.size() != 2) throw ConfigError(kind + " takes two numbers");
        return kind == "indicator" ? indicator(v[0], v[1]) : gaussian(v[0], v[1]);
    }
    if (kind == "table") {
        const auto bar = args.find('|');
        if (bar == std::string::npos) throw ConfigError("table test function needs 'xs|ys'");
        return table(parse_list(args.substr(0, bar)), parse_list(args.substr(bar + 1)));
    }
    throw ConfigError("unknown test function kind '" + kind + "'");
}

namespace {

// integral of g over [a, b] with breakpoints from both supports
double integrate_piecewise(const std::function<double(double)>& g, double a, double b,
                           std::vector<double> cuts) {
    if (b <= a) return 0.0;
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    long nodes = 0;
    double err = 0.0, s = 0.0;
    double prev = a;
    for (double c : cuts) {
        if (c <= prev || c > b) continue;
        s += panels(g, prev, c, 0.5, &nodes, &err);
        prev = c;
    }
    return s;
}

}  // namespace

double integral(const TestFunction& phi) {
    if (phi.is_indicator) return phi.hi - phi.lo;
    return integrate_piecewise(phi.eval, phi.lo, phi.hi, phi.kinks);
}

double inner_product(const TestFunction& a, const TestFunction& b) {
    const double lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
    if (hi <= lo) return 0.0;
    if (a.is_indicator && b.is_indicator) return hi - lo;
    auto cuts = a.kinks;
    cuts.insert(cuts.end(), b.kinks.begin(), b.kinks.end());
    cuts.push_back(a.lo);
    cuts.push_back(a.hi);
    cuts.push_back(b.lo);
    cuts.push_back(b.hi);
    return integrate_piecewise([&](double x) { return a(x) * b(x); }, lo, hi, cuts);
}

double expected_linear_statistic(const TestFunction& phi, double R) { return R / kPi * integral(phi); }

QuadratureResult predicted_covariance(const CorrelationModel& model, const TestFunction& phi1,
                                      const TestFunction& phi2, double R, const QuadratureSpec& quad) {
    if (!(R > 0)) throw ConfigError("predicted_covariance needs R > 0");
    model.require_order(2);
    // G(s) = int phi1(x) phi2(x + s) dx
    auto overlap = [&](double s) {
        const double lo = std::max(phi1.lo, phi2.lo - s), hi = std::min(phi1.hi, phi2.hi - s);
        if (hi <= lo) return 0.0;
        if (phi1.is_indicator && phi2.is_indicator) return hi - lo;
        std::vector<double> cuts = phi1.kinks;
        for (double k : phi2.kinks) cuts.push_back(k - s);
        cuts.push_back(phi1.lo);
        cuts.push_back(phi1.hi);
        cuts.push_back(phi2.lo - s);
        cuts.push_back(phi2.hi - s);
        return integrate_piecewise([&](double x) { return phi1(x) * phi2(x + s); }, lo, hi, cuts);
    };
    std::function<double(double)> g = [&](double z) { return overlap(z / R) * F_integrand(model, z); };

    const double zlo = R * (phi2.lo - phi1.hi), zhi = R * (phi2.hi - phi1.lo);
    std::vector<double> cuts{zlo,        zhi,       0.0, -kIntegrandFloor, kIntegrandFloor, -kNearZero,
                             kNearZero, -kExtendedBelow, kExtendedBelow};
    std::vector<double> k1 = phi1.kinks, k2 = phi2.kinks;
    k1.insert(k1.end(), {phi1.lo, phi1.hi});
    k2.insert(k2.end(), {phi2.lo, phi2.hi});
    for (double a : k1)
        for (double b : k2) cuts.push_back(R * (b - a));
    std::sort(cuts.begin(), cuts.end());
    QuadratureResult out;
    double err = 0.0, s = 0.0, prev = zlo;
    for (double c : cuts) {
        if (c <= prev || c > zhi) continue;
        s += panels(g, prev, c, 1.0, &out.nodes, &err);
        prev = c;
        if (out.nodes > quad.max_nodes)
            throw QuadratureNotConverged("predicted_covariance: node budget exhausted");
    }
    out.value = R * s + R / kPi * inner_product(phi1, phi2);
    out.abs_error = R * err;
    out.converged = err <= quad.abs_tolerance * std::max(1.0, std::abs(out.value));
    return out;
}

}  // namespace gausszeros
