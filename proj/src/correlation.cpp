#include "gausszeros/correlation.hpp"

#include "gausszeros/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace gausszeros {

void CorrelationModel::require_order(int order) const {
    if (order < 0 || order > max_derivative_order())
        throw OrderUnavailable(name() + ": derivative order " + std::to_string(order) +
                               " exceeds available order " +
                               std::to_string(max_derivative_order()));
}

std::vector<double> CorrelationModel::eval_kappa_derivs(double x, int max_order) const {
    require_order(max_order);
    std::vector<double> out(max_order + 1);
    derivs(x, max_order, out.data());
    return out;
}

std::vector<Extended> CorrelationModel::eval_kappa_derivs_ext(const Extended& x,
                                                              int max_order) const {
    require_order(max_order);
    std::vector<Extended> out(max_order + 1);
    derivs(x, max_order, out.data());
    return out;
}

double CorrelationModel::spectral_mass(double, double) const {
    return std::numeric_limits<double>::quiet_NaN();
}

namespace {

constexpr int kPresetOrder = 12;

template <class Derived>
class Preset : public CorrelationModel {
public:
    int max_derivative_order() const override { return kPresetOrder; }
    void derivs(double x, int order, double* out) const override {
        Derived::eval(x, order, out);
    }
    void derivs(const Extended& x, int order, Extended* out) const override {
        Derived::eval(x, order, out);
    }
    double tail_envelope(int k, double r) const override {
        // monotone beyond decay_radius, so the sup sits at r
        double buf[kPresetOrder + 1];
        Derived::eval(r, k, buf);
        double m = 0.0;
        for (int l = 0; l <= k; ++l) m = std::max(m, std::abs(buf[l]));
        return m;
    }
};

// kappa = exp(-x^2/2); kappa^{(j)} = (-1)^j He_j(x) kappa
class BargmannFock : public Preset<BargmannFock> {
public:
    std::string name() const override { return "bargmann-fock"; }
    // standard normal law
    double spectral_mass(double a, double b) const override {
        return 0.5 * (std::erfc(a / std::sqrt(2.0)) - std::erfc(b / std::sqrt(2.0)));
    }
    // largest root of He_13 is about 5.83
    double decay_radius(int) const override { return 7.0; }

    template <class T>
    static void eval(const T& x, int order, T* out) {
        using std::exp;
        const T e = exp(-x * x / 2);
        T hprev(1), h = x;
        out[0] = e;
        if (order >= 1) out[1] = -x * e;
        for (int j = 1; j < order; ++j) {
            T hn = x * h - T(j) * hprev;
            hprev = h;
            h = hn;
            out[j + 1] = ((j + 1) % 2 ? -h : h) * e;
        }
    }
};

// kappa = 1/(1 + x^2/2) = sqrt2 Im w, w = 1/(x - i sqrt2)
class CauchyType : public Preset<CauchyType> {
public:
    std::string name() const override { return "cauchy"; }
    // density (sqrt2/2) exp(-sqrt2 |w|)
    double spectral_mass(double a, double b) const override {
        auto cdf = [](double w) {
            const double e = 0.5 * std::exp(-std::sqrt(2.0) * std::abs(w));
            return w < 0 ? e : 1.0 - e;
        };
        return cdf(b) - cdf(a);
    }
    // last sign change of kappa^{(13)} is at sqrt2 / tan(pi/15) < 6.7
    double decay_radius(int) const override { return 7.0; }

    template <class T>
    static void eval(const T& x, int order, T* out) {
        using std::sqrt;
        const T r2 = sqrt(T(2));
        const T den = x * x + 2;
        const T wr = x / den, wi = r2 / den;
        T pr = wr, pi = wi;  // w^{j+1}
        T fact(1);
        for (int j = 0; j <= order; ++j) {
            if (j > 0) {
                fact *= j;
                const T nr = pr * wr - pi * wi;
                pi = pr * wi + pi * wr;
                pr = nr;
            }
            out[j] = (j % 2 ? -r2 : r2) * fact * pi;
        }
    }
};

// kappa = sinc(sqrt3 x)
class SincSqrt3 : public Preset<SincSqrt3> {
public:
    std::string name() const override { return "sinc"; }
    // uniform on [-sqrt3, sqrt3]
    double spectral_mass(double a, double b) const override {
        const double c = std::sqrt(3.0);
        const double len = std::min(b, c) - std::max(a, -c);
        return len > 0 ? len / (2 * c) : 0.0;
    }
    // never eventually monotone; the grid runs this far and the
    // envelope 2 s^l / (s r) covers the rest
    double decay_radius(int) const override { return 400.0; }
    double tail_envelope(int k, double r) const override {
        const double s = std::sqrt(3.0);
        double m = 0.0;
        for (int l = 0; l <= k; ++l)
            m = std::max(m, std::pow(s, l) * std::min(1.0 / (l + 1), 2.0 / (s * r)));
        return m;
    }

    template <class T>
    static void eval(const T& x, int order, T* out) {
        using std::abs;
        using std::cos;
        using std::sin;
        using std::sqrt;
        const T s = sqrt(T(3));
        const T y = s * x;
        if (abs(y) < 6) {
            // sinc^{(j)}(y) = sum_{2k >= j} (-1)^k y^{2k-j} / ((2k+1) (2k-j)!)
            const T eps = std::numeric_limits<T>::epsilon();
            for (int j = 0; j <= order; ++j) {
                T sum(0);
                int k = (j + 1) / 2;
                // term for the first k: y^{2k-j}/(2k-j)!
                T pw(1);
                for (int m = 1; m <= 2 * k - j; ++m) pw *= y / m;
                for (; k < 200; ++k) {
                    const T term = pw / (2 * k + 1);
                    sum += (k % 2 ? -term : term);
                    if (2 * k - j > 2 && abs(term) < eps * 1e-3 * (abs(sum) + eps)) break;
                    const int e = 2 * k - j;
                    pw *= y * y / T((e + 1) * (e + 2));
                }
                out[j] = sum;
            }
        } else {
            // Leibniz on sin(y) * y^{-1}
            const T sn = sin(y), cs = cos(y);
            const T inv = 1 / y;
            for (int j = 0; j <= order; ++j) {
                T sum(0);
                T binom(1);
                for (int m = 0; m <= j; ++m) {
                    if (m > 0) binom = binom * T(j - m + 1) / T(m);
                    T dsin;
                    switch (m % 4) {
                        case 0: dsin = sn; break;
                        case 1: dsin = cs; break;
                        case 2: dsin = -sn; break;
                        default: dsin = -cs; break;
                    }
                    const int q = j - m;
                    T f(1);
                    for (int i = 2; i <= q; ++i) f *= i;
                    T p = inv;
                    for (int i = 0; i < q; ++i) p *= inv;
                    sum += binom * dsin * (q % 2 ? -f : f) * p;
                }
                out[j] = sum;
            }
        }
        T sp(1);
        for (int j = 0; j <= order; ++j) {
            out[j] *= sp;
            sp *= s;
        }
    }
};

// Discrete symmetric spectral measure sum_q w_q (delta_{xi_q} + delta_{-xi_q}),
// folded into weights 2 w_q. Exactly even and positive definite.
class SpectralTable : public CorrelationModel {
public:
    SpectralTable(std::vector<double> nodes, std::vector<double> weights, int order)
        : nodes_(std::move(nodes)), weights_(std::move(weights)), order_(order) {
        nodes_q_.reserve(nodes_.size());
        weights_q_.reserve(weights_.size());
        for (double v : nodes_) nodes_q_.emplace_back(v);
        for (double v : weights_) weights_q_.emplace_back(v);
    }
    std::string name() const override { return "spectral-table"; }
    int max_derivative_order() const override { return order_; }
    void derivs(double x, int order, double* out) const override {
        eval(nodes_, weights_, x, order, out);
    }
    void derivs(const Extended& x, int order, Extended* out) const override {
        eval(nodes_q_, weights_q_, x, order, out);
    }
    // no decay certificate from tabulated data; the grid covers 200 units
    double decay_radius(int) const override { return 200.0; }
    double tail_envelope(int, double) const override { return 0.0; }

private:
    template <class T>
    static void eval(const std::vector<T>& nodes, const std::vector<T>& weights, const T& x,
                     int order, T* out) {
        using std::cos;
        using std::sin;
        for (int j = 0; j <= order; ++j) out[j] = T(0);
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const T arg = x * nodes[q];
            const T c = cos(arg), s = sin(arg);
            T p = weights[q];
            for (int j = 0; j <= order; ++j) {
                switch (j % 4) {
                    case 0: out[j] += p * c; break;
                    case 1: out[j] -= p * s; break;
                    case 2: out[j] -= p * c; break;
                    default: out[j] += p * s; break;
                }
                p *= nodes[q];
            }
        }
    }

    std::vector<double> nodes_, weights_;
    std::vector<Extended> nodes_q_, weights_q_;
    int order_;
};

double grid_step(double eta) { return std::clamp(eta / 1000.0, 1e-3, 1e-1); }

}  // namespace

ModelPtr make_preset(const std::string& name) {
    if (name == "bargmann-fock" || name == "bf") return std::make_shared<BargmannFock>();
    if (name == "sinc" || name == "sinc-sqrt3") return std::make_shared<SincSqrt3>();
    if (name == "cauchy") return std::make_shared<CauchyType>();
    throw ConfigError("unknown model preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"bargmann-fock", "sinc", "cauchy"}; }

double tail_norm(const CorrelationModel& model, int k, double eta) {
    model.require_order(k);
    if (eta < 0) throw OrderUnavailable("tail_norm: eta must be non-negative");
    const double radius = std::max(eta, model.decay_radius(k));
    const double h = grid_step(eta);
    std::vector<double> buf(k + 1);
    double sup = 0.0;
    const auto n = static_cast<long>(std::ceil((radius - eta) / h));
    for (long i = 0; i <= n; ++i) {
        const double x = std::min(eta + i * h, radius);
        model.derivs(x, k, buf.data());
        for (int l = 0; l <= k; ++l) sup = std::max(sup, std::abs(buf[l]));
    }
    return std::max(sup, model.tail_envelope(k, radius));
}

namespace {

constexpr int kGaussPoints = 20;
constexpr double kPanelWidth = 0.1;

void add_panel(std::vector<double>& nodes, std::vector<double>& weights, double a, double b,
               const std::function<double(double)>& g) {
    using Rule = boost::math::quadrature::gauss<double, kGaussPoints>;
    const auto& absc = Rule::abscissa();
    const auto& wts = Rule::weights();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto push = [&](double t, double w) {
        const double xi = mid + half * t;
        const double gv = g(xi);
        if (gv < 0) throw DegenerateDensity("spectral density is negative at xi = " + std::to_string(xi));
        if (gv == 0) return;
        nodes.push_back(xi);
        weights.push_back(2.0 * half * w * gv);  // factor 2: mirror half-line
    };
    // boost stores the non-negative half; an even rule has no zero node
    for (std::size_t i = 0; i < absc.size(); ++i) {
        if (absc[i] == 0.0) {
            push(0.0, wts[i]);
        } else {
            push(absc[i], wts[i]);
            push(-absc[i], wts[i]);
        }
    }
}

void add_interval(std::vector<double>& nodes, std::vector<double>& weights, double a, double b,
                  double width, const std::function<double(double)>& g) {
    if (b <= a) return;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    for (int i = 0; i < pieces; ++i)
        add_panel(nodes, weights, a + (b - a) * i / pieces, a + (b - a) * (i + 1) / pieces, g);
}

}  // namespace

ModelPtr normalize_from_spectral_density(const SpectralDensity& raw) {
    std::vector<double> nodes, weights;
    double body_end = 0.0;
    std::function<double(double)> body;
    if (raw.evaluator) {
        if (!(raw.cutoff > 0)) throw DegenerateDensity("evaluator density needs a positive cutoff");
        body_end = raw.cutoff;
        body = raw.evaluator;
        add_interval(nodes, weights, 0.0, body_end, kPanelWidth, body);
    } else {
        const auto& xs = raw.xi;
        const auto& gs = raw.g;
        if (xs.empty() || xs.size() != gs.size())
            throw ConfigError("spectral table needs equally long non-empty xi and g");
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] < 0 || (i > 0 && xs[i] <= xs[i - 1]))
                throw ConfigError("spectral table xi must be non-negative and increasing");
            if (gs[i] < 0) throw DegenerateDensity("spectral table has negative g");
        }
        body_end = xs.back();
        auto interp = [&xs, &gs](double t) {
            auto it = std::upper_bound(xs.begin(), xs.end(), t);
            if (it == xs.begin()) return gs.front();
            if (it == xs.end()) return gs.back();
            const std::size_t i = it - xs.begin();
            const double w = (t - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return (1 - w) * gs[i - 1] + w * gs[i];
        };
        // table on [0, xi_0] is taken constant at g_0
        add_interval(nodes, weights, 0.0, xs.front(), kPanelWidth, interp);
        for (std::size_t i = 0; i + 1 < xs.size(); ++i)
            add_interval(nodes, weights, xs[i], xs[i + 1], kPanelWidth, interp);
    }

    int order = kPresetOrder;
    const auto& p = raw.tail_params;
    switch (raw.tail) {
        case SpectralTail::None: break;
        case SpectralTail::Gaussian: {
            if (p.size() != 2 || p[0] < 0 || !(p[1] > 0))
                throw ConfigError("gaussian tail needs params [c, s] with c >= 0, s > 0");
            const double c = p[0], s = p[1];
            auto g = [c, s](double t) { return c * std::exp(-t * t / (2 * s * s)); };
            double top = std::max(body_end, s);
            // |xi|^12 g beyond top contributes < 1e-12
            while (c * std::pow(top, 13) * std::exp(-top * top / (2 * s * s)) > 1e-14) top += 0.1 * s;
            add_interval(nodes, weights, body_end, top, kPanelWidth, g);
            break;
        }
        case SpectralTail::Power: {
            if (p.size() != 2 || p[0] < 0 || !(p[1] > 0))
                throw ConfigError("power tail needs params [c, alpha] with c >= 0, alpha > 0");
            const double c = p[0], alpha = p[1];
            if (c > 0 && alpha <= 3)
                throw DegenerateDensity("power tail with alpha <= 3 has infinite second moment");
            if (c > 0) {
                order = std::min(kPresetOrder, static_cast<int>(std::ceil(alpha - 1)) - 1);
                if (body_end <= 0) throw ConfigError("power tail needs a table reaching xi > 0");
                const double top = std::min(
                    1e6, std::max(2 * body_end, std::pow(c / ((alpha - 3) * 1e-12), 1.0 / (alpha - 3))));
                auto g = [c, alpha](double t) { return c * std::pow(t, -alpha); };
                // geometric panels keep the node count bounded
                double a = body_end;
                while (a < top) {
                    const double b = std::min(top, a + std::max(kPanelWidth, 0.05 * a));
                    add_panel(nodes, weights, a, b, g);
                    a = b;
                }
            }
            break;
        }
    }

    double moment0 = 0.0, moment2 = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        moment0 += weights[q];
        moment2 += weights[q] * nodes[q] * nodes[q];
    }
    if (!(moment0 > 0)) throw DegenerateDensity("spectral density has zero mass");
    if (!(moment2 > 0)) throw DegenerateDensity("spectral density has zero second moment");
    // kappa_new(x) = kappa_raw(c x) / A with c = sqrt(A/B)
    const double scale = std::sqrt(moment0 / moment2);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        nodes[q] *= scale;
        weights[q] /= moment0;
    }
    return std::make_shared<SpectralTable>(std::move(nodes), std::move(weights), order);
}

SpectralDensity parse_spectral_json(const std::string& text) {
    SpectralDensity d;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("spectral table: ") + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "xi" && it.key() != "g" && it.key() != "tail")
            throw ConfigError("spectral table: unknown key '" + it.key() + "'");
    try {
        d.xi = j.at("xi").get<std::vector<double>>();
        d.g = j.at("g").get<std::vector<double>>();
        if (d.xi.size() != d.g.size())
            throw ConfigError("spectral table: 'xi' and 'g' lengths differ");
        if (j.contains("tail")) {
            const auto& t = j.at("tail");
            const auto kind = t.at("kind").get<std::string>();
            if (kind == "gaussian") d.tail = SpectralTail::Gaussian;
            else if (kind == "power") d.tail = SpectralTail::Power;
            else if (kind == "none") d.tail = SpectralTail::None;
            else throw ConfigError("spectral table: unknown tail kind '" + kind + "'");
            if (t.contains("params")) d.tail_params = t.at("params").get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("spectral table: ") + e.what());
    }
    return d;
}

SpectralDensity load_spectral_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spectral table '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spectral_json(ss.str());
}

ModelPtr resolve_model(const std::string& spec) {
    for (const auto& n : preset_names())
        if (spec == n) return make_preset(spec);
    if (spec == "bf" || spec == "sinc-sqrt3") return make_preset(spec);
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json")
        return normalize_from_spectral_density(load_spectral_json(spec));
    throw ConfigError("unknown model '" + spec + "' (expected a preset name or a .json spectral table)");
}

}  // namespace gausszeros
