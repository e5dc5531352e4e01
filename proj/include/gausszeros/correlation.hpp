#pragma once

#include "gausszeros/extended.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gausszeros {

// Normalized stationary correlation function: kappa(0) = 1, kappa''(0) = -1.
class CorrelationModel {
public:
    virtual ~CorrelationModel() = default;

    virtual std::string name() const = 0;
    virtual int max_derivative_order() const = 0;

    // out[j] = kappa^{(j)}(x) for j = 0..order. No order check.
    virtual void derivs(double x, int order, double* out) const = 0;
    virtual void derivs(const Extended& x, int order, Extended* out) const = 0;

    // Beyond this radius every |kappa^{(l)}|, l <= k, is non-increasing,
    // or at least dominated by tail_envelope.
    virtual double decay_radius(int k) const = 0;
    // Upper bound for sup_{|x| >= r, l <= k} |kappa^{(l)}(x)|, valid for r >= decay_radius(k).
    virtual double tail_envelope(int k, double r) const = 0;

    // Spectral mass of [a, b], with kappa(x) = int cos(w x) dmu(w) and mu even.
    // NaN when the model has no closed form for it.
    virtual double spectral_mass(double a, double b) const;

    std::vector<double> eval_kappa_derivs(double x, int max_order) const;
    std::vector<Extended> eval_kappa_derivs_ext(const Extended& x, int max_order) const;
    void require_order(int order) const;
};

using ModelPtr = std::shared_ptr<const CorrelationModel>;

// "bargmann-fock", "sinc" (sinc(sqrt(3) x)), "cauchy" (1/(1 + x^2/2)).
ModelPtr make_preset(const std::string& name);
std::vector<std::string> preset_names();

double tail_norm(const CorrelationModel& model, int k, double eta);

enum class SpectralTail { None, Gaussian, Power };

// Even density on the real line, described on xi >= 0. Either a table
// (linear interpolation on xi, g) or an evaluator on [0, cutoff]; past the
// last table node or the cutoff the tail model takes over.
//   Gaussian tail: params {c, s}, g = c exp(-xi^2 / (2 s^2))
//   Power tail:    params {c, alpha}, g = c xi^{-alpha}
struct SpectralDensity {
    std::vector<double> xi;
    std::vector<double> g;
    std::function<double(double)> evaluator;
    double cutoff = 0.0;
    SpectralTail tail = SpectralTail::None;
    std::vector<double> tail_params;
};

ModelPtr normalize_from_spectral_density(const SpectralDensity& raw);

// {"xi": [...], "g": [...], "tail": {"kind": "gaussian|power|none", "params": [...]}}
SpectralDensity load_spectral_json(const std::string& path);
SpectralDensity parse_spectral_json(const std::string& text);

// Preset name or path to a spectral-table JSON file.
ModelPtr resolve_model(const std::string& spec);

}  // namespace gausszeros
