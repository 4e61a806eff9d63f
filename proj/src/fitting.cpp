#include "excitrans/fitting.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace excitrans {

double ScalingFit::predict(double x) const {
    const double u = model == ScalingModel::PowerLaw ? std::log(x) : x;
    return std::exp(intercept + slope * u);
}

std::string model_name(ScalingModel model) {
    return model == ScalingModel::PowerLaw ? "powerlaw" : "exponential";
}

ScalingFit fit_scaling(std::span<const double> xs, std::span<const double> ys, ScalingModel model) {
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("fit_scaling: xs and ys differ in length");
    }
    if (xs.size() < 4) {
        throw std::invalid_argument("fit_scaling: need at least 4 points");
    }
    std::vector<double> u(xs.size());
    std::vector<double> v(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(ys[i] > 0.0) || !std::isfinite(ys[i])) {
            throw std::invalid_argument("fit_scaling: log model needs positive finite ys");
        }
        if (model == ScalingModel::PowerLaw && !(xs[i] > 0.0)) {
            throw std::invalid_argument("fit_scaling: power law needs positive xs");
        }
        u[i] = model == ScalingModel::PowerLaw ? std::log(xs[i]) : xs[i];
        v[i] = std::log(ys[i]);
    }
    const double n = static_cast<double>(u.size());
    double mu = 0.0;
    double mv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        mu += u[i];
        mv += v[i];
    }
    mu /= n;
    mv /= n;
    double suu = 0.0;
    double suv = 0.0;
    double svv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        suu += (u[i] - mu) * (u[i] - mu);
        suv += (u[i] - mu) * (v[i] - mv);
        svv += (v[i] - mv) * (v[i] - mv);
    }
    if (!(suu > 0.0)) {
        throw std::invalid_argument("fit_scaling: xs are all equal");
    }
    ScalingFit fit;
    fit.model = model;
    fit.slope = suv / suu;
    fit.intercept = mv - fit.slope * mu;
    fit.points = static_cast<int>(u.size());
    fit.r_squared = svv > 0.0 ? (suv * suv) / (suu * svv) : 1.0;
    return fit;
}

std::optional<Crossover> crossover_locator(std::span<const double> xs, std::span<const double> ys, double min_slope) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::invalid_argument("crossover_locator: need two or more matching samples");
    }
    std::optional<Crossover> best;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(xs[i + 1] > xs[i]) || !(ys[i] > 0.0) || !(ys[i + 1] > 0.0)) {
            throw std::invalid_argument("crossover_locator: needs increasing positive xs and positive ys");
        }
        const double slope = std::log(ys[i + 1] / ys[i]) / std::log(xs[i + 1] / xs[i]);
        if (slope > min_slope && (!best || slope > best->max_slope)) {
            best = Crossover{std::sqrt(xs[i] * xs[i + 1]), slope, static_cast<int>(i)};
        }
    }
    return best;
}

}  // namespace excitrans
