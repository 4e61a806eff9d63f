// fitting.hpp - least-squares scaling fits and crossover location.

#pragma once

#include <optional>
#include <span>
#include <string>

namespace excitrans {

enum class ScalingModel {
    Exponential,  ///< log y = a + b x, b is the rate
    PowerLaw,     ///< log y = a + b log x, b is the exponent
};

struct ScalingFit {
    ScalingModel model = ScalingModel::PowerLaw;
    double slope = 0.0;      ///< exponent (power law) or rate (exponential)
    double intercept = 0.0;  ///< in log space
    double r_squared = 0.0;
    int points = 0;

    [[nodiscard]] double predict(double x) const;
};

/// Ordinary least squares in log space. Needs at least four points, positive ys,
/// and positive xs for the power law; throws std::invalid_argument otherwise.
[[nodiscard]] ScalingFit fit_scaling(std::span<const double> xs, std::span<const double> ys, ScalingModel model);

[[nodiscard]] std::string model_name(ScalingModel model);

struct Crossover {
    double x_star = 0.0;     ///< geometric midpoint of the steepest interval
    double max_slope = 0.0;  ///< d log y / d log x there
    int interval = 0;        ///< index i of the interval [x_i, x_{i+1}]
};

/// Point of maximum log-log slope of a sampled curve with increasing xs.
/// Returns nullopt when no interval rises faster than min_slope (a flat curve).
[[nodiscard]] std::optional<Crossover> crossover_locator(std::span<const double> xs, std::span<const double> ys,
                                                         double min_slope = 0.05);

}  // namespace excitrans
