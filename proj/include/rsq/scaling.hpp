#pragma once

#include <array>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rsq/entropy.hpp"
#include "rsq/model.hpp"

namespace rsq {

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double ssr = 0.0;
    int n_points = 0;
};

/// Ordinary least squares y = slope*x + intercept; slope_stderr from the
/// residual variance.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct ScalingPoint {
    double block_size = 0.0;
    double mean = 0.0;
    double stderr_mean = 0.0;
};

struct PowerLawFit {
    double gamma = 0.0;
    double gamma_stderr = 0.0;
    double log_amplitude = 0.0;
    int n_points = 0;
};

/// OLS of ln(mean) on ln(L). Nonpositive means are dropped; fewer than 4
/// usable points raises FitError. The block sizes must be strictly increasing.
PowerLawFit fit_power_law(std::span<const ScalingPoint> points);

struct GammaPoint {
    double q = 0.0;
    double gamma = 0.0;
    double gamma_stderr = 0.0;
};

struct QuadraticFit {
    double u = 0.0, v = 0.0, w = 0.0; ///< gamma(q) = u q^2 + v q + w
    std::array<std::array<double, 3>, 3> covariance{};
    double chi2_reduced = 0.0;
    int n_points = 0;
};

/// Least squares of gamma on (q^2, q, 1), weighted by 1/stderr^2 by default.
/// Needs >= 5 points with at least 3 distinct q values.
QuadraticFit fit_gamma_quadratic(std::span<const GammaPoint> points, bool weighted = true);

struct QExtSolution {
    double q_ext = 0.0;
    double delta_q_ext = 0.0;
};

/// Root of u q^2 + v q + (w - 1) = 0 inside scan_interval, with the propagated
/// error dgamma / |2 u q_ext + v|. Falls back to the linear solution when
/// |u| < 1e-12. Zero or two in-interval roots raise FitError with guidance.
QExtSolution solve_q_ext(const QuadraticFit& fit, double dgamma,
                         std::pair<double, double> scan_interval);

double c_eff_of_spin(int two_s); ///< ln(2S+1)
double q_ext_pure(double c);     ///< (sqrt(9+c^2) - 3)/c
double q_ext_linear(double c_eff);

/// Empirical coefficient of the linear law q_ext = 1 - k/c_eff.
inline constexpr double kQExtLinearCoefficient = 1.67;

/// Default scan window: q_ext_linear(c_eff) rounded to 0.1, plus/minus 0.1.
std::pair<double, double> default_q_window(const ModelKind& model);
std::vector<double> default_q_grid(const ModelKind& model, int n_points = 11);

struct AnalyzeOptions {
    double q_window_min = std::numeric_limits<double>::quiet_NaN(); ///< NaN -> model default
    double q_window_max = std::numeric_limits<double>::quiet_NaN();
    double fit_block_min = 0.0; ///< 0 -> no clipping of the ladder
    double fit_block_max = 0.0;
    std::string dgamma_policy = "median"; ///< median | max of gamma stderrs
    bool weighted_quadratic = true;
    double scan_pad = 0.25; ///< root scan interval = q window padded by this
};

struct ScalingFit {
    std::string model_name;
    int two_s = 1;
    std::vector<GammaPoint> gamma_points; ///< every q fitted from the table
    QuadraticFit quadratic;               ///< fit over the q window only
    double dgamma = 0.0;
    double q_ext = 0.0;
    double delta_q_ext = 0.0;
    double c_eff = 0.0;
    double q_ext_linear_pred = 0.0;
    double trio_fraction = std::numeric_limits<double>::quiet_NaN();
    std::pair<double, double> q_window{0.0, 0.0};
    std::pair<double, double> scan_interval{0.0, 0.0};
};

/// Full per-model scaling analysis of an ensemble-averaged entropy table:
/// power-law exponent per q, quadratic fit of gamma(q), extensivity index.
ScalingFit analyze_table(const EntropyTable& table, const ModelKind& model,
                         const AnalyzeOptions& opts = {},
                         double trio_fraction = std::numeric_limits<double>::quiet_NaN());

struct SweepRow {
    std::string model_name;
    double c_eff = 0.0;
    double q_ext = 0.0;
    double delta_q_ext = 0.0;
};

/// One-parameter least squares of q_ext = 1 - k/c_eff across models; refuses
/// fewer than 2 rows.
double fit_inverse_ceff_slope(std::span<const SweepRow> rows);

} // namespace rsq
