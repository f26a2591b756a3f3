#include "rsq/scaling.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rsq {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (y.size() != n) throw FitError("fit_line: x and y lengths differ");
    if (n < 2) throw FitError("fit_line: need at least 2 points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0)) throw FitError("fit_line: all x values equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.n_points = static_cast<int>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        f.ssr += r * r;
    }
    f.slope_stderr = n > 2 ? std::sqrt(std::max(f.ssr, 0.0) / (static_cast<double>(n - 2) * sxx)) : 0.0;
    return f;
}

PowerLawFit fit_power_law(std::span<const ScalingPoint> points) {
    double last = 0.0;
    for (const ScalingPoint& p : points) {
        if (!(p.block_size > last))
            throw FitError("fit_power_law: block sizes must be strictly increasing");
        last = p.block_size;
    }
    std::vector<double> lx, ly;
    lx.reserve(points.size());
    ly.reserve(points.size());
    for (const ScalingPoint& p : points) {
        if (!(p.mean > 0.0)) continue; // excluded from the log
        lx.push_back(std::log(p.block_size));
        ly.push_back(std::log(p.mean));
    }
    if (lx.size() < 4) {
        std::ostringstream os;
        os << "fit_power_law: only " << lx.size() << " usable points (need >= 4)";
        throw FitError(os.str());
    }
    const LineFit lf = fit_line(lx, ly);
    PowerLawFit f;
    f.gamma = lf.slope;
    f.gamma_stderr = lf.slope_stderr;
    f.log_amplitude = lf.intercept;
    f.n_points = lf.n_points;
    return f;
}

QuadraticFit fit_gamma_quadratic(std::span<const GammaPoint> points, bool weighted) {
    if (points.size() < 5) throw FitError("fit_gamma_quadratic: need at least 5 gamma points");
    std::vector<double> distinct;
    for (const GammaPoint& p : points) {
        if (std::find(distinct.begin(), distinct.end(), p.q) == distinct.end())
            distinct.push_back(p.q);
    }
    if (distinct.size() < 3)
        throw FitError("fit_gamma_quadratic: rank-deficient design (fewer than 3 distinct q)");

    const auto m = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd design(m, 3);
    Eigen::VectorXd y(m), wt(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const GammaPoint& p = points[static_cast<std::size_t>(i)];
        design(i, 0) = p.q * p.q;
        design(i, 1) = p.q;
        design(i, 2) = 1.0;
        y(i) = p.gamma;
        const double sigma = std::max(p.gamma_stderr, 1e-12);
        wt(i) = weighted ? 1.0 / (sigma * sigma) : 1.0;
    }
    const Eigen::MatrixXd normal = design.transpose() * wt.asDiagonal() * design;
    const Eigen::VectorXd rhs = design.transpose() * (wt.asDiagonal() * y);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    if (ldlt.info() != Eigen::Success)
        throw FitError("fit_gamma_quadratic: normal equations are singular");
    const Eigen::VectorXd coef = ldlt.solve(rhs);
    const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(3, 3));

    QuadraticFit fit;
    fit.u = coef(0);
    fit.v = coef(1);
    fit.w = coef(2);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) fit.covariance[r][c] = cov(r, c);
    const Eigen::VectorXd resid = y - design * coef;
    const double chi2 = (resid.array().square() * wt.array()).sum();
    fit.n_points = static_cast<int>(m);
    fit.chi2_reduced = m > 3 ? chi2 / static_cast<double>(m - 3) : 0.0;
    return fit;
}

QExtSolution solve_q_ext(const QuadraticFit& fit, double dgamma,
                         std::pair<double, double> scan_interval) {
    const auto [lo, hi] = scan_interval;
    if (!(lo < hi)) throw FitError("solve_q_ext: empty scan interval");
    const double u = fit.u, v = fit.v, c = fit.w - 1.0;

    const auto in_scan = [&](double q) { return q >= lo && q <= hi; };
    const auto propagated = [&](double q) {
        const double denom = std::abs(2.0 * u * q + v);
        if (!(denom > 0.0))
            throw FitError("solve_q_ext: gamma(q) is flat at the root; error propagation undefined");
        return dgamma / denom;
    };

    if (std::abs(u) < 1e-12) { // linear branch
        if (std::abs(v) < 1e-12) throw FitError("solve_q_ext: degenerate fit, gamma(q) is constant");
        const double q = -c / v;
        if (!in_scan(q)) {
            std::ostringstream os;
            os << "solve_q_ext: linear root " << q << " outside scan [" << lo << ", " << hi
               << "]; widen the q scan";
            throw FitError(os.str());
        }
        return {q, propagated(q)};
    }

    const double disc = v * v - 4.0 * u * c;
    if (disc < 0.0)
        throw FitError("solve_q_ext: gamma(q) = 1 has no real root; widen or shift the q scan");
    const double sq = std::sqrt(disc);
    // numerically stable pair of roots
    const double t = v >= 0.0 ? -0.5 * (v + sq) : -0.5 * (v - sq);
    const double r1 = t / u;
    const double r2 = c / t;

    const bool in1 = in_scan(r1), in2 = in_scan(r2);
    if (in1 && in2 && r1 != r2)
        throw FitError("solve_q_ext: both quadratic roots lie in the scan interval; narrow the scan");
    if (!in1 && !in2) {
        std::ostringstream os;
        os << "solve_q_ext: no root in scan [" << lo << ", " << hi << "] (roots " << r1 << ", " << r2
           << "); widen or shift the q scan";
        throw FitError(os.str());
    }
    const double q = in1 ? r1 : r2;
    return {q, propagated(q)};
}

double c_eff_of_spin(int two_s) {
    if (two_s < 1) throw std::invalid_argument("c_eff_of_spin: two_s must be >= 1");
    return std::log(static_cast<double>(two_s + 1));
}

double q_ext_pure(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("q_ext_pure: c must be positive");
    return (std::sqrt(9.0 + c * c) - 3.0) / c;
}

double q_ext_linear(double c_eff) {
    if (!(c_eff > 0.0)) throw std::invalid_argument("q_ext_linear: c_eff must be positive");
    return 1.0 - kQExtLinearCoefficient / c_eff;
}

std::pair<double, double> default_q_window(const ModelKind& model) {
    validate(model);
    const double center = std::round(q_ext_linear(c_eff_of_spin(model.two_s)) * 10.0) / 10.0;
    return {center - 0.1, center + 0.1};
}

std::vector<double> default_q_grid(const ModelKind& model, int n_points) {
    if (n_points < 2) throw std::invalid_argument("default_q_grid: need at least 2 points");
    const auto [lo, hi] = default_q_window(model);
    std::vector<double> grid(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i)
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n_points - 1);
    return grid;
}

ScalingFit analyze_table(const EntropyTable& table, const ModelKind& model,
                         const AnalyzeOptions& opts, double trio_fraction) {
    validate(model);
    ScalingFit out;
    out.model_name = model.name();
    out.two_s = model.two_s;
    out.c_eff = c_eff_of_spin(model.two_s);
    out.q_ext_linear_pred = q_ext_linear(out.c_eff);
    out.trio_fraction = trio_fraction;

    const auto def = default_q_window(model);
    out.q_window.first = std::isnan(opts.q_window_min) ? def.first : opts.q_window_min;
    out.q_window.second = std::isnan(opts.q_window_max) ? def.second : opts.q_window_max;
    if (!(out.q_window.first < out.q_window.second))
        throw FitError("analyze_table: empty q window");

    // power-law exponent per q over the (optionally clipped) ladder
    for (std::size_t qi = 0; qi < table.q_values.size(); ++qi) {
        std::vector<ScalingPoint> pts;
        for (std::size_t li = 0; li < table.block_sizes.size(); ++li) {
            const double L = table.block_sizes[li];
            if (opts.fit_block_min > 0 && L < opts.fit_block_min) continue;
            if (opts.fit_block_max > 0 && L > opts.fit_block_max) continue;
            const auto& cell = table.at(qi, li);
            pts.push_back({L, cell.mean, cell.stderr_mean});
        }
        const PowerLawFit pf = fit_power_law(pts);
        out.gamma_points.push_back({table.q_values[qi], pf.gamma, pf.gamma_stderr});
    }

    std::vector<GammaPoint> window_points;
    for (const GammaPoint& p : out.gamma_points)
        if (p.q >= out.q_window.first && p.q <= out.q_window.second) window_points.push_back(p);
    if (window_points.size() < 5)
        throw FitError("analyze_table: fewer than 5 gamma points inside the q window");

    out.quadratic = fit_gamma_quadratic(window_points, opts.weighted_quadratic);

    std::vector<double> errs;
    for (const GammaPoint& p : window_points) errs.push_back(p.gamma_stderr);
    std::sort(errs.begin(), errs.end());
    if (opts.dgamma_policy == "median") {
        const std::size_t n = errs.size();
        out.dgamma = n % 2 == 1 ? errs[n / 2] : 0.5 * (errs[n / 2 - 1] + errs[n / 2]);
    } else if (opts.dgamma_policy == "max") {
        out.dgamma = errs.back();
    } else {
        throw FitError("analyze_table: unknown dgamma policy '" + opts.dgamma_policy + "'");
    }

    out.scan_interval = {out.q_window.first - opts.scan_pad, out.q_window.second + opts.scan_pad};
    const QExtSolution sol = solve_q_ext(out.quadratic, out.dgamma, out.scan_interval);
    out.q_ext = sol.q_ext;
    out.delta_q_ext = sol.delta_q_ext;
    return out;
}

double fit_inverse_ceff_slope(std::span<const SweepRow> rows) {
    if (rows.size() < 2)
        throw FitError("fit_inverse_ceff_slope: need at least 2 models");
    double num = 0.0, den = 0.0;
    for (const SweepRow& r : rows) {
        if (!(r.c_eff > 0.0)) throw FitError("fit_inverse_ceff_slope: c_eff must be positive");
        const double x = 1.0 / r.c_eff;
        num += (1.0 - r.q_ext) * x;
        den += x * x;
    }
    if (!(den > 0.0)) throw FitError("fit_inverse_ceff_slope: degenerate input");
    return num / den;
}

} // namespace rsq
