#include "ssc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ssc/errors.hpp"
#include "ssc/util.hpp"

namespace ssc {

const char* estimator_mode_name(EstimatorMode mode) {
    return mode == EstimatorMode::PlugIn ? "plugin" : "leave_half_out";
}

const char* normalization_name(Normalization norm) {
    return norm == Normalization::Paper ? "paper" : "empirical";
}

double EmpiricalDistribution::cdf(double x) const {
    auto it = std::upper_bound(sorted_draws.begin(), sorted_draws.end(), x);
    return static_cast<double>(it - sorted_draws.begin()) / divisor;
}

double test_statistic(const TauEstimate& tau, const HypothesisSpec& hypothesis) {
    if (hypothesis.C.cols() != tau.tau_hat.size() ||
        hypothesis.C.rows() != hypothesis.d.size()) {
        std::ostringstream msg;
        msg << "hypothesis dimensions (" << hypothesis.C.rows() << "x"
            << hypothesis.C.cols() << ", d of length " << hypothesis.d.size()
            << ") do not match " << tau.tau_hat.size() << " effects";
        fail(ErrorCode::DimensionMismatch, msg.str());
    }
    return (hypothesis.C * tau.tau_hat - hypothesis.d).squaredNorm();
}

std::vector<double> rolling_statistics(const Panel& panel, const EffectIndex& index,
                                       const WeightModel& model,
                                       const HypothesisSpec& hypothesis,
                                       EstimatorMode mode, double rcond_min,
                                       unsigned threads) {
    if (hypothesis.C.cols() != index.size()) {
        fail(ErrorCode::DimensionMismatch,
             "hypothesis matrix does not match the number of effects");
    }
    const int t_pre = panel.pre_periods;
    const int s_post = panel.post_periods;
    const int windows = t_pre - s_post;
    if (windows < 1) {
        std::ostringstream msg;
        msg << "pre-period has " << t_pre << " periods; rolling inference needs at "
            << "least " << s_post + 1 << " (post-period length plus one)";
        fail(ErrorCode::WindowTooShort, msg.str());
    }

    EffectSolver solver(index, model, rcond_min);
    std::vector<double> draws(static_cast<std::size_t>(windows), 0.0);

    // Window t (1-based) reads columns t .. t+S-1, i.e. periods t+1 .. t+S.
    if (mode == EstimatorMode::PlugIn) {
        parallel_for(
            static_cast<std::size_t>(windows),
            [&](std::size_t i) {
                int t = static_cast<int>(i) + 1;
                Eigen::VectorXd v = solver.solve(panel.outcomes, t);
                draws[i] = (hypothesis.C * v).squaredNorm();
            },
            threads);
        return draws;
    }

    // Leave-half-out: the residual coefficients for window t are refitted
    // without the first half of the window's own columns, which weakens the
    // dependence between the pseudo-estimate and the coefficients it is
    // evaluated with. The gram and its projector stay at the full-sample fit.
    const int drop = (s_post + 1) / 2;
    parallel_for(
        static_cast<std::size_t>(windows),
        [&](std::size_t i) {
            int t = static_cast<int>(i) + 1;
            std::vector<int> cols;
            cols.reserve(t_pre - drop);
            for (int c = 0; c < t_pre; ++c) {
                if (c >= t && c < t + drop) continue;
                cols.push_back(c);
            }
            FitOptions refit_options;
            refit_options.threads = 1;
            WeightModel refit = fit_all_cols(panel.outcomes, cols, refit_options);
            Eigen::VectorXd v =
                solver.solve(panel.outcomes, t, refit.intercepts, refit.B);
            draws[i] = (hypothesis.C * v).squaredNorm();
        },
        threads);
    return draws;
}

std::pair<double, EmpiricalDistribution> critical_value(
    const std::vector<double>& draws, int pre_periods, double alpha,
    Normalization normalization) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        fail(ErrorCode::InvalidInput, "alpha must lie strictly between 0 and 1");
    }
    if (draws.empty()) {
        fail(ErrorCode::WindowTooShort, "no rolling draws to form a critical value");
    }
    const int n = static_cast<int>(draws.size());
    const int divisor =
        normalization == Normalization::Paper ? pre_periods : n;

    // Order statistic: the smallest k with k/divisor >= 1-alpha. The epsilon
    // guards against 1-alpha*divisor landing a hair above an exact integer.
    int k = static_cast<int>(std::ceil((1.0 - alpha) * divisor - 1e-9));
    k = std::max(k, 1);
    if (k > n) {
        double feasible = 1.0 - static_cast<double>(n) / divisor;
        std::ostringstream msg;
        msg << "level " << alpha << " needs order statistic " << k << " of " << n
            << " draws; the smallest feasible level under this normalization is "
            << feasible;
        fail(ErrorCode::InfeasibleLevel, msg.str());
    }

    EmpiricalDistribution dist;
    dist.sorted_draws = draws;
    std::sort(dist.sorted_draws.begin(), dist.sorted_draws.end());
    dist.divisor = divisor;
    return {dist.sorted_draws[k - 1], dist};
}

TestResult run_test(const Panel& panel, const EffectIndex& index,
                    const WeightModel& model, const TauEstimate& tau,
                    const HypothesisSpec& hypothesis, double alpha,
                    EstimatorMode mode, Normalization normalization,
                    double rcond_min, unsigned threads) {
    TestResult result;
    result.hypothesis = hypothesis.label;
    result.alpha = alpha;
    result.mode = mode;
    result.normalization = normalization;
    result.statistic = test_statistic(tau, hypothesis);
    result.draws = rolling_statistics(panel, index, model, hypothesis, mode,
                                      rcond_min, threads);
    auto [q, dist] =
        critical_value(result.draws, panel.pre_periods, alpha, normalization);
    result.critical_value = q;
    result.p_value = 1.0 - dist.cdf(result.statistic);
    result.reject = result.statistic > q;
    if (static_cast<int>(result.draws.size()) < 30) {
        std::ostringstream warning;
        warning << "only " << result.draws.size()
                << " rolling draws; the null distribution is coarse";
        result.warnings.push_back(warning.str());
    }
    return result;
}

GridSpec default_grid(double center, const std::vector<double>& draws,
                      double critical_value, int points) {
    std::vector<double> roots(draws.size());
    std::transform(draws.begin(), draws.end(), roots.begin(),
                   [](double x) { return std::sqrt(std::max(x, 0.0)); });
    std::sort(roots.begin(), roots.end());
    double iqr = 0.0;
    if (!roots.empty()) {
        std::size_t n = roots.size();
        double q25 = roots[(n - 1) / 4];
        double q75 = roots[(3 * (n - 1)) / 4];
        iqr = q75 - q25;
    }
    double half = std::max({10.0 * iqr, 10.0 * std::sqrt(std::max(critical_value, 0.0)),
                            1e-8 * (1.0 + std::abs(center))});
    GridSpec grid;
    grid.lo = center - half;
    grid.hi = center + half;
    grid.points = points;
    return grid;
}

CiResult invert_test(const Panel& panel, const EffectIndex& index,
                     const WeightModel& model, const TauEstimate& tau,
                     const Eigen::RowVectorXd& c_row, double alpha,
                     const GridSpec& grid, EstimatorMode mode,
                     Normalization normalization, double rcond_min,
                     unsigned threads) {
    if (c_row.size() != tau.tau_hat.size()) {
        fail(ErrorCode::DimensionMismatch,
             "contrast row does not match the number of effects");
    }
    if (!(grid.hi >= grid.lo) || grid.points < 2 || !std::isfinite(grid.lo) ||
        !std::isfinite(grid.hi)) {
        fail(ErrorCode::GridError, "invalid inversion grid");
    }

    // The rolling draws involve the contrast but not the hypothesized value,
    // so the whole grid shares one set of draws and one critical value.
    HypothesisSpec rolling_spec;
    rolling_spec.C = c_row;
    rolling_spec.d = Eigen::VectorXd::Zero(1);
    std::vector<double> draws = rolling_statistics(panel, index, model,
                                                   rolling_spec, mode, rcond_min,
                                                   threads);
    auto [q, dist] = critical_value(draws, panel.pre_periods, alpha, normalization);
    (void)dist;

    const double center = c_row.dot(tau.tau_hat);
    const double step = (grid.hi - grid.lo) / (grid.points - 1);

    // Materialize the grid, snapping the point nearest the estimate onto it
    // exactly. Rounding in lo + step*g would otherwise make the estimate
    // itself rejectable when the critical value is zero (degenerate fits),
    // and the snap moves that one point by at most half a step.
    std::vector<double> candidates(static_cast<std::size_t>(grid.points));
    int nearest = -1;
    double nearest_gap = std::numeric_limits<double>::infinity();
    for (int g = 0; g < grid.points; ++g) {
        double candidate = grid.lo + step * g;
        candidates[static_cast<std::size_t>(g)] = candidate;
        double gap = std::abs(candidate - center);
        if (gap < nearest_gap) {
            nearest_gap = gap;
            nearest = g;
        }
    }
    if (nearest >= 0 && nearest_gap <= 0.5 * step) {
        candidates[static_cast<std::size_t>(nearest)] = center;
    }

    int first = -1;
    int last = -1;
    int accepted = 0;
    bool contiguous = true;
    for (int g = 0; g < grid.points; ++g) {
        double gap = center - candidates[static_cast<std::size_t>(g)];
        bool accept = gap * gap <= q;
        if (accept) {
            if (first < 0) first = g;
            if (last >= 0 && g > last + 1) contiguous = false;
            last = g;
            ++accepted;
        }
    }
    if (accepted == 0) {
        std::ostringstream msg;
        msg << "no grid point accepted: the acceptance region is ["
            << center - std::sqrt(q) << ", " << center + std::sqrt(q)
            << "] but the grid covers [" << grid.lo << ", " << grid.hi << "]";
        fail(ErrorCode::GridError, msg.str());
    }

    CiResult ci;
    ci.center = center;
    ci.lo = candidates[static_cast<std::size_t>(first)];
    ci.hi = candidates[static_cast<std::size_t>(last)];
    ci.alpha = alpha;
    ci.critical_value = q;
    ci.contiguous = contiguous;
    ci.truncated = (first == 0) || (last == grid.points - 1);
    ci.accepted = accepted;
    ci.grid = grid;
    return ci;
}

}  // namespace ssc
