#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "ssc/estimator.hpp"
#include "ssc/panel.hpp"
#include "ssc/weights.hpp"

namespace ssc {

/// How the residual coefficients feeding each rolling pseudo-estimate are
/// chosen: the full-sample fit for every window, or a refit that leaves out
/// the half-window of observations the statistic is about to touch.
enum class EstimatorMode { PlugIn, LeaveHalfOut };

/// Divisor of the empirical null distribution. The first option divides the
/// indicator sum by the full pre-period count even though only T-S draws
/// exist, which makes the tail mass slightly conservative; the second
/// divides by the draw count.
enum class Normalization { Paper, Empirical };

const char* estimator_mode_name(EstimatorMode mode);
const char* normalization_name(Normalization norm);

/// Step distribution of the rolling statistics with its divisor convention.
struct EmpiricalDistribution {
    std::vector<double> sorted_draws;
    int divisor = 0;

    double cdf(double x) const;
};

struct TestResult {
    std::string hypothesis;
    double statistic = 0.0;
    double critical_value = 0.0;
    double alpha = 0.0;
    double p_value = 0.0;
    bool reject = false;
    EstimatorMode mode = EstimatorMode::PlugIn;
    Normalization normalization = Normalization::Paper;
    std::vector<double> draws;   // one per window, in window order
    std::vector<std::string> warnings;
};

/// Quadratic form (C tau - d)'(C tau - d).
double test_statistic(const TauEstimate& tau, const HypothesisSpec& hypothesis);

/// The rolling null draws: for each window of post-period length that fits in
/// the pre-period, the pseudo-estimate's quadratic form under C. Throws
/// WindowTooShort when not a single window fits.
std::vector<double> rolling_statistics(const Panel& panel, const EffectIndex& index,
                                       const WeightModel& model,
                                       const HypothesisSpec& hypothesis,
                                       EstimatorMode mode,
                                       double rcond_min = 1e-10,
                                       unsigned threads = 0);

/// Order-statistic critical value at level alpha. Throws InfeasibleLevel when
/// the requested quantile lies beyond the available draws (possible under the
/// conservative divisor); the message states the smallest feasible alpha.
std::pair<double, EmpiricalDistribution> critical_value(
    const std::vector<double>& draws, int pre_periods, double alpha,
    Normalization normalization);

/// Full test: statistic, null draws, critical value, p-value, decision.
TestResult run_test(const Panel& panel, const EffectIndex& index,
                    const WeightModel& model, const TauEstimate& tau,
                    const HypothesisSpec& hypothesis, double alpha,
                    EstimatorMode mode = EstimatorMode::PlugIn,
                    Normalization normalization = Normalization::Paper,
                    double rcond_min = 1e-10, unsigned threads = 0);

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int points = 401;
};

struct CiResult {
    double center = 0.0;       // the point estimate c'tau
    double lo = 0.0;
    double hi = 0.0;
    double alpha = 0.0;
    double critical_value = 0.0;
    bool contiguous = true;    // accepted grid points form one run
    bool truncated = false;    // acceptance reaches a grid endpoint
    int accepted = 0;
    GridSpec grid;
};

/// Grid centered on the point estimate, wide enough to contain the
/// acceptance region with generous slack.
GridSpec default_grid(double center, const std::vector<double>& draws,
                      double critical_value, int points = 401);

/// Confidence interval for a scalar functional c'tau by inverting the test
/// over a grid of candidate values. The rolling draws do not depend on the
/// candidate, so they are computed once. Throws GridError when no grid point
/// is accepted (the message reports where the acceptance region lies).
CiResult invert_test(const Panel& panel, const EffectIndex& index,
                     const WeightModel& model, const TauEstimate& tau,
                     const Eigen::RowVectorXd& c_row, double alpha,
                     const GridSpec& grid,
                     EstimatorMode mode = EstimatorMode::PlugIn,
                     Normalization normalization = Normalization::Paper,
                     double rcond_min = 1e-10, unsigned threads = 0);

}  // namespace ssc
