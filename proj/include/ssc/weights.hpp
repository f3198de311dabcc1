#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssc/panel.hpp"

namespace ssc {

/// Synthetic control weights for one unit: intercept plus a convex
/// combination of the other units, fitted on pre-treatment outcomes.
struct UnitWeights {
    int unit = 0;
    double intercept = 0.0;
    Eigen::VectorXd weights;   // length n_units, zero at `unit`
    double objective = 0.0;    // pre-period sum of squared residuals
    double kkt_gap = 0.0;
    int iterations = 0;
    bool converged = false;
    bool non_unique = false;
};

/// The fitted weight system for a panel: intercept vector, weight matrix B
/// (rows sum to one, zero diagonal), and the quadratic form M = (I-B)'(I-B)
/// that the joint effect estimator is built on.
struct WeightModel {
    Eigen::VectorXd intercepts;       // n_units
    Eigen::MatrixXd B;                // n_units x n_units
    Eigen::MatrixXd M;                // (I-B)'(I-B)
    std::vector<UnitWeights> units;
};

struct FitOptions {
    double tol = 1e-10;    // stationarity tolerance, scaled by the row count
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// Fits one unit on the given outcome columns (the caller picks which
/// periods count as "pre"). The intercept is concentrated out in closed form
/// and the simplex program is solved on demeaned columns.
UnitWeights fit_unit_weights_cols(const Eigen::MatrixXd& outcomes,
                                  const std::vector<int>& cols, int unit,
                                  double tol = 1e-10);

/// Fits one unit on the panel's pre-treatment block.
UnitWeights fit_unit_weights(const Panel& panel, int unit, double tol = 1e-10);

/// Fits every unit on the given columns and assembles the weight model.
/// Units are fitted in parallel; results do not depend on the schedule.
WeightModel fit_all_cols(const Eigen::MatrixXd& outcomes,
                         const std::vector<int>& cols,
                         const FitOptions& options = {});

/// Fits every unit on the panel's pre-treatment block.
WeightModel fit_all(const Panel& panel, const FitOptions& options = {});

/// Pooled residual standard deviation of the pre-period fits:
/// sqrt(total objective / (n_units * n_cols)).
double pooled_residual_sd(const WeightModel& model, int n_cols);

}  // namespace ssc
