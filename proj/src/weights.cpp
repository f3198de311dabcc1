#include "ssc/weights.hpp"

#include <numeric>

#include "ssc/errors.hpp"
#include "ssc/simplex_lsq.hpp"
#include "ssc/util.hpp"

namespace ssc {

UnitWeights fit_unit_weights_cols(const Eigen::MatrixXd& outcomes,
                                  const std::vector<int>& cols, int unit,
                                  double tol) {
    const int n = static_cast<int>(outcomes.rows());
    const int t = static_cast<int>(cols.size());
    if (n < 2) {
        fail(ErrorCode::DimensionMismatch,
             "weight fitting needs at least two units");
    }
    if (t < 1) {
        fail(ErrorCode::DimensionMismatch,
             "weight fitting needs at least one fitting period");
    }

    // Donor matrix: one column per other unit, restricted to the fitting
    // periods. The intercept is concentrated out by demeaning both sides.
    Eigen::MatrixXd donors(t, n - 1);
    Eigen::VectorXd target(t);
    std::vector<int> donor_ids;
    donor_ids.reserve(n - 1);
    for (int j = 0; j < n; ++j) {
        if (j == unit) continue;
        donor_ids.push_back(j);
    }
    for (int r = 0; r < t; ++r) {
        target(r) = outcomes(unit, cols[r]);
        for (int k = 0; k < n - 1; ++k) {
            donors(r, k) = outcomes(donor_ids[k], cols[r]);
        }
    }
    Eigen::RowVectorXd donor_means = donors.colwise().mean();
    double target_mean = target.mean();
    Eigen::MatrixXd donors_centered = donors.rowwise() - donor_means;
    Eigen::VectorXd target_centered = target.array() - target_mean;

    SimplexLsqOptions options;
    options.tol = tol;
    SimplexLsqResult sol = simplex_lsq(donors_centered, target_centered, options);

    UnitWeights result;
    result.unit = unit;
    result.weights = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n - 1; ++k) result.weights(donor_ids[k]) = sol.weights(k);
    result.intercept = target_mean - donor_means.dot(sol.weights);
    // Recompute the objective on the raw data so it reflects the reported
    // intercept exactly.
    Eigen::VectorXd fitted =
        donors * sol.weights + Eigen::VectorXd::Constant(t, result.intercept);
    result.objective = (target - fitted).squaredNorm();
    result.kkt_gap = sol.kkt_gap;
    result.iterations = sol.iterations;
    result.converged = sol.converged;
    result.non_unique = sol.non_unique;
    return result;
}

UnitWeights fit_unit_weights(const Panel& panel, int unit, double tol) {
    std::vector<int> cols(panel.pre_periods);
    std::iota(cols.begin(), cols.end(), 0);
    return fit_unit_weights_cols(panel.outcomes, cols, unit, tol);
}

WeightModel fit_all_cols(const Eigen::MatrixXd& outcomes,
                         const std::vector<int>& cols,
                         const FitOptions& options) {
    const int n = static_cast<int>(outcomes.rows());
    WeightModel model;
    model.units.resize(n);
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t i) {
            model.units[i] = fit_unit_weights_cols(outcomes, cols,
                                                   static_cast<int>(i), options.tol);
        },
        options.threads);

    model.intercepts.resize(n);
    model.B.resize(n, n);
    for (int i = 0; i < n; ++i) {
        model.intercepts(i) = model.units[i].intercept;
        model.B.row(i) = model.units[i].weights.transpose();
    }
    Eigen::MatrixXd residual_maker = Eigen::MatrixXd::Identity(n, n) - model.B;
    model.M = residual_maker.transpose() * residual_maker;
    return model;
}

WeightModel fit_all(const Panel& panel, const FitOptions& options) {
    std::vector<int> cols(panel.pre_periods);
    std::iota(cols.begin(), cols.end(), 0);
    return fit_all_cols(panel.outcomes, cols, options);
}

double pooled_residual_sd(const WeightModel& model, int n_cols) {
    KahanSum total;
    for (const auto& u : model.units) total.add(u.objective);
    double count = static_cast<double>(model.units.size()) * n_cols;
    return count > 0 ? std::sqrt(total.value() / count) : 0.0;
}

}  // namespace ssc
