#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssc/panel.hpp"
#include "ssc/weights.hpp"

namespace ssc {

/// Joint estimate of all treated-cell effects, in effect-index order.
struct TauEstimate {
    Eigen::VectorXd tau_hat;
    EffectIndex index;
    Eigen::MatrixXd gram;     // sum_s A_s' M A_s, the normal-equations matrix
    double gram_rcond = 0.0;  // smallest/largest eigenvalue of gram
};

/// Event-study aggregation: average effect per event time.
struct AttPath {
    std::vector<int> horizons;
    std::vector<int> counts;
    Eigen::VectorXd estimates;
};

/// Normal-equations matrix of the joint effect estimator:
/// entry (k, l) is M(unit_k, unit_l) when cells k and l share a period, else 0.
Eigen::MatrixXd effect_gram(const EffectIndex& index, const Eigen::MatrixXd& M);

/// Reciprocal condition number of the gram; throws NotInvertible when it
/// falls below rcond_min. The failure message explains the structural cause
/// when one is visible (a period in which every unit is treated leaves no
/// donor and always produces a singular gram).
double check_invertibility(const EffectIndex& index, const Eigen::MatrixXd& M,
                           double rcond_min = 1e-10);

/// Shared engine for the effect estimate and the rolling pseudo-estimates:
/// factors the gram once, then maps any window of outcome columns to the
/// estimated effect vector. The residual coefficients (a, B) may differ from
/// the model that built the gram, which is how leave-out inference re-enters
/// without refactoring.
class EffectSolver {
public:
    /// Throws NotInvertible if the gram's rcond is below rcond_min.
    EffectSolver(const EffectIndex& index, const WeightModel& model,
                 double rcond_min = 1e-10);

    /// Effect estimate with the window's first period at column
    /// `window_start`: cell k at event time s reads column window_start+s-1.
    /// Residuals are formed with (a, B).
    Eigen::VectorXd solve(const Eigen::MatrixXd& outcomes, int window_start,
                          const Eigen::VectorXd& a, const Eigen::MatrixXd& B) const;

    /// Same, with the model's own coefficients.
    Eigen::VectorXd solve(const Eigen::MatrixXd& outcomes, int window_start) const;

    const Eigen::MatrixXd& gram() const { return gram_; }
    double rcond() const { return rcond_; }

private:
    const EffectIndex& index_;
    Eigen::MatrixXd projector_;  // (I - B)', from the gram's weight model
    Eigen::VectorXd intercepts_;
    Eigen::MatrixXd weights_;
    Eigen::MatrixXd gram_;
    Eigen::LDLT<Eigen::MatrixXd> factor_;
    double rcond_ = 0.0;
};

/// Closed-form joint estimator of every treated cell's effect.
TauEstimate estimate_tau(const Panel& panel, const EffectIndex& index,
                         const WeightModel& model, double rcond_min = 1e-10);

/// Linear functionals of the estimated effects.
Eigen::VectorXd estimate_gamma(const TauEstimate& tau, const ParamSpec& spec);

/// Average effect at each populated event time.
AttPath att_path(const TauEstimate& tau);

}  // namespace ssc
