#include "ssc/estimator.hpp"

#include <sstream>

#include "ssc/errors.hpp"

namespace ssc {

Eigen::MatrixXd effect_gram(const EffectIndex& index, const Eigen::MatrixXd& M) {
    const int k = index.size();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            if (index.cells[a].period == index.cells[b].period) {
                gram(a, b) = M(index.cells[a].unit, index.cells[b].unit);
            }
        }
    }
    return gram;
}

namespace {

double gram_rcond(const Eigen::MatrixXd& gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    double hi = eig.eigenvalues().maxCoeff();
    double lo = eig.eigenvalues().minCoeff();
    if (hi <= 0.0) return 0.0;
    return std::max(lo, 0.0) / hi;
}

// A period in which every unit is treated makes the gram singular no matter
// what the weights are: each weight row sums to one, so (I - B) annihilates
// the all-ones direction that such a period contributes.
int fully_treated_period(const EffectIndex& index) {
    for (int s = 1; s <= index.post_periods; ++s) {
        int column = index.pre_periods + s - 1;
        int treated_here = 0;
        for (const auto& cell : index.cells) {
            if (cell.period == column) ++treated_here;
        }
        if (treated_here == index.n_units) return s;
    }
    return 0;
}

}  // namespace

double check_invertibility(const EffectIndex& index, const Eigen::MatrixXd& M,
                           double rcond_min) {
    if (index.size() == 0) {
        fail(ErrorCode::NotInvertible, "no treated cells to estimate");
    }
    double rc = gram_rcond(effect_gram(index, M));
    if (rc < rcond_min) {
        std::ostringstream msg;
        msg << "effect gram matrix is numerically singular (rcond "
            << rc << " < " << rcond_min << ")";
        if (int s = fully_treated_period(index); s > 0) {
            msg << "; every unit is treated at event window period " << s
                << ", so no donors remain there";
        }
        fail(ErrorCode::NotInvertible, msg.str());
    }
    return rc;
}

EffectSolver::EffectSolver(const EffectIndex& index, const WeightModel& model,
                           double rcond_min)
    : index_(index),
      intercepts_(model.intercepts),
      weights_(model.B) {
    const int n = static_cast<int>(model.B.rows());
    projector_ =
        (Eigen::MatrixXd::Identity(n, n) - model.B).transpose();
    rcond_ = check_invertibility(index, model.M, rcond_min);
    gram_ = effect_gram(index, model.M);
    factor_.compute(gram_);
    if (factor_.info() != Eigen::Success) {
        fail(ErrorCode::NotInvertible, "effect gram matrix could not be factored");
    }
}

Eigen::VectorXd EffectSolver::solve(const Eigen::MatrixXd& outcomes,
                                    int window_start, const Eigen::VectorXd& a,
                                    const Eigen::MatrixXd& B) const {
    const int k = index_.size();
    Eigen::VectorXd rhs(k);
    // Each cell's component comes from its own calendar column (shifted into
    // the evaluation window), matching the period grouping of the gram; under
    // staggered adoption a cell's event time and its column offset differ.
    for (int p = 0; p < index_.post_periods; ++p) {
        const int cell_period = index_.pre_periods + p;
        bool any = false;
        for (int j = 0; j < k && !any; ++j) {
            any = index_.cells[j].period == cell_period;
        }
        if (!any) continue;
        int column = window_start + p;
        Eigen::VectorXd y = outcomes.col(column);
        Eigen::VectorXd residual = y - a - B * y;
        Eigen::VectorXd pushed = projector_ * residual;
        for (int j = 0; j < k; ++j) {
            if (index_.cells[j].period == cell_period) {
                rhs(j) = pushed(index_.cells[j].unit);
            }
        }
    }
    return factor_.solve(rhs);
}

Eigen::VectorXd EffectSolver::solve(const Eigen::MatrixXd& outcomes,
                                    int window_start) const {
    return solve(outcomes, window_start, intercepts_, weights_);
}

TauEstimate estimate_tau(const Panel& panel, const EffectIndex& index,
                         const WeightModel& model, double rcond_min) {
    EffectSolver solver(index, model, rcond_min);
    TauEstimate tau;
    tau.tau_hat = solver.solve(panel.outcomes, panel.pre_periods);
    tau.index = index;
    tau.gram = solver.gram();
    tau.gram_rcond = solver.rcond();
    return tau;
}

Eigen::VectorXd estimate_gamma(const TauEstimate& tau, const ParamSpec& spec) {
    if (spec.rows.cols() != tau.tau_hat.size()) {
        std::ostringstream msg;
        msg << "parameter matrix has " << spec.rows.cols()
            << " columns but there are " << tau.tau_hat.size() << " effects";
        fail(ErrorCode::DimensionMismatch, msg.str());
    }
    return spec.rows * tau.tau_hat;
}

AttPath att_path(const TauEstimate& tau) {
    AttPath path;
    std::vector<double> values;
    for (int s = 1; s <= tau.index.post_periods; ++s) {
        int n_s = event_count(tau.index, s);
        if (n_s == 0) continue;
        Eigen::VectorXd weights = att_weights(tau.index, s);
        path.horizons.push_back(s);
        path.counts.push_back(n_s);
        values.push_back(weights.dot(tau.tau_hat));
    }
    path.estimates = Eigen::Map<Eigen::VectorXd>(values.data(),
                                                 static_cast<int>(values.size()));
    return path;
}

}  // namespace ssc
