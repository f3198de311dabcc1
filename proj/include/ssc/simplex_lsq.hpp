#pragma once

#include <Eigen/Dense>

namespace ssc {

struct SimplexLsqOptions {
    /// Stationarity tolerance: the solver stops once the duality gap of the
    /// simplex program falls below tol * n_rows.
    double tol = 1e-10;
    /// Iteration cap (outer iterations); 0 picks 10000 * n_cols.
    int max_iter = 0;
};

struct SimplexLsqResult {
    Eigen::VectorXd weights;   // on the unit simplex
    double objective = 0.0;    // ||X w - z||^2 at the solution
    double kkt_gap = 0.0;      // final duality gap (see converged)
    int iterations = 0;
    bool converged = false;
    /// True when the optimum may not be unique: some face of gradient-tied
    /// coordinates carries a singular reduced Hessian. Conservative; exact
    /// duplicate columns among the active coordinates always trip it.
    bool non_unique = false;
};

/// Minimizes ||X w - z||^2 over {w >= 0, sum w = 1}.
///
/// Fully corrective Frank-Wolfe: each outer iteration adds the steepest
/// coordinate to the active set and re-optimizes exactly over the spanned
/// face (equality-constrained KKT solve with non-negativity handled by
/// active-set clipping). Deterministic: ties in coordinate selection go to
/// the lowest index, and no randomness is involved anywhere.
SimplexLsqResult simplex_lsq(const Eigen::MatrixXd& X, const Eigen::VectorXd& z,
                             const SimplexLsqOptions& options = {});

}  // namespace ssc
