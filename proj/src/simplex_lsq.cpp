#include "ssc/simplex_lsq.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ssc/errors.hpp"

namespace ssc {

namespace {

// Equality-constrained minimizer of v'Qv - 2c'v with sum(v) = 1 over the
// coordinates in `active`: bordered KKT solve. Falls back to the minimum-norm
// solution when the system is singular (the system is always consistent,
// because the linear term lives in the row space of X).
Eigen::VectorXd face_minimizer(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c,
                               const std::vector<int>& active) {
    const int p = static_cast<int>(active.size());
    Eigen::MatrixXd kkt(p + 1, p + 1);
    Eigen::VectorXd rhs(p + 1);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) kkt(i, j) = 2.0 * Q(active[i], active[j]);
        kkt(i, p) = 1.0;
        kkt(p, i) = 1.0;
        rhs(i) = 2.0 * c(active[i]);
    }
    kkt(p, p) = 0.0;
    rhs(p) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    Eigen::VectorXd sol;
    if (lu.isInvertible()) {
        sol = lu.solve(rhs);
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
        sol = cod.solve(rhs);
    }
    return sol.head(p);
}

void insert_sorted(std::vector<int>& active, int j) {
    auto it = std::lower_bound(active.begin(), active.end(), j);
    if (it == active.end() || *it != j) active.insert(it, j);
}

// Optimizes w exactly over the face spanned by `active`, keeping w feasible
// throughout. Classic active-set inner loop: solve the equality-constrained
// problem, and while the solution leaves the non-negative orthant, step to
// the nearest blocking constraint and drop the blocked coordinate.
void solve_face(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c,
                std::vector<int>& active, Eigen::VectorXd& w) {
    const int m = static_cast<int>(w.size());
    for (int pass = 0; pass <= m + 1 && active.size() > 1; ++pass) {
        Eigen::VectorXd v = face_minimizer(Q, c, active);
        if (v.minCoeff() >= -1e-12) {
            w.setZero();
            for (std::size_t i = 0; i < active.size(); ++i) {
                w(active[i]) = std::max(v(static_cast<int>(i)), 0.0);
            }
            w /= w.sum();
            break;
        }
        // Largest feasible step from w toward v.
        double alpha = 1.0;
        for (std::size_t i = 0; i < active.size(); ++i) {
            double vi = v(static_cast<int>(i));
            if (vi < 0.0) {
                double wi = w(active[i]);
                double bound = wi / (wi - vi);
                alpha = std::min(alpha, bound);
            }
        }
        if (alpha <= 1e-15) {
            // Blocked at the boundary: drop the offending zero coordinates
            // and re-solve on the smaller face.
            std::vector<int> kept;
            for (std::size_t i = 0; i < active.size(); ++i) {
                if (w(active[i]) <= 1e-15 && v(static_cast<int>(i)) < 0.0) {
                    w(active[i]) = 0.0;
                } else {
                    kept.push_back(active[i]);
                }
            }
            active = std::move(kept);
            continue;
        }
        for (std::size_t i = 0; i < active.size(); ++i) {
            double stepped = (1.0 - alpha) * w(active[i]) + alpha * v(static_cast<int>(i));
            w(active[i]) = std::max(stepped, 0.0);
        }
        w /= w.sum();
        std::vector<int> kept;
        for (int j : active) {
            if (w(j) > 1e-14) {
                kept.push_back(j);
            } else {
                w(j) = 0.0;
            }
        }
        active = std::move(kept);
    }
    if (active.size() == 1) {
        w.setZero();
        w(active[0]) = 1.0;
    }
}

// Non-uniqueness check at the solution: collect the coordinates whose
// gradient ties the minimum (the face the optimum is free to move on) and
// test the reduced Hessian there for singularity.
bool assess_uniqueness(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c,
                       const Eigen::VectorXd& w) {
    Eigen::VectorXd g = 2.0 * (Q * w - c);
    double gmin = g.minCoeff();
    double tie_tol = 1e-8 * (1.0 + g.cwiseAbs().maxCoeff());
    std::vector<int> face;
    for (int j = 0; j < g.size(); ++j) {
        if (g(j) <= gmin + tie_tol) face.push_back(j);
    }
    const int f = static_cast<int>(face.size());
    if (f < 2) return false;

    Eigen::MatrixXd h(f, f);
    for (int i = 0; i < f; ++i) {
        for (int j = 0; j < f; ++j) h(i, j) = Q(face[i], face[j]);
    }
    // Reduced Hessian on the sum-zero subspace of the face.
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(f, 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
    Eigen::MatrixXd full = qr.householderQ();
    Eigen::MatrixXd basis = full.rightCols(f - 1);
    Eigen::MatrixXd reduced = basis.transpose() * h * basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
    double lo = eig.eigenvalues().minCoeff();
    double hi = eig.eigenvalues().maxCoeff();
    return lo <= 1e-10 * std::max(1.0, hi);
}

}  // namespace

SimplexLsqResult simplex_lsq(const Eigen::MatrixXd& X, const Eigen::VectorXd& z,
                             const SimplexLsqOptions& options) {
    const int m = static_cast<int>(X.cols());
    const int rows = static_cast<int>(X.rows());
    if (m < 1) {
        fail(ErrorCode::DimensionMismatch, "simplex_lsq needs at least one column");
    }
    if (z.size() != rows) {
        fail(ErrorCode::DimensionMismatch, "simplex_lsq: X and z row counts differ");
    }

    SimplexLsqResult result;
    if (m == 1) {
        result.weights = Eigen::VectorXd::Ones(1);
        result.objective = (X.col(0) - z).squaredNorm();
        result.kkt_gap = 0.0;
        result.converged = true;
        result.non_unique = false;
        return result;
    }

    const Eigen::MatrixXd Q = X.transpose() * X;
    const Eigen::VectorXd c = X.transpose() * z;
    const double gap_tol = options.tol * std::max(1, rows);
    const int max_iter = options.max_iter > 0 ? options.max_iter : 10000 * m;

    // Start at the best vertex (lowest index on ties).
    int j0 = 0;
    double best = Q(0, 0) - 2.0 * c(0);
    for (int j = 1; j < m; ++j) {
        double value = Q(j, j) - 2.0 * c(j);
        if (value < best) {
            best = value;
            j0 = j;
        }
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    w(j0) = 1.0;
    std::vector<int> active = {j0};
    double phi = (X * w - z).squaredNorm();

    int iter = 0;
    bool converged = false;
    for (; iter < max_iter; ++iter) {
        Eigen::VectorXd g = 2.0 * (Q * w - c);
        int jmin = 0;
        for (int j = 1; j < m; ++j) {
            if (g(j) < g(jmin)) jmin = j;
        }
        double gap = g.dot(w) - g(jmin);
        if (gap <= gap_tol) {
            converged = true;
            break;
        }

        insert_sorted(active, jmin);
        double prev_phi = phi;
        Eigen::VectorXd prev_w = w;
        std::vector<int> prev_active = active;
        solve_face(Q, c, active, w);
        phi = (X * w - z).squaredNorm();
        if (phi > prev_phi + 1e-12 * (1.0 + prev_phi)) {
            w = prev_w;
            active = prev_active;
            phi = prev_phi;
        }

        if (prev_phi - phi <= 1e-12 * (1.0 + std::abs(prev_phi))) {
            // Corrective step stalled; take a plain Frank-Wolfe step toward
            // the steepest vertex so progress (or a certified gap) is still
            // guaranteed.
            Eigen::VectorXd d = -w;
            d(jmin) += 1.0;
            double curve = d.dot(Q * d);
            double t = curve > 0.0 ? std::min(1.0, gap / (2.0 * curve)) : 1.0;
            if (t <= 1e-18) break;
            w += t * d;
            w = w.cwiseMax(0.0);
            w /= w.sum();
            double stepped_phi = (X * w - z).squaredNorm();
            if (stepped_phi >= phi - 1e-15 * (1.0 + phi)) {
                w = prev_w;
                active = prev_active;
                phi = prev_phi;
                break;
            }
            phi = stepped_phi;
            active.clear();
            for (int j = 0; j < m; ++j) {
                if (w(j) > 0.0) active.push_back(j);
            }
        }
    }

    Eigen::VectorXd g = 2.0 * (Q * w - c);
    double final_gap = g.dot(w) - g.minCoeff();

    result.weights = w;
    result.objective = (X * w - z).squaredNorm();
    result.kkt_gap = std::max(final_gap, 0.0);
    result.iterations = iter;
    result.converged = converged || result.kkt_gap <= gap_tol;
    result.non_unique = assess_uniqueness(Q, c, w);
    return result;
}

}  // namespace ssc
