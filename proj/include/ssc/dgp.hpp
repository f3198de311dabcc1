#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "ssc/panel.hpp"

namespace ssc {

/// Factor-model design for untreated outcomes: y = loadings * factors +
/// noise. Stationary factors are AR(1) processes started from their
/// stationary law; random-walk factors start at zero. When random-walk
/// factors are present, generated loadings follow the cointegrated design:
/// the walk loadings of every unit are an exact convex combination of the
/// other units' (anchor units come in duplicated pairs to make that possible
/// at the extremes), while stationary loadings stay uniform on [0, 1].
struct FactorDGP {
    int n_units = 6;
    int pre_periods = 200;
    int post_periods = 4;
    std::vector<double> ar_coeffs = {0.5, 0.8};      // stationary factors
    std::vector<double> stationary_sd = {1.0, 1.0};  // innovation scale, one each
    int n_random_walk = 0;
    std::vector<double> walk_sd;                     // one per walk factor
    double noise_sd = 0.5;
    /// Optional fixed loadings (n_units x n_factors). Left empty, gen_panel
    /// draws them from the seed's loading stream; a study that must hold
    /// loadings fixed across replications draws them once via gen_loadings.
    Eigen::MatrixXd loadings;

    int n_stationary() const { return static_cast<int>(ar_coeffs.size()); }
    int n_factors() const { return n_stationary() + n_random_walk; }
    bool cointegrated() const { return n_random_walk > 0; }
    int n_periods() const { return pre_periods + post_periods; }
};

/// When and how strongly each unit is treated. Adoption uses 1-based period
/// indices; 0 means never treated. Effects are a function of the unit and
/// its event time.
struct TreatmentPlan {
    enum class EffectKind { Linear, Constant, Table };

    std::vector<int> adoption;
    EffectKind kind = EffectKind::Linear;
    double delta = 1.0;  // slope (Linear) or level (Constant)
    std::map<std::pair<int, int>, double> table;  // (unit, event time) -> effect

    double effect(int unit, int horizon) const;
};

/// Certificate that a unit's walk loadings are reproduced by a simplex
/// combination of the other units', i.e. (weights - e_unit) is a
/// cointegrating vector of the untreated outcome process.
struct CointegrationWitness {
    int unit = 0;
    Eigen::VectorXd weights;  // length n_units, zero at `unit`
};

struct GeneratedPanel {
    Panel panel;
    EffectIndex index;
    Eigen::VectorXd true_tau;      // per cell, in index order
    Eigen::MatrixXd loadings;      // the loadings actually used
    std::vector<CointegrationWitness> witnesses;  // cointegrated designs only
};

/// Throws InvalidDGP on inconsistent dimensions, explosive AR coefficients,
/// negative scales, or a cointegrated design with too few units for the
/// duplicated anchors.
void validate_dgp(const FactorDGP& dgp);

/// Throws InvalidPlan when the plan does not fit the design: wrong length,
/// adoption outside [2, n_periods], no unit ever treated, or a Table effect
/// with a missing entry.
void validate_plan(const FactorDGP& dgp, const TreatmentPlan& plan);

/// Draws loadings for the design. For cointegrated designs, witnesses are
/// appended when the output pointer is given.
Eigen::MatrixXd gen_loadings(const FactorDGP& dgp, std::uint64_t seed,
                             std::vector<CointegrationWitness>* witnesses = nullptr);

/// Generates one panel. Loadings come from dgp.loadings when present,
/// otherwise from the seed's loading stream; factor paths and noise always
/// come from the seed's series stream, so passing the drawn loadings back in
/// reproduces the identical panel.
GeneratedPanel gen_panel(const FactorDGP& dgp, const TreatmentPlan& plan,
                         std::uint64_t seed);

}  // namespace ssc
