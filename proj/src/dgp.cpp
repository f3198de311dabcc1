#include "ssc/dgp.hpp"

#include <cmath>
#include <sstream>

#include "ssc/errors.hpp"
#include "ssc/rng.hpp"

namespace ssc {

double TreatmentPlan::effect(int unit, int horizon) const {
    switch (kind) {
        case EffectKind::Linear:
            return delta * horizon;
        case EffectKind::Constant:
            return delta;
        case EffectKind::Table: {
            auto it = table.find({unit, horizon});
            if (it == table.end()) {
                std::ostringstream msg;
                msg << "effect table has no entry for unit " << unit
                    << " at event time " << horizon;
                fail(ErrorCode::InvalidPlan, msg.str());
            }
            return it->second;
        }
    }
    return 0.0;
}

void validate_dgp(const FactorDGP& dgp) {
    if (dgp.n_units < 2) {
        fail(ErrorCode::InvalidDGP, "design needs at least two units");
    }
    if (dgp.pre_periods < 1 || dgp.post_periods < 1) {
        fail(ErrorCode::InvalidDGP, "design needs pre_periods >= 1 and post_periods >= 1");
    }
    if (dgp.ar_coeffs.size() != dgp.stationary_sd.size()) {
        fail(ErrorCode::InvalidDGP,
             "one innovation scale per stationary factor is required");
    }
    if (dgp.n_random_walk < 0 ||
        dgp.walk_sd.size() != static_cast<std::size_t>(dgp.n_random_walk)) {
        fail(ErrorCode::InvalidDGP, "one innovation scale per walk factor is required");
    }
    if (dgp.n_factors() < 1) {
        fail(ErrorCode::InvalidDGP, "design needs at least one factor");
    }
    for (double rho : dgp.ar_coeffs) {
        if (!(std::abs(rho) < 1.0)) {
            std::ostringstream msg;
            msg << "stationary factor coefficient " << rho
                << " is not inside (-1, 1)";
            fail(ErrorCode::InvalidDGP, msg.str());
        }
    }
    for (double sd : dgp.stationary_sd) {
        if (!(sd >= 0.0) || !std::isfinite(sd)) {
            fail(ErrorCode::InvalidDGP, "factor innovation scales must be non-negative");
        }
    }
    for (double sd : dgp.walk_sd) {
        if (!(sd >= 0.0) || !std::isfinite(sd)) {
            fail(ErrorCode::InvalidDGP, "factor innovation scales must be non-negative");
        }
    }
    if (!(dgp.noise_sd >= 0.0) || !std::isfinite(dgp.noise_sd)) {
        fail(ErrorCode::InvalidDGP, "noise scale must be non-negative");
    }
    if (dgp.cointegrated()) {
        int anchors = 2 * (dgp.n_random_walk + 1);
        if (dgp.n_units < anchors) {
            std::ostringstream msg;
            msg << "cointegrated design with " << dgp.n_random_walk
                << " walk factor(s) needs at least " << anchors
                << " units for the duplicated anchor pairs, got " << dgp.n_units;
            fail(ErrorCode::InvalidDGP, msg.str());
        }
    }
    if (dgp.loadings.size() != 0 &&
        (dgp.loadings.rows() != dgp.n_units || dgp.loadings.cols() != dgp.n_factors())) {
        std::ostringstream msg;
        msg << "loadings must be " << dgp.n_units << "x" << dgp.n_factors()
            << ", got " << dgp.loadings.rows() << "x" << dgp.loadings.cols();
        fail(ErrorCode::InvalidDGP, msg.str());
    }
}

void validate_plan(const FactorDGP& dgp, const TreatmentPlan& plan) {
    if (plan.adoption.size() != static_cast<std::size_t>(dgp.n_units)) {
        fail(ErrorCode::InvalidPlan, "adoption plan length must equal the unit count");
    }
    bool any_treated = false;
    for (std::size_t i = 0; i < plan.adoption.size(); ++i) {
        int a = plan.adoption[i];
        if (a == 0) continue;
        if (a < 2 || a > dgp.n_periods()) {
            std::ostringstream msg;
            msg << "unit " << i + 1 << " adopts at period " << a
                << "; adoption must lie in [2, " << dgp.n_periods()
                << "] or be 0 for never";
            fail(ErrorCode::InvalidPlan, msg.str());
        }
        any_treated = true;
    }
    if (!any_treated) {
        fail(ErrorCode::InvalidPlan, "no unit is ever treated under this plan");
    }
    // The panel's pre-period is everything before the earliest adoption; the
    // effect horizon never exceeds the remaining periods, so Table plans can
    // be checked for completeness up front.
    if (plan.kind == TreatmentPlan::EffectKind::Table) {
        for (std::size_t i = 0; i < plan.adoption.size(); ++i) {
            int a = plan.adoption[i];
            if (a == 0) continue;
            int max_horizon = dgp.n_periods() - a + 1;
            for (int s = 1; s <= max_horizon; ++s) {
                plan.effect(static_cast<int>(i), s);
            }
        }
    }
}

namespace {

std::string unit_label(int i, int n_units) {
    int width = 1;
    for (int v = n_units; v >= 10; v /= 10) ++width;
    std::string digits = std::to_string(i + 1);
    return "U" + std::string(width - digits.size(), '0') + digits;
}

}  // namespace

Eigen::MatrixXd gen_loadings(const FactorDGP& dgp, std::uint64_t seed,
                             std::vector<CointegrationWitness>* witnesses) {
    validate_dgp(dgp);
    Rng rng(seed);
    const int n = dgp.n_units;
    const int r0 = dgp.n_stationary();
    const int r1 = dgp.n_random_walk;
    Eigen::MatrixXd loadings(n, r0 + r1);

    // Stationary loadings: uniform on [0, 1], row by row.
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < r0; ++j) loadings(i, j) = rng.uniform();
    }
    if (r1 == 0) return loadings;

    // Walk loadings: r1+1 hull points (origin plus unit vectors), each held
    // by a pair of anchor units; remaining units mix the points with uniform
    // normalized coefficients. Every unit's walk loadings therefore lie in
    // the convex hull of the other units', with an explicit witness.
    const int points = r1 + 1;
    const int anchors = 2 * points;
    Eigen::MatrixXd hull = Eigen::MatrixXd::Zero(points, r1);
    for (int m = 1; m < points; ++m) hull(m, m - 1) = 1.0;

    Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(n, points);
    for (int i = 0; i < anchors; ++i) mix(i, i / 2) = 1.0;
    for (int i = anchors; i < n; ++i) {
        double total = 0.0;
        for (int m = 0; m < points; ++m) {
            mix(i, m) = rng.uniform();
            total += mix(i, m);
        }
        if (total == 0.0) {
            mix(i, 0) = 1.0;
        } else {
            mix.row(i) /= total;
        }
    }
    loadings.rightCols(r1) = mix * hull;

    if (witnesses) {
        for (int i = 0; i < n; ++i) {
            CointegrationWitness w;
            w.unit = i;
            w.weights = Eigen::VectorXd::Zero(n);
            if (i < anchors) {
                int twin = (i % 2 == 0) ? i + 1 : i - 1;
                w.weights(twin) = 1.0;
            } else {
                // Split each point's coefficient across its anchor pair.
                for (int m = 0; m < points; ++m) {
                    w.weights(2 * m) = 0.5 * mix(i, m);
                    w.weights(2 * m + 1) = 0.5 * mix(i, m);
                }
            }
            witnesses->push_back(std::move(w));
        }
    }
    return loadings;
}

GeneratedPanel gen_panel(const FactorDGP& dgp, const TreatmentPlan& plan,
                         std::uint64_t seed) {
    validate_dgp(dgp);
    validate_plan(dgp, plan);

    GeneratedPanel out;
    if (dgp.loadings.size() != 0) {
        // Fixed loadings carry no witnesses; the anchor structure is only
        // known for loadings this module drew itself.
        out.loadings = dgp.loadings;
    } else {
        out.loadings = gen_loadings(dgp, stream_seed(seed, 0),
                                    dgp.cointegrated() ? &out.witnesses : nullptr);
    }

    const int n = dgp.n_units;
    const int periods = dgp.n_periods();
    const int r0 = dgp.n_stationary();
    const int r1 = dgp.n_random_walk;

    Rng rng(stream_seed(seed, 1));
    Eigen::MatrixXd factors(periods, r0 + r1);
    for (int j = 0; j < r0; ++j) {
        double rho = dgp.ar_coeffs[j];
        double sd = dgp.stationary_sd[j];
        double level = rng.normal(sd / std::sqrt(1.0 - rho * rho));
        factors(0, j) = level;
        for (int t = 1; t < periods; ++t) {
            level = rho * level + rng.normal(sd);
            factors(t, j) = level;
        }
    }
    for (int j = 0; j < r1; ++j) {
        double sd = dgp.walk_sd[j];
        double level = 0.0;
        for (int t = 0; t < periods; ++t) {
            level += rng.normal(sd);
            factors(t, j + r0) = level;
        }
    }

    Eigen::MatrixXd outcomes = out.loadings * factors.transpose();
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < periods; ++t) {
            outcomes(i, t) += rng.normal(dgp.noise_sd);
        }
    }

    Panel panel;
    panel.unit_ids.reserve(n);
    for (int i = 0; i < n; ++i) panel.unit_ids.push_back(unit_label(i, n));
    panel.period_ids.reserve(periods);
    for (int t = 1; t <= periods; ++t) panel.period_ids.push_back(std::to_string(t));
    panel.treated.setZero(n, periods);
    int first_adoption = periods + 1;
    for (int i = 0; i < n; ++i) {
        int a = plan.adoption[i];
        if (a == 0) continue;
        first_adoption = std::min(first_adoption, a);
        for (int t = a - 1; t < periods; ++t) panel.treated(i, t) = 1;
    }
    panel.pre_periods = first_adoption - 1;
    panel.post_periods = periods - panel.pre_periods;

    // Treatment effects are added on top of the untreated outcome.
    for (int i = 0; i < n; ++i) {
        int a = plan.adoption[i];
        if (a == 0) continue;
        for (int t = a - 1; t < periods; ++t) {
            outcomes(i, t) += plan.effect(i, t - (a - 1) + 1);
        }
    }
    panel.outcomes = outcomes;

    out.panel = std::move(panel);
    out.index = build_effect_index(out.panel);
    out.true_tau.resize(out.index.size());
    for (int k = 0; k < out.index.size(); ++k) {
        out.true_tau(k) =
            plan.effect(out.index.cells[k].unit, out.index.horizon(k));
    }
    return out;
}

}  // namespace ssc
