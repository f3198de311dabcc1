#include "ssc/mc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssc/errors.hpp"
#include "ssc/rng.hpp"
#include "ssc/table.hpp"
#include "ssc/util.hpp"

namespace ssc {

namespace {

struct RepOutcome {
    bool ok = false;
    std::string failure;
    std::vector<double> att;  // aligned with the reference horizon list
    double resid_sd = 0.0;
    double null_value = 0.0;
    bool reject = false;
    bool covered = false;
    double ci_width = 0.0;
};

// The horizon structure is a function of the plan alone: unit i treated from
// period a_i reaches event time s whenever s <= n_periods - a_i + 1.
void plan_structure(const FactorDGP& dgp, const TreatmentPlan& plan,
                    std::vector<int>* horizons, std::vector<int>* counts,
                    std::vector<double>* true_att) {
    for (int s = 1; s <= dgp.post_periods; ++s) {
        int count = 0;
        KahanSum total;
        for (int i = 0; i < dgp.n_units; ++i) {
            int a = plan.adoption[i];
            if (a == 0 || dgp.n_periods() - a + 1 < s) continue;
            ++count;
            total.add(plan.effect(i, s));
        }
        if (count == 0) continue;
        horizons->push_back(s);
        counts->push_back(count);
        true_att->push_back(total.value() / count);
    }
}

}  // namespace

McReport run_monte_carlo(const FactorDGP& dgp, const TreatmentPlan& plan,
                         const McSettings& settings, int reps,
                         std::uint64_t seed) {
    validate_dgp(dgp);
    validate_plan(dgp, plan);
    if (reps < 1) {
        fail(ErrorCode::InvalidConfig, "replication count must be positive");
    }

    // Loadings are a study-level quantity: drawn once, fixed across reps.
    FactorDGP fixed = dgp;
    if (fixed.loadings.size() == 0) {
        fixed.loadings = gen_loadings(dgp, stream_seed(seed, 0));
    }

    McReport report;
    report.replications = reps;
    report.alpha = settings.alpha;
    report.seed = seed;
    report.mode = settings.mode;
    report.normalization = settings.normalization;
    report.test_horizon = settings.test_horizon;
    report.ran_ci = settings.run_ci;
    plan_structure(fixed, plan, &report.horizons, &report.counts, &report.true_att);

    auto horizon_slot = std::find(report.horizons.begin(), report.horizons.end(),
                                  settings.test_horizon);
    if (horizon_slot == report.horizons.end()) {
        fail(ErrorCode::EmptyEventTime,
             "no treated cell reaches event time " +
                 std::to_string(settings.test_horizon) + " under this plan");
    }
    const std::size_t test_slot = horizon_slot - report.horizons.begin();
    const double base_null =
        settings.null_at_zero ? 0.0 : report.true_att[test_slot];
    const double null_value = base_null + settings.null_shift;
    const double truth = report.true_att[test_slot];

    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));
    parallel_for(
        static_cast<std::size_t>(reps),
        [&](std::size_t r) {
            RepOutcome& slot = outcomes[r];
            try {
                GeneratedPanel gen =
                    gen_panel(fixed, plan, stream_seed(seed, r + 1));
                FitOptions fit_options;
                fit_options.tol = settings.fit_tol;
                fit_options.threads = 1;
                WeightModel model = fit_all(gen.panel, fit_options);
                TauEstimate tau = estimate_tau(gen.panel, gen.index, model,
                                               settings.rcond_min);
                AttPath path = att_path(tau);

                slot.att.assign(report.horizons.size(), 0.0);
                for (std::size_t h = 0; h < report.horizons.size(); ++h) {
                    for (std::size_t p = 0; p < path.horizons.size(); ++p) {
                        if (path.horizons[p] == report.horizons[h]) {
                            slot.att[h] = path.estimates(static_cast<int>(p));
                        }
                    }
                }
                slot.resid_sd = pooled_residual_sd(model, gen.panel.pre_periods);
                slot.null_value = null_value;

                HypothesisSpec hypothesis =
                    att_hypothesis(gen.index, settings.test_horizon, null_value);
                TestResult test =
                    run_test(gen.panel, gen.index, model, tau, hypothesis,
                             settings.alpha, settings.mode, settings.normalization,
                             settings.rcond_min, 1);
                slot.reject = test.reject;

                if (settings.run_ci) {
                    Eigen::RowVectorXd c_row = hypothesis.C.row(0);
                    double center = c_row.dot(tau.tau_hat);
                    double radius = std::sqrt(std::max(test.critical_value, 0.0));
                    double half =
                        std::max(1.25 * radius, 1e-12 * (1.0 + std::abs(center)));
                    GridSpec grid;
                    grid.lo = center - half;
                    grid.hi = center + half;
                    grid.points = settings.ci_points;
                    CiResult ci = invert_test(gen.panel, gen.index, model, tau,
                                              c_row, settings.alpha, grid,
                                              settings.mode, settings.normalization,
                                              settings.rcond_min, 1);
                    slot.covered = ci.lo <= truth && truth <= ci.hi;
                    slot.ci_width = ci.hi - ci.lo;
                }
                slot.ok = true;
            } catch (const Error& e) {
                slot.ok = false;
                slot.failure = error_code_name(e.code());
            }
        },
        settings.threads);

    // Index-ordered reduction keeps every aggregate independent of the
    // thread schedule.
    int completed = 0;
    for (const auto& slot : outcomes) {
        if (slot.ok) {
            ++completed;
        } else {
            ++report.failures[slot.failure];
        }
    }
    report.completed = completed;
    if (completed == 0) return report;

    const std::size_t n_h = report.horizons.size();
    report.bias.assign(n_h, 0.0);
    report.sd.assign(n_h, 0.0);
    report.rmse.assign(n_h, 0.0);
    report.mc_se.assign(n_h, 0.0);
    for (std::size_t h = 0; h < n_h; ++h) {
        KahanSum mean_sum;
        for (const auto& slot : outcomes) {
            if (slot.ok) mean_sum.add(slot.att[h]);
        }
        double mean = mean_sum.value() / completed;
        KahanSum var_sum;
        KahanSum sq_err;
        for (const auto& slot : outcomes) {
            if (!slot.ok) continue;
            double dev = slot.att[h] - mean;
            var_sum.add(dev * dev);
            double err = slot.att[h] - report.true_att[h];
            sq_err.add(err * err);
        }
        report.bias[h] = mean - report.true_att[h];
        report.sd[h] = completed > 1
                           ? std::sqrt(var_sum.value() / (completed - 1))
                           : 0.0;
        report.rmse[h] = std::sqrt(sq_err.value() / completed);
        report.mc_se[h] = report.sd[h] / std::sqrt(static_cast<double>(completed));
    }

    KahanSum rejects;
    KahanSum covers;
    KahanSum widths;
    KahanSum resid;
    KahanSum nulls;
    for (const auto& slot : outcomes) {
        if (!slot.ok) continue;
        rejects.add(slot.reject ? 1.0 : 0.0);
        covers.add(slot.covered ? 1.0 : 0.0);
        widths.add(slot.ci_width);
        resid.add(slot.resid_sd);
        nulls.add(slot.null_value);
    }
    report.rejection_rate = rejects.value() / completed;
    report.coverage_rate = settings.run_ci ? covers.value() / completed : 0.0;
    report.mean_ci_width = settings.run_ci ? widths.value() / completed : 0.0;
    report.mean_resid_sd = resid.value() / completed;
    report.null_value_mean = nulls.value() / completed;
    return report;
}

std::string McReport::to_text() const {
    std::ostringstream out;
    out << "replications: " << replications << "\n";
    out << "completed: " << completed << "\n";
    for (const auto& [family, count] : failures) {
        out << "failed[" << family << "]: " << count << "\n";
    }
    out << "seed: " << seed << "\n";
    out << "alpha: " << format_double(alpha) << "\n";
    out << "estimator_mode: " << estimator_mode_name(mode) << "\n";
    out << "normalization: " << normalization_name(normalization) << "\n";
    out << "test_horizon: " << test_horizon << "\n";
    out << "null_value: " << format_double(null_value_mean) << "\n";
    out << "rejection_rate: " << format_double(rejection_rate) << "\n";
    if (ran_ci) {
        out << "coverage_rate: " << format_double(coverage_rate) << "\n";
        out << "mean_ci_width: " << format_double(mean_ci_width) << "\n";
    }
    out << "mean_resid_sd: " << format_double(mean_resid_sd) << "\n";
    out << "per-horizon (s, n_s, true_att, bias, sd, rmse, mc_se):\n";
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        out << "  " << horizons[h] << ", " << counts[h] << ", "
            << format_double(true_att[h]) << ", " << format_double(bias[h]) << ", "
            << format_double(sd[h]) << ", " << format_double(rmse[h]) << ", "
            << format_double(mc_se[h]) << "\n";
    }
    return out.str();
}

}  // namespace ssc
