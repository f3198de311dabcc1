#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "ssc/panel.hpp"
#include "ssc/rng.hpp"
#include "ssc/weights.hpp"

namespace {

ssc::Panel basic_panel() {
    return ssc::read_panel_csv(testutil::data_file("panel_basic.csv"));
}

Eigen::MatrixXd random_outcomes(ssc::Rng& rng, int n, int p) {
    Eigen::MatrixXd y(n, p);
    for (int t = 0; t < p; ++t) {
        for (int i = 0; i < n; ++i) y(i, t) = rng.normal();
    }
    return y;
}

}  // namespace

TEST_CASE("the twin fixture fits exactly") {
    ssc::Panel panel = basic_panel();
    ssc::WeightModel model = ssc::fit_all(panel);

    int a = panel.unit_index("A"), b = panel.unit_index("B");
    int c = panel.unit_index("C"), d = panel.unit_index("D");

    CHECK(model.B(a, b) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(model.B(b, a) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(model.B(c, d) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(model.B(d, c) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(model.intercepts(a) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(model.intercepts(b) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(model.intercepts(c) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(model.intercepts(d) == doctest::Approx(-0.5).epsilon(1e-14));
    for (const auto& fit : model.units) {
        CHECK(fit.objective <= 1e-20);
        CHECK(fit.converged);
        CHECK(fit.weights(fit.unit) == 0.0);
    }
    CHECK(ssc::pooled_residual_sd(model, panel.pre_periods) <= 1e-11);

    // M = (I-B)'(I-B) assembled consistently
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
    Eigen::MatrixXd m_ref =
        (eye - model.B).transpose() * (eye - model.B);
    CHECK((model.M - m_ref).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(model.M(a, a) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(model.M(a, b) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("weight rows are on the simplex with a zero diagonal") {
    ssc::Panel panel = ssc::read_panel_csv(testutil::data_file("panel_noisy.csv"));
    ssc::WeightModel model = ssc::fit_all(panel);
    for (int i = 0; i < panel.n_units(); ++i) {
        CHECK(model.B(i, i) == 0.0);
        CHECK(model.B.row(i).sum() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(model.B.row(i).minCoeff() >= 0.0);
    }
}

TEST_CASE("the intercept absorbs level shifts without moving weights") {
    ssc::Rng rng(201);
    Eigen::MatrixXd y = random_outcomes(rng, 5, 30);
    std::vector<int> cols(30);
    std::iota(cols.begin(), cols.end(), 0);

    ssc::UnitWeights base = ssc::fit_unit_weights_cols(y, cols, 2);

    // shift only the target unit
    Eigen::MatrixXd shifted = y;
    shifted.row(2).array() += 5.0;
    ssc::UnitWeights moved = ssc::fit_unit_weights_cols(shifted, cols, 2);
    CHECK((moved.weights - base.weights).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(moved.intercept == doctest::Approx(base.intercept + 5.0).epsilon(1e-10));
    CHECK(moved.objective == doctest::Approx(base.objective).epsilon(1e-9));

    // shift every unit equally: nothing but the intercept's content changes
    Eigen::MatrixXd all_shifted = y.array() + 3.0;
    ssc::UnitWeights same = ssc::fit_unit_weights_cols(all_shifted, cols, 2);
    CHECK((same.weights - base.weights).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(same.objective == doctest::Approx(base.objective).epsilon(1e-9));
}

TEST_CASE("fitting on explicit columns matches the panel pre block") {
    ssc::Panel panel = basic_panel();
    std::vector<int> pre(static_cast<std::size_t>(panel.pre_periods));
    std::iota(pre.begin(), pre.end(), 0);
    for (int i = 0; i < panel.n_units(); ++i) {
        ssc::UnitWeights direct = ssc::fit_unit_weights(panel, i);
        ssc::UnitWeights via_cols =
            ssc::fit_unit_weights_cols(panel.outcomes, pre, i);
        CHECK((direct.weights - via_cols.weights).cwiseAbs().maxCoeff() == 0.0);
        CHECK(direct.intercept == via_cols.intercept);
        CHECK(direct.objective == via_cols.objective);
    }
}

TEST_CASE("parallel and serial fits agree bit for bit") {
    ssc::Panel panel = ssc::read_panel_csv(testutil::data_file("panel_noisy.csv"));
    ssc::FitOptions serial;
    serial.threads = 1;
    ssc::FitOptions parallel;
    parallel.threads = 4;
    ssc::WeightModel a = ssc::fit_all(panel, serial);
    ssc::WeightModel b = ssc::fit_all(panel, parallel);
    CHECK((a.B - b.B).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.intercepts - b.intercepts).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.M - b.M).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pooled residual scale averages the fit objectives") {
    ssc::Rng rng(202);
    Eigen::MatrixXd y = random_outcomes(rng, 4, 25);
    std::vector<int> cols(25);
    std::iota(cols.begin(), cols.end(), 0);
    ssc::WeightModel model = ssc::fit_all_cols(y, cols);
    double total = 0.0;
    for (const auto& fit : model.units) total += fit.objective;
    CHECK(ssc::pooled_residual_sd(model, 25) ==
          doctest::Approx(std::sqrt(total / (4 * 25))).epsilon(1e-12));
}
