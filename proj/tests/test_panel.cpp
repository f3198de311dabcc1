#include <algorithm>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ssc/errors.hpp"
#include "ssc/panel.hpp"
#include "ssc/table.hpp"

using ssc::ErrorCode;
using testutil::two_unit_records;

namespace {

ErrorCode code_of(const std::vector<ssc::RawRecord>& records) {
    try {
        ssc::validate_panel(records);
    } catch (const ssc::Error& e) {
        return e.code();
    }
    FAIL("expected validation to fail");
    return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("validation builds the canonical panel from shuffled records") {
    auto records = two_unit_records();
    std::shuffle(records.begin(), records.end(), std::mt19937(3));
    ssc::Panel panel = ssc::validate_panel(records);

    CHECK(panel.unit_ids == std::vector<std::string>{"A", "B"});
    CHECK(panel.period_ids == std::vector<std::string>{"1", "2", "3", "4"});
    CHECK(panel.pre_periods == 3);
    CHECK(panel.post_periods == 1);
    CHECK(panel.outcomes(0, 2) == 2.0);
    CHECK(panel.outcomes(1, 0) == 0.5);
    CHECK(panel.treated(0, 3) == 1);
    CHECK(panel.treated(1, 3) == 0);
    CHECK(panel.unit_index("B") == 1);
    CHECK(panel.unit_index("Z") == -1);
    CHECK(panel.period_index("4") == 3);
}

TEST_CASE("integer period labels sort numerically, not lexically") {
    std::vector<ssc::RawRecord> records;
    for (const char* period : {"9", "10", "11"}) {
        records.push_back({"A", period, 1.0, period[0] == '1' && period[1] == '1'});
        records.push_back({"B", period, 2.0, false});
    }
    ssc::Panel panel = ssc::validate_panel(records);
    CHECK(panel.period_ids == std::vector<std::string>{"9", "10", "11"});
}

TEST_CASE("quarterly labels order by year then quarter") {
    std::vector<ssc::RawRecord> records;
    for (const char* period : {"2019Q4", "2020Q1", "2019Q3", "2020Q2"}) {
        bool post = std::string(period) >= "2020Q1" && period[3] == '0';
        records.push_back({"u1", period, 1.0, post});
        records.push_back({"u2", period, 2.0, false});
    }
    ssc::Panel panel = ssc::validate_panel(records);
    CHECK(panel.period_ids ==
          std::vector<std::string>{"2019Q3", "2019Q4", "2020Q1", "2020Q2"});
    CHECK(panel.pre_periods == 2);
}

TEST_CASE("each validation failure reports its own code") {
    {
        auto records = two_unit_records();
        records.push_back(records[0]);  // (A,1) twice
        CHECK(code_of(records) == ErrorCode::DuplicateCell);
    }
    {
        auto records = two_unit_records();
        records.pop_back();  // drop (B,4)
        CHECK(code_of(records) == ErrorCode::MissingCell);
    }
    {
        auto records = two_unit_records();
        records[1].treated = true;  // A: 0,1,0,1 flips back off
        CHECK(code_of(records) == ErrorCode::NonAbsorbing);
    }
    {
        auto records = two_unit_records();
        for (auto& r : records) {
            if (r.unit == "A") r.treated = true;  // treated from period 1
        }
        CHECK(code_of(records) == ErrorCode::NoPrePeriod);
    }
    {
        auto records = two_unit_records();
        for (auto& r : records) r.treated = false;
        CHECK(code_of(records) == ErrorCode::NoTreatedUnit);
    }
    {
        auto records = two_unit_records();
        records[2].period = "2019Q1";  // mixes label styles
        CHECK(code_of(records) == ErrorCode::ParseError);
    }
}

TEST_CASE("the validation message names the offending unit and period") {
    auto records = two_unit_records();
    records[1].treated = true;
    try {
        ssc::validate_panel(records);
        FAIL("expected NonAbsorbing");
    } catch (const ssc::Error& e) {
        std::string what = e.what();
        CHECK(what.find("'A'") != std::string::npos);
        CHECK(what.find("'3'") != std::string::npos);
    }
}

TEST_CASE("panel files round-trip in canonical form") {
    ssc::Panel panel = ssc::read_panel_csv(testutil::data_file("panel_basic.csv"));
    CHECK(panel.n_units() == 4);
    CHECK(panel.n_periods() == 22);
    CHECK(panel.pre_periods == 20);
    CHECK(panel.post_periods == 2);

    std::string dir = testutil::scratch_dir("panel");
    ssc::write_panel_csv(dir + "/echo.csv", panel);
    ssc::Panel back = ssc::read_panel_csv(dir + "/echo.csv");
    CHECK(back.unit_ids == panel.unit_ids);
    CHECK(back.period_ids == panel.period_ids);
    CHECK((back.outcomes - panel.outcomes).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.treated - panel.treated).cwiseAbs().maxCoeff() == 0);

    // a second write is byte-identical
    ssc::write_panel_csv(dir + "/echo2.csv", back);
    CHECK(ssc::read_text_file(dir + "/echo.csv") ==
          ssc::read_text_file(dir + "/echo2.csv"));
}

TEST_CASE("the effect index enumerates treated cells unit-major") {
    ssc::Panel panel = ssc::read_panel_csv(testutil::data_file("panel_noisy.csv"));
    ssc::EffectIndex index = ssc::build_effect_index(panel);

    REQUIRE(index.size() == 5);
    // canonical unit order is U1..U6; U1 adopts at period 41, U5 at 42
    CHECK(index.cells[0].unit == panel.unit_index("U1"));
    CHECK(index.cells[0].period == 40);
    CHECK(index.cells[2].period == 42);
    CHECK(index.cells[3].unit == panel.unit_index("U5"));
    CHECK(index.horizon(0) == 1);
    CHECK(index.horizon(2) == 3);
    CHECK(index.horizon(3) == 1);
    CHECK(index.find(panel.unit_index("U5"), 41) == 3);
    CHECK(index.find(panel.unit_index("U2"), 41) == -1);

    CHECK(ssc::event_count(index, 1) == 2);
    CHECK(ssc::event_count(index, 3) == 1);

    // selector for post period 2 (column 41): cells (U1,41) and (U5,41)
    Eigen::MatrixXd a2 = index.selector(2);
    CHECK(a2.rows() == panel.n_units());
    CHECK(a2.cols() == index.size());
    CHECK(a2(panel.unit_index("U1"), 1) == 1.0);
    CHECK(a2(panel.unit_index("U5"), 3) == 1.0);
    CHECK(a2.sum() == 2.0);
}

TEST_CASE("event time matrices and ATT weights agree with the index") {
    ssc::Panel panel = ssc::read_panel_csv(testutil::data_file("panel_noisy.csv"));
    ssc::EffectIndex index = ssc::build_effect_index(panel);
    Eigen::MatrixXi events = ssc::event_time(panel);

    CHECK(events(panel.unit_index("U1"), 39) == 0);
    CHECK(events(panel.unit_index("U1"), 40) == 1);
    CHECK(events(panel.unit_index("U1"), 42) == 3);
    CHECK(events(panel.unit_index("U5"), 42) == 2);
    CHECK(events(panel.unit_index("U2"), 42) == 0);

    Eigen::VectorXd w1 = ssc::att_weights(index, 1);
    CHECK(w1.sum() == doctest::Approx(1.0));
    CHECK(w1(0) == doctest::Approx(0.5));
    CHECK(w1(3) == doctest::Approx(0.5));
    CHECK(w1(1) == 0.0);

    CHECK_THROWS_AS(ssc::att_weights(index, 9), ssc::Error);
    try {
        ssc::att_weights(index, 9);
    } catch (const ssc::Error& e) {
        CHECK(e.code() == ErrorCode::EmptyEventTime);
    }

    ssc::HypothesisSpec h = ssc::att_hypothesis(index, 2, 1.5);
    CHECK(h.C.rows() == 1);
    CHECK(h.C(0, 1) == doctest::Approx(0.5));
    CHECK(h.d(0) == 1.5);
    CHECK(h.label.find("2") != std::string::npos);
}

TEST_CASE("policy contrasts validate their groups") {
    ssc::Panel panel = ssc::read_panel_csv(testutil::data_file("panel_noisy.csv"));
    ssc::EffectIndex index = ssc::build_effect_index(panel);

    ssc::HypothesisSpec h =
        ssc::policy_contrast(panel, index, {"U1"}, {"U5"}, 1);
    CHECK(h.C.rows() == 1);
    CHECK(h.C(0, 0) == doctest::Approx(1.0));   // U1's horizon-1 cell
    CHECK(h.C(0, 3) == doctest::Approx(-1.0));  // U5's horizon-1 cell
    CHECK(h.d(0) == 0.0);

    auto code_of_contrast = [&](const std::vector<std::string>& a,
                                const std::vector<std::string>& b, int s) {
        try {
            ssc::policy_contrast(panel, index, a, b, s);
        } catch (const ssc::Error& e) {
            return e.code();
        }
        FAIL("expected the contrast to fail");
        return ErrorCode::ParseError;
    };
    CHECK(code_of_contrast({"U1"}, {"U1"}, 1) == ErrorCode::OverlappingGroups);
    CHECK(code_of_contrast({"nope"}, {"U5"}, 1) == ErrorCode::InvalidInput);
    CHECK(code_of_contrast({"U2"}, {"U5"}, 1) == ErrorCode::EmptyGroup);
    CHECK(code_of_contrast({"U1"}, {"U5"}, 3) == ErrorCode::EmptyGroup);
}

TEST_CASE("csv reader rejects malformed headers and fields") {
    std::string dir = testutil::scratch_dir("badcsv");
    auto write_and_code = [&](const std::string& name, const std::string& text) {
        std::string path = dir + "/" + name;
        ssc::write_text_file(path, text);
        try {
            ssc::read_panel_csv(path);
        } catch (const ssc::Error& e) {
            return e.code();
        }
        FAIL("expected the read to fail");
        return ErrorCode::IoError;
    };
    CHECK(write_and_code("header.csv", "unit,period,outcome,treated\nA,1,1,0\n") ==
          ErrorCode::ParseError);
    CHECK(write_and_code("badnum.csv",
                         "unit,time,outcome,treated\nA,1,one,0\nA,2,1,1\nB,1,0,0\nB,2,0,0\n") ==
          ErrorCode::ParseError);
    CHECK(write_and_code("badflag.csv",
                         "unit,time,outcome,treated\nA,1,1,2\nA,2,1,1\nB,1,0,0\nB,2,0,0\n") ==
          ErrorCode::ParseError);
}
