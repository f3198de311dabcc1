#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace ssc {

/// One observation as it appears in an input file: (unit, period, outcome,
/// treatment indicator).
struct RawRecord {
    std::string unit;
    std::string period;
    double outcome = 0.0;
    bool treated = false;
};

/// A balanced panel in canonical order: units sorted lexicographically,
/// periods sorted chronologically. Column indices 0..pre_periods-1 are the
/// common pre-treatment block (no unit treated yet); the remaining
/// post_periods columns contain every treated observation.
struct Panel {
    std::vector<std::string> unit_ids;
    std::vector<std::string> period_ids;
    Eigen::MatrixXd outcomes;   // n_units x n_periods
    Eigen::MatrixXi treated;    // n_units x n_periods, entries 0/1
    int pre_periods = 0;        // T
    int post_periods = 0;       // S

    int n_units() const { return static_cast<int>(unit_ids.size()); }
    int n_periods() const { return static_cast<int>(period_ids.size()); }

    /// Index of a unit label, or -1 if absent.
    int unit_index(const std::string& label) const;
    /// Index of a period label, or -1 if absent.
    int period_index(const std::string& label) const;
};

/// A treated cell, addressed by unit row and absolute period column.
struct Cell {
    int unit = 0;
    int period = 0;

    bool operator==(const Cell&) const = default;
};

/// Enumeration of all treated unit-period cells, unit-major then period
/// ascending. This ordering defines the coordinate system for the effect
/// vector and everything downstream (hypothesis rows, gram matrices, output
/// files).
struct EffectIndex {
    std::vector<Cell> cells;
    int n_units = 0;
    int pre_periods = 0;
    int post_periods = 0;

    int size() const { return static_cast<int>(cells.size()); }

    /// Event time of cell k: 1 in the adoption period, 2 the period after,
    /// and so on (treatment is absorbing, so this is the count of treated
    /// periods up to and including the cell's own).
    int horizon(int k) const;

    /// Position of (unit, period) in the cell list, or -1 if untreated.
    int find(int unit, int period) const;

    /// Selector A_s mapping the effect vector to units treated for the
    /// s-th post period (absolute column pre_periods + s - 1): entry (i, k)
    /// is 1 when cell k is unit i in that period.
    Eigen::MatrixXd selector(int s) const;
};

/// Linear functionals of the effect vector, one row per reported parameter.
struct ParamSpec {
    Eigen::MatrixXd rows;              // n_params x K
    std::vector<std::string> labels;   // n_params
};

/// Null hypothesis C tau = d on the effect vector.
struct HypothesisSpec {
    Eigen::MatrixXd C;   // n_restrictions x K
    Eigen::VectorXd d;   // n_restrictions
    std::string label;
};

/// Checks balance, absorbing treatment, and the presence of a common
/// pre-treatment block, then assembles the canonical Panel.
/// Throws: DuplicateCell, MissingCell, NonAbsorbing, NoPrePeriod,
/// NoTreatedUnit, ParseError (mixed or malformed period labels).
Panel validate_panel(std::vector<RawRecord> records);

/// Reads a `unit,time,outcome,treated` file and validates it.
Panel read_panel_csv(const std::string& path);

/// Writes a panel in canonical order; output re-reads to an identical panel.
void write_panel_csv(const std::string& path, const Panel& panel);

EffectIndex build_effect_index(const Panel& panel);

/// Event time for every cell of the panel: 0 before adoption, then 1, 2, ...
Eigen::MatrixXi event_time(const Panel& panel);

/// Number of treated cells at event time s.
int event_count(const EffectIndex& index, int s);

/// Averaging weights over cells at event time s (the ATT-at-horizon-s
/// functional). Throws EmptyEventTime when no cell sits at s.
Eigen::VectorXd att_weights(const EffectIndex& index, int s);

/// Hypothesis ATT(s) = value.
HypothesisSpec att_hypothesis(const EffectIndex& index, int s, double value);

/// Contrast row: mean effect at event time s over group_a minus the same
/// over group_b, as the hypothesis that the difference equals zero.
/// Throws InvalidInput (unknown unit), OverlappingGroups, EmptyGroup
/// (a group contributes no cell at event time s).
HypothesisSpec policy_contrast(const Panel& panel, const EffectIndex& index,
                               const std::vector<std::string>& group_a,
                               const std::vector<std::string>& group_b, int s);

}  // namespace ssc
