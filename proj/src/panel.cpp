#include "ssc/panel.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "ssc/errors.hpp"
#include "ssc/table.hpp"

namespace ssc {

namespace {

// Period labels are either plain integers or quarterly YYYYQn tags. Both map
// to an integer sort key; mixing the two styles in one panel is rejected.
enum class PeriodStyle { Integer, Quarterly };

bool parse_quarterly(const std::string& label, long* key) {
    if (label.size() != 6 || label[4] != 'Q') return false;
    for (int i = 0; i < 4; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(label[i]))) return false;
    }
    if (label[5] < '1' || label[5] > '4') return false;
    long year = std::stol(label.substr(0, 4));
    long quarter = label[5] - '0';
    *key = year * 4 + (quarter - 1);
    return true;
}

bool parse_integer(const std::string& label, long* key) {
    if (label.empty()) return false;
    std::size_t i = (label[0] == '-' || label[0] == '+') ? 1 : 0;
    if (i == label.size()) return false;
    for (; i < label.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(label[i]))) return false;
    }
    *key = std::stol(label);
    return true;
}

long period_key(const std::string& label, PeriodStyle style) {
    long key = 0;
    bool ok = (style == PeriodStyle::Quarterly) ? parse_quarterly(label, &key)
                                                : parse_integer(label, &key);
    if (!ok) {
        fail(ErrorCode::ParseError,
             "period label '" + label + "' does not match the panel's label style");
    }
    return key;
}

PeriodStyle detect_style(const std::string& label) {
    long key = 0;
    if (parse_integer(label, &key)) return PeriodStyle::Integer;
    if (parse_quarterly(label, &key)) return PeriodStyle::Quarterly;
    fail(ErrorCode::ParseError,
         "period label '" + label + "' is neither an integer nor YYYYQn");
}

}  // namespace

int Panel::unit_index(const std::string& label) const {
    auto it = std::lower_bound(unit_ids.begin(), unit_ids.end(), label);
    if (it == unit_ids.end() || *it != label) return -1;
    return static_cast<int>(it - unit_ids.begin());
}

int Panel::period_index(const std::string& label) const {
    for (std::size_t i = 0; i < period_ids.size(); ++i) {
        if (period_ids[i] == label) return static_cast<int>(i);
    }
    return -1;
}

Panel validate_panel(std::vector<RawRecord> records) {
    if (records.empty()) fail(ErrorCode::ParseError, "panel has no observations");

    PeriodStyle style = detect_style(records.front().period);

    std::vector<std::string> units;
    std::map<long, std::string> periods_by_key;
    for (const auto& r : records) {
        units.push_back(r.unit);
        long key = period_key(r.period, style);
        periods_by_key.emplace(key, r.period);
    }
    std::sort(units.begin(), units.end());
    units.erase(std::unique(units.begin(), units.end()), units.end());

    Panel panel;
    panel.unit_ids = std::move(units);
    panel.period_ids.reserve(periods_by_key.size());
    for (const auto& [key, label] : periods_by_key) panel.period_ids.push_back(label);

    const int n = panel.n_units();
    const int p = panel.n_periods();
    panel.outcomes.setZero(n, p);
    panel.treated.setZero(n, p);

    std::vector<char> seen(static_cast<std::size_t>(n) * p, 0);
    for (const auto& r : records) {
        int i = panel.unit_index(r.unit);
        int t = panel.period_index(r.period);
        std::size_t slot = static_cast<std::size_t>(i) * p + t;
        if (seen[slot]) {
            fail(ErrorCode::DuplicateCell,
                 "duplicate observation for unit '" + r.unit + "' period '" +
                     r.period + "'");
        }
        seen[slot] = 1;
        panel.outcomes(i, t) = r.outcome;
        panel.treated(i, t) = r.treated ? 1 : 0;
    }
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < p; ++t) {
            if (!seen[static_cast<std::size_t>(i) * p + t]) {
                fail(ErrorCode::MissingCell,
                     "missing observation for unit '" + panel.unit_ids[i] +
                         "' period '" + panel.period_ids[t] + "'");
            }
        }
    }

    for (int i = 0; i < n; ++i) {
        for (int t = 1; t < p; ++t) {
            if (panel.treated(i, t - 1) == 1 && panel.treated(i, t) == 0) {
                fail(ErrorCode::NonAbsorbing,
                     "unit '" + panel.unit_ids[i] + "' leaves treatment at period '" +
                         panel.period_ids[t] + "'; treatment must be absorbing");
            }
        }
    }

    int first_treated = -1;
    for (int t = 0; t < p && first_treated < 0; ++t) {
        if (panel.treated.col(t).any()) first_treated = t;
    }
    if (first_treated < 0) {
        fail(ErrorCode::NoTreatedUnit, "no unit is ever treated");
    }
    if (first_treated == 0) {
        fail(ErrorCode::NoPrePeriod,
             "unit is already treated in the first period '" + panel.period_ids[0] +
                 "'; at least one common pre-treatment period is required");
    }
    panel.pre_periods = first_treated;
    panel.post_periods = p - first_treated;
    return panel;
}

Panel read_panel_csv(const std::string& path) {
    Table table = read_table_file(path);
    const std::vector<std::string> expected = {"unit", "time", "outcome", "treated"};
    if (table.header != expected) {
        fail(ErrorCode::ParseError,
             "'" + path + "': header must be unit,time,outcome,treated");
    }
    std::vector<RawRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        RawRecord r;
        r.unit = row[0];
        r.period = row[1];
        r.outcome = parse_double(row[2], path);
        if (row[3] == "0") {
            r.treated = false;
        } else if (row[3] == "1") {
            r.treated = true;
        } else {
            fail(ErrorCode::ParseError,
                 "'" + path + "': treated flag must be 0 or 1, got '" + row[3] + "'");
        }
        records.push_back(std::move(r));
    }
    return validate_panel(std::move(records));
}

void write_panel_csv(const std::string& path, const Panel& panel) {
    Table table;
    table.header = {"unit", "time", "outcome", "treated"};
    for (int i = 0; i < panel.n_units(); ++i) {
        for (int t = 0; t < panel.n_periods(); ++t) {
            table.rows.push_back({panel.unit_ids[i], panel.period_ids[t],
                                  format_double(panel.outcomes(i, t)),
                                  panel.treated(i, t) ? "1" : "0"});
        }
    }
    write_table_file(path, table);
}

EffectIndex build_effect_index(const Panel& panel) {
    EffectIndex index;
    index.n_units = panel.n_units();
    index.pre_periods = panel.pre_periods;
    index.post_periods = panel.post_periods;
    for (int i = 0; i < panel.n_units(); ++i) {
        for (int t = 0; t < panel.n_periods(); ++t) {
            if (panel.treated(i, t) == 1) index.cells.push_back({i, t});
        }
    }
    return index;
}

int EffectIndex::horizon(int k) const {
    const Cell& cell = cells[static_cast<std::size_t>(k)];
    // Treatment is absorbing and cells are period-sorted within a unit, so the
    // unit's first cell is its adoption period.
    int adoption = cell.period;
    for (const auto& c : cells) {
        if (c.unit == cell.unit) {
            adoption = c.period;
            break;
        }
    }
    return cell.period - adoption + 1;
}

int EffectIndex::find(int unit, int period) const {
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k].unit == unit && cells[k].period == period) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

Eigen::MatrixXd EffectIndex::selector(int s) const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_units, size());
    int column = pre_periods + s - 1;
    for (int k = 0; k < size(); ++k) {
        if (cells[static_cast<std::size_t>(k)].period == column) {
            a(cells[static_cast<std::size_t>(k)].unit, k) = 1.0;
        }
    }
    return a;
}

Eigen::MatrixXi event_time(const Panel& panel) {
    Eigen::MatrixXi e(panel.n_units(), panel.n_periods());
    for (int i = 0; i < panel.n_units(); ++i) {
        int count = 0;
        for (int t = 0; t < panel.n_periods(); ++t) {
            count += panel.treated(i, t);
            e(i, t) = count;
        }
    }
    return e;
}

int event_count(const EffectIndex& index, int s) {
    int count = 0;
    for (int k = 0; k < index.size(); ++k) {
        if (index.horizon(k) == s) ++count;
    }
    return count;
}

Eigen::VectorXd att_weights(const EffectIndex& index, int s) {
    int n_s = event_count(index, s);
    if (n_s == 0) {
        fail(ErrorCode::EmptyEventTime,
             "no treated cell at event time " + std::to_string(s));
    }
    Eigen::VectorXd weights = Eigen::VectorXd::Zero(index.size());
    for (int k = 0; k < index.size(); ++k) {
        if (index.horizon(k) == s) weights(k) = 1.0 / n_s;
    }
    return weights;
}

HypothesisSpec att_hypothesis(const EffectIndex& index, int s, double value) {
    HypothesisSpec spec;
    spec.C = att_weights(index, s).transpose();
    spec.d = Eigen::VectorXd::Constant(1, value);
    std::ostringstream label;
    label << "ATT[s=" << s << "] = " << format_double(value);
    spec.label = label.str();
    return spec;
}

HypothesisSpec policy_contrast(const Panel& panel, const EffectIndex& index,
                               const std::vector<std::string>& group_a,
                               const std::vector<std::string>& group_b, int s) {
    auto resolve = [&](const std::vector<std::string>& labels, const char* name) {
        std::vector<int> ids;
        for (const auto& label : labels) {
            int i = panel.unit_index(label);
            if (i < 0) {
                fail(ErrorCode::InvalidInput,
                     std::string(name) + " names unknown unit '" + label + "'");
            }
            ids.push_back(i);
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return ids;
    };
    std::vector<int> a_ids = resolve(group_a, "group_a");
    std::vector<int> b_ids = resolve(group_b, "group_b");
    for (int i : a_ids) {
        if (std::binary_search(b_ids.begin(), b_ids.end(), i)) {
            fail(ErrorCode::OverlappingGroups,
                 "unit '" + panel.unit_ids[i] + "' appears in both groups");
        }
    }

    auto cells_at = [&](const std::vector<int>& ids) {
        std::vector<int> ks;
        for (int k = 0; k < index.size(); ++k) {
            if (index.horizon(k) == s &&
                std::binary_search(ids.begin(), ids.end(), index.cells[k].unit)) {
                ks.push_back(k);
            }
        }
        return ks;
    };
    std::vector<int> a_cells = cells_at(a_ids);
    std::vector<int> b_cells = cells_at(b_ids);
    if (a_cells.empty()) {
        fail(ErrorCode::EmptyGroup,
             "group_a has no treated cell at event time " + std::to_string(s));
    }
    if (b_cells.empty()) {
        fail(ErrorCode::EmptyGroup,
             "group_b has no treated cell at event time " + std::to_string(s));
    }

    HypothesisSpec spec;
    spec.C = Eigen::MatrixXd::Zero(1, index.size());
    for (int k : a_cells) spec.C(0, k) = 1.0 / static_cast<double>(a_cells.size());
    for (int k : b_cells) spec.C(0, k) -= 1.0 / static_cast<double>(b_cells.size());
    spec.d = Eigen::VectorXd::Zero(1);
    std::ostringstream label;
    label << "contrast[s=" << s << "]: mean(group_a) - mean(group_b) = 0";
    spec.label = label.str();
    return spec;
}

}  // namespace ssc
