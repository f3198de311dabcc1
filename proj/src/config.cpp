#include "ssc/config.hpp"

#include <algorithm>
#include <sstream>

#include "ssc/errors.hpp"
#include "ssc/table.hpp"

namespace ssc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

// Malformed numbers surface as InvalidConfig, not the table reader's own
// parse error, so callers see one error family for all config problems.
double config_double(const std::string& value, const std::string& key) {
    try {
        return parse_double(value, "key " + key);
    } catch (const Error& e) {
        fail(ErrorCode::InvalidConfig, e.what());
    }
}

long config_long(const std::string& value, const std::string& key) {
    try {
        return parse_long(value, "key " + key);
    } catch (const Error& e) {
        fail(ErrorCode::InvalidConfig, e.what());
    }
}

std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
    std::vector<double> out;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        out.push_back(config_double(trim(item), key));
    }
    if (out.empty()) {
        fail(ErrorCode::InvalidConfig, "key " + key + " has an empty list");
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key) {
    std::vector<int> out;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        out.push_back(static_cast<int>(config_long(trim(item), key)));
    }
    if (out.empty()) {
        fail(ErrorCode::InvalidConfig, "key " + key + " has an empty list");
    }
    return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
    fail(ErrorCode::InvalidConfig,
         "key " + key + ": got '" + value + "', expected " + expected);
}

}  // namespace

StudyConfig parse_study_config(const std::string& text,
                               const std::vector<std::string>& overrides) {
    // First pass: collect assignments in order (later wins).
    std::vector<std::pair<std::string, std::string>> assignments;
    std::stringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::InvalidConfig,
                 "line " + std::to_string(line_no) + ": expected key = value");
        }
        assignments.emplace_back(trim(line.substr(0, eq)),
                                 trim(line.substr(eq + 1)));
    }
    for (const auto& item : overrides) {
        std::size_t eq = item.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::InvalidConfig,
                 "override '" + item + "': expected key=value");
        }
        assignments.emplace_back(trim(item.substr(0, eq)),
                                 trim(item.substr(eq + 1)));
    }

    StudyConfig config;
    // Design defaults are applied when `design` is seen, so explicit factor
    // keys must come after it to stick; overrides always come last.
    bool adoption_seen = false;
    for (const auto& [key, value] : assignments) {
        if (key == "design") {
            if (value == "st") {
                config.dgp.ar_coeffs = {0.5, 0.8};
                config.dgp.stationary_sd = {1.0, 1.0};
                config.dgp.n_random_walk = 0;
                config.dgp.walk_sd = {};
            } else if (value == "co") {
                config.dgp.ar_coeffs = {0.5};
                config.dgp.stationary_sd = {1.0};
                config.dgp.n_random_walk = 1;
                config.dgp.walk_sd = {1.0};
            } else {
                bad_value(key, value, "st or co");
            }
        } else if (key == "units") {
            config.dgp.n_units = static_cast<int>(config_long(value, key));
        } else if (key == "pre_periods") {
            config.dgp.pre_periods = static_cast<int>(config_long(value, key));
        } else if (key == "post_periods") {
            config.dgp.post_periods = static_cast<int>(config_long(value, key));
        } else if (key == "ar_coeffs") {
            config.dgp.ar_coeffs = parse_double_list(value, key);
        } else if (key == "stationary_sd") {
            config.dgp.stationary_sd = parse_double_list(value, key);
        } else if (key == "walks") {
            config.dgp.n_random_walk = static_cast<int>(config_long(value, key));
        } else if (key == "walk_sd") {
            config.dgp.walk_sd = parse_double_list(value, key);
        } else if (key == "noise_sd") {
            config.dgp.noise_sd = config_double(value, key);
        } else if (key == "adoption") {
            config.plan.adoption = parse_int_list(value, key);
            adoption_seen = true;
        } else if (key == "effect") {
            if (value == "linear") {
                config.plan.kind = TreatmentPlan::EffectKind::Linear;
            } else if (value == "constant") {
                config.plan.kind = TreatmentPlan::EffectKind::Constant;
            } else {
                bad_value(key, value, "linear or constant");
            }
        } else if (key == "delta") {
            config.plan.delta = config_double(value, key);
        } else if (key == "reps") {
            config.reps = static_cast<int>(config_long(value, key));
        } else if (key == "alpha") {
            config.settings.alpha = config_double(value, key);
        } else if (key == "mode") {
            if (value == "plugin") {
                config.settings.mode = EstimatorMode::PlugIn;
            } else if (value == "leave_half_out") {
                config.settings.mode = EstimatorMode::LeaveHalfOut;
            } else {
                bad_value(key, value, "plugin or leave_half_out");
            }
        } else if (key == "normalization") {
            if (value == "paper") {
                config.settings.normalization = Normalization::Paper;
            } else if (value == "empirical") {
                config.settings.normalization = Normalization::Empirical;
            } else {
                bad_value(key, value, "paper or empirical");
            }
        } else if (key == "test_horizon") {
            config.settings.test_horizon = static_cast<int>(config_long(value, key));
        } else if (key == "null") {
            if (value == "true_value") {
                config.settings.null_at_zero = false;
            } else if (value == "zero") {
                config.settings.null_at_zero = true;
            } else {
                bad_value(key, value, "true_value or zero");
            }
        } else if (key == "null_shift") {
            config.settings.null_shift = config_double(value, key);
        } else if (key == "ci") {
            if (value == "on") {
                config.settings.run_ci = true;
            } else if (value == "off") {
                config.settings.run_ci = false;
            } else {
                bad_value(key, value, "on or off");
            }
        } else if (key == "ci_points") {
            config.settings.ci_points = static_cast<int>(config_long(value, key));
        } else if (key == "rcond_min") {
            config.settings.rcond_min = config_double(value, key);
        } else if (key == "fit_tol") {
            config.settings.fit_tol = config_double(value, key);
        } else {
            fail(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
        }
    }

    if (!adoption_seen) {
        fail(ErrorCode::InvalidConfig, "study config must set `adoption`");
    }
    if (config.reps < 1) {
        fail(ErrorCode::InvalidConfig, "reps must be positive");
    }
    if (!(config.settings.alpha > 0.0 && config.settings.alpha < 1.0)) {
        fail(ErrorCode::InvalidConfig, "alpha must lie strictly between 0 and 1");
    }
    if (config.settings.ci_points < 2) {
        fail(ErrorCode::InvalidConfig, "ci_points must be at least 2");
    }
    validate_dgp(config.dgp);
    validate_plan(config.dgp, config.plan);
    return config;
}

StudyConfig load_study_config(const std::string& path,
                              const std::vector<std::string>& overrides) {
    return parse_study_config(read_text_file(path), overrides);
}

}  // namespace ssc
