#pragma once

#include <string>
#include <vector>

#include "ssc/dgp.hpp"
#include "ssc/mc.hpp"

namespace ssc {

/// A simulation study: design, plan, and test settings, plus the
/// replication count.
struct StudyConfig {
    FactorDGP dgp;
    TreatmentPlan plan;
    McSettings settings;
    int reps = 1000;
};

/// Parses `key = value` study text ('#' starts a comment). Later assignments
/// win, which is how command-line overrides are layered on. Unknown keys and
/// malformed values raise InvalidConfig.
StudyConfig parse_study_config(const std::string& text,
                               const std::vector<std::string>& overrides = {});

/// Reads and parses a study file.
StudyConfig load_study_config(const std::string& path,
                              const std::vector<std::string>& overrides = {});

}  // namespace ssc
