#pragma once

#include "config.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nlsdist {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string summary;
    json measured = json::object();
    double seconds = 0.0;
};

struct CriterionInfo {
    int id;
    const char* name;
    const char* title;
};

const std::vector<CriterionInfo>& criteria();

// filter: empty selects all; otherwise a criterion id ("8") or a substring of its name
bool criterion_selected(const CriterionInfo& c, const std::string& filter);

struct VerifyReport {
    std::vector<CriterionResult> results;
    bool all_passed() const;
    std::vector<int> failed_ids() const;
    json to_json() const;
};

VerifyReport run_verification(const Config& cfg, const std::string& filter = {},
                              const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_result_line(const CriterionResult& r);

} // namespace nlsdist
