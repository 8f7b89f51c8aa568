#pragma once

#include "bvpair/bv.hpp"
#include "bvpair/dm_field.hpp"
#include "bvpair/error.hpp"
#include "bvpair/radial.hpp"
#include "bvpair/theorems.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bvpair {

struct CheckInfo {
    std::string name;
    std::string anchor;  // the statement the check verifies
    bool radial = false; // ball scenarios only
};
const std::vector<CheckInfo>& check_registry();
const CheckInfo* find_check(const std::string& name);

struct CheckSpec {
    std::string id;     // unique within the scenario; defaults to the check name
    std::string check;  // registry name
    bool expect_fail = false;
    std::optional<double> tolerance;
    nlohmann::json params;
    std::string pointer;  // JSON pointer of the entry, for messages
};

// Declarative scenario: an interval with a field, a function, a selector
// and test functions, or a ball with radial profiles.
struct Scenario {
    std::string name;
    bool ball = false;
    Rational lo;
    Rational hi;
    int dimension = 1;
    std::optional<DMField1D> field;
    std::optional<PiecewiseBV> function;
    std::optional<RadialProfile> radial_field;
    std::optional<RadialProfile> radial_function;
    LambdaSelector selector;
    std::string selector_family;  // "", "lsc" or "usc": resolved against the field
    std::vector<PiecewisePoly> test_functions;
    std::optional<SequenceSpec> sequence;
    std::vector<CheckSpec> checks;

    LambdaSelector resolved_selector() const;
};

// Throws Error(Parse) with the offending JSON pointer or text offset.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

struct RunOptions {
    double tolerance = 1e-9;
    int jobs = 1;
};

struct CheckOutcome {
    CheckSpec spec;
    std::optional<CheckReport> report;
    std::optional<ErrorCode> error;
    std::string message;
    bool ok = false;           // met its expectation
    bool unsupported = false;  // failed on an unsupported construct
};

struct RunResult {
    std::string scenario;
    std::vector<CheckOutcome> outcomes;  // sorted by id
    int exit_code = 0;
    std::string text;
    nlohmann::json json;
    std::map<std::string, std::string> csv;  // file name -> contents
};

RunResult run_scenario(const Scenario& s, const RunOptions& opt = {});
// Writes <name>.txt, <name>.json and the CSV series into dir.
void write_reports(const RunResult& r, const std::string& dir);

std::string list_checks_text();

// Exit statuses of the runner.
constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitParse = 2;
constexpr int kExitUnsupported = 3;
bool is_unsupported(ErrorCode c);

} // namespace bvpair
