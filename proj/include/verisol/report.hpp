#ifndef VERISOL_REPORT_HPP
#define VERISOL_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "verisol/abstraction.hpp"
#include "verisol/properties.hpp"

namespace verisol {

struct PropertyOutcome {
    std::string text;
    PropertyKind kind = PropertyKind::DirectCtl;
    std::string ctl;      // expanded formula over atom displays
    bool verified = false;
    bool on_augmented = false;
    std::vector<std::string> trace;       // label names along the evidence
    std::vector<int> trace_labels;        // numeric labels, 0 for initial
    std::optional<std::size_t> loop_start;
    double millis = 0.0;
    std::vector<Diagnostic> diagnostics;
};

struct DeadlockOutcome {
    bool checked = false;
    bool deadlock_free = false;
    std::vector<std::string> witness;
    std::vector<int> witness_labels;
};

struct VerifyOptions {
    std::size_t state_cap = 0; // 0: use default_state_cap()
    int jobs = 1;
    bool force_augment = false;
    std::vector<std::string> extra_properties;
};

struct VerifyReport {
    std::string contract;
    bool ok = false; // parse/validate/build all succeeded
    std::vector<Diagnostic> diagnostics;
    std::vector<PropertyOutcome> properties;
    DeadlockOutcome deadlock_initial;
    DeadlockOutcome deadlock_augmented;
    std::size_t states_initial = 0;
    std::size_t states_augmented = 0; // 0 when augmentation was not needed
    bool augmented_built = false;
    double total_millis = 0.0;
    std::vector<LegendRow> legend_rows;

    bool all_verified_and_live() const;
};

VerifyReport run_verify(const std::string &source, const VerifyOptions &opts);

std::string report_to_json(const VerifyReport &r);
std::string report_to_table(const VerifyReport &r);

} // namespace verisol

#endif
