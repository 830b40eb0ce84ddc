#ifndef VERISOL_CHECKER_HPP
#define VERISOL_CHECKER_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "verisol/abstraction.hpp"
#include "verisol/ctl.hpp"

namespace verisol {

// Atom valuation: which numeric labels make an atom true, plus the special
// deadlock atom.
struct AtomMap {
    std::map<std::string, std::set<int>> labels;
    bool has(const std::string &name) const { return labels.count(name) > 0; }
};

struct EvidenceStep {
    int state = 0;
    int label = 0; // label that led here; 0 for the first step
};

// A finite stem, optionally closed by a lasso back to `loop_start`.
struct Evidence {
    std::vector<EvidenceStep> steps;
    std::optional<std::size_t> loop_start;
};

struct CheckResult {
    bool holds = false;
    std::optional<Evidence> evidence; // engaged for violated properties
    std::size_t sat_count = 0;
};

// Explicit-state CTL model checking by fixpoint labeling.
CheckResult check(const Kripke &ks, const CtlPtr &formula, const AtomMap &atoms);

// AG !deadlock with a shortest witness path to a deadlocked state.
CheckResult check_deadlock(const Kripke &ks);

// Independent oracle: recursive evaluation with per-(formula,state)
// memoization and explicit graph searches. Rejects structures over
// 2000 states.
struct OracleResult {
    bool ok = false;    // evaluation performed
    bool holds = false; // verdict for the initial state
    std::string error;
};
OracleResult oracle_check(const Kripke &ks, const CtlPtr &formula,
                          const AtomMap &atoms);

// Replays evidence against the structure: every consecutive pair must be an
// edge with the recorded label, and the lasso must close.
bool evidence_is_valid(const Kripke &ks, const Evidence &ev);

std::string evidence_to_string(const Kripke &ks, const Evidence &ev);

} // namespace verisol

#endif
