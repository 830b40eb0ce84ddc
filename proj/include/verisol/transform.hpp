#ifndef VERISOL_TRANSFORM_HPP
#define VERISOL_TRANSFORM_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "verisol/model.hpp"

namespace verisol {

enum class EdgeRole {
    GuardEntry,
    Revert,
    NoRevert,
    BranchTrue,
    BranchFalse,
    LoopEnter,
    LoopExit,
    Statement,
    Complete, // empty action: the single edge from the entry state to t^to
    Fallback,
    Constructor,
    TimeLoop, // added by the time-guard rewrite, not by augmentation
};

std::string edge_role_name(EdgeRole r);

struct Provenance {
    std::string origin; // original transition name ("fallback", "constructor")
    EdgeRole role = EdgeRole::Statement;
    std::optional<StatementId> stmt;
    int label = 0; // 1-based, deterministic
};

struct AugmentedModel {
    ContractModel model; // same tuple shape; transitions carry fresh names
    std::map<std::string, Provenance> provenance; // transition name -> origin
    std::vector<std::string> added_states;
    std::vector<std::string> original_states;
    std::vector<Diagnostic> notes; // renames and similar warnings

    const Provenance *prov(const std::string &tname) const {
        auto it = provenance.find(tname);
        return it == provenance.end() ? nullptr : &it->second;
    }
    const Transition *by_label(int label) const;
    bool is_original_state(const std::string &s) const;
};

// Algorithm: one fallback self-loop per original state (when a fallback
// action exists), a fresh initial state s_I and a constructor transition
// into the old initial state.
struct ConformanceResult {
    ContractModel model;
    std::string injected_initial; // name chosen for s_I
    std::vector<Diagnostic> notes;
};
ConformanceResult conformance(const ContractModel &m);

// Expands one action statement between s_o and s_d with return target s_r.
// Exposed for tests; augment_model drives it for every transition.
struct AugmentStatementResult {
    std::vector<std::string> new_states;
    std::vector<Transition> transitions; // with provenance attached separately
    std::vector<Provenance> provenance;  // parallel to transitions
};
AugmentStatementResult augment_statement(const StmtPtr &action,
                                         const std::string &origin,
                                         const std::string &s_o,
                                         const std::string &s_d,
                                         const std::string &s_r,
                                         const ContractModel &scope);

// Conformance followed by the per-transition expansion with the upfront
// revert choice for actions that can raise.
AugmentedModel augment_model(const ContractModel &m);

// Conservative syntactic test: transfer, low-level call, send with a
// consumed result, division/modulo, or indexing into an array.
bool action_may_raise(const ContractModel &m, const Transition &t);

// Legend of numeric labels for reports and the atoms subcommand.
struct LegendRow {
    int label = 0;
    std::string transition;
    std::string origin;
    std::string role;
    std::string from;
    std::string to;
    std::string text; // guard or statement text, empty otherwise
};
std::vector<LegendRow> legend(const AugmentedModel &am);

} // namespace verisol

#endif
