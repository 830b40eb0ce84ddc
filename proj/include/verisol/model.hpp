#ifndef VERISOL_MODEL_HPP
#define VERISOL_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "verisol/ast.hpp"
#include "verisol/diagnostics.hpp"

namespace verisol {

struct Param {
    TypePtr type;
    std::string name;
};

struct Transition {
    std::string name;
    std::vector<Param> params;
    std::string from;
    std::string to;
    bool payable = false;
    TypePtr returns; // null when the transition returns nothing
    ExprPtr guard;   // null means true
    StmtPtr action;  // null means empty
};

struct EventDef {
    std::string name;
    std::vector<Param> params;
};

struct StructDef {
    std::string name;
    std::vector<Param> fields;
};

struct VarDef {
    TypePtr type;
    std::string name;
};

// The time variable every contract carries implicitly (set to `now` at
// deployment; the Solidity backend emits it verbatim).
inline const char *kCreationTime = "creationTime";

struct ContractModel {
    std::string name;
    std::vector<std::string> states;
    std::string initial;
    std::vector<std::string> finals;
    std::vector<StructDef> structs;
    std::vector<EventDef> events;
    std::vector<VarDef> vars;
    StmtPtr constructor_action; // a0, may be null
    StmtPtr fallback_action;    // aF, may be null
    std::vector<Transition> transitions;
    std::vector<std::string> property_texts;

    const Transition *find_transition(const std::string &n) const;
    const StructDef *find_struct(const std::string &n) const;
    const EventDef *find_event(const std::string &n) const;
    const VarDef *find_var(const std::string &n) const;
    bool is_state(const std::string &n) const;
    bool is_final(const std::string &n) const;
};

// Structural well-formedness: state references, unique names, guard purity,
// scoped identifier resolution, event/struct arity, return consistency.
std::vector<Diagnostic> validate(const ContractModel &m);

// Render the model back to DSL text (used by `augment` and round-trip tests).
std::string model_to_dsl(const ContractModel &m);

} // namespace verisol

#endif
