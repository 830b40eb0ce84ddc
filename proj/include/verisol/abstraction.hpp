#ifndef VERISOL_ABSTRACTION_HPP
#define VERISOL_ABSTRACTION_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "verisol/transform.hpp"
#include "verisol/values.hpp"

namespace verisol {

enum class VariableClass { Concrete, Abstract, Time };

std::string variable_class_name(VariableClass c);

// Taint classification over contract variables and action locals: anything
// (transitively) assigned from msg.*, a call result or a parameter is
// abstract; variables compared against now-derived expressions are time;
// the rest are concrete.
std::map<std::string, VariableClass>
classify_variables(const ContractModel &m);

// Time-guard rewrite: a lower bound `t >= c` gets the prologue `t = c + 1`
// on the guarded transition; an upper bound `t <= c` adds an invalidating
// self-loop `t = c + 1` at the source state. Labels for added loops continue
// after `first_free_label`.
struct TimeRewriteResult {
    ContractModel model;
    std::vector<Transition> added_loops;
    std::map<std::string, Provenance> loop_provenance;
    std::vector<Diagnostic> notes;
};
TimeRewriteResult rewrite_time_guards(const ContractModel &m,
                                      const std::map<std::string, VariableClass> &classes,
                                      int first_free_label);

// ----------------------------------------------------------------- Kripke

// State: control location, valuation of tracked (concrete) variables, and
// the label of the transition that produced it (0 = none, the initial
// state). `deadlock` marks non-final states with no enabled successor.
struct KripkeState {
    int control = 0;
    std::vector<std::pair<std::string, Value>> tracked; // sorted by name
    int last_label = 0;
    bool deadlock = false;
};

struct KripkeEdge {
    int from = 0;
    int to = 0;
    int label = 0;
};

struct Kripke {
    std::vector<std::string> control_names;
    std::vector<KripkeState> states;
    std::vector<KripkeEdge> edges;
    std::vector<std::vector<int>> succ; // state -> edge indices
    int initial = 0;
    std::set<int> final_controls;
    std::map<int, std::string> label_names; // label -> transition name
    std::vector<LegendRow> legend_rows;
    std::vector<std::string> demoted; // vars dropped by the 64-value cap
    std::vector<std::string> tracked_names;

    bool state_has_label(int state, int label) const {
        return states[state].last_label == label;
    }
};

struct KripkeBuildError {
    std::string message;
    std::size_t cap = 0;
};

struct KripkeResult {
    std::optional<Kripke> kripke;
    std::optional<KripkeBuildError> error;
    std::vector<Diagnostic> notes;
};

// Works on either the conformance-transformed model ("initial") or the
// fully augmented one; `provenance` may be empty for the former. Path
// locals survive across intermediate states and are dropped whenever an
// edge lands on an original state; `original_states` null means all are.
KripkeResult build_kripke(const ContractModel &m,
                          const std::map<std::string, Provenance> &provenance,
                          std::size_t state_cap,
                          const std::vector<std::string> *original_states = nullptr);

// Convenience drivers used by the CLI and tests.
KripkeResult build_initial_kripke(const ContractModel &m, std::size_t state_cap);
KripkeResult build_augmented_kripke(const AugmentedModel &am, std::size_t state_cap);

std::size_t default_state_cap(); // VERISOL_STATE_CAP or 1,000,000

} // namespace verisol

#endif
