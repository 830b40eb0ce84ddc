#ifndef VERISOL_PROPERTIES_HPP
#define VERISOL_PROPERTIES_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "verisol/checker.hpp"
#include "verisol/ctl.hpp"
#include "verisol/transform.hpp"

namespace verisol {

enum class PropertyKind {
    CannotAfter,     // p cannot happen after q
    OnlyAfter,       // p can happen only after q
    IfThenOnlyAfter, // if p happens, q can happen only after r happens
    CanNever,        // p can never happen
    NeverBefore,     // p can never happen before q
    EventuallyAfter, // p will eventually happen after q
    Eventually,      // p will eventually happen
    DirectCtl,       // raw CTL text
};

std::string property_kind_name(PropertyKind k);
bool property_is_liveness(PropertyKind k);

// One operand of a template: a transition name or transition.statement-text.
struct PropertyAtom {
    std::string transition;
    std::string statement_text; // empty for transition atoms
    bool is_statement() const { return !statement_text.empty(); }
    std::string display() const;
};

struct PropertySpec {
    PropertyKind kind = PropertyKind::DirectCtl;
    std::vector<PropertyAtom> p, q, r;
    std::string raw_text;
    CtlPtr direct; // engaged for DirectCtl
    bool needs_statement_atoms() const;
};

struct PropertyParseResult {
    std::optional<PropertySpec> spec;
    std::vector<Diagnostic> diagnostics;
};
PropertyParseResult parse_property(const std::string &text);

// Template expansion into CTL over placeholder atom names a0, a1, ...; the
// returned atom order matches `placeholders`.
struct BuiltProperty {
    CtlPtr formula;
    std::vector<PropertyAtom> placeholders; // atom ai = placeholders[i]
};
BuiltProperty to_ctl(const PropertySpec &spec);

// Resolve property atoms against a structure. On an augmented model a
// transition-name atom is the guard-entry edge of that transition (fallback
// matches every fallback loop); a statement atom matches every augmented
// edge carrying a statement with the same normalized token sequence. On an
// unaugmented model transition names match their own edges and statement
// atoms are rejected.
struct ResolveResult {
    AtomMap atoms;
    std::vector<Diagnostic> diagnostics;
};
ResolveResult resolve_atoms(const BuiltProperty &bp, const Kripke &ks,
                            const AugmentedModel *am);

} // namespace verisol

#endif
