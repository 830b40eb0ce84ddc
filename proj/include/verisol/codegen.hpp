#ifndef VERISOL_CODEGEN_HPP
#define VERISOL_CODEGEN_HPP

#include <string>
#include <vector>

#include "verisol/abstraction.hpp"
#include "verisol/checker.hpp"
#include "verisol/ctl.hpp"
#include "verisol/model.hpp"

namespace verisol {

// Solidity text per the generation template: States enum with InTransition
// first, variable block, constructor, fallback, one function per transition
// with the source-state and guard requires; non-empty actions run behind
// state = States.InTransition and nested returns restore the target first.
std::string emit_solidity(const ContractModel &m);

// BIP atom: data lines per variable, one synPort and one `on` clause per
// transition, places and the initial clause with the constructor action.
std::string emit_bip(const ContractModel &m);

// NuSMV module over the abstract structure: one `loc` enum for control and
// tracked valuation, one `lastlab` enum mirroring the last-label decoration,
// TRANS as an edge disjunction, a deadlock DEFINE, plus one CTLSPEC per
// supplied formula (already resolved to lastlab atoms).
struct NusmvSpec {
    std::string comment;
    std::string formula; // rendered over lastlab equalities
};
std::string emit_nusmv(const Kripke &ks, const std::vector<NusmvSpec> &specs);

// CTL over resolved atoms in NuSMV syntax: atoms become lastlab equalities
// and weak-until forms are expanded, since NuSMV has no W.
std::string nusmv_formula(const CtlPtr &f, const AtomMap &atoms);

} // namespace verisol

#endif
