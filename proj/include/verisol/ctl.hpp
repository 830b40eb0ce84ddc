#ifndef VERISOL_CTL_HPP
#define VERISOL_CTL_HPP

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "verisol/diagnostics.hpp"

namespace verisol {

struct Ctl;
using CtlPtr = std::shared_ptr<const Ctl>;

enum class CtlUnary { Not, EX, AX, EF, AF, EG, AG };
enum class CtlBinary { And, Or, Implies, EU, AU, EW, AW };

struct CtlAtom {
    std::string name;
};
struct CtlConst {
    bool value;
};
struct CtlUnaryNode {
    CtlUnary op;
    CtlPtr operand;
};
struct CtlBinaryNode {
    CtlBinary op;
    CtlPtr lhs;
    CtlPtr rhs;
};

struct Ctl {
    std::variant<CtlAtom, CtlConst, CtlUnaryNode, CtlBinaryNode> node;
};

CtlPtr ctl_atom(std::string name);
CtlPtr ctl_const(bool v);
CtlPtr ctl_un(CtlUnary op, CtlPtr e);
CtlPtr ctl_bin(CtlBinary op, CtlPtr l, CtlPtr r);

// Canonical rendering, e.g. AG(q -> AG(!p)) and A[!p W q].
std::string ctl_to_string(const Ctl &f);

struct CtlParseResult {
    CtlPtr formula;
    std::vector<Diagnostic> diagnostics;
};
// Accepts the canonical surface syntax: atoms, ! & | ->, AX..EG, A[p U q],
// E[p W q], parentheses.
CtlParseResult parse_ctl(const std::string &text);

// Atoms appearing in the formula, left to right, without duplicates.
std::vector<std::string> ctl_atoms(const Ctl &f);

} // namespace verisol

#endif
