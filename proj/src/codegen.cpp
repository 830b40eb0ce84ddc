#include "verisol/codegen.hpp"

#include <sstream>

namespace verisol {

// ----------------------------------------------------------------- solidity

namespace {

ExprPtr states_member(const std::string &state) {
    ExprPtr base = make_expr(Expr{Ident{"States"}, {}});
    return make_expr(Expr{Member{std::move(base), state}, {}});
}

// Every return inside the action first restores the destination state.
StmtPtr safe_action(const StmtPtr &s, const std::string &target) {
    if (!s) return s;
    if (std::holds_alternative<ReturnStmt>(s->node)) {
        ExprPtr setter = make_expr(Expr{
            Assign{AssignOp::Assign, make_expr(Expr{Ident{"state"}, {}}),
                   states_member(target)},
            {}});
        CompoundStmt c;
        c.stmts.push_back(make_stmt(Stmt{ExprStmt{std::move(setter)}, {}}));
        c.stmts.push_back(s);
        return make_stmt(Stmt{std::move(c), s->span});
    }
    if (auto *i = std::get_if<IfStmt>(&s->node))
        return make_stmt(Stmt{
            IfStmt{i->cond, safe_action(i->then_branch, target),
                   i->else_branch ? safe_action(i->else_branch, target)
                                  : nullptr},
            s->span});
    if (auto *w = std::get_if<WhileStmt>(&s->node))
        return make_stmt(
            Stmt{WhileStmt{w->cond, safe_action(w->body, target)}, s->span});
    if (auto *f = std::get_if<ForStmt>(&s->node))
        return make_stmt(Stmt{
            ForStmt{f->init, f->cond, f->post, safe_action(f->body, target)},
            s->span});
    if (auto *c = std::get_if<CompoundStmt>(&s->node)) {
        CompoundStmt out;
        for (const auto &st : c->stmts)
            out.stmts.push_back(safe_action(st, target));
        return make_stmt(Stmt{std::move(out), s->span});
    }
    return s;
}

bool empty_action(const StmtPtr &s) {
    if (!s) return true;
    if (auto *c = std::get_if<CompoundStmt>(&s->node)) return c->stmts.empty();
    return false;
}

// body of a statement at one indent level, unwrapping a top-level compound
void emit_action_body(std::ostringstream &os, const StmtPtr &a, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    if (auto *c = std::get_if<CompoundStmt>(&a->node)) {
        for (const auto &st : c->stmts)
            os << pad << stmt_to_string(*st, indent) << "\n";
        return;
    }
    os << pad << stmt_to_string(*a, indent) << "\n";
}

void emit_action(std::ostringstream &os, const StmtPtr &a,
                 const std::string &target, int indent) {
    if (empty_action(a)) return;
    std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    os << pad << "state = States.InTransition;\n";
    emit_action_body(os, safe_action(a, target), indent);
}

std::string params_text(const std::vector<Param> &ps) {
    std::string out;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) out += ", ";
        out += type_to_string(*ps[i].type) + " " + ps[i].name;
    }
    return out;
}

} // namespace

std::string emit_solidity(const ContractModel &m) {
    std::ostringstream os;
    os << "pragma solidity ^0.4.24;\n\n";
    os << "contract " << m.name << " {\n";

    os << "    enum States {\n        InTransition";
    for (const auto &s : m.states) os << ",\n        " << s;
    os << "\n    }\n";
    os << "    States private state;\n\n";

    for (const auto &sd : m.structs) {
        os << "    struct " << sd.name << " {\n";
        for (const auto &f : sd.fields)
            os << "        " << type_to_string(*f.type) << " " << f.name
               << ";\n";
        os << "    }\n";
    }
    for (const auto &ev : m.events)
        os << "    event " << ev.name << "(" << params_text(ev.params)
           << ");\n";
    if (!m.structs.empty() || !m.events.empty()) os << "\n";

    for (const auto &v : m.vars)
        os << "    " << type_to_string(*v.type) << " private " << v.name
           << ";\n";
    os << "    uint private creationTime = now;\n\n";

    os << "    constructor() public {\n";
    emit_action(os, m.constructor_action, m.initial, 2);
    os << "        state = States." << m.initial << ";\n";
    os << "    }\n";

    if (m.fallback_action) {
        os << "\n    function () public payable {\n";
        os << "        States currentState = state;\n";
        if (!empty_action(m.fallback_action)) {
            // fallback restores whatever state it started in
            os << "        state = States.InTransition;\n";
            emit_action_body(os, m.fallback_action, 2);
        }
        os << "        state = currentState;\n";
        os << "    }\n";
    }

    for (const auto &t : m.transitions) {
        os << "\n    function " << t.name << "(" << params_text(t.params)
           << ") public";
        if (t.payable) os << " payable";
        if (t.returns) os << " returns (" << type_to_string(*t.returns) << ")";
        os << " {\n";
        os << "        require(state == States." << t.from << ");\n";
        if (t.guard)
            os << "        require(" << expr_to_string(*t.guard) << ");\n";
        emit_action(os, t.action, t.to, 2);
        os << "        state = States." << t.to << ";\n";
        os << "    }\n";
    }

    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------- bip

namespace {

std::string stmt_oneline(const Stmt &s) {
    std::string text = stmt_to_string(s, 0);
    std::string out;
    bool space = false;
    for (char c : text) {
        if (c == '\n' || c == ' ' || c == '\t') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

std::string action_oneline(const StmtPtr &a) {
    if (!a) return "";
    if (auto *c = std::get_if<CompoundStmt>(&a->node)) {
        std::string out;
        for (const auto &st : c->stmts) {
            if (!out.empty()) out += ' ';
            out += stmt_oneline(*st);
        }
        return out;
    }
    return stmt_oneline(*a);
}

} // namespace

std::string emit_bip(const ContractModel &m) {
    std::ostringstream os;
    os << "atom type Contract()\n";
    for (const auto &v : m.vars)
        os << "  data " << type_to_string(*v.type) << " " << v.name << "\n";
    // creationTime is implicit in the model; declare it only when used
    std::string rendered;
    for (const auto &t : m.transitions) {
        if (t.guard) rendered += expr_to_string(*t.guard) + "\n";
        if (t.action) rendered += stmt_to_string(*t.action) + "\n";
    }
    if (m.constructor_action) rendered += stmt_to_string(*m.constructor_action);
    bool uses_creation = false;
    for (const auto &tok : normalize_tokens(rendered))
        if (tok == kCreationTime) uses_creation = true;
    if (uses_creation) os << "  data uint " << kCreationTime << "\n";
    for (const auto &t : m.transitions)
        os << "  export port synPort " << t.name << "()\n";
    os << "  places ";
    for (std::size_t i = 0; i < m.states.size(); ++i) {
        if (i) os << ", ";
        os << m.states[i];
    }
    os << "\n";
    os << "  initial to " << m.initial;
    if (!empty_action(m.constructor_action))
        os << " do { " << action_oneline(m.constructor_action) << " }";
    os << "\n";
    for (const auto &t : m.transitions) {
        os << "  on " << t.name << " from " << t.from << " to " << t.to;
        if (t.guard) os << " provided (" << expr_to_string(*t.guard) << ")";
        if (!empty_action(t.action))
            os << " do { " << action_oneline(t.action) << " }";
        os << "\n";
    }
    os << "end\n";
    return os.str();
}

// -------------------------------------------------------------------- nusmv

namespace {

std::string loc_name(std::size_t i) { return "k" + std::to_string(i); }

} // namespace

std::string emit_nusmv(const Kripke &ks, const std::vector<NusmvSpec> &specs) {
    std::ostringstream os;
    os << "MODULE main\n";
    os << "VAR\n  loc : {";
    for (std::size_t i = 0; i < ks.states.size(); ++i) {
        if (i) os << ", ";
        os << loc_name(i);
    }
    os << "};\n";

    os << "DEFINE\n  lastlab :=\n    case\n";
    for (std::size_t i = 0; i < ks.states.size(); ++i)
        os << "      loc = " << loc_name(i) << " : "
           << ks.states[i].last_label << ";\n";
    os << "    esac;\n";

    bool any_deadlock = false;
    os << "  deadlock := ";
    {
        std::string set;
        for (std::size_t i = 0; i < ks.states.size(); ++i) {
            if (!ks.states[i].deadlock) continue;
            if (any_deadlock) set += ", ";
            set += loc_name(i);
            any_deadlock = true;
        }
        if (any_deadlock) os << "loc in {" << set << "};\n";
        else os << "FALSE;\n";
    }

    os << "ASSIGN\n  init(loc) := " << loc_name(ks.initial) << ";\n";

    os << "TRANS\n";
    bool first = true;
    for (std::size_t i = 0; i < ks.states.size(); ++i) {
        if (ks.succ[i].empty()) {
            os << (first ? "    " : "  | ") << "(loc = " << loc_name(i)
               << " & next(loc) = " << loc_name(i) << ")\n";
            first = false;
            continue;
        }
        for (int ei : ks.succ[i]) {
            const KripkeEdge &e = ks.edges[ei];
            os << (first ? "    " : "  | ") << "(loc = " << loc_name(e.from)
               << " & next(loc) = " << loc_name(e.to) << ")\n";
            first = false;
        }
    }
    if (first) os << "    FALSE\n";

    os << "\n-- state legend: loc -> control [valuation] (lastlab)\n";
    for (std::size_t i = 0; i < ks.states.size(); ++i) {
        const KripkeState &s = ks.states[i];
        os << "-- " << loc_name(i) << ": " << ks.control_names[s.control];
        if (!s.tracked.empty()) {
            os << " [";
            bool f2 = true;
            for (const auto &[n, v] : s.tracked) {
                if (!f2) os << ", ";
                f2 = false;
                os << n << "=" << value_to_string(v);
            }
            os << "]";
        }
        os << " (" << s.last_label << ")\n";
    }
    os << "-- label legend: number -> transition\n";
    for (const auto &[l, n] : ks.label_names)
        os << "-- " << l << ": " << n << "\n";

    for (const auto &sp : specs) {
        os << "\n";
        if (!sp.comment.empty()) os << "-- " << sp.comment << "\n";
        os << "CTLSPEC " << sp.formula << "\n";
    }
    return os.str();
}

namespace {

std::string atom_to_nusmv(const std::string &name, const AtomMap &atoms) {
    auto it = atoms.labels.find(name);
    if (it == atoms.labels.end()) {
        if (name == "deadlock") return "deadlock";
        return "FALSE";
    }
    if (it->second.empty()) return "FALSE";
    std::string out;
    for (int l : it->second) {
        if (!out.empty()) out += " | ";
        out += "lastlab = " + std::to_string(l);
    }
    if (it->second.size() > 1) return "(" + out + ")";
    return out;
}

std::string rec_nusmv(const CtlPtr &f, const AtomMap &atoms) {
    if (auto *a = std::get_if<CtlAtom>(&f->node))
        return atom_to_nusmv(a->name, atoms);
    if (auto *c = std::get_if<CtlConst>(&f->node))
        return c->value ? "TRUE" : "FALSE";
    if (auto *u = std::get_if<CtlUnaryNode>(&f->node)) {
        std::string g = rec_nusmv(u->operand, atoms);
        switch (u->op) {
        case CtlUnary::Not: return "!(" + g + ")";
        case CtlUnary::EX: return "EX (" + g + ")";
        case CtlUnary::AX: return "AX (" + g + ")";
        case CtlUnary::EF: return "EF (" + g + ")";
        case CtlUnary::AF: return "AF (" + g + ")";
        case CtlUnary::EG: return "EG (" + g + ")";
        case CtlUnary::AG: return "AG (" + g + ")";
        }
    }
    const auto &b = std::get<CtlBinaryNode>(f->node);
    std::string l = rec_nusmv(b.lhs, atoms);
    std::string r = rec_nusmv(b.rhs, atoms);
    switch (b.op) {
    case CtlBinary::And: return "(" + l + " & " + r + ")";
    case CtlBinary::Or: return "(" + l + " | " + r + ")";
    case CtlBinary::Implies: return "(" + l + " -> " + r + ")";
    case CtlBinary::EU: return "E [ " + l + " U " + r + " ]";
    case CtlBinary::AU: return "A [ " + l + " U " + r + " ]";
    case CtlBinary::EW:
        // E[p W q] = EG p | E[p U q]
        return "(EG (" + l + ") | E [ " + l + " U " + r + " ])";
    case CtlBinary::AW:
        // A[p W q] = !E[!q U (!p & !q)]
        return "!(E [ !(" + r + ") U (!(" + l + ") & !(" + r + ")) ])";
    }
    return "FALSE";
}

} // namespace

std::string nusmv_formula(const CtlPtr &f, const AtomMap &atoms) {
    if (!f) return "TRUE";
    return rec_nusmv(f, atoms);
}

} // namespace verisol
