#include "verisol/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace verisol {

const Transition *ContractModel::find_transition(const std::string &n) const {
    for (const auto &t : transitions)
        if (t.name == n) return &t;
    return nullptr;
}
const StructDef *ContractModel::find_struct(const std::string &n) const {
    for (const auto &s : structs)
        if (s.name == n) return &s;
    return nullptr;
}
const EventDef *ContractModel::find_event(const std::string &n) const {
    for (const auto &e : events)
        if (e.name == n) return &e;
    return nullptr;
}
const VarDef *ContractModel::find_var(const std::string &n) const {
    for (const auto &v : vars)
        if (v.name == n) return &v;
    return nullptr;
}
bool ContractModel::is_state(const std::string &n) const {
    return std::find(states.begin(), states.end(), n) != states.end();
}
bool ContractModel::is_final(const std::string &n) const {
    return std::find(finals.begin(), finals.end(), n) != finals.end();
}

// ------------------------------------------------------------- validation

namespace {

const std::set<std::string> kBaseTypes = {
    "uint",   "uint8",  "uint16", "uint32",  "uint64", "uint128",
    "uint256", "int",   "int8",   "int16",   "int32",  "int64",
    "int128", "int256", "bool",   "address", "bytes32"};

struct Checker {
    const ContractModel &m;
    std::vector<Diagnostic> diags;
    std::vector<std::set<std::string>> scopes;

    void error(const std::string &code, const std::string &msg, Span sp = {}) {
        diags.push_back({Severity::Error, code, msg, sp});
    }

    bool type_known(const Type &t) {
        if (auto *n = std::get_if<NamedType>(&t.node))
            return kBaseTypes.count(n->name) || m.find_struct(n->name);
        if (auto *mp = std::get_if<MappingType>(&t.node))
            return type_known(*mp->key) && type_known(*mp->value);
        return type_known(*std::get<ArrayType>(t.node).elem);
    }

    bool in_scope(const std::string &name) {
        if (name == kCreationTime) return true;
        if (m.find_var(name)) return true;
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it)
            if (it->count(name)) return true;
        return false;
    }

    void check_expr(const Expr &e, const std::string &where) {
        if (auto *id = std::get_if<Ident>(&e.node)) {
            if (!in_scope(id->name) && !m.find_struct(id->name))
                error("unresolved-name",
                      "unknown identifier '" + id->name + "' in " + where, e.span);
            return;
        }
        if (auto *u = std::get_if<Unary>(&e.node)) {
            check_expr(*u->operand, where);
            return;
        }
        if (auto *b = std::get_if<Binary>(&e.node)) {
            check_expr(*b->lhs, where);
            check_expr(*b->rhs, where);
            return;
        }
        if (auto *a = std::get_if<Assign>(&e.node)) {
            check_expr(*a->target, where);
            check_expr(*a->value, where);
            return;
        }
        if (auto *ix = std::get_if<Index>(&e.node)) {
            check_expr(*ix->base, where);
            check_expr(*ix->index, where);
            return;
        }
        if (auto *mem = std::get_if<Member>(&e.node)) {
            check_expr(*mem->base, where);
            return;
        }
        if (auto *c = std::get_if<CallExpr>(&e.node)) {
            if (c->base) check_expr(*c->base, where);
            for (const auto &a : c->args) check_expr(*a, where);
            if (c->kind == CallKind::Internal) {
                const StructDef *sd = m.find_struct(c->name);
                if (!sd) {
                    error("unknown-call",
                          "'" + c->name + "' is not a struct or builtin", e.span);
                } else if (sd->fields.size() != c->args.size()) {
                    error("struct-arity",
                          "struct " + c->name + " expects " +
                              std::to_string(sd->fields.size()) + " fields, got " +
                              std::to_string(c->args.size()),
                          e.span);
                }
            }
            return;
        }
    }

    void check_stmt(const Stmt &s, bool returns_value, const std::string &where) {
        if (auto *d = std::get_if<VarDeclStmt>(&s.node)) {
            if (!type_known(*d->type))
                error("unknown-type",
                      "unknown type '" + type_to_string(*d->type) + "'", s.span);
            if (d->init) check_expr(*d->init, where);
            if (in_scope(d->name))
                error("shadow", "declaration of '" + d->name +
                                    "' shadows an existing binding", s.span);
            scopes.back().insert(d->name);
            return;
        }
        if (auto *e = std::get_if<ExprStmt>(&s.node)) {
            check_expr(*e->expr, where);
            return;
        }
        if (auto *em = std::get_if<EmitStmt>(&s.node)) {
            const EventDef *ev = m.find_event(em->event);
            if (!ev) {
                error("unknown-event", "unknown event '" + em->event + "'", s.span);
            } else if (ev->params.size() != em->args.size()) {
                error("event-arity",
                      "event " + em->event + " expects " +
                          std::to_string(ev->params.size()) + " arguments, got " +
                          std::to_string(em->args.size()),
                      s.span);
            }
            for (const auto &a : em->args) check_expr(*a, where);
            return;
        }
        if (auto *r = std::get_if<ReturnStmt>(&s.node)) {
            if (r->value) {
                if (!returns_value)
                    error("return-mismatch",
                          where + " returns nothing but has 'return <expr>'",
                          s.span);
                check_expr(*r->value, where);
            } else if (returns_value) {
                error("return-mismatch",
                      where + " declares a return type but has bare 'return'",
                      s.span);
            }
            return;
        }
        if (auto *i = std::get_if<IfStmt>(&s.node)) {
            check_expr(*i->cond, where);
            scopes.emplace_back();
            check_stmt(*i->then_branch, returns_value, where);
            scopes.pop_back();
            if (i->else_branch) {
                scopes.emplace_back();
                check_stmt(*i->else_branch, returns_value, where);
                scopes.pop_back();
            }
            return;
        }
        if (auto *w = std::get_if<WhileStmt>(&s.node)) {
            check_expr(*w->cond, where);
            scopes.emplace_back();
            check_stmt(*w->body, returns_value, where);
            scopes.pop_back();
            return;
        }
        if (auto *f = std::get_if<ForStmt>(&s.node)) {
            scopes.emplace_back();
            check_stmt(*f->init, returns_value, where);
            check_expr(*f->cond, where);
            check_expr(*f->post, where);
            scopes.emplace_back();
            check_stmt(*f->body, returns_value, where);
            scopes.pop_back();
            scopes.pop_back();
            return;
        }
        const auto &c = std::get<CompoundStmt>(s.node);
        scopes.emplace_back();
        for (const auto &st : c.stmts) check_stmt(*st, returns_value, where);
        scopes.pop_back();
    }
};

} // namespace

std::vector<Diagnostic> validate(const ContractModel &m) {
    Checker ck{m, {}, {}};

    if (m.name.empty()) ck.error("no-name", "contract has no name");
    if (m.states.empty()) ck.error("no-states", "contract declares no states");

    std::set<std::string> seen;
    for (const auto &s : m.states)
        if (!seen.insert(s).second)
            ck.error("dup-state", "duplicate state '" + s + "'");
    if (!m.initial.empty() && !m.is_state(m.initial))
        ck.error("bad-initial", "initial state '" + m.initial + "' not declared");
    if (m.initial.empty()) ck.error("no-initial", "no initial state declared");
    for (const auto &f : m.finals)
        if (!m.is_state(f))
            ck.error("bad-final", "final state '" + f + "' not declared");

    seen.clear();
    for (const auto &v : m.vars) {
        if (!seen.insert(v.name).second)
            ck.error("dup-var", "duplicate variable '" + v.name + "'");
        if (v.name == kCreationTime)
            ck.error("reserved-var", "'creationTime' is predefined");
        if (!ck.type_known(*v.type))
            ck.error("unknown-type",
                     "unknown type '" + type_to_string(*v.type) + "'");
    }

    seen.clear();
    for (const auto &sd : m.structs) {
        if (!seen.insert(sd.name).second)
            ck.error("dup-struct", "duplicate struct '" + sd.name + "'");
        std::set<std::string> fields;
        for (const auto &f : sd.fields) {
            if (!fields.insert(f.name).second)
                ck.error("dup-field", "duplicate field '" + f.name +
                                          "' in struct " + sd.name);
            if (!ck.type_known(*f.type))
                ck.error("unknown-type",
                         "unknown type '" + type_to_string(*f.type) +
                             "' in struct " + sd.name);
        }
    }

    seen.clear();
    for (const auto &ev : m.events)
        if (!seen.insert(ev.name).second)
            ck.error("dup-event", "duplicate event '" + ev.name + "'");

    seen.clear();
    for (const auto &t : m.transitions) {
        if (!seen.insert(t.name).second)
            ck.error("dup-transition", "duplicate transition '" + t.name + "'");
        if (!m.is_state(t.from))
            ck.error("bad-from",
                     "transition " + t.name + ": unknown state '" + t.from + "'");
        if (!m.is_state(t.to))
            ck.error("bad-to",
                     "transition " + t.name + ": unknown state '" + t.to + "'");
        if (m.is_final(t.from) && t.to != t.from)
            ck.diags.push_back({Severity::Warning, "final-outgoing",
                                "transition " + t.name + " leaves final state '" +
                                    t.from + "'",
                                {}});

        ck.scopes.clear();
        ck.scopes.emplace_back();
        std::set<std::string> pnames;
        for (const auto &p : t.params) {
            if (!pnames.insert(p.name).second)
                ck.error("dup-param", "transition " + t.name +
                                          ": duplicate parameter '" + p.name + "'");
            if (!ck.type_known(*p.type))
                ck.error("unknown-type", "transition " + t.name +
                                             ": unknown type '" +
                                             type_to_string(*p.type) + "'");
            if (m.find_var(p.name) || p.name == kCreationTime)
                ck.error("shadow", "transition " + t.name + ": parameter '" +
                                       p.name + "' shadows a contract variable");
            ck.scopes.back().insert(p.name);
        }
        if (t.returns && !ck.type_known(*t.returns))
            ck.error("unknown-type", "transition " + t.name +
                                         ": unknown return type '" +
                                         type_to_string(*t.returns) + "'");
        if (t.guard) {
            if (!expr_is_pure(*t.guard))
                ck.error("impure-guard",
                         "transition " + t.name + ": guard has side effects",
                         t.guard->span);
            ck.check_expr(*t.guard, "guard of " + t.name);
        }
        if (t.action)
            ck.check_stmt(*t.action, t.returns != nullptr, "transition " + t.name);
    }

    if (m.constructor_action) {
        ck.scopes.clear();
        ck.scopes.emplace_back();
        ck.check_stmt(*m.constructor_action, false, "constructor");
    }
    if (m.fallback_action) {
        ck.scopes.clear();
        ck.scopes.emplace_back();
        ck.check_stmt(*m.fallback_action, false, "fallback");
    }

    return ck.diags;
}

// ------------------------------------------------------------ DSL output

namespace {
std::string join(const std::vector<std::string> &xs, const char *sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += xs[i];
    }
    return out;
}

std::string params_to_dsl(const std::vector<Param> &ps) {
    std::string out = "(";
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) out += ", ";
        out += type_to_string(*ps[i].type) + " " + ps[i].name;
    }
    return out + ")";
}
} // namespace

std::string model_to_dsl(const ContractModel &m) {
    std::ostringstream os;
    os << "contract " << m.name << " {\n";
    os << "    states " << join(m.states, ", ") << ";\n";
    os << "    initial " << m.initial << ";\n";
    if (!m.finals.empty()) os << "    finals " << join(m.finals, ", ") << ";\n";

    for (const auto &sd : m.structs) {
        os << "\n    struct " << sd.name << " {\n";
        for (const auto &f : sd.fields)
            os << "        " << type_to_string(*f.type) << " " << f.name << ";\n";
        os << "    }\n";
    }
    for (const auto &ev : m.events)
        os << "\n    event " << ev.name << params_to_dsl(ev.params) << ";\n";

    if (!m.vars.empty()) os << "\n";
    for (const auto &v : m.vars)
        os << "    var " << type_to_string(*v.type) << " " << v.name << ";\n";

    if (m.constructor_action) {
        os << "\n    constructor ";
        os << stmt_to_string(*m.constructor_action, 1) << "\n";
    }
    if (m.fallback_action) {
        os << "\n    fallback ";
        os << stmt_to_string(*m.fallback_action, 1) << "\n";
    }

    for (const auto &t : m.transitions) {
        os << "\n    transition " << t.name << params_to_dsl(t.params) << " from "
           << t.from << " to " << t.to;
        if (t.payable) os << " payable";
        if (t.returns) os << " returns " << type_to_string(*t.returns);
        if (t.guard) os << "\n        guard (" << expr_to_string(*t.guard) << ")";
        if (t.action) {
            os << " ";
            if (std::holds_alternative<CompoundStmt>(t.action->node)) {
                os << stmt_to_string(*t.action, 1);
            } else {
                os << "{\n        " << stmt_to_string(*t.action, 2)
                   << "\n    }";
            }
            os << "\n";
        } else {
            os << ";\n";
        }
    }

    if (!m.property_texts.empty()) os << "\n";
    for (const auto &p : m.property_texts) {
        os << "    property \"";
        for (char c : p) {
            if (c == '"' || c == '\\') os << '\\';
            os << c;
        }
        os << "\";\n";
    }

    os << "}\n";
    return os.str();
}

} // namespace verisol
