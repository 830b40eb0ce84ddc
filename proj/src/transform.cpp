#include "verisol/transform.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace verisol {

std::string edge_role_name(EdgeRole r) {
    switch (r) {
    case EdgeRole::GuardEntry: return "entry";
    case EdgeRole::Revert: return "revert";
    case EdgeRole::NoRevert: return "no-revert";
    case EdgeRole::BranchTrue: return "branch-true";
    case EdgeRole::BranchFalse: return "branch-false";
    case EdgeRole::LoopEnter: return "loop-enter";
    case EdgeRole::LoopExit: return "loop-exit";
    case EdgeRole::Statement: return "statement";
    case EdgeRole::Complete: return "complete";
    case EdgeRole::Fallback: return "fallback";
    case EdgeRole::Constructor: return "constructor";
    case EdgeRole::TimeLoop: return "time-loop";
    }
    return "unknown";
}

const Transition *AugmentedModel::by_label(int label) const {
    for (const auto &[name, p] : provenance)
        if (p.label == label) return model.find_transition(name);
    return nullptr;
}

bool AugmentedModel::is_original_state(const std::string &s) const {
    return std::find(original_states.begin(), original_states.end(), s) !=
           original_states.end();
}

// ------------------------------------------------------------- conformance

ConformanceResult conformance(const ContractModel &m) {
    ConformanceResult res;
    res.model = m;
    ContractModel &out = res.model;

    if (m.fallback_action) {
        for (const auto &s : m.states) {
            Transition fb;
            fb.name = "fallback@" + s;
            while (out.find_transition(fb.name)) fb.name += "_";
            fb.from = s;
            fb.to = s;
            fb.payable = true;
            fb.action = m.fallback_action;
            out.transitions.push_back(std::move(fb));
        }
    }

    std::string si = "s_I";
    while (out.is_state(si)) si += "_";
    out.states.push_back(si);
    res.injected_initial = si;

    Transition ctor;
    ctor.name = "constructor";
    while (out.find_transition(ctor.name)) ctor.name += "_";
    if (ctor.name != "constructor")
        res.notes.push_back({Severity::Note, "rename",
                             "constructor transition named '" + ctor.name +
                                 "' to avoid a clash",
                             {}});
    ctor.from = si;
    ctor.to = m.initial;
    ctor.payable = true;
    ctor.action = m.constructor_action;
    out.transitions.push_back(std::move(ctor));

    out.initial = si;
    out.constructor_action = nullptr;
    out.fallback_action = nullptr;
    return res;
}

// --------------------------------------------------------------- may raise

namespace {

struct TypeScope {
    const ContractModel &m;
    const Transition *t;
    std::map<std::string, TypePtr> locals;

    TypePtr lookup(const std::string &name) const {
        auto it = locals.find(name);
        if (it != locals.end()) return it->second;
        if (t)
            for (const auto &p : t->params)
                if (p.name == name) return p.type;
        if (const VarDef *v = m.find_var(name)) return v->type;
        if (name == kCreationTime) return make_named_type("uint");
        return nullptr;
    }

    TypePtr infer(const Expr &e) const {
        if (std::holds_alternative<IntLit>(e.node)) return make_named_type("uint");
        if (std::holds_alternative<BoolLit>(e.node)) return make_named_type("bool");
        if (std::holds_alternative<HexLit>(e.node))
            return make_named_type("address");
        if (auto *id = std::get_if<Ident>(&e.node)) return lookup(id->name);
        if (auto *env = std::get_if<EnvExpr>(&e.node))
            return make_named_type(env->kind == EnvKind::MsgSender ? "address"
                                                                   : "uint");
        if (auto *u = std::get_if<Unary>(&e.node)) {
            if (u->op == UnOp::Not) return make_named_type("bool");
            return infer(*u->operand);
        }
        if (auto *b = std::get_if<Binary>(&e.node)) {
            switch (b->op) {
            case BinOp::Or:
            case BinOp::And:
            case BinOp::Eq:
            case BinOp::Ne:
            case BinOp::Lt:
            case BinOp::Gt:
            case BinOp::Le:
            case BinOp::Ge: return make_named_type("bool");
            default: return infer(*b->lhs);
            }
        }
        if (auto *a = std::get_if<Assign>(&e.node)) return infer(*a->target);
        if (auto *ix = std::get_if<Index>(&e.node)) {
            TypePtr base = infer(*ix->base);
            if (!base) return nullptr;
            if (auto *mp = std::get_if<MappingType>(&base->node)) return mp->value;
            if (auto *ar = std::get_if<ArrayType>(&base->node)) return ar->elem;
            return nullptr;
        }
        if (auto *mem = std::get_if<Member>(&e.node)) {
            if (mem->member == "length") return make_named_type("uint");
            TypePtr base = infer(*mem->base);
            if (base) {
                if (auto *n = std::get_if<NamedType>(&base->node)) {
                    if (const StructDef *sd = m.find_struct(n->name))
                        for (const auto &f : sd->fields)
                            if (f.name == mem->member) return f.type;
                }
            }
            return nullptr;
        }
        if (auto *c = std::get_if<CallExpr>(&e.node)) {
            switch (c->kind) {
            case CallKind::Send:
            case CallKind::LowCall: return make_named_type("bool");
            case CallKind::Push: return make_named_type("uint");
            case CallKind::BuiltinHash: return make_named_type("bytes32");
            case CallKind::Internal: return make_named_type(c->name);
            case CallKind::Transfer: return nullptr;
            }
        }
        return nullptr;
    }
};

struct RaiseScan {
    TypeScope scope;
    bool raises = false;

    void expr(const Expr &e, bool consumed) {
        if (raises) return;
        if (auto *u = std::get_if<Unary>(&e.node)) {
            expr(*u->operand, true);
        } else if (auto *b = std::get_if<Binary>(&e.node)) {
            if (b->op == BinOp::Div || b->op == BinOp::Mod) raises = true;
            expr(*b->lhs, true);
            expr(*b->rhs, true);
        } else if (auto *a = std::get_if<Assign>(&e.node)) {
            expr(*a->target, true);
            expr(*a->value, true);
        } else if (auto *ix = std::get_if<Index>(&e.node)) {
            TypePtr base = scope.infer(*ix->base);
            if (!base || std::holds_alternative<ArrayType>(base->node))
                raises = true;
            expr(*ix->base, true);
            expr(*ix->index, true);
        } else if (auto *mem = std::get_if<Member>(&e.node)) {
            expr(*mem->base, true);
        } else if (auto *c = std::get_if<CallExpr>(&e.node)) {
            if (c->kind == CallKind::Transfer || c->kind == CallKind::LowCall)
                raises = true;
            if (c->kind == CallKind::Send && consumed) raises = true;
            if (c->base) expr(*c->base, true);
            for (const auto &arg : c->args) expr(*arg, true);
        }
    }

    void stmt(const Stmt &s) {
        if (raises) return;
        if (auto *d = std::get_if<VarDeclStmt>(&s.node)) {
            if (d->init) expr(*d->init, true);
            scope.locals[d->name] = d->type;
        } else if (auto *e = std::get_if<ExprStmt>(&s.node)) {
            expr(*e->expr, false);
        } else if (auto *em = std::get_if<EmitStmt>(&s.node)) {
            for (const auto &a : em->args) expr(*a, true);
        } else if (auto *r = std::get_if<ReturnStmt>(&s.node)) {
            if (r->value) expr(*r->value, true);
        } else if (auto *i = std::get_if<IfStmt>(&s.node)) {
            expr(*i->cond, true);
            stmt(*i->then_branch);
            if (i->else_branch) stmt(*i->else_branch);
        } else if (auto *w = std::get_if<WhileStmt>(&s.node)) {
            expr(*w->cond, true);
            stmt(*w->body);
        } else if (auto *f = std::get_if<ForStmt>(&s.node)) {
            stmt(*f->init);
            expr(*f->cond, true);
            expr(*f->post, true);
            stmt(*f->body);
        } else if (auto *c = std::get_if<CompoundStmt>(&s.node)) {
            for (const auto &st : c->stmts) stmt(*st);
        }
    }
};

} // namespace

bool action_may_raise(const ContractModel &m, const Transition &t) {
    if (!t.action) return false;
    RaiseScan scan{TypeScope{m, &t, {}}, false};
    scan.stmt(*t.action);
    return scan.raises;
}

// ------------------------------------------------------------ augmentation

namespace {

bool is_empty_action(const StmtPtr &a) {
    if (!a) return true;
    if (auto *c = std::get_if<CompoundStmt>(&a->node)) return c->stmts.empty();
    return false;
}

struct Expander {
    const std::string &origin;
    const ContractModel &scope;
    std::set<std::string> taken_states;
    int state_counter = 0;
    int edge_counter = 0;
    AugmentStatementResult out;

    std::string fresh_state() {
        std::string s;
        do {
            s = origin + "_s" + std::to_string(++state_counter);
        } while (taken_states.count(s));
        taken_states.insert(s);
        out.new_states.push_back(s);
        return s;
    }

    void edge(const std::string &from, const std::string &to, EdgeRole role,
              const StatementId *id, ExprPtr guard, StmtPtr action) {
        Transition t;
        t.name = origin + "__" + std::to_string(++edge_counter);
        t.from = from;
        t.to = to;
        t.guard = std::move(guard);
        t.action = std::move(action);
        Provenance p;
        p.origin = origin;
        p.role = role;
        if (id) p.stmt = *id;
        out.transitions.push_back(std::move(t));
        out.provenance.push_back(std::move(p));
    }

    void expand(const StmtPtr &s, StatementId id, const std::string &s_o,
                const std::string &s_d, const std::string &s_r) {
        if (stmt_is_simple(*s)) {
            edge(s_o, s_d, EdgeRole::Statement, &id, nullptr, s);
            return;
        }
        if (std::holds_alternative<ReturnStmt>(s->node)) {
            edge(s_o, s_r, EdgeRole::Statement, &id, nullptr, s);
            return;
        }
        if (auto *c = std::get_if<CompoundStmt>(&s->node)) {
            if (c->stmts.empty()) {
                edge(s_o, s_d, EdgeRole::Statement, &id, nullptr, nullptr);
                return;
            }
            std::string prev = s_o;
            for (std::size_t i = 0; i < c->stmts.size(); ++i) {
                std::string next =
                    i + 1 == c->stmts.size() ? s_d : fresh_state();
                StatementId cid = id;
                cid.push_back(static_cast<int>(i));
                expand(c->stmts[i], std::move(cid), prev, next, s_r);
                prev = next;
            }
            return;
        }
        if (auto *i = std::get_if<IfStmt>(&s->node)) {
            std::string s_t = fresh_state();
            edge(s_o, s_t, EdgeRole::BranchTrue, &id, i->cond, nullptr);
            StatementId tid = id;
            tid.push_back(0);
            if (i->else_branch) {
                std::string s_e = fresh_state();
                edge(s_o, s_e, EdgeRole::BranchFalse, &id, negate_expr(i->cond),
                     nullptr);
                expand(i->then_branch, std::move(tid), s_t, s_d, s_r);
                StatementId eid = id;
                eid.push_back(1);
                expand(i->else_branch, std::move(eid), s_e, s_d, s_r);
            } else {
                edge(s_o, s_d, EdgeRole::BranchFalse, &id, negate_expr(i->cond),
                     nullptr);
                expand(i->then_branch, std::move(tid), s_t, s_d, s_r);
            }
            return;
        }
        if (auto *w = std::get_if<WhileStmt>(&s->node)) {
            std::string s_l = fresh_state();
            edge(s_o, s_d, EdgeRole::LoopExit, &id, negate_expr(w->cond), nullptr);
            edge(s_o, s_l, EdgeRole::LoopEnter, &id, w->cond, nullptr);
            StatementId bid = id;
            bid.push_back(0);
            expand(w->body, std::move(bid), s_l, s_o, s_r);
            return;
        }
        const auto &f = std::get<ForStmt>(s->node);
        std::string head = fresh_state();
        StatementId iid = id;
        iid.push_back(0);
        expand(f.init, std::move(iid), s_o, head, s_r);
        edge(head, s_d, EdgeRole::LoopExit, &id, negate_expr(f.cond), nullptr);
        std::string body = fresh_state();
        edge(head, body, EdgeRole::LoopEnter, &id, f.cond, nullptr);
        std::string after = fresh_state();
        StatementId bid = id;
        bid.push_back(1);
        expand(f.body, std::move(bid), body, after, s_r);
        StmtPtr post = make_stmt(Stmt{ExprStmt{f.post}, f.post->span});
        edge(after, head, EdgeRole::Statement, &id, nullptr, post);
    }
};

} // namespace

AugmentStatementResult augment_statement(const StmtPtr &action,
                                         const std::string &origin,
                                         const std::string &s_o,
                                         const std::string &s_d,
                                         const std::string &s_r,
                                         const ContractModel &scope) {
    Expander ex{origin, scope, {}, 0, 0, {}};
    for (const auto &s : scope.states) ex.taken_states.insert(s);
    ex.expand(action, {}, s_o, s_d, s_r);
    return ex.out;
}

AugmentedModel augment_model(const ContractModel &m) {
    AugmentedModel am;
    ConformanceResult cf = conformance(m);
    am.notes = cf.notes;
    am.original_states = cf.model.states;

    ContractModel &out = am.model;
    out.name = m.name;
    out.states = cf.model.states;
    out.initial = cf.model.initial;
    out.finals = cf.model.finals;
    out.structs = m.structs;
    out.events = m.events;
    out.vars = m.vars;
    out.property_texts = m.property_texts;

    auto add_state = [&](const std::string &s) {
        out.states.push_back(s);
        am.added_states.push_back(s);
    };
    auto unique_state = [&](std::string base) {
        std::string s = std::move(base);
        while (out.is_state(s)) s += "'";
        return s;
    };

    int label = 0;
    for (const auto &t : cf.model.transitions) {
        const std::string &origin = t.name;
        EdgeRole entry_kind = EdgeRole::GuardEntry;
        if (origin.rfind("fallback@", 0) == 0) entry_kind = EdgeRole::GuardEntry;

        std::string s_grd = unique_state(origin);
        if (s_grd != origin)
            am.notes.push_back({Severity::Note, "rename",
                                "entry state for " + origin + " named '" +
                                    s_grd + "' to avoid a clash",
                                {}});
        add_state(s_grd);

        auto push_edge = [&](std::string name, Transition tr, Provenance p) {
            while (out.find_transition(name)) name += "_";
            tr.name = std::move(name);
            p.origin = origin;
            p.label = ++label;
            am.provenance.emplace(tr.name, std::move(p));
            out.transitions.push_back(std::move(tr));
        };

        Transition entry;
        entry.from = t.from;
        entry.to = s_grd;
        entry.params = t.params;
        entry.payable = t.payable;
        entry.returns = t.returns;
        entry.guard = t.guard;
        push_edge(origin + "__entry", std::move(entry),
                  Provenance{origin, entry_kind, std::nullopt, 0});

        if (is_empty_action(t.action)) {
            Transition done;
            done.from = s_grd;
            done.to = t.to;
            push_edge(origin + "__complete", std::move(done),
                      Provenance{origin, EdgeRole::Complete, std::nullopt, 0});
            continue;
        }

        std::string start = s_grd;
        if (action_may_raise(cf.model, t)) {
            Transition rev;
            rev.from = s_grd;
            rev.to = t.from;
            push_edge(origin + "__revert", std::move(rev),
                      Provenance{origin, EdgeRole::Revert, std::nullopt, 0});

            std::string s_ok = unique_state(origin + "_rvrt");
            add_state(s_ok);
            Transition ok;
            ok.from = s_grd;
            ok.to = s_ok;
            push_edge(origin + "__ok", std::move(ok),
                      Provenance{origin, EdgeRole::NoRevert, std::nullopt, 0});
            start = s_ok;
        }

        AugmentStatementResult ex =
            augment_statement(t.action, origin, start, t.to, t.to, out);
        for (const auto &s : ex.new_states) add_state(s);
        for (std::size_t i = 0; i < ex.transitions.size(); ++i)
            push_edge(ex.transitions[i].name, ex.transitions[i],
                      ex.provenance[i]);
    }

    return am;
}

// ----------------------------------------------------------------- legend

std::vector<LegendRow> legend(const AugmentedModel &am) {
    std::vector<LegendRow> rows;
    for (const auto &t : am.model.transitions) {
        const Provenance *p = am.prov(t.name);
        if (!p) continue;
        LegendRow r;
        r.label = p->label;
        r.transition = t.name;
        r.origin = p->origin;
        r.role = edge_role_name(p->role);
        r.from = t.from;
        r.to = t.to;
        if (t.guard)
            r.text = expr_to_string(*t.guard);
        else if (t.action)
            r.text = stmt_to_string(*t.action);
        rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end(),
              [](const LegendRow &a, const LegendRow &b) {
                  return a.label < b.label;
              });
    return rows;
}

} // namespace verisol
