#include "verisol/abstraction.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "verisol/interp.hpp"

namespace verisol {

std::string variable_class_name(VariableClass c) {
    switch (c) {
    case VariableClass::Concrete: return "concrete";
    case VariableClass::Abstract: return "abstract";
    case VariableClass::Time: return "time";
    }
    return "unknown";
}

// --------------------------------------------------------- classification

namespace {

// Taint over variable names: contract vars by their own name, locals and
// parameters as "<origin>.<name>".
struct TaintState {
    std::set<std::string> env_tainted;
    std::set<std::string> time_tainted;
    bool changed = false;

    void taint(const std::string &n) {
        if (env_tainted.insert(n).second) changed = true;
    }
    void taint_time(const std::string &n) {
        if (time_tainted.insert(n).second) changed = true;
    }
};

struct TaintScan {
    const ContractModel &m;
    std::string origin;
    TaintState &ts;

    std::string resolve(const std::string &name) const {
        if (m.find_var(name) || name == kCreationTime) return name;
        return origin + "." + name;
    }

    bool is_env(const Expr &e) const {
        if (auto *env = std::get_if<EnvExpr>(&e.node))
            return env->kind != EnvKind::Now;
        if (auto *id = std::get_if<Ident>(&e.node))
            return ts.env_tainted.count(resolve(id->name)) != 0;
        if (auto *u = std::get_if<Unary>(&e.node)) return is_env(*u->operand);
        if (auto *b = std::get_if<Binary>(&e.node))
            return is_env(*b->lhs) || is_env(*b->rhs);
        if (auto *a = std::get_if<Assign>(&e.node))
            return is_env(*a->target) || is_env(*a->value);
        if (auto *ix = std::get_if<Index>(&e.node))
            return is_env(*ix->base) || is_env(*ix->index);
        if (auto *mem = std::get_if<Member>(&e.node)) return is_env(*mem->base);
        if (auto *c = std::get_if<CallExpr>(&e.node)) {
            // any call result depends on the outside world
            (void)c;
            return true;
        }
        return false;
    }

    bool is_time(const Expr &e) const {
        if (auto *env = std::get_if<EnvExpr>(&e.node))
            return env->kind == EnvKind::Now;
        if (auto *id = std::get_if<Ident>(&e.node)) {
            if (id->name == kCreationTime) return true;
            return ts.time_tainted.count(resolve(id->name)) != 0;
        }
        if (auto *u = std::get_if<Unary>(&e.node)) return is_time(*u->operand);
        if (auto *b = std::get_if<Binary>(&e.node))
            return is_time(*b->lhs) || is_time(*b->rhs);
        if (auto *a = std::get_if<Assign>(&e.node)) return is_time(*a->value);
        if (auto *ix = std::get_if<Index>(&e.node))
            return is_time(*ix->base) || is_time(*ix->index);
        if (auto *mem = std::get_if<Member>(&e.node)) return is_time(*mem->base);
        return false;
    }

    // The variable a write lands in, plus whether the path itself is
    // env-dependent (tainted index or member on a tainted base).
    const std::string *write_root(const Expr &target, bool &tainted_path) const {
        if (auto *id = std::get_if<Ident>(&target.node)) {
            static thread_local std::string buf;
            buf = resolve(id->name);
            return &buf;
        }
        if (auto *ix = std::get_if<Index>(&target.node)) {
            if (is_env(*ix->index)) tainted_path = true;
            return write_root(*ix->base, tainted_path);
        }
        if (auto *mem = std::get_if<Member>(&target.node))
            return write_root(*mem->base, tainted_path);
        return nullptr;
    }

    void note_write(const Expr &target, const Expr *value) {
        bool tainted_path = false;
        const std::string *root = write_root(target, tainted_path);
        if (!root) return;
        if (tainted_path || (value && is_env(*value))) ts.taint(*root);
        if (value && is_time(*value)) ts.taint_time(*root);
    }

    void expr(const Expr &e) {
        if (auto *u = std::get_if<Unary>(&e.node)) {
            expr(*u->operand);
        } else if (auto *b = std::get_if<Binary>(&e.node)) {
            expr(*b->lhs);
            expr(*b->rhs);
        } else if (auto *a = std::get_if<Assign>(&e.node)) {
            expr(*a->value);
            note_write(*a->target, a->value.get());
        } else if (auto *ix = std::get_if<Index>(&e.node)) {
            expr(*ix->base);
            expr(*ix->index);
        } else if (auto *mem = std::get_if<Member>(&e.node)) {
            expr(*mem->base);
        } else if (auto *c = std::get_if<CallExpr>(&e.node)) {
            if (c->base) expr(*c->base);
            for (const auto &arg : c->args) expr(*arg);
            if (c->kind == CallKind::Push && c->base) {
                bool tainted_path = false;
                const std::string *root = write_root(*c->base, tainted_path);
                if (root &&
                    (tainted_path || (!c->args.empty() && is_env(*c->args[0]))))
                    ts.taint(*root);
                if (root && !c->args.empty() && is_time(*c->args[0]))
                    ts.taint_time(*root);
            }
        }
    }

    void stmt(const Stmt &s) {
        if (auto *d = std::get_if<VarDeclStmt>(&s.node)) {
            if (d->init) {
                expr(*d->init);
                if (is_env(*d->init)) ts.taint(resolve(d->name));
                if (is_time(*d->init)) ts.taint_time(resolve(d->name));
            }
        } else if (auto *e = std::get_if<ExprStmt>(&s.node)) {
            expr(*e->expr);
        } else if (auto *em = std::get_if<EmitStmt>(&s.node)) {
            for (const auto &a : em->args) expr(*a);
        } else if (auto *r = std::get_if<ReturnStmt>(&s.node)) {
            if (r->value) expr(*r->value);
        } else if (auto *i = std::get_if<IfStmt>(&s.node)) {
            expr(*i->cond);
            stmt(*i->then_branch);
            if (i->else_branch) stmt(*i->else_branch);
        } else if (auto *w = std::get_if<WhileStmt>(&s.node)) {
            expr(*w->cond);
            stmt(*w->body);
        } else if (auto *f = std::get_if<ForStmt>(&s.node)) {
            stmt(*f->init);
            expr(*f->cond);
            expr(*f->post);
            stmt(*f->body);
        } else if (auto *c = std::get_if<CompoundStmt>(&s.node)) {
            for (const auto &st : c->stmts) stmt(*st);
        }
    }
};

} // namespace

std::map<std::string, VariableClass> classify_variables(const ContractModel &m) {
    TaintState ts;
    for (const auto &t : m.transitions)
        for (const auto &p : t.params) ts.env_tainted.insert(t.name + "." + p.name);

    do {
        ts.changed = false;
        for (const auto &t : m.transitions) {
            TaintScan sc{m, t.name, ts};
            if (t.action) sc.stmt(*t.action);
        }
        if (m.constructor_action) {
            TaintScan sc{m, "constructor", ts};
            sc.stmt(*m.constructor_action);
        }
        if (m.fallback_action) {
            TaintScan sc{m, "fallback", ts};
            sc.stmt(*m.fallback_action);
        }
    } while (ts.changed);

    std::map<std::string, VariableClass> out;
    auto classify = [&](const std::string &key) {
        if (ts.env_tainted.count(key)) return VariableClass::Abstract;
        if (ts.time_tainted.count(key)) return VariableClass::Time;
        return VariableClass::Concrete;
    };
    for (const auto &v : m.vars) out[v.name] = classify(v.name);
    out[kCreationTime] = VariableClass::Time;

    // locals and parameters, keyed by origin
    struct LocalScan {
        const std::string &origin;
        std::map<std::string, VariableClass> &out;
        const decltype(classify) &cls;
        void walk(const Stmt &s) {
            if (auto *d = std::get_if<VarDeclStmt>(&s.node)) {
                std::string key = origin + "." + d->name;
                out[key] = cls(key);
            } else if (auto *i = std::get_if<IfStmt>(&s.node)) {
                walk(*i->then_branch);
                if (i->else_branch) walk(*i->else_branch);
            } else if (auto *w = std::get_if<WhileStmt>(&s.node)) {
                walk(*w->body);
            } else if (auto *f = std::get_if<ForStmt>(&s.node)) {
                walk(*f->init);
                walk(*f->body);
            } else if (auto *c = std::get_if<CompoundStmt>(&s.node)) {
                for (const auto &st : c->stmts) walk(*st);
            }
        }
    };
    for (const auto &t : m.transitions) {
        for (const auto &p : t.params)
            out[t.name + "." + p.name] = VariableClass::Abstract;
        if (t.action) LocalScan{t.name, out, classify}.walk(*t.action);
    }
    if (m.constructor_action) {
        std::string o = "constructor";
        LocalScan{o, out, classify}.walk(*m.constructor_action);
    }
    if (m.fallback_action) {
        std::string o = "fallback";
        LocalScan{o, out, classify}.walk(*m.fallback_action);
    }
    return out;
}

// -------------------------------------------------------- time guard rewrite

namespace {

bool contains_now(const Expr &e) {
    if (auto *env = std::get_if<EnvExpr>(&e.node))
        return env->kind == EnvKind::Now;
    if (auto *u = std::get_if<Unary>(&e.node)) return contains_now(*u->operand);
    if (auto *b = std::get_if<Binary>(&e.node))
        return contains_now(*b->lhs) || contains_now(*b->rhs);
    if (auto *a = std::get_if<Assign>(&e.node))
        return contains_now(*a->target) || contains_now(*a->value);
    if (auto *ix = std::get_if<Index>(&e.node))
        return contains_now(*ix->base) || contains_now(*ix->index);
    if (auto *mem = std::get_if<Member>(&e.node)) return contains_now(*mem->base);
    if (auto *c = std::get_if<CallExpr>(&e.node)) {
        if (c->base && contains_now(*c->base)) return true;
        for (const auto &a : c->args)
            if (contains_now(*a)) return true;
    }
    return false;
}

ExprPtr replace_now(const ExprPtr &e, const std::string &var) {
    if (auto *env = std::get_if<EnvExpr>(&e->node)) {
        if (env->kind == EnvKind::Now)
            return make_expr(Expr{Ident{var}, e->span});
        return e;
    }
    if (auto *u = std::get_if<Unary>(&e->node))
        return make_expr(Expr{Unary{u->op, replace_now(u->operand, var)}, e->span});
    if (auto *b = std::get_if<Binary>(&e->node))
        return make_expr(Expr{
            Binary{b->op, replace_now(b->lhs, var), replace_now(b->rhs, var)},
            e->span});
    if (auto *a = std::get_if<Assign>(&e->node))
        return make_expr(Expr{
            Assign{a->op, replace_now(a->target, var), replace_now(a->value, var)},
            e->span});
    if (auto *ix = std::get_if<Index>(&e->node))
        return make_expr(Expr{
            Index{replace_now(ix->base, var), replace_now(ix->index, var)},
            e->span});
    if (auto *mem = std::get_if<Member>(&e->node))
        return make_expr(
            Expr{Member{replace_now(mem->base, var), mem->member}, e->span});
    if (auto *c = std::get_if<CallExpr>(&e->node)) {
        CallExpr out{c->kind, c->base ? replace_now(c->base, var) : nullptr,
                     c->name, {}};
        for (const auto &a : c->args) out.args.push_back(replace_now(a, var));
        return make_expr(Expr{std::move(out), e->span});
    }
    return e;
}

StmtPtr replace_now_stmt(const StmtPtr &s, const std::string &var) {
    if (auto *d = std::get_if<VarDeclStmt>(&s->node))
        return make_stmt(Stmt{
            VarDeclStmt{d->type, d->name,
                        d->init ? replace_now(d->init, var) : nullptr},
            s->span});
    if (auto *e = std::get_if<ExprStmt>(&s->node))
        return make_stmt(Stmt{ExprStmt{replace_now(e->expr, var)}, s->span});
    if (auto *em = std::get_if<EmitStmt>(&s->node)) {
        EmitStmt out{em->event, {}};
        for (const auto &a : em->args) out.args.push_back(replace_now(a, var));
        return make_stmt(Stmt{std::move(out), s->span});
    }
    if (auto *r = std::get_if<ReturnStmt>(&s->node))
        return make_stmt(Stmt{
            ReturnStmt{r->value ? replace_now(r->value, var) : nullptr}, s->span});
    if (auto *i = std::get_if<IfStmt>(&s->node))
        return make_stmt(Stmt{
            IfStmt{replace_now(i->cond, var),
                   replace_now_stmt(i->then_branch, var),
                   i->else_branch ? replace_now_stmt(i->else_branch, var)
                                  : nullptr},
            s->span});
    if (auto *w = std::get_if<WhileStmt>(&s->node))
        return make_stmt(Stmt{
            WhileStmt{replace_now(w->cond, var), replace_now_stmt(w->body, var)},
            s->span});
    if (auto *f = std::get_if<ForStmt>(&s->node))
        return make_stmt(Stmt{
            ForStmt{replace_now_stmt(f->init, var), replace_now(f->cond, var),
                    replace_now(f->post, var), replace_now_stmt(f->body, var)},
            s->span});
    const auto &c = std::get<CompoundStmt>(s->node);
    CompoundStmt out;
    for (const auto &st : c.stmts) out.stmts.push_back(replace_now_stmt(st, var));
    return make_stmt(Stmt{std::move(out), s->span});
}

void split_conjuncts(const ExprPtr &e, std::vector<ExprPtr> &out) {
    if (auto *b = std::get_if<Binary>(&e->node)) {
        if (b->op == BinOp::And) {
            split_conjuncts(b->lhs, out);
            split_conjuncts(b->rhs, out);
            return;
        }
    }
    out.push_back(e);
}

ExprPtr join_conjuncts(const std::vector<ExprPtr> &cs) {
    if (cs.empty()) return nullptr;
    ExprPtr out = cs[0];
    for (std::size_t i = 1; i < cs.size(); ++i)
        out = make_expr(Expr{Binary{BinOp::And, out, cs[i]}, cs[i]->span});
    return out;
}

// now >= E / now > E / E <= now / E < now (and the mirror for upper bounds)
struct TimeBound {
    bool lower = false;
    ExprPtr threshold; // now-free side
};

std::optional<TimeBound> match_time_bound(const ExprPtr &e) {
    auto *b = std::get_if<Binary>(&e->node);
    if (!b) return std::nullopt;
    auto is_now = [](const ExprPtr &x) {
        auto *env = std::get_if<EnvExpr>(&x->node);
        return env && env->kind == EnvKind::Now;
    };
    bool lhs_now = is_now(b->lhs);
    bool rhs_now = is_now(b->rhs);
    if (lhs_now == rhs_now) return std::nullopt;
    const ExprPtr &other = lhs_now ? b->rhs : b->lhs;
    if (contains_now(*other)) return std::nullopt;
    switch (b->op) {
    case BinOp::Ge: return TimeBound{lhs_now, other};
    case BinOp::Gt: return TimeBound{lhs_now, other};
    case BinOp::Le: return TimeBound{!lhs_now, other};
    case BinOp::Lt: return TimeBound{!lhs_now, other};
    default: return std::nullopt;
    }
}

ExprPtr past_threshold(const ExprPtr &threshold, const std::string &now_var) {
    ExprPtr one = make_expr(Expr{IntLit{1, "1"}, threshold->span});
    ExprPtr sum = make_expr(
        Expr{Binary{BinOp::Add, replace_now(threshold, now_var), one},
             threshold->span});
    return make_expr(
        Expr{Assign{AssignOp::Assign,
                    make_expr(Expr{Ident{now_var}, threshold->span}), sum},
             threshold->span});
}

StmtPtr prepend_stmt(StmtPtr first, const StmtPtr &rest) {
    CompoundStmt c;
    c.stmts.push_back(std::move(first));
    if (rest) {
        if (auto *rc = std::get_if<CompoundStmt>(&rest->node)) {
            for (const auto &s : rc->stmts) c.stmts.push_back(s);
        } else {
            c.stmts.push_back(rest);
        }
    }
    Span sp = c.stmts[0]->span;
    return make_stmt(Stmt{std::move(c), sp});
}

} // namespace

TimeRewriteResult
rewrite_time_guards(const ContractModel &m,
                    const std::map<std::string, VariableClass> &classes,
                    int first_free_label) {
    (void)classes;
    TimeRewriteResult res;
    res.model = m;
    ContractModel &out = res.model;

    bool uses_time = false;
    for (const auto &t : m.transitions) {
        if (t.guard && contains_now(*t.guard)) uses_time = true;
        if (t.action) {
            // action reads of now also force the clock variable
            struct {
                bool found = false;
                void walk(const Stmt &s) {
                    if (found) return;
                    if (auto *d = std::get_if<VarDeclStmt>(&s.node)) {
                        if (d->init && contains_now(*d->init)) found = true;
                    } else if (auto *e = std::get_if<ExprStmt>(&s.node)) {
                        if (contains_now(*e->expr)) found = true;
                    } else if (auto *em = std::get_if<EmitStmt>(&s.node)) {
                        for (const auto &a : em->args)
                            if (contains_now(*a)) found = true;
                    } else if (auto *r = std::get_if<ReturnStmt>(&s.node)) {
                        if (r->value && contains_now(*r->value)) found = true;
                    } else if (auto *i = std::get_if<IfStmt>(&s.node)) {
                        if (contains_now(*i->cond)) found = true;
                        walk(*i->then_branch);
                        if (i->else_branch) walk(*i->else_branch);
                    } else if (auto *w = std::get_if<WhileStmt>(&s.node)) {
                        if (contains_now(*w->cond)) found = true;
                        walk(*w->body);
                    } else if (auto *f = std::get_if<ForStmt>(&s.node)) {
                        walk(*f->init);
                        if (contains_now(*f->cond) || contains_now(*f->post))
                            found = true;
                        walk(*f->body);
                    } else if (auto *c = std::get_if<CompoundStmt>(&s.node)) {
                        for (const auto &st : c->stmts) walk(*st);
                    }
                }
            } scan;
            scan.walk(*t.action);
            if (scan.found) uses_time = true;
        }
    }
    if (!uses_time) return res;

    std::string now_var = "__now";
    while (out.find_var(now_var)) now_var += "_";
    out.vars.push_back({make_named_type("uint"), now_var});

    int label = first_free_label;
    for (auto &t : out.transitions) {
        if (t.guard) {
            std::vector<ExprPtr> conjuncts;
            split_conjuncts(t.guard, conjuncts);
            std::vector<ExprPtr> kept;
            for (const auto &c : conjuncts) {
                auto tb = match_time_bound(c);
                if (!tb) {
                    if (contains_now(*c)) {
                        // not a plain bound: weaken the guard rather than pin
                        // the clock to a value it never takes
                        res.notes.push_back(
                            {Severity::Warning, "time-dropped",
                             "transition " + t.name +
                                 ": time condition treated as free: " +
                                 expr_to_string(*c),
                             c->span});
                    } else {
                        kept.push_back(c);
                    }
                    continue;
                }
                if (tb->lower) {
                    // eventually satisfied by waiting: drop the conjunct and
                    // move the clock past the threshold when firing
                    StmtPtr pro = make_stmt(
                        Stmt{ExprStmt{past_threshold(tb->threshold, now_var)},
                             c->span});
                    t.action = prepend_stmt(std::move(pro), t.action);
                    res.notes.push_back(
                        {Severity::Note, "time-lower",
                         "transition " + t.name +
                             ": waiting satisfies the time bound " +
                             expr_to_string(*c),
                         c->span});
                } else {
                    kept.push_back(replace_now(c, now_var));
                    Transition loop;
                    loop.name = "time@" + t.from;
                    while (out.find_transition(loop.name)) loop.name += "_";
                    loop.from = t.from;
                    loop.to = t.from;
                    loop.action = make_stmt(
                        Stmt{ExprStmt{past_threshold(tb->threshold, now_var)},
                             c->span});
                    Provenance p;
                    p.origin = loop.name;
                    p.role = EdgeRole::TimeLoop;
                    p.label = ++label;
                    res.loop_provenance.emplace(loop.name, p);
                    res.added_loops.push_back(loop);
                    res.notes.push_back(
                        {Severity::Note, "time-upper",
                         "transition " + t.name +
                             ": waiting invalidates the time bound " +
                             expr_to_string(*c),
                         c->span});
                }
            }
            t.guard = join_conjuncts(kept);
        }
        if (t.action) t.action = replace_now_stmt(t.action, now_var);
    }
    for (const auto &loop : res.added_loops) out.transitions.push_back(loop);
    return res;
}

// ----------------------------------------------------------------- builder

namespace {

using AbsValue = std::optional<Value>;

struct AbsState {
    std::map<std::string, Value> tracked;  // concrete storage slice
    std::map<std::string, Value> locals;   // known path locals
};

const std::string *root_of(const Expr &e) {
    if (auto *id = std::get_if<Ident>(&e.node)) return &id->name;
    if (auto *ix = std::get_if<Index>(&e.node)) return root_of(*ix->base);
    if (auto *mem = std::get_if<Member>(&e.node)) return root_of(*mem->base);
    return nullptr;
}

// Roots that an expression or statement may write through.
struct WriteScan {
    std::set<std::string> &out;
    void expr(const Expr &e) {
        if (auto *a = std::get_if<Assign>(&e.node)) {
            if (const std::string *r = root_of(*a->target)) out.insert(*r);
            expr(*a->value);
        } else if (auto *u = std::get_if<Unary>(&e.node)) {
            expr(*u->operand);
        } else if (auto *b = std::get_if<Binary>(&e.node)) {
            expr(*b->lhs);
            expr(*b->rhs);
        } else if (auto *ix = std::get_if<Index>(&e.node)) {
            expr(*ix->base);
            expr(*ix->index);
        } else if (auto *mem = std::get_if<Member>(&e.node)) {
            expr(*mem->base);
        } else if (auto *c = std::get_if<CallExpr>(&e.node)) {
            if (c->kind == CallKind::Push && c->base)
                if (const std::string *r = root_of(*c->base)) out.insert(*r);
            if (c->base) expr(*c->base);
            for (const auto &a : c->args) expr(*a);
        }
    }
    void stmt(const Stmt &s) {
        if (auto *d = std::get_if<VarDeclStmt>(&s.node)) {
            out.insert(d->name);
            if (d->init) expr(*d->init);
        } else if (auto *e = std::get_if<ExprStmt>(&s.node)) {
            expr(*e->expr);
        } else if (auto *em = std::get_if<EmitStmt>(&s.node)) {
            for (const auto &a : em->args) expr(*a);
        } else if (auto *r = std::get_if<ReturnStmt>(&s.node)) {
            if (r->value) expr(*r->value);
        } else if (auto *i = std::get_if<IfStmt>(&s.node)) {
            expr(*i->cond);
            stmt(*i->then_branch);
            if (i->else_branch) stmt(*i->else_branch);
        } else if (auto *w = std::get_if<WhileStmt>(&s.node)) {
            expr(*w->cond);
            stmt(*w->body);
        } else if (auto *f = std::get_if<ForStmt>(&s.node)) {
            stmt(*f->init);
            expr(*f->cond);
            expr(*f->post);
            stmt(*f->body);
        } else if (auto *c = std::get_if<CompoundStmt>(&s.node)) {
            for (const auto &st : c->stmts) stmt(*st);
        }
    }
};

bool contains_return(const Stmt &s) {
    if (std::holds_alternative<ReturnStmt>(s.node)) return true;
    if (auto *i = std::get_if<IfStmt>(&s.node))
        return contains_return(*i->then_branch) ||
               (i->else_branch && contains_return(*i->else_branch));
    if (auto *w = std::get_if<WhileStmt>(&s.node)) return contains_return(*w->body);
    if (auto *f = std::get_if<ForStmt>(&s.node)) return contains_return(*f->body);
    if (auto *c = std::get_if<CompoundStmt>(&s.node)) {
        for (const auto &st : c->stmts)
            if (contains_return(*st)) return true;
    }
    return false;
}

struct DemoteRequest {
    std::set<std::string> names; // storage names, or %local
};

enum class AbsStatus { Normal, Exception, Returned };

struct Outcome {
    AbsStatus status = AbsStatus::Normal;
    AbsState st;
};

struct AbsExec {
    const ContractModel &m;
    const std::set<std::string> &demoted_locals;
    long fork_cap = 4096;
    long loop_cap = 4096;
    std::vector<Diagnostic> *notes = nullptr;

    AbsValue read_ident(const std::string &n, AbsState &st) const {
        auto it = st.locals.find(n);
        if (it != st.locals.end()) return it->second;
        auto jt = st.tracked.find(n);
        if (jt != st.tracked.end()) return jt->second;
        return std::nullopt;
    }

    struct EvalOut {
        bool exception = false;
        AbsValue v;
    };

    static EvalOut known(Value v) { return {false, std::move(v)}; }
    static EvalOut unknown() { return {false, std::nullopt}; }
    static EvalOut raise() { return {true, std::nullopt}; }

    EvalOut eval(const Expr &e, AbsState &st) const {
        if (auto *i = std::get_if<IntLit>(&e.node))
            return known(Value{IntVal{i->value, false}});
        if (auto *b = std::get_if<BoolLit>(&e.node))
            return known(Value{BoolVal{b->value}});
        if (auto *h = std::get_if<HexLit>(&e.node))
            return known(Value{AddressVal{h->value}});
        if (auto *id = std::get_if<Ident>(&e.node)) {
            EvalOut out;
            out.v = read_ident(id->name, st);
            return out;
        }
        if (std::holds_alternative<EnvExpr>(e.node)) return unknown();
        if (auto *u = std::get_if<Unary>(&e.node)) {
            EvalOut r = eval(*u->operand, st);
            if (r.exception || !r.v) return r;
            if (u->op == UnOp::Not) {
                if (auto *bv = std::get_if<BoolVal>(&r.v->node))
                    return known(Value{BoolVal{!bv->v}});
                return raise();
            }
            if (auto *iv = std::get_if<IntVal>(&r.v->node)) {
                if (u->op == UnOp::Neg)
                    return known(Value{IntVal{~iv->bits + 1, true}});
                return r;
            }
            return raise();
        }
        if (auto *bin = std::get_if<Binary>(&e.node)) {
            if (bin->op == BinOp::And || bin->op == BinOp::Or) {
                bool is_and = bin->op == BinOp::And;
                EvalOut l = eval(*bin->lhs, st);
                if (l.exception) return l;
                if (l.v) {
                    auto *bv = std::get_if<BoolVal>(&l.v->node);
                    if (!bv) return raise();
                    if (is_and && !bv->v) return known(Value{BoolVal{false}});
                    if (!is_and && bv->v) return known(Value{BoolVal{true}});
                    EvalOut r = eval(*bin->rhs, st);
                    if (r.exception) return r;
                    if (!r.v) return unknown();
                    auto *rv = std::get_if<BoolVal>(&r.v->node);
                    if (!rv) return raise();
                    return known(Value{BoolVal{rv->v}});
                }
                // lhs unknown: whether the rhs runs at all is undecided, so
                // its side effects must be havocked and a definite raise only
                // leaves the short-circuit value
                AbsState scratch = st;
                EvalOut r = eval(*bin->rhs, scratch);
                if (!expr_is_pure(*bin->rhs)) {
                    std::set<std::string> written;
                    WriteScan{written}.expr(*bin->rhs);
                    std::set<std::string> demote;
                    for (const auto &w : written) {
                        if (st.tracked.count(w)) demote.insert(w);
                        st.locals.erase(w);
                    }
                    if (!demote.empty()) throw DemoteRequest{demote};
                } else {
                    st = std::move(scratch);
                }
                if (r.exception) return known(Value{BoolVal{!is_and}});
                if (r.v) {
                    auto *rv = std::get_if<BoolVal>(&r.v->node);
                    if (!rv) return unknown();
                    if (is_and && !rv->v) return known(Value{BoolVal{false}});
                    if (!is_and && rv->v) return known(Value{BoolVal{true}});
                }
                return unknown();
            }
            EvalOut l = eval(*bin->lhs, st);
            if (l.exception) return l;
            EvalOut r = eval(*bin->rhs, st);
            if (r.exception) return r;
            if (bin->op == BinOp::Eq || bin->op == BinOp::Ne) {
                if (!l.v || !r.v) return unknown();
                bool eq = value_equal(*l.v, *r.v);
                return known(Value{BoolVal{bin->op == BinOp::Eq ? eq : !eq}});
            }
            std::uint64_t a = 0, b = 0;
            bool sa = false, sb = false;
            bool la = l.v && scalar(*l.v, a, sa);
            bool rb = r.v && scalar(*r.v, b, sb);
            if ((bin->op == BinOp::Div || bin->op == BinOp::Mod) && rb && b == 0)
                return raise();
            if (!la || !rb) return unknown();
            bool sg = sa || sb;
            auto lt = [&] {
                return sg ? static_cast<std::int64_t>(a) <
                                static_cast<std::int64_t>(b)
                          : a < b;
            };
            switch (bin->op) {
            case BinOp::Lt: return known(Value{BoolVal{lt()}});
            case BinOp::Gt: return known(Value{BoolVal{a != b && !lt()}});
            case BinOp::Le: return known(Value{BoolVal{a == b || lt()}});
            case BinOp::Ge: return known(Value{BoolVal{!lt()}});
            case BinOp::Add: return known(Value{IntVal{a + b, sg}});
            case BinOp::Sub: return known(Value{IntVal{a - b, sg}});
            case BinOp::Mul: return known(Value{IntVal{a * b, sg}});
            case BinOp::Div:
                return known(Value{IntVal{
                    sg ? static_cast<std::uint64_t>(
                             static_cast<std::int64_t>(a) /
                             static_cast<std::int64_t>(b))
                       : a / b,
                    sg}});
            case BinOp::Mod:
                return known(Value{IntVal{
                    sg ? static_cast<std::uint64_t>(
                             static_cast<std::int64_t>(a) %
                             static_cast<std::int64_t>(b))
                       : a % b,
                    sg}});
            default: return unknown();
            }
        }
        if (auto *asg = std::get_if<Assign>(&e.node)) {
            EvalOut rhs = eval(*asg->value, st);
            if (rhs.exception) return rhs;
            return write(*asg->target, asg->op, rhs.v, st);
        }
        if (auto *ix = std::get_if<Index>(&e.node)) {
            EvalOut base = eval(*ix->base, st);
            if (base.exception) return base;
            EvalOut key = eval(*ix->index, st);
            if (key.exception) return key;
            if (!base.v || !key.v) return unknown();
            if (auto *mp = std::get_if<MappingVal>(&base.v->node)) {
                auto it = mp->entries.find(value_encode(*key.v));
                if (it != mp->entries.end()) return known(it->second);
                StructTable tab{&m};
                return known(zero_value(*mp->value_type, tab));
            }
            if (auto *av = std::get_if<ArrayVal>(&base.v->node)) {
                std::uint64_t i;
                bool sg;
                if (!scalar(*key.v, i, sg)) return raise();
                if (i >= av->elems.size()) return raise();
                return known(av->elems[i]);
            }
            return unknown();
        }
        if (auto *mem = std::get_if<Member>(&e.node)) {
            EvalOut base = eval(*mem->base, st);
            if (base.exception || !base.v) return base;
            if (mem->member == "length") {
                if (auto *av = std::get_if<ArrayVal>(&base.v->node))
                    return known(Value{IntVal{av->elems.size(), false}});
                return unknown();
            }
            if (auto *sv = std::get_if<StructVal>(&base.v->node)) {
                const StructDef *sd = m.find_struct(sv->struct_name);
                if (sd)
                    for (std::size_t i = 0; i < sd->fields.size(); ++i)
                        if (sd->fields[i].name == mem->member)
                            return known(sv->fields[i]);
            }
            return unknown();
        }
        const auto &c = std::get<CallExpr>(e.node);
        switch (c.kind) {
        case CallKind::Transfer:
        case CallKind::Send:
        case CallKind::LowCall: {
            if (c.base) {
                EvalOut b = eval(*c.base, st);
                if (b.exception) return b;
            }
            for (const auto &a : c.args) {
                EvalOut r = eval(*a, st);
                if (r.exception) return r;
            }
            return unknown();
        }
        case CallKind::Push: {
            EvalOut v = c.args.empty() ? unknown() : eval(*c.args[0], st);
            if (v.exception) return v;
            return push(*c.base, v.v, st);
        }
        case CallKind::BuiltinHash: {
            std::vector<Value> args;
            bool all_known = true;
            for (const auto &a : c.args) {
                EvalOut r = eval(*a, st);
                if (r.exception) return r;
                if (!r.v) all_known = false;
                else args.push_back(*r.v);
            }
            if (!all_known) return unknown();
            return known(Value{Bytes32Val{builtin_hash(args)}});
        }
        case CallKind::Internal: {
            const StructDef *sd = m.find_struct(c.name);
            if (!sd || sd->fields.size() != c.args.size()) return raise();
            StructVal sv{c.name, {}};
            bool all_known = true;
            for (const auto &a : c.args) {
                EvalOut r = eval(*a, st);
                if (r.exception) return r;
                if (!r.v) all_known = false;
                else sv.fields.push_back(*r.v);
            }
            if (!all_known) return unknown();
            return known(Value{std::move(sv)});
        }
        }
        return unknown();
    }

    static bool scalar(const Value &v, std::uint64_t &bits, bool &sg) {
        if (auto *i = std::get_if<IntVal>(&v.node)) {
            bits = i->bits;
            sg = i->is_signed;
            return true;
        }
        if (auto *a = std::get_if<AddressVal>(&v.node)) {
            bits = a->v;
            sg = false;
            return true;
        }
        if (auto *h = std::get_if<Bytes32Val>(&v.node)) {
            bits = h->v;
            sg = false;
            return true;
        }
        return false;
    }

    // Mutation in place of a known compound value. Returns null on an
    // unevaluable path; out_raise set on a definite exception.
    Value *descend(const Expr &e, Value *root, AbsState &st, bool &out_raise,
                   bool &unknown_path, bool create_mapping_entries) const {
        if (std::holds_alternative<Ident>(e.node)) return root;
        if (auto *ix = std::get_if<Index>(&e.node)) {
            Value *base = descend(*ix->base, root, st, out_raise, unknown_path,
                                  create_mapping_entries);
            if (!base) return nullptr;
            EvalOut key = eval(*ix->index, st);
            if (key.exception) {
                out_raise = true;
                return nullptr;
            }
            if (!key.v) {
                unknown_path = true;
                return nullptr;
            }
            if (auto *mp = std::get_if<MappingVal>(&base->node)) {
                std::string k = value_encode(*key.v);
                auto it = mp->entries.find(k);
                if (it == mp->entries.end()) {
                    if (!create_mapping_entries) {
                        unknown_path = true;
                        return nullptr;
                    }
                    StructTable tab{&m};
                    it = mp->entries.emplace(k, zero_value(*mp->value_type, tab))
                             .first;
                }
                return &it->second;
            }
            if (auto *av = std::get_if<ArrayVal>(&base->node)) {
                std::uint64_t i;
                bool sg;
                if (!scalar(*key.v, i, sg) || i >= av->elems.size()) {
                    out_raise = true;
                    return nullptr;
                }
                return &av->elems[i];
            }
            unknown_path = true;
            return nullptr;
        }
        if (auto *mem = std::get_if<Member>(&e.node)) {
            Value *base = descend(*mem->base, root, st, out_raise, unknown_path,
                                  create_mapping_entries);
            if (!base) return nullptr;
            if (auto *sv = std::get_if<StructVal>(&base->node)) {
                const StructDef *sd = m.find_struct(sv->struct_name);
                if (sd)
                    for (std::size_t i = 0; i < sd->fields.size(); ++i)
                        if (sd->fields[i].name == mem->member)
                            return &sv->fields[i];
            }
            if (mem->member == "length" &&
                std::holds_alternative<ArrayVal>(base->node))
                return base; // caller handles length writes
            unknown_path = true;
            return nullptr;
        }
        unknown_path = true;
        return nullptr;
    }

    EvalOut write(const Expr &target, AssignOp op, const AbsValue &rhs,
                  AbsState &st) const {
        const std::string *root = root_of(target);
        if (!root) return unknown();

        bool is_length = false;
        if (auto *mem = std::get_if<Member>(&target.node))
            is_length = mem->member == "length";

        auto lit = st.locals.find(*root);
        bool in_locals = lit != st.locals.end();
        auto tit = st.tracked.find(*root);
        bool in_tracked = tit != st.tracked.end();

        if (!in_locals && !in_tracked) {
            // abstract storage or an already-unknown local: drop the write
            return unknown();
        }

        Value *rootv = in_locals ? &lit->second : &tit->second;
        bool raise_flag = false, unknown_path = false;
        Value *slot = descend(target, rootv, st, raise_flag, unknown_path, true);
        if (raise_flag) return raise();
        if (unknown_path || !slot) {
            // cannot place the write precisely
            if (in_locals) {
                st.locals.erase(lit); // local goes unknown
                return unknown();
            }
            throw DemoteRequest{{*root}};
        }

        if (is_length) {
            auto *av = std::get_if<ArrayVal>(&slot->node);
            if (!av || op != AssignOp::Assign) return raise();
            if (!rhs) {
                if (in_locals) {
                    st.locals.erase(lit);
                    return unknown();
                }
                throw DemoteRequest{{*root}};
            }
            std::uint64_t n;
            bool sg;
            if (!scalar(*rhs, n, sg)) return raise();
            StructTable tab{&m};
            while (av->elems.size() > n) av->elems.pop_back();
            while (av->elems.size() < n)
                av->elems.push_back(zero_value(*av->elem_type, tab));
            return known(*rhs);
        }

        if (op == AssignOp::Assign) {
            if (!rhs) {
                if (in_locals && std::holds_alternative<Ident>(target.node)) {
                    st.locals.erase(lit);
                    return unknown();
                }
                if (in_locals) {
                    st.locals.erase(lit); // partial unknown write: havoc whole
                    return unknown();
                }
                throw DemoteRequest{{*root}};
            }
            *slot = *rhs;
            return known(*slot);
        }

        std::uint64_t a, b;
        bool sa, sb;
        if (!scalar(*slot, a, sa)) return raise();
        if (!rhs || !scalar(*rhs, b, sb)) {
            if (in_locals) {
                st.locals.erase(lit);
                return unknown();
            }
            throw DemoteRequest{{*root}};
        }
        std::uint64_t out = op == AssignOp::AddAssign ? a + b : a - b;
        *slot = Value{IntVal{out, sa}};
        return known(*slot);
    }

    EvalOut push(const Expr &target, const AbsValue &v, AbsState &st) const {
        const std::string *root = root_of(target);
        if (!root) return unknown();
        auto lit = st.locals.find(*root);
        bool in_locals = lit != st.locals.end();
        auto tit = st.tracked.find(*root);
        bool in_tracked = tit != st.tracked.end();
        if (!in_locals && !in_tracked) return unknown();

        Value *rootv = in_locals ? &lit->second : &tit->second;
        bool raise_flag = false, unknown_path = false;
        Value *slot = descend(target, rootv, st, raise_flag, unknown_path, true);
        if (raise_flag) return raise();
        if (unknown_path || !slot) {
            if (in_locals) {
                st.locals.erase(lit);
                return unknown();
            }
            throw DemoteRequest{{*root}};
        }
        auto *av = std::get_if<ArrayVal>(&slot->node);
        if (!av) return raise();
        if (!v) {
            if (in_locals) {
                st.locals.erase(lit);
                return unknown();
            }
            throw DemoteRequest{{*root}};
        }
        av->elems.push_back(*v);
        return known(Value{IntVal{av->elems.size(), false}});
    }

    // ---------------------------------------------------------- statements

    void havoc_written(const Stmt &body, const Expr *post, AbsState &st) const {
        std::set<std::string> written;
        WriteScan ws{written};
        ws.stmt(body);
        if (post) ws.expr(*post);
        std::set<std::string> demote;
        for (const auto &w : written) {
            if (st.tracked.count(w)) demote.insert(w);
            st.locals.erase(w);
        }
        if (!demote.empty()) throw DemoteRequest{demote};
    }

    std::vector<Outcome> exec(const Stmt &s, AbsState st) const {
        if (auto *d = std::get_if<VarDeclStmt>(&s.node)) {
            if (demoted_locals.count("%" + d->name)) {
                if (d->init) {
                    EvalOut r = eval(*d->init, st);
                    if (r.exception) return {{AbsStatus::Exception, std::move(st)}};
                }
                st.locals.erase(d->name);
                return {{AbsStatus::Normal, std::move(st)}};
            }
            if (d->init) {
                EvalOut r = eval(*d->init, st);
                if (r.exception) return {{AbsStatus::Exception, std::move(st)}};
                if (r.v)
                    st.locals[d->name] = *r.v;
                else
                    st.locals.erase(d->name);
            } else {
                StructTable tab{&m};
                st.locals[d->name] = zero_value(*d->type, tab);
            }
            return {{AbsStatus::Normal, std::move(st)}};
        }
        if (auto *e = std::get_if<ExprStmt>(&s.node)) {
            EvalOut r = eval(*e->expr, st);
            return {{r.exception ? AbsStatus::Exception : AbsStatus::Normal,
                     std::move(st)}};
        }
        if (auto *em = std::get_if<EmitStmt>(&s.node)) {
            for (const auto &a : em->args) {
                EvalOut r = eval(*a, st);
                if (r.exception) return {{AbsStatus::Exception, std::move(st)}};
            }
            return {{AbsStatus::Normal, std::move(st)}};
        }
        if (auto *r = std::get_if<ReturnStmt>(&s.node)) {
            if (r->value) {
                EvalOut v = eval(*r->value, st);
                if (v.exception) return {{AbsStatus::Exception, std::move(st)}};
            }
            return {{AbsStatus::Returned, std::move(st)}};
        }
        if (auto *i = std::get_if<IfStmt>(&s.node)) {
            EvalOut c = eval(*i->cond, st);
            if (c.exception) return {{AbsStatus::Exception, std::move(st)}};
            std::vector<Outcome> out;
            bool take_true = true, take_false = true;
            if (c.v) {
                auto *bv = std::get_if<BoolVal>(&c.v->node);
                if (!bv) return {{AbsStatus::Exception, std::move(st)}};
                take_true = bv->v;
                take_false = !bv->v;
            }
            if (take_true) {
                auto r = exec(*i->then_branch, st);
                out.insert(out.end(), r.begin(), r.end());
            }
            if (take_false) {
                if (i->else_branch) {
                    auto r = exec(*i->else_branch, st);
                    out.insert(out.end(), r.begin(), r.end());
                } else {
                    out.push_back({AbsStatus::Normal, st});
                }
            }
            return out;
        }
        if (auto *w = std::get_if<WhileStmt>(&s.node))
            return exec_loop(nullptr, *w->cond, nullptr, *w->body, std::move(st));
        if (auto *f = std::get_if<ForStmt>(&s.node))
            return exec_loop(f->init.get(), *f->cond, f->post.get(), *f->body,
                             std::move(st));

        const auto &c = std::get<CompoundStmt>(s.node);
        std::vector<Outcome> frontier{{AbsStatus::Normal, std::move(st)}};
        for (const auto &stmt : c.stmts) {
            std::vector<Outcome> next;
            for (auto &o : frontier) {
                if (o.status != AbsStatus::Normal) {
                    next.push_back(std::move(o));
                    continue;
                }
                auto r = exec(*stmt, std::move(o.st));
                next.insert(next.end(), std::make_move_iterator(r.begin()),
                            std::make_move_iterator(r.end()));
            }
            frontier = std::move(next);
            if (static_cast<long>(frontier.size()) > fork_cap) {
                if (notes)
                    notes->push_back({Severity::Warning, "fork-cap",
                                      "fork cap reached inside an action", {}});
                frontier.resize(fork_cap);
            }
        }
        return frontier;
    }

    std::vector<Outcome> exec_loop(const Stmt *init, const Expr &cond,
                                   const Expr *post, const Stmt &body,
                                   AbsState st) const {
        std::vector<Outcome> done;
        std::vector<AbsState> frontier;

        if (init) {
            auto r = exec(*init, std::move(st));
            for (auto &o : r) {
                if (o.status == AbsStatus::Normal)
                    frontier.push_back(std::move(o.st));
                else
                    done.push_back(std::move(o));
            }
        } else {
            frontier.push_back(std::move(st));
        }

        for (long iter = 0; iter <= loop_cap && !frontier.empty(); ++iter) {
            std::vector<AbsState> next;
            for (auto &fs : frontier) {
                EvalOut c = eval(cond, fs);
                if (c.exception) {
                    done.push_back({AbsStatus::Exception, std::move(fs)});
                    continue;
                }
                if (!c.v) {
                    // condition depends on abstract data: fold the loop into
                    // one pass that havocs whatever the body writes
                    AbsState folded = fs;
                    havoc_written(body, post, folded);
                    if (contains_return(body))
                        done.push_back({AbsStatus::Returned, folded});
                    done.push_back({AbsStatus::Normal, std::move(folded)});
                    continue;
                }
                auto *bv = std::get_if<BoolVal>(&c.v->node);
                if (!bv) {
                    done.push_back({AbsStatus::Exception, std::move(fs)});
                    continue;
                }
                if (!bv->v) {
                    done.push_back({AbsStatus::Normal, std::move(fs)});
                    continue;
                }
                auto r = exec(body, std::move(fs));
                for (auto &o : r) {
                    if (o.status != AbsStatus::Normal) {
                        done.push_back(std::move(o));
                        continue;
                    }
                    if (post) {
                        EvalOut p = eval(*post, o.st);
                        if (p.exception) {
                            done.push_back({AbsStatus::Exception, std::move(o.st)});
                            continue;
                        }
                    }
                    next.push_back(std::move(o.st));
                }
            }
            if (iter == loop_cap && !next.empty()) {
                // concrete iteration refuses to settle: same treatment as an
                // unknown condition, havoc and fall through
                if (notes)
                    notes->push_back({Severity::Warning, "loop-cap",
                                      "loop iteration cap reached", {}});
                for (auto &ns : next) {
                    havoc_written(body, post, ns);
                    if (contains_return(body))
                        done.push_back({AbsStatus::Returned, ns});
                    done.push_back({AbsStatus::Normal, std::move(ns)});
                }
                next.clear();
            }
            frontier = std::move(next);
        }
        return done;
    }
};

std::string kripke_key(int control, const std::vector<std::pair<std::string, Value>> &tracked,
                       int last_label) {
    std::ostringstream os;
    os << control << "#" << last_label << "#";
    for (const auto &[n, v] : tracked) os << n << "=" << value_encode(v) << ";";
    return os.str();
}

} // namespace

std::size_t default_state_cap() {
    if (const char *env = std::getenv("VERISOL_STATE_CAP")) {
        char *end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return 1000000;
}

KripkeResult build_kripke(const ContractModel &m,
                          const std::map<std::string, Provenance> &provenance,
                          std::size_t state_cap,
                          const std::vector<std::string> *original_states) {
    KripkeResult res;

    auto classes = classify_variables(m);

    // labels: augmented models carry them in provenance, a plain model gets
    // one per transition in declaration order
    std::map<std::string, Provenance> prov = provenance;
    int max_label = 0;
    for (const auto &[n, p] : prov) max_label = std::max(max_label, p.label);
    if (prov.empty()) {
        int label = 0;
        for (const auto &t : m.transitions) {
            Provenance p;
            p.origin = t.name;
            p.role = t.name.rfind("fallback@", 0) == 0 ? EdgeRole::Fallback
                     : t.name == "constructor"         ? EdgeRole::Constructor
                                                       : EdgeRole::GuardEntry;
            p.label = ++label;
            prov.emplace(t.name, p);
        }
        max_label = label;
    }

    TimeRewriteResult tr = rewrite_time_guards(m, classes, max_label);
    for (const auto &[n, p] : tr.loop_provenance) prov.emplace(n, p);
    res.notes.insert(res.notes.end(), tr.notes.begin(), tr.notes.end());
    const ContractModel &model = tr.model;

    std::set<std::string> original;
    if (original_states) {
        original.insert(original_states->begin(), original_states->end());
    } else {
        original.insert(model.states.begin(), model.states.end());
    }

    // the clock variable the rewrite may have introduced is a time variable
    auto model_classes = classes;
    for (const auto &v : model.vars)
        if (!model_classes.count(v.name))
            model_classes[v.name] = VariableClass::Time;

    std::set<std::string> demoted_storage;
    std::set<std::string> demoted_locals;

    for (int attempt = 0;; ++attempt) {
        if (attempt > 256) {
            res.error = KripkeBuildError{"demotion did not converge", state_cap};
            return res;
        }

        std::set<std::string> tracked_vars;
        for (const auto &v : model.vars) {
            auto c = model_classes.find(v.name);
            if (c != model_classes.end() && c->second != VariableClass::Abstract &&
                !demoted_storage.count(v.name))
                tracked_vars.insert(v.name);
        }
        if (!demoted_storage.count(kCreationTime))
            tracked_vars.insert(kCreationTime);

        Kripke ks;
        ks.control_names = model.states;
        std::map<std::string, int> control_index;
        for (std::size_t i = 0; i < model.states.size(); ++i)
            control_index[model.states[i]] = static_cast<int>(i);
        for (const auto &f : model.finals) {
            auto it = control_index.find(f);
            if (it != control_index.end()) ks.final_controls.insert(it->second);
        }
        for (const auto &[n, p] : prov) ks.label_names[p.label] = n;
        for (const auto &[n, p] : prov) {
            LegendRow row;
            row.label = p.label;
            row.transition = n;
            row.origin = p.origin;
            row.role = edge_role_name(p.role);
            if (const Transition *t = model.find_transition(n)) {
                row.from = t->from;
                row.to = t->to;
                if (t->guard)
                    row.text = expr_to_string(*t->guard);
                else if (t->action)
                    row.text = stmt_to_string(*t->action);
            }
            ks.legend_rows.push_back(row);
        }
        std::sort(ks.legend_rows.begin(), ks.legend_rows.end(),
                  [](const LegendRow &a, const LegendRow &b) {
                      return a.label < b.label;
                  });
        ks.tracked_names.assign(tracked_vars.begin(), tracked_vars.end());
        ks.demoted.assign(demoted_storage.begin(), demoted_storage.end());
        for (const auto &l : demoted_locals) ks.demoted.push_back(l);

        std::map<std::string, std::vector<const Transition *>> edges_from;
        for (const auto &t : model.transitions)
            edges_from[t.from].push_back(&t);

        AbsExec ex{model, demoted_locals, 4096, 4096, &res.notes};

        StructTable tab{&model};
        AbsState init_state;
        for (const auto &v : model.vars)
            if (tracked_vars.count(v.name))
                init_state.tracked[v.name] = zero_value(*v.type, tab);
        if (tracked_vars.count(kCreationTime))
            init_state.tracked[kCreationTime] = Value{IntVal{0, false}};

        auto to_tracked_vec = [](const AbsState &st) {
            std::vector<std::pair<std::string, Value>> out;
            for (const auto &[n, v] : st.tracked) out.emplace_back(n, v);
            for (const auto &[n, v] : st.locals) out.emplace_back("%" + n, v);
            return out;
        };

        std::map<std::string, int> index;
        std::map<std::string, std::set<std::string>> observed;
        bool demoted_now = false;
        std::set<std::string> to_demote;

        auto intern = [&](int control, const AbsState &st, int last_label,
                          int &out_id) -> bool {
            auto vec = to_tracked_vec(st);
            std::string key = kripke_key(control, vec, last_label);
            auto it = index.find(key);
            if (it != index.end()) {
                out_id = it->second;
                return false;
            }
            int id = static_cast<int>(ks.states.size());
            index.emplace(std::move(key), id);
            KripkeState kst;
            kst.control = control;
            kst.tracked = vec;
            kst.last_label = last_label;
            ks.states.push_back(std::move(kst));
            ks.succ.emplace_back();
            for (const auto &[n, v] : vec) {
                auto &vals = observed[n];
                vals.insert(value_encode(v));
                if (vals.size() > 64) {
                    to_demote.insert(n);
                    demoted_now = true;
                }
            }
            out_id = id;
            return true;
        };

        try {
            int init_id;
            auto ii = control_index.find(model.initial);
            if (ii == control_index.end()) {
                res.error = KripkeBuildError{"initial state missing", state_cap};
                return res;
            }
            intern(ii->second, init_state, 0, init_id);
            ks.initial = init_id;

            std::vector<int> worklist{init_id};
            while (!worklist.empty() && !demoted_now) {
                int cur = worklist.back();
                worklist.pop_back();
                // interning below may grow ks.states, so copy out what we need
                int cur_control = ks.states[cur].control;
                std::vector<std::pair<std::string, Value>> cur_tracked =
                    ks.states[cur].tracked;
                const std::string &cname = ks.control_names[cur_control];

                AbsState ast;
                for (const auto &[n, v] : cur_tracked) {
                    if (!n.empty() && n[0] == '%')
                        ast.locals[n.substr(1)] = v;
                    else
                        ast.tracked[n] = v;
                }

                auto eit = edges_from.find(cname);
                if (eit == edges_from.end()) continue;
                for (const Transition *t : eit->second) {
                    const Provenance *p = nullptr;
                    auto pit = prov.find(t->name);
                    if (pit != prov.end()) p = &pit->second;
                    int label = p ? p->label : 0;

                    AbsState start = ast;
                    if (t->guard) {
                        AbsExec::EvalOut g = ex.eval(*t->guard, start);
                        if (g.exception) continue;
                        if (g.v) {
                            auto *bv = std::get_if<BoolVal>(&g.v->node);
                            if (!bv || !bv->v) continue;
                        }
                    }

                    std::vector<Outcome> outs;
                    if (t->action)
                        outs = ex.exec(*t->action, std::move(start));
                    else
                        outs.push_back({AbsStatus::Normal, std::move(start)});

                    auto tgt = control_index.find(t->to);
                    if (tgt == control_index.end()) continue;
                    bool clears = original.count(t->to) != 0;

                    for (auto &o : outs) {
                        if (o.status == AbsStatus::Exception) continue;
                        if (clears) o.st.locals.clear();
                        int succ_id;
                        bool fresh = intern(tgt->second, o.st, label, succ_id);
                        ks.edges.push_back({cur, succ_id, label});
                        ks.succ[cur].push_back(
                            static_cast<int>(ks.edges.size()) - 1);
                        if (fresh) worklist.push_back(succ_id);
                        if (ks.states.size() > state_cap) {
                            res.error = KripkeBuildError{
                                "state cap exceeded", state_cap};
                            return res;
                        }
                        if (demoted_now) break;
                    }
                    if (demoted_now) break;
                }
            }
        } catch (const DemoteRequest &dr) {
            for (const auto &n : dr.names) {
                if (model.find_var(n) || n == kCreationTime)
                    to_demote.insert(n);
                else
                    to_demote.insert("%" + n);
            }
            demoted_now = true;
        }

        if (demoted_now) {
            for (const auto &n : to_demote) {
                if (!n.empty() && n[0] == '%')
                    demoted_locals.insert(n);
                else
                    demoted_storage.insert(n);
            }
            res.notes.push_back(
                {Severity::Note, "demoted",
                 "value cap reached, rebuilding without: " +
                     [&] {
                         std::string s;
                         for (const auto &n : to_demote) {
                             if (!s.empty()) s += ", ";
                             s += n;
                         }
                         return s;
                     }(),
                 {}});
            continue;
        }

        // deadlock marking
        for (std::size_t i = 0; i < ks.states.size(); ++i) {
            KripkeState &s = ks.states[i];
            s.deadlock =
                ks.succ[i].empty() && !ks.final_controls.count(s.control);
        }

        res.kripke = std::move(ks);
        return res;
    }
}

KripkeResult build_initial_kripke(const ContractModel &m, std::size_t state_cap) {
    ConformanceResult cf = conformance(m);
    return build_kripke(cf.model, {}, state_cap, nullptr);
}

KripkeResult build_augmented_kripke(const AugmentedModel &am,
                                    std::size_t state_cap) {
    return build_kripke(am.model, am.provenance, state_cap, &am.original_states);
}

} // namespace verisol
