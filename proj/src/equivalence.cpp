#include "verisol/equivalence.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

namespace verisol {

// ------------------------------------------------------------------ labels

static std::string ret_key(const std::optional<Value> &r) {
    return r ? value_encode(*r) : std::string("-");
}

bool UnitLabel::operator<(const UnitLabel &o) const {
    return std::tie(origin, kind) < std::tie(o.origin, o.kind) ||
           (origin == o.origin && kind == o.kind &&
            ret_key(returned) < ret_key(o.returned));
}

bool UnitLabel::operator==(const UnitLabel &o) const {
    return origin == o.origin && kind == o.kind &&
           ret_key(returned) == ret_key(o.returned);
}

std::string UnitLabel::display() const {
    std::string s = origin;
    if (kind == UnitKind::Rev) {
        s += " [revert]";
    } else if (returned) {
        s += " -> " + value_to_string(*returned);
    }
    return s;
}

// ------------------------------------------------------------------- plans

namespace {

// One concrete call the explorer will attempt from every quiescent node.
struct CallPlan {
    std::string origin; // transition name, or "fallback"
    std::vector<Value> args;
    CallCtx ctx;
    std::vector<bool> script;
};

struct Sig {
    std::string origin;
    std::vector<Param> params;
};

void arg_options(const Type &t, const Domains &d, const StructTable &tab,
                 std::vector<Value> &out) {
    if (auto *n = std::get_if<NamedType>(&t.node)) {
        if (n->name == "bool") {
            out.push_back(Value{BoolVal{false}});
            out.push_back(Value{BoolVal{true}});
            return;
        }
        if (n->name == "address") {
            for (auto a : d.senders) out.push_back(Value{AddressVal{a}});
            return;
        }
        if (n->name == "bytes32") {
            for (auto h : d.hashes) out.push_back(Value{Bytes32Val{h}});
            return;
        }
        if (n->name.rfind("uint", 0) == 0) {
            for (auto u : d.uints) out.push_back(Value{IntVal{u, false}});
            return;
        }
        if (n->name.rfind("int", 0) == 0) {
            for (auto u : d.uints) out.push_back(Value{IntVal{u, true}});
            return;
        }
    }
    if (auto *a = std::get_if<ArrayType>(&t.node)) {
        if (auto *en = std::get_if<NamedType>(&a->elem->node)) {
            if (en->name.rfind("uint", 0) == 0) {
                for (const auto &xs : d.uint_arrays) {
                    ArrayVal av;
                    av.elem_type = a->elem;
                    for (auto x : xs) av.elems.push_back(Value{IntVal{x, false}});
                    out.push_back(Value{std::move(av)});
                }
                return;
            }
            if (en->name == "bytes32") {
                for (const auto &xs : d.hash_arrays) {
                    ArrayVal av;
                    av.elem_type = a->elem;
                    for (auto x : xs) av.elems.push_back(Value{Bytes32Val{x}});
                    out.push_back(Value{std::move(av)});
                }
                return;
            }
        }
    }
    // anything else gets a single zero representative
    out.push_back(zero_value(t, tab));
}

std::vector<CallPlan> make_plans(const std::vector<Sig> &sigs,
                                 const Domains &d, const StructTable &tab) {
    std::vector<CallPlan> plans;
    std::vector<std::vector<bool>> scripts{{}};
    if (d.enumerate_payment_failure) scripts.push_back({false});

    for (const auto &sig : sigs) {
        std::vector<std::vector<Value>> tuples{{}};
        for (const auto &p : sig.params) {
            std::vector<Value> opts;
            arg_options(*p.type, d, tab, opts);
            std::vector<std::vector<Value>> next;
            for (const auto &tu : tuples) {
                for (const auto &o : opts) {
                    if (next.size() >= 256) break;
                    auto t2 = tu;
                    t2.push_back(o);
                    next.push_back(std::move(t2));
                }
            }
            tuples = std::move(next);
        }
        for (const auto &args : tuples)
            for (auto sender : d.senders)
                for (auto value : d.values)
                    for (auto now : d.nows)
                        for (const auto &sc : scripts) {
                            CallPlan cp;
                            cp.origin = sig.origin;
                            cp.args = args;
                            cp.ctx.sender = sender;
                            cp.ctx.value = value;
                            cp.ctx.now = now;
                            cp.script = sc;
                            plans.push_back(std::move(cp));
                        }
    }
    return plans;
}

// node interning by full configuration
struct NodePool {
    Lts &lts;
    std::map<std::string, int> index;

    int intern(const std::string &control, const LedgerState &ledger,
               bool *fresh = nullptr) {
        std::string key = control + "\n" + ledger_to_string(ledger);
        auto it = index.find(key);
        if (it != index.end()) {
            if (fresh) *fresh = false;
            return it->second;
        }
        int id = static_cast<int>(lts.nodes.size());
        lts.nodes.push_back({control, ledger, false});
        lts.out.emplace_back();
        index.emplace(std::move(key), id);
        if (fresh) *fresh = true;
        return id;
    }
};

void add_edge(Lts &lts, int from, int to, UnitLabel unit,
              std::vector<std::string> path, std::vector<std::string> kinds,
              std::set<std::tuple<int, std::string, int>> &seen) {
    std::string k = unit.origin + "#" +
                    (unit.kind == UnitKind::Rev ? "R" : "F") + "#" +
                    ret_key(unit.returned);
    if (!seen.insert({from, k, to}).second) return;
    LtsEdge e;
    e.from = from;
    e.to = to;
    e.unit = std::move(unit);
    e.path = std::move(path);
    e.path_kinds = std::move(kinds);
    lts.out[from].push_back(static_cast<int>(lts.edges.size()));
    lts.edges.push_back(std::move(e));
}

} // namespace

// ------------------------------------------------- initial-model explorer

Lts build_lts(const ContractModel &m, const Domains &d) {
    Lts lts;
    StructTable tab{&m};

    std::vector<Sig> sigs;
    for (const auto &t : m.transitions) sigs.push_back({t.name, t.params});
    if (m.fallback_action) sigs.push_back({"fallback", {}});
    std::vector<CallPlan> plans = make_plans(sigs, d, tab);

    CallCtx dep;
    dep.sender = d.senders.empty() ? 0 : d.senders[0];
    dep.now = d.nows.empty() ? 0 : d.nows[0];
    ScriptedEnvironment dep_env;
    ContractConfig cfg0 = deploy_contract(m, dep, dep_env);

    NodePool pool{lts, {}};
    lts.initial = pool.intern(cfg0.state, cfg0.ledger);

    std::set<std::tuple<int, std::string, int>> seen;
    std::deque<std::pair<int, int>> frontier{{lts.initial, 0}};
    std::set<int> queued{lts.initial};

    while (!frontier.empty()) {
        auto [cur, depth] = frontier.front();
        frontier.pop_front();
        if (depth >= d.depth) {
            lts.nodes[cur].horizon = true;
            continue;
        }
        bool truncated = false;
        for (const auto &plan : plans) {
            ContractConfig cfg{lts.nodes[cur].control, lts.nodes[cur].ledger};
            ScriptedEnvironment env;
            env.outcomes = plan.script;
            std::string call = plan.origin;
            if (plan.origin == "fallback")
                while (m.find_transition(call)) call += "_";
            FireResult fr =
                fire_transition(m, cfg, call, plan.args, plan.ctx, env);

            UnitLabel unit;
            unit.origin = plan.origin;
            int to = -1;
            switch (fr.verdict) {
            case FireVerdict::Transition:
            case FireVerdict::TransitionRet:
            case FireVerdict::Fallback: {
                unit.kind = UnitKind::Fin;
                unit.returned = fr.returned;
                if (lts.nodes.size() >= d.node_cap) {
                    truncated = true;
                    break;
                }
                bool fresh = false;
                to = pool.intern(cfg.state, cfg.ledger, &fresh);
                if (fresh || !queued.count(to)) {
                    queued.insert(to);
                    frontier.push_back({to, depth + 1});
                }
                break;
            }
            case FireVerdict::GuardException:
            case FireVerdict::ActionException:
            case FireVerdict::FallbackException:
                unit.kind = UnitKind::Rev;
                to = cur;
                break;
            default: // not enabled here
                break;
            }
            if (truncated) break;
            if (to >= 0)
                add_edge(lts, cur, to, std::move(unit), {plan.origin},
                         {"alpha"}, seen);
        }
        if (truncated) lts.nodes[cur].horizon = true;
    }
    return lts;
}

// ----------------------------------------------- augmented-model explorer

namespace {

struct WalkResult {
    bool emitted = false;
    UnitLabel unit;
    std::string control;
    LedgerState ledger;
    std::vector<std::string> path;
    std::vector<std::string> kinds;
};

// Drives one whole call through the fine-grained edges: the entry edge binds
// the frame, then each landed edge executes its fragment until an original
// state is reached. A raise anywhere surfaces as the revert edge.
WalkResult walk_unit(const AugmentedModel &am, const Transition &entry,
                     const std::string &display_origin, const LedgerState &base,
                     const std::vector<Value> &args, const CallCtx &ctx,
                     ExternalEnvironment &env, std::size_t &beta_steps) {
    const ContractModel &M = am.model;
    WalkResult w;
    w.unit.origin = display_origin;

    ExecState st;
    st.working = base;
    st.ctx = ctx;
    st.env = &env;
    st.model = &M;
    st.push_frame();
    if (args.size() != entry.params.size()) return w;
    for (std::size_t i = 0; i < args.size(); ++i)
        st.declare_local(entry.params[i].name, args[i]);

    std::string rev_name; // revert edge available for this origin, if any
    auto finish_revert = [&]() {
        w.emitted = true;
        w.unit.kind = UnitKind::Rev;
        w.control = entry.from;
        w.ledger = base;
        w.path = {entry.name};
        w.kinds = {"beta"};
        if (!rev_name.empty()) {
            w.path.push_back(rev_name);
            w.kinds.push_back("alpha");
        } else {
            w.kinds.back() = "alpha";
        }
    };

    if (entry.guard) {
        EvalResult g = eval_expr(*entry.guard, st);
        if (g.status.kind != StatusKind::Normal) {
            finish_revert();
            return w;
        }
        auto *b = std::get_if<BoolVal>(&g.value.node);
        if (!b) {
            finish_revert();
            return w;
        }
        if (!b->v) return w; // not enabled
    }
    st.working.balances[st.contract_address] += ctx.value;

    w.path.push_back(entry.name);
    std::string cur = entry.to;
    std::optional<Value> ret;

    // look ahead for this origin's revert edge before walking
    for (const auto &t : M.transitions) {
        const Provenance *p = am.prov(t.name);
        if (p && p->origin == am.prov(entry.name)->origin &&
            p->role == EdgeRole::Revert)
            rev_name = t.name;
    }

    std::size_t steps = 0;
    while (!am.is_original_state(cur)) {
        if (++steps > 20000) return WalkResult{}; // wiring runaway, drop
        std::vector<const Transition *> cand;
        for (const auto &t : M.transitions)
            if (t.from == cur) cand.push_back(&t);
        if (cand.empty()) return WalkResult{};

        const Transition *pick = nullptr;
        const Transition *no_revert = nullptr;
        for (const auto *c : cand) {
            const Provenance *p = am.prov(c->name);
            if (p && p->role == EdgeRole::NoRevert) no_revert = c;
        }
        if (no_revert) {
            pick = no_revert;
        } else if (cand.size() > 1 && cand[0]->guard) {
            // complementary guard pair; the condition is evaluated once
            EvalResult g = eval_expr(*cand[0]->guard, st);
            if (g.status.kind != StatusKind::Normal) {
                finish_revert();
                return w;
            }
            auto *b = std::get_if<BoolVal>(&g.value.node);
            if (!b) {
                finish_revert();
                return w;
            }
            pick = b->v ? cand[0] : cand[1];
        } else {
            pick = cand[0];
        }

        if (pick->action) {
            ExecStatus r = exec_stmt(*pick->action, st);
            if (r.kind == StatusKind::Exception) {
                finish_revert();
                return w;
            }
            if (r.kind == StatusKind::Returned) ret = r.returned;
        }
        w.path.push_back(pick->name);
        cur = pick->to;
        if (!am.is_original_state(cur)) ++beta_steps;
    }

    st.working.now = ctx.now;
    st.working.block_number = ctx.block_number;
    w.emitted = true;
    w.unit.kind = UnitKind::Fin;
    if (entry.returns) {
        StructTable tab{&M};
        w.unit.returned = ret ? *ret : zero_value(*entry.returns, tab);
    }
    w.control = cur;
    w.ledger = std::move(st.working);
    w.kinds.assign(w.path.size(), "beta");
    w.kinds.back() = "alpha";
    return w;
}

} // namespace

Lts build_lts(const AugmentedModel &am, const Domains &d) {
    Lts lts;
    const ContractModel &M = am.model;
    StructTable tab{&M};

    // entry edges grouped by source state; call signatures keyed by origin
    std::vector<const Transition *> entries;
    std::map<std::string, const Transition *> entry_of;
    for (const auto &t : M.transitions) {
        const Provenance *p = am.prov(t.name);
        if (p && p->role == EdgeRole::GuardEntry) {
            entries.push_back(&t);
            entry_of.emplace(p->origin, &t);
        }
    }

    std::vector<Sig> sigs;
    bool fallback_added = false;
    for (const auto &[origin, e] : entry_of) {
        if (origin == "constructor") continue;
        if (origin.rfind("fallback@", 0) == 0) {
            if (!fallback_added) sigs.push_back({"fallback", {}});
            fallback_added = true;
            continue;
        }
        sigs.push_back({origin, e->params});
    }
    std::vector<CallPlan> plans = make_plans(sigs, d, tab);

    // deploy: zero storage, then the constructor unit runs off the books
    CallCtx dep;
    dep.sender = d.senders.empty() ? 0 : d.senders[0];
    dep.now = d.nows.empty() ? 0 : d.nows[0];
    LedgerState base;
    base.now = dep.now;
    for (const auto &v : M.vars)
        base.storage.emplace(v.name, zero_value(*v.type, tab));
    base.storage.emplace(kCreationTime, Value{IntVal{dep.now, false}});

    std::string start = M.initial;
    auto ctor = entry_of.find("constructor");
    if (ctor != entry_of.end() && ctor->second->from == M.initial) {
        ScriptedEnvironment env;
        std::size_t dummy = 0;
        WalkResult w = walk_unit(am, *ctor->second, "constructor", base, {},
                                 dep, env, dummy);
        if (w.emitted && w.unit.kind == UnitKind::Fin) {
            start = w.control;
            base = std::move(w.ledger);
        }
    }

    NodePool pool{lts, {}};
    lts.initial = pool.intern(start, base);

    std::set<std::tuple<int, std::string, int>> seen;
    std::deque<std::pair<int, int>> frontier{{lts.initial, 0}};
    std::set<int> queued{lts.initial};

    while (!frontier.empty()) {
        auto [cur, depth] = frontier.front();
        frontier.pop_front();
        if (depth >= d.depth) {
            lts.nodes[cur].horizon = true;
            continue;
        }
        bool truncated = false;
        for (const auto &plan : plans) {
            // locate this origin's entry edge at the current control state
            const Transition *entry = nullptr;
            for (const auto *e : entries) {
                if (e->from != lts.nodes[cur].control) continue;
                const Provenance *p = am.prov(e->name);
                if (plan.origin == "fallback") {
                    if (p->origin.rfind("fallback@", 0) == 0) entry = e;
                } else if (p->origin == plan.origin) {
                    entry = e;
                }
                if (entry) break;
            }
            if (!entry) continue;

            ScriptedEnvironment env;
            env.outcomes = plan.script;
            WalkResult w =
                walk_unit(am, *entry, plan.origin, lts.nodes[cur].ledger,
                          plan.args, plan.ctx, env, lts.beta_steps);
            if (!w.emitted) continue;

            int to;
            if (w.unit.kind == UnitKind::Rev) {
                to = cur;
            } else {
                if (lts.nodes.size() >= d.node_cap) {
                    truncated = true;
                    break;
                }
                bool fresh = false;
                to = pool.intern(w.control, w.ledger, &fresh);
                if (fresh || !queued.count(to)) {
                    queued.insert(to);
                    frontier.push_back({to, depth + 1});
                }
            }
            add_edge(lts, cur, to, std::move(w.unit), std::move(w.path),
                     std::move(w.kinds), seen);
        }
        if (truncated) lts.nodes[cur].horizon = true;
    }
    return lts;
}

// ------------------------------------------------------------ bisimulation

BisimResult check_weak_bisim(const Lts &a, const Lts &b) {
    BisimResult res;
    std::size_t na = a.nodes.size(), nb = b.nodes.size();
    std::vector<char> rel(na * nb, 0);
    auto at = [&](std::size_t i, std::size_t j) -> char & {
        return rel[i * nb + j];
    };

    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            if (a.nodes[i].horizon || b.nodes[j].horizon) {
                at(i, j) = 1;
            } else {
                at(i, j) = a.nodes[i].control == b.nodes[j].control &&
                           ledger_equal(a.nodes[i].ledger, b.nodes[j].ledger);
            }
        }

    std::map<std::pair<int, int>, std::string> fail_action;
    auto matches = [&](const Lts &x, int xi, const LtsEdge &e, const Lts &y,
                       int yj, bool a_side) {
        (void)x;
        (void)xi;
        for (int k : y.out[yj]) {
            const LtsEdge &f = y.edges[k];
            if (!(f.unit == e.unit)) continue;
            if (a_side ? at(e.to, f.to) : at(f.to, e.to)) return true;
        }
        return false;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t j = 0; j < nb; ++j) {
                if (!at(i, j)) continue;
                if (a.nodes[i].horizon || b.nodes[j].horizon) continue;
                std::string broke;
                for (int k : a.out[i]) {
                    const LtsEdge &e = a.edges[k];
                    if (!matches(a, static_cast<int>(i), e, b,
                                 static_cast<int>(j), true)) {
                        broke = e.unit.display();
                        break;
                    }
                }
                if (broke.empty()) {
                    for (int k : b.out[j]) {
                        const LtsEdge &e = b.edges[k];
                        if (!matches(b, static_cast<int>(j), e, a,
                                     static_cast<int>(i), false)) {
                            broke = e.unit.display();
                            break;
                        }
                    }
                }
                if (!broke.empty()) {
                    at(i, j) = 0;
                    fail_action[{static_cast<int>(i), static_cast<int>(j)}] =
                        broke;
                    changed = true;
                }
            }
    }

    res.related = na && nb && at(a.initial, b.initial);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            if (at(i, j))
                res.relation.push_back(
                    {static_cast<int>(i), static_cast<int>(j)});
    res.relation_size = res.relation.size();

    if (!res.related && na && nb) {
        BisimWitness w;
        w.side_a_state = a.nodes[a.initial].control + "#" +
                         std::to_string(a.initial);
        w.side_b_state = b.nodes[b.initial].control + "#" +
                         std::to_string(b.initial);
        auto it = fail_action.find({a.initial, b.initial});
        if (it != fail_action.end()) w.action = it->second;
        res.witness = w;
    }
    return res;
}

} // namespace verisol
