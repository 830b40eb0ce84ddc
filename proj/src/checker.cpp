#include "verisol/checker.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace verisol {

namespace {

// Terminal states (final or deadlocked) get a virtual stutter self-loop with
// label 0 so that path quantification is over infinite paths throughout.
struct Succs {
    std::vector<std::vector<std::pair<int, int>>> out; // (target, label)
    std::vector<std::vector<int>> pred;

    explicit Succs(const Kripke &ks) {
        std::size_t n = ks.states.size();
        out.resize(n);
        pred.resize(n);
        for (std::size_t s = 0; s < n; ++s) {
            for (int ei : ks.succ[s]) {
                const KripkeEdge &e = ks.edges[ei];
                out[s].push_back({e.to, e.label});
            }
            if (out[s].empty()) out[s].push_back({static_cast<int>(s), 0});
        }
        for (std::size_t s = 0; s < n; ++s)
            for (auto [t, l] : out[s]) pred[t].push_back(static_cast<int>(s));
    }
};

using Bits = std::vector<char>;

struct Labeler {
    const Kripke &ks;
    const AtomMap &atoms;
    Succs succs;
    std::map<const Ctl *, Bits> memo;

    Labeler(const Kripke &k, const AtomMap &a) : ks(k), atoms(a), succs(k) {}

    std::size_t n() const { return ks.states.size(); }

    Bits atom_bits(const std::string &name) const {
        Bits v(n(), 0);
        auto it = atoms.labels.find(name);
        if (it != atoms.labels.end()) {
            for (std::size_t s = 0; s < n(); ++s)
                v[s] = it->second.count(ks.states[s].last_label) ? 1 : 0;
            return v;
        }
        if (name == "deadlock") {
            for (std::size_t s = 0; s < n(); ++s)
                v[s] = ks.states[s].deadlock ? 1 : 0;
        }
        return v;
    }

    static Bits bnot(Bits v) {
        for (auto &c : v) c = !c;
        return v;
    }

    Bits ex(const Bits &g) const {
        Bits v(n(), 0);
        for (std::size_t s = 0; s < n(); ++s)
            for (auto [t, l] : succs.out[s])
                if (g[t]) {
                    v[s] = 1;
                    break;
                }
        return v;
    }

    // least fixpoint: q | (p & EX result)
    Bits eu(const Bits &p, const Bits &q) const {
        Bits v = q;
        std::deque<int> work;
        for (std::size_t s = 0; s < n(); ++s)
            if (v[s]) work.push_back(static_cast<int>(s));
        while (!work.empty()) {
            int t = work.front();
            work.pop_front();
            for (int s : succs.pred[t]) {
                if (!v[s] && p[s]) {
                    v[s] = 1;
                    work.push_back(s);
                }
            }
        }
        return v;
    }

    // greatest fixpoint: p & EX result
    Bits eg(const Bits &p) const {
        Bits v = p;
        std::vector<int> cnt(n(), 0);
        std::deque<int> dead;
        for (std::size_t s = 0; s < n(); ++s) {
            if (!v[s]) continue;
            for (auto [t, l] : succs.out[s])
                if (v[t]) ++cnt[s];
            if (cnt[s] == 0) dead.push_back(static_cast<int>(s));
        }
        while (!dead.empty()) {
            int s = dead.front();
            dead.pop_front();
            if (!v[s]) continue;
            v[s] = 0;
            for (int r : succs.pred[s]) {
                if (!v[r]) continue;
                if (--cnt[r] == 0) dead.push_back(r);
            }
        }
        return v;
    }

    Bits sat(const CtlPtr &f) {
        auto it = memo.find(f.get());
        if (it != memo.end()) return it->second;
        Bits v = compute(f);
        memo.emplace(f.get(), v);
        return v;
    }

    Bits compute(const CtlPtr &f) {
        if (auto *a = std::get_if<CtlAtom>(&f->node)) return atom_bits(a->name);
        if (auto *c = std::get_if<CtlConst>(&f->node))
            return Bits(n(), c->value ? 1 : 0);
        if (auto *u = std::get_if<CtlUnaryNode>(&f->node)) {
            Bits g = sat(u->operand);
            switch (u->op) {
            case CtlUnary::Not: return bnot(std::move(g));
            case CtlUnary::EX: return ex(g);
            case CtlUnary::AX: return bnot(ex(bnot(std::move(g))));
            case CtlUnary::EF: return eu(Bits(n(), 1), g);
            case CtlUnary::AF: return bnot(eg(bnot(std::move(g))));
            case CtlUnary::EG: return eg(g);
            case CtlUnary::AG:
                return bnot(eu(Bits(n(), 1), bnot(std::move(g))));
            }
        }
        const auto &b = std::get<CtlBinaryNode>(f->node);
        Bits l = sat(b.lhs);
        Bits r = sat(b.rhs);
        std::size_t m = n();
        switch (b.op) {
        case CtlBinary::And: {
            Bits v(m, 0);
            for (std::size_t s = 0; s < m; ++s) v[s] = l[s] && r[s];
            return v;
        }
        case CtlBinary::Or: {
            Bits v(m, 0);
            for (std::size_t s = 0; s < m; ++s) v[s] = l[s] || r[s];
            return v;
        }
        case CtlBinary::Implies: {
            Bits v(m, 0);
            for (std::size_t s = 0; s < m; ++s) v[s] = !l[s] || r[s];
            return v;
        }
        case CtlBinary::EU: return eu(l, r);
        case CtlBinary::EW: {
            Bits a = eg(l);
            Bits b2 = eu(l, r);
            for (std::size_t s = 0; s < m; ++s) a[s] = a[s] || b2[s];
            return a;
        }
        case CtlBinary::AU: {
            // !E[!q U (!p & !q)] & !EG(!q)
            Bits np = bnot(l), nq = bnot(r);
            Bits both(m, 0);
            for (std::size_t s = 0; s < m; ++s) both[s] = np[s] && nq[s];
            Bits bad = eu(nq, both);
            Bits stuck = eg(nq);
            Bits v(m, 0);
            for (std::size_t s = 0; s < m; ++s) v[s] = !bad[s] && !stuck[s];
            return v;
        }
        case CtlBinary::AW: {
            Bits np = bnot(l), nq = bnot(r);
            Bits both(m, 0);
            for (std::size_t s = 0; s < m; ++s) both[s] = np[s] && nq[s];
            Bits bad = eu(nq, both);
            return bnot(std::move(bad));
        }
        }
        return Bits(n(), 0);
    }
};

bool contains_temporal(const Ctl &f) {
    if (auto *u = std::get_if<CtlUnaryNode>(&f.node)) {
        if (u->op != CtlUnary::Not) return true;
        return contains_temporal(*u->operand);
    }
    if (auto *b = std::get_if<CtlBinaryNode>(&f.node)) {
        if (b->op == CtlBinary::EU || b->op == CtlBinary::AU ||
            b->op == CtlBinary::EW || b->op == CtlBinary::AW)
            return true;
        return contains_temporal(*b->lhs) || contains_temporal(*b->rhs);
    }
    return false;
}

// Builds stems by BFS and lassos by the shortest BFS-tree back edge; stops
// extending once a loop is in place.
struct WitnessBuilder {
    Labeler &L;
    Evidence ev;
    bool closed = false;

    int cur() const { return ev.steps.back().state; }

    // shortest path from `from` to any state with target[t], moving only
    // through states satisfying `within` (checked on intermediate states,
    // not on `from` or the target); appends the path.
    bool bfs_to(int from, const Bits &target, const Bits *within) {
        if (closed) return false;
        if (target[from]) return true;
        std::size_t n = L.n();
        std::vector<int> par(n, -1), plab(n, 0);
        std::vector<char> seen(n, 0);
        std::deque<int> q{from};
        seen[from] = 1;
        int found = -1;
        while (!q.empty() && found < 0) {
            int s = q.front();
            q.pop_front();
            for (auto [t, l] : L.succs.out[s]) {
                if (seen[t]) continue;
                seen[t] = 1;
                par[t] = s;
                plab[t] = l;
                if (target[t]) {
                    found = t;
                    break;
                }
                if (!within || (*within)[t]) q.push_back(t);
            }
        }
        if (found < 0) return false;
        std::vector<EvidenceStep> rev;
        for (int s = found; s != from; s = par[s])
            rev.push_back({s, plab[s]});
        for (auto it = rev.rbegin(); it != rev.rend(); ++it)
            ev.steps.push_back(*it);
        return true;
    }

    // lasso from `from` staying inside `set` (every state of an EG fixpoint
    // has a successor inside it, so this always closes)
    void lasso(int from, const Bits &set) {
        if (closed) return;
        std::size_t n = L.n();
        std::vector<int> par(n, -1), plab(n, 0), depth(n, -1);
        std::deque<int> q{from};
        depth[from] = 0;
        int tail = -1, back = -1, back_label = 0;
        while (!q.empty() && tail < 0) {
            int s = q.front();
            q.pop_front();
            for (auto [t, l] : L.succs.out[s]) {
                if (!set[t]) continue;
                // back edge into the BFS ancestry of s closes a cycle
                for (int a = s; a != -1; a = par[a]) {
                    if (a == t) {
                        tail = s;
                        back = t;
                        back_label = l;
                        break;
                    }
                }
                if (tail >= 0) break;
                if (depth[t] < 0) {
                    depth[t] = depth[s] + 1;
                    par[t] = s;
                    plab[t] = l;
                    q.push_back(t);
                }
            }
        }
        if (tail < 0) return; // defensive, not expected
        std::vector<EvidenceStep> rev;
        for (int s = tail; s != from; s = par[s])
            rev.push_back({s, plab[s]});
        std::size_t base = ev.steps.size();
        for (auto it = rev.rbegin(); it != rev.rend(); ++it)
            ev.steps.push_back(*it);
        // find `back` on the appended path (or it is `from` itself)
        std::size_t loop_at = base == 0 ? 0 : base - 1;
        if (back == from) {
            ev.loop_start = base == 0 ? 0 : base - 1;
        } else {
            for (std::size_t i = base; i < ev.steps.size(); ++i)
                if (ev.steps[i].state == back) {
                    loop_at = i;
                    break;
                }
            ev.loop_start = loop_at;
        }
        (void)back_label;
        closed = true;
    }

    void explain_neg(const CtlPtr &f) {
        if (closed) return;
        int s = cur();
        if (auto *u = std::get_if<CtlUnaryNode>(&f->node)) {
            switch (u->op) {
            case CtlUnary::Not: explain_pos(u->operand); return;
            case CtlUnary::AG: {
                Bits bad = Labeler::bnot(L.sat(u->operand));
                if (bfs_to(s, bad, nullptr)) explain_neg(u->operand);
                return;
            }
            case CtlUnary::AF: {
                Bits region = L.eg(Labeler::bnot(L.sat(u->operand)));
                if (region[s]) lasso(s, region);
                return;
            }
            case CtlUnary::AX: {
                Bits g = L.sat(u->operand);
                for (auto [t, l] : L.succs.out[s]) {
                    if (!g[t]) {
                        ev.steps.push_back({t, l});
                        explain_neg(u->operand);
                        return;
                    }
                }
                return;
            }
            case CtlUnary::EF:
            case CtlUnary::EG:
            case CtlUnary::EX:
                return; // universal negation, no single-path witness
            }
        }
        if (auto *b = std::get_if<CtlBinaryNode>(&f->node)) {
            Bits l = L.sat(b->lhs), r = L.sat(b->rhs);
            switch (b->op) {
            case CtlBinary::Implies:
                explain_neg(b->rhs);
                return;
            case CtlBinary::And:
                if (!l[s] && contains_temporal(*b->lhs)) {
                    explain_neg(b->lhs);
                } else if (!r[s]) {
                    explain_neg(b->rhs);
                } else {
                    explain_neg(b->lhs);
                }
                return;
            case CtlBinary::Or:
                if (contains_temporal(*b->lhs)) explain_neg(b->lhs);
                else explain_neg(b->rhs);
                return;
            case CtlBinary::AW:
            case CtlBinary::AU: {
                Bits np = Labeler::bnot(l), nq = Labeler::bnot(r);
                Bits both(L.n(), 0);
                for (std::size_t i = 0; i < L.n(); ++i)
                    both[i] = np[i] && nq[i];
                Bits bad = L.eu(nq, both);
                if (bad[s]) {
                    if (bfs_to(s, both, &nq)) explain_neg(b->lhs);
                    return;
                }
                if (b->op == CtlBinary::AU) {
                    Bits region = L.eg(nq);
                    if (region[s]) lasso(s, region);
                }
                return;
            }
            case CtlBinary::EU:
            case CtlBinary::EW:
                return;
            }
        }
    }

    void explain_pos(const CtlPtr &f) {
        if (closed) return;
        int s = cur();
        if (auto *u = std::get_if<CtlUnaryNode>(&f->node)) {
            switch (u->op) {
            case CtlUnary::Not: explain_neg(u->operand); return;
            case CtlUnary::EF: {
                Bits g = L.sat(u->operand);
                if (bfs_to(s, g, nullptr)) explain_pos(u->operand);
                return;
            }
            case CtlUnary::EG: {
                Bits region = L.eg(L.sat(u->operand));
                if (region[s]) lasso(s, region);
                return;
            }
            case CtlUnary::EX: {
                Bits g = L.sat(u->operand);
                for (auto [t, l] : L.succs.out[s]) {
                    if (g[t]) {
                        ev.steps.push_back({t, l});
                        explain_pos(u->operand);
                        return;
                    }
                }
                return;
            }
            default: return;
            }
        }
        if (auto *b = std::get_if<CtlBinaryNode>(&f->node)) {
            Bits l = L.sat(b->lhs), r = L.sat(b->rhs);
            switch (b->op) {
            case CtlBinary::EU: {
                if (bfs_to(s, r, &l)) explain_pos(b->rhs);
                return;
            }
            case CtlBinary::EW: {
                Bits viaU = L.eu(l, r);
                if (viaU[s]) {
                    if (bfs_to(s, r, &l)) explain_pos(b->rhs);
                    return;
                }
                Bits region = L.eg(l);
                if (region[s]) lasso(s, region);
                return;
            }
            case CtlBinary::And:
                if (contains_temporal(*b->lhs)) explain_pos(b->lhs);
                else if (contains_temporal(*b->rhs)) explain_pos(b->rhs);
                return;
            case CtlBinary::Or:
                if (l[s] && contains_temporal(*b->lhs)) explain_pos(b->lhs);
                else if (r[s]) explain_pos(b->rhs);
                else explain_pos(b->lhs);
                return;
            default: return;
            }
        }
    }
};

} // namespace

CheckResult check(const Kripke &ks, const CtlPtr &formula, const AtomMap &atoms) {
    CheckResult res;
    if (ks.states.empty() || !formula) return res;
    Labeler L(ks, atoms);
    Bits v = L.sat(formula);
    res.holds = v[ks.initial] != 0;
    res.sat_count = static_cast<std::size_t>(
        std::count(v.begin(), v.end(), static_cast<char>(1)));
    if (!res.holds) {
        WitnessBuilder wb{L, {}, false};
        wb.ev.steps.push_back({ks.initial, 0});
        wb.explain_neg(formula);
        res.evidence = std::move(wb.ev);
    }
    return res;
}

CheckResult check_deadlock(const Kripke &ks) {
    CheckResult res;
    if (ks.states.empty()) return res;
    std::size_t n = ks.states.size();
    res.sat_count = 0;
    for (const auto &s : ks.states)
        if (!s.deadlock) ++res.sat_count;

    std::vector<int> par(n, -1), plab(n, 0);
    std::vector<char> seen(n, 0);
    std::deque<int> q{ks.initial};
    seen[ks.initial] = 1;
    int found = ks.states[ks.initial].deadlock ? ks.initial : -1;
    while (!q.empty() && found < 0) {
        int s = q.front();
        q.pop_front();
        for (int ei : ks.succ[s]) {
            const KripkeEdge &e = ks.edges[ei];
            if (seen[e.to]) continue;
            seen[e.to] = 1;
            par[e.to] = s;
            plab[e.to] = e.label;
            if (ks.states[e.to].deadlock) {
                found = e.to;
                break;
            }
            q.push_back(e.to);
        }
    }
    res.holds = found < 0;
    if (found >= 0) {
        Evidence ev;
        std::vector<EvidenceStep> rev;
        for (int s = found; s != ks.initial; s = par[s])
            rev.push_back({s, plab[s]});
        ev.steps.push_back({ks.initial, 0});
        for (auto it = rev.rbegin(); it != rev.rend(); ++it)
            ev.steps.push_back(*it);
        res.evidence = std::move(ev);
    }
    return res;
}

// ------------------------------------------------------------------ oracle

namespace {

struct Oracle {
    const Kripke &ks;
    const AtomMap &atoms;
    Succs succs;
    long budget = 5000000;
    bool exhausted = false;

    Oracle(const Kripke &k, const AtomMap &a) : ks(k), atoms(a), succs(k) {}

    bool atom_at(const std::string &name, int s) const {
        auto it = atoms.labels.find(name);
        if (it != atoms.labels.end())
            return it->second.count(ks.states[s].last_label) != 0;
        if (name == "deadlock") return ks.states[s].deadlock;
        return false;
    }

    bool spend() {
        if (--budget < 0) exhausted = true;
        return !exhausted;
    }

    // exists a path from s through lhs-states reaching an rhs-state,
    // simple paths only
    bool exists_until(const CtlPtr &p, const CtlPtr &q, int s,
                      std::vector<char> &onpath) {
        if (!spend()) return false;
        if (eval(q, s)) return true;
        if (!eval(p, s)) return false;
        onpath[s] = 1;
        for (auto [t, l] : succs.out[s]) {
            if (onpath[t]) continue;
            if (exists_until(p, q, t, onpath)) {
                onpath[s] = 0;
                return true;
            }
        }
        onpath[s] = 0;
        return false;
    }

    // exists an infinite path staying in p: a reachable cycle within p
    bool exists_globally(const CtlPtr &p, int s, std::vector<char> &onpath) {
        if (!spend()) return false;
        if (!eval(p, s)) return false;
        onpath[s] = 1;
        for (auto [t, l] : succs.out[s]) {
            if (onpath[t]) {
                onpath[s] = 0;
                return true; // closed a cycle inside p
            }
            if (exists_globally(p, t, onpath)) {
                onpath[s] = 0;
                return true;
            }
        }
        onpath[s] = 0;
        return false;
    }

    bool eval(const CtlPtr &f, int s) {
        if (!spend()) return false;
        if (auto *a = std::get_if<CtlAtom>(&f->node)) return atom_at(a->name, s);
        if (auto *c = std::get_if<CtlConst>(&f->node)) return c->value;
        if (auto *u = std::get_if<CtlUnaryNode>(&f->node)) {
            switch (u->op) {
            case CtlUnary::Not: return !eval(u->operand, s);
            case CtlUnary::EX:
                for (auto [t, l] : succs.out[s])
                    if (eval(u->operand, t)) return true;
                return false;
            case CtlUnary::AX:
                for (auto [t, l] : succs.out[s])
                    if (!eval(u->operand, t)) return false;
                return true;
            case CtlUnary::EF: {
                std::vector<char> onpath(ks.states.size(), 0);
                return exists_until(ctl_const(true), u->operand, s, onpath);
            }
            case CtlUnary::AF: {
                std::vector<char> onpath(ks.states.size(), 0);
                return !exists_globally(ctl_un(CtlUnary::Not, u->operand), s,
                                        onpath);
            }
            case CtlUnary::EG: {
                std::vector<char> onpath(ks.states.size(), 0);
                return exists_globally(u->operand, s, onpath);
            }
            case CtlUnary::AG: {
                std::vector<char> onpath(ks.states.size(), 0);
                return !exists_until(ctl_const(true),
                                     ctl_un(CtlUnary::Not, u->operand), s,
                                     onpath);
            }
            }
        }
        const auto &b = std::get<CtlBinaryNode>(f->node);
        switch (b.op) {
        case CtlBinary::And: return eval(b.lhs, s) && eval(b.rhs, s);
        case CtlBinary::Or: return eval(b.lhs, s) || eval(b.rhs, s);
        case CtlBinary::Implies: return !eval(b.lhs, s) || eval(b.rhs, s);
        case CtlBinary::EU: {
            std::vector<char> onpath(ks.states.size(), 0);
            return exists_until(b.lhs, b.rhs, s, onpath);
        }
        case CtlBinary::AU: {
            // no path may stay in !q forever nor reach !p & !q through !q
            std::vector<char> onpath(ks.states.size(), 0);
            CtlPtr nq = ctl_un(CtlUnary::Not, b.rhs);
            CtlPtr bad = ctl_bin(CtlBinary::And, ctl_un(CtlUnary::Not, b.lhs),
                                 nq);
            if (exists_until(nq, bad, s, onpath)) return false;
            std::vector<char> onpath2(ks.states.size(), 0);
            return !exists_globally(nq, s, onpath2);
        }
        case CtlBinary::AW: {
            std::vector<char> onpath(ks.states.size(), 0);
            CtlPtr nq = ctl_un(CtlUnary::Not, b.rhs);
            CtlPtr bad = ctl_bin(CtlBinary::And, ctl_un(CtlUnary::Not, b.lhs),
                                 nq);
            return !exists_until(nq, bad, s, onpath);
        }
        case CtlBinary::EW: {
            std::vector<char> onpath(ks.states.size(), 0);
            if (exists_until(b.lhs, b.rhs, s, onpath)) return true;
            std::vector<char> onpath2(ks.states.size(), 0);
            return exists_globally(b.lhs, s, onpath2);
        }
        }
        return false;
    }
};

} // namespace

OracleResult oracle_check(const Kripke &ks, const CtlPtr &formula,
                          const AtomMap &atoms) {
    OracleResult res;
    if (!formula) {
        res.error = "no formula";
        return res;
    }
    if (ks.states.size() > 2000) {
        res.error = "structure too large for the oracle";
        return res;
    }
    if (ks.states.empty()) {
        res.error = "empty structure";
        return res;
    }
    Oracle o(ks, atoms);
    bool holds = o.eval(formula, ks.initial);
    if (o.exhausted) {
        res.error = "oracle budget exhausted";
        return res;
    }
    res.ok = true;
    res.holds = holds;
    return res;
}

// ---------------------------------------------------------------- evidence

bool evidence_is_valid(const Kripke &ks, const Evidence &ev) {
    if (ev.steps.empty()) return false;
    if (ev.steps[0].label != 0) return false;
    auto state_ok = [&](int s) {
        return s >= 0 && static_cast<std::size_t>(s) < ks.states.size();
    };
    if (!state_ok(ev.steps[0].state)) return false;

    auto connects = [&](int from, int to, int label) {
        for (int ei : ks.succ[from]) {
            const KripkeEdge &e = ks.edges[ei];
            if (e.to == to && e.label == label) return true;
        }
        // virtual stutter at terminal states
        return ks.succ[from].empty() && from == to && label == 0;
    };

    for (std::size_t i = 1; i < ev.steps.size(); ++i) {
        if (!state_ok(ev.steps[i].state)) return false;
        if (!connects(ev.steps[i - 1].state, ev.steps[i].state,
                      ev.steps[i].label))
            return false;
    }
    if (ev.loop_start) {
        if (*ev.loop_start >= ev.steps.size()) return false;
        int last = ev.steps.back().state;
        int entry = ev.steps[*ev.loop_start].state;
        bool edge_exists = false;
        for (int ei : ks.succ[last]) {
            if (ks.edges[ei].to == entry) {
                edge_exists = true;
                break;
            }
        }
        if (!edge_exists && !(ks.succ[last].empty() && last == entry))
            return false;
    }
    return true;
}

std::string evidence_to_string(const Kripke &ks, const Evidence &ev) {
    std::ostringstream os;
    for (std::size_t i = 0; i < ev.steps.size(); ++i) {
        const EvidenceStep &st = ev.steps[i];
        const KripkeState &k = ks.states[st.state];
        os << "  " << i << ": ";
        if (i > 0) {
            os << "--(";
            if (st.label == 0) {
                os << "stay";
            } else {
                os << st.label;
                auto it = ks.label_names.find(st.label);
                if (it != ks.label_names.end()) os << " " << it->second;
            }
            os << ")--> ";
        }
        os << ks.control_names[k.control];
        if (!k.tracked.empty()) {
            os << " {";
            bool first = true;
            for (const auto &[n, v] : k.tracked) {
                if (!first) os << ", ";
                first = false;
                os << n << "=" << value_to_string(v);
            }
            os << "}";
        }
        if (k.deadlock) os << " [deadlock]";
        if (ev.loop_start && *ev.loop_start == i) os << " <loop>";
        os << "\n";
    }
    if (ev.loop_start)
        os << "  loops back to step " << *ev.loop_start << "\n";
    return os.str();
}

} // namespace verisol
