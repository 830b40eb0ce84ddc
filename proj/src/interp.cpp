#include "verisol/interp.hpp"

#include <sstream>

namespace verisol {

// ------------------------------------------------------------------ ledger

bool ledger_equal(const LedgerState &a, const LedgerState &b) {
    if (a.now != b.now || a.block_number != b.block_number) return false;
    if (a.balances != b.balances) return false;
    if (a.log.size() != b.log.size()) return false;
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        if (a.log[i].event != b.log[i].event) return false;
        if (a.log[i].args.size() != b.log[i].args.size()) return false;
        for (std::size_t j = 0; j < a.log[i].args.size(); ++j)
            if (!value_equal(a.log[i].args[j], b.log[i].args[j])) return false;
    }
    if (a.storage.size() != b.storage.size()) return false;
    auto it = a.storage.begin(), jt = b.storage.begin();
    for (; it != a.storage.end(); ++it, ++jt) {
        if (it->first != jt->first) return false;
        if (!value_equal(it->second, jt->second)) return false;
    }
    return true;
}

namespace {
std::uint64_t fnv1a(const std::string &s, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}
} // namespace

std::uint64_t ledger_hash(const LedgerState &l) {
    std::ostringstream os;
    os << "n" << l.now << "k" << l.block_number << "|";
    for (const auto &[a, w] : l.balances) os << a << ":" << w << ";";
    os << "|";
    for (const auto &[n, v] : l.storage) os << n << "=" << value_encode(v) << ";";
    os << "|";
    for (const auto &e : l.log) {
        os << e.event << "(";
        for (const auto &a : e.args) os << value_encode(a) << ",";
        os << ")";
    }
    return fnv1a(os.str());
}

std::string ledger_to_string(const LedgerState &l) {
    std::ostringstream os;
    os << "now=" << l.now << " block=" << l.block_number;
    for (const auto &[a, w] : l.balances)
        os << " bal[0x" << std::hex << a << std::dec << "]=" << w;
    for (const auto &[n, v] : l.storage) os << " " << n << "=" << value_to_string(v);
    for (const auto &e : l.log) {
        os << " log:" << e.event << "(";
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i) os << ",";
            os << value_to_string(e.args[i]);
        }
        os << ")";
    }
    return os.str();
}

// ------------------------------------------------------------- exec state

Value *ExecState::find_local(const std::string &name) {
    for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
        auto f = it->find(name);
        if (f != it->end()) return &f->second;
    }
    return nullptr;
}

bool ExecState::declare_local(const std::string &name, Value v) {
    if (frames.empty()) push_frame();
    return frames.back().emplace(name, std::move(v)).second;
}

Value zero_value(const Type &t, const StructTable &structs) {
    if (auto *n = std::get_if<NamedType>(&t.node)) {
        const std::string &nm = n->name;
        if (nm == "bool") return Value{BoolVal{false}};
        if (nm == "address") return Value{AddressVal{0}};
        if (nm == "bytes32") return Value{Bytes32Val{0}};
        if (nm.rfind("uint", 0) == 0) return Value{IntVal{0, false}};
        if (nm.rfind("int", 0) == 0) return Value{IntVal{0, true}};
        if (const StructDef *sd = structs.find(nm)) {
            StructVal sv{nm, {}};
            for (const auto &f : sd->fields)
                sv.fields.push_back(zero_value(*f.type, structs));
            return Value{std::move(sv)};
        }
        return Value{IntVal{0, false}};
    }
    if (auto *m = std::get_if<MappingType>(&t.node))
        return Value{MappingVal{{}, m->value}};
    return Value{ArrayVal{{}, std::get<ArrayType>(t.node).elem}};
}

// ------------------------------------------------------------- evaluation

namespace {

bool truthy(const Value &v, bool &out) {
    if (auto *b = std::get_if<BoolVal>(&v.node)) {
        out = b->v;
        return true;
    }
    return false;
}

bool scalar_bits(const Value &v, std::uint64_t &bits, bool &is_signed) {
    if (auto *i = std::get_if<IntVal>(&v.node)) {
        bits = i->bits;
        is_signed = i->is_signed;
        return true;
    }
    if (auto *a = std::get_if<AddressVal>(&v.node)) {
        bits = a->v;
        is_signed = false;
        return true;
    }
    if (auto *h = std::get_if<Bytes32Val>(&v.node)) {
        bits = h->v;
        is_signed = false;
        return true;
    }
    return false;
}

EvalResult exc() { return {ExecStatus::exception(), Value{}}; }
EvalResult ok(Value v) { return {ExecStatus::normal(), std::move(v)}; }

// An assignable place. `length_of` marks the `xs.length` pseudo-member.
struct Place {
    Value *ptr = nullptr;
    Value *length_of = nullptr;
    bool failed = false;
};

Place place_fail() { return Place{nullptr, nullptr, true}; }

Place resolve_place(const Expr &e, ExecState &st);

Place resolve_index_place(const Index &ix, ExecState &st) {
    Place base = resolve_place(*ix.base, st);
    if (base.failed || !base.ptr) return place_fail();
    EvalResult key = eval_expr(*ix.index, st);
    if (key.status.kind != StatusKind::Normal) return place_fail();
    if (auto *m = std::get_if<MappingVal>(&base.ptr->node)) {
        std::string k = value_encode(key.value);
        auto it = m->entries.find(k);
        if (it == m->entries.end()) {
            StructTable tab{st.model};
            it = m->entries.emplace(k, zero_value(*m->value_type, tab)).first;
        }
        return Place{&it->second, nullptr, false};
    }
    if (auto *a = std::get_if<ArrayVal>(&base.ptr->node)) {
        std::uint64_t bits;
        bool sg;
        if (!scalar_bits(key.value, bits, sg)) return place_fail();
        if (bits >= a->elems.size()) return place_fail();
        return Place{&a->elems[bits], nullptr, false};
    }
    return place_fail();
}

Place resolve_place(const Expr &e, ExecState &st) {
    if (auto *id = std::get_if<Ident>(&e.node)) {
        if (Value *l = st.find_local(id->name)) return Place{l, nullptr, false};
        auto it = st.working.storage.find(id->name);
        if (it != st.working.storage.end())
            return Place{&it->second, nullptr, false};
        return place_fail();
    }
    if (auto *ix = std::get_if<Index>(&e.node)) return resolve_index_place(*ix, st);
    if (auto *mem = std::get_if<Member>(&e.node)) {
        Place base = resolve_place(*mem->base, st);
        if (base.failed || !base.ptr) return place_fail();
        if (mem->member == "length") {
            if (std::holds_alternative<ArrayVal>(base.ptr->node))
                return Place{nullptr, base.ptr, false};
            return place_fail();
        }
        if (auto *sv = std::get_if<StructVal>(&base.ptr->node)) {
            StructTable tab{st.model};
            const StructDef *sd = tab.find(sv->struct_name);
            if (!sd) return place_fail();
            for (std::size_t i = 0; i < sd->fields.size(); ++i)
                if (sd->fields[i].name == mem->member)
                    return Place{&sv->fields[i], nullptr, false};
        }
        return place_fail();
    }
    return place_fail();
}

EvalResult do_payment(CallKind kind, const Expr &e, ExecState &st) {
    const auto &c = std::get<CallExpr>(e.node);
    if (c.args.size() != 1 || !c.base) return exc();
    EvalResult target = eval_expr(*c.base, st);
    if (target.status.kind != StatusKind::Normal) return target;
    EvalResult amount = eval_expr(*c.args[0], st);
    if (amount.status.kind != StatusKind::Normal) return amount;
    std::uint64_t to, amt;
    bool sg;
    if (!scalar_bits(target.value, to, sg)) return exc();
    if (!scalar_bits(amount.value, amt, sg)) return exc();

    std::uint64_t &self = st.working.balances[st.contract_address];
    bool funded = self >= amt;
    bool accepted = funded && st.env && st.env->accepts_payment(to, amt);
    if (accepted) {
        self -= amt;
        st.working.balances[to] += amt;
    }
    if (kind == CallKind::Transfer) {
        if (!accepted) return exc();
        return ok(Value{BoolVal{true}});
    }
    // send and low-level call report failure instead of raising
    return ok(Value{BoolVal{accepted}});
}

} // namespace

std::uint64_t builtin_hash(const std::vector<Value> &args) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto &a : args) {
        std::string enc = value_encode(a);
        for (unsigned char c : enc) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0x7c;
        h *= 1099511628211ull;
    }
    return h;
}

EvalResult eval_expr(const Expr &e, ExecState &st) {
    if (++st.steps > st.step_limit) return exc();

    if (auto *i = std::get_if<IntLit>(&e.node))
        return ok(Value{IntVal{i->value, false}});
    if (auto *b = std::get_if<BoolLit>(&e.node))
        return ok(Value{BoolVal{b->value}});
    if (auto *h = std::get_if<HexLit>(&e.node))
        return ok(Value{AddressVal{h->value}});
    if (auto *id = std::get_if<Ident>(&e.node)) {
        if (Value *l = st.find_local(id->name)) return ok(*l);
        auto it = st.working.storage.find(id->name);
        if (it != st.working.storage.end()) return ok(it->second);
        return exc();
    }
    if (auto *env = std::get_if<EnvExpr>(&e.node)) {
        switch (env->kind) {
        case EnvKind::MsgSender: return ok(Value{AddressVal{st.ctx.sender}});
        case EnvKind::MsgValue: return ok(Value{IntVal{st.ctx.value, false}});
        case EnvKind::Now: return ok(Value{IntVal{st.ctx.now, false}});
        }
        return exc();
    }
    if (auto *u = std::get_if<Unary>(&e.node)) {
        EvalResult r = eval_expr(*u->operand, st);
        if (r.status.kind != StatusKind::Normal) return r;
        if (u->op == UnOp::Not) {
            bool b;
            if (!truthy(r.value, b)) return exc();
            return ok(Value{BoolVal{!b}});
        }
        if (auto *iv = std::get_if<IntVal>(&r.value.node)) {
            if (u->op == UnOp::Neg)
                return ok(Value{IntVal{~iv->bits + 1, true}});
            return r;
        }
        return exc();
    }
    if (auto *bin = std::get_if<Binary>(&e.node)) {
        if (bin->op == BinOp::And || bin->op == BinOp::Or) {
            EvalResult l = eval_expr(*bin->lhs, st);
            if (l.status.kind != StatusKind::Normal) return l;
            bool lb;
            if (!truthy(l.value, lb)) return exc();
            if (bin->op == BinOp::And && !lb) return ok(Value{BoolVal{false}});
            if (bin->op == BinOp::Or && lb) return ok(Value{BoolVal{true}});
            EvalResult r = eval_expr(*bin->rhs, st);
            if (r.status.kind != StatusKind::Normal) return r;
            bool rb;
            if (!truthy(r.value, rb)) return exc();
            return ok(Value{BoolVal{rb}});
        }
        EvalResult l = eval_expr(*bin->lhs, st);
        if (l.status.kind != StatusKind::Normal) return l;
        EvalResult r = eval_expr(*bin->rhs, st);
        if (r.status.kind != StatusKind::Normal) return r;
        if (bin->op == BinOp::Eq)
            return ok(Value{BoolVal{value_equal(l.value, r.value)}});
        if (bin->op == BinOp::Ne)
            return ok(Value{BoolVal{!value_equal(l.value, r.value)}});

        std::uint64_t a, b;
        bool sa, sb;
        if (!scalar_bits(l.value, a, sa) || !scalar_bits(r.value, b, sb))
            return exc();
        bool use_signed = sa || sb;
        auto cmp_lt = [&] {
            return use_signed ? static_cast<std::int64_t>(a) <
                                    static_cast<std::int64_t>(b)
                              : a < b;
        };
        switch (bin->op) {
        case BinOp::Lt: return ok(Value{BoolVal{cmp_lt()}});
        case BinOp::Gt: return ok(Value{BoolVal{a != b && !cmp_lt()}});
        case BinOp::Le: return ok(Value{BoolVal{a == b || cmp_lt()}});
        case BinOp::Ge: return ok(Value{BoolVal{!cmp_lt()}});
        case BinOp::Add: return ok(Value{IntVal{a + b, use_signed}});
        case BinOp::Sub: return ok(Value{IntVal{a - b, use_signed}});
        case BinOp::Mul: return ok(Value{IntVal{a * b, use_signed}});
        case BinOp::Div:
            if (b == 0) return exc();
            if (use_signed)
                return ok(Value{IntVal{
                    static_cast<std::uint64_t>(static_cast<std::int64_t>(a) /
                                               static_cast<std::int64_t>(b)),
                    true}});
            return ok(Value{IntVal{a / b, false}});
        case BinOp::Mod:
            if (b == 0) return exc();
            if (use_signed)
                return ok(Value{IntVal{
                    static_cast<std::uint64_t>(static_cast<std::int64_t>(a) %
                                               static_cast<std::int64_t>(b)),
                    true}});
            return ok(Value{IntVal{a % b, false}});
        default: return exc();
        }
    }
    if (auto *asg = std::get_if<Assign>(&e.node)) {
        EvalResult rhs = eval_expr(*asg->value, st);
        if (rhs.status.kind != StatusKind::Normal) return rhs;
        Place p = resolve_place(*asg->target, st);
        if (p.failed) return exc();
        if (p.length_of) {
            // xs.length = n truncates or zero-extends
            auto &arr = std::get<ArrayVal>(p.length_of->node);
            std::uint64_t n;
            bool sg;
            if (asg->op != AssignOp::Assign) return exc();
            if (!scalar_bits(rhs.value, n, sg)) return exc();
            StructTable tab{st.model};
            while (arr.elems.size() > n) arr.elems.pop_back();
            while (arr.elems.size() < n)
                arr.elems.push_back(zero_value(*arr.elem_type, tab));
            return ok(rhs.value);
        }
        if (!p.ptr) return exc();
        if (asg->op == AssignOp::Assign) {
            *p.ptr = rhs.value;
            return ok(rhs.value);
        }
        std::uint64_t a, b;
        bool sa, sb;
        if (!scalar_bits(*p.ptr, a, sa) || !scalar_bits(rhs.value, b, sb))
            return exc();
        std::uint64_t out = asg->op == AssignOp::AddAssign ? a + b : a - b;
        if (std::holds_alternative<IntVal>(p.ptr->node))
            *p.ptr = Value{IntVal{out, sa}};
        else
            return exc();
        return ok(*p.ptr);
    }
    if (auto *ix = std::get_if<Index>(&e.node)) {
        EvalResult base = eval_expr(*ix->base, st);
        if (base.status.kind != StatusKind::Normal) return base;
        EvalResult key = eval_expr(*ix->index, st);
        if (key.status.kind != StatusKind::Normal) return key;
        if (auto *m = std::get_if<MappingVal>(&base.value.node)) {
            std::string k = value_encode(key.value);
            auto it = m->entries.find(k);
            if (it != m->entries.end()) return ok(it->second);
            StructTable tab{st.model};
            return ok(zero_value(*m->value_type, tab));
        }
        if (auto *a = std::get_if<ArrayVal>(&base.value.node)) {
            std::uint64_t bits;
            bool sg;
            if (!scalar_bits(key.value, bits, sg)) return exc();
            if (bits >= a->elems.size()) return exc();
            return ok(a->elems[bits]);
        }
        return exc();
    }
    if (auto *mem = std::get_if<Member>(&e.node)) {
        EvalResult base = eval_expr(*mem->base, st);
        if (base.status.kind != StatusKind::Normal) return base;
        if (mem->member == "length") {
            if (auto *a = std::get_if<ArrayVal>(&base.value.node))
                return ok(Value{IntVal{a->elems.size(), false}});
            return exc();
        }
        if (auto *sv = std::get_if<StructVal>(&base.value.node)) {
            StructTable tab{st.model};
            const StructDef *sd = tab.find(sv->struct_name);
            if (sd)
                for (std::size_t i = 0; i < sd->fields.size(); ++i)
                    if (sd->fields[i].name == mem->member)
                        return ok(sv->fields[i]);
        }
        return exc();
    }

    const auto &c = std::get<CallExpr>(e.node);
    switch (c.kind) {
    case CallKind::Transfer:
    case CallKind::Send:
    case CallKind::LowCall: return do_payment(c.kind, e, st);
    case CallKind::Push: {
        Place p = resolve_place(*c.base, st);
        if (p.failed || !p.ptr) return exc();
        if (c.args.size() != 1) return exc();
        EvalResult v = eval_expr(*c.args[0], st);
        if (v.status.kind != StatusKind::Normal) return v;
        auto *arr = std::get_if<ArrayVal>(&p.ptr->node);
        if (!arr) return exc();
        arr->elems.push_back(std::move(v.value));
        return ok(Value{IntVal{arr->elems.size(), false}});
    }
    case CallKind::BuiltinHash: {
        std::vector<Value> args;
        for (const auto &a : c.args) {
            EvalResult r = eval_expr(*a, st);
            if (r.status.kind != StatusKind::Normal) return r;
            args.push_back(std::move(r.value));
        }
        return ok(Value{Bytes32Val{builtin_hash(args)}});
    }
    case CallKind::Internal: {
        const StructDef *sd = st.model ? st.model->find_struct(c.name) : nullptr;
        if (!sd || sd->fields.size() != c.args.size()) return exc();
        StructVal sv{c.name, {}};
        for (const auto &a : c.args) {
            EvalResult r = eval_expr(*a, st);
            if (r.status.kind != StatusKind::Normal) return r;
            sv.fields.push_back(std::move(r.value));
        }
        return ok(Value{std::move(sv)});
    }
    }
    return exc();
}

// -------------------------------------------------------------- statements

ExecStatus exec_stmt(const Stmt &s, ExecState &st) {
    if (++st.steps > st.step_limit) return ExecStatus::exception();

    if (auto *d = std::get_if<VarDeclStmt>(&s.node)) {
        Value v;
        if (d->init) {
            EvalResult r = eval_expr(*d->init, st);
            if (r.status.kind != StatusKind::Normal) return r.status;
            v = std::move(r.value);
        } else {
            StructTable tab{st.model};
            v = zero_value(*d->type, tab);
        }
        st.declare_local(d->name, std::move(v));
        return ExecStatus::normal();
    }
    if (auto *e = std::get_if<ExprStmt>(&s.node)) {
        EvalResult r = eval_expr(*e->expr, st);
        return r.status.kind == StatusKind::Normal ? ExecStatus::normal()
                                                   : r.status;
    }
    if (auto *em = std::get_if<EmitStmt>(&s.node)) {
        LogEntry entry{em->event, {}};
        for (const auto &a : em->args) {
            EvalResult r = eval_expr(*a, st);
            if (r.status.kind != StatusKind::Normal) return r.status;
            entry.args.push_back(std::move(r.value));
        }
        st.working.log.push_back(std::move(entry));
        return ExecStatus::normal();
    }
    if (auto *r = std::get_if<ReturnStmt>(&s.node)) {
        if (!r->value) return ExecStatus::returned_void();
        EvalResult v = eval_expr(*r->value, st);
        if (v.status.kind != StatusKind::Normal) return v.status;
        return ExecStatus::returned_value(std::move(v.value));
    }
    if (auto *i = std::get_if<IfStmt>(&s.node)) {
        EvalResult c = eval_expr(*i->cond, st);
        if (c.status.kind != StatusKind::Normal) return c.status;
        bool b;
        if (!truthy(c.value, b)) return ExecStatus::exception();
        if (b) {
            st.push_frame();
            ExecStatus r = exec_stmt(*i->then_branch, st);
            st.pop_frame();
            return r;
        }
        if (i->else_branch) {
            st.push_frame();
            ExecStatus r = exec_stmt(*i->else_branch, st);
            st.pop_frame();
            return r;
        }
        return ExecStatus::normal();
    }
    if (auto *w = std::get_if<WhileStmt>(&s.node)) {
        while (true) {
            EvalResult c = eval_expr(*w->cond, st);
            if (c.status.kind != StatusKind::Normal) return c.status;
            bool b;
            if (!truthy(c.value, b)) return ExecStatus::exception();
            if (!b) return ExecStatus::normal();
            st.push_frame();
            ExecStatus r = exec_stmt(*w->body, st);
            st.pop_frame();
            if (r.kind != StatusKind::Normal) return r;
        }
    }
    if (auto *f = std::get_if<ForStmt>(&s.node)) {
        st.push_frame();
        ExecStatus r = exec_stmt(*f->init, st);
        if (r.kind != StatusKind::Normal) {
            st.pop_frame();
            return r;
        }
        while (true) {
            EvalResult c = eval_expr(*f->cond, st);
            if (c.status.kind != StatusKind::Normal) {
                st.pop_frame();
                return c.status;
            }
            bool b;
            if (!truthy(c.value, b)) {
                st.pop_frame();
                return ExecStatus::exception();
            }
            if (!b) break;
            st.push_frame();
            ExecStatus br = exec_stmt(*f->body, st);
            st.pop_frame();
            if (br.kind != StatusKind::Normal) {
                st.pop_frame();
                return br;
            }
            EvalResult p = eval_expr(*f->post, st);
            if (p.status.kind != StatusKind::Normal) {
                st.pop_frame();
                return p.status;
            }
        }
        st.pop_frame();
        return ExecStatus::normal();
    }
    const auto &c = std::get<CompoundStmt>(s.node);
    st.push_frame();
    for (const auto &stmt : c.stmts) {
        ExecStatus r = exec_stmt(*stmt, st);
        if (r.kind != StatusKind::Normal) {
            st.pop_frame();
            return r;
        }
    }
    st.pop_frame();
    return ExecStatus::normal();
}

// ------------------------------------------------------------------- fire

std::string fire_verdict_name(FireVerdict v) {
    switch (v) {
    case FireVerdict::Transition: return "transition";
    case FireVerdict::TransitionRet: return "transition-ret";
    case FireVerdict::WrongState: return "wrong-state";
    case FireVerdict::GuardFalse: return "guard-false";
    case FireVerdict::GuardException: return "guard-exception";
    case FireVerdict::ActionException: return "action-exception";
    case FireVerdict::Fallback: return "fallback";
    case FireVerdict::FallbackException: return "fallback-exception";
    case FireVerdict::BadCall: return "bad-call";
    }
    return "unknown";
}

namespace {

bool value_matches_type(const Value &v, const Type &t, const ContractModel &m) {
    if (auto *n = std::get_if<NamedType>(&t.node)) {
        const std::string &nm = n->name;
        if (nm == "bool") return std::holds_alternative<BoolVal>(v.node);
        if (nm == "address") return std::holds_alternative<AddressVal>(v.node);
        if (nm == "bytes32") return std::holds_alternative<Bytes32Val>(v.node);
        if (nm.rfind("uint", 0) == 0 || nm.rfind("int", 0) == 0)
            return std::holds_alternative<IntVal>(v.node);
        if (const StructDef *sd = m.find_struct(nm)) {
            auto *sv = std::get_if<StructVal>(&v.node);
            return sv && sv->struct_name == sd->name;
        }
        return false;
    }
    if (std::holds_alternative<MappingType>(t.node))
        return std::holds_alternative<MappingVal>(v.node);
    auto *av = std::get_if<ArrayVal>(&v.node);
    if (!av) return false;
    const auto &elem = *std::get<ArrayType>(t.node).elem;
    for (const auto &e : av->elems)
        if (!value_matches_type(e, elem, m)) return false;
    return true;
}

ExecState make_state(const ContractModel &m, const LedgerState &base,
                     const CallCtx &ctx, ExternalEnvironment &env) {
    ExecState st;
    st.working = base;
    st.ctx = ctx;
    st.env = &env;
    st.model = &m;
    st.push_frame();
    return st;
}

void commit(ContractConfig &cfg, ExecState &st, const std::string &to) {
    st.working.now = st.ctx.now;
    st.working.block_number = st.ctx.block_number;
    cfg.ledger = std::move(st.working);
    cfg.state = to;
}

} // namespace

FireResult fire_transition(const ContractModel &m, ContractConfig &cfg,
                           const std::string &name,
                           const std::vector<Value> &args, const CallCtx &ctx,
                           ExternalEnvironment &env) {
    FireResult res;
    const Transition *t = m.find_transition(name);

    if (!t) {
        // unknown function: the fallback handles the call, if there is one
        if (!m.fallback_action) {
            res.verdict = FireVerdict::Fallback;
            return res;
        }
        ExecState st = make_state(m, cfg.ledger, ctx, env);
        st.working.balances[st.contract_address] += ctx.value;
        std::size_t log_base = st.working.log.size();
        ExecStatus r = exec_stmt(*m.fallback_action, st);
        if (r.kind == StatusKind::Exception) {
            res.verdict = FireVerdict::FallbackException;
            return res;
        }
        res.verdict = FireVerdict::Fallback;
        res.events.assign(st.working.log.begin() + log_base,
                          st.working.log.end());
        commit(cfg, st, cfg.state);
        return res;
    }

    if (cfg.state != t->from) {
        res.verdict = FireVerdict::WrongState;
        return res;
    }
    if (args.size() != t->params.size()) {
        res.verdict = FireVerdict::BadCall;
        return res;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!value_matches_type(args[i], *t->params[i].type, m)) {
            res.verdict = FireVerdict::BadCall;
            return res;
        }
    }

    ExecState st = make_state(m, cfg.ledger, ctx, env);
    for (std::size_t i = 0; i < args.size(); ++i)
        st.declare_local(t->params[i].name, args[i]);

    if (t->guard) {
        EvalResult g = eval_expr(*t->guard, st);
        if (g.status.kind != StatusKind::Normal) {
            res.verdict = FireVerdict::GuardException;
            return res;
        }
        bool b;
        if (!truthy(g.value, b)) {
            res.verdict = FireVerdict::GuardException;
            return res;
        }
        if (!b) {
            res.verdict = FireVerdict::GuardFalse;
            return res;
        }
    }

    st.working.balances[st.contract_address] += ctx.value;
    std::size_t log_base = st.working.log.size();

    ExecStatus r = ExecStatus::normal();
    if (t->action) r = exec_stmt(*t->action, st);

    if (r.kind == StatusKind::Exception) {
        res.verdict = FireVerdict::ActionException;
        return res;
    }

    if (t->returns) {
        if (r.kind == StatusKind::Returned && r.returned) {
            res.returned = std::move(r.returned);
        } else {
            StructTable tab{&m};
            res.returned = zero_value(*t->returns, tab);
        }
        res.verdict = FireVerdict::TransitionRet;
    } else {
        res.verdict = FireVerdict::Transition;
    }
    res.events.assign(st.working.log.begin() + log_base, st.working.log.end());
    commit(cfg, st, t->to);
    return res;
}

// ------------------------------------------------------------------ deploy

ContractConfig deploy_contract(const ContractModel &m, const CallCtx &deploy,
                               ExternalEnvironment &env, FireVerdict *verdict) {
    ContractConfig cfg;
    cfg.state = m.initial;
    cfg.ledger.now = deploy.now;
    cfg.ledger.block_number = deploy.block_number;
    StructTable tab{&m};
    for (const auto &v : m.vars)
        cfg.ledger.storage.emplace(v.name, zero_value(*v.type, tab));
    cfg.ledger.storage.emplace(kCreationTime, Value{IntVal{deploy.now, false}});

    if (verdict) *verdict = FireVerdict::Transition;
    ExecState st = make_state(m, cfg.ledger, deploy, env);
    st.working.balances[st.contract_address] += deploy.value;
    if (m.constructor_action) {
        ExecStatus r = exec_stmt(*m.constructor_action, st);
        if (r.kind == StatusKind::Exception) {
            if (verdict) *verdict = FireVerdict::ActionException;
            return cfg;
        }
    }
    commit(cfg, st, m.initial);
    return cfg;
}

Trace run_trace(const ContractModel &m, const CallCtx &deploy,
                const std::vector<TraceCall> &calls) {
    Trace tr;
    tr.deploy = deploy;
    ScriptedEnvironment env;
    FireVerdict dv;
    ContractConfig cfg = deploy_contract(m, deploy, env, &dv);
    if (dv != FireVerdict::Transition) {
        tr.diagnostics.push_back(
            {Severity::Error, "deploy-failed", "constructor raised an exception",
             {}});
        tr.final_config = cfg;
        return tr;
    }
    for (const auto &call : calls) {
        ScriptedEnvironment call_env;
        call_env.outcomes = call.outcomes;
        FireResult fr =
            fire_transition(m, cfg, call.name, call.args, call.ctx, call_env);
        TraceStep step;
        step.call = call;
        step.verdict = fr.verdict;
        step.returned = fr.returned;
        step.state_after = cfg.state;
        step.ledger_hash_after = ledger_hash(cfg.ledger);
        step.events = fr.events;
        tr.steps.push_back(std::move(step));
    }
    tr.final_config = std::move(cfg);
    return tr;
}

} // namespace verisol
