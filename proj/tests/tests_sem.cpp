#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"

using namespace vt;

namespace {

ContractModel inline_contract(const std::string &src) {
    auto pr = parse_contract(src);
    REQUIRE_MESSAGE(pr.model, diagnostics_to_text(pr.diagnostics, "<inline>"));
    REQUIRE_FALSE(has_errors(validate(*pr.model)));
    return std::move(*pr.model);
}

const char *kPay = R"(
contract Pay {
    states A;
    initial A;
    var uint got;
    var uint[] xs;
    transition put from A to A payable { got += msg.value; }
    transition pay(address dst, uint amt) from A to A { dst.transfer(amt); }
    transition trySend(address dst, uint amt) from A to A returns bool {
        return dst.send(amt);
    }
    transition ratio(uint a, uint b) from A to A returns uint { return a / b; }
    transition wrap from A to A { got = 0 - 1; }
    transition peek from A to A { got = xs[0]; }
    transition spin from A to A { while (got == got) { got += 1; } }
}
)";

std::string snapshot(const ContractConfig &cfg) {
    return cfg.state + "|" + ledger_to_string(cfg.ledger);
}

// Environment that records which payments were approved, for conservation
// accounting.
struct RecordingEnv : ExternalEnvironment {
    std::vector<bool> script;
    std::size_t next = 0;
    std::vector<std::pair<std::uint64_t, bool>> asked; // amount, answer
    bool accepts_payment(std::uint64_t, std::uint64_t amount) override {
        bool ans = next < script.size() ? script[next++] : true;
        asked.push_back({amount, ans});
        return ans;
    }
};

} // namespace

TEST_CASE("deploy zeroes storage, runs the constructor and stamps time") {
    ContractModel m = load_fixture("simple_contract.vsc");
    ScriptedEnvironment env;
    CallCtx dep;
    dep.now = 99;
    dep.value = 7;
    dep.sender = 0x0A;
    ContractConfig cfg = deploy_contract(m, dep, env);
    CHECK(cfg.state == "S1");
    CHECK(value_to_string(cfg.ledger.storage.at("x")) == "10");
    CHECK(value_to_string(cfg.ledger.storage.at(kCreationTime)) == "99");
    CHECK(cfg.ledger.balances.at(1) == 7);
    CHECK(cfg.ledger.now == 99);
}

TEST_CASE("guard gates firing and a false guard changes nothing") {
    ContractModel m = load_fixture("simple_contract.vsc");
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(m, {}, env);

    for (int round = 0; round < 10; ++round) {
        auto r1 = fire_transition(m, cfg, "t1", {}, {}, env);
        CHECK(r1.verdict == FireVerdict::Transition);
        CHECK(cfg.state == "S2");
        auto r2 = fire_transition(m, cfg, "t2", {}, {}, env);
        CHECK(r2.verdict == FireVerdict::Transition);
        CHECK(cfg.state == "S1");
    }
    CHECK(value_to_string(cfg.ledger.storage.at("x")) == "0");

    std::string before = snapshot(cfg);
    auto r = fire_transition(m, cfg, "t1", {}, {}, env);
    CHECK(r.verdict == FireVerdict::GuardFalse);
    CHECK(snapshot(cfg) == before);
}

TEST_CASE("wrong state and bad calls commit nothing") {
    ContractModel m = load_fixture("simple_contract.vsc");
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(m, {}, env);
    std::string before = snapshot(cfg);

    CHECK(fire_transition(m, cfg, "t2", {}, {}, env).verdict ==
          FireVerdict::WrongState);
    CHECK(snapshot(cfg) == before);

    CHECK(fire_transition(m, cfg, "t1", {u64(1)}, {}, env).verdict ==
          FireVerdict::BadCall);
    CHECK(snapshot(cfg) == before);

    ContractModel pay = inline_contract(kPay);
    ContractConfig pcfg = deploy_contract(pay, {}, env);
    // address expected, int given
    CHECK(fire_transition(pay, pcfg, "pay", {u64(2), u64(1)}, {}, env).verdict ==
          FireVerdict::BadCall);
}

TEST_CASE("unknown names hit the fallback path") {
    ContractModel m = load_fixture("simple_contract.vsc"); // no fallback
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(m, {}, env);
    std::string before = snapshot(cfg);
    CallCtx ctx;
    ctx.value = 3;
    auto r = fire_transition(m, cfg, "missing", {}, ctx, env);
    CHECK(r.verdict == FireVerdict::Fallback);
    CHECK(snapshot(cfg) == before); // without a handler nothing is accepted

    ContractModel koe = load_fixture("king_of_ether_2.vsc"); // has fallback
    ContractConfig kcfg = deploy_contract(koe, {}, env);
    CallCtx claim;
    claim.sender = 0xB;
    claim.value = 100;
    auto rk = fire_transition(koe, kcfg, "whatever", {}, claim, env);
    CHECK(rk.verdict == FireVerdict::Fallback);
    CHECK(kcfg.state == "Throne");
    CHECK(value_to_string(kcfg.ledger.storage.at("king")) == "0xb");
    CHECK(value_to_string(kcfg.ledger.storage.at("claimPrice")) == "150");
}

TEST_CASE("a raising action reverts the whole call") {
    ContractModel koe = load_fixture("king_of_ether_2.vsc");
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(koe, {}, env);

    // first claim succeeds: king is the zero address, payment to it succeeds
    CallCtx c1;
    c1.sender = 0xB;
    c1.value = 100;
    CHECK(fire_transition(koe, cfg, "", {}, c1, env).verdict ==
          FireVerdict::Fallback);
    std::string before = snapshot(cfg);

    // next claim: the sitting king refuses the compensation, all is undone
    ScriptedEnvironment reject;
    reject.outcomes = {false};
    CallCtx c2;
    c2.sender = 0xC;
    c2.value = 150;
    auto r = fire_transition(koe, cfg, "", {}, c2, reject);
    CHECK(r.verdict == FireVerdict::FallbackException);
    CHECK(snapshot(cfg) == before);
}

TEST_CASE("division, modulo and indexing raise on bad operands") {
    ContractModel pay = inline_contract(kPay);
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(pay, {}, env);
    std::string before = snapshot(cfg);

    auto div = fire_transition(pay, cfg, "ratio", {u64(1), u64(0)}, {}, env);
    CHECK(div.verdict == FireVerdict::ActionException);
    CHECK(snapshot(cfg) == before);

    auto idx = fire_transition(pay, cfg, "peek", {}, {}, env);
    CHECK(idx.verdict == FireVerdict::ActionException); // xs is empty
    CHECK(snapshot(cfg) == before);

    auto ok = fire_transition(pay, cfg, "ratio", {u64(7), u64(2)}, {}, env);
    CHECK(ok.verdict == FireVerdict::TransitionRet);
    REQUIRE(ok.returned);
    CHECK(value_to_string(*ok.returned) == "3");
}

TEST_CASE("arithmetic wraps at 64 bits") {
    ContractModel pay = inline_contract(kPay);
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(pay, {}, env);
    CHECK(fire_transition(pay, cfg, "wrap", {}, {}, env).verdict ==
          FireVerdict::Transition);
    CHECK(value_to_string(cfg.ledger.storage.at("got")) ==
          "18446744073709551615");
}

TEST_CASE("payments move balances and refusal semantics differ by kind") {
    ContractModel pay = inline_contract(kPay);
    ScriptedEnvironment env;
    CallCtx dep;
    ContractConfig cfg = deploy_contract(pay, dep, env);

    CallCtx fund;
    fund.sender = 0xA;
    fund.value = 10;
    CHECK(fire_transition(pay, cfg, "put", {}, fund, env).verdict ==
          FireVerdict::Transition);
    CHECK(cfg.ledger.balances.at(1) == 10);
    CHECK(value_to_string(cfg.ledger.storage.at("got")) == "10");

    // transfer: success debits the contract and credits the target
    auto t = fire_transition(pay, cfg, "pay", {addr(0xB), u64(4)}, {}, env);
    CHECK(t.verdict == FireVerdict::Transition);
    CHECK(cfg.ledger.balances.at(1) == 6);
    CHECK(cfg.ledger.balances.at(0xB) == 4);

    // transfer: refusal raises and reverts
    ScriptedEnvironment reject;
    reject.outcomes = {false};
    std::string before = snapshot(cfg);
    CHECK(fire_transition(pay, cfg, "pay", {addr(0xB), u64(1)}, {}, reject)
              .verdict == FireVerdict::ActionException);
    CHECK(snapshot(cfg) == before);

    // transfer: insufficient contract balance raises without asking
    CHECK(fire_transition(pay, cfg, "pay", {addr(0xB), u64(100)}, {}, env)
              .verdict == FireVerdict::ActionException);
    CHECK(snapshot(cfg) == before);

    // send: refusal returns false and the call still commits
    ScriptedEnvironment reject2;
    reject2.outcomes = {false};
    auto s = fire_transition(pay, cfg, "trySend", {addr(0xB), u64(1)}, {},
                             reject2);
    CHECK(s.verdict == FireVerdict::TransitionRet);
    REQUIRE(s.returned);
    CHECK(value_to_string(*s.returned) == "false");
    CHECK(cfg.ledger.balances.at(1) == 6);

    auto s2 = fire_transition(pay, cfg, "trySend", {addr(0xB), u64(1)}, {}, env);
    REQUIRE(s2.returned);
    CHECK(value_to_string(*s2.returned) == "true");
    CHECK(cfg.ledger.balances.at(1) == 5);
    CHECK(cfg.ledger.balances.at(0xB) == 5);
}

TEST_CASE("value is credited exactly on committed calls") {
    ContractModel pay = inline_contract(kPay);
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(pay, {}, env);

    CallCtx ctx;
    ctx.value = 5;
    CHECK(fire_transition(pay, cfg, "wrap", {}, ctx, env).verdict ==
          FireVerdict::Transition);
    CHECK(cfg.ledger.balances.at(1) == 5); // non-payable is a codegen concern

    // a reverted call keeps nothing, including the sent value
    CHECK(fire_transition(pay, cfg, "ratio", {u64(1), u64(0)}, ctx, env)
              .verdict == FireVerdict::ActionException);
    CHECK(cfg.ledger.balances.at(1) == 5);
}

TEST_CASE("returns transitions always carry a value") {
    ContractModel m = inline_contract(R"(
contract R {
    states A;
    initial A;
    var uint x;
    transition give from A to A returns uint { return x + 2; }
    transition bare from A to A returns uint { x += 1; }
    transition flag from A to A returns bool { return x > 0; }
}
)");
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(m, {}, env);

    auto g = fire_transition(m, cfg, "give", {}, {}, env);
    CHECK(g.verdict == FireVerdict::TransitionRet);
    CHECK(value_to_string(*g.returned) == "2");

    // falling off the end of a returns transition yields the zero value
    auto b = fire_transition(m, cfg, "bare", {}, {}, env);
    CHECK(b.verdict == FireVerdict::TransitionRet);
    CHECK(value_to_string(*b.returned) == "0");

    auto f = fire_transition(m, cfg, "flag", {}, {}, env);
    CHECK(value_to_string(*f.returned) == "true");
}

TEST_CASE("loops and branches execute structurally") {
    ContractModel m = inline_contract(R"(
contract L {
    states A;
    initial A;
    var uint total;
    var uint n;
    transition sum(uint k) from A to A {
        total = 0;
        for (uint i = 0; i < k; i += 1) { total += i; }
    }
    transition drain from A to A {
        n = 5;
        while (n > 0) { n -= 1; total += 2; }
    }
    transition pick(uint v) from A to A {
        if (v > 10) { total = 1; } else { total = 2; }
    }
}
)");
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(m, {}, env);

    fire_transition(m, cfg, "sum", {u64(5)}, {}, env);
    CHECK(value_to_string(cfg.ledger.storage.at("total")) == "10");

    fire_transition(m, cfg, "drain", {}, {}, env);
    CHECK(value_to_string(cfg.ledger.storage.at("total")) == "20");
    CHECK(value_to_string(cfg.ledger.storage.at("n")) == "0");

    fire_transition(m, cfg, "pick", {u64(11)}, {}, env);
    CHECK(value_to_string(cfg.ledger.storage.at("total")) == "1");
    fire_transition(m, cfg, "pick", {u64(3)}, {}, env);
    CHECK(value_to_string(cfg.ledger.storage.at("total")) == "2");
}

TEST_CASE("locals live in frames, not in storage") {
    ContractModel m = inline_contract(R"(
contract F {
    states A;
    initial A;
    var uint out;
    transition go from A to A { uint tmp = 41; tmp += 1; out = tmp; }
}
)");
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(m, {}, env);
    fire_transition(m, cfg, "go", {}, {}, env);
    CHECK(value_to_string(cfg.ledger.storage.at("out")) == "42");
    CHECK(cfg.ledger.storage.count("tmp") == 0);
}

TEST_CASE("events land in the log only when the call commits") {
    ContractModel m = inline_contract(R"(
contract E {
    states A;
    initial A;
    event Ping(uint a, uint b);
    var uint x;
    transition ok from A to A { emit Ping(1, 2); }
    transition boom from A to A { emit Ping(3, 4); x = 1 / x; }
}
)");
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(m, {}, env);

    auto r = fire_transition(m, cfg, "ok", {}, {}, env);
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0].event == "Ping");
    CHECK(value_to_string(r.events[0].args[1]) == "2");
    CHECK(cfg.ledger.log.size() == 1);

    auto rb = fire_transition(m, cfg, "boom", {}, {}, env);
    CHECK(rb.verdict == FireVerdict::ActionException);
    CHECK(rb.events.empty());
    CHECK(cfg.ledger.log.size() == 1);
}

TEST_CASE("runaway loops trip the step limit and revert") {
    ContractModel pay = inline_contract(kPay);
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(pay, {}, env);
    std::string before = snapshot(cfg);
    CHECK(fire_transition(pay, cfg, "spin", {}, {}, env).verdict ==
          FireVerdict::ActionException);
    CHECK(snapshot(cfg) == before);
}

TEST_CASE("now and block number update only on commit") {
    ContractModel m = load_fixture("simple_contract.vsc");
    ScriptedEnvironment env;
    ContractConfig cfg = deploy_contract(m, {}, env);

    CallCtx ctx;
    ctx.now = 50;
    ctx.block_number = 3;
    fire_transition(m, cfg, "t1", {}, ctx, env);
    CHECK(cfg.ledger.now == 50);
    CHECK(cfg.ledger.block_number == 3);

    CallCtx later;
    later.now = 77;
    CHECK(fire_transition(m, cfg, "t1", {}, later, env).verdict ==
          FireVerdict::WrongState);
    CHECK(cfg.ledger.now == 50);
}

TEST_CASE("keccak256 is deterministic and argument sensitive") {
    CHECK(builtin_hash({u64(1), b32(2)}) == builtin_hash({u64(1), b32(2)}));
    CHECK(builtin_hash({u64(1), b32(2)}) != builtin_hash({u64(2), b32(2)}));
    CHECK(builtin_hash({u64(1)}) != builtin_hash({addr(1)}));
}

TEST_CASE("run_trace replays calls and reports per-step results") {
    ContractModel m = load_fixture("simple_contract.vsc");
    CallCtx dep;
    dep.now = 5;
    std::vector<TraceCall> calls;
    calls.push_back({"t1", {}, {}, {}});
    calls.push_back({"t2", {}, {}, {}});
    calls.push_back({"t2", {}, {}, {}});
    Trace tr = run_trace(m, dep, calls);
    REQUIRE(tr.steps.size() == 3);
    CHECK(tr.steps[0].verdict == FireVerdict::Transition);
    CHECK(tr.steps[0].state_after == "S2");
    CHECK(tr.steps[1].verdict == FireVerdict::Transition);
    CHECK(tr.steps[2].verdict == FireVerdict::WrongState);
    CHECK(tr.final_config.state == "S1");
    CHECK(value_to_string(tr.final_config.ledger.storage.at("x")) == "9");

    Trace again = run_trace(m, dep, calls);
    CHECK(ledger_hash(again.final_config.ledger) ==
          ledger_hash(tr.final_config.ledger));
}

TEST_CASE("randomized calls keep failed calls atomic and conserve funds") {
    for (const char *fx :
         {"dao.vsc", "king_of_ether_2.vsc", "blind_auction.vsc"}) {
        CAPTURE(fx);
        ContractModel m = load_fixture(fx);
        std::mt19937 rng(1234);
        std::uniform_int_distribution<int> coin(0, 1);
        std::uniform_int_distribution<std::uint64_t> small(0, 3);
        std::uniform_int_distribution<std::size_t> pick_t(
            0, m.transitions.size()); // one past the end: unknown name

        ScriptedEnvironment dep_env;
        ContractConfig cfg = deploy_contract(m, {}, dep_env);
        std::uint64_t expected_balance = 0;
        std::uint64_t now = 0;

        for (int step = 0; step < 500; ++step) {
            std::size_t ti = pick_t(rng);
            std::string name =
                ti == m.transitions.size() ? "nobody" : m.transitions[ti].name;
            std::vector<Value> args;
            if (const Transition *t = m.find_transition(name)) {
                for (const auto &p : t->params) {
                    if (auto *nt = std::get_if<NamedType>(&p.type->node)) {
                        if (nt->name == "address")
                            args.push_back(addr(0xA + small(rng)));
                        else if (nt->name == "bytes32")
                            args.push_back(b32(0x11));
                        else
                            args.push_back(u64(small(rng)));
                    } else if (std::holds_alternative<ArrayType>(p.type->node)) {
                        auto *at = std::get_if<ArrayType>(&p.type->node);
                        auto *en = std::get_if<NamedType>(&at->elem->node);
                        Value elem = en && en->name == "bytes32" ? b32(0x11)
                                                                 : u64(1);
                        args.push_back(
                            Value{ArrayVal{{elem}, at->elem}});
                    } else {
                        args.push_back(u64(0));
                    }
                }
            }
            CallCtx ctx;
            ctx.sender = 0xA + small(rng);
            ctx.value = small(rng);
            now += small(rng) * 100000;
            ctx.now = now;

            RecordingEnv env;
            env.script = {coin(rng) == 1, coin(rng) == 1};
            std::string before = snapshot(cfg);
            auto r = fire_transition(m, cfg, name, args, ctx, env);

            bool committed = r.verdict == FireVerdict::Transition ||
                             r.verdict == FireVerdict::TransitionRet ||
                             (r.verdict == FireVerdict::Fallback &&
                              m.fallback_action != nullptr);
            if (!committed) {
                CHECK_MESSAGE(snapshot(cfg) == before,
                              fire_verdict_name(r.verdict));
            } else {
                expected_balance += ctx.value;
                for (const auto &[amt, ans] : env.asked)
                    if (ans) expected_balance -= amt;
                auto it = cfg.ledger.balances.find(1);
                std::uint64_t bal =
                    it == cfg.ledger.balances.end() ? 0 : it->second;
                CHECK(bal == expected_balance);
            }
        }
    }
}
