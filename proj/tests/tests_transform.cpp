#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"

#include <algorithm>

using namespace vt;

namespace {

ContractModel inline_contract(const std::string &src) {
    auto pr = parse_contract(src);
    REQUIRE_MESSAGE(pr.model, diagnostics_to_text(pr.diagnostics, "<inline>"));
    return std::move(*pr.model);
}

struct Row {
    int label;
    const char *edge;
    const char *role;
};

} // namespace

TEST_CASE("conformance adds the fresh initial and constructor edge last") {
    ContractModel m = load_fixture("simple_contract.vsc");
    auto cr = conformance(m);
    CHECK(cr.injected_initial == "s_I");
    CHECK(cr.model.initial == "s_I");
    CHECK(cr.model.states ==
          std::vector<std::string>{"S1", "S2", "s_I"});
    REQUIRE(cr.model.transitions.size() == 3);
    const Transition &ctor = cr.model.transitions.back();
    CHECK(ctor.name == "constructor");
    CHECK(ctor.from == "s_I");
    CHECK(ctor.to == "S1");
    REQUIRE(ctor.action);
    CHECK(stmt_to_string(*ctor.action) == stmt_to_string(*m.constructor_action));
    CHECK(cr.model.constructor_action == nullptr);
}

TEST_CASE("conformance adds one fallback loop per original state") {
    ContractModel m = inline_contract(R"(
contract F {
    states A, B, C, D;
    initial A;
    var uint x;
    fallback { x += 1; }
    transition t from A to B;
}
)");
    auto cr = conformance(m);
    CHECK(cr.model.states.size() == 5); // four originals plus s_I
    // original transition, four fallback loops, constructor: +5
    REQUIRE(cr.model.transitions.size() == 6);
    int loops = 0;
    for (const auto &t : cr.model.transitions) {
        if (t.name.rfind("fallback@", 0) == 0) {
            ++loops;
            CHECK(t.from == t.to);
            CHECK(t.from == t.name.substr(std::string("fallback@").size()));
            REQUIRE(t.action);
            CHECK(stmt_to_string(*t.action) == stmt_to_string(*m.fallback_action));
        }
    }
    CHECK(loops == 4);
    CHECK(cr.model.transitions.back().name == "constructor");
    CHECK(cr.model.fallback_action == nullptr);
}

TEST_CASE("conformance renames on collision with existing names") {
    ContractModel m = inline_contract(R"(
contract G {
    states s_I, A;
    initial A;
    transition constructor from A to s_I;
}
)");
    auto cr = conformance(m);
    CHECK(cr.injected_initial != "s_I");
    CHECK(cr.model.is_state(cr.injected_initial));
    const Transition &added = cr.model.transitions.back();
    CHECK(added.name != "constructor"); // the user took that name
    CHECK(added.from == cr.injected_initial);
    CHECK(!cr.notes.empty());
}

TEST_CASE("action_may_raise is the conservative syntactic test") {
    ContractModel m = inline_contract(R"(
contract R {
    states A;
    initial A;
    struct P { uint a; }
    var uint x;
    var uint[] xs;
    var mapping(address => uint) mp;
    var P[] ps;
    transition div from A to A { x = x / 2; }
    transition mod from A to A { x = x - x % 3; }
    transition idx from A to A { x = xs[0]; }
    transition mapRead from A to A { x = mp[msg.sender]; }
    transition doTransfer from A to A { msg.sender.transfer(x); }
    transition doCall from A to A { msg.sender.call(x); }
    transition sendKept from A to A { if (msg.sender.send(x)) { x = 1; } }
    transition sendDropped from A to A { msg.sender.send(x); }
    transition grow from A to A { xs.push(1); }
    transition hash(bytes32 b) from A to A { x = x + 1; }
    transition structPush from A to A { ps.push(P(1)); }
    transition structIdx from A to A { x = ps[0].a; }
}
)");
    auto raises = [&](const char *name) {
        const Transition *t = m.find_transition(name);
        REQUIRE(t);
        return action_may_raise(m, *t);
    };
    CHECK(raises("div"));
    CHECK(raises("mod"));
    CHECK(raises("idx"));
    CHECK(raises("doTransfer"));
    CHECK(raises("doCall"));
    CHECK(raises("sendKept"));
    CHECK(raises("structIdx"));
    CHECK_FALSE(raises("mapRead"));   // mapping reads default, never raise
    CHECK_FALSE(raises("sendDropped")); // unconsumed send cannot alter a path
    CHECK_FALSE(raises("grow"));
    CHECK_FALSE(raises("hash"));
    CHECK_FALSE(raises("structPush"));
}

TEST_CASE("augment_statement expands a while into exit, enter and body") {
    ContractModel scope = inline_contract(R"(
contract S { states A; initial A; var uint x; }
)");
    auto s = parse_statement("while (x > 0) { x -= 1; }");
    REQUIRE(s.stmt);
    auto r = augment_statement(s.stmt, "t", "A", "D", "D", scope);
    CHECK(r.new_states.size() == 1);
    REQUIRE(r.transitions.size() == 3);
    REQUIRE(r.provenance.size() == 3);

    CHECK(r.provenance[0].role == EdgeRole::LoopExit);
    CHECK(r.transitions[0].from == "A");
    CHECK(r.transitions[0].to == "D");
    CHECK(expr_to_string(*r.transitions[0].guard) == "!(x > 0)");

    CHECK(r.provenance[1].role == EdgeRole::LoopEnter);
    CHECK(r.transitions[1].from == "A");
    CHECK(r.transitions[1].to == r.new_states[0]);
    CHECK(expr_to_string(*r.transitions[1].guard) == "x > 0");

    CHECK(r.provenance[2].role == EdgeRole::Statement);
    CHECK(r.transitions[2].from == r.new_states[0]);
    CHECK(r.transitions[2].to == "A"); // loops back to the head
    // labels are assigned by augment_model, not by the expander itself
    CHECK(r.provenance[0].label == 0);
}

TEST_CASE("augment_statement maps simple statements and returns to one edge") {
    ContractModel scope = inline_contract(R"(
contract S { states A; initial A; var uint x; }
)");
    auto s1 = parse_statement("x = 1;");
    auto r1 = augment_statement(s1.stmt, "t", "A", "D", "R", scope);
    CHECK(r1.new_states.empty());
    REQUIRE(r1.transitions.size() == 1);
    CHECK(r1.transitions[0].from == "A");
    CHECK(r1.transitions[0].to == "D");
    CHECK(r1.provenance[0].role == EdgeRole::Statement);

    auto s2 = parse_statement("return x;");
    auto r2 = augment_statement(s2.stmt, "t", "A", "D", "R", scope);
    REQUIRE(r2.transitions.size() == 1);
    CHECK(r2.transitions[0].to == "R"); // return jumps to the return target
}

TEST_CASE("augment_statement orders branches true, false, then bodies") {
    ContractModel scope = inline_contract(R"(
contract S { states A; initial A; var uint x; }
)");
    auto s = parse_statement("if (x > 2) { x = 1; } else { x = 0; }");
    auto r = augment_statement(s.stmt, "t", "A", "D", "D", scope);
    REQUIRE(r.transitions.size() == 4);
    CHECK(r.provenance[0].role == EdgeRole::BranchTrue);
    CHECK(expr_to_string(*r.transitions[0].guard) == "x > 2");
    CHECK(r.provenance[1].role == EdgeRole::BranchFalse);
    CHECK(expr_to_string(*r.transitions[1].guard) == "!(x > 2)");
    // then-branch expands before the else-branch
    CHECK(r.provenance[2].role == EdgeRole::Statement);
    CHECK(stmt_to_string(*r.transitions[2].action) == "x = 1;");
    CHECK(stmt_to_string(*r.transitions[3].action) == "x = 0;");
    CHECK(r.transitions[2].to == "D");
    CHECK(r.transitions[3].to == "D");
}

TEST_CASE("the blind auction legend is reproduced row for row") {
    ContractModel m = load_fixture("blind_auction.vsc");
    AugmentedModel am = augment_model(m);
    auto rows = legend(am);
    REQUIRE(rows.size() == 43);

    static const Row expected[] = {
        {1, "bid__entry", "entry"},
        {2, "bid__1", "statement"},
        {3, "bid__2", "statement"},
        {4, "close__entry", "entry"},
        {5, "close__complete", "complete"},
        {6, "reveal__entry", "entry"},
        {7, "reveal__revert", "revert"},
        {8, "reveal__ok", "no-revert"},
        {9, "reveal__1", "statement"},
        {10, "reveal__2", "loop-exit"},
        {11, "reveal__3", "loop-enter"},
        {12, "reveal__4", "branch-true"},
        {13, "reveal__5", "branch-false"},
        {14, "reveal__6", "statement"},
        {15, "reveal__7", "statement"},
        {16, "reveal__8", "statement"},
        {17, "finish__entry", "entry"},
        {18, "finish__complete", "complete"},
        {19, "cancelABB__entry", "entry"},
        {20, "cancelABB__complete", "complete"},
        {21, "cancelRB__entry", "entry"},
        {22, "cancelRB__complete", "complete"},
        {23, "withdraw__entry", "entry"},
        {24, "withdraw__revert", "revert"},
        {25, "withdraw__ok", "no-revert"},
        {26, "withdraw__1", "statement"},
        {27, "withdraw__2", "branch-true"},
        {28, "withdraw__3", "branch-false"},
        {29, "withdraw__4", "branch-true"},
        {30, "withdraw__5", "branch-false"},
        {31, "withdraw__6", "statement"},
        {32, "withdraw__7", "statement"},
        {33, "withdraw__8", "statement"},
        {34, "unbid__entry", "entry"},
        {35, "unbid__revert", "revert"},
        {36, "unbid__ok", "no-revert"},
        {37, "unbid__1", "statement"},
        {38, "unbid__2", "branch-true"},
        {39, "unbid__3", "branch-false"},
        {40, "unbid__4", "statement"},
        {41, "unbid__5", "statement"},
        {42, "constructor__entry", "entry"},
        {43, "constructor__complete", "complete"},
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CAPTURE(i);
        CHECK(rows[i].label == expected[i].label);
        CHECK(rows[i].transition == expected[i].edge);
        CHECK(rows[i].role == expected[i].role);
    }

    // spot checks on endpoints and carried text
    CHECK(rows[3].text == "now >= creationTime + 5 days");
    CHECK(rows[12].text.substr(0, 2) == "!(");
    CHECK(rows[30].text == "msg.sender.transfer(amount);");
    CHECK(rows[31].text == "msg.sender.transfer(amount - highestBid);");
    CHECK(rows[32].text == "pendingReturns[msg.sender] = 0;");
    CHECK(rows[32].from == "withdraw_s3");
    CHECK(rows[32].to == "F");
    CHECK(rows[41].from == "s_I");
    CHECK(rows[42].to == "ABB");

    // the withdraw body alone contributes five fresh states and eight edges
    int withdraw_states = 0;
    for (const auto &s : am.added_states)
        if (s.rfind("withdraw_s", 0) == 0) ++withdraw_states;
    CHECK(withdraw_states == 5);

    CHECK(am.by_label(33));
    CHECK(am.by_label(33)->name == "withdraw__8");
    CHECK(am.by_label(44) == nullptr);
}

TEST_CASE("the king of ether legend pins the alias targets") {
    ContractModel m = load_fixture("king_of_ether_1.vsc");
    AugmentedModel am = augment_model(m);
    auto rows = legend(am);
    REQUIRE(rows.size() == 11);
    CHECK(rows[0].transition == "fallback@Throne__entry");
    CHECK(rows[3].transition == "fallback@Throne__1");
    CHECK(rows[3].role == "branch-true");
    CHECK(rows[3].text == "msg.value >= claimPrice");
    CHECK(rows[6].transition == "fallback@Throne__4");
    CHECK(rows[6].role == "branch-false");
    CHECK(rows[6].text == "!king.call(claimPrice)");
    CHECK(rows[7].transition == "fallback@Throne__5");
    CHECK(rows[7].text == "king = msg.sender;");
    CHECK(rows[9].transition == "constructor__entry");

    auto aliases = load_aliases("king_of_ether_1");
    CHECK(aliases.at("4") == "4");
    CHECK(aliases.at("5") == "7");
    CHECK(aliases.at("7") == "8");
}

TEST_CASE("augmented models satisfy the structural invariants") {
    for (const char *fx :
         {"simple_contract.vsc", "blind_auction.vsc", "dao.vsc",
          "king_of_ether_1.vsc", "king_of_ether_2.vsc",
          "resource_allocation.vsc", "resource_allocation_fixed.vsc",
          "simple_deadlock.vsc"}) {
        CAPTURE(fx);
        ContractModel m = load_fixture(fx);
        AugmentedModel am = augment_model(m);

        // labels form the bijection 1..N in model order
        auto rows = legend(am);
        CHECK(rows.size() == am.model.transitions.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            CHECK(rows[i].label == static_cast<int>(i) + 1);

        std::set<std::string> states(am.model.states.begin(),
                                     am.model.states.end());
        std::map<std::string, std::pair<int, int>> gadget; // origin -> rev/ok
        for (const auto &t : am.model.transitions) {
            const Provenance *p = am.prov(t.name);
            REQUIRE_MESSAGE(p, t.name);
            CHECK(states.count(t.from) == 1);
            CHECK(states.count(t.to) == 1);
            // every remaining action is one edge worth of behavior
            if (t.action)
                CHECK((stmt_is_simple(*t.action) ||
                       std::holds_alternative<ReturnStmt>(t.action->node)));
            if (p->role == EdgeRole::Revert) gadget[p->origin].first++;
            if (p->role == EdgeRole::NoRevert) gadget[p->origin].second++;
        }
        for (const auto &[origin, counts] : gadget) {
            CAPTURE(origin);
            CHECK(counts.first == 1);
            CHECK(counts.second == 1);
        }

        // complementary guards on sibling branch pairs
        std::map<std::string, std::vector<const Transition *>> by_from;
        for (const auto &t : am.model.transitions)
            by_from[t.from].push_back(&t);
        for (const auto &t : am.model.transitions) {
            const Provenance *p = am.prov(t.name);
            if (p->role != EdgeRole::BranchTrue) continue;
            bool found = false;
            std::string negated = expr_to_string(*negate_expr(t.guard));
            for (const Transition *o : by_from[t.from]) {
                const Provenance *po = am.prov(o->name);
                if (po->role == EdgeRole::BranchFalse &&
                    po->origin == p->origin &&
                    expr_to_string(*o->guard) == negated) {
                    found = true;
                    break;
                }
            }
            CHECK_MESSAGE(found, t.name);
        }

        // added and original states partition the state set
        for (const auto &s : am.added_states)
            CHECK_FALSE(am.is_original_state(s));
        for (const auto &s : am.original_states)
            CHECK(states.count(s) == 1);
    }
}

TEST_CASE("augmentation is deterministic") {
    ContractModel m1 = load_fixture("blind_auction.vsc");
    ContractModel m2 = load_fixture("blind_auction.vsc");
    auto r1 = legend(augment_model(m1));
    auto r2 = legend(augment_model(m2));
    REQUIRE(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].transition == r2[i].transition);
        CHECK(r1[i].from == r2[i].from);
        CHECK(r1[i].to == r2[i].to);
        CHECK(r1[i].text == r2[i].text);
    }
}

TEST_CASE("empty actions become a single complete edge") {
    ContractModel m = load_fixture("blind_auction.vsc");
    AugmentedModel am = augment_model(m);
    const Transition *t = am.model.find_transition("close__complete");
    REQUIRE(t);
    CHECK(t->action == nullptr);
    CHECK(t->guard == nullptr);
    CHECK(am.prov("close__complete")->role == EdgeRole::Complete);
    // the entry edge carries the original guard
    const Transition *e = am.model.find_transition("close__entry");
    REQUIRE(e);
    REQUIRE(e->guard);
    CHECK(expr_to_string(*e->guard) == "now >= creationTime + 5 days");
}

TEST_CASE("entry edges inherit the parameters of their origin") {
    ContractModel m = load_fixture("blind_auction.vsc");
    AugmentedModel am = augment_model(m);
    const Transition *e = am.model.find_transition("reveal__entry");
    REQUIRE(e);
    REQUIRE(e->params.size() == 2);
    CHECK(e->params[0].name == "values");
    CHECK(e->params[1].name == "secrets");
}
