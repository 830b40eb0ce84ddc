#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"

#include "verisol/ctl.hpp"

using namespace vt;

TEST_CASE("simple contract parses into the expected tuple") {
    ContractModel m = load_fixture("simple_contract.vsc");
    CHECK(m.name == "SimpleContract");
    CHECK(m.states == std::vector<std::string>{"S1", "S2"});
    CHECK(m.initial == "S1");
    CHECK(m.finals.empty());
    REQUIRE(m.vars.size() == 1);
    CHECK(m.vars[0].name == "x");
    REQUIRE(m.transitions.size() == 2);
    CHECK(m.transitions[0].name == "t1");
    CHECK(m.transitions[0].from == "S1");
    CHECK(m.transitions[0].to == "S2");
    REQUIRE(m.transitions[0].guard);
    CHECK(expr_to_string(*m.transitions[0].guard) == "x > 0");
    CHECK(m.transitions[0].action == nullptr);
    REQUIRE(m.transitions[1].action);
    CHECK(m.constructor_action != nullptr);
    CHECK(m.fallback_action == nullptr);
}

TEST_CASE("blind auction parses with structs, events and properties") {
    ContractModel m = load_fixture("blind_auction.vsc");
    CHECK(m.states.size() == 4);
    CHECK(m.finals == std::vector<std::string>{"F", "C"});
    REQUIRE(m.find_struct("Bid"));
    CHECK(m.find_struct("Bid")->fields.size() == 2);
    REQUIRE(m.find_var("bids"));
    CHECK(type_to_string(*m.find_var("bids")->type) ==
          "mapping(address => Bid[])");
    REQUIRE(m.find_transition("bid"));
    CHECK(m.find_transition("bid")->payable);
    CHECK_FALSE(m.find_transition("close")->payable);
    CHECK(m.property_texts.size() == 6);
}

TEST_CASE("time units scale literals and keep their spelling") {
    auto er = parse_expression("now >= creationTime + 5 days");
    REQUIRE(er.expr);
    CHECK(expr_to_string(*er.expr) == "now >= creationTime + 5 days");
    const auto &bin = std::get<Binary>(er.expr->node);
    const auto &add = std::get<Binary>(bin.rhs->node);
    const auto &lit = std::get<IntLit>(add.rhs->node);
    CHECK(lit.value == 5u * 24 * 60 * 60);
    CHECK(lit.display == "5 days");

    auto hours = parse_expression("2 hours");
    CHECK(std::get<IntLit>(hours.expr->node).value == 7200);
    auto weeks = parse_expression("1 weeks");
    CHECK(std::get<IntLit>(weeks.expr->node).value == 604800);
}

TEST_CASE("expression grammar covers the call and env forms") {
    auto kinds = [](const std::string &src) {
        auto er = parse_expression(src);
        REQUIRE_MESSAGE(er.expr, src);
        return std::get<CallExpr>(er.expr->node).kind;
    };
    CHECK(kinds("keccak256(a, b)") == CallKind::BuiltinHash);
    CHECK(kinds("msg.sender.transfer(x)") == CallKind::Transfer);
    CHECK(kinds("msg.sender.send(x)") == CallKind::Send);
    CHECK(kinds("king.call(x)") == CallKind::LowCall);
    CHECK(kinds("xs.push(1)") == CallKind::Push);
    CHECK(kinds("Bid(a, b)") == CallKind::Internal);

    auto env = parse_expression("msg.value");
    CHECK(std::get<EnvExpr>(env.expr->node).kind == EnvKind::MsgValue);
    auto len = parse_expression("values.length");
    CHECK(std::get<Member>(len.expr->node).member == "length");
    auto idx = parse_expression("bids[msg.sender][i].deposit");
    CHECK(expr_to_string(*idx.expr) == "bids[msg.sender][i].deposit");
    auto hex = parse_expression("0x1A");
    CHECK(std::get<HexLit>(hex.expr->node).value == 0x1a);
}

TEST_CASE("precedence binds tighter operators first") {
    auto er = parse_expression("a || b && c == d + e * f");
    CHECK(expr_to_string(*er.expr) == "a || b && c == d + e * f");
    const auto &orop = std::get<Binary>(er.expr->node);
    CHECK(orop.op == BinOp::Or);
    const auto &andop = std::get<Binary>(orop.rhs->node);
    CHECK(andop.op == BinOp::And);
    const auto &eq = std::get<Binary>(andop.rhs->node);
    CHECK(eq.op == BinOp::Eq);
}

TEST_CASE("statement grammar parses the control forms") {
    auto s1 = parse_statement("uint i = 0;");
    REQUIRE(s1.stmt);
    CHECK(std::get<VarDeclStmt>(s1.stmt->node).name == "i");

    auto s2 = parse_statement(
        "for (uint i = 0; i < n; i += 1) { total += xs[i]; }");
    REQUIRE(s2.stmt);
    const auto &f = std::get<ForStmt>(s2.stmt->node);
    REQUIRE(f.init);
    REQUIRE(f.cond);
    REQUIRE(f.post);
    CHECK(std::get<Assign>(f.post->node).op == AssignOp::AddAssign);

    auto s3 = parse_statement("if (a > b) { x = 1; } else { x = 2; }");
    REQUIRE(s3.stmt);
    const auto &i = std::get<IfStmt>(s3.stmt->node);
    CHECK(i.else_branch != nullptr);

    auto s4 = parse_statement("while (x > 0) { x = x - 1; }");
    REQUIRE(s4.stmt);
    CHECK(std::get<WhileStmt>(s4.stmt->node).body != nullptr);

    auto s5 = parse_statement("emit Done(a, b);");
    REQUIRE(s5.stmt);
    CHECK(std::get<EmitStmt>(s5.stmt->node).event == "Done");

    auto s6 = parse_statement("return x + 1;");
    REQUIRE(s6.stmt);
    CHECK(std::get<ReturnStmt>(s6.stmt->node).value != nullptr);
}

TEST_CASE("parse errors carry positions and do not produce a model") {
    auto missing = parse_contract("contract C { states A; initial A; "
                                  "var int x; transition t from A to A { x = } }");
    CHECK(!missing.model);
    CHECK(has_errors(missing.diagnostics));

    auto bad = parse_contract("contract C { states A, A; initial A; }");
    CHECK((has_errors(bad.diagnostics) ||
           (bad.model && has_errors(validate(*bad.model)))));

    auto stray = parse_expression("a +");
    CHECK(!stray.expr);
    CHECK(has_errors(stray.diagnostics));
}

TEST_CASE("validation rejects broken references") {
    auto check_err = [](const std::string &src) {
        auto pr = parse_contract(src);
        if (!pr.model || has_errors(pr.diagnostics)) return true;
        return has_errors(validate(*pr.model));
    };
    CHECK(check_err("contract C { states A; initial A; "
                    "transition t from A to B; }"));
    CHECK(check_err("contract C { states A; initial A; "
                    "transition t from A to A guard (y > 0); }"));
    CHECK(check_err("contract C { states A; initial A; var uint x; "
                    "transition t from A to A guard (x = 1); }"));
    CHECK(check_err("contract C { states A; initial A; "
                    "event E(uint a); transition t from A to A "
                    "{ emit E(1, 2); } }"));
    CHECK_FALSE(check_err("contract C { states A; initial A; var uint x; "
                          "transition t from A to A guard (x > 0) "
                          "{ x = x - 1; } }"));
}

TEST_CASE("final-state self-loops validate clean") {
    ContractModel m = load_fixture("blind_auction.vsc");
    auto diags = validate(m);
    for (const auto &d : diags)
        CHECK_MESSAGE(d.severity != Severity::Warning, d.message);
}

TEST_CASE("negate_expr wraps the condition") {
    auto er = parse_expression("a >= b && c");
    auto neg = negate_expr(er.expr);
    CHECK(expr_to_string(*neg) == "!(a >= b && c)");
}

TEST_CASE("statement ids walk pre-order") {
    auto s = parse_statement("{ uint a = 0; if (a > 0) { a = 1; } else { a = 2; } }");
    REQUIRE(s.stmt);
    auto ids = statement_ids(s.stmt);
    // root, decl, if, then-compound, then-assign, else-compound, else-assign
    CHECK(ids.size() == 7);
    CHECK(ids.count(StatementId{}) == 1);
    CHECK(ids.count(StatementId{0}) == 1);
    CHECK(ids.count(StatementId{1}) == 1);
    CHECK(ids.count(StatementId{1, 0}) == 1);
    CHECK(ids.count(StatementId{1, 1}) == 1);
    CHECK(statement_id_to_string(StatementId{1, 0}) == "[1.0]");
}

TEST_CASE("simple statements are exactly the single-edge ones") {
    auto simple = [](const std::string &src) {
        auto s = parse_statement(src);
        REQUIRE(s.stmt);
        return stmt_is_simple(*s.stmt);
    };
    CHECK(simple("x = 1;"));
    CHECK(simple("emit E(x);"));
    CHECK(simple("xs.push(1);"));
    // return gets its own edge to the return state, so it is not "simple"
    CHECK_FALSE(simple("return;"));
    CHECK_FALSE(simple("if (a) { x = 1; }"));
    CHECK_FALSE(simple("while (a) { x = 1; }"));
    CHECK_FALSE(simple("{ x = 1; }"));
}

TEST_CASE("normalize_tokens is whitespace insensitive") {
    auto a = normalize_tokens("pendingReturns[msg.sender] = 0");
    auto b = normalize_tokens("pendingReturns[ msg.sender ]=0");
    CHECK(a == b);
    // the semicolon is a token of its own; atom matching strips it first
    CHECK(normalize_tokens("x = 1;").back() == ";");
    CHECK(normalize_tokens("x=1") != normalize_tokens("x=2"));
}

TEST_CASE("model renders back to parseable DSL") {
    ContractModel m = load_fixture("blind_auction.vsc");
    auto round = parse_contract(model_to_dsl(m));
    REQUIRE(round.model);
    CHECK_FALSE(has_errors(round.diagnostics));
    CHECK(round.model->states == m.states);
    CHECK(round.model->initial == m.initial);
    CHECK(round.model->finals == m.finals);
    REQUIRE(round.model->transitions.size() == m.transitions.size());
    for (std::size_t i = 0; i < m.transitions.size(); ++i) {
        const auto &a = m.transitions[i];
        const auto &b = round.model->transitions[i];
        CHECK(a.name == b.name);
        CHECK(a.payable == b.payable);
        if (a.guard) CHECK(expr_to_string(*a.guard) == expr_to_string(*b.guard));
        if (a.action)
            CHECK(stmt_to_string(*a.action) == stmt_to_string(*b.action));
    }
    CHECK(round.model->property_texts == m.property_texts);
}

TEST_CASE("values print and compare canonically") {
    CHECK(value_to_string(u64(42)) == "42");
    CHECK(value_to_string(i64(-3)) == "-3");
    CHECK(value_to_string(addr(0x1a)) == "0x1a");
    CHECK(value_to_string(b32(0x11)) == "#11");
    CHECK(value_to_string(bv(true)) == "true");

    Value arr{ArrayVal{{u64(1), u64(2)}, make_named_type("uint")}};
    CHECK(value_to_string(arr) == "[1, 2]");
    Value st{StructVal{"Bid", {b32(0x11), u64(5)}}};
    CHECK(value_to_string(st) == "Bid(#11, 5)");

    CHECK(value_equal(u64(7), u64(7)));
    CHECK_FALSE(value_equal(u64(7), u64(8)));
    CHECK(value_encode(u64(7)) != value_encode(addr(7)));
}

TEST_CASE("zero values match their types") {
    ContractModel m = load_fixture("blind_auction.vsc");
    StructTable tab{&m};
    auto z = zero_value(*m.find_var("bids")->type, tab);
    CHECK(std::get<MappingVal>(z.node).entries.empty());
    auto zs = zero_value(*make_named_type("Bid"), tab);
    const auto &sv = std::get<StructVal>(zs.node);
    REQUIRE(sv.fields.size() == 2);
    CHECK(value_to_string(sv.fields[0]) == "#0");
    CHECK(value_to_string(sv.fields[1]) == "0");
}

TEST_CASE("ctl parses and prints the canonical surface") {
    auto round = [](const std::string &src) {
        auto r = parse_ctl(src);
        REQUIRE_MESSAGE(r.formula, src);
        return ctl_to_string(*r.formula);
    };
    CHECK(round("AG(close -> AG(!bid))") == "AG(close -> AG(!bid))");
    CHECK(round("A[!withdraw W finish]") == "A[!withdraw W finish]");
    CHECK(round("E[p U q]") == "E[p U q]");
    CHECK(round("AG(p -> AX(A[!p W q]))") == "AG(p -> AX(A[!p W q]))");
    CHECK(round("EF(p & !q | r)") == "EF((p & !q) | r)");

    auto bad = parse_ctl("AG(");
    CHECK(!bad.formula);
    CHECK(has_errors(bad.diagnostics));
}

TEST_CASE("ctl_atoms lists left to right without duplicates") {
    auto r = parse_ctl("AG(close -> AG(!(close | bid)))");
    REQUIRE(r.formula);
    CHECK(ctl_atoms(*r.formula) == std::vector<std::string>{"close", "bid"});
}
