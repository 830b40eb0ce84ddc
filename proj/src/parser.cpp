#include "verisol/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace verisol {

namespace {

enum class Tok {
    End,
    Ident,
    Int,
    Hex,
    String,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Dot,
    Arrow, // =>
    Assign,
    PlusAssign,
    MinusAssign,
    OrOr,
    AndAnd,
    EqEq,
    NotEq,
    Lt,
    Gt,
    Le,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Bang,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::uint64_t value = 0;
    Span span;
};

struct ParseError {
    Diagnostic diag;
};

class Lexer {
  public:
    explicit Lexer(const std::string &src) : src_(src) {}

    std::vector<Token> run(std::vector<Diagnostic> &diags) {
        std::vector<Token> out;
        while (true) {
            skip_trivia(diags);
            Token t = next(diags);
            out.push_back(t);
            if (t.kind == Tok::End) break;
        }
        return out;
    }

  private:
    const std::string &src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    char peek(std::size_t off = 0) const {
        return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
    }
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    Span here(std::size_t begin, int line, int col) const {
        return Span{begin, pos_, line, col};
    }

    void skip_trivia(std::vector<Diagnostic> &diags) {
        while (pos_ < src_.size()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                int line = line_, col = col_;
                std::size_t begin = pos_;
                advance();
                advance();
                bool closed = false;
                while (pos_ < src_.size()) {
                    if (peek() == '*' && peek(1) == '/') {
                        advance();
                        advance();
                        closed = true;
                        break;
                    }
                    advance();
                }
                if (!closed)
                    diags.push_back({Severity::Error, "unterminated-comment",
                                     "unterminated block comment",
                                     here(begin, line, col)});
            } else {
                break;
            }
        }
    }

    Token next(std::vector<Diagnostic> &diags) {
        if (pos_ >= src_.size())
            return Token{Tok::End, "", 0, Span{pos_, pos_, line_, col_}};
        std::size_t begin = pos_;
        int line = line_, col = col_;
        char c = advance();

        auto tok = [&](Tok k, std::string text) {
            return Token{k, std::move(text), 0, here(begin, line, col)};
        };

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (std::isalnum(static_cast<unsigned char>(peek())) ||
                   peek() == '_')
                advance();
            return tok(Tok::Ident, src_.substr(begin, pos_ - begin));
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            if (c == '0' && (peek() == 'x' || peek() == 'X')) {
                advance();
                while (std::isxdigit(static_cast<unsigned char>(peek())))
                    advance();
                Token t = tok(Tok::Hex, src_.substr(begin, pos_ - begin));
                t.value = std::strtoull(t.text.c_str(), nullptr, 16);
                return t;
            }
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            Token t = tok(Tok::Int, src_.substr(begin, pos_ - begin));
            t.value = std::strtoull(t.text.c_str(), nullptr, 10);
            return t;
        }
        if (c == '"') {
            std::string text;
            while (pos_ < src_.size() && peek() != '"') {
                char d = advance();
                if (d == '\\' && pos_ < src_.size()) {
                    char e = advance();
                    if (e == 'n') text += '\n';
                    else text += e;
                } else {
                    text += d;
                }
            }
            if (pos_ >= src_.size()) {
                diags.push_back({Severity::Error, "unterminated-string",
                                 "unterminated string literal",
                                 here(begin, line, col)});
            } else {
                advance();
            }
            Token t = tok(Tok::String, text);
            return t;
        }

        switch (c) {
        case '{': return tok(Tok::LBrace, "{");
        case '}': return tok(Tok::RBrace, "}");
        case '(': return tok(Tok::LParen, "(");
        case ')': return tok(Tok::RParen, ")");
        case '[': return tok(Tok::LBracket, "[");
        case ']': return tok(Tok::RBracket, "]");
        case ',': return tok(Tok::Comma, ",");
        case ';': return tok(Tok::Semi, ";");
        case '.': return tok(Tok::Dot, ".");
        case '=':
            if (peek() == '=') {
                advance();
                return tok(Tok::EqEq, "==");
            }
            if (peek() == '>') {
                advance();
                return tok(Tok::Arrow, "=>");
            }
            return tok(Tok::Assign, "=");
        case '+':
            if (peek() == '=') {
                advance();
                return tok(Tok::PlusAssign, "+=");
            }
            return tok(Tok::Plus, "+");
        case '-':
            if (peek() == '=') {
                advance();
                return tok(Tok::MinusAssign, "-=");
            }
            return tok(Tok::Minus, "-");
        case '*': return tok(Tok::Star, "*");
        case '/': return tok(Tok::Slash, "/");
        case '%': return tok(Tok::Percent, "%");
        case '!':
            if (peek() == '=') {
                advance();
                return tok(Tok::NotEq, "!=");
            }
            return tok(Tok::Bang, "!");
        case '<':
            if (peek() == '=') {
                advance();
                return tok(Tok::Le, "<=");
            }
            return tok(Tok::Lt, "<");
        case '>':
            if (peek() == '=') {
                advance();
                return tok(Tok::Ge, ">=");
            }
            return tok(Tok::Gt, ">");
        case '&':
            if (peek() == '&') {
                advance();
                return tok(Tok::AndAnd, "&&");
            }
            break;
        case '|':
            if (peek() == '|') {
                advance();
                return tok(Tok::OrOr, "||");
            }
            break;
        default: break;
        }
        diags.push_back({Severity::Error, "bad-char",
                         std::string("unexpected character '") + c + "'",
                         here(begin, line, col)});
        return next(diags);
    }
};

std::uint64_t time_unit_seconds(const std::string &unit) {
    if (unit == "seconds") return 1;
    if (unit == "minutes") return 60;
    if (unit == "hours") return 3600;
    if (unit == "days") return 86400;
    if (unit == "weeks") return 604800;
    return 0;
}

class Parser {
  public:
    Parser(std::vector<Token> toks, std::vector<Diagnostic> &diags)
        : toks_(std::move(toks)), diags_(diags) {}

    ContractModel parse_contract_body() {
        ContractModel m;
        expect_keyword("contract");
        m.name = expect(Tok::Ident, "contract name").text;
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            try {
                parse_item(m);
            } catch (const ParseError &pe) {
                diags_.push_back(pe.diag);
                synchronize();
            }
        }
        expect(Tok::RBrace, "'}'");
        return m;
    }

    StmtPtr parse_single_statement() {
        StmtPtr s = parse_stmt();
        if (!at(Tok::End)) fail("trailing tokens after statement");
        return s;
    }

    ExprPtr parse_single_expression() {
        ExprPtr e = parse_expr();
        if (!at(Tok::End)) fail("trailing tokens after expression");
        return e;
    }

  private:
    std::vector<Token> toks_;
    std::vector<Diagnostic> &diags_;
    std::size_t i_ = 0;

    const Token &cur() const { return toks_[i_]; }
    const Token &la(std::size_t n) const {
        return toks_[std::min(i_ + n, toks_.size() - 1)];
    }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_keyword(const char *kw) const {
        return cur().kind == Tok::Ident && cur().text == kw;
    }
    Token take() { return toks_[i_++]; }

    [[noreturn]] void fail(const std::string &msg) {
        throw ParseError{{Severity::Error, "parse", msg, cur().span}};
    }

    Token expect(Tok k, const char *what) {
        if (!at(k)) fail(std::string("expected ") + what);
        return take();
    }
    void expect_keyword(const char *kw) {
        if (!at_keyword(kw)) fail(std::string("expected '") + kw + "'");
        take();
    }
    bool accept(Tok k) {
        if (at(k)) {
            take();
            return true;
        }
        return false;
    }
    bool accept_keyword(const char *kw) {
        if (at_keyword(kw)) {
            take();
            return true;
        }
        return false;
    }

    void synchronize() {
        int depth = 0;
        while (!at(Tok::End)) {
            if (at(Tok::Semi) && depth == 0) {
                take();
                return;
            }
            if (at(Tok::LBrace)) ++depth;
            if (at(Tok::RBrace)) {
                if (depth == 0) return;
                if (--depth == 0) {
                    take();
                    return;
                }
            }
            take();
        }
    }

    // ------------------------------------------------------------- items

    void parse_item(ContractModel &m) {
        if (accept_keyword("states")) {
            do {
                m.states.push_back(expect(Tok::Ident, "state name").text);
            } while (accept(Tok::Comma));
            expect(Tok::Semi, "';'");
        } else if (accept_keyword("initial")) {
            m.initial = expect(Tok::Ident, "state name").text;
            expect(Tok::Semi, "';'");
        } else if (accept_keyword("finals")) {
            do {
                m.finals.push_back(expect(Tok::Ident, "state name").text);
            } while (accept(Tok::Comma));
            expect(Tok::Semi, "';'");
        } else if (accept_keyword("struct")) {
            StructDef sd;
            sd.name = expect(Tok::Ident, "struct name").text;
            expect(Tok::LBrace, "'{'");
            while (!at(Tok::RBrace) && !at(Tok::End)) {
                Param f;
                f.type = parse_type();
                f.name = expect(Tok::Ident, "field name").text;
                expect(Tok::Semi, "';'");
                sd.fields.push_back(std::move(f));
            }
            expect(Tok::RBrace, "'}'");
            m.structs.push_back(std::move(sd));
        } else if (accept_keyword("event")) {
            EventDef ev;
            ev.name = expect(Tok::Ident, "event name").text;
            expect(Tok::LParen, "'('");
            ev.params = parse_params();
            expect(Tok::RParen, "')'");
            expect(Tok::Semi, "';'");
            m.events.push_back(std::move(ev));
        } else if (accept_keyword("var")) {
            VarDef v;
            v.type = parse_type();
            v.name = expect(Tok::Ident, "variable name").text;
            expect(Tok::Semi, "';'");
            m.vars.push_back(std::move(v));
        } else if (accept_keyword("constructor")) {
            if (m.constructor_action) fail("duplicate constructor");
            m.constructor_action = parse_block();
        } else if (accept_keyword("fallback")) {
            if (m.fallback_action) fail("duplicate fallback");
            m.fallback_action = parse_block();
        } else if (accept_keyword("transition")) {
            m.transitions.push_back(parse_transition());
        } else if (accept_keyword("property")) {
            m.property_texts.push_back(expect(Tok::String, "property text").text);
            expect(Tok::Semi, "';'");
        } else {
            fail("expected a contract item (states, initial, finals, struct, "
                 "event, var, constructor, fallback, transition, property)");
        }
    }

    Transition parse_transition() {
        Transition t;
        t.name = expect(Tok::Ident, "transition name").text;
        if (accept(Tok::LParen)) {
            t.params = parse_params();
            expect(Tok::RParen, "')'");
        }
        expect_keyword("from");
        t.from = expect(Tok::Ident, "state name").text;
        expect_keyword("to");
        t.to = expect(Tok::Ident, "state name").text;
        while (true) {
            if (accept_keyword("payable")) {
                t.payable = true;
            } else if (accept_keyword("returns")) {
                t.returns = parse_type();
            } else if (accept_keyword("guard")) {
                expect(Tok::LParen, "'('");
                t.guard = parse_expr();
                expect(Tok::RParen, "')'");
            } else {
                break;
            }
        }
        if (at(Tok::LBrace)) {
            t.action = parse_block();
        } else {
            expect(Tok::Semi, "';' or action block");
        }
        return t;
    }

    std::vector<Param> parse_params() {
        std::vector<Param> ps;
        if (at(Tok::RParen)) return ps;
        do {
            Param p;
            p.type = parse_type();
            p.name = expect(Tok::Ident, "parameter name").text;
            ps.push_back(std::move(p));
        } while (accept(Tok::Comma));
        return ps;
    }

    // ------------------------------------------------------------- types

    TypePtr parse_type() {
        TypePtr t;
        if (accept_keyword("mapping")) {
            expect(Tok::LParen, "'('");
            TypePtr k = parse_type();
            expect(Tok::Arrow, "'=>'");
            TypePtr v = parse_type();
            expect(Tok::RParen, "')'");
            t = make_mapping_type(std::move(k), std::move(v));
        } else {
            t = make_named_type(expect(Tok::Ident, "type name").text);
        }
        while (at(Tok::LBracket) && la(1).kind == Tok::RBracket) {
            take();
            take();
            t = make_array_type(std::move(t));
        }
        return t;
    }

    // True when the upcoming tokens start a local declaration.
    bool looks_like_decl() const {
        if (at_keyword("mapping")) return true;
        if (!at(Tok::Ident)) return false;
        std::size_t j = 1;
        while (la(j).kind == Tok::LBracket && la(j + 1).kind == Tok::RBracket)
            j += 2;
        return la(j).kind == Tok::Ident;
    }

    // -------------------------------------------------------- statements

    StmtPtr parse_block() {
        Span sp = cur().span;
        expect(Tok::LBrace, "'{'");
        std::vector<StmtPtr> stmts;
        while (!at(Tok::RBrace) && !at(Tok::End)) stmts.push_back(parse_stmt());
        expect(Tok::RBrace, "'}'");
        return make_stmt(Stmt{CompoundStmt{std::move(stmts)}, sp});
    }

    StmtPtr parse_stmt() {
        Span sp = cur().span;
        if (at(Tok::LBrace)) return parse_block();
        if (accept_keyword("if")) {
            expect(Tok::LParen, "'('");
            ExprPtr cond = parse_expr();
            expect(Tok::RParen, "')'");
            StmtPtr then_branch = parse_stmt();
            StmtPtr else_branch;
            if (accept_keyword("else")) else_branch = parse_stmt();
            return make_stmt(Stmt{
                IfStmt{std::move(cond), std::move(then_branch),
                       std::move(else_branch)},
                sp});
        }
        if (accept_keyword("while")) {
            expect(Tok::LParen, "'('");
            ExprPtr cond = parse_expr();
            expect(Tok::RParen, "')'");
            StmtPtr body = parse_stmt();
            return make_stmt(Stmt{WhileStmt{std::move(cond), std::move(body)}, sp});
        }
        if (accept_keyword("for")) {
            expect(Tok::LParen, "'('");
            StmtPtr init;
            if (looks_like_decl()) {
                init = parse_decl_stmt();
            } else {
                Span isp = cur().span;
                ExprPtr e = parse_expr();
                expect(Tok::Semi, "';'");
                init = make_stmt(Stmt{ExprStmt{std::move(e)}, isp});
            }
            ExprPtr cond = parse_expr();
            expect(Tok::Semi, "';'");
            ExprPtr post = parse_expr();
            expect(Tok::RParen, "')'");
            StmtPtr body = parse_stmt();
            return make_stmt(Stmt{ForStmt{std::move(init), std::move(cond),
                                          std::move(post), std::move(body)},
                                  sp});
        }
        if (accept_keyword("return")) {
            ExprPtr v;
            if (!at(Tok::Semi)) v = parse_expr();
            expect(Tok::Semi, "';'");
            return make_stmt(Stmt{ReturnStmt{std::move(v)}, sp});
        }
        if (accept_keyword("emit")) {
            std::string ev = expect(Tok::Ident, "event name").text;
            expect(Tok::LParen, "'('");
            std::vector<ExprPtr> args = parse_args();
            expect(Tok::RParen, "')'");
            expect(Tok::Semi, "';'");
            return make_stmt(Stmt{EmitStmt{std::move(ev), std::move(args)}, sp});
        }
        if (looks_like_decl()) return parse_decl_stmt();
        ExprPtr e = parse_expr();
        expect(Tok::Semi, "';'");
        return make_stmt(Stmt{ExprStmt{std::move(e)}, sp});
    }

    StmtPtr parse_decl_stmt() {
        Span sp = cur().span;
        TypePtr t = parse_type();
        std::string name = expect(Tok::Ident, "variable name").text;
        ExprPtr init;
        if (accept(Tok::Assign)) init = parse_expr();
        expect(Tok::Semi, "';'");
        return make_stmt(
            Stmt{VarDeclStmt{std::move(t), std::move(name), std::move(init)}, sp});
    }

    // ------------------------------------------------------- expressions

    std::vector<ExprPtr> parse_args() {
        std::vector<ExprPtr> args;
        if (at(Tok::RParen)) return args;
        do {
            args.push_back(parse_expr());
        } while (accept(Tok::Comma));
        return args;
    }

    ExprPtr parse_expr() { return parse_assign(); }

    ExprPtr parse_assign() {
        ExprPtr lhs = parse_or();
        AssignOp op;
        if (at(Tok::Assign)) op = AssignOp::Assign;
        else if (at(Tok::PlusAssign)) op = AssignOp::AddAssign;
        else if (at(Tok::MinusAssign)) op = AssignOp::SubAssign;
        else return lhs;
        Span sp = take().span;
        ExprPtr rhs = parse_assign();
        if (!is_lvalue(*lhs))
            diags_.push_back({Severity::Error, "bad-lvalue",
                              "left side of assignment is not assignable", sp});
        return make_expr(Expr{Assign{op, std::move(lhs), std::move(rhs)}, sp});
    }

    static bool is_lvalue(const Expr &e) {
        if (std::holds_alternative<Ident>(e.node)) return true;
        if (auto *ix = std::get_if<Index>(&e.node)) return is_lvalue(*ix->base);
        if (auto *m = std::get_if<Member>(&e.node)) return is_lvalue(*m->base);
        return false;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(Tok::OrOr)) {
            Span sp = take().span;
            ExprPtr rhs = parse_and();
            lhs = make_expr(
                Expr{Binary{BinOp::Or, std::move(lhs), std::move(rhs)}, sp});
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_equality();
        while (at(Tok::AndAnd)) {
            Span sp = take().span;
            ExprPtr rhs = parse_equality();
            lhs = make_expr(
                Expr{Binary{BinOp::And, std::move(lhs), std::move(rhs)}, sp});
        }
        return lhs;
    }

    ExprPtr parse_equality() {
        ExprPtr lhs = parse_relational();
        while (at(Tok::EqEq) || at(Tok::NotEq)) {
            BinOp op = at(Tok::EqEq) ? BinOp::Eq : BinOp::Ne;
            Span sp = take().span;
            ExprPtr rhs = parse_relational();
            lhs = make_expr(Expr{Binary{op, std::move(lhs), std::move(rhs)}, sp});
        }
        return lhs;
    }

    ExprPtr parse_relational() {
        ExprPtr lhs = parse_additive();
        while (at(Tok::Lt) || at(Tok::Gt) || at(Tok::Le) || at(Tok::Ge)) {
            BinOp op = at(Tok::Lt)   ? BinOp::Lt
                       : at(Tok::Gt) ? BinOp::Gt
                       : at(Tok::Le) ? BinOp::Le
                                     : BinOp::Ge;
            Span sp = take().span;
            ExprPtr rhs = parse_additive();
            lhs = make_expr(Expr{Binary{op, std::move(lhs), std::move(rhs)}, sp});
        }
        return lhs;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
            Span sp = take().span;
            ExprPtr rhs = parse_multiplicative();
            lhs = make_expr(Expr{Binary{op, std::move(lhs), std::move(rhs)}, sp});
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
            BinOp op = at(Tok::Star)    ? BinOp::Mul
                       : at(Tok::Slash) ? BinOp::Div
                                        : BinOp::Mod;
            Span sp = take().span;
            ExprPtr rhs = parse_unary();
            lhs = make_expr(Expr{Binary{op, std::move(lhs), std::move(rhs)}, sp});
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at(Tok::Bang) || at(Tok::Minus) || at(Tok::Plus)) {
            UnOp op = at(Tok::Bang)    ? UnOp::Not
                      : at(Tok::Minus) ? UnOp::Neg
                                       : UnOp::Pos;
            Span sp = take().span;
            ExprPtr operand = parse_unary();
            return make_expr(Expr{Unary{op, std::move(operand)}, sp});
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        while (true) {
            if (at(Tok::LBracket)) {
                Span sp = take().span;
                ExprPtr idx = parse_expr();
                expect(Tok::RBracket, "']'");
                e = make_expr(Expr{Index{std::move(e), std::move(idx)}, sp});
            } else if (at(Tok::Dot)) {
                Span sp = take().span;
                std::string member = expect(Tok::Ident, "member name").text;
                if (at(Tok::LParen)) {
                    take();
                    std::vector<ExprPtr> args = parse_args();
                    expect(Tok::RParen, "')'");
                    CallKind kind;
                    if (member == "transfer") kind = CallKind::Transfer;
                    else if (member == "send") kind = CallKind::Send;
                    else if (member == "call") kind = CallKind::LowCall;
                    else if (member == "push") kind = CallKind::Push;
                    else fail("unsupported method '" + member + "'");
                    e = make_expr(Expr{
                        CallExpr{kind, std::move(e), member, std::move(args)}, sp});
                } else {
                    e = make_expr(Expr{Member{std::move(e), std::move(member)}, sp});
                }
            } else {
                break;
            }
        }
        return e;
    }

    ExprPtr parse_primary() {
        Span sp = cur().span;
        if (at(Tok::Int)) {
            Token t = take();
            std::uint64_t scale = 0;
            if (at(Tok::Ident)) scale = time_unit_seconds(cur().text);
            if (scale) {
                Token unit = take();
                return make_expr(Expr{
                    IntLit{t.value * scale, t.text + " " + unit.text}, sp});
            }
            return make_expr(Expr{IntLit{t.value, t.text}, sp});
        }
        if (at(Tok::Hex)) {
            Token t = take();
            return make_expr(Expr{HexLit{t.value, t.text}, sp});
        }
        if (accept(Tok::LParen)) {
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (at(Tok::Ident)) {
            Token t = take();
            if (t.text == "true") return make_expr(Expr{BoolLit{true}, sp});
            if (t.text == "false") return make_expr(Expr{BoolLit{false}, sp});
            if (t.text == "now")
                return make_expr(Expr{EnvExpr{EnvKind::Now}, sp});
            if (t.text == "msg") {
                expect(Tok::Dot, "'.' after msg");
                Token m = expect(Tok::Ident, "sender or value");
                if (m.text == "sender")
                    return make_expr(Expr{EnvExpr{EnvKind::MsgSender}, sp});
                if (m.text == "value")
                    return make_expr(Expr{EnvExpr{EnvKind::MsgValue}, sp});
                fail("unknown msg member '" + m.text + "'");
            }
            if (at(Tok::LParen)) {
                take();
                std::vector<ExprPtr> args = parse_args();
                expect(Tok::RParen, "')'");
                CallKind kind = t.text == "keccak256" ? CallKind::BuiltinHash
                                                      : CallKind::Internal;
                return make_expr(
                    Expr{CallExpr{kind, nullptr, t.text, std::move(args)}, sp});
            }
            return make_expr(Expr{Ident{t.text}, sp});
        }
        fail("expected an expression");
    }
};

std::vector<Token> lex(const std::string &source, std::vector<Diagnostic> &diags) {
    return Lexer(source).run(diags);
}

} // namespace

ParseResult parse_contract(const std::string &source) {
    ParseResult res;
    std::vector<Token> toks = lex(source, res.diagnostics);
    Parser p(std::move(toks), res.diagnostics);
    try {
        ContractModel m = p.parse_contract_body();
        if (!has_errors(res.diagnostics)) {
            auto vd = validate(m);
            res.diagnostics.insert(res.diagnostics.end(), vd.begin(), vd.end());
        }
        if (!has_errors(res.diagnostics)) res.model = std::move(m);
    } catch (const ParseError &pe) {
        res.diagnostics.push_back(pe.diag);
    }
    return res;
}

StmtParseResult parse_statement(const std::string &source) {
    StmtParseResult res;
    std::vector<Token> toks = lex(source, res.diagnostics);
    Parser p(std::move(toks), res.diagnostics);
    try {
        StmtPtr s = p.parse_single_statement();
        if (!has_errors(res.diagnostics)) res.stmt = std::move(s);
    } catch (const ParseError &pe) {
        res.diagnostics.push_back(pe.diag);
    }
    return res;
}

ExprParseResult parse_expression(const std::string &source) {
    ExprParseResult res;
    std::vector<Token> toks = lex(source, res.diagnostics);
    Parser p(std::move(toks), res.diagnostics);
    try {
        ExprPtr e = p.parse_single_expression();
        if (!has_errors(res.diagnostics)) res.expr = std::move(e);
    } catch (const ParseError &pe) {
        res.diagnostics.push_back(pe.diag);
    }
    return res;
}

} // namespace verisol
