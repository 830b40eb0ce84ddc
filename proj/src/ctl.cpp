#include "verisol/ctl.hpp"

#include <cctype>

namespace verisol {

CtlPtr ctl_atom(std::string name) {
    return std::make_shared<Ctl>(Ctl{CtlAtom{std::move(name)}});
}
CtlPtr ctl_const(bool v) { return std::make_shared<Ctl>(Ctl{CtlConst{v}}); }
CtlPtr ctl_un(CtlUnary op, CtlPtr e) {
    return std::make_shared<Ctl>(Ctl{CtlUnaryNode{op, std::move(e)}});
}
CtlPtr ctl_bin(CtlBinary op, CtlPtr l, CtlPtr r) {
    return std::make_shared<Ctl>(Ctl{CtlBinaryNode{op, std::move(l), std::move(r)}});
}

// ------------------------------------------------------------------ print

namespace {

bool atom_needs_quotes(const std::string &name) {
    if (name.empty()) return true;
    if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_')
        return true;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) continue;
        if (c == '_' || c == '@' || c == '.' || c == '\'') continue;
        return true;
    }
    return false;
}

std::string render(const Ctl &f);

bool is_bool_binary(const Ctl &f) {
    auto *b = std::get_if<CtlBinaryNode>(&f.node);
    return b && (b->op == CtlBinary::And || b->op == CtlBinary::Or ||
                 b->op == CtlBinary::Implies);
}

// operand position inside a binary operator: boolean binaries get parens
std::string render_operand(const Ctl &f) {
    if (is_bool_binary(f)) return "(" + render(f) + ")";
    return render(f);
}

std::string render(const Ctl &f) {
    if (auto *a = std::get_if<CtlAtom>(&f.node)) {
        if (atom_needs_quotes(a->name)) {
            std::string out = "\"";
            for (char c : a->name) {
                if (c == '"' || c == '\\') out += '\\';
                out += c;
            }
            return out + "\"";
        }
        return a->name;
    }
    if (auto *c = std::get_if<CtlConst>(&f.node)) return c->value ? "true" : "false";
    if (auto *u = std::get_if<CtlUnaryNode>(&f.node)) {
        switch (u->op) {
        case CtlUnary::Not: {
            const Ctl &g = *u->operand;
            if (std::holds_alternative<CtlAtom>(g.node) ||
                std::holds_alternative<CtlConst>(g.node))
                return "!" + render(g);
            return "!(" + render(g) + ")";
        }
        case CtlUnary::EX: return "EX(" + render(*u->operand) + ")";
        case CtlUnary::AX: return "AX(" + render(*u->operand) + ")";
        case CtlUnary::EF: return "EF(" + render(*u->operand) + ")";
        case CtlUnary::AF: return "AF(" + render(*u->operand) + ")";
        case CtlUnary::EG: return "EG(" + render(*u->operand) + ")";
        case CtlUnary::AG: return "AG(" + render(*u->operand) + ")";
        }
    }
    const auto &b = std::get<CtlBinaryNode>(f.node);
    switch (b.op) {
    case CtlBinary::And:
        return render_operand(*b.lhs) + " & " + render_operand(*b.rhs);
    case CtlBinary::Or:
        return render_operand(*b.lhs) + " | " + render_operand(*b.rhs);
    case CtlBinary::Implies:
        return render_operand(*b.lhs) + " -> " + render_operand(*b.rhs);
    case CtlBinary::EU:
        return "E[" + render_operand(*b.lhs) + " U " + render_operand(*b.rhs) + "]";
    case CtlBinary::AU:
        return "A[" + render_operand(*b.lhs) + " U " + render_operand(*b.rhs) + "]";
    case CtlBinary::EW:
        return "E[" + render_operand(*b.lhs) + " W " + render_operand(*b.rhs) + "]";
    case CtlBinary::AW:
        return "A[" + render_operand(*b.lhs) + " W " + render_operand(*b.rhs) + "]";
    }
    return "";
}

} // namespace

std::string ctl_to_string(const Ctl &f) { return render(f); }

// ------------------------------------------------------------------ parse

namespace {

struct CtlToken {
    enum Kind { End, Atom, Str, LParen, RParen, LBrack, RBrack, Bang, Amp, Pipe,
                Arrow, KwTrue, KwFalse } kind = End;
    std::string text;
    std::size_t pos = 0;
};

struct CtlLexer {
    const std::string &src;
    std::size_t i = 0;
    std::vector<Diagnostic> &diags;

    CtlToken next() {
        while (i < src.size() &&
               std::isspace(static_cast<unsigned char>(src[i])))
            ++i;
        CtlToken t;
        t.pos = i;
        if (i >= src.size()) return t;
        char c = src[i];
        auto one = [&](CtlToken::Kind k) {
            t.kind = k;
            t.text = src.substr(i, 1);
            ++i;
            return t;
        };
        switch (c) {
        case '(': return one(CtlToken::LParen);
        case ')': return one(CtlToken::RParen);
        case '[': return one(CtlToken::LBrack);
        case ']': return one(CtlToken::RBrack);
        case '!': return one(CtlToken::Bang);
        case '&': return one(CtlToken::Amp);
        case '|': return one(CtlToken::Pipe);
        case '-':
            if (i + 1 < src.size() && src[i + 1] == '>') {
                t.kind = CtlToken::Arrow;
                t.text = "->";
                i += 2;
                return t;
            }
            break;
        case '"': {
            ++i;
            std::string out;
            while (i < src.size() && src[i] != '"') {
                if (src[i] == '\\' && i + 1 < src.size()) ++i;
                out += src[i++];
            }
            if (i >= src.size()) {
                diags.push_back({Severity::Error, "ctl-string",
                                 "unterminated quoted atom", span_at(t.pos)});
            } else {
                ++i;
            }
            t.kind = CtlToken::Str;
            t.text = std::move(out);
            return t;
        }
        default: break;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < src.size()) {
                char d = src[i];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' ||
                    d == '@' || d == '.' || d == '\'')
                    ++i;
                else
                    break;
            }
            t.text = src.substr(start, i - start);
            if (t.text == "true") t.kind = CtlToken::KwTrue;
            else if (t.text == "false") t.kind = CtlToken::KwFalse;
            else t.kind = CtlToken::Atom;
            return t;
        }
        diags.push_back({Severity::Error, "ctl-char",
                         std::string("unexpected character '") + c + "'",
                         span_at(i)});
        ++i;
        return next();
    }

    static Span span_at(std::size_t pos) {
        Span s;
        s.begin = pos;
        s.end = pos + 1;
        s.line = 1;
        s.col = static_cast<int>(pos) + 1;
        return s;
    }
};

struct CtlParser {
    std::vector<CtlToken> toks;
    std::size_t pos = 0;
    std::vector<Diagnostic> &diags;

    const CtlToken &cur() const { return toks[pos]; }
    void advance() {
        if (pos + 1 < toks.size()) ++pos;
    }
    bool accept(CtlToken::Kind k) {
        if (cur().kind == k) {
            advance();
            return true;
        }
        return false;
    }
    void expect(CtlToken::Kind k, const std::string &what) {
        if (!accept(k))
            diags.push_back({Severity::Error, "ctl-syntax",
                             "expected " + what, CtlLexer::span_at(cur().pos)});
    }

    CtlPtr parse_implies() {
        CtlPtr l = parse_or();
        if (accept(CtlToken::Arrow))
            return ctl_bin(CtlBinary::Implies, std::move(l), parse_implies());
        return l;
    }
    CtlPtr parse_or() {
        CtlPtr l = parse_and();
        while (accept(CtlToken::Pipe))
            l = ctl_bin(CtlBinary::Or, std::move(l), parse_and());
        return l;
    }
    CtlPtr parse_and() {
        CtlPtr l = parse_unary();
        while (accept(CtlToken::Amp))
            l = ctl_bin(CtlBinary::And, std::move(l), parse_unary());
        return l;
    }

    CtlPtr parse_temporal_tail(const std::string &kw) {
        expect(CtlToken::LParen, "'(' after " + kw);
        CtlPtr body = parse_implies();
        expect(CtlToken::RParen, "')'");
        if (kw == "EX") return ctl_un(CtlUnary::EX, std::move(body));
        if (kw == "AX") return ctl_un(CtlUnary::AX, std::move(body));
        if (kw == "EF") return ctl_un(CtlUnary::EF, std::move(body));
        if (kw == "AF") return ctl_un(CtlUnary::AF, std::move(body));
        if (kw == "EG") return ctl_un(CtlUnary::EG, std::move(body));
        return ctl_un(CtlUnary::AG, std::move(body));
    }

    CtlPtr parse_path(const std::string &quant) {
        // already past '['
        CtlPtr l = parse_implies();
        bool weak = false;
        if (cur().kind == CtlToken::Atom &&
            (cur().text == "U" || cur().text == "W")) {
            weak = cur().text == "W";
            advance();
        } else {
            diags.push_back({Severity::Error, "ctl-syntax",
                             "expected U or W inside " + quant + "[...]",
                             CtlLexer::span_at(cur().pos)});
        }
        CtlPtr r = parse_implies();
        expect(CtlToken::RBrack, "']'");
        CtlBinary op = quant == "A" ? (weak ? CtlBinary::AW : CtlBinary::AU)
                                    : (weak ? CtlBinary::EW : CtlBinary::EU);
        return ctl_bin(op, std::move(l), std::move(r));
    }

    CtlPtr parse_unary() {
        if (accept(CtlToken::Bang))
            return ctl_un(CtlUnary::Not, parse_unary());
        if (accept(CtlToken::LParen)) {
            CtlPtr e = parse_implies();
            expect(CtlToken::RParen, "')'");
            return e;
        }
        if (cur().kind == CtlToken::KwTrue) {
            advance();
            return ctl_const(true);
        }
        if (cur().kind == CtlToken::KwFalse) {
            advance();
            return ctl_const(false);
        }
        if (cur().kind == CtlToken::Str) {
            std::string name = cur().text;
            advance();
            return ctl_atom(std::move(name));
        }
        if (cur().kind == CtlToken::Atom) {
            std::string name = cur().text;
            if ((name == "EX" || name == "AX" || name == "EF" || name == "AF" ||
                 name == "EG" || name == "AG") &&
                toks[pos + 1].kind == CtlToken::LParen) {
                advance();
                return parse_temporal_tail(name);
            }
            if ((name == "A" || name == "E") &&
                toks[pos + 1].kind == CtlToken::LBrack) {
                advance();
                advance(); // '['
                return parse_path(name);
            }
            advance();
            return ctl_atom(std::move(name));
        }
        diags.push_back({Severity::Error, "ctl-syntax", "expected a formula",
                         CtlLexer::span_at(cur().pos)});
        advance();
        return ctl_const(false);
    }
};

} // namespace

CtlParseResult parse_ctl(const std::string &text) {
    CtlParseResult res;
    CtlLexer lex{text, 0, res.diagnostics};
    std::vector<CtlToken> toks;
    for (;;) {
        CtlToken t = lex.next();
        toks.push_back(t);
        if (t.kind == CtlToken::End) break;
    }
    CtlParser p{std::move(toks), 0, res.diagnostics};
    CtlPtr f = p.parse_implies();
    if (p.cur().kind != CtlToken::End)
        res.diagnostics.push_back({Severity::Error, "ctl-syntax",
                                   "trailing input after formula",
                                   CtlLexer::span_at(p.cur().pos)});
    if (!has_errors(res.diagnostics)) res.formula = std::move(f);
    return res;
}

namespace {
void collect_atoms(const Ctl &f, std::vector<std::string> &out) {
    if (auto *a = std::get_if<CtlAtom>(&f.node)) {
        for (const auto &n : out)
            if (n == a->name) return;
        out.push_back(a->name);
    } else if (auto *u = std::get_if<CtlUnaryNode>(&f.node)) {
        collect_atoms(*u->operand, out);
    } else if (auto *b = std::get_if<CtlBinaryNode>(&f.node)) {
        collect_atoms(*b->lhs, out);
        collect_atoms(*b->rhs, out);
    }
}
} // namespace

std::vector<std::string> ctl_atoms(const Ctl &f) {
    std::vector<std::string> out;
    collect_atoms(f, out);
    return out;
}

} // namespace verisol
