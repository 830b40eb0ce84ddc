#include "verisol/ast.hpp"

#include <cctype>
#include <sstream>

namespace verisol {

TypePtr make_named_type(std::string name) {
    return std::make_shared<Type>(Type{NamedType{std::move(name)}});
}
TypePtr make_mapping_type(TypePtr k, TypePtr v) {
    return std::make_shared<Type>(Type{MappingType{std::move(k), std::move(v)}});
}
TypePtr make_array_type(TypePtr elem) {
    return std::make_shared<Type>(Type{ArrayType{std::move(elem)}});
}

std::string type_to_string(const Type &t) {
    if (auto *n = std::get_if<NamedType>(&t.node)) return n->name;
    if (auto *m = std::get_if<MappingType>(&t.node))
        return "mapping(" + type_to_string(*m->key) + " => " +
               type_to_string(*m->value) + ")";
    const auto &a = std::get<ArrayType>(t.node);
    return type_to_string(*a.elem) + "[]";
}

bool type_equal(const Type &a, const Type &b) {
    if (a.node.index() != b.node.index()) return false;
    if (auto *n = std::get_if<NamedType>(&a.node))
        return n->name == std::get<NamedType>(b.node).name;
    if (auto *m = std::get_if<MappingType>(&a.node)) {
        const auto &o = std::get<MappingType>(b.node);
        return type_equal(*m->key, *o.key) && type_equal(*m->value, *o.value);
    }
    return type_equal(*std::get<ArrayType>(a.node).elem,
                      *std::get<ArrayType>(b.node).elem);
}

ExprPtr make_expr(Expr e) { return std::make_shared<Expr>(std::move(e)); }
StmtPtr make_stmt(Stmt s) { return std::make_shared<Stmt>(std::move(s)); }

// ------------------------------------------------------------- printing

namespace {

int binop_prec(BinOp op) {
    switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Ne: return 3;
    case BinOp::Lt:
    case BinOp::Gt:
    case BinOp::Le:
    case BinOp::Ge: return 4;
    case BinOp::Add:
    case BinOp::Sub: return 5;
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Mod: return 6;
    }
    return 0;
}

const char *binop_text(BinOp op) {
    switch (op) {
    case BinOp::Or: return "||";
    case BinOp::And: return "&&";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Gt: return ">";
    case BinOp::Le: return "<=";
    case BinOp::Ge: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    }
    return "?";
}

void print_expr(const Expr &e, std::ostream &os, int parent_prec);

void print_operand(const ExprPtr &e, std::ostream &os, int prec) {
    print_expr(*e, os, prec);
}

void print_expr(const Expr &e, std::ostream &os, int parent_prec) {
    if (auto *i = std::get_if<IntLit>(&e.node)) {
        os << (i->display.empty() ? std::to_string(i->value) : i->display);
    } else if (auto *b = std::get_if<BoolLit>(&e.node)) {
        os << (b->value ? "true" : "false");
    } else if (auto *h = std::get_if<HexLit>(&e.node)) {
        os << h->display;
    } else if (auto *id = std::get_if<Ident>(&e.node)) {
        os << id->name;
    } else if (auto *env = std::get_if<EnvExpr>(&e.node)) {
        switch (env->kind) {
        case EnvKind::MsgSender: os << "msg.sender"; break;
        case EnvKind::MsgValue: os << "msg.value"; break;
        case EnvKind::Now: os << "now"; break;
        }
    } else if (auto *u = std::get_if<Unary>(&e.node)) {
        const int prec = 7;
        if (prec < parent_prec) os << "(";
        os << (u->op == UnOp::Not ? "!" : u->op == UnOp::Neg ? "-" : "+");
        print_operand(u->operand, os, prec + 1);
        if (prec < parent_prec) os << ")";
    } else if (auto *bin = std::get_if<Binary>(&e.node)) {
        const int prec = binop_prec(bin->op);
        if (prec < parent_prec) os << "(";
        print_operand(bin->lhs, os, prec);
        os << " " << binop_text(bin->op) << " ";
        print_operand(bin->rhs, os, prec + 1);
        if (prec < parent_prec) os << ")";
    } else if (auto *a = std::get_if<Assign>(&e.node)) {
        const int prec = 0;
        if (parent_prec > 0) os << "(";
        print_operand(a->target, os, 1);
        os << (a->op == AssignOp::Assign ? " = "
               : a->op == AssignOp::AddAssign ? " += " : " -= ");
        print_operand(a->value, os, 0);
        (void)prec;
        if (parent_prec > 0) os << ")";
    } else if (auto *ix = std::get_if<Index>(&e.node)) {
        print_operand(ix->base, os, 8);
        os << "[";
        print_operand(ix->index, os, 0);
        os << "]";
    } else if (auto *mem = std::get_if<Member>(&e.node)) {
        print_operand(mem->base, os, 8);
        os << "." << mem->member;
    } else {
        const auto &c = std::get<CallExpr>(e.node);
        switch (c.kind) {
        case CallKind::Transfer:
            print_operand(c.base, os, 8);
            os << ".transfer";
            break;
        case CallKind::Send:
            print_operand(c.base, os, 8);
            os << ".send";
            break;
        case CallKind::LowCall:
            print_operand(c.base, os, 8);
            os << ".call";
            break;
        case CallKind::Push:
            print_operand(c.base, os, 8);
            os << ".push";
            break;
        case CallKind::BuiltinHash:
        case CallKind::Internal:
            os << c.name;
            break;
        }
        os << "(";
        for (std::size_t i = 0; i < c.args.size(); ++i) {
            if (i) os << ", ";
            print_operand(c.args[i], os, 0);
        }
        os << ")";
    }
}

void indent_to(std::ostream &os, int n) {
    for (int i = 0; i < n; ++i) os << "    ";
}

void print_stmt(const Stmt &s, std::ostream &os, int indent);

void print_branch(const StmtPtr &s, std::ostream &os, int indent) {
    if (std::holds_alternative<CompoundStmt>(s->node)) {
        os << " ";
        print_stmt(*s, os, indent);
    } else {
        os << "\n";
        indent_to(os, indent + 1);
        print_stmt(*s, os, indent + 1);
    }
}

void print_stmt(const Stmt &s, std::ostream &os, int indent) {
    if (auto *d = std::get_if<VarDeclStmt>(&s.node)) {
        os << type_to_string(*d->type) << " " << d->name;
        if (d->init) {
            os << " = ";
            print_expr(*d->init, os, 0);
        }
        os << ";";
    } else if (auto *e = std::get_if<ExprStmt>(&s.node)) {
        print_expr(*e->expr, os, 0);
        os << ";";
    } else if (auto *em = std::get_if<EmitStmt>(&s.node)) {
        os << "emit " << em->event << "(";
        for (std::size_t i = 0; i < em->args.size(); ++i) {
            if (i) os << ", ";
            print_expr(*em->args[i], os, 0);
        }
        os << ");";
    } else if (auto *r = std::get_if<ReturnStmt>(&s.node)) {
        os << "return";
        if (r->value) {
            os << " ";
            print_expr(*r->value, os, 0);
        }
        os << ";";
    } else if (auto *i = std::get_if<IfStmt>(&s.node)) {
        os << "if (";
        print_expr(*i->cond, os, 0);
        os << ")";
        print_branch(i->then_branch, os, indent);
        if (i->else_branch) {
            if (std::holds_alternative<CompoundStmt>(i->then_branch->node))
                os << " else";
            else {
                os << "\n";
                indent_to(os, indent);
                os << "else";
            }
            print_branch(i->else_branch, os, indent);
        }
    } else if (auto *w = std::get_if<WhileStmt>(&s.node)) {
        os << "while (";
        print_expr(*w->cond, os, 0);
        os << ")";
        print_branch(w->body, os, indent);
    } else if (auto *f = std::get_if<ForStmt>(&s.node)) {
        os << "for (";
        print_stmt(*f->init, os, indent); // prints its own ';'
        os << " ";
        print_expr(*f->cond, os, 0);
        os << "; ";
        print_expr(*f->post, os, 0);
        os << ")";
        print_branch(f->body, os, indent);
    } else {
        const auto &c = std::get<CompoundStmt>(s.node);
        os << "{";
        for (const auto &st : c.stmts) {
            os << "\n";
            indent_to(os, indent + 1);
            print_stmt(*st, os, indent + 1);
        }
        os << "\n";
        indent_to(os, indent);
        os << "}";
    }
}

} // namespace

std::string expr_to_string(const Expr &e) {
    std::ostringstream os;
    print_expr(e, os, 0);
    return os.str();
}

std::string stmt_to_string(const Stmt &s, int indent) {
    std::ostringstream os;
    print_stmt(s, os, indent);
    return os.str();
}

// ------------------------------------------------------------- equality

bool expr_equal(const Expr &a, const Expr &b) {
    if (a.node.index() != b.node.index()) return false;
    if (auto *x = std::get_if<IntLit>(&a.node)) {
        const auto &y = std::get<IntLit>(b.node);
        return x->value == y.value;
    }
    if (auto *x = std::get_if<BoolLit>(&a.node))
        return x->value == std::get<BoolLit>(b.node).value;
    if (auto *x = std::get_if<HexLit>(&a.node))
        return x->value == std::get<HexLit>(b.node).value;
    if (auto *x = std::get_if<Ident>(&a.node))
        return x->name == std::get<Ident>(b.node).name;
    if (auto *x = std::get_if<EnvExpr>(&a.node))
        return x->kind == std::get<EnvExpr>(b.node).kind;
    if (auto *x = std::get_if<Unary>(&a.node)) {
        const auto &y = std::get<Unary>(b.node);
        return x->op == y.op && expr_equal(*x->operand, *y.operand);
    }
    if (auto *x = std::get_if<Binary>(&a.node)) {
        const auto &y = std::get<Binary>(b.node);
        return x->op == y.op && expr_equal(*x->lhs, *y.lhs) &&
               expr_equal(*x->rhs, *y.rhs);
    }
    if (auto *x = std::get_if<Assign>(&a.node)) {
        const auto &y = std::get<Assign>(b.node);
        return x->op == y.op && expr_equal(*x->target, *y.target) &&
               expr_equal(*x->value, *y.value);
    }
    if (auto *x = std::get_if<Index>(&a.node)) {
        const auto &y = std::get<Index>(b.node);
        return expr_equal(*x->base, *y.base) && expr_equal(*x->index, *y.index);
    }
    if (auto *x = std::get_if<Member>(&a.node)) {
        const auto &y = std::get<Member>(b.node);
        return x->member == y.member && expr_equal(*x->base, *y.base);
    }
    const auto &x = std::get<CallExpr>(a.node);
    const auto &y = std::get<CallExpr>(b.node);
    if (x.kind != y.kind || x.name != y.name || x.args.size() != y.args.size())
        return false;
    if ((x.base == nullptr) != (y.base == nullptr)) return false;
    if (x.base && !expr_equal(*x.base, *y.base)) return false;
    for (std::size_t i = 0; i < x.args.size(); ++i)
        if (!expr_equal(*x.args[i], *y.args[i])) return false;
    return true;
}

bool stmt_equal(const Stmt &a, const Stmt &b) {
    if (a.node.index() != b.node.index()) return false;
    auto opt_expr_eq = [](const ExprPtr &x, const ExprPtr &y) {
        if ((x == nullptr) != (y == nullptr)) return false;
        return !x || expr_equal(*x, *y);
    };
    auto opt_stmt_eq = [](const StmtPtr &x, const StmtPtr &y) {
        if ((x == nullptr) != (y == nullptr)) return false;
        return !x || stmt_equal(*x, *y);
    };
    if (auto *x = std::get_if<VarDeclStmt>(&a.node)) {
        const auto &y = std::get<VarDeclStmt>(b.node);
        return x->name == y.name && type_equal(*x->type, *y.type) &&
               opt_expr_eq(x->init, y.init);
    }
    if (auto *x = std::get_if<ExprStmt>(&a.node))
        return expr_equal(*x->expr, *std::get<ExprStmt>(b.node).expr);
    if (auto *x = std::get_if<EmitStmt>(&a.node)) {
        const auto &y = std::get<EmitStmt>(b.node);
        if (x->event != y.event || x->args.size() != y.args.size()) return false;
        for (std::size_t i = 0; i < x->args.size(); ++i)
            if (!expr_equal(*x->args[i], *y.args[i])) return false;
        return true;
    }
    if (auto *x = std::get_if<ReturnStmt>(&a.node))
        return opt_expr_eq(x->value, std::get<ReturnStmt>(b.node).value);
    if (auto *x = std::get_if<IfStmt>(&a.node)) {
        const auto &y = std::get<IfStmt>(b.node);
        return expr_equal(*x->cond, *y.cond) &&
               stmt_equal(*x->then_branch, *y.then_branch) &&
               opt_stmt_eq(x->else_branch, y.else_branch);
    }
    if (auto *x = std::get_if<WhileStmt>(&a.node)) {
        const auto &y = std::get<WhileStmt>(b.node);
        return expr_equal(*x->cond, *y.cond) && stmt_equal(*x->body, *y.body);
    }
    if (auto *x = std::get_if<ForStmt>(&a.node)) {
        const auto &y = std::get<ForStmt>(b.node);
        return stmt_equal(*x->init, *y.init) && expr_equal(*x->cond, *y.cond) &&
               expr_equal(*x->post, *y.post) && stmt_equal(*x->body, *y.body);
    }
    const auto &x = std::get<CompoundStmt>(a.node);
    const auto &y = std::get<CompoundStmt>(b.node);
    if (x.stmts.size() != y.stmts.size()) return false;
    for (std::size_t i = 0; i < x.stmts.size(); ++i)
        if (!stmt_equal(*x.stmts[i], *y.stmts[i])) return false;
    return true;
}

// ----------------------------------------------------------------- misc

bool expr_is_pure(const Expr &e) {
    if (std::holds_alternative<Assign>(e.node)) return false;
    if (std::holds_alternative<CallExpr>(e.node)) return false;
    if (auto *u = std::get_if<Unary>(&e.node)) return expr_is_pure(*u->operand);
    if (auto *b = std::get_if<Binary>(&e.node))
        return expr_is_pure(*b->lhs) && expr_is_pure(*b->rhs);
    if (auto *ix = std::get_if<Index>(&e.node))
        return expr_is_pure(*ix->base) && expr_is_pure(*ix->index);
    if (auto *m = std::get_if<Member>(&e.node)) return expr_is_pure(*m->base);
    return true;
}

ExprPtr negate_expr(const ExprPtr &c) {
    return make_expr(Expr{Unary{UnOp::Not, c}, c->span});
}

bool stmt_is_simple(const Stmt &s) {
    return std::holds_alternative<VarDeclStmt>(s.node) ||
           std::holds_alternative<ExprStmt>(s.node) ||
           std::holds_alternative<EmitStmt>(s.node);
}

std::string statement_id_to_string(const StatementId &id) {
    std::string out = "[";
    for (std::size_t i = 0; i < id.size(); ++i) {
        if (i) out += ".";
        out += std::to_string(id[i]);
    }
    return out + "]";
}

namespace {
void collect_ids(const StmtPtr &s, StatementId path,
                 std::map<StatementId, const Stmt *> &out) {
    out.emplace(path, s.get());
    auto child = [&](const StmtPtr &c, int idx) {
        StatementId p = path;
        p.push_back(idx);
        collect_ids(c, std::move(p), out);
    };
    if (auto *i = std::get_if<IfStmt>(&s->node)) {
        child(i->then_branch, 0);
        if (i->else_branch) child(i->else_branch, 1);
    } else if (auto *w = std::get_if<WhileStmt>(&s->node)) {
        child(w->body, 0);
    } else if (auto *f = std::get_if<ForStmt>(&s->node)) {
        child(f->init, 0);
        child(f->body, 1);
    } else if (auto *c = std::get_if<CompoundStmt>(&s->node)) {
        int idx = 0;
        for (const auto &st : c->stmts) child(st, idx++);
    }
}
} // namespace

std::map<StatementId, const Stmt *> statement_ids(const StmtPtr &root) {
    std::map<StatementId, const Stmt *> out;
    if (root) collect_ids(root, {}, out);
    return out;
}

std::vector<std::string> normalize_tokens(const std::string &text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto two = [&](char a, char b) {
        return i + 1 < n && text[i] == a && text[i + 1] == b;
    };
    while (i < n) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                             text[j] == '_'))
                ++j;
            out.push_back(text.substr(i, j - i));
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < n && (std::isalnum(static_cast<unsigned char>(text[j]))))
                ++j; // keeps 0x1f together
            out.push_back(text.substr(i, j - i));
            i = j;
            continue;
        }
        if (two('=', '=') || two('!', '=') || two('<', '=') || two('>', '=') ||
            two('&', '&') || two('|', '|') || two('+', '=') || two('-', '=') ||
            two('=', '>')) {
            out.push_back(text.substr(i, 2));
            i += 2;
            continue;
        }
        out.push_back(std::string(1, c));
        ++i;
    }
    return out;
}

} // namespace verisol
