#ifndef VERISOL_AST_HPP
#define VERISOL_AST_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "verisol/diagnostics.hpp"

namespace verisol {

// ---------------------------------------------------------------- types

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct NamedType {
    std::string name; // uint, uint64, int, bool, address, bytes32, struct names
};
struct MappingType {
    TypePtr key;
    TypePtr value;
};
struct ArrayType {
    TypePtr elem;
};

struct Type {
    std::variant<NamedType, MappingType, ArrayType> node;
};

TypePtr make_named_type(std::string name);
TypePtr make_mapping_type(TypePtr k, TypePtr v);
TypePtr make_array_type(TypePtr elem);
std::string type_to_string(const Type &t);
bool type_equal(const Type &a, const Type &b);

// ----------------------------------------------------------- expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct IntLit {
    std::uint64_t value = 0;  // already scaled by the time unit, if any
    std::string display;      // original spelling, e.g. "5 days"
};
struct BoolLit {
    bool value = false;
};
struct HexLit {
    std::uint64_t value = 0; // low 64 bits; enough for modeled addresses/hashes
    std::string display;     // original spelling, e.g. "0x1a"
};
struct Ident {
    std::string name;
};

enum class EnvKind { MsgSender, MsgValue, Now };
struct EnvExpr {
    EnvKind kind;
};

enum class UnOp { Not, Neg, Pos };
struct Unary {
    UnOp op;
    ExprPtr operand;
};

enum class BinOp { Or, And, Eq, Ne, Lt, Gt, Le, Ge, Add, Sub, Mul, Div, Mod };
struct Binary {
    BinOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

enum class AssignOp { Assign, AddAssign, SubAssign };
struct Assign {
    AssignOp op;
    ExprPtr target;
    ExprPtr value;
};

struct Index {
    ExprPtr base;
    ExprPtr index;
};
struct Member {
    ExprPtr base;
    std::string member;
};

enum class CallKind { BuiltinHash, Transfer, Send, LowCall, Push, Internal };
struct CallExpr {
    CallKind kind;
    ExprPtr base;          // receiver for transfer/send/call/push; null otherwise
    std::string name;      // keccak256, struct name for Internal, else empty
    std::vector<ExprPtr> args;
};

struct Expr {
    std::variant<IntLit, BoolLit, HexLit, Ident, EnvExpr, Unary, Binary, Assign,
                 Index, Member, CallExpr>
        node;
    Span span;
};

ExprPtr make_expr(Expr e);
std::string expr_to_string(const Expr &e);
bool expr_equal(const Expr &a, const Expr &b);

// True for the pure sublanguage: no assignments, no calls of any kind.
bool expr_is_pure(const Expr &e);

// Negation used by the augmentation: !(c)
ExprPtr negate_expr(const ExprPtr &c);

// ------------------------------------------------------------ statements

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct VarDeclStmt {
    TypePtr type;
    std::string name;
    ExprPtr init; // may be null
};
struct ExprStmt {
    ExprPtr expr;
};
struct EmitStmt {
    std::string event;
    std::vector<ExprPtr> args;
};
struct ReturnStmt {
    ExprPtr value; // may be null
};
struct IfStmt {
    ExprPtr cond;
    StmtPtr then_branch;
    StmtPtr else_branch; // may be null
};
struct WhileStmt {
    ExprPtr cond;
    StmtPtr body;
};
struct ForStmt {
    StmtPtr init; // VarDeclStmt
    ExprPtr cond;
    ExprPtr post;
    StmtPtr body;
};
struct CompoundStmt {
    std::vector<StmtPtr> stmts;
};

struct Stmt {
    std::variant<VarDeclStmt, ExprStmt, EmitStmt, ReturnStmt, IfStmt, WhileStmt,
                 ForStmt, CompoundStmt>
        node;
    Span span;
};

StmtPtr make_stmt(Stmt s);
std::string stmt_to_string(const Stmt &s, int indent = 0);
bool stmt_equal(const Stmt &a, const Stmt &b);

// A statement is "simple" when the augmentation maps it to a single edge.
bool stmt_is_simple(const Stmt &s);

// --------------------------------------------------------- statement ids

// Stable path from the action root: child indices in pre-order.
// If: then = 0, else = 1. For: init = 0, body = 1. While: body = 0.
using StatementId = std::vector<int>;

std::string statement_id_to_string(const StatementId &id);

// Pre-order map from id to node, root included.
std::map<StatementId, const Stmt *> statement_ids(const StmtPtr &root);

// Token sequence used for whitespace-insensitive statement-atom matching.
std::vector<std::string> normalize_tokens(const std::string &text);

} // namespace verisol

#endif
