#ifndef VERISOL_PARSER_HPP
#define VERISOL_PARSER_HPP

#include <optional>
#include <string>
#include <vector>

#include "verisol/model.hpp"

namespace verisol {

struct ParseResult {
    std::optional<ContractModel> model;
    std::vector<Diagnostic> diagnostics;
};

// Parse a .vsc contract definition.
ParseResult parse_contract(const std::string &source);

// Parse a single statement (statement grammar of the action language).
struct StmtParseResult {
    StmtPtr stmt;
    std::vector<Diagnostic> diagnostics;
};
StmtParseResult parse_statement(const std::string &source);

struct ExprParseResult {
    ExprPtr expr;
    std::vector<Diagnostic> diagnostics;
};
ExprParseResult parse_expression(const std::string &source);

} // namespace verisol

#endif
