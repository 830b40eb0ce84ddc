#ifndef VERISOL_DIAGNOSTICS_HPP
#define VERISOL_DIAGNOSTICS_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace verisol {

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 0;
    int col = 0;
};

enum class Severity { Error, Warning, Note };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    Span span;
};

std::string severity_name(Severity s);

// One diagnostic per line, machine readable.
std::string diagnostics_to_json_lines(const std::vector<Diagnostic> &diags);

std::string diagnostics_to_text(const std::vector<Diagnostic> &diags,
                                const std::string &filename);

inline bool has_errors(const std::vector<Diagnostic> &diags) {
    for (const auto &d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

} // namespace verisol

#endif
