#include "verisol/diagnostics.hpp"

#include <sstream>

namespace verisol {

std::string severity_name(Severity s) {
    switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Note: return "note";
    }
    return "unknown";
}

namespace {
std::string json_escape(const std::string &s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}
} // namespace

std::string diagnostics_to_json_lines(const std::vector<Diagnostic> &diags) {
    std::ostringstream os;
    for (const auto &d : diags) {
        os << "{\"severity\":\"" << severity_name(d.severity) << "\",\"code\":\""
           << json_escape(d.code) << "\",\"message\":\"" << json_escape(d.message)
           << "\",\"line\":" << d.span.line << ",\"col\":" << d.span.col << "}\n";
    }
    return os.str();
}

std::string diagnostics_to_text(const std::vector<Diagnostic> &diags,
                                const std::string &filename) {
    std::ostringstream os;
    for (const auto &d : diags) {
        os << filename << ":" << d.span.line << ":" << d.span.col << ": "
           << severity_name(d.severity) << " [" << d.code << "] " << d.message
           << "\n";
    }
    return os.str();
}

} // namespace verisol
