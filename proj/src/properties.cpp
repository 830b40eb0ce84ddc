#include "verisol/properties.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <functional>

namespace verisol {

std::string property_kind_name(PropertyKind k) {
    switch (k) {
    case PropertyKind::CannotAfter: return "cannot-after";
    case PropertyKind::OnlyAfter: return "only-after";
    case PropertyKind::IfThenOnlyAfter: return "if-then-only-after";
    case PropertyKind::CanNever: return "can-never";
    case PropertyKind::NeverBefore: return "never-before";
    case PropertyKind::EventuallyAfter: return "eventually-after";
    case PropertyKind::Eventually: return "eventually";
    case PropertyKind::DirectCtl: return "direct-ctl";
    }
    return "unknown";
}

bool property_is_liveness(PropertyKind k) {
    return k == PropertyKind::Eventually || k == PropertyKind::EventuallyAfter;
}

std::string PropertyAtom::display() const {
    if (statement_text.empty()) return transition;
    return transition + "." + statement_text;
}

static bool is_label_number(const std::string &s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

bool PropertySpec::needs_statement_atoms() const {
    // bare edge numbers address the augmented model, like statement atoms
    for (const auto *group : {&p, &q, &r})
        for (const auto &a : *group)
            if (a.is_statement() || is_label_number(a.transition)) return true;
    return false;
}

// ------------------------------------------------------------------ parse

namespace {

std::string trim(const std::string &s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool is_ident(const std::string &s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
        return false;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) continue;
        if (c == '_' || c == '@') continue;
        return false;
    }
    return true;
}

// Operand: one or more atoms separated by ';'. An atom is a transition name
// or transition.statement-text.
std::vector<PropertyAtom> parse_operand(const std::string &text,
                                        std::vector<Diagnostic> &diags) {
    std::vector<PropertyAtom> out;
    std::size_t start = 0;
    std::vector<std::string> segments;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ';') {
            std::string seg = trim(text.substr(start, i - start));
            if (!seg.empty()) segments.push_back(std::move(seg));
            start = i + 1;
        }
    }
    if (segments.empty()) {
        diags.push_back({Severity::Error, "property-operand",
                         "empty operand in property", {}});
        return out;
    }
    for (const auto &seg : segments) {
        if (is_label_number(seg)) { // bare augmented edge number
            out.push_back({seg, ""});
            continue;
        }
        std::size_t dot = seg.find('.');
        if (dot == std::string::npos) {
            if (!is_ident(seg)) {
                diags.push_back({Severity::Error, "property-atom",
                                 "bad transition name: " + seg, {}});
                continue;
            }
            out.push_back({seg, ""});
            continue;
        }
        std::string prefix = trim(seg.substr(0, dot));
        std::string rest = trim(seg.substr(dot + 1));
        if (!is_ident(prefix) || rest.empty()) {
            diags.push_back({Severity::Error, "property-atom",
                             "bad atom (expected transition or "
                             "transition.statement): " +
                                 seg,
                             {}});
            continue;
        }
        out.push_back({prefix, rest});
    }
    return out;
}

} // namespace

PropertyParseResult parse_property(const std::string &raw) {
    PropertyParseResult res;
    std::string text = trim(raw);
    if (text.empty()) {
        res.diagnostics.push_back(
            {Severity::Error, "property-empty", "empty property", {}});
        return res;
    }

    PropertySpec spec;
    spec.raw_text = text;

    if (text.rfind("ctl:", 0) == 0) {
        CtlParseResult cp = parse_ctl(text.substr(4));
        res.diagnostics.insert(res.diagnostics.end(), cp.diagnostics.begin(),
                               cp.diagnostics.end());
        if (!cp.formula) return res;
        spec.kind = PropertyKind::DirectCtl;
        spec.direct = cp.formula;
        res.spec = std::move(spec);
        return res;
    }

    auto fail = [&](const std::string &msg) {
        res.diagnostics.push_back({Severity::Error, "property-syntax", msg, {}});
    };

    if (text.rfind("if ", 0) == 0) {
        // if <p> happens, <q> can happen only after <r> happens
        const std::string sep1 = " happens,";
        const std::string sep2 = " can happen only after ";
        const std::string tail = " happens";
        std::size_t i1 = text.find(sep1);
        if (i1 == std::string::npos) {
            fail("expected ' happens,' in if-property");
            return res;
        }
        std::string p_text = text.substr(3, i1 - 3);
        std::string rest = trim(text.substr(i1 + sep1.size()));
        std::size_t i2 = rest.find(sep2);
        if (i2 == std::string::npos) {
            fail("expected ' can happen only after ' in if-property");
            return res;
        }
        std::string q_text = rest.substr(0, i2);
        std::string r_text = rest.substr(i2 + sep2.size());
        if (r_text.size() < tail.size() ||
            r_text.compare(r_text.size() - tail.size(), tail.size(), tail) != 0) {
            fail("expected trailing ' happens' in if-property");
            return res;
        }
        r_text = r_text.substr(0, r_text.size() - tail.size());
        spec.kind = PropertyKind::IfThenOnlyAfter;
        spec.p = parse_operand(p_text, res.diagnostics);
        spec.q = parse_operand(q_text, res.diagnostics);
        spec.r = parse_operand(r_text, res.diagnostics);
        if (!has_errors(res.diagnostics)) res.spec = std::move(spec);
        return res;
    }

    struct Phrase {
        const char *sep;
        PropertyKind kind;
        bool binary;
    };
    // longest phrases first so 'can never happen' does not shadow
    // 'can never happen before'
    static const Phrase phrases[] = {
        {" cannot happen after ", PropertyKind::CannotAfter, true},
        {" can never happen after ", PropertyKind::CannotAfter, true},
        {" can happen only after ", PropertyKind::OnlyAfter, true},
        {" can never happen before ", PropertyKind::NeverBefore, true},
        {" cannot happen before ", PropertyKind::NeverBefore, true},
        {" will eventually happen after ", PropertyKind::EventuallyAfter, true},
        {" can never happen", PropertyKind::CanNever, false},
        {" will eventually happen", PropertyKind::Eventually, false},
    };

    for (const Phrase &ph : phrases) {
        std::string sep = ph.sep;
        if (ph.binary) {
            std::size_t i = text.find(sep);
            if (i == std::string::npos) continue;
            spec.kind = ph.kind;
            spec.p = parse_operand(text.substr(0, i), res.diagnostics);
            spec.q = parse_operand(text.substr(i + sep.size()), res.diagnostics);
            if (!has_errors(res.diagnostics)) res.spec = std::move(spec);
            return res;
        }
        if (text.size() >= sep.size() &&
            text.compare(text.size() - sep.size(), sep.size(), sep) == 0) {
            spec.kind = ph.kind;
            spec.p = parse_operand(text.substr(0, text.size() - sep.size()),
                                   res.diagnostics);
            if (!has_errors(res.diagnostics)) res.spec = std::move(spec);
            return res;
        }
    }

    fail("unrecognized property form (see the template list)");
    return res;
}

// ----------------------------------------------------------------- to CTL

namespace {

CtlPtr group_disjunction(const std::vector<PropertyAtom> &atoms, int &next,
                         std::vector<PropertyAtom> &placeholders) {
    CtlPtr out;
    for (const auto &a : atoms) {
        CtlPtr at = ctl_atom("a" + std::to_string(next++));
        placeholders.push_back(a);
        out = out ? ctl_bin(CtlBinary::Or, std::move(out), std::move(at))
                  : std::move(at);
    }
    return out ? out : ctl_const(false);
}

CtlPtr neg(CtlPtr f) { return ctl_un(CtlUnary::Not, std::move(f)); }

PropertyAtom atom_from_name(const std::string &name) {
    std::size_t dot = name.find('.');
    if (dot == std::string::npos) return {name, ""};
    std::string prefix = name.substr(0, dot);
    std::string rest = name.substr(dot + 1);
    if (!is_ident(prefix) || rest.empty()) return {name, ""};
    return {prefix, rest};
}

} // namespace

BuiltProperty to_ctl(const PropertySpec &spec) {
    BuiltProperty bp;
    int next = 0;

    if (spec.kind == PropertyKind::DirectCtl) {
        // rewrite raw atoms into placeholders; deadlock stays special
        std::map<std::string, CtlPtr> mapped;
        std::function<CtlPtr(const CtlPtr &)> rw =
            [&](const CtlPtr &f) -> CtlPtr {
            if (auto *a = std::get_if<CtlAtom>(&f->node)) {
                if (a->name == "deadlock") return f;
                auto it = mapped.find(a->name);
                if (it != mapped.end()) return it->second;
                CtlPtr ph = ctl_atom("a" + std::to_string(next++));
                bp.placeholders.push_back(atom_from_name(a->name));
                mapped.emplace(a->name, ph);
                return ph;
            }
            if (std::holds_alternative<CtlConst>(f->node)) return f;
            if (auto *u = std::get_if<CtlUnaryNode>(&f->node))
                return ctl_un(u->op, rw(u->operand));
            const auto &b = std::get<CtlBinaryNode>(f->node);
            return ctl_bin(b.op, rw(b.lhs), rw(b.rhs));
        };
        bp.formula = spec.direct ? rw(spec.direct) : ctl_const(true);
        return bp;
    }

    CtlPtr P = group_disjunction(spec.p, next, bp.placeholders);
    CtlPtr Q, R;
    if (!spec.q.empty()) Q = group_disjunction(spec.q, next, bp.placeholders);
    if (!spec.r.empty()) R = group_disjunction(spec.r, next, bp.placeholders);

    switch (spec.kind) {
    case PropertyKind::CannotAfter:
        bp.formula = ctl_un(CtlUnary::AG,
                            ctl_bin(CtlBinary::Implies, Q,
                                    ctl_un(CtlUnary::AG, neg(P))));
        break;
    case PropertyKind::OnlyAfter:
        bp.formula = ctl_bin(CtlBinary::AW, neg(P), Q);
        break;
    case PropertyKind::IfThenOnlyAfter:
        bp.formula = ctl_un(
            CtlUnary::AG,
            ctl_bin(CtlBinary::Implies, P,
                    ctl_un(CtlUnary::AX, ctl_bin(CtlBinary::AW, neg(Q), R))));
        break;
    case PropertyKind::CanNever:
        bp.formula = ctl_un(CtlUnary::AG, neg(P));
        break;
    case PropertyKind::NeverBefore:
        bp.formula = ctl_bin(
            CtlBinary::AW,
            ctl_bin(CtlBinary::Or, neg(P), ctl_un(CtlUnary::AG, neg(Q))), Q);
        break;
    case PropertyKind::EventuallyAfter:
        bp.formula = ctl_un(
            CtlUnary::AG,
            ctl_bin(CtlBinary::Implies, Q, ctl_un(CtlUnary::AF, P)));
        break;
    case PropertyKind::Eventually:
        bp.formula = ctl_un(CtlUnary::AF, P);
        break;
    case PropertyKind::DirectCtl:
        break;
    }
    return bp;
}

// ----------------------------------------------------------------- resolve

namespace {

bool tokens_match(std::vector<std::string> a, std::vector<std::string> b) {
    while (!a.empty() && a.back() == ";") a.pop_back();
    while (!b.empty() && b.back() == ";") b.pop_back();
    return a == b;
}

} // namespace

ResolveResult resolve_atoms(const BuiltProperty &bp, const Kripke &ks,
                            const AugmentedModel *am) {
    ResolveResult res;
    for (std::size_t i = 0; i < bp.placeholders.size(); ++i) {
        const PropertyAtom &atom = bp.placeholders[i];
        std::string name = "a" + std::to_string(i);
        std::set<int> labels;

        if (is_label_number(atom.transition) && !atom.is_statement()) {
            int want = std::atoi(atom.transition.c_str());
            if (ks.label_names.count(want)) {
                labels.insert(want);
            } else {
                res.diagnostics.push_back(
                    {Severity::Error, "property-resolve",
                     "no edge carries number " + atom.transition +
                         " in the checked structure",
                     {}});
            }
            res.atoms.labels[name] = std::move(labels);
            continue;
        }

        if (!atom.is_statement()) {
            bool collective_fallback = atom.transition == "fallback";
            if (am) {
                for (const auto &[tname, p] : am->provenance) {
                    if (p.role != EdgeRole::GuardEntry) continue;
                    if (p.origin == atom.transition ||
                        (collective_fallback &&
                         p.origin.rfind("fallback@", 0) == 0))
                        labels.insert(p.label);
                }
            } else {
                for (const auto &[label, tname] : ks.label_names) {
                    if (tname == atom.transition ||
                        (collective_fallback &&
                         tname.rfind("fallback@", 0) == 0))
                        labels.insert(label);
                }
            }
            if (labels.empty()) {
                res.diagnostics.push_back(
                    {Severity::Error, "property-resolve",
                     "no transition matches '" + atom.transition +
                         "' in the checked structure",
                     {}});
            }
        } else {
            if (!am) {
                res.diagnostics.push_back(
                    {Severity::Error, "property-resolve",
                     "statement-level atom '" + atom.display() +
                         "' needs the augmented model",
                     {}});
                res.atoms.labels[name] = {};
                continue;
            }
            bool collective_fallback = atom.transition == "fallback";
            std::vector<std::string> want = normalize_tokens(atom.statement_text);
            bool origin_seen = false;
            for (const auto &[tname, p] : am->provenance) {
                bool origin_ok =
                    p.origin == atom.transition ||
                    (collective_fallback && p.origin.rfind("fallback@", 0) == 0);
                if (!origin_ok) continue;
                origin_seen = true;
                if (p.role != EdgeRole::Statement) continue;
                const Transition *t = am->model.find_transition(tname);
                if (!t || !t->action) continue;
                if (tokens_match(normalize_tokens(stmt_to_string(*t->action)),
                                 want))
                    labels.insert(p.label);
            }
            if (labels.empty()) {
                res.diagnostics.push_back(
                    {Severity::Error, "property-resolve",
                     origin_seen
                         ? "statement '" + atom.statement_text +
                               "' not found inside transition '" +
                               atom.transition + "'"
                         : "no transition matches '" + atom.transition +
                               "' in the checked structure",
                     {}});
            }
        }
        res.atoms.labels[name] = std::move(labels);
    }
    return res;
}

} // namespace verisol
