#include "verisol/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "verisol/checker.hpp"
#include "verisol/parser.hpp"

namespace verisol {

bool VerifyReport::all_verified_and_live() const {
    if (!ok) return false;
    for (const auto &p : properties)
        if (!p.verified) return false;
    if (deadlock_initial.checked && !deadlock_initial.deadlock_free)
        return false;
    if (deadlock_augmented.checked && !deadlock_augmented.deadlock_free)
        return false;
    return true;
}

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    auto d = std::chrono::steady_clock::now() - t0;
    return std::chrono::duration<double, std::milli>(d).count();
}

void fill_trace(const Kripke &ks, const Evidence &ev, PropertyOutcome &out) {
    for (const auto &st : ev.steps) {
        out.trace_labels.push_back(st.label);
        if (st.label == 0) {
            out.trace.push_back(ks.control_names[ks.states[st.state].control]);
        } else {
            auto it = ks.label_names.find(st.label);
            out.trace.push_back(it != ks.label_names.end()
                                    ? it->second
                                    : std::to_string(st.label));
        }
    }
    out.loop_start = ev.loop_start;
}

DeadlockOutcome deadlock_outcome(const Kripke &ks) {
    DeadlockOutcome out;
    out.checked = true;
    CheckResult r = check_deadlock(ks);
    out.deadlock_free = r.holds;
    if (r.evidence) {
        for (const auto &st : r.evidence->steps) {
            out.witness_labels.push_back(st.label);
            if (st.label == 0) {
                out.witness.push_back(
                    ks.control_names[ks.states[st.state].control]);
            } else {
                auto it = ks.label_names.find(st.label);
                out.witness.push_back(it != ks.label_names.end()
                                          ? it->second
                                          : std::to_string(st.label));
            }
        }
    }
    return out;
}

// formula text with placeholders substituted by the operand displays
std::string display_formula(const BuiltProperty &bp) {
    std::map<std::string, CtlPtr> subs;
    for (std::size_t i = 0; i < bp.placeholders.size(); ++i)
        subs["a" + std::to_string(i)] =
            ctl_atom(bp.placeholders[i].display());
    std::function<CtlPtr(const CtlPtr &)> rw = [&](const CtlPtr &f) -> CtlPtr {
        if (auto *a = std::get_if<CtlAtom>(&f->node)) {
            auto it = subs.find(a->name);
            return it != subs.end() ? it->second : f;
        }
        if (auto *u = std::get_if<CtlUnaryNode>(&f->node))
            return ctl_un(u->op, rw(u->operand));
        if (auto *b = std::get_if<CtlBinaryNode>(&f->node))
            return ctl_bin(b->op, rw(b->lhs), rw(b->rhs));
        return f;
    };
    if (!bp.formula) return "";
    return ctl_to_string(*rw(bp.formula));
}

} // namespace

VerifyReport run_verify(const std::string &source, const VerifyOptions &opts) {
    auto t0 = std::chrono::steady_clock::now();
    VerifyReport rep;

    ParseResult pr = parse_contract(source);
    rep.diagnostics = pr.diagnostics;
    if (!pr.model) {
        rep.total_millis = ms_since(t0);
        return rep;
    }
    const ContractModel &m = *pr.model;
    rep.contract = m.name;

    std::size_t cap = opts.state_cap ? opts.state_cap : default_state_cap();

    std::vector<std::string> texts = m.property_texts;
    texts.insert(texts.end(), opts.extra_properties.begin(),
                 opts.extra_properties.end());

    struct Prepared {
        PropertyOutcome out;
        std::optional<PropertySpec> spec;
        BuiltProperty built;
    };
    std::vector<Prepared> work(texts.size());
    bool needs_aug = opts.force_augment;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        Prepared &w = work[i];
        w.out.text = texts[i];
        PropertyParseResult pp = parse_property(texts[i]);
        w.out.diagnostics = pp.diagnostics;
        if (!pp.spec) continue;
        w.spec = pp.spec;
        w.out.kind = pp.spec->kind;
        w.built = to_ctl(*pp.spec);
        w.out.ctl = display_formula(w.built);
        w.out.on_augmented = pp.spec->needs_statement_atoms();
        if (w.out.on_augmented) needs_aug = true;
    }

    KripkeResult ir = build_initial_kripke(m, cap);
    for (const auto &n : ir.notes) rep.diagnostics.push_back(n);
    if (!ir.kripke) {
        if (ir.error)
            rep.diagnostics.push_back({Severity::Error, "state-cap",
                                       ir.error->message, {}});
        for (auto &w : work) rep.properties.push_back(std::move(w.out));
        rep.total_millis = ms_since(t0);
        return rep;
    }
    rep.states_initial = ir.kripke->states.size();
    rep.deadlock_initial = deadlock_outcome(*ir.kripke);

    AugmentedModel am;
    std::optional<KripkeResult> ar;
    if (needs_aug) {
        am = augment_model(m);
        for (const auto &n : am.notes) rep.diagnostics.push_back(n);
        ar = build_augmented_kripke(am, cap);
        for (const auto &n : ar->notes) rep.diagnostics.push_back(n);
        if (!ar->kripke) {
            if (ar->error)
                rep.diagnostics.push_back({Severity::Error, "state-cap",
                                           ar->error->message, {}});
            for (auto &w : work) rep.properties.push_back(std::move(w.out));
            rep.total_millis = ms_since(t0);
            return rep;
        }
        rep.states_augmented = ar->kripke->states.size();
        rep.augmented_built = true;
        rep.deadlock_augmented = deadlock_outcome(*ar->kripke);
        rep.legend_rows = ar->kripke->legend_rows;
    } else {
        rep.legend_rows = ir.kripke->legend_rows;
    }

    auto check_one = [&](Prepared &w) {
        if (!w.spec) return;
        auto p0 = std::chrono::steady_clock::now();
        const Kripke &ks = w.out.on_augmented ? *ar->kripke : *ir.kripke;
        const AugmentedModel *amp = w.out.on_augmented ? &am : nullptr;
        ResolveResult rr = resolve_atoms(w.built, ks, amp);
        w.out.diagnostics.insert(w.out.diagnostics.end(),
                                 rr.diagnostics.begin(), rr.diagnostics.end());
        if (has_errors(w.out.diagnostics)) {
            w.out.millis = ms_since(p0);
            return;
        }
        CheckResult cr = check(ks, w.built.formula, rr.atoms);
        w.out.verified = cr.holds;
        if (cr.evidence) fill_trace(ks, *cr.evidence, w.out);
        w.out.millis = ms_since(p0);
    };

    int jobs = std::max(1, opts.jobs);
    if (jobs > 1 && work.size() > 1) {
        std::vector<std::thread> pool;
        std::size_t stride = static_cast<std::size_t>(jobs);
        for (std::size_t k = 0; k < stride; ++k) {
            pool.emplace_back([&, k] {
                for (std::size_t i = k; i < work.size(); i += stride)
                    check_one(work[i]);
            });
        }
        for (auto &th : pool) th.join();
    } else {
        for (auto &w : work) check_one(w);
    }

    bool prop_errors = false;
    for (auto &w : work) {
        if (has_errors(w.out.diagnostics)) prop_errors = true;
        rep.properties.push_back(std::move(w.out));
    }
    rep.ok = !has_errors(rep.diagnostics) && !prop_errors;
    rep.total_millis = ms_since(t0);
    return rep;
}

// ------------------------------------------------------------------ output

namespace {

std::string jesc(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
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

void json_diags(std::ostringstream &os, const std::vector<Diagnostic> &diags) {
    os << "[";
    for (std::size_t i = 0; i < diags.size(); ++i) {
        if (i) os << ",";
        os << "{\"severity\":\"" << severity_name(diags[i].severity)
           << "\",\"code\":\"" << jesc(diags[i].code) << "\",\"message\":\""
           << jesc(diags[i].message) << "\"}";
    }
    os << "]";
}

void json_deadlock(std::ostringstream &os, const DeadlockOutcome &d) {
    os << "{\"checked\":" << (d.checked ? "true" : "false")
       << ",\"deadlock_free\":" << (d.deadlock_free ? "true" : "false")
       << ",\"witness\":[";
    for (std::size_t i = 0; i < d.witness.size(); ++i) {
        if (i) os << ",";
        os << "\"" << jesc(d.witness[i]) << "\"";
    }
    os << "]}";
}

} // namespace

std::string report_to_json(const VerifyReport &r) {
    std::ostringstream os;
    os << "{";
    os << "\"contract\":\"" << jesc(r.contract) << "\"";
    os << ",\"ok\":" << (r.ok ? "true" : "false");
    os << ",\"states_initial\":" << r.states_initial;
    os << ",\"states_augmented\":" << r.states_augmented;
    os << ",\"augmented_built\":" << (r.augmented_built ? "true" : "false");
    os << ",\"total_millis\":" << r.total_millis;
    os << ",\"diagnostics\":";
    json_diags(os, r.diagnostics);
    os << ",\"deadlock_initial\":";
    json_deadlock(os, r.deadlock_initial);
    os << ",\"deadlock_augmented\":";
    json_deadlock(os, r.deadlock_augmented);
    os << ",\"properties\":[";
    for (std::size_t i = 0; i < r.properties.size(); ++i) {
        const PropertyOutcome &p = r.properties[i];
        if (i) os << ",";
        os << "{\"text\":\"" << jesc(p.text) << "\"";
        os << ",\"kind\":\"" << property_kind_name(p.kind) << "\"";
        os << ",\"ctl\":\"" << jesc(p.ctl) << "\"";
        os << ",\"result\":\""
           << (has_errors(p.diagnostics) ? "error"
                                         : (p.verified ? "verified" : "violated"))
           << "\"";
        os << ",\"on_augmented\":" << (p.on_augmented ? "true" : "false");
        os << ",\"millis\":" << p.millis;
        os << ",\"trace\":[";
        for (std::size_t j = 0; j < p.trace.size(); ++j) {
            if (j) os << ",";
            os << "\"" << jesc(p.trace[j]) << "\"";
        }
        os << "]";
        if (p.loop_start) os << ",\"loop_start\":" << *p.loop_start;
        os << ",\"diagnostics\":";
        json_diags(os, p.diagnostics);
        os << "}";
    }
    os << "]}";
    return os.str();
}

std::string report_to_table(const VerifyReport &r) {
    std::ostringstream os;
    os << "contract " << r.contract << "\n";
    os << "  states: initial " << r.states_initial;
    if (r.augmented_built) os << ", augmented " << r.states_augmented;
    os << "\n";
    if (r.deadlock_initial.checked)
        os << "  deadlock (initial): "
           << (r.deadlock_initial.deadlock_free ? "free" : "REACHABLE") << "\n";
    if (r.deadlock_augmented.checked)
        os << "  deadlock (augmented): "
           << (r.deadlock_augmented.deadlock_free ? "free" : "REACHABLE")
           << "\n";
    if (!r.deadlock_initial.deadlock_free &&
        !r.deadlock_initial.witness.empty()) {
        os << "  deadlock witness:";
        for (const auto &w : r.deadlock_initial.witness) os << " " << w;
        os << "\n";
    }
    for (const auto &d : r.diagnostics)
        os << "  " << severity_name(d.severity) << " [" << d.code << "] "
           << d.message << "\n";
    for (const auto &p : r.properties) {
        std::string verdict = has_errors(p.diagnostics)
                                  ? "ERROR"
                                  : (p.verified ? "Verified" : "Violated");
        os << "  [" << verdict << "] " << p.text << "\n";
        if (!p.ctl.empty()) os << "      " << p.ctl << "\n";
        for (const auto &d : p.diagnostics)
            os << "      " << severity_name(d.severity) << " [" << d.code
               << "] " << d.message << "\n";
        if (!p.verified && !p.trace.empty()) {
            os << "      counterexample:";
            for (std::size_t j = 0; j < p.trace.size(); ++j) {
                os << " " << p.trace[j];
                if (p.loop_start && *p.loop_start == j) os << "*";
            }
            if (p.loop_start) {
                os << " (loops";
                if (*p.loop_start > 0) os << " from step " << *p.loop_start;
                os << ")";
            }
            os << "\n";
        }
    }
    return os.str();
}

} // namespace verisol
