#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "verisol/abstraction.hpp"
#include "verisol/codegen.hpp"
#include "verisol/equivalence.hpp"
#include "verisol/interp.hpp"
#include "verisol/parser.hpp"
#include "verisol/properties.hpp"
#include "verisol/report.hpp"
#include "verisol/transform.hpp"

using namespace verisol;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;
constexpr int kExitUsage = 2;

std::string slurp(const std::string &path, bool &ok) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ok = false;
        return {};
    }
    std::ostringstream os;
    os << in.rdbuf();
    ok = true;
    return os.str();
}

bool spill(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    return out.good();
}

void print_diags(const std::vector<Diagnostic> &diags, bool as_json,
                 const std::string &filename = "") {
    if (diags.empty()) return;
    if (as_json)
        std::cerr << diagnostics_to_json_lines(diags);
    else
        std::cerr << diagnostics_to_text(diags, filename);
}

std::optional<ContractModel> load_model(const std::string &path, bool as_json,
                                        std::vector<Diagnostic> *keep = nullptr) {
    bool ok = false;
    std::string text = slurp(path, ok);
    if (!ok) {
        std::cerr << "cannot read " << path << "\n";
        return std::nullopt;
    }
    ParseResult pr = parse_contract(text);
    if (keep)
        keep->insert(keep->end(), pr.diagnostics.begin(), pr.diagnostics.end());
    else
        print_diags(pr.diagnostics, as_json);
    return pr.model;
}

std::string legend_table(const std::vector<LegendRow> &rows) {
    std::ostringstream os;
    os << "label  edge                          origin            role         "
          "from -> to\n";
    for (const auto &r : rows) {
        std::ostringstream line;
        line << r.label;
        std::string lab = line.str();
        lab.resize(7, ' ');
        std::string name = r.transition;
        if (name.size() < 30) name.resize(30, ' ');
        std::string origin = r.origin;
        if (origin.size() < 18) origin.resize(18, ' ');
        std::string role = r.role;
        if (role.size() < 13) role.resize(13, ' ');
        os << lab << name << origin << role << r.from << " -> " << r.to;
        if (!r.text.empty()) {
            std::string t = r.text;
            for (auto &c : t)
                if (c == '\n') c = ' ';
            os << "   " << t;
        }
        os << "\n";
    }
    return os.str();
}

json kripke_to_json(const Kripke &ks) {
    json j;
    j["controls"] = ks.control_names;
    j["initial"] = ks.initial;
    j["tracked"] = ks.tracked_names;
    json states = json::array();
    for (const auto &s : ks.states) {
        json st;
        st["control"] = ks.control_names[s.control];
        st["last_label"] = s.last_label;
        st["deadlock"] = s.deadlock;
        json vars = json::object();
        for (const auto &[k, v] : s.tracked) vars[k] = value_to_string(v);
        st["vars"] = vars;
        states.push_back(std::move(st));
    }
    j["states"] = std::move(states);
    json edges = json::array();
    for (const auto &e : ks.edges) {
        json je;
        je["from"] = e.from;
        je["to"] = e.to;
        je["label"] = e.label;
        auto it = ks.label_names.find(e.label);
        if (it != ks.label_names.end()) je["name"] = it->second;
        edges.push_back(std::move(je));
    }
    j["edges"] = std::move(edges);
    json labels = json::object();
    for (const auto &[l, n] : ks.label_names) labels[std::to_string(l)] = n;
    j["labels"] = std::move(labels);
    return j;
}

// CTLSPEC lines for every property that resolves on this structure
std::vector<NusmvSpec> nusmv_specs(const ContractModel &m, const Kripke &ks,
                                   const AugmentedModel *am) {
    std::vector<NusmvSpec> specs;
    for (const auto &text : m.property_texts) {
        PropertyParseResult pp = parse_property(text);
        if (!pp.spec) continue;
        BuiltProperty bp = to_ctl(*pp.spec);
        ResolveResult rr = resolve_atoms(bp, ks, am);
        if (has_errors(rr.diagnostics)) continue;
        NusmvSpec spec;
        spec.comment = text;
        spec.formula = nusmv_formula(bp.formula, rr.atoms);
        specs.push_back(std::move(spec));
    }
    return specs;
}

int emit_kripke_files(const ContractModel &m, const std::string &prefix,
                      std::size_t cap) {
    KripkeResult ir = build_initial_kripke(m, cap);
    if (ir.kripke) {
        spill(prefix + "_initial.json", kripke_to_json(*ir.kripke).dump(2) + "\n");
        spill(prefix + "_initial.smv",
              emit_nusmv(*ir.kripke, nusmv_specs(m, *ir.kripke, nullptr)));
    }
    AugmentedModel am = augment_model(m);
    KripkeResult ar = build_augmented_kripke(am, cap);
    if (ar.kripke) {
        spill(prefix + "_augmented.json",
              kripke_to_json(*ar.kripke).dump(2) + "\n");
        spill(prefix + "_augmented.smv",
              emit_nusmv(*ar.kripke, nusmv_specs(m, *ar.kripke, &am)));
    }
    if (!ir.kripke || !ar.kripke) {
        std::cerr << "state cap hit while emitting kripke structures\n";
        return kExitViolated;
    }
    return kExitOk;
}

// ----------------------------------------------------------------- verify

int cmd_verify(const std::string &file, bool as_json, std::size_t cap,
               int jobs, bool force_augment, bool emit_augmented,
               const std::string &emit_kripke,
               const std::vector<std::string> &extra_props) {
    bool ok = false;
    std::string text = slurp(file, ok);
    if (!ok) {
        std::cerr << "cannot read " << file << "\n";
        return kExitUsage;
    }
    VerifyOptions opts;
    opts.state_cap = cap;
    opts.jobs = jobs;
    opts.force_augment = force_augment;
    opts.extra_properties = extra_props;
    VerifyReport rep = run_verify(text, opts);

    if (as_json)
        std::cout << report_to_json(rep) << "\n";
    else
        std::cout << report_to_table(rep);

    if (emit_augmented) {
        ParseResult pr = parse_contract(text);
        if (pr.model) {
            AugmentedModel am = augment_model(*pr.model);
            std::cout << model_to_dsl(am.model) << "\n"
                      << legend_table(legend(am));
        }
    }
    if (!emit_kripke.empty()) {
        ParseResult pr = parse_contract(text);
        if (pr.model)
            emit_kripke_files(*pr.model, emit_kripke,
                              cap ? cap : default_state_cap());
    }

    if (!rep.ok) return kExitUsage;
    return rep.all_verified_and_live() ? kExitOk : kExitViolated;
}

// --------------------------------------------------------------- generate

int cmd_generate(const std::string &file, const std::string &target,
                 const std::string &out_path, bool require_verified,
                 bool as_json, std::size_t cap) {
    bool ok = false;
    std::string text = slurp(file, ok);
    if (!ok) {
        std::cerr << "cannot read " << file << "\n";
        return kExitUsage;
    }
    ParseResult pr = parse_contract(text);
    print_diags(pr.diagnostics, as_json);
    if (!pr.model) return kExitUsage;
    const ContractModel &m = *pr.model;

    if (require_verified) {
        VerifyOptions opts;
        opts.state_cap = cap;
        VerifyReport rep = run_verify(text, opts);
        if (!rep.ok || !rep.all_verified_and_live()) {
            std::cerr << "refusing to generate: verification did not pass\n";
            return kExitViolated;
        }
    }

    std::string output;
    if (target == "solidity") {
        output = emit_solidity(m);
    } else if (target == "bip") {
        output = emit_bip(m);
    } else if (target == "nusmv") {
        std::size_t real_cap = cap ? cap : default_state_cap();
        bool want_aug = false;
        for (const auto &t : m.property_texts) {
            PropertyParseResult pp = parse_property(t);
            if (pp.spec && pp.spec->needs_statement_atoms()) want_aug = true;
        }
        if (want_aug) {
            AugmentedModel am = augment_model(m);
            KripkeResult ar = build_augmented_kripke(am, real_cap);
            if (!ar.kripke) {
                std::cerr << "state cap hit building the augmented structure\n";
                return kExitViolated;
            }
            output = emit_nusmv(*ar.kripke, nusmv_specs(m, *ar.kripke, &am));
        } else {
            KripkeResult ir = build_initial_kripke(m, real_cap);
            if (!ir.kripke) {
                std::cerr << "state cap hit building the structure\n";
                return kExitViolated;
            }
            output = emit_nusmv(*ir.kripke, nusmv_specs(m, *ir.kripke, nullptr));
        }
    } else {
        std::cerr << "unknown target " << target << "\n";
        return kExitUsage;
    }

    if (out_path.empty()) {
        std::cout << output;
    } else if (!spill(out_path, output)) {
        std::cerr << "cannot write " << out_path << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

// --------------------------------------------------------------- simulate

bool json_to_value(const json &j, Value &out) {
    if (j.contains("uint")) {
        out = Value{IntVal{j["uint"].get<std::uint64_t>(), false}};
        return true;
    }
    if (j.contains("int")) {
        out = Value{IntVal{static_cast<std::uint64_t>(j["int"].get<std::int64_t>()),
                           true}};
        return true;
    }
    if (j.contains("bool")) {
        out = Value{BoolVal{j["bool"].get<bool>()}};
        return true;
    }
    if (j.contains("address")) {
        out = Value{AddressVal{j["address"].get<std::uint64_t>()}};
        return true;
    }
    if (j.contains("bytes32")) {
        out = Value{Bytes32Val{j["bytes32"].get<std::uint64_t>()}};
        return true;
    }
    if (j.contains("uint[]")) {
        ArrayVal av;
        av.elem_type = make_named_type("uint");
        for (const auto &e : j["uint[]"])
            av.elems.push_back(Value{IntVal{e.get<std::uint64_t>(), false}});
        out = Value{std::move(av)};
        return true;
    }
    if (j.contains("bytes32[]")) {
        ArrayVal av;
        av.elem_type = make_named_type("bytes32");
        for (const auto &e : j["bytes32[]"])
            av.elems.push_back(Value{Bytes32Val{e.get<std::uint64_t>()}});
        out = Value{std::move(av)};
        return true;
    }
    return false;
}

CallCtx json_to_ctx(const json &j) {
    CallCtx ctx;
    if (j.contains("sender")) ctx.sender = j["sender"].get<std::uint64_t>();
    if (j.contains("value")) ctx.value = j["value"].get<std::uint64_t>();
    if (j.contains("now")) ctx.now = j["now"].get<std::uint64_t>();
    if (j.contains("block")) ctx.block_number = j["block"].get<std::uint64_t>();
    return ctx;
}

int cmd_simulate(const std::string &file, const std::string &trace_path,
                 bool as_json) {
    std::optional<ContractModel> m = load_model(file, as_json);
    if (!m) return kExitUsage;

    bool ok = false;
    std::string trace_text = slurp(trace_path, ok);
    if (!ok) {
        std::cerr << "cannot read " << trace_path << "\n";
        return kExitUsage;
    }
    json jt = json::parse(trace_text, nullptr, false);
    if (jt.is_discarded() || !jt.contains("calls")) {
        std::cerr << "malformed trace file (want {deploy?, calls:[..]})\n";
        return kExitUsage;
    }

    CallCtx deploy;
    if (jt.contains("deploy")) deploy = json_to_ctx(jt["deploy"]);
    std::vector<TraceCall> calls;
    for (const auto &jc : jt["calls"]) {
        TraceCall c;
        c.name = jc.value("name", std::string{});
        c.ctx = json_to_ctx(jc);
        if (jc.contains("args"))
            for (const auto &ja : jc["args"]) {
                Value v;
                if (!json_to_value(ja, v)) {
                    std::cerr << "bad argument in trace: " << ja.dump() << "\n";
                    return kExitUsage;
                }
                c.args.push_back(std::move(v));
            }
        if (jc.contains("pay"))
            for (const auto &jp : jc["pay"]) c.outcomes.push_back(jp.get<bool>());
        calls.push_back(std::move(c));
    }

    Trace tr = run_trace(*m, deploy, calls);
    print_diags(tr.diagnostics, as_json);
    if (has_errors(tr.diagnostics)) return kExitViolated;

    if (as_json) {
        json j;
        j["final_state"] = tr.final_config.state;
        j["final_ledger"] = ledger_to_string(tr.final_config.ledger);
        json steps = json::array();
        for (const auto &s : tr.steps) {
            json js;
            js["call"] = s.call.name;
            js["verdict"] = fire_verdict_name(s.verdict);
            js["state"] = s.state_after;
            if (s.returned) js["returned"] = value_to_string(*s.returned);
            steps.push_back(std::move(js));
        }
        j["steps"] = std::move(steps);
        std::cout << j.dump(2) << "\n";
        return kExitOk;
    }

    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
        const TraceStep &s = tr.steps[i];
        std::cout << i + 1 << ": " << s.call.name << "(";
        for (std::size_t a = 0; a < s.call.args.size(); ++a) {
            if (a) std::cout << ", ";
            std::cout << value_to_string(s.call.args[a]);
        }
        std::cout << ") -> " << fire_verdict_name(s.verdict);
        if (s.returned) std::cout << " = " << value_to_string(*s.returned);
        std::cout << "  [state " << s.state_after << "]\n";
        for (const auto &ev : s.events) {
            std::cout << "   event " << ev.event << "(";
            for (std::size_t a = 0; a < ev.args.size(); ++a) {
                if (a) std::cout << ", ";
                std::cout << value_to_string(ev.args[a]);
            }
            std::cout << ")\n";
        }
    }
    std::cout << "final state: " << tr.final_config.state << "\n";
    std::cout << ledger_to_string(tr.final_config.ledger) << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ equiv

bool parse_domains(const std::vector<std::string> &specs, Domains &d) {
    auto split_list = [](const std::string &s) {
        std::vector<std::uint64_t> out;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= s.size(); ++i) {
            if (i == s.size() || s[i] == ':') {
                std::string tok = s.substr(start, i - start);
                if (!tok.empty()) out.push_back(std::stoull(tok, nullptr, 0));
                start = i + 1;
            }
        }
        return out;
    };
    for (const auto &spec : specs) {
        std::size_t start = 0;
        for (std::size_t i = 0; i <= spec.size(); ++i) {
            if (i != spec.size() && spec[i] != ',') continue;
            std::string kv = spec.substr(start, i - start);
            start = i + 1;
            if (kv.empty()) continue;
            std::size_t eq = kv.find('=');
            if (eq == std::string::npos) return false;
            std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
            if (k == "senders") d.senders = split_list(v);
            else if (k == "values") d.values = split_list(v);
            else if (k == "nows") d.nows = split_list(v);
            else if (k == "uints") d.uints = split_list(v);
            else if (k == "hashes") d.hashes = split_list(v);
            else if (k == "depth") d.depth = static_cast<int>(std::stoul(v));
            else if (k == "node_cap") d.node_cap = std::stoull(v);
            else if (k == "payment_failure") d.enumerate_payment_failure = v != "0";
            else return false;
        }
    }
    return true;
}

int cmd_equiv(const std::string &file, const std::vector<std::string> &domain,
              int depth, bool as_json) {
    std::optional<ContractModel> m = load_model(file, as_json);
    if (!m) return kExitUsage;

    Domains d;
    if (!parse_domains(domain, d)) {
        std::cerr << "bad --domain (want k=v,... with ':'-separated lists)\n";
        return kExitUsage;
    }
    if (depth > 0) d.depth = depth;

    Lts a = build_lts(*m, d);
    AugmentedModel am = augment_model(*m);
    Lts b = build_lts(am, d);
    BisimResult r = check_weak_bisim(a, b);

    if (as_json) {
        json j;
        j["equivalent"] = r.related;
        j["relation_size"] = r.relation_size;
        j["nodes_initial"] = a.nodes.size();
        j["nodes_augmented"] = b.nodes.size();
        j["beta_steps"] = b.beta_steps;
        if (r.witness) {
            j["witness"] = {{"initial", r.witness->side_a_state},
                            {"augmented", r.witness->side_b_state},
                            {"action", r.witness->action}};
        }
        std::cout << j.dump(2) << "\n";
    } else if (r.related) {
        std::cout << "VERIFIED-EQUIVALENT (relation size " << r.relation_size
                  << ", " << a.nodes.size() << " vs " << b.nodes.size()
                  << " explored configurations)\n";
    } else {
        std::cout << "NOT EQUIVALENT\n";
        if (r.witness)
            std::cout << "  at " << r.witness->side_a_state << " vs "
                      << r.witness->side_b_state << ": unit '"
                      << r.witness->action << "' cannot be matched\n";
    }
    return r.related ? kExitOk : kExitViolated;
}

// ------------------------------------------------------- augment / atoms

int cmd_augment(const std::string &file, bool as_json) {
    std::optional<ContractModel> m = load_model(file, as_json);
    if (!m) return kExitUsage;
    AugmentedModel am = augment_model(*m);
    print_diags(am.notes, as_json);
    std::cout << model_to_dsl(am.model) << "\n" << legend_table(legend(am));
    return kExitOk;
}

int cmd_atoms(const std::string &file, bool as_json) {
    std::optional<ContractModel> m = load_model(file, as_json);
    if (!m) return kExitUsage;
    std::cout << "transitions (initial model):\n";
    for (const auto &t : m->transitions)
        std::cout << "  " << t.name << "  " << t.from << " -> " << t.to << "\n";
    if (m->fallback_action) std::cout << "  fallback (every state)\n";
    AugmentedModel am = augment_model(*m);
    std::cout << "\naugmented edges:\n" << legend_table(legend(am));
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"verisol: transition-system contracts, verified and emitted"};
    app.require_subcommand(1);

    bool as_json = false;
    std::size_t state_cap = 0;
    app.add_flag("--json", as_json, "machine-readable output");
    app.add_option("--state-cap", state_cap,
                   "abstract state cap (or env VERISOL_STATE_CAP)");

    std::string file, trace_file, target, out_path, emit_kripke;
    std::vector<std::string> extra_props, domain;
    int jobs = 1, depth = 0;
    bool force_augment = false, emit_augmented = false, require_verified = false;

    CLI::App *verify = app.add_subcommand("verify", "check properties and deadlock");
    verify->add_option("file", file)->required();
    verify->add_option("--jobs", jobs, "parallel property checks");
    verify->add_flag("--augment", force_augment, "always build the augmented model");
    verify->add_flag("--emit-augmented", emit_augmented,
                     "print the augmented model and label legend");
    verify->add_option("--emit-kripke", emit_kripke,
                       "write <prefix>_{initial,augmented}.{json,smv}");
    verify->add_option("--property", extra_props,
                       "extra property text (repeatable)");

    CLI::App *generate = app.add_subcommand("generate", "emit code for a target");
    generate->add_option("file", file)->required();
    generate->add_option("--target", target, "solidity|bip|nusmv")->required();
    generate->add_option("-o,--out", out_path, "output path (default stdout)");
    generate->add_flag("--require-verified", require_verified,
                       "refuse when verification fails");

    CLI::App *simulate = app.add_subcommand("simulate", "run a call trace");
    simulate->add_option("file", file)->required();
    simulate->add_option("trace", trace_file, "JSON trace file")->required();

    CLI::App *augment = app.add_subcommand("augment", "print the augmented model");
    augment->add_option("file", file)->required();

    CLI::App *equiv = app.add_subcommand("equiv", "check the transformation");
    equiv->add_option("file", file)->required();
    equiv->add_option("--domain", domain, "k=v,... exploration domains");
    equiv->add_option("--depth", depth, "exploration depth");

    CLI::App *atoms = app.add_subcommand("atoms", "list referenceable atoms");
    atoms->add_option("file", file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(verify))
            return cmd_verify(file, as_json, state_cap, jobs, force_augment,
                              emit_augmented, emit_kripke, extra_props);
        if (app.got_subcommand(generate))
            return cmd_generate(file, target, out_path, require_verified,
                                as_json, state_cap);
        if (app.got_subcommand(simulate))
            return cmd_simulate(file, trace_file, as_json);
        if (app.got_subcommand(augment)) return cmd_augment(file, as_json);
        if (app.got_subcommand(equiv))
            return cmd_equiv(file, domain, depth, as_json);
        if (app.got_subcommand(atoms)) return cmd_atoms(file, as_json);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
