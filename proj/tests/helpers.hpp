#ifndef VERISOL_TEST_HELPERS_HPP
#define VERISOL_TEST_HELPERS_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"
#include "verisol/abstraction.hpp"
#include "verisol/checker.hpp"
#include "verisol/equivalence.hpp"
#include "verisol/interp.hpp"
#include "verisol/parser.hpp"
#include "verisol/transform.hpp"

namespace vt {

using namespace verisol;

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture_path(const std::string &name) {
    return std::string(FIXTURES_DIR) + "/" + name;
}

inline std::string golden_path(const std::string &name) {
    return std::string(GOLDENS_DIR) + "/" + name;
}

// Parse + validate a fixture; throws on any error diagnostic so a broken
// fixture fails loudly instead of cascading.
inline ContractModel load_fixture(const std::string &name) {
    auto pr = parse_contract(read_file(fixture_path(name)));
    for (const auto &d : pr.diagnostics)
        if (d.severity == Severity::Error)
            throw std::runtime_error(name + ": " + d.message);
    if (!pr.model) throw std::runtime_error(name + ": no model");
    auto diags = validate(*pr.model);
    for (const auto &d : diags)
        if (d.severity == Severity::Error)
            throw std::runtime_error(name + ": " + d.message);
    return std::move(*pr.model);
}

inline Value u64(std::uint64_t v) { return Value{IntVal{v, false}}; }
inline Value i64(std::int64_t v) {
    return Value{IntVal{static_cast<std::uint64_t>(v), true}};
}
inline Value addr(std::uint64_t v) { return Value{AddressVal{v}}; }
inline Value b32(std::uint64_t v) { return Value{Bytes32Val{v}}; }
inline Value bv(bool v) { return Value{BoolVal{v}}; }

// ------------------------------------------------------------------- CLI

struct CliResult {
    int code = -1;
    std::string out; // stdout and stderr interleaved
};

inline CliResult run_cli(const std::string &args) {
    std::string cmd = std::string(VERISOL_BIN) + " " + args + " 2>&1";
    FILE *p = popen(cmd.c_str(), "r");
    if (!p) throw std::runtime_error("popen failed: " + cmd);
    CliResult r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

// ------------------------------------------------------------- alias table

// Quoted case-study properties use transition numbers from write-ups whose
// diagrams we cannot reproduce edge-for-edge; fixtures/aliases.json maps
// those numbers onto the labels this tool assigns deterministically.
inline std::map<std::string, std::string> load_aliases(const std::string &contract) {
    auto j = nlohmann::json::parse(read_file(fixture_path("aliases.json")));
    std::map<std::string, std::string> m;
    if (j.contains(contract))
        for (auto &[k, v] : j[contract].items())
            m[k] = std::to_string(v.get<int>());
    return m;
}

inline std::string translate_numbers(const std::string &text,
                                     const std::map<std::string, std::string> &am) {
    static const std::regex num("\\b[0-9]+\\b");
    std::string out;
    auto begin = std::sregex_iterator(text.begin(), text.end(), num);
    auto end = std::sregex_iterator();
    std::size_t last = 0;
    for (auto it = begin; it != end; ++it) {
        out += text.substr(last, it->position() - last);
        auto f = am.find(it->str());
        out += f == am.end() ? it->str() : f->second;
        last = it->position() + it->length();
    }
    out += text.substr(last);
    return out;
}

// --------------------------------------------------- random structures

// Small arbitrary Kripke structure for cross-checking the two CTL engines.
// Every state gets at least one successor; edge labels agree with the
// target's last_label, matching what build_kripke produces.
inline Kripke random_kripke(std::mt19937 &rng, int max_states = 10,
                            int n_labels = 3) {
    std::uniform_int_distribution<int> nstates(1, max_states);
    int n = nstates(rng);
    std::uniform_int_distribution<int> lab(1, n_labels);
    std::uniform_int_distribution<int> tgt(0, n - 1);
    std::uniform_int_distribution<int> deg(0, 3);

    Kripke ks;
    ks.control_names = {"c"};
    for (int i = 0; i < n; ++i) {
        KripkeState s;
        s.control = 0;
        s.last_label = i == 0 ? 0 : lab(rng);
        ks.states.push_back(s);
    }
    ks.succ.resize(n);
    for (int i = 0; i < n; ++i) {
        int d = deg(rng);
        for (int k = 0; k < d; ++k) {
            int to = tgt(rng);
            ks.edges.push_back({i, to, ks.states[to].last_label});
            ks.succ[i].push_back(static_cast<int>(ks.edges.size()) - 1);
        }
        if (ks.succ[i].empty()) {
            ks.edges.push_back({i, i, ks.states[i].last_label});
            ks.succ[i].push_back(static_cast<int>(ks.edges.size()) - 1);
        }
    }
    ks.initial = 0;
    for (int l = 1; l <= n_labels; ++l)
        ks.label_names[l] = "t" + std::to_string(l);
    return ks;
}

inline CtlPtr random_ctl(std::mt19937 &rng, int depth, int n_atoms = 3) {
    std::uniform_int_distribution<int> pick(0, 9);
    std::uniform_int_distribution<int> atom(0, n_atoms - 1);
    if (depth == 0 || pick(rng) < 2) {
        if (pick(rng) == 0) return ctl_const(pick(rng) % 2 == 0);
        return ctl_atom("a" + std::to_string(atom(rng)));
    }
    int k = pick(rng);
    if (k < 6) {
        static const CtlUnary uops[] = {CtlUnary::Not, CtlUnary::EX,
                                        CtlUnary::AX,  CtlUnary::EF,
                                        CtlUnary::AF,  CtlUnary::EG,
                                        CtlUnary::AG};
        std::uniform_int_distribution<int> u(0, 6);
        return ctl_un(uops[u(rng)], random_ctl(rng, depth - 1, n_atoms));
    }
    static const CtlBinary bops[] = {CtlBinary::And, CtlBinary::Or,
                                     CtlBinary::Implies, CtlBinary::EU,
                                     CtlBinary::AU,  CtlBinary::EW,
                                     CtlBinary::AW};
    std::uniform_int_distribution<int> b(0, 6);
    return ctl_bin(bops[b(rng)], random_ctl(rng, depth - 1, n_atoms),
                   random_ctl(rng, depth - 1, n_atoms));
}

// Atom map assigning each placeholder atom a random subset of labels.
inline AtomMap random_atoms(std::mt19937 &rng, int n_atoms, int n_labels) {
    AtomMap am;
    std::uniform_int_distribution<int> coin(0, 1);
    for (int a = 0; a < n_atoms; ++a) {
        std::set<int> labs;
        for (int l = 1; l <= n_labels; ++l)
            if (coin(rng)) labs.insert(l);
        am.labels["a" + std::to_string(a)] = labs;
    }
    return am;
}

} // namespace vt

#endif
