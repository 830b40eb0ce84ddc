#ifndef VERISOL_EQUIVALENCE_HPP
#define VERISOL_EQUIVALENCE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "verisol/interp.hpp"
#include "verisol/transform.hpp"

namespace verisol {

// Finite pools the explorer draws calls from.
struct Domains {
    std::vector<std::uint64_t> senders{0x0A};
    std::vector<std::uint64_t> values{0, 1};
    std::vector<std::uint64_t> nows{0};
    std::vector<std::uint64_t> uints{0, 1};
    std::vector<std::uint64_t> hashes{0x11};
    std::vector<std::vector<std::uint64_t>> uint_arrays{{1}};
    std::vector<std::vector<std::uint64_t>> hash_arrays{{0x11}};
    bool enumerate_payment_failure = true;
    int depth = 5;
    std::size_t node_cap = 200000;
};

// Observable unit: one whole function execution.
enum class UnitKind { Fin, Rev };

struct UnitLabel {
    std::string origin; // transition name or "fallback"
    UnitKind kind = UnitKind::Fin;
    std::optional<Value> returned;
    bool operator<(const UnitLabel &o) const;
    bool operator==(const UnitLabel &o) const;
    std::string display() const;
};

struct LtsEdge {
    int from = 0;
    int to = 0;
    UnitLabel unit;
    bool alpha = true;                   // units always end in their alpha
    std::vector<std::string> path;       // augmented edge names walked
    std::vector<std::string> path_kinds; // "beta"/"alpha" per element
};

struct LtsNode {
    std::string control;
    LedgerState ledger;
    bool horizon = false; // beyond the exploration depth; not expanded
};

struct Lts {
    std::vector<LtsNode> nodes;
    std::vector<LtsEdge> edges;
    std::vector<std::vector<int>> out; // node -> edge indices
    int initial = 0;
    std::size_t beta_steps = 0; // internal steps walked while building
};

// Explore the initial model: every call is a single alpha unit.
Lts build_lts(const ContractModel &m, const Domains &d);
// Explore the augmented model: every call is a beta* alpha path.
Lts build_lts(const AugmentedModel &am, const Domains &d);

struct BisimWitness {
    std::string side_a_state;
    std::string side_b_state;
    std::string action; // unit label display that failed to match
};

struct BisimResult {
    bool related = false;
    std::size_t relation_size = 0;
    std::optional<BisimWitness> witness;
    std::vector<std::pair<int, int>> relation; // surviving pairs
};

// Greatest relation closed under matching whole-function units in both
// directions, seeded by committed-ledger equality; the initial pair must
// survive. Units from horizon nodes impose no requirements.
BisimResult check_weak_bisim(const Lts &a, const Lts &b);

} // namespace verisol

#endif
