#ifndef VERISOL_INTERP_HPP
#define VERISOL_INTERP_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "verisol/model.hpp"
#include "verisol/values.hpp"

namespace verisol {

// ----------------------------------------------------------------- ledger

struct LogEntry {
    std::string event;
    std::vector<Value> args;
};

struct LedgerState {
    std::map<std::uint64_t, std::uint64_t> balances; // address -> wei
    std::map<std::string, Value> storage;            // contract variables
    std::vector<LogEntry> log;
    std::uint64_t now = 0;
    std::uint64_t block_number = 0;
};

bool ledger_equal(const LedgerState &a, const LedgerState &b);
std::uint64_t ledger_hash(const LedgerState &l);
std::string ledger_to_string(const LedgerState &l);

// ------------------------------------------------------------ environment

// Per-call context chosen by the external world.
struct CallCtx {
    std::uint64_t sender = 0;
    std::uint64_t value = 0;
    std::uint64_t now = 0;
    std::uint64_t block_number = 0;
};

// Oracle for everything outside the contract: callers, time, and whether an
// external account accepts a payment.
class ExternalEnvironment {
  public:
    virtual ~ExternalEnvironment() = default;
    // Does `target` accept a payment right now? Applies to transfer, send and
    // low-level call alike; transfer raises on refusal, the others return
    // false.
    virtual bool accepts_payment(std::uint64_t target, std::uint64_t amount) {
        (void)target;
        (void)amount;
        return true;
    }
};

class ScriptedEnvironment : public ExternalEnvironment {
  public:
    // Outcomes consumed in order; when exhausted, payments succeed.
    std::vector<bool> outcomes;
    std::size_t next = 0;
    bool accepts_payment(std::uint64_t, std::uint64_t) override {
        if (next < outcomes.size()) return outcomes[next++];
        return true;
    }
};

// ---------------------------------------------------------------- statuses

enum class StatusKind { Normal, Exception, Returned };

struct ExecStatus {
    StatusKind kind = StatusKind::Normal;
    std::optional<Value> returned; // engaged for `return e;`, empty for bare
    static ExecStatus normal() { return {}; }
    static ExecStatus exception() { return {StatusKind::Exception, {}}; }
    static ExecStatus returned_void() { return {StatusKind::Returned, {}}; }
    static ExecStatus returned_value(Value v) {
        return {StatusKind::Returned, std::move(v)};
    }
};

// ------------------------------------------------------- execution state

struct StructTable {
    const ContractModel *model = nullptr;
    const StructDef *find(const std::string &name) const {
        return model ? model->find_struct(name) : nullptr;
    }
};

// In-flight state of one transition: a working copy of the ledger plus the
// frame of parameters and declared locals. Nothing here is permanent until
// the transition ends with a normal status.
struct ExecState {
    LedgerState working;
    std::vector<std::map<std::string, Value>> frames;
    CallCtx ctx;
    std::uint64_t contract_address = 1;
    ExternalEnvironment *env = nullptr;
    const ContractModel *model = nullptr;
    long steps = 0;
    long step_limit = 200000;

    Value *find_local(const std::string &name);
    bool declare_local(const std::string &name, Value v);
    void push_frame() { frames.emplace_back(); }
    void pop_frame() { frames.pop_back(); }
};

Value zero_value(const Type &t, const StructTable &structs);

struct EvalResult {
    ExecStatus status;
    Value value;
};

EvalResult eval_expr(const Expr &e, ExecState &st);
ExecStatus exec_stmt(const Stmt &s, ExecState &st);

// ------------------------------------------------------------------ fire

enum class FireVerdict {
    Transition,    // guard true, action normal
    TransitionRet, // as above, action returned a value
    WrongState,    // named transition exists, source state differs
    GuardFalse,    // guard evaluated to false
    GuardException,
    ActionException, // full revert
    Fallback,        // unknown name, fallback ran (or no-op without one)
    FallbackException,
    BadCall, // arity/argument mismatch or unpayable caller balance
};

std::string fire_verdict_name(FireVerdict v);

struct ContractConfig {
    std::string state;
    LedgerState ledger;
};

struct FireResult {
    FireVerdict verdict = FireVerdict::Fallback;
    std::optional<Value> returned;
    std::vector<LogEntry> events; // appended by this call, if committed
};

// Applies exactly one transition rule and commits or discards accordingly.
FireResult fire_transition(const ContractModel &m, ContractConfig &cfg,
                           const std::string &name,
                           const std::vector<Value> &args, const CallCtx &ctx,
                           ExternalEnvironment &env);

// ------------------------------------------------------------------ trace

struct TraceCall {
    std::string name;
    std::vector<Value> args;
    CallCtx ctx;
    std::vector<bool> outcomes; // payment acceptance script for this call
};

struct TraceStep {
    TraceCall call;
    FireVerdict verdict;
    std::optional<Value> returned;
    std::string state_after;
    std::uint64_t ledger_hash_after = 0;
    std::vector<LogEntry> events;
};

struct Trace {
    CallCtx deploy;
    std::vector<TraceStep> steps;
    ContractConfig final_config;
    std::vector<Diagnostic> diagnostics;
};

// Deploys (zero storage, creationTime := now, constructor action) and then
// fires each call in order.
Trace run_trace(const ContractModel &m, const CallCtx &deploy,
                const std::vector<TraceCall> &calls);

// Deploy without any calls: settles creationTime and the constructor action.
ContractConfig deploy_contract(const ContractModel &m, const CallCtx &deploy,
                               ExternalEnvironment &env,
                               FireVerdict *verdict = nullptr);

std::uint64_t builtin_hash(const std::vector<Value> &args);

} // namespace verisol

#endif
