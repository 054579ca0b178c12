#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "decorr/ast.hpp"
#include "decorr/obf_program.hpp"
#include "decorr/tee_runtime.hpp"

namespace decorr {

// One record per statement visit. Everything here is observable by an
// honest-but-curious adversary: the untrusted evaluator's state, the IDs in
// the read-only instruction section and the physical addresses it touches.
// Clear IDs, sk and provenance never appear.
struct TraceStep {
    uint64_t step = 0;
    uint32_t stmt = 0;
    std::string op;
    bool executed = false;
    std::vector<uint64_t> ids;   // obfuscated IDs resolved during this step
    std::vector<uint32_t> phys;  // physical byte addresses touched
    uint32_t shuffles = 0;       // shuffle events triggered during this step
};

using TraceSink = std::function<void(const TraceStep&)>;

struct RunResult {
    std::vector<OutputRecord> outputs;
    uint64_t steps = 0;
};

/// Untrusted interpreter: fetches statements from the read-only instruction
/// section and performs every data access through the trusted runtime.
class Evaluator {
public:
    Evaluator(const ObfProgram& program, TeeRuntime& tee);

    RunResult run(uint64_t fuel = 10'000'000, TraceSink sink = nullptr);

private:
    struct StepContext {
        TraceStep* trace = nullptr;
    };

    bool eval_predicate(const ObfStatement& st, uint32_t line, StepContext& ctx);
    // returns the next instruction pointer
    uint32_t execute(const ObfStatement& st, uint32_t ip, RunResult& result, StepContext& ctx);
    int64_t eval(const ObfExpr& e, StepContext& ctx);

    TeeRuntime::Resolution resolve(uint64_t id, uint32_t width, StepContext& ctx);
    int64_t read_value(const TeeRuntime::Resolution& r);
    void write_value(const TeeRuntime::Resolution& r, int64_t v);

    const ObfProgram& program_;
    TeeRuntime& tee_;
    std::map<std::string, size_t> labels_;
};

} // namespace decorr
