#include "decorr/evaluator.hpp"

#include "decorr/semantics.hpp"

namespace decorr {

Evaluator::Evaluator(const ObfProgram& program, TeeRuntime& tee)
    : program_(program), tee_(tee), labels_(program.label_index()) {}

TeeRuntime::Resolution Evaluator::resolve(uint64_t id, uint32_t width, StepContext& ctx) {
    TeeRuntime::Resolution r = tee_.resolve(id, width);
    if (ctx.trace) {
        ctx.trace->ids.push_back(id);
        ctx.trace->phys.insert(ctx.trace->phys.end(), r.phys.begin(), r.phys.end());
        ctx.trace->shuffles += r.shuffles;
    }
    return r;
}

int64_t Evaluator::read_value(const TeeRuntime::Resolution& r) {
    auto& mem = tee_.memory();
    if (r.phys.size() == 1) return mem[r.phys[0]] != 0 ? 1 : 0;
    uint32_t v = 0;
    for (size_t i = 0; i < r.phys.size(); ++i) v |= uint32_t(mem[r.phys[i]]) << (8 * i);
    return static_cast<int32_t>(v);
}

void Evaluator::write_value(const TeeRuntime::Resolution& r, int64_t value) {
    auto& mem = tee_.memory();
    if (r.phys.size() == 1) {
        mem[r.phys[0]] = value != 0 ? 1 : 0;
        return;
    }
    uint32_t v = static_cast<uint32_t>(value);
    for (size_t i = 0; i < r.phys.size(); ++i) mem[r.phys[i]] = uint8_t(v >> (8 * i));
}

bool Evaluator::eval_predicate(const ObfStatement& st, uint32_t line, StepContext& ctx) {
    auto last_res = resolve(st.pred_last, 4, ctx);
    int64_t last = read_value(last_res);
    if (!pred_line_admits(line, last)) return false;
    // the last-line word is updated before the value is consulted, so a false
    // predicate still stamps its line
    write_value(last_res, line);
    auto value_res = resolve(st.pred_value, 1, ctx);
    return read_value(value_res) != 0;
}

int64_t Evaluator::eval(const ObfExpr& e, StepContext& ctx) {
    switch (e.kind) {
    case ObfExpr::Kind::Ref: {
        auto r = resolve(e.ref, e.width, ctx);
        return read_value(r);
    }
    case ObfExpr::Kind::Unary:
        return eval_unop(e.un, eval(e.args[0], ctx));
    case ObfExpr::Kind::Binary: {
        int64_t a = eval(e.args[0], ctx);
        int64_t b = eval(e.args[1], ctx);
        return eval_binop(e.bin, a, b);
    }
    }
    return 0;
}

uint32_t Evaluator::execute(const ObfStatement& st, uint32_t ip, RunResult& result,
                            StepContext& ctx) {
    if (const auto* a = std::get_if<ObfAssign>(&st.inst)) {
        int64_t v = eval(a->value, ctx);
        auto dst = resolve(a->dst, a->width, ctx);
        write_value(dst, v);
        return ip + 1;
    }
    if (const auto* p = std::get_if<ObfPrint>(&st.inst)) {
        result.outputs.push_back({p->format, eval(p->value, ctx)});
        return ip + 1;
    }
    if (const auto* g = std::get_if<ObfGoto>(&st.inst)) {
        for (uint64_t id : g->resets_a) write_value(resolve(id, 4, ctx), -1);
        for (uint64_t id : g->resets_b) write_value(resolve(id, 4, ctx), -1);
        auto it = labels_.find(g->target);
        if (it == labels_.end()) throw ExecError("goto to unknown label '" + g->target + "'");
        return static_cast<uint32_t>(it->second);
    }
    eval(std::get<ObfEval>(st.inst).value, ctx);
    return ip + 1;
}

RunResult Evaluator::run(uint64_t fuel, TraceSink sink) {
    RunResult result;
    uint32_t ip = 0;
    while (ip < program_.statements.size()) {
        if (result.steps >= fuel) throw FuelExhausted("fuel exhausted after " +
                                                      std::to_string(result.steps) + " steps");
        const ObfStatement& st = program_.statements[ip];
        TraceStep trace;
        StepContext ctx;
        if (sink) {
            trace.step = result.steps;
            trace.stmt = ip;
            trace.op = program_.opcode_of(ip);
            ctx.trace = &trace;
        }
        ++result.steps;
        uint32_t next = ip + 1;
        bool exec = eval_predicate(st, ip, ctx);
        if (exec) next = execute(st, ip, result, ctx);
        if (sink) {
            trace.executed = exec;
            sink(trace);
        }
        ip = next;
    }
    return result;
}

} // namespace decorr
