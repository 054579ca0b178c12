#include "decorr/interp.hpp"

#include <map>
#include <string>

#include "decorr/semantics.hpp"

namespace decorr {

namespace {

struct PredState {
    int64_t last_line = -1;
};

// Keyed by the predicate's identity within one program.
std::string pred_key(const PredRef& p) {
    switch (p.kind) {
    case PredRef::Kind::TrueConst: return "#true";
    case PredRef::Kind::FalseConst: return "#false";
    case PredRef::Kind::Var: return "v:" + p.var;
    case PredRef::Kind::Junk: return "j:" + std::to_string(p.junk_slot);
    }
    return "?";
}

class Machine {
public:
    explicit Machine(const Program& p) : p_(p) {
        for (const auto& d : p.decls) vars_[d.name] = 0;
        for (size_t i = 0; i < p.statements.size(); ++i)
            if (p.statements[i].label) labels_[*p.statements[i].label] = i;
    }

    InterpResult run(uint64_t fuel) {
        InterpResult result;
        size_t ip = 0;
        while (ip < p_.statements.size()) {
            if (result.steps >= fuel) throw FuelExhausted("fuel exhausted");
            ++result.steps;
            const Statement& s = p_.statements[ip];
            bool jumped = false;
            if (eval_predicate(s.predicate, static_cast<int64_t>(ip)))
                jumped = execute(s, ip, result);
            if (!jumped) ++ip;
        }
        return result;
    }

private:
    bool eval_predicate(const PredRef& pred, int64_t line) {
        PredState& st = preds_[pred_key(pred)];
        if (!pred_line_admits(line, st.last_line)) return false;
        st.last_line = line;
        return pred_value(pred);
    }

    bool pred_value(const PredRef& pred) {
        switch (pred.kind) {
        case PredRef::Kind::TrueConst: return true;
        case PredRef::Kind::FalseConst: return false;
        case PredRef::Kind::Var: return vars_.at(pred.var) != 0;
        case PredRef::Kind::Junk: return pred.junk_init;
        }
        return false;
    }

    // returns true when control transferred
    bool execute(const Statement& s, size_t& ip, InterpResult& result) {
        if (const auto* a = std::get_if<AssignInst>(&s.inst)) {
            int64_t v = eval(a->value);
            auto* d = p_.find_decl(a->target);
            vars_[a->target] = d && d->type == Type::Bool ? (v != 0 ? 1 : 0) : wrap32(v);
            return false;
        }
        if (const auto* pr = std::get_if<PrintInst>(&s.inst)) {
            result.outputs.push_back({pr->format, eval(pr->value)});
            return false;
        }
        if (const auto* g = std::get_if<GotoInst>(&s.inst)) {
            for (const auto& r : g->resets_a) preds_[pred_key(r)].last_line = -1;
            for (const auto& r : g->resets_b) preds_[pred_key(r)].last_line = -1;
            auto it = labels_.find(g->target);
            if (it == labels_.end()) throw ExecError("goto to unknown label '" + g->target + "'");
            ip = it->second;
            return true;
        }
        eval(std::get<EvalInst>(s.inst).value);
        return false;
    }

    int64_t eval(const Expr& e) {
        switch (e.kind) {
        case Expr::Kind::IntLit: return wrap32(e.int_value);
        case Expr::Kind::BoolLit: return e.bool_value ? 1 : 0;
        case Expr::Kind::Var: return vars_.at(e.var);
        case Expr::Kind::Unary: return eval_unop(e.un, eval(e.args[0]));
        case Expr::Kind::Binary: {
            int64_t a = eval(e.args[0]);
            int64_t b = eval(e.args[1]);
            return eval_binop(e.bin, a, b);
        }
        }
        return 0;
    }

    const Program& p_;
    std::map<std::string, int64_t> vars_;
    std::map<std::string, PredState> preds_;
    std::map<std::string, size_t> labels_;
};

} // namespace

InterpResult interpret(const Program& p, uint64_t fuel) {
    return Machine(p).run(fuel);
}

} // namespace decorr
