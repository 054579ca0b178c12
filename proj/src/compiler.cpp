#include "decorr/compiler.hpp"

#include <algorithm>
#include <cassert>
#include <deque>

#include "decorr/frontend.hpp"

namespace decorr {

std::map<std::string, int> opcode_histogram(const Program& p) {
    std::map<std::string, int> counts;
    for (const auto& s : p.statements) ++counts[opcode_kind(s)];
    return counts;
}

std::vector<std::string> default_alphabet(const std::vector<Program>& programs) {
    std::set<std::string> kinds;
    for (const auto& p : programs)
        for (const auto& s : p.statements) kinds.insert(opcode_kind(s));
    return {kinds.begin(), kinds.end()};
}

// ---- junk generation --------------------------------------------------------

namespace {

constexpr int kJunkTrueSlots = 2; // slots 0..1 always-true, slot 2 always-false

struct JunkFactory {
    Program& prog;
    Rng rng;
    int label_counter = 0;
    int print_counter = 0;
    std::vector<std::string> int_vars;
    std::vector<std::string> bool_vars;

    JunkFactory(Program& p, uint64_t seed) : prog(p), rng(seed) {
        std::set<std::string> names;
        for (const auto& d : prog.decls) names.insert(d.name);
        auto fresh = [&](const char* base, int i) {
            std::string n = std::string(base) + std::to_string(i);
            while (names.count(n)) n += "_";
            names.insert(n);
            return n;
        };
        for (int i = 0; i < 2; ++i) {
            int_vars.push_back(fresh("__jnk_i", i));
            prog.decls.push_back(Declaration{int_vars.back(), Type::Int, {}});
            bool_vars.push_back(fresh("__jnk_b", i));
            prog.decls.push_back(Declaration{bool_vars.back(), Type::Bool, {}});
        }
    }

    Expr int_operand() {
        static const int64_t consts[] = {1, 2, 3, 5, 7, 9, 13};
        if (rng.chance(0.5)) return Expr::variable(int_vars[rng.below(int_vars.size())]);
        return Expr::int_lit(consts[rng.below(std::size(consts))]);
    }

    Expr bool_operand() {
        if (rng.chance(0.7)) return Expr::variable(bool_vars[rng.below(bool_vars.size())]);
        return Expr::bool_lit(rng.chance(0.5));
    }

    PredRef exec_pred() { return PredRef::junk(static_cast<int>(rng.below(kJunkTrueSlots)), true); }
    PredRef skip_pred() { return PredRef::junk(kJunkTrueSlots, false); }

    Statement make(const std::string& kind) {
        Statement s;
        s.is_junk = true;
        s.predicate = exec_pred();
        const std::string& idst = int_vars[rng.below(int_vars.size())];
        const std::string& bdst = bool_vars[rng.below(bool_vars.size())];
        auto bin = [&](BinOp op, Expr a, Expr b) {
            s.inst = AssignInst{idst, Expr::binary(op, std::move(a), std::move(b))};
        };
        auto bbin = [&](BinOp op, Expr a, Expr b) {
            s.inst = AssignInst{bdst, Expr::binary(op, std::move(a), std::move(b))};
        };
        if (kind == "mov") {
            if (rng.chance(0.5))
                s.inst = AssignInst{idst, int_operand()};
            else
                s.inst = AssignInst{bdst, bool_operand()};
        } else if (kind == "add") {
            bin(BinOp::Add, int_operand(), int_operand());
        } else if (kind == "sub") {
            bin(BinOp::Sub, int_operand(), int_operand());
        } else if (kind == "mul") {
            bin(BinOp::Mul, int_operand(), int_operand());
        } else if (kind == "div") {
            bin(BinOp::Div, int_operand(), Expr::int_lit(7)); // nonzero divisor
        } else if (kind == "mod") {
            bin(BinOp::Mod, int_operand(), Expr::int_lit(13));
        } else if (kind == "neg") {
            s.inst = AssignInst{idst, Expr::unary(UnOp::Neg, int_operand())};
        } else if (kind == "not") {
            s.inst = AssignInst{bdst, Expr::unary(UnOp::Not, bool_operand())};
        } else if (kind == "and") {
            bbin(BinOp::And, bool_operand(), bool_operand());
        } else if (kind == "or") {
            bbin(BinOp::Or, bool_operand(), bool_operand());
        } else if (kind == "lt") {
            bbin(BinOp::Lt, int_operand(), int_operand());
        } else if (kind == "le") {
            bbin(BinOp::Le, int_operand(), int_operand());
        } else if (kind == "gt") {
            bbin(BinOp::Gt, int_operand(), int_operand());
        } else if (kind == "ge") {
            bbin(BinOp::Ge, int_operand(), int_operand());
        } else if (kind == "eq") {
            bbin(BinOp::Eq, int_operand(), int_operand());
        } else if (kind == "ne") {
            bbin(BinOp::Ne, int_operand(), int_operand());
        } else if (kind == "print") {
            // output-bearing junk must never execute
            s.predicate = skip_pred();
            s.inst = PrintInst{"j" + std::to_string(print_counter++),
                               Expr::variable(int_vars[rng.below(int_vars.size())])};
        } else if (kind == "goto") {
            // flow-bearing junk must never execute; it targets its own label
            s.predicate = skip_pred();
            std::string label = fresh_label();
            s.label = label;
            GotoInst g;
            g.target = label;
            g.resets_a.push_back(exec_pred());
            s.inst = std::move(g);
        } else {
            throw CompileError("uniformize: no junk recipe for opcode '" + kind + "'");
        }
        return s;
    }

    std::string fresh_label() {
        std::set<std::string> labels;
        for (const auto& s : prog.statements)
            if (s.label) labels.insert(*s.label);
        for (;;) {
            std::string l = "__jl" + std::to_string(label_counter++);
            if (!labels.count(l)) return l;
        }
    }
};

} // namespace

std::vector<Program> uniformize(const std::vector<Program>& programs,
                                const std::vector<std::string>& alphabet,
                                uint64_t junk_seed) {
    if (alphabet.empty()) throw CompileError("uniformize: empty opcode alphabet");
    std::set<std::string> allowed(alphabet.begin(), alphabet.end());
    int target = 0;
    for (const auto& p : programs) {
        for (const auto& [kind, count] : opcode_histogram(p)) {
            if (!allowed.count(kind))
                throw CompileError("uniformize: opcode '" + kind + "' of program '" + p.name +
                                   "' is not in the alphabet");
            target = std::max(target, count);
        }
    }
    if (target == 0) target = 1; // empty programs still get one of each kind

    std::vector<Program> out;
    out.reserve(programs.size());
    for (size_t pi = 0; pi < programs.size(); ++pi) {
        Program p = programs[pi];
        auto counts = opcode_histogram(p);
        JunkFactory factory(p, mix_seed(junk_seed, pi + 1));
        std::vector<Statement> junk;
        for (const auto& kind : alphabet)
            for (int i = counts[kind]; i < target; ++i) junk.push_back(factory.make(kind));
        factory.rng.shuffle(junk);
        for (auto& s : junk) {
            size_t pos = factory.rng.below(p.statements.size() + 1);
            p.statements.insert(p.statements.begin() + static_cast<long>(pos), std::move(s));
        }
        out.push_back(std::move(p));
    }
    return out;
}

Program make_junk_program(const std::string& name, size_t size,
                          const std::vector<std::string>& alphabet, uint64_t seed) {
    if (alphabet.empty()) throw CompileError("junk program: empty opcode alphabet");
    Program p;
    p.name = name;
    JunkFactory factory(p, seed);
    for (size_t i = 0; i < size; ++i)
        p.statements.push_back(factory.make(alphabet[factory.rng.below(alphabet.size())]));
    return p;
}

// ---- interleaving -----------------------------------------------------------

Interleaved interleave(const std::vector<Program>& programs, uint64_t seed) {
    if (programs.empty()) throw CompileError("interleave: no input programs");
    Rng rng(mix_seed(seed, 0x171eau));
    std::vector<std::deque<const Statement*>> remaining(programs.size());
    uint64_t total = 0;
    for (size_t i = 0; i < programs.size(); ++i) {
        for (const auto& s : programs[i].statements) remaining[i].push_back(&s);
        total += programs[i].statements.size();
    }
    Interleaved merged;
    merged.statements.reserve(total);
    while (total > 0) {
        uint64_t r = rng.below(total);
        size_t pick = 0;
        uint64_t cum = 0;
        for (size_t i = 0; i < remaining.size(); ++i) {
            cum += remaining[i].size();
            if (r < cum) {
                pick = i;
                break;
            }
        }
        const Statement* s = remaining[pick].front();
        remaining[pick].pop_front();
        merged.statements.push_back(MergedStatement{pick, *s});
        merged.origin.push_back(s->is_junk ? ProvenanceMap::kJunk : programs[pick].name);
        --total;
    }
    return merged;
}

// ---- F ------------------------------------------------------------------

IdMiner::IdMiner(uint64_t sk, uint64_t id_bound, uint64_t seed)
    : sk_(sk), id_bound_(id_bound), rng_(mix_seed(seed, 0xf00du)) {
    if (id_bound_ <= sk_) throw CompileError("id miner: id_bound must exceed sk");
}

uint64_t IdMiner::capacity_of(uint32_t clear_id) const {
    if (clear_id >= sk_ || clear_id >= id_bound_) return 0;
    // members x + k*sk for k >= 1 below id_bound; the key itself is excluded
    uint64_t kmax = (id_bound_ - 1 - clear_id) / sk_;
    if (clear_id == 0 && kmax >= 1) --kmax;
    return kmax;
}

uint64_t IdMiner::mine(uint32_t clear_id) {
    if (clear_id >= sk_)
        throw CompileError("id miner: clear id " + std::to_string(clear_id) +
                           " not below sk " + std::to_string(sk_));
    uint64_t capacity = capacity_of(clear_id);
    uint64_t& taken = class_used_[clear_id];
    if (taken >= capacity)
        throw CompileError("id miner: congruence class of clear id " + std::to_string(clear_id) +
                           " exhausted within id bound " + std::to_string(id_bound_));
    uint64_t kmax = (id_bound_ - 1 - clear_id) / sk_;
    for (int attempt = 0; attempt < 64; ++attempt) {
        uint64_t k = rng_.between(1, kmax);
        uint64_t r = clear_id + k * sk_;
        if (r == sk_) continue; // never emit the key itself
        if (used_.insert(r).second) {
            ++taken;
            return r;
        }
    }
    // dense class: enumerate the free members and pick one uniformly
    std::vector<uint64_t> free_members;
    for (uint64_t k = 1; k <= kmax; ++k) {
        uint64_t r = clear_id + k * sk_;
        if (r != sk_ && !used_.count(r)) free_members.push_back(r);
    }
    assert(!free_members.empty());
    uint64_t r = free_members[rng_.below(free_members.size())];
    used_.insert(r);
    ++taken;
    return r;
}

// ---- compile ----------------------------------------------------------------

namespace {

uint8_t width_of_type(Type t) {
    return t == Type::Bool ? 1 : 4;
}

class Lowering {
public:
    Lowering(const std::vector<Program>& programs, const FlatLayout& layout, IdMiner& miner,
             ProvenanceMap& prov)
        : programs_(programs), layout_(layout), miner_(miner), prov_(prov) {}

    ObfStatement lower(const MergedStatement& ms,
                       const std::map<std::pair<size_t, std::string>, std::string>& label_map) {
        const Program& prog = programs_[ms.program];
        const Statement& s = ms.stmt;
        ObfStatement out;
        out.pred_value = mint(pred_value_label(prog.name, s.predicate));
        out.pred_last = mint(pred_last_label(prog.name, s.predicate));
        if (const auto* a = std::get_if<AssignInst>(&s.inst)) {
            ObfAssign oa;
            const Declaration* d = prog.find_decl(a->target);
            assert(d);
            oa.width = width_of_type(d->type);
            oa.dst = mint(var_label(prog.name, a->target));
            oa.value = lower_expr(prog, a->value);
            out.inst = std::move(oa);
        } else if (const auto* pr = std::get_if<PrintInst>(&s.inst)) {
            out.inst = ObfPrint{pr->format, lower_expr(prog, pr->value)};
        } else if (const auto* g = std::get_if<GotoInst>(&s.inst)) {
            ObfGoto og;
            og.target = label_map.at({ms.program, g->target});
            for (const auto& r : g->resets_a)
                og.resets_a.push_back(mint(pred_last_label(prog.name, r)));
            for (const auto& r : g->resets_b)
                og.resets_b.push_back(mint(pred_last_label(prog.name, r)));
            out.inst = std::move(og);
        } else {
            out.inst = ObfEval{lower_expr(prog, std::get<EvalInst>(s.inst).value)};
        }
        return out;
    }

private:
    ObfExpr lower_expr(const Program& prog, const Expr& e) {
        switch (e.kind) {
        case Expr::Kind::IntLit:
            return ObfExpr::reference(mint(const_int_label(e.int_value)), 4);
        case Expr::Kind::BoolLit:
            return ObfExpr::reference(mint(const_bool_label(e.bool_value)), 1);
        case Expr::Kind::Var: {
            const Declaration* d = prog.find_decl(e.var);
            assert(d);
            return ObfExpr::reference(mint(var_label(prog.name, e.var)), width_of_type(d->type));
        }
        case Expr::Kind::Unary:
            return ObfExpr::unary(e.un, lower_expr(prog, e.args[0]));
        case Expr::Kind::Binary:
            return ObfExpr::binary(e.bin, lower_expr(prog, e.args[0]),
                                   lower_expr(prog, e.args[1]));
        }
        throw CompileError("unreachable expression kind");
    }

    uint64_t mint(const std::string& label) {
        uint32_t clear = layout_.clear_id_of(label);
        uint64_t id = miner_.mine(clear);
        prov_.id_to_clear[id] = clear;
        return id;
    }

    const std::vector<Program>& programs_;
    const FlatLayout& layout_;
    IdMiner& miner_;
    ProvenanceMap& prov_;
};

} // namespace

CompileResult compile(const std::vector<Program>& programs, const CompileConfig& config) {
    if (programs.empty()) throw CompileError("compile: no input programs");
    uint64_t original_size = 0;
    for (const auto& p : programs) {
        auto diags = validate(p);
        if (!diags.empty())
            throw CompileError("compile: program '" + p.name +
                               "' is invalid: " + format_diagnostic(p.name, diags.front()));
        original_size += p.statements.size();
    }

    std::vector<Program> effective = programs;
    bool junk_enabled = config.uniformize && config.junk_ratio > 0;
    if (junk_enabled) {
        auto alphabet = default_alphabet(programs);
        size_t mean = std::max<size_t>(1, original_size / programs.size());
        for (int i = 0; i < config.junk_programs; ++i)
            effective.push_back(make_junk_program("junk" + std::to_string(i), mean, alphabet,
                                                  mix_seed(config.junk_seed, 0xdead + i)));
        effective = uniformize(effective, alphabet, config.junk_seed);
        uint64_t merged_size = 0;
        for (const auto& p : effective) merged_size += p.statements.size();
        if (static_cast<double>(merged_size) >
            config.junk_ratio * static_cast<double>(original_size))
            throw CompileError("compile: uniformization exceeds the configured junk ratio");
    }

    FlatLayout layout =
        build_layout(effective, LayoutConfig{mix_seed(config.seed, 0x1a9u), config.max_data_size});

    Rng key_rng(mix_seed(config.seed, 0x5ecu));
    uint64_t t = layout.total_size;
    uint64_t lo = std::max<uint64_t>(static_cast<uint64_t>(config.alpha) * t, t + 1);
    uint64_t hi = static_cast<uint64_t>(config.beta) * t;
    if (lo > hi) throw CompileError("compile: empty sk range; raise beta or shrink the programs");
    KeyMaterial key;
    key.sk = key_rng.between(lo, hi);
    key.alpha = config.alpha;
    key.beta = config.beta;
    key.id_bound = config.id_bound;
    key.perm_seed = config.perm_seed;
    key.counter_bits = config.counter_bits;
    key.page_bits = config.page_bits;
    key.shuffle_period =
        config.shuffle_period ? config.shuffle_period : static_cast<uint64_t>(programs.size());
    key.flat_size = layout.total_size;
    key.check();

    Interleaved merged = interleave(effective, mix_seed(config.seed, 0x371u));

    // labels are renamed to their merged position; goto targets follow
    std::map<std::pair<size_t, std::string>, std::string> label_map;
    for (size_t i = 0; i < merged.statements.size(); ++i) {
        auto& ms = merged.statements[i];
        if (ms.stmt.label) {
            std::string fresh = "L" + std::to_string(i);
            label_map[{ms.program, *ms.stmt.label}] = fresh;
        }
    }

    IdMiner miner(key.sk, key.id_bound, mix_seed(config.seed, 0x9e5u));
    CompileResult result;
    result.key = key;
    result.layout = layout;
    result.provenance.stmt_origin = merged.origin;
    result.program.page_bits = config.page_bits;

    Lowering lowering(effective, layout, miner, result.provenance);
    for (size_t i = 0; i < merged.statements.size(); ++i) {
        ObfStatement st = lowering.lower(merged.statements[i], label_map);
        if (merged.statements[i].stmt.label)
            st.label = label_map.at({merged.statements[i].program, *merged.statements[i].stmt.label});
        result.program.statements.push_back(std::move(st));
    }

    result.image = layout.initial_image();
    return result;
}

} // namespace decorr
