#include "decorr/layout.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "decorr/rng.hpp"

namespace decorr {

std::string_view to_string(EntryKind k) {
    switch (k) {
    case EntryKind::Var: return "var";
    case EntryKind::Const: return "const";
    case EntryKind::PredState: return "predicate-state";
    }
    return "?";
}

static EntryKind entry_kind_from(std::string_view s) {
    if (s == "var") return EntryKind::Var;
    if (s == "const") return EntryKind::Const;
    return EntryKind::PredState;
}

std::string var_label(const std::string& prog, const std::string& name) {
    return prog + ".var." + name;
}

std::string const_int_label(int64_t value) {
    return "const.int." + std::to_string(value);
}

std::string const_bool_label(bool value) {
    return value ? "const.bool.1" : "const.bool.0";
}

static std::string pred_stem(const std::string& prog, const PredRef& pred) {
    switch (pred.kind) {
    case PredRef::Kind::TrueConst: return prog + ".pred.true";
    case PredRef::Kind::FalseConst: return prog + ".pred.false";
    case PredRef::Kind::Var: return prog + ".pred." + pred.var;
    case PredRef::Kind::Junk: return prog + ".junk.pred." + std::to_string(pred.junk_slot);
    }
    return prog + ".pred.?";
}

std::string pred_value_label(const std::string& prog, const PredRef& pred) {
    // A boolean variable used as a predicate reads the variable's own byte.
    if (pred.kind == PredRef::Kind::Var) return var_label(prog, pred.var);
    return pred_stem(prog, pred) + ".value";
}

std::string pred_last_label(const std::string& prog, const PredRef& pred) {
    return pred_stem(prog, pred) + ".last";
}

bool FlatLayout::has(std::string_view label) const {
    for (const auto& e : entries)
        if (e.label == label) return true;
    return false;
}

const LayoutEntry& FlatLayout::entry_of(std::string_view label) const {
    for (const auto& e : entries)
        if (e.label == label) return e;
    throw MemoryError("unknown layout label '" + std::string(label) + "'");
}

uint32_t FlatLayout::clear_id_of(std::string_view label) const {
    return entry_of(label).clear_id;
}

std::vector<uint8_t> FlatLayout::initial_image() const {
    std::vector<uint8_t> image(total_size, 0);
    for (const auto& e : entries) {
        uint64_t v = static_cast<uint64_t>(e.init);
        for (uint32_t i = 0; i < e.width; ++i)
            image[e.clear_id + i] = static_cast<uint8_t>(v >> (8 * i));
    }
    return image;
}

nlohmann::json FlatLayout::to_json() const {
    nlohmann::json j;
    j["total_size"] = total_size;
    auto& arr = j["entries"] = nlohmann::json::array();
    for (const auto& e : entries) {
        arr.push_back({{"label", e.label},
                       {"clear_id", e.clear_id},
                       {"width", e.width},
                       {"kind", std::string(to_string(e.kind))},
                       {"init", e.init}});
    }
    return j;
}

FlatLayout FlatLayout::from_json(const nlohmann::json& j) {
    FlatLayout l;
    l.total_size = j.at("total_size").get<uint32_t>();
    for (const auto& je : j.at("entries")) {
        LayoutEntry e;
        e.label = je.at("label").get<std::string>();
        e.clear_id = je.at("clear_id").get<uint32_t>();
        e.width = je.at("width").get<uint32_t>();
        e.kind = entry_kind_from(je.at("kind").get<std::string>());
        e.init = je.at("init").get<int64_t>();
        l.entries.push_back(std::move(e));
    }
    return l;
}

namespace {

uint32_t width_of(Type t) {
    return t == Type::Bool ? 1u : 4u;
}

struct Collector {
    std::vector<LayoutEntry> pending;
    std::set<std::string> seen;

    void add(std::string label, uint32_t width, EntryKind kind, int64_t init) {
        if (!seen.insert(label).second) return;
        pending.push_back(LayoutEntry{std::move(label), 0, width, kind, init});
    }

    void add_const_expr(const Expr& e) {
        switch (e.kind) {
        case Expr::Kind::IntLit:
            add(const_int_label(e.int_value), 4, EntryKind::Const, e.int_value);
            break;
        case Expr::Kind::BoolLit:
            add(const_bool_label(e.bool_value), 1, EntryKind::Const, e.bool_value ? 1 : 0);
            break;
        case Expr::Kind::Var:
            break;
        case Expr::Kind::Unary:
        case Expr::Kind::Binary:
            for (const auto& a : e.args) add_const_expr(a);
            break;
        }
    }

    void add_pred(const std::string& prog, const PredRef& pred) {
        if (pred.kind != PredRef::Kind::Var) {
            int64_t init = 0;
            switch (pred.kind) {
            case PredRef::Kind::TrueConst: init = 1; break;
            case PredRef::Kind::FalseConst: init = 0; break;
            case PredRef::Kind::Junk: init = pred.junk_init ? 1 : 0; break;
            default: break;
            }
            add(pred_value_label(prog, pred), 1, EntryKind::PredState, init);
        }
        // last-line word lives in the data section as a 4-byte int, initially -1
        add(pred_last_label(prog, pred), 4, EntryKind::PredState, -1);
    }
};

} // namespace

FlatLayout build_layout(const std::vector<Program>& programs, const LayoutConfig& cfg) {
    Collector c;
    for (const auto& p : programs) {
        for (const auto& d : p.decls)
            c.add(var_label(p.name, d.name), width_of(d.type), EntryKind::Var, 0);
        for (const auto& s : p.statements) {
            c.add_pred(p.name, s.predicate);
            if (const auto* a = std::get_if<AssignInst>(&s.inst)) {
                c.add_const_expr(a->value);
            } else if (const auto* pr = std::get_if<PrintInst>(&s.inst)) {
                c.add_const_expr(pr->value);
            } else if (const auto* g = std::get_if<GotoInst>(&s.inst)) {
                for (const auto& r : g->resets_a) c.add_pred(p.name, r);
                for (const auto& r : g->resets_b) c.add_pred(p.name, r);
            } else if (const auto* e = std::get_if<EvalInst>(&s.inst)) {
                c.add_const_expr(e->value);
            }
        }
    }

    Rng rng(mix_seed(cfg.seed, 0x1a70u));
    rng.shuffle(c.pending);

    FlatLayout layout;
    uint64_t offset = 0;
    for (auto& e : c.pending) {
        e.clear_id = static_cast<uint32_t>(offset);
        offset += e.width;
        layout.entries.push_back(std::move(e));
    }
    if (offset > cfg.max_data_size)
        throw CompileError("flat data section (" + std::to_string(offset) +
                           " bytes) exceeds the configured address-space bound");
    layout.total_size = static_cast<uint32_t>(offset);
    return layout;
}

} // namespace decorr
