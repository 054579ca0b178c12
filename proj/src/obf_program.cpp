#include "decorr/obf_program.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "decorr/errors.hpp"

namespace decorr {

ObfExpr ObfExpr::reference(uint64_t id, uint8_t w) {
    ObfExpr e;
    e.kind = Kind::Ref;
    e.ref = id;
    e.width = w;
    return e;
}

ObfExpr ObfExpr::unary(UnOp op, ObfExpr a) {
    ObfExpr e;
    e.kind = Kind::Unary;
    e.un = op;
    e.args.push_back(std::move(a));
    return e;
}

ObfExpr ObfExpr::binary(BinOp op, ObfExpr a, ObfExpr b) {
    ObfExpr e;
    e.kind = Kind::Binary;
    e.bin = op;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
}

std::string ObfProgram::opcode_of(size_t index) const {
    const auto& st = statements.at(index);
    if (std::holds_alternative<ObfPrint>(st.inst)) return "print";
    if (std::holds_alternative<ObfGoto>(st.inst)) return "goto";
    const ObfExpr* e = nullptr;
    if (const auto* a = std::get_if<ObfAssign>(&st.inst))
        e = &a->value;
    else
        e = &std::get<ObfEval>(st.inst).value;
    switch (e->kind) {
    case ObfExpr::Kind::Ref: return "mov";
    case ObfExpr::Kind::Unary: return std::string(to_string(e->un));
    case ObfExpr::Kind::Binary: return std::string(to_string(e->bin));
    }
    return "mov";
}

namespace {

void collect_ids(const ObfExpr& e, std::vector<uint64_t>& out) {
    if (e.kind == ObfExpr::Kind::Ref) {
        out.push_back(e.ref);
        return;
    }
    for (const auto& a : e.args) collect_ids(a, out);
}

void write_expr(std::ostream& os, const ObfExpr& e) {
    switch (e.kind) {
    case ObfExpr::Kind::Ref:
        os << (e.width == 1 ? " b" : " i") << e.ref;
        return;
    case ObfExpr::Kind::Unary:
        os << " " << to_string(e.un);
        write_expr(os, e.args[0]);
        return;
    case ObfExpr::Kind::Binary:
        os << " " << to_string(e.bin);
        write_expr(os, e.args[0]);
        write_expr(os, e.args[1]);
        return;
    }
}

class ListingReader {
public:
    explicit ListingReader(std::string_view line) : in_(std::string(line)) {}

    std::string token() {
        std::string t;
        in_ >> t;
        return t;
    }

    std::string rest_string() {
        // quoted format string; no escape sequences
        std::string t;
        in_ >> std::ws;
        if (in_.peek() != '"') throw Error("obfuscated listing: expected string literal");
        in_.get();
        std::getline(in_, t, '"');
        return t;
    }

    uint64_t number() {
        uint64_t v = 0;
        if (!(in_ >> v)) throw Error("obfuscated listing: expected number");
        return v;
    }

    ObfExpr expr() {
        std::string t = token();
        if (t.empty()) throw Error("obfuscated listing: truncated expression");
        if (t[0] == 'b' || t[0] == 'i') {
            bool is_bool = t[0] == 'b';
            if (t.size() > 1 && std::isdigit(static_cast<unsigned char>(t[1])))
                return ObfExpr::reference(std::stoull(t.substr(1)), is_bool ? 1 : 4);
        }
        if (t == "neg") return ObfExpr::unary(UnOp::Neg, expr());
        if (t == "not") return ObfExpr::unary(UnOp::Not, expr());
        static const std::pair<const char*, BinOp> ops[] = {
            {"add", BinOp::Add}, {"sub", BinOp::Sub}, {"mul", BinOp::Mul},
            {"div", BinOp::Div}, {"mod", BinOp::Mod}, {"and", BinOp::And},
            {"or", BinOp::Or},   {"lt", BinOp::Lt},   {"le", BinOp::Le},
            {"gt", BinOp::Gt},   {"ge", BinOp::Ge},   {"eq", BinOp::Eq},
            {"ne", BinOp::Ne},
        };
        for (const auto& [name, op] : ops)
            if (t == name) {
                ObfExpr a = expr();
                ObfExpr b = expr();
                return ObfExpr::binary(op, std::move(a), std::move(b));
            }
        throw Error("obfuscated listing: unknown expression token '" + t + "'");
    }

    std::vector<uint64_t> id_list() {
        std::string t = token();
        if (t != "[") throw Error("obfuscated listing: expected '['");
        std::vector<uint64_t> ids;
        for (;;) {
            t = token();
            if (t == "]") break;
            if (t.empty()) throw Error("obfuscated listing: unterminated id list");
            ids.push_back(std::stoull(t));
        }
        return ids;
    }

    bool at_end() {
        in_ >> std::ws;
        return in_.eof();
    }

private:
    std::istringstream in_;
};

} // namespace

std::vector<uint64_t> ObfProgram::all_ids() const {
    std::vector<uint64_t> ids;
    for (const auto& st : statements) {
        ids.push_back(st.pred_value);
        ids.push_back(st.pred_last);
        if (const auto* a = std::get_if<ObfAssign>(&st.inst)) {
            ids.push_back(a->dst);
            collect_ids(a->value, ids);
        } else if (const auto* p = std::get_if<ObfPrint>(&st.inst)) {
            collect_ids(p->value, ids);
        } else if (const auto* g = std::get_if<ObfGoto>(&st.inst)) {
            ids.insert(ids.end(), g->resets_a.begin(), g->resets_a.end());
            ids.insert(ids.end(), g->resets_b.begin(), g->resets_b.end());
        } else {
            collect_ids(std::get<ObfEval>(st.inst).value, ids);
        }
    }
    return ids;
}

std::map<std::string, size_t> ObfProgram::label_index() const {
    std::map<std::string, size_t> idx;
    for (size_t i = 0; i < statements.size(); ++i)
        if (statements[i].label) idx[*statements[i].label] = i;
    return idx;
}

std::string ObfProgram::to_text() const {
    std::ostringstream os;
    os << "# decorr-obf format=" << format_version << " page_bits=" << page_bits
       << " statements=" << statements.size() << "\n";
    for (const auto& st : statements) {
        if (st.label) os << *st.label << ": ";
        os << st.pred_value << "@" << st.pred_last << " :";
        if (const auto* a = std::get_if<ObfAssign>(&st.inst)) {
            os << " set" << int(a->width) << (a->width == 1 ? " b" : " i") << a->dst;
            write_expr(os, a->value);
        } else if (const auto* p = std::get_if<ObfPrint>(&st.inst)) {
            os << " print \"" << p->format << "\"";
            write_expr(os, p->value);
        } else if (const auto* g = std::get_if<ObfGoto>(&st.inst)) {
            os << " goto " << g->target << " [";
            for (uint64_t id : g->resets_a) os << " " << id;
            os << " ] [";
            for (uint64_t id : g->resets_b) os << " " << id;
            os << " ]";
        } else {
            os << " eval";
            write_expr(os, std::get<ObfEval>(st.inst).value);
        }
        os << "\n";
    }
    return os.str();
}

ObfProgram ObfProgram::from_text(std::string_view text) {
    ObfProgram prog;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (!header_seen) {
                auto pos = line.find("page_bits=");
                if (pos != std::string::npos)
                    prog.page_bits = static_cast<uint32_t>(std::stoul(line.substr(pos + 10)));
                header_seen = true;
            }
            continue;
        }
        ListingReader r(line);
        ObfStatement st;
        std::string t = r.token();
        if (!t.empty() && t.back() == ':') {
            st.label = t.substr(0, t.size() - 1);
            t = r.token();
        }
        auto at = t.find('@');
        if (at == std::string::npos)
            throw Error("obfuscated listing: malformed predicate token '" + t + "'");
        st.pred_value = std::stoull(t.substr(0, at));
        st.pred_last = std::stoull(t.substr(at + 1));
        if (r.token() != ":") throw Error("obfuscated listing: expected ':'");
        std::string op = r.token();
        if (op == "set1" || op == "set4") {
            ObfAssign a;
            a.width = op == "set1" ? 1 : 4;
            std::string dst = r.token();
            if (dst.size() < 2 || (dst[0] != 'b' && dst[0] != 'i'))
                throw Error("obfuscated listing: malformed destination '" + dst + "'");
            a.dst = std::stoull(dst.substr(1));
            a.value = r.expr();
            st.inst = std::move(a);
        } else if (op == "print") {
            ObfPrint p;
            p.format = r.rest_string();
            p.value = r.expr();
            st.inst = std::move(p);
        } else if (op == "goto") {
            ObfGoto g;
            g.target = r.token();
            g.resets_a = r.id_list();
            g.resets_b = r.id_list();
            st.inst = std::move(g);
        } else if (op == "eval") {
            ObfEval e;
            e.value = r.expr();
            st.inst = std::move(e);
        } else {
            throw Error("obfuscated listing: unknown opcode '" + op + "'");
        }
        if (!r.at_end()) throw Error("obfuscated listing: trailing tokens");
        prog.statements.push_back(std::move(st));
    }
    return prog;
}

nlohmann::json ProvenanceMap::to_json() const {
    nlohmann::json j;
    j["statements"] = stmt_origin;
    auto& ids = j["ids"] = nlohmann::json::object();
    for (const auto& [id, clear] : id_to_clear) ids[std::to_string(id)] = clear;
    return j;
}

ProvenanceMap ProvenanceMap::from_json(const nlohmann::json& j) {
    ProvenanceMap m;
    m.stmt_origin = j.at("statements").get<std::vector<std::string>>();
    for (const auto& [key, value] : j.at("ids").items())
        m.id_to_clear[std::stoull(key)] = value.get<uint32_t>();
    return m;
}

} // namespace decorr
