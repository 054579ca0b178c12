#include "decorr/frontend.hpp"

#include <cassert>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace decorr {

namespace {

enum class Tok {
    End, Ident, Int, String,
    KwBool, KwInt, KwFloat, KwTrue, KwFalse, KwPrint, KwGoto, KwIf, KwElse,
    Colon, Dollar, LParen, RParen, LBrace, RBrace, LBracket, RBracket, Comma,
    Assign, Lt, Le, Gt, Ge, EqEq, Ne, Plus, Minus, Star, Slash, Percent,
    Not, AndAnd, OrOr,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int64_t value = 0;
    SourceLoc loc{};
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws();
        Token t;
        t.loc = {line_, col_};
        if (pos_ >= src_.size()) return t;
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                advance();
            t.text = std::string(src_.substr(start, pos_ - start));
            t.kind = keyword(t.text);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                advance();
            t.kind = Tok::Int;
            t.text = std::string(src_.substr(start, pos_ - start));
            errno = 0;
            t.value = std::strtoll(t.text.c_str(), nullptr, 10);
            if (t.text.size() > 19) throw ParseError("integer literal too large", t.loc);
            return t;
        }
        if (c == '"') {
            advance();
            size_t start = pos_;
            while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') advance();
            if (pos_ >= src_.size() || src_[pos_] != '"')
                throw ParseError("unterminated string literal", t.loc);
            t.kind = Tok::String;
            t.text = std::string(src_.substr(start, pos_ - start));
            advance();
            return t;
        }
        auto two = [&](char a, char b) {
            return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
        };
        if (two('<', '=')) { t.kind = Tok::Le; advance(); advance(); return t; }
        if (two('>', '=')) { t.kind = Tok::Ge; advance(); advance(); return t; }
        if (two('=', '=')) { t.kind = Tok::EqEq; advance(); advance(); return t; }
        if (two('!', '=')) { t.kind = Tok::Ne; advance(); advance(); return t; }
        if (two('&', '&')) { t.kind = Tok::AndAnd; advance(); advance(); return t; }
        if (two('|', '|')) { t.kind = Tok::OrOr; advance(); advance(); return t; }
        advance();
        switch (c) {
        case ':': t.kind = Tok::Colon; return t;
        case '$': t.kind = Tok::Dollar; return t;
        case '(': t.kind = Tok::LParen; return t;
        case ')': t.kind = Tok::RParen; return t;
        case '{': t.kind = Tok::LBrace; return t;
        case '}': t.kind = Tok::RBrace; return t;
        case '[': t.kind = Tok::LBracket; return t;
        case ']': t.kind = Tok::RBracket; return t;
        case ',': t.kind = Tok::Comma; return t;
        case '=': t.kind = Tok::Assign; return t;
        case '<': t.kind = Tok::Lt; return t;
        case '>': t.kind = Tok::Gt; return t;
        case '+': t.kind = Tok::Plus; return t;
        case '-': t.kind = Tok::Minus; return t;
        case '*': t.kind = Tok::Star; return t;
        case '/': t.kind = Tok::Slash; return t;
        case '%': t.kind = Tok::Percent; return t;
        case '!': t.kind = Tok::Not; return t;
        case '~': t.kind = Tok::Not; return t;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", t.loc);
    }

private:
    static Tok keyword(const std::string& s) {
        if (s == "bool") return Tok::KwBool;
        if (s == "int") return Tok::KwInt;
        if (s == "float") return Tok::KwFloat;
        if (s == "true") return Tok::KwTrue;
        if (s == "false") return Tok::KwFalse;
        if (s == "print") return Tok::KwPrint;
        if (s == "goto") return Tok::KwGoto;
        if (s == "if") return Tok::KwIf;
        if (s == "else") return Tok::KwElse;
        return Tok::Ident;
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    Parser(std::string_view src, std::string name, bool structured)
        : lexer_(src), name_(std::move(name)), structured_(structured) {
        cur_ = lexer_.next();
        ahead_ = lexer_.next();
    }

    SProgram parse() {
        SProgram p;
        p.name = name_;
        while (cur_.kind == Tok::KwBool || cur_.kind == Tok::KwInt || cur_.kind == Tok::KwFloat)
            p.decls.push_back(parse_decl());
        while (cur_.kind != Tok::End)
            p.statements.push_back(parse_sstmt(/*top_level=*/true));
        return p;
    }

private:
    Declaration parse_decl() {
        Declaration d;
        d.loc = cur_.loc;
        switch (cur_.kind) {
        case Tok::KwBool: d.type = Type::Bool; break;
        case Tok::KwInt: d.type = Type::Int; break;
        case Tok::KwFloat: d.type = Type::Float; break;
        default: fail("expected type");
        }
        bump();
        d.name = expect_ident("variable name");
        return d;
    }

    SStatement parse_sstmt(bool top_level) {
        SStatement s;
        s.loc = cur_.loc;
        if (cur_.kind == Tok::Dollar) {
            if (!top_level) fail("labels are only allowed at the top level");
            bump();
            std::string label = expect_ident("label name");
            // A label line attaches to the next predicated statement; a
            // trailing label (end of program) becomes a statement-less core
            // statement handled by the caller via pending_label_.
            if (pending_label_) fail("two consecutive labels");
            if (cur_.kind == Tok::End)
                fail("label '" + label + "' must precede a statement");
            pending_label_ = label;
            return parse_sstmt(top_level);
        }
        if (cur_.kind == Tok::KwIf) {
            if (!structured_) fail("'if' requires the structured syntax extension");
            if (pending_label_) fail("a label cannot precede an if statement");
            s.kind = SStatement::Kind::If;
            s.chain = parse_if_chain();
            return s;
        }
        // `pred : inst` when a predicate token is followed by ':'
        bool predicated =
            (cur_.kind == Tok::KwTrue || cur_.kind == Tok::KwFalse || cur_.kind == Tok::Ident) &&
            ahead_.kind == Tok::Colon;
        if (predicated) {
            s.kind = SStatement::Kind::Core;
            s.core.loc = s.loc;
            if (pending_label_) {
                s.core.label = *pending_label_;
                pending_label_.reset();
            }
            s.core.predicate = parse_pred();
            expect(Tok::Colon, "':'");
            s.core.inst = parse_inst();
            return s;
        }
        if (!structured_) fail("expected 'pred : instruction'");
        if (pending_label_) fail("a label must precede a predicated statement");
        s.kind = SStatement::Kind::Bare;
        s.bare = parse_inst();
        return s;
    }

    SIfChain parse_if_chain() {
        SIfChain chain;
        for (;;) {
            expect(Tok::KwIf, "'if'");
            expect(Tok::LParen, "'('");
            SIfChain::Branch br;
            br.cond = parse_expr();
            expect(Tok::RParen, "')'");
            br.body = parse_block();
            chain.branches.push_back(std::move(br));
            if (cur_.kind != Tok::KwElse) break;
            bump();
            if (cur_.kind == Tok::KwIf) continue;
            chain.else_body = parse_block();
            break;
        }
        return chain;
    }

    std::vector<SStatement> parse_block() {
        expect(Tok::LBrace, "'{'");
        std::vector<SStatement> body;
        while (cur_.kind != Tok::RBrace) {
            if (cur_.kind == Tok::End) fail("unterminated block");
            body.push_back(parse_sstmt(/*top_level=*/false));
        }
        bump();
        return body;
    }

    PredRef parse_pred() {
        if (cur_.kind == Tok::KwTrue) { bump(); return PredRef::true_const(); }
        if (cur_.kind == Tok::KwFalse) { bump(); return PredRef::false_const(); }
        if (cur_.kind == Tok::Ident) {
            std::string n = cur_.text;
            bump();
            return PredRef::variable(std::move(n));
        }
        fail("expected predicate (true, false or boolean variable)");
        return {};
    }

    Instruction parse_inst() {
        if (cur_.kind == Tok::KwPrint) {
            bump();
            expect(Tok::LParen, "'('");
            if (cur_.kind != Tok::String) fail("expected format string");
            PrintInst pr;
            pr.format = cur_.text;
            bump();
            expect(Tok::Comma, "','");
            pr.value = parse_expr();
            expect(Tok::RParen, "')'");
            return pr;
        }
        if (cur_.kind == Tok::KwGoto) {
            bump();
            expect(Tok::LParen, "'('");
            GotoInst g;
            g.target = expect_ident("goto target label");
            expect(Tok::Comma, "','");
            g.resets_a = parse_reset_list();
            expect(Tok::Comma, "','");
            g.resets_b = parse_reset_list();
            expect(Tok::RParen, "')'");
            return g;
        }
        if (cur_.kind == Tok::Ident && ahead_.kind == Tok::Assign) {
            AssignInst a;
            a.target = cur_.text;
            bump();
            bump();
            a.value = parse_expr();
            return a;
        }
        return EvalInst{parse_expr()};
    }

    std::vector<PredRef> parse_reset_list() {
        expect(Tok::LBracket, "'['");
        std::vector<PredRef> refs;
        if (cur_.kind != Tok::RBracket) {
            for (;;) {
                refs.push_back(parse_pred());
                if (cur_.kind != Tok::Comma) break;
                bump();
            }
        }
        expect(Tok::RBracket, "']'");
        return refs;
    }

    // precedence climbing: || < && < ==/!= < relational < +- < */% < unary
    Expr parse_expr() { return parse_or(); }

    Expr parse_or() {
        Expr lhs = parse_and();
        while (cur_.kind == Tok::OrOr) {
            SourceLoc loc = cur_.loc;
            bump();
            lhs = Expr::binary(BinOp::Or, std::move(lhs), parse_and());
            lhs.loc = loc;
        }
        return lhs;
    }

    Expr parse_and() {
        Expr lhs = parse_equality();
        while (cur_.kind == Tok::AndAnd) {
            SourceLoc loc = cur_.loc;
            bump();
            lhs = Expr::binary(BinOp::And, std::move(lhs), parse_equality());
            lhs.loc = loc;
        }
        return lhs;
    }

    Expr parse_equality() {
        Expr lhs = parse_relational();
        for (;;) {
            BinOp op;
            if (cur_.kind == Tok::EqEq) op = BinOp::Eq;
            else if (cur_.kind == Tok::Ne) op = BinOp::Ne;
            else break;
            SourceLoc loc = cur_.loc;
            bump();
            lhs = Expr::binary(op, std::move(lhs), parse_relational());
            lhs.loc = loc;
        }
        return lhs;
    }

    Expr parse_relational() {
        Expr lhs = parse_additive();
        for (;;) {
            BinOp op;
            if (cur_.kind == Tok::Lt) op = BinOp::Lt;
            else if (cur_.kind == Tok::Le) op = BinOp::Le;
            else if (cur_.kind == Tok::Gt) op = BinOp::Gt;
            else if (cur_.kind == Tok::Ge) op = BinOp::Ge;
            else break;
            SourceLoc loc = cur_.loc;
            bump();
            lhs = Expr::binary(op, std::move(lhs), parse_additive());
            lhs.loc = loc;
        }
        return lhs;
    }

    Expr parse_additive() {
        Expr lhs = parse_multiplicative();
        for (;;) {
            BinOp op;
            if (cur_.kind == Tok::Plus) op = BinOp::Add;
            else if (cur_.kind == Tok::Minus) op = BinOp::Sub;
            else break;
            SourceLoc loc = cur_.loc;
            bump();
            lhs = Expr::binary(op, std::move(lhs), parse_multiplicative());
            lhs.loc = loc;
        }
        return lhs;
    }

    Expr parse_multiplicative() {
        Expr lhs = parse_unary();
        for (;;) {
            BinOp op;
            if (cur_.kind == Tok::Star) op = BinOp::Mul;
            else if (cur_.kind == Tok::Slash) op = BinOp::Div;
            else if (cur_.kind == Tok::Percent) op = BinOp::Mod;
            else break;
            SourceLoc loc = cur_.loc;
            bump();
            lhs = Expr::binary(op, std::move(lhs), parse_unary());
            lhs.loc = loc;
        }
        return lhs;
    }

    Expr parse_unary() {
        if (cur_.kind == Tok::Minus) {
            SourceLoc loc = cur_.loc;
            bump();
            Expr e = Expr::unary(UnOp::Neg, parse_unary());
            e.loc = loc;
            return e;
        }
        if (cur_.kind == Tok::Not) {
            SourceLoc loc = cur_.loc;
            bump();
            Expr e = Expr::unary(UnOp::Not, parse_unary());
            e.loc = loc;
            return e;
        }
        return parse_primary();
    }

    Expr parse_primary() {
        SourceLoc loc = cur_.loc;
        if (cur_.kind == Tok::Int) {
            Expr e = Expr::int_lit(cur_.value);
            e.loc = loc;
            bump();
            return e;
        }
        if (cur_.kind == Tok::KwTrue || cur_.kind == Tok::KwFalse) {
            Expr e = Expr::bool_lit(cur_.kind == Tok::KwTrue);
            e.loc = loc;
            bump();
            return e;
        }
        if (cur_.kind == Tok::Ident) {
            Expr e = Expr::variable(cur_.text);
            e.loc = loc;
            bump();
            return e;
        }
        if (cur_.kind == Tok::LParen) {
            bump();
            Expr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        fail("expected expression");
        return {};
    }

    std::string expect_ident(const char* what) {
        if (cur_.kind != Tok::Ident) fail(std::string("expected ") + what);
        std::string n = cur_.text;
        bump();
        return n;
    }

    void expect(Tok k, const char* what) {
        if (cur_.kind != k) fail(std::string("expected ") + what);
        bump();
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg + (cur_.kind == Tok::End ? " at end of input" : ""), cur_.loc);
    }

    void bump() {
        cur_ = ahead_;
        ahead_ = lexer_.next();
    }

    Lexer lexer_;
    std::string name_;
    bool structured_;
    Token cur_, ahead_;
    std::optional<std::string> pending_label_;
};

Program core_of(SProgram&& sp) {
    Program p;
    p.name = std::move(sp.name);
    p.decls = std::move(sp.decls);
    for (auto& s : sp.statements) {
        assert(s.kind == SStatement::Kind::Core);
        p.statements.push_back(std::move(s.core));
    }
    return p;
}

// ---- validation -----------------------------------------------------------

class Validator {
public:
    explicit Validator(const Program& p) : p_(p) {}

    std::vector<Diagnostic> run() {
        std::set<std::string> seen;
        for (const auto& d : p_.decls) {
            if (!seen.insert(d.name).second)
                add(Diagnostic::Kind::DuplicateDeclaration,
                    "duplicate declaration of '" + d.name + "'", d.loc);
        }
        std::set<std::string> labels;
        for (const auto& s : p_.statements) {
            if (s.label && !labels.insert(*s.label).second)
                add(Diagnostic::Kind::DuplicateLabel, "duplicate label '" + *s.label + "'", s.loc);
        }
        for (const auto& s : p_.statements) check_statement(s, labels);
        return std::move(diags_);
    }

private:
    void check_statement(const Statement& s, const std::set<std::string>& labels) {
        check_pred(s.predicate, s.loc);
        if (const auto* a = std::get_if<AssignInst>(&s.inst)) {
            auto target_ty = type_of_var(a->target, s.loc);
            auto value_ty = type_of_expr(a->value);
            if (target_ty && *target_ty == Type::Float)
                add(Diagnostic::Kind::UnsupportedFloat,
                    "float variable '" + a->target + "' cannot be assigned", s.loc);
            else if (target_ty && value_ty && *target_ty != *value_ty)
                add(Diagnostic::Kind::TypeMismatch,
                    "assignment to '" + a->target + "' of mismatched type", s.loc);
        } else if (const auto* pr = std::get_if<PrintInst>(&s.inst)) {
            type_of_expr(pr->value);
        } else if (const auto* g = std::get_if<GotoInst>(&s.inst)) {
            if (!labels.count(g->target))
                add(Diagnostic::Kind::UnknownLabel, "unknown goto label '" + g->target + "'", s.loc);
            for (const auto& r : g->resets_a) check_pred(r, s.loc);
            for (const auto& r : g->resets_b) check_pred(r, s.loc);
        } else if (const auto* e = std::get_if<EvalInst>(&s.inst)) {
            type_of_expr(e->value);
        }
    }

    void check_pred(const PredRef& pred, SourceLoc loc) {
        if (pred.kind != PredRef::Kind::Var) return;
        auto ty = type_of_var(pred.var, loc);
        if (ty && *ty != Type::Bool)
            add(Diagnostic::Kind::TypeMismatch,
                "predicate '" + pred.var + "' is not a boolean", loc);
    }

    std::optional<Type> type_of_var(const std::string& name, SourceLoc loc) {
        if (const auto* d = p_.find_decl(name)) return d->type;
        add(Diagnostic::Kind::UndeclaredVariable, "use of undeclared '" + name + "'", loc);
        return std::nullopt;
    }

    std::optional<Type> type_of_expr(const Expr& e) {
        switch (e.kind) {
        case Expr::Kind::IntLit:
            if (e.int_value > INT32_MAX || e.int_value < INT32_MIN) {
                add(Diagnostic::Kind::BadLiteral, "integer literal out of 32-bit range", e.loc);
                return std::nullopt;
            }
            return Type::Int;
        case Expr::Kind::BoolLit:
            return Type::Bool;
        case Expr::Kind::Var: {
            auto ty = type_of_var(e.var, e.loc);
            if (ty && *ty == Type::Float) {
                add(Diagnostic::Kind::UnsupportedFloat,
                    "float variable '" + e.var + "' used in an expression", e.loc);
                return std::nullopt;
            }
            return ty;
        }
        case Expr::Kind::Unary: {
            auto a = type_of_expr(e.args[0]);
            Type want = e.un == UnOp::Neg ? Type::Int : Type::Bool;
            if (a && *a != want)
                add(Diagnostic::Kind::TypeMismatch,
                    std::string("operand of ") + std::string(to_string(e.un)) + " has wrong type",
                    e.loc);
            return want;
        }
        case Expr::Kind::Binary: {
            auto a = type_of_expr(e.args[0]);
            auto b = type_of_expr(e.args[1]);
            switch (e.bin) {
            case BinOp::Add: case BinOp::Sub: case BinOp::Mul:
            case BinOp::Div: case BinOp::Mod:
                require(a, Type::Int, e.loc);
                require(b, Type::Int, e.loc);
                return Type::Int;
            case BinOp::And: case BinOp::Or:
                require(a, Type::Bool, e.loc);
                require(b, Type::Bool, e.loc);
                return Type::Bool;
            case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
                require(a, Type::Int, e.loc);
                require(b, Type::Int, e.loc);
                return Type::Bool;
            case BinOp::Eq: case BinOp::Ne:
                if (a && b && *a != *b)
                    add(Diagnostic::Kind::TypeMismatch, "comparison of mixed types", e.loc);
                return Type::Bool;
            }
            return std::nullopt;
        }
        }
        return std::nullopt;
    }

    void require(const std::optional<Type>& got, Type want, SourceLoc loc) {
        if (got && *got != want)
            add(Diagnostic::Kind::TypeMismatch,
                std::string("expected ") + std::string(to_string(want)) + " operand", loc);
    }

    void add(Diagnostic::Kind k, std::string msg, SourceLoc loc) {
        diags_.push_back(Diagnostic{k, std::move(msg), loc});
    }

    const Program& p_;
    std::vector<Diagnostic> diags_;
};

// ---- printing ---------------------------------------------------------------

int precedence(BinOp op) {
    switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq: case BinOp::Ne: return 3;
    case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return 4;
    case BinOp::Add: case BinOp::Sub: return 5;
    case BinOp::Mul: case BinOp::Div: case BinOp::Mod: return 6;
    }
    return 0;
}

std::string_view op_symbol(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    }
    return "?";
}

void print_expr(std::ostream& os, const Expr& e, int parent_prec) {
    switch (e.kind) {
    case Expr::Kind::IntLit:
        if (e.int_value < 0) {
            os << "(-" << -e.int_value << ")";
        } else {
            os << e.int_value;
        }
        return;
    case Expr::Kind::BoolLit:
        os << (e.bool_value ? "true" : "false");
        return;
    case Expr::Kind::Var:
        os << e.var;
        return;
    case Expr::Kind::Unary:
        os << (e.un == UnOp::Neg ? "-" : "!");
        // unary binds tighter than any binary operator
        print_expr(os, e.args[0], 7);
        return;
    case Expr::Kind::Binary: {
        int prec = precedence(e.bin);
        bool parens = prec < parent_prec;
        if (parens) os << "(";
        print_expr(os, e.args[0], prec);
        os << " " << op_symbol(e.bin) << " ";
        // left-associative: right child needs parens at equal precedence
        print_expr(os, e.args[1], prec + 1);
        if (parens) os << ")";
        return;
    }
    }
}

void print_pred(std::ostream& os, const PredRef& p) {
    switch (p.kind) {
    case PredRef::Kind::TrueConst: os << "true"; break;
    case PredRef::Kind::FalseConst: os << "false"; break;
    case PredRef::Kind::Var: os << p.var; break;
    case PredRef::Kind::Junk:
        // junk slots are compiler-internal; degrade to the initial value
        os << (p.junk_init ? "true" : "false");
        break;
    }
}

void print_reset_list(std::ostream& os, const std::vector<PredRef>& refs) {
    os << "[";
    for (size_t i = 0; i < refs.size(); ++i) {
        if (i) os << ", ";
        print_pred(os, refs[i]);
    }
    os << "]";
}

} // namespace

SProgram parse_structured(std::string_view source, std::string name) {
    Parser parser(source, std::move(name), /*structured=*/true);
    return parser.parse();
}

Program parse_only(std::string_view source, std::string name) {
    Parser parser(source, std::move(name), /*structured=*/false);
    return core_of(parser.parse());
}

Program parse_program(std::string_view source, std::string name) {
    Program p = parse_only(source, std::move(name));
    auto diags = validate(p);
    if (!diags.empty()) {
        std::string msg = format_diagnostic(p.name, diags.front());
        if (diags.size() > 1)
            msg += " (+" + std::to_string(diags.size() - 1) + " more)";
        throw ValidationError(msg, std::move(diags));
    }
    return p;
}

std::vector<Diagnostic> validate(const Program& p) {
    return Validator(p).run();
}

std::string to_source(const Program& p) {
    std::ostringstream os;
    for (const auto& d : p.decls)
        os << to_string(d.type) << " " << d.name << "\n";
    for (const auto& s : p.statements) {
        if (s.label) os << "$" << *s.label << "\n";
        print_pred(os, s.predicate);
        os << " : ";
        if (const auto* a = std::get_if<AssignInst>(&s.inst)) {
            os << a->target << " = ";
            print_expr(os, a->value, 0);
        } else if (const auto* pr = std::get_if<PrintInst>(&s.inst)) {
            os << "print(\"" << pr->format << "\", ";
            print_expr(os, pr->value, 0);
            os << ")";
        } else if (const auto* g = std::get_if<GotoInst>(&s.inst)) {
            os << "goto(" << g->target << ", ";
            print_reset_list(os, g->resets_a);
            os << ", ";
            print_reset_list(os, g->resets_b);
            os << ")";
        } else {
            print_expr(os, std::get<EvalInst>(s.inst).value, 0);
        }
        os << "\n";
    }
    return os.str();
}

// ---- desugaring -------------------------------------------------------------

namespace {

class Desugarer {
public:
    explicit Desugarer(const SProgram& sp) : sp_(sp) {
        for (const auto& d : sp.decls) names_.insert(d.name);
    }

    Program run() {
        Program p;
        p.name = sp_.name;
        p.decls = sp_.decls;
        for (const auto& s : sp_.statements) emit(s, /*enclosing=*/std::nullopt, p);
        return p;
    }

private:
    // enclosing: boolean variable holding the conjunction of all enclosing
    // conditions, or nullopt at the top level.
    void emit(const SStatement& s, const std::optional<std::string>& enclosing, Program& out) {
        switch (s.kind) {
        case SStatement::Kind::Core:
            out.statements.push_back(s.core);
            return;
        case SStatement::Kind::Bare: {
            Statement st;
            st.predicate = enclosing ? PredRef::variable(*enclosing) : PredRef::true_const();
            st.inst = s.bare;
            st.loc = s.loc;
            out.statements.push_back(std::move(st));
            return;
        }
        case SStatement::Kind::If:
            emit_chain(s.chain, enclosing, out);
            return;
        }
    }

    void emit_chain(const SIfChain& chain, const std::optional<std::string>& enclosing,
                    Program& out) {
        // One predicate variable per branch; all of them are computed before
        // any branch body so bodies cannot perturb sibling conditions.
        std::vector<std::string> branch_preds;
        size_t nb = chain.branches.size() + (chain.else_body.empty() ? 0 : 1);
        for (size_t i = 0; i < nb; ++i) {
            bool is_else = i == chain.branches.size();
            // conjunction: enclosing && !c_0 && ... && !c_{i-1} [&& c_i]
            std::vector<Expr> parts;
            if (enclosing) parts.push_back(Expr::variable(*enclosing));
            size_t negated = is_else ? chain.branches.size() : i;
            for (size_t j = 0; j < negated; ++j)
                parts.push_back(Expr::unary(UnOp::Not, chain.branches[j].cond));
            if (!is_else) parts.push_back(chain.branches[i].cond);
            if (parts.size() == 1 && parts[0].kind == Expr::Kind::Var) {
                branch_preds.push_back(parts[0].var);
                continue;
            }
            Expr path = std::move(parts[0]);
            for (size_t k = 1; k < parts.size(); ++k)
                path = Expr::binary(BinOp::And, std::move(path), std::move(parts[k]));
            std::string temp = fresh_temp();
            out.decls.push_back(Declaration{temp, Type::Bool, {}});
            Statement st;
            st.predicate = PredRef::true_const();
            st.inst = AssignInst{temp, std::move(path)};
            out.statements.push_back(std::move(st));
            branch_preds.push_back(temp);
        }
        for (size_t i = 0; i < chain.branches.size(); ++i)
            for (const auto& body_stmt : chain.branches[i].body)
                emit(body_stmt, branch_preds[i], out);
        if (!chain.else_body.empty())
            for (const auto& body_stmt : chain.else_body)
                emit(body_stmt, branch_preds.back(), out);
    }

    std::string fresh_temp() {
        for (;;) {
            std::string n = "__t" + std::to_string(temp_counter_++);
            if (names_.insert(n).second) return n;
        }
    }

    const SProgram& sp_;
    std::set<std::string> names_;
    int temp_counter_ = 0;
};

} // namespace

Program desugar_if(const SProgram& sp) {
    return Desugarer(sp).run();
}

} // namespace decorr
