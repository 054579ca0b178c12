#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "decorr/compiler.hpp"
#include "decorr/evaluator.hpp"
#include "decorr/frontend.hpp"
#include "decorr/interp.hpp"
#include "decorr/samples.hpp"
#include "decorr/tee_runtime.hpp"

using namespace decorr;

namespace {

Program p1() { return parse_program(sum_loop_source(), "p1"); }
Program p2() { return parse_program(powers_loop_source(), "p2"); }

Program from_kinds(const std::vector<std::string>& kinds, const std::string& name) {
    Program p;
    p.name = name;
    p.decls = {{"a", Type::Int, {}}, {"b", Type::Int, {}}, {"q", Type::Bool, {}}};
    for (const auto& k : kinds) {
        Statement s;
        s.predicate = PredRef::true_const();
        if (k == "add")
            s.inst = AssignInst{"a", Expr::binary(BinOp::Add, Expr::variable("a"),
                                                  Expr::variable("b"))};
        else if (k == "mul")
            s.inst = AssignInst{"a", Expr::binary(BinOp::Mul, Expr::variable("a"),
                                                  Expr::variable("b"))};
        else if (k == "div")
            s.inst = AssignInst{"a", Expr::binary(BinOp::Div, Expr::variable("a"),
                                                  Expr::int_lit(3))};
        else
            FAIL("unsupported kind in fixture");
        p.statements.push_back(std::move(s));
    }
    return p;
}

std::vector<std::string> real_order(const Program& p) {
    std::vector<std::string> order;
    for (const auto& s : p.statements)
        if (!s.is_junk) order.push_back(opcode_kind(s));
    return order;
}

} // namespace

TEST_CASE("uniformize pads histograms to the per-opcode maximum") {
    Program p = from_kinds({"add", "add", "mul"}, "u");
    auto out = uniformize({p}, {"add", "div", "mul"}, 5);
    REQUIRE(out.size() == 1);
    auto h = opcode_histogram(out[0]);
    CHECK(h["add"] == 2);
    CHECK(h["mul"] == 2);
    CHECK(h["div"] == 2);
    CHECK(out[0].statements.size() == 6);
    CHECK(real_order(out[0]) == real_order(p));
    CHECK(validate(out[0]).empty());
}

TEST_CASE("already uniform program is unchanged in size") {
    Program p = from_kinds({"add", "mul"}, "u");
    auto out = uniformize({p}, {"add", "mul"}, 5);
    CHECK(out[0].statements.size() == 2);
}

TEST_CASE("a division-free program gains division instructions") {
    Program a = from_kinds({"add", "add"}, "a"); // no div at all
    Program b = from_kinds({"div", "add"}, "b");
    auto out = uniformize({a, b}, default_alphabet({a, b}), 7);
    auto ha = opcode_histogram(out[0]);
    CHECK(ha["div"] > 0);
    CHECK(ha["div"] == ha["add"]);
    // equal statement counts across programs
    CHECK(out[0].statements.size() == out[1].statements.size());
}

TEST_CASE("uniformize rejects an empty or insufficient alphabet") {
    Program p = from_kinds({"add"}, "u");
    CHECK_THROWS_AS(uniformize({p}, {}, 1), CompileError);
    CHECK_THROWS_AS(uniformize({p}, {"mul"}, 1), CompileError);
}

TEST_CASE("uniformized junk never touches real variables") {
    auto out = uniformize({p1(), p2()}, default_alphabet({p1(), p2()}), 11);
    for (const auto& p : out) {
        for (const auto& s : p.statements) {
            if (!s.is_junk) continue;
            if (const auto* a = std::get_if<AssignInst>(&s.inst))
                CHECK(a->target.rfind("__jnk_", 0) == 0);
            CHECK((s.predicate.kind == PredRef::Kind::Junk));
        }
    }
}

TEST_CASE("interleaving preserves per-program order and reachable merges") {
    Program a = from_kinds({"add", "mul"}, "a");
    Program b = from_kinds({"div"}, "b");
    std::set<std::string> seen;
    for (uint64_t seed = 0; seed < 10000; ++seed) {
        Interleaved merged = interleave({a, b}, seed);
        REQUIRE(merged.statements.size() == 3);
        std::string shape;
        for (const auto& ms : merged.statements)
            shape += ms.program == 0 ? 'a' : 'b';
        seen.insert(shape);
    }
    CHECK(seen == std::set<std::string>{"aab", "aba", "baa"});
}

TEST_CASE("single program interleaves to the identity sequence") {
    Program a = from_kinds({"add", "mul", "div"}, "a");
    Interleaved merged = interleave({a}, 99);
    REQUIRE(merged.statements.size() == 3);
    for (size_t i = 0; i < 3; ++i) CHECK(merged.statements[i].stmt == a.statements[i]);
}

TEST_CASE("first draw follows remaining-size weights") {
    Program a = from_kinds({"add", "add", "add"}, "a");
    Program b = from_kinds({"mul"}, "b");
    uint64_t first_a = 0;
    const uint64_t trials = 100000;
    for (uint64_t seed = 0; seed < trials; ++seed) {
        Interleaved merged = interleave({a, b}, seed);
        if (merged.statements[0].program == 0) ++first_a;
    }
    double freq = static_cast<double>(first_a) / trials;
    CHECK(freq == doctest::Approx(0.75).epsilon(0.027)); // +-0.02 absolute
}

TEST_CASE("id miner output lands in the right congruence class") {
    IdMiner miner(109, 1'000'000, 42);
    std::set<uint64_t> seen;
    for (int i = 0; i < 200; ++i) {
        uint64_t r = miner.mine(24);
        CHECK(r % 109 == 24);
        CHECK(r > 109);
        CHECK(r < 1'000'000);
        CHECK(seen.insert(r).second); // non-repetitive
    }
    // the worked value is a legitimate member of the class
    CHECK(278083 % 109 == 24);
}

TEST_CASE("each occurrence of a label gets a distinct id (sk=38)") {
    IdMiner miner(38, 1'000'000, 1);
    std::set<uint64_t> ids;
    for (int i = 0; i < 50; ++i) ids.insert(miner.mine(4));
    CHECK(ids.size() == 50);
    for (uint64_t r : ids) CHECK(r % 38 == 4);
}

TEST_CASE("congruence class exhaustion raises") {
    // classes modulo 50 below 1000: k = 1..19 for x=1, so the 20th draw fails
    IdMiner miner(50, 1000, 3);
    for (int i = 0; i < 19; ++i) miner.mine(1);
    CHECK_THROWS_AS(miner.mine(1), CompileError);
}

TEST_CASE("compile produces fresh large ids and sound residues") {
    CompileConfig cfg;
    cfg.seed = 5;
    CompileResult r = compile({p1(), p2()}, cfg);
    auto ids = r.program.all_ids();
    CHECK(!ids.empty());
    std::set<uint64_t> distinct(ids.begin(), ids.end());
    CHECK(distinct.size() == ids.size()); // pairwise distinct
    for (uint64_t id : ids) {
        CHECK(id > r.key.sk);
        CHECK(id < r.key.id_bound);
        // congruence soundness against the trusted map
        CHECK(id % r.key.sk == r.provenance.id_to_clear.at(id));
    }
    CHECK(r.provenance.stmt_origin.size() == r.program.statements.size());
}

TEST_CASE("order preservation survives the whole pipeline") {
    CompileConfig cfg;
    cfg.seed = 8;
    CompileResult r = compile({p1(), p2()}, cfg);
    // subsequence of merged statements with provenance p1 matches p1's order
    std::vector<std::string> got;
    for (size_t i = 0; i < r.program.statements.size(); ++i)
        if (r.provenance.stmt_origin[i] == "p1") got.push_back(r.program.opcode_of(i));
    std::vector<std::string> want;
    for (const auto& s : p1().statements) want.push_back(opcode_kind(s));
    CHECK(got == want);
}

TEST_CASE("different seeds give different artifacts") {
    for (uint64_t base : {1, 11, 21, 31, 41, 51, 61, 71, 81, 91}) {
        CompileConfig a, b;
        a.seed = base;
        b.seed = base + 5;
        std::string ta = compile({p1(), p2()}, a).program.to_text();
        std::string tb = compile({p1(), p2()}, b).program.to_text();
        CHECK(ta != tb);
    }
}

TEST_CASE("same seeds give identical artifacts") {
    CompileConfig cfg;
    cfg.seed = 77;
    CompileResult a = compile({p1(), p2()}, cfg);
    CompileResult b = compile({p1(), p2()}, cfg);
    CHECK(a.program.to_text() == b.program.to_text());
    CHECK(a.image == b.image);
    CHECK(a.key.sk == b.key.sk);
}

TEST_CASE("degenerate pipeline: single program, no junk") {
    CompileConfig cfg;
    cfg.uniformize = false;
    cfg.seed = 3;
    CompileResult r = compile({p1()}, cfg);
    TeeRuntime tee(r.key, r.image);
    Evaluator eval(r.program, tee);
    RunResult out = eval.run();
    InterpResult want = interpret(p1());
    CHECK(out.outputs == want.outputs);
}

TEST_CASE("size bound respects the junk ratio") {
    CompileConfig cfg;
    cfg.seed = 4;
    uint64_t original = p1().statements.size() + p2().statements.size();
    CompileResult r = compile({p1(), p2()}, cfg);
    CHECK(r.program.statements.size() <= cfg.junk_ratio * original);
    cfg.junk_ratio = 1.01; // too tight for uniformization
    CHECK_THROWS_AS(compile({p1(), p2()}, cfg), CompileError);
}

TEST_CASE("junk programs knob adds decoy statements") {
    CompileConfig with, without;
    with.seed = without.seed = 6;
    with.junk_programs = 2;
    CompileResult a = compile({p1(), p2()}, with);
    CompileResult b = compile({p1(), p2()}, without);
    CHECK(a.program.statements.size() > b.program.statements.size());
    uint64_t junk = 0;
    for (const auto& origin : a.provenance.stmt_origin)
        if (origin == ProvenanceMap::kJunk) ++junk;
    CHECK(junk > 0);
}

TEST_CASE("listing text round trips") {
    CompileConfig cfg;
    cfg.seed = 15;
    CompileResult r = compile({p1(), p2()}, cfg);
    std::string text = r.program.to_text();
    ObfProgram back = ObfProgram::from_text(text);
    CHECK(back.to_text() == text);
    CHECK(back.page_bits == r.program.page_bits);
    REQUIRE(back.statements.size() == r.program.statements.size());
    for (size_t i = 0; i < back.statements.size(); ++i)
        CHECK(back.opcode_of(i) == r.program.opcode_of(i));
}
