#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "decorr/compiler.hpp"
#include "decorr/evaluator.hpp"
#include "decorr/frontend.hpp"
#include "decorr/interp.hpp"
#include "decorr/samples.hpp"
#include "decorr/semantics.hpp"

using namespace decorr;

namespace {

struct Compiled {
    CompileResult result;
    std::vector<TraceStep> trace;
    RunResult out;
};

Compiled run_sources(const std::vector<std::pair<std::string, std::string>>& sources,
                     CompileConfig cfg = {}, uint64_t fuel = 10'000'000) {
    std::vector<Program> programs;
    for (const auto& [src, name] : sources) programs.push_back(parse_program(src, name));
    Compiled c{compile(programs, cfg), {}, {}};
    TeeRuntime tee(c.result.key, c.result.image);
    Evaluator eval(c.result.program, tee);
    c.out = eval.run(fuel, [&c](const TraceStep& s) { c.trace.push_back(s); });
    return c;
}

std::multiset<std::pair<std::string, int64_t>> as_multiset(const std::vector<OutputRecord>& v) {
    std::multiset<std::pair<std::string, int64_t>> m;
    for (const auto& r : v) m.insert({r.format, r.value});
    return m;
}

} // namespace

TEST_CASE("predicate line guard") {
    CHECK(pred_line_admits(5, -1));
    CHECK(!pred_line_admits(5, 7));
    CHECK(pred_line_admits(3, -1));
    CHECK(!pred_line_admits(4, 4)); // revisiting the same line is blocked
}

TEST_CASE("sum loop alone prints 45") {
    CompileConfig cfg;
    cfg.uniformize = false;
    Compiled c = run_sources({{sum_loop_source(), "p1"}}, cfg);
    REQUIRE(c.out.outputs.size() == 1);
    CHECK(c.out.outputs[0] == OutputRecord{"sum1", 45});
    // the loop condition is evaluated for i = 0..10
    int lt_runs = 0;
    for (const auto& s : c.trace)
        if (s.op == "lt" && s.executed) ++lt_runs;
    CHECK(lt_runs == 11);
}

TEST_CASE("merged pair prints 45 and 2046") {
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        CompileConfig cfg;
        cfg.seed = seed;
        Compiled c = run_sources({{sum_loop_source(), "p1"}, {powers_loop_source(), "p2"}}, cfg);
        CHECK(as_multiset(c.out.outputs) ==
              std::multiset<std::pair<std::string, int64_t>>{{"sum1", 45}, {"sum2", 2046}});
    }
}

TEST_CASE("junk neutrality: uniformization never changes outputs") {
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        CompileConfig plain, junky;
        plain.seed = junky.seed = seed;
        plain.uniformize = false;
        Compiled a = run_sources({{sum_loop_source(), "p1"}, {powers_loop_source(), "p2"}}, plain);
        Compiled b = run_sources({{sum_loop_source(), "p1"}, {powers_loop_source(), "p2"}}, junky);
        CHECK(as_multiset(a.out.outputs) == as_multiset(b.out.outputs));
    }
}

TEST_CASE("functionality preservation against the reference interpreter") {
    std::vector<std::pair<std::string, std::string>> sources = {
        {sum_loop_source(), "p1"}, {powers_loop_source(), "p2"}};
    auto want = as_multiset(interpret(parse_program(sources[0].first, "p1")).outputs);
    for (const auto& rec : interpret(parse_program(sources[1].first, "p2")).outputs)
        want.insert({rec.format, rec.value});
    for (uint64_t seed = 21; seed <= 30; ++seed) {
        CompileConfig cfg;
        cfg.seed = seed;
        cfg.junk_seed = seed * 3;
        Compiled c = run_sources(sources, cfg);
        CHECK(as_multiset(c.out.outputs) == want);
    }
}

TEST_CASE("all-false predicates: one sweep, no output") {
    CompileConfig cfg;
    cfg.uniformize = false;
    Compiled c = run_sources({{"bool c\nc : print(\"x\", 1)", "q"}}, cfg);
    CHECK(c.out.outputs.empty());
    CHECK(c.out.steps == 1);
}

TEST_CASE("goto with empty reset lists is a pure jump") {
    // the jump-back re-arms nothing, so nothing executes twice
    const char* src = R"(
bool g
true : g = true
$top
g : g = g
g : goto(top, [], [])
)";
    CompileConfig cfg;
    cfg.uniformize = false;
    Compiled c = run_sources({{src, "j"}}, cfg);
    CHECK(c.out.outputs.empty());
    std::map<uint32_t, int> executed;
    for (const auto& s : c.trace)
        if (s.executed) ++executed[s.stmt];
    for (const auto& [stmt, n] : executed) CHECK(n == 1);
}

TEST_CASE("the last-line word is stamped even when the predicate is false") {
    // c is false on the first visit; after the jump back c is true, but the
    // stamped line blocks re-execution, so the print never fires
    const char* src = R"(
bool c
bool g
true : g = true
$top
c : print("a", 7)
true : c = true
g : goto(top, [], [])
)";
    CompileConfig cfg;
    cfg.uniformize = false;
    Compiled c = run_sources({{src, "s"}}, cfg);
    CHECK(c.out.outputs.empty());
}

TEST_CASE("goto resets re-enable exactly one iteration per pass") {
    CompileConfig cfg;
    cfg.uniformize = false;
    Compiled c = run_sources({{sum_loop_source(), "p1"}}, cfg);
    // sum加 executes exactly 10 times (i = 0..9)
    int adds_to_sum = 0;
    for (const auto& s : c.trace)
        if (s.op == "add" && s.executed) ++adds_to_sum;
    CHECK(adds_to_sum == 20); // sum += i and i += 1, ten times each
}

TEST_CASE("fuel exhaustion raises") {
    const char* src = R"(
$spin
true : goto(spin, [true], [])
)";
    std::vector<Program> programs{parse_program(src, "loop")};
    CompileConfig cfg;
    cfg.uniformize = false;
    CompileResult r = compile(programs, cfg);
    TeeRuntime tee(r.key, r.image);
    Evaluator eval(r.program, tee);
    CHECK_THROWS_AS(eval.run(1000), FuelExhausted);
}

TEST_CASE("division by zero raises") {
    const char* src = "int a\nint b\ntrue : a = 3 / b";
    std::vector<Program> programs{parse_program(src, "dz")};
    CompileConfig cfg;
    cfg.uniformize = false;
    CompileResult r = compile(programs, cfg);
    TeeRuntime tee(r.key, r.image);
    Evaluator eval(r.program, tee);
    CHECK_THROWS_AS(eval.run(), ExecError);
}

TEST_CASE("polynomial slowdown stays within the junk ratio") {
    uint64_t solo_steps = interpret(parse_program(sum_loop_source(), "p1")).steps +
                          interpret(parse_program(powers_loop_source(), "p2")).steps;
    CompileConfig cfg;
    cfg.seed = 9;
    Compiled c = run_sources({{sum_loop_source(), "p1"}, {powers_loop_source(), "p2"}}, cfg);
    CHECK(c.out.steps <= cfg.junk_ratio * solo_steps);
}

TEST_CASE("trace steps carry only untrusted observables") {
    CompileConfig cfg;
    cfg.seed = 31;
    Compiled c = run_sources({{sum_loop_source(), "p1"}, {powers_loop_source(), "p2"}}, cfg);
    REQUIRE(!c.trace.empty());
    for (const auto& s : c.trace) {
        for (uint64_t id : s.ids) CHECK(id > c.result.key.sk);
        for (uint32_t addr : s.phys) CHECK(addr < 512);
        CHECK(s.stmt < c.result.program.statements.size());
    }
}

TEST_CASE("interpreter and evaluator agree on wrapping arithmetic") {
    const char* src = R"(
int a
int b
true : a = 2000000000
true : b = a + a
true : print("wrap", b)
true : print("div", b / 3)
true : print("mod", b % 7)
true : print("neg", -b)
)";
    CompileConfig cfg;
    cfg.uniformize = false;
    Compiled c = run_sources({{src, "w"}}, cfg);
    InterpResult want = interpret(parse_program(src, "w"));
    CHECK(c.out.outputs == want.outputs);
    CHECK(c.out.outputs[0].value == wrap32(4000000000ll));
}
