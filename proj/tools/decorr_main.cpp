#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "decorr/adversary.hpp"
#include "decorr/artifacts.hpp"
#include "decorr/bench.hpp"
#include "decorr/compiler.hpp"
#include "decorr/evaluator.hpp"
#include "decorr/frontend.hpp"

namespace fs = std::filesystem;
using namespace decorr;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitFuel = 3;

struct CompileOptions {
    std::vector<std::string> inputs;
    std::string out_dir;
    CompileConfig config;
};

int cmd_compile(const CompileOptions& opt) {
    std::vector<Program> programs;
    for (const auto& path : opt.inputs) {
        std::string source;
        try {
            source = read_text_file(path);
        } catch (const Error& e) {
            std::cerr << e.what() << "\n";
            return kExitUsage;
        }
        std::string name = fs::path(path).stem().string();
        try {
            SProgram sp = parse_structured(source, name);
            Program p = desugar_if(sp);
            auto diags = validate(p);
            if (!diags.empty()) {
                for (const auto& d : diags) std::cerr << format_diagnostic(path, d) << "\n";
                return kExitUsage;
            }
            programs.push_back(std::move(p));
        } catch (const ParseError& e) {
            std::cerr << path << ":" << e.loc.line << ":" << e.loc.col << ": " << e.what() << "\n";
            return kExitUsage;
        }
    }
    try {
        CompileResult result = compile(programs, opt.config);
        ArtifactPaths paths{fs::path(opt.out_dir)};
        save_artifacts(result, paths);
        std::cout << "compiled " << programs.size() << " program(s), "
                  << result.program.statements.size() << " statements, data section "
                  << result.layout.total_size << " bytes\n"
                  << "untrusted: " << paths.untrusted_dir().string() << "\n"
                  << "trusted:   " << paths.trusted_dir().string() << "\n";
    } catch (const Error& e) {
        std::cerr << "compile failed: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}

struct RunOptions {
    std::string artifacts;
    uint64_t fuel = 10'000'000;
    uint64_t shuffle_period = UINT64_MAX; // override when set
    bool trace = true;
};

int cmd_run(const RunOptions& opt) {
    ArtifactPaths paths{fs::path(opt.artifacts)};
    try {
        UntrustedArtifacts untrusted = load_untrusted(paths);
        KeyMaterial key = load_key(paths);
        TeeOptions topts;
        topts.shuffle_period_override = opt.shuffle_period;
        TeeRuntime tee(key, untrusted.image, topts);
        Evaluator eval(untrusted.program, tee);
        std::vector<TraceStep> steps;
        TraceSink sink = nullptr;
        if (opt.trace) sink = [&steps](const TraceStep& s) { steps.push_back(s); };
        RunResult result = eval.run(opt.fuel, sink);
        for (const auto& rec : result.outputs)
            std::cout << "\"" << rec.format << "\", " << rec.value << "\n";
        if (opt.trace) write_text_file(paths.trace(), trace_to_jsonl(steps));
        std::cerr << "steps: " << result.steps << ", accesses: " << tee.stats().total_accesses
                  << ", shuffles: " << tee.stats().shuffles << "\n";
    } catch (const FuelExhausted& e) {
        std::cerr << "fuel exhausted: " << e.what() << "\n";
        return kExitFuel;
    } catch (const Error& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}

struct BenchOptions {
    BenchConfig config;
    std::string json_path;
};

int cmd_bench(const BenchOptions& opt) {
    try {
        BenchReport report = run_bench(opt.config);
        std::cout << "P1 solo:  " << report.p1_solo << " s\n"
                  << "P2 solo:  " << report.p2_solo << " s\n"
                  << "sum:      " << report.solo_sum << " s\n"
                  << "merged:   " << report.merged << " s\n"
                  << "overhead: " << report.overhead * 100.0 << " %\n";
        if (!opt.json_path.empty())
            write_text_file(opt.json_path, report.to_json().dump(2) + "\n");
    } catch (const Error& e) {
        std::cerr << "bench failed: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}

struct AnalyzeOptions {
    std::string artifacts;
    bool brute_force = false;
    std::string json_path;
};

int cmd_analyze(const AnalyzeOptions& opt) {
    ArtifactPaths paths{fs::path(opt.artifacts)};
    try {
        UntrustedArtifacts untrusted = load_untrusted(paths);
        ProvenanceMap prov = load_provenance(paths);
        std::vector<TraceStep> trace;
        if (fs::exists(paths.trace())) trace = trace_from_jsonl(read_text_file(paths.trace()));

        // merged composition, junk excluded from program sizes
        std::vector<std::string> names;
        std::map<std::string, uint64_t> counts;
        for (const auto& origin : prov.stmt_origin) {
            if (origin == ProvenanceMap::kJunk) continue;
            if (!counts.count(origin)) names.push_back(origin);
            ++counts[origin];
        }
        std::vector<uint64_t> sizes;
        for (const auto& n : names) sizes.push_back(counts[n]);

        nlohmann::json out;
        std::cout << "programs: " << names.size() << "\n";
        double baseline = baseline_pair_prob(sizes);
        std::cout << "baseline pair probability: " << baseline;
        if (names.size() == 1) std::cout << "  (degenerate: single program)";
        std::cout << "\n";
        out["baseline_pair_prob"] = baseline;

        auto& recon = out["reconstruct_prob"] = nlohmann::json::object();
        for (size_t i = 0; i < names.size(); ++i) {
            double p = reconstruct_prob(sizes, i);
            std::cout << "reconstruct " << names[i] << " (" << sizes[i] << " stmts): " << p << "\n";
            recon[names[i]] = p;
        }

        // per-program opcode distributions over the real statements
        std::vector<std::map<std::string, int>> hists(names.size());
        std::map<std::string, size_t> name_index;
        for (size_t i = 0; i < names.size(); ++i) name_index[names[i]] = i;
        std::set<std::string> opcodes;
        for (size_t i = 0; i < prov.stmt_origin.size(); ++i) {
            const auto& origin = prov.stmt_origin[i];
            if (origin == ProvenanceMap::kJunk) continue;
            std::string kind = untrusted.program.opcode_of(i);
            ++hists[name_index[origin]][kind];
            opcodes.insert(kind);
        }
        auto profile = profile_from_histograms(hists);
        auto& guesses = out["educated_guess"] = nlohmann::json::object();
        for (const auto& op : opcodes) {
            GuessResult g = educated_guess_win(sizes, profile, op);
            std::cout << "educated guess on '" << op << "': win " << g.win << ", advantage "
                      << g.advantage << " (target " << names[g.target] << ")\n";
            guesses[op] = {{"win", g.win}, {"advantage", g.advantage}, {"target", names[g.target]}};
        }

        AttackConfig acfg;
        acfg.residue = opt.brute_force;
        auto reports = trace_attack(trace, untrusted.program, prov, acfg);
        auto& jreports = out["attacks"] = nlohmann::json::array();
        for (const auto& r : reports) {
            std::cout << r.correlator << ": accuracy " << r.accuracy << " vs baseline "
                      << r.baseline << " (" << r.guessed_pairs << " pairs)";
            if (r.vacuous) std::cout << "  [vacuous]";
            if (r.accuracy > r.baseline + 0.1) std::cout << "  INSECURE";
            std::cout << "\n";
            jreports.push_back(r.to_json());
        }
        if (!opt.json_path.empty()) write_text_file(opt.json_path, out.dump(2) + "\n");
    } catch (const Error& e) {
        std::cerr << "analyze failed: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"instruction-decorrelation obfuscation toolchain"};
    app.require_subcommand(1);

    CompileOptions copt;
    auto* compile_cmd = app.add_subcommand("compile", "obfuscate a set of L_cfi programs");
    compile_cmd->add_option("inputs", copt.inputs, ".lcfi source files")
        ->required()
        ->check(CLI::ExistingFile);
    compile_cmd->add_option("-o,--out", copt.out_dir, "artifact directory")->required();
    compile_cmd->add_option("--seed", copt.config.seed, "compile seed");
    compile_cmd->add_option("--junk-seed", copt.config.junk_seed, "junk generation seed");
    compile_cmd->add_option("--perm-seed", copt.config.perm_seed, "page permutation key");
    compile_cmd->add_flag("--no-uniformize", [&copt](int64_t) { copt.config.uniformize = false; },
                          "skip distribution uniformization");
    compile_cmd->add_option("--junk-ratio", copt.config.junk_ratio, "output size cap multiplier");
    compile_cmd->add_option("--junk-programs", copt.config.junk_programs, "decoy program count");
    compile_cmd->add_option("--alpha", copt.config.alpha, "sk lower bound multiplier");
    compile_cmd->add_option("--beta", copt.config.beta, "sk upper bound multiplier");
    compile_cmd->add_option("--id-bound", copt.config.id_bound, "obfuscated id bound");
    compile_cmd->add_option("--page-bits", copt.config.page_bits, "page size exponent");
    compile_cmd->add_option("--counter-bits", copt.config.counter_bits, "counter width");
    compile_cmd->add_option("--shuffle-period", copt.config.shuffle_period,
                            "mean accesses per shuffle (0 = program count)");

    RunOptions ropt;
    auto* run_cmd = app.add_subcommand("run", "execute compiled artifacts");
    run_cmd->add_option("-a,--artifacts", ropt.artifacts, "artifact directory")->required();
    run_cmd->add_option("--fuel", ropt.fuel, "step budget");
    run_cmd->add_option("--shuffle-period", ropt.shuffle_period,
                        "override the compiled shuffle period (0 = never)");
    run_cmd->add_flag("--no-trace", [&ropt](int64_t) { ropt.trace = false; },
                      "skip trace recording");

    BenchOptions bopt;
    auto* bench_cmd = app.add_subcommand("bench", "overhead benchmark (bundled programs)");
    bench_cmd->add_option("--p1-size", bopt.config.p1_iterations, "P1 iterations");
    bench_cmd->add_option("--p2-size", bopt.config.p2_iterations, "P2 iterations");
    bench_cmd->add_option("--reps", bopt.config.repetitions, "repetitions");
    bench_cmd->add_flag("--no-uniformize",
                        [&bopt](int64_t) { bopt.config.uniformize = false; },
                        "measure without junk padding");
    bench_cmd->add_option("--seed", bopt.config.seed, "compile seed");
    bench_cmd->add_option("--shuffle-period", bopt.config.shuffle_period, "shuffle period");
    bench_cmd->add_option("--json", bopt.json_path, "write the report as JSON");

    AnalyzeOptions aopt;
    auto* analyze_cmd = app.add_subcommand("analyze", "formula table and trace attacks");
    analyze_cmd->add_option("-a,--artifacts", aopt.artifacts, "artifact directory")->required();
    analyze_cmd->add_flag("--brute-force", aopt.brute_force, "enable residue brute force");
    analyze_cmd->add_option("--json", aopt.json_path, "write the report as JSON");

    CLI11_PARSE(app, argc, argv);

    if (compile_cmd->parsed()) return cmd_compile(copt);
    if (run_cmd->parsed()) return cmd_run(ropt);
    if (bench_cmd->parsed()) return cmd_bench(bopt);
    if (analyze_cmd->parsed()) return cmd_analyze(aopt);
    return kExitUsage;
}
