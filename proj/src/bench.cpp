#include "decorr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

#include <nlohmann/json.hpp>

#include "decorr/compiler.hpp"
#include "decorr/evaluator.hpp"
#include "decorr/samples.hpp"

namespace decorr {

nlohmann::json BenchReport::to_json() const {
    return {{"p1_solo_seconds", p1_solo}, {"p2_solo_seconds", p2_solo},
            {"solo_sum_seconds", solo_sum}, {"merged_seconds", merged},
            {"overhead_percent", overhead * 100.0}, {"repetitions", repetitions}};
}

namespace {

double median_of_means(std::vector<double> samples) {
    // means of pairs, then the median; robust to timer spikes
    std::vector<double> means;
    for (size_t i = 0; i + 1 < samples.size(); i += 2)
        means.push_back(0.5 * (samples[i] + samples[i + 1]));
    if (means.empty()) means = samples;
    std::sort(means.begin(), means.end());
    return means[means.size() / 2];
}

double time_run(const CompileResult& compiled, uint64_t fuel) {
    TeeRuntime tee(compiled.key, compiled.image);
    Evaluator eval(compiled.program, tee);
    auto start = std::chrono::steady_clock::now();
    eval.run(fuel);
    auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(end - start).count();
}

double measure(const std::vector<Program>& programs, const BenchConfig& cfg,
               uint64_t shuffle_period) {
    CompileConfig cc;
    cc.seed = cfg.seed;
    cc.junk_seed = mix_seed(cfg.seed, 0x6e11u);
    cc.perm_seed = mix_seed(cfg.seed, 0x9e77u);
    cc.uniformize = cfg.uniformize;
    cc.shuffle_period = shuffle_period;
    CompileResult compiled = compile(programs, cc);
    std::vector<double> samples;
    samples.reserve(static_cast<size_t>(cfg.repetitions));
    for (int i = 0; i < cfg.repetitions; ++i) samples.push_back(time_run(compiled, cfg.fuel));
    return median_of_means(std::move(samples));
}

} // namespace

BenchReport run_bench(const BenchConfig& cfg) {
    Program p1 = make_average_program(cfg.p1_iterations);
    Program p2 = make_dot_product_program(cfg.p2_iterations);
    // solo runs use the merged run's shuffle period so the per-access cost is
    // comparable; the measured difference is the cost of merging itself
    uint64_t period = cfg.shuffle_period ? cfg.shuffle_period : 2;

    BenchReport report;
    report.repetitions = cfg.repetitions;
    report.p1_solo = measure({p1}, cfg, period);
    report.p2_solo = measure({p2}, cfg, period);
    report.solo_sum = report.p1_solo + report.p2_solo;
    report.merged = measure({p1, p2}, cfg, period);
    report.overhead = report.merged / report.solo_sum - 1.0;
    return report;
}

} // namespace decorr
