// Times the OpenMP kernels against the serial reference paths.  Both modes
// run the same code with the pragma toggled, so the outputs must match
// bit for bit; this harness checks that while it measures.

#include <chrono>
#include <cstdio>
#include <string>

#include "jumplab/detector.hpp"
#include "jumplab/generator.hpp"
#include "jumplab/parallel.hpp"
#include "jumplab/strategies.hpp"

using namespace jumplab;

namespace {

double seconds(std::chrono::steady_clock::time_point a,
               std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return seconds(t0, std::chrono::steady_clock::now());
}

void row(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-22s %9.3fs %9.3fs %7.2fx   %s\n", name, serial, parallel,
                parallel > 0.0 ? serial / parallel : 0.0, identical ? "identical" : "DIFFER");
}

ModelSpec noisy_jump_model() {
    ModelSpec m;
    m.initial_price = 10.0;
    m.base.kind = BaseKind::GaussianWalk;
    m.base.sigma_vol = 0.2;
    JumpSpec j;
    j.time.at = 1.0;
    j.size.kind = SizeKind::SignedUniform;
    j.size.lo = 0.1;
    j.size.hi = 0.3;
    j.size.p_first = 0.5;
    j.predictability = Predictability::DirectionOnly;
    m.jumps.push_back(j);
    return m;
}

bool same_paths(const std::vector<PathSample>& a, const std::vector<PathSample>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].values != b[i].values || a[i].left != b[i].left) return false;
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n_paths = 20000;
    if (argc > 1) n_paths = std::stoull(argv[1]);

    std::printf("threads available: %d\n", max_threads());
    std::printf("%-22s %10s %10s %8s\n", "kernel", "serial", "parallel", "speedup");

    const TimeGrid grid{256, 2.0};
    PathGenerator gen(noisy_jump_model(), grid);

    std::vector<PathSample> ps, pp;
    const double t_ser = timed([&] { ps = sample_paths(gen, n_paths, 7, Exec::Serial); });
    const double t_par = timed([&] { pp = sample_paths(gen, n_paths, 7, Exec::Parallel); });
    row("sample_paths", t_ser, t_par, same_paths(ps, pp));

    FlashStrategy strat = make_sure_profit_strategy(gen);
    EvalOptions os, op;
    os.n_max = op.n_max = 8;
    os.exec = Exec::Serial;
    op.exec = Exec::Parallel;
    GainsReport rs, rp;
    const double e_ser = timed([&] { rs = evaluate_flash(strat, ps, os); });
    const double e_par = timed([&] { rp = evaluate_flash(strat, ps, op); });
    row("evaluate_flash", e_ser, e_par,
        rs.gap_by_n == rp.gap_by_n && rs.final_by_n == rp.final_by_n);

    const auto family = enumerate_increment_trees(2, 2, {-1, 0, 1});
    EquivalenceReport qs, qp;
    const double v_ser = timed([&] {
        for (int i = 0; i < 20; ++i) qs = verify_equivalence(family, Exec::Serial);
    });
    const double v_par = timed([&] {
        for (int i = 0; i < 20; ++i) qp = verify_equivalence(family, Exec::Parallel);
    });
    row("verify_equivalence", v_ser, v_par, qs.mismatches == qp.mismatches &&
                                                qs.trees_with_findings == qp.trees_with_findings);
    return 0;
}
