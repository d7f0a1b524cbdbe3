// Times the fuzz seed sweep serially and with the OpenMP parallel loop, and
// checks that both produce the identical merged report.

#include "sv/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace sv;

namespace {

double timed_ms(fuzz_params fp, int jobs, std::string& render_out) {
    fp.jobs = jobs;
    auto start = std::chrono::steady_clock::now();
    auto report = run_fuzz(fp);
    auto ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    render_out = report.render();
    return ms;
}

} // namespace

int main(int argc, char** argv) {
    fuzz_params fp;
    fp.protocol = protocol_kind::simple_ack;
    fp.nodes = 5;
    fp.steps = 5000;
    fp.seed_from = 0;
    fp.seed_to = 15;
    fp.p = 0.5;
    if (argc > 1) fp.steps = static_cast<size_t>(std::strtoull(argv[1], nullptr, 10));
    if (argc > 2) fp.seed_to = std::strtoull(argv[2], nullptr, 10) - 1;

#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    std::printf("fuzz sweep: %llu seeds x %zu steps, %d hardware threads\n",
                static_cast<unsigned long long>(fp.seed_to - fp.seed_from + 1), fp.steps,
                threads);

    std::string serial_report, parallel_report;
    double serial_ms = timed_ms(fp, 1, serial_report);
    std::printf("serial:   %8.1f ms\n", serial_ms);
    double parallel_ms = timed_ms(fp, 0, parallel_report);
    std::printf("parallel: %8.1f ms  (speedup %.2fx)\n", parallel_ms,
                serial_ms / parallel_ms);

    if (serial_report != parallel_report) {
        std::printf("MISMATCH: parallel report differs from serial\n");
        return 1;
    }
    std::printf("reports identical\n");
    return 0;
}
