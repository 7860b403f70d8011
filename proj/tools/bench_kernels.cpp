// Times the OpenMP kernels against their serial references and checks the
// outputs stay bitwise identical. Emits one CSV row per kernel.

#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "dqsim/algorithms.hpp"
#include "dqsim/kernels.hpp"
#include "dqsim/rng.hpp"
#include "dqsim/sampler.hpp"

using dqsim::kern::cplx;

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = omp_get_wtime();
        fn();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

void report(const char* kernel, std::size_t size, double serial_s, double parallel_s,
            bool bitwise_equal) {
    std::printf("%s,%zu,%d,%.6f,%.6f,%.3f,%s\n", kernel, size, dqsim::kern::thread_count(),
                serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
                bitwise_equal ? "yes" : "NO");
}

std::vector<cplx> random_state(std::size_t n, std::uint64_t seed) {
    dqsim::SplitMix64 rng(seed);
    std::vector<cplx> v(n);
    for (auto& a : v) a = cplx{rng.next_double() - 0.5, rng.next_double() - 0.5};
    return v;
}

}  // namespace

int main() {
    std::printf("kernel,size,threads,serial_ms,parallel_ms,speedup,bitwise_equal\n");

    {  // Hadamard butterfly over a 2^20 statevector
        const std::size_t n = std::size_t{1} << 20;
        auto base = random_state(n, 1);
        auto a = base, b = base;
        const double ts = time_best_of(5, [&] {
            a = base;
            for (int q = 0; q < 8; ++q) dqsim::kern::hadamard_rows_serial(a.data(), n, 1, q);
        });
        const double tp = time_best_of(5, [&] {
            b = base;
            for (int q = 0; q < 8; ++q) dqsim::kern::hadamard_rows_parallel(b.data(), n, 1, q);
        });
        report("hadamard_layer", n, ts, tp,
               std::memcmp(a.data(), b.data(), n * sizeof(cplx)) == 0);
    }

    {  // Complex matrix product, 512 x 512
        const std::size_t n = 512;
        auto a = random_state(n * n, 2);
        auto b = random_state(n * n, 3);
        std::vector<cplx> cs(n * n), cp(n * n);
        const double ts =
            time_best_of(3, [&] { dqsim::kern::matmul_serial(cs.data(), a.data(), b.data(), n); });
        const double tp = time_best_of(
            3, [&] { dqsim::kern::matmul_parallel(cp.data(), a.data(), b.data(), n); });
        report("matmul_complex", n, ts, tp,
               std::memcmp(cs.data(), cp.data(), n * n * sizeof(cplx)) == 0);
    }

    {  // One scaling sweep (column + row normalization) on a 2048 x 2048 matrix
        const std::size_t n = 2048;
        dqsim::SplitMix64 rng(4);
        std::vector<double> base(n * n);
        for (double& x : base) x = rng.next_double();
        std::vector<double> targets(n, 1.0 / static_cast<double>(n));
        std::vector<unsigned char> active(n, 1);
        std::vector<double> ms, mp, fs(n), fp(n);
        const double ts = time_best_of(3, [&] {
            ms = base;
            std::fill(fs.begin(), fs.end(), 1.0);
            dqsim::kern::scale_columns_serial(ms.data(), n, targets.data(), active.data(), fs.data());
            dqsim::kern::scale_rows_serial(ms.data(), n, targets.data(), active.data(), fs.data());
        });
        const double tp = time_best_of(3, [&] {
            mp = base;
            std::fill(fp.begin(), fp.end(), 1.0);
            dqsim::kern::scale_columns_parallel(mp.data(), n, targets.data(), active.data(),
                                                fp.data());
            dqsim::kern::scale_rows_parallel(mp.data(), n, targets.data(), active.data(), fp.data());
        });
        report("scaling_sweep", n, ts, tp,
               std::memcmp(ms.data(), mp.data(), n * n * sizeof(double)) == 0);
    }

    {  // Batch sampling of a search experiment, serial vs parallel shots
        const auto plan = dqsim::build_search_sequence(6, 11, 2, 4, 9);
        dqsim::SamplerOptions opts;
        const std::size_t shots = 20000;
        dqsim::HistoryBatch hs, hp;
        dqsim::kern::set_parallel(false);
        const double ts = time_best_of(
            2, [&] { hs = dqsim::sample_batch(plan.seq, dqsim::DynamicsKind::SD, shots, 7, opts); });
        dqsim::kern::set_parallel(true);
        const double tp = time_best_of(
            2, [&] { hp = dqsim::sample_batch(plan.seq, dqsim::DynamicsKind::SD, shots, 7, opts); });
        bool equal = hs.histories.size() == hp.histories.size();
        for (std::size_t s = 0; equal && s < shots; ++s) {
            equal = hs.histories[s].values == hp.histories[s].values;
        }
        report("sample_batch", shots, ts, tp, equal);
    }

    return 0;
}
