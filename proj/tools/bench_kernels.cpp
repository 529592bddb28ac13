// Kernel throughput comparison: serial reference vs the OpenMP kernels, at
// the shapes the denoiser actually runs.

#include <chrono>
#include <cstdio>
#include <functional>

#include "trw/kernels.hpp"
#include "trw/reference.hpp"
#include "trw/rng.hpp"
#include "trw/threading.hpp"

using namespace trw;

namespace {

double time_of(const std::function<void()>& fn, int iters) {
    fn();  // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < iters; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / iters;
}

void bench_gemm(i64 M, i64 N, i64 K, int iters) {
    RandomEngine rng(1);
    Tensor<float> A({M, K}), B({K, N}), C({M, N});
    rng.fill_normal(A.ptr(), A.numel());
    rng.fill_normal(B.ptr(), B.numel());
    const double flops = 2.0 * M * N * K;

    const double t_ref = time_of(
        [&] { ref::gemm(Trans::N, Trans::N, M, N, K, A.ptr(), K, B.ptr(), N, C.ptr(), N); },
        std::max(1, iters / 8));
    const double t_serial = time_of(
        [&] {
            gemm(Trans::N, Trans::N, M, N, K, A.ptr(), K, B.ptr(), N, C.ptr(), N, false, false);
        },
        iters);
    const double t_omp = time_of(
        [&] {
            gemm(Trans::N, Trans::N, M, N, K, A.ptr(), K, B.ptr(), N, C.ptr(), N, false, true);
        },
        iters);
    std::printf(
        "gemm f32 %4lld x %5lld x %4lld | ref %7.2f GF/s | tiled %7.2f GF/s | omp %7.2f GF/s | "
        "speedup %4.2fx\n",
        static_cast<long long>(M), static_cast<long long>(N), static_cast<long long>(K),
        flops / t_ref * 1e-9, flops / t_serial * 1e-9, flops / t_omp * 1e-9, t_serial / t_omp);
}

void bench_conv(i64 F, i64 Cin, i64 Cout, i64 H, i64 W, int iters) {
    RandomEngine rng(2);
    Tensor<float> x({F, Cin, H, W}), w({Cout, Cin, 3, 3}), b({Cout}), y;
    rng.fill_normal(x.ptr(), x.numel());
    rng.fill_normal(w.ptr(), w.numel());
    ConvScratch<float> s;
    const double flops = 2.0 * F * H * W * Cin * Cout * 9;

    Tensor<float> yref;
    const double t_ref =
        time_of([&] { ref::conv2d(x, w, b.ptr(), 1, 1, yref); }, std::max(1, iters / 8));
    const double t_serial =
        time_of([&] { conv2d_forward(x, w, b.ptr(), 1, 1, y, s, false); }, iters);
    const double t_omp = time_of([&] { conv2d_forward(x, w, b.ptr(), 1, 1, y, s, true); }, iters);
    std::printf(
        "conv3x3 f32 F%lld %3lldc -> %3lldc @%2lldx%-2lld | ref %7.2f GF/s | im2col %7.2f GF/s | "
        "omp %7.2f GF/s | speedup %4.2fx\n",
        static_cast<long long>(F), static_cast<long long>(Cin), static_cast<long long>(Cout),
        static_cast<long long>(H), static_cast<long long>(W), flops / t_ref * 1e-9,
        flops / t_serial * 1e-9, flops / t_omp * 1e-9, t_serial / t_omp);
}

void bench_groupnorm(i64 F, i64 C, i64 H, i64 W, int iters) {
    RandomEngine rng(3);
    Tensor<float> x({F, C, H, W}), gamma({C}), beta({C}), y, yref, mean, rstd;
    rng.fill_normal(x.ptr(), x.numel());
    gamma.fill(1.0f);
    const double bytes = 2.0 * x.numel() * sizeof(float);

    const double t_ref = time_of(
        [&] { ref::groupnorm(x, 8, gamma.ptr(), beta.ptr(), 1e-5f, yref); }, std::max(1, iters / 4));
    const double t_omp = time_of(
        [&] { groupnorm_forward(x, 8, gamma.ptr(), beta.ptr(), 1e-5f, y, mean, rstd, true); },
        iters);
    std::printf(
        "groupnorm f32 (%lld,%lld,%lld,%lld)     | ref %7.2f GB/s | omp %7.2f GB/s | speedup "
        "%4.2fx\n",
        static_cast<long long>(F), static_cast<long long>(C), static_cast<long long>(H),
        static_cast<long long>(W), bytes / t_ref * 1e-9, bytes / t_omp * 1e-9, t_ref / t_omp);
}

}  // namespace

int main() {
    init_threading_from_env();
    std::printf("threads: %d\n\n", thread_cap());

    // denoiser shapes: (M, N, K) = (Cout, F*OH*OW, Cin*9)
    bench_gemm(64, 2048, 864, 30);   // down block 0 @16x16, F=8
    bench_gemm(128, 512, 576, 60);   // down block 1 @8x8
    bench_gemm(256, 128, 1152, 60);  // down block 2 @4x4
    bench_gemm(256, 128, 4608, 30);  // up path @4x4 with skip concat
    bench_gemm(64, 2048, 1728, 20);  // up block 0 @16x16
    std::puts("");
    bench_conv(8, 96, 64, 16, 16, 20);
    bench_conv(8, 128, 128, 8, 8, 40);
    bench_conv(8, 256, 256, 4, 4, 40);
    std::puts("");
    bench_groupnorm(8, 64, 16, 16, 200);
    bench_groupnorm(8, 256, 4, 4, 200);
    return 0;
}
