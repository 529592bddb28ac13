#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "trw/evaluation.hpp"
#include "trw/rng.hpp"
#include "trw/scene.hpp"

using namespace trw;

namespace {

// direct-from-definition SSIM oracle: per-window loops, no separable filters
double ssim_oracle_plane(const double* a, const double* b, i64 H, i64 W) {
    const int n = 11;
    const double sigma = 1.5, c1 = 1e-4, c2 = 9e-4;
    double w2d[11][11];
    double wsum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double dy = i - 5.0, dx = j - 5.0;
            w2d[i][j] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
            wsum += w2d[i][j];
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w2d[i][j] /= wsum;

    double acc = 0.0;
    i64 count = 0;
    for (i64 y = 0; y + n <= H; ++y)
        for (i64 x = 0; x + n <= W; ++x) {
            double ma = 0, mb = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    ma += w2d[i][j] * a[(y + i) * W + x + j];
                    mb += w2d[i][j] * b[(y + i) * W + x + j];
                }
            double va = 0, vb = 0, cov = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double da = a[(y + i) * W + x + j] - ma;
                    const double db = b[(y + i) * W + x + j] - mb;
                    va += w2d[i][j] * da * da;
                    vb += w2d[i][j] * db * db;
                    cov += w2d[i][j] * da * db;
                }
            acc += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                   ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return acc / static_cast<double>(count);
}

Tensor<double> translating_square_video(int F, int H, int W, double x0, double y0, double vx,
                                        double vy, double intensity = 0.9, double bg = 0.1) {
    Tensor<double> v({F, 3, H, W});
    for (int f = 0; f < F; ++f) {
        const double cx = x0 + vx * f, cy = y0 + vy * f;
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) {
                    const bool inside = std::abs(x + 0.5 - cx) <= 4.0 && std::abs(y + 0.5 - cy) <= 4.0;
                    v.at4(f, c, y, x) = inside ? intensity : bg;
                }
    }
    return v;
}

}  // namespace

TEST_CASE("psnr: identity hits the 100 dB cap, constant offset hits the formula") {
    Tensor<double> x({3, 16, 16});
    for (i64 i = 0; i < x.numel(); ++i) x.ptr()[i] = 0.25 + 0.5 * ((i * 31 % 7) / 7.0);
    CHECK(psnr(x, x) == 100.0);

    Tensor<double> a({3, 16, 16}), b({3, 16, 16});
    a.fill(0.0);
    b.fill(0.5);
    CHECK(psnr(a, b) == doctest::Approx(6.0206).epsilon(1e-4));
}

TEST_CASE("psnr matches a scalar reference loop and is symmetric") {
    RandomEngine rng(1);
    Tensor<double> a({2, 3, 8, 8}), b({2, 3, 8, 8});
    for (i64 i = 0; i < a.numel(); ++i) {
        a.ptr()[i] = rng.uniform();
        b.ptr()[i] = rng.uniform();
    }
    double expect = 0.0;
    const i64 plane = 3 * 8 * 8;
    for (int f = 0; f < 2; ++f) {
        double m = 0.0;
        for (i64 i = 0; i < plane; ++i) {
            const double d = a.ptr()[f * plane + i] - b.ptr()[f * plane + i];
            m += d * d;
        }
        m /= static_cast<double>(plane);
        expect += 10.0 * std::log10(1.0 / m);
    }
    expect /= 2.0;
    CHECK(std::abs(psnr(a, b) - expect) < 1e-10);
    CHECK(psnr(a, b) == psnr(b, a));
    Tensor<double> wrong({2, 3, 8, 9});
    CHECK_THROWS_AS(psnr(a, wrong), std::invalid_argument);
}

TEST_CASE("ssim: identity is exactly 1, anticorrelation is negative") {
    RandomEngine rng(2);
    Tensor<double> x({3, 16, 16});
    for (i64 i = 0; i < x.numel(); ++i) x.ptr()[i] = rng.uniform();
    CHECK(ssim(x, x) == doctest::Approx(1.0).epsilon(1e-12));

    Tensor<double> bin({3, 16, 16}), inv({3, 16, 16});
    for (i64 i = 0; i < bin.numel(); ++i) {
        bin.ptr()[i] = (i % 3 == 0 || (i / 16) % 2 == 0) ? 1.0 : 0.0;
        inv.ptr()[i] = 1.0 - bin.ptr()[i];
    }
    CHECK(ssim(bin, inv) < 0.0);
}

TEST_CASE("ssim matches the definitional oracle on random images") {
    RandomEngine rng(3);
    Tensor<double> a({1, 20, 24}), b({1, 20, 24});
    for (i64 i = 0; i < a.numel(); ++i) {
        a.ptr()[i] = rng.uniform();
        b.ptr()[i] = 0.5 * a.ptr()[i] + 0.5 * rng.uniform();
    }
    const double got = ssim(a, b);
    const double expect = ssim_oracle_plane(a.ptr(), b.ptr(), 20, 24);
    CHECK(std::abs(got - expect) < 1e-8);
    CHECK(std::abs(ssim(a, b) - ssim(b, a)) < 1e-12);
    CHECK(got <= 1.0);
}

TEST_CASE("ssim rejects images smaller than the window") {
    Tensor<double> small({3, 10, 16});
    CHECK_THROWS_AS(ssim(small, small), std::invalid_argument);
}

TEST_CASE("motion direction score: identity, reversal, analytic kinematics") {
    Tensor<double> gt = translating_square_video(6, 48, 48, 10, 24, 5.0, 0.5);
    CHECK(motion_direction_score(gt, gt) == doctest::Approx(1.0).epsilon(1e-9));

    Tensor<double> rev({6, 3, 48, 48});
    const i64 plane = 3 * 48 * 48;
    for (int f = 0; f < 6; ++f)
        std::copy(gt.ptr() + (5 - f) * plane, gt.ptr() + (6 - f) * plane, rev.ptr() + f * plane);
    CHECK(motion_direction_score(rev, gt) == doctest::Approx(-1.0).epsilon(1e-9));

    // centroid track matches the analytic trajectory
    CentroidTrack tr = foreground_centroids(gt);
    REQUIRE(tr.valid);
    const double expect_dx = 5.0 * 5, expect_dy = 0.5 * 5;
    const double cos_sim =
        (tr.dx * expect_dx + tr.dy * expect_dy) /
        (std::hypot(tr.dx, tr.dy) * std::hypot(expect_dx, expect_dy));
    CHECK(cos_sim >= 0.99);
}

TEST_CASE("motion direction score: static video scores 0 against anything") {
    Tensor<double> still = translating_square_video(6, 48, 48, 24, 24, 0.0, 0.0);
    Tensor<double> moving = translating_square_video(6, 48, 48, 10, 24, 4.0, 0.0);
    CHECK(motion_direction_score(still, moving) == 0.0);
}

TEST_CASE("motion direction score is invariant to uniform intensity scaling") {
    Tensor<double> gt = translating_square_video(6, 48, 48, 12, 20, 4.0, -2.0);
    Tensor<double> gen = translating_square_video(6, 48, 48, 14, 22, 3.5, -1.0);
    const double base = motion_direction_score(gen, gt);
    for (double scale : {0.25, 0.6, 1.0}) {
        Tensor<double> gt_s = gt, gen_s = gen;
        for (i64 i = 0; i < gt.numel(); ++i) {
            gt_s.ptr()[i] *= scale;
            gen_s.ptr()[i] *= scale;
        }
        CHECK(motion_direction_score(gen_s, gt_s) == doctest::Approx(base).epsilon(1e-9));
    }
}
