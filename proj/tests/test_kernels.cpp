#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "trw/kernels.hpp"
#include "trw/reference.hpp"
#include "trw/rng.hpp"

using namespace trw;

namespace {

template <typename T>
Tensor<T> random_tensor(RandomEngine& rng, std::vector<i64> shape, double scale = 1.0) {
    Tensor<T> t(std::move(shape));
    rng.fill_normal(t.ptr(), t.numel(), scale);
    return t;
}

template <typename T>
double max_abs_diff(const T* a, const T* b, i64 n) {
    double m = 0.0;
    for (i64 i = 0; i < n; ++i) m = std::max(m, std::abs(double(a[i]) - double(b[i])));
    return m;
}

}  // namespace

TEST_CASE("gemm matches the naive reference for all transpose combinations") {
    RandomEngine rng(42);
    for (auto [M, N, K] : {std::tuple<i64, i64, i64>{17, 33, 9}, {64, 256, 96}, {1, 1, 1},
                           {8, 16, 128}, {5, 70, 23}}) {
        for (Trans ta : {Trans::N, Trans::T}) {
            for (Trans tb : {Trans::N, Trans::T}) {
                const i64 lda = ta == Trans::N ? K : M;
                const i64 ldb = tb == Trans::N ? N : K;
                Tensor<double> A({ta == Trans::N ? M : K, lda});
                Tensor<double> B({tb == Trans::N ? K : N, ldb});
                rng.fill_normal(A.ptr(), A.numel());
                rng.fill_normal(B.ptr(), B.numel());
                Tensor<double> C({M, N}), Cref({M, N});
                rng.fill_normal(C.ptr(), C.numel());
                Cref.data = C.data;

                gemm(ta, tb, M, N, K, A.ptr(), lda, B.ptr(), ldb, C.ptr(), N, true);
                ref::gemm(ta, tb, M, N, K, A.ptr(), lda, B.ptr(), ldb, Cref.ptr(), N, true);
                const double scale = std::sqrt(double(K));
                CHECK(max_abs_diff(C.ptr(), Cref.ptr(), C.numel()) < 1e-12 * scale);
            }
        }
    }
}

TEST_CASE("gemm output is identical with and without threading") {
    RandomEngine rng(7);
    Tensor<float> A({61, 147}), B({147, 83});
    rng.fill_normal(A.ptr(), A.numel());
    rng.fill_normal(B.ptr(), B.numel());
    Tensor<float> C1({61, 83}), C2({61, 83});
    gemm(Trans::N, Trans::N, 61, 83, 147, A.ptr(), 147, B.ptr(), 83, C1.ptr(), 83, false, true);
    gemm(Trans::N, Trans::N, 61, 83, 147, A.ptr(), 147, B.ptr(), 83, C2.ptr(), 83, false, false);
    for (i64 i = 0; i < C1.numel(); ++i) CHECK(C1.ptr()[i] == C2.ptr()[i]);
}

TEST_CASE("conv2d_forward matches the direct reference") {
    RandomEngine rng(3);
    for (auto [F, Cin, H, W, Cout, k, stride, pad] :
         {std::tuple<int, int, int, int, int, int, int, int>{2, 3, 8, 8, 5, 3, 1, 1},
          {1, 4, 7, 9, 2, 3, 2, 1},
          {3, 2, 5, 5, 4, 1, 1, 0}}) {
        auto x = random_tensor<double>(rng, {F, Cin, H, W});
        auto w = random_tensor<double>(rng, {Cout, Cin, k, k});
        auto b = random_tensor<double>(rng, {Cout});
        Tensor<double> y, yref;
        ConvScratch<double> scratch;
        conv2d_forward(x, w, b.ptr(), stride, pad, y, scratch);
        ref::conv2d(x, w, b.ptr(), stride, pad, yref);
        REQUIRE(y.shape == yref.shape);
        CHECK(max_abs_diff(y.ptr(), yref.ptr(), y.numel()) < 1e-12);
    }
}

TEST_CASE("conv2d_backward matches central finite differences") {
    RandomEngine rng(11);
    const int F = 2, Cin = 3, H = 5, W = 4, Cout = 2, k = 3;
    auto x = random_tensor<double>(rng, {F, Cin, H, W});
    auto w = random_tensor<double>(rng, {Cout, Cin, k, k}, 0.5);
    auto b = random_tensor<double>(rng, {Cout});
    ConvScratch<double> scratch;

    // loss = sum(conv(x) * G) for a fixed random G
    Tensor<double> y;
    conv2d_forward(x, w, b.ptr(), 1, 1, y, scratch);
    auto G = random_tensor<double>(rng, y.shape);

    Tensor<double> dx, dw({Cout, Cin, k, k});
    std::vector<double> db(Cout, 0.0);
    conv2d_backward(x, w, G, 1, 1, &dx, &dw, db.data(), scratch);

    auto loss = [&](const Tensor<double>& xx, const Tensor<double>& ww, const double* bb) {
        Tensor<double> yy;
        ConvScratch<double> s2;
        conv2d_forward(xx, ww, bb, 1, 1, yy, s2);
        return dot(yy.numel(), yy.ptr(), G.ptr());
    };

    const double h = 1e-6;
    for (i64 i = 0; i < x.numel(); i += 7) {
        Tensor<double> xp = x, xm = x;
        xp.ptr()[i] += h;
        xm.ptr()[i] -= h;
        const double fd = (loss(xp, w, b.ptr()) - loss(xm, w, b.ptr())) / (2 * h);
        CHECK(std::abs(fd - dx.ptr()[i]) < 1e-6);
    }
    for (i64 i = 0; i < w.numel(); i += 5) {
        Tensor<double> wp = w, wm = w;
        wp.ptr()[i] += h;
        wm.ptr()[i] -= h;
        const double fd = (loss(x, wp, b.ptr()) - loss(x, wm, b.ptr())) / (2 * h);
        CHECK(std::abs(fd - dw.ptr()[i]) < 1e-6);
    }
    for (i64 i = 0; i < Cout; ++i) {
        std::vector<double> bp(b.ptr(), b.ptr() + Cout), bm(bp);
        bp[i] += h;
        bm[i] -= h;
        const double fd = (loss(x, w, bp.data()) - loss(x, w, bm.data())) / (2 * h);
        CHECK(std::abs(fd - db[i]) < 1e-6);
    }
}

TEST_CASE("groupnorm forward matches reference and normalizes") {
    RandomEngine rng(5);
    auto x = random_tensor<double>(rng, {2, 8, 4, 4}, 2.0);
    auto gamma = random_tensor<double>(rng, {8});
    auto beta = random_tensor<double>(rng, {8});
    Tensor<double> y, yref, mean, rstd;
    groupnorm_forward(x, 4, gamma.ptr(), beta.ptr(), 1e-5, y, mean, rstd);
    ref::groupnorm(x, 4, gamma.ptr(), beta.ptr(), 1e-5, yref);
    CHECK(max_abs_diff(y.ptr(), yref.ptr(), y.numel()) < 1e-12);

    // with identity affine, per (frame, group) stats are ~(0, 1)
    Tensor<double> y2, m2, r2;
    groupnorm_forward<double>(x, 4, nullptr, nullptr, 1e-10, y2, m2, r2);
    const i64 m = 2 * 16;
    for (int f = 0; f < 2; ++f)
        for (int g = 0; g < 4; ++g) {
            double s = 0.0;
            for (i64 i = 0; i < m; ++i) s += y2.ptr()[(f * 8 + g * 2) * 16 + i];
            CHECK(std::abs(s / m) < 1e-10);
        }
}

TEST_CASE("groupnorm backward matches central finite differences") {
    RandomEngine rng(13);
    auto x = random_tensor<double>(rng, {2, 4, 3, 3});
    auto gamma = random_tensor<double>(rng, {4});
    auto beta = random_tensor<double>(rng, {4});
    Tensor<double> y, mean, rstd;
    groupnorm_forward(x, 2, gamma.ptr(), beta.ptr(), 1e-6, y, mean, rstd);
    auto G = random_tensor<double>(rng, y.shape);

    Tensor<double> dx;
    std::vector<double> dgamma(4, 0.0), dbeta(4, 0.0);
    groupnorm_backward(x, 2, gamma.ptr(), mean, rstd, G, dx, dgamma.data(), dbeta.data());

    auto loss = [&](const Tensor<double>& xx, const double* gg) {
        Tensor<double> yy, mm, rr;
        groupnorm_forward(xx, 2, gg, beta.ptr(), 1e-6, yy, mm, rr);
        return dot(yy.numel(), yy.ptr(), G.ptr());
    };
    const double h = 1e-6;
    for (i64 i = 0; i < x.numel(); i += 3) {
        Tensor<double> xp = x, xm = x;
        xp.ptr()[i] += h;
        xm.ptr()[i] -= h;
        const double fd = (loss(xp, gamma.ptr()) - loss(xm, gamma.ptr())) / (2 * h);
        CHECK(std::abs(fd - dx.ptr()[i]) < 1e-6);
    }
    for (int i = 0; i < 4; ++i) {
        std::vector<double> gp(gamma.ptr(), gamma.ptr() + 4), gm(gp);
        gp[i] += h;
        gm[i] -= h;
        const double fd = (loss(x, gp.data()) - loss(x, gm.data())) / (2 * h);
        CHECK(std::abs(fd - dgamma[i]) < 1e-6);
    }
}

TEST_CASE("silu matches reference and its derivative") {
    RandomEngine rng(17);
    Tensor<double> x({1000});
    rng.fill_normal(x.ptr(), x.numel(), 3.0);
    Tensor<double> y({1000}), yref({1000});
    silu_forward(x.ptr(), y.ptr(), x.numel());
    ref::silu(x.ptr(), yref.ptr(), x.numel());
    CHECK(max_abs_diff(y.ptr(), yref.ptr(), x.numel()) < 1e-12);

    Tensor<double> dy({1000}), dx({1000});
    rng.fill_normal(dy.ptr(), dy.numel());
    silu_backward(x.ptr(), dy.ptr(), dx.ptr(), x.numel());
    const double h = 1e-6;
    for (i64 i = 0; i < 1000; i += 97) {
        auto f = [&](double v) { return v / (1.0 + std::exp(-v)); };
        const double fd = (f(x.ptr()[i] + h) - f(x.ptr()[i] - h)) / (2 * h) * dy.ptr()[i];
        CHECK(std::abs(fd - dx.ptr()[i]) < 1e-6);
    }
}

TEST_CASE("im2col/col2im are adjoint") {
    // <im2col(x), c> == <x, col2im(c)> for random c: the backward scatter is
    // exactly the transpose of the forward gather.
    RandomEngine rng(23);
    const int F = 2, C = 3, H = 6, W = 5, k = 3, stride = 2, pad = 1;
    auto x = random_tensor<double>(rng, {F, C, H, W});
    const i64 OH = conv_out_dim(H, k, stride, pad), OW = conv_out_dim(W, k, stride, pad);
    const i64 rows = C * k * k, ncol = F * OH * OW;
    std::vector<double> col(static_cast<std::size_t>(rows * ncol));
    im2col(x, k, k, stride, pad, col.data());
    Tensor<double> c({rows, ncol});
    rng.fill_normal(c.ptr(), c.numel());
    Tensor<double> back({F, C, H, W});
    back.zero();
    col2im_add(c.ptr(), F, C, H, W, k, k, stride, pad, back);
    const double lhs = dot(static_cast<i64>(col.size()), col.data(), c.ptr());
    const double rhs = dot(x.numel(), x.ptr(), back.ptr());
    CHECK(std::abs(lhs - rhs) < 1e-9);
}
