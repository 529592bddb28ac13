#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "trw/diffusion.hpp"
#include "trw/latent_codec.hpp"
#include "trw/rng.hpp"

using namespace trw;

TEST_CASE("encode with scale 1 is the identity") {
    RandomEngine rng(1);
    Tensor<float> video({2, 3, 4, 4});
    rng.fill_normal(video.ptr(), video.numel());
    LatentVideo<float> lat = encode(video, 1);
    CHECK(lat.data.shape == std::vector<i64>{2, 3, 4, 4});
    for (i64 i = 0; i < video.numel(); ++i) CHECK(lat.data.ptr()[i] == video.ptr()[i]);
}

TEST_CASE("encode (1,3,4,4) with scale 4 is a permutation of the input values") {
    RandomEngine rng(2);
    Tensor<float> video({1, 3, 4, 4});
    rng.fill_normal(video.ptr(), video.numel());
    LatentVideo<float> lat = encode(video, 4);
    REQUIRE(lat.data.shape == std::vector<i64>{1, 48, 1, 1});
    std::vector<float> a(video.data), b(lat.data.data);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
}

TEST_CASE("codec round trips are bitwise exact both ways") {
    RandomEngine rng(3);
    Tensor<float> video({3, 3, 16, 16});
    rng.fill_normal(video.ptr(), video.numel());
    LatentVideo<float> lat = encode(video, 4);
    Tensor<float> back = decode(lat);
    REQUIRE(back.shape == video.shape);
    for (i64 i = 0; i < video.numel(); ++i) CHECK(back.ptr()[i] == video.ptr()[i]);

    // latent -> video -> latent
    LatentVideo<float> lat2;
    lat2.meta = LatentMeta{2, 2, 8, 8};
    lat2.data.resize({2, 12, 4, 4});
    rng.fill_normal(lat2.data.ptr(), lat2.data.numel());
    LatentVideo<float> lat3 = encode(decode(lat2), 2);
    for (i64 i = 0; i < lat2.data.numel(); ++i) CHECK(lat3.data.ptr()[i] == lat2.data.ptr()[i]);
}

TEST_CASE("codec preserves the sum of squares and rejects bad shapes") {
    RandomEngine rng(4);
    Tensor<double> video({2, 3, 8, 8});
    rng.fill_normal(video.ptr(), video.numel());
    LatentVideo<double> lat = encode(video, 4);
    double s1 = 0, s2 = 0;
    for (i64 i = 0; i < video.numel(); ++i) s1 += video.ptr()[i] * video.ptr()[i];
    for (i64 i = 0; i < lat.data.numel(); ++i) s2 += lat.data.ptr()[i] * lat.data.ptr()[i];
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-13));

    CHECK_THROWS_AS(encode(video, 3), std::invalid_argument);  // 8 % 3 != 0
    LatentVideo<double> broken = lat;
    broken.meta.width = 12;
    CHECK_THROWS_AS(decode(broken), std::invalid_argument);

    Tensor<double> zero_lat_video = decode(LatentVideo<double>{Tensor<double>({1, 48, 2, 2}),
                                                               LatentMeta{4, 1, 8, 8}});
    for (i64 i = 0; i < zero_lat_video.numel(); ++i) CHECK(zero_lat_video.ptr()[i] == 0.0);
}

TEST_CASE("schedule endpoints and midpoint") {
    CHECK(schedule(0.0).alpha == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(schedule(0.0).sigma == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(schedule(1.0).alpha == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(schedule(1.0).sigma == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(schedule(0.5).alpha == doctest::Approx(0.7071067811865476).epsilon(1e-12));
    CHECK(schedule(0.5).sigma == doctest::Approx(0.7071067811865476).epsilon(1e-12));
    CHECK_THROWS_AS(schedule(-0.1), std::out_of_range);
    CHECK_THROWS_AS(schedule(1.1), std::out_of_range);
}

TEST_CASE("variance preservation at 1000 random taus") {
    RandomEngine rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double tau = rng.uniform();
        const ScheduleValue s = schedule(tau);
        CHECK(std::abs(s.alpha * s.alpha + s.sigma * s.sigma - 1.0) < 1e-12);
    }
    // alpha monotone non-increasing on a grid
    double prev = 2.0;
    for (int i = 0; i <= 1000; ++i) {
        const double a = schedule(i / 1000.0).alpha;
        CHECK(a <= prev + 1e-15);
        prev = a;
    }
}

TEST_CASE("add_noise endpoints and scalar-loop reference") {
    RandomEngine rng(6);
    Tensor<double> x({2, 4, 3, 3}), eps({2, 4, 3, 3});
    rng.fill_normal(x.ptr(), x.numel());
    rng.fill_normal(eps.ptr(), eps.numel());

    Tensor<double> zeros(x.shape);
    NoisyLatent<double> nz = add_noise(x, 0.3, zeros);
    const double a03 = schedule(0.3).alpha;
    for (i64 i = 0; i < x.numel(); ++i)
        CHECK(nz.z.ptr()[i] == doctest::Approx(a03 * x.ptr()[i]).epsilon(1e-15));

    NoisyLatent<double> n1 = add_noise(x, 1.0, eps);
    for (i64 i = 0; i < x.numel(); ++i)
        CHECK(n1.z.ptr()[i] == doctest::Approx(eps.ptr()[i]).epsilon(1e-12));

    const double tau = rng.uniform();
    NoisyLatent<double> nr = add_noise(x, tau, eps);
    const ScheduleValue s = schedule(tau);
    for (i64 i = 0; i < x.numel(); ++i) {
        const double expect = s.alpha * x.ptr()[i] + s.sigma * eps.ptr()[i];
        CHECK(std::abs(nr.z.ptr()[i] - expect) < 1e-12);
    }

    Tensor<double> wrong({2, 4, 3, 2});
    CHECK_THROWS_AS(add_noise(x, 0.5, wrong), std::invalid_argument);
}

TEST_CASE("v_target endpoints, reference, and x-recovery identity") {
    RandomEngine rng(7);
    Tensor<double> x({1, 8, 4, 4}), eps({1, 8, 4, 4});
    rng.fill_normal(x.ptr(), x.numel());
    rng.fill_normal(eps.ptr(), eps.numel());

    Tensor<double> zeros(x.shape);
    Tensor<double> v0 = v_target(zeros, eps, 0.4);
    const ScheduleValue s04 = schedule(0.4);
    for (i64 i = 0; i < x.numel(); ++i)
        CHECK(v0.ptr()[i] == doctest::Approx(s04.alpha * eps.ptr()[i]).epsilon(1e-15));

    Tensor<double> vt0 = v_target(x, eps, 0.0);
    for (i64 i = 0; i < x.numel(); ++i)
        CHECK(vt0.ptr()[i] == doctest::Approx(eps.ptr()[i]).epsilon(1e-12));

    // x_hat = alpha*z - sigma*v recovers x
    const double tau = 0.37;
    const ScheduleValue s = schedule(tau);
    NoisyLatent<double> nl = add_noise(x, tau, eps);
    Tensor<double> v = v_target(x, eps, tau);
    for (i64 i = 0; i < x.numel(); ++i) {
        const double x_hat = s.alpha * nl.z.ptr()[i] - s.sigma * v.ptr()[i];
        CHECK(std::abs(x_hat - x.ptr()[i]) < 1e-6);
    }
}

TEST_CASE("ddim_step identity, exact-prediction recovery, and reference") {
    RandomEngine rng(8);
    Tensor<double> x({2, 6, 4, 4}), eps({2, 6, 4, 4});
    rng.fill_normal(x.ptr(), x.numel());
    rng.fill_normal(eps.ptr(), eps.numel());

    // zero-size step returns z exactly
    NoisyLatent<double> nl = add_noise(x, 0.6, eps);
    Tensor<double> v6 = v_target(x, eps, 0.6);
    Tensor<double> same = ddim_step(nl.z, v6, 0.6, 0.6);
    for (i64 i = 0; i < x.numel(); ++i) CHECK(same.ptr()[i] == nl.z.ptr()[i]);

    // stepping to tau=0 with the oracle v recovers x
    Tensor<double> x0 = ddim_step(nl.z, v6, 0.6, 0.0);
    for (i64 i = 0; i < x.numel(); ++i) CHECK(std::abs(x0.ptr()[i] - x.ptr()[i]) < 1e-6);

    // scalar reference for a generic step
    Tensor<double> out = ddim_step(nl.z, v6, 0.6, 0.25);
    const ScheduleValue f = schedule(0.6), t = schedule(0.25);
    for (i64 i = 0; i < x.numel(); ++i) {
        const double xh = f.alpha * nl.z.ptr()[i] - f.sigma * v6.ptr()[i];
        const double eh = f.sigma * nl.z.ptr()[i] + f.alpha * v6.ptr()[i];
        CHECK(std::abs(out.ptr()[i] - (t.alpha * xh + t.sigma * eh)) < 1e-12);
    }

    CHECK_THROWS_AS(ddim_step(nl.z, v6, 0.3, 0.6), std::invalid_argument);
}

TEST_CASE("chained ddim steps with oracle v recover x over a 25-step grid (float32)") {
    RandomEngine rng(9);
    Tensor<float> x({2, 8, 4, 4}), eps({2, 8, 4, 4});
    rng.fill_normal(x.ptr(), x.numel());
    rng.fill_normal(eps.ptr(), eps.numel());

    const int K = 25;
    NoisyLatent<float> state = add_noise(x, 1.0, eps);
    Tensor<float> z = state.z;
    for (int k = 0; k < K; ++k) {
        const double tf = 1.0 - static_cast<double>(k) / K;
        const double tt = 1.0 - static_cast<double>(k + 1) / K;
        // oracle v at tau_from, derived from the true (x, eps) pair
        const ScheduleValue s = schedule(tf);
        Tensor<float> v(x.shape);
        for (i64 i = 0; i < x.numel(); ++i)
            v.ptr()[i] = static_cast<float>(s.alpha) * eps.ptr()[i] -
                         static_cast<float>(s.sigma) * x.ptr()[i];
        z = ddim_step(z, v, tf, tt);
    }
    for (i64 i = 0; i < x.numel(); ++i) CHECK(std::abs(z.ptr()[i] - x.ptr()[i]) < 1e-5);
}

TEST_CASE("add_noise is linear in x and eps") {
    RandomEngine rng(10);
    Tensor<double> x1({1, 4, 4, 4}), x2({1, 4, 4, 4}), e1({1, 4, 4, 4}), e2({1, 4, 4, 4});
    rng.fill_normal(x1.ptr(), x1.numel());
    rng.fill_normal(x2.ptr(), x2.numel());
    rng.fill_normal(e1.ptr(), e1.numel());
    rng.fill_normal(e2.ptr(), e2.numel());
    const double tau = 0.42, a = 1.7, b = -0.6;

    Tensor<double> xs(x1.shape), es(x1.shape);
    for (i64 i = 0; i < x1.numel(); ++i) {
        xs.ptr()[i] = a * x1.ptr()[i] + b * x2.ptr()[i];
        es.ptr()[i] = a * e1.ptr()[i] + b * e2.ptr()[i];
    }
    NoisyLatent<double> lhs = add_noise(xs, tau, es);
    NoisyLatent<double> r1 = add_noise(x1, tau, e1);
    NoisyLatent<double> r2 = add_noise(x2, tau, e2);
    for (i64 i = 0; i < x1.numel(); ++i)
        CHECK(std::abs(lhs.z.ptr()[i] - (a * r1.z.ptr()[i] + b * r2.z.ptr()[i])) < 1e-12);
}
