#include "trw/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace trw {

namespace {

double mse(const double* a, const double* b, i64 n) {
    double acc = 0.0;
    for (i64 i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(n);
}

double psnr_from_mse(double m) {
    if (m <= 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(1.0 / m));
}

// normalized 1-D Gaussian window, length 11, sigma 1.5
std::vector<double> ssim_window() {
    const int n = 11;
    const double sigma = 1.5;
    std::vector<double> w(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = i - (n - 1) / 2.0;
        w[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += w[static_cast<std::size_t>(i)];
    }
    for (double& v : w) v /= sum;
    return w;
}

// valid-mode separable filtering of an (H,W) plane
void filter_valid(const double* src, i64 H, i64 W, const std::vector<double>& k,
                  std::vector<double>& tmp, std::vector<double>& dst) {
    const i64 n = static_cast<i64>(k.size());
    const i64 OW = W - n + 1, OH = H - n + 1;
    tmp.assign(static_cast<std::size_t>(H * OW), 0.0);
    for (i64 y = 0; y < H; ++y)
        for (i64 x = 0; x < OW; ++x) {
            double acc = 0.0;
            for (i64 i = 0; i < n; ++i) acc += k[static_cast<std::size_t>(i)] * src[y * W + x + i];
            tmp[static_cast<std::size_t>(y * OW + x)] = acc;
        }
    dst.assign(static_cast<std::size_t>(OH * OW), 0.0);
    for (i64 y = 0; y < OH; ++y)
        for (i64 x = 0; x < OW; ++x) {
            double acc = 0.0;
            for (i64 i = 0; i < n; ++i)
                acc += k[static_cast<std::size_t>(i)] * tmp[static_cast<std::size_t>((y + i) * OW + x)];
            dst[static_cast<std::size_t>(y * OW + x)] = acc;
        }
}

double ssim_plane(const double* a, const double* b, i64 H, i64 W) {
    static const std::vector<double> win = ssim_window();
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    const i64 n = static_cast<i64>(win.size());
    const i64 OH = H - n + 1, OW = W - n + 1;
    const i64 m = static_cast<i64>(H * W);

    std::vector<double> aa(static_cast<std::size_t>(m)), bb(static_cast<std::size_t>(m)),
        ab(static_cast<std::size_t>(m));
    for (i64 i = 0; i < m; ++i) {
        aa[static_cast<std::size_t>(i)] = a[i] * a[i];
        bb[static_cast<std::size_t>(i)] = b[i] * b[i];
        ab[static_cast<std::size_t>(i)] = a[i] * b[i];
    }
    std::vector<double> tmp, mu_a, mu_b, m_aa, m_bb, m_ab;
    filter_valid(a, H, W, win, tmp, mu_a);
    filter_valid(b, H, W, win, tmp, mu_b);
    filter_valid(aa.data(), H, W, win, tmp, m_aa);
    filter_valid(bb.data(), H, W, win, tmp, m_bb);
    filter_valid(ab.data(), H, W, win, tmp, m_ab);

    double acc = 0.0;
    for (i64 i = 0; i < OH * OW; ++i) {
        const double ma = mu_a[static_cast<std::size_t>(i)];
        const double mb = mu_b[static_cast<std::size_t>(i)];
        const double va = m_aa[static_cast<std::size_t>(i)] - ma * ma;
        const double vb = m_bb[static_cast<std::size_t>(i)] - mb * mb;
        const double cov = m_ab[static_cast<std::size_t>(i)] - ma * mb;
        acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return acc / static_cast<double>(OH * OW);
}

}  // namespace

double psnr(const Tensor<double>& a, const Tensor<double>& b) {
    check_arg(a.shape == b.shape, "psnr: shape mismatch");
    if (a.ndim() == 3) return psnr_from_mse(mse(a.ptr(), b.ptr(), a.numel()));
    check_arg(a.ndim() == 4, "psnr: expected image (3,H,W) or video (F,3,H,W)");
    const i64 F = a.dim(0);
    const i64 plane = a.numel() / F;
    double acc = 0.0;
    for (i64 f = 0; f < F; ++f)
        acc += psnr_from_mse(mse(a.ptr() + f * plane, b.ptr() + f * plane, plane));
    return acc / static_cast<double>(F);
}

double ssim(const Tensor<double>& a, const Tensor<double>& b) {
    check_arg(a.shape == b.shape, "ssim: shape mismatch");
    i64 F = 1, C, H, W;
    if (a.ndim() == 4) {
        F = a.dim(0);
        C = a.dim(1);
        H = a.dim(2);
        W = a.dim(3);
    } else {
        check_arg(a.ndim() == 3, "ssim: expected image or video");
        C = a.dim(0);
        H = a.dim(1);
        W = a.dim(2);
    }
    check_arg(H >= 11 && W >= 11, "ssim: image smaller than 11x11 window");
    double acc = 0.0;
    for (i64 f = 0; f < F; ++f)
        for (i64 c = 0; c < C; ++c) {
            const i64 off = (f * C + c) * H * W;
            acc += ssim_plane(a.ptr() + off, b.ptr() + off, H, W);
        }
    return acc / static_cast<double>(F * C);
}

CentroidTrack foreground_centroids(const Tensor<double>& video) {
    check_arg(video.ndim() == 4, "foreground_centroids: expected (F,C,H,W)");
    const i64 F = video.dim(0), C = video.dim(1), H = video.dim(2), W = video.dim(3);
    check_arg(F >= 2, "foreground_centroids: need at least 2 frames");

    // per-pixel temporal median, then per-frame deviation maps
    std::vector<double> med(static_cast<std::size_t>(C * H * W));
    std::vector<double> vals(static_cast<std::size_t>(F));
    for (i64 p = 0; p < C * H * W; ++p) {
        for (i64 f = 0; f < F; ++f) vals[static_cast<std::size_t>(f)] = video.ptr()[f * C * H * W + p];
        std::sort(vals.begin(), vals.end());
        med[static_cast<std::size_t>(p)] =
            (F % 2 == 1) ? vals[static_cast<std::size_t>(F / 2)]
                         : 0.5 * (vals[static_cast<std::size_t>(F / 2 - 1)] +
                                  vals[static_cast<std::size_t>(F / 2)]);
    }

    std::vector<double> dev(static_cast<std::size_t>(F * H * W), 0.0);
    double dmax = 0.0;
    for (i64 f = 0; f < F; ++f)
        for (i64 y = 0; y < H; ++y)
            for (i64 x = 0; x < W; ++x) {
                double acc = 0.0;
                for (i64 c = 0; c < C; ++c)
                    acc += std::abs(video.at4(f, c, y, x) -
                                    med[static_cast<std::size_t>((c * H + y) * W + x)]);
                acc /= static_cast<double>(C);
                dev[static_cast<std::size_t>((f * H + y) * W + x)] = acc;
                dmax = std::max(dmax, acc);
            }

    CentroidTrack track;
    track.cx.assign(static_cast<std::size_t>(F), 0.0);
    track.cy.assign(static_cast<std::size_t>(F), 0.0);
    if (dmax <= 0.0) return track;  // static video: no foreground

    // Otsu over the pooled deviation histogram (bins relative to dmax, so the
    // threshold scales with uniform intensity scaling)
    const int bins = 256;
    std::vector<i64> hist(bins, 0);
    for (double v : dev) {
        int b = static_cast<int>(v / dmax * (bins - 1));
        hist[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))] += 1;
    }
    const i64 total = static_cast<i64>(dev.size());
    double sum_all = 0.0;
    for (int i = 0; i < bins; ++i) sum_all += static_cast<double>(i) * static_cast<double>(hist[static_cast<std::size_t>(i)]);
    double w0 = 0.0, sum0 = 0.0, best_var = -1.0;
    int best_bin = 0;
    for (int i = 0; i < bins; ++i) {
        w0 += static_cast<double>(hist[static_cast<std::size_t>(i)]);
        if (w0 == 0.0) continue;
        const double w1 = static_cast<double>(total) - w0;
        if (w1 == 0.0) break;
        sum0 += static_cast<double>(i) * static_cast<double>(hist[static_cast<std::size_t>(i)]);
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_bin = i;
        }
    }
    const double threshold = (static_cast<double>(best_bin) + 0.5) / (bins - 1) * dmax;

    for (i64 f = 0; f < F; ++f) {
        const double* d = dev.data() + f * H * W;
        double wsum = 0.0, cx = 0.0, cy = 0.0;
        for (i64 y = 0; y < H; ++y)
            for (i64 x = 0; x < W; ++x) {
                const double v = d[y * W + x];
                if (v > threshold) {
                    wsum += v;
                    cx += v * (static_cast<double>(x) + 0.5);
                    cy += v * (static_cast<double>(y) + 0.5);
                }
            }
        if (wsum <= 0.0) {  // nothing above threshold: fall back to all deviations
            for (i64 y = 0; y < H; ++y)
                for (i64 x = 0; x < W; ++x) {
                    const double v = d[y * W + x];
                    wsum += v;
                    cx += v * (static_cast<double>(x) + 0.5);
                    cy += v * (static_cast<double>(y) + 0.5);
                }
        }
        if (wsum > 0.0) {
            track.cx[static_cast<std::size_t>(f)] = cx / wsum;
            track.cy[static_cast<std::size_t>(f)] = cy / wsum;
        } else {
            track.cx[static_cast<std::size_t>(f)] = static_cast<double>(W) / 2.0;
            track.cy[static_cast<std::size_t>(f)] = static_cast<double>(H) / 2.0;
        }
    }
    track.dx = track.cx.back() - track.cx.front();
    track.dy = track.cy.back() - track.cy.front();
    track.valid = std::sqrt(track.dx * track.dx + track.dy * track.dy) >= 0.5;
    return track;
}

double motion_direction_score(const Tensor<double>& generated, const Tensor<double>& gt) {
    check_arg(generated.shape == gt.shape, "motion_direction_score: shape mismatch");
    const CentroidTrack a = foreground_centroids(generated);
    const CentroidTrack b = foreground_centroids(gt);
    if (!a.valid || !b.valid) return 0.0;
    const double na = std::sqrt(a.dx * a.dx + a.dy * a.dy);
    const double nb = std::sqrt(b.dx * b.dx + b.dy * b.dy);
    return (a.dx * b.dx + a.dy * b.dy) / (na * nb);
}

}  // namespace trw
