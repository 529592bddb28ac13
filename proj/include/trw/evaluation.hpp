#pragma once

#include <functional>
#include <string>
#include <vector>

#include "trw/common.hpp"
#include "trw/tensor.hpp"

namespace trw {

// Peak signal-to-noise ratio for images or videos in [0,1]. Zero MSE is
// reported as the 100 dB cap; video PSNR is the mean of per-frame PSNRs.
double psnr(const Tensor<double>& a, const Tensor<double>& b);

// Single-scale SSIM: 11x11 Gaussian window sigma=1.5, K1=0.01, K2=0.03,
// dynamic range 1. Computed per channel and per frame over valid window
// positions, then averaged.
double ssim(const Tensor<double>& a, const Tensor<double>& b);

// Cosine similarity between the net foreground-centroid displacement of two
// videos (F,3,H,W). Foreground is |frame - median frame| above an Otsu
// threshold; returns 0 if either displacement is shorter than 0.5 px.
double motion_direction_score(const Tensor<double>& generated, const Tensor<double>& gt);

struct CentroidTrack {
    std::vector<double> cx;
    std::vector<double> cy;
    bool valid = false;  // displacement >= 0.5 px
    double dx = 0.0;
    double dy = 0.0;
};

CentroidTrack foreground_centroids(const Tensor<double>& video);

}  // namespace trw
