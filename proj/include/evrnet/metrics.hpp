#pragma once

#include "evrnet/tensor.hpp"

#include <limits>

namespace evr {

/// Returned by psnr() for identical inputs.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(peak^2 / MSE) over all elements.
double psnr(const Tensor& a, const Tensor& b, double peak = 1.0);

/// Mean SSIM over all valid 11x11 Gaussian windows (sigma 1.5,
/// K1 = 0.01, K2 = 0.03, dynamic range 1), averaged over channels and batch.
double ssim(const Tensor& a, const Tensor& b);

/// Full-range BT.601 luma: Y = 0.299 R + 0.587 G + 0.114 B.
Tensor rgb_to_y(const Tensor& x);

struct MetricResult
{
    double psnr_rgb = 0.0;
    double ssim_rgb = 0.0;
    double psnr_y = 0.0;
    double ssim_y = 0.0;
};

MetricResult evaluate(const Tensor& reference, const Tensor& test);

namespace ssim_params {
inline constexpr int kWindow = 11;
inline constexpr double kSigma = 1.5;
inline constexpr double kK1 = 0.01;
inline constexpr double kK2 = 0.03;
inline constexpr double kRange = 1.0;
} // namespace ssim_params

} // namespace evr
