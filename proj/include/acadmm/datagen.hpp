#pragma once

#include <cstddef>
#include <cstdint>

#include "acadmm/dataset.hpp"

namespace acadmm {

enum class TargetKind { regression, classification };

// Fixed recipe constants.
inline constexpr double kTruthDensity = 0.1;  // nonzero fraction of w*
inline constexpr double kNoiseSd = 0.1;
inline constexpr int kComponents = 10;
inline constexpr double kScaleSpread = 100.0;  // largest / smallest component scale

// i.i.d. standard normal rows; targets D w* + noise or sign(D w*).
Dataset gen_synthetic1(std::size_t samples, std::size_t features, std::uint64_t seed,
                       TargetKind kind = TargetKind::regression);

// Mixture of 10 Gaussians, x = s_c (mu_c + z) with scales s_c log-spaced
// over kScaleSpread and mu_c standard normal. Rows come out in contiguous
// node blocks (the contiguous partition's split). With nodes >= 10, node i
// draws only from component i mod 10; with fewer nodes, node i covers the
// components c with c mod nodes == i, its block split evenly among them.
Dataset gen_synthetic2(std::size_t samples, std::size_t features, std::size_t nodes, std::uint64_t seed,
                       TargetKind kind = TargetKind::regression);

double component_scale(int component);

}  // namespace acadmm
