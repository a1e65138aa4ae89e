#pragma once

/// \file baseline.hpp
/// \brief Non-learned stand-in segmenter and a receptive-field calculator for
/// conv / residual stacks.

#include <vector>

#include "pose2seg/raster.hpp"

namespace pose2seg {

struct BaselineOptions {
    double threshold = 0.5;
    int dilation_radius = 3; ///< disk radius in window pixels
};

/// Union of the PAF supports and the confidence maps above `threshold`,
/// dilated by a disk. Returns a 1 x S x S raster with values in {0, 1}.
Image baseline_segment(const Image& skeleton_features, const BaselineOptions& options = {});

struct LayerSpec {
    enum class Kind { conv, residual_unit, upsample };

    int kernel = 1;
    int stride = 1;
    Kind kind = Kind::conv;
};

/// Receptive field in input pixels. A conv grows it by (k - 1) * jump and
/// multiplies jump by its stride; an upsample divides jump by its stride; a
/// residual unit counts as `residual_conv_count` stride-1 convs of
/// `residual_kernel`.
double receptive_field(const std::vector<LayerSpec>& layers, int residual_conv_count, int residual_kernel);

/// 7x7 stride-2 stem followed by `units` residual units.
std::vector<LayerSpec> segmodule_layers(int units);

/// Bottleneck units: the 1x1 convs leave the field unchanged, one 3x3 widens it.
constexpr int kBottleneckConvCount = 1;
constexpr int kBottleneckKernel = 3;

} // namespace pose2seg
