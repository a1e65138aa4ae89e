#include "pose2seg/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "pose2seg/error.hpp"
#include "pose2seg/skeleton_features.hpp"

namespace pose2seg {

Image baseline_segment(const Image& features, const BaselineOptions& options)
{
    const int h = features.height();
    const int w = features.width();
    Mask support(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool on = false;
            for (int c = 0; c < std::min(kConfidenceChannels, features.channels()) && !on; ++c)
                on = features.at(c, y, x) >= options.threshold;
            for (int c = kConfidenceChannels; c + 1 < features.channels() && !on; c += 2)
                on = features.at(c, y, x) != 0.0F || features.at(c + 1, y, x) != 0.0F;
            support.at(y, x) = on ? 1 : 0;
        }
    }

    const int r = std::max(0, options.dilation_radius);
    Image out(1, h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (support.at(y, x) == 0)
                continue;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int yy = y + dy, xx = x + dx;
                    if (dx * dx + dy * dy > r * r || yy < 0 || xx < 0 || yy >= h || xx >= w)
                        continue;
                    out.at(0, yy, xx) = 1.0F;
                }
            }
        }
    }
    return out;
}

double receptive_field(const std::vector<LayerSpec>& layers, int residual_conv_count, int residual_kernel)
{
    if (layers.empty())
        throw Error(ErrorCode::insufficient_data, "layer list is empty");

    double rf = 1.0;
    double jump = 1.0;
    for (const auto& layer : layers) {
        if (layer.kernel < 1 || layer.stride < 1)
            throw Error(ErrorCode::usage, "kernel and stride must be at least 1");
        switch (layer.kind) {
        case LayerSpec::Kind::conv:
            rf += (layer.kernel - 1) * jump;
            jump *= layer.stride;
            break;
        case LayerSpec::Kind::residual_unit:
            rf += residual_conv_count * (residual_kernel - 1) * jump;
            break;
        case LayerSpec::Kind::upsample:
            jump /= layer.stride;
            break;
        }
    }
    return rf;
}

std::vector<LayerSpec> segmodule_layers(int units)
{
    std::vector<LayerSpec> layers{{7, 2, LayerSpec::Kind::conv}};
    for (int i = 0; i < units; ++i)
        layers.push_back({kBottleneckKernel, 1, LayerSpec::Kind::residual_unit});
    return layers;
}

} // namespace pose2seg
