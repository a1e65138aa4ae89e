#include "pose2seg/image_io.hpp"

#include <algorithm>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "pose2seg/error.hpp"

namespace pose2seg {

Image read_image(const std::filesystem::path& path)
{
    const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (mat.empty())
        throw Error(ErrorCode::io, "cannot read image " + path.string());
    if (mat.depth() != CV_8U)
        throw Error(ErrorCode::format, "only 8-bit images are supported: " + path.string());

    const int channels = mat.channels();
    Image out(channels, mat.rows, mat.cols);
    for (int y = 0; y < mat.rows; ++y) {
        const auto* row = mat.ptr<unsigned char>(y);
        for (int x = 0; x < mat.cols; ++x)
            for (int c = 0; c < channels; ++c)
                out.at(c, y, x) = row[x * channels + c];
    }
    return out;
}

void write_image(const std::filesystem::path& path, const Image& image)
{
    if (image.channels() != 1 && image.channels() != 3)
        throw Error(ErrorCode::format, "write_image expects 1 or 3 channels");
    cv::Mat mat(image.height(), image.width(), image.channels() == 1 ? CV_8UC1 : CV_8UC3);
    for (int y = 0; y < image.height(); ++y) {
        auto* row = mat.ptr<unsigned char>(y);
        for (int x = 0; x < image.width(); ++x)
            for (int c = 0; c < image.channels(); ++c)
                row[x * image.channels() + c] =
                    static_cast<unsigned char>(std::clamp(image.at(c, y, x) + 0.5F, 0.0F, 255.0F));
    }
    if (!cv::imwrite(path.string(), mat))
        throw Error(ErrorCode::io, "cannot write image " + path.string());
}

void write_channel_preview(const std::filesystem::path& path, const Image& raster, int channel, float lo, float hi)
{
    Image preview(1, raster.height(), raster.width());
    const float range = hi > lo ? hi - lo : 1.0F;
    for (int y = 0; y < raster.height(); ++y)
        for (int x = 0; x < raster.width(); ++x)
            preview.at(0, y, x) = 255.0F * (raster.at(channel, y, x) - lo) / range;
    write_image(path, preview);
}

} // namespace pose2seg
