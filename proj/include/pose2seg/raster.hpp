#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pose2seg {

/// Planar C x H x W raster, row-major within each channel.
template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(int channels, int height, int width, T fill = T{})
        : channels_(channels), height_(height), width_(width),
          data_(static_cast<std::size_t>(channels) * static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill)
    {
    }

    int channels() const { return channels_; }
    int height() const { return height_; }
    int width() const { return width_; }
    bool empty() const { return data_.empty(); }
    std::size_t plane_size() const { return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_); }

    T& at(int c, int y, int x) { return data_[index(c, y, x)]; }
    const T& at(int c, int y, int x) const { return data_[index(c, y, x)]; }

    std::span<T> plane(int c) { return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()}; }
    std::span<const T> plane(int c) const { return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()}; }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t index(int c, int y, int x) const
    {
        assert(c >= 0 && c < channels_ && y >= 0 && y < height_ && x >= 0 && x < width_);
        return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) + static_cast<std::size_t>(y)) *
                   static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<T> data_;
};

using Image = Raster<float>;

/// Binary H x W mask, values 0 or 1, row-major.
class Mask {
public:
    Mask() = default;
    Mask(int height, int width, std::uint8_t fill = 0)
        : height_(height), width_(width), data_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill)
    {
    }

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return data_.size(); }

    std::uint8_t& at(int y, int x) { return data_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)]; }
    std::uint8_t at(int y, int x) const { return data_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)]; }

    std::span<std::uint8_t> data() { return data_; }
    std::span<const std::uint8_t> data() const { return data_; }

    std::size_t area() const
    {
        std::size_t n = 0;
        for (auto v : data_)
            n += v != 0 ? 1 : 0;
        return n;
    }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> data_;
};

} // namespace pose2seg
