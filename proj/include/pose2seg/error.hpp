#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pose2seg {

/// Failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorCode {
    invalid_keypoint,
    invalid_bbox,
    insufficient_data,
    degenerate_configuration,
    singular_transform,
    format,
    reference,
    corrupt_mask,
    dimension_mismatch,
    undefined_ap,
    io,
    usage,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace pose2seg
