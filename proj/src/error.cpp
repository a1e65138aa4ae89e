#include "pose2seg/error.hpp"

namespace pose2seg {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::invalid_keypoint: return "invalid_keypoint";
    case ErrorCode::invalid_bbox: return "invalid_bbox";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::degenerate_configuration: return "degenerate_configuration";
    case ErrorCode::singular_transform: return "singular_transform";
    case ErrorCode::format: return "format";
    case ErrorCode::reference: return "reference";
    case ErrorCode::corrupt_mask: return "corrupt_mask";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::undefined_ap: return "undefined_ap";
    case ErrorCode::io: return "io";
    case ErrorCode::usage: return "usage";
    }
    return "unknown";
}

} // namespace pose2seg
