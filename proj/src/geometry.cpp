#include "pose2seg/geometry.hpp"

#include "pose2seg/error.hpp"

namespace pose2seg {

Affine2D Affine2D::inverse() const
{
    const double det = determinant();
    const double scale = std::abs(m[0]) + std::abs(m[1]) + std::abs(m[3]) + std::abs(m[4]);
    if (!std::isfinite(det) || scale == 0.0 || std::abs(det) <= 1e-14 * scale * scale)
        throw Error(ErrorCode::singular_transform, "affine matrix is not invertible");
    const double ia = m[4] / det;
    const double ib = -m[1] / det;
    const double id = -m[3] / det;
    const double ie = m[0] / det;
    return {{ia, ib, -(ia * m[2] + ib * m[5]), id, ie, -(id * m[2] + ie * m[5])}};
}

Affine2D Affine2D::compose(const Affine2D& first) const
{
    const auto& f = first.m;
    return {{m[0] * f[0] + m[1] * f[3], m[0] * f[1] + m[1] * f[4], m[0] * f[2] + m[1] * f[5] + m[2],
             m[3] * f[0] + m[4] * f[3], m[3] * f[1] + m[4] * f[4], m[3] * f[2] + m[4] * f[5] + m[5]}};
}

} // namespace pose2seg
