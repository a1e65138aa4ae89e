#pragma once

#include <array>
#include <cmath>

namespace pose2seg {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point2, Point2) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double squared_norm(Point2 a) { return dot(a, a); }

/// Axis-aligned rectangle in COCO (x, y, w, h) convention.
struct Rect {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const { return w * h; }
    double right() const { return x + w; }
    double bottom() const { return y + h; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Row-major 2x3 matrix [[a, b, c], [d, e, f]] acting on column vectors (x, y, 1).
struct Affine2D {
    std::array<double, 6> m{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};

    static Affine2D identity() { return {}; }
    static Affine2D translation(double tx, double ty) { return {{1.0, 0.0, tx, 0.0, 1.0, ty}}; }
    static Affine2D scaling(double sx, double sy) { return {{sx, 0.0, 0.0, 0.0, sy, 0.0}}; }

    double operator()(int row, int col) const { return m[static_cast<std::size_t>(row * 3 + col)]; }

    Point2 apply(Point2 p) const { return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]}; }
    double determinant() const { return m[0] * m[4] - m[1] * m[3]; }

    /// Throws Error(singular_transform) when the linear part is not invertible.
    Affine2D inverse() const;

    /// (*this) after `first`: x -> this(first(x)).
    Affine2D compose(const Affine2D& first) const;
};

} // namespace pose2seg
