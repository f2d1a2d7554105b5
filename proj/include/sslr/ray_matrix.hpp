#pragma once

#include <stdexcept>
#include <vector>

namespace sslr {

/// 2x2 ray-transfer (ABCD) matrix acting on (displacement, slope) rays.
/// b carries meters, c carries 1/meters; a and d are dimensionless.
struct Mat2 {
    double a = 1.0, b = 0.0;
    double c = 0.0, d = 1.0;

    friend Mat2 operator*(const Mat2& lhs, const Mat2& rhs) {
        return {lhs.a * rhs.a + lhs.b * rhs.c, lhs.a * rhs.b + lhs.b * rhs.d,
                lhs.c * rhs.a + lhs.d * rhs.c, lhs.c * rhs.b + lhs.d * rhs.d};
    }

    double det() const { return a * d - b * c; }
};

/// Paraxial ray: transverse displacement r [m] and slope alpha [rad].
struct Ray {
    double r = 0.0;
    double alpha = 0.0;
};

inline Mat2 identity() { return {}; }

inline Mat2 free_space(double length) {
    if (length < 0.0)
        throw std::invalid_argument("free_space: negative propagation length");
    return {1.0, length, 0.0, 1.0};
}

inline Mat2 thin_lens(double focal_length) {
    if (focal_length == 0.0)
        throw std::invalid_argument("thin_lens: focal length must be nonzero");
    return {1.0, 0.0, -1.0 / focal_length, 1.0};
}

/// Plane end mirror at normal incidence, identity in the unfolded path.
inline Mat2 plane_mirror() { return {}; }

/// Ideal image-inverting retroreflector (telescopic cat eye with l = f).
inline Mat2 tcr_matrix() { return {-1.0, 0.0, 0.0, -1.0}; }

/// Composes a path given in traversal order: path.front() is crossed first,
/// so the result is path.back() * ... * path.front().
inline Mat2 compose(const std::vector<Mat2>& path) {
    if (path.empty())
        throw std::invalid_argument("compose: empty element sequence");
    Mat2 m;
    for (const Mat2& e : path)
        m = e * m;
    return m;
}

inline Ray trace_ray(const Mat2& m, const Ray& in) {
    return {m.a * in.r + m.b * in.alpha, m.c * in.r + m.d * in.alpha};
}

/// Round trip of a focusing telescopic cat-eye retroreflector (lens of focal
/// length f with its end mirror at spacing l), referenced to the outer focal
/// plane of the lens: one focal length of free space inbound, lens, spacing l,
/// end mirror, and the same three elements outbound.
inline Mat2 ftcr_matrix(double f, double l) {
    return compose({free_space(f), thin_lens(f), free_space(l), plane_mirror(),
                    free_space(l), thin_lens(f), free_space(f)});
}

/// Equivalent focal length of the FTCR seen as lens-plus-ideal-retroreflector.
/// Positive for l > f (focusing), negative for l < f, infinite at l = f.
inline double ftcr_equivalent_focal(double f, double l) {
    if (l == f)
        throw std::domain_error("ftcr_equivalent_focal: infinite at l = f");
    return f * f / (2.0 * (l - f));
}

/// The same FTCR round trip written as the equivalent-lens form: a thin lens
/// of focal length f_RR = f^2 / (2(l - f)) applied after an ideal cat eye.
inline Mat2 ftcr_equivalent(double f, double l) {
    if (l == f)
        return tcr_matrix();
    return thin_lens(ftcr_equivalent_focal(f, l)) * tcr_matrix();
}

} // namespace sslr
