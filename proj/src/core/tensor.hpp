#pragma once

// Fixed-size real tensors of order 1-4 in three dimensions.
//
// Index conventions used throughout the library:
//   grad(u)_ij      = d u_i / d x_j          (so grad(u) z is the directional derivative)
//   hessian(u)_ijk  = d^2 u_i / d x_j d x_k
//   (K . A)_i       = sum_jk K_ijk A_jk
//   (T : A)_ij      = sum_kl T_ijkl A_lk
//   (T . H)_i       = sum_jkl T_ijkl H_jlk   (H a Hessian, symmetric in its last pair)

#include <array>
#include <cmath>
#include <cstddef>

namespace peridyn {

struct Vec3 {
    std::array<double, 3> c{0.0, 0.0, 0.0};

    constexpr Vec3() = default;
    constexpr Vec3(double x, double y, double z) : c{x, y, z} {}

    constexpr double& operator[](std::size_t i) { return c[i]; }
    constexpr double operator[](std::size_t i) const { return c[i]; }

    static constexpr Vec3 unit(std::size_t i) {
        Vec3 e;
        e.c[i] = 1.0;
        return e;
    }

    constexpr Vec3& operator+=(const Vec3& o) {
        for (std::size_t i = 0; i < 3; ++i) c[i] += o.c[i];
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o) {
        for (std::size_t i = 0; i < 3; ++i) c[i] -= o.c[i];
        return *this;
    }
    constexpr Vec3& operator*=(double s) {
        for (auto& v : c) v *= s;
        return *this;
    }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(Vec3 a) { return a *= -1.0; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }

constexpr double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
constexpr double norm2(const Vec3& a) { return dot(a, a); }
inline double max_abs(const Vec3& a) { return std::fmax(std::fabs(a[0]), std::fmax(std::fabs(a[1]), std::fabs(a[2]))); }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

struct Mat3 {
    std::array<double, 9> e{};

    constexpr double& operator()(std::size_t i, std::size_t j) { return e[3 * i + j]; }
    constexpr double operator()(std::size_t i, std::size_t j) const { return e[3 * i + j]; }

    static constexpr Mat3 identity() {
        Mat3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }

    constexpr Mat3& operator+=(const Mat3& o) {
        for (std::size_t i = 0; i < 9; ++i) e[i] += o.e[i];
        return *this;
    }
    constexpr Mat3& operator-=(const Mat3& o) {
        for (std::size_t i = 0; i < 9; ++i) e[i] -= o.e[i];
        return *this;
    }
    constexpr Mat3& operator*=(double s) {
        for (auto& v : e) v *= s;
        return *this;
    }
    friend constexpr bool operator==(const Mat3&, const Mat3&) = default;
};

constexpr Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
constexpr Mat3 operator-(Mat3 a, const Mat3& b) { return a -= b; }
constexpr Mat3 operator*(double s, Mat3 a) { return a *= s; }
constexpr Mat3 operator*(Mat3 a, double s) { return a *= s; }

constexpr Vec3 operator*(const Mat3& m, const Vec3& v) {
    Vec3 r;
    for (std::size_t i = 0; i < 3; ++i) r[i] = m(i, 0) * v[0] + m(i, 1) * v[1] + m(i, 2) * v[2];
    return r;
}

constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) r(i, j) += a(i, k) * b(k, j);
    return r;
}

constexpr Mat3 transpose(const Mat3& m) {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) r(i, j) = m(j, i);
    return r;
}

constexpr double trace(const Mat3& m) { return m(0, 0) + m(1, 1) + m(2, 2); }

inline double max_abs(const Mat3& m) {
    double r = 0.0;
    for (double v : m.e) r = std::fmax(r, std::fabs(v));
    return r;
}

struct Tensor3 {
    std::array<double, 27> e{};

    constexpr double& operator()(std::size_t i, std::size_t j, std::size_t k) { return e[9 * i + 3 * j + k]; }
    constexpr double operator()(std::size_t i, std::size_t j, std::size_t k) const { return e[9 * i + 3 * j + k]; }

    constexpr Tensor3& operator+=(const Tensor3& o) {
        for (std::size_t i = 0; i < 27; ++i) e[i] += o.e[i];
        return *this;
    }
    constexpr Tensor3& operator-=(const Tensor3& o) {
        for (std::size_t i = 0; i < 27; ++i) e[i] -= o.e[i];
        return *this;
    }
    constexpr Tensor3& operator*=(double s) {
        for (auto& v : e) v *= s;
        return *this;
    }
    friend constexpr bool operator==(const Tensor3&, const Tensor3&) = default;
};

constexpr Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
constexpr Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
constexpr Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

inline double max_abs(const Tensor3& t) {
    double r = 0.0;
    for (double v : t.e) r = std::fmax(r, std::fabs(v));
    return r;
}

struct Tensor4 {
    std::array<double, 81> e{};

    constexpr double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return e[27 * i + 9 * j + 3 * k + l];
    }
    constexpr double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return e[27 * i + 9 * j + 3 * k + l];
    }

    constexpr Tensor4& operator+=(const Tensor4& o) {
        for (std::size_t i = 0; i < 81; ++i) e[i] += o.e[i];
        return *this;
    }
    constexpr Tensor4& operator-=(const Tensor4& o) {
        for (std::size_t i = 0; i < 81; ++i) e[i] -= o.e[i];
        return *this;
    }
    constexpr Tensor4& operator*=(double s) {
        for (auto& v : e) v *= s;
        return *this;
    }
    friend constexpr bool operator==(const Tensor4&, const Tensor4&) = default;
};

constexpr Tensor4 operator+(Tensor4 a, const Tensor4& b) { return a += b; }
constexpr Tensor4 operator-(Tensor4 a, const Tensor4& b) { return a -= b; }
constexpr Tensor4 operator*(double s, Tensor4 a) { return a *= s; }

inline double max_abs(const Tensor4& t) {
    double r = 0.0;
    for (double v : t.e) r = std::fmax(r, std::fabs(v));
    return r;
}

constexpr Mat3 outer(const Vec3& a, const Vec3& b) {
    Mat3 m;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) m(i, j) = a[i] * b[j];
    return m;
}

constexpr Tensor3 outer3(const Vec3& a, const Vec3& b, const Vec3& c) {
    Tensor3 t;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) t(i, j, k) = a[i] * b[j] * c[k];
    return t;
}

constexpr Tensor4 outer4(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    Tensor4 t;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k)
                for (std::size_t l = 0; l < 3; ++l) t(i, j, k, l) = a[i] * b[j] * c[k] * d[l];
    return t;
}

/// result_i = sum_jk K_ijk A_jk
constexpr Vec3 contract_t3_mat(const Tensor3& k, const Mat3& a) {
    Vec3 r;
    for (std::size_t i = 0; i < 3; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t l = 0; l < 3; ++l) s += k(i, j, l) * a(j, l);
        r[i] = s;
    }
    return r;
}

/// result_ij = sum_kl T_ijkl A_lk
constexpr Mat3 contract_t4_mat(const Tensor4& t, const Mat3& a) {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 3; ++k)
                for (std::size_t l = 0; l < 3; ++l) s += t(i, j, k, l) * a(l, k);
            r(i, j) = s;
        }
    return r;
}

/// Second-order Taylor term of a fourth-moment expansion:
/// result_i = sum_jkl T_ijkl (1/2) H_jlk, with H_jlk = d^2 v_j / dx_l dx_k.
/// For T the normalized fourth moment this yields Laplacian(v) + 2 grad(div v).
constexpr Vec3 contract_t4_hessian(const Tensor4& t, const Tensor3& h) {
    Vec3 r;
    for (std::size_t i = 0; i < 3; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k)
                for (std::size_t l = 0; l < 3; ++l) s += t(i, j, k, l) * h(j, l, k);
        r[i] = 0.5 * s;
    }
    return r;
}

constexpr Mat3 sym(const Mat3& a) { return 0.5 * (a + transpose(a)); }

inline bool all_finite(const Vec3& v) { return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]); }

}  // namespace peridyn
