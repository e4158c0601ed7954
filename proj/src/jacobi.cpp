#include "magflow/jacobi.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <algorithm>

#include "magflow/errors.hpp"

namespace magflow {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxLadder = 40;

void require_modulus(double k, const char* who) {
    if (!(k >= 0.0 && k < 1.0)) {
        throw DomainError(std::string(who) + ": modulus must satisfy 0 <= k < 1");
    }
}

double complementary(double k) noexcept { return std::sqrt((1.0 - k) * (1.0 + k)); }

// Carlson's symmetric integral R_F(x, y, z) by duplication.
double carlson_rf(double x, double y, double z) {
    for (int i = 0; i < 200; ++i) {
        const double mean = (x + y + z) / 3.0;
        const double dx = 1.0 - x / mean;
        const double dy = 1.0 - y / mean;
        const double dz = 1.0 - z / mean;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < 1e-4) {
            const double e2 = dx * dy - dz * dz;
            const double e3 = dx * dy * dz;
            // Truncation error of this expansion is O(d^6), below 1e-20 here.
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) /
                   std::sqrt(mean);
        }
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
    }
    throw NumericError("carlson_rf: duplication did not converge");
}

// F(phi, k) for phi in [-pi/2, pi/2].
double principal_F(double phi, double k2) {
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    return s * carlson_rf(c * c, 1.0 - k2 * s * s, 1.0);
}

// am(u, k) for u already reduced to a single period, by the descending
// Landen ladder.
double ladder_amplitude(double u, double k) {
    std::array<double, kMaxLadder + 1> a{};
    std::array<double, kMaxLadder + 1> c{};
    a[0] = 1.0;
    double b = complementary(k);
    c[0] = k;
    int n = 0;
    while (std::abs(c[n]) > kEps * a[n] && n < kMaxLadder) {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }
    double phi = std::ldexp(a[n] * u, n);
    for (int j = n; j > 0; --j) {
        phi = 0.5 * (phi + std::asin(c[j] * std::sin(phi) / a[j]));
    }
    return phi;
}

}  // namespace

EllipticModulus::EllipticModulus(double modulus) {
    require_modulus(modulus, "EllipticModulus");
    k = modulus;
    k2 = modulus * modulus;
    const CompleteIntegral K = complete_K_checked(modulus);
    quarter_period = K.value;
    loss_of_precision = K.loss_of_precision;
}

double agm(double a, double b) noexcept {
    for (int i = 0; i < 64 && std::abs(a - b) > kEps * a; ++i) {
        const double next = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = next;
    }
    return 0.5 * (a + b);
}

CompleteIntegral complete_K_checked(double k) {
    require_modulus(k, "complete_K");
    const double kp = complementary(k);
    const double K = (0.5 * std::numbers::pi) / agm(1.0, kp);
    // dK/dk ~ 1/(k k'^2) near k = 1, so an ulp in k moves K by eps/(k'^2 K).
    const bool lossy = kp < 1.0 && kEps / (kp * kp * K) > 1e-12;
    return {K, lossy};
}

double complete_K(double k) { return complete_K_checked(k).value; }

double incomplete_F(double phi, const EllipticModulus& m) {
    const double turns = std::round(phi / std::numbers::pi);
    const double rest = phi - turns * std::numbers::pi;
    return 2.0 * turns * m.quarter_period + principal_F(rest, m.k2);
}

double incomplete_F(double phi, double k) { return incomplete_F(phi, EllipticModulus(k)); }

double amplitude(double u, const EllipticModulus& m) {
    const double half_period = 2.0 * m.quarter_period;
    const double turns = std::round(u / half_period);
    return turns * std::numbers::pi + ladder_amplitude(u - turns * half_period, m.k);
}

double sn(double u, const EllipticModulus& m) {
    const double period = m.period();
    const double reduced = u - period * std::round(u / period);
    return std::sin(ladder_amplitude(reduced, m.k));
}

double sn(double u, double k) { return sn(u, EllipticModulus(k)); }

}  // namespace magflow
