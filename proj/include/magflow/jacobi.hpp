#pragma once

namespace magflow {

/// Modulus k of the Jacobi functions together with its quarter period.
/// k (not the parameter m = k^2) is the canonical argument throughout.
struct EllipticModulus {
    double k = 0.0;
    double k2 = 0.0;
    double quarter_period = 0.0;  ///< K(k)
    bool loss_of_precision = false;

    /// Throws DomainError unless 0 <= k < 1.
    explicit EllipticModulus(double modulus);
    EllipticModulus() : EllipticModulus(0.0) {}

    double period() const noexcept { return 4.0 * quarter_period; }
};

struct CompleteIntegral {
    double value = 0.0;
    /// Set once the complementary modulus is small enough that rounding in k
    /// alone perturbs K by more than ~1e-12 relative.
    bool loss_of_precision = false;
};

/// Arithmetic-geometric mean of two positive numbers.
double agm(double a, double b) noexcept;

/// K(k) = pi / (2 agm(1, sqrt(1 - k^2))).
double complete_K(double k);
CompleteIntegral complete_K_checked(double k);

/// Incomplete integral of the first kind F(phi, k), any real phi.
double incomplete_F(double phi, double k);
double incomplete_F(double phi, const EllipticModulus& m);

/// Jacobi sn(u, k) by the descending Landen (AGM) phase recursion.
double sn(double u, double k);
double sn(double u, const EllipticModulus& m);

/// Amplitude am(u, k) with sn = sin(am). Continuous and increasing in u.
double amplitude(double u, const EllipticModulus& m);

}  // namespace magflow
