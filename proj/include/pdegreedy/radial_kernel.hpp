#pragma once

#include <array>
#include <span>
#include <string>

namespace pdegreedy {

/// Functional tags usable on either kernel argument.
enum class OperatorTag { Identity, NegLaplacian };

int operator_order(OperatorTag op);
std::string operator_name(OperatorTag op);
OperatorTag operator_from_name(const std::string& name);

struct PsiDerivs {
    double psi, d1, d2, d3, d4;
};

/// Half-integer Matern kernel in squared-distance form:
///   k(x, y) = psi(s),  s = shape^2 * |x - y|^2,  psi(s) = phi_nu(sqrt(s)),
/// with phi_nu(r) = P_nu(r) * exp(-r) normalized so phi_nu(0) = 1.
///
/// Working in s rather than r removes the (d-1)/r term from Laplacian
/// formulas; the remaining sqrt(s)-type singularities of high psi
/// derivatives at s = 0 are confined to terms the operator formulas
/// multiply by vanishing powers of s.
///
/// Construction precomputes, in exact rational arithmetic,
///   psi^(m)(s) = exp(-r) * A_m(r) / (2^m r^(2m-1)),  r = sqrt(s),
/// with the numerator polynomials A_m reduced by their exact leading
/// power of r. Evaluating the reduced form is stable for all s > 0; the
/// cancellations that would otherwise lose ~9 digits near s = 1e-8 are
/// resolved on the coefficients once. Below kSeriesThreshold values come
/// from the half-integer power series of psi instead, and the two
/// branches agree to ~1e-13 relative at the switchover.
class RadialKernel {
public:
    static constexpr double kSeriesThreshold = 1e-8;   // s below this uses the series
    static constexpr double kCoincidentR = 1e-14;      // r below this is treated as 0

    /// nu = twice_nu / 2 must be one of 3/2, 5/2, 7/2, 9/2; shape > 0.
    RadialKernel(int twice_nu, double shape);

    int twice_nu() const { return twice_nu_; }
    double nu() const { return 0.5 * twice_nu_; }
    double shape() const { return shape_; }

    /// Native-space Sobolev smoothness tau = nu + d/2.
    double sobolev_smoothness(int ambient_dim) const { return nu() + 0.5 * ambient_dim; }

    /// psi and its first four s-derivatives at s >= 0. At s = 0,
    /// derivative orders past the kernel smoothness report only the
    /// analytic part of the series; callers multiply those orders by
    /// vanishing powers of s (see kernel_apply).
    PsiDerivs psi_derivatives(double s) const;

private:
    struct DerivForm {
        std::array<double, 9> coef{};  // reduced numerator, ascending powers of r
        int ncoef = 0;
        int rpow = 0;                  // leftover r exponent after reduction
        double scale = 0.0;            // 1 / 2^m
    };

    int twice_nu_;
    double shape_;
    std::array<double, 6> pcoef_{};       // P_nu coefficients
    int npcoef_ = 0;
    std::array<DerivForm, 4> dform_{};    // m = 1..4
    std::array<double, 17> series_{};     // r-series of phi, b_k for k = 0..16
};

/// (L_a (x) L_b) k(x, y), operators acting on the first/second argument.
/// NegLaplacian on either argument requires nu >= 5/2 (7/2 keeps the
/// double-Laplacian smooth through coincident points).
double kernel_apply(const RadialKernel& kernel, OperatorTag op_a, OperatorTag op_b,
                    std::span<const double> x, std::span<const double> y);

}  // namespace pdegreedy
