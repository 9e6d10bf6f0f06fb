#pragma once

// Finite-difference oracles for operator-applied Matern kernels, kept
// independent of the library: the plain kernel is re-evaluated here from
// the textbook polynomial-times-exponential form, in long double so that
// the h^-4 roundoff amplification of the double-Laplacian stencil stays
// well below the comparison tolerances at step 1e-3.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fdoracle {

inline long double phi_matern(int twice_nu, long double r) {
    long double p;
    switch (twice_nu) {
        case 3: p = 1.0L + r; break;
        case 5: p = 1.0L + r + r * r / 3.0L; break;
        case 7: p = 1.0L + r + 2.0L * r * r / 5.0L + r * r * r / 15.0L; break;
        case 9:
            p = 1.0L + r + 3.0L * r * r / 7.0L + 2.0L * r * r * r / 21.0L +
                r * r * r * r / 105.0L;
            break;
        default: throw std::invalid_argument("phi_matern: unsupported nu");
    }
    return p * std::exp(-r);
}

inline long double kernel_plain(int twice_nu, long double shape, std::span<const long double> x,
                                std::span<const long double> y) {
    long double dist2 = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) dist2 += (x[i] - y[i]) * (x[i] - y[i]);
    return phi_matern(twice_nu, shape * std::sqrt(dist2));
}

// -Delta_y k(x, y) by a 4th-order central stencil.
inline double neg_laplacian_y(int twice_nu, double shape, std::span<const double> x,
                              std::span<const double> y, double h) {
    static constexpr long double w[5] = {-1.0L, 16.0L, -30.0L, 16.0L, -1.0L};
    std::vector<long double> xx(x.begin(), x.end()), yy(y.begin(), y.end());
    const long double hl = h;
    long double acc = 0.0L;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const long double yi = yy[i];
        long double cell = 0.0L;
        for (int a = -2; a <= 2; ++a) {
            yy[i] = yi + a * hl;
            cell += w[a + 2] * kernel_plain(twice_nu, shape, xx, yy);
        }
        yy[i] = yi;
        acc += cell / (12.0L * hl * hl);
    }
    return static_cast<double>(-acc);
}

// Delta_x Delta_y k(x, y) by the tensor-product 4th-order stencil.
inline double laplacian_xy(int twice_nu, double shape, std::span<const double> x,
                           std::span<const double> y, double h) {
    static constexpr long double w[5] = {-1.0L, 16.0L, -30.0L, 16.0L, -1.0L};
    std::vector<long double> xx(x.begin(), x.end()), yy(y.begin(), y.end());
    const long double hl = h;
    long double acc = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) {
            const long double xi = xx[i], yj = yy[j];
            long double cell = 0.0L;
            for (int a = -2; a <= 2; ++a) {
                xx[i] = xi + a * hl;
                for (int b = -2; b <= 2; ++b) {
                    yy[j] = yj + b * hl;
                    cell += w[a + 2] * w[b + 2] * kernel_plain(twice_nu, shape, xx, yy);
                }
            }
            xx[i] = xi;
            yy[j] = yj;
            acc += cell / (144.0L * hl * hl * hl * hl);
        }
    }
    return static_cast<double>(acc);
}

}  // namespace fdoracle
