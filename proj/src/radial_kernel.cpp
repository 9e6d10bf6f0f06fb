#include "pdegreedy/radial_kernel.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pdegreedy {

int operator_order(OperatorTag op) { return op == OperatorTag::Identity ? 0 : 2; }

std::string operator_name(OperatorTag op) {
    return op == OperatorTag::Identity ? "identity" : "neg_laplacian";
}

OperatorTag operator_from_name(const std::string& name) {
    if (name == "identity") return OperatorTag::Identity;
    if (name == "neg_laplacian") return OperatorTag::NegLaplacian;
    throw std::invalid_argument("unknown operator '" + name + "'");
}

namespace {

// Exact rational scratch arithmetic for the construction-time tables.
// Magnitudes stay far below the int64 range for the supported nu set;
// overflow past reduction aborts construction rather than degrading.
struct Rat {
    long long num = 0;
    long long den = 1;

    Rat() = default;
    Rat(long long n, long long d = 1) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::logic_error("rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        long long g = gcd_ll(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    static long long gcd_ll(long long a, long long b) {
        while (b != 0) { long long t = a % b; a = b; b = t; }
        return a < 0 ? -a : a;
    }

    static Rat from128(__int128 n, __int128 d) {
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n, b = d;
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        if (a > 1) { n /= a; d /= a; }
        constexpr __int128 lim = 0x7fffffffffffffffLL;
        if (n > lim || n < -lim || d > lim) throw std::logic_error("rational overflow");
        Rat r;
        r.num = static_cast<long long>(n);
        r.den = static_cast<long long>(d);
        return r;
    }

    Rat operator+(const Rat& o) const {
        return from128((__int128)num * o.den + (__int128)o.num * den, (__int128)den * o.den);
    }
    Rat operator-(const Rat& o) const {
        return from128((__int128)num * o.den - (__int128)o.num * den, (__int128)den * o.den);
    }
    Rat operator*(const Rat& o) const {
        return from128((__int128)num * o.num, (__int128)den * o.den);
    }
    bool zero() const { return num == 0; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

using Poly = std::vector<Rat>;  // ascending powers of r

Poly poly_derivative(const Poly& p) {
    Poly out;
    for (std::size_t k = 1; k < p.size(); ++k) out.push_back(p[k] * Rat((long long)k));
    return out;
}

Poly poly_sub(const Poly& a, const Poly& b) {
    Poly out(std::max(a.size(), b.size()));
    for (std::size_t k = 0; k < out.size(); ++k) {
        Rat av = k < a.size() ? a[k] : Rat(0);
        Rat bv = k < b.size() ? b[k] : Rat(0);
        out[k] = av - bv;
    }
    return out;
}

Poly poly_add(const Poly& a, const Poly& b) {
    Poly out(std::max(a.size(), b.size()));
    for (std::size_t k = 0; k < out.size(); ++k) {
        Rat av = k < a.size() ? a[k] : Rat(0);
        Rat bv = k < b.size() ? b[k] : Rat(0);
        out[k] = av + bv;
    }
    return out;
}

Poly poly_shift(const Poly& p, int k) {  // multiply by r^k
    Poly out(p.size() + k);
    for (std::size_t i = 0; i < p.size(); ++i) out[i + k] = p[i];
    return out;
}

Poly poly_scale(const Poly& p, Rat c) {
    Poly out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] * c;
    return out;
}

int poly_valuation(const Poly& p) {
    for (std::size_t k = 0; k < p.size(); ++k)
        if (!p[k].zero()) return static_cast<int>(k);
    return static_cast<int>(p.size());
}

// phi_nu(r) = P(r) e^{-r} for half-integer Matern, normalized phi(0) = 1.
Poly matern_polynomial(int twice_nu) {
    switch (twice_nu) {
        case 3: return {Rat(1), Rat(1)};
        case 5: return {Rat(1), Rat(1), Rat(1, 3)};
        case 7: return {Rat(1), Rat(1), Rat(2, 5), Rat(1, 15)};
        case 9: return {Rat(1), Rat(1), Rat(3, 7), Rat(2, 21), Rat(1, 105)};
        default:
            throw std::invalid_argument("matern nu must be one of 3/2, 5/2, 7/2, 9/2");
    }
}

double ipow(double x, int n) {
    if (n < 0) return 1.0 / ipow(x, -n);
    double out = 1.0;
    while (n-- > 0) out *= x;
    return out;
}

}  // namespace

RadialKernel::RadialKernel(int twice_nu, double shape) : twice_nu_(twice_nu), shape_(shape) {
    if (!(shape > 0.0) || !std::isfinite(shape))
        throw std::invalid_argument("kernel shape must be a positive real");
    Poly p = matern_polynomial(twice_nu);

    npcoef_ = static_cast<int>(p.size());
    for (int k = 0; k < npcoef_; ++k) pcoef_[k] = p[k].to_double();

    // Q_m e^{-r} = phi^{(m)} in r; then convert d/dr to d/ds via r = sqrt(s):
    //   psi'   = e^{-r} (Q1) / (2 r)
    //   psi''  = e^{-r} (r Q2 - Q1) / (4 r^3)
    //   psi''' = e^{-r} (r^2 Q3 - 3 r Q2 + 3 Q1) / (8 r^5)
    //   psi'''' = e^{-r} (r^3 Q4 - 6 r^2 Q3 + 15 r Q2 - 15 Q1) / (16 r^7)
    Poly q1 = poly_sub(poly_derivative(p), p);
    Poly q2 = poly_sub(poly_derivative(q1), q1);
    Poly q3 = poly_sub(poly_derivative(q2), q2);
    Poly q4 = poly_sub(poly_derivative(q3), q3);

    Poly a[4];
    a[0] = q1;
    a[1] = poly_sub(poly_shift(q2, 1), q1);
    a[2] = poly_add(poly_sub(poly_shift(q3, 2), poly_scale(poly_shift(q2, 1), Rat(3))),
                    poly_scale(q1, Rat(3)));
    a[3] = poly_sub(poly_add(poly_sub(poly_shift(q4, 3), poly_scale(poly_shift(q3, 2), Rat(6))),
                             poly_scale(poly_shift(q2, 1), Rat(15))),
                    poly_scale(q1, Rat(15)));

    for (int m = 1; m <= 4; ++m) {
        const Poly& num = a[m - 1];
        int val = poly_valuation(num);
        DerivForm& f = dform_[m - 1];
        f.ncoef = static_cast<int>(num.size()) - val;
        if (f.ncoef < 0) f.ncoef = 0;
        for (int k = 0; k < f.ncoef; ++k) f.coef[k] = num[val + k].to_double();
        f.rpow = val - (2 * m - 1);
        f.scale = 1.0 / ipow(2.0, m);
    }

    // r-series of phi: b_k = sum_j P_j (-1)^{k-j} / (k-j)!
    for (int k = 0; k < static_cast<int>(series_.size()); ++k) {
        Rat bk(0);
        Rat fact(1);  // holds 1/(k-j)! for the current j
        for (int j = k; j >= 0; --j) {
            if (j < npcoef_) {
                Rat term = p[j] * Rat((k - j) % 2 == 0 ? 1 : -1) * fact;
                bk = bk + term;
            }
            fact = fact * Rat(1, k - j + 1);
        }
        series_[k] = bk.to_double();
    }
}

PsiDerivs RadialKernel::psi_derivatives(double s) const {
    if (!(s >= 0.0))
        throw std::invalid_argument("psi_derivatives requires s >= 0");
    const double r = std::sqrt(s);

    if (s < kSeriesThreshold) {
        // Truncated half-integer series sum_k b_k s^{k/2}; the m-th
        // derivative of s^{k/2} is fall(k/2, m) s^{k/2 - m}.
        PsiDerivs out{0, 0, 0, 0, 0};
        double* slot[5] = {&out.psi, &out.d1, &out.d2, &out.d3, &out.d4};
        for (int m = 0; m <= 4; ++m) {
            double acc = 0.0;
            for (int k = static_cast<int>(series_.size()) - 1; k >= 0; --k) {
                double fall = 1.0;
                for (int i = 0; i < m; ++i) fall *= 0.5 * k - i;
                if (fall == 0.0 || series_[k] == 0.0) continue;
                int rexp = k - 2 * m;
                if (rexp < 0 && r < kCoincidentR) continue;  // regularized at s = 0
                acc += series_[k] * fall * ipow(r, rexp);
            }
            *slot[m] = acc;
        }
        return out;
    }

    const double e = std::exp(-r);
    double pr = 0.0;
    for (int k = npcoef_ - 1; k >= 0; --k) pr = pr * r + pcoef_[k];

    PsiDerivs out{};
    out.psi = pr * e;
    double* slot[4] = {&out.d1, &out.d2, &out.d3, &out.d4};
    for (int m = 0; m < 4; ++m) {
        const DerivForm& f = dform_[m];
        double h = 0.0;
        for (int k = f.ncoef - 1; k >= 0; --k) h = h * r + f.coef[k];
        *slot[m] = e * f.scale * h * ipow(r, f.rpow);
    }
    return out;
}

double kernel_apply(const RadialKernel& kernel, OperatorTag op_a, OperatorTag op_b,
                    std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("kernel_apply: point dimensions differ or are zero");
    const int d = static_cast<int>(x.size());

    const int laps = (op_a == OperatorTag::NegLaplacian ? 1 : 0) +
                     (op_b == OperatorTag::NegLaplacian ? 1 : 0);
    if (laps > 0 && kernel.twice_nu() < 5)
        throw std::invalid_argument("NegLaplacian application requires nu >= 5/2");

    double dist2 = 0.0;
    for (int i = 0; i < d; ++i) {
        const double diff = x[i] - y[i];
        dist2 += diff * diff;
    }
    const double eps2 = kernel.shape() * kernel.shape();
    const double s = eps2 * dist2;
    const PsiDerivs p = kernel.psi_derivatives(s);

    switch (laps) {
        case 0:
            return p.psi;
        case 1:
            // Delta_y psi(s) = eps^2 (4 s psi'' + 2 d psi'), same for x.
            return -eps2 * (4.0 * s * p.d2 + 2.0 * d * p.d1);
        default:
            // Delta_x Delta_y psi(s)
            return eps2 * eps2 *
                   (16.0 * s * s * p.d4 + (16.0 * d + 32.0) * s * p.d3 +
                    (4.0 * d * d + 8.0 * d) * p.d2);
    }
}

}  // namespace pdegreedy
