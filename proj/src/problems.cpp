#include "pdegreedy/problems.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pdegreedy {

namespace {

double radical_inverse(std::uint64_t index, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double scale = inv;
    double out = 0.0;
    while (index > 0) {
        out += static_cast<double>(index % base) * scale;
        index /= base;
        scale *= inv;
    }
    return out;
}

std::array<double, kMaxDim> boundary_walk(double t) {
    // counterclockwise around the unit square, arc length 4
    t = std::fmod(t, 4.0);
    if (t < 1.0) return {t, 0.0, 0.0};
    if (t < 2.0) return {1.0, t - 1.0, 0.0};
    if (t < 3.0) return {3.0 - t, 1.0, 0.0};
    return {0.0, 4.0 - t, 0.0};
}

void check_geometry(const ProblemSpec& spec, const DomainPiece& piece, int index) {
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("problem '" + spec.name + "' piece " + std::to_string(index) +
                                    ": " + what);
    };
    switch (piece.geometry) {
        case Geometry::Interval:
            if (spec.ambient_dim != 1) fail("interval piece needs ambient dimension 1");
            if (!(piece.a < piece.b)) fail("interval needs a < b");
            if (piece.intrinsic_dim != 1) fail("interval piece has intrinsic dimension 1");
            break;
        case Geometry::UnitIntervalEndpoints:
            if (spec.ambient_dim != 1) fail("endpoint piece needs ambient dimension 1");
            if (!(piece.a < piece.b)) fail("endpoint piece needs a < b");
            if (piece.intrinsic_dim != 1) fail("endpoint piece is treated as dimension 1");
            break;
        case Geometry::UnitSquareInterior:
            if (spec.ambient_dim != 2) fail("square interior needs ambient dimension 2");
            if (piece.intrinsic_dim != 2) fail("square interior has intrinsic dimension 2");
            break;
        case Geometry::UnitSquareBoundary:
            if (spec.ambient_dim != 2) fail("square boundary needs ambient dimension 2");
            if (piece.intrinsic_dim != 1) fail("square boundary has intrinsic dimension 1");
            break;
    }
}

std::array<double, kMaxDim> sample_piece_point(const DomainPiece& piece, std::mt19937_64& rng,
                                               int draw) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    switch (piece.geometry) {
        case Geometry::Interval:
            return {piece.a + unit(rng) * (piece.b - piece.a), 0.0, 0.0};
        case Geometry::UnitIntervalEndpoints:
            return {draw % 2 == 0 ? piece.a : piece.b, 0.0, 0.0};
        case Geometry::UnitSquareInterior:
            return {unit(rng), unit(rng), 0.0};
        case Geometry::UnitSquareBoundary:
            return boundary_walk(4.0 * unit(rng));
    }
    return {};
}

}  // namespace

std::string geometry_name(Geometry g) {
    switch (g) {
        case Geometry::Interval: return "interval";
        case Geometry::UnitSquareInterior: return "unit_square_interior";
        case Geometry::UnitSquareBoundary: return "unit_square_boundary";
        case Geometry::UnitIntervalEndpoints: return "interval_endpoints";
    }
    return "?";
}

Geometry geometry_from_name(const std::string& name) {
    if (name == "interval") return Geometry::Interval;
    if (name == "unit_square_interior") return Geometry::UnitSquareInterior;
    if (name == "unit_square_boundary") return Geometry::UnitSquareBoundary;
    if (name == "interval_endpoints") return Geometry::UnitIntervalEndpoints;
    throw std::invalid_argument("unknown geometry '" + name + "'");
}

void ProblemSpec::domain_bounds(double& lo, double& hi) const {
    lo = 0.0;
    hi = 1.0;
    for (const auto& piece : pieces) {
        if (piece.geometry == Geometry::Interval) {
            lo = piece.a;
            hi = piece.b;
            return;
        }
    }
}

double apply_piece_operator(const DomainPiece& piece, const Expr& u, int ambient_dim,
                            double x, double y) {
    if (piece.op == OperatorTag::Identity) return u.eval(x, y);
    return -u.laplacian(ambient_dim).eval(x, y);
}

const std::vector<ProblemSpec>& builtin_problems() {
    static const std::vector<ProblemSpec> catalog = [] {
        std::vector<ProblemSpec> out;

        ProblemSpec poisson_1d;
        poisson_1d.name = "poisson_1d";
        poisson_1d.ambient_dim = 1;
        poisson_1d.pieces = {
            {Geometry::Interval, 0.0, 1.0, 1, OperatorTag::NegLaplacian,
             Expr::parse("pi*pi*sin(pi*x)")},
            {Geometry::UnitIntervalEndpoints, 0.0, 1.0, 1, OperatorTag::Identity,
             Expr::parse("0")},
        };
        poisson_1d.exact_solution = Expr::parse("sin(pi*x)");
        out.push_back(std::move(poisson_1d));

        ProblemSpec poisson_2d;
        poisson_2d.name = "poisson_2d";
        poisson_2d.ambient_dim = 2;
        poisson_2d.pieces = {
            {Geometry::UnitSquareInterior, 0.0, 1.0, 2, OperatorTag::NegLaplacian,
             Expr::parse("2*pi*pi*sin(pi*x)*sin(pi*y)")},
            {Geometry::UnitSquareBoundary, 0.0, 1.0, 1, OperatorTag::Identity, Expr::parse("0")},
        };
        poisson_2d.exact_solution = Expr::parse("sin(pi*x)*sin(pi*y)");
        out.push_back(std::move(poisson_2d));

        ProblemSpec interp_1d;
        interp_1d.name = "interp_1d";
        interp_1d.ambient_dim = 1;
        interp_1d.pieces = {
            {Geometry::Interval, 0.0, 1.0, 1, OperatorTag::Identity, Expr::parse("sin(pi*x)+x")},
        };
        interp_1d.exact_solution = Expr::parse("sin(pi*x)+x");
        out.push_back(std::move(interp_1d));

        ProblemSpec interp_2d;
        interp_2d.name = "interp_2d";
        interp_2d.ambient_dim = 2;
        interp_2d.pieces = {
            {Geometry::UnitSquareInterior, 0.0, 1.0, 2, OperatorTag::Identity,
             Expr::parse("sin(pi*x)*sin(pi*y)+x+y")},
        };
        interp_2d.exact_solution = Expr::parse("sin(pi*x)*sin(pi*y)+x+y");
        out.push_back(std::move(interp_2d));

        return out;
    }();
    return catalog;
}

const ProblemSpec& find_problem(const std::string& name) {
    for (const auto& spec : builtin_problems())
        if (spec.name == name) return spec;
    throw std::invalid_argument("unknown builtin problem '" + name + "'");
}

void validate_problem(const ProblemSpec& spec, const RadialKernel& kernel) {
    if (spec.ambient_dim < 1 || spec.ambient_dim > 2)
        throw std::invalid_argument("ambient dimension must be 1 or 2");
    if (spec.pieces.empty()) throw std::invalid_argument("problem needs at least one piece");

    const double tau = kernel.sobolev_smoothness(spec.ambient_dim);
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    for (std::size_t p = 0; p < spec.pieces.size(); ++p) {
        const DomainPiece& piece = spec.pieces[p];
        check_geometry(spec, piece, static_cast<int>(p + 1));

        const double need = operator_order(piece.op) + 0.5 * piece.intrinsic_dim;
        if (!(tau > need))
            throw std::invalid_argument(
                "kernel smoothness tau = " + std::to_string(tau) + " must exceed m_i + d_i/2 = " +
                std::to_string(need) + " on piece " + std::to_string(p + 1));

        // manufactured consistency: the piece operator applied to the
        // exact solution must reproduce the data field
        for (int draw = 0; draw < 100; ++draw) {
            auto pt = sample_piece_point(piece, rng, draw);
            const double lhs = apply_piece_operator(piece, spec.exact_solution, spec.ambient_dim,
                                                    pt[0], pt[1]);
            const double rhs = piece.data.eval(pt[0], pt[1]);
            if (std::abs(lhs - rhs) > 1e-10)
                throw std::invalid_argument(
                    "piece " + std::to_string(p + 1) + " data is inconsistent with the exact " +
                    "solution: |L u* - f| = " + std::to_string(std::abs(lhs - rhs)));
        }
    }
}

CandidateSet generate_candidates(const ProblemSpec& spec, std::span<const int> counts,
                                 std::uint64_t seed) {
    if (counts.size() != spec.pieces.size())
        throw std::invalid_argument("candidate counts must match the number of pieces");

    CandidateSet out;
    const std::uint64_t halton_start = 1 + (seed % 8191);
    std::uint32_t next_id = 0;

    for (std::size_t p = 0; p < spec.pieces.size(); ++p) {
        const DomainPiece& piece = spec.pieces[p];
        const int count = counts[p];
        if (count < 1) throw std::invalid_argument("candidate count must be >= 1 per piece");

        auto push = [&](std::array<double, kMaxDim> pt) {
            Functional f;
            f.id = next_id++;
            f.domain_index = static_cast<int>(p + 1);
            f.op = piece.op;
            f.point = pt;
            f.dim = spec.ambient_dim;
            out.functionals.push_back(f);
        };

        switch (piece.geometry) {
            case Geometry::Interval:
                for (int i = 0; i < count; ++i) {
                    double u = radical_inverse(halton_start + i, 2);
                    push({piece.a + u * (piece.b - piece.a), 0.0, 0.0});
                }
                break;
            case Geometry::UnitSquareInterior:
                for (int i = 0; i < count; ++i)
                    push({radical_inverse(halton_start + i, 2),
                          radical_inverse(halton_start + i, 3), 0.0});
                break;
            case Geometry::UnitSquareBoundary:
                for (int i = 0; i < count; ++i) push(boundary_walk(4.0 * i / count));
                break;
            case Geometry::UnitIntervalEndpoints:
                if (count > 2)
                    throw std::invalid_argument(
                        "endpoint piece has only 2 distinct points, requested " +
                        std::to_string(count));
                push({piece.a, 0.0, 0.0});
                if (count == 2) push({piece.b, 0.0, 0.0});
                break;
        }
        out.per_domain_counts.push_back(count);
    }
    return out;
}

RatePrediction predicted_exponent(const ProblemSpec& spec, const RadialKernel& kernel,
                                  double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    RatePrediction out;
    out.tau = kernel.sobolev_smoothness(spec.ambient_dim);
    out.beta = beta;

    bool first = true;
    for (std::size_t p = 0; p < spec.pieces.size(); ++p) {
        const DomainPiece& piece = spec.pieces[p];
        PieceExponent pe;
        pe.domain_index = static_cast<int>(p + 1);
        pe.order = operator_order(piece.op);
        pe.dim = piece.intrinsic_dim;
        if (!(out.tau > pe.order + 0.5 * pe.dim))
            throw std::invalid_argument("tau <= m_i + d_i/2 on piece " + std::to_string(p + 1));
        pe.exponent = (out.tau - pe.order) / pe.dim;

        const bool boundary_eval = piece.op == OperatorTag::Identity &&
                                   (piece.geometry == Geometry::UnitSquareBoundary ||
                                    piece.geometry == Geometry::UnitIntervalEndpoints);
        if (boundary_eval) {
            // pointwise Dirichlet data carries trace order 1/2 in the
            // trace-theoretic convention; reported alongside m = 0
            pe.trace_order = 0.5;
            pe.trace_exponent = (out.tau - 0.5) / pe.dim;
        }

        if (first || pe.exponent < (out.tau - out.m_bar) / out.d_bar) {
            out.m_bar = pe.order;
            out.d_bar = pe.dim;
            first = false;
        }
        out.per_piece.push_back(pe);
    }

    const double rate = (out.tau - out.m_bar) / out.d_bar;
    out.predicted_exponent = (-rate + 0.5 * (1.0 - beta)) / std::max(beta, 1.0);
    out.pn_exponent = -rate + 0.5;
    return out;
}

std::vector<std::array<double, kMaxDim>> test_grid(const ProblemSpec& spec, int resolution) {
    if (resolution < 2) throw std::invalid_argument("test grid needs at least 2 points per axis");
    double lo, hi;
    spec.domain_bounds(lo, hi);
    std::vector<std::array<double, kMaxDim>> out;
    if (spec.ambient_dim == 1) {
        out.reserve(resolution);
        for (int i = 0; i < resolution; ++i) {
            double t = lo + (hi - lo) * i / (resolution - 1);
            out.push_back({t, 0.0, 0.0});
        }
    } else {
        out.reserve(static_cast<std::size_t>(resolution) * resolution);
        for (int i = 0; i < resolution; ++i)
            for (int j = 0; j < resolution; ++j)
                out.push_back({static_cast<double>(i) / (resolution - 1),
                               static_cast<double>(j) / (resolution - 1), 0.0});
    }
    return out;
}

}  // namespace pdegreedy
