#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdegreedy/expressions.hpp"
#include "pdegreedy/functionals.hpp"
#include "pdegreedy/radial_kernel.hpp"

namespace pdegreedy {

enum class Geometry { Interval, UnitSquareInterior, UnitSquareBoundary, UnitIntervalEndpoints };

std::string geometry_name(Geometry g);
Geometry geometry_from_name(const std::string& name);

/// One constrained region: a geometric piece, the operator acting there,
/// and the data field the solution must reproduce under that operator.
struct DomainPiece {
    Geometry geometry = Geometry::Interval;
    double a = 0.0, b = 1.0;  // Interval bounds; ignored for square pieces
    int intrinsic_dim = 1;
    OperatorTag op = OperatorTag::Identity;
    Expr data;
};

struct ProblemSpec {
    std::string name;
    int ambient_dim = 1;
    std::vector<DomainPiece> pieces;
    Expr exact_solution;
    int test_grid_resolution = 0;  // points per axis; 0 picks the dimension default

    int resolved_test_resolution() const {
        if (test_grid_resolution > 0) return test_grid_resolution;
        return ambient_dim == 1 ? 2001 : 201;
    }
    // closure of the computational domain, axis-aligned
    void domain_bounds(double& lo, double& hi) const;
};

struct PieceExponent {
    int domain_index = 1;      // 1-based
    double order = 0.0;        // m_i as implemented
    double dim = 1.0;          // d_i
    double exponent = 0.0;     // (tau - m_i) / d_i
    // Dirichlet-trace alternative for pointwise boundary evaluation
    std::optional<double> trace_order;
    std::optional<double> trace_exponent;
};

/// Closed-form convergence-rate prediction for a problem/kernel/beta
/// triple: the minimizing piece fixes (m_bar, d_bar), and
///   predicted_exponent = (-(tau - m_bar)/d_bar + (1 - beta)/2) / max(beta, 1)
///   pn_exponent        =  -(tau - m_bar)/d_bar + 1/2.
struct RatePrediction {
    double tau = 0.0;
    std::vector<PieceExponent> per_piece;
    double m_bar = 0.0;
    double d_bar = 1.0;
    double beta = 0.0;
    double predicted_exponent = 0.0;
    double pn_exponent = 0.0;
};

const std::vector<ProblemSpec>& builtin_problems();
const ProblemSpec& find_problem(const std::string& name);

/// Rejects specs whose pieces are inconsistent with the geometry, whose
/// data fields disagree with the manufactured solution, or for which
/// tau = nu + d/2 fails tau > m_i + d_i/2 on some piece.
void validate_problem(const ProblemSpec& spec, const RadialKernel& kernel);

/// Low-discrepancy interior points and uniform arc-length boundary
/// points, one block per piece in order; deterministic in (spec, counts,
/// seed). The seed offsets the Halton index stream.
CandidateSet generate_candidates(const ProblemSpec& spec, std::span<const int> counts,
                                 std::uint64_t seed);

RatePrediction predicted_exponent(const ProblemSpec& spec, const RadialKernel& kernel,
                                  double beta);

/// Inclusive uniform evaluation grid over the domain closure.
std::vector<std::array<double, kMaxDim>> test_grid(const ProblemSpec& spec, int resolution);

/// L_piece u at a point (exact symbolic application).
double apply_piece_operator(const DomainPiece& piece, const Expr& u, int ambient_dim,
                            double x, double y);

}  // namespace pdegreedy
