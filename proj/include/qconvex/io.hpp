#pragma once

#include <string>

#include "qconvex/newton.hpp"
#include "qconvex/spectral_test.hpp"

namespace qconvex {

/// Spec JSON:
///   {"kind":"homogeneous","n":..,"p":..,"entries":[{"row":[..],"col":[..],"val":..}]}
///   {"kind":"inhomogeneous","n":..,"terms":[{"coeff":..,"c":[..],"B":[[[..]]]}]}
/// A term may omit "c" (or set it null) for even-degree products.
PolySpec parse_spec_json(const std::string& text);
PolySpec load_spec_file(const std::string& path);

/// Point set JSON: {"points":[[..],[..]]}.
PointSet parse_points_json(const std::string& text);
PointSet load_points_file(const std::string& path);

std::string cost_to_json(const Cost& cost);
std::string verdict_to_json(const ConvexityVerdict& verdict);
std::string trace_to_json_lines(const NewtonTrace& trace);

// Debug dumps.
std::string big_operator_to_json(const BigOperator& op);          // COO triplets
std::string encoding_summary_json(const EncodedOperator& enc);    // alpha, eps, cost

}  // namespace qconvex
