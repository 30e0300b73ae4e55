#pragma once

#include <optional>
#include <string>
#include <variant>

#include "fclkp/cpow.hpp"
#include "fclkp/kp.hpp"

namespace fclkp::io {

/// Any operator value the file format can carry.
using AnyOp = std::variant<kp::Op, kp::FOp, GradedOp<FourierMatrix>, GradedPair<FourierMatrix>>;

/// Parse an operator file (kinds: psido, fcl, cgrade, fcl-cgrade).
/// Throws parse_error on malformed input, including unnormalized rationals.
AnyOp read_operator(const std::string& path);

/// Emit an operator file; deterministic byte output for equal values.
void write_operator(const std::string& path, const AnyOp& op);

std::string operator_kind(const AnyOp& op);

/// Solution series files (kinds: psido-t, fcl-t); carry the run context.
void write_solution(const std::string& path, const kp::TOp& L, const kp::Config& cfg);
void write_solution(const std::string& path, const kp::TFOp& L, const kp::Config& cfg);
kp::TOp read_solution_psido(const std::string& path, kp::Config& cfg_out);
kp::TFOp read_solution_fcl(const std::string& path, kp::Config& cfg_out);

/// Flattened coefficient view: columns e1..eN, k, m (plus i,j for n > 1, and
/// a leading branch column for two-branch solutions), then the rational.
void write_csv(const std::string& path, const kp::TOp& L, const kp::Config& cfg);
void write_csv(const std::string& path, const kp::TFOp& L, const kp::Config& cfg);

std::string gauss_to_string(const GaussRational& v);

} // namespace fclkp::io
