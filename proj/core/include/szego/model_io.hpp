#pragma once

#include <string>
#include <string_view>

#include "szego/model.hpp"

namespace szego {

/// Key-value model text, one entry per line, '#' starts a comment:
///
///   lambda = 0.3
///   omega = 0.6180339887498949
///   radius = 0.5
///   h.1 = 0.5,0
///   h.-1 = 0.5,0
///
/// `omega` is a comma separated list (its length fixes d); each `h.k1[,k2...]`
/// line gives the real and imaginary part of one Fourier coefficient.
/// Throws DomainError naming the line on malformed input.
VerblunskyModel parse_model(std::string_view text);

/// Canonical form: fixed key order, modes in lexicographic order, shortest
/// round-trip decimal numbers, so parse_model(serialize_model(m)) is bit-exact.
std::string serialize_model(const VerblunskyModel& model);

}  // namespace szego
