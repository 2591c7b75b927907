#ifndef FVBS_EXPR_HPP
#define FVBS_EXPR_HPP

#include <memory>
#include <string>

#include "fvbs/problem.hpp"

namespace fvbs {

/// Compiles a small arithmetic expression over variables x, y into an
/// evaluable field. Supported: + - * / ^, parentheses, numeric literals,
/// the constant pi, and the functions sin, cos, exp, abs, min, max.
/// Throws ConfigError on parse failure.
ScalarField parse_field_expression(const std::string& text);

}  // namespace fvbs

#endif
