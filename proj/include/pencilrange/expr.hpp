#pragma once

#include <string>

#include "pencilrange/gallery.hpp"

namespace pencilrange {

/// Compile a coefficient expression over the real variable x into a closure.
/// Grammar: + - * / ^ (right associative), exp, sin, cos, abs, sign,
/// step(a,b) (1 when a <= x <= b), the imaginary unit i, decimal literals,
/// parentheses.  Throws ConfigError with a position diagnostic.
ScalarFn parse_expression(const std::string& text);

}  // namespace pencilrange
