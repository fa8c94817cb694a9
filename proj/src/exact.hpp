#pragma once

#include <gmpxx.h>

#include "fejerlab/geometry.hpp"

// Exact rational evaluation of the few predicates whose sign decides a
// classification. Doubles convert to mpq_class without rounding.
namespace fejerlab::exact {

/// |q - w|^2 - |p - w|^2, exactly.
mpq_class squared_distance_change(const Vector& p, const Vector& q, const Vector& w);

/// Sign of squared_distance_change(p, q, w).
int squared_distance_change_sign(const Vector& p, const Vector& q, const Vector& w);

/// Smallest double >= value.
double round_up(const mpq_class& value);

/// Largest double b >= 0 with b*b <= value (value >= 0).
double sqrt_round_down(const mpq_class& value);

}  // namespace fejerlab::exact
