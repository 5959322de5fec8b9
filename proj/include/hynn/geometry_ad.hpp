#ifndef HYNN_GEOMETRY_AD_HPP
#define HYNN_GEOMETRY_AD_HPP

#include "hynn/geometry.hpp"
#include "hynn/tape.hpp"

// Tape-tracked versions of the Poincare-ball kernel, composed from tape
// primitives so gradients follow from the chain rule. Forward values agree
// with the plain hynn geometry functions to machine precision.

namespace hynn::ad {

Var t_project(Var x);

Var t_mobius_add(Var x, Var y);
Var t_mobius_scalar_mul(Var r, Var x);
Var t_mobius_scalar_mul(double r, Var x);
Var t_mobius_matvec(Var m, int rows, int cols, Var x);
Var t_exp0(Var v);
Var t_log0(Var y);
Var t_exp_at(Var x, Var v);
Var t_log_at(Var x, Var y);
Var t_distance(Var x, Var y);          // 2 atanh(|(-x) + y|), equal to the acosh form
Var t_transport_from_origin(Var x, Var v);
Var t_tanh_pointwise(Var x);           // tanh applied in the tangent space at 0
Var t_mobius_midpoint(const std::vector<Var>& points, Var weights);

// Diagonal Mobius product diag(z) (x) v, via exp0(z .* log0(v)).
Var t_mobius_diag(Var z, Var v);

}  // namespace hynn::ad

#endif
