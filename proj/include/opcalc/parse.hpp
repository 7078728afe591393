#pragma once

#include <string>

#include "opcalc/holfun.hpp"
#include "opcalc/matop.hpp"
#include "opcalc/measures.hpp"

namespace opcalc {

// Complex literals: "2", "-0.3", "1+0i", "-2.5e-1-3i", "i", "-2i".
cplx parse_complex(const std::string& text);

// Function expressions built from catalog names with +, -, *, ^n and parentheses:
//   exp(t=2), resolvent(1+0i), cayley^12, phi(t=100), power_exp(nu=1), arccot, exp_arccot,
//   sector_exp(gamma=1.5,lambda=1,psi=0.7), bernstein_resolvent(g=sqrt,lambda=1+0i),
//   bandlimited[(0.5,1),(2,-0.3)], e_delta(delta=1), const(2-1i), laplace(dirac(0)-2*expdec(1)),
//   scale(f,t=2), shift(f,tau=1), arg_power(f,gamma=0.5), arg_invert(f), d(f).
// describe() strings of catalog functions and combinators parse back to the same function.
HolFunction parse_function(const std::string& text);

// Measure expressions: linear combinations of dirac(t), expdec(a) (e^{-a t} dt) and
// polyexp(m,a) (t^m e^{-a t} dt), e.g. "dirac(0) - 2*expdec(1)".
RadonMeasure parse_measure(const std::string& text);

// Operators: diag(1,2,3+1i), jordan(lambda=1,n=3), random_sectorial(4,theta=1,seed=3),
// random_hilbert_contraction_gen(6,seed=7), or a JSON matrix accepted by matrix_from_json.
MatrixOperator parse_operator(const std::string& text);

// Bernstein names: sqrt, log1p, z_over_1pz, power(a).
BernsteinFunction parse_bernstein(const std::string& text);

}  // namespace opcalc
