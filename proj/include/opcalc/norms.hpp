#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opcalc/holfun.hpp"
#include "opcalc/measures.hpp"
#include "opcalc/quad.hpp"

namespace opcalc {

enum class SpaceKind { B0, B, W, E0, E, Ds, DsInf, H1Sector, HPsi, HP };
enum class Membership { In, NotIn, Inconclusive };

struct Space {
  SpaceKind kind = SpaceKind::B;
  // s for Ds and DsInf, psi for H1Sector and HPsi.
  double param = 0.0;

  std::string describe() const;
  // Accepts B0, B, W, E0, E, HP, Ds(s), DsInf(s), H1Sector(psi), HPsi(psi).
  static Space parse(const std::string& text);
};

struct NormReport {
  Space space;
  quad::Bracket<double> value;
  Membership membership = Membership::Inconclusive;
};

const char* to_string(Membership m);
Membership membership_of(quad::Verdict v);

struct SupReport {
  double value = 0.0;
  bool bounded = true;
  double argmax_re = 0.0;
  double argmax_im = 0.0;
};

// Supremum of |f| over the closure of the region: boundary rays (or the imaginary axis) with
// local refinement, the limits at 0 and infinity, and interior rays as a cross-check.
// Functions flagged unbounded on their own domain report bounded = false when the region is
// the whole domain.
SupReport sup_norm(const HolFunction& f, const Domain& region, const quad::QuadConfig& cfg = {});

// int_0^inf sup_beta |f'(alpha + i beta)| d alpha.
NormReport b0_norm(const HolFunction& f, const quad::QuadConfig& cfg = {});
// The same functional applied to g itself (the W norm of g).
NormReport w_norm(const HolFunction& g, const quad::QuadConfig& cfg = {});
// sup norm on the half-plane plus b0_norm.
NormReport b_norm(const HolFunction& f, const quad::QuadConfig& cfg = {});

// int_0^inf alpha^s int_R |g(alpha + i beta)| / |alpha + i beta|^{s+1} d beta d alpha.
NormReport vs_norm(const HolFunction& g, double s, const quad::QuadConfig& cfg = {});
// |f(inf)| + vs_norm(f', s).
NormReport ds_norm(const HolFunction& f, double s, const quad::QuadConfig& cfg = {});
// Seminorm part vs_norm(f', s) only.
NormReport ds0_norm(const HolFunction& f, double s, const quad::QuadConfig& cfg = {});
// sup norm on the half-plane plus vs_norm(f', s).
NormReport ds_inf_norm(const HolFunction& f, double s, const quad::QuadConfig& cfg = {});

// sup_{|phi| < psi} int_0^inf (|g(t e^{i phi})| + |g(t e^{-i phi})|) dt.
NormReport h1_sector_norm(const HolFunction& g, double psi, const quad::QuadConfig& cfg = {});
// sup norm on the sector plus h1_sector_norm(f', psi).
NormReport hpsi_norm(const HolFunction& f, double psi, const quad::QuadConfig& cfg = {});

// sup_{alpha > 0} alpha int_R |g'(alpha + i beta)| d beta over a log grid of alpha with local
// refinement.
NormReport e0_norm(const HolFunction& g, const quad::QuadConfig& cfg = {}, int points_per_decade = 4);
// |g(inf)| + e0_norm(g).
NormReport e_norm(const HolFunction& g, const quad::QuadConfig& cfg = {});

// Total variation of the representing measure for catalog functions that carry one
// (exp, resolvent with Re lambda > 0, cayley powers, phi, Laplace transforms and their
// sums and products). PreconditionFailed otherwise.
NormReport hp_norm_of(const HolFunction& f);
// The measure behind hp_norm_of; nullopt when f has none in closed form (phi_t included).
std::optional<RadonMeasure> representing_measure(const HolFunction& f);

NormReport compute_norm(const Space& space, const HolFunction& f, const quad::QuadConfig& cfg = {});

// int_0^inf alpha int_R g'(alpha - i beta) f'(alpha + i beta) d beta d alpha.
// PreconditionFailed unless e0_norm(g) and b0_norm(f) converge.
quad::Bracket<cplx> duality_pairing(const HolFunction& g, const HolFunction& f, const quad::QuadConfig& cfg = {});

// (1/4) int_R (g - g(inf))(-i beta) (f - f(inf))(i beta) d beta for rational functions.
quad::Bracket<cplx> boundary_pairing(const HolFunction& g, const HolFunction& f, const quad::QuadConfig& cfg = {});

// -(2^s/pi) int_0^inf alpha^s int_R g(alpha + i beta) / (alpha - i beta + z)^{s+1} d beta d alpha
// for z in the closed half-plane. PreconditionFailed unless vs_norm(g, s) converges.
quad::Bracket<cplx> apply_Q_s(const HolFunction& g, double s, cplx z, const quad::QuadConfig& cfg = {});

struct GestCheck {
  double b_norm = 0.0;
  double sup = 0.0;
  double bound = 0.0;
  bool holds = false;
  quad::Verdict verdict = quad::Verdict::Converged;
};

// Compares ||f||_B with ||f||_inf (1 + 4 log(1 + sigma/eps)) for f = sum c_k e^{-t_k z},
// eps <= t_k <= sigma.
GestCheck gest_bound_check(const std::vector<std::pair<double, cplx>>& terms, double eps, double sigma,
                           const quad::QuadConfig& cfg = {});

}  // namespace opcalc
