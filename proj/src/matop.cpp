#include "opcalc/matop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

namespace opcalc {

namespace {

constexpr double kCondLimit = 1e10;

double scale_of(const MatrixOperator& A) { return std::max(1.0, A.max_abs()); }

Mat reconstruct(const SpectralCache& c) { return c.P * c.eigenvalues.asDiagonal() * c.P_inv; }

Mat apply_on_eigenvalues(const SpectralCache& c, const std::function<cplx(cplx)>& g) {
  Vec d(c.eigenvalues.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = g(c.eigenvalues(i));
  return c.P * d.asDiagonal() * c.P_inv;
}

double condition_number(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

bool is_normal(const Mat& a) {
  const double s = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a * a.adjoint() - a.adjoint() * a).cwiseAbs().maxCoeff() <= 1e-12 * s * s;
}

Mat complex_gaussian(int n, int m, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat g(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const double re = nd(rng);
      const double im = nd(rng);
      g(i, j) = cplx(re, im) / std::sqrt(2.0);
    }
  return g;
}

}  // namespace

MatrixOperator::MatrixOperator(Mat entries, std::string label) : a_(std::move(entries)), label_(std::move(label)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols()) throw DomainError("operator matrix must be square and nonempty");
  if (!a_.allFinite()) throw DomainError("operator matrix has non-finite entries");
  Eigen::ComplexEigenSolver<Mat> es(a_, true);
  if (es.info() != Eigen::Success) throw Singular("eigenvalue computation failed");
  eigs_ = es.eigenvalues();
  normal_ = is_normal(a_);
  SpectralCache c;
  c.eigenvalues = eigs_;
  c.P = es.eigenvectors();
  c.condition = condition_number(c.P);
  if (c.condition < kCondLimit) {
    c.P_inv = c.P.partialPivLu().inverse();
    const double err = (reconstruct(c) - a_).cwiseAbs().maxCoeff();
    if (err <= 1e-10 * std::max(max_abs(), std::numeric_limits<double>::min()))
      spectral_ = std::make_shared<const SpectralCache>(std::move(c));
  }
}

MatrixOperator MatrixOperator::from_spectral(SpectralCache cache, std::string label) {
  MatrixOperator op;
  op.a_ = reconstruct(cache);
  op.label_ = std::move(label);
  op.eigs_ = cache.eigenvalues;
  op.normal_ = is_normal(op.a_);
  op.spectral_ = std::make_shared<const SpectralCache>(std::move(cache));
  return op;
}

const SpectralCache& MatrixOperator::spectral() const {
  if (!spectral_) throw NotDiagonalizable("operator has no well-conditioned eigenbasis");
  return *spectral_;
}

double MatrixOperator::spectral_angle() const {
  double theta = 0.0;
  for (Eigen::Index i = 0; i < eigs_.size(); ++i)
    if (std::abs(eigs_(i)) > 1e-14 * scale_of(*this)) theta = std::max(theta, std::abs(std::arg(eigs_(i))));
  return theta;
}

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

Mat resolvent(const MatrixOperator& A, cplx z) {
  const auto& l = A.eigenvalues();
  const double tol = 1e-14 * (std::abs(z) + scale_of(A));
  for (Eigen::Index i = 0; i < l.size(); ++i)
    if (std::abs(z + l(i)) <= tol) throw Singular("-z is an eigenvalue");
  Mat m = A.entries();
  m.diagonal().array() += z;
  return m.partialPivLu().inverse();
}

Mat resolvent_power(const MatrixOperator& A, cplx z, double p) {
  if (!(p > 0.0)) throw DomainError("resolvent power must be positive");
  const double k = std::round(p);
  if (std::abs(p - k) < 1e-14) {
    const Mat r = resolvent(A, z);
    Mat out = r;
    for (int i = 1; i < int(k); ++i) out = out * r;
    return out;
  }
  const auto& c = A.spectral();
  return apply_on_eigenvalues(c, [&](cplx l) {
    const cplx w = z + l;
    if (std::abs(w) == 0.0) throw Singular("-z is an eigenvalue");
    return std::exp(-p * std::log(w));
  });
}

SupResult sectoriality_constant(const MatrixOperator& A, double psi, const quad::QuadConfig& cfg) {
  if (!(psi > 0.0 && psi <= kPi)) throw DomainError("sector angle must lie in (0, pi]");
  const double scale = scale_of(A);
  const auto& l = A.eigenvalues();
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    if (std::abs(l(i)) <= 1e-14 * scale) continue;
    if (std::abs(std::arg(l(i))) >= psi - 1e-12) return {std::numeric_limits<double>::infinity(), false};
  }
  const double phi = kPi - psi;
  const int per_decade = std::max(4, cfg.sup_seeds / 8);
  std::vector<double> seeds;
  for (int k = -8 * per_decade; k <= 8 * per_decade; ++k) seeds.push_back(double(k) / per_decade);
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    const double m = std::abs(l(i));
    if (m > 0.0) {
      const double c = std::log10(m);
      for (double d : {-0.1, 0.0, 0.1}) seeds.push_back(std::clamp(c + d, -8.0, 8.0));
    }
  }
  double best = 1.0;  // limit of z(z+A)^{-1} at infinity
  const std::vector<double> rays = phi == 0.0 ? std::vector<double>{0.0} : std::vector<double>{phi, -phi};
  for (double ray : rays) {
    const cplx dir = std::polar(1.0, ray);
    auto h = [&](double lr) {
      const cplx z = std::pow(10.0, lr) * dir;
      try {
        return op_norm(z * resolvent(A, z));
      } catch (const Singular&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    const double v = quad::multistart_max(h, seeds);
    best = std::max(best, v);
    // Growth toward the origin without saturation signals an unbounded constant.
    if (!std::isfinite(v) || (h(-8.0) >= v * (1.0 - 1e-12) && h(-8.0) > 1.5 * h(-7.0)))
      return {std::numeric_limits<double>::infinity(), false};
  }
  return {best, true};
}

std::map<double, SupResult> sectoriality_constants(const MatrixOperator& A, const std::vector<double>& psis,
                                                   const quad::QuadConfig& cfg) {
  std::map<double, SupResult> out;
  for (double p : psis) out[p] = sectoriality_constant(A, p, cfg);
  return out;
}

SupResult semigroup_bound(const MatrixOperator& A, const quad::QuadConfig& cfg) {
  const double scale = scale_of(A);
  const auto& l = A.eigenvalues();
  for (Eigen::Index i = 0; i < l.size(); ++i)
    if (l(i).real() < -1e-12 * scale) return {std::numeric_limits<double>::infinity(), false};
  const int per_decade = std::max(4, cfg.sup_seeds / 8);
  std::vector<double> seeds;
  for (int k = -6 * per_decade; k <= 6 * per_decade; ++k) seeds.push_back(double(k) / per_decade);
  auto h = [&](double lt) { return op_norm(semigroup(A, std::pow(10.0, lt))); };
  const double v = std::max(1.0, quad::multistart_max(h, seeds));
  if (h(6.0) >= v * (1.0 - 1e-12) && h(6.0) > 1.5 * h(5.0)) return {std::numeric_limits<double>::infinity(), false};
  return {v, true};
}

GsfBracket gsf_bracket(const MatrixOperator& A, const quad::QuadConfig& cfg, const GsfOptions& opt) {
  if (!gsf_structural(A)) return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                                  quad::Verdict::Diverged};
  const int n = A.dim();
  std::mt19937_64 rng(opt.seed);
  Mat X = complex_gaussian(n, opt.pairs, rng);
  Mat Y = complex_gaussian(n, opt.pairs, rng);
  X.colwise().normalize();
  Y.colwise().normalize();

  std::vector<double> centers;
  for (Eigen::Index i = 0; i < A.eigenvalues().size(); ++i) centers.push_back(-A.eigenvalues()(i).imag());

  GsfBracket out;
  auto squared_resolvent = [&](double alpha, double beta) {
    Mat m = A.entries();
    m.diagonal().array() += cplx(alpha, beta);
    const Mat r = m.partialPivLu().inverse();
    return Mat(r * r);
  };
  auto upper_at = [&](double la) {
    const double alpha = std::pow(10.0, la);
    auto f = [&](double beta) { return op_norm(squared_resolvent(alpha, beta)); };
    auto b = quad::integrate_real_line<double>(f, centers, alpha, cfg);
    out.verdict = quad::combine(out.verdict, b.verdict);
    return (2.0 / kPi) * alpha * b.value;
  };
  auto lower_at = [&](double la) {
    const double alpha = std::pow(10.0, la);
    auto f = [&](double beta) {
      const Mat rx = squared_resolvent(alpha, beta) * X;
      Eigen::VectorXd v(opt.pairs);
      for (int j = 0; j < opt.pairs; ++j) v(j) = std::abs(Y.col(j).dot(rx.col(j)));
      return v;
    };
    auto b = quad::integrate_real_line<Eigen::VectorXd>(f, centers, alpha, cfg);
    out.verdict = quad::combine(out.verdict, b.verdict);
    return (2.0 / kPi) * alpha * b.value.maxCoeff();
  };
  std::vector<double> grid;
  const int steps = int(std::round((opt.log_alpha_max - opt.log_alpha_min) * opt.points_per_decade));
  for (int k = 0; k <= steps; ++k) grid.push_back(opt.log_alpha_min + double(k) / opt.points_per_decade);
  out.upper = quad::multistart_max(upper_at, grid);
  out.lower = std::min(out.upper, quad::multistart_max(lower_at, grid));
  return out;
}

bool gsf_structural(const MatrixOperator& A, double tol) {
  const double scale = scale_of(A);
  const auto& l = A.eigenvalues();
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    if (l(i).real() < -tol * scale) return false;
    if (std::abs(l(i).real()) > tol * scale) continue;
    int algebraic = 0;
    for (Eigen::Index j = 0; j < l.size(); ++j)
      if (std::abs(l(j) - l(i)) <= 1e-6 * scale) ++algebraic;
    Mat m = A.entries();
    m.diagonal().array() -= l(i);
    Eigen::JacobiSVD<Mat> svd(m);
    int null_dim = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
      if (svd.singularValues()(k) <= 1e-8 * scale) ++null_dim;
    if (null_dim < algebraic) return false;
  }
  return true;
}

Mat semigroup(const MatrixOperator& A, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("semigroup time must be finite and nonnegative");
  if (t == 0.0) return Mat::Identity(A.dim(), A.dim());
  if (A.diagonalizable()) return apply_on_eigenvalues(A.spectral(), [t](cplx l) { return std::exp(-t * l); });
  return Mat((-t * A.entries()).exp());
}

Mat semigroup(const MatrixOperator& A, cplx lambda) {
  if (lambda == cplx(0.0)) return Mat::Identity(A.dim(), A.dim());
  if (!(lambda.real() > 0.0) || std::abs(std::arg(lambda)) >= kPi / 2 - A.spectral_angle())
    throw DomainError("semigroup parameter outside the sector of holomorphy");
  if (A.diagonalizable()) return apply_on_eigenvalues(A.spectral(), [lambda](cplx l) { return std::exp(-lambda * l); });
  return Mat((-lambda * A.entries()).exp());
}

MatrixOperator fractional_power(const MatrixOperator& A, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("fractional power exponent must be positive");
  SpectralCache c = A.spectral();
  for (Eigen::Index i = 0; i < c.eigenvalues.size(); ++i) {
    const cplx l = c.eigenvalues(i);
    if (l == cplx(0.0)) continue;
    if (gamma * std::abs(std::arg(l)) >= kPi) throw BranchViolation("fractional power leaves the principal branch");
    c.eigenvalues(i) = std::exp(gamma * std::log(l));
  }
  return MatrixOperator::from_spectral(std::move(c), A.label().empty() ? "" : A.label() + "^" + std::to_string(gamma));
}

Mat matrix_arccot(const MatrixOperator& B) {
  const cplx i(0.0, 1.0);
  return apply_on_eigenvalues(B.spectral(), [&](cplx z) {
    if (std::abs(z - i) < 1e-8 || std::abs(z + i) < 1e-8) throw BranchViolation("eigenvalue at a branch point of arccot");
    return std::log((z + i) / (z - i)) / (2.0 * i);
  });
}

Mat spectral_apply(const HolFunction& f, const MatrixOperator& A) {
  return apply_on_eigenvalues(A.spectral(), [&](cplx l) { return f.domain().contains(l) ? f.eval(l) : f.eval_closure(l); });
}

MatrixOperator diag_operator(const std::vector<cplx>& d) {
  if (d.empty()) throw DomainError("diag needs at least one entry");
  Vec v(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) v(i) = d[i];
  return MatrixOperator(v.asDiagonal().toDenseMatrix(), "diag");
}

MatrixOperator jordan_block(cplx lambda, int n) {
  if (n < 1) throw DomainError("Jordan block size must be positive");
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = lambda;
    if (i + 1 < n) m(i, i + 1) = 1.0;
  }
  return MatrixOperator(m, "jordan");
}

MatrixOperator random_sectorial(int dim, double theta, std::uint64_t seed) {
  if (dim < 1) throw DomainError("dimension must be positive");
  if (!(theta >= 0.0 && theta < kPi)) throw DomainError("sector angle must lie in [0, pi)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(-theta, theta), lmod(-1.0, 1.0);
  Vec d(dim);
  for (int i = 0; i < dim; ++i) {
    const double a = ang(rng);
    const double r = std::pow(10.0, lmod(rng));
    d(i) = std::polar(r, a);
  }
  const Mat S = Mat::Identity(dim, dim) + 0.5 / std::sqrt(double(dim)) * complex_gaussian(dim, dim, rng);
  return MatrixOperator(S * d.asDiagonal() * S.partialPivLu().inverse(), "random_sectorial");
}

MatrixOperator random_hilbert_contraction_gen(int dim, std::uint64_t seed) {
  if (dim < 1) throw DomainError("dimension must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lre(-1.0, 0.7), im(-3.0, 3.0);
  Vec d(dim);
  for (int i = 0; i < dim; ++i) {
    const double re = std::pow(10.0, lre(rng));
    d(i) = cplx(re, im(rng));
  }
  Eigen::HouseholderQR<Mat> qr(complex_gaussian(dim, dim, rng));
  const Mat U = qr.householderQ();
  const Mat N = U * d.asDiagonal() * U.adjoint();
  const Mat S = Mat::Identity(dim, dim) + 0.2 / std::sqrt(double(dim)) * complex_gaussian(dim, dim, rng);
  return MatrixOperator(S * N * S.partialPivLu().inverse(), "random_hilbert_contraction_gen");
}

nlohmann::json matrix_to_json(const Mat& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"dim", m.rows()}, {"entries", entries}};
}

namespace {

cplx entry_from_json(const nlohmann::json& e) {
  if (e.is_number()) return e.get<double>();
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw ParseError("matrix entry must be a number or a [re, im] pair");
}

}  // namespace

Mat matrix_from_json(const nlohmann::json& j) {
  if (j.is_object()) {
    if (!j.contains("dim") || !j.contains("entries")) throw ParseError("matrix object needs dim and entries");
    const int n = j.at("dim").get<int>();
    const auto& e = j.at("entries");
    if (n < 1 || !e.is_array() || int(e.size()) != n * n) throw ParseError("matrix entries must have dim^2 items");
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) m(i, k) = entry_from_json(e[i * n + k]);
    return m;
  }
  if (j.is_array() && !j.empty()) {
    const int n = int(j.size());
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
      if (!j[i].is_array() || int(j[i].size()) != n) throw ParseError("matrix rows must be square");
      for (int k = 0; k < n; ++k) m(i, k) = entry_from_json(j[i][k]);
    }
    return m;
  }
  throw ParseError("matrix JSON must be an object or a list of rows");
}

}  // namespace opcalc
