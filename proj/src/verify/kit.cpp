#include "verify/kit.hpp"

#include <cmath>
#include <limits>
#include <locale>

#include "proxkit/detail/parallel.hpp"

namespace proxkit::verify::kit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double unif(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

double log_unif(Rng& rng, double a, double b) { return std::exp(unif(rng, std::log(a), std::log(b))); }

int pick(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

Vector gauss(Rng& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

Vector in_ball(Rng& rng, Eigen::Index n, double r) {
  Vector d = gauss(rng, n);
  while (d.norm() < 1e-12) d = gauss(rng, n);
  const double rad = r * std::pow(unif(rng, 0.0, 1.0), 1.0 / static_cast<double>(n));
  return rad * d / d.norm();
}

Matrix gauss_mat(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

double spectral_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

DenseMap with_norm(const Matrix& m, double norm) {
  const double s = spectral_norm(m);
  if (!(s > 0)) throw ParameterError("with_norm: zero matrix");
  return DenseMap(m * (norm / s));
}

DenseMap random_map(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
  Matrix m = gauss_mat(rng, rows, cols);
  while (spectral_norm(m) < 1e-3) m = gauss_mat(rng, rows, cols);
  return with_norm(m, unif(rng, lo, hi));
}

namespace {
Matrix orthonormal_columns(Rng& rng, Eigen::Index n, Eigen::Index k) {
  Eigen::HouseholderQR<Matrix> qr(gauss_mat(rng, n, k));
  return qr.householderQ() * Matrix::Identity(n, k);
}
}  // namespace

DenseMap isometry(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  if (rows < cols) throw ParameterError("isometry: rows < cols");
  return DenseMap(orthonormal_columns(rng, rows, cols));
}

DenseMap coisometry(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  if (rows > cols) throw ParameterError("coisometry: rows > cols");
  return DenseMap(orthonormal_columns(rng, cols, rows).transpose());
}

DenseMap projector(Rng& rng, Eigen::Index n, Eigen::Index k) {
  const Matrix q = orthonormal_columns(rng, n, k);
  return DenseMap(q * q.transpose());
}

DenseMap unit_norm_map(Rng& rng, Eigen::Index n, int max_dim) {
  const Eigen::Index top = std::max<Eigen::Index>(n, max_dim);
  switch (pick(rng, n >= 2 ? 3 : 2)) {
    case 0:
      return isometry(rng, n + pick(rng, static_cast<int>(top - n) + 1), n);
    case 1:
      return coisometry(rng, 1 + pick(rng, static_cast<int>(n)), n);
    default:
      return projector(rng, n, 1 + pick(rng, static_cast<int>(n - 1)));
  }
}

DenseMap draw_map(Rng& rng, Eigen::Index n, int max_dim, bool tall) {
  const Eigen::Index top = std::max<Eigen::Index>(n, max_dim);
  if (pick(rng, 4) == 0) {
    if (tall) return isometry(rng, n + pick(rng, static_cast<int>(top - n) + 1), n);
    return unit_norm_map(rng, n, max_dim);
  }
  const Eigen::Index m = tall ? n + pick(rng, static_cast<int>(top - n) + 1) : 1 + pick(rng, static_cast<int>(top));
  return random_map(rng, m, n);
}

ConvexFunction lipschitz_fn(Rng& rng, Eigen::Index m, double beta) {
  const Vector c = gauss(rng, m, 0.7);
  switch (pick(rng, 5)) {
    case 0:
      return ConvexFunction::eucl_norm(m).translated(c).scaled(beta);
    case 1:
      return ConvexFunction::dist_ball(c, unif(rng, 0.1, 1.0)).scaled(beta);
    case 2: {
      const double r = unif(rng, 0.2, 1.0) * beta;
      Vector d = gauss(rng, m);
      d *= (beta - r) / std::max(d.norm(), 1e-12);
      return ConvexFunction::support_ball(d, r);
    }
    case 3:
      return ConvexFunction::l1_norm(m).scaled(beta / std::sqrt(static_cast<double>(m))).translated(c);
    default:
      return ConvexFunction::eucl_norm(m).moreau_envelope(unif(rng, 0.2, 2.0)).scaled(beta).translated(c);
  }
}

ConvexFunction full_domain_fn(Rng& rng, Eigen::Index m) {
  const Vector c = gauss(rng, m, 0.7);
  switch (pick(rng, 4)) {
    case 0:
      return lipschitz_fn(rng, m, unif(rng, 0.5, 2.0));
    case 1: {
      const Matrix b = gauss_mat(rng, m, m);
      return ConvexFunction::quad_form(b * b.transpose() / static_cast<double>(m) + 0.1 * Matrix::Identity(m, m))
          .translated(c);
    }
    case 2:
      return ConvexFunction::quadratic(m).scaled(unif(rng, 0.3, 2.0)).translated(c);
    default:
      return ConvexFunction::l1_norm(m).plus_quadratic(unif(rng, 0.2, 1.0)).translated(c);
  }
}

ConvexFunction general_fn(Rng& rng, Eigen::Index m) {
  switch (pick(rng, 4)) {
    case 0: {
      const double r = unif(rng, 0.8, 2.0);
      return ConvexFunction::indicator_ball(in_ball(rng, m, r - 0.5), r);
    }
    case 1: {
      const double r = unif(rng, 0.8, 2.0);
      return ConvexFunction::indicator_ball(in_ball(rng, m, r - 0.5), r).plus_quadratic(unif(rng, 0.2, 1.0));
    }
    default:
      return full_domain_fn(rng, m);
  }
}

ConvexFunction coercive_fn(Rng& rng, Eigen::Index m, double spread) {
  const Vector c = in_ball(rng, m, spread);
  const double s = unif(rng, 0.5, 1.5);
  switch (pick(rng, 5)) {
    case 0:
      return ConvexFunction::eucl_norm(m).translated(c).scaled(s);
    case 1:
      return ConvexFunction::dist_ball(c, unif(rng, 0.1, 0.5)).scaled(s);
    case 2:
      return ConvexFunction::quadratic(m).translated(c).scaled(s);
    case 3:
      return ConvexFunction::l1_norm(m).translated(c).scaled(s);
    default:
      return ConvexFunction::eucl_norm(m).moreau_envelope(unif(rng, 0.2, 1.0)).translated(c).scaled(s);
  }
}

std::vector<NamedAtom> catalog_atoms(Eigen::Index m) {
  auto ramp = [m](double a, double b) {
    Vector v(m);
    for (Eigen::Index i = 0; i < m; ++i) v[i] = a + b * static_cast<double>(i);
    return v;
  };
  Matrix a = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) a(i, i) = 1.0 + static_cast<double>(i);
  if (m > 1) a(0, 1) = a(1, 0) = 0.5;
  if (m > 2) a(m - 1, m - 1) = 0.0;
  Matrix basis = Matrix::Zero(m, 1);
  basis(0, 0) = 1.0;
  std::vector<NamedAtom> out{
      {"l1", ConvexFunction::l1_norm(m)},
      {"eucl", ConvexFunction::eucl_norm(m)},
      {"quad", ConvexFunction::quad_form(a)},
      {"affine", ConvexFunction::affine(ramp(0.5, -0.3), 0.7)},
      {"iball", ConvexFunction::indicator_ball(ramp(0.2, 0.1), 1.5)},
      {"isub", ConvexFunction::indicator_subspace(basis)},
      {"dball", ConvexFunction::dist_ball(ramp(-0.3, 0.2), 0.8)},
      {"sball", ConvexFunction::support_ball(ramp(0.1, 0.1), 0.6)},
  };
  if (m >= 2) {
    out.push_back({"sep", ConvexFunction::separable_sum({
                              atom::Block{2.0, ConvexFunction::l1_norm(1), 0},
                              atom::Block{0.5, ConvexFunction::eucl_norm(m - 1), 1},
                          })});
  }
  return out;
}

namespace {

Vector ball_proj(const Vector& v, const Vector& c, double r) {
  const Vector d = v - c;
  const double n = d.norm();
  return n <= r ? v : Vector(c + d * (r / n));
}

struct ConjProx {
  double gamma;
  const Vector& v;

  Vector operator()(const atom::L1Norm&) const { return v.cwiseMax(-1.0).cwiseMin(1.0); }
  Vector operator()(const atom::EuclNorm&) const { return ball_proj(v, Vector::Zero(v.size()), 1.0); }
  Vector operator()(const atom::QuadForm& q) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(q.a);
    const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Vector y = Vector::Zero(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double lam = es.eigenvalues()[i];
      if (lam <= 1e-12 * top) continue;
      const Vector u = es.eigenvectors().col(i);
      y += (u.dot(v) / (1.0 + gamma / lam)) * u;
    }
    return y;
  }
  Vector operator()(const atom::Affine& a) const { return a.u; }
  Vector operator()(const atom::IndicatorBall& b) const {
    const Vector w = v - gamma * b.center;
    const double n = w.norm();
    if (n <= gamma * b.radius) return Vector::Zero(v.size());
    return w * (1.0 - gamma * b.radius / n);
  }
  Vector operator()(const atom::IndicatorSubspace& s) const { return v - s.basis * (s.basis.transpose() * v); }
  Vector operator()(const atom::DistBall& b) const {
    const Vector w = v - gamma * b.center;
    const double n = w.norm();
    if (n <= gamma * b.radius) return Vector::Zero(v.size());
    return w * (std::min(n - gamma * b.radius, 1.0) / n);
  }
  Vector operator()(const atom::SupportBall& b) const { return ball_proj(v, b.center, b.radius); }
  Vector operator()(const atom::SeparableSum& s) const {
    Vector y = Vector::Zero(v.size());
    for (const auto& blk : s.blocks) {
      const Eigen::Index d = blk.fn.dim();
      const Vector part = v.segment(blk.offset, d) / blk.weight;
      y.segment(blk.offset, d) = blk.weight * conjugate_prox_reference(blk.fn, gamma / blk.weight, part);
    }
    return y;
  }
};

}  // namespace

Vector conjugate_prox_reference(const ConvexFunction& f, double gamma, const Vector& x) {
  if (!f.transforms().empty()) throw ParameterError("conjugate_prox_reference: bare atoms only");
  return std::visit(ConjProx{gamma, x}, f.atom());
}

LineMin line_min(const std::function<double(double)>& f, double lo, double hi, long steps, int zooms) {
  LineMin best{kInf, lo};
  for (int level = 0; level <= zooms; ++level) {
    const double h = (hi - lo) / static_cast<double>(steps);
    LineMin local{kInf, lo};
    for (long i = 0; i < steps; ++i) {
      const double t = lo + (static_cast<double>(i) + 0.5) * h;
      const double v = f(t);
      if (v < local.value) local = {v, t};
    }
    if (local.value < best.value || level == 0) best = local;
    if (!std::isfinite(best.value)) break;
    lo = best.arg - 2.0 * h;
    hi = best.arg + 2.0 * h;
  }
  return best;
}

FibreMin fibre_argmin(const Matrix& a, const std::function<double(const Vector&)>& phi, const Vector& x,
                      double radius, long steps, int zooms) {
  const Matrix at = a.transpose();
  Eigen::JacobiSVD<Matrix> svd(at, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  const double top = sv.size() ? sv[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-12 * std::max(1.0, top)) ++rank;
  const Vector yp = svd.solve(x);
  if ((at * yp - x).norm() > 1e-9 * std::max(1.0, x.norm())) return {kInf, Vector()};
  const Eigen::Index kdim = a.rows() - rank;
  if (kdim == 0) return {phi(yp), yp};
  if (kdim > 1) throw UnsupportedDimension("fibre_min: kernel dimension above 1");
  const Vector k = svd.matrixV().col(a.rows() - 1);
  const LineMin lm = line_min([&](double t) { return phi(yp + t * k); }, -radius, radius, steps, zooms);
  return {lm.value, yp + lm.arg * k};
}

double fibre_min(const Matrix& a, const std::function<double(const Vector&)>& phi, const Vector& x, double radius,
                 long steps, int zooms) {
  return fibre_argmin(a, phi, x, radius, steps, zooms).value;
}

double val(const SolveReport& r) { return r.value.as_double(); }

double err(const SolveReport& r) {
  if (r.value.is_infinite()) return 0.0;
  return r.residual * std::max(1.0, std::abs(r.value.value()));
}

double ineq_slack(std::initializer_list<double> errs) {
  double s = kIneqSlack;
  for (double e : errs) s += e;
  return s;
}

double eq_slack(double tol, std::initializer_list<double> values) {
  double s = 0.0;
  for (double v : values) s += tol * std::max(1.0, std::isfinite(v) ? std::abs(v) : 1.0);
  return 2.0 * s;
}

bool holds(const Case& c) {
  const double e = c.expected, g = c.got;
  if (std::isnan(e) || std::isnan(g)) return false;
  switch (c.relation) {
    case Relation::Equal:
      return e == g || std::abs(g - e) <= c.slack;
    case Relation::AtMost:
      return e == kInf || g <= e + c.slack;
    case Relation::AtLeast:
      return g == kInf || g >= e - c.slack;
    case Relation::Within:
      return g >= c.lower - c.slack && (e == kInf || g <= e + c.slack);
  }
  return false;
}

namespace {
Case make(std::string label, std::string digest, Relation r, double expected, double got, double slack,
          double lower = 0.0) {
  Case c;
  c.label = std::move(label);
  c.inputs_digest = std::move(digest);
  c.relation = r;
  c.expected = expected;
  c.got = got;
  c.slack = slack;
  c.lower = lower;
  c.pass = holds(c);
  return c;
}
}  // namespace

Case equal(std::string label, std::string digest, double expected, double got, double slack) {
  return make(std::move(label), std::move(digest), Relation::Equal, expected, got, slack);
}
Case at_most(std::string label, std::string digest, double bound, double got, double slack) {
  return make(std::move(label), std::move(digest), Relation::AtMost, bound, got, slack);
}
Case at_least(std::string label, std::string digest, double bound, double got, double slack) {
  return make(std::move(label), std::move(digest), Relation::AtLeast, bound, got, slack);
}
Case within(std::string label, std::string digest, double lower, double upper, double got, double slack) {
  return make(std::move(label), std::move(digest), Relation::Within, upper, got, slack, lower);
}

Digest::Digest() {
  os_.imbue(std::locale::classic());
  os_.precision(17);
}
Digest& Digest::operator<<(double v) {
  os_ << v << ';';
  return *this;
}
Digest& Digest::operator<<(std::string_view s) {
  os_ << s << ';';
  return *this;
}
Digest& Digest::operator<<(const Vector& v) {
  os_ << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os_ << v[i] << ',';
  os_ << "];";
  return *this;
}
Digest& Digest::operator<<(const Matrix& m) {
  os_ << m.rows() << 'x' << m.cols() << '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) os_ << m(i, j) << ',';
  os_ << "];";
  return *this;
}
std::string Digest::str() const { return fnv1a_hex(os_.str()); }

std::vector<Case> run_instances(std::string_view suite, std::uint64_t seed, std::size_t n, const Instance& fn) {
  return run_indexed(suite, seed, n, [&](std::size_t, Rng& rng, std::vector<Case>& out) { fn(rng, out); });
}

std::vector<Case> run_indexed(std::string_view suite, std::uint64_t seed, std::size_t n, const IndexedInstance& fn) {
  const std::uint64_t h = std::stoull(fnv1a_hex(suite), nullptr, 16);
  std::vector<std::vector<Case>> parts(n);
  detail::parallel_for(n, [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(i)};
    Rng rng(seq);
    try {
      fn(i, rng, parts[i]);
    } catch (const std::exception& e) {
      Case c = equal(std::string("exception: ") + e.what(), std::to_string(i), 0.0, kInf, 0.0);
      parts[i].push_back(std::move(c));
    }
  });
  std::vector<Case> out;
  for (auto& p : parts)
    for (auto& c : p) out.push_back(std::move(c));
  return out;
}

}  // namespace proxkit::verify::kit
