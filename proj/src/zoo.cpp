#include "qkt/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qkt {

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Flat:
      return "flat";
    case ManifoldKind::ConformalFlat:
      return "conformal_flat";
    case ManifoldKind::Dim4Torsion:
      return "dim4_torsion";
    case ManifoldKind::HopfLocal:
      return "hopf_local";
  }
  return "unknown";
}

ManifoldKind parse_manifold_kind(const std::string& text) {
  for (ManifoldKind k : {ManifoldKind::Flat, ManifoldKind::ConformalFlat, ManifoldKind::Dim4Torsion, ManifoldKind::HopfLocal})
    if (to_string(k) == text) return k;
  throw DomainError("unknown manifold kind '" + text + "'");
}

Box ManifoldSpec::effective_domain() const {
  if (domain) return *domain;
  if (kind == ManifoldKind::HopfLocal) return Box::cube(4, 0.4, 1.2);
  return Box::cube(dim(), -0.5, 0.5);
}

void ManifoldSpec::validate() const {
  if (n < 1) throw DimensionError("n must be at least 1");
  if (points < 1) throw DomainError("point count must be positive");
  scheme.validate();
  switch (kind) {
    case ManifoldKind::Flat:
      break;
    case ManifoldKind::ConformalFlat:
      if (!f) throw DomainError("conformal_flat needs --f");
      break;
    case ManifoldKind::Dim4Torsion:
      if (n != 1) throw DimensionError("dim4_torsion requires n = 1");
      if (!t) throw DomainError("dim4_torsion needs --t");
      break;
    case ManifoldKind::HopfLocal:
      if (n != 1) throw DimensionError("hopf_local requires n = 1");
      break;
  }
  if (t && n != 1) throw DimensionError("--t is only meaningful in dimension 4");
  const Box box = effective_domain();
  if (box.dim() != dim()) throw DimensionError("domain dimension does not match 4n");
  if (!(box.upper.array() > box.lower.array()).all()) throw DomainError("domain box has no volume");
  if ((box.upper - box.lower).minCoeff() <= 2.0 * sample_margin(scheme))
    throw DomainError("domain is too small for the FD stencils");
  if (kind == ManifoldKind::HopfLocal) {
    // The closest point of the box to the origin must stay away from it.
    const Vector nearest = box.lower.cwiseMax(Vector::Zero(4)).cwiseMin(box.upper);
    if (nearest.norm() < 1e-3) throw DomainError("hopf_local domain must exclude the origin");
  }
}

double sample_margin(const FDScheme& scheme) { return 3.0 * std::max(scheme.h, scheme.h2); }

namespace {

double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

std::vector<Point> halton_points(const Box& box, int count, std::uint64_t seed, double margin) {
  const int d = box.dim();
  if (d > static_cast<int>(std::size(kPrimes))) throw DimensionError("Halton sampler supports up to 16 dimensions");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Point p(d);
    const std::uint64_t index = seed + static_cast<std::uint64_t>(k) + 1;
    for (int i = 0; i < d; ++i) {
      const double lo = box.lower(i) + margin;
      const double hi = box.upper(i) - margin;
      p(i) = lo + (hi - lo) * radical_inverse(index, kPrimes[i]);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

Expression parse_field_expression(const std::string& text, int dim) {
  Expression e = parse_expression(text);
  if (e.max_variable() > dim) {
    const std::size_t pos = text.find("x" + std::to_string(e.max_variable()));
    throw ParseError("unknown identifier 'x" + std::to_string(e.max_variable()) + "' in dimension " +
                         std::to_string(dim),
                     pos == std::string::npos ? 0 : pos);
  }
  return e;
}

HypercomplexField perturbed_hypercomplex(int n, double degrees) {
  HypercomplexField h = build_standard_hypercomplex(n);
  if (degrees == 0.0) return h;
  const double a = degrees * std::numbers::pi / 180.0;
  Matrix rot = Matrix::Identity(4 * n, 4 * n);
  rot(0, 0) = std::cos(a);
  rot(0, 1) = -std::sin(a);
  rot(1, 0) = std::sin(a);
  rot(1, 1) = std::cos(a);
  const Matrix j2 = rot * h(1, Point::Zero(4 * n)) * rot.transpose();
  h.J[1] = [j2](const Point&) { return j2; };
  return h;
}

namespace {

CoordinatePatch flat_patch(int n, const Box& box) {
  const Matrix id = Matrix::Identity(4 * n, 4 * n);
  return CoordinatePatch{n, box, [id](const Point&) { return id; }, 1};
}

ConformalFactor factor_from(const Expression& e) {
  return ConformalFactor{[e](const Point& p) { return e(p); }};
}

void check_positive(const ConformalFactor& f, const std::vector<Point>& pts, const Box& box) {
  std::vector<Point> probe = pts;
  probe.push_back(0.5 * (box.lower + box.upper));
  probe.push_back(box.lower + 1e-9 * (box.upper - box.lower));
  probe.push_back(box.upper - 1e-9 * (box.upper - box.lower));
  for (const Point& p : probe) {
    const double v = f(p);
    if (!(v >= 1e-8)) throw DomainError("conformal factor is not positive on the domain");
  }
}

}  // namespace

BuiltManifold build_manifold(const ManifoldSpec& spec) {
  spec.validate();
  const Box box = spec.effective_domain();
  const int dim = spec.dim();
  BuiltManifold out{spec, {}, std::nullopt, std::nullopt, {}, {}};
  out.points = halton_points(box, spec.points, spec.seed, sample_margin(spec.scheme));
  const HypercomplexField H = perturbed_hypercomplex(spec.n, spec.perturb_j2_degrees);
  const CoordinatePatch flat = flat_patch(spec.n, box);

  auto zero_t = FormField{1, [](const Point&) { return Tensor(4, 1); }};
  auto flat_structure = [&]() {
    if (spec.n == 1) return build_qkt_dim4(flat, H, zero_t, spec.scheme);
    return build_qkt(QuaternionicHermitianData{flat, H}, spec.scheme, out.points);
  };

  switch (spec.kind) {
    case ManifoldKind::Flat:
      out.structure = flat_structure();
      break;
    case ManifoldKind::ConformalFlat: {
      const Expression fe = parse_field_expression(*spec.f, dim);
      const ConformalFactor f = factor_from(fe);
      check_positive(f, out.points, box);
      if (spec.n >= 2) {
        CoordinatePatch patch = flat;
        patch.metric = [fe, dim](const Point& p) {
          return Matrix(fe(p) * Matrix::Identity(dim, dim));
        };
        out.structure = build_qkt(QuaternionicHermitianData{patch, H}, spec.scheme, out.points);
        out.conformal_base = build_qkt(QuaternionicHermitianData{flat, H}, spec.scheme, out.points);
      } else {
        out.conformal_base = flat_structure();
        out.structure = conformal_rescale(*out.conformal_base, f, out.points);
      }
      out.factor = f;
      out.factor_text = fe.to_string();
      break;
    }
    case ManifoldKind::Dim4Torsion: {
      std::array<Expression, 4> tc;
      for (int i = 0; i < 4; ++i) tc[static_cast<std::size_t>(i)] = parse_field_expression((*spec.t)[static_cast<std::size_t>(i)], 4);
      FormField t{1, [tc](const Point& p) {
                    Tensor v(4, 1);
                    for (int i = 0; i < 4; ++i) v(i) = tc[static_cast<std::size_t>(i)](p);
                    return v;
                  }};
      CoordinatePatch patch = flat;
      if (spec.f) {
        const Expression fe = parse_field_expression(*spec.f, 4);
        check_positive(factor_from(fe), out.points, box);
        patch.metric = [fe](const Point& p) { return Matrix(fe(p) * Matrix::Identity(4, 4)); };
      }
      out.structure = build_qkt_dim4(patch, H, t, spec.scheme);
      break;
    }
    case ManifoldKind::HopfLocal: {
      const Expression fe = parse_expression("1/(x1^2+x2^2+x3^2+x4^2)");
      const ConformalFactor f = factor_from(fe);
      check_positive(f, out.points, box);
      out.conformal_base = flat_structure();
      out.structure = conformal_rescale(*out.conformal_base, f, out.points);
      out.factor = f;
      out.factor_text = fe.to_string();
      break;
    }
  }
  return out;
}

}  // namespace qkt
