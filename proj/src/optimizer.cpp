#include "mdm/optimizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mdm/errors.hpp"
#include "mdm/kernels/segment_distance.hpp"
#include "mdm/steiner.hpp"

namespace mdm {

namespace {

template <class F>
double golden_max(F&& f, double a, double b, int iterations = 60) {
  constexpr double g = 0.6180339887498949;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc > fd) {
      b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

struct PenaltyObjective::Impl {
  OptimizationProblem pb;
  double r = 1.0;
  std::vector<VertexControl> ctl;
  std::vector<int> var_of;
  int period_var = -1;
  std::size_t dim = 0;
  std::optional<ConvexCurve> slide;
  double mu = 0.0;
  bool coverage = false;
  int images = 0;

  // A coverage sample: a curve arclength (wall < 0) or a fraction of the
  // period along wall 0 (low) or 1 (high).
  struct Sample {
    int wall = -1;
    double param = 0.0;
  };
  std::vector<Sample> lattice, witnesses;
  // Augmented Lagrangian polish: witnesses only, one multiplier each.
  bool polish = false;
  std::vector<double> lambda;
  std::vector<Point2> curve_points;  // cached positions of the curve lattice

  struct Decoded {
    std::vector<Point2> pos;
    double period = 0.0;
  };

  explicit Impl(const OptimizationProblem& p) : pb(p), r(p.r) {
    const int nv = pb.net.vertex_count();
    ctl = pb.controls.empty() ? std::vector<VertexControl>(static_cast<std::size_t>(nv)) : pb.controls;
    if (static_cast<int>(ctl.size()) != nv) throw Error("vertex control count does not match the network");
    coverage = pb.curve.has_value() || pb.cell.has_value();
    if (pb.cell) images = pb.cell->images;
    var_of.assign(static_cast<std::size_t>(nv), -1);
    for (int v = 0; v < nv; ++v) {
      const auto& c = ctl[static_cast<std::size_t>(v)];
      if (c.mode == VertexMode::Free) { var_of[static_cast<std::size_t>(v)] = static_cast<int>(dim); dim += 2; }
      else if (c.mode == VertexMode::Sliding || c.mode == VertexMode::Polar) {
        var_of[static_cast<std::size_t>(v)] = static_cast<int>(dim);
        dim += 1;
      }
      if (c.mode == VertexMode::Polar) {
        for (int m : {c.master, c.ref}) {
          if (m < 0 || m >= nv || m == v) throw Error("polar vertex needs a master and a reference vertex");
          const auto mm = ctl[static_cast<std::size_t>(m)].mode;
          if (mm == VertexMode::Tied || mm == VertexMode::Polar) throw Error("polar anchors must be free, pinned or sliding");
        }
      } else if (c.mode == VertexMode::Tied) {
        if (c.master < 0 || c.master >= nv || ctl[static_cast<std::size_t>(c.master)].mode == VertexMode::Tied)
          throw Error("tied vertex needs an untied master");
      }
    }
    if (pb.cell && pb.cell->optimize_period) { period_var = static_cast<int>(dim); dim += 1; }
    const bool any_sliding = std::any_of(ctl.begin(), ctl.end(), [](const VertexControl& c) { return c.mode == VertexMode::Sliding; });
    if (any_sliding) {
      if (pb.slide_curve) slide = pb.slide_curve;
      else if (pb.curve) slide = inner_offset(*pb.curve, r, 64).curve;
      else throw Error("sliding vertices need a slide curve");
    }
    build_lattice(pb.n_samples);
  }

  void build_lattice(int n) {
    lattice.clear();
    if (pb.curve) {
      const double per = pb.curve->perimeter();
      for (int k = 0; k < n; ++k) lattice.push_back({-1, per * k / n});
      for (double c : pb.curve->corner_params()) lattice.push_back({-1, c});
    } else if (pb.cell) {
      for (int wall = 0; wall < 2; ++wall)
        for (int k = 0; k < n; ++k) lattice.push_back({wall, static_cast<double>(k) / n});
    }
    cache_curve_points();
  }

  void cache_curve_points() {
    curve_points.clear();
    if (!pb.curve) return;
    for (const auto& s : lattice) curve_points.push_back(pb.curve->point(s.param));
  }

  std::vector<double> initial_point() const {
    std::vector<double> th(dim);
    for (int v = 0; v < pb.net.vertex_count(); ++v) {
      const int k = var_of[static_cast<std::size_t>(v)];
      if (k < 0) continue;
      const Point2 p = pb.net.vertex(v);
      const auto& c = ctl[static_cast<std::size_t>(v)];
      if (c.mode == VertexMode::Free) {
        th[static_cast<std::size_t>(k)] = p.x / r;
        th[static_cast<std::size_t>(k + 1)] = p.y / r;
      } else if (c.mode == VertexMode::Polar) {
        th[static_cast<std::size_t>(k)] = distance(p, pb.net.vertex(c.master)) / r;
      } else {
        th[static_cast<std::size_t>(k)] = slide->project(p).s / r;
      }
    }
    if (period_var >= 0) th[static_cast<std::size_t>(period_var)] = pb.cell->period / r;
    return th;
  }

  Decoded decode(const std::vector<double>& th) const {
    Decoded d;
    d.pos = pb.net.vertices();
    d.period = pb.cell ? (period_var >= 0 ? th[static_cast<std::size_t>(period_var)] * r : pb.cell->period) : 0.0;
    for (int v = 0; v < pb.net.vertex_count(); ++v) {
      const int k = var_of[static_cast<std::size_t>(v)];
      const auto mode = ctl[static_cast<std::size_t>(v)].mode;
      if (mode == VertexMode::Free) d.pos[static_cast<std::size_t>(v)] = {th[static_cast<std::size_t>(k)] * r, th[static_cast<std::size_t>(k + 1)] * r};
      else if (mode == VertexMode::Sliding) d.pos[static_cast<std::size_t>(v)] = slide->point(th[static_cast<std::size_t>(k)] * r);
    }
    for (int v = 0; v < pb.net.vertex_count(); ++v) {
      const auto& c = ctl[static_cast<std::size_t>(v)];
      if (c.mode != VertexMode::Polar) continue;
      const Point2 m = d.pos[static_cast<std::size_t>(c.master)];
      d.pos[static_cast<std::size_t>(v)] =
          m + rotate(normalized(d.pos[static_cast<std::size_t>(c.ref)] - m), c.angle) * (th[static_cast<std::size_t>(var_of[static_cast<std::size_t>(v)])] * r);
    }
    for (int v = 0; v < pb.net.vertex_count(); ++v) {
      const auto& c = ctl[static_cast<std::size_t>(v)];
      if (c.mode == VertexMode::Tied) d.pos[static_cast<std::size_t>(v)] = d.pos[static_cast<std::size_t>(c.master)] + Vec2{c.shift * d.period, 0.0};
    }
    return d;
  }

  Network network_from(const Decoded& d) const {
    std::vector<Edge> edges = pb.net.edges();
    return Network(d.pos, std::move(edges));
  }

  // Segment table including periodic images: entry i is edge seg_edge[i]
  // translated by seg_shift[i] periods.
  struct Index {
    kernels::SegmentSoA segs;
    std::vector<int> seg_edge, seg_shift;
    std::vector<int> arcs;
  };

  Index build_index(const Decoded& d) const {
    Index ix;
    for (int e = 0; e < pb.net.edge_count(); ++e) {
      const Edge& ed = pb.net.edge(e);
      if (ed.kind == EdgeKind::Arc) { ix.arcs.push_back(e); continue; }
      const Point2 a = d.pos[static_cast<std::size_t>(ed.a)], b = d.pos[static_cast<std::size_t>(ed.b)];
      for (int k = -images; k <= images; ++k) {
        const double sx = k * d.period;
        ix.segs.push(a.x + sx, a.y, b.x + sx, b.y);
        ix.seg_edge.push_back(e);
        ix.seg_shift.push_back(k);
      }
    }
    ix.segs.finalize();
    return ix;
  }

  // Distance to one feature: slot i >= 0 of the segment table, or arc edge
  // -1 - feature.
  struct Hit {
    double d = std::numeric_limits<double>::infinity();
    int feature = 0;
    int edge = -1;
    int shift = 0;
    double t = 0.0;
    Point2 c;
    bool arc_interior = false;
  };

  Hit segment_hit(const Index& ix, std::size_t i, Point2 y) const {
    const auto& s = ix.segs;
    Hit h;
    const double t = std::clamp(((y.x - s.ax[i]) * s.ex[i] + (y.y - s.ay[i]) * s.ey[i]) * s.inv_len2[i], 0.0, 1.0);
    h.c = {s.ax[i] + t * s.ex[i], s.ay[i] + t * s.ey[i]};
    h.d = distance(y, h.c);
    h.feature = static_cast<int>(i);
    h.edge = ix.seg_edge[i];
    h.shift = ix.seg_shift[i];
    h.t = t;
    return h;
  }

  Hit arc_hit(const Decoded& dec, int e, Point2 y) const {
    const Edge& ed = pb.net.edge(e);
    const Point2 a = dec.pos[static_cast<std::size_t>(ed.a)], b = dec.pos[static_cast<std::size_t>(ed.b)];
    const Vec2 ra = a - ed.center, rb = b - ed.center;
    const double ta = ra.angle(), tb = rb.angle();
    const ArcGeom g{ed.center, 0.5 * (ra.norm() + rb.norm()), ta, ed.ccw ? wrap_two_pi(tb - ta) : -wrap_two_pi(ta - tb)};
    const auto cp = closest_on_arc(y, g);
    Hit h;
    h.d = cp.distance;
    h.feature = -1 - e;
    h.edge = e;
    h.t = cp.param;
    h.c = cp.point;
    h.arc_interior = cp.param > 0.0 && cp.param < 1.0;
    return h;
  }

  Hit feature_hit(const Index& ix, const Decoded& dec, int feature, Point2 y) const {
    return feature >= 0 ? segment_hit(ix, static_cast<std::size_t>(feature), y) : arc_hit(dec, -1 - feature, y);
  }

  Hit nearest(const Index& ix, const Decoded& dec, Point2 y) const {
    Hit h;
    if (ix.segs.count > 0) {
      const auto n = kernels::nearest_segment(ix.segs, y.x, y.y);
      h = segment_hit(ix, static_cast<std::size_t>(n.index), y);
    }
    for (int e : ix.arcs) {
      const Hit a = arc_hit(dec, e, y);
      if (a.d < h.d) h = a;
    }
    return h;
  }

  Point2 wall_point(int wall, double p, double period) const {
    if (wall < 0) return pb.curve->point(pb.curve->wrap(p));
    return {p * period, wall == 0 ? pb.cell->wall_low : pb.cell->wall_high};
  }

  Vec2 wall_velocity(int wall, double p, double period) const {
    if (wall < 0) return pb.curve->tangent(pb.curve->wrap(p));
    return {period, 0.0};
  }

  double lattice_spacing() const {
    return pb.curve ? pb.curve->perimeter() / pb.n_samples : 1.0 / pb.n_samples;
  }

  // Scatters dJ * grad(distance) onto the vertices and the period.
  void add_grad(const Hit& h, Point2 y, double dJ, const Decoded& d, int wall, double p, std::vector<Vec2>& gpos,
                double& gW) const {
    if (!(h.d > 0.0)) return;
    const Vec2 u = (y - h.c) / h.d;
    const Edge& ed = pb.net.edge(h.edge);
    if (ed.kind == EdgeKind::Segment) {
      gpos[static_cast<std::size_t>(ed.a)] -= u * ((1.0 - h.t) * dJ);
      gpos[static_cast<std::size_t>(ed.b)] -= u * (h.t * dJ);
    } else if (h.arc_interior) {
      // Only the radius moves the nearest point; it is the mean endpoint radius.
      const double sgn = distance(y, ed.center) >= distance(h.c, ed.center) ? 1.0 : -1.0;
      gpos[static_cast<std::size_t>(ed.a)] -= normalized(d.pos[static_cast<std::size_t>(ed.a)] - ed.center) * (0.5 * sgn * dJ);
      gpos[static_cast<std::size_t>(ed.b)] -= normalized(d.pos[static_cast<std::size_t>(ed.b)] - ed.center) * (0.5 * sgn * dJ);
    } else {
      gpos[static_cast<std::size_t>(h.t < 0.5 ? ed.a : ed.b)] -= u * dJ;
    }
    if (wall >= 0) gW += dJ * u.x * (p - h.shift);
  }

  // Maximum of the distance over a window of the wall. When the maximum is a
  // ridge between two features, its derivative is the convex combination of
  // the two feature derivatives that keeps them equal.
  struct Peak {
    double d = 0.0;
    double p = 0.0;
    Point2 y;
    Hit h1, h2;
    double w1 = 1.0, w2 = 0.0;
  };

  Peak locate_peak(const Index& ix, const Decoded& dec, int wall, double p0, double win) const {
    auto Y = [&](double p) { return wall_point(wall, p, dec.period); };
    const double p = golden_max([&](double q) { return nearest(ix, dec, Y(q)).d; }, p0 - win, p0 + win, 48);
    const double eps = 1e-7 * win;
    const Hit hl = nearest(ix, dec, Y(p - eps)), hr = nearest(ix, dec, Y(p + eps));
    Peak pk;
    pk.p = p;
    pk.y = Y(p);
    pk.h1 = nearest(ix, dec, pk.y);
    pk.d = pk.h1.d;
    if (hl.feature == hr.feature) return pk;
    auto gap = [&](double q) {
      const Point2 y = Y(q);
      return feature_hit(ix, dec, hl.feature, y).d - feature_hit(ix, dec, hr.feature, y).d;
    };
    double lo = p - eps, hi = p + eps;
    if (!(gap(lo) < 0.0 && gap(hi) > 0.0)) return pk;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (gap(mid) < 0.0) lo = mid; else hi = mid;
    }
    const double pc = 0.5 * (lo + hi);
    const Point2 y = Y(pc);
    const Hit h1 = feature_hit(ix, dec, hl.feature, y), h2 = feature_hit(ix, dec, hr.feature, y);
    const Vec2 v = wall_velocity(wall, pc, dec.period);
    const double s1 = dot(y - h1.c, v) / h1.d, s2 = dot(y - h2.c, v) / h2.d;
    if (!(s1 > 0.0 && s2 < 0.0)) return pk;
    pk.p = pc;
    pk.y = y;
    pk.h1 = h1;
    pk.h2 = h2;
    pk.d = 0.5 * (h1.d + h2.d);
    pk.w1 = -s2 / (s1 - s2);
    pk.w2 = s1 / (s1 - s2);
    return pk;
  }

  double length_and_grad(const Decoded& d, std::vector<Vec2>* g) const {
    double L = 0.0;
    for (int e = 0; e < pb.net.edge_count(); ++e) {
      const Edge& ed = pb.net.edge(e);
      const Point2 a = d.pos[static_cast<std::size_t>(ed.a)], b = d.pos[static_cast<std::size_t>(ed.b)];
      if (ed.kind == EdgeKind::Segment) {
        const double l = distance(a, b);
        L += l;
        if (g && l > 0.0) {
          const Vec2 u = (a - b) / l;
          (*g)[static_cast<std::size_t>(ed.a)] += u;
          (*g)[static_cast<std::size_t>(ed.b)] -= u;
        }
      } else {
        const Vec2 ra = a - ed.center, rb = b - ed.center;
        const double na = ra.norm(), nb = rb.norm();
        const double rho = 0.5 * (na + nb);
        const double sweep = ed.ccw ? wrap_two_pi(rb.angle() - ra.angle()) : wrap_two_pi(ra.angle() - rb.angle());
        L += rho * sweep;
        if (g) {
          const Vec2 dta = perp(ra) / (na * na), dtb = perp(rb) / (nb * nb);
          const double sgn = ed.ccw ? 1.0 : -1.0;
          (*g)[static_cast<std::size_t>(ed.a)] += ra / na * (0.5 * sweep) - dta * (sgn * rho);
          (*g)[static_cast<std::size_t>(ed.b)] += rb / nb * (0.5 * sweep) + dtb * (sgn * rho);
        }
      }
    }
    return L;
  }

  double value(const std::vector<double>& th, std::vector<double>* grad, double* length_out = nullptr,
               double* violation_out = nullptr) const {
    const Decoded d = decode(th);
    const std::size_t nv = d.pos.size();
    std::vector<Vec2> gpos(nv);
    double gW = 0.0;
    const double L = length_and_grad(d, grad ? &gpos : nullptr);
    double J = 0.0;
    const bool per_cost = pb.cell && pb.cell->optimize_period;
    if (per_cost) {
      J = L / d.period;
      if (grad) {
        for (auto& v : gpos) v = v / d.period;
        gW -= L / (d.period * d.period);
      }
    } else {
      J = L / r;
      if (grad) for (auto& v : gpos) v = v / r;
    }
    double worst = -std::numeric_limits<double>::infinity();
    if (coverage) {
      const Index ix = build_index(d);
      for (std::size_t i = 0; i < lattice.size() && !polish; ++i) {
        const Sample& s = lattice[i];
        const Point2 y = s.wall < 0 ? curve_points[i] : wall_point(s.wall, s.param, d.period);
        const Hit h = nearest(ix, d, y);
        worst = std::max(worst, h.d - r);
        if (!(h.d > r)) continue;
        const double v = (h.d - r) / r;
        J += mu * v * v;
        if (grad) add_grad(h, y, 2.0 * mu * v / r, d, s.wall, s.param, gpos, gW);
      }
      const double win = 1.5 * lattice_spacing();
      for (std::size_t i = 0; i < witnesses.size(); ++i) {
        const Sample& s = witnesses[i];
        const Peak pk = locate_peak(ix, d, s.wall, s.param, win);
        worst = std::max(worst, pk.d - r);
        const double v = (pk.d - r) / r;
        double dJ = 0.0;
        if (polish) {
          const double lam = lambda[i];
          if (lam + mu * v <= 0.0) {
            J -= lam * lam / (2.0 * mu);
            continue;
          }
          J += lam * v + 0.5 * mu * v * v;
          dJ = (lam + mu * v) / r;
        } else {
          if (!(pk.d > r)) continue;
          J += mu * v * v;
          dJ = 2.0 * mu * v / r;
        }
        if (!grad) continue;
        add_grad(pk.h1, pk.y, dJ * pk.w1, d, s.wall, pk.p, gpos, gW);
        if (pk.w2 > 0.0) add_grad(pk.h2, pk.y, dJ * pk.w2, d, s.wall, pk.p, gpos, gW);
      }
    }
    if (length_out) *length_out = L;
    if (violation_out) *violation_out = coverage ? worst : 0.0;
    if (grad) {
      for (std::size_t v = 0; v < nv; ++v) {
        const auto& c = ctl[v];
        if (c.mode == VertexMode::Tied) {
          gpos[static_cast<std::size_t>(c.master)] += gpos[v];
          gW += c.shift * gpos[v].x;
        }
      }
      std::vector<double> polar_grad(nv, 0.0);
      for (std::size_t v = 0; v < nv; ++v) {
        const auto& c = ctl[v];
        if (c.mode != VertexMode::Polar) continue;
        const Point2 m = d.pos[static_cast<std::size_t>(c.master)];
        const Vec2 f = d.pos[static_cast<std::size_t>(c.ref)] - m;
        const double nf = f.norm();
        const Vec2 u = f / nf;
        const double len = th[static_cast<std::size_t>(var_of[v])] * r;
        const Vec2 gp = gpos[v];
        polar_grad[v] = dot(gp, rotate(u, c.angle));
        // d/d(ref) of len * rotate(u) is len * (I - u u^T) / |f| composed with the rotation.
        const Vec2 back = rotate(gp, -c.angle);
        const Vec2 gu = (back - u * dot(u, back)) * (len / nf);
        gpos[static_cast<std::size_t>(c.master)] += gp - gu;
        gpos[static_cast<std::size_t>(c.ref)] += gu;
      }
      grad->assign(dim, 0.0);
      for (std::size_t v = 0; v < nv; ++v) {
        const int k = var_of[v];
        if (k < 0) continue;
        if (ctl[v].mode == VertexMode::Free) {
          (*grad)[static_cast<std::size_t>(k)] = gpos[v].x * r;
          (*grad)[static_cast<std::size_t>(k + 1)] = gpos[v].y * r;
        } else if (ctl[v].mode == VertexMode::Polar) {
          (*grad)[static_cast<std::size_t>(k)] = polar_grad[v] * r;
        } else {
          (*grad)[static_cast<std::size_t>(k)] = dot(gpos[v], slide->tangent(th[static_cast<std::size_t>(k)] * r)) * r;
        }
      }
      if (period_var >= 0) (*grad)[static_cast<std::size_t>(period_var)] = gW * r;
    }
    return J;
  }

  // One witness per lattice local maximum within 10% of r. Each witness
  // tracks the maximum over a window of 1.5 lattice spacings on either side.
  void refresh_witnesses(const std::vector<double>& th) {
    const std::vector<Sample> old = std::move(witnesses);
    const std::vector<double> old_lambda = std::move(lambda);
    witnesses.clear();
    lambda.clear();
    if (!coverage) return;
    const Decoded d = decode(th);
    const Index ix = build_index(d);
    const int walls = pb.curve ? 1 : 2;
    const int n = pb.n_samples;
    const double h = lattice_spacing();
    for (int wall = 0; wall < walls; ++wall) {
      const int w = pb.curve ? -1 : wall;
      std::vector<double> D(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) D[static_cast<std::size_t>(k)] = nearest(ix, d, wall_point(w, k * h, d.period)).d;
      for (int k = 0; k < n; ++k) {
        const double dk = D[static_cast<std::size_t>(k)];
        if (dk < 0.9 * r) continue;
        if (dk < D[static_cast<std::size_t>((k + n - 1) % n)] || dk < D[static_cast<std::size_t>((k + 1) % n)]) continue;
        witnesses.push_back({w, k * h});
      }
    }
    // Multipliers follow their witness to the nearest new seed.
    lambda.assign(witnesses.size(), 0.0);
    const double span = pb.curve ? pb.curve->perimeter() : 1.0;
    for (std::size_t i = 0; i < witnesses.size(); ++i) {
      double best = 2.5 * h;
      for (std::size_t j = 0; j < old_lambda.size(); ++j) {
        if (old[j].wall != witnesses[i].wall) continue;
        double dp = std::abs(old[j].param - witnesses[i].param);
        dp = std::min(dp, span - dp);
        if (dp < best) { best = dp; lambda[i] = old_lambda[j]; }
      }
    }
  }

  // Peak heights (d - r) / r at the current witnesses.
  std::vector<double> witness_values(const std::vector<double>& th) const {
    const Decoded d = decode(th);
    const Index ix = build_index(d);
    const double win = 1.5 * lattice_spacing();
    std::vector<double> out;
    for (const Sample& s : witnesses) out.push_back((locate_peak(ix, d, s.wall, s.param, win).d - r) / r);
    return out;
  }
};

PenaltyObjective::PenaltyObjective(const OptimizationProblem& problem) : impl_(new Impl(problem)) {}
PenaltyObjective::~PenaltyObjective() { delete impl_; }
std::vector<double> PenaltyObjective::initial_point() const { return impl_->initial_point(); }
double PenaltyObjective::value(const std::vector<double>& theta, std::vector<double>* grad) const {
  return impl_->value(theta, grad);
}
void PenaltyObjective::set_mu(double mu) { impl_->mu = mu; }
void PenaltyObjective::refresh_witnesses(const std::vector<double>& theta) { impl_->refresh_witnesses(theta); }
Network PenaltyObjective::network_at(const std::vector<double>& theta) const {
  return impl_->network_from(impl_->decode(theta));
}
std::size_t PenaltyObjective::dimension() const { return impl_->dim; }

namespace {

struct StageResult {
  int iterations = 0;
  std::string reason;
};

StageResult run_bfgs(PenaltyObjective::Impl& obj, std::vector<double>& th, int stage, int max_iter,
                     double grad_tol, std::vector<TraceEntry>& trace) {
  const std::size_t n = th.size();
  StageResult res;
  if (n == 0) { res.reason = "no free variables"; return res; }
  Eigen::Map<Eigen::VectorXd> x(th.data(), static_cast<Eigen::Index>(n));
  std::vector<double> gv;
  double L = 0.0, viol = 0.0;
  double f = obj.value(th, &gv, &L, &viol);
  if (!std::isfinite(f)) throw Diverged("objective is not finite at the start of a stage");
  Eigen::VectorXd g = Eigen::Map<Eigen::VectorXd>(gv.data(), static_cast<Eigen::Index>(n));
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  bool fresh = true;
  int flat = 0;
  trace.push_back({0, stage, obj.mu, L, viol, g.lpNorm<Eigen::Infinity>(), f});
  constexpr double kMaxStep = 0.25;  // in units of r
  for (int it = 1; it <= max_iter; ++it) {
    if (it % 100 == 0 && obj.coverage) {
      // Maxima drift as the network moves; re-seed the witnesses.
      obj.refresh_witnesses(th);
      f = obj.value(th, &gv, &L, &viol);
      g = Eigen::Map<Eigen::VectorXd>(gv.data(), static_cast<Eigen::Index>(n));
    }
    if (g.lpNorm<Eigen::Infinity>() <= grad_tol) { res.reason = "gradient tolerance"; break; }
    Eigen::VectorXd p = -H * g;
    if (!(p.dot(g) < 0.0)) {
      H.setIdentity();
      fresh = true;
      p = -g;
    }
    const double pmax = p.lpNorm<Eigen::Infinity>();
    if (pmax > kMaxStep) p *= kMaxStep / pmax;
    const double slope = p.dot(g);
    double t = 1.0, fn = f, Ln = L, vn = viol;
    std::vector<double> trial(n), gn;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = th[i] + t * p(static_cast<Eigen::Index>(i));
      fn = obj.value(trial, &gn, &Ln, &vn);
      if (std::isfinite(fn) && fn <= f + 1e-4 * t * slope) { accepted = true; break; }
    }
    if (!accepted) {
      if (!fresh) {
        H.setIdentity();
        fresh = true;
        continue;
      }
      res.reason = "line search stalled";
      break;
    }
    Eigen::VectorXd gnew = Eigen::Map<Eigen::VectorXd>(gn.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd s = t * p;
    const Eigen::VectorXd yv = gnew - g;
    const double sy = s.dot(yv);
    if (sy > 1e-14 * s.norm() * yv.norm()) {
      if (fresh) {
        H *= sy / yv.squaredNorm();
        fresh = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd Hy = H * yv;
      H += (rho * rho * yv.dot(Hy) + rho) * (s * s.transpose()) - rho * (Hy * s.transpose() + s * Hy.transpose());
    }
    const double df = f - fn;
    x = Eigen::Map<Eigen::VectorXd>(trial.data(), static_cast<Eigen::Index>(n));
    f = fn;
    g = gnew;
    L = Ln;
    viol = vn;
    res.iterations = it;
    trace.push_back({it, stage, obj.mu, L, viol, g.lpNorm<Eigen::Infinity>(), f});
    flat = df <= 1e-15 * (1.0 + std::abs(f)) ? flat + 1 : 0;
    if (flat >= 8) { res.reason = "objective stagnated"; break; }
    if (it == max_iter) res.reason = "iteration limit";
  }
  if (res.reason.empty()) res.reason = "gradient tolerance";
  return res;
}

// Augmented Lagrangian rounds on the peak witnesses. Pure penalties leave the
// active contacts unbalanced at O(1/mu); multipliers remove that bias.
void polish_contacts(PenaltyObjective::Impl& obj, std::vector<double>& th, const OptimizationProblem& pb,
                     int& stage, std::string& reason, std::vector<TraceEntry>& trace) {
  const double tol = pb.violation_tol_rel;
  double L = 0.0, viol = 0.0;
  obj.refresh_witnesses(th);
  obj.value(th, nullptr, &L, &viol);
  const double start_viol = viol;
  const std::vector<double> start = th;
  const double mu_pen = obj.mu;
  {
    const auto g = obj.witness_values(th);
    for (std::size_t i = 0; i < g.size(); ++i) obj.lambda[i] = 2.0 * mu_pen * std::max(0.0, g[i]);
  }
  obj.polish = true;
  obj.mu = pb.polish_mu;
  for (int round = 0; round < pb.polish_rounds; ++round) {
    reason = run_bfgs(obj, th, stage++, pb.max_iterations, pb.grad_tol, trace).reason;
    const auto g = obj.witness_values(th);
    double worst = 0.0, change = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double next = std::max(0.0, obj.lambda[i] + obj.mu * g[i]);
      change = std::max(change, std::abs(next - obj.lambda[i]));
      obj.lambda[i] = next;
      worst = std::max(worst, g[i]);
    }
    if (worst <= tol && change <= 1e-9 * obj.mu) break;
    obj.refresh_witnesses(th);
  }
  obj.polish = false;
  obj.mu = mu_pen;
  obj.refresh_witnesses(th);
  obj.value(th, nullptr, &L, &viol);
  if (viol > std::max(start_viol, tol * pb.r)) {
    th = start;
    reason += " (polish rejected)";
  } else {
    reason = "contacts balanced after " + reason;
  }
}

}  // namespace

OptimizationResult minimize_length(const OptimizationProblem& problem) {
  PenaltyObjective wrapper(problem);
  PenaltyObjective::Impl& obj = *wrapper.impl_;
  std::vector<double> th = obj.initial_point();
  OptimizationResult out;
  const double r = problem.r;
  const double tol = problem.violation_tol_rel * r;

  if (obj.coverage) {
    obj.mu = 0.0;
    double L = 0.0, viol = 0.0;
    obj.value(th, nullptr, &L, &viol);
    if (viol > problem.start_slack_rel * r)
      throw InfeasibleStart("initial violation " + std::to_string(viol / r) + " r exceeds the allowed slack");
    int stage = 0;
    std::string reason;
    for (double mu = problem.mu_start;; mu *= problem.mu_factor) {
      const bool last = mu >= problem.mu_end * (1.0 - 1e-12);
      obj.mu = std::min(mu, problem.mu_end);
      obj.refresh_witnesses(th);
      reason = run_bfgs(obj, th, stage++, problem.max_iterations, problem.grad_tol, out.trace.entries).reason;
      if (last) break;
    }
    // Extra rounds at the final weight with refreshed witnesses until the
    // violation target is met.
    for (int round = 0; round < 6; ++round) {
      obj.refresh_witnesses(th);
      double L = 0.0, viol = 0.0;
      obj.value(th, nullptr, &L, &viol);
      if (viol <= tol) break;
      reason = run_bfgs(obj, th, stage++, problem.max_iterations, problem.grad_tol, out.trace.entries).reason;
    }
    if (problem.polish_rounds > 0) polish_contacts(obj, th, problem, stage, reason, out.trace.entries);
    out.trace.termination = reason;
  } else {
    obj.mu = 0.0;
    out.trace.termination = run_bfgs(obj, th, 0, problem.max_iterations, problem.grad_tol, out.trace.entries).reason;
  }
  const auto dec = obj.decode(th);
  out.net = obj.network_from(dec);
  out.period = dec.period;
  if (obj.coverage) {
    obj.refresh_witnesses(th);
    double L = 0.0, viol = 0.0;
    obj.value(th, nullptr, &L, &viol);
    out.trace.final_violation = viol;
    obj.pb.n_samples = 8 * problem.n_samples;
    obj.build_lattice(obj.pb.n_samples);
    obj.refresh_witnesses(th);
    obj.value(th, nullptr, &L, &viol);
    out.trace.final_violation_fine = viol;
  }
  return out;
}

Network merge_pass(const Network& net, double r, double collapse_rel) {
  std::vector<Point2> verts = net.vertices();
  std::vector<Edge> edges = net.edges();
  const double floor = collapse_rel * r;
  // Collapse short segments one at a time.
  for (;;) {
    Network cur(verts, edges);
    int shortest = -1;
    double best = floor;
    for (int e = 0; e < cur.edge_count(); ++e)
      if (edges[static_cast<std::size_t>(e)].kind == EdgeKind::Segment && cur.edge_length(e) < best) {
        best = cur.edge_length(e);
        shortest = e;
      }
    if (shortest < 0) break;
    const int a = edges[static_cast<std::size_t>(shortest)].a, b = edges[static_cast<std::size_t>(shortest)].b;
    const int da = cur.degree(a), db = cur.degree(b);
    verts[static_cast<std::size_t>(a)] = da == 1 ? verts[static_cast<std::size_t>(a)]
                                       : db == 1 ? verts[static_cast<std::size_t>(b)]
                                                 : (verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]) * 0.5;
    edges.erase(edges.begin() + shortest);
    for (Edge& e : edges) {
      if (e.a == b) e.a = a;
      if (e.b == b) e.b = a;
    }
    verts.erase(verts.begin() + b);
    for (Edge& e : edges) {
      if (e.a > b) --e.a;
      if (e.b > b) --e.b;
    }
  }
  // Split degree-4 vertices.
  for (int v = 0; v < static_cast<int>(verts.size()); ++v) {
    Network cur(verts, edges);
    if (cur.degree(v) != 4) continue;
    std::vector<int> inc = cur.incidence()[static_cast<std::size_t>(v)];
    std::sort(inc.begin(), inc.end(), [&](int e1, int e2) {
      return cur.leaving_direction(e1, v).angle() < cur.leaving_direction(e2, v).angle();
    });
    double rho = std::numeric_limits<double>::infinity();
    for (int e : inc) rho = std::min(rho, cur.edge_length(e));
    rho *= 0.5;
    const Point2 c = verts[static_cast<std::size_t>(v)];
    std::vector<Point2> q;
    for (int e : inc) q.push_back(c + cur.leaving_direction(e, v) * rho);
    double best_len = std::numeric_limits<double>::infinity();
    int best_pairing = 0;
    std::vector<Point2> best_pos;
    for (int pairing = 0; pairing < 2; ++pairing) {
      // Pairing 0 groups neighbours (0,1 | 2,3); pairing 1 groups (1,2 | 3,0).
      const int a0 = pairing, a1 = pairing + 1, b0 = (pairing + 2) % 4, b1 = (pairing + 3) % 4;
      std::vector<Point2> pos = {q[0], q[1], q[2], q[3],
                                 c + ((q[static_cast<std::size_t>(a0)] + q[static_cast<std::size_t>(a1)]) * 0.5 - c) * 0.3,
                                 c + ((q[static_cast<std::size_t>(b0)] + q[static_cast<std::size_t>(b1)]) * 0.5 - c) * 0.3};
      const std::vector<std::pair<int, int>> tree = {{a0, 4}, {a1, 4}, {4, 5}, {b0, 5}, {b1, 5}};
      const double len = polish_tree(pos, tree, 4);
      if (len < best_len) {
        best_len = len;
        best_pairing = pairing;
        best_pos = pos;
      }
    }
    const int b0 = (best_pairing + 2) % 4, b1 = (best_pairing + 3) % 4;
    verts[static_cast<std::size_t>(v)] = best_pos[4];
    const int w = static_cast<int>(verts.size());
    verts.push_back(best_pos[5]);
    for (int idx : {b0, b1}) {
      Edge& e = edges[static_cast<std::size_t>(inc[static_cast<std::size_t>(idx)])];
      if (e.a == v) e.a = w;
      else e.b = w;
    }
    edges.push_back(Edge::segment(v, w));
  }
  return Network(std::move(verts), std::move(edges));
}

}  // namespace mdm
