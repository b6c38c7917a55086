//! Convex-body representations, boundary sampling, the flattening-point
//! detector, and the symmetric gauge-body construction used to renorm
//! general bodies.

mod hull2d;
mod lp;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{
    direction_fan, orthonormal_complement, support_functionals, LinearFunctional, NormSpec, Vector,
};
use hull2d::Hull2;

/// Fan size used to inscribe the `r·B` ball of a gauge body as a polytope.
const GAUGE_FAN_2D: usize = 256;
const GAUGE_FAN_3D: usize = 512;
/// Minimum clearance of the interior point, as a fraction of the diameter.
const CLEARANCE_FRACTION: f64 = 1e-6;

#[derive(Clone, Debug)]
pub enum BodyRepr {
    /// `center + radius · (unit ball of spec)`.
    NormBall {
        spec: NormSpec,
        radius: f64,
        center: Vector,
    },
    /// Convex hull of a finite vertex set.
    PolytopeHull { vertices: Vec<Vector> },
    /// `cl conv(cloud ∪ r·B ∪ (−cloud))`, with `B` the unit ball of
    /// `ball_norm`; the ball is replaced by an inscribed polytopal fan, so
    /// the represented body is an inner polytopal approximation.
    GaugeBody {
        cloud: Vec<Vector>,
        r: f64,
        ball_norm: NormSpec,
    },
}

/// A closed convex set with interior points.
///
/// Values are immutable after construction; every operation is a pure
/// function of its inputs.
#[derive(Clone, Debug)]
pub struct ConvexBody {
    repr: BodyRepr,
    dim: usize,
    /// Vertex representation for polytopal bodies.
    vrep: Option<Vec<Vector>>,
    hull2: Option<Hull2>,
    /// Euclidean bound on ‖x‖₂ over the body.
    bounding2: f64,
    interior: Vector,
    clearance: f64,
}

impl ConvexBody {
    pub fn ball(spec: NormSpec, radius: f64, center: Vector) -> Result<Arc<ConvexBody>> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidBody(format!("ball radius {radius}")));
        }
        let dim = center.dim();
        spec.eval(&center)?; // dimension compatibility
        let bound_axis = spec.axis_bound(radius, dim);
        let bounding2 = center.norm2()
            + bound_axis.iter().map(|b| b * b).sum::<f64>().sqrt();
        let repr = BodyRepr::NormBall {
            spec,
            radius,
            center: center.clone(),
        };
        let body = ConvexBody {
            repr,
            dim,
            vrep: None,
            hull2: None,
            bounding2,
            interior: center,
            clearance: 0.0,
        };
        body.finish()
    }

    pub fn unit_ball(spec: NormSpec, dim: usize) -> Result<Arc<ConvexBody>> {
        let center = Vector::zeros(dim);
        Self::ball(spec, 1.0, center)
    }

    pub fn polytope(vertices: Vec<Vector>) -> Result<Arc<ConvexBody>> {
        if vertices.is_empty() {
            return Err(Error::InvalidBody("polytope needs vertices".into()));
        }
        let dim = vertices[0].dim();
        if vertices.iter().any(|v| v.dim() != dim) {
            return Err(Error::InvalidBody("mixed-dimension vertices".into()));
        }
        if vertices.len() < dim + 1 {
            return Err(Error::InvalidBody(
                "polytope needs at least d+1 vertices".into(),
            ));
        }
        let hull2 = if dim == 2 {
            Some(Hull2::build(&vertices)?)
        } else {
            None
        };
        let bounding2 = vertices.iter().map(Vector::norm2).fold(0.0, f64::max);
        let k = vertices.len() as f64;
        let centroid = vertices
            .iter()
            .fold(Vector::zeros(dim), |acc, v| acc.add(v))
            .scale(1.0 / k);
        let body = ConvexBody {
            repr: BodyRepr::PolytopeHull {
                vertices: vertices.clone(),
            },
            dim,
            vrep: Some(vertices),
            hull2,
            bounding2,
            interior: centroid,
            clearance: 0.0,
        };
        body.finish()
    }

    /// `cl conv(cloud ∪ r·B ∪ (−cloud))` with `B` the `ball_norm` unit ball,
    /// the ball inscribed as a deterministic polytopal fan.
    pub fn gauge_body(cloud: Vec<Vector>, r: f64, ball_norm: NormSpec) -> Result<Arc<ConvexBody>> {
        if cloud.is_empty() {
            return Err(Error::InvalidBody("gauge body needs a point cloud".into()));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidBody(format!("gauge ball radius {r}")));
        }
        let dim = cloud[0].dim();
        if dim < 2 {
            return Err(Error::UnsupportedDimension {
                dim,
                what: "gauge bodies need dimension 2 or 3".into(),
            });
        }
        if cloud.iter().any(|v| v.dim() != dim) {
            return Err(Error::InvalidBody("mixed-dimension cloud".into()));
        }
        let fan_n = if dim == 2 { GAUGE_FAN_2D } else { GAUGE_FAN_3D };
        let mut vrep = Vec::with_capacity(2 * cloud.len() + fan_n);
        for p in &cloud {
            vrep.push(p.clone());
        }
        for p in &cloud {
            vrep.push(p.neg());
        }
        for u in direction_fan(dim, fan_n) {
            let nu = ball_norm.eval(&u)?;
            if nu <= 0.0 {
                return Err(Error::InvalidNorm("degenerate ball norm".into()));
            }
            vrep.push(u.scale(r / nu));
        }
        let hull2 = if dim == 2 {
            Some(Hull2::build(&vrep)?)
        } else {
            None
        };
        let bounding2 = vrep.iter().map(Vector::norm2).fold(0.0, f64::max);
        let body = ConvexBody {
            repr: BodyRepr::GaugeBody {
                cloud,
                r,
                ball_norm,
            },
            dim,
            vrep: Some(vrep),
            hull2,
            bounding2,
            interior: Vector::zeros(dim),
            clearance: 0.0,
        };
        body.finish()
    }

    /// Validates the interior point's clearance and freezes the body.
    fn finish(mut self) -> Result<Arc<ConvexBody>> {
        if !self.contains(&self.interior, 0.0) {
            return Err(Error::InvalidBody(
                "candidate interior point is not a member".into(),
            ));
        }
        let fan_n = if self.dim == 2 { 16 } else { 26 };
        let mut clearance = f64::INFINITY;
        for u in direction_fan(self.dim, fan_n) {
            let p = boundary_project(&self, &self.interior, &u, 1e-12)?;
            clearance = clearance.min(p.dist2(&self.interior));
        }
        let diameter = 2.0 * self.bounding2;
        if !(clearance > CLEARANCE_FRACTION * diameter) {
            return Err(Error::InvalidBody(format!(
                "interior clearance {clearance:.3e} below {:.3e}",
                CLEARANCE_FRACTION * diameter
            )));
        }
        self.clearance = clearance;
        Ok(Arc::new(self))
    }

    pub fn repr(&self) -> &BodyRepr {
        &self.repr
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Membership with absolute slack `tol` (in the relevant norm's units).
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        if x.dim() != self.dim {
            return false;
        }
        match &self.repr {
            BodyRepr::NormBall {
                spec,
                radius,
                center,
            } => match spec.eval(&x.sub(center)) {
                Ok(n) => n <= radius + tol,
                Err(_) => false,
            },
            _ => {
                if let Some(h) = &self.hull2 {
                    h.contains(x, tol.max(1e-12))
                } else {
                    lp::in_hull(self.vrep.as_ref().unwrap(), x, tol.max(1e-9))
                }
            }
        }
    }

    /// Exact gauge `μ(x) = inf{t > 0 : x ∈ t·body}` relative to the origin.
    /// Bodies used as gauges contain the origin in their interior.
    pub fn gauge(&self, x: &Vector) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        match &self.repr {
            BodyRepr::NormBall {
                spec,
                radius,
                center,
            } if center.coords().iter().all(|c| *c == 0.0) => Ok(spec.eval(x)? / radius),
            BodyRepr::NormBall { .. } => crate::geometry::gauge_eval(self, x, 1e-12),
            _ => {
                if let Some(h) = &self.hull2 {
                    h.gauge(x)
                } else {
                    lp::gauge_lp(self.vrep.as_ref().unwrap(), x)
                        .ok_or_else(|| Error::GaugeOracle("LP gauge infeasible".into()))
                }
            }
        }
    }

    pub fn vertex_representation(&self) -> Option<&[Vector]> {
        self.vrep.as_deref()
    }

    /// Bound on `max |x_i|` over the body.
    pub fn axis_extent(&self, axis: usize) -> f64 {
        match &self.repr {
            BodyRepr::NormBall {
                spec,
                radius,
                center,
            } => center.get(axis).abs() + spec.axis_bound(*radius, self.dim)[axis],
            _ => {
                if let Some(h) = &self.hull2 {
                    h.max_axis(axis)
                } else {
                    self.vrep
                        .as_ref()
                        .unwrap()
                        .iter()
                        .map(|v| v.get(axis).abs())
                        .fold(0.0, f64::max)
                }
            }
        }
    }

    pub fn bounding_radius2(&self) -> f64 {
        self.bounding2
    }

    pub fn interior_point_ref(&self) -> &Vector {
        &self.interior
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    /// Normal-cone generators from incident hull edges (2D polytopal bodies).
    pub(crate) fn hull_edge_functionals(
        &self,
        x0: &Vector,
        tol: f64,
    ) -> Result<Vec<(LinearFunctional, f64)>> {
        let Some(hull) = &self.hull2 else {
            return Err(Error::UnsupportedDimension {
                dim: self.dim,
                what: "exact normal cones are available for 2D polytopal bodies only".into(),
            });
        };
        let edges = hull.edges_at(x0, tol.max(1e-9));
        if edges.is_empty() {
            return Err(Error::NotOnBoundary(f64::NAN));
        }
        let mut out = Vec::with_capacity(edges.len());
        for i in edges {
            let n = hull.edge_normal(i);
            let raw = LinearFunctional::new(n.coords().to_vec())?;
            let f = match &self.repr {
                // Gauge bodies are the unit ball of their own norm: normalize
                // by the exact support value so the functional is unit-dual.
                BodyRepr::GaugeBody { .. } => {
                    let h = self
                        .vrep
                        .as_ref()
                        .unwrap()
                        .iter()
                        .map(|v| raw.eval(v))
                        .fold(f64::NEG_INFINITY, f64::max);
                    let mut f = raw.scaled(1.0 / h)?;
                    f.force_unit_dual();
                    f
                }
                // Bare polytopes: Euclidean unit normal.
                _ => {
                    let mut f = raw.scaled(1.0 / n.norm2())?;
                    f.force_unit_dual();
                    f
                }
            };
            let c = f.eval(x0);
            out.push((f, c));
        }
        Ok(out)
    }

    /// Translate by `v`. Gauge bodies are tied to the origin and cannot be
    /// translated.
    pub fn translated(&self, v: &Vector) -> Result<Arc<ConvexBody>> {
        match &self.repr {
            BodyRepr::NormBall {
                spec,
                radius,
                center,
            } => ConvexBody::ball(spec.clone(), *radius, center.add(v)),
            BodyRepr::PolytopeHull { vertices } => {
                ConvexBody::polytope(vertices.iter().map(|p| p.add(v)).collect())
            }
            BodyRepr::GaugeBody { .. } => Err(Error::InvalidBody(
                "gauge bodies are origin-symmetric and cannot be translated".into(),
            )),
        }
    }

    /// Scale about the origin by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Arc<ConvexBody>> {
        if !(s > 0.0) {
            return Err(Error::InvalidBody(format!("scale factor {s}")));
        }
        match &self.repr {
            BodyRepr::NormBall {
                spec,
                radius,
                center,
            } => ConvexBody::ball(spec.clone(), radius * s, center.scale(s)),
            BodyRepr::PolytopeHull { vertices } => {
                ConvexBody::polytope(vertices.iter().map(|p| p.scale(s)).collect())
            }
            BodyRepr::GaugeBody {
                cloud,
                r,
                ball_norm,
            } => ConvexBody::gauge_body(
                cloud.iter().map(|p| p.scale(s)).collect(),
                r * s,
                ball_norm.clone(),
            ),
        }
    }

    /// Convexity spot-check: midpoints of sampled member pairs are members.
    pub fn validate(&self, pairs: usize) -> Result<()> {
        let fan = direction_fan(self.dim, 24.max(2 * self.dim));
        let mut members = vec![self.interior.clone()];
        for u in &fan {
            let b = boundary_project(self, &self.interior, u, 1e-10)?;
            for fac in [0.25, 0.6, 0.95] {
                members.push(self.interior.lerp(&b, fac));
            }
        }
        let tol = 1e-9 * self.bounding2.max(1.0);
        let mut checked = 0usize;
        'outer: for (i, a) in members.iter().enumerate() {
            for b in members.iter().skip(i + 1) {
                if checked >= pairs {
                    break 'outer;
                }
                let mid = a.lerp(b, 0.5);
                if !self.contains(&mid, tol) {
                    return Err(Error::InvalidBody(format!(
                        "membership oracle inconsistent: midpoint of two members rejected \
                         (at {:?})",
                        mid.coords()
                    )));
                }
                checked += 1;
            }
        }
        Ok(())
    }
}

/// An interior point with positive clearance: the center for balls, the
/// vertex centroid for polytopes, the origin for gauge bodies.
pub fn interior_point(body: &ConvexBody) -> Vector {
    body.interior_point_ref().clone()
}

/// The unique boundary point `z0 + t·dir`, `t > 0`, located by bisection on
/// the membership oracle to point tolerance `tol`.
pub fn boundary_project(body: &ConvexBody, z0: &Vector, dir: &Vector, tol: f64) -> Result<Vector> {
    if z0.dim() != body.dim() || dir.dim() != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: dir.dim(),
        });
    }
    let dn = dir.norm2();
    if dn == 0.0 {
        return Err(Error::InvalidBody("zero direction".into()));
    }
    if !body.contains(z0, 0.0) {
        return Err(Error::InvalidBody("ray origin is not inside the body".into()));
    }
    let t_exit = 2.0 * (body.bounding_radius2() + z0.norm2() + 1.0) / dn;
    let mut lo = 0.0f64;
    let mut hi = t_exit * 1e-6;
    let mut tries = 0;
    while body.contains(&z0.add(&dir.scale(hi)), 0.0) {
        lo = hi;
        hi *= 2.0;
        tries += 1;
        if hi > 4.0 * t_exit || tries > 80 {
            return Err(Error::UnboundedRay);
        }
    }
    let t_tol = (tol / dn).max(f64::EPSILON);
    while hi - lo > t_tol {
        let mid = 0.5 * (lo + hi);
        if body.contains(&z0.add(&dir.scale(mid)), 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(z0.add(&dir.scale(0.5 * (lo + hi))))
}

/// The boundary patch `U = ∂body ∩ (x0 + eps·B)` with `B` the ambient ball.
#[derive(Clone, Debug)]
pub struct BoundaryPatch {
    body: Arc<ConvexBody>,
    x0: Vector,
    eps: f64,
    ambient: NormSpec,
}

impl BoundaryPatch {
    pub fn new(body: Arc<ConvexBody>, x0: Vector, eps: f64, ambient: NormSpec) -> Result<Self> {
        if x0.dim() != body.dim() {
            return Err(Error::DimensionMismatch {
                expected: body.dim(),
                got: x0.dim(),
            });
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::DegeneratePatch(format!("eps {eps}")));
        }
        ambient.eval(&x0)?;
        // x0 must be on the boundary: project through it from the interior.
        let z = body.interior_point_ref();
        let dir = x0.sub(z);
        if dir.norm2() == 0.0 {
            return Err(Error::NotOnBoundary(body.clearance()));
        }
        let proj = boundary_project(&body, z, &dir, 1e-12)?;
        let resid = proj.dist2(&x0);
        let scale = body.bounding_radius2().max(1.0);
        if resid > 1e-7 * scale {
            return Err(Error::NotOnBoundary(resid));
        }
        let patch = BoundaryPatch {
            body,
            x0,
            eps,
            ambient,
        };
        if patch.is_unit_sphere() {
            if eps >= 1.0 {
                return Err(Error::DegeneratePatch(format!(
                    "eps must lie in (0,1) on the unit sphere, got {eps}"
                )));
            }
        } else {
            let diam = patch.ambient_diameter_estimate()?;
            if eps >= diam {
                return Err(Error::DegeneratePatch(format!(
                    "eps {eps} is not below the body diameter (~{diam:.3})"
                )));
            }
        }
        Ok(patch)
    }

    pub fn body(&self) -> &Arc<ConvexBody> {
        &self.body
    }

    pub fn x0(&self) -> &Vector {
        &self.x0
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn ambient(&self) -> &NormSpec {
        &self.ambient
    }

    /// Is the patch body exactly the unit ball of the ambient norm?
    pub fn is_unit_sphere(&self) -> bool {
        if let NormSpec::Gauge { body } = &self.ambient {
            return Arc::ptr_eq(body, &self.body);
        }
        match self.body.repr() {
            BodyRepr::NormBall {
                spec,
                radius,
                center,
            } => {
                *radius == 1.0
                    && center.coords().iter().all(|c| *c == 0.0)
                    && spec == &self.ambient
            }
            _ => false,
        }
    }

    fn ambient_diameter_estimate(&self) -> Result<f64> {
        let z = self.body.interior_point_ref();
        let mut diam = 0.0f64;
        for u in direction_fan(self.body.dim(), 8) {
            let a = boundary_project(&self.body, z, &u, 1e-9)?;
            let b = boundary_project(&self.body, z, &u.neg(), 1e-9)?;
            diam = diam.max(self.ambient.eval(&a.sub(&b))?);
        }
        Ok(diam)
    }
}

/// `n` boundary points within `eps` of `x0` in the ambient norm, produced by
/// projecting rays from the interior point toward a deterministic direction
/// fan concentrated around `x0`; includes `x0` itself.
pub fn patch_sample(patch: &BoundaryPatch, n: usize) -> Result<Vec<Vector>> {
    if n < 16 {
        return Err(Error::DegeneratePatch(format!(
            "patch_sample needs n >= 16, got {n}"
        )));
    }
    let body = patch.body();
    let dim = body.dim();
    if dim < 2 {
        return Err(Error::UnsupportedDimension {
            dim,
            what: "patch sampling needs dimension 2 or 3".into(),
        });
    }
    let z = body.interior_point_ref();
    let axis = patch.x0().sub(z);
    let axis_len = axis.norm2();
    let u = axis.scale(1.0 / axis_len);
    let scale = body.bounding_radius2().max(1.0);
    let dedup_tol = 1e-12 * scale;

    let mut spread = 0.97 * std::f64::consts::PI;
    for _ in 0..200 {
        let dirs: Vec<Vector> = match dim {
            2 => (0..n)
                .map(|k| {
                    let phi = spread * (2.0 * k as f64 / (n - 1) as f64 - 1.0);
                    let (s, c) = phi.sin_cos();
                    Vector::new(vec![
                        c * u.get(0) - s * u.get(1),
                        s * u.get(0) + c * u.get(1),
                    ])
                    .unwrap()
                })
                .collect(),
            _ => {
                let (v, w) = orthonormal_complement(&u);
                let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
                (0..n)
                    .map(|k| {
                        let psi = spread * (k as f64 / (n - 1) as f64).sqrt();
                        let phi = golden * k as f64;
                        let ring = v.scale(phi.cos()).add(&w.scale(phi.sin()));
                        u.scale(psi.cos()).add(&ring.scale(psi.sin()))
                    })
                    .collect()
            }
        };
        let mut pts = Vec::with_capacity(n);
        let mut ok = true;
        for dir in &dirs {
            let p = boundary_project(body, z, dir, 1e-12)?;
            if patch.ambient().eval(&p.sub(patch.x0()))? >= patch.eps() * (1.0 - 1e-12) {
                ok = false;
                break;
            }
            pts.push(p);
        }
        if ok {
            // Pin the exact center sample to x0.
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (i, p) in pts.iter().enumerate() {
                let d = p.dist2(patch.x0());
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            pts[best] = patch.x0().clone();
            let mut distinct = pts.clone();
            distinct.sort_by(|a, b| a.coords().partial_cmp(b.coords()).unwrap());
            distinct.dedup_by(|a, b| a.dist2(b) <= dedup_tol);
            if distinct.len() == n {
                return Ok(pts);
            }
        }
        spread *= 0.65;
        if spread < 1e-9 {
            break;
        }
    }
    Err(Error::DegeneratePatch(format!(
        "could not place {n} distinct boundary samples within eps={}",
        patch.eps()
    )))
}

/// Verdict of the flattening-point test.
#[derive(Clone, Debug)]
pub enum FlatnessVerdict {
    /// The whole patch lies in the supporting hyperplane `{functional = level}`.
    Flat {
        functional: LinearFunctional,
        level: f64,
    },
    /// `witness` is a patch point with `functional(witness) <= level - margin`;
    /// every other normal-cone generator deviates on the patch by at least
    /// `margin` as well.
    NotFlat {
        witness: Vector,
        margin: f64,
        functional: LinearFunctional,
        level: f64,
    },
}

impl FlatnessVerdict {
    pub fn is_flat(&self) -> bool {
        matches!(self, FlatnessVerdict::Flat { .. })
    }
}

/// Decides whether `x0` is a flattening point of the patch: for each
/// normal-cone generator `(f, c)` at `x0`, measures the maximal deviation
/// `c - f(x)` over `n` patch samples. Flat is reported with the first
/// generator whose deviation stays within `tol`; otherwise every generator
/// deviates and the weakest one's best deviating sample is the witness.
pub fn is_flattening_point(patch: &BoundaryPatch, n: usize, tol: f64) -> Result<FlatnessVerdict> {
    let candidates = support_functionals(patch.body(), patch.x0(), tol.max(1e-9))?;
    let samples = patch_sample(patch, n)?;
    let mut weakest: Option<(f64, usize, usize)> = None; // (dev, cand, sample)
    for (j, (f, c)) in candidates.iter().enumerate() {
        let mut dev = f64::NEG_INFINITY;
        let mut arg = 0usize;
        for (i, s) in samples.iter().enumerate() {
            let d = c - f.eval(s);
            if d > dev {
                dev = d;
                arg = i;
            }
        }
        if dev <= tol {
            return Ok(FlatnessVerdict::Flat {
                functional: f.clone(),
                level: *c,
            });
        }
        match weakest {
            None => weakest = Some((dev, j, arg)),
            Some((w, _, _)) if dev < w => weakest = Some((dev, j, arg)),
            _ => {}
        }
    }
    let (margin, j, i) = weakest.expect("support_functionals returns at least one generator");
    let (f, c) = &candidates[j];
    Ok(FlatnessVerdict::NotFlat {
        witness: samples[i].clone(),
        margin,
        functional: f.clone(),
        level: *c,
    })
}

/// The symmetric gauge body of the renorming construction: translates the
/// body so its interior point sits at the origin, sets `δ = ‖x0‖` (ambient),
/// samples the boundary patch `A = ∂K ∩ (x0 + (δ/2)B)` and returns
/// `cl conv(A ∪ (δ/4)B ∪ (−A))` together with `δ`.
pub fn build_gauge_body_with(
    body: &ConvexBody,
    x0: &Vector,
    ambient: &NormSpec,
    arc_samples: usize,
) -> Result<(Arc<ConvexBody>, f64)> {
    let z = body.interior_point_ref().clone();
    let centered = body.translated(&z.neg())?;
    let x0c = x0.sub(&z);
    let delta = ambient.eval(&x0c)?;
    if delta <= 0.0 {
        return Err(Error::InvalidBody(
            "x0 coincides with the interior point".into(),
        ));
    }
    let patch = BoundaryPatch::new(centered, x0c.clone(), delta / 2.0, ambient.clone())?;
    let cloud = patch_sample(&patch, arc_samples)?;
    let gauge = ConvexBody::gauge_body(cloud, delta / 4.0, ambient.clone())?;
    let mu = gauge.gauge(&x0c)?;
    if (mu - 1.0).abs() > 1e-7 {
        return Err(Error::InvalidBody(format!(
            "renorm failed: μ_V(x0) = {mu}, boundary patch wraps the body"
        )));
    }
    Ok((gauge, delta))
}

/// [`build_gauge_body_with`] under the Euclidean ambient norm with the
/// default boundary sampling density.
pub fn build_gauge_body(body: &ConvexBody, x0: &Vector) -> Result<(Arc<ConvexBody>, f64)> {
    build_gauge_body_with(body, x0, &NormSpec::euclid(), 257)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn unit(spec: NormSpec) -> Arc<ConvexBody> {
        ConvexBody::unit_ball(spec, 2).unwrap()
    }

    #[test]
    fn interior_points() {
        let ball = unit(NormSpec::euclid());
        assert_eq!(interior_point(&ball).coords(), &[0.0, 0.0]);
        let tri = ConvexBody::polytope(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])])
            .unwrap();
        let c = interior_point(&tri);
        assert!((c.get(0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.get(1) - 1.0 / 3.0).abs() < 1e-15);
        let gb = ConvexBody::gauge_body(vec![v(&[1.0, 0.0])], 0.25, NormSpec::euclid()).unwrap();
        assert_eq!(interior_point(&gb).coords(), &[0.0, 0.0]);
    }

    #[test]
    fn boundary_projection_axis_rays() {
        let z = v(&[0.0, 0.0]);
        let cases = [
            (NormSpec::euclid(), v(&[2.0, 0.0]), v(&[1.0, 0.0])),
            (NormSpec::sup(), v(&[1.0, 1.0]), v(&[1.0, 1.0])),
            (NormSpec::p(1.0).unwrap(), v(&[1.0, 1.0]), v(&[0.5, 0.5])),
        ];
        for (spec, dir, expect) in cases {
            let body = unit(spec);
            let p = boundary_project(&body, &z, &dir, 1e-12).unwrap();
            assert!(p.dist2(&expect) < 1e-9, "{:?}", p.coords());
        }
    }

    #[test]
    fn patch_sampling_respects_radius_and_center() {
        let ball = unit(NormSpec::euclid());
        let patch =
            BoundaryPatch::new(ball, v(&[1.0, 0.0]), 0.5, NormSpec::euclid()).unwrap();
        let pts = patch_sample(&patch, 64).unwrap();
        assert_eq!(pts.len(), 64);
        assert!(pts.iter().any(|p| p == patch.x0()));
        for p in &pts {
            assert!((p.norm2() - 1.0).abs() < 1e-9);
            assert!(p.dist2(patch.x0()) < 0.5);
        }
    }

    #[test]
    fn cube_facet_samples_stay_on_facet() {
        let cube = unit(NormSpec::sup());
        let patch = BoundaryPatch::new(cube, v(&[1.0, 0.0]), 0.5, NormSpec::sup()).unwrap();
        for p in patch_sample(&patch, 32).unwrap() {
            assert!((p.get(0) - 1.0).abs() < 1e-9, "{:?}", p.coords());
        }
    }

    #[test]
    fn cross_polytope_vertex_samples_cover_both_edges() {
        // Derived check: the fan must land on both incident edges, i.e. both
        // signs of the second coordinate occur.
        let ball = unit(NormSpec::p(1.0).unwrap());
        let patch =
            BoundaryPatch::new(ball, v(&[1.0, 0.0]), 0.5, NormSpec::p(1.0).unwrap()).unwrap();
        let pts = patch_sample(&patch, 64).unwrap();
        assert!(pts.iter().any(|p| p.get(1) > 1e-6));
        assert!(pts.iter().any(|p| p.get(1) < -1e-6));
    }

    #[test]
    fn flatness_verdicts_on_the_three_balls() {
        let tol = 1e-7;
        let cube = unit(NormSpec::sup());
        let patch = BoundaryPatch::new(cube, v(&[1.0, 0.0]), 0.5, NormSpec::sup()).unwrap();
        match is_flattening_point(&patch, 64, tol).unwrap() {
            FlatnessVerdict::Flat { functional, level } => {
                assert_eq!(functional.coeffs(), &[1.0, 0.0]);
                assert_eq!(level, 1.0);
            }
            other => panic!("expected Flat, got {other:?}"),
        }

        let ball = unit(NormSpec::euclid());
        let patch =
            BoundaryPatch::new(ball, v(&[1.0, 0.0]), 0.5, NormSpec::euclid()).unwrap();
        assert!(!is_flattening_point(&patch, 64, tol).unwrap().is_flat());

        let l1 = unit(NormSpec::p(1.0).unwrap());
        let patch =
            BoundaryPatch::new(l1, v(&[1.0, 0.0]), 0.5, NormSpec::p(1.0).unwrap()).unwrap();
        match is_flattening_point(&patch, 64, tol).unwrap() {
            FlatnessVerdict::NotFlat { margin, witness, functional, level } => {
                assert!(margin > 0.0);
                assert!(functional.eval(&witness) <= level - margin + 1e-12);
            }
            other => panic!("expected NotFlat, got {other:?}"),
        }
    }

    #[test]
    fn gauge_body_of_unit_ball() {
        let ball = unit(NormSpec::euclid());
        let (gauge, delta) = build_gauge_body(&ball, &v(&[1.0, 0.0])).unwrap();
        assert_eq!(delta, 1.0);
        let mu = gauge.gauge(&v(&[1.0, 0.0])).unwrap();
        assert!((mu - 1.0).abs() < 1e-9, "mu = {mu}");
        // symmetry on a few probes
        for u in direction_fan(2, 16) {
            let a = gauge.gauge(&u).unwrap();
            let b = gauge.gauge(&u.neg()).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn gauge_body_of_shifted_square() {
        let square = ConvexBody::polytope(vec![
            v(&[0.0, 0.0]),
            v(&[2.0, 0.0]),
            v(&[2.0, 2.0]),
            v(&[0.0, 2.0]),
        ])
        .unwrap();
        let (gauge, delta) = build_gauge_body(&square, &v(&[2.0, 1.0])).unwrap();
        assert!((delta - 1.0).abs() < 1e-9);
        gauge.validate(200).unwrap();
    }

    #[test]
    fn convexity_spot_checks() {
        for spec in [NormSpec::euclid(), NormSpec::sup(), NormSpec::p(1.5).unwrap()] {
            unit(spec).validate(300).unwrap();
        }
    }
}
