//! Vectors, norms, gauges, linear functionals and supporting functionals.
//!
//! Everything here is plain value types plus pure functions; all of it is
//! safe to share across threads. Dimensions are capped at 3: every checkable
//! construction in this problem domain lives in low dimension, and the
//! brute-force oracles must terminate.

use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::bodies::{BodyRepr, ConvexBody};
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// A point of R^d, d ∈ {1, 2, 3}. Coordinates are always finite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::UnsupportedDimension {
                dim: coords.len(),
                what: "vectors must have 1 to 3 coordinates".into(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parse("non-finite coordinate".into()));
        }
        Ok(Vector(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        Vector(vec![0.0; dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[axis] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn neg(&self) -> Vector {
        self.scale(-1.0)
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Euclidean norm, used for bounding-box bookkeeping.
    pub fn norm2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist2(&self, other: &Vector) -> f64 {
        self.sub(other).norm2()
    }

    /// Linear interpolation `(1-t)·self + t·other`.
    pub fn lerp(&self, other: &Vector, t: f64) -> Vector {
        assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect(),
        )
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Vector::new(coords).map_err(D::Error::custom)
    }
}

/// A norm on R^d: a p-norm, a weighted p-norm, or the gauge (Minkowski
/// functional) of a symmetric convex body with the origin in its interior.
#[derive(Clone, Debug)]
pub enum NormSpec {
    P { p: f64 },
    Weighted { p: f64, weights: Vec<f64> },
    Gauge { body: Arc<ConvexBody> },
}

impl NormSpec {
    pub fn p(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidNorm(format!("p must be >= 1, got {p}")));
        }
        Ok(NormSpec::P { p })
    }

    pub fn euclid() -> Self {
        NormSpec::P { p: 2.0 }
    }

    pub fn sup() -> Self {
        NormSpec::P { p: f64::INFINITY }
    }

    pub fn weighted(p: f64, weights: Vec<f64>) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidNorm(format!("p must be >= 1, got {p}")));
        }
        if weights.is_empty() || weights.len() > MAX_DIM {
            return Err(Error::InvalidNorm("bad weight count".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidNorm("weights must be positive".into()));
        }
        Ok(NormSpec::Weighted { p, weights })
    }

    /// Gauge of `body`. The body must contain the origin in its interior;
    /// it is the caller's business to pass a symmetric body when a genuine
    /// norm is required.
    pub fn gauge(body: Arc<ConvexBody>) -> Result<Self> {
        if !body.contains(&Vector::zeros(body.dim()), 0.0) {
            return Err(Error::InvalidNorm(
                "gauge body must contain the origin".into(),
            ));
        }
        Ok(NormSpec::Gauge { body })
    }

    /// Evaluates the norm. Exact formulas for (weighted) p-norms; gauges are
    /// evaluated exactly on the body's polytopal representation.
    pub fn eval(&self, x: &Vector) -> Result<f64> {
        match self {
            NormSpec::P { p } => Ok(p_norm(x.coords(), *p, None)),
            NormSpec::Weighted { p, weights } => {
                if weights.len() != x.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: weights.len(),
                        got: x.dim(),
                    });
                }
                Ok(p_norm(x.coords(), *p, Some(weights)))
            }
            NormSpec::Gauge { body } => body.gauge(x),
        }
    }

    /// Per-axis bound for the ball of radius `r`: `|x_i| <= axis_bound(r)[i]`
    /// whenever `‖x‖ <= r`. Used to inflate raster bounding boxes.
    pub fn axis_bound(&self, r: f64, dim: usize) -> Vec<f64> {
        match self {
            NormSpec::P { .. } => vec![r; dim],
            NormSpec::Weighted { p, weights } => weights
                .iter()
                .map(|w| {
                    if p.is_infinite() {
                        r / w
                    } else {
                        r / w.powf(1.0 / p)
                    }
                })
                .collect(),
            NormSpec::Gauge { body } => (0..dim).map(|i| r * body.axis_extent(i)).collect(),
        }
    }

    pub fn is_p(&self, q: f64) -> bool {
        matches!(self, NormSpec::P { p } if *p == q)
    }
}

impl PartialEq for NormSpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (NormSpec::P { p: a }, NormSpec::P { p: b }) => a == b,
            (
                NormSpec::Weighted { p: a, weights: wa },
                NormSpec::Weighted { p: b, weights: wb },
            ) => a == b && wa == wb,
            (NormSpec::Gauge { body: a }, NormSpec::Gauge { body: b }) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

fn p_norm(coords: &[f64], p: f64, weights: Option<&[f64]>) -> f64 {
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    if p.is_infinite() {
        return coords
            .iter()
            .enumerate()
            .map(|(i, c)| w(i) * c.abs())
            .fold(0.0, f64::max);
    }
    if p == 1.0 {
        return coords
            .iter()
            .enumerate()
            .map(|(i, c)| w(i) * c.abs())
            .sum();
    }
    if p == 2.0 {
        return coords
            .iter()
            .enumerate()
            .map(|(i, c)| w(i) * c * c)
            .sum::<f64>()
            .sqrt();
    }
    coords
        .iter()
        .enumerate()
        .map(|(i, c)| w(i) * c.abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// A linear functional `x ↦ Σ coeffs_i · x_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearFunctional {
    coeffs: Vec<f64>,
    unit_dual: bool,
}

impl LinearFunctional {
    /// Rejects the zero functional and non-finite coefficients.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_DIM {
            return Err(Error::UnsupportedDimension {
                dim: coeffs.len(),
                what: "functionals must have 1 to 3 coefficients".into(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parse("non-finite coefficient".into()));
        }
        if coeffs.iter().all(|c| *c == 0.0) {
            return Err(Error::ZeroFunctional);
        }
        Ok(LinearFunctional {
            coeffs,
            unit_dual: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        assert_eq!(self.dim(), x.dim());
        self.coeffs
            .iter()
            .zip(x.coords())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        LinearFunctional::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn is_unit_dual(&self) -> bool {
        self.unit_dual
    }

    /// Marks a functional unit-dual when the caller has normalized it by an
    /// exact route (gradient of a norm, Hölder conjugate, support maximum).
    pub(crate) fn force_unit_dual(&mut self) {
        self.unit_dual = true;
    }

    /// Rescales so that the dual norm with respect to `spec` equals 1 and
    /// marks the result unit-dual. Uses the Hölder closed form for p-norms
    /// and [`dual_norm_estimate`] otherwise.
    pub fn into_unit_dual(self, spec: &NormSpec) -> Result<Self> {
        let d = dual_norm_estimate(spec, &self, 4096)?;
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::InvalidNorm(format!("bad dual norm {d}")));
        }
        let mut f = self.scaled(1.0 / d)?;
        f.unit_dual = true;
        Ok(f)
    }
}

impl<'de> Deserialize<'de> for LinearFunctional {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            coeffs: Vec<f64>,
            #[serde(default)]
            unit_dual: bool,
        }
        let raw = Raw::deserialize(d)?;
        let mut f = LinearFunctional::new(raw.coeffs).map_err(D::Error::custom)?;
        f.unit_dual = raw.unit_dual;
        Ok(f)
    }
}

/// A norm ball `center + radius·B`.
#[derive(Clone, Debug)]
pub struct Ball {
    pub center: Vector,
    pub radius: f64,
    pub norm: NormSpec,
}

impl Ball {
    pub fn new(center: Vector, radius: f64, norm: NormSpec) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidBody(format!("ball radius {radius}")));
        }
        Ok(Ball {
            center,
            radius,
            norm,
        })
    }

    pub fn contains(&self, x: &Vector) -> Result<bool> {
        Ok(self.norm.eval(&x.sub(&self.center))? < self.radius)
    }
}

/// Closed-form dual norm for (weighted) p-norms; `None` for gauges.
pub fn dual_norm_exact(spec: &NormSpec, f: &LinearFunctional) -> Option<f64> {
    match spec {
        NormSpec::P { p } => Some(holder_dual(f.coeffs(), *p, None)),
        NormSpec::Weighted { p, weights } => {
            if weights.len() != f.dim() {
                return None;
            }
            Some(holder_dual(f.coeffs(), *p, Some(weights)))
        }
        NormSpec::Gauge { .. } => None,
    }
}

fn holder_dual(coeffs: &[f64], p: f64, weights: Option<&[f64]>) -> f64 {
    // ‖f‖* for ‖x‖ = (Σ w_i |x_i|^p)^{1/p}: substitute y_i = w_i^{1/p} x_i,
    // giving the plain ℓ^q norm of (f_i · w_i^{-1/p}) with 1/p + 1/q = 1.
    // For p = ∞ the weighted norm is max_i w_i |x_i| and the dual is Σ |f_i|/w_i.
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    if p == 1.0 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.abs() / w(i))
            .fold(0.0, f64::max)
    } else if p.is_infinite() {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.abs() / w(i))
            .sum()
    } else {
        let q = p / (p - 1.0);
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (c.abs() / w(i).powf(1.0 / p)).powf(q))
            .sum::<f64>()
            .powf(1.0 / q)
    }
}

/// Dual-norm estimate `max f(x)/‖x‖` over a deterministic direction set with
/// local refinement. Exact for p-norms (Hölder closed form) and for gauges of
/// polytopal bodies (support-function maximum over the vertex representation);
/// otherwise a lower bound on the true dual norm.
pub fn dual_norm_estimate(spec: &NormSpec, f: &LinearFunctional, nsamples: usize) -> Result<f64> {
    let dim = f.dim();
    if nsamples < 2 * dim {
        return Err(Error::Config(format!(
            "dual_norm_estimate needs nsamples >= {}, got {nsamples}",
            2 * dim
        )));
    }
    if let Some(d) = dual_norm_exact(spec, f) {
        return Ok(d);
    }
    let NormSpec::Gauge { body } = spec else {
        unreachable!("non-gauge specs have exact duals");
    };
    if let Some(points) = body.vertex_representation() {
        // sup over V of f = max over the polytope's vertices.
        let m = points.iter().map(|v| f.eval(v)).fold(f64::NEG_INFINITY, f64::max);
        let m_sym = points.iter().map(|v| -f.eval(v)).fold(m, f64::max);
        return Ok(m_sym.max(0.0));
    }
    // Generic route: deterministic fan plus local refinement.
    let value = |u: &Vector| -> Result<f64> {
        let n = spec.eval(u)?;
        if n <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(f.eval(u).abs() / n)
    };
    let fan = direction_fan(dim, nsamples);
    let mut best = f64::NEG_INFINITY;
    let mut best_u = fan[0].clone();
    for u in &fan {
        let v = value(u)?;
        if v > best {
            best = v;
            best_u = u.clone();
        }
    }
    // Local refinement: shrinking deterministic perturbations around the best
    // direction.
    let mut step = 4.0 / nsamples as f64;
    for _ in 0..60 {
        let mut improved = false;
        for axis in 0..dim {
            for sgn in [1.0, -1.0] {
                let mut c = best_u.coords().to_vec();
                c[axis] += sgn * step;
                let cand = Vector::new(c)?;
                if cand.norm2() == 0.0 {
                    continue;
                }
                let v = value(&cand)?;
                if v > best {
                    best = v;
                    best_u = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    Ok(best)
}

/// Gauge (Minkowski functional) `μ_body(x) = inf{t > 0 : x ∈ t·body}` to
/// absolute accuracy `tol`, by bisection on the membership oracle.
///
/// The body must contain the origin in its interior. This is the generic
/// oracle-driven route; [`ConvexBody::gauge`] is the exact counterpart used
/// on hot paths and the two are cross-checked in tests.
pub fn gauge_eval(body: &ConvexBody, x: &Vector, tol: f64) -> Result<f64> {
    if x.dim() != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: x.dim(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("gauge_eval tol must be > 0, got {tol}")));
    }
    let origin = Vector::zeros(body.dim());
    if !body.contains(&origin, 0.0) {
        return Err(Error::GaugeOracle("origin not interior to body".into()));
    }
    let xn = x.norm2();
    if xn == 0.0 {
        return Ok(0.0);
    }
    // x ∈ tV  ⟺  x/t ∈ V. Establish a bracket and bisect.
    let outer = body.bounding_radius2();
    let mut lo = 0.9 * xn / outer; // x/t has Euclidean norm > outer below this
    if !body.contains(&x.scale(1.0 / lo), 0.0) {
        // expected: lo is below the gauge
    } else {
        lo = tol.min(lo * 1e-6);
    }
    let mut hi = lo.max(xn / outer);
    let mut tries = 0;
    while !body.contains(&x.scale(1.0 / hi), 0.0) {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::GaugeOracle(format!(
                "no t <= {hi:.3e} admits x into t·body"
            )));
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if body.contains(&x.scale(1.0 / mid), 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Supporting functionals of `body` at the boundary point `x0`: every
/// returned pair `(f, c)` satisfies `f(x0) = c` and `f(x) <= c` on the body.
///
/// * smooth norm balls (finite p > 1): the unique gradient functional;
/// * `p = 1` and `p = ∞` balls: exact facet normals incident to `x0`;
/// * 2D polytopes and gauge bodies: exact normal-cone generators, one per
///   incident hull edge.
///
/// Functionals are unit-dual with respect to the ball's own norm (for norm
/// balls), the gauge norm (for gauge bodies) and Euclidean for bare polytopes.
pub fn support_functionals(
    body: &ConvexBody,
    x0: &Vector,
    tol: f64,
) -> Result<Vec<(LinearFunctional, f64)>> {
    if x0.dim() != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: x0.dim(),
        });
    }
    let out = match body.repr() {
        BodyRepr::NormBall {
            spec,
            radius,
            center,
        } => {
            let v = x0.sub(center);
            let r = spec.eval(&v)?;
            if (r - radius).abs() > tol * radius.max(1.0) {
                return Err(Error::NotOnBoundary((r - radius).abs()));
            }
            match spec {
                NormSpec::P { p } | NormSpec::Weighted { p, .. } => {
                    let weights = match spec {
                        NormSpec::Weighted { weights, .. } => Some(weights.as_slice()),
                        _ => None,
                    };
                    if *p == 1.0 {
                        cross_polytope_normals(&v, weights, *radius, center, tol)?
                    } else if p.is_infinite() {
                        cube_normals(&v, weights, *radius, center, tol)?
                    } else {
                        vec![smooth_ball_gradient(&v, *p, weights, x0)?]
                    }
                }
                NormSpec::Gauge { body: inner } => {
                    // The ball of a gauge norm: supporting functionals of the
                    // inner body at the radially mapped point, levels mapped back.
                    let y0 = v.scale(1.0 / radius);
                    let inner_fs = support_functionals(inner, &y0, tol)?;
                    inner_fs
                        .into_iter()
                        .map(|(f, c)| {
                            let level = f.eval(center) + radius * c;
                            (f, level)
                        })
                        .collect()
                }
            }
        }
        BodyRepr::PolytopeHull { .. } | BodyRepr::GaugeBody { .. } => {
            body.hull_edge_functionals(x0, tol)?
        }
    };
    if out.is_empty() {
        return Err(Error::NoSupportingFunctional);
    }
    Ok(out)
}

fn smooth_ball_gradient(
    v: &Vector,
    p: f64,
    weights: Option<&[f64]>,
    x0: &Vector,
) -> Result<(LinearFunctional, f64)> {
    // Gradient of the norm at v; the gradient of any norm lies on the dual
    // unit sphere, so no further normalization is needed.
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let nv = p_norm(v.coords(), p, weights);
    if nv <= 0.0 {
        return Err(Error::NotOnBoundary(0.0));
    }
    let coeffs: Vec<f64> = v
        .coords()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if p == 2.0 {
                w(i) * c / nv
            } else {
                w(i) * c.signum() * (c.abs() / nv).powf(p - 1.0)
            }
        })
        .collect();
    let mut f = LinearFunctional::new(coeffs)?;
    f.unit_dual = true;
    let c = f.eval(x0);
    Ok((f, c))
}

fn cross_polytope_normals(
    v: &Vector,
    weights: Option<&[f64]>,
    _radius: f64,
    center: &Vector,
    tol: f64,
) -> Result<Vec<(LinearFunctional, f64)>> {
    // Facets of the weighted ℓ¹ ball are {Σ w_i σ_i x_i = R} for sign
    // vectors σ; the facets through v are those with σ_i = sign(v_i) on the
    // nonzero coordinates, the zero coordinates free.
    let w = |i: usize| weights.map_or(1.0, |wt| wt[i]);
    let dim = v.dim();
    let scale = v.norm2().max(1.0);
    let mut free = Vec::new();
    let mut base = vec![0.0f64; dim];
    for i in 0..dim {
        if v.get(i).abs() <= tol * scale {
            free.push(i);
        } else {
            base[i] = v.get(i).signum();
        }
    }
    let mut out = Vec::new();
    for mask in 0..(1u32 << free.len()) {
        let mut sigma = base.clone();
        for (bit, &i) in free.iter().enumerate() {
            sigma[i] = if mask & (1 << bit) == 0 { 1.0 } else { -1.0 };
        }
        let coeffs: Vec<f64> = sigma.iter().enumerate().map(|(i, s)| s * w(i)).collect();
        let mut f = LinearFunctional::new(coeffs)?;
        f.unit_dual = true;
        let x0 = v.add(center);
        let c = f.eval(&x0);
        out.push((f, c));
    }
    Ok(out)
}

fn cube_normals(
    v: &Vector,
    weights: Option<&[f64]>,
    radius: f64,
    center: &Vector,
    tol: f64,
) -> Result<Vec<(LinearFunctional, f64)>> {
    // Facets of the weighted ℓ∞ ball are {w_i x_i = ±R}; the normal cone at
    // v is generated by ±w_i e_i over the tight coordinates.
    let w = |i: usize| weights.map_or(1.0, |wt| wt[i]);
    let dim = v.dim();
    let mut out = Vec::new();
    for i in 0..dim {
        if (w(i) * v.get(i).abs() - radius).abs() <= tol * radius.max(1.0) {
            let mut coeffs = vec![0.0f64; dim];
            coeffs[i] = v.get(i).signum() * w(i);
            let mut f = LinearFunctional::new(coeffs)?;
            f.unit_dual = true;
            let x0 = v.add(center);
            let c = f.eval(&x0);
            out.push((f, c));
        }
    }
    Ok(out)
}

/// Deterministic set of `n` directions on the Euclidean unit sphere of R^dim:
/// signed axes in 1D, uniform angles in 2D, a Fibonacci sphere in 3D.
pub fn direction_fan(dim: usize, n: usize) -> Vec<Vector> {
    assert!((1..=MAX_DIM).contains(&dim));
    match dim {
        1 => vec![Vector(vec![1.0]), Vector(vec![-1.0])],
        2 => (0..n)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Vector(vec![th.cos(), th.sin()])
            })
            .collect(),
        _ => {
            let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            (0..n)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * k as f64;
                    Vector(vec![r * phi.cos(), r * phi.sin(), z])
                })
                .collect()
        }
    }
}

/// An orthonormal pair completing `u` (Euclidean-unit, dim 3) to a frame.
pub fn orthonormal_complement(u: &Vector) -> (Vector, Vector) {
    assert_eq!(u.dim(), 3);
    let pick = if u.get(0).abs() < 0.9 {
        Vector::unit(3, 0)
    } else {
        Vector::unit(3, 1)
    };
    let proj = u.scale(u.dot(&pick));
    let v = pick.sub(&proj);
    let v = v.scale(1.0 / v.norm2());
    let w = Vector(vec![
        u.get(1) * v.get(2) - u.get(2) * v.get(1),
        u.get(2) * v.get(0) - u.get(0) * v.get(2),
        u.get(0) * v.get(1) - u.get(1) * v.get(0),
    ]);
    (v, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::ConvexBody;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn p_norm_eval() {
        let l2 = NormSpec::euclid();
        assert_eq!(l2.eval(&v(&[3.0, 4.0])).unwrap(), 5.0);
        let linf = NormSpec::sup();
        assert_eq!(linf.eval(&v(&[1.0, -2.0])).unwrap(), 2.0);
        let l1 = NormSpec::p(1.0).unwrap();
        assert_eq!(l1.eval(&v(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn weighted_norm_eval() {
        // x²/4 + y² ellipse norm
        let w = NormSpec::weighted(2.0, vec![0.25, 1.0]).unwrap();
        assert!((w.eval(&v(&[2.0, 0.0])).unwrap() - 1.0).abs() < 1e-15);
        assert!((w.eval(&v(&[0.0, 1.0])).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dual_norms_closed_form() {
        let f10 = LinearFunctional::new(vec![1.0, 0.0]).unwrap();
        let f11 = LinearFunctional::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(
            dual_norm_estimate(&NormSpec::euclid(), &f10, 16).unwrap(),
            1.0
        );
        assert_eq!(
            dual_norm_estimate(&NormSpec::p(1.0).unwrap(), &f11, 16).unwrap(),
            1.0
        );
        assert_eq!(dual_norm_estimate(&NormSpec::sup(), &f11, 16).unwrap(), 2.0);
    }

    #[test]
    fn zero_functional_rejected() {
        assert!(matches!(
            LinearFunctional::new(vec![0.0, 0.0]),
            Err(Error::ZeroFunctional)
        ));
    }

    #[test]
    fn support_unique_on_euclid_ball() {
        let ball = ConvexBody::unit_ball(NormSpec::euclid(), 2).unwrap();
        let fs = support_functionals(&ball, &v(&[1.0, 0.0]), 1e-9).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].0.coeffs(), &[1.0, 0.0]);
        assert_eq!(fs[0].1, 1.0);
    }

    #[test]
    fn support_cube_vertex_two_generators() {
        let ball = ConvexBody::unit_ball(NormSpec::sup(), 2).unwrap();
        let fs = support_functionals(&ball, &v(&[1.0, 1.0]), 1e-9).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].0.coeffs(), &[1.0, 0.0]);
        assert_eq!(fs[1].0.coeffs(), &[0.0, 1.0]);
        assert_eq!(fs[0].1, 1.0);
        assert_eq!(fs[1].1, 1.0);
    }

    #[test]
    fn support_cross_polytope_vertex() {
        // Derived by enumerating the 2D ℓ¹ ball's edges incident to (1, 0):
        // the edges toward (0, 1) and (0, -1) have outward normals (1, 1) and
        // (1, -1), already unit in the dual (ℓ∞) norm.
        let ball = ConvexBody::unit_ball(NormSpec::p(1.0).unwrap(), 2).unwrap();
        let fs = support_functionals(&ball, &v(&[1.0, 0.0]), 1e-9).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].0.coeffs(), &[1.0, 1.0]);
        assert_eq!(fs[1].0.coeffs(), &[1.0, -1.0]);
        assert!(fs.iter().all(|(_, c)| *c == 1.0));
    }

    #[test]
    fn gauge_of_unit_ball_is_the_norm() {
        let ball = ConvexBody::unit_ball(NormSpec::euclid(), 2).unwrap();
        let g = gauge_eval(&ball, &v(&[0.5, 0.0]), 1e-9).unwrap();
        assert!((g - 0.5).abs() < 2e-9);
        let square = ConvexBody::unit_ball(NormSpec::sup(), 2).unwrap();
        let g = gauge_eval(&square, &v(&[2.0, 1.0]), 1e-9).unwrap();
        assert!((g - 2.0).abs() < 2e-9);
    }

    #[test]
    fn fan_is_deterministic_and_unit() {
        for dim in 1..=3 {
            let fan = direction_fan(dim, 32);
            let fan2 = direction_fan(dim, 32);
            assert_eq!(fan, fan2);
            for u in &fan {
                assert!((u.norm2() - 1.0).abs() < 1e-12);
            }
        }
    }
}
