//! Patch decision procedures: flattening dichotomy with constructive
//! certificates, the gauge-renorming route for general bodies, and the
//! two-hyperplane dichotomy for unions of sphere arcs.

use std::sync::Arc;

use crate::bodies::{
    build_gauge_body_with, is_flattening_point, patch_sample, BoundaryPatch, ConvexBody,
    FlatnessVerdict,
};
use crate::error::{Error, Result};
use crate::geometry::{Ball, LinearFunctional, NormSpec, Vector};
use crate::paths::certificate::{
    steinhaus_certificate, witness_verify, CertParams, CertSign, VerifyReport, WitnessCertificate,
};
use crate::paths::{on_boundary_residual, radial_path, Path};

#[derive(Clone, Debug)]
pub struct DecideParams {
    /// Flatness tolerance on functional deviations over the patch.
    pub flat_tol: f64,
    /// Boundary samples for the flatness test.
    pub patch_samples: usize,
    /// Samples of the radial witness path.
    pub path_samples: usize,
    /// Boundary samples forming the gauge body's arc cloud.
    pub arc_samples: usize,
    /// Initial patch radius for the renormed patch, in gauge-norm units.
    pub renorm_eps: f64,
    /// Translations checked by the internal verification.
    pub verify_nz: usize,
    pub verify_tol: f64,
    pub cert: CertParams,
}

impl Default for DecideParams {
    fn default() -> Self {
        DecideParams {
            flat_tol: 1e-7,
            patch_samples: 129,
            path_samples: 257,
            arc_samples: 257,
            renorm_eps: 0.25,
            verify_nz: 200,
            verify_tol: 1e-9,
            cert: CertParams::default(),
        }
    }
}

/// Renorming data when the decision ran through a gauge body.
#[derive(Clone, Debug)]
pub struct Renorm {
    /// Interior point of the original body; the construction recenters by it.
    pub translation: Vector,
    /// δ = ‖x0 - translation‖ in the ambient norm.
    pub delta: f64,
    /// Patch radius used on the gauge-body sphere, in gauge-norm units.
    pub eps_inner: f64,
    pub gauge_body: Arc<ConvexBody>,
}

#[derive(Clone, Debug)]
pub struct Certified {
    pub certificate: WitnessCertificate,
    /// `ball ⊆ U + U` (coordinates of the original body).
    pub ball: Ball,
    pub verify: VerifyReport,
    /// Patch the certificate construction actually ran on (the gauge-body
    /// patch when renormed, otherwise the input patch).
    pub patch_used: BoundaryPatch,
    pub path: Path,
    pub renorm: Option<Renorm>,
}

#[derive(Clone, Debug)]
pub enum Decision {
    /// The patch lies in the hyperplane `{functional = level}`, hence
    /// `U + U ⊆ {functional = sum_level}` and the sum has empty interior.
    FlatCase {
        functional: LinearFunctional,
        level: f64,
        sum_level: f64,
    },
    Certified(Box<Certified>),
}

/// Decides the Steinhaus dichotomy for a boundary patch.
///
/// On the unit sphere of the ambient norm: a flat patch yields [`Decision::FlatCase`];
/// otherwise the flatness witness drives a radial path, a sum-sign
/// certificate is constructed and verified, and the interior ball of `U + U`
/// is returned. Other bodies are first renormed through the symmetric gauge
/// body; the witness ball is mapped back by the recentering translation.
pub fn sphere_patch_decide(patch: &BoundaryPatch, params: &DecideParams) -> Result<Decision> {
    if patch.is_unit_sphere() {
        return decide_unit_sphere(patch, params, None);
    }
    decide_via_renorm(patch, params)
}

fn decide_unit_sphere(
    patch: &BoundaryPatch,
    params: &DecideParams,
    renorm: Option<Renorm>,
) -> Result<Decision> {
    let verdict = is_flattening_point(patch, params.patch_samples, params.flat_tol)?;
    let (witness, functional) = match verdict {
        FlatnessVerdict::Flat { functional, level } => {
            return Ok(Decision::FlatCase {
                functional,
                level,
                sum_level: 2.0 * level,
            });
        }
        FlatnessVerdict::NotFlat {
            witness,
            functional,
            ..
        } => (witness, functional),
    };
    let path = witness_path(patch, &witness, params)?;
    let certificate = steinhaus_certificate(patch, &path, &functional, CertSign::Sum, &params.cert)?;
    let verify = witness_verify(&certificate, patch, &path, params.verify_nz, params.verify_tol)?;
    if !verify.pass {
        return Err(Error::Decision(format!(
            "internal verification failed: {:?}",
            verify.failures.first()
        )));
    }
    let center = match &renorm {
        Some(r) => certificate.shift.add(&r.translation.scale(2.0)),
        None => certificate.shift.clone(),
    };
    let ball = Ball::new(center, certificate.eta, patch.ambient().clone())?;
    Ok(Decision::Certified(Box::new(Certified {
        certificate,
        ball,
        verify,
        patch_used: patch.clone(),
        path,
        renorm,
    })))
}

/// A radial path from `x0` to the most deviating patch sample whose image
/// stays inside the patch. The flatness witness is tried first.
fn witness_path(patch: &BoundaryPatch, witness: &Vector, params: &DecideParams) -> Result<Path> {
    let body = patch.body();
    let inside = |path: &Path| -> Result<bool> {
        for (_, p) in path.samples() {
            if patch.ambient().eval(&p.sub(patch.x0()))? >= patch.eps() {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let path = radial_path(body, patch.x0(), witness, params.path_samples)?;
    if inside(&path)? {
        return Ok(path);
    }
    // Walk the witness toward x0 until the whole radial image fits.
    let mut w = witness.clone();
    for _ in 0..30 {
        w = w.lerp(patch.x0(), 0.5);
        let res = on_boundary_residual(body, &w)?;
        if res > 1e-7 * body.bounding_radius2().max(1.0) {
            continue;
        }
        let path = radial_path(body, patch.x0(), &w, params.path_samples)?;
        if inside(&path)? {
            return Ok(path);
        }
    }
    Err(Error::Decision(
        "no radial witness path stays inside the patch".into(),
    ))
}

fn decide_via_renorm(patch: &BoundaryPatch, params: &DecideParams) -> Result<Decision> {
    let body = patch.body();
    if body.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: body.dim(),
            what: "gauge renorming needs 2D (exact normal cones)".into(),
        });
    }
    let z_int = body.interior_point_ref().clone();
    let (gauge, delta) =
        build_gauge_body_with(body, patch.x0(), patch.ambient(), params.arc_samples)?;
    let centered = body.translated(&z_int.neg())?;
    let x0c = patch.x0().sub(&z_int);
    let vnorm = NormSpec::gauge(Arc::clone(&gauge))?;

    // Shrink the gauge-norm patch radius until the renormed patch provably
    // sits inside both the arc cloud's region and the original eps-patch.
    let mut eps_inner = params.renorm_eps;
    let mut last_err = String::new();
    for _ in 0..12 {
        let patch_v = BoundaryPatch::new(
            Arc::clone(&gauge),
            x0c.clone(),
            eps_inner,
            vnorm.clone(),
        )?;
        match renormed_patch_ok(&patch_v, &centered, patch, &z_int, delta) {
            Ok(()) => {
                let decision = decide_unit_sphere(
                    &patch_v,
                    params,
                    Some(Renorm {
                        translation: z_int.clone(),
                        delta,
                        eps_inner,
                        gauge_body: Arc::clone(&gauge),
                    }),
                )?;
                return Ok(match decision {
                    Decision::FlatCase { functional, .. } => {
                        // Map the hyperplane back to original coordinates.
                        let level = functional.eval(patch.x0());
                        Decision::FlatCase {
                            functional,
                            level,
                            sum_level: 2.0 * level,
                        }
                    }
                    certified => certified,
                });
            }
            Err(e) => last_err = e.to_string(),
        }
        eps_inner *= 0.5;
    }
    Err(Error::Decision(format!(
        "could not fit a renormed patch inside the original one: {last_err}"
    )))
}

/// The renormed patch must consist of original boundary points within the
/// original patch radius: `S_V ∩ (x0 + ε'B_V) ⊆ ∂K ∩ (x0 + min(δ/2, ε)B)`.
fn renormed_patch_ok(
    patch_v: &BoundaryPatch,
    centered: &ConvexBody,
    original: &BoundaryPatch,
    z_int: &Vector,
    delta: f64,
) -> Result<()> {
    let samples = patch_sample(patch_v, 64)?;
    let scale = centered.bounding_radius2().max(1.0);
    let cap = original.eps().min(delta / 2.0);
    for s in &samples {
        let resid = on_boundary_residual(centered, s)?;
        if resid > 1e-6 * scale {
            return Err(Error::Decision(format!(
                "renormed patch leaves the body boundary (residual {resid:.3e})"
            )));
        }
        let d = original.ambient().eval(&s.add(z_int).sub(original.x0()))?;
        if d >= cap * (1.0 - 1e-9) {
            return Err(Error::Decision(format!(
                "renormed patch too wide: sample at ambient distance {d:.3e} of x0"
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VwCase {
    /// Some arc has a non-flattening point.
    NonFlatPoint,
    /// Two arcs are flat in non-parallel hyperplanes.
    TwoHyperplanes,
}

#[derive(Debug)]
pub enum VwOutcome {
    Certified {
        case: VwCase,
        certified: Box<Certified>,
    },
    /// The union fits in two parallel hyperplanes; `int(A + A)` may be empty.
    NotApplicable { reason: String },
}

/// The two-hyperplane dichotomy for a relatively open union of arcs on one
/// unit sphere: certify through a non-flattening point when an arc has one,
/// otherwise through a plane patch plus a non-plane segment from two
/// non-parallel flat arcs; report `NotApplicable` when the union sits inside
/// two parallel hyperplanes.
pub fn volkmann_walter_check(arcs: &[BoundaryPatch], params: &DecideParams) -> Result<VwOutcome> {
    if arcs.is_empty() {
        return Err(Error::Decision("no arcs supplied".into()));
    }
    let body = arcs[0].body();
    if body.dim() < 2 {
        return Err(Error::UnsupportedDimension {
            dim: body.dim(),
            what: "the dichotomy needs dimension >= 2".into(),
        });
    }
    for arc in arcs {
        if !Arc::ptr_eq(arc.body(), body) || arc.ambient() != arcs[0].ambient() {
            return Err(Error::Decision("arcs must lie on one sphere".into()));
        }
        if !arc.is_unit_sphere() {
            return Err(Error::Decision("arcs must lie on the unit sphere".into()));
        }
    }

    // Case (a): an arc with a non-flattening point.
    let mut flats: Vec<(usize, LinearFunctional, f64)> = Vec::new();
    for (i, arc) in arcs.iter().enumerate() {
        match is_flattening_point(arc, params.patch_samples, params.flat_tol)? {
            FlatnessVerdict::Flat { functional, level } => flats.push((i, functional, level)),
            FlatnessVerdict::NotFlat { .. } => {
                let Decision::Certified(certified) = sphere_patch_decide(arc, params)? else {
                    return Err(Error::Decision(
                        "non-flat arc did not produce a certificate".into(),
                    ));
                };
                return Ok(VwOutcome::Certified {
                    case: VwCase::NonFlatPoint,
                    certified,
                });
            }
        }
    }

    // Case (b): all arcs flat — look for two non-parallel hyperplanes.
    for (ai, fa, _) in &flats {
        for (bi, fb, _) in &flats {
            if ai == bi || parallel(fa, fb) {
                continue;
            }
            // Segment inside arc bi, not plane for fa.
            let samples = patch_sample(&arcs[*bi], params.patch_samples)?;
            let mut best: Option<(usize, usize, f64)> = None;
            for i in 0..samples.len() {
                for j in (i + 1)..samples.len() {
                    let spread = (fa.eval(&samples[i]) - fa.eval(&samples[j])).abs();
                    if best.map_or(true, |(_, _, s)| spread > s) {
                        best = Some((i, j, spread));
                    }
                }
            }
            let Some((i, j, spread)) = best else { continue };
            if spread <= params.flat_tol {
                continue;
            }
            let path = Path::segment(&samples[i], &samples[j], 65, arcs[*ai].ambient())?;
            let certificate =
                steinhaus_certificate(&arcs[*ai], &path, fa, CertSign::Sum, &params.cert)?;
            let verify = witness_verify(
                &certificate,
                &arcs[*ai],
                &path,
                params.verify_nz,
                params.verify_tol,
            )?;
            if !verify.pass {
                return Err(Error::Decision(format!(
                    "internal verification failed: {:?}",
                    verify.failures.first()
                )));
            }
            let ball = Ball::new(
                certificate.shift.clone(),
                certificate.eta,
                arcs[*ai].ambient().clone(),
            )?;
            return Ok(VwOutcome::Certified {
                case: VwCase::TwoHyperplanes,
                certified: Box::new(Certified {
                    certificate,
                    ball,
                    verify,
                    patch_used: arcs[*ai].clone(),
                    path,
                    renorm: None,
                }),
            });
        }
    }

    Ok(VwOutcome::NotApplicable {
        reason: "every arc is flat and all their hyperplanes are parallel".into(),
    })
}

fn parallel(a: &LinearFunctional, b: &LinearFunctional) -> bool {
    // f ∥ g iff the coefficient vectors are linearly dependent.
    let (ac, bc) = (a.coeffs(), b.coeffs());
    let scale = ac
        .iter()
        .chain(bc.iter())
        .fold(0.0f64, |m, c| m.max(c.abs()));
    let tol = 1e-12 * scale * scale;
    match ac.len() {
        1 => true,
        2 => (ac[0] * bc[1] - ac[1] * bc[0]).abs() <= tol,
        _ => {
            let cx = ac[1] * bc[2] - ac[2] * bc[1];
            let cy = ac[2] * bc[0] - ac[0] * bc[2];
            let cz = ac[0] * bc[1] - ac[1] * bc[0];
            (cx * cx + cy * cy + cz * cz).sqrt() <= tol
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::NormSpec;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn sup_patch(x0: &[f64], eps: f64) -> (Arc<ConvexBody>, BoundaryPatch) {
        let cube = ConvexBody::unit_ball(NormSpec::sup(), 2).unwrap();
        let patch =
            BoundaryPatch::new(Arc::clone(&cube), v(x0), eps, NormSpec::sup()).unwrap();
        (cube, patch)
    }

    #[test]
    fn circle_patch_is_certified() {
        let ball = ConvexBody::unit_ball(NormSpec::euclid(), 2).unwrap();
        let patch =
            BoundaryPatch::new(ball, v(&[1.0, 0.0]), 0.3, NormSpec::euclid()).unwrap();
        match sphere_patch_decide(&patch, &DecideParams::default()).unwrap() {
            Decision::Certified(c) => {
                assert!(c.verify.pass);
                assert!(c.ball.radius > 0.0);
                assert!(c.renorm.is_none());
            }
            Decision::FlatCase { .. } => panic!("circle patches are never flat"),
        }
    }

    #[test]
    fn cube_facet_is_flat_case() {
        let (_, patch) = sup_patch(&[1.0, 0.0], 0.5);
        match sphere_patch_decide(&patch, &DecideParams::default()).unwrap() {
            Decision::FlatCase {
                functional,
                level,
                sum_level,
            } => {
                assert_eq!(functional.coeffs(), &[1.0, 0.0]);
                assert_eq!(level, 1.0);
                assert_eq!(sum_level, 2.0);
            }
            _ => panic!("facet-interior patches are flat"),
        }
    }

    #[test]
    fn ellipse_is_certified_through_the_gauge_renorm() {
        // x²/4 + y² = 1 as the unit ball of a weighted norm; the ambient
        // Euclidean norm differs, which forces the renorm route.
        let ellipse =
            ConvexBody::unit_ball(NormSpec::weighted(2.0, vec![0.25, 1.0]).unwrap(), 2).unwrap();
        let patch =
            BoundaryPatch::new(ellipse, v(&[2.0, 0.0]), 0.3, NormSpec::euclid()).unwrap();
        match sphere_patch_decide(&patch, &DecideParams::default()).unwrap() {
            Decision::Certified(c) => {
                assert!(c.verify.pass, "failures: {:?}", c.verify.failures);
                let r = c.renorm.as_ref().expect("must renorm");
                assert!((r.delta - 2.0).abs() < 1e-9);
            }
            Decision::FlatCase { .. } => panic!("strictly convex bodies are never flat"),
        }
    }

    #[test]
    fn vw_two_orthogonal_facets_certify() {
        let (cube, a) = sup_patch(&[1.0, 0.0], 0.5);
        let b = BoundaryPatch::new(Arc::clone(&cube), v(&[0.0, 1.0]), 0.5, NormSpec::sup())
            .unwrap();
        match volkmann_walter_check(&[a, b], &DecideParams::default()).unwrap() {
            VwOutcome::Certified { case, certified } => {
                assert_eq!(case, VwCase::TwoHyperplanes);
                assert!(certified.verify.pass);
            }
            VwOutcome::NotApplicable { reason } => panic!("unexpected: {reason}"),
        }
    }

    #[test]
    fn vw_parallel_facets_not_applicable() {
        let (cube, a) = sup_patch(&[1.0, 0.0], 0.5);
        let b = BoundaryPatch::new(Arc::clone(&cube), v(&[-1.0, 0.0]), 0.5, NormSpec::sup())
            .unwrap();
        assert!(matches!(
            volkmann_walter_check(&[a, b], &DecideParams::default()).unwrap(),
            VwOutcome::NotApplicable { .. }
        ));
    }

    #[test]
    fn vw_single_round_arc_uses_case_a() {
        let ball = ConvexBody::unit_ball(NormSpec::euclid(), 2).unwrap();
        let arc =
            BoundaryPatch::new(ball, v(&[0.0, 1.0]), 0.4, NormSpec::euclid()).unwrap();
        match volkmann_walter_check(&[arc], &DecideParams::default()).unwrap() {
            VwOutcome::Certified { case, .. } => assert_eq!(case, VwCase::NonFlatPoint),
            VwOutcome::NotApplicable { reason } => panic!("unexpected: {reason}"),
        }
    }
}
