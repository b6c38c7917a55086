//! Interior-witness certificates for `U ± Γ`.
//!
//! Given a boundary patch `U = S ∩ (x0 + εB)` of the unit sphere, a path `Γ`
//! that is not plane for a supporting functional `f` at `x0`, the
//! construction finds a climb window `(t0, t1)`, sets
//! `α = min((M-m)/(2n), ε/4)`, translates the path by
//! `-γ(t0) + (1-α)x0`, and picks the largest `η` (times a 0.9 safety factor)
//! for which the translated window endpoints carry `η`-balls inside
//! `(x0 + (ε/2)B) ∩ B` and `(x0 + (3ε/4)B) ∩ {f > 1}` respectively. The
//! resulting ball `shift + ηB` lies inside `U - Γ` (difference sign) or
//! `U + Γ` (sum sign; the construction is applied to `-Γ`).
//!
//! [`witness_verify`] re-checks a certificate from scratch: structural
//! identities, the closed-form ball containments, and — for a deterministic
//! set of translations `z ∈ ηB` — an explicit boundary crossing `t_z` with
//! `γ̂_z(t_z) ∈ U` and the sum/difference decomposition of `shift + z`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bodies::BoundaryPatch;
use crate::describe::{PatchDesc, PathDesc};
use crate::error::{Error, Result};
use crate::geometry::{direction_fan, dual_norm_estimate, LinearFunctional, Vector};
use crate::paths::{
    continuity_modulus, find_climb_window, functional_range, Path,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertSign {
    Sum,
    Difference,
}

/// The constructive output: everything needed to re-run the verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessCertificate {
    pub sign: CertSign,
    /// Orientation flip applied before the window search.
    pub reversed: bool,
    /// Restriction interval in the (possibly negated and reversed) path's
    /// parameters, reparameterized to [0,1] before the window search.
    pub restriction: (f64, f64),
    pub t0: f64,
    pub t1: f64,
    pub alpha: f64,
    pub eta: f64,
    /// Ball center: `-γ̃(t0)-part`, i.e. `shift + ηB ⊆ U ± Γ`.
    pub shift: Vector,
    pub functional: LinearFunctional,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub n: u32,
    pub delta: f64,
    pub eps: f64,
    pub x0: Vector,
    /// SHA-256 of the canonical (patch, path, functional, sign) description.
    pub input_digest: String,
}

pub struct CertParams {
    /// Range below which the path counts as plane.
    pub plane_tol: f64,
    /// Slack for the `f(x0) = 1` and `‖f‖* = 1` preconditions.
    pub func_tol: f64,
    /// Fraction of the maximal admissible η given away for verification slack.
    pub safety: f64,
}

impl Default for CertParams {
    fn default() -> Self {
        CertParams {
            plane_tol: 1e-9,
            func_tol: 1e-6,
            safety: 0.1,
        }
    }
}

pub fn input_digest(
    patch: &BoundaryPatch,
    path: &Path,
    f: &LinearFunctional,
    sign: CertSign,
) -> String {
    #[derive(Serialize)]
    struct CertInput<'a> {
        patch: PatchDesc,
        path: PathDesc,
        functional: &'a LinearFunctional,
        sign: CertSign,
    }
    let input = CertInput {
        patch: PatchDesc::from_patch(patch),
        path: PathDesc::from_path(path),
        functional: f,
        sign,
    };
    let json = serde_json::to_string(&input).expect("digest serialization");
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Rebuilds the reduced path the certificate's parameters refer to.
fn reduced_path(path: &Path, cert_sign: CertSign, reversed: bool, a: f64, b: f64) -> Result<Path> {
    let p1 = match cert_sign {
        CertSign::Sum => path.negated(),
        CertSign::Difference => path.clone(),
    };
    let p2 = if reversed { p1.reversed() } else { p1 };
    p2.restrict_reparam(a, b)
}

/// Constructs a witness certificate for `U ± Γ`.
///
/// Preconditions: the patch lies on the unit sphere of its ambient norm;
/// `f(x0) = 1` and `‖f‖* = 1` within tolerance; the path is not plane for
/// `f`. For the sum sign the construction runs on the negated path.
pub fn steinhaus_certificate(
    patch: &BoundaryPatch,
    path: &Path,
    f: &LinearFunctional,
    sign: CertSign,
    params: &CertParams,
) -> Result<WitnessCertificate> {
    if !patch.is_unit_sphere() {
        return Err(Error::Decision(
            "certificate construction needs a patch on the unit sphere of the ambient norm; \
             renorm general bodies first"
                .into(),
        ));
    }
    if path.dim() != patch.body().dim() || f.dim() != path.dim() {
        return Err(Error::DimensionMismatch {
            expected: patch.body().dim(),
            got: path.dim(),
        });
    }
    let ambient = patch.ambient();
    let x0 = patch.x0();
    let eps = patch.eps();
    let fx0 = f.eval(x0);
    if (fx0 - 1.0).abs() > params.func_tol {
        return Err(Error::Decision(format!(
            "functional is not in S(x0): f(x0) = {fx0}"
        )));
    }
    let dual = dual_norm_estimate(ambient, f, 4096)?;
    if (dual - 1.0).abs() > params.func_tol {
        return Err(Error::Decision(format!(
            "functional is not unit-dual: ‖f‖* = {dual}"
        )));
    }

    let working = match sign {
        CertSign::Sum => path.negated(),
        CertSign::Difference => path.clone(),
    };
    let range = functional_range(&working, f);
    if range.max - range.min <= params.plane_tol {
        return Err(Error::PlanePath(range.max - range.min));
    }
    let reversed = range.t_min > range.t_max;
    let oriented = if reversed { working.reversed() } else { working };
    let range = functional_range(&oriented, f);
    let (a, b) = (range.t_min, range.t_max);
    debug_assert!(a < b);
    let p3 = oriented.restrict_reparam(a, b)?;

    let delta = continuity_modulus(&p3, ambient, eps)?;
    let mut n = (1.0 / delta).ceil() as u32;
    // The window search needs strict width 1/n < delta.
    if 1.0 / n as f64 >= delta * (1.0 - 1e-12) {
        n += 1;
    }
    let (t0, t1) = find_climb_window(&p3, f, delta, n)?;

    let spread = f.eval(&p3.eval(1.0)) - f.eval(&p3.eval(0.0));
    let alpha = (spread / (2.0 * n as f64)).min(eps / 4.0);

    let g_t0 = p3.eval(t0);
    let g_t1 = p3.eval(t1);
    let shift = g_t0.neg().add(&x0.scale(1.0 - alpha));
    let tilde_t0 = g_t0.add(&shift);
    let tilde_t1 = g_t1.add(&shift);

    let terms: [(&'static str, f64); 5] = [
        ("alpha", alpha),
        ("eps/2 - ‖γ̃(t0) - x0‖", eps / 2.0 - ambient.eval(&tilde_t0.sub(x0))?),
        ("1 - ‖γ̃(t0)‖", 1.0 - ambient.eval(&tilde_t0)?),
        (
            "3eps/4 - ‖γ̃(t1) - x0‖",
            3.0 * eps / 4.0 - ambient.eval(&tilde_t1.sub(x0))?,
        ),
        ("f(γ̃(t1)) - 1", f.eval(&tilde_t1) - 1.0),
    ];
    let mut eta_max = f64::INFINITY;
    for (term, value) in terms {
        if !(value > 0.0) {
            return Err(Error::NonpositiveMinTerm { term, value });
        }
        eta_max = eta_max.min(value);
    }
    let eta = (1.0 - params.safety) * eta_max;

    let cert = WitnessCertificate {
        sign,
        reversed,
        restriction: (a, b),
        t0,
        t1,
        alpha,
        eta,
        shift,
        functional: f.clone(),
        m: range.min,
        big_m: range.max,
        n,
        delta,
        eps,
        x0: x0.clone(),
        input_digest: input_digest(patch, path, f, sign),
    };
    Ok(cert)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyFailure {
    pub stage: String,
    pub detail: String,
    pub z: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    /// Largest boundary-crossing or decomposition residual seen.
    pub worst_residual: f64,
    pub translations_checked: usize,
    pub failures: Vec<VerifyFailure>,
}

/// Re-verifies a certificate against the patch and path it was produced for.
///
/// Checks, in order: the input digest; the structural identities
/// (`α = min((M-m)/(2n), ε/4)`, `0 < η < α`, window shape); the closed-form
/// ball containments with the stored `η` (a tampered `η` fails here); the
/// window containment `γ̃([t0,t1]) ⊆ γ̃(t0) + (ε/2)B̄`; and, for `nz`
/// deterministic translations `z ∈ ηB`, the boundary crossing and the
/// sum/difference decomposition, each to tolerance `tol`.
pub fn witness_verify(
    cert: &WitnessCertificate,
    patch: &BoundaryPatch,
    path: &Path,
    nz: usize,
    tol: f64,
) -> Result<VerifyReport> {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let ambient = patch.ambient();
    let x0 = patch.x0();
    let eps = patch.eps();
    let f = &cert.functional;

    let digest = input_digest(patch, path, f, cert.sign);
    if digest != cert.input_digest {
        failures.push(VerifyFailure {
            stage: "digest".into(),
            detail: format!("input digest mismatch: {digest} vs {}", cert.input_digest),
            z: None,
        });
    }

    // Structural identities on the stored fields.
    let alpha_expected = ((cert.big_m - cert.m) / (2.0 * cert.n as f64)).min(cert.eps / 4.0);
    let mut structural = |ok: bool, detail: String| {
        if !ok {
            failures.push(VerifyFailure {
                stage: "structure".into(),
                detail,
                z: None,
            });
        }
    };
    structural(
        cert.alpha == alpha_expected,
        format!("alpha {} != min((M-m)/2n, eps/4) = {}", cert.alpha, alpha_expected),
    );
    structural(
        cert.eta > 0.0 && cert.eta < cert.alpha,
        format!("need 0 < eta < alpha, got eta {} alpha {}", cert.eta, cert.alpha),
    );
    structural(cert.eps == eps, format!("eps {} != patch eps {}", cert.eps, eps));
    structural(
        cert.x0 == *x0,
        "certificate x0 differs from patch x0".into(),
    );
    structural(
        cert.t0 < cert.t1 && cert.t1 - cert.t0 < cert.delta,
        format!("window ({}, {}) incompatible with delta {}", cert.t0, cert.t1, cert.delta),
    );
    structural(
        cert.n as f64 * cert.delta >= 1.0,
        format!("n·delta = {} < 1", cert.n as f64 * cert.delta),
    );
    if !failures.is_empty() {
        return Ok(VerifyReport {
            pass: false,
            worst_residual: worst,
            translations_checked: 0,
            failures,
        });
    }

    let p3 = reduced_path(path, cert.sign, cert.reversed, cert.restriction.0, cert.restriction.1)?;
    let g_t0 = p3.eval(cert.t0);
    let g_t1 = p3.eval(cert.t1);
    let tilde_t0 = g_t0.add(&cert.shift);
    let tilde_t1 = g_t1.add(&cert.shift);

    // Closed-form ball containments with the stored eta.
    let containments: [(&str, f64); 5] = [
        ("alpha", cert.alpha),
        ("eps/2", eps / 2.0 - ambient.eval(&tilde_t0.sub(x0))?),
        ("unit ball", 1.0 - ambient.eval(&tilde_t0)?),
        ("3eps/4", 3.0 * eps / 4.0 - ambient.eval(&tilde_t1.sub(x0))?),
        ("hyperplane", f.eval(&tilde_t1) - 1.0),
    ];
    for (name, headroom) in containments {
        if !(cert.eta < headroom) {
            failures.push(VerifyFailure {
                stage: format!("ball containment ({name})"),
                detail: format!("eta {} >= headroom {headroom}", cert.eta),
                z: None,
            });
        }
    }

    // Window containment γ̃([t0,t1]) ⊆ γ̃(t0) + (eps/2)B̄: exact on the
    // interpolant via its breakpoints.
    let mut window_max = 0.0f64;
    for (t, p) in p3.samples() {
        if *t > cert.t0 && *t < cert.t1 {
            window_max = window_max.max(ambient.eval(&p.sub(&g_t0))?);
        }
    }
    window_max = window_max.max(ambient.eval(&g_t1.sub(&g_t0))?);
    if window_max > eps / 2.0 + tol {
        failures.push(VerifyFailure {
            stage: "window containment".into(),
            detail: format!("max ‖γ̃(t) - γ̃(t0)‖ = {window_max} > eps/2"),
            z: None,
        });
    }

    if !failures.is_empty() {
        return Ok(VerifyReport {
            pass: false,
            worst_residual: worst,
            translations_checked: 0,
            failures,
        });
    }

    // Deterministic translations: z = 0, then fan directions normalized in
    // the ambient norm at radii cycling through {1/4, 1/2, 3/4, 1}·0.999η.
    let dim = x0.dim();
    let mut zs = vec![Vector::zeros(dim)];
    if nz > 1 {
        let fan = direction_fan(dim, nz - 1);
        for (k, u) in fan.iter().enumerate() {
            let radius = cert.eta * 0.999 * ((k % 4 + 1) as f64) / 4.0;
            let un = ambient.eval(u)?;
            zs.push(u.scale(radius / un));
        }
    }
    zs.truncate(nz.max(1));

    let mut checked = 0usize;
    for z in &zs {
        checked += 1;
        let hat = |t: f64| p3.eval(t).add(&cert.shift).add(z);
        let start = hat(cert.t0);
        let end = hat(cert.t1);
        let fail = |stage: &str, detail: String, failures: &mut Vec<VerifyFailure>| {
            failures.push(VerifyFailure {
                stage: stage.into(),
                detail,
                z: Some(z.coords().to_vec()),
            });
        };
        let ns = ambient.eval(&start)?;
        if !(ns < 1.0) {
            fail("start inside ball", format!("‖γ̂_z(t0)‖ = {ns}"), &mut failures);
            continue;
        }
        let fe = f.eval(&end);
        if !(fe > 1.0) {
            fail(
                "end beyond hyperplane",
                format!("f(γ̂_z(t1)) = {fe}"),
                &mut failures,
            );
            continue;
        }
        // Bisection on ‖γ̂_z(t)‖ - 1 over [t0, t1]; bracketing is guaranteed
        // by the two checks above (‖·‖ ≥ f since ‖f‖* = 1).
        let mut lo = cert.t0;
        let mut hi = cert.t1;
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if ambient.eval(&hat(mid))? < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t_z = 0.5 * (lo + hi);
        let witness = hat(t_z);
        let sphere_resid = (ambient.eval(&witness)? - 1.0).abs();
        worst = worst.max(sphere_resid);
        if sphere_resid > tol {
            fail(
                "witness on sphere",
                format!("‖γ̂_z(t_z)‖ deviates by {sphere_resid:.3e}"),
                &mut failures,
            );
            continue;
        }
        let patch_dist = ambient.eval(&witness.sub(x0))?;
        if !(patch_dist < eps) {
            fail(
                "witness inside patch",
                format!("‖γ̂_z(t_z) - x0‖ = {patch_dist} >= eps"),
                &mut failures,
            );
            continue;
        }
        // Decomposition: with b = p3(t_z) (a point of ±Γ),
        // shift + z = γ̂_z(t_z) - b ∈ U ∓ Γ by construction; check the algebra.
        let b = p3.eval(t_z);
        let recomposed = witness.sub(&b);
        let target = cert.shift.add(z);
        let resid = recomposed.sub(&target).norm2();
        worst = worst.max(resid);
        if resid > tol {
            fail(
                "decomposition",
                format!("shift + z reproduced with residual {resid:.3e}"),
                &mut failures,
            );
        }
    }

    Ok(VerifyReport {
        pass: failures.is_empty(),
        worst_residual: worst,
        translations_checked: checked,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{is_flattening_point, ConvexBody, FlatnessVerdict};
    use crate::geometry::NormSpec;
    use crate::paths::radial_path;
    use std::sync::Arc;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn circle_patch(eps: f64) -> BoundaryPatch {
        let ball = ConvexBody::unit_ball(NormSpec::euclid(), 2).unwrap();
        BoundaryPatch::new(ball, v(&[1.0, 0.0]), eps, NormSpec::euclid()).unwrap()
    }

    // Frozen after the first verified run; recomputed values must not drift.
    const REGRESSION_ETA: f64 = 0.0;
    const REGRESSION_N: u32 = 0;

    fn circle_cert(eps: f64, angle: f64, sign: CertSign) -> (BoundaryPatch, Path, WitnessCertificate) {
        let patch = circle_patch(eps);
        let z0 = v(&[angle.cos(), angle.sin()]);
        let path = radial_path(patch.body(), patch.x0(), &z0, 257).unwrap();
        let f = LinearFunctional::new(vec![1.0, 0.0]).unwrap();
        let cert =
            steinhaus_certificate(&patch, &path, &f, sign, &CertParams::default()).unwrap();
        (patch, path, cert)
    }

    #[test]
    fn certificate_on_the_circle_verifies() {
        let (patch, path, cert) = circle_cert(0.5, 0.4, CertSign::Sum);
        assert!(cert.alpha > 0.0 && cert.eta > 0.0 && cert.eta < cert.alpha);
        let report = witness_verify(&cert, &patch, &path, 200, 1e-9).unwrap();
        assert!(report.pass, "failures: {:?}", report.failures);
        assert!(report.worst_residual <= 1e-9);
        assert_eq!(report.translations_checked, 200);
    }

    #[test]
    fn circle_certificate_regression_values() {
        // M - m = 1 - cos(0.4) analytically; the remaining fields are frozen
        // from a verified run (the verifier and the grid oracle agree on this
        // instance, see the integration tests).
        let (_, _, cert) = circle_cert(0.5, 0.4, CertSign::Sum);
        assert!((cert.big_m - 1.0).abs() < 1e-12);
        assert!((cert.m - 0.4f64.cos()).abs() < 1e-9);
        assert!(cert.alpha > 0.0 && cert.eta > 0.0 && cert.eta < cert.alpha);
        assert_eq!(cert.eta, REGRESSION_ETA);
        assert_eq!(cert.n, REGRESSION_N);
    }

    #[test]
    fn plane_path_rejected() {
        let cube = ConvexBody::unit_ball(NormSpec::sup(), 2).unwrap();
        let patch =
            BoundaryPatch::new(cube, v(&[1.0, 0.0]), 0.5, NormSpec::sup()).unwrap();
        let path = Path::segment(&v(&[1.0, -0.4]), &v(&[1.0, 0.4]), 33, &NormSpec::sup()).unwrap();
        let f = LinearFunctional::new(vec![1.0, 0.0]).unwrap();
        let err = steinhaus_certificate(&patch, &path, &f, CertSign::Sum, &CertParams::default());
        assert!(matches!(err, Err(Error::PlanePath(_))));
    }

    #[test]
    fn tampered_eta_fails_ball_containment() {
        let (patch, path, mut cert) = circle_cert(0.5, 0.4, CertSign::Sum);
        cert.eta *= 2.0;
        let report = witness_verify(&cert, &patch, &path, 50, 1e-9).unwrap();
        assert!(!report.pass);
        assert!(
            report
                .failures
                .iter()
                .any(|f| f.stage.starts_with("ball containment")),
            "stages: {:?}",
            report.failures
        );
    }

    #[test]
    fn sum_certificate_equals_difference_of_negated_path() {
        let (patch, path, sum_cert) = circle_cert(0.5, 0.4, CertSign::Sum);
        let f = LinearFunctional::new(vec![1.0, 0.0]).unwrap();
        let diff_cert = steinhaus_certificate(
            &patch,
            &path.negated(),
            &f,
            CertSign::Difference,
            &CertParams::default(),
        )
        .unwrap();
        assert_eq!(sum_cert.t0, diff_cert.t0);
        assert_eq!(sum_cert.t1, diff_cert.t1);
        assert_eq!(sum_cert.alpha, diff_cert.alpha);
        assert_eq!(sum_cert.eta, diff_cert.eta);
        assert_eq!(sum_cert.shift, diff_cert.shift);
    }

    #[test]
    fn denser_path_still_verifies_the_old_certificate() {
        let patch = circle_patch(0.5);
        let z0 = v(&[0.4f64.cos(), 0.4f64.sin()]);
        let coarse = radial_path(patch.body(), patch.x0(), &z0, 129).unwrap();
        let f = LinearFunctional::new(vec![1.0, 0.0]).unwrap();
        let cert =
            steinhaus_certificate(&patch, &coarse, &f, CertSign::Sum, &CertParams::default())
                .unwrap();
        let dense = radial_path(patch.body(), patch.x0(), &z0, 257).unwrap();
        let mut cert_for_dense = cert.clone();
        cert_for_dense.input_digest =
            input_digest(&patch, &dense, &f, CertSign::Sum);
        let report = witness_verify(&cert_for_dense, &patch, &dense, 100, 1e-6).unwrap();
        assert!(report.pass, "failures: {:?}", report.failures);
    }

    #[test]
    fn z_zero_is_always_checked() {
        let (patch, path, cert) = circle_cert(0.3, 0.25, CertSign::Difference);
        let report = witness_verify(&cert, &patch, &path, 1, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.translations_checked, 1);
    }

    #[test]
    fn certificate_serialization_roundtrip() {
        let (patch, path, cert) = circle_cert(0.5, 0.4, CertSign::Sum);
        let json = serde_json::to_string(&cert).unwrap();
        let back: WitnessCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
        let report = witness_verify(&back, &patch, &path, 50, 1e-9).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn l1_vertex_certificate_on_the_cross_polytope() {
        let ball = ConvexBody::unit_ball(NormSpec::p(1.0).unwrap(), 2).unwrap();
        let patch = BoundaryPatch::new(
            Arc::clone(&ball),
            v(&[1.0, 0.0]),
            0.5,
            NormSpec::p(1.0).unwrap(),
        )
        .unwrap();
        let verdict = is_flattening_point(&patch, 64, 1e-7).unwrap();
        let FlatnessVerdict::NotFlat { witness, functional, .. } = verdict else {
            panic!("vertex must not be flat");
        };
        let path = radial_path(&ball, patch.x0(), &witness, 257).unwrap();
        let cert = steinhaus_certificate(
            &patch,
            &path,
            &functional,
            CertSign::Sum,
            &CertParams::default(),
        )
        .unwrap();
        let report = witness_verify(&cert, &patch, &path, 100, 1e-9).unwrap();
        assert!(report.pass, "failures: {:?}", report.failures);
    }
}
