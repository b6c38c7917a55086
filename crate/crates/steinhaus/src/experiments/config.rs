//! Experiment configuration: strict JSON schemas with unknown keys rejected,
//! plus resolution of body references into runtime values.

use std::collections::BTreeMap;
use std::path::Path as FsPath;
use std::sync::Arc;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bodies::{BodyRepr, ConvexBody};
use crate::describe::parse_off;
use crate::error::{Error, Result};
use crate::geometry::{NormSpec, Vector};
use crate::paths::{CertParams, DecideParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Flatness,
    Certify,
    VolkmannWalter,
    Cantor,
    Polyline,
    CurveSp,
    GaugeRenorm,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Flatness => "flatness",
            ExperimentKind::Certify => "certify",
            ExperimentKind::VolkmannWalter => "volkmann-walter",
            ExperimentKind::Cantor => "cantor",
            ExperimentKind::Polyline => "polyline",
            ExperimentKind::CurveSp => "curve-sp",
            ExperimentKind::GaugeRenorm => "gauge-renorm",
        }
    }
}

/// Norm schema: `{"kind":"p","p":2.0}`, `{"kind":"weighted","p":1.0,"w":[…]}`
/// or `{"kind":"gauge","body":"<body-id>"}` (resolved against the config's
/// body table).
#[derive(Clone, Debug, PartialEq)]
pub enum NormConfig {
    P { p: f64 },
    Weighted { p: f64, w: Vec<f64> },
    Gauge { body: String },
}

impl Serialize for NormConfig {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(tag = "kind", rename_all = "lowercase")]
        enum Out<'a> {
            P { p: f64 },
            Weighted { p: f64, w: &'a [f64] },
            Gauge { body: &'a str },
        }
        match self {
            NormConfig::P { p } => Out::P { p: *p },
            NormConfig::Weighted { p, w } => Out::Weighted { p: *p, w },
            NormConfig::Gauge { body } => Out::Gauge { body },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            kind: String,
            p: Option<f64>,
            w: Option<Vec<f64>>,
            body: Option<String>,
        }
        let raw = Raw::deserialize(d)?;
        let forbid = |cond: bool, what: &str| {
            if cond {
                Err(D::Error::custom(format!(
                    "field `{what}` is not allowed for norm kind `{}`",
                    raw.kind
                )))
            } else {
                Ok(())
            }
        };
        match raw.kind.as_str() {
            "p" => {
                forbid(raw.w.is_some(), "w")?;
                forbid(raw.body.is_some(), "body")?;
                Ok(NormConfig::P {
                    p: raw.p.ok_or_else(|| D::Error::missing_field("p"))?,
                })
            }
            "weighted" => {
                forbid(raw.body.is_some(), "body")?;
                Ok(NormConfig::Weighted {
                    p: raw.p.ok_or_else(|| D::Error::missing_field("p"))?,
                    w: raw.w.ok_or_else(|| D::Error::missing_field("w"))?,
                })
            }
            "gauge" => {
                forbid(raw.p.is_some(), "p")?;
                forbid(raw.w.is_some(), "w")?;
                Ok(NormConfig::Gauge {
                    body: raw.body.ok_or_else(|| D::Error::missing_field("body"))?,
                })
            }
            other => Err(D::Error::custom(format!("unknown norm kind `{other}`"))),
        }
    }
}

/// Body schema: `{"kind":"ball",…}`, `{"kind":"polytope","vertices":…}` (or
/// `"off"` pointing at an OFF file), `{"kind":"gauge","cloud":…,"r":…}`.
#[derive(Clone, Debug, PartialEq)]
pub enum BodyConfig {
    Ball {
        norm: NormConfig,
        radius: f64,
        center: Vec<f64>,
    },
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
    PolytopeOff {
        off: String,
    },
    Gauge {
        cloud: Vec<Vec<f64>>,
        r: f64,
        norm: Option<NormConfig>,
    },
}

impl Serialize for BodyConfig {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(tag = "kind", rename_all = "lowercase")]
        enum Out<'a> {
            Ball {
                norm: &'a NormConfig,
                radius: f64,
                center: &'a [f64],
            },
            Polytope {
                #[serde(skip_serializing_if = "Option::is_none")]
                vertices: Option<&'a Vec<Vec<f64>>>,
                #[serde(skip_serializing_if = "Option::is_none")]
                off: Option<&'a str>,
            },
            Gauge {
                cloud: &'a Vec<Vec<f64>>,
                r: f64,
                #[serde(skip_serializing_if = "Option::is_none")]
                norm: Option<&'a NormConfig>,
            },
        }
        match self {
            BodyConfig::Ball {
                norm,
                radius,
                center,
            } => Out::Ball {
                norm,
                radius: *radius,
                center,
            },
            BodyConfig::Polytope { vertices } => Out::Polytope {
                vertices: Some(vertices),
                off: None,
            },
            BodyConfig::PolytopeOff { off } => Out::Polytope {
                vertices: None,
                off: Some(off),
            },
            BodyConfig::Gauge { cloud, r, norm } => Out::Gauge {
                cloud,
                r: *r,
                norm: norm.as_ref(),
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BodyConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            kind: String,
            norm: Option<NormConfig>,
            radius: Option<f64>,
            center: Option<Vec<f64>>,
            vertices: Option<Vec<Vec<f64>>>,
            off: Option<String>,
            cloud: Option<Vec<Vec<f64>>>,
            r: Option<f64>,
        }
        let raw = Raw::deserialize(d)?;
        match raw.kind.as_str() {
            "ball" => Ok(BodyConfig::Ball {
                norm: raw.norm.ok_or_else(|| D::Error::missing_field("norm"))?,
                radius: raw.radius.ok_or_else(|| D::Error::missing_field("radius"))?,
                center: raw.center.ok_or_else(|| D::Error::missing_field("center"))?,
            }),
            "polytope" => match (raw.vertices, raw.off) {
                (Some(v), None) => Ok(BodyConfig::Polytope { vertices: v }),
                (None, Some(off)) => Ok(BodyConfig::PolytopeOff { off }),
                _ => Err(D::Error::custom(
                    "polytope takes exactly one of `vertices` or `off`",
                )),
            },
            "gauge" => Ok(BodyConfig::Gauge {
                cloud: raw.cloud.ok_or_else(|| D::Error::missing_field("cloud"))?,
                r: raw.r.ok_or_else(|| D::Error::missing_field("r"))?,
                norm: raw.norm,
            }),
            other => Err(D::Error::custom(format!("unknown body kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcConfig {
    pub x0: Vec<f64>,
    pub eps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    /// Polyline vertices; the declared through-points of the curve.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    /// A planar circular arc (2D only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arc: Option<ArcCurve>,
    #[serde(default = "default_curve_samples")]
    pub samples: usize,
}

fn default_curve_samples() -> usize {
    129
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcCurve {
    pub center: Vec<f64>,
    pub radius: f64,
    pub from_angle: f64,
    pub to_angle: f64,
}

/// Tolerances and sampling densities, all explicit with documented defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Flatness tolerance on functional deviations.
    pub flat_tol: f64,
    /// Boundary samples for flatness tests.
    pub patch_samples: usize,
    /// Samples on witness paths.
    pub path_samples: usize,
    /// Boundary samples forming gauge-body clouds.
    pub arc_samples: usize,
    /// Initial renormed patch radius (gauge-norm units).
    pub renorm_eps: f64,
    /// Translations checked by certificate verification.
    pub verify_nz: usize,
    /// Verification tolerance.
    pub verify_tol: f64,
    /// Interior-block radius (cells) for the grid oracle.
    pub r_cells: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let d = DecideParams::default();
        Tolerances {
            flat_tol: d.flat_tol,
            patch_samples: d.patch_samples,
            path_samples: d.path_samples,
            arc_samples: d.arc_samples,
            renorm_eps: d.renorm_eps,
            verify_nz: d.verify_nz,
            verify_tol: d.verify_tol,
            r_cells: 2,
        }
    }
}

impl Tolerances {
    pub fn decide_params(&self) -> DecideParams {
        DecideParams {
            flat_tol: self.flat_tol,
            patch_samples: self.patch_samples,
            path_samples: self.path_samples,
            arc_samples: self.arc_samples,
            renorm_eps: self.renorm_eps,
            verify_nz: self.verify_nz,
            verify_tol: self.verify_tol,
            cert: CertParams::default(),
        }
    }
}

fn is_default_tolerances(t: &Tolerances) -> bool {
    *t == Tolerances::default()
}

/// One experiment. The schema is flat; which fields are required or allowed
/// depends on `kind` and is validated before any computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bodies: BTreeMap<String, BodyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<NormConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arcs: Option<Vec<ArcConfig>>,
    /// Rational self-similarity ratio as `[numerator, denominator]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u32>,
    /// Ambient dimension for polyline / curve experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolutions: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fatten: Option<f64>,
    /// Cross-check exact interval results against the grid oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raster_check: Option<bool>,
    #[serde(default, skip_serializing_if = "is_default_tolerances")]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Field admissibility per kind; unknown keys were already rejected by
    /// the schema.
    pub fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        let require = |cond: bool, what: &str| {
            if cond {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "experiment kind `{}` requires `{what}`",
                    self.kind.as_str()
                )))
            }
        };
        let forbid = |absent: bool, what: &str| {
            if absent {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "field `{what}` is not applicable to kind `{}`",
                    self.kind.as_str()
                )))
            }
        };
        let geo = self.body.is_some() || self.x0.is_some() || self.eps.is_some();
        match self.kind {
            Flatness | Certify => {
                require(self.body.is_some(), "body")?;
                require(self.x0.is_some(), "x0")?;
                require(self.eps.is_some(), "eps")?;
                forbid(self.arcs.is_none(), "arcs")?;
                forbid(self.lambda.is_none(), "lambda")?;
                forbid(self.curve.is_none(), "curve")?;
                forbid(self.n.is_none(), "n")?;
            }
            VolkmannWalter => {
                require(self.body.is_some(), "body")?;
                require(self.arcs.as_ref().is_some_and(|a| !a.is_empty()), "arcs")?;
                forbid(self.x0.is_none(), "x0")?;
                forbid(self.eps.is_none(), "eps")?;
                forbid(self.lambda.is_none(), "lambda")?;
                forbid(self.curve.is_none(), "curve")?;
                forbid(self.n.is_none(), "n")?;
            }
            Cantor => {
                require(self.lambda.is_some(), "lambda")?;
                require(self.depth.is_some(), "depth")?;
                forbid(!geo, "body/x0/eps")?;
                forbid(self.arcs.is_none(), "arcs")?;
                forbid(self.curve.is_none(), "curve")?;
                forbid(self.n.is_none(), "n")?;
            }
            Polyline => {
                require(self.n.is_some(), "n")?;
                forbid(!geo, "body/x0/eps")?;
                forbid(self.arcs.is_none(), "arcs")?;
                forbid(self.lambda.is_none(), "lambda")?;
                forbid(self.curve.is_none(), "curve")?;
            }
            CurveSp => {
                require(self.n.is_some(), "n")?;
                require(self.curve.is_some(), "curve")?;
                forbid(!geo, "body/x0/eps")?;
                forbid(self.arcs.is_none(), "arcs")?;
                forbid(self.lambda.is_none(), "lambda")?;
            }
            GaugeRenorm => {
                require(self.body.is_some(), "body")?;
                require(self.x0.is_some(), "x0")?;
                forbid(self.arcs.is_none(), "arcs")?;
                forbid(self.lambda.is_none(), "lambda")?;
                forbid(self.curve.is_none(), "curve")?;
                forbid(self.n.is_none(), "n")?;
            }
        }
        if let Some([_, den]) = self.lambda {
            if den == 0 {
                return Err(Error::Config("lambda denominator is zero".into()));
            }
        }
        if let Some(res) = &self.resolutions {
            if res.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
                return Err(Error::Config("resolutions must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Batch schema for `steinhaus sweep`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchConfig {
    pub runs: Vec<BatchEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchEntry {
    pub name: String,
    pub config: ExperimentConfig,
}

pub(crate) struct ResolveCtx<'a> {
    pub table: &'a BTreeMap<String, BodyConfig>,
    pub base_dir: &'a FsPath,
}

impl ResolveCtx<'_> {
    pub fn norm(&self, cfg: &NormConfig, stack: &mut Vec<String>) -> Result<NormSpec> {
        match cfg {
            NormConfig::P { p } => NormSpec::p(*p),
            NormConfig::Weighted { p, w } => NormSpec::weighted(*p, w.clone()),
            NormConfig::Gauge { body } => {
                if stack.iter().any(|s| s == body) {
                    return Err(Error::Config(format!("body reference cycle at `{body}`")));
                }
                let cfg = self.table.get(body).ok_or_else(|| {
                    Error::Config(format!("unknown body id `{body}` in gauge norm"))
                })?;
                stack.push(body.clone());
                let built = self.body(cfg, stack)?;
                stack.pop();
                NormSpec::gauge(built)
            }
        }
    }

    pub fn body(&self, cfg: &BodyConfig, stack: &mut Vec<String>) -> Result<Arc<ConvexBody>> {
        match cfg {
            BodyConfig::Ball {
                norm,
                radius,
                center,
            } => {
                let spec = self.norm(norm, stack)?;
                ConvexBody::ball(spec, *radius, Vector::new(center.clone())?)
            }
            BodyConfig::Polytope { vertices } => ConvexBody::polytope(
                vertices
                    .iter()
                    .map(|v| Vector::new(v.clone()))
                    .collect::<Result<Vec<_>>>()?,
            ),
            BodyConfig::PolytopeOff { off } => {
                let path = self.base_dir.join(off);
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    Error::Config(format!("cannot read OFF file {}: {e}", path.display()))
                })?;
                let verts = parse_off(&text)?;
                ConvexBody::polytope(
                    verts
                        .into_iter()
                        .map(Vector::new)
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            BodyConfig::Gauge { cloud, r, norm } => {
                let spec = match norm {
                    Some(n) => self.norm(n, stack)?,
                    None => NormSpec::euclid(),
                };
                ConvexBody::gauge_body(
                    cloud
                        .iter()
                        .map(|v| Vector::new(v.clone()))
                        .collect::<Result<Vec<_>>>()?,
                    *r,
                    spec,
                )
            }
        }
    }
}

/// Default ambient norm: a unit ball's own norm when the body is one,
/// Euclidean otherwise.
pub(crate) fn default_ambient(body: &ConvexBody) -> NormSpec {
    match body.repr() {
        BodyRepr::NormBall { spec, .. } => spec.clone(),
        _ => NormSpec::euclid(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"kind":"cantor","lambda":[1,3],"depth":6,"bogus":1}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
        let text = r#"{"kind":"cantor","lambda":[1,3],"depth":6,
                       "tolerances":{"flat_tol":1e-7,"nope":2}}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn nested_norm_unknown_keys_rejected() {
        let text = r#"{"kind":"flatness","eps":0.5,"x0":[1.0,0.0],
                       "body":{"kind":"ball","norm":{"kind":"p","p":2.0,"junk":3},
                               "radius":1.0,"center":[0.0,0.0]}}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn kind_field_admissibility() {
        let text = r#"{"kind":"cantor","lambda":[1,3],"depth":6,"n":2}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
        let text = r#"{"kind":"polyline","n":2}"#;
        assert!(ExperimentConfig::from_json(text).is_ok());
    }

    #[test]
    fn norm_schema_matches_spec_forms() {
        let p: NormConfig = serde_json::from_str(r#"{"kind":"p","p":2.0}"#).unwrap();
        assert_eq!(p, NormConfig::P { p: 2.0 });
        let w: NormConfig =
            serde_json::from_str(r#"{"kind":"weighted","p":1.0,"w":[1.0,2.0]}"#).unwrap();
        assert_eq!(
            w,
            NormConfig::Weighted {
                p: 1.0,
                w: vec![1.0, 2.0]
            }
        );
        let g: NormConfig = serde_json::from_str(r#"{"kind":"gauge","body":"V"}"#).unwrap();
        assert_eq!(g, NormConfig::Gauge { body: "V".into() });
        let round = serde_json::to_string(&g).unwrap();
        assert_eq!(round, r#"{"kind":"gauge","body":"V"}"#);
    }

    #[test]
    fn gauge_norm_reference_cycles_rejected() {
        let text = r#"{"kind":"flatness","eps":0.5,"x0":[1.0,0.0],
            "bodies":{"A":{"kind":"ball","norm":{"kind":"gauge","body":"A"},
                           "radius":1.0,"center":[0.0,0.0]}},
            "body":{"kind":"ball","norm":{"kind":"gauge","body":"A"},
                    "radius":1.0,"center":[0.0,0.0]}}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let ctx = ResolveCtx {
            table: &cfg.bodies,
            base_dir: FsPath::new("."),
        };
        let err = ctx.body(cfg.body.as_ref().unwrap(), &mut Vec::new());
        assert!(err.is_err());
    }
}
