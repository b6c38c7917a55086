//! Canonical JSON descriptors for norms, bodies, patches and paths.
//!
//! These are the self-contained wire forms used by certificates, reports and
//! the OFF ingester. They parse untrusted input: every `build` validates.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bodies::{BodyRepr, BoundaryPatch, ConvexBody};
use crate::error::{Error, Result};
use crate::geometry::{NormSpec, Vector};
use crate::paths::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NormDesc {
    P { p: f64 },
    Weighted { p: f64, w: Vec<f64> },
    Gauge { body: Box<BodyDesc> },
}

impl NormDesc {
    pub fn euclid() -> Self {
        NormDesc::P { p: 2.0 }
    }

    pub fn build(&self) -> Result<NormSpec> {
        match self {
            NormDesc::P { p } => NormSpec::p(*p),
            NormDesc::Weighted { p, w } => NormSpec::weighted(*p, w.clone()),
            NormDesc::Gauge { body } => NormSpec::gauge(body.build()?),
        }
    }

    pub fn from_spec(spec: &NormSpec) -> Self {
        match spec {
            NormSpec::P { p } => NormDesc::P { p: *p },
            NormSpec::Weighted { p, weights } => NormDesc::Weighted {
                p: *p,
                w: weights.clone(),
            },
            NormSpec::Gauge { body } => NormDesc::Gauge {
                body: Box::new(BodyDesc::from_body(body)),
            },
        }
    }
}

fn default_gauge_norm() -> NormDesc {
    NormDesc::euclid()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodyDesc {
    Ball {
        norm: NormDesc,
        radius: f64,
        center: Vec<f64>,
    },
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
    Gauge {
        cloud: Vec<Vec<f64>>,
        r: f64,
        #[serde(default = "default_gauge_norm")]
        norm: NormDesc,
    },
}

fn vectors(raw: &[Vec<f64>]) -> Result<Vec<Vector>> {
    raw.iter().map(|c| Vector::new(c.clone())).collect()
}

impl BodyDesc {
    pub fn build(&self) -> Result<Arc<ConvexBody>> {
        match self {
            BodyDesc::Ball {
                norm,
                radius,
                center,
            } => ConvexBody::ball(norm.build()?, *radius, Vector::new(center.clone())?),
            BodyDesc::Polytope { vertices } => ConvexBody::polytope(vectors(vertices)?),
            BodyDesc::Gauge { cloud, r, norm } => {
                ConvexBody::gauge_body(vectors(cloud)?, *r, norm.build()?)
            }
        }
    }

    pub fn from_body(body: &ConvexBody) -> Self {
        match body.repr() {
            BodyRepr::NormBall {
                spec,
                radius,
                center,
            } => BodyDesc::Ball {
                norm: NormDesc::from_spec(spec),
                radius: *radius,
                center: center.coords().to_vec(),
            },
            BodyRepr::PolytopeHull { vertices } => BodyDesc::Polytope {
                vertices: vertices.iter().map(|v| v.coords().to_vec()).collect(),
            },
            BodyRepr::GaugeBody {
                cloud,
                r,
                ball_norm,
            } => BodyDesc::Gauge {
                cloud: cloud.iter().map(|v| v.coords().to_vec()).collect(),
                r: *r,
                norm: NormDesc::from_spec(ball_norm),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchDesc {
    pub body: BodyDesc,
    pub x0: Vec<f64>,
    pub eps: f64,
    pub ambient: NormDesc,
}

impl PatchDesc {
    pub fn build(&self) -> Result<BoundaryPatch> {
        let body = self.body.build()?;
        // A gauge ambient over the same description means "the gauge of this
        // very body": share the allocation so the unit-sphere check holds.
        let ambient = match &self.ambient {
            NormDesc::Gauge { body: inner } if **inner == self.body => {
                NormSpec::gauge(body.clone())?
            }
            other => other.build()?,
        };
        BoundaryPatch::new(body, Vector::new(self.x0.clone())?, self.eps, ambient)
    }

    pub fn from_patch(patch: &BoundaryPatch) -> Self {
        PatchDesc {
            body: BodyDesc::from_body(patch.body()),
            x0: patch.x0().coords().to_vec(),
            eps: patch.eps(),
            ambient: NormDesc::from_spec(patch.ambient()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathDesc {
    pub samples: Vec<(f64, Vec<f64>)>,
    pub chord_bound: f64,
}

impl PathDesc {
    pub fn build(&self) -> Result<Path> {
        let samples = self
            .samples
            .iter()
            .map(|(t, p)| Ok((*t, Vector::new(p.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        Path::with_declared_bound(samples, self.chord_bound)
    }

    pub fn from_path(path: &Path) -> Self {
        PathDesc {
            samples: path
                .samples()
                .iter()
                .map(|(t, p)| (*t, p.coords().to_vec()))
                .collect(),
            chord_bound: path.chord_bound(),
        }
    }
}

/// Parses an OFF-format vertex list (2D ingestion takes the `z = 0` plane).
/// Faces are ignored; the vertices feed a V-representation polytope.
pub fn parse_off(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut tokens = text
        .lines()
        .map(|l| match l.find('#') {
            Some(i) => &l[..i],
            None => l,
        })
        .flat_map(|l| l.split_whitespace())
        .peekable();
    let first = tokens.next().ok_or_else(|| Error::Parse("empty OFF".into()))?;
    if first != "OFF" {
        return Err(Error::Parse(format!("expected OFF header, got `{first}`")));
    }
    let mut next_usize = |what: &str| -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
    };
    let nv = next_usize("vertex count")?;
    let _nf = next_usize("face count")?;
    let _ne = next_usize("edge count")?;
    if nv == 0 || nv > 1_000_000 {
        return Err(Error::Parse(format!("unreasonable vertex count {nv}")));
    }
    let mut verts = Vec::with_capacity(nv);
    let mut tokens = tokens;
    for i in 0..nv {
        let mut coords = [0.0f64; 3];
        for c in coords.iter_mut() {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("vertex {i} truncated")))?;
            *c = tok
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("vertex {i}: {e}")))?;
            if !c.is_finite() {
                return Err(Error::Parse(format!("vertex {i}: non-finite coordinate")));
            }
        }
        verts.push(coords.to_vec());
    }
    // Planar inputs collapse to 2D.
    if verts.iter().all(|v| v[2] == 0.0) {
        Ok(verts.into_iter().map(|v| v[..2].to_vec()).collect())
    } else {
        Ok(verts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_roundtrip() {
        let desc = BodyDesc::Ball {
            norm: NormDesc::P { p: 2.0 },
            radius: 1.0,
            center: vec![0.0, 0.0],
        };
        let body = desc.build().unwrap();
        assert_eq!(BodyDesc::from_body(&body), desc);
    }

    #[test]
    fn off_square() {
        let text = "OFF\n4 1 4\n1 1 0\n-1 1 0\n-1 -1 0\n1 -1 0\n4 0 1 2 3\n";
        let verts = parse_off(text).unwrap();
        assert_eq!(verts.len(), 4);
        assert_eq!(verts[0], vec![1.0, 1.0]);
    }

    #[test]
    fn off_rejects_garbage() {
        assert!(parse_off("").is_err());
        assert!(parse_off("PLY\n").is_err());
        assert!(parse_off("OFF\n2 0 0\n1 2").is_err());
        assert!(parse_off("OFF\n1 0 0\n1 2 nan").is_err());
    }
}
