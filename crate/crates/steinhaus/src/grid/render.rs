//! Grid exports: PGM-style ASCII rasters, run-length JSON, and plain SVG 1.1
//! scenes for 2D sets with overlaid certificate balls and paths.

use serde::{Deserialize, Serialize};

use super::GridSet;
use crate::error::{Error, Result};
use crate::geometry::{direction_fan, NormSpec, Vector};

/// PGM-style ASCII raster (P2, maxval 1) for 2D grids. Row 0 is the top of
/// the image, so rows are written in descending index order.
pub fn to_pgm(g: &GridSet) -> Result<String> {
    if g.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: g.dim(),
            what: "PGM export is 2D".into(),
        });
    }
    let (nx, ny) = (g.dims()[0], g.dims()[1]);
    let mut out = String::new();
    out.push_str("P2\n");
    out.push_str(&format!(
        "# origin {} {} spacing {}\n",
        g.origin().get(0),
        g.origin().get(1),
        g.spacing()
    ));
    out.push_str(&format!("{nx} {ny}\n1\n"));
    for y in (0..ny).rev() {
        let mut row = String::with_capacity(2 * nx);
        for x in 0..nx {
            row.push(if g.get(&[x, y]) { '1' } else { '0' });
            row.push(if x + 1 == nx { '\n' } else { ' ' });
        }
        out.push_str(&row);
    }
    Ok(out)
}

/// Flat run-length JSON form: alternating run lengths over the row-major
/// flattening, starting with an unoccupied run.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSetJson {
    pub origin: Vec<f64>,
    pub h: f64,
    pub dims: Vec<usize>,
    pub runs: Vec<u64>,
}

pub fn to_json(g: &GridSet) -> GridSetJson {
    let total = g.total_cells();
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0u64;
    let mut idx = vec![0usize; g.dim()];
    for _ in 0..total {
        let bit = g.get(&idx);
        if bit == current {
            len += 1;
        } else {
            runs.push(len);
            current = bit;
            len = 1;
        }
        let mut ax = 0;
        while ax < idx.len() {
            idx[ax] += 1;
            if idx[ax] < g.dims()[ax] {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
    }
    runs.push(len);
    GridSetJson {
        origin: g.origin().coords().to_vec(),
        h: g.h,
        dims: g.dims().to_vec(),
        runs,
    }
}

pub fn from_json(j: &GridSetJson) -> Result<GridSet> {
    let origin = Vector::new(j.origin.clone())?;
    let mut g = GridSet::new(origin, j.h, j.dims.clone())?;
    let total = g.total_cells() as u64;
    let declared: u64 = j.runs.iter().try_fold(0u64, |a, r| a.checked_add(*r))
        .ok_or_else(|| Error::Parse("run-length overflow".into()))?;
    if declared != total {
        return Err(Error::Parse(format!(
            "run lengths cover {declared} cells, grid has {total}"
        )));
    }
    let mut occupied = false;
    let mut idx = vec![0usize; g.dim()];
    for run in &j.runs {
        for _ in 0..*run {
            if occupied {
                g.set(&idx);
            }
            let mut ax = 0;
            while ax < idx.len() {
                idx[ax] += 1;
                if idx[ax] < g.dims()[ax] {
                    break;
                }
                idx[ax] = 0;
                ax += 1;
            }
        }
        occupied = !occupied;
    }
    Ok(g)
}

/// Minimal SVG 1.1 scene builder for 2D figures.
pub struct SvgScene {
    min: (f64, f64),
    max: (f64, f64),
    elements: Vec<String>,
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

impl SvgScene {
    pub fn new() -> SvgScene {
        SvgScene {
            min: (f64::INFINITY, f64::INFINITY),
            max: (f64::NEG_INFINITY, f64::NEG_INFINITY),
            elements: Vec::new(),
        }
    }

    fn cover(&mut self, x: f64, y: f64) {
        self.min.0 = self.min.0.min(x);
        self.min.1 = self.min.1.min(y);
        self.max.0 = self.max.0.max(x);
        self.max.1 = self.max.1.max(y);
    }

    /// Occupied cells as per-row run rectangles.
    pub fn add_grid(&mut self, g: &GridSet, fill: &str, opacity: f64) -> Result<()> {
        if g.dim() != 2 {
            return Err(Error::UnsupportedDimension {
                dim: g.dim(),
                what: "SVG export is 2D".into(),
            });
        }
        let h = g.spacing();
        for y in 0..g.dims()[1] {
            let mut x = 0usize;
            while x < g.dims()[0] {
                if !g.get(&[x, y]) {
                    x += 1;
                    continue;
                }
                let start = x;
                while x < g.dims()[0] && g.get(&[x, y]) {
                    x += 1;
                }
                let c0 = g.cell_center(&[start, y]);
                let (rx, ry) = (c0.get(0) - h / 2.0, c0.get(1) - h / 2.0);
                let w = (x - start) as f64 * h;
                self.cover(rx, ry);
                self.cover(rx + w, ry + h);
                self.elements.push(format!(
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" \
                     fill-opacity=\"{}\"/>",
                    fmt(rx),
                    fmt(-ry - h),
                    fmt(w),
                    fmt(h),
                    fill,
                    fmt(opacity)
                ));
            }
        }
        Ok(())
    }

    pub fn add_polyline(&mut self, points: &[Vector], stroke: &str, width: f64) {
        if points.is_empty() {
            return;
        }
        let coords: Vec<String> = points
            .iter()
            .map(|p| {
                self.cover(p.get(0), p.get(1));
                format!("{},{}", fmt(p.get(0)), fmt(-p.get(1)))
            })
            .collect();
        self.elements.push(format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>",
            coords.join(" "),
            stroke,
            fmt(width)
        ));
    }

    /// The boundary of `center + radius·B` for the given norm, drawn as a
    /// 64-gon of norm-normalized directions.
    pub fn add_ball_outline(
        &mut self,
        center: &Vector,
        radius: f64,
        norm: &NormSpec,
        stroke: &str,
        width: f64,
    ) -> Result<()> {
        let mut pts = Vec::with_capacity(65);
        for u in direction_fan(2, 64) {
            let nu = norm.eval(&u)?;
            pts.push(center.add(&u.scale(radius / nu)));
        }
        pts.push(pts[0].clone());
        self.add_polyline(&pts, stroke, width);
        Ok(())
    }

    pub fn add_point(&mut self, p: &Vector, fill: &str, radius: f64) {
        self.cover(p.get(0), p.get(1));
        self.elements.push(format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
            fmt(p.get(0)),
            fmt(-p.get(1)),
            fmt(radius),
            fill
        ));
    }

    pub fn finish(self) -> String {
        let (w, h) = (
            (self.max.0 - self.min.0).max(1e-9),
            (self.max.1 - self.min.1).max(1e-9),
        );
        let pad = 0.05 * w.max(h);
        let vb = format!(
            "{} {} {} {}",
            fmt(self.min.0 - pad),
            fmt(-self.max.1 - pad),
            fmt(w + 2.0 * pad),
            fmt(h + 2.0 * pad)
        );
        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{vb}\" \
             width=\"640\" height=\"640\">\n"
        ));
        for e in &self.elements {
            out.push_str(e);
            out.push('\n');
        }
        out.push_str("</svg>\n");
        out
    }
}

impl Default for SvgScene {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{rasterize, SetDescriptor};

    #[test]
    fn rle_roundtrip() {
        let g = rasterize(
            &SetDescriptor::Polylines {
                chains: vec![vec![
                    Vector::new(vec![0.0, 0.0]).unwrap(),
                    Vector::new(vec![1.0, 0.5]).unwrap(),
                ]],
                norm: NormSpec::euclid(),
            },
            0.05,
            0.0,
        )
        .unwrap();
        let j = to_json(&g);
        let back = from_json(&j).unwrap();
        assert_eq!(back.occupied_indices(), g.occupied_indices());
        assert_eq!(to_json(&back), j);
    }

    #[test]
    fn pgm_header() {
        let g = rasterize(
            &SetDescriptor::Points {
                points: vec![Vector::new(vec![0.0, 0.0]).unwrap()],
                norm: NormSpec::euclid(),
            },
            0.5,
            0.0,
        )
        .unwrap();
        let pgm = to_pgm(&g).unwrap();
        assert!(pgm.starts_with("P2\n"));
        assert!(pgm.contains("spacing 0.5"));
    }
}
