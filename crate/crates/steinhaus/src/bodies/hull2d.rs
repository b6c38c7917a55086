//! Exact 2D convex-hull machinery: monotone chain, halfplane membership,
//! polygon gauge, and edge location for normal-cone generators.

use crate::error::{Error, Result};
use crate::geometry::Vector;

#[derive(Clone, Debug)]
pub(crate) struct Hull2 {
    /// CCW hull vertices, strictly convex (no collinear interior points).
    verts: Vec<Vector>,
    /// Per edge (i → i+1): outward normal and support level `n·x = c`.
    edges: Vec<(Vector, f64)>,
    scale: f64,
}

fn cross(o: &Vector, a: &Vector, b: &Vector) -> f64 {
    (a.get(0) - o.get(0)) * (b.get(1) - o.get(1)) - (a.get(1) - o.get(1)) * (b.get(0) - o.get(0))
}

impl Hull2 {
    pub fn build(points: &[Vector]) -> Result<Hull2> {
        if points.iter().any(|p| p.dim() != 2) {
            return Err(Error::InvalidBody("hull points must be 2D".into()));
        }
        let mut pts: Vec<Vector> = points.to_vec();
        pts.sort_by(|a, b| {
            (a.get(0), a.get(1))
                .partial_cmp(&(b.get(0), b.get(1)))
                .unwrap()
        });
        pts.dedup_by(|a, b| a.get(0) == b.get(0) && a.get(1) == b.get(1));
        if pts.len() < 3 {
            return Err(Error::InvalidBody(
                "2D hull needs at least 3 distinct points".into(),
            ));
        }
        let mut lower: Vec<Vector> = Vec::new();
        for p in &pts {
            while lower.len() >= 2
                && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0
            {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<Vector> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2
                && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0
            {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        if lower.len() < 3 {
            return Err(Error::InvalidBody("degenerate (flat) 2D hull".into()));
        }
        let verts = lower;
        let scale = verts
            .iter()
            .flat_map(|v| v.coords().iter().map(|c| c.abs()))
            .fold(1.0f64, f64::max);
        let mut edges = Vec::with_capacity(verts.len());
        for i in 0..verts.len() {
            let a = &verts[i];
            let b = &verts[(i + 1) % verts.len()];
            let dir = b.sub(a);
            // CCW polygon: outward normal is the direction rotated by -90°.
            let n = Vector::new(vec![dir.get(1), -dir.get(0)])?;
            let c = n.dot(a);
            edges.push((n, c));
        }
        Ok(Hull2 { verts, edges, scale })
    }

    pub fn verts(&self) -> &[Vector] {
        &self.verts
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.edges
            .iter()
            .all(|(n, c)| n.dot(x) <= c + tol * self.scale.max(1.0) + 1e-14 * self.scale)
    }

    /// Gauge of the hull at `x` when the origin is strictly interior:
    /// `μ(x) = max_e (n_e·x)/c_e`.
    pub fn gauge(&self, x: &Vector) -> Result<f64> {
        let mut g = 0.0f64;
        for (n, c) in &self.edges {
            if *c <= 1e-14 * self.scale {
                return Err(Error::GaugeOracle(
                    "origin not strictly interior to hull".into(),
                ));
            }
            g = g.max(n.dot(x) / c);
        }
        Ok(g.max(0.0))
    }

    /// Indices of the edges whose supporting line passes through `x0`.
    /// One index for an edge-interior point, two for a hull vertex.
    pub fn edges_at(&self, x0: &Vector, tol: f64) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, (n, c)) in self.edges.iter().enumerate() {
            let nn = n.norm2();
            if nn == 0.0 {
                continue;
            }
            if (n.dot(x0) - c).abs() <= tol * nn * self.scale.max(1.0) {
                out.push(i);
            }
        }
        out
    }

    pub fn edge_normal(&self, i: usize) -> &Vector {
        &self.edges[i].0
    }

    pub fn max_axis(&self, axis: usize) -> f64 {
        self.verts
            .iter()
            .map(|v| v.get(axis).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vector {
        Vector::new(vec![x, y]).unwrap()
    }

    #[test]
    fn square_hull() {
        let pts = vec![
            v(1.0, 1.0),
            v(-1.0, 1.0),
            v(-1.0, -1.0),
            v(1.0, -1.0),
            v(0.0, 0.0),
            v(0.5, 1.0), // collinear with the top edge
        ];
        let h = Hull2::build(&pts).unwrap();
        assert_eq!(h.verts().len(), 4);
        assert!(h.contains(&v(0.9, -0.9), 1e-12));
        assert!(!h.contains(&v(1.1, 0.0), 1e-12));
        assert!((h.gauge(&v(2.0, 1.0)).unwrap() - 2.0).abs() < 1e-12);
        // vertex (1,1) touches two edges, the top edge's interior one
        assert_eq!(h.edges_at(&v(1.0, 1.0), 1e-9).len(), 2);
        assert_eq!(h.edges_at(&v(0.3, 1.0), 1e-9).len(), 1);
    }
}
