//! Tiny dense simplex solver for V-polytope membership and gauge queries in
//! dimension 3, where no exact polygon machinery is available.
//!
//! Problems solved (A is d×n, columns are the polytope points):
//!
//! * `in_hull`:  ∃ λ ≥ 0 with Aλ = x and Σλ = 1?
//! * `gauge_lp`: min Σλ subject to Aλ = x, λ ≥ 0  (= μ_conv(points)(x) when
//!   the origin is interior).
//!
//! Two-phase with Bland's rule; row counts are at most 4, so a plain tableau
//! is entirely adequate.

use crate::geometry::Vector;

struct Tableau {
    m: usize,
    n: usize,
    /// row-major (m+1) x (n+1); last row = objective, last col = rhs
    t: Vec<f64>,
    basis: Vec<usize>,
    eps: f64,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.n + 1) + c]
    }

    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.t[r * (self.n + 1) + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.n + 1;
        let pv = self.at(pr, pc);
        for c in 0..w {
            self.t[pr * w + c] /= pv;
        }
        for r in 0..=self.m {
            if r == pr {
                continue;
            }
            let factor = self.at(r, pc);
            if factor == 0.0 {
                continue;
            }
            for c in 0..w {
                self.t[r * w + c] -= factor * self.t[pr * w + c];
            }
        }
        self.basis[pr] = pc;
    }

    /// Minimizes the objective row. Returns false if unbounded.
    fn run(&mut self, allowed_cols: usize) -> bool {
        loop {
            // Bland: smallest column index with negative reduced cost.
            let mut enter = None;
            for c in 0..allowed_cols {
                if self.at(self.m, c) < -self.eps {
                    enter = Some(c);
                    break;
                }
            }
            let Some(pc) = enter else { return true };
            // Ratio test; Bland tie-break on smallest basis index.
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.m {
                let a = self.at(r, pc);
                if a > self.eps {
                    let ratio = self.at(r, self.n) / a;
                    match best {
                        None => best = Some((ratio, self.basis[r], r)),
                        Some((br, bi, _)) => {
                            if ratio < br - self.eps
                                || (ratio < br + self.eps && self.basis[r] < bi)
                            {
                                best = Some((ratio, self.basis[r], r));
                            }
                        }
                    }
                }
            }
            let Some((_, _, pr)) = best else { return false };
            self.pivot(pr, pc);
        }
    }
}

/// Builds the phase-1 tableau for Aλ = b (λ over `n` columns given by
/// `col(j, i)` = entry of row i, column j), with artificials basic.
fn phase1(
    m: usize,
    n: usize,
    col: impl Fn(usize, usize) -> f64,
    b: &[f64],
    eps: f64,
) -> Tableau {
    let total = n + m;
    let w = total + 1;
    let mut t = vec![0.0; (m + 1) * w];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * w + j] = flip * col(j, i);
        }
        t[i * w + n + i] = 1.0;
        t[i * w + total] = flip * b[i];
    }
    // Objective: sum of artificials, expressed in non-basic terms.
    for j in 0..total + 1 {
        let mut s = 0.0;
        for i in 0..m {
            s += t[i * w + j];
        }
        let direct = if (n..total).contains(&j) { 1.0 } else { 0.0 };
        t[m * w + j] = direct - s;
    }
    Tableau {
        m,
        n: total,
        t,
        basis: (n..total).collect(),
        eps,
    }
}

fn scale_of(points: &[Vector], x: &Vector) -> f64 {
    let mut s: f64 = 1.0;
    for p in points {
        for c in p.coords() {
            s = s.max(c.abs());
        }
    }
    for c in x.coords() {
        s = s.max(c.abs());
    }
    s
}

/// Is `x` in the convex hull of `points`, within absolute slack `tol`?
pub(crate) fn in_hull(points: &[Vector], x: &Vector, tol: f64) -> bool {
    if points.is_empty() {
        return false;
    }
    let d = x.dim();
    let m = d + 1;
    let n = points.len();
    let scale = scale_of(points, x);
    let eps = 1e-12 * scale.max(1.0);
    let col = |j: usize, i: usize| if i < d { points[j].get(i) } else { 1.0 };
    let mut b = x.coords().to_vec();
    b.push(1.0);
    let mut tab = phase1(m, n, col, &b, eps);
    if !tab.run(tab.n) {
        return false;
    }
    let resid = -tab.at(m, tab.n);
    resid.abs() <= tol.max(1e-9 * scale.max(1.0))
}

/// Gauge of the convex hull of `points` at `x`: min Σλ with Σλ·p_j = x.
/// Returns `None` when `x` is not in the cone of the points (cannot happen
/// when the hull has the origin in its interior).
pub(crate) fn gauge_lp(points: &[Vector], x: &Vector) -> Option<f64> {
    if points.is_empty() {
        return None;
    }
    let d = x.dim();
    let n = points.len();
    let scale = scale_of(points, x);
    let eps = 1e-12 * scale.max(1.0);
    if x.coords().iter().all(|c| *c == 0.0) {
        return Some(0.0);
    }
    let col = |j: usize, i: usize| points[j].get(i);
    let b = x.coords().to_vec();
    let mut tab = phase1(d, n, col, &b, eps);
    if !tab.run(tab.n) {
        return None;
    }
    if -tab.at(d, tab.n) > 1e-9 * scale.max(1.0) {
        return None; // infeasible: x outside the cone
    }
    // Phase 2: cost 1 on every original column. Rebuild the objective row in
    // reduced form: c_j - Σ_{basic i} c_{basis(i)} · t_{ij}.
    let w = tab.n + 1;
    let cost = |j: usize| if j < n { 1.0 } else { 0.0 };
    for j in 0..w {
        let mut red = if j < tab.n { cost(j) } else { 0.0 };
        for i in 0..d {
            let cb = cost(tab.basis[i]);
            if cb != 0.0 {
                red -= cb * tab.t[i * w + j];
            }
        }
        tab.t[d * w + j] = if j < tab.n { red } else { -red };
    }
    // Artificials stay out of the basis: only original columns may enter.
    if !tab.run(n) {
        return None;
    }
    let mut obj = 0.0;
    for i in 0..d {
        if tab.basis[i] < n {
            obj += tab.at(i, tab.n);
        }
    }
    Some(obj.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn hull_membership_3d() {
        // Unit simplex corners plus the opposite octant reflections: a
        // cross-polytope, membership |x|+|y|+|z| <= 1.
        let pts: Vec<Vector> = (0..3)
            .flat_map(|i| {
                let mut a = [0.0; 3];
                a[i] = 1.0;
                let mut b = [0.0; 3];
                b[i] = -1.0;
                [v(&a), v(&b)]
            })
            .collect();
        assert!(in_hull(&pts, &v(&[0.2, 0.3, -0.4]), 1e-9));
        assert!(in_hull(&pts, &v(&[1.0, 0.0, 0.0]), 1e-9));
        assert!(!in_hull(&pts, &v(&[0.5, 0.5, 0.5]), 1e-9));
    }

    #[test]
    fn gauge_lp_matches_l1_norm() {
        let pts: Vec<Vector> = (0..3)
            .flat_map(|i| {
                let mut a = [0.0; 3];
                a[i] = 1.0;
                let mut b = [0.0; 3];
                b[i] = -1.0;
                [v(&a), v(&b)]
            })
            .collect();
        let x = v(&[0.3, -0.2, 0.1]);
        let g = gauge_lp(&pts, &x).unwrap();
        assert!((g - 0.6).abs() < 1e-9, "gauge {g}");
        assert_eq!(gauge_lp(&pts, &v(&[0.0, 0.0, 0.0])).unwrap(), 0.0);
    }
}
