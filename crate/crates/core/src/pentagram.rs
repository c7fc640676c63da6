//! The pentagram map T and its factorization T = alpha ∘ beta.
//!
//! T is implemented three ways: on vertices (intersecting consecutive
//! short diagonals), on corner cross-ratios, and on recurrence
//! coefficients. The three routes commute with the chart measurements;
//! the vertex labelling of the image is fixed once ("right" scheme) so
//! the coordinate formulas align.

use crate::error::{Error, Result};
use crate::polygon::{ABCoords, CornerCoords, TwistedPolygon};
use crate::projgeo::{join, meet};
use crate::scalar::{Scalar, DEFAULT_TOL};

/// The scale factors of the beta map, stored without taking the final
/// cube root: lambda_i = cbrt(scale_cubed) * rel_i.
///
/// Invariant: lambda_i lambda_{i+1} lambda_{i+2} = -1/(1 + b_{i-1} a_i).
/// Only ratios lambda_i / lambda_j with i = j mod 3 enter the beta map
/// output, and those are scale-free, so the map itself stays exact in
/// rational mode even when the cube root is irrational.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaFactors<S: Scalar> {
    pub scale_cubed: S,
    pub rel: Vec<S>,
}

impl<S: Scalar> BetaFactors<S> {
    /// The actual lambda sequence; needs the cube root, which may not
    /// exist in exact mode.
    pub fn lambda(&self) -> Result<Vec<S>> {
        let s = self.scale_cubed.cube_root()?;
        Ok(self.rel.iter().map(|r| s.clone() * r.clone()).collect())
    }

    /// lambda_i lambda_{i+1} lambda_{i+2}, exactly.
    pub fn triple_product(&self, i: usize) -> S {
        let n = self.rel.len();
        self.scale_cubed.clone()
            * self.rel[i % n].clone()
            * self.rel[(i + 1) % n].clone()
            * self.rel[(i + 2) % n].clone()
    }

    /// lambda_i / lambda_j, exact whenever i = j mod 3 makes the scale
    /// cancel — which is the only way the beta map uses it.
    pub fn ratio(&self, i: usize, j: usize) -> S {
        let n = self.rel.len();
        self.rel[i % n].clone() / self.rel[j % n].clone()
    }
}

/// Vertex-space pentagram map: vertex i of the image is the intersection
/// of the short diagonals (v_{i-1}, v_{i+1}) and (v_i, v_{i+2}). The
/// monodromy is unchanged.
pub fn pentagram_vertices<S: Scalar>(p: &TwistedPolygon<S>) -> Result<TwistedPolygon<S>> {
    let n = p.n() as i64;
    let mut verts = Vec::with_capacity(p.n());
    for i in 0..n {
        let d1 = join(&p.vertex(i - 1), &p.vertex(i + 1))
            .map_err(|_| Error::DegenerateDiagonals(i as usize))?;
        let d2 = join(&p.vertex(i), &p.vertex(i + 2))
            .map_err(|_| Error::DegenerateDiagonals(i as usize))?;
        let w = meet(&d1, &d2).map_err(|_| Error::DegenerateDiagonals(i as usize))?;
        verts.push(w.normalized());
    }
    TwistedPolygon::new(verts, p.monodromy().clone()).map_err(|e| match e {
        Error::DegenerateConfiguration(i) => Error::LostGenericity(i),
        e => e,
    })
}

/// T in the corner chart:
/// x_i -> x_i (1 - x_{i-1} y_{i-1}) / (1 - x_{i+1} y_{i+1}),
/// y_i -> y_{i+1} (1 - x_{i+2} y_{i+2}) / (1 - x_i y_i).
pub fn pentagram_in_corner<S: Scalar>(c: &CornerCoords<S>) -> Result<CornerCoords<S>> {
    let n = c.n;
    let idx = |k: i64| k.rem_euclid(n as i64) as usize;
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let di = S::one() - c.x[i].clone() * c.y[i].clone();
        if di.tol_zero(DEFAULT_TOL) {
            return Err(Error::MapSingularity(i));
        }
        d.push(di);
    }
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n as i64 {
        x.push(c.x[idx(i)].clone() * d[idx(i - 1)].clone() / d[idx(i + 1)].clone());
        y.push(c.y[idx(i + 1)].clone() * d[idx(i + 2)].clone() / d[idx(i)].clone());
    }
    CornerCoords::new(x, y)
}

fn one_plus_ab<S: Scalar>(c: &ABCoords<S>, i: i64) -> Result<S> {
    // 1 + a_{i+1} b_i, the recurring factor of the recurrence-chart map.
    let n = c.n as i64;
    let idx = |k: i64| k.rem_euclid(n) as usize;
    let f = S::one() + c.a[idx(i + 1)].clone() * c.b[idx(i)].clone();
    if f.tol_zero(DEFAULT_TOL) {
        return Err(Error::MapSingularity(idx(i)));
    }
    Ok(f)
}

/// T in the recurrence chart (n = 3m+1 or 3m+2):
/// a_i -> a_{i+2} prod_{k=1..m} (1 + a_{i+3k+2} b_{i+3k+1}) / (1 + a_{i-3k+2} b_{i-3k+1}),
/// b_i -> b_{i-1} prod_{k=1..m} (1 + a_{i-3k} b_{i-3k-1}) / (1 + a_{i+3k} b_{i+3k-1}).
pub fn pentagram_in_ab<S: Scalar>(c: &ABCoords<S>) -> Result<ABCoords<S>> {
    let n = c.n;
    let m = n / 3;
    let idx = |k: i64| k.rem_euclid(n as i64) as usize;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n as i64 {
        let mut ai = c.a[idx(i + 2)].clone();
        let mut bi = c.b[idx(i - 1)].clone();
        for k in 1..=m as i64 {
            ai = ai * one_plus_ab(c, i + 3 * k + 1)? / one_plus_ab(c, i - 3 * k + 1)?;
            bi = bi * one_plus_ab(c, i - 3 * k - 1)? / one_plus_ab(c, i + 3 * k - 1)?;
        }
        a.push(ai);
        b.push(bi);
    }
    ABCoords::new(a, b)
}

/// First factor of T = alpha ∘ beta: a_i -> -b_{i+1}, b_i -> -a_i.
/// Applying it twice shifts indices by one.
pub fn alpha_map<S: Scalar>(c: &ABCoords<S>) -> ABCoords<S> {
    let n = c.n;
    let a = (0..n).map(|i| -c.b[(i + 1) % n].clone()).collect();
    let b = (0..n).map(|i| -c.a[i].clone()).collect();
    ABCoords { n, a, b }
}

/// Cyclic index shift on the recurrence chart: a_i -> a_{i+1} (equal to
/// alpha applied twice).
pub fn shift_ab<S: Scalar>(c: &ABCoords<S>, by: i64) -> ABCoords<S> {
    let n = c.n;
    let idx = |i: usize| ((i as i64 + by).rem_euclid(n as i64)) as usize;
    ABCoords {
        n,
        a: (0..n).map(|i| c.a[idx(i)].clone()).collect(),
        b: (0..n).map(|i| c.b[idx(i)].clone()).collect(),
    }
}

/// Cyclic index shift on the corner chart: x_i -> x_{i+by}.
pub fn shift_corner<S: Scalar>(c: &CornerCoords<S>, by: i64) -> CornerCoords<S> {
    let n = c.n;
    let idx = |i: usize| ((i as i64 + by).rem_euclid(n as i64)) as usize;
    CornerCoords {
        n,
        x: (0..n).map(|i| c.x[idx(i)].clone()).collect(),
        y: (0..n).map(|i| c.y[idx(i)].clone()).collect(),
    }
}

/// Second factor of T: an involution. The scale factors solve the cyclic
/// system lambda_i lambda_{i+1} lambda_{i+2} = -1/(1 + b_{i-1} a_i); the
/// output uses only scale-free ratios of them:
/// a_i -> -(lambda_i / lambda_{i+2}) b_{i-1},
/// b_i -> -(lambda_{i+3} / lambda_{i+1}) a_{i+1}.
pub fn beta_map<S: Scalar>(c: &ABCoords<S>) -> Result<(ABCoords<S>, BetaFactors<S>)> {
    let n = c.n;
    let rhs: Vec<S> = (0..n as i64)
        .map(|i| Ok(-(S::one() / one_plus_ab(c, i - 1)?)))
        .collect::<Result<_>>()?;
    // Solve for ratios only: rel_i = lambda_i / lambda_0 along the 3-step
    // chain, then scale_cubed = lambda_0^3 from the first equation.
    let mut rel = vec![S::one(); n];
    let mut j = 0usize;
    for _ in 0..n - 1 {
        let jn = (j + 3) % n;
        rel[jn] = rel[j].clone() * rhs[(j + 1) % n].clone() / rhs[j].clone();
        j = jn;
    }
    let scale_cubed = rhs[0].clone() / (rel[1].clone() * rel[2].clone());
    let factors = BetaFactors { scale_cubed, rel };
    let a = (0..n)
        .map(|i| -factors.ratio(i, i + 2) * c.b[(i + n - 1) % n].clone())
        .collect();
    let b = (0..n)
        .map(|i| -factors.ratio(i + 3, i + 1) * c.a[(i + 1) % n].clone())
        .collect();
    Ok((ABCoords { n, a, b }, factors))
}

/// Inverse map in the recurrence chart: T = alpha ∘ beta with
/// alpha^2 = shift and beta^2 = id gives
/// T^{-1} = beta ∘ shift^{-1} ∘ alpha.
pub fn pentagram_inverse_in_ab<S: Scalar>(c: &ABCoords<S>) -> Result<ABCoords<S>> {
    let stepped = shift_ab(&alpha_map(c), -1);
    Ok(beta_map(&stepped)?.0)
}

/// Scaling symmetry on the corner chart: (x_i, y_i) -> (t x_i, y_i / t).
pub fn rescale<S: Scalar>(c: &CornerCoords<S>, t: &S) -> Result<CornerCoords<S>> {
    if t.tol_zero(DEFAULT_TOL) {
        return Err(Error::ZeroScale);
    }
    Ok(CornerCoords {
        n: c.n,
        x: c.x.iter().map(|v| v.clone() * t.clone()).collect(),
        y: c.y.iter().map(|v| v.clone() / t.clone()).collect(),
    })
}
