//! Projective-geometric primitives: homogeneous points and lines in the
//! projective plane, 3x3 projective maps, joins/meets and cross-ratios.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, DEFAULT_TOL};

/// Point of the projective plane in homogeneous coordinates.
///
/// Invariant: not all three components zero. Two points are equal
/// projectively iff their coordinate vectors are proportional.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjPoint<S: Scalar> {
    pub h: [S; 3],
}

/// Line of the projective plane in dual homogeneous coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjLine<S: Scalar> {
    pub l: [S; 3],
}

/// Projective transformation as a 3x3 matrix, defined up to scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjMap<S: Scalar> {
    pub m: [[S; 3]; 3],
}

pub fn cross3<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> [S; 3] {
    [
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

pub fn dot3<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> S {
    a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone() + a[2].clone() * b[2].clone()
}

/// 3x3 determinant of three column vectors.
pub fn triple_det<S: Scalar>(a: &[S; 3], b: &[S; 3], c: &[S; 3]) -> S {
    dot3(&cross3(a, b), c)
}

fn is_zero_vec<S: Scalar>(v: &[S; 3], tol: f64) -> bool {
    v.iter().all(|x| x.tol_zero(tol))
}

fn zeros3<S: Scalar>() -> [S; 3] {
    std::array::from_fn(|_| S::zero())
}

fn zeros33<S: Scalar>() -> [[S; 3]; 3] {
    std::array::from_fn(|_| zeros3())
}

impl<S: Scalar> ProjPoint<S> {
    pub fn new(h: [S; 3]) -> Result<Self> {
        if is_zero_vec(&h, DEFAULT_TOL) {
            return Err(Error::InvalidInput("zero homogeneous vector".into()));
        }
        Ok(Self { h })
    }

    pub fn from_ints(a: i64, b: i64, c: i64) -> Self {
        Self {
            h: [S::from_int(a), S::from_int(b), S::from_int(c)],
        }
    }

    /// Point of the affine chart z = 1.
    pub fn from_affine(x: S, y: S) -> Self {
        Self { h: [x, y, S::one()] }
    }

    /// Proportionality test via the three 2x2 minors.
    pub fn same_point(&self, other: &Self, tol: f64) -> bool {
        is_zero_vec(&cross3(&self.h, &other.h), tol)
    }

    /// Scale to unit max-component (float mode drift control). Exact mode
    /// keeps raw triples.
    pub fn normalized(&self) -> Self {
        if S::EXACT {
            return self.clone();
        }
        let mut max = S::zero();
        for x in &self.h {
            if x.abs() > max {
                max = x.abs();
            }
        }
        if max.is_zero() {
            return self.clone();
        }
        Self {
            h: [
                self.h[0].clone() / max.clone(),
                self.h[1].clone() / max.clone(),
                self.h[2].clone() / max,
            ],
        }
    }
}

impl<S: Scalar> ProjLine<S> {
    pub fn new(l: [S; 3]) -> Result<Self> {
        if is_zero_vec(&l, DEFAULT_TOL) {
            return Err(Error::InvalidInput("zero line vector".into()));
        }
        Ok(Self { l })
    }

    pub fn same_line(&self, other: &Self, tol: f64) -> bool {
        is_zero_vec(&cross3(&self.l, &other.l), tol)
    }

    pub fn contains(&self, p: &ProjPoint<S>, tol: f64) -> bool {
        dot3(&self.l, &p.h).tol_zero(tol)
    }
}

/// Line through two distinct points (vector cross product).
pub fn join<S: Scalar>(p: &ProjPoint<S>, q: &ProjPoint<S>) -> Result<ProjLine<S>> {
    let l = cross3(&p.h, &q.h);
    if is_zero_vec(&l, DEFAULT_TOL) {
        return Err(Error::CoincidentPoints);
    }
    Ok(ProjLine { l })
}

/// Intersection point of two distinct lines; dual of [`join`].
pub fn meet<S: Scalar>(l1: &ProjLine<S>, l2: &ProjLine<S>) -> Result<ProjPoint<S>> {
    let h = cross3(&l1.l, &l2.l);
    if is_zero_vec(&h, DEFAULT_TOL) {
        return Err(Error::CoincidentLines);
    }
    Ok(ProjPoint { h })
}

/// Cross-ratio of four affine parameters:
/// (t1-t2)(t3-t4) / ((t1-t3)(t2-t4)).
pub fn cross_ratio<S: Scalar>(t1: &S, t2: &S, t3: &S, t4: &S) -> Result<S> {
    let den = (t1.clone() - t3.clone()) * (t2.clone() - t4.clone());
    if den.tol_zero(DEFAULT_TOL) {
        return Err(Error::DegenerateCrossRatio);
    }
    let num = (t1.clone() - t2.clone()) * (t3.clone() - t4.clone());
    Ok(num / den)
}

/// Cross-ratio of four collinear points, independent of the affine chart.
///
/// Writes p3 = l1 p1 + l2 p2 and p4 = m1 p1 + m2 p2 and returns
/// (l2 m1 - l1 m2) / (l2 m1), which equals [`cross_ratio`] of the slope
/// parameters.
pub fn cross_ratio_points<S: Scalar>(
    p1: &ProjPoint<S>,
    p2: &ProjPoint<S>,
    p3: &ProjPoint<S>,
    p4: &ProjPoint<S>,
) -> Result<S> {
    let base = ProjPoint {
        h: join(p1, p2)?.l,
    }
    .normalized();
    for p in [p3, p4] {
        // Collinearity scales with coordinate magnitudes; normalized()
        // keeps them near 1 in float mode, exact mode tests identically zero.
        let q = p.normalized();
        if !dot3(&base.h, &q.h).tol_zero(1e-6) {
            return Err(Error::NotCollinear);
        }
    }
    let (l1, l2) = decompose_on_basis(&p1.h, &p2.h, &p3.h)?;
    let (m1, m2) = decompose_on_basis(&p1.h, &p2.h, &p4.h)?;
    let den = l2.clone() * m1.clone();
    if den.tol_zero(DEFAULT_TOL) {
        return Err(Error::DegenerateCrossRatio);
    }
    Ok((l2 * m1 - l1 * m2) / den)
}

/// Solve c = l1 a + l2 b for coplanar vectors using the largest 2x2 minor.
fn decompose_on_basis<S: Scalar>(a: &[S; 3], b: &[S; 3], c: &[S; 3]) -> Result<(S, S)> {
    // Pick coordinate pair (i, j) maximizing |a_i b_j - a_j b_i|.
    let mut best: Option<(usize, usize, S)> = None;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let det = a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone();
            let better = match &best {
                None => true,
                Some((_, _, d)) => det.abs().to_f64().abs() > d.abs().to_f64().abs(),
            };
            if better {
                best = Some((i, j, det));
            }
        }
    }
    let (i, j, det) = best.unwrap();
    if det.tol_zero(DEFAULT_TOL) {
        return Err(Error::CoincidentPoints);
    }
    let l1 = (c[i].clone() * b[j].clone() - c[j].clone() * b[i].clone()) / det.clone();
    let l2 = (a[i].clone() * c[j].clone() - a[j].clone() * c[i].clone()) / det;
    Ok((l1, l2))
}

impl<S: Scalar> ProjMap<S> {
    pub fn new(m: [[S; 3]; 3]) -> Result<Self> {
        let map = Self { m };
        if map.det().tol_zero(DEFAULT_TOL) {
            return Err(Error::SingularMap);
        }
        Ok(map)
    }

    pub fn identity() -> Self {
        let mut m = zeros33::<S>();
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = if i == j { S::one() } else { S::zero() };
            }
        }
        Self { m }
    }

    pub fn det(&self) -> S {
        let c0 = [self.m[0][0].clone(), self.m[1][0].clone(), self.m[2][0].clone()];
        let c1 = [self.m[0][1].clone(), self.m[1][1].clone(), self.m[2][1].clone()];
        let c2 = [self.m[0][2].clone(), self.m[1][2].clone(), self.m[2][2].clone()];
        triple_det(&c0, &c1, &c2)
    }

    pub fn apply(&self, p: &ProjPoint<S>) -> ProjPoint<S> {
        ProjPoint {
            h: self.apply_vec(&p.h),
        }
        .normalized()
    }

    pub fn apply_vec(&self, h: &[S; 3]) -> [S; 3] {
        let mut out = zeros3::<S>();
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot3(&self.m[i], h);
        }
        out
    }

    pub fn compose(&self, other: &Self) -> Self {
        let mut m = zeros33::<S>();
        for i in 0..3 {
            for (j, x) in m[i].iter_mut().enumerate() {
                let mut acc = S::zero();
                for k in 0..3 {
                    acc = acc + self.m[i][k].clone() * other.m[k][j].clone();
                }
                *x = acc;
            }
        }
        Self { m }
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.tol_zero(DEFAULT_TOL) {
            return Err(Error::SingularMap);
        }
        let m = &self.m;
        let cof = |r1: usize, c1: usize, r2: usize, c2: usize| {
            m[r1][c1].clone() * m[r2][c2].clone() - m[r1][c2].clone() * m[r2][c1].clone()
        };
        // Adjugate transposed over the determinant.
        let adj = [
            [cof(1, 1, 2, 2), -cof(0, 1, 2, 2), cof(0, 1, 1, 2)],
            [-cof(1, 0, 2, 2), cof(0, 0, 2, 2), -cof(0, 0, 1, 2)],
            [cof(1, 0, 2, 1), -cof(0, 0, 2, 1), cof(0, 0, 1, 1)],
        ];
        let mut out = zeros33::<S>();
        for i in 0..3 {
            for (j, x) in out[i].iter_mut().enumerate() {
                *x = adj[i][j].clone() / d.clone();
            }
        }
        Ok(Self { m: out })
    }

    /// Scale the matrix to determinant one. Requires an exact cube root in
    /// rational mode.
    pub fn unimodular(&self) -> Result<Self> {
        let c = self.det().cube_root()?;
        if c.tol_zero(DEFAULT_TOL) {
            return Err(Error::SingularMap);
        }
        let mut m = zeros33::<S>();
        for i in 0..3 {
            for (j, x) in m[i].iter_mut().enumerate() {
                *x = self.m[i][j].clone() / c.clone();
            }
        }
        Ok(Self { m })
    }

    /// Equivalence up to scale.
    pub fn same_map(&self, other: &Self, tol: f64) -> bool {
        // Find a reference entry pair and compare all cross products.
        for i in 0..3 {
            for j in 0..3 {
                if !self.m[i][j].tol_zero(tol) && !other.m[i][j].tol_zero(tol) {
                    for r in 0..3 {
                        for c in 0..3 {
                            let lhs = self.m[r][c].clone() * other.m[i][j].clone();
                            let rhs = other.m[r][c].clone() * self.m[i][j].clone();
                            if !lhs.tol_eq(&rhs, tol) {
                                return false;
                            }
                        }
                    }
                    return true;
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use num_traits::Zero;

    fn rp(a: i64, b: i64, c: i64) -> ProjPoint<Rat> {
        ProjPoint::from_ints(a, b, c)
    }

    #[test]
    fn cross_ratio_basics() {
        let r = |n: i64| Rat::from_int(n);
        assert_eq!(
            cross_ratio(&r(0), &r(1), &r(2), &r(3)).unwrap(),
            Rat::from_ratio(1, 4)
        );
        // (a,b,b,c): numerator equals denominator.
        assert_eq!(cross_ratio(&r(5), &r(2), &r(2), &r(9)).unwrap(), Rat::from_int(1));
        assert_eq!(
            cross_ratio(&r(0), &r(1), &r(3), &r(4)).unwrap(),
            Rat::from_ratio(1, 9)
        );
        assert_eq!(
            cross_ratio(&r(1), &r(2), &r(1), &r(4)),
            Err(Error::DegenerateCrossRatio)
        );
    }

    #[test]
    fn cross_ratio_points_matches_scalar_case() {
        // Affine parameters 0,1,2,3 on the line y = x.
        let p = |t: i64| rp(t, t, 1);
        let v = cross_ratio_points(&p(0), &p(1), &p(2), &p(3)).unwrap();
        assert_eq!(v, Rat::from_ratio(1, 4));
    }

    #[test]
    fn cross_ratio_projective_invariance() {
        let pts = [rp(0, 0, 1), rp(1, 2, 1), rp(2, 4, 1), rp(5, 10, 1)];
        let v = cross_ratio_points(&pts[0], &pts[1], &pts[2], &pts[3]).unwrap();
        let m = ProjMap::new([
            [Rat::from_int(2), Rat::from_int(1), Rat::from_int(0)],
            [Rat::from_int(-1), Rat::from_int(3), Rat::from_int(1)],
            [Rat::from_int(1), Rat::from_int(0), Rat::from_int(4)],
        ])
        .unwrap();
        let im: Vec<_> = pts.iter().map(|p| m.apply(p)).collect();
        let w = cross_ratio_points(&im[0], &im[1], &im[2], &im[3]).unwrap();
        assert_eq!(v, w);
    }

    #[test]
    fn cross_ratio_rejects_noncollinear() {
        let e = cross_ratio_points(&rp(1, 0, 0), &rp(0, 1, 0), &rp(0, 0, 1), &rp(1, 1, 1));
        assert_eq!(e, Err(Error::NotCollinear));
    }

    #[test]
    fn join_meet_duality() {
        let p = rp(1, 0, 0);
        let q = rp(0, 1, 0);
        let l = join(&p, &q).unwrap();
        assert!(l.same_line(&ProjLine::new([Rat::zero(), Rat::zero(), Rat::from_int(1)]).unwrap(), 0.0));
        let p2 = rp(2, 0, 0);
        assert_eq!(join(&p, &p2), Err(Error::CoincidentPoints));

        let r = rp(1, 1, 1);
        let back = meet(&join(&p, &q).unwrap(), &join(&p, &r).unwrap()).unwrap();
        assert!(back.same_point(&p, 0.0));
    }

    #[test]
    fn triple_det_identity() {
        // (a x b) x (b x c) = det(a,b,c) b for random rational triples.
        use crate::sampling::SeededRng;
        let mut rng = SeededRng::new(7);
        for _ in 0..20 {
            let a = [rng.rat(9), rng.rat(9), rng.rat(9)];
            let b = [rng.rat(9), rng.rat(9), rng.rat(9)];
            let c = [rng.rat(9), rng.rat(9), rng.rat(9)];
            let lhs = cross3(&cross3(&a, &b), &cross3(&b, &c));
            let d = triple_det(&a, &b, &c);
            for i in 0..3 {
                assert_eq!(lhs[i], d.clone() * b[i].clone());
            }
        }
    }

    #[test]
    fn map_apply_and_compose() {
        let id = ProjMap::<Rat>::identity();
        let p = rp(3, -2, 5);
        assert!(id.apply(&p).same_point(&p, 0.0));
        let diag = ProjMap::new([
            [Rat::from_int(2), Rat::zero(), Rat::zero()],
            [Rat::zero(), Rat::from_int(3), Rat::zero()],
            [Rat::zero(), Rat::zero(), Rat::from_int(1)],
        ])
        .unwrap();
        let q = diag.apply(&p);
        assert!(q.same_point(&rp(6, -6, 5), 0.0));
        let inv = diag.inverse().unwrap();
        assert!(inv.compose(&diag).same_map(&ProjMap::identity(), 0.0));
    }
}
