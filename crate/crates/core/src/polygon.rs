//! Twisted polygons and the two coordinate charts on their moduli space.
//!
//! A twisted n-gon is stored as one period of vertices plus the monodromy.
//! Two charts are provided: corner cross-ratios (x_i, y_i), defined for
//! every n, and recurrence coefficients (a_i, b_i) of the canonical lift,
//! defined when n is not divisible by 3.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::projgeo::{cross_ratio_points, join, meet, triple_det, ProjMap, ProjPoint};
use crate::sampling::SeededRng;
use crate::scalar::{Rat, Scalar, DEFAULT_TOL};

/// One period of a twisted n-gon: vertices v_0..v_{n-1} and the monodromy
/// M with v_{k+n} = M(v_k).
///
/// Invariant: every three consecutive vertices (extended through M) are in
/// general position.
#[derive(Debug, Clone)]
pub struct TwistedPolygon<S: Scalar> {
    n: usize,
    vertices: Vec<ProjPoint<S>>,
    monodromy: ProjMap<S>,
}

/// Corner cross-ratio chart: the 2n numbers (x_i, y_i).
#[derive(Debug, Clone, PartialEq)]
pub struct CornerCoords<S: Scalar> {
    pub n: usize,
    pub x: Vec<S>,
    pub y: Vec<S>,
}

/// Recurrence-coefficient chart: V_{i+3} = a_i V_{i+2} + b_i V_{i+1} + V_i
/// for the canonical (determinant-one) lift. Only defined when
/// gcd(n, 3) = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ABCoords<S: Scalar> {
    pub n: usize,
    pub a: Vec<S>,
    pub b: Vec<S>,
}

/// Canonical lift: vertex representatives with all consecutive-triple
/// determinants equal to one, along with the scale factors that produced
/// them.
#[derive(Debug, Clone)]
pub struct LiftSolution<S: Scalar> {
    pub lifted: Vec<[S; 3]>,
    pub t: Vec<S>,
}

/// For n divisible by 3 the determinant-one normalization exists but is
/// not monodromy-periodic; the monodromy acts by M(V_i) = t_i V_{i+n} with
/// t_i 3-periodic. The pair (alpha, beta) = (t_1, t_2) is a projective
/// invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstruction<S: Scalar> {
    pub alpha: S,
    pub beta: S,
    /// Full period t_0..t_{n-1}; satisfies t_i t_{i+1} t_{i+2} = 1.
    pub t: Vec<S>,
}

impl<S: Scalar> CornerCoords<S> {
    pub fn new(x: Vec<S>, y: Vec<S>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 3 {
            return Err(Error::InvalidInput("need matching x/y of length >= 3".into()));
        }
        Ok(Self { n: x.len(), x, y })
    }

    /// First index with x_i y_i = 1, where the map has a pole.
    pub fn singular_index(&self, tol: f64) -> Option<usize> {
        (0..self.n).find(|&i| {
            (self.x[i].clone() * self.y[i].clone() - S::one()).tol_zero(tol)
        })
    }

    /// Compare up to cyclic index shift; returns the matching shift.
    pub fn equal_up_to_shift(&self, other: &Self, tol: f64) -> Option<usize> {
        if self.n != other.n {
            return None;
        }
        let n = self.n;
        (0..n).find(|&s| {
            (0..n).all(|i| {
                self.x[i].tol_eq(&other.x[(i + s) % n], tol)
                    && self.y[i].tol_eq(&other.y[(i + s) % n], tol)
            })
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "x": self.x.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
            "y": self.y.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
        })
    }
}

impl<S: Scalar> ABCoords<S> {
    pub fn new(a: Vec<S>, b: Vec<S>) -> Result<Self> {
        let n = a.len();
        if b.len() != n || n < 4 {
            return Err(Error::InvalidInput("need matching a/b of length >= 4".into()));
        }
        if n % 3 == 0 {
            return Err(Error::DivisibleByThree);
        }
        Ok(Self { n, a, b })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a": self.a.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
            "b": self.b.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Solve the cyclic system z_i z_{i+1} z_{i+2} = c_i (indices mod n,
/// gcd(n,3) = 1). Unique real solution: the chain i -> i+3 determines all
/// ratios z_i / z_0, and the first equation fixes z_0 by a cube root.
pub fn solve_cyclic_triple<S: Scalar>(c: &[S]) -> Result<Vec<S>> {
    let n = c.len();
    if n % 3 == 0 {
        return Err(Error::DivisibleByThree);
    }
    for (i, ci) in c.iter().enumerate() {
        if ci.tol_zero(DEFAULT_TOL) {
            return Err(Error::DegenerateConfiguration(i));
        }
    }
    // f_i = z_i / z_0 along the 3-step cycle: z_{j+3} = z_j c_{j+1} / c_j.
    let mut f = vec![S::one(); n];
    let mut j = 0usize;
    for _ in 0..n - 1 {
        let jn = (j + 3) % n;
        f[jn] = f[j].clone() * c[(j + 1) % n].clone() / c[j].clone();
        j = jn;
    }
    let z0 = (c[0].clone() / (f[1].clone() * f[2].clone())).cube_root()?;
    Ok(f.into_iter().map(|fi| z0.clone() * fi).collect())
}

impl<S: Scalar> TwistedPolygon<S> {
    pub fn new(vertices: Vec<ProjPoint<S>>, monodromy: ProjMap<S>) -> Result<Self> {
        let n = vertices.len();
        if n < 4 {
            return Err(Error::InvalidInput("need at least 4 vertices".into()));
        }
        let p = Self {
            n,
            vertices,
            monodromy,
        };
        for k in 0..n {
            let a = p.vertex(k as i64).normalized();
            let b = p.vertex(k as i64 + 1).normalized();
            let c = p.vertex(k as i64 + 2).normalized();
            if triple_det(&a.h, &b.h, &c.h).tol_zero(DEFAULT_TOL) {
                return Err(Error::DegenerateConfiguration(k));
            }
        }
        Ok(p)
    }

    /// Closed polygon: monodromy is the identity.
    pub fn closed(vertices: Vec<ProjPoint<S>>) -> Result<Self> {
        Self::new(vertices, ProjMap::identity())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[ProjPoint<S>] {
        &self.vertices
    }

    pub fn monodromy(&self) -> &ProjMap<S> {
        &self.monodromy
    }

    pub fn is_closed(&self, tol: f64) -> bool {
        self.monodromy.same_map(&ProjMap::identity(), tol)
    }

    /// Vertex at any integer index, extended by the monodromy.
    pub fn vertex(&self, k: i64) -> ProjPoint<S> {
        let n = self.n as i64;
        let r = k.rem_euclid(n) as usize;
        let mut p = self.vertices[r].clone();
        let mut wraps = (k - k.rem_euclid(n)) / n;
        while wraps > 0 {
            p = self.monodromy.apply(&p);
            wraps -= 1;
        }
        if wraps < 0 {
            let inv = self.monodromy.inverse().expect("validated at construction");
            while wraps < 0 {
                p = inv.apply(&p);
                wraps += 1;
            }
        }
        p
    }

    /// Apply a projective transformation to every vertex; the monodromy
    /// conjugates.
    pub fn transform(&self, g: &ProjMap<S>) -> Result<Self> {
        let vertices = self.vertices.iter().map(|v| g.apply(v)).collect();
        let monodromy = g.compose(&self.monodromy).compose(&g.inverse()?);
        Self::new(vertices, monodromy)
    }

    /// Corner cross-ratio chart. x_i lives on the line (v_{i-2}, v_{i-1}),
    /// cut by the sides (v_i, v_{i+1}) and (v_{i+1}, v_{i+2}); y_i lives
    /// on the line (v_{i+1}, v_{i+2}) dually.
    pub fn corner_coords(&self) -> Result<CornerCoords<S>> {
        let mut x = Vec::with_capacity(self.n);
        let mut y = Vec::with_capacity(self.n);
        for i in 0..self.n as i64 {
            let v = |k: i64| self.vertex(i + k);
            let (vm2, vm1, v0, v1, v2) = (v(-2), v(-1), v(0), v(1), v(2));
            let res = (|| -> Result<(S, S)> {
                let back = join(&vm2, &vm1)?;
                let fwd = join(&v1, &v2)?;
                let side = join(&v0, &v1)?;
                let side2 = join(&vm1, &v0)?;
                // Meets of near-parallel lines come out with tiny entries;
                // normalize so the degeneracy tolerances are scale-free.
                let p3 = meet(&back, &side)?.normalized();
                let p4 = meet(&back, &fwd)?.normalized();
                let xi = cross_ratio_points(&vm2, &vm1, &p3, &p4)?;
                let q2 = meet(&side2, &fwd)?.normalized();
                let yi = cross_ratio_points(&p4, &q2, &v1, &v2)?;
                Ok((xi, yi))
            })();
            match res {
                Ok((xi, yi)) => {
                    x.push(xi);
                    y.push(yi);
                }
                Err(_) => return Err(Error::DegenerateConfiguration(i as usize)),
            }
        }
        CornerCoords::new(x, y)
    }

    /// Raw lifts of vertices at indices 0..count-1 using the
    /// determinant-one representative of the monodromy for the extension.
    fn raw_lifts(&self, count: usize) -> Result<Vec<[S; 3]>> {
        let m = self.monodromy.unimodular()?;
        let mut out: Vec<[S; 3]> = Vec::with_capacity(count);
        for k in 0..count {
            if k < self.n {
                out.push(self.vertices[k].h.clone());
            } else {
                let prev = out[k - self.n].clone();
                out.push(m.apply_vec(&prev));
            }
        }
        Ok(out)
    }

    /// Unique vertex lift with det(V_i, V_{i+1}, V_{i+2}) = 1 for all i,
    /// compatible with the monodromy. Needs gcd(n, 3) = 1.
    pub fn canonical_lift(&self) -> Result<LiftSolution<S>> {
        if self.n % 3 == 0 {
            return Err(Error::DivisibleByThree);
        }
        let raw = self.raw_lifts(self.n + 2)?;
        let mut c = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let d = triple_det(&raw[i], &raw[i + 1], &raw[i + 2]);
            if d.tol_zero(DEFAULT_TOL) {
                return Err(Error::DegenerateConfiguration(i));
            }
            c.push(S::one() / d);
        }
        let t = solve_cyclic_triple(&c)?;
        let lifted = raw[..self.n]
            .iter()
            .zip(&t)
            .map(|(v, ti)| {
                [
                    ti.clone() * v[0].clone(),
                    ti.clone() * v[1].clone(),
                    ti.clone() * v[2].clone(),
                ]
            })
            .collect();
        Ok(LiftSolution { lifted, t })
    }

    /// Recurrence coefficients of the canonical lift.
    pub fn ab_coords(&self) -> Result<ABCoords<S>> {
        let lift = self.canonical_lift()?;
        let m = self.monodromy.unimodular()?;
        // Extend the canonical lift through the monodromy: three extra
        // vertices are enough for the window i..i+3.
        let mut v = lift.lifted;
        for k in 0..3 {
            let w = m.apply_vec(&v[k]);
            v.push(w);
        }
        let mut a = Vec::with_capacity(self.n);
        let mut b = Vec::with_capacity(self.n);
        for i in 0..self.n {
            a.push(triple_det(&v[i], &v[i + 1], &v[i + 3]));
            b.push(triple_det(&v[i], &v[i + 3], &v[i + 2]));
        }
        ABCoords::new(a, b)
    }

    /// The monodromy obstruction for n divisible by 3: normalize dets to
    /// one along the bi-infinite sequence (always possible, no cube root)
    /// and read off the 3-periodic scalars from M(V_i) = t_i V_{i+n}.
    pub fn obstruction(&self) -> Result<Obstruction<S>> {
        if self.n % 3 != 0 {
            return Err(Error::NotDivisibleByThree);
        }
        let m = self.monodromy.unimodular()?;
        let raw = self.raw_lifts(2 * self.n + 2)?;
        // s_k scales: fix s_0 = s_1 = 1 and solve forward so that every
        // consecutive-triple determinant is one.
        let mut s = vec![S::one(); raw.len()];
        for i in 0..raw.len() - 2 {
            let d = triple_det(&raw[i], &raw[i + 1], &raw[i + 2]);
            if d.tol_zero(DEFAULT_TOL) {
                return Err(Error::DegenerateConfiguration(i));
            }
            s[i + 2] = S::one() / (d * s[i].clone() * s[i + 1].clone());
        }
        let w = |k: usize| -> [S; 3] {
            [
                s[k].clone() * raw[k][0].clone(),
                s[k].clone() * raw[k][1].clone(),
                s[k].clone() * raw[k][2].clone(),
            ]
        };
        // t_i from M W_i = t_i W_{i+n}, read off the largest component.
        let mut t = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let lhs = m.apply_vec(&w(i));
            let rhs = w(i + self.n);
            let mut best = 0usize;
            for j in 1..3 {
                if rhs[j].abs().to_f64().abs() > rhs[best].abs().to_f64().abs() {
                    best = j;
                }
            }
            if rhs[best].tol_zero(DEFAULT_TOL) {
                return Err(Error::DegenerateConfiguration(i));
            }
            t.push(lhs[best].clone() / rhs[best].clone());
        }
        Ok(Obstruction {
            alpha: t[1].clone(),
            beta: t[2].clone(),
            t,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mode = if S::EXACT { "rational" } else { "float" };
        serde_json::json!({
            "n": self.n,
            "mode": mode,
            "vertices": self
                .vertices
                .iter()
                .map(|v| v.h.iter().map(|c| c.to_json()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "monodromy": self
                .monodromy
                .m
                .iter()
                .map(|row| row.iter().map(|c| c.to_json()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInput(format!("polygon json: {m}"));
        let n = v["n"].as_u64().ok_or_else(|| bad("missing n"))? as usize;
        let verts = v["vertices"].as_array().ok_or_else(|| bad("missing vertices"))?;
        if verts.len() != n {
            return Err(bad("vertex count mismatch"));
        }
        let parse3 = |row: &serde_json::Value| -> Result<[S; 3]> {
            let arr = row.as_array().ok_or_else(|| bad("vertex not an array"))?;
            if arr.len() != 3 {
                return Err(bad("vertex arity"));
            }
            Ok([
                S::from_json(&arr[0])?,
                S::from_json(&arr[1])?,
                S::from_json(&arr[2])?,
            ])
        };
        let vertices = verts
            .iter()
            .map(|r| Ok(ProjPoint { h: parse3(r)? }))
            .collect::<Result<Vec<_>>>()?;
        let mrows = v["monodromy"].as_array().ok_or_else(|| bad("missing monodromy"))?;
        if mrows.len() != 3 {
            return Err(bad("monodromy shape"));
        }
        let m = [
            parse3(&mrows[0])?,
            parse3(&mrows[1])?,
            parse3(&mrows[2])?,
        ];
        Self::new(vertices, ProjMap::new(m)?)
    }
}

/// Rebuild a polygon from recurrence coefficients: iterate the recurrence
/// from a determinant-one seed frame; the monodromy carries the seed frame
/// to the frame n steps later.
pub fn reconstruct_from_ab<S: Scalar>(
    c: &ABCoords<S>,
    seed: &[[S; 3]; 3],
) -> Result<TwistedPolygon<S>> {
    let n = c.n;
    let d0 = triple_det(&seed[0], &seed[1], &seed[2]);
    if !(d0.clone() - S::one()).tol_zero(1e-6) {
        return Err(Error::InvalidInput("seed frame must have determinant 1".into()));
    }
    let mut v: Vec<[S; 3]> = seed.to_vec();
    for i in 0..n {
        let mut w = [S::zero(), S::zero(), S::zero()];
        for k in 0..3 {
            w[k] = c.a[i].clone() * v[i + 2][k].clone()
                + c.b[i].clone() * v[i + 1][k].clone()
                + v[i][k].clone();
        }
        if triple_det(&v[i + 1], &v[i + 2], &w).tol_zero(DEFAULT_TOL) {
            return Err(Error::DegenerateRecurrence(i));
        }
        v.push(w);
    }
    // M sends columns (V_0, V_1, V_2) to (V_n, V_{n+1}, V_{n+2}).
    let col = |vs: &[[S; 3]], j: usize| vs[j].clone();
    let frame = |v0: [S; 3], v1: [S; 3], v2: [S; 3]| -> [[S; 3]; 3] {
        let mut m = [
            [S::zero(), S::zero(), S::zero()],
            [S::zero(), S::zero(), S::zero()],
            [S::zero(), S::zero(), S::zero()],
        ];
        for r in 0..3 {
            m[r][0] = v0[r].clone();
            m[r][1] = v1[r].clone();
            m[r][2] = v2[r].clone();
        }
        m
    };
    let f0 = ProjMap::new(frame(col(&v, 0), col(&v, 1), col(&v, 2)))?;
    let f1 = ProjMap::new(frame(col(&v, n), col(&v, n + 1), col(&v, n + 2)))?;
    let m = f1.compose(&f0.inverse()?);
    let vertices = v[..n].iter().map(|h| ProjPoint { h: h.clone() }).collect();
    TwistedPolygon::new(vertices, m)
}

/// Identity seed frame for [`reconstruct_from_ab`].
pub fn identity_seed<S: Scalar>() -> [[S; 3]; 3] {
    [
        [S::one(), S::zero(), S::zero()],
        [S::zero(), S::one(), S::zero()],
        [S::zero(), S::zero(), S::one()],
    ]
}

/// Chart change: x_i = a_{i-2} / (b_{i-2} b_{i-1}),
/// y_i = -b_{i-1} / (a_{i-2} a_{i-1}).
pub fn corner_from_ab<S: Scalar>(c: &ABCoords<S>) -> Result<CornerCoords<S>> {
    let n = c.n;
    for i in 0..n {
        if c.a[i].tol_zero(DEFAULT_TOL) || c.b[i].tol_zero(DEFAULT_TOL) {
            return Err(Error::ZeroCoefficient(i));
        }
    }
    let idx = |k: i64| k.rem_euclid(n as i64) as usize;
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n as i64 {
        let (am2, am1) = (c.a[idx(i - 2)].clone(), c.a[idx(i - 1)].clone());
        let (bm2, bm1) = (c.b[idx(i - 2)].clone(), c.b[idx(i - 1)].clone());
        x.push(am2.clone() / (bm2 * bm1.clone()));
        y.push(-bm1 / (am2 * am1));
    }
    CornerCoords::new(x, y)
}

/// Inverse chart change: solve the cyclic triple-product system
/// b_{i-2} b_{i-1} b_i = -1 / (x_i x_{i+1} y_i), then
/// a_j = x_{j+2} b_j b_{j+1}.
pub fn ab_from_corner<S: Scalar>(c: &CornerCoords<S>) -> Result<ABCoords<S>> {
    let n = c.n;
    if n % 3 == 0 {
        return Err(Error::DivisibleByThree);
    }
    for i in 0..n {
        if c.x[i].tol_zero(DEFAULT_TOL) || c.y[i].tol_zero(DEFAULT_TOL) {
            return Err(Error::ZeroCoordinate(i));
        }
    }
    // Shift so equation j reads b_j b_{j+1} b_{j+2} = rhs_j.
    let rhs: Vec<S> = (0..n)
        .map(|j| {
            let i = (j + 2) % n;
            -S::one() / (c.x[i].clone() * c.x[(i + 1) % n].clone() * c.y[i].clone())
        })
        .collect();
    let b = solve_cyclic_triple(&rhs)?;
    let a: Vec<S> = (0..n)
        .map(|j| c.x[(j + 2) % n].clone() * b[j].clone() * b[(j + 1) % n].clone())
        .collect();
    ABCoords::new(a, b)
}

/// Twisted polygon whose vertices march along the convex curve
/// (s^u, t^u) in the positive quadrant; monodromy is the diagonal map
/// (x, y) -> (eigen_a x, eigen_b y). Every such polygon stays convex under
/// arbitrary iteration of the map.
pub fn generate_universally_convex(
    n: usize,
    eigen_a: f64,
    eigen_b: f64,
    base: (f64, f64),
) -> Result<TwistedPolygon<f64>> {
    if !(eigen_a > 0.0 && eigen_a < 1.0 && eigen_b > 1.0) {
        return Err(Error::InvalidEigenvalues);
    }
    if !(base.0 > 0.0 && base.1 > 0.0) {
        return Err(Error::InvalidParameters);
    }
    let vertices = (0..n)
        .map(|i| {
            let f = i as f64 / n as f64;
            ProjPoint::from_affine(eigen_a.powf(f) * base.0, eigen_b.powf(f) * base.1)
        })
        .collect();
    let m = ProjMap::new([
        [eigen_a, 0.0, 0.0],
        [0.0, eigen_b, 0.0],
        [0.0, 0.0, 1.0],
    ])?;
    TwistedPolygon::new(vertices, m)
}

/// Twisted polygon on the logarithmic spiral r = d^{phi/theta}; one
/// period advances the angle by theta and the radius by the factor d, so
/// the monodromy is the rotation-dilation spiral motion.
pub fn generate_spiral(n: usize, theta: f64, d: f64) -> Result<TwistedPolygon<f64>> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2 && d > 1.0) {
        return Err(Error::InvalidParameters);
    }
    let vertices = (0..n)
        .map(|i| {
            let f = i as f64 / n as f64;
            let phi = f * theta;
            let r = d.powf(f);
            ProjPoint::from_affine(r * phi.cos(), r * phi.sin())
        })
        .collect();
    let (c, s) = (theta.cos(), theta.sin());
    let m = ProjMap::new([
        [d * c, -d * s, 0.0],
        [d * s, d * c, 0.0],
        [0.0, 0.0, 1.0],
    ])?;
    TwistedPolygon::new(vertices, m)
}

/// Equivalence of twisted polygons under a global projective map:
/// decided by comparing corner coordinates up to cyclic shift, which are a
/// complete invariant for generic polygons.
pub fn projectively_equivalent<S: Scalar>(
    p: &TwistedPolygon<S>,
    q: &TwistedPolygon<S>,
    tol: f64,
) -> Result<bool> {
    if p.n() != q.n() {
        return Ok(false);
    }
    let cp = p.corner_coords()?;
    let cq = q.corner_coords()?;
    Ok(cp.equal_up_to_shift(&cq, tol).is_some())
}

/// Random twisted polygon with exact rational data: random generic
/// recurrence coefficients run through the reconstruction, so the
/// canonical lift exists and all charts are exact.
pub fn random_rational_polygon(n: usize, rng: &mut SeededRng) -> Result<TwistedPolygon<Rat>> {
    let (a, b) = rng.generic_ab_coords(n, 6);
    let ab = ABCoords::new(a, b)?;
    // Random unimodular seed: product of a lower and an upper shear.
    let l = [
        [Rat::one(), Rat::zero(), Rat::zero()],
        [rng.rat(3), Rat::one(), Rat::zero()],
        [rng.rat(3), rng.rat(3), Rat::one()],
    ];
    let u = [
        [Rat::one(), rng.rat(3), rng.rat(3)],
        [Rat::zero(), Rat::one(), rng.rat(3)],
        [Rat::zero(), Rat::zero(), Rat::one()],
    ];
    let seed_map = ProjMap::new(l)?.compose(&ProjMap::new(u)?);
    reconstruct_from_ab(&ab, &seed_map.m)
}

/// Two-parameter family of recurrence coefficients whose polygon closes
/// up exactly (n = 5): a = (x, y, -(1+x)/(1-xy), -(1-xy), -(1+y)/(1-xy)),
/// b_i = -a_{i+2}. Requires xy != 1 and all coefficients nonzero.
pub fn closed_pentagon_ab<S: Scalar>(x: S, y: S) -> Result<ABCoords<S>> {
    let one = S::one();
    let d = one.clone() - x.clone() * y.clone();
    if d.tol_zero(DEFAULT_TOL) {
        return Err(Error::InvalidParameters);
    }
    let a = vec![
        x.clone(),
        y.clone(),
        -(one.clone() + x) / d.clone(),
        -d.clone(),
        -(one + y) / d,
    ];
    let b: Vec<S> = (0..5).map(|i| -a[(i + 2) % 5].clone()).collect();
    ABCoords::new(a, b)
}
