//! The invariant Poisson structure in both charts.
//!
//! The bracket is log-constant: {z_i, z_j} = c(i, j) z_i z_j with a
//! constant antisymmetric table c, so brackets of Laurent polynomials
//! stay Laurent polynomials and the corank is the corank of c.
//! Variable layout matches the invariants module: index i is x_i (or
//! a_i), index n+i is y_i (or b_i).

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::invariants::{rank_exact, symbolic};
use crate::polyalg::{Dual, LaurentPoly};
use crate::sampling::SeededRng;
use crate::scalar::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Corner,
    Ab,
}

/// Sparse antisymmetric coefficient table of a log-constant bracket on
/// 2n coordinates.
#[derive(Debug, Clone)]
pub struct PoissonStructure {
    pub chart: Chart,
    pub n: usize,
    c: BTreeMap<(usize, usize), Rat>,
}

impl PoissonStructure {
    fn insert(&mut self, i: usize, j: usize, v: Rat) {
        if i == j || v.is_zero() {
            return;
        }
        *self.c.entry((i, j)).or_insert_with(Rat::zero) += &v;
        *self.c.entry((j, i)).or_insert_with(Rat::zero) -= &v;
        self.c.retain(|_, v| !v.is_zero());
    }

    /// Corner-chart structure: {x_i, x_{i+1}} = -x_i x_{i+1},
    /// {y_i, y_{i+1}} = y_i y_{i+1}, {x, y} = 0.
    pub fn corner(n: usize) -> Self {
        let mut s = Self {
            chart: Chart::Corner,
            n,
            c: BTreeMap::new(),
        };
        for i in 0..n {
            s.insert(i, (i + 1) % n, -Rat::one());
            s.insert(n + i, n + (i + 1) % n, Rat::one());
        }
        s
    }

    /// Recurrence-chart structure:
    /// {a_i, a_j} = sum_{k=1..m} (d_{i,j+3k} - d_{i,j-3k}) a_i a_j with
    /// m = floor(n/3), b with the opposite sign pattern, {a, b} = 0.
    pub fn ab(n: usize) -> Self {
        let mut s = Self {
            chart: Chart::Ab,
            n,
            c: BTreeMap::new(),
        };
        let m = n / 3;
        for j in 0..n {
            for k in 1..=m {
                let i = (j + 3 * k) % n;
                s.insert(i, j, Rat::one());
                s.insert(n + i, n + j, -Rat::one());
            }
        }
        s
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rat {
        self.c.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    /// Mutation control for the verification drivers: same structure
    /// with one entry (and its mirror) sign-flipped.
    pub fn with_flipped_sign(&self, i: usize, j: usize) -> Self {
        let mut s = self.clone();
        if let Some(v) = s.c.get(&(i, j)).cloned() {
            s.c.insert((i, j), -v.clone());
            s.c.insert((j, i), v);
        }
        s
    }

    /// Dense log-coordinate coefficient matrix.
    pub fn coefficient_matrix(&self) -> Vec<Vec<Rat>> {
        let d = 2 * self.n;
        let mut m = vec![vec![Rat::zero(); d]; d];
        for (&(i, j), v) in &self.c {
            m[i][j] = v.clone();
        }
        m
    }

    /// 2n minus the exact rank of the coefficient matrix.
    pub fn corank(&self) -> usize {
        2 * self.n - rank_exact(self.coefficient_matrix())
    }

    /// {f, g} = sum_{i,j} c(i,j) (z_i df/dz_i)(z_j dg/dz_j), exact.
    pub fn bracket_poly(&self, f: &LaurentPoly, g: &LaurentPoly) -> Result<LaurentPoly> {
        if f.nvars != 2 * self.n || g.nvars != 2 * self.n {
            return Err(Error::ArityMismatch(2 * self.n, f.nvars));
        }
        let mut out = LaurentPoly::zero(2 * self.n);
        let lf: Vec<LaurentPoly> = (0..2 * self.n).map(|i| f.log_deriv(i)).collect();
        let lg: Vec<LaurentPoly> = (0..2 * self.n).map(|j| g.log_deriv(j)).collect();
        for (&(i, j), v) in &self.c {
            if lf[i].is_zero() || lg[j].is_zero() {
                continue;
            }
            out = out.add(&lf[i].mul(&lg[j])?.scale(v))?;
        }
        Ok(out)
    }

    /// Bracket of two rational-map expressions at a point, via exact
    /// forward-mode partials: sum c(i,j) z_i z_j (df/dz_i)(dg/dz_j).
    pub fn bracket_at_point<F, G>(&self, f: F, g: G, point: &[Rat]) -> Result<Rat>
    where
        F: Fn(&[Dual]) -> Result<Dual>,
        G: Fn(&[Dual]) -> Result<Dual>,
    {
        let d = 2 * self.n;
        if point.len() != d {
            return Err(Error::ArityMismatch(d, point.len()));
        }
        let vars: Vec<Dual> = point
            .iter()
            .enumerate()
            .map(|(i, v)| Dual::variable(v.clone(), i, d))
            .collect();
        let fv = f(&vars)?;
        let gv = g(&vars)?;
        let mut acc = Rat::zero();
        for (&(i, j), c) in &self.c {
            acc += c * &point[i] * &point[j] * &fv.grad[i] * &gv.grad[j];
        }
        Ok(acc)
    }
}

pub fn structure_corank(n: usize, chart: Chart) -> usize {
    match chart {
        Chart::Corner => PoissonStructure::corner(n).corank(),
        Chart::Ab => PoissonStructure::ab(n).corank(),
    }
}

/// The corner-chart pentagram map as dual-number closures:
/// T*x_i = x_i phi_{i-1}/phi_{i+1}, T*y_i = y_{i+1} phi_{i+2}/phi_i,
/// phi_i = 1 - x_i y_i.
pub fn pullback_coordinate(n: usize, coord: usize) -> impl Fn(&[Dual]) -> Result<Dual> {
    move |z: &[Dual]| {
        let idx = |k: i64| k.rem_euclid(n as i64) as usize;
        let phi = |k: i64| -> Dual {
            let one = Dual::constant(Rat::one(), z[0].grad.len());
            one.sub(&z[idx(k)].mul(&z[n + idx(k)]))
        };
        if coord < n {
            let i = coord as i64;
            z[coord].mul(&phi(i - 1)).div(&phi(i + 1))
        } else {
            let i = (coord - n) as i64;
            z[n + idx(i + 1)].mul(&phi(i + 2)).div(&phi(i))
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct InvarianceReport {
    pub n: usize,
    pub trials: usize,
    pub checked_points: usize,
    pub skipped_points: usize,
    pub exact: bool,
    /// Decimal rendering of the largest violation (zero when exact).
    pub max_violation: String,
}

/// Check {T*z_p, T*z_q} = T*({z_p, z_q}) for all coordinate pairs at
/// random rational points; every identity must hold exactly.
#[allow(non_snake_case)]
pub fn verify_T_invariance(n: usize, trials: usize, seed: u64) -> InvarianceReport {
    verify_invariance_of(&PoissonStructure::corner(n), trials, seed)
}

/// Same driver against an arbitrary structure table (used for the
/// mutation control: a corrupted table must produce violations).
pub fn verify_invariance_of(
    s: &PoissonStructure,
    trials: usize,
    seed: u64,
) -> InvarianceReport {
    let n = s.n;
    let mut rng = SeededRng::new(seed);
    let mut checked = 0;
    let mut skipped = 0;
    let mut max_violation = Rat::zero();
    for _ in 0..trials {
        let (x, y) = rng.generic_corner_coords(n, 8);
        let mut point: Vec<Rat> = x;
        point.extend(y);
        let mut point_ok = true;
        'pairs: for p in 0..2 * n {
            for q in p + 1..2 * n {
                let lhs = s.bracket_at_point(
                    pullback_coordinate(n, p),
                    pullback_coordinate(n, q),
                    &point,
                );
                let lhs = match lhs {
                    Ok(v) => v,
                    Err(Error::PoleAtPoint) => {
                        point_ok = false;
                        break 'pairs;
                    }
                    Err(_) => unreachable!("coordinate pullbacks only fail at poles"),
                };
                // T*({z_p, z_q}) = c(p,q) (T*z_p)(T*z_q) at the point.
                let d = 2 * n;
                let vars: Vec<Dual> = point
                    .iter()
                    .enumerate()
                    .map(|(i, v)| Dual::variable(v.clone(), i, d))
                    .collect();
                let rhs = s.coeff(p, q)
                    * pullback_coordinate(n, p)(&vars).unwrap().val
                    * pullback_coordinate(n, q)(&vars).unwrap().val;
                let diff = (lhs - rhs).abs();
                if diff > max_violation {
                    max_violation = diff;
                }
            }
        }
        if point_ok {
            checked += 1;
        } else {
            skipped += 1;
        }
    }
    InvarianceReport {
        n,
        trials,
        checked_points: checked,
        skipped_points: skipped,
        exact: max_violation.is_zero(),
        max_violation: max_violation.to_string(),
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CommutationReport {
    pub n: usize,
    pub pairs_checked: usize,
    pub all_zero: bool,
    pub nonzero_pairs: Vec<(String, String)>,
}

/// {O_k, O_l}, {E_k, E_l}, {O_k, E_l} identically zero as polynomials,
/// Casimirs included.
pub fn verify_commutation(n: usize) -> Result<CommutationReport> {
    let sym = symbolic(n);
    let s = PoissonStructure::corner(n);
    let mut family: Vec<(String, &LaurentPoly)> = Vec::new();
    for (k, p) in sym.o_polys.iter().enumerate() {
        family.push((format!("O{}", k + 1), p));
    }
    for (k, p) in sym.e_polys.iter().enumerate() {
        family.push((format!("E{}", k + 1), p));
    }
    family.push((format!("O{n}"), &sym.o_n));
    family.push((format!("E{n}"), &sym.e_n));
    let mut pairs = 0;
    let mut nonzero = Vec::new();
    for (u, (fname, f)) in family.iter().enumerate() {
        for (gname, g) in family.iter().skip(u + 1) {
            pairs += 1;
            if !s.bracket_poly(f, g)?.is_zero() {
                nonzero.push((fname.clone(), gname.clone()));
            }
        }
    }
    Ok(CommutationReport {
        n,
        pairs_checked: pairs,
        all_zero: nonzero.is_empty(),
        nonzero_pairs: nonzero,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CasimirReport {
    pub n: usize,
    pub casimirs: Vec<String>,
    pub all_central: bool,
    pub failing: Vec<(String, usize)>,
}

/// {C, z_j} = 0 for every coordinate z_j, for C in {O_n, E_n} and, for
/// even n, the two split-product Casimirs.
pub fn verify_casimirs(n: usize) -> Result<CasimirReport> {
    let sym = symbolic(n);
    let s = PoissonStructure::corner(n);
    let mut casimirs: Vec<(String, &LaurentPoly)> =
        vec![(format!("O{n}"), &sym.o_n), (format!("E{n}"), &sym.e_n)];
    if let (Some(oh), Some(eh)) = (&sym.o_half, &sym.e_half) {
        casimirs.push((format!("O{}", n / 2), oh));
        casimirs.push((format!("E{}", n / 2), eh));
    }
    let mut failing = Vec::new();
    for (name, c) in &casimirs {
        for j in 0..2 * n {
            let z = LaurentPoly::var(2 * n, j);
            if !s.bracket_poly(c, &z)?.is_zero() {
                failing.push((name.clone(), j));
            }
        }
    }
    Ok(CasimirReport {
        n,
        casimirs: casimirs.into_iter().map(|(name, _)| name).collect(),
        all_central: failing.is_empty(),
        failing,
    })
}
