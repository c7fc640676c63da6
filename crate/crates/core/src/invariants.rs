//! Conserved quantities of the pentagram map.
//!
//! Two independent symbolic routes produce the same polynomials and act
//! as each other's oracle: the trace of the monodromy matrix graded by
//! the scaling weight, and a direct enumeration of admissible cyclic
//! markings. The corner-chart invariants O_k, E_k come from a third
//! enumeration (admissible monomials in x, y) and are tied to the first
//! two by exact Laurent-polynomial bridge identities.
//!
//! Variable layout throughout: 2n variables, index i is a_i (or x_i),
//! index n+i is b_i (or y_i).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polyalg::LaurentPoly;
use crate::polygon::{ab_from_corner, corner_from_ab, ABCoords, CornerCoords, TwistedPolygon};
use crate::projgeo::{cross_ratio_points, join, ProjPoint};
use crate::scalar::{Rat, Scalar, DEFAULT_TOL};

/// All symbolic invariant polynomials for one n, built once and cached.
#[derive(Debug)]
pub struct SymbolicInvariants {
    pub n: usize,
    /// k = floor(n/2); the I/J families run over j = 0..=k.
    pub k: usize,
    /// Scaling weights w(j) of the I_j.
    pub weights: Vec<i64>,
    /// Trace route: I_j in the recurrence-chart variables.
    pub i_polys: Vec<LaurentPoly>,
    /// Dihedral duals J_j = sigma(I_j).
    pub j_polys: Vec<LaurentPoly>,
    /// Marking route: T_j, same indexing as I_j.
    pub t_polys: Vec<LaurentPoly>,
    /// Full trace F_n = sum of the I_j.
    pub f_n: LaurentPoly,
    /// Corner-chart invariants O_1..O_k (admissible-monomial route).
    pub o_polys: Vec<LaurentPoly>,
    pub e_polys: Vec<LaurentPoly>,
    /// Casimirs: products of all x_i resp. y_i.
    pub o_n: LaurentPoly,
    pub e_n: LaurentPoly,
    /// Extra even-n Casimirs: even-index product plus odd-index product.
    pub o_half: Option<LaurentPoly>,
    pub e_half: Option<LaurentPoly>,
}

/// Numeric values of the full invariant set at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSet<S: Scalar> {
    pub n: usize,
    pub k: usize,
    pub weights: Vec<i64>,
    /// I_0..I_k; empty when the recurrence chart is unavailable.
    pub i: Vec<S>,
    pub j: Vec<S>,
    /// O_1..O_k.
    pub o: Vec<S>,
    pub e: Vec<S>,
    pub o_n: S,
    pub e_n: S,
    pub o_half: Option<S>,
    pub e_half: Option<S>,
}

/// Slope cross-ratios z_i at every vertex and the Hilbert perimeter
/// invariant H = 1 / prod z_i.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertData<S: Scalar> {
    pub z: Vec<S>,
    pub h: S,
}

/// w(j) = 3j - k for n = 2k, w(j) = 3j - k + 1 for n = 2k + 1.
pub fn invariant_weights(n: usize) -> Vec<i64> {
    let k = (n / 2) as i64;
    (0..=k)
        .map(|j| if n % 2 == 0 { 3 * j - k } else { 3 * j - k + 1 })
        .collect()
}

/// Elementary recurrence matrix N_j with symbolic entries.
fn elementary_matrix(n: usize, j: usize) -> [[LaurentPoly; 3]; 3] {
    let zero = || LaurentPoly::zero(2 * n);
    let one = || LaurentPoly::one(2 * n);
    let b = LaurentPoly::var(2 * n, n + j);
    let a = LaurentPoly::var(2 * n, j);
    [
        [zero(), zero(), one()],
        [one(), zero(), b],
        [zero(), one(), a],
    ]
}

/// Symbolic monodromy matrix M_n = N_0 N_1 ... N_{n-1}.
pub fn monodromy_matrix_symbolic(n: usize) -> [[LaurentPoly; 3]; 3] {
    let mut m = elementary_matrix(n, 0);
    for j in 1..n {
        let nj = elementary_matrix(n, j);
        let mut out: [[LaurentPoly; 3]; 3] =
            std::array::from_fn(|_| std::array::from_fn(|_| LaurentPoly::zero(2 * n)));
        for (r, row) in out.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                let mut acc = LaurentPoly::zero(2 * n);
                for t in 0..3 {
                    acc = acc.add(&m[r][t].mul(&nj[t][c]).unwrap()).unwrap();
                }
                *entry = acc;
            }
        }
        m = out;
    }
    m
}

/// Numeric monodromy matrix at a point of the recurrence chart.
pub fn monodromy_matrix_numeric<S: Scalar>(c: &ABCoords<S>) -> [[S; 3]; 3] {
    let mut m: [[S; 3]; 3] = std::array::from_fn(|r| {
        std::array::from_fn(|c| if r == c { S::one() } else { S::zero() })
    });
    for j in 0..c.n {
        // Right-multiply by N_j = [[0,0,1],[1,0,b_j],[0,1,a_j]].
        for r in 0..3 {
            let (m0, m1, m2) = (m[r][0].clone(), m[r][1].clone(), m[r][2].clone());
            m[r][0] = m1.clone();
            m[r][1] = m2.clone();
            m[r][2] = m0 + m1 * c.b[j].clone() + m2 * c.a[j].clone();
        }
    }
    m
}

/// The dihedral involution on the recurrence chart:
/// a_i -> -b_{-i}, b_i -> -a_{-i}.
pub fn sigma_poly(p: &LaurentPoly, n: usize) -> LaurentPoly {
    p.relabel(|v| {
        if v < n {
            (n + (n - v) % n, true)
        } else {
            ((n - (v - n)) % n, true)
        }
    })
}

/// The index involution on the corner chart: x_i -> x_{1-i}, y_i -> y_{-i}.
pub fn tau_poly(p: &LaurentPoly, n: usize) -> LaurentPoly {
    let m = n as i64;
    p.relabel(|v| {
        if v < n {
            ((1 - v as i64).rem_euclid(m) as usize, false)
        } else {
            (n + (-((v - n) as i64)).rem_euclid(m) as usize, false)
        }
    })
}

fn grade_trace(n: usize) -> (LaurentPoly, Vec<LaurentPoly>) {
    let m = monodromy_matrix_symbolic(n);
    let f = m[0][0].add(&m[1][1]).unwrap().add(&m[2][2]).unwrap();
    let mut wts = vec![0i64; 2 * n];
    for (i, w) in wts.iter_mut().enumerate() {
        *w = if i < n { 1 } else { -1 };
    }
    let comps = f.weight_components(&wts);
    let weights = invariant_weights(n);
    let polys = weights
        .iter()
        .map(|w| comps.get(w).cloned().unwrap_or_else(|| LaurentPoly::zero(2 * n)))
        .collect();
    (f, polys)
}

/// Enumerate admissible cyclic markings: tile the n positions with blocks
/// "a" (length 1), "* b" (length 2, the b at the second position) and
/// "* * *" (length 3); the monomial multiplies the a/b variables at their
/// positions, bucketed by the weight p - q (#a minus #b blocks).
fn marking_polynomials(n: usize) -> Vec<LaurentPoly> {
    let weights = invariant_weights(n);
    let windex: HashMap<i64, usize> =
        weights.iter().enumerate().map(|(j, &w)| (w, j)).collect();
    let mut out = vec![LaurentPoly::zero(2 * n); weights.len()];
    // Condition on the block covering position 0: it starts at
    // (n - back) % n and has length `len` > back, so every cyclic tiling
    // is produced exactly once; the rest fills forward linearly.
    for (len, back) in [(1usize, 0usize), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)] {
        let start = (n - back) % n;
        let mut exps = vec![0i32; 2 * n];
        let mut emit = |exps: &[i32], p: i64, q: i64| {
            let w = p - q;
            if let Some(&j) = windex.get(&w) {
                let powers: Vec<(usize, i32)> = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e != 0)
                    .map(|(i, &e)| (i, e))
                    .collect();
                out[j] = out[j]
                    .add(&LaurentPoly::monomial(2 * n, Rat::one(), &powers))
                    .unwrap();
            }
        };
        place_block(n, start, len, 0, &mut exps, 0, 0, &mut emit);
    }
    out
}

/// Place one block of length `len` at `start` (mod n), then fill the
/// remaining cells; `used` counts cells covered before this block.
fn place_block(
    n: usize,
    start: usize,
    len: usize,
    used: usize,
    exps: &mut Vec<i32>,
    p: i64,
    q: i64,
    emit: &mut impl FnMut(&[i32], i64, i64),
) {
    let (p, q) = match len {
        1 => {
            exps[start % n] += 1; // "a" block: a at its position
            (p + 1, q)
        }
        2 => {
            exps[n + (start + 1) % n] += 1; // "* b" block: b at second cell
            (p, q + 1)
        }
        _ => (p, q), // "* * *" block: no variables
    };
    let used = used + len;
    if used == n {
        emit(exps, p, q);
    } else {
        let next = (start + len) % n;
        for l in [1usize, 2, 3] {
            if used + l <= n {
                place_block(n, next, l, used, exps, p, q, emit);
            }
        }
    }
    match len {
        1 => exps[start % n] -= 1,
        2 => exps[n + (start + 1) % n] -= 1,
        _ => {}
    }
}

fn admissible(n: usize, chosen: &[(bool, usize)]) -> bool {
    // chosen: list of (is_triple, index) with is_triple marking X_i
    // (x_i y_i x_{i+1}) and singletons x_i otherwise.
    let m = n as i64;
    let cyc = |d: i64| {
        let r = d.rem_euclid(m);
        r.min(m - r)
    };
    for (u, &(tu, iu)) in chosen.iter().enumerate() {
        for &(tv, iv) in chosen.iter().skip(u + 1) {
            let d = iu as i64 - iv as i64;
            let bad = match (tu, tv) {
                (true, true) => cyc(d) <= 2,
                (true, false) => {
                    // X_i and x_j consecutive iff j in {i-1, i, i+1, i+2}.
                    let r = (iv as i64 - iu as i64).rem_euclid(m);
                    r <= 2 || r == m - 1
                }
                (false, true) => {
                    let r = (iu as i64 - iv as i64).rem_euclid(m);
                    r <= 2 || r == m - 1
                }
                (false, false) => cyc(d) <= 1 && cyc(d) != 0,
            };
            if bad {
                return false;
            }
        }
    }
    true
}

/// Corner-chart invariants O_1..O_k by enumerating admissible products of
/// triples X_i = x_i y_i x_{i+1} and singletons x_j, signed by
/// (-1)^{#singletons}.
fn corner_polynomials(n: usize) -> Vec<LaurentPoly> {
    let k = n / 2;
    let mut out = vec![LaurentPoly::zero(2 * n); k];
    // Depth-first over indices, choosing for each i: skip, X_i, or x_i.
    let mut chosen: Vec<(bool, usize)> = Vec::new();
    fn rec(
        n: usize,
        i: usize,
        chosen: &mut Vec<(bool, usize)>,
        out: &mut Vec<LaurentPoly>,
    ) {
        if i == n {
            let kk = chosen.len();
            if kk == 0 || kk > out.len() {
                return;
            }
            let mut powers: Vec<(usize, i32)> = Vec::new();
            let mut singles = 0;
            for &(triple, idx) in chosen.iter() {
                if triple {
                    powers.push((idx, 1));
                    powers.push((n + idx, 1));
                    powers.push(((idx + 1) % n, 1));
                } else {
                    powers.push((idx, 1));
                    singles += 1;
                }
            }
            let sign = if singles % 2 == 0 { Rat::one() } else { -Rat::one() };
            out[kk - 1] = out[kk - 1]
                .add(&LaurentPoly::monomial(2 * n, sign, &powers))
                .unwrap();
            return;
        }
        rec(n, i + 1, chosen, out);
        for triple in [true, false] {
            chosen.push((triple, i));
            if admissible(n, chosen) {
                rec(n, i + 1, chosen, out);
            }
            chosen.pop();
        }
    }
    rec(n, 0, &mut chosen, &mut out);
    out
}

fn product_poly(n: usize, offset: usize) -> LaurentPoly {
    let powers: Vec<(usize, i32)> = (0..n).map(|i| (offset + i, 1)).collect();
    LaurentPoly::monomial(2 * n, Rat::one(), &powers)
}

fn half_casimir(n: usize, offset: usize) -> LaurentPoly {
    let even: Vec<(usize, i32)> = (0..n).step_by(2).map(|i| (offset + i, 1)).collect();
    let odd: Vec<(usize, i32)> = (1..n).step_by(2).map(|i| (offset + i, 1)).collect();
    LaurentPoly::monomial(2 * n, Rat::one(), &even)
        .add(&LaurentPoly::monomial(2 * n, Rat::one(), &odd))
        .unwrap()
}

fn build(n: usize) -> SymbolicInvariants {
    let k = n / 2;
    let weights = invariant_weights(n);
    let (f_n, i_polys) = grade_trace(n);
    let j_polys = i_polys.iter().map(|p| sigma_poly(p, n)).collect();
    let t_polys = marking_polynomials(n);
    let o_polys = corner_polynomials(n);
    // E_k comes from O_k by shifting the alternating cycle
    // (x_0, y_0, x_1, y_1, ...) one step: x_i -> y_i, y_i -> x_{i+1};
    // triples x_i y_i x_{i+1} become y_i x_{i+1} y_{i+1}.
    let e_polys = o_polys
        .iter()
        .map(|p| p.relabel(|v| (if v < n { v + n } else { (v - n + 1) % n }, false)))
        .collect();
    let (o_half, e_half) = if n % 2 == 0 {
        (Some(half_casimir(n, 0)), Some(half_casimir(n, n)))
    } else {
        (None, None)
    };
    SymbolicInvariants {
        n,
        k,
        weights,
        i_polys,
        j_polys,
        t_polys,
        f_n,
        o_polys,
        e_polys,
        o_n: product_poly(n, 0),
        e_n: product_poly(n, n),
        o_half,
        e_half,
    }
}

/// Cached symbolic invariants for one n. Supported symbolic range is
/// n <= 12 (term counts explode beyond).
pub fn symbolic(n: usize) -> Arc<SymbolicInvariants> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SymbolicInvariants>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard.entry(n).or_insert_with(|| Arc::new(build(n))).clone()
}

fn eval_corner_side<S: Scalar>(
    sym: &SymbolicInvariants,
    point: &[S],
) -> Result<(Vec<S>, Vec<S>, S, S, Option<S>, Option<S>)> {
    let o = sym
        .o_polys
        .iter()
        .map(|p| p.eval(point))
        .collect::<Result<Vec<_>>>()?;
    let e = sym
        .e_polys
        .iter()
        .map(|p| p.eval(point))
        .collect::<Result<Vec<_>>>()?;
    let o_n = sym.o_n.eval(point)?;
    let e_n = sym.e_n.eval(point)?;
    let o_half = sym.o_half.as_ref().map(|p| p.eval(point)).transpose()?;
    let e_half = sym.e_half.as_ref().map(|p| p.eval(point)).transpose()?;
    Ok((o, e, o_n, e_n, o_half, e_half))
}

/// Evaluate the full invariant set at a recurrence-chart point.
pub fn evaluate_from_ab<S: Scalar>(c: &ABCoords<S>) -> Result<InvariantSet<S>> {
    let sym = symbolic(c.n);
    let mut point: Vec<S> = c.a.clone();
    point.extend(c.b.iter().cloned());
    let i = sym
        .i_polys
        .iter()
        .map(|p| p.eval(&point))
        .collect::<Result<Vec<_>>>()?;
    let j = sym
        .j_polys
        .iter()
        .map(|p| p.eval(&point))
        .collect::<Result<Vec<_>>>()?;
    let corner = corner_from_ab(c)?;
    let mut cpoint: Vec<S> = corner.x.clone();
    cpoint.extend(corner.y.iter().cloned());
    let (o, e, o_n, e_n, o_half, e_half) = eval_corner_side(&sym, &cpoint)?;
    Ok(InvariantSet {
        n: c.n,
        k: sym.k,
        weights: sym.weights.clone(),
        i,
        j,
        o,
        e,
        o_n,
        e_n,
        o_half,
        e_half,
    })
}

/// Evaluate at a corner-chart point. The I/J side needs the recurrence
/// chart; when the chart change fails (n divisible by 3, or an
/// irrational cube root in exact mode) those lists come back empty.
pub fn evaluate_from_corner<S: Scalar>(c: &CornerCoords<S>) -> Result<InvariantSet<S>> {
    let sym = symbolic(c.n);
    let mut point: Vec<S> = c.x.clone();
    point.extend(c.y.iter().cloned());
    let (o, e, o_n, e_n, o_half, e_half) = eval_corner_side(&sym, &point)?;
    let (i, j) = match ab_from_corner(c) {
        Ok(ab) => {
            let mut apoint: Vec<S> = ab.a.clone();
            apoint.extend(ab.b.iter().cloned());
            (
                sym.i_polys
                    .iter()
                    .map(|p| p.eval(&apoint))
                    .collect::<Result<Vec<_>>>()?,
                sym.j_polys
                    .iter()
                    .map(|p| p.eval(&apoint))
                    .collect::<Result<Vec<_>>>()?,
            )
        }
        Err(Error::DivisibleByThree) | Err(Error::NonRationalLift) => (Vec::new(), Vec::new()),
        Err(e) => return Err(e),
    };
    Ok(InvariantSet {
        n: c.n,
        k: sym.k,
        weights: sym.weights.clone(),
        i,
        j,
        o,
        e,
        o_n,
        e_n,
        o_half,
        e_half,
    })
}

/// The independent invariant list on the corner chart: O_1..O_k,
/// E_1..E_k, O_n, E_n, with the top pair O_{n/2}-equivalents excluded for
/// even n.
fn independent_list(sym: &SymbolicInvariants) -> Vec<&LaurentPoly> {
    let top = if sym.n % 2 == 0 { sym.k - 1 } else { sym.k };
    let mut list: Vec<&LaurentPoly> = Vec::new();
    list.extend(sym.o_polys.iter().take(top));
    list.extend(sym.e_polys.iter().take(top));
    list.push(&sym.o_n);
    list.push(&sym.e_n);
    list
}

/// Number of independent invariants claimed for each n.
pub fn expected_rank(n: usize) -> usize {
    if n % 2 == 0 {
        2 * (n / 2 - 1) + 2
    } else {
        2 * (n / 2) + 2
    }
}

/// Exact rank of the Jacobian of the independent invariant list at a
/// rational corner-chart point (2n coordinates).
pub fn algebraic_independence_rank(n: usize, point: &[Rat]) -> Result<usize> {
    if point.len() != 2 * n {
        return Err(Error::ArityMismatch(2 * n, point.len()));
    }
    let sym = symbolic(n);
    let list = independent_list(&sym);
    let mut jac: Vec<Vec<Rat>> = Vec::with_capacity(list.len());
    for p in list {
        let mut row = Vec::with_capacity(2 * n);
        for v in 0..2 * n {
            row.push(p.partial(v).eval(point)?);
        }
        jac.push(row);
    }
    Ok(rank_exact(jac))
}

/// Gaussian elimination over the rationals.
pub fn rank_exact(mut m: Vec<Vec<Rat>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let pivot = (row..rows).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else { continue };
        m.swap(row, p);
        let inv = Rat::one() / &m[row][col];
        for c in col..cols {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..cols {
                    m[r][c] = &m[r][c] - &f * &m[row][c];
                }
            }
        }
        row += 1;
        rank += 1;
    }
    rank
}

/// Slope cross-ratios at each vertex and the Hilbert perimeter
/// H = 1/prod z_i. The four lines through v_i to its four nearest
/// neighbours form a pencil; their cross-ratio is computed in the dual
/// plane where the pencil is a line.
pub fn hilbert_data<S: Scalar>(p: &TwistedPolygon<S>) -> Result<HilbertData<S>> {
    let n = p.n() as i64;
    let mut z = Vec::with_capacity(p.n());
    let mut h = S::one();
    for i in 0..n {
        let v = p.vertex(i);
        let line_to = |k: i64| -> Result<ProjPoint<S>> {
            Ok(ProjPoint {
                h: join(&v, &p.vertex(i + k))?.l,
            })
        };
        let (l1, l2, l3, l4) = (line_to(-2)?, line_to(-1)?, line_to(1)?, line_to(2)?);
        let zi = cross_ratio_points(&l1, &l2, &l3, &l4)
            .map_err(|_| Error::DegenerateConfiguration(i as usize))?;
        if zi.tol_zero(DEFAULT_TOL) {
            return Err(Error::DegenerateConfiguration(i as usize));
        }
        h = h / zi.clone();
        z.push(zi);
    }
    Ok(HilbertData { z, h })
}

/// Residuals of the five linear relations that hold identically on
/// closed polygons:
/// sum I_j - 3, sum J_j - 3, sum w(j) I_j, sum w(j) J_j,
/// sum w(j)^2 (I_j - J_j).
pub fn closed_relations_residual<S: Scalar>(c: &ABCoords<S>, tol: f64) -> Result<[S; 5]> {
    let m = monodromy_matrix_numeric(c);
    for (r, row) in m.iter().enumerate() {
        for (cc, v) in row.iter().enumerate() {
            let want = if r == cc { S::one() } else { S::zero() };
            if !v.tol_eq(&want, tol) {
                return Err(Error::NotClosed);
            }
        }
    }
    let inv = evaluate_from_ab(c)?;
    let three = S::from_int(3);
    let mut si = -three.clone();
    let mut sj = -three;
    let mut swi = S::zero();
    let mut swj = S::zero();
    let mut sw2 = S::zero();
    for j in 0..=inv.k {
        let w = S::from_int(inv.weights[j]);
        let w2 = w.clone() * w.clone();
        si = si + inv.i[j].clone();
        sj = sj + inv.j[j].clone();
        swi = swi + w.clone() * inv.i[j].clone();
        swj = swj + w * inv.j[j].clone();
        sw2 = sw2 + w2 * (inv.i[j].clone() - inv.j[j].clone());
    }
    Ok([si, sj, swi, swj, sw2])
}

impl<S: Scalar> InvariantSet<S> {
    pub fn to_json(&self) -> serde_json::Value {
        let arr = |v: &[S]| v.iter().map(|x| x.to_json()).collect::<Vec<_>>();
        serde_json::json!({
            "n": self.n,
            "I": arr(&self.i),
            "J": arr(&self.j),
            "O": arr(&self.o),
            "E": arr(&self.e),
            "On": self.o_n.to_json(),
            "En": self.e_n.to_json(),
            "On2": self.o_half.as_ref().map(|x| x.to_json()),
            "En2": self.e_half.as_ref().map(|x| x.to_json()),
        })
    }
}
