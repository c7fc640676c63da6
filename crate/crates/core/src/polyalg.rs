//! Exact multivariate Laurent polynomials and forward-mode dual numbers.
//!
//! The conserved quantities of the map are Laurent polynomials in the
//! coordinate chart variables; [`LaurentPoly`] stores them sparsely with
//! `BigRational` coefficients so identities are decided exactly.
//! [`Dual`] provides exact first derivatives for pointwise Poisson
//! brackets of quantities given only as evaluation closures.

use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{rat_to_string, Rat, Scalar};

/// Sparse Laurent polynomial in `nvars` variables over the rationals.
///
/// Invariant: stored coefficients are nonzero; exponent vectors have
/// length `nvars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<i32>, Rat>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    /// The monomial c * z_{i0}^{e0} ... for the given (variable, exponent)
    /// pairs.
    pub fn monomial(nvars: usize, c: Rat, powers: &[(usize, i32)]) -> Self {
        let mut e = vec![0; nvars];
        for &(i, k) in powers {
            assert!(i < nvars);
            e[i] += k;
        }
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, Rat::one(), &[(i, 1)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    fn insert_term(&mut self, e: Vec<i32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    /// z_i d/dz_i, the derivation that multiplies each term by its i-th
    /// exponent. Closed on Laurent polynomials, unlike the plain partial.
    pub fn log_deriv(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] != 0 {
                out.insert_term(e.clone(), c * Rat::from_int(e[i] as i64));
            }
        }
        out
    }

    /// Plain partial derivative d/dz_i.
    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] != 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.insert_term(e2, c * Rat::from_int(e[i] as i64));
            }
        }
        out
    }

    /// Evaluate at a point of any scalar type. Negative exponents at a
    /// zero coordinate are a pole.
    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<S> {
        if point.len() != self.nvars {
            return Err(Error::ArityMismatch(self.nvars, point.len()));
        }
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = S::from_rat(c);
            for (i, &k) in e.iter().enumerate() {
                t = t * pow_scalar(&point[i], k)?;
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Evaluate with exact first derivatives attached.
    pub fn eval_dual(&self, point: &[Dual]) -> Result<Dual> {
        if point.len() != self.nvars {
            return Err(Error::ArityMismatch(self.nvars, point.len()));
        }
        let ngrad = point.first().map_or(0, |d| d.grad.len());
        let mut acc = Dual::constant(Rat::zero(), ngrad);
        for (e, c) in &self.terms {
            let mut t = Dual::constant(c.clone(), ngrad);
            for (i, &k) in e.iter().enumerate() {
                t = t.mul(&point[i].powi(k)?);
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Relabel variables: term exponent on variable i moves to `map(i).0`,
    /// with the variable negated when `map(i).1` is true (z -> -z flips
    /// the sign of odd powers).
    pub fn relabel(&self, map: impl Fn(usize) -> (usize, bool)) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; self.nvars];
            let mut sign_flip = false;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let (j, negate) = map(i);
                e2[j] += k;
                if negate && k.rem_euclid(2) == 1 {
                    sign_flip = !sign_flip;
                }
            }
            let coeff = if sign_flip { -c } else { c.clone() };
            out.insert_term(e2, coeff);
        }
        out
    }

    /// Substitute each variable by a signed monomial: variable i becomes
    /// coeff_i * prod z_j^{e_ij}. Closed on Laurent polynomials because
    /// the coefficients are nonzero.
    pub fn subst_monomials(&self, subs: &[(Rat, Vec<(usize, i32)>)]) -> Self {
        assert_eq!(subs.len(), self.nvars);
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut e2 = vec![0i32; self.nvars];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let (sc, mono) = &subs[i];
                assert!(!sc.is_zero());
                coeff = coeff * pow_rat(sc, k);
                for &(j, kj) in mono {
                    e2[j] += kj * k;
                }
            }
            out.insert_term(e2, coeff);
        }
        out
    }

    /// Split into graded components: term weight is the weighted exponent
    /// sum.
    pub fn weight_components(&self, weights: &[i64]) -> BTreeMap<i64, LaurentPoly> {
        assert_eq!(weights.len(), self.nvars);
        let mut out: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let w: i64 = e.iter().zip(weights).map(|(&k, &wt)| k as i64 * wt).sum();
            out.entry(w)
                .or_insert_with(|| LaurentPoly::zero(self.nvars))
                .insert_term(e.clone(), c.clone());
        }
        out
    }
}

fn pow_rat(x: &Rat, k: i32) -> Rat {
    let mut acc = Rat::one();
    let base = if k >= 0 { x.clone() } else { Rat::one() / x };
    for _ in 0..k.unsigned_abs() {
        acc = acc * &base;
    }
    acc
}

fn pow_scalar<S: Scalar>(x: &S, k: i32) -> Result<S> {
    if k == 0 {
        return Ok(S::one());
    }
    if x.is_zero() {
        if k < 0 {
            return Err(Error::PoleAtPoint);
        }
        return Ok(S::zero());
    }
    let base = if k > 0 { x.clone() } else { S::one() / x.clone() };
    let mut acc = S::one();
    for _ in 0..k.unsigned_abs() {
        acc = acc * base.clone();
    }
    Ok(acc)
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let cs = rat_to_string(c);
            if first {
                write!(f, "{cs}")?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {}", rat_to_string(&-c))?;
            } else {
                write!(f, " + {cs}")?;
            }
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*z{i}")?,
                    _ => write!(f, "*z{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

/// Exact dual number: a rational value with a dense gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual {
    pub val: Rat,
    pub grad: Vec<Rat>,
}

impl Dual {
    pub fn constant(val: Rat, nvars: usize) -> Self {
        Self {
            val,
            grad: vec![Rat::zero(); nvars],
        }
    }

    /// Seed as the i-th independent variable.
    pub fn variable(val: Rat, i: usize, nvars: usize) -> Self {
        let mut d = Self::constant(val, nvars);
        d.grad[i] = Rat::one();
        d
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            val: &self.val + &o.val,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            val: &self.val - &o.val,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            val: -&self.val,
            grad: self.grad.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            val: &self.val * &o.val,
            grad: self
                .grad
                .iter()
                .zip(&o.grad)
                .map(|(a, b)| a * &o.val + b * &self.val)
                .collect(),
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.val.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        let v2 = &o.val * &o.val;
        Ok(Self {
            val: &self.val / &o.val,
            grad: self
                .grad
                .iter()
                .zip(&o.grad)
                .map(|(a, b)| (a * &o.val - b * &self.val) / &v2)
                .collect(),
        })
    }

    pub fn powi(&self, k: i32) -> Result<Self> {
        let one = Self::constant(Rat::one(), self.grad.len());
        if k == 0 {
            return Ok(one);
        }
        let base = if k > 0 {
            self.clone()
        } else {
            if self.val.is_zero() {
                return Err(Error::PoleAtPoint);
            }
            one.div(self)?
        };
        let mut acc = base.clone();
        for _ in 1..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SeededRng;

    fn v(n: usize, i: usize) -> LaurentPoly {
        LaurentPoly::var(n, i)
    }

    #[test]
    fn ring_axioms_on_random_polys() {
        let mut rng = SeededRng::new(11);
        let n = 3;
        let rand_poly = |rng: &mut SeededRng| {
            let mut p = LaurentPoly::zero(n);
            for _ in 0..4 {
                let e: Vec<i32> = (0..n).map(|_| rng.int(-2, 2) as i32).collect();
                p.insert_term(e, rng.rat(5));
            }
            p
        };
        for _ in 0..10 {
            let a = rand_poly(&mut rng);
            let b = rand_poly(&mut rng);
            let c = rand_poly(&mut rng);
            // Commutativity, associativity, distributivity.
            assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            assert!(a.sub(&a).unwrap().is_zero());
        }
    }

    #[test]
    fn derivations_satisfy_leibniz() {
        let mut rng = SeededRng::new(5);
        let n = 3;
        let rand_poly = |rng: &mut SeededRng| {
            let mut p = LaurentPoly::zero(n);
            for _ in 0..4 {
                let e: Vec<i32> = (0..n).map(|_| rng.int(-2, 2) as i32).collect();
                p.insert_term(e, rng.rat(5));
            }
            p
        };
        for _ in 0..5 {
            let a = rand_poly(&mut rng);
            let b = rand_poly(&mut rng);
            for i in 0..n {
                let lhs = a.mul(&b).unwrap().log_deriv(i);
                let rhs = a
                    .log_deriv(i)
                    .mul(&b)
                    .unwrap()
                    .add(&a.mul(&b.log_deriv(i)).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
                let lhs = a.mul(&b).unwrap().partial(i);
                let rhs = a
                    .partial(i)
                    .mul(&b)
                    .unwrap()
                    .add(&a.mul(&b.partial(i)).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn eval_laurent_with_poles() {
        // p = z0^-1 + z1
        let p = LaurentPoly::monomial(2, Rat::one(), &[(0, -1)])
            .add(&v(2, 1))
            .unwrap();
        let pt = [Rat::from_ratio(1, 2), Rat::from_int(3)];
        assert_eq!(p.eval(&pt).unwrap(), Rat::from_int(5));
        let bad = [Rat::zero(), Rat::from_int(3)];
        assert_eq!(p.eval(&bad), Err(Error::PoleAtPoint));
    }

    #[test]
    fn dual_matches_symbolic_partial() {
        let mut rng = SeededRng::new(9);
        let n = 3;
        let mut p = LaurentPoly::zero(n);
        for _ in 0..5 {
            let e: Vec<i32> = (0..n).map(|_| rng.int(-2, 3) as i32).collect();
            p.insert_term(e, rng.rat(7));
        }
        let pt: Vec<Rat> = (0..n).map(|_| rng.rat_nonzero(9)).collect();
        let dual_pt: Vec<Dual> = pt
            .iter()
            .enumerate()
            .map(|(i, x)| Dual::variable(x.clone(), i, n))
            .collect();
        let d = p.eval_dual(&dual_pt).unwrap();
        assert_eq!(d.val, p.eval(&pt).unwrap());
        for i in 0..n {
            assert_eq!(d.grad[i], p.partial(i).eval(&pt).unwrap());
        }
    }

    #[test]
    fn dual_chain_rule_through_division() {
        // f = (z0 + z1) / (z0 * z1) evaluated as closures over Dual.
        let x = Dual::variable(Rat::from_int(2), 0, 2);
        let y = Dual::variable(Rat::from_int(5), 1, 2);
        let f = x.add(&y).div(&x.mul(&y)).unwrap();
        // f = 1/y + 1/x: df/dx = -1/x^2 = -1/4, df/dy = -1/25.
        assert_eq!(f.val, Rat::from_ratio(7, 10));
        assert_eq!(f.grad[0], Rat::from_ratio(-1, 4));
        assert_eq!(f.grad[1], Rat::from_ratio(-1, 25));
    }

    #[test]
    fn relabel_with_negation() {
        // p = z0^2 * z1 under z0 -> -z1, z1 -> z0 becomes -z1^2 z0... with
        // even power on the negated variable the sign survives only via z1.
        let p = LaurentPoly::monomial(2, Rat::from_int(3), &[(0, 2), (1, 1)]);
        let q = p.relabel(|i| if i == 0 { (1, true) } else { (0, false) });
        assert_eq!(
            q,
            LaurentPoly::monomial(2, Rat::from_int(3), &[(1, 2), (0, 1)])
        );
        let p2 = LaurentPoly::monomial(2, Rat::from_int(3), &[(0, 1), (1, 1)]);
        let q2 = p2.relabel(|i| if i == 0 { (1, true) } else { (0, false) });
        assert_eq!(
            q2,
            LaurentPoly::monomial(2, Rat::from_int(-3), &[(1, 1), (0, 1)])
        );
    }

    #[test]
    fn subst_monomial_matches_eval() {
        // Substituting z0 -> -2 z1 z2^{-1}, z1 -> z0, z2 -> 3 z2 must
        // commute with evaluation.
        let mut rng = SeededRng::new(15);
        let n = 3;
        let mut p = LaurentPoly::zero(n);
        for _ in 0..5 {
            let e: Vec<i32> = (0..n).map(|_| rng.int(-2, 2) as i32).collect();
            p.insert_term(e, rng.rat(5));
        }
        let subs = vec![
            (Rat::from_int(-2), vec![(1, 1), (2, -1)]),
            (Rat::one(), vec![(0, 1)]),
            (Rat::from_int(3), vec![(2, 1)]),
        ];
        let q = p.subst_monomials(&subs);
        let pt: Vec<Rat> = (0..n).map(|_| rng.rat_nonzero(7)).collect();
        let mapped = [
            Rat::from_int(-2) * &pt[1] / &pt[2],
            pt[0].clone(),
            Rat::from_int(3) * &pt[2],
        ];
        assert_eq!(q.eval(&pt).unwrap(), p.eval(&mapped).unwrap());
    }

    #[test]
    fn weight_components_partition() {
        let p = LaurentPoly::monomial(2, Rat::one(), &[(0, 1)])
            .add(&LaurentPoly::monomial(2, Rat::one(), &[(1, 1)]))
            .unwrap()
            .add(&LaurentPoly::monomial(2, Rat::one(), &[(0, 1), (1, 1)]))
            .unwrap();
        let comps = p.weight_components(&[1, -1]);
        assert_eq!(comps.len(), 3);
        assert_eq!(comps[&1], LaurentPoly::var(2, 0));
        assert_eq!(comps[&-1], LaurentPoly::var(2, 1));
        let mut total = LaurentPoly::zero(2);
        for c in comps.values() {
            total = total.add(c).unwrap();
        }
        assert_eq!(total, p);
    }
}
