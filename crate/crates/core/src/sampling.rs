//! Seeded random generation of rational and float test data.
//!
//! All randomness in the crate flows through [`SeededRng`] so every
//! experiment is reproducible from a single `u64` seed.

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::{Rat, Scalar};

pub struct SeededRng {
    rng: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Nonzero rational p/q with 1 <= |p|, q <= bound.
    pub fn rat_nonzero(&mut self, bound: i64) -> Rat {
        let p = loop {
            let p = self.rng.gen_range(-bound..=bound);
            if p != 0 {
                break p;
            }
        };
        let q = self.rng.gen_range(1..=bound);
        Rat::from_ratio(p, q)
    }

    /// Rational p/q with |p| <= bound, 1 <= q <= bound (zero allowed).
    pub fn rat(&mut self, bound: i64) -> Rat {
        let p = self.rng.gen_range(-bound..=bound);
        let q = self.rng.gen_range(1..=bound);
        Rat::from_ratio(p, q)
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn float(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Generic 2n-tuple (x_0..x_{n-1}, y_0..y_{n-1}) of nonzero rationals
    /// with every x_i y_i != 1, suitable as coordinates where the map and
    /// the invariants are regular.
    pub fn generic_corner_coords(&mut self, n: usize, bound: i64) -> (Vec<Rat>, Vec<Rat>) {
        loop {
            let x: Vec<Rat> = (0..n).map(|_| self.rat_nonzero(bound)).collect();
            let y: Vec<Rat> = (0..n).map(|_| self.rat_nonzero(bound)).collect();
            if x.iter().zip(&y).all(|(a, b)| !(a * b).is_one()) {
                return (x, y);
            }
        }
    }

    /// Generic 2n-tuple (a_0.., b_0..) of nonzero rationals with every
    /// 1 + a_i b_{i-1} != 0 and 1 + a_{i+1} b_i != 0, where the recurrence
    /// chart and the map formulas are regular.
    pub fn generic_ab_coords(&mut self, n: usize, bound: i64) -> (Vec<Rat>, Vec<Rat>) {
        loop {
            let a: Vec<Rat> = (0..n).map(|_| self.rat_nonzero(bound)).collect();
            let b: Vec<Rat> = (0..n).map(|_| self.rat_nonzero(bound)).collect();
            let ok = (0..n).all(|i| {
                let m1 = Rat::one() + &a[i] * &b[(i + n - 1) % n];
                !m1.is_zero()
            });
            if ok {
                return (a, b);
            }
        }
    }
}
