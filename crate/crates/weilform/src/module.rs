//! Explicit model of a finite quadratic module: element enumeration with the
//! group law, the norm map into Q/Z and the associated bilinear form.
//!
//! Each Jordan component contributes cyclic generators with the standard
//! norms; the full module is the direct sum, enumerated in mixed radix over
//! the generator list (deterministic indexing for matrices and norm classes).

use crate::arith::kronecker;
use crate::discriminant::{unit_decomposition, DiscriminantForm};
use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::Zero;

/// A rational residue mod 1, normalized into [0, 1).
pub type QmodZ = Ratio<i64>;

pub fn reduce_mod_1(x: Ratio<i64>) -> QmodZ {
    let num = x.numer().rem_euclid(*x.denom());
    Ratio::new(num, *x.denom())
}

#[derive(Clone, Debug)]
pub struct FiniteModule {
    /// Order of each cyclic generator.
    gen_orders: Vec<u64>,
    /// q(g_i) mod 1.
    diag: Vec<QmodZ>,
    /// (g_i, g_j) mod 1 for i < j (off-diagonal pairs inside even 2-adic
    /// blocks; zero across blocks).
    off: Vec<(usize, usize, QmodZ)>,
    size: u64,
}

impl FiniteModule {
    pub fn from_form(form: &DiscriminantForm) -> Result<Self> {
        let mut gen_orders: Vec<u64> = Vec::new();
        let mut diag: Vec<QmodZ> = Vec::new();
        let mut off: Vec<(usize, usize, QmodZ)> = Vec::new();

        for c in form.components() {
            let q = c.q() as i64;
            if c.prime != 2 {
                // rank-1 pieces p^{delta_i}, signs multiplying to c.sign
                for i in 0..c.rank {
                    let delta = if i + 1 == c.rank { c.sign } else { 1 };
                    let a = smallest_norm_numerator(c.prime, delta)?;
                    gen_orders.push(c.q());
                    diag.push(reduce_mod_1(Ratio::new(a, q)));
                }
            } else if let Some(t) = c.oddity {
                let units = unit_decomposition(c.rank, c.sign, t).ok_or_else(|| {
                    Error::Precondition(format!("unrealizable 2-adic component {c:?}"))
                })?;
                for u in units {
                    gen_orders.push(c.q());
                    diag.push(reduce_mod_1(Ratio::new(u as i64, 2 * q)));
                }
            } else {
                // Even blocks: (rank/2 - 1) copies of U(q) and one block of
                // the aggregate sign.
                let blocks = c.rank / 2;
                for b in 0..blocks {
                    let delta = if b + 1 == blocks { c.sign } else { 1 };
                    let i = gen_orders.len();
                    gen_orders.push(c.q());
                    gen_orders.push(c.q());
                    let qq = if delta == 1 {
                        Ratio::zero()
                    } else {
                        Ratio::new(1, q)
                    };
                    diag.push(reduce_mod_1(qq));
                    diag.push(reduce_mod_1(qq));
                    off.push((i, i + 1, reduce_mod_1(Ratio::new(1, q))));
                }
            }
        }

        let size = gen_orders.iter().product::<u64>().max(1);
        Ok(FiniteModule {
            gen_orders,
            diag,
            off,
            size,
        })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn num_generators(&self) -> usize {
        self.gen_orders.len()
    }

    pub fn generator_orders(&self) -> &[u64] {
        &self.gen_orders
    }

    pub fn coords(&self, mut idx: u64) -> Vec<u64> {
        let mut c = Vec::with_capacity(self.gen_orders.len());
        for &o in &self.gen_orders {
            c.push(idx % o);
            idx /= o;
        }
        c
    }

    pub fn index(&self, coords: &[u64]) -> u64 {
        let mut idx = 0u64;
        for (i, &o) in self.gen_orders.iter().enumerate().rev() {
            idx = idx * o + coords[i] % o;
        }
        idx
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let sum: Vec<u64> = ca
            .iter()
            .zip(&cb)
            .zip(&self.gen_orders)
            .map(|((x, y), o)| (x + y) % o)
            .collect();
        self.index(&sum)
    }

    pub fn neg(&self, a: u64) -> u64 {
        let c = self.coords(a);
        let n: Vec<u64> = c
            .iter()
            .zip(&self.gen_orders)
            .map(|(x, o)| (o - x) % o)
            .collect();
        self.index(&n)
    }

    /// q(gamma) mod 1.
    pub fn norm(&self, a: u64) -> QmodZ {
        let c = self.coords(a);
        let mut acc = Ratio::zero();
        for (i, &x) in c.iter().enumerate() {
            let x = x as i64;
            acc += self.diag[i] * Ratio::from_integer(x * x);
        }
        for &(i, j, b) in &self.off {
            acc += b * Ratio::from_integer(c[i] as i64 * c[j] as i64);
        }
        reduce_mod_1(acc)
    }

    /// (alpha, beta) = q(alpha + beta) - q(alpha) - q(beta) mod 1.
    pub fn bilinear(&self, a: u64, b: u64) -> QmodZ {
        let s = self.add(a, b);
        reduce_mod_1(self.norm(s) - self.norm(a) - self.norm(b))
    }
}

/// Smallest a >= 1 coprime to p with (2a/p) = delta.
fn smallest_norm_numerator(p: u64, delta: i8) -> Result<i64> {
    for a in 1..(2 * p) as i64 {
        if a % p as i64 != 0 && kronecker(2 * a, p as i64) == delta as i64 {
            return Ok(a);
        }
    }
    Err(Error::Precondition(format!(
        "no norm representative mod {p} with sign {delta}"
    )))
}
