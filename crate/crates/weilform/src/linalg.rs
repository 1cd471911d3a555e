//! Exact linear algebra over the rationals, plus a mod-p echelon mirror used
//! to screen large generator pools before exact elimination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Reduced row echelon form in place. Returns (pivot row, pivot col) pairs.
pub fn rref(m: &mut Vec<Vec<BigRational>>) -> Vec<(usize, usize)> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        // Pick the structurally simplest nonzero pivot in this column.
        let mut best: Option<usize> = None;
        for i in r..rows {
            if !m[i][c].is_zero() {
                let better = match best {
                    None => true,
                    Some(j) => complexity(&m[i][c]) < complexity(&m[j][c]),
                };
                if better {
                    best = Some(i);
                }
            }
        }
        let Some(i) = best else { continue };
        m.swap(r, i);
        let inv = BigRational::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    pivots
}

fn complexity(x: &BigRational) -> u64 {
    (x.numer().bits() + x.denom().bits()) as u64
}

/// Basis of the right nullspace {x : M x = 0} of the rows-by-cols matrix.
pub fn nullspace(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut work: Vec<Vec<BigRational>> = m.to_vec();
    let pivots = rref(&mut work);
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for f in 0..cols {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[f] = BigRational::one();
        for &(r, c) in &pivots {
            v[c] = -work[r][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solve M x = b exactly, requiring the solution to exist and be unique.
/// Returns None when inconsistent or underdetermined.
pub fn solve_unique(m: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = m.len();
    if rows == 0 {
        return None;
    }
    let cols = m[0].len();
    let mut aug: Vec<Vec<BigRational>> = m
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    // Inconsistent: pivot in the augmented column.
    if pivots.iter().any(|&(_, c)| c == cols) {
        return None;
    }
    // Underdetermined: fewer pivots than unknowns.
    if pivots.len() < cols {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for &(r, c) in &pivots {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// Mod-p screening
// ---------------------------------------------------------------------------

/// Screening prime: Mersenne 2^61 - 1 keeps products inside u128.
pub const SCREEN_P: u64 = (1u64 << 61) - 1;

pub fn mod_p(x: &BigInt) -> u64 {
    let p = BigInt::from(SCREEN_P);
    let r = x % &p;
    let r = if r.is_negative() { r + &p } else { r };
    let (_, digits) = r.to_u64_digits();
    digits.first().copied().unwrap_or(0)
}

pub fn mul_p(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % SCREEN_P as u128) as u64
}

pub fn add_p(a: u64, b: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % SCREEN_P as u128) as u64
}

pub fn sub_p(a: u64, b: u64) -> u64 {
    (a + SCREEN_P - b % SCREEN_P) % SCREEN_P
}

pub fn pow_p(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_p(acc, a);
        }
        a = mul_p(a, a);
        e >>= 1;
    }
    acc
}

pub fn inv_p(a: u64) -> u64 {
    pow_p(a, SCREEN_P - 2)
}

/// Incremental row echelon over F_p, used to test whether a candidate row is
/// independent of the rows accepted so far.
pub struct PEchelon {
    /// (pivot column, normalized row) sorted by pivot column.
    rows: Vec<(usize, Vec<u64>)>,
    width: usize,
}

impl PEchelon {
    pub fn new(width: usize) -> Self {
        PEchelon {
            rows: Vec::new(),
            width,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the current rows; if a nonzero remainder survives,
    /// absorb it and return true.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        assert_eq!(v.len(), self.width);
        for (pc, row) in &self.rows {
            let f = v[*pc];
            if f != 0 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x = sub_p(*x, mul_p(f, *y));
                }
            }
        }
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_p(v[pc]);
        for x in v.iter_mut() {
            *x = mul_p(*x, inv);
        }
        let at = self
            .rows
            .binary_search_by_key(&pc, |(c, _)| *c)
            .unwrap_err();
        self.rows.insert(at, (pc, v));
        true
    }
}
