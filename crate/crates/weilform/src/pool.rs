//! Generator pools for scalar modular form spaces and the exact elimination
//! that cuts out epsilon-subspaces and echelonizes them into reduced bases.
//!
//! Generators are weakly holomorphic eta quotients over the divisors of the
//! level whose multiplier, measured against the theta multiplier system, is
//! the trivial character. Writing F = prod eta(d tau)^(r_d) and comparing
//! with theta^(2k) (itself the eta quotient eta(2t)^5 / (eta(t) eta(4t))^2),
//! the quotient has integral weight zero, so the classical eta-quotient
//! transformation criterion applies and reduces to congruences on r:
//!
//!   sum_d r_d = 2k,
//!   sum_d d r_d = 0 mod 24,             (integral order at infinity)
//!   sum_d (N/d) r_d = 0 mod 24,         (integral order at 0)
//!   sum_d v_2(d) r_d = 2k mod 2,
//!   sum_d v_l(d) r_d = 0 mod 2          (odd primes l | N)
//!
//! the last two making prod d^(r_d) a square up to the theta baseline, which
//! kills the quadratic character. Holomorphic seeds additionally satisfy the
//! cusp order conditions sum_d gcd(c,d)^2 (N/d) r_d >= 0 for all c | N.
//!
//! Theta products theta(d1 tau)...theta(d_2k tau) with square product of the
//! d_i, and the weight-one Eisenstein series for the cubic field at level 3,
//! enter as named seeds; poles are deepened by eta vectors and by the
//! j(N tau) ladder.

use crate::arith::{divisors, factorize, valuation};
use crate::error::{Error, Result};
use crate::linalg::{self, PEchelon, SCREEN_P};
use crate::series::{big, j_invariant, theta, FracQSeries};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// An eta quotient prod_{d | level} eta(d tau)^(r_d).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaQuotient {
    pub level: u64,
    /// Exponent per divisor, aligned with divisors(level).
    pub exps: Vec<i64>,
}

impl EtaQuotient {
    pub fn weight2(&self) -> i64 {
        self.exps.iter().sum()
    }

    /// 24 * (order at infinity) = sum d r_d.
    pub fn ord24(&self) -> i64 {
        divisors(self.level)
            .iter()
            .zip(&self.exps)
            .map(|(&d, &r)| d as i64 * r)
            .sum()
    }

    /// Numerator of the vanishing order at the cusp 1/c (positive multiple):
    /// sum_d gcd(c,d)^2 (N/d) r_d.
    pub fn cusp_order_numerator(&self, c: u64) -> i64 {
        divisors(self.level)
            .iter()
            .zip(&self.exps)
            .map(|(&d, &r)| {
                let g = num_integer::gcd(c, d) as i64;
                g * g * (self.level / d) as i64 * r
            })
            .sum()
    }

    pub fn is_holomorphic(&self) -> bool {
        divisors(self.level)
            .iter()
            .all(|&c| self.cusp_order_numerator(c) >= 0)
    }

    pub fn describe(&self) -> String {
        let ds = divisors(self.level);
        let parts: Vec<String> = ds
            .iter()
            .zip(&self.exps)
            .filter(|(_, &r)| r != 0)
            .map(|(&d, &r)| format!("eta({d})^{r}"))
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn l1(&self) -> i64 {
        self.exps.iter().map(|r| r.abs()).sum()
    }
}

/// Pentagonal expansion of prod_{n>=1}(1 - q^(scale n)) as sparse
/// (offset, +-1) with offset < len.
fn pentagonal_sparse(scale: i64, len: usize) -> Vec<(usize, i64)> {
    let mut out = vec![(0usize, 1i64)];
    let mut k = 1i64;
    loop {
        let p1 = scale * k * (3 * k - 1) / 2;
        let p2 = scale * k * (3 * k + 1) / 2;
        if p1 >= len as i64 && p2 >= len as i64 {
            break;
        }
        let s = if k % 2 == 0 { 1 } else { -1 };
        if p1 < len as i64 {
            out.push((p1 as usize, s));
        }
        if p2 < len as i64 {
            out.push((p2 as usize, s));
        }
        k += 1;
    }
    out.sort();
    out
}

/// Dense integer coefficients of prod_d prod_n (1 - q^(dn))^(r_d) through
/// q^(len-1), by sequential sparse pentagonal passes.
pub fn eta_product_dense_z(level: u64, exps: &[i64], len: usize) -> Vec<BigInt> {
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); len];
    acc[0] = BigInt::one();
    for (&d, &r) in divisors(level).iter().zip(exps) {
        if r == 0 {
            continue;
        }
        let sp = pentagonal_sparse(d as i64, len);
        for _ in 0..r.abs() {
            if r > 0 {
                acc = mul_sparse_z(&acc, &sp);
            } else {
                acc = div_sparse_z(&acc, &sp);
            }
        }
    }
    acc
}

fn mul_sparse_z(a: &[BigInt], sp: &[(usize, i64)]) -> Vec<BigInt> {
    let len = a.len();
    let mut out = vec![BigInt::zero(); len];
    for &(e, s) in sp {
        for i in e..len {
            if a[i - e].is_zero() {
                continue;
            }
            if s == 1 {
                out[i] += &a[i - e];
            } else {
                out[i] -= &a[i - e];
            }
        }
    }
    out
}

fn div_sparse_z(a: &[BigInt], sp: &[(usize, i64)]) -> Vec<BigInt> {
    // sp[0] = (0, 1); c[i] = a[i] - sum_{e>=1} s_e c[i-e]
    let len = a.len();
    let mut c = vec![BigInt::zero(); len];
    for i in 0..len {
        let mut v = a[i].clone();
        for &(e, s) in &sp[1..] {
            if e > i {
                break;
            }
            if c[i - e].is_zero() {
                continue;
            }
            if s == 1 {
                v -= &c[i - e];
            } else {
                v += &c[i - e];
            }
        }
        c[i] = v;
    }
    c
}

fn eta_product_dense_p(level: u64, exps: &[i64], len: usize) -> Vec<u64> {
    let mut acc: Vec<u64> = vec![0; len];
    acc[0] = 1;
    for (&d, &r) in divisors(level).iter().zip(exps) {
        if r == 0 {
            continue;
        }
        let sp = pentagonal_sparse(d as i64, len);
        for _ in 0..r.abs() {
            if r > 0 {
                acc = mul_sparse_p(&acc, &sp);
            } else {
                acc = div_sparse_p(&acc, &sp);
            }
        }
    }
    acc
}

fn mul_sparse_p(a: &[u64], sp: &[(usize, i64)]) -> Vec<u64> {
    let len = a.len();
    let mut out = vec![0u64; len];
    for &(e, s) in sp {
        for i in e..len {
            let v = a[i - e];
            if v == 0 {
                continue;
            }
            out[i] = if s == 1 {
                linalg::add_p(out[i], v)
            } else {
                linalg::sub_p(out[i], v)
            };
        }
    }
    out
}

fn div_sparse_p(a: &[u64], sp: &[(usize, i64)]) -> Vec<u64> {
    let len = a.len();
    let mut c = vec![0u64; len];
    for i in 0..len {
        let mut v = a[i] % SCREEN_P;
        for &(e, s) in &sp[1..] {
            if e > i {
                break;
            }
            let w = c[i - e];
            if w == 0 {
                continue;
            }
            v = if s == 1 {
                linalg::sub_p(v, w)
            } else {
                linalg::add_p(v, w)
            };
        }
        c[i] = v;
    }
    c
}

/// Character-trivial eta quotients of the given weight over divisors(level),
/// with 24*ord_infinity in [lo24, hi24]. Candidates are collected per order
/// bucket (keeping the sparsest) and returned sorted by l1-norm.
pub fn eta_box(
    level: u64,
    weight2: i64,
    lo24: i64,
    hi24: i64,
    holomorphic_only: bool,
    mid_radius: i64,
    r1_radius: i64,
    per_bucket: usize,
) -> Vec<EtaQuotient> {
    let ds = divisors(level);
    let nd = ds.len();
    let odd_primes: Vec<u64> = factorize(level)
        .into_iter()
        .filter(|&(p, _)| p != 2)
        .map(|(p, _)| p)
        .collect();
    // mid divisors: all but d = 1 and d = level
    let mid: Vec<u64> = ds[1..nd - 1].to_vec();
    let last = level;

    let r_last_lo =
        (lo24 - r1_radius - mid_radius * mid.iter().map(|&d| d as i64).sum::<i64>()) / last as i64
            - 1;
    let r_last_hi = mid_radius.max(r1_radius / 4);

    let mut buckets: BTreeMap<i64, Vec<EtaQuotient>> = BTreeMap::new();
    let mut mid_exps = vec![0i64; mid.len()];

    fn rec(
        level: u64,
        mid: &[u64],
        mid_exps: &mut Vec<i64>,
        pos: usize,
        mid_radius: i64,
        ctx: &mut dyn FnMut(&mut Vec<i64>),
    ) {
        if pos == mid.len() {
            ctx(mid_exps);
            return;
        }
        for r in -mid_radius..=mid_radius {
            mid_exps[pos] = r;
            rec(level, mid, mid_exps, pos + 1, mid_radius, ctx);
        }
        mid_exps[pos] = 0;
        let _ = level;
    }

    let mut visit = |mid_exps: &mut Vec<i64>| {
        let sum_mid: i64 = mid_exps.iter().sum();
        let sum_d: i64 = mid.iter().zip(mid_exps.iter()).map(|(&d, &r)| d as i64 * r).sum();
        let sum_nd: i64 = mid
            .iter()
            .zip(mid_exps.iter())
            .map(|(&d, &r)| (level / d) as i64 * r)
            .sum();
        let sum_v2: i64 = mid
            .iter()
            .zip(mid_exps.iter())
            .map(|(&d, &r)| valuation(d, 2) as i64 * r)
            .sum();
        let sum_vl: Vec<i64> = odd_primes
            .iter()
            .map(|&p| {
                mid.iter()
                    .zip(mid_exps.iter())
                    .map(|(&d, &r)| valuation(d, p) as i64 * r)
                    .sum()
            })
            .collect();
        for r_last in r_last_lo..=r_last_hi {
            let r1 = weight2 - sum_mid - r_last;
            if r1.abs() > r1_radius {
                continue;
            }
            let ord24 = r1 + sum_d + last as i64 * r_last;
            if ord24 % 24 != 0 || ord24 < lo24 || ord24 > hi24 {
                continue;
            }
            let c0 = level as i64 * r1 + sum_nd + r_last;
            if c0 % 24 != 0 {
                continue;
            }
            if (sum_v2 + valuation(last, 2) as i64 * r_last - weight2).rem_euclid(2) != 0 {
                continue;
            }
            if odd_primes.iter().zip(&sum_vl).any(|(&p, &s)| {
                (s + valuation(last, p) as i64 * r_last).rem_euclid(2) != 0
            }) {
                continue;
            }
            let mut exps = vec![0i64; nd];
            exps[0] = r1;
            for (i, &r) in mid_exps.iter().enumerate() {
                exps[i + 1] = r;
            }
            exps[nd - 1] = r_last;
            let q = EtaQuotient { level, exps };
            if holomorphic_only && !q.is_holomorphic() {
                continue;
            }
            let bucket = buckets.entry(ord24 / 24).or_default();
            bucket.push(q);
        }
    };
    rec(level, &mid, &mut mid_exps, 0, mid_radius, &mut visit);

    let mut out = Vec::new();
    for (_, mut v) in buckets {
        v.sort_by_key(|q| (q.l1(), q.exps.clone()));
        v.truncate(per_bucket);
        out.extend(v);
    }
    out.sort_by_key(|q| (q.l1(), q.exps.clone()));
    out
}

// ---------------------------------------------------------------------------
// Named seeds
// ---------------------------------------------------------------------------

/// Self-contained recipe for a pool generator, re-expandable at any order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElemKind {
    Eta(EtaQuotient),
    /// Product theta(d_1 tau) ... theta(d_2k tau).
    ThetaProduct(Vec<u64>),
    /// theta(3 tau) * E1(a tau), with E1 the weight-one level-3 Eisenstein
    /// series 1 + 6 sum (sum_{d|n} (d/3)) q^n.
    Theta3E1(u64),
    /// base * j(N tau)^pow.
    Ladder(Box<ElemKind>, u64, u32),
}

impl ElemKind {
    pub fn describe(&self) -> String {
        match self {
            ElemKind::Eta(q) => q.describe(),
            ElemKind::ThetaProduct(ds) => ds
                .iter()
                .map(|d| format!("theta({d})"))
                .collect::<Vec<_>>()
                .join("*"),
            ElemKind::Theta3E1(a) => format!("theta(3)*E1({a})"),
            ElemKind::Ladder(b, n, p) => format!("{}*j({n})^{p}", b.describe()),
        }
    }

    /// Leading exponent (in q-units).
    pub fn lead(&self) -> i64 {
        match self {
            ElemKind::Eta(q) => q.ord24() / 24,
            ElemKind::ThetaProduct(_) | ElemKind::Theta3E1(_) => 0,
            ElemKind::Ladder(b, n, p) => b.lead() - (*n as i64) * (*p as i64),
        }
    }

    /// Exact expansion with coefficients known through q^(order-1).
    pub fn expand(&self, order: i64) -> FracQSeries {
        match self {
            ElemKind::Eta(q) => {
                let ord = q.ord24() / 24;
                let len = (order - ord).max(0) as usize;
                let dense = eta_product_dense_z(q.level, &q.exps, len);
                FracQSeries::from_scaled_terms(
                    1,
                    dense
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(i, c)| (ord + i as i64, BigRational::from_integer(c))),
                    order,
                )
            }
            ElemKind::ThetaProduct(ds) => {
                let mut acc = FracQSeries::one(order);
                for &d in ds {
                    acc = acc.mul(&theta(order).rescale(d as i64).truncate((order, 1).into()));
                }
                acc
            }
            ElemKind::Theta3E1(a) => {
                let th3 = theta(order).rescale(3).truncate((order, 1).into());
                let e1 = e1_series(order).rescale(*a as i64).truncate((order, 1).into());
                th3.mul(&e1)
            }
            ElemKind::Ladder(base, n, p) => {
                let shift = (*n as i64) * (*p as i64);
                let inner = base.expand(order + shift);
                // Extra depth so the p-fold product keeps precision past order.
                let j_order = (order - self.lead()) / (*n as i64) + (*p as i64) + 3;
                let j = j_invariant(j_order)
                    .rescale(*n as i64)
                    .pow(*p as i64)
                    .expect("j power");
                inner.mul(&j).truncate((order, 1).into())
            }
        }
    }
}

/// E1 = 1 + 6 sum_{n>=1} (sum_{d|n} (d/3)) q^n, the weight-one Eisenstein
/// series of level 3 and character (./3).
pub fn e1_series(order: i64) -> FracQSeries {
    let mut terms = vec![(0i64, BigRational::one())];
    for n in 1..order {
        let mut s = 0i64;
        let mut d = 1i64;
        while d * d <= n {
            if n % d == 0 {
                s += crate::arith::kronecker(d, 3);
                let e = n / d;
                if e != d {
                    s += crate::arith::kronecker(e, 3);
                }
            }
            d += 1;
        }
        if s != 0 {
            terms.push((n, big(6 * s)));
        }
    }
    FracQSeries::from_scaled_terms(1, terms, order)
}

/// Named non-eta seeds per (level, weight): theta products with square
/// divisor product, plus the E1 family at level 12 weight 3/2.
pub fn named_seeds(level: u64, weight2: i64) -> Vec<ElemKind> {
    let mut out = Vec::new();
    let m = level / 4;
    // theta(d tau) multisets over divisors of M with square product
    let ds = divisors(m);
    let mut multiset = Vec::new();
    collect_theta_products(&ds, weight2 as usize, 0, &mut multiset, &mut out);
    if level == 12 && weight2 == 3 {
        for a in [1u64, 2, 4] {
            out.push(ElemKind::Theta3E1(a));
        }
    }
    out
}

fn collect_theta_products(
    ds: &[u64],
    slots: usize,
    from: usize,
    cur: &mut Vec<u64>,
    out: &mut Vec<ElemKind>,
) {
    if cur.len() == slots {
        let prod: u64 = cur.iter().product();
        let r = (prod as f64).sqrt().round() as u64;
        if r * r == prod {
            out.push(ElemKind::ThetaProduct(cur.clone()));
        }
        return;
    }
    for i in from..ds.len() {
        cur.push(ds[i]);
        collect_theta_products(ds, slots, i, cur, out);
        cur.pop();
    }
}

// ---------------------------------------------------------------------------
// Pool assembly and exact elimination
// ---------------------------------------------------------------------------

pub struct PoolOptions {
    pub level: u64,
    pub weight2: i64,
    /// Window of exponent columns [lo, hi] used for screening/elimination.
    pub lo: i64,
    pub hi: i64,
    pub holomorphic_only: bool,
    /// Apply the j(N tau) ladder to accepted generators.
    pub ladder: bool,
    /// Widens the search box (used to confirm rank stabilization).
    pub radius_bump: i64,
}

pub struct Pool {
    pub elems: Vec<ElemKind>,
    /// Exact window rows, aligned with elems; columns lo..=hi.
    pub rows: Vec<Vec<BigRational>>,
    pub lo: i64,
    pub hi: i64,
}

fn series_window_row(s: &FracQSeries, lo: i64, hi: i64) -> Option<Vec<BigRational>> {
    if s.denom() != 1 || s.trunc_scaled() <= hi {
        return None;
    }
    Some(
        (lo..=hi)
            .map(|e| s.coeff_scaled(e).unwrap_or_else(BigRational::zero))
            .collect(),
    )
}

fn row_mod_p(row: &[BigRational]) -> Option<Vec<u64>> {
    let mut out = Vec::with_capacity(row.len());
    for x in row {
        let d = linalg::mod_p(x.denom());
        if d == 0 {
            return None;
        }
        let n = linalg::mod_p(x.numer());
        out.push(linalg::mul_p(n, linalg::inv_p(d)));
    }
    Some(out)
}

/// Assemble a generator pool: named seeds, the eta box, and (optionally) the
/// j(N tau) ladder over accepted generators, keeping only elements that
/// enlarge the span over the window (checked mod p, stored exactly).
pub fn build_pool(opt: &PoolOptions) -> Result<Pool> {
    let width = (opt.hi - opt.lo + 1) as usize;
    let mut screen = PEchelon::new(width);
    let mut elems: Vec<ElemKind> = Vec::new();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();

    let mut try_accept = |kind: ElemKind,
                          screen: &mut PEchelon,
                          elems: &mut Vec<ElemKind>,
                          rows: &mut Vec<Vec<BigRational>>|
     -> Result<bool> {
        if kind.lead() > opt.hi {
            return Ok(false);
        }
        // Fast mod-p screen for eta elements; exact path for the rest.
        let prow = match &kind {
            ElemKind::Eta(q) => {
                let ord = q.ord24() / 24;
                let len = (opt.hi + 1 - ord).max(0) as usize;
                let dense = eta_product_dense_p(q.level, &q.exps, len);
                let mut row = vec![0u64; width];
                for (i, v) in dense.into_iter().enumerate() {
                    let e = ord + i as i64;
                    if e >= opt.lo && e <= opt.hi {
                        row[(e - opt.lo) as usize] = v;
                    }
                }
                Some(row)
            }
            _ => None,
        };
        let prow = match prow {
            Some(r) => r,
            None => {
                let s = kind.expand(opt.hi + 1);
                let row = series_window_row(&s, opt.lo, opt.hi).ok_or_else(|| {
                    Error::MathInconsistency(format!(
                        "pool element {} has fractional exponents",
                        kind.describe()
                    ))
                })?;
                match row_mod_p(&row) {
                    Some(r) => r,
                    None => vec![1; width], // cannot screen; force exact insert attempt
                }
            }
        };
        if !screen.insert(prow) {
            return Ok(false);
        }
        let s = kind.expand(opt.hi + 1);
        let row = series_window_row(&s, opt.lo, opt.hi).ok_or_else(|| {
            Error::MathInconsistency(format!(
                "pool element {} has fractional exponents",
                kind.describe()
            ))
        })?;
        elems.push(kind);
        rows.push(row);
        Ok(true)
    };

    // Phase 1: named seeds.
    for kind in named_seeds(opt.level, opt.weight2) {
        if opt.holomorphic_only || kind.lead() >= opt.lo {
            try_accept(kind, &mut screen, &mut elems, &mut rows)?;
        }
    }

    // Phase 2: eta box.
    let nd = divisors(opt.level).len();
    let (mid_radius, r1_radius) = if nd <= 3 {
        (40 + opt.radius_bump, 60 + opt.radius_bump)
    } else {
        (12 + opt.radius_bump, 30 + opt.radius_bump)
    };
    let per_bucket = 32;
    let lo24 = if opt.holomorphic_only { 0 } else { opt.lo * 24 };
    let hi24 = (opt.hi.min(if opt.holomorphic_only { opt.hi } else { 13 })) * 24;
    let boxed = eta_box(
        opt.level,
        opt.weight2,
        lo24,
        hi24,
        opt.holomorphic_only,
        mid_radius,
        r1_radius,
        per_bucket,
    );
    for q in boxed {
        try_accept(ElemKind::Eta(q), &mut screen, &mut elems, &mut rows)?;
    }

    // Phase 3: ladder over the accepted generators.
    if opt.ladder {
        let base: Vec<ElemKind> = elems.clone();
        for kind in base {
            let lead = kind.lead();
            let max_pow = ((lead - opt.lo) / opt.level as i64).max(0) as u32;
            for p in 1..=max_pow {
                let lad = ElemKind::Ladder(Box::new(kind.clone()), opt.level, p);
                try_accept(lad, &mut screen, &mut elems, &mut rows)?;
            }
        }
    }

    Ok(Pool {
        elems,
        rows,
        lo: opt.lo,
        hi: opt.hi,
    })
}

/// A span element with provenance: window row plus the combination of pool
/// generators that produced it.
pub struct SpanRow {
    pub row: Vec<BigRational>,
    pub combo: Vec<(usize, BigRational)>,
}

/// Intersect the pool span with the linear conditions "coefficient vanishes
/// at every window exponent failing `allowed`", then echelonize by leading
/// exponent (ascending) with full reduction at the other pivots.
pub fn constrained_echelon(
    pool: &Pool,
    allowed: impl Fn(i64) -> bool,
) -> Vec<SpanRow> {
    let width = (pool.hi - pool.lo + 1) as usize;
    let fcols: Vec<usize> = (0..width)
        .filter(|&j| !allowed(pool.lo + j as i64))
        .collect();
    // Nullspace of the (rows x fcols) matrix.
    let mat: Vec<Vec<BigRational>> = fcols
        .iter()
        .map(|&j| pool.rows.iter().map(|r| r[j].clone()).collect())
        .collect();
    let combos = if fcols.is_empty() {
        // No constraints: span of everything.
        (0..pool.rows.len())
            .map(|i| {
                let mut v = vec![BigRational::zero(); pool.rows.len()];
                v[i] = BigRational::one();
                v
            })
            .collect()
    } else {
        linalg::nullspace(&mat)
    };

    let mut span: Vec<SpanRow> = combos
        .into_iter()
        .map(|x| {
            let mut row = vec![BigRational::zero(); width];
            for (i, c) in x.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (j, v) in pool.rows[i].iter().enumerate() {
                    if !v.is_zero() {
                        row[j] += v * c;
                    }
                }
            }
            let combo = x
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .collect();
            SpanRow { row, combo }
        })
        .collect();

    echelonize(&mut span, width);
    span
}

/// In-place echelonization of span rows by leading window column, with full
/// reduction (each row vanishes at every other pivot) and pivot 1.
fn echelonize(span: &mut Vec<SpanRow>, width: usize) {
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (col, row index)
    let mut done: Vec<SpanRow> = Vec::new();
    loop {
        // Reduce all remaining rows by current pivots, find the lowest lead.
        let mut best: Option<(usize, usize)> = None; // (lead col, idx)
        for (i, r) in span.iter().enumerate() {
            if let Some(c) = r.row.iter().position(|x| !x.is_zero()) {
                if best.map_or(true, |(bc, _)| c < bc) {
                    best = Some((c, i));
                }
            }
        }
        let Some((c, i)) = best else { break };
        let mut piv = span.swap_remove(i);
        let inv = BigRational::one() / piv.row[c].clone();
        scale_row(&mut piv, &inv);
        for r in span.iter_mut() {
            reduce_at(r, &piv, c);
        }
        for r in done.iter_mut() {
            reduce_at(r, &piv, c);
        }
        pivots.push((c, done.len()));
        done.push(piv);
    }
    done.sort_by_key(|r| r.row.iter().position(|x| !x.is_zero()).unwrap_or(width));
    *span = done;
}

fn scale_row(r: &mut SpanRow, f: &BigRational) {
    for x in r.row.iter_mut() {
        if !x.is_zero() {
            *x *= f;
        }
    }
    for (_, c) in r.combo.iter_mut() {
        *c *= f;
    }
}

fn reduce_at(r: &mut SpanRow, piv: &SpanRow, c: usize) {
    if r.row[c].is_zero() {
        return;
    }
    let f = r.row[c].clone();
    for (x, y) in r.row.iter_mut().zip(&piv.row) {
        if !y.is_zero() {
            *x -= y * &f;
        }
    }
    let mut map: BTreeMap<usize, BigRational> = r.combo.iter().cloned().collect();
    for (i, c2) in &piv.combo {
        let e = map.entry(*i).or_insert_with(BigRational::zero);
        *e -= c2 * &f;
        if e.is_zero() {
            map.remove(i);
        }
    }
    r.combo = map.into_iter().collect();
}

/// Evaluate a combination of pool elements at full order.
pub fn expand_combo(
    elems: &[ElemKind],
    combo: &[(usize, BigRational)],
    order: i64,
) -> FracQSeries {
    let mut acc = FracQSeries::zero(1, order);
    for (i, c) in combo {
        acc = acc.add(&elems[*i].expand(order).scale(c));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_is_a_valid_quotient() {
        // theta = eta(2)^5 / (eta(1) eta(4))^2 at level 4.
        let q = EtaQuotient {
            level: 4,
            exps: vec![-2, 5, -2],
        };
        assert_eq!(q.weight2(), 1);
        assert_eq!(q.ord24(), 0);
        assert!(q.is_holomorphic());
        let s = ElemKind::Eta(q).expand(20);
        assert!(s.agrees_with(&theta(20)));
    }

    #[test]
    fn box_finds_theta_at_level_4() {
        let found = eta_box(4, 1, 0, 0, true, 10, 10, 16);
        assert!(found.iter().any(|q| q.exps == vec![-2, 5, -2]));
    }

    #[test]
    fn box_respects_character_conditions() {
        // Every candidate at level 12 weight 1/2 has integral orders at
        // infinity and zero, and square auxiliary product.
        let found = eta_box(12, 1, -72, 48, false, 6, 14, 8);
        assert!(!found.is_empty());
        for q in &found {
            assert_eq!(q.weight2(), 1);
            assert_eq!(q.ord24() % 24, 0);
            assert_eq!(q.cusp_order_numerator(1) % 24, 0);
        }
    }

    #[test]
    fn dense_kernels_match_series_path() {
        let q = EtaQuotient {
            level: 12,
            exps: vec![2, -3, 1, 0, 1, 0],
        };
        let len = 40usize;
        let dense = eta_product_dense_z(12, &q.exps, len);
        // Oracle: straight FracQSeries products of euler factors.
        let mut oracle = crate::series::FracQSeries::one(len as i64);
        for (&d, &r) in divisors(12).iter().zip(&q.exps) {
            if r != 0 {
                oracle = oracle
                    .mul(&crate::series::euler_factor(d as i64, len as i64).pow(r).unwrap());
            }
        }
        for (i, c) in dense.iter().enumerate() {
            assert_eq!(
                oracle.coeff_int(i as i64).unwrap(),
                BigRational::from_integer(c.clone()),
                "coefficient {i}"
            );
        }
        let densep = eta_product_dense_p(12, &q.exps, len);
        for (i, v) in densep.iter().enumerate() {
            assert_eq!(*v, linalg::mod_p(&dense[i]));
        }
    }

    #[test]
    fn e1_matches_known_expansion() {
        let e = e1_series(12);
        let expect = [1, 6, 0, 6, 6, 0, 0, 12, 6, 6, 0, 0];
        for (n, &c) in expect.iter().enumerate() {
            assert_eq!(e.coeff_int(n as i64).unwrap(), big(c), "q^{n}");
        }
    }

    #[test]
    fn named_seeds_at_12_3() {
        let seeds = named_seeds(12, 3);
        // theta^3, theta theta3^2, and the three E1 products.
        assert!(seeds.contains(&ElemKind::ThetaProduct(vec![1, 1, 1])));
        assert!(seeds.contains(&ElemKind::ThetaProduct(vec![1, 3, 3])));
        assert!(seeds.contains(&ElemKind::Theta3E1(1)));
        assert_eq!(seeds.len(), 5);
    }

    #[test]
    fn ladder_expansion_consistency() {
        let th = ElemKind::ThetaProduct(vec![1]);
        let lad = ElemKind::Ladder(Box::new(th.clone()), 4, 1);
        assert_eq!(lad.lead(), -4);
        let s = lad.expand(10);
        let oracle = th
            .expand(14)
            .mul(&j_invariant(5).rescale(4))
            .truncate((10, 1).into());
        assert!(s.agrees_with(&oracle));
    }
}
