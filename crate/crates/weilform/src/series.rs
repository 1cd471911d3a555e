//! Exact truncated Laurent series in a formal variable q^(1/N) over the
//! rationals, plus generators for the classical seed series (eta, theta, j,
//! Eisenstein) used to build modular form spaces.
//!
//! A series carries an exponent denominator `denom`; exponents live in
//! (1/denom)*Z and are stored as scaled integers. The `trunc` field is a
//! scaled exponent: coefficients at exponents >= trunc/denom are unknown,
//! i.e. the series is f + O(q^(trunc/denom)). Arithmetic never reports
//! coefficients at or beyond the combined truncation bound.

use crate::arith::{gcd, lcm};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Rational exponent of a series term.
pub type Exponent = Ratio<i64>;

pub fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn bigfrac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "SeriesRepr", try_from = "SeriesRepr")]
pub struct FracQSeries {
    /// Exponent denominator N >= 1; exponents live in (1/N)*Z.
    denom: i64,
    /// Scaled exponent -> exact nonzero coefficient. All keys < trunc.
    coeffs: BTreeMap<i64, BigRational>,
    /// Scaled truncation bound: tail O(q^(trunc/denom)).
    trunc: i64,
}

impl FracQSeries {
    /// The zero series known through exponents < trunc/denom.
    pub fn zero(denom: i64, trunc: i64) -> Self {
        assert!(denom >= 1);
        FracQSeries {
            denom,
            coeffs: BTreeMap::new(),
            trunc,
        }
    }

    /// The constant 1, with integer exponents, known through q^order.
    pub fn one(order: i64) -> Self {
        Self::constant(BigRational::one(), order)
    }

    pub fn constant(c: BigRational, order: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() && order > 0 {
            coeffs.insert(0, c);
        }
        FracQSeries {
            denom: 1,
            coeffs,
            trunc: order,
        }
    }

    /// c * q^(num/den), known through the given true exponent bound.
    pub fn monomial(c: BigRational, num: i64, den: i64, trunc_exp: Exponent) -> Self {
        assert!(den >= 1);
        let denom = lcm(den, *trunc_exp.denom());
        let key = num * (denom / den);
        let trunc = trunc_exp.numer() * (denom / trunc_exp.denom());
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() && key < trunc {
            coeffs.insert(key, c);
        }
        FracQSeries {
            denom,
            coeffs,
            trunc,
        }
    }

    /// Build from scaled (exponent, coefficient) terms. Zero coefficients and
    /// terms at or beyond trunc are dropped.
    pub fn from_scaled_terms<I>(denom: i64, terms: I, trunc: i64) -> Self
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        assert!(denom >= 1);
        let mut coeffs = BTreeMap::new();
        for (e, c) in terms {
            if e < trunc && !c.is_zero() {
                coeffs.insert(e, c);
            }
        }
        FracQSeries {
            denom,
            coeffs,
            trunc,
        }
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn trunc_scaled(&self) -> i64 {
        self.trunc
    }

    pub fn trunc_exp(&self) -> Exponent {
        Ratio::new(self.trunc, self.denom)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Iterate (scaled exponent, coefficient) pairs in ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigRational)> {
        self.coeffs.iter()
    }

    /// Coefficient at scaled exponent e; None when e is at or beyond the
    /// truncation bound (the coefficient is unknown there).
    pub fn coeff_scaled(&self, e: i64) -> Option<BigRational> {
        if e >= self.trunc {
            return None;
        }
        Some(self.coeffs.get(&e).cloned().unwrap_or_else(BigRational::zero))
    }

    /// Coefficient at true exponent num/den. Exponents outside the exponent
    /// lattice of the series are zero (if below truncation).
    pub fn coeff(&self, num: i64, den: i64) -> Option<BigRational> {
        assert!(den >= 1);
        let l = lcm(self.denom, den);
        let e = num * (l / den);
        let t = self.trunc * (l / self.denom);
        if e >= t {
            return None;
        }
        if l == self.denom {
            return self.coeff_scaled(e);
        }
        if e % (l / self.denom) != 0 {
            return Some(BigRational::zero());
        }
        self.coeff_scaled(e / (l / self.denom))
    }

    /// Coefficient at integer exponent n.
    pub fn coeff_int(&self, n: i64) -> Option<BigRational> {
        self.coeff(n, 1)
    }

    /// Leading (scaled exponent, coefficient), if any term is known.
    pub fn leading(&self) -> Option<(i64, &BigRational)> {
        self.coeffs.iter().next().map(|(e, c)| (*e, c))
    }

    pub fn leading_exp(&self) -> Option<Exponent> {
        self.leading().map(|(e, _)| Ratio::new(e, self.denom))
    }

    /// Scaled valuation for truncation bookkeeping: the leading exponent, or
    /// trunc for a (known-)zero series.
    fn valuation_for_trunc(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.trunc)
    }

    /// Re-express with denominator d (a multiple of the current one).
    pub fn with_denom(&self, d: i64) -> Self {
        assert!(d >= 1 && d % self.denom == 0);
        let f = d / self.denom;
        if f == 1 {
            return self.clone();
        }
        FracQSeries {
            denom: d,
            coeffs: self.coeffs.iter().map(|(e, c)| (e * f, c.clone())).collect(),
            trunc: self.trunc.saturating_mul(f),
        }
    }

    /// Canonical form: smallest denominator representing all exponents.
    pub fn reduced(&self) -> Self {
        let mut g = self.denom;
        for e in self.coeffs.keys() {
            g = gcd(g, *e);
            if g == 1 {
                return self.clone();
            }
        }
        if g <= 1 {
            return self.clone();
        }
        // Knowing exponents < trunc in the old grid means < ceil(trunc/g) in
        // the coarser grid.
        let trunc = if self.trunc >= 0 {
            (self.trunc + g - 1) / g
        } else {
            self.trunc / g
        };
        FracQSeries {
            denom: self.denom / g,
            coeffs: self.coeffs.iter().map(|(e, c)| (e / g, c.clone())).collect(),
            trunc,
        }
    }

    fn unified(&self, other: &Self) -> (Self, Self) {
        let d = lcm(self.denom, other.denom);
        (self.with_denom(d), other.with_denom(d))
    }

    pub fn neg(&self) -> Self {
        FracQSeries {
            denom: self.denom,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return FracQSeries::zero(self.denom, self.trunc);
        }
        FracQSeries {
            denom: self.denom,
            coeffs: self.coeffs.iter().map(|(e, k)| (*e, k * c)).collect(),
            trunc: self.trunc,
        }
    }

    /// Coefficientwise sum; truncation is the min of the two bounds.
    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.unified(other);
        let trunc = a.trunc.min(b.trunc);
        let mut coeffs = a.coeffs;
        coeffs.retain(|e, _| *e < trunc);
        for (e, c) in b.coeffs {
            if e >= trunc {
                continue;
            }
            let entry = coeffs.entry(e).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(&e);
            }
        }
        FracQSeries {
            denom: a.denom,
            coeffs,
            trunc,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Cauchy product. If a has valuation v_a and truncation t_a, the result
    /// truncation is min(v_a + t_b, v_b + t_a).
    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.unified(other);
        let trunc = (a.valuation_for_trunc() + b.trunc).min(b.valuation_for_trunc() + a.trunc);
        let mut coeffs: BTreeMap<i64, BigRational> = BTreeMap::new();
        // Iterate the sparser operand on the outside.
        let (outer, inner) = if a.coeffs.len() <= b.coeffs.len() {
            (&a, &b)
        } else {
            (&b, &a)
        };
        for (e1, c1) in &outer.coeffs {
            for (e2, c2) in &inner.coeffs {
                let e = e1 + e2;
                if e >= trunc {
                    break;
                }
                let entry = coeffs.entry(e).or_insert_with(BigRational::zero);
                *entry += c1 * c2;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        FracQSeries {
            denom: a.denom,
            coeffs,
            trunc,
        }
    }

    /// Multiplicative inverse; requires a nonzero leading term. The relative
    /// precision (number of known terms past the leading one) is preserved,
    /// so trunc becomes t - 2v.
    pub fn invert(&self) -> Result<Self> {
        let (v, lead) = match self.leading() {
            Some((v, c)) => (v, c.clone()),
            None => {
                return Err(Error::Precondition(
                    "cannot invert a series with no known nonzero term".into(),
                ))
            }
        };
        let rel = self.trunc - v;
        // u = f / (lead * q^v), so u = 1 + ...; invert u by the standard
        // convolution recurrence, then shift back.
        let mut u: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (e, c) in &self.coeffs {
            if e - v > 0 {
                u.insert(e - v, c / &lead);
            }
        }
        let mut w: BTreeMap<i64, BigRational> = BTreeMap::new();
        w.insert(0, BigRational::one());
        // Fill w ascending: w_m = -sum_{j} u_j w_{m-j}.
        for m in 1..rel {
            let mut acc = BigRational::zero();
            for (j, uc) in u.range(1..=m) {
                if let Some(wc) = w.get(&(m - j)) {
                    acc += uc * wc;
                }
            }
            if !acc.is_zero() {
                w.insert(m, -acc);
            }
        }
        let inv_lead = BigRational::one() / lead;
        let coeffs = w
            .into_iter()
            .map(|(e, c)| (e - v, c * &inv_lead))
            .collect();
        Ok(FracQSeries {
            denom: self.denom,
            coeffs,
            trunc: rel - v,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.invert()?))
    }

    /// Integer power; negative powers go through invert.
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k == 0 {
            // f^0 = 1, known to the relative precision of f.
            let rel = (self.trunc - self.valuation_for_trunc()).max(1);
            let mut one = FracQSeries::zero(self.denom, rel);
            one.coeffs.insert(0, BigRational::one());
            return Ok(one);
        }
        let base = if k < 0 { self.invert()? } else { self.clone() };
        let mut k = k.unsigned_abs();
        let mut acc: Option<FracQSeries> = None;
        let mut sq = base;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            sq = sq.mul(&sq);
        }
        Ok(acc.unwrap())
    }

    /// Substitute q -> q^m (m >= 1): exponent e/denom becomes m*e/denom.
    pub fn rescale(&self, m: i64) -> Self {
        assert!(m >= 1);
        if m == 1 {
            return self.clone();
        }
        FracQSeries {
            denom: self.denom,
            coeffs: self.coeffs.iter().map(|(e, c)| (e * m, c.clone())).collect(),
            trunc: self.trunc.saturating_mul(m),
        }
        .reduced()
    }

    /// Restrict the truncation bound to the given true exponent.
    pub fn truncate(&self, exp: Exponent) -> Self {
        let d = lcm(self.denom, *exp.denom());
        let s = self.with_denom(d);
        let t = exp.numer() * (d / exp.denom());
        let trunc = s.trunc.min(t);
        let mut coeffs = s.coeffs;
        coeffs.retain(|e, _| *e < trunc);
        FracQSeries {
            denom: d,
            coeffs,
            trunc,
        }
    }

    /// True on equal coefficients over the common truncation window.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let (a, b) = self.unified(other);
        let t = a.trunc.min(b.trunc);
        let av: Vec<_> = a.coeffs.range(..t).collect();
        let bv: Vec<_> = b.coeffs.range(..t).collect();
        av == bv
    }

    /// Exact equality of content: same reduced exponents, coefficients and
    /// truncation bound.
    pub fn same_series(&self, other: &Self) -> bool {
        self.reduced() == other.reduced()
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Euler product prod_{n>=1} (1 - q^(scale*n)) through q^order, via the
/// pentagonal number theorem (sparse: O(sqrt(order/scale)) terms).
pub fn euler_factor(scale: i64, order: i64) -> FracQSeries {
    assert!(scale >= 1 && order >= 1);
    let mut terms: Vec<(i64, BigRational)> = vec![(0, BigRational::one())];
    let mut k = 1i64;
    loop {
        let p1 = scale * k * (3 * k - 1) / 2;
        let p2 = scale * k * (3 * k + 1) / 2;
        if p1 >= order && p2 >= order {
            break;
        }
        let sign = if k % 2 == 0 { big(1) } else { big(-1) };
        if p1 < order {
            terms.push((p1, sign.clone()));
        }
        if p2 < order {
            terms.push((p2, sign));
        }
        k += 1;
    }
    FracQSeries::from_scaled_terms(1, terms, order)
}

/// Dedekind eta at scale*tau: q^(scale/24) * prod (1 - q^(scale*n)),
/// truncated at true exponent `order`. The exponent denominator is 24.
pub fn eta(scale: i64, order: i64) -> FracQSeries {
    assert!(scale >= 1 && order >= 1);
    let product = euler_factor(scale, order).with_denom(24);
    let shift = FracQSeries::monomial(
        BigRational::one(),
        scale,
        24,
        Ratio::new(24 * order + scale, 24),
    );
    product.mul(&shift).truncate(Ratio::new(order, 1))
}

/// Jacobi theta 1 + 2q + 2q^4 + 2q^9 + ... through q^order.
pub fn theta(order: i64) -> FracQSeries {
    assert!(order >= 1);
    let mut terms = vec![(0, BigRational::one())];
    let mut n = 1i64;
    while n * n < order {
        terms.push((n * n, big(2)));
        n += 1;
    }
    FracQSeries::from_scaled_terms(1, terms, order)
}

fn divisor_power_sum(n: i64, k: u32) -> BigInt {
    let mut s = BigInt::from(0);
    let mut d = 1i64;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    s
}

/// Eisenstein series E4 = 1 + 240 sum sigma_3(n) q^n.
pub fn eisenstein_e4(order: i64) -> FracQSeries {
    let mut terms = vec![(0, BigRational::one())];
    for n in 1..order {
        terms.push((
            n,
            BigRational::from_integer(BigInt::from(240) * divisor_power_sum(n, 3)),
        ));
    }
    FracQSeries::from_scaled_terms(1, terms, order)
}

/// Eisenstein series E6 = 1 - 504 sum sigma_5(n) q^n.
pub fn eisenstein_e6(order: i64) -> FracQSeries {
    let mut terms = vec![(0, BigRational::one())];
    for n in 1..order {
        terms.push((
            n,
            BigRational::from_integer(BigInt::from(-504) * divisor_power_sum(n, 5)),
        ));
    }
    FracQSeries::from_scaled_terms(1, terms, order)
}

/// Discriminant Delta = eta(tau)^24 = q prod (1-q^n)^24.
pub fn delta(order: i64) -> FracQSeries {
    assert!(order >= 2);
    let e = euler_factor(1, order - 1).pow(24).expect("positive power");
    let shift = FracQSeries::monomial(BigRational::one(), 1, 1, Ratio::new(order, 1));
    e.mul(&shift)
}

/// Modular j-invariant q^-1 + 744 + 196884q + ..., computed as E4^3 / Delta.
pub fn j_invariant(order: i64) -> FracQSeries {
    assert!(order >= 1);
    let t = order + 2;
    let e4 = eisenstein_e4(t);
    let d = delta(t);
    e4.pow(3)
        .unwrap()
        .div(&d)
        .expect("Delta has unit leading term")
        .truncate(Ratio::new(order, 1))
}

/// Exact truncated expansion of q^weyl * prod_{n>=1} (1 - q^n)^(e_n).
/// Exponents must be supplied for every n in 1..order (absent keys in that
/// range are an error, not an implicit zero).
pub fn product_expand(
    exponents: &BTreeMap<i64, i64>,
    weyl: &BigRational,
    order: i64,
) -> Result<FracQSeries> {
    assert!(order >= 1);
    for n in 1..order {
        if !exponents.contains_key(&n) {
            return Err(Error::Precondition(format!(
                "product_expand: exponent e_{n} not supplied (order {order})"
            )));
        }
    }
    let mut acc = FracQSeries::one(order);
    for n in 1..order {
        let e = exponents[&n];
        if e == 0 {
            continue;
        }
        acc = acc.mul(&binomial_factor(n, e, order));
    }
    // Shift by q^weyl.
    let wd: i64 = weyl
        .denom()
        .try_into()
        .map_err(|_| Error::Precondition("weyl denominator too large".into()))?;
    let wn: i64 = weyl
        .numer()
        .try_into()
        .map_err(|_| Error::Precondition("weyl numerator too large".into()))?;
    let shift = FracQSeries::monomial(
        BigRational::one(),
        wn,
        wd,
        Ratio::new(wn, wd) + Ratio::new(order, 1),
    );
    Ok(acc.mul(&shift))
}

/// (1 - q^n)^e as a truncated series, for any integer e.
fn binomial_factor(n: i64, e: i64, order: i64) -> FracQSeries {
    let mut terms: Vec<(i64, BigRational)> = Vec::new();
    if e >= 0 {
        // sum_j (-1)^j C(e, j) q^(nj)
        let mut c = BigInt::one();
        let mut j = 0i64;
        while n * j < order && j <= e {
            let coeff = if j % 2 == 0 { c.clone() } else { -c.clone() };
            terms.push((n * j, BigRational::from_integer(coeff)));
            c = c * BigInt::from(e - j) / BigInt::from(j + 1);
            j += 1;
        }
    } else {
        // (1-x)^(-m) = sum_j C(m-1+j, j) x^j with m = -e
        let m = -e;
        let mut c = BigInt::one();
        let mut j = 0i64;
        while n * j < order {
            terms.push((n * j, BigRational::from_integer(c.clone())));
            c = c * BigInt::from(m + j) / BigInt::from(j + 1);
            j += 1;
        }
    }
    FracQSeries::from_scaled_terms(1, terms, order)
}

/// Recover (weyl, e_n) with f = q^weyl * prod (1-q^n)^(e_n) by the
/// logarithmic-derivative recursion. Rejects unless the coefficient at the
/// leading exponent is exactly 1. Returns e_n for 1 <= n < order as exact
/// rationals (integers whenever f genuinely is such a product).
pub fn extract_exponents(
    f: &FracQSeries,
    order: i64,
) -> Result<(BigRational, BTreeMap<i64, BigRational>)> {
    let (v, lead) = match f.leading() {
        Some((v, c)) => (v, c.clone()),
        None => {
            return Err(Error::Precondition(
                "extract_exponents: series has no known nonzero term".into(),
            ))
        }
    };
    if !lead.is_one() {
        return Err(Error::Precondition(format!(
            "extract_exponents: leading coefficient {lead} != 1 after normalization"
        )));
    }
    let weyl = bigfrac(v, f.denom());
    // g = f / q^v must have integer exponent support.
    let g = FracQSeries {
        denom: f.denom(),
        coeffs: f.coeffs.iter().map(|(e, c)| (e - v, c.clone())).collect(),
        trunc: f.trunc - v,
    }
    .reduced();
    if g.denom() != 1 {
        return Err(Error::Precondition(
            "extract_exponents: fractional exponent spacing after normalization".into(),
        ));
    }
    let rel = g.trunc_scaled();
    let bound = order.min(rel);
    // A = q g'/g; A_m = -sum_{n|m} n e_n.
    let gp = FracQSeries {
        denom: 1,
        coeffs: g
            .coeffs
            .iter()
            .filter(|(e, _)| **e > 0)
            .map(|(e, c)| (*e, c * big(*e)))
            .collect(),
        trunc: rel,
    };
    let a = gp.div(&g)?;
    let mut exps: BTreeMap<i64, BigRational> = BTreeMap::new();
    for m in 1..bound {
        let am = a.coeff_int(m).unwrap_or_else(BigRational::zero);
        let mut acc = -am;
        let mut d = 1;
        while d * d <= m {
            if m % d == 0 {
                if d < m {
                    if let Some(e) = exps.get(&d) {
                        acc -= e * big(d);
                    }
                }
                let d2 = m / d;
                if d2 < m && d2 != d {
                    if let Some(e) = exps.get(&d2) {
                        acc -= e * big(d2);
                    }
                }
            }
            d += 1;
        }
        let em = acc / big(m);
        if !em.is_zero() {
            exps.insert(m, em);
        }
    }
    // Densify: callers expect every n in range.
    for n in 1..bound {
        exps.entry(n).or_insert_with(BigRational::zero);
    }
    Ok((weyl, exps))
}

// ---------------------------------------------------------------------------
// Rendering and serialization
// ---------------------------------------------------------------------------

fn render_exponent(e: i64, denom: i64) -> String {
    let r = Ratio::new(e, denom);
    if *r.denom() == 1 {
        format!("{}", r.numer())
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

impl fmt::Display for FracQSeries {
    /// Paper-style rendering: "1/2*q^-3 - 7*q + 20*q^4 + O(q^16)".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.coeffs {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let power = if *e == 0 {
                String::new()
            } else if *e == self.denom {
                "q".to_string()
            } else {
                format!("q^{}", render_exponent(*e, self.denom))
            };
            if power.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{power}")?;
            } else {
                write!(f, "{mag}*{power}")?;
            }
        }
        if first {
            write!(f, "O(q^{})", render_exponent(self.trunc, self.denom))
        } else {
            write!(f, " + O(q^{})", render_exponent(self.trunc, self.denom))
        }
    }
}

/// JSON shape: {"denom": N, "terms": [[e, "p/q"], ...], "trunc": t} with
/// scaled exponents ascending.
#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    denom: i64,
    terms: Vec<(i64, String)>,
    trunc: i64,
}

impl From<FracQSeries> for SeriesRepr {
    fn from(s: FracQSeries) -> Self {
        SeriesRepr {
            denom: s.denom,
            terms: s
                .coeffs
                .iter()
                .map(|(e, c)| (*e, c.to_string()))
                .collect(),
            trunc: s.trunc,
        }
    }
}

impl TryFrom<SeriesRepr> for FracQSeries {
    type Error = String;

    fn try_from(r: SeriesRepr) -> std::result::Result<Self, String> {
        if r.denom < 1 {
            return Err(format!("invalid series denom {}", r.denom));
        }
        let mut coeffs = BTreeMap::new();
        for (e, c) in r.terms {
            if e >= r.trunc {
                return Err(format!("term exponent {e} at or beyond trunc {}", r.trunc));
            }
            let v: BigRational = c
                .parse()
                .map_err(|err| format!("bad coefficient {c:?}: {err}"))?;
            if v.is_zero() {
                return Err("explicit zero coefficient in series terms".into());
            }
            if coeffs.insert(e, v).is_some() {
                return Err(format!("duplicate exponent {e}"));
            }
        }
        Ok(FracQSeries {
            denom: r.denom,
            coeffs,
            trunc: r.trunc,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(denom: i64, terms: &[(i64, i64)], trunc: i64) -> FracQSeries {
        FracQSeries::from_scaled_terms(
            denom,
            terms.iter().map(|&(e, c)| (e, big(c))),
            trunc,
        )
    }

    #[test]
    fn add_cancellation() {
        // (q^-1 + 1) + (-1) = q^-1
        let a = series(1, &[(-1, 1), (0, 1)], 10);
        let b = series(1, &[(0, -1)], 10);
        let s = a.add(&b);
        assert_eq!(s.coeff_int(-1).unwrap(), big(1));
        assert_eq!(s.coeff_int(0).unwrap(), big(0));
        assert_eq!(s.num_terms(), 1);
    }

    #[test]
    fn add_identity_and_symmetry() {
        let a = series(1, &[(2, 3), (5, -1)], 12);
        let z = FracQSeries::zero(1, 12);
        assert_eq!(a.add(&z), a);
        // (1/2 + q) + (1/2 - q) = 1
        let u = FracQSeries::from_scaled_terms(1, [(0, bigfrac(1, 2)), (1, big(1))], 9);
        let v = FracQSeries::from_scaled_terms(1, [(0, bigfrac(1, 2)), (1, big(-1))], 9);
        let s = u.add(&v);
        assert_eq!(s.coeff_int(0).unwrap(), big(1));
        assert_eq!(s.num_terms(), 1);
    }

    #[test]
    fn mul_exponent_cancellation() {
        let a = series(1, &[(-1, 1)], 9);
        let b = series(1, &[(1, 1)], 9);
        let p = a.mul(&b);
        assert_eq!(p.coeff_int(0).unwrap(), big(1));
        // trunc: min(v_a + t_b, v_b + t_a) = min(-1+9, 1+9) = 8
        assert_eq!(p.trunc_scaled(), 8);
    }

    #[test]
    fn mul_difference_of_squares() {
        let a = series(1, &[(0, 1), (1, 1)], 10);
        let b = series(1, &[(0, 1), (1, -1)], 10);
        let p = a.mul(&b);
        assert_eq!(p.coeff_int(0).unwrap(), big(1));
        assert_eq!(p.coeff_int(1).unwrap(), big(0));
        assert_eq!(p.coeff_int(2).unwrap(), big(-1));
    }

    #[test]
    fn theta_squared_counts_lattice_points() {
        // Brute-force r_2(n) = #{(x,y): x^2+y^2 = n} as the oracle.
        let order = 40;
        let t = theta(order);
        let sq = t.mul(&t);
        let bound = 7;
        for n in 0..order {
            let mut count = 0i64;
            for x in -bound..=bound {
                for y in -bound..=bound {
                    if x * x + y * y == n {
                        count += 1;
                    }
                }
            }
            assert_eq!(sq.coeff_int(n).unwrap(), big(count), "r_2({n})");
        }
    }

    #[test]
    fn rescale_examples() {
        let a = series(1, &[(1, 1), (2, 1)], 4);
        let r = a.rescale(3);
        assert_eq!(r.coeff_int(3).unwrap(), big(1));
        assert_eq!(r.coeff_int(6).unwrap(), big(1));
        assert_eq!(r.trunc_scaled(), 12);
        assert_eq!(a.rescale(1), a);
    }

    #[test]
    fn eta_leading_terms_match_pentagonal_oracle() {
        // Direct truncated product as the independent oracle.
        let order = 60;
        let e = eta(1, order);
        let mut oracle = FracQSeries::one(order);
        for n in 1..order {
            oracle = oracle.mul(&series(1, &[(0, 1), (n, -1)], order));
        }
        for k in 0..order {
            // eta = q^(1/24) * product: compare at exponent k + 1/24
            assert_eq!(
                e.coeff(24 * k + 1, 24).unwrap(),
                oracle.coeff_int(k).unwrap(),
                "eta coefficient at q^({k} + 1/24)"
            );
        }
    }

    #[test]
    fn eta_scale_three_leading_exponent() {
        let e = eta(3, 10);
        assert_eq!(e.leading_exp().unwrap(), Ratio::new(1, 8));
    }

    #[test]
    fn eta_rescale_consistency() {
        // rescale(eta(1), 3) agrees with eta(3) where both are known.
        let a = eta(1, 20).rescale(3);
        let b = eta(3, 20);
        assert!(a.agrees_with(&b));
    }

    #[test]
    fn eta_power_24_is_delta() {
        let order = 40;
        let d = eta(1, order).pow(24).unwrap().reduced();
        assert_eq!(d.denom(), 1);
        assert_eq!(d.coeff_int(1).unwrap(), big(1));
        assert_eq!(d.coeff_int(2).unwrap(), big(-24));
        assert_eq!(d.coeff_int(3).unwrap(), big(252));
        assert_eq!(d.coeff_int(4).unwrap(), big(-1472));
        assert!(d.agrees_with(&delta(order)));
    }

    #[test]
    fn delta_from_eisenstein_identity() {
        // 1728 Delta = E4^3 - E6^2, checked through q^30.
        let order = 31;
        let e4 = eisenstein_e4(order);
        let e6 = eisenstein_e6(order);
        let lhs = delta(order).scale(&big(1728));
        let rhs = e4.pow(3).unwrap().sub(&e6.pow(2).unwrap());
        assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn theta_known_coefficients() {
        let t = theta(20);
        assert_eq!(t.coeff_int(0).unwrap(), big(1));
        assert_eq!(t.coeff_int(4).unwrap(), big(2));
        assert_eq!(t.coeff_int(3).unwrap(), big(0));
        assert_eq!(t.coeff_int(9).unwrap(), big(2));
    }

    #[test]
    fn j_invariant_first_coefficients() {
        // 744 and 196884 double-checked against the sigma_3 convolution that
        // defines E4^3/Delta at low order.
        let j = j_invariant(4);
        assert_eq!(j.coeff_int(-1).unwrap(), big(1));
        assert_eq!(j.coeff_int(0).unwrap(), big(744));
        assert_eq!(j.coeff_int(1).unwrap(), big(196884));
        assert_eq!(j.coeff_int(2).unwrap(), big(21493760));
    }

    #[test]
    fn product_expand_eta_and_trivial() {
        let order = 30;
        let ones: BTreeMap<i64, i64> = (1..order).map(|n| (n, 1)).collect();
        let p = product_expand(&ones, &bigfrac(1, 24), order).unwrap();
        assert!(p.agrees_with(&eta(1, order)));

        let zeros: BTreeMap<i64, i64> = (1..order).map(|n| (n, 0)).collect();
        let one = product_expand(&zeros, &big(0), order).unwrap();
        assert_eq!(one.coeff_int(0).unwrap(), big(1));
        assert_eq!(one.num_terms(), 1);
    }

    #[test]
    fn product_expand_missing_exponent_rejected() {
        let mut exps: BTreeMap<i64, i64> = (1..10).map(|n| (n, 1)).collect();
        exps.remove(&5);
        assert!(product_expand(&exps, &big(0), 10).is_err());
    }

    #[test]
    fn extract_exponents_roundtrip() {
        let order = 50;
        let mut exps: BTreeMap<i64, i64> = BTreeMap::new();
        for n in 1..order {
            exps.insert(n, ((n * 7) % 11) as i64 - 5);
        }
        let f = product_expand(&exps, &bigfrac(-7, 12), order).unwrap();
        let (w, back) = extract_exponents(&f, order).unwrap();
        assert_eq!(w, bigfrac(-7, 12));
        for n in 1..order {
            assert_eq!(back[&n], big(exps[&n]), "e_{n}");
        }
    }

    #[test]
    fn extract_exponents_eta_eta3() {
        // eta(tau) eta(3tau): weyl 1/6, e_n = 2 if 3|n else 1.
        let order = 40;
        let f = eta(1, order).mul(&eta(3, order));
        let (w, e) = extract_exponents(&f, 30).unwrap();
        assert_eq!(w, bigfrac(1, 6));
        for n in 1..30 {
            let expect = if n % 3 == 0 { 2 } else { 1 };
            assert_eq!(e[&n], big(expect), "e_{n}");
        }
    }

    #[test]
    fn extract_exponents_delta() {
        let f = delta(40);
        let (w, e) = extract_exponents(&f, 30).unwrap();
        assert_eq!(w, big(1));
        for n in 1..30 {
            assert_eq!(e[&n], big(24));
        }
    }

    #[test]
    fn extract_rejects_bad_leading_coefficient() {
        let f = theta(10).scale(&big(2));
        assert!(extract_exponents(&f, 5).is_err());
    }

    #[test]
    fn truncation_soundness_for_mul() {
        let a = eta(1, 40).mul(&theta(40).with_denom(1));
        let b = eta(1, 25).mul(&theta(25).with_denom(1));
        // Recomputing at higher order and truncating agrees with computing low.
        let a_cut = a.truncate(b.trunc_exp());
        assert!(a_cut.agrees_with(&b));
        for (e, c) in b.terms() {
            assert_eq!(a.coeff_scaled(*e * a.denom() / b.denom()).unwrap(), *c);
        }
    }

    #[test]
    fn display_matches_paper_style() {
        let f = FracQSeries::from_scaled_terms(
            1,
            [(-3, bigfrac(1, 2)), (1, big(-7)), (4, big(20))],
            16,
        );
        assert_eq!(format!("{f}"), "1/2*q^-3 - 7*q + 20*q^4 + O(q^16)");
        let z = FracQSeries::zero(12, 5);
        assert_eq!(format!("{z}"), "O(q^(5/12))");
    }

    #[test]
    fn json_roundtrip() {
        let f = eta(3, 11);
        let s = serde_json::to_string(&f).unwrap();
        let back: FracQSeries = serde_json::from_str(&s).unwrap();
        assert_eq!(f, back);
        assert!(s.contains("\"denom\""));
    }

    #[test]
    fn invert_geometric() {
        let f = series(1, &[(0, 1), (1, -1)], 12);
        let g = f.invert().unwrap();
        for n in 0..12 {
            assert_eq!(g.coeff_int(n).unwrap(), big(1), "1/(1-q) at {n}");
        }
    }

    #[test]
    fn invert_with_pole_tracks_truncation() {
        // f = q^2(1 - q): inverse = q^-2 (1 + q + ...), trunc = t - 2v.
        let f = series(1, &[(2, 1), (3, -1)], 10);
        let g = f.invert().unwrap();
        assert_eq!(g.trunc_scaled(), 10 - 4);
        assert_eq!(g.coeff_int(-2).unwrap(), big(1));
        assert_eq!(g.coeff_int(-1).unwrap(), big(1));
        assert!(f.mul(&g).agrees_with(&FracQSeries::one(4)));
    }
}
