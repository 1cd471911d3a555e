//! Jordan-component calculus for finite quadratic modules: order, level,
//! signature via the oddity formula, the transitivity classification, the
//! quadratic character, the sign vector epsilon, s(n), norm representation
//! and duality.
//!
//! Components follow the genus-symbol notation q^(sign*rank) with an oddity
//! subscript t for odd 2-adic components, e.g. "2_7^+1.3^-1".

use crate::arith::{self, kronecker};
use crate::error::{Error, Result};
use crate::series::bigfrac;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// An aggregated Jordan q-component. `oddity` is `Some(t)` exactly for odd
/// 2-adic components; even 2-adic and odd-prime components carry no subscript.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JordanComponent {
    pub prime: u64,
    /// Exponent f of the prime power q = p^f.
    pub power: u32,
    pub rank: u32,
    pub sign: i8,
    pub oddity: Option<u8>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl JordanComponent {
    pub fn odd_prime(prime: u64, power: u32, rank: u32, sign: i8) -> Result<Self> {
        JordanComponent {
            prime,
            power,
            rank,
            sign,
            oddity: None,
        }
        .validated()
    }

    pub fn two_even(power: u32, rank: u32, sign: i8) -> Result<Self> {
        JordanComponent {
            prime: 2,
            power,
            rank,
            sign,
            oddity: None,
        }
        .validated()
    }

    pub fn two_odd(power: u32, rank: u32, sign: i8, oddity: u8) -> Result<Self> {
        JordanComponent {
            prime: 2,
            power,
            rank,
            sign,
            oddity: Some(oddity),
        }
        .validated()
    }

    fn validated(self) -> Result<Self> {
        let fail = |msg: String| Err(Error::InvalidGenusSymbol(msg));
        if !is_prime(self.prime) {
            return fail(format!("{} is not prime", self.prime));
        }
        if self.power == 0 || self.rank == 0 || (self.sign != 1 && self.sign != -1) {
            return fail(format!("degenerate component {self:?}"));
        }
        if self.prime != 2 {
            if self.oddity.is_some() {
                return fail("odd-prime components carry no oddity".into());
            }
            return Ok(self);
        }
        match self.oddity {
            None => {
                // Even 2-adic: two-generator blocks, so the rank is even.
                if self.rank % 2 != 0 {
                    return fail(format!("even 2-adic component with odd rank {}", self.rank));
                }
                Ok(self)
            }
            Some(t) => {
                if t >= 8 {
                    return fail(format!("oddity {t} out of range"));
                }
                if unit_decomposition(self.rank, self.sign, t).is_none() {
                    return fail(format!(
                        "no odd 2-adic form of rank {} with sign {} and oddity {}",
                        self.rank, self.sign, t
                    ));
                }
                Ok(self)
            }
        }
    }

    /// The prime power q = p^f.
    pub fn q(&self) -> u64 {
        self.prime.pow(self.power)
    }

    pub fn is_two_odd(&self) -> bool {
        self.oddity.is_some()
    }

    /// k = 1 iff q is not a square and the sign is -1.
    fn k(&self) -> u8 {
        if self.power % 2 == 1 && self.sign == -1 {
            1
        } else {
            0
        }
    }

    /// p-excess n(q-1) + 4k mod 8 for odd p.
    pub fn p_excess(&self) -> Result<u8> {
        if self.prime == 2 {
            return Err(Error::Precondition(
                "p_excess is defined for odd p; use oddity for p = 2".into(),
            ));
        }
        let v = (self.rank as u64 * (self.q() - 1) + 4 * self.k() as u64) % 8;
        Ok(v as u8)
    }

    /// Oddity (2-excess) t + 4k mod 8 for p = 2.
    pub fn oddity_value(&self) -> Result<u8> {
        if self.prime != 2 {
            return Err(Error::Precondition(
                "oddity is defined for p = 2; use p_excess for odd p".into(),
            ));
        }
        let t = self.oddity.unwrap_or(0) as u64;
        Ok(((t + 4 * self.k() as u64) % 8) as u8)
    }

    /// Order |component| = q^rank.
    pub fn order(&self) -> u64 {
        self.q().pow(self.rank)
    }

    /// Level: q for odd p and even 2-adic components, 2q for odd 2-adic.
    pub fn level(&self) -> u64 {
        if self.is_two_odd() {
            2 * self.q()
        } else {
            self.q()
        }
    }

    fn dual(&self) -> Self {
        let mut c = self.clone();
        if self.prime != 2 {
            // Each indecomposable sign flips by (-1/p).
            if kronecker(-1, self.prime as i64) == -1 && self.rank % 2 == 1 {
                c.sign = -c.sign;
            }
        } else if let Some(t) = self.oddity {
            c.oddity = Some(((8 - t as i64) % 8) as u8);
        }
        c
    }

    fn render(&self) -> String {
        let sign = if self.sign == 1 { "+" } else { "-" };
        match self.oddity {
            Some(t) => format!("{}_{}^{}{}", self.q(), t, sign, self.rank),
            None => format!("{}^{}{}", self.q(), sign, self.rank),
        }
    }
}

/// Decompose an aggregated odd 2-adic component of the given rank, sign and
/// total oddity into unit subscripts t_i in {1,3,5,7} with sum t mod 8 and
/// product of (2/t_i) equal to the sign. Returns None when no such form
/// exists (the aggregate symbol is unrealizable).
pub fn unit_decomposition(rank: u32, sign: i8, t: u8) -> Option<Vec<u8>> {
    // dp over (count, sum mod 8, sign): reachable unit choices.
    let units = [1u8, 3, 5, 7];
    let sgn = |u: u8| if u == 1 || u == 7 { 1i8 } else { -1 };
    let mut reach = vec![vec![[false; 2]; 8]; rank as usize + 1];
    reach[0][0][0] = true; // sign index 0 = +1
    let mut choice = vec![vec![[0u8; 2]; 8]; rank as usize + 1];
    for i in 0..rank as usize {
        for s in 0..8 {
            for g in 0..2 {
                if !reach[i][s][g] {
                    continue;
                }
                for &u in &units {
                    let ns = (s + u as usize) % 8;
                    let ng = if sgn(u) == 1 { g } else { 1 - g };
                    if !reach[i + 1][ns][ng] {
                        reach[i + 1][ns][ng] = true;
                        choice[i + 1][ns][ng] = u;
                    }
                }
            }
        }
    }
    let gi = if sign == 1 { 0 } else { 1 };
    if !reach[rank as usize][t as usize % 8][gi] {
        return None;
    }
    // Backtrack a witness.
    let mut out = Vec::with_capacity(rank as usize);
    let (mut s, mut g) = (t as usize % 8, gi);
    for i in (1..=rank as usize).rev() {
        let u = choice[i][s][g];
        out.push(u);
        s = (s + 8 - u as usize) % 8;
        if sgn(u) == -1 {
            g = 1 - g;
        }
    }
    out.reverse();
    Some(out)
}

/// A discriminant form given by its Jordan decomposition, at most one
/// aggregated component per prime power.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantForm {
    components: Vec<JordanComponent>,
}

/// Local type of the quadratic character chi at an odd prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChiOdd {
    Trivial,
    Legendre,
}

/// Local type of chi at 2: one of the four quadratic characters of
/// (Z/8Z)^x, named by the discriminant of the corresponding Kronecker symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChiTwo {
    Trivial,
    MinusFour,
    Eight,
    MinusEight,
}

/// The even quadratic Dirichlet character chi mod N determined by D.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Character {
    pub modulus: u64,
    pub two: ChiTwo,
    pub odd: BTreeMap<u64, ChiOdd>,
}

impl Character {
    pub fn eval(&self, d: i64) -> i64 {
        let mut v = match self.two {
            ChiTwo::Trivial => 1,
            ChiTwo::MinusFour => kronecker(-4, d),
            ChiTwo::Eight => kronecker(8, d),
            ChiTwo::MinusEight => kronecker(-8, d),
        };
        for (&p, &t) in &self.odd {
            if t == ChiOdd::Legendre {
                v *= kronecker(d, p as i64);
            }
        }
        v
    }

    pub fn eval_at_p(&self, p: u64, d: i64) -> i64 {
        if p == 2 {
            match self.two {
                ChiTwo::Trivial => 1,
                ChiTwo::MinusFour => kronecker(-4, d),
                ChiTwo::Eight => kronecker(8, d),
                ChiTwo::MinusEight => kronecker(-8, d),
            }
        } else {
            match self.odd.get(&p) {
                Some(ChiOdd::Legendre) => kronecker(d, p as i64),
                _ => 1,
            }
        }
    }

    pub fn is_trivial_at(&self, p: u64) -> bool {
        if p == 2 {
            self.two == ChiTwo::Trivial
        } else {
            !matches!(self.odd.get(&p), Some(ChiOdd::Legendre))
        }
    }

    /// Odd part of the conductor: product of the Legendre primes.
    pub fn odd_conductor(&self) -> u64 {
        self.odd
            .iter()
            .filter(|(_, t)| **t == ChiOdd::Legendre)
            .map(|(p, _)| p)
            .product()
    }
}

/// The correspondence data (N, chi, eps): level N = 4M with M odd
/// square-free, the character chi, and the sign vector with entries at 2 and
/// at the odd primes dividing the conductor of chi.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonData {
    pub level: u64,
    pub m_odd: u64,
    pub chi: Character,
    pub eps2: i8,
    pub eps_odd: BTreeMap<u64, i8>,
}

impl EpsilonData {
    /// Allowed-exponent predicate: n = 0 or eps2 mod 4, and chi_p(n) in
    /// {0, eps_p} at every odd conductor prime.
    pub fn allows(&self, n: i64) -> bool {
        let r = n.rem_euclid(4);
        let ok2 = match self.eps2 {
            1 => r == 0 || r == 1,
            _ => r == 0 || r == 3,
        };
        if !ok2 {
            return false;
        }
        self.eps_odd
            .iter()
            .all(|(&p, &e)| kronecker(n, p as i64) != -(e as i64))
    }
}

impl DiscriminantForm {
    pub fn new(mut components: Vec<JordanComponent>) -> Result<Self> {
        for c in &components {
            c.clone().validated()?;
        }
        components.sort();
        for w in components.windows(2) {
            if w[0].prime == w[1].prime && w[0].power == w[1].power {
                return Err(Error::InvalidGenusSymbol(format!(
                    "duplicate component for prime power {}",
                    w[0].q()
                )));
            }
        }
        Ok(DiscriminantForm { components })
    }

    pub fn trivial() -> Self {
        DiscriminantForm {
            components: Vec::new(),
        }
    }

    pub fn components(&self) -> &[JordanComponent] {
        &self.components
    }

    pub fn components_at(&self, p: u64) -> Vec<&JordanComponent> {
        self.components.iter().filter(|c| c.prime == p).collect()
    }

    /// |D| = prod q^rank.
    pub fn order(&self) -> u64 {
        self.components.iter().map(|c| c.order()).product()
    }

    /// Order of the p-part |D_p|.
    pub fn order_at(&self, p: u64) -> u64 {
        self.components_at(p).iter().map(|c| c.order()).product()
    }

    /// Order |D_m| of the sum of p-parts over p | m.
    pub fn order_at_divisor(&self, m: u64) -> u64 {
        arith::factorize(m)
            .iter()
            .map(|&(p, _)| self.order_at(p))
            .product()
    }

    /// Smallest N with N q(gamma) = 0 for all gamma.
    pub fn level(&self) -> u64 {
        self.components
            .iter()
            .fold(1u64, |l, c| num_integer::lcm(l, c.level()))
    }

    pub fn oddity(&self) -> u8 {
        let s: u64 = self
            .components
            .iter()
            .filter(|c| c.prime == 2)
            .map(|c| c.oddity_value().expect("p = 2") as u64)
            .sum();
        (s % 8) as u8
    }

    pub fn p_excess_at(&self, p: u64) -> u8 {
        let s: u64 = self
            .components_at(p)
            .iter()
            .map(|c| c.p_excess().expect("odd p") as u64)
            .sum();
        (s % 8) as u8
    }

    /// Signature mod 8 via the oddity formula:
    /// sign(D) = oddity(D) - sum_{p>2} p-excess(D).
    pub fn signature(&self) -> u8 {
        let mut s = self.oddity() as i64;
        for (p, _) in self.odd_primes() {
            s -= self.p_excess_at(p) as i64;
        }
        s.rem_euclid(8) as u8
    }

    fn odd_primes(&self) -> Vec<(u64, ())> {
        let mut ps: Vec<u64> = self
            .components
            .iter()
            .filter(|c| c.prime != 2)
            .map(|c| c.prime)
            .collect();
        ps.dedup();
        ps.into_iter().map(|p| (p, ())).collect()
    }

    /// Transitivity classification.
    pub fn is_transitive(&self) -> bool {
        // Odd primes: trivial, p^{+-1}, p^{+2} (p = 3 mod 4), p^{-2} (p = 1 mod 4).
        let mut primes: Vec<u64> = self.components.iter().map(|c| c.prime).collect();
        primes.dedup();
        for p in primes {
            let comps = self.components_at(p);
            if p != 2 {
                if comps.len() != 1 {
                    return false;
                }
                let c = comps[0];
                if c.power != 1 {
                    return false;
                }
                match (c.rank, c.sign) {
                    (1, _) => {}
                    (2, 1) if p % 4 == 3 => {}
                    (2, -1) if p % 4 == 1 => {}
                    _ => return false,
                }
            } else {
                if !two_part_transitive(&comps) {
                    return false;
                }
            }
        }
        true
    }

    /// The character chi mod N determined by a transitive D of odd signature,
    /// given by its local components.
    pub fn character(&self) -> Result<Character> {
        if !self.is_transitive() {
            return Err(Error::Precondition(
                "character is defined here only for transitive D".into(),
            ));
        }
        if self.signature() % 2 == 0 {
            return Err(Error::Precondition(
                "character table requires odd signature".into(),
            ));
        }
        let n = self.level();
        let d_order = self.order() as i64;
        let mut odd = BTreeMap::new();
        for (p, _) in self.odd_primes() {
            let v = arith::valuation(self.order(), p);
            let t = if v == 1 { ChiOdd::Legendre } else { ChiOdd::Trivial };
            odd.insert(p, t);
        }
        // Odd primes dividing N but not |D| cannot occur (they share support),
        // so the map above is complete.
        let two = if self.order() % 2 != 0 {
            ChiTwo::Trivial
        } else {
            let key = kronecker(-1, d_order);
            let two_comps = self.components_at(2);
            // Odd signature + transitive leaves exactly one odd component of
            // exponent 2 or 4.
            let c = two_comps[0];
            match (c.q(), key) {
                (2, 1) => ChiTwo::Trivial,
                (2, -1) => ChiTwo::MinusFour,
                (4, 1) => ChiTwo::Eight,
                (4, -1) => ChiTwo::MinusEight,
                _ => {
                    return Err(Error::Precondition(format!(
                        "no character table entry for 2-adic part {}",
                        c.render()
                    )))
                }
            }
        };
        Ok(Character {
            modulus: n,
            two,
            odd,
        })
    }

    /// The triple (N, chi, eps) for the isomorphism pipeline. Requires the
    /// shape D_2 = 2^{+1}_t with N = 4M, M odd square-free.
    pub fn epsilon_data(&self) -> Result<EpsilonData> {
        let two = self.components_at(2);
        let t = match (two.len(), two.first()) {
            (1, Some(c)) if c.q() == 2 && c.rank == 1 && c.sign == 1 && c.is_two_odd() => {
                c.oddity.unwrap()
            }
            _ => {
                return Err(Error::Precondition(
                    "epsilon data requires D_2 = 2^{+1}_t".into(),
                ))
            }
        };
        if !self.is_transitive() {
            return Err(Error::Precondition(
                "epsilon data requires a transitive D".into(),
            ));
        }
        let n = self.level();
        let m = n / 4;
        if n % 4 != 0 || m % 2 == 0 || !arith::is_squarefree(m) {
            return Err(Error::Precondition(format!(
                "level {n} is not of the form 4M with M odd square-free"
            )));
        }
        let chi = self.character()?;
        // t enters mod-4 conditions as a sign: its class mod 4.
        let t_sign: i64 = if t % 4 == 1 { 1 } else { -1 };
        let eps2 = (t_sign * kronecker(-1, n as i64)) as i8;
        let mut eps_odd = BTreeMap::new();
        for (p, _) in self.odd_primes() {
            if chi.is_trivial_at(p) {
                continue;
            }
            let c = self.components_at(p)[0];
            let e = kronecker(2 * (m as i64) / (p as i64), p as i64) * c.sign as i64;
            eps_odd.insert(p, e as i8);
        }
        Ok(EpsilonData {
            level: n,
            m_odd: m,
            chi,
            eps2,
            eps_odd,
        })
    }

    /// The dual discriminant form: same group, negated quadratic form.
    pub fn dual(&self) -> Self {
        DiscriminantForm {
            components: {
                let mut v: Vec<_> = self.components.iter().map(|c| c.dual()).collect();
                v.sort();
                v
            },
        }
    }

    /// Whether D represents the norm n/N mod 1 (Lemma on norm membership:
    /// n = 0 or eps2 mod 4, and chi_p(n) in {0, eps_p} at conductor primes).
    pub fn represents_norm(&self, n: i64) -> Result<bool> {
        Ok(self.epsilon_data()?.allows(n))
    }

    /// s(n) = prod_{p | (M, n)} (1 + p/|D_p|), with gcd(M, 0) = M.
    pub fn s_of(&self, n: i64) -> Result<BigRational> {
        let level = self.level();
        if level % 4 != 0 {
            return Err(Error::Precondition(
                "s(n) requires level 4M".into(),
            ));
        }
        let m = level / 4;
        let mut s = BigRational::one();
        for (p, _) in arith::factorize(m) {
            let divides = n == 0 || (n.unsigned_abs() % p == 0);
            if divides {
                s *= BigRational::one() + bigfrac(p as i64, self.order_at(p) as i64);
            }
        }
        Ok(s)
    }

    /// Conway-Sloane style genus symbol, components joined by '.'.
    pub fn genus_symbol(&self) -> String {
        if self.components.is_empty() {
            return "1".into();
        }
        self.components
            .iter()
            .map(|c| c.render())
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn parse_genus_symbol(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Self::trivial());
        }
        let mut comps = Vec::new();
        for part in s.split('.') {
            comps.push(parse_component(part)?);
        }
        Self::new(comps)
    }
}

fn two_part_transitive(comps: &[&JordanComponent]) -> bool {
    match comps.len() {
        0 => true,
        1 => {
            let c = comps[0];
            match (c.q(), c.is_two_odd(), c.rank, c.sign, c.oddity.unwrap_or(0)) {
                (2, true, 1, 1, t) => t == 1 || t == 7,
                (2, true, 2, 1, t) => t == 2 || t == 6,
                (2, true, 3, 1, t) => t == 3 || t == 5,
                (2, false, 2, -1, _) => true,
                (4, true, 1, _, _) => true,
                _ => false,
            }
        }
        2 => {
            // 4^{+-1}_t + 2^{+1}_{+1}
            let (a, b) = (comps[0], comps[1]);
            let (two, four) = if a.q() == 2 { (a, b) } else { (b, a) };
            two.q() == 2
                && four.q() == 4
                && two.is_two_odd()
                && four.is_two_odd()
                && two.rank == 1
                && four.rank == 1
                && two.sign == 1
                && two.oddity == Some(1)
        }
        _ => false,
    }
}

fn parse_component(s: &str) -> Result<JordanComponent> {
    let err = || Error::InvalidGenusSymbol(format!("cannot parse component {s:?}"));
    let (head, tail) = s.split_once('^').ok_or_else(err)?;
    let (q_str, oddity) = match head.split_once('_') {
        Some((q, t)) => (q, Some(t.parse::<u8>().map_err(|_| err())?)),
        None => (head, None),
    };
    let q: u64 = q_str.parse().map_err(|_| err())?;
    let (sign, rank_str) = match tail.chars().next() {
        Some('+') => (1i8, &tail[1..]),
        Some('-') => (-1i8, &tail[1..]),
        _ => return Err(err()),
    };
    let rank: u32 = rank_str.parse().map_err(|_| err())?;
    let fac = arith::factorize(q);
    if fac.len() != 1 {
        return Err(err());
    }
    let (p, f) = fac[0];
    if p == 2 {
        match oddity {
            Some(t) => JordanComponent::two_odd(f, rank, sign, t),
            None => JordanComponent::two_even(f, rank, sign),
        }
    } else {
        if oddity.is_some() {
            return Err(err());
        }
        JordanComponent::odd_prime(p, f, rank, sign)
    }
}

/// The discriminant form of the weight-lowering O(2,1) lattice for level
/// N = 4M: D_2 = 2^{+1}_t with t = (-1/M), and D_p = p^{delta_p} with
/// delta_p = ((2M/p)/p) for p | M. Its sign vector is identically +1.
pub fn lattice_form(level: u64) -> Result<DiscriminantForm> {
    if level % 4 != 0 {
        return Err(Error::Precondition(format!(
            "level {level} is not divisible by 4"
        )));
    }
    let m = level / 4;
    if m % 2 == 0 || !arith::is_squarefree(m) {
        return Err(Error::Precondition(format!(
            "level {level} is not 4M with M odd square-free"
        )));
    }
    let t = if kronecker(-1, m as i64) == 1 { 1 } else { 7 };
    let mut comps = vec![JordanComponent::two_odd(1, 1, 1, t)?];
    for (p, _) in arith::factorize(m) {
        let delta = kronecker(2 * (m as i64) / (p as i64), p as i64) as i8;
        comps.push(JordanComponent::odd_prime(p, 1, 1, delta)?);
    }
    DiscriminantForm::new(comps)
}

/// Reconstruct D from the triple (N, odd conductor of chi, eps signs):
/// D_p = p^{eps_p * chi_p(2M/p)} at conductor primes, D_2 = 2^{+1}_t from
/// eps_2, and D_p = p^{+-2} fixed by transitivity at the remaining p | M.
pub fn form_from_triple(
    level: u64,
    odd_conductor: u64,
    eps2: i8,
    eps_odd: &BTreeMap<u64, i8>,
) -> Result<DiscriminantForm> {
    if level % 4 != 0 {
        return Err(Error::Precondition(format!(
            "level {level} is not divisible by 4"
        )));
    }
    let m = level / 4;
    if m % 2 == 0 || !arith::is_squarefree(m) {
        return Err(Error::Precondition(format!(
            "level {level} is not 4M with M odd square-free"
        )));
    }
    if odd_conductor == 0 || m % odd_conductor != 0 {
        return Err(Error::Precondition(format!(
            "conductor {odd_conductor} does not divide M = {m}"
        )));
    }
    let sign2 = eps2 as i64 * kronecker(-1, level as i64);
    let t = if sign2 == 1 { 1 } else { 7 };
    let mut comps = vec![JordanComponent::two_odd(1, 1, 1, t)?];
    for (p, _) in arith::factorize(m) {
        if odd_conductor % p == 0 {
            let e = *eps_odd.get(&p).ok_or_else(|| {
                Error::Precondition(format!("missing eps sign for conductor prime {p}"))
            })? as i64;
            let delta = e * kronecker(2 * (m as i64) / (p as i64), p as i64);
            comps.push(JordanComponent::odd_prime(p, 1, 1, delta as i8)?);
        } else {
            let sign = if p % 4 == 3 { 1 } else { -1 };
            comps.push(JordanComponent::odd_prime(p, 1, 2, sign)?);
        }
    }
    DiscriminantForm::new(comps)
}

impl fmt::Display for DiscriminantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.genus_symbol())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::big;

    fn form(sym: &str) -> DiscriminantForm {
        DiscriminantForm::parse_genus_symbol(sym).unwrap()
    }

    #[test]
    fn p_excess_values() {
        let c = JordanComponent::odd_prime(3, 1, 1, 1).unwrap();
        assert_eq!(c.p_excess().unwrap(), 2);
        let c = JordanComponent::odd_prime(3, 1, 1, -1).unwrap();
        assert_eq!(c.p_excess().unwrap(), 6);
        let c = JordanComponent::odd_prime(3, 2, 1, 1).unwrap();
        assert_eq!(c.p_excess().unwrap(), 0);
        assert!(c.oddity_value().is_err());
    }

    #[test]
    fn oddity_values() {
        let c = JordanComponent::two_odd(1, 1, 1, 7).unwrap();
        assert_eq!(c.oddity_value().unwrap(), 7);
        let c = JordanComponent::two_even(1, 2, -1).unwrap();
        assert_eq!(c.oddity_value().unwrap(), 4);
        let c = JordanComponent::two_odd(2, 1, 1, 1).unwrap();
        assert_eq!(c.oddity_value().unwrap(), 1);
        assert!(c.p_excess().is_err());
    }

    #[test]
    fn signature_examples() {
        let d = form("2_7^+1.3^-1");
        assert_eq!(d.signature(), 1);
        assert_eq!(form("2_1^+1").signature(), 1);
        assert_eq!(d.dual().signature(), 7);
        // 2k = r mod 4 cross-check for weight 1/2: 2k = 1, r = 1.
        assert_eq!(d.signature() % 4, 1);
    }

    #[test]
    fn level_examples() {
        assert_eq!(form("2_7^+1.3^-1").level(), 12);
        assert_eq!(form("3^+1").level(), 3);
        assert_eq!(form("4_1^+1").level(), 8);
        assert_eq!(form("2^-2").level(), 2);
    }

    #[test]
    fn order_and_support() {
        let d = form("2_7^+1.3^-1");
        assert_eq!(d.order(), 6);
        assert_eq!(d.order_at(2), 2);
        assert_eq!(d.order_at(3), 3);
        assert_eq!(d.order_at_divisor(3), 3);
        // level divides 2|D| and shares prime support
        assert_eq!((2 * d.order()) % d.level(), 0);
    }

    #[test]
    fn transitivity_classification() {
        assert!(form("2_7^+1.3^-1").is_transitive());
        assert!(!form("9^+1").is_transitive());
        assert!(!form("5^+2").is_transitive());
        assert!(form("5^-2").is_transitive());
        assert!(form("3^+2").is_transitive());
        assert!(!form("3^-2").is_transitive());
        assert!(form("2^-2").is_transitive());
        assert!(form("2_3^+3").is_transitive());
        assert!(form("4_1^+1.2_1^+1").is_transitive());
        assert!(!form("4_1^+1.2_7^+1").is_transitive());
        assert!(DiscriminantForm::trivial().is_transitive());
    }

    #[test]
    fn character_table() {
        // Level 12 form: chi_3 Legendre; (-1/6) = -1 and D_2 = 2^{+1} give (-4/.).
        let chi = form("2_7^+1.3^-1").character().unwrap();
        assert_eq!(chi.two, ChiTwo::MinusFour);
        assert_eq!(chi.odd[&3], ChiOdd::Legendre);
        // chi is even
        assert_eq!(chi.eval(-1), 1);

        // |D| = 2: (-1/2) = +1, so chi_2 is trivial.
        let chi = form("2_1^+1").character().unwrap();
        assert_eq!(chi.two, ChiTwo::Trivial);

        // 3 || |D| forces Legendre at 3.
        let chi = form("2_1^+1.3^+1").character().unwrap();
        assert_eq!(chi.odd[&3], ChiOdd::Legendre);

        // Even signature is rejected.
        assert!(form("2^-2").character().is_err());
    }

    #[test]
    fn epsilon_vectors() {
        let d = form("2_7^+1.3^-1");
        let e = d.epsilon_data().unwrap();
        assert_eq!(e.level, 12);
        assert_eq!(e.m_odd, 3);
        assert_eq!(e.eps2, 1);
        assert_eq!(e.eps_odd[&3], 1);

        let ed = d.dual().epsilon_data().unwrap();
        assert_eq!(ed.eps_odd[&3], -1);
        assert_eq!(ed.eps2, -1);
        // eps*_p = chi_p(-1) eps_p
        assert_eq!(
            ed.eps_odd[&3] as i64,
            e.chi.eval_at_p(3, -1) * e.eps_odd[&3] as i64
        );

        let e4 = form("2_1^+1").epsilon_data().unwrap();
        assert_eq!(e4.eps2, 1);
        assert!(e4.eps_odd.is_empty());

        // Wrong 2-adic shape is rejected.
        assert!(form("4_1^+1").epsilon_data().is_err());
    }

    #[test]
    fn dual_examples() {
        assert_eq!(form("3^-1").dual(), form("3^+1"));
        assert_eq!(form("2_7^+1").dual(), form("2_1^+1"));
        let d = form("2_7^+1.3^-1");
        assert_eq!(d.dual().dual(), d);
        assert_eq!((d.signature() + d.dual().signature()) % 8, 0);
        // p = 1 mod 4: sign is unchanged under dual
        assert_eq!(form("5^+1").dual(), form("5^+1"));
    }

    #[test]
    fn represents_norm_examples() {
        let d = form("2_7^+1.3^-1");
        assert!(d.represents_norm(1).unwrap());
        assert!(!d.represents_norm(2).unwrap());
        assert!(!d.represents_norm(7).unwrap());
        assert!(d.represents_norm(-3).unwrap());
        assert!(d.represents_norm(0).unwrap());
        assert!(d.dual().represents_norm(-1).unwrap());
    }

    #[test]
    fn s_values() {
        let d = form("2_7^+1.3^-1");
        assert_eq!(d.s_of(3).unwrap(), big(2));
        assert_eq!(d.s_of(1).unwrap(), big(1));
        assert_eq!(d.s_of(0).unwrap(), big(2));
        assert_eq!(d.s_of(-3).unwrap(), big(2));
        let d4 = form("2_1^+1");
        assert_eq!(d4.s_of(0).unwrap(), big(1));
        assert_eq!(d4.s_of(6).unwrap(), big(1));
    }

    #[test]
    fn genus_symbol_roundtrip() {
        for sym in ["2_7^+1.3^-1", "2^-2", "4_3^-1", "3^+2", "2_1^+1.3^+1.5^-1"] {
            let d = form(sym);
            assert_eq!(d.genus_symbol(), sym);
            assert_eq!(DiscriminantForm::parse_genus_symbol(&d.genus_symbol()).unwrap(), d);
        }
        assert!(DiscriminantForm::parse_genus_symbol("6^+1").is_err());
        assert!(DiscriminantForm::parse_genus_symbol("2^+5x").is_err());
        // 2^{-2}_0 odd-type is unrealizable
        assert!(DiscriminantForm::parse_genus_symbol("2_0^-2").is_err());
    }

    #[test]
    fn lattice_forms() {
        assert_eq!(lattice_form(12).unwrap(), form("2_7^+1.3^-1"));
        assert_eq!(lattice_form(4).unwrap(), form("2_1^+1"));
        assert!(lattice_form(8).is_err());
        let d = lattice_form(60).unwrap();
        let e = d.epsilon_data().unwrap();
        assert!(e.eps_odd.values().all(|&v| v == 1));
    }

    #[test]
    fn triple_reconstruction_roundtrip() {
        for level in [4u64, 12, 20, 28, 60] {
            let d = lattice_form(level).unwrap();
            let e = d.epsilon_data().unwrap();
            let back = form_from_triple(
                level,
                e.chi.odd_conductor(),
                e.eps2,
                &e.eps_odd,
            )
            .unwrap();
            assert_eq!(back, d, "level {level}");
        }
    }

    #[test]
    fn kronecker_consistency_of_character() {
        // chi_2(-1) chi_M(-1) = (-1/|D|) for the pipeline forms.
        for level in [4u64, 12, 20, 28] {
            let d = lattice_form(level).unwrap();
            let chi = d.character().unwrap();
            let lhs: i64 = chi.eval(-1);
            assert_eq!(lhs, 1, "chi must be even");
            let chi2_m1 = chi.eval_at_p(2, -1);
            let mut chim_m1 = 1;
            for (&p, _) in &chi.odd {
                chim_m1 *= chi.eval_at_p(p, -1);
            }
            assert_eq!(chi2_m1, chim_m1);
            assert_eq!(chi2_m1, kronecker(-1, d.order() as i64));
        }
    }
}
