//! Scalar modular form spaces with the epsilon-condition: seed spaces,
//! reduced bases of weakly holomorphic forms via the j(N tau) ladder,
//! Hurwitz class numbers, the projected Eisenstein series, and Zagier
//! duality checking.

use crate::discriminant::{DiscriminantForm, EpsilonData};
use crate::error::{Error, Result};
use crate::linalg;
use crate::pool::{self, ElemKind, Pool, PoolOptions};
use crate::series::{big, bigfrac, FracQSeries};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Levels with registered seed recipes.
pub const SUPPORTED_LEVELS: &[u64] = &[4, 12];

pub fn check_supported(level: u64) -> Result<()> {
    if SUPPORTED_LEVELS.contains(&level) {
        Ok(())
    } else {
        Err(Error::UnsupportedLevel(level))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    Weak,
    Holomorphic,
    Cuspidal,
}

/// A scalar space A^eps(N, k, chi') described by its discriminant form D,
/// the half-integral weight k (stored as 2k), and the kind of growth at the
/// cusps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonSpaceSpec {
    form: DiscriminantForm,
    eps: EpsilonData,
    weight2: i64,
    kind: SpaceKind,
}

impl EpsilonSpaceSpec {
    pub fn new(form: DiscriminantForm, weight2: i64, kind: SpaceKind) -> Result<Self> {
        if weight2.rem_euclid(2) != 1 {
            return Err(Error::Precondition(format!(
                "weight numerator 2k = {weight2} must be odd"
            )));
        }
        let eps = form.epsilon_data()?;
        let r = form.signature() as i64;
        if (weight2 - r).rem_euclid(4) != 0 {
            return Err(Error::Precondition(format!(
                "2k = {weight2} does not satisfy 2k = r mod 4 (signature {r})"
            )));
        }
        for (p, _) in crate::arith::factorize(eps.m_odd) {
            if eps.chi.is_trivial_at(p) {
                return Err(Error::Precondition(format!(
                    "chi_{p} = 1: the reduced-basis pipeline requires chi_p != 1 for p | M"
                )));
            }
        }
        Ok(EpsilonSpaceSpec {
            form,
            eps,
            weight2,
            kind,
        })
    }

    pub fn form(&self) -> &DiscriminantForm {
        &self.form
    }

    pub fn eps(&self) -> &EpsilonData {
        &self.eps
    }

    pub fn level(&self) -> u64 {
        self.eps.level
    }

    pub fn m_odd(&self) -> u64 {
        self.eps.m_odd
    }

    /// 2k.
    pub fn weight2(&self) -> i64 {
        self.weight2
    }

    pub fn weight_string(&self) -> String {
        format!("{}/2", self.weight2)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn with_kind(&self, kind: SpaceKind) -> Self {
        let mut s = self.clone();
        s.kind = kind;
        s
    }

    /// The complementary space over the dual form, of weight 2 - k.
    pub fn dual(&self, kind: SpaceKind) -> Result<Self> {
        EpsilonSpaceSpec::new(self.form.dual(), 4 - self.weight2, kind)
    }

    /// Exponents permitted by the epsilon-condition.
    pub fn allowed_exponent(&self, n: i64) -> bool {
        self.eps.allows(n)
    }

    pub fn s_of(&self, n: i64) -> BigRational {
        self.form.s_of(n).expect("level 4M checked at construction")
    }
}

fn gamma0_index(level: u64) -> i64 {
    let mut idx = level as i64;
    for (p, _) in crate::arith::factorize(level) {
        idx = idx / p as i64 * (p as i64 + 1);
    }
    idx
}

/// Sturm-style elimination depth: ceil(k [SL2 : Gamma0(N)] / 12).
fn sturm_bound(level: u64, weight2: i64) -> i64 {
    let idx = gamma0_index(level);
    (weight2 * idx + 23) / 24
}

/// A reduced basis: the echelonized family f_m = (1/s(m)) q^m + O(q^(m+1))
/// of the epsilon-space, with the exists/obstructed partition of allowed
/// exponents in range.
#[derive(Serialize, Deserialize)]
pub struct ReducedBasis {
    pub spec: EpsilonSpaceSpec,
    pub min_exp: i64,
    pub order: i64,
    pub forms: BTreeMap<i64, FracQSeries>,
    pub exists: BTreeSet<i64>,
    pub obstructed: BTreeSet<i64>,
    #[serde(skip)]
    elems: Vec<ElemKind>,
    #[serde(skip)]
    combos: BTreeMap<i64, Vec<(usize, BigRational)>>,
}

impl ReducedBasis {
    pub fn form(&self, m: i64) -> Option<&FracQSeries> {
        self.forms.get(&m)
    }

    /// Re-expand f_m at a higher truncation from its generator combination.
    pub fn form_at_order(&self, m: i64, order: i64) -> Result<FracQSeries> {
        if order <= self.order {
            return self
                .form(m)
                .map(|f| f.truncate((order, 1).into()))
                .ok_or_else(|| Error::Precondition(format!("no reduced form f_{m}")));
        }
        let combo = self.combos.get(&m).ok_or_else(|| {
            Error::Precondition(format!(
                "no expansion provenance for f_{m} (deserialized basis?)"
            ))
        })?;
        Ok(pool::expand_combo(&self.elems, combo, order))
    }
}

/// Build the reduced basis of the space. For weak spaces, `min_exp` bounds
/// the admitted pole order at infinity; holomorphic and cuspidal kinds
/// ignore it (leads start at 0 resp. 1).
pub fn build_weak_basis(spec: &EpsilonSpaceSpec, min_exp: i64, order: i64) -> Result<ReducedBasis> {
    build_basis_inner(spec, min_exp, order, true)
}

/// Reduced basis of the holomorphic subspace M^eps (or S^eps).
pub fn holomorphic_reduced_basis(spec: &EpsilonSpaceSpec, order: i64) -> Result<ReducedBasis> {
    build_basis_inner(spec, 0, order, true)
}

fn build_basis_inner(
    spec: &EpsilonSpaceSpec,
    min_exp: i64,
    order: i64,
    cross_check: bool,
) -> Result<ReducedBasis> {
    check_supported(spec.level())?;
    let min_exp = match spec.kind {
        SpaceKind::Weak => min_exp,
        SpaceKind::Holomorphic => 0,
        SpaceKind::Cuspidal => 1,
    };
    if min_exp > 0 && spec.kind == SpaceKind::Weak {
        return Err(Error::Precondition("min_exp must be <= 0".into()));
    }
    let needed = min_exp.abs() + 16;
    if order < needed {
        return Err(Error::InsufficientOrder {
            needed,
            got: order,
        });
    }

    let weak = spec.kind == SpaceKind::Weak;
    // Elimination bound: Sturm-style depth plus the pole budget and margin;
    // the post-hoc full-truncation vanishing check below guards against this
    // bound being too small.
    let b_elim = (sturm_bound(spec.level(), spec.weight2) + min_exp.abs() + 2 + 24)
        .min(order - 1);
    let lo = if weak { min_exp - 12 } else { 0 };

    let pool = pool::build_pool(&PoolOptions {
        level: spec.level(),
        weight2: spec.weight2,
        lo,
        hi: b_elim,
        holomorphic_only: !weak,
        ladder: weak,
        radius_bump: 0,
    })?;

    let cuspidal = spec.kind == SpaceKind::Cuspidal;
    let span = pool::constrained_echelon(&pool, |e| {
        spec.allowed_exponent(e) && !(cuspidal && e <= 0)
    });

    let mut forms = BTreeMap::new();
    let mut combos = BTreeMap::new();
    let mut exists = BTreeSet::new();
    for row in span {
        let Some(c) = row.row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        let m = lo + c as i64;
        if m < min_exp {
            continue;
        }
        // Normalize the leading coefficient from 1 to 1/s(m).
        let scale = BigRational::one() / spec.s_of(m);
        let combo: Vec<(usize, BigRational)> = row
            .combo
            .iter()
            .map(|(i, c)| (*i, c * &scale))
            .collect();
        let series = pool::expand_combo(&pool.elems, &combo, order);
        forms.insert(m, series);
        combos.insert(m, combo);
        exists.insert(m);
    }

    // Post-hoc validation: the epsilon-condition must hold through the full
    // truncation, the leading coefficient must be exactly 1/s(m), and tails
    // must vanish at the other leads (the reduced property).
    for (&m, f) in &forms {
        match f.leading() {
            Some((e, c)) if e == m && *c == BigRational::one() / spec.s_of(m) => {}
            other => {
                return Err(Error::MathInconsistency(format!(
                    "f_{m} has wrong leading term {other:?}"
                )))
            }
        }
        for (&e, c) in f.terms() {
            if !spec.allowed_exponent(e) {
                return Err(Error::MathInconsistency(format!(
                    "f_{m} violates the epsilon-condition at q^{e} (coefficient {c}); \
                     elimination bound too small"
                )));
            }
            if e > m && exists.contains(&e) && !c.is_zero() {
                return Err(Error::MathInconsistency(format!(
                    "f_{m} is not reduced: nonzero tail at existing lead {e}"
                )));
            }
        }
    }

    let max_report = exists.iter().max().copied().unwrap_or(0).max(0);
    let obstructed: BTreeSet<i64> = (min_exp..=max_report)
        .filter(|&n| spec.allowed_exponent(n) && !exists.contains(&n))
        .collect();

    let basis = ReducedBasis {
        spec: spec.clone(),
        min_exp,
        order,
        forms,
        exists,
        obstructed,
        elems: pool.elems,
        combos,
    };

    if weak && cross_check {
        obstruction_cross_check(&basis)?;
    }
    Ok(basis)
}

/// Existence by the duality obstruction: f_m (m < 0) exists iff -m is not a
/// lead of the dual holomorphic reduced basis; non-negative leads must match
/// the holomorphic subspace of the same space.
fn obstruction_cross_check(basis: &ReducedBasis) -> Result<()> {
    let spec = &basis.spec;
    let holo_order = basis.min_exp.abs() + 40;
    let dual_spec = spec.dual(SpaceKind::Holomorphic)?;
    let dual_holo = build_basis_inner(&dual_spec, 0, holo_order, false)?;
    let self_holo = build_basis_inner(&spec.with_kind(SpaceKind::Holomorphic), 0, holo_order, false)?;

    for m in basis.min_exp..=0 {
        if !spec.allowed_exponent(m) {
            continue;
        }
        let predicted = if m < 0 {
            !dual_holo.exists.contains(&-m)
        } else {
            self_holo.exists.contains(&m)
        };
        let computed = basis.exists.contains(&m);
        if predicted != computed {
            return Err(Error::MathInconsistency(format!(
                "existence of f_{m} disagrees with the obstruction criterion \
                 (computed {computed}, predicted {predicted}); generator pool deficient"
            )));
        }
    }
    // Positive leads are exactly the cusp-form leads of the same space.
    for &m in basis.exists.iter().filter(|&&m| m > 0) {
        if !self_holo.exists.contains(&m) {
            return Err(Error::MathInconsistency(format!(
                "weak basis has positive lead {m} absent from the holomorphic subspace"
            )));
        }
    }
    Ok(())
}

/// Existence of the reduced form f_m, cross-validated against the dual
/// obstruction criterion (this is built into basis construction).
pub fn existence(spec: &EpsilonSpaceSpec, m: i64, order: i64) -> Result<bool> {
    if !spec.allowed_exponent(m) {
        return Err(Error::Precondition(format!(
            "exponent {m} is not allowed by the epsilon-condition"
        )));
    }
    let basis = build_weak_basis(spec, m.min(0), order)?;
    Ok(basis.exists.contains(&m))
}

/// Echelonized generating set of the full holomorphic space M(N, k, 1)
/// (trivial character, no epsilon-condition), leading coefficients 1.
/// The rank is validated by radius stabilization of the seed search.
pub fn seed_forms(level: u64, weight2: i64, order: i64) -> Result<Vec<FracQSeries>> {
    check_supported(level)?;
    let b = (sturm_bound(level, weight2) + 8).min(order - 1);
    let build = |bump: i64| -> Result<Pool> {
        pool::build_pool(&PoolOptions {
            level,
            weight2,
            lo: 0,
            hi: b,
            holomorphic_only: true,
            ladder: false,
            radius_bump: bump,
        })
    };
    let p0 = build(0)?;
    let p1 = build(3)?;
    if p0.elems.len() != p1.elems.len() {
        return Err(Error::MathInconsistency(format!(
            "seed span for level {level}, 2k = {weight2} did not stabilize \
             ({} vs {} generators)",
            p0.elems.len(),
            p1.elems.len()
        )));
    }
    let span = pool::constrained_echelon(&p0, |_| true);
    Ok(span
        .into_iter()
        .map(|r| pool::expand_combo(&p0.elems, &r.combo, order))
        .collect())
}

// ---------------------------------------------------------------------------
// Hurwitz class numbers and the Eisenstein series G
// ---------------------------------------------------------------------------

/// Hurwitz class number H(n): H(0) = -1/12, H(n) = 0 for n = 1, 2 mod 4,
/// else the weighted count of reduced positive-definite binary quadratic
/// forms of discriminant -n (weight 1/2 for multiples of x^2+y^2, 1/3 for
/// multiples of x^2+xy+y^2).
pub fn hurwitz(n: i64) -> BigRational {
    assert!(n >= 0);
    if n == 0 {
        return bigfrac(-1, 12);
    }
    match n % 4 {
        1 | 2 => return BigRational::zero(),
        _ => {}
    }
    // Reduced forms (a, b, c): -a < b <= a <= c, b >= 0 if a = c or b = a;
    // enumerate b >= 0 with matching parity and factor (n + b^2)/4 = ac.
    let mut sixfold = 0i64; // count in units of 1/6
    let start_b = if n % 4 == 0 { 0 } else { 1 };
    let mut b = start_b;
    while 3 * b * b <= n {
        let ac = (n + b * b) / 4;
        let mut a = std::cmp::max(b, 1);
        while a * a <= ac {
            if ac % a == 0 {
                let c = ac / a;
                // weights: (a,0,a) -> 1/2, (a,a,a) -> 1/3, else 1 per class;
                // classes: +-b distinct unless b = 0, b = a, or a = c.
                sixfold += if b == 0 && a == c {
                    3
                } else if b == a && a == c {
                    2
                } else if b == 0 || b == a || a == c {
                    6
                } else {
                    12
                };
            }
            a += 1;
        }
        b += 2;
    }
    bigfrac(sixfold, 6)
}

/// Holomorphic part G = sum H(n) q^n of Zagier's weight-3/2 form.
pub fn eisenstein_g(order: i64) -> FracQSeries {
    FracQSeries::from_scaled_terms(1, (0..order).map(|n| (n, hurwitz(n))), order)
}

/// The projected series G^(eps*) = sum H*(n) q^n: the unique correction of G
/// by a holomorphic weight-3/2 form of level N that vanishes at all
/// exponents forbidden for the dual sign vector.
pub fn eisenstein_g_epsilon(form: &DiscriminantForm, order: i64) -> Result<FracQSeries> {
    let level = form.level();
    check_supported(level)?;
    let dual_eps = form.dual().epsilon_data()?;
    let seeds = seed_forms(level, 3, order)?;
    let g = eisenstein_g(order);
    let forbidden: Vec<i64> = (0..order).filter(|&n| !dual_eps.allows(n)).collect();
    let mat: Vec<Vec<BigRational>> = forbidden
        .iter()
        .map(|&n| {
            seeds
                .iter()
                .map(|s| s.coeff_int(n).unwrap_or_else(BigRational::zero))
                .collect()
        })
        .collect();
    let rhs: Vec<BigRational> = forbidden
        .iter()
        .map(|&n| g.coeff_int(n).unwrap_or_else(BigRational::zero))
        .collect();
    let x = linalg::solve_unique(&mat, &rhs).ok_or_else(|| {
        Error::NoSolution(
            "no unique holomorphic correction for G; seed span deficient or M^eps* nonzero"
                .into(),
        )
    })?;
    let mut out = g;
    for (s, c) in seeds.iter().zip(&x) {
        if !c.is_zero() {
            out = out.sub(&s.scale(c));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Zagier duality
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityPair {
    pub m: i64,
    pub d: i64,
    /// a_m(-d)
    pub lhs: String,
    /// a*_d(-m)
    pub rhs: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityReport {
    pub pairs: Vec<DualityPair>,
    pub violations: usize,
}

impl DualityReport {
    pub fn ok(&self) -> bool {
        self.violations == 0
    }
}

/// Check a_m(-d) = -a*_d(-m) for every pair of reduced forms present in the
/// two bases with both coefficients inside truncation.
pub fn duality_check(a: &ReducedBasis, b: &ReducedBasis) -> Result<DualityReport> {
    if b.spec.form() != &a.spec.form().dual() {
        return Err(Error::Precondition(
            "duality_check requires bases over dual discriminant forms".into(),
        ));
    }
    if a.spec.weight2() + b.spec.weight2() != 4 {
        return Err(Error::Precondition(
            "duality_check requires weights k and 2 - k".into(),
        ));
    }
    let mut pairs = Vec::new();
    let mut violations = 0;
    for (&m, fm) in &a.forms {
        for (&d, fd) in &b.forms {
            let (Some(lhs), Some(rhs)) = (fm.coeff_int(-d), fd.coeff_int(-m)) else {
                continue;
            };
            let ok = lhs == -rhs.clone();
            if !ok {
                violations += 1;
            }
            pairs.push(DualityPair {
                m,
                d,
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
                ok,
            });
        }
    }
    if pairs.is_empty() {
        return Err(Error::InsufficientOrder {
            needed: a.min_exp.abs() + b.min_exp.abs(),
            got: a.order.min(b.order),
        });
    }
    Ok(DualityReport { pairs, violations })
}

/// Residue pairing sum_n s(n) a_m(n) a*_d(-n) over the full finite overlap
/// window [m, -d]. Vanishes for true dual pairs.
pub fn residue_pairing(
    fm: &FracQSeries,
    fd_star: &FracQSeries,
    form: &DiscriminantForm,
) -> Result<BigRational> {
    let m = fm
        .leading_exp()
        .ok_or_else(|| Error::Precondition("zero form".into()))?;
    let d = fd_star
        .leading_exp()
        .ok_or_else(|| Error::Precondition("zero form".into()))?;
    if *m.denom() != 1 || *d.denom() != 1 {
        return Err(Error::Precondition("integral leads required".into()));
    }
    let (m, d) = (*m.numer(), *d.numer());
    let mut acc = BigRational::zero();
    for n in m..=(-d) {
        let a = fm
            .coeff_int(n)
            .ok_or(Error::InsufficientOrder { needed: -d + 1, got: fm.trunc_scaled() })?;
        let b = fd_star
            .coeff_int(-n)
            .ok_or(Error::InsufficientOrder { needed: -m + 1, got: fd_star.trunc_scaled() })?;
        if a.is_zero() || b.is_zero() {
            continue;
        }
        acc += form.s_of(n).expect("4M level") * a * b;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discriminant::lattice_form;

    fn spec12_half() -> EpsilonSpaceSpec {
        EpsilonSpaceSpec::new(lattice_form(12).unwrap(), 1, SpaceKind::Weak).unwrap()
    }

    fn spec12_dual() -> EpsilonSpaceSpec {
        spec12_half().dual(SpaceKind::Weak).unwrap()
    }

    #[test]
    fn allowed_exponents_level_12() {
        let s = spec12_half();
        for n in [1i64, 4, 9, 12, 0, -3, -8, -11] {
            assert!(s.allowed_exponent(n), "{n} should be allowed");
        }
        for n in [2i64, 7, 11, -1, -4, 3] {
            assert!(!s.allowed_exponent(n), "{n} should be forbidden");
        }
        let d = spec12_dual();
        for n in [-1i64, 0, 3, 8, 11, 12, -4, -9, -12] {
            assert!(d.allowed_exponent(n), "dual: {n} should be allowed");
        }
        for n in [1i64, 2, 4, -3] {
            assert!(!d.allowed_exponent(n), "dual: {n} should be forbidden");
        }
    }

    #[test]
    fn spec_rejects_weight_parity_mismatch() {
        // signature 1 forces 2k = 1 mod 4
        assert!(EpsilonSpaceSpec::new(lattice_form(12).unwrap(), 3, SpaceKind::Weak).is_err());
        assert!(EpsilonSpaceSpec::new(lattice_form(12).unwrap(), 5, SpaceKind::Weak).is_ok());
    }

    #[test]
    fn hurwitz_small_values() {
        assert_eq!(hurwitz(0), bigfrac(-1, 12));
        assert_eq!(hurwitz(3), bigfrac(1, 3));
        assert_eq!(hurwitz(4), bigfrac(1, 2));
        assert_eq!(hurwitz(7), big(1));
        assert_eq!(hurwitz(8), big(1));
        assert_eq!(hurwitz(11), big(1));
        assert_eq!(hurwitz(12), bigfrac(4, 3));
        assert_eq!(hurwitz(16), bigfrac(3, 2));
        assert_eq!(hurwitz(1), big(0));
        assert_eq!(hurwitz(2), big(0));
        assert_eq!(hurwitz(23), big(3));
    }

    #[test]
    fn eisenstein_g_leading_terms() {
        let g = eisenstein_g(13);
        assert_eq!(g.coeff_int(0).unwrap(), bigfrac(-1, 12));
        assert_eq!(g.coeff_int(3).unwrap(), bigfrac(1, 3));
        assert_eq!(g.coeff_int(4).unwrap(), bigfrac(1, 2));
        assert_eq!(g.coeff_int(2).unwrap(), big(0));
        assert_eq!(g.coeff_int(12).unwrap(), bigfrac(4, 3));
    }

    #[test]
    fn seed_space_level_12_weight_3_halves() {
        // The echelon basis must reproduce the classical dimension-3 space
        // with leads 0, 1, 2.
        let seeds = seed_forms(12, 3, 14).unwrap();
        assert_eq!(seeds.len(), 3);
        let g0 = &seeds[0];
        assert_eq!(g0.coeff_int(0).unwrap(), big(1));
        assert_eq!(g0.coeff_int(1).unwrap(), big(0));
        assert_eq!(g0.coeff_int(2).unwrap(), big(0));
        assert_eq!(g0.coeff_int(3).unwrap(), big(2));
        assert_eq!(g0.coeff_int(4).unwrap(), big(6));
        assert_eq!(g0.coeff_int(7).unwrap(), big(12));
        let g1 = &seeds[1];
        assert_eq!(g1.coeff_int(1).unwrap(), big(1));
        assert_eq!(g1.coeff_int(3).unwrap(), big(1));
        assert_eq!(g1.coeff_int(4).unwrap(), big(2));
        assert_eq!(g1.coeff_int(6).unwrap(), big(2));
        assert_eq!(g1.coeff_int(9).unwrap(), big(1));
        assert_eq!(g1.coeff_int(10).unwrap(), big(4));
        let g2 = &seeds[2];
        assert_eq!(g2.coeff_int(2).unwrap(), big(1));
        assert_eq!(g2.coeff_int(4).unwrap(), big(-1));
        assert_eq!(g2.coeff_int(5).unwrap(), big(2));
        assert_eq!(g2.coeff_int(8).unwrap(), big(1));
        assert_eq!(g2.coeff_int(11).unwrap(), big(2));
    }

    #[test]
    fn seed_space_dimensions() {
        assert_eq!(seed_forms(4, 1, 20).unwrap().len(), 1);
        assert_eq!(seed_forms(12, 1, 20).unwrap().len(), 1);
        assert_eq!(seed_forms(4, 3, 20).unwrap().len(), 1);
        assert!(seed_forms(10, 1, 20).is_err());
    }

    #[test]
    fn g_epsilon_projection_level_12() {
        let d = lattice_form(12).unwrap();
        let ge = eisenstein_g_epsilon(&d, 12).unwrap();
        assert_eq!(ge.coeff_int(0).unwrap(), bigfrac(-1, 6));
        assert_eq!(ge.coeff_int(3).unwrap(), bigfrac(1, 6));
        assert_eq!(ge.coeff_int(4).unwrap(), big(0));
        assert_eq!(ge.coeff_int(8).unwrap(), big(1));
        assert_eq!(ge.coeff_int(11).unwrap(), big(1));
        for n in [1i64, 2, 5, 6, 7, 9, 10] {
            assert_eq!(ge.coeff_int(n).unwrap(), big(0), "q^{n}");
        }
    }

    #[test]
    fn g_epsilon_level_4_is_g() {
        let d = lattice_form(4).unwrap();
        let ge = eisenstein_g_epsilon(&d, 16).unwrap();
        assert!(ge.agrees_with(&eisenstein_g(16)));
    }

    #[test]
    fn golden_basis_level_12_weight_half() {
        let basis = build_weak_basis(&spec12_half(), -11, 32).unwrap();
        assert_eq!(
            basis.exists.iter().copied().collect::<Vec<_>>(),
            vec![-11, -8, -3, 0]
        );

        let f0 = basis.form(0).unwrap();
        assert_eq!(f0.coeff_int(0).unwrap(), bigfrac(1, 2));
        assert_eq!(f0.coeff_int(1).unwrap(), big(1));
        assert_eq!(f0.coeff_int(4).unwrap(), big(1));
        assert_eq!(f0.coeff_int(9).unwrap(), big(1));
        assert_eq!(f0.coeff_int(12).unwrap(), big(0));

        let f3 = basis.form(-3).unwrap();
        assert_eq!(f3.coeff_int(-3).unwrap(), bigfrac(1, 2));
        assert_eq!(f3.coeff_int(1).unwrap(), big(-7));
        assert_eq!(f3.coeff_int(4).unwrap(), big(20));
        assert_eq!(f3.coeff_int(9).unwrap(), big(-39));
        assert_eq!(f3.coeff_int(12).unwrap(), big(84));
        assert_eq!(f3.coeff_int(13).unwrap(), big(-189));

        let f8 = basis.form(-8).unwrap();
        assert_eq!(f8.coeff_int(-8).unwrap(), big(1));
        assert_eq!(f8.coeff_int(1).unwrap(), big(-34));
        assert_eq!(f8.coeff_int(4).unwrap(), big(-188));
        assert_eq!(f8.coeff_int(9).unwrap(), big(2430));
        assert_eq!(f8.coeff_int(12).unwrap(), big(8262));
        assert_eq!(f8.coeff_int(13).unwrap(), big(-11968));

        let f11 = basis.form(-11).unwrap();
        assert_eq!(f11.coeff_int(-11).unwrap(), big(1));
        assert_eq!(f11.coeff_int(1).unwrap(), big(22));
        assert_eq!(f11.coeff_int(4).unwrap(), big(-552));
        assert_eq!(f11.coeff_int(9).unwrap(), big(-11178));
        assert_eq!(f11.coeff_int(12).unwrap(), big(48600));
        assert_eq!(f11.coeff_int(13).unwrap(), big(76175));
    }

    #[test]
    fn golden_basis_level_12_dual() {
        let basis = build_weak_basis(&spec12_dual(), -12, 32).unwrap();
        assert_eq!(
            basis.exists.iter().copied().collect::<Vec<_>>(),
            vec![-12, -9, -4, -1]
        );

        let f1 = basis.form(-1).unwrap();
        assert_eq!(f1.coeff_int(-1).unwrap(), big(1));
        assert_eq!(f1.coeff_int(0).unwrap(), big(-1));
        assert_eq!(f1.coeff_int(3).unwrap(), big(7));
        assert_eq!(f1.coeff_int(8).unwrap(), big(34));
        assert_eq!(f1.coeff_int(11).unwrap(), big(-22));
        assert_eq!(f1.coeff_int(12).unwrap(), big(-26));

        let f4 = basis.form(-4).unwrap();
        assert_eq!(f4.coeff_int(-4).unwrap(), big(1));
        assert_eq!(f4.coeff_int(0).unwrap(), big(-1));
        assert_eq!(f4.coeff_int(3).unwrap(), big(-20));
        assert_eq!(f4.coeff_int(8).unwrap(), big(188));
        assert_eq!(f4.coeff_int(11).unwrap(), big(552));
        assert_eq!(f4.coeff_int(12).unwrap(), big(-701));

        let f9 = basis.form(-9).unwrap();
        assert_eq!(f9.coeff_int(-9).unwrap(), bigfrac(1, 2));
        assert_eq!(f9.coeff_int(0).unwrap(), big(-1));
        assert_eq!(f9.coeff_int(3).unwrap(), big(39));
        assert_eq!(f9.coeff_int(8).unwrap(), big(-2430));
        assert_eq!(f9.coeff_int(11).unwrap(), big(11178));
        assert_eq!(f9.coeff_int(12).unwrap(), big(-8826));

        let f12 = basis.form(-12).unwrap();
        assert_eq!(f12.coeff_int(-12).unwrap(), bigfrac(1, 2));
        assert_eq!(f12.coeff_int(0).unwrap(), big(0));
        assert_eq!(f12.coeff_int(3).unwrap(), big(-84));
        assert_eq!(f12.coeff_int(8).unwrap(), big(-8262));
        assert_eq!(f12.coeff_int(11).unwrap(), big(-48600));
        assert_eq!(f12.coeff_int(12).unwrap(), big(-41412));
    }

    #[test]
    fn duality_small_window() {
        let a = build_weak_basis(&spec12_half(), -11, 32).unwrap();
        let b = build_weak_basis(&spec12_dual(), -12, 32).unwrap();
        let rep = duality_check(&a, &b).unwrap();
        assert!(rep.ok(), "violations: {:?}", rep.pairs.iter().filter(|p| !p.ok).collect::<Vec<_>>());
        // spot values from the golden tables
        let find = |m: i64, d: i64| {
            rep.pairs
                .iter()
                .find(|p| p.m == m && p.d == d)
                .unwrap()
                .clone()
        };
        assert_eq!(find(-3, -1).lhs, "-7");
        assert_eq!(find(-3, -1).rhs, "7");
        assert_eq!(find(-8, -4).lhs, "-188");
        assert_eq!(find(-11, -12).lhs, "48600");
    }

    #[test]
    fn residue_pairing_vanishes() {
        let a = build_weak_basis(&spec12_half(), -11, 32).unwrap();
        let b = build_weak_basis(&spec12_dual(), -12, 32).unwrap();
        let form = lattice_form(12).unwrap();
        for &m in &[-3i64, -8, -11] {
            for &d in &[-1i64, -4, -9, -12] {
                let s = residue_pairing(a.form(m).unwrap(), b.form(d).unwrap(), &form).unwrap();
                assert!(s.is_zero(), "pairing (f_{m}, f*_{d}) = {s}");
            }
        }
    }

    #[test]
    fn existence_examples() {
        let s = spec12_half();
        assert!(existence(&s, -3, 24).unwrap());
        assert!(existence(&s, 0, 24).unwrap());
        assert!(existence(&s, -4, 24).is_err()); // not allowed
        // f_0 and f*_0 cannot both exist
        let d = spec12_dual();
        let db = build_weak_basis(&d, -1, 24).unwrap();
        assert!(!db.exists.contains(&0));
    }

    #[test]
    fn level_4_basis_matches_classical_values() {
        let s4 = EpsilonSpaceSpec::new(lattice_form(4).unwrap(), 1, SpaceKind::Weak).unwrap();
        let basis = build_weak_basis(&s4, -7, 30).unwrap();
        assert_eq!(
            basis.exists.iter().copied().collect::<Vec<_>>(),
            vec![-7, -4, -3, 0]
        );
        // f_0 = theta
        let f0 = basis.form(0).unwrap();
        assert_eq!(f0.coeff_int(0).unwrap(), big(1));
        assert_eq!(f0.coeff_int(1).unwrap(), big(2));
        // Borcherds-Zagier: f_{-3} = q^-3 - 248 q + 26752 q^4 - ...
        let f3 = basis.form(-3).unwrap();
        assert_eq!(f3.coeff_int(-3).unwrap(), big(1));
        assert_eq!(f3.coeff_int(1).unwrap(), big(-248));
        assert_eq!(f3.coeff_int(4).unwrap(), big(26752));
        // f_{-4} = q^-4 + 492 q + 143376 q^4 + ...
        let f4 = basis.form(-4).unwrap();
        assert_eq!(f4.coeff_int(1).unwrap(), big(492));
        assert_eq!(f4.coeff_int(4).unwrap(), big(143376));
    }

    #[test]
    fn holomorphic_reduced_bases() {
        let s = spec12_half().with_kind(SpaceKind::Holomorphic);
        let hb = holomorphic_reduced_basis(&s, 24).unwrap();
        assert_eq!(hb.exists.iter().copied().collect::<Vec<_>>(), vec![0]);
        // f_0 = theta/2
        assert_eq!(hb.form(0).unwrap().coeff_int(1).unwrap(), big(1));

        // Dual weight 3/2 holomorphic eps*-space is zero.
        let d = spec12_dual().with_kind(SpaceKind::Holomorphic);
        let dbasis = holomorphic_reduced_basis(&d, 24).unwrap();
        assert!(dbasis.exists.is_empty());

        // Cuspidal subspace of weight 1/2 is zero.
        let c = spec12_half().with_kind(SpaceKind::Cuspidal);
        let cbasis = holomorphic_reduced_basis(&c, 24).unwrap();
        assert!(cbasis.exists.is_empty());
    }
}
