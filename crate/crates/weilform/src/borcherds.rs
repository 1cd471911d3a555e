//! The O(2,1) Borcherds lift of a weakly holomorphic form in the plus space:
//! Weyl exponent, infinite-product expansion q^rho prod (1-q^n)^(s(n^2)c(n^2)),
//! CM divisor orders, and eta-quotient identification of the product.

use crate::discriminant::DiscriminantForm;
use crate::error::{Error, Result};
use crate::series::{self, big, FracQSeries};
use crate::spaces;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Result of matching a lift against eta quotients over a divisor pool.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum EtaMatch {
    /// The lift is exactly prod_d eta(d tau)^(r_d).
    Exact { exponents: BTreeMap<u64, i64> },
    /// Best eta quotient divided out; the cofactor starts at q^0 with
    /// constant term 1 (a holomorphic-form candidate).
    Cofactor {
        exponents: BTreeMap<u64, i64>,
        cofactor: FracQSeries,
    },
    None,
}

#[derive(Serialize, Deserialize)]
pub struct BorcherdsLift {
    /// The input form f = sum c(n) q^n.
    pub source: FracQSeries,
    /// s(0) c(0).
    pub weight: BigRational,
    /// Weyl exponent rho = -sum s(n) c(-n) H*(n).
    pub weyl_rho: BigRational,
    /// e_n = s(n^2) c(n^2) for n = 1..=order.
    pub exponents: BTreeMap<i64, i64>,
    /// q^rho prod (1 - q^n)^(e_n), exact through the requested order.
    pub expansion: FracQSeries,
    /// Nonzero CM divisor orders: discriminant -> sum_n s(D n^2) c(D n^2).
    pub divisors: BTreeMap<i64, i64>,
    pub eta_match: EtaMatch,
}

/// The finite sum rho = -sum_{n >= 0, c(-n) != 0} s(n) c(-n) H*(n), with
/// H*(n) read from the projected Eisenstein series.
pub fn weyl_vector(
    form: &DiscriminantForm,
    f: &FracQSeries,
    hstar: &FracQSeries,
) -> Result<BigRational> {
    let f = f.reduced();
    if f.denom() != 1 {
        return Err(Error::Precondition("integral exponents required".into()));
    }
    let mut rho = BigRational::zero();
    for (&e, c) in f.terms() {
        if e > 0 {
            break;
        }
        let n = -e;
        let h = hstar.coeff_int(n).ok_or(Error::InsufficientOrder {
            needed: n + 1,
            got: hstar.trunc_scaled(),
        })?;
        rho -= form.s_of(n)? * c * h;
    }
    Ok(rho)
}

/// Integrality screen: s(n) c(n) must be an integer for every n <= 0 in the
/// principal part (theorem precondition). Returns the offending n on failure.
fn integrality_check(form: &DiscriminantForm, f: &FracQSeries) -> Result<()> {
    for (&n, c) in f.terms() {
        if n > 0 {
            break;
        }
        let v = form.s_of(n)? * c;
        if !v.denom().is_one() {
            return Err(Error::IntegralityViolation {
                n,
                value: v.to_string(),
            });
        }
    }
    Ok(())
}

/// CM divisor orders sum_{n>=1} s(D n^2) c(D n^2) for the requested negative
/// discriminants. The sum terminates because only exponents down to the
/// pole order of f contribute.
pub fn cm_divisor_orders(
    form: &DiscriminantForm,
    f: &FracQSeries,
    discs: &[i64],
) -> Result<BTreeMap<i64, i64>> {
    let f = f.reduced();
    let lead = f
        .leading_exp()
        .map(|e| *e.numer())
        .unwrap_or(0);
    let mut out = BTreeMap::new();
    for &disc in discs {
        if disc >= 0 {
            return Err(Error::Precondition(format!(
                "CM discriminants are negative, got {disc}"
            )));
        }
        let mut order = BigRational::zero();
        let mut n = 1i64;
        while disc * n * n >= lead {
            let arg = disc * n * n;
            let c = f.coeff_int(arg).unwrap_or_else(BigRational::zero);
            if !c.is_zero() {
                order += form.s_of(arg)? * c;
            }
            n += 1;
        }
        if !order.denom().is_one() {
            return Err(Error::IntegralityViolation {
                n: disc,
                value: order.to_string(),
            });
        }
        let num: BigInt = order.to_integer();
        let num: i64 = i64::try_from(&num)
            .map_err(|_| Error::Precondition("divisor order overflow".into()))?;
        out.insert(disc, num);
    }
    Ok(out)
}

/// Assemble the full Borcherds lift of f through q^order. Requires c(n^2)
/// for all n <= order: exceeding the truncation of f is an error, not a
/// silent zero.
pub fn lift(
    form: &DiscriminantForm,
    f: &FracQSeries,
    order: i64,
    eta_pool: &[u64],
) -> Result<BorcherdsLift> {
    let f = f.reduced();
    if f.denom() != 1 {
        return Err(Error::Precondition(
            "lift input must have integral exponents".into(),
        ));
    }
    integrality_check(form, &f)?;
    if order < 1 {
        return Err(Error::Precondition("lift order must be >= 1".into()));
    }
    if order * order >= f.trunc_scaled() {
        return Err(Error::InsufficientOrder {
            needed: order * order + 1,
            got: f.trunc_scaled(),
        });
    }

    let max_pole = f.leading_exp().map(|e| (-*e.numer()).max(0)).unwrap_or(0);
    let hstar = spaces::eisenstein_g_epsilon(form, max_pole + 2)?;
    let weyl_rho = weyl_vector(form, &f, &hstar)?;
    let weight = form.s_of(0)? * f.coeff_int(0).unwrap_or_else(BigRational::zero);

    let mut exponents = BTreeMap::new();
    for n in 1..=order {
        let c = f.coeff_int(n * n).expect("within truncation");
        let v = form.s_of(n * n)? * c;
        debug_assert!(v.denom().is_one(), "s(n^2)c(n^2) integral for n > 0");
        let e: i64 = i64::try_from(&v.to_integer())
            .map_err(|_| Error::Precondition(format!("exponent e_{n} overflow")))?;
        exponents.insert(n, e);
    }

    let expansion = series::product_expand(&exponents, &weyl_rho, order + 1)?;

    let lead = f.leading_exp().map(|e| *e.numer()).unwrap_or(0);
    let mut divisors = BTreeMap::new();
    if lead < 0 {
        let all = cm_divisor_orders(form, &f, &(lead..0).collect::<Vec<_>>())?;
        divisors.extend(all.into_iter().filter(|(_, v)| *v != 0));
    }

    let eta_match = eta_quotient_match(&expansion, &weyl_rho, &exponents, eta_pool)?;
    Ok(BorcherdsLift {
        source: f,
        weight,
        weyl_rho,
        exponents,
        expansion,
        divisors,
        eta_match,
    })
}

/// Match q^rho prod (1-q^n)^(e_n) against prod_d eta(d tau)^(r_d) over the
/// divisor pool. Exact match first (Moebius-triangular solve and full
/// verification); otherwise the minimal-l1 exponent vector with
/// sum d r_d = 24 rho is divided out and the cofactor reported when it is
/// holomorphic-looking (integral nonnegative exponents, constant term 1).
pub fn eta_quotient_match(
    expansion: &FracQSeries,
    rho: &BigRational,
    exponents: &BTreeMap<i64, i64>,
    pool: &[u64],
) -> Result<EtaMatch> {
    if pool.is_empty() || exponents.is_empty() {
        return Ok(EtaMatch::None);
    }
    let mut pool: Vec<u64> = pool.to_vec();
    pool.sort();
    pool.dedup();

    // Exact attempt: r_d = e_d - sum_{d' | d, d' < d} r_{d'}.
    let mut r: BTreeMap<u64, i64> = BTreeMap::new();
    let mut solvable = true;
    for &d in &pool {
        let Some(&ed) = exponents.get(&(d as i64)) else {
            solvable = false;
            break;
        };
        let lower: i64 = pool
            .iter()
            .filter(|&&d2| d2 < d && d % d2 == 0)
            .map(|d2| r[d2])
            .sum();
        r.insert(d, ed - lower);
    }
    if solvable && verify_eta_exponents(&r, exponents, rho) {
        return Ok(EtaMatch::Exact { exponents: r });
    }

    // Fallback: minimal l1 vector with sum d r_d = 24 rho.
    let target = rho * big(24);
    if !target.denom().is_one() {
        return Ok(EtaMatch::None);
    }
    let target: i64 = match i64::try_from(&target.to_integer()) {
        Ok(v) => v,
        Err(_) => return Ok(EtaMatch::None),
    };
    let Some(best) = minimal_l1_solution(&pool, target, 30) else {
        return Ok(EtaMatch::None);
    };
    let r: BTreeMap<u64, i64> = pool.iter().copied().zip(best).collect();
    // Divide out: cofactor = expansion / prod eta(d)^{r_d}.
    let order = expansion.trunc_exp();
    let order_q = (*order.numer() / *order.denom()).max(2);
    let mut quot = FracQSeries::one(order_q + 1);
    for (&d, &rd) in &r {
        if rd != 0 {
            quot = quot.mul(&series::eta(d as i64, order_q + 1).pow(rd)?);
        }
    }
    let cofactor = expansion.div(&quot)?.reduced();
    match cofactor.leading() {
        Some((0, c)) if cofactor.denom() == 1 && c.is_one() => Ok(EtaMatch::Cofactor {
            exponents: r,
            cofactor,
        }),
        _ => Ok(EtaMatch::None),
    }
}

fn verify_eta_exponents(
    r: &BTreeMap<u64, i64>,
    exponents: &BTreeMap<i64, i64>,
    rho: &BigRational,
) -> bool {
    let weyl: i64 = r.iter().map(|(&d, &rd)| d as i64 * rd).sum();
    if rho * big(24) != big(weyl) {
        return false;
    }
    for (&n, &en) in exponents {
        let sigma: i64 = r
            .iter()
            .filter(|(&d, _)| n % d as i64 == 0)
            .map(|(_, &rd)| rd)
            .sum();
        if sigma != en {
            return false;
        }
    }
    true
}

/// Smallest-l1 integer vector r over the pool with sum d r_d = target;
/// deterministic tie-break by lexicographic order. Box search |r_d| <= cap.
fn minimal_l1_solution(pool: &[u64], target: i64, cap: i64) -> Option<Vec<i64>> {
    let mut best: Option<(i64, Vec<i64>)> = None;
    let mut cur = vec![0i64; pool.len()];
    fn rec(
        pool: &[u64],
        target: i64,
        cap: i64,
        pos: usize,
        cur: &mut Vec<i64>,
        best: &mut Option<(i64, Vec<i64>)>,
    ) {
        if pos + 1 == pool.len() {
            let d = pool[pos] as i64;
            if target % d != 0 {
                return;
            }
            let r = target / d;
            if r.abs() > cap {
                return;
            }
            cur[pos] = r;
            let l1: i64 = cur.iter().map(|x| x.abs()).sum();
            let better = match best {
                None => true,
                Some((bl, bv)) => l1 < *bl || (l1 == *bl && cur < bv),
            };
            if better {
                *best = Some((l1, cur.clone()));
            }
            cur[pos] = 0;
            return;
        }
        for r in -cap..=cap {
            cur[pos] = r;
            rec(pool, target - pool[pos] as i64 * r, cap, pos + 1, cur, best);
        }
        cur[pos] = 0;
    }
    rec(pool, target, cap, 0, &mut cur, &mut best);
    best.map(|(_, v)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discriminant::lattice_form;
    use crate::series::{bigfrac, eta, theta};
    use crate::spaces::{build_weak_basis, EpsilonSpaceSpec, SpaceKind};

    fn basis12(min_exp: i64, order: i64) -> crate::spaces::ReducedBasis {
        let spec = EpsilonSpaceSpec::new(lattice_form(12).unwrap(), 1, SpaceKind::Weak).unwrap();
        build_weak_basis(&spec, min_exp, order).unwrap()
    }

    #[test]
    fn weyl_vectors_level_12() {
        let d = lattice_form(12).unwrap();
        let hstar = spaces::eisenstein_g_epsilon(&d, 8).unwrap();
        let basis = basis12(-3, 40);
        let rho0 = weyl_vector(&d, basis.form(0).unwrap(), &hstar).unwrap();
        assert_eq!(rho0, bigfrac(1, 6));
        let rho3 = weyl_vector(&d, basis.form(-3).unwrap(), &hstar).unwrap();
        assert_eq!(rho3, bigfrac(-1, 6));
        let zero = FracQSeries::zero(1, 10);
        assert_eq!(weyl_vector(&d, &zero, &hstar).unwrap(), big(0));
    }

    #[test]
    fn lift_of_f0_is_eta_eta3() {
        let d = lattice_form(12).unwrap();
        let basis = basis12(0, 260);
        let f0 = basis.form(0).unwrap();
        let l = lift(&d, f0, 15, &[1, 3]).unwrap();
        assert_eq!(l.weight, big(1));
        assert_eq!(l.weyl_rho, bigfrac(1, 6));
        let oracle = eta(1, 16).mul(&eta(3, 16));
        assert!(l.expansion.agrees_with(&oracle));
        match &l.eta_match {
            EtaMatch::Exact { exponents } => {
                assert_eq!(exponents[&1], 1);
                assert_eq!(exponents[&3], 1);
            }
            other => panic!("expected exact match, got {other:?}"),
        }
        assert!(l.divisors.is_empty());
    }

    #[test]
    fn lift_of_f_minus_3() {
        let d = lattice_form(12).unwrap();
        let basis = basis12(-3, 300);
        let f3 = basis.form(-3).unwrap();
        let l = lift(&d, f3, 16, &[1, 3]).unwrap();
        assert_eq!(l.weight, big(0));
        assert_eq!(l.weyl_rho, bigfrac(-1, 6));
        assert_eq!(l.exponents[&1], -7);
        assert_eq!(l.exponents[&2], 20);
        assert_eq!(l.exponents[&3], -78);
        assert_eq!(l.exponents[&4], 344);
        // simple zeros at CM points of discriminant -3
        assert_eq!(l.divisors[&-3], 1);
        assert_eq!(l.divisors.len(), 1);
        match &l.eta_match {
            EtaMatch::Cofactor { exponents, cofactor } => {
                assert_eq!(exponents[&1], -1);
                assert_eq!(exponents[&3], -1);
                // cofactor = E1
                let e1 = crate::pool::e1_series(12);
                assert!(cofactor.truncate((12, 1).into()).agrees_with(&e1));
            }
            other => panic!("expected cofactor match, got {other:?}"),
        }
    }

    #[test]
    fn lift_of_12_theta_is_delta() {
        let d = lattice_form(4).unwrap();
        let f = theta(260).scale(&big(12));
        let l = lift(&d, &f, 15, &[1]).unwrap();
        assert_eq!(l.weight, big(12));
        assert_eq!(l.weyl_rho, big(1));
        let oracle = crate::series::delta(16);
        assert!(l.expansion.agrees_with(&oracle));
        match &l.eta_match {
            EtaMatch::Exact { exponents } => assert_eq!(exponents[&1], 24),
            other => panic!("expected exact match, got {other:?}"),
        }
    }

    #[test]
    fn integrality_screen_rejects_half_f0() {
        let d = lattice_form(12).unwrap();
        let basis = basis12(0, 80);
        let f = basis.form(0).unwrap().scale(&bigfrac(1, 2));
        let err = lift(&d, &f, 5, &[1, 3]).unwrap_err();
        assert!(matches!(err, Error::IntegralityViolation { n: 0, .. }));
    }

    #[test]
    fn order_cap_is_enforced() {
        let d = lattice_form(12).unwrap();
        let basis = basis12(0, 40);
        let f0 = basis.form(0).unwrap();
        assert!(lift(&d, f0, 7, &[1, 3]).is_err()); // 49 >= 40
    }

    #[test]
    fn lift_linearity_on_f3_f0() {
        let d = lattice_form(12).unwrap();
        let basis = basis12(-3, 300);
        let f0 = basis.form(0).unwrap();
        let f3 = basis.form(-3).unwrap();
        let sum = f0.add(f3);
        let l0 = lift(&d, f0, 12, &[1, 3]).unwrap();
        let l3 = lift(&d, f3, 12, &[1, 3]).unwrap();
        let ls = lift(&d, &sum, 12, &[1, 3]).unwrap();
        // rho and exponents are additive; expansions multiply.
        assert_eq!(ls.weyl_rho, &l0.weyl_rho + &l3.weyl_rho);
        for n in 1..=12 {
            assert_eq!(ls.exponents[&n], l0.exponents[&n] + l3.exponents[&n]);
        }
        let prod = l0.expansion.mul(&l3.expansion);
        assert!(ls.expansion.agrees_with(&prod));
        // Psi(f_{-3} + f_0) = E1.
        match &ls.eta_match {
            EtaMatch::Cofactor { cofactor, .. } => {
                // trivial quotient: all-zero exponent solution has l1 0
                let e1 = crate::pool::e1_series(12);
                assert!(cofactor.truncate((12, 1).into()).agrees_with(&e1));
            }
            EtaMatch::Exact { .. } => panic!("E1 is not an eta quotient"),
            EtaMatch::None => panic!("expected a cofactor"),
        }
    }

    #[test]
    fn extract_roundtrip_on_lift() {
        let d = lattice_form(12).unwrap();
        let basis = basis12(-3, 300);
        let f3 = basis.form(-3).unwrap();
        let l = lift(&d, f3, 14, &[1, 3]).unwrap();
        // expansion has leading coefficient 1 at q^rho
        let (w, e) = series::extract_exponents(&l.expansion.scale(&big(1)), 14).unwrap();
        assert_eq!(w, l.weyl_rho);
        for n in 1..14 {
            assert_eq!(e[&n], big(l.exponents[&n]), "e_{n}");
        }
    }
}
