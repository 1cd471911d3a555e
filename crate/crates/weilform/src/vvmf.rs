//! Vector-valued modular forms for the Weil representation, indexed by norm
//! classes, the explicit isomorphisms between the scalar epsilon-spaces and
//! the Aut-invariant vector-valued spaces, and exact/numeric modularity
//! checks.
//!
//! Components are stored per norm class, not per element; expansion to
//! per-element vectors happens only inside the numeric checks.

use crate::discriminant::DiscriminantForm;
use crate::error::{Error, Result};
use crate::series::{big, FracQSeries};
use crate::weil::{self, mat_vec, NormClassIndex, WeilRep};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use std::collections::BTreeMap;

/// An Aut(D)-invariant vector-valued form: one series in q^(1/N) per norm
/// class, shared by all elements of the class.
pub struct VectorForm {
    form: DiscriminantForm,
    classes: NormClassIndex,
    /// One component per class, aligned with `classes`.
    components: Vec<FracQSeries>,
    /// 2k.
    weight2: i64,
}

impl VectorForm {
    pub fn form(&self) -> &DiscriminantForm {
        &self.form
    }

    pub fn classes(&self) -> &NormClassIndex {
        &self.classes
    }

    pub fn components(&self) -> &[FracQSeries] {
        &self.components
    }

    pub fn weight2(&self) -> i64 {
        self.weight2
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    /// Component labeled by its norm, as a reduced fraction string "a/b".
    pub fn components_by_norm(&self) -> BTreeMap<String, &FracQSeries> {
        self.classes
            .norms
            .iter()
            .zip(&self.components)
            .map(|(n, c)| (format!("{}/{}", n.numer(), n.denom()), c))
            .collect()
    }
}

/// The isomorphism psi: a scalar form f = sum a(n) q^n with the
/// epsilon-condition maps to the vector form with class components
///
///   F_gamma = sum_{n = N q(gamma) mod N} s(n) (M/(M,n)) / |D_{M/(M,n)}| a(n) q^(n/N).
///
/// Under the pipeline restriction chi_p != 1 the multiplier is just s(n).
pub fn psi(form: &DiscriminantForm, f: &FracQSeries, weight2: i64) -> Result<VectorForm> {
    let eps = form.epsilon_data()?;
    let n_level = eps.level as i64;
    let m_odd = eps.m_odd as i64;
    if (weight2 - form.signature() as i64).rem_euclid(4) != 0 {
        return Err(Error::Precondition(
            "psi: 2k = signature mod 4 violated".into(),
        ));
    }
    let f = f.reduced();
    if f.denom() != 1 {
        return Err(Error::Precondition(
            "psi expects a scalar form with integer exponents".into(),
        ));
    }
    for (&n, c) in f.terms() {
        if !eps.allows(n) && !c.is_zero() {
            return Err(Error::Precondition(format!(
                "psi: input violates the epsilon-condition at q^{n}"
            )));
        }
    }
    let classes = weil::norm_classes(form)?;
    let trunc = f.trunc_scaled();
    let mut components = Vec::with_capacity(classes.num_classes());
    for nu in &classes.norms {
        // residue N*nu mod N
        let res = (nu.numer() * (n_level / nu.denom())).rem_euclid(n_level);
        let mut terms: Vec<(i64, BigRational)> = Vec::new();
        for (&n, a) in f.terms() {
            if n.rem_euclid(n_level) != res {
                continue;
            }
            // gcd(M, 0) = M by convention
            let g = num_integer::gcd(m_odd, n.abs());
            let cof = m_odd / g;
            let mult = form.s_of(n)?
                * big(cof)
                / big(form.order_at_divisor(cof as u64) as i64);
            terms.push((n, mult * a));
        }
        // true exponents n/N: scaled by N the truncation bound is unchanged
        // in value, trunc_scaled = trunc * N.
        components.push(FracQSeries::from_scaled_terms(n_level, terms, trunc * n_level));
    }
    Ok(VectorForm {
        form: form.clone(),
        classes,
        components,
        weight2,
    })
}

/// The inverse map phi: F maps to s(0)^{-1} sum_gamma F_gamma(N tau),
/// i.e. classes contribute with multiplicity their size.
pub fn phi(vf: &VectorForm) -> Result<FracQSeries> {
    let n_level = vf.form.level() as i64;
    let s0 = vf.form.s_of(0)?;
    let mut acc: Option<FracQSeries> = None;
    for (k, comp) in vf.components.iter().enumerate() {
        let size = big(vf.classes.class_size(k) as i64);
        // F_class(N tau): true exponent n/N -> n.
        let rescaled = comp.rescale(n_level).scale(&size);
        acc = Some(match acc {
            None => rescaled,
            Some(a) => a.add(&rescaled),
        });
    }
    let sum = acc.unwrap_or_else(|| FracQSeries::zero(1, 0));
    Ok(sum.scale(&(BigRational::one() / s0)).reduced())
}

/// Exact T-transformation check: every class component is supported on
/// exponents congruent to its norm mod 1.
pub fn check_t(vf: &VectorForm) -> bool {
    let n_level = vf.form.level() as i64;
    for (nu, comp) in vf.classes.norms.iter().zip(&vf.components) {
        let res = (nu.numer() * (n_level / nu.denom())).rem_euclid(n_level);
        let comp = comp.with_denom(n_level);
        for (&e, _) in comp.terms() {
            if e.rem_euclid(n_level) != res {
                return false;
            }
        }
    }
    true
}

/// Test utility for the span lemma: if the norm-0 class component vanishes
/// identically (within truncation), the whole form must vanish.
pub fn component_zero_determines(vf: &VectorForm) -> bool {
    let zero_class = vf
        .classes
        .norms
        .iter()
        .position(|n| n.is_zero())
        .expect("norm 0 class always present");
    if !vf.components[zero_class].is_zero() {
        return true;
    }
    vf.is_zero()
}

/// Result of the numeric S-transformation check.
#[derive(Clone, Debug)]
pub struct SResidual {
    pub max_residual: f64,
    pub per_point: Vec<f64>,
    /// Set when the requested number of terms exceeds the available
    /// truncation; the residual is still reported.
    pub truncation_warning: bool,
}

fn eval_series(f: &FracQSeries, tau: Complex64) -> Complex64 {
    let d = f.denom() as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let two_pi_i_tau = Complex64::new(0.0, 2.0 * std::f64::consts::PI) * tau;
    for (&e, c) in f.terms() {
        let cf = rational_to_f64(c);
        acc += cf * (two_pi_i_tau * (e as f64 / d)).exp();
    }
    acc
}

fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Numerically evaluate tau^{-k} F(-1/tau) - rho(S) F(tau) at the sample
/// points (expanding classes to the full |D|-dimensional vector) and report
/// the maximum sup-norm residual. Principal branch of tau^{-k}.
pub fn check_s(vf: &VectorForm, num_terms: i64, points: &[Complex64]) -> Result<SResidual> {
    let rep = WeilRep::new(&vf.form)?;
    let truncation_warning = vf
        .components
        .iter()
        .any(|c| c.trunc_scaled() - c.leading().map_or(c.trunc_scaled(), |(e, _)| e) < num_terms);
    for p in points {
        if p.im < 0.5 {
            return Err(Error::Precondition(format!(
                "sample point {p} too close to the real axis (Im >= 0.5 required)"
            )));
        }
    }
    let k = vf.weight2 as f64 / 2.0;
    let mut per_point = Vec::with_capacity(points.len());
    for &tau in points {
        let minus_inv = Complex64::new(-1.0, 0.0) / tau;
        // Per-element vectors from class components.
        let n = rep.dim();
        let mut f_tau = vec![Complex64::new(0.0, 0.0); n];
        let mut f_s = vec![Complex64::new(0.0, 0.0); n];
        for (g, cls) in vf.classes.class_of.iter().enumerate().take(n) {
            f_tau[g] = eval_series(&vf.components[*cls], tau);
            f_s[g] = eval_series(&vf.components[*cls], minus_inv);
        }
        // lhs = tau^{-k} F(-1/tau)
        let factor = (tau.ln() * (-k)).exp();
        let rhs = mat_vec(rep.rho_s(), &f_tau);
        let mut worst: f64 = 0.0;
        for g in 0..n {
            worst = worst.max((factor * f_s[g] - rhs[g]).norm());
        }
        per_point.push(worst);
    }
    let max_residual = per_point.iter().cloned().fold(0.0, f64::max);
    Ok(SResidual {
        max_residual,
        per_point,
        truncation_warning,
    })
}

/// Deterministic pseudo-random sample points in the upper half-plane with
/// Im >= 0.5.
pub fn sample_points(count: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let re: f64 = rng.gen_range(-0.5..0.5);
            let im: f64 = rng.gen_range(0.5..2.0);
            Complex64::new(re, im)
        })
        .collect()
}
