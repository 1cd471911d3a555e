//! The Weil representation on the group algebra of a discriminant form, as
//! numeric unitary matrices for the generators S, T, Z, with relation checks
//! and the norm-class index used by Aut-invariant vector-valued forms.
//!
//! The matrices are double precision. The exact isomorphism pipeline never
//! consumes them; they exist to verify the modular transformation behavior
//! of constructed vector-valued forms.

use crate::discriminant::DiscriminantForm;
use crate::error::{Error, Result};
use crate::module::{FiniteModule, QmodZ};
use num_complex::Complex64;
use num_rational::Ratio;
use std::collections::BTreeMap;

pub type CMatrix = Vec<Vec<Complex64>>;

/// e(x) = exp(2 pi i x).
pub fn e_of(x: QmodZ) -> Complex64 {
    let v = *x.numer() as f64 / *x.denom() as f64;
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * v)
}

pub fn mat_id(n: usize) -> CMatrix {
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn mat_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn mat_dagger(a: &CMatrix) -> CMatrix {
    let n = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

/// Sup-norm of the entrywise difference.
pub fn sup_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut m: f64 = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            m = m.max((x - y).norm());
        }
    }
    m
}

pub fn mat_vec(a: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum())
        .collect()
}

/// Generator word letters for evaluating rho_D at group elements expressed
/// as words in S and T.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    S,
    T,
    TInv,
}

pub struct WeilRep {
    form: DiscriminantForm,
    module: FiniteModule,
    dim: usize,
    mat_t: CMatrix,
    mat_t_inv: CMatrix,
    mat_s: CMatrix,
    mat_z: CMatrix,
}

impl WeilRep {
    pub fn new(form: &DiscriminantForm) -> Result<Self> {
        let module = FiniteModule::from_form(form)?;
        let dim = module.size() as usize;
        let r = form.signature();

        // rho(T) e_gamma = e(q(gamma)) e_gamma : diagonal, unit modulus.
        let mut mat_t = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        let mut mat_t_inv = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for g in 0..dim {
            let ph = e_of(module.norm(g as u64));
            mat_t[g][g] = ph;
            mat_t_inv[g][g] = ph.conj();
        }

        // rho(S) e_gamma = i^{-r/2} |D|^{-1/2} sum_beta e(-(beta, gamma)) e_beta.
        let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (r as f64) / 8.0);
        let scale = phase / (dim as f64).sqrt();
        let mut mat_s = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for gamma in 0..dim {
            for beta in 0..dim {
                let b = module.bilinear(beta as u64, gamma as u64);
                mat_s[beta][gamma] = scale * e_of(Ratio::new(-b.numer(), *b.denom()));
            }
        }

        let mat_z = mat_mul(&mat_s, &mat_s);
        Ok(WeilRep {
            form: form.clone(),
            module,
            dim,
            mat_t,
            mat_t_inv,
            mat_s,
            mat_z,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn form(&self) -> &DiscriminantForm {
        &self.form
    }

    pub fn module(&self) -> &FiniteModule {
        &self.module
    }

    pub fn rho_t(&self) -> &CMatrix {
        &self.mat_t
    }

    pub fn rho_s(&self) -> &CMatrix {
        &self.mat_s
    }

    pub fn rho_z(&self) -> &CMatrix {
        &self.mat_z
    }

    /// Ordered product of generator images for a nonempty word.
    pub fn rho_word(&self, word: &[Gen]) -> Result<CMatrix> {
        if word.is_empty() {
            return Err(Error::Precondition("rho_word requires a nonempty word".into()));
        }
        let mut acc: Option<CMatrix> = None;
        for g in word {
            let m = match g {
                Gen::S => &self.mat_s,
                Gen::T => &self.mat_t,
                Gen::TInv => &self.mat_t_inv,
            };
            acc = Some(match acc {
                None => m.clone(),
                Some(a) => mat_mul(&a, m),
            });
        }
        Ok(acc.unwrap())
    }

    /// || rho(S) rho(S)^dagger - I ||_inf.
    pub fn unitarity_residual(&self) -> f64 {
        sup_diff(&mat_mul(&self.mat_s, &mat_dagger(&self.mat_s)), &mat_id(self.dim))
    }

    /// || S^2 - Z ||_inf (Z is defined as S^2, so this checks the stored copy)
    /// together with the permutation structure of rho(Z): entry (-gamma,
    /// gamma) equals i^{-r}, all others vanish.
    pub fn z_structure_residual(&self) -> f64 {
        let r = self.form.signature();
        let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (r as f64) / 4.0);
        let mut worst: f64 = 0.0;
        for gamma in 0..self.dim {
            let neg = self.module.neg(gamma as u64) as usize;
            for beta in 0..self.dim {
                let expect = if beta == neg {
                    phase
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((self.mat_z[beta][gamma] - expect).norm());
            }
        }
        worst
    }

    /// || (ST)^3 - Z ||_inf.
    pub fn braid_residual(&self) -> f64 {
        let st = mat_mul(&self.mat_s, &self.mat_t);
        let st3 = mat_mul(&mat_mul(&st, &st), &st);
        sup_diff(&st3, &self.mat_z)
    }

    /// || Z^4 - I ||_inf.
    pub fn z4_residual(&self) -> f64 {
        let z2 = mat_mul(&self.mat_z, &self.mat_z);
        sup_diff(&mat_mul(&z2, &z2), &mat_id(self.dim))
    }

    /// || Z^2 T - T Z^2 ||_inf.
    pub fn center_residual(&self) -> f64 {
        let z2 = mat_mul(&self.mat_z, &self.mat_z);
        sup_diff(&mat_mul(&z2, &self.mat_t), &mat_mul(&self.mat_t, &z2))
    }

    /// All relation residuals, keyed by a short name.
    pub fn relation_residuals(&self) -> BTreeMap<&'static str, f64> {
        let mut m = BTreeMap::new();
        m.insert("unitarity", self.unitarity_residual());
        m.insert("S2=Z", self.z_structure_residual());
        m.insert("(ST)3=Z", self.braid_residual());
        m.insert("Z4=I", self.z4_residual());
        m.insert("Z2T=TZ2", self.center_residual());
        m
    }
}

/// Partition of the module elements into norm fibers. For transitive D these
/// are exactly the Aut(D)-orbits, so Aut-invariant vector forms carry one
/// series per class.
#[derive(Clone, Debug)]
pub struct NormClassIndex {
    /// Element indices per class, classes ordered by ascending norm.
    pub classes: Vec<Vec<u64>>,
    /// Norm of each class, in [0, 1).
    pub norms: Vec<QmodZ>,
    /// Class id of each element.
    pub class_of: Vec<usize>,
}

impl NormClassIndex {
    pub fn class_size(&self, k: usize) -> u64 {
        self.classes[k].len() as u64
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }
}

/// Norm fibers of the explicit module. Rejects non-transitive D: the fibers
/// would not be Aut-orbits there.
pub fn norm_classes(form: &DiscriminantForm) -> Result<NormClassIndex> {
    if !form.is_transitive() {
        return Err(Error::Precondition(
            "norm classes are Aut-orbits only for transitive D".into(),
        ));
    }
    let module = FiniteModule::from_form(form)?;
    let mut by_norm: BTreeMap<QmodZ, Vec<u64>> = BTreeMap::new();
    for g in 0..module.size() {
        by_norm.entry(module.norm(g)).or_default().push(g);
    }
    let mut classes = Vec::new();
    let mut norms = Vec::new();
    let mut class_of = vec![0usize; module.size() as usize];
    for (k, (n, els)) in by_norm.into_iter().enumerate() {
        for &g in &els {
            class_of[g as usize] = k;
        }
        norms.push(n);
        classes.push(els);
    }
    Ok(NormClassIndex {
        classes,
        norms,
        class_of,
    })
}
