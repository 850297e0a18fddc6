//! Exact multivariate polynomials over the rationals, plus the two
//! Duistermaat-Heckman density polynomials attached to a root system:
//! the top-degree density H_d and its companion H_{d-1}.
//!
//! The gradient of H_d is carried as an explicit vector field whose gram
//! pairing with any direction v reproduces the directional derivative of H_d
//! along v; the identities tying H_d, H_{d-1} and that field together are
//! machine-checked in [`verify_density_identities`].

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rat::{rat_int, Int, Rat};
use crate::root_system::RootSystem;

/// Sparse exact polynomial: exponent vector -> coefficient, no zeros stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

fn rat_pow(x: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, value: Rat) -> Self {
        let mut p = Self::zero(nvars);
        if !value.is_zero() {
            p.terms.insert(vec![0; nvars], value);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn variable(nvars: usize, j: usize) -> Self {
        assert!(j < nvars, "variable index out of range");
        let mut expt = vec![0u32; nvars];
        expt[j] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(expt, Rat::one());
        p
    }

    /// The linear form x -> cov . x.
    pub fn linear_form(cov: &[Rat]) -> Self {
        let nvars = cov.len();
        let mut p = Self::zero(nvars);
        for (j, c) in cov.iter().enumerate() {
            if !c.is_zero() {
                let mut expt = vec![0u32; nvars];
                expt[j] = 1;
                p.terms.insert(expt, c.clone());
            }
        }
        p
    }

    /// The affine form x -> cov . x + k.
    pub fn affine_form(cov: &[Rat], k: &Rat) -> Self {
        let mut p = Self::linear_form(cov);
        if !k.is_zero() {
            p.terms.insert(vec![0; cov.len()], k.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().sum::<u32>() as usize).max().unwrap_or(0)
    }

    /// (min, max) total degree over stored terms; None when zero.
    pub fn degree_span(&self) -> Option<(usize, usize)> {
        let degs = self.terms.keys().map(|e| e.iter().sum::<u32>() as usize);
        let max = degs.clone().max()?;
        let min = degs.min().unwrap();
        Some((min, max))
    }

    pub fn is_homogeneous_of_degree(&self, k: usize) -> bool {
        self.is_zero() || self.degree_span() == Some((k, k))
    }

    fn insert_term(&mut self, expt: Vec<u32>, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(expt);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "adding polynomials in different variable counts");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        Polynomial { nvars: self.nvars, terms }
    }

    pub fn scale(&self, factor: &Rat) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c * factor)).collect();
        Polynomial { nvars: self.nvars, terms }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "multiplying polynomials in different variable counts");
        let mut out = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let expt: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_term(expt, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn partial(&self, j: usize) -> Polynomial {
        assert!(j < self.nvars, "partial derivative index out of range");
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[j] == 0 {
                continue;
            }
            let mut expt = e.clone();
            expt[j] -= 1;
            out.insert_term(expt, c * rat_int(e[j] as i64));
        }
        out
    }

    pub fn eval(&self, x: &[Rat]) -> Result<Rat> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (j, &ej) in e.iter().enumerate() {
                if ej > 0 {
                    term *= rat_pow(&x[j], ej);
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut term = crate::rat::to_f64(c);
            for (j, &ej) in e.iter().enumerate() {
                if ej > 0 {
                    term *= x[j].powi(ej as i32);
                }
            }
            acc += term;
        }
        acc
    }

    /// Substitutes images[i] for variable i; images must agree on a common
    /// variable count, which becomes the variable count of the result.
    pub fn compose(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: images.len() });
        }
        let out_vars = images.first().map(|p| p.nvars).unwrap_or(0);
        if images.iter().any(|p| p.nvars != out_vars) {
            return Err(Error::DimensionMismatch {
                expected: out_vars,
                got: images.iter().find(|p| p.nvars != out_vars).unwrap().nvars,
            });
        }
        // Per-variable power tables up to the largest exponent used.
        let mut max_expt = vec![0u32; self.nvars];
        for e in self.terms.keys() {
            for (m, &ej) in max_expt.iter_mut().zip(e) {
                *m = (*m).max(ej);
            }
        }
        let mut powers: Vec<Vec<Polynomial>> = Vec::with_capacity(self.nvars);
        for (img, &me) in images.iter().zip(&max_expt) {
            let mut table = vec![Polynomial::one(out_vars)];
            for k in 1..=me {
                table.push(table[(k - 1) as usize].mul(img));
            }
            powers.push(table);
        }
        let mut out = Polynomial::zero(out_vars);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(out_vars, c.clone());
            for (j, &ej) in e.iter().enumerate() {
                if ej > 0 {
                    term = term.mul(&powers[j][ej as usize]);
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// p(Mx): substitutes the linear form (Mx)_i for variable i.
    pub fn compose_matrix(&self, m: &Mat) -> Result<Polynomial> {
        let images: Vec<Polynomial> =
            (0..m.nrows()).map(|i| Polynomial::linear_form(m.row(i))).collect();
        self.compose(&images)
    }

    pub fn homogeneous_component(&self, k: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().sum::<u32>() as usize == k)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Polynomial { nvars: self.nvars, terms }
    }
}

/// Polynomial vector field with one component per ambient coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    components: Vec<Polynomial>,
}

impl PolyVectorField {
    pub fn new(components: Vec<Polynomial>) -> Self {
        assert!(!components.is_empty(), "a vector field needs at least one component");
        let nvars = components[0].nvars();
        assert!(
            components.iter().all(|p| p.nvars() == nvars),
            "field components must share a variable count"
        );
        PolyVectorField { components }
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn nvars(&self) -> usize {
        self.components[0].nvars()
    }

    pub fn scale_poly(&self, factor: &Polynomial) -> PolyVectorField {
        PolyVectorField::new(self.components.iter().map(|p| p.mul(factor)).collect())
    }

    /// Gram pairing of the field with a constant direction v.
    pub fn gram_pair_vector(&self, rs: &RootSystem, v: &[Rat]) -> Polynomial {
        let n = self.components.len();
        let mut out = Polynomial::zero(self.nvars());
        for (m, comp) in self.components.iter().enumerate() {
            let mut weight = Rat::zero();
            for l in 0..n {
                weight += &rs.gram()[m][l] * &v[l];
            }
            out = out.add(&comp.scale(&weight));
        }
        out
    }

    /// Gram pairing of the field with the identity position field x.
    pub fn gram_pair_position(&self, rs: &RootSystem) -> Polynomial {
        let n = self.components.len();
        let mut out = Polynomial::zero(self.nvars());
        for (m, comp) in self.components.iter().enumerate() {
            let cov: Vec<Rat> = (0..n).map(|l| rs.gram()[m][l].clone()).collect();
            out = out.add(&comp.mul(&Polynomial::linear_form(&cov)));
        }
        out
    }
}

/// Sum of v_j dp/dx_j, the derivative of p along the constant direction v.
pub fn directional_derivative(p: &Polynomial, v: &[Rat]) -> Result<Polynomial> {
    if v.len() != p.nvars() {
        return Err(Error::DimensionMismatch { expected: p.nvars(), got: v.len() });
    }
    let mut out = Polynomial::zero(p.nvars());
    for (j, vj) in v.iter().enumerate() {
        if !vj.is_zero() {
            out = out.add(&p.partial(j).scale(vj));
        }
    }
    Ok(out)
}

pub fn divergence(field: &PolyVectorField) -> Polynomial {
    let mut out = Polynomial::zero(field.nvars());
    for (j, comp) in field.components().iter().enumerate() {
        out = out.add(&comp.partial(j));
    }
    out
}

/// H_d(x) = (1/c) prod_i <alpha_i, x>^2, homogeneous of degree 2r; the
/// constant 1 in the torus case.
pub fn h_top(rs: &RootSystem) -> Polynomial {
    let mut out = Polynomial::one(rs.n());
    for alpha in rs.positive_roots() {
        let form = Polynomial::linear_form(&rs.root_covector(alpha));
        out = out.mul(&form).mul(&form);
    }
    out.scale(&rs.c().recip())
}

/// H_{d-1}(x) = (1/c) sum_j 2 <alpha_j, x> <alpha_j, rho> prod_{i != j}
/// <alpha_i, x>^2, homogeneous of degree 2r - 1; zero in the torus case.
pub fn h_sub(rs: &RootSystem) -> Polynomial {
    let forms: Vec<Polynomial> =
        rs.positive_roots().iter().map(|a| Polynomial::linear_form(&rs.root_covector(a))).collect();
    let mut out = Polynomial::zero(rs.n());
    for (j, alpha_j) in rs.positive_roots().iter().enumerate() {
        let weight = rat_int(2) * rs.pairing_int_rat(alpha_j, rs.rho());
        let mut term = forms[j].scale(&weight);
        for (i, form) in forms.iter().enumerate() {
            if i != j {
                term = term.mul(form).mul(form);
            }
        }
        out = out.add(&term);
    }
    out.scale(&rs.c().recip())
}

/// Gradient field of H_d with respect to the gram pairing, in closed form:
/// sum_i (2/c) <alpha_i, x> prod_{k != i} <alpha_k, x>^2 alpha_i. Its gram
/// pairing with v equals the directional derivative of H_d along v.
pub fn grad_h_top(rs: &RootSystem) -> PolyVectorField {
    let n = rs.n();
    let forms: Vec<Polynomial> =
        rs.positive_roots().iter().map(|a| Polynomial::linear_form(&rs.root_covector(a))).collect();
    let mut components = vec![Polynomial::zero(n); n];
    let two_over_c = rat_int(2) * rs.c().recip();
    for (i, alpha_i) in rs.positive_roots().iter().enumerate() {
        let mut scalar = forms[i].scale(&two_over_c);
        for (k, form) in forms.iter().enumerate() {
            if k != i {
                scalar = scalar.mul(form).mul(form);
            }
        }
        for (m, comp) in components.iter_mut().enumerate() {
            let coord = Rat::from(alpha_i[m].clone());
            if !coord.is_zero() {
                *comp = comp.add(&scalar.scale(&coord));
            }
        }
    }
    PolyVectorField::new(components)
}

/// Outcome of the exact identity checks tying H_d, H_{d-1} and grad H_d
/// together. Failures are reported, not thrown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    /// <grad H_d, v> equals the directional derivative of H_d along v for
    /// every coordinate direction v (the gradient convention itself).
    pub grad_matches_directional: bool,
    /// <grad H_d, rho> = H_{d-1}.
    pub grad_rho_is_h_sub: bool,
    /// <grad H_d, x> = 2r H_d.
    pub euler_scaling: bool,
    /// div((x - 2 rho) f H_d) = <grad f, x - 2 rho> H_d + (2r + n) f H_d
    /// - 2 f H_{d-1} for f ranging over 1, the coordinates, and a random
    /// rational affine function.
    pub divergence_balance: bool,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.grad_matches_directional
            && self.grad_rho_is_h_sub
            && self.euler_scaling
            && self.divergence_balance
    }
}

/// Checks the density identities as exact coefficient-wise polynomial
/// equalities and reports pass/fail per identity.
pub fn verify_density_identities(rs: &RootSystem) -> IdentityReport {
    let n = rs.n();
    let hd = h_top(rs);
    let hsub = h_sub(rs);
    let grad = grad_h_top(rs);

    let mut grad_matches_directional = true;
    for j in 0..n {
        let mut e = vec![Rat::zero(); n];
        e[j] = Rat::one();
        let via_pairing = grad.gram_pair_vector(rs, &e);
        let via_partial = hd.partial(j);
        if via_pairing != via_partial {
            grad_matches_directional = false;
        }
    }

    let grad_rho_is_h_sub = grad.gram_pair_vector(rs, rs.rho()) == hsub;

    let euler_scaling =
        grad.gram_pair_position(rs) == hd.scale(&rat_int(2 * rs.r() as i64));

    let mut fs: Vec<Polynomial> = vec![Polynomial::one(n)];
    for j in 0..n {
        fs.push(Polynomial::variable(n, j));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1CE);
    let mut cov = Vec::with_capacity(n);
    for _ in 0..n {
        cov.push(Rat::new(Int::from(rng.gen_range(-9i64..=9)), Int::from(rng.gen_range(1i64..=9))));
    }
    let k = Rat::new(Int::from(rng.gen_range(-9i64..=9)), Int::from(rng.gen_range(1i64..=9)));
    fs.push(Polynomial::affine_form(&cov, &k));

    let x_minus_2rho = PolyVectorField::new(
        (0..n)
            .map(|j| {
                Polynomial::variable(n, j)
                    .sub(&Polynomial::constant(n, rs.two_rho()[j].clone()))
            })
            .collect(),
    );
    let shift: Vec<Rat> = rs.two_rho().iter().map(|x| -x).collect();
    let factor = rat_int((2 * rs.r() + n) as i64);
    let mut divergence_balance = true;
    for f in &fs {
        let field = x_minus_2rho.scale_poly(&f.mul(&hd));
        let lhs = divergence(&field);
        // <grad f, x - 2 rho> as a directional derivative with affine direction:
        // sum_j (x_j - 2 rho_j) df/dx_j.
        let mut df_dot = Polynomial::zero(n);
        for j in 0..n {
            let dir = Polynomial::variable(n, j).add(&Polynomial::constant(n, shift[j].clone()));
            df_dot = df_dot.add(&f.partial(j).mul(&dir));
        }
        let rhs = df_dot
            .mul(&hd)
            .add(&f.mul(&hd).scale(&factor))
            .sub(&f.mul(&hsub).scale(&rat_int(2)));
        if lhs != rhs {
            divergence_balance = false;
        }
    }

    IdentityReport { grad_matches_directional, grad_rho_is_h_sub, euler_scaling, divergence_balance }
}
