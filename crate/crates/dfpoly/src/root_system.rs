//! Reduced root systems with a W-invariant rational pairing, in fixed integer
//! coordinates on the character space. The torus case (no roots) is permitted.
//!
//! Coordinates for the presets are the simple-root basis, so all root data is
//! integral and all Weyl matrices are integer matrices; rho may still be
//! half-integral, which is harmless since everything downstream is rational.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{det, solve_in_span, Mat};
use crate::rat::{int_to_rat_vec, primitivize, Int, Rat};

pub const DEFAULT_WEYL_CAP: usize = 100_000;

#[derive(Debug, Clone)]
pub struct RootSystem {
    n: usize,
    gram: Vec<Vec<Rat>>,
    positive_roots: Vec<Vec<Int>>,
    simple_roots: Vec<Vec<Int>>,
    rho: Vec<Rat>,
    two_rho: Vec<Rat>,
    c: Rat,
}

/// Finite reflection group attached to a RootSystem; elements act on points as
/// column vectors, the dual action on constraint normals is by transpose.
#[derive(Debug, Clone)]
pub struct WeylGroup {
    elements: Vec<Mat>,
}

impl WeylGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = &Mat> {
        self.elements.iter()
    }
}

impl RootSystem {
    /// Builds and fully validates a root system from explicit data.
    pub fn new(gram: Vec<Vec<Rat>>, positive_roots: Vec<Vec<Int>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 {
            return Err(Error::InvalidRootSystem("empty gram matrix".into()));
        }
        for row in &gram {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::GramNotPositiveDefinite);
                }
            }
        }
        for k in 1..=n {
            let minor: Vec<Vec<Rat>> =
                (0..k).map(|i| (0..k).map(|j| gram[i][j].clone()).collect()).collect();
            if !det(&minor).is_positive() {
                return Err(Error::GramNotPositiveDefinite);
            }
        }

        for root in &positive_roots {
            if root.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: root.len() });
            }
            if root.iter().all(|x| x.is_zero()) {
                return Err(Error::InvalidRootSystem("zero vector among positive roots".into()));
            }
        }
        let as_set: BTreeSet<&Vec<Int>> = positive_roots.iter().collect();
        if as_set.len() != positive_roots.len() {
            return Err(Error::InvalidRootSystem("duplicate positive root".into()));
        }
        let neg: Vec<Vec<Int>> =
            positive_roots.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        if positive_roots.iter().any(|r| neg.contains(r)) {
            return Err(Error::InvalidRootSystem(
                "a root and its negative are both marked positive".into(),
            ));
        }

        let mut phi: Vec<Vec<Int>> = positive_roots.clone();
        phi.extend(neg);

        let rs = RootSystem {
            n,
            gram,
            positive_roots,
            simple_roots: vec![],
            rho: vec![Rat::zero(); n],
            two_rho: vec![Rat::zero(); n],
            c: Rat::one(),
        };

        // Phi closed under every reflection s_alpha, alpha in Phi.
        for alpha in &phi {
            for beta in &phi {
                let image = rs.reflect_unchecked(alpha, &int_to_rat_vec(beta));
                let hit = phi.iter().any(|g| {
                    g.iter().zip(&image).all(|(gi, xi)| xi.denom().is_one() && *xi.numer() == *gi)
                });
                if !hit {
                    return Err(Error::NotClosedUnderReflection {
                        alpha: format!("{alpha:?}"),
                        beta: format!("{beta:?}"),
                    });
                }
            }
        }

        let mut two_rho = vec![Rat::zero(); n];
        for root in &rs.positive_roots {
            for (acc, x) in two_rho.iter_mut().zip(root) {
                *acc += Rat::from(x.clone());
            }
        }
        let rho: Vec<Rat> = two_rho.iter().map(|x| x / Rat::from(Int::from(2))).collect();
        for root in &rs.positive_roots {
            if !rs.pairing_int_rat(root, &rho).is_positive() {
                return Err(Error::RootOnWall { root: format!("{root:?}") });
            }
        }

        // Simple roots: positive roots that are not a sum of two positive roots.
        let simple_roots: Vec<Vec<Int>> = rs
            .positive_roots
            .iter()
            .filter(|gamma| {
                !rs.positive_roots.iter().any(|a| {
                    rs.positive_roots.iter().any(|b| {
                        a.iter().zip(b.iter()).zip(gamma.iter()).all(|((ai, bi), gi)| ai + bi == *gi)
                    })
                })
            })
            .cloned()
            .collect();
        let simple_cols: Vec<Vec<Rat>> = simple_roots.iter().map(|r| int_to_rat_vec(r)).collect();
        for root in &rs.positive_roots {
            let coords = solve_in_span(&simple_cols, &int_to_rat_vec(root)).ok_or_else(|| {
                Error::InvalidRootSystem(format!(
                    "positive root {root:?} is not in the span of the simple roots"
                ))
            })?;
            let ok = coords.iter().all(|c| c.denom().is_one() && !c.is_negative());
            if !ok {
                return Err(Error::InvalidRootSystem(format!(
                    "positive root {root:?} is not a nonnegative integer combination of simple roots"
                )));
            }
        }

        let mut c = Rat::one();
        for root in &rs.positive_roots {
            let p = rs.pairing_int_rat(root, &rho);
            c *= &p * &p;
        }

        Ok(RootSystem { simple_roots, rho, two_rho, c, ..rs })
    }

    /// Named presets, exact strings: torus-1, torus-2, torus-3, A1, A2, B2, G2.
    pub fn preset(name: &str) -> Result<Self> {
        let ident = |k: usize| -> Vec<Vec<Rat>> {
            (0..k)
                .map(|i| (0..k).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
                .collect()
        };
        let gram_i64 = |rows: &[&[i64]]| -> Vec<Vec<Rat>> {
            rows.iter().map(|r| r.iter().map(|&x| Rat::from(Int::from(x))).collect()).collect()
        };
        let roots_i64 = |rows: &[&[i64]]| -> Vec<Vec<Int>> {
            rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect()
        };
        match name {
            "torus-1" => Self::new(ident(1), vec![]),
            "torus-2" => Self::new(ident(2), vec![]),
            "torus-3" => Self::new(ident(3), vec![]),
            "A1" => Self::new(gram_i64(&[&[2]]), roots_i64(&[&[1]])),
            "A2" => Self::new(
                gram_i64(&[&[2, -1], &[-1, 2]]),
                roots_i64(&[&[1, 0], &[0, 1], &[1, 1]]),
            ),
            "B2" => Self::new(
                gram_i64(&[&[2, -1], &[-1, 1]]),
                roots_i64(&[&[1, 0], &[0, 1], &[1, 1], &[1, 2]]),
            ),
            "G2" => Self::new(
                gram_i64(&[&[2, -3], &[-3, 6]]),
                roots_i64(&[&[1, 0], &[0, 1], &[1, 1], &[2, 1], &[3, 1], &[3, 2]]),
            ),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of positive roots.
    pub fn r(&self) -> usize {
        self.positive_roots.len()
    }

    /// Degree of the leading density: d = 2r.
    pub fn d(&self) -> usize {
        2 * self.r()
    }

    pub fn gram(&self) -> &[Vec<Rat>] {
        &self.gram
    }

    pub fn positive_roots(&self) -> &[Vec<Int>] {
        &self.positive_roots
    }

    pub fn simple_roots(&self) -> &[Vec<Int>] {
        &self.simple_roots
    }

    pub fn rho(&self) -> &[Rat] {
        &self.rho
    }

    pub fn two_rho(&self) -> &[Rat] {
        &self.two_rho
    }

    pub fn c(&self) -> &Rat {
        &self.c
    }

    /// Gram pairing u^T gram v.
    pub fn pairing(&self, u: &[Rat], v: &[Rat]) -> Result<Rat> {
        if u.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: u.len() });
        }
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
        }
        let mut acc = Rat::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                acc += ui * &self.gram[i][j] * vj;
            }
        }
        Ok(acc)
    }

    pub(crate) fn pairing_int_rat(&self, u: &[Int], v: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                acc += Rat::from(ui.clone()) * &self.gram[i][j] * vj;
            }
        }
        acc
    }

    /// The covector gram * alpha, i.e. the linear form x -> <alpha, x>.
    pub fn root_covector(&self, alpha: &[Int]) -> Vec<Rat> {
        (0..self.n)
            .map(|j| {
                let mut acc = Rat::zero();
                for (i, ai) in alpha.iter().enumerate() {
                    acc += Rat::from(ai.clone()) * &self.gram[i][j];
                }
                acc
            })
            .collect()
    }

    pub fn is_root(&self, v: &[Int]) -> bool {
        let neg: Vec<Int> = v.iter().map(|x| -x).collect();
        self.positive_roots.iter().any(|r| *r == v || *r == neg)
    }

    fn reflect_unchecked(&self, alpha: &[Int], x: &[Rat]) -> Vec<Rat> {
        let alpha_rat = int_to_rat_vec(alpha);
        let num = self.pairing_int_rat(alpha, x);
        let den = self.pairing_int_rat(alpha, &alpha_rat);
        let coeff = Rat::from(Int::from(2)) * num / den;
        x.iter().zip(&alpha_rat).map(|(xi, ai)| xi - &coeff * ai).collect()
    }

    /// s_alpha(x) = x - 2(<alpha,x>/<alpha,alpha>) alpha, alpha in Phi.
    pub fn reflect(&self, alpha: &[Int], x: &[Rat]) -> Result<Vec<Rat>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        if !self.is_root(alpha) {
            return Err(Error::NotARoot);
        }
        Ok(self.reflect_unchecked(alpha, x))
    }

    fn reflection_matrix(&self, alpha: &[Int]) -> Mat {
        let alpha_rat = int_to_rat_vec(alpha);
        let cov = self.root_covector(alpha);
        let den = self.pairing_int_rat(alpha, &alpha_rat);
        let two = Rat::from(Int::from(2));
        let rows = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let delta = if i == j { Rat::one() } else { Rat::zero() };
                        delta - &two * &alpha_rat[i] * &cov[j] / &den
                    })
                    .collect()
            })
            .collect();
        Mat::from_rows(rows)
    }

    pub fn weyl_group(&self) -> Result<WeylGroup> {
        self.weyl_group_capped(DEFAULT_WEYL_CAP)
    }

    /// Breadth-first closure of the simple reflections; elements are returned
    /// in lexicographic order of their matrix entries.
    pub fn weyl_group_capped(&self, cap: usize) -> Result<WeylGroup> {
        let generators: Vec<Mat> =
            self.simple_roots.iter().map(|a| self.reflection_matrix(a)).collect();
        let identity = Mat::identity(self.n);
        let mut seen: BTreeSet<Mat> = BTreeSet::new();
        seen.insert(identity.clone());
        let mut queue = VecDeque::new();
        queue.push_back(identity);
        while let Some(w) = queue.pop_front() {
            for g in &generators {
                let next = g.matmul(&w);
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        return Err(Error::GroupCapExceeded { cap });
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(WeylGroup { elements: seen.into_iter().collect() })
    }

    /// Primitive integer covectors of the chamber walls <alpha_s, x> >= 0,
    /// one per simple root, in simple-root order.
    pub fn chamber_normals(&self) -> Vec<Vec<Int>> {
        self.simple_roots
            .iter()
            .map(|a| {
                let (prim, _) = primitivize(&self.root_covector(a))
                    .expect("simple root covector cannot vanish for a definite gram");
                prim
            })
            .collect()
    }
}
