//! Convex piecewise-linear test functions, stored as finite maxima of
//! rational affine pieces, together with the induced polyhedral refinement
//! of a domain, the Weyl-invariance decision, and affine restriction.

use std::collections::BTreeSet;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::polytope::{Constraint, HPolytope};
use crate::rat::{dot_rat, primitivize, to_f64, Rat};
use crate::root_system::WeylGroup;

/// One affine piece x -> b . x + k.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffinePiece {
    pub b: Vec<Rat>,
    pub k: Rat,
}

impl AffinePiece {
    pub fn new(b: Vec<Rat>, k: Rat) -> Self {
        AffinePiece { b, k }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot_rat(&self.b, x) + &self.k
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.b.iter().zip(x).map(|(c, v)| to_f64(c) * v).sum::<f64>() + to_f64(&self.k)
    }
}

/// f(x) = max over pieces of (b . x + k); convex by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    nvars: usize,
    pieces: Vec<AffinePiece>,
}

impl PLFunction {
    pub fn new(pieces: Vec<AffinePiece>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(Error::Validation {
                field: "pieces".into(),
                message: "a piecewise-linear function needs at least one piece".into(),
            });
        };
        let nvars = first.b.len();
        if nvars == 0 {
            return Err(Error::Validation {
                field: "pieces".into(),
                message: "pieces must have at least one coefficient".into(),
            });
        }
        for p in &pieces {
            if p.b.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: p.b.len() });
            }
        }
        Ok(PLFunction { nvars, pieces })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    /// Pieces with exact duplicates merged, in sorted order.
    pub fn deduped_pieces(&self) -> Vec<AffinePiece> {
        let set: BTreeSet<AffinePiece> = self.pieces.iter().cloned().collect();
        set.into_iter().collect()
    }

    pub fn eval(&self, x: &[Rat]) -> Result<Rat> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        Ok(self.pieces.iter().map(|p| p.eval(x)).max().unwrap())
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.eval_f64(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// f composed with the linear map x -> w x; pieces map b to w^T b.
    pub fn compose_matrix(&self, w: &Mat) -> Result<PLFunction> {
        let wt = w.transpose();
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                if p.b.len() != w.nrows() {
                    return Err(Error::DimensionMismatch { expected: w.nrows(), got: p.b.len() });
                }
                Ok(AffinePiece::new(wt.apply(&p.b), p.k.clone()))
            })
            .collect::<Result<_>>()?;
        PLFunction::new(pieces)
    }

    /// f composed with the affine map y -> linear y + shift, where linear is
    /// given by rows (one per original coordinate).
    pub fn compose_affine_map(&self, linear: &[Vec<Rat>], shift: &[Rat]) -> Result<PLFunction> {
        if linear.len() != self.nvars || shift.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: linear.len() });
        }
        let out_vars = linear.first().map(|r| r.len()).unwrap_or(0);
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let b: Vec<Rat> = (0..out_vars)
                    .map(|j| p.b.iter().zip(linear).map(|(bi, row)| bi * &row[j]).sum())
                    .collect();
                let k = &p.k + dot_rat(&p.b, shift);
                Ok(AffinePiece::new(b, k))
            })
            .collect::<Result<Vec<_>>>()?;
        PLFunction::new(pieces)
    }

    /// Pointwise sum: max_i p_i + max_j q_j = max_{i,j} (p_i + q_j).
    pub fn sum(&self, other: &PLFunction) -> Result<PLFunction> {
        if other.nvars != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        let mut pieces = Vec::with_capacity(self.pieces.len() * other.pieces.len());
        for p in &self.pieces {
            for q in &other.pieces {
                let b = p.b.iter().zip(&q.b).map(|(x, y)| x + y).collect();
                pieces.push(AffinePiece::new(b, &p.k + &q.k));
            }
        }
        PLFunction::new(pieces)
    }

    /// Scales by a nonnegative factor (negative factors would break the max).
    pub fn scale(&self, factor: &Rat) -> Result<PLFunction> {
        if factor.is_negative() {
            return Err(Error::Validation {
                field: "scale".into(),
                message: "scaling a max of affine pieces requires a nonnegative factor".into(),
            });
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                AffinePiece::new(p.b.iter().map(|x| x * factor).collect(), &p.k * factor)
            })
            .collect();
        PLFunction::new(pieces)
    }
}

/// A maximal region where one affine piece of f is active.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinedCell {
    pub cell: HPolytope,
    pub piece: AffinePiece,
}

/// Cuts the domain into the full-dimensional cells on which a single piece
/// of f dominates. The cells cover the domain up to measure zero.
pub fn refine_by_pl(domain: &HPolytope, f: &PLFunction) -> Result<Vec<RefinedCell>> {
    if f.nvars() != domain.n() {
        return Err(Error::DimensionMismatch { expected: domain.n(), got: f.nvars() });
    }
    let pieces = f.deduped_pieces();
    let mut out = Vec::new();
    'pieces: for (idx, piece) in pieces.iter().enumerate() {
        let mut constraints = domain.constraints().to_vec();
        for (jdx, other) in pieces.iter().enumerate() {
            if jdx == idx {
                continue;
            }
            let diff: Vec<Rat> = piece.b.iter().zip(&other.b).map(|(x, y)| x - y).collect();
            let rhs = &other.k - &piece.k;
            match primitivize(&diff) {
                None => {
                    // Parallel pieces: one of them dominates globally.
                    if rhs.is_positive() {
                        continue 'pieces;
                    }
                }
                Some((normal, scale)) => {
                    constraints.push(Constraint::new(normal, rhs / scale));
                }
            }
        }
        match HPolytope::new(constraints) {
            Ok(cell) => out.push(RefinedCell { cell, piece: piece.clone() }),
            Err(Error::Infeasible) | Err(Error::NotFullDimensional) => {}
            Err(other) => return Err(other),
        }
    }
    Ok(out)
}

/// The single affine piece equal to f on all of the domain, if one exists.
/// Matching f at every vertex is equivalent to dominating every other piece
/// on the whole domain, so the decision is exact.
pub fn pl_restrict_affine(f: &PLFunction, domain: &HPolytope) -> Result<Option<AffinePiece>> {
    if f.nvars() != domain.n() {
        return Err(Error::DimensionMismatch { expected: domain.n(), got: f.nvars() });
    }
    for piece in f.deduped_pieces() {
        let dominant = domain
            .vertices()
            .iter()
            .map(|v| Ok(piece.eval(v) == f.eval(v)?))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|b| b);
        if dominant {
            return Ok(Some(piece));
        }
    }
    Ok(None)
}

/// Decides f(wx) = f(x) on the domain for every w. A syntactic check on the
/// piece set settles the common case; otherwise f and f composed with w are
/// compared exactly on every full-dimensional cell of their common
/// refinement.
pub fn pl_is_weyl_invariant(
    f: &PLFunction,
    domain: &HPolytope,
    w: &WeylGroup,
) -> Result<bool> {
    if f.nvars() != domain.n() {
        return Err(Error::DimensionMismatch { expected: domain.n(), got: f.nvars() });
    }
    let piece_set: BTreeSet<AffinePiece> = f.deduped_pieces().into_iter().collect();
    let mut syntactic = true;
    for m in w.iter() {
        let image: BTreeSet<AffinePiece> =
            f.compose_matrix(m)?.deduped_pieces().into_iter().collect();
        if image != piece_set {
            syntactic = false;
            break;
        }
    }
    if syntactic {
        return Ok(true);
    }

    let cells_f = refine_by_pl(domain, f)?;
    for m in w.iter() {
        let fw = f.compose_matrix(m)?;
        let cells_fw = refine_by_pl(domain, &fw)?;
        for cf in &cells_f {
            for cw in &cells_fw {
                let mut constraints = cf.cell.constraints().to_vec();
                constraints.extend(cw.cell.constraints().iter().cloned());
                let overlap = match HPolytope::new(constraints) {
                    Ok(p) => p,
                    Err(Error::Infeasible) | Err(Error::NotFullDimensional) => continue,
                    Err(other) => return Err(other),
                };
                let agree = overlap
                    .vertices()
                    .iter()
                    .all(|v| cf.piece.eval(v) == cw.piece.eval(v));
                if !agree {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int, rat_vec, Int};
    use crate::root_system::RootSystem;

    fn cons(normal: &[i64], offset: i64) -> Constraint {
        Constraint::new(normal.iter().map(|&x| Int::from(x)).collect(), rat_int(offset))
    }

    fn piece(b: &[i64], k: i64) -> AffinePiece {
        AffinePiece::new(rat_vec(b), rat_int(k))
    }

    fn abs_x(n: usize, j: usize) -> PLFunction {
        let mut plus = vec![0i64; n];
        plus[j] = 1;
        let minus: Vec<i64> = plus.iter().map(|x| -x).collect();
        PLFunction::new(vec![piece(&plus, 0), piece(&minus, 0)]).unwrap()
    }

    #[test]
    fn eval_takes_the_max() {
        let f = abs_x(1, 0);
        assert_eq!(f.eval(&rat_vec(&[-3])).unwrap(), rat_int(3));
        assert_eq!(f.eval(&[rat(1, 2)]).unwrap(), rat(1, 2));
        assert!((f.eval_f64(&[-0.25]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn refine_single_piece_gives_whole_domain() {
        let domain = HPolytope::new(vec![cons(&[1], 0), cons(&[-1], -2)]).unwrap();
        let f = PLFunction::new(vec![piece(&[3], 1)]).unwrap();
        let cells = refine_by_pl(&domain, &f).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].cell, domain);
        assert_eq!(cells[0].piece, piece(&[3], 1));
    }

    #[test]
    fn refine_drops_lower_dimensional_cells() {
        // On [0, 2] the piece -x only ties |x| at the origin.
        let domain = HPolytope::new(vec![cons(&[1], 0), cons(&[-1], -2)]).unwrap();
        let cells = refine_by_pl(&domain, &abs_x(1, 0)).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].piece, piece(&[1], 0));
        assert_eq!(cells[0].cell.vertices(), &[rat_vec(&[0]), rat_vec(&[2])]);
    }

    #[test]
    fn refine_splits_symmetric_interval() {
        let domain = HPolytope::new(vec![cons(&[1], -1), cons(&[-1], -1)]).unwrap();
        let cells = refine_by_pl(&domain, &abs_x(1, 0)).unwrap();
        assert_eq!(cells.len(), 2);
        let verts: Vec<_> = cells.iter().map(|c| c.cell.vertices().to_vec()).collect();
        assert!(verts.contains(&vec![rat_vec(&[-1]), rat_vec(&[0])]));
        assert!(verts.contains(&vec![rat_vec(&[0]), rat_vec(&[1])]));
    }

    #[test]
    fn refine_merges_duplicate_pieces() {
        let domain = HPolytope::new(vec![cons(&[1], -1), cons(&[-1], -1)]).unwrap();
        let f = PLFunction::new(vec![piece(&[1], 0), piece(&[1], 0), piece(&[-1], 0)]).unwrap();
        let cells = refine_by_pl(&domain, &f).unwrap();
        assert_eq!(cells.len(), 2, "duplicate pieces must not double-count cells");
    }

    #[test]
    fn restrict_affine_examples() {
        let pplus = HPolytope::new(vec![cons(&[1], 0), cons(&[-1], -2)]).unwrap();
        assert_eq!(pl_restrict_affine(&abs_x(1, 0), &pplus).unwrap(), Some(piece(&[1], 0)));

        let symmetric = HPolytope::new(vec![cons(&[1], -1), cons(&[-1], -1)]).unwrap();
        assert_eq!(pl_restrict_affine(&abs_x(1, 0), &symmetric).unwrap(), None);

        let constant = PLFunction::new(vec![piece(&[0], 3)]).unwrap();
        assert_eq!(pl_restrict_affine(&constant, &symmetric).unwrap(), Some(piece(&[0], 3)));
    }

    #[test]
    fn weyl_invariance_examples() {
        let a1 = RootSystem::preset("A1").unwrap();
        let w = a1.weyl_group().unwrap();
        let domain = HPolytope::new(vec![cons(&[1], -2), cons(&[-1], -2)]).unwrap();
        assert!(pl_is_weyl_invariant(&abs_x(1, 0), &domain, &w).unwrap());

        let linear = PLFunction::new(vec![piece(&[1], 0)]).unwrap();
        assert!(!pl_is_weyl_invariant(&linear, &domain, &w).unwrap());

        let torus = RootSystem::preset("torus-2").unwrap();
        let wt = torus.weyl_group().unwrap();
        let square = HPolytope::new(vec![
            cons(&[1, 0], -1),
            cons(&[-1, 0], -1),
            cons(&[0, 1], -1),
            cons(&[0, -1], -1),
        ])
        .unwrap();
        let g = PLFunction::new(vec![piece(&[2, 3], 0)]).unwrap();
        assert!(pl_is_weyl_invariant(&g, &square, &wt).unwrap());
    }

    #[test]
    fn invariance_survives_asymmetric_redundant_pieces() {
        // max(x, -x, x/2) equals |x| although its piece set is not symmetric.
        let a1 = RootSystem::preset("A1").unwrap();
        let w = a1.weyl_group().unwrap();
        let domain = HPolytope::new(vec![cons(&[1], -2), cons(&[-1], -2)]).unwrap();
        let f = PLFunction::new(vec![
            piece(&[1], 0),
            piece(&[-1], 0),
            AffinePiece::new(vec![rat(1, 2)], rat_int(0)),
        ])
        .unwrap();
        assert!(pl_is_weyl_invariant(&f, &domain, &w).unwrap());
    }

    #[test]
    fn sum_and_scale_are_pointwise() {
        let f = abs_x(2, 0);
        let g = abs_x(2, 1);
        let s = f.sum(&g).unwrap();
        let x = vec![rat(-1, 2), rat(3, 4)];
        assert_eq!(s.eval(&x).unwrap(), f.eval(&x).unwrap() + g.eval(&x).unwrap());
        let h = f.scale(&rat(7, 2)).unwrap();
        assert_eq!(h.eval(&x).unwrap(), f.eval(&x).unwrap() * rat(7, 2));
        assert!(f.scale(&rat_int(-1)).is_err());
    }

    #[test]
    fn compose_affine_map_restricts_to_charts() {
        // Restrict |x1| on the segment x = (t, 1 - t): pieces t and -t.
        let f = abs_x(2, 0);
        let linear = vec![vec![rat_int(1)], vec![rat_int(-1)]];
        let shift = vec![rat_int(0), rat_int(1)];
        let g = f.compose_affine_map(&linear, &shift).unwrap();
        assert_eq!(g.eval(&[rat(1, 4)]).unwrap(), rat(1, 4));
        assert_eq!(g.eval(&[rat(-2, 1)]).unwrap(), rat_int(2));
    }
}
