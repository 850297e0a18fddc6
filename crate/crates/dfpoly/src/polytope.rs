//! Rational polytopes at desk scale: H-representation with primitive integer
//! normals, exact vertex enumeration, Weyl-invariance checks, the positive
//! part P+ cut out by the chamber walls, facet classification, the Fano
//! offset rule, and triangulation for exact integration.
//!
//! Constraint normals live in the dual lattice and pair with points by the
//! plain coordinate dot product; the gram pairing of the root system only
//! enters through the chamber wall covectors.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{affine_rank, det, kernel_basis, rank, solve_square};
use crate::rat::{dot_int_rat, int_to_rat_vec, primitivize, Int, Rat};
use crate::root_system::{RootSystem, WeylGroup};

/// Enumeration limits: beyond these the n-subset algorithms are refused.
pub const MAX_DIM: usize = 8;
pub const MAX_CONSTRAINTS: usize = 64;
pub const MAX_SUBSETS: u128 = 500_000;

/// One half-space `normal . x >= offset` with a primitive integer normal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub normal: Vec<Int>,
    pub offset: Rat,
}

impl Constraint {
    pub fn new(normal: Vec<Int>, offset: Rat) -> Self {
        Constraint { normal, offset }
    }

    pub fn holds_at(&self, x: &[Rat]) -> bool {
        dot_int_rat(&self.normal, x) >= self.offset
    }

    pub fn tight_at(&self, x: &[Rat]) -> bool {
        dot_int_rat(&self.normal, x) == self.offset
    }

    /// Divides out the gcd of the normal entries, rescaling the offset.
    pub fn canonicalized(self) -> Result<Constraint> {
        let cov = int_to_rat_vec(&self.normal);
        let (normal, scale) = primitivize(&cov).ok_or(Error::ZeroNormal)?;
        Ok(Constraint { normal, offset: self.offset / scale })
    }
}

/// Bounded full-dimensional rational polytope, validated at construction;
/// the exact vertex set is computed up front and stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPolytope {
    n: usize,
    constraints: Vec<Constraint>,
    vertices: Vec<Vec<Rat>>,
}

/// Plain list of points presented as vertices, deduplicated and sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VPolytope {
    n: usize,
    vertices: Vec<Vec<Rat>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetKind {
    /// Facet meeting the open Weyl chamber in its relative interior.
    Outer,
    /// Facet contained in a chamber wall hyperplane.
    Wall,
}

/// Codimension-one face of P+ together with its half-space data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<Int>,
    pub offset: Rat,
    pub vertices: Vec<Vec<Rat>>,
    pub kind: FacetKind,
}

/// Per-facet outcome of the Fano offset rule `offset = normal . 2rho - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanoFacetCheck {
    pub normal: Vec<Int>,
    pub offset: Rat,
    pub kind: FacetKind,
    /// Offset the rule demands; None for wall facets, which carry no rule.
    pub required_offset: Option<Rat>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanoReport {
    pub fano: bool,
    pub facets: Vec<FanoFacetCheck>,
}

/// n+1 affinely independent points in n-space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex {
    vertices: Vec<Vec<Rat>>,
}

impl Simplex {
    pub fn new(vertices: Vec<Vec<Rat>>) -> Result<Self> {
        let n = vertices.first().map(|v| v.len()).unwrap_or(0);
        if n == 0 || vertices.len() != n + 1 || vertices.iter().any(|v| v.len() != n) {
            return Err(Error::DegenerateSimplex);
        }
        let s = Simplex { vertices };
        if s.edge_determinant().is_zero() {
            return Err(Error::DegenerateSimplex);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    /// Determinant of the edge matrix [v_1 - v_0, ..., v_n - v_0].
    pub fn edge_determinant(&self) -> Rat {
        let n = self.n();
        let rows: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n).map(|j| &self.vertices[i + 1][j] - &self.vertices[0][j]).collect()
            })
            .collect();
        det(&rows)
    }

    pub fn volume(&self) -> Rat {
        let mut fact = Int::one();
        for k in 2..=self.n() {
            fact *= Int::from(k);
        }
        self.edge_determinant().abs() / Rat::from(fact)
    }
}

fn binomial_u128(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(m - k) {
        acc = acc.saturating_mul((m - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn guard_enumeration(m: usize, n: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::LimitExceeded(format!("dimension {n} exceeds limit {MAX_DIM}")));
    }
    if m > MAX_CONSTRAINTS {
        return Err(Error::LimitExceeded(format!(
            "{m} constraints exceed limit {MAX_CONSTRAINTS}"
        )));
    }
    let subsets = binomial_u128(m, n);
    if subsets > MAX_SUBSETS {
        return Err(Error::LimitExceeded(format!(
            "C({m},{n}) = {subsets} subsets exceed limit {MAX_SUBSETS}"
        )));
    }
    Ok(())
}

impl HPolytope {
    /// Validates boundedness, feasibility and full dimension, and stores the
    /// exact vertex set. Normals are primitivized and exact duplicate
    /// constraints are merged; constraints end up sorted.
    pub fn new(constraints: Vec<Constraint>) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::InvalidPolytope("no constraints given".into()));
        }
        let n = constraints[0].normal.len();
        if n == 0 {
            return Err(Error::InvalidPolytope("zero-dimensional ambient space".into()));
        }
        for c in &constraints {
            if c.normal.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.normal.len() });
            }
        }
        let canonical: BTreeSet<Constraint> = constraints
            .into_iter()
            .map(Constraint::canonicalized)
            .collect::<Result<_>>()?;
        let constraints: Vec<Constraint> = canonical.into_iter().collect();
        let m = constraints.len();
        guard_enumeration(m, n)?;

        let normal_rows: Vec<Vec<Rat>> =
            constraints.iter().map(|c| int_to_rat_vec(&c.normal)).collect();
        if rank(&normal_rows) < n {
            return Err(Error::Unbounded);
        }
        // Recession cone: rank is full, so the cone is pointed and any nonzero
        // ray has n-1 linearly independent tight constraints.
        for subset in (0..m).combinations(n - 1) {
            let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| normal_rows[i].clone()).collect();
            let kernel = kernel_basis(&rows, n);
            if kernel.len() != 1 {
                continue;
            }
            let ray = &kernel[0];
            for candidate in [ray.clone(), ray.iter().map(|x| -x).collect::<Vec<Rat>>()] {
                let inside = constraints.iter().all(|c| {
                    !dot_int_rat(&c.normal, &candidate).is_negative()
                });
                if inside {
                    return Err(Error::Unbounded);
                }
            }
        }

        let mut vertex_set: BTreeSet<Vec<Rat>> = BTreeSet::new();
        for subset in (0..m).combinations(n) {
            let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| normal_rows[i].clone()).collect();
            let rhs: Vec<Rat> = subset.iter().map(|&i| constraints[i].offset.clone()).collect();
            let Some(x) = solve_square(&rows, &rhs) else { continue };
            if constraints.iter().all(|c| c.holds_at(&x)) {
                vertex_set.insert(x);
            }
        }
        if vertex_set.is_empty() {
            return Err(Error::Infeasible);
        }
        let vertices: Vec<Vec<Rat>> = vertex_set.into_iter().collect();
        if affine_rank(&vertices) < n {
            return Err(Error::NotFullDimensional);
        }
        Ok(HPolytope { n, constraints, vertices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    pub fn to_vpolytope(&self) -> VPolytope {
        VPolytope { n: self.n, vertices: self.vertices.clone() }
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        x.len() == self.n && self.constraints.iter().all(|c| c.holds_at(x))
    }

    /// Componentwise (min, max) over the vertex set.
    pub fn bounding_box(&self) -> (Vec<Rat>, Vec<Rat>) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for j in 0..self.n {
                if v[j] < lo[j] {
                    lo[j] = v[j].clone();
                }
                if v[j] > hi[j] {
                    hi[j] = v[j].clone();
                }
            }
        }
        (lo, hi)
    }

    /// Indices of constraints supporting a facet, with the facet's vertices.
    pub fn facet_supports(&self) -> Vec<(usize, Vec<Vec<Rat>>)> {
        let mut out = Vec::new();
        for (i, c) in self.constraints.iter().enumerate() {
            let tight: Vec<Vec<Rat>> =
                self.vertices.iter().filter(|v| c.tight_at(v)).cloned().collect();
            if !tight.is_empty() && affine_rank(&tight) == self.n - 1 {
                out.push((i, tight));
            }
        }
        out
    }

    /// Drops constraints that do not support a facet; geometry is unchanged.
    pub fn without_redundant_constraints(&self) -> HPolytope {
        let keep: BTreeSet<usize> = self.facet_supports().into_iter().map(|(i, _)| i).collect();
        let constraints = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(i, _)| keep.contains(i))
            .map(|(_, c)| c.clone())
            .collect();
        HPolytope { n: self.n, constraints, vertices: self.vertices.clone() }
    }

    /// Image under x -> k x for k > 0.
    pub fn dilate(&self, k: &Rat) -> Result<HPolytope> {
        if !k.is_positive() {
            return Err(Error::InvalidPolytope("dilation factor must be positive".into()));
        }
        let constraints = self
            .constraints
            .iter()
            .map(|c| Constraint::new(c.normal.clone(), &c.offset * k))
            .collect();
        HPolytope::new(constraints)
    }
}

impl VPolytope {
    pub fn new(vertices: Vec<Vec<Rat>>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidPolytope("no vertices given".into()));
        }
        let n = vertices[0].len();
        if n == 0 {
            return Err(Error::InvalidPolytope("zero-dimensional ambient space".into()));
        }
        for v in &vertices {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        let set: BTreeSet<Vec<Rat>> = vertices.into_iter().collect();
        Ok(VPolytope { n, vertices: set.into_iter().collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }
}

/// H-representation of the convex hull of a point set, by hyperplane
/// enumeration over n-subsets. Points that are not vertices of the hull are
/// tolerated; the result is the validated canonical HPolytope.
pub fn hull_facets(v: &VPolytope) -> Result<HPolytope> {
    let n = v.n;
    let points = &v.vertices;
    if affine_rank(points) < n {
        return Err(Error::NotFullDimensional);
    }
    guard_enumeration(points.len(), n)?;
    let mut found: BTreeSet<Constraint> = BTreeSet::new();
    for subset in (0..points.len()).combinations(n) {
        let base = &points[subset[0]];
        let diffs: Vec<Vec<Rat>> = subset[1..]
            .iter()
            .map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let kernel = kernel_basis(&diffs, n);
        if kernel.len() != 1 {
            continue;
        }
        let normal = &kernel[0];
        let offset: Rat = normal.iter().zip(base).map(|(a, b)| a * b).sum();
        let mut any_above = false;
        let mut any_below = false;
        for p in points {
            let val: Rat = normal.iter().zip(p).map(|(a, b)| a * b).sum();
            if val > offset {
                any_above = true;
            } else if val < offset {
                any_below = true;
            }
        }
        let (cov, off) = if !any_below {
            (normal.clone(), offset)
        } else if !any_above {
            (normal.iter().map(|x| -x).collect(), -offset)
        } else {
            continue;
        };
        let (prim, scale) = primitivize(&cov).expect("hull normal cannot be zero");
        found.insert(Constraint::new(prim, off / scale));
    }
    HPolytope::new(found.into_iter().collect())
}

/// True iff P is stable under the Weyl action. Checked two ways that must
/// agree: the facet constraint set under the dual (transpose) action, and
/// the vertex set under the direct action.
pub fn is_weyl_invariant(p: &HPolytope, w: &WeylGroup) -> bool {
    let facet_set: BTreeSet<(Vec<Int>, Rat)> = p
        .without_redundant_constraints()
        .constraints()
        .iter()
        .map(|c| (c.normal.clone(), c.offset.clone()))
        .collect();
    let mut by_constraints = true;
    for m in w.iter() {
        let mt = m.transpose();
        let image: BTreeSet<(Vec<Int>, Rat)> = facet_set
            .iter()
            .map(|(normal, offset)| {
                let moved = mt.apply(&int_to_rat_vec(normal));
                let (prim, scale) =
                    primitivize(&moved).expect("Weyl image of a nonzero covector is nonzero");
                (prim, offset / scale)
            })
            .collect();
        if image != facet_set {
            by_constraints = false;
        }
    }

    let vertex_set: BTreeSet<&Vec<Rat>> = p.vertices().iter().collect();
    let mut by_vertices = true;
    for m in w.iter() {
        if !p.vertices().iter().all(|v| vertex_set.contains(&m.apply(v))) {
            by_vertices = false;
        }
    }

    debug_assert_eq!(by_constraints, by_vertices, "invariance routes disagree");
    by_constraints && by_vertices
}

/// P+ = P intersected with the closed positive chamber; chamber walls are
/// appended as constraints and redundant constraints are removed.
pub fn positive_part(p: &HPolytope, rs: &RootSystem) -> Result<HPolytope> {
    if rs.simple_roots().is_empty() {
        return Ok(p.clone());
    }
    let mut constraints = p.constraints().to_vec();
    for normal in rs.chamber_normals() {
        constraints.push(Constraint::new(normal, Rat::zero()));
    }
    let combined = HPolytope::new(constraints).map_err(|e| match e {
        Error::Infeasible => Error::EmptyPositivePart,
        Error::NotFullDimensional => Error::LowerDimensionalPositivePart,
        other => other,
    })?;
    Ok(combined.without_redundant_constraints())
}

/// Facets of P+ labeled wall or outer. A facet is wall when it lies inside
/// a chamber wall hyperplane; that is only legitimate for the chamber
/// constraint itself, any other constraint there is rejected as degenerate.
pub fn classify_facets(pplus: &HPolytope, rs: &RootSystem) -> Result<Vec<Facet>> {
    let wall_covectors: Vec<Vec<Rat>> =
        rs.simple_roots().iter().map(|a| rs.root_covector(a)).collect();
    let chamber: BTreeSet<(Vec<Int>, Rat)> =
        rs.chamber_normals().into_iter().map(|g| (g, Rat::zero())).collect();
    let mut out = Vec::new();
    for (i, tight) in pplus.facet_supports() {
        let c = &pplus.constraints()[i];
        let in_wall = wall_covectors.iter().any(|cov| {
            tight.iter().all(|v| cov.iter().zip(v).map(|(a, b)| a * b).sum::<Rat>().is_zero())
        });
        let kind = if in_wall {
            if chamber.contains(&(c.normal.clone(), c.offset.clone())) {
                FacetKind::Wall
            } else {
                return Err(Error::DegenerateFacet(format!(
                    "facet of constraint {:?} >= {} lies inside a chamber wall",
                    c.normal, c.offset
                )));
            }
        } else {
            FacetKind::Outer
        };
        out.push(Facet { normal: c.normal.clone(), offset: c.offset.clone(), vertices: tight, kind });
    }
    Ok(out)
}

/// Fano offset rule over the outer facets of P+: each must satisfy
/// `offset = normal . 2rho - 1` exactly.
pub fn check_fano(p: &HPolytope, rs: &RootSystem) -> Result<FanoReport> {
    let pplus = positive_part(p, rs)?;
    let facets = classify_facets(&pplus, rs)?;
    let mut checks = Vec::new();
    let mut fano = true;
    for f in &facets {
        match f.kind {
            FacetKind::Wall => checks.push(FanoFacetCheck {
                normal: f.normal.clone(),
                offset: f.offset.clone(),
                kind: f.kind,
                required_offset: None,
                ok: true,
            }),
            FacetKind::Outer => {
                let required = dot_int_rat(&f.normal, rs.two_rho()) - Rat::one();
                let ok = f.offset == required;
                fano &= ok;
                checks.push(FanoFacetCheck {
                    normal: f.normal.clone(),
                    offset: f.offset.clone(),
                    kind: f.kind,
                    required_offset: Some(required),
                    ok,
                });
            }
        }
    }
    Ok(FanoReport { fano, facets: checks })
}

/// Chart data for flattening a facet: the coordinate to drop and the facet
/// normal entry there. The drop coordinate maximizes |normal_j|, ties to the
/// smallest index, so charts are deterministic.
pub fn facet_drop_coordinate(normal: &[Int]) -> Result<(usize, Int)> {
    let mut best: Option<(usize, Int)> = None;
    for (j, a) in normal.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let mag = a.abs();
        match &best {
            Some((_, m)) if *m >= mag => {}
            _ => best = Some((j, mag)),
        }
    }
    let (j, _) = best.ok_or(Error::ZeroNormal)?;
    Ok((j, normal[j].clone()))
}

fn project_out(point: &[Rat], drop: usize) -> Vec<Rat> {
    point
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != drop)
        .map(|(_, x)| x.clone())
        .collect()
}

/// Triangulates a full-dimensional polytope by coning the lexicographically
/// least vertex over its facets, recursing through coordinate projections of
/// the facets. Simplices have disjoint interiors and cover the polytope.
pub fn triangulate(p: &HPolytope) -> Result<Vec<Simplex>> {
    let cells = triangulate_cells(p)?;
    cells.into_iter().map(Simplex::new).collect()
}

fn triangulate_cells(p: &HPolytope) -> Result<Vec<Vec<Vec<Rat>>>> {
    let n = p.n();
    if n == 1 {
        let lo = p.vertices().first().unwrap().clone();
        let hi = p.vertices().last().unwrap().clone();
        return Ok(vec![vec![lo, hi]]);
    }
    let apex = p.vertices()[0].clone();
    let mut out = Vec::new();
    for (i, tight) in p.facet_supports() {
        if tight.contains(&apex) {
            continue;
        }
        let c = &p.constraints()[i];
        let (drop, _) = facet_drop_coordinate(&c.normal)?;
        // The projection along `drop` is injective on the facet hyperplane,
        // so flattened vertices lift back uniquely.
        let projected: Vec<Vec<Rat>> = tight.iter().map(|v| project_out(v, drop)).collect();
        let flat = hull_facets(&VPolytope::new(projected.clone())?)?;
        for cell in triangulate_cells(&flat)? {
            let lifted: Vec<Vec<Rat>> = cell
                .iter()
                .map(|y| {
                    let pos = projected
                        .iter()
                        .position(|q| q == y)
                        .expect("triangulation vertex must come from the facet");
                    tight[pos].clone()
                })
                .collect();
            let mut simplex = vec![apex.clone()];
            simplex.extend(lifted);
            out.push(simplex);
        }
    }
    Ok(out)
}
