//! The Donaldson-Futaki invariant of a test function on a polarized group
//! compactification, assembled from exact integrals over the positive part
//! of the polytope.
//!
//! Two evaluation routes are provided: the general formula
//!
//! ```text
//! df(f) = (1 / (2 V)) ( boundary(f H_d) + 2 int(f H_{d-1}) - a int(f H_d) )
//! a     = ( boundary(H_d) + 2 int(H_{d-1}) ) / V,      V = int(H_d)
//! ```
//!
//! valid for every convex rational W-invariant piecewise-linear f, and the
//! barycenter shortcut `df(f) = (1/2) b . (bar - 2 rho)` valid when the
//! polytope satisfies the Fano offset rule and f is affine with linear part
//! b on the positive part. Reports cross-check the two routes exactly.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::plfunc::{
    pl_is_weyl_invariant, pl_restrict_affine, refine_by_pl, AffinePiece, PLFunction,
};
use crate::poly::{h_sub, h_top, verify_density_identities, Polynomial};
use crate::polytope::{
    check_fano, classify_facets, is_weyl_invariant, positive_part, Facet, HPolytope,
};
use crate::quadrature::{
    facet_chart, integrate_facet_sigma, integrate_polytope, mc_estimate_fn,
    mc_facet_sigma_estimate_fn, McEstimate,
};
use crate::rat::{dot_rat, rat_int, to_f64, Rat};
use crate::root_system::RootSystem;

/// Exact volume of the positive part against the density H_d.
pub fn dh_volume(pplus: &HPolytope, rs: &RootSystem) -> Result<Rat> {
    integrate_polytope(&h_top(rs), pplus)
}

/// Exact H_d-weighted barycenter of the positive part.
pub fn dh_barycenter(pplus: &HPolytope, rs: &RootSystem) -> Result<Vec<Rat>> {
    let hd = h_top(rs);
    let vol = integrate_polytope(&hd, pplus)?;
    (0..pplus.n())
        .map(|j| {
            let weighted = hd.mul(&Polynomial::variable(pplus.n(), j));
            Ok(integrate_polytope(&weighted, pplus)? / &vol)
        })
        .collect()
}

/// The normalizing constant `a`; equals 2r + n exactly when the polytope
/// satisfies the Fano offset rule.
pub fn constant_a(pplus: &HPolytope, rs: &RootSystem) -> Result<Rat> {
    let facets = classify_facets(pplus, rs)?;
    let hd = h_top(rs);
    let mut boundary = Rat::zero();
    for f in &facets {
        boundary += integrate_facet_sigma(&hd, f)?;
    }
    let volume = integrate_polytope(&hd, pplus)?;
    let sub = integrate_polytope(&h_sub(rs), pplus)?;
    Ok((boundary + rat_int(2) * sub) / volume)
}

/// Exact integral of f * density over the domain, by refining the domain
/// into the cells where single affine pieces of f are active.
fn integrate_pl_times(density: &Polynomial, domain: &HPolytope, f: &PLFunction) -> Result<Rat> {
    let mut acc = Rat::zero();
    for cell in refine_by_pl(domain, f)? {
        let piece = Polynomial::affine_form(&cell.piece.b, &cell.piece.k);
        acc += integrate_polytope(&piece.mul(density), &cell.cell)?;
    }
    Ok(acc)
}

/// Exact integral of f * density over one facet against the boundary
/// measure; f is pushed through the facet chart and the flattened facet is
/// refined by the transported pieces.
fn integrate_pl_times_facet(density: &Polynomial, facet: &Facet, f: &PLFunction) -> Result<Rat> {
    let n = facet.normal.len();
    if n == 1 {
        let point = &facet.vertices[0];
        return Ok(f.eval(point)? * integrate_facet_sigma(density, facet)?);
    }
    let chart = facet_chart(facet)?;
    let flat_density = density.compose(&chart.images)?;
    let flat_f = f.compose_affine_map(&chart.linear, &chart.shift)?;
    let mut acc = Rat::zero();
    for cell in refine_by_pl(&chart.domain, &flat_f)? {
        let piece = Polynomial::affine_form(&cell.piece.b, &cell.piece.k);
        acc += integrate_polytope(&piece.mul(&flat_density), &cell.cell)?;
    }
    Ok(acc * chart.scale)
}

/// Everything fixed by (P, rs) that the evaluation routes share.
struct Assembly {
    pplus: HPolytope,
    facets: Vec<Facet>,
    hd: Polynomial,
    hsub: Polynomial,
    volume: Rat,
    a: Rat,
}

fn assemble(p: &HPolytope, rs: &RootSystem) -> Result<Assembly> {
    let pplus = positive_part(p, rs)?;
    let facets = classify_facets(&pplus, rs)?;
    let hd = h_top(rs);
    let hsub = h_sub(rs);
    let volume = integrate_polytope(&hd, &pplus)?;
    let mut boundary = Rat::zero();
    for f in &facets {
        boundary += integrate_facet_sigma(&hd, f)?;
    }
    let a = (boundary + rat_int(2) * integrate_polytope(&hsub, &pplus)?) / &volume;
    Ok(Assembly { pplus, facets, hd, hsub, volume, a })
}

impl Assembly {
    fn df_value(&self, f: &PLFunction) -> Result<Rat> {
        let mut boundary = Rat::zero();
        for facet in &self.facets {
            boundary += integrate_pl_times_facet(&self.hd, facet, f)?;
        }
        let vol_hd = integrate_pl_times(&self.hd, &self.pplus, f)?;
        let vol_hsub = integrate_pl_times(&self.hsub, &self.pplus, f)?;
        Ok((boundary + rat_int(2) * vol_hsub - &self.a * vol_hd)
            / (rat_int(2) * &self.volume))
    }
}

fn require_invariance(
    p: &HPolytope,
    rs: &RootSystem,
    f: &PLFunction,
    allow_non_invariant_f: bool,
) -> Result<bool> {
    let w = rs.weyl_group()?;
    if !is_weyl_invariant(p, &w) {
        return Err(Error::NotWeylInvariantPolytope);
    }
    let f_invariant = pl_is_weyl_invariant(f, p, &w)?;
    if !f_invariant && !allow_non_invariant_f {
        return Err(Error::NotWeylInvariantFunction);
    }
    Ok(f_invariant)
}

/// Exact Donaldson-Futaki value of f by the general formula. The polytope
/// and f must both be Weyl-invariant.
pub fn df_general(p: &HPolytope, rs: &RootSystem, f: &PLFunction) -> Result<Rat> {
    require_invariance(p, rs, f, false)?;
    assemble(p, rs)?.df_value(f)
}

/// As [`df_general`] but optionally tolerating a non-invariant f; reports
/// whether f was invariant.
pub fn df_general_with_options(
    p: &HPolytope,
    rs: &RootSystem,
    f: &PLFunction,
    allow_non_invariant_f: bool,
) -> Result<(Rat, bool)> {
    let f_invariant = require_invariance(p, rs, f, allow_non_invariant_f)?;
    Ok((assemble(p, rs)?.df_value(f)?, f_invariant))
}

/// Exact Donaldson-Futaki value by the barycenter shortcut, available only
/// when the Fano offset rule holds and f is affine on the positive part.
pub fn df_fano_affine(p: &HPolytope, rs: &RootSystem, f: &PLFunction) -> Result<Rat> {
    let fano = check_fano(p, rs)?;
    if !fano.fano {
        return Err(Error::NotFano);
    }
    let pplus = positive_part(p, rs)?;
    let piece =
        pl_restrict_affine(f, &pplus)?.ok_or(Error::NotAffineOnPositivePart)?;
    let bar = dh_barycenter(&pplus, rs)?;
    Ok(barycenter_pairing(&piece, &bar, rs))
}

fn barycenter_pairing(piece: &AffinePiece, bar: &[Rat], rs: &RootSystem) -> Rat {
    let diff: Vec<Rat> = bar.iter().zip(rs.two_rho()).map(|(b, t)| b - t).collect();
    dot_rat(&piece.b, &diff) / rat_int(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossCheck {
    /// Both routes were evaluated and agree exactly.
    Equal,
    /// The barycenter route does not apply (not Fano, or f not affine on
    /// the positive part).
    NotApplicable,
}

/// Full evaluation record for one (polytope, root system, f) instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DFReport {
    pub fano: bool,
    pub r: usize,
    pub n: usize,
    pub d: usize,
    pub a: Rat,
    pub vol_dh: Rat,
    pub bar_dh: Vec<Rat>,
    pub two_rho: Vec<Rat>,
    pub df_general: Rat,
    pub df_affine: Option<Rat>,
    pub cross_check: CrossCheck,
    pub identities_ok: bool,
    pub f_weyl_invariant: bool,
    /// True when a non-invariant f was admitted by explicit request.
    pub invariance_override_used: bool,
}

/// Runs the whole pipeline: invariance checks, Fano rule, both evaluation
/// routes with an exact cross-check, and the density identity verification.
pub fn df_report(
    p: &HPolytope,
    rs: &RootSystem,
    f: &PLFunction,
    allow_non_invariant_f: bool,
) -> Result<DFReport> {
    let f_weyl_invariant = require_invariance(p, rs, f, allow_non_invariant_f)?;
    let fano = check_fano(p, rs)?;
    let asm = assemble(p, rs)?;
    let df_general = asm.df_value(f)?;
    let bar_dh: Vec<Rat> = {
        let hd = &asm.hd;
        (0..asm.pplus.n())
            .map(|j| {
                let weighted = hd.mul(&Polynomial::variable(asm.pplus.n(), j));
                Ok(integrate_polytope(&weighted, &asm.pplus)? / &asm.volume)
            })
            .collect::<Result<_>>()?
    };
    let df_affine = if fano.fano {
        pl_restrict_affine(f, &asm.pplus)?
            .map(|piece| barycenter_pairing(&piece, &bar_dh, rs))
    } else {
        None
    };
    let cross_check = match &df_affine {
        Some(v) if *v == df_general => CrossCheck::Equal,
        Some(v) => {
            return Err(Error::CrossCheckFailed {
                general: df_general.to_string(),
                affine: v.to_string(),
            })
        }
        None => CrossCheck::NotApplicable,
    };
    Ok(DFReport {
        fano: fano.fano,
        r: rs.r(),
        n: rs.n(),
        d: rs.d(),
        a: asm.a,
        vol_dh: asm.volume,
        bar_dh,
        two_rho: rs.two_rho().to_vec(),
        df_general,
        df_affine,
        cross_check,
        identities_ok: verify_density_identities(rs).all_pass(),
        f_weyl_invariant,
        invariance_override_used: allow_non_invariant_f && !f_weyl_invariant,
    })
}

/// One exact integral with its Monte-Carlo estimate.
#[derive(Debug, Clone)]
pub struct McIntegralCheck {
    pub label: String,
    pub exact: Rat,
    pub estimate: McEstimate,
}

impl McIntegralCheck {
    /// |exact - estimate| <= 3 standard errors (plus a tiny absolute slack
    /// for exactly-zero integrands).
    pub fn consistent(&self) -> bool {
        (to_f64(&self.exact) - self.estimate.value).abs()
            <= 3.0 * self.estimate.std_error + 1e-9
    }
}

/// Monte-Carlo cross-check of the three integrals of the general formula.
pub fn mc_cross_check(
    p: &HPolytope,
    rs: &RootSystem,
    f: &PLFunction,
    samples: u64,
    seed: u64,
) -> Result<Vec<McIntegralCheck>> {
    let asm = assemble(p, rs)?;
    let mut out = Vec::new();

    let mut exact_boundary = Rat::zero();
    let mut value = 0.0;
    let mut variance = 0.0;
    for (i, facet) in asm.facets.iter().enumerate() {
        exact_boundary += integrate_pl_times_facet(&asm.hd, facet, f)?;
        let hd = asm.hd.clone();
        let est = mc_facet_sigma_estimate_fn(
            |x| f.eval_f64(x) * hd.eval_f64(x),
            facet,
            samples,
            seed.wrapping_add(i as u64),
        )?;
        value += est.value;
        variance += est.std_error * est.std_error;
    }
    out.push(McIntegralCheck {
        label: "boundary integral of f H_d".into(),
        exact: exact_boundary,
        estimate: McEstimate { value, std_error: variance.sqrt(), samples },
    });

    for (label, density) in
        [("volume integral of f H_{d-1}", &asm.hsub), ("volume integral of f H_d", &asm.hd)]
    {
        let exact = integrate_pl_times(density, &asm.pplus, f)?;
        let est = mc_estimate_fn(
            |x| f.eval_f64(x) * density.eval_f64(x),
            &asm.pplus,
            samples,
            seed.wrapping_add(97),
        );
        out.push(McIntegralCheck { label: label.into(), exact, estimate: est });
    }
    Ok(out)
}
