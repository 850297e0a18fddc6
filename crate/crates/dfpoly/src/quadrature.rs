//! Exact integration of polynomials over polytopes and their facets, and a
//! floating-point Monte-Carlo oracle.
//!
//! Volume integrals use the coordinate Lebesgue measure. Facet integrals use
//! the normalized boundary measure determined by `d(sigma) ^ d(linear form
//! of the facet) = d(volume)`, computed by projecting the facet along a
//! coordinate axis and rescaling by the matching normal entry; everything
//! stays rational.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, PolyVectorField};
use crate::polytope::{facet_drop_coordinate, triangulate, Facet, HPolytope, Simplex, VPolytope};
use crate::rat::{to_f64, Int, Rat};

fn factorial(k: usize) -> Int {
    let mut acc = Int::from(1);
    for i in 2..=k {
        acc *= Int::from(i);
    }
    acc
}

/// Exact integral of p over a simplex: affine pull-back to the standard
/// simplex and the Dirichlet formula for monomial integrals there.
pub fn integrate_simplex(p: &Polynomial, s: &Simplex) -> Result<Rat> {
    let n = s.n();
    if p.nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.nvars() });
    }
    let v0 = &s.vertices()[0];
    let images: Vec<Polynomial> = (0..n)
        .map(|m| {
            let cov: Vec<Rat> =
                (0..n).map(|i| &s.vertices()[i + 1][m] - &v0[m]).collect();
            Polynomial::affine_form(&cov, &v0[m])
        })
        .collect();
    let pulled = p.compose(&images)?;
    let jac = s.edge_determinant().abs();
    let mut acc = Rat::zero();
    for (expt, coeff) in pulled.terms() {
        let total: usize = expt.iter().map(|&e| e as usize).sum();
        let mut numer = Int::from(1);
        for &e in expt {
            numer *= factorial(e as usize);
        }
        acc += coeff * Rat::new(numer, factorial(total + n));
    }
    Ok(acc * jac)
}

/// Exact integral of p over a bounded full-dimensional polytope.
pub fn integrate_polytope(p: &Polynomial, domain: &HPolytope) -> Result<Rat> {
    if p.nvars() != domain.n() {
        return Err(Error::DimensionMismatch { expected: domain.n(), got: p.nvars() });
    }
    let mut acc = Rat::zero();
    for s in triangulate(domain)? {
        acc += integrate_simplex(p, &s)?;
    }
    Ok(acc)
}

/// Coordinate chart flattening a facet: the coordinate `drop` is eliminated
/// using the facet equation, the rest become the chart coordinates in order.
/// Integrals over the facet equal `scale` times integrals over `domain`.
#[derive(Debug, Clone)]
pub struct FacetChart {
    pub drop: usize,
    /// 1/|normal_drop|: converts the projected volume integral into the
    /// normalized boundary integral.
    pub scale: Rat,
    /// Lift map as polynomials: ambient coordinate m = images[m](chart y).
    pub images: Vec<Polynomial>,
    /// Lift map split into rows of its linear part and the constant shift,
    /// for composing piecewise-linear functions.
    pub linear: Vec<Vec<Rat>>,
    pub shift: Vec<Rat>,
    /// Projected facet, full-dimensional in n-1 chart coordinates.
    pub domain: HPolytope,
}

/// Builds the flattening chart of a facet; requires ambient dimension >= 2
/// (dimension-1 facets are points and are integrated by evaluation).
pub fn facet_chart(f: &Facet) -> Result<FacetChart> {
    let n = f.normal.len();
    debug_assert!(n >= 2, "facet charts need an ambient dimension of at least 2");
    let (drop, entry) = facet_drop_coordinate(&f.normal)?;
    let kept: Vec<usize> = (0..n).filter(|&m| m != drop).collect();
    let inv = Rat::new(Int::from(1), entry.clone());

    let mut linear = vec![vec![Rat::zero(); n - 1]; n];
    let mut shift = vec![Rat::zero(); n];
    for (col, &m) in kept.iter().enumerate() {
        linear[m][col] = Rat::from(Int::from(1));
    }
    for (col, &m) in kept.iter().enumerate() {
        linear[drop][col] = -Rat::from(f.normal[m].clone()) * &inv;
    }
    shift[drop] = &f.offset * &inv;

    let images: Vec<Polynomial> =
        (0..n).map(|m| Polynomial::affine_form(&linear[m], &shift[m])).collect();
    let projected: Vec<Vec<Rat>> = f
        .vertices
        .iter()
        .map(|v| kept.iter().map(|&m| v[m].clone()).collect())
        .collect();
    let domain = crate::polytope::hull_facets(&VPolytope::new(projected)?)?;
    Ok(FacetChart { drop, scale: inv.abs(), images, linear, shift, domain })
}

/// Exact integral of p over a facet against the normalized boundary measure.
pub fn integrate_facet_sigma(p: &Polynomial, f: &Facet) -> Result<Rat> {
    let n = f.normal.len();
    if p.nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.nvars() });
    }
    if n == 1 {
        let (_, entry) = facet_drop_coordinate(&f.normal)?;
        let point = f.vertices.first().ok_or_else(|| {
            Error::InvalidPolytope("facet of an interval must be a point".into())
        })?;
        return Ok(p.eval(point)? * Rat::new(Int::from(1), entry.abs()));
    }
    let chart = facet_chart(f)?;
    let pulled = p.compose(&chart.images)?;
    Ok(integrate_polytope(&pulled, &chart.domain)? * chart.scale)
}

/// Exact outward flux of a polynomial vector field through a facet whose
/// half-space points inward: integral of -(V . normal) d(sigma).
pub fn facet_flux(v: &PolyVectorField, f: &Facet) -> Result<Rat> {
    let n = f.normal.len();
    if v.nvars() != n || v.components().len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.components().len() });
    }
    let mut pairing = Polynomial::zero(n);
    for (comp, a) in v.components().iter().zip(&f.normal) {
        pairing = pairing.add(&comp.scale(&Rat::from(a.clone())));
    }
    integrate_facet_sigma(&pairing.neg(), f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Monte-Carlo estimate of the integral of an arbitrary integrand over a
/// polytope by rejection sampling in the bounding box. Each sample draws from
/// its own counter-indexed random stream, so the result depends only on
/// (seed, samples), never on evaluation order.
pub fn mc_estimate_fn<F>(integrand: F, domain: &HPolytope, samples: u64, seed: u64) -> McEstimate
where
    F: Fn(&[f64]) -> f64,
{
    assert!(samples >= 1, "at least one sample is required");
    let n = domain.n();
    let (lo, hi) = domain.bounding_box();
    let lo: Vec<f64> = lo.iter().map(to_f64).collect();
    let hi: Vec<f64> = hi.iter().map(to_f64).collect();
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let constraints: Vec<(Vec<f64>, f64)> = domain
        .constraints()
        .iter()
        .map(|c| {
            (
                c.normal.iter().map(|x| to_f64(&Rat::from(x.clone()))).collect(),
                to_f64(&c.offset),
            )
        })
        .collect();

    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut x = vec![0.0f64; n];
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        for j in 0..n {
            x[j] = lo[j] + rng.gen::<f64>() * (hi[j] - lo[j]);
        }
        let inside = constraints
            .iter()
            .all(|(a, c)| a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum::<f64>() >= *c);
        let y = if inside { integrand(&x) } else { 0.0 };
        sum += y;
        sum_sq += y * y;
    }
    let mean = sum / samples as f64;
    let variance = (sum_sq / samples as f64 - mean * mean).max(0.0);
    McEstimate {
        value: box_volume * mean,
        std_error: box_volume * (variance / samples as f64).sqrt(),
        samples,
    }
}

/// Monte-Carlo estimate of the integral of a polynomial over a polytope.
pub fn mc_estimate(p: &Polynomial, domain: &HPolytope, samples: u64, seed: u64) -> McEstimate {
    mc_estimate_fn(|x| p.eval_f64(x), domain, samples, seed)
}

/// Monte-Carlo estimate of a facet integral against the boundary measure;
/// the integrand receives the lifted ambient point. Point facets are
/// evaluated exactly with zero standard error.
pub fn mc_facet_sigma_estimate_fn<F>(
    integrand: F,
    f: &Facet,
    samples: u64,
    seed: u64,
) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    let n = f.normal.len();
    if n == 1 {
        let (_, entry) = facet_drop_coordinate(&f.normal)?;
        let point: Vec<f64> = f.vertices[0].iter().map(to_f64).collect();
        let scale = 1.0 / to_f64(&Rat::from(entry.abs()));
        return Ok(McEstimate { value: integrand(&point) * scale, std_error: 0.0, samples: 1 });
    }
    let chart = facet_chart(f)?;
    let linear: Vec<Vec<f64>> =
        chart.linear.iter().map(|row| row.iter().map(to_f64).collect()).collect();
    let shift: Vec<f64> = chart.shift.iter().map(to_f64).collect();
    let scale = to_f64(&chart.scale);
    let lifted = |y: &[f64]| {
        let x: Vec<f64> = (0..n)
            .map(|m| linear[m].iter().zip(y).map(|(a, b)| a * b).sum::<f64>() + shift[m])
            .collect();
        integrand(&x) * scale
    };
    Ok(mc_estimate_fn(lifted, &chart.domain, samples, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{divergence, h_top};
    use crate::polytope::{classify_facets, positive_part, Constraint, FacetKind};
    use crate::rat::{rat, rat_int, rat_vec};
    use crate::root_system::RootSystem;

    fn cons(normal: &[i64], offset: i64) -> Constraint {
        Constraint::new(normal.iter().map(|&x| Int::from(x)).collect(), rat_int(offset))
    }

    fn standard_triangle() -> Simplex {
        Simplex::new(vec![rat_vec(&[0, 0]), rat_vec(&[1, 0]), rat_vec(&[0, 1])]).unwrap()
    }

    fn a1_positive_interval() -> (RootSystem, HPolytope) {
        let rs = RootSystem::preset("A1").unwrap();
        let p = HPolytope::new(vec![cons(&[1], -2), cons(&[-1], -2)]).unwrap();
        let pplus = positive_part(&p, &rs).unwrap();
        (rs, pplus)
    }

    fn a2_positive_quad() -> (RootSystem, HPolytope) {
        let rs = RootSystem::preset("A2").unwrap();
        let p = HPolytope::new(vec![
            cons(&[-1, 0], -3),
            cons(&[1, -1], -3),
            cons(&[0, 1], -3),
            cons(&[0, -1], -3),
            cons(&[-1, 1], -3),
            cons(&[1, 0], -3),
        ])
        .unwrap();
        let pplus = positive_part(&p, &rs).unwrap();
        (rs, pplus)
    }

    #[test]
    fn simplex_monomials_match_iterated_integration() {
        let tri = standard_triangle();
        assert_eq!(integrate_simplex(&Polynomial::one(2), &tri).unwrap(), rat(1, 2));
        for a in 0..=3u32 {
            for b in 0..=3u32 {
                let mut p = Polynomial::one(2);
                p = p.mul(&Polynomial::variable(2, 0).pow(a));
                p = p.mul(&Polynomial::variable(2, 1).pow(b));
                let got = integrate_simplex(&p, &tri).unwrap();
                // Iterated route: integral of x^a (1-x)^{b+1} / (b+1) over
                // [0,1], expanded with the binomial theorem.
                let mut oracle = Rat::zero();
                for k in 0..=(b + 1) {
                    let sign = if k % 2 == 0 { 1 } else { -1 };
                    let binom =
                        num_integer::binomial(Int::from(b + 1), Int::from(k));
                    oracle += Rat::from(Int::from(sign) * binom)
                        / Rat::from(Int::from(a + k + 1));
                }
                oracle /= Rat::from(Int::from(b + 1));
                assert_eq!(got, oracle, "monomial x^{a} y^{b}");
            }
        }
    }

    #[test]
    fn one_dimensional_simplex_integral() {
        let seg = Simplex::new(vec![rat_vec(&[0]), rat_vec(&[2])]).unwrap();
        let p = h_top(&RootSystem::preset("A1").unwrap());
        assert_eq!(integrate_simplex(&p, &seg).unwrap(), rat(32, 3));
    }

    #[test]
    fn polytope_integrals_match_closed_forms() {
        let unit_square = HPolytope::new(vec![
            cons(&[1, 0], 0),
            cons(&[-1, 0], -1),
            cons(&[0, 1], 0),
            cons(&[0, -1], -1),
        ])
        .unwrap();
        assert_eq!(integrate_polytope(&Polynomial::one(2), &unit_square).unwrap(), rat_int(1));

        let (rs, pplus) = a1_positive_interval();
        assert_eq!(integrate_polytope(&h_top(&rs), &pplus).unwrap(), rat(32, 3));

        let sym_square = HPolytope::new(vec![
            cons(&[1, 0], -1),
            cons(&[-1, 0], -1),
            cons(&[0, 1], -1),
            cons(&[0, -1], -1),
        ])
        .unwrap();
        assert!(integrate_polytope(&Polynomial::variable(2, 0), &sym_square)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn facet_sigma_examples() {
        let (rs, pplus) = a1_positive_interval();
        let facets = classify_facets(&pplus, &rs).unwrap();
        let outer = facets.iter().find(|f| f.kind == FacetKind::Outer).unwrap();
        assert_eq!(integrate_facet_sigma(&h_top(&rs), outer).unwrap(), rat_int(16));

        let square = HPolytope::new(vec![
            cons(&[1, 0], -1),
            cons(&[-1, 0], -1),
            cons(&[0, 1], -1),
            cons(&[0, -1], -1),
        ])
        .unwrap();
        let torus = RootSystem::preset("torus-2").unwrap();
        let facets = classify_facets(&square, &torus).unwrap();
        let right = facets
            .iter()
            .find(|f| f.normal == vec![Int::from(-1), Int::from(0)])
            .unwrap();
        assert_eq!(integrate_facet_sigma(&Polynomial::one(2), right).unwrap(), rat_int(2));

        let diag = Facet {
            normal: vec![Int::from(-1), Int::from(-1)],
            offset: rat_int(-1),
            vertices: vec![rat_vec(&[0, 1]), rat_vec(&[1, 0])],
            kind: FacetKind::Outer,
        };
        assert_eq!(integrate_facet_sigma(&Polynomial::one(2), &diag).unwrap(), rat_int(1));
    }

    #[test]
    fn wall_facets_kill_the_top_density() {
        let (rs, pplus) = a2_positive_quad();
        let hd = h_top(&rs);
        let weighted = hd.mul(&Polynomial::affine_form(&rat_vec(&[5, -7]), &rat(3, 2)));
        for f in classify_facets(&pplus, &rs).unwrap() {
            if f.kind == FacetKind::Wall {
                assert!(integrate_facet_sigma(&hd, &f).unwrap().is_zero());
                assert!(integrate_facet_sigma(&weighted, &f).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn divergence_theorem_balances_on_presets() {
        for (rs, pplus) in [a1_positive_interval(), a2_positive_quad()] {
            let n = rs.n();
            let hd = h_top(&rs);
            let mut test_fs = vec![Polynomial::one(n)];
            for j in 0..n {
                test_fs.push(Polynomial::variable(n, j));
            }
            let facets = classify_facets(&pplus, &rs).unwrap();
            for f in &test_fs {
                let field = PolyVectorField::new(
                    (0..n)
                        .map(|j| {
                            Polynomial::variable(n, j)
                                .sub(&Polynomial::constant(n, rs.two_rho()[j].clone()))
                        })
                        .collect(),
                )
                .scale_poly(&f.mul(&hd));
                let volume_side = integrate_polytope(&divergence(&field), &pplus).unwrap();
                let mut boundary_side = Rat::zero();
                for facet in &facets {
                    boundary_side += facet_flux(&field, facet).unwrap();
                }
                assert_eq!(volume_side, boundary_side);
            }
        }
    }

    #[test]
    fn dilation_homogeneity_of_the_top_density() {
        for (rs, pplus) in [a1_positive_interval(), a2_positive_quad()] {
            let hd = h_top(&rs);
            let base = integrate_polytope(&hd, &pplus).unwrap();
            let exponent = (2 * rs.r() + rs.n()) as u32;
            for k in [2i64, 3] {
                let scaled = pplus.dilate(&rat_int(k)).unwrap();
                let expect = base.clone()
                    * Rat::from(Int::from(k).pow(exponent));
                assert_eq!(integrate_polytope(&hd, &scaled).unwrap(), expect);
            }
        }
    }

    #[test]
    fn mc_estimates_track_exact_values() {
        let unit_square = HPolytope::new(vec![
            cons(&[1, 0], 0),
            cons(&[-1, 0], -1),
            cons(&[0, 1], 0),
            cons(&[0, -1], -1),
        ])
        .unwrap();
        let est = mc_estimate(&Polynomial::one(2), &unit_square, 100_000, 7);
        assert!((est.value - 1.0).abs() < 0.01);

        let (rs, pplus) = a1_positive_interval();
        let est = mc_estimate(&h_top(&rs), &pplus, 200_000, 11);
        let exact = 32.0 / 3.0;
        assert!((est.value - exact).abs() < 0.01 * exact);
        assert!((est.value - exact).abs() <= 3.0 * est.std_error + 1e-9);

        let (rs2, quad) = a2_positive_quad();
        let exact2 = to_f64(&integrate_polytope(&h_top(&rs2), &quad).unwrap());
        let est2 = mc_estimate(&h_top(&rs2), &quad, 1_000_000, 13);
        assert!((est2.value - exact2).abs() < 0.01 * exact2.abs());
        assert!((est2.value - exact2).abs() <= 3.0 * est2.std_error);
    }

    #[test]
    fn mc_is_deterministic_for_a_seed() {
        let (_, pplus) = a1_positive_interval();
        let p = Polynomial::variable(1, 0);
        let a = mc_estimate(&p, &pplus, 50_000, 99);
        let b = mc_estimate(&p, &pplus, 50_000, 99);
        assert_eq!(a, b);
        let c = mc_estimate(&p, &pplus, 50_000, 100);
        assert!(a.value != c.value);
    }

    #[test]
    fn mc_facet_point_evaluation_is_exact() {
        let (rs, pplus) = a1_positive_interval();
        let facets = classify_facets(&pplus, &rs).unwrap();
        let outer = facets.iter().find(|f| f.kind == FacetKind::Outer).unwrap();
        let hd = h_top(&rs);
        let est = mc_facet_sigma_estimate_fn(|x| hd.eval_f64(x), outer, 10, 1).unwrap();
        assert_eq!(est.value, 16.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn mc_facet_matches_exact_edge_integral() {
        let square = HPolytope::new(vec![
            cons(&[1, 0], -1),
            cons(&[-1, 0], -1),
            cons(&[0, 1], -1),
            cons(&[0, -1], -1),
        ])
        .unwrap();
        let torus = RootSystem::preset("torus-2").unwrap();
        let facets = classify_facets(&square, &torus).unwrap();
        let top = facets
            .iter()
            .find(|f| f.normal == vec![Int::from(0), Int::from(-1)])
            .unwrap();
        // integral of x^2 along the edge y = 1 is 2/3.
        let p = Polynomial::variable(2, 0).pow(2);
        let exact = to_f64(&integrate_facet_sigma(&p, top).unwrap());
        let est = mc_facet_sigma_estimate_fn(|x| x[0] * x[0], top, 200_000, 21).unwrap();
        assert!((est.value - exact).abs() <= 3.0 * est.std_error + 1e-9);
        assert!((est.value - exact).abs() < 0.01 * exact.abs());
    }
}
