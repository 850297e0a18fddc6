//! Report rendering.
//!
//! Every subcommand produces a typed report that renders either as plain
//! text (one `name = value` line per fact, exact rationals followed by a
//! 12-significant-digit decimal in parentheses) or as JSON.  Rendering is
//! deterministic: fixed line order in text mode, fixed key order in JSON
//! mode, so repeated runs on the same input are byte-identical.

use crate::instance::{InstanceFile, IntSpec, RatSpec};
use dfpoly::futaki::McIntegralCheck;
use dfpoly::polytope::FanoReport;
use dfpoly::rat::{decimal_string, format_rat, Int, Rat};
use dfpoly::{CrossCheck, DFReport, FacetKind, IdentityReport};
use serde::Serialize;

const DECIMAL_DIGITS: usize = 12;

fn rat_line(name: &str, x: &Rat) -> String {
    format!("{name} = {} ({})", format_rat(x), decimal_string(x, DECIMAL_DIGITS))
}

fn rat_vec_lines(name: &str, v: &[Rat]) -> Vec<String> {
    v.iter().enumerate().map(|(j, x)| rat_line(&format!("{name}[{j}]"), x)).collect()
}

fn int_vec_text(v: &[Int]) -> String {
    let inner: Vec<String> = v.iter().map(|a| a.to_string()).collect();
    format!("[{}]", inner.join(", "))
}

fn rat_specs(v: &[Rat]) -> Vec<RatSpec> {
    v.iter().map(|x| RatSpec(x.clone())).collect()
}

/// A report that can be rendered as text lines; JSON comes from `Serialize`.
pub trait Render: Serialize {
    fn text_lines(&self) -> Vec<String>;
}

#[derive(Serialize)]
struct WithWarnings<'a, T: Serialize> {
    #[serde(flatten)]
    report: &'a T,
    warnings: &'a [String],
}

/// Renders a report as `(stdout, stderr)`.  In text mode warnings go to
/// stderr; in JSON mode they are part of the report object.
pub fn render(report: &impl Render, warnings: &[String], json: bool) -> (String, String) {
    if json {
        let wrapped = WithWarnings { report, warnings };
        let body = serde_json::to_string_pretty(&wrapped)
            .expect("report serialization cannot fail");
        (body + "\n", String::new())
    } else {
        let body = report.text_lines().join("\n") + "\n";
        let err: String = warnings.iter().map(|w| format!("warning: {w}\n")).collect();
        (body, err)
    }
}

#[derive(Serialize)]
pub struct ValidateReport {
    pub status: String,
    pub root_system: String,
    pub n: usize,
    pub r: usize,
    pub constraints: usize,
    pub vertices: usize,
    pub function_pieces: Option<usize>,
    /// Canonical form of the instance; re-reading it reproduces the same
    /// rational data bit-for-bit.
    pub instance: InstanceFile,
}

impl Render for ValidateReport {
    fn text_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("status = {}", self.status),
            format!("root_system = {}", self.root_system),
            format!("n = {}", self.n),
            format!("r = {}", self.r),
            format!("constraints = {}", self.constraints),
            format!("vertices = {}", self.vertices),
        ];
        match self.function_pieces {
            Some(k) => lines.push(format!("function_pieces = {k}")),
            None => lines.push("function_pieces = none".to_string()),
        }
        lines
    }
}

#[derive(Serialize)]
pub struct FanoFacetJson {
    pub normal: Vec<IntSpec>,
    pub offset: RatSpec,
    pub kind: String,
    pub required_offset: Option<RatSpec>,
    pub ok: bool,
}

#[derive(Serialize)]
pub struct FanoJson {
    pub fano: bool,
    pub facets: Vec<FanoFacetJson>,
}

impl FanoJson {
    pub fn from_report(report: &FanoReport) -> Self {
        FanoJson {
            fano: report.fano,
            facets: report
                .facets
                .iter()
                .map(|f| FanoFacetJson {
                    normal: f.normal.iter().map(|a| IntSpec(a.clone())).collect(),
                    offset: RatSpec(f.offset.clone()),
                    kind: kind_name(f.kind).to_string(),
                    required_offset: f.required_offset.clone().map(RatSpec),
                    ok: f.ok,
                })
                .collect(),
        }
    }
}

fn kind_name(kind: FacetKind) -> &'static str {
    match kind {
        FacetKind::Outer => "outer",
        FacetKind::Wall => "wall",
    }
}

impl Render for FanoJson {
    fn text_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("fano = {}", self.fano)];
        for (i, f) in self.facets.iter().enumerate() {
            let normal: Vec<Int> = f.normal.iter().map(|a| a.0.clone()).collect();
            let mut line = format!(
                "facet[{i}]: normal = {}, offset = {}, kind = {}",
                int_vec_text(&normal),
                format_rat(&f.offset.0),
                f.kind
            );
            if let Some(req) = &f.required_offset {
                line.push_str(&format!(
                    ", required_offset = {}, ok = {}",
                    format_rat(&req.0),
                    f.ok
                ));
            }
            lines.push(line);
        }
        lines
    }
}

#[derive(Serialize)]
pub struct IdentitiesJson {
    pub grad_matches_directional: bool,
    pub grad_rho_is_h_sub: bool,
    pub euler_scaling: bool,
    pub divergence_balance: bool,
    pub all_pass: bool,
}

impl IdentitiesJson {
    pub fn from_report(report: &IdentityReport) -> Self {
        IdentitiesJson {
            grad_matches_directional: report.grad_matches_directional,
            grad_rho_is_h_sub: report.grad_rho_is_h_sub,
            euler_scaling: report.euler_scaling,
            divergence_balance: report.divergence_balance,
            all_pass: report.all_pass(),
        }
    }
}

impl Render for IdentitiesJson {
    fn text_lines(&self) -> Vec<String> {
        vec![
            format!("grad_matches_directional = {}", self.grad_matches_directional),
            format!("grad_rho_is_h_sub = {}", self.grad_rho_is_h_sub),
            format!("euler_scaling = {}", self.euler_scaling),
            format!("divergence_balance = {}", self.divergence_balance),
            format!("all_pass = {}", self.all_pass),
        ]
    }
}

#[derive(Serialize)]
pub struct VolumeJson {
    pub vol_dh: RatSpec,
}

impl Render for VolumeJson {
    fn text_lines(&self) -> Vec<String> {
        vec![rat_line("vol_dh", &self.vol_dh.0)]
    }
}

#[derive(Serialize)]
pub struct BarycenterJson {
    pub bar_dh: Vec<RatSpec>,
}

impl Render for BarycenterJson {
    fn text_lines(&self) -> Vec<String> {
        let bar: Vec<Rat> = self.bar_dh.iter().map(|x| x.0.clone()).collect();
        rat_vec_lines("bar_dh", &bar)
    }
}

#[derive(Serialize)]
pub struct McJson {
    pub label: String,
    pub exact: RatSpec,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub consistent: bool,
}

impl McJson {
    pub fn from_check(check: &McIntegralCheck) -> Self {
        McJson {
            label: check.label.clone(),
            exact: RatSpec(check.exact.clone()),
            estimate: check.estimate.value,
            std_error: check.estimate.std_error,
            samples: check.estimate.samples,
            consistent: check.consistent(),
        }
    }
}

#[derive(Serialize)]
pub struct DfJson {
    pub fano: bool,
    pub r: usize,
    pub n: usize,
    pub d: usize,
    pub a: RatSpec,
    pub vol_dh: RatSpec,
    pub bar_dh: Vec<RatSpec>,
    pub two_rho: Vec<RatSpec>,
    pub df_general: RatSpec,
    pub df_affine: Option<RatSpec>,
    pub cross_check: String,
    pub identities_ok: bool,
    pub f_weyl_invariant: bool,
    pub invariance_override_used: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_check: Option<Vec<McJson>>,
}

impl DfJson {
    pub fn from_report(report: &DFReport, mc: Option<&[McIntegralCheck]>) -> Self {
        DfJson {
            fano: report.fano,
            r: report.r,
            n: report.n,
            d: report.d,
            a: RatSpec(report.a.clone()),
            vol_dh: RatSpec(report.vol_dh.clone()),
            bar_dh: rat_specs(&report.bar_dh),
            two_rho: rat_specs(&report.two_rho),
            df_general: RatSpec(report.df_general.clone()),
            df_affine: report.df_affine.clone().map(RatSpec),
            cross_check: match report.cross_check {
                CrossCheck::Equal => "equal".to_string(),
                CrossCheck::NotApplicable => "not-applicable".to_string(),
            },
            identities_ok: report.identities_ok,
            f_weyl_invariant: report.f_weyl_invariant,
            invariance_override_used: report.invariance_override_used,
            mc_check: mc.map(|checks| checks.iter().map(McJson::from_check).collect()),
        }
    }
}

impl Render for DfJson {
    fn text_lines(&self) -> Vec<String> {
        let bar: Vec<Rat> = self.bar_dh.iter().map(|x| x.0.clone()).collect();
        let two_rho: Vec<Rat> = self.two_rho.iter().map(|x| x.0.clone()).collect();
        let mut lines = vec![
            format!("fano = {}", self.fano),
            format!("r = {}", self.r),
            format!("n = {}", self.n),
            format!("d = {}", self.d),
            rat_line("a", &self.a.0),
            rat_line("vol_dh", &self.vol_dh.0),
        ];
        lines.extend(rat_vec_lines("bar_dh", &bar));
        lines.extend(rat_vec_lines("two_rho", &two_rho));
        lines.push(rat_line("df_general", &self.df_general.0));
        match &self.df_affine {
            Some(x) => lines.push(rat_line("df_affine", &x.0)),
            None => lines.push("df_affine = not-applicable".to_string()),
        }
        lines.push(format!("cross_check = {}", self.cross_check));
        lines.push(format!("identities_ok = {}", self.identities_ok));
        lines.push(format!("f_weyl_invariant = {}", self.f_weyl_invariant));
        lines.push(format!("invariance_override_used = {}", self.invariance_override_used));
        if let Some(checks) = &self.mc_check {
            for c in checks {
                lines.push(format!(
                    "mc[{}]: exact = {} ({}), estimate = {:.9e}, std_error = {:.9e}, \
                     samples = {}, consistent = {}",
                    c.label,
                    format_rat(&c.exact.0),
                    decimal_string(&c.exact.0, DECIMAL_DIGITS),
                    c.estimate,
                    c.std_error,
                    c.samples,
                    c.consistent
                ));
            }
        }
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dfpoly::rat::rat;

    #[test]
    fn rat_line_shows_exact_and_decimal() {
        let line = rat_line("x", &rat(1, 4));
        assert!(line.starts_with("x = 1/4 ("));
        assert!(line.contains("0.25"));
    }

    #[test]
    fn render_splits_warnings_in_text_mode() {
        let report = VolumeJson { vol_dh: RatSpec(rat(32, 3)) };
        let (out, err) = render(&report, &["something".to_string()], false);
        assert!(out.contains("vol_dh = 32/3"));
        assert_eq!(err, "warning: something\n");
    }

    #[test]
    fn render_embeds_warnings_in_json_mode() {
        let report = VolumeJson { vol_dh: RatSpec(rat(32, 3)) };
        let (out, err) = render(&report, &["something".to_string()], true);
        assert!(err.is_empty());
        let value: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(value["vol_dh"], serde_json::json!("32/3"));
        assert_eq!(value["warnings"][0], serde_json::json!("something"));
    }

    #[test]
    fn json_rendering_is_deterministic() {
        let report = BarycenterJson { bar_dh: vec![RatSpec(rat(3, 2)), RatSpec(rat(0, 1))] };
        let (a, _) = render(&report, &[], true);
        let (b, _) = render(&report, &[], true);
        assert_eq!(a, b);
        assert!(a.contains("\"3/2\""));
    }
}
