//! Instance file schema and loading.
//!
//! An instance is a UTF-8 JSON document describing a root system, a polytope,
//! and optionally a piecewise-linear function and run options.  Rational
//! numbers are written either as JSON integers or as strings `"p/q"` with a
//! positive denominator; floating-point literals are rejected so that every
//! value round-trips exactly.

use dfpoly::polytope::{hull_facets, positive_part};
use dfpoly::rat::{format_rat, is_integral, parse_rat, Int, Rat};
use dfpoly::{AffinePiece, Constraint, HPolytope, PLFunction, RootSystem, VPolytope};
use num_traits::{One, ToPrimitive};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Exact rational in an instance file: JSON integer or `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatSpec(pub Rat);

impl Serialize for RatSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.denom().is_one() {
            if let Some(v) = self.0.numer().to_i64() {
                return s.serialize_i64(v);
            }
        }
        s.serialize_str(&format_rat(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RatSpec;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an integer or a rational string \"p/q\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<RatSpec, E> {
                Ok(RatSpec(Rat::from(Int::from(v))))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<RatSpec, E> {
                Ok(RatSpec(Rat::from(Int::from(v))))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<RatSpec, E> {
                Err(E::custom(format!(
                    "floating-point literal {v} is not exact; write an integer or \"p/q\""
                )))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<RatSpec, E> {
                parse_rat(s).map(RatSpec).map_err(|e| E::custom(e.to_string()))
            }
        }
        d.deserialize_any(V)
    }
}

/// Exact integer in an instance file: JSON integer or decimal string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSpec(pub Int);

impl Serialize for IntSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if let Some(v) = self.0.to_i64() {
            s.serialize_i64(v)
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for IntSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = IntSpec;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an integer or an integer string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<IntSpec, E> {
                Ok(IntSpec(Int::from(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<IntSpec, E> {
                Ok(IntSpec(Int::from(v)))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<IntSpec, E> {
                Err(E::custom(format!("{v} is not an exact integer")))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<IntSpec, E> {
                s.trim()
                    .parse::<Int>()
                    .map(IntSpec)
                    .map_err(|_| E::custom(format!("cannot parse {s:?} as an integer")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub root_system: RootSystemSpec,
    pub polytope: PolytopeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsSpec>,
}

/// Either a preset name (`"A1"`, `"torus-2"`, ...) or an explicit Gram
/// matrix with positive roots.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RootSystemSpec {
    Preset(String),
    Explicit { gram: Vec<Vec<RatSpec>>, positive_roots: Vec<Vec<IntSpec>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_rep: Option<HRepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_rep: Option<VRepSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HRepSpec {
    pub normals: Vec<Vec<IntSpec>>,
    pub offsets: Vec<RatSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VRepSpec {
    pub vertices: Vec<Vec<RatSpec>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub pieces: Vec<PieceSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub b: Vec<RatSpec>,
    pub k: RatSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    #[serde(default = "default_mc_samples")]
    pub mc_samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub allow_non_invariant_f: bool,
}

impl Default for OptionsSpec {
    fn default() -> Self {
        OptionsSpec { mc_samples: default_mc_samples(), seed: 0, allow_non_invariant_f: false }
    }
}

fn default_mc_samples() -> u64 {
    1_000_000
}

/// Run failure, classified for the process exit code: input problems
/// (parse or validation) exit 1, failures of the computation itself exit 2.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Validation { field: String, message: String },
    Computation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation { .. } => 1,
            CliError::Computation(_) => 2,
        }
    }

    pub fn validation(field: &str, message: impl Into<String>) -> Self {
        CliError::Validation { field: field.to_string(), message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Validation { field, message } => {
                write!(f, "validation error in field `{field}`: {message}")
            }
            CliError::Computation(m) => write!(f, "computation error: {m}"),
        }
    }
}

/// Maps a library error to the exit-code classification.  Errors that mean
/// the instance file itself violates a documented invariant become
/// validation errors attributed to `field`; errors arising while evaluating
/// a well-formed instance become computation errors.
pub fn classify(e: dfpoly::Error, field: &str) -> CliError {
    use dfpoly::Error as E;
    match &e {
        E::NotWeylInvariantFunction => CliError::validation("function", e.to_string()),
        E::NotWeylInvariantPolytope => CliError::validation("polytope", e.to_string()),
        E::DimensionMismatch { .. }
        | E::GramNotPositiveDefinite
        | E::NotClosedUnderReflection { .. }
        | E::RootOnWall { .. }
        | E::InvalidRootSystem(_)
        | E::UnknownPreset(_)
        | E::Infeasible
        | E::Unbounded
        | E::NotFullDimensional
        | E::ZeroNormal
        | E::InvalidPolytope(_)
        | E::Parse(_) => CliError::validation(field, e.to_string()),
        E::Validation { field, message } => {
            CliError::Validation { field: field.clone(), message: message.clone() }
        }
        E::NotARoot
        | E::GroupCapExceeded { .. }
        | E::EmptyPositivePart
        | E::LowerDimensionalPositivePart
        | E::DegenerateFacet(_)
        | E::DegenerateSimplex
        | E::LimitExceeded(_)
        | E::NotFano
        | E::NotAffineOnPositivePart
        | E::CrossCheckFailed { .. } => CliError::Computation(e.to_string()),
    }
}

/// Fully validated instance, ready for computation.
#[derive(Debug)]
pub struct LoadedInstance {
    pub rs: RootSystem,
    pub root_label: String,
    pub polytope: HPolytope,
    pub f: Option<PLFunction>,
    pub options: OptionsSpec,
    pub warnings: Vec<String>,
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn load(file: &InstanceFile) -> Result<LoadedInstance, CliError> {
    let mut warnings = Vec::new();

    let (rs, root_label) = match &file.root_system {
        RootSystemSpec::Preset(name) => {
            let rs = RootSystem::preset(name).map_err(|e| classify(e, "root_system"))?;
            (rs, format!("preset {name}"))
        }
        RootSystemSpec::Explicit { gram, positive_roots } => {
            let gram: Vec<Vec<Rat>> =
                gram.iter().map(|row| row.iter().map(|x| x.0.clone()).collect()).collect();
            let roots: Vec<Vec<Int>> = positive_roots
                .iter()
                .map(|row| row.iter().map(|x| x.0.clone()).collect())
                .collect();
            let rs = RootSystem::new(gram, roots).map_err(|e| classify(e, "root_system"))?;
            (rs, "explicit".to_string())
        }
    };

    let polytope = load_polytope(&file.polytope, &rs, &mut warnings)?;

    let f = match &file.function {
        None => None,
        Some(spec) => Some(load_function(spec, &rs, &mut warnings)?),
    };

    let options = file.options.clone().unwrap_or_default();

    Ok(LoadedInstance { rs, root_label, polytope, f, options, warnings })
}

fn load_polytope(
    spec: &PolytopeSpec,
    rs: &RootSystem,
    warnings: &mut Vec<String>,
) -> Result<HPolytope, CliError> {
    let p = match (&spec.h_rep, &spec.v_rep) {
        (Some(_), Some(_)) => {
            return Err(CliError::validation(
                "polytope",
                "give exactly one of `h_rep` and `v_rep`, not both",
            ))
        }
        (None, None) => {
            return Err(CliError::validation(
                "polytope",
                "give exactly one of `h_rep` and `v_rep`",
            ))
        }
        (Some(h), None) => {
            if h.normals.len() != h.offsets.len() {
                return Err(CliError::validation(
                    "polytope.h_rep.offsets",
                    format!(
                        "{} offsets for {} normals; the lists must have equal length",
                        h.offsets.len(),
                        h.normals.len()
                    ),
                ));
            }
            if h.normals.is_empty() {
                return Err(CliError::validation(
                    "polytope.h_rep.normals",
                    "at least one constraint is required",
                ));
            }
            let mut constraints = Vec::new();
            let mut normalized = false;
            for (i, (normal, offset)) in h.normals.iter().zip(&h.offsets).enumerate() {
                let normal: Vec<Int> = normal.iter().map(|x| x.0.clone()).collect();
                if normal.iter().all(|a| a == &Int::from(0)) {
                    return Err(CliError::validation(
                        "polytope.h_rep.normals",
                        format!("constraint {i} has a zero normal vector"),
                    ));
                }
                let c = Constraint::new(normal.clone(), offset.0.clone());
                let canon = c
                    .canonicalized()
                    .map_err(|e| classify(e, "polytope.h_rep.normals"))?;
                if canon.normal != normal {
                    normalized = true;
                }
                constraints.push(canon);
            }
            if normalized {
                warnings.push(
                    "polytope.h_rep.normals: non-primitive normals were rescaled to \
                     primitive integer vectors (offsets rescaled to match)"
                        .to_string(),
                );
            }
            let before = constraints.len();
            let p = HPolytope::new(constraints).map_err(|e| classify(e, "polytope.h_rep"))?;
            if p.constraints().len() < before {
                warnings.push(format!(
                    "polytope.h_rep: {} duplicate constraint(s) merged",
                    before - p.constraints().len()
                ));
            }
            p
        }
        (None, Some(v)) => {
            let vertices: Vec<Vec<Rat>> =
                v.vertices.iter().map(|row| row.iter().map(|x| x.0.clone()).collect()).collect();
            let vp =
                VPolytope::new(vertices).map_err(|e| classify(e, "polytope.v_rep.vertices"))?;
            let input_points = vp.vertices().len();
            let p = hull_facets(&vp).map_err(|e| classify(e, "polytope.v_rep.vertices"))?;
            if p.vertices().len() < input_points {
                warnings.push(format!(
                    "polytope.v_rep.vertices: {} input point(s) are not vertices of the \
                     convex hull and were dropped",
                    input_points - p.vertices().len()
                ));
            }
            p
        }
    };

    if p.n() != rs.n() {
        return Err(CliError::validation(
            "polytope",
            format!("polytope dimension {} does not match root-system dimension {}", p.n(), rs.n()),
        ));
    }
    if p.vertices().iter().any(|v| !is_integral(v)) {
        warnings.push(
            "polytope: not all vertices are lattice points; lattice-polytope \
             interpretations do not apply"
                .to_string(),
        );
    }
    Ok(p)
}

fn load_function(
    spec: &FunctionSpec,
    rs: &RootSystem,
    warnings: &mut Vec<String>,
) -> Result<PLFunction, CliError> {
    if spec.pieces.is_empty() {
        return Err(CliError::validation("function.pieces", "at least one piece is required"));
    }
    let mut pieces = Vec::new();
    for (i, piece) in spec.pieces.iter().enumerate() {
        if piece.b.len() != rs.n() {
            return Err(CliError::validation(
                "function.pieces",
                format!(
                    "piece {i} has {} coefficients; expected the ambient dimension {}",
                    piece.b.len(),
                    rs.n()
                ),
            ));
        }
        let b: Vec<Rat> = piece.b.iter().map(|x| x.0.clone()).collect();
        pieces.push(AffinePiece::new(b, piece.k.0.clone()));
    }
    let f = PLFunction::new(pieces).map_err(|e| classify(e, "function.pieces"))?;
    if f.deduped_pieces().len() < f.pieces().len() {
        warnings.push("function.pieces: duplicate pieces present (harmless)".to_string());
    }
    Ok(f)
}

/// Canonical form of a validated instance: the polytope is re-emitted as the
/// canonicalized half-space representation, function pieces are deduplicated
/// and sorted, and option defaults are made explicit.  Loading the result
/// reproduces exactly the same rational data.
pub fn normalized(file: &InstanceFile, loaded: &LoadedInstance) -> InstanceFile {
    let h_rep = HRepSpec {
        normals: loaded
            .polytope
            .constraints()
            .iter()
            .map(|c| c.normal.iter().map(|a| IntSpec(a.clone())).collect())
            .collect(),
        offsets: loaded
            .polytope
            .constraints()
            .iter()
            .map(|c| RatSpec(c.offset.clone()))
            .collect(),
    };
    let function = loaded.f.as_ref().map(|f| FunctionSpec {
        pieces: f
            .deduped_pieces()
            .iter()
            .map(|p| PieceSpec {
                b: p.b.iter().map(|x| RatSpec(x.clone())).collect(),
                k: RatSpec(p.k.clone()),
            })
            .collect(),
    });
    InstanceFile {
        root_system: file.root_system.clone(),
        polytope: PolytopeSpec { h_rep: Some(h_rep), v_rep: None },
        function,
        options: Some(loaded.options.clone()),
    }
}

/// Positive part of the instance polytope (the polytope itself when the
/// root system is a torus), with library errors classified.
pub fn instance_positive_part(loaded: &LoadedInstance) -> Result<HPolytope, CliError> {
    positive_part(&loaded.polytope, &loaded.rs).map_err(|e| classify(e, "polytope"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use dfpoly::rat::rat;

    #[test]
    fn rational_round_trip_covers_integers_and_fractions() {
        for (json, expect) in [("5", rat(5, 1)), ("\"-7/3\"", rat(-7, 3)), ("\"4/2\"", rat(2, 1))] {
            let parsed: RatSpec = serde_json::from_str(json).unwrap();
            assert_eq!(parsed.0, expect);
        }
        let back = serde_json::to_string(&RatSpec(rat(-7, 3))).unwrap();
        assert_eq!(back, "\"-7/3\"");
        let back = serde_json::to_string(&RatSpec(rat(5, 1))).unwrap();
        assert_eq!(back, "5");
    }

    #[test]
    fn floats_are_rejected() {
        let err = serde_json::from_str::<RatSpec>("0.5").unwrap_err();
        assert!(err.to_string().contains("not exact"));
        assert!(serde_json::from_str::<IntSpec>("2.0").is_err());
    }

    #[test]
    fn zero_denominator_is_rejected() {
        assert!(serde_json::from_str::<RatSpec>("\"1/0\"").is_err());
    }

    #[test]
    fn minimal_instance_loads() {
        let text = r#"{
            "root_system": "A1",
            "polytope": { "h_rep": { "normals": [[1], [-1]], "offsets": [-2, -2] } },
            "function": { "pieces": [ { "b": [1], "k": 0 }, { "b": [-1], "k": 0 } ] }
        }"#;
        let file = parse_instance(text).unwrap();
        let loaded = load(&file).unwrap();
        assert_eq!(loaded.rs.r(), 1);
        assert_eq!(loaded.polytope.vertices().len(), 2);
        assert!(loaded.f.is_some());
        assert!(loaded.warnings.is_empty());
        assert_eq!(loaded.options.mc_samples, 1_000_000);
    }

    #[test]
    fn non_primitive_normal_warns_and_normalizes() {
        let text = r#"{
            "root_system": "torus-2",
            "polytope": { "h_rep": {
                "normals": [[2, 2], [-1, 0], [0, -1], [1, 0], [0, 1]],
                "offsets": [-2, -1, -1, -1, -1] } }
        }"#;
        let loaded = load(&parse_instance(text).unwrap()).unwrap();
        assert!(loaded.warnings.iter().any(|w| w.contains("primitive")));
        assert!(loaded
            .polytope
            .constraints()
            .iter()
            .any(|c| c.normal == vec![Int::from(1), Int::from(1)] && c.offset == rat(-1, 1)));
    }

    #[test]
    fn dimension_mismatch_names_polytope_field() {
        let text = r#"{
            "root_system": "A1",
            "polytope": { "h_rep": { "normals": [[1, 0], [-1, 0], [0, 1], [0, -1]],
                                      "offsets": [-1, -1, -1, -1] } }
        }"#;
        let err = load(&parse_instance(text).unwrap()).unwrap_err();
        match err {
            CliError::Validation { field, .. } => assert_eq!(field, "polytope"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn both_representations_rejected() {
        let text = r#"{
            "root_system": "torus-1",
            "polytope": {
                "h_rep": { "normals": [[1], [-1]], "offsets": [-1, -1] },
                "v_rep": { "vertices": [[-1], [1]] }
            }
        }"#;
        let err = load(&parse_instance(text).unwrap()).unwrap_err();
        assert!(matches!(err, CliError::Validation { .. }));
    }

    #[test]
    fn v_rep_loads_and_drops_interior_points() {
        let text = r#"{
            "root_system": "torus-2",
            "polytope": { "v_rep": { "vertices": [[0, 0], [2, 0], [0, 2], [2, 2], [1, 1]] } }
        }"#;
        let loaded = load(&parse_instance(text).unwrap()).unwrap();
        assert_eq!(loaded.polytope.vertices().len(), 4);
        assert!(loaded.warnings.iter().any(|w| w.contains("not vertices")));
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        let text = r#"{
            "root_system": "A1",
            "polytope": { "h_rep": { "normals": [[1], [-1]], "offsets": [-2, -2] } },
            "extra": 1
        }"#;
        assert!(matches!(parse_instance(text), Err(CliError::Parse(_))));
    }

    #[test]
    fn normalized_instance_is_idempotent() {
        let text = r#"{
            "root_system": "A1",
            "polytope": { "h_rep": { "normals": [[2], [-2]], "offsets": [-4, -4] } },
            "function": { "pieces": [ { "b": [1], "k": 0 }, { "b": [-1], "k": 0 },
                                       { "b": [1], "k": 0 } ] }
        }"#;
        let file = parse_instance(text).unwrap();
        let loaded = load(&file).unwrap();
        let norm = normalized(&file, &loaded);
        let text2 = serde_json::to_string(&norm).unwrap();
        let file2 = parse_instance(&text2).unwrap();
        let loaded2 = load(&file2).unwrap();
        assert!(loaded2.warnings.is_empty());
        assert_eq!(loaded.polytope.constraints(), loaded2.polytope.constraints());
        let norm2 = normalized(&file2, &loaded2);
        assert_eq!(serde_json::to_string(&norm2).unwrap(), text2);
    }

    #[test]
    fn explicit_root_system_round_trips() {
        let text = r#"{
            "root_system": { "gram": [[1]], "positive_roots": [[2]] },
            "polytope": { "h_rep": { "normals": [[1], [-1]], "offsets": [-4, -4] } }
        }"#;
        let loaded = load(&parse_instance(text).unwrap()).unwrap();
        assert_eq!(loaded.root_label, "explicit");
        assert_eq!(loaded.rs.r(), 1);
        assert_eq!(loaded.rs.rho(), &[rat(1, 1)]);
    }
}
