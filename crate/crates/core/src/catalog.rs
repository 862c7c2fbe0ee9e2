//! Built-in catalog of the ten neutral-metric manifolds with quaternionic
//! structure triples, plus a declarative TOML format so further manifolds can
//! be described and run without recompiling.
//!
//! Each entry carries construction data (chart metric, isometric embedding,
//! or Lie algebra basis, together with an orthonormal frame), one or two
//! labeled structure triples, a domain guard, default sample points, a map of
//! expected invariant values as closed-form expressions of the point, and the
//! expected classification verdict.

use crate::chart::{snapshot, ChartMetric, Embedding, FrameField, FrameSnapshot};
use crate::classify::{AlphaVerdict, ClassTolerances, ClassVerdict};
use crate::error::{GeomError, Result};
use crate::expr::Expr;
use crate::homogeneous::{snapshot_homogeneous, structure_constants, LieAlgebraBasis};
use crate::hstructure::{verify_compatibility, HTriple};
use crate::jet::DIM;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// One conjunct of a domain guard: an expression required to be positive or
/// nonzero at every evaluated point.
#[derive(Clone, Debug)]
pub struct GuardClause {
    expr: Expr,
    kind: GuardKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum GuardKind {
    Positive,
    Nonzero,
}

impl GuardClause {
    /// Parses "expr > 0" or "expr != 0".
    pub fn parse(src: &str) -> Result<GuardClause> {
        let s = src.trim();
        let (lhs, kind) = if let Some(l) = s.strip_suffix("> 0") {
            (l, GuardKind::Positive)
        } else if let Some(l) = s.strip_suffix(">0") {
            (l, GuardKind::Positive)
        } else if let Some(l) = s.strip_suffix("!= 0") {
            (l, GuardKind::Nonzero)
        } else if let Some(l) = s.strip_suffix("!=0") {
            (l, GuardKind::Nonzero)
        } else {
            return Err(GeomError::ParseError(format!(
                "guard must end in '> 0' or '!= 0': {s:?}"
            )));
        };
        Ok(GuardClause {
            expr: Expr::parse(lhs.trim_end())?,
            kind,
        })
    }

    pub fn holds(&self, point: [f64; DIM]) -> Result<bool> {
        let v = self.expr.eval_value(point)?;
        Ok(match self.kind {
            GuardKind::Positive => v > 0.0,
            GuardKind::Nonzero => v != 0.0,
        })
    }
}

impl fmt::Display for GuardClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GuardKind::Positive => write!(f, "{} > 0", self.expr),
            GuardKind::Nonzero => write!(f, "{} != 0", self.expr),
        }
    }
}

impl Serialize for GuardClause {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GuardClause {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<GuardClause, D::Error> {
        let src = String::deserialize(d)?;
        GuardClause::parse(&src).map_err(D::Error::custom)
    }
}

/// A labeled structure triple given by signed 1-based images: entry a of j1
/// is t meaning J1 e_{a+1} = sign(t) e_{|t|}, and likewise for j2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HVariant {
    pub label: String,
    pub j1: [i32; DIM],
    pub j2: [i32; DIM],
}

impl HVariant {
    pub fn triple(&self) -> Result<HTriple> {
        HTriple::from_signed_images(signed_images(self.j1)?, signed_images(self.j2)?)
    }
}

fn signed_images(v: [i32; DIM]) -> Result<[(usize, f64); DIM]> {
    let mut out = [(0usize, 0.0); DIM];
    for (a, &t) in v.iter().enumerate() {
        let target = t.unsigned_abs() as usize;
        if !(1..=DIM).contains(&target) {
            return Err(GeomError::ValidationError(format!(
                "signed image {t} out of range 1..=4"
            )));
        }
        out[a] = (target - 1, f64::from(t.signum()));
    }
    Ok(out)
}

/// How the metric and frame of an entry are specified.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
// Variant sizes are dominated by the chart expressions; the enum lives in a
// handful of catalog entries, so boxing would only add noise.
#[allow(clippy::large_enum_variant)]
pub enum Construction {
    /// Closed-form metric components and frame coefficients on a chart.
    /// frame[i][a] is the du^i component of e_a.
    Chart {
        metric: [[Expr; DIM]; DIM],
        frame: [[Expr; DIM]; DIM],
    },
    /// Isometric embedding into a flat pseudo-Euclidean space; the induced
    /// metric is the pullback of the diagonal ambient metric.
    Embedding {
        map: Vec<Expr>,
        ambient: Vec<f64>,
        frame: [[Expr; DIM]; DIM],
    },
    /// Left-invariant geometry from a matrix Lie algebra basis declared
    /// orthonormal; all invariants are constant.
    LieAlgebra { generators: Vec<Vec<Vec<f64>>> },
}

/// One catalog entry, fully declarative.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub id: String,
    pub construction: Construction,
    pub h: Vec<HVariant>,
    pub eps: [f64; DIM],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub domain_guard: Vec<GuardClause>,
    pub default_points: Vec<[f64; DIM]>,
    pub expected: Vec<(String, Expr)>,
    pub expected_classes: ClassVerdict,
}

impl ExampleSpec {
    pub fn is_embedded(&self) -> bool {
        matches!(self.construction, Construction::Embedding { .. })
    }

    pub fn is_lie(&self) -> bool {
        matches!(self.construction, Construction::LieAlgebra { .. })
    }

    /// Comparison and classification tolerances for this entry. Embedded
    /// entries get wider bounds because their second metric derivatives come
    /// from finite differences of the analytic first derivatives.
    pub fn tolerances(&self) -> ClassTolerances {
        if self.is_embedded() {
            ClassTolerances {
                zero: 1e-6,
                matching: 1e-4,
            }
        } else {
            ClassTolerances::default()
        }
    }

    pub fn orthonormality_tolerance(&self) -> f64 {
        if self.is_embedded() {
            1e-8
        } else {
            1e-10
        }
    }

    pub fn h_triples(&self) -> Result<Vec<(String, HTriple)>> {
        self.h
            .iter()
            .map(|v| Ok((v.label.clone(), v.triple()?)))
            .collect()
    }

    pub fn chart_metric(&self) -> Result<ChartMetric> {
        match &self.construction {
            Construction::Chart { metric, .. } => Ok(ChartMetric::from_components(metric.clone())),
            Construction::Embedding { map, ambient, .. } => Ok(ChartMetric::from_embedding(
                Embedding::new(map.clone(), ambient.clone())?,
            )),
            Construction::LieAlgebra { .. } => Err(GeomError::ValidationError(format!(
                "{}: no chart metric for a Lie algebra entry",
                self.id
            ))),
        }
    }

    pub fn frame_field(&self) -> Result<FrameField> {
        match &self.construction {
            Construction::Chart { frame, .. } | Construction::Embedding { frame, .. } => {
                FrameField::new(frame.clone(), self.eps)
            }
            Construction::LieAlgebra { .. } => Err(GeomError::ValidationError(format!(
                "{}: no frame field for a Lie algebra entry",
                self.id
            ))),
        }
    }

    pub fn lie_basis(&self) -> Result<LieAlgebraBasis> {
        match &self.construction {
            Construction::LieAlgebra { generators } => {
                if generators.len() != DIM {
                    return Err(GeomError::ValidationError(format!(
                        "{}: expected {DIM} generators, got {}",
                        self.id,
                        generators.len()
                    )));
                }
                let gens: [Vec<Vec<f64>>; DIM] = std::array::from_fn(|a| generators[a].clone());
                LieAlgebraBasis::new(gens, self.eps)
            }
            _ => Err(GeomError::ValidationError(format!(
                "{}: not a Lie algebra entry",
                self.id
            ))),
        }
    }

    /// Connection, curvature, and brackets of this entry's frame at a point
    /// (the point is ignored by Lie algebra entries, whose geometry is
    /// homogeneous).
    pub fn snapshot_at(&self, point: [f64; DIM]) -> Result<FrameSnapshot> {
        self.guard_check(point)?;
        if self.is_lie() {
            snapshot_homogeneous(&self.lie_basis()?)
        } else {
            snapshot(&self.chart_metric()?, &self.frame_field()?, point)
        }
    }

    pub fn guard_check(&self, point: [f64; DIM]) -> Result<()> {
        for clause in &self.domain_guard {
            if !clause.holds(point)? {
                return Err(GeomError::GuardViolation {
                    point,
                    guard: clause.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Expected invariant values at a point, from the entry's closed forms.
    pub fn expected_at(&self, point: [f64; DIM]) -> Result<Vec<(String, f64)>> {
        self.guard_check(point)?;
        self.expected
            .iter()
            .map(|(k, e)| Ok((k.clone(), e.eval_value(point)?)))
            .collect()
    }

    /// Structural validation: structure triples satisfy the quaternionic
    /// algebra and are compatible with the metric, the frame is orthonormal
    /// at the default points, guards admit the default points, and every
    /// expected closed form evaluates finitely there.
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(GeomError::ValidationError("empty example id".into()));
        }
        if self.h.is_empty() || self.h.len() > 2 {
            return Err(GeomError::ValidationError(format!(
                "{}: an entry carries one or two structure triples",
                self.id
            )));
        }
        if self.h.len() == 2 && self.h[0].label == self.h[1].label {
            return Err(GeomError::ValidationError(format!(
                "{}: structure triple labels must be distinct",
                self.id
            )));
        }
        for variant in &self.h {
            let triple = variant.triple()?;
            verify_compatibility(&triple, self.eps)?;
        }
        if self.default_points.is_empty() {
            return Err(GeomError::ValidationError(format!(
                "{}: at least one default point",
                self.id
            )));
        }
        for &p in &self.default_points {
            self.guard_check(p)?;
            for (key, e) in &self.expected {
                let v = e.eval_value(p)?;
                if !v.is_finite() {
                    return Err(GeomError::ValidationError(format!(
                        "{}: expected {key} is not finite at {p:?}",
                        self.id
                    )));
                }
            }
        }
        match &self.construction {
            Construction::LieAlgebra { .. } => {
                let basis = self.lie_basis()?;
                structure_constants(&basis)?;
            }
            _ => {
                let g = self.chart_metric()?;
                let frame = self.frame_field()?;
                let tol = self.orthonormality_tolerance();
                for &p in &self.default_points {
                    let resid = frame.orthonormality_residual(&g, p)?;
                    if resid > tol {
                        return Err(GeomError::ValidationError(format!(
                            "{}: frame orthonormality residual {resid:.3e} at {p:?} exceeds {tol:.0e}",
                            self.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Ids of the built-in entries, in catalog order.
pub fn list() -> Vec<&'static str> {
    vec![
        "engel_a",
        "engel_b",
        "semi_space",
        "quarter_space",
        "cylinder_pseudo",
        "cx_cylinder",
        "cx_cone",
        "cx_sphere",
        "lie_a",
        "lie_b",
    ]
}

/// Builds and validates a catalog entry.
pub fn build(id: &str) -> Result<ExampleSpec> {
    let spec = match id {
        "engel_a" => engel_a(),
        "engel_b" => engel_b(),
        "semi_space" => semi_space(),
        "quarter_space" => quarter_space(),
        "cylinder_pseudo" => cylinder_pseudo(),
        "cx_cylinder" => cx_cylinder(),
        "cx_cone" => cx_cone(),
        "cx_sphere" => cx_sphere(),
        "lie_a" => lie_a(),
        "lie_b" => lie_b(),
        _ => return Err(GeomError::UnknownExample(id.to_string())),
    };
    spec.validate()?;
    Ok(spec)
}

/// Expected invariant values of a catalog entry at a point.
pub fn expected(id: &str, point: [f64; DIM]) -> Result<Vec<(String, f64)>> {
    build(id)?.expected_at(point)
}

/// Serializes an entry to the declarative TOML format.
pub fn to_declarative(spec: &ExampleSpec) -> Result<String> {
    toml::to_string_pretty(spec).map_err(|e| GeomError::ParseError(e.to_string()))
}

/// Parses and validates an entry from the declarative TOML format.
pub fn from_declarative(text: &str) -> Result<ExampleSpec> {
    let spec: ExampleSpec =
        toml::from_str(text).map_err(|e| GeomError::ParseError(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

fn ex(src: &str) -> Expr {
    Expr::parse(src).expect("catalog expression")
}

fn mat4(rows: [[&str; DIM]; DIM]) -> [[Expr; DIM]; DIM] {
    rows.map(|r| r.map(ex))
}

fn guards(list: &[&str]) -> Vec<GuardClause> {
    list.iter()
        .map(|s| GuardClause::parse(s).expect("catalog guard"))
        .collect()
}

fn expected_map(pairs: &[(&str, &str)]) -> Vec<(String, Expr)> {
    pairs
        .iter()
        .map(|&(k, v)| (k.to_string(), ex(v)))
        .collect()
}

fn hv(label: &str, j1: [i32; DIM], j2: [i32; DIM]) -> HVariant {
    HVariant {
        label: label.to_string(),
        j1,
        j2,
    }
}

// The two recurring image patterns: J1 rotates within each metric-definite
// pair, J2 swaps the pairs; they differ in the signs on the negative block.
const IMG_A_J1: [i32; DIM] = [2, -1, -4, 3];
const IMG_A_J2: [i32; DIM] = [3, 4, -1, -2];
const IMG_B_J1: [i32; DIM] = [2, -1, 4, -3];
const IMG_B_J2: [i32; DIM] = [3, -4, -1, 2];

fn av(
    kaehler: bool,
    integrable: bool,
    isotropic_kaehler: bool,
    main_class_w: bool,
    almost_kaehler: Option<bool>,
    norden_w2: Option<bool>,
    norden_w3: Option<bool>,
) -> AlphaVerdict {
    AlphaVerdict {
        kaehler,
        integrable,
        isotropic_kaehler,
        main_class_w,
        almost_kaehler,
        norden_w2,
        norden_w3,
    }
}

fn verdict(per_alpha: [AlphaVerdict; 3]) -> ClassVerdict {
    let in_w = per_alpha.iter().all(|v| v.main_class_w);
    let pseudo_hyper_kaehler = per_alpha.iter().all(|v| v.kaehler);
    ClassVerdict {
        per_alpha,
        in_w,
        pseudo_hyper_kaehler,
    }
}

fn zeros(keys: &[&'static str]) -> Vec<(&'static str, &'static str)> {
    keys.iter().map(|&k| (k, "0")).collect()
}

const TAU_STAR_ALT_ZERO: [(&str, &str); 3] = [
    ("tau_star_alt.1", "0"),
    ("tau_star_alt.2", "0"),
    ("tau_star_alt.3", "0"),
];

fn engel_frame() -> [[&'static str; DIM]; DIM] {
    [
        ["1", "0", "0", "0"],
        ["0", "1", "0", "0"],
        ["0", "u1", "-1", "0"],
        ["0", "u3", "0", "-1"],
    ]
}

fn engel_a() -> ExampleSpec {
    let mut expected = expected_map(&[
        ("R.1221", "3/4"),
        ("R.2332", "1"),
        ("R.1331", "1/4"),
        ("R.2142", "-1/4"),
        ("R.2442", "-1/4"),
        ("R.3143", "-1/4"),
        ("R.3443", "1/4"),
        ("max_abs_R", "1"),
        ("rho.11", "1/2"),
        ("rho.22", "0"),
        ("rho.33", "1"),
        ("rho.44", "-1/2"),
        ("norm_N.1", "8"),
        ("norm_N.2", "0"),
        ("norm_N.3", "-8"),
        ("norm_theta.1", "-1"),
        ("norm_theta.2", "0"),
        ("norm_theta.3", "1"),
        ("tau", "0"),
        ("tau_star.1", "-2"),
        ("tau_star.2", "0"),
        ("tau_star.3", "0"),
    ]);
    expected.extend(expected_map(&zeros(&[
        "norm_F.1",
        "norm_F.2",
        "norm_F.3",
        "norm_nablaJ.1",
        "norm_nablaJ.2",
        "norm_nablaJ.3",
    ])));
    expected.extend(expected_map(&TAU_STAR_ALT_ZERO));
    ExampleSpec {
        id: "engel_a".into(),
        construction: Construction::Chart {
            metric: mat4([
                ["1", "0", "0", "0"],
                ["0", "1-u1^2-u3^2", "u1", "u3"],
                ["0", "u1", "-1", "0"],
                ["0", "u3", "0", "-1"],
            ]),
            frame: mat4(engel_frame()),
        },
        h: vec![
            hv("H", IMG_A_J1, IMG_A_J2),
            hv("Hvariant", IMG_B_J1, IMG_B_J2),
        ],
        eps: [1.0, 1.0, -1.0, -1.0],
        domain_guard: vec![],
        default_points: vec![[0.3, 0.2, 0.5, 0.1]],
        expected,
        expected_classes: verdict([
            av(false, false, true, false, Some(false), None, None),
            av(false, false, true, false, None, Some(false), Some(false)),
            av(false, false, true, false, None, Some(false), Some(false)),
        ]),
    }
}

fn engel_b() -> ExampleSpec {
    let mut expected = expected_map(&[
        ("R.1221", "-3/4"),
        ("R.2332", "1"),
        ("R.1331", "-1/4"),
        ("R.2142", "-1/4"),
        ("R.2442", "1/4"),
        ("R.3143", "-1/4"),
        ("R.3443", "-1/4"),
        ("max_abs_R", "1"),
        ("rho.11", "1/2"),
        ("rho.22", "0"),
        ("rho.33", "-1"),
        ("rho.44", "-1/2"),
        ("norm_N.1", "0"),
        ("norm_N.2", "8"),
        ("norm_N.3", "-8"),
        ("norm_theta.1", "0"),
        ("norm_theta.2", "-1"),
        ("norm_theta.3", "1"),
    ]);
    expected.extend(expected_map(&zeros(&[
        "norm_F.1",
        "norm_F.2",
        "norm_F.3",
        "norm_nablaJ.1",
        "norm_nablaJ.2",
        "norm_nablaJ.3",
        "tau",
        "tau_star.1",
        "tau_star.2",
        "tau_star.3",
    ])));
    expected.extend(expected_map(&TAU_STAR_ALT_ZERO));
    ExampleSpec {
        id: "engel_b".into(),
        construction: Construction::Chart {
            metric: mat4([
                ["1", "0", "0", "0"],
                ["0", "-(1-u1^2+u3^2)", "-u1", "u3"],
                ["0", "-u1", "1", "0"],
                ["0", "u3", "0", "-1"],
            ]),
            frame: mat4(engel_frame()),
        },
        h: vec![hv("H", IMG_A_J2, IMG_A_J1), hv("Hprime", IMG_B_J2, IMG_B_J1)],
        eps: [1.0, -1.0, 1.0, -1.0],
        domain_guard: vec![],
        default_points: vec![[0.3, 0.2, 0.5, 0.1]],
        expected,
        expected_classes: verdict([
            av(false, false, true, false, Some(true), None, None),
            av(false, false, true, false, None, Some(false), Some(false)),
            av(false, false, true, false, None, Some(false), Some(false)),
        ]),
    }
}

fn semi_space() -> ExampleSpec {
    let mut expected = expected_map(&[
        ("const_curv_k", "-1"),
        ("sectional.12", "-1"),
        ("sectional.13", "-1"),
        ("sectional.14", "-1"),
        ("sectional.23", "-1"),
        ("sectional.24", "-1"),
        ("sectional.34", "-1"),
        ("rho.11", "-3"),
        ("rho.22", "-3"),
        ("rho.33", "3"),
        ("rho.44", "3"),
        ("tau", "-12"),
        ("tau_star.1", "4"),
        ("tau_star.2", "0"),
        ("tau_star.3", "0"),
        ("norm_F.1", "8"),
        ("norm_F.2", "-16"),
        ("norm_F.3", "-16"),
        ("norm_nablaJ.1", "8"),
        ("norm_nablaJ.2", "-16"),
        ("norm_nablaJ.3", "-16"),
        ("norm_theta.1", "4"),
        ("norm_theta.2", "-16"),
        ("norm_theta.3", "-16"),
        ("nu", "-1"),
        ("nu_star2", "0"),
    ]);
    expected.extend(expected_map(&zeros(&[
        "norm_N.1",
        "norm_N.2",
        "norm_N.3",
        "max_abs_N.1",
        "max_abs_N.2",
        "max_abs_N.3",
        "einstein_resid",
    ])));
    expected.extend(expected_map(&TAU_STAR_ALT_ZERO));
    ExampleSpec {
        id: "semi_space".into(),
        construction: Construction::Chart {
            metric: mat4([
                ["1/u1^2", "0", "0", "0"],
                ["0", "1/u1^2", "0", "0"],
                ["0", "0", "-1/u1^2", "0"],
                ["0", "0", "0", "-1/u1^2"],
            ]),
            frame: mat4([
                ["u1", "0", "0", "0"],
                ["0", "u1", "0", "0"],
                ["0", "0", "u1", "0"],
                ["0", "0", "0", "u1"],
            ]),
        },
        h: vec![hv("H", IMG_B_J1, IMG_B_J2)],
        eps: [1.0, 1.0, -1.0, -1.0],
        domain_guard: guards(&["u1 > 0"]),
        default_points: vec![[0.5, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0]],
        expected,
        expected_classes: verdict([
            av(false, true, false, true, Some(false), None, None),
            av(false, true, false, true, None, Some(true), Some(false)),
            av(false, true, false, true, None, Some(true), Some(false)),
        ]),
    }
}

fn quarter_space() -> ExampleSpec {
    let mut expected = expected_map(&[
        ("R.1221", "-1"),
        ("R.3443", "1"),
        ("sectional.12", "-1"),
        ("sectional.34", "1"),
        ("rho.11", "-1"),
        ("rho.22", "-1"),
        ("rho.33", "-1"),
        ("rho.44", "-1"),
        ("einstein_resid", "1"),
        ("max_abs_N.2", "1"),
        ("max_abs_N.3", "1"),
    ]);
    expected.extend(expected_map(&zeros(&[
        "R.2332",
        "R.1331",
        "R.2142",
        "R.2442",
        "R.3143",
        "tau",
        "tau_star.1",
        "tau_star.2",
        "tau_star.3",
        "norm_F.1",
        "norm_F.2",
        "norm_F.3",
        "norm_nablaJ.1",
        "norm_nablaJ.2",
        "norm_nablaJ.3",
        "norm_N.1",
        "norm_N.2",
        "norm_N.3",
        "norm_theta.1",
        "norm_theta.2",
        "norm_theta.3",
        "max_abs_N.1",
    ])));
    expected.extend(expected_map(&TAU_STAR_ALT_ZERO));
    ExampleSpec {
        id: "quarter_space".into(),
        construction: Construction::Chart {
            metric: mat4([
                ["1/u1^2", "0", "0", "0"],
                ["0", "1/u1^2", "0", "0"],
                ["0", "0", "-1/u3^2", "0"],
                ["0", "0", "0", "-1/u3^2"],
            ]),
            frame: mat4([
                ["u1", "0", "0", "0"],
                ["0", "u1", "0", "0"],
                ["0", "0", "u3", "0"],
                ["0", "0", "0", "u3"],
            ]),
        },
        h: vec![hv("H", IMG_B_J1, IMG_B_J2)],
        eps: [1.0, 1.0, -1.0, -1.0],
        domain_guard: guards(&["u1 > 0", "u3 > 0"]),
        default_points: vec![[1.0, 0.0, 1.0, 0.0], [1.3, 0.2, 0.7, -0.4]],
        expected,
        expected_classes: verdict([
            av(true, true, true, true, Some(true), None, None),
            av(false, false, true, false, None, Some(false), Some(false)),
            av(false, false, true, false, None, Some(false), Some(false)),
        ]),
    }
}

fn cylinder_pseudo() -> ExampleSpec {
    let mut expected = expected_map(&[
        ("norm_nablaJ.1", "-4*tanh(u4)^2"),
        ("norm_nablaJ.2", "4*(2*tanh(u4)^2+coth(u4)^2)"),
        ("norm_nablaJ.3", "4*(tanh(u4)^2+coth(u4)^2)"),
        ("norm_F.1", "-4*tanh(u4)^2"),
        ("norm_F.2", "4*(2*tanh(u4)^2+coth(u4)^2)"),
        ("norm_F.3", "4*(tanh(u4)^2+coth(u4)^2)"),
        ("norm_N.1", "-8*tanh(u4)^2"),
        ("norm_N.2", "-8*coth(u4)^2"),
        ("norm_N.3", "-8*(tanh(u4)-coth(u4))^2"),
        ("norm_theta.1", "-tanh(u4)^2"),
        ("norm_theta.2", "(2*tanh(u4)+coth(u4))^2"),
        ("norm_theta.3", "(tanh(u4)+coth(u4))^2"),
        ("R.2332", "-1"),
        ("R.2442", "-1"),
        ("R.3443", "1"),
        ("rho.11", "0"),
        ("rho.22", "2"),
        ("rho.33", "-2"),
        ("rho.44", "-2"),
        ("tau", "6"),
        ("tau_star.1", "-2"),
        ("tau_star.2", "0"),
        ("tau_star.3", "0"),
    ]);
    expected.extend(expected_map(&TAU_STAR_ALT_ZERO));
    ExampleSpec {
        id: "cylinder_pseudo".into(),
        construction: Construction::Embedding {
            map: vec![
                ex("u1"),
                ex("cosh(u4)*cos(u2)"),
                ex("cosh(u4)*sin(u2)"),
                ex("sinh(u4)*cos(u3)"),
                ex("sinh(u4)*sin(u3)"),
            ],
            ambient: vec![1.0, 1.0, 1.0, -1.0, -1.0],
            frame: mat4([
                ["1", "0", "0", "0"],
                ["0", "1/cosh(u4)", "0", "0"],
                ["0", "0", "1/sinh(u4)", "0"],
                ["0", "0", "0", "1"],
            ]),
        },
        h: vec![hv("H", IMG_A_J1, IMG_A_J2)],
        eps: [1.0, 1.0, -1.0, -1.0],
        domain_guard: guards(&["u4 != 0"]),
        default_points: vec![
            [0.0, 0.4, 0.7, 0.5],
            [0.0, 0.4, 0.7, 1.0],
            [0.0, 0.4, 0.7, 2.0],
        ],
        expected,
        expected_classes: verdict([
            av(false, false, false, false, Some(false), None, None),
            av(false, false, false, false, None, Some(false), Some(false)),
            av(false, false, false, false, None, Some(false), Some(false)),
        ]),
    }
}

fn cx_cylinder() -> ExampleSpec {
    let mut expected = expected_map(&[("nu", "0"), ("nu_star2", "0")]);
    expected.extend(expected_map(&zeros(&[
        "max_abs_R",
        "einstein_resid",
        "norm_F.1",
        "norm_F.2",
        "norm_F.3",
        "norm_nablaJ.1",
        "norm_nablaJ.2",
        "norm_nablaJ.3",
        "norm_N.1",
        "norm_N.2",
        "norm_N.3",
        "norm_theta.1",
        "norm_theta.2",
        "norm_theta.3",
        "max_abs_N.1",
        "max_abs_N.2",
        "max_abs_N.3",
        "tau",
        "tau_star.1",
        "tau_star.2",
        "tau_star.3",
    ])));
    expected.extend(expected_map(&TAU_STAR_ALT_ZERO));
    ExampleSpec {
        id: "cx_cylinder".into(),
        construction: Construction::Embedding {
            map: vec![
                ex("cos(u1)*cosh(u3)"),
                ex("sin(u1)*cosh(u3)"),
                ex("u2"),
                ex("sin(u1)*sinh(u3)"),
                ex("-cos(u1)*sinh(u3)"),
                ex("u4"),
            ],
            ambient: vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0],
            frame: mat4([
                ["1", "0", "0", "0"],
                ["0", "1", "0", "0"],
                ["0", "0", "1", "0"],
                ["0", "0", "0", "1"],
            ]),
        },
        h: vec![hv("H", IMG_A_J1, IMG_A_J2)],
        eps: [1.0, 1.0, -1.0, -1.0],
        domain_guard: vec![],
        default_points: vec![[0.3, 0.2, 0.5, 0.1]],
        expected,
        expected_classes: verdict([
            av(true, true, true, true, Some(true), None, None),
            av(true, true, true, true, None, Some(true), Some(true)),
            av(true, true, true, true, None, Some(true), Some(true)),
        ]),
    }
}

fn cx_cone() -> ExampleSpec {
    const D2: &str = "(u3/(u1^2+u3^2))^2-(u1/(u1^2+u3^2))^2";
    let mut expected = expected_map(&[
        ("norm_F.2", &format!("16*({D2})")),
        ("norm_F.3", &format!("16*({D2})")),
        ("norm_nablaJ.2", &format!("16*({D2})")),
        ("norm_nablaJ.3", &format!("16*({D2})")),
        ("norm_theta.2", &format!("8*({D2})")),
        ("norm_theta.3", &format!("8*({D2})")),
        ("nu", "0"),
        ("nu_star2", "0"),
    ]);
    expected.extend(expected_map(&zeros(&[
        "max_abs_R",
        "norm_F.1",
        "norm_nablaJ.1",
        "norm_theta.1",
        "norm_N.1",
        "norm_N.2",
        "norm_N.3",
        "max_abs_N.1",
        "max_abs_N.2",
        "max_abs_N.3",
        "tau",
        "tau_star.1",
        "tau_star.2",
        "tau_star.3",
    ])));
    expected.extend(expected_map(&TAU_STAR_ALT_ZERO));
    ExampleSpec {
        id: "cx_cone".into(),
        construction: Construction::Embedding {
            map: vec![
                ex("u1*cos(u2)*cosh(u4)-u3*sin(u2)*sinh(u4)"),
                ex("u1*sin(u2)*cosh(u4)+u3*cos(u2)*sinh(u4)"),
                ex("u1"),
                ex("u1*sin(u2)*sinh(u4)+u3*cos(u2)*cosh(u4)"),
                ex("-u1*cos(u2)*sinh(u4)+u3*sin(u2)*cosh(u4)"),
                ex("u3"),
            ],
            ambient: vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0],
            frame: mat4([
                ["1/sqrt(2)", "0", "0", "0"],
                ["0", "u1/(u1^2+u3^2)", "0", "-u3/(u1^2+u3^2)"],
                ["0", "0", "1/sqrt(2)", "0"],
                ["0", "u3/(u1^2+u3^2)", "0", "u1/(u1^2+u3^2)"],
            ]),
        },
        h: vec![hv("H", IMG_A_J1, IMG_A_J2)],
        eps: [1.0, 1.0, -1.0, -1.0],
        domain_guard: guards(&["u1^2+u3^2 > 0"]),
        default_points: vec![[1.0, 0.7, 0.4, 0.3], [0.5, -0.3, 1.1, 0.8]],
        expected,
        expected_classes: verdict([
            av(true, true, true, true, Some(true), None, None),
            av(false, true, false, false, None, Some(true), Some(false)),
            av(false, true, false, false, None, Some(true), Some(false)),
        ]),
    }
}

fn cx_sphere() -> ExampleSpec {
    const S: &str = "(sinh(2*u3)^2-sin(2*u1)^2)/(cos(u1)^2+sinh(u3)^2)^2";
    let mut expected = expected_map(&[
        ("nu", "1"),
        ("nu_star2", "0"),
        ("tau", "8"),
        ("rho.11", "2"),
        ("rho.22", "2"),
        ("rho.33", "-2"),
        ("rho.44", "-2"),
        ("R.1221", "1"),
        ("R.2332", "-1"),
        ("R.3443", "1"),
        ("norm_theta.1", &format!("-({S})")),
        ("norm_theta.3", S),
        ("norm_F.1", &format!("-4*({S})")),
        ("norm_F.3", &format!("4*({S})")),
        ("norm_nablaJ.1", &format!("-4*({S})")),
        ("norm_nablaJ.3", &format!("4*({S})")),
        ("norm_N.1", &format!("-8*({S})")),
        ("norm_N.3", &format!("-8*({S})")),
    ]);
    expected.extend(expected_map(&zeros(&[
        "einstein_resid",
        "norm_F.2",
        "norm_nablaJ.2",
        "norm_N.2",
        "norm_theta.2",
        "max_abs_N.2",
        "tau_star.1",
        "tau_star.2",
        "tau_star.3",
    ])));
    expected.extend(expected_map(&TAU_STAR_ALT_ZERO));
    ExampleSpec {
        id: "cx_sphere".into(),
        construction: Construction::Embedding {
            map: vec![
                ex("cos(u1)*cos(u2)*cosh(u3)*cosh(u4)-sin(u1)*sin(u2)*sinh(u3)*sinh(u4)"),
                ex("cos(u1)*sin(u2)*cosh(u3)*cosh(u4)+sin(u1)*cos(u2)*sinh(u3)*sinh(u4)"),
                ex("sin(u1)*cosh(u3)"),
                ex("cos(u1)*sin(u2)*cosh(u3)*sinh(u4)+sin(u1)*cos(u2)*sinh(u3)*cosh(u4)"),
                ex("-cos(u1)*cos(u2)*cosh(u3)*sinh(u4)+sin(u1)*sin(u2)*sinh(u3)*cosh(u4)"),
                ex("-cos(u1)*sinh(u3)"),
            ],
            ambient: vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0],
            frame: mat4([
                ["1", "0", "0", "0"],
                [
                    "0",
                    "cos(u1)*cosh(u3)/(cos(u1)^2+sinh(u3)^2)",
                    "0",
                    "-sin(u1)*sinh(u3)/(cos(u1)^2+sinh(u3)^2)",
                ],
                ["0", "0", "1", "0"],
                [
                    "0",
                    "sin(u1)*sinh(u3)/(cos(u1)^2+sinh(u3)^2)",
                    "0",
                    "cos(u1)*cosh(u3)/(cos(u1)^2+sinh(u3)^2)",
                ],
            ]),
        },
        h: vec![hv("H", IMG_A_J1, IMG_A_J2)],
        eps: [1.0, 1.0, -1.0, -1.0],
        domain_guard: guards(&["cos(u1)^2+sinh(u3)^2 > 0"]),
        default_points: vec![[0.3, 0.5, 0.8, 0.2], [0.0, 0.5, 1.0, 0.2]],
        expected,
        expected_classes: verdict([
            av(false, false, false, false, Some(false), None, None),
            av(true, true, true, true, None, Some(true), Some(true)),
            av(false, false, false, false, None, Some(false), Some(false)),
        ]),
    }
}

fn lie_generators() -> Vec<Vec<Vec<f64>>> {
    let e = |r: usize, c: usize, s: f64| {
        let mut m = vec![vec![0.0; DIM]; DIM];
        m[r][c] = s;
        m
    };
    let mut x2 = e(0, 1, 1.0);
    x2[1][0] = -1.0;
    vec![e(0, 2, 1.0), x2, e(1, 2, 1.0), e(3, 3, 1.0)]
}

fn lie_a() -> ExampleSpec {
    let mut expected = expected_map(&[
        ("R.1221", "1"),
        ("R.1331", "1"),
        ("R.2332", "-1"),
        ("max_abs_R", "1"),
        ("rho.11", "0"),
        ("rho.22", "2"),
        ("rho.33", "0"),
        ("rho.44", "0"),
        ("norm_F.1", "-4"),
        ("norm_F.2", "8"),
        ("norm_F.3", "12"),
        ("norm_nablaJ.1", "-4"),
        ("norm_nablaJ.2", "8"),
        ("norm_nablaJ.3", "12"),
        ("norm_N.1", "-8"),
        ("norm_N.2", "0"),
        ("norm_N.3", "-8"),
        ("norm_theta.1", "-1"),
        ("norm_theta.2", "4"),
        ("norm_theta.3", "1"),
        ("tau", "2"),
        ("tau_star.1", "-2"),
        ("tau_star.2", "0"),
        ("tau_star.3", "0"),
    ]);
    expected.extend(expected_map(&TAU_STAR_ALT_ZERO));
    ExampleSpec {
        id: "lie_a".into(),
        construction: Construction::LieAlgebra {
            generators: lie_generators(),
        },
        h: vec![hv("H", IMG_A_J1, IMG_A_J2)],
        eps: [1.0, 1.0, -1.0, -1.0],
        domain_guard: vec![],
        default_points: vec![[0.0, 0.0, 0.0, 0.0]],
        expected,
        expected_classes: verdict([
            av(false, false, false, false, Some(false), None, None),
            av(false, true, false, false, None, Some(true), Some(false)),
            av(false, false, false, false, None, Some(false), Some(false)),
        ]),
    }
}

fn lie_b() -> ExampleSpec {
    let mut expected = expected_map(&[
        ("norm_F.2", "4"),
        ("norm_F.3", "4"),
        ("norm_nablaJ.2", "4"),
        ("norm_nablaJ.3", "4"),
        ("norm_N.2", "-8"),
        ("norm_N.3", "-8"),
        ("norm_theta.2", "1"),
        ("norm_theta.3", "1"),
    ]);
    expected.extend(expected_map(&zeros(&[
        "max_abs_R",
        "norm_F.1",
        "norm_nablaJ.1",
        "norm_N.1",
        "norm_theta.1",
        "max_abs_N.1",
        "tau",
        "tau_star.1",
        "tau_star.2",
        "tau_star.3",
    ])));
    expected.extend(expected_map(&TAU_STAR_ALT_ZERO));
    ExampleSpec {
        id: "lie_b".into(),
        construction: Construction::LieAlgebra {
            generators: lie_generators(),
        },
        h: vec![hv("H", [3, 4, -1, -2], [-4, 3, -2, 1])],
        eps: [1.0, -1.0, 1.0, -1.0],
        domain_guard: vec![],
        default_points: vec![[0.0, 0.0, 0.0, 0.0]],
        expected,
        expected_classes: verdict([
            av(true, true, true, true, Some(true), None, None),
            av(false, false, false, false, None, Some(false), Some(false)),
            av(false, false, false, false, None, Some(false), Some(false)),
        ]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_entries_build_and_validate() {
        for id in list() {
            let spec = build(id).unwrap();
            assert_eq!(spec.id, id);
            for (label, triple) in spec.h_triples().unwrap() {
                assert!(!label.is_empty());
                assert!(triple.quaternionic_residual() < 1e-12);
            }
        }
    }

    #[test]
    fn unknown_id_is_rejected() {
        match build("klein_bottle") {
            Err(GeomError::UnknownExample(id)) => assert_eq!(id, "klein_bottle"),
            other => panic!("expected UnknownExample, got {other:?}"),
        }
    }

    #[test]
    fn engel_entries_carry_two_labeled_variants() {
        for id in ["engel_a", "engel_b"] {
            let spec = build(id).unwrap();
            assert_eq!(spec.h.len(), 2, "{id}");
            assert_ne!(spec.h[0].label, spec.h[1].label, "{id}");
        }
        assert_eq!(build("semi_space").unwrap().h.len(), 1);
    }

    #[test]
    fn guard_rejects_excluded_points() {
        let spec = build("semi_space").unwrap();
        match spec.guard_check([-1.0, 0.0, 0.0, 0.0]) {
            Err(GeomError::GuardViolation { guard, .. }) => assert_eq!(guard, "u1 > 0"),
            other => panic!("expected GuardViolation, got {other:?}"),
        }
        let cyl = build("cylinder_pseudo").unwrap();
        assert!(cyl.guard_check([0.0, 0.0, 0.0, 0.0]).is_err());
        assert!(cyl.guard_check([0.0, 0.0, 0.0, -1.0]).is_ok());
    }

    #[test]
    fn expected_closed_forms_evaluate() {
        let vals = expected("cylinder_pseudo", [0.0, 0.4, 0.7, 1.0]).unwrap();
        let get = |key: &str| {
            vals.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .unwrap()
        };
        let coth1 = 1.0_f64.cosh() / 1.0_f64.sinh();
        assert!((get("norm_N.2") - (-8.0 * coth1 * coth1)).abs() < 1e-12);
        assert!((get("R.2332") + 1.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_embedding_satisfies_unit_complex_constraint() {
        let spec = build("cx_sphere").unwrap();
        let Construction::Embedding { map, .. } = &spec.construction else {
            panic!("cx_sphere is an embedding entry");
        };
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..20 {
            let p: [f64; DIM] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let vars: [Jet2; DIM] = std::array::from_fn(|i| Jet2::variable(p[i], i));
            let z: Vec<f64> = map.iter().map(|e| e.eval(&vars).unwrap().value).collect();
            let re = z[0] * z[0] + z[1] * z[1] + z[2] * z[2] - z[3] * z[3] - z[4] * z[4]
                - z[5] * z[5];
            let im = 2.0 * (z[0] * z[3] + z[1] * z[4] + z[2] * z[5]);
            assert!((re - 1.0).abs() <= 1e-12, "re {re} at {p:?}");
            assert!(im.abs() <= 1e-12, "im {im} at {p:?}");
        }
    }

    #[test]
    fn declarative_round_trip_is_stable() {
        for id in list() {
            let spec = build(id).unwrap();
            let text = to_declarative(&spec).unwrap();
            let back = from_declarative(&text).unwrap();
            assert_eq!(text, to_declarative(&back).unwrap(), "{id}");
            assert_eq!(spec.expected_classes, back.expected_classes, "{id}");
        }
    }

    #[test]
    fn declarative_rejects_broken_guard() {
        let spec = build("semi_space").unwrap();
        let text = to_declarative(&spec).unwrap();
        let broken = text.replace("u1 > 0", "u1 < 0");
        assert!(from_declarative(&broken).is_err());
    }

    #[test]
    fn snapshots_at_default_points() {
        for id in list() {
            let spec = build(id).unwrap();
            for &p in &spec.default_points {
                let snap = spec.snapshot_at(p).unwrap();
                let tol = if spec.is_embedded() { 1e-6 } else { 1e-9 };
                let resid = snap.curvature_symmetry_residual();
                assert!(resid <= tol, "{id} at {p:?}: {resid}");
            }
        }
    }

    #[test]
    fn lie_entries_share_generators_but_not_verdicts() {
        let a = build("lie_a").unwrap();
        let b = build("lie_b").unwrap();
        let (Construction::LieAlgebra { generators: ga }, Construction::LieAlgebra { generators: gb }) =
            (&a.construction, &b.construction)
        else {
            panic!("lie entries are Lie algebra constructions");
        };
        assert_eq!(ga, gb);
        assert_ne!(a.eps, b.eps);
        assert_ne!(a.expected_classes, b.expected_classes);
    }
}
