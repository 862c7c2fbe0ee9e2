use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::hstructure::HTriple;
use crate::invariants::{SignedNorms, StructuralTensors};
use crate::jet::DIM;

type T3 = [[[f64; DIM]; DIM]; DIM];

/// Class membership for one almost complex structure of the triple.
/// The fields that only make sense for one structure kind are optional:
/// almost_kaehler applies to J1, the Norden subclasses to J2 and J3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaVerdict {
    pub kaehler: bool,
    pub integrable: bool,
    pub isotropic_kaehler: bool,
    pub main_class_w: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub almost_kaehler: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norden_w2: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norden_w3: Option<bool>,
}

/// Full classification at a point (or AND-aggregated over sample points).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub per_alpha: [AlphaVerdict; 3],
    pub in_w: bool,
    pub pseudo_hyper_kaehler: bool,
}

/// Residual tolerances: `zero` for tensors that must vanish, `matching` for
/// componentwise comparison against a class-defining formula (applied
/// relative to the tensor scale with floor 1).
#[derive(Clone, Copy, Debug)]
pub struct ClassTolerances {
    pub zero: f64,
    pub matching: f64,
}

impl Default for ClassTolerances {
    fn default() -> Self {
        ClassTolerances {
            zero: 1e-8,
            matching: 1e-6,
        }
    }
}

fn within(residual: f64, scale: f64, tol: f64) -> bool {
    residual <= tol * scale.max(1.0)
}

pub fn is_kaehler(t: &StructuralTensors, alpha: usize, tol: f64) -> bool {
    t.max_abs_f(alpha) <= tol
}

pub fn is_integrable(t: &StructuralTensors, alpha: usize, tol: f64) -> bool {
    t.max_abs_n(alpha) <= tol
}

pub fn is_isotropic_kaehler(norms: &SignedNorms, alpha: usize, tol: f64) -> bool {
    norms.nabla_j[alpha - 1].abs() <= tol
}

pub fn hypercomplex(t: &StructuralTensors, tol: f64) -> bool {
    (1..=3).all(|alpha| is_integrable(t, alpha, tol))
}

/// In dimension four, vanishing of two Nijenhuis tensors forces the third.
/// Returns the offending alpha when exactly two vanish but the third does
/// not, i.e. when the dichotomy is violated.
pub fn two_implies_three_violation(t: &StructuralTensors, tol: f64) -> Option<usize> {
    let vanish: Vec<usize> = (1..=3).filter(|&a| is_integrable(t, a, tol)).collect();
    if vanish.len() == 2 {
        (1..=3).find(|a| !vanish.contains(a))
    } else {
        None
    }
}

/// Residual of F1 against the Hermitian W4 normal form
/// F1(x,y,z) = 1/2 [ g(x,y) t(z) - g(x,z) t(y)
///                 - g(x,J1 y) t(J1 z) + g(x,J1 z) t(J1 y) ], t = theta1.
pub fn hermitian_w4_residual(t: &StructuralTensors, h: &HTriple, eps: [f64; DIM]) -> f64 {
    let f = &t.f[0];
    let theta = &t.theta[0];
    let j = h.j(1);
    let tj = |c: usize| -> f64 { (0..DIM).map(|d| j[d][c] * theta[d]).sum() };
    let mut worst = 0.0f64;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                let gab = if a == b { eps[a] } else { 0.0 };
                let gac = if a == c { eps[a] } else { 0.0 };
                let rhs = 0.5
                    * (gab * theta[c] - gac * theta[b] - eps[a] * j[a][b] * tj(c)
                        + eps[a] * j[a][c] * tj(b));
                worst = worst.max((f[a][b][c] - rhs).abs());
            }
        }
    }
    worst
}

pub fn is_hermitian_w4(
    t: &StructuralTensors,
    h: &HTriple,
    eps: [f64; DIM],
    tol: f64,
) -> bool {
    within(hermitian_w4_residual(t, h, eps), t.max_abs_f(1), tol)
}

/// Residual of the cyclic sum sigma F1(x,y,z) over the frame; its vanishing
/// characterises the almost Kähler class (closed Kähler form).
pub fn almost_kaehler_residual(t: &StructuralTensors) -> f64 {
    cyclic_residual(&t.f[0])
}

pub fn is_almost_kaehler(t: &StructuralTensors, tol: f64) -> bool {
    within(almost_kaehler_residual(t), t.max_abs_f(1), tol)
}

fn cyclic_residual(f: &T3) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                let s = f[a][b][c] + f[b][c][a] + f[c][a][b];
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

/// Residual of F_alpha (alpha = 2, 3) against the Norden W1 normal form
/// F(x,y,z) = 1/4 [ g(x,y) t(z) + g(x,z) t(y)
///                + g(x,J y) t(J z) + g(x,J z) t(J y) ], t = theta_alpha.
pub fn norden_w1_residual(
    t: &StructuralTensors,
    h: &HTriple,
    eps: [f64; DIM],
    alpha: usize,
) -> f64 {
    let f = &t.f[alpha - 1];
    let theta = &t.theta[alpha - 1];
    let j = h.j(alpha);
    let tj = |c: usize| -> f64 { (0..DIM).map(|d| j[d][c] * theta[d]).sum() };
    let mut worst = 0.0f64;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                let gab = if a == b { eps[a] } else { 0.0 };
                let gac = if a == c { eps[a] } else { 0.0 };
                let rhs = 0.25
                    * (gab * theta[c] + gac * theta[b]
                        + eps[a] * j[a][b] * tj(c)
                        + eps[a] * j[a][c] * tj(b));
                worst = worst.max((f[a][b][c] - rhs).abs());
            }
        }
    }
    worst
}

pub fn is_norden_w1(
    t: &StructuralTensors,
    h: &HTriple,
    eps: [f64; DIM],
    alpha: usize,
    tol: f64,
) -> bool {
    within(norden_w1_residual(t, h, eps, alpha), t.max_abs_f(alpha), tol)
}

/// Residuals of the two cyclic-sum conditions for alpha = 2, 3:
/// W2: sigma F(x, y, J z) = 0 and W3: sigma F(x, y, z) = 0.
pub fn norden_w2_w3_residuals(t: &StructuralTensors, h: &HTriple, alpha: usize) -> (f64, f64) {
    let f = &t.f[alpha - 1];
    let j = h.j(alpha);
    let mut twisted = [[[0.0; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                let mut acc = 0.0;
                for d in 0..DIM {
                    acc += j[d][c] * f[a][b][d];
                }
                twisted[a][b][c] = acc;
            }
        }
    }
    (cyclic_residual(&twisted), cyclic_residual(f))
}

pub fn norden_w2_w3(
    t: &StructuralTensors,
    h: &HTriple,
    alpha: usize,
    tol: f64,
) -> (bool, bool) {
    let (r2, r3) = norden_w2_w3_residuals(t, h, alpha);
    let scale = t.max_abs_f(alpha);
    (within(r2, scale, tol), within(r3, scale, tol))
}

/// Full verdict at a point.
pub fn classify(
    t: &StructuralTensors,
    norms: &SignedNorms,
    h: &HTriple,
    eps: [f64; DIM],
    tols: ClassTolerances,
) -> ClassVerdict {
    let per_alpha: [AlphaVerdict; 3] = std::array::from_fn(|i| {
        let alpha = i + 1;
        let main_class_w = if alpha == 1 {
            is_hermitian_w4(t, h, eps, tols.matching)
        } else {
            is_norden_w1(t, h, eps, alpha, tols.matching)
        };
        let (w2, w3) = if alpha == 1 {
            (None, None)
        } else {
            let (a, b) = norden_w2_w3(t, h, alpha, tols.matching);
            (Some(a), Some(b))
        };
        AlphaVerdict {
            kaehler: is_kaehler(t, alpha, tols.zero),
            integrable: is_integrable(t, alpha, tols.zero),
            isotropic_kaehler: is_isotropic_kaehler(norms, alpha, tols.zero),
            main_class_w,
            almost_kaehler: (alpha == 1).then(|| is_almost_kaehler(t, tols.matching)),
            norden_w2: w2,
            norden_w3: w3,
        }
    });
    let in_w = per_alpha.iter().all(|v| v.main_class_w);
    let pseudo_hyper_kaehler = per_alpha.iter().all(|v| v.kaehler);
    ClassVerdict {
        per_alpha,
        in_w,
        pseudo_hyper_kaehler,
    }
}

/// Aggregated data for one example fed into the theorem cross-checks.
#[derive(Clone, Debug)]
pub struct TheoremInput {
    pub example: String,
    pub verdict: ClassVerdict,
    pub flat: bool,
    pub norm_nabla_j: [f64; 3],
    pub max_n: [f64; 3],
}

/// One non-vacuous theorem instance that was verified.
#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub checked: Vec<(String, &'static str)>,
}

/// Runs the structural theorems across example results wherever their
/// hypotheses hold:
/// - membership in two of the classes W(J_alpha) forces the third (cyclic);
/// - Kähler for one structure plus main-class for another forces
///   pseudo-hyper-Kähler;
/// - in the intersection class, one vanishing squared norm of nabla J forces
///   all three (isotropy propagates);
/// - pseudo-hyper-Kähler forces flatness;
/// - vanishing of two Nijenhuis tensors forces the third.
pub fn theorem_crosschecks(inputs: &[TheoremInput]) -> Result<TheoremReport> {
    let mut checked = Vec::new();
    for input in inputs {
        let v = &input.verdict;
        let w: Vec<bool> = v.per_alpha.iter().map(|a| a.main_class_w).collect();

        if w.iter().filter(|&&x| x).count() >= 2 {
            if !v.in_w {
                return Err(GeomError::TheoremViolation {
                    example: input.example.clone(),
                    theorem: "w-intersection-cyclic",
                    detail: format!("two main classes hold but not the third: {w:?}"),
                });
            }
            checked.push((input.example.clone(), "w-intersection-cyclic"));
        }

        let mut kaehler_pair = false;
        for alpha in 0..3 {
            for beta in 0..3 {
                if alpha != beta && v.per_alpha[alpha].kaehler && w[beta] {
                    kaehler_pair = true;
                }
            }
        }
        if kaehler_pair {
            if !v.pseudo_hyper_kaehler {
                return Err(GeomError::TheoremViolation {
                    example: input.example.clone(),
                    theorem: "kaehler-pair-implies-hyper-kaehler",
                    detail: "Kähler for one structure and main-class for another, \
                             yet not pseudo-hyper-Kähler"
                        .into(),
                });
            }
            checked.push((input.example.clone(), "kaehler-pair-implies-hyper-kaehler"));
        }

        let isotropic: Vec<bool> = input
            .norm_nabla_j
            .iter()
            .map(|n| n.abs() <= 1e-8)
            .collect();
        if v.in_w && isotropic.iter().any(|&x| x) {
            if !isotropic.iter().all(|&x| x) {
                return Err(GeomError::TheoremViolation {
                    example: input.example.clone(),
                    theorem: "isotropic-propagation",
                    detail: format!(
                        "in the intersection class with norms {:?}, isotropy did not propagate",
                        input.norm_nabla_j
                    ),
                });
            }
            checked.push((input.example.clone(), "isotropic-propagation"));
        }

        if v.pseudo_hyper_kaehler {
            if !input.flat {
                return Err(GeomError::TheoremViolation {
                    example: input.example.clone(),
                    theorem: "hyper-kaehler-implies-flat",
                    detail: "pseudo-hyper-Kähler example with nonzero curvature".into(),
                });
            }
            checked.push((input.example.clone(), "hyper-kaehler-implies-flat"));
        }

        let n_vanish = input.max_n.iter().filter(|&&m| m <= 1e-8).count();
        if n_vanish == 2 {
            return Err(GeomError::TheoremViolation {
                example: input.example.clone(),
                theorem: "two-nijenhuis-imply-third",
                detail: format!("exactly two Nijenhuis tensors vanish: {:?}", input.max_n),
            });
        }
        if n_vanish == 3 {
            checked.push((input.example.clone(), "two-nijenhuis-imply-third"));
        }
    }
    Ok(TheoremReport { checked })
}
