use crate::chart::FrameSnapshot;
use crate::error::{GeomError, Result};
use crate::hstructure::{fundamental_forms, HTriple};
use crate::jet::DIM;

type T3 = [[[f64; DIM]; DIM]; DIM];
type T4 = [[[[f64; DIM]; DIM]; DIM]; DIM];

/// The first-order structural tensors of the triple at one point, all in
/// frame components with the output index last:
/// f[alpha-1][a][b][c]       = F_alpha(e_a, e_b, e_c),
/// n[alpha-1][a][b][c]       = c-component of N_alpha(e_a, e_b),
/// theta[alpha-1][c]         = theta_alpha(e_c),
/// nabla_j[alpha-1][a][b][c] = c-component of (nabla_{e_a} J_alpha) e_b.
#[derive(Clone, Debug)]
pub struct StructuralTensors {
    pub f: [T3; 3],
    pub n: [T3; 3],
    pub theta: [[f64; DIM]; 3],
    pub nabla_j: [T3; 3],
}

/// The four signed norms, indexed by alpha - 1. Signed: each index is
/// contracted with the frame signature, so the values can be negative.
#[derive(Clone, Debug)]
pub struct SignedNorms {
    pub nabla_j: [f64; 3],
    pub f: [f64; 3],
    pub n: [f64; 3],
    pub theta: [f64; 3],
}

/// Ricci tensor and the scalar curvatures. Two associated-curvature formulas
/// circulate: the half-contraction with one J per argument pair
/// (`half_form`) and the single-J contraction (`single_form`).
/// tau_star picks the conventional assignment (half for alpha = 1, single
/// for alpha = 2, 3); tau_star_alt records the complementary assignment.
#[derive(Clone, Debug)]
pub struct RicciScalars {
    pub ricci: [[f64; DIM]; DIM],
    pub tau: f64,
    pub tau_star: [f64; 3],
    pub tau_star_alt: [f64; 3],
}

/// Curvatures of one totally real frame section.
#[derive(Clone, Debug)]
pub struct SectionCurvature {
    pub a: usize,
    pub b: usize,
    pub nu: f64,
    pub nu_star2: f64,
}

/// Totally real sectional curvatures aggregated over all admissible frame
/// pairs, with their spread (pointwise-constancy defect) and the residual of
/// the almost-Einstein relation rho = 2(nu g - nu*2 g2).
#[derive(Clone, Debug)]
pub struct TotallyRealCurvatures {
    pub sections: Vec<SectionCurvature>,
    pub nu: f64,
    pub nu_star2: f64,
    pub spread: f64,
    pub ricci_residual: f64,
}

/// Everything reported per point.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub point: [f64; DIM],
    pub norm_nabla_j: [f64; 3],
    pub norm_f: [f64; 3],
    pub norm_n: [f64; 3],
    pub norm_theta: [f64; 3],
    pub tau: f64,
    pub tau_star: [f64; 3],
    pub tau_star_alt: [f64; 3],
    pub ricci: [[f64; DIM]; DIM],
    pub sectional: [[f64; DIM]; DIM],
    pub nu: Option<f64>,
    pub nu_star2: Option<f64>,
    pub flat: bool,
    pub einstein: bool,
}

/// Covariant derivative of a frame-constant J in direction e_a:
/// (nabla_{e_a} J) e_b = nabla_{e_a}(J e_b) - J(nabla_{e_a} e_b); only the
/// connection contributes. Returned as [a][b][c] (c-component).
pub fn nabla_j(snap: &FrameSnapshot, h: &HTriple, alpha: usize) -> T3 {
    let j = h.j(alpha);
    let mut out = [[[0.0; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                let mut acc = 0.0;
                for d in 0..DIM {
                    acc += snap.gamma[a][d][c] * j[d][b] - j[c][d] * snap.gamma[a][b][d];
                }
                out[a][b][c] = acc;
            }
        }
    }
    out
}

/// F_alpha(e_a, e_b, e_c) = g((nabla_{e_a} J_alpha) e_b, e_c) with
/// g = diag(eps). Cross-checked against the derivative of the associated
/// bilinear form: (nabla_x g_alpha)(y, z) for frame-constant forms reduces
/// to connection terms, and the two routes must agree.
pub fn f_tensor(snap: &FrameSnapshot, h: &HTriple, alpha: usize) -> Result<T3> {
    let nj = nabla_j(snap, h, alpha);
    let eps = snap.eps;
    let mut f = [[[0.0; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                f[a][b][c] = eps[c] * nj[a][b][c];
            }
        }
    }

    let forms = fundamental_forms(h, eps)?;
    let form = match alpha {
        1 => &forms.phi,
        2 => &forms.g2,
        _ => &forms.g3,
    };
    let mut worst = 0.0f64;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                let mut alt = 0.0;
                for d in 0..DIM {
                    alt -= snap.gamma[a][b][d] * form[d][c] + snap.gamma[a][c][d] * form[b][d];
                }
                worst = worst.max((f[a][b][c] - alt).abs());
            }
        }
    }
    if worst > 1e-10 {
        return Err(GeomError::ValidationError(format!(
            "two evaluation routes for F_{alpha} disagree (residual {worst:.3e})"
        )));
    }
    Ok(f)
}

/// Nijenhuis tensor from the frame brackets:
/// N(X,Y) = [X,Y] + J[X,JY] + J[JX,Y] - [JX,JY]; for frame-constant J every
/// term expands through the bracket coefficients. Returned as [a][b][c].
pub fn nijenhuis(snap: &FrameSnapshot, h: &HTriple, alpha: usize) -> T3 {
    let j = h.j(alpha);
    let c = &snap.brackets;
    let mut out = [[[0.0; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            for comp in 0..DIM {
                let mut acc = c[a][b][comp];
                for i in 0..DIM {
                    for d in 0..DIM {
                        acc += j[i][b] * j[comp][d] * c[a][i][d];
                        acc += j[i][a] * j[comp][d] * c[i][b][d];
                    }
                }
                for i in 0..DIM {
                    for k in 0..DIM {
                        acc -= j[i][a] * j[k][b] * c[i][k][comp];
                    }
                }
                out[a][b][comp] = acc;
            }
        }
    }
    out
}

/// Lie form: theta_alpha(e_c) = sum_a eps_a F_alpha(e_a, e_a, e_c).
pub fn lie_form(f: &T3, eps: [f64; DIM]) -> [f64; DIM] {
    std::array::from_fn(|c| (0..DIM).map(|a| eps[a] * f[a][a][c]).sum())
}

/// All structural tensors at once.
pub fn structural_tensors(snap: &FrameSnapshot, h: &HTriple) -> Result<StructuralTensors> {
    let mut f = [[[[0.0; DIM]; DIM]; DIM]; 3];
    let mut n = [[[[0.0; DIM]; DIM]; DIM]; 3];
    let mut theta = [[0.0; DIM]; 3];
    let mut nj = [[[[0.0; DIM]; DIM]; DIM]; 3];
    for alpha in 1..=3 {
        nj[alpha - 1] = nabla_j(snap, h, alpha);
        f[alpha - 1] = f_tensor(snap, h, alpha)?;
        n[alpha - 1] = nijenhuis(snap, h, alpha);
        theta[alpha - 1] = lie_form(&f[alpha - 1], snap.eps);
    }
    Ok(StructuralTensors {
        f,
        n,
        theta,
        nabla_j: nj,
    })
}

impl StructuralTensors {
    pub fn max_abs_f(&self, alpha: usize) -> f64 {
        max_abs3(&self.f[alpha - 1])
    }

    pub fn max_abs_n(&self, alpha: usize) -> f64 {
        max_abs3(&self.n[alpha - 1])
    }

    /// Largest violation of the characteristic symmetries of F_alpha:
    /// alpha = 1 is skew in (y, z) with F(x,y,z) = -F(x, J1 y, J1 z);
    /// alpha = 2, 3 are symmetric with F(x,y,z) = F(x, J y, J z).
    pub fn f_symmetry_residual(&self, h: &HTriple, alpha: usize) -> f64 {
        let f = &self.f[alpha - 1];
        let j = h.j(alpha);
        let sign = if alpha == 1 { -1.0 } else { 1.0 };
        let mut worst = 0.0f64;
        for a in 0..DIM {
            for b in 0..DIM {
                for c in 0..DIM {
                    worst = worst.max((f[a][b][c] - sign * f[a][c][b]).abs());
                    let mut twisted = 0.0;
                    for y in 0..DIM {
                        for z in 0..DIM {
                            twisted += j[y][b] * j[z][c] * f[a][y][z];
                        }
                    }
                    worst = worst.max((f[a][b][c] - sign * twisted).abs());
                }
            }
        }
        worst
    }
}

fn max_abs3(t: &T3) -> f64 {
    let mut worst = 0.0f64;
    for plane in t {
        for row in plane {
            for &x in row {
                worst = worst.max(x.abs());
            }
        }
    }
    worst
}

fn max_abs4(t: &T4) -> f64 {
    let mut worst = 0.0f64;
    for cube in t {
        for plane in cube {
            for row in plane {
                for &x in row {
                    worst = worst.max(x.abs());
                }
            }
        }
    }
    worst
}

/// Signature-weighted squared norms of the four tensors; every contraction
/// index carries its eps factor.
pub fn signed_norms(t: &StructuralTensors, eps: [f64; DIM]) -> SignedNorms {
    let norm3 = |x: &T3| -> f64 {
        let mut acc = 0.0;
        for a in 0..DIM {
            for b in 0..DIM {
                for c in 0..DIM {
                    acc += eps[a] * eps[b] * eps[c] * x[a][b][c] * x[a][b][c];
                }
            }
        }
        acc
    };
    let norm1 = |x: &[f64; DIM]| -> f64 { (0..DIM).map(|a| eps[a] * x[a] * x[a]).sum() };
    SignedNorms {
        nabla_j: std::array::from_fn(|i| norm3(&t.nabla_j[i])),
        f: std::array::from_fn(|i| norm3(&t.f[i])),
        n: std::array::from_fn(|i| norm3(&t.n[i])),
        theta: std::array::from_fn(|i| norm1(&t.theta[i])),
    }
}

/// Ricci tensor rho_ab = sum_c eps_c R(e_c, e_a, e_b, e_c), scalar curvature
/// tau = sum eps_a eps_b R(e_a, e_b, e_b, e_a), and both associated scalar
/// curvature forms for every alpha:
/// half_form    = 1/2 sum eps_a eps_b R(e_a, J e_a, e_b, J e_b),
/// single_form  =     sum eps_a eps_b R(e_a, e_b, J e_b, e_a).
pub fn ricci_and_scalars(snap: &FrameSnapshot, h: &HTriple) -> RicciScalars {
    let r = &snap.riemann;
    let eps = snap.eps;
    let ricci: [[f64; DIM]; DIM] = std::array::from_fn(|a| {
        std::array::from_fn(|b| (0..DIM).map(|c| eps[c] * r[c][a][b][c]).sum())
    });
    let mut tau = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            tau += eps[a] * eps[b] * r[a][b][b][a];
        }
    }
    let half_form = |alpha: usize| -> f64 {
        let j = h.j(alpha);
        let mut acc = 0.0;
        for a in 0..DIM {
            for b in 0..DIM {
                for i in 0..DIM {
                    for k in 0..DIM {
                        acc += eps[a] * eps[b] * j[i][a] * j[k][b] * r[a][i][b][k];
                    }
                }
            }
        }
        0.5 * acc
    };
    let single_form = |alpha: usize| -> f64 {
        let j = h.j(alpha);
        let mut acc = 0.0;
        for a in 0..DIM {
            for b in 0..DIM {
                for k in 0..DIM {
                    acc += eps[a] * eps[b] * j[k][b] * r[a][b][k][a];
                }
            }
        }
        acc
    };
    RicciScalars {
        ricci,
        tau,
        tau_star: [half_form(1), single_form(2), single_form(3)],
        tau_star_alt: [single_form(1), half_form(2), half_form(3)],
    }
}

/// Sectional curvature of the frame plane (e_a, e_b):
/// k = R(e_a,e_b,e_b,e_a) / pi1(e_a,e_b,e_b,e_a) with
/// pi1(x,y,z,w) = g(y,z)g(x,w) - g(x,z)g(y,w); for an orthonormal frame the
/// denominator is eps_a eps_b.
pub fn sectional(snap: &FrameSnapshot, a: usize, b: usize) -> Result<f64> {
    let pi1 = snap.eps[a] * snap.eps[b] * if a == b { 0.0 } else { 1.0 };
    if pi1.abs() < 1e-12 {
        return Err(GeomError::DegenerateSection { a, b, pi1 });
    }
    Ok(snap.riemann[a][b][b][a] / pi1)
}

/// All frame sectional curvatures; the diagonal is zero by convention.
pub fn sectional_matrix(snap: &FrameSnapshot) -> [[f64; DIM]; DIM] {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            if a == b {
                0.0
            } else {
                snap.riemann[a][b][b][a] / (snap.eps[a] * snap.eps[b])
            }
        })
    })
}

/// Value of pi1(e_a, e_b, e_c, e_d) for the orthonormal frame g = diag(eps).
fn pi1_frame(eps: [f64; DIM], a: usize, b: usize, c: usize, d: usize) -> f64 {
    let g = |x: usize, y: usize| if x == y { eps[x] } else { 0.0 };
    g(b, c) * g(a, d) - g(a, c) * g(b, d)
}

/// Least-squares fit of R = k pi1; returns k when the fit is exact to 1e-9
/// componentwise, i.e. the snapshot has constant sectional curvature.
pub fn constant_curvature_check(snap: &FrameSnapshot) -> Option<f64> {
    let eps = snap.eps;
    let mut num = 0.0;
    let mut den = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    let p = pi1_frame(eps, a, b, c, d);
                    num += snap.riemann[a][b][c][d] * p;
                    den += p * p;
                }
            }
        }
    }
    let k = num / den;
    let mut worst = 0.0f64;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    let fit = k * pi1_frame(eps, a, b, c, d);
                    worst = worst.max((snap.riemann[a][b][c][d] - fit).abs());
                }
            }
        }
    }
    if worst <= 1e-9 {
        Some(k)
    } else {
        None
    }
}

/// Curvatures of the totally real frame sections with respect to J2:
/// pairs (e_a, e_b) whose span is orthogonal to its J2-image. For each,
/// nu = R(e_a,e_b,e_b,e_a)/pi1 and nu*2 = R(e_a,e_b,e_b,J2 e_a)/pi1.
/// Reports the spread across sections and the residual of
/// rho = 2(nu g - nu*2 g2) at the aggregated values.
pub fn totally_real_curvatures(
    snap: &FrameSnapshot,
    h: &HTriple,
) -> Result<TotallyRealCurvatures> {
    let eps = snap.eps;
    let forms = fundamental_forms(h, eps)?;
    let g2 = &forms.g2;
    let j2 = h.j(2);

    let mut sections = Vec::new();
    for a in 0..DIM {
        for b in (a + 1)..DIM {
            let coupled = g2[a][a].abs().max(g2[a][b].abs()).max(g2[b][a].abs()).max(g2[b][b].abs());
            if coupled > 1e-12 {
                continue;
            }
            let pi1 = eps[a] * eps[b];
            let nu = snap.riemann[a][b][b][a] / pi1;
            let mut rj = 0.0;
            for c in 0..DIM {
                rj += j2[c][a] * snap.riemann[a][b][b][c];
            }
            let nu_star2 = rj / pi1;
            sections.push(SectionCurvature {
                a,
                b,
                nu,
                nu_star2,
            });
        }
    }
    if sections.is_empty() {
        return Err(GeomError::NoAdmissibleSection);
    }

    let len = sections.len() as f64;
    let nu = sections.iter().map(|s| s.nu).sum::<f64>() / len;
    let nu_star2 = sections.iter().map(|s| s.nu_star2).sum::<f64>() / len;
    let spread = sections
        .iter()
        .map(|s| (s.nu - nu).abs().max((s.nu_star2 - nu_star2).abs()))
        .fold(0.0f64, f64::max);

    let scal = ricci_and_scalars(snap, h);
    let mut ricci_residual = 0.0f64;
    for a in 0..DIM {
        for b in 0..DIM {
            let gm = if a == b { eps[a] } else { 0.0 };
            let model = 2.0 * (nu * gm - nu_star2 * g2[a][b]);
            ricci_residual = ricci_residual.max((scal.ricci[a][b] - model).abs());
        }
    }

    Ok(TotallyRealCurvatures {
        sections,
        nu,
        nu_star2,
        spread,
        ricci_residual,
    })
}

/// Assembles the per-point report. `tol_zero` decides the flat and Einstein
/// flags and whether the totally real curvatures are constant enough to
/// report as pointwise scalars.
pub fn invariant_report(
    snap: &FrameSnapshot,
    h: &HTriple,
    tol_zero: f64,
) -> Result<InvariantReport> {
    let tensors = structural_tensors(snap, h)?;
    let norms = signed_norms(&tensors, snap.eps);
    let scal = ricci_and_scalars(snap, h);
    let sect = sectional_matrix(snap);
    let flat = max_abs4(&snap.riemann) <= tol_zero;

    let mut einstein_residual = 0.0f64;
    for a in 0..DIM {
        for b in 0..DIM {
            let gm = if a == b { snap.eps[a] } else { 0.0 };
            einstein_residual =
                einstein_residual.max((scal.ricci[a][b] - scal.tau / 4.0 * gm).abs());
        }
    }

    let (nu, nu_star2) = match totally_real_curvatures(snap, h) {
        Ok(tr) if tr.spread <= 1e-8 => (Some(tr.nu), Some(tr.nu_star2)),
        _ => (None, None),
    };

    Ok(InvariantReport {
        point: snap.point,
        norm_nabla_j: norms.nabla_j,
        norm_f: norms.f,
        norm_n: norms.n,
        norm_theta: norms.theta,
        tau: scal.tau,
        tau_star: scal.tau_star,
        tau_star_alt: scal.tau_star_alt,
        ricci: scal.ricci,
        sectional: sect,
        nu,
        nu_star2,
        flat,
        einstein: einstein_residual <= tol_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{snapshot, ChartMetric, FrameField};
    use crate::expr::Expr;
    use crate::hstructure::standard_h;

    fn exprs(rows: [[&str; 4]; 4]) -> [[Expr; 4]; 4] {
        rows.map(|row| row.map(|s| Expr::parse(s).unwrap()))
    }

    fn flat_snapshot() -> FrameSnapshot {
        let mut grows = [["0"; 4]; 4];
        let mut frows = [["0"; 4]; 4];
        for i in 0..4 {
            grows[i][i] = if i < 2 { "1" } else { "-1" };
            frows[i][i] = "1";
        }
        let g = ChartMetric::from_components(exprs(grows));
        let f = FrameField::new(exprs(frows), [1.0, 1.0, -1.0, -1.0]).unwrap();
        snapshot(&g, &f, [0.1, 0.2, 0.3, 0.4]).unwrap()
    }

    fn half_space_snapshot() -> FrameSnapshot {
        let mut grows = [["0"; 4]; 4];
        let mut frows = [["0"; 4]; 4];
        for i in 0..4 {
            grows[i][i] = if i < 2 { "1/u1^2" } else { "-1/u1^2" };
            frows[i][i] = "u1";
        }
        let g = ChartMetric::from_components(exprs(grows));
        let f = FrameField::new(exprs(frows), [1.0, 1.0, -1.0, -1.0]).unwrap();
        snapshot(&g, &f, [0.8, 0.1, 2.0, -0.5]).unwrap()
    }

    #[test]
    fn flat_point_has_zero_tensors() {
        let snap = flat_snapshot();
        let h = standard_h();
        let t = structural_tensors(&snap, &h).unwrap();
        for alpha in 1..=3 {
            assert_eq!(t.max_abs_f(alpha), 0.0);
            assert_eq!(t.max_abs_n(alpha), 0.0);
        }
        let report = invariant_report(&snap, &h, 1e-8).unwrap();
        assert!(report.flat);
        assert!(report.einstein);
        assert_eq!(report.tau, 0.0);
        assert_eq!(report.nu, Some(0.0));
        assert_eq!(report.nu_star2, Some(0.0));
    }

    #[test]
    fn nijenhuis_is_antisymmetric() {
        let snap = half_space_snapshot();
        let h = standard_h();
        for alpha in 1..=3 {
            let n = nijenhuis(&snap, &h, alpha);
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        assert!((n[a][b][c] + n[b][a][c]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn f_symmetry_types_hold() {
        let snap = half_space_snapshot();
        let h = standard_h();
        let t = structural_tensors(&snap, &h).unwrap();
        for alpha in 1..=3 {
            let r = t.f_symmetry_residual(&h, alpha);
            assert!(r < 1e-9, "alpha {alpha}: residual {r}");
        }
    }

    #[test]
    fn norm_of_f_equals_norm_of_nabla_j() {
        let snap = half_space_snapshot();
        let t = structural_tensors(&snap, &standard_h()).unwrap();
        let norms = signed_norms(&t, snap.eps);
        for i in 0..3 {
            assert!((norms.f[i] - norms.nabla_j[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn tau_is_signed_ricci_trace() {
        let snap = half_space_snapshot();
        let scal = ricci_and_scalars(&snap, &standard_h());
        let trace: f64 = (0..4).map(|a| snap.eps[a] * scal.ricci[a][a]).sum();
        assert!((scal.tau - trace).abs() < 1e-10);
    }

    #[test]
    fn hyperbolic_sections() {
        let snap = half_space_snapshot();
        assert!((sectional(&snap, 0, 1).unwrap() + 1.0).abs() < 1e-9);
        assert!((sectional(&snap, 2, 3).unwrap() + 1.0).abs() < 1e-9);
        assert!(matches!(
            sectional(&snap, 1, 1),
            Err(GeomError::DegenerateSection { .. })
        ));
        let k = constant_curvature_check(&snap).unwrap();
        assert!((k + 1.0).abs() < 1e-9);
    }

    #[test]
    fn flat_constant_curvature_is_zero() {
        assert_eq!(constant_curvature_check(&flat_snapshot()), Some(0.0));
    }

    #[test]
    fn totally_real_sections_of_reference_triple() {
        let snap = flat_snapshot();
        let tr = totally_real_curvatures(&snap, &standard_h()).unwrap();
        let pairs: Vec<(usize, usize)> = tr.sections.iter().map(|s| (s.a, s.b)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert_eq!(tr.nu, 0.0);
        assert_eq!(tr.nu_star2, 0.0);
        assert_eq!(tr.spread, 0.0);
        assert!(tr.ricci_residual < 1e-12);
    }

    #[test]
    fn lie_form_traces_f() {
        let snap = half_space_snapshot();
        let h = standard_h();
        let t = structural_tensors(&snap, &h).unwrap();
        for alpha in 1..=3 {
            let theta = lie_form(&t.f[alpha - 1], snap.eps);
            assert_eq!(theta, t.theta[alpha - 1]);
        }
    }
}
