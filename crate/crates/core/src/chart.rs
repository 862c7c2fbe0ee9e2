use std::array::from_fn;

use crate::error::{GeomError, Result};
use crate::expr::Expr;
use crate::jet::{Jet2, DIM};

/// Step for the finite-difference layer of the hybrid pullback scheme.
const FD_STEP: f64 = 1e-5;

/// Pivot threshold below which a matrix is treated as singular.
const PIVOT_TOL: f64 = 1e-12;

/// Metric on a four-dimensional chart, either given directly by closed-form
/// component functions or induced by an embedding into a flat pseudo-Euclidean
/// ambient space.
#[derive(Clone, Debug)]
pub struct ChartMetric {
    source: MetricSource,
}

#[derive(Clone, Debug)]
enum MetricSource {
    Closed(Box<[[Expr; DIM]; DIM]>),
    Pullback(Embedding),
}

impl ChartMetric {
    /// Metric from closed-form components. The component matrix must be
    /// symmetric; both triangles are stored and checked on evaluation.
    pub fn from_components(components: [[Expr; DIM]; DIM]) -> ChartMetric {
        ChartMetric {
            source: MetricSource::Closed(Box::new(components)),
        }
    }

    pub fn from_embedding(emb: Embedding) -> ChartMetric {
        ChartMetric {
            source: MetricSource::Pullback(emb),
        }
    }

    pub fn is_embedded(&self) -> bool {
        matches!(self.source, MetricSource::Pullback(_))
    }

    /// Components at `p` as jets. For closed-form metrics the gradient and
    /// Hessian are analytic; for pulled-back metrics the value and gradient
    /// are analytic and the Hessian comes from central differences of the
    /// analytic gradient (the order-2 jet of the embedding cannot supply it).
    pub fn eval(&self, p: [f64; DIM]) -> Result<[[Jet2; DIM]; DIM]> {
        match &self.source {
            MetricSource::Closed(components) => {
                let vars = Jet2::seed(p);
                let mut g = [[Jet2::ZERO; DIM]; DIM];
                for i in 0..DIM {
                    for j in 0..DIM {
                        g[i][j] = components[i][j].eval(&vars)?;
                    }
                }
                for i in 0..DIM {
                    for j in (i + 1)..DIM {
                        if (g[i][j].value - g[j][i].value).abs() > 1e-12 {
                            return Err(GeomError::ValidationError(format!(
                                "metric components are not symmetric at {p:?} ({i},{j})"
                            )));
                        }
                    }
                }
                Ok(g)
            }
            MetricSource::Pullback(emb) => pullback_metric(emb, p),
        }
    }
}

/// Isometric embedding of the chart into flat R^N with a diagonal metric of
/// signs, N = 5 or 6. The induced metric is the pullback of the ambient one.
#[derive(Clone, Debug)]
pub struct Embedding {
    map: Vec<Expr>,
    ambient_metric: Vec<f64>,
}

impl Embedding {
    pub fn new(map: Vec<Expr>, ambient_metric: Vec<f64>) -> Result<Embedding> {
        if map.len() != ambient_metric.len() {
            return Err(GeomError::ValidationError(format!(
                "embedding has {} components but the ambient metric lists {}",
                map.len(),
                ambient_metric.len()
            )));
        }
        if !(map.len() == 5 || map.len() == 6) {
            return Err(GeomError::ValidationError(format!(
                "ambient dimension must be 5 or 6, got {}",
                map.len()
            )));
        }
        if ambient_metric.iter().any(|s| s.abs() != 1.0) {
            return Err(GeomError::ValidationError(
                "ambient metric entries must be +1 or -1".into(),
            ));
        }
        Ok(Embedding {
            map,
            ambient_metric,
        })
    }

    pub fn map(&self) -> &[Expr] {
        &self.map
    }

    pub fn ambient_metric(&self) -> &[f64] {
        &self.ambient_metric
    }

    pub fn eval_map(&self, p: [f64; DIM]) -> Result<Vec<Jet2>> {
        let vars = Jet2::seed(p);
        self.map.iter().map(|z| z.eval(&vars)).collect()
    }

    /// Induced metric and its first coordinate derivatives, both analytic
    /// from the order-2 jet of the embedding map:
    /// g_ij = sum_K s_K dZ^K_i dZ^K_j,
    /// d_m g_ij = sum_K s_K (Z^K_mi Z^K_j + Z^K_i Z^K_mj).
    #[allow(clippy::type_complexity)]
    fn first_order(&self, p: [f64; DIM]) -> Result<([[f64; DIM]; DIM], [[[f64; DIM]; DIM]; DIM])> {
        let z = self.eval_map(p)?;
        let mut g = [[0.0; DIM]; DIM];
        let mut dg = [[[0.0; DIM]; DIM]; DIM];
        for (zk, &s) in z.iter().zip(&self.ambient_metric) {
            for i in 0..DIM {
                for j in 0..DIM {
                    g[i][j] += s * zk.grad[i] * zk.grad[j];
                    for m in 0..DIM {
                        dg[m][i][j] +=
                            s * (zk.hess[m][i] * zk.grad[j] + zk.grad[i] * zk.hess[m][j]);
                    }
                }
            }
        }
        Ok((g, dg))
    }
}

/// Pullback of the ambient metric through the embedding, as jets at `p`.
/// Value and gradient are analytic; the Hessian is a central difference of
/// the analytic gradient at step 1e-5, symmetrised in the two new indices.
pub fn pullback_metric(emb: &Embedding, p: [f64; DIM]) -> Result<[[Jet2; DIM]; DIM]> {
    let (g, dg) = emb.first_order(p)?;
    let mut hess = [[[[0.0; DIM]; DIM]; DIM]; DIM];
    for n in 0..DIM {
        let mut fwd = p;
        fwd[n] += FD_STEP;
        let mut back = p;
        back[n] -= FD_STEP;
        let (_, dg_f) = emb.first_order(fwd)?;
        let (_, dg_b) = emb.first_order(back)?;
        for m in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    hess[n][m][i][j] = (dg_f[m][i][j] - dg_b[m][i][j]) / (2.0 * FD_STEP);
                }
            }
        }
    }
    Ok(from_fn(|i| {
        from_fn(|j| Jet2 {
            value: g[i][j],
            grad: from_fn(|m| dg[m][i][j]),
            hess: from_fn(|n| from_fn(|m| 0.5 * (hess[n][m][i][j] + hess[m][n][i][j]))),
        })
    }))
}

/// Orthonormal frame field on the chart: column a of the coefficient matrix
/// gives e_a = sum_i E^i_a d/du^i, with frame signature eps.
#[derive(Clone, Debug)]
pub struct FrameField {
    coeffs: Box<[[Expr; DIM]; DIM]>,
    eps: [f64; DIM],
}

impl FrameField {
    pub fn new(coeffs: [[Expr; DIM]; DIM], eps: [f64; DIM]) -> Result<FrameField> {
        if eps.iter().any(|e| e.abs() != 1.0) {
            return Err(GeomError::ValidationError(
                "frame signature entries must be +1 or -1".into(),
            ));
        }
        Ok(FrameField {
            coeffs: Box::new(coeffs),
            eps,
        })
    }

    pub fn eps(&self) -> [f64; DIM] {
        self.eps
    }

    /// Coefficient matrix E^i_a as jets; rows are coordinate indices,
    /// columns are frame indices.
    pub fn eval(&self, p: [f64; DIM]) -> Result<[[Jet2; DIM]; DIM]> {
        let vars = Jet2::seed(p);
        let mut e = [[Jet2::ZERO; DIM]; DIM];
        for i in 0..DIM {
            for a in 0..DIM {
                e[i][a] = self.coeffs[i][a].eval(&vars)?;
            }
        }
        Ok(e)
    }

    /// Largest deviation of g(e_a, e_b) from eps_a delta_ab at `p`.
    pub fn orthonormality_residual(&self, g: &ChartMetric, p: [f64; DIM]) -> Result<f64> {
        let gm = g.eval(p)?;
        let e = self.eval(p)?;
        let mut worst = 0.0f64;
        for a in 0..DIM {
            for b in 0..DIM {
                let mut dot = 0.0;
                for i in 0..DIM {
                    for j in 0..DIM {
                        dot += gm[i][j].value * e[i][a].value * e[j][b].value;
                    }
                }
                let expect = if a == b { self.eps[a] } else { 0.0 };
                worst = worst.max((dot - expect).abs());
            }
        }
        Ok(worst)
    }
}

/// Pointwise geometric data in orthonormal-frame components. The common
/// currency of the invariant and classification layers; produced both by
/// chart snapshots and by the Lie-algebra backend.
///
/// Index layout: three-index tensors put the output component last, so
/// gamma[a][b][c] is the c-component of nabla_{e_a} e_b and
/// brackets[a][b][c] the c-component of [e_a, e_b].
/// riemann[a][b][c][d] is g(R(e_a,e_b)e_c, e_d).
#[derive(Clone, Debug)]
pub struct FrameSnapshot {
    pub point: [f64; DIM],
    pub eps: [f64; DIM],
    pub gamma: [[[f64; DIM]; DIM]; DIM],
    pub riemann: [[[[f64; DIM]; DIM]; DIM]; DIM],
    pub brackets: [[[f64; DIM]; DIM]; DIM],
}

impl FrameSnapshot {
    /// Largest violation of the pair symmetries and the first Bianchi
    /// identity of the curvature tensor.
    pub fn curvature_symmetry_residual(&self) -> f64 {
        let r = &self.riemann;
        let mut worst = 0.0f64;
        for a in 0..DIM {
            for b in 0..DIM {
                for c in 0..DIM {
                    for d in 0..DIM {
                        worst = worst.max((r[a][b][c][d] + r[b][a][c][d]).abs());
                        worst = worst.max((r[a][b][c][d] + r[a][b][d][c]).abs());
                        worst = worst.max((r[a][b][c][d] - r[c][d][a][b]).abs());
                        worst = worst
                            .max((r[a][b][c][d] + r[b][c][a][d] + r[c][a][b][d]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest violation of metric compatibility: the lowered connection
    /// Gamma_abc = eps_c Gamma^c_ab must be antisymmetric in (b,c).
    pub fn metricity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..DIM {
            for b in 0..DIM {
                for c in 0..DIM {
                    let low_bc = self.eps[c] * self.gamma[a][b][c];
                    let low_cb = self.eps[b] * self.gamma[a][c][b];
                    worst = worst.max((low_bc + low_cb).abs());
                }
            }
        }
        worst
    }

    /// Largest violation of torsion-freeness:
    /// Gamma^c_ab - Gamma^c_ba = c^c_ab.
    pub fn torsion_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..DIM {
            for b in 0..DIM {
                for c in 0..DIM {
                    let t = self.gamma[a][b][c] - self.gamma[b][a][c] - self.brackets[a][b][c];
                    worst = worst.max(t.abs());
                }
            }
        }
        worst
    }

    pub fn validate(&self, tol_curvature: f64, tol_connection: f64) -> Result<()> {
        let rc = self.curvature_symmetry_residual();
        if rc > tol_curvature {
            return Err(GeomError::ValidationError(format!(
                "curvature symmetries violated at {:?} (residual {rc:.3e})",
                self.point
            )));
        }
        let rm = self.metricity_residual();
        if rm > tol_connection {
            return Err(GeomError::ValidationError(format!(
                "metric compatibility violated at {:?} (residual {rm:.3e})",
                self.point
            )));
        }
        let rt = self.torsion_residual();
        if rt > tol_connection {
            return Err(GeomError::ValidationError(format!(
                "torsion-freeness violated at {:?} (residual {rt:.3e})",
                self.point
            )));
        }
        Ok(())
    }
}

/// Determinant of the value part, by cofactor expansion on the first row.
fn det4(m: &[[Jet2; DIM]; DIM]) -> f64 {
    let v: [[f64; DIM]; DIM] = from_fn(|i| from_fn(|j| m[i][j].value));
    let det3 = |r: [usize; 3], c: [usize; 3]| -> f64 {
        v[r[0]][c[0]] * (v[r[1]][c[1]] * v[r[2]][c[2]] - v[r[1]][c[2]] * v[r[2]][c[1]])
            - v[r[0]][c[1]] * (v[r[1]][c[0]] * v[r[2]][c[2]] - v[r[1]][c[2]] * v[r[2]][c[0]])
            + v[r[0]][c[2]] * (v[r[1]][c[0]] * v[r[2]][c[1]] - v[r[1]][c[1]] * v[r[2]][c[0]])
    };
    let rows = [1, 2, 3];
    let mut det = 0.0;
    let mut sign = 1.0;
    for j in 0..DIM {
        let cols: [usize; 3] = match j {
            0 => [1, 2, 3],
            1 => [0, 2, 3],
            2 => [0, 1, 3],
            _ => [0, 1, 2],
        };
        det += sign * v[0][j] * det3(rows, cols);
        sign = -sign;
    }
    det
}

/// 4x4 inverse in jet arithmetic by Gauss-Jordan elimination with partial
/// pivoting on the value part. Propagates derivatives of the inverse to the
/// same order the entries carry.
pub fn invert4_jet(m: &[[Jet2; DIM]; DIM]) -> Result<[[Jet2; DIM]; DIM]> {
    let det = det4(m);
    if det.abs() < PIVOT_TOL {
        return Err(GeomError::SingularMetric { det });
    }
    let mut a = *m;
    let mut inv: [[Jet2; DIM]; DIM] =
        from_fn(|i| from_fn(|j| Jet2::constant(if i == j { 1.0 } else { 0.0 })));
    for col in 0..DIM {
        let pivot_row = (col..DIM)
            .max_by(|&r, &s| {
                a[r][col]
                    .value
                    .abs()
                    .partial_cmp(&a[s][col].value.abs())
                    .unwrap()
            })
            .unwrap();
        if a[pivot_row][col].value.abs() < PIVOT_TOL {
            return Err(GeomError::SingularMetric { det });
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col];
        for j in 0..DIM {
            a[col][j] = a[col][j] / pivot;
            inv[col][j] = inv[col][j] / pivot;
        }
        for r in 0..DIM {
            if r == col {
                continue;
            }
            let factor = a[r][col];
            for j in 0..DIM {
                a[r][j] = a[r][j] - factor * a[col][j];
                inv[r][j] = inv[r][j] - factor * inv[col][j];
            }
        }
    }
    Ok(inv)
}

/// Value-level 4x4 inverse, for frame matrices.
pub fn invert4(m: &[[f64; DIM]; DIM]) -> Result<[[f64; DIM]; DIM]> {
    let jets: [[Jet2; DIM]; DIM] = from_fn(|i| from_fn(|j| Jet2::constant(m[i][j])));
    let inv = invert4_jet(&jets).map_err(|_| GeomError::SingularFrame)?;
    Ok(from_fn(|i| from_fn(|j| inv[i][j].value)))
}

/// Reinterprets a jet as the jet of one of its own partial derivatives:
/// value = d_l f, gradient = the l-th Hessian row. Its Hessian slot would
/// need third derivatives and is set to zero; consumers must not read the
/// Hessian of anything built from it.
fn deriv_jet(f: &Jet2, l: usize) -> Jet2 {
    Jet2 {
        value: f.grad[l],
        grad: f.hess[l],
        hess: [[0.0; DIM]; DIM],
    }
}

/// Christoffel symbols Gamma^k_ij of the Levi-Civita connection at `p`,
/// carrying their own first derivatives: result[i][j][k] is the jet of
/// Gamma^k_ij with a valid value and gradient (the Hessian slot is not
/// meaningful).
///
/// The formula 2 Gamma^k_ij = g^{kl}(d_i g_jl + d_j g_il - d_l g_ij) is run
/// in jet arithmetic with each d_m g replaced by its derivative jet, so the
/// product rule yields d Gamma for free.
pub fn christoffel(g: &ChartMetric, p: [f64; DIM]) -> Result<[[[Jet2; DIM]; DIM]; DIM]> {
    let gm = g.eval(p)?;
    let ginv = invert4_jet(&gm)?;
    let mut out = [[[Jet2::ZERO; DIM]; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let mut acc = Jet2::ZERO;
                for l in 0..DIM {
                    let term = deriv_jet(&gm[j][l], i) + deriv_jet(&gm[i][l], j)
                        - deriv_jet(&gm[i][j], l);
                    acc = acc + ginv[k][l] * term;
                }
                out[i][j][k] = acc * 0.5;
            }
        }
    }
    Ok(out)
}

/// Covariant curvature tensor R_ijkd in coordinate components at `p`:
/// R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik
///         + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik,
/// lowered on the last index with the metric.
pub fn riemann_coord(g: &ChartMetric, p: [f64; DIM]) -> Result<[[[[f64; DIM]; DIM]; DIM]; DIM]> {
    let gm = g.eval(p)?;
    let gamma = christoffel(g, p)?;
    let mut upper = [[[[0.0; DIM]; DIM]; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    let mut r = gamma[j][k][l].grad[i] - gamma[i][k][l].grad[j];
                    for m in 0..DIM {
                        r += gamma[i][m][l].value * gamma[j][k][m].value
                            - gamma[j][m][l].value * gamma[i][k][m].value;
                    }
                    upper[i][j][k][l] = r;
                }
            }
        }
    }
    let mut lower = [[[[0.0; DIM]; DIM]; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for d in 0..DIM {
                    let mut r = 0.0;
                    for l in 0..DIM {
                        r += gm[d][l].value * upper[i][j][k][l];
                    }
                    lower[i][j][k][d] = r;
                }
            }
        }
    }
    Ok(lower)
}

/// Contracts a fully covariant rank-4 coordinate tensor into frame
/// components with the frame coefficient matrix.
pub fn to_frame4(
    t: &[[[[f64; DIM]; DIM]; DIM]; DIM],
    e: &[[f64; DIM]; DIM],
) -> [[[[f64; DIM]; DIM]; DIM]; DIM] {
    let mut out = [[[[0.0; DIM]; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    let mut acc = 0.0;
                    for i in 0..DIM {
                        for j in 0..DIM {
                            for k in 0..DIM {
                                for m in 0..DIM {
                                    acc += e[i][a] * e[j][b] * e[k][c] * e[m][d] * t[i][j][k][m];
                                }
                            }
                        }
                    }
                    out[a][b][c][d] = acc;
                }
            }
        }
    }
    out
}

/// Contracts a fully covariant rank-2 coordinate tensor into frame
/// components.
pub fn to_frame2(t: &[[f64; DIM]; DIM], e: &[[f64; DIM]; DIM]) -> [[f64; DIM]; DIM] {
    let mut out = [[0.0; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            let mut acc = 0.0;
            for i in 0..DIM {
                for j in 0..DIM {
                    acc += e[i][a] * e[j][b] * t[i][j];
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

/// Frame coefficients c^c_ab of the Lie brackets [e_a, e_b], returned as
/// result[a][b][c]; antisymmetric in (a, b).
pub fn frame_bracket(frame: &FrameField, p: [f64; DIM]) -> Result<[[[f64; DIM]; DIM]; DIM]> {
    let e = frame.eval(p)?;
    let ev: [[f64; DIM]; DIM] = from_fn(|i| from_fn(|a| e[i][a].value));
    let einv = invert4(&ev)?;
    let mut out = [[[0.0; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            let mut coord = [0.0; DIM];
            for i in 0..DIM {
                for j in 0..DIM {
                    coord[i] += ev[j][a] * e[i][b].grad[j] - ev[j][b] * e[i][a].grad[j];
                }
            }
            for c in 0..DIM {
                let mut acc = 0.0;
                for i in 0..DIM {
                    acc += einv[c][i] * coord[i];
                }
                out[a][b][c] = acc;
            }
        }
    }
    Ok(out)
}

/// Full geometric snapshot at `p`: connection, curvature, and brackets in
/// orthonormal-frame components. The frame connection comes from the
/// coordinate Christoffel symbols plus the chain-rule correction for the
/// point dependence of the frame:
/// Gamma^c_ab = (E^{-1})^c_k (E^i_a d_i E^k_b + E^i_a E^j_b Gamma^k_ij).
pub fn snapshot(g: &ChartMetric, frame: &FrameField, p: [f64; DIM]) -> Result<FrameSnapshot> {
    let e = frame.eval(p)?;
    let ev: [[f64; DIM]; DIM] = from_fn(|i| from_fn(|a| e[i][a].value));
    let einv = invert4(&ev)?;
    let gamma_coord = christoffel(g, p)?;

    let mut gamma = [[[0.0; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            let mut coord = [0.0; DIM];
            for k in 0..DIM {
                for i in 0..DIM {
                    coord[k] += ev[i][a] * e[k][b].grad[i];
                    for j in 0..DIM {
                        coord[k] += ev[i][a] * ev[j][b] * gamma_coord[i][j][k].value;
                    }
                }
            }
            for c in 0..DIM {
                let mut acc = 0.0;
                for k in 0..DIM {
                    acc += einv[c][k] * coord[k];
                }
                gamma[a][b][c] = acc;
            }
        }
    }

    let riemann = to_frame4(&riemann_coord(g, p)?, &ev);
    let brackets = frame_bracket(frame, p)?;

    Ok(FrameSnapshot {
        point: p,
        eps: frame.eps(),
        gamma,
        riemann,
        brackets,
    })
}
