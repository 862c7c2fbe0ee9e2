use crate::chart::{invert4, FrameSnapshot};
use crate::error::{GeomError, Result};
use crate::jet::DIM;

/// Residual above which a commutator is rejected as lying outside the span
/// of the generators.
const CLOSURE_TOL: f64 = 1e-10;

/// Four matrix generators of a Lie algebra together with a left-invariant
/// inner product making them orthonormal: g(X_a, X_b) = eps_a delta_ab.
/// The whole geometry of the associated Lie group is computed from this data
/// alone; no coordinates on the group are ever constructed.
#[derive(Clone, Debug)]
pub struct LieAlgebraBasis {
    generators: [Vec<Vec<f64>>; DIM],
    eps: [f64; DIM],
}

/// Coefficients of the commutators in the basis: [X_a, X_b] = c^d_ab X_d,
/// stored as c[a][b][d].
#[derive(Clone, Debug)]
pub struct StructureConstants {
    pub c: [[[f64; DIM]; DIM]; DIM],
}

impl LieAlgebraBasis {
    pub fn new(generators: [Vec<Vec<f64>>; DIM], eps: [f64; DIM]) -> Result<LieAlgebraBasis> {
        let n = generators[0].len();
        for m in &generators {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(GeomError::ValidationError(
                    "generators must be square matrices of one common size".into(),
                ));
            }
        }
        if eps.iter().any(|e| e.abs() != 1.0) {
            return Err(GeomError::ValidationError(
                "frame signature entries must be +1 or -1".into(),
            ));
        }
        Ok(LieAlgebraBasis { generators, eps })
    }

    pub fn eps(&self) -> [f64; DIM] {
        self.eps
    }

    pub fn generators(&self) -> &[Vec<Vec<f64>>; DIM] {
        &self.generators
    }
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn commutator(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let ab = mat_mul(a, b);
    let ba = mat_mul(b, a);
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = ab[i][j] - ba[i][j];
        }
    }
    out
}

fn frob_dot(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x * y).sum::<f64>())
        .sum()
}

impl StructureConstants {
    /// Largest violation of the Jacobi identity
    /// sum_cyclic(a,b,c) c^e_ab c^f_ec = 0.
    pub fn jacobi_residual(&self) -> f64 {
        let c = &self.c;
        let mut worst = 0.0f64;
        for a in 0..DIM {
            for b in 0..DIM {
                for d in 0..DIM {
                    for f in 0..DIM {
                        let mut acc = 0.0;
                        for e in 0..DIM {
                            acc += c[a][b][e] * c[e][d][f]
                                + c[b][d][e] * c[e][a][f]
                                + c[d][a][e] * c[e][b][f];
                        }
                        worst = worst.max(acc.abs());
                    }
                }
            }
        }
        worst
    }
}

/// Expands every commutator of the basis in the generators by least squares
/// (Gram matrix in the Frobenius inner product) and checks the expansion is
/// exact.
pub fn structure_constants(basis: &LieAlgebraBasis) -> Result<StructureConstants> {
    let gens = basis.generators();
    let gram: [[f64; DIM]; DIM] =
        std::array::from_fn(|d| std::array::from_fn(|e| frob_dot(&gens[d], &gens[e])));
    let gram_inv = invert4(&gram).map_err(|_| {
        GeomError::ValidationError("generators are linearly dependent".into())
    })?;

    let mut c = [[[0.0; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            let k = commutator(&gens[a], &gens[b]);
            let rhs: [f64; DIM] = std::array::from_fn(|d| frob_dot(&gens[d], &k));
            let coeffs: [f64; DIM] = std::array::from_fn(|d| {
                (0..DIM).map(|e| gram_inv[d][e] * rhs[e]).sum()
            });
            let n = k.len();
            let mut residual = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let mut fit = 0.0;
                    for d in 0..DIM {
                        fit += coeffs[d] * gens[d][i][j];
                    }
                    residual += (k[i][j] - fit).powi(2);
                }
            }
            let residual = residual.sqrt();
            if residual > CLOSURE_TOL {
                return Err(GeomError::NotClosed { residual });
            }
            c[a][b] = coeffs;
        }
    }
    Ok(StructureConstants { c })
}

/// Levi-Civita connection of the left-invariant metric, from the Koszul
/// formula on constants:
/// 2 g(nabla_{X_a} X_b, X_c)
///   = g([X_a,X_b],X_c) - g([X_b,X_c],X_a) + g([X_c,X_a],X_b).
/// Returns Gamma^c_ab as gamma[a][b][c].
pub fn koszul_connection(
    sc: &StructureConstants,
    eps: [f64; DIM],
) -> [[[f64; DIM]; DIM]; DIM] {
    let low = |a: usize, b: usize, c: usize| sc.c[a][b][c] * eps[c];
    let mut gamma = [[[0.0; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                let lowered = 0.5 * (low(a, b, c) - low(b, c, a) + low(c, a, b));
                gamma[a][b][c] = eps[c] * lowered;
            }
        }
    }
    gamma
}

/// Covariant curvature R_abcd of a left-invariant connection. Derivative
/// terms vanish on constants, leaving
/// R(X_a,X_b) = nabla_a nabla_b - nabla_b nabla_a - nabla_{[X_a,X_b]}:
/// R^e_abc = Gamma^d_bc Gamma^e_ad - Gamma^d_ac Gamma^e_bd
///         - c^d_ab Gamma^e_dc, lowered on the last index.
pub fn curvature_homogeneous(
    gamma: &[[[f64; DIM]; DIM]; DIM],
    sc: &StructureConstants,
    eps: [f64; DIM],
) -> [[[[f64; DIM]; DIM]; DIM]; DIM] {
    let mut r = [[[[0.0; DIM]; DIM]; DIM]; DIM];
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for e in 0..DIM {
                    let mut acc = 0.0;
                    for d in 0..DIM {
                        acc += gamma[b][c][d] * gamma[a][d][e]
                            - gamma[a][c][d] * gamma[b][d][e]
                            - sc.c[a][b][d] * gamma[d][c][e];
                    }
                    r[a][b][c][e] = acc * eps[e];
                }
            }
        }
    }
    r
}

/// Full snapshot of the left-invariant geometry; the point slot is the group
/// identity, recorded as the origin. Downstream consumers treat this exactly
/// like a chart snapshot.
pub fn snapshot_homogeneous(basis: &LieAlgebraBasis) -> Result<FrameSnapshot> {
    let sc = structure_constants(basis)?;
    let jr = sc.jacobi_residual();
    if jr > 1e-12 {
        return Err(GeomError::ValidationError(format!(
            "Jacobi identity violated (residual {jr:.3e})"
        )));
    }
    let eps = basis.eps();
    let gamma = koszul_connection(&sc, eps);
    let riemann = curvature_homogeneous(&gamma, &sc, eps);
    Ok(FrameSnapshot {
        point: [0.0; DIM],
        eps,
        gamma,
        riemann,
        brackets: sc.c,
    })
}
