use crate::error::{GeomError, Result};
use crate::jet::DIM;

/// Tolerance for the algebraic identities of the triple; the catalog
/// matrices are signed permutations, so violations are exactly zero.
const ALGEBRA_TOL: f64 = 1e-12;

type Mat = [[f64; DIM]; DIM];

/// Anticommuting triple of almost complex structures with J3 = J1 J2,
/// stored as matrices acting on frame components by column action:
/// column a of J_alpha is the image of e_a.
#[derive(Clone, Debug, PartialEq)]
pub struct HTriple {
    j: [Mat; 3],
}

/// The three fundamental bilinear forms of the triple with respect to
/// g = diag(eps): phi = g(J1 ., .), g2 = g(J2 ., .), g3 = g(J3 ., .).
/// phi is the Kähler form (antisymmetric); g2 and g3 are symmetric.
#[derive(Clone, Debug)]
pub struct StructureForms {
    pub phi: Mat,
    pub g2: Mat,
    pub g3: Mat,
}

/// Per-structure residuals of the metric compatibility identities.
#[derive(Clone, Debug)]
pub struct CompatibilityReport {
    /// violation[alpha-1]: max entry deviation of J_alpha^T g J_alpha from
    /// +g (alpha = 1) or -g (alpha = 2, 3).
    pub violation: [f64; 3],
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            let mut acc = 0.0;
            for k in 0..DIM {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..DIM {
        for j in 0..DIM {
            worst = worst.max((a[i][j] - b[i][j]).abs());
        }
    }
    worst
}

fn identity() -> Mat {
    let mut m = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        m[i][i] = 1.0;
    }
    m
}

fn neg(a: &Mat) -> Mat {
    a.map(|row| row.map(|x| -x))
}

impl HTriple {
    /// Builds the triple from its first two members; J3 is their composite.
    /// Rejects inputs that are not anticommuting almost complex structures.
    pub fn new(j1: Mat, j2: Mat) -> Result<HTriple> {
        let j3 = mat_mul(&j1, &j2);
        let h = HTriple { j: [j1, j2, j3] };
        let r = h.quaternionic_residual();
        if r > ALGEBRA_TOL {
            return Err(GeomError::ValidationError(format!(
                "quaternionic identities violated (residual {r:.3e})"
            )));
        }
        Ok(h)
    }

    /// Concise constructor from signed images: entry a of each list is
    /// (target, sign) with J e_a = sign * e_target, 0-indexed.
    pub fn from_signed_images(
        j1: [(usize, f64); DIM],
        j2: [(usize, f64); DIM],
    ) -> Result<HTriple> {
        let build = |images: [(usize, f64); DIM]| -> Mat {
            let mut m = [[0.0; DIM]; DIM];
            for (a, &(target, sign)) in images.iter().enumerate() {
                m[target][a] = sign;
            }
            m
        };
        HTriple::new(build(j1), build(j2))
    }

    pub fn j(&self, alpha: usize) -> &Mat {
        &self.j[alpha - 1]
    }

    pub fn matrices(&self) -> &[Mat; 3] {
        &self.j
    }

    /// Image of e_a (0-indexed) under J_alpha, as frame components.
    pub fn apply(&self, alpha: usize, v: [f64; DIM]) -> [f64; DIM] {
        let m = self.j(alpha);
        std::array::from_fn(|i| (0..DIM).map(|a| m[i][a] * v[a]).sum())
    }

    /// Max violation over J_alpha^2 = -I, the anticommutation relations,
    /// and the cyclic products J3 = J1J2, J2 = J3J1, J1 = J2J3.
    pub fn quaternionic_residual(&self) -> f64 {
        let [j1, j2, j3] = &self.j;
        let minus_id = neg(&identity());
        let mut worst = 0.0f64;
        for ja in &self.j {
            worst = worst.max(max_abs_diff(&mat_mul(ja, ja), &minus_id));
        }
        worst = worst.max(max_abs_diff(&mat_mul(j1, j2), &neg(&mat_mul(j2, j1))));
        worst = worst.max(max_abs_diff(&mat_mul(j2, j3), &neg(&mat_mul(j3, j2))));
        worst = worst.max(max_abs_diff(&mat_mul(j1, j2), j3));
        worst = worst.max(max_abs_diff(&mat_mul(j3, j1), j2));
        worst = worst.max(max_abs_diff(&mat_mul(j2, j3), j1));
        worst
    }
}

/// The reference triple on components (x, y, u, v):
/// J1 (x,y,u,v) = (-y, x, v, -u),
/// J2 (x,y,u,v) = (-u, -v, x, y),
/// J3 (x,y,u,v) = (v, -u, y, -x).
pub fn standard_h() -> HTriple {
    HTriple::from_signed_images(
        [(1, 1.0), (0, -1.0), (3, -1.0), (2, 1.0)],
        [(2, 1.0), (3, 1.0), (0, -1.0), (1, -1.0)],
    )
    .expect("reference triple satisfies the quaternionic identities")
}

/// Checks the metric compatibility pattern against g = diag(eps):
/// J1 is an isometry of g, J2 and J3 are anti-isometries.
pub fn verify_compatibility(h: &HTriple, eps: [f64; DIM]) -> Result<CompatibilityReport> {
    let mut violation = [0.0f64; 3];
    for alpha in 1..=3 {
        let j = h.j(alpha);
        let sign = if alpha == 1 { 1.0 } else { -1.0 };
        let mut worst = 0.0f64;
        for a in 0..DIM {
            for b in 0..DIM {
                let mut dot = 0.0;
                for i in 0..DIM {
                    dot += eps[i] * j[i][a] * j[i][b];
                }
                let expect = if a == b { sign * eps[a] } else { 0.0 };
                worst = worst.max((dot - expect).abs());
            }
        }
        violation[alpha - 1] = worst;
    }
    for alpha in 1..=3 {
        if violation[alpha - 1] > 1e-10 {
            return Err(GeomError::IncompatibleStructure {
                alpha,
                magnitude: violation[alpha - 1],
            });
        }
    }
    Ok(CompatibilityReport { violation })
}

/// The Kähler form and the two associated symmetric forms; with g = diag(eps)
/// the matrix of g(J ., .) is entry (a,b) = eps_b J[b][a].
pub fn fundamental_forms(h: &HTriple, eps: [f64; DIM]) -> Result<StructureForms> {
    let form = |alpha: usize| -> Mat {
        let j = h.j(alpha);
        std::array::from_fn(|a| std::array::from_fn(|b| eps[b] * j[b][a]))
    };
    let phi = form(1);
    let g2 = form(2);
    let g3 = form(3);
    let mut worst = 0.0f64;
    for a in 0..DIM {
        for b in 0..DIM {
            worst = worst.max((phi[a][b] + phi[b][a]).abs());
            worst = worst.max((g2[a][b] - g2[b][a]).abs());
            worst = worst.max((g3[a][b] - g3[b][a]).abs());
        }
    }
    if worst > ALGEBRA_TOL {
        return Err(GeomError::ValidationError(format!(
            "fundamental forms have wrong symmetry type (residual {worst:.3e}); \
             structure incompatible with the metric signature"
        )));
    }
    Ok(StructureForms { phi, g2, g3 })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

    #[test]
    fn reference_triple_images() {
        let h = standard_h();
        assert_eq!(h.apply(1, [1.0, 0.0, 0.0, 0.0]), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(h.apply(2, [1.0, 0.0, 0.0, 0.0]), [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(h.apply(1, [0.0, 0.0, 1.0, 0.0]), [0.0, 0.0, 0.0, -1.0]);
        assert_eq!(h.apply(3, [1.0, 0.0, 0.0, 0.0]), [0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn quaternionic_identities_exact() {
        assert_eq!(standard_h().quaternionic_residual(), 0.0);
    }

    #[test]
    fn composite_is_product() {
        let h = standard_h();
        let prod = mat_mul(h.j(1), h.j(2));
        assert_eq!(&prod, h.j(3));
    }

    #[test]
    fn squares_are_minus_identity() {
        let h = standard_h();
        for alpha in 1..=3 {
            let sq = mat_mul(h.j(alpha), h.j(alpha));
            assert_eq!(sq, neg(&identity()));
        }
    }

    #[test]
    fn compatibility_with_neutral_signature() {
        let report = verify_compatibility(&standard_h(), EPS).unwrap();
        assert_eq!(report.violation, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn definite_signature_is_rejected() {
        let err = verify_compatibility(&standard_h(), [1.0; 4]).unwrap_err();
        match err {
            GeomError::IncompatibleStructure { alpha, magnitude } => {
                assert_eq!(alpha, 2);
                assert_eq!(magnitude, 2.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn kaehler_form_entries() {
        let forms = fundamental_forms(&standard_h(), EPS).unwrap();
        assert_eq!(forms.phi[0][1], 1.0);
        assert_eq!(forms.phi[1][0], -1.0);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(forms.phi[a][b], -forms.phi[b][a]);
                assert_eq!(forms.g2[a][b], forms.g2[b][a]);
                assert_eq!(forms.g3[a][b], forms.g3[b][a]);
            }
        }
    }

    #[test]
    fn g3_matches_composite_form() {
        let h = standard_h();
        let forms = fundamental_forms(&h, EPS).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let image = h.apply(3, std::array::from_fn(|i| (i == a) as u8 as f64));
                let dot: f64 = (0..4).map(|i| EPS[i] * image[i] * ((i == b) as u8 as f64)).sum();
                assert_eq!(forms.g3[a][b], dot);
            }
        }
    }

    #[test]
    fn non_anticommuting_pair_is_rejected() {
        let h = standard_h();
        assert!(HTriple::new(*h.j(1), *h.j(1)).is_err());
    }
}
