//! Frozen-value regression pins: every catalog entry is evaluated at its
//! first default point and compared against independently computed numbers
//! hard-coded below. These literals never change; if a refactor moves any
//! of them the geometry kernels broke.

use hg4::catalog;
use hg4::invariants::{invariant_report, structural_tensors};
use hg4::runner::lookup_invariant;

fn check(id: &str, tol: f64, pins: &[(&str, f64)]) {
    let spec = catalog::build(id).unwrap();
    let p = spec.default_points[0];
    let snap = spec.snapshot_at(p).unwrap();
    let (label, triple) = &spec.h_triples().unwrap()[0];
    let report = invariant_report(&snap, triple, 1e-8).unwrap();
    let tensors = structural_tensors(&snap, triple).unwrap();
    for &(key, want) in pins {
        let got = lookup_invariant(key, &snap, &report, &tensors).unwrap();
        assert!(
            (got - want).abs() <= tol * want.abs().max(1.0),
            "{id} [{label}] {key}: got {got}, pinned {want}"
        );
    }
}

#[test]
fn engel_a_pins() {
    check(
        "engel_a",
        1e-9,
        &[
            ("norm_nablaJ.1", 0.0),
            ("norm_nablaJ.2", 0.0),
            ("norm_nablaJ.3", 0.0),
            ("norm_N.1", 8.0),
            ("norm_N.2", 0.0),
            ("norm_N.3", -8.0),
            ("norm_theta.1", -1.0),
            ("norm_theta.2", 0.0),
            ("norm_theta.3", 1.0),
            ("tau", 0.0),
            ("tau_star.1", -2.0),
            ("tau_star.2", 0.0),
            ("tau_star.3", 0.0),
            ("max_abs_R", 1.0),
            ("einstein_resid", 1.0),
            ("max_abs_N.1", 1.0),
            ("rho.11", 0.5),
            ("rho.22", 0.0),
            ("rho.33", 1.0),
            ("rho.44", -0.5),
            ("R.1221", 0.75),
            ("R.2332", 1.0),
            ("R.1331", 0.25),
            ("R.2142", -0.25),
            ("R.2442", -0.25),
            ("R.3143", -0.25),
            ("R.3443", 0.25),
        ],
    );
}

#[test]
fn engel_b_pins() {
    check(
        "engel_b",
        1e-9,
        &[
            ("norm_N.1", 0.0),
            ("norm_N.2", 8.0),
            ("norm_N.3", -8.0),
            ("norm_theta.1", 0.0),
            ("norm_theta.2", -1.0),
            ("norm_theta.3", 1.0),
            ("tau", 0.0),
            ("tau_star.1", 0.0),
            ("max_abs_R", 1.0),
            ("einstein_resid", 1.0),
            ("rho.11", 0.5),
            ("rho.22", 0.0),
            ("rho.33", -1.0),
            ("rho.44", -0.5),
            ("R.1221", -0.75),
            ("R.2332", 1.0),
            ("R.1331", -0.25),
            ("R.2142", -0.25),
            ("R.2442", 0.25),
            ("R.3143", -0.25),
            ("R.3443", -0.25),
        ],
    );
}

#[test]
fn semi_space_pins() {
    check(
        "semi_space",
        1e-9,
        &[
            ("norm_F.1", 8.0),
            ("norm_F.2", -16.0),
            ("norm_F.3", -16.0),
            ("norm_N.1", 0.0),
            ("norm_N.2", 0.0),
            ("norm_N.3", 0.0),
            ("norm_theta.1", 4.0),
            ("norm_theta.2", -16.0),
            ("norm_theta.3", -16.0),
            ("tau", -12.0),
            ("tau_star.1", 4.0),
            ("einstein_resid", 0.0),
            ("const_curv_k", -1.0),
            ("sectional.12", -1.0),
            ("sectional.34", -1.0),
            ("rho.11", -3.0),
            ("rho.22", -3.0),
            ("rho.33", 3.0),
            ("rho.44", 3.0),
            ("nu", -1.0),
            ("nu_star2", 0.0),
        ],
    );
}

#[test]
fn quarter_space_pins() {
    check(
        "quarter_space",
        1e-9,
        &[
            ("norm_nablaJ.1", 0.0),
            ("norm_N.1", 0.0),
            ("norm_theta.2", 0.0),
            ("tau", 0.0),
            ("max_abs_R", 1.0),
            ("einstein_resid", 1.0),
            ("max_abs_N.1", 0.0),
            ("max_abs_N.2", 1.0),
            ("max_abs_N.3", 1.0),
            ("rho.11", -1.0),
            ("rho.22", -1.0),
            ("rho.33", -1.0),
            ("rho.44", -1.0),
            ("R.1221", -1.0),
            ("R.3443", 1.0),
            ("sectional.12", -1.0),
            ("sectional.34", 1.0),
        ],
    );
}

#[test]
fn cylinder_pseudo_pins() {
    check(
        "cylinder_pseudo",
        1e-5,
        &[
            ("norm_F.1", -0.85420906813629),
            ("norm_F.2", 20.439195643597),
            ("norm_F.3", 19.584986575461),
            ("norm_nablaJ.1", -0.85420906813629),
            ("norm_N.1", -1.7084181362726),
            ("norm_N.2", -37.461555014649),
            ("norm_N.3", -23.169973150922),
            ("norm_theta.1", -0.21355226703407),
            ("norm_theta.2", 9.5369034449675),
            ("norm_theta.3", 6.8962466438652),
            ("tau", 6.0),
            ("tau_star.1", -2.0),
            ("tau_star.2", 0.0),
            ("tau_star.3", 0.0),
            ("max_abs_R", 1.0),
            ("einstein_resid", 1.5),
            ("max_abs_N.1", 0.46211715726001),
            ("max_abs_N.2", 2.1639534137387),
            ("max_abs_N.3", 1.7018362564786),
            ("rho.11", 0.0),
            ("rho.22", 2.0),
            ("rho.33", -2.0),
            ("rho.44", -2.0),
            ("R.2332", -1.0),
            ("R.2442", -1.0),
            ("R.3443", 1.0),
        ],
    );
}

#[test]
fn cx_cylinder_pins() {
    check(
        "cx_cylinder",
        1e-5,
        &[
            ("norm_F.1", 0.0),
            ("norm_F.2", 0.0),
            ("norm_F.3", 0.0),
            ("norm_N.1", 0.0),
            ("norm_N.2", 0.0),
            ("norm_N.3", 0.0),
            ("norm_theta.1", 0.0),
            ("tau", 0.0),
            ("max_abs_R", 0.0),
            ("einstein_resid", 0.0),
            ("nu", 0.0),
            ("nu_star2", 0.0),
            ("const_curv_k", 0.0),
        ],
    );
}

#[test]
fn cx_cone_pins() {
    check(
        "cx_cone",
        1e-5,
        &[
            ("norm_F.1", 0.0),
            ("norm_F.2", -9.9881093935791),
            ("norm_F.3", -9.9881093935791),
            ("norm_nablaJ.2", -9.9881093935791),
            ("norm_N.1", 0.0),
            ("norm_N.2", 0.0),
            ("norm_N.3", 0.0),
            ("norm_theta.1", 0.0),
            ("norm_theta.2", -4.9940546967895),
            ("norm_theta.3", -4.9940546967895),
            ("tau", 0.0),
            ("max_abs_R", 0.0),
            ("einstein_resid", 0.0),
            ("nu", 0.0),
            ("nu_star2", 0.0),
        ],
    );
}

#[test]
fn cx_sphere_pins() {
    check(
        "cx_sphere",
        1e-5,
        &[
            ("norm_F.1", -7.357429428218),
            ("norm_F.2", 0.0),
            ("norm_F.3", 7.357429428218),
            ("norm_nablaJ.1", -7.357429428218),
            ("norm_N.1", -14.714858856436),
            ("norm_N.2", 0.0),
            ("norm_N.3", -14.714858856436),
            ("norm_theta.1", -1.8393573570545),
            ("norm_theta.2", 0.0),
            ("norm_theta.3", 1.8393573570545),
            ("tau", 8.0),
            ("tau_star.1", 0.0),
            ("tau_star.2", 0.0),
            ("tau_star.3", 0.0),
            ("max_abs_R", 1.0),
            ("einstein_resid", 0.0),
            ("max_abs_N.1", 1.3962430310854),
            ("max_abs_N.3", 1.3962430310854),
            ("rho.11", 2.0),
            ("rho.22", 2.0),
            ("rho.33", -2.0),
            ("rho.44", -2.0),
            ("R.1221", 1.0),
            ("R.2332", -1.0),
            ("R.3443", 1.0),
            ("nu", 1.0),
            ("nu_star2", 0.0),
        ],
    );
}

#[test]
fn lie_a_pins() {
    check(
        "lie_a",
        1e-9,
        &[
            ("norm_F.1", -4.0),
            ("norm_F.2", 8.0),
            ("norm_F.3", 12.0),
            ("norm_nablaJ.1", -4.0),
            ("norm_nablaJ.2", 8.0),
            ("norm_nablaJ.3", 12.0),
            ("norm_N.1", -8.0),
            ("norm_N.2", 0.0),
            ("norm_N.3", -8.0),
            ("norm_theta.1", -1.0),
            ("norm_theta.2", 4.0),
            ("norm_theta.3", 1.0),
            ("tau", 2.0),
            ("tau_star.1", -2.0),
            ("tau_star.2", 0.0),
            ("tau_star.3", 0.0),
            ("max_abs_R", 1.0),
            ("R.1221", 1.0),
            ("R.1331", 1.0),
            ("R.2332", -1.0),
            ("rho.11", 0.0),
            ("rho.22", 2.0),
            ("rho.33", 0.0),
            ("rho.44", 0.0),
        ],
    );
}

#[test]
fn lie_b_pins() {
    check(
        "lie_b",
        1e-9,
        &[
            ("norm_F.1", 0.0),
            ("norm_F.2", 4.0),
            ("norm_F.3", 4.0),
            ("norm_N.1", 0.0),
            ("norm_N.2", -8.0),
            ("norm_N.3", -8.0),
            ("norm_theta.1", 0.0),
            ("norm_theta.2", 1.0),
            ("norm_theta.3", 1.0),
            ("tau", 0.0),
            ("max_abs_R", 0.0),
            ("einstein_resid", 0.0),
            ("const_curv_k", 0.0),
        ],
    );
}
