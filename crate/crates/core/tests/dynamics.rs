use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use qar_core::holo::{coherent_state, inner_product, BargmannPoint};
use qar_core::lindblad::{
    entropy_production, evolve, log_floored, numeric_report, steady_state, DensityMatrix, Liouvillian,
    RefrigeratorModel, RefrigeratorParams, DEFAULT_HILBERT_CAP,
};
use qar_core::transform::{
    husimi_q, to_holo_state, to_holo_state_via_transform, Grid, QNormalization, SampledWavefunction,
};
use qar_core::Error;

fn params() -> RefrigeratorParams {
    RefrigeratorParams {
        omega_h: 2.0,
        omega_c: 1.0,
        temp_h: 1.5,
        temp_c: 1.0,
        gamma_h: 0.4,
        gamma_c: 0.3,
        eta: 0.1,
        cutoff_h: 6,
        cutoff_c: 8,
    }
}

#[test]
fn entropy_production_matches_exact_trace_formula() {
    let p = params();
    let model = RefrigeratorModel::new(&p).unwrap();
    let l = model.liouvillian(DEFAULT_HILBERT_CAP).unwrap();
    let ss = steady_state(&l).unwrap();
    let rho = DensityMatrix::thermal_product(&p.cutoffs(), &[0.05, 0.9]).unwrap();
    // sigma = -Tr[L(rho) (ln rho - ln rho_ss)]
    let lrho = model.generator.apply(rho.matrix()).unwrap();
    let exact = -(lrho * (log_floored(rho.matrix()) - log_floored(ss.rho.matrix()))).trace().re;
    let sigma = entropy_production(&l, &rho, &ss.rho).unwrap();
    assert!(exact > 0.0);
    assert_abs_diff_eq!(sigma, exact, epsilon = 1e-8 * exact.max(1.0));
}

#[test]
fn evolution_relaxes_to_steady_state() {
    let p = params();
    let model = RefrigeratorModel::new(&p).unwrap();
    let l = model.liouvillian(DEFAULT_HILBERT_CAP).unwrap();
    let ss = steady_state(&l).unwrap();
    let start = DensityMatrix::thermal_product(&p.cutoffs(), &[0.01, 0.01]).unwrap();
    let gamma = p.gamma_h.min(p.gamma_c);
    let out = evolve(&start, &l, 40.0 / gamma, 0.5 / l.norm_one()).unwrap();
    assert_abs_diff_eq!(out.trace(), 1.0, epsilon = 1e-8);
    let nc_t = out.expectation(&model.n_c).re;
    let nc_ss = ss.rho.expectation(&model.n_c).re;
    assert_abs_diff_eq!(nc_t, nc_ss, epsilon = 1e-4);
}

#[test]
fn uncoupled_baths_without_dissipation_are_degenerate() {
    let mut p = params();
    p.cutoff_h = 3;
    p.cutoff_c = 3;
    let mut model = RefrigeratorModel::new(&p).unwrap();
    // keep only the noise channel: total excitation number is conserved
    let jumps = model.generator.jumps().iter().skip(4).cloned().collect();
    model.generator = qar_core::LindbladGenerator::new(p.cutoffs().to_vec(), model.h0.clone(), jumps).unwrap();
    let err = steady_state(&Liouvillian::build(&model.generator).unwrap()).unwrap_err();
    assert!(matches!(err, Error::DegenerateSteadyState(_)));
}

#[test]
fn hilbert_cap_is_reported() {
    let mut p = params();
    p.cutoff_h = 40;
    p.cutoff_c = 40;
    assert!(matches!(numeric_report(&p, DEFAULT_HILBERT_CAP), Err(Error::DimensionCap { dim: 1681, cap: 512 })));
}

#[test]
fn transform_routes_agree_for_displaced_gaussian() {
    let grid = Grid::default();
    // ground state displaced by x0, phase-kicked by k0
    let (x0, k0) = (0.8f64, -0.5f64);
    let f = SampledWavefunction::from_fn(grid, |x| {
        Complex64::from_polar(std::f64::consts::PI.powf(-0.25) * (-0.5 * (x - x0).powi(2)).exp(), k0 * x)
    });
    let a = to_holo_state(&f, 30).unwrap();
    let b = to_holo_state_via_transform(&f, 30).unwrap();
    let diff = a.add_scaled(&b, Complex64::new(-1.0, 0.0)).unwrap();
    assert!(diff.norm_sqr().sqrt() < 1e-9);
    // it is a coherent state with alpha = (x0 + i k0)/sqrt(2)
    let alpha = Complex64::new(x0, k0) / 2f64.sqrt();
    let overlap = inner_product(&coherent_state(alpha, 30).unwrap(), &a).unwrap();
    assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-9);
}

#[test]
fn coherent_husimi_peaks_at_alpha() {
    let alpha = Complex64::new(0.7, -0.4);
    let s = coherent_state(alpha, 30).unwrap();
    let at = |z: Complex64| husimi_q(&s, &BargmannPoint::single(z), QNormalization::Standard).unwrap();
    let peak = at(alpha);
    assert_abs_diff_eq!(peak, 1.0 / std::f64::consts::PI, epsilon = 1e-10);
    for dz in [Complex64::new(0.05, 0.0), Complex64::new(0.0, -0.05), Complex64::new(-0.03, 0.04)] {
        assert!(at(alpha + dz) < peak);
    }
}
