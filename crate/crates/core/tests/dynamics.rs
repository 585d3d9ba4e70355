use edgelab::claims::ClaimRegistry;
use edgelab::equations::{EquationSpec, Kinetic};
use edgelab::field::Grid1D;
use edgelab::integrator::{evolve, IntegratorConfig};
use edgelab::observables::{
    continuity_series, pde_residual_window, peak_position, trajectory_residual, window_times, ContinuityOptions,
    ResidualOptions, TimeStencil,
};
use edgelab::solutions::{bright_soliton, chiral_soliton, extended_soliton, SolitonParams, TimeDomain};
use edgelab::transforms::{apply_conformal, gauge_backward, ConformalMapSpec, MapDefaults, MapRegistry, SolutionMap};
use proptest::prelude::*;

fn chiral() -> edgelab::solutions::ClosedFormSolution {
    chiral_soliton(SolitonParams::new(2.0, 1.0, 1.0).unwrap()).unwrap()
}

#[test]
fn ifrk4_and_rk4_agree_on_the_extended_soliton() {
    let g = Grid1D::default();
    let sol = extended_soliton(2.0, 1.0).unwrap();
    let psi0 = sol.sample(0.0, &g).unwrap();
    let run = |scheme: &str| {
        let cfg = IntegratorConfig::new(5e-4, 0.0, 0.25).with_scheme(scheme).with_record_every(1000);
        evolve(sol.solves(), &psi0, &cfg).unwrap()
    };
    let diff = run("ifrk4").last().max_abs_diff(run("rk4").last(), 0);
    assert!(diff <= 1e-8, "{diff}");
}

#[test]
fn chiral_soliton_peak_moves_at_its_velocity() {
    let g = Grid1D::default();
    let sol = chiral();
    let traj = evolve(sol.solves(), &sol.sample(0.0, &g).unwrap(), &IntegratorConfig::new(1e-3, 0.0, 1.0)).unwrap();
    let x0 = peak_position(&traj.fields[0]).unwrap();
    let x1 = peak_position(traj.last()).unwrap();
    assert!((x1 - x0 - 2.0).abs() < 1e-3, "{}", x1 - x0);
}

#[test]
fn recorded_trajectory_satisfies_its_equation_and_continuity() {
    let g = Grid1D::default();
    let sol = chiral();
    let cfg = IntegratorConfig::new(1e-3, 0.0, 0.02).with_record_every(1);
    let traj = evolve(sol.solves(), &sol.sample(0.0, &g).unwrap(), &cfg).unwrap();
    assert_eq!(traj.times.len(), 21);
    let r = trajectory_residual(&traj, &ResidualOptions::default()).unwrap();
    assert!(r.linf <= 1e-6, "{}", r.linf);

    let opts = ContinuityOptions {
        stencil: TimeStencil::Fourth,
        ..ContinuityOptions::for_equation(&traj.equation)
    };
    let worst = continuity_series(&traj.equation, &traj.fields, &opts)
        .unwrap()
        .into_iter()
        .flatten()
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn registry_gauge_matches_sampled_gauge() {
    let g = Grid1D::default();
    let sol = extended_soliton(2.0, 1.0).unwrap();
    let chain = MapRegistry::standard()
        .parse("gauge:k=1,dir=backward", &MapDefaults::default())
        .unwrap();
    let mapped = chain.apply(&sol, TimeDomain::new(0.0, 1.0).unwrap()).unwrap();
    assert_eq!(*mapped.solves(), EquationSpec::dnls2(1.0).unwrap());
    let pointwise = mapped.sample(0.5, &g).unwrap();
    let sampled = gauge_backward(&sol.sample(0.5, &g).unwrap(), 1.0).unwrap();
    assert!(pointwise.max_abs_diff(&sampled, 0) <= 1e-10);
}

#[test]
fn every_claim_passes() {
    let registry = ClaimRegistry::standard();
    for (name, _) in registry.names() {
        let outcome = registry.check(name).unwrap();
        assert!(outcome.pass, "{name}: {:?}", outcome.measurements);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dilated_bright_soliton_stays_a_solution(delta in 0.8f64..1.6, x0 in -3.0f64..3.0) {
        let bright = bright_soliton(Kinetic::One, 2.0, x0).unwrap();
        let spec = ConformalMapSpec::dilatation(delta).unwrap();
        let image = apply_conformal(&spec, &bright, TimeDomain::new(-1.0, 1.0).unwrap()).unwrap();
        let r = pde_residual_window(
            image.solves(),
            &image,
            &window_times(-0.5, 0.5, 3),
            &Grid1D::default(),
            &ResidualOptions::default(),
        )
        .unwrap();
        prop_assert!(r.linf <= 1e-7, "delta {delta}: {}", r.linf);
    }

    #[test]
    fn expansion_of_bright_soliton_stays_a_solution(k in -0.4f64..0.4) {
        let bright = bright_soliton(Kinetic::One, 2.0, 0.0).unwrap();
        let spec = ConformalMapSpec::expansion(k).unwrap();
        let image = apply_conformal(&spec, &bright, TimeDomain::new(-1.0, 1.0).unwrap()).unwrap();
        let r = pde_residual_window(
            image.solves(),
            &image,
            &window_times(-0.5, 0.5, 3),
            &Grid1D::default(),
            &ResidualOptions::default(),
        )
        .unwrap();
        prop_assert!(r.linf <= 1e-7, "k {k}: {}", r.linf);
    }
}
