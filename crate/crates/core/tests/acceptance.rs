//! Acceptance checks, one line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use edgelab::equations::{covariant_current, current, DnlsCoefficients, EquationSpec, Kinetic};
use edgelab::field::{ComplexField, Grid1D};
use edgelab::integrability::{clarkson_cosgrove, CC_DEFAULT_TOL};
use edgelab::integrator::{convergence_order_with, evolve, IntegratorConfig};
use edgelab::observables::{
    density_ode_residual, field_sequence_residual, pde_residual, pde_residual_window, residual_convergence,
    window_times, ResidualOptions,
};
use edgelab::solutions::{
    chiral_soliton, extended_soliton, gaussian_free_packet, standing_soliton, time_dependent_soliton, SolitonParams,
    TimeDomain,
};
use edgelab::transforms::{
    apply_accelerated_frame, apply_conformal, apply_niederer, gauge_backward, gauge_forward, ConformalMapSpec,
};
use edgelab::{Complex64, Error, Result};
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn chiral() -> Result<edgelab::solutions::ClosedFormSolution> {
    chiral_soliton(SolitonParams::new(2.0, 1.0, 1.0)?)
}

fn chiral_residual() -> Result<Outcome> {
    let g = Grid1D::default();
    let sol = chiral()?;
    let eq = EquationSpec::current(1.0)?;
    let worst = [0.0, 0.7, 3.1]
        .iter()
        .map(|&t| pde_residual(&eq, &sol, t, &g).map(|r| r.linf))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    outcome(worst <= 1e-8, format!("max residual {worst:.2e} (gate 1e-8)"))
}

fn soliton_propagation() -> Result<Outcome> {
    let g = Grid1D::default();
    let sol = chiral()?;
    let cfg = IntegratorConfig::new(1e-3, 0.0, 5.0).with_record_every(500);
    let traj = evolve(sol.solves(), &sol.sample(0.0, &g)?, &cfg)?;
    let err = traj.last().max_abs_diff(&sol.sample(5.0, &g)?, 0);
    let drift = traj.mass_drift();
    outcome(
        err <= 1e-6 && drift <= 1e-9,
        format!("L∞ error {err:.2e} (gate 1e-6), mass drift {drift:.2e} (gate 1e-9)"),
    )
}

fn lens_identity() -> Result<Outcome> {
    let standing = standing_soliton(0.0)?;
    let window = TimeDomain::new(0.5, 3.0)?;
    let d = apply_conformal(&ConformalMapSpec::Lens, &standing, window)?;
    let lens = time_dependent_soliton(0.0)?;
    let comp = ConformalMapSpec::composite(vec![
        ConformalMapSpec::time_translation(1.0)?,
        ConformalMapSpec::expansion(1.0)?,
        ConformalMapSpec::time_translation(1.0)?,
    ]);
    let c = apply_conformal(&comp, &standing, window)?;
    let (mut e_lens, mut e_comp) = (0.0f64, 0.0f64);
    let g = Grid1D::default();
    for t in window_times(1.0, 2.0, 21) {
        for x in g.coords() {
            let dv = d.eval(t, x)?;
            e_lens = e_lens.max((dv - lens.eval(t, x)?).norm());
            e_comp = e_comp.max((c.eval(t, x)? - dv).norm());
        }
    }
    outcome(
        e_lens <= 1e-12 && e_comp <= 1e-10,
        format!("D vs lens soliton {e_lens:.2e} (gate 1e-12), composite vs D {e_comp:.2e} (gate 1e-10)"),
    )
}

fn time_dependent() -> Result<Outcome> {
    let eq = EquationSpec::variable_coeff(0.0, 1.0)?;
    let sol = time_dependent_soliton(0.0)?;
    let opts = ResidualOptions::default();
    let short = pde_residual_window(&eq, &sol, &window_times(1.0, 1.6, 7), &Grid1D::default(), &opts)?;
    let wide = pde_residual_window(&eq, &sol, &window_times(1.0, 2.0, 11), &Grid1D::new(80.0, 2048)?, &opts)?;
    outcome(
        short.linf <= 1e-7 && wide.linf <= 1e-7,
        format!(
            "max residual {:.2e} on [1, 1.6] (L=40, N=1024), {:.2e} on [1, 2] (L=80, N=2048) (gate 1e-7)",
            short.linf, wide.linf
        ),
    )
}

fn extended() -> Result<Outcome> {
    let g = Grid1D::default();
    let sol = extended_soliton(2.0, 1.0)?;
    let eq = EquationSpec::extended_current(1.0)?;
    let r = pde_residual_window(&eq, &sol, &window_times(0.0, 1.0, 6), &g, &ResidualOptions::default())?;
    let ode = density_ode_residual(2.0, 1.0, &sol.sample(0.0, &g)?.density())?;
    outcome(
        r.linf <= 1e-7 && ode <= 1e-10,
        format!("residual {:.2e} (gate 1e-7), density ODE relative {ode:.2e} (gate 1e-10)", r.linf),
    )
}

fn clarkson_cosgrove_table() -> Result<Outcome> {
    let cc = |a: f64, b: f64, c: f64| -> Result<bool> {
        Ok(clarkson_cosgrove(DnlsCoefficients::new(a, b, c)?, CC_DEFAULT_TOL).integrable)
    };
    let table = !cc(-1.0, 1.0, 0.0)? && cc(-1.0, 1.0, 1.5)?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let mut consistent = 0;
    for _ in 0..100 {
        let l: f64 = rng.gen_range(0.01..100.0);
        let ok = !cc(-l, l, 0.0)? && cc(-l, l, 1.5 * l * l)?;
        consistent += ok as usize;
    }
    outcome(
        table && consistent == 100,
        format!("table {}, scale-consistent for {consistent}/100 random lambda", if table { "ok" } else { "wrong" }),
    )
}

fn gauge_chain() -> Result<Outcome> {
    let g = Grid1D::default();
    let kappa = 1.0;
    let sol = extended_soliton(2.0, kappa)?;
    let phi = sol.sample(0.4, &g)?;
    let round = gauge_backward(&gauge_forward(&phi, kappa)?, kappa)?.max_abs_diff(&phi, 0);

    let samples = window_times(0.0, 1.0, 1001)
        .into_iter()
        .map(|t| gauge_backward(&sol.sample(t, &g)?, kappa))
        .collect::<Result<Vec<_>>>()?;
    let dnls2 = field_sequence_residual(&EquationSpec::dnls2(kappa)?, &samples, true, &ResidualOptions::default())?;

    let psi = ComplexField::from_fn(g, 0.0, |x| {
        Complex64::new((-(x - 1.0).powi(2) / 3.0).exp(), 0.6 * (-(x + 2.0).powi(2) / 2.0).exp())
            * Complex64::new(0.0, 0.4 * x).exp()
    })?;
    let compat = current(&gauge_forward(&psi, kappa)?)?.max_abs_diff(&covariant_current(&psi, kappa)?, 4);
    outcome(
        round <= 1e-12 && dnls2.linf <= 1e-5 && compat <= 1e-10,
        format!(
            "round trip {round:.2e} (gate 1e-12), Dnls2 interior residual {:.2e} (gate 1e-5), current compatibility {compat:.2e} (gate 1e-10)",
            dnls2.linf
        ),
    )
}

fn frame_maps() -> Result<Outcome> {
    let g = Grid1D::default();
    let packet = gaussian_free_packet(Kinetic::One);
    let accel = apply_accelerated_frame(&packet, 0.25)?;
    let ra = pde_residual_window(
        &EquationSpec::linear_potential(0.25, 0.0)?,
        &accel,
        &window_times(0.0, 1.0, 11),
        &g,
        &ResidualOptions::default(),
    )?;
    let nied = apply_niederer(&packet, 1.0)?;
    let rn = pde_residual_window(
        &EquationSpec::oscillator(1.0, 0.0)?,
        &nied,
        &window_times(0.0, 1.2, 13),
        &g,
        &ResidualOptions::default(),
    )?;
    outcome(
        ra.linf <= 1e-6 && rn.linf <= 1e-6,
        format!("accelerated {:.2e}, Niederer {:.2e} (gates 1e-6)", ra.linf, rn.linf),
    )
}

fn chirality() -> Result<Outcome> {
    let refused = matches!(SolitonParams::new(-2.0, 1.0, 1.0), Err(Error::ChiralityViolation(_)))
        && matches!(SolitonParams::new(0.0, -1.0, 1.0), Err(Error::ChiralityViolation(_)));
    let g = Grid1D::new(160.0, 4096)?;
    let (v, omega, kappa) = (-2.0f64, 1.0, 1.0f64);
    let alpha = (v * v - 2.0 * omega).sqrt();
    let amp = alpha / (2.0 * kappa * kappa * v.abs()).sqrt();
    let profile = |x: f64| amp / (alpha * x).cosh();
    let psi0 = ComplexField::from_fn(g, 0.0, |x| Complex64::new(0.0, v * x).exp() * profile(x))?;
    let t1 = 5.0;
    let traj = evolve(
        &EquationSpec::current(kappa)?,
        &psi0,
        &IntegratorConfig::new(1e-3, 0.0, t1).with_record_every(5000),
    )?;
    let deviation = traj
        .last()
        .values()
        .iter()
        .zip(g.coords())
        .map(|(z, x)| (z.norm() - profile(x - v * t1)).abs())
        .fold(0.0, f64::max);
    outcome(
        refused && deviation > 1e-2,
        format!(
            "v <= 0 {}, v = -2 deviation from rigid translation {deviation:.2e} (needs > 1e-2)",
            if refused { "refused" } else { "accepted" }
        ),
    )
}

fn negative_control() -> Result<Outcome> {
    let g = Grid1D::default();
    let r = pde_residual(
        &EquationSpec::current(1.0)?,
        &gaussian_free_packet(Kinetic::Half),
        0.7,
        &g,
    )?;
    outcome(r.linf > 1e-1, format!("Gaussian vs current-coupled NLS {:.2e} (needs > 1e-1)", r.linf))
}

fn convergence() -> Result<Outcome> {
    let g = Grid1D::default();
    let standing = standing_soliton(0.0)?;
    let ext = extended_soliton(2.0, 1.0)?;
    let cfg = IntegratorConfig::new(0.05, 0.0, 1.0);
    let cubic = convergence_order_with(standing.solves(), &standing.sample(0.0, &g)?, &cfg)?;
    let extd = convergence_order_with(ext.solves(), &ext.sample(0.0, &g)?, &cfg)?;
    let in_band = |o: f64| (3.7..=4.3).contains(&o);
    let chiral = chiral()?;
    let factor = residual_convergence(chiral.solves(), &chiral, 0.7, &g, 0.01)?.factor;
    let factor_ext = residual_convergence(ext.solves(), &ext, 0.7, &g, 0.01)?.factor;
    let factors_ok = (8.0..=32.0).contains(&factor) && (8.0..=32.0).contains(&factor_ext);
    outcome(
        in_band(cubic.order) && in_band(extd.order) && !cubic.floor && !extd.floor && factors_ok,
        format!(
            "IFRK4 order cubic {:.3}, extended {:.3} (band [3.7, 4.3]); residual halving factors {factor:.2}, {factor_ext:.2} (band [8, 32])",
            cubic.order, extd.order
        ),
    )
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Result<Outcome>); 11] = [
        ("chiral soliton residual", chiral_residual),
        ("soliton propagation", soliton_propagation),
        ("lens-map identity", lens_identity),
        ("time-dependent soliton", time_dependent),
        ("extended soliton", extended),
        ("Clarkson-Cosgrove table", clarkson_cosgrove_table),
        ("gauge chain", gauge_chain),
        ("frame maps", frame_maps),
        ("chirality", chirality),
        ("negative control", negative_control),
        ("convergence", convergence),
    ];
    let results: Vec<(Result<Outcome>, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = checks
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let start = Instant::now();
                    (f(), start.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("check panicked")).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (res, secs))) in checks.iter().zip(results).enumerate() {
        let (pass, detail) = match res {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !pass as usize;
        println!(
            "criterion {:>2} {} {name}: {detail} [{secs:.1}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
