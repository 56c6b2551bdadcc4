//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them all).
//!
//! Reference configurations:
//! * smooth: d = 3, R = mu = C_V = kappa = 1, lambda = 0, P0 = 1,
//!   Theta0 in {1e-3, 5e-4}, N = 4000, r_max = 30;
//! * cavitating: P_delta = 1e-2, delta = 1e-1, alpha = 1e-3, Theta0 = 1e-2,
//!   N = 4000, r_max = 150 (the far-field transition sits at
//!   r ~ 1/sqrt(P_delta), so the tail window must lie well beyond it).
//!
//! Two checks are expected to fail at these reference parameters and are
//! kept as stated rather than loosened; see the comments in criteria 5
//! and 8 for the quantitative reason.

use std::sync::OnceLock;
use std::time::Instant;

use nsexpander_core::asymptotics::{check_leading_order, fit_tail};
use nsexpander_core::cavitating::solve_cavitating;
use nsexpander_core::params::{
    BoundaryData, CavitatingBoundaryData, PhysicalParams, SmoothBoundaryData, SolveConfig,
};
use nsexpander_core::profile::{Case, IterationTrace, Profile};
use nsexpander_core::smooth::{psi_step, seed_smooth, solve_smooth};
use nsexpander_core::verify::{bootstrap_norm, bound_suite, ode_residual, BootstrapConstants};

fn params3() -> PhysicalParams<f64> {
    PhysicalParams { r_gas: 1.0, mu: 1.0, lambda: 0.0, c_v: 1.0, kappa: 1.0, d: 3 }
}

fn smooth_config(n: usize) -> SolveConfig<f64> {
    SolveConfig {
        r_max: 30.0,
        n_cells: n,
        grading: 2.0,
        picard_tol: 1e-12,
        max_iter: 200,
        r_min: None,
        damping: 1.0,
    }
}

fn cavitating_config(n: usize) -> SolveConfig<f64> {
    SolveConfig { r_max: 150.0, ..smooth_config(n) }
}

fn cavitating_boundary() -> CavitatingBoundaryData<f64> {
    CavitatingBoundaryData { p_delta: 1e-2, delta: 1e-1, theta0: 1e-2, alpha: 1e-3 }
}

struct Solved {
    profile: Profile<f64>,
    trace: IterationTrace<f64>,
    seconds: f64,
}

fn solve_smooth_at(theta0: f64, n: usize) -> Solved {
    let b = SmoothBoundaryData { p0: 1.0, theta0 };
    let started = Instant::now();
    let (profile, trace) = solve_smooth(&params3(), &b, &smooth_config(n)).expect("smooth solve");
    Solved { profile, trace, seconds: started.elapsed().as_secs_f64() }
}

fn solve_cavitating_at(n: usize) -> Solved {
    let started = Instant::now();
    let (profile, trace) =
        solve_cavitating(&params3(), &cavitating_boundary(), &cavitating_config(n))
            .expect("cavitating solve");
    Solved { profile, trace, seconds: started.elapsed().as_secs_f64() }
}

fn smooth_reference() -> &'static Solved {
    static CELL: OnceLock<Solved> = OnceLock::new();
    CELL.get_or_init(|| solve_smooth_at(1e-3, 4000))
}

fn smooth_half() -> &'static Solved {
    static CELL: OnceLock<Solved> = OnceLock::new();
    CELL.get_or_init(|| solve_smooth_at(5e-4, 4000))
}

fn cavitating_reference() -> &'static Solved {
    static CELL: OnceLock<Solved> = OnceLock::new();
    CELL.get_or_init(|| solve_cavitating_at(4000))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[test]
fn criterion_01_trivial_fixed_point() {
    // Theta0 = 0 sits outside the strict boundary-data invariants, so the
    // degenerate case drives the fixed-point map directly from its seed.
    let params = params3();
    let b = SmoothBoundaryData { p0: 1.0, theta0: 0.0 };
    let started = Instant::now();
    let grid = nsexpander_core::grid::RadialGrid::from_zero(30.0, 2000, 2.0).unwrap();
    let seed = seed_smooth(&b, grid);
    let mut current = seed.clone();
    let mut iterations = 0;
    for _ in 0..2 {
        let next = psi_step(&current, &b, &params, 1.0).unwrap();
        let distance = next.weighted_distance(&current);
        current = next;
        iterations += 1;
        if distance < 1e-12 {
            break;
        }
    }
    let residual = ode_residual(&current, &params).unwrap();
    let trivial = current.u.values().iter().all(|&u| u == 0.0)
        && current.theta.values().iter().all(|&t| t == 0.0)
        && current.p.values().iter().all(|&p| p == 1.0);
    let elapsed = started.elapsed().as_secs_f64();
    let ok = iterations <= 2 && trivial && residual.max_sup() < 1e-12 && elapsed < 1.0;
    println!(
        "criterion 01 {}: trivial fixed point in {} sweep(s), residual sup {:.1e}, {:.2}s",
        verdict(ok),
        iterations,
        residual.max_sup(),
        elapsed
    );
    assert!(ok, "iterations {iterations}, residual {:e}, {elapsed}s", residual.max_sup());
}

#[test]
fn criterion_02_smooth_velocity_tail_constant() {
    let full = smooth_reference();
    let half = smooth_half();
    let fit_full = fit_tail(&full.profile).unwrap();
    let fit_half = fit_tail(&half.profile).unwrap();
    let dev_full = (fit_full.u_inf - (-2e-3)).abs() / 2e-3;
    let dev_half = (fit_half.u_inf - (-1e-3)).abs() / 1e-3;
    let ratio = fit_full.u_inf / fit_half.u_inf;
    let ok = dev_full <= 0.05
        && dev_half <= 0.05
        && (ratio - 2.0).abs() <= 0.05
        && full.seconds < 30.0
        && half.seconds < 30.0;
    println!(
        "criterion 02 {}: U_inf dev {:.2e}/{:.2e} vs -2*R*Theta0, halving ratio {:.4}, {:.1}s/solve",
        verdict(ok),
        dev_full,
        dev_half,
        ratio,
        full.seconds.max(half.seconds)
    );
    assert!(ok, "dev {dev_full:e}/{dev_half:e}, ratio {ratio}");
}

#[test]
fn criterion_03_smooth_temperature_tail_constant() {
    let mut devs = Vec::new();
    for (solved, theta0) in [(smooth_reference(), 1e-3), (smooth_half(), 5e-4)] {
        let fit = fit_tail(&solved.profile).unwrap();
        let predicted = 2.0 * theta0; // 2 (d-2) kappa Theta0 / (C_V P0)
        devs.push((fit.theta_inf - predicted).abs() / predicted);
    }
    let ok = devs.iter().all(|&d| d <= 0.05);
    println!(
        "criterion 03 {}: Theta_inf dev {:.2e}/{:.2e} vs 2(d-2) kappa Theta0/(C_V P0)",
        verdict(ok),
        devs[0],
        devs[1]
    );
    assert!(ok, "deviations {devs:?}");
}

#[test]
fn criterion_04_vacuum_exponent_and_bracket() {
    let solved = cavitating_reference();
    let b = cavitating_boundary();
    let beta = b.vacuum_exponent(3);
    let g = solved.profile.grid.nodes();
    let r_min = solved.profile.grid.r_first();

    // least-squares log-log slope over [2 r_min, delta/4]
    let (mut sx, mut sy, mut sxx, mut sxy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, &r) in g.iter().enumerate() {
        if r >= 2.0 * r_min && r <= b.delta / 4.0 {
            let (x, y) = (r.ln(), solved.profile.p.values()[i].ln());
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            n += 1.0;
        }
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let slope_dev = (slope - beta).abs() / beta;

    let bounds = bound_suite(&solved.profile, &params3()).unwrap();
    let ok = slope_dev <= 0.02 && bounds.density_bracket_ok;
    println!(
        "criterion 04 {}: log-log slope {:.4e} vs 2 d alpha/(1-2 alpha) = {:.4e} (dev {:.2e}), bracket {}",
        verdict(ok),
        slope,
        beta,
        slope_dev,
        bounds.density_bracket_ok
    );
    assert!(ok, "slope dev {slope_dev:e}, bracket {}", bounds.density_bracket_detail);
}

#[test]
fn criterion_05_cavitating_tail_constants() {
    let solved = cavitating_reference();
    let b = cavitating_boundary();
    let fit = fit_tail(&solved.profile).unwrap();
    let cmp = check_leading_order(&fit, &params3(), &BoundaryData::Cavitating(b));

    let u_tol = (3.0 * cmp.u_error_scale).max(0.05);
    let theta_tol = (3.0 * cmp.theta_error_scale).max(0.05);
    let u_ok = cmp.u_inf_rel_dev <= u_tol;
    let theta_ok = cmp.theta_inf_rel_dev <= theta_tol;
    println!(
        "criterion 05 {}: U_inf dev {:.2e} (tol {:.2e}) {}; Theta_inf dev {:.2e} (tol {:.2e}) {}",
        verdict(u_ok && theta_ok),
        cmp.u_inf_rel_dev,
        u_tol,
        verdict(u_ok),
        cmp.theta_inf_rel_dev,
        theta_tol,
        verdict(theta_ok),
    );
    assert!(u_ok, "U_inf deviation {:e} over tolerance {:e}", cmp.u_inf_rel_dev, u_tol);
    // Expected to fail at the reference parameters: the solved temperature
    // tail is Theta_inf = [homogeneous part ~ 2(d-2) kappa Theta0/(C_V P_inf)]
    // - U_inf^2/(2 C_V) + [forcing part], and the kinetic term is
    // U_inf^2/(2 C_V) = 2 d^2 (2mu+lambda)^2 alpha^2 / (C_V P_delta^2),
    // i.e. a relative correction of size
    // [d^2 (2mu+lambda)^2 / ((d-2) kappa)] * alpha^2/(P_delta Theta0)
    // = 36 * 1e-2 = 36% here, far above the 5.8% tolerance; the energy tail
    // constant U_inf^2/(2 C_V) + Theta_inf does land within ~3% of the
    // predicted value, which pins the discrepancy to that kinetic term.
    assert!(
        theta_ok,
        "Theta_inf deviation {:e} over tolerance {:e} (fitted {:e} vs predicted {:e}; \
         kinetic tail correction U_inf^2/(2 C_V) = {:e} accounts for it)",
        cmp.theta_inf_rel_dev,
        theta_tol,
        fit.theta_inf,
        cmp.theta_inf_predicted,
        fit.u_inf * fit.u_inf / 2.0,
    );
}

#[test]
fn criterion_06_residual_refinement() {
    let params = params3();
    let smooth_reports: Vec<_> = [1000usize, 2000]
        .iter()
        .map(|&n| ode_residual(&solve_smooth_at(1e-3, n).profile, &params).unwrap())
        .chain([ode_residual(&smooth_reference().profile, &params).unwrap()])
        .collect();
    let cav_reports: Vec<_> = [1000usize, 2000]
        .iter()
        .map(|&n| ode_residual(&solve_cavitating_at(n).profile, &params).unwrap())
        .chain([ode_residual(&cavitating_reference().profile, &params).unwrap()])
        .collect();

    let mut ok = true;
    let mut detail = String::new();
    for (name, reports) in [("smooth", &smooth_reports), ("cavitating", &cav_reports)] {
        for pair in reports.windows(2) {
            for eq in 0..3 {
                let order = (pair[0].sup[eq] / pair[1].sup[eq]).log2();
                ok &= order >= 1.9;
                detail.push_str(&format!("{:.2} ", order));
            }
        }
        let finest = &reports[2];
        ok &= finest.max_sup() < 1e-4;
        detail.push_str(&format!("| {} final {:.1e} | ", name, finest.max_sup()));
    }
    println!("criterion 06 {}: residual orders {}", verdict(ok), detail);
    assert!(ok, "orders/finals: {detail}");
}

#[test]
fn criterion_07_contraction_ratios() {
    let mut ok = true;
    let mut detail = String::new();
    for (name, solved) in [("smooth", smooth_reference()), ("cavitating", cavitating_reference())]
    {
        let d = &solved.trace.distances;
        // D_{k+1}/D_k < 1 for all k >= 2 (1-based sweep index)
        let ratios: Vec<f64> = (2..d.len()).map(|i| d[i] / d[i - 1]).collect();
        let all_contracting = ratios.iter().all(|&r| r < 1.0);
        ok &= all_contracting;
        detail.push_str(&format!(
            "{} max ratio {:.3e} over {} sweeps; ",
            name,
            ratios.iter().cloned().fold(0.0, f64::max),
            d.len()
        ));
    }
    println!("criterion 07 {}: {}", verdict(ok), detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_08_bootstrap_norms() {
    let params = params3();
    let smooth = smooth_reference();
    let consts = BootstrapConstants::smooth_choice(1e-3, 10.0);
    let z_smooth = bootstrap_norm(&smooth.profile, &consts, &params).unwrap().max;

    let cav = cavitating_reference();
    let b = cavitating_boundary();
    let consts = BootstrapConstants::cavitating_choice(b.alpha, b.p_delta, 10.0);
    let z_cav = bootstrap_norm(&cav.profile, &consts, &params).unwrap().max;

    let smooth_ok = z_smooth <= 1.0;
    let cav_ok = z_cav <= 1.0;
    println!(
        "criterion 08 {}: smooth max Z {:.3} {} (A=10); cavitating max Z {:.3} {} (Lambda=10)",
        verdict(smooth_ok && cav_ok),
        z_smooth,
        verdict(smooth_ok),
        z_cav,
        verdict(cav_ok),
    );
    assert!(smooth_ok, "smooth max Z = {z_smooth}");
    // Expected to fail at the reference parameters: the velocity term of the
    // cavitating norm behaves like
    // (1/(Lambda alpha)) r^-1 (1 + sqrt(P_delta) r)^2 |U(r)|
    //   -> P_delta |U_inf| / (Lambda alpha) = 2 d (2mu+lambda)/Lambda = 1.2
    // as r grows, with a transition-region overshoot up to ~1.85, so
    // Lambda = 10 cannot bound it by one once the mesh extends past
    // r ~ 1/sqrt(P_delta); Lambda >= ~19 would. Kept as stated.
    assert!(
        cav_ok,
        "cavitating max Z = {z_cav} with Lambda = 10 (velocity tail term alone tends to \
         2 d (2mu+lambda)/Lambda = 1.2)"
    );
}

#[test]
fn criterion_09_positivity_and_nondegeneracy() {
    let mut ok = true;
    let mut detail = String::new();
    for (name, solved) in [("smooth", smooth_reference()), ("cavitating", cavitating_reference())]
    {
        let p = &solved.profile;
        let theta_pos = p.theta.values().iter().all(|&t| t > 0.0);
        let margin = p
            .grid
            .nodes()
            .iter()
            .zip(p.u.values())
            .filter(|(&r, _)| r > 0.0)
            .map(|(&r, &u)| 0.5 * r - u)
            .fold(f64::INFINITY, f64::min);
        ok &= theta_pos && margin > 0.0;
        detail.push_str(&format!(
            "{}: Theta > 0 {}, min(r/2 - U) = {:.3e}; ",
            name, theta_pos, margin
        ));
    }
    println!("criterion 09 {}: {}", verdict(ok), detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_10_deterministic_outputs() {
    let bin = env!("CARGO_BIN_EXE_nsexpander");
    let dir = std::env::temp_dir().join(format!("nsexpander-acc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for (name, args) in [
        (
            "smooth",
            vec!["solve", "--case", "smooth", "--theta0", "1e-3", "--p0", "1", "--cells", "800"],
        ),
        (
            "cavitating",
            vec![
                "solve",
                "--case",
                "cavitating",
                "--p-delta",
                "1e-2",
                "--delta",
                "1e-1",
                "--theta0",
                "1e-2",
                "--alpha",
                "1e-3",
                "--cells",
                "800",
            ],
        ),
    ] {
        let mut outputs = Vec::new();
        for pass in 0..2 {
            let csv = dir.join(format!("{name}-{pass}.csv"));
            let json = dir.join(format!("{name}-{pass}.json"));
            let status = std::process::Command::new(bin)
                .args(&args)
                .arg("--out")
                .arg(&csv)
                .arg("--summary")
                .arg(&json)
                .output()
                .expect("binary runs");
            assert!(status.status.success(), "{name} run failed: {status:?}");
            outputs.push((std::fs::read(&csv).unwrap(), std::fs::read(&json).unwrap()));
        }
        let same = outputs[0] == outputs[1];
        ok &= same;
        detail.push_str(&format!("{name} byte-identical: {same}; "));
    }
    let _ = std::fs::remove_dir_all(&dir);
    println!("criterion 10 {}: {}", verdict(ok), detail);
    assert!(ok, "{detail}");
}
