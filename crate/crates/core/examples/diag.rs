//! Scratch diagnostic runner (not part of the deliverable test suite).

use nsexpander_core::asymptotics::{check_leading_order, fit_tail};
use nsexpander_core::cavitating::solve_cavitating;
use nsexpander_core::params::*;
use nsexpander_core::smooth::solve_smooth;
use nsexpander_core::verify::{bootstrap_norm, bound_suite, estimated_orders, ode_residual, BootstrapConstants};

fn main() {
    let params: PhysicalParams<f64> =
        PhysicalParams { r_gas: 1.0, mu: 1.0, lambda: 0.0, c_v: 1.0, kappa: 1.0, d: 3 };

    println!("=== smooth theta0=1e-3, N=4000, r_max=30 ===");
    let b = SmoothBoundaryData { p0: 1.0, theta0: 1e-3 };
    let config = SolveConfig { r_max: 30.0, n_cells: 4000, grading: 2.0, picard_tol: 1e-12, max_iter: 200, r_min: None, damping: 1.0 };
    let t0 = std::time::Instant::now();
    let (profile, trace) = solve_smooth(&params, &b, &config).unwrap();
    println!("iterations: {} in {:?}", trace.iterations(), t0.elapsed());
    println!("distances: {:?}", &trace.distances);
    let s = fit_tail(&profile).unwrap();
    let cmp = check_leading_order(&s, &params, &BoundaryData::Smooth(b));
    println!("U_inf {:.6e} pred {:.6e} dev {:.3e}", s.u_inf, cmp.u_inf_predicted, cmp.u_inf_rel_dev);
    println!("Th_inf {:.6e} pred {:.6e} dev {:.3e}", s.theta_inf, cmp.theta_inf_predicted, cmp.theta_inf_rel_dev);
    println!("P_inf {:.8} dev {:.3e}  p_increment {:.3e}", s.p_inf, cmp.p_inf_rel_dev, s.p_increment);
    let bc = BootstrapConstants::smooth_choice(b.theta0, 10.0);
    let z = bootstrap_norm(&profile, &bc, &params).unwrap();
    println!("smooth max Z (A=10): {:.4}", z.max);
    let bs = bound_suite(&profile, &params).unwrap();
    for fb in &bs.bounds { println!("  fitted {}: {:.3}", fb.name, fb.constant); }
    println!("  bracket ok: {} margin {:.4}", bs.density_bracket_ok, bs.degeneracy_margin);

    // residual order study
    let mut reports = vec![];
    for n in [1000usize, 2000, 4000] {
        let cfg = SolveConfig { n_cells: n, ..config };
        let (p, _) = solve_smooth(&params, &b, &cfg).unwrap();
        let rep = ode_residual(&p, &params).unwrap();
        println!("N={}: residual sup {:?}", n, rep.sup);
        reports.push(rep);
    }
    println!("orders 1000->2000: {:?}", estimated_orders(&reports[0], &reports[1]));
    println!("orders 2000->4000: {:?}", estimated_orders(&reports[1], &reports[2]));

    // theta0/2 run for the linearity ratio
    let b2 = SmoothBoundaryData { p0: 1.0, theta0: 5e-4 };
    let (p2, _) = solve_smooth(&params, &b2, &config).unwrap();
    let s2 = fit_tail(&p2).unwrap();
    println!("ratio U_inf(theta0)/U_inf(theta0/2) = {:.5}", s.u_inf / s2.u_inf);

    println!("\n=== cavitating P_delta=1e-2 delta=1e-1 alpha=1e-3 theta0=1e-2, N=4000, r_max=150 ===");
    let bc2 = CavitatingBoundaryData { p_delta: 1e-2, delta: 1e-1, theta0: 1e-2, alpha: 1e-3 };
    let config2 = SolveConfig { r_max: 150.0, n_cells: 4000, grading: 2.0, picard_tol: 1e-12, max_iter: 200, r_min: None, damping: 1.0 };
    let t0 = std::time::Instant::now();
    let (cp, ct) = solve_cavitating(&params, &bc2, &config2).unwrap();
    println!("iterations: {} in {:?}", ct.iterations(), t0.elapsed());
    println!("distances: {:?}", &ct.distances);
    let s = fit_tail(&cp).unwrap();
    let cmp = check_leading_order(&s, &params, &BoundaryData::Cavitating(bc2));
    println!("U_inf {:.6} pred {:.6} dev {:.4e}", s.u_inf, cmp.u_inf_predicted, cmp.u_inf_rel_dev);
    println!("Th_inf {:.6} pred {:.6} dev {:.4e}", s.theta_inf, cmp.theta_inf_predicted, cmp.theta_inf_rel_dev);
    println!("P_inf {:.6e} dev {:.4e}", s.p_inf, cmp.p_inf_rel_dev);
    println!("u_error_scale {:.4e} theta_error_scale {:.4e}", cmp.u_error_scale, cmp.theta_error_scale);

    // measured slope on [2 r_min, delta/4]
    let beta = bc2.vacuum_exponent(3);
    let g = cp.grid.nodes();
    let r_min = cp.grid.r_first();
    let (mut lo_i, mut hi_i) = (0usize, 0usize);
    for (i, &r) in g.iter().enumerate() {
        if r <= 2.0 * r_min { lo_i = i; }
        if r <= bc2.delta / 4.0 { hi_i = i; }
    }
    let slope = (cp.p.values()[hi_i] / cp.p.values()[lo_i]).ln() / (g[hi_i] / g[lo_i]).ln();
    println!("log-log slope [2rmin, delta/4]: {:.6e} vs beta {:.6e}, rel dev {:.4e}", slope, beta, (slope - beta).abs() / beta);

    let zc = BootstrapConstants::cavitating_choice(bc2.alpha, bc2.p_delta, 10.0);
    let z = bootstrap_norm(&cp, &zc, &params).unwrap();
    println!("cavitating max Z (Lambda=10): {:.4}", z.max);
    // where is the max attained?
    let samples = z.samples.values();
    let mut argmax = 0;
    for i in 0..samples.len() { if samples[i] > samples[argmax] * (1.0 + 1e-12) { argmax = i; } }
    println!("  running sup saturates at r = {:.2}", g[argmax]);
    let bs = bound_suite(&cp, &params).unwrap();
    for fb in &bs.bounds { println!("  fitted {}: {:.4}", fb.name, fb.constant); }
    println!("  bracket: {} ({})", bs.density_bracket_ok, bs.density_bracket_detail);
    println!("  far field P/P_delta: {:?}", bs.far_field_density);
    println!("  degeneracy margin: {:.4} vs 1/2-2alpha = {:.4}", bs.degeneracy_margin, 0.5 - 2.0 * bc2.alpha);

    let mut reports = vec![];
    for n in [1000usize, 2000, 4000] {
        let cfg = SolveConfig { n_cells: n, ..config2 };
        let (p, _) = solve_cavitating(&params, &bc2, &cfg).unwrap();
        let rep = ode_residual(&p, &params).unwrap();
        println!("N={}: residual sup {:?}", n, rep.sup);
        reports.push(rep);
    }
    println!("orders 1000->2000: {:?}", estimated_orders(&reports[0], &reports[1]));
    println!("orders 2000->4000: {:?}", estimated_orders(&reports[1], &reports[2]));
}
