use std::time::Instant;
use surfdiff::flow2d::*;
use surfdiff::metrics;
use surfdiff::shapes;

fn run_curve(shape: &shapes::ShapeSpec, tau: f64, t_end: f64) -> Evolution2D<f64> {
    let c = shape.build_curve::<f64>().unwrap();
    let params = SolverParams::new(tau);
    evolve(c, &params, &EvolveOptions::to_time(t_end)).unwrap()
}

fn main() {
    // Acceptance 1/2: ellipse run.
    let t0 = Instant::now();
    let out = run_curve(&shapes::ShapeSpec::Ellipse { a: 2.8, b: 0.4, n: 32 }, 0.02, 2.0);
    let max_drift = out.trace.rows.iter().map(|r| r.rel_area_loss.abs()).fold(0.0f64, f64::max);
    let mut mono = true;
    let mut last = f64::INFINITY;
    for r in &out.trace.rows {
        if r.perimeter > last * (1.0 + 1e-9) { mono = false; }
        last = r.perimeter;
    }
    println!("[1/2] ellipse N=32 t=2.0: max|dA|/A = {max_drift:.2e}, L monotone = {mono}, elapsed {:?}", t0.elapsed());

    // Acceptance 3: rectangle convergence, t = 0.5.
    let t0 = Instant::now();
    let base = shapes::ShapeSpec::Rectangle { length: 5.6, width: 0.8, n: 32 };
    let mut finals = Vec::new();
    for lvl in 0..4 {
        let spec = base.refined(lvl);
        let tau = 0.02 / 4f64.powi(lvl as i32);
        let out = run_curve(&spec, tau, 0.5);
        finals.push(out.final_state.curve.clone());
    }
    let mut errors = Vec::new();
    for w in finals.windows(2) {
        errors.push(metrics::manifold_distance_2d(&w[0], &w[1]).unwrap());
    }
    println!("[3] rectangle errors at t=0.5: {errors:?} (paper: 1.05e-1, 2.66e-2, 6.53e-3), elapsed {:?}", t0.elapsed());
    for w in errors.windows(2) {
        println!("    order {:.3}", (w[0] / w[1]).log2());
    }

    // Acceptance 4/5: equilibrium of the ellipse at N in {32, 64, 128}.
    let t0 = Instant::now();
    for n in [32usize, 64, 128] {
        let h = 1.0 / n as f64;
        let tau = 20.48 * h * h;
        let c = shapes::ShapeSpec::Ellipse { a: 2.8, b: 0.4, n }.build_curve::<f64>().unwrap();
        let a0 = c.enclosed_area();
        let mut params = SolverParams::new(tau);
        params.tol = 1e-12;
        let opts = EvolveOptions {
            t_end: 40.0,
            snapshot_times: vec![],
            stop_when_increment_below: Some(1e-11),
        };
        let out = evolve(c, &params, &opts).unwrap();
        let lf = out.final_state.curve.perimeter();
        let le = metrics::equilibrium_perimeter(a0, n);
        let (dl1, dl2) = metrics::equilibrium_perimeter_errors(lf, a0, n);
        let spread = {
            let k = &out.final_state.curvature;
            let mx = k.iter().copied().fold(f64::MIN, f64::max);
            let mn = k.iter().copied().fold(f64::MAX, f64::min);
            (mx - mn) / mx.abs()
        };
        println!(
            "[4/5] N={n}: eq={} t={:.2} steps={} |L-Le|/Le = {:.2e}, MRI = {:.6}, spread = {:.2e}, dL1 = {:.4e}, dL2 = {:.4e}",
            out.reached_equilibrium, out.final_state.time, out.final_state.step_index,
            ((lf - le) / le).abs(),
            out.final_state.curve.mesh_ratio(),
            spread, dl1, dl2
        );
    }
    println!("    elapsed {:?}", t0.elapsed());

    // Acceptance 6: Newton vs Picard, shape 1, N=128, tau=1.25e-3, 200 steps.
    let t0 = Instant::now();
    let spec = shapes::ShapeSpec::Rectangle { length: 5.6, width: 0.8, n: 128 };
    let mut counts = Vec::new();
    for method in [IterationMethod::Newton, IterationMethod::Picard] {
        let c = spec.build_curve::<f64>().unwrap();
        let mut params = SolverParams::new(1.25e-3);
        params.method = method;
        let out = evolve(c, &params, &EvolveOptions::to_time(0.25)).unwrap();
        let total: usize = out.trace.rows.iter().map(|r| r.iterations).sum();
        let maxit = out.trace.rows.iter().map(|r| r.iterations).max().unwrap();
        counts.push((total as f64 / 200.0, maxit));
    }
    println!("[6] newton mean/max = {:?}, picard mean/max = {:?}, elapsed {:?}", counts[0], counts[1], t0.elapsed());
}
