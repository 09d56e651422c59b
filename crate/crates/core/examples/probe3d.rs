use std::time::Instant;
use surfdiff::flow3d::*;
use surfdiff::metrics;
use surfdiff::shapes;

fn main() {
    // Acceptance 7: (4,1,1) cuboid, J=288 (level 0), tau = (2/25) h^2, to t=0.35.
    let t0 = Instant::now();
    let spec = shapes::ShapeSpec::Cuboid { lx: 4.0, ly: 1.0, lz: 1.0, level: 0 };
    let h = spec.mesh_size().unwrap();
    let tau = 2.0 / 25.0 * h * h;
    let s = spec.build_surface::<f64>().unwrap();
    let params = SolverParams::new(tau);
    let out = evolve_3d(s, &params, &EvolveOptions3D::to_time(0.35)).unwrap();
    let max_drift = out.trace.rows.iter().map(|r| r.rel_volume_loss.abs()).fold(0.0f64, f64::max);
    let mut mono = true;
    let mut last = f64::INFINITY;
    let mut max_it = 0usize;
    for r in &out.trace.rows {
        if r.surface_area > last * (1.0 + 1e-12) { mono = false; }
        last = r.surface_area;
        max_it = max_it.max(r.iterations);
    }
    println!("[7] steps={} max|dV|/V = {max_drift:.2e}, W monotone = {mono}, max newton = {max_it}, elapsed {:?}",
        out.trace.rows.len()-1, t0.elapsed());

    // Acceptance 8: 3D convergence at t=0.2, levels 0,1,2; tau0 = 0.01.
    let t0 = Instant::now();
    let mut finals = Vec::new();
    for lvl in 0..3u32 {
        let tl = Instant::now();
        let spec = shapes::ShapeSpec::Cuboid { lx: 4.0, ly: 1.0, lz: 1.0, level: lvl as usize };
        let tau = 0.01 / 4f64.powi(lvl as i32);
        let s = spec.build_surface::<f64>().unwrap();
        let params = SolverParams::new(tau);
        let out = evolve_3d(s, &params, &EvolveOptions3D { t_end: 0.2, snapshot_times: vec![], guard: None }).unwrap();
        println!("    level {lvl}: K={} steps={} elapsed {:?}", out.final_state.surface.num_vertices(), out.final_state.step_index, tl.elapsed());
        finals.push(out.final_state.surface.clone());
    }
    let e0 = metrics::manifold_distance_3d(&finals[0], &finals[1]).unwrap();
    let e1 = metrics::manifold_distance_3d(&finals[1], &finals[2]).unwrap();
    println!("[8] errors t=0.2: ({e0:.3e}, {e1:.3e}) paper (5.30e-2, 1.34e-2); order = {:.3} paper 1.98; elapsed {:?}",
        (e0/e1).log2(), t0.elapsed());

    // Acceptance 9: (8,1,1) cuboid pinch-off, tau = 1e-3.
    let t0 = Instant::now();
    let spec = shapes::ShapeSpec::Cuboid { lx: 8.0, ly: 1.0, lz: 1.0, level: 1 };
    let s = spec.build_surface::<f64>().unwrap();
    println!("    (8,1,1): K={} J={}", s.num_vertices(), s.num_triangles());
    let params = SolverParams::new(1e-3);
    let out = evolve_3d(s, &params, &EvolveOptions3D::to_time(0.5));
    match out {
        Ok(out) => {
            match out.pinch_event {
                Some(e) => println!("[9] pinch at t = {:.4} (step {}, ratio {:.2e}) paper 0.370, elapsed {:?}", e.time, e.step, e.ratio, t0.elapsed()),
                None => println!("[9] NO pinch by t=0.5; min ratio at end unknown; elapsed {:?}", t0.elapsed()),
            }
            let max_drift = out.trace.rows.iter().map(|r| r.rel_volume_loss.abs()).fold(0.0f64, f64::max);
            println!("    volume drift {max_drift:.2e}; final t = {:.3}", out.final_state.time);
        }
        Err(e) => println!("[9] run FAILED: {e}, elapsed {:?}", t0.elapsed()),
    }
}
