// temporary development probe; removed before release
use std::sync::Arc;
use std::time::Instant;

use spoints::geom::norm;
use spoints::jets::{jet_matrix, q_harmonic_basis, JetOptions};
use spoints::lse::{assemble_kernel, build_grid, solve_field, Incident};
use spoints::potentials::{PotentialField, RadialProfile};
use spoints::radial::{critical_coupling, find_s_spheres, radial_phi};

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();
    match which.as_str() {
        "vshape" => vshape(),
        "phi" => phi_agreement(),
        "jetdip" => jetdip(),
        "det" => determinism(),
        _ => eprintln!("usage: probe vshape|phi|jetdip|det"),
    }
}

fn base() -> PotentialField {
    PotentialField::radial(RadialProfile::gaussian(-1.0, 1.0).unwrap())
}

fn vshape() {
    let p = base();
    let ac = critical_coupling(&p, 2.0, 3.5).unwrap();
    println!("alpha_c = {ac:.9}");
    for n in [12usize, 16] {
        for factor in [0.5, 0.9, 1.0, 1.1, 1.5] {
            let scaled = p.with_coupling(factor * ac).unwrap();
            let ball = scaled.support_ball();
            let grid = Arc::new(build_grid(ball, n).unwrap());
            let t = Instant::now();
            let op = assemble_kernel(grid, Arc::new(scaled)).unwrap();
            let sigma = op.check_convention().sigma_min;
            println!(
                "n={n} alpha={factor:.1}ac sigma_min={sigma:.6e}  ({:.1?})",
                t.elapsed()
            );
        }
    }
}

fn phi_agreement() {
    let p = PotentialField::radial(RadialProfile::gaussian(-8.0, 1.0).unwrap());
    let support = p.support_ball().radius;
    let phir = radial_phi(&p).unwrap();
    for n in [12usize, 16, 24] {
        let t = Instant::now();
        let grid = Arc::new(build_grid(p.support_ball(), n).unwrap());
        let op = Arc::new(assemble_kernel(grid, Arc::new(p.clone())).unwrap());
        let phi3 = solve_field(&op, Incident::Constant(1.0)).unwrap();
        let dir = {
            let v = [1.0, 0.618_033_988_749, 0.381_966_011_25];
            let nn = norm(v);
            [v[0] / nn, v[1] / nn, v[2] / nn]
        };
        let mut max_abs = 0.0f64;
        let mut sup = 0.0f64;
        let mut worst_r = 0.0;
        for i in 1..=20 {
            let r = support * (0.12 + 1.1 * (i as f64 - 1.0) / 19.0);
            let x = [dir[0] * r, dir[1] * r, dir[2] * r];
            let v3 = phi3.eval_lenient(x);
            let vr = phir.eval(r);
            if (v3 - vr).abs() > max_abs {
                max_abs = (v3 - vr).abs();
                worst_r = r;
            }
            sup = sup.max(vr.abs());
        }
        println!(
            "n={n}: max|dPhi| = {max_abs:.4e} at r={worst_r:.2}, sup|Phi|={sup:.3}, rel={:.4e}  ({:.1?})",
            max_abs / sup,
            t.elapsed()
        );
    }
}

fn jetdip() {
    let p = PotentialField::radial(RadialProfile::gaussian(-8.0, 1.0).unwrap());
    // radial prediction for the order-2 sphere
    let spheres = find_s_spheres(&p, 2).unwrap();
    println!("radial m=2 radii: {:?}", spheres.radii);
    for n in [16usize, 24] {
        let t = Instant::now();
        let grid = Arc::new(build_grid(p.support_ball(), n).unwrap());
        let op = Arc::new(assemble_kernel(grid, Arc::new(p.clone())).unwrap());
        let basis = q_harmonic_basis(&op, 2).unwrap();
        println!("n={n} setup {:.1?}", t.elapsed());
        let dir = {
            let v = [1.0, 0.618_033_988_749, 0.381_966_011_25];
            let nn = norm(v);
            [v[0] / nn, v[1] / nn, v[2] / nn]
        };
        for i in 0..36 {
            let r = 3.5 + 0.075 * i as f64;
            let x = [dir[0] * r, dir[1] * r, dir[2] * r];
            let jet = jet_matrix(&basis, x, 2, JetOptions::default()).unwrap();
            println!("  r={r:.3} s9/s1={:.4e}", jet.sigma_ratio(9));
        }
    }
}

fn determinism() {
    let p = PotentialField::radial(RadialProfile::gaussian(-8.0, 1.0).unwrap());
    let grid = Arc::new(build_grid(p.support_ball(), 16).unwrap());
    let mut bits1 = Vec::new();
    let mut bits2 = Vec::new();
    for out in [&mut bits1, &mut bits2] {
        let op = Arc::new(assemble_kernel(grid.clone(), Arc::new(p.clone())).unwrap());
        let phi = solve_field(&op, Incident::Constant(1.0)).unwrap();
        out.extend(phi.values().iter().map(|v| v.to_bits()));
        out.push(op.check_convention().sigma_min.to_bits());
    }
    println!("identical = {}", bits1 == bits2);
}
