// appended probe: node-value accuracy vs interpolant accuracy
use std::sync::Arc;
use spoints::lse::{assemble_kernel, build_grid, solve_field, Incident};
use spoints::potentials::{PotentialField, RadialProfile};
use spoints::radial::radial_phi;

fn main() {
    let p = PotentialField::radial(RadialProfile::gaussian(-8.0, 1.0).unwrap());
    let phir = radial_phi(&p).unwrap();
    for n in [16usize, 24] {
        let grid = Arc::new(build_grid(p.support_ball(), n).unwrap());
        let op = Arc::new(assemble_kernel(grid.clone(), Arc::new(p.clone())).unwrap());
        let phi3 = solve_field(&op, Incident::Constant(1.0)).unwrap();
        let mut max_err = 0.0f64;
        let mut worst = 0.0;
        let mut sup = 0.0f64;
        for (node, &v) in grid.nodes().iter().zip(phi3.values()) {
            let r = (node[0]*node[0]+node[1]*node[1]+node[2]*node[2]).sqrt();
            if r < 0.05 { continue; }
            let vr = phir.eval(r);
            sup = sup.max(vr.abs());
            if (v - vr).abs() > max_err { max_err = (v - vr).abs(); worst = r; }
        }
        println!("n={n}: node max|dPhi|={max_err:.4e} at r={worst:.2} (rel {:.4e})", max_err/sup);

        // interpolant at mid-cell points (farthest from nodes)
        let h = grid.spacing();
        let mut max_err2 = 0.0f64; let mut worst2 = 0.0;
        for (node, _) in grid.nodes().iter().zip(phi3.values()) {
            let x = [node[0]+0.5*h, node[1]+0.5*h, node[2]+0.5*h];
            let r = (x[0]*x[0]+x[1]*x[1]+x[2]*x[2]).sqrt();
            if r < 0.05 || r > 5.0 { continue; }
            let v = phi3.eval_lenient(x);
            let vr = phir.eval(r);
            if (v - vr).abs() > max_err2 { max_err2 = (v - vr).abs(); worst2 = r; }
        }
        println!("n={n}: cell-corner interpolant max|dPhi|={max_err2:.4e} at r={worst2:.2} (rel {:.4e})", max_err2/sup);
    }
}
