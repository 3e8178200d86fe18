//! Print the resolved spectral quantities of the reference model (3x3
//! Heisenberg, j = 1, h = 0.2, analyzed in the 4-up/5-down sector) for both
//! boundary conditions, plus the derived default timestep.

use qkrylov::krylov::default_dt;
use qkrylov::operators::*;

fn main() {
    for boundary in [Boundary::Open, Boundary::Periodic] {
        let lattice = SpinLattice::new(3, 3, boundary).unwrap();
        let hamiltonian = build_heisenberg::<f64>(&lattice, 1.0, 0.2).unwrap();
        let reference = match antiferromagnetic_state::<f64>(&lattice, false) {
            Ok(state) => state,
            Err(e) => {
                println!("{boundary:?}: alternating reference state unavailable ({e})");
                continue;
            }
        };
        let (sector, state) = sector_restrict(&hamiltonian, &reference).unwrap();
        let spectrum = spectral_decompose(&sector).unwrap();
        let q = spectral_quantities(&spectrum, &state, default_degeneracy_tol(&spectrum)).unwrap();
        println!(
            "{boundary:?}: sector dim {} | E0 {:.6} | Delta {:.6} | R {:.6} | ||H|| {:.6} | \
             gamma0^2 {:.6} | dt = pi/R = {:.6}",
            sector.dim(),
            q.e0,
            q.delta,
            q.spectral_range,
            q.op_norm,
            q.gamma0_sq,
            default_dt(&q).unwrap(),
        );
    }
}
