//! Spin-lattice Hamiltonians, reference states, and spectral quantities.
//!
//! Conventions: site `m` of a lattice maps to bit `m` of the computational
//! basis index; bit value 0 is spin-up (`Z` eigenvalue +1), bit value 1 is
//! spin-down (`Z` eigenvalue -1).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{dot, eigh, CMatrix};
use crate::scalar::Scalar;

/// Largest site count representable densely here (2^12 = 4096 amplitudes).
pub const MAX_DENSE_SITES: usize = 12;

/// Lattice boundary condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Rectangular spin lattice with nearest-neighbor edges.
#[derive(Clone, Debug)]
pub struct SpinLattice {
    rows: usize,
    cols: usize,
    boundary: Boundary,
    edges: Vec<(usize, usize)>,
}

impl SpinLattice {
    pub fn new(rows: usize, cols: usize, boundary: Boundary) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Precondition(
                "lattice must have at least one row and one column".into(),
            ));
        }
        let idx = |r: usize, c: usize| r * cols + c;
        let mut edges = std::collections::BTreeSet::new();
        let mut push = |a: usize, b: usize| {
            if a != b {
                edges.insert((a.min(b), a.max(b)));
            }
        };
        for r in 0..rows {
            for c in 0..cols {
                match boundary {
                    Boundary::Open => {
                        if c + 1 < cols {
                            push(idx(r, c), idx(r, c + 1));
                        }
                        if r + 1 < rows {
                            push(idx(r, c), idx(r + 1, c));
                        }
                    }
                    Boundary::Periodic => {
                        if cols > 1 {
                            push(idx(r, c), idx(r, (c + 1) % cols));
                        }
                        if rows > 1 {
                            push(idx(r, c), idx((r + 1) % rows, c));
                        }
                    }
                }
            }
        }
        Ok(Self {
            rows,
            cols,
            boundary,
            edges: edges.into_iter().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn sites(&self) -> usize {
        self.rows * self.cols
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Checkerboard color of a site: (row + col) mod 2.
    pub fn color(&self, site: usize) -> usize {
        (site / self.cols + site % self.cols) % 2
    }

    /// True when every edge connects sites of different checkerboard color.
    pub fn is_checkerboard_bipartite(&self) -> bool {
        self.edges.iter().all(|&(a, b)| self.color(a) != self.color(b))
    }
}

/// Dense complex Hermitian operator with a human-readable label.
#[derive(Clone, Debug)]
pub struct HermitianOperator<T> {
    dim: usize,
    entries: CMatrix<T>,
    label: String,
}

impl<T: Scalar> HermitianOperator<T> {
    /// Wrap a matrix, checking Hermiticity to `1e-12 * max |entry|`.
    pub fn new(entries: CMatrix<T>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if !entries.is_square() {
            return Err(Error::Precondition(format!(
                "operator `{label}` must be square"
            )));
        }
        if !entries.is_hermitian(T::real(1e-12)) {
            return Err(Error::NotHermitian {
                label,
                deviation: entries.hermiticity_deviation().to_f64(),
            });
        }
        Ok(Self {
            dim: entries.rows(),
            entries,
            label,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn sites(&self) -> Option<usize> {
        if self.dim.is_power_of_two() {
            Some(self.dim.trailing_zeros() as usize)
        } else {
            None
        }
    }

    /// Max magnitude of `[H, M]` entries where `M` is total-Z magnetization.
    /// Only meaningful when the dimension is a power of two.
    pub fn magnetization_commutator_norm(&self) -> Option<T> {
        let sites = self.sites()?;
        let mut worst = T::zero();
        for b in 0..self.dim {
            let mb = magnetization(b, sites);
            for bp in 0..self.dim {
                let mbp = magnetization(bp, sites);
                if mb != mbp {
                    let gap = T::real((mbp - mb).abs() as f64);
                    let v = self.entries[(b, bp)].norm() * gap;
                    if v > worst {
                        worst = v;
                    }
                }
            }
        }
        Some(worst)
    }
}

/// Total-Z magnetization of a basis state: (#up - #down).
fn magnetization(basis: usize, sites: usize) -> i64 {
    let down = (basis as u64).count_ones() as i64;
    sites as i64 - 2 * down
}

/// Normalized state vector.
#[derive(Clone, Debug)]
pub struct StateVector<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let n = crate::linalg::norm(&amplitudes);
        if (n - T::one()).abs() > T::real(1e-12) {
            return Err(Error::Precondition(format!(
                "state norm {} deviates from 1 beyond 1e-12",
                n.to_f64()
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis state `|index>` in a `dim`-dimensional space.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        crate::linalg::norm(&self.amplitudes)
    }
}

/// Eigen-decomposition data with ascending eigenvalues and orthonormal columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T> {
    eigenvalues: Vec<T>,
    eigenvectors: CMatrix<T>,
}

impl<T: Scalar> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix<T> {
        &self.eigenvectors
    }

    /// Overlaps `<E_m|psi>` of a state with every eigenvector.
    pub fn overlaps(&self, state: &StateVector<T>) -> Vec<Complex<T>> {
        self.eigenvectors.adjoint_mul_vec(state.amplitudes())
    }
}

/// Scalar summary of a spectrum relative to a reference state.
#[derive(Clone, Copy, Debug)]
pub struct SpectralQuantities<T> {
    /// Ground energy.
    pub e0: T,
    /// Gap to the next distinct level; infinite when every level ties with `e0`.
    pub delta: T,
    /// Spectral range `E_max - E_0`.
    pub spectral_range: T,
    /// Operator norm `max(|E_0|, |E_max|)`.
    pub op_norm: T,
    /// Reference-state weight on the ground eigenspace.
    pub gamma0_sq: T,
}

/// Heisenberg Hamiltonian with anisotropy `j` and field `h`:
/// `h * sum_m Z_m + sum_edges (X X + Y Y + j Z Z)`.
pub fn build_heisenberg<T: Scalar>(
    lattice: &SpinLattice,
    j: T,
    h: T,
) -> Result<HermitianOperator<T>> {
    let sites = lattice.sites();
    if sites > MAX_DENSE_SITES {
        return Err(Error::Capacity {
            sites,
            max: MAX_DENSE_SITES,
        });
    }
    let dim = 1usize << sites;
    let mut m = CMatrix::zeros(dim, dim);
    let two = T::real(2.0);
    for b in 0..dim {
        let zbit = |s: usize| -> T {
            if (b >> s) & 1 == 0 {
                T::one()
            } else {
                -T::one()
            }
        };
        let mut diag = T::zero();
        for s in 0..sites {
            diag += h * zbit(s);
        }
        for &(a, bb) in lattice.edges() {
            diag += j * zbit(a) * zbit(bb);
            if ((b >> a) & 1) != ((b >> bb) & 1) {
                let flipped = b ^ (1 << a) ^ (1 << bb);
                m[(flipped, b)] += Complex::new(two, T::zero());
            }
        }
        m[(b, b)] += Complex::new(diag, T::zero());
    }
    HermitianOperator::new(
        m,
        format!(
            "heisenberg {}x{} {:?} j={} h={}",
            lattice.rows(),
            lattice.cols(),
            lattice.boundary(),
            j,
            h
        ),
    )
}

/// Alternating product state on the checkerboard coloring. With
/// `up_is_even_sublattice` the color-0 sites are spin-up, otherwise color-1.
pub fn antiferromagnetic_state<T: Scalar>(
    lattice: &SpinLattice,
    up_is_even_sublattice: bool,
) -> Result<StateVector<T>> {
    if !lattice.is_checkerboard_bipartite() {
        return Err(Error::Precondition(
            "lattice is not bipartite under the checkerboard coloring".into(),
        ));
    }
    let sites = lattice.sites();
    if sites > MAX_DENSE_SITES {
        return Err(Error::Capacity {
            sites,
            max: MAX_DENSE_SITES,
        });
    }
    let up_color = if up_is_even_sublattice { 0 } else { 1 };
    let mut index = 0usize;
    for s in 0..sites {
        if lattice.color(s) != up_color {
            index |= 1 << s; // spin-down sites carry bit 1
        }
    }
    Ok(StateVector::basis_state(1 << sites, index))
}

/// Restrict an operator and state to the fixed-magnetization sector carrying
/// the state's support. The operator must commute with total-Z magnetization.
pub fn sector_restrict<T: Scalar>(
    op: &HermitianOperator<T>,
    state: &StateVector<T>,
) -> Result<(HermitianOperator<T>, StateVector<T>)> {
    let sites = op.sites().ok_or_else(|| {
        Error::Precondition("sector restriction needs a 2^n-dimensional operator".into())
    })?;
    if state.dim() != op.dim() {
        return Err(Error::Precondition(
            "state dimension does not match operator".into(),
        ));
    }
    let comm = op
        .magnetization_commutator_norm()
        .expect("power-of-two dimension checked above");
    let scale = op.entries().max_abs().max(T::one());
    if comm > T::real(1e-10) * scale {
        return Err(Error::Precondition(format!(
            "operator does not commute with total-Z magnetization (deviation {:.3e})",
            comm.to_f64()
        )));
    }

    // Identify the sector from the largest amplitude, then demand all
    // support lies inside it.
    let amps = state.amplitudes();
    let lead = (0..amps.len())
        .max_by(|&a, &b| {
            amps[a]
                .norm()
                .partial_cmp(&amps[b].norm())
                .expect("non-NaN amplitude")
        })
        .expect("nonempty state");
    let sector_down = (lead as u64).count_ones();
    let tol = T::real(1e-12);
    for (b, amp) in amps.iter().enumerate() {
        if (b as u64).count_ones() != sector_down && amp.norm() > tol {
            return Err(Error::Precondition(
                "state has support in multiple magnetization sectors".into(),
            ));
        }
    }

    let basis: Vec<usize> = (0..op.dim())
        .filter(|&b| (b as u64).count_ones() == sector_down)
        .collect();
    let k = basis.len();
    let restricted = CMatrix::from_fn(k, k, |r, c| op.entries()[(basis[r], basis[c])]);
    let restricted_state: Vec<Complex<T>> = basis.iter().map(|&b| amps[b]).collect();
    let op_r = HermitianOperator::new(
        restricted,
        format!("{} [sector {}down/{}sites]", op.label(), sector_down, sites),
    )?;
    let state_r = StateVector::new(restricted_state)?;
    Ok((op_r, state_r))
}

/// Full eigendecomposition of a Hermitian operator.
pub fn spectral_decompose<T: Scalar>(
    op: &HermitianOperator<T>,
) -> Result<SpectralDecomposition<T>> {
    let eig = eigh(op.entries())?;
    Ok(SpectralDecomposition {
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
    })
}

/// Ground energy, gap, range, operator norm and ground-space overlap of a
/// spectrum relative to a state. Levels within `degeneracy_tol` of the ground
/// energy count as the ground eigenspace.
pub fn spectral_quantities<T: Scalar>(
    spec: &SpectralDecomposition<T>,
    state: &StateVector<T>,
    degeneracy_tol: T,
) -> Result<SpectralQuantities<T>> {
    if spec.dim() == 0 {
        return Err(Error::Precondition("empty spectrum".into()));
    }
    if state.dim() != spec.dim() {
        return Err(Error::Precondition(
            "state dimension does not match spectrum".into(),
        ));
    }
    let vals = spec.eigenvalues();
    let e0 = vals[0];
    let emax = *vals.last().expect("nonempty");
    let delta = vals
        .iter()
        .map(|&v| v - e0)
        .find(|&gap| gap > degeneracy_tol)
        .unwrap_or(T::infinity());
    let overlaps = spec.overlaps(state);
    let gamma0_sq = vals
        .iter()
        .zip(overlaps.iter())
        .take_while(|(&v, _)| v - e0 <= degeneracy_tol)
        .map(|(_, g)| g.norm_sqr())
        .fold(T::zero(), |a, b| a + b);
    Ok(SpectralQuantities {
        e0,
        delta,
        spectral_range: emax - e0,
        op_norm: e0.abs().max(emax.abs()),
        gamma0_sq,
    })
}

/// Default tolerance for grouping the ground eigenspace: `1e-8 * max |E|`.
pub fn default_degeneracy_tol<T: Scalar>(spec: &SpectralDecomposition<T>) -> T {
    let scale = spec
        .eigenvalues()
        .iter()
        .map(|v| v.abs())
        .fold(T::zero(), |a, b| a.max(b));
    T::real(1e-8) * scale.max(T::one())
}

/// Expectation value `<psi|H|psi>` (real part; imaginary part is round-off).
pub fn expectation<T: Scalar>(op: &HermitianOperator<T>, state: &StateVector<T>) -> T {
    dot(state.amplitudes(), &op.entries().mul_vec(state.amplitudes())).re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_edge_counts() {
        let open = SpinLattice::new(3, 3, Boundary::Open).unwrap();
        assert_eq!(open.edges().len(), 12);
        let periodic = SpinLattice::new(3, 3, Boundary::Periodic).unwrap();
        assert_eq!(periodic.edges().len(), 18);
        let chain = SpinLattice::new(1, 2, Boundary::Open).unwrap();
        assert_eq!(chain.edges().len(), 1);
        assert!(SpinLattice::new(0, 3, Boundary::Open).is_err());
        for lat in [&open, &periodic, &chain] {
            for &(a, b) in lat.edges() {
                assert!(a < b && b < lat.sites());
            }
        }
    }

    #[test]
    fn single_site_is_pure_field() {
        let lat = SpinLattice::new(1, 1, Boundary::Open).unwrap();
        let h = build_heisenberg::<f64>(&lat, 1.0, 0.2).unwrap();
        let spec = spectral_decompose(&h).unwrap();
        assert!((spec.eigenvalues()[0] + 0.2).abs() < 1e-14);
        assert!((spec.eigenvalues()[1] - 0.2).abs() < 1e-14);
    }

    #[test]
    fn two_site_chain_spectrum_matches_brute_force() {
        // XX+YY+ZZ on two sites: singlet at -3, triplet at +1.
        let lat = SpinLattice::new(1, 2, Boundary::Open).unwrap();
        let h = build_heisenberg::<f64>(&lat, 1.0, 0.0).unwrap();
        let spec = spectral_decompose(&h).unwrap();
        let expect = [-3.0, 1.0, 1.0, 1.0];
        for (got, want) in spec.eigenvalues().iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn heisenberg_commutes_with_magnetization() {
        for (r, c, b) in [(2, 3, Boundary::Open), (2, 2, Boundary::Periodic)] {
            let lat = SpinLattice::new(r, c, b).unwrap();
            let h = build_heisenberg::<f64>(&lat, 1.3, 0.4).unwrap();
            let comm = h.magnetization_commutator_norm().unwrap();
            assert!(comm < 1e-10, "commutator {comm}");
        }
    }

    #[test]
    fn capacity_error_beyond_dense_scale() {
        let lat = SpinLattice::new(4, 4, Boundary::Open).unwrap();
        assert!(matches!(
            build_heisenberg::<f64>(&lat, 1.0, 0.0),
            Err(Error::Capacity { sites: 16, .. })
        ));
    }

    #[test]
    fn antiferromagnet_is_four_up_five_down_on_3x3() {
        let lat = SpinLattice::new(3, 3, Boundary::Open).unwrap();
        let state = antiferromagnetic_state::<f64>(&lat, false).unwrap();
        assert!((state.norm() - 1.0).abs() < 1e-15);
        let idx = state
            .amplitudes()
            .iter()
            .position(|a| a.norm() > 0.5)
            .unwrap();
        // color-1 sites are the 4 minority sites; they are up (bit 0), the
        // 5 color-0 sites are down (bit 1).
        assert_eq!((idx as u64).count_ones(), 5);

        let h = build_heisenberg::<f64>(&lat, 1.0, 0.2).unwrap();
        let energy = expectation(&h, &state);
        // 12 edges contribute -1 each through ZZ, field gives 0.2*(4-5).
        assert!((energy + 12.2).abs() < 1e-12, "AF energy {energy}");
    }

    #[test]
    fn antiferromagnet_rejects_odd_periodic_lattice() {
        let lat = SpinLattice::new(3, 3, Boundary::Periodic).unwrap();
        assert!(antiferromagnetic_state::<f64>(&lat, false).is_err());
    }

    #[test]
    fn two_site_antiferromagnet_is_a_single_flip_state() {
        let lat = SpinLattice::new(1, 2, Boundary::Open).unwrap();
        let state = antiferromagnetic_state::<f64>(&lat, true).unwrap();
        let idx = state
            .amplitudes()
            .iter()
            .position(|a| a.norm() > 0.5)
            .unwrap();
        assert!(idx == 1 || idx == 2);
    }

    #[test]
    fn sector_restriction_dimensions() {
        let lat = SpinLattice::new(3, 3, Boundary::Open).unwrap();
        let h = build_heisenberg::<f64>(&lat, 1.0, 0.2).unwrap();
        let psi = antiferromagnetic_state::<f64>(&lat, false).unwrap();
        let (hs, ps) = sector_restrict(&h, &psi).unwrap();
        assert_eq!(hs.dim(), 126); // C(9,4) = C(9,5)
        assert!((ps.norm() - 1.0).abs() < 1e-14);

        let lat2 = SpinLattice::new(1, 2, Boundary::Open).unwrap();
        let h2 = build_heisenberg::<f64>(&lat2, 1.0, 0.0).unwrap();
        let psi2 = StateVector::<f64>::basis_state(4, 1);
        let (hs2, _) = sector_restrict(&h2, &psi2).unwrap();
        assert_eq!(hs2.dim(), 2);
    }

    #[test]
    fn sector_restriction_rejects_mixed_support() {
        let lat = SpinLattice::new(1, 2, Boundary::Open).unwrap();
        let h = build_heisenberg::<f64>(&lat, 1.0, 0.0).unwrap();
        let amp = 1.0 / 2.0_f64.sqrt();
        let mixed = StateVector::new(vec![
            Complex::new(amp, 0.0),
            Complex::new(amp, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
        ])
        .unwrap();
        assert!(sector_restrict(&h, &mixed).is_err());
    }

    #[test]
    fn restricted_spectrum_is_submultiset_of_full_spectrum() {
        let lat = SpinLattice::new(2, 3, Boundary::Open).unwrap();
        let h = build_heisenberg::<f64>(&lat, 1.0, 0.2).unwrap();
        let psi = antiferromagnetic_state::<f64>(&lat, false).unwrap();
        let (hs, _) = sector_restrict(&h, &psi).unwrap();
        let full: Vec<f64> = spectral_decompose(&h).unwrap().eigenvalues().to_vec();
        let sector = spectral_decompose(&hs).unwrap();
        let mut used = vec![false; full.len()];
        for &v in sector.eigenvalues() {
            let hit = full
                .iter()
                .enumerate()
                .position(|(i, &f)| !used[i] && (f - v).abs() < 1e-8);
            let hit = hit.unwrap_or_else(|| panic!("sector eigenvalue {v} not in full spectrum"));
            used[hit] = true;
        }
    }

    #[test]
    fn spectral_quantities_on_field_hamiltonian() {
        let lat = SpinLattice::new(1, 1, Boundary::Open).unwrap();
        let h = build_heisenberg::<f64>(&lat, 1.0, 0.2).unwrap();
        let spec = spectral_decompose(&h).unwrap();
        let psi = StateVector::<f64>::basis_state(2, 1); // spin-down, the ground state
        let q = spectral_quantities(&spec, &psi, 1e-10).unwrap();
        assert!((q.e0 + 0.2).abs() < 1e-14);
        assert!((q.delta - 0.4).abs() < 1e-14);
        assert!((q.spectral_range - 0.4).abs() < 1e-14);
        assert!((q.op_norm - 0.2).abs() < 1e-14);
        assert!((q.gamma0_sq - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ground_state_has_unit_overlap_and_overlaps_are_complete() {
        let lat = SpinLattice::new(2, 2, Boundary::Open).unwrap();
        let h = build_heisenberg::<f64>(&lat, 1.0, 0.2).unwrap();
        let spec = spectral_decompose(&h).unwrap();
        let ground = StateVector::new(spec.eigenvectors().column(0)).unwrap();
        let q = spectral_quantities(&spec, &ground, default_degeneracy_tol(&spec)).unwrap();
        assert!((q.gamma0_sq - 1.0).abs() < 1e-10);

        let psi = antiferromagnetic_state::<f64>(&lat, true).unwrap();
        let total: f64 = spec.overlaps(&psi).iter().map(|g| g.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-10);
        let q2 = spectral_quantities(&spec, &psi, default_degeneracy_tol(&spec)).unwrap();
        assert!(q2.gamma0_sq >= 0.0 && q2.gamma0_sq <= 1.0);
        assert!(q2.delta <= q2.spectral_range);
    }

    #[test]
    fn delta_is_infinite_for_flat_spectrum() {
        let id = HermitianOperator::new(CMatrix::<f64>::identity(3), "id").unwrap();
        let spec = spectral_decompose(&id).unwrap();
        let psi = StateVector::<f64>::basis_state(3, 0);
        let q = spectral_quantities(&spec, &psi, 1e-10).unwrap();
        assert!(q.delta.is_infinite());
        assert_eq!(q.spectral_range, 0.0);
    }
}
