//! The Krylov matrix pair built from real-time evolutions of a reference
//! state, together with the explicit basis used for verification.
//!
//! Basis columns are indexed by the evolution multiple `j = -d..d` in
//! ascending order, so matrix index `c` corresponds to `j = c - d`. Matrix
//! elements only depend on `k - j`, which keeps exact pencils Toeplitz and
//! lets them be assembled from a single profile.

use std::io::Write as _;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::operators::{
    HermitianOperator, SpectralDecomposition, SpectralQuantities, StateVector,
};
use crate::scalar::Scalar;

/// How a pencil was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PencilConstruction {
    /// Elementwise from the exact spectral decomposition.
    Exact,
    /// From a first-order product-formula approximation of the evolutions.
    Trotter,
}

/// The Hermitian matrix pair `(H, S)` of dimension `D = 2d + 1`.
#[derive(Clone, Debug)]
pub struct KrylovPencil<T> {
    d: usize,
    dt: T,
    hmat: CMatrix<T>,
    smat: CMatrix<T>,
    construction: PencilConstruction,
}

impl<T: Scalar> KrylovPencil<T> {
    pub fn d(&self) -> usize {
        self.d
    }

    /// Krylov dimension `D = 2d + 1`.
    pub fn dim(&self) -> usize {
        2 * self.d + 1
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn hmat(&self) -> &CMatrix<T> {
        &self.hmat
    }

    pub fn smat(&self) -> &CMatrix<T> {
        &self.smat
    }

    pub fn construction(&self) -> PencilConstruction {
        self.construction
    }

    /// Central `(2d'+1) x (2d'+1)` sub-pencil for a smaller `d'`.
    pub fn central_block(&self, d_small: usize) -> KrylovPencil<T> {
        assert!(d_small <= self.d);
        let off = self.d - d_small;
        let dim = 2 * d_small + 1;
        let take = |m: &CMatrix<T>| CMatrix::from_fn(dim, dim, |r, c| m[(r + off, c + off)]);
        KrylovPencil {
            d: d_small,
            dt: self.dt,
            hmat: take(&self.hmat),
            smat: take(&self.smat),
            construction: self.construction,
        }
    }

    /// Flat dump of the pair for cross-language comparison.
    pub fn debug_dump(&self) -> PencilDump {
        let flat = |m: &CMatrix<T>, im: bool| -> Vec<Vec<f64>> {
            (0..m.rows())
                .map(|r| {
                    m.row(r)
                        .iter()
                        .map(|z| if im { z.im.to_f64() } else { z.re.to_f64() })
                        .collect()
                })
                .collect()
        };
        PencilDump {
            d: self.d,
            dim: self.dim(),
            dt: self.dt.to_f64(),
            construction: self.construction,
            h_re: flat(&self.hmat, false),
            h_im: flat(&self.hmat, true),
            s_re: flat(&self.smat, false),
            s_im: flat(&self.smat, true),
        }
    }

    /// Write the debug dump as JSON.
    pub fn write_debug_json(&self, path: &Path) -> Result<()> {
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut file = std::fs::File::create(path).map_err(io_err)?;
        let text =
            serde_json::to_string_pretty(&self.debug_dump()).expect("dump serializes");
        file.write_all(text.as_bytes()).map_err(io_err)?;
        Ok(())
    }
}

/// Serializable row-major dump of a pencil, split into real and imaginary parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PencilDump {
    pub d: usize,
    pub dim: usize,
    pub dt: f64,
    pub construction: PencilConstruction,
    pub h_re: Vec<Vec<f64>>,
    pub h_im: Vec<Vec<f64>>,
    pub s_re: Vec<Vec<f64>>,
    pub s_im: Vec<Vec<f64>>,
}

/// Explicit Krylov basis: column `c` holds `e^{i (c - d) H dt} |psi0>`.
#[derive(Clone, Debug)]
pub struct KrylovBasis<T> {
    d: usize,
    dt: T,
    columns: CMatrix<T>,
}

impl<T: Scalar> KrylovBasis<T> {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        2 * self.d + 1
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// `dim x D` matrix of basis columns.
    pub fn columns(&self) -> &CMatrix<T> {
        &self.columns
    }
}

/// Default timestep `pi / R`, the value the convergence analysis assumes.
pub fn default_dt<T: Scalar>(quantities: &SpectralQuantities<T>) -> Result<T> {
    if quantities.spectral_range <= T::zero() {
        return Err(Error::DegenerateSpectrum);
    }
    Ok(T::PI() / quantities.spectral_range)
}

fn check_pencil_args<T: Scalar>(
    spec: &SpectralDecomposition<T>,
    state: &StateVector<T>,
    dt: T,
) -> Result<()> {
    if state.dim() != spec.dim() {
        return Err(Error::Precondition(
            "state dimension does not match spectrum".into(),
        ));
    }
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::Precondition("timestep must be positive".into()));
    }
    Ok(())
}

/// Exact pencil from the spectral formula: with overlaps `gamma_m = <E_m|psi0>`,
/// `S_jk = sum_m |gamma_m|^2 e^{i (k-j) E_m dt}` and
/// `H_jk = sum_m |gamma_m|^2 E_m e^{i (k-j) E_m dt}`.
pub fn build_exact_pencil<T: Scalar>(
    spec: &SpectralDecomposition<T>,
    state: &StateVector<T>,
    d: usize,
    dt: T,
) -> Result<KrylovPencil<T>> {
    check_pencil_args(spec, state, dt)?;
    let weights: Vec<T> = spec
        .overlaps(state)
        .iter()
        .map(|g| g.norm_sqr())
        .collect();
    let energies = spec.eigenvalues();

    // Toeplitz profiles over shifts 0..=2d.
    let dim = 2 * d + 1;
    let mut s_profile = vec![Complex::new(T::zero(), T::zero()); dim];
    let mut h_profile = vec![Complex::new(T::zero(), T::zero()); dim];
    for (&w, &e) in weights.iter().zip(energies.iter()) {
        if w == T::zero() {
            continue;
        }
        let step = Complex::from_polar(T::one(), e * dt);
        let mut phase = Complex::new(T::one(), T::zero());
        for shift in 0..dim {
            s_profile[shift] += phase.scale(w);
            h_profile[shift] += phase.scale(w * e);
            if shift + 1 < dim {
                phase = phase * step;
            }
        }
    }
    let toeplitz = |profile: &[Complex<T>]| {
        CMatrix::from_fn(dim, dim, |j, k| {
            if k >= j {
                profile[k - j]
            } else {
                profile[j - k].conj()
            }
        })
    };
    Ok(KrylovPencil {
        d,
        dt,
        hmat: toeplitz(&h_profile),
        smat: toeplitz(&s_profile),
        construction: PencilConstruction::Exact,
    })
}

/// Explicit basis columns `e^{i j H dt} |psi0>` for `j = -d..d`, computed in
/// the eigenbasis. Kept as the verification oracle for the spectral formula.
pub fn build_krylov_basis<T: Scalar>(
    spec: &SpectralDecomposition<T>,
    state: &StateVector<T>,
    d: usize,
    dt: T,
) -> Result<KrylovBasis<T>> {
    check_pencil_args(spec, state, dt)?;
    let gammas = spec.overlaps(state);
    let energies = spec.eigenvalues();
    let n = spec.dim();
    let dim = 2 * d + 1;
    let mut columns = CMatrix::zeros(n, dim);
    for c in 0..dim {
        let j = c as isize - d as isize;
        let jt = T::real(j as f64) * dt;
        let coeffs: Vec<Complex<T>> = gammas
            .iter()
            .zip(energies.iter())
            .map(|(g, &e)| *g * Complex::from_polar(T::one(), e * jt))
            .collect();
        let col = spec.eigenvectors().mul_vec(&coeffs);
        columns.set_column(c, &col);
    }
    Ok(KrylovBasis { d, dt, columns })
}

/// First-order product-formula pencil. `PF(n)` applies, `steps` times, the
/// factors `e^{i n dt H_t / steps}` with the first listed term acting on the
/// state first. Elements on and above the diagonal are
/// `S'_jk = <psi0| PF(k-j) |psi0>` and `H'_jk = <psi0| PF(k-j) H |psi0>`;
/// the rest are filled in as conjugate transposes.
pub fn build_trotter_pencil<T: Scalar>(
    hamiltonian: &HermitianOperator<T>,
    terms: &[HermitianOperator<T>],
    state: &StateVector<T>,
    d: usize,
    dt: T,
    steps: usize,
) -> Result<KrylovPencil<T>> {
    if terms.is_empty() {
        return Err(Error::Precondition("term list is empty".into()));
    }
    if steps == 0 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::Precondition("timestep must be positive".into()));
    }
    let n = hamiltonian.dim();
    if state.dim() != n || terms.iter().any(|t| t.dim() != n) {
        return Err(Error::Precondition(
            "terms, state and Hamiltonian dimensions must match".into(),
        ));
    }
    let mut sum = CMatrix::zeros(n, n);
    for t in terms {
        sum = sum.add(t.entries());
    }
    let scale = hamiltonian.entries().max_abs().max(T::one());
    let deviation = sum.sub(hamiltonian.entries()).max_abs();
    if deviation > T::real(1e-10) * scale {
        return Err(Error::Precondition(format!(
            "terms do not sum to the Hamiltonian (deviation {:.3e})",
            deviation.to_f64()
        )));
    }

    // Spectral decomposition of each term enables exact factor exponentials.
    let factors: Result<Vec<_>> = terms.iter().map(crate::operators::spectral_decompose).collect();
    let factors = factors?;

    let apply_pf = |n_mult: usize, v: &[Complex<T>]| -> Vec<Complex<T>> {
        let mut v = v.to_vec();
        if n_mult == 0 {
            return v;
        }
        let theta = T::real(n_mult as f64) * dt / T::real(steps as f64);
        for _ in 0..steps {
            for fac in &factors {
                // U diag(e^{i theta E}) U^H v
                let mut coeffs = fac.eigenvectors().adjoint_mul_vec(&v);
                for (cf, &e) in coeffs.iter_mut().zip(fac.eigenvalues().iter()) {
                    *cf = *cf * Complex::from_polar(T::one(), e * theta);
                }
                v = fac.eigenvectors().mul_vec(&coeffs);
            }
        }
        v
    };

    let psi = state.amplitudes();
    let h_psi = hamiltonian.entries().mul_vec(psi);
    let dim = 2 * d + 1;
    let mut s_profile = vec![Complex::new(T::zero(), T::zero()); dim];
    let mut h_profile = vec![Complex::new(T::zero(), T::zero()); dim];
    for shift in 0..dim {
        s_profile[shift] = crate::linalg::dot(psi, &apply_pf(shift, psi));
        h_profile[shift] = crate::linalg::dot(psi, &apply_pf(shift, &h_psi));
    }
    let toeplitz = |profile: &[Complex<T>]| {
        CMatrix::from_fn(dim, dim, |j, k| {
            if k >= j {
                profile[k - j]
            } else {
                profile[j - k].conj()
            }
        })
    };
    Ok(KrylovPencil {
        d,
        dt,
        hmat: toeplitz(&h_profile),
        smat: toeplitz(&s_profile),
        construction: PencilConstruction::Trotter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh_values, quadratic_form};
    use crate::operators::{
        antiferromagnetic_state, build_heisenberg, sector_restrict, spectral_decompose,
        spectral_quantities, Boundary, SpinLattice, StateVector,
    };
    use crate::testing::{random_hermitian, random_state, random_vector};

    fn two_by_two_setup() -> (
        SpectralDecomposition<f64>,
        StateVector<f64>,
        HermitianOperator<f64>,
    ) {
        let lat = SpinLattice::new(2, 2, Boundary::Open).unwrap();
        let h = build_heisenberg::<f64>(&lat, 1.0, 0.2).unwrap();
        let psi = antiferromagnetic_state::<f64>(&lat, true).unwrap();
        let spec = spectral_decompose(&h).unwrap();
        (spec, psi, h)
    }

    #[test]
    fn default_dt_is_pi_over_range() {
        let q = |r: f64| SpectralQuantities {
            e0: 0.0,
            delta: 1.0,
            spectral_range: r,
            op_norm: 1.0,
            gamma0_sq: 1.0,
        };
        assert!((default_dt(&q(std::f64::consts::PI)).unwrap() - 1.0).abs() < 1e-15);
        assert!((default_dt(&q(2.0)).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(default_dt(&q(0.0)), Err(Error::DegenerateSpectrum)));
    }

    #[test]
    fn zero_d_pencil_is_scalar() {
        let (spec, psi, h) = two_by_two_setup();
        let p = build_exact_pencil(&spec, &psi, 0, 0.7).unwrap();
        assert_eq!(p.dim(), 1);
        assert!((p.smat()[(0, 0)].re - 1.0).abs() < 1e-12);
        let energy = crate::operators::expectation(&h, &psi);
        assert!((p.hmat()[(0, 0)].re - energy).abs() < 1e-10);
    }

    #[test]
    fn eigenstate_gives_rank_one_pencil() {
        let (spec, _, _) = two_by_two_setup();
        let ground = StateVector::new(spec.eigenvectors().column(0)).unwrap();
        let e0 = spec.eigenvalues()[0];
        let dt = 0.3;
        let p = build_exact_pencil(&spec, &ground, 3, dt).unwrap();
        for j in 0..p.dim() {
            for k in 0..p.dim() {
                let expect = Complex::from_polar(1.0, (k as f64 - j as f64) * e0 * dt);
                assert!((p.smat()[(j, k)] - expect).norm() < 1e-10);
                assert!((p.hmat()[(j, k)] - expect.scale(e0)).norm() < 1e-10);
            }
        }
        let svals = eigh_values(p.smat()).unwrap();
        assert!(svals[p.dim() - 1] > (p.dim() as f64) - 1e-8);
        for &v in &svals[..p.dim() - 1] {
            assert!(v.abs() < 1e-10);
        }
        // all basis columns equal up to phase
        let basis = build_krylov_basis(&spec, &ground, 3, dt).unwrap();
        for c in 1..basis.dim() {
            let overlap = crate::linalg::dot(&basis.columns().column(0), &basis.columns().column(c));
            assert!((overlap.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn pencil_matches_explicit_basis() {
        let (spec, psi, h) = two_by_two_setup();
        let dt = 0.41;
        let d = 5;
        let p = build_exact_pencil(&spec, &psi, d, dt).unwrap();
        let basis = build_krylov_basis(&spec, &psi, d, dt).unwrap();
        let v = basis.columns();
        let gram = v.adjoint_mul(v);
        let hv = v.adjoint_mul(&h.entries().mul(v));
        assert!(gram.sub(p.smat()).max_abs() < 1e-10, "S != V^H V");
        assert!(hv.sub(p.hmat()).max_abs() < 1e-10, "H != V^H H V");
        for c in 0..basis.dim() {
            let nrm = crate::linalg::norm(&v.column(c));
            assert!((nrm - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_pencil_invariants_on_random_spectra() {
        // Random Hermitian "Hamiltonians" exercise the Toeplitz, Hermiticity,
        // unit-diagonal and PSD invariants away from the lattice models.
        for seed in 0..6u64 {
            let n = 6 + (seed as usize % 3) * 4;
            let a = random_hermitian::<f64>(n, 1000 + seed);
            let op = HermitianOperator::new(a, "random").unwrap();
            let spec = spectral_decompose(&op).unwrap();
            let psi = random_state::<f64>(n, 2000 + seed);
            let d = 4;
            let p = build_exact_pencil(&spec, &psi, d, 0.9).unwrap();
            let dim = p.dim();
            assert!(p.smat().is_hermitian(1e-12));
            assert!(p.hmat().is_hermitian(1e-12));
            for j in 0..dim {
                assert!((p.smat()[(j, j)].re - 1.0).abs() < 1e-12);
                for k in 0..dim {
                    if j + 1 < dim && k + 1 < dim {
                        assert!(
                            (p.smat()[(j, k)] - p.smat()[(j + 1, k + 1)]).norm() < 1e-12,
                            "S not Toeplitz"
                        );
                        assert!(
                            (p.hmat()[(j, k)] - p.hmat()[(j + 1, k + 1)]).norm() < 1e-12,
                            "H not Toeplitz"
                        );
                    }
                }
            }
            let svals = eigh_values(p.smat()).unwrap();
            assert!(svals[0] > -1e-10, "exact S must be PSD, got {}", svals[0]);

            // Rayleigh-type bound |c^H H c| <= ||H|| c^H S c for random c.
            let hnorm = spec
                .eigenvalues()
                .iter()
                .fold(0.0f64, |m, &v| m.max(v.abs()));
            for t in 0..5 {
                let c = random_vector::<f64>(dim, 3000 + 10 * seed + t);
                let num = quadratic_form(p.hmat(), &c).re.abs();
                let den = quadratic_form(p.smat(), &c).re;
                assert!(num <= hnorm * den + 1e-9, "Rayleigh bound violated");
            }
        }
    }

    #[test]
    fn pencils_nest_as_central_blocks() {
        let (spec, psi, _) = two_by_two_setup();
        let dt = 0.37;
        let big = build_exact_pencil(&spec, &psi, 6, dt).unwrap();
        let small = build_exact_pencil(&spec, &psi, 4, dt).unwrap();
        let cut = big.central_block(4);
        assert!(cut.smat().sub(small.smat()).max_abs() < 1e-13);
        assert!(cut.hmat().sub(small.hmat()).max_abs() < 1e-13);
    }

    #[test]
    fn trotter_with_single_term_is_exact() {
        let (spec, psi, h) = two_by_two_setup();
        let dt = 0.52;
        let d = 3;
        let exact = build_exact_pencil(&spec, &psi, d, dt).unwrap();
        let trotter =
            build_trotter_pencil(&h, std::slice::from_ref(&h), &psi, d, dt, 1).unwrap();
        assert_eq!(trotter.construction(), PencilConstruction::Trotter);
        assert!(trotter.smat().sub(exact.smat()).max_abs() < 1e-10);
        assert!(trotter.hmat().sub(exact.hmat()).max_abs() < 1e-10);
    }

    fn heisenberg_split(
        lat: &SpinLattice,
        j: f64,
        h: f64,
    ) -> (HermitianOperator<f64>, Vec<HermitianOperator<f64>>) {
        let full = build_heisenberg::<f64>(lat, j, h).unwrap();
        let mut terms = Vec::new();
        let dim = full.dim();
        let sites = lat.sites();
        let mut field_m = CMatrix::<f64>::zeros(dim, dim);
        for b in 0..dim {
            let mut diag = 0.0;
            for s in 0..sites {
                diag += if (b >> s) & 1 == 0 { h } else { -h };
            }
            field_m[(b, b)] = Complex::new(diag, 0.0);
        }
        terms.push(HermitianOperator::new(field_m, "field").unwrap());
        for &(a, b) in lat.edges() {
            let mut em = CMatrix::<f64>::zeros(dim, dim);
            for basis in 0..dim {
                let za = if (basis >> a) & 1 == 0 { 1.0 } else { -1.0 };
                let zb = if (basis >> b) & 1 == 0 { 1.0 } else { -1.0 };
                em[(basis, basis)] += Complex::new(j * za * zb, 0.0);
                if ((basis >> a) & 1) != ((basis >> b) & 1) {
                    let flipped = basis ^ (1 << a) ^ (1 << b);
                    em[(flipped, basis)] += Complex::new(2.0, 0.0);
                }
            }
            terms.push(HermitianOperator::new(em, format!("edge {a}-{b}")).unwrap());
        }
        (full, terms)
    }

    #[test]
    fn trotter_converges_to_exact_with_steps() {
        let lat = SpinLattice::new(2, 2, Boundary::Open).unwrap();
        let (h, terms) = heisenberg_split(&lat, 1.0, 0.2);
        let psi = antiferromagnetic_state::<f64>(&lat, true).unwrap();
        let spec = spectral_decompose(&h).unwrap();
        let d = 3;
        let dt = 0.3;
        let exact = build_exact_pencil(&spec, &psi, d, dt).unwrap();
        let mut errs = Vec::new();
        for steps in [1usize, 2, 4, 8, 16, 32, 64] {
            let t = build_trotter_pencil(&h, &terms, &psi, d, dt, steps).unwrap();
            errs.push(t.smat().sub(exact.smat()).max_abs());
        }
        // First-order formula: error shrinks roughly linearly in 1/steps and
        // monotonically beyond the first few step counts.
        for w in errs[1..].windows(2) {
            assert!(w[1] < w[0], "errors not decreasing: {errs:?}");
        }
        assert!(errs.last().unwrap() < &(errs[0] / 10.0));
    }

    #[test]
    fn generic_single_step_split_breaks_positivity() {
        // The exact overlap matrix is PSD; a crude single-step product
        // formula with a generic reference state is not. (The checkerboard
        // product state happens to stay numerically PSD on this lattice, so
        // the search uses a generic state.)
        let lat = SpinLattice::new(2, 2, Boundary::Open).unwrap();
        let (h, terms) = heisenberg_split(&lat, 1.0, 0.2);
        let psi = random_state::<f64>(16, 101);
        let mut found = None;
        'outer: for d in 2..=8usize {
            for dt in [0.3, 0.5, 0.8, 1.2, 2.0] {
                let t = build_trotter_pencil(&h, &terms, &psi, d, dt, 1).unwrap();
                let smin = eigh_values(t.smat()).unwrap()[0];
                if smin < -1e-6 {
                    found = Some((d, dt, smin));
                    break 'outer;
                }
            }
        }
        let (d, dt, smin) =
            found.expect("no (d, dt) produced a negative overlap eigenvalue");
        assert!(smin < -1e-6, "d={d} dt={dt} gave smin={smin}");
    }

    #[test]
    fn trotter_rejects_wrong_split() {
        let (spec, psi, h) = two_by_two_setup();
        let _ = spec;
        let half = HermitianOperator::new(h.entries().scale(0.5), "half").unwrap();
        let err = build_trotter_pencil(&h, std::slice::from_ref(&half), &psi, 2, 0.4, 1);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn sector_pencil_timestep_comes_from_sector_range() {
        let lat = SpinLattice::new(3, 3, Boundary::Open).unwrap();
        let h = build_heisenberg::<f64>(&lat, 1.0, 0.2).unwrap();
        let psi = antiferromagnetic_state::<f64>(&lat, false).unwrap();
        let (hs, ps) = sector_restrict(&h, &psi).unwrap();
        let spec = spectral_decompose(&hs).unwrap();
        let q = spectral_quantities(&spec, &ps, 1e-8).unwrap();
        let dt = default_dt(&q).unwrap();
        assert!((dt - std::f64::consts::PI / q.spectral_range).abs() < 1e-15);
    }

    #[test]
    fn debug_dump_round_trips() {
        let (spec, psi, _) = two_by_two_setup();
        let p = build_exact_pencil(&spec, &psi, 2, 0.5).unwrap();
        let dump = p.debug_dump();
        let text = serde_json::to_string(&dump).unwrap();
        let back: PencilDump = serde_json::from_str(&text).unwrap();
        assert_eq!(back.dim, 5);
        assert_eq!(back.construction, PencilConstruction::Exact);
        for r in 0..5 {
            for c in 0..5 {
                assert_eq!(back.s_re[r][c], p.smat()[(r, c)].re);
                assert_eq!(back.h_im[r][c], p.hmat()[(r, c)].im);
            }
        }
    }
}
