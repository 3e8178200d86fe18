//! Effective Krylov bases and effective Hamiltonians.
//!
//! The bound proofs rest on rewriting the noisy, thresholded pair as an exact
//! pair of a nearby Hamiltonian in a nearby basis. This module materializes
//! both constructions (one used for the lower bound, one for the upper bound)
//! so their defining identities and norm estimates are machine-checkable,
//! together with the Weyl / Davis-Kahan oracles those estimates lean on.
//! Everything here is a verification harness, not a production path: it runs
//! at small dimensions inside the test suites.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::krylov::{KrylovBasis, KrylovPencil};
use crate::linalg::{
    eigh, hermitian_pinv, hermitian_sqrt_with_cutoff, norm, operator_norm,
    polar_orthonormal_factor, projector_from_columns, quadratic_form, spectral_norm_hermitian,
    CMatrix,
};
use crate::noise::NoisyPencil;
use crate::operators::HermitianOperator;
use crate::scalar::Scalar;
use crate::solver::threshold;

/// The noisy pair conjugated by the projector onto kept overlap eigenspaces.
#[derive(Clone, Debug)]
pub struct ProjectedPencil<T> {
    /// Projector onto eigenspaces of `S'` with eigenvalue >= epsilon.
    pub pi: CMatrix<T>,
    /// `pi H' pi`.
    pub hpp: CMatrix<T>,
    /// `pi S' pi`.
    pub spp: CMatrix<T>,
    pub kept_dim: usize,
    pub epsilon: T,
}

/// Project the noisy pair onto the kept overlap eigenspaces.
pub fn project_pencil<T: Scalar>(
    noisy: &NoisyPencil<T>,
    epsilon: T,
) -> Result<ProjectedPencil<T>> {
    let (basis, kept_dim) = threshold(noisy.sp(), epsilon)?;
    let pi = projector_from_columns(&basis);
    let hpp = pi.mul(&noisy.hp().mul(&pi)).hermitize();
    let spp = pi.mul(&noisy.sp().mul(&pi)).hermitize();
    Ok(ProjectedPencil {
        pi,
        hpp,
        spp,
        kept_dim,
        epsilon,
    })
}

/// Effective objects behind the lower bound: the ideal-basis polar factor
/// `F`, the alignment unitary `G`, the effective basis `V' = F G sqrt(S'')`,
/// and the effective Hamiltonian that reproduces the projected pair.
#[derive(Clone, Debug)]
pub struct LowerEffective<T> {
    /// Polar factor of the ideal basis: `V = F sqrt(S)`, orthonormal columns.
    pub f: CMatrix<T>,
    /// Unitary polar factor of `sqrt(S) pi`.
    pub g: CMatrix<T>,
    /// Effective Krylov basis, `dim x D`.
    pub v_prime: CMatrix<T>,
    /// Effective Hamiltonian, `dim x dim` Hermitian.
    pub h_prime: CMatrix<T>,
    /// Whether `||S' - S|| <= epsilon` held, as the norm estimate assumes.
    pub assumption_ok: bool,
}

/// Build the lower-bound effective pair from the exact basis/pencil, the
/// noisy pair and its projection.
pub fn build_lower_effective<T: Scalar>(
    basis: &KrylovBasis<T>,
    pencil: &KrylovPencil<T>,
    noisy: &NoisyPencil<T>,
    projected: &ProjectedPencil<T>,
    hamiltonian: &HermitianOperator<T>,
) -> Result<LowerEffective<T>> {
    let dims = pencil.dim();
    if basis.dim() != dims || noisy.dim() != dims || projected.pi.rows() != dims {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    let s = pencil.smat();
    let s_top = eigh(s)?.values.last().copied().unwrap_or(T::zero());
    let sqrt_s = hermitian_sqrt_with_cutoff(s, T::real(1e-12) * s_top.max(T::one()))?;

    // Polar factor of the ideal basis: V = F sqrt(S) with F^H F = 1. Where S
    // is (cleanly) rank deficient the free columns of F are completed
    // orthonormally; they multiply the null space of sqrt(S) and drop out.
    let f = polar_orthonormal_factor(basis.columns(), s)?;

    // Unitary polar factor of sqrt(S) pi, via the eigendecomposition of
    // (sqrt(S) pi)^H (sqrt(S) pi) = pi S pi. Only the action on the range of
    // pi is pinned down; the rest is completed orthonormally.
    let a = sqrt_s.mul(&projected.pi);
    let gram = projected.pi.mul(&s.mul(&projected.pi)).hermitize();
    let g = polar_orthonormal_factor(&a, &gram)?;

    // Nonzero eigenvalues of S'' sit at or above epsilon; everything below
    // epsilon/2 is numerical null space and must not leak into V'.
    let sqrt_spp =
        hermitian_sqrt_with_cutoff(&projected.spp, projected.epsilon * T::real(0.5))?;
    let v_prime = f.mul(&g.mul(&sqrt_spp));

    // Effective Hamiltonian: H + V' S''^+ (H'_mat - V'^H H V') S''^+ V'^H.
    let spp_pinv = hermitian_pinv(&projected.spp, projected.epsilon * T::real(0.5))?;
    let h_v = hamiltonian.entries().mul(&v_prime);
    let middle = noisy.hp().sub(&v_prime.adjoint_mul(&h_v)).hermitize();
    let correction = v_prime
        .mul(&spp_pinv.mul(&middle.mul(&spp_pinv)))
        .mul(&v_prime.adjoint());
    let h_prime = hamiltonian.entries().add(&correction).hermitize();

    Ok(LowerEffective {
        f,
        g,
        v_prime,
        h_prime,
        assumption_ok: noisy.ds() <= projected.epsilon,
    })
}

/// Effective objects behind the upper bound: a rescaled ideal basis that
/// matches the noisy overlap at one kept coordinate vector, and a rank-one
/// Hamiltonian correction that matches the noisy energy there.
#[derive(Clone, Debug)]
pub struct UpperEffective<T> {
    /// The kept coordinate vector (`c' = pi c'`).
    pub c_prime: Vec<Complex<T>>,
    /// Rescaling factor `sqrt(c'^H S' c' / c'^H S c')`.
    pub scale: T,
    /// Effective basis `scale * V`.
    pub v_prime: CMatrix<T>,
    /// Effective Hamiltonian, Hermitian.
    pub h_prime: CMatrix<T>,
    /// The distinguished (unnormalized) state `V' c'`.
    pub psi: Vec<Complex<T>>,
}

/// Build the upper-bound effective pair at the coordinate vector `c_prime`.
pub fn build_upper_effective<T: Scalar>(
    basis: &KrylovBasis<T>,
    pencil: &KrylovPencil<T>,
    noisy: &NoisyPencil<T>,
    projected: &ProjectedPencil<T>,
    hamiltonian: &HermitianOperator<T>,
    c_prime: &[Complex<T>],
) -> Result<UpperEffective<T>> {
    let dims = pencil.dim();
    if c_prime.len() != dims || basis.dim() != dims || noisy.dim() != dims {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    let c_norm = norm(c_prime);
    if c_norm == T::zero() {
        return Err(Error::Precondition("coordinate vector must be nonzero".into()));
    }
    let projected_c = projected.pi.mul_vec(c_prime);
    let away: T = c_prime
        .iter()
        .zip(projected_c.iter())
        .map(|(a, b)| (*a - *b).norm_sqr())
        .fold(T::zero(), |x, y| x + y)
        .sqrt();
    if away > T::real(1e-10) * c_norm {
        return Err(Error::Precondition(
            "coordinate vector must lie in the kept overlap eigenspaces".into(),
        ));
    }

    let noisy_len = quadratic_form(noisy.sp(), c_prime).re;
    if noisy_len <= T::zero() {
        return Err(Error::DegenerateDirection);
    }
    let ideal_len = quadratic_form(pencil.smat(), c_prime).re;
    if ideal_len <= T::zero() {
        return Err(Error::DegenerateDirection);
    }
    let scale = (noisy_len / ideal_len).sqrt();
    let v_prime = basis.columns().scale(scale);
    let psi = v_prime.mul_vec(c_prime);
    let psi_sq = psi
        .iter()
        .map(|z| z.norm_sqr())
        .fold(T::zero(), |a, b| a + b);

    // Rank-one correction carrying the noisy energy at c'.
    let noisy_energy = quadratic_form(noisy.hp(), c_prime).re;
    let ideal_energy = quadratic_form(hamiltonian.entries(), &psi).re;
    let coeff = (noisy_energy - ideal_energy) / (psi_sq * psi_sq);
    let n = hamiltonian.dim();
    let mut h_prime = hamiltonian.entries().clone();
    for r in 0..n {
        for c in 0..n {
            h_prime[(r, c)] += (psi[r] * psi[c].conj()).scale(coeff);
        }
    }
    let h_prime = h_prime.hermitize();

    Ok(UpperEffective {
        c_prime: c_prime.to_vec(),
        scale,
        v_prime,
        h_prime,
        psi,
    })
}

/// Spectral sets for the Davis-Kahan check: closed intervals on the real
/// line, one selecting eigenvalues of the first matrix, one of the second.
#[derive(Clone, Copy, Debug)]
pub struct GapSets<T> {
    pub first: (T, T),
    pub second: (T, T),
}

impl<T: Scalar> GapSets<T> {
    /// Distance between the two intervals.
    pub fn gap(&self) -> T {
        let (a_lo, a_hi) = self.first;
        let (b_lo, b_hi) = self.second;
        if b_lo > a_hi {
            b_lo - a_hi
        } else if a_lo > b_hi {
            a_lo - b_hi
        } else {
            T::zero()
        }
    }
}

/// Outcome of the Weyl and Davis-Kahan checks on a matrix pair.
#[derive(Clone, Copy, Debug)]
pub struct OracleReport<T> {
    /// Max eigenvalue displacement and its Weyl bound `||A - B||`.
    pub weyl_deviation: T,
    pub weyl_bound: T,
    pub weyl_ok: bool,
    /// `||P_A(first) P_B(second)||` and its bound `||A - B|| / gap`.
    pub sin_theta: T,
    pub sin_theta_bound: T,
    pub sin_theta_ok: bool,
    pub gap: T,
}

/// Check Weyl's eigenvalue-displacement bound and the Davis-Kahan projector
/// bound on a Hermitian pair.
pub fn matrix_analysis_oracles<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    gaps: &GapSets<T>,
) -> Result<OracleReport<T>> {
    if a.dim() != b.dim() {
        return Err(Error::Precondition("matrix dimensions differ".into()));
    }
    if gaps.first.0 > gaps.first.1 || gaps.second.0 > gaps.second.1 {
        return Err(Error::Precondition("malformed interval".into()));
    }
    let gap = gaps.gap();
    if !(gap > T::zero()) {
        return Err(Error::Precondition(
            "spectral sets must be separated by a positive gap".into(),
        ));
    }
    let diff_norm = spectral_norm_hermitian(&a.entries().sub(b.entries()).hermitize())?;

    let ea = eigh(a.entries())?;
    let eb = eigh(b.entries())?;
    let weyl_deviation = ea
        .values
        .iter()
        .zip(eb.values.iter())
        .map(|(x, y)| (*x - *y).abs())
        .fold(T::zero(), |m, v| m.max(v));
    let slack = T::real(1e-12) * diff_norm.max(T::one());
    let weyl_ok = weyl_deviation <= diff_norm + slack;

    let select = |eig: &crate::linalg::HermitianEigen<T>, (lo, hi): (T, T)| {
        let cols: Vec<Vec<Complex<T>>> = (0..eig.values.len())
            .filter(|&i| eig.values[i] >= lo && eig.values[i] <= hi)
            .map(|i| eig.vectors.column(i))
            .collect();
        if cols.is_empty() {
            CMatrix::zeros(a.dim(), a.dim())
        } else {
            projector_from_columns(&CMatrix::from_columns(a.dim(), &cols))
        }
    };
    let pa = select(&ea, gaps.first);
    let pb = select(&eb, gaps.second);
    let sin_theta = operator_norm(&pa.mul(&pb))?;
    let sin_theta_bound = diff_norm / gap;
    let sin_theta_ok = sin_theta <= sin_theta_bound + slack;

    Ok(OracleReport {
        weyl_deviation,
        weyl_bound: diff_norm,
        weyl_ok,
        sin_theta,
        sin_theta_bound,
        sin_theta_ok,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krylov::{build_exact_pencil, build_krylov_basis};
    use crate::linalg::hermitian_sqrt_psd;
    use crate::noise::{perturb_gaussian, NoiseSpec};
    use crate::operators::{
        antiferromagnetic_state, build_heisenberg, spectral_decompose, spectral_quantities,
        Boundary, SpinLattice,
    };
    use crate::solver::{solve_pair, solve_thresholded};
    use crate::testing::{random_hermitian, random_vector, SplitMix64};

    struct Instance {
        h: HermitianOperator<f64>,
        pencil: KrylovPencil<f64>,
        basis: KrylovBasis<f64>,
        hnorm: f64,
    }

    fn instance(d: usize, dt: f64) -> Instance {
        let lat = SpinLattice::new(2, 2, Boundary::Open).unwrap();
        let h = build_heisenberg::<f64>(&lat, 1.0, 0.2).unwrap();
        let psi = antiferromagnetic_state::<f64>(&lat, true).unwrap();
        let spec = spectral_decompose(&h).unwrap();
        let q = spectral_quantities(&spec, &psi, 1e-10).unwrap();
        let pencil = build_exact_pencil(&spec, &psi, d, dt).unwrap();
        let basis = build_krylov_basis(&spec, &psi, d, dt).unwrap();
        Instance {
            h,
            pencil,
            basis,
            hnorm: q.op_norm,
        }
    }

    fn noisy_draw(inst: &Instance, sigma: f64, seed: u64) -> NoisyPencil<f64> {
        let spec = NoiseSpec::gaussian(sigma, inst.hnorm, seed).unwrap();
        perturb_gaussian(&inst.pencil, &spec).unwrap()
    }

    #[test]
    fn projection_trivial_cases() {
        let inst = instance(2, 0.5);
        // Identity overlap: nothing removed.
        let id = NoisyPencil::from_pair(
            &inst.pencil,
            inst.pencil.hmat().clone(),
            CMatrix::identity(inst.pencil.dim()),
        )
        .unwrap();
        let p = project_pencil(&id, 0.5).unwrap();
        assert_eq!(p.kept_dim, inst.pencil.dim());
        assert!(p.pi.sub(&CMatrix::identity(inst.pencil.dim())).max_abs() < 1e-12);
        assert!(p.spp.sub(id.sp()).max_abs() < 1e-12);
        assert!(p.hpp.sub(id.hp()).max_abs() < 1e-12);
        // Idempotence.
        assert!(p.pi.mul(&p.pi).sub(&p.pi).max_abs() < 1e-12);
    }

    #[test]
    fn projected_pair_reproduces_thresholded_spectrum() {
        let inst = instance(4, 0.45);
        let noisy = noisy_draw(&inst, 1e-3, 3);
        let eps = 0.05;
        let direct = solve_thresholded(&noisy, eps).unwrap();
        let projected = project_pencil(&noisy, eps).unwrap();

        // Independent restriction: eigenvectors of S'' with eigenvalue above
        // eps/2 span the range of pi.
        let spp_eig = eigh(&projected.spp).unwrap();
        let cols: Vec<Vec<Complex<f64>>> = (0..projected.spp.rows())
            .filter(|&i| spp_eig.values[i] > eps / 2.0)
            .map(|i| spp_eig.vectors.column(i))
            .collect();
        let c = CMatrix::from_columns(projected.spp.rows(), &cols);
        let htil = c.adjoint_mul(&projected.hpp.mul(&c)).hermitize();
        let stil = c.adjoint_mul(&projected.spp.mul(&c)).hermitize();
        let padded = solve_pair(&htil, &stil, eps).unwrap();
        assert_eq!(padded.kept_dim, direct.kept_dim);
        for (x, y) in padded.spectrum.iter().zip(direct.spectrum.iter()) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn lower_effective_reduces_to_ideal_without_noise() {
        // d = 1 keeps the exact overlap numerically nonsingular here.
        let inst = instance(1, 0.5);
        let noiseless = NoisyPencil::from_pair(
            &inst.pencil,
            inst.pencil.hmat().clone(),
            inst.pencil.smat().clone(),
        )
        .unwrap();
        let smin = eigh(inst.pencil.smat()).unwrap().values[0];
        assert!(smin > 1e-10, "test needs a numerically nonsingular overlap");
        let eps = smin / 2.0;
        let projected = project_pencil(&noiseless, eps).unwrap();
        assert_eq!(projected.kept_dim, inst.pencil.dim());
        let eff =
            build_lower_effective(&inst.basis, &inst.pencil, &noiseless, &projected, &inst.h)
                .unwrap();
        assert!(eff.assumption_ok);
        let drift = spectral_norm_hermitian(
            &eff.h_prime.sub(inst.h.entries()).hermitize(),
        )
        .unwrap();
        assert!(drift < 1e-7 * inst.hnorm, "H' deviates by {drift}");
    }

    #[test]
    fn lower_effective_identities_and_norm_bound() {
        let inst = instance(3, 0.5);
        let sigma = 1e-3;
        let eps = 0.05; // comfortably above the realized ||S'-S||
        for seed in 0..30u64 {
            let noisy = noisy_draw(&inst, sigma, 100 + seed);
            assert!(noisy.ds() <= eps, "draw exceeded the assumption");
            let projected = project_pencil(&noisy, eps).unwrap();
            let eff =
                build_lower_effective(&inst.basis, &inst.pencil, &noisy, &projected, &inst.h)
                    .unwrap();
            assert!(eff.assumption_ok);

            let dims = inst.pencil.dim();
            // F has orthonormal columns; G is unitary.
            let ferr = eff.f.adjoint_mul(&eff.f).sub(&CMatrix::identity(dims)).max_abs();
            assert!(ferr < 1e-10, "F^H F deviates by {ferr}");
            let gerr = eff.g.adjoint_mul(&eff.g).sub(&CMatrix::identity(dims)).max_abs();
            assert!(gerr < 1e-10, "G^H G deviates by {gerr}");
            // G realizes the polar decomposition of sqrt(S) pi. Null
            // directions of the gram contribute O(sqrt(machine zero)), so
            // the achievable residual is ~1e-8, not machine precision.
            let sqrt_s = hermitian_sqrt_psd(inst.pencil.smat()).unwrap();
            let lhs = sqrt_s.mul(&projected.pi);
            let rhs = eff
                .g
                .mul(&hermitian_sqrt_psd(&projected.pi.mul(&inst.pencil.smat().mul(&projected.pi)).hermitize()).unwrap());
            assert!(lhs.sub(&rhs).max_abs() < 1e-7);

            // Gram identity and projected-Hamiltonian identity.
            let gram_err = eff
                .v_prime
                .adjoint_mul(&eff.v_prime)
                .sub(&projected.spp)
                .max_abs();
            assert!(gram_err < 1e-9, "V'^H V' != S'' ({gram_err})");
            let hpp_norm = spectral_norm_hermitian(&projected.hpp).unwrap();
            let sandwich = eff
                .v_prime
                .adjoint_mul(&eff.h_prime.mul(&eff.v_prime))
                .sub(&projected.hpp)
                .max_abs();
            assert!(
                sandwich < 1e-9 * hpp_norm.max(1.0),
                "V'^H H' V' != H'' ({sandwich})"
            );

            // Norm estimate with the realized errors.
            let drift = spectral_norm_hermitian(
                &eff.h_prime.sub(inst.h.entries()).hermitize(),
            )
            .unwrap();
            let allowed =
                (noisy.dh() + (1.0 + 2.0f64.sqrt()) * noisy.ds() * inst.hnorm) / eps;
            assert!(
                drift <= allowed + 1e-9,
                "seed {seed}: ||H'-H|| = {drift} > {allowed}"
            );
        }
    }

    #[test]
    fn lower_effective_flags_violated_assumption() {
        let inst = instance(3, 0.5);
        let noisy = noisy_draw(&inst, 1e-2, 7);
        let eps = noisy.ds() / 10.0;
        let projected = project_pencil(&noisy, eps).unwrap();
        let eff = build_lower_effective(&inst.basis, &inst.pencil, &noisy, &projected, &inst.h)
            .unwrap();
        assert!(!eff.assumption_ok);
    }

    #[test]
    fn upper_effective_reduces_to_ideal_without_noise() {
        let inst = instance(1, 0.5);
        let noiseless = NoisyPencil::from_pair(
            &inst.pencil,
            inst.pencil.hmat().clone(),
            inst.pencil.smat().clone(),
        )
        .unwrap();
        let smin = eigh(inst.pencil.smat()).unwrap().values[0];
        assert!(smin > 1e-10);
        let projected = project_pencil(&noiseless, smin / 2.0).unwrap();
        let dims = inst.pencil.dim();
        let mut e0 = vec![Complex::new(0.0, 0.0); dims];
        e0[0] = Complex::new(1.0, 0.0);
        let eff = build_upper_effective(
            &inst.basis,
            &inst.pencil,
            &noiseless,
            &projected,
            &inst.h,
            &e0,
        )
        .unwrap();
        assert!((eff.scale - 1.0).abs() < 1e-10);
        let drift =
            spectral_norm_hermitian(&eff.h_prime.sub(inst.h.entries()).hermitize()).unwrap();
        assert!(drift < 1e-9 * inst.hnorm);
    }

    #[test]
    fn upper_effective_identities_and_norm_bound() {
        let inst = instance(3, 0.5);
        let sigma = 1e-3;
        let eps = 0.02;
        let mut rng = SplitMix64::new(99);
        for seed in 0..100u64 {
            let noisy = noisy_draw(&inst, sigma, 200 + seed);
            let projected = project_pencil(&noisy, eps).unwrap();
            // Random direction inside the kept subspace.
            let raw = random_vector::<f64>(inst.pencil.dim(), rng.next_u64());
            let c = projected.pi.mul_vec(&raw);
            if norm(&c) < 1e-6 {
                continue;
            }
            let eff = build_upper_effective(
                &inst.basis,
                &inst.pencil,
                &noisy,
                &projected,
                &inst.h,
                &c,
            )
            .unwrap();

            // Overlap identity at c'.
            let lhs = quadratic_form(&eff.v_prime.adjoint_mul(&eff.v_prime), &c).re;
            let rhs = quadratic_form(noisy.sp(), &c).re;
            assert!((lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0));

            // Energy identity at psi.
            let h_norm_p = spectral_norm_hermitian(noisy.hp()).unwrap();
            let psi_sq: f64 = eff.psi.iter().map(|z| z.norm_sqr()).sum();
            let lhs_e = quadratic_form(&eff.h_prime, &eff.psi).re;
            let rhs_e = quadratic_form(noisy.hp(), &c).re;
            assert!(
                (lhs_e - rhs_e).abs() < 1e-9 * h_norm_p.max(1.0),
                "energy identity off by {}",
                (lhs_e - rhs_e).abs()
            );

            // Norm estimate.
            let drift =
                spectral_norm_hermitian(&eff.h_prime.sub(inst.h.entries()).hermitize()).unwrap();
            let c_sq: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            let allowed = c_sq * (noisy.dh() + inst.hnorm * noisy.ds()) / psi_sq;
            assert!(
                drift <= allowed + 1e-9,
                "seed {seed}: ||H'-H|| = {drift} > {allowed}"
            );
        }
    }

    #[test]
    fn upper_effective_rejects_bad_directions() {
        let inst = instance(2, 0.5);
        let noisy = noisy_draw(&inst, 1e-3, 11);
        let projected = project_pencil(&noisy, 0.02).unwrap();
        let dims = inst.pencil.dim();
        let zero = vec![Complex::new(0.0, 0.0); dims];
        assert!(build_upper_effective(
            &inst.basis,
            &inst.pencil,
            &noisy,
            &projected,
            &inst.h,
            &zero
        )
        .is_err());
        if projected.kept_dim < dims {
            // A vector with weight outside the kept eigenspaces is rejected.
            let spp_eig = eigh(noisy.sp()).unwrap();
            let discarded = spp_eig.vectors.column(0);
            assert!(build_upper_effective(
                &inst.basis,
                &inst.pencil,
                &noisy,
                &projected,
                &inst.h,
                &discarded
            )
            .is_err());
        }
    }

    #[test]
    fn oracles_trivial_and_commuting_cases() {
        let a = HermitianOperator::new(random_hermitian::<f64>(8, 5), "a").unwrap();
        let sets = GapSets {
            first: (-10.0, 0.0),
            second: (1.0, 10.0),
        };
        let report = matrix_analysis_oracles(&a, &a, &sets).unwrap();
        assert!(report.weyl_ok && report.sin_theta_ok);
        assert_eq!(report.weyl_deviation, 0.0);
        assert!(report.sin_theta < 1e-12);

        // Commuting diagonal shift: Weyl is tight.
        let d1 = CMatrix::from_fn(3, 3, |r, c| {
            if r == c {
                Complex::new(r as f64, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        let d2 = d1.add(&CMatrix::identity(3).scale(0.1));
        let op1 = HermitianOperator::new(d1, "d1").unwrap();
        let op2 = HermitianOperator::new(d2, "d2").unwrap();
        let sets2 = GapSets {
            first: (-0.5, 0.5),
            second: (0.9, 3.0),
        };
        let r2 = matrix_analysis_oracles(&op1, &op2, &sets2).unwrap();
        assert!((r2.weyl_deviation - 0.1).abs() < 1e-13);
        assert!((r2.weyl_bound - 0.1).abs() < 1e-13);
        assert!(r2.weyl_ok);

        // Overlapping sets are rejected.
        let bad = GapSets {
            first: (0.0, 1.0),
            second: (0.5, 2.0),
        };
        assert!(matrix_analysis_oracles(&op1, &op2, &bad).is_err());
    }

    #[test]
    fn oracles_hold_on_random_pairs() {
        let mut rng = SplitMix64::new(31);
        for trial in 0..60u64 {
            let a_m = random_hermitian::<f64>(12, 700 + trial);
            let e = random_hermitian::<f64>(12, 800 + trial).scale(0.05);
            let b_m = a_m.add(&e).hermitize();
            let a = HermitianOperator::new(a_m, "a").unwrap();
            let b = HermitianOperator::new(b_m, "b").unwrap();
            let lo = -8.0;
            let hi = 8.0;
            let t = lo + (hi - lo - 1.0) * (rng.next_centered() + 0.5);
            let gap = 0.05 + 0.4 * (rng.next_centered() + 0.5);
            let sets = GapSets {
                first: (lo, t),
                second: (t + gap, hi),
            };
            let report = matrix_analysis_oracles(&a, &b, &sets).unwrap();
            assert!(report.weyl_ok, "Weyl violated on trial {trial}");
            assert!(report.sin_theta_ok, "Davis-Kahan violated on trial {trial}");
        }
    }
}
