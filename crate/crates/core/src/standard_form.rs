//! GNS standard form of a Gibbs state on the `d×d` matrix algebra.
//!
//! The Hilbert space is `M_d` with the Hilbert–Schmidt inner product, the
//! algebra acts by left multiplication and the commutant by right
//! multiplication. With `ρ = e^{−βH}/Z` and `Ω = ρ^{1/2}`:
//!
//! * `Δ^z ξ = ρ^z ξ ρ^{−z}` (so `Δ = e^{−βL}` with `Lξ = Hξ − ξH`),
//! * `J ξ = ξ*`,
//! * `Δ_{φ,Ω}^z ξ = φ^z ξ ρ^{−z}` with `φ^z` taken on the support of `φ`,
//! * `τ_z(A) = e^{izH} A e^{−izH}`.
//!
//! Every power of `ρ` is applied in the eigenbasis of `H`, where `Δ^z` is an
//! entrywise scaling by `(ρ_j/ρ_k)^z`. The Liouvillean is never built as a
//! `d²×d²` matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::holder_verify::InsertionTuple;
use crate::record::{RecordMeta, VerificationRecord};
use crate::spectral::{
    check_psd_spectrum, eig_hermitian, ComplexMatrix, SpectralDecomposition, SupportPolicy, TOL_PSD,
};

/// Smallest admissible eigenvalue of `ρ`.
pub const FAITHFULNESS_FLOOR: f64 = 1e-13;
/// Absolute tolerance for modular identities on unit-scale residuals.
pub const TOL_MODULAR: f64 = 1e-9;
/// Absolute tolerance for the KMS boundary identity on unit-scale residuals.
pub const TOL_KMS: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A positive normal functional `φ(X) = Tr(φ·X)`; need not be normalized or faithful.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFunctional {
    density: ComplexMatrix,
    spec: SpectralDecomposition,
}

impl StateFunctional {
    pub fn new(density: ComplexMatrix) -> Result<Self> {
        let spec = eig_hermitian(&density)?;
        check_psd_spectrum(&spec, TOL_PSD)?;
        Ok(StateFunctional { density, spec })
    }

    /// A functional given in factored form `V · diag(values) · V*` with `V`
    /// unitary. The eigenvalues are taken as exact, so only exact zeros are
    /// outside the support.
    pub fn from_spectral(basis: ComplexMatrix, values: Vec<f64>) -> Result<Self> {
        if basis.dim() != values.len() {
            return Err(Error::DimMismatch { expected: basis.dim(), got: values.len() });
        }
        if let Some(&bad) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::NotPsd(bad));
        }
        let spec = SpectralDecomposition { values, basis, cutoff: 0.0 };
        if spec.unitarity_residual() > 1e-10 * spec.dim() as f64 {
            return Err(Error::InvalidMatrix("spectral basis is not unitary".into()));
        }
        let density = spec.reconstruct().hermitian_part();
        Ok(StateFunctional { density, spec })
    }

    /// The vector state `X ↦ ⟨ξ, Xξ⟩`, with density `ξξ*`, built from the
    /// singular value decomposition of `ξ`.
    pub fn vector_state(xi: &ComplexMatrix) -> Result<Self> {
        let svd = xi.as_dmatrix().clone().svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let d = xi.dim();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        let values = order.iter().map(|&k| svd.singular_values[k].powi(2)).collect();
        let basis = ComplexMatrix::from_fn(d, |i, j| u[(i, order[j])]);
        Self::from_spectral(basis, values)
    }

    pub fn density(&self) -> &ComplexMatrix {
        &self.density
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    pub fn evaluate(&self, x: &ComplexMatrix) -> Complex64 {
        (&self.density * x).trace()
    }

    /// `φ(𝟙) = Tr φ`.
    pub fn value_on_identity(&self) -> f64 {
        self.density.trace().re
    }

    pub fn is_faithful(&self) -> bool {
        self.spec.rank() == self.dim()
    }

    pub fn power(&self, z: Complex64, policy: SupportPolicy) -> Result<ComplexMatrix> {
        self.spec.power(z, policy)
    }
}

/// Serialized ensemble: `{dim, beta, hamiltonian: [[re, im], ...] row-major, seed?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub dim: usize,
    pub beta: f64,
    pub hamiltonian: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Hamiltonian plus inverse temperature, with the derived density matrix,
/// cyclic vector and a cached spectral decomposition. Immutable.
#[derive(Debug, Clone)]
pub struct GibbsEnsemble {
    hamiltonian: ComplexMatrix,
    beta: f64,
    rho: ComplexMatrix,
    omega_vec: ComplexMatrix,
    log_partition: f64,
    h_spec: SpectralDecomposition,
    /// `ln ρ_j`, ordered like the eigenvalues of `H`.
    ln_rho: Vec<f64>,
    seed: Option<u64>,
}

impl GibbsEnsemble {
    /// `ρ = exp(−βH)/Z`, rejecting states below the faithfulness floor.
    pub fn new(hamiltonian: ComplexMatrix, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::BadBeta(beta));
        }
        let h_spec = eig_hermitian(&hamiltonian)?;
        let e_min = h_spec.min_value();
        // ln Z = −β E_min + ln Σ exp(−β (E_j − E_min))
        let shifted_sum: f64 = h_spec.values.iter().map(|&e| (-beta * (e - e_min)).exp()).sum();
        let log_partition = -beta * e_min + shifted_sum.ln();
        let ln_rho: Vec<f64> = h_spec.values.iter().map(|&e| -beta * e - log_partition).collect();
        let min_ln = ln_rho.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_ln < FAITHFULNESS_FLOOR.ln() {
            return Err(Error::FaithfulnessViolated(min_ln.exp()));
        }
        let power = |z: Complex64| {
            let diag: Vec<Complex64> = ln_rho.iter().map(|&l| (z * l).exp()).collect();
            ComplexMatrix::from_diagonal(&diag).conjugate_by(&h_spec.basis)
        };
        let rho = power(c(1.0, 0.0)).hermitian_part();
        let omega_vec = power(c(0.5, 0.0)).hermitian_part();
        let ens = GibbsEnsemble {
            hamiltonian: hamiltonian.hermitian_part(),
            beta,
            rho,
            omega_vec,
            log_partition,
            h_spec,
            ln_rho,
            seed: None,
        };
        Ok(ens)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn from_spec(spec: &EnsembleSpec) -> Result<Self> {
        let entries: Vec<Complex64> = spec.hamiltonian.iter().map(|p| c(p[0], p[1])).collect();
        let h = ComplexMatrix::from_row_major(spec.dim, &entries)?;
        let ens = Self::new(h, spec.beta)?;
        Ok(match spec.seed {
            Some(s) => ens.with_seed(s),
            None => ens,
        })
    }

    pub fn to_spec(&self) -> EnsembleSpec {
        EnsembleSpec {
            dim: self.dim(),
            beta: self.beta,
            hamiltonian: self.hamiltonian.row_major().iter().map(|z| [z.re, z.im]).collect(),
            seed: self.seed,
        }
    }

    /// Short content hash of the serialized ensemble (seed excluded).
    pub fn content_hash(&self) -> String {
        let mut spec = self.to_spec();
        spec.seed = None;
        let bytes = serde_json::to_vec(&spec).expect("ensemble spec serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// The cyclic and separating vector `Ω = ρ^{1/2}`.
    pub fn omega_vec(&self) -> &ComplexMatrix {
        &self.omega_vec
    }

    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn energy_spectrum(&self) -> &SpectralDecomposition {
        &self.h_spec
    }

    /// Eigenvalues of `ρ` in the energy ordering (descending in value).
    pub fn rho_eigenvalues(&self) -> Vec<f64> {
        self.ln_rho.iter().map(|l| l.exp()).collect()
    }

    pub fn state(&self) -> StateFunctional {
        StateFunctional::new(self.rho.clone()).expect("Gibbs density is PSD")
    }

    pub fn meta(&self) -> RecordMeta {
        RecordMeta {
            dim: Some(self.dim()),
            beta: Some(self.beta),
            seed: self.seed,
            ensemble_hash: Some(self.content_hash()),
            ..RecordMeta::default()
        }
    }

    /// `ρ^z`; always defined since `ρ` is faithful.
    pub fn rho_power(&self, z: Complex64) -> ComplexMatrix {
        let diag: Vec<Complex64> = self.ln_rho.iter().map(|&l| (z * l).exp()).collect();
        ComplexMatrix::from_diagonal(&diag).conjugate_by(&self.h_spec.basis)
    }

    /// `ω(X) = Tr(ρX)`.
    pub fn expectation(&self, x: &ComplexMatrix) -> Complex64 {
        (&self.rho * x).trace()
    }

    pub(crate) fn to_energy_basis(&self, x: &ComplexMatrix) -> ComplexMatrix {
        x.conjugate_by_adjoint(&self.h_spec.basis)
    }

    pub(crate) fn to_computational_basis(&self, x: &ComplexMatrix) -> ComplexMatrix {
        x.conjugate_by(&self.h_spec.basis)
    }

    /// `Ω` written in the energy basis: `diag(√ρ_j)`.
    pub(crate) fn omega_energy_basis(&self) -> ComplexMatrix {
        let diag: Vec<f64> = self.ln_rho.iter().map(|l| (0.5 * l).exp()).collect();
        ComplexMatrix::from_real_diagonal(&diag)
    }

    /// `Δ^z` on a vector already expressed in the energy basis.
    pub(crate) fn modular_scale(&self, z: Complex64, x: &ComplexMatrix) -> ComplexMatrix {
        let l = &self.ln_rho;
        x.map_entries(|j, k, v| v * (z * (l[j] - l[k])).exp())
    }

    fn check_dim(&self, m: &ComplexMatrix) -> Result<()> {
        m.check_dim(self.dim())
    }

    /// GNS vector `AΩ`.
    pub fn embed(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(a)?;
        Ok(a * &self.omega_vec)
    }

    /// `Δ^z ξ = ρ^z ξ ρ^{−z}`.
    pub fn modular_power_apply(&self, z: Complex64, xi: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(xi)?;
        let x = self.to_energy_basis(xi);
        Ok(self.to_computational_basis(&self.modular_scale(z, &x)))
    }

    /// `Δ_{φ,Ω}^z ξ = φ^z ξ ρ^{−z}` under the strict support policy.
    pub fn relative_modular_power_apply(
        &self,
        phi: &StateFunctional,
        z: Complex64,
        xi: &ComplexMatrix,
    ) -> Result<ComplexMatrix> {
        self.relative_modular_power_apply_with(phi, z, xi, SupportPolicy::Strict)
    }

    pub fn relative_modular_power_apply_with(
        &self,
        phi: &StateFunctional,
        z: Complex64,
        xi: &ComplexMatrix,
        policy: SupportPolicy,
    ) -> Result<ComplexMatrix> {
        self.check_dim(xi)?;
        phi.density().check_dim(self.dim())?;
        let left = phi.power(z, policy)?;
        Ok(&(&left * xi) * &self.rho_power(-z))
    }

    /// `τ_z(A) = e^{izH} A e^{−izH}` for complex `z`.
    pub fn heisenberg(&self, z: Complex64, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(a)?;
        let e = &self.h_spec.values;
        let x = self.to_energy_basis(a).map_entries(|j, k, v| v * (c(0.0, 1.0) * z * (e[j] - e[k])).exp());
        Ok(self.to_computational_basis(&x))
    }

    /// `F_{A,B}(z) = ω(A τ_z(B))`.
    ///
    /// Summed in the energy basis as `Σ A_jk B_kj exp(ln ρ_j + iz(E_k − E_j))`
    /// so that large `Im z` never multiplies a tiny weight by a huge one.
    pub fn kms_function(&self, a: &ComplexMatrix, b: &ComplexMatrix, z: Complex64) -> Result<Complex64> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        let ae = self.to_energy_basis(a);
        let be = self.to_energy_basis(b);
        let e = &self.h_spec.values;
        let d = self.dim();
        let mut sum = c(0.0, 0.0);
        for j in 0..d {
            for k in 0..d {
                let w = (c(self.ln_rho[j], 0.0) + c(0.0, 1.0) * z * (e[k] - e[j])).exp();
                sum += ae[(j, k)] * be[(k, j)] * w;
            }
        }
        Ok(sum)
    }

    /// Compares `F_{A,B}(t + iβ)` with `ω(τ_t(B) A)`.
    pub fn kms_boundary_check(&self, a: &ComplexMatrix, b: &ComplexMatrix, t: f64) -> Result<VerificationRecord> {
        let upper = self.kms_function(a, b, c(t, self.beta))?;
        let swapped = self.expectation(&(&self.heisenberg(c(t, 0.0), b)? * a));
        let scale = 1f64.max(a.operator_norm() * b.operator_norm());
        let mut meta = self.meta();
        meta.extra.insert("t".into(), t);
        meta.extra.insert("scale".into(), scale);
        Ok(VerificationRecord::residual("kms", (upper - swapped).norm(), TOL_KMS * scale).with_meta(meta))
    }

    /// Tests `ξ ∈ P^α`, i.e. whether `ρ^{−α} ξ ρ^{α−1/2}` is positive semidefinite.
    pub fn cone_membership(&self, xi: &ComplexMatrix, alpha: f64) -> Result<ConeMembership> {
        if !(0.0..=0.5).contains(&alpha) {
            return Err(Error::BadExponent(alpha));
        }
        self.check_dim(xi)?;
        let l = &self.ln_rho;
        let x = self.to_energy_basis(xi).map_entries(|j, k, v| v * (-alpha * l[j] + (alpha - 0.5) * l[k]).exp());
        let congruent = self.to_computational_basis(&x);
        let herm = congruent.hermitian_part();
        let spec = eig_hermitian(&herm)?;
        let scale = spec.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let min_eig = spec.min_value();
        let hermitian = congruent.hermiticity_defect() <= 1e-10;
        Ok(ConeMembership {
            member: hermitian && min_eig >= -TOL_PSD * scale.max(f64::MIN_POSITIVE),
            witness_min_eig: min_eig,
        })
    }

    /// Checks the Tomita relations and the standard-form axioms on sample operators.
    pub fn tomita_check(&self, samples: &[ComplexMatrix]) -> Result<VerificationRecord> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        for s in samples {
            self.check_dim(s)?;
        }
        let omega = &self.omega_vec;
        let half = c(0.5, 0.0);
        let scale_of = |m: &ComplexMatrix| 1f64.max(m.operator_norm());

        let mut polar: f64 = 0.0;
        let mut involution: f64 = 0.0;
        let mut commutant: f64 = 0.0;
        let mut cone: f64 = 0.0;
        let mut center: f64 = 0.0;
        let vectors: Vec<ComplexMatrix> =
            samples.iter().map(|a| self.embed(a)).chain(samples.iter().cloned().map(Ok)).collect::<Result<_>>()?;

        for a in samples {
            // S(AΩ) = JΔ^{1/2}(AΩ) = A*Ω
            let s_a = modular_conjugation_apply(&self.modular_power_apply(half, &self.embed(a)?)?);
            polar = polar.max((&s_a - &self.embed(&a.adjoint())?).hs_norm() / scale_of(a));

            // j(A*) = J A J acts as right multiplication by A (commutant)
            let j_adj =
                |xi: &ComplexMatrix| modular_conjugation_apply(&(&a.adjoint() * &modular_conjugation_apply(xi)));
            for b in samples {
                for xi in &vectors {
                    let lhs = j_adj(&(b * xi));
                    let rhs = b * &j_adj(xi);
                    let s = scale_of(a) * scale_of(b) * 1f64.max(xi.hs_norm());
                    commutant = commutant.max((&lhs - &rhs).hs_norm() / s);
                }
            }

            // A J A J preserves P^{1/4}
            for b in samples {
                let positive = &b.adjoint() * b;
                let xi = self.modular_power_apply(c(0.25, 0.0), &self.embed(&positive)?)?;
                let mapped = a * &modular_conjugation_apply(&(a * &modular_conjugation_apply(&xi)));
                let m = self.cone_membership(&mapped, 0.25)?;
                let s = scale_of(a).powi(2) * 1f64.max(xi.hs_norm());
                let defect = (mapped.hermiticity_defect() * mapped.hs_norm()).max(-m.witness_min_eig);
                cone = cone.max(defect.max(0.0) / s);
            }
        }

        for xi in &vectors {
            let twice = modular_conjugation_apply(&modular_conjugation_apply(xi));
            involution = involution.max((&twice - xi).hs_norm());
            // centre: multiples of the identity satisfy J (c𝟙) J = (c𝟙)*
            let z = c(0.3, -0.7);
            let lhs = modular_conjugation_apply(&modular_conjugation_apply(xi).scale(z));
            center = center.max((&lhs - &xi.scale(z.conj())).hs_norm() / 1f64.max(xi.hs_norm()));
        }

        let j_omega = (&modular_conjugation_apply(omega) - omega).hs_norm();
        let delta_omega = (&self.modular_power_apply(c(1.0, 0.0), omega)? - omega).hs_norm();

        let parts = vec![
            VerificationRecord::residual("tomita.polar", polar, TOL_MODULAR),
            VerificationRecord::residual("tomita.involution", involution, TOL_MODULAR),
            VerificationRecord::residual("tomita.j_omega", j_omega, TOL_MODULAR),
            VerificationRecord::residual("tomita.delta_omega", delta_omega, TOL_MODULAR),
            VerificationRecord::residual("tomita.commutant", commutant, TOL_MODULAR),
            VerificationRecord::residual("tomita.cone", cone, TOL_MODULAR),
            VerificationRecord::residual("tomita.center", center, TOL_MODULAR),
        ];
        Ok(VerificationRecord::compound("tomita", parts).with_meta(self.meta()))
    }

    /// Compares `⟨T†η, ξ⟩` with `⟨η, Tξ⟩` for the formal product
    /// `T = X₀ Δ_{φ₁,Ω}^{z₁} X₁ ⋯ Δ_{φₙ,Ω}^{zₙ} Xₙ` and its claimed adjoint
    /// `T† = Xₙ* Δ_{φₙ,Ω}^{z̄ₙ} ⋯ X₁* Δ_{φ₁,Ω}^{z̄₁} X₀*`.
    pub fn formal_adjoint_check(
        &self,
        x_list: &[ComplexMatrix],
        phi_list: &[StateFunctional],
        z: &InsertionTuple,
        samples: &[ComplexMatrix],
    ) -> Result<VerificationRecord> {
        let n = z.len();
        if x_list.len() != n + 1 || phi_list.len() != n {
            return Err(Error::Config(format!(
                "formal product needs n+1 operators and n functionals, got {} / {} for n = {n}",
                x_list.len(),
                phi_list.len()
            )));
        }
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        let zs = z.values();
        let apply_t = |xi: &ComplexMatrix| -> Result<ComplexMatrix> {
            let mut v = &x_list[n] * xi;
            for j in (1..=n).rev() {
                v = self.relative_modular_power_apply(&phi_list[j - 1], zs[j - 1], &v)?;
                v = &x_list[j - 1] * &v;
            }
            Ok(v)
        };
        let apply_t_dag = |eta: &ComplexMatrix| -> Result<ComplexMatrix> {
            let mut v = &x_list[0].adjoint() * eta;
            for j in 1..=n {
                v = self.relative_modular_power_apply(&phi_list[j - 1], zs[j - 1].conj(), &v)?;
                v = &x_list[j].adjoint() * &v;
            }
            Ok(v)
        };
        let mut worst: f64 = 0.0;
        for eta in samples {
            let t_dag_eta = apply_t_dag(eta)?;
            for xi in samples {
                let t_xi = apply_t(xi)?;
                let lhs = t_dag_eta.hs_inner(xi);
                let rhs = eta.hs_inner(&t_xi);
                let scale = 1f64.max(t_dag_eta.hs_norm() * xi.hs_norm()).max(eta.hs_norm() * t_xi.hs_norm());
                worst = worst.max((lhs - rhs).norm() / scale);
            }
        }
        let mut meta = self.meta();
        meta.n = Some(n);
        meta.set_z(zs);
        Ok(VerificationRecord::residual("formal_adjoint", worst, TOL_MODULAR).with_meta(meta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeMembership {
    pub member: bool,
    pub witness_min_eig: f64,
}

/// Modular conjugation `J ξ = ξ*`.
pub fn modular_conjugation_apply(xi: &ComplexMatrix) -> ComplexMatrix {
    xi.adjoint()
}

impl PartialEq for GibbsEnsemble {
    fn eq(&self, other: &Self) -> bool {
        self.to_spec() == other.to_spec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn e12() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
    }

    /// βE = ln 2 gives ρ = diag(2/3, 1/3).
    fn two_level() -> GibbsEnsemble {
        GibbsEnsemble::new(ComplexMatrix::from_real_diagonal(&[0.0, 2f64.ln()]), 1.0).unwrap()
    }

    #[test]
    fn tracial_ensemble() {
        let ens = GibbsEnsemble::new(ComplexMatrix::zeros(2), 3.7).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((ens.rho() - &half).hs_norm() < 1e-15);
        let xi = e12();
        let out = ens.modular_power_apply(c(0.3, 1.2), &xi).unwrap();
        assert!((&out - &xi).hs_norm() < 1e-15);
    }

    #[test]
    fn two_level_density() {
        let ens = two_level();
        let want = ComplexMatrix::from_real_diagonal(&[2.0 / 3.0, 1.0 / 3.0]);
        assert!((ens.rho() - &want).hs_norm() < 1e-15);
        assert_abs_diff_eq!(ens.rho().trace().re, 1.0, epsilon = 1e-12);
        assert!((&(ens.omega_vec() * ens.omega_vec()) - ens.rho()).hs_norm() < 1e-12);
    }

    #[test]
    fn faithfulness_floor() {
        let h = ComplexMatrix::from_real_diagonal(&[0.0, 50.0]);
        assert!(matches!(GibbsEnsemble::new(h, 1.0), Err(Error::FaithfulnessViolated(_))));
        assert!(matches!(GibbsEnsemble::new(ComplexMatrix::zeros(2), 0.0), Err(Error::BadBeta(_))));
    }

    #[test]
    fn embed_examples() {
        let ens = two_level();
        assert!((&ens.embed(&ComplexMatrix::identity(2)).unwrap() - ens.omega_vec()).hs_norm() < 1e-15);
        let v = ens.embed(&e12()).unwrap();
        assert_abs_diff_eq!(v[(0, 1)].re, (1.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v[(0, 0)].norm() + v[(1, 0)].norm() + v[(1, 1)].norm(), 0.0, epsilon = 1e-15);
        assert_eq!(ens.embed(&ComplexMatrix::zeros(2)).unwrap().hs_norm(), 0.0);
        assert!(matches!(ens.embed(&ComplexMatrix::zeros(3)), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn modular_power_examples() {
        let ens = two_level();
        let out = ens.modular_power_apply(c(1.0, 0.0), &e12()).unwrap();
        assert!((&out - &e12().scale_real(2.0)).hs_norm() < 1e-14);
        let out = ens.modular_power_apply(c(0.0, 0.0), &sigma_x()).unwrap();
        assert!((&out - &sigma_x()).hs_norm() < 1e-15);
    }

    #[test]
    fn relative_modular_examples() {
        let ens = two_level();
        let xi = sigma_x();
        let z = c(0.4, -0.3);
        let a = ens.modular_power_apply(z, &xi).unwrap();
        let b = ens.relative_modular_power_apply(&ens.state(), z, &xi).unwrap();
        assert!((&a - &b).hs_norm() < 1e-14);

        let phi = StateFunctional::new(ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap();
        let out = ens.relative_modular_power_apply(&phi, c(0.5, 0.0), &ComplexMatrix::identity(2)).unwrap();
        let want = ComplexMatrix::from_real_diagonal(&[(1.5f64).sqrt(), 0.0]);
        assert!((&out - &want).hs_norm() < 1e-14);

        assert_eq!(ens.relative_modular_power_apply(&phi, c(-0.5, 0.0), &xi), Err(Error::SingularNegativePower));
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(modular_conjugation_apply(&sigma_x()), sigma_x());
        assert_eq!(modular_conjugation_apply(&e12()), e12().adjoint());
        let i_id = ComplexMatrix::identity(2).scale(c(0.0, 1.0));
        assert_eq!(modular_conjugation_apply(&i_id), ComplexMatrix::identity(2).scale(c(0.0, -1.0)));
    }

    #[test]
    fn heisenberg_examples() {
        let e = 0.8;
        let ens = GibbsEnsemble::new(ComplexMatrix::from_real_diagonal(&[0.0, e]), 1.0).unwrap();
        let t = 1.3;
        let h = ens.hamiltonian().clone();
        assert!((&ens.heisenberg(c(t, 0.0), &h).unwrap() - &h).hs_norm() < 1e-14);
        let out = ens.heisenberg(c(t, 0.0), &e12()).unwrap();
        let want = e12().scale(c(0.0, -t * e).exp());
        assert!((&out - &want).hs_norm() < 1e-14);

        let tracial = GibbsEnsemble::new(ComplexMatrix::zeros(2), 2.0).unwrap();
        let out = tracial.heisenberg(c(0.0, 1.0), &e12()).unwrap();
        assert!((&out - &e12()).hs_norm() < 1e-15);
    }

    #[test]
    fn kms_function_examples() {
        let ens = two_level();
        let id = ComplexMatrix::identity(2);
        assert_abs_diff_eq!(ens.kms_function(&id, &id, c(0.0, 0.0)).unwrap().re, 1.0, epsilon = 1e-14);
        let e = 2f64.ln();
        for t in [0.0, 0.7, -2.1] {
            let got = ens.kms_function(&sigma_x(), &sigma_x(), c(t, 0.0)).unwrap();
            let want = c(0.0, t * e).exp() * (2.0 / 3.0) + c(0.0, -t * e).exp() * (1.0 / 3.0);
            assert!((got - want).norm() < 1e-14);
        }
        let at_beta = ens.kms_function(&sigma_x(), &sigma_x(), c(0.0, 1.0)).unwrap();
        assert!((at_beta - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn kms_boundary_examples() {
        let ens = two_level();
        let id = ComplexMatrix::identity(2);
        let r = ens.kms_boundary_check(&id, &id, 0.4).unwrap();
        assert!(r.pass && r.lhs.norm() < 1e-14);
        let r = ens.kms_boundary_check(&sigma_x(), &sigma_x(), 0.0).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn cone_membership_examples() {
        let ens = two_level();
        for alpha in [0.0, 0.1, 0.25, 0.5] {
            assert!(ens.cone_membership(ens.omega_vec(), alpha).unwrap().member);
        }
        let xi = ens.omega_vec() * &sigma_x();
        let m = ens.cone_membership(&xi, 0.5).unwrap();
        assert!(!m.member);
        assert_abs_diff_eq!(m.witness_min_eig, -1.0, epsilon = 1e-12);
        let psd = ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]).unwrap();
        assert!(ens.cone_membership(&psd, 0.25).unwrap().member);
        assert!(!ens.cone_membership(&sigma_x(), 0.25).unwrap().member);
        assert!(ens.cone_membership(&psd, 0.7).is_err());
    }

    #[test]
    fn tomita_examples() {
        let tracial = GibbsEnsemble::new(ComplexMatrix::zeros(2), 1.0).unwrap();
        let r = tracial.tomita_check(&[ComplexMatrix::identity(2), e12()]).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.parts.iter().all(|p| p.lhs.norm() < 1e-14));
        let r = two_level().tomita_check(&[sigma_x()]).unwrap();
        assert!(r.pass);
        assert_eq!(two_level().tomita_check(&[] as &[ComplexMatrix]), Err(Error::EmptySample));
    }

    #[test]
    fn formal_adjoint_trivial_cases() {
        let ens = two_level();
        let id = ComplexMatrix::identity(2);
        let z = InsertionTuple::new(vec![c(0.3, 0.0), c(0.2, 0.0)]).unwrap();
        let phis = vec![ens.state(), ens.state()];
        let samples = vec![sigma_x(), e12(), id.clone()];
        let r = ens.formal_adjoint_check(&[id.clone(), id.clone(), id.clone()], &phis, &z, &samples).unwrap();
        assert!(r.pass);
        let empty = InsertionTuple::new(vec![]).unwrap();
        let r = ens.formal_adjoint_check(&[e12()], &[], &empty, &samples).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn ensemble_spec_roundtrip() {
        let ens = two_level().with_seed(9);
        let spec = ens.to_spec();
        let json = serde_json::to_string(&spec).unwrap();
        let back = GibbsEnsemble::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.content_hash(), ens.content_hash());
        assert_eq!(back.seed(), Some(9));
    }
}
