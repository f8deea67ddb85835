//! Non-commutative L_p machinery over a Gibbs ensemble.
//!
//! Two families of norms live here:
//!
//! * the KMS p-norm of a positive element, `‖A‖_p = ω(Δ^{1/p}A ⋯ Δ^{1/p}A)^{1/p}`
//!   (`p` factors of `A`), evaluated both as a modular chain on the GNS space
//!   and through imaginary-time translates `τ_{i(2k−1)β/2p}(A)`;
//! * the vector norm `‖ζ‖_p = sup_{‖ξ‖=1} ‖Δ_{ξ,Ω}^{1/2−1/p} ζ‖` for `p ≥ 2`
//!   (an infimum under a support constraint for `1 ≤ p < 2`), estimated by
//!   multi-start projected gradient on the Hilbert–Schmidt unit sphere.
//!
//! Functionals produced by [`phi_from_cone_vector`] keep their eigenvalues in
//! factored form, so `φ^{1/p}` is exact even when `φ` has eigenvalues far below
//! the dense support cutoff.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holder_verify::{multi_correlation, InsertionTuple};
use crate::record::{RecordMeta, VerificationRecord};
use crate::seed::{mix, rng_from_seed};
use crate::spectral::{
    check_psd_spectrum, eig_hermitian, ComplexMatrix, SpectralDecomposition, SupportPolicy, SUPPORT_CUTOFF, TOL_PSD,
};
use crate::standard_form::{GibbsEnsemble, StateFunctional, TOL_MODULAR};

/// Relative imaginary residue tolerated on quantities that must be real.
pub const TOL_IMAG: f64 = 1e-9;
/// Tolerance of the identities behind the cone functional and its round trip.
pub const TOL_CONE: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Relative slack for optimization-based norm estimates at dimension `dim`.
pub fn opt_tol(dim: usize) -> f64 {
    if dim <= 3 {
        0.02
    } else {
        0.05
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub grad_tol: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig { restarts: 64, max_iters: 500, step_init: 0.5, grad_tol: 1e-8, seed: 0 }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::Config("restarts and max_iters must be positive".into()));
        }
        if !(self.grad_tol > 0.0) || !(self.step_init > 0.0) {
            return Err(Error::Config("grad_tol and step_init must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Supremum estimated from below (`p ≥ 2`).
    Lower,
    /// Infimum estimated from above (`p < 2`).
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub converged: bool,
    pub best_xi: ComplexMatrix,
    pub bound_kind: BoundKind,
}

fn require_psd(a: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let spec = eig_hermitian(a)?;
    check_psd_spectrum(&spec, TOL_PSD)?;
    Ok(spec)
}

/// Real part of `z`, refusing an imaginary part above `TOL_IMAG` of its magnitude.
/// `scale` sets the magnitude below which `z` counts as rounding noise around zero.
fn checked_real(what: &'static str, z: Complex64, scale: f64) -> Result<f64> {
    let mag = z.norm().max(1e-12 * scale);
    if z.im.abs() > TOL_IMAG * mag {
        return Err(Error::ImaginaryResidue { what, im: z.im, mag });
    }
    Ok(z.re)
}

fn nonnegative_root(what: &'static str, value: f64, p: f64, scale: f64) -> Result<f64> {
    if value < -1e-12 * scale {
        return Err(Error::ImaginaryResidue { what, im: value, mag: scale });
    }
    Ok(value.max(0.0).powf(1.0 / p))
}

/// `⟨Ω, Δ^{1/p} A Δ^{1/p} A ⋯ Δ^{1/p} A Ω⟩` with `p` factors of `A`.
fn kms_chain(ens: &GibbsEnsemble, a: &ComplexMatrix, p: u32) -> Complex64 {
    let omega = ens.omega_energy_basis();
    let ae = ens.to_energy_basis(a);
    let step = c(1.0 / p as f64, 0.0);
    let mut v = omega.clone();
    for _ in 0..p {
        v = ens.modular_scale(step, &(&ae * &v));
    }
    omega.hs_inner(&v)
}

/// KMS p-norm of a positive element via the modular chain.
pub fn kms_norm(ens: &GibbsEnsemble, a: &ComplexMatrix, p: u32) -> Result<f64> {
    a.check_dim(ens.dim())?;
    require_psd(a)?;
    kms_norm_unchecked(ens, a, p)
}

/// The modular chain root without the positivity requirement on `A`. The
/// chain value must still come out real and nonnegative.
pub fn kms_norm_unchecked(ens: &GibbsEnsemble, a: &ComplexMatrix, p: u32) -> Result<f64> {
    a.check_dim(ens.dim())?;
    if p == 0 {
        return Err(Error::BadExponent(0.0));
    }
    let scale = a.operator_norm().powi(p as i32);
    let v = checked_real("kms chain", kms_chain(ens, a, p), scale)?;
    nonnegative_root("kms chain", v, p as f64, scale)
}

/// `ω(τ_{iβ/2p}(A) τ_{i3β/2p}(A) ⋯ τ_{i(2p−1)β/2p}(A))` with `extra` appended on the right.
fn analytic_product(
    ens: &GibbsEnsemble,
    a: &ComplexMatrix,
    p: u32,
    extra: Option<&ComplexMatrix>,
) -> Result<Complex64> {
    let beta = ens.beta();
    let mut prod = ComplexMatrix::identity(ens.dim());
    for k in 1..=p {
        let t = c(0.0, (2 * k - 1) as f64 * beta / (2 * p) as f64);
        prod = &prod * &ens.heisenberg(t, a)?;
    }
    if let Some(x) = extra {
        prod = &prod * x;
    }
    Ok(ens.expectation(&prod))
}

/// KMS p-norm through imaginary-time translates at odd multiples of `β/2p`.
pub fn kms_norm_analytic(ens: &GibbsEnsemble, a: &ComplexMatrix, p: u32) -> Result<f64> {
    a.check_dim(ens.dim())?;
    if p == 0 {
        return Err(Error::BadExponent(0.0));
    }
    let spec = require_psd(a)?;
    let scale = spec.max_value().max(0.0).powi(p as i32);
    let v = checked_real("analytic kms product", analytic_product(ens, a, p, None)?, scale)?;
    nonnegative_root("analytic kms product", v, p as f64, scale)
}

/// Both readings of the imaginary-time formula: `p` factors, and the printed
/// variant with a trailing `τ_{iβ}(A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmsProductReadings {
    pub p_factors: f64,
    /// Raw value of the `(p+1)`-factor product (no root taken).
    pub trailing_factor_raw: Complex64,
}

pub fn kms_norm_product_readings(ens: &GibbsEnsemble, a: &ComplexMatrix, p: u32) -> Result<KmsProductReadings> {
    let p_factors = kms_norm_analytic(ens, a, p)?;
    let tail = ens.heisenberg(c(0.0, ens.beta()), a)?;
    let trailing_factor_raw = analytic_product(ens, a, p, Some(&tail))?;
    Ok(KmsProductReadings { p_factors, trailing_factor_raw })
}

/// Range projection of `ξ`, i.e. the left support `s_M(ξ)`.
pub fn support_projection(xi: &ComplexMatrix) -> ComplexMatrix {
    let d = xi.dim();
    let svd = xi.as_dmatrix().clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thr = SUPPORT_CUTOFF * smax;
    let mut p = ComplexMatrix::zeros(d);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > thr {
            for i in 0..d {
                for j in 0..d {
                    p[(i, j)] += u[(i, k)] * u[(j, k)].conj();
                }
            }
        }
    }
    p
}

/// Polar decomposition `ξ = u·|ξ|` with `|ξ| = (ξ*ξ)^{1/2}` and `u*u = s(|ξ|)`.
pub fn polar_parts(xi: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let d = xi.dim();
    let svd = xi.as_dmatrix().clone().svd(true, true);
    let w = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thr = SUPPORT_CUTOFF * smax;
    let mut u = ComplexMatrix::zeros(d);
    let mut absval = ComplexMatrix::zeros(d);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= thr {
            continue;
        }
        for i in 0..d {
            for j in 0..d {
                // v_t rows are v_k*, so v_k(i) = conj(v_t[(k, i)])
                let vi = v_t[(k, i)].conj();
                let vj = v_t[(k, j)].conj();
                u[(i, j)] += w[(i, k)] * vj.conj();
                absval[(i, j)] += vi * vj.conj() * s;
            }
        }
    }
    (u, absval.hermitian_part())
}

/// `Δ^{1/2p} A Ω`, the positive-cone vector attached to `A` at exponent `p`.
pub fn cone_vector(ens: &GibbsEnsemble, a: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    ens.modular_power_apply(c(0.5 / p, 0.0), &ens.embed(a)?)
}

struct ConeFunctional {
    phi: StateFunctional,
    cone_residual: f64,
    roundtrip_residual: f64,
}

fn cone_functional(ens: &GibbsEnsemble, a: &ComplexMatrix, p: u32) -> Result<ConeFunctional> {
    a.check_dim(ens.dim())?;
    if p < 2 {
        return Err(Error::BadExponent(p as f64));
    }
    require_psd(a)?;
    let pf = p as f64;
    let ln_rho: Vec<f64> = ens.rho_eigenvalues().iter().map(|r| r.ln()).collect();
    // ρ^{1/2p} A ρ^{1/2p} in the energy basis
    let x =
        ens.to_energy_basis(a).map_entries(|j, k, v| v * ((ln_rho[j] + ln_rho[k]) / (2.0 * pf)).exp()).hermitian_part();
    let xs = eig_hermitian(&x)?;
    let mu_max = xs.max_value().max(0.0);
    let values: Vec<f64> = xs.values.iter().map(|&m| if m > 1e-14 * mu_max { m.powi(p as i32) } else { 0.0 }).collect();
    let basis = &ens.energy_spectrum().basis * &xs.basis;
    let phi = StateFunctional::from_spectral(basis, values)?;

    let zeta = cone_vector(ens, a, pf)?;
    let lhs = ens.relative_modular_power_apply(&phi, c(1.0 / pf, 0.0), ens.omega_vec())?;
    let scale = 1f64.max(a.operator_norm());
    let cone_residual = (&lhs - &zeta).hs_norm() / scale;

    let root = (&zeta * &ens.rho_power(c(1.0 / pf - 0.5, 0.0))).hermitian_part();
    let mut rebuilt = ComplexMatrix::identity(ens.dim());
    for _ in 0..p {
        rebuilt = &rebuilt * &root;
    }
    let roundtrip_residual = (&rebuilt - phi.density()).hs_norm() / 1f64.max(phi.density().hs_norm());
    Ok(ConeFunctional { phi, cone_residual, roundtrip_residual })
}

/// The unique positive functional `φ` with `Δ_{φ,Ω}^{1/p} Ω = Δ^{1/2p} A Ω`,
/// namely `φ = (ρ^{1/2p} A ρ^{1/2p})^p`.
pub fn phi_from_cone_vector(ens: &GibbsEnsemble, a: &ComplexMatrix, p: u32) -> Result<StateFunctional> {
    let cf = cone_functional(ens, a, p)?;
    if cf.cone_residual > TOL_CONE || cf.roundtrip_residual > TOL_CONE {
        return Err(Error::Postcondition(format!(
            "cone functional residuals {:.3e} / {:.3e}",
            cf.cone_residual, cf.roundtrip_residual
        )));
    }
    Ok(cf.phi)
}

/// Record form of the cone-functional construction: cone identity residual,
/// reconstruction round trip and the bound `φ(𝟙)^{1/p} ≤ ‖A‖`.
pub fn lemma41_check(ens: &GibbsEnsemble, a: &ComplexMatrix, p: u32) -> Result<VerificationRecord> {
    let cf = cone_functional(ens, a, p)?;
    let norm_p = cf.phi.value_on_identity().max(0.0).powf(1.0 / p as f64);
    let parts = vec![
        VerificationRecord::residual("lemma41.cone_identity", cf.cone_residual, TOL_CONE),
        VerificationRecord::residual("lemma41.roundtrip", cf.roundtrip_residual, TOL_CONE),
        VerificationRecord::inequality("lemma41.bound", c(norm_p, 0.0), a.operator_norm()),
    ];
    let mut meta = ens.meta();
    meta.p = vec![p as f64];
    Ok(VerificationRecord::compound("lemma41", parts).with_meta(meta))
}

/// Compares `Δ_{φₙ,Ω}^{1/pₙ} ⋯ Δ_{φ₁,Ω}^{1/p₁} Ω` with
/// `Δ^{1/2pₙ} Aₙ Δ^{1/2pₙ} ⋯ Δ^{1/2p₁} A₁ Ω` for `Σ 1/p_j = 1/2`.
pub fn chain_identity_check(
    ens: &GibbsEnsemble,
    a_list: &[ComplexMatrix],
    p_list: &[u32],
) -> Result<VerificationRecord> {
    if a_list.len() != p_list.len() || a_list.is_empty() {
        return Err(Error::Config("chain needs matching, nonempty operator and exponent lists".into()));
    }
    if let Some(&bad) = p_list.iter().find(|&&p| p < 2) {
        return Err(Error::BadExponent(bad as f64));
    }
    let sum: f64 = p_list.iter().map(|&p| 1.0 / p as f64).sum();
    if (sum - 0.5).abs() > 1e-12 {
        return Err(Error::BudgetViolation { sum, allowed: 0.5 });
    }
    let mut left = ens.omega_vec().clone();
    let mut right = ens.omega_vec().clone();
    let mut scale = 1.0;
    for (a, &p) in a_list.iter().zip(p_list) {
        let phi = phi_from_cone_vector(ens, a, p)?;
        left = ens.relative_modular_power_apply(&phi, c(1.0 / p as f64, 0.0), &left)?;
        let half = c(0.5 / p as f64, 0.0);
        right = ens.modular_power_apply(half, &(a * &ens.modular_power_apply(half, &right)?))?;
        scale *= a.operator_norm();
    }
    let mut meta = ens.meta();
    meta.n = Some(a_list.len());
    meta.p = p_list.iter().map(|&p| p as f64).collect();
    let residual = (&left - &right).hs_norm();
    Ok(VerificationRecord::residual("chain", residual, TOL_MODULAR * scale.max(1.0)).with_meta(meta))
}

/// `Tr(σ^a C)` over `σ = ξξ*` with `‖ξ‖_HS = 1`, optionally restricted to `ξ = Qξ`.
struct SphereObjective {
    c: ComplexMatrix,
    exponent: f64,
    projector: Option<ComplexMatrix>,
}

impl SphereObjective {
    fn power_fn(&self, l: f64, thr: f64) -> f64 {
        if l > thr {
            l.powf(self.exponent)
        } else {
            0.0
        }
    }

    fn spectrum(&self, xi: &ComplexMatrix) -> SpectralDecomposition {
        let sigma = (xi * &xi.adjoint()).hermitian_part();
        eig_hermitian(&sigma).expect("ξξ* is Hermitian")
    }

    fn value(&self, xi: &ComplexMatrix) -> f64 {
        let s = self.spectrum(xi);
        let thr = s.support_threshold();
        let ce = self.c.conjugate_by_adjoint(&s.basis);
        s.values.iter().enumerate().map(|(i, &l)| self.power_fn(l, thr) * ce[(i, i)].re).sum()
    }

    /// Value and Euclidean gradient `2·G·ξ`, `G = V (Γ ∘ V*CV) V*` with `Γ`
    /// the first divided differences of `λ ↦ λ^a` on the support.
    fn value_and_grad(&self, xi: &ComplexMatrix) -> (f64, ComplexMatrix) {
        let s = self.spectrum(xi);
        let thr = s.support_threshold();
        let ce = self.c.conjugate_by_adjoint(&s.basis);
        let l = &s.values;
        let a = self.exponent;
        let value = l.iter().enumerate().map(|(i, &li)| self.power_fn(li, thr) * ce[(i, i)].re).sum();
        let gamma = |i: usize, j: usize| -> f64 {
            let (x, y) = (l[i], l[j]);
            if x <= thr && y <= thr {
                0.0
            } else if (x - y).abs() <= 1e-10 * x.abs().max(y.abs()) {
                let m = 0.5 * (x + y);
                a * m.powf(a - 1.0)
            } else {
                (self.power_fn(x, thr) - self.power_fn(y, thr)) / (x - y)
            }
        };
        let g = ce.map_entries(|i, j, v| v * gamma(i, j)).conjugate_by(&s.basis);
        let mut grad = (&g * xi).scale_real(2.0);
        if let Some(q) = &self.projector {
            grad = q * &grad;
        }
        (value, grad)
    }

    fn project(&self, xi: ComplexMatrix) -> ComplexMatrix {
        let xi = match &self.projector {
            Some(q) => q * &xi,
            None => xi,
        };
        let n = xi.hs_norm();
        xi.scale_real(1.0 / n)
    }
}

struct RestartResult {
    value: f64,
    xi: ComplexMatrix,
    converged: bool,
}

fn run_restart(obj: &SphereObjective, xi0: ComplexMatrix, maximize: bool, cfg: &OptConfig) -> RestartResult {
    let sign = if maximize { 1.0 } else { -1.0 };
    let mut xi = obj.project(xi0);
    let (mut f, mut grad) = obj.value_and_grad(&xi);
    let mut step = cfg.step_init / f.abs().max(f64::MIN_POSITIVE);
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        // tangent component on the unit sphere
        let radial = xi.hs_inner(&grad).re;
        let tangent = &grad - &xi.scale_real(radial);
        let gnorm = tangent.hs_norm();
        if gnorm <= cfg.grad_tol * f.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        let mut accepted = false;
        while step * gnorm > 1e-15 {
            let cand = obj.project(&xi + &tangent.scale_real(sign * step));
            let fc = obj.value(&cand);
            if sign * (fc - f) >= 1e-4 * step * gnorm * gnorm {
                xi = cand;
                accepted = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no ascent direction left at working precision
            converged = true;
            break;
        }
        let (nf, ng) = obj.value_and_grad(&xi);
        f = nf;
        grad = ng;
    }
    RestartResult { value: f, xi, converged }
}

fn random_unit(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(dim, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = m.hs_norm();
    m.scale_real(1.0 / n)
}

/// Araki–Masuda norm estimate; see [`am_norm_with_support`].
pub fn am_norm(ens: &GibbsEnsemble, zeta: &ComplexMatrix, p: f64, cfg: &OptConfig) -> Result<NormEstimate> {
    am_norm_with_support(ens, zeta, p, cfg, None)
}

/// `‖ζ‖_p` by optimization over unit vectors `ξ` of `‖Δ_{ξ,Ω}^{1/2−1/p} ζ‖`.
///
/// For `p > 2` the supremum is estimated from below; for `1 ≤ p < 2` the
/// infimum over `ξ` with `s_M(ξ) ≥ s_M(ζ)` is estimated from above, the
/// constraint being enforced by restricting `ξ` to the range of `support`
/// (which must dominate `s_M(ζ)`). Without an explicit `support`, `ζ` must
/// have full left support. `p = 2` returns the Hilbert–Schmidt norm.
pub fn am_norm_with_support(
    ens: &GibbsEnsemble,
    zeta: &ComplexMatrix,
    p: f64,
    cfg: &OptConfig,
    support: Option<&ComplexMatrix>,
) -> Result<NormEstimate> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent(p));
    }
    zeta.check_dim(ens.dim())?;
    cfg.validate()?;
    let d = ens.dim();
    if p == 2.0 {
        return Ok(NormEstimate {
            value: zeta.hs_norm(),
            converged: true,
            best_xi: ens.omega_vec().clone(),
            bound_kind: BoundKind::Lower,
        });
    }
    let s = if p.is_infinite() { 0.5 } else { 0.5 - 1.0 / p };
    let maximize = p > 2.0;
    let projector = if maximize {
        None
    } else {
        match support {
            Some(q) => {
                q.check_dim(d)?;
                let idempotent = (&(q * q) - q).hs_norm() <= 1e-10 * 1f64.max(q.hs_norm());
                let covers = (&(q * zeta) - zeta).hs_norm() <= 1e-10 * 1f64.max(zeta.hs_norm());
                if !q.is_hermitian(1e-10) || !idempotent || !covers {
                    return Err(Error::Config("support must be an orthogonal projection dominating s(ζ)".into()));
                }
                Some(q.clone())
            }
            None => {
                let sp = support_projection(zeta);
                if (sp.trace().re - d as f64).abs() > 0.5 {
                    return Err(Error::SupportRequired);
                }
                None
            }
        }
    };
    let y = zeta * &ens.rho_power(c(-s, 0.0));
    let obj = SphereObjective { c: (&y * &y.adjoint()).hermitian_part(), exponent: 2.0 * s, projector };

    let mut best: Option<RestartResult> = None;
    for r in 0..cfg.restarts {
        let mut rng = rng_from_seed(mix(cfg.seed, r as u64, "am_norm"));
        let res = run_restart(&obj, random_unit(d, &mut rng), maximize, cfg);
        let better = match &best {
            None => true,
            Some(b) => {
                if maximize {
                    res.value > b.value
                } else {
                    res.value < b.value
                }
            }
        };
        if better {
            best = Some(res);
        }
    }
    let best = best.expect("at least one restart");
    let sigma = StateFunctional::new((&best.xi * &best.xi.adjoint()).hermitian_part())?;
    let image = ens.relative_modular_power_apply_with(&sigma, c(s, 0.0), zeta, SupportPolicy::OnSupport)?;
    Ok(NormEstimate {
        value: image.hs_norm(),
        converged: best.converged,
        best_xi: best.xi,
        bound_kind: if maximize { BoundKind::Lower } else { BoundKind::Upper },
    })
}

/// Three evaluations of `‖Δ^{1/2p} A Ω‖_p` for even `p`: `φ(𝟙)^{1/p}` of the
/// cone functional, the multi-insertion correlation `ω(AΔ^{1/p}A ⋯ Δ^{1/p}A)^{1/p}`
/// and the optimization estimate.
pub fn lemma42_check(ens: &GibbsEnsemble, a: &ComplexMatrix, p: u32, cfg: &OptConfig) -> Result<VerificationRecord> {
    if p < 2 || !p.is_multiple_of(2) {
        return Err(Error::OddP(p));
    }
    let pf = p as f64;
    let phi = phi_from_cone_vector(ens, a, p)?;
    let via_phi = phi.spectrum().values.iter().sum::<f64>().powf(1.0 / pf);

    let z = InsertionTuple::new(vec![c(1.0 / pf, 0.0); (p - 1) as usize])?;
    let a_list = vec![a.clone(); p as usize];
    let scale = a.operator_norm().powi(p as i32);
    let corr = checked_real("lemma42 correlation", multi_correlation(ens, &a_list, &z)?, scale)?;
    let via_corr = nonnegative_root("lemma42 correlation", corr, pf, scale)?;

    let est = am_norm(ens, &cone_vector(ens, a, pf)?, pf, cfg)?;
    let tol = opt_tol(ens.dim());
    let parts = vec![
        VerificationRecord::residual("lemma42.phi_vs_corr", (via_phi - via_corr).abs(), 1e-9 * via_phi),
        VerificationRecord::residual("lemma42.phi_vs_am", (via_phi - est.value).abs(), tol * via_phi),
        VerificationRecord::inequality("lemma42.am_bound", c(est.value, 0.0), a.operator_norm() + 1e-9),
    ];
    let mut meta = ens.meta();
    meta.p = vec![pf];
    let meta = meta
        .with_extra("phi_root", via_phi)
        .with_extra("correlation_root", via_corr)
        .with_extra("am_estimate", est.value);
    Ok(VerificationRecord::compound("lemma42", parts).with_meta(meta))
}

/// Contraction `‖xζ‖_p ≤ ‖x‖‖ζ‖_p` and vector Hölder `‖ζ₂ζ₁‖_r ≤ ‖ζ₁‖_p‖ζ₂‖_{p'}`
/// for cone vectors `ζ₁ = Δ^{1/2p}A₁Ω`, `ζ₂ = Δ^{1/2p'}A₂Ω`, with the product
/// realized as the chain `Δ^{1/2p'} A₂ Δ^{1/2p'} ζ₁`.
///
/// `exponents` is `[p, p', r]`. Each right-hand norm is a lower-bound estimate,
/// so the bound is inflated by `(1 + opt_tol)` per estimated factor.
pub fn lp_holder_contraction_check(
    ens: &GibbsEnsemble,
    x: &ComplexMatrix,
    a_list: &[ComplexMatrix],
    exponents: [f64; 3],
    cfg: &OptConfig,
) -> Result<VerificationRecord> {
    let [p, pp, r] = exponents;
    if a_list.len() != 2 {
        return Err(Error::Config("vector Hölder needs exactly two operators".into()));
    }
    for &q in &exponents {
        if !(q >= 2.0) {
            return Err(Error::BadExponent(q));
        }
    }
    let lhs_inv = 1.0 / p + 1.0 / pp;
    if (lhs_inv - 1.0 / r).abs() > 1e-12 {
        return Err(Error::ExponentMismatch { lhs: lhs_inv, rhs: 1.0 / r });
    }
    x.check_dim(ens.dim())?;
    for a in a_list {
        require_psd(a)?;
    }
    let tol = opt_tol(ens.dim());
    let slack = |q: f64| if q == 2.0 { 1.0 } else { 1.0 + tol };

    let zeta1 = cone_vector(ens, &a_list[0], p)?;
    let zeta2 = cone_vector(ens, &a_list[1], pp)?;
    let n1 = am_norm(ens, &zeta1, p, cfg)?;
    let n2 = am_norm(ens, &zeta2, pp, cfg)?;

    let contracted = am_norm(ens, &(x * &zeta1), p, cfg)?;
    let x_norm = x.operator_norm();
    let mut contraction =
        VerificationRecord::inequality("lp.contraction", c(contracted.value, 0.0), x_norm * n1.value * slack(p));
    contraction.meta = RecordMeta::default().with_extra("rhs_raw", x_norm * n1.value);

    let half = c(0.5 / pp, 0.0);
    let chain = ens.modular_power_apply(half, &(&a_list[1] * &ens.modular_power_apply(half, &zeta1)?))?;
    let product = am_norm(ens, &chain, r, cfg)?;
    let mut holder =
        VerificationRecord::inequality("lp.holder", c(product.value, 0.0), n1.value * n2.value * slack(p) * slack(pp));
    holder.meta = RecordMeta::default().with_extra("rhs_raw", n1.value * n2.value);

    let mut meta = ens.meta();
    meta.p = vec![p, pp, r];
    Ok(VerificationRecord::compound("lp", vec![contraction, holder]).with_meta(meta))
}
