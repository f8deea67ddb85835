//! Executable forms of the multi-insertion Hölder inequality for Gibbs
//! states and of the bounds used to prove it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nclp::kms_norm;
use crate::record::RecordMeta;
pub use crate::record::VerificationRecord;
use crate::spectral::{
    check_psd_spectrum, eig_hermitian, fractional_power_with, schatten_norm, ComplexMatrix, SupportPolicy, TOL_PSD,
};
use crate::standard_form::{GibbsEnsemble, StateFunctional, FAITHFULNESS_FLOOR};

/// Relative agreement required between the two correlation evaluations.
pub const TOL_ROUTES: f64 = 1e-10;
/// Absolute agreement floor, relative to `Π‖A_j‖`, for correlations that
/// cancel far below the size of their factors.
pub const TOL_ROUTES_ABS: f64 = 1e-14;
/// Slack on `Re w_j ≥ 0` for the intermediate exponents of the proof.
pub const TOL_W: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Insertion points `(z_1, …, z_n)` with `Re z_j ≥ 0` and `Σ Re z_j ≤ α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsertionTuple {
    z: Vec<Complex64>,
    alpha: f64,
}

impl InsertionTuple {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        Self::with_budget(z, 1.0)
    }

    pub fn with_budget(z: Vec<Complex64>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidInsertion(format!("budget {alpha} must be positive")));
        }
        if z.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(j) = z.iter().position(|w| w.re < 0.0) {
            return Err(Error::InvalidInsertion(format!("Re z_{} = {} is negative", j + 1, z[j].re)));
        }
        let sum: f64 = z.iter().map(|w| w.re).sum();
        if sum > alpha * (1.0 + 1e-12) {
            return Err(Error::BudgetViolation { sum, allowed: alpha });
        }
        Ok(InsertionTuple { z, alpha })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.z
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn real_sum(&self) -> f64 {
        self.z.iter().map(|w| w.re).sum()
    }

    /// `z_0 = 1 − Σ Re z_j`.
    pub fn z0(&self) -> f64 {
        1.0 - self.real_sum()
    }

    /// Same real parts, imaginary parts shifted by `offsets`.
    pub fn shifted(&self, offsets: &[f64]) -> Result<Self> {
        if offsets.len() != self.len() {
            return Err(Error::DimMismatch { expected: self.len(), got: offsets.len() });
        }
        let z = self.z.iter().zip(offsets).map(|(w, &t)| w + c(0.0, t)).collect();
        Self::with_budget(z, self.alpha)
    }
}

/// Splitting `z_m = z'_m + z''_m` for the two-sided bound, `m` counted from 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub m: usize,
    pub z_prime: Complex64,
    pub z_dprime: Complex64,
}

impl SplitSpec {
    /// Checks `Re z' > 0`, `Re z'' > 0`, `z' + z'' = z_m` and the two half-budget
    /// conditions `Σ_{j<m} Re z_j + Re z'' ≤ 1/2`, `Σ_{j>m} Re z_j + Re z' ≤ 1/2`.
    pub fn validate(&self, z: &InsertionTuple) -> Result<()> {
        let n = z.len();
        if self.m == 0 || self.m > n {
            return Err(Error::InvalidSplit(format!("index {} outside 1..={n}", self.m)));
        }
        if !(self.z_prime.re > 0.0 && self.z_dprime.re > 0.0) {
            return Err(Error::InvalidSplit("split parts need positive real parts".into()));
        }
        let zm = z.values()[self.m - 1];
        if (self.z_prime + self.z_dprime - zm).norm() > 1e-12 * (1.0 + zm.norm()) {
            return Err(Error::InvalidSplit("split parts do not add up to z_m".into()));
        }
        let re = |j: usize| z.values()[j - 1].re;
        let before: f64 = (1..self.m).map(re).sum::<f64>() + self.z_dprime.re;
        let after: f64 = (self.m + 1..=n).map(re).sum::<f64>() + self.z_prime.re;
        let slack = 0.5 + 1e-12;
        if before > slack {
            return Err(Error::InvalidSplit(format!("left half-budget {before} exceeds 1/2")));
        }
        if after > slack {
            return Err(Error::InvalidSplit(format!("right half-budget {after} exceeds 1/2")));
        }
        Ok(())
    }

    /// A valid split for `z`: `m` is the first index whose cumulative real sum
    /// reaches 1/2 (or `n`), `Re z''` sits at fraction `frac ∈ [0, 1]` of its
    /// admissible interval and `Im z'' = im_share · Im z_m`.
    pub fn choose(z: &InsertionTuple, frac: f64, im_share: f64) -> Result<Self> {
        let n = z.len();
        if n == 0 {
            return Err(Error::InvalidSplit("no insertion to split".into()));
        }
        if z.real_sum() > 1.0 + 1e-12 {
            return Err(Error::BudgetViolation { sum: z.real_sum(), allowed: 1.0 });
        }
        let re: Vec<f64> = z.values().iter().map(|w| w.re).collect();
        let mut m = n;
        let mut acc = 0.0;
        for (j, r) in re.iter().enumerate() {
            acc += r;
            if acc >= 0.5 {
                m = j + 1;
                break;
            }
        }
        let a: f64 = re[..m - 1].iter().sum();
        let b: f64 = re[m..].iter().sum();
        let zm = z.values()[m - 1];
        let lo = (zm.re + b - 0.5).max(0.0);
        let hi = zm.re.min(0.5 - a);
        let t = lo + frac.clamp(0.0, 1.0) * (hi - lo);
        let z_dprime = c(t, im_share * zm.im);
        let split = SplitSpec { m, z_prime: zm - z_dprime, z_dprime };
        split.validate(z)?;
        Ok(split)
    }
}

fn smallest_even_exponent(bound: f64) -> u32 {
    let mut p = (2.0 * (0.5 / bound).ceil()).max(2.0) as u32;
    while 1.0 / p as f64 > bound {
        p += 2;
    }
    while p > 2 && 1.0 / (p - 2) as f64 <= bound {
        p -= 2;
    }
    p
}

/// Exponents `(p_0, …, p_n)`: `p_j` is the smallest even integer with
/// `1/p_j ≤ min(Re z_j, Re z_{j+1})`, reading `z_0 = z_1` and `z_{n+1} = z_n`.
pub fn exponent_rule(z: &InsertionTuple) -> Result<Vec<u32>> {
    let n = z.len();
    if n == 0 {
        return Err(Error::InvalidInsertion("exponent rule needs at least one insertion".into()));
    }
    let re: Vec<f64> = z.values().iter().map(|w| w.re).collect();
    if let Some(j) = re.iter().position(|&r| r <= 0.0) {
        return Err(Error::ZeroRealPart(j + 1));
    }
    let at = |j: usize| re[j.clamp(1, n) - 1];
    Ok((0..=n).map(|j| smallest_even_exponent(at(j).min(at(j + 1)))).collect())
}

/// `w_j = z_j − 1/(2p_j) − 1/(2p_{j−1})` for `j = 1, …, n`.
pub fn intermediate_exponents(z: &InsertionTuple, p: &[u32]) -> Vec<Complex64> {
    z.values().iter().enumerate().map(|(i, w)| w - 0.5 / p[i + 1] as f64 - 0.5 / p[i] as f64).collect()
}

fn check_operator_list(ens: &GibbsEnsemble, a_list: &[ComplexMatrix], z: &InsertionTuple) -> Result<()> {
    if a_list.len() != z.len() + 1 {
        return Err(Error::DimMismatch { expected: z.len() + 1, got: a_list.len() });
    }
    for a in a_list {
        a.check_dim(ens.dim())?;
    }
    let sum = z.real_sum();
    if sum > 1.0 + 1e-12 {
        return Err(Error::BudgetViolation { sum, allowed: 1.0 });
    }
    Ok(())
}

/// Both evaluations of `ω(A_n Δ^{z_n} ⋯ A_1 Δ^{z_1} A_0)`: the nested vector
/// form `⟨Ω, A_n Δ^{z_n}(⋯ A_1 Δ^{z_1}(A_0 Ω))⟩` in the energy basis, and the
/// single trace `Tr(A_n ρ^{z_n} ⋯ A_1 ρ^{z_1} A_0 ρ^{1−Σz_j})`.
pub fn multi_correlation_routes(
    ens: &GibbsEnsemble,
    a_list: &[ComplexMatrix],
    z: &InsertionTuple,
) -> Result<(Complex64, Complex64)> {
    check_operator_list(ens, a_list, z)?;
    let zs = z.values();

    let omega = ens.omega_energy_basis();
    let mut v = &ens.to_energy_basis(&a_list[0]) * &omega;
    for (j, w) in zs.iter().enumerate() {
        v = &ens.to_energy_basis(&a_list[j + 1]) * &ens.modular_scale(*w, &v);
    }
    let nested = omega.hs_inner(&v);

    let total: Complex64 = zs.iter().sum();
    let mut prod = &a_list[0] * &ens.rho_power(c(1.0, 0.0) - total);
    for (j, w) in zs.iter().enumerate() {
        prod = &(&a_list[j + 1] * &ens.rho_power(*w)) * &prod;
    }
    Ok((nested, prod.trace()))
}

/// `ω(A_n Δ^{z_n} ⋯ A_1 Δ^{z_1} A_0)`, cross-checked between two routes.
pub fn multi_correlation(ens: &GibbsEnsemble, a_list: &[ComplexMatrix], z: &InsertionTuple) -> Result<Complex64> {
    let (nested, trace) = multi_correlation_routes(ens, a_list, z)?;
    let scale: f64 = a_list.iter().map(|a| a.operator_norm()).product();
    let tol = TOL_ROUTES * nested.norm().max(trace.norm()) + TOL_ROUTES_ABS * scale;
    if !((nested - trace).norm() <= tol) {
        return Err(Error::RouteDisagreement { a: format!("{nested}"), b: format!("{trace}") });
    }
    Ok(nested)
}

fn require_psd(a: &ComplexMatrix) -> Result<()> {
    check_psd_spectrum(&eig_hermitian(a)?, TOL_PSD)
}

fn holder_meta(ens: &GibbsEnsemble, z: &InsertionTuple, p: &[u32]) -> RecordMeta {
    let mut meta = ens.meta();
    meta.n = Some(z.len());
    meta.p = p.iter().map(|&q| q as f64).collect();
    meta.set_z(z.values());
    meta
}

/// `|ω(A_n Δ^{z_n} ⋯ A_1 Δ^{z_1} A_0)| ≤ ‖A_0‖_{p_0} ⋯ ‖A_n‖_{p_n}` for positive `A_j`
/// with exponents from [`exponent_rule`].
pub fn holder_check(ens: &GibbsEnsemble, a_list: &[ComplexMatrix], z: &InsertionTuple) -> Result<VerificationRecord> {
    let p = exponent_rule(z)?;
    check_operator_list(ens, a_list, z)?;
    for a in a_list {
        require_psd(a)?;
    }
    let w = intermediate_exponents(z, &p);
    let min_re_w = w.iter().map(|x| x.re).fold(f64::INFINITY, f64::min);
    if min_re_w < -TOL_W {
        return Err(Error::Postcondition(format!("intermediate exponent with Re w = {min_re_w}")));
    }
    let lhs = multi_correlation(ens, a_list, z)?;
    let mut rhs = 1.0;
    for (a, &pj) in a_list.iter().zip(&p) {
        rhs *= kms_norm(ens, a, pj)?;
    }
    // Σ Re z_j + 1/(2p_0) + 1/(2p_n): total weight the proof's factorization needs
    let budget = z.real_sum() + 0.5 / p[0] as f64 + 0.5 / p[z.len()] as f64;
    let meta = holder_meta(ens, z, &p).with_extra("min_re_w", min_re_w).with_extra("proof_budget", budget);
    Ok(VerificationRecord::inequality("holder", c(lhs.norm(), 0.0), rhs).with_meta(meta))
}

/// Both sides of the Hölder bound for operators that need not be positive,
/// with `‖|A_j|‖_{p_j}` on the right. No pass/fail is attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderDiagnostic {
    pub correlation: Complex64,
    pub abs_norm_product: f64,
}

pub fn holder_diagnostic(
    ens: &GibbsEnsemble,
    a_list: &[ComplexMatrix],
    z: &InsertionTuple,
) -> Result<HolderDiagnostic> {
    let p = exponent_rule(z)?;
    let correlation = multi_correlation(ens, a_list, z)?;
    let mut abs_norm_product = 1.0;
    for (a, &pj) in a_list.iter().zip(&p) {
        let abs = fractional_power_with(&(&a.adjoint() * a).hermitian_part(), c(0.5, 0.0), SupportPolicy::OnSupport)?;
        abs_norm_product *= kms_norm(ens, &abs, pj)?;
    }
    Ok(HolderDiagnostic { correlation, abs_norm_product })
}

/// Araki's two-sided bound
/// `|⟨Δ_{φ_m}^{z̄'} X_m^* ⋯ Δ_{φ_n}^{z̄_n} X_n^* Ω, Δ_{φ_m}^{z̄''} X_{m−1} ⋯ Δ_{φ_1}^{z̄_1} X_0 Ω⟩|
///  ≤ Π‖X_j‖ · (Ω, Ω)^{z_0} · Π φ_j(𝟙)^{Re z_j}`,
/// with relative powers restricted to the support of each `φ_j`.
pub fn araki_bound_check(
    ens: &GibbsEnsemble,
    x_list: &[ComplexMatrix],
    phi_list: &[StateFunctional],
    z: &InsertionTuple,
    split: &SplitSpec,
) -> Result<VerificationRecord> {
    check_operator_list(ens, x_list, z)?;
    let n = z.len();
    if phi_list.len() != n {
        return Err(Error::DimMismatch { expected: n, got: phi_list.len() });
    }
    split.validate(z)?;
    let zs = z.values();
    let m = split.m;
    let rel = |j: usize, w: Complex64, v: &ComplexMatrix| {
        ens.relative_modular_power_apply_with(&phi_list[j - 1], w.conj(), v, SupportPolicy::OnSupport)
    };

    let omega = ens.omega_vec();
    let mut right = &x_list[0] * omega;
    for j in 1..m {
        right = &x_list[j] * &rel(j, zs[j - 1], &right)?;
    }
    let right = rel(m, split.z_dprime, &right)?;

    let mut left = &x_list[n].adjoint() * omega;
    for j in (m + 1..=n).rev() {
        left = &x_list[j - 1].adjoint() * &rel(j, zs[j - 1], &left)?;
    }
    let left = rel(m, split.z_prime, &left)?;

    let lhs = left.hs_inner(&right);
    let omega_sq = omega.hs_inner(omega).re;
    let mut rhs: f64 = x_list.iter().map(|x| x.operator_norm()).product();
    rhs *= omega_sq.powf(z.z0());
    for (phi, w) in phi_list.iter().zip(zs) {
        rhs *= phi.value_on_identity().max(0.0).powf(w.re);
    }
    let mut meta = ens.meta();
    meta.n = Some(n);
    meta.set_z(zs);
    let meta = meta
        .with_extra("split_m", m as f64)
        .with_extra("split_re_z_dprime", split.z_dprime.re)
        .with_extra("omega_norm_sq", omega_sq);
    Ok(VerificationRecord::inequality("araki", lhs, rhs).with_meta(meta))
}

/// `‖ω^{1/2p} A ω^{1/2p}‖_{S_p}`; `p = ∞` gives the operator norm.
pub fn weighted_schatten_norm(omega_density: &ComplexMatrix, a: &ComplexMatrix, p: f64) -> Result<f64> {
    if p.is_infinite() {
        return Ok(a.operator_norm());
    }
    let w = fractional_power_with(omega_density, c(0.5 / p, 0.0), SupportPolicy::OnSupport)?;
    Ok(schatten_norm(&(&(&w * a) * &w), p))
}

/// `Tr((ω^{1/2p}|A|ω^{1/2p})^p)^{1/p}` with `|A| = (A*A)^{1/2}`.
pub fn abs_weighted_norm(omega_density: &ComplexMatrix, a: &ComplexMatrix, p: f64) -> Result<f64> {
    let abs = fractional_power_with(&(&a.adjoint() * a).hermitian_part(), c(0.5, 0.0), SupportPolicy::OnSupport)?;
    weighted_schatten_norm(omega_density, &abs, p)
}

/// Density-matrix trace inequalities with `1/p + 1/q = 1`.
///
/// * `trace_holder.pairing`: `|Tr(ω^{1/2} A ω^{1/2} B)| ≤ ‖ω^{1/2p}Aω^{1/2p}‖_p ‖ω^{1/2q}Bω^{1/2q}‖_q`
///   for `A = A_list[0]`, `B = A_list[1]`. For positive `A`, `B` the two factors
///   are the weighted norms `Tr((ω^{1/2p}Aω^{1/2p})^p)^{1/p}`. The one-sided
///   pairing `Tr(ωAB)` against `|A|`, `|B|` is recorded in the metadata only
///   (`one_sided_lhs`, `one_sided_rhs`); it is not a valid bound in general.
/// * `trace_holder.relative`: `|⟨A_2 Δ_{ν₂,ω}^{1/p} A_1 Δ_{ν₁,ω}^{1/q} A_0⟩_ω|
///   ≤ Π‖A_j‖ (Tr ν₂)^{1/p} (Tr ν₁)^{1/q}` with `Δ_{ν,ω}^s ξ = ν^s ξ ω^{−s}`.
pub fn finite_trace_holder_check(
    nu_list: &[ComplexMatrix],
    omega_density: &ComplexMatrix,
    a_list: &[ComplexMatrix],
    p: f64,
) -> Result<VerificationRecord> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent(p));
    }
    if nu_list.len() != 2 {
        return Err(Error::DimMismatch { expected: 2, got: nu_list.len() });
    }
    if a_list.len() != 3 {
        return Err(Error::DimMismatch { expected: 3, got: a_list.len() });
    }
    let d = omega_density.dim();
    for m in nu_list.iter().chain(a_list) {
        m.check_dim(d)?;
    }
    let q = if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    };

    let om_spec = eig_hermitian(omega_density)?;
    check_psd_spectrum(&om_spec, TOL_PSD)?;
    if (omega_density.trace().re - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidMatrix("state density must have unit trace".into()));
    }
    if om_spec.min_value() <= FAITHFULNESS_FLOOR * om_spec.max_value() {
        return Err(Error::SingularState);
    }
    for nu in nu_list {
        require_psd(nu)?;
    }
    let om_pow = |s: f64| om_spec.power(c(s, 0.0), SupportPolicy::Strict);
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };

    let (a, b) = (&a_list[0], &a_list[1]);
    let half = om_pow(0.5)?;
    let pairing = (&(&(&half * a) * &half) * b).trace();
    let pairing_rhs = weighted_schatten_norm(omega_density, a, p)? * weighted_schatten_norm(omega_density, b, q)?;
    let one_sided = (&(omega_density * a) * b).trace();
    let one_sided_rhs = abs_weighted_norm(omega_density, a, p)? * abs_weighted_norm(omega_density, b, q)?;
    let mut eq9 = VerificationRecord::inequality("trace_holder.pairing", pairing, pairing_rhs);
    eq9.meta =
        RecordMeta::default().with_extra("one_sided_lhs", one_sided.norm()).with_extra("one_sided_rhs", one_sided_rhs);

    let rel = |nu: &ComplexMatrix, s: f64, xi: &ComplexMatrix| -> Result<ComplexMatrix> {
        let left = fractional_power_with(nu, c(s, 0.0), SupportPolicy::OnSupport)?;
        Ok(&(&left * xi) * &om_pow(-s)?)
    };
    let v = rel(&nu_list[0], inv(q), &(&a_list[0] * &half))?;
    let v = rel(&nu_list[1], inv(p), &(&a_list[1] * &v))?;
    let relative = half.hs_inner(&(&a_list[2] * &v));
    let mut relative_rhs: f64 = a_list.iter().map(|a| a.operator_norm()).product();
    relative_rhs *= nu_list[1].trace().re.max(0.0).powf(inv(p)) * nu_list[0].trace().re.max(0.0).powf(inv(q));
    let eq10 = VerificationRecord::inequality("trace_holder.relative", relative, relative_rhs);

    let meta = RecordMeta { dim: Some(d), p: vec![p, q], ..RecordMeta::default() };
    Ok(VerificationRecord::compound("trace_holder", vec![eq9, eq10]).with_meta(meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn two_level() -> GibbsEnsemble {
        GibbsEnsemble::new(ComplexMatrix::from_real_diagonal(&[0.0, 2f64.ln()]), 1.0).unwrap()
    }

    fn tuple(z: &[(f64, f64)]) -> InsertionTuple {
        InsertionTuple::new(z.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    #[test]
    fn exponent_rule_examples() {
        assert_eq!(exponent_rule(&tuple(&[(0.5, 0.0), (0.5, 0.0)])).unwrap(), vec![2, 2, 2]);
        assert_eq!(exponent_rule(&tuple(&[(0.3, 0.0), (0.4, 0.0)])).unwrap(), vec![4, 4, 4]);
        assert_eq!(exponent_rule(&tuple(&[(0.5, 7.0)])).unwrap(), vec![2, 2]);
        assert_eq!(exponent_rule(&tuple(&[(0.05, 0.0), (0.25, 0.0)])).unwrap(), vec![20, 20, 4]);
        assert_eq!(exponent_rule(&tuple(&[(0.0, 1.0), (0.5, 0.0)])), Err(Error::ZeroRealPart(1)));
    }

    #[test]
    fn exponent_rule_is_minimal() {
        for k in 1..400 {
            let r = k as f64 / 400.0;
            let p = exponent_rule(&tuple(&[(r, 0.0)])).unwrap()[0];
            assert!(p.is_multiple_of(2) && 1.0 / p as f64 <= r);
            assert!(p == 2 || 1.0 / (p - 2) as f64 > r, "r = {r}, p = {p}");
        }
    }

    #[test]
    fn insertion_tuple_invariants() {
        assert!(matches!(InsertionTuple::new(vec![c(0.6, 0.0), c(0.6, 0.0)]), Err(Error::BudgetViolation { .. })));
        assert!(matches!(InsertionTuple::new(vec![c(-0.1, 0.0)]), Err(Error::InvalidInsertion(_))));
        let z = InsertionTuple::with_budget(vec![c(0.6, 0.0), c(0.6, 0.0)], 1.5).unwrap();
        assert_abs_diff_eq!(z.z0(), -0.2, epsilon = 1e-15);
    }

    #[test]
    fn multi_correlation_examples() {
        let ens = two_level();
        let id = ComplexMatrix::identity(2);
        let z = tuple(&[(0.2, 1.0), (0.3, -2.0)]);
        let v = multi_correlation(&ens, &[id.clone(), id.clone(), id.clone()], &z).unwrap();
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);

        let v = multi_correlation(&ens, &[sigma_x(), sigma_x()], &tuple(&[(0.5, 0.0)])).unwrap();
        assert_abs_diff_eq!(v.re, 2.0 * 2f64.sqrt() / 3.0, epsilon = 1e-14);

        let over = InsertionTuple::with_budget(vec![c(0.7, 0.0), c(0.7, 0.0)], 2.0).unwrap();
        assert!(matches!(
            multi_correlation(&ens, &[id.clone(), id.clone(), id], &over),
            Err(Error::BudgetViolation { .. })
        ));
    }

    #[test]
    fn holder_check_examples() {
        let ens = two_level();
        let id = ComplexMatrix::identity(2);
        let r = holder_check(&ens, &[id.clone(), id.clone(), id], &tuple(&[(0.3, 0.0), (0.4, 0.5)])).unwrap();
        assert!(r.pass);
        assert_abs_diff_eq!(r.lhs.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.rhs, 1.0, epsilon = 1e-13);
        assert_eq!(r.meta.p, vec![4.0, 4.0, 4.0]);

        // σ_x is not positive; the saturated pair uses 𝟙 + σ_x instead
        assert!(matches!(holder_check(&ens, &[sigma_x(), sigma_x()], &tuple(&[(0.5, 0.0)])), Err(Error::NotPsd(_))));
        let a = &sigma_x() + &ComplexMatrix::identity(2);
        let r = holder_check(&ens, &[a.clone(), a], &tuple(&[(0.5, 0.0)])).unwrap();
        assert!(r.pass);
        assert_abs_diff_eq!(r.lhs.re, r.rhs, epsilon = 1e-13);
    }

    #[test]
    fn stated_rule_fails_beyond_unit_budget() {
        // ρ = diag(2/3, 1/3), A = [[1,1],[1,1]], z = 0.9: the rule gives p = (2, 2), but
        // Tr(Aρ^{0.9}Aρ^{0.1}) = (Σρ_k^{0.9})(Σρ_j^{0.1}) exceeds ‖A‖₂² = (Σρ_k^{1/2})²
        let ens = two_level();
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        let r = holder_check(&ens, &[a.clone(), a], &tuple(&[(0.9, 0.0)])).unwrap();
        let rho = [2.0 / 3.0, 1.0 / 3.0];
        let sum = |s: f64| rho.iter().map(|x: &f64| x.powf(s)).sum::<f64>();
        assert_abs_diff_eq!(r.lhs.re, sum(0.9) * sum(0.1), epsilon = 1e-13);
        assert_abs_diff_eq!(r.rhs, sum(0.5).powi(2), epsilon = 1e-13);
        assert_eq!(r.meta.p, vec![2.0, 2.0]);
        assert_abs_diff_eq!(r.meta.extra["proof_budget"], 1.4, epsilon = 1e-15);
        assert!(!r.pass);
    }

    #[test]
    fn holder_diagnostic_on_sigma_x() {
        let ens = two_level();
        let d = holder_diagnostic(&ens, &[sigma_x(), sigma_x()], &tuple(&[(0.5, 0.0)])).unwrap();
        assert_abs_diff_eq!(d.correlation.re, 2.0 * 2f64.sqrt() / 3.0, epsilon = 1e-14);
        // |σ_x| = 𝟙
        assert_abs_diff_eq!(d.abs_norm_product, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn split_selection() {
        let z = tuple(&[(0.3, 1.0), (0.4, 0.0), (0.2, -1.0)]);
        let s = SplitSpec::choose(&z, 0.5, 0.5).unwrap();
        assert_eq!(s.m, 2);
        s.validate(&z).unwrap();
        let bad = SplitSpec { m: 2, z_prime: c(0.35, 0.0), z_dprime: c(0.05, 0.0) };
        assert!(matches!(bad.validate(&z), Err(Error::InvalidSplit(_))));
        let z = tuple(&[(0.1, 0.0), (0.1, 0.0)]);
        assert_eq!(SplitSpec::choose(&z, 0.5, 0.0).unwrap().m, 2);
    }

    #[test]
    fn araki_examples() {
        let ens = two_level();
        let id = ComplexMatrix::identity(2);
        let z = tuple(&[(0.3, 0.2), (0.4, -1.0)]);
        let split = SplitSpec::choose(&z, 0.5, 0.3).unwrap();
        let r = araki_bound_check(&ens, &[id.clone(), id.clone(), id.clone()], &[ens.state(), ens.state()], &z, &split)
            .unwrap();
        assert_abs_diff_eq!(r.lhs.norm(), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r.rhs, 1.0, epsilon = 1e-14);
        assert!(r.pass);

        let z = tuple(&[(0.5, 0.0)]);
        let split = SplitSpec { m: 1, z_prime: c(0.25, 0.0), z_dprime: c(0.25, 0.0) };
        let r = araki_bound_check(&ens, &[sigma_x(), sigma_x()], &[ens.state()], &z, &split).unwrap();
        assert_abs_diff_eq!(r.lhs.re, 2.0 * 2f64.sqrt() / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.rhs, 1.0, epsilon = 1e-14);

        let bad = SplitSpec { m: 1, z_prime: c(0.45, 0.0), z_dprime: c(0.05, 0.0) };
        let z = tuple(&[(0.5, 0.0), (0.3, 0.0)]);
        assert!(matches!(
            araki_bound_check(&ens, &[id.clone(), id.clone(), id], &[ens.state(), ens.state()], &z, &bad),
            Err(Error::InvalidSplit(_))
        ));
    }

    #[test]
    fn trace_holder_trivial_cases() {
        let om = ComplexMatrix::from_real_diagonal(&[2.0 / 3.0, 1.0 / 3.0]);
        let id = ComplexMatrix::identity(2);
        let r = finite_trace_holder_check(&[om.clone(), om.clone()], &om, &[id.clone(), id.clone(), id.clone()], 3.0)
            .unwrap();
        assert!(r.pass);
        for part in &r.parts {
            assert_abs_diff_eq!(part.lhs.norm(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(part.rhs, 1.0, epsilon = 1e-14);
        }
        let singular = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert_eq!(
            finite_trace_holder_check(&[om.clone(), om.clone()], &singular, &[id.clone(), id.clone(), id], 2.0),
            Err(Error::SingularState)
        );
    }

    #[test]
    fn one_sided_pairing_can_exceed_absolute_norms() {
        // ω = diag(2/3, 1/3), A = B = [[1,1],[1,1]], p = 2: Tr(ωAB) = 2 while
        // ‖A‖_{ω,2}² = Tr((ω^{1/4}Aω^{1/4})²) = (ω₁^{1/2} + ω₂^{1/2})² = 1 + 2√2/3 < 2.
        let om = ComplexMatrix::from_real_diagonal(&[2.0 / 3.0, 1.0 / 3.0]);
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        let id = ComplexMatrix::identity(2);
        let r = finite_trace_holder_check(&[om.clone(), om.clone()], &om, &[a.clone(), a, id], 2.0).unwrap();
        let eq9 = r.part("trace_holder.pairing").unwrap();
        assert_abs_diff_eq!(eq9.meta.extra["one_sided_lhs"], 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(eq9.meta.extra["one_sided_rhs"], 1.0 + 2.0 * 2f64.sqrt() / 3.0, epsilon = 1e-13);
        assert!(eq9.meta.extra["one_sided_lhs"] > eq9.meta.extra["one_sided_rhs"]);
        assert!(eq9.pass);
    }
}
