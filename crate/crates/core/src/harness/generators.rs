//! Random instance generators. Every generator is a pure function of its seed.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holder_verify::InsertionTuple;
use crate::seed::rng_from_seed;
use crate::spectral::{eig_hermitian, ComplexMatrix};

/// Largest matrix dimension the generators produce.
pub const MAX_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    Gue,
    Diagonal,
    IsingChain,
}

impl HamiltonianKind {
    /// Matrix dimension for a size parameter (sites for the chain, `d` otherwise).
    pub fn dim_for(self, size: usize) -> usize {
        match self {
            HamiltonianKind::IsingChain => 1usize.checked_shl(size as u32).unwrap_or(usize::MAX),
            _ => size,
        }
    }

    /// Size parameter producing dimension `dim`, if any.
    pub fn size_for_dim(self, dim: usize) -> Option<usize> {
        match self {
            HamiltonianKind::IsingChain => (dim.is_power_of_two() && dim >= 2).then(|| dim.trailing_zeros() as usize),
            _ => Some(dim),
        }
    }
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with independent standard complex Gaussian entries.
pub fn gaussian_matrix(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| gaussian(rng))
}

/// Haar unitary: QR of a complex Gaussian matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let qr = gaussian_matrix(dim, rng).into_dmatrix().qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_dmatrix(q).expect("square by construction")
}

fn pauli_z_chain(k: usize, site: usize, bits: usize) -> f64 {
    if bits >> (k - 1 - site) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Transverse-field Ising chain `−Σ Z_iZ_{i+1} − g Σ X_i` on `k` sites, open boundary.
pub fn ising_chain(k: usize, g: f64) -> Result<ComplexMatrix> {
    if k == 0 {
        return Err(Error::Config("Ising chain needs at least one site".into()));
    }
    let d = HamiltonianKind::IsingChain.dim_for(k);
    if d > MAX_DIM {
        return Err(Error::SizeTooLarge(d));
    }
    let mut h = ComplexMatrix::zeros(d);
    for b in 0..d {
        let zz: f64 = (0..k.saturating_sub(1)).map(|i| pauli_z_chain(k, i, b) * pauli_z_chain(k, i + 1, b)).sum();
        h[(b, b)] += Complex64::new(-zz, 0.0);
        for i in 0..k {
            let flipped = b ^ (1 << (k - 1 - i));
            h[(flipped, b)] += Complex64::new(-g, 0.0);
        }
    }
    Ok(h)
}

/// Random Hamiltonian of the given kind; `size` is the dimension, or the
/// number of sites for the Ising chain. `g` is the transverse field.
pub fn gen_hamiltonian(kind: HamiltonianKind, size: usize, seed: u64, g: f64) -> Result<ComplexMatrix> {
    let d = kind.dim_for(size);
    if d > MAX_DIM {
        return Err(Error::SizeTooLarge(d));
    }
    if size == 0 {
        return Err(Error::Config("size must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    match kind {
        HamiltonianKind::Gue => {
            let g = gaussian_matrix(d, &mut rng);
            Ok(g.hermitian_part())
        }
        HamiltonianKind::Diagonal => {
            let diag: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            Ok(ComplexMatrix::from_real_diagonal(&diag))
        }
        HamiltonianKind::IsingChain => ising_chain(size, g),
    }
}

/// Affine rescaling of `h` to spectrum in `[0, 1]` (unchanged if the spectrum is flat).
pub fn normalize_spread(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = eig_hermitian(h)?;
    let (lo, hi) = (spec.min_value(), spec.max_value());
    let spread = hi - lo;
    let d = h.dim();
    if spread <= 1e-12 * hi.abs().max(lo.abs()).max(1.0) {
        return Ok(ComplexMatrix::zeros(d));
    }
    Ok((h - &ComplexMatrix::identity(d).scale_real(lo)).scale_real(1.0 / spread).hermitian_part())
}

/// `U diag(s) U*` drawn from an existing stream; see [`gen_positive`].
pub fn random_positive(dim: usize, conditioning: f64, rng: &mut impl Rng) -> ComplexMatrix {
    let u = random_unitary(dim, rng);
    let log_c = conditioning.ln();
    let s: Vec<f64> = (0..dim).map(|_| (-log_c * rng.random::<f64>()).exp()).collect();
    ComplexMatrix::from_real_diagonal(&s).conjugate_by(&u).hermitian_part()
}

/// `U diag(s) U*` with Haar `U` and `s` log-uniform in `[1/conditioning, 1]`.
pub fn gen_positive(dim: usize, seed: u64, conditioning: f64) -> Result<ComplexMatrix> {
    if !(conditioning >= 1.0) || !conditioning.is_finite() {
        return Err(Error::Config(format!("conditioning {conditioning} must be ≥ 1")));
    }
    if dim > MAX_DIM {
        return Err(Error::SizeTooLarge(dim));
    }
    Ok(random_positive(dim, conditioning, &mut rng_from_seed(seed)))
}

/// Insertion tuple with `Re z_j ≥ re_floor`, `Σ Re z_j ≤ alpha` and
/// `Im z_j` uniform in `[−im_t, im_t]`. The real parts are
/// `re_floor + (T − n·re_floor)·D_j` with `D` flat Dirichlet and the total
/// `T` uniform in `[n·re_floor, alpha]`.
pub fn gen_insertions(n: usize, alpha: f64, re_floor: f64, im_t: f64, seed: u64) -> Result<InsertionTuple> {
    if n == 0 {
        return Err(Error::Config("need at least one insertion".into()));
    }
    if !(re_floor >= 0.0) || n as f64 * re_floor >= alpha {
        return Err(Error::InfeasibleFloor { need: n as f64 * re_floor, alpha });
    }
    if !(im_t >= 0.0) {
        return Err(Error::Config(format!("imaginary range {im_t} must be nonnegative")));
    }
    let mut rng = rng_from_seed(seed);
    let floor_total = n as f64 * re_floor;
    let total = floor_total + (alpha - floor_total) * rng.random::<f64>();
    let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let sum: f64 = e.iter().sum();
    let z = e
        .iter()
        .map(|x| {
            let re = re_floor + (total - floor_total) * x / sum;
            let im = im_t * (2.0 * rng.random::<f64>() - 1.0);
            Complex64::new(re.max(re_floor), im)
        })
        .collect();
    InsertionTuple::with_budget(z, alpha)
}

/// Positive functional with random spectrum; `rank < dim` zeroes the smallest
/// eigenvalues, and the trace is scaled to `trace`.
pub fn gen_functional_density(dim: usize, rank: usize, trace: f64, rng: &mut impl Rng) -> ComplexMatrix {
    let u = random_unitary(dim, rng);
    let mut s: Vec<f64> = (0..dim).map(|i| if i < rank { 0.05 + rng.random::<f64>() } else { 0.0 }).collect();
    let sum: f64 = s.iter().sum();
    for v in &mut s {
        *v *= trace / sum;
    }
    ComplexMatrix::from_real_diagonal(&s).conjugate_by(&u).hermitian_part()
}

/// Log-uniform sample in `[lo, hi]`.
pub fn log_uniform(lo: f64, hi: f64, rng: &mut impl Rng) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
}
