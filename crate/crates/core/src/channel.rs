//! Completely positive maps in Kraus form and a few non-Kraus linear maps used
//! as negative controls.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::eig::hermitian_eig;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::random::rng_from_seed;
use crate::tol;

/// A linear map between square matrix spaces together with its adjoint with
/// respect to the Hilbert–Schmidt inner product.
pub trait LinearMap {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix>;
    /// `Φ†`, satisfying `Tr(B* Φ(A)) = Tr(Φ†(B)* A)`.
    fn apply_adjoint(&self, b: &ComplexMatrix) -> Result<ComplexMatrix>;
}

impl<M: LinearMap + ?Sized> LinearMap for &M {
    fn input_dim(&self) -> usize {
        (**self).input_dim()
    }
    fn output_dim(&self) -> usize {
        (**self).output_dim()
    }
    fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        (**self).apply(a)
    }
    fn apply_adjoint(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        (**self).apply_adjoint(b)
    }
}

/// `A ↦ Σ_i K_i A K_i*`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausMap {
    kraus: Vec<ComplexMatrix>,
    d_in: usize,
    d_out: usize,
}

impl KrausMap {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let (d_out, d_in) = first.shape();
        for k in &kraus {
            k.ensure_shape(d_out, d_in)?;
        }
        Ok(Self { kraus, d_in, d_out })
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: alloc::vec![ComplexMatrix::identity(d)],
            d_in: d,
            d_out: d,
        }
    }

    /// `ρ ↦ (1−λ)ρ + λ Tr(ρ) I/d`, with Kraus operators `√(1−λ) I` and
    /// `√(λ/d) E_ij`.
    pub fn depolarizing(d: usize, lambda: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter { name: "d", value: 0.0 });
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
            });
        }
        let mut kraus = Vec::with_capacity(d * d + 1);
        if lambda < 1.0 {
            kraus.push(ComplexMatrix::identity(d).scale_real((1.0 - lambda).sqrt()));
        }
        if lambda > 0.0 {
            let w = (lambda / d as f64).sqrt();
            for i in 0..d {
                for j in 0..d {
                    kraus.push(ComplexMatrix::unit(d, i, j).scale_real(w));
                }
            }
        }
        Self::new(kraus)
    }

    /// Qubit amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
            });
        }
        let k0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()])?;
        let k1 = ComplexMatrix::from_real(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0])?;
        Self::new(alloc::vec![k0, k1])
    }

    /// Random trace-preserving map: a Gaussian `(d_out·rank) × d_in` matrix
    /// with orthonormalized columns, sliced row-wise into `rank` Kraus
    /// operators. Deterministic in `seed`.
    pub fn random_stinespring(d_in: usize, d_out: usize, kraus_rank: usize, seed: u64) -> Result<Self> {
        if d_in == 0 || d_out == 0 {
            return Err(Error::InvalidParameter { name: "d", value: 0.0 });
        }
        if kraus_rank == 0 || d_out * kraus_rank < d_in {
            return Err(Error::InvalidParameter {
                name: "kraus_rank",
                value: kraus_rank as f64,
            });
        }
        let rows = d_out * kraus_rank;
        let mut rng = rng_from_seed(seed);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d_in);
        while cols.len() < d_in {
            let mut v: Vec<C64> = (0..rows)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            for _ in 0..2 {
                for b in &cols {
                    let proj: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                    v.iter_mut().zip(b).for_each(|(y, x)| *y -= proj * x);
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                v.iter_mut().for_each(|z| *z /= norm);
                cols.push(v);
            }
        }
        let kraus = (0..kraus_rank)
            .map(|k| ComplexMatrix::from_fn(d_out, d_in, |i, j| cols[j][k * d_out + i]))
            .collect();
        Self::new(kraus)
    }

    /// Multiplies `K_i` by `factors[i] > 0`. Still CP, generally no longer
    /// trace-preserving.
    pub fn scaled(&self, factors: &[f64]) -> Result<Self> {
        if factors.len() != self.kraus.len() {
            return Err(Error::Shape {
                expected: (self.kraus.len(), 1),
                found: (factors.len(), 1),
            });
        }
        if let Some(&bad) = factors.iter().find(|f| !(**f > 0.0) || !f.is_finite()) {
            return Err(Error::InvalidParameter { name: "factor", value: bad });
        }
        Ok(Self {
            kraus: self.kraus.iter().zip(factors).map(|(k, &f)| k.scale_real(f)).collect(),
            d_in: self.d_in,
            d_out: self.d_out,
        })
    }

    /// `Φ ⊗ 1₂` acting on the doubled space `H ⊕ H`: Kraus operators
    /// `I₂ ⊗ K_i`, so that block matrices are mapped block by block.
    pub fn extend_identity2(&self) -> Self {
        let i2 = ComplexMatrix::identity(2);
        Self {
            kraus: self.kraus.iter().map(|k| i2.kron(k)).collect(),
            d_in: 2 * self.d_in,
            d_out: 2 * self.d_out,
        }
    }

    /// `max |Σ K_i* K_i − I|`; zero for trace-preserving maps.
    pub fn trace_preservation_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        (&sum - &ComplexMatrix::identity(self.d_in)).max_abs()
    }
}

impl LinearMap for KrausMap {
    fn input_dim(&self) -> usize {
        self.d_in
    }

    fn output_dim(&self) -> usize {
        self.d_out
    }

    fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        a.ensure_shape(self.d_in, self.d_in)?;
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out = &out + &(&(k * a) * &k.adjoint());
        }
        Ok(out)
    }

    fn apply_adjoint(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        b.ensure_shape(self.d_out, self.d_out)?;
        let mut out = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            out = &out + &(&(&k.adjoint() * b) * k);
        }
        Ok(out)
    }
}

/// `A ↦ Aᵀ`: positive but not completely positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransposeMap {
    pub d: usize,
}

impl LinearMap for TransposeMap {
    fn input_dim(&self) -> usize {
        self.d
    }

    fn output_dim(&self) -> usize {
        self.d
    }

    fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        a.ensure_shape(self.d, self.d)?;
        Ok(a.transpose())
    }

    fn apply_adjoint(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.apply(b)
    }
}

/// Block-wise extension `Φ ⊗ 1₂` of an arbitrary linear map.
#[derive(Clone, Copy, Debug)]
pub struct Extended2<M>(pub M);

impl<M: LinearMap> Extended2<M> {
    fn blockwise(&self, x: &ComplexMatrix, f: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>) -> Result<ComplexMatrix> {
        let [a, b, c, d] = x.split2x2()?;
        ComplexMatrix::block2x2(&f(&a)?, &f(&b)?, &f(&c)?, &f(&d)?)
    }
}

impl<M: LinearMap> LinearMap for Extended2<M> {
    fn input_dim(&self) -> usize {
        2 * self.0.input_dim()
    }

    fn output_dim(&self) -> usize {
        2 * self.0.output_dim()
    }

    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        x.ensure_shape(self.input_dim(), self.input_dim())?;
        self.blockwise(x, |b| self.0.apply(b))
    }

    fn apply_adjoint(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        y.ensure_shape(self.output_dim(), self.output_dim())?;
        self.blockwise(y, |b| self.0.apply_adjoint(b))
    }
}

/// Choi matrix `Σ_ij Φ(E_ij) ⊗ E_ij` (unnormalized maximally entangled input).
pub fn choi<M: LinearMap + ?Sized>(map: &M) -> Result<ComplexMatrix> {
    let (d_in, d_out) = (map.input_dim(), map.output_dim());
    let mut out = ComplexMatrix::zeros(d_out * d_in, d_out * d_in);
    for i in 0..d_in {
        for j in 0..d_in {
            let unit = ComplexMatrix::unit(d_in, i, j);
            out = &out + &map.apply(&unit)?.kron(&unit);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpCertificate {
    pub min_choi_eigenvalue: f64,
    pub completely_positive: bool,
}

/// Complete positivity via the smallest Choi eigenvalue (`≥ tol::CP`).
pub fn is_completely_positive<M: LinearMap + ?Sized>(map: &M) -> Result<CpCertificate> {
    let min = hermitian_eig(&choi(map)?)?.min_eigenvalue();
    Ok(CpCertificate {
        min_choi_eigenvalue: min,
        completely_positive: min >= tol::CP,
    })
}

/// Channel families understood by [`ChannelSpec`].
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelFamily {
    Identity { d: usize },
    Depolarizing { d: usize, lambda: f64 },
    AmplitudeDamping { gamma: f64 },
    RandomStinespring { d_in: usize, d_out: usize, kraus_rank: usize, seed: u64 },
    Explicit { kraus: Vec<ComplexMatrix> },
    /// Negative control; has no Kraus form.
    Transpose { d: usize },
}

impl ChannelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity { .. } => "identity",
            Self::Depolarizing { .. } => "depolarizing",
            Self::AmplitudeDamping { .. } => "amplitude_damping",
            Self::RandomStinespring { .. } => "random_stinespring",
            Self::Explicit { .. } => "explicit",
            Self::Transpose { .. } => "transpose",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    pub name: String,
    pub family: ChannelFamily,
}

impl ChannelSpec {
    pub fn new(name: impl Into<String>, family: ChannelFamily) -> Self {
        Self {
            name: name.into(),
            family,
        }
    }

    pub fn build(&self) -> Result<Channel> {
        Ok(match &self.family {
            ChannelFamily::Identity { d } => {
                if *d == 0 {
                    return Err(Error::InvalidParameter { name: "d", value: 0.0 });
                }
                Channel::Kraus(KrausMap::identity(*d))
            }
            ChannelFamily::Depolarizing { d, lambda } => Channel::Kraus(KrausMap::depolarizing(*d, *lambda)?),
            ChannelFamily::AmplitudeDamping { gamma } => Channel::Kraus(KrausMap::amplitude_damping(*gamma)?),
            ChannelFamily::RandomStinespring {
                d_in,
                d_out,
                kraus_rank,
                seed,
            } => Channel::Kraus(KrausMap::random_stinespring(*d_in, *d_out, *kraus_rank, *seed)?),
            ChannelFamily::Explicit { kraus } => Channel::Kraus(KrausMap::new(kraus.clone())?),
            ChannelFamily::Transpose { d } => {
                if *d == 0 {
                    return Err(Error::InvalidParameter { name: "d", value: 0.0 });
                }
                Channel::Transpose(TransposeMap { d: *d })
            }
        })
    }
}

/// Any map a [`ChannelSpec`] can produce.
#[derive(Clone, Debug, PartialEq)]
pub enum Channel {
    Kraus(KrausMap),
    Transpose(TransposeMap),
}

impl Channel {
    pub fn as_kraus(&self) -> Option<&KrausMap> {
        match self {
            Self::Kraus(k) => Some(k),
            Self::Transpose(_) => None,
        }
    }
}

impl LinearMap for Channel {
    fn input_dim(&self) -> usize {
        match self {
            Self::Kraus(m) => m.input_dim(),
            Self::Transpose(m) => m.input_dim(),
        }
    }

    fn output_dim(&self) -> usize {
        match self {
            Self::Kraus(m) => m.output_dim(),
            Self::Transpose(m) => m.output_dim(),
        }
    }

    fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        match self {
            Self::Kraus(m) => m.apply(a),
            Self::Transpose(m) => m.apply(a),
        }
    }

    fn apply_adjoint(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        match self {
            Self::Kraus(m) => m.apply_adjoint(b),
            Self::Transpose(m) => m.apply_adjoint(b),
        }
    }
}
