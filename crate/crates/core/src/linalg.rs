//! Complex linear algebra for one and two spin-1/2 systems.
//!
//! Operators are small dense square matrices of dimension 2 or 4, stored
//! row-major in a fixed array so that propagation loops never allocate.
//! In the four-dimensional space the basis order is
//! `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩` with spin a as the left tensor factor, so the
//! basis index of `|a b⟩` is `2a + b` (0 = up, 1 = down).

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{invalid, Error, Result};

pub type C64 = Complex<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Normalization tolerance enforced by [`SpinState::from_normalized`].
pub const NORM_TOL: f64 = 1e-12;
/// Entrywise `U†U = I` tolerance enforced by [`Unitary::new`].
pub const UNITARITY_TOL: f64 = 1e-10;

const MAX_DIM: usize = 4;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(invalid(format!("dimension {dim} is not 2 or 4")))
    }
}

fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Dense square complex matrix of dimension 2 or 4.
#[derive(Clone, Copy, PartialEq)]
pub struct Operator {
    dim: usize,
    data: [C64; MAX_DIM * MAX_DIM],
}

impl Operator {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: [ZERO; MAX_DIM * MAX_DIM],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        Ok(m)
    }

    /// Builds an operator from `dim * dim` row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        if entries.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if !entries.iter().all(|z| is_finite(*z)) {
            return Err(invalid("operator entries must be finite"));
        }
        m.data[..dim * dim].copy_from_slice(entries);
        Ok(m)
    }

    pub fn diagonal(entries: &[C64]) -> Result<Self> {
        let mut m = Self::zeros(entries.len())?;
        if !entries.iter().all(|z| is_finite(*z)) {
            return Err(invalid("operator entries must be finite"));
        }
        for (i, z) in entries.iter().enumerate() {
            m.set(i, i, *z);
        }
        Ok(m)
    }

    pub(crate) fn identity_unchecked(dim: usize) -> Self {
        Self::identity(dim).expect("dimension checked by caller")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        debug_assert!(row < self.dim && col < self.dim);
        self.data[row * self.dim + col]
    }

    #[inline]
    pub(crate) fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    /// Row-major view of the entries.
    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.set(r, c, self.get(c, r).conj());
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for z in out.data[..self.dim * self.dim].iter_mut() {
            *z *= s;
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| is_finite(*z))
    }

    /// Exact Hermiticity check (bitwise equality of mirrored entries).
    pub fn is_hermitian(&self) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| self.get(r, c) == self.get(c, r).conj()))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest off-diagonal magnitude.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c {
                    worst = worst.max(self.get(r, c).norm());
                }
            }
        }
        worst
    }

    /// Max-norm distance `max |a_ij - b_ij|`; global phase counts.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm distance after removing the best-fit global phase of `other`.
    pub fn max_abs_diff_up_to_phase(&self, other: &Self) -> f64 {
        let overlap = (self.adjoint() * *other).trace();
        let phase = if overlap.norm() > 0.0 {
            (overlap / overlap.norm()).conj()
        } else {
            ONE
        };
        self.max_abs_diff(&other.scale(phase))
    }

    /// `max |(U†U - I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.adjoint() * *self;
        gram.max_abs_diff(&Self::identity_unchecked(self.dim))
    }

    /// Moves a nearly unitary matrix onto its polar factor with two
    /// Newton-Schulz iterations `U <- U (3I - U†U) / 2`.
    pub fn project_unitary(&self) -> Self {
        let id3 = Self::identity_unchecked(self.dim).scale_real(3.0);
        let mut u = *self;
        for _ in 0..2 {
            let gram = u.adjoint() * u;
            u = (u * (id3 - gram)).scale_real(0.5);
        }
        u
    }

    pub fn apply(&self, state: &SpinState) -> SpinState {
        assert_eq!(self.dim, state.dim, "dimension mismatch");
        let mut out = [ZERO; MAX_DIM];
        for (r, slot) in out.iter_mut().enumerate().take(self.dim) {
            *slot = (0..self.dim).map(|c| self.get(r, c) * state.amps[c]).sum();
        }
        SpinState {
            dim: self.dim,
            amps: out,
        }
    }

    /// Hermitian part `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_real(0.5)
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self.get(r, c);
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for Operator {
    type Output = Operator;

    fn mul(self, rhs: Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Operator {
            dim: n,
            data: [ZERO; MAX_DIM * MAX_DIM],
        };
        for r in 0..n {
            for c in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += self.data[r * n + k] * rhs.data[k * n + c];
                }
                out.data[r * n + c] = acc;
            }
        }
        out
    }
}

impl Add for Operator {
    type Output = Operator;

    fn add(self, rhs: Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self;
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += *b;
        }
        out
    }
}

impl Sub for Operator {
    type Output = Operator;

    fn sub(self, rhs: Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self;
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= *b;
        }
        out
    }
}

/// An operator known to satisfy `U†U = I` within [`UNITARITY_TOL`].
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Unitary(Operator);

impl Unitary {
    pub fn new(op: Operator) -> Result<Self> {
        if !op.is_finite() {
            return Err(invalid("unitary entries must be finite"));
        }
        let defect = op.unitarity_defect();
        if defect > UNITARITY_TOL {
            return Err(invalid(format!("matrix is not unitary: defect {defect:e}")));
        }
        Ok(Self(op))
    }

    pub(crate) fn from_operator_unchecked(op: Operator) -> Self {
        Self(op)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Ok(Self(Operator::identity(dim)?))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn as_operator(&self) -> &Operator {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0.get(row, col)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn apply(&self, state: &SpinState) -> SpinState {
        self.0.apply(state)
    }

    /// `e^{iφ} U`.
    pub fn with_global_phase(&self, phi: f64) -> Self {
        Self(self.0.scale(C64::from_polar(1.0, phi)))
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.0.unitarity_defect()
    }

    /// Phases `arg U_kk` of the diagonal entries.
    pub fn diagonal_phases(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.get(k, k).arg()).collect()
    }
}

impl Mul for Unitary {
    type Output = Unitary;

    fn mul(self, rhs: Unitary) -> Unitary {
        Unitary(self.0 * rhs.0)
    }
}

/// Normalized state vector of one (dim 2) or two (dim 4) spins.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct SpinState {
    dim: usize,
    amps: [C64; MAX_DIM],
}

impl SpinState {
    /// Normalizes the given amplitudes.
    pub fn new(amplitudes: &[C64]) -> Result<Self> {
        check_dim(amplitudes.len())?;
        if !amplitudes.iter().all(|z| is_finite(*z)) {
            return Err(invalid("state amplitudes must be finite"));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(invalid("zero vector cannot be normalized"));
        }
        let mut amps = [ZERO; MAX_DIM];
        for (slot, z) in amps.iter_mut().zip(amplitudes) {
            *slot = z / norm;
        }
        Ok(Self {
            dim: amplitudes.len(),
            amps,
        })
    }

    /// Accepts amplitudes that are already normalized to [`NORM_TOL`].
    pub fn from_normalized(amplitudes: &[C64]) -> Result<Self> {
        check_dim(amplitudes.len())?;
        if !amplitudes.iter().all(|z| is_finite(*z)) {
            return Err(invalid("state amplitudes must be finite"));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!("state norm² {norm_sqr} differs from 1")));
        }
        let mut amps = [ZERO; MAX_DIM];
        amps[..amplitudes.len()].copy_from_slice(amplitudes);
        Ok(Self {
            dim: amplitudes.len(),
            amps,
        })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(invalid(format!("basis index {index} out of range")));
        }
        let mut amps = [ZERO; MAX_DIM];
        amps[index] = ONE;
        Ok(Self { dim, amps })
    }

    pub fn up() -> Self {
        Self::basis(2, 0).expect("valid basis state")
    }

    pub fn down() -> Self {
        Self::basis(2, 1).expect("valid basis state")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps[..self.dim]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &SpinState) -> C64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.amplitudes()
            .iter()
            .zip(other.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `⟨ψ|A|ψ⟩`; real for Hermitian `A`.
    pub fn expectation(&self, op: &Operator) -> C64 {
        self.inner(&op.apply(self))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for z in out.amps[..self.dim].iter_mut() {
            *z *= s;
        }
        out
    }

    /// Bloch vector `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` of a single spin.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim != 2 {
            return Err(invalid("Bloch vector requires a single spin"));
        }
        let (a, b) = (self.amps[0], self.amps[1]);
        let coherence = a.conj() * b;
        Ok([
            2.0 * coherence.re,
            2.0 * coherence.im,
            a.norm_sqr() - b.norm_sqr(),
        ])
    }
}

/// Pauli matrices and the rotating transverse operator.
pub mod pauli {
    use super::*;

    pub fn identity() -> Operator {
        Operator::identity_unchecked(2)
    }

    pub fn sigma_x() -> Operator {
        Operator::from_rows(2, &[ZERO, ONE, ONE, ZERO]).expect("finite")
    }

    pub fn sigma_y() -> Operator {
        Operator::from_rows(2, &[ZERO, -I, I, ZERO]).expect("finite")
    }

    pub fn sigma_z() -> Operator {
        Operator::from_rows(2, &[ONE, ZERO, ZERO, -ONE]).expect("finite")
    }

    /// `σx(φ) = [[0, e^{-iφ}], [e^{iφ}, 0]] = cos φ σx + sin φ σy`.
    pub fn sigma_x_rotated(phase: f64) -> Operator {
        let e = C64::from_polar(1.0, phase);
        Operator::from_rows(2, &[ZERO, e.conj(), e, ZERO]).expect("finite")
    }

    /// `n·σ` for a real 3-vector `n`.
    pub fn dot(n: [f64; 3]) -> Operator {
        let [x, y, z] = n;
        Operator::from_rows(
            2,
            &[
                C64::new(z, 0.0),
                C64::new(x, -y),
                C64::new(x, y),
                C64::new(-z, 0.0),
            ],
        )
        .expect("finite")
    }

    /// Decomposes a 2x2 Hermitian matrix as `h0 I + h·σ`.
    pub fn decompose(h: &Operator) -> (f64, [f64; 3]) {
        debug_assert_eq!(h.dim(), 2);
        let h0 = 0.5 * (h.get(0, 0).re + h.get(1, 1).re);
        let hz = 0.5 * (h.get(0, 0).re - h.get(1, 1).re);
        let lower = h.get(1, 0);
        (h0, [lower.re, lower.im, hz])
    }
}

/// `exp(-i (angle/2) n·σ) = cos(angle/2) I - i sin(angle/2) n·σ`.
pub fn expm_su2(axis: [f64; 3], angle: f64) -> Result<Unitary> {
    if !angle.is_finite() || !axis.iter().all(|a| a.is_finite()) {
        return Err(invalid("axis and angle must be finite"));
    }
    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(invalid(format!(
            "rotation axis has norm {norm}, expected 1"
        )));
    }
    Ok(Unitary(su2_unchecked(axis, angle)))
}

fn su2_unchecked(axis: [f64; 3], angle: f64) -> Operator {
    let (s, c) = (0.5 * angle).sin_cos();
    let [x, y, z] = axis;
    Operator::from_rows(
        2,
        &[
            C64::new(c, -s * z),
            C64::new(-s * y, -s * x),
            C64::new(s * y, -s * x),
            C64::new(c, s * z),
        ],
    )
    .expect("finite")
}

/// `exp(-i H t)` for a constant Hermitian `H`.
///
/// Two-dimensional generators use the su(2) closed form, diagonal generators
/// exponentiate entrywise, anything else falls back to [`expm_series`].
pub fn evolve_constant(h: &Operator, t: f64) -> Unitary {
    match h.dim() {
        2 => {
            let (h0, v) = pauli::decompose(h);
            let strength = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            let phase = C64::from_polar(1.0, -h0 * t);
            if strength == 0.0 {
                return Unitary(pauli::identity().scale(phase));
            }
            let axis = [v[0] / strength, v[1] / strength, v[2] / strength];
            Unitary(su2_unchecked(axis, 2.0 * strength * t).scale(phase))
        }
        _ if h.max_off_diagonal() == 0.0 => {
            let mut out = Operator::identity_unchecked(h.dim());
            for k in 0..h.dim() {
                out.set(k, k, C64::from_polar(1.0, -h.get(k, k).re * t));
            }
            Unitary(out)
        }
        _ => Unitary(expm_series(&h.scale(C64::new(0.0, -t)))),
    }
}

/// General matrix exponential by scaling and squaring a truncated Taylor
/// series. Accurate to roughly machine precision for moderate norms.
pub fn expm_series(a: &Operator) -> Operator {
    let norm = a.max_abs() * a.dim() as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));
    let id = Operator::identity_unchecked(a.dim());
    let mut term = id;
    let mut sum = id;
    for k in 1..=24 {
        term = (term * scaled).scale_real(1.0 / k as f64);
        sum = sum + term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Kronecker product `a ⊗ b` of two single-spin operators; `a` acts on spin a.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    if a.dim() != 2 || b.dim() != 2 {
        return Err(invalid("tensor requires two 2x2 operators"));
    }
    let mut out = Operator::zeros(4)?;
    for ar in 0..2 {
        for ac in 0..2 {
            for br in 0..2 {
                for bc in 0..2 {
                    out.set(2 * ar + br, 2 * ac + bc, a.get(ar, ac) * b.get(br, bc));
                }
            }
        }
    }
    Ok(out)
}

/// `a ⊗ b` for unitaries.
pub fn tensor_unitary(a: &Unitary, b: &Unitary) -> Result<Unitary> {
    Ok(Unitary(tensor(&a.0, &b.0)?))
}

/// `|tr(U†V)| / dim`, invariant under global phases of either argument.
pub fn fidelity(u: &Unitary, v: &Unitary) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::InvalidArgument(format!(
            "fidelity of {}x{} and {}x{} operators",
            u.dim(),
            u.dim(),
            v.dim(),
            v.dim()
        )));
    }
    let overlap = (u.0.adjoint() * v.0).trace();
    Ok((overlap.norm() / u.dim() as f64).min(1.0))
}
