//! Quaternion-valued fields on the periodic grid `x_j = 2πj/N`.
//!
//! The four real components are packed pairwise into two complex signals
//! (`w + i·x`, `y + i·z`). Every multiplier used here is real-preserving
//! (`m(−ξ) = conj m(ξ)`), so transforming the packed signals is equivalent to
//! transforming each component separately.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::cochain::Bracket;
use crate::error::{Error, Result};
use crate::quaternion::{ModuleVector, Quaternion};
use crate::scalar::Scalar;

pub const DOMAIN_LENGTH: f64 = 2.0 * PI;

/// FFT plans and wavenumbers for one grid size.
pub struct Grid<S: Scalar> {
    n: usize,
    fwd: Arc<dyn Fft<S>>,
    inv: Arc<dyn Fft<S>>,
}

impl<S: Scalar> fmt::Debug for Grid<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n).finish()
    }
}

impl<S: Scalar> Grid<S> {
    pub fn new(n: usize) -> Result<Arc<Self>> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::BadGrid(n));
        }
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self, j: usize) -> S {
        S::c(DOMAIN_LENGTH * j as f64 / self.n as f64)
    }

    /// Signed wavenumber of FFT bin `k`; the Nyquist bin maps to `+N/2`.
    pub fn wavenumber(&self, k: usize) -> i64 {
        if k <= self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Largest wavenumber kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }
}

#[derive(Clone, Debug)]
pub struct Field<S: Scalar> {
    grid: Arc<Grid<S>>,
    values: Vec<Quaternion<S>>,
}

/// Two packed complex spectra, unnormalized.
pub struct Spectrum<S> {
    pub a: Vec<Complex<S>>,
    pub b: Vec<Complex<S>>,
}

impl<S: Scalar> Field<S> {
    pub fn from_values(grid: &Arc<Grid<S>>, values: Vec<Quaternion<S>>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(grid.n, values.len()));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn from_fn(grid: &Arc<Grid<S>>, f: impl Fn(S) -> Quaternion<S>) -> Self {
        let values = (0..grid.n).map(|j| f(grid.x(j))).collect();
        Self { grid: grid.clone(), values }
    }

    pub fn constant(grid: &Arc<Grid<S>>, q: Quaternion<S>) -> Self {
        Self { grid: grid.clone(), values: vec![q; grid.n] }
    }

    pub fn zeros(grid: &Arc<Grid<S>>) -> Self {
        Self::constant(grid, Quaternion::zero())
    }

    pub fn grid(&self) -> &Arc<Grid<S>> {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn values(&self) -> &[Quaternion<S>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Quaternion<S>] {
        &mut self.values
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::GridMismatch(self.n(), other.n()));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|q| q.is_finite())
    }

    /// `‖u‖_{L²}² = (L/N)·Σ|u(x_j)|²`.
    pub fn l2(&self) -> S {
        let sum: S = self.values.iter().map(|q| q.norm_sqr()).sum();
        (sum * S::c(DOMAIN_LENGTH) / S::c(self.n() as f64)).sqrt()
    }

    pub fn linf(&self) -> S {
        self.values.iter().fold(S::zero(), |m, q| m.max(q.abs()))
    }

    pub fn scale(&self, s: S) -> Self {
        self.map(|q| q.scale(s))
    }

    pub fn map(&self, f: impl Fn(Quaternion<S>) -> Quaternion<S>) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&q| f(q)).collect() }
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: S, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a + b.scale(s)).collect();
        Self { grid: self.grid.clone(), values }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-S::one(), other)
    }

    /// Pointwise Hamilton product.
    pub fn mul(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).collect();
        Self { grid: self.grid.clone(), values }
    }

    pub fn spectrum(&self) -> Spectrum<S> {
        let mut a: Vec<Complex<S>> = self.values.iter().map(|q| Complex::new(q.w, q.x)).collect();
        let mut b: Vec<Complex<S>> = self.values.iter().map(|q| Complex::new(q.y, q.z)).collect();
        self.grid.fwd.process(&mut a);
        self.grid.fwd.process(&mut b);
        Spectrum { a, b }
    }

    pub fn from_spectrum(grid: &Arc<Grid<S>>, mut sp: Spectrum<S>) -> Self {
        grid.inv.process(&mut sp.a);
        grid.inv.process(&mut sp.b);
        let inv_n = S::one() / S::c(grid.n as f64);
        let values = sp
            .a
            .iter()
            .zip(&sp.b)
            .map(|(a, b)| Quaternion::new(a.re * inv_n, a.im * inv_n, b.re * inv_n, b.im * inv_n))
            .collect();
        Self { grid: grid.clone(), values }
    }

    /// Applies the Fourier multiplier `m(ξ)`; `m` must satisfy `m(−ξ) = conj m(ξ)`.
    pub fn multiplier(&self, m: impl Fn(i64) -> Complex<S>) -> Self {
        let mut sp = self.spectrum();
        for k in 0..self.n() {
            let f = m(self.grid.wavenumber(k));
            sp.a[k] = sp.a[k] * f;
            sp.b[k] = sp.b[k] * f;
        }
        Self::from_spectrum(&self.grid, sp)
    }

    /// `∂ₓu`. The Nyquist mode is dropped so that the result stays real.
    pub fn derivative(&self) -> Self {
        let half = self.n() as i64 / 2;
        self.multiplier(|xi| if xi == half { Complex::new(S::zero(), S::zero()) } else { Complex::new(S::zero(), S::c(xi as f64)) })
    }

    /// Zeroes every mode with `|ξ| > N/3`.
    pub fn dealias(&self) -> Self {
        let cut = self.grid.dealias_cutoff();
        self.multiplier(|xi| if xi.abs() > cut { Complex::new(S::zero(), S::zero()) } else { Complex::new(S::one(), S::zero()) })
    }

    /// Bessel potential `J^s = (1 + ξ²)^{s/2}`.
    pub fn bessel(&self, s: S) -> Self {
        self.multiplier(|xi| Complex::new((S::one() + S::c((xi * xi) as f64)).powf(s / S::c(2.0)), S::zero()))
    }

    /// `(2π Σ_ξ (1+ξ²)^s |û(ξ)|²)^{1/2}` with `û` the normalized DFT.
    pub fn sobolev_norm(&self, s: S) -> S {
        let sp = self.spectrum();
        let n = S::c(self.n() as f64);
        let mut acc = S::zero();
        for k in 0..self.n() {
            let xi = S::c(self.grid.wavenumber(k) as f64);
            let w = (S::one() + xi * xi).powf(s);
            acc = acc + w * (sp.a[k].norm_sqr() + sp.b[k].norm_sqr());
        }
        (acc * S::c(DOMAIN_LENGTH) / (n * n)).sqrt()
    }

    pub fn grad_linf(&self) -> S {
        self.derivative().linf()
    }
}

/// Applies a fiber bracket on `ℍ` pointwise: `w(x_j) = B(u(x_j), v(x_j))`.
pub fn apply_bracket_field<S: Scalar>(b: &Bracket<S>, u: &Field<S>, v: &Field<S>) -> Result<Field<S>> {
    u.check_same_grid(v)?;
    if b.dim() != 1 {
        return Err(Error::InvalidDimension(b.dim()));
    }
    let values = u
        .values
        .par_iter()
        .zip(&v.values)
        .map(|(&p, &q)| b.apply(&ModuleVector::scalar(p), &ModuleVector::scalar(q))[0])
        .collect();
    Ok(Field { grid: u.grid.clone(), values })
}

pub fn spectral_derivative<S: Scalar>(u: &Field<S>) -> Field<S> {
    u.derivative()
}

pub fn sobolev_norm<S: Scalar>(u: &Field<S>, s: S) -> S {
    u.sobolev_norm(s)
}

/// A real-valued random trigonometric polynomial per component with modes
/// `1..=modes` decaying like `(1+k²)^{-decay/2}`, plus a random mean.
pub fn random_band_limited<S: Scalar>(grid: &Arc<Grid<S>>, modes: usize, decay: f64, amplitude: f64, seed: u64) -> Field<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = || -> f64 { StandardNormal.sample(&mut rng) };
    // coefficients[c] = (mean, [(cos, sin)])
    let coeffs: Vec<(f64, Vec<(f64, f64)>)> = (0..4)
        .map(|_| {
            let mean = g();
            let m = (1..=modes)
                .map(|k| {
                    let w = (1.0 + (k * k) as f64).powf(-decay / 2.0);
                    (w * g(), w * g())
                })
                .collect();
            (mean, m)
        })
        .collect();
    Field::from_fn(grid, |x| {
        let x = x.f64();
        let comp = |c: usize| {
            let (mean, m) = &coeffs[c];
            let v = mean + m.iter().enumerate().map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                a * (k * x).cos() + b * (k * x).sin()
            }).sum::<f64>();
            S::c(amplitude * v)
        };
        Quaternion::new(comp(0), comp(1), comp(2), comp(3))
    })
}
