//! Quaternions and the right module `X = ℍᵐ`.
//!
//! Scalar-first storage `(w, x, y, z)` in the basis `{1, i, j, k}`. No unit
//! normalization happens anywhere: module elements are general quaternions.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion<S> {
    pub w: S,
    pub x: S,
    pub y: S,
    pub z: S,
}

// ── Constructors ─────────────────────────────────────────────────────

impl<S: Scalar> Quaternion<S> {
    #[inline]
    pub const fn new(w: S, x: S, y: S, z: S) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero(), S::zero(), S::zero())
    }

    #[inline]
    pub fn one() -> Self {
        Self::real(S::one())
    }

    #[inline]
    pub fn real(w: S) -> Self {
        Self::new(w, S::zero(), S::zero(), S::zero())
    }

    #[inline]
    pub fn i() -> Self {
        Self::new(S::zero(), S::one(), S::zero(), S::zero())
    }

    #[inline]
    pub fn j() -> Self {
        Self::new(S::zero(), S::zero(), S::one(), S::zero())
    }

    #[inline]
    pub fn k() -> Self {
        Self::new(S::zero(), S::zero(), S::zero(), S::one())
    }

    /// Builds a quaternion from `[w, x, y, z]`.
    #[inline]
    pub fn from_array(c: [S; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    #[inline]
    pub fn to_array(self) -> [S; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

// ── Algebra ──────────────────────────────────────────────────────────

impl<S: Scalar> Quaternion<S> {
    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> S {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Euclidean modulus `|q|`.
    #[inline]
    pub fn abs(self) -> S {
        // hypot-style scaling is unnecessary at the magnitudes used here
        self.norm_sqr().sqrt()
    }

    #[inline]
    pub fn scale(self, s: S) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Real part `Re(q) = w`.
    #[inline]
    pub fn re(self) -> S {
        self.w
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Hamilton product `p·q`.
#[inline]
pub fn qmul<S: Scalar>(p: Quaternion<S>, q: Quaternion<S>) -> Quaternion<S> {
    Quaternion::new(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )
}

/// Returns `(q̄, |q|)`.
#[inline]
pub fn qconj_abs<S: Scalar>(q: Quaternion<S>) -> (Quaternion<S>, S) {
    (q.conj(), q.abs())
}

impl<S: Scalar> Add for Quaternion<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<S: Scalar> AddAssign for Quaternion<S> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<S: Scalar> Sub for Quaternion<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<S: Scalar> SubAssign for Quaternion<S> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<S: Scalar> Neg for Quaternion<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<S: Scalar> Mul for Quaternion<S> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        qmul(self, o)
    }
}

// ── Module vectors ───────────────────────────────────────────────────

/// Element of the right module `ℍᵐ`; the scalar `q` acts on the right of
/// every component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleVector<S> {
    comps: SmallVec<[Quaternion<S>; 2]>,
}

impl<S: Scalar> ModuleVector<S> {
    pub fn zeros(m: usize) -> Self {
        Self { comps: SmallVec::from_elem(Quaternion::zero(), m) }
    }

    pub fn from_components<I: IntoIterator<Item = Quaternion<S>>>(it: I) -> Self {
        Self { comps: it.into_iter().collect() }
    }

    /// Single-component vector in `ℍ¹`.
    pub fn scalar(q: Quaternion<S>) -> Self {
        Self::from_components([q])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    #[inline]
    pub fn components(&self) -> &[Quaternion<S>] {
        &self.comps
    }

    pub fn norm_sqr(&self) -> S {
        self.comps.iter().map(|q| q.norm_sqr()).sum()
    }

    /// Euclidean norm of the `4m` real coordinates.
    pub fn norm(&self) -> S {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: S) -> Self {
        Self::from_components(self.comps.iter().map(|q| q.scale(s)))
    }

    /// Right action `(v·q)ᵢ = vᵢ·q`.
    pub fn right_mul(&self, q: Quaternion<S>) -> Self {
        Self::from_components(self.comps.iter().map(|&c| c * q))
    }

    /// `self + s·other`, in place.
    pub fn axpy(&mut self, s: S, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.comps.iter_mut().zip(other.comps.iter()) {
            *a += b.scale(s);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|q| q.is_finite())
    }

    /// Flattened real coordinates, `4m` of them.
    pub fn to_reals(&self) -> Vec<S> {
        self.comps.iter().flat_map(|q| q.to_array()).collect()
    }

    pub fn from_reals(r: &[S]) -> Self {
        debug_assert_eq!(r.len() % 4, 0);
        Self::from_components(r.chunks_exact(4).map(|c| Quaternion::new(c[0], c[1], c[2], c[3])))
    }

    /// Mutable access to real coordinate `idx` (`idx / 4` selects the component).
    pub fn coord_mut(&mut self, idx: usize) -> &mut S {
        let q = &mut self.comps[idx / 4];
        match idx % 4 {
            0 => &mut q.w,
            1 => &mut q.x,
            2 => &mut q.y,
            _ => &mut q.z,
        }
    }

    pub fn cast<T: Scalar>(&self) -> ModuleVector<T> {
        ModuleVector::from_components(self.comps.iter().map(|q| {
            Quaternion::new(T::c(q.w.f64()), T::c(q.x.f64()), T::c(q.y.f64()), T::c(q.z.f64()))
        }))
    }
}

/// Right action `v·q`.
pub fn right_action<S: Scalar>(v: &ModuleVector<S>, q: Quaternion<S>) -> ModuleVector<S> {
    v.right_mul(q)
}

/// Ambient norm `‖v‖`.
pub fn vec_norm<S: Scalar>(v: &ModuleVector<S>) -> S {
    v.norm()
}

impl<S> Index<usize> for ModuleVector<S> {
    type Output = Quaternion<S>;
    fn index(&self, i: usize) -> &Quaternion<S> {
        &self.comps[i]
    }
}

impl<S> IndexMut<usize> for ModuleVector<S> {
    fn index_mut(&mut self, i: usize) -> &mut Quaternion<S> {
        &mut self.comps[i]
    }
}

impl<S: Scalar> Add for &ModuleVector<S> {
    type Output = ModuleVector<S>;
    fn add(self, o: Self) -> ModuleVector<S> {
        debug_assert_eq!(self.dim(), o.dim());
        ModuleVector::from_components(self.comps.iter().zip(o.comps.iter()).map(|(&a, &b)| a + b))
    }
}

impl<S: Scalar> Sub for &ModuleVector<S> {
    type Output = ModuleVector<S>;
    fn sub(self, o: Self) -> ModuleVector<S> {
        debug_assert_eq!(self.dim(), o.dim());
        ModuleVector::from_components(self.comps.iter().zip(o.comps.iter()).map(|(&a, &b)| a - b))
    }
}

impl<S: Scalar> Neg for &ModuleVector<S> {
    type Output = ModuleVector<S>;
    fn neg(self) -> ModuleVector<S> {
        ModuleVector::from_components(self.comps.iter().map(|&a| -a))
    }
}

// ── Sampling ─────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallMode {
    /// Radius drawn as `ε·u^{1/(4m)}`, which puts most mass near the shell.
    Interior,
    /// Exactly on the sphere `‖v‖ = ε`.
    Sphere,
}

/// Per-draw seed: independent of any other draw, so parallel sampling does not
/// depend on scheduling order.
#[inline]
pub fn derive_seed(base_seed: u64, index: u64) -> u64 {
    base_seed ^ index
}

/// Draws one vector of `ℍᵐ` from the ball (or sphere) of radius `eps`.
pub fn sample_ball<S: Scalar>(m: usize, eps: S, mode: BallMode, seed: u64) -> Result<ModuleVector<S>> {
    if m < 1 {
        return Err(Error::InvalidDimension(m));
    }
    if !(eps > S::zero()) || !eps.is_finite() {
        return Err(Error::InvalidRadius(eps.f64()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_ball_with(&mut rng, m, eps, mode))
}

pub(crate) fn sample_ball_with<S: Scalar, R: rand::Rng>(
    rng: &mut R,
    m: usize,
    eps: S,
    mode: BallMode,
) -> ModuleVector<S> {
    let dim = 4 * m;
    let mut g: Vec<f64> = Vec::with_capacity(dim);
    loop {
        g.clear();
        g.extend((0..dim).map(|_| Distribution::<f64>::sample(&StandardNormal, rng)));
        let n2: f64 = g.iter().map(|v| v * v).sum();
        // a zero Gaussian draw has probability zero; redraw if it ever happens
        if n2 > 1e-300 {
            let inv = 1.0 / n2.sqrt();
            g.iter_mut().for_each(|v| *v *= inv);
            break;
        }
    }
    let radius = match mode {
        BallMode::Sphere => eps.f64(),
        BallMode::Interior => {
            let u: f64 = Uniform::new_inclusive(0.0, 1.0).sample(rng);
            eps.f64() * u.powf(1.0 / dim as f64)
        }
    };
    let v = ModuleVector::from_reals(&g.iter().map(|&c| S::c(c * radius)).collect::<Vec<_>>());
    if mode == BallMode::Sphere {
        // re-normalize in the target precision so that ‖v‖ = ε to rounding
        let n = v.norm();
        v.scale(eps / n)
    } else {
        v
    }
}

/// Uniform random quaternion with standard normal components.
pub(crate) fn gaussian_quaternion<S: Scalar, R: rand::Rng>(rng: &mut R) -> Quaternion<S> {
    let mut c = [S::zero(); 4];
    for v in c.iter_mut() {
        let g: f64 = StandardNormal.sample(rng);
        *v = S::c(g);
    }
    Quaternion::from_array(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Quaternion<f64>;

    #[test]
    fn multiplication_table() {
        assert_eq!(qmul(Q::i(), Q::j()), Q::k());
        assert_eq!(qmul(Q::j(), Q::k()), Q::i());
        assert_eq!(qmul(Q::k(), Q::i()), Q::j());
        assert_eq!(qmul(Q::j(), Q::i()), -Q::k());
        assert_eq!(qmul(Q::i(), Q::i()), -Q::one());
        let q = Q::new(0.3, -1.2, 2.0, 0.5);
        assert_eq!(qmul(q, Q::one()), q);
        let p = Q::one() + Q::i();
        let r = Q::one() + Q::j();
        assert_eq!(qmul(p, r), Q::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn conj_and_abs() {
        assert_eq!(qconj_abs(Q::i()), (-Q::i(), 1.0));
        assert_eq!(qconj_abs(Q::zero()), (Q::zero(), 0.0));
        let (c, a) = qconj_abs(Q::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(c, Q::new(1.0, -1.0, -1.0, -1.0));
        assert_eq!(a, 2.0);
        let q = Q::new(0.7, -0.1, 2.5, -3.0);
        let p = qmul(q.conj(), q);
        assert!((p.w - q.norm_sqr()).abs() < 1e-14);
        assert!(p.x.abs() + p.y.abs() + p.z.abs() < 1e-14);
    }

    #[test]
    fn module_norms_and_action() {
        let v = ModuleVector::from_components([Q::one(), Q::zero()]);
        assert_eq!(vec_norm(&v), 1.0);
        assert_eq!(right_action(&v, Q::one()), v);
        assert_eq!(right_action(&v, Q::zero()), ModuleVector::zeros(2));
        assert_eq!(vec_norm(&right_action(&v, Q::i().scale(3.0))), 3.0);
        let w = ModuleVector::from_components([Q::i(), Q::j()]);
        assert!((vec_norm(&w) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(vec_norm(&ModuleVector::<f64>::zeros(3)), 0.0);
    }

    #[test]
    fn sampler_contract() {
        let v: ModuleVector<f64> = sample_ball(1, 1.0, BallMode::Sphere, 42).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        let w: ModuleVector<f64> = sample_ball(1, 1.0, BallMode::Sphere, 42).unwrap();
        assert_eq!(v, w);
        assert!(sample_ball::<f64>(0, 1.0, BallMode::Sphere, 1).is_err());
        assert!(sample_ball::<f64>(2, 0.0, BallMode::Interior, 1).is_err());
        assert!(sample_ball::<f64>(2, -1.0, BallMode::Interior, 1).is_err());
    }

    #[test]
    fn interior_sampler_covers_the_shell() {
        let max = (0..10_000u64)
            .map(|i| sample_ball::<f64>(2, 0.5, BallMode::Interior, derive_seed(7, i)).unwrap().norm())
            .fold(0.0, f64::max);
        assert!(max > 0.49 && max <= 0.5, "max = {max}");
    }

    #[test]
    fn f32_arithmetic_agrees() {
        let p = Quaternion::<f32>::new(1.0, 2.0, -0.5, 0.25);
        let q = Quaternion::<f32>::new(-0.3, 0.1, 0.7, 1.5);
        let pq = qmul(p, q);
        assert!((pq.abs() - p.abs() * q.abs()).abs() < 1e-5);
    }
}
