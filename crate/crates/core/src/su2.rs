//! Single-qubit unitary algebra: axis-angle rotations, products, ZXZ Euler
//! decomposition and phase-blind trace fidelity.
//!
//! Rotations follow `R(n̂, θ) = exp(-iθ n̂·σ/2)`, so a 2π turn is `-I`. Global
//! phases are carried explicitly and only discarded by the fidelity and
//! phase-aligned comparison helpers.

use std::ops::Mul;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Real};

/// Principal rotation axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn unit<T: Real>(self) -> [T; 3] {
        let (o, z) = (T::one(), T::zero());
        match self {
            Axis::X => [o, z, z],
            Axis::Y => [z, o, z],
            Axis::Z => [z, z, o],
        }
    }

    pub fn label(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// Dense 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T: Real> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(m: [[Complex<T>; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
        Self { m: [[o, z], [z, o]] }
    }

    pub fn zeros() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { m: [[z, z], [z, z]] }
    }

    pub fn pauli(axis: Axis) -> Self {
        let (o, z, i) = (
            Complex::new(T::one(), T::zero()),
            Complex::new(T::zero(), T::zero()),
            Complex::new(T::zero(), T::one()),
        );
        let m = match axis {
            Axis::X => [[z, o], [o, z]],
            Axis::Y => [[z, -i], [i, z]],
            Axis::Z => [[o, z], [z, -o]],
        };
        Self { m }
    }

    pub fn diag(a: Complex<T>, d: Complex<T>) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { m: [[a, z], [z, d]] }
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Self {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for e in row.iter_mut() {
                *e = *e * s;
            }
        }
        out
    }

    /// Multiply by `exp(i·phase)`.
    pub fn with_phase(&self, phase: T) -> Self {
        self.scale(Complex::from_polar(T::one(), phase))
    }

    pub fn entries(&self) -> impl Iterator<Item = &Complex<T>> {
        self.m.iter().flatten()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.entries()
            .zip(other.entries())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Max-entry difference after rotating `other` onto `self`'s global phase,
    /// aligned on the largest-magnitude entry of `self`.
    pub fn phase_aligned_diff(&self, other: &Self) -> T {
        let (mut best, mut idx) = (T::neg_infinity(), 0);
        for (k, e) in self.entries().enumerate() {
            if e.norm() > best {
                best = e.norm();
                idx = k;
            }
        }
        let a = self.entries().nth(idx).copied().unwrap_or_default();
        let b = other.entries().nth(idx).copied().unwrap_or_default();
        let phase = a.arg() - b.arg();
        self.max_abs_diff(&other.with_phase(phase))
    }

    /// `max |(U†U - I)_ij|`.
    pub fn unitarity_defect(&self) -> T {
        (self.dagger() * *self).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_defect() <= tol
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Mat2<T>;

    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        let mut m = [[Complex::new(T::zero(), T::zero()); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2 { m }
    }
}

/// `exp(-i·angle·(n̂·σ)/2)` for a principal axis.
pub fn rotation<T: Real>(axis: Axis, angle: T) -> Mat2<T> {
    rotation_unchecked(axis.unit(), angle)
}

/// `exp(-i·angle·(n̂·σ)/2)` for an arbitrary unit axis.
pub fn rotation_about<T: Real>(axis: [T; 3], angle: T) -> Result<Mat2<T>> {
    let norm = axis.iter().fold(T::zero(), |acc, &c| acc + c * c).sqrt();
    if !norm.is_finite() || (norm - T::one()).abs() > T::lit(1e-9) {
        return Err(Error::NonUnitAxis {
            norm: norm.to_f64_lossy(),
        });
    }
    Ok(rotation_unchecked(axis, angle))
}

/// Half-angle closed form; the axis is assumed normalized.
pub(crate) fn rotation_unchecked<T: Real>(n: [T; 3], angle: T) -> Mat2<T> {
    let half = angle / T::lit(2.0);
    let (s, c) = half.sin_cos();
    let [nx, ny, nz] = n;
    Mat2::new([
        [Complex::new(c, -s * nz), Complex::new(-s * ny, -s * nx)],
        [Complex::new(s * ny, -s * nx), Complex::new(c, s * nz)],
    ])
}

/// Time-ordered product: `ops[0]` acts first, so the result is
/// `ops[n-1] ⋯ ops[1] · ops[0]`.
pub fn compose<T: Real>(ops: &[Mat2<T>]) -> Result<Mat2<T>> {
    let (first, rest) = ops.split_first().ok_or(Error::EmptyComposition)?;
    Ok(rest.iter().fold(*first, |acc, u| *u * acc))
}

/// ZXZ Euler angles, `U = Z_alpha · X_beta · Z_gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZxzAngles<T: Real> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

impl<T: Real> ZxzAngles<T> {
    pub fn new(alpha: T, beta: T, gamma: T) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn to_unitary(&self) -> Mat2<T> {
        rotation(Axis::Z, self.alpha) * rotation(Axis::X, self.beta) * rotation(Axis::Z, self.gamma)
    }
}

/// Euler angles plus the global phase: `U = exp(i·phase) · Z_α X_β Z_γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerDecomposition<T: Real> {
    pub angles: ZxzAngles<T>,
    pub phase: T,
}

impl<T: Real> EulerDecomposition<T> {
    pub fn to_unitary(&self) -> Mat2<T> {
        self.angles.to_unitary().with_phase(self.phase)
    }
}

/// Decompose a unitary into ZXZ Euler angles with `β ∈ [0, π]` and
/// `α, γ ∈ (-π, π]`. When `β` is 0 or π the split between `α` and `γ` is
/// not unique; `γ` is then pinned to 0.
pub fn euler_zxz<T: Real>(u: &Mat2<T>) -> EulerDecomposition<T> {
    let two = T::lit(2.0);
    // Remove the determinant phase to land in SU(2): V = [[a, b], [-b*, a*]].
    let det_phase = u.det().arg() / two;
    let v = u.with_phase(-det_phase);
    let (a, b) = (v.m[0][0], v.m[0][1]);
    let beta = two * b.norm().atan2(a.norm());
    let degenerate = T::lit(1e-12);

    // a = cos(β/2)·e^{-i(α+γ)/2},  b = -i·sin(β/2)·e^{-i(α-γ)/2}
    let (alpha, gamma) = if b.norm() < degenerate {
        (-two * a.arg(), T::zero())
    } else if a.norm() < degenerate {
        (-two * (b.arg() + T::FRAC_PI_2()), T::zero())
    } else {
        let sum = -two * a.arg();
        let diff = -two * (b.arg() + T::FRAC_PI_2());
        ((sum + diff) / two, (sum - diff) / two)
    };
    let angles = ZxzAngles::new(wrap_angle(alpha), beta, wrap_angle(gamma));
    let rebuilt = angles.to_unitary();
    // Tr(R†U) = 2·e^{i·phase} exactly when U = e^{i·phase}·R.
    let phase = (rebuilt.dagger() * *u).trace().arg();
    EulerDecomposition { angles, phase }
}

/// `|Tr(U†V)/2|²`, clamped to `[0, 1]`.
pub fn trace_gate_fidelity<T: Real>(u: &Mat2<T>, v: &Mat2<T>) -> T {
    let t = (u.dagger() * *v).trace().norm() / T::lit(2.0);
    (t * t).min(T::one()).max(T::zero())
}

/// Trace fidelity after the best final z-rotation:
/// `max_ζ |Tr(U† Z_ζ V)/2|²`, i.e. a deviation that is a pure z-rotation
/// (a frame change) is not counted. Closed form: `((|w00| + |w11|)/2)²`
/// with `W = V·U†`.
pub fn z_tracked_fidelity<T: Real>(u: &Mat2<T>, v: &Mat2<T>) -> T {
    let w = *v * u.dagger();
    let t = (w.m[0][0].norm() + w.m[1][1].norm()) / T::lit(2.0);
    (t * t).min(T::one()).max(T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    type C = Complex<f64>;

    fn random_su2(a: f64, b: f64, c: f64, phase: f64) -> Mat2<f64> {
        ZxzAngles::new(a, b, c).to_unitary().with_phase(phase)
    }

    #[test]
    fn rotation_examples() {
        let id = rotation(Axis::X, 0.0);
        assert!(id.max_abs_diff(&Mat2::identity()) < 1e-15);

        let x_pi = rotation(Axis::X, PI);
        let minus_i_x = Mat2::<f64>::pauli(Axis::X).scale(C::new(0.0, -1.0));
        assert!(x_pi.max_abs_diff(&minus_i_x) < 1e-15);

        let z = rotation(Axis::Z, FRAC_PI_2);
        let expect = Mat2::diag(C::from_polar(1.0, -FRAC_PI_4), C::from_polar(1.0, FRAC_PI_4));
        assert!(z.max_abs_diff(&expect) < 1e-15);

        // 2π is -I, not I.
        let full = rotation(Axis::Y, 2.0 * PI);
        assert!(full.max_abs_diff(&Mat2::identity().scale(C::new(-1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn rotation_about_rejects_non_unit_axis() {
        assert!(matches!(
            rotation_about([1.0, 1.0, 0.0], 0.3),
            Err(Error::NonUnitAxis { .. })
        ));
        assert!(rotation_about([1.0 + 1e-10, 0.0, 0.0], 0.3).is_ok());
        let s = 0.5f64.sqrt();
        let u = rotation_about([s, 0.0, s], 1.1).unwrap();
        assert!(u.is_unitary(1e-12));
        assert!((u.det().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose::<f64>(&[]), Err(Error::EmptyComposition));

        let u = random_su2(0.3, 1.2, -2.0, 0.7);
        assert!(compose(&[u, u.dagger()]).unwrap().max_abs_diff(&Mat2::identity()) < 1e-12);

        let q = rotation(Axis::Z, FRAC_PI_4);
        let h = compose(&[q, q]).unwrap();
        assert!(h.max_abs_diff(&rotation(Axis::Z, FRAC_PI_2)) < 1e-15);

        // First element acts first: [X_θ, Y_φ, X_−θ, Y_−φ] = Y_−φ X_−θ Y_φ X_θ.
        let (t, p) = (0.4, 1.3);
        let seq = compose(&[
            rotation(Axis::X, t),
            rotation(Axis::Y, p),
            rotation(Axis::X, -t),
            rotation(Axis::Y, -p),
        ])
        .unwrap();
        let explicit = rotation(Axis::Y, -p) * rotation(Axis::X, -t) * rotation(Axis::Y, p) * rotation(Axis::X, t);
        assert!(seq.max_abs_diff(&explicit) < 1e-15);
    }

    #[test]
    fn euler_examples() {
        let d = euler_zxz(&rotation(Axis::X, FRAC_PI_2));
        assert!(d.angles.alpha.abs() < 1e-12);
        assert!((d.angles.beta - FRAC_PI_2).abs() < 1e-12);
        assert!(d.angles.gamma.abs() < 1e-12);

        let d = euler_zxz(&Mat2::<f64>::identity());
        assert_eq!(d.angles.gamma, 0.0);
        assert!(d.angles.alpha.abs() < 1e-12 && d.angles.beta.abs() < 1e-12);

        // Target rotation of the four-pulse sequence at θ = φ = π/2.
        let t = FRAC_PI_2;
        let u = compose(&[
            rotation(Axis::X, t),
            rotation(Axis::Y, t),
            rotation(Axis::X, -t),
            rotation(Axis::Y, -t),
        ])
        .unwrap();
        let d = euler_zxz(&u);
        assert!((d.angles.alpha + FRAC_PI_2).abs() < 1e-12, "{:?}", d);
        assert!((d.angles.beta - FRAC_PI_2).abs() < 1e-12);
        assert!(d.angles.gamma.abs() < 1e-12);
        assert!(d.to_unitary().max_abs_diff(&u) < 1e-12);
    }

    #[test]
    fn euler_degenerate_beta_pi() {
        let u = rotation(Axis::Z, 0.8) * rotation(Axis::X, PI) * rotation(Axis::Z, -0.3);
        let d = euler_zxz(&u);
        assert!((d.angles.beta - PI).abs() < 1e-12);
        assert_eq!(d.angles.gamma, 0.0);
        assert!(d.to_unitary().max_abs_diff(&u) < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let u = random_su2(0.2, 0.9, 1.7, 0.0);
        assert!((trace_gate_fidelity(&u, &u) - 1.0).abs() < 1e-15);
        let x = Mat2::<f64>::pauli(Axis::X);
        assert!(trace_gate_fidelity(&Mat2::identity(), &x).abs() < 1e-15);
        let f = trace_gate_fidelity(&Mat2::identity(), &rotation(Axis::X, FRAC_PI_2));
        assert!((f - 0.5).abs() < 1e-15);
    }

    #[test]
    fn z_tracked_fidelity_ignores_final_frame() {
        let u = rotation(Axis::X, 0.7_f64);
        let v = rotation(Axis::Z, 1.3) * u;
        assert!((z_tracked_fidelity(&u, &v) - 1.0).abs() < 1e-14);
        assert!(trace_gate_fidelity(&u, &v) < 0.7);
        let w = rotation(Axis::X, 0.1) * u;
        assert!((z_tracked_fidelity(&u, &w) - trace_gate_fidelity(&u, &w)).abs() < 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let u = rotation(Axis::Y, 0.9_f32);
        let d = euler_zxz(&u);
        assert!(d.to_unitary().phase_aligned_diff(&u) < 1e-5);
        assert!(u.is_unitary(1e-6));
    }

    prop_compose! {
        fn su2_strategy()(a in -PI..PI, b in 0.0..PI, c in -PI..PI, p in -PI..PI) -> Mat2<f64> {
            random_su2(a, b, c, p)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn fidelity_symmetric_and_phase_blind(u in su2_strategy(), v in su2_strategy(), p in -PI..PI) {
            let f = trace_gate_fidelity(&u, &v);
            prop_assert!((f - trace_gate_fidelity(&v, &u)).abs() < 1e-12);
            prop_assert!((f - trace_gate_fidelity(&u.with_phase(p), &v)).abs() < 1e-12);
            prop_assert!((f - trace_gate_fidelity(&u, &v.with_phase(-p))).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&f));
        }

        #[test]
        fn euler_round_trip(u in su2_strategy()) {
            let d = euler_zxz(&u);
            prop_assert!(d.angles.beta >= 0.0 && d.angles.beta <= PI);
            prop_assert!(d.angles.alpha > -PI && d.angles.alpha <= PI);
            prop_assert!(d.angles.gamma > -PI && d.angles.gamma <= PI);
            prop_assert!(d.angles.to_unitary().phase_aligned_diff(&u) < 1e-10);
            prop_assert!(d.to_unitary().max_abs_diff(&u) < 1e-10);
        }

        #[test]
        fn compose_associative(a in su2_strategy(), b in su2_strategy(), c in su2_strategy()) {
            let left = compose(&[compose(&[a, b]).unwrap(), c]).unwrap();
            let right = compose(&[a, compose(&[b, c]).unwrap()]).unwrap();
            prop_assert!(left.max_abs_diff(&right) < 1e-12);
        }

        #[test]
        fn rotations_are_special_unitary(x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64, ang in -10.0..10.0f64) {
            let n = (x * x + y * y + z * z).sqrt();
            prop_assume!(n > 1e-3);
            let u = rotation_about([x / n, y / n, z / n], ang).unwrap();
            prop_assert!(u.is_unitary(1e-12));
            prop_assert!((u.det().norm() - 1.0).abs() < 1e-12);
        }
    }
}
