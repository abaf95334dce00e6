//! 4×4 tools for pairs of qubits: tensor products, two-qubit Pauli strings,
//! a general matrix exponential, and the search for local z-rotations that
//! bring a gate onto a target.
//!
//! Basis order is `|ab⟩ → 2a + b`, i.e. the left tensor factor is the most
//! significant bit.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::scalar::Real;
use crate::su2::{rotation, Axis, Mat2};

/// Dense 4×4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4<T: Real> {
    pub m: [[Complex<T>; 4]; 4],
}

impl<T: Real> Mat4<T> {
    pub fn zeros() -> Self {
        Self {
            m: [[Complex::new(T::zero(), T::zero()); 4]; 4],
        }
    }

    pub fn identity() -> Self {
        let mut out = Self::zeros();
        for k in 0..4 {
            out.m[k][k] = Complex::new(T::one(), T::zero());
        }
        out
    }

    pub fn diag(d: [Complex<T>; 4]) -> Self {
        let mut out = Self::zeros();
        for (k, v) in d.into_iter().enumerate() {
            out.m[k][k] = v;
        }
        out
    }

    /// `A ⊗ B`.
    pub fn kron(a: &Mat2<T>, b: &Mat2<T>) -> Self {
        let mut out = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.m[2 * i + k][2 * j + l] = a.m[i][j] * b.m[k][l];
                    }
                }
            }
        }
        out
    }

    /// Two-qubit Pauli string `σ_a ⊗ σ_b`; `None` stands for the identity.
    pub fn pauli_pair(a: Option<Axis>, b: Option<Axis>) -> Self {
        let p = |ax: Option<Axis>| ax.map_or_else(Mat2::identity, Mat2::pauli);
        Self::kron(&p(a), &p(b))
    }

    pub fn swap() -> Self {
        let o = Complex::new(T::one(), T::zero());
        let mut out = Self::zeros();
        out.m[0][0] = o;
        out.m[1][2] = o;
        out.m[2][1] = o;
        out.m[3][3] = o;
        out
    }

    /// `Z_a ⊗ Z_b`.
    pub fn local_z(a: T, b: T) -> Self {
        Self::kron(&rotation(Axis::Z, a), &rotation(Axis::Z, b))
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

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn with_phase(&self, phase: T) -> Self {
        self.scale(Complex::from_polar(T::one(), phase))
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..4).fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + self.m[k][k])
    }

    pub fn entries(&self) -> impl Iterator<Item = &Complex<T>> {
        self.m.iter().flatten()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.entries()
            .zip(other.entries())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Max-entry difference after aligning global phase on the
    /// largest-magnitude entry of `self`.
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
        self.max_abs_diff(&other.with_phase(a.arg() - b.arg()))
    }

    pub fn unitarity_defect(&self) -> T {
        (self.dagger() * *self).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Induced ∞-norm (max absolute row sum).
    pub fn inf_norm(&self) -> T {
        self.m
            .iter()
            .map(|row| row.iter().fold(T::zero(), |acc, e| acc + e.norm()))
            .fold(T::zero(), T::max)
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor
    /// series.
    pub fn expm(&self) -> Self {
        let norm = self.inf_norm();
        let mut squarings = 0u32;
        let mut scaled = *self;
        if norm > T::lit(0.25) {
            squarings = (norm / T::lit(0.25)).log2().ceil().to_u32().unwrap_or(0);
            scaled = self.scale_real(T::lit(0.5).powi(squarings as i32));
        }
        let mut sum = Self::identity();
        let mut term = Self::identity();
        for k in 1..=24 {
            term = (term * scaled).scale_real(T::one() / T::from_usize(k).unwrap());
            sum = sum + term;
            if term.inf_norm() < T::epsilon() * T::lit(1e-3) {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }

    /// `exp(-i·t·H)`.
    pub fn propagator(h: &Self, t: T) -> Self {
        h.scale(Complex::new(T::zero(), -t)).expm()
    }
}

impl<T: Real> Mul for Mat4<T> {
    type Output = Mat4<T>;

    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..4 {
                    acc = acc + self.m[i][k] * rhs.m[k][j];
                }
                out.m[i][j] = acc;
            }
        }
        out
    }
}

impl<T: Real> Add for Mat4<T> {
    type Output = Mat4<T>;

    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for (row, rrow) in out.m.iter_mut().zip(rhs.m.iter()) {
            for (e, r) in row.iter_mut().zip(rrow.iter()) {
                *e = *e + *r;
            }
        }
        out
    }
}

impl<T: Real> Sub for Mat4<T> {
    type Output = Mat4<T>;

    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale_real(-T::one())
    }
}

/// Result of the local-z alignment search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalZEquivalence<T: Real> {
    /// `max |Tr(target† (Z_a⊗Z_b) G (Z_c⊗Z_d))/4|²`.
    pub fidelity: T,
    /// `(a, b)`, applied after the gate.
    pub post: [T; 2],
    /// `(c, d)`, applied before the gate.
    pub pre: [T; 2],
    /// Phase of the maximizing trace; multiply the corrected gate by
    /// `exp(-i·phase)` to match the target.
    pub phase: T,
    /// `false` when the refinement hit its sweep limit before settling.
    pub converged: bool,
}

// Sign of the local z generator on basis state `k` for qubit 0 (left) / 1.
fn z_sign(k: usize, qubit: usize) -> i32 {
    let bit = if qubit == 0 { k >> 1 } else { k & 1 };
    if bit == 0 {
        1
    } else {
        -1
    }
}

struct LocalZObjective<T: Real> {
    // weight[i][k] = target†[k][i] · G[i][k]; the trace is
    // Σ_ik weight[i][k] · d_post[i] · d_pre[k].
    weight: [[Complex<T>; 4]; 4],
}

impl<T: Real> LocalZObjective<T> {
    fn phases(a: T, b: T) -> [Complex<T>; 4] {
        let half = T::lit(0.5);
        std::array::from_fn(|k| {
            let ang = -(a * T::lit(z_sign(k, 0) as f64) + b * T::lit(z_sign(k, 1) as f64)) * half;
            Complex::from_polar(T::one(), ang)
        })
    }

    fn trace(&self, x: &[T; 4]) -> Complex<T> {
        let post = Self::phases(x[0], x[1]);
        let pre = Self::phases(x[2], x[3]);
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..4 {
            for k in 0..4 {
                acc = acc + self.weight[i][k] * post[i] * pre[k];
            }
        }
        acc
    }

    fn value(&self, x: &[T; 4]) -> T {
        let t = self.trace(x).norm() / T::lit(4.0);
        t * t
    }

    // The trace is A·e^{-iθ/2} + B·e^{iθ/2} in any single angle θ; its modulus
    // peaks at θ = arg A − arg B.
    fn best_coordinate(&self, x: &[T; 4], coord: usize) -> T {
        let post = Self::phases(if coord == 0 { T::zero() } else { x[0] }, if coord == 1 { T::zero() } else { x[1] });
        let pre = Self::phases(if coord == 2 { T::zero() } else { x[2] }, if coord == 3 { T::zero() } else { x[3] });
        let (qubit, on_post) = match coord {
            0 => (0, true),
            1 => (1, true),
            2 => (0, false),
            _ => (1, false),
        };
        let zero = Complex::new(T::zero(), T::zero());
        let (mut plus, mut minus) = (zero, zero);
        for i in 0..4 {
            for k in 0..4 {
                let term = self.weight[i][k] * post[i] * pre[k];
                let s = if on_post { z_sign(i, qubit) } else { z_sign(k, qubit) };
                if s > 0 {
                    plus = plus + term;
                } else {
                    minus = minus + term;
                }
            }
        }
        if plus.norm() == T::zero() || minus.norm() == T::zero() {
            return x[coord];
        }
        plus.arg() - minus.arg()
    }
}

/// Find local z-rotations maximizing `|Tr(target† (Z_a⊗Z_b) G (Z_c⊗Z_d))/4|²`.
///
/// Seeds from an 8⁴ grid over the four angles, then refines by exact
/// coordinate-wise maximization.
pub fn equivalent_up_to_local_z<T: Real>(gate: &Mat4<T>, target: &Mat4<T>) -> LocalZEquivalence<T> {
    let td = target.dagger();
    let mut weight = [[Complex::new(T::zero(), T::zero()); 4]; 4];
    for (i, row) in weight.iter_mut().enumerate() {
        for (k, w) in row.iter_mut().enumerate() {
            *w = td.m[k][i] * gate.m[i][k];
        }
    }
    let obj = LocalZObjective { weight };

    const GRID: usize = 8;
    let step = T::TAU() / T::from_usize(GRID).unwrap();
    let mut best_x = [T::zero(); 4];
    let mut best = obj.value(&best_x);
    for idx in 0..GRID.pow(4) {
        let x: [T; 4] = std::array::from_fn(|c| T::from_usize((idx / GRID.pow(c as u32)) % GRID).unwrap() * step);
        let v = obj.value(&x);
        if v > best {
            best = v;
            best_x = x;
        }
    }

    let mut converged = false;
    for _ in 0..20_000 {
        let before = best;
        for c in 0..4 {
            best_x[c] = obj.best_coordinate(&best_x, c);
        }
        best = obj.value(&best_x);
        if (best - before).abs() <= T::epsilon() * T::lit(4.0) {
            converged = true;
            break;
        }
    }
    // Canonical representative: zero angles for an already-aligned gate.
    let x: [T; 4] = std::array::from_fn(|c| crate::scalar::wrap_angle(best_x[c]));
    let trace = obj.trace(&x);
    LocalZEquivalence {
        fidelity: obj.value(&x).min(T::one()),
        post: [x[0], x[1]],
        pre: [x[2], x[3]],
        phase: trace.arg(),
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

    fn heisenberg() -> Mat4<f64> {
        Mat4::pauli_pair(Some(Axis::X), Some(Axis::X))
            + Mat4::pauli_pair(Some(Axis::Y), Some(Axis::Y))
            + Mat4::pauli_pair(Some(Axis::Z), Some(Axis::Z))
    }

    #[test]
    fn kron_and_paulis() {
        let zi = Mat4::<f64>::pauli_pair(Some(Axis::Z), None);
        let signs: Vec<f64> = (0..4).map(|k| zi.m[k][k].re).collect();
        assert_eq!(signs, vec![1.0, 1.0, -1.0, -1.0]);
        let iz = Mat4::<f64>::pauli_pair(None, Some(Axis::Z));
        let signs: Vec<f64> = (0..4).map(|k| iz.m[k][k].re).collect();
        assert_eq!(signs, vec![1.0, -1.0, 1.0, -1.0]);
        assert!(Mat4::<f64>::swap().is_unitary(1e-15));
    }

    #[test]
    fn expm_matches_closed_form_rotation() {
        // exp(-i θ/2 (X⊗I)) = X_θ ⊗ I.
        let h = Mat4::<f64>::pauli_pair(Some(Axis::X), None).scale_real(0.5);
        let u = Mat4::propagator(&h, 2.7);
        let expect = Mat4::kron(&rotation(Axis::X, 2.7), &Mat2::identity());
        assert!(u.max_abs_diff(&expect) < 1e-13);
        // Large norm still accurate.
        let h = Mat4::<f64>::pauli_pair(None, Some(Axis::Z)).scale_real(0.5);
        let u = Mat4::propagator(&h, 400.0);
        let expect = Mat4::kron(&Mat2::identity(), &rotation(Axis::Z, 400.0));
        assert!(u.max_abs_diff(&expect) < 1e-11);
    }

    #[test]
    fn heisenberg_quarter_turn_is_swap() {
        let u = Mat4::propagator(&heisenberg(), FRAC_PI_4);
        assert!(u.phase_aligned_diff(&Mat4::swap()) < 1e-13);
        let eq = equivalent_up_to_local_z(&u, &Mat4::swap());
        assert!((1.0 - eq.fidelity) < 1e-9, "{eq:?}");
    }

    #[test]
    fn swap_against_itself() {
        let eq = equivalent_up_to_local_z(&Mat4::<f64>::swap(), &Mat4::swap());
        assert!((eq.fidelity - 1.0).abs() < 1e-15);
        assert!(eq.pre.iter().chain(eq.post.iter()).all(|a| a.abs() < 1e-12));
        assert!(eq.converged);
    }

    #[test]
    fn removable_local_z() {
        let g = Mat4::kron(&rotation(Axis::Z, FRAC_PI_3), &Mat2::identity()) * Mat4::swap();
        let eq = equivalent_up_to_local_z(&g, &Mat4::swap());
        assert!((eq.fidelity - 1.0).abs() < 1e-12, "{eq:?}");
        // The returned angles actually undo the rotation.
        let fixed = Mat4::local_z(eq.post[0], eq.post[1]) * g * Mat4::local_z(eq.pre[0], eq.pre[1]);
        assert!(fixed.with_phase(-eq.phase).max_abs_diff(&Mat4::swap()) < 1e-10);
    }

    #[test]
    fn generic_pre_and_post_z() {
        let g = Mat4::local_z(0.4_f64, -1.1) * Mat4::swap() * Mat4::local_z(2.0, 0.3);
        let eq = equivalent_up_to_local_z(&g, &Mat4::swap());
        assert!((eq.fidelity - 1.0).abs() < 1e-12);
        let target = Mat4::local_z(0.3_f64, 1.0) * Mat4::kron(&rotation(Axis::X, 0.2), &Mat2::identity());
        let g = Mat4::local_z(-0.5, 0.9) * target * Mat4::local_z(1.5, -2.5);
        let eq = equivalent_up_to_local_z(&g, &target);
        assert!((eq.fidelity - 1.0).abs() < 1e-10, "{eq:?}");
    }

    #[test]
    fn non_local_phase_is_not_removable() {
        // exp(-iκ ZZ) cannot be undone by local z; best fidelity is cos²κ.
        let zz = Mat4::<f64>::pauli_pair(Some(Axis::Z), Some(Axis::Z));
        let kappa = 0.3;
        let g = Mat4::propagator(&zz, kappa) * Mat4::swap();
        let eq = equivalent_up_to_local_z(&g, &Mat4::swap());
        assert!((eq.fidelity - kappa.cos().powi(2)).abs() < 1e-10);
        let g = Mat4::propagator(&zz, PI / 2.0) * Mat4::swap();
        assert!((equivalent_up_to_local_z(&g, &Mat4::swap()).fidelity - 1.0).abs() < 1e-12);
    }
}
