//! Truncated bosonic Fock spaces: analytic state amplitudes, ladder actions
//! on vectors, dense single- and two-mode operators, and the beam splitter
//! `exp(-i t (a b^dagger + a^dagger b))` applied block by block in total
//! photon number.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qstate::matrix::{c, CMatrix, CVector, Generator, C64};

/// Amplitudes `<n|alpha>` of a coherent state for `n < len`, computed in
/// log space so large `|alpha|` does not underflow.
pub fn coherent_amplitudes(alpha: C64, len: usize) -> Vec<C64> {
    let mag = alpha.norm();
    let arg = alpha.arg();
    let mut out = Vec::with_capacity(len);
    let mut log_fact = 0.0;
    for n in 0..len {
        if n > 0 {
            log_fact += (n as f64).ln();
        }
        let log_mag = if mag == 0.0 {
            if n == 0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            -0.5 * mag * mag + n as f64 * mag.ln() - 0.5 * log_fact
        };
        out.push(C64::from_polar(log_mag.exp(), n as f64 * arg));
    }
    out
}

/// Amplitudes of `D(alpha) |1> = (b^dagger - alpha^*) |alpha>`.
pub fn displaced_one_amplitudes(alpha: C64, len: usize) -> Vec<C64> {
    let coh = coherent_amplitudes(alpha, len);
    (0..len)
        .map(|n| {
            let up = if n > 0 {
                coh[n - 1] * (n as f64).sqrt()
            } else {
                c(0.0, 0.0)
            };
            up - alpha.conj() * coh[n]
        })
        .collect()
}

/// Amplitudes of `S(r)|0>` with `S(r) = exp(r^*/2 a^2 - r/2 a^dagger^2)` and
/// `r = r_mag e^{2 i phi}`.
pub fn squeezed_vacuum_amplitudes(r_mag: f64, phi: f64, len: usize) -> Vec<C64> {
    let mut out = vec![c(0.0, 0.0); len];
    if len == 0 {
        return out;
    }
    out[0] = c(1.0 / r_mag.cosh().sqrt(), 0.0);
    let ratio = -C64::from_polar(r_mag.tanh(), 2.0 * phi);
    let mut m = 0usize;
    while 2 * m + 2 < len {
        let f = (((2 * m + 1) * (2 * m + 2)) as f64).sqrt() / (2 * (m + 1)) as f64;
        out[2 * m + 2] = out[2 * m] * ratio * f;
        m += 1;
    }
    out
}

/// `1 - sum |c_n|^2`, floored at zero.
pub fn tail_mass(amps: &[C64]) -> f64 {
    (1.0 - amps.iter().map(|z| z.norm_sqr()).sum::<f64>()).max(0.0)
}

/// `a v` on a truncated single mode.
pub fn lower(v: &CVector) -> CVector {
    let n = v.len();
    CVector::from_fn(n, |k, _| {
        if k + 1 < n {
            v[k + 1] * ((k + 1) as f64).sqrt()
        } else {
            c(0.0, 0.0)
        }
    })
}

/// `a^dagger v`; the component pushed past the cutoff is dropped.
pub fn raise(v: &CVector) -> CVector {
    let n = v.len();
    CVector::from_fn(n, |k, _| {
        if k > 0 {
            v[k - 1] * (k as f64).sqrt()
        } else {
            c(0.0, 0.0)
        }
    })
}

/// `a^dagger a v`.
pub fn number(v: &CVector) -> CVector {
    CVector::from_fn(v.len(), |k, _| v[k] * k as f64)
}

/// Sum of product vectors `sum_k w_k x_k (x) y_k` on two modes.
#[derive(Debug, Clone, Default)]
pub struct ProductSum {
    pub terms: Vec<(C64, CVector, CVector)>,
}

impl ProductSum {
    pub fn product(x: CVector, y: CVector) -> Self {
        Self {
            terms: vec![(c(1.0, 0.0), x, y)],
        }
    }

    pub fn push(&mut self, w: C64, x: CVector, y: CVector) {
        self.terms.push((w, x, y));
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &ProductSum) -> C64 {
        let mut acc = c(0.0, 0.0);
        for (w1, x1, y1) in &self.terms {
            for (w2, x2, y2) in &other.terms {
                acc += w1.conj() * w2 * x1.dotc(x2) * y1.dotc(y2);
            }
        }
        acc
    }

    /// Dense two-mode vector with index `n_a (n_max + 1) + n_b`, keeping
    /// levels up to `n_max` in each mode.
    pub fn to_dense(&self, n_max: usize) -> CVector {
        let d = n_max + 1;
        let mut out = CVector::zeros(d * d);
        for (w, x, y) in &self.terms {
            for i in 0..d.min(x.len()) {
                let xi = x[i] * w;
                for j in 0..d.min(y.len()) {
                    out[i * d + j] += xi * y[j];
                }
            }
        }
        out
    }
}

/// Single-mode annihilation operator on levels `0..=n_max`.
pub fn annihilation(n_max: usize) -> CMatrix {
    let d = n_max + 1;
    CMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            c((j as f64).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Beam splitter on a dense two-mode vector. Each total-photon block `N` is
/// exponentiated exactly; blocks with `N > n_max` are truncated by the
/// per-mode cutoff unless `complete_only`, in which case their amplitude is
/// dropped. Returns the output vector and the dropped norm squared.
pub fn apply_beam_splitter(angle: f64, v: &CVector, n_max: usize, complete_only: bool) -> (CVector, f64) {
    let d = n_max + 1;
    assert_eq!(v.len(), d * d, "two-mode vector length");
    let mut out = CVector::zeros(d * d);
    let mut dropped = 0.0;
    // half-period swap is exact and cheap: |m, n> -> (-i)^{m+n} |n, m>
    let half_turns = angle / std::f64::consts::FRAC_PI_2;
    if (half_turns - 1.0).abs() < 1e-15 {
        const PHASES: [C64; 4] = [
            C64::new(1.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, 1.0),
        ];
        for m in 0..d {
            for n in 0..d {
                let amp = v[m * d + n];
                if complete_only && m + n > n_max {
                    dropped += amp.norm_sqr();
                    continue;
                }
                out[n * d + m] = amp * PHASES[(m + n) % 4];
            }
        }
        return (out, dropped);
    }
    for total in 0..=2 * n_max {
        let lo = total.saturating_sub(n_max);
        let hi = total.min(n_max);
        let idx: Vec<usize> = (lo..=hi).map(|m| m * d + (total - m)).collect();
        if complete_only && total > n_max {
            dropped += idx.iter().map(|&k| v[k].norm_sqr()).sum::<f64>();
            continue;
        }
        let u = block_unitary(angle, total, lo, hi);
        for (r, &kr) in idx.iter().enumerate() {
            let mut acc = c(0.0, 0.0);
            for (s, &ks) in idx.iter().enumerate() {
                acc += u[(r, s)] * v[ks];
            }
            out[kr] = acc;
        }
    }
    (out, dropped)
}

/// `exp(-i t K)` on the block `{|m, N - m> : lo <= m <= hi}` with
/// `K = a b^dagger + a^dagger b`.
fn block_unitary(angle: f64, total: usize, lo: usize, hi: usize) -> CMatrix {
    let size = hi - lo + 1;
    let mut k = DMatrix::<f64>::zeros(size, size);
    for r in 0..size.saturating_sub(1) {
        let m = lo + r;
        let val = ((m + 1) as f64).sqrt() * ((total - m) as f64).sqrt();
        k[(r + 1, r)] = val;
        k[(r, r + 1)] = val;
    }
    let eig = SymmetricEigen::new(k);
    let v = &eig.eigenvectors;
    CMatrix::from_fn(size, size, |i, j| {
        let mut acc = c(0.0, 0.0);
        for l in 0..size {
            acc += C64::from_polar(1.0, -angle * eig.eigenvalues[l]) * (v[(i, l)] * v[(j, l)]);
        }
        acc
    })
}

/// Dense Fock operators for small cutoffs. Two-mode operators act on index
/// `n_a (n_max + 1) + n_b` and are built on request.
#[derive(Debug, Clone)]
pub struct FockOperators {
    pub n_max: usize,
    /// Single-mode `a`.
    pub annihilate: CMatrix,
}

pub fn fock_operators(n_max: usize) -> Result<FockOperators> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    Ok(FockOperators {
        n_max,
        annihilate: annihilation(n_max),
    })
}

impl FockOperators {
    fn identity(&self) -> CMatrix {
        CMatrix::identity(self.n_max + 1, self.n_max + 1)
    }

    /// `a (x) 1`.
    pub fn annihilate_a(&self) -> CMatrix {
        self.annihilate.kronecker(&self.identity())
    }

    /// `1 (x) b`.
    pub fn annihilate_b(&self) -> CMatrix {
        self.identity().kronecker(&self.annihilate)
    }

    /// `a^dagger a (x) 1`.
    pub fn number_a(&self) -> CMatrix {
        let d = self.n_max + 1;
        CMatrix::from_fn(
            d * d,
            d * d,
            |i, j| if i == j { c((i / d) as f64, 0.0) } else { c(0.0, 0.0) },
        )
    }

    fn exp_anti_hermitian(&self, x: CMatrix) -> CMatrix {
        // exp(X) with X anti-Hermitian: X = -i H, H = i X
        let h = x * c(0.0, 1.0);
        Generator::dense(&h, 1e-9)
            .expect("anti-Hermitian exponent")
            .exp_matrix(c(0.0, -1.0))
    }

    /// `D(alpha) = exp(alpha a^dagger - alpha^* a)` of the truncated ladder.
    pub fn displacement(&self, alpha: C64) -> CMatrix {
        let a = &self.annihilate;
        self.exp_anti_hermitian(a.adjoint() * alpha - a * alpha.conj())
    }

    /// `S(r) = exp(r^*/2 a^2 - r/2 a^dagger^2)` of the truncated ladder.
    pub fn squeeze(&self, r: C64) -> CMatrix {
        let a = &self.annihilate;
        let a2 = a * a;
        let ad2 = a2.adjoint();
        self.exp_anti_hermitian(a2 * (r.conj() * 0.5) - ad2 * (r * 0.5))
    }

    /// Dense `exp(-i angle (a b^dagger + a^dagger b))`.
    pub fn beam_splitter(&self, angle: f64) -> CMatrix {
        let d = self.n_max + 1;
        let dim = d * d;
        let mut out = CMatrix::zeros(dim, dim);
        for k in 0..dim {
            let mut e = CVector::zeros(dim);
            e[k] = c(1.0, 0.0);
            let (col, _) = apply_beam_splitter(angle, &e, self.n_max, false);
            out.set_column(k, &col);
        }
        out
    }

    /// `exp(-i theta a^dagger a) (x) 1`.
    pub fn phase(&self, theta: f64) -> CMatrix {
        let d = self.n_max + 1;
        CMatrix::from_fn(d * d, d * d, |i, j| {
            if i == j {
                C64::from_polar(1.0, -theta * (i / d) as f64)
            } else {
                c(0.0, 0.0)
            }
        })
    }
}
