//! Dirac operators driven by half-plane paths: kernels, traces,
//! Hilbert–Schmidt distances, transfer-matrix secular functions, Prüfer-phase
//! eigenvalue counting, and the time-reversal / rotation symmetries.
//!
//! An operator is determined by a driving path t ↦ (x(t), y(t)) in the upper
//! half plane on [0,1), an endpoint q, and boundary vectors u0, u1 normalized
//! by u0ᵀJu1 = 1 with J = [[0,−1],[1,0]]. The weight function is
//! R = (1/2y)[[1, −x], [−x, x²+y²]], symmetric with det R = 1/4. Both path
//! representations used here (discrete chains and grid-sampled diffusions)
//! are piecewise constant between knots, so every integral below is an exact
//! finite sum over intervals — no quadrature error enters.

use crate::error::{Error, Result};
use crate::opuc::{SupportPoints, VerblunskySeq};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How a path was produced; both are stored as piecewise-constant functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathKind {
    /// From a finite coefficient chain: N knots at i/N.
    Step,
    /// From a diffusion sampled on a (possibly non-uniform) grid.
    Sampled,
}

/// Piecewise-constant driving path on [0,1) with endpoint q.
///
/// Serialized as JSON with fields `kind`, `knots`, `xs`, `ys`, `q`;
/// the value on [knots[i], knots[i+1]) is (xs[i], ys[i]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivingPath {
    pub kind: PathKind,
    pub knots: Vec<f64>,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub q: f64,
}

impl DrivingPath {
    /// Step path with knots at i/N.
    pub fn step(xs: Vec<f64>, ys: Vec<f64>, q: f64) -> Result<Self> {
        let n = xs.len();
        let knots = (0..n).map(|i| i as f64 / n as f64).collect();
        Self::checked(PathKind::Step, knots, xs, ys, q)
    }

    /// Grid-sampled path with explicit knots.
    pub fn sampled(knots: Vec<f64>, xs: Vec<f64>, ys: Vec<f64>, q: f64) -> Result<Self> {
        Self::checked(PathKind::Sampled, knots, xs, ys, q)
    }

    fn checked(kind: PathKind, knots: Vec<f64>, xs: Vec<f64>, ys: Vec<f64>, q: f64) -> Result<Self> {
        if knots.is_empty() || knots.len() != xs.len() || knots.len() != ys.len() {
            return Err(Error::domain("knots, xs, ys must be equal-length and nonempty".to_string()));
        }
        if knots[0] != 0.0 {
            return Err(Error::domain("first knot must be 0".to_string()));
        }
        for w in knots.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::domain("knots must be strictly increasing".to_string()));
            }
        }
        if *knots.last().unwrap() >= 1.0 {
            return Err(Error::domain("knots must lie in [0,1)".to_string()));
        }
        for (i, &y) in ys.iter().enumerate() {
            if !(y > 0.0) {
                return Err(Error::domain(format!("y must stay positive on [0,1); y[{i}] = {y}")));
            }
        }
        if !q.is_finite() {
            return Err(Error::domain(format!("endpoint q must be finite (got {q})")));
        }
        Ok(DrivingPath { kind, knots, xs, ys, q })
    }

    /// Path value at t ∈ [0,1).
    pub fn value_at(&self, t: f64) -> Result<(f64, f64)> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::domain(format!("t = {t} outside [0,1)")));
        }
        let i = match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Ok((self.xs[i], self.ys[i]))
    }

    /// Constant intervals (t0, t1, x, y) covering [0,1).
    pub fn intervals(&self) -> Vec<(f64, f64, f64, f64)> {
        let n = self.knots.len();
        (0..n)
            .map(|i| {
                let t1 = if i + 1 < n { self.knots[i + 1] } else { 1.0 };
                (self.knots[i], t1, self.xs[i], self.ys[i])
            })
            .collect()
    }
}

/// A Dirac operator: driving path plus normalized boundary data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracOperator {
    pub path: DrivingPath,
    pub u0: [f64; 2],
    pub u1: [f64; 2],
}

/// J = [[0,−1],[1,0]] applied to a vector.
fn jmul(u: [f64; 2]) -> [f64; 2] {
    [-u[1], u[0]]
}

fn symplectic(u0: [f64; 2], u1: [f64; 2]) -> f64 {
    u0[0] * jmul(u1)[0] + u0[1] * jmul(u1)[1]
}

impl DiracOperator {
    /// Build with explicit boundary data, enforcing u0ᵀJu1 = 1.
    pub fn new(path: DrivingPath, u0: [f64; 2], u1: [f64; 2]) -> Result<Self> {
        let s = symplectic(u0, u1);
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("boundary data must satisfy u0ᵀJu1 = 1 (got {s})")));
        }
        Ok(DiracOperator { path, u0, u1 })
    }

    /// The finite-operator convention: u0 = [1,0], u1 = [−q,−1].
    pub fn finite(path: DrivingPath) -> Self {
        let q = path.q;
        DiracOperator { path, u0: [1.0, 0.0], u1: [-q, -1.0] }
    }
}

/// The (w_k, v_k) pair encoded by a modified Verblunsky coefficient:
/// γ = (w − iv)/(2 + w − iv), inverted as w − iv = 2γ/(1−γ).
pub fn wv_from_gamma_coef(gamma: C64) -> Result<(f64, f64)> {
    let d = C64::new(1.0, 0.0) - gamma;
    if d.norm() < 1e-14 {
        return Err(Error::numerical("gamma = 1 has no (w, v) chart".to_string()));
    }
    let wv = 2.0 * gamma / d;
    Ok((wv.re, -wv.im))
}

/// Driving path of the finite operator attached to a coefficient sequence:
/// x_{k+1} = x_k + v_k y_k, y_{k+1} = y_k (1 + w_k), x_0 = 0, y_0 = 1,
/// with (w_k, v_k) read off γ_k. The final coefficient has |γ| = 1, which
/// forces w = −1 and y_N = 0; the path carries the first N values and the
/// endpoint q = x_N.
pub fn path_from_gammas(seq: &VerblunskySeq) -> Result<DrivingPath> {
    let n = seq.len();
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let (mut x, mut y) = (0.0_f64, 1.0_f64);
    for (k, &g) in seq.gammas.iter().enumerate() {
        xs.push(x);
        ys.push(y);
        let (w, v) = wv_from_gamma_coef(g)?;
        x += v * y;
        y *= 1.0 + w;
        if k + 1 < n && y <= 0.0 {
            return Err(Error::domain(format!(
                "y_{} = {y} <= 0 before the final step; input sequence violates |gamma_k| < 1",
                k + 1
            )));
        }
    }
    DrivingPath::step(xs, ys, x)
}

/// Weight matrix R(t) = (1/2y)[[1, −x], [−x, x²+y²]].
pub fn weight_at(path: &DrivingPath, t: f64) -> Result<[[f64; 2]; 2]> {
    let (x, y) = path.value_at(t)?;
    Ok(weight_of(x, y))
}

fn weight_of(x: f64, y: f64) -> [[f64; 2]; 2] {
    let c = 1.0 / (2.0 * y);
    [[c, -c * x], [-c * x, c * (x * x + y * y)]]
}

/// Normalized square root of the weight: X̂ = (1/√y)[[1, −x],[0, y]],
/// so that X̂ᵀX̂ = 2R and det X̂ = 1.
fn xhat_apply(x: f64, y: f64, u: [f64; 2]) -> [f64; 2] {
    let s = y.sqrt();
    [(u[0] - x * u[1]) / s, s * u[1]]
}

/// Resolvent kernel K(s,t) = ½ (a(s)c(t)ᵀ 1_{s<t} + c(s)a(t)ᵀ 1_{s≥t}) with
/// a = X̂u0 and c = X̂u1.
pub fn resolvent_kernel(op: &DiracOperator, s: f64, t: f64) -> Result<[[f64; 2]; 2]> {
    let (xs_, ys_) = op.path.value_at(s)?;
    let (xt, yt) = op.path.value_at(t)?;
    let (left, right) = if s < t {
        (xhat_apply(xs_, ys_, op.u0), xhat_apply(xt, yt, op.u1))
    } else {
        (xhat_apply(xs_, ys_, op.u1), xhat_apply(xt, yt, op.u0))
    };
    Ok([
        [0.5 * left[0] * right[0], 0.5 * left[0] * right[1]],
        [0.5 * left[1] * right[0], 0.5 * left[1] * right[1]],
    ])
}

/// Integral trace ∫₀¹ u0ᵀ R(s) u1 ds. The integrand is piecewise constant,
/// so the sum over constant intervals is exact; `quad_points` only sets a
/// minimum subdivision (which cannot change the value) and is kept for
/// interface compatibility with refinement-based backends.
pub fn integral_trace(op: &DiracOperator, quad_points: usize) -> Result<f64> {
    let _ = quad_points;
    let mut acc = 0.0;
    for (t0, t1, x, y) in op.path.intervals() {
        let r = weight_of(x, y);
        let ru1 = [r[0][0] * op.u1[0] + r[0][1] * op.u1[1], r[1][0] * op.u1[0] + r[1][1] * op.u1[1]];
        acc += (t1 - t0) * (op.u0[0] * ru1[0] + op.u0[1] * ru1[1]);
    }
    Ok(acc)
}

/// Hilbert–Schmidt distance √∫∫ ‖K₁(s,t) − K₂(s,t)‖²_F ds dt.
///
/// On the common refinement of the two knot sets the kernels are constant on
/// every off-diagonal cell and on each triangular half of every diagonal
/// cell, so the double integral is an exact finite sum.
pub fn hs_distance(op1: &DiracOperator, op2: &DiracOperator, quad_points: usize) -> Result<f64> {
    let _ = quad_points;
    let mut cuts: Vec<f64> = op1.path.knots.iter().chain(op2.path.knots.iter()).copied().collect();
    cuts.push(1.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let m = cuts.len() - 1;

    // Per-cell vectors a = X̂u0 and c = X̂u1 for both operators.
    let mut avs = [Vec::with_capacity(m), Vec::with_capacity(m)];
    let mut cvs = [Vec::with_capacity(m), Vec::with_capacity(m)];
    for i in 0..m {
        let t = cuts[i];
        for (slot, op) in [op1, op2].into_iter().enumerate() {
            let (x, y) = op.path.value_at(t)?;
            avs[slot].push(xhat_apply(x, y, op.u0));
            cvs[slot].push(xhat_apply(x, y, op.u1));
        }
    }

    let fro_diff_sq = |l1: [f64; 2], r1: [f64; 2], l2: [f64; 2], r2: [f64; 2]| -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let d = 0.5 * (l1[i] * r1[j] - l2[i] * r2[j]);
                acc += d * d;
            }
        }
        acc
    };

    let mut total = 0.0;
    for i in 0..m {
        let hi = cuts[i + 1] - cuts[i];
        for j in 0..m {
            let hj = cuts[j + 1] - cuts[j];
            if i < j {
                // s < t throughout: K = ½ a(s) c(t)ᵀ.
                total += hi * hj * fro_diff_sq(avs[0][i], cvs[0][j], avs[1][i], cvs[1][j]);
            } else if i > j {
                total += hi * hj * fro_diff_sq(cvs[0][i], avs[0][j], cvs[1][i], avs[1][j]);
            } else {
                // Diagonal cell: each triangle has half the area.
                let half = 0.5 * hi * hj;
                total += half * fro_diff_sq(avs[0][i], cvs[0][i], avs[1][i], cvs[1][i]);
                total += half * fro_diff_sq(cvs[0][i], avs[0][i], cvs[1][i], avs[1][i]);
            }
        }
    }
    Ok(total.sqrt())
}

/// Complex 2×2 times complex 2-vector.
fn cmat_apply(m: [[C64; 2]; 2], v: [C64; 2]) -> [C64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Exact propagator exp(−zJRΔt) for constant R with det R = 1/4.
///
/// The generator M = −zJRΔt is traceless with M² = −(zΔt/2)² I, so
/// exp(M) = cos(θ) I + sinc(θ) M with θ = zΔt/2, where sinc(θ) = sin(θ)/θ
/// is evaluated by series for small |θ| to avoid cancellation.
fn interval_propagator(z: C64, r: [[f64; 2]; 2], dt: f64) -> [[C64; 2]; 2] {
    // M = −z J R Δt; J R = [[−R10, −R11], [R00, R01]].
    let m = [
        [z * r[1][0] * dt, z * r[1][1] * dt],
        [-z * r[0][0] * dt, -z * r[0][1] * dt],
    ];
    let theta = z * dt / 2.0;
    let (c, s) = if theta.norm() < 1e-4 {
        let t2 = theta * theta;
        // cos and sinc to O(θ⁶): ample at |θ| < 1e−4.
        (
            C64::new(1.0, 0.0) - t2 / 2.0 + t2 * t2 / 24.0,
            C64::new(1.0, 0.0) - t2 / 6.0 + t2 * t2 / 120.0,
        )
    } else {
        (theta.cos(), theta.sin() / theta)
    };
    [
        [c + s * m[0][0], s * m[0][1]],
        [s * m[1][0], c + s * m[1][1]],
    ]
}

/// Secular function via the transfer-matrix solve of H' = −zJRH, H(0) = u0:
/// returns ζ(z) = (Ju1)ᵀ H(1, z). For the standard boundary data this is
/// [1, −q]·H(1, z). Requires a step path (limit secular functions are
/// produced by the diffusion engines, not this solver).
pub fn transfer_secular(op: &DiracOperator, z: C64) -> Result<C64> {
    if op.path.kind != PathKind::Step {
        return Err(Error::unsupported(
            "transfer_secular requires a step path; sampled paths use the diffusion engines".to_string(),
        ));
    }
    let mut h = [C64::new(op.u0[0], 0.0), C64::new(op.u0[1], 0.0)];
    for (t0, t1, x, y) in op.path.intervals() {
        let p = interval_propagator(z, weight_of(x, y), t1 - t0);
        h = cmat_apply(p, h);
    }
    let ju1 = jmul(op.u1);
    Ok(h[0] * ju1[0] + h[1] * ju1[1])
}

fn wrap_pi(x: f64) -> f64 {
    // Into (−π, π].
    let mut r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Number of eigenvalues of `op` in (0, λ] (λ > 0) or (λ, 0] (λ < 0),
/// by oscillation theory on the shooting solution v' = −λJRv, v(0) = u0.
///
/// The Prüfer phase w(t) (Euclidean angle lift of v) is strictly monotone
/// with w' ∈ −λ[r_min, r_max], the eigenvalues of R(t). Each constant
/// interval is split so that |λ|Δt(r_max − r_min) ≤ π, which pins the exact
/// winding to the unique representative of the measured angle change within
/// π of the midpoint −λΔt·trace(R)/2 — the lift is exact, not grid-converged.
/// `grid` sets a minimum number of substeps overall.
pub fn prufer_count(op: &DiracOperator, lambda: f64, grid: usize) -> Result<i64> {
    if lambda == 0.0 {
        return Ok(0);
    }
    let intervals = op.path.intervals();
    let min_per = (grid / intervals.len().max(1)).max(1);
    let mut v = op.u0;
    let mut w = v[1].atan2(v[0]);
    let w0 = w;
    for (t0, t1, x, y) in intervals {
        let dt_full = t1 - t0;
        let r = weight_of(x, y);
        let tr = r[0][0] + r[1][1];
        let spread = (tr * tr - 1.0).max(0.0).sqrt(); // r_max − r_min (det = 1/4)
        let need = ((lambda.abs() * dt_full * spread) / PI).ceil() as usize;
        let nsub = need.max(min_per);
        let dt = dt_full / nsub as f64;
        let p = interval_propagator(C64::new(lambda, 0.0), r, dt);
        // Real part of the propagator (it is real for real λ).
        let pr = [[p[0][0].re, p[0][1].re], [p[1][0].re, p[1][1].re]];
        let mid = -lambda * dt * tr / 2.0;
        for _ in 0..nsub {
            let nv = [pr[0][0] * v[0] + pr[0][1] * v[1], pr[1][0] * v[0] + pr[1][1] * v[1]];
            let norm = (nv[0] * nv[0] + nv[1] * nv[1]).sqrt();
            v = [nv[0] / norm, nv[1] / norm];
            let ang = v[1].atan2(v[0]);
            let prev = w;
            let raw = ang - wrap_pi(prev);
            w = prev + mid + wrap_pi(raw - mid);
        }
    }
    // Eigenvalues sit where w(1, λ) crosses the u1 line (mod π). With
    // w(1, ·) monotone decreasing in λ and w(1, 0) = w0, the count is the
    // number of lattice points θ1 + πk passed between w0 and w(1, λ).
    let theta1 = op.u1[1].atan2(op.u1[0]);
    let count = if lambda > 0.0 {
        // k with w(1,λ) ≤ θ1 + πk < w0.
        ((w0 - theta1) / PI).ceil() - ((w - theta1) / PI).ceil()
    } else {
        // k with w0 < θ1 + πk ≤ w(1,λ).
        ((w - theta1) / PI).floor() - ((w0 - theta1) / PI).floor()
    };
    Ok(count as i64)
}

/// Eigenvalues in a symmetric window, with λ_{−1} < 0 < λ_0 indexing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumWindow {
    /// Strictly increasing; no exact zeros.
    pub eigs: Vec<f64>,
    pub window: f64,
}

impl SpectrumWindow {
    pub fn new(mut eigs: Vec<f64>, window: f64) -> Result<Self> {
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for &e in &eigs {
            if e.abs() < 1e-12 {
                return Err(Error::numerical("eigenvalue at 0 (a.s. impossible; indexing undefined)".to_string()));
            }
        }
        for w in eigs.windows(2) {
            if w[1] - w[0] < 1e-12 {
                return Err(Error::numerical(format!("eigenvalue collision near {}", w[0])));
            }
        }
        Ok(SpectrumWindow { eigs, window })
    }

    /// Position of λ_0, the smallest positive eigenvalue.
    pub fn index_zero(&self) -> usize {
        self.eigs.partition_point(|&e| e < 0.0)
    }

    /// λ_k with the signed index convention (λ_{−1} < 0 < λ_0).
    pub fn indexed(&self, k: i64) -> Option<f64> {
        let pos = self.index_zero() as i64 + k;
        if pos < 0 {
            None
        } else {
            self.eigs.get(pos as usize).copied()
        }
    }
}

/// Spectrum of the finite operator: {N λ_j + 2πN k : k ∈ ℤ} ∩ [−window, window],
/// N the number of support angles.
pub fn lifted_spectrum(angles: &SupportPoints, window: f64) -> Result<SpectrumWindow> {
    if !(window > 0.0) {
        return Err(Error::domain(format!("window must be positive (got {window})")));
    }
    let n = angles.angles.len() as f64;
    let period = 2.0 * PI * n;
    let mut eigs = Vec::new();
    for &theta in &angles.angles {
        let base = n * theta;
        let k_lo = ((-window - base) / period).ceil() as i64;
        let k_hi = ((window - base) / period).floor() as i64;
        for k in k_lo..=k_hi {
            eigs.push(base + period * k as f64);
        }
    }
    SpectrumWindow::new(eigs, window)
}

/// Regularized secular product with its truncation diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SecularValue {
    pub value: C64,
    /// Crude bound on the relative error from eigenvalues beyond tail_cut:
    /// the omitted factors are 1 + O(z²/λ²) each.
    pub truncation_bound: f64,
}

/// ζ(z) ≈ e^{−z·trace} Π_{|λ_k| ≤ tail_cut} (1 − z/λ_k) e^{z/λ_k}.
pub fn secular_from_spectrum(
    trace: f64,
    eigs: &SpectrumWindow,
    z: C64,
    tail_cut: f64,
) -> Result<SecularValue> {
    if tail_cut < 10.0 * z.norm() {
        return Err(Error::domain(format!(
            "tail_cut = {tail_cut} must be at least 10·|z| = {}; truncation too aggressive",
            10.0 * z.norm()
        )));
    }
    if eigs.window < tail_cut {
        return Err(Error::domain(format!(
            "spectrum window {} does not cover tail_cut {tail_cut}",
            eigs.window
        )));
    }
    let mut log_acc = -z * trace;
    let mut used = 0usize;
    for &lam in &eigs.eigs {
        if lam.abs() <= tail_cut {
            let zl = z / lam;
            log_acc += (C64::new(1.0, 0.0) - zl).ln() + zl;
            used += 1;
        }
    }
    let value = log_acc.exp();
    // Tail estimate from the observed eigenvalue density.
    let density = used as f64 / (2.0 * tail_cut);
    let tail_sum = 2.0 * density / tail_cut;
    let truncation_bound = value.norm() * z.norm_sqr() * tail_sum;
    Ok(SecularValue { value, truncation_bound })
}

/// Time reversal: path t ↦ (−x(1−t), y(1−t)), endpoint and boundary rays
/// carried along (the boundary vectors pick up the reflection S = diag(−1,1)
/// and a swap, then are renormalized to u0ᵀJu1 = 1). Integral trace and
/// secular function are invariant.
pub fn reverse_operator(op: &DiracOperator) -> Result<DiracOperator> {
    let path = &op.path;
    let n = path.knots.len();
    // Reversed knots: interval [k_i, k_{i+1}) maps to (1−k_{i+1}, 1−k_i].
    let mut knots = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let t1 = if i + 1 < n { path.knots[i + 1] } else { 1.0 };
        knots.push(1.0 - t1);
        xs.push(-path.xs[i]);
        ys.push(path.ys[i]);
    }
    // New endpoint: −x(0⁺) reversed is −x at original time 0, i.e. 0 for
    // chain paths; in general the reversed path ends at −x(0).
    let q_new = -path.xs[0];
    let new_path = match path.kind {
        PathKind::Step => DrivingPath::step(xs, ys, q_new)?,
        PathKind::Sampled => DrivingPath::sampled(knots, xs, ys, q_new)?,
    };
    // Boundary rays: reflect and swap, then normalize the symplectic form.
    let s = |u: [f64; 2]| [-u[0], u[1]];
    let v0 = s(op.u1);
    let v1 = s(op.u0);
    let c = symplectic(v0, v1);
    if c.abs() < 1e-300 {
        return Err(Error::numerical("reversed boundary rays degenerate".to_string()));
    }
    DiracOperator::new(new_path, v0, [v1[0] / c, v1[1] / c])
}

/// Rotation by `angle`: Q = [[cos, −sin],[sin, cos]] acts on the path by the
/// Möbius map z ↦ (z cos − sin)/(z sin + cos) of the upper half plane (the
/// elliptic rotation fixing i) and on the boundary vectors directly; QᵀJQ = J
/// keeps the normalization. Trace and secular values are invariant.
pub fn rotate_operator(op: &DiracOperator, angle: f64) -> Result<DiracOperator> {
    let (c, s) = (angle.cos(), angle.sin());
    let moebius = |x: f64, y: f64| -> Result<(f64, f64)> {
        let z = C64::new(x, y);
        let den = z * s + c;
        if den.norm() < 1e-150 {
            return Err(Error::numerical("rotation sends a path point to infinity".to_string()));
        }
        let w = (z * c - s) / den;
        Ok((w.re, w.im))
    };
    let path = &op.path;
    let mut xs = Vec::with_capacity(path.xs.len());
    let mut ys = Vec::with_capacity(path.ys.len());
    for i in 0..path.xs.len() {
        let (x, y) = moebius(path.xs[i], path.ys[i])?;
        xs.push(x);
        ys.push(y);
    }
    let den_q = path.q * s + c;
    if den_q.abs() < 1e-12 {
        return Err(Error::numerical("rotation sends the endpoint q to infinity".to_string()));
    }
    let q_new = (path.q * c - s) / den_q;
    let new_path = match path.kind {
        PathKind::Step => DrivingPath::step(xs, ys, q_new)?,
        PathKind::Sampled => DrivingPath::sampled(path.knots.clone(), xs, ys, q_new)?,
    };
    let rot = |u: [f64; 2]| [c * u[0] - s * u[1], s * u[0] + c * u[1]];
    DiracOperator::new(new_path, rot(op.u0), rot(op.u1))
}
