//! Exact samplers and closed-form moments for the coefficient distributions.
//!
//! Four families appear in the coefficient laws of the two ensembles:
//!
//! ```text
//! B̃(s,t)     density ∝ (1−x)^{s−1} (1+x)^{t−1}   on (−1,1)
//! B′(s,t)    density ∝ y^{s−1} (1+y)^{−s−t}       on (0,∞)
//! P_IV(m,μ)  density ∝ (1+x²)^{−m} e^{−μ arctan x} on ℝ        (m > 1/2)
//! Θ(a+1,δ)   on {|z|<1} for a > 0, on {|z|=1} for a = 0        (Re δ > −1/2)
//! ```
//!
//! B̃ and B′ are sampled exactly through Gamma ratios; Pearson IV by rejection
//! from a Student-t proposal of matching tail order; Θ through its exact
//! factorization into an independent B′ radial-type part and a Pearson IV
//! angular-type part.

use crate::error::{Error, Result};
use crate::special::ln_gamma;
use crate::C64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StudentT};
use serde::{Deserialize, Serialize};

/// Parameter δ = re + i·im of the circular Jacobi ensemble; requires Re δ > −1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaParam {
    pub re: f64,
    pub im: f64,
}

impl DeltaParam {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(re > -0.5) || !re.is_finite() || !im.is_finite() {
            return Err(Error::domain(format!(
                "Re delta must exceed -1/2 (got delta = {re} + {im}i)"
            )));
        }
        Ok(DeltaParam { re, im })
    }

    pub fn zero() -> Self {
        DeltaParam { re: 0.0, im: 0.0 }
    }

    pub fn as_complex(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// A draw from Θ(a+1,δ): strictly inside the unit disk for a > 0, on the unit
/// circle for a = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSample {
    pub value: C64,
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::domain(format!("{name} must be positive (got {v})")));
    }
    Ok(())
}

fn gamma_draw(shape: f64, rng: &mut impl Rng) -> f64 {
    // Gamma(shape, scale 1); rand_distr uses the exact Marsaglia-Tsang method.
    Gamma::new(shape, 1.0).expect("validated shape").sample(rng)
}

/// Sample B̃(s,t): density ∝ (1−x)^{s−1}(1+x)^{t−1} on (−1,1).
///
/// Uses the Gamma representation (X₂−X₁)/(X₁+X₂) with X₁ ~ Gamma(s),
/// X₂ ~ Gamma(t).
pub fn sample_beta_tilde(s: f64, t: f64, rng: &mut impl Rng) -> Result<f64> {
    require_positive("beta-tilde parameter s", s)?;
    require_positive("beta-tilde parameter t", t)?;
    let x1 = gamma_draw(s, rng);
    let x2 = gamma_draw(t, rng);
    Ok((x2 - x1) / (x1 + x2))
}

/// Mean of B̃(s,t): (t−s)/(s+t).
pub fn beta_tilde_mean(s: f64, t: f64) -> f64 {
    (t - s) / (s + t)
}

/// Variance of B̃(s,t): 4st / ((s+t)²(s+t+1)).
pub fn beta_tilde_var(s: f64, t: f64) -> f64 {
    4.0 * s * t / ((s + t) * (s + t) * (s + t + 1.0))
}

/// Sample B′(s,t): density ∝ y^{s−1}(1+y)^{−s−t} on (0,∞), as the ratio
/// X₁/X₂ of independent Gamma(s), Gamma(t) draws.
pub fn sample_beta_prime(s: f64, t: f64, rng: &mut impl Rng) -> Result<f64> {
    require_positive("beta-prime parameter s", s)?;
    require_positive("beta-prime parameter t", t)?;
    Ok(gamma_draw(s, rng) / gamma_draw(t, rng))
}

/// k-th moment of B′(s,t): Γ(s+k)Γ(t−k) / (Γ(s)Γ(t)), valid for −s < k < t.
pub fn beta_prime_moment(s: f64, t: f64, k: f64) -> Result<f64> {
    require_positive("beta-prime parameter s", s)?;
    require_positive("beta-prime parameter t", t)?;
    if !(k > -s && k < t) {
        return Err(Error::domain(format!(
            "beta-prime moment order k must satisfy -s < k < t (s={s}, t={t}, k={k})"
        )));
    }
    Ok((ln_gamma(s + k) + ln_gamma(t - k) - ln_gamma(s) - ln_gamma(t)).exp())
}

/// Sample P_IV(m,μ): density ∝ (1+x²)^{−m} e^{−μ arctan x}, m > 1/2.
///
/// Rejection from a Student-t proposal with ν = 2m−1 degrees of freedom, whose
/// density is ∝ (1+x²/ν)^{−m} — the same tail order 2m as the target — with
/// the analytic envelope constant max(1, ν^{−m})·e^{|μ|π/2}.
pub fn sample_pearson4(m: f64, mu: f64, rng: &mut impl Rng) -> Result<f64> {
    if !(m > 0.5) || !m.is_finite() || !mu.is_finite() {
        return Err(Error::domain(format!(
            "pearson4 requires m > 1/2 (got m={m}, mu={mu})"
        )));
    }
    let nu = 2.0 * m - 1.0;
    let proposal = StudentT::new(nu).expect("validated dof");
    // log of the envelope constant M with f*/g* ≤ M.
    let log_m = (-m * nu.ln()).max(0.0) + mu.abs() * std::f64::consts::FRAC_PI_2;
    loop {
        let x: f64 = proposal.sample(rng);
        // log(f*/g*) = m·[ln(1+x²/ν) − ln(1+x²)] − μ·arctan x
        let log_ratio = m * ((1.0 + x * x / nu).ln() - (1.0 + x * x).ln()) - mu * x.atan();
        let u: f64 = rng.gen::<f64>();
        if u.ln() < log_ratio - log_m {
            return Ok(x);
        }
    }
}

/// Mean of P_IV(m,μ): −μ/(2m−2), for m > 3/2.
pub fn pearson4_mean(m: f64, mu: f64) -> Result<f64> {
    if !(m > 1.5) {
        return Err(Error::domain(format!("pearson4 mean needs m > 3/2 (got {m})")));
    }
    Ok(-mu / (2.0 * m - 2.0))
}

/// Second moment of P_IV(m,μ): (2m−2+μ²)/((2m−2)(2m−3)), for m > 3/2.
pub fn pearson4_second_moment(m: f64, mu: f64) -> Result<f64> {
    if !(m > 1.5) {
        return Err(Error::domain(format!(
            "pearson4 second moment needs m > 3/2 (got {m})"
        )));
    }
    Ok((2.0 * m - 2.0 + mu * mu) / ((2.0 * m - 2.0) * (2.0 * m - 3.0)))
}

/// Fourth moment of P_IV(m,μ), valid only for m > 5/2:
/// (12(m+(μ²−3)/2)² − 2μ⁴ − 2μ² − 3) / ((2m−5)(2m−4)(2m−3)(2m−2)).
pub fn pearson4_fourth_moment(m: f64, mu: f64) -> Result<f64> {
    if !(m > 2.5) {
        return Err(Error::domain(format!(
            "pearson4 fourth moment needs m > 5/2 (got {m})"
        )));
    }
    let num = 12.0 * (m + (mu * mu - 3.0) / 2.0).powi(2) - 2.0 * mu.powi(4) - 2.0 * mu * mu - 3.0;
    let den = (2.0 * m - 5.0) * (2.0 * m - 4.0) * (2.0 * m - 3.0) * (2.0 * m - 2.0);
    Ok(num / den)
}

/// Invert 2γ/(1−γ) = w − iv for γ: γ = (w−iv)/(2+w−iv).
///
/// The pole (w,v) = (−2,0) corresponds to γ = ∞ and is rejected.
pub fn gamma_from_wv(w: f64, v: f64) -> Result<C64> {
    let num = C64::new(w, -v);
    let den = C64::new(2.0 + w, -v);
    if den.norm() == 0.0 {
        return Err(Error::numerical(
            "gamma_from_wv pole at (w,v) = (-2,0): gamma is infinite".to_string(),
        ));
    }
    Ok(num / den)
}

/// Forward map γ ↦ (w, v) with 2γ/(1−γ) = w − iv.
pub fn wv_from_gamma(gamma: C64) -> (f64, f64) {
    let z = 2.0 * gamma / (C64::new(1.0, 0.0) - gamma);
    (z.re, -z.im)
}

/// Sample Θ(a+1,δ) through the exact factorization: for a > 0,
/// 1+w ~ B′(a/2, a/2+2Reδ+1) and v/(2+w) ~ P_IV(a/2+Reδ+1, −2Imδ) are
/// independent; for a = 0, w ≡ −1 and v ~ P_IV(Reδ+1, −2Imδ), giving |γ| = 1.
pub fn sample_theta(a: f64, delta: DeltaParam, rng: &mut impl Rng) -> Result<ThetaSample> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("theta shape a must be >= 0 (got {a})")));
    }
    let m = a / 2.0 + delta.re + 1.0;
    let mu = -2.0 * delta.im;
    let z = sample_pearson4(m, mu, rng)?;
    let w = if a > 0.0 {
        sample_beta_prime(a / 2.0, a / 2.0 + 2.0 * delta.re + 1.0, rng)? - 1.0
    } else {
        -1.0
    };
    let v = z * (2.0 + w);
    let value = gamma_from_wv(w, v)?;
    Ok(ThetaSample { value })
}

/// Mean of the w-statistic of a Θ(a+1,δ) draw: −4Reδ / (a + 4Reδ).
///
/// With a = β(n−k−1) this is the closed-form k-th coefficient mean of the
/// circular Jacobi chain.
pub fn theta_w_mean(a: f64, delta: DeltaParam) -> f64 {
    -4.0 * delta.re / (a + 4.0 * delta.re)
}

/// Second moment of the w-statistic: (4a − 8Reδ + 16Reδ²) / ((a+4Reδ−2)(a+4Reδ)).
pub fn theta_w_second_moment(a: f64, delta: DeltaParam) -> f64 {
    let d = delta.re;
    (4.0 * a - 8.0 * d + 16.0 * d * d) / ((a + 4.0 * d - 2.0) * (a + 4.0 * d))
}

/// Mean of the v-statistic: 4Imδ / (a + 4Reδ).
pub fn theta_v_mean(a: f64, delta: DeltaParam) -> f64 {
    4.0 * delta.im / (a + 4.0 * delta.re)
}

/// Second moment of the v-statistic: (4a + 8Reδ + 16Imδ²) / ((a+4Reδ−2)(a+4Reδ)).
pub fn theta_v_second_moment(a: f64, delta: DeltaParam) -> f64 {
    (4.0 * a + 8.0 * delta.re + 16.0 * delta.im * delta.im)
        / ((a + 4.0 * delta.re - 2.0) * (a + 4.0 * delta.re))
}

/// Dirichlet(α,…,α) weights of length n via normalized Gamma draws.
pub fn sample_dirichlet(alpha: f64, n: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
    require_positive("dirichlet concentration", alpha)?;
    if n == 0 {
        return Err(Error::domain("dirichlet length must be >= 1".to_string()));
    }
    let mut w: Vec<f64> = (0..n).map(|_| gamma_draw(alpha, rng)).collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    Ok(w)
}

/// Unnormalized angular density of Θ(1,δ) at angle θ ∈ (−π, π):
/// exp(2 Re(δ · Log(1 − e^{−iθ}))).
pub fn theta1_angular_density(theta: f64, delta: DeltaParam) -> f64 {
    let z = C64::new(1.0, 0.0) - C64::from_polar(1.0, -theta);
    (2.0 * (delta.as_complex() * z.ln()).re).exp()
}

/// Numerically integrated CDF of the Θ(1,δ) eigenangle on (−π, π), evaluated
/// on a uniform grid; used as an independent quadrature oracle in tests.
pub struct Theta1AngleCdf {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl Theta1AngleCdf {
    pub fn new(delta: DeltaParam, points: usize) -> Self {
        // Density has integrable endpoint behavior only for Re δ > -1/2 and an
        // (integrable) singularity at θ = 0 when Re δ < 0; composite midpoint
        // on a fine uniform grid is adequate for KS comparisons at 1e-6.
        let n = points.max(1024);
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let mut grid = Vec::with_capacity(n + 1);
        let mut cdf = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        grid.push(-std::f64::consts::PI);
        cdf.push(0.0);
        for i in 0..n {
            let mid = -std::f64::consts::PI + (i as f64 + 0.5) * h;
            acc += theta1_angular_density(mid, delta) * h;
            grid.push(-std::f64::consts::PI + (i as f64 + 1.0) * h);
            cdf.push(acc);
        }
        let total = acc;
        for c in &mut cdf {
            *c /= total;
        }
        Theta1AngleCdf { grid, cdf }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        if theta <= self.grid[0] {
            return 0.0;
        }
        if theta >= *self.grid.last().unwrap() {
            return 1.0;
        }
        let idx = match self
            .grid
            .binary_search_by(|g| g.partial_cmp(&theta).unwrap())
        {
            Ok(i) => return self.cdf[i],
            Err(i) => i,
        };
        let (g0, g1) = (self.grid[idx - 1], self.grid[idx]);
        let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
        c0 + (c1 - c0) * (theta - g0) / (g1 - g0)
    }
}
