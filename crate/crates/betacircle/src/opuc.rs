//! Verblunsky-coefficient generation for both ensembles, Szegő recursions,
//! characteristic polynomials, and support-point extraction.
//!
//! A finitely supported probability measure μ on the unit circle with N
//! support points is encoded by its modified Verblunsky coefficients
//! γ_0..γ_{N−1} (|γ_k| < 1 for k < N−1, |γ_{N−1}| = 1). The monic orthogonal
//! polynomials Φ_k and their reversals Φ*_k satisfy the Szegő recursion
//!
//! ```text
//! (Φ_{k+1}, Φ*_{k+1})ᵀ = A_k · diag(z, 1) · (Φ_k, Φ*_k)ᵀ,
//! A_k = [[1, −ᾱ_k], [−α_k, 1]],
//! ```
//!
//! while the polynomials normalized at 1, Ψ_k = Φ_k/Φ_k(1), satisfy the same
//! recursion with the matrix Ã_k expressed directly in the γ's. The top
//! normalized polynomial Ψ_N is the characteristic polynomial of μ normalized
//! at 1, and its roots e^{iθ_j} are the support of μ.

use crate::distributions::{sample_beta_tilde, sample_theta, DeltaParam};
use crate::error::{Error, Result};
use crate::C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Which ensemble a coefficient sequence was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EnsembleTag {
    /// Circular Jacobi: n points, parameters (β, δ).
    Cj { n: usize, beta: f64, delta: DeltaParam },
    /// Real orthogonal: 2n points closed under conjugation, parameters (β, a, b).
    Ro { n: usize, beta: f64, a: f64, b: f64 },
    /// Hand-built fixture (tests, CLI replay).
    Fixture,
}

/// Modified Verblunsky coefficients γ_0..γ_{N−1} of a finitely supported measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerblunskySeq {
    pub gammas: Vec<C64>,
    pub tag: EnsembleTag,
}

impl VerblunskySeq {
    /// Build from explicit coefficients, enforcing the modulus invariants.
    pub fn from_gammas(gammas: Vec<C64>, tag: EnsembleTag) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::domain("need at least one coefficient".to_string()));
        }
        let n = gammas.len();
        for (k, g) in gammas.iter().enumerate() {
            if k + 1 < n && g.norm() >= 1.0 {
                return Err(Error::domain(format!(
                    "|gamma_{k}| = {} must be < 1 before the final coefficient",
                    g.norm()
                )));
            }
        }
        if (gammas[n - 1].norm() - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!(
                "|gamma_{}| = {} must equal 1",
                n - 1,
                gammas[n - 1].norm()
            )));
        }
        Ok(VerblunskySeq { gammas, tag })
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn is_ro(&self) -> bool {
        matches!(self.tag, EnsembleTag::Ro { .. })
    }

    /// Plain Verblunsky coefficients α_k, inverting
    /// γ_k = ᾱ_k ∏_{j<k} (1−γ̄_j)/(1−γ_j). The product has modulus one, so
    /// |α_k| = |γ_k|.
    pub fn alphas(&self) -> Vec<C64> {
        let mut alphas = Vec::with_capacity(self.gammas.len());
        let mut phase = C64::new(1.0, 0.0); // ∏_{j<k} (1−γ̄_j)/(1−γ_j)
        for &g in &self.gammas {
            // ᾱ_k = γ_k / phase  ⇒  α_k = γ̄_k / conj(phase) = γ̄_k · phase
            alphas.push(g.conj() * phase);
            phase *= (C64::new(1.0, 0.0) - g.conj()) / (C64::new(1.0, 0.0) - g);
        }
        alphas
    }
}

/// Sample the circular Jacobi coefficient sequence:
/// γ_k ~ Θ(β(n−k−1)+1, δ) independent, k = 0..n−1.
pub fn cj_verblunsky(
    n: usize,
    beta: f64,
    delta: DeltaParam,
    rng: &mut impl Rng,
) -> Result<VerblunskySeq> {
    if n < 1 {
        return Err(Error::domain("n must be >= 1".to_string()));
    }
    if !(beta > 0.0) {
        return Err(Error::domain(format!("beta must be positive (got {beta})")));
    }
    let mut gammas = Vec::with_capacity(n);
    for k in 0..n {
        let a = beta * (n - k - 1) as f64;
        gammas.push(sample_theta(a, delta, rng)?.value);
    }
    VerblunskySeq::from_gammas(gammas, EnsembleTag::Cj { n, beta, delta })
}

/// Sample the real orthogonal coefficient sequence: 2n real coefficients,
/// even-index k ~ B̃(β(2n−k+2a)/4, β(2n−k+2b)/4), odd-index
/// k ~ B̃(β(2n−k+2a+2b+1)/4, β(2n−k−1)/4), and α_{2n−1} = −1. The modified
/// coefficients agree with the plain ones (all real): γ_k = α_k.
pub fn ro_verblunsky(
    n: usize,
    beta: f64,
    a: f64,
    b: f64,
    rng: &mut impl Rng,
) -> Result<VerblunskySeq> {
    if n < 1 {
        return Err(Error::domain("n must be >= 1".to_string()));
    }
    if !(beta > 0.0) {
        return Err(Error::domain(format!("beta must be positive (got {beta})")));
    }
    if !(a > -1.0) || !(b > -1.0) {
        return Err(Error::domain(format!("a, b must exceed -1 (got a={a}, b={b})")));
    }
    let big_n = 2 * n;
    let mut gammas = Vec::with_capacity(big_n);
    for k in 0..big_n - 1 {
        let r = (big_n - k) as f64;
        let x = if k % 2 == 0 {
            sample_beta_tilde(beta * (r + 2.0 * a) / 4.0, beta * (r + 2.0 * b) / 4.0, rng)?
        } else {
            sample_beta_tilde(
                beta * (r + 2.0 * a + 2.0 * b + 1.0) / 4.0,
                beta * (r - 1.0) / 4.0,
                rng,
            )?
        };
        gammas.push(C64::new(x, 0.0));
    }
    gammas.push(C64::new(-1.0, 0.0));
    VerblunskySeq::from_gammas(gammas, EnsembleTag::Ro { n, beta, a, b })
}

/// Evaluate (Φ_k(z), Φ*_k(z)) for k = `upto` by the Szegő recursion.
pub fn szego_eval(seq: &VerblunskySeq, z: C64, upto: usize) -> Result<(C64, C64)> {
    let (phi, star, _, _) = szego_eval_deriv(seq, z, upto)?;
    Ok((phi, star))
}

/// Evaluate (Φ_k, Φ*_k, Φ'_k, Φ*'_k) at z by the Szegő recursion with the
/// derivative recursion run alongside.
pub fn szego_eval_deriv(
    seq: &VerblunskySeq,
    z: C64,
    upto: usize,
) -> Result<(C64, C64, C64, C64)> {
    if upto > seq.len() {
        return Err(Error::domain(format!(
            "upto = {upto} exceeds sequence length {}",
            seq.len()
        )));
    }
    let alphas = seq.alphas();
    let one = C64::new(1.0, 0.0);
    let (mut phi, mut star) = (one, one);
    let (mut dphi, mut dstar) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for &alpha in alphas.iter().take(upto) {
        let zphi = z * phi;
        let dzphi = phi + z * dphi;
        let new_phi = zphi - alpha.conj() * star;
        let new_star = -alpha * zphi + star;
        let new_dphi = dzphi - alpha.conj() * dstar;
        let new_dstar = -alpha * dzphi + dstar;
        phi = new_phi;
        star = new_star;
        dphi = new_dphi;
        dstar = new_dstar;
    }
    Ok((phi, star, dphi, dstar))
}

/// Evaluate Ψ_N(z) = p_μ(z), the characteristic polynomial normalized at 1,
/// via the Ã_k recursion in the γ's (no α reconstruction).
pub fn normalized_char_poly(seq: &VerblunskySeq, z: C64) -> Result<C64> {
    let one = C64::new(1.0, 0.0);
    let (mut psi, mut star) = (one, one);
    for (k, &g) in seq.gammas.iter().enumerate() {
        let d = one - g;
        if d.norm() < 1e-14 {
            return Err(Error::numerical(format!(
                "gamma_{k} = 1: support point at angle 0 (measure must give it no mass)"
            )));
        }
        let zpsi = z * psi;
        let new_psi = (zpsi - g * star) / d;
        let new_star = (-g.conj() * zpsi + star) / d.conj();
        psi = new_psi;
        star = new_star;
    }
    Ok(psi)
}

/// Evaluate the secular function of the finite operator:
/// ζ(z) = p_μ(e^{iz/N}) e^{−iz/2} with N the sequence length.
pub fn scaled_char_poly(seq: &VerblunskySeq, z: C64) -> Result<C64> {
    let n = seq.len() as f64;
    let i = C64::new(0.0, 1.0);
    let w = (i * z / n).exp();
    Ok(normalized_char_poly(seq, w)? * (-i * z / 2.0).exp())
}

/// Support of the measure: angles of the N roots of Φ_N, with per-root
/// residual diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportPoints {
    /// Sorted angles in (−π, π].
    pub angles: Vec<f64>,
    /// |Φ_N(e^{iθ_j})| after refinement.
    pub residuals: Vec<f64>,
    pub ro_tagged: bool,
}

/// All N roots of Φ_N as angles, found by Aberth–Ehrlich simultaneous
/// iteration started from a rotated uniform grid on the unit circle
/// (all roots lie on the circle and are a.s. simple), then polished with
/// Newton steps; each root must reach residual |Φ_N| < 1e−8.
pub fn support_points(seq: &VerblunskySeq) -> Result<SupportPoints> {
    let n = seq.len();
    let eval = |z: C64| szego_eval_deriv(seq, z, n).expect("upto = len is valid");

    // Initial guesses: uniform grid with an irrational rotation offset so we
    // never start exactly on a symmetric configuration.
    let mut roots: Vec<C64> = (0..n)
        .map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j as f64 + 0.381_966) / n as f64))
        .collect();

    let max_sweeps = 120;
    for _ in 0..max_sweeps {
        let mut max_step = 0.0_f64;
        let evals: Vec<(C64, C64)> = roots
            .iter()
            .map(|&z| {
                let (p, _, dp, _) = eval(z);
                (p, dp)
            })
            .collect();
        for i in 0..n {
            let (p, dp) = evals[i];
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { C64::new(1e-3, 0.0) };
            let mut repulsion = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = roots[i] - roots[j];
                    if d.norm() > 1e-300 {
                        repulsion += 1.0 / d;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 1e-300 { newton / denom } else { newton };
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-13 {
            break;
        }
    }

    // Newton polish and residual gate.
    let mut angles = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &root in &roots {
        let mut z = root;
        for _ in 0..8 {
            let (p, _, dp, _) = eval(z);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            z -= step;
            if step.norm() < 1e-15 {
                break;
            }
        }
        let (p, _, _, _) = eval(z);
        let res = p.norm();
        if res > 1e-8 || (z.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::numerical(format!(
                "root refinement failed: residual {res:.3e}, |z|-1 = {:.3e}",
                z.norm() - 1.0
            )));
        }
        angles.push(z.arg());
        residuals.push(res);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| angles[i].partial_cmp(&angles[j]).unwrap());
    let angles: Vec<f64> = order.iter().map(|&i| angles[i]).collect();
    let residuals: Vec<f64> = order.iter().map(|&i| residuals[i]).collect();
    for w in angles.windows(2) {
        if (w[1] - w[0]).abs() < 1e-10 {
            return Err(Error::numerical(format!(
                "eigenangle collision near {:.12} (ensembles are a.s. simple)",
                w[0]
            )));
        }
    }
    Ok(SupportPoints {
        angles,
        residuals,
        ro_tagged: seq.is_ro(),
    })
}

/// Map RO eigenangles to real Jacobi ensemble points x_j = (1 − cos θ_j)/2
/// in (0,1), taking one representative per ±θ pair.
pub fn jacobi_points(angles: &SupportPoints) -> Result<Vec<f64>> {
    if !angles.ro_tagged {
        return Err(Error::unsupported(
            "jacobi_points requires an RO-tagged angle set".to_string(),
        ));
    }
    Ok(angles
        .angles
        .iter()
        .filter(|&&t| t > 0.0)
        .map(|&t| (1.0 - t.cos()) / 2.0)
        .collect())
}

/// Norms squared of the monic orthogonal polynomials:
/// ‖Φ_k‖² = ∏_{j<k} (1 − |α_j|²).
pub fn monic_norms_sq(seq: &VerblunskySeq) -> Vec<f64> {
    let mut norms = Vec::with_capacity(seq.len() + 1);
    let mut acc = 1.0;
    norms.push(acc);
    for g in &seq.gammas {
        acc *= 1.0 - g.norm_sqr();
        norms.push(acc);
    }
    norms
}

/// Weights of the measure encoded by the sequence, at its support points:
/// the Christoffel weights w_j = 1 / Σ_{k<N} |Φ_k(z_j)|²/‖Φ_k‖².
pub fn christoffel_weights(seq: &VerblunskySeq, support: &SupportPoints) -> Result<Vec<f64>> {
    let n = seq.len();
    let norms = monic_norms_sq(seq);
    let mut weights = Vec::with_capacity(n);
    for &theta in &support.angles {
        let z = C64::from_polar(1.0, theta);
        let mut sum = 0.0;
        for k in 0..n {
            let (phi, _) = szego_eval(seq, z, k)?;
            sum += phi.norm_sqr() / norms[k];
        }
        weights.push(1.0 / sum);
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use rand::Rng;

    fn random_cj(n: usize, seed: u64) -> VerblunskySeq {
        let delta = DeltaParam::new(0.5, 0.25).unwrap();
        cj_verblunsky(n, 2.0, delta, &mut RngStream::new(seed, 0).rng()).unwrap()
    }

    #[test]
    fn cj_single_coefficient_on_circle() {
        let seq = random_cj(1, 5);
        assert_eq!(seq.len(), 1);
        assert!((seq.gammas[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cj_moduli_invariants() {
        let seq = random_cj(8, 6);
        for k in 0..7 {
            assert!(seq.gammas[k].norm() < 1.0);
        }
        assert!((seq.gammas[7].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cj_mean_zero_at_delta_zero() {
        let mut rng = RngStream::new(7, 0).rng();
        let reps = 20_000;
        let mut sum = C64::new(0.0, 0.0);
        for _ in 0..reps {
            let seq = cj_verblunsky(4, 2.0, DeltaParam::zero(), &mut rng).unwrap();
            sum += seq.gammas[1];
        }
        let mean = sum / reps as f64;
        assert!(mean.norm() < 4.0 / (reps as f64).sqrt());
    }

    #[test]
    fn ro_structure() {
        let mut rng = RngStream::new(8, 0).rng();
        let seq = ro_verblunsky(4, 2.0, 0.5, 1.5, &mut rng).unwrap();
        assert_eq!(seq.len(), 8);
        assert_eq!(seq.gammas[7], C64::new(-1.0, 0.0));
        for (k, g) in seq.gammas.iter().enumerate() {
            assert_eq!(g.im, 0.0);
            if k < 7 {
                assert!(g.norm() < 1.0);
            }
        }
    }

    #[test]
    fn ro_even_coefficients_mean_zero_when_a_equals_b() {
        let mut rng = RngStream::new(9, 0).rng();
        let reps = 20_000;
        let mut sum = 0.0;
        for _ in 0..reps {
            let seq = ro_verblunsky(3, 2.0, 0.7, 0.7, &mut rng).unwrap();
            sum += seq.gammas[2].re;
        }
        assert!((sum / reps as f64).abs() < 4.0 / (reps as f64).sqrt());
    }

    #[test]
    fn alphas_preserve_modulus() {
        let seq = random_cj(10, 10);
        for (a, g) in seq.alphas().iter().zip(&seq.gammas) {
            assert!((a.norm() - g.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn szego_first_steps() {
        let seq = random_cj(3, 11);
        let z = C64::new(0.3, -0.8);
        let (phi0, star0) = szego_eval(&seq, z, 0).unwrap();
        assert_eq!((phi0, star0), (C64::new(1.0, 0.0), C64::new(1.0, 0.0)));
        let (phi1, _) = szego_eval(&seq, z, 1).unwrap();
        let alpha0 = seq.alphas()[0];
        assert!((phi1 - (z - alpha0.conj())).norm() < 1e-14);
        assert!(szego_eval(&seq, z, 4).is_err());
    }

    #[test]
    fn reversed_polynomial_modulus_on_circle() {
        let seq = random_cj(6, 12);
        let mut rng = RngStream::new(13, 0).rng();
        for _ in 0..50 {
            let z = C64::from_polar(1.0, rng.gen::<f64>() * 6.28);
            let (phi, star) = szego_eval(&seq, z, 5).unwrap();
            assert!((phi.norm() - star.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn monic_leading_coefficient() {
        // Finite differences at N+1 points recover a monic degree-N polynomial:
        // the N-th divided difference of Φ_N on any N+1 nodes equals 1.
        let seq = random_cj(5, 14);
        let n = seq.len();
        let nodes: Vec<C64> = (0..=n).map(|j| C64::new(j as f64 * 0.37 - 1.0, 0.1)).collect();
        // Divided differences.
        let mut table: Vec<C64> = nodes
            .iter()
            .map(|&z| szego_eval(&seq, z, n).unwrap().0)
            .collect();
        for level in 1..=n {
            for i in 0..=(n - level) {
                table[i] = (table[i + 1] - table[i]) / (nodes[i + level] - nodes[i]);
            }
        }
        assert!((table[0] - C64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn char_poly_normalized_at_one() {
        let seq = random_cj(7, 15);
        let p1 = normalized_char_poly(&seq, C64::new(1.0, 0.0)).unwrap();
        assert!((p1 - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn char_poly_single_root_at_minus_one() {
        let seq = VerblunskySeq::from_gammas(vec![C64::new(-1.0, 0.0)], EnsembleTag::Fixture).unwrap();
        let z = C64::new(0.4, 1.1);
        let p = normalized_char_poly(&seq, z).unwrap();
        assert!((p - (z + 1.0) / 2.0).norm() < 1e-14);
        // Scaled version with angle π: cos(z/2).
        let zz = C64::new(1.3, -0.4);
        let s = scaled_char_poly(&seq, zz).unwrap();
        assert!((s - (zz / 2.0).cos()).norm() < 1e-12);
    }

    #[test]
    fn char_poly_matches_root_product() {
        let seq = random_cj(8, 16);
        let support = support_points(&seq).unwrap();
        let z = C64::new(0.7, 0.4);
        let mut prod = C64::new(1.0, 0.0);
        for &t in &support.angles {
            let root = C64::from_polar(1.0, t);
            prod *= (z - root) / (C64::new(1.0, 0.0) - root);
        }
        let p = normalized_char_poly(&seq, z).unwrap();
        assert!((p - prod).norm() < 1e-8, "p = {p}, product = {prod}");
    }

    #[test]
    fn support_single_point() {
        let seq = VerblunskySeq::from_gammas(vec![C64::new(-1.0, 0.0)], EnsembleTag::Fixture).unwrap();
        let s = support_points(&seq).unwrap();
        assert_eq!(s.angles.len(), 1);
        assert!((s.angles[0].abs() - std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn support_n1_is_gamma_angle() {
        // For n = 1 the single root of Φ_1(z) = z − ᾱ_0 is ᾱ_0 = γ_0.
        let seq = random_cj(1, 17);
        let s = support_points(&seq).unwrap();
        assert!((s.angles[0] - seq.gammas[0].arg()).abs() < 1e-10);
    }

    #[test]
    fn ro_support_symmetric_and_jacobi_map() {
        let mut rng = RngStream::new(18, 0).rng();
        let seq = ro_verblunsky(4, 2.0, 0.0, 0.5, &mut rng).unwrap();
        let s = support_points(&seq).unwrap();
        assert_eq!(s.angles.len(), 8);
        // Closed under negation.
        for &t in &s.angles {
            assert!(
                s.angles.iter().any(|&u| (u + t).abs() < 1e-8),
                "no mirror for angle {t}"
            );
        }
        let xs = jacobi_points(&s).unwrap();
        assert_eq!(xs.len(), 4);
        for &x in &xs {
            assert!((0.0..1.0).contains(&x));
        }
        // Known values of the map.
        assert!((1.0 - (std::f64::consts::FRAC_PI_2.cos())) / 2.0 - 0.5 < 1e-15);
        // Non-RO input rejected.
        let cj = random_cj(2, 19);
        let scj = support_points(&cj).unwrap();
        assert!(jacobi_points(&scj).is_err());
    }

    #[test]
    fn support_points_larger_n() {
        let seq = random_cj(32, 20);
        let s = support_points(&seq).unwrap();
        assert_eq!(s.angles.len(), 32);
        assert!(s.residuals.iter().all(|&r| r < 1e-8));
    }

    /// Gram–Schmidt on monomials in L²(μ) (μ = support points + Christoffel
    /// weights) must reproduce the Szegő-recursion polynomials.
    #[test]
    fn gram_schmidt_recovers_szego_polynomials() {
        for seed in [21, 22, 23] {
            for n in 2..=4 {
                let seq = random_cj(n, seed);
                let support = support_points(&seq).unwrap();
                let weights = christoffel_weights(&seq, &support).unwrap();
                assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                let zs: Vec<C64> = support.angles.iter().map(|&t| C64::from_polar(1.0, t)).collect();
                let inner = |f: &[C64], g: &[C64]| -> C64 {
                    (0..n).map(|j| weights[j] * f[j] * g[j].conj()).sum()
                };
                // Orthogonalize 1, z, ..., z^{n-1}, and the top monomial z^n,
                // as value vectors on the support; compare with Φ_k values.
                let mut basis: Vec<Vec<C64>> = Vec::new(); // Φ_0..Φ_{k}
                for k in 0..=n {
                    let mut vk: Vec<C64> = zs.iter().map(|&z| z.powu(k as u32)).collect();
                    for b in &basis {
                        let nb = inner(b, b);
                        if nb.norm() > 1e-13 {
                            let coef = inner(&vk, b) / nb;
                            for j in 0..n {
                                vk[j] -= coef * b[j];
                            }
                        }
                    }
                    // Compare with the recursion evaluation at each support point.
                    for j in 0..n {
                        let (phi, _) = szego_eval(&seq, zs[j], k).unwrap();
                        // Φ_n vanishes on the support; GS of z^n yields 0 too.
                        let want = if k == n { C64::new(0.0, 0.0) } else { phi };
                        assert!(
                            (vk[j] - want).norm() < 1e-8,
                            "n={n} k={k} j={j}: GS {} vs recursion {}",
                            vk[j],
                            want
                        );
                    }
                    basis.push(vk);
                }
            }
        }
    }
}
