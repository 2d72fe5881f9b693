//! Map an unconstrained 3-vector onto a valid two-outcome σ_x measurement.

use crate::protocols::PovmX;

const TAU: f64 = std::f64::consts::TAU;

/// Angle closest to `requested` whose doubled sine equals `target`.
/// Both solution families of sin(2φ) = t are scanned across the periods
/// adjacent to the request, so the projection moves φ as little as possible.
fn nearest_phi(requested: f64, target: f64) -> f64 {
    let base = target.clamp(-1.0, 1.0).asin();
    let mut best = f64::NAN;
    let mut best_dist = f64::INFINITY;
    for family in [base, std::f64::consts::PI - base] {
        let k = ((2.0 * requested - family) / TAU).round();
        for j in [k - 1.0, k, k + 1.0] {
            let cand = (family + TAU * j) / 2.0;
            let dist = (cand - requested).abs();
            if dist < best_dist {
                best_dist = dist;
                best = cand;
            }
        }
    }
    best
}

/// Decode (θ, φ₀, φ₁) into measurement amplitudes
///   m₀ = cosθ·cosφ₀, l₀ = cosθ·sinφ₀, m₁ = sinθ·cosφ₁, l₁ = sinθ·sinφ₁,
/// with all phases zero. The normalization identity holds for every input;
/// the cross identity m₀l₀ + m₁l₁ = 0 is restored by projecting φ₁ (or,
/// when outcome 1 carries too little weight to cancel outcome 0, by
/// projecting both angles) to the nearest values that satisfy it. Inputs
/// already on the constraint surface are returned unchanged.
pub fn decode_povm(x: &[f64; 3]) -> PovmX {
    let (theta, phi0_req, phi1_req) = (x[0], x[1], x[2]);
    let (st, ct) = theta.sin_cos();
    let c2 = ct * ct;
    let s2 = st * st;
    // cross identity ⇔ c²·sin(2φ₀) + s²·sin(2φ₁) = 0; the relative slack
    // keeps boundary inputs like θ = π/4 (where c² and s² differ by one
    // ulp) on this branch, and nearest_phi clamps the overshoot
    let u0 = (2.0 * phi0_req).sin();
    let (phi0, phi1) = if (c2 * u0).abs() <= s2 * (1.0 + 1e-12) {
        let target = if s2 == 0.0 { 0.0 } else { -c2 * u0 / s2 };
        (phi0_req, nearest_phi(phi1_req, target))
    } else {
        // outcome 1 saturates: push sin(2φ₁) to ∓1 and pull φ₀ the rest of
        // the way (safe: this branch implies c² > s², so |s²/c²| < 1)
        let s = u0.signum();
        (nearest_phi(phi0_req, s * s2 / c2), nearest_phi(phi1_req, -s))
    };
    let m = [ct * phi0.cos(), st * phi1.cos()];
    let l = [ct * phi0.sin(), st * phi1.sin()];
    PovmX::new(m, l, [0.0; 2], [0.0; 2])
        .expect("projected angles satisfy the measurement identities by construction")
}
