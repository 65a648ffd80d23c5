use crate::measures::Expectation;

/// `W₂²(μₜ, δ₀) = ∫ x²/(1 + 2t x²) dμ₀` along the zero-diffusion flow
/// `ẋ = −x³`, whose solution is `x(t)² = x(0)²/(1 + 2t x(0)²)`.
pub fn quartic_zero_diffusion_w2<M: Expectation + ?Sized>(mu0: &M, t: f64) -> f64 {
    assert!(t >= 0.0, "time must be nonnegative");
    mu0.expectation(&|x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        r2 / (1.0 + 2.0 * t * r2)
    })
}
