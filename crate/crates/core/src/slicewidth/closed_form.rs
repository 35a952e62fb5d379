/// Slice width of the spiked model Σ = I + λ·P in closed form.
///
/// With Σ̄ having eigenvalue 1 on the spike and 1/(1+λ) elsewhere, and
/// w₁, w₂ the norms of h on the spike and on its complement, the width at
/// standardized radius α is
///
/// ```text
/// max  w₁√a + w₂√(α² − a)   over  a ∈ [max(0, ((1+λ)α² − 1)/λ), α²],
/// ```
///
/// a concave problem whose unconstrained optimum a* = α²w₁²/(w₁² + w₂²) is
/// simply clamped to the interval.
pub fn two_group_width_closed_form(w1: f64, w2: f64, lambda: f64, alpha: f64) -> f64 {
    let alpha_sq = alpha * alpha;
    let lower = (((1.0 + lambda) * alpha_sq - 1.0) / lambda).max(0.0).min(alpha_sq);
    let norm_sq = w1 * w1 + w2 * w2;
    let unconstrained = if norm_sq > 0.0 {
        alpha_sq * w1 * w1 / norm_sq
    } else {
        alpha_sq
    };
    let a = unconstrained.clamp(lower, alpha_sq);
    w1 * a.sqrt() + w2 * (alpha_sq - a).max(0.0).sqrt()
}
