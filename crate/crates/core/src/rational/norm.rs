use crate::num::Time;

/// Crossover for the series branch of [`y_norm_law`].
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// `‖y_t‖²` of a rational-time `E3` system: `t` when `c = 1`, otherwise
/// `(c^{2t} - 1)/(c² - 1)`.
///
/// The closed form is evaluated through `expm1` so it stays accurate near
/// `c = 1`; for `|c - 1| < 1e-6` a three-term expansion in `ε = ln c` is used,
/// `t (1 + (t-1) ε + (2t-1)(t-1) ε²/3)`.
pub fn y_norm_law(c: f64, t: Time) -> f64 {
    y_norm_law_f64(c, t.as_f64())
}

pub fn y_norm_law_f64(c: f64, t: f64) -> f64 {
    let d = (c - 1.0).abs();
    if d <= 1e-12 {
        t
    } else if d < SERIES_THRESHOLD {
        y_norm_series(c, t)
    } else {
        y_norm_exact(c, t)
    }
}

/// `(c^{2t} - 1)/(c² - 1)` without the small-`|c-1|` guard.
pub fn y_norm_exact(c: f64, t: f64) -> f64 {
    let e = c.ln();
    (2.0 * t * e).exp_m1() / (2.0 * e).exp_m1()
}

/// Three-term expansion of the law around `c = 1`.
pub fn y_norm_series(c: f64, t: f64) -> f64 {
    let e = (c - 1.0).ln_1p();
    t * (1.0 + (t - 1.0) * e + (2.0 * t - 1.0) * (t - 1.0) * e * e / 3.0)
}
