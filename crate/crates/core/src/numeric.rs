//! Small numerical helpers shared by the engines.

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `√(π/2)`, the Gaussian half-line integral `∫₀^∞ e^{-t²/2} dt`.
pub const SQRT_HALF_PI: f64 = 1.253_314_137_315_500_3;

/// Largest `k` for which harmonic numbers are summed term by term.
pub const HARMONIC_DIRECT_LIMIT: u64 = 1_000_000;

/// Running products below this are treated as zero.
pub const PRODUCT_FLOOR: f64 = 1e-300;

/// `H_k = Σ_{l=1..k} 1/l`, with `H_0 = 0`.
///
/// Beyond [`HARMONIC_DIRECT_LIMIT`] the asymptotic expansion
/// `ln k + γ + 1/(2k) - 1/(12k²)` is used; its error there is below 1e-24.
pub fn harmonic(k: u64) -> f64 {
    if k <= HARMONIC_DIRECT_LIMIT {
        // smallest terms first
        (1..=k).rev().map(|l| 1.0 / l as f64).sum()
    } else {
        let k = k as f64;
        libm::log(k) + EULER_GAMMA + 0.5 / k - 1.0 / (12.0 * k * k)
    }
}

/// Two-sided 95% Student-t quantile `t_{0.975, df}`; the normal quantile
/// 1.96 is used once `df > 30`.
pub fn student_t_975(df: usize) -> f64 {
    const TABLE: [f64; 30] = [
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179,
        2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
        2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
    ];
    match df {
        0 => f64::INFINITY,
        1..=30 => TABLE[df - 1],
        _ => 1.959_963_984_540_054,
    }
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 when `y` has no variance.
    pub r_squared: f64,
}

/// Fits a line through `(x, y)` pairs. Returns `None` with fewer than two
/// points or when all `x` coincide.
pub fn fit_line(points: impl IntoIterator<Item = (f64, f64)> + Clone) -> Option<LineFit> {
    let (mut count, mut sum_x, mut sum_y) = (0usize, 0.0, 0.0);
    for (x, y) in points.clone() {
        count += 1;
        sum_x += x;
        sum_y += y;
    }
    if count < 2 {
        return None;
    }
    let mean_x = sum_x / count as f64;
    let mean_y = sum_y / count as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in points.clone() {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let sse: f64 = points
            .into_iter()
            .map(|(x, y)| {
                let e = y - (slope * x + intercept);
                e * e
            })
            .sum();
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    Some(LineFit {
        slope,
        intercept,
        r_squared,
    })
}
