//! Derivative-free minimization: golden-section line search driven by
//! cyclic coordinate descent with a shrinking bracket.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a local minimum of `f` on `[lo, hi]`.
/// Returns `(x, f(x))` for the best point evaluated.
pub fn golden_section(f: &mut impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentSettings {
    pub max_sweeps: usize,
    /// Initial half-width of the bracket around each coordinate.
    pub initial_step: f64,
    /// Stop once the bracket half-width falls below this.
    pub min_step: f64,
    /// Golden-section iterations per coordinate.
    pub line_iters: usize,
}

impl Default for DescentSettings {
    fn default() -> Self {
        Self { max_sweeps: 400, initial_step: std::f64::consts::FRAC_PI_2, min_step: 1e-9, line_iters: 24 }
    }
}

/// Outcome of [`coordinate_descent`]; `history` holds the best value after each sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub sweeps: usize,
    pub history: Vec<f64>,
}

/// Minimizes `f` one coordinate at a time. A line-search result is accepted
/// only if it improves the current value, so the value never increases. The
/// bracket halves after every sweep that gains less than `1e-9` (relative).
/// `stop` is checked after each sweep for early termination.
pub fn coordinate_descent(
    f: &mut impl FnMut(&[f64]) -> f64,
    x0: Vec<f64>,
    settings: &DescentSettings,
    mut stop: impl FnMut(f64) -> bool,
) -> DescentResult {
    let mut x = x0;
    let mut value = f(&x);
    let mut step = settings.initial_step;
    let mut history = vec![value];
    let mut sweeps = 0;
    while sweeps < settings.max_sweeps && step >= settings.min_step && !stop(value) {
        let before = value;
        for c in 0..x.len() {
            let centre = x[c];
            let mut line = |t: f64| {
                x[c] = t;
                f(&x)
            };
            let (t, v) = golden_section(&mut line, centre - step, centre + step, settings.line_iters);
            if v < value {
                x[c] = t;
                value = v;
            } else {
                x[c] = centre;
            }
        }
        sweeps += 1;
        history.push(value);
        if before - value <= 1e-9 * (1.0 + before.abs()) {
            step *= 0.5;
        }
    }
    DescentResult { x, value, sweeps, history }
}
