/// Huber loss of `pred` against `target` and its derivative with respect to `pred`.
///
/// Quadratic for `|e| <= delta`, linear beyond.
pub fn huber_loss_grad(pred: f64, target: f64, delta: f64) -> (f64, f64) {
    let e = pred - target;
    if e.abs() <= delta {
        (0.5 * e * e, e)
    } else {
        (delta * (e.abs() - 0.5 * delta), delta * e.signum())
    }
}

pub const DEFAULT_HUBER_DELTA: f64 = 1.0;
