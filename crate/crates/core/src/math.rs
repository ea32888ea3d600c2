/// Natural log, with zero and negative inputs mapped to `floor`.
#[inline]
pub(crate) fn log_or_floor(p: f64, floor: f64) -> f64 {
    if p > 0.0 {
        let l = libm::log(p);
        if l.is_finite() && l > floor {
            l
        } else {
            floor
        }
    } else {
        floor
    }
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}
