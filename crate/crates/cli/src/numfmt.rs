//! Lossless float formatting for data files: 17 significant digits, so
//! every binary64 value round-trips exactly.

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
