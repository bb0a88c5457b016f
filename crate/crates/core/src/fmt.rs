//! Deterministic float formatting for CSV and report output.

/// 17-significant-digit scientific formatting; round-trips any f64 bit
/// pattern and is byte-stable across runs. NaN serialises as "nan".
pub fn f64_full(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:.16e}", x)
}

/// FNV-1a hash of a byte string, hex-encoded; used to namespace output
/// directories by configuration.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}
