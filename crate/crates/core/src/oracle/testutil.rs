//! Shared, lazily-computed radial shoots for the oracle tests.  A shoot at
//! p = 200 walks ~60k log-radius steps per bisection probe, so fixtures are
//! computed once per test process and handed out by reference.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::shoot::{shoot, RadialSolution};

static CACHE: OnceLock<Mutex<HashMap<(u64, u64), &'static RadialSolution>>> = OnceLock::new();

/// Unit-disk shoot at tolerance 1e−10, cached by (p, λ).
pub fn cached_shoot(p: f64, lambda: f64) -> &'static RadialSolution {
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (p.to_bits(), lambda.to_bits());
    let mut map = cache.lock().unwrap();
    map.entry(key).or_insert_with(|| {
        Box::leak(Box::new(
            shoot(p, lambda, 1.0, 1e-10).expect("fixture shoot must converge"),
        ))
    })
}
