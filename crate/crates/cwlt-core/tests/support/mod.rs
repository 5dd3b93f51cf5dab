//! Shared helpers for the integration suites: an independent quadrature
//! oracle and a pass/fail line printer.

use num_complex::Complex64;

/// Composite Simpson quadrature of a complex integrand over [a, b] with
/// `2 * n_panels + 1` nodes. Independent of the closed forms it checks.
pub fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n_panels: usize) -> Complex64 {
    let n = 2 * n_panels;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(a + j as f64 * h) * w;
    }
    acc * (h / 3.0)
}

/// Prints one acceptance line and panics on failure.
pub fn check(name: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {name}: {detail}");
    assert!(pass, "{name}: {detail}");
}
