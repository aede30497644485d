//! GLL nodes and weights, and the exactness of the rule.
//!
//! ```text
//! cargo run --example gll_rules -- 4
//! ```

use hpdg::gll::{legendre, GllRule};

fn main() -> hpdg::Result<()> {
    let p: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let rule = GllRule::new(p)?;
    println!("GLL rule, p = {p}");
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        println!("  x = {x:+.16}  w = {w:.16}");
    }
    // exact through degree 2p - 1; the first miss is at 2p
    for k in 0..=2 * p {
        let quad = rule.integrate(|x| x.powi(k as i32));
        let exact = if k % 2 == 0 { 2.0 / (k + 1) as f64 } else { 0.0 };
        println!("  int x^{k:<2} error {:.2e}", (quad - exact).abs());
    }
    let (lp, _) = legendre(p, 0.3);
    println!("P_{p}(0.3) = {lp:.12}");
    Ok(())
}
