pub mod coherent;
pub mod dynamics;
pub mod identities;
pub mod kvn;
pub mod pathint;

/// Tolerance on a convergence ratio, checked as `|r − 2| ≤ RATIO_TOL`.
pub const RATIO_TOL: f64 = 0.2;

fn ratio_residual(r: f64) -> f64 {
    (r - 2.0).abs()
}

fn format_ratios(rs: &[f64]) -> String {
    let parts: Vec<String> = rs.iter().map(|r| format!("{r:.3}")).collect();
    format!("ratios [{}]", parts.join(", "))
}
