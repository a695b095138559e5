pub mod bandit;
pub mod bounds;
pub mod cliff;
pub mod schedule;
pub mod verify;

use anyhow::{bail, Result};
use pauserl::forecast::Basis;

/// `identity`, `constant` or `poly:<degree>`.
pub fn parse_basis(s: &str) -> Result<Basis> {
    Ok(match s {
        "identity" => Basis::Identity,
        "constant" => Basis::Constant,
        _ => match s.strip_prefix("poly:").and_then(|d| d.parse().ok()) {
            Some(d) => Basis::Polynomial(d),
            None => bail!("unknown forecast basis {s:?}, expected identity, constant or poly:<degree>"),
        },
    })
}

/// Splits `a:b:c` into exactly `n` numbers.
pub fn parse_tuple<T: std::str::FromStr>(s: &str, n: usize) -> Result<Vec<T>> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() != n {
        bail!("expected {n} colon-separated values in {s:?}");
    }
    parts.iter().map(|p| p.parse().map_err(|_| anyhow::anyhow!("cannot parse {p:?} in {s:?}"))).collect()
}
