//! Library half of the `sonic` command: argument parsing helpers and the
//! reproduction report.

pub mod report;

use anyhow::{bail, Result};

/// Parses `a..b` (inclusive), `a..=b`, a single seed or a comma list.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        if b < a {
            bail!("empty seed range {s}");
        }
        return Ok((a..=b).collect());
    }
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<u64>())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if v.is_empty() {
        bail!("no seeds in '{s}'");
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_forms() {
        assert_eq!(parse_seeds("0..19").unwrap().len(), 20);
        assert_eq!(parse_seeds("3..=4").unwrap(), vec![3, 4]);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert_eq!(parse_seeds("1, 5,2").unwrap(), vec![1, 5, 2]);
        assert!(parse_seeds("5..2").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn targets_parse() {
        let t = report::targets().unwrap();
        assert_eq!(t.schema_version, 1);
        assert!(t.targets.iter().any(|t| t.id == 10));
    }
}
