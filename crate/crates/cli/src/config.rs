//! Plain key-value config files: `seed = N` plus per-check tolerance
//! overrides `tol.<check_id> = <value>`. `#` starts a comment. Environment
//! variables are deliberately not consulted.

use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct Config {
    pub seed: Option<u64>,
    pub tol: BTreeMap<String, f64>,
}

pub fn parse_config(text: &str) -> Result<Config, String> {
    let mut cfg = Config::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
        let key = key.trim();
        let value = value.trim();
        if key == "seed" {
            cfg.seed = Some(
                value
                    .parse()
                    .map_err(|_| format!("line {}: bad seed {value}", lineno + 1))?,
            );
        } else if let Some(id) = key.strip_prefix("tol.") {
            let v: f64 = value
                .parse()
                .map_err(|_| format!("line {}: bad tolerance {value}", lineno + 1))?;
            cfg.tol.insert(id.to_string(), v);
        } else {
            return Err(format!("line {}: unknown key {key}", lineno + 1));
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_seed_and_tolerances() {
        let cfg = parse_config(
            "# defaults\nseed = 7\ntol.kernels.alpha_golden = 1e-7  # loosened\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.tol["kernels.alpha_golden"], 1e-7);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(parse_config("colour = blue\n").is_err());
        assert!(parse_config("just a line\n").is_err());
    }
}
