//! Run configuration: one flat key=value file shared with the potential
//! definition, overridable by command-line flags of the same names.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::potentials::{parse_potential_config, PotentialField};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub potential: PotentialField,
    /// volume grid resolution per axis
    pub n: usize,
    /// scan box half-width (centered at the origin); default sized from
    /// the support
    pub scan_half_width: Option<f64>,
    pub scan_res: usize,
    /// detection orders m
    pub orders: Vec<usize>,
    pub l_max: usize,
    pub k_max: Option<f64>,
    pub n_k: usize,
    pub tau_conv: f64,
    pub tau_rel: f64,
    pub out_dir: PathBuf,
    pub alpha_range: Option<(f64, f64, f64)>,
    pub allow_critical: bool,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub orders: Option<Vec<usize>>,
    pub out_dir: Option<PathBuf>,
    pub alpha_range: Option<(f64, f64, f64)>,
    pub allow_critical: bool,
}

impl RunConfig {
    pub fn from_file(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::MalformedInput(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_str(&text, path.parent(), overrides)
    }

    pub fn from_str(text: &str, base_dir: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let potential = parse_potential_config(text, base_dir)?;

        let mut cfg = RunConfig {
            potential,
            n: 16,
            scan_half_width: None,
            scan_res: 32,
            orders: vec![1],
            l_max: 2,
            k_max: None,
            n_k: 256,
            tau_conv: 1e-3,
            tau_rel: 1e-3,
            out_dir: PathBuf::from("out"),
            alpha_range: None,
            allow_critical: false,
        };

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                continue; // already rejected by the potential parser
            };
            let key = key.trim();
            let value = value.trim();
            let ctx = |what: &str| {
                Error::MalformedInput(format!("line {}: bad {what} '{value}'", lineno + 1))
            };
            match key {
                "n" => cfg.n = value.parse().map_err(|_| ctx("n"))?,
                "scan_box" => {
                    cfg.scan_half_width = Some(value.parse().map_err(|_| ctx("scan_box"))?)
                }
                "scan_res" => cfg.scan_res = value.parse().map_err(|_| ctx("scan_res"))?,
                "m" => cfg.orders = parse_orders(value)?,
                "l_max" => cfg.l_max = value.parse().map_err(|_| ctx("l_max"))?,
                "k_max" => cfg.k_max = Some(value.parse().map_err(|_| ctx("k_max"))?),
                "n_k" => cfg.n_k = value.parse().map_err(|_| ctx("n_k"))?,
                "tau_conv" => cfg.tau_conv = value.parse().map_err(|_| ctx("tau_conv"))?,
                "tau_rel" => cfg.tau_rel = value.parse().map_err(|_| ctx("tau_rel"))?,
                "out" => cfg.out_dir = PathBuf::from(value),
                "alpha_range" => cfg.alpha_range = Some(parse_alpha_range(value)?),
                "allow_critical" => {
                    cfg.allow_critical = value.parse().map_err(|_| ctx("allow_critical"))?
                }
                _ => {} // potential keys
            }
        }

        if let Some(n) = overrides.n {
            cfg.n = n;
        }
        if let Some(orders) = &overrides.orders {
            cfg.orders = orders.clone();
        }
        if let Some(out) = &overrides.out_dir {
            cfg.out_dir = out.clone();
        }
        if let Some(range) = overrides.alpha_range {
            cfg.alpha_range = Some(range);
        }
        cfg.allow_critical |= overrides.allow_critical;

        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(4..=48).contains(&self.n) {
            return Err(Error::MalformedInput(format!(
                "grid resolution n must lie in 4..=48, got {}",
                self.n
            )));
        }
        if self.scan_res < 2 || self.scan_res > 128 {
            return Err(Error::MalformedInput(format!(
                "scan_res must lie in 2..=128, got {}",
                self.scan_res
            )));
        }
        if !(self.tau_conv > 0.0) || !(self.tau_rel > 0.0) {
            return Err(Error::MalformedInput(
                "thresholds tau_conv and tau_rel must be positive".into(),
            ));
        }
        if let Some(hw) = self.scan_half_width {
            if !(hw > 0.0) {
                return Err(Error::MalformedInput("scan_box must be positive".into()));
            }
        }
        if self.orders.is_empty() || self.orders.iter().any(|&m| !(1..=3).contains(&m)) {
            return Err(Error::MalformedInput(format!(
                "orders must be a non-empty subset of {{1, 2, 3}}, got {:?}",
                self.orders
            )));
        }
        if self.l_max > 4 {
            return Err(Error::MalformedInput(format!(
                "l_max must be at most 4, got {}",
                self.l_max
            )));
        }
        if self.n_k < 64 {
            return Err(Error::MalformedInput(format!(
                "n_k must be at least 64, got {}",
                self.n_k
            )));
        }
        if let Some((a, b, step)) = self.alpha_range {
            if !(a >= 0.0) || !(b > a) || !(step > 0.0) {
                return Err(Error::MalformedInput(format!(
                    "alpha_range needs 0 <= A < B and positive STEP, got {a}:{b}:{step}"
                )));
            }
        }
        Ok(())
    }

    /// Scan half-width: configured, or 1.25x the support radius.
    pub fn scan_half_width_or_default(&self) -> f64 {
        self.scan_half_width
            .unwrap_or_else(|| 1.25 * self.potential.support_ball().radius)
    }
}

fn parse_orders(value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::MalformedInput(format!("bad order '{s}' in m list")))
        })
        .collect()
}

/// A:B:STEP
pub fn parse_alpha_range(value: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::MalformedInput(format!(
            "alpha_range must be A:B:STEP, got '{value}'"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::MalformedInput(format!("bad number '{s}' in alpha_range")))
        })
        .collect::<Result<Vec<_>>>()?;
    if !(nums[0] >= 0.0) || !(nums[1] > nums[0]) || !(nums[2] > 0.0) {
        return Err(Error::MalformedInput(format!(
            "alpha_range needs 0 <= A < B and positive STEP, got '{value}'"
        )));
    }
    Ok((nums[0], nums[1], nums[2]))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
shape = gaussian
depth = -8.0
width = 1.0
n = 12
m = 1,2
scan_res = 24
tau_rel = 5e-3
out = results
";

    #[test]
    fn parses_run_keys() {
        let cfg = RunConfig::from_str(BASE, None, &Overrides::default()).unwrap();
        assert_eq!(cfg.n, 12);
        assert_eq!(cfg.orders, vec![1, 2]);
        assert_eq!(cfg.scan_res, 24);
        assert_eq!(cfg.tau_rel, 5e-3);
        assert_eq!(cfg.out_dir, PathBuf::from("results"));
        assert!(cfg.potential.is_radial());
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides {
            n: Some(16),
            orders: Some(vec![1]),
            ..Default::default()
        };
        let cfg = RunConfig::from_str(BASE, None, &ov).unwrap();
        assert_eq!(cfg.n, 16);
        assert_eq!(cfg.orders, vec![1]);
    }

    #[test]
    fn rejects_out_of_range_resolution() {
        let text = BASE.replace("n = 12", "n = 3");
        assert!(RunConfig::from_str(&text, None, &Overrides::default()).is_err());
        let text = BASE.replace("n = 12", "n = 64");
        assert!(RunConfig::from_str(&text, None, &Overrides::default()).is_err());
    }

    #[test]
    fn rejects_missing_potential() {
        assert!(matches!(
            RunConfig::from_str("n = 12\n", None, &Overrides::default()),
            Err(Error::MalformedInput(_))
        ));
    }

    #[test]
    fn alpha_range_syntax() {
        assert_eq!(parse_alpha_range("0.5:2:0.25").unwrap(), (0.5, 2.0, 0.25));
        assert!(parse_alpha_range("1:2").is_err());
        assert!(parse_alpha_range("2:1:0.5").is_err());
    }
}
