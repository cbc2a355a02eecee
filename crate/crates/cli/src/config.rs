//! Command-line flags, the key=value config file, and their merge.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "fgt", version, about = "Thresholds for point-flat incidence events in F_q^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact family size and intersection profile.
    Count(Opts),
    /// Predicted threshold of an event.
    Threshold(Opts),
    /// Monte Carlo estimate of an event probability at one θ.
    Simulate(Opts),
    /// Monte Carlo curve over a θ grid relative to the predicted threshold.
    Scan(Opts),
    /// Exact event probability by full enumeration (tiny spaces).
    Oracle(Opts),
    /// Second-moment, Chernoff and sharp-threshold bounds.
    Certify {
        #[arg(value_enum)]
        kind: CertifyKind,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertifyKind {
    /// Σ c^k |F|^{k/ℓ} I_k against |F|² (or c'|F|² with --c-prime).
    Condition,
    /// Chebyshev bound on Pr[no family element in X] at --theta.
    Tail,
    /// Chernoff bounds for Bin(--N, --p) at --eps.
    Chernoff,
    /// Bounds either side of the sharp threshold ℓ q^{-m}.
    Sharp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// rich-line, rich-flat, rich-flat-gp, contained, blocking, incidence, uniform-collapse
    #[arg(long)]
    pub event: Option<String>,
    /// rich-line, rich-flat, contained, incidence
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub ell: Option<u64>,
    /// A density, or a multiple of the predicted threshold such as `6t`.
    /// The oracle also accepts exact fractions such as `1/2`.
    #[arg(long)]
    pub theta: Option<String>,
    /// Lowest grid point as a multiple of the predicted threshold.
    #[arg(long)]
    pub grid_lo: Option<f64>,
    /// Highest grid point as a multiple of the predicted threshold.
    #[arg(long)]
    pub grid_hi: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: FGT_WORKERS, else all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Normal quantile for Wilson intervals.
    #[arg(long)]
    pub z: Option<f64>,
    /// Threshold formula: rich-line, sharp, rich-flat, contained, blocking, incidence.
    #[arg(long)]
    pub formula: Option<String>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long = "c-prime")]
    pub c_prime: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long = "N")]
    pub big_n: Option<u64>,
}

fn set<T>(slot: &mut Option<T>, key: &str, raw: &str, lineno: usize) -> Result<(), CliError>
where
    T: std::str::FromStr,
{
    if slot.is_none() {
        let v = raw.parse::<T>().map_err(|_| {
            CliError::invalid(format!("config line {lineno}: bad value '{raw}' for {key}"))
        })?;
        *slot = Some(v);
    }
    Ok(())
}

impl Opts {
    /// Fills unset options from `key=value` lines; flags already given win.
    pub fn merge_config_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::invalid(format!("config line {lineno}: expected key=value"))
            })?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            match key.as_str() {
                "event" => set(&mut self.event, &key, value, lineno)?,
                "family" => set(&mut self.family, &key, value, lineno)?,
                "q" => set(&mut self.q, &key, value, lineno)?,
                "n" => set(&mut self.n, &key, value, lineno)?,
                "m" => set(&mut self.m, &key, value, lineno)?,
                "ell" => set(&mut self.ell, &key, value, lineno)?,
                "theta" => set(&mut self.theta, &key, value, lineno)?,
                "grid-lo" => set(&mut self.grid_lo, &key, value, lineno)?,
                "grid-hi" => set(&mut self.grid_hi, &key, value, lineno)?,
                "grid-points" => set(&mut self.grid_points, &key, value, lineno)?,
                "trials" => set(&mut self.trials, &key, value, lineno)?,
                "seed" => set(&mut self.seed, &key, value, lineno)?,
                "workers" => set(&mut self.workers, &key, value, lineno)?,
                "format" => {
                    if self.format.is_none() {
                        self.format = Some(Format::from_str(value, true).map_err(|_| {
                            CliError::invalid(format!("config line {lineno}: format must be csv or json"))
                        })?);
                    }
                }
                "out" => set(&mut self.out, &key, value, lineno)?,
                "z" => set(&mut self.z, &key, value, lineno)?,
                "formula" => set(&mut self.formula, &key, value, lineno)?,
                "c" => set(&mut self.c, &key, value, lineno)?,
                "c-prime" => set(&mut self.c_prime, &key, value, lineno)?,
                "eps" => set(&mut self.eps, &key, value, lineno)?,
                "p" => set(&mut self.p, &key, value, lineno)?,
                "N" => set(&mut self.big_n, &key, value, lineno)?,
                other => {
                    return Err(CliError::invalid(format!(
                        "config line {lineno}: unknown key '{other}'"
                    )))
                }
            }
        }
        Ok(())
    }

    /// Applies `--config` if given.
    pub fn resolve(mut self) -> Result<Opts, CliError> {
        if let Some(path) = self.config.clone() {
            let text = std::fs::read_to_string(&path).map_err(|e| {
                CliError::invalid(format!("cannot read config {}: {e}", path.display()))
            })?;
            self.merge_config_text(&text)?;
        }
        Ok(self)
    }

    pub fn need_q(&self) -> Result<u64, CliError> {
        self.q.ok_or_else(|| CliError::invalid("--q is required"))
    }

    pub fn need_n(&self) -> Result<u64, CliError> {
        self.n.ok_or_else(|| CliError::invalid("--n is required"))
    }

    pub fn workers(&self) -> Result<usize, CliError> {
        let w = match self.workers {
            Some(w) => w,
            None => match std::env::var("FGT_WORKERS") {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| CliError::invalid(format!("FGT_WORKERS must be a positive integer (got '{v}')")))?,
                Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
            },
        };
        if w == 0 {
            return Err(CliError::invalid("workers must be at least 1"));
        }
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let mut o = Opts {
            q: Some(9),
            ..Opts::default()
        };
        o.merge_config_text("# experiment\nq = 5\nn=2\nell=3 # trailing\ngrid_points=7\nformat=json\n")
            .unwrap();
        assert_eq!((o.q, o.n, o.ell, o.grid_points), (Some(9), Some(2), Some(3), Some(7)));
        assert_eq!(o.format, Some(Format::Json));
    }

    #[test]
    fn bad_config_lines() {
        assert!(Opts::default().merge_config_text("q").is_err());
        assert!(Opts::default().merge_config_text("q=x").is_err());
        assert!(Opts::default().merge_config_text("colour=red").is_err());
    }
}
