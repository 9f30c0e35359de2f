use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use susyphoton::Complex64;

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "susyphoton", version, about = "Multiphoton coherent and supercoherent state toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// sigma_q, sigma_p and their product over a z sweep.
    Hur,
    /// Mandel Q over |z| (scalar) or k2 at fixed real z (--susy).
    Mandel,
    /// Wigner function on a phase-space grid (JSON).
    Wigner,
    /// Loop phase and geometric phase over a (z, k2) sweep.
    Phase,
    /// Run invariant suites and print a JSON report.
    Verify {
        #[arg(value_enum, default_value_t = Level::Quick)]
        level: Level,
        /// Deliberately break an operator to check that the suite notices.
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// Coherent-state decomposition of a scalar multiphoton state.
    Decompose,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Flip the sign of the off-diagonal k2 term of the ladder operator.
    SaoSign,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    #[arg(long, global = true)]
    pub m: Option<usize>,
    #[arg(long, global = true)]
    pub j: Option<usize>,
    /// `re` or `re,im`; repeat for a list.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub z: Vec<String>,
    /// `lo:hi:step`, used for both Re z and Im z (Re z only for scalar Mandel sweeps).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub z_grid: Option<String>,
    /// Repeat for a list.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k2: Vec<f64>,
    /// `lo:hi:step`; also the root bracket and scan step for --find-root.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k2_range: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    /// Base padding of the Fock cutoff.
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub susy: bool,
    #[arg(long, global = true)]
    pub find_root: bool,
    /// Half-width of the square Wigner window.
    #[arg(long, global = true)]
    pub grid_half: Option<f64>,
    /// Points per axis of the Wigner grid.
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
}

/// Complex input as a number, a `[re, im]` pair or a `"re,im"` string.
#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum ComplexInput {
    Num(f64),
    Pair([f64; 2]),
    Str(String),
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Keys of a `--config` file; flags take precedence.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub m: Option<usize>,
    pub j: Option<usize>,
    pub z: Option<OneOrMany<ComplexInput>>,
    pub z_grid: Option<String>,
    pub k2: Option<OneOrMany<f64>>,
    pub k2_range: Option<String>,
    pub a: Option<ComplexInput>,
    pub c: Option<ComplexInput>,
    pub omega: Option<f64>,
    pub trunc: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub susy: Option<bool>,
    pub find_root: Option<bool>,
    pub grid_half: Option<f64>,
    pub grid_n: Option<usize>,
}

#[derive(Serialize, Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Range {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(CliError::Usage(format!("range {s:?} must be lo:hi:step")));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number {x:?} in range {s:?}")));
        let r = Range { lo: num(lo)?, hi: num(hi)?, step: num(step)? };
        if !(r.step > 0.0) || !r.lo.is_finite() || !r.hi.is_finite() {
            return Err(CliError::Usage(format!("range {s:?} needs finite ends and a positive step")));
        }
        Ok(r)
    }

    /// `lo + i step` up to `hi` (inclusive within rounding); empty when `hi < lo`.
    pub fn points(&self) -> Vec<f64> {
        if self.hi < self.lo {
            return Vec::new();
        }
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("complex value {s:?} must be `re` or `re,im`"));
    let mut it = s.split(',');
    let re = it.next().ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?;
    let im = match it.next() {
        Some(x) => x.trim().parse::<f64>().map_err(|_| bad())?,
        None => 0.0,
    };
    if it.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn from_input(c: ComplexInput) -> Result<Complex64, CliError> {
    match c {
        ComplexInput::Num(x) => Ok(Complex64::new(x, 0.0)),
        ComplexInput::Pair([a, b]) => Ok(Complex64::new(a, b)),
        ComplexInput::Str(s) => parse_complex(&s),
    }
}

/// Fully resolved, validated parameters; serialized into every output header.
#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub m: usize,
    pub j: usize,
    pub z: Vec<[f64; 2]>,
    pub z_grid: Option<Range>,
    pub k2: Vec<f64>,
    pub k2_range: Option<Range>,
    pub a: [f64; 2],
    pub c: [f64; 2],
    pub omega: f64,
    pub trunc: usize,
    pub susy: bool,
    pub find_root: bool,
    pub grid_half: f64,
    pub grid_n: usize,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_TRUNC: usize = 16;
pub const DEFAULT_K2_RANGE: Range = Range { lo: -5.0, hi: 5.0, step: 0.05 };

impl RunConfig {
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
                toml::from_str::<FileConfig>(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", p.display())))?
            }
            None => FileConfig::default(),
        };
        Self::merge(flags, file)
    }

    pub fn merge(flags: &Flags, file: FileConfig) -> Result<Self, CliError> {
        let z: Vec<Complex64> = if !flags.z.is_empty() {
            flags.z.iter().map(|s| parse_complex(s)).collect::<Result<_, _>>()?
        } else {
            file.z.map(|v| v.into_vec()).unwrap_or_default().into_iter().map(from_input).collect::<Result<_, _>>()?
        };
        let z_grid = flags.z_grid.clone().or(file.z_grid).map(|s| Range::parse(&s)).transpose()?;
        let k2 = if !flags.k2.is_empty() { flags.k2.clone() } else { file.k2.map(|v| v.into_vec()).unwrap_or_default() };
        let k2_range = flags.k2_range.clone().or(file.k2_range).map(|s| Range::parse(&s)).transpose()?;
        let amp = |flag: &Option<String>, f: Option<ComplexInput>| -> Result<Complex64, CliError> {
            match (flag, f) {
                (Some(s), _) => parse_complex(s),
                (None, Some(c)) => from_input(c),
                (None, None) => Ok(Complex64::new(1.0, 0.0)),
            }
        };
        let a = amp(&flags.a, file.a)?;
        let c = amp(&flags.c, file.c)?;
        let cfg = RunConfig {
            m: flags.m.or(file.m).unwrap_or(1),
            j: flags.j.or(file.j).unwrap_or(0),
            z: z.iter().map(|z| [z.re, z.im]).collect(),
            z_grid,
            k2: k2.clone(),
            k2_range,
            a: [a.re, a.im],
            c: [c.re, c.im],
            omega: flags.omega.or(file.omega).unwrap_or(1.0),
            trunc: flags.trunc.or(file.trunc).unwrap_or(DEFAULT_TRUNC),
            susy: flags.susy || file.susy.unwrap_or(false),
            find_root: flags.find_root || file.find_root.unwrap_or(false),
            grid_half: flags.grid_half.or(file.grid_half).unwrap_or(8.0),
            grid_n: flags.grid_n.or(file.grid_n).unwrap_or(257),
            format: flags.format.or(file.format).unwrap_or_default(),
            out: flags.out.clone().or(file.out),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.m == 0 {
            return Err(CliError::Usage("m must be at least 1".into()));
        }
        if self.j >= self.m {
            return Err(CliError::Usage(format!("j = {} must be smaller than m = {}", self.j, self.m)));
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(CliError::Usage("omega must be positive".into()));
        }
        if self.k2.iter().any(|k| !k.is_finite()) {
            return Err(CliError::Usage("k2 values must be finite".into()));
        }
        if !(self.grid_half > 0.0) || self.grid_n < 2 {
            return Err(CliError::Usage("grid needs a positive half-width and at least 2 points".into()));
        }
        if self.susy && self.a == [0.0, 0.0] && self.c == [0.0, 0.0] {
            return Err(CliError::Usage("amplitudes a and c cannot both vanish".into()));
        }
        Ok(())
    }

    pub fn amp_a(&self) -> Complex64 {
        Complex64::new(self.a[0], self.a[1])
    }

    pub fn amp_c(&self) -> Complex64 {
        Complex64::new(self.c[0], self.c[1])
    }

    /// Explicit `--z` list, else the `--z-grid` square (Re outer, Im inner), else `z = 1`.
    pub fn z_points(&self) -> Vec<Complex64> {
        if let Some(r) = self.z_grid {
            let xs = r.points();
            return xs.iter().flat_map(|&x| xs.iter().map(move |&y| Complex64::new(x, y))).collect();
        }
        self.z_list()
    }

    /// Real-axis sweep for `|z|` scans.
    pub fn z_line(&self) -> Vec<Complex64> {
        match self.z_grid {
            Some(r) => r.points().into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            None => self.z_list(),
        }
    }

    pub fn single_z(&self) -> Complex64 {
        self.z_list()[0]
    }

    fn z_list(&self) -> Vec<Complex64> {
        if self.z.is_empty() {
            vec![Complex64::new(1.0, 0.0)]
        } else {
            self.z.iter().map(|&[a, b]| Complex64::new(a, b)).collect()
        }
    }

    /// `--k2-range` points, else the `--k2` list, else `k2 = 0`.
    pub fn k2_points(&self) -> Vec<f64> {
        match self.k2_range {
            Some(r) => r.points(),
            None if self.k2.is_empty() => vec![0.0],
            None => self.k2.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_points() {
        assert_eq!(Range::parse("-5:5:0.05").unwrap().points().len(), 201);
        assert!(Range::parse("1:0:0.1").unwrap().points().is_empty());
        assert!(Range::parse("0:1").is_err());
        assert!(Range::parse("0:1:0").is_err());
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("-1,2").unwrap(), Complex64::new(-1.0, 2.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str("m = 3\nj = 1\nz = [[1.0, 2.0]]\nk2 = 0.5\nomega = 2.0\n").unwrap();
        let flags = Flags { j: Some(2), ..Default::default() };
        let cfg = RunConfig::merge(&flags, file).unwrap();
        assert_eq!((cfg.m, cfg.j, cfg.omega), (3, 2, 2.0));
        assert_eq!(cfg.z, vec![[1.0, 2.0]]);
        assert_eq!(cfg.k2, vec![0.5]);
    }

    #[test]
    fn rejects_bad_subspace() {
        let flags = Flags { m: Some(2), j: Some(2), ..Default::default() };
        assert!(matches!(RunConfig::merge(&flags, FileConfig::default()), Err(CliError::Usage(_))));
    }
}
