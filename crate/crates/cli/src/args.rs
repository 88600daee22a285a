use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "knotgate", version, about = "Knot groups, SU(2) representations and link gates")]
pub struct Cli {
    /// Emit a JSON envelope instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wirtinger presentation of a knot or link diagram.
    Present(PresentArgs),
    /// Construct, verify or numerically solve for SU(2) representations.
    Rep(RepArgs),
    /// Image of a 3-strand braid word in SL(2,Z).
    Modular(ModularArgs),
    /// Word holonomy, Berry transport and flatness checks.
    Holonomy(HolonomyArgs),
    /// Two-qubit gate of a two-component link.
    Linkgate(LinkgateArgs),
    /// Approximate an SU(2) target by a word in a representation.
    Compile(CompileArgs),
    /// Sample the character variety of a 2-generator group.
    Character(CharacterArgs),
    /// List the built-in knots and links.
    Catalog,
}

#[derive(Debug, Args)]
#[group(id = "diagram", required = true, multiple = false)]
pub struct DiagramSource {
    /// Built-in catalog name.
    #[arg(long, group = "diagram")]
    pub knot: Option<String>,
    /// PD code, e.g. "X(1,4,2,5); X(3,6,4,1); X(5,2,6,3)".
    #[arg(long, group = "diagram")]
    pub pd: Option<String>,
    /// File containing a PD code.
    #[arg(long, group = "diagram")]
    pub pd_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PresentArgs {
    #[command(flatten)]
    pub source: DiagramSource,
    /// Simplify by eliminating generators.
    #[arg(long)]
    pub reduce: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepType {
    Fibonacci,
    Kl,
    Trivial,
}

#[derive(Debug, Args)]
pub struct RepArgs {
    /// Built-in representation of the 3-strand braid group.
    #[arg(long = "type", value_enum, default_value = "fibonacci")]
    pub rep_type: RepType,
    /// Rotation angle for `--type kl` (radians or e.g. `7pi/10`).
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Flip the sign of `c` in the rotation family.
    #[arg(long)]
    pub negate_c: bool,
    /// Flip the sign of `s` in the rotation family.
    #[arg(long)]
    pub negate_s: bool,
    /// Exit with status 3 if the residual exceeds `--tol`.
    #[arg(long)]
    pub check: bool,
    /// Solve numerically for a representation of a presentation read from
    /// `--input`, `--knot`, or standard input.
    #[arg(long, conflicts_with = "verify")]
    pub solve: bool,
    /// Recompute the residual of a representation JSON read from `--input`
    /// or standard input.
    #[arg(long)]
    pub verify: bool,
    /// Input file (`-` for standard input).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Use a catalog presentation for `--solve`.
    #[arg(long)]
    pub knot: Option<String>,
    /// First seed for `--solve`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of consecutive seeds to try.
    #[arg(long, default_value_t = 1)]
    pub restarts: u64,
    /// Only accept solutions with `‖[φ(a), φ(b)] − 1‖ > 0.1`.
    #[arg(long)]
    pub nonabelian: bool,
    /// Residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ModularArgs {
    /// Braid word in `a = σ₁`, `b = σ₂` and their inverses `A`, `B`.
    #[arg(long)]
    pub word: String,
}

#[derive(Debug, Args)]
pub struct HolonomyArgs {
    #[command(subcommand)]
    pub mode: HolonomyMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LoopKind {
    Equator,
    Latitude,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Abelian,
}

#[derive(Debug, Subcommand)]
pub enum HolonomyMode {
    /// Holonomy of a word under the flat connection of a representation.
    Word {
        /// `fibonacci`, `trivial`, `kl:<angle>` or a representation JSON file.
        #[arg(long, default_value = "fibonacci")]
        rep: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Transport of the spin-family eigenframe around a closed loop.
    Loop {
        #[arg(long = "loop", value_enum, default_value = "equator")]
        kind: LoopKind,
        /// Polar angle for `--loop latitude`.
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        theta: Option<f64>,
        /// Number of segments.
        #[arg(long, default_value_t = 10_000)]
        refine: usize,
        /// CSV file of `theta,phi` points for `--loop csv`.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        /// Band for abelian mode (0 = lower energy).
        #[arg(long, default_value_t = 0)]
        band: usize,
    },
    /// Plaquette defect of the spin-family connection under step halving.
    Flatness {
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, default_value = "0.9")]
        theta: f64,
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, default_value = "1.3")]
        phi: f64,
        /// Initial plaquette side.
        #[arg(long, default_value_t = 1e-2)]
        delta: f64,
        #[arg(long, default_value_t = 3)]
        halvings: usize,
    },
}

#[derive(Debug, Args)]
pub struct LinkgateArgs {
    /// Catalog link with crossing data (`hopf`, `whitehead`, `unlink2`).
    #[arg(long, default_value = "hopf")]
    pub link: String,
    /// Override the over-crossing count.
    #[arg(long)]
    pub over: Option<usize>,
    /// Override the under-crossing count.
    #[arg(long)]
    pub under: Option<usize>,
    /// Evolution time (radians or e.g. `pi/4`).
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, default_value = "pi/4")]
    pub time: f64,
    /// Tabulate the entangling power over `t ∈ [0, π]`.
    #[arg(long)]
    pub scan: bool,
    #[arg(long, default_value_t = 64)]
    pub scan_steps: usize,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    /// `fibonacci`, `kl:<angle>` or a representation JSON file.
    #[arg(long, default_value = "fibonacci")]
    pub rep: String,
    /// `identity`, `i`, `j`, `k`, or `axis:x,y,z,angle`.
    #[arg(long, conflicts_with = "target_json")]
    pub target: Option<String>,
    /// JSON file with a 2×2 matrix (rows of `[re, im]`) or a quaternion `[a, b, c, d]`.
    #[arg(long)]
    pub target_json: Option<PathBuf>,
    #[arg(long, default_value_t = 12)]
    pub max_len: usize,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Report coverage over this many Haar-random targets instead.
    #[arg(long)]
    pub coverage: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CharacterArgs {
    /// Catalog presentation.
    #[arg(long, conflicts_with = "input")]
    pub knot: Option<String>,
    /// Presentation JSON file (`-` for standard input).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Grid points per start angle.
    #[arg(long, default_value_t = 6)]
    pub steps: usize,
    /// Text output as CSV `x,y,z,residual`.
    #[arg(long)]
    pub csv: bool,
}

/// Radians, or a multiple of π such as `7pi/10`, `-pi/3`, `2*pi`, `π/4`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s.trim().replace('π', "pi").chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() { Ok(v) } else { Err(format!("angle {s:?} is not finite")) };
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| format!("bad denominator in angle {s:?}"))?),
        None => (t.as_str(), 1.0),
    };
    if den == 0.0 {
        return Err(format!("zero denominator in angle {s:?}"));
    }
    let coef = num.strip_suffix("pi").ok_or_else(|| format!("cannot parse angle {s:?}"))?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| format!("bad coefficient in angle {s:?}"))?,
    };
    Ok(c * PI / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert_eq!(parse_angle("7pi/10").unwrap(), 7.0 * PI / 10.0);
        assert_eq!(parse_angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("-pi/3").unwrap(), -PI / 3.0);
        assert_eq!(parse_angle("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("π/2").unwrap(), PI / 2.0);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("tau").is_err());
        assert!(parse_angle("inf").is_err());
    }

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
