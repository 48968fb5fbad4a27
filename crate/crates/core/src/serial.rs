//! Structured-text serialization: flat TOML configuration records with an
//! explicit schema version, CSV emission with 17-significant-digit floats
//! (bit-exact round-trips), and key/value / TOML / JSON views of game
//! statistics.

use serde::{Deserialize, Serialize};

use crate::duality::{RegionRow, SymmetricRow};
use crate::error::{Error, Result};
use crate::game::{GameConfig, GameStats};
use crate::interferometer::{DensityMatrix, DetectorGram, PhaseSet};
use crate::numerics::ComplexMatrix;

/// Column order for region exports.
pub const REGION_HEADER: &str = "n,s_or_t,x,y,ellipse_form,lemma1_lhs";
/// Column order for symmetric-family sweeps.
pub const SYMMETRIC_HEADER: &str = "s,X,P_d,x,y,lemma1_lhs,ellipse_form";

/// Render a float with 17 significant digits (`{:.16e}`), enough for any
/// f64 to parse back bit-exactly. Locale-free, `.` decimal point.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|e| Error::Parse {
        detail: format!("line {line}: bad float {field:?}: {e}"),
    })
}

fn parse_usize(field: &str, line: usize) -> Result<usize> {
    field.trim().parse::<usize>().map_err(|e| Error::Parse {
        detail: format!("line {line}: bad integer {field:?}: {e}"),
    })
}

fn split_fields(line: &str, want: usize, lineno: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != want {
        return Err(Error::Parse {
            detail: format!(
                "line {lineno}: expected {want} fields, found {}",
                fields.len()
            ),
        });
    }
    Ok(fields)
}

fn check_header(text: &str, expected: &str) -> Result<()> {
    match text.lines().next() {
        Some(h) if h.trim_end() == expected => Ok(()),
        Some(h) => Err(Error::Parse {
            detail: format!("bad header {h:?}, expected {expected:?}"),
        }),
        None => Err(Error::Parse {
            detail: "empty file".into(),
        }),
    }
}

/// Emit region rows as CSV (LF line endings, trailing newline).
pub fn region_csv(rows: &[RegionRow]) -> String {
    let mut out = String::from(REGION_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            format_f64(r.s_or_t),
            format_f64(r.x),
            format_f64(r.y),
            format_f64(r.ellipse_form),
            format_f64(r.lemma1_lhs),
        ));
    }
    out
}

/// Parse region CSV back to rows; bit-exact inverse of [`region_csv`].
pub fn parse_region_csv(text: &str) -> Result<Vec<RegionRow>> {
    check_header(text, REGION_HEADER)?;
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let lineno = i + 1;
            let f = split_fields(l, 6, lineno)?;
            Ok(RegionRow {
                n: parse_usize(f[0], lineno)?,
                s_or_t: parse_f64(f[1], lineno)?,
                x: parse_f64(f[2], lineno)?,
                y: parse_f64(f[3], lineno)?,
                ellipse_form: parse_f64(f[4], lineno)?,
                lemma1_lhs: parse_f64(f[5], lineno)?,
            })
        })
        .collect()
}

/// Emit symmetric-family sweep rows as CSV.
pub fn symmetric_csv(rows: &[SymmetricRow]) -> String {
    let mut out = String::from(SYMMETRIC_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            format_f64(r.s),
            format_f64(r.x_coh),
            format_f64(r.p_d),
            format_f64(r.x),
            format_f64(r.y),
            format_f64(r.lemma1_lhs),
            format_f64(r.ellipse_form),
        ));
    }
    out
}

/// Parse a symmetric-family sweep CSV; bit-exact inverse of
/// [`symmetric_csv`].
pub fn parse_symmetric_csv(text: &str) -> Result<Vec<SymmetricRow>> {
    check_header(text, SYMMETRIC_HEADER)?;
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let lineno = i + 1;
            let f = split_fields(l, 7, lineno)?;
            Ok(SymmetricRow {
                s: parse_f64(f[0], lineno)?,
                x_coh: parse_f64(f[1], lineno)?,
                p_d: parse_f64(f[2], lineno)?,
                x: parse_f64(f[3], lineno)?,
                y: parse_f64(f[4], lineno)?,
                lemma1_lhs: parse_f64(f[5], lineno)?,
                ellipse_form: parse_f64(f[6], lineno)?,
            })
        })
        .collect()
}

/// Flat, diff-friendly description of a game configuration: matrices as
/// row-major real/imaginary arrays, phases as a row-major table. The
/// `schema` key versions the layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameConfigRecord {
    pub schema: u32,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub coin_bias: f64,
    pub rho_re: Vec<f64>,
    pub rho_im: Vec<f64>,
    pub s_re: Vec<f64>,
    pub s_im: Vec<f64>,
    pub phases: Vec<f64>,
}

pub const CONFIG_SCHEMA: u32 = 1;

fn matrix_from_parts(n: usize, re: &[f64], im: &[f64], what: &str) -> Result<ComplexMatrix> {
    if re.len() != n * n || im.len() != n * n {
        return Err(Error::Parse {
            detail: format!(
                "{what}: expected {} entries, found {} re / {} im",
                n * n,
                re.len(),
                im.len()
            ),
        });
    }
    ComplexMatrix::from_re_im(n, re, im)
}

impl GameConfigRecord {
    pub fn from_config(cfg: &GameConfig) -> Self {
        let (rho_re, rho_im) = cfg.rho.matrix().to_re_im();
        let (s_re, s_im) = cfg.s.matrix().to_re_im();
        Self {
            schema: CONFIG_SCHEMA,
            n: cfg.n,
            trials: cfg.trials,
            seed: cfg.seed,
            coin_bias: cfg.coin_bias,
            rho_re,
            rho_im,
            s_re,
            s_im,
            phases: cfg.phases.entries().to_vec(),
        }
    }

    /// Rebuild and revalidate the configuration (schema check included).
    pub fn to_config(&self) -> Result<GameConfig> {
        if self.schema != CONFIG_SCHEMA {
            return Err(Error::Parse {
                detail: format!(
                    "unsupported schema {} (expected {CONFIG_SCHEMA})",
                    self.schema
                ),
            });
        }
        let rho = DensityMatrix::new(matrix_from_parts(
            self.n,
            &self.rho_re,
            &self.rho_im,
            "rho",
        )?)?;
        let s = DetectorGram::new(matrix_from_parts(self.n, &self.s_re, &self.s_im, "s")?)?;
        let phases = PhaseSet::new(self.n, self.phases.clone())?;
        GameConfig::new(rho, s, phases, self.trials, self.seed, self.coin_bias)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse {
            detail: format!("config encode: {e}"),
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            detail: format!("config decode: {e}"),
        })
    }
}

/// Key/value text record of game statistics, one `key = value` per line in
/// schema order.
pub fn game_stats_text(s: &GameStats) -> String {
    format!(
        "n = {}\ntrials = {}\nseed = {}\nwins_ways = {}\nplays_ways = {}\n\
         wins_phases = {}\nplays_phases = {}\nempirical_pwin = {}\n\
         analytic_pwin = {}\nstderr = {}\n",
        s.n,
        s.trials,
        s.seed,
        s.wins_ways,
        s.plays_ways,
        s.wins_phases,
        s.plays_phases,
        format_f64(s.empirical_pwin),
        format_f64(s.analytic_pwin),
        format_f64(s.stderr),
    )
}

pub fn game_stats_json(s: &GameStats) -> Result<String> {
    serde_json::to_string_pretty(s).map_err(|e| Error::Parse {
        detail: format!("stats encode: {e}"),
    })
}

pub fn game_stats_from_json(text: &str) -> Result<GameStats> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        detail: format!("stats decode: {e}"),
    })
}
