//! Line-oriented run configuration: one `key = value [unit]` per line.
//!
//! The same schema serves three roles: hand-written config files, the
//! canonical echo embedded in every run summary (so a summary re-parses into
//! the run that produced it), and the preset catalog's fully-resolved form.
//! Keys beginning with `out_` are summary outputs and are skipped on load;
//! `#`-prefixed lines are comments. Unknown keys are rejected with the line
//! and column of the offender, as are wrong units, malformed numbers, and
//! duplicate keys.
//!
//! A config usually starts from a preset (`preset = fig3a`) and overrides
//! individual fields; bare fields with no preset override the catalog base.

use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

/// Failure to read the textual schema, located for the user.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

/// A run description: every field optional, later sources overriding
/// earlier ones (preset ← config file ← command-line flags).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub output_dir: Option<PathBuf>,

    pub g: Option<f64>,
    pub n_atoms: Option<f64>,
    pub gamma_ba: Option<f64>,
    pub gamma_bc: Option<f64>,
    pub delta: Option<f64>,
    pub delta_p: Option<f64>,
    pub c_light: Option<f64>,
    pub cell_length: Option<f64>,

    pub u_scale: Option<f64>,
    pub switch_rate: Option<f64>,
    pub t_off: Option<f64>,
    pub t_on: Option<f64>,
    pub omega_floor: Option<f64>,
    /// Fixed mixing angle (rad); when set, the switching keys are unused.
    pub constant_theta: Option<f64>,

    pub z_min: Option<f64>,
    pub z_max: Option<f64>,
    pub grid_points: Option<usize>,

    pub pulse_amplitude: Option<f64>,
    pub pulse_width: Option<f64>,
    pub pulse_center: Option<f64>,

    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub snapshot_every: Option<f64>,

    pub emit_analytic_reference: Option<bool>,
    pub spectral_filter: Option<bool>,
}

/// Accessor table for the float-valued keys: name, required unit suffix (an
/// optional trailing token after the number), field.
type FloatField = for<'a> fn(&'a mut RunConfig) -> &'a mut Option<f64>;
const FLOAT_KEYS: &[(&str, Option<&str>, FloatField)] = &[
    ("g", Some("rad/s"), |c| &mut c.g),
    ("n_atoms", None, |c| &mut c.n_atoms),
    ("gamma_ba", Some("rad/s"), |c| &mut c.gamma_ba),
    ("gamma_bc", Some("rad/s"), |c| &mut c.gamma_bc),
    ("delta", Some("rad/s"), |c| &mut c.delta),
    ("delta_p", Some("rad/s"), |c| &mut c.delta_p),
    ("c_light", Some("m/s"), |c| &mut c.c_light),
    ("cell_length", Some("m"), |c| &mut c.cell_length),
    ("u_scale", None, |c| &mut c.u_scale),
    ("switch_rate", Some("1/s"), |c| &mut c.switch_rate),
    ("t_off", Some("s"), |c| &mut c.t_off),
    ("t_on", Some("s"), |c| &mut c.t_on),
    ("omega_floor", Some("rad/s"), |c| &mut c.omega_floor),
    ("constant_theta", Some("rad"), |c| &mut c.constant_theta),
    ("z_min", Some("m"), |c| &mut c.z_min),
    ("z_max", Some("m"), |c| &mut c.z_max),
    ("pulse_amplitude", None, |c| &mut c.pulse_amplitude),
    ("pulse_width", Some("m"), |c| &mut c.pulse_width),
    ("pulse_center", Some("m"), |c| &mut c.pulse_center),
    ("t_end", Some("s"), |c| &mut c.t_end),
    ("dt", Some("s"), |c| &mut c.dt),
    ("snapshot_every", Some("s"), |c| &mut c.snapshot_every),
];

type BoolField = for<'a> fn(&'a mut RunConfig) -> &'a mut Option<bool>;
const BOOL_KEYS: &[(&str, BoolField)] = &[
    ("emit_analytic_reference", |c| &mut c.emit_analytic_reference),
    ("spectral_filter", |c| &mut c.spectral_filter),
];

impl RunConfig {
    /// Parse the textual schema. A file with no `key = value` lines at all
    /// (including an empty one) is an error, not an empty config.
    pub fn parse(text: &str) -> Result<RunConfig, ParseError> {
        let mut config = RunConfig::default();
        let mut assigned = 0usize;
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            if parse_line(raw, line_no, &mut config)? {
                assigned += 1;
            }
        }
        if assigned == 0 {
            return Err(ParseError {
                line: 1,
                column: 1,
                message: "no `key = value` lines found".into(),
            });
        }
        Ok(config)
    }

    /// Overlay `other` on top of self: every field `other` sets wins.
    pub fn apply(&mut self, other: &RunConfig) {
        macro_rules! take {
            ($($field:ident),+ $(,)?) => {
                $(if other.$field.is_some() {
                    self.$field = other.$field.clone();
                })+
            };
        }
        take!(
            preset,
            output_dir,
            g,
            n_atoms,
            gamma_ba,
            gamma_bc,
            delta,
            delta_p,
            c_light,
            cell_length,
            u_scale,
            switch_rate,
            t_off,
            t_on,
            omega_floor,
            constant_theta,
            z_min,
            z_max,
            grid_points,
            pulse_amplitude,
            pulse_width,
            pulse_center,
            t_end,
            dt,
            snapshot_every,
            emit_analytic_reference,
            spectral_filter,
        );
    }

    /// Canonical echo of every populated field, in schema form. Re-parsing
    /// the result reproduces the same resolved run. The output directory is
    /// deliberately not echoed (it is wherever the file lives).
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        if let Some(preset) = &self.preset {
            writeln!(out, "preset = {preset}").unwrap();
        }
        for (name, unit, field) in FLOAT_KEYS {
            // The accessor wants &mut; clone a scratch copy to peek.
            let mut scratch = self.clone();
            if let Some(value) = *field(&mut scratch) {
                match unit {
                    Some(unit) => writeln!(out, "{name} = {value:.16e} {unit}").unwrap(),
                    None => writeln!(out, "{name} = {value:.16e}").unwrap(),
                }
            }
        }
        if let Some(n) = self.grid_points {
            writeln!(out, "grid_points = {n}").unwrap();
        }
        for (name, field) in BOOL_KEYS {
            let mut scratch = self.clone();
            if let Some(value) = *field(&mut scratch) {
                writeln!(out, "{name} = {value}").unwrap();
            }
        }
        out
    }
}

/// Parse one line into `config`; Ok(true) when a key was assigned, Ok(false)
/// for blanks, comments, and ignored summary-output keys.
fn parse_line(raw: &str, line_no: usize, config: &mut RunConfig) -> Result<bool, ParseError> {
    let trimmed = raw.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(false);
    }
    let key_col = column_of(raw, raw.len() - raw.trim_start().len());
    let Some(eq) = raw.find('=') else {
        return Err(ParseError {
            line: line_no,
            column: key_col,
            message: format!("expected `key = value`, got `{trimmed}`"),
        });
    };
    let key = raw[..eq].trim();
    if key.is_empty() {
        return Err(ParseError {
            line: line_no,
            column: key_col,
            message: "missing key before `=`".into(),
        });
    }
    if key.starts_with("out_") {
        // Summary outputs; a summary file is re-loadable as a config.
        return Ok(false);
    }
    let value_raw = &raw[eq + 1..];
    let value_col = column_of(raw, eq + 1 + (value_raw.len() - value_raw.trim_start().len()));
    let value = value_raw.trim();
    if value.is_empty() {
        return Err(ParseError {
            line: line_no,
            column: value_col,
            message: format!("missing value for `{key}`"),
        });
    }

    if key == "preset" {
        reject_duplicate(config.preset.is_some(), key, line_no, key_col)?;
        reject_trailing(value, line_no, value_col)?;
        config.preset = Some(value.to_string());
        return Ok(true);
    }
    if key == "output_dir" {
        reject_duplicate(config.output_dir.is_some(), key, line_no, key_col)?;
        config.output_dir = Some(PathBuf::from(value));
        return Ok(true);
    }
    if key == "grid_points" {
        reject_duplicate(config.grid_points.is_some(), key, line_no, key_col)?;
        reject_trailing(value, line_no, value_col)?;
        let n: usize = value.parse().map_err(|_| ParseError {
            line: line_no,
            column: value_col,
            message: format!("invalid integer `{value}`"),
        })?;
        config.grid_points = Some(n);
        return Ok(true);
    }
    for (name, field) in BOOL_KEYS {
        if key == *name {
            reject_duplicate(field(config).is_some(), key, line_no, key_col)?;
            reject_trailing(value, line_no, value_col)?;
            let flag = match value {
                "true" => true,
                "false" => false,
                other => {
                    return Err(ParseError {
                        line: line_no,
                        column: value_col,
                        message: format!("expected true or false, got `{other}`"),
                    })
                }
            };
            *field(config) = Some(flag);
            return Ok(true);
        }
    }
    for (name, unit, field) in FLOAT_KEYS {
        if key == *name {
            reject_duplicate(field(config).is_some(), key, line_no, key_col)?;
            let mut tokens = value.split_whitespace();
            let number = tokens.next().expect("value is nonempty");
            let parsed: f64 = number.parse().map_err(|_| ParseError {
                line: line_no,
                column: value_col,
                message: format!("invalid number `{number}`"),
            })?;
            let rest: Vec<&str> = tokens.collect();
            match (rest.as_slice(), unit) {
                ([], _) => {}
                ([seen], Some(want)) if seen == want => {}
                (_, Some(want)) => {
                    return Err(ParseError {
                        line: line_no,
                        column: value_col + number.len() + 1,
                        message: format!(
                            "unexpected `{}` after value (unit for {key} is {want})",
                            rest.join(" ")
                        ),
                    })
                }
                (_, None) => {
                    return Err(ParseError {
                        line: line_no,
                        column: value_col + number.len() + 1,
                        message: format!("{key} is dimensionless; remove `{}`", rest.join(" ")),
                    })
                }
            }
            *field(config) = Some(parsed);
            return Ok(true);
        }
    }
    Err(ParseError {
        line: line_no,
        column: key_col,
        message: format!("unknown key `{key}`"),
    })
}

fn reject_duplicate(seen: bool, key: &str, line: usize, column: usize) -> Result<(), ParseError> {
    if seen {
        return Err(ParseError {
            line,
            column,
            message: format!("duplicate key `{key}`"),
        });
    }
    Ok(())
}

fn reject_trailing(value: &str, line: usize, column: usize) -> Result<(), ParseError> {
    if value.split_whitespace().nth(1).is_some() {
        return Err(ParseError {
            line,
            column,
            message: format!("unexpected trailing text in `{value}`"),
        });
    }
    Ok(())
}

/// 1-based character column of byte offset `byte` in `line`.
fn column_of(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}
