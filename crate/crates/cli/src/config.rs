//! Presets and key=value config files, expanded into `--key=value` tokens
//! that clap parses ahead of the user's own flags.

use std::fmt;
use std::path::Path;

use crate::args::SUBCOMMANDS;

#[derive(Debug)]
pub enum ConfigError {
    Io(String, std::io::Error),
    Syntax { path: String, line: usize, text: String },
    UnknownPreset(String),
    PresetMismatch { preset: String, subcommand: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(p, e) => write!(f, "cannot read config {p}: {e}"),
            ConfigError::Syntax { path, line, text } => {
                write!(f, "{path}:{line}: expected key=value, got '{text}'")
            }
            ConfigError::UnknownPreset(p) => write!(f, "unknown preset '{p}' (known: {})", preset_names().join(", ")),
            ConfigError::PresetMismatch { preset, subcommand } => {
                write!(f, "preset '{preset}' does not apply to subcommand '{subcommand}'")
            }
        }
    }
}

struct Preset {
    name: &'static str,
    alias: &'static str,
    /// Subcommands the preset applies to; the first is implied when none is given.
    subcommands: &'static [&'static str],
    values: &'static [(&'static str, &'static str)],
}

const PRESETS: &[Preset] = &[
    Preset {
        name: "chsh-optimal",
        alias: "chsh-paper",
        subcommands: &["chsh", "lhv-simulate", "feasibility"],
        values: &[("alphas", "pi/2,0"), ("betas", "pi/4,-pi/4")],
    },
    Preset {
        name: "product-representation",
        alias: "theorem4",
        subcommands: &["gfactor"],
        values: &[
            ("eps1", "1"),
            ("eps2", "1"),
            ("center1", "0,0,0"),
            ("center2", "0,0,10"),
            ("box-a-lo", "1.8,-inf,-inf"),
            ("box-a-hi", "inf,inf,inf"),
            ("box-b-lo", "-2,-2,8"),
            ("box-b-hi", "2,2,12"),
            ("radius", "1.8"),
            ("representation", "true"),
            ("n", "100000"),
            ("grid", "5"),
        ],
    },
];

fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

/// `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_text(path: &str, text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { path: path.into(), line: i + 1, text: raw.into() });
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" || key == "preset" {
            return Err(ConfigError::Syntax { path: path.into(), line: i + 1, text: raw.into() });
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn flag_value<'a>(args: &'a [String], i: usize, name: &str) -> Option<(String, usize)> {
    let a = &args[i];
    let long = format!("--{name}");
    if let Some(v) = a.strip_prefix(&format!("{long}=")) {
        return Some((v.to_string(), 1));
    }
    if *a == long {
        return args.get(i + 1).map(|v: &'a String| (v.clone(), 2));
    }
    None
}

/// Rewrites `argv` so that preset values, then config-file values, precede
/// the user's flags after the subcommand name.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, ConfigError> {
    let mut preset = None;
    let mut configs = Vec::new();
    let mut rest = Vec::new();
    let mut i = 1;
    while i < argv.len() {
        if let Some((v, used)) = flag_value(&argv, i, "preset") {
            preset = Some(v);
            i += used;
        } else if let Some((v, used)) = flag_value(&argv, i, "config") {
            configs.push(v);
            i += used;
        } else {
            rest.push(argv[i].clone());
            i += 1;
        }
    }
    let mut sub_pos = rest.iter().position(|a| SUBCOMMANDS.contains(&a.as_str()));

    let mut injected = Vec::new();
    if let Some(name) = &preset {
        let p = PRESETS.iter().find(|p| p.name == name || p.alias == name).ok_or_else(|| ConfigError::UnknownPreset(name.clone()))?;
        let subcommand = match sub_pos {
            Some(k) => rest[k].clone(),
            None => {
                rest.insert(0, p.subcommands[0].to_string());
                sub_pos = Some(0);
                p.subcommands[0].to_string()
            }
        };
        if !p.subcommands.contains(&subcommand.as_str()) {
            return Err(ConfigError::PresetMismatch { preset: name.clone(), subcommand });
        }
        injected.push(format!("--preset={}", p.name));
        injected.extend(p.values.iter().map(|(k, v)| format!("--{k}={v}")));
    }
    for path in &configs {
        let text = std::fs::read_to_string(Path::new(path)).map_err(|e| ConfigError::Io(path.clone(), e))?;
        injected.extend(parse_config_text(path, &text)?.into_iter().map(|(k, v)| format!("--{k}={v}")));
    }

    let mut out = vec![argv[0].clone()];
    match sub_pos {
        Some(k) => {
            out.extend_from_slice(&rest[..=k]);
            out.extend(injected);
            out.extend_from_slice(&rest[k + 1..]);
        }
        // no subcommand: let clap report it
        None => out.extend(rest),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn config_lines() {
        let kv = parse_config_text("c", "# header\nn_per_axis = 32  # trailing\n\nseed=4\n").unwrap();
        assert_eq!(kv, vec![("n-per-axis".into(), "32".into()), ("seed".into(), "4".into())]);
        assert!(parse_config_text("c", "oops\n").is_err());
        assert!(parse_config_text("c", "preset=x\n").is_err());
    }

    #[test]
    fn preset_goes_before_user_flags() {
        let out = expand(argv("belltime gfactor --n 2000 --preset product-representation")).unwrap();
        assert_eq!(out[1], "gfactor");
        let preset_n = out.iter().position(|a| a == "--n=100000").unwrap();
        let user_n = out.iter().position(|a| a == "2000").unwrap();
        assert!(preset_n < user_n);
    }

    #[test]
    fn preset_implies_subcommand() {
        let out = expand(argv("belltime --preset chsh-optimal --seed 3")).unwrap();
        assert_eq!(out[1], "chsh");
        assert!(matches!(expand(argv("belltime vacuum --preset product-representation")), Err(ConfigError::PresetMismatch { .. })));
        assert!(matches!(expand(argv("belltime --preset nope")), Err(ConfigError::UnknownPreset(_))));
    }
}
