//! Flat `key = value` config files.
//!
//! Each line becomes `--key value` inserted right after the subcommand, so
//! flags given on the command line come later and win. `true` turns a key
//! into a bare switch, `false` drops it, and whitespace splits multi-value
//! keys (`measure-rate = 1 0`). `#` starts a comment.

use std::ffi::OsString;
use std::fs;

pub fn parse(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => return Err(format!("config line {}: expected key = value", lineno + 1)),
        };
        if key.is_empty() || key == "config" {
            return Err(format!("config line {}: bad key '{key}'", lineno + 1));
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            "true" => out.push(flag),
            "false" => {}
            _ => {
                out.push(flag);
                out.extend(value.split_whitespace().map(str::to_string));
            }
        }
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Splices the config file named by `--config` into `argv`.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    if argv.len() < 2 || argv[1].to_string_lossy().starts_with('-') {
        return Ok(argv);
    }
    let Some(path) = config_path(&argv[2..]) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let extra = parse(&text)?;
    let mut out: Vec<OsString> = argv[..2].to_vec();
    out.extend(extra.into_iter().map(OsString::from));
    out.extend(argv[2..].iter().cloned());
    Ok(out)
}
