use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;

use super::{Cli, CliError, CliResult};
use crate::error::Error;

/// Reads `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config_file(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::from(e),
    })?;
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            column: 1,
            message: format!("expected `key = value`, got {line:?}"),
        })?;
        pairs.push((key.trim().replace('_', "-"), value.trim().to_string()));
    }
    Ok(pairs)
}

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
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

/// Inserts the settings of a `--config` file right after the subcommand
/// name so that explicit flags, which come later, override them.
pub fn merge_config(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let pairs = parse_config_file(Path::new(&path))?;
    let root = Cli::command();
    let names: Vec<String> = root
        .get_subcommands()
        .map(|c| c.get_name().to_string())
        .collect();
    let Some(pos) = argv
        .iter()
        .position(|a| names.iter().any(|n| a.to_string_lossy() == *n))
    else {
        return Ok(argv);
    };
    let sub_name = argv[pos].to_string_lossy().into_owned();
    let sub = root
        .find_subcommand(&sub_name)
        .expect("name came from the command list");
    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in pairs {
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config" && key != "help")
            .ok_or_else(|| CliError::UnknownFlag(format!("unknown config key '{key}'")))?;
        if arg.get_action().takes_values() {
            injected.push(format!("--{key}={value}").into());
        } else {
            match value.as_str() {
                "true" | "yes" | "1" => injected.push(format!("--{key}").into()),
                "false" | "no" | "0" => {}
                _ => {
                    return Err(CliError::ConflictingOptions(format!(
                        "config key '{key}' is a switch; use true or false, not {value:?}"
                    )))
                }
            }
        }
    }
    let mut merged = argv[..=pos].to_vec();
    merged.extend(injected);
    merged.extend_from_slice(&argv[pos + 1..]);
    Ok(merged)
}
