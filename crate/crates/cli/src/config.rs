//! Plain-text `key=value` configuration files and run manifests.
//!
//! A config file holds one `key=value` per line; `#` starts a comment. Keys
//! are the long flag names of the subcommand (`eps-class=0.05`), plus the
//! optional `subcommand=NAME`. Values from the file are inserted before the
//! command-line flags, so flags given on the command line win. A manifest is
//! a config file: feeding it back with `--config` (or `replay`) re-runs the
//! same command.

use std::collections::BTreeMap;
use std::path::Path;

use clap::Command;
use pcontest::{Error, Result};

/// Keys of a manifest that are informational and not flags.
const INFO_KEYS: [&str; 2] = ["pcontest_version", "subcommand"];

/// Ordered `key=value` pairs of a config file.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("config line {}: expected key=value, got {raw:?}", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Usage(format!("config line {}: empty key", i + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn read_config(path: &str) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("config file {path}: {e}")))?;
    parse_config(&text)
}

/// Finds the value of `--config` in `args` (either `--config F` or `--config=F`).
fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

/// Rewrites `argv` so that a `--config` file (or a `replay FILE` manifest)
/// contributes its values as flags placed before those on the command line.
pub fn expand_argv(cmd: &Command, argv: Vec<String>) -> Result<Vec<String>> {
    if argv.len() < 2 {
        return Ok(argv);
    }
    let mut rest: Vec<String> = argv[1..].to_vec();
    let mut path = None;
    if rest[0] == "replay" {
        if rest.len() != 2 {
            return Err(Error::Usage("usage: pcontest replay MANIFEST".into()));
        }
        path = Some(rest[1].clone());
        rest.clear();
    } else if let Some(p) = config_path(&rest) {
        path = Some(p);
    }
    let Some(path) = path else { return Ok(argv) };
    let entries = read_config(&path)?;
    let from_file = entries.iter().find(|(k, _)| k == "subcommand").map(|(_, v)| v.clone());
    let sub_name = match rest.first() {
        Some(s) if !s.starts_with('-') => {
            if let Some(f) = &from_file {
                if f != s {
                    return Err(Error::Usage(format!("config file is for {f:?}, not {s:?}")));
                }
            }
            rest.remove(0)
        }
        _ => from_file.ok_or_else(|| Error::Usage("no subcommand given and none in the config file".into()))?,
    };
    let sub = cmd
        .find_subcommand(&sub_name)
        .ok_or_else(|| Error::Usage(format!("unknown subcommand {sub_name:?}")))?;
    let mut out = vec![argv[0].clone(), sub_name.clone()];
    for (k, v) in &entries {
        if INFO_KEYS.contains(&k.as_str()) {
            continue;
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(k.as_str()))
            .ok_or_else(|| Error::Usage(format!("unknown key {k:?} for {sub_name}")))?;
        if arg.get_action().takes_values() {
            out.push(format!("--{k}"));
            out.push(v.clone());
        } else {
            match v.as_str() {
                "true" => out.push(format!("--{k}")),
                "false" => {}
                other => return Err(Error::Usage(format!("key {k:?} expects true or false, got {other:?}"))),
            }
        }
    }
    out.extend(rest);
    Ok(out)
}

/// Flattens the serialized arguments of a subcommand into manifest entries
/// with kebab-case keys. `None` values and `false` flags are omitted.
pub fn manifest_entries<T: serde::Serialize>(sub: &str, args: &T) -> Result<Vec<(String, String)>> {
    let v = serde_json::to_value(args)?;
    let obj = v.as_object().ok_or_else(|| Error::Io("arguments must serialize to an object".into()))?;
    let mut map = BTreeMap::new();
    for (k, v) in obj {
        let s = match v {
            serde_json::Value::Null | serde_json::Value::Bool(false) => continue,
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        map.insert(k.replace('_', "-"), s);
    }
    let mut out = vec![("subcommand".to_string(), sub.to_string())];
    out.extend(map);
    Ok(out)
}

/// Writes the manifest next to `out` (`<out>.manifest`) or to stderr.
pub fn emit_manifest(entries: &[(String, String)], out: Option<&Path>) -> Result<()> {
    let text = pcontest::report::manifest(entries);
    match out {
        Some(p) => {
            let mut name = p.as_os_str().to_owned();
            name.push(".manifest");
            std::fs::write(&name, text)?;
        }
        None => eprint!("{text}"),
    }
    Ok(())
}
