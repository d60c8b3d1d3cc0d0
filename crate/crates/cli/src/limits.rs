use anyhow::{bail, Context, Result};
use schemata::engine::Limits;

use crate::LimitFlags;

pub const ENV: &str = "SCHEMATA_LIMITS";

/// Parses `key=value` pairs separated by commas. Keys: `threads`,
/// `max_states`, `max_depth`, `memo`.
pub fn parse_env(text: &str, mut limits: Limits) -> Result<Limits> {
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .with_context(|| format!("{ENV}: expected key=value, got `{item}`"))?;
        let value: usize = value
            .trim()
            .parse()
            .with_context(|| format!("{ENV}: `{key}` needs a number"))?;
        match key.trim().replace('-', "_").as_str() {
            "threads" => limits.threads = value,
            "max_states" => limits.max_states = value,
            "max_depth" => limits.max_depth = value,
            "memo" => limits.memo_capacity = value,
            other => bail!("{ENV}: unknown key `{other}`"),
        }
    }
    Ok(limits)
}

/// Defaults, then the environment, then flags.
pub fn resolve(flags: &LimitFlags, env: Option<&str>) -> Result<Limits> {
    let mut limits = match env {
        Some(text) => parse_env(text, Limits::default())?,
        None => Limits::default(),
    };
    if let Some(t) = flags.threads {
        limits.threads = t;
    }
    if let Some(s) = flags.max_states {
        limits.max_states = s;
    }
    if let Some(d) = flags.max_depth {
        limits.max_depth = d;
    }
    if let Some(m) = flags.memo {
        limits.memo_capacity = m;
    }
    if limits.threads == 0 {
        bail!("--threads must be at least 1");
    }
    Ok(limits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_env() {
        let flags = LimitFlags {
            threads: Some(2),
            ..LimitFlags::default()
        };
        let l = resolve(&flags, Some("threads=8, max_states=10")).unwrap();
        assert_eq!((l.threads, l.max_states), (2, 10));
    }

    #[test]
    fn bad_env_is_an_error() {
        assert!(parse_env("speed=3", Limits::default()).is_err());
        assert!(parse_env("threads", Limits::default()).is_err());
        assert!(parse_env("threads=x", Limits::default()).is_err());
    }
}
