use std::path::PathBuf;

use splice_core::invariant::DEFAULT_BOUND;

use crate::commands::Failure;
use crate::Cli;

/// Effective settings: command-line flags over the config file over
/// defaults.
#[derive(Clone, Debug)]
pub struct Settings {
    pub json: bool,
    pub strict: bool,
    pub bound: u64,
    pub fixtures: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            json: false,
            strict: true,
            bound: DEFAULT_BOUND,
            fixtures: None,
        }
    }
}

fn parse_bool(value: &str, location: &str) -> Result<bool, Failure> {
    value
        .parse()
        .map_err(|_| Failure::parse(format!("expected true or false, found '{value}'"), location.to_string()))
}

impl Settings {
    pub fn resolve(cli: &Cli) -> Result<Settings, Failure> {
        let mut s = Settings::default();
        if let Some(path) = &cli.config {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(e.to_string(), path.display().to_string()))?;
            s.merge_file(&text, &path.display().to_string())?;
        }
        if cli.json {
            s.json = true;
        }
        if let Some(strict) = cli.strict {
            s.strict = strict;
        }
        if let Some(bound) = cli.bound {
            s.bound = bound;
        }
        if s.bound == 0 {
            return Err(Failure::usage("bound must be at least 1"));
        }
        Ok(s)
    }

    fn merge_file(&mut self, text: &str, path: &str) -> Result<(), Failure> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let location = format!("{path}:{}", i + 1);
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::parse("expected key=value", location));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "bound" => {
                    self.bound = value
                        .parse()
                        .map_err(|_| Failure::parse(format!("bad bound '{value}'"), location.clone()))?
                }
                "strict" => self.strict = parse_bool(value, &location)?,
                "json" => self.json = parse_bool(value, &location)?,
                "fixtures" => self.fixtures = Some(PathBuf::from(value)),
                other => return Err(Failure::parse(format!("unknown key '{other}'"), location)),
            }
        }
        Ok(())
    }
}
