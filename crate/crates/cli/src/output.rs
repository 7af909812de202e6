//! Invocation context and output files.

use std::fs;
use std::path::{Path, PathBuf};

use altproj_core::engine::Trace;
use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{ExperimentConfig, LoadedConfig};

pub struct Ctx {
    pub config: ExperimentConfig,
    pub sha256: String,
    pub seed: u64,
    pub max_iter: Option<usize>,
    pub out_dir: PathBuf,
    pub quiet: bool,
}

impl Ctx {
    pub fn new(loaded: LoadedConfig, seed: Option<u64>, max_iter: Option<usize>, out_dir: PathBuf, quiet: bool) -> Self {
        let seed = seed.unwrap_or(loaded.config.rng_seed);
        let max_iter = max_iter.or(loaded.config.max_iter);
        Ctx {
            config: loaded.config,
            sha256: loaded.sha256,
            seed,
            max_iter,
            out_dir,
            quiet,
        }
    }

    pub fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    /// Header lines identifying the run; identical inputs give identical headers.
    pub fn header(&self) -> Vec<String> {
        vec![
            format!("config_sha256: {}", self.sha256),
            format!("seed: {}", self.seed),
            format!("experiment: {}", self.config.experiment.kind()),
        ]
    }

    fn path(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out_dir)
            .with_context(|| format!("cannot create output directory {}", self.out_dir.display()))?;
        Ok(self.out_dir.join(name))
    }

    pub fn write_trace(&self, trace: &Trace) -> Result<Vec<PathBuf>> {
        let csv = self.path(&self.config.output.csv)?;
        write_file(&csv, trace.to_csv_string(&self.header()).as_bytes())?;
        let mut written = vec![csv];
        if let Some(name) = &self.config.output.json {
            let path = self.path(name)?;
            #[derive(Serialize)]
            struct Doc<'a> {
                config_sha256: &'a str,
                seed: u64,
                trace: &'a Trace,
            }
            let doc = Doc {
                config_sha256: &self.sha256,
                seed: self.seed,
                trace,
            };
            write_file(&path, serde_json::to_string(&doc)?.as_bytes())?;
            written.push(path);
        }
        Ok(written)
    }

    /// Writes `{config_sha256, seed, experiment, ...body}` to the report file.
    pub fn write_report<T: Serialize>(&self, body: &T) -> Result<PathBuf> {
        let mut doc = serde_json::json!({
            "config_sha256": self.sha256,
            "seed": self.seed,
            "experiment": self.config.experiment.kind(),
        });
        if let (Some(obj), serde_json::Value::Object(extra)) = (doc.as_object_mut(), serde_json::to_value(body)?) {
            obj.extend(extra);
        }
        let path = self.path(&self.config.output.report)?;
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        write_file(&path, text.as_bytes())?;
        Ok(path)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}
