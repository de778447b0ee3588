//! Run manifest: enough to repeat a run and to check that two runs used the
//! same configuration. Contains no timestamps so reruns are byte-identical.

use std::io::Write;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use crate::commands::RunOutput;
use crate::config::ExperimentConfig;

pub const FILE_NAME: &str = "manifest.toml";

pub fn config_hash(config: &ExperimentConfig) -> Result<String> {
    let digest = Sha256::digest(config.to_toml()?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn write(out: &mut RunOutput, command: &str, config: &ExperimentConfig) -> Result<()> {
    let mut run = toml::Table::new();
    run.insert("tool".into(), env!("CARGO_PKG_NAME").into());
    run.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    run.insert("command".into(), command.into());
    run.insert("seed".into(), toml::Value::Integer(config.seed as i64));
    run.insert("config_sha256".into(), config_hash(config)?.into());
    let files: Vec<toml::Value> = out.files().iter().map(|f| f.as_str().into()).collect();
    run.insert("outputs".into(), toml::Value::Array(files));

    let mut doc = toml::Table::new();
    doc.insert("run".into(), toml::Value::Table(run));
    doc.insert("config".into(), toml::Value::try_from(config).context("serializing configuration")?);
    let text = toml::to_string(&doc).context("serializing manifest")?;

    let mut w = out.create(FILE_NAME)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}
