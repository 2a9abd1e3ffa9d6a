//! Table and manifest emission.
//!
//! Every float is serialized in scientific notation with 13 significant
//! digits so that nothing at the 1e-5 scale is quantized by formatting, and
//! all output is a pure function of the effective configuration: running the
//! same command twice produces byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::CliError;

/// Scientific notation, 12 fractional digits.
pub fn sci(x: f64) -> String {
    format!("{x:.12e}")
}

/// Optional cell: absent values serialize as an empty field.
pub fn opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

/// Compact label for file names, e.g. 1e-4.
pub fn eps_label(eps0: f64) -> String {
    format!("{eps0:e}")
}

pub struct OutDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(OutDir {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write_csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), CliError> {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write_text(name, &text)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes manifest.toml recording the tool version, the command, the
    /// emitted files, and the complete effective configuration. The manifest
    /// is itself a valid `--config` file.
    pub fn write_manifest(
        &mut self,
        command: &str,
        notes: &[(&str, String)],
        cfg: &ExperimentConfig,
    ) -> Result<(), CliError> {
        let mut meta = toml::Table::new();
        meta.insert("tool".into(), toml::Value::String("wprelay".into()));
        meta.insert(
            "version".into(),
            toml::Value::String(env!("CARGO_PKG_VERSION").into()),
        );
        meta.insert("command".into(), toml::Value::String(command.into()));
        for (key, value) in notes {
            meta.insert((*key).into(), toml::Value::String(value.clone()));
        }
        meta.insert(
            "files".into(),
            toml::Value::Array(
                self.files
                    .iter()
                    .map(|f| toml::Value::String(f.clone()))
                    .collect(),
            ),
        );

        let cfg_text = toml::to_string(cfg)
            .map_err(|e| CliError::Numerical(format!("cannot serialize config: {e}")))?;
        let mut root: toml::Table = toml::from_str(&cfg_text)
            .map_err(|e| CliError::Numerical(format!("config round-trip failed: {e}")))?;
        root.insert("manifest".into(), toml::Value::Table(meta));

        let text = toml::to_string_pretty(&root)
            .map_err(|e| CliError::Numerical(format!("cannot serialize manifest: {e}")))?;
        self.write_text("manifest.toml", &text)
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }
}
