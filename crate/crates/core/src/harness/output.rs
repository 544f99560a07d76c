use crate::background::{RESIDUAL_TOL, SIGN_CONVENTION};
use crate::config::RunConfig;
use crate::Result;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub config: RunConfig,
    pub seed: u64,
    pub a_list: Vec<f64>,
    pub sign_convention: &'static str,
    pub residual_tol: f64,
    pub gmres_tol: f64,
    pub equivalent_h: Option<f64>,
    pub background_h: Option<f64>,
    pub threads: Option<usize>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            config: config.clone(),
            seed: config.seed,
            a_list: config.a_list.clone(),
            sign_convention: SIGN_CONVENTION,
            residual_tol: RESIDUAL_TOL,
            gmres_tol: config.solver.gmres_tol,
            equivalent_h: None,
            background_h: None,
            threads: None,
            outputs: Vec::new(),
        }
    }
}

/// Output directory that records the files written into it.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    pub fn write(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let mut w = BufWriter::new(File::create(self.root.join(name))?);
        f(&mut w)?;
        w.flush()?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Writes `manifest.json` listing every file written so far.
    pub fn finish(mut self, mut manifest: RunManifest) -> Result<()> {
        manifest.outputs = self.written.clone();
        self.json("manifest.json", &manifest)
    }
}

/// File-name tag for a value of `a`, e.g. `0.035` → `a0.035`.
pub fn a_tag(a: f64) -> String {
    format!("a{a}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(&dir.path().join("run")).unwrap();
        out.write("x.csv", |w| Ok(writeln!(w, "a,b")?)).unwrap();
        let cfg = RunConfig::default();
        out.finish(RunManifest::new("simulate", &cfg)).unwrap();
        let m: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("run/manifest.json")).unwrap()).unwrap();
        assert_eq!(m["outputs"], serde_json::json!(["x.csv"]));
        assert_eq!(m["seed"], serde_json::json!(cfg.seed));
        assert_eq!(a_tag(0.035), "a0.035");
    }
}
