use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::svg::{line_chart, Series};
use crate::{Failure, Opts};

#[derive(Serialize)]
struct Input {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    argv: Vec<String>,
    parameters: &'a Opts,
    inputs: &'a [Input],
    outputs: &'a [String],
    versions: Versions,
    outcome: &'a str,
}

#[derive(Serialize)]
struct Versions {
    cli: &'static str,
    core: &'static str,
}

/// Collects inputs and outputs of one command; the manifest is written last.
pub struct Run {
    command: &'static str,
    out: PathBuf,
    plot: bool,
    inputs: Vec<Input>,
    outputs: Vec<String>,
}

impl Run {
    pub fn new(command: &'static str, out: &Path, plot: bool) -> Result<Self, Failure> {
        fs::create_dir_all(out).map_err(|e| Failure::Input(format!("cannot create {}: {}", out.display(), e)))?;
        Ok(Run { command, out: out.to_path_buf(), plot, inputs: Vec::new(), outputs: Vec::new() })
    }

    /// Reads an input file and records its hash.
    pub fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::Input(format!("cannot read {}: {}", path.display(), e)))?;
        let digest = Sha256::digest(&bytes);
        let sha256 = digest.iter().map(|b| format!("{:02x}", b)).collect();
        self.inputs.push(Input { path: path.display().to_string(), sha256 });
        String::from_utf8(bytes).map_err(|_| Failure::Input(format!("{} is not UTF-8", path.display())))
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| Failure::Input(format!("cannot write {}: {}", path.display(), e)))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    /// Writes through a closure taking a byte buffer (for the csv writers).
    pub fn write_with(
        &mut self,
        name: &str,
        fill: impl FnOnce(&mut Vec<u8>) -> asym_mms::Result<()>,
    ) -> Result<(), Failure> {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        self.write(name, buf)
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), Failure> {
        let s = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
        self.write(name, s + "\n")
    }

    /// Only writes when `--plot` was given.
    pub fn plot(&mut self, name: &str, title: &str, x: &str, y: &str, series: &[Series]) -> Result<(), Failure> {
        if self.plot {
            self.write(name, line_chart(title, x, y, series))?;
        }
        Ok(())
    }

    pub fn finish(mut self, opts: &Opts, outcome: &Result<(), Failure>) -> Result<(), Failure> {
        let outcome = match outcome {
            Ok(()) => "ok",
            Err(Failure::Violation(_)) => "violation",
            Err(Failure::Stall(_)) => "stall",
            Err(Failure::Input(_)) => "input error",
        };
        self.outputs.push("manifest.json".into());
        let m = Manifest {
            command: self.command,
            argv: std::env::args().collect(),
            parameters: opts,
            inputs: &self.inputs,
            outputs: &self.outputs,
            versions: Versions { cli: env!("CARGO_PKG_VERSION"), core: asym_mms::VERSION },
            outcome,
        };
        let s = serde_json::to_string_pretty(&m).map_err(|e| Failure::Input(e.to_string()))?;
        fs::write(self.out.join("manifest.json"), s + "\n").map_err(|e| Failure::Input(e.to_string()))
    }
}
