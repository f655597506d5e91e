//! Output routing: files under a directory, or the primary artifact on
//! stdout when the target is `-`.

use std::io::Write;
use std::path::PathBuf;

use tweezers_core::Spectrum;

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct WriteError {
    pub path: String,
    #[source]
    pub source: std::io::Error,
}

pub enum Sink {
    Directory(PathBuf),
    Stdout,
}

impl Sink {
    pub fn new(target: &str) -> Result<Self, WriteError> {
        if target == "-" {
            return Ok(Sink::Stdout);
        }
        let dir = PathBuf::from(target);
        std::fs::create_dir_all(&dir).map_err(|source| WriteError {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Sink::Directory(dir))
    }

    /// Writes a named artifact. In stdout mode only primary artifacts are
    /// emitted; the rest are skipped.
    pub fn write(&self, name: &str, contents: &str, primary: bool) -> Result<(), WriteError> {
        match self {
            Sink::Directory(dir) => {
                let path = dir.join(name);
                std::fs::write(&path, contents).map_err(|source| WriteError {
                    path: path.display().to_string(),
                    source,
                })
            }
            Sink::Stdout => {
                if primary {
                    let mut out = std::io::stdout().lock();
                    out.write_all(contents.as_bytes()).map_err(|source| WriteError {
                        path: "<stdout>".into(),
                        source,
                    })?;
                }
                Ok(())
            }
        }
    }

    pub fn write_spectrum(
        &self,
        name: &str,
        spec: &Spectrum,
        primary: bool,
    ) -> Result<(), WriteError> {
        self.write(name, &spec.to_csv_string(), primary)?;
        let meta = serde_json::json!({
            "band_label": spec.band.as_str(),
            "resolution_rad_per_s": spec.resolution,
        });
        self.write(&format!("{name}.meta.json"), &format!("{meta:#}\n"), false)
    }
}
