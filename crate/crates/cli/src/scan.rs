//! Source scanning: per-file metrics, MI and band for every recognised file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use maintix::mi::{Band, MiScore, MiVariant};
use maintix::srcmetrics::{file_mi, FileMetrics, LanguageProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub path: PathBuf,
    pub language: Option<String>,
    pub metrics: Option<FileMetrics>,
    pub mi: Option<MiScore>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub variant: MiVariant,
    pub records: Vec<ScanRecord>,
    /// Band counts over records with a band (clamped variants only).
    pub bands: BTreeMap<String, usize>,
    pub errors: usize,
}

impl ScanReport {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:<40} {:>6} {:>6} {:>7} {:>7} {:>10} {:>4} {:>6} {:>9}  band\n",
            "path", "eta1", "eta2", "N1", "N2", "volume", "cc", "loc", "mi"
        );
        for r in &self.records {
            let path = r.path.display().to_string();
            match (&r.metrics, &r.mi, &r.error) {
                (Some(m), Some(mi), _) => s.push_str(&format!(
                    "{:<40} {:>6} {:>6} {:>7} {:>7} {:>10.3} {:>4} {:>6} {:>9.4}  {}\n",
                    path,
                    m.eta1,
                    m.eta2,
                    m.n1,
                    m.n2,
                    m.volume,
                    m.cyclomatic,
                    m.loc_source,
                    mi.value,
                    mi.band.map(|b| b.to_string()).unwrap_or_else(|| "-".into())
                )),
                (_, _, Some(e)) => s.push_str(&format!("{path:<40} error: {e}\n")),
                _ => s.push_str(&format!("{path:<40} -\n")),
            }
        }
        let hist: Vec<String> = self.bands.iter().map(|(b, n)| format!("{b}={n}")).collect();
        s.push_str(&format!(
            "{} files, {} errors; bands: {}\n",
            self.records.len(),
            self.errors,
            if hist.is_empty() { "-".into() } else { hist.join(" ") }
        ));
        s
    }
}

fn collect(paths: &[PathBuf], explicit_profile: bool) -> Vec<(PathBuf, bool)> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            for entry in WalkDir::new(p).sort_by_file_name() {
                match entry {
                    Ok(e) if e.file_type().is_file() => {
                        let known = e
                            .path()
                            .extension()
                            .and_then(|x| x.to_str())
                            .and_then(LanguageProfile::for_extension)
                            .is_some();
                        if known || explicit_profile {
                            files.push((e.path().to_path_buf(), true));
                        }
                    }
                    Ok(_) => {}
                    Err(e) => {
                        let path = e.path().map(Path::to_path_buf).unwrap_or_else(|| p.clone());
                        files.push((path, false));
                    }
                }
            }
        } else {
            files.push((p.clone(), p.is_file()));
        }
    }
    files.sort();
    files.dedup();
    files
}

fn scan_file(path: &Path, readable: bool, profile: Option<&LanguageProfile>, variant: MiVariant) -> ScanRecord {
    let mut record = ScanRecord {
        path: path.to_path_buf(),
        language: None,
        metrics: None,
        mi: None,
        error: None,
    };
    let profile = match profile.cloned().or_else(|| {
        path.extension()
            .and_then(|x| x.to_str())
            .and_then(LanguageProfile::for_extension)
    }) {
        Some(p) => p,
        None => {
            record.error = Some("unrecognised file extension; pass --profile".into());
            return record;
        }
    };
    record.language = Some(profile.name.to_string());
    if !readable {
        record.error = Some("not a readable file".into());
        return record;
    }
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    match file_mi(&String::from_utf8_lossy(&bytes), &profile, variant) {
        Ok((m, score)) => {
            record.metrics = Some(m);
            record.mi = Some(score);
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Scans files and directories (recursively, recognised extensions only).
/// Per-file failures are recorded and the scan continues.
pub fn scan(paths: &[PathBuf], profile: Option<&LanguageProfile>, variant: MiVariant) -> ScanReport {
    let records: Vec<ScanRecord> = collect(paths, profile.is_some())
        .into_iter()
        .map(|(p, readable)| scan_file(&p, readable, profile, variant))
        .collect();
    let mut bands = BTreeMap::new();
    for band in records.iter().filter_map(|r| r.mi.and_then(|m| m.band)) {
        *bands.entry(band_name(band).to_string()).or_insert(0) += 1;
    }
    let errors = records.iter().filter(|r| r.error.is_some()).count();
    ScanReport {
        variant,
        records,
        bands,
        errors,
    }
}

fn band_name(b: Band) -> &'static str {
    match b {
        Band::Red => "Red",
        Band::Yellow => "Yellow",
        Band::Green => "Green",
    }
}
