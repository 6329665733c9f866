//! On-disk formats: CSV tables, nodal field dumps, PGM vorticity images and
//! the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::{CavityResult, ConvergenceResult, DecayResult, ProbeResult, StabilityTable, StokesStudy};
use crate::grid::{ScalarField, VectorField};
use crate::ops::vorticity;
use crate::timestep::{Snapshot, StepDiagnostics};

pub const DIAGNOSTICS_HEADER: &str = "step,t,energy,grad_u_sq,lap_u_sq,div_u_sq,grad_ps_sq,grad_pe_sq,stokes_ratio,compat_corr";
pub const MANIFEST_NAME: &str = "manifest.json";

/// C `printf("%.12e")`.
pub fn fmt_e12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

/// Joins already formatted cells into CSV lines, LF terminated.
pub fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn diagnostics_csv(series: &[StepDiagnostics]) -> String {
    csv_table(
        DIAGNOSTICS_HEADER,
        series.iter().map(|d| {
            let mut row = vec![d.step.to_string()];
            row.extend(
                [
                    d.t,
                    d.energy,
                    d.grad_u_sq,
                    d.lap_u_sq,
                    d.div_u_sq,
                    d.grad_ps_sq,
                    d.grad_pe_sq,
                    d.stokes_ratio,
                    d.compat_corr,
                ]
                .map(fmt_e12),
            );
            row
        }),
    )
}

/// Nodal values, one line per `j` row starting at `y = 0`.
pub fn field_csv(f: &ScalarField) -> String {
    let grid = f.grid();
    let mut out = String::new();
    for j in 0..=grid.ny() {
        for i in 0..=grid.nx() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&fmt_e12(f.get(i, j)));
        }
        out.push('\n');
    }
    out
}

/// Binary 8-bit PGM of `ω` mapped linearly from `[−m, m]` to `[0, 255]`,
/// `m = max|ω|`; the first image row is `y = 1`. Returns the bytes and `m`.
pub fn vorticity_pgm(omega: &ScalarField) -> (Vec<u8>, f64) {
    let grid = omega.grid();
    let m = omega.max_abs();
    let (w, h) = (grid.nx() + 1, grid.ny() + 1);
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    for j in (0..h).rev() {
        for i in 0..w {
            let v = if m > 0.0 && m.is_finite() {
                (127.5 * (omega.get(i, j) / m + 1.0)).round().clamp(0.0, 255.0) as u8
            } else {
                128
            };
            out.push(v);
        }
    }
    (out, m)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid("path", format!("{} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Completed,
    BlewUp { step: usize, t: f64 },
    Error { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Canonical config; parses back to the same config.
    pub config: Value,
    /// Command-line overrides.
    pub args: Value,
    /// Seconds since the Unix epoch.
    pub start_time: f64,
    pub end_time: f64,
    pub outcome: Outcome,
    pub files: Vec<FileEntry>,
    /// `max|ω|` of each vorticity image, keyed by file name.
    pub vorticity_max: BTreeMap<String, f64>,
}

pub fn unix_time() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// An output directory that remembers what was written to it.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<FileEntry>,
    vorticity_max: BTreeMap<String, f64>,
    start_time: f64,
}

impl OutputDir {
    pub fn create(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            files: Vec::new(),
            vorticity_max: BTreeMap::new(),
            start_time: unix_time(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        let entry = FileEntry {
            name: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        };
        match self.files.iter_mut().find(|f| f.name == name) {
            Some(f) => *f = entry,
            None => self.files.push(entry),
        }
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// `u1_<step>.csv`, `u2_<step>.csv`, `p_<step>.csv`, `vorticity_<step>.pgm`.
    pub fn write_snapshot(&mut self, snap: &Snapshot<'_>) -> Result<()> {
        let step = snap.step;
        self.write(&format!("u1_{step}.csv"), field_csv(&snap.u.u1).as_bytes())?;
        self.write(&format!("u2_{step}.csv"), field_csv(&snap.u.u2).as_bytes())?;
        let p = snap.parts.total(snap.nu)?;
        self.write(&format!("p_{step}.csv"), field_csv(&p).as_bytes())?;
        self.write_vorticity(step, snap.u)
    }

    /// `vorticity_<step>.pgm`, with `max|ω|` kept for the manifest.
    pub fn write_vorticity(&mut self, step: usize, u: &VectorField) -> Result<()> {
        let name = format!("vorticity_{step}.pgm");
        let (pgm, m) = vorticity_pgm(&vorticity(u));
        self.write(&name, &pgm)?;
        self.vorticity_max.insert(name, m);
        Ok(())
    }

    /// Writes `manifest.json` listing every file written so far.
    pub fn finish(self, command: &str, config: Value, args: Value, outcome: Outcome) -> Result<RunManifest> {
        let manifest = RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            args,
            start_time: self.start_time,
            end_time: unix_time(),
            outcome,
            files: self.files,
            vorticity_max: self.vorticity_max,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        write_atomic(&self.dir.join(MANIFEST_NAME), text.as_bytes())?;
        Ok(manifest)
    }
}

/// Checks a run directory against its manifest. Returns one message per
/// problem: listed files missing or changed, and unlisted files present.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(dir.join(MANIFEST_NAME))?;
    let manifest: RunManifest = serde_json::from_str(&text)?;
    let mut problems = Vec::new();
    for f in &manifest.files {
        match fs::read(dir.join(&f.name)) {
            Ok(bytes) => {
                if sha256_hex(&bytes) != f.sha256 || bytes.len() as u64 != f.bytes {
                    problems.push(format!("{}: checksum mismatch", f.name));
                }
            }
            Err(_) => problems.push(format!("{}: missing", f.name)),
        }
    }
    for entry in fs::read_dir(dir)? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if name != MANIFEST_NAME && !manifest.files.iter().any(|f| f.name == name) {
            problems.push(format!("{name}: not listed"));
        }
    }
    problems.sort();
    Ok(problems)
}

fn flag(b: bool) -> String {
    u8::from(b).to_string()
}

pub fn stokes_csv(study: &StokesStudy) -> String {
    csv_table(
        "index,grad_ps_sq,lap_u_sq,grad_u_sq,ratio,skipped",
        study.rows.iter().map(|r| {
            let mut row = vec![r.index.to_string()];
            row.extend([r.grad_ps_sq, r.lap_u_sq, r.grad_u_sq, r.ratio].map(fmt_e12));
            row.push(flag(r.skipped));
            row
        }),
    )
}

pub fn stability_csv(table: &StabilityTable) -> String {
    csv_table(
        "dt,steps,sup_grad_u_sq,sum_lap_dt,final_energy,blew_up,blow_up_step",
        table.rows.iter().map(|r| {
            vec![
                fmt_e12(r.dt),
                r.steps.to_string(),
                fmt_e12(r.sup_grad_u_sq),
                fmt_e12(r.sum_lap_dt),
                fmt_e12(r.final_energy),
                flag(r.blew_up),
                r.blow_up_step.map_or(String::new(), |s| s.to_string()),
            ]
        }),
    )
}

pub fn decay_csv(result: &DecayResult) -> String {
    csv_table(
        "step,t,div_norm",
        result
            .times
            .iter()
            .zip(&result.div_norms)
            .enumerate()
            .map(|(k, (&t, &d))| vec![k.to_string(), fmt_e12(t), fmt_e12(d)]),
    )
}

pub fn convergence_csv(result: &ConvergenceResult) -> String {
    let rows = result
        .spatial
        .iter()
        .map(|r| ("spatial", r))
        .chain(result.temporal.iter().map(|r| ("temporal", r)));
    csv_table(
        "study,n,dt,error",
        rows.map(|(kind, r)| vec![kind.to_string(), r.n.to_string(), fmt_e12(r.dt), fmt_e12(r.error)]),
    )
}

/// Both centerline profiles; `line` is `vertical` (`x = 1/2`, velocity
/// `u1`) or `horizontal` (`y = 1/2`, velocity `u2`).
pub fn cavity_csv(result: &CavityResult) -> String {
    let rows = result
        .vertical_centerline
        .iter()
        .map(|p| ("vertical", p))
        .chain(result.horizontal_centerline.iter().map(|p| ("horizontal", p)));
    csv_table(
        "line,coord,velocity",
        rows.map(|(line, &(c, v))| vec![line.to_string(), fmt_e12(c), fmt_e12(v)]),
    )
}

pub fn probe_csv(result: &ProbeResult) -> String {
    csv_table(
        "index,ratio",
        result.ratios.iter().enumerate().map(|(k, &r)| vec![k.to_string(), fmt_e12(r)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid2D, VectorField};

    #[test]
    fn e12_matches_c_printf() {
        assert_eq!(fmt_e12(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e12(1.0), "1.000000000000e+00");
        assert_eq!(fmt_e12(-2.5e-7), "-2.500000000000e-07");
        assert_eq!(fmt_e12(6.02214076e123), "6.022140760000e+123");
        assert_eq!(fmt_e12(1e-300), "1.000000000000e-300");
        assert_eq!(fmt_e12(f64::NAN), "nan");
        assert_eq!(fmt_e12(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn empty_series_is_header_only() {
        assert_eq!(diagnostics_csv(&[]), format!("{DIAGNOSTICS_HEADER}\n"));
    }

    #[test]
    fn zero_field_gives_mid_gray() {
        let grid = Grid2D::new(9, 8).unwrap();
        let (pgm, m) = vorticity_pgm(&ScalarField::zeros(grid));
        assert_eq!(m, 0.0);
        let header = b"P5\n10 9\n255\n";
        assert_eq!(&pgm[..header.len()], header);
        assert!(pgm[header.len()..].iter().all(|&b| b == 128));
        assert_eq!(pgm.len(), header.len() + 90);
    }

    #[test]
    fn rigid_rotation_gives_constant_image() {
        let grid = Grid2D::square(8).unwrap();
        let u = VectorField::from_fn(grid, |x, y| [-y, x]);
        let (pgm, m) = vorticity_pgm(&vorticity(&u));
        assert!((m - 2.0).abs() < 1e-12);
        let body = &pgm[b"P5\n9 9\n255\n".len()..];
        assert!(body.iter().all(|&b| b == 255));
    }

    #[test]
    fn pgm_top_row_is_y_one() {
        let grid = Grid2D::square(8).unwrap();
        let f = ScalarField::from_fn(grid, |_, y| y - 0.5);
        let (pgm, _) = vorticity_pgm(&f);
        let body = &pgm[b"P5\n9 9\n255\n".len()..];
        assert!(body[..9].iter().all(|&b| b == 255));
        assert!(body[36..45].iter().all(|&b| b == 128));
        assert!(body[72..].iter().all(|&b| b == 0));
    }

    #[test]
    fn field_csv_rows_are_j_rows() {
        let grid = Grid2D::new(8, 10).unwrap();
        let f = ScalarField::from_fn(grid, |x, y| 8.0 * x + 100.0 * y);
        let text = field_csv(&f);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 11);
        assert!(lines[1].starts_with("1.000000000000e+01,1.100000000000e+01,"));
        assert_eq!(lines[1].split(',').count(), 9);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn manifest_lists_and_verifies_files() {
        let tmp = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(tmp.path().join("run")).unwrap();
        out.write("a.csv", b"x\n1\n").unwrap();
        out.write("a.csv", b"x\n2\n").unwrap();
        out.write("b.txt", b"hello").unwrap();
        let m = out.finish("test", serde_json::json!({}), serde_json::json!({}), Outcome::Completed).unwrap();
        assert_eq!(m.files.len(), 2);
        assert_eq!(m.files[1].sha256, "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824");
        let dir = tmp.path().join("run");
        assert!(verify_manifest(&dir).unwrap().is_empty());
        fs::write(dir.join("a.csv"), b"tampered").unwrap();
        fs::write(dir.join("c.csv"), b"").unwrap();
        assert_eq!(verify_manifest(&dir).unwrap(), vec!["a.csv: checksum mismatch", "c.csv: not listed"]);
    }

    #[test]
    fn outcome_serializes_with_status_tag() {
        let v = serde_json::to_value(Outcome::BlewUp { step: 3, t: 0.3 }).unwrap();
        assert_eq!(v, serde_json::json!({"status": "blew-up", "step": 3, "t": 0.3}));
    }
}
