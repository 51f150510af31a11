//! CSV tables, the run manifest and standalone SVG plots.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Floats carry 17 significant digits so files round-trip exactly.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Debug, Serialize)]
struct FileEntry {
    name: String,
    sha256: String,
    bytes: usize,
}

#[derive(Debug, Serialize)]
struct TaskSeed {
    task: String,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    code_version: &'a str,
    config_sha256: &'a str,
    config: &'a serde_json::Value,
    workers: usize,
    started_unix: u64,
    finished_unix: u64,
    seeds: &'a [TaskSeed],
    files: &'a [FileEntry],
    invariants_passed: bool,
}

/// Collects the files of one run and writes `manifest.json` at the end.
pub struct RunOutput {
    dir: PathBuf,
    command: &'static str,
    config: serde_json::Value,
    config_sha256: String,
    workers: usize,
    started: u64,
    seeds: Vec<TaskSeed>,
    files: Vec<FileEntry>,
}

impl RunOutput {
    pub fn new(dir: &Path, command: &'static str, config: &impl Serialize, workers: usize) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let config = serde_json::to_value(config)?;
        let config_sha256 = sha256_hex(serde_json::to_string(&config)?.as_bytes());
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            config,
            config_sha256,
            workers,
            started: unix_now(),
            seeds: Vec::new(),
            files: Vec::new(),
        })
    }

    pub fn seed(&mut self, task: impl Into<String>, seed: u64) {
        self.seeds.push(TaskSeed { task: task.into(), seed });
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(FileEntry { name: name.into(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
        self.write(name, &bytes)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    pub fn finish(self, invariants_passed: bool) -> Result<()> {
        let m = Manifest {
            command: self.command,
            code_version: env!("CARGO_PKG_VERSION"),
            config_sha256: &self.config_sha256,
            config: &self.config,
            workers: self.workers,
            started_unix: self.started,
            finished_unix: unix_now(),
            seeds: &self.seeds,
            files: &self.files,
            invariants_passed,
        };
        let mut s = serde_json::to_string_pretty(&m)?;
        s.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, s).with_context(|| format!("writing {}", path.display()))
    }
}

/// One plotted series; points with non-positive coordinates are dropped.
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// Optional vertical interval per point.
    pub bars: Vec<(f64, f64)>,
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// A log-log scatter plot with decade grid lines.
pub fn loglog_svg(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let (w, h, ml, mr, mt, mb) = (640.0, 440.0, 80.0, 160.0, 40.0, 60.0);
    let pos = |v: f64| v > 0.0 && v.is_finite();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for (i, &(x, y)) in s.points.iter().enumerate() {
            if pos(x) && pos(y) {
                xs.push(x.log10());
                ys.push(y.log10());
                if let Some(&(lo, hi)) = s.bars.get(i) {
                    ys.extend([lo, hi].into_iter().filter(|v| pos(*v)).map(f64::log10));
                }
            }
        }
    }
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() {
            (lo.floor(), hi.ceil().max(lo.floor() + 1.0))
        } else {
            (0.0, 1.0)
        }
    };
    let (x0, x1) = range(&xs);
    let (y0, y1) = range(&ys);
    let pw = w - ml - mr;
    let ph = h - mt - mb;
    let px = |lx: f64| ml + (lx - x0) / (x1 - x0) * pw;
    let py = |ly: f64| mt + ph - (ly - y0) / (y1 - y0) * ph;

    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        ml + pw / 2.0,
        escape(title)
    );
    for k in (x0 as i64)..=(x1 as i64) {
        let x = px(k as f64);
        s += &format!(
            "<line x1=\"{x:.1}\" y1=\"{mt}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#ddd\"/>\n<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">1e{k}</text>\n",
            mt + ph,
            mt + ph + 16.0
        );
    }
    for k in (y0 as i64)..=(y1 as i64) {
        let y = py(k as f64);
        s += &format!(
            "<line x1=\"{ml}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#ddd\"/>\n<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">1e{k}</text>\n",
            ml + pw,
            ml - 6.0,
            y + 4.0
        );
    }
    s += &format!("<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>\n");
    s += &format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
        ml + pw / 2.0,
        h - 16.0,
        escape(xlabel)
    );
    s += &format!(
        "<text x=\"20\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.1})\">{}</text>\n",
        mt + ph / 2.0,
        mt + ph / 2.0,
        escape(ylabel)
    );
    for (i, ser) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = ser
            .points
            .iter()
            .filter(|(x, y)| pos(*x) && pos(*y))
            .map(|&(x, y)| (px(x.log10()), py(y.log10())))
            .collect();
        if pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
            s += &format!("<polyline points=\"{}\" fill=\"none\" stroke=\"{c}\"/>\n", path.join(" "));
        }
        for (j, &(x, y)) in ser.points.iter().enumerate() {
            if !(pos(x) && pos(y)) {
                continue;
            }
            let (cx, cy) = (px(x.log10()), py(y.log10()));
            if let Some(&(lo, hi)) = ser.bars.get(j) {
                let lo = if pos(lo) { py(lo.log10()) } else { mt + ph };
                let hi = if pos(hi) { py(hi.log10()) } else { cy };
                s += &format!("<line x1=\"{cx:.1}\" y1=\"{lo:.1}\" x2=\"{cx:.1}\" y2=\"{hi:.1}\" stroke=\"{c}\"/>\n");
            }
            s += &format!("<circle cx=\"{cx:.1}\" cy=\"{cy:.1}\" r=\"3\" fill=\"{c}\"/>\n");
        }
        let ly = mt + 14.0 + 18.0 * i as f64;
        s += &format!(
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{c}\"/>\n<text x=\"{:.1}\" y=\"{:.1}\">{}</text>\n",
            ml + pw + 12.0,
            ly - 9.0,
            ml + pw + 28.0,
            ly,
            escape(&ser.name)
        );
    }
    s += "</svg>\n";
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
