use std::fmt::Write as _;
use std::path::Path;

use super::{Algo, BenchError, ScenarioResult, SuiteConfig, SweepPoint};
use crate::distort::Scenario;

pub const CSV_HEADER: [&str; 7] = [
    "scenario",
    "algo",
    "time_ms",
    "kpnts1",
    "kpnts2",
    "matches",
    "match_rate_pct",
];
pub const SWEEP_HEADER: [&str; 6] = ["angle_deg", "algo", "kpnts1", "kpnts2", "matches", "match_rate_pct"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

/// One `# `-prefixed line recording every parameter that affects the output.
pub fn metadata_line(cfg: &SuiteConfig) -> String {
    let s = &cfg.sift;
    let u = &cfg.surf;
    let o = &cfg.orb;
    let m = &cfg.matcher;
    format!(
        "# featbench seed={} reps={} timed=detect+describe(both images)+match statistic=median \
         sift[octaves={} scales={} sigma={} assumed_blur={} contrast={} edge={} bins={} peak={}] \
         surf[octaves={} levels={} base_filter={} base_step={} threshold={} cross_weight={}] \
         orb[n={} fast={} levels={} scale={} patch={} centroid_radius={} brief_sigma={}] \
         match[ratio={} cross_check={} hamming_max={} laplacian_gate={}]",
        cfg.seed,
        cfg.repetitions,
        s.octaves,
        s.scales_per_octave,
        s.base_sigma,
        s.assumed_blur,
        s.contrast_threshold,
        s.edge_ratio,
        s.orientation_bins,
        s.peak_ratio,
        u.octaves,
        u.levels_per_octave,
        u.base_filter,
        u.base_step,
        u.hessian_threshold,
        u.cross_weight,
        o.n_features,
        o.fast_threshold,
        o.pyramid_levels,
        o.pyramid_scale,
        o.patch_size,
        o.centroid_radius,
        o.brief_sigma,
        m.ratio,
        m.cross_check,
        m.hamming_max,
        m.respect_laplacian_sign,
    )
}

fn csv_bytes(meta: &str, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String, BenchError> {
    let mut buf = Vec::new();
    buf.extend_from_slice(meta.as_bytes());
    buf.push(b'\n');
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
    }
    String::from_utf8(buf).map_err(|e| BenchError::Parse(e.to_string()))
}

pub fn to_csv(results: &[ScenarioResult], cfg: &SuiteConfig) -> Result<String, BenchError> {
    if results.is_empty() {
        return Err(BenchError::EmptyResults);
    }
    csv_bytes(
        &metadata_line(cfg),
        &CSV_HEADER,
        results.iter().map(|r| {
            vec![
                r.scenario.to_string(),
                r.algo.to_string(),
                format!("{}", r.time_ms),
                r.kpnts1.to_string(),
                r.kpnts2.to_string(),
                r.matches.to_string(),
                format!("{:.1}", r.match_rate_pct),
            ]
        }),
    )
}

pub fn sweep_to_csv(points: &[SweepPoint], cfg: &SuiteConfig) -> Result<String, BenchError> {
    if points.is_empty() {
        return Err(BenchError::EmptyResults);
    }
    csv_bytes(
        &metadata_line(cfg),
        &SWEEP_HEADER,
        points.iter().map(|p| {
            vec![
                format!("{}", p.angle_deg),
                p.algo.to_string(),
                p.kpnts1.to_string(),
                p.kpnts2.to_string(),
                p.matches.to_string(),
                format!("{:.1}", p.match_rate_pct),
            ]
        }),
    )
}

/// One table per scenario, rows in algorithm order.
pub fn to_markdown(results: &[ScenarioResult], cfg: &SuiteConfig) -> Result<String, BenchError> {
    if results.is_empty() {
        return Err(BenchError::EmptyResults);
    }
    let mut out = String::new();
    let _ = writeln!(out, "<!-- {} -->", metadata_line(cfg).trim_start_matches("# "));
    let mut order: Vec<String> = Vec::new();
    for r in results {
        let key = r.scenario.to_string();
        if !order.contains(&key) {
            order.push(key);
        }
    }
    for key in order {
        let _ = writeln!(out, "\n### {key}\n");
        let _ = writeln!(
            out,
            "| Algorithm | Time (ms) | Kpnts1 | Kpnts2 | Matches | Match rate (%) |"
        );
        let _ = writeln!(out, "|---|---:|---:|---:|---:|---:|");
        for r in results.iter().filter(|r| r.scenario.to_string() == key) {
            let _ = writeln!(
                out,
                "| {} | {:.2} | {} | {} | {} | {:.1} |",
                r.algo.name().to_uppercase(),
                r.time_ms,
                r.kpnts1,
                r.kpnts2,
                r.matches,
                r.match_rate_pct
            );
        }
    }
    Ok(out)
}

pub fn emit(
    results: &[ScenarioResult],
    cfg: &SuiteConfig,
    format: OutputFormat,
    path: &Path,
) -> Result<(), BenchError> {
    let text = match format {
        OutputFormat::Csv => to_csv(results, cfg)?,
        OutputFormat::Markdown => to_markdown(results, cfg)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

fn reader<'a>(text: &'a str, header: &[&str]) -> Result<csv::Reader<&'a [u8]>, BenchError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let found: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(BenchError::Parse(format!("unexpected header {found:?}")));
    }
    Ok(r)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T, BenchError>
where
    T::Err: std::fmt::Display,
{
    let raw = rec.get(i).ok_or_else(|| BenchError::Parse(format!("missing {name}")))?;
    raw.parse::<T>()
        .map_err(|e| BenchError::Parse(format!("{name}={raw:?}: {e}")))
}

pub fn parse_csv(text: &str) -> Result<Vec<ScenarioResult>, BenchError> {
    let mut r = reader(text, &CSV_HEADER)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push(ScenarioResult {
            scenario: field::<Scenario>(&rec, 0, "scenario")?,
            algo: field::<Algo>(&rec, 1, "algo")?,
            time_ms: field(&rec, 2, "time_ms")?,
            kpnts1: field(&rec, 3, "kpnts1")?,
            kpnts2: field(&rec, 4, "kpnts2")?,
            matches: field(&rec, 5, "matches")?,
            match_rate_pct: field(&rec, 6, "match_rate_pct")?,
        });
    }
    Ok(out)
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepPoint>, BenchError> {
    let mut r = reader(text, &SWEEP_HEADER)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push(SweepPoint {
            angle_deg: field(&rec, 0, "angle_deg")?,
            algo: field::<Algo>(&rec, 1, "algo")?,
            kpnts1: field(&rec, 2, "kpnts1")?,
            kpnts2: field(&rec, 3, "kpnts2")?,
            matches: field(&rec, 4, "matches")?,
            match_rate_pct: field(&rec, 5, "match_rate_pct")?,
        });
    }
    Ok(out)
}
