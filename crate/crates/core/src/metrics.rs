//! Per-round metrics, lifetime summaries, and result files (CSV, JSON, SVG).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use plotters::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::SimulationResult;
use crate::error::SimError;
use crate::model::Position;

pub const CSV_HEADER: &str = "round,alive,residual_energy_j,packets_to_bs,heads";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundMetrics {
    pub round: u32,
    pub alive_count: usize,
    pub total_residual_energy: f64,
    pub cumulative_packets_to_bs: u64,
    pub head_count: usize,
}

/// Network lifetime milestones. A node count of `N` is "half dead" once at
/// most `floor(N/2)` nodes remain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub first_node_death_round: Option<u32>,
    pub half_nodes_death_round: Option<u32>,
    pub last_node_death_round: Option<u32>,
    pub total_packets_to_bs: u64,
    pub rounds_executed: u32,
}

pub fn summarize_series(per_round: &[RoundMetrics], node_count: usize) -> Summary {
    let first_where =
        |pred: &dyn Fn(&RoundMetrics) -> bool| per_round.iter().find(|m| pred(m)).map(|m| m.round);
    Summary {
        first_node_death_round: first_where(&|m| m.alive_count < node_count),
        half_nodes_death_round: first_where(&|m| m.alive_count <= node_count / 2),
        last_node_death_round: first_where(&|m| m.alive_count == 0),
        total_packets_to_bs: per_round.last().map_or(0, |m| m.cumulative_packets_to_bs),
        rounds_executed: per_round.len() as u32,
    }
}

pub fn summarize(result: &SimulationResult) -> Summary {
    summarize_series(&result.per_round, result.config_echo.node_count)
}

pub fn csv_string(result: &SimulationResult) -> String {
    let mut out = String::with_capacity(48 * (result.per_round.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for m in &result.per_round {
        // 17 significant digits: exact f64 round trip
        writeln!(
            out,
            "{},{},{:.16e},{},{}",
            m.round,
            m.alive_count,
            m.total_residual_energy,
            m.cumulative_packets_to_bs,
            m.head_count
        )
        .unwrap();
    }
    out
}

pub fn export_csv(result: &SimulationResult, path: &Path) -> Result<(), SimError> {
    fs::write(path, csv_string(result)).map_err(|e| SimError::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<Vec<RoundMetrics>, SimError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => {
            return Err(SimError::Csv {
                line: 1,
                reason: "missing header".into(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let bad = |reason: String| SimError::Csv {
                line: i + 1,
                reason,
            };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(bad(format!("expected 5 fields, got {}", fields.len())));
            }
            let err = |e: &dyn std::fmt::Display| bad(e.to_string());
            Ok(RoundMetrics {
                round: fields[0].parse().map_err(|e| err(&e))?,
                alive_count: fields[1].parse().map_err(|e| err(&e))?,
                total_residual_energy: fields[2].parse().map_err(|e| err(&e))?,
                cumulative_packets_to_bs: fields[3].parse().map_err(|e| err(&e))?,
                head_count: fields[4].parse().map_err(|e| err(&e))?,
            })
        })
        .collect()
}

/// `id,x,y` dump of node positions, ids in slice order.
pub fn deployment_csv(positions: &[Position]) -> String {
    let mut out = String::from("id,x,y\n");
    for (id, p) in positions.iter().enumerate() {
        writeln!(out, "{id},{:.16e},{:.16e}", p.x, p.y).unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryFile {
    #[serde(flatten)]
    pub summary: Summary,
    pub seed: u64,
}

pub fn summary_json(result: &SimulationResult) -> String {
    let file = SummaryFile {
        summary: summarize(result),
        seed: result.seed,
    };
    serde_json::to_string_pretty(&file).expect("summary serializes")
}

pub fn export_summary_json(result: &SimulationResult, path: &Path) -> Result<(), SimError> {
    fs::write(path, summary_json(result) + "\n").map_err(|e| SimError::io(path, e))
}

/// Which per-round quantity a chart shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Alive,
    ResidualEnergy,
    PacketsToBs,
}

impl ChartKind {
    pub const ALL: [ChartKind; 3] = [
        ChartKind::Alive,
        ChartKind::ResidualEnergy,
        ChartKind::PacketsToBs,
    ];

    pub fn file_name(&self) -> &'static str {
        match self {
            ChartKind::Alive => "nodes_alive.svg",
            ChartKind::ResidualEnergy => "residual_energy.svg",
            ChartKind::PacketsToBs => "packets_to_bs.svg",
        }
    }

    fn title(&self) -> &'static str {
        match self {
            ChartKind::Alive => "Nodes alive",
            ChartKind::ResidualEnergy => "Residual energy",
            ChartKind::PacketsToBs => "Packets sent to base station",
        }
    }

    fn y_label(&self) -> &'static str {
        match self {
            ChartKind::Alive => "alive nodes",
            ChartKind::ResidualEnergy => "residual energy (J)",
            ChartKind::PacketsToBs => "packets",
        }
    }

    pub fn value(&self, m: &RoundMetrics) -> f64 {
        match self {
            ChartKind::Alive => m.alive_count as f64,
            ChartKind::ResidualEnergy => m.total_residual_energy,
            ChartKind::PacketsToBs => m.cumulative_packets_to_bs as f64,
        }
    }
}

/// Axis ranges spanning every point of every series. Degenerate spans are
/// widened so the chart stays drawable.
pub fn chart_extents(
    results: &[SimulationResult],
    kind: ChartKind,
) -> (std::ops::Range<f64>, std::ops::Range<f64>) {
    let points = results.iter().flat_map(|r| r.per_round.iter());
    let (mut x_min, mut x_max) = (0.0f64, 1.0f64);
    let (mut y_min, mut y_max) = (0.0f64, 1.0f64);
    for m in points {
        let x = m.round as f64;
        let y = kind.value(m);
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    (x_min..x_max, y_min..y_max * 1.05)
}

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(255, 127, 14),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
];

fn render_chart(
    results: &[SimulationResult],
    labels: &[String],
    kind: ChartKind,
    path: &Path,
) -> Result<(), Box<dyn std::error::Error>> {
    let root = SVGBackend::new(path, (900, 600)).into_drawing_area();
    root.fill(&WHITE)?;
    let (xr, yr) = chart_extents(results, kind);
    let mut chart = ChartBuilder::on(&root)
        .caption(kind.title(), ("sans-serif", 24))
        .margin(16)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(xr, yr)?;
    chart
        .configure_mesh()
        .x_desc("round")
        .y_desc(kind.y_label())
        .draw()?;
    for (i, (result, label)) in results.iter().zip(labels).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        chart
            .draw_series(LineSeries::new(
                result
                    .per_round
                    .iter()
                    .map(|m| (m.round as f64, kind.value(m))),
                color.stroke_width(2),
            ))?
            .label(label.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()?;
    root.present()?;
    Ok(())
}

/// Writes one SVG line chart per [`ChartKind`] into `out_dir`, one series
/// per result. Returns the written paths.
pub fn render_plots(
    results: &[SimulationResult],
    labels: &[String],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, SimError> {
    if results.is_empty() {
        return Err(SimError::NoResults);
    }
    fs::create_dir_all(out_dir).map_err(|e| SimError::io(out_dir, e))?;
    let mut written = Vec::new();
    for kind in ChartKind::ALL {
        let path = out_dir.join(kind.file_name());
        render_chart(results, labels, kind, &path)
            .map_err(|e| SimError::Plot(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SimConfig;

    fn metrics(round: u32, alive: usize) -> RoundMetrics {
        RoundMetrics {
            round,
            alive_count: alive,
            total_residual_energy: alive as f64 * 0.5,
            cumulative_packets_to_bs: round as u64 * 3,
            head_count: 2,
        }
    }

    fn result_of(per_round: Vec<RoundMetrics>, node_count: usize) -> SimulationResult {
        let config = SimConfig {
            node_count,
            ..SimConfig::default()
        };
        SimulationResult {
            summary: summarize_series(&per_round, node_count),
            per_round,
            seed: config.seed,
            config_echo: config,
        }
    }

    #[test]
    fn constant_population_has_no_deaths() {
        let series: Vec<_> = (0..10).map(|r| metrics(r, 100)).collect();
        let s = summarize_series(&series, 100);
        assert_eq!(s.first_node_death_round, None);
        assert_eq!(s.half_nodes_death_round, None);
        assert_eq!(s.last_node_death_round, None);
        assert_eq!(s.rounds_executed, 10);
        assert_eq!(s.total_packets_to_bs, 27);
    }

    #[test]
    fn crossing_scan() {
        let series: Vec<_> = [100, 99, 50, 0]
            .iter()
            .enumerate()
            .map(|(r, &a)| metrics(r as u32, a))
            .collect();
        let s = summarize_series(&series, 100);
        assert_eq!(s.first_node_death_round, Some(1));
        assert_eq!(s.half_nodes_death_round, Some(2));
        assert_eq!(s.last_node_death_round, Some(3));
    }

    #[test]
    fn half_uses_floor() {
        let series = vec![metrics(0, 3), metrics(1, 2), metrics(2, 1)];
        // N = 5: floor(5/2) = 2
        assert_eq!(summarize_series(&series, 5).half_nodes_death_round, Some(1));
    }

    #[test]
    fn empty_run() {
        let s = summarize_series(&[], 100);
        assert_eq!(s, Summary::default());
        let r = result_of(vec![], 100);
        assert_eq!(csv_string(&r), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_shape_and_round_trip() {
        let mut series: Vec<_> = (0..3).map(|r| metrics(r, 10 - r as usize)).collect();
        series[1].total_residual_energy = 1.234_567_890_123_456_7e-3;
        let r = result_of(series.clone(), 10);
        let text = csv_string(&r);
        assert_eq!(text.lines().count(), 4);
        assert_eq!(parse_csv(&text).unwrap(), series);
        assert_eq!(text, csv_string(&r));
        let energy = text.lines().nth(2).unwrap().split(',').nth(2).unwrap();
        let digits = energy
            .split('e')
            .next()
            .unwrap()
            .chars()
            .filter(|c| c.is_ascii_digit())
            .count();
        assert!(digits >= 12, "{energy}");
    }

    #[test]
    fn csv_parse_errors() {
        assert!(matches!(
            parse_csv("nope\n"),
            Err(SimError::Csv { line: 1, .. })
        ));
        let bad = format!("{CSV_HEADER}\n1,2,3\n");
        assert!(matches!(
            parse_csv(&bad),
            Err(SimError::Csv { line: 2, .. })
        ));
    }

    #[test]
    fn export_to_unwritable_path() {
        let r = result_of(vec![metrics(0, 5)], 5);
        let err = export_csv(&r, Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }

    #[test]
    fn summary_json_keys() {
        let series: Vec<_> = [4, 3, 2, 0]
            .iter()
            .enumerate()
            .map(|(r, &a)| metrics(r as u32, a))
            .collect();
        let r = result_of(series, 4);
        let v: serde_json::Value = serde_json::from_str(&summary_json(&r)).unwrap();
        let obj = v.as_object().unwrap();
        let mut keys: Vec<_> = obj.keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            vec![
                "first_node_death_round",
                "half_nodes_death_round",
                "last_node_death_round",
                "rounds_executed",
                "seed",
                "total_packets_to_bs"
            ]
        );
        assert_eq!(obj["half_nodes_death_round"], 2);
        assert_eq!(obj["seed"], r.seed);
    }

    #[test]
    fn extents_cover_data() {
        let a = result_of((0..50).map(|r| metrics(r, 100 - r as usize)).collect(), 100);
        let b = result_of((0..80).map(|r| metrics(r, 100)).collect(), 100);
        let both = [a, b];
        for kind in ChartKind::ALL {
            let (xr, yr) = chart_extents(&both, kind);
            for m in both.iter().flat_map(|r| &r.per_round) {
                assert!(xr.start <= m.round as f64 && m.round as f64 <= xr.end);
                let v = kind.value(m);
                assert!(yr.start <= v && v <= yr.end);
            }
        }
    }

    #[test]
    fn plots_written() {
        let dir = tempfile::tempdir().unwrap();
        let a = result_of((0..30).map(|r| metrics(r, 30 - r as usize)).collect(), 30);
        let b = result_of((0..40).map(|r| metrics(r, 40 - r as usize)).collect(), 40);
        let labels = vec!["LEACH".to_string(), "MONCH".to_string()];
        let files = render_plots(&[a, b], &labels, dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        for f in files {
            let svg = fs::read_to_string(&f).unwrap();
            assert!(svg.starts_with("<svg") || svg.contains("<svg"));
            assert!(svg.contains("LEACH") && svg.contains("MONCH"));
        }
        assert!(matches!(
            render_plots(&[], &[], dir.path()),
            Err(SimError::NoResults)
        ));
    }
}
