use std::path::Path;

use image::{Rgb, RgbImage};
use wdngen::pipeline::{load_table, Table};
use wdngen::stats;

use crate::{CliError, PlotKind};

const WHITE: Rgb<u8> = Rgb([255, 255, 255]);
const BLACK: Rgb<u8> = Rgb([0, 0, 0]);
const PALETTE: [Rgb<u8>; 8] = [
    Rgb([31, 119, 180]),
    Rgb([255, 127, 14]),
    Rgb([44, 160, 44]),
    Rgb([214, 39, 40]),
    Rgb([148, 103, 189]),
    Rgb([140, 86, 75]),
    Rgb([227, 119, 194]),
    Rgb([127, 127, 127]),
];
const MARGIN: u32 = 30;

pub fn file_stem(kind: PlotKind) -> &'static str {
    match kind {
        PlotKind::DemandCorr => "demand_corr",
        PlotKind::PressureDemand => "pressure_demand",
        PlotKind::DemandTs => "demand_ts",
    }
}

fn junction_output(dir: &Path, parameter: &str) -> Result<Table, CliError> {
    let key = format!("junction_{parameter}_dynamic_output");
    load_table(dir, &key)?.ok_or_else(|| CliError::Plot(format!("{} has no {key} table", dir.display())))
}

/// Rows of every scenario concatenated into one vector per scenario.
fn per_scenario(table: &Table) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let skip = table.index_width();
    for row in &table.rows {
        let k = row[0] as usize;
        if out.len() <= k {
            out.resize(k + 1, Vec::new());
        }
        out[k].extend_from_slice(&row[skip..]);
    }
    out
}

/// Blue for -1, white for 0, red for +1.
fn diverging(r: f64) -> Rgb<u8> {
    let r = if r.is_finite() { r.clamp(-1.0, 1.0) } else { 0.0 };
    let fade = |t: f64| (255.0 * (1.0 - t)).round() as u8;
    if r >= 0.0 {
        Rgb([255, fade(r), fade(r)])
    } else {
        Rgb([fade(-r), fade(-r), 255])
    }
}

fn line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), color: Rgb<u8>) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, color);
        }
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Plot area with axes, plus a mapping from data to pixel coordinates.
struct Canvas {
    img: RgbImage,
    x: (f64, f64),
    y: (f64, f64),
}

impl Canvas {
    fn new(width: u32, height: u32, x: (f64, f64), y: (f64, f64)) -> Self {
        let mut img = RgbImage::from_pixel(width, height, WHITE);
        let (w, h) = (width as i64, height as i64);
        let m = MARGIN as i64;
        line(&mut img, (m, h - m), (w - m, h - m), BLACK);
        line(&mut img, (m, m), (m, h - m), BLACK);
        let widen = |(lo, hi): (f64, f64)| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        Canvas { img, x: widen(x), y: widen(y) }
    }

    fn point(&self, x: f64, y: f64) -> (i64, i64) {
        let (w, h) = ((self.img.width() - 2 * MARGIN) as f64, (self.img.height() - 2 * MARGIN) as f64);
        let px = MARGIN as f64 + (x - self.x.0) / (self.x.1 - self.x.0) * w;
        let py = (self.img.height() - MARGIN) as f64 - (y - self.y.0) / (self.y.1 - self.y.0) * h;
        (px.round() as i64, py.round() as i64)
    }

    fn dot(&mut self, x: f64, y: f64, color: Rgb<u8>) {
        let (px, py) = self.point(x, y);
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            line(&mut self.img, (px + dx, py + dy), (px + dx, py + dy), color);
        }
    }
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn save(img: &RgbImage, out: &Path) -> Result<(), CliError> {
    img.save(out).map_err(|e| CliError::Plot(format!("{}: {e}", out.display())))
}

/// Draw `kind` for the dataset in `dir` into `out` and return a one-line
/// `key=value` summary.
pub fn render(dir: &Path, kind: PlotKind, out: &Path) -> Result<String, CliError> {
    match kind {
        PlotKind::DemandCorr => {
            let scenarios = per_scenario(&junction_output(dir, "demand")?);
            if scenarios.len() < 2 {
                return Err(CliError::Plot("need at least two scenarios".into()));
            }
            let corr = stats::correlation_matrix(&scenarios);
            let mean = stats::off_diagonal_mean(&corr);
            let n = corr.len() as u32;
            let cell = (400 / n).max(1);
            let mut img = RgbImage::from_pixel(n * cell, n * cell, WHITE);
            for (i, row) in corr.iter().enumerate() {
                for (j, r) in row.iter().enumerate() {
                    for dy in 0..cell {
                        for dx in 0..cell {
                            img.put_pixel(j as u32 * cell + dx, i as u32 * cell + dy, diverging(*r));
                        }
                    }
                }
            }
            save(&img, out)?;
            Ok(format!("scenarios={n} off_diagonal_mean={mean:.6}"))
        }
        PlotKind::PressureDemand => {
            let pressure = junction_output(dir, "pressure")?;
            let demand = junction_output(dir, "demand")?;
            let skip = pressure.index_width();
            let pairs: Vec<(f64, f64)> = pressure
                .rows
                .iter()
                .zip(&demand.rows)
                .flat_map(|(p, d)| p[skip..].iter().copied().zip(d[skip..].iter().copied()).collect::<Vec<_>>())
                .filter(|(p, d)| p.is_finite() && d.is_finite())
                .collect();
            let mut canvas = Canvas::new(
                640,
                480,
                extent(pairs.iter().map(|p| p.1)),
                extent(pairs.iter().map(|p| p.0)),
            );
            for (p, d) in &pairs {
                canvas.dot(*d, *p, PALETTE[0]);
            }
            save(&canvas.img, out)?;
            let (ps, ds): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
            Ok(format!("points={} pearson={:.6}", pairs.len(), stats::pearson(&ds, &ps)))
        }
        PlotKind::DemandTs => {
            let table = junction_output(dir, "demand")?;
            let skip = table.index_width();
            let rows: Vec<&Vec<f64>> = table.rows.iter().filter(|r| r[0] == 0.0).collect();
            let columns = (table.header.len() - skip).min(PALETTE.len());
            let steps = rows.len();
            let mut canvas = Canvas::new(
                640,
                480,
                (0.0, steps.saturating_sub(1) as f64),
                extent(rows.iter().flat_map(|r| r[skip..skip + columns].iter().copied())),
            );
            for c in 0..columns {
                for t in 1..steps {
                    let a = canvas.point((t - 1) as f64, rows[t - 1][skip + c]);
                    let b = canvas.point(t as f64, rows[t][skip + c]);
                    line(&mut canvas.img, a, b, PALETTE[c]);
                }
            }
            save(&canvas.img, out)?;
            Ok(format!("series={columns} steps={steps}"))
        }
    }
}
