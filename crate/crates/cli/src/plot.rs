//! Static SVG plots of solved profiles, rendered without any external
//! plotting process. Axis ranges, ticks and paths are all computed from the
//! data, so identical runs produce identical files.

use std::path::Path;

use nsexpander_core::asymptotics::AsymptoticSummary;
use nsexpander_core::params::BoundaryData;
use nsexpander_core::profile::Profile;

use crate::output::write_atomic;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 56.0;

#[derive(Clone, Copy)]
enum Scale {
    Linear,
    Log10,
}

impl Scale {
    fn apply(self, x: f64) -> f64 {
        match self {
            Scale::Linear => x,
            Scale::Log10 => x.log10(),
        }
    }

    fn tick_label(self, t: f64) -> String {
        match self {
            Scale::Linear => trim_number(t),
            Scale::Log10 => format!("1e{}", trim_number(t)),
        }
    }
}

fn trim_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{x:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{x:.2e}")
    }
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn from_points(pts: &[(f64, f64)]) -> Frame {
        let mut f = Frame {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for &(x, y) in pts {
            f.x_min = f.x_min.min(x);
            f.x_max = f.x_max.max(x);
            f.y_min = f.y_min.min(y);
            f.y_max = f.y_max.max(y);
        }
        if f.y_max - f.y_min < 1e-300 {
            f.y_min -= 0.5;
            f.y_max += 0.5;
        }
        let pad = 0.05 * (f.y_max - f.y_min);
        f.y_min -= pad;
        f.y_max += pad;
        f
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| span / s <= 6.0)
        .unwrap_or(mag * 10.0);
    let first = (lo / step).ceil() * step;
    let mut out = Vec::new();
    let mut t = first;
    while t <= hi + 1e-9 * step {
        out.push(t);
        t += step;
    }
    out
}

struct Plot<'a> {
    title: &'a str,
    x_label: &'a str,
    y_label: &'a str,
    x_scale: Scale,
    y_scale: Scale,
    series: Vec<(&'a str, Vec<(f64, f64)>)>,
    h_lines: Vec<(&'a str, f64)>,
    /// reference straight line in scaled coordinates: (slope, intercept)
    guide_line: Option<(&'a str, f64, f64)>,
}

const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

impl<'a> Plot<'a> {
    fn render(&self) -> String {
        let mut scaled: Vec<(&str, Vec<(f64, f64)>)> = Vec::new();
        for (name, pts) in &self.series {
            let s: Vec<(f64, f64)> = pts
                .iter()
                .filter(|(x, y)| {
                    (!matches!(self.x_scale, Scale::Log10) || *x > 0.0)
                        && (!matches!(self.y_scale, Scale::Log10) || *y > 0.0)
                })
                .map(|&(x, y)| (self.x_scale.apply(x), self.y_scale.apply(y)))
                .collect();
            scaled.push((name, s));
        }
        let mut all: Vec<(f64, f64)> = scaled.iter().flat_map(|(_, s)| s.iter().copied()).collect();
        for &(_, y) in &self.h_lines {
            let y = self.y_scale.apply(y);
            if y.is_finite() {
                all.push((all.first().map_or(0.0, |p| p.0), y));
            }
        }
        let frame = Frame::from_points(&all);

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
            WIDTH / 2.0,
            self.title
        ));
        // axes
        svg.push_str(&format!(
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"black\"/>\n",
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        ));
        for t in ticks(frame.x_min, frame.x_max) {
            let x = frame.px(t);
            svg.push_str(&format!(
                "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#ccc\"/>\n",
                MARGIN_T,
                HEIGHT - MARGIN_B
            ));
            svg.push_str(&format!(
                "<text x=\"{x:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
                HEIGHT - MARGIN_B + 16.0,
                self.x_scale.tick_label(t)
            ));
        }
        for t in ticks(frame.y_min, frame.y_max) {
            let y = frame.py(t);
            svg.push_str(&format!(
                "<line x1=\"{MARGIN_L}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#ccc\"/>\n",
                WIDTH - MARGIN_R
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                MARGIN_L - 6.0,
                y + 4.0,
                self.y_scale.tick_label(t)
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
            HEIGHT - 12.0,
            self.x_label
        ));
        svg.push_str(&format!(
            "<text x=\"18\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            self.y_label
        ));
        // horizontal markers
        for &(name, y) in &self.h_lines {
            let y = self.y_scale.apply(y);
            if !y.is_finite() {
                continue;
            }
            let py = frame.py(y);
            svg.push_str(&format!(
                "<line x1=\"{MARGIN_L}\" y1=\"{py:.1}\" x2=\"{:.1}\" y2=\"{py:.1}\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n",
                WIDTH - MARGIN_R
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\" fill=\"#555\">{}</text>\n",
                WIDTH - MARGIN_R - 4.0,
                py - 4.0,
                name
            ));
        }
        // reference slope line (already in scaled coordinates)
        if let Some((name, slope, intercept)) = self.guide_line {
            let y1 = slope * frame.x_min + intercept;
            let y2 = slope * frame.x_max + intercept;
            svg.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#888\" stroke-dasharray=\"2 4\"/>\n",
                frame.px(frame.x_min),
                frame.py(y1),
                frame.px(frame.x_max),
                frame.py(y2)
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555\">{}</text>\n",
                MARGIN_L + 8.0,
                MARGIN_T + 16.0,
                name
            ));
        }
        for (idx, (name, pts)) in scaled.iter().enumerate() {
            if pts.is_empty() {
                continue;
            }
            let color = COLORS[idx % COLORS.len()];
            let path: String = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
                .collect::<Vec<_>>()
                .join(" ");
            svg.push_str(&format!(
                "<polyline points=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n"
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
                WIDTH - MARGIN_R - 120.0,
                MARGIN_T + 18.0 + 16.0 * idx as f64,
                name
            ));
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Write the profile plot set into `dir`: the three fields on linear axes,
/// tail plots `r U` and `r^2 Theta` with their fitted asymptote markers, and
/// (cavitating only) the near-origin density on log-log axes with the
/// expected power-law slope as a guide line.
pub fn emit_plots_svg(
    profile: &Profile<f64>,
    summary: &AsymptoticSummary<f64>,
    d: u32,
    dir: &Path,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let r = profile.grid.nodes();
    let field = |vals: &[f64]| -> Vec<(f64, f64)> {
        r.iter().zip(vals).map(|(&x, &y)| (x, y)).collect()
    };

    let base: [(&str, &str, Vec<(f64, f64)>); 3] = [
        ("profile_P", "P", field(profile.p.values())),
        ("profile_U", "U", field(profile.u.values())),
        ("profile_Theta", "Theta", field(profile.theta.values())),
    ];
    for (file, label, pts) in base {
        let plot = Plot {
            title: label,
            x_label: "r",
            y_label: label,
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series: vec![(label, pts)],
            h_lines: vec![],
            guide_line: None,
        };
        write_atomic(&dir.join(format!("{file}.svg")), plot.render().as_bytes())?;
    }

    let ru: Vec<(f64, f64)> = r
        .iter()
        .zip(profile.u.values())
        .map(|(&x, &u)| (x, x * u))
        .collect();
    let plot = Plot {
        title: "velocity tail",
        x_label: "r",
        y_label: "r U",
        x_scale: Scale::Linear,
        y_scale: Scale::Linear,
        series: vec![("r U", ru)],
        h_lines: vec![("U_inf", summary.u_inf)],
        guide_line: None,
    };
    write_atomic(&dir.join("tail_rU.svg"), plot.render().as_bytes())?;

    let r2t: Vec<(f64, f64)> = r
        .iter()
        .zip(profile.theta.values())
        .map(|(&x, &t)| (x, x * x * t))
        .collect();
    let plot = Plot {
        title: "temperature tail",
        x_label: "r",
        y_label: "r^2 Theta",
        x_scale: Scale::Linear,
        y_scale: Scale::Linear,
        series: vec![("r^2 Theta", r2t)],
        h_lines: vec![("Theta_inf", summary.theta_inf)],
        guide_line: None,
    };
    write_atomic(&dir.join("tail_r2Theta.svg"), plot.render().as_bytes())?;

    if let BoundaryData::Cavitating(b) = profile.boundary {
        let beta = b.vacuum_exponent(d);
        let pts: Vec<(f64, f64)> = r
            .iter()
            .zip(profile.p.values())
            .filter(|(&x, &p)| x <= b.delta && p > 0.0)
            .map(|(&x, &p)| (x, p))
            .collect();
        // guide through the anchor: log10 P = beta log10(r/delta) + log10 P_delta
        let intercept = b.p_delta.log10() - beta * b.delta.log10();
        let plot = Plot {
            title: "density emergence at the origin",
            x_label: "r",
            y_label: "P",
            x_scale: Scale::Log10,
            y_scale: Scale::Log10,
            series: vec![("P", pts)],
            h_lines: vec![],
            guide_line: Some(("reference slope 2 d alpha/(1-2 alpha)", beta, intercept)),
        };
        write_atomic(&dir.join("origin_loglog_P.svg"), plot.render().as_bytes())?;
    }
    Ok(())
}
