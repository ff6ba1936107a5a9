//! Presets that regenerate the data behind each published figure.

use rayon::prelude::*;

use super::table::{Cell, Table};
use super::CliError;
use crate::model::Alignment;
use crate::optimize::{
    optimal_gap_curve, sweep, PointSpec, Quantity, Spacing, SweepRange, SweepSpec, SweepVariable,
};

pub const DEFAULT_POINTS: usize = 256;

pub const FIGURES: &[&str] = &[
    "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5", "fig6a", "fig6b", "fig7a", "fig7b", "fig8a",
    "fig8b", "fig9", "fig11a", "fig11b", "fig12a", "fig12b", "fig13", "fig14",
];

const SMALL_GAP_RATIOS: [f64; 3] = [0.0, 0.8, 10.0];
const LARGE_GAP_RATIOS: [f64; 3] = [0.0, 0.5, 1.1];
const GAIN_RATIOS: [f64; 3] = [0.0, 0.8, 3.0];
const GAP_DIFFERENCE_DZS: [f64; 3] = [0.5, 1.0, 2.0];

enum Axis {
    Separation,
    Dz,
    /// `delta_omega / omega_a`
    Ratio,
}

impl Axis {
    fn name(&self) -> &'static str {
        match self {
            Axis::Separation => "L",
            Axis::Dz => "dz",
            Axis::Ratio => "delta_omega_ratio",
        }
    }
}

enum Preset {
    /// One column per gap ratio plus its boundaryless companion.
    ByRatio {
        quantity: Quantity,
        axis: Axis,
        range: (f64, f64),
        omega_a: f64,
        ratios: &'static [f64],
        separation: f64,
        dz: f64,
    },
    /// One column per distance to the boundary plus the boundaryless curve.
    ByDistance {
        quantity: Quantity,
        range: (f64, f64),
        omega_a: f64,
        separation: f64,
    },
    /// Optimal ratio versus `dz`, one column per separation.
    OptimalGap {
        quantity: Quantity,
        alignment: Alignment,
        separations: &'static [f64],
    },
    /// Vertical minus parallel value versus `dz`, one column per ratio.
    AlignmentGain { quantity: Quantity, separation: f64 },
}

const OPTIMAL_GAP_OMEGA_A: f64 = 0.1;
const OPTIMAL_GAP_DZ: (f64, f64) = (0.1, 4.0);
const GAIN_OMEGA_A: f64 = 0.5;
const GAIN_DZ: (f64, f64) = (0.1, 3.0);

fn preset(id: &str) -> Option<Preset> {
    use Quantity::{Concurrence as C, MutualInfo as I};
    let by_l = |quantity, omega_a, ratios| Preset::ByRatio {
        quantity,
        axis: Axis::Separation,
        range: (0.01, 10.0),
        omega_a,
        ratios,
        separation: f64::NAN,
        dz: 1.0,
    };
    let by_dz = |quantity, omega_a, ratios| Preset::ByRatio {
        quantity,
        axis: Axis::Dz,
        range: (0.0, 50.0),
        omega_a,
        ratios,
        separation: 0.5,
        dz: f64::NAN,
    };
    let by_ratio = |quantity, separation| Preset::ByDistance {
        quantity,
        range: (0.0, 20.0),
        omega_a: 0.1,
        separation,
    };
    Some(match id {
        "fig2a" => by_l(C, 0.1, &SMALL_GAP_RATIOS[..]),
        "fig2b" => by_l(C, 1.1, &LARGE_GAP_RATIOS[..]),
        "fig3a" => by_dz(C, 0.1, &SMALL_GAP_RATIOS[..]),
        "fig3b" => by_dz(C, 1.1, &LARGE_GAP_RATIOS[..]),
        "fig4a" => by_ratio(C, 0.1),
        "fig4b" => by_ratio(C, 1.5),
        "fig5" => Preset::OptimalGap {
            quantity: C,
            alignment: Alignment::Parallel,
            separations: &[0.1, 3.0, 4.0, 5.0],
        },
        "fig6a" => by_l(I, 0.1, &SMALL_GAP_RATIOS[..]),
        "fig6b" => by_l(I, 1.1, &LARGE_GAP_RATIOS[..]),
        "fig7a" => by_dz(I, 0.1, &SMALL_GAP_RATIOS[..]),
        "fig7b" => by_dz(I, 1.1, &LARGE_GAP_RATIOS[..]),
        "fig8a" => by_ratio(I, 0.1),
        "fig8b" => by_ratio(I, 5.0),
        "fig9" => Preset::OptimalGap {
            quantity: I,
            alignment: Alignment::Parallel,
            separations: &[0.1, 3.0, 5.0, 7.0],
        },
        "fig11a" => Preset::AlignmentGain { quantity: C, separation: 0.5 },
        "fig11b" => Preset::AlignmentGain { quantity: C, separation: 3.0 },
        "fig12a" => Preset::AlignmentGain { quantity: I, separation: 0.5 },
        "fig12b" => Preset::AlignmentGain { quantity: I, separation: 3.0 },
        "fig13" => Preset::OptimalGap {
            quantity: C,
            alignment: Alignment::Vertical,
            separations: &[0.1, 3.0, 4.0, 5.0],
        },
        "fig14" => Preset::OptimalGap {
            quantity: I,
            alignment: Alignment::Vertical,
            separations: &[0.1, 3.0, 5.0, 7.0],
        },
        _ => return None,
    })
}

fn list(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn linear(range: (f64, f64), n: usize) -> SweepRange {
    SweepRange {
        lo: range.0,
        hi: range.1,
        n_points: n,
        spacing: Spacing::Linear,
    }
}

fn column(spec: SweepSpec) -> Result<Vec<Cell>, CliError> {
    Ok(sweep(&spec)?
        .into_iter()
        .map(|r| r.values.first().map_or(Cell::Empty, |&v| Cell::Num(v)))
        .collect())
}

fn assemble(table: &mut Table, xs: Vec<f64>, columns: Vec<Vec<Cell>>) {
    table.rows = xs
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut row = vec![Cell::Num(x)];
            row.extend(columns.iter().map(|c| c[i].clone()));
            row
        })
        .collect();
}

/// Data for figure `id` on `points` abscissae, at coupling `lambda`.
pub fn reproduce(id: &str, points: usize, lambda: f64) -> Result<Table, CliError> {
    let preset = preset(id)
        .ok_or_else(|| CliError::parameter(format!("unknown figure '{id}'; valid ids: {}", FIGURES.join(", "))))?;
    if points < 2 {
        return Err(CliError::parameter("points must be at least 2"));
    }
    let mut table;
    match preset {
        Preset::ByRatio {
            quantity,
            axis,
            range,
            omega_a,
            ratios,
            separation,
            dz,
        } => {
            let mut names = vec![axis.name().to_string()];
            let mut columns = Vec::new();
            let variable = match axis {
                Axis::Separation => SweepVariable::Separation,
                _ => SweepVariable::Dz,
            };
            for alignment in [Alignment::Parallel, Alignment::Boundaryless] {
                for &ratio in ratios {
                    let suffix = if alignment == Alignment::Boundaryless { "_boundaryless" } else { "" };
                    names.push(format!("ratio_{ratio:.2}{suffix}"));
                    columns.push(column(SweepSpec {
                        variable,
                        range: linear(range, points),
                        fixed: PointSpec {
                            omega_a,
                            delta_omega: ratio * omega_a,
                            separation: if separation.is_nan() { 1.0 } else { separation },
                            dz: if dz.is_nan() { 1.0 } else { dz },
                            alignment,
                            lambda,
                        },
                        quantities: vec![quantity],
                    })?);
                }
            }
            table = Table::new(names);
            table
                .meta("quantity", quantity)
                .meta("alignment", Alignment::Parallel)
                .meta("omega-a", omega_a)
                .meta("delta-omega-ratios", list(ratios));
            if !separation.is_nan() {
                table.meta("l", separation);
            }
            if !dz.is_nan() {
                table.meta("dz", dz);
            }
            assemble(&mut table, linear(range, points).points(), columns);
        }
        Preset::ByDistance {
            quantity,
            range,
            omega_a,
            separation,
        } => {
            let ratios = linear(range, points).points();
            let gaps = linear((range.0 * omega_a, range.1 * omega_a), points);
            let mut names = vec![Axis::Ratio.name().to_string()];
            let mut columns = Vec::new();
            let curves = GAP_DIFFERENCE_DZS
                .iter()
                .map(|&dz| (Alignment::Parallel, dz))
                .chain([(Alignment::Boundaryless, 1.0)]);
            for (alignment, dz) in curves {
                names.push(match alignment {
                    Alignment::Boundaryless => "boundaryless".to_string(),
                    _ => format!("dz_{dz:.2}"),
                });
                columns.push(column(SweepSpec {
                    variable: SweepVariable::DeltaOmega,
                    range: gaps,
                    fixed: PointSpec {
                        omega_a,
                        delta_omega: 0.0,
                        separation,
                        dz,
                        alignment,
                        lambda,
                    },
                    quantities: vec![quantity],
                })?);
            }
            table = Table::new(names);
            table
                .meta("quantity", quantity)
                .meta("alignment", Alignment::Parallel)
                .meta("omega-a", omega_a)
                .meta("l", separation)
                .meta("dz-values", list(&GAP_DIFFERENCE_DZS));
            assemble(&mut table, ratios, columns);
        }
        Preset::OptimalGap {
            quantity,
            alignment,
            separations,
        } => {
            let dzs = linear(OPTIMAL_GAP_DZ, points).points();
            let mut names = vec!["dz".to_string()];
            let mut columns = Vec::new();
            for &l in separations {
                names.push(format!("L_{l:.2}"));
                let rows = optimal_gap_curve(OPTIMAL_GAP_OMEGA_A, l, &dzs, alignment, quantity)?;
                columns.push(
                    rows.into_iter()
                        .map(|r| match r.result {
                            Ok(o) => Cell::Num(o.delta_omega_star / OPTIMAL_GAP_OMEGA_A),
                            Err(_) => Cell::Empty,
                        })
                        .collect(),
                );
            }
            table = Table::new(names);
            table
                .meta("quantity", format!("optimal delta_omega_ratio for {quantity}"))
                .meta("alignment", alignment)
                .meta("omega-a", OPTIMAL_GAP_OMEGA_A)
                .meta("l-values", list(separations));
            assemble(&mut table, dzs, columns);
        }
        Preset::AlignmentGain { quantity, separation } => {
            let dzs = linear(GAIN_DZ, points).points();
            let mut names = vec!["dz".to_string()];
            let mut columns = Vec::new();
            for &ratio in &GAIN_RATIOS {
                names.push(format!("ratio_{ratio:.2}"));
                let cells = crate::parallel::install(|| {
                    dzs.par_iter()
                        .map(|&dz| {
                            let p = PointSpec {
                                omega_a: GAIN_OMEGA_A,
                                delta_omega: ratio * GAIN_OMEGA_A,
                                separation,
                                dz,
                                alignment: Alignment::Parallel,
                                lambda,
                            };
                            p.alignment_gain(quantity).map_or(Cell::Empty, Cell::Num)
                        })
                        .collect()
                });
                columns.push(cells);
            }
            table = Table::new(names);
            table
                .meta("quantity", format!("{quantity} vertical minus parallel"))
                .meta("omega-a", GAIN_OMEGA_A)
                .meta("l", separation)
                .meta("delta-omega-ratios", list(&GAIN_RATIOS));
            assemble(&mut table, dzs, columns);
        }
    }
    table.meta("lambda", lambda).meta("points", points);
    table.meta.insert(0, ("figure".to_string(), id.to_string()));
    Ok(table)
}
