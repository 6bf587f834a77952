use std::path::{Path, PathBuf};

use crate::commands::{optimize, se_sweep};
use crate::config::{Settings, Sweep, SweepVar};
use crate::error::Result;
use crate::output::{write_file, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureId {
    Fig1,
    Fig3,
    Fig4,
}

/// Sweeps behind each figure. Each figure fixes its scalar parameters;
/// the ranges span two decades around them.
pub fn sweeps(id: FigureId, base: &Settings) -> Vec<(&'static str, Settings)> {
    let with = |lambda_u: f64, b: f64, sweep: Sweep| Settings {
        lambda_u,
        b,
        sweep,
        ..base.clone()
    };
    match id {
        FigureId::Fig1 => vec![(
            "fig1",
            Settings {
                lambda_u: 0.02,
                alphas: vec![3.0, 4.0, 6.0],
                sweep: Sweep::range(SweepVar::LambdaB, 0.02, 20.0, 61, true),
                ..base.clone()
            },
        )],
        FigureId::Fig3 => vec![
            (
                "fig3_lambda_u",
                with(0.5, 10.0, Sweep::range(SweepVar::LambdaU, 0.5, 50.0, 21, true)),
            ),
            (
                "fig3_b",
                with(5.0, 10.0, Sweep::range(SweepVar::B, 1.0, 100.0, 21, true)),
            ),
        ],
        FigureId::Fig4 => vec![
            (
                "fig4_lambda_u",
                with(1.0, 10.0, Sweep::range(SweepVar::LambdaU, 0.1, 10.0, 21, true)),
            ),
            (
                "fig4_b",
                with(1.0, 10.0, Sweep::range(SweepVar::B, 1.0, 100.0, 21, true)),
            ),
        ],
    }
}

pub fn tables(id: FigureId, base: &Settings) -> Result<Vec<(&'static str, Table)>> {
    sweeps(id, base)
        .into_iter()
        .map(|(name, s)| {
            let t = match id {
                FigureId::Fig1 => se_sweep::table(&s)?,
                FigureId::Fig3 | FigureId::Fig4 => optimize::table(&s)?,
            };
            Ok((name, t))
        })
        .collect()
}

fn plot_script(id: FigureId) -> String {
    let body = match id {
        FigureId::Fig1 => "\
set logscale x
set xlabel 'BS density lambda_b'
set ylabel 'SE (nats/s/Hz)'
set key top left
plot for [i=0:2] 'fig1.dat' index i using 1:4 with lines title sprintf('exact, block %d', i), \\
     for [i=0:2] 'fig1.dat' index i using 1:5 with lines dashtype 2 title sprintf('closed form, block %d', i)
"
        .to_owned(),
        FigureId::Fig3 | FigureId::Fig4 => {
            let n = if id == FigureId::Fig3 { "fig3" } else { "fig4" };
            // columns: 7 cf_lambda_b, 8 cf_w, 10 cf_profit
            let (y, label) = if id == FigureId::Fig3 {
                ("7", "optimal BS density (lambda_b*)")
            } else {
                ("10", "maximised profit")
            };
            format!(
                "set logscale xy
set ylabel '{label}'
set multiplot layout 1,2
set xlabel 'user density lambda_u'
plot '{n}_lambda_u.dat' index 0 using 1:{y} with linespoints title 'sparse', \\
     '' index 1 using 1:{y} with linespoints title 'ultra-dense'
set xlabel 'maximum willingness to pay b'
plot '{n}_b.dat' index 0 using 2:{y} with linespoints title 'sparse', \\
     '' index 1 using 2:{y} with linespoints title 'ultra-dense'
unset multiplot
"
            )
        }
    };
    format!("# gnuplot script; run from this directory\n{body}")
}

/// Writes `<name>.csv` and `<name>.dat` per sweep plus `<fig>.gp`.
pub fn write(id: FigureId, base: &Settings, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (name, t) in tables(id, base)? {
        written.push(write_file(dir, &format!("{name}.csv"), &t.to_csv())?);
        let dat = if id == FigureId::Fig1 {
            t.to_dat(Some("alpha"))
        } else {
            regime_major(&t).to_dat(Some("regime"))
        };
        written.push(write_file(dir, &format!("{name}.dat"), dat.as_bytes())?);
    }
    let script = match id {
        FigureId::Fig1 => "fig1.gp",
        FigureId::Fig3 => "fig3.gp",
        FigureId::Fig4 => "fig4.gp",
    };
    written.push(write_file(dir, script, plot_script(id).as_bytes())?);
    Ok(written)
}

/// Reorders optimize rows so each regime forms one contiguous block.
fn regime_major(t: &Table) -> Table {
    let col = t.column("regime").expect("optimize table");
    let mut rows = t.rows.clone();
    let rank = |r: &Vec<String>| {
        optimize::PlanKind::ALL
            .iter()
            .position(|k| k.name() == r[col])
            .unwrap_or(usize::MAX)
    };
    rows.sort_by_key(rank);
    Table {
        header: t.header.clone(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CommandKind, Overrides};

    #[test]
    fn figure_parameters() {
        let base = Settings::from_overrides(CommandKind::Figures, &Overrides::default()).unwrap();
        let f1 = sweeps(FigureId::Fig1, &base);
        assert_eq!(f1[0].1.alphas, vec![3.0, 4.0, 6.0]);
        assert_eq!(f1[0].1.lambda_u, 0.02);
        let f3 = sweeps(FigureId::Fig3, &base);
        assert_eq!((f3[0].1.b, f3[1].1.lambda_u), (10.0, 5.0));
        let f4 = sweeps(FigureId::Fig4, &base);
        assert_eq!((f4[0].1.b, f4[1].1.lambda_u), (10.0, 1.0));
        assert!(f3[0].1.sweep.values.iter().any(|&v| (v - 5.0).abs() < 1e-9));
        assert!(f4[0].1.sweep.values.iter().any(|&v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn regime_blocks_are_contiguous() {
        let mut t = Table::new(vec!["regime"]);
        for r in ["sparse", "ultra_dense", "general", "sparse", "ultra_dense", "general"] {
            t.rows.push(vec![r.into()]);
        }
        let g = regime_major(&t);
        let names: Vec<&str> = g.rows.iter().map(|r| r[0].as_str()).collect();
        assert_eq!(
            names,
            ["sparse", "sparse", "ultra_dense", "ultra_dense", "general", "general"]
        );
    }
}
