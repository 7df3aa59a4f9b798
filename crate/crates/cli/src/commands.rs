use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use wallwalk_core::asymptotics::{default_n_list, default_z_grid, k_delta_checked};
use wallwalk_core::genfun::{dp_partial_sums, GenFun};
use wallwalk_core::polys::{eval_family, PolyFamily};
use wallwalk_core::verify::{verify_all, VerifyOptions};
use wallwalk_core::walk::{mean_trajectory, simulate_with_threads, WalkParams};
use wallwalk_core::{
    build_measure, check_gen_asymptotics, check_moment_asymptotics, dette_checks, evolve,
    stationary,
};

use crate::table::{self, Format, Output, Table};
use crate::{Command, Common};

/// Why a command did not succeed, and the exit code that goes with it.
#[derive(Debug)]
pub enum Failure {
    /// Bad flag value or an argument outside a routine's domain.
    Usage(String),
    /// The command ran but a tolerance check failed.
    Check(String),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Check(m) => write!(f, "check failed: {m}"),
            Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<wallwalk_core::Error> for Failure {
    fn from(e: wallwalk_core::Error) -> Self {
        use wallwalk_core::Error as E;
        match e {
            E::Domain(_) | E::Resource { .. } | E::Pole(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome = Result<(), Failure>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Q,
    Q1,
    Qstar,
    Qstar1,
    Gegenbauer,
    GegenbauerAssociated,
}

impl FamilyArg {
    fn family(self, delta: f64, lambda: f64) -> PolyFamily {
        match self {
            FamilyArg::Q => PolyFamily::Q { delta },
            FamilyArg::Q1 => PolyFamily::Q1 { delta },
            FamilyArg::Qstar => PolyFamily::QStar { delta },
            FamilyArg::Qstar1 => PolyFamily::QStar1 { delta },
            FamilyArg::Gegenbauer => PolyFamily::Gegenbauer { lambda },
            FamilyArg::GegenbauerAssociated => PolyFamily::GegenbauerAssociated { lambda },
        }
    }
}

fn emit(common: &Common, out: Output, default: Format) -> Outcome {
    let format = common.format.unwrap_or(default);
    table::write(&out, format, common.output.as_deref().map(Path::new))?;
    Ok(())
}

fn check(passed: bool, what: impl FnOnce() -> String) -> Outcome {
    if passed {
        Ok(())
    } else {
        Err(Failure::Check(what()))
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Dp {
            common,
            x0,
            n,
            means,
        } => {
            let params = WalkParams::new(common.delta)?;
            let t = if means {
                let mut t = Table::new(&["k", "mean"]);
                for (k, m) in mean_trajectory(&params, x0, n)?.into_iter().enumerate() {
                    t.push(vec![k.into(), m.into()]);
                }
                t
            } else {
                let d = evolve(&params, x0, n)?;
                let mut t = Table::new(&["y", "prob"]);
                for y in d.reachable() {
                    t.push(vec![y.into(), d.prob(y).into()]);
                }
                t
            };
            emit(&common, Output::Table(t), Format::Csv)
        }

        Command::Mc {
            common,
            x0,
            n,
            paths,
            seed,
            threads,
        } => {
            let params = WalkParams::new(common.delta)?;
            if threads == Some(0) {
                return Err(Failure::Usage("threads must be at least 1".into()));
            }
            let r = simulate_with_threads(&params, x0, n, paths, seed, threads)?;
            let mut t = Table::new(&["k", "mean", "stderr"]);
            for (k, (m, s)) in r.mean.iter().zip(&r.stderr).enumerate() {
                t.push(vec![k.into(), (*m).into(), (*s).into()]);
            }
            emit(&common, Output::Table(t), Format::Csv)
        }

        Command::Stationary { common, max_site } => {
            let params = WalkParams::new(common.delta)?;
            let pi = stationary(&params, max_site);
            let mut t = Table::new(&["y", "pi", "ratio"]);
            for (y, &p) in pi.values.iter().enumerate() {
                t.push(vec![y.into(), p.into(), (p / pi.pi0).into()]);
            }
            emit(&common, Output::Table(t), Format::Csv)
        }

        Command::Polys {
            common,
            family,
            lambda,
            max_degree,
            t,
        } => {
            let fam = family.family(common.delta, lambda.unwrap_or(0.5 * common.delta));
            let grid = if t.is_empty() {
                linspace(-1.0, 1.0, 11)
            } else {
                t
            };
            let mut table = Table::new(&["t", "degree", "value"]);
            for &x in &grid {
                for (y, v) in eval_family(fam, max_degree, x)?.into_iter().enumerate() {
                    table.push(vec![x.into(), y.into(), v.into()]);
                }
            }
            emit(&common, Output::Table(table), Format::Csv)
        }

        Command::Ortho {
            common,
            nodes,
            max_degree,
            tol,
        } => {
            let params = WalkParams::subcritical(common.delta)?;
            let pi = stationary(&params, max_degree);
            let gram = build_measure(common.delta, nodes.nodes)?.gram(max_degree)?;
            let mut t = Table::new(&["x", "y", "gram", "target", "residual"]);
            let mut worst: f64 = 0.0;
            for (x, row) in gram.iter().enumerate() {
                for (y, &g) in row.iter().enumerate() {
                    let target = if x == y { pi.pi0 / pi.values[y] } else { 0.0 };
                    let r = (g - target).abs();
                    worst = worst.max(r);
                    t.push(vec![x.into(), y.into(), g.into(), target.into(), r.into()]);
                }
            }
            emit(&common, Output::Table(t), Format::Csv)?;
            check(worst <= tol, || {
                format!("max Gram residual {worst:e} > {tol:e}")
            })
        }

        Command::Transition {
            common,
            nodes,
            x0,
            n,
            tol,
        } => {
            let params = WalkParams::subcritical(common.delta)?;
            let mu = build_measure(common.delta, nodes.nodes)?;
            let dp = evolve(&params, x0, n)?;
            let row = mu.transition_row(x0, n)?;
            let mut t = Table::new(&["y", "spectral", "clipped", "dp", "abs_diff"]);
            let mut worst: f64 = 0.0;
            for y in dp.reachable() {
                let d = (row[y] - dp.prob(y)).abs();
                worst = worst.max(d);
                t.push(vec![
                    y.into(),
                    row[y].into(),
                    row[y].clamp(0.0, 1.0).into(),
                    dp.prob(y).into(),
                    d.into(),
                ]);
            }
            emit(&common, Output::Table(t), Format::Csv)?;
            check(worst <= tol, || {
                format!("max |spectral - dp| {worst:e} > {tol:e}")
            })
        }

        Command::Dette {
            common,
            nodes,
            max_degree,
            tol,
        } => {
            let report = dette_checks(common.delta, max_degree, nodes)?;
            emit(&common, Output::report(&report)?, Format::Json)?;
            let worst = report.worst();
            check(worst <= tol, || {
                format!("worst residual {worst:e} > {tol:e}")
            })
        }

        Command::Genfun {
            common,
            nodes,
            z,
            n_max,
            tol,
        } => {
            WalkParams::subcritical(common.delta)?;
            if let Some(bad) = z.iter().find(|z| !(0.0..=0.999).contains(*z)) {
                return Err(Failure::Usage(format!(
                    "z must lie in [0, 0.999], got {bad}"
                )));
            }
            let mu = build_measure(common.delta, nodes.nodes)?;
            let gf = GenFun::new(common.delta)?;
            let mut t = Table::new(&["z", "g_e", "g_o", "dp_g_e", "dp_g_o", "tail_bound", "gap"]);
            let mut worst: f64 = 0.0;
            for &zv in &z {
                let s = gf.generating_functions(&mu, zv)?;
                let d = dp_partial_sums(common.delta, zv, n_max)?;
                let gap = (s.g_e - d.g_e).abs().max((s.g_o - d.g_o).abs()) + d.tail_bound;
                worst = worst.max(gap);
                t.push(vec![
                    zv.into(),
                    s.g_e.into(),
                    s.g_o.into(),
                    d.g_e.into(),
                    d.g_o.into(),
                    d.tail_bound.into(),
                    gap.into(),
                ]);
            }
            emit(&common, Output::Table(t), Format::Csv)?;
            check(worst <= tol, || {
                format!("gap plus tail {worst:e} > {tol:e}")
            })
        }

        Command::Kdelta { common, nodes } => {
            let k = k_delta_checked(common.delta, nodes.nodes)?;
            if !k.converged {
                eprintln!("wallwalk: K_δ changed by more than the tolerance under node doubling");
            }
            emit(&common, Output::report(&k)?, Format::Json)
        }

        Command::Asym {
            common,
            nodes,
            n_list,
        } => {
            let list = if n_list.is_empty() {
                default_n_list()
            } else {
                n_list
            };
            let report = check_moment_asymptotics(common.delta, &list, nodes.nodes)?;
            let out = if common.format == Some(Format::Csv) {
                let mut t = Table::new(&["n", "mean", "ratio"]);
                for s in &report.samples {
                    t.push(vec![s.n.into(), s.mean.into(), s.ratio.into()]);
                }
                Output::Table(t)
            } else {
                Output::report(&report)?
            };
            emit(&common, out, Format::Json)
        }

        Command::Asymz {
            common,
            nodes,
            z_grid,
        } => {
            let grid = if z_grid.is_empty() {
                default_z_grid()
            } else {
                z_grid
            };
            let report = check_gen_asymptotics(common.delta, &grid, nodes.nodes)?;
            let out = if common.format == Some(Format::Csv) {
                let mut t = Table::new(&["z", "g_e", "g_o", "ratio"]);
                for s in &report.samples {
                    t.push(vec![s.z.into(), s.g_e.into(), s.g_o.into(), s.ratio.into()]);
                }
                Output::Table(t)
            } else {
                Output::report(&report)?
            };
            emit(&common, out, Format::Json)
        }

        Command::VerifyAll {
            common,
            nodes,
            mutate_b_sign,
        } => {
            let report = verify_all(&VerifyOptions {
                delta: common.delta,
                nodes: nodes.nodes,
                mutate_b_sign,
            })?;
            let mut t = Table::new(&["check", "value", "tolerance", "passed"]);
            for c in &report.checks {
                t.push(vec![
                    c.name.into(),
                    c.value.into(),
                    c.tolerance.into(),
                    c.passed.into(),
                ]);
            }
            emit(&common, Output::Table(t), Format::Csv)?;
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name)
                .collect();
            check(failed.is_empty(), || failed.join(", "))
        }
    }
}
