mod args;
mod input;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

use args::*;
use input::Failure;
use output::{Layout, Output};
use qcont::bounds::{self, tags, BoundReport};
use qcont::channels::{self, AscentOptions};
use qcont::filtered::{self, cor10_check, lemma3_check, prop9_check, prop9_convex_check};
use qcont::lab::{fuzz, tightness_suite, CampaignParams, RngConfig};

#[derive(Serialize)]
struct Scalar {
    #[serde(with = "qcont::json::float")]
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
}

#[derive(Serialize)]
struct Seeded<T: Serialize> {
    #[serde(flatten)]
    inner: T,
    seed: u64,
}

/// A report plus whether it records a violated theorem.
struct Run {
    output: Output,
    violated: bool,
}

impl From<Output> for Run {
    fn from(output: Output) -> Self {
        Run {
            output,
            violated: false,
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn expect_files(files: &[PathBuf], n: usize, what: &str) -> Result<(), Failure> {
    if files.len() != n {
        return Err(usage(format!(
            "{what} takes {n} file(s), got {}",
            files.len()
        )));
    }
    Ok(())
}

fn scalar(tag: &str, value: f64) -> Output {
    Output::new(tag, Layout::Flat, &Scalar { value, gamma: None })
}

fn divergence(a: &DivergenceArgs) -> Result<Run, Failure> {
    let f = &a.files;
    let pair = || -> Result<_, Failure> {
        expect_files(f, 2, "this divergence")?;
        Ok((input::density(&f[0])?, input::density(&f[1])?))
    };
    let out = match a.kind {
        DivergenceKind::Relent => {
            let (r, s) = pair()?;
            Output::new("relent", Layout::Flat, &qcont::rel_entropy(&r, &s)?)
        }
        DivergenceKind::Dmax => {
            let (r, s) = pair()?;
            Output::new("dmax", Layout::Flat, &qcont::d_max(&r, &s)?)
        }
        DivergenceKind::Hockey => {
            let gamma = a
                .gamma
                .ok_or_else(|| usage("divergence hockey requires --gamma"))?;
            let (r, s) = pair()?;
            let value = qcont::hockey_stick(&r, &s, gamma)?;
            Output::new(
                "hockey",
                Layout::Flat,
                &Scalar {
                    value,
                    gamma: Some(gamma),
                },
            )
        }
        DivergenceKind::Tracedist => {
            let (r, s) = pair()?;
            scalar("tracedist", qcont::trace_distance(&r, &s)?)
        }
        DivergenceKind::Condent | DivergenceKind::Mutinfo => {
            expect_files(f, 1, "this entropy")?;
            let rho = input::bipartite(&f[0], a.da, a.db)?;
            if a.kind == DivergenceKind::Condent {
                scalar("condent", qcont::cond_entropy(&rho)?)
            } else {
                scalar("mutinfo", qcont::mutual_info(&rho)?)
            }
        }
    };
    Ok(out.into())
}

fn integral(a: &IntegralArgs) -> Result<Run, Failure> {
    let (r, s) = (input::density(&a.rho)?, input::density(&a.sigma)?);
    Ok(Output::new(
        "integral",
        Layout::Flat,
        &qcont::integral_rel_entropy(&r, &s, a.tol)?,
    )
    .into())
}

fn dim(name: &str, x: f64) -> Result<usize, Failure> {
    if x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(usage(format!("--{name} = {x} is not a positive integer")))
    }
}

/// Cartesian product of the flag lists, first axis slowest.
fn grid(kind: &str, axes: &[(&str, &[f64])]) -> Result<Vec<Vec<f64>>, Failure> {
    let mut points = vec![Vec::new()];
    for (name, values) in axes {
        if values.is_empty() {
            return Err(usage(format!("bound {kind} requires --{name}")));
        }
        points = points
            .into_iter()
            .flat_map(|p| values.iter().map(move |&v| [p.clone(), vec![v]].concat()))
            .collect();
    }
    Ok(points)
}

fn bound(a: &BoundArgs) -> Result<Run, Failure> {
    let sn_default = [f64::NAN];
    let sn: &[f64] = if a.sn.is_empty() { &sn_default } else { &a.sn };
    type Formula = fn(&[f64]) -> Result<f64, Failure>;
    let (tag, kind, axes, formula): (&str, &str, Vec<(&str, &[f64])>, Formula) = match a.kind {
        BoundKind::Thm1 => (
            tags::THM1,
            "thm1",
            vec![("M", &a.m), ("eps", &a.eps)],
            |v| Ok(bounds::thm1_bound(v[0], v[1])?),
        ),
        BoundKind::Thm1s => (
            tags::THM1_SIMPLIFIED,
            "thm1s",
            vec![("M", &a.m), ("eps", &a.eps)],
            |v| Ok(bounds::thm1_simplified(v[0], v[1])?),
        ),
        BoundKind::Fa => (
            tags::FANNES_AUDENAERT,
            "fa",
            vec![("d", &a.d), ("eps", &a.eps)],
            |v| Ok(bounds::fannes_audenaert(dim("d", v[0])?, v[1])?),
        ),
        BoundKind::Ifa => (
            tags::IMPROVED_FA,
            "ifa",
            vec![("d", &a.d), ("lambda", &a.lambda), ("eps", &a.eps)],
            |v| Ok(bounds::improved_fa(dim("d", v[0])?, v[1], v[2])?),
        ),
        BoundKind::Eq14 => (
            tags::EQ14,
            "eq14",
            vec![("dA", &a.da), ("sn", sn), ("eps", &a.eps)],
            |v| {
                let da = dim("dA", v[0])?;
                let sn = if v[1].is_nan() { da } else { dim("sn", v[1])? };
                Ok(bounds::equal_marginals_bound(da, sn, v[2])?)
            },
        ),
        BoundKind::Afw => (
            tags::AFW,
            "afw",
            vec![("dA", &a.da), ("eps", &a.eps)],
            |v| Ok(bounds::alicki_fannes_winter(dim("dA", v[0])?, v[1])?),
        ),
        BoundKind::Wilde => (
            tags::WILDE,
            "wilde",
            vec![("dA", &a.da), ("eps", &a.eps)],
            |v| Ok(bounds::wilde_rhs(dim("dA", v[0])?, v[1])?),
        ),
        BoundKind::Mi => (
            tags::MI,
            "mi",
            vec![("dA", &a.da), ("dB", &a.db), ("eps", &a.eps)],
            |v| {
                Ok(bounds::mi_conjecture_rhs(
                    dim("dA", v[0])?,
                    dim("dB", v[1])?,
                    v[2],
                )?)
            },
        ),
        BoundKind::Prop6 => (
            tags::PROP6,
            "prop6",
            vec![("dB", &a.db), ("eps", &a.eps)],
            |v| Ok(bounds::capacity_continuity_rhs(dim("dB", v[0])?, v[1])?),
        ),
        BoundKind::Prop7 => (
            tags::PROP7,
            "prop7",
            vec![("d", &a.d), ("eps", &a.eps)],
            |v| Ok(bounds::ecost_bound(dim("d", v[0])?, v[1])?),
        ),
        BoundKind::Prop9 => (
            tags::PROP9,
            "prop9",
            vec![("dmax", &a.dmax), ("eps", &a.eps)],
            |v| Ok(bounds::filtered_bound_rhs(v[0], v[1])?),
        ),
    };
    let mut reports = Vec::new();
    for point in grid(kind, &axes)? {
        let mut r = BoundReport::formula(tag, formula(&point)?);
        for ((name, _), &v) in axes.iter().zip(&point) {
            if !v.is_nan() {
                r = r.with_param(name, v);
            }
        }
        reports.push(r);
    }
    Ok(single_or_list(tag, Layout::Bound, reports).into())
}

fn single_or_list<T: Serialize>(tag: &str, layout: Layout, mut items: Vec<T>) -> Output {
    if items.len() == 1 {
        Output::new(tag, layout, &items.remove(0))
    } else {
        Output::new(tag, layout, &items)
    }
}

/// Slack below `-tolerance` on an applicable report is a violation.
fn check_tolerance(tag: &str) -> f64 {
    match tag {
        tags::PROP9 | tags::PROP9_CONVEX | tags::COR10 => 1e-5,
        tags::LEMMA3 => 1e-6,
        _ => 1e-8,
    }
}

fn check(a: &CheckArgs) -> Result<Run, Failure> {
    let f = &a.files;
    let reports = match a.kind {
        CheckKind::Thm1 => {
            expect_files(f, 3, "check thm1")?;
            let (r, s, w) = (
                input::density(&f[0])?,
                input::density(&f[1])?,
                input::density(&f[2])?,
            );
            vec![bounds::check_thm1(&r, &s, &w, a.eps, a.m)?]
        }
        CheckKind::Eq14 | CheckKind::MarginalCorrection => {
            expect_files(f, 2, "this check")?;
            let r = input::bipartite(&f[0], a.da, a.db)?;
            let s = input::bipartite(&f[1], a.da, a.db)?;
            if a.kind == CheckKind::Eq14 {
                vec![bounds::check_equal_marginals(&r, &s, a.sn)?]
            } else {
                vec![bounds::general_marginal_correction(&r, &s)?]
            }
        }
        CheckKind::Prop9 => {
            expect_files(f, 4, "check prop9")?;
            let (r, s) = (input::density(&f[0])?, input::density(&f[1])?);
            let (free, l) = (input::free_set(&f[2])?, input::channel_set(&f[3])?);
            vec![match a.form {
                Prop9Form::Star => prop9_check(&r, &s, &free, &l)?,
                Prop9Form::Convex => prop9_convex_check(&r, &s, &free, &l)?,
                Prop9Form::TwoSided => cor10_check(&r, &s, &free, &l)?,
            }]
        }
        CheckKind::Lemma3 => {
            expect_files(f, 3, "check lemma3")?;
            if a.q.is_empty() {
                return Err(usage("check lemma3 requires --q"));
            }
            let r = input::density(&f[0])?;
            let (free, l) = (input::free_set(&f[1])?, input::channel_set(&f[2])?);
            a.q.iter()
                .map(|&q| lemma3_check(&r, &free, &l, q))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let violated = reports
        .iter()
        .any(|r| r.violates(check_tolerance(&r.equation_tag)));
    let tag = reports[0].equation_tag.clone();
    Ok(Run {
        output: single_or_list(&tag, Layout::Bound, reports),
        violated,
    })
}

fn channel(a: &ChannelArgs) -> Result<Run, Failure> {
    let f = &a.files;
    let opts = AscentOptions {
        tol: a.tol,
        restarts: a.restarts,
        seed: a.seed,
    };
    let pair = || -> Result<_, Failure> {
        expect_files(f, 2, "this channel command")?;
        Ok((input::channel(&f[0])?, input::channel(&f[1])?))
    };
    let out = match a.kind {
        ChannelKind::Dmax => {
            let (l1, l2) = pair()?;
            Output::new(
                "channel-dmax",
                Layout::Flat,
                &channels::channel_dmax_stabilised(&l1, &l2)?,
            )
        }
        ChannelKind::DmaxUnstab => {
            let (l1, l2) = pair()?;
            let value = channels::channel_dmax_unstabilised(&l1, &l2, a.restarts, a.seed)?;
            Output::new(
                "channel-dmax-unstab",
                Layout::Flat,
                &Seeded {
                    inner: Scalar { value, gamma: None },
                    seed: a.seed,
                },
            )
        }
        ChannelKind::Complement => {
            expect_files(f, 1, "channel complement")?;
            let nc = input::channel(&f[0])?.complementary()?;
            Output::new(
                "complement",
                Layout::Flat,
                &qcont::ChannelRecord::from_channel(&nc),
            )
        }
        ChannelKind::Utheta => {
            let (n, theta) = pair()?;
            Output::new(
                "utheta",
                Layout::Flat,
                &channels::u_theta(&n, &theta, a.tol)?,
            )
        }
        ChannelKind::Icinfo => {
            expect_files(f, 1, "channel icinfo")?;
            let n = input::channel(&f[0])?;
            let r = channels::coherent_info_lower(&n, &opts)?;
            Output::new(
                "icinfo",
                Layout::Flat,
                &Seeded {
                    inner: r,
                    seed: a.seed,
                },
            )
        }
        ChannelKind::Degrade => {
            let (n, theta) = pair()?;
            let r = channels::degradability_bounds(&n, &theta, a.eps, &opts)?;
            Output::new(
                tags::PROP8,
                Layout::Flat,
                &Seeded {
                    inner: r,
                    seed: a.seed,
                },
            )
        }
    };
    Ok(out.into())
}

fn filtered_cmd(a: &FilteredArgs) -> Result<Run, Failure> {
    let f = &a.files;
    let out = match a.kind {
        FilteredKind::Norm => {
            expect_files(f, 2, "filtered norm")?;
            let (x, l) = (input::operator(&f[0])?, input::channel_set(&f[1])?);
            scalar("filtered-norm", filtered::filtered_norm(&x, &l)?)
        }
        FilteredKind::Relent | FilteredKind::Dmax => {
            expect_files(f, 3, "this filtered divergence")?;
            let r = input::density(&f[0])?;
            let (free, l) = (input::free_set(&f[1])?, input::channel_set(&f[2])?);
            if a.kind == FilteredKind::Relent {
                Output::new(
                    "filtered-relent",
                    Layout::Flat,
                    &filtered::filtered_rel_ent(&r, &free, &l, a.tol)?,
                )
            } else {
                Output::new(
                    "filtered-dmax",
                    Layout::Flat,
                    &filtered::filtered_dmax(&r, &free, &l, a.tol)?,
                )
            }
        }
    };
    Ok(out.into())
}

fn fuzz_cmd(a: &FuzzArgs) -> Result<Run, Failure> {
    let defaults = CampaignParams::for_campaign(a.campaign);
    let params = CampaignParams {
        dims: a.da,
        dims_b: a.db,
        entanglement_bias: a.entanglement_bias,
        witness_every: a.witness_every.or(defaults.witness_every),
        q: a.q,
        near_saturation_count: a.near,
    };
    let report = fuzz(
        a.campaign,
        &params,
        a.samples,
        &RngConfig::new(a.seed, a.workers),
    )?;
    Ok(Run {
        violated: report.failed,
        output: Output::new(a.campaign.tag(), Layout::Fuzz, &report),
    })
}

fn run(cli: &Cli) -> Result<Run, Failure> {
    match &cli.command {
        Command::Divergence(a) => divergence(a),
        Command::Integral(a) => integral(a),
        Command::Bound(a) => bound(a),
        Command::Check(a) => check(a),
        Command::Channel(a) => channel(a),
        Command::Filtered(a) => filtered_cmd(a),
        Command::Fuzz(a) => fuzz_cmd(a),
        Command::Tightness => {
            Ok(Output::new("tightness", Layout::Bound, &tightness_suite()?).into())
        }
    }
}

fn emit(cli: &Cli, out: &Output) -> Result<(), Failure> {
    let mut text = match cli.format {
        Format::Json => out.json(),
        Format::Csv => out.csv(),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            eprintln!("\n{GRAMMAR}");
            return ExitCode::from(1);
        }
    };
    let result = run(&cli).and_then(|r| emit(&cli, &r.output).map(|()| r.violated));
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(3),
        Err(f) => {
            eprintln!("qcont: {f}");
            if matches!(f, Failure::Usage(_)) {
                eprintln!("\n{GRAMMAR}");
            }
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
