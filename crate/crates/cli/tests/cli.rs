use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qcont::bounds::{check_thm1, BoundReport};
use qcont::channels::ChannelRecord;
use qcont::filtered::{ChannelSetRecord, FreeSetRecord};
use qcont::lab::{ginibre_state, sample_rng, FuzzReport};
use qcont::{
    isotropic_mix, max_entangled, ChannelSet, DensityMatrix, FreeSet, OperatorRecord,
    QuantumChannel,
};
use serde_json::Value;

fn qcont(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcont"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn envelope(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", stderr(o));
    let v: Value = serde_json::from_str(&stdout(o)).unwrap();
    assert_eq!(v["tool"], "qcont");
    assert_eq!(v["schema"], 1);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    v
}

struct Fixtures {
    dir: PathBuf,
}

impl Fixtures {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("qcont-cli-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Self { dir }
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.dir.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn state(&self, name: &str, rho: &DensityMatrix) -> String {
        self.write(name, &OperatorRecord::from_matrix(rho.matrix()).to_json())
    }
}

fn p(path: &str) -> &Path {
    Path::new(path)
}

fn twelve(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap()
}

#[test]
fn formula_bound_prints_the_value_and_tag() {
    let v = envelope(&qcont(&["bound", "thm1", "--M", "4", "--eps", "0.25"]));
    assert_eq!(v["equation_tag"], "thm1");
    let rhs = v["report"]["rhs"].as_f64().unwrap();
    assert!(rhs.to_string().starts_with("1.207518"), "{rhs}");
    let back: BoundReport = serde_json::from_value(v["report"].clone()).unwrap();
    assert_eq!(back.params["M"], 4.0);
}

#[test]
fn bound_grids_and_csv() {
    let o = qcont(&[
        "bound",
        "wilde",
        "--dA",
        "2,3",
        "--eps",
        "0.1,0.2,0.3",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "equation_tag,lhs,rhs,slack,applicable,reason,params"
    );
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("wilde,,"));
    let v = envelope(&qcont(&["bound", "eq14", "--dA", "2", "--eps", "0.1"]));
    assert_eq!(v["report"]["params"]["dA"], 2.0);
}

#[test]
fn every_bound_kind_evaluates() {
    let cases: [&[&str]; 11] = [
        &["thm1", "--M", "2", "--eps", "0.1"],
        &["thm1s", "--M", "2", "--eps", "0.1"],
        &["fa", "--d", "3", "--eps", "0.1"],
        &["ifa", "--d", "3", "--lambda", "0.5", "--eps", "0.1"],
        &["eq14", "--dA", "2", "--sn", "2", "--eps", "0.1"],
        &["afw", "--dA", "2", "--eps", "0.1"],
        &["wilde", "--dA", "2", "--eps", "0.1"],
        &["mi", "--dA", "2", "--dB", "3", "--eps", "0.1"],
        &["prop6", "--dB", "2", "--eps", "0.1"],
        &["prop7", "--d", "2", "--eps", "0.1"],
        &["prop9", "--dmax", "1.5", "--eps", "0.1"],
    ];
    for case in cases {
        let args: Vec<&str> = std::iter::once("bound")
            .chain(case.iter().copied())
            .collect();
        let v = envelope(&qcont(&args));
        assert!(v["report"]["rhs"].as_f64().unwrap() > 0.0, "{case:?}");
    }
}

#[test]
fn usage_errors_exit_one_with_the_grammar() {
    let o = qcont(&["bound", "thm1", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("requires --M"));
    assert!(stderr(&o).contains("Grammar:"));
    let o = qcont(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("qcont divergence"));
    let o = qcont(&["bound", "thm1", "--M", "0.5", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(qcont(&["--help"]).status.success());
}

#[test]
fn divergences_of_files() {
    let fx = Fixtures::new("div");
    let mut rng = sample_rng(1, 0);
    let a = fx.state("a.json", &ginibre_state(3, 3, &mut rng).unwrap());
    let b = fx.state("b.json", &ginibre_state(3, 3, &mut rng).unwrap());
    let v = envelope(&qcont(&["divergence", "relent", &a, &a]));
    assert_eq!(v["report"]["value"], 0.0);
    assert_eq!(v["equation_tag"], "relent");
    for kind in ["dmax", "tracedist"] {
        let v = envelope(&qcont(&["divergence", kind, &a, &b]));
        assert!(v["report"]["value"].as_f64().unwrap() > 0.0);
    }
    let v = envelope(&qcont(&["divergence", "hockey", "--gamma", "1.5", &a, &b]));
    assert_eq!(v["report"]["gamma"], 1.5);
    assert_eq!(
        qcont(&["divergence", "hockey", &a, &b]).status.code(),
        Some(1)
    );

    let phi = fx.write(
        "phi.json",
        &OperatorRecord::from_bipartite(&max_entangled(2).unwrap()).to_json(),
    );
    let v = envelope(&qcont(&["divergence", "condent", &phi]));
    assert!((v["report"]["value"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    let v = envelope(&qcont(&["divergence", "mutinfo", &phi]));
    assert!((v["report"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(qcont(&["divergence", "condent", &a]).status.code(), Some(1));

    let v = envelope(&qcont(&["integral", &a, &b, "--tol", "1e-8"]));
    let spectral = envelope(&qcont(&["divergence", "relent", &a, &b]));
    let (x, y) = (
        v["report"]["value"].as_f64().unwrap(),
        spectral["report"]["value"].as_f64().unwrap(),
    );
    assert!((x - y).abs() < 1e-6);
}

#[test]
fn parse_errors_name_path_and_byte_offset() {
    let fx = Fixtures::new("parse");
    // The stray `[` after `[0, 0]` sits at byte 50.
    let bad = fx.write(
        "bad.json",
        "{\"dim\": 2,\n \"entries\": [[[1, 0], [0, 0]], [[0, 0] [0, 0]]]}",
    );
    let good = fx.state("good.json", &DensityMatrix::maximally_mixed(2).unwrap());
    let o = qcont(&["divergence", "relent", &bad, &good]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("bad.json") && err.contains("at byte 50"),
        "{err}"
    );
    let o = qcont(&["divergence", "relent", &good, "/nonexistent/x.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/x.json"));
    let not_psd = fx.write(
        "neg.json",
        r#"{"dim": 2, "entries": [[[1.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]}"#,
    );
    let o = qcont(&["divergence", "relent", &not_psd, &good]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("neg.json"));
}

#[test]
fn check_matches_the_library_in_printed_digits() {
    let fx = Fixtures::new("check");
    let mut rng = sample_rng(7, 0);
    let states: Vec<DensityMatrix> = (0..3)
        .map(|_| ginibre_state(3, 3, &mut rng).unwrap())
        .collect();
    let files: Vec<String> = states
        .iter()
        .enumerate()
        .map(|(i, s)| fx.state(&format!("s{i}.json"), s))
        .collect();
    let o = qcont(&["check", "thm1", &files[0], &files[1], &files[2]]);
    let v = envelope(&o);
    let lib = check_thm1(&states[0], &states[1], &states[2], None, None).unwrap();
    assert_eq!(
        v["report"]["lhs"].as_f64().unwrap(),
        twelve(lib.lhs.unwrap())
    );
    assert_eq!(v["report"]["rhs"].as_f64().unwrap(), twelve(lib.rhs));
    assert_eq!(
        v["report"]["slack"].as_f64().unwrap(),
        twelve(lib.slack.unwrap())
    );
    for (k, x) in &lib.params {
        assert_eq!(
            v["report"]["params"][k].as_f64().unwrap(),
            twelve(*x),
            "{k}"
        );
    }
    let back: BoundReport = serde_json::from_value(v["report"].clone()).unwrap();
    assert_eq!(back.equation_tag, "thm1");
}

#[test]
fn false_hypothesis_gives_exit_three() {
    // A Schmidt-number bound of 1 is false for entangled states, so the equal-marginal
    // bound is violated; the report is still printed.
    let fx = Fixtures::new("viol");
    let phi = fx.write(
        "phi.json",
        &OperatorRecord::from_bipartite(&max_entangled(2).unwrap()).to_json(),
    );
    let iso = fx.write(
        "iso.json",
        &OperatorRecord::from_bipartite(&isotropic_mix(2, 0.3).unwrap()).to_json(),
    );
    let o = qcont(&["check", "eq14", &phi, &iso, "--sn", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["report"]["slack"].as_f64().unwrap() < 0.0);
    let o = qcont(&["check", "eq14", &phi, &iso]);
    assert_eq!(o.status.code(), Some(0));
    let v = envelope(&qcont(&["check", "marginal-correction", &phi, &iso]));
    assert_eq!(v["equation_tag"], "eq14-general");
}

fn filtered_fixtures(fx: &Fixtures) -> (String, String, String, String) {
    let mut rng = sample_rng(11, 0);
    let gens = vec![
        DensityMatrix::maximally_mixed(2).unwrap(),
        ginibre_state(2, 1, &mut rng).unwrap(),
        ginibre_state(2, 2, &mut rng).unwrap(),
    ];
    let free = FreeSet::new(gens, 0).unwrap();
    let l = ChannelSet::new(vec![
        QuantumChannel::identity(2).unwrap(),
        QuantumChannel::amplitude_damping(0.3).unwrap(),
    ])
    .unwrap();
    let rho = fx.state("rho.json", &ginibre_state(2, 2, &mut rng).unwrap());
    let sigma = fx.state("sigma.json", &ginibre_state(2, 2, &mut rng).unwrap());
    let f = fx.write("free.json", &FreeSetRecord::from_free_set(&free).to_json());
    let lf = fx.write(
        "channels.json",
        &ChannelSetRecord::from_channel_set(&l).to_json(),
    );
    (rho, sigma, f, lf)
}

#[test]
fn filtered_commands_and_checks() {
    let fx = Fixtures::new("filtered");
    let (rho, sigma, f, l) = filtered_fixtures(&fx);
    let rel = envelope(&qcont(&["filtered", "relent", &rho, &f, &l]));
    let value = rel["report"]["value"].as_f64().unwrap();
    assert!(rel["report"]["lower"].as_f64().unwrap() <= value);
    let dm = envelope(&qcont(&["filtered", "dmax", &rho, &f, &l]));
    assert!(dm["report"]["value"].as_f64().unwrap() >= value - 1e-6);
    let n = envelope(&qcont(&["filtered", "norm", &rho, &l]));
    assert!((n["report"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    for form in ["star", "convex", "two-sided"] {
        let v = envelope(&qcont(&[
            "check", "prop9", &rho, &sigma, &f, &l, "--form", form,
        ]));
        assert!(v["report"]["slack"].as_f64().unwrap() >= -1e-5, "{form}");
    }
    let v = envelope(&qcont(&["check", "lemma3", &rho, &f, &l, "--q", "0.1,0.6"]));
    assert_eq!(v["report"].as_array().unwrap().len(), 2);
    assert_eq!(
        qcont(&["check", "lemma3", &rho, &f, &l]).status.code(),
        Some(1)
    );
}

#[test]
fn channel_commands() {
    let fx = Fixtures::new("channel");
    let write = |name: &str, ch: &QuantumChannel| {
        fx.write(name, &ChannelRecord::from_channel(ch).to_json())
    };
    let gamma = 0.25;
    let n = write(
        "ad.json",
        &QuantumChannel::amplitude_damping(gamma).unwrap(),
    );
    let theta = write(
        "theta.json",
        &QuantumChannel::amplitude_damping((1.0 - 2.0 * gamma) / (1.0 - gamma)).unwrap(),
    );
    let dep = write("dep.json", &QuantumChannel::depolarizing(2, 0.5).unwrap());

    let st = envelope(&qcont(&["channel", "dmax", &n, &dep]));
    let un = envelope(&qcont(&[
        "channel",
        "dmax-unstab",
        &n,
        &dep,
        "--restarts",
        "2",
        "--seed",
        "5",
    ]));
    assert_eq!(un["report"]["seed"], 5);
    assert!(
        un["report"]["value"].as_f64().unwrap() <= st["report"]["value"].as_f64().unwrap() + 1e-8
    );

    let c = envelope(&qcont(&["channel", "complement", &n]));
    let rec: ChannelRecord = serde_json::from_value(c["report"].clone()).unwrap();
    assert_eq!((rec.din, rec.dout), (2, 2));

    let ic = envelope(&qcont(&["channel", "icinfo", &n, "--restarts", "1"]));
    let ut = envelope(&qcont(&["channel", "utheta", &n, &theta]));
    let (ic, ut) = (
        ic["report"]["value"].as_f64().unwrap(),
        ut["report"]["value"].as_f64().unwrap(),
    );
    assert!((ic - ut).abs() < 2e-5);

    let d = envelope(&qcont(&[
        "channel",
        "degrade",
        &n,
        &theta,
        "--restarts",
        "1",
    ]));
    assert_eq!(d["equation_tag"], "prop8");
    assert!(d["report"]["eps_upper"].as_f64().unwrap() <= 1e-8);
    assert_eq!(qcont(&["channel", "degrade", &n]).status.code(), Some(1));
}

#[test]
fn fuzz_is_deterministic_across_workers() {
    let args = [
        "fuzz",
        "wilde",
        "--dA",
        "2",
        "--dB",
        "2",
        "--samples",
        "3000",
        "--seed",
        "42",
    ];
    let one = qcont(&args);
    let mut more = args.to_vec();
    more.extend(["--workers", "3"]);
    let three = qcont(&more);
    assert_eq!(stdout(&one), stdout(&three));
    let v = envelope(&one);
    assert_eq!(v["equation_tag"], "wilde");
    let r: FuzzReport = serde_json::from_value(v["report"].clone()).unwrap();
    assert_eq!((r.samples, r.seed), (3000, 42));
    assert!(!r.failed);

    let o = qcont(&[
        "fuzz",
        "thm1",
        "--samples",
        "200",
        "--seed",
        "1",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "campaign,samples,violations,max_violation,min_slack,seed"
    );
    assert!(lines[1].starts_with("thm1,200,0,"));
    assert!(lines[1].ends_with(",1"));

    assert_eq!(qcont(&["fuzz", "thm2"]).status.code(), Some(1));
    assert_eq!(
        qcont(&["fuzz", "thm1", "--dA", "2..9"]).status.code(),
        Some(1)
    );
}

#[test]
fn tightness_and_file_output() {
    let fx = Fixtures::new("tight");
    let out = fx.dir.join("tight.json");
    let o = qcont(&["tightness", "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(p(out.to_str().unwrap())).unwrap()).unwrap();
    let reports: Vec<BoundReport> = serde_json::from_value(v["report"].clone()).unwrap();
    assert_eq!(reports.len(), 28);
    assert!(reports.iter().all(|r| r.slack.unwrap().abs() <= 1e-9));
    let csv = stdout(&qcont(&["tightness", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 29);
}
