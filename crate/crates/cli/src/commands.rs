use std::fmt;
use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use knotgate_core::algebra::{Mat2, Quaternion, C64};
use knotgate_core::compile::{compile_word, coverage};
use knotgate_core::diagram::{catalog, parse_pd, wirtinger_presentation, DiagramError, CATALOG_NAMES};
use knotgate_core::fpgroup::{GroupError, Presentation, Word};
use knotgate_core::holonomy::{
    abelian_plaquette_phase, axis_angle, connection_from_rep, loop_transport, plaquette_defect, word_holonomy, HolonomyError,
    Loop, SpinFamily, Transport, TransportMode,
};
use knotgate_core::linkgate::{entangling_power, evolve, local_times, scan_entangling, LinkGateError, LinkGateSpec};
use knotgate_core::reps::{
    b3_presentation, character_scan, fibonacci_rep, kl_family, modular_image, rep_solve_multi, trivial_rep, verify, KLParams,
    RepError, Representation, ScanGrid, SolveOptions,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;

/// Exit status 2: bad input. Exit status 3: a numeric method failed.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numeric(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) | Failure::Numeric(m) => f.write_str(m),
        }
    }
}

fn invalid(msg: impl fmt::Display) -> Failure {
    Failure::Validation(msg.to_string())
}

impl From<DiagramError> for Failure {
    fn from(e: DiagramError) -> Self {
        invalid(e)
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        invalid(e)
    }
}

impl From<RepError> for Failure {
    fn from(e: RepError) -> Self {
        match e {
            RepError::NoConvergence { .. } => Failure::Numeric(e.to_string()),
            other => invalid(other),
        }
    }
}

impl From<HolonomyError> for Failure {
    fn from(e: HolonomyError) -> Self {
        match e {
            HolonomyError::DegenerateSpectrum { .. } => Failure::Numeric(e.to_string()),
            other => invalid(other),
        }
    }
}

impl From<LinkGateError> for Failure {
    fn from(e: LinkGateError) -> Self {
        invalid(e)
    }
}

impl From<knotgate_core::compile::CompileError> for Failure {
    fn from(e: knotgate_core::compile::CompileError) -> Self {
        invalid(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        invalid(format!("invalid JSON: {e}"))
    }
}

pub struct Output {
    pub command: &'static str,
    pub inputs: Value,
    pub result: Value,
    pub text: String,
    pub status: u8,
}

#[derive(Serialize)]
pub struct Envelope<'a> {
    pub command: &'a str,
    pub inputs: &'a Value,
    pub result: &'a Value,
    pub version: &'a str,
}

type Res = Result<Output, Failure>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("core types serialize")
}

fn read_text(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) if p != Path::new("-") => {
            std::fs::read_to_string(p).map_err(|e| invalid(format!("cannot read {}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| invalid(format!("cannot read standard input: {e}")))?;
            Ok(s)
        }
    }
}

/// Accept either a bare value or a previous command's envelope, and look
/// inside it for `key`.
fn extract(v: Value, key: &str) -> Value {
    let v = match v {
        Value::Object(mut m) if m.contains_key("result") && m.contains_key("command") => m.remove("result").unwrap_or(Value::Null),
        other => other,
    };
    match v {
        Value::Object(mut m) if m.contains_key(key) => m.remove(key).unwrap_or(Value::Null),
        other => other,
    }
}

fn catalog_presentation(name: &str) -> Result<Presentation, Failure> {
    Ok(catalog(name)?.expected_presentation)
}

fn read_presentation(knot: Option<&str>, input: Option<&PathBuf>) -> Result<Presentation, Failure> {
    if let Some(k) = knot {
        return catalog_presentation(k);
    }
    let v: Value = serde_json::from_str(&read_text(input.map(PathBuf::as_path))?)?;
    Ok(serde_json::from_value(extract(v, "presentation"))?)
}

fn read_representation(text: &str) -> Result<Representation, Failure> {
    let v: Value = serde_json::from_str(text)?;
    Ok(serde_json::from_value(extract(v, "representation"))?)
}

fn load_rep(spec: &str) -> Result<Representation, Failure> {
    match spec {
        "fibonacci" => Ok(fibonacci_rep()),
        "trivial" => Ok(trivial_rep(&b3_presentation())),
        s if s.starts_with("kl:") => {
            let theta = parse_angle(&s[3..]).map_err(invalid)?;
            Ok(kl_family(&KLParams::from_theta(theta)?)?)
        }
        path => read_representation(&read_text(Some(Path::new(path)))?),
    }
}

fn matrix_text(m: &Mat2) -> String {
    let z = |c: C64| format!("{:+.6}{:+.6}i", c.re, c.im);
    format!("[[{}, {}], [{}, {}]]", z(m.0[0][0]), z(m.0[0][1]), z(m.0[1][0]), z(m.0[1][1]))
}

fn check_word(w: &Word, count: usize) -> Result<(), Failure> {
    match w.max_gen() {
        Some(g) if g >= count => Err(invalid(format!("word {w} uses generator {} but only {count} exist", g + 1))),
        _ => Ok(()),
    }
}

pub fn run(cli: &Cli) -> Res {
    match &cli.command {
        Command::Present(a) => present(a),
        Command::Rep(a) => rep(a),
        Command::Modular(a) => modular(a),
        Command::Holonomy(a) => holonomy(a),
        Command::Linkgate(a) => linkgate(a),
        Command::Compile(a) => compile(a),
        Command::Character(a) => character(a),
        Command::Catalog => catalog_cmd(),
    }
}

fn present(a: &PresentArgs) -> Res {
    let s = &a.source;
    let (label, pd) = if let Some(k) = &s.knot {
        (k.clone(), catalog(k)?.pd)
    } else if let Some(text) = &s.pd {
        ("pd".to_string(), parse_pd(text)?)
    } else {
        let path = s.pd_file.as_ref().expect("clap requires one diagram source");
        (path.display().to_string(), parse_pd(&read_text(Some(path))?)?)
    };
    let raw = wirtinger_presentation(&pd);
    let p = if a.reduce { raw.simplify() } else { raw };
    Ok(Output {
        command: "present",
        inputs: json!({ "knot": s.knot, "pd": s.pd, "pd_file": s.pd_file, "reduce": a.reduce }),
        result: json!({
            "presentation": p,
            "pd": pd.to_string(),
            "crossings": pd.crossings().len(),
            "arcs": pd.wirtinger_arc_count(),
            "components": pd.num_components(),
            "reduced": a.reduce,
        }),
        text: format!("{label}: {p}\n"),
        status: 0,
    })
}

fn rep(a: &RepArgs) -> Res {
    let inputs = json!({
        "type": format!("{:?}", a.rep_type).to_lowercase(),
        "theta": a.theta,
        "negate_c": a.negate_c,
        "negate_s": a.negate_s,
        "check": a.check,
        "solve": a.solve,
        "verify": a.verify,
        "input": a.input,
        "knot": a.knot,
        "seed": a.seed,
        "restarts": a.restarts,
        "nonabelian": a.nonabelian,
        "tol": a.tol,
    });
    let status = |r: f64| if a.check && !(r <= a.tol) { 3 } else { 0 };

    if a.verify {
        let rep = read_representation(&read_text(a.input.as_deref())?)?;
        let residual = verify(&rep)?;
        return Ok(Output {
            command: "rep",
            inputs,
            result: json!({ "residual": residual, "valid": residual <= a.tol }),
            text: format!("residual {residual:.3e}\n"),
            status: status(residual),
        });
    }

    if a.solve {
        let p = read_presentation(a.knot.as_deref(), a.input.as_ref())?;
        let seeds: Vec<u64> = (a.seed..a.seed.saturating_add(a.restarts.max(1))).collect();
        let opts = SolveOptions { tol_rep: a.tol, ..SolveOptions::default() };
        let nonabelian = a.nonabelian;
        let (best, log) = rep_solve_multi(&p, &seeds, &opts, |r| !nonabelian || (r.images().len() >= 2 && r.commutator_defect() > 0.1));
        let Some((seed, rep)) = best else {
            let closest = log.iter().map(|o| o.residual).fold(f64::INFINITY, f64::min);
            return Err(Failure::Numeric(format!(
                "no acceptable representation from {} seed(s); best residual {closest:.3e}",
                seeds.len()
            )));
        };
        let commutator = (rep.images().len() >= 2).then(|| rep.commutator_defect());
        let mut text = format!("seed {seed}: residual {:.3e}\n", rep.residual());
        for (name, m) in p.generators().iter().zip(rep.images()) {
            let _ = writeln!(text, "  {name} = {}", matrix_text(m));
        }
        return Ok(Output {
            command: "rep",
            inputs,
            result: json!({
                "representation": rep,
                "seed": seed,
                "residual": rep.residual(),
                "commutator_defect": commutator,
                "attempts": log,
            }),
            text,
            status: 0,
        });
    }

    let rep = match a.rep_type {
        RepType::Fibonacci => fibonacci_rep(),
        RepType::Trivial => trivial_rep(&b3_presentation()),
        RepType::Kl => {
            let theta = a.theta.ok_or_else(|| invalid("--type kl needs --theta"))?;
            kl_family(&KLParams::with_branch(theta, a.negate_c, a.negate_s)?)?
        }
    };
    let residual = verify(&rep)?;
    let point = rep.character_point()?;
    let mut text = format!("{}: residual {residual:.3e}\n", rep.name().unwrap_or("representation"));
    for (name, m) in rep.presentation().generators().iter().zip(rep.images()) {
        let _ = writeln!(text, "  {name} = {}", matrix_text(m));
    }
    Ok(Output {
        command: "rep",
        inputs,
        result: json!({ "representation": rep, "residual": residual, "character": point }),
        text,
        status: status(residual),
    })
}

fn modular(a: &ModularArgs) -> Res {
    let w = Word::parse(&a.word)?;
    let m = modular_image(&w)?;
    Ok(Output {
        command: "modular",
        inputs: json!({ "word": a.word }),
        result: json!({ "word": w, "matrix": m }),
        text: format!("[[{}, {}], [{}, {}]]\n", m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]),
        status: 0,
    })
}

fn holonomy(a: &HolonomyArgs) -> Res {
    match &a.mode {
        HolonomyMode::Word { rep, word, tol } => {
            let r = load_rep(rep)?;
            if !(r.residual() <= *tol) {
                return Err(invalid(format!("representation residual {:.3e} exceeds {tol:e}", r.residual())));
            }
            let conn = connection_from_rep(&r)?;
            let w = Word::parse(word)?;
            check_word(&w, r.images().len())?;
            let u = word_holonomy(&conn, &w);
            let aa = axis_angle(&u);
            Ok(Output {
                command: "holonomy",
                inputs: json!({ "mode": "word", "rep": rep, "word": word, "tol": tol }),
                result: json!({ "unitary": u, "axis_angle": aa, "reduced_word": w.free_reduce() }),
                text: format!("{}\naxis {:?} angle {:.12}\n", matrix_text(&u), aa.axis, aa.angle),
                status: 0,
            })
        }
        HolonomyMode::Loop { kind, theta, refine, points, mode, band } => {
            let lp = match kind {
                LoopKind::Equator => Loop::equator(*refine),
                LoopKind::Latitude => Loop::latitude(theta.ok_or_else(|| invalid("--loop latitude needs --theta"))?, *refine),
                LoopKind::Csv => {
                    let path = points.as_ref().ok_or_else(|| invalid("--loop csv needs --points"))?;
                    Loop::from_csv(&read_text(Some(path))?).map_err(invalid)?
                }
            };
            let tm = match mode {
                ModeArg::Full => TransportMode::Full,
                ModeArg::Abelian => TransportMode::Abelian(*band),
            };
            let inputs = json!({
                "mode": "loop",
                "loop": format!("{kind:?}").to_lowercase(),
                "theta": theta,
                "refine": refine,
                "points": points,
                "transport": format!("{mode:?}").to_lowercase(),
                "band": band,
            });
            let (result, text) = match loop_transport(&SpinFamily, &lp, tm)? {
                Transport::Full(u) => {
                    let aa = axis_angle(&u);
                    (
                        json!({ "segments": lp.refinement(), "unitary": u, "axis_angle": aa }),
                        format!("{}\naxis {:?} angle {:.3e}\n", matrix_text(&u), aa.axis, aa.angle),
                    )
                }
                Transport::Abelian(z) => (
                    json!({ "segments": lp.refinement(), "band": band, "phase": [z.re, z.im], "angle": z.arg() }),
                    format!("phase {:+.12}{:+.12}i (angle {:.12})\n", z.re, z.im, z.arg()),
                ),
            };
            Ok(Output { command: "holonomy", inputs, result, text, status: 0 })
        }
        HolonomyMode::Flatness { theta, phi, delta, halvings } => {
            let x = [*theta, *phi];
            let mut rows = Vec::new();
            let mut text = String::from("delta        defect       defect/delta^2  ratio   abelian_phase\n");
            let mut d = *delta;
            let mut prev: Option<f64> = None;
            for _ in 0..=*halvings {
                let defect = plaquette_defect(&SpinFamily, &x, d)?;
                let abelian = abelian_plaquette_phase(&SpinFamily, &x, d, 0)?;
                let ratio = prev.map(|p| p / defect);
                let _ = writeln!(
                    text,
                    "{d:<12.4e} {defect:<12.4e} {:<15.4e} {:<7} {abelian:.6e}",
                    defect / (d * d),
                    ratio.map_or("-".to_string(), |r| format!("{r:.2}"))
                );
                rows.push(json!({ "delta": d, "defect": defect, "residual": defect / (d * d), "ratio": ratio, "abelian_phase": abelian }));
                prev = Some(defect);
                d *= 0.5;
            }
            Ok(Output {
                command: "holonomy",
                inputs: json!({ "mode": "flatness", "theta": theta, "phi": phi, "delta": delta, "halvings": halvings }),
                result: json!({ "point": x, "rows": rows }),
                text,
                status: 0,
            })
        }
    }
}

fn linkgate(a: &LinkgateArgs) -> Res {
    let mut spec = LinkGateSpec::from_catalog(&a.link)?;
    if let Some(o) = a.over {
        spec.over_count = o;
    }
    if let Some(u) = a.under {
        spec.under_count = u;
    }
    let gate = evolve(&spec, a.time)?;
    let lambda = entangling_power(&gate);
    let mut text = format!(
        "{} (over {}, under {}), t = {}\nlambda_min = {lambda:.12}\n",
        spec.name, spec.over_count, spec.under_count, a.time
    );
    let mut result = json!({
        "spec": spec,
        "time": a.time,
        "hamiltonian": gate.hamiltonian,
        "unitary": gate.unitary,
        "unitarity_defect": gate.unitary.unitarity_defect(),
        "lambda_min": lambda,
    });
    if a.scan {
        let rows = scan_entangling(&spec, 0.0, std::f64::consts::PI, a.scan_steps)?;
        let roots = local_times(&spec, 0.0, std::f64::consts::PI, a.scan_steps, 1e-10)?;
        text.push_str("t            lambda_min\n");
        for r in &rows {
            let _ = writeln!(text, "{:<12.8} {:.10}", r.t, r.lambda_min);
        }
        let _ = writeln!(text, "product-state times: {:?}", roots.iter().map(|r| r.t).collect::<Vec<_>>());
        result["scan"] = to_value(&rows);
        result["local_times"] = to_value(&roots);
    }
    Ok(Output {
        command: "linkgate",
        inputs: json!({ "link": a.link, "over": a.over, "under": a.under, "time": a.time, "scan": a.scan, "scan_steps": a.scan_steps }),
        result,
        text,
        status: 0,
    })
}

fn parse_target(a: &CompileArgs) -> Result<Mat2, Failure> {
    if let Some(path) = &a.target_json {
        let v: Value = serde_json::from_str(&read_text(Some(path))?)?;
        let v = extract(v, "target");
        if let Ok(q) = serde_json::from_value::<[f64; 4]>(v.clone()) {
            return Ok(Quaternion::from(q).to_matrix());
        }
        return Ok(serde_json::from_value::<Mat2>(v)?);
    }
    let t = a.target.as_deref().unwrap_or("identity");
    match t {
        "identity" | "1" => Ok(Mat2::identity()),
        "i" => Ok(Mat2::basis_i()),
        "j" => Ok(Mat2::basis_j()),
        "k" => Ok(Mat2::basis_k()),
        s if s.starts_with("axis:") => {
            let parts: Vec<&str> = s[5..].split(',').collect();
            if parts.len() != 4 {
                return Err(invalid("axis target needs axis:x,y,z,angle"));
            }
            let nums = parts[..3].iter().map(|p| p.trim().parse::<f64>().map_err(|_| invalid(format!("bad number {p:?}")))).collect::<Result<Vec<_>, _>>()?;
            let angle = parse_angle(parts[3]).map_err(invalid)?;
            let n = (nums[0] * nums[0] + nums[1] * nums[1] + nums[2] * nums[2]).sqrt();
            if n == 0.0 {
                return Err(invalid("axis must be nonzero"));
            }
            // rotation by `angle` about the axis
            Ok(Quaternion::from_axis_angle([nums[0] / n, nums[1] / n, nums[2] / n], 0.5 * angle).to_matrix())
        }
        other => Err(invalid(format!("unknown target {other:?}"))),
    }
}

fn compile(a: &CompileArgs) -> Res {
    let rep = load_rep(&a.rep)?;
    let inputs = json!({
        "rep": a.rep,
        "target": a.target,
        "target_json": a.target_json,
        "max_len": a.max_len,
        "eps": a.eps,
        "coverage": a.coverage,
        "seed": a.seed,
    });
    if let Some(samples) = a.coverage {
        let report = coverage(&rep, a.eps, a.max_len, samples, a.seed)?;
        let text = format!(
            "covered {:.4} of {} targets within {} at max_len {} (median distance {:.4})\n",
            report.covered_fraction, report.sample_count, report.epsilon, report.max_len, report.median_dist
        );
        return Ok(Output { command: "compile", inputs, result: to_value(&report), text, status: 0 });
    }
    let target = parse_target(a)?;
    let r = compile_word(&rep, &target, a.max_len, a.eps)?;
    let text = format!("word {:?} (length {}), distance {:.6e}, explored {}\n", r.word.to_string(), r.word.len(), r.dist, r.explored);
    let mut result = to_value(&r);
    result["target"] = to_value(&target);
    result["length"] = json!(r.word.len());
    Ok(Output { command: "compile", inputs, result, text, status: 0 })
}

fn character(a: &CharacterArgs) -> Res {
    let p = read_presentation(a.knot.as_deref(), a.input.as_ref())?;
    let points = character_scan(&p, &ScanGrid { steps: a.steps }, &SolveOptions::default())?;
    let mut text = String::new();
    if a.csv {
        text.push_str("x,y,z,residual\n");
        for pt in &points {
            let _ = writeln!(text, "{},{},{},{}", pt.x, pt.y, pt.z, pt.residual);
        }
    } else {
        let _ = writeln!(text, "{} character point(s) for {p}", points.len());
        for pt in &points {
            let _ = writeln!(text, "  x {:+.9} y {:+.9} z {:+.9}  residual {:.1e}", pt.x, pt.y, pt.z, pt.residual);
        }
    }
    Ok(Output {
        command: "character",
        inputs: json!({ "knot": a.knot, "input": a.input, "steps": a.steps, "csv": a.csv }),
        result: json!({ "presentation": p, "points": points }),
        text,
        status: 0,
    })
}

fn catalog_cmd() -> Res {
    let mut entries = Vec::new();
    let mut text = String::new();
    for name in CATALOG_NAMES {
        let e = catalog(name)?;
        let _ = writeln!(text, "{name:<10} {}  {}", e.expected_presentation, e.pd);
        entries.push(json!({
            "name": e.name,
            "pd": e.pd.to_string(),
            "presentation": e.expected_presentation,
            "crossing_counts": e.crossing_counts,
        }));
    }
    Ok(Output { command: "catalog", inputs: json!({}), result: Value::Array(entries), text, status: 0 })
}
