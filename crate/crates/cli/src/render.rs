//! Text and JSON renderings of reports. Output is deterministic: no timing,
//! no hash-ordered collections.

use std::fmt::Write;

use igp_core::compendium::{CompendiumEntry, EntryKind};
use igp_core::complexes::{DeltaComplex, Face1D};
use igp_core::covering::{CoveringResult, CoveringStep, MoveKind, StepKind};
use igp_core::microperturb::{CrazyPerturbation, EffectivenessReport, Epsilon, EpsilonReport};
use igp_core::minimality::{MinimalityReport, Violation};
use igp_core::perturbation_space::{Equation, ExtremalityReport, Parameter, Provenance, Verdict};
use igp_core::pwfunction::{PiecewiseFunction, Side};
use igp_core::QuadraticElement as QE;
use serde_json::{json, Value};

/// Digits after the point in decimal renderings.
const DIGITS: u32 = 30;

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

fn triple((i, j, k): &(Face1D, Face1D, Face1D)) -> String {
    format!("F({i}, {j}, {k})")
}

fn interval((a, b): &(QE, QE)) -> String {
    format!("({a}, {b})")
}

fn violation_line(v: &Violation) -> String {
    let kind = serde_json::to_value(v.kind).expect("kind serializes");
    let kind = kind.as_str().unwrap_or_default().replace('_', "-");
    match (&v.point, &v.face, &v.vertex) {
        (Some((x, side)), _, _) => format!("{kind} at x = {x} ({side}): {}", v.value),
        (_, Some(face), Some((u, v2))) => format!("{kind} on {} at ({u}, {v2}): slack {}", triple(face), v.value),
        _ => format!("{kind}: {}", v.value),
    }
}

pub fn minimality(report: &MinimalityReport, json: bool) -> String {
    if json {
        return pretty(&serde_json::to_value(report).expect("report serializes"));
    }
    let mut out = format!("minimal: {}\n", report.is_minimal);
    for v in &report.violations {
        let _ = writeln!(out, "violation: {}", violation_line(v));
    }
    out
}

fn step_line(n: usize, step: &CoveringStep) -> String {
    let what = match &step.step {
        StepKind::Face { face } => format!("two-dimensional additive face {}", triple(face)),
        StepKind::Edge { face, relation } => {
            let mv = match relation.kind {
                MoveKind::Translation => format!("translation by {}", relation.amount),
                MoveKind::Reflection => format!("reflection x -> {} - x", relation.amount),
            };
            format!("additive edge {}, {mv} on {}", triple(face), interval(&relation.domain))
        }
        StepKind::DenseMerge { intervals } => {
            let list: Vec<String> = intervals.iter().map(interval).collect();
            format!("dense merge of {}", list.join(", "))
        }
    };
    format!("step {n}: {what}; covered components: {}", step.components_after)
}

fn covering_text(result: &CoveringResult) -> String {
    let mut out = String::new();
    for (n, step) in result.components.steps.iter().enumerate() {
        let _ = writeln!(out, "{}", step_line(n + 1, step));
    }
    let before = &result.before_merge;
    let _ = writeln!(
        out,
        "before merge: {} components, uncovered: {}",
        before.component_count(),
        list(&before.uncovered())
    );
    for ev in &result.evidence {
        let amounts: Vec<String> = ev.amounts.iter().map(QE::to_string).collect();
        let generators: Vec<String> = ev.generators.iter().map(QE::to_string).collect();
        let (a, b) = ev.certificate;
        let _ = writeln!(
            out,
            "dense merge: {} -> {}; a = [{}]; t = [{}]; t{} and t{} are linearly independent over Q",
            interval(&ev.source),
            interval(&ev.target),
            amounts.join(", "),
            generators.join(", "),
            a + 1,
            b + 1
        );
    }
    for (n, component) in result.components.components().iter().enumerate() {
        let _ = writeln!(out, "component {}: {}", n + 1, list(component));
    }
    let _ = writeln!(out, "uncovered: {}", list(&result.components.uncovered()));
    out
}

fn list(intervals: &[(QE, QE)]) -> String {
    if intervals.is_empty() {
        return "none".into();
    }
    intervals.iter().map(interval).collect::<Vec<_>>().join(" ")
}

fn covering_json(result: &CoveringResult) -> Value {
    let set = |cs: &igp_core::covering::ComponentSet| {
        json!({
            "components": cs.components(),
            "uncovered": cs.uncovered(),
        })
    };
    json!({
        "steps": result.components.steps,
        "before_merge": set(&result.before_merge),
        "final": set(&result.components),
        "dense_merges": result.evidence,
    })
}

pub fn covering(result: &CoveringResult, json: bool) -> String {
    if json {
        pretty(&covering_json(result))
    } else {
        covering_text(result)
    }
}

fn parameter_name(p: &Parameter) -> String {
    match p {
        Parameter::Slope { component } => format!("s{}", component + 1),
        Parameter::IntervalSlope { interval: iv } => format!("s{}", interval(iv)),
        Parameter::LeftJump { x } => format!("jl({x})"),
        Parameter::RightJump { x } => format!("jr({x})"),
    }
}

fn provenance(p: &Provenance) -> String {
    match p {
        Provenance::Additivity { face, vertex: (u, v) } => format!("additivity {} at ({u}, {v})", triple(face)),
        Provenance::Normalization => "normalization at f".into(),
        Provenance::Symmetry { x, side } => format!("symmetry at {x} ({side})"),
        Provenance::Periodicity => "periodicity".into(),
    }
}

fn equation(eq: &Equation, names: &[String]) -> String {
    let terms: Vec<String> = eq
        .coefficients
        .iter()
        .zip(names)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, name)| format!("({c})*{name}"))
        .collect();
    format!("{} = 0", terms.join(" + "))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Extreme => "extreme relative to piecewise continuous perturbations",
        Verdict::NotExtreme => "not extreme",
        Verdict::Inconclusive => "inconclusive: uncovered intervals remain",
    }
}

pub fn extremality(report: &ExtremalityReport, json: bool) -> String {
    let names: Vec<String> = report.system.perturbation.parameters.iter().map(parameter_name).collect();
    if json {
        let equations: Vec<Value> = report
            .independent_equations()
            .map(|e| json!({ "provenance": e.provenance, "equation": equation(e, &names) }))
            .collect();
        let perturbations: Vec<Value> = report
            .perturbations
            .iter()
            .map(|p| json!({ "function": p.function.to_document(), "epsilon": p.epsilon }))
            .collect();
        return pretty(&json!({
            "covering": covering_json(&report.covering),
            "parameters": names,
            "equations": equations,
            "rank": report.nullspace.rank,
            "dimension": report.dimension(),
            "verdict": report.verdict,
            "perturbations": perturbations,
        }));
    }
    let mut out = covering_text(&report.covering);
    let _ = writeln!(out, "parameters: {}", names.len());
    let _ = writeln!(out, "equations: {} generated, {} independent", report.system.equations.len(), report.nullspace.rank);
    for (n, e) in report.independent_equations().enumerate() {
        let _ = writeln!(out, "equation {}: {}  [{}]", n + 1, equation(e, &names), provenance(&e.provenance));
    }
    let _ = writeln!(out, "dimension: {}", report.dimension());
    for (n, p) in report.perturbations.iter().enumerate() {
        let _ = writeln!(out, "perturbation {}: epsilon {}", n + 1, p.epsilon);
        for b in p.function.breakpoints() {
            let _ = writeln!(out, "  x = {}: left {}, value {}, right {}", b.x, b.left_limit, b.value, b.right_limit);
        }
    }
    let _ = writeln!(out, "verdict: {}", verdict_name(report.verdict));
    out
}

pub fn verification(report: &EffectivenessReport, eps: Option<&EpsilonReport>, json: bool) -> String {
    if json {
        return pretty(&json!({ "effectiveness": report, "epsilon": eps }));
    }
    let mut out = format!("effective: {}\n", if report.effective { "yes" } else { "no" });
    if let Some(w) = &report.witness {
        let vertex = w.vertex.as_ref().map(|(u, v)| format!(" at ({u}, {v})")).unwrap_or_default();
        let _ = writeln!(out, "witness: {}{vertex}: {:?}", triple(&w.face), w.condition);
    }
    if let Some(e) = eps {
        match &e.min_slack {
            Some(m) => {
                let _ = writeln!(out, "m: {m}");
            }
            None => out.push_str("m: none (pi is additive everywhere)\n"),
        }
        let _ = writeln!(out, "M: {}", e.bound);
        match &e.epsilon {
            Epsilon::Finite(x) => {
                let _ = writeln!(out, "epsilon: {x}");
                let _ = writeln!(out, "epsilon (decimal): {}", x.to_decimal(DIGITS));
            }
            Epsilon::Unbounded => out.push_str("epsilon: unbounded\n"),
        }
    }
    out
}

/// The faces of the complex as JSON.
pub fn complex(c: &DeltaComplex) -> String {
    let faces: Vec<Value> = c
        .faces
        .iter()
        .map(|d| {
            let vertices: Vec<[String; 2]> = d.face.vertices().iter().map(|(u, v)| [u.to_string(), v.to_string()]).collect();
            json!({
                "i": d.face.i.to_string(),
                "j": d.face.j.to_string(),
                "k": d.face.k.to_string(),
                "dimension": d.dimension(),
                "vertices": vertices,
                "slacks": d.slacks,
                "additive": d.additive,
            })
        })
        .collect();
    let count = |dim: usize| c.faces.iter().filter(|d| d.dimension() == dim).count();
    pretty(&json!({
        "counts": { "vertices": count(0), "edges": count(1), "polygons": count(2) },
        "faces": faces,
    }))
}

/// Additive faces as polygons, vertices in counterclockwise order.
pub fn polygons_csv(c: &DeltaComplex) -> String {
    let mut out = String::from("# decimal renderings for plotting only; exact values come from show-complex\n");
    out.push_str("face,dimension,vertex,x,y\n");
    for (n, d) in c.faces.iter().enumerate().filter(|(_, d)| d.additive) {
        let mut verts: Vec<&(QE, QE)> = d.face.vertices().iter().collect();
        let (cx, cy) = verts.iter().fold((0.0, 0.0), |(a, b), (u, v)| (a + u.to_f64(), b + v.to_f64()));
        let len = verts.len() as f64;
        let angle = |(u, v): &(QE, QE)| (v.to_f64() - cy / len).atan2(u.to_f64() - cx / len);
        verts.sort_by(|p, q| angle(p).total_cmp(&angle(q)));
        for (k, (u, v)) in verts.iter().enumerate() {
            let _ = writeln!(out, "{n},{},{k},{},{}", d.dimension(), u.to_decimal(DIGITS), v.to_decimal(DIGITS));
        }
    }
    out
}

pub fn compendium_list(entries: &[CompendiumEntry], json: bool) -> String {
    if json {
        return pretty(&serde_json::to_value(entries).expect("entries serialize"));
    }
    let mut out = String::new();
    for e in entries {
        if e.kind == EntryKind::Perturbation {
            let _ = writeln!(out, "{} (perturbation; parameters: {})", e.name, e.parameters);
            continue;
        }
        let _ = writeln!(
            out,
            "{} (function; parameters: {}; minimal: {}; extreme relative to pwc: {}; has crazy perturbation: {})",
            e.name,
            e.parameters,
            e.minimal,
            e.extreme_relative_to_pwc,
            e.has_crazy_perturbation
        );
    }
    out
}

fn sample_rows(out: &mut String, label: &str, pi: &PiecewiseFunction, samples: u32) {
    let dec = |x: &QE| x.to_decimal(DIGITS);
    for (i, b) in pi.breakpoints().iter().enumerate() {
        let _ = writeln!(
            out,
            "{label}_breakpoint,{},{},{},{}",
            dec(&b.x),
            dec(&b.value),
            dec(&b.left_limit),
            dec(&b.right_limit)
        );
        let end = pi.interval_end(i);
        for s in 1..=samples {
            let t = QE::frac(s as i64, samples as i64 + 1);
            let x = &b.x + &(&t * &(&end - &b.x));
            let _ = writeln!(out, "{label}_sample,{},{},,", dec(&x), dec(&pi.limit(&x, Side::At)));
        }
    }
}

/// CSV samples of `π` and of the piecewise linear part of a perturbation.
/// Micro parts are described by their coset data, not sampled.
pub fn plot_data(pi: &PiecewiseFunction, pbar: Option<&CrazyPerturbation>, samples: u32) -> String {
    let mut out = String::from(
        "# decimal renderings with 30 digits, for plotting only; the input files hold the exact values\n",
    );
    if let Some(p) = pbar {
        let gens: Vec<String> = p.group().generators().iter().map(QE::to_string).collect();
        let _ = writeln!(out, "# micro part: T = <{}>", gens.join(", "));
        for piece in p.pieces() {
            for (b, c) in &piece.cosets {
                let _ = writeln!(out, "# on {}: value {c} on {b} + T", interval(&piece.interval));
            }
        }
    }
    out.push_str("kind,x,value,left,right\n");
    sample_rows(&mut out, "function", pi, samples);
    if let Some(p) = pbar {
        sample_rows(&mut out, "perturbation_pwl", p.pwl(), samples);
    }
    out
}
