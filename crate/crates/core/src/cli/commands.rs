use serde::Serialize;
use serde_json::{json, Map, Value};

use super::canonical::{num, rows, to_canonical_string};
use super::document::{at, CliError, SystemDocument};
use super::{Command, Outcome, EXIT_NEGATIVE, EXIT_OK};
use crate::duality::{adjoint_banach_pair, adjoint_pair, dual_synthesis, transform_banach_pair, transform_pair};
use crate::hilbert::frame_bounds;
use crate::linops::{is_invertible, Invertibility, OperatorNormEstimate, Side};
use crate::pairframes::{
    banach_frame_check, classify_banach_pair, classify_pair, ell_bessel_bound, ell_frame_bounds, pair_frame_operator,
    pairable_check, BanachVerdict, PairVerdict, PairableConfig,
};
use crate::spaces::{canonical_vector, Exponent};
use crate::unconditional::{test_unconditional, unconditional_bessel_norm_check, UnconditionalConfig, Verdict};
use crate::Error;

fn to_json<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialise")
}

fn estimate(e: &OperatorNormEstimate) -> Value {
    json!({
        "lower": num(e.lower),
        "upper": num(e.upper),
        "method": e.method.tag(),
        "seed": e.seed,
    })
}

fn invertibility(inv: &Invertibility) -> Value {
    json!({
        "invertible": inv.invertible,
        "condition": num(inv.condition),
        "sigma_min": num(inv.smallest_singular_value),
        "sigma_max": num(inv.largest_singular_value),
        "method": "exact-svd",
        "tol": num(inv.tol),
    })
}

fn exponent(p: Exponent) -> Value {
    if p.is_infinite() {
        json!("inf")
    } else {
        num(p.value())
    }
}

fn header(cmd: &Command) -> Map<String, Value> {
    let c = cmd.common();
    let mut m = Map::new();
    m.insert("command".into(), json!(cmd.name()));
    m.insert("input".into(), json!(c.input.display().to_string()));
    m.insert("seed".into(), json!(c.seed));
    m.insert("tol".into(), num(c.tol));
    m.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
    m
}

fn finish(report: Map<String, Value>, negative: bool) -> Outcome {
    Outcome {
        report: Value::Object(report),
        exit_code: if negative { EXIT_NEGATIVE } else { EXIT_OK },
    }
}

fn write_document(path: &std::path::Path, doc: &SystemDocument) -> Result<(), CliError> {
    std::fs::write(path, to_canonical_string(&doc.to_value()))
        .map_err(|e| CliError::Validation(format!("--output: cannot write {}: {e}", path.display())))
}

pub(super) fn run(cmd: &Command, doc: &SystemDocument) -> Result<Outcome, CliError> {
    match cmd {
        Command::Classify { .. } => classify(cmd, doc),
        Command::Bounds { p, .. } => bounds(cmd, doc, p.as_deref()),
        Command::Adjoint { output, .. } => adjoint(cmd, doc, output.as_deref()),
        Command::Transform { output, .. } => transform(cmd, doc, output.as_deref()),
        Command::Unconditional {
            truncation,
            perms,
            subseries,
            ..
        } => unconditional(cmd, doc, *truncation, *perms, *subseries),
    }
}

fn classify(cmd: &Command, doc: &SystemDocument) -> Result<Outcome, CliError> {
    let tol = cmd.common().tol;
    let mut r = header(cmd);
    let mut negative = false;
    let mut verdict = None;
    if doc.family_f.is_some() && doc.family_g.is_some() {
        let sys = doc.pair_system()?;
        let c = classify_pair(&sys, tol).map_err(at("family_G"))?;
        let inv = is_invertible(&c.operator, tol).map_err(at("family_G"))?;
        r.insert(
            "pair".into(),
            json!({
                "verdict": c.verdict.name(),
                "operator": rows(&c.operator.rows()),
                "invertibility": invertibility(&inv),
                "residual": {"value": num(c.residual), "norm": "||S - I||_2", "method": "exact-svd", "tol": num(tol)},
                "notes": c.notes,
            }),
        );
        negative |= c.verdict < PairVerdict::PairFrame;
        verdict = Some(c.verdict.name());
    }
    if let Some(t) = doc.operator_t()? {
        let g = doc.family_g()?;
        let b = classify_banach_pair(&g, &t, tol).map_err(at("operator_T"))?;
        let inv = is_invertible(&b.operator, tol).map_err(at("operator_T"))?;
        r.insert(
            "banach_pair".into(),
            json!({
                "verdict": b.verdict.name(),
                "operator": rows(&b.operator.rows()),
                "invertibility": invertibility(&inv),
            }),
        );
        negative |= b.verdict != BanachVerdict::BanachPairFrame;
        verdict.get_or_insert(b.verdict.name());
    }
    let verdict = verdict.ok_or_else(|| {
        CliError::Validation("family_F: classify needs family_F and family_G, or family_G and operator_T".into())
    })?;
    r.insert("verdict".into(), json!(verdict));
    Ok(finish(r, negative))
}

fn parse_p(flag: &str) -> Result<Exponent, CliError> {
    let p = if flag == "inf" {
        f64::INFINITY
    } else {
        flag.parse::<f64>()
            .map_err(|_| CliError::Parse(format!("--p: expected a number or \"inf\", got {flag:?}")))?
    };
    Exponent::new(p).map_err(|e| CliError::Validation(format!("--p: {e}")))
}

fn bounds(cmd: &Command, doc: &SystemDocument, p_flag: Option<&str>) -> Result<Outcome, CliError> {
    let c = cmd.common();
    let tol = c.tol;
    let p = match p_flag {
        Some(s) => parse_p(s)?,
        None => doc.sequence_p,
    };
    let mut r = header(cmd);
    r.insert("p".into(), exponent(p));
    r.insert("q".into(), exponent(p.conjugate()));

    let g = doc.family_g()?;
    let cert = ell_frame_bounds(&g, p).map_err(at("family_G"))?;
    let is_frame = cert.is_ell_frame(tol);
    let mut g_report = json!({
        "upper": estimate(&cert.upper),
        "lower": estimate(&cert.lower.expect("frame bounds carry a lower estimate")),
        "is_ell_frame": is_frame,
        "tol": num(tol),
    });
    if doc.p.is_two() && p.is_two() {
        let fb = frame_bounds(&g.with_side(Side::Primal)).map_err(at("family_G"))?;
        g_report["hilbert_frame_bounds"] = json!({"lower": num(fb.lower), "upper": num(fb.upper), "method": "exact-eig"});
    }
    r.insert("G".into(), g_report);
    let mut negative = !is_frame;

    if doc.family_f.is_some() {
        let f = doc.family_f()?;
        let fb = ell_bessel_bound(&f.with_side(Side::Dual), p.conjugate()).map_err(at("family_F"))?;
        r.insert("F".into(), json!({"upper": estimate(&fb.upper), "space": "dual", "exponent": exponent(p.conjugate())}));
        let pc = pairable_check(&g, &f, p, &PairableConfig { samples: 1000, seed: c.seed }).map_err(at("family_F"))?;
        r.insert(
            "pairable".into(),
            json!({
                "samples": pc.samples,
                "max_ratio": num(pc.max_ratio),
                "violations": pc.violations,
                "certified": pc.certified,
                "seed": pc.seed,
                "slack": num(1e-9),
                "notes": pc.notes,
            }),
        );
    }
    if let Some(t) = doc.operator_t()? {
        let b = banach_frame_check(&g, &t, p, tol).map_err(at("operator_T"))?;
        r.insert(
            "banach_frame".into(),
            json!({
                "is_ell_frame": b.is_ell_frame,
                "residual": {"value": num(b.residual), "norm": "||T U_G - I||_2", "method": "exact-svd"},
                "reconstructs": b.reconstructs,
                "is_banach_frame": b.is_banach_frame,
                "tol": num(tol),
            }),
        );
        negative |= !b.is_banach_frame;
    }
    r.insert("verdict".into(), json!(if is_frame { "EllFrame" } else { "EllBessel" }));
    Ok(finish(r, negative))
}

fn adjoint(cmd: &Command, doc: &SystemDocument, output: Option<&std::path::Path>) -> Result<Outcome, CliError> {
    let tol = cmd.common().tol;
    let mut r = header(cmd);
    let mut dual = SystemDocument {
        dim: doc.dim,
        p: doc.p.conjugate(),
        sequence_p: doc.sequence_p.conjugate(),
        family_f: None,
        family_g: None,
        operator_t: None,
        transforms: None,
        lazy: None,
    };
    let mut holds = true;
    let mut any = false;
    if doc.family_f.is_some() && doc.family_g.is_some() {
        let sys = doc.pair_system()?;
        let (d, cert) = adjoint_pair(&sys, tol).map_err(at("family_G"))?;
        dual.family_g = Some(d.g().rows());
        dual.family_f = Some(d.f().rows());
        holds &= cert.holds();
        r.insert("certificate".into(), to_json(&cert));
        any = true;
    }
    if let Some(t) = doc.operator_t()? {
        let g = doc.family_g()?;
        let (h, cert) = adjoint_banach_pair(&g, &t, tol).map_err(at("operator_T"))?;
        dual.family_g = Some(h.rows());
        dual.family_f = Some(g.rows());
        dual.operator_t = Some(dual_synthesis(&g, &t).map_err(at("operator_T"))?.rows());
        holds &= cert.holds();
        r.insert("banach_certificate".into(), to_json(&cert));
        any = true;
    }
    if !any {
        return Err(CliError::Validation(
            "family_F: adjoint needs family_F and family_G, or family_G and operator_T".into(),
        ));
    }
    r.insert("dual_document".into(), dual.to_value());
    if let Some(path) = output {
        write_document(path, &dual)?;
        r.insert("output".into(), json!(path.display().to_string()));
    }
    r.insert("verdict".into(), json!(if holds { "AdjointCertified" } else { "AdjointMismatch" }));
    Ok(finish(r, !holds))
}

fn transform(cmd: &Command, doc: &SystemDocument, output: Option<&std::path::Path>) -> Result<Outcome, CliError> {
    let tol = cmd.common().tol;
    let mut r = header(cmd);
    let (v, w) = doc.transforms()?;
    let mut out = doc.clone();
    out.transforms = None;
    let mut negative = false;
    let mut any = false;
    if doc.family_f.is_some() && doc.family_g.is_some() {
        let sys = doc.pair_system()?;
        let (t_sys, cert) = transform_pair(&sys, &v, &w, tol).map_err(at("transforms"))?;
        let s = pair_frame_operator(&t_sys).map_err(at("transforms"))?;
        out.family_g = Some(t_sys.g().rows());
        out.family_f = Some(t_sys.f().rows());
        negative |= !cert.operator_identity || cert.transformed_verdict < PairVerdict::PairFrame;
        r.insert("certificate".into(), to_json(&cert));
        r.insert("transformed_operator".into(), rows(&s.rows()));
        r.insert("verdict".into(), json!(cert.transformed_verdict.name()));
        any = true;
    }
    if let Some(t) = doc.operator_t()? {
        let g = doc.family_g()?;
        let (new_g, new_t, diff) = transform_banach_pair(&g, &t, &v, &w).map_err(at("transforms"))?;
        let identity = diff <= crate::duality::IDENTITY_TOL * (1.0 + t.matrix().amax());
        out.family_g = Some(new_g.rows());
        out.operator_t = Some(new_t.rows());
        negative |= !identity;
        r.insert("banach".into(), json!({"max_abs_diff": num(diff), "operator_identity": identity}));
        any = true;
    }
    if !any {
        return Err(CliError::Validation(
            "family_F: transform needs family_F and family_G, or family_G and operator_T".into(),
        ));
    }
    r.insert("transformed_document".into(), out.to_value());
    if let Some(path) = output {
        write_document(path, &out)?;
        r.insert("output".into(), json!(path.display().to_string()));
    }
    Ok(finish(r, negative))
}

fn unconditional(
    cmd: &Command,
    doc: &SystemDocument,
    truncation: usize,
    perms: usize,
    subseries: usize,
) -> Result<Outcome, CliError> {
    let c = cmd.common();
    let mut r = header(cmd);
    let fam = doc.lazy_family()?;
    let cfg = UnconditionalConfig {
        truncation,
        num_perms: perms,
        num_subseries: subseries,
        tol: c.tol,
        seed: c.seed,
    };
    let source = if doc.lazy.is_some() { "lazy.envelope" } else { "family_F" };
    let x = doc.space();
    let mut results = Vec::with_capacity(x.dim());
    let mut verdicts = Vec::with_capacity(x.dim());
    for k in 0..x.dim() {
        let f = canonical_vector(k, &x).expect("index below dimension");
        let v = test_unconditional(&fam, &f, &cfg).map_err(|e| match e {
            Error::EnvelopeViolation { .. } => CliError::Validation(format!("{source}: {e}")),
            other => CliError::Validation(format!("lazy: {other}")),
        })?;
        verdicts.push(v.verdict);
        let mut entry = to_json(&v);
        entry["f"] = json!(format!("e_{k}"));
        results.push(entry);
    }
    let overall = if verdicts.contains(&Verdict::ConditionalDetected) {
        Verdict::ConditionalDetected
    } else if verdicts.iter().all(|&v| v == Verdict::UnconditionalCertified) {
        Verdict::UnconditionalCertified
    } else {
        Verdict::Inconclusive
    };
    r.insert("family".into(), json!({"name": fam.name(), "summable_envelope": fam.is_summable()}));
    r.insert(
        "config".into(),
        json!({"truncation": truncation, "num_perms": perms, "num_subseries": subseries, "tol": num(c.tol), "seed": c.seed}),
    );
    r.insert("results".into(), Value::Array(results));
    if doc.lazy.is_none() {
        let g = doc.family_g()?;
        let check = unconditional_bessel_norm_check(&g, doc.sequence_p, 20, c.seed).map_err(at("family_G"))?;
        r.insert(
            "bessel_norm_check".into(),
            json!({
                "p": exponent(check.p),
                "base": estimate(&check.base),
                "permutations": check.permuted.len(),
                "max_deviation": num(check.max_deviation),
                "all_agree": check.all_agree,
                "unconditional_space": check.unconditional_space,
            }),
        );
    }
    r.insert("verdict".into(), json!(overall.name()));
    Ok(finish(r, overall != Verdict::UnconditionalCertified))
}
