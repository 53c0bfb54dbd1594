//! One function per subcommand.

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use jsr_core::bounds::{bracket_with, BracketOptions, EllipsoidNorm, OperatorNormBound};
use jsr_core::certify::{
    auto_bracket_depth, build_certificate_with, dim2_growth_check_with, verify_certificate_with, HolderCertificate,
    LambdaInput,
};
use jsr_core::ct::{lift_continuous_with, max_lyapunov_estimate_with};
use jsr_core::inflation::{
    fit_holder_at_zero, fit_holder_points, inflation_curve_with, parse_grid, HolderFit, InflationOptions,
};
use jsr_core::io::{matrix_set_to_json, matrix_to_rows};
use jsr_core::norms::extremal_norm_approx_with;
use jsr_core::perturbation::{check_resolvent_cert, elsner_gap, resolvent_cert, resolvent_cert_default};
use jsr_core::reducibility::maximal_flag;
use jsr_core::{random, Ball, JsrError, NormKind};

use crate::output::{budget, emit_csv, emit_json, load_set, read_text, split_preamble, write_file, Meta};
use crate::{
    BallNorm, BoundsArgs, CertArgs, CliError, Dim2Args, ElsnerArgs, FitArgs, FlagArgs, Format, InflateArgs, LiftArgs,
    ResolventArgs, VerifyArgs,
};

type Outcome = Result<(), CliError>;

pub fn bounds(a: &BoundsArgs) -> Outcome {
    let set = load_set(&a.input)?;
    let budget = budget()?;
    let opts = BracketOptions {
        budget,
        ..Default::default()
    };
    let mut br = bracket_with(&set, a.n, &opts)?;
    if a.extremal.is_some() || a.ellipsoid.is_some() {
        if !(br.lower > 0.0) {
            return Err(JsrError::Precondition("extra norms need a positive lower bound".into()).into());
        }
        let extremal = a
            .extremal
            .map(|k| extremal_norm_approx_with(&set, br.lower, k, budget))
            .transpose()?;
        // scale just above the lower bound so the Gram series stays finite
        let ellipsoid = a
            .ellipsoid
            .map(|k| EllipsoidNorm::fit(&set, br.lower * 1.01, k, budget))
            .transpose()?;
        let mut extras: Vec<&dyn OperatorNormBound> = Vec::new();
        if let Some(e) = &extremal {
            extras.push(e);
        }
        if let Some(e) = &ellipsoid {
            extras.push(e);
        }
        br = bracket_with(
            &set,
            a.n,
            &BracketOptions {
                budget,
                extra_norms: extras,
                ..Default::default()
            },
        )?;
    }
    let meta = Meta::new("bounds", a, None, budget).provenance(json!({
        "lower": "certified",
        "upper": "certified",
    }));
    let summary = format!("lower = {}, upper = {}", br.lower, br.upper);
    match a.format {
        Format::Json => emit_json(&a.out, &meta, &br, &summary),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["lower", "upper", "depth_n", "witness", "norm_tag"])
                .and_then(|_| {
                    w.write_record([
                        br.lower.to_string(),
                        br.upper.to_string(),
                        br.depth_n.to_string(),
                        br.witness.to_string(),
                        br.norm_tag.clone(),
                    ])
                })
                .map_err(|e| CliError::Input(e.to_string()))?;
            emit_csv(&a.out, &meta, &[], &csv_string(w)?, &summary)
        }
    }
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Serialize)]
struct CurvePoint {
    epsilon: f64,
    lower: f64,
    upper: f64,
    depth_n: usize,
}

fn fit_summary(fit: &Result<HolderFit, JsrError>) -> String {
    match fit {
        Ok(f) => format!(
            "alpha_hat = {:.4} on [{:e}, {:e}] ({} points)",
            f.alpha_hat, f.fit_window.0, f.fit_window.1, f.points
        ),
        Err(e) => format!("fit: {e}"),
    }
}

fn fit_value(fit: &Result<HolderFit, JsrError>) -> Value {
    match fit {
        Ok(f) => serde_json::to_value(f).expect("fit serializes"),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn inflate(a: &InflateArgs) -> Outcome {
    let set = load_set(&a.input)?;
    let budget = budget()?;
    let grid = parse_grid(&a.grid)?;
    let norm = match a.ball {
        BallNorm::Spectral => NormKind::Spectral,
        BallNorm::Frobenius => NormKind::Frobenius,
    };
    let ball = Ball::full(set.dim(), norm);
    let opts = InflationOptions {
        budget,
        seed: a.seed,
        ..Default::default()
    };
    let curve = inflation_curve_with(&set, &ball, &grid, a.n, &opts)?;
    let fit = a.fit.then(|| fit_holder_at_zero(&curve));

    if let Some(path) = &a.plot {
        write_file(path, &crate::svg::inflation_plot(&curve, fit.as_ref().and_then(|f| f.as_ref().ok())))?;
    }
    let meta = Meta::new("inflate", a, Some(a.seed), budget).provenance(json!({
        "lower": format!("inner approximation, enumeration budget {} per point", opts.lower_budget.0),
        "upper": "certified",
        "fit": "least squares on resolvable points; empirical",
    }));
    let mut summary = format!("{} grid points, r(0) in [{}, {}]", grid.len(), curve.base_bracket.lower, curve.base_bracket.upper);
    if let Some(f) = &fit {
        summary = format!("{summary}\n{}", fit_summary(f));
    }
    let base = serde_json::to_value(&curve.base_bracket).expect("bracket serializes");
    match a.format {
        Format::Csv => {
            let mut extra = vec![("base_bracket", base)];
            if let Some(f) = &fit {
                extra.push(("fit", fit_value(f)));
            }
            emit_csv(&a.out, &meta, &extra, &curve.to_csv()?, &summary)?;
        }
        Format::Json => {
            let points: Vec<CurvePoint> = curve
                .grid
                .iter()
                .zip(&curve.values)
                .map(|(&e, b)| CurvePoint {
                    epsilon: e,
                    lower: b.lower,
                    upper: b.upper,
                    depth_n: b.depth_n,
                })
                .collect();
            let result = json!({
                "base_bracket": base,
                "depth_n": curve.depth_n,
                "points": points,
                "fit": fit.as_ref().map(fit_value),
            });
            emit_json(&a.out, &meta, result, &summary)?;
        }
    }
    if a.out.out.is_none() {
        if let Some(f) = &fit {
            eprintln!("{}", fit_summary(f));
        }
    }
    match fit {
        Some(Err(e)) => Err(e.into()),
        _ => Ok(()),
    }
}

/// Reads (ε, lower, upper) rows and r(0) from an `inflate` output file.
fn read_curve(text: &str) -> Result<(Vec<(f64, f64, f64)>, f64), CliError> {
    let bad = |m: &str| CliError::Input(format!("curve file: {m}"));
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
        let res = &v["result"];
        let base = &res["base_bracket"];
        let r0 = 0.5 * (base["lower"].as_f64().ok_or_else(|| bad("missing base_bracket"))?
            + base["upper"].as_f64().ok_or_else(|| bad("missing base_bracket"))?);
        let pts = res["points"].as_array().ok_or_else(|| bad("missing points"))?;
        let rows = pts
            .iter()
            .map(|p| {
                Some((p["epsilon"].as_f64()?, p["lower"].as_f64()?, p["upper"].as_f64()?))
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("malformed point"))?;
        return Ok((rows, r0));
    }
    let (meta, body) = split_preamble(text);
    let mut r0 = meta
        .iter()
        .find(|(k, _)| k == "base_bracket")
        .and_then(|(_, v)| serde_json::from_str::<Value>(v).ok())
        .and_then(|b| Some(0.5 * (b["lower"].as_f64()? + b["upper"].as_f64()?)));
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<(f64, f64, f64, usize)>() {
        let (e, lo, hi, _) = rec.map_err(|e| bad(&e.to_string()))?;
        if e == 0.0 && r0.is_none() {
            r0 = Some(0.5 * (lo + hi));
        }
        rows.push((e, lo, hi));
    }
    let r0 = r0.ok_or_else(|| bad("no base_bracket line and no ε = 0 row"))?;
    Ok((rows, r0))
}

pub fn fit(a: &FitArgs) -> Outcome {
    let (rows, r0) = read_curve(&read_text(&a.curve)?)?;
    let fit = fit_holder_points(&rows, r0)?;
    let meta = Meta::new("fit", a, None, budget()?).provenance(json!({
        "fit": "least squares on resolvable points; empirical",
    }));
    emit_json(&a.out, &meta, &fit, &fit_summary(&Ok(fit.clone())))
}

pub fn flag(a: &FlagArgs) -> Outcome {
    let set = load_set(&a.input)?;
    let flag = maximal_flag(&set, a.tol)?;
    let residual = flag.residual(&set)?;
    let result = json!({
        "m": flag.index_m(),
        "dims": flag.dims(),
        "block_sizes": flag.block_sizes(),
        "residual": residual,
        "tol": flag.tol(),
        "w": matrix_to_rows(flag.w()),
    });
    let meta = Meta::new("flag", a, None, budget()?).provenance(json!({
        "flag": "numerical, certified by the residual against tol",
    }));
    emit_json(&a.out, &meta, result, &format!("m = {}, dims = {:?}", flag.index_m(), flag.dims()))
}

pub fn cert(a: &CertArgs) -> Outcome {
    let set = load_set(&a.input)?;
    let budget = budget()?;
    let lambda = if a.lambda.eq_ignore_ascii_case("empirical") {
        LambdaInput::Empirical { depth: a.lambda_depth }
    } else {
        let v: f64 = a
            .lambda
            .parse()
            .map_err(|_| CliError::Input(format!("--lambda must be a number or `empirical`, got {:?}", a.lambda)))?;
        LambdaInput::Supplied(v)
    };
    let cert = build_certificate_with(&set, lambda, a.r, a.kmax, a.horizon, budget)?;
    let meta = Meta::new("cert", a, None, budget).provenance(json!({
        "theta": cert.theta_provenance,
        "lambda": cert.lambda_provenance,
    }));
    let summary = format!("tau = {:e}, omega = {}, n0 = {}", cert.tau, cert.omega, cert.n0);
    emit_json(&a.out, &meta, &cert, &summary)
}

fn load_certificate(path: &std::path::Path) -> Result<HolderCertificate, CliError> {
    let text = read_text(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    // accept either the bare certificate or the `jsr cert` envelope
    let body = if v.get("result").is_some() { v["result"].clone() } else { v };
    serde_json::from_value(body).map_err(|e| CliError::Input(format!("{}: not a certificate: {e}", path.display())))
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    let set = load_set(&a.input)?;
    let budget = budget()?;
    let cert = load_certificate(&a.cert)?;
    let n_probe = a.n_probe.unwrap_or(cert.n0);
    let rep = verify_certificate_with(&set, &cert, a.trials, n_probe, a.depth, a.seed, budget)?;
    let meta = Meta::new("verify", a, Some(a.seed), budget).provenance(json!({
        "theta": cert.theta_provenance,
        "lambda": cert.lambda_provenance,
        "radius": "uses the lower end of the certificate's rho bracket",
    }));
    let summary = format!("PASS {} INCONCLUSIVE {} FAIL {}", rep.pass, rep.inconclusive, rep.fail);
    match a.format {
        Format::Json => emit_json(&a.out, &meta, &rep, &summary)?,
        Format::Csv => {
            let extra = [(
                "summary",
                json!({"n_probe": rep.n_probe, "eps_n": rep.eps_n, "guarantee": rep.guarantee,
                       "pass": rep.pass, "inconclusive": rep.inconclusive, "fail": rep.fail}),
            )];
            emit_csv(&a.out, &meta, &extra, &rep.to_csv()?, &summary)?;
        }
    }
    if rep.fail > 0 {
        return Err(CliError::CheckFailed(format!("{} of {} trials failed", rep.fail, a.trials)));
    }
    Ok(())
}

pub fn elsner(a: &ElsnerArgs) -> Outcome {
    let budget = budget()?;
    let (result, violations, summary) = if let Some(path) = &a.input {
        let set = load_set(path)?;
        if set.len() < 2 {
            return Err(CliError::Input("elsner needs a set with at least two members".into()));
        }
        let g = elsner_gap(&set.members()[0], &set.members()[1])?;
        let summary = format!("|ρ(A) − ρ(B)| = {:e} ≤ {:e}: {}", g.lhs, g.rhs, !g.violated);
        (serde_json::to_value(g).expect("serializes"), usize::from(g.violated), summary)
    } else {
        if a.dims.is_empty() || a.dims.contains(&0) {
            return Err(CliError::Input("--dims must list positive dimensions".into()));
        }
        let mut rng = random::seeded(a.seed);
        let mut violations = 0;
        let mut worst = 0.0f64;
        for t in 0..a.trials {
            let d = a.dims[t % a.dims.len()];
            let m = random::complex_gaussian(&mut rng, d);
            let s = 10f64.powf(-6.0 * rng.random::<f64>());
            let b = m.add_scaled(s, &random::complex_gaussian(&mut rng, d));
            let g = elsner_gap(&m, &b)?;
            if g.rhs > 0.0 {
                worst = worst.max(g.lhs / g.rhs);
            }
            violations += usize::from(g.violated);
        }
        let summary = format!("{} pairs, {} violations, max ratio {:.4}", a.trials, violations, worst);
        (
            json!({"trials": a.trials, "violations": violations, "max_ratio": worst}),
            violations,
            summary,
        )
    };
    let meta = Meta::new("elsner", a, Some(a.seed), budget);
    emit_json(&a.out, &meta, result, &summary)?;
    if violations > 0 {
        return Err(CliError::CheckFailed(format!("{violations} violations of the Elsner bound")));
    }
    Ok(())
}

pub fn resolvent(a: &ResolventArgs) -> Outcome {
    let set = load_set(&a.input)?;
    let m = set
        .members()
        .get(a.member)
        .ok_or_else(|| CliError::Input(format!("member {} out of range ({} members)", a.member, set.len())))?;
    let cert = match a.delta {
        Some(d) => resolvent_cert(m, d, a.samples)?,
        None => resolvent_cert_default(m, a.samples)?,
    };
    let trials = check_resolvent_cert(m, &cert, a.trials, a.seed);
    let meta = Meta::new("resolvent", a, Some(a.seed), budget()?).provenance(json!({
        "delta": cert.delta_source,
        "r0": "sampled minimum minus the Lipschitz sampling margin",
    }));
    let summary = format!(
        "r0 = {:e}, gamma = {:e}, eps0 = {:e}, {} of {} trials violated",
        cert.r0, cert.gamma, cert.eps0, trials.violations, trials.trials
    );
    emit_json(&a.out, &meta, json!({"certificate": cert, "trials": trials}), &summary)?;
    if cert.low_confidence {
        eprintln!("jsr: warning: r0 moved by 1% or more when doubling the circle samples");
    }
    if trials.violations > 0 {
        return Err(CliError::CheckFailed(format!("{} trials violated the certificate", trials.violations)));
    }
    Ok(())
}

pub fn dim2(a: &Dim2Args) -> Outcome {
    let set = load_set(&a.input)?;
    let budget = budget()?;
    let rep = dim2_growth_check_with(&set, a.kmax, auto_bracket_depth(&set), budget)?;
    let verdict = if rep.passed() { "PASS" } else { "FAIL" };
    let meta = Meta::new("dim2", a, None, budget).provenance(json!({
        "normalizer": "upper end of the rho bracket",
    }));
    let summary = format!("{verdict}: {} violations up to k = {}", rep.violations.len(), a.kmax);
    match a.format {
        Format::Json => emit_json(&a.out, &meta, json!({"verdict": verdict, "report": rep}), &summary)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Input(e.to_string());
            w.write_record(["k", "max_norm", "bound"]).map_err(io)?;
            for (i, v) in rep.max_norms.iter().enumerate() {
                let k = i + 1;
                w.write_record([k.to_string(), v.to_string(), (6.0 * rep.l * k as f64).to_string()])
                    .map_err(io)?;
            }
            let extra = [("verdict", json!(verdict)), ("bracket", serde_json::to_value(&rep.bracket).expect("serializes"))];
            emit_csv(&a.out, &meta, &extra, &csv_string(w)?, &summary)?;
        }
    }
    if !rep.passed() {
        return Err(CliError::CheckFailed(format!("growth bound violated at k = {:?}", rep.violations)));
    }
    Ok(())
}

pub fn lift(a: &LiftArgs) -> Outcome {
    let set = load_set(&a.input)?;
    let budget = budget()?;
    let lift = lift_continuous_with(&set, a.steps, a.samples, a.seed, budget)?;
    let est = max_lyapunov_estimate_with(&lift, a.depth, budget)?;
    if let Some(path) = &a.export {
        write_file(path, &(matrix_set_to_json(&lift.lifted) + "\n"))?;
    }
    let meta = Meta::new("lift", a, Some(a.seed), budget).provenance(json!({
        "lower": "certified for the sampled lift",
        "upper_heuristic": "not a bound",
    }));
    let result = json!({
        "steps": lift.steps,
        "words": lift.words.len(),
        "lifted_members": lift.lifted.len(),
        "estimate": est,
    });
    emit_json(&a.out, &meta, result, &format!("lambda lower = {}", est.lower))
}
