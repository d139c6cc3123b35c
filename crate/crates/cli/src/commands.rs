use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use ndyn::analysis::{classify_operator, critical_points, fixed_points};
use ndyn::builder::{
    catalog, catalog_entries, check_infinity_simple, check_lambda_odd, instantiate, parse_scheme, MethodCatalogEntry,
    Scheme, SchemeContext,
};
use ndyn::conjugate::{
    check_iota_symmetry, conjugated_operator, extract_normal_form, instantiate_method, mobius_conjugate, standard_tau,
    ConjugateError, OperatorForm,
};
use ndyn::planes::{
    dynamical_plane, parameter_plane, sidecar_text, write_image, write_sidecar, CriticalSelector, KnownAttractor,
    PlaneError, PlaneImage, RenderConfig,
};
use ndyn::poly::{Complex, RationalMap};
use ndyn::stability::{
    linearize, m4_alpha_family, m4_beta_of_alpha, method_family, operator_family, stability_region_z1,
    stability_region_zm1, LinearCoeffs,
};
use ndyn::verify::run_all;
use serde_json::json;

use crate::args::{Cli, Command, DynplaneArgs, MethodArgs, ParamplaneArgs, RenderArgs, Source, StabilityArgs, VerifyArgs};
use crate::output::{emit, fmt_complex};
use crate::CliError;

const SYMMETRY_TRIALS: usize = 50;
const SHAPE_PROBES: [f64; 5] = [0.0, 1.0, 0.37, 1.29, -0.53];

pub(crate) fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Build(a) => build(a, out),
        Command::Analyze(a) => analyze(a, out),
        Command::Stability(a) => stability(a, out),
        Command::Dynplane(a) => dynplane(a, out),
        Command::Paramplane(a) => paramplane(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Catalog => list_catalog(out),
    }
}

enum Method {
    Catalog(&'static MethodCatalogEntry),
    File { label: String, scheme: Scheme },
}

impl Method {
    fn resolve(src: &Source) -> Result<Self, CliError> {
        if let Some(name) = &src.method {
            return catalog(name).map(Method::Catalog).map_err(|e| CliError::Usage(e.to_string()));
        }
        let path = src.scheme_file.as_ref().expect("clap requires a source");
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let scheme = parse_scheme(&text).map_err(|e| CliError::compute(format!("{}: {e}", path.display())))?;
        Ok(Method::File { label: path.display().to_string(), scheme })
    }

    fn label(&self) -> String {
        match self {
            Method::Catalog(e) => e.name.to_string(),
            Method::File { label, .. } => label.clone(),
        }
    }

    fn param_names(&self) -> Vec<String> {
        match self {
            Method::Catalog(e) => e.params.iter().map(|s| s.to_string()).collect(),
            Method::File { scheme, .. } => scheme.params(),
        }
    }

    fn one_parameter(&self) -> Result<String, CliError> {
        match &self.param_names()[..] {
            [p] => Ok(p.clone()),
            names => Err(CliError::Usage(format!(
                "{} has {} parameter(s); a one-parameter family is needed",
                self.label(),
                names.len()
            ))),
        }
    }
}

/// Parameter values in the method's order; every parameter must be bound exactly once.
fn bind(method: &Method, given: &[(String, Complex)]) -> Result<BTreeMap<String, Complex>, CliError> {
    let names = method.param_names();
    let mut out = BTreeMap::new();
    for (name, value) in given {
        if !names.contains(name) {
            return Err(CliError::Usage(format!("{} has no parameter `{name}`", method.label())));
        }
        if out.insert(name.clone(), *value).is_some() {
            return Err(CliError::Usage(format!("parameter `{name}` given twice")));
        }
    }
    if let Some(missing) = names.iter().find(|n| !out.contains_key(*n)) {
        return Err(CliError::Usage(format!("missing --param {missing}=VALUE")));
    }
    Ok(out)
}

fn ordered(method: &Method, values: &BTreeMap<String, Complex>) -> Vec<Complex> {
    method.param_names().iter().map(|n| values[n]).collect()
}

/// The method on `z^d - c` and, for `d = 2`, its conjugated operator.
struct Instance {
    raw: Option<RationalMap>,
    operator: Option<RationalMap>,
}

fn instance(method: &Method, values: &BTreeMap<String, Complex>, d: usize, c: Complex) -> Result<Instance, CliError> {
    let ctx = SchemeContext::new(d, c).map_err(|e| CliError::Usage(e.to_string()))?;
    let raw = match method {
        Method::Catalog(e) if e.is_post_conjugation() => {
            if d != 2 {
                return Err(CliError::Usage(format!("{} is only defined as an operator (d = 2)", e.name)));
            }
            let op = conjugated_operator(e, &ordered(method, values), c).map_err(CliError::compute)?;
            return Ok(Instance { raw: None, operator: Some(op) });
        }
        Method::Catalog(e) => instantiate_method(e, &ordered(method, values), d, c).map_err(CliError::compute)?,
        Method::File { scheme, .. } => {
            let ctx = values.iter().fold(ctx, |ctx, (n, v)| ctx.bind(n, *v));
            instantiate(scheme, &ctx).map_err(CliError::compute)?
        }
    };
    let operator = if d == 2 {
        let tau = standard_tau(c).map_err(CliError::compute)?;
        Some(mobius_conjugate(&raw, &tau).map_err(CliError::compute)?)
    } else {
        None
    };
    Ok(Instance { raw: Some(raw), operator })
}

fn map_json(r: &RationalMap) -> serde_json::Value {
    json!({ "degree": r.degree(), "num": r.num().coeffs(), "den": r.den().coeffs() })
}

fn build(a: &MethodArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let method = Method::resolve(&a.source)?;
    let values = bind(&method, &a.params)?;
    let inst = instance(&method, &values, a.d, a.c)?;
    let form = inst
        .operator
        .as_ref()
        .map(extract_normal_form)
        .transpose()
        .map_err(CliError::compute)?;
    emit(
        out,
        &json!({
            "method": method.label(),
            "d": a.d,
            "c": a.c,
            "params": values,
            "map": inst.raw.as_ref().map(map_json),
            "form": form,
        }),
    )
}

fn analyze(a: &MethodArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let method = Method::resolve(&a.source)?;
    let values = bind(&method, &a.params)?;
    let inst = instance(&method, &values, a.d, a.c)?;
    let target = inst.operator.as_ref().or(inst.raw.as_ref()).expect("one map is present");
    let (form, form_error) = match inst.operator.as_ref().map(extract_normal_form) {
        Some(Ok(f)) => (Some(f), None),
        Some(Err(e)) => (None, Some(e.to_string())),
        None => (None, None),
    };
    let report = form.as_ref().map(classify_operator).transpose().map_err(CliError::compute)?;
    emit(
        out,
        &json!({
            "method": method.label(),
            "d": a.d,
            "c": a.c,
            "params": values,
            "map_degree": inst.raw.as_ref().map(|r| r.degree()),
            "lambda_odd": inst.raw.as_ref().map(|r| check_lambda_odd(r, a.d, SYMMETRY_TRIALS)),
            "form": form,
            "form_error": form_error,
            "iota_symmetric": inst.operator.as_ref().map(|r| check_iota_symmetry(r, SYMMETRY_TRIALS)),
            "infinity": check_infinity_simple(target),
            "report": report,
            "fixed_points": fixed_points(target).map_err(CliError::compute)?,
            "critical_points": critical_points(target).map_err(CliError::compute)?,
        }),
    )
}

/// Find the family's `k` at the first probe where it is defined, then linearize.
fn linearize_any<F>(family: F) -> Result<LinearCoeffs, CliError>
where
    F: Fn(Complex) -> Result<OperatorForm, ConjugateError>,
{
    let shape = SHAPE_PROBES
        .iter()
        .find_map(|&t| family(Complex::new(t, 0.0)).ok())
        .ok_or_else(|| CliError::Computation("the family has no normal form at the probe parameters".into()))?;
    linearize(&family, shape.k).map_err(CliError::compute)
}

fn file_family(scheme: &Scheme, pname: &str, c: Complex) -> impl Fn(Complex) -> Result<OperatorForm, ConjugateError> {
    let scheme = scheme.clone();
    let pname = pname.to_string();
    move |alpha| {
        let ctx = SchemeContext::new(2, c)?.bind(&pname, alpha);
        let r = instantiate(&scheme, &ctx)?;
        extract_normal_form(&mobius_conjugate(&r, &standard_tau(c)?)?)
    }
}

fn stability(a: &StabilityArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let method = Method::resolve(&a.source)?;
    let pname = method.one_parameter()?;
    let m4 = matches!(&method, Method::Catalog(e) if e.name == "m4");
    let lc = match &method {
        _ if m4 => linearize_any(m4_alpha_family)?,
        Method::Catalog(e) => linearize_any(method_family(e.name, a.c).map_err(CliError::compute)?)?,
        Method::File { scheme, .. } => linearize_any(file_family(scheme, &pname, a.c))?,
    };
    let z1 = stability_region_z1(&lc).map_err(CliError::compute)?;
    let zm1 = stability_region_zm1(&lc).map_err(CliError::compute)?;
    let mapped = m4.then(|| {
        let m = m4_beta_of_alpha();
        json!({ "z=1": z1.circle_image(&m), "z=-1": zm1.circle_image(&m) })
    });
    emit(
        out,
        &json!({
            "family": method.label(),
            "parameter": if m4 { "alpha".to_string() } else { pname.clone() },
            "coordinate": m4.then_some("alpha = (5 beta - 1)/beta"),
            "c": a.c,
            "linear": lc,
            "z=1": z1,
            "z=-1": zm1,
            "boundaries_in_beta": mapped,
        }),
    )
}

fn threads(r: &RenderArgs) -> Result<Option<usize>, CliError> {
    if r.threads.is_some() {
        return Ok(r.threads);
    }
    match std::env::var("NDYN_THREADS") {
        Ok(s) if !s.trim().is_empty() => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("NDYN_THREADS must be a positive integer, got `{s}`"))),
        _ => Ok(None),
    }
}

fn render_config(r: &RenderArgs) -> Result<RenderConfig, CliError> {
    let cfg = RenderConfig {
        window: r.window,
        width: r.res.0,
        height: r.res.1,
        max_iter: r.max_iter,
        conv_radius: r.conv_radius,
        infinity_radius: r.infinity_radius,
        mode: r.mode.into(),
        threads: threads(r)?,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn known_attractors(r: &RenderArgs) -> Vec<KnownAttractor> {
    r.attractor
        .iter()
        .map(|&p| KnownAttractor::Point(p))
        .chain(r.cycle.iter().map(|c| KnownAttractor::Cycle(c.clone())))
        .collect()
}

fn sidecar_path(r: &RenderArgs) -> PathBuf {
    r.sidecar.clone().unwrap_or_else(|| r.out.with_extension("txt"))
}

fn finish(img: &PlaneImage, r: &RenderArgs, extra: Vec<(String, String)>, out: &mut dyn Write) -> Result<(), CliError> {
    let mut extra = extra;
    for a in &r.attractor {
        extra.push(("attractor".into(), fmt_complex(*a)));
    }
    for c in &r.cycle {
        extra.push(("cycle".into(), c.iter().map(|z| fmt_complex(*z)).collect::<Vec<_>>().join(",")));
    }
    write_image(img, &r.out).map_err(CliError::compute)?;
    write_sidecar(img, &sidecar_path(r), &extra).map_err(CliError::compute)?;
    write!(out, "{}", sidecar_text(img, &extra)).map_err(CliError::compute)
}

fn plane_error(e: PlaneError) -> CliError {
    match e {
        PlaneError::InvalidConfig(_) => CliError::Usage(e.to_string()),
        _ => CliError::compute(e),
    }
}

fn dynplane(a: &DynplaneArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let m = &a.method;
    let method = Method::resolve(&m.source)?;
    let values = bind(&method, &m.params)?;
    let cfg = render_config(&a.render)?;
    let inst = instance(&method, &values, m.d, m.c)?;
    let (map, which) = match (&inst.raw, &inst.operator) {
        (Some(r), _) if a.raw => (r, "raw"),
        (None, _) if a.raw => return Err(CliError::Usage(format!("{} has no raw scheme", method.label()))),
        (_, Some(o)) => (o, "operator"),
        (Some(r), None) => (r, "raw"),
        (None, None) => unreachable!("instance always yields a map"),
    };
    let img = dynamical_plane(map, &cfg, &known_attractors(&a.render)).map_err(plane_error)?;
    let mut extra = vec![
        ("method".to_string(), method.label()),
        ("d".to_string(), m.d.to_string()),
        ("c".to_string(), fmt_complex(m.c)),
    ];
    extra.extend(values.iter().map(|(k, v)| (format!("param.{k}"), fmt_complex(*v))));
    extra.push(("map".into(), which.into()));
    if which == "operator" {
        if let Ok(f) = extract_normal_form(map) {
            extra.push(("form.n".into(), f.n.to_string()));
            extra.push(("form.k".into(), f.k.to_string()));
            let a: Vec<String> = f.a.iter().map(|z| fmt_complex(*z)).collect();
            extra.push(("form.a".into(), a.join(",")));
            extra.push(("form.sign".into(), f.sign.to_string()));
        }
    }
    finish(&img, &a.render, extra, out)
}

fn paramplane(a: &ParamplaneArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let method = Method::resolve(&a.source)?;
    let pname = method.one_parameter()?;
    let cfg = render_config(&a.render)?;
    let family: Box<dyn Fn(Complex) -> Option<RationalMap> + Send + Sync> = match &method {
        Method::Catalog(e) => operator_family(e.name, a.c).map_err(CliError::compute)?,
        Method::File { scheme, .. } => {
            let scheme = scheme.clone();
            let (pname, c) = (pname.clone(), a.c);
            Box::new(move |alpha| {
                let ctx = SchemeContext::new(2, c).ok()?.bind(&pname, alpha);
                let r = instantiate(&scheme, &ctx).ok()?;
                mobius_conjugate(&r, &standard_tau(c).ok()?).ok()
            })
        }
    };
    let selector = a.critical_index.map_or(CriticalSelector::Default, CriticalSelector::Index);
    let img = parameter_plane(family, selector, &cfg, &known_attractors(&a.render)).map_err(plane_error)?;
    let extra = vec![
        ("method".to_string(), method.label()),
        ("parameter".to_string(), pname),
        ("c".to_string(), fmt_complex(a.c)),
        (
            "critical".to_string(),
            a.critical_index.map_or_else(|| "default".to_string(), |i| i.to_string()),
        ),
    ];
    finish(&img, &a.render, extra, out)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let report = run_all(a.seed, a.trials);
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(CliError::compute);
    w(out, format!("seed {} trials {}", a.seed, a.trials))?;
    for s in &report.suites {
        let status = if s.failed == 0 { "ok" } else { "FAIL" };
        w(out, format!("{:<20} {:>5} passed {:>5} failed  {status}", s.name, s.passed, s.failed))?;
        for f in &s.failures {
            w(out, format!("    {f}"))?;
        }
    }
    w(out, format!("total {} passed {} failed", report.passed(), report.failed()))?;
    if report.ok() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{} check(s) failed", report.failed())))
    }
}

fn list_catalog(out: &mut dyn Write) -> Result<(), CliError> {
    for e in catalog_entries() {
        let params = if e.params.is_empty() { "-".to_string() } else { e.params.join(",") };
        let nk = e.expected_nk.map_or_else(|| "-".to_string(), |(n, k)| format!("({n},{k})"));
        let kind = if e.is_post_conjugation() { "operator" } else { "scheme" };
        writeln!(out, "{:<18} {:<7} {:<6} {:<9} {}", e.name, params, nk, kind, e.doc).map_err(CliError::compute)?;
    }
    Ok(())
}
