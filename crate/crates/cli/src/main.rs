use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use flatblock::blocking::{
    polygon_blocking, surface_blocking, verify_blocking, verify_table_verdict, BlockingError, PolygonBlocking,
};
use flatblock::exactnum::{FieldError, PlanarVec, QuadElem};
use flatblock::golden::{
    decagon_membership, golden_points, m0_surface, periodic_point_candidates_m0, rel_flow, GoldenError,
};
use flatblock::polygon::{
    angle_lcm, parse_angles, realize, validate_polygon, AnglePi, PolygonError, PolygonSpec,
};
use flatblock::prototypes::{
    blocking_group_analysis, build_prototype_surface, enumerate_prototypes, PrototypeError, PrototypeTriple,
};
use flatblock::surface::{
    build_unfolding, cylinder_decomposition, render_svg, segments_between, MarkedPoint, Segment,
    SurfaceError, SurfacePoint, TranslationSurface,
};
use flatblock::unfolding::{
    classify_genus2, hyperelliptic_criterion, pillowcase_double, torus_cover_check, UnfoldingError,
};

const BOUNDED_NOTE: &str =
    "verification covers segments up to the length limit only; it is not a proof of blocking";

#[derive(Parser)]
#[command(
    name = "flatblock",
    version,
    about = "Exact translation surfaces, genus-two billiards and finite blocking"
)]
struct Cli {
    /// Emit JSON (the default and only text format).
    #[arg(long, global = true)]
    json: bool,
    /// Also write an SVG drawing of the surface involved.
    #[arg(long, global = true, value_name = "PATH")]
    svg: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Genus, hyperelliptic verdict and orbit closure of a rational table.
    Classify(TableArgs),
    /// Prototype triples of a discriminant with their Weierstrass twist permutations.
    Prototypes {
        #[arg(long)]
        disc: u64,
        #[arg(long)]
        spin: Option<u8>,
        /// Include the prototype surface of each row.
        #[arg(long)]
        surface: bool,
    },
    /// Build a surface and print it as JSON.
    Surface {
        #[command(subcommand)]
        kind: SurfaceKind,
    },
    /// Cylinder decomposition of a surface in a direction.
    Cylinders {
        #[arg(long)]
        surface: String,
        /// Direction `x,y`.
        #[arg(long, default_value = "1,0")]
        dir: String,
    },
    /// Segments between two points up to a length bound.
    Segments {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        max_len: String,
        /// Points whose crossings are reported, separated by `;`.
        #[arg(long)]
        probes: Option<String>,
    },
    /// Finite blocking verdicts for a table or a surface point.
    Block(BlockArgs),
    /// The golden tetromino under the rel flow.
    Relflow {
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Periodic point candidates on the staircase surface.
    M0 {
        /// `x1,x2,y1,y2`.
        #[arg(long)]
        lengths: String,
    },
    /// Draw a surface as SVG, optionally with the segments between two points.
    Render {
        #[arg(long)]
        surface: String,
        #[arg(long, requires_all = ["to", "max_len"])]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        #[arg(long)]
        max_len: Option<String>,
    },
}

#[derive(Subcommand)]
enum SurfaceKind {
    /// Unfolding of a rational table.
    Unfold(TableArgs),
    /// Golden tetromino at rel parameter `t`.
    Tetromino {
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        t: String,
    },
    /// Prototype surface of a triple.
    Prototype {
        #[arg(long)]
        disc: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        c: u64,
        #[arg(long, allow_negative_numbers = true)]
        e: i64,
    },
    /// Staircase surface with lengths `x1,x2,y1,y2`.
    M0 {
        #[arg(long)]
        lengths: String,
    },
}

#[derive(Args)]
struct TableArgs {
    /// Angles in units of pi, e.g. `1/8,3/8,1/2`.
    #[arg(long)]
    angles: String,
    /// Shape lengths of the table family, as exact numbers.
    #[arg(long)]
    lengths: Option<String>,
}

#[derive(Args)]
struct BlockArgs {
    #[arg(long, conflicts_with = "surface")]
    angles: Option<String>,
    #[arg(long, requires = "angles")]
    lengths: Option<String>,
    /// Check each table verdict on the unfolding up to this length.
    #[arg(long, requires = "angles")]
    verify: Option<String>,
    #[arg(long, requires = "from")]
    surface: Option<String>,
    #[arg(long)]
    from: Option<String>,
    #[arg(long, requires_all = ["set", "max_len"])]
    to: Option<String>,
    /// Blocking set, points separated by `;`.
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    max_len: Option<String>,
}

struct Failure {
    code: String,
    message: String,
    details: Value,
}

impl Failure {
    fn new(code: &str, message: impl Into<String>) -> Self {
        Failure {
            code: code.to_string(),
            message: message.into(),
            details: Value::Null,
        }
    }
}

macro_rules! coded {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::new(e.code(), e.to_string())
            }
        }
    )*};
}
coded!(
    FieldError,
    PolygonError,
    UnfoldingError,
    SurfaceError,
    BlockingError,
    GoldenError,
    PrototypeError
);

struct Outcome {
    payload: Value,
    warnings: Vec<String>,
    svg: Option<(TranslationSurface, Vec<Segment>)>,
}

impl Outcome {
    fn new(payload: Value) -> Self {
        Outcome {
            payload,
            warnings: Vec::new(),
            svg: None,
        }
    }

    fn drawing(mut self, s: &TranslationSurface, segs: Vec<Segment>) -> Self {
        self.svg = Some((s.clone(), segs));
        self
    }
}

type Res<T> = Result<T, Failure>;

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn quad(s: &str) -> Res<QuadElem> {
    Ok(s.trim().parse::<QuadElem>()?)
}

fn quad_list(s: &str) -> Res<Vec<QuadElem>> {
    s.split(',').map(quad).collect()
}

fn table(args: &TableArgs) -> Res<(PolygonSpec, Option<Vec<QuadElem>>)> {
    let angles = parse_angles(&args.angles)?;
    let lengths = args.lengths.as_deref().map(quad_list).transpose()?;
    let spec = validate_polygon(&PolygonSpec::from_angles(angles))?;
    Ok((spec, lengths))
}

fn realized(angles: &[AnglePi], lengths: Option<&[QuadElem]>) -> Res<PolygonSpec> {
    Ok(realize(angles, lengths)?)
}

fn read_surface(path: &str) -> Res<TranslationSurface> {
    let mut text = String::new();
    let io = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    io.map_err(|e| Failure::new("Io", format!("{path}: {e}")))?;
    let mut v: Value =
        serde_json::from_str(&text).map_err(|e| Failure::new("InvalidSurface", e.to_string()))?;
    if let Some(p) = v.get_mut("payload") {
        v = p.take();
    }
    if let Some(s) = v.get_mut("surface") {
        v = s.take();
    }
    serde_json::from_value(v).map_err(|e| Failure::new("InvalidSurface", e.to_string()))
}

/// A marked point label, or `polygon:x,y`.
fn point(s: &TranslationSurface, text: &str) -> Res<SurfacePoint> {
    let text = text.trim();
    if let Some(m) = s.marked_points.iter().find(|m| m.label == text) {
        return Ok(m.at.clone());
    }
    let bad = || {
        Failure::new(
            "InvalidPoint",
            format!("expected a label or `polygon:x,y`, got `{text}`"),
        )
    };
    let (p, xy) = text.split_once(':').ok_or_else(bad)?;
    let (x, y) = xy.split_once(',').ok_or_else(bad)?;
    let p: usize = p.trim().parse().map_err(|_| bad())?;
    let pt = SurfacePoint::new(p, PlanarVec::new(quad(x)?, quad(y)?));
    s.locate(&pt)?;
    Ok(pt)
}

fn points(s: &TranslationSurface, text: &str) -> Res<Vec<SurfacePoint>> {
    text.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| point(s, t))
        .collect()
}

fn surface_summary(s: &TranslationSurface) -> Value {
    let cones = s.cone_analysis();
    json!({
        "surface": to_json(s),
        "genus": cones.genus,
        "stratum": cones.stratum.to_string(),
        "area": s.area().to_string(),
    })
}

fn classify(args: &TableArgs) -> Res<Outcome> {
    let (spec, lengths) = table(args)?;
    let cone = pillowcase_double(&spec);
    let genus = cone.genus()?;
    let hyper = hyperelliptic_criterion(&cone)?;
    let mut payload = json!({
        "angles": to_json(&spec.angles),
        "d": angle_lcm(&spec.angles),
        "genus": genus,
        "pillowcase": to_json(&cone),
        "hyperelliptic": to_json(&hyper),
    });
    let class = match classify_genus2(&spec) {
        Ok(c) => c,
        Err(e) => {
            let mut f = Failure::from(e);
            f.details = payload;
            return Err(f);
        }
    };
    let mut warnings = Vec::new();
    let torus = if spec.k() == 3 {
        Some(torus_cover_check(&spec)?)
    } else {
        match realized(&spec.angles, lengths.as_deref()) {
            Ok(r) => {
                if lengths.is_none() {
                    warnings.push(
                        "torus_cover evaluated at the default lengths; pass --lengths to choose them".into(),
                    );
                }
                Some(torus_cover_check(&r)?)
            }
            Err(f) => {
                warnings.push(format!("torus_cover unavailable: {}", f.message));
                None
            }
        }
    };
    let family = match class.n {
        Some(n) => format!("{} (n={n})", class.orbit_closure),
        None => class.orbit_closure.clone(),
    };
    let m = payload.as_object_mut().expect("object");
    m.insert("genus2_family".into(), json!(family));
    m.insert("orbit_closure".into(), json!(class.orbit_closure));
    m.insert("pattern".into(), json!(class.family()));
    m.insert("stratum".into(), json!(class.stratum.to_string()));
    m.insert("torus_cover".into(), json!(torus));
    m.insert("torus_condition".into(), json!(class.torus_condition));
    Ok(Outcome {
        payload,
        warnings,
        svg: None,
    })
}

fn prototypes(disc: u64, spin: Option<u8>, with_surface: bool) -> Res<Outcome> {
    if let Some(s) = spin {
        if s > 1 {
            return Err(Failure::new("Usage", "--spin must be 0 or 1"));
        }
    }
    let mut rows = Vec::new();
    for t in enumerate_prototypes(disc, spin)? {
        let g = blocking_group_analysis(&t);
        let mut row = json!({
            "b": t.b,
            "c": t.c,
            "e": t.e,
            "lambda": t.lambda().to_string(),
            "spin": t.spin(),
            "h_perm": to_json(&g.h_perm),
            "v_perm": to_json(&g.v_perm),
            "orbits": g.orbits,
            "condition_met": g.condition_met,
            "conclusion": to_json(&g.conclusion),
        });
        if with_surface {
            let s = build_prototype_surface(&t)?;
            row["surface"] = to_json(&s);
        }
        rows.push(row);
    }
    Ok(Outcome::new(json!({ "disc": disc, "spin": spin, "rows": rows })))
}

fn surface(kind: &SurfaceKind) -> Res<Outcome> {
    let s = match kind {
        SurfaceKind::Unfold(args) => {
            let (spec, lengths) = table(args)?;
            build_unfolding(&realized(&spec.angles, lengths.as_deref())?)?
        }
        SurfaceKind::Tetromino { t } => rel_flow(&quad(t)?)?.surface,
        SurfaceKind::Prototype { disc, b, c, e } => {
            build_prototype_surface(&PrototypeTriple::new(*disc, *b, *c, *e)?)?
        }
        SurfaceKind::M0 { lengths } => {
            let [x1, x2, y1, y2] = four(lengths)?;
            m0_surface(&x1, &x2, &y1, &y2)?
        }
    };
    Ok(Outcome::new(surface_summary(&s)).drawing(&s, Vec::new()))
}

fn four(text: &str) -> Res<[QuadElem; 4]> {
    quad_list(text)?
        .try_into()
        .map_err(|_| Failure::new("Usage", "expected four lengths x1,x2,y1,y2"))
}

fn cylinders(path: &str, dir: &str) -> Res<Outcome> {
    let s = read_surface(path)?;
    let d = quad_list(dir)?;
    let [x, y]: [QuadElem; 2] = d
        .try_into()
        .map_err(|_| Failure::new("Usage", "direction must be `x,y`"))?;
    let dir = PlanarVec::new(x, y);
    let cyls = cylinder_decomposition(&s, &dir)?;
    Ok(
        Outcome::new(json!({ "direction": to_json(&dir), "cylinders": to_json(&cyls) }))
            .drawing(&s, Vec::new()),
    )
}

fn segments(path: &str, from: &str, to: &str, max_len: &str, probes: Option<&str>) -> Res<Outcome> {
    let s = read_surface(path)?;
    let p = point(&s, from)?;
    let q = point(&s, to)?;
    let probes: Vec<MarkedPoint> = match probes {
        Some(t) => points(&s, t)?
            .into_iter()
            .enumerate()
            .map(|(i, at)| MarkedPoint {
                label: format!("b{i}"),
                at,
            })
            .collect(),
        None => Vec::new(),
    };
    let lmax = quad(max_len)?;
    let segs = segments_between(&s, &p, &q, &lmax, &probes)?;
    let payload = json!({
        "from": to_json(&p),
        "to": to_json(&q),
        "max_len": lmax.to_string(),
        "count": segs.len(),
        "segments": to_json(&segs),
    });
    Ok(Outcome::new(payload).drawing(&s, segs))
}

fn block(a: &BlockArgs) -> Res<Outcome> {
    if let Some(angles) = &a.angles {
        return block_table(angles, a.lengths.as_deref(), a.verify.as_deref());
    }
    let (Some(path), Some(from)) = (&a.surface, &a.from) else {
        return Err(Failure::new(
            "Usage",
            "block needs --angles or --surface with --from",
        ));
    };
    let s = read_surface(path)?;
    let p = point(&s, from)?;
    if let (Some(to), Some(set), Some(max_len)) = (&a.to, &a.set, &a.max_len) {
        let q = point(&s, to)?;
        let set = points(&s, set)?;
        let check = verify_blocking(&s, &p, &q, &set, &quad(max_len)?)?;
        let segs = match &check {
            flatblock::blocking::BlockingCheck::Counterexample { segment } => vec![segment.clone()],
            _ => Vec::new(),
        };
        let mut out = Outcome::new(json!({
            "from": to_json(&p),
            "to": to_json(&q),
            "blocking_set": to_json(&set),
            "check": to_json(&check),
        }))
        .drawing(&s, segs);
        out.warnings.push(BOUNDED_NOTE.into());
        return Ok(out);
    }
    let verdicts = surface_blocking(&s, &p)?;
    Ok(Outcome::new(json!({ "point": to_json(&p), "verdicts": to_json(&verdicts) })).drawing(&s, Vec::new()))
}

fn block_table(angles: &str, lengths: Option<&str>, verify: Option<&str>) -> Res<Outcome> {
    let angles = parse_angles(angles)?;
    let lengths = lengths.map(quad_list).transpose()?;
    let spec = realized(&angles, lengths.as_deref())?;
    let result = polygon_blocking(&spec)?;
    let mut payload = json!({ "angles": to_json(&angles), "verdicts": to_json(&result) });
    let mut warnings = Vec::new();
    if let PolygonBlocking::Primitive {
        verdicts,
        warnings: w,
    } = &result
    {
        warnings.extend(w.iter().cloned());
        if let Some(l) = verify {
            let lmax = quad(l)?;
            let checks: Vec<Value> = verdicts
                .iter()
                .map(|v| match verify_table_verdict(&spec, v, &lmax) {
                    Ok(c) => to_json(&c),
                    Err(e) => json!({ "result": "skipped", "code": e.code(), "message": e.to_string() }),
                })
                .collect();
            payload["checks"] = Value::Array(checks);
            warnings.push(BOUNDED_NOTE.into());
        }
    }
    Ok(Outcome {
        payload,
        warnings,
        svg: None,
    })
}

fn relflow(t: &str) -> Res<Outcome> {
    let t = quad(t)?;
    let state = rel_flow(&t)?;
    let payload = json!({
        "t": t.to_string(),
        "heights": to_json(&state.heights()),
        "moduli": to_json(&state.moduli()),
        "decagon_member": decagon_membership(&t),
        "golden_points": to_json(&golden_points(&state)),
        "weierstrass_points": to_json(&state.weierstrass_points()),
        "surface": to_json(&state.surface),
    });
    Ok(Outcome::new(payload).drawing(&state.surface, Vec::new()))
}

fn m0(lengths: &str) -> Res<Outcome> {
    let [x1, x2, y1, y2] = four(lengths)?;
    let c = periodic_point_candidates_m0(&x1, &x2, &y1, &y2)?;
    let s = m0_surface(&x1, &x2, &y1, &y2)?;
    let payload = json!({
        "lengths": to_json(&[&x1, &x2, &y1, &y2]),
        "candidates": to_json(&c.candidates),
        "verdict": to_json(&c.verdict),
    });
    Ok(Outcome::new(payload).drawing(&s, Vec::new()))
}

fn render(path: &str, from: Option<&str>, to: Option<&str>, max_len: Option<&str>) -> Res<Outcome> {
    let s = read_surface(path)?;
    let segs = match (from, to, max_len) {
        (Some(f), Some(t), Some(l)) => segments_between(&s, &point(&s, f)?, &point(&s, t)?, &quad(l)?, &[])?,
        _ => Vec::new(),
    };
    let svg = render_svg(&s, &segs);
    Ok(Outcome::new(json!({ "segments": segs.len(), "svg": svg })).drawing(&s, segs))
}

fn run(cli: &Cli) -> Res<Outcome> {
    match &cli.command {
        Command::Classify(a) => classify(a),
        Command::Prototypes { disc, spin, surface } => prototypes(*disc, *spin, *surface),
        Command::Surface { kind } => surface(kind),
        Command::Cylinders { surface, dir } => cylinders(surface, dir),
        Command::Segments {
            surface,
            from,
            to,
            max_len,
            probes,
        } => segments(surface, from, to, max_len, probes.as_deref()),
        Command::Block(a) => block(a),
        Command::Relflow { t } => relflow(t),
        Command::M0 { lengths } => m0(lengths),
        Command::Render {
            surface,
            from,
            to,
            max_len,
        } => render(surface, from.as_deref(), to.as_deref(), max_len.as_deref()),
    }
}

fn emit(status: &str, command: &str, payload: Value, warnings: &[String]) {
    let out = json!({
        "status": status,
        "command": command,
        "payload": payload,
        "warnings": warnings,
    });
    let text = serde_json::to_string_pretty(&out).expect("json");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let command = argv.iter().skip(1).cloned().collect::<Vec<_>>().join(" ");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let payload = json!({ "code": "Usage", "message": e.render().to_string() });
            emit("error", &command, payload, &[]);
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if let (Some(path), Some((s, segs))) = (&cli.svg, &out.svg) {
                if let Err(e) = std::fs::write(path, render_svg(s, segs)) {
                    let payload = json!({ "code": "Io", "message": format!("{path}: {e}") });
                    emit("error", &command, payload, &out.warnings);
                    return ExitCode::from(1);
                }
            }
            emit("ok", &command, out.payload, &out.warnings);
            ExitCode::SUCCESS
        }
        Err(f) => {
            let usage = f.code == "Usage";
            let mut payload = json!({ "code": f.code, "message": f.message });
            if let Value::Object(m) = f.details {
                payload["details"] = Value::Object(m);
            }
            emit("error", &command, payload, &[]);
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
