use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use pleat::algebra::{GroupElement, GroupKind, IndexTables, PairIndex, TripleIndex};
use pleat::cocyclic::{CocyclicCoords, Space};
use pleat::flags::{double_ratio, log_invariant, triple_ratio, Flag};
use pleat::obstruction::{clock_shift_rep, fuchsian_rep, ob, torus_rep, LiftedRep, ObError};
use pleat::slither::{closed_form_rhs, mid_index, ob_from_product, slither_ledger, PlaqueRoots};
use pleat::traintrack::{
    boundary_walk, generate_fixture, maximal_tree, Frame, Step, Track, TrackFileError, TreeChoice,
};

#[derive(Parser)]
#[command(name = "pleat", version, about = "Train tracks, cocyclic coordinates, flag invariants and the obstruction class")]
struct Cli {
    /// Seed for the single random generator used by the command.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Coefficient group: real, circle, cylinder or zd:<n>.
    #[arg(long, global = true, default_value = "cylinder")]
    group: String,
    #[arg(long, global = true, default_value_t = 3)]
    d: usize,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Add wall time to the report (makes it non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a train-track file.
    Validate { track: PathBuf },
    /// Generate a fixture track of the given genus.
    GenFixture {
        #[arg(long, default_value_t = 2)]
        genus: usize,
        /// Embed a seeded maximal tree.
        #[arg(long)]
        with_tree: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Choose a maximal tree and write the track with the tree embedded.
    Tree {
        track: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Left/right classification of rectangles, switches and exits.
    Classify { track: PathBuf },
    /// Sample points of Y through the inverse of I₂ (JSON lines).
    SampleY {
        track: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Torsion residue k: the points get tor′ = 2πik/d.
        #[arg(long, default_value_t = 0)]
        k: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// tor′ and its residue for every point in a coordinate file.
    Torsion { track: PathBuf, coords: PathBuf },
    /// Both sides of the slithering product identity and −total vs tor′.
    Corfinal { track: PathBuf, coords: PathBuf },
    /// Obstruction class of a lifted representation.
    Ob {
        rep: Option<PathBuf>,
        #[arg(long, value_enum)]
        builder: Option<Builder>,
        #[arg(long, default_value_t = 2)]
        genus: usize,
    },
    /// Triple or double ratio of flags given as column-major matrices.
    Flags {
        file: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        /// "j1,j2,j3" for triple, "i1,i2" for double.
        #[arg(long)]
        index: String,
    },
    /// Quick end-to-end checks on small inputs.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builder {
    ClockShift,
    Identity,
    Torus,
    Fuchsian,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Triple,
    Double,
}

/// Input error: exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Res<T> = Result<T, InputError>;

#[derive(Serialize)]
struct Check {
    name: String,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    detail: String,
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    seed: u64,
    inputs_digest: String,
    checks: Vec<Check>,
    data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

struct Ctx {
    seed: u64,
    d: usize,
    kind: GroupKind,
    tol: f64,
    rng: ChaCha8Rng,
    hasher: Sha256,
    checks: Vec<Check>,
    /// Document to print instead of the report when no output file is given.
    stdout_doc: Option<String>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Res<String> {
        let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, residual: Option<f64>, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, residual, detail: detail.into() });
    }

    fn track(&mut self, path: &Path) -> Res<Track> {
        let text = self.read(path)?;
        Track::from_json(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }

    fn space(&mut self, path: &Path) -> Res<Space> {
        let track = self.track(path)?;
        let frame = Frame::from_track(track, self.seed)?;
        Ok(Space::new(frame, self.d, self.kind)?)
    }

    /// One or more whitespace-separated JSON documents.
    fn points(&mut self, space: &Space, path: &Path) -> Res<Vec<CocyclicCoords>> {
        let text = self.read(path)?;
        let mut out = Vec::new();
        for v in serde_json::Deserializer::from_str(&text).into_iter::<Value>() {
            let v = v.map_err(|e| InputError(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))?;
            out.push(space.from_json(&v)?);
        }
        Ok(out)
    }

    fn emit(&mut self, doc: String, out: &Option<PathBuf>) -> Res<Value> {
        match out {
            Some(p) => {
                fs::write(p, &doc).map_err(|e| InputError(format!("{}: {e}", p.display())))?;
                Ok(json!(p.display().to_string()))
            }
            None => {
                self.stdout_doc = Some(doc);
                Ok(Value::Null)
            }
        }
    }
}

fn cyl_pair(x: &GroupElement) -> Value {
    match x.to_cylinder() {
        GroupElement::Cylinder(re, ang) => json!([re + 0.0, ang]),
        _ => unreachable!(),
    }
}

fn ids(track: &Track, rects: &[usize]) -> Vec<u32> {
    rects.iter().map(|&r| track.rect_ids[r]).collect()
}

fn sw_ids(track: &Track, sws: &[usize]) -> Vec<u32> {
    sws.iter().map(|&s| track.switch_ids[s]).collect()
}

fn cmd_validate(cx: &mut Ctx, path: &Path) -> Res<Value> {
    let text = cx.read(path)?;
    match Track::from_json(&text) {
        Ok(t) => {
            let r = t.report();
            cx.check("valid", true, None, "");
            Ok(serde_json::to_value(r)?)
        }
        Err(TrackFileError::Invalid(e)) => {
            cx.check("valid", false, None, format!("{}: {e}", e.code()));
            Ok(json!({"error": e.code()}))
        }
        Err(e) => Err(InputError(format!("{}: {e}", path.display()))),
    }
}

fn cmd_gen_fixture(cx: &mut Ctx, genus: usize, with_tree: bool, out: &Option<PathBuf>) -> Res<Value> {
    let mut raw = generate_fixture(genus, cx.seed)?;
    let track = Track::new(raw.clone())?;
    if with_tree {
        let tree = maximal_tree(&track, &TreeChoice::Seeded(cx.seed))?;
        raw.tree = Some(tree.to_spec(&track));
    }
    let r = track.report();
    cx.check("switches = 12g-12", r.switches == 12 * genus - 12, None, "");
    cx.check("rectangles = 18g-18", r.rectangles == 18 * genus - 18, None, "");
    cx.check("plaques = 4g-4", r.plaques == 4 * genus - 4, None, "");
    let doc = serde_json::to_string_pretty(&raw)? + "\n";
    let file = cx.emit(doc, out)?;
    Ok(json!({"genus": genus, "report": r, "file": file}))
}

fn cmd_tree(cx: &mut Ctx, path: &Path, out: &Option<PathBuf>) -> Res<Value> {
    let track = cx.track(path)?;
    let tree = maximal_tree(&track, &TreeChoice::Seeded(cx.seed))?;
    let spec = tree.to_spec(&track);
    let want = 12 * track.genus - 13;
    cx.check("edges = 12g-13", spec.edges.len() == want, None, format!("{} edges", spec.edges.len()));
    let mut raw = track.raw.clone();
    raw.tree = Some(spec.clone());
    let doc = serde_json::to_string_pretty(&raw)? + "\n";
    let file = cx.emit(doc, out)?;
    Ok(json!({"tree": spec, "file": file}))
}

fn cmd_classify(cx: &mut Ctx, path: &Path) -> Res<Value> {
    let track = cx.track(path)?;
    let frame = Frame::from_track(track, cx.seed)?;
    let (tr, cl) = (&frame.track, &frame.class);
    let nu = cl.u_left.len() + cl.u_right.len();
    cx.check("|O|+|U| = 6g-5", cl.orientable.len() + nu == 6 * tr.genus - 5, None, "");
    cx.check("U nonempty", nu > 0, None, "");
    cx.check("|E^r| = 1+|S^r|", cl.e_right.len() == 1 + cl.s_right.len(), None, "");
    cx.check("|U|+|S^r| even", (nu + cl.s_right.len()) % 2 == 0, None, "");
    let switch_steps = boundary_walk(tr, &frame.tree).iter().filter(|s| matches!(s, Step::Switch { .. })).count();
    cx.check("walk has one switch step per switch", switch_steps == tr.nsw(), None, "");
    Ok(json!({
        "orientable": ids(tr, &cl.orientable),
        "u_left": ids(tr, &cl.u_left),
        "u_right": ids(tr, &cl.u_right),
        "s_left": sw_ids(tr, &cl.s_left),
        "s_right": sw_ids(tr, &cl.s_right),
        "e_left": cl.e_left.len(),
        "e_right": cl.e_right.len(),
    }))
}

fn cmd_sample_y(cx: &mut Ctx, path: &Path, count: usize, k: i64, out: &Option<PathBuf>) -> Res<Value> {
    let space = cx.space(path)?;
    let d = space.d();
    let eps = cx
        .kind
        .torsion(d, k)
        .ok_or_else(|| InputError(format!("{} has no torsion element of residue {k} mod {d}", cx.kind)))?;
    let anchors = space.default_anchors()?;
    let mut doc = String::new();
    let (mut members, mut worst) = (0, 0.0f64);
    for _ in 0..count {
        let free = space.random_free(&mut cx.rng, &anchors);
        let c = space.i2_inverse(&free, &eps, &anchors)?;
        if space.in_y(&c) {
            members += 1;
        }
        worst = worst.max(space.tor_prime(&c).map(|t| t.distance(&eps)).unwrap_or(f64::INFINITY));
        doc.push_str(&serde_json::to_string(&space.to_json(&c))?);
        doc.push('\n');
    }
    cx.check("membership", members == count, None, format!("{members}/{count}"));
    cx.check("tor' = eps", worst <= cx.tol, (count > 0).then_some(worst), "");
    let file = cx.emit(doc, out)?;
    Ok(json!({"count": count, "eps": eps.to_json(), "residue": eps.torsion_residue(d), "file": file}))
}

fn cmd_torsion(cx: &mut Ctx, track: &Path, coords: &Path) -> Res<Value> {
    let space = cx.space(track)?;
    let pts = cx.points(&space, coords)?;
    let mut rows = Vec::new();
    for (n, c) in pts.iter().enumerate() {
        match space.tor_prime(c) {
            Ok(t) => {
                cx.check(format!("point {n} in Y"), true, None, "");
                rows.push(json!({"tor": t.to_json(), "log": cyl_pair(&t), "residue": t.torsion_residue(space.d())}));
            }
            Err(e) => {
                cx.check(format!("point {n} in Y"), false, None, e.to_string());
                rows.push(Value::Null);
            }
        }
    }
    Ok(json!({"points": rows}))
}

fn cmd_corfinal(cx: &mut Ctx, track: &Path, coords: &Path) -> Res<Value> {
    let space = cx.space(track)?;
    let pts = cx.points(&space, coords)?;
    let d = space.d();
    let nplaques = space.frame.track.plaques.len();
    let mut rows = Vec::new();
    for (n, c) in pts.iter().enumerate() {
        let why = space.membership_failure(c);
        cx.check(format!("point {n} in Y"), why.is_none(), None, why.unwrap_or_default());
        let branches: Vec<i64> = (0..nplaques).map(|_| cx.rng.gen_range(0..3)).collect();
        let roots = PlaqueRoots::new(&space, c, &branches);
        let total = slither_ledger(&space, c, &roots, mid_index(d)).map_err(|e| InputError(e.to_string()))?.total;
        let rhs = closed_form_rhs(&space, c);
        let r1 = total.distance(&rhs);
        cx.check(format!("point {n} total = closed form"), r1 <= cx.tol, Some(r1), "");
        let tor = space.tor_prime_with(c, &space.default_reps()).ok().map(|t| t.to_cylinder());
        let obv = ob_from_product(&total, d).ok();
        let r2 = match (&obv, &tor) {
            (Some(a), Some(b)) => a.distance(b),
            _ => f64::INFINITY,
        };
        cx.check(format!("point {n} -total = tor'"), r2 <= cx.tol, r2.is_finite().then_some(r2), "");
        rows.push(json!({
            "branches": branches,
            "total": cyl_pair(&total),
            "rhs": cyl_pair(&rhs),
            "ob": obv.map(|x| cyl_pair(&x)),
            "tor": tor.map(|x| cyl_pair(&x)),
        }));
    }
    Ok(json!({"m": mid_index(d), "points": rows}))
}

fn cmd_ob(cx: &mut Ctx, rep: &Option<PathBuf>, builder: Option<Builder>, genus: usize) -> Res<Value> {
    let rep = match (rep, builder) {
        (Some(p), None) => {
            let text = cx.read(p)?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| InputError(format!("{}: line {}, column {}: {e}", p.display(), e.line(), e.column())))?;
            LiftedRep::from_json(&v)?
        }
        (None, Some(b)) => {
            if genus < 1 {
                return Err(InputError("genus must be at least 1".into()));
            }
            match b {
                Builder::ClockShift => clock_shift_rep(cx.d, genus),
                Builder::Identity => LiftedRep::identity(cx.d, genus),
                Builder::Torus => torus_rep(&mut cx.rng, cx.d, genus),
                Builder::Fuchsian => fuchsian_rep(cx.d)?,
            }
        }
        _ => return Err(InputError("give either a representation file or --builder".into())),
    };
    match ob(&rep) {
        Ok(o) => {
            cx.check("relator product is scalar", true, Some(o.residual), "");
            Ok(json!({"d": rep.d, "genus": rep.genus, "ob": cyl_pair(&o.value), "residue": o.residue}))
        }
        Err(ObError::NotScalar(r)) => {
            cx.check("relator product is scalar", false, Some(r), "");
            Ok(json!({"d": rep.d, "genus": rep.genus}))
        }
        Err(e) => Err(e.into()),
    }
}

fn parse_index(s: &str, n: usize) -> Res<Vec<usize>> {
    let p: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| InputError(format!("bad index {s:?}")))?;
    if p.len() != n {
        return Err(InputError(format!("index {s:?} needs {n} parts")));
    }
    Ok(p)
}

fn cmd_flags(cx: &mut Ctx, path: &Path, which: Which, index: &str) -> Res<Value> {
    let text = cx.read(path)?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| InputError(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))?;
    let list = v.get("flags").and_then(Value::as_array).ok_or_else(|| InputError("missing \"flags\" array".into()))?;
    let flags: Vec<Flag> = list.iter().map(Flag::from_json).collect::<Result<_, _>>()?;
    let need = match which {
        Which::Triple => 3,
        Which::Double => 4,
    };
    if flags.len() != need || flags.iter().any(|f| f.d() != flags[0].d()) {
        return Err(InputError(format!("need {need} flags of one dimension")));
    }
    let value = match which {
        Which::Triple => {
            let p = parse_index(index, 3)?;
            triple_ratio(&[flags[0].clone(), flags[1].clone(), flags[2].clone()], TripleIndex::new(p[0], p[1], p[2]))
        }
        Which::Double => {
            let p = parse_index(index, 2)?;
            double_ratio(&flags[0], &flags[1], &flags[2], &flags[3], PairIndex::new(p[0], p[1]))
        }
    };
    match value {
        Ok(x) => {
            cx.check("general position", true, None, "");
            let log = log_invariant(x)?;
            Ok(json!({"value": [x.re, x.im], "log": cyl_pair(&log)}))
        }
        Err(e @ pleat::flags::FlagError::Shape(_)) => Err(e.into()),
        Err(e) => {
            cx.check("general position", false, None, e.to_string());
            Ok(Value::Null)
        }
    }
}

fn cmd_selftest(cx: &mut Ctx) -> Res<Value> {
    let mut ok = true;
    for d in 2..=8 {
        let tb = IndexTables::new(d)?;
        for g in 2..=4usize {
            let lhs = tb.na() * (6 * g - 5) + tb.nb() * (4 * g - 4) - tb.a_prime.len() - tb.b_dprime.len() - 1;
            ok &= lhs == (d * d - 1) * (2 * g - 2);
        }
    }
    cx.check("dimension identity", ok, None, "d 2..8, g 2..4");

    let track = Track::new(generate_fixture(2, cx.seed)?)?;
    let r = track.report();
    cx.check("genus 2 census", (r.switches, r.rectangles, r.plaques) == (12, 18, 4), None, "");

    let mut ok = true;
    for s in 0..5 {
        let f = Frame::seeded(track.clone(), cx.seed.wrapping_add(s))?;
        let c = &f.class;
        ok &= c.e_right.len() == 1 + c.s_right.len() && (c.u_left.len() + c.u_right.len() + c.s_right.len()) % 2 == 0;
    }
    cx.check("count and parity", ok, None, "5 trees");

    let frame = Frame::seeded(track.clone(), cx.seed)?;
    let space = Space::new(frame.clone(), 4, GroupKind::Cyclic(12))?;
    let a = space.default_anchors()?;
    let mut ok = true;
    for k in 0..4 {
        let free = space.random_free(&mut cx.rng, &a);
        let eps = GroupKind::Cyclic(12).torsion(4, k).unwrap();
        let c = space.i2_inverse(&free, &eps, &a)?;
        let (back, e) = space.i2_forward(&c, &a)?;
        ok &= space.in_y(&c) && back.distance(&free) == 0.0 && e == eps;
    }
    cx.check("I2 roundtrip over zd:12", ok, None, "d = 4");

    let space = Space::new(frame, 3, GroupKind::Cylinder)?;
    let a = space.default_anchors()?;
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let free = space.random_free(&mut cx.rng, &a);
        let c = space.i2_inverse(&free, &GroupKind::Cylinder.torsion(3, 1).unwrap(), &a)?;
        let roots = PlaqueRoots::principal(&space, &c);
        let total = slither_ledger(&space, &c, &roots, mid_index(3)).map_err(|e| InputError(e.to_string()))?.total;
        worst = worst.max(total.distance(&closed_form_rhs(&space, &c)));
        let tor = space.tor_prime(&c)?.to_cylinder();
        worst = worst.max(ob_from_product(&total, 3).map(|x| x.distance(&tor)).unwrap_or(f64::INFINITY));
    }
    cx.check("slithering total", worst <= 1e-9, Some(worst), "d = 3");

    let o = ob(&clock_shift_rep(3, 2))?;
    let want = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let err = (o.scalar - want).norm().min((o.scalar - want.conj()).norm());
    cx.check("clock and shift", err <= 1e-9, Some(err), "d = 3");
    let o = ob(&fuchsian_rep(3)?)?;
    cx.check("Fuchsian octagon lifts", o.value.is_zero(1e-6), Some(o.residual), "d = 3");
    Ok(Value::Null)
}

fn render_text(r: &RunReport) -> String {
    let mut out = vec![format!("command {}", r.command), format!("seed {}", r.seed), format!("inputs {}", r.inputs_digest)];
    for c in &r.checks {
        let mut line = format!("{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
        if let Some(x) = c.residual {
            line.push_str(&format!(" residual={x:.3e}"));
        }
        if !c.detail.is_empty() {
            line.push_str(&format!(" ({})", c.detail));
        }
        out.push(line);
    }
    if let Value::Object(m) = &r.data {
        for (k, v) in m {
            out.push(format!("{k} {v}"));
        }
    }
    if let Some(t) = r.wall_time_ms {
        out.push(format!("wall_time_ms {t:.1}"));
    }
    out.join("\n") + "\n"
}

/// Ignores write errors such as a closed pipe.
fn write_stdout(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let kind = match GroupKind::parse(&cli.group) {
        Ok(k) => k,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut hasher = Sha256::new();
    hasher.update(format!("d={} group={} tol={}\n", cli.d, kind.tag(), cli.tolerance));
    let mut cx = Ctx {
        seed: cli.seed,
        d: cli.d,
        kind,
        tol: cli.tolerance,
        rng: ChaCha8Rng::seed_from_u64(cli.seed),
        hasher,
        checks: Vec::new(),
        stdout_doc: None,
    };
    let (name, result) = match &cli.cmd {
        Cmd::Validate { track } => ("validate", cmd_validate(&mut cx, track)),
        Cmd::GenFixture { genus, with_tree, out } => ("gen-fixture", cmd_gen_fixture(&mut cx, *genus, *with_tree, out)),
        Cmd::Tree { track, out } => ("tree", cmd_tree(&mut cx, track, out)),
        Cmd::Classify { track } => ("classify", cmd_classify(&mut cx, track)),
        Cmd::SampleY { track, count, k, out } => ("sample-y", cmd_sample_y(&mut cx, track, *count, *k, out)),
        Cmd::Torsion { track, coords } => ("torsion", cmd_torsion(&mut cx, track, coords)),
        Cmd::Corfinal { track, coords } => ("corfinal", cmd_corfinal(&mut cx, track, coords)),
        Cmd::Ob { rep, builder, genus } => ("ob", cmd_ob(&mut cx, rep, *builder, *genus)),
        Cmd::Flags { file, which, index } => ("flags", cmd_flags(&mut cx, file, *which, index)),
        Cmd::Selftest => ("selftest", cmd_selftest(&mut cx)),
    };
    let data = match result {
        Ok(v) => v,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let failed = cx.checks.iter().any(|c| !c.pass);
    if let Some(doc) = cx.stdout_doc.take() {
        write_stdout(&doc);
        for c in cx.checks.iter().filter(|c| !c.pass) {
            eprintln!("FAIL {} {}", c.name, c.detail);
        }
    } else {
        let digest: String = cx.hasher.clone().finalize().iter().map(|b| format!("{b:02x}")).collect();
        let report = RunReport {
            command: name.to_string(),
            seed: cli.seed,
            inputs_digest: digest,
            checks: std::mem::take(&mut cx.checks),
            data,
            wall_time_ms: cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
        };
        if cli.json {
            write_stdout(&(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"));
        } else {
            write_stdout(&render_text(&report));
        }
    }
    ExitCode::from(if failed { 1 } else { 0 })
}
