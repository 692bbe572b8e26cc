//! Script interpreter: executes statements in order, maps `check` suites to
//! the library check operations, and produces a deterministic report.

use crate::script::{Expr, Located, Statement, ValueSort};
use dbcalc_core::algebroid::{koszul_bracket, Algebroid, AlgebroidSpec};
use dbcalc_core::background::Background;
use dbcalc_core::bigbracket::LieAlgebra;
use dbcalc_core::Manifold;
use dbcalc_core::derived::{CommutatorAlgebra, DerivedContext, PoissonAlgebra};
use dbcalc_core::gca::Context;
use dbcalc_core::{Element, Rat, Rng, Scalar};
use std::collections::HashMap;
use std::fmt;

pub struct Options {
    pub seed: u64,
    pub degree_cap: u32,
    pub jobs: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 0xD1CE,
            degree_cap: 12,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReportLine {
    pub kind: String,
    pub name: String,
    pub status: String,
    pub payload: String,
}

impl fmt::Display for ReportLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}|{}|{}",
            self.kind, self.name, self.status, self.payload
        )
    }
}

#[derive(Debug)]
pub struct RunError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

enum Structure {
    None,
    Manifold(Box<Manifold>),
    Lie(Box<LieAlgebra<Rat>>),
    Algebroid { name: String, value: Box<Algebroid<Rat>> },
}

struct Env {
    structure: Structure,
    values: HashMap<String, (ValueSort, Element)>,
    background: Option<(String, Element)>,
    seed: u64,
    degree_cap: u32,
}

impl Env {
    fn expr_context(&self) -> Option<&Context> {
        match &self.structure {
            Structure::Manifold(m) => Some(m.context()),
            Structure::Lie(l) => Some(l.context()),
            Structure::Algebroid { value, .. } => Some(value.tstar_context()),
            Structure::None => None,
        }
    }

    fn manifold(&self, line: usize) -> Result<&Manifold, RunError> {
        match &self.structure {
            Structure::Manifold(m) => Ok(m),
            _ => Err(RunError {
                line,
                message: "this command needs a manifold declaration".into(),
            }),
        }
    }

    fn lie(&self, line: usize) -> Result<&LieAlgebra<Rat>, RunError> {
        match &self.structure {
            Structure::Lie(l) => Ok(l),
            _ => Err(RunError {
                line,
                message: "this command needs a liealgebra declaration".into(),
            }),
        }
    }
}

fn eval_expr(expr: &Expr, ctx: &Context, env: Option<&Env>, line: usize) -> Result<Element, RunError> {
    let rerr = |message: String| RunError { line, message };
    Ok(match expr {
        Expr::Rational(p, q) => Element::constant(ctx, Rat::from_ratio(*p, *q)),
        Expr::Symbol(s) => {
            if let Ok(id) = ctx.lookup(s) {
                Element::generator(ctx, id)
            } else if let Some((_, v)) = env.and_then(|e| e.values.get(s)) {
                if !v.context().same_as(ctx) {
                    return Err(rerr(format!("`{s}` lives in a different context")));
                }
                v.clone()
            } else {
                return Err(rerr(format!("unknown symbol `{s}`")));
            }
        }
        Expr::Neg(e) => eval_expr(e, ctx, env, line)?.neg(),
        Expr::Add(a, b) => eval_expr(a, ctx, env, line)?.add(&eval_expr(b, ctx, env, line)?),
        Expr::Sub(a, b) => eval_expr(a, ctx, env, line)?.sub(&eval_expr(b, ctx, env, line)?),
        Expr::Mul(a, b) => eval_expr(a, ctx, env, line)?
            .mul(&eval_expr(b, ctx, env, line)?)
            .map_err(|e| rerr(e.to_string()))?,
    })
}

fn enforce_cap(env: &Env, v: &Element, line: usize) -> Result<(), RunError> {
    let ctx = v.context();
    let evens: Vec<_> = ctx
        .ids()
        .filter(|&id| !ctx.parity_of(id).is_odd())
        .collect();
    let w = v.max_exponent_weight(&evens);
    if w > env.degree_cap {
        return Err(RunError {
            line,
            message: format!(
                "polynomial degree {w} exceeds the cap {} (raise --degree-cap)",
                env.degree_cap
            ),
        });
    }
    Ok(())
}

/// Executes a parsed script. Declarations, brackets, and prints run in
/// order; `check` statements may run in parallel up to `jobs`, each on an
/// independent RNG stream derived from the seed and the statement index,
/// so the report is deterministic and ordered by script position.
pub fn run_script(stmts: &[Located], opts: &Options) -> (Vec<ReportLine>, bool) {
    let mut env = Env {
        structure: Structure::None,
        values: HashMap::new(),
        background: None,
        seed: opts.seed,
        degree_cap: opts.degree_cap,
    };
    let mut lines: Vec<Option<ReportLine>> = vec![None; stmts.len()];
    let mut ok = true;
    // deferred checks: (slot, closure)
    type Task<'a> = Box<dyn FnOnce() -> ReportLine + Send + 'a>;
    let mut checks: Vec<(usize, Task<'_>)> = Vec::new();
    // sequential pass
    for (idx, stmt) in stmts.iter().enumerate() {
        let line = stmt.span.line;
        let result = execute_statement(stmt, idx, &mut env);
        match result {
            Ok(Outcome::Line(l)) => lines[idx] = Some(l),
            Ok(Outcome::Deferred(task)) => checks.push((idx, task)),
            Err(e) => {
                ok = false;
                lines[idx] = Some(ReportLine {
                    kind: "error".into(),
                    name: stmt.text.clone(),
                    status: "error".into(),
                    payload: format!("line {line}: {}", e.message),
                });
            }
        }
    }
    // parallel check pass
    let jobs = opts.jobs.max(1);
    let mut results: Vec<(usize, ReportLine)> = Vec::with_capacity(checks.len());
    if jobs == 1 || checks.len() <= 1 {
        for (slot, task) in checks {
            results.push((slot, task()));
        }
    } else {
        let mut buckets: Vec<Vec<(usize, Task<'_>)>> = Vec::new();
        for _ in 0..jobs {
            buckets.push(Vec::new());
        }
        for (k, item) in checks.into_iter().enumerate() {
            buckets[k % jobs].push(item);
        }
        let collected = std::thread::scope(|scope| {
            let handles: Vec<_> = buckets
                .into_iter()
                .map(|bucket| {
                    scope.spawn(move || {
                        bucket
                            .into_iter()
                            .map(|(slot, task)| (slot, task()))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("check thread"))
                .collect::<Vec<_>>()
        });
        results.extend(collected);
    }
    for (slot, line) in results {
        lines[slot] = Some(line);
    }
    let mut out = Vec::new();
    for line in lines.into_iter().flatten() {
        if line.status == "FAIL" || line.status == "error" {
            ok = false;
        }
        out.push(line);
    }
    (out, ok)
}

enum Outcome<'a> {
    Line(ReportLine),
    Deferred(Box<dyn FnOnce() -> ReportLine + Send + 'a>),
}

fn execute_statement<'a>(
    stmt: &Located,
    idx: usize,
    env: &mut Env,
) -> Result<Outcome<'a>, RunError> {
    let line = stmt.span.line;
    match &stmt.statement {
        Statement::Manifold { name, dim } => {
            ensure_no_structure(env, line)?;
            let m = Manifold::new(*dim).map_err(|e| RunError {
                line,
                message: e.to_string(),
            })?;
            env.structure = Structure::Manifold(Box::new(m));
            Ok(Outcome::Line(ReportLine {
                kind: "decl".into(),
                name: name.clone(),
                status: "ok".into(),
                payload: format!("manifold dim={dim}"),
            }))
        }
        Statement::LieAlgebra {
            name,
            dim,
            constants,
        } => {
            ensure_no_structure(env, line)?;
            let cs: Vec<((usize, usize, usize), Rat)> = constants
                .iter()
                .map(|(kij, (p, q))| (*kij, Rat::from_ratio(*p, *q)))
                .collect();
            let l = LieAlgebra::new(*dim, &cs).map_err(|e| RunError {
                line,
                message: e.to_string(),
            })?;
            env.structure = Structure::Lie(Box::new(l));
            Ok(Outcome::Line(ReportLine {
                kind: "decl".into(),
                name: name.clone(),
                status: "ok".into(),
                payload: format!("liealgebra dim={dim} constants={}", constants.len()),
            }))
        }
        Statement::Algebroid {
            name,
            base,
            rank,
            anchor,
            structure,
        } => {
            ensure_no_structure(env, line)?;
            let base_ctx = Algebroid::<Rat>::base_context(*base);
            let mut a_entries = Vec::new();
            for ((i, al), e) in anchor {
                a_entries.push(((*i, *al), eval_expr(e, &base_ctx, None, line)?));
            }
            let mut c_entries = Vec::new();
            for ((k, i, j), e) in structure {
                c_entries.push(((*k, *i, *j), eval_expr(e, &base_ctx, None, line)?));
            }
            let value = Algebroid::new(AlgebroidSpec {
                base_dim: *base,
                rank: *rank,
                anchor: a_entries,
                structure: c_entries,
            })
            .map_err(|e| RunError {
                line,
                message: e.to_string(),
            })?;
            env.structure = Structure::Algebroid {
                name: name.clone(),
                value: Box::new(value),
            };
            Ok(Outcome::Line(ReportLine {
                kind: "decl".into(),
                name: name.clone(),
                status: "ok".into(),
                payload: format!("algebroid base={base} rank={rank}"),
            }))
        }
        Statement::Let { sort, name, expr } => {
            let ctx = env
                .expr_context()
                .ok_or_else(|| RunError {
                    line,
                    message: "declare a manifold or algebra first".into(),
                })?
                .clone();
            if ctx.lookup(name).is_ok() {
                return Err(RunError {
                    line,
                    message: format!("`{name}` shadows a generator"),
                });
            }
            let v = eval_expr(expr, &ctx, Some(env), line)?;
            enforce_cap(env, &v, line)?;
            validate_sort(env, *sort, &v, line)?;
            if *sort == ValueSort::Background {
                let man = env.manifold(line)?;
                Background::new(man, v.clone()).map_err(|e| RunError {
                    line,
                    message: e.to_string(),
                })?;
                env.background = Some((name.clone(), v.clone()));
            }
            let payload = v.canonical_text();
            env.values.insert(name.clone(), (*sort, v));
            Ok(Outcome::Line(ReportLine {
                kind: "decl".into(),
                name: name.clone(),
                status: "ok".into(),
                payload,
            }))
        }
        Statement::Seed(n) => {
            env.seed = *n;
            Ok(Outcome::Line(ReportLine {
                kind: "seed".into(),
                name: n.to_string(),
                status: "ok".into(),
                payload: String::new(),
            }))
        }
        Statement::Bracket {
            kind,
            parameter,
            a,
            b,
        } => {
            let payload = run_bracket(env, kind, parameter.as_deref(), a, b, line)?;
            Ok(Outcome::Line(ReportLine {
                kind: "bracket".into(),
                name: stmt.text.clone(),
                status: "ok".into(),
                payload,
            }))
        }
        Statement::Check { suite, args } => {
            let rng = Rng::new(env.seed).fork(idx as u64);
            let task = build_check(env, suite, args, rng, stmt.text.clone(), line)?;
            Ok(Outcome::Deferred(task))
        }
        Statement::Print(expr) => {
            let ctx = env
                .expr_context()
                .ok_or_else(|| RunError {
                    line,
                    message: "declare a manifold or algebra first".into(),
                })?
                .clone();
            let v = eval_expr(expr, &ctx, Some(env), line)?;
            Ok(Outcome::Line(ReportLine {
                kind: "print".into(),
                name: stmt.text.clone(),
                status: "ok".into(),
                payload: v.canonical_text(),
            }))
        }
    }
}

fn ensure_no_structure(env: &Env, line: usize) -> Result<(), RunError> {
    if matches!(env.structure, Structure::None) {
        Ok(())
    } else {
        Err(RunError {
            line,
            message: "one context per script: structure already declared".into(),
        })
    }
}

fn validate_sort(env: &Env, sort: ValueSort, v: &Element, line: usize) -> Result<(), RunError> {
    let fail = |message: String| Err(RunError { line, message });
    if let Structure::Manifold(m) = &env.structure {
        match sort {
            ValueSort::Bivector => {
                if !m.is_multivector(v) || m.bidegree(v) != Some((0, 2)) {
                    return fail(format!("`{}` is not a bivector", sort.keyword()));
                }
            }
            ValueSort::Form | ValueSort::Background => {
                if !m.is_form(v) {
                    return fail("not a differential form".into());
                }
            }
            ValueSort::Multivector => {
                if !m.is_multivector(v) {
                    return fail("not a multivector".into());
                }
            }
        }
    }
    Ok(())
}

fn lookup_value(env: &Env, name: &str, line: usize) -> Result<Element, RunError> {
    env.values
        .get(name)
        .map(|(_, v)| v.clone())
        .ok_or_else(|| RunError {
            line,
            message: format!("unknown name `{name}`"),
        })
}

fn run_bracket(
    env: &Env,
    kind: &str,
    parameter: Option<&str>,
    a: &Expr,
    b: &Expr,
    line: usize,
) -> Result<String, RunError> {
    let rerr = |e: dbcalc_core::Error| RunError {
        line,
        message: e.to_string(),
    };
    match kind {
        "schouten" | "schouten-pit" | "lie" | "fn" => {
            let man = env.manifold(line)?;
            let x = eval_expr(a, man.context(), Some(env), line)?;
            let y = eval_expr(b, man.context(), Some(env), line)?;
            let v = match kind {
                "schouten" => man.schouten(&x, &y).map_err(rerr)?,
                "schouten-pit" => man.schouten_via_pit(&x, &y).map_err(rerr)?,
                "lie" => man.lie_bracket(&x, &y).map_err(rerr)?,
                _ => man.frolicher_nijenhuis(&x, &y).map_err(rerr)?,
            };
            enforce_cap(env, &v, line)?;
            Ok(v.canonical_text())
        }
        "dorfman" | "courant" | "bdorfman" => {
            let man = env.manifold(line)?;
            let x = man
                .split_generalized(&eval_expr(a, man.context(), Some(env), line)?)
                .map_err(rerr)?;
            let y = man
                .split_generalized(&eval_expr(b, man.context(), Some(env), line)?)
                .map_err(rerr)?;
            let (vector, form, warn) = match kind {
                "dorfman" => {
                    let r = man.dorfman(&x, &y).map_err(rerr)?;
                    (r.vector, r.form, false)
                }
                "courant" => {
                    let r = man.courant(&x, &y).map_err(rerr)?;
                    (r.vector, r.form, false)
                }
                _ => {
                    let psi = match parameter {
                        Some(p) => lookup_value(env, p, line)?,
                        None => {
                            env.background
                                .as_ref()
                                .ok_or_else(|| RunError {
                                    line,
                                    message: "bdorfman needs a declared background".into(),
                                })?
                                .1
                                .clone()
                        }
                    };
                    let bg = Background::new(man, psi).map_err(rerr)?;
                    let r = bg.dorfman(&x, &y).map_err(rerr)?;
                    (r.vector, r.form, r.closure_warning)
                }
            };
            let mut payload = format!(
                "vector={}; form={}",
                vector.canonical_text(),
                form.canonical_text()
            );
            if warn {
                payload.push_str("; warning=bracket leaves V1+Omega1");
            }
            Ok(payload)
        }
        "koszul" => {
            let man = env.manifold(line)?;
            let p_name = parameter.ok_or_else(|| RunError {
                line,
                message: "use `bracket koszul:<bivector> a b`".into(),
            })?;
            let p = lookup_value(env, p_name, line)?;
            let x = eval_expr(a, man.context(), Some(env), line)?;
            let y = eval_expr(b, man.context(), Some(env), line)?;
            let v = koszul_bracket(man, &p, &x, &y).map_err(rerr)?;
            Ok(v.canonical_text())
        }
        "big" | "algschouten" => {
            let l = env.lie(line)?;
            let x = eval_expr(a, l.context(), Some(env), line)?;
            let y = eval_expr(b, l.context(), Some(env), line)?;
            let v = match kind {
                "big" => l.big_bracket(&x, &y).map_err(rerr)?,
                _ => l.algebraic_schouten(&x, &y).map_err(rerr)?,
            };
            Ok(v.canonical_text())
        }
        "poisson" => {
            let l = env.lie(line)?;
            let x = eval_expr(a, l.estar_context(), None, line)?;
            let y = eval_expr(b, l.estar_context(), None, line)?;
            Ok(l.linear_poisson(&x, &y).map_err(rerr)?.canonical_text())
        }
        other => Err(RunError {
            line,
            message: format!("unknown bracket kind `{other}`"),
        }),
    }
}

type CheckResult = Result<(bool, String), dbcalc_core::Error>;

fn finish(name: String, r: CheckResult) -> ReportLine {
    match r {
        Ok((true, payload)) => ReportLine {
            kind: "check".into(),
            name,
            status: "PASS".into(),
            payload,
        },
        Ok((false, payload)) => ReportLine {
            kind: "check".into(),
            name,
            status: "FAIL".into(),
            payload,
        },
        Err(e) => ReportLine {
            kind: "check".into(),
            name,
            status: "error".into(),
            payload: e.to_string(),
        },
    }
}

fn build_check<'a>(
    env: &Env,
    suite: &str,
    args: &[String],
    rng: Rng,
    text: String,
    line: usize,
) -> Result<Box<dyn FnOnce() -> ReportLine + Send + 'a>, RunError> {
    let bad = |message: String| RunError { line, message };
    match suite {
        "cartan" => {
            let man = env.manifold(line)?.clone();
            Ok(Box::new(move || finish(text, check_cartan(&man, rng))))
        }
        "schouten" => {
            let man = env.manifold(line)?.clone();
            Ok(Box::new(move || finish(text, check_schouten(&man, rng))))
        }
        "fn" => {
            let man = env.manifold(line)?.clone();
            Ok(Box::new(move || finish(text, check_fn(&man, rng))))
        }
        "vinogradov" => {
            let man = env.manifold(line)?.clone();
            Ok(Box::new(move || finish(text, check_vinogradov(&man, rng))))
        }
        "jacobi" => match &env.structure {
            Structure::Manifold(m) => {
                let man = (**m).clone();
                Ok(Box::new(move || {
                    finish(text, check_jacobi_manifold(&man, rng))
                }))
            }
            Structure::Lie(l) => {
                let lie = (**l).clone();
                Ok(Box::new(move || finish(text, check_jacobi_lie(&lie, rng))))
            }
            _ => Err(bad("jacobi needs a manifold or liealgebra".into())),
        },
        "derived" => match &env.structure {
            Structure::Manifold(m) => {
                let man = (**m).clone();
                Ok(Box::new(move || {
                    finish(text, check_derived_operators(&man, rng))
                }))
            }
            Structure::Lie(l) => {
                let lie = (**l).clone();
                Ok(Box::new(move || finish(text, check_derived_lie(&lie, rng))))
            }
            _ => Err(bad("derived needs a manifold or liealgebra".into())),
        },
        "wzw" => {
            if args.len() != 2 {
                return Err(bad("usage: check wzw <bivector> <background>".into()));
            }
            let man = env.manifold(line)?.clone();
            let p = lookup_value(env, &args[0], line)?;
            let psi = lookup_value(env, &args[1], line)?;
            Ok(Box::new(move || finish(text, check_wzw(&man, &p, &psi))))
        }
        "background" => {
            if args.len() != 2 {
                return Err(bad("usage: check background <bivector> <background>".into()));
            }
            let man = env.manifold(line)?.clone();
            let p = lookup_value(env, &args[0], line)?;
            let psi = lookup_value(env, &args[1], line)?;
            Ok(Box::new(move || {
                finish(text, check_background(&man, &p, &psi, rng))
            }))
        }
        "gcybe" => {
            if args.len() != 1 {
                return Err(bad("usage: check gcybe <r>".into()));
            }
            let lie = env.lie(line)?.clone();
            let r = lookup_value(env, &args[0], line)?;
            Ok(Box::new(move || finish(text, check_gcybe(&lie, &r))))
        }
        "algebroid" => {
            let a = match &env.structure {
                Structure::Algebroid { name, value }
                    if args.is_empty() || args[0] == *name =>
                {
                    (**value).clone()
                }
                _ => return Err(bad("usage: check algebroid [<name>]".into())),
            };
            Ok(Box::new(move || finish(text, check_algebroid(&a, rng))))
        }
        other => Err(bad(format!("unknown check suite `{other}`"))),
    }
}

// ----------------------------------------------------------------------
// check suites

fn check_cartan(man: &Manifold, mut rng: Rng) -> CheckResult {
    let d = man.op_d();
    if !d.commutator(&d)?.is_zero_op()? {
        return Ok((false, "[d,d] != 0".into()));
    }
    let mut cases = 0;
    for _ in 0..8 {
        let x = man.random_vector_field(&mut rng, 2);
        let y = man.random_vector_field(&mut rng, 2);
        let ix = man.embed(&x)?;
        let iy = man.embed(&y)?;
        if !ix.commutator(&iy)?.is_zero_op()? {
            return Ok((false, format!("[i_x,i_y] != 0 for x={x}, y={y}")));
        }
        let lx = ix.commutator(&d)?;
        if !lx.commutator(&d)?.is_zero_op()? {
            return Ok((false, format!("[L_x,d] != 0 for x={x}")));
        }
        let rhs = man.embed(&man.lie_bracket(&x, &y)?)?;
        if !lx.commutator(&iy)?.op_equal(&rhs)? {
            return Ok((false, format!("[L_x,i_y] != i_[x,y] for x={x}, y={y}")));
        }
        cases += 1;
    }
    Ok((true, format!("identities=5 pairs={cases}")))
}

fn check_schouten(man: &Manifold, mut rng: Rng) -> CheckResult {
    let d = man.op_d();
    for k in 0..10 {
        let p = rng.below(3) as u32;
        let q = rng.below(3) as u32;
        let u = man.random_multivector(&mut rng, p, 2, 2);
        let v = man.random_multivector(&mut rng, q, 2, 2);
        let s = man.schouten(&u, &v)?;
        if s != man.schouten_via_pit(&u, &v)? {
            return Ok((false, format!("pair {k}: models disagree")));
        }
        let lhs = man.embed(&s)?;
        let rhs = man.embed(&u)?.commutator(&d)?.commutator(&man.embed(&v)?)?;
        if !lhs.op_equal(&rhs)? {
            return Ok((false, format!("pair {k}: Cartan formula")));
        }
    }
    Ok((true, "pairs=10".into()))
}

fn check_fn(man: &Manifold, mut rng: Rng) -> CheckResult {
    let d = man.op_d();
    for k in 0..6 {
        let q = rng.below(2) as u32;
        let q2 = rng.below(2) as u32;
        let x = man.random_tensor(&mut rng, q, 1, 2, 1);
        let y = man.random_tensor(&mut rng, q2, 1, 2, 1);
        let derived = man.embed(&x)?.commutator(&d)?.commutator(&man.embed(&y)?)?;
        let i_fn = man.embed(&man.frolicher_nijenhuis(&x, &y)?)?;
        let l_iyx = man.embed(&man.i_tensor(&y, &x)?)?.commutator(&d)?;
        let corr = if (q as i64 * (q2 as i64 - 1)).rem_euclid(2) == 1 {
            l_iyx.neg()
        } else {
            l_iyx
        };
        if !derived.sub(&i_fn)?.add(&corr)?.is_zero_op()? {
            return Ok((false, format!("pair {k}: Eq. FN residual nonzero")));
        }
    }
    Ok((true, "pairs=6".into()))
}

fn check_vinogradov(man: &Manifold, mut rng: Rng) -> CheckResult {
    let alg = CommutatorAlgebra::new(man.operators().clone());
    let ctx = DerivedContext::by_element(&alg, man.op_d())?;
    for k in 0..6 {
        let qa = rng.below(2) as u32;
        let pa = rng.below(2) as u32;
        let qb = rng.below(2) as u32;
        let pb = rng.below(2) as u32;
        let a = man.embed(&man.random_tensor(&mut rng, qa, pa, 1, 1))?;
        let b = man.embed(&man.random_tensor(&mut rng, qb, pb, 1, 1))?;
        if !man.vinogradov(&a, &b)?.op_equal(&ctx.skew(&a, &b)?)? {
            return Ok((false, format!("pair {k}: vinogradov != skew derived")));
        }
    }
    Ok((true, "pairs=6".into()))
}

fn check_jacobi_manifold(man: &Manifold, mut rng: Rng) -> CheckResult {
    let sn = man.pit_schouten_structure();
    let mut triples = Vec::new();
    for _ in 0..30 {
        let ps: Vec<u32> = (0..3).map(|_| rng.below(3) as u32).collect();
        triples.push((
            man.to_pit(&man.random_multivector(&mut rng, ps[0], 2, 1))?,
            man.to_pit(&man.random_multivector(&mut rng, ps[1], 2, 1))?,
            man.to_pit(&man.random_multivector(&mut rng, ps[2], 2, 1))?,
        ));
    }
    let report = sn.check_graded_jacobi(&triples)?;
    Ok((
        report.passed(),
        summarize(&report),
    ))
}

fn check_jacobi_lie(lie: &LieAlgebra<Rat>, mut rng: Rng) -> CheckResult {
    let mut triples = Vec::new();
    for _ in 0..30 {
        let dims: Vec<(u32, u32)> = (0..3)
            .map(|_| (rng.below(3) as u32, rng.below(3) as u32))
            .collect();
        triples.push((
            lie.random_bidegree(&mut rng, dims[0].0, dims[0].1, 1),
            lie.random_bidegree(&mut rng, dims[1].0, dims[1].1, 1),
            lie.random_bidegree(&mut rng, dims[2].0, dims[2].1, 1),
        ));
    }
    let report = lie.big_structure().check_graded_jacobi(&triples)?;
    Ok((report.passed(), summarize(&report)))
}

fn check_derived_operators(man: &Manifold, mut rng: Rng) -> CheckResult {
    let alg = CommutatorAlgebra::new(man.operators().clone());
    let ctx = DerivedContext::by_element(&alg, man.op_d())?;
    let mut triples = Vec::new();
    for _ in 0..8 {
        let mk = |rng: &mut Rng| {
            let q = rng.below(2) as u32;
            let p = rng.below(2) as u32;
            man.embed(&man.random_tensor(rng, q, p, 1, 1))
        };
        triples.push((mk(&mut rng)?, mk(&mut rng)?, mk(&mut rng)?));
    }
    let report = ctx.check_loday(&triples)?;
    Ok((report.passed(), summarize(&report)))
}

fn check_derived_lie(lie: &LieAlgebra<Rat>, mut rng: Rng) -> CheckResult {
    let alg = PoissonAlgebra::new(lie.big_structure().clone());
    let ctx = DerivedContext::by_element(&alg, lie.mu().clone())?;
    let mut triples = Vec::new();
    let mut pairs = Vec::new();
    for _ in 0..30 {
        let dims: Vec<(u32, u32)> = (0..3)
            .map(|_| (rng.below(3) as u32, rng.below(3) as u32))
            .collect();
        let a = lie.random_bidegree(&mut rng, dims[0].0, dims[0].1, 1);
        let b = lie.random_bidegree(&mut rng, dims[1].0, dims[1].1, 1);
        let c = lie.random_bidegree(&mut rng, dims[2].0, dims[2].1, 1);
        pairs.push((a.clone(), b.clone()));
        triples.push((a, b, c));
    }
    let loday = ctx.check_loday(&triples)?;
    if !loday.passed() {
        return Ok((false, summarize(&loday)));
    }
    let morph = ctx.check_morphism_derivation(&pairs)?;
    Ok((morph.passed(), summarize(&morph)))
}

fn check_wzw(man: &Manifold, p: &Element, psi: &Element) -> CheckResult {
    let bg = Background::new(man, psi.clone())?;
    let rep = bg.wzw_condition(p)?;
    Ok((
        rep.holds,
        format!(
            "lhs={}; rhs={}",
            rep.lhs.canonical_text(),
            rep.rhs.canonical_text()
        ),
    ))
}

fn check_background(man: &Manifold, p: &Element, psi: &Element, mut rng: Rng) -> CheckResult {
    let bg = Background::new(man, psi.clone())?;
    let wzw = bg.wzw_condition(p)?;
    let square_zero = bg.twisted_square_residuals(p)?.is_empty();
    let mut pairs = Vec::new();
    for a in 0..man.dim() {
        for b in 0..man.dim() {
            pairs.push((man.dx(a), man.dx(b)));
        }
    }
    for _ in 0..4 {
        pairs.push((
            man.random_form(&mut rng, 1, 2, 2),
            man.random_form(&mut rng, 1, 2, 2),
        ));
    }
    let anchor = bg.check_anchor_morphism(p, &pairs)?.passed();
    // the three legs must agree; the suite passes iff all three hold
    let coherent = wzw.holds == square_zero && square_zero == anchor;
    let verdict = wzw.holds && square_zero && anchor;
    let payload = format!(
        "wzw={}; twisted_square_zero={}; anchor_morphism={}; triangle_coherent={}",
        wzw.holds, square_zero, anchor, coherent
    );
    if !coherent {
        return Ok((false, payload));
    }
    Ok((verdict, payload))
}

fn check_gcybe(lie: &LieAlgebra<Rat>, r: &Element) -> CheckResult {
    let rep = lie.gcybe_check(r)?;
    Ok((
        rep.chain_holds,
        format!(
            "schouten_square={}; drinfeld={}; d_mu_r={}; ad_invariant={}",
            rep.schouten_square.canonical_text(),
            rep.drinfeld.canonical_text(),
            rep.coboundary.canonical_text(),
            rep.ad_invariant
        ),
    ))
}

fn check_algebroid(a: &Algebroid<Rat>, mut rng: Rng) -> CheckResult {
    let mut pairs = Vec::new();
    for i in 0..a.rank() {
        for j in 0..a.rank() {
            pairs.push((a.frame(i), a.frame(j)));
        }
        for al in 0..a.base_dim() {
            pairs.push((a.frame(i), a.coordinate(al)));
        }
    }
    for _ in 0..8 {
        let p = (1 + rng.below(2) as u32).min(a.rank() as u32);
        let q = (1 + rng.below(2) as u32).min(a.rank() as u32);
        pairs.push((
            a.random_section(&mut rng, p, 2, 1),
            a.random_section(&mut rng, q, 2, 1),
        ));
    }
    for (k, (u, v)) in pairs.iter().enumerate() {
        let h = a.lahamilt(u, v)?;
        if h != a.sections_bracket(u, v)? {
            return Ok((false, format!("pair {k}: LAhamilt vs direct bracket")));
        }
        if h != a.laend(u, v)? {
            return Ok((false, format!("pair {k}: LAend vs LAhamilt")));
        }
    }
    for i in 0..a.rank() {
        for al in 0..a.base_dim() {
            let u = a.frame(i);
            let f = a.coordinate(al);
            if a.lahamilt(&u, &f)? != a.anchor_apply(&u, &f)? {
                return Ok((false, format!("anchor identity on (e{}, x{})", i + 1, al + 1)));
            }
        }
    }
    for k in 0..8 {
        let f = a.random_astar_function(&mut rng, 2, 2);
        let g = a.random_astar_function(&mut rng, 2, 2);
        if a.labiv(&f, &g)? != a.labiv_direct(&f, &g)? {
            return Ok((false, format!("LAbiv pair {k}")));
        }
    }
    let ok = a.hh_residual().is_zero()
        && a.q_square_residuals().is_empty()
        && a.pp_residual().is_zero();
    Ok((
        ok,
        format!(
            "pairs={}; HH=0: {}; Q^2=0: {}; [P,P]=0: {}",
            pairs.len(),
            a.hh_residual().is_zero(),
            a.q_square_residuals().is_empty(),
            a.pp_residual().is_zero()
        ),
    ))
}

fn summarize(report: &dbcalc_core::CheckReport) -> String {
    if report.passed() {
        format!("cases={}", report.cases)
    } else {
        let w = &report.failures[0];
        format!(
            "cases={}; failures={}; first: {} residual {}",
            report.cases,
            report.failures.len(),
            w.label,
            w.residual
        )
    }
}
