use super::{Context, GcaElement, GenId, Monomial};
use crate::error::{Error, Result};
use crate::report::{CheckReport, Witness};
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// Declared symmetry of a bracket structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// `{a,b} = -(-1)^{(|a|+n)(|b|+n)} {b,a}`.
    GradedSkew,
    /// No symmetry is assumed; both orientations must be tabulated.
    None,
}

/// A degree-`n` bilinear bracket presented by its values on generator pairs
/// and extended as a biderivation:
///
/// `{a, bc} = {a,b} c + (-1)^{(|a|+n)|b|} b {a,c}`
/// `{ab, c} = a {b,c} + (-1)^{|b|(|c|+n)} {a,c} b`
///
/// Unlisted generator pairs bracket to zero.
#[derive(Debug, Clone)]
pub struct BracketStructure<S: Scalar> {
    ctx: Context,
    name: String,
    degree: i64,
    symmetry: Symmetry,
    table: BTreeMap<(GenId, GenId), GcaElement<S>>,
}

impl<S: Scalar> BracketStructure<S> {
    pub fn new(
        ctx: &Context,
        name: impl Into<String>,
        degree: i64,
        symmetry: Symmetry,
        entries: impl IntoIterator<Item = ((GenId, GenId), GcaElement<S>)>,
    ) -> Result<Self> {
        let name = name.into();
        let mut table: BTreeMap<(GenId, GenId), GcaElement<S>> = BTreeMap::new();
        for ((i, j), v) in entries {
            ctx.check_same(v.context())?;
            if let Some(d) = v.require_homogeneous(&format!("bracket table of `{name}`"))? {
                let expected = ctx.degree_of(i) + ctx.degree_of(j) + degree;
                if d != expected {
                    return Err(Error::DegreeMismatch {
                        what: format!(
                            "{{{}, {}}}",
                            ctx.generator(i).name,
                            ctx.generator(j).name
                        ),
                        expected,
                        found: d,
                    });
                }
            }
            if let Some(prev) = table.get(&(i, j)) {
                if *prev != v {
                    return Err(Error::SymmetryConflict {
                        a: ctx.generator(i).name.clone(),
                        b: ctx.generator(j).name.clone(),
                    });
                }
            }
            table.insert((i, j), v);
        }
        if symmetry == Symmetry::GradedSkew {
            let pairs: Vec<((GenId, GenId), GcaElement<S>)> =
                table.iter().map(|(k, v)| (*k, v.clone())).collect();
            for ((i, j), v) in pairs {
                let e = (ctx.degree_of(i) + degree) * (ctx.degree_of(j) + degree);
                let mut t = v.neg();
                if e.rem_euclid(2) == 1 {
                    t = t.neg();
                }
                match table.get(&(j, i)) {
                    Some(prev) if *prev != t => {
                        return Err(Error::SymmetryConflict {
                            a: ctx.generator(j).name.clone(),
                            b: ctx.generator(i).name.clone(),
                        });
                    }
                    Some(_) => {}
                    None => {
                        table.insert((j, i), t);
                    }
                }
            }
        }
        let b = BracketStructure {
            ctx: ctx.clone(),
            name,
            degree,
            symmetry,
            table,
        };
        b.check_generator_symmetry()?;
        Ok(b)
    }

    fn check_generator_symmetry(&self) -> Result<()> {
        if self.symmetry != Symmetry::GradedSkew {
            return Ok(());
        }
        for (&(i, j), v) in &self.table {
            let e = (self.ctx.degree_of(i) + self.degree) * (self.ctx.degree_of(j) + self.degree);
            let mut t = self.pair(j, i).neg();
            if e.rem_euclid(2) == 1 {
                t = t.neg();
            }
            if *v != t {
                return Err(Error::SymmetryConflict {
                    a: self.ctx.generator(i).name.clone(),
                    b: self.ctx.generator(j).name.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    fn pair(&self, i: GenId, j: GenId) -> GcaElement<S> {
        self.table
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| GcaElement::zero(&self.ctx))
    }

    /// Biderivation extension of the generator table.
    pub fn eval(&self, a: &GcaElement<S>, b: &GcaElement<S>) -> Result<GcaElement<S>> {
        self.ctx.check_same(a.context())?;
        self.ctx.check_same(b.context())?;
        let mut acc = GcaElement::zero(&self.ctx);
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let v = self.eval_factors(&flatten(ma), &flatten(mb))?;
                acc = acc.add(&v.scale(&(ca.clone() * cb.clone())));
            }
        }
        Ok(acc)
    }

    /// `{a, b}` for monomials given as flat factor lists.
    fn eval_factors(&self, a: &[GenId], b: &[GenId]) -> Result<GcaElement<S>> {
        match a {
            [] => Ok(GcaElement::zero(&self.ctx)),
            [g] => self.eval_gen_factors(*g, b),
            [g, rest @ ..] => {
                // {g rest, b} = g {rest, b} + (-1)^{|rest|(|b|+n)} {g, b} rest
                let gh = GcaElement::generator(&self.ctx, *g);
                let first = gh.mul(&self.eval_factors(rest, b)?)?;
                let rest_deg: i64 = rest.iter().map(|&x| self.ctx.degree_of(x)).sum();
                let b_deg: i64 = b.iter().map(|&x| self.ctx.degree_of(x)).sum();
                let mut second = self
                    .eval_gen_factors(*g, b)?
                    .mul(&factors_elem(&self.ctx, rest))?;
                if (rest_deg * (b_deg + self.degree)).rem_euclid(2) == 1 {
                    second = second.neg();
                }
                Ok(first.add(&second))
            }
        }
    }

    /// `{g, b}` for a single generator against a flat factor list.
    fn eval_gen_factors(&self, g: GenId, b: &[GenId]) -> Result<GcaElement<S>> {
        match b {
            [] => Ok(GcaElement::zero(&self.ctx)),
            [h] => Ok(self.pair(g, *h)),
            [h, rest @ ..] => {
                // {g, h rest} = {g,h} rest + (-1)^{(|g|+n)|h|} h {g, rest}
                let first = self.pair(g, *h).mul(&factors_elem(&self.ctx, rest))?;
                let hh = GcaElement::generator(&self.ctx, *h);
                let mut second = hh.mul(&self.eval_gen_factors(g, rest)?)?;
                if ((self.ctx.degree_of(g) + self.degree) * self.ctx.degree_of(*h)).rem_euclid(2)
                    == 1
                {
                    second = second.neg();
                }
                Ok(first.add(&second))
            }
        }
    }

    /// Graded Jacobi residual `{a,{b,c}} - {{a,b},c} - (-1)^{(n+|a|)(n+|b|)} {b,{a,c}}`
    /// on homogeneous inputs.
    pub fn jacobi_residual(
        &self,
        a: &GcaElement<S>,
        b: &GcaElement<S>,
        c: &GcaElement<S>,
    ) -> Result<GcaElement<S>> {
        let da = a.require_homogeneous("jacobi sample")?.unwrap_or(0);
        let db = b.require_homogeneous("jacobi sample")?.unwrap_or(0);
        c.require_homogeneous("jacobi sample")?;
        let lhs = self.eval(a, &self.eval(b, c)?)?;
        let t1 = self.eval(&self.eval(a, b)?, c)?;
        let mut t2 = self.eval(b, &self.eval(a, c)?)?;
        if ((self.degree + da) * (self.degree + db)).rem_euclid(2) == 1 {
            t2 = t2.neg();
        }
        Ok(lhs.sub(&t1).sub(&t2))
    }

    /// Evaluates the Jacobi residual on each sample triple.
    pub fn check_graded_jacobi(
        &self,
        samples: &[(GcaElement<S>, GcaElement<S>, GcaElement<S>)],
    ) -> Result<CheckReport> {
        let mut report = CheckReport::new(format!("graded-jacobi[{}]", self.name));
        for (k, (a, b, c)) in samples.iter().enumerate() {
            let r = self.jacobi_residual(a, b, c)?;
            report.record(r.is_zero(), || Witness {
                label: format!("triple {k}"),
                inputs: vec![a.to_string(), b.to_string(), c.to_string()],
                residual: r.to_string(),
            });
        }
        Ok(report)
    }
}

fn flatten(m: &Monomial) -> Vec<GenId> {
    let mut out = Vec::new();
    for &(g, e) in m.factors() {
        for _ in 0..e {
            out.push(g);
        }
    }
    out
}

fn factors_elem<S: Scalar>(ctx: &Context, factors: &[GenId]) -> GcaElement<S> {
    let mut acc = GcaElement::one(ctx);
    for &g in factors {
        acc = acc.mul(&GcaElement::generator(ctx, g)).expect("same ctx");
    }
    acc
}
