//! Graded endomorphisms of a form algebra, presented as formal sums of
//! composition words over a generating set: left exterior multiplications,
//! a family of coordinate contractions, and one differential.
//!
//! Equality of operators is decided by evaluation on a finite test family.
//! Every word is a polynomial-coefficient differential operator whose order
//! in the even coordinates is at most the number of differentiating atoms in
//! it, and an operator of order `r` vanishes iff it kills every
//! `x^J * (odd mask)` with `|J| <= r`, by triangularity of `d^I x^J`.

use crate::error::{Error, Result};
use crate::gca::{Context, Derivation, GcaElement, GenId, Parity};
use crate::scalar::ExactScalar;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Debug)]
struct AlgebraData<S: ExactScalar> {
    name: String,
    ctx: Context,
    evens: Vec<GenId>,
    odds: Vec<GenId>,
    contractions: Vec<Derivation<S>>,
    differential: Derivation<S>,
    diff_differentiates: bool,
    extraction: Option<ExtractionSpec>,
    support: BTreeSet<GenId>,
}

/// Where interior-type operators extract to: the tensor context, the image
/// of each algebra generator there, and the generator dual to each
/// contraction.
#[derive(Debug, Clone)]
pub struct ExtractionSpec {
    pub tensor_ctx: Context,
    pub coeff_map: Vec<GenId>,
    pub duals: Vec<GenId>,
}

/// An operator algebra: the module it acts on plus the atom dictionary.
#[derive(Debug, Clone)]
pub struct OpAlgebra<S: ExactScalar>(Arc<AlgebraData<S>>);

impl<S: ExactScalar> OpAlgebra<S> {
    pub fn new(
        name: impl Into<String>,
        ctx: &Context,
        evens: Vec<GenId>,
        odds: Vec<GenId>,
        contractions: Vec<Derivation<S>>,
        differential: Derivation<S>,
        extraction: Option<ExtractionSpec>,
    ) -> Result<Self> {
        let name = name.into();
        let support: BTreeSet<GenId> = evens.iter().chain(odds.iter()).copied().collect();
        if contractions.len() != odds.len() {
            return Err(Error::InternalInconsistency(
                "one contraction per odd fiber generator".into(),
            ));
        }
        for (k, c) in contractions.iter().enumerate() {
            ctx.check_same(c.context())?;
            if !c.parity().is_odd() {
                return Err(Error::InternalInconsistency(format!(
                    "contraction {k} of `{name}` must be odd"
                )));
            }
            for g in ctx.ids() {
                let img = c.image(g)?;
                let dual = odds.iter().position(|&o| o == g);
                match dual {
                    Some(j) if j == k => {
                        if *img != GcaElement::one(ctx) {
                            return Err(Error::InternalInconsistency(format!(
                                "contraction {k} must pair with its odd generator"
                            )));
                        }
                    }
                    _ => {
                        if !img.is_zero() {
                            return Err(Error::InternalInconsistency(format!(
                                "contraction {k} must vanish outside its dual generator"
                            )));
                        }
                    }
                }
            }
        }
        ctx.check_same(differential.context())?;
        if !differential.parity().is_odd() {
            return Err(Error::InternalInconsistency(
                "the differential atom must be odd".into(),
            ));
        }
        let mut diff_differentiates = false;
        for g in ctx.ids() {
            let img = differential.image(g)?;
            if !support.contains(&g) && !img.is_zero() {
                return Err(Error::InternalInconsistency(
                    "the differential must vanish on inert generators".into(),
                ));
            }
            if !element_supported(img, &support) {
                return Err(Error::InternalInconsistency(
                    "differential images must stay in the module".into(),
                ));
            }
            if evens.contains(&g) && !img.is_zero() {
                diff_differentiates = true;
            }
        }
        if let Some(spec) = &extraction {
            if spec.duals.len() != contractions.len() {
                return Err(Error::InternalInconsistency(
                    "one dual generator per contraction".into(),
                ));
            }
            if !spec.duals.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InternalInconsistency(
                    "dual generators must be in canonical order".into(),
                ));
            }
        }
        Ok(OpAlgebra(Arc::new(AlgebraData {
            name,
            ctx: ctx.clone(),
            evens,
            odds,
            contractions,
            differential,
            diff_differentiates,
            extraction,
            support,
        })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn context(&self) -> &Context {
        &self.0.ctx
    }

    pub fn differential_atom(&self) -> &Derivation<S> {
        &self.0.differential
    }

    pub fn contraction_atom(&self, k: usize) -> &Derivation<S> {
        &self.0.contractions[k]
    }

    pub fn num_contractions(&self) -> usize {
        self.0.contractions.len()
    }

    pub fn same_as(&self, other: &OpAlgebra<S>) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    fn check_same(&self, other: &OpAlgebra<S>) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                expected: self.0.name.clone(),
                found: other.0.name.clone(),
            })
        }
    }

    /// The test family `x^J * mask` with `|J| <= bound`.
    pub fn family(&self, bound: u32) -> Vec<GcaElement<S>> {
        let mut polys: Vec<Vec<(GenId, u32)>> = vec![vec![]];
        for _ in 0..bound {
            let mut next: Vec<Vec<(GenId, u32)>> = polys.clone();
            for p in &polys {
                for &x in &self.0.evens {
                    let mut q = p.clone();
                    match q.iter_mut().find(|(g, _)| *g == x) {
                        Some((_, e)) => *e += 1,
                        None => q.push((x, 1)),
                    }
                    q.sort_by_key(|&(g, _)| g);
                    if !next.contains(&q) {
                        next.push(q);
                    }
                }
            }
            polys = next;
        }
        let mut out = Vec::new();
        for mask_bits in 0..(1u32 << self.0.odds.len()) {
            let mut mask: Vec<(GenId, u32)> = Vec::new();
            for (k, &o) in self.0.odds.iter().enumerate() {
                if mask_bits & (1 << k) != 0 {
                    mask.push((o, 1));
                }
            }
            mask.sort_by_key(|&(g, _)| g);
            for p in &polys {
                let mut factors = p.clone();
                factors.extend(mask.iter().copied());
                factors.sort_by_key(|&(g, _)| g);
                out.push(GcaElement::monomial(&self.0.ctx, &factors, S::one()));
            }
        }
        out
    }

    fn odd_mask(&self, subset: &[usize]) -> GcaElement<S> {
        let mut factors: Vec<(GenId, u32)> =
            subset.iter().map(|&k| (self.0.odds[k], 1)).collect();
        factors.sort_by_key(|&(g, _)| g);
        GcaElement::monomial(&self.0.ctx, &factors, S::one())
    }
}

fn element_supported<S: ExactScalar>(e: &GcaElement<S>, allowed: &BTreeSet<GenId>) -> bool {
    e.terms()
        .all(|(m, _)| m.factors().iter().all(|(g, _)| allowed.contains(g)))
}

/// One composition factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom<S: ExactScalar> {
    /// Left exterior multiplication by an element of the module.
    Mul(GcaElement<S>),
    /// The k-th coordinate contraction.
    Contract(usize),
    /// The differential.
    Diff,
}

type Word<S> = Vec<Atom<S>>;

/// A formal sum of composition words with coefficients.
#[derive(Debug, Clone)]
pub struct Operator<S: ExactScalar> {
    alg: OpAlgebra<S>,
    words: Vec<(S, Word<S>)>,
}

impl<S: ExactScalar> Operator<S> {
    pub fn zero(alg: &OpAlgebra<S>) -> Self {
        Operator {
            alg: alg.clone(),
            words: Vec::new(),
        }
    }

    pub fn identity(alg: &OpAlgebra<S>) -> Self {
        Operator {
            alg: alg.clone(),
            words: vec![(S::one(), vec![])],
        }
    }

    /// `e_xi`: left multiplication. The payload must have definite parity and
    /// live inside the module the algebra acts on.
    pub fn mul(alg: &OpAlgebra<S>, payload: &GcaElement<S>) -> Result<Self> {
        alg.0.ctx.check_same(payload.context())?;
        if !element_supported(payload, &alg.0.support) {
            return Err(Error::UnsupportedShape(
                "multiplication payload leaves the module".into(),
            ));
        }
        payload.parity()?;
        if payload.is_zero() {
            return Ok(Self::zero(alg));
        }
        Ok(Operator {
            alg: alg.clone(),
            words: vec![(S::one(), vec![Atom::Mul(payload.clone())])],
        })
    }

    pub fn contract(alg: &OpAlgebra<S>, k: usize) -> Self {
        Operator {
            alg: alg.clone(),
            words: vec![(S::one(), vec![Atom::Contract(k)])],
        }
    }

    pub fn diff(alg: &OpAlgebra<S>) -> Self {
        Operator {
            alg: alg.clone(),
            words: vec![(S::one(), vec![Atom::Diff])],
        }
    }

    pub fn algebra(&self) -> &OpAlgebra<S> {
        &self.alg
    }

    pub fn num_words(&self) -> usize {
        self.words.len()
    }

    fn atom_parity(&self, a: &Atom<S>) -> Parity {
        match a {
            Atom::Mul(p) => p.parity().expect("validated").unwrap_or(Parity::Even),
            Atom::Contract(k) => self.alg.0.contractions[*k].parity(),
            Atom::Diff => self.alg.0.differential.parity(),
        }
    }

    fn atom_degree(&self, a: &Atom<S>) -> Option<i64> {
        match a {
            Atom::Mul(p) => match p.degree() {
                crate::gca::Degree::Homogeneous(d) => Some(d),
                crate::gca::Degree::Zero => Some(0),
                crate::gca::Degree::Mixed => None,
            },
            Atom::Contract(k) => Some(self.alg.0.contractions[*k].degree()),
            Atom::Diff => Some(self.alg.0.differential.degree()),
        }
    }

    /// Parity of the operator; `None` for the zero operator. Errors when the
    /// words disagree.
    pub fn parity(&self) -> Result<Option<Parity>> {
        let mut result: Option<Parity> = None;
        for (_, w) in &self.words {
            let mut p = Parity::Even;
            for a in w {
                if self.atom_parity(a).is_odd() {
                    p = if p.is_odd() { Parity::Even } else { Parity::Odd };
                }
            }
            match result {
                None => result = Some(p),
                Some(q) if q == p => {}
                Some(_) => {
                    return Err(Error::GradingRequired {
                        what: "operator parity".into(),
                    })
                }
            }
        }
        Ok(result)
    }

    /// Total degree when every word is homogeneous and they agree.
    pub fn degree(&self) -> Option<i64> {
        let mut result: Option<i64> = None;
        for (_, w) in &self.words {
            let mut d = 0i64;
            for a in w {
                d += self.atom_degree(a)?;
            }
            match result {
                None => result = Some(d),
                Some(x) if x == d => {}
                Some(_) => return None,
            }
        }
        result
    }

    /// Bound on the differentiation order in the even coordinates.
    pub fn order_bound(&self) -> u32 {
        if !self.alg.0.diff_differentiates {
            return 0;
        }
        self.words
            .iter()
            .map(|(_, w)| w.iter().filter(|a| matches!(a, Atom::Diff)).count() as u32)
            .max()
            .unwrap_or(0)
    }

    /// Buttin type bound: the maximal number of contraction factors in a word.
    pub fn type_bound(&self) -> u32 {
        self.words
            .iter()
            .map(|(_, w)| w.iter().filter(|a| matches!(a, Atom::Contract(_))).count() as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn contains_diff(&self) -> bool {
        self.words
            .iter()
            .any(|(_, w)| w.iter().any(|a| matches!(a, Atom::Diff)))
    }

    pub fn apply(&self, e: &GcaElement<S>) -> Result<GcaElement<S>> {
        self.alg.0.ctx.check_same(e.context())?;
        let mut acc = GcaElement::zero(&self.alg.0.ctx);
        for (c, w) in &self.words {
            let mut v = e.clone();
            for a in w.iter().rev() {
                if v.is_zero() {
                    break;
                }
                v = match a {
                    Atom::Mul(p) => p.mul(&v)?,
                    Atom::Contract(k) => self.alg.0.contractions[*k].apply(&v)?,
                    Atom::Diff => self.alg.0.differential.apply(&v)?,
                };
            }
            acc = acc.add(&v.scale(c));
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Operator<S>) -> Result<Operator<S>> {
        self.alg.check_same(&other.alg)?;
        let mut words = self.words.clone();
        words.extend(other.words.iter().cloned());
        Ok(Operator {
            alg: self.alg.clone(),
            words,
        }
        .simplified())
    }

    pub fn neg(&self) -> Operator<S> {
        Operator {
            alg: self.alg.clone(),
            words: self
                .words
                .iter()
                .map(|(c, w)| (-c.clone(), w.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Operator<S>) -> Result<Operator<S>> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &S) -> Operator<S> {
        if c.is_zero() {
            return Self::zero(&self.alg);
        }
        Operator {
            alg: self.alg.clone(),
            words: self
                .words
                .iter()
                .map(|(k, w)| (k.clone() * c.clone(), w.clone()))
                .collect(),
        }
    }

    pub fn compose(&self, other: &Operator<S>) -> Result<Operator<S>> {
        self.alg.check_same(&other.alg)?;
        let mut words = Vec::with_capacity(self.words.len() * other.words.len());
        for (ca, wa) in &self.words {
            for (cb, wb) in &other.words {
                let mut w = wa.clone();
                w.extend(wb.iter().cloned());
                words.push((ca.clone() * cb.clone(), w));
            }
        }
        Ok(Operator {
            alg: self.alg.clone(),
            words,
        }
        .simplified())
    }

    /// Graded commutator `ab - (-1)^{|a||b|} ba`.
    pub fn commutator(&self, other: &Operator<S>) -> Result<Operator<S>> {
        let pa = self.parity()?;
        let pb = other.parity()?;
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        let sign_flip = matches!((pa, pb), (Some(Parity::Odd), Some(Parity::Odd)));
        if sign_flip {
            ab.add(&ba)
        } else {
            ab.sub(&ba)
        }
    }

    fn simplified(mut self) -> Operator<S> {
        self.words.retain(|(c, w)| {
            !c.is_zero()
                && !w
                    .iter()
                    .any(|a| matches!(a, Atom::Mul(p) if p.is_zero()))
        });
        self.words.sort_by(|(_, w1), (_, w2)| w1.cmp(w2));
        let mut merged: Vec<(S, Word<S>)> = Vec::with_capacity(self.words.len());
        for (c, w) in self.words {
            match merged.last_mut() {
                Some((mc, mw)) if *mw == w => *mc = mc.clone() + c,
                _ => merged.push((c, w)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        Operator {
            alg: self.alg,
            words: merged,
        }
    }

    /// Decides whether the operator is identically zero, by evaluation on
    /// the test family sized from the syntactic order bound.
    pub fn is_zero_op(&self) -> Result<bool> {
        if self.words.is_empty() {
            return Ok(true);
        }
        let family = self.alg.family(self.order_bound());
        for e in &family {
            if !self.apply(e)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact operator equality on the module, sound and complete within the
    /// syntactic order bounds.
    pub fn op_equal(&self, other: &Operator<S>) -> Result<bool> {
        self.sub(other)?.is_zero_op()
    }

    /// Reads off the mixed tensor `Z` with `i_Z = self`, stripping types from
    /// lowest to highest. Fails when the operator is not of interior type.
    pub fn extract_interior(&self) -> Result<GcaElement<S>> {
        let spec = self.alg.0.extraction.as_ref().ok_or_else(|| {
            Error::UnsupportedShape(format!("algebra `{}` has no tensor spec", self.alg.0.name))
        })?;
        let n = self.alg.num_contractions();
        let mut residual = self.clone().simplified();
        let mut tensor = GcaElement::zero(&spec.tensor_ctx);
        for t in 0..=n {
            for subset in subsets_of_size(n, t) {
                let mask = self.alg.odd_mask(&subset);
                let value = residual.apply(&mask)?;
                if value.is_zero() {
                    continue;
                }
                if !element_supported(&value, &self.alg.0.support) {
                    return Err(Error::ExtractionFailed(
                        "coefficient leaves the module".into(),
                    ));
                }
                // sign of i_{dual_J} applied to its own mask; the contraction
                // word acts rightmost-first, so probe in reverse
                let mut word: Word<S> = vec![Atom::Mul(value.clone())];
                let mut sign_probe = mask.clone();
                for &k in subset.iter().rev() {
                    sign_probe = self.alg.0.contractions[k].apply(&sign_probe)?;
                }
                let s = sign_probe.scalar_part();
                if s.is_zero() {
                    return Err(Error::ExtractionFailed("degenerate mask pairing".into()));
                }
                let coeff = value.scale(&(S::one() / s.clone()));
                for &k in &subset {
                    word.push(Atom::Contract(k));
                }
                let piece = Operator {
                    alg: self.alg.clone(),
                    words: vec![(S::one() / s, word)],
                };
                residual = residual.sub(&piece)?;
                let mut dual_factors: Vec<(GenId, u32)> =
                    subset.iter().map(|&k| (spec.duals[k], 1)).collect();
                dual_factors.sort_by_key(|&(g, _)| g);
                let dual_mono =
                    GcaElement::monomial(&spec.tensor_ctx, &dual_factors, S::one());
                // relabel, not transfer: the tensor model may regrade the
                // fiber generators (mixed-tensor vs parity-reversed degrees)
                let coeff_t = coeff.relabel(&spec.tensor_ctx, &spec.coeff_map)?;
                tensor = tensor.add(&coeff_t.mul(&dual_mono)?);
            }
        }
        if !residual.is_zero_op()? {
            return Err(Error::ExtractionFailed(
                "operator is not of pure interior type".into(),
            ));
        }
        Ok(tensor)
    }
}

fn subsets_of_size(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(start: usize, n: usize, t: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == t {
            out.push(current.clone());
            return;
        }
        for k in start..n {
            current.push(k);
            rec(k + 1, n, t, current, out);
            current.pop();
        }
    }
    rec(0, n, t, &mut current, &mut out);
    out
}

impl<S: ExactScalar> fmt::Display for Operator<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.words.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, w)) in self.words.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for a in w {
                match a {
                    Atom::Mul(p) => write!(f, "*e({p})")?,
                    Atom::Contract(j) => write!(f, "*i{j}")?,
                    Atom::Diff => write!(f, "*d")?,
                }
            }
        }
        Ok(())
    }
}
