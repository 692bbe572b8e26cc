use super::{Context, GenId, Parity};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// A normalized monomial: factors `(generator, exponent)` sorted by the
/// context's canonical order, exponents positive, odd exponents equal to 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    factors: Box<[(GenId, u32)]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial {
            factors: Box::new([]),
        }
    }

    /// Builds a monomial from factors with strictly increasing generator ids.
    pub fn new(factors: &[(GenId, u32)]) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|&(_, e)| e > 0));
        Monomial {
            factors: factors.into(),
        }
    }

    pub fn factors(&self) -> &[(GenId, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent_of(&self, id: GenId) -> u32 {
        self.factors
            .iter()
            .find(|&&(g, _)| g == id)
            .map_or(0, |&(_, e)| e)
    }

    pub fn degree(&self, ctx: &Context) -> i64 {
        self.factors
            .iter()
            .map(|&(g, e)| ctx.degree_of(g) * e as i64)
            .sum()
    }

    pub fn parity(&self, ctx: &Context) -> Parity {
        Parity::of_degree(self.degree(ctx))
    }

    /// Graded-commutative product. Returns `None` when an odd generator
    /// squares to zero, otherwise the merged monomial and a sign flip flag
    /// from counting odd transpositions.
    pub fn mul(&self, other: &Monomial, ctx: &Context) -> Option<(Monomial, bool)> {
        let a = &self.factors;
        let b = &other.factors;
        let mut out: Vec<(GenId, u32)> = Vec::with_capacity(a.len() + b.len());
        let mut odd_a_tail: u32 = a
            .iter()
            .filter(|&&(g, _)| ctx.parity_of(g).is_odd())
            .count() as u32;
        let mut flips: u32 = 0;
        let (mut i, mut j) = (0usize, 0usize);
        while i < a.len() || j < b.len() {
            let take_a = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0 <= y.0,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => unreachable!(),
            };
            if take_a {
                let (g, e) = a[i];
                let odd = ctx.parity_of(g).is_odd();
                if j < b.len() && b[j].0 == g {
                    if odd {
                        return None; // odd square
                    }
                    out.push((g, e + b[j].1));
                    j += 1;
                } else {
                    out.push((g, e));
                }
                if odd {
                    odd_a_tail -= 1;
                }
                i += 1;
            } else {
                let (g, e) = b[j];
                if ctx.parity_of(g).is_odd() {
                    flips += odd_a_tail;
                }
                out.push((g, e));
                j += 1;
            }
        }
        Some((
            Monomial {
                factors: out.into(),
            },
            flips % 2 == 1,
        ))
    }

    pub fn display<'a>(&'a self, ctx: &'a Context) -> MonomialDisplay<'a> {
        MonomialDisplay { mono: self, ctx }
    }
}

pub struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    ctx: &'a Context,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &(g, e)) in self.mono.factors.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}", self.ctx.generator(g).name)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Degree of an element: zero elements have every degree, and elements mixing
/// degrees are flagged rather than silently assigned one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree {
    Zero,
    Homogeneous(i64),
    Mixed,
}

/// Exact sum of coefficient-weighted monomials over a generator context.
/// No zero coefficients are stored and the term map is canonically ordered,
/// so equality is a map comparison.
#[derive(Debug, Clone)]
pub struct GcaElement<S: Scalar> {
    ctx: Context,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> PartialEq for GcaElement<S> {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_as(&other.ctx) && self.terms == other.terms
    }
}

impl<S: Scalar + Eq> Eq for GcaElement<S> {}

impl<S: Scalar + Ord> PartialOrd for GcaElement<S> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar + Ord> Ord for GcaElement<S> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.terms.cmp(&other.terms)
    }
}

impl<S: Scalar> GcaElement<S> {
    pub fn zero(ctx: &Context) -> Self {
        GcaElement {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Context, c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        GcaElement {
            ctx: ctx.clone(),
            terms,
        }
    }

    pub fn one(ctx: &Context) -> Self {
        Self::constant(ctx, S::one())
    }

    pub fn generator(ctx: &Context, id: GenId) -> Self {
        Self::from_terms(ctx, [(Monomial::new(&[(id, 1)]), S::one())])
    }

    /// Monomial with ascending generator ids and a coefficient.
    pub fn monomial(ctx: &Context, factors: &[(GenId, u32)], c: S) -> Self {
        Self::from_terms(ctx, [(Monomial::new(factors), c)])
    }

    pub fn from_terms(
        ctx: &Context,
        terms: impl IntoIterator<Item = (Monomial, S)>,
    ) -> Self {
        let mut map: BTreeMap<Monomial, S> = BTreeMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            match map.remove(&m) {
                Some(prev) => {
                    let sum = prev + c;
                    if !sum.is_zero() {
                        map.insert(m, sum);
                    }
                }
                None => {
                    map.insert(m, c);
                }
            }
        }
        GcaElement {
            ctx: ctx.clone(),
            terms: map,
        }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    /// The constant-term coefficient.
    pub fn scalar_part(&self) -> S {
        self.coefficient(&Monomial::one())
    }

    pub fn degree(&self) -> Degree {
        let mut it = self.terms.keys();
        match it.next() {
            None => Degree::Zero,
            Some(first) => {
                let d = first.degree(&self.ctx);
                if it.all(|m| m.degree(&self.ctx) == d) {
                    Degree::Homogeneous(d)
                } else {
                    Degree::Mixed
                }
            }
        }
    }

    /// Degree for grading-sensitive operations; `None` means the zero
    /// element, which is homogeneous of every degree.
    pub fn require_homogeneous(&self, what: &str) -> Result<Option<i64>> {
        match self.degree() {
            Degree::Zero => Ok(None),
            Degree::Homogeneous(d) => Ok(Some(d)),
            Degree::Mixed => Err(Error::GradingRequired { what: what.into() }),
        }
    }

    /// Parity when every term agrees on it; zero has no parity.
    pub fn parity(&self) -> Result<Option<Parity>> {
        let mut it = self.terms.keys();
        match it.next() {
            None => Ok(None),
            Some(first) => {
                let p = first.parity(&self.ctx);
                if it.all(|m| m.parity(&self.ctx) == p) {
                    Ok(Some(p))
                } else {
                    Err(Error::GradingRequired {
                        what: "element parity".into(),
                    })
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.ctx.check_same(&other.ctx).expect("context mismatch");
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            match terms.remove(m) {
                Some(prev) => {
                    let sum = prev + c.clone();
                    if !sum.is_zero() {
                        terms.insert(m.clone(), sum);
                    }
                }
                None => {
                    terms.insert(m.clone(), c.clone());
                }
            }
        }
        GcaElement {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    pub fn neg(&self) -> Self {
        GcaElement {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        GcaElement {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.clone() * c.clone()))
                .collect(),
        }
    }

    /// Graded-commutative product with Koszul signs.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.ctx.check_same(&other.ctx)?;
        let mut acc: BTreeMap<Monomial, S> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, flip)) = ma.mul(mb, &self.ctx) {
                    let mut c = ca.clone() * cb.clone();
                    if flip {
                        c = -c;
                    }
                    match acc.remove(&m) {
                        Some(prev) => {
                            let sum = prev + c;
                            if !sum.is_zero() {
                                acc.insert(m, sum);
                            }
                        }
                        None => {
                            acc.insert(m, c);
                        }
                    }
                }
            }
        }
        Ok(GcaElement {
            ctx: self.ctx.clone(),
            terms: acc,
        })
    }

    /// Total polynomial degree in the listed (even) generators; used by the
    /// CLI degree cap.
    pub fn max_exponent_weight(&self, gens: &[GenId]) -> u32 {
        self.terms
            .keys()
            .map(|m| gens.iter().map(|&g| m.exponent_of(g)).sum())
            .max()
            .unwrap_or(0)
    }

    /// Moves the element to another context along a generator map. The map
    /// must preserve degrees (checked on the generators that occur) and the
    /// relative canonical order of odd generators, so no signs arise.
    pub fn transfer(&self, target: &Context, gen_map: &[GenId]) -> Result<Self> {
        for m in self.terms.keys() {
            for &(g, _) in m.factors() {
                let to = gen_map[g as usize];
                if self.ctx.degree_of(g) != target.degree_of(to) {
                    return Err(Error::DegreeMismatch {
                        what: format!("transfer of `{}`", self.ctx.generator(g).name),
                        expected: self.ctx.degree_of(g),
                        found: target.degree_of(to),
                    });
                }
            }
        }
        self.relabel(target, gen_map)
    }

    /// Like [`transfer`](Self::transfer) but without degree checks: the
    /// documented parity-reversal bijections deliberately change degrees.
    /// The map must preserve parities and, within each monomial, the order
    /// of the odd factors, so the relabeling is sign-free. Only generators
    /// that actually occur are validated.
    pub fn relabel(&self, target: &Context, gen_map: &[GenId]) -> Result<Self> {
        debug_assert_eq!(gen_map.len(), self.ctx.len());
        let mut terms: Vec<(Monomial, S)> = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut factors: Vec<(GenId, u32)> = Vec::with_capacity(m.factors().len());
            let mut last_odd: Option<GenId> = None;
            for &(g, e) in m.factors() {
                let to = gen_map[g as usize];
                if self.ctx.parity_of(g) != target.parity_of(to) {
                    return Err(Error::InternalInconsistency(
                        "relabeling must preserve parities".into(),
                    ));
                }
                if target.parity_of(to).is_odd() {
                    if last_odd.is_some_and(|prev| prev >= to) {
                        return Err(Error::InternalInconsistency(
                            "relabeling must preserve the order of odd factors".into(),
                        ));
                    }
                    last_odd = Some(to);
                }
                factors.push((to, e));
            }
            factors.sort_by_key(|&(g, _)| g);
            terms.push((Monomial::new(&factors), c.clone()));
        }
        Ok(Self::from_terms(target, terms))
    }

    /// Canonical text form: terms sorted, each `c*g1^k1*...`, rationals as
    /// `p/q`. Used by the CLI and golden files.
    pub fn canonical_text(&self) -> String {
        self.to_string()
    }
}

impl<S: Scalar> fmt::Display for GcaElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{}*{}", c, m.display(&self.ctx))?;
            }
        }
        Ok(())
    }
}
