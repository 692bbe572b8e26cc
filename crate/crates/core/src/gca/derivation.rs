use super::{Context, GcaElement, GenId, Parity};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A degree-`k` derivation of the algebra, presented by its action on
/// generators and extended by the graded Leibniz rule
/// `D(ab) = D(a) b + (-1)^{|D||a|} a D(b)`.
#[derive(Debug, Clone)]
pub struct Derivation<S: Scalar> {
    ctx: Context,
    name: String,
    degree: i64,
    images: Vec<Option<GcaElement<S>>>,
}

impl<S: Scalar> Derivation<S> {
    /// A derivation with images for every generator; unspecified generators
    /// are mapped to zero.
    pub fn new(
        ctx: &Context,
        name: impl Into<String>,
        degree: i64,
        images: impl IntoIterator<Item = (GenId, GcaElement<S>)>,
    ) -> Result<Self> {
        let mut d = Self::partial(ctx, name, degree, images)?;
        for slot in d.images.iter_mut() {
            if slot.is_none() {
                *slot = Some(GcaElement::zero(&d.ctx));
            }
        }
        Ok(d)
    }

    /// A derivation with an incomplete image table. Applying it to an element
    /// that involves an uncovered generator is an error.
    pub fn partial(
        ctx: &Context,
        name: impl Into<String>,
        degree: i64,
        images: impl IntoIterator<Item = (GenId, GcaElement<S>)>,
    ) -> Result<Self> {
        let name = name.into();
        let mut slots: Vec<Option<GcaElement<S>>> = vec![None; ctx.len()];
        for (g, img) in images {
            ctx.check_same(img.context())?;
            if let Some(d) = img.require_homogeneous(&format!("image of `{name}`"))? {
                let expected = ctx.degree_of(g) + degree;
                if d != expected {
                    return Err(Error::DegreeMismatch {
                        what: format!("{}({})", name, ctx.generator(g).name),
                        expected,
                        found: d,
                    });
                }
            }
            slots[g as usize] = Some(img);
        }
        Ok(Derivation {
            ctx: ctx.clone(),
            name,
            degree,
            images: slots,
        })
    }

    pub fn zero(ctx: &Context, degree: i64) -> Self {
        Derivation {
            ctx: ctx.clone(),
            name: "0".into(),
            degree,
            images: vec![Some(GcaElement::zero(ctx)); ctx.len()],
        }
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

    pub fn parity(&self) -> Parity {
        Parity::of_degree(self.degree)
    }

    pub fn image(&self, g: GenId) -> Result<&GcaElement<S>> {
        self.images[g as usize]
            .as_ref()
            .ok_or_else(|| Error::IncompleteDerivation(self.ctx.generator(g).name.clone()))
    }

    /// Leibniz extension of the generator table.
    pub fn apply(&self, a: &GcaElement<S>) -> Result<GcaElement<S>> {
        self.ctx.check_same(a.context())?;
        let odd = self.parity().is_odd();
        let mut acc = GcaElement::zero(&self.ctx);
        for (m, c) in a.terms() {
            let factors = m.factors();
            let mut prefix_odd = false;
            for (i, &(g, e)) in factors.iter().enumerate() {
                let img = self.image(g)?;
                if !img.is_zero() {
                    let mut pre: Vec<(GenId, u32)> = factors[..i].to_vec();
                    if e > 1 {
                        pre.push((g, e - 1));
                    }
                    let pre = GcaElement::monomial(&self.ctx, &pre, S::one());
                    let suf = GcaElement::monomial(&self.ctx, &factors[i + 1..], S::one());
                    let mut coeff = c.clone() * S::from_int(e as i64);
                    if odd && prefix_odd {
                        coeff = -coeff;
                    }
                    let term = pre.mul(img)?.mul(&suf)?.scale(&coeff);
                    acc = acc.add(&term);
                }
                if self.ctx.parity_of(g).is_odd() {
                    prefix_odd = !prefix_odd;
                }
            }
        }
        Ok(acc)
    }

    /// Sum with another derivation of the same degree.
    pub fn add(&self, other: &Derivation<S>) -> Result<Derivation<S>> {
        self.ctx.check_same(&other.ctx)?;
        assert_eq!(self.degree, other.degree, "derivation degree mismatch");
        let mut images = Vec::with_capacity(self.images.len());
        for g in self.ctx.ids() {
            images.push(Some(self.image(g)?.add(other.image(g)?)));
        }
        Ok(Derivation {
            ctx: self.ctx.clone(),
            name: format!("{}+{}", self.name, other.name),
            degree: self.degree,
            images,
        })
    }

    /// `D(D(g))` for every generator; all zero iff `D` squares to zero
    /// (for odd `D`, `D^2 = [D,D]/2` is again a derivation).
    pub fn square_residuals(&self) -> Result<Vec<(GenId, GcaElement<S>)>> {
        let mut out = Vec::new();
        for g in self.ctx.ids() {
            let img = self.image(g)?;
            let sq = self.apply(img)?;
            if !sq.is_zero() {
                out.push((g, sq));
            }
        }
        Ok(out)
    }

    pub fn is_square_zero(&self) -> Result<bool> {
        Ok(self.square_residuals()?.is_empty())
    }
}
