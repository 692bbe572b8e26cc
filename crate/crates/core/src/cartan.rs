//! Cartan calculus on R^n charts with polynomial coefficients: forms,
//! multivectors, multivector-valued forms, the embedding `i` into operators
//! on forms, and the concrete brackets built from it (Schouten-Nijenhuis,
//! Frolicher-Nijenhuis, Dorfman, Courant, Vinogradov, Buttin).
//!
//! Multivectors live in two models at once: as mixed tensors over the chart
//! context (generators `x`, `dx`, `@` of degrees 0, 1, -1) and as functions
//! on the parity-reversed cotangent space (generators `x`, `xt` of degrees
//! 0, 1) with its canonical odd Poisson structure. The bijection
//! `@_{a1}...@_{ap} <-> xt_{a1}...xt_{ap}` is signless, and the two routes to
//! the Schouten bracket are cross-checked in the test suites.

use crate::error::{Error, Result};
use crate::gca::{Context, Derivation, GcaElement, GenId, Generator, Symmetry};
use crate::gca::Monomial;
use crate::gca::BracketStructure;
use crate::operator::{ExtractionSpec, OpAlgebra, Operator};
use crate::rng::Rng;
use crate::scalar::{ExactScalar, Scalar};

/// A generalized section of `TM + forms`: the vector part and the form part.
#[derive(Debug, Clone, PartialEq)]
pub struct Generalized<S: Scalar> {
    pub vector: GcaElement<S>,
    pub form: GcaElement<S>,
}

/// Polynomial chart on R^n with the full operator tool chest.
#[derive(Debug, Clone)]
pub struct Manifold<S: ExactScalar> {
    n: usize,
    ctx: Context,
    x: Vec<GenId>,
    dx: Vec<GenId>,
    pd: Vec<GenId>,
    forms: OpAlgebra<S>,
    de_rham: Derivation<S>,
    partials: Vec<Derivation<S>>,
    pointwise_big: BracketStructure<S>,
    pit_ctx: Context,
    pit_x: Vec<GenId>,
    pit_xt: Vec<GenId>,
    pit_schouten: BracketStructure<S>,
}

impl<S: ExactScalar> Manifold<S> {
    pub fn new(n: usize) -> Result<Self> {
        let mut gens = Vec::new();
        for a in 1..=n {
            gens.push(Generator::new(format!("x{a}"), 0));
        }
        for a in 1..=n {
            gens.push(Generator::new(format!("dx{a}"), 1));
        }
        for a in 1..=n {
            gens.push(Generator::new(format!("@{a}"), -1));
        }
        let ctx = Context::new(format!("R{n}"), gens)?;
        let x: Vec<GenId> = (1..=n).map(|a| ctx.lookup(&format!("x{a}")).unwrap()).collect();
        let dx: Vec<GenId> = (1..=n)
            .map(|a| ctx.lookup(&format!("dx{a}")).unwrap())
            .collect();
        let pd: Vec<GenId> = (1..=n).map(|a| ctx.lookup(&format!("@{a}")).unwrap()).collect();

        let de_rham = Derivation::new(
            &ctx,
            "d",
            1,
            x.iter()
                .zip(dx.iter())
                .map(|(&xa, &dxa)| (xa, GcaElement::generator(&ctx, dxa))),
        )?;
        let mut partials = Vec::with_capacity(n);
        for a in 0..n {
            partials.push(Derivation::new(
                &ctx,
                format!("@/@x{}", a + 1),
                0,
                [(x[a], GcaElement::one(&ctx))],
            )?);
        }
        let mut contractions = Vec::with_capacity(n);
        for a in 0..n {
            contractions.push(Derivation::new(
                &ctx,
                format!("i@{}", a + 1),
                -1,
                [(dx[a], GcaElement::one(&ctx))],
            )?);
        }
        let forms = OpAlgebra::new(
            format!("End(Omega R{n})"),
            &ctx,
            x.clone(),
            dx.clone(),
            contractions,
            de_rham.clone(),
            Some(ExtractionSpec {
                tensor_ctx: ctx.clone(),
                coeff_map: ctx.ids().collect(),
                duals: pd.clone(),
            }),
        )?;

        // pointwise big bracket on mixed tensors: {dx^a, @_b} = delta_ab
        let pointwise_big = BracketStructure::new(
            &ctx,
            "pointwise-big",
            0,
            Symmetry::GradedSkew,
            (0..n).map(|a| ((dx[a], pd[a]), GcaElement::one(&ctx))),
        )?;

        // parity-reversed cotangent model with its canonical odd bracket
        let mut pit_gens = Vec::new();
        for a in 1..=n {
            pit_gens.push(Generator::new(format!("x{a}"), 0));
        }
        for a in 1..=n {
            pit_gens.push(Generator::new(format!("xt{a}"), 1));
        }
        let pit_ctx = Context::new(format!("PiT*R{n}"), pit_gens)?;
        let pit_x: Vec<GenId> = (1..=n)
            .map(|a| pit_ctx.lookup(&format!("x{a}")).unwrap())
            .collect();
        let pit_xt: Vec<GenId> = (1..=n)
            .map(|a| pit_ctx.lookup(&format!("xt{a}")).unwrap())
            .collect();
        let pit_schouten = BracketStructure::new(
            &pit_ctx,
            "schouten",
            -1,
            Symmetry::GradedSkew,
            (0..n).map(|a| {
                (
                    (pit_xt[a], pit_x[a]),
                    GcaElement::one(&pit_ctx),
                )
            }),
        )?;

        Ok(Manifold {
            n,
            ctx,
            x,
            dx,
            pd,
            forms,
            de_rham,
            partials,
            pointwise_big,
            pit_ctx,
            pit_x,
            pit_xt,
            pit_schouten,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn pit_context(&self) -> &Context {
        &self.pit_ctx
    }

    pub fn operators(&self) -> &OpAlgebra<S> {
        &self.forms
    }

    pub fn pit_schouten_structure(&self) -> &BracketStructure<S> {
        &self.pit_schouten
    }

    pub fn x(&self, a: usize) -> GcaElement<S> {
        GcaElement::generator(&self.ctx, self.x[a])
    }

    pub fn dx(&self, a: usize) -> GcaElement<S> {
        GcaElement::generator(&self.ctx, self.dx[a])
    }

    pub fn pd(&self, a: usize) -> GcaElement<S> {
        GcaElement::generator(&self.ctx, self.pd[a])
    }

    pub fn one(&self) -> GcaElement<S> {
        GcaElement::one(&self.ctx)
    }

    pub fn zero(&self) -> GcaElement<S> {
        GcaElement::zero(&self.ctx)
    }

    /// Form degree and vector degree of a monomial.
    fn bidegree_mono(&self, m: &Monomial) -> (u32, u32) {
        let mut q = 0;
        let mut p = 0;
        for &(g, e) in m.factors() {
            if self.dx.contains(&g) {
                q += e;
            } else if self.pd.contains(&g) {
                p += e;
            }
        }
        (q, p)
    }

    /// `(form degree, vector degree)` when every term agrees.
    pub fn bidegree(&self, t: &GcaElement<S>) -> Option<(u32, u32)> {
        let mut result = None;
        for (m, _) in t.terms() {
            let b = self.bidegree_mono(m);
            match result {
                None => result = Some(b),
                Some(r) if r == b => {}
                Some(_) => return None,
            }
        }
        result
    }

    pub fn is_form(&self, t: &GcaElement<S>) -> bool {
        t.terms().all(|(m, _)| self.bidegree_mono(m).1 == 0)
    }

    pub fn is_multivector(&self, t: &GcaElement<S>) -> bool {
        t.terms().all(|(m, _)| self.bidegree_mono(m).0 == 0)
    }

    pub fn is_vector_field(&self, t: &GcaElement<S>) -> bool {
        t.terms().all(|(m, _)| self.bidegree_mono(m) == (0, 1))
    }

    /// Component of a fixed vector degree.
    pub fn vector_degree_component(&self, t: &GcaElement<S>, p: u32) -> GcaElement<S> {
        GcaElement::from_terms(
            &self.ctx,
            t.terms()
                .filter(|(m, _)| self.bidegree_mono(m).1 == p)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// de Rham differential (zero on the `@` generators, so it acts as
    /// `d (x) id` on mixed tensors).
    pub fn d(&self, t: &GcaElement<S>) -> GcaElement<S> {
        self.de_rham.apply(t).expect("total derivation")
    }

    pub fn partial(&self, a: usize, t: &GcaElement<S>) -> GcaElement<S> {
        self.partials[a].apply(t).expect("total derivation")
    }

    /// Interior product of a form (or mixed tensor) by a multivector,
    /// through the operator embedding.
    pub fn interior(&self, u: &GcaElement<S>, t: &GcaElement<S>) -> Result<GcaElement<S>> {
        self.embed(u)?.apply(t)
    }

    /// Lie derivative of a form along a vector field: `L_x = i_x d + d i_x`.
    pub fn lie_derivative(&self, v: &GcaElement<S>, t: &GcaElement<S>) -> Result<GcaElement<S>> {
        if !self.is_vector_field(v) {
            return Err(Error::BidegreeMismatch {
                what: "Lie derivative direction".into(),
                expected: "(0,1)".into(),
            });
        }
        Ok(self.interior(v, &self.d(t))?.add(&self.d(&self.interior(v, t)?)))
    }

    /// Lie bracket of polynomial vector fields.
    pub fn lie_bracket(&self, v: &GcaElement<S>, w: &GcaElement<S>) -> Result<GcaElement<S>> {
        for t in [v, w] {
            if !self.is_vector_field(t) {
                return Err(Error::BidegreeMismatch {
                    what: "Lie bracket argument".into(),
                    expected: "(0,1)".into(),
                });
            }
        }
        let mut acc = self.zero();
        for b in 0..self.n {
            let vb = self.interior(v, &self.dx(b))?;
            let wb = self.interior(w, &self.dx(b))?;
            // [v,w]^b = v(w^b) - w(v^b)
            let mut comp = self.zero();
            for a in 0..self.n {
                let va = self.interior(v, &self.dx(a))?;
                let wa = self.interior(w, &self.dx(a))?;
                comp = comp
                    .add(&va.mul(&self.partial(a, &wb))?)
                    .sub(&wa.mul(&self.partial(a, &vb))?);
            }
            acc = acc.add(&comp.mul(&self.pd(b))?);
        }
        Ok(acc)
    }

    /// The embedding `i` of multivector-valued forms into operators on
    /// forms: `i_{xi (x) u} = e_xi i_{u_1} ... i_{u_p}` on decomposables.
    pub fn embed(&self, t: &GcaElement<S>) -> Result<Operator<S>> {
        let mut acc = Operator::zero(&self.forms);
        for (m, c) in t.terms() {
            let (form_part, vec_ids) = self.split_mono(m)?;
            let mut op = Operator::mul(&self.forms, &form_part)?;
            for a in vec_ids {
                op = op.compose(&Operator::contract(&self.forms, a))?;
            }
            acc = acc.add(&op.scale(c))?;
        }
        Ok(acc)
    }

    /// Splits a mixed monomial into its form factor and the list of `@`
    /// coordinate indices (ascending).
    fn split_mono(&self, m: &Monomial) -> Result<(GcaElement<S>, Vec<usize>)> {
        let mut form_factors: Vec<(GenId, u32)> = Vec::new();
        let mut vec_ids = Vec::new();
        for &(g, e) in m.factors() {
            if let Some(a) = self.pd.iter().position(|&p| p == g) {
                vec_ids.push(a);
            } else {
                form_factors.push((g, e));
            }
        }
        Ok((
            GcaElement::monomial(&self.ctx, &form_factors, S::one()),
            vec_ids,
        ))
    }

    /// `e_xi` as an operator.
    pub fn op_mul(&self, xi: &GcaElement<S>) -> Result<Operator<S>> {
        Operator::mul(&self.forms, xi)
    }

    pub fn op_d(&self) -> Operator<S> {
        Operator::diff(&self.forms)
    }

    /// Derived bracket on operators, `[a,b]_d = [[a,d],b]`.
    pub fn derived_op_bracket(&self, a: &Operator<S>, b: &Operator<S>) -> Result<Operator<S>> {
        a.commutator(&self.op_d())?.commutator(b)
    }

    /// Vinogradov bracket
    /// `[a,b]_V = 1/2 ([[a,d],b] - (-1)^{|b|} [a,[b,d]])`.
    pub fn vinogradov(&self, a: &Operator<S>, b: &Operator<S>) -> Result<Operator<S>> {
        let first = self.derived_op_bracket(a, b)?;
        let mut second = a.commutator(&b.commutator(&self.op_d())?)?;
        if let Some(p) = b.parity()? {
            if p.is_odd() {
                second = second.neg();
            }
        }
        Ok(first.sub(&second)?.scale(&S::half()))
    }

    /// Buttin's computable right-hand side `[[i_X, d], [i_Y, d]]`.
    pub fn buttin_rhs(&self, xt: &GcaElement<S>, yt: &GcaElement<S>) -> Result<Operator<S>> {
        let d = self.op_d();
        self.embed(xt)?
            .commutator(&d)?
            .commutator(&self.embed(yt)?.commutator(&d)?)
    }

    /// Schouten-Nijenhuis bracket of multivectors via the Cartan formula
    /// `i_{[u,v]} = [[i_u, d], i_v]`.
    pub fn schouten(&self, u: &GcaElement<S>, v: &GcaElement<S>) -> Result<GcaElement<S>> {
        for t in [u, v] {
            if !self.is_multivector(t) {
                return Err(Error::BidegreeMismatch {
                    what: "schouten argument".into(),
                    expected: "(0,p)".into(),
                });
            }
        }
        let op = self.derived_op_bracket(&self.embed(u)?, &self.embed(v)?)?;
        op.extract_interior()
    }

    /// Signless relabeling of a multivector into the parity-reversed
    /// cotangent model.
    pub fn to_pit(&self, u: &GcaElement<S>) -> Result<GcaElement<S>> {
        if !self.is_multivector(u) {
            return Err(Error::BidegreeMismatch {
                what: "to_pit argument".into(),
                expected: "(0,p)".into(),
            });
        }
        let mut map: Vec<GenId> = Vec::with_capacity(self.ctx.len());
        for id in self.ctx.ids() {
            if let Some(a) = self.x.iter().position(|&g| g == id) {
                map.push(self.pit_x[a]);
            } else if let Some(a) = self.pd.iter().position(|&g| g == id) {
                map.push(self.pit_xt[a]);
            } else {
                // dx generators never occur in a multivector; map arbitrarily
                map.push(self.pit_x[0]);
            }
        }
        u.relabel(&self.pit_ctx, &map)
    }

    pub fn from_pit(&self, u: &GcaElement<S>) -> Result<GcaElement<S>> {
        let mut map: Vec<GenId> = Vec::with_capacity(self.pit_ctx.len());
        for id in self.pit_ctx.ids() {
            if let Some(a) = self.pit_x.iter().position(|&g| g == id) {
                map.push(self.x[a]);
            } else {
                let a = self.pit_xt.iter().position(|&g| g == id).unwrap();
                map.push(self.pd[a]);
            }
        }
        u.relabel(&self.ctx, &map)
    }

    /// Schouten bracket computed in the odd Poisson model and mapped back.
    pub fn schouten_via_pit(&self, u: &GcaElement<S>, v: &GcaElement<S>) -> Result<GcaElement<S>> {
        let a = self.to_pit(u)?;
        let b = self.to_pit(v)?;
        self.from_pit(&self.pit_schouten.eval(&a, &b)?)
    }

    /// `P# dx^a = i_{dx^a} P`: contraction of a multivector by a coordinate
    /// 1-form, computed in the parity-reversed model.
    pub fn sharp(&self, p: &GcaElement<S>, a: usize) -> Result<GcaElement<S>> {
        let p_pit = self.to_pit(p)?;
        let d = Derivation::new(
            &self.pit_ctx,
            format!("i_dx{}", a + 1),
            -1,
            [(self.pit_xt[a], GcaElement::one(&self.pit_ctx))],
        )?;
        self.from_pit(&d.apply(&p_pit)?)
    }

    /// `P#` applied to an arbitrary 1-form: `P# xi = i_xi P`.
    pub fn sharp_form(&self, p: &GcaElement<S>, xi: &GcaElement<S>) -> Result<GcaElement<S>> {
        let mut acc = self.zero();
        for a in 0..self.n {
            let comp = self.interior(&self.pd(a), xi)?; // xi_a
            acc = acc.add(&comp.mul(&self.sharp(p, a)?)?);
        }
        Ok(acc)
    }

    /// Pointwise big bracket of mixed tensors: the fiberwise canonical
    /// Poisson bracket pairing `dx^a` with `@_a`.
    pub fn pointwise_big_bracket(
        &self,
        xt: &GcaElement<S>,
        yt: &GcaElement<S>,
    ) -> Result<GcaElement<S>> {
        self.pointwise_big.eval(xt, yt)
    }

    /// The mixed tensor `Z` with `i_Z = [i_X, i_Y]`, all types together.
    pub fn algebraic_commutator_tensor(
        &self,
        xt: &GcaElement<S>,
        yt: &GcaElement<S>,
    ) -> Result<GcaElement<S>> {
        self.embed(xt)?
            .commutator(&self.embed(yt)?)?
            .extract_interior()
    }

    /// Buttin's algebraic bracket: the term of highest type in `[i_X, i_Y]`,
    /// i.e. the vector-degree `p + p' - 1` component of the extracted tensor.
    pub fn highest_type_term(
        &self,
        xt: &GcaElement<S>,
        yt: &GcaElement<S>,
    ) -> Result<GcaElement<S>> {
        let (_, p) = self.bidegree(xt).ok_or(Error::BidegreeMismatch {
            what: "highest_type argument".into(),
            expected: "pure vector degree".into(),
        })?;
        let (_, p2) = self.bidegree(yt).ok_or(Error::BidegreeMismatch {
            what: "highest_type argument".into(),
            expected: "pure vector degree".into(),
        })?;
        let z = self.algebraic_commutator_tensor(xt, yt)?;
        Ok(self.vector_degree_component(&z, p + p2 - 1))
    }

    /// `i_Y X` for vector-valued forms: on decomposables,
    /// `i_{eta (x) y} (xi (x) x) = (eta ^ i_y xi) (x) x`.
    pub fn i_tensor(&self, yt: &GcaElement<S>, xt: &GcaElement<S>) -> Result<GcaElement<S>> {
        let op = self.embed(yt)?;
        let mut acc = self.zero();
        for (m, c) in xt.terms() {
            let (form_part, vec_ids) = self.split_mono(m)?;
            let mut v = op.apply(&form_part)?;
            for a in vec_ids {
                v = v.mul(&self.pd(a))?;
            }
            acc = acc.add(&v.scale(c));
        }
        Ok(acc)
    }

    /// Frolicher-Nijenhuis bracket of vector-valued forms, evaluated
    /// termwise on the decomposition into `xi (x) @_a` monomials:
    ///
    /// `[xi(x)x, eta(x)y]_FN = xi^eta (x) [x,y]`
    /// `+ (xi ^ L_x eta + (-1)^{|xi|} d xi ^ i_x eta) (x) y`
    /// `- (-1)^{|xi||eta|} (eta ^ L_y xi + (-1)^{|eta|} d eta ^ i_y xi) (x) x`
    pub fn frolicher_nijenhuis(
        &self,
        xt: &GcaElement<S>,
        yt: &GcaElement<S>,
    ) -> Result<GcaElement<S>> {
        for t in [xt, yt] {
            if !t.terms().all(|(m, _)| self.bidegree_mono(m).1 == 1) {
                return Err(Error::BidegreeMismatch {
                    what: "frolicher_nijenhuis argument".into(),
                    expected: "(q,1)".into(),
                });
            }
        }
        let mut acc = self.zero();
        for (mx, cx) in xt.terms() {
            for (my, cy) in yt.terms() {
                let (xi, xids) = self.split_mono(mx)?;
                let (eta, yids) = self.split_mono(my)?;
                let a = xids[0];
                let b = yids[0];
                let c = cx.clone() * cy.clone();
                // coordinate fields commute, so the [x,y] term drops out
                let q_xi = xi.require_homogeneous("FN form factor")?.unwrap_or(0);
                let q_eta = eta.require_homogeneous("FN form factor")?.unwrap_or(0);

                // (xi ^ L_{@a} eta + (-1)^{|xi|} d xi ^ i_{@a} eta) (x) @b
                let l_eta = self.partial(a, &eta);
                let mut t2 = xi.mul(&l_eta)?;
                let mut dxi_ia = self.d(&xi).mul(&self.interior(&self.pd(a), &eta)?)?;
                if q_xi.rem_euclid(2) == 1 {
                    dxi_ia = dxi_ia.neg();
                }
                t2 = t2.add(&dxi_ia).mul(&self.pd(b))?;

                // (eta ^ L_{@b} xi + (-1)^{|eta|} d eta ^ i_{@b} xi) (x) @a
                let l_xi = self.partial(b, &xi);
                let mut t3 = eta.mul(&l_xi)?;
                let mut deta_ib = self.d(&eta).mul(&self.interior(&self.pd(b), &xi)?)?;
                if q_eta.rem_euclid(2) == 1 {
                    deta_ib = deta_ib.neg();
                }
                t3 = t3.add(&deta_ib).mul(&self.pd(a))?;
                if (q_xi * q_eta).rem_euclid(2) == 0 {
                    t3 = t3.neg();
                }

                acc = acc.add(&t2.add(&t3).scale(&c));
            }
        }
        Ok(acc)
    }

    /// Non-skew Dorfman bracket on `V^1 + Omega^*`:
    /// `[x+xi, y+eta] = [x,y] + L_x eta - i_y d xi`.
    pub fn dorfman(&self, a: &Generalized<S>, b: &Generalized<S>) -> Result<Generalized<S>> {
        let vector = self.lie_bracket(&a.vector, &b.vector)?;
        let form = self
            .lie_derivative(&a.vector, &b.form)?
            .sub(&self.interior(&b.vector, &self.d(&a.form))?);
        Ok(Generalized { vector, form })
    }

    /// Courant bracket, the skew-symmetrization of the Dorfman bracket:
    /// `[x,y] + L_x eta - L_y xi - 1/2 d(i_x eta - i_y xi)`.
    pub fn courant(&self, a: &Generalized<S>, b: &Generalized<S>) -> Result<Generalized<S>> {
        let vector = self.lie_bracket(&a.vector, &b.vector)?;
        let ix_eta = self.interior(&a.vector, &b.form)?;
        let iy_xi = self.interior(&b.vector, &a.form)?;
        let form = self
            .lie_derivative(&a.vector, &b.form)?
            .sub(&self.lie_derivative(&b.vector, &a.form)?)
            .sub(&self.d(&ix_eta.sub(&iy_xi)).scale(&S::half()));
        Ok(Generalized { vector, form })
    }

    /// Embeds a generalized section as the operator `i_x + e_xi`.
    pub fn embed_generalized(&self, a: &Generalized<S>) -> Result<Operator<S>> {
        self.embed(&a.vector)?.add(&self.op_mul(&a.form)?)
    }

    /// Splits a mixed element into vector and form parts; other bidegrees
    /// are rejected.
    pub fn split_generalized(&self, t: &GcaElement<S>) -> Result<Generalized<S>> {
        let mut vector = self.zero();
        let mut form = self.zero();
        for (m, c) in t.terms() {
            let piece = GcaElement::from_terms(&self.ctx, [(m.clone(), c.clone())]);
            match self.bidegree_mono(m) {
                (0, 1) => vector = vector.add(&piece),
                (_, 0) => form = form.add(&piece),
                _ => {
                    return Err(Error::BidegreeMismatch {
                        what: "generalized section".into(),
                        expected: "(0,1) or (q,0)".into(),
                    })
                }
            }
        }
        Ok(Generalized { vector, form })
    }

    // ------------------------------------------------------------------
    // samplers

    pub fn random_coeff(&self, rng: &mut Rng) -> S {
        let p = loop {
            let v = rng.int(-3, 3);
            if v != 0 {
                break v;
            }
        };
        let q = rng.int(1, 2);
        S::from_ratio(p, q)
    }

    pub fn random_poly(&self, rng: &mut Rng, max_deg: u32, terms: usize) -> GcaElement<S> {
        let mut acc = self.zero();
        for _ in 0..terms {
            let deg = rng.int(0, max_deg as i64) as u32;
            let mut factors: Vec<(GenId, u32)> = Vec::new();
            for _ in 0..deg {
                let a = rng.below(self.n);
                match factors.iter_mut().find(|(g, _)| *g == self.x[a]) {
                    Some((_, e)) => *e += 1,
                    None => factors.push((self.x[a], 1)),
                }
            }
            factors.sort_by_key(|&(g, _)| g);
            let c = self.random_coeff(rng);
            acc = acc.add(&GcaElement::monomial(&self.ctx, &factors, c));
        }
        acc
    }

    fn random_mixed_mono(&self, rng: &mut Rng, q: u32, p: u32, max_deg: u32) -> GcaElement<S> {
        let mut idx: Vec<usize> = (0..self.n).collect();
        // dx subset
        let mut dx_pick: Vec<usize> = Vec::new();
        while dx_pick.len() < q as usize {
            let a = idx[rng.below(idx.len())];
            if !dx_pick.contains(&a) {
                dx_pick.push(a);
            }
        }
        idx = (0..self.n).collect();
        let mut pd_pick: Vec<usize> = Vec::new();
        while pd_pick.len() < p as usize {
            let a = idx[rng.below(idx.len())];
            if !pd_pick.contains(&a) {
                pd_pick.push(a);
            }
        }
        let mut factors: Vec<(GenId, u32)> = Vec::new();
        for a in dx_pick {
            factors.push((self.dx[a], 1));
        }
        for a in pd_pick {
            factors.push((self.pd[a], 1));
        }
        factors.sort_by_key(|&(g, _)| g);
        let base = GcaElement::monomial(&self.ctx, &factors, S::one());
        let terms = 1 + rng.below(2);
        self.random_poly(rng, max_deg, terms).mul(&base).unwrap()
    }

    /// Random (q,p) tensor with polynomial coefficients.
    pub fn random_tensor(
        &self,
        rng: &mut Rng,
        q: u32,
        p: u32,
        max_deg: u32,
        terms: usize,
    ) -> GcaElement<S> {
        assert!(q as usize <= self.n && p as usize <= self.n);
        let mut acc = self.zero();
        for _ in 0..terms {
            acc = acc.add(&self.random_mixed_mono(rng, q, p, max_deg));
        }
        acc
    }

    pub fn random_form(&self, rng: &mut Rng, q: u32, max_deg: u32, terms: usize) -> GcaElement<S> {
        self.random_tensor(rng, q, 0, max_deg, terms)
    }

    pub fn random_multivector(
        &self,
        rng: &mut Rng,
        p: u32,
        max_deg: u32,
        terms: usize,
    ) -> GcaElement<S> {
        self.random_tensor(rng, 0, p, max_deg, terms)
    }

    pub fn random_vector_field(&self, rng: &mut Rng, max_deg: u32) -> GcaElement<S> {
        self.random_tensor(rng, 0, 1, max_deg, 2)
    }

    /// Random homogeneous element of the mixed algebra: a random bidegree
    /// with a couple of terms, used for Loday/Jacobi sampling.
    pub fn random_homogeneous(&self, rng: &mut Rng, max_deg: u32) -> GcaElement<S> {
        let q = rng.int(0, self.n as i64) as u32;
        let p = rng.int(0, self.n as i64) as u32;
        let terms = 1 + rng.below(2);
        self.random_tensor(rng, q, p, max_deg, terms)
    }
}
