//! Finite-dimensional Lie theory over the coefficient field via the big
//! bracket on Lambda(E + E*): the Chevalley-Eilenberg differential, the
//! algebraic Schouten bracket, the linear Poisson bracket on E*, and the
//! r-matrix / generalized classical Yang-Baxter computation.

use crate::error::{Error, Result};
use crate::gca::{
    BracketStructure, Context, Derivation, GcaElement, GenId, Generator, Symmetry,
};
use crate::operator::{ExtractionSpec, OpAlgebra, Operator};
use crate::rng::Rng;
use crate::scalar::{ExactScalar, Scalar};

/// Structure constants `[e_i, e_j] = sum_k C^k_ij e_k` (1-based indices).
pub type StructureConstants<S> = Vec<((usize, usize, usize), S)>;

/// A Lie algebra packaged as a linear-quadratic hamiltonian of Poisson
/// square zero inside Lambda(E + E*), with the canonical big bracket
/// `{e_i, eps_j} = delta_ij` of degree -2.
#[derive(Debug, Clone)]
pub struct LieAlgebra<S: ExactScalar> {
    dim: usize,
    ctx: Context,
    e: Vec<GenId>,
    eps: Vec<GenId>,
    big: BracketStructure<S>,
    mu: GcaElement<S>,
    constants: Vec<(usize, usize, usize, S)>,
    // E* with its linear Poisson structure, in the SN model
    estar_ctx: Context,
    eta: Vec<GenId>,
    estar_schouten: BracketStructure<S>,
    p_mu: GcaElement<S>,
    // operators on Lambda E*
    lam_ctx: Context,
    lam_eps: Vec<GenId>,
    lam_ops: OpAlgebra<S>,
}

impl<S: ExactScalar> LieAlgebra<S> {
    /// Builds the structure and verifies `{mu, mu} = 0` (equivalent to the
    /// Jacobi identity for the constants).
    pub fn new(dim: usize, constants: &StructureConstants<S>) -> Result<Self> {
        // eps before e: monomials store the form factor first, so the
        // operator embedding xi (x) x -> e_xi i_x is sign-free
        let mut gens = Vec::new();
        for i in 1..=dim {
            gens.push(Generator::new(format!("eps{i}"), 1));
        }
        for i in 1..=dim {
            gens.push(Generator::new(format!("e{i}"), 1));
        }
        let ctx = Context::new(format!("Lambda(E+E*) dim {dim}"), gens)?;
        let e: Vec<GenId> = (1..=dim)
            .map(|i| ctx.lookup(&format!("e{i}")).unwrap())
            .collect();
        let eps: Vec<GenId> = (1..=dim)
            .map(|i| ctx.lookup(&format!("eps{i}")).unwrap())
            .collect();
        let big = BracketStructure::new(
            &ctx,
            "big",
            -2,
            Symmetry::GradedSkew,
            (0..dim).map(|i| ((e[i], eps[i]), GcaElement::one(&ctx))),
        )?;

        let mut normalized: Vec<(usize, usize, usize, S)> = Vec::new();
        for ((k, i, j), c) in constants {
            let (k, i, j) = (*k, *i, *j);
            if i == j || i == 0 || j == 0 || k == 0 || i > dim || j > dim || k > dim {
                return Err(Error::UnsupportedShape(format!(
                    "structure constant C^{k}_{i}{j} out of range"
                )));
            }
            if i < j {
                normalized.push((k, i, j, c.clone()));
            } else {
                normalized.push((k, j, i, -c.clone()));
            }
        }

        // mu = 1/2 C^k_ij e_k eps^j eps^i = sum_{i<j} C^k_ij e_k eps^j eps^i
        let mut mu = GcaElement::zero(&ctx);
        for (k, i, j, c) in &normalized {
            let ek = GcaElement::generator(&ctx, e[*k - 1]);
            let ej = GcaElement::generator(&ctx, eps[*j - 1]);
            let ei = GcaElement::generator(&ctx, eps[*i - 1]);
            mu = mu.add(&ek.mul(&ej)?.mul(&ei)?.scale(c));
        }
        let sq = big.eval(&mu, &mu)?;
        if !sq.is_zero() {
            return Err(Error::NotJacobi {
                residual: sq.to_string(),
            });
        }

        // E* model: eta_i linear coordinates (even), etat^i their odd duals
        let mut egens = Vec::new();
        for i in 1..=dim {
            egens.push(Generator::new(format!("n{i}"), 0));
        }
        for i in 1..=dim {
            egens.push(Generator::new(format!("nt{i}"), 1));
        }
        let estar_ctx = Context::new(format!("PiT*E* dim {dim}"), egens)?;
        let eta: Vec<GenId> = (1..=dim)
            .map(|i| estar_ctx.lookup(&format!("n{i}")).unwrap())
            .collect();
        let etat: Vec<GenId> = (1..=dim)
            .map(|i| estar_ctx.lookup(&format!("nt{i}")).unwrap())
            .collect();
        let estar_schouten = BracketStructure::new(
            &estar_ctx,
            "schouten",
            -1,
            Symmetry::GradedSkew,
            (0..dim).map(|i| ((etat[i], eta[i]), GcaElement::one(&estar_ctx))),
        )?;
        // P_mu = 1/2 eta_k C^k_ij etat^j etat^i
        let mut p_mu = GcaElement::zero(&estar_ctx);
        for (k, i, j, c) in &normalized {
            let nk = GcaElement::generator(&estar_ctx, eta[*k - 1]);
            let nj = GcaElement::generator(&estar_ctx, etat[*j - 1]);
            let ni = GcaElement::generator(&estar_ctx, etat[*i - 1]);
            p_mu = p_mu.add(&nk.mul(&nj)?.mul(&ni)?.scale(c));
        }

        // Lambda E* with contractions i_{e_k} and differential d_mu
        let lam_gens = (1..=dim)
            .map(|i| Generator::new(format!("eps{i}"), 1))
            .collect();
        let lam_ctx = Context::new(format!("LambdaE* dim {dim}"), lam_gens)?;
        let lam_eps: Vec<GenId> = (1..=dim)
            .map(|i| lam_ctx.lookup(&format!("eps{i}")).unwrap())
            .collect();
        let mut contractions = Vec::new();
        for k in 0..dim {
            contractions.push(Derivation::new(
                &lam_ctx,
                format!("i_e{}", k + 1),
                -1,
                [(lam_eps[k], GcaElement::one(&lam_ctx))],
            )?);
        }
        // d_mu on Lambda E*: eps^k -> {mu, eps^k}, a pure eps-element
        let big_to_lam: Vec<GenId> = ctx
            .ids()
            .map(|id| {
                eps.iter()
                    .position(|&g| g == id)
                    .map(|i| lam_eps[i])
                    .unwrap_or(lam_eps.first().copied().unwrap_or(0))
            })
            .collect();
        let mut dmu_images = Vec::new();
        for k in 0..dim {
            let img = big.eval(&mu, &GcaElement::generator(&ctx, eps[k]))?;
            dmu_images.push((lam_eps[k], img.relabel(&lam_ctx, &big_to_lam)?));
        }
        let dmu = Derivation::new(&lam_ctx, "d_mu", 1, dmu_images)?;
        let lam_to_big: Vec<GenId> = (0..dim).map(|i| eps[i]).collect();
        let lam_ops = OpAlgebra::new(
            format!("End(LambdaE*) dim {dim}"),
            &lam_ctx,
            vec![],
            lam_eps.clone(),
            contractions,
            dmu,
            Some(ExtractionSpec {
                tensor_ctx: ctx.clone(),
                coeff_map: lam_to_big,
                duals: e.clone(),
            }),
        )?;

        Ok(LieAlgebra {
            dim,
            ctx,
            e,
            eps,
            big,
            mu,
            constants: normalized,
            estar_ctx,
            eta,
            estar_schouten,
            p_mu,
            lam_ctx,
            lam_eps,
            lam_ops,
        })
    }

    pub fn abelian(dim: usize) -> Result<Self> {
        Self::new(dim, &Vec::new())
    }

    /// `[e1,e2] = e3`.
    pub fn heisenberg() -> Result<Self> {
        Self::new(3, &vec![((3, 1, 2), S::one())])
    }

    /// `[h,e] = 2e, [h,f] = -2f, [e,f] = h` with `h = e1, e = e2, f = e3`.
    pub fn sl2() -> Result<Self> {
        Self::new(
            3,
            &vec![
                ((2, 1, 2), S::from_int(2)),
                ((3, 1, 3), S::from_int(-2)),
                ((1, 2, 3), S::one()),
            ],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn estar_context(&self) -> &Context {
        &self.estar_ctx
    }

    pub fn estar_schouten_structure(&self) -> &BracketStructure<S> {
        &self.estar_schouten
    }

    pub fn lambda_context(&self) -> &Context {
        &self.lam_ctx
    }

    pub fn lambda_operators(&self) -> &OpAlgebra<S> {
        &self.lam_ops
    }

    pub fn big_structure(&self) -> &BracketStructure<S> {
        &self.big
    }

    pub fn mu(&self) -> &GcaElement<S> {
        &self.mu
    }

    pub fn p_mu(&self) -> &GcaElement<S> {
        &self.p_mu
    }

    pub fn e(&self, i: usize) -> GcaElement<S> {
        GcaElement::generator(&self.ctx, self.e[i])
    }

    pub fn eps(&self, i: usize) -> GcaElement<S> {
        GcaElement::generator(&self.ctx, self.eps[i])
    }

    pub fn eta(&self, i: usize) -> GcaElement<S> {
        GcaElement::generator(&self.estar_ctx, self.eta[i])
    }

    /// The big bracket `{a, b}`.
    pub fn big_bracket(&self, a: &GcaElement<S>, b: &GcaElement<S>) -> Result<GcaElement<S>> {
        self.big.eval(a, b)
    }

    /// Chevalley-Eilenberg differential `d_mu c = {mu, c}`.
    pub fn ce_differential(&self, c: &GcaElement<S>) -> Result<GcaElement<S>> {
        self.big.eval(&self.mu, c)
    }

    /// Algebraic Schouten bracket `[x,y]_mu = {{x,mu},y}` on Lambda E.
    pub fn algebraic_schouten(
        &self,
        x: &GcaElement<S>,
        y: &GcaElement<S>,
    ) -> Result<GcaElement<S>> {
        self.big.eval(&self.big.eval(x, &self.mu)?, y)
    }

    pub fn in_lambda_e(&self, x: &GcaElement<S>) -> bool {
        x.terms()
            .all(|(m, _)| m.factors().iter().all(|(g, _)| self.e.contains(g)))
    }

    pub fn in_lambda_estar(&self, x: &GcaElement<S>) -> bool {
        x.terms()
            .all(|(m, _)| m.factors().iter().all(|(g, _)| self.eps.contains(g)))
    }

    /// Linear Poisson bracket on `E*` via the derived-bracket formula
    /// `{f,g}_mu = [[f, P_mu], g]` in the Schouten model on `E*`.
    pub fn linear_poisson(&self, f: &GcaElement<S>, g: &GcaElement<S>) -> Result<GcaElement<S>> {
        self.estar_schouten
            .eval(&self.estar_schouten.eval(f, &self.p_mu)?, g)
    }

    /// Independent partial-derivative form of the linear Poisson bracket:
    /// `{f,g} = sum C^k_ij (df/dn_i dg/dn_j - df/dn_j dg/dn_i) n_k` over
    /// `i < j`.
    pub fn linear_poisson_direct(
        &self,
        f: &GcaElement<S>,
        g: &GcaElement<S>,
    ) -> Result<GcaElement<S>> {
        let mut parts = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            parts.push(Derivation::new(
                &self.estar_ctx,
                format!("@/@n{}", i + 1),
                0,
                [(self.eta[i], GcaElement::one(&self.estar_ctx))],
            )?);
        }
        let mut acc = GcaElement::zero(&self.estar_ctx);
        for (k, i, j, c) in &self.constants {
            let fi = parts[*i - 1].apply(f)?;
            let gj = parts[*j - 1].apply(g)?;
            let fj = parts[*j - 1].apply(f)?;
            let gi = parts[*i - 1].apply(g)?;
            let etak = GcaElement::generator(&self.estar_ctx, self.eta[*k - 1]);
            let v = fi.mul(&gj)?.sub(&fj.mul(&gi)?).mul(&etak)?.scale(c);
            acc = acc.add(&v);
        }
        Ok(acc)
    }

    /// Embeds an element of Lambda(E + E*) as an operator on Lambda E*:
    /// `xi (x) x  ->  e_xi i_{x_1} ... i_{x_p}` on monomials.
    pub fn embed_lambda(&self, t: &GcaElement<S>) -> Result<Operator<S>> {
        let big_to_lam: Vec<GenId> = self
            .ctx
            .ids()
            .map(|id| {
                self.eps
                    .iter()
                    .position(|&g| g == id)
                    .map(|i| self.lam_eps[i])
                    .unwrap_or(self.lam_eps.first().copied().unwrap_or(0))
            })
            .collect();
        let mut acc = Operator::zero(&self.lam_ops);
        for (m, c) in t.terms() {
            let mut form_factors: Vec<(GenId, u32)> = Vec::new();
            let mut vec_ids: Vec<usize> = Vec::new();
            for &(g, e) in m.factors() {
                if let Some(i) = self.e.iter().position(|&x| x == g) {
                    vec_ids.push(i);
                } else {
                    form_factors.push((g, e));
                }
            }
            let xi = GcaElement::monomial(&self.ctx, &form_factors, S::one())
                .relabel(&self.lam_ctx, &big_to_lam)?;
            let mut op = Operator::mul(&self.lam_ops, &xi)?;
            for i in vec_ids {
                op = op.compose(&Operator::contract(&self.lam_ops, i))?;
            }
            acc = acc.add(&op.scale(c))?;
        }
        Ok(acc)
    }

    /// Direct triple-sum Jacobi residuals of the raw structure constants,
    /// independent of the big-bracket machinery.
    pub fn classical_jacobi_residuals(&self) -> Vec<((usize, usize, usize, usize), S)> {
        let c = |k: usize, i: usize, j: usize| -> S {
            if i == j {
                return S::zero();
            }
            for (kk, ii, jj, v) in &self.constants {
                if *kk == k && *ii == i.min(j) && *jj == i.max(j) {
                    return if i < j { v.clone() } else { -v.clone() };
                }
            }
            S::zero()
        };
        let mut bad = Vec::new();
        for i in 1..=self.dim {
            for j in (i + 1)..=self.dim {
                for k in (j + 1)..=self.dim {
                    for l in 1..=self.dim {
                        let mut s = S::zero();
                        for m in 1..=self.dim {
                            s = s + c(m, i, j) * c(l, m, k)
                                + c(m, j, k) * c(l, m, i)
                                + c(m, k, i) * c(l, m, j);
                        }
                        if !s.is_zero() {
                            bad.push(((i, j, k, l), s));
                        }
                    }
                }
            }
        }
        bad
    }

    /// The r-matrix computation: the algebraic Schouten square
    /// `[r,r]_mu = {{r,mu},r}`, its ad-invariance `{mu, [r,r]_mu}`, and the
    /// coboundary chain `{d_mu r, d_mu r} = d_mu [r,r]_mu`.
    pub fn gcybe_check(&self, r: &GcaElement<S>) -> Result<GcybeReport<S>> {
        let is_bivector = self.in_lambda_e(r)
            && r.terms()
                .all(|(m, _)| m.factors().iter().map(|&(_, e)| e).sum::<u32>() == 2);
        if !is_bivector {
            return Err(Error::BidegreeMismatch {
                what: "r-matrix".into(),
                expected: "Lambda^2 E".into(),
            });
        }
        let schouten_square = self.algebraic_schouten(r, r)?;
        let coboundary = self.ce_differential(r)?;
        let chain_lhs = self.big.eval(&coboundary, &coboundary)?;
        let chain_rhs = self.ce_differential(&schouten_square)?;
        let invariance = self.big.eval(&self.mu, &schouten_square)?;
        Ok(GcybeReport {
            drinfeld: schouten_square.scale(&(-S::half())),
            chain_holds: chain_lhs == chain_rhs,
            ad_invariant: invariance.is_zero(),
            schouten_square,
            coboundary,
            invariance,
        })
    }

    /// Random homogeneous element of bidegree `(p, q)` in
    /// `Lambda^p E (x) Lambda^q E*`.
    pub fn random_bidegree(&self, rng: &mut Rng, p: u32, q: u32, terms: usize) -> GcaElement<S> {
        assert!(p as usize <= self.dim && q as usize <= self.dim);
        let mut acc = GcaElement::zero(&self.ctx);
        for _ in 0..terms {
            let mut factors: Vec<(GenId, u32)> = Vec::new();
            for (pool, count) in [(&self.e, p), (&self.eps, q)] {
                let mut chosen: Vec<GenId> = Vec::new();
                while (chosen.len() as u32) < count {
                    let g = pool[rng.below(pool.len())];
                    if !chosen.contains(&g) {
                        chosen.push(g);
                    }
                }
                for g in chosen {
                    factors.push((g, 1));
                }
            }
            factors.sort_by_key(|&(g, _)| g);
            let num = loop {
                let v = rng.int(-3, 3);
                if v != 0 {
                    break v;
                }
            };
            let c = S::from_ratio(num, rng.int(1, 2));
            acc = acc.add(&GcaElement::monomial(&self.ctx, &factors, c));
        }
        acc
    }
}

/// Result of [`LieAlgebra::gcybe_check`].
#[derive(Debug, Clone)]
pub struct GcybeReport<S: Scalar> {
    /// `[r,r]_mu`.
    pub schouten_square: GcaElement<S>,
    /// Drinfeld bracket `<r,r> = -1/2 [r,r]_mu`.
    pub drinfeld: GcaElement<S>,
    /// `d_mu r`.
    pub coboundary: GcaElement<S>,
    /// whether `{d_mu r, d_mu r} = d_mu [r,r]_mu`.
    pub chain_holds: bool,
    /// `{mu, [r,r]_mu}`.
    pub invariance: GcaElement<S>,
    pub ad_invariant: bool,
}
