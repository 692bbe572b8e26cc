//! Lie algebroids over polynomial bases in local coordinates: construction
//! from anchor components and structure functions, the three equivalent
//! structures (quadratic hamiltonian H on T*(Pi A*), homological vector
//! field Q on Pi A, linear Poisson bivector P on A*), the derived-bracket
//! identities, and the Koszul bracket of a Poisson manifold.

use crate::cartan::Manifold;
use crate::error::{Error, Result};
use crate::gca::{
    BracketStructure, Context, Derivation, GcaElement, GenId, Generator, Symmetry,
};
use crate::operator::{ExtractionSpec, OpAlgebra, Operator};
use crate::rng::Rng;
use crate::scalar::ExactScalar;

/// Anchor components `a_i^alpha(x)` and structure functions `C^k_ij(x)`
/// over a polynomial base; entries are elements of [`Algebroid::base_context`].
pub struct AlgebroidSpec<S: ExactScalar> {
    pub base_dim: usize,
    pub rank: usize,
    /// `(i, alpha) -> a_i^alpha`, 1-based.
    pub anchor: Vec<((usize, usize), GcaElement<S>)>,
    /// `(k, i, j) -> C^k_ij` with `i != j`, 1-based; both orientations are
    /// accepted and antisymmetrized.
    pub structure: Vec<((usize, usize, usize), GcaElement<S>)>,
}

#[derive(Debug, Clone)]
pub struct Algebroid<S: ExactScalar> {
    base_dim: usize,
    rank: usize,
    anchor: Vec<Vec<GcaElement<S>>>, // [i][alpha] on the base context
    structure: Vec<Vec<Vec<GcaElement<S>>>>, // [k][i][j], antisymmetric
    // T*(Pi A*) with the canonical degree -2 bracket
    tstar_ctx: Context,
    ts_x: Vec<GenId>,
    ts_et: Vec<GenId>,
    tstar: BracketStructure<S>,
    h: GcaElement<S>,
    hh: GcaElement<S>,
    // sections bracket on Gamma(Lambda A), tabulated directly from (a, C)
    sections: BracketStructure<S>,
    // Pi A with the homological vector field
    pia_ctx: Context,
    pa_x: Vec<GenId>,
    pa_yt: Vec<GenId>,
    q: Derivation<S>,
    pia_ops: OpAlgebra<S>,
    // Pi T*(A*) with the canonical Schouten structure and the bivector P
    astar_ctx: Context,
    as_x: Vec<GenId>,
    as_n: Vec<GenId>,
    astar_schouten: BracketStructure<S>,
    p_biv: GcaElement<S>,
    pp: GcaElement<S>,
    valid: bool,
}

impl<S: ExactScalar> Algebroid<S> {
    /// The base coordinate ring `Q[x1..xm]`, where anchor and structure
    /// entries live.
    pub fn base_context(base_dim: usize) -> Context {
        let gens = (1..=base_dim)
            .map(|a| Generator::new(format!("x{a}"), 0))
            .collect();
        Context::new(format!("base R{base_dim}"), gens).expect("fresh names")
    }

    /// Builds the candidate structure and verifies `{H,H} = 0`.
    pub fn new(spec: AlgebroidSpec<S>) -> Result<Self> {
        let a = Self::candidate(spec)?;
        if !a.valid {
            return Err(Error::NotAlgebroid {
                residual: a.hh.to_string(),
            });
        }
        Ok(a)
    }

    /// Builds the structure without rejecting Jacobi failures; `valid()`
    /// reports the verdict and `hh_residual()` the obstruction.
    pub fn candidate(spec: AlgebroidSpec<S>) -> Result<Self> {
        let m = spec.base_dim;
        let r = spec.rank;
        let base_ctx = Self::base_context(m);

        let zero = GcaElement::zero(&base_ctx);
        let mut anchor = vec![vec![zero.clone(); m]; r];
        for ((i, al), v) in &spec.anchor {
            if *i == 0 || *i > r || *al == 0 || *al > m {
                return Err(Error::UnsupportedShape(format!(
                    "anchor entry a_{i}^{al} out of range"
                )));
            }
            base_ctx.check_same(v.context())?;
            anchor[*i - 1][*al - 1] = anchor[*i - 1][*al - 1].add(v);
        }
        let mut structure = vec![vec![vec![zero.clone(); r]; r]; r];
        for ((k, i, j), v) in &spec.structure {
            if *k == 0 || *k > r || *i == 0 || *i > r || *j == 0 || *j > r || i == j {
                return Err(Error::UnsupportedShape(format!(
                    "structure entry C^{k}_{i}{j} out of range"
                )));
            }
            base_ctx.check_same(v.context())?;
            structure[*k - 1][*i - 1][*j - 1] =
                structure[*k - 1][*i - 1][*j - 1].add(v);
            structure[*k - 1][*j - 1][*i - 1] =
                structure[*k - 1][*j - 1][*i - 1].sub(v);
        }

        // T*(Pi A*)
        let mut gens = Vec::new();
        for a in 1..=m {
            gens.push(Generator::new(format!("x{a}"), 0));
        }
        for a in 1..=m {
            gens.push(Generator::new(format!("p{a}"), 2));
        }
        for i in 1..=r {
            gens.push(Generator::new(format!("et{i}"), 1));
        }
        for i in 1..=r {
            gens.push(Generator::new(format!("th{i}"), 1));
        }
        let tstar_ctx = Context::new(format!("T*(PiA*) {m}|{r}"), gens)?;
        let ts_x: Vec<GenId> = (1..=m)
            .map(|a| tstar_ctx.lookup(&format!("x{a}")).unwrap())
            .collect();
        let ts_p: Vec<GenId> = (1..=m)
            .map(|a| tstar_ctx.lookup(&format!("p{a}")).unwrap())
            .collect();
        let ts_et: Vec<GenId> = (1..=r)
            .map(|i| tstar_ctx.lookup(&format!("et{i}")).unwrap())
            .collect();
        let ts_th: Vec<GenId> = (1..=r)
            .map(|i| tstar_ctx.lookup(&format!("th{i}")).unwrap())
            .collect();
        let mut table = Vec::new();
        for a in 0..m {
            table.push(((ts_x[a], ts_p[a]), GcaElement::one(&tstar_ctx)));
        }
        for i in 0..r {
            table.push(((ts_et[i], ts_th[i]), GcaElement::one(&tstar_ctx)));
        }
        let tstar = BracketStructure::new(&tstar_ctx, "canonical", -2, Symmetry::GradedSkew, table)?;

        let base_to_tstar: Vec<GenId> = (0..m).map(|a| ts_x[a]).collect();
        // H = -a_i^alpha p_alpha th^i + 1/2 et_k C^k_ij th^j th^i
        let mut h = GcaElement::zero(&tstar_ctx);
        for i in 0..r {
            for al in 0..m {
                let coeff = anchor[i][al].transfer(&tstar_ctx, &base_to_tstar)?;
                let pth = GcaElement::generator(&tstar_ctx, ts_p[al])
                    .mul(&GcaElement::generator(&tstar_ctx, ts_th[i]))?;
                h = h.sub(&coeff.mul(&pth)?);
            }
        }
        for k in 0..r {
            for i in 0..r {
                for j in (i + 1)..r {
                    let coeff = structure[k][i][j].transfer(&tstar_ctx, &base_to_tstar)?;
                    let v = GcaElement::generator(&tstar_ctx, ts_et[k])
                        .mul(&GcaElement::generator(&tstar_ctx, ts_th[j]))?
                        .mul(&GcaElement::generator(&tstar_ctx, ts_th[i]))?;
                    h = h.add(&coeff.mul(&v)?);
                }
            }
        }
        let hh = tstar.eval(&h, &h)?;
        let valid = hh.is_zero();

        // sections bracket on Gamma(Lambda A): {et_i, x^a} = a_i^a,
        // {et_i, et_j} = C^k_ij et_k, degree -1, graded skew
        let mut sec_table = Vec::new();
        for i in 0..r {
            for al in 0..m {
                let v = anchor[i][al].transfer(&tstar_ctx, &base_to_tstar)?;
                sec_table.push(((ts_et[i], ts_x[al]), v));
            }
            for j in (i + 1)..r {
                let mut v = GcaElement::zero(&tstar_ctx);
                for k in 0..r {
                    let c = structure[k][i][j].transfer(&tstar_ctx, &base_to_tstar)?;
                    v = v.add(&c.mul(&GcaElement::generator(&tstar_ctx, ts_et[k]))?);
                }
                sec_table.push(((ts_et[i], ts_et[j]), v));
            }
        }
        let sections =
            BracketStructure::new(&tstar_ctx, "sections", -1, Symmetry::GradedSkew, sec_table)?;

        // Pi A with Q
        let mut gens = Vec::new();
        for a in 1..=m {
            gens.push(Generator::new(format!("x{a}"), 0));
        }
        for i in 1..=r {
            gens.push(Generator::new(format!("yt{i}"), 1));
        }
        let pia_ctx = Context::new(format!("PiA {m}|{r}"), gens)?;
        let pa_x: Vec<GenId> = (1..=m)
            .map(|a| pia_ctx.lookup(&format!("x{a}")).unwrap())
            .collect();
        let pa_yt: Vec<GenId> = (1..=r)
            .map(|i| pia_ctx.lookup(&format!("yt{i}")).unwrap())
            .collect();
        let base_to_pia: Vec<GenId> = (0..m).map(|a| pa_x[a]).collect();
        let mut q_images = Vec::new();
        for al in 0..m {
            let mut img = GcaElement::zero(&pia_ctx);
            for i in 0..r {
                let coeff = anchor[i][al].transfer(&pia_ctx, &base_to_pia)?;
                img = img.add(&coeff.mul(&GcaElement::generator(&pia_ctx, pa_yt[i]))?);
            }
            q_images.push((pa_x[al], img));
        }
        for k in 0..r {
            let mut img = GcaElement::zero(&pia_ctx);
            for i in 0..r {
                for j in (i + 1)..r {
                    let coeff = structure[k][i][j].transfer(&pia_ctx, &base_to_pia)?;
                    let v = GcaElement::generator(&pia_ctx, pa_yt[j])
                        .mul(&GcaElement::generator(&pia_ctx, pa_yt[i]))?;
                    img = img.add(&coeff.mul(&v)?);
                }
            }
            q_images.push((pa_yt[k], img));
        }
        let q = Derivation::new(&pia_ctx, "Q", 1, q_images)?;

        let mut contractions = Vec::new();
        for i in 0..r {
            contractions.push(Derivation::new(
                &pia_ctx,
                format!("i_e{}", i + 1),
                -1,
                [(pa_yt[i], GcaElement::one(&pia_ctx))],
            )?);
        }
        let mut pia_to_tstar: Vec<GenId> = Vec::new();
        for id in pia_ctx.ids() {
            if let Some(a) = pa_x.iter().position(|&g| g == id) {
                pia_to_tstar.push(ts_x[a]);
            } else {
                let i = pa_yt.iter().position(|&g| g == id).unwrap();
                pia_to_tstar.push(ts_th[i]);
            }
        }
        let pia_ops = OpAlgebra::new(
            format!("End(Gamma Lambda A*) {m}|{r}"),
            &pia_ctx,
            pa_x.clone(),
            pa_yt.clone(),
            contractions,
            q.clone(),
            Some(ExtractionSpec {
                tensor_ctx: tstar_ctx.clone(),
                coeff_map: pia_to_tstar,
                duals: ts_et.clone(),
            }),
        )?;

        // Pi T*(A*) with P
        let mut gens = Vec::new();
        for a in 1..=m {
            gens.push(Generator::new(format!("x{a}"), 0));
        }
        for i in 1..=r {
            gens.push(Generator::new(format!("n{i}"), 0));
        }
        for a in 1..=m {
            gens.push(Generator::new(format!("xt{a}"), 1));
        }
        for i in 1..=r {
            gens.push(Generator::new(format!("nt{i}"), 1));
        }
        let astar_ctx = Context::new(format!("PiT*(A*) {m}|{r}"), gens)?;
        let as_x: Vec<GenId> = (1..=m)
            .map(|a| astar_ctx.lookup(&format!("x{a}")).unwrap())
            .collect();
        let as_n: Vec<GenId> = (1..=r)
            .map(|i| astar_ctx.lookup(&format!("n{i}")).unwrap())
            .collect();
        let as_xt: Vec<GenId> = (1..=m)
            .map(|a| astar_ctx.lookup(&format!("xt{a}")).unwrap())
            .collect();
        let as_nt: Vec<GenId> = (1..=r)
            .map(|i| astar_ctx.lookup(&format!("nt{i}")).unwrap())
            .collect();
        let mut table = Vec::new();
        for a in 0..m {
            table.push(((as_xt[a], as_x[a]), GcaElement::one(&astar_ctx)));
        }
        for i in 0..r {
            table.push(((as_nt[i], as_n[i]), GcaElement::one(&astar_ctx)));
        }
        let astar_schouten =
            BracketStructure::new(&astar_ctx, "schouten", -1, Symmetry::GradedSkew, table)?;
        let base_to_astar: Vec<GenId> = (0..m).map(|a| as_x[a]).collect();
        // P = a_i^alpha xt_alpha nt^i + 1/2 n_k C^k_ij nt^j nt^i
        let mut p_biv = GcaElement::zero(&astar_ctx);
        for i in 0..r {
            for al in 0..m {
                let coeff = anchor[i][al].transfer(&astar_ctx, &base_to_astar)?;
                let v = GcaElement::generator(&astar_ctx, as_xt[al])
                    .mul(&GcaElement::generator(&astar_ctx, as_nt[i]))?;
                p_biv = p_biv.add(&coeff.mul(&v)?);
            }
        }
        for k in 0..r {
            for i in 0..r {
                for j in (i + 1)..r {
                    let coeff = structure[k][i][j].transfer(&astar_ctx, &base_to_astar)?;
                    let v = GcaElement::generator(&astar_ctx, as_n[k])
                        .mul(&GcaElement::generator(&astar_ctx, as_nt[j]))?
                        .mul(&GcaElement::generator(&astar_ctx, as_nt[i]))?;
                    p_biv = p_biv.add(&coeff.mul(&v)?);
                }
            }
        }
        let pp = astar_schouten.eval(&p_biv, &p_biv)?;

        Ok(Algebroid {
            base_dim: m,
            rank: r,
            anchor,
            structure,
            tstar_ctx,
            ts_x,
            ts_et,
            tstar,
            h,
            hh,
            sections,
            pia_ctx,
            pa_x,
            pa_yt,
            q,
            pia_ops,
            astar_ctx,
            as_x,
            as_n,
            astar_schouten,
            p_biv,
            pp,
            valid,
        })
    }

    /// Tangent algebroid of `R^m`: identity anchor, zero structure functions.
    pub fn tangent(m: usize) -> Result<Self> {
        let base = Self::base_context(m);
        let anchor = (1..=m)
            .map(|i| ((i, i), GcaElement::one(&base)))
            .collect();
        Self::new(AlgebroidSpec {
            base_dim: m,
            rank: m,
            anchor,
            structure: Vec::new(),
        })
    }

    /// Point-base Lie algebra with constant structure constants.
    pub fn point(rank: usize, constants: &[((usize, usize, usize), S)]) -> Result<Self> {
        let base = Self::base_context(0);
        let structure = constants
            .iter()
            .map(|((k, i, j), c)| {
                ((*k, *i, *j), GcaElement::constant(&base, c.clone()))
            })
            .collect();
        Self::new(AlgebroidSpec {
            base_dim: 0,
            rank,
            anchor: Vec::new(),
            structure,
        })
    }

    /// Cotangent algebroid of a Poisson bivector on a polynomial chart:
    /// frame `dx^alpha`, anchor `P#`, structure functions from the Koszul
    /// bracket of exact forms, `C^g_ab = d_g {x^a, x^b}_P`.
    pub fn cotangent(man: &Manifold<S>, p: &GcaElement<S>) -> Result<Self> {
        let m = man.dim();
        let pp = man.schouten(p, p)?;
        if !pp.is_zero() {
            return Err(Error::NotPoisson {
                residual: pp.to_string(),
            });
        }
        let base = Self::base_context(m);
        let man_to_base: Vec<GenId> = man
            .context()
            .ids()
            .map(|id| {
                // only x-generators occur in the transferred polynomials
                let name = &man.context().generator(id).name;
                base.lookup(name).unwrap_or(0)
            })
            .collect();
        let mut anchor = Vec::new();
        let mut structure = Vec::new();
        for al in 1..=m {
            // P# dx^al = i_{dx^al} P, components on @_b
            let sharp = man.sharp(p, al - 1)?;
            for b in 1..=m {
                let comp = man.interior(&sharp, &man.dx(b - 1))?;
                if !comp.is_zero() {
                    anchor.push(((al, b), comp.transfer(&base, &man_to_base)?));
                }
            }
            for be in (al + 1)..=m {
                // {x^al, x^be}_P = rho(dx^al) x^be
                let f = man.interior(&sharp, &man.dx(be - 1))?;
                for g in 1..=m {
                    let c = man.partial(g - 1, &f);
                    if !c.is_zero() {
                        structure.push(((g, al, be), c.transfer(&base, &man_to_base)?));
                    }
                }
            }
        }
        Self::new(AlgebroidSpec {
            base_dim: m,
            rank: m,
            anchor,
            structure,
        })
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn valid(&self) -> bool {
        self.valid
    }

    pub fn hamiltonian(&self) -> &GcaElement<S> {
        &self.h
    }

    /// `{H, H}`; zero iff the candidate is a Lie algebroid.
    pub fn hh_residual(&self) -> &GcaElement<S> {
        &self.hh
    }

    pub fn homological_field(&self) -> &Derivation<S> {
        &self.q
    }

    /// `Q(Q(g))` residuals on generators; empty iff `Q^2 = 0`.
    pub fn q_square_residuals(&self) -> Vec<GcaElement<S>> {
        self.q
            .square_residuals()
            .expect("total derivation")
            .into_iter()
            .map(|(_, v)| v)
            .collect()
    }

    pub fn bivector(&self) -> &GcaElement<S> {
        &self.p_biv
    }

    /// `[P, P]` in the Schouten model on `A*`.
    pub fn pp_residual(&self) -> &GcaElement<S> {
        &self.pp
    }

    pub fn tstar_context(&self) -> &Context {
        &self.tstar_ctx
    }

    pub fn tstar_structure(&self) -> &BracketStructure<S> {
        &self.tstar
    }

    pub fn pia_context(&self) -> &Context {
        &self.pia_ctx
    }

    pub fn pia_operators(&self) -> &OpAlgebra<S> {
        &self.pia_ops
    }

    pub fn astar_context(&self) -> &Context {
        &self.astar_ctx
    }

    /// Frame section `e_i` as an element of `Gamma(Lambda A)`.
    pub fn frame(&self, i: usize) -> GcaElement<S> {
        GcaElement::generator(&self.tstar_ctx, self.ts_et[i])
    }

    /// Base coordinate as a fiber-constant function on `T*(Pi A*)`.
    pub fn coordinate(&self, a: usize) -> GcaElement<S> {
        GcaElement::generator(&self.tstar_ctx, self.ts_x[a])
    }

    /// Fiber coordinate `eta_i` on `A*`.
    pub fn eta(&self, i: usize) -> GcaElement<S> {
        GcaElement::generator(&self.astar_ctx, self.as_n[i])
    }

    pub fn astar_coordinate(&self, a: usize) -> GcaElement<S> {
        GcaElement::generator(&self.astar_ctx, self.as_x[a])
    }

    /// Is the element a section-algebra element (no momenta)?
    pub fn in_sections(&self, u: &GcaElement<S>) -> bool {
        u.terms().all(|(mn, _)| {
            mn.factors()
                .iter()
                .all(|(g, _)| self.ts_x.contains(g) || self.ts_et.contains(g))
        })
    }

    /// `[u,v]_A = {{u, H}, v}`: the Schouten bracket of `Gamma(Lambda A)` as
    /// a derived bracket of the canonical bracket on `T*(Pi A*)`.
    pub fn lahamilt(&self, u: &GcaElement<S>, v: &GcaElement<S>) -> Result<GcaElement<S>> {
        self.tstar.eval(&self.tstar.eval(u, &self.h)?, v)
    }

    /// The same bracket tabulated directly from the structure functions.
    pub fn sections_bracket(&self, u: &GcaElement<S>, v: &GcaElement<S>) -> Result<GcaElement<S>> {
        self.sections.eval(u, v)
    }

    /// `i_{[u,v]_A} = [[i_u, d_A], i_v]`: the operator route, extracted back
    /// to a section.
    pub fn laend(&self, u: &GcaElement<S>, v: &GcaElement<S>) -> Result<GcaElement<S>> {
        let iu = self.embed_section(u)?;
        let iv = self.embed_section(v)?;
        let d = Operator::diff(&self.pia_ops);
        iu.commutator(&d)?.commutator(&iv)?.extract_interior()
    }

    /// Embeds `u` in `Gamma(Lambda A)` as the interior operator on
    /// `Gamma(Lambda A*)`.
    pub fn embed_section(&self, u: &GcaElement<S>) -> Result<Operator<S>> {
        if !self.in_sections(u) {
            return Err(Error::BidegreeMismatch {
                what: "section".into(),
                expected: "polynomial in x, et".into(),
            });
        }
        let tstar_to_pia: Vec<GenId> = self
            .tstar_ctx
            .ids()
            .map(|id| {
                self.ts_x
                    .iter()
                    .position(|&g| g == id)
                    .map(|a| self.pa_x[a])
                    .unwrap_or(self.pa_x.first().copied().unwrap_or(0))
            })
            .collect();
        let mut acc = Operator::zero(&self.pia_ops);
        for (mn, c) in u.terms() {
            let mut coeff_factors: Vec<(GenId, u32)> = Vec::new();
            let mut frames: Vec<usize> = Vec::new();
            for &(g, e) in mn.factors() {
                if let Some(i) = self.ts_et.iter().position(|&x| x == g) {
                    frames.push(i);
                } else {
                    coeff_factors.push((g, e));
                }
            }
            let coeff = GcaElement::monomial(&self.tstar_ctx, &coeff_factors, S::one())
                .relabel(&self.pia_ctx, &tstar_to_pia)?;
            let mut op = Operator::mul(&self.pia_ops, &coeff)?;
            for i in frames {
                op = op.compose(&Operator::contract(&self.pia_ops, i))?;
            }
            acc = acc.add(&op.scale(c))?;
        }
        Ok(acc)
    }

    /// Anchor action `rho(u) f` for `u in Gamma A` and a base function `f`
    /// (both as fiber-constant elements of the tstar context).
    pub fn anchor_apply(&self, u: &GcaElement<S>, f: &GcaElement<S>) -> Result<GcaElement<S>> {
        let base_to_tstar: Vec<GenId> = (0..self.base_dim).map(|a| self.ts_x[a]).collect();
        let mut parts = Vec::new();
        for a in 0..self.base_dim {
            parts.push(Derivation::new(
                &self.tstar_ctx,
                format!("@/@x{}", a + 1),
                0,
                [(self.ts_x[a], GcaElement::one(&self.tstar_ctx))],
            )?);
        }
        let mut acc = GcaElement::zero(&self.tstar_ctx);
        for i in 0..self.rank {
            // u^i = i-th frame coefficient
            let ui = self.frame_coefficient(u, i)?;
            for al in 0..self.base_dim {
                let a_ia = self.anchor[i][al].transfer(&self.tstar_ctx, &base_to_tstar)?;
                acc = acc.add(&ui.mul(&a_ia)?.mul(&parts[al].apply(f)?)?);
            }
        }
        Ok(acc)
    }

    fn frame_coefficient(&self, u: &GcaElement<S>, i: usize) -> Result<GcaElement<S>> {
        // contraction dual to et_i inside the tstar context
        let d = Derivation::new(
            &self.tstar_ctx,
            format!("@/@et{}", i + 1),
            -1,
            [(self.ts_et[i], GcaElement::one(&self.tstar_ctx))],
        )?;
        d.apply(u)
    }

    /// Linear Poisson bracket on `A*`: `{f,g}_A = [[f, P], g]` in the
    /// Schouten model.
    pub fn labiv(&self, f: &GcaElement<S>, g: &GcaElement<S>) -> Result<GcaElement<S>> {
        self.astar_schouten
            .eval(&self.astar_schouten.eval(f, &self.p_biv)?, g)
    }

    /// Independent partial-derivative evaluation of the `A*` Poisson
    /// bracket from the raw structure functions.
    pub fn labiv_direct(&self, f: &GcaElement<S>, g: &GcaElement<S>) -> Result<GcaElement<S>> {
        let base_to_astar: Vec<GenId> = (0..self.base_dim).map(|a| self.as_x[a]).collect();
        let mut dx = Vec::new();
        for a in 0..self.base_dim {
            dx.push(Derivation::new(
                &self.astar_ctx,
                format!("@/@x{}", a + 1),
                0,
                [(self.as_x[a], GcaElement::one(&self.astar_ctx))],
            )?);
        }
        let mut dn = Vec::new();
        for i in 0..self.rank {
            dn.push(Derivation::new(
                &self.astar_ctx,
                format!("@/@n{}", i + 1),
                0,
                [(self.as_n[i], GcaElement::one(&self.astar_ctx))],
            )?);
        }
        let mut acc = GcaElement::zero(&self.astar_ctx);
        // rho terms: sum_i (df/dn_i rho_i(g) - rho_i(f) dg/dn_i)
        for i in 0..self.rank {
            for al in 0..self.base_dim {
                let a_ia = self.anchor[i][al].transfer(&self.astar_ctx, &base_to_astar)?;
                let t = dn[i]
                    .apply(f)?
                    .mul(&dx[al].apply(g)?)?
                    .sub(&dx[al].apply(f)?.mul(&dn[i].apply(g)?)?);
                acc = acc.add(&a_ia.mul(&t)?);
            }
        }
        // C terms: sum_{i<j} C^k_ij n_k (df/dn_i dg/dn_j - df/dn_j dg/dn_i)
        for k in 0..self.rank {
            for i in 0..self.rank {
                for j in (i + 1)..self.rank {
                    let c = self.structure[k][i][j].transfer(&self.astar_ctx, &base_to_astar)?;
                    if c.is_zero() {
                        continue;
                    }
                    let nk = GcaElement::generator(&self.astar_ctx, self.as_n[k]);
                    let t = dn[i]
                        .apply(f)?
                        .mul(&dn[j].apply(g)?)?
                        .sub(&dn[j].apply(f)?.mul(&dn[i].apply(g)?)?);
                    acc = acc.add(&c.mul(&nk)?.mul(&t)?);
                }
            }
        }
        Ok(acc)
    }

    /// Applies the Lie algebroid differential to a form in
    /// `Gamma(Lambda A*)` (an element of the PiA context).
    pub fn differential(&self, c: &GcaElement<S>) -> Result<GcaElement<S>> {
        self.q.apply(c)
    }

    pub fn pia_coordinate(&self, a: usize) -> GcaElement<S> {
        GcaElement::generator(&self.pia_ctx, self.pa_x[a])
    }

    pub fn pia_form(&self, i: usize) -> GcaElement<S> {
        GcaElement::generator(&self.pia_ctx, self.pa_yt[i])
    }

    /// Frolicher-Nijenhuis bracket of `A`-vector-valued forms, given as
    /// component vectors over the frame, via the algebroid version of the
    /// decomposable formula.
    pub fn fn_bracket(
        &self,
        xt: &[GcaElement<S>],
        yt: &[GcaElement<S>],
    ) -> Result<Vec<GcaElement<S>>> {
        assert_eq!(xt.len(), self.rank);
        assert_eq!(yt.len(), self.rank);
        let base_to_pia: Vec<GenId> = (0..self.base_dim).map(|a| self.pa_x[a]).collect();
        let mut out = vec![GcaElement::zero(&self.pia_ctx); self.rank];
        for i in 0..self.rank {
            for j in 0..self.rank {
                let xi = &xt[i];
                let eta = &yt[j];
                if xi.is_zero() || eta.is_zero() {
                    continue;
                }
                let q_xi = xi.require_homogeneous("FN component")?.unwrap_or(0);
                let q_eta = eta.require_homogeneous("FN component")?.unwrap_or(0);
                // xi ^ eta (x) [e_i, e_j]
                for k in 0..self.rank {
                    let c = self.structure[k][i][j].transfer(&self.pia_ctx, &base_to_pia)?;
                    if !c.is_zero() {
                        out[k] = out[k].add(&xi.mul(eta)?.mul(&c)?);
                    }
                }
                // (xi ^ L_{e_i} eta + (-1)^{|xi|} Q xi ^ i_{e_i} eta) (x) e_j
                let l_eta = self.lie_derivative_frame(i, eta)?;
                let mut t2 = xi.mul(&l_eta)?;
                let mut aux = self
                    .differential(xi)?
                    .mul(&self.contract_frame(i, eta)?)?;
                if q_xi.rem_euclid(2) == 1 {
                    aux = aux.neg();
                }
                t2 = t2.add(&aux);
                out[j] = out[j].add(&t2);
                // -(-1)^{|xi||eta|}(eta ^ L_{e_j} xi + (-1)^{|eta|} Q eta ^ i_{e_j} xi) (x) e_i
                let l_xi = self.lie_derivative_frame(j, xi)?;
                let mut t3 = eta.mul(&l_xi)?;
                let mut aux = self
                    .differential(eta)?
                    .mul(&self.contract_frame(j, xi)?)?;
                if q_eta.rem_euclid(2) == 1 {
                    aux = aux.neg();
                }
                t3 = t3.add(&aux);
                if (q_xi * q_eta).rem_euclid(2) == 0 {
                    t3 = t3.neg();
                }
                out[i] = out[i].add(&t3);
            }
        }
        Ok(out)
    }

    /// `i_{e_i}` on algebroid forms.
    pub fn contract_frame(&self, i: usize, c: &GcaElement<S>) -> Result<GcaElement<S>> {
        self.pia_ops.contraction_atom(i).apply(c)
    }

    /// `L_{e_i} = i_{e_i} d_A + d_A i_{e_i}` on algebroid forms.
    pub fn lie_derivative_frame(&self, i: usize, c: &GcaElement<S>) -> Result<GcaElement<S>> {
        Ok(self
            .contract_frame(i, &self.differential(c)?)?
            .add(&self.differential(&self.contract_frame(i, c)?)?))
    }

    /// Embeds a component-vector `A`-vector-valued form as an operator.
    pub fn embed_vv_form(&self, xt: &[GcaElement<S>]) -> Result<Operator<S>> {
        let mut acc = Operator::zero(&self.pia_ops);
        for (i, xi) in xt.iter().enumerate() {
            acc = acc.add(
                &Operator::mul(&self.pia_ops, xi)?
                    .compose(&Operator::contract(&self.pia_ops, i))?,
            )?;
        }
        Ok(acc)
    }

    // ------------------------------------------------------------------
    // samplers

    fn random_coeff(&self, rng: &mut Rng) -> S {
        let p = loop {
            let v = rng.int(-2, 2);
            if v != 0 {
                break v;
            }
        };
        S::from_ratio(p, rng.int(1, 2))
    }

    /// Random section-algebra element of fixed frame degree `p` and base
    /// polynomial degree `<= max_deg`.
    pub fn random_section(
        &self,
        rng: &mut Rng,
        p: u32,
        max_deg: u32,
        terms: usize,
    ) -> GcaElement<S> {
        assert!(p as usize <= self.rank);
        let mut acc = GcaElement::zero(&self.tstar_ctx);
        for _ in 0..terms {
            let mut factors: Vec<(GenId, u32)> = Vec::new();
            let mut chosen: Vec<usize> = Vec::new();
            while (chosen.len() as u32) < p {
                let i = rng.below(self.rank);
                if !chosen.contains(&i) {
                    chosen.push(i);
                }
            }
            for i in chosen {
                factors.push((self.ts_et[i], 1));
            }
            if self.base_dim > 0 {
                let deg = rng.int(0, max_deg as i64) as u32;
                for _ in 0..deg {
                    let a = rng.below(self.base_dim);
                    match factors.iter_mut().find(|(g, _)| *g == self.ts_x[a]) {
                        Some((_, e)) => *e += 1,
                        None => factors.push((self.ts_x[a], 1)),
                    }
                }
            }
            factors.sort_by_key(|&(g, _)| g);
            let c = self.random_coeff(rng);
            acc = acc.add(&GcaElement::monomial(&self.tstar_ctx, &factors, c));
        }
        acc
    }

    /// Random function on `A*` of bounded degree in `x` and `eta`.
    pub fn random_astar_function(
        &self,
        rng: &mut Rng,
        max_deg: u32,
        terms: usize,
    ) -> GcaElement<S> {
        let mut acc = GcaElement::zero(&self.astar_ctx);
        let pool: Vec<GenId> = self
            .as_x
            .iter()
            .chain(self.as_n.iter())
            .copied()
            .collect();
        for _ in 0..terms {
            let deg = rng.int(0, max_deg as i64) as u32;
            let mut factors: Vec<(GenId, u32)> = Vec::new();
            for _ in 0..deg {
                let g = pool[rng.below(pool.len())];
                match factors.iter_mut().find(|(h, _)| *h == g) {
                    Some((_, e)) => *e += 1,
                    None => factors.push((g, 1)),
                }
            }
            factors.sort_by_key(|&(g, _)| g);
            let c = self.random_coeff(rng);
            acc = acc.add(&GcaElement::monomial(&self.astar_ctx, &factors, c));
        }
        acc
    }

    /// Random algebroid form in `Gamma(Lambda A*)`.
    pub fn random_form(&self, rng: &mut Rng, q: u32, max_deg: u32, terms: usize) -> GcaElement<S> {
        assert!(q as usize <= self.rank);
        let mut acc = GcaElement::zero(&self.pia_ctx);
        for _ in 0..terms {
            let mut factors: Vec<(GenId, u32)> = Vec::new();
            let mut chosen: Vec<usize> = Vec::new();
            while (chosen.len() as u32) < q {
                let i = rng.below(self.rank);
                if !chosen.contains(&i) {
                    chosen.push(i);
                }
            }
            for i in chosen {
                factors.push((self.pa_yt[i], 1));
            }
            if self.base_dim > 0 {
                let deg = rng.int(0, max_deg as i64) as u32;
                for _ in 0..deg {
                    let a = rng.below(self.base_dim);
                    match factors.iter_mut().find(|(g, _)| *g == self.pa_x[a]) {
                        Some((_, e)) => *e += 1,
                        None => factors.push((self.pa_x[a], 1)),
                    }
                }
            }
            factors.sort_by_key(|&(g, _)| g);
            let c = self.random_coeff(rng);
            acc = acc.add(&GcaElement::monomial(&self.pia_ctx, &factors, c));
        }
        acc
    }
}

/// Koszul bracket of forms on a Poisson chart, defined by the operator
/// identity `i_{[a,b]^P} = [[i_a, d_P], i_b]` on multivectors.
pub fn koszul_bracket<S: ExactScalar>(
    man: &Manifold<S>,
    p: &GcaElement<S>,
    alpha: &GcaElement<S>,
    beta: &GcaElement<S>,
) -> Result<GcaElement<S>> {
    let ops = poisson_multivector_ops(man, p)?;
    let ia = embed_form_on_multivectors(man, &ops, alpha)?;
    let ib = embed_form_on_multivectors(man, &ops, beta)?;
    let d = Operator::diff(&ops);
    let out = ia.commutator(&d)?.commutator(&ib)?.extract_interior()?;
    if !man.is_form(&out) {
        return Err(Error::ExtractionFailed(
            "koszul bracket did not extract to a form".into(),
        ));
    }
    Ok(out)
}

/// The operator algebra on multivectors with differential `d_P = [P, .]`;
/// errors when `P` is not Poisson.
pub fn poisson_multivector_ops<S: ExactScalar>(
    man: &Manifold<S>,
    p: &GcaElement<S>,
) -> Result<OpAlgebra<S>> {
    let pp = man.schouten(p, p)?;
    if !pp.is_zero() {
        return Err(Error::NotPoisson {
            residual: pp.to_string(),
        });
    }
    let n = man.dim();
    let pit = man.pit_context().clone();
    let p_pit = man.to_pit(p)?;
    let sn = man.pit_schouten_structure();
    let mut dp_images = Vec::new();
    for id in pit.ids() {
        dp_images.push((id, sn.eval(&p_pit, &GcaElement::generator(&pit, id))?));
    }
    let dp = Derivation::new(&pit, "d_P", 1, dp_images)?;
    let mut contractions = Vec::new();
    let xt: Vec<GenId> = (1..=n)
        .map(|a| pit.lookup(&format!("xt{a}")).unwrap())
        .collect();
    let x: Vec<GenId> = (1..=n)
        .map(|a| pit.lookup(&format!("x{a}")).unwrap())
        .collect();
    for a in 0..n {
        contractions.push(Derivation::new(
            &pit,
            format!("i_dx{}", a + 1),
            -1,
            [(xt[a], GcaElement::one(&pit))],
        )?);
    }
    // extraction into the mixed chart context: coefficients x -> x,
    // xt -> @, duals dx
    let mixed = man.context();
    let mut coeff_map = Vec::new();
    for id in pit.ids() {
        if let Some(a) = x.iter().position(|&g| g == id) {
            coeff_map.push(mixed.lookup(&format!("x{}", a + 1))?);
        } else {
            let a = xt.iter().position(|&g| g == id).unwrap();
            coeff_map.push(mixed.lookup(&format!("@{}", a + 1))?);
        }
    }
    let duals: Vec<GenId> = (1..=n)
        .map(|a| mixed.lookup(&format!("dx{a}")).unwrap())
        .collect();
    OpAlgebra::new(
        format!("End(V R{n}; d_P)"),
        &pit,
        x,
        xt,
        contractions,
        dp,
        Some(ExtractionSpec {
            tensor_ctx: mixed.clone(),
            coeff_map,
            duals,
        }),
    )
}

/// Embeds a differential form (element of the mixed chart context) as the
/// interior operator on multivectors.
pub fn embed_form_on_multivectors<S: ExactScalar>(
    man: &Manifold<S>,
    ops: &OpAlgebra<S>,
    alpha: &GcaElement<S>,
) -> Result<Operator<S>> {
    if !man.is_form(alpha) {
        return Err(Error::BidegreeMismatch {
            what: "form".into(),
            expected: "(q,0)".into(),
        });
    }
    let n = man.dim();
    let mixed = man.context();
    let pit = man.pit_context();
    let mut mixed_to_pit: Vec<GenId> = Vec::new();
    for id in mixed.ids() {
        let name = &mixed.generator(id).name;
        if let Some(stripped) = name.strip_prefix("x") {
            mixed_to_pit.push(pit.lookup(&format!("x{stripped}"))?);
        } else {
            // dx and @ never occur in the transferred coefficient
            mixed_to_pit.push(pit.lookup("x1")?);
        }
    }
    let dx: Vec<GenId> = (1..=n)
        .map(|a| mixed.lookup(&format!("dx{a}")).unwrap())
        .collect();
    let mut acc = Operator::zero(ops);
    for (m, c) in alpha.terms() {
        let mut coeff_factors: Vec<(GenId, u32)> = Vec::new();
        let mut contraction_ids: Vec<usize> = Vec::new();
        for &(g, e) in m.factors() {
            if let Some(a) = dx.iter().position(|&d| d == g) {
                contraction_ids.push(a);
            } else {
                coeff_factors.push((g, e));
            }
        }
        let coeff = GcaElement::monomial(mixed, &coeff_factors, S::one())
            .relabel(pit, &mixed_to_pit)?;
        let mut op = Operator::mul(ops, &coeff)?;
        for a in contraction_ids {
            op = op.compose(&Operator::contract(ops, a))?;
        }
        acc = acc.add(&op.scale(c))?;
    }
    Ok(acc)
}
