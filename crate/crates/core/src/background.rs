//! Courant brackets with a closed background form and WZW-Poisson
//! structures: the twisted differential `d + e_psi`, the background Dorfman
//! bracket as a derived bracket, the psi-Dirac graph condition
//! `1/2 [P,P] = (Lambda^3 P#)(psi)`, the twisted bracket of 1-forms, and the
//! twisted Lie algebroid differential `d_{P,psi} = d_P + i_{(Lambda^2 P#)(psi)}`.

use crate::cartan::{Generalized, Manifold};
use crate::error::{Error, Result};
use crate::gca::{Degree, Derivation, GcaElement, GenId};
use crate::operator::Operator;
use crate::report::{CheckReport, Witness};
use crate::scalar::{ExactScalar, Scalar};

/// A polynomial chart together with a closed background form of odd degree.
#[derive(Debug, Clone)]
pub struct Background<S: ExactScalar> {
    man: Manifold<S>,
    psi: GcaElement<S>,
}

/// Result of a background Dorfman bracket; `closure_warning` is raised when
/// the background degree is not 3, so `V^1 + Omega^1` is not closed.
#[derive(Debug, Clone)]
pub struct BackgroundDorfman<S: Scalar> {
    pub vector: GcaElement<S>,
    pub form: GcaElement<S>,
    pub closure_warning: bool,
}

/// Both sides of the WZW-Poisson condition.
#[derive(Debug, Clone)]
pub struct WzwReport<S: Scalar> {
    /// `1/2 [P,P]`.
    pub lhs: GcaElement<S>,
    /// `(Lambda^3 P#)(psi)`.
    pub rhs: GcaElement<S>,
    pub holds: bool,
}

impl<S: ExactScalar> Background<S> {
    /// Validates that `psi` is a form of odd degree with `d psi = 0`.
    pub fn new(man: &Manifold<S>, psi: GcaElement<S>) -> Result<Self> {
        man.context().check_same(psi.context())?;
        if !man.is_form(&psi) {
            return Err(Error::BidegreeMismatch {
                what: "background".into(),
                expected: "(q,0)".into(),
            });
        }
        match psi.degree() {
            Degree::Zero => {}
            Degree::Homogeneous(d) if d.rem_euclid(2) == 1 => {}
            _ => {
                return Err(Error::GradingRequired {
                    what: "background form of odd degree".into(),
                })
            }
        }
        let dpsi = man.d(&psi);
        if !dpsi.is_zero() {
            return Err(Error::NotClosed {
                residual: dpsi.to_string(),
            });
        }
        Ok(Background {
            man: man.clone(),
            psi,
        })
    }

    pub fn manifold(&self) -> &Manifold<S> {
        &self.man
    }

    pub fn psi(&self) -> &GcaElement<S> {
        &self.psi
    }

    /// The twisted differential `d + e_psi` as an operator on forms; it is
    /// odd and squares to zero because `psi` is closed.
    pub fn twisted_differential(&self) -> Result<Operator<S>> {
        self.man.op_d().add(&self.man.op_mul(&self.psi)?)
    }

    /// `[x+xi, y+eta]_{d^psi} = [x,y] + L_x eta - i_y d xi + i_{x^y} psi`.
    pub fn dorfman(
        &self,
        a: &Generalized<S>,
        b: &Generalized<S>,
    ) -> Result<BackgroundDorfman<S>> {
        let plain = self.man.dorfman(a, b)?;
        let xy = a.vector.mul(&b.vector)?;
        let twist = self.man.interior(&xy, &self.psi)?;
        let psi_deg = match self.psi.degree() {
            Degree::Homogeneous(d) => Some(d),
            _ => None,
        };
        let one_form_inputs = [&a.form, &b.form].iter().any(|f| {
            matches!(f.degree(), Degree::Homogeneous(1))
        });
        Ok(BackgroundDorfman {
            vector: plain.vector,
            form: plain.form.add(&twist),
            closure_warning: one_form_inputs && psi_deg.is_some_and(|d| d != 3),
        })
    }

    /// `(Lambda^3 P#)(psi)` as a trivector:
    /// its `(a,b,c)` coefficient is `psi(P# dx^a, P# dx^b, P# dx^c)`.
    pub fn lambda3_sharp(&self, p: &GcaElement<S>) -> Result<GcaElement<S>> {
        let man = &self.man;
        let n = man.dim();
        let mut sharp = Vec::with_capacity(n);
        for a in 0..n {
            sharp.push(man.sharp(p, a)?);
        }
        let mut acc = man.zero();
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    // psi(u,v,w) = i_w i_v i_u psi
                    let val = man.interior(
                        &sharp[c],
                        &man.interior(&sharp[b], &man.interior(&sharp[a], &self.psi)?)?,
                    )?;
                    if val.is_zero() {
                        continue;
                    }
                    let tri = man.pd(a).mul(&man.pd(b))?.mul(&man.pd(c))?;
                    acc = acc.add(&val.mul(&tri)?);
                }
            }
        }
        Ok(acc)
    }

    /// The WZW-Poisson condition `1/2 [P,P]_SN = (Lambda^3 P#)(psi)`,
    /// equivalently: the graph of `P#` is a psi-Dirac structure.
    pub fn wzw_condition(&self, p: &GcaElement<S>) -> Result<WzwReport<S>> {
        let lhs = self.man.schouten(p, p)?.scale(&S::half());
        let rhs = self.lambda3_sharp(p)?;
        let holds = lhs == rhs;
        Ok(WzwReport { lhs, rhs, holds })
    }

    /// Koszul bracket of 1-forms of an arbitrary bivector, by the direct
    /// formula `[xi,eta]^P = L_{P#xi} eta - i_{P#eta} d xi` (no Poisson
    /// condition needed; for Poisson `P` it agrees with the operator route).
    pub fn koszul_direct(
        &self,
        p: &GcaElement<S>,
        xi: &GcaElement<S>,
        eta: &GcaElement<S>,
    ) -> Result<GcaElement<S>> {
        let man = &self.man;
        let pxi = man.sharp_form(p, xi)?;
        let peta = man.sharp_form(p, eta)?;
        Ok(man
            .lie_derivative(&pxi, eta)?
            .sub(&man.interior(&peta, &man.d(xi))?))
    }

    /// The background bracket of 1-forms,
    /// `[xi,eta]^{P,psi} = [xi,eta]^P + i_{P#xi ^ P#eta} psi`.
    pub fn form_bracket(
        &self,
        p: &GcaElement<S>,
        xi: &GcaElement<S>,
        eta: &GcaElement<S>,
    ) -> Result<GcaElement<S>> {
        let man = &self.man;
        let wedge = man.sharp_form(p, xi)?.mul(&man.sharp_form(p, eta)?)?;
        Ok(self
            .koszul_direct(p, xi, eta)?
            .add(&man.interior(&wedge, &self.psi)?))
    }

    /// The twisted Lichnerowicz differential `d_{P,psi} = d_P +
    /// i_{(Lambda^2 P#)(psi)}` as an odd derivation of multivectors in the
    /// parity-reversed model.
    pub fn twisted_poisson_differential(&self, p: &GcaElement<S>) -> Result<Derivation<S>> {
        let man = &self.man;
        let n = man.dim();
        let pit = man.pit_context();
        let p_pit = man.to_pit(p)?;
        let sn = man.pit_schouten_structure();
        let mut sharp = Vec::with_capacity(n);
        for a in 0..n {
            sharp.push(man.sharp(p, a)?);
        }
        let mut images: Vec<(GenId, GcaElement<S>)> = Vec::new();
        for id in pit.ids() {
            let d_p = sn.eval(&p_pit, &GcaElement::generator(pit, id))?;
            let name = pit.generator(id).name.clone();
            let img = if let Some(num) = name.strip_prefix("xt") {
                // i_{(L^2 P#)psi} on the coordinate field @_g:
                // the bivector with (a,b) coefficient psi(P# dx^a, P# dx^b, @_g)
                let g: usize = num.parse().unwrap();
                let mut biv = man.zero();
                for a in 0..n {
                    for b in (a + 1)..n {
                        let val = man.interior(
                            &man.pd(g - 1),
                            &man.interior(&sharp[b], &man.interior(&sharp[a], &self.psi)?)?,
                        )?;
                        if val.is_zero() {
                            continue;
                        }
                        biv = biv.add(&val.mul(&man.pd(a).mul(&man.pd(b))?)?);
                    }
                }
                d_p.add(&man.to_pit(&biv)?)
            } else {
                d_p
            };
            images.push((id, img));
        }
        Derivation::new(pit, "d_{P,psi}", 1, images)
    }

    /// Applies `d_{P,psi}` to a multivector in the mixed representation.
    pub fn apply_twisted_differential(
        &self,
        p: &GcaElement<S>,
        u: &GcaElement<S>,
    ) -> Result<GcaElement<S>> {
        let d = self.twisted_poisson_differential(p)?;
        self.man.from_pit(&d.apply(&self.man.to_pit(u)?)?)
    }

    /// `d_{P,psi}(d_{P,psi}(.))` residuals on generators; empty iff the
    /// twisted differential squares to zero, which happens iff the
    /// WZW-Poisson condition holds.
    pub fn twisted_square_residuals(&self, p: &GcaElement<S>) -> Result<Vec<GcaElement<S>>> {
        let d = self.twisted_poisson_differential(p)?;
        Ok(d.square_residuals()?.into_iter().map(|(_, v)| v).collect())
    }

    /// Anchor morphism residuals `P#[xi,eta]^{P,psi} - [P#xi, P#eta]` on the
    /// sampled 1-form pairs.
    pub fn check_anchor_morphism(
        &self,
        p: &GcaElement<S>,
        pairs: &[(GcaElement<S>, GcaElement<S>)],
    ) -> Result<CheckReport> {
        let man = &self.man;
        let mut report = CheckReport::new("background-anchor-morphism");
        for (k, (xi, eta)) in pairs.iter().enumerate() {
            let lhs = man.sharp_form(p, &self.form_bracket(p, xi, eta)?)?;
            let rhs = man.lie_bracket(&man.sharp_form(p, xi)?, &man.sharp_form(p, eta)?)?;
            let r = lhs.sub(&rhs);
            report.record(r.is_zero(), || Witness {
                label: format!("pair {k}"),
                inputs: vec![xi.to_string(), eta.to_string()],
                residual: r.to_string(),
            });
        }
        Ok(report)
    }
}
