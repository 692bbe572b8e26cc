//! Acceptance suite: one test per criterion, each printing a PASS line when
//! it completes. All checks are exact (rational arithmetic, operator
//! equality on complete test families); there are no tolerances anywhere.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use dbcalc_core::algebroid::{koszul_bracket, Algebroid, AlgebroidSpec};
use dbcalc_core::background::Background;
use dbcalc_core::bigbracket::LieAlgebra;
use dbcalc_core::cartan::{Generalized, Manifold};
use dbcalc_core::derived::{CommutatorAlgebra, DerivedContext, PoissonAlgebra};
use dbcalc_core::gca::{
    BracketStructure, Context, Derivation, GcaElement, Generator, Symmetry,
};
use dbcalc_core::operator::Operator;
use dbcalc_core::{Rat, Rng, Scalar};

type E = GcaElement<Rat>;
type M = Manifold<Rat>;
type L = LieAlgebra<Rat>;

fn pass(n: u32, what: &str) {
    println!("criterion {n}: PASS - {what}");
}

// ---------------------------------------------------------------------
// 1. Derived-bracket theorems on five contexts: Loday residuals exactly
//    zero on >= 100 random homogeneous triples per context, morphism and
//    derivation identities on >= 100 pairs.

#[test]
fn criterion_01_derived_bracket_theorems() {
    let mut rng = Rng::new(0xC1);

    // three big-bracket contexts
    let algebras = vec![
        ("abelian", L::abelian(3).unwrap()),
        ("heisenberg", L::heisenberg().unwrap()),
        ("sl2", L::sl2().unwrap()),
    ];
    for (name, g) in &algebras {
        let alg = PoissonAlgebra::new(g.big_structure().clone());
        let ctx = DerivedContext::by_element(&alg, g.mu().clone()).unwrap();
        let mut triples = Vec::new();
        let mut pairs = Vec::new();
        for _ in 0..100 {
            let dims: Vec<(u32, u32)> = (0..3)
                .map(|_| (rng.below(3) as u32, rng.below(3) as u32))
                .collect();
            let a = g.random_bidegree(&mut rng, dims[0].0, dims[0].1, 1);
            let b = g.random_bidegree(&mut rng, dims[1].0, dims[1].1, 1);
            let c = g.random_bidegree(&mut rng, dims[2].0, dims[2].1, 1);
            pairs.push((a.clone(), b.clone()));
            triples.push((a, b, c));
        }
        let loday = ctx.check_loday(&triples).unwrap();
        assert!(loday.passed(), "{name}: {loday}");
        // degree bookkeeping: deg [a,b] = |a| + |b| + n + 1
        for (a, b, _) in &triples {
            let v = ctx.derived(a, b).unwrap();
            assert!(ctx.derived_degree_ok(a, b, &v), "{name} degree drift");
        }
        let morph = ctx.check_morphism_derivation(&pairs).unwrap();
        assert!(morph.passed(), "{name}: {morph}");
    }

    // Schouten structure on PiT*R^2 with the bivector of {x1,x2} = x1
    let man = M::new(2).unwrap();
    let alg = PoissonAlgebra::new(man.pit_schouten_structure().clone());
    let p = man
        .to_pit(&man.x(0).mul(&man.pd(0)).unwrap().mul(&man.pd(1)).unwrap())
        .unwrap();
    let ctx = DerivedContext::by_element(&alg, p).unwrap();
    let mut triples = Vec::new();
    let mut pairs = Vec::new();
    for _ in 0..100 {
        let ps: Vec<u32> = (0..3).map(|_| rng.below(3) as u32).collect();
        let a = man.to_pit(&man.random_multivector(&mut rng, ps[0], 2, 1)).unwrap();
        let b = man.to_pit(&man.random_multivector(&mut rng, ps[1], 2, 1)).unwrap();
        let c = man.to_pit(&man.random_multivector(&mut rng, ps[2], 2, 1)).unwrap();
        pairs.push((a.clone(), b.clone()));
        triples.push((a, b, c));
    }
    let loday = ctx.check_loday(&triples).unwrap();
    assert!(loday.passed(), "pit: {loday}");
    let morph = ctx.check_morphism_derivation(&pairs).unwrap();
    assert!(morph.passed(), "pit: {morph}");

    // operator algebra with the de Rham differential
    let alg = CommutatorAlgebra::new(man.operators().clone());
    let ctx = DerivedContext::by_element(&alg, man.op_d()).unwrap();
    let mut triples = Vec::new();
    let mut pairs = Vec::new();
    for _ in 0..100 {
        let mk = |rng: &mut Rng, man: &M| {
            let q = rng.below(2) as u32;
            let p = rng.below(2) as u32;
            man.embed(&man.random_tensor(rng, q, p, 1, 1)).unwrap()
        };
        let a = mk(&mut rng, &man);
        let b = mk(&mut rng, &man);
        let c = mk(&mut rng, &man);
        pairs.push((a.clone(), b.clone()));
        triples.push((a, b, c));
    }
    let loday = ctx.check_loday(&triples).unwrap();
    assert!(loday.passed(), "operators: {loday}");
    let morph = ctx.check_morphism_derivation(&pairs).unwrap();
    assert!(morph.passed(), "operators: {morph}");

    pass(1, "Loday + morphism/derivation identities on 5 contexts x 100 samples");
}

// ---------------------------------------------------------------------
// 2. All five Cartan identities as operator equalities for >= 20 random
//    polynomial vector fields on R^2 and R^3, degree <= 3.

#[test]
fn criterion_02_cartan_identities() {
    let mut rng = Rng::new(0xC2);
    for n in [2usize, 3] {
        let man = M::new(n).unwrap();
        let d = man.op_d();
        assert!(d.commutator(&d).unwrap().is_zero_op().unwrap(), "[d,d] != 0");
        for _ in 0..20 {
            let x = man.random_vector_field(&mut rng, 3);
            let y = man.random_vector_field(&mut rng, 3);
            let ix = man.embed(&x).unwrap();
            let iy = man.embed(&y).unwrap();
            // [i_x, i_y] = 0
            assert!(ix.commutator(&iy).unwrap().is_zero_op().unwrap());
            // L_x = [i_x, d] agrees with the Leibniz-extension definition
            let lx = ix.commutator(&d).unwrap();
            let lx_def = lie_derivative_as_derivation(&man, &x);
            for probe in man.operators().family(2) {
                assert_eq!(
                    lx.apply(&probe).unwrap(),
                    lx_def.apply(&probe).unwrap(),
                    "L_x definition mismatch"
                );
            }
            // [L_x, d] = 0
            assert!(lx.commutator(&d).unwrap().is_zero_op().unwrap());
            // [L_x, i_y] = i_{[x,y]}
            let rhs = man.embed(&man.lie_bracket(&x, &y).unwrap()).unwrap();
            assert!(lx.commutator(&iy).unwrap().op_equal(&rhs).unwrap());
        }
        // zero perturbation: d = d + e_0
        let d2 = d.add(&man.op_mul(&man.zero()).unwrap()).unwrap();
        assert!(d.op_equal(&d2).unwrap());
    }
    pass(2, "five Cartan identities on R^2 and R^3, 20 random vector fields each");
}

/// The Lie derivative as a Derivation given by its generator images.
fn lie_derivative_as_derivation(man: &M, x: &E) -> Derivation<Rat> {
    let ctx = man.context().clone();
    let images = ctx
        .ids()
        .map(|id| {
            let g = E::generator(&ctx, id);
            let name = &ctx.generator(id).name;
            let img = if name.starts_with("dx") {
                man.d(&man.interior(x, &g).unwrap())
            } else if name.starts_with('x') {
                man.interior(x, &man.d(&g)).unwrap()
            } else {
                // L_x on the inert multivector generators is not used here
                E::zero(&ctx)
            };
            (id, img)
        })
        .collect::<Vec<_>>();
    Derivation::new(&ctx, "L_x", 0, images).unwrap()
}

// ---------------------------------------------------------------------
// 3. Schouten two-model agreement on >= 50 random multivector pairs on R^3,
//    with the Cartan formula as an operator identity for each pair.

#[test]
fn criterion_03_schouten_two_models() {
    let mut rng = Rng::new(0xC3);
    let man = M::new(3).unwrap();
    let d = man.op_d();
    for k in 0..50 {
        let p = rng.below(3) as u32;
        let q = rng.below(3) as u32;
        let u = man.random_multivector(&mut rng, p, 3, 2);
        let v = man.random_multivector(&mut rng, q, 3, 2);
        let s1 = man.schouten(&u, &v).unwrap();
        let s2 = man.schouten_via_pit(&u, &v).unwrap();
        assert_eq!(s1, s2, "pair {k}: models disagree");
        // i_{[u,v]} = [[i_u, d], i_v] as operators
        let lhs = man.embed(&s1).unwrap();
        let rhs = man
            .embed(&u)
            .unwrap()
            .commutator(&d)
            .unwrap()
            .commutator(&man.embed(&v).unwrap())
            .unwrap();
        assert!(lhs.op_equal(&rhs).unwrap(), "pair {k}: Cartan formula");
        // Buttin's computable side for multivectors: [[i_u,d],[i_v,d]] =
        // [i_{[u,v]}, d]
        let buttin = man.buttin_rhs(&u, &v).unwrap();
        assert!(buttin.op_equal(&lhs.commutator(&d).unwrap()).unwrap());
    }
    pass(3, "schouten == schouten_via_pit on 50 pairs, with Eq. cartan per pair");
}

// ---------------------------------------------------------------------
// 4. Frolicher-Nijenhuis correction: the residual
//    [i_X,i_Y]_d - i_{[X,Y]_FN} + (-1)^{q(q'-1)} L_{i_Y X} vanishes as an
//    operator for >= 20 random decomposable vector-valued form pairs.

#[test]
fn criterion_04_frolicher_nijenhuis() {
    let mut rng = Rng::new(0xC4);
    let man = M::new(2).unwrap();
    let d = man.op_d();
    for k in 0..20 {
        let q = rng.below(3) as u32;
        let q2 = rng.below(3) as u32;
        let x = man.random_tensor(&mut rng, q, 1, 2, 1);
        let y = man.random_tensor(&mut rng, q2, 1, 2, 1);
        let ix = man.embed(&x).unwrap();
        let iy = man.embed(&y).unwrap();
        let derived = ix.commutator(&d).unwrap().commutator(&iy).unwrap();
        let i_fn = man.embed(&man.frolicher_nijenhuis(&x, &y).unwrap()).unwrap();
        let l_iyx = man
            .embed(&man.i_tensor(&y, &x).unwrap())
            .unwrap()
            .commutator(&d)
            .unwrap();
        let sign = (q as i64 * (q2 as i64 - 1)).rem_euclid(2) == 1;
        let corr = if sign { l_iyx.neg() } else { l_iyx };
        let residual = derived.sub(&i_fn).unwrap().add(&corr).unwrap();
        assert!(residual.is_zero_op().unwrap(), "pair {k}");
        // Buttin case (2): [[i_X,d],[i_Y,d]] = [i_{[X,Y]_FN}, d]
        let buttin = man.buttin_rhs(&x, &y).unwrap();
        assert!(buttin.op_equal(&i_fn.commutator(&d).unwrap()).unwrap());
    }
    // Buttin case (0): for a pure form xi, [i_xi, d] = (-1)^{|xi|+1} e_{d xi},
    // an exterior multiplication with no derivatives of the other argument
    let xi = man.random_form(&mut rng, 1, 2, 2);
    let lhs = man.op_mul(&xi).unwrap().commutator(&d).unwrap();
    let rhs = man.op_mul(&man.d(&xi)).unwrap(); // (-1)^{1+1} = +1
    assert!(lhs.op_equal(&rhs).unwrap(), "case (0) identity");
    pass(4, "Eq. FN residual vanishes on 20 decomposable pairs");
}

// ---------------------------------------------------------------------
// 5. Vinogradov = skew-symmetrized derived bracket on >= 20 operator pairs;
//    the restriction to V^1 + Omega^1 reproduces the Courant formula.

#[test]
fn criterion_05_vinogradov() {
    let mut rng = Rng::new(0xC5);
    let man = M::new(2).unwrap();
    let alg = CommutatorAlgebra::new(man.operators().clone());
    let ctx = DerivedContext::by_element(&alg, man.op_d()).unwrap();
    for k in 0..20 {
        let qa = rng.below(2) as u32;
        let pa = rng.below(2) as u32;
        let qb = rng.below(2) as u32;
        let pb = rng.below(2) as u32;
        let a = man.embed(&man.random_tensor(&mut rng, qa, pa, 1, 1)).unwrap();
        let b = man.embed(&man.random_tensor(&mut rng, qb, pb, 1, 1)).unwrap();
        let vino = man.vinogradov(&a, &b).unwrap();
        let skew = ctx.skew(&a, &b).unwrap();
        assert!(vino.op_equal(&skew).unwrap(), "pair {k}");
        // skewness: [a,b]_V + (-1)^{(|a|+1)(|b|+1)} [b,a]_V = 0
        let ba = man.vinogradov(&b, &a).unwrap();
        let pa_i = if a.parity().unwrap().is_some_and(|p| p.is_odd()) { 1i64 } else { 0 };
        let pb_i = if b.parity().unwrap().is_some_and(|p| p.is_odd()) { 1i64 } else { 0 };
        let folded = if ((pa_i + 1) * (pb_i + 1)).rem_euclid(2) == 1 {
            vino.sub(&ba).unwrap()
        } else {
            vino.add(&ba).unwrap()
        };
        assert!(folded.is_zero_op().unwrap(), "pair {k} skewness");
    }
    // restriction to vector-valued forms: the skew-symmetrized derived
    // bracket differs from the FN bracket by generalized Lie derivatives;
    // derived from Eq. FN and the skew definition:
    // [i_X,i_Y]_V = i_FN - 1/2 (-1)^{q(q'-1)} L_{i_Y X} + 1/2 (-1)^{q'} L_{i_X Y}
    for k in 0..10 {
        let q = rng.below(3) as u32;
        let q2 = rng.below(3) as u32;
        let x = man.random_tensor(&mut rng, q, 1, 1, 1);
        let y = man.random_tensor(&mut rng, q2, 1, 1, 1);
        let vino = man
            .vinogradov(&man.embed(&x).unwrap(), &man.embed(&y).unwrap())
            .unwrap();
        let d = man.op_d();
        let i_fn = man.embed(&man.frolicher_nijenhuis(&x, &y).unwrap()).unwrap();
        let half = Rat::from_ratio(1, 2);
        let mut l_iyx = man
            .embed(&man.i_tensor(&y, &x).unwrap())
            .unwrap()
            .commutator(&d)
            .unwrap()
            .scale(&half);
        if (q as i64 * (q2 as i64 - 1)).rem_euclid(2) == 0 {
            l_iyx = l_iyx.neg();
        }
        let mut l_ixy = man
            .embed(&man.i_tensor(&x, &y).unwrap())
            .unwrap()
            .commutator(&d)
            .unwrap()
            .scale(&half);
        if (q2 as i64).rem_euclid(2) == 1 {
            l_ixy = l_ixy.neg();
        }
        let rhs = i_fn.add(&l_iyx).unwrap().add(&l_ixy).unwrap();
        assert!(vino.op_equal(&rhs).unwrap(), "pair {k}: vv-form restriction");
        // the single-prefactor form of the same identity, for q = q':
        // [i_X,i_Y]_V = i_FN + 1/2 (-1)^q L_{i_X Y + (-1)^{(q-1)(q'-1)} i_Y X}
        if q == q2 {
            let mut z = man.i_tensor(&x, &y).unwrap();
            let mut iyx = man.i_tensor(&y, &x).unwrap();
            if ((q as i64 - 1) * (q2 as i64 - 1)).rem_euclid(2) == 1 {
                iyx = iyx.neg();
            }
            z = z.add(&iyx);
            let mut corr = man.embed(&z).unwrap().commutator(&d).unwrap().scale(&half);
            if (q as i64).rem_euclid(2) == 1 {
                corr = corr.neg();
            }
            let folded_rhs = i_fn.add(&corr).unwrap();
            assert!(vino.op_equal(&folded_rhs).unwrap(), "pair {k}: single-prefactor form");
        }
    }
    // restriction to V^1 + Omega^1: termwise Courant formula
    for k in 0..10 {
        let a = Generalized {
            vector: man.random_vector_field(&mut rng, 2),
            form: man.random_form(&mut rng, 1, 2, 1),
        };
        let b = Generalized {
            vector: man.random_vector_field(&mut rng, 2),
            form: man.random_form(&mut rng, 1, 2, 1),
        };
        let courant = man.courant(&a, &b).unwrap();
        let op_lhs = man
            .vinogradov(
                &man.embed_generalized(&a).unwrap(),
                &man.embed_generalized(&b).unwrap(),
            )
            .unwrap();
        let op_rhs = man.embed_generalized(&courant).unwrap();
        assert!(op_lhs.op_equal(&op_rhs).unwrap(), "pair {k} courant");
        // and courant is the explicit skew-symmetrization of dorfman
        let df = man.dorfman(&a, &b).unwrap();
        let db = man.dorfman(&b, &a).unwrap();
        let half = Rat::from_ratio(1, 2);
        assert_eq!(
            courant.vector,
            df.vector.sub(&db.vector).scale(&half)
        );
        assert_eq!(courant.form, df.form.sub(&db.form).scale(&half));
    }
    pass(5, "Vinogradov = skew derived bracket; Courant termwise on V^1+Omega^1");
}

// ---------------------------------------------------------------------
// 6. Counterexample witnesses reproduced exactly.

#[test]
fn criterion_06_counterexample_witnesses() {
    let man = M::new(3).unwrap();

    // (a) [i_{x^y}, e_xi] = e_{i_y xi} i_x + (-1)^{|xi|} e_{i_x xi} i_y
    //                        - (-1)^{|xi|} e_{i_{x^y} xi}, including the
    //     type-0 term, for |xi| >= 2
    let x = man.pd(0);
    let y = man.pd(1);
    let xy = x.mul(&y).unwrap();
    let xi = man.dx(0).mul(&man.dx(2)).unwrap(); // |xi| = 2
    let lhs = man
        .embed(&xy)
        .unwrap()
        .commutator(&man.op_mul(&xi).unwrap())
        .unwrap();
    let e = |f: &E| man.op_mul(f).unwrap();
    let term1 = e(&man.interior(&y, &xi).unwrap())
        .compose(&man.embed(&x).unwrap())
        .unwrap();
    let term2 = e(&man.interior(&x, &xi).unwrap())
        .compose(&man.embed(&y).unwrap())
        .unwrap();
    let term3 = e(&man.interior(&xy, &xi).unwrap());
    // |xi| even here, so the signs are +1, -1 on the last term
    let rhs = term1.add(&term2).unwrap().sub(&term3).unwrap();
    assert!(lhs.op_equal(&rhs).unwrap(), "commutator type decomposition");
    // the highest-type part keeps only the first two terms
    let top = man.highest_type_term(&xy, &xi).unwrap();
    let expected_top = man
        .interior(&y, &xi)
        .unwrap()
        .mul(&x)
        .unwrap()
        .add(&man.interior(&x, &xi).unwrap().mul(&y).unwrap());
    assert_eq!(top, expected_top, "highest-type part");
    // while the full extracted tensor carries the type-0 term too
    let full = man.algebraic_commutator_tensor(&xy, &xi).unwrap();
    assert_eq!(
        full,
        expected_top.sub(&man.interior(&xy, &xi).unwrap()),
        "type decomposition"
    );

    // (b) C-infinity nonlinearity of [[i_{xi(x)x}, d], i_{eta(x)y}] for
    //     bivector-valued 1-forms; the witness expression is
    //     (i_x(beta^df) i_y(xi^gamma) - i_x(gamma^df) i_y(xi^beta)) eta
    let man2 = M::new(2).unwrap();
    let biv = man2.pd(0).mul(&man2.pd(1)).unwrap();
    let xi1 = man2.dx(0);
    let eta = man2.dx(1);
    let xt = xi1.mul(&biv).unwrap(); // dx1 (x) @1^@2
    let yt = eta.mul(&biv).unwrap(); // dx2 (x) @1^@2
    let t = man2
        .embed(&xt)
        .unwrap()
        .commutator(&man2.op_d())
        .unwrap()
        .commutator(&man2.embed(&yt).unwrap())
        .unwrap();
    let f = man2.x(1);
    let alpha = man2.x(0).mul(&man2.dx(1)).unwrap();
    // on 1-forms the operator is pointwise, so the witness lives on the
    // 2-form d(alpha) = dx1^dx2 = beta^gamma
    let dalpha = man2.d(&alpha);
    let beta = man2.dx(0);
    let gamma = man2.dx(1);
    assert_eq!(dalpha, beta.mul(&gamma).unwrap());
    let on_one_form = t
        .apply(&f.mul(&alpha).unwrap())
        .unwrap()
        .sub(&f.mul(&t.apply(&alpha).unwrap()).unwrap());
    assert!(on_one_form.is_zero());
    let nonlin = t
        .apply(&f.mul(&dalpha).unwrap())
        .unwrap()
        .sub(&f.mul(&t.apply(&dalpha).unwrap()).unwrap());
    let witness = man2
        .interior(&biv, &beta.mul(&man2.d(&f)).unwrap())
        .unwrap()
        .mul(&man2.interior(&biv, &xi1.mul(&gamma).unwrap()).unwrap())
        .unwrap()
        .sub(
            &man2
                .interior(&biv, &gamma.mul(&man2.d(&f)).unwrap())
                .unwrap()
                .mul(&man2.interior(&biv, &xi1.mul(&beta).unwrap()).unwrap())
                .unwrap(),
        )
        .mul(&eta)
        .unwrap();
    assert!(!witness.is_zero(), "witness must be nonzero");
    assert_eq!(nonlin, witness, "nonlinearity witness");
    // the same phenomenon on functions: [i_X, i_Y]_d f = eta ^ (i_y xi) L_x f
    // specializes to vector-valued forms
    let xv = man2.x(1).mul(&man2.pd(0)).unwrap(); // x = x2 @1
    let xt1 = xi1.mul(&xv).unwrap();
    let yt1 = eta.mul(&man2.pd(1)).unwrap();
    let top = man2
        .embed(&xt1)
        .unwrap()
        .commutator(&man2.op_d())
        .unwrap()
        .commutator(&man2.embed(&yt1).unwrap())
        .unwrap();
    let g = man2.x(0).mul(&man2.x(1)).unwrap();
    let lie = man2.lie_derivative(&xv, &g).unwrap();
    let expected = eta
        .mul(&man2.interior(&man2.pd(1), &xi1).unwrap())
        .unwrap()
        .mul(&lie)
        .unwrap();
    assert_eq!(top.apply(&g).unwrap(), expected, "action on functions");

    // (c) stored triple on which the Courant bracket violates the Loday
    //     identity: (@1, x1 x2 dx1, @2) with residual 1/4 dx1
    let a = Generalized {
        vector: man2.pd(0),
        form: man2.zero(),
    };
    let b = Generalized {
        vector: man2.zero(),
        form: man2.x(0).mul(&man2.x(1)).unwrap().mul(&man2.dx(0)).unwrap(),
    };
    let c = Generalized {
        vector: man2.pd(1),
        form: man2.zero(),
    };
    let bc = man2.courant(&b, &c).unwrap();
    let ab = man2.courant(&a, &b).unwrap();
    let ac = man2.courant(&a, &c).unwrap();
    let t1 = man2.courant(&a, &bc).unwrap();
    let t2 = man2.courant(&ab, &c).unwrap();
    let t3 = man2.courant(&b, &ac).unwrap();
    let res_vec = t1.vector.sub(&t2.vector).sub(&t3.vector);
    let res_form = t1.form.sub(&t2.form).sub(&t3.form);
    assert!(res_vec.is_zero());
    let expected = man2.dx(0).scale(&Rat::from_ratio(1, 4));
    assert_eq!(res_form, expected, "courant jacobi residual");

    pass(6, "type-0 term, nonlinearity witness, Courant Jacobi failure");
}

// ---------------------------------------------------------------------
// 7. Buttin's algebraic bracket = pointwise big bracket on >= 20 mixed
//    pairs, including the six-term bivector-valued 1-form formula.

#[test]
fn criterion_07_buttin_equals_big_bracket() {
    let mut rng = Rng::new(0xC7);
    let man = M::new(3).unwrap();
    let mut tested = 0;
    while tested < 20 {
        let q = rng.below(3) as u32;
        let p = 1 + rng.below(2) as u32;
        let q2 = rng.below(2) as u32;
        let p2 = 1 + rng.below(2) as u32;
        let xt = man.random_tensor(&mut rng, q, p, 2, 1);
        let yt = man.random_tensor(&mut rng, q2, p2, 2, 1);
        if xt.is_zero() || yt.is_zero() {
            continue;
        }
        let top = man.highest_type_term(&xt, &yt).unwrap();
        let big = man.pointwise_big_bracket(&xt, &yt).unwrap();
        assert_eq!(top, big, "highest type vs big bracket");
        tested += 1;
    }

    // the six-term formula for bivector-valued 1-forms, symbol for symbol
    let x1 = man.pd(0);
    let y1 = man.pd(1);
    let x2 = man.pd(1);
    let y2 = man.pd(2);
    let xi1 = man.dx(0).mul(&man.dx(1)).unwrap(); // |xi1| = 2
    let xi2 = man.dx(1).mul(&man.dx(2)).unwrap(); // |xi2| = 2
    let xt = xi1.mul(&x1).unwrap().mul(&y1).unwrap();
    let yt = xi2.mul(&x2).unwrap().mul(&y2).unwrap();
    let ix = |v: &E, f: &E| man.interior(v, f).unwrap();
    let w = |a: &E, b: &E| a.mul(b).unwrap();
    // with |xi1| = |xi2| = 2 the displayed signs are:
    // + xi1 ^ i_{x1} xi2 (x) y1 x2 y2     (sign (-1)^{|xi2|} = +)
    // + xi1 ^ i_{y1} xi2 (x) x1 x2 y2
    // + xi2 ^ i_{x2} xi1 (x) y2 x1 y1     (-(-1)^{(|xi1|+1)(|xi2|+1)} = +)
    // + xi2 ^ i_{y2} xi1 (x) x2 x1 y1     ((-1)^{|xi1|} = + inside)
    // - xi1 ^ i_{x1^y1} xi2 (x) x2 y2     ((-1)^{|xi2|+1} = -)
    // - xi2 ^ i_{x2^y2} xi1 (x) x1 y1
    let t1 = w(&w(&xi1, &ix(&x1, &xi2)), &w(&w(&y1, &x2), &y2));
    let t2 = w(&w(&xi1, &ix(&y1, &xi2)), &w(&w(&x1, &x2), &y2));
    let t3 = w(&w(&xi2, &ix(&x2, &xi1)), &w(&w(&y2, &x1), &y1));
    let t4 = w(&w(&xi2, &ix(&y2, &xi1)), &w(&w(&x2, &x1), &y1));
    let t5 = w(&w(&xi1, &ix(&x1.mul(&y1).unwrap(), &xi2)), &w(&x2, &y2));
    let t6 = w(&w(&xi2, &ix(&x2.mul(&y2).unwrap(), &xi1)), &w(&x1, &y1));
    let six_term = t1.add(&t2).add(&t3).add(&t4).sub(&t5).sub(&t6);
    let full = man.algebraic_commutator_tensor(&xt, &yt).unwrap();
    assert_eq!(full, six_term, "six-term formula");
    // highest type (3) = first four terms = the big bracket
    let top = man.highest_type_term(&xt, &yt).unwrap();
    assert_eq!(top, t1.add(&t2).add(&t3).add(&t4));
    assert_eq!(top, man.pointwise_big_bracket(&xt, &yt).unwrap());

    // vector-valued 1-forms: the commutator has only terms of highest type
    let a = man.dx(0).mul(&man.x(1).mul(&man.pd(0)).unwrap()).unwrap();
    let b = man.dx(1).mul(&man.pd(1)).unwrap();
    let full = man.algebraic_commutator_tensor(&a, &b).unwrap();
    assert_eq!(full, man.highest_type_term(&a, &b).unwrap());
    assert_eq!(full, man.pointwise_big_bracket(&a, &b).unwrap());

    pass(7, "highest-type term = pointwise big bracket, six-term formula exact");
}

// ---------------------------------------------------------------------
// 8. On PiT*R^n (n = 1, 2) with S = -p_i pt^i, the derived-bracket formula
//    reproduces the Schouten bracket for >= 50 random multivector pairs.

#[test]
fn criterion_08_supermanifold_hamiltonian() {
    let mut rng = Rng::new(0xC8);
    for n in [1usize, 2] {
        // T*(PiT*R^n): y (deg 0), yt (deg 1), p (deg 2), pt (deg 1)
        let mut gens = Vec::new();
        for i in 1..=n {
            gens.push(Generator::new(format!("y{i}"), 0));
        }
        for i in 1..=n {
            gens.push(Generator::new(format!("p{i}"), 2));
        }
        for i in 1..=n {
            gens.push(Generator::new(format!("yt{i}"), 1));
        }
        for i in 1..=n {
            gens.push(Generator::new(format!("pt{i}"), 1));
        }
        let ctx = Context::new(format!("T*(PiT*R{n})"), gens).unwrap();
        let y: Vec<_> = (1..=n).map(|i| ctx.lookup(&format!("y{i}")).unwrap()).collect();
        let p: Vec<_> = (1..=n).map(|i| ctx.lookup(&format!("p{i}")).unwrap()).collect();
        let yt: Vec<_> = (1..=n).map(|i| ctx.lookup(&format!("yt{i}")).unwrap()).collect();
        let pt: Vec<_> = (1..=n).map(|i| ctx.lookup(&format!("pt{i}")).unwrap()).collect();
        let mut table = Vec::new();
        for i in 0..n {
            table.push(((y[i], p[i]), E::one(&ctx)));
            table.push(((yt[i], pt[i]), E::one(&ctx)));
        }
        let canonical =
            BracketStructure::new(&ctx, "canonical", -2, Symmetry::GradedSkew, table).unwrap();
        // S = -p_i pt^i, quadratic of Poisson square zero
        let mut s = E::zero(&ctx);
        for i in 0..n {
            s = s.sub(
                &E::generator(&ctx, p[i])
                    .mul(&E::generator(&ctx, pt[i]))
                    .unwrap(),
            );
        }
        assert!(canonical.eval(&s, &s).unwrap().is_zero());
        // the Schouten model on the base coordinates
        let model = BracketStructure::new(
            &ctx,
            "schouten",
            -1,
            Symmetry::GradedSkew,
            (0..n).map(|i| ((yt[i], y[i]), E::one(&ctx))),
        )
        .unwrap();
        // random multivectors of PiT*R^n = polynomials in (y, yt)
        let sample = |rng: &mut Rng| -> E {
            let mut acc = E::zero(&ctx);
            for _ in 0..2 {
                let mut factors: Vec<(u32, u32)> = Vec::new();
                for i in 0..n {
                    let e = rng.below(3) as u32;
                    if e > 0 {
                        factors.push((y[i], e));
                    }
                    if rng.chance(1, 2) {
                        factors.push((yt[i], 1));
                    }
                }
                factors.sort_by_key(|&(g, _)| g);
                let c = Rat::from_int(rng.int(-3, 3));
                acc = acc.add(&E::monomial(&ctx, &factors, c));
            }
            acc
        };
        for k in 0..50 {
            let f = sample(&mut rng);
            let g = sample(&mut rng);
            let lhs = canonical
                .eval(&canonical.eval(&f, &s).unwrap(), &g)
                .unwrap();
            let rhs = model.eval(&f, &g).unwrap();
            assert_eq!(lhs, rhs, "n={n} pair {k}");
        }
    }
    pass(8, "[f,g]_SN = {{f,S},g} with S = -p_i pt^i on PiT*R^1 and PiT*R^2");
}

// ---------------------------------------------------------------------
// 9. Lie algebroid identities on the tangent algebroid of R^2, the
//    cotangent algebroid of P = x1 @1^@2, and a point-base Lie algebra;
//    three-way equivalence {H,H} = 0 <=> Q^2 = 0 <=> [P,P] = 0 on valid and
//    invalid candidates.

#[test]
fn criterion_09_lie_algebroid_identities() {
    let mut rng = Rng::new(0xC9);
    let man = M::new(2).unwrap();
    let poisson = man.x(0).mul(&man.pd(0)).unwrap().mul(&man.pd(1)).unwrap();
    let algebroids = vec![
        ("tangent R^2", Algebroid::tangent(2).unwrap()),
        (
            "cotangent of x1 @1^@2",
            Algebroid::cotangent(&man, &poisson).unwrap(),
        ),
        (
            "point heisenberg",
            Algebroid::point(3, &[((3, 1, 2), Rat::from_int(1))]).unwrap(),
        ),
    ];
    for (name, a) in &algebroids {
        assert!(a.valid());
        // generator pairs plus 20 random samples
        let mut pairs = Vec::new();
        for i in 0..a.rank() {
            for j in 0..a.rank() {
                pairs.push((a.frame(i), a.frame(j)));
            }
            for al in 0..a.base_dim() {
                pairs.push((a.frame(i), a.coordinate(al)));
            }
        }
        for _ in 0..20 {
            let p = rng.below(2) as u32 + if a.base_dim() == 0 { 1 } else { 0 };
            let q = 1 + rng.below(2) as u32;
            pairs.push((
                a.random_section(&mut rng, q.min(a.rank() as u32), 2, 1),
                a.random_section(&mut rng, p.min(a.rank() as u32), 2, 1),
            ));
        }
        for (k, (u, v)) in pairs.iter().enumerate() {
            let h_route = a.lahamilt(u, v).unwrap();
            let direct = a.sections_bracket(u, v).unwrap();
            assert_eq!(h_route, direct, "{name} pair {k}: LAhamilt vs direct");
            let end_route = a.laend(u, v).unwrap();
            assert_eq!(h_route, end_route, "{name} pair {k}: LAend vs LAhamilt");
        }
        // anchor identity [u, f]_A = rho(u) f on frames and coordinates
        for i in 0..a.rank() {
            for al in 0..a.base_dim() {
                let u = a.frame(i);
                let f = a.coordinate(al);
                assert_eq!(
                    a.lahamilt(&u, &f).unwrap(),
                    a.anchor_apply(&u, &f).unwrap(),
                    "{name} anchor"
                );
            }
        }
        // LAbiv against the direct structure-function Poisson bracket
        for _ in 0..20 {
            let f = a.random_astar_function(&mut rng, 2, 2);
            let g = a.random_astar_function(&mut rng, 2, 2);
            assert_eq!(
                a.labiv(&f, &g).unwrap(),
                a.labiv_direct(&f, &g).unwrap(),
                "{name} LAbiv"
            );
        }
        // valid side of the equivalence
        assert!(a.hh_residual().is_zero());
        assert!(a.q_square_residuals().is_empty());
        assert!(a.pp_residual().is_zero());
    }

    // tangent algebroid: LAhamilt reduces to the Schouten bracket
    let tangent = &algebroids[0].1;
    let mixed_to_tstar: Vec<u32> = man
        .context()
        .ids()
        .map(|id| {
            let name = man.context().generator(id).name.clone();
            if let Some(i) = name.strip_prefix("@") {
                tangent
                    .tstar_context()
                    .lookup(&format!("et{i}"))
                    .unwrap()
            } else if name.starts_with("dx") {
                0 // never occurs in a multivector
            } else {
                tangent.tstar_context().lookup(&name).unwrap()
            }
        })
        .collect();
    for _ in 0..10 {
        let p = rng.below(2) as u32 + 1;
        let q = rng.below(2) as u32;
        let u = man.random_multivector(&mut rng, p, 2, 1);
        let v = man.random_multivector(&mut rng, q, 2, 1);
        let s = man.schouten(&u, &v).unwrap();
        let ut = u.relabel(tangent.tstar_context(), &mixed_to_tstar).unwrap();
        let vt = v.relabel(tangent.tstar_context(), &mixed_to_tstar).unwrap();
        let st = s.relabel(tangent.tstar_context(), &mixed_to_tstar).unwrap();
        assert_eq!(tangent.lahamilt(&ut, &vt).unwrap(), st, "tangent = schouten");
    }

    // point base: LAhamilt is the algebraic Schouten bracket of bigbracket
    let point = &algebroids[2].1;
    let lie = L::heisenberg().unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let lhs = point.lahamilt(&point.frame(i), &point.frame(j)).unwrap();
            let rhs = lie.algebraic_schouten(&lie.e(i), &lie.e(j)).unwrap();
            // compare coefficients through the frame identification
            let lhs_t = (0..3)
                .map(|k| lhs.coefficient(&frame_mono(point, k)))
                .collect::<Vec<_>>();
            let rhs_t = (0..3)
                .map(|k| rhs.coefficient(&e_mono(&lie, k)))
                .collect::<Vec<_>>();
            assert_eq!(lhs_t, rhs_t, "point base = algebraic schouten");
        }
    }

    // cotangent algebroid: the Koszul bracket is its sections bracket, and
    // d_A is the Lichnerowicz differential (frame-level check via kras)
    let cot = &algebroids[1].1;
    for al in 0..2 {
        for be in 0..2 {
            let kos = koszul_bracket(&man, &poisson, &man.dx(al), &man.dx(be)).unwrap();
            let sec = cot
                .sections_bracket(&cot.frame(al), &cot.frame(be))
                .unwrap();
            // translate the form result into frame coordinates
            let kos_t = kos
                .relabel(
                    cot.tstar_context(),
                    &man
                        .context()
                        .ids()
                        .map(|id| {
                            let name = man.context().generator(id).name.clone();
                            if let Some(i) = name.strip_prefix("dx") {
                                cot.tstar_context().lookup(&format!("et{i}")).unwrap()
                            } else if name.starts_with('@') {
                                0
                            } else {
                                cot.tstar_context().lookup(&name).unwrap()
                            }
                        })
                        .collect::<Vec<_>>(),
                )
                .unwrap();
            assert_eq!(kos_t, sec, "koszul = cotangent sections bracket");
        }
    }

    // algebroid Frolicher-Nijenhuis bracket: [i_FN, d_A] = [[i_X,d_A],[i_Y,d_A]]
    for (name, a) in &algebroids {
        for _ in 0..5 {
            let sample_vv = |rng: &mut Rng| -> Vec<E> {
                let q = rng.below(2) as u32;
                (0..a.rank()).map(|_| a.random_form(rng, q, 1, 1)).collect()
            };
            let xt = sample_vv(&mut rng);
            let yt = sample_vv(&mut rng);
            let fnb = a.fn_bracket(&xt, &yt).unwrap();
            let d = Operator::diff(a.pia_operators());
            let lhs = a.embed_vv_form(&fnb).unwrap().commutator(&d).unwrap();
            let rhs = a
                .embed_vv_form(&xt)
                .unwrap()
                .commutator(&d)
                .unwrap()
                .commutator(&a.embed_vv_form(&yt).unwrap().commutator(&d).unwrap())
                .unwrap();
            assert!(lhs.op_equal(&rhs).unwrap(), "{name} algebroid FN");
        }
    }

    // invalid candidates fail all three legs
    let base = Algebroid::<Rat>::base_context(1);
    let xg = E::generator(&base, base.lookup("x1").unwrap());
    let bad = Algebroid::candidate(AlgebroidSpec {
        base_dim: 1,
        rank: 2,
        anchor: vec![((1, 1), E::one(&base)), ((2, 1), xg)],
        structure: vec![((2, 1, 2), E::one(&base).neg())],
    })
    .unwrap();
    assert!(!bad.valid());
    assert!(!bad.hh_residual().is_zero());
    assert!(!bad.q_square_residuals().is_empty());
    assert!(!bad.pp_residual().is_zero());
    // and a non-Jacobi point-base candidate
    let base0 = Algebroid::<Rat>::base_context(0);
    let one = E::one(&base0);
    let bad2 = Algebroid::candidate(AlgebroidSpec {
        base_dim: 0,
        rank: 3,
        anchor: vec![],
        structure: vec![
            ((2, 1, 2), one.clone()),
            ((3, 1, 3), one.clone()),
            ((1, 2, 3), one),
        ],
    })
    .unwrap();
    assert!(!bad2.valid());
    assert!(!bad2.hh_residual().is_zero());
    assert!(!bad2.q_square_residuals().is_empty());
    assert!(!bad2.pp_residual().is_zero());

    pass(9, "LAhamilt/LAbiv/LAend + anchor on three algebroids; 3-way equivalence");
}

fn frame_mono(a: &Algebroid<Rat>, k: usize) -> dbcalc_core::gca::Monomial {
    let id = a
        .tstar_context()
        .lookup(&format!("et{}", k + 1))
        .unwrap();
    dbcalc_core::gca::Monomial::new(&[(id, 1)])
}

fn e_mono(l: &L, k: usize) -> dbcalc_core::gca::Monomial {
    let id = l.context().lookup(&format!("e{}", k + 1)).unwrap();
    dbcalc_core::gca::Monomial::new(&[(id, 1)])
}

// ---------------------------------------------------------------------
// 10. Background suite: the equivalence triangle on >= 5 passing and >= 3
//     failing (P, psi) pairs on R^3; psi = 0 reduction; the derived-bracket
//     operator identity for the background Dorfman bracket.

#[test]
fn criterion_10_background_suite() {
    let mut rng = Rng::new(0xCA);
    let man = M::new(3).unwrap();
    let vol = man.dx(0).mul(&man.dx(1)).unwrap().mul(&man.dx(2)).unwrap();
    let p12 = man.pd(0).mul(&man.pd(1)).unwrap();
    let p23 = man.pd(1).mul(&man.pd(2)).unwrap();
    let p13 = man.pd(0).mul(&man.pd(2)).unwrap();

    let passing: Vec<(E, E)> = vec![
        (man.zero(), vol.clone()),
        (p12.clone(), vol.clone()),
        (man.x(0).mul(&p12).unwrap(), vol.clone()),
        (p12.clone(), man.zero()),
        (
            man.x(2).mul(&man.x(2)).unwrap().mul(&p12).unwrap(),
            vol.scale(&Rat::from_int(2)),
        ),
        (p23.clone(), vol.clone()),
    ];
    let failing: Vec<(E, E)> = vec![
        (man.x(1).mul(&p12).unwrap().add(&p23), vol.clone()),
        (man.x(1).mul(&p12).unwrap().add(&p23), man.zero()),
        (man.x(0).mul(&p12).unwrap().add(&p13), vol.clone()),
    ];

    // sample 1-form pairs: all coordinate pairs plus randoms
    let mut pairs = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            pairs.push((man.dx(a), man.dx(b)));
        }
    }
    for _ in 0..6 {
        pairs.push((
            man.random_form(&mut rng, 1, 2, 2),
            man.random_form(&mut rng, 1, 2, 2),
        ));
    }

    for (k, (p, psi)) in passing.iter().enumerate() {
        let bg = Background::new(&man, psi.clone()).unwrap();
        let wzw = bg.wzw_condition(p).unwrap();
        assert!(wzw.holds, "passing pair {k}");
        assert!(
            bg.twisted_square_residuals(p).unwrap().is_empty(),
            "passing pair {k}: d_{{P,psi}} square"
        );
        assert!(
            bg.check_anchor_morphism(p, &pairs).unwrap().passed(),
            "passing pair {k}: anchor"
        );
    }
    for (k, (p, psi)) in failing.iter().enumerate() {
        let bg = Background::new(&man, psi.clone()).unwrap();
        let wzw = bg.wzw_condition(p).unwrap();
        assert!(!wzw.holds, "failing pair {k}");
        assert!(
            !bg.twisted_square_residuals(p).unwrap().is_empty(),
            "failing pair {k}: d_{{P,psi}} square"
        );
        assert!(
            !bg.check_anchor_morphism(p, &pairs).unwrap().passed(),
            "failing pair {k}: anchor"
        );
    }

    // psi = 0: the background Dorfman bracket reduces to the plain one
    let bg0 = Background::new(&man, man.zero()).unwrap();
    for _ in 0..10 {
        let a = Generalized {
            vector: man.random_vector_field(&mut rng, 2),
            form: man.random_form(&mut rng, 1, 2, 1),
        };
        let b = Generalized {
            vector: man.random_vector_field(&mut rng, 2),
            form: man.random_form(&mut rng, 1, 2, 1),
        };
        let plain = man.dorfman(&a, &b).unwrap();
        let tw = bg0.dorfman(&a, &b).unwrap();
        assert_eq!(tw.vector, plain.vector);
        assert_eq!(tw.form, plain.form);
        assert!(!tw.closure_warning);
    }

    // operator identity: i of the background bracket = [[i_a, d^psi], i_b]
    let bg = Background::new(&man, vol.clone()).unwrap();
    let dpsi = bg.twisted_differential().unwrap();
    for _ in 0..8 {
        let a = Generalized {
            vector: man.random_vector_field(&mut rng, 1),
            form: man.random_form(&mut rng, 1, 1, 1),
        };
        let b = Generalized {
            vector: man.random_vector_field(&mut rng, 1),
            form: man.random_form(&mut rng, 1, 1, 1),
        };
        let result = bg.dorfman(&a, &b).unwrap();
        let lhs = man
            .embed(&result.vector)
            .unwrap()
            .add(&man.op_mul(&result.form).unwrap())
            .unwrap();
        let rhs = man
            .embed_generalized(&a)
            .unwrap()
            .commutator(&dpsi)
            .unwrap()
            .commutator(&man.embed_generalized(&b).unwrap())
            .unwrap();
        assert!(lhs.op_equal(&rhs).unwrap(), "background derived bracket");
    }

    // the twisted derived bracket is still Loday: [d^psi, d^psi] = 0
    let alg = CommutatorAlgebra::new(man.operators().clone());
    let ctx = DerivedContext::by_element(&alg, dpsi).unwrap();
    let mut triples = Vec::new();
    for _ in 0..15 {
        let mk = |rng: &mut Rng| {
            let q = rng.below(2) as u32;
            let p = rng.below(2) as u32;
            man.embed(&man.random_tensor(rng, q, p, 1, 1)).unwrap()
        };
        triples.push((mk(&mut rng), mk(&mut rng), mk(&mut rng)));
    }
    assert!(ctx.check_loday(&triples).unwrap().passed());

    pass(10, "equivalence triangle (6 passing / 3 failing), psi=0 reduction, operator identity");
}

// ---------------------------------------------------------------------
// 11. GCYBE chain {d_mu r, d_mu r} = d_mu [r,r]_mu for >= 10 (mu, r) pairs
//     across abelian, Heisenberg, and sl2-type structure constants.

#[test]
fn criterion_11_gcybe_chain() {
    let mut rng = Rng::new(0xCB);
    let structures = vec![
        ("abelian", L::abelian(3).unwrap()),
        ("heisenberg", L::heisenberg().unwrap()),
        ("sl2", L::sl2().unwrap()),
    ];
    let mut count = 0;
    for (name, g) in &structures {
        // basis bivectors e_i ^ e_j plus random combinations
        let mut rs: Vec<E> = Vec::new();
        for i in 0..3 {
            for j in (i + 1)..3 {
                rs.push(g.e(i).mul(&g.e(j)).unwrap());
            }
        }
        rs.push(g.random_bidegree(&mut rng, 2, 0, 2));
        for r in &rs {
            if r.is_zero() {
                continue;
            }
            let rep = g.gcybe_check(r).unwrap();
            assert!(rep.chain_holds, "{name}: chain for r = {r}");
            // the Drinfeld bracket is -1/2 of the Schouten square
            assert_eq!(
                rep.drinfeld,
                rep.schouten_square.scale(&Rat::from_ratio(-1, 2))
            );
            count += 1;
        }
    }
    assert!(count >= 10, "only {count} (mu, r) pairs exercised");

    // the sl2 example: r = e ^ f has [r,r] proportional to h^e^f, which is
    // ad-invariant, so r solves the GCYBE
    let sl2 = &structures[2].1;
    let r = sl2.e(1).mul(&sl2.e(2)).unwrap();
    let rep = sl2.gcybe_check(&r).unwrap();
    assert!(!rep.schouten_square.is_zero());
    assert!(rep.ad_invariant);

    // a Heisenberg r with nonzero square: r = e1^e3 + e2^e3 has zero
    // square (center), so use r = e1^e2 which squares into the center
    let heis = &structures[1].1;
    let r = heis.e(0).mul(&heis.e(1)).unwrap();
    let rep = heis.gcybe_check(&r).unwrap();
    assert!(rep.chain_holds);

    pass(11, "coboundary chain on >= 10 (mu, r) pairs over three structures");
}
