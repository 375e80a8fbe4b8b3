use jacobi_curves::classify::{alphas, compatible_normalization, equivalent_tuples, is_exceptional};
use jacobi_curves::exactalg::jet::Jet;
use jacobi_curves::exactalg::mpoly::MPoly;
use jacobi_curves::exactalg::scalar::{rat, rat_int, Rat};
use jacobi_curves::exactalg::vf::{lie_bracket, PolyVF};
use jacobi_curves::projcurve::{
    apply_operator, canonical_parametrization, curve_from_curvatures, fundamental_matrix, gram, invariant_symplectic_form, reparametrize,
    semi_canonicalize, symplectic_curvatures, to_projective, wilczynski, CurveODE, ParamTag,
};
use proptest::prelude::*;

const K: usize = 8;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-9i64..=9, 1i64..=5).prop_map(|(p, q)| rat(p, q))
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    small_rat().prop_filter("nonzero", |r| *r != rat_int(0))
}

fn jet(order: usize) -> impl Strategy<Value = Jet<Rat>> {
    prop::collection::vec(small_rat(), order + 1).prop_map(move |c| Jet::new(c, order))
}

fn tuple(m: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec(small_rat(), m)
}

/// Polynomials of total degree at most 3: each term is a product of up to three variables.
fn poly(nvars: usize) -> impl Strategy<Value = MPoly> {
    prop::collection::vec((prop::collection::vec(0..nvars, 0..=3), small_rat()), 0..4).prop_map(move |terms| {
        MPoly::from_terms(
            nvars,
            terms.into_iter().map(|(vars, c)| {
                let mut e = vec![0u32; nvars];
                vars.iter().for_each(|&v| e[v] += 1);
                (e, c)
            }),
        )
    })
}

fn field(nvars: usize) -> impl Strategy<Value = PolyVF> {
    prop::collection::vec(poly(nvars), nvars).prop_map(|c| PolyVF::new(c).unwrap())
}

fn three_fields() -> impl Strategy<Value = (PolyVF, PolyVF, PolyVF)> {
    (1usize..=6).prop_flat_map(|n| (field(n), field(n), field(n)))
}

fn zero_jet_equal(a: &Jet<Rat>, b: &Jet<Rat>) -> bool {
    a.sub_ref(b).is_zero_jet()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_ring_axioms(a in jet(K), b in jet(K), c in jet(K)) {
        prop_assert!(zero_jet_equal(&a.mul_ref(&b).mul_ref(&c), &a.mul_ref(&b.mul_ref(&c))));
        prop_assert!(zero_jet_equal(&a.mul_ref(&b.add_ref(&c)), &a.mul_ref(&b).add_ref(&a.mul_ref(&c))));
        prop_assert!(zero_jet_equal(&a.add_ref(&b).add_ref(&c), &a.add_ref(&b.add_ref(&c))));
        prop_assert!(zero_jet_equal(&a.mul_ref(&b), &b.mul_ref(&a)));
    }

    #[test]
    fn rat_ring_axioms(a in small_rat(), b in small_rat(), c in small_rat()) {
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
    }

    #[test]
    fn differentiate_inverts_integrate(a in jet(K)) {
        let mut c = a.coeffs().to_vec();
        c[0] = rat_int(0);
        let a = Jet::new(c, K);
        prop_assert_eq!(a.integrate().differentiate().unwrap(), a.clone());
        prop_assert!(zero_jet_equal(&a.differentiate().unwrap().integrate(), &a.truncate(K - 1)));
    }

    #[test]
    fn compose_with_series_inverse(tail in prop::collection::vec(small_rat(), K - 1), lead in nonzero_rat()) {
        let mut c = vec![rat_int(0), lead];
        c.extend(tail);
        let a = Jet::new(c, K);
        let inv = a.invert_series().unwrap();
        prop_assert!(zero_jet_equal(&a.compose(&inv).unwrap(), &Jet::var(K)));
        prop_assert!(zero_jet_equal(&inv.compose(&a).unwrap(), &Jet::var(K)));
    }

    #[test]
    fn bracket_antisymmetry((u, v, _w) in three_fields()) {
        let uv = lie_bracket(&u, &v).unwrap();
        let vu = lie_bracket(&v, &u).unwrap();
        prop_assert!(uv.add(&vu).is_zero());
    }

    #[test]
    fn bracket_jacobi_identity((u, v, w) in three_fields()) {
        let a = lie_bracket(&u, &lie_bracket(&v, &w).unwrap()).unwrap();
        let b = lie_bracket(&v, &lie_bracket(&w, &u).unwrap()).unwrap();
        let c = lie_bracket(&w, &lie_bracket(&u, &v).unwrap()).unwrap();
        prop_assert!(a.add(&b).add(&c).is_zero());
    }
}

fn projective_ode(m: usize, order: usize) -> impl Strategy<Value = CurveODE<Rat>> {
    prop::collection::vec(jet(order), 2 * m - 2).prop_map(move |mut b| {
        b.push(Jet::exact(rat_int(0)));
        b.push(Jet::exact(rat_int(0)));
        CurveODE::new(m, b, ParamTag::Projective).unwrap()
    })
}

fn curvature_jets() -> impl Strategy<Value = Vec<Jet<Rat>>> {
    (1usize..=3).prop_flat_map(|m| prop::collection::vec(jet(12), m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// `W_i` has weight `i + 2` under Möbius changes `t = a τ / (1 + k τ)`.
    #[test]
    fn wilczynski_covariance(c in (2usize..=3).prop_flat_map(|m| projective_ode(m, 10 + 2 * m)), a in nonzero_rat(), k in small_rat()) {
        let m = c.m;
        let order = 10 + 2 * m;
        let v = Jet::var(order).scale_rat(&a).div_ref(&Jet::new(vec![rat_int(1), k], order)).unwrap();
        let moved = semi_canonicalize(&reparametrize(&c, &v).unwrap()).unwrap();
        prop_assert!(moved.b[2 * m - 2].is_zero_jet());
        let w0 = wilczynski(&c).unwrap();
        let w1 = wilczynski(&moved.with_tag(ParamTag::Projective)).unwrap();
        let dv = v.differentiate().unwrap();
        for i in 1..=w0.len() {
            let pulled = w0.get(i).compose(&v).unwrap().mul_ref(&dv.pow(i + 2));
            prop_assert!(zero_jet_equal(w1.get(i), &pulled), "W_{}", i);
        }
    }

    /// For the semi-canonical section of a self-adjoint equation, `σ(E^(i), E^(j))` vanishes
    /// for `i + j <= 2m - 2` and equals `(-1)^(i+m)` for `i + j = 2m - 1`.
    #[test]
    fn gram_pattern(rho in curvature_jets()) {
        let m = rho.len();
        let c = curve_from_curvatures(m, &rho).unwrap();
        let form = invariant_symplectic_form(&c).unwrap();
        let g = gram(&c, &form);
        for i in 0..2 * m {
            for j in 0..2 * m {
                if i + j <= 2 * m - 2 {
                    prop_assert!(g[i][j].is_zero_jet(), "G[{}][{}]", i, j);
                } else if i + j == 2 * m - 1 {
                    let want = rat_int(if (i + m) % 2 == 0 { 1 } else { -1 });
                    prop_assert!(zero_jet_equal(&g[i][j], &Jet::exact(want)), "G[{}][{}] = {:?}", i, j, g[i][j]);
                }
            }
        }
    }

    /// `B` rebuilt from the curvatures it determines is the original `B`.
    #[test]
    fn selfadjoint_matching_is_exact(rho in curvature_jets()) {
        let m = rho.len();
        let c = curve_from_curvatures(m, &rho).unwrap();
        let back = curve_from_curvatures(m, &symplectic_curvatures(&c).unwrap().rho).unwrap();
        for (x, y) in c.b.iter().zip(&back.b) {
            prop_assert!(zero_jet_equal(x, y));
        }
    }

    /// Semi-canonical solutions times `g = exp(∫ B_{2m-1} / 2m)` solve the original equation,
    /// and the projective form has `B_{2m-1} = B_{2m-2} = 0`.
    #[test]
    fn normal_forms_keep_the_curve(rho in curvature_jets(), top in jet(12)) {
        let m = rho.len();
        let mut c = curve_from_curvatures(m, &rho).unwrap();
        c.b[2 * m - 1] = top.clone();
        c.tag = ParamTag::Arbitrary;
        let s = semi_canonicalize(&c).unwrap();
        let g = top.scale_rat(&rat(1, 2 * m as i64)).integrate().exp().unwrap();
        let y = fundamental_matrix(&s, 12);
        for a in 0..2 * m {
            prop_assert!(apply_operator(&c, &y[0][a].mul_ref(&g)).unwrap().is_zero_jet(), "solution {}", a);
        }
        let (p, _) = to_projective(&s).unwrap();
        prop_assert!(p.b[2 * m - 2].is_zero_jet() && p.b[2 * m - 1].is_zero_jet());
    }

    /// `W_{2 i0}(υ) υ'^{2 i0 + 2} = ε` along the canonical parameter.
    #[test]
    fn canonical_parameter_identity(r in nonzero_rat(), tail in prop::collection::vec(small_rat(), 3), drift in small_rat()) {
        // ρ_1 = O(t^3), so A(0) = -ρ_2(0) = -r^4 and its fourth root is rational
        let mut rho1 = vec![rat_int(0); 3];
        rho1.extend(tail);
        let r4 = &r * &r * &r * &r;
        let rho = vec![Jet::new(rho1, 12), Jet::new(vec![r4, drift], 12)];
        let c = curve_from_curvatures(2, &rho).unwrap();
        let (proj, _) = to_projective(&c).unwrap();
        let a = wilczynski(&proj).unwrap().get(2).clone();
        let cp = canonical_parametrization(&c);
        prop_assume!(cp.is_ok(), "{:?}", cp.err());
        let cp = cp.unwrap();
        let v = &cp.upsilon;
        let lhs = a.compose(v).unwrap().mul_ref(&v.differentiate().unwrap().pow(2 * cp.i0 + 2));
        prop_assert!(lhs.sub_ref(&Jet::exact(rat_int(cp.epsilon as i64))).is_zero_jet());
    }
}

fn scaled(r: &[Rat], c: &Rat) -> Vec<Rat> {
    let c2 = c * c;
    let mut f = c2.clone();
    r.iter()
        .map(|x| {
            let y = x * &f;
            f = &f * &c2;
            y
        })
        .collect()
}

fn any_tuple() -> impl Strategy<Value = Vec<Rat>> {
    (1usize..=4).prop_flat_map(tuple)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exceptionality_is_scale_invariant(r in any_tuple(), c in nonzero_rat()) {
        prop_assert_eq!(is_exceptional(&r).is_exceptional, is_exceptional(&scaled(&r, &c)).is_exceptional);
    }

    #[test]
    fn exceptional_family_from_alphas(m in 1usize..=8, c in small_rat()) {
        prop_assert!(is_exceptional(&scaled(&alphas(m), &c)).is_exceptional);
    }

    #[test]
    fn equivalence_relation(r in any_tuple(), c in nonzero_rat(), d in nonzero_rat()) {
        let s = scaled(&r, &c);
        let t = scaled(&s, &d);
        prop_assert!(equivalent_tuples(&r, &r).unwrap().is_some());
        let rs = equivalent_tuples(&r, &s).unwrap();
        prop_assert!(rs.is_some());
        prop_assert_eq!(rs.is_some(), equivalent_tuples(&s, &r).unwrap().is_some());
        prop_assert!(equivalent_tuples(&s, &t).unwrap().is_some());
        prop_assert!(equivalent_tuples(&r, &t).unwrap().is_some());
    }

    /// For `m = 2` and `r_1 = 0` the normal form is `(0, -ε)`.
    #[test]
    fn normal_form_with_zero_first_curvature(r2 in nonzero_rat()) {
        let n = compatible_normalization(&[rat_int(0), r2]).unwrap();
        prop_assert_eq!(n.i0, 1);
        prop_assert_eq!(n.normalized.clone(), vec![rat_int(0), rat_int(-n.epsilon as i64)]);
        let again = compatible_normalization(&n.normalized).unwrap();
        prop_assert_eq!(again.normalized, n.normalized);
        prop_assert_eq!(again.c.as_rational(), Some(rat_int(1)));
    }
}
