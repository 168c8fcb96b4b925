//! Named verification suites, each optionally run with one deliberately
//! corrupted constant so that its checks can be seen to bite.

use num_complex::Complex64;
use pvi_field::Var;

use crate::backlund::{self, canonical_check, commutes_with_delta, generator_map, reflection_map, BirationalMap};
use crate::expr::{c, fr, p, q, t, Rf};
use crate::hamiltonian::{
    expanded_system, expected_a2_residues, fuchsian_coeffs_scaled, hamiltonian_h_alpha,
    hamiltonian_h_shifted, pvi_constants, pvi_residual_symbolic, residue_at, residue_at_infinity,
    HamiltonianSystem, ParamVec,
};
use crate::lax::frobenius::{FrobeniusSeries, NumericLax};
use crate::lax::{self, RfMatrix};
use crate::numeric::sample_identity;
use crate::report::{Check, Report};
use crate::weyl::{self, Generator, CARTAN};
use crate::{CoreError, Result};

pub const SUITES: [&str; 10] = [
    "weyl-relations",
    "zero-curvature",
    "gauge-s",
    "gauge-r",
    "borel-form",
    "canonical",
    "hamiltonian-forms",
    "diagram-auto",
    "fuchsian-residues",
    "frobenius",
];

/// The eight generators of the extended group.
pub const GENERATORS: [Generator; 8] = [
    Generator::S(0),
    Generator::S(1),
    Generator::S(2),
    Generator::S(3),
    Generator::S(4),
    Generator::R(1),
    Generator::R(3),
    Generator::R(4),
];

/// Descriptions of the single-constant corruptions available for a suite.
pub fn corruptions(suite: &str) -> Result<&'static [&'static str]> {
    Ok(match suite {
        "weyl-relations" => &[
            "s0 moves p by 2 a0/(q - t)",
            "Cartan entry a02 set to -2",
        ],
        "zero-curvature" => &["x1 doubled in B"],
        "gauge-s" => &["2 a0/(q - t) in G0"],
        "gauge-r" => &["entry (2,3) of Gamma1 doubled"],
        "borel-form" => &["E1 enters M with coefficient 2"],
        "canonical" => &["s0 sends p to 2p - a0/(q - t)"],
        "hamiltonian-forms" => &["kt - 2 in place of kt - 1"],
        "diagram-auto" => &["sign of the first row of C3 flipped"],
        "fuchsian-residues" => &["2 q(q - 1) p in a2"],
        "frobenius" => &["M0 entry (1,2) doubled"],
        other => return Err(unknown(other)),
    })
}

/// The corruption picked by `seed` for `suite`.
pub fn seeded_corruption(suite: &str, seed: u64) -> Result<usize> {
    let n = corruptions(suite)?.len() as u64;
    Ok((seed % n) as usize)
}

fn unknown(suite: &str) -> CoreError {
    CoreError::Invalid(format!("unknown suite `{suite}`; expected one of {}", SUITES.join(", ")))
}

/// Runs `suite`, corrupted by the given entry of [`corruptions`] if any.
pub fn run_suite(suite: &str, corruption: Option<usize>) -> Result<Report> {
    if let Some(i) = corruption {
        let n = corruptions(suite)?.len();
        if i >= n {
            return Err(CoreError::Invalid(format!("suite `{suite}` has {n} corruptions, asked for {i}")));
        }
    }
    let mutated = |i: usize| corruption == Some(i);
    match suite {
        "weyl-relations" => weyl_relations(mutated(0), mutated(1)),
        "zero-curvature" => zero_curvature(mutated(0)),
        "gauge-s" => gauge_s(mutated(0)),
        "gauge-r" => gauge_r(mutated(0)),
        "borel-form" => borel_form(mutated(0)),
        "canonical" => canonical(mutated(0)),
        "hamiltonian-forms" => hamiltonian_forms(mutated(0)),
        "diagram-auto" => diagram_auto(mutated(0)),
        "fuchsian-residues" => fuchsian_residues(mutated(0)),
        "frobenius" => frobenius(mutated(0)),
        other => Err(unknown(other)),
    }
}

fn zero_check(suite: &str, name: String, m: &RfMatrix, anchor: &str) -> Check {
    let pass = m.is_zero();
    let detail = if pass {
        "all 64 entries zero".to_string()
    } else {
        format!("nonzero at {:?}", one_based(&m.nonzero_positions()))
    };
    Check::new(suite, name, pass, detail, anchor)
}

fn one_based(pos: &[(usize, usize)]) -> Vec<(usize, usize)> {
    pos.iter().map(|&(i, j)| (i + 1, j + 1)).collect()
}

fn equality(suite: &str, name: impl Into<String>, a: &Rf, b: &Rf, anchor: &str) -> Check {
    let pass = a == b;
    let detail = if pass {
        "identical".to_string()
    } else {
        format!("difference {}", a - b)
    };
    Check::new(suite, name, pass, detail, anchor)
}

fn corrupted_s0() -> BirationalMap {
    let mut m = reflection_map(0);
    m.p = p() - c(2) * backlund::alpha(0) / (q() - t());
    m
}

fn weyl_relations(bad_map: bool, bad_cartan: bool) -> Result<Report> {
    let mut cartan = CARTAN;
    if bad_cartan {
        cartan[0][2] = -2;
    }
    let mut report = weyl::verify_relations_with(&cartan);
    let gens = move |g: Generator| -> Result<BirationalMap> {
        if bad_map && g == Generator::S(0) {
            Ok(corrupted_s0())
        } else {
            generator_map(g)
        }
    };
    report.extend(backlund::verify_map_relations(&gens)?);
    Ok(report)
}

fn zero_curvature(bad: bool) -> Result<Report> {
    const S: &str = "zero-curvature";
    let mut coeffs = lax::BCoefficients::symbolic();
    if bad {
        coeffs.x[0] = c(2) * &coeffs.x[0];
    }
    let (m, b) = (lax::build_m(), lax::build_b_from(&coeffs));
    let sys = HamiltonianSystem::symbolic();
    let residual = lax::zero_curvature_residual_with(&m, &b, &|x| sys.delta(x));
    let mut report = Report::new();
    report.push(zero_check(S, "d(M) + z dB/dz - [B, M] = 0".into(), &residual, "zero-curvature identity"));
    let explicit = lax::zero_curvature_residual_with(&m, &b, &|x| x.differentiate(Var::T));
    let qdot = -explicit.get(2, 3).coeff_int(0);
    let pdot = explicit.get(1, 2).coeff_int(0);
    let (want_q, want_p) = expanded_system(&ParamVec::symbolic());
    report.push(equality(S, "converse: dq/dt read from the (3,4) entry", &qdot, &want_q, "expanded Hamiltonian system"));
    report.push(equality(S, "converse: dp/dt read from the (2,3) entry", &pdot, &want_p, "expanded Hamiltonian system"));
    let rest = lax::zero_curvature_residual_with(&m, &b, &|x| {
        x.differentiate(Var::T) + &qdot * x.differentiate(Var::Q) + &pdot * x.differentiate(Var::P)
    });
    report.push(zero_check(S, "converse: extracted flow solves every entry".into(), &rest, "zero-curvature identity"));
    Ok(report)
}

fn gauge_s(bad: bool) -> Result<Report> {
    const S: &str = "gauge-s";
    let mut report = Report::new();
    for k in 0..5 {
        let mut g = lax::g_coefficient(k);
        if bad && k == 0 {
            g = c(2) * g;
        }
        let (gm, gi) = lax::gauge_g_with(k, &g);
        let (rm, rb) = lax::gauge_residual_with(&reflection_map(k), &gm, &gi)?;
        report.push(zero_check(S, format!("s{k}(M) = G{k} M G{k}^-1 - z dG{k}/dz G{k}^-1"), &rm, "gauge action of s_k"));
        report.push(zero_check(S, format!("s{k}(B) = G{k} B G{k}^-1 + d(G{k}) G{k}^-1"), &rb, "gauge action of s_k"));
        report.push(Check::new(
            S,
            format!("G{k} in the loop group"),
            gm.in_group(),
            "G^t J G = J",
            "gauge action of s_k",
        ));
        report.extend(lax::weyl_lift_check(k));
    }
    Ok(report)
}

fn gauge_r(bad: bool) -> Result<Report> {
    const S: &str = "gauge-r";
    let mut report = Report::new();
    for k in [1, 3, 4] {
        let sys = lax::root_system(k);
        let mut gamma = lax::gamma_explicit(k);
        if bad && k == 1 {
            let doubled = gamma.get(1, 2).scale(&pvi_field::RootExtElement::from(c(2)));
            gamma.set(1, 2, doubled);
        }
        let gamma_inv = lax::gamma_inverse(k)?;
        let factored = lax::gamma_factored(k)?;
        let diff = factored.sub(&gamma);
        report.push(Check::new(
            S,
            format!("Gamma{k} = D(a{k}) exp(E2/c{k}) z^-w{k} C{k}"),
            diff.is_zero(),
            format!("{} differing entries", diff.nonzero_positions().len()),
            "factored form of Gamma_k",
        ));
        let defect = gamma.group_defect();
        report.push(Check::new(
            S,
            format!("Gamma{k}^t J Gamma{k} = J"),
            defect.is_zero(),
            format!("{} nonzero defect entries", defect.nonzero_positions().len()),
            "Gamma_k in the loop group",
        ));
        let map = lax::derived_r_map(k)?;
        let (rm, rb) = lax::gauge_residual_ext(&sys, &map, &gamma, &gamma_inv)?;
        for (what, r) in [("M", rm), ("B", rb)] {
            let pass = r.is_zero();
            report.push(Check::new(
                S,
                format!("r{k}({what}) = Gamma{k} gauge of {what}"),
                pass,
                if pass {
                    format!("exact over Q(a, q, p, t)({})", lax::radical(k).0)
                } else {
                    format!("nonzero at {:?}", one_based(&r.nonzero_positions()))
                },
                "gauge action of r_k",
            ));
        }
        // Independent numeric look at group membership, branch by branch.
        let product = gamma.transpose().mul(&lax::LoopMatrix::j()).mul(&gamma);
        let j = lax::ExtMatrix::j();
        let mut worst = 0.0f64;
        let mut ok = true;
        for (a, b) in product.entries().iter().zip(j.entries()) {
            let exps: std::collections::BTreeSet<i32> = a.terms().chain(b.terms()).map(|(h, _)| h).collect();
            for h in exps {
                let zero = pvi_field::RootExtElement::zero();
                let l = a.coeff(h).unwrap_or(&zero);
                let r = b.coeff(h).unwrap_or(&zero);
                let rep = sample_identity(l, r, 100, 1e-10, 0x5eed + k as u64);
                worst = worst.max(rep.max_deviation);
                ok &= rep.pass;
            }
        }
        report.push(Check::new(
            S,
            format!("Gamma{k}^t J Gamma{k} = J at 100 random points"),
            ok,
            format!("max relative deviation {worst:.2e}"),
            "Gamma_k in the loop group",
        ));
    }
    Ok(report)
}

fn borel_form(bad: bool) -> Result<Report> {
    const S: &str = "borel-form";
    let mut report = Report::new();
    let mut m_borel = lax::build_m_borel();
    if bad {
        m_borel = m_borel.add(&lax::e(1));
    }
    let m = lax::build_m();
    let b = lax::build_b();
    for (name, x, y) in [("M", &m, &m_borel), ("B", &b, &lax::build_b_borel())] {
        let d = x.sub(y);
        report.push(Check::new(
            S,
            format!("{name} equals its Chevalley expansion"),
            d.is_zero(),
            format!("{} differing entries", d.nonzero_positions().len()),
            "Borel-subalgebra form of M and B",
        ));
    }
    for (name, x) in [("M", &m), ("B", &b)] {
        report.push(Check::new(
            S,
            format!("{name} lies in the loop algebra"),
            x.in_algebra(),
            "J X + X^t J = 0",
            "Borel-subalgebra form of M and B",
        ));
    }
    let vals = lax::affine_root_values(&lax::cartan_part(&m_borel))?;
    for (j, val) in vals.iter().enumerate() {
        report.push(equality(S, format!("alpha{j}(z d/dz + H) = a{j}"), val, &backlund::alpha(j), "affine root values"));
    }
    Ok(report)
}

fn canonical(bad: bool) -> Result<Report> {
    const S: &str = "canonical";
    let mut report = Report::new();
    for g in GENERATORS {
        let mut m = generator_map(g)?;
        if bad && g == Generator::S(0) {
            m.p = c(2) * p() - backlund::alpha(0) / (q() - t());
        }
        report.push(Check::new(
            S,
            format!("{g} commutes with delta"),
            commutes_with_delta(&m)?,
            "delta(m(x)) = m(delta(x)) for x = q, p",
            "Backlund transformations as differential-field automorphisms",
        ));
        report.push(Check::new(
            S,
            format!("{g} is canonical"),
            canonical_check(&m)?,
            "{m(p), m(q)} = 1",
            "Backlund transformations as differential-field automorphisms",
        ));
    }
    Ok(report)
}

fn hamiltonian_forms(bad: bool) -> Result<Report> {
    const S: &str = "hamiltonian-forms";
    let pv = ParamVec::symbolic();
    let h = hamiltonian_h_shifted(&pv, if bad { 2 } else { 1 });
    let mut report = Report::new();
    report.push(equality(S, "kappa form of H = alpha form of H", &h, &hamiltonian_h_alpha(&pv), "two forms of t(t-1)H"));
    let (qd, pd) = expanded_system(&pv);
    report.push(equality(S, "dq/dt = dH/dp", &h.differentiate(Var::P), &qd, "expanded Hamiltonian system"));
    report.push(equality(S, "dp/dt = -dH/dq", &-h.differentiate(Var::Q), &pd, "expanded Hamiltonian system"));
    let delta = |f: &Rf| f.differentiate(Var::T) + &qd * f.differentiate(Var::Q) + &pd * f.differentiate(Var::P);
    report.push(equality(S, "delta(H) = dH/dt", &delta(&h), &h.differentiate(Var::T), "expanded Hamiltonian system"));
    let y1 = delta(&q());
    let y2 = delta(&y1);
    let res = pvi_residual_symbolic(&q(), &y1, &y2, &pvi_constants(&pv))?;
    report.push(equality(S, "q solves the scalar equation", &res, &Rf::zero(), "scalar sixth Painleve equation"));
    Ok(report)
}

fn diagram_auto(bad: bool) -> Result<Report> {
    let mut report = Report::new();
    for k in [1, 3, 4] {
        let (mut r, mut r_inv) = lax::rotation_lift::<Rf>(k);
        if bad && k == 3 {
            let mut cm = lax::c_matrix::<Rf>(3);
            for j in 0..lax::N {
                let x = cm.get(0, j).neg();
                cm.set(0, j, x);
            }
            r = lax::z_weight::<Rf>(3, false).mul(&cm);
            r_inv = cm.transpose().mul(&lax::z_weight(3, true));
        }
        report.extend(lax::diagram_automorphism_check_with(k, &r, &r_inv));
    }
    Ok(report)
}

fn fuchsian_residues(bad: bool) -> Result<Report> {
    const S: &str = "fuchsian-residues";
    let pv = ParamVec::symbolic();
    let (a1, a2) = fuchsian_coeffs_scaled(&pv, if bad { 2 } else { 1 });
    let [k0, ..] = pv.kappas();
    let want = expected_a2_residues(&pv);
    let mut report = Report::new();
    report.push(equality(S, "Res_{x=0} a1 dx = 1 - k0", &residue_at(&a1, &Rf::zero())?, &(c(1) - k0), "Riemann scheme of the Fuchsian equation"));
    for (i, (name, at)) in [("0", Rf::zero()), ("1", c(1)), ("t", t()), ("q", q())].into_iter().enumerate() {
        report.push(equality(
            S,
            format!("Res_{{x={name}}} a2 dx"),
            &residue_at(&a2, &at)?,
            &want[i],
            "residues of a2",
        ));
    }
    report.push(equality(S, "Res_{x=inf} a2 dx", &residue_at_infinity(&a2), &want[4], "residues of a2"));
    report.push(equality(S, "Res_{x=q} a2 dx = p", &residue_at(&a2, &q())?, &p(), "residue definitions of p and H"));
    report.push(equality(
        S,
        "-Res_{x=t} a2 dx = H",
        &-residue_at(&a2, &t())?,
        &hamiltonian_h_shifted(&pv, 1),
        "residue definitions of p and H",
    ));
    Ok(report)
}

/// Generic non-resonant sample point for the Frobenius suite.
pub fn frobenius_sample() -> (ParamVec, Complex64, Complex64, Complex64) {
    (
        ParamVec::epsilon([fr(3, 10), fr(1, 7), fr(2, 11), fr(1, 13)]),
        Complex64::new(0.3, 0.2),
        Complex64::new(-0.7, 0.1),
        Complex64::new(2.5, 0.0),
    )
}

pub const FROBENIUS_ORDER: usize = 8;
pub const FROBENIUS_TOL: f64 = 1e-10;

fn frobenius(bad: bool) -> Result<Report> {
    const S: &str = "frobenius";
    let (pv, q0, p0, t0) = frobenius_sample();
    let lax = NumericLax::at(&pv, q0, p0, t0)?;
    let mut used = lax.clone();
    if bad {
        used.m0[0][1] *= 2.0;
    }
    let series = FrobeniusSeries::solve(&used, FROBENIUS_ORDER)?;
    let residuals = series.residuals(&lax);
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    let mut report = Report::new();
    report.push(Check::new(
        S,
        format!("order-{FROBENIUS_ORDER} recursion residuals below {FROBENIUS_TOL:e}"),
        worst < FROBENIUS_TOL,
        format!("max relative residual {worst:.2e}"),
        "formal solution at z = 0",
    ));
    report.push(Check::new(
        S,
        "Psi0 is unit upper triangular",
        series.leading_is_unit_upper(0.0),
        "exact zeros below the diagonal, ones on it",
        "formal solution at z = 0",
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_lists_a_corruption() {
        for s in SUITES {
            assert!(!corruptions(s).unwrap().is_empty());
        }
        assert!(corruptions("nope").is_err());
        assert!(run_suite("nope", None).is_err());
    }

    #[test]
    fn cheap_suites_pass_and_their_corruptions_fail() {
        for s in ["diagram-auto", "frobenius", "borel-form"] {
            assert!(run_suite(s, None).unwrap().passed(), "{s}");
            assert!(!run_suite(s, Some(0)).unwrap().passed(), "{s} mutated");
        }
    }
}
