//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! status if any criterion fails.

use std::time::Instant;

use num_complex::Complex64;
use pvi_core::backlund::{self, canonical_check, commutes_with_delta, generator_map};
use pvi_core::hamiltonian::{expanded_system, ParamVec};
use pvi_core::lax;
use pvi_core::numeric::{backlund_round_trip, PhasePoint};
use pvi_core::report::Report;
use pvi_core::suites::{corruptions, run_suite, SUITES, GENERATORS};
use pvi_core::weyl;
use pvi_field::rat;

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn report_outcome(r: pvi_core::Result<Report>) -> Outcome {
    let r = r.map_err(|e| e.to_string())?;
    let failed: Vec<String> = r.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    Ok((failed.is_empty(), format!("{} checks, {} failed {:?}", r.checks.len(), failed.len(), failed)))
}

fn zero_curvature() -> Outcome {
    let r = lax::zero_curvature_residual();
    Ok((r.is_zero(), format!("{} nonzero entries", r.nonzero_positions().len())))
}

fn converse() -> Outcome {
    let (qd, pd) = lax::converse_solve().map_err(|e| e.to_string())?;
    let (wq, wp) = expanded_system(&ParamVec::symbolic());
    Ok((qd == wq && pd == wp, format!("dq/dt equal: {}, dp/dt equal: {}", qd == wq, pd == wp)))
}

fn hamiltonian_consistency() -> Outcome {
    let r = run_suite("hamiltonian-forms", None).map_err(|e| e.to_string())?;
    let mut all = Report::new();
    for c in r.checks.into_iter().filter(|c| !c.name.contains("scalar")) {
        all.push(c);
    }
    all.extend(run_suite("fuchsian-residues", None).map_err(|e| e.to_string())?);
    report_outcome(Ok(all))
}

fn pvi_equivalence() -> Outcome {
    let r = run_suite("hamiltonian-forms", None).map_err(|e| e.to_string())?;
    let c = r.checks.iter().find(|c| c.name.contains("scalar")).ok_or("missing check")?;
    Ok((c.pass, c.detail.clone()))
}

fn group_structure() -> Outcome {
    let mut r = weyl::verify_relations();
    r.extend(backlund::verify_map_relations(&generator_map).map_err(|e| e.to_string())?);
    report_outcome(Ok(r))
}

fn differential_symmetry() -> Outcome {
    let mut bad = Vec::new();
    for g in GENERATORS {
        let m = generator_map(g).map_err(|e| e.to_string())?;
        if !commutes_with_delta(&m).map_err(|e| e.to_string())? {
            bad.push(format!("{g} vs delta"));
        }
        if !canonical_check(&m).map_err(|e| e.to_string())? {
            bad.push(format!("{g} not canonical"));
        }
    }
    Ok((bad.is_empty(), format!("8 generators, failures {bad:?}")))
}

fn reflections() -> Outcome {
    let mut bad = Vec::new();
    for k in 0..5 {
        let (m, b) = lax::gauge_residual_s(k).map_err(|e| e.to_string())?;
        if !m.is_zero() || !b.is_zero() {
            bad.push(k);
        }
    }
    Ok((bad.is_empty(), format!("k = 0..4, nonzero residual pairs at {bad:?}")))
}

fn numeric_backlund() -> Outcome {
    let pv = ParamVec::from_alpha_tail([rat(1, 5), rat(1, 10), rat(1, 8), rat(1, 40)]);
    let start = PhasePoint::new(Complex64::new(2.0, 0.0), Complex64::new(0.4, 0.3), Complex64::new(0.5, -0.2));
    let (mut err, mut res) = (0.0f64, 0.0f64);
    for g in GENERATORS {
        let m = generator_map(g).map_err(|e| e.to_string())?;
        let c = backlund_round_trip(&m, &pv, start, Complex64::new(3.0, 0.0), 1e-9, 64).map_err(|e| e.to_string())?;
        err = err.max(c.endpoint_error);
        res = res.max(c.residual_original).max(c.residual_transformed);
    }
    Ok((err < 1e-6 && res < 1e-6, format!("max endpoint error {err:.2e}, max residual {res:.2e}")))
}

fn mutation_sensitivity() -> Outcome {
    let mut survivors = Vec::new();
    let mut total = 0;
    for s in SUITES {
        for i in 0..corruptions(s).map_err(|e| e.to_string())?.len() {
            total += 1;
            if run_suite(s, Some(i)).map_err(|e| e.to_string())?.passed() {
                survivors.push(format!("{s}#{i}"));
            }
        }
    }
    Ok((survivors.is_empty(), format!("{total} corruptions, undetected {survivors:?}")))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("zero-curvature identity", zero_curvature),
        ("converse direction", converse),
        ("Hamiltonian consistency", hamiltonian_consistency),
        ("scalar equation equivalence", pvi_equivalence),
        ("group structure", group_structure),
        ("differential-field symmetry", differential_symmetry),
        ("gauge action of reflections", reflections),
        ("gauge action of rotations", || report_outcome(run_suite("gauge-r", None))),
        ("diagram automorphisms", || report_outcome(run_suite("diagram-auto", None))),
        ("numeric Backlund check", numeric_backlund),
        ("Frobenius recursion", || report_outcome(run_suite("frobenius", None))),
        ("mutation sensitivity", mutation_sensitivity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {detail} ({:.1?})", i + 1, start.elapsed());
        failed += usize::from(!pass);
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
