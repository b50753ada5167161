//! Human-readable output. Rationals are shown exactly with a decimal
//! approximation alongside.

use std::collections::BTreeMap;

use polyfix::classify::{ClassificationReport, Coefficient, CoefficientResult};
use polyfix::dynamics::TheoremVerdict;
use polyfix::metric::{AxiomViolation, ValidationReport};
use polyfix::oracle::{FuzzReport, ImplicationResult};
use polyfix::picard::{IterationTrace, UniquenessReport};
use polyfix::rational::Rational;
use polyfix::registry::ReproReport;

fn exact(r: &Rational) -> String {
    if r.denom() == &1.into() {
        r.to_string()
    } else {
        format!("{r} (~{:.6})", r.to_f64())
    }
}

fn coefficient(c: &Coefficient) -> String {
    match c {
        Coefficient::Finite(r) => exact(r),
        Coefficient::Infeasible => "infeasible".into(),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn validation(report: &ValidationReport) {
    if report.is_valid() {
        println!("valid metric");
        return;
    }
    println!("not a metric: {} violation(s)", report.violations.len());
    for v in &report.violations {
        match v {
            AxiomViolation::NonzeroDiagonal { i } => println!("  d({i},{i}) != 0"),
            AxiomViolation::Asymmetric { i, j } => println!("  d({i},{j}) != d({j},{i})"),
            AxiomViolation::NonPositive { i, j } => println!("  d({i},{j}) = 0 for distinct points"),
            AxiomViolation::Triangle { i, j, k } => println!("  d({i},{k}) > d({i},{j}) + d({j},{k})"),
        }
    }
}

fn coefficient_line(r: &CoefficientResult) {
    println!(
        "  {:<24} {:<22} threshold {:<5} member {:<3}  witness ({})",
        r.class.to_string(),
        coefficient(&r.coefficient),
        r.threshold.to_string(),
        yes(r.member),
        r.witness_labels.join(", ")
    );
}

pub fn classification(report: &ClassificationReport) {
    println!("k = {}, semantics = {}", report.k, report.semantics);
    for r in report.results() {
        coefficient_line(r);
    }
    println!("  kannan_perimetric over listed orderings:");
    coefficient_line(&report.kannan_perimetric_listed_order);
    println!("  kannan below 1/k: {}", yes(report.kannan_below_inverse_k));
    println!(
        "  perimetric below 1/(k+1): {}",
        yes(report.perimetric_below_inverse_k_plus_one)
    );
}

pub fn dynamics(
    fixed: &[String],
    periods: &BTreeMap<usize, Vec<String>>,
    orbits: &[(&String, &Vec<String>, &Vec<String>)],
    verdicts: &[&TheoremVerdict],
) {
    println!("fixed points: {{{}}}", fixed.join(", "));
    for (p, pts) in periods {
        println!("prime period {p}: {{{}}}", pts.join(", "));
    }
    println!("orbits:");
    for (start, tail, cycle) in orbits {
        println!("  {start}: tail [{}] cycle [{}]", tail.join(", "), cycle.join(", "));
    }
    for v in verdicts {
        println!(
            "{:?} fixed-point check (k = {}, {}): coefficient {}, member {}, no short periods {}, outcome {:?}",
            v.theorem,
            v.k,
            v.semantics,
            coefficient(&v.coefficient),
            yes(v.class_member),
            yes(v.periodic_free),
            v.outcome
        );
        if let Some(p) = &v.periodic_violation {
            println!("  {} has prime period {}", p.point, p.period);
        }
    }
}

pub fn implications<'a>(results: impl Iterator<Item = &'a ImplicationResult>) {
    for r in results {
        println!(
            "{:<44} {:<8} checked {:>6}  premise {:>6}  violations {}",
            r.implication.tag(),
            format!("{:?}", r.strength).to_lowercase(),
            r.instances_checked,
            r.premise_hits,
            r.violations.len()
        );
        for v in r.violations.iter().take(3) {
            match v.trial {
                Some(t) => println!("    trial {t} (k = {}): {}", v.k, v.details),
                None => println!("    k = {}: {}", v.k, v.details),
            }
        }
    }
}

pub fn fuzz(report: &FuzzReport) {
    let c = &report.config;
    println!(
        "seed {} trials {} n {}..{} k {}..{}",
        c.seed, c.trials, c.n_points.0, c.n_points.1, c.k.0, c.k.1
    );
    implications(report.implications.values());
    for cov in &report.coverage {
        println!(
            "coverage {}: {} premise hits, {} required: {}",
            cov.implication.tag(),
            cov.hits,
            cov.required,
            if cov.met { "met" } else { "NOT MET" }
        );
    }
    println!("findings: {}", report.findings);
    println!("status: {:?}", report.status);
}

pub fn trace(t: &IterationTrace, uniqueness: Option<&UniquenessReport>) {
    println!(
        "map {} {:?}, k = {}, steps {}, converged {}",
        t.map,
        t.params,
        t.k,
        t.step_distances.len(),
        yes(t.converged)
    );
    println!("limit {:?}", t.limit);
    println!("r0 (perimeter of first k iterates) = {}", t.r0_perimeter);
    println!("lambda = {} ({:?})", t.lambda_estimate, t.lambda_source);
    if let (Some(rho), Some(r)) = (t.rho, t.kannan_r) {
        println!("rho = {rho}, R = {r}");
    }
    let show = t.points.len().min(12);
    println!("{:>5}  {:>24}  {:>12}  {:>12}", "n", "x_n", "r_n", "bound");
    for n in 0..show {
        let r = t.step_distances.get(n).map(|v| format!("{v:.3e}")).unwrap_or_default();
        let b = t.bounds.get(n).map(|v| format!("{v:.3e}")).unwrap_or_default();
        println!("{n:>5}  {:>24}  {r:>12}  {b:>12}", format!("{:?}", t.points[n]));
    }
    if t.points.len() > show {
        println!("  ... {} more", t.points.len() - show);
    }
    println!(
        "bound violations: {}, kannan bound violations: {}",
        t.bound_violations().len(),
        t.kannan_bound_violations().len()
    );
    if let Some(u) = uniqueness {
        println!("uniqueness: premise {} ({})", yes(u.premise_holds), u.premise_note);
        if u.premise_holds {
            println!("  fixed points in region: {:?}", u.fixed_points);
            println!("  unique: {}", yes(u.unique == Some(true)));
        }
    }
}

pub fn repro(reports: &[ReproReport]) {
    for r in reports {
        println!("{}: {}", r.id, if r.passed { "pass" } else { "MISMATCH" });
        for c in &r.checks {
            let mark = if c.passed { "ok " } else { "BAD" };
            if c.passed {
                println!("  {mark} {} = {}", c.quantity, c.actual);
            } else {
                println!("  {mark} {} = {} (expected {})", c.quantity, c.actual, c.expected);
            }
        }
        for n in &r.notes {
            println!("  note: {n}");
        }
    }
}
