//! One line per acceptance criterion, with the measured values behind it.

use std::time::{Duration, Instant};

use stokes_spectra::validation::{run_suite, Suite, SuiteReport, ValidationConfig};

struct Criterion {
    id: u8,
    title: &'static str,
    suites: &'static [Suite],
    budget: Duration,
}

const CRITERIA: [Criterion; 9] = [
    Criterion {
        id: 1,
        title: "constants",
        suites: &[Suite::Constants],
        budget: Duration::from_secs(1),
    },
    Criterion {
        id: 2,
        title: "criticality of the disk",
        suites: &[Suite::Criticality],
        budget: Duration::from_secs(1),
    },
    Criterion {
        id: 3,
        title: "Hessian diagonalization vs buckling FD",
        suites: &[Suite::HessianFd],
        budget: Duration::from_secs(120),
    },
    Criterion {
        id: 4,
        title: "first-derivative FD",
        suites: &[Suite::GradientFd],
        budget: Duration::from_secs(60),
    },
    Criterion {
        id: 5,
        title: "quadratic form series vs quadrature",
        suites: &[Suite::QuadraticForm],
        budget: Duration::from_secs(60),
    },
    Criterion {
        id: 6,
        title: "coercivity and gamma_n asymptotics",
        suites: &[Suite::Coercivity],
        budget: Duration::from_secs(60),
    },
    Criterion {
        id: 7,
        title: "3D eigenspace identities",
        suites: &[Suite::EigenId3d],
        budget: Duration::from_secs(30),
    },
    Criterion {
        id: 8,
        title: "non-optimality certificate",
        suites: &[Suite::Certificate],
        budget: Duration::from_secs(5),
    },
    Criterion {
        id: 9,
        title: "necessary-condition residual",
        suites: &[Suite::NecessaryCondition],
        budget: Duration::from_secs(60),
    },
];

#[test]
fn acceptance_criteria() {
    let cfg = ValidationConfig::default();
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let reports: Vec<SuiteReport> = c.suites.iter().map(|s| run_suite(*s, &cfg)).collect();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= c.budget;
        let ok = in_budget && reports.iter().all(SuiteReport::passed);
        println!(
            "{} criterion {}: {} ({:.2} s, budget {} s)",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        for check in reports.iter().flat_map(|r| &r.checks) {
            println!("    {check}");
        }
        if !ok {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
