//! Acceptance criteria, one line per criterion.
//!
//! Criteria that cannot be met are still measured and reported as FAIL;
//! the process then only insists that the failure is the known one.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use common::Oracle;
use pdm_core::eom::Derivatives;
use pdm_core::exact::{exact_energy, SolutionForm};
use pdm_core::integrate::{IntegratorOptions, Termination};
use pdm_core::par::Execution;
use pdm_core::profiles::Sign;
use pdm_core::verify::measures::{self, adaptive};
use pdm_core::verify::scenarios;

const REL_TOL: f64 = 1e-10;
const ABS_TOL: f64 = 1e-12;

enum Verdict {
    Pass,
    /// Measured and missed, with the documented failure mode confirmed.
    KnownFail,
    Broken,
}

struct Line {
    id: u32,
    title: &'static str,
    verdict: Verdict,
    summary: String,
    problems: Vec<String>,
}

impl Line {
    fn new(id: u32, title: &'static str) -> Self {
        Line {
            id,
            title,
            verdict: Verdict::Pass,
            summary: String::new(),
            problems: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.verdict = Verdict::Broken;
            self.problems.push(what.into());
        }
    }

    fn known_fail(&mut self, what: impl Into<String>) {
        if matches!(self.verdict, Verdict::Pass) {
            self.verdict = Verdict::KnownFail;
        }
        self.problems.push(what.into());
    }

    fn print(&self) {
        let tag = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::KnownFail | Verdict::Broken => "FAIL",
        };
        println!("[{tag}] criterion {:>2}: {} | {}", self.id, self.title, self.summary);
        for p in &self.problems {
            println!("         - {p}");
        }
    }
}

fn opts(t_end: f64) -> IntegratorOptions {
    adaptive(t_end, REL_TOL, ABS_TOL)
}

/// The power-law orbit reaches `x = 0` (where `m = 0` and `ẋ` diverges)
/// at a quarter period; a run past that point must stop there.
fn stopped_at_quarter(termination: &Termination, t_reached: f64, quarter: f64) -> bool {
    *termination != Termination::Completed && (t_reached - quarter).abs() < 1e-6 * quarter.max(1.0)
}

fn criterion_1() -> Line {
    let mut line = Line::new(1, "exact-solution residuals over 3 periods");
    let mut worst: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for (name, spec) in scenarios::exact_catalog() {
        let start = Instant::now();
        let r = measures::exact_residual(&spec, 3.0, Derivatives::Analytic, Execution::Sequential).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        line.require(r.max < 1e-8, format!("{name}: analytic residual {:.3e}", r.max));
        worst = worst.max(r.max);
        if !name.starts_with("power-law") {
            let fd = measures::exact_residual(&spec, 3.0, Derivatives::FiniteDifference, Execution::Sequential).unwrap();
            line.require(fd.max < 1e-5, format!("{name}: finite-difference residual {:.3e}", fd.max));
            worst_fd = worst_fd.max(fd.max);
        }
        // independent check against the hand-written equation of motion
        let period = spec.period().unwrap();
        for k in 0..600 {
            let t = (k as f64 + 0.618) * 3.0 * period / 600.0;
            let Ok((x, v, a)) = spec.derivatives(t) else { continue };
            for i in 0..spec.n() {
                let o = Oracle::from_params(spec.family, &spec.params, i).acceleration(x[i], v[i]);
                worst_oracle = worst_oracle.max((a[i] - o).abs());
            }
        }
    }
    line.require(slowest < 1.0, format!("slowest family took {slowest:.3} s"));
    line.require(worst_oracle < 1e-8, format!("hand-written oracle {worst_oracle:.3e}"));
    line.summary = format!(
        "analytic {worst:.2e} < 1e-8, finite-difference {worst_fd:.2e} < 1e-5, hand-written oracle {worst_oracle:.2e}, slowest family {slowest:.3} s < 1 s"
    );
    line
}

fn criterion_2() -> Line {
    let mut line = Line::new(2, "integrated vs closed-form trajectories over 10 periods");
    let mut worst: f64 = 0.0;
    for (name, spec) in scenarios::trajectory_catalog() {
        let period = spec.period().unwrap();
        let t = 10.0 * period;
        let r = measures::track_exact(&spec, t, &opts(t)).unwrap();
        if name.starts_with("power-law") {
            let quarter = period / 4.0;
            line.require(
                stopped_at_quarter(&r.termination, r.t_reached, quarter),
                format!("{name}: expected a stop at x = 0 (t = {quarter:.6}), got {:?}", r.termination),
            );
            let w = measures::track_exact(&spec, 0.9 * quarter, &opts(0.9 * quarter)).unwrap();
            line.require(
                w.completed() && w.max_deviation < 1e-6,
                format!("{name}: deviation {:.3e} before x = 0", w.max_deviation),
            );
            line.known_fail(format!(
                "{name}: unattainable, run stops at t = {:.6} = T/4 where x -> 0 and m -> 0 ({:?}); deviation up to 0.9 T/4 is {:.2e}",
                r.t_reached, r.termination, w.max_deviation
            ));
        } else {
            line.require(
                r.completed() && r.max_deviation < 1e-6,
                format!("{name}: deviation {:.3e}, {:?}", r.max_deviation, r.termination),
            );
            worst = worst.max(r.max_deviation);
        }
    }
    line.summary = format!("ML1, Morse, SW1, SW2 worst deviation {worst:.2e} < 1e-6");
    line
}

fn criterion_3() -> Line {
    let mut line = Line::new(3, "energy drift over 100 periods");
    let mut worst: f64 = 0.0;
    let mut worst_mismatch: f64 = 0.0;
    for (name, spec) in scenarios::trajectory_catalog() {
        let period = spec.period().unwrap();
        let t = 100.0 * period;
        let r = measures::energy_drift(&spec, t, &opts(t)).unwrap();
        line.require(
            r.closed_form_mismatch <= 1e-14,
            format!("{name}: E(0) vs closed-form energy {:.3e}", r.closed_form_mismatch),
        );
        worst_mismatch = worst_mismatch.max(r.closed_form_mismatch);
        if name.starts_with("power-law") {
            let quarter = period / 4.0;
            line.require(
                stopped_at_quarter(&r.termination, r.t_reached, quarter),
                format!("{name}: expected a stop at x = 0, got {:?}", r.termination),
            );
            line.require(r.drift < 1e-8, format!("{name}: drift {:.3e} before x = 0", r.drift));
            line.known_fail(format!(
                "{name}: unattainable, run stops at t = {:.6} = T/4; drift up to there {:.2e}",
                r.t_reached, r.drift
            ));
        } else {
            line.require(
                r.termination == Termination::Completed && r.drift < 1e-8,
                format!("{name}: drift {:.3e}, {:?}", r.drift, r.termination),
            );
            worst = worst.max(r.drift);
        }
    }
    line.summary = format!(
        "ML1, Morse, SW1, SW2 worst drift {worst:.2e} < 1e-8; closed-form energy at t = 0 within {worst_mismatch:.1e}"
    );
    line
}

fn criterion_4() -> Line {
    let mut line = Line::new(4, "measured periods vs frequency relations");
    let mut worst: f64 = 0.0;
    for (lambda, sign, a) in [
        (0.5, Sign::Plus, 1.0),
        (1.0, Sign::Plus, 1.0),
        (1.0, Sign::Plus, 0.5),
        (0.5, Sign::Minus, 1.0),
        (1.0, Sign::Minus, 0.5),
    ] {
        let spec = scenarios::ml1(lambda, sign, a);
        let t = 12.0 * spec.period().unwrap();
        let r = measures::measure_period(&spec, &spec, 12.0, &opts(t)).unwrap();
        // 2π/Ω with Ω² = ω²/(1 ± λA²), written out here
        let expect = 2.0 * PI * (1.0 + sign.value() * lambda * a * a).sqrt();
        line.require((r.predicted - expect).abs() < 1e-12, "predicted ML1 period disagrees with the oracle");
        let e = r.relative_error();
        line.require(e < 1e-6, format!("ML1({lambda}, {sign:?}, A = {a}): relative error {e:.3e}"));
        worst = worst.max(e);
    }
    let spec = scenarios::ml1(1.0, Sign::Plus, 0.5);
    let t = 12.0 * spec.period().unwrap();
    let printed = measures::measure_period(&spec, &spec.clone().printed(), 12.0, &opts(t)).unwrap();
    let printed_error = printed.relative_error();
    line.require(printed_error > 1e-6, "printed ML1 relation unexpectedly matches at A = 0.5");
    for upsilon in [1.0, 2.0] {
        let spec = scenarios::power_law(upsilon);
        let period = spec.period().unwrap();
        line.require(
            (period - 2.0 * PI / (1.0 + upsilon)).abs() < 1e-12,
            "power-law period is not 2π/((1+υ)ω)",
        );
        let r = measures::measure_period(&spec, &spec, 12.0, &opts(12.0 * period)).unwrap();
        line.require(
            r.measured.is_err() && r.termination != Termination::Completed,
            format!("power law υ = {upsilon}: expected no measurable period, got {:?}", r.measured),
        );
        line.known_fail(format!(
            "power law υ = {upsilon}: unattainable, no crossing before the run stops at x = 0 ({:?})",
            r.termination
        ));
    }
    line.summary = format!(
        "ML1 worst relative error {worst:.2e} < 1e-6; printed ML1 relation (extra A factor) misses by {printed_error:.2} at A = 0.5, as documented"
    );
    line
}

fn criterion_5() -> Line {
    let mut line = Line::new(5, "transformation identities at 1e4 points per family");
    let (mut g, mut v) = (0.0f64, 0.0f64);
    for (name, system, interval) in measures::identity_cases() {
        let r = measures::transformation_identities(&system, interval, 10_000, 5).unwrap();
        line.require(r.g_mismatch < 1e-10, format!("{name}: g mismatch {:.3e}", r.g_mismatch));
        line.require(r.potential_mismatch < 1e-12, format!("{name}: potential mismatch {:.3e}", r.potential_mismatch));
        line.require(r.f_min > 0.0, format!("{name}: f reaches {:.3e}", r.f_min));
        g = g.max(r.g_mismatch);
        v = v.max(r.potential_mismatch);
    }
    line.summary = format!("|g - m f^2|/g {g:.2e} < 1e-10, |V_I - V(q)| {v:.2e} < 1e-12");
    line
}

fn criterion_6() -> Line {
    let mut line = Line::new(6, "invariance of mapped EL-I trajectories");
    let mut worst: f64 = 0.0;
    let mut names = Vec::new();
    for (name, system, initial, t_end) in measures::invariance_cases() {
        let r = measures::invariance(&system, &initial, t_end, &opts(t_end)).unwrap();
        line.require(
            r.termination == Termination::Completed && r.max_residual < 1e-6,
            format!("{name}: residual {:.3e}, {:?}", r.max_residual, r.termination),
        );
        worst = worst.max(r.max_residual);
        names.push(name);
    }
    let mut mapped: f64 = 0.0;
    for (name, spec, t_end) in measures::mapped_cases() {
        let e = measures::mapped_exact_error(&spec, t_end, 4000).unwrap();
        line.require(e < 1e-8, format!("{name}: mapped closed form off by {e:.3e}"));
        mapped = mapped.max(e);
    }
    line.summary = format!(
        "{} families, EL-G residual {worst:.2e} < 1e-6; mapped closed forms match the reference closed forms to {mapped:.2e}",
        names.len()
    );
    line
}

fn criterion_7() -> Line {
    let mut line = Line::new(7, "non-invariance of coupled EL-II in two dimensions");
    let n2 = measures::coupled_residual(2, 10.0, &opts(10.0)).unwrap();
    let n1 = measures::coupled_residual(1, 10.0, &opts(10.0)).unwrap();
    let agree = measures::el2_el1_agreement(10_000, 3).unwrap();
    line.require(n2 > 1e-2, format!("n = 2 residual only {n2:.3e}"));
    line.require(n1 < 1e-8, format!("n = 1 residual {n1:.3e}"));
    line.require(agree < 1e-12, format!("EL-II vs EL-I {agree:.3e}"));
    line.summary = format!("n = 2 residual {n2:.2e} > 1e-2 (expected fail), n = 1 residual {n1:.2e} < 1e-8, EL-II vs EL-I {agree:.2e} < 1e-12");
    line
}

fn criterion_8() -> Line {
    let mut line = Line::new(8, "ML2 reduction to ML1");
    let r = measures::ml2_reduction(5.0, 4000).unwrap();
    line.require(r.condition_holds, "reduction condition not recognised");
    line.require(r.max_deviation < 1e-9, format!("deviation {:.3e}", r.max_deviation));
    line.summary = format!("lambda = 1/eta^2 on the minus branch, trajectories agree to {:.2e} < 1e-9 over 5 periods", r.max_deviation);
    line
}

fn criterion_9() -> Line {
    let mut line = Line::new(9, "SW2 validity split");
    let residual = |eta: f64, form: SolutionForm| {
        measures::exact_residual(&scenarios::sw2(eta, form), 3.0, Derivatives::Analytic, Execution::Sequential)
            .unwrap()
            .max
    };
    let printed_minus_one = residual(-1.0, SolutionForm::Printed);
    let printed_two = residual(2.0, SolutionForm::Printed);
    let amended_two = residual(2.0, SolutionForm::Validated);
    line.require(printed_minus_one < 1e-8, format!("printed form at eta = -1: {printed_minus_one:.3e}"));
    line.require(printed_two > 1e-1, format!("printed form at eta = 2: {printed_two:.3e}"));
    line.require(amended_two < 1e-8, format!("amended form at eta = 2: {amended_two:.3e}"));
    let e = exact_energy(&scenarios::sw2(2.0, SolutionForm::Validated)).unwrap();
    line.require((e - 0.5 * (1.5f64.powi(2) + 1.0 / 1.5f64.powi(2))).abs() < 1e-14, "amended energy");
    line.summary = format!(
        "printed form eta = -1 {printed_minus_one:.2e} < 1e-8, eta = 2 {printed_two:.2e} > 1e-1; amended form eta = 2 {amended_two:.2e} < 1e-8"
    );
    line
}

fn criterion_10() -> Line {
    let mut line = Line::new(10, "parser and automatic differentiation");
    let ad = measures::parser_ad(1000, 17).unwrap();
    let bad = measures::parser_malformed(1000, 17);
    line.require(ad.d1_error < 1e-6, format!("d1 error {:.3e}", ad.d1_error));
    line.require(ad.d2_error < 1e-4, format!("d2 error {:.3e}", ad.d2_error));
    line.require(bad.failures == 0, format!("{} malformed inputs mishandled", bad.failures));
    line.summary = format!(
        "{} expressions, d1 {:.2e} < 1e-6, d2 {:.2e} < 1e-4; {} inputs fuzzed, {} rejected with in-range positions, 0 mishandled",
        ad.expressions, ad.d1_error, ad.d2_error, bad.tried, bad.rejected
    );
    line
}

fn criterion_11() -> Line {
    let mut line = Line::new(11, "RK4 convergence order");
    let f = measures::rk4_order_factor(40).unwrap();
    line.require((12.0..=20.0).contains(&f), format!("factor {f:.3}"));
    line.summary = format!("error ratio {f:.3} in [12, 20] for h = 2pi/40 -> 2pi/80 over 10 periods");
    line
}

fn main() -> ExitCode {
    let criteria: [fn() -> Line; 11] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
    ];
    let mut broken = 0;
    let mut known = 0;
    for c in criteria {
        let line = c();
        line.print();
        match line.verdict {
            Verdict::Pass => {}
            Verdict::KnownFail => known += 1,
            Verdict::Broken => broken += 1,
        }
    }
    println!(
        "acceptance: {} pass, {} fail with the documented power-law obstruction, {} unexpected",
        11 - known - broken,
        known,
        broken
    );
    if broken == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
