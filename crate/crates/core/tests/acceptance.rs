//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::identities::*;
use common::invariance::*;
use common::*;
use polarkit::amplitudes::SPEED_OF_LIGHT;
use polarkit::angular::Direction;
use polarkit::observables::{dipole_beta_ratio, photoelectron_legendre, AngularDistribution};
use polarkit::processes::spec::{ParticleSpec, PhotoionizationSystem, ProcessKind, ProcessSpec, Role};
use polarkit::processes::PhotoionizationExpansion;
use polarkit::tensors::PolarizationState;
use rand::Rng;

const REL: f64 = 1e-10;
const ABS: f64 = 1e-14;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn oracle_equivalence() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (i, family) in FAMILIES.into_iter().enumerate() {
        let a = compare_family(family, 50, 20, 1000 + i as u64, REL, ABS);
        pass &= a.ok() && a.compared == 1000;
        notes.push(format!("{family:?} {}/{} worst {:.1e}", a.compared - a.failures, a.compared, a.worst));
        if let Some(f) = a.first_failure {
            notes.push(f);
        }
    }
    outcome(pass, notes.join("; "))
}

fn sum_rules() -> Outcome {
    let mut rng = rng(2);
    let axes: Vec<Direction> = std::iter::once(Direction::z()).chain((0..3).map(|_| direction(&mut rng))).collect();
    let projection = axes.iter().map(projection_sum_residual).fold(0.0, f64::max);
    let harmonic = harmonic_integral_residual();
    let helicity = axes.iter().map(helicity_average_residual).fold(0.0, f64::max);
    outcome(
        projection < 1e-13 && harmonic < 1e-12 && helicity < 1e-14,
        format!("projection sum {projection:.1e}, harmonic integral {harmonic:.1e}, helicity average {helicity:.1e}"),
    )
}

/// `-2 c2 / c0` from a Legendre fit to the computed photoelectron distribution.
fn fitted_beta(sys: &PhotoionizationSystem, photon: PolarizationState) -> f64 {
    let e = PhotoionizationExpansion::new(sys.clone());
    let samples: Vec<(f64, f64)> =
        (0..=180).map(|t| (t as f64, e.cross_section(&photoelectron_at(photon, t as f64, 30.0)).unwrap())).collect();
    let c = legendre_fit(&samples, 6);
    -2.0 * c[2] / c[0]
}

fn beta_reproduction() -> Outcome {
    let circular = PolarizationState::helicity(1, Direction::z());
    let (ep, es) = (s_shell_ep(), s_shell_es());
    let beam = ParticleSpec { polarization: circular, direction: Direction::z(), detected: true };
    let ratio = dipole_beta_ratio(&ep).unwrap();
    let analytic = AngularDistribution::from_legendre(&photoelectron_legendre(&ep, &beam)).unwrap().beta_circular();
    let fit = fitted_beta(&ep, circular);
    let es_ratio = dipole_beta_ratio(&es).unwrap();
    let es_fit = fitted_beta(&es, circular);
    let pass = (ratio - 2.0).abs() < 1e-10
        && (analytic - 2.0).abs() < 1e-10
        && (fit - 2.0).abs() < 1e-10
        && es_ratio.abs() < 1e-12
        && es_fit.abs() < 1e-12;
    outcome(
        pass,
        format!("ep: ratio {ratio:.12}, distribution {analytic:.12}, fit {fit:.12}; es: ratio {es_ratio:.1e}, fit {es_fit:.1e}"),
    )
}

fn factorization() -> Outcome {
    let two = compare_family(Family::PhotoAuger, 1, 20, 4, REL, ABS);
    let three = compare_three_step(1, 20, 5, REL, ABS);
    outcome(
        two.ok() && three.ok(),
        format!(
            "two-step {}/{} worst {:.1e}; three-step {}/{} worst {:.1e}",
            two.compared - two.failures,
            two.compared,
            two.worst,
            three.compared - three.failures,
            three.compared,
            three.worst
        ),
    )
}

fn unpolarized(direction: Direction, detected: bool) -> ParticleSpec {
    ParticleSpec { polarization: PolarizationState::unpolarized(), direction, detected }
}

/// Total recombination cross-section against the detailed-balance image of the
/// total photoionization cross-section.
fn milne() -> Outcome {
    let mut rng = rng(6);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let sys = photoionization(&mut rng);
        let e0: f64 = rng.gen_range(0.1..5.0);
        let e1 = e0 + rng.gen_range(0.5..3.0);
        let e = PhotoionizationExpansion::new(sys.clone());

        let mut pi = ProcessSpec::new(ProcessKind::Photoionization, "atom", "ion");
        pi.set_particle(Role::PhotonIn, unpolarized(Direction::z(), true));
        pi.set_particle(Role::ElectronOut, unpolarized(Direction::z(), false));
        let sigma_ph = e.cross_section(&pi).unwrap();

        let mut rr = ProcessSpec::new(ProcessKind::RadRecombination, "ion", "atom");
        rr.set_particle(Role::ElectronIn, unpolarized(direction(&mut rng), true));
        rr.set_particle(Role::PhotonOut, unpolarized(Direction::z(), false));
        let sigma_rr = e.recombination(&rr, e1, e0).unwrap();

        // the photon's two polarizations cancel the electron's two spin states
        let (g_atom, g_ion) = (f64::from(sys.two_j0 + 1), f64::from(sys.two_j1 + 1));
        let alpha_e1 = e1 / SPEED_OF_LIGHT;
        let expect = alpha_e1 * alpha_e1 / (2.0 * e0) * g_atom / g_ion * sigma_ph;
        worst = worst.max((sigma_rr - expect).abs() / expect.abs());
    }
    outcome(worst < 1e-10, format!("10 points, worst relative {worst:.1e}"))
}

fn symbol_kernel() -> Outcome {
    let orth = three_j_orthogonality_residual(6);
    let (be, checked) = biedenharn_elliott_residual(6);
    let nine = nine_j_residual(6, 300, 7);
    let closed = three_j_closed_form_error(200);
    let finite = large_symbols_finite();
    outcome(
        orth < 1e-12 && be < 1e-12 && checked > 0 && nine < 1e-12 && closed < 1e-10 && finite,
        format!(
            "3j orthogonality {orth:.1e}, Biedenharn-Elliott {be:.1e} over {checked}, 9j {nine:.1e}, 2j=200 closed form {closed:.1e}, finite {finite}"
        ),
    )
}

fn covariance_positivity() -> Outcome {
    let mut worst_rot = 0.0f64;
    let mut worst_min = f64::INFINITY;
    for (i, family) in FAMILIES.into_iter().enumerate() {
        for s in 0..40u64 {
            let seed = 7000 + 100 * i as u64 + s;
            worst_rot = worst_rot.max(rotation_deviation(family, seed));
            worst_min = worst_min.min(min_relative_to_monopole(family, seed));
        }
    }
    outcome(
        worst_rot < 1e-12 && worst_min >= -1e-12,
        format!("worst rotation change {worst_rot:.1e}, lowest value / monopole {worst_min:.3e}"),
    )
}

fn cli_determinism() -> Outcome {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let dir = std::env::temp_dir().join(format!("polarkit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut outputs = Vec::new();
    for (spec, threads) in [
        ("cascade.spec.json", "1"),
        ("cascade.spec.json", "8"),
        ("cascade.spec.json", "8"),
        ("pi.spec.json", "1"),
        ("pi.spec.json", "8"),
    ] {
        let out = dir.join(format!("{}-{threads}-{}.csv", spec.trim_end_matches(".spec.json"), outputs.len()));
        let status = Command::new(env!("CARGO_BIN_EXE_polarkit"))
            .args(["run", "--spec"])
            .arg(data.join(spec))
            .arg("--amps")
            .arg(data.join("toy.amps.json"))
            .arg("--out")
            .arg(&out)
            .args(["--threads", threads, "--oracle"])
            .output()
            .unwrap()
            .status;
        if !status.success() {
            return outcome(false, format!("{spec} with {threads} threads exited with {status}"));
        }
        outputs.push(std::fs::read(&out).unwrap());
    }
    let same = outputs[0] == outputs[1] && outputs[1] == outputs[2] && outputs[3] == outputs[4];
    outcome(same, format!("cascade and photoionization runs at 1 and 8 threads, {} bytes", outputs[0].len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("sum rules", sum_rules),
        ("beta reproduction", beta_reproduction),
        ("factorization", factorization),
        ("detailed balance", milne),
        ("symbol kernel", symbol_kernel),
        ("covariance and positivity", covariance_positivity),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {}. {name} ({:.1} s): {}", i + 1, start.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
