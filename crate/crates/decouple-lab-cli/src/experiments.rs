//! The named experiments. Each takes a validated config and produces an
//! [`ExperimentReport`]; everything is deterministic in the config
//! (including the seed), and per-scale work is spread over threads without
//! changing any result.

use crate::config::{Command, ExperimentConfig};
use crate::parallel;
use decouple_lab_core::decoupling::{
    decoupling_ratio, exponent_fit, incidence_count, CaseVariant, DecouplingCase,
};
use decouple_lab_core::distance::{
    bad_mass, classify_tubes, energy_integral, falconer_threshold, good_spherical_l2,
    incidence_inequality_constant, required_sphere_nodes, DistsetParams,
};
use decouple_lab_core::extension::{random_packet_field, SamplingLattice};
use decouple_lab_core::geometry::{
    build_caps, build_plate_net, build_tube_family_for_caps, random_plate, ScaleMode, Tube,
};
use decouple_lab_core::sharp_example::{build_sharp_example_with, example_report, BuildOptions};
use decouple_lab_core::weights::{cantor_measure, CantorPattern, DiscreteMeasure};
use decouple_lab_core::{Error as CoreError, ExperimentReport};
use rand::{Rng, SeedableRng};

/// Failures while running an experiment (as opposed to reading its config).
#[derive(Debug)]
pub enum RunError {
    Core(CoreError),
    Io(std::io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Core(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "io: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        RunError::Core(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

type RunResult<T> = Result<T, RunError>;

/// Suffix for per-scale metric names: integral scales print bare.
fn r_tag(r: f64) -> String {
    if r.fract() == 0.0 && r.abs() < 1e15 {
        format!("{}", r as i64)
    } else {
        format!("{r}").replace('.', "p")
    }
}

/// Dispatches the experiment named by the config.
pub fn run(cfg: &ExperimentConfig) -> RunResult<ExperimentReport> {
    match cfg.command {
        Command::Caps => run_caps(cfg),
        Command::Netcheck => run_netcheck(cfg),
        Command::Example => run_example(cfg),
        Command::Sweep => run_sweep(cfg),
        Command::Decouple => run_decouple(cfg),
        Command::Distset => run_distset(cfg),
        Command::Energy => run_energy(cfg),
        Command::Threshold => run_threshold(cfg),
    }
}

fn run_threshold(cfg: &ExperimentConfig) -> RunResult<ExperimentReport> {
    let mut rep = ExperimentReport::new();
    rep.push("falconer_threshold", falconer_threshold(cfg.d)?)?;
    Ok(rep)
}

fn run_caps(cfg: &ExperimentConfig) -> RunResult<ExperimentReport> {
    let big_r = cfg.r_list[0];
    let caps = build_caps(big_r, cfg.d)?;
    let tile_area: f64 = caps.iter().map(|c| c.clipped_area()).sum();
    let expect = 2.0_f64.powi(cfg.d as i32 - 1);
    let mut rep = ExperimentReport::new();
    rep.push("cap_count", caps.len() as f64)?;
    rep.push("cap_scale", caps[0].scale)?;
    rep.push("tile_area", tile_area)?;
    rep.push("tile_defect_rel", (tile_area - expect).abs() / expect)?;
    Ok(rep)
}

/// Plate-net check; each entry of `R_list` is interpreted as the reciprocal
/// plate thickness `1/r`.
fn run_netcheck(cfg: &ExperimentConfig) -> RunResult<ExperimentReport> {
    let mut rep = ExperimentReport::new();
    for &rr in &cfg.r_list {
        let r = 1.0 / rr;
        let tag = r_tag(rr);
        let net = build_plate_net(r, cfg.m, cfg.d)?;
        rep.push(&format!("plate_count_inv{tag}"), net.len() as f64)?;
        let probes = 200u64;
        let covered = (0..probes)
            .filter(|&k| {
                let inner = random_plate(cfg.d, cfg.m, r / 2.0, cfg.seed.wrapping_add(k));
                net.find_cover(&inner, 12).is_some()
            })
            .count();
        rep.push(
            &format!("covering_fraction_inv{tag}"),
            covered as f64 / probes as f64,
        )?;
        let expo = ((cfg.m + 1) * (cfg.d - cfg.m)) as f64;
        for factor in [2.0, 4.0] {
            let mut worst = 0.0_f64;
            for k in 0..20u64 {
                let outer = random_plate(
                    cfg.d,
                    cfg.m,
                    factor * r,
                    cfg.seed.wrapping_add(9000 + k),
                );
                let count = net.count_contained_in(&outer, 12) as f64;
                worst = worst.max(count / factor.powf(expo));
            }
            rep.push(&format!("counting_c{}_inv{tag}", factor as u32), worst)?;
        }
    }
    Ok(rep)
}

fn build_opts(cfg: &ExperimentConfig) -> BuildOptions {
    BuildOptions {
        budget: cfg.budget,
        allow_subsample: true,
    }
}

fn run_example(cfg: &ExperimentConfig) -> RunResult<ExperimentReport> {
    let inst = build_sharp_example_with(
        cfg.d,
        cfg.m,
        cfg.alpha,
        cfg.r_list[0],
        cfg.c,
        build_opts(cfg),
    )?;
    Ok(example_report(&inst, cfg.p)?)
}

fn run_sweep(cfg: &ExperimentConfig) -> RunResult<ExperimentReport> {
    let rows: Vec<RunResult<(f64, ExperimentReport)>> = parallel::map(&cfg.r_list, |&big_r| {
        let inst =
            build_sharp_example_with(cfg.d, cfg.m, cfg.alpha, big_r, cfg.c, build_opts(cfg))?;
        Ok((big_r, example_report(&inst, cfg.p)?))
    });
    let mut rep = ExperimentReport::new();
    let mut ratio_samples = Vec::new();
    let mut count_samples = Vec::new();
    let mut vol_samples = Vec::new();
    let mut m_samples = Vec::new();
    for row in rows {
        let (big_r, r) = row?;
        let ratio = r.get("ratio").unwrap();
        rep.push(&format!("ratio_R{}", r_tag(big_r)), ratio)?;
        ratio_samples.push((big_r, ratio));
        count_samples.push((big_r, r.get("omega_lattice_count").unwrap()));
        vol_samples.push((big_r, r.get("lambda_volume").unwrap()));
        m_samples.push((big_r, r.get("m_measured").unwrap()));
    }
    let (slope, _, stderr) = exponent_fit(&ratio_samples)?;
    rep.push("fitted_slope", slope)?;
    rep.push("slope_stderr", stderr)?;
    if let Ok((s, _, _)) = exponent_fit(&count_samples) {
        rep.push("omega_count_slope", s)?;
    }
    if let Ok((s, _, _)) = exponent_fit(&vol_samples) {
        rep.push("lambda_volume_slope", s)?;
    }
    if let Ok((s, _, _)) = exponent_fit(&m_samples) {
        rep.push("m_measured_slope", s)?;
    }
    Ok(rep)
}

fn run_decouple(cfg: &ExperimentConfig) -> RunResult<ExperimentReport> {
    const SEEDS: u64 = 20;
    const TUBES: usize = 48;
    let results: Vec<RunResult<(f64, f64)>> = parallel::map(&cfg.r_list, |&big_r| {
        let caps = build_caps(big_r, cfg.d)?;
        let family = build_tube_family_for_caps(&caps, big_r, cfg.beta, ScaleMode::ScaleR)?;
        let lat = SamplingLattice::ball(cfg.d, big_r, big_r.sqrt() / 2.0, big_r);
        let mut worst = 0.0_f64;
        for s in 0..SEEDS {
            let seed = cfg.seed.wrapping_mul(1000).wrapping_add(s);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ids: Vec<usize> = (0..TUBES)
                .map(|_| rng.random_range(0..family.tubes.len()))
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            let (_, set) = random_packet_field(&family, &ids, seed, &lat)?;
            let tubes: Vec<Tube> = ids.iter().map(|&i| family.tubes[i].clone()).collect();
            let prof = incidence_count(&tubes, big_r, cfg.d)?;
            let case = DecouplingCase {
                variant: CaseVariant::A,
                d: cfg.d,
                m: cfg.d,
                p: cfg.p,
                alpha: None,
                r: None,
                big_r,
            };
            let r = decoupling_ratio(&set, &prof.region_all(), None, &case, prof.max_count)?;
            worst = worst.max(r.get("ratio").unwrap());
        }
        Ok((big_r, worst))
    });
    let mut rep = ExperimentReport::new();
    let mut overall = 0.0_f64;
    for res in results {
        let (big_r, worst) = res?;
        rep.push(&format!("max_ratio_R{}", r_tag(big_r)), worst)?;
        rep.push(
            &format!("ceiling_R{}", r_tag(big_r)),
            10.0 * big_r.powf(0.1),
        )?;
        overall = overall.max(worst);
    }
    rep.push("max_ratio", overall)?;
    Ok(rep)
}

/// Seeded Cantor pair in the unit ball with unit separation order; the
/// subdivision keeps `round(3^alpha)` of 9 cells.
fn cantor_pair(cfg: &ExperimentConfig) -> RunResult<(DiscreteMeasure, DiscreteMeasure)> {
    let count = (3.0_f64.powf(cfg.alpha)).round() as usize;
    let cap = cfg.budget.min(5_000).max(25);
    let mut depth = 1;
    while count.pow(depth as u32 + 1) <= cap && depth < 6 {
        depth += 1;
    }
    let base = cantor_measure(
        cfg.d,
        cfg.alpha,
        depth,
        &CantorPattern::Seeded { base: 3, count },
        cfg.seed,
    )?;
    let mut center1 = vec![0.0; cfg.d];
    let mut center2 = vec![0.0; cfg.d];
    center1[0] = -0.55;
    center2[0] = 0.55;
    Ok((
        base.mapped_into_ball(&center1, 0.3),
        base.mapped_into_ball(&center2, 0.3),
    ))
}

fn run_distset(cfg: &ExperimentConfig) -> RunResult<ExperimentReport> {
    let (mu1, mu2) = cantor_pair(cfg)?;
    let splits: Vec<RunResult<(f64, f64, f64, f64, f64)>> =
        parallel::map(&cfg.r_list, |&big_r| {
            let params = DistsetParams {
                alpha: cfg.alpha,
                beta: cfg.beta,
                epsilon: cfg.epsilon,
                eta: cfg.eta,
                c0: cfg.c0,
                m: cfg.m,
                r0: big_r,
            };
            let split = classify_tubes(&mu1, &mu2, 0, &params)?;
            let c = incidence_inequality_constant(&split, &mu2);
            let mut masses: Vec<f64> = (0..mu2.len())
                .map(|i| bad_mass(&split, &mu1, mu2.atom(i)))
                .collect();
            masses.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = masses[masses.len() / 2];
            Ok((big_r, split.delta, split.bad_fraction(), c, median))
        });
    let mut rep = ExperimentReport::new();
    for res in splits {
        let (big_r, delta, frac, c, median) = res?;
        let tag = r_tag(big_r);
        rep.push(&format!("delta_R{tag}"), delta)?;
        rep.push(&format!("bad_fraction_R{tag}"), frac)?;
        rep.push(&format!("incidence_constant_R{tag}"), c)?;
        rep.push(&format!("median_bad_mass_R{tag}"), median)?;
    }
    // spherical-average L2 of the good part at the coarsest configured level
    let params = DistsetParams {
        alpha: cfg.alpha,
        beta: cfg.beta,
        epsilon: cfg.epsilon,
        eta: cfg.eta,
        c0: cfg.c0,
        m: cfg.m,
        r0: cfg.r_list[0],
    };
    let split = classify_tubes(&mu1, &mu2, 0, &params)?;
    let sphere_r = 64.0;
    let sph = good_spherical_l2(
        &mu1,
        &mu2,
        &split,
        sphere_r,
        required_sphere_nodes(cfg.d, sphere_r),
    )?;
    rep.absorb("sphere64_", &sph)?;
    Ok(rep)
}

/// Riesz energies of a subdivision measure over the depths in `R_list`;
/// the `p` field is the Riesz exponent here.
fn run_energy(cfg: &ExperimentConfig) -> RunResult<ExperimentReport> {
    let pattern = if cfg.d == 1 {
        CantorPattern::PerAxis {
            base: 3,
            keep: vec![vec![0, 2]],
        }
    } else {
        let count = (3.0_f64.powf(cfg.alpha)).round() as usize;
        CantorPattern::Seeded {
            base: 3,
            count: count.max(1),
        }
    };
    let mut rep = ExperimentReport::new();
    let mut prev: Option<(usize, f64)> = None;
    for &rd in &cfg.r_list {
        let depth = rd as usize;
        let mu = cantor_measure(cfg.d, cfg.alpha, depth, &pattern, cfg.seed)?;
        let e = energy_integral(&mu, cfg.p)?;
        rep.push(&format!("energy_depth{depth}"), e)?;
        if let Some((d0, e0)) = prev {
            rep.push(
                &format!("growth_pct_depth{d0}_to_{depth}"),
                100.0 * (e - e0) / e0,
            )?;
        }
        prev = Some((depth, e));
    }
    Ok(rep)
}
