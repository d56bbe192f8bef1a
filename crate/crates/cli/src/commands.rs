use std::io::Write;

use ieh::experiment::{self, Case, CompareConfig, ModeComparison, SnrSweepConfig};
use ieh::optimize::{
    fit_and_evaluate, landscape_grid, Method, MethodKind, OptimizerReport, SearchSpace,
};
use ieh::signal::{add_noise, fmt_f64, generate_synthetic, read_csv, write_csv_to};
use ieh::{DiodeBridgeParams, Error, Pipeline, Result, SeriesSet, SyntheticSourceConfig};

use crate::args::{
    CompareArgs, DiodeArgs, GenerateArgs, LandscapeArgs, Mode, OptimizeArgs, SourceArgs, SweepArgs,
    SyntheticArgs, TrainArgs,
};
use crate::output::{at_path, sink, Header};

fn synthetic_config(a: &SyntheticArgs, seed: u64) -> SyntheticSourceConfig {
    SyntheticSourceConfig {
        f1: a.f1,
        f2: a.f2,
        zeta1: a.zeta1,
        zeta2: a.zeta2,
        amp1: a.amp1,
        amp2: a.amp2,
        drive_bandwidth: a.drive_bandwidth,
        duration: a.duration,
        sample_rate: a.sample_rate,
        seed,
    }
}

fn record_synthetic(h: &mut Header, cfg: &SyntheticSourceConfig) {
    h.set("f1", cfg.f1)
        .set("f2", cfg.f2)
        .set("zeta1", cfg.zeta1)
        .set("zeta2", cfg.zeta2)
        .set("amp1", cfg.amp1)
        .set("amp2", cfg.amp2)
        .set("drive_bandwidth", cfg.drive_bandwidth)
        .set("duration", cfg.duration)
        .set("sample_rate", cfg.sample_rate);
}

fn load_source(a: &SourceArgs, h: &mut Header) -> Result<SeriesSet> {
    match &a.input {
        Some(path) => {
            h.set("input", path.display());
            read_csv(path).map_err(|e| at_path(path, e))
        }
        None => {
            let cfg = synthetic_config(&a.synthetic, a.source_seed);
            h.set("input", "synthetic")
                .set("source_seed", a.source_seed);
            record_synthetic(h, &cfg);
            let (v1, v2) = generate_synthetic(&cfg)?;
            SeriesSet::pair(v1, v2)
        }
    }
}

/// Narrows the data to the requested mode.
fn select(set: &SeriesSet, mode: Mode) -> Result<SeriesSet> {
    match (mode, &set.v2) {
        (Mode::Auto, _) => Ok(set.clone()),
        (Mode::Single, _) => Ok(SeriesSet::single(set.v1.clone())),
        (Mode::Pair, Some(_)) => Ok(set.clone()),
        (Mode::Pair, None) => Err(Error::Config("pair mode needs a `v2` column".into())),
    }
}

fn mode_name(set: &SeriesSet) -> &'static str {
    if set.v2.is_some() {
        "pair"
    } else {
        "single"
    }
}

fn diode_params(a: &DiodeArgs, h: &mut Header) -> Result<DiodeBridgeParams> {
    let d = DiodeBridgeParams::new(a.diode_v0, a.diode_r, a.load_r)?;
    if let Some(w) = d.thermal_warning() {
        eprintln!("warning: {w}");
    }
    h.set("diode_v0", d.v0)
        .set("diode_r", d.r)
        .set("load_r", d.r_load);
    Ok(d)
}

fn record_train(h: &mut Header, t: &TrainArgs) {
    let kind = MethodKind::from(t.method);
    h.set("method", kind.name())
        .set("train_frac", t.train_frac)
        .set("tau_max", t.tau_max)
        .set("phi_max", t.phi_max)
        .set("seed", t.seed);
}

pub fn generate(a: &GenerateArgs) -> Result<()> {
    let cfg = synthetic_config(&a.synthetic, a.seed);
    let (v1, v2) = generate_synthetic(&cfg)?;
    let (v1, v2) = match a.snr {
        Some(snr) => (
            add_noise(&v1, snr, a.seed.wrapping_add(1))?,
            add_noise(&v2, snr, a.seed.wrapping_add(2))?,
        ),
        None => (v1, v2),
    };
    let set = if a.single {
        SeriesSet::single(v1)
    } else {
        SeriesSet::pair(v1, v2)?
    };

    let mut h = Header::new("generate");
    h.set("seed", a.seed);
    record_synthetic(&mut h, &cfg);
    h.set("snr", a.snr.map_or("none".to_string(), |s| s.to_string()));
    h.set("columns", if a.single { 1 } else { 2 });

    let mut out = sink(a.output.as_deref())?;
    h.write_to(&mut out)?;
    write_csv_to(&set, &mut out)?;
    out.flush()?;
    Ok(())
}

fn print_mode(title: &str, m: &ModeComparison) {
    println!("{title}");
    for case in [Case::Raw, Case::Bridge, Case::Intervention] {
        let r = m.row(case);
        println!(
            "  {:<10}{:>8.2}{:>10.2}",
            case.label(),
            r.vrms,
            r.c_pos_per_sample
        );
    }
    println!("  trained on test split: {}", m.test_params);
}

fn write_mode(out: &mut dyn Write, mode: &str, m: &ModeComparison) -> std::io::Result<()> {
    for case in [Case::Raw, Case::Bridge, Case::Intervention] {
        let r = m.row(case);
        writeln!(
            out,
            "{mode},{},{},{},{}",
            case.key(),
            fmt_f64(r.vrms),
            fmt_f64(r.c_pos_per_sample),
            fmt_f64(r.c_total)
        )?;
    }
    Ok(())
}

pub fn compare(a: &CompareArgs) -> Result<()> {
    let mut h = Header::new("compare");
    let set = load_source(&a.source, &mut h)?;
    record_train(&mut h, &a.train);
    let diode = diode_params(&a.diode, &mut h)?;
    let cfg = CompareConfig {
        train_fraction: a.train.train_frac,
        diode,
        method: a.train.method.into(),
        tau_max: a.train.tau_max,
        phi_max: a.train.phi_max,
        seed: a.train.seed,
    };
    let table = experiment::compare(&set, &cfg)?;

    println!("{:<12}{:>8}{:>10}", "", "V_RMS", "C_POS/L");
    print_mode("1 voltage", &table.single);
    if let Some(pair) = &table.pair {
        print_mode("2 voltages", pair);
    }

    if let Some(path) = &a.output {
        h.set("single_params", table.single.test_params);
        if let Some(pair) = &table.pair {
            h.set("pair_params", pair.test_params);
        }
        let mut out = sink(Some(path))?;
        h.write_to(&mut out)?;
        writeln!(out, "mode,case,vrms,c_pos_per_sample,c_total")?;
        write_mode(&mut out, "single", &table.single)?;
        if let Some(pair) = &table.pair {
            write_mode(&mut out, "pair", pair)?;
        }
        out.flush()?;
    }
    Ok(())
}

/// Applies per-method overrides, rejecting those that do not fit the method.
fn configure(a: &OptimizeArgs, space: SearchSpace) -> Result<Method> {
    let mut method = MethodKind::from(a.train.method).configure(space, a.train.seed);
    let misplaced = |flag: &str, method: &str| {
        Error::Config(format!("--{flag} only applies to --method {method}"))
    };
    match &mut method {
        Method::GradientDescent(cfg) => {
            if a.population.is_some() {
                return Err(misplaced("population", "ga"));
            }
            if a.generations.is_some() {
                return Err(misplaced("generations", "ga"));
            }
            cfg.eta = a.eta.unwrap_or(cfg.eta);
            cfg.delta = a.delta.unwrap_or(cfg.delta);
            cfg.max_iters = a.max_iters.unwrap_or(cfg.max_iters);
        }
        Method::Genetic(cfg) => {
            for (flag, set) in [
                ("eta", a.eta.is_some()),
                ("delta", a.delta.is_some()),
                ("max-iters", a.max_iters.is_some()),
            ] {
                if set {
                    return Err(misplaced(flag, "gd"));
                }
            }
            cfg.population = a.population.unwrap_or(cfg.population);
            cfg.generations = a.generations.unwrap_or(cfg.generations);
        }
        Method::Grid(_) => {
            if a.eta.is_some()
                || a.delta.is_some()
                || a.max_iters.is_some()
                || a.population.is_some()
                || a.generations.is_some()
            {
                return Err(Error::Config(
                    "the grid method takes no tuning flags".into(),
                ));
            }
        }
    }
    Ok(method)
}

fn record_method(h: &mut Header, method: &Method) {
    match method {
        Method::GradientDescent(c) => {
            h.set("eta", c.eta)
                .set("delta", c.delta)
                .set("max_iters", c.max_iters)
                .set("tol", c.tol)
                .set("init", c.init);
        }
        Method::Genetic(c) => {
            h.set("population", c.population)
                .set("generations", c.generations)
                .set("mutation_rate", c.mutation_rate)
                .set("mutation_scale", c.mutation_scale)
                .set("crossover_rate", c.crossover_rate)
                .set("elitism", c.elitism)
                .set("tournament_size", c.tournament_size);
        }
        Method::Grid(_) => {}
    }
}

fn record_report(h: &mut Header, r: &OptimizerReport) {
    h.set("best_tau", r.best.tau)
        .set("best_phi", r.best.phi)
        .set("best_offset", r.best.flip_offset)
        .set("best_cost", fmt_f64(r.best_cost))
        .set("evaluations", r.evaluations)
        .set("converged", r.converged);
    if let Some(c) = &r.train_cost {
        h.set("train_cost", fmt_f64(c.c_total));
    }
    if let Some(c) = &r.test_cost {
        h.set("test_cost", fmt_f64(c.c_total))
            .set("test_vrms", fmt_f64(c.vrms_out))
            .set("test_c_pos_per_sample", fmt_f64(c.c_pos_per_sample()));
    }
}

pub fn optimize(a: &OptimizeArgs) -> Result<()> {
    let mut h = Header::new("optimize");
    let set = select(&load_source(&a.source, &mut h)?, a.mode)?;
    h.set("mode", mode_name(&set));
    record_train(&mut h, &a.train);

    let pipeline = Pipeline::from_set(&set)?;
    let (train, test) = pipeline.split(a.train.train_frac)?;
    let space = SearchSpace::for_pipeline(&train, a.train.tau_max, a.train.phi_max)?;
    let method = configure(a, space)?;
    record_method(&mut h, &method);
    let report = fit_and_evaluate(&train, &test, &method, train.len())?;
    record_report(&mut h, &report);

    if a.output.is_some() {
        let test_cost = report
            .test_cost
            .as_ref()
            .expect("filled by fit_and_evaluate");
        println!("best: {} (train cost {:.2})", report.best, report.best_cost);
        println!(
            "test: V_RMS {:.2}, C_POS/L {:.2}, cost {:.2}",
            test_cost.vrms_out,
            test_cost.c_pos_per_sample(),
            test_cost.c_total
        );
    }

    let mut out = sink(a.output.as_deref())?;
    h.write_to(&mut out)?;
    writeln!(out, "iteration,cost,best_cost")?;
    for t in &report.trajectory {
        writeln!(
            out,
            "{},{},{}",
            t.iteration,
            fmt_f64(t.cost),
            fmt_f64(t.best_cost)
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn landscape(a: &LandscapeArgs) -> Result<()> {
    let mut h = Header::new("landscape");
    let set = select(&load_source(&a.source, &mut h)?, a.mode)?;
    let pipeline = Pipeline::from_set(&set)?;
    h.set("mode", mode_name(&set))
        .set("tau_min", a.tau_min)
        .set("tau_max", a.tau_max)
        .set("phi_min", a.phi_min)
        .set("phi_max", a.phi_max)
        .set("offset", a.offset)
        .set("seed", a.seed);
    if !pipeline.is_pair() {
        h.set("phi_axis", "flip_offset");
    }
    let grid = landscape_grid(
        &pipeline,
        a.tau_min..=a.tau_max,
        a.phi_min..=a.phi_max,
        a.offset,
    )?;

    let mut out = sink(a.output.as_deref())?;
    h.write_to(&mut out)?;
    writeln!(out, "tau,phi,cost")?;
    for g in &grid {
        writeln!(out, "{},{},{}", g.tau, g.phi, fmt_f64(g.cost))?;
    }
    out.flush()?;
    Ok(())
}

pub fn snr_sweep(a: &SweepArgs) -> Result<()> {
    let mut h = Header::new("snr-sweep");
    let set = select(&load_source(&a.source, &mut h)?, a.mode)?;
    h.set("mode", mode_name(&set));
    record_train(&mut h, &a.train);
    let diode = diode_params(&a.diode, &mut h)?;
    let snrs: Vec<String> = a.snrs.iter().map(|s| s.to_string()).collect();
    h.set("snrs", snrs.join(";"))
        .set("realizations", a.realizations);

    let cfg = SnrSweepConfig {
        snrs: a.snrs.clone(),
        realizations: a.realizations,
        compare: CompareConfig {
            train_fraction: a.train.train_frac,
            diode,
            method: a.train.method.into(),
            tau_max: a.train.tau_max,
            phi_max: a.train.phi_max,
            seed: a.train.seed,
        },
    };
    let rows = experiment::snr_sweep(&set, &cfg)?;

    if a.output.is_some() {
        println!(
            "{:>8}{:>10}{:>10}{:>12}{:>12}",
            "SNR", "V_RMS IEH", "V_RMS DB", "cost IEH", "cost DB"
        );
        for r in &rows {
            println!(
                "{:>8.2}{:>10.2}{:>10.2}{:>12.2}{:>12.2}",
                r.snr, r.vrms_ieh, r.vrms_db, r.c_ieh, r.c_db
            );
        }
    }

    let mut out = sink(a.output.as_deref())?;
    h.write_to(&mut out)?;
    writeln!(out, "snr,vrms_ieh,vrms_db,c_ieh,c_db")?;
    for r in &rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.snr),
            fmt_f64(r.vrms_ieh),
            fmt_f64(r.vrms_db),
            fmt_f64(r.c_ieh),
            fmt_f64(r.c_db)
        )?;
    }
    out.flush()?;
    Ok(())
}
