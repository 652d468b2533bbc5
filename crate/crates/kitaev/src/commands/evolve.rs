use kitaev_core::phase::{decompose, effective_level, stability_intervals, EffectiveLevel};

use super::{run_evolution, Context, Outcome};
use crate::error::CliError;
use crate::output::{fmt_f64, write_plot_script, CsvOut, Header};

fn drive_header(ctx: &Context) -> Header {
    let cfg = &ctx.cfg;
    Header::new(cfg)
        .with("drive", format!("{:?}", cfg.drive).to_lowercase())
        .with("D", fmt_f64(cfg.d))
        .with("omega", fmt_f64(cfg.omega))
        .with("plaquette", cfg.plaquette)
}

/// Coefficient series of the initial state and every active target.
pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let geom = ctx.cfg.geometry()?;
    let ev = run_evolution(&ctx.cfg, &geom)?;
    let dir = ctx.out_dir()?;
    let mut header = drive_header(ctx).with("initial", &ev.initial.target);
    for s in &ev.targets {
        header = header
            .with(format!("target {}", s.target), format!("energy {} omega0 {}", fmt_f64(s.e_target), fmt_f64(s.omega0())));
    }
    let mut out = CsvOut::create(&dir.join("series.csv"), Some(&header), &["target", "t", "re", "im"])?;
    for s in ev.all_series() {
        let id = s.target.to_string();
        for (t, c) in s.times.iter().zip(&s.values) {
            out.row([id.clone(), fmt_f64(*t), fmt_f64(c.re), fmt_f64(c.im)])?;
        }
    }
    let mut outcome = Outcome::default();
    outcome.files.push(out.finish()?);
    if ctx.emit_plot_script {
        outcome.files.push(write_plot_script(&dir, "series.csv", "t", &["re", "im"], Some("target"))?);
    }
    let last = ev.times().len() - 1;
    outcome.line(format!("initial {} E = {}", ev.initial.target, ev.initial.e_target));
    for s in &ev.targets {
        outcome.line(format!("target {} omega0 = {} |c(t_max)|^2 = {:e}", s.target, s.omega0(), s.values[last].norm_sqr()));
    }
    Ok(outcome)
}

/// Sub-geometric phase decomposition, stability intervals and effective
/// levels of every series.
pub fn run_phase(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.cfg;
    let geom = cfg.geometry()?;
    let ev = run_evolution(cfg, &geom)?;
    let dir = ctx.out_dir()?;
    let header = drive_header(ctx).with("initial", &ev.initial.target);
    let mut phase_csv = CsvOut::create(&dir.join("phase.csv"), Some(&header), &["target", "t", "A", "a", "phi", "singular"])?;
    let mut interval_csv = CsvOut::create(&dir.join("intervals.csv"), Some(&header), &["target", "t_start", "t_end", "label"])?;
    let mut level_csv =
        CsvOut::create(&dir.join("effective_level.csv"), Some(&header), &["target", "t", "E_eff", "shift_vs_initial"])?;
    let mut outcome = Outcome::default();
    let t_eval = cfg.eval_time(ev.times());

    let initial_phase = decompose(&ev.initial, cfg.eps_zero)?;
    let initial_level = effective_level(ev.initial.e_target, &initial_phase);
    for s in ev.all_series() {
        let id = s.target.to_string();
        let ph = decompose(s, cfg.eps_zero)?;
        for k in 0..ph.len() {
            phase_csv.row([
                id.clone(),
                fmt_f64(ph.times[k]),
                fmt_f64(ph.modulus[k]),
                fmt_f64(ph.log_modulus[k]),
                fmt_f64(ph.phase[k]),
                u8::from(ph.singular[k]).to_string(),
            ])?;
        }
        match stability_intervals(&ph, cfg.slope_tol) {
            Ok(intervals) => {
                for iv in &intervals {
                    interval_csv.row([id.clone(), fmt_f64(iv.t_start), fmt_f64(iv.t_end), iv.kind.to_string()])?;
                }
                outcome.line(format!("{id}: {} stability interval(s)", intervals.len()));
            }
            Err(kitaev_core::Error::TooFewSamples { found, .. }) => {
                outcome.line(format!("{id}: no stability intervals ({found} non-singular samples)"));
            }
            Err(e) => return Err(e.into()),
        }
        let level = effective_level(s.e_target, &ph);
        for (k, (&t, &e)) in level.times.iter().zip(&level.values).enumerate() {
            let shift = e - initial_level.values[k];
            level_csv.row([id.clone(), fmt_f64(t), fmt_f64(e), fmt_f64(shift)])?;
        }
        if s.target != ev.initial.target {
            report_level(&mut outcome, &id, &level, &initial_level, t_eval);
        }
    }
    outcome.files.push(phase_csv.finish()?);
    outcome.files.push(interval_csv.finish()?);
    outcome.files.push(level_csv.finish()?);
    if ctx.emit_plot_script {
        outcome.files.push(write_plot_script(&dir, "phase.csv", "t", &["a", "phi"], Some("target"))?);
        outcome.files.push(write_plot_script(&dir, "effective_level.csv", "t", &["E_eff"], Some("target"))?);
    }
    Ok(outcome)
}

fn report_level(outcome: &mut Outcome, id: &str, level: &EffectiveLevel, initial: &EffectiveLevel, t: f64) {
    if let (Ok(e), Ok(e0)) = (level.at(t), initial.at(t)) {
        if e.is_finite() {
            outcome.line(format!("{id}: E_eff({t}) = {e}, shifted transition = {}", e - e0));
        } else {
            outcome.line(format!("{id}: E_eff({t}) undefined (coefficient vanishes)"));
        }
    }
}
