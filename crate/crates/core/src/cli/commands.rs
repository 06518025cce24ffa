use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use super::spec::*;
use crate::equilibrium::{best_response, enumerate_nash, find_nash, social_optimum, BestResponseKind};
use crate::error::{invalid, Result};
use crate::hetero::{hetero_nash, HeteroNashOptions, HeteroStatus};
use crate::mean_field::{
    marginal_value, tail_distribution, transient_ode_strided, GameParams, SamplingDistribution, DEFAULT_TOL,
};
use crate::sim::{
    default_warmup, estimate_deviation_cost, run_coupled_sim, run_equilibrium_sim, tail_csv, two_server_externality,
    CouplingConfig, DeviationEstimate, Estimate, SimConfig,
};

/// What a command produced, before formatting.
pub(crate) struct Outcome {
    pub result: Value,
    pub csv: Option<String>,
    /// Human-readable lines for stderr.
    pub notes: Vec<String>,
    /// Set when the command finished but did not reach its goal.
    pub failure: Option<String>,
}

impl Outcome {
    fn json(result: impl Serialize) -> Result<Self> {
        Ok(Self {
            result: to_value(result)?,
            csv: None,
            notes: Vec::new(),
            failure: None,
        })
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    fn note(mut self, line: String) -> Self {
        self.notes.push(line);
        self
    }
}

pub(crate) fn to_value(result: impl Serialize) -> Result<Value> {
    serde_json::to_value(result).map_err(|e| invalid(format!("cannot serialize result: {e}")))
}

pub(crate) fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Tail(p) => tail(p),
        Command::Nash(p) => nash(p),
        Command::Brfig(p) => brfig(p),
        Command::Vfig(p) => vfig(p),
        Command::Socopt(p) => {
            let params = GameParams::with_ratio(p.lambda, p.cs_over_c, p.lmax)?;
            Outcome::json(social_optimum(&params, p.refine_tol)?)
        }
        Command::Hetero(p) => hetero(p),
        Command::Simulate(p) => simulate(p),
        Command::Couple(p) => couple(p),
        Command::Externality(p) => {
            let r = two_server_externality(p.lambda, p.horizon, p.warmup, p.seed)?;
            let line = format!(
                "w_hat = {:.5} ± {:.5}, M/M/2 = {:.5}, z = {:.2}",
                r.w_hat.mean, r.w_hat.stderr, r.mm2_wait, r.z_score
            );
            Ok(Outcome::json(r)?.note(line))
        }
        Command::Deviation(p) => deviation(p),
        Command::Ode(p) => ode(p),
    }
}

/// `lmax` implied by a strategy string when none is given.
fn implied_lmax(text: &str) -> Result<usize> {
    Ok(parse_mu(text, None)?.l_max())
}

fn tail(p: &TailParams) -> Result<Outcome> {
    let mu = parse_mu(&p.mu, p.lmax)?;
    let t = tail_distribution(&mu, p.lambda, p.tol)?;
    let mut csv = String::from("k,r\n");
    for (k, r) in t.r.iter().enumerate() {
        writeln!(csv, "{k},{r}").expect("writing to a String");
    }
    let line = format!("truncation bound {:e} after k = {}", t.truncation_bound, t.truncation_k);
    Ok(Outcome::json(&t)?.with_csv(csv).note(line))
}

fn nash(p: &NashParams) -> Result<Outcome> {
    let params = GameParams::with_ratio(p.lambda, p.cs_over_c, p.lmax)?;
    if p.single {
        #[derive(Serialize)]
        struct Single {
            equilibrium: f64,
        }
        let s = find_nash(&params)?;
        return Ok(Outcome::json(Single { equilibrium: s })?.note(format!("equilibrium at {s}")));
    }
    let report = enumerate_nash(&params, p.q_grid)?;
    let mut out = Outcome::json(&report)?;
    for w in &report.warnings {
        out = out.note(format!("warning: {w}"));
    }
    let listed: Vec<String> = report.equilibria.iter().map(|e| format!("{:.6}", e.value)).collect();
    Ok(out.note(format!("equilibria: {}", listed.join(" "))))
}

#[derive(Serialize)]
struct BrRow {
    opponent: f64,
    lo: f64,
    hi: f64,
    kind: BestResponseKind,
}

fn brfig(p: &BrfigParams) -> Result<Outcome> {
    let params = GameParams::with_ratio(p.lambda, p.cs_over_c, p.lmax)?;
    let mut rows = Vec::new();
    for s in grid(1.0, p.lmax as f64, p.step)? {
        let mu = SamplingDistribution::from_real(s.min(p.lmax as f64), p.lmax)?;
        let br = best_response(&mu, &params)?;
        rows.push(BrRow {
            opponent: s,
            lo: br.lo,
            hi: br.hi,
            kind: br.kind,
        });
    }
    let mut csv = String::from("opponent,br_lo,br_hi,kind\n");
    for r in &rows {
        let kind = match r.kind {
            BestResponseKind::SingleInteger => "single",
            BestResponseKind::Interval => "interval",
        };
        writeln!(csv, "{},{},{},{kind}", r.opponent, r.lo, r.hi).expect("writing to a String");
    }
    Ok(Outcome::json(&rows)?.with_csv(csv))
}

#[derive(Serialize)]
struct VRow {
    opponent: f64,
    v: f64,
}

fn vfig(p: &VfigParams) -> Result<Outcome> {
    if p.l == 0 {
        return Err(invalid("--l must be >= 1"));
    }
    let (a, b) = parse_range(&p.opponent_range)?;
    let l_max = p.lmax.unwrap_or_else(|| (p.l + 1).max(b.ceil() as usize));
    let mut rows = Vec::new();
    for s in grid(a, b, p.step)? {
        let mu = SamplingDistribution::from_real(s.min(b), l_max)?;
        let v = marginal_value(p.l, &mu, p.lambda, DEFAULT_TOL)?
            .finite()
            .ok_or_else(|| invalid("marginal value unbounded"))?;
        rows.push(VRow { opponent: s, v });
    }
    let mut csv = String::from("opponent,v,ln_v\n");
    for r in &rows {
        writeln!(csv, "{},{},{}", r.opponent, r.v, r.v.ln()).expect("writing to a String");
    }
    Ok(Outcome::json(&rows)?.with_csv(csv))
}

fn hetero(p: &HeteroParams) -> Result<Outcome> {
    let opts = HeteroNashOptions {
        damping: p.damping,
        max_iter: p.max_iter,
        initial: None,
    };
    let report = hetero_nash(p.lambda, p.c_s, p.l_max, &p.density, &opts)?;
    let mut out = Outcome::json(&report)?.note(format!(
        "{:?} after {} iterations, thresholds {:?}",
        report.status, report.iterations, report.strategy.thresholds
    ));
    if report.status == HeteroStatus::NonConverged {
        out.failure = Some(format!("no convergence within {} iterations", p.max_iter));
    }
    Ok(out)
}

fn simulate(p: &SimulateParams) -> Result<Outcome> {
    let cfg = SimConfig {
        n: p.n,
        lambda: p.lambda,
        mu: parse_mu(&p.mu, p.lmax)?,
        horizon: p.horizon,
        warmup: p.warmup.unwrap_or_else(|| default_warmup(p.lambda)),
        seed: p.seed,
        tagged_fraction: p.tagged_fraction,
        tagged_l: p.tagged_l,
        batches: p.batches,
    };
    cfg.validate()?;
    let result = run_equilibrium_sim(&cfg)?;
    let line = format!(
        "mean wait {:.5} ± {:.5} over {} events",
        result.mean_wait_all.mean, result.mean_wait_all.stderr, result.event_count
    );
    Ok(Outcome::json(&result)?.with_csv(tail_csv(&result)).note(line))
}

fn couple(p: &CoupleParams) -> Result<Outcome> {
    let l_max = match p.lmax {
        Some(l) => l,
        None => implied_lmax(&p.mu1)?.max(implied_lmax(&p.mu2)?),
    };
    let (mu1, mu2) = (parse_mu(&p.mu1, Some(l_max))?, parse_mu(&p.mu2, Some(l_max))?);
    let cfg = CouplingConfig {
        n: p.n,
        lambda: p.lambda,
        horizon: p.horizon,
        warmup: p.warmup,
        seed: p.seed,
    };
    let report = run_coupled_sim(&cfg, &mu1, &mu2)?;
    let line = format!("violations: {} ({} events)", report.violations, report.events);
    Ok(Outcome::json(&report)?.note(line))
}

#[derive(Serialize)]
struct DeviationSweep {
    estimates: Vec<DeviationEstimate>,
    best_tagged_l: usize,
    best_gain: Estimate,
    /// `best_gain / cost_equilibrium`.
    relative_gain: f64,
}

fn deviation(p: &DeviationParams) -> Result<Outcome> {
    let mu = parse_mu(&p.mu, p.lmax)?;
    let ls: Vec<usize> = match p.tagged_l {
        Some(l) => vec![l],
        None => (1..=mu.l_max().min(p.n)).collect(),
    };
    let mut estimates = Vec::with_capacity(ls.len());
    for &l in &ls {
        let cfg = SimConfig {
            n: p.n,
            lambda: p.lambda,
            mu: mu.clone(),
            horizon: p.horizon,
            warmup: p.warmup.unwrap_or_else(|| default_warmup(p.lambda)),
            seed: p.seed,
            tagged_fraction: p.tagged_fraction,
            tagged_l: Some(l),
            batches: p.batches,
        };
        estimates.push(estimate_deviation_cost(&cfg, p.c, p.cs)?);
    }
    let best = estimates
        .iter()
        .max_by(|a, b| a.gain.mean.total_cmp(&b.gain.mean))
        .expect("at least one deviation");
    let sweep = DeviationSweep {
        best_tagged_l: best.tagged_l.expect("tagged_l set"),
        best_gain: best.gain,
        relative_gain: best.gain.mean / best.cost_equilibrium.mean,
        estimates: estimates.clone(),
    };
    let line = format!(
        "best deviation L = {}: gain {:.5} ± {:.5} ({:.3}% of cost)",
        sweep.best_tagged_l,
        sweep.best_gain.mean,
        sweep.best_gain.stderr,
        100.0 * sweep.relative_gain
    );
    Ok(Outcome::json(&sweep)?.note(line))
}

fn ode(p: &OdeParams) -> Result<Outcome> {
    let mu = parse_mu(&p.mu, p.lmax)?;
    let r0 = if p.init.trim() == "empty" {
        vec![1.0]
    } else {
        p.init
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| invalid(format!("bad initial value {x:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let traj = transient_ode_strided(&mu, p.lambda, &r0, p.t_end, p.dt, p.stride)?;
    let mut csv = String::from("t,k,r\n");
    for (t, state) in traj.times.iter().zip(&traj.states) {
        for k in 1..=p.max_k {
            let r = state.get(k).copied().unwrap_or(0.0);
            writeln!(csv, "{t},{k},{r}").expect("writing to a String");
        }
    }
    Ok(Outcome::json(&traj)?.with_csv(csv))
}
