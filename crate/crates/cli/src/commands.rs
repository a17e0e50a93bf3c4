use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use mdcf::cf::{cf_format, cf_parse, CfExpansion};
use mdcf::dcf::{self, MnValue};
use mdcf::hall::{self, BoundedCantor};
use mdcf::rational::{self, parse_rational};
use mdcf::{CertifiedInterval, Error, Result};

use crate::{Command, Outcome, RunConfig};

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::Mn { cf, n_max, width } => mn(cfg, cf, *n_max, width.as_deref()),
        Command::Mu { cf, count, width } => mu(cfg, cf, *count, width.as_deref()),
        Command::Tau { depth, tau, exact, profile } => tau_cmd(cfg, *depth, tau, *exact, *profile),
        Command::Covering { r0, r_max } => covering(cfg, *r0, *r_max),
        Command::Omega0 { r0 } => omega0(cfg, *r0),
        Command::Lemma2 { r1, r2 } => lemma2(cfg, *r1, *r2),
        Command::Select { m, r0, r_max } => select(cfg, m, *r0, *r_max),
        Command::Construct { m, eps, blocks, r0, r_max, out } => construct(cfg, m, eps, *blocks, *r0, *r_max, out),
        Command::Vahlen { samples, depth } => vahlen(cfg, *samples, *depth),
    }
}

fn done(report: Value) -> Result<Outcome> {
    Ok(Outcome { report, passed: true })
}

fn width_or_default(cfg: &RunConfig, width: Option<&str>) -> Result<BigRational> {
    let w = match width {
        Some(text) => parse_rational(text)?,
        None => BigRational::new(1.into(), rational::pow10(cfg.digits + 2)),
    };
    if w <= rational::int(0) {
        return Err(Error::InvalidArgument("--width must be positive".into()));
    }
    Ok(w)
}

/// Inserts `{key}_lo` and `{key}_hi`.
fn put_interval(map: &mut Map<String, Value>, key: &str, iv: &CertifiedInterval, digits: u32) {
    let (lo, hi) = iv.to_decimal(digits);
    map.insert(format!("{key}_lo"), lo.into());
    map.insert(format!("{key}_hi"), hi.into());
}

fn sci(x: f64) -> Value {
    format!("{x:.3e}").into()
}

fn mn_row(v: &MnValue, digits: u32) -> Map<String, Value> {
    let mut row = Map::new();
    row.insert("n".into(), v.n.into());
    row.insert("class".into(), v.class.label().into());
    row.insert("nu".into(), v.class.nu().into());
    put_interval(&mut row, "value", &v.value, digits);
    row
}

fn mn(cfg: &RunConfig, cf: &str, n_max: usize, width: Option<&str>) -> Result<Outcome> {
    let cf = cf_parse(cf)?;
    let width = width_or_default(cfg, width)?;
    let values = dcf::mn_values(&cf, 0..=n_max, &width)?;
    done(Value::Array(values.iter().map(|v| Value::Object(mn_row(v, cfg.digits))).collect()))
}

fn mu(cfg: &RunConfig, cf: &str, count: usize, width: Option<&str>) -> Result<Outcome> {
    let cf = cf_parse(cf)?;
    let width = width_or_default(cfg, width)?;
    let mu = dcf::mu_function(&cf, count, &width)?;
    let mut rows = Vec::new();
    for (n, (q, value)) in mu.nodes().iter().enumerate() {
        let mut row = Map::new();
        row.insert("n".into(), n.into());
        row.insert("q".into(), q.to_string().into());
        put_interval(&mut row, "value", value, cfg.digits);
        if n < mu.segments() {
            put_interval(&mut row, "tmu_max", &dcf::tmu_segment_max(&mu, n)?, cfg.digits);
        } else {
            row.insert("tmu_max_lo".into(), Value::Null);
            row.insert("tmu_max_hi".into(), Value::Null);
        }
        rows.push(Value::Object(row));
    }
    done(Value::Array(rows))
}

fn tau_row(r: &hall::TauReport, tau: &str, method: &str, digits: u32) -> Value {
    let mut row = Map::new();
    row.insert("depth".into(), r.depth.into());
    row.insert("method".into(), method.into());
    row.insert("tau".into(), tau.into());
    row.insert("gaps".into(), r.gaps.into());
    put_interval(&mut row, "min_ratio", &r.min_ratio, digits);
    row.insert("witness".into(), r.witness.to_string().into());
    row.insert("passed".into(), r.passed.into());
    Value::Object(row)
}

fn tau_cmd(cfg: &RunConfig, depth: usize, tau_text: &str, exact: bool, profile: bool) -> Result<Outcome> {
    let tau = parse_rational(tau_text)?;
    let cantor = BoundedCantor::f5();
    let (method, reports) = match (exact, profile) {
        (true, true) => {
            let reports = (1..=depth).map(|d| hall::tau_verify(&hall::enumerate_gaps(d)?, &tau)).collect::<Result<Vec<_>>>()?;
            ("exact", reports)
        }
        (true, false) => ("exact", vec![hall::tau_verify(&hall::enumerate_gaps(depth)?, &tau)?]),
        (false, true) => ("scan", hall::tau_profile(&cantor, depth, &tau)?),
        (false, false) => ("scan", vec![hall::tau_scan(&cantor, depth, &tau)?]),
    };
    let passed = reports.iter().all(|r| r.passed);
    let rows: Vec<Value> = reports.iter().map(|r| tau_row(r, tau_text, method, cfg.digits)).collect();
    let report = if profile { Value::Array(rows) } else { rows.into_iter().next().unwrap_or(Value::Null) };
    Ok(Outcome { report, passed })
}

fn covering(cfg: &RunConfig, r0: u64, r_max: u64) -> Result<Outcome> {
    let rep = hall::covering_check(r0, r_max)?;
    let failures: Vec<Value> = rep.failures.iter().map(|f| json!({"r": f.r, "condition": f.condition})).collect();
    Ok(Outcome {
        report: json!({
            "r0": rep.r0,
            "r_max": rep.r_max,
            "omega0": rep.omega0.to_decimal(cfg.digits),
            "ok": rep.ok,
            "failures": failures,
        }),
        passed: rep.ok,
    })
}

fn omega0(cfg: &RunConfig, r0: u64) -> Result<Outcome> {
    let w = hall::omega0(r0)?;
    let enc = w.enclose(64 + 4 * cfg.digits);
    let mut map = Map::new();
    map.insert("r0".into(), r0.into());
    map.insert("omega0".into(), w.to_decimal(cfg.digits).into());
    map.insert("exact".into(), w.to_string().into());
    put_interval(&mut map, "omega0", &enc, cfg.digits);
    done(Value::Object(map))
}

fn lemma2(cfg: &RunConfig, r1: u64, r2: u64) -> Result<Outcome> {
    let a = hall::lemma2_analysis(r1, r2)?;
    let mut map = Map::new();
    map.insert("r1".into(), r1.into());
    map.insert("r2".into(), r2.into());
    put_interval(&mut map, "corner", &a.corner, cfg.digits);
    put_interval(&mut map, "bound", &a.bound, cfg.digits);
    map.insert("argmax".into(), json!([format!("{:.6}", a.argmax.0), format!("{:.6}", a.argmax.1)]));
    map.insert("corner_is_max".into(), a.corner_is_max.into());
    map.insert("boxes".into(), a.boxes.into());
    done(Value::Object(map))
}

fn select(cfg: &RunConfig, m: &str, r0: u64, r_max: u64) -> Result<Outcome> {
    let m = parse_rational(m)?;
    let (r1, r2) = mdcf::select_pair(&m, r0, r_max)?;
    let seg = hall::segment_j(r1, r2)?;
    done(json!({
        "r1": r1,
        "r2": r2,
        "segment_lo": seg.lo.to_decimal(cfg.digits),
        "segment_hi": seg.hi.to_decimal(cfg.digits),
    }))
}

fn digits_string(d: &[u8]) -> String {
    d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn construct(
    cfg: &RunConfig,
    m_text: &str,
    eps: &str,
    blocks: usize,
    r0: u64,
    r_max: u64,
    out: &std::path::Path,
) -> Result<Outcome> {
    let m = parse_rational(m_text)?;
    let eps = parse_rational(eps)?;
    let c = mdcf::construct(&m, &eps, blocks, r0, r_max)?;
    let literal = cf_format(&c.alpha);
    std::fs::write(out, format!("{literal}\n"))
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", out.display())))?;

    let rep = &c.report;
    let d = cfg.digits;
    let subsequence: Vec<Value> = rep
        .subsequence
        .iter()
        .map(|e| {
            let mut row = Map::new();
            row.insert("nu".into(), e.nu.into());
            row.insert("position".into(), e.position.into());
            row.insert("pair".into(), e.pair.into());
            match &e.value {
                Some(v) => put_interval(&mut row, "value", &v.value, d),
                None => {
                    row.insert("value_lo".into(), Value::Null);
                    row.insert("value_hi".into(), Value::Null);
                }
            }
            row.insert("distance".into(), e.distance.map(sci).unwrap_or(Value::Null));
            row.insert("prefix_error".into(), sci(e.prefix_error));
            row.insert("tail_error".into(), sci(e.tail_error));
            Value::Object(row)
        })
        .collect();
    let value_of = |v: &Option<MnValue>| -> Value {
        match v {
            Some(v) => Value::Object(mn_row(v, d)),
            None => Value::Null,
        }
    };

    let mut map = Map::new();
    map.insert("m".into(), m_text.into());
    map.insert("r1".into(), c.solution.r1.into());
    map.insert("r2".into(), c.solution.r2.into());
    map.insert("r0".into(), rep.r0.into());
    map.insert("omega0".into(), rep.omega0.to_decimal(d).into());
    map.insert("b_digits".into(), digits_string(&c.solution.b_digits).into());
    map.insert("c_digits".into(), digits_string(&c.solution.c_digits).into());
    put_interval(&mut map, "image", &c.solution.image, d);
    map.insert("backtracks".into(), c.solution.backtracks.into());
    put_interval(&mut map, "slope_bound", &c.slope_bound, d);
    map.insert("slope_condition_holds".into(), c.slope_condition_holds.into());
    map.insert("alpha_file".into(), out.display().to_string().into());
    map.insert("alpha_len".into(), c.alpha.known_len().unwrap_or(0).into());
    map.insert("block_positions".into(), json!(rep.block_positions));
    map.insert("subsequence".into(), Value::Array(subsequence));
    map.insert("branch_violations".into(), json!(rep.branch_violations));
    map.insert("converging".into(), rep.converging.into());
    map.insert("final_distance".into(), rep.final_distance().map(sci).unwrap_or(Value::Null));
    map.insert("offseq_min".into(), value_of(&rep.offseq_min));
    map.insert("offseq_count".into(), rep.offseq_count.into());
    map.insert("offseq_above_omega0".into(), rep.offseq_above_omega0.into());
    map.insert("skip_min".into(), value_of(&rep.skip_min));
    map.insert("skip_above_omega0".into(), rep.skip_above_omega0.into());
    map.insert("min_passing_r0".into(), rep.min_passing_r0.into());
    match &rep.liminf {
        Some(l) => {
            put_interval(&mut map, "liminf", &l.value, d);
            map.insert("liminf_window".into(), json!([l.window.0, l.window.1]));
        }
        None => {
            map.insert("liminf_lo".into(), Value::Null);
            map.insert("liminf_hi".into(), Value::Null);
            map.insert("liminf_window".into(), Value::Null);
        }
    }
    map.insert("liminf_brackets_m".into(), rep.liminf_brackets_m.into());
    map.insert("pairs".into(), rep.pairs.into());
    map.insert("stopped_by".into(), rep.stopped_by.clone().into());
    let passed = rep.invariants_hold();
    map.insert("invariants_hold".into(), passed.into());
    Ok(Outcome { report: Value::Object(map), passed })
}

/// `[0; d_1, ..., d_depth, (1)]` with `d_i` uniform in `1..=9`. The golden
/// tail keeps the expansion irrational so every index up to `depth` is decidable.
pub fn random_expansion(rng: &mut impl Rng, depth: usize) -> Result<CfExpansion> {
    let pre = (0..depth).map(|_| rng.gen_range(1..=9)).collect();
    CfExpansion::periodic(0, pre, vec![1])
}

fn vahlen(cfg: &RunConfig, samples: usize, depth: usize) -> Result<Outcome> {
    if samples == 0 || depth < 2 {
        return Err(Error::InvalidArgument("vahlen needs samples >= 1 and depth >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut violations = Vec::new();
    for sample in 0..samples {
        let cf = random_expansion(&mut rng, depth)?;
        for nu in mdcf::vahlen_violations(&cf, depth)? {
            violations.push(json!({"sample": sample, "nu": nu, "alpha": cf_format(&cf)}));
        }
    }
    let ok = violations.is_empty();
    Ok(Outcome {
        report: json!({"samples": samples, "depth": depth, "seed": cfg.seed, "ok": ok, "violations": violations}),
        passed: ok,
    })
}
