use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use fibren::attractor::{
    endpoint_paths, eta_both, eta_from_measures, eta_sets, preimage_levels, preimage_tree, read_endpoints, reduce_stage, refine_depth,
    return_stage, trichotomy, write_endpoints, zeta_lower, zeta_lower_from_measure, zeta_lower_set, zeta_upper, zeta_upper_report,
    AttractorError, BoundReport, CycleDynamics, EndpointStage, JobShard, MapChoice, RunConfig, SegmentSet, TrichotomyVerdict,
};
use fibren::distortion::{koebe_constant, schwarzian_nonpositive};
use fibren::fixpoint::{certified_fixed_point, Profile};
use fibren::renorm::RenormElement;
use fibren::rigor::{format_hex, parse_hex, IInterval};

use crate::error::CliError;
use crate::{Cli, Command, MapArg, RunProfile};

const EVAL_DEGREE: usize = 24;

struct Ctx {
    dir: PathBuf,
    eval_degree: Option<usize>,
    map: MapChoice,
}

impl Ctx {
    fn element(&self, d: f64) -> Result<RenormElement> {
        let path = self.dir.join(RenormElement::data_file_name(d));
        if !path.exists() {
            return Err(CliError::MissingData(path).into());
        }
        Ok(RenormElement::read_files(&self.dir, d)?)
    }

    fn eval_degree(&self) -> usize {
        self.eval_degree.unwrap_or(EVAL_DEGREE)
    }

    fn config(&self, base: RunConfig) -> RunConfig {
        RunConfig { eval_degree: self.eval_degree(), map: self.map, ..base }
    }

    fn dynamics(&self, d: f64) -> Result<CycleDynamics> {
        Ok(CycleDynamics::for_run(&self.element(d)?, &self.config(RunConfig::DESK))?)
    }

    fn read(&self, stage: EndpointStage, d: f64, n: usize, i: usize) -> Result<Vec<IInterval>> {
        let (left, right) = endpoint_paths(&self.dir, stage, d, n, i);
        for p in [&left, &right] {
            if !p.exists() {
                return Err(CliError::MissingData(p.clone()).into());
            }
        }
        read_endpoints(&self.dir, stage, d, n, i).map_err(|e| match e {
            AttractorError::Format(m) => CliError::CorruptEndpointFile(m).into(),
            e => e.into(),
        })
    }

    fn write(&self, stage: EndpointStage, d: f64, n: usize, i: usize, segs: &[IInterval]) -> Result<()> {
        write_endpoints(&self.dir, stage, d, n, i, segs)?;
        Ok(())
    }
}

fn default_data_dir() -> PathBuf {
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join("Data")).unwrap_or_else(|| PathBuf::from("Data"))
}

/// 1-based copy `i` of `m` as a shard.
fn shard(copy: usize, copies: usize) -> Result<JobShard> {
    copy.checked_sub(1)
        .and_then(|i| JobShard::new(i, copies))
        .ok_or_else(|| CliError::ShardOutOfRange { index: copy, count: copies }.into())
}

fn output_path(dir: &Path, kind: &str, d: f64, pieces: usize, n: usize, i: usize) -> PathBuf {
    dir.join(format!("output_{kind}.{d}.{pieces}.{n}.{i}"))
}

fn write_report(path: &Path, r: &BoundReport) -> Result<()> {
    if let Some(p) = path.parent() {
        fs::create_dir_all(p)?;
    }
    fs::write(path, r.to_text()).with_context(|| format!("writing {}", path.display()))
}

fn read_report(path: &Path) -> Result<BoundReport> {
    if !path.exists() {
        return Err(CliError::MissingData(path.to_path_buf()).into());
    }
    let text = fs::read_to_string(path)?;
    BoundReport::from_text(&text).map_err(|e| CliError::BadOutput { path: path.to_path_buf(), reason: e.to_string() }.into())
}

fn segments_path(dir: &Path, kind: &str, d: f64, pieces: usize, n: usize, i: usize) -> PathBuf {
    dir.join(format!("segments_{kind}.{d}.{pieces}.{n}.{i}"))
}

/// One `<tag> <lo> <hi>` line per segment, endpoints in hex.
fn write_segments(path: &Path, sets: &[(&str, &SegmentSet)]) -> Result<()> {
    let mut text = String::new();
    for (tag, set) in sets {
        for s in set.segments() {
            text.push_str(&format!("{tag} {} {}\n", format_hex(s.lo()), format_hex(s.hi())));
        }
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_segments(path: &Path, tag: &str) -> Result<Vec<IInterval>> {
    if !path.exists() {
        return Err(CliError::MissingData(path.to_path_buf()).into());
    }
    let bad = |reason: String| CliError::BadOutput { path: path.to_path_buf(), reason };
    let mut out = Vec::new();
    for line in fs::read_to_string(path)?.lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        let [t, lo, hi] = f[..] else {
            return Err(bad(format!("bad line {line:?}")).into());
        };
        if t != tag {
            continue;
        }
        let lo = parse_hex(lo).map_err(|e| bad(e.to_string()))?;
        let hi = parse_hex(hi).map_err(|e| bad(e.to_string()))?;
        out.push(IInterval::new(lo, hi).map_err(|e| bad(e.to_string()))?);
    }
    Ok(out)
}

fn level(l: usize) -> usize {
    l + 1
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let map = match cli.map {
        MapArg::Center => MapChoice::Center,
        MapArg::Enclosure => MapChoice::Enclosure,
    };
    let ctx = Ctx { dir: cli.data_dir.unwrap_or_else(default_data_dir), eval_degree: cli.eval_degree, map };
    match cli.command {
        Command::Fixpoint { degree, truncation, basis, delta, out } => fixpoint(&ctx, degree, Profile { truncation, basis, delta }, out),
        Command::Koebe { degree, mesh } => koebe(&ctx, degree, mesh),
        Command::Eta { degree, l, pieces, budget, cutoff, copies, copy } => {
            let cfg = RunConfig { pieces, eta_budget: budget, refine_eta: refine_depth(cutoff), ..RunConfig::DESK };
            eta(&ctx, degree, level(l), cfg, copy, copies)
        }
        Command::ZetaBelow { degree, l, pieces, return_budget, escape_budget, f1, f2, copies, copy } => {
            let cfg = RunConfig {
                pieces,
                return_budget,
                escape_budget,
                refine_return: refine_depth(f1),
                refine_escape: refine_depth(f2),
                ..RunConfig::DESK
            };
            zeta_below(&ctx, degree, level(l), cfg, copy, copies)
        }
        Command::CollectEta { degree, l, pieces, copies } => collect_eta(&ctx, degree, level(l), pieces, copies),
        Command::CollectZetaBelow { degree, l, pieces, copies } => collect_zeta_below(&ctx, degree, level(l), pieces, copies),
        Command::PreimagesZeta { degree, l, depth } => preimages_zeta(&ctx, degree, level(l), depth),
        Command::PreimagesZetaNext { degree, l, first, last, count, depth, copy } => {
            preimages_zeta_next(&ctx, degree, level(l), (first, last, count), depth, copy)
        }
        Command::ReduceIntervals { degree, l, files } => reduce_intervals(&ctx, degree, level(l), files),
        Command::PreimagesRenZetaNext { degree, l, files, depth, copy } => preimages_ren_zeta_next(&ctx, degree, level(l), files, depth, copy),
        Command::ComputeZeta { degree, l, files, depth } => compute_zeta(&ctx, degree, level(l), files, depth),
        Command::Prove { degree, profile, level, pieces, budget, preimage_depth, return_depth, report } => {
            let mut cfg = match profile {
                RunProfile::Desk => RunConfig::DESK,
                RunProfile::Overnight => RunConfig::OVERNIGHT,
                RunProfile::Proof => RunConfig::PROOF,
            };
            if let Some(p) = pieces {
                cfg.pieces = p;
            }
            if let Some(b) = budget {
                cfg.eta_budget = b;
                cfg.return_budget = b;
                cfg.escape_budget = b;
            }
            if let Some(k) = preimage_depth {
                cfg.preimage_depth = k;
            }
            if let Some(k) = return_depth {
                cfg.return_depth = k;
            }
            if let Some(e) = ctx.eval_degree {
                cfg.eval_degree = e;
            }
            cfg.map = ctx.map;
            let fp = if profile == RunProfile::Proof { Profile::proof(degree) } else { Profile::STANDARD };
            let n = level.unwrap_or(if degree < 4.5 { 9 } else { 4 });
            prove(degree, n, fp, cfg, report.as_deref())
        }
    }
}

fn fixpoint(ctx: &Ctx, d: f64, profile: Profile, out: Option<PathBuf>) -> Result<ExitCode> {
    let dir = out.unwrap_or_else(|| ctx.dir.clone());
    let r = certified_fixed_point(d, profile)?;
    fs::create_dir_all(&dir)?;
    fs::write(dir.join(format!("certificate_{d}")), format!("{}\n", r.certificate))?;
    println!("{}", r.certificate);
    let Some(elem) = r.enclosure else {
        return Err(CliError::InvalidCertificate(d).into());
    };
    let path = elem.write_files(&dir)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn koebe(ctx: &Ctx, d: f64, mesh: usize) -> Result<ExitCode> {
    let elem = ctx.element(d)?;
    let negative = schwarzian_nonpositive(&elem, mesh)?;
    let k = koebe_constant(&elem)?;
    println!("tau = [{}, {}]", format_hex(k.tau.lo()), format_hex(k.tau.hi()));
    println!("tau ~ {:.12}", k.tau.midpoint());
    println!("C <= {:?}", k.c);
    println!("schwarzian_nonpositive = {negative}");
    Ok(if negative { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn keep_params(r: &mut BoundReport, keys: &[&str]) {
    r.parameters.retain(|k, _| keys.contains(&k.as_str()));
}

fn eta(ctx: &Ctx, d: f64, n: usize, mut cfg: RunConfig, copy: usize, copies: usize) -> Result<ExitCode> {
    let sh = shard(copy, copies)?;
    cfg = ctx.config(cfg);
    let dy = ctx.dynamics(d)?;
    let sets = eta_sets(&dy, n, &cfg, sh);
    let mut r = eta_from_measures(&dy, n, &cfg, sets.lower.measure_lo(), sets.upper.measure_hi());
    keep_params(&mut r, &["pieces", "eta_budget", "refine_eta", "eval_degree", "map"]);
    r.parameters.insert("copy".into(), format!("{copy}/{copies}"));
    write_segments(&segments_path(&ctx.dir, "eta", d, cfg.pieces, n, copy), &[("L", &sets.lower), ("U", &sets.upper)])?;
    let path = output_path(&ctx.dir, "eta", d, cfg.pieces, n, copy);
    write_report(&path, &r)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn zeta_below(ctx: &Ctx, d: f64, n: usize, mut cfg: RunConfig, copy: usize, copies: usize) -> Result<ExitCode> {
    let sh = shard(copy, copies)?;
    cfg = ctx.config(cfg);
    let dy = ctx.dynamics(d)?;
    let counted = zeta_lower_set(&dy, n, None, &cfg, sh);
    let mut r = zeta_lower_from_measure(&dy, n, &cfg, counted.measure_lo());
    keep_params(&mut r, &["pieces", "return_budget", "escape_budget", "refine_return", "refine_escape", "eval_degree", "map"]);
    r.parameters.insert("copy".into(), format!("{copy}/{copies}"));
    write_segments(&segments_path(&ctx.dir, "zeta_below", d, cfg.pieces, n, copy), &[("C", &counted)])?;
    let path = output_path(&ctx.dir, "zeta_below", d, cfg.pieces, n, copy);
    write_report(&path, &r)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn collect_eta(ctx: &Ctx, d: f64, n: usize, pieces: usize, copies: usize) -> Result<ExitCode> {
    let dy = ctx.dynamics(d)?;
    let (mut lower, mut upper) = (Vec::new(), Vec::new());
    let mut params = None;
    for i in 1..=copies {
        let r = read_report(&output_path(&ctx.dir, "eta", d, pieces, n, i))?;
        let path = segments_path(&ctx.dir, "eta", d, pieces, n, i);
        lower.extend(read_segments(&path, "L")?);
        upper.extend(read_segments(&path, "U")?);
        params.get_or_insert(r.parameters);
    }
    let (lower, upper) = (SegmentSet::from_segments(lower), SegmentSet::from_segments(upper));
    let mut r = eta_from_measures(&dy, n, &RunConfig { pieces, ..RunConfig::DESK }, lower.measure_lo(), upper.measure_hi());
    r.parameters = params.unwrap_or_default();
    r.parameters.remove("copy");
    r.parameters.insert("copies".into(), copies.to_string());
    print!("{r}");
    Ok(ExitCode::SUCCESS)
}

fn collect_zeta_below(ctx: &Ctx, d: f64, n: usize, pieces: usize, copies: usize) -> Result<ExitCode> {
    let dy = ctx.dynamics(d)?;
    let mut counted = Vec::new();
    let mut params = None;
    for i in 1..=copies {
        let r = read_report(&output_path(&ctx.dir, "zeta_below", d, pieces, n, i))?;
        counted.extend(read_segments(&segments_path(&ctx.dir, "zeta_below", d, pieces, n, i), "C")?);
        params.get_or_insert(r.parameters);
    }
    let counted = SegmentSet::from_segments(counted);
    let mut r = zeta_lower_from_measure(&dy, n, &RunConfig { pieces, ..RunConfig::DESK }, counted.measure_lo());
    r.parameters = params.unwrap_or_default();
    r.parameters.remove("copy");
    r.parameters.insert("copies".into(), copies.to_string());
    print!("{r}");
    Ok(ExitCode::SUCCESS)
}

fn preimages_zeta(ctx: &Ctx, d: f64, n: usize, depth: usize) -> Result<ExitCode> {
    let dy = ctx.dynamics(d)?;
    let levels = preimage_levels(dy.base(), dy.t_inner(n), depth);
    let all: Vec<IInterval> = levels.iter().flatten().copied().collect();
    ctx.write(EndpointStage::Preimages, d, n, 0, &all)?;
    let deepest = levels.last().map_or(0, Vec::len);
    let first = all.len() - deepest;
    println!("{first} {} {deepest}", all.len().saturating_sub(1));
    Ok(ExitCode::SUCCESS)
}

fn preimages_zeta_next(ctx: &Ctx, d: f64, n: usize, (first, last, count): (usize, usize, usize), depth: usize, copy: usize) -> Result<ExitCode> {
    let index = first + copy.saturating_sub(1);
    if copy == 0 || copy > count || index > last {
        return Err(CliError::ShardOutOfRange { index: copy, count }.into());
    }
    let dy = ctx.dynamics(d)?;
    let roots = ctx.read(EndpointStage::Preimages, d, n, 0)?;
    let s = *roots.get(index).ok_or(CliError::ShardOutOfRange { index: copy, count })?;
    let tree = preimage_tree(dy.base(), s, depth);
    ctx.write(EndpointStage::Preimages, d, n, copy, &tree)?;
    println!("{}", tree.len());
    Ok(ExitCode::SUCCESS)
}

fn reduce_intervals(ctx: &Ctx, d: f64, n: usize, files: usize) -> Result<ExitCode> {
    let dy = ctx.dynamics(d)?;
    let mut comps = Vec::new();
    for i in 0..files {
        comps.extend(ctx.read(EndpointStage::Preimages, d, n, i)?);
    }
    let reduced = reduce_stage(&dy, n, &comps);
    let segs = reduced.segments();
    for i in 0..files {
        let range = JobShard { index: i, count: files }.range(segs.len());
        ctx.write(EndpointStage::Reduced, d, n, i, &segs[range])?;
    }
    println!("{} {:e}", segs.len(), reduced.measure_lo());
    Ok(ExitCode::SUCCESS)
}

fn preimages_ren_zeta_next(ctx: &Ctx, d: f64, n: usize, files: usize, depth: usize, copy: usize) -> Result<ExitCode> {
    if copy >= files {
        return Err(CliError::ShardOutOfRange { index: copy, count: files }.into());
    }
    let dy = ctx.dynamics(d)?;
    let reduced = SegmentSet::from_segments(ctx.read(EndpointStage::Reduced, d, n, copy)?);
    let returning = return_stage(&dy, n, &reduced, depth, JobShard::WHOLE);
    ctx.write(EndpointStage::Returns, d, n, copy, returning.segments())?;
    println!("{} {:e}", returning.len(), returning.measure_lo());
    Ok(ExitCode::SUCCESS)
}

fn compute_zeta(ctx: &Ctx, d: f64, n: usize, files: usize, depth: usize) -> Result<ExitCode> {
    let dy = ctx.dynamics(d)?;
    let mut segs = Vec::new();
    for i in 0..files {
        segs.extend(ctx.read(EndpointStage::Returns, d, n, i)?);
    }
    let returning = SegmentSet::from_segments(segs);
    let mut r = zeta_upper_report(&dy, n, &RunConfig::DESK, &returning);
    r.parameters.clear();
    r.parameters.insert("return_depth".into(), depth.to_string());
    r.parameters.insert("files".into(), files.to_string());
    print!("{r}");
    Ok(ExitCode::SUCCESS)
}

fn prove(d: f64, n: usize, fp: Profile, cfg: RunConfig, report: Option<&Path>) -> Result<ExitCode> {
    eprintln!("certifying the fixed point (N = {}, K = {})", fp.truncation, fp.basis);
    let r = certified_fixed_point(d, fp)?;
    let Some(elem) = r.enclosure else {
        eprintln!("{}", r.certificate);
        eprintln!("error: {}", CliError::InvalidCertificate(d));
        return Ok(ExitCode::from(1));
    };
    if !schwarzian_nonpositive(&elem, 64)? {
        eprintln!("error: the Schwarzian sign is not certified");
        return Ok(ExitCode::from(1));
    }
    let c = koebe_constant(&elem)?.c;
    eprintln!("C <= {c:?}");
    let dy = CycleDynamics::for_run(&elem, &cfg)?;
    eprintln!("eta bounds (n = {n}, M = {})", cfg.pieces);
    let eta = eta_both(&dy, n, &cfg);
    eprintln!("zeta lower bound");
    let zl = zeta_lower(&dy, n, &cfg);
    eprintln!("zeta upper bound (N_pre = {}, K_ret = {})", cfg.preimage_depth, cfg.return_depth);
    let zu = zeta_upper(&dy, n, &cfg);
    let mut out = eta.merge(&zl).merge(&zu);
    let verdict = trichotomy(&out, c);
    out.parameters.insert("koebe_c".into(), format!("{c:?}"));
    out.parameters.insert("verdict".into(), verdict.to_string());
    print!("{out}");
    println!("verdict = {verdict}");
    if let Some(p) = report {
        write_report(p, &out)?;
    }
    Ok(match verdict {
        TrichotomyVerdict::IndeterminateCase2Band => ExitCode::from(2),
        _ => ExitCode::SUCCESS,
    })
}
