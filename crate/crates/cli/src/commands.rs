use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::json;

use freesnake::analysis::{estimate_homography, Homography, PipelineConfig};
use freesnake::assembly::{
    genus_template, render_centerline, AssemblyDocument, AssemblySpec, BendSign, Genus, SegmentSpec,
    BODY_FIBER_ANGLE_DEG,
};
use freesnake::batch::{analyze_trials, Execution, Trial};
use freesnake::compare::{aggregate, coverage_counts, duration_stats, regrid, Region, StdConvention};
use freesnake::free_model::{solve_fiber_angle, Boundary, FreeGeometry};
use freesnake::{Centerline, Units};

use crate::args::{AnalyzeArgs, CompareArgs, DesignArgs, SimulateArgs};
use crate::error::{CliError, CliResult};
use crate::io::{self, format_float};

/// Shared settings of every invocation.
#[derive(Debug, Clone)]
pub struct Context {
    pub out: PathBuf,
    pub pressure_kpa: f64,
}

#[derive(Debug, Serialize)]
struct RunMetadata {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    pressure_kpa: f64,
    parameters: serde_json::Value,
    inputs: Vec<String>,
    outputs: Vec<String>,
    warnings: Vec<String>,
}

impl Context {
    fn output(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write_metadata(
        &self,
        command: &'static str,
        parameters: serde_json::Value,
        inputs: Vec<String>,
        outputs: Vec<String>,
        warnings: Vec<String>,
    ) -> CliResult<PathBuf> {
        let meta = RunMetadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            pressure_kpa: self.pressure_kpa,
            parameters,
            inputs,
            outputs,
            warnings,
        };
        let path = self.output(&format!("run_{command}.json"));
        write_json(&path, &meta)?;
        Ok(path)
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(CliError::io(format!("writing {}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        CliError::Input(format!("{}: at `{at}`: {}", path.display(), e.inner()))
    })
}

/// Per-role curvature targets for `design`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignTargets {
    pub head: f64,
    pub mid: f64,
    pub tail: f64,
    #[serde(default = "default_total_length")]
    pub total_length_m: f64,
    #[serde(default)]
    pub genus: Option<String>,
}

fn default_total_length() -> f64 {
    0.40
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignedSegment {
    pub label: String,
    pub target_per_m: f64,
    pub alpha0_deg: f64,
    pub max_curvature_per_m: f64,
}

pub struct DesignOutcome {
    pub spec: AssemblySpec,
    pub segments: Vec<DesignedSegment>,
    pub spec_path: PathBuf,
}

/// Lays out head/mid/tail at 25:50:25 of the total relaxed length, each a
/// single left-bending arc at full inflation whose fiber angle is solved so
/// that its maximum curvature equals the target. A zero target yields a
/// straight segment.
pub fn design_assembly(targets: &DesignTargets, r0: f64) -> CliResult<(AssemblySpec, Vec<DesignedSegment>)> {
    if !(targets.total_length_m > 0.0 && targets.total_length_m.is_finite()) {
        return Err(CliError::Input(format!("total_length_m must be positive, got {}", targets.total_length_m)));
    }
    let roles = [("head", targets.head, 0.25), ("mid", targets.mid, 0.50), ("tail", targets.tail, 0.25)];
    let mut segments = Vec::new();
    let mut report = Vec::new();
    for (label, target, share) in roles {
        let l0 = share * targets.total_length_m;
        let (geom, sign) = if target == 0.0 {
            (FreeGeometry::from_degrees(l0, r0, BODY_FIBER_ANGLE_DEG)?, BendSign::Straight)
        } else {
            let alpha = solve_fiber_angle(target, r0, Boundary::Strict)
                .map_err(|e| CliError::from(e).context_role(label))?;
            (FreeGeometry::new(l0, r0, alpha)?, BendSign::Left)
        };
        let seg = SegmentSpec::uniform(label, geom, 1.0, sign)?;
        report.push(DesignedSegment {
            label: label.to_string(),
            target_per_m: target,
            alpha0_deg: geom.fiber_angle().to_degrees(),
            max_curvature_per_m: geom.max_curvature(),
        });
        segments.push(seg);
    }
    let genus = targets.genus.as_deref().unwrap_or("custom").parse::<Genus>().expect("infallible");
    Ok((AssemblySpec::new(genus, segments)?, report))
}

impl CliError {
    fn context_role(self, role: &str) -> CliError {
        match self {
            CliError::Infeasible(m) => CliError::Infeasible(format!("{role}: {m}")),
            CliError::Input(m) => CliError::Input(format!("{role}: {m}")),
            other => other,
        }
    }
}

pub fn design(ctx: &Context, args: &DesignArgs) -> CliResult<DesignOutcome> {
    let targets: DesignTargets = read_json(&args.targets)?;
    let (spec, segments) = design_assembly(&targets, args.r0)?;
    let spec_path = ctx.output("design.json");
    write_json(&spec_path, &AssemblyDocument::from(&spec))?;
    ctx.write_metadata(
        "design",
        json!({
            "R0_m": args.r0,
            "total_length_m": targets.total_length_m,
            "targets_per_m": { "head": targets.head, "mid": targets.mid, "tail": targets.tail },
            "lambda": 1.0,
            "segments": segments,
        }),
        vec![display(&args.targets)],
        vec![display(&spec_path)],
        vec![],
    )?;
    Ok(DesignOutcome {
        spec,
        segments,
        spec_path,
    })
}

pub fn load_spec(path: &Path) -> CliResult<AssemblySpec> {
    let doc: AssemblyDocument = read_json(path)?;
    AssemblySpec::try_from(&doc).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub struct SimulateOutcome {
    pub trace_path: PathBuf,
    pub points: usize,
}

pub fn simulate(ctx: &Context, args: &SimulateArgs) -> CliResult<SimulateOutcome> {
    let (spec, input) = match (&args.spec, &args.genus) {
        (Some(path), _) => (load_spec(path)?, display(path)),
        (None, Some(tag)) => (genus_template(tag)?, format!("template:{tag}")),
        (None, None) => return Err(CliError::Input("either --spec or --genus is required".into())),
    };
    if args.samples < 2 {
        return Err(CliError::Input(format!("--samples must be at least 2, got {}", args.samples)));
    }
    let segs = spec.segments().len();
    let per_segment = (args.samples - 1).div_ceil(segs) + 1;
    let line = render_centerline(&spec, per_segment)?;
    let trial_id = args.trial_id.clone().unwrap_or_else(|| spec.genus().name().to_string());

    let trace_path = ctx.output("trace.csv");
    let mut w = io::writer(&trace_path)?;
    let err = io::write_err(&trace_path);
    w.write_record(io::TRACE_HEADER).map_err(&err)?;
    for (i, p) in line.points().iter().enumerate() {
        w.write_record([trial_id.as_str(), &i.to_string(), &format_float(p.x), &format_float(p.y)])
            .map_err(&err)?;
    }
    w.flush().map_err(CliError::io(format!("writing {}", trace_path.display())))?;

    let segments: Vec<_> = spec
        .segments()
        .iter()
        .map(|s| {
            json!({
                "label": s.label(),
                "operating_length_m": s.operating_length(),
                "curvature_per_m": s.curvature(),
            })
        })
        .collect();
    ctx.write_metadata(
        "simulate",
        json!({
            "genus": spec.genus().name(),
            "samples_requested": args.samples,
            "samples_per_segment": per_segment,
            "points_written": line.len(),
            "trial_id": trial_id,
            "units": Units::Meters.tag(),
            "assembly": AssemblyDocument::from(&spec),
            "segments": segments,
        }),
        vec![input],
        vec![display(&trace_path)],
        vec![],
    )?;
    Ok(SimulateOutcome {
        trace_path,
        points: line.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Skipped {
    pub trial_id: String,
    pub reason: String,
}

pub struct AnalyzeOutcome {
    pub profile_path: PathBuf,
    pub analyzed: Vec<String>,
    pub skipped: Vec<Skipped>,
}

pub fn analyze(ctx: &Context, args: &AnalyzeArgs) -> CliResult<AnalyzeOutcome> {
    let config = PipelineConfig {
        samples: args.n,
        span: args.span,
        offset: args.offset,
    };
    if config.samples <= 2 * config.offset || config.offset == 0 || config.samples < 3 {
        return Err(CliError::Input(format!(
            "--n {} must exceed 2 × --offset {} (offset ≥ 1)",
            config.samples, config.offset
        )));
    }
    let units: Units = args.units.into();
    let traces = io::read_traces(&args.traces)?;
    let mut inputs = vec![display(&args.traces)];
    let mut warnings = Vec::new();

    let mut rectification: BTreeMap<String, Homography> = BTreeMap::new();
    if let Some(path) = &args.rectify {
        inputs.push(display(path));
        for (id, (src, dst)) in io::read_rectification(path)? {
            if !traces.contains_key(&id) {
                warnings.push(format!("rectification rows for unknown trial `{id}` ignored"));
                continue;
            }
            let h = estimate_homography(&src, &dst)
                .map_err(|e| CliError::Input(format!("{}: trial `{id}`: {e}", path.display())))?;
            rectification.insert(id, h);
        }
        for id in traces.keys().filter(|id| !rectification.contains_key(*id)) {
            warnings.push(format!("trial `{id}` has no rectification rows; analyzed unrectified"));
        }
    }

    let mut skipped = Vec::new();
    let mut trials = Vec::new();
    for (id, points) in traces {
        let raw = points.len();
        match Centerline::from_trace(points, units) {
            Ok(line) => trials.push(Trial {
                rectify: rectification.get(&id).copied(),
                id,
                line,
            }),
            Err(_) => skipped.push(Skipped {
                trial_id: id,
                reason: format!("too short: {raw} raw points, fewer than 2 distinct"),
            }),
        }
    }

    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let results = analyze_trials(&trials, &config, exec);
    let mut profiles = Vec::new();
    for (trial, result) in trials.iter().zip(results) {
        match result {
            Ok(p) => profiles.push((trial.id.as_str(), p)),
            Err(e @ freesnake::Error::Numeric(_)) => return Err(e.into()),
            Err(e) => skipped.push(Skipped {
                trial_id: trial.id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    skipped.sort_by(|a, b| a.trial_id.cmp(&b.trial_id));
    for s in &skipped {
        warn!("skipping trial `{}`: {}", s.trial_id, s.reason);
    }
    for w in &warnings {
        warn!("{w}");
    }

    let profile_path = ctx.output("profiles.csv");
    io::write_profiles(&profile_path, profiles.iter().map(|(id, p)| (*id, p)))?;
    let analyzed: Vec<String> = profiles.iter().map(|(id, _)| id.to_string()).collect();
    ctx.write_metadata(
        "analyze",
        json!({
            "n": config.samples,
            "span": config.span,
            "smoothing_window": freesnake::analysis::window_for_span(config.span),
            "offset": config.offset,
            "units": units.tag(),
            "rectified": args.rectify.is_some(),
            "execution": if args.sequential { "sequential" } else { "parallel" },
            "analyzed": analyzed,
            "skipped": skipped,
        }),
        inputs,
        vec![display(&profile_path)],
        warnings,
    )?;
    Ok(AnalyzeOutcome {
        profile_path,
        analyzed,
        skipped,
    })
}

fn split_label(arg: &str, require_label: bool) -> CliResult<(String, PathBuf)> {
    match arg.split_once('=') {
        Some((label, path)) if !label.is_empty() && !path.is_empty() => Ok((label.to_string(), PathBuf::from(path))),
        None if !require_label => {
            let path = PathBuf::from(arg);
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .ok_or_else(|| CliError::Input(format!("cannot derive a label from `{arg}`")))?;
            Ok((label, path))
        }
        _ => Err(CliError::Input(format!("expected `label=path`, got `{arg}`"))),
    }
}

/// Groups in first-appearance order.
fn ordered_groups(args: &[String], require_label: bool) -> CliResult<Vec<(String, Vec<PathBuf>)>> {
    let mut groups: Vec<(String, Vec<PathBuf>)> = Vec::new();
    for arg in args {
        let (label, path) = split_label(arg, require_label)?;
        match groups.iter_mut().find(|(l, _)| *l == label) {
            Some((_, paths)) => paths.push(path),
            None => groups.push((label, vec![path])),
        }
    }
    Ok(groups)
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageRow {
    pub subject: String,
    pub reference: String,
    pub region: &'static str,
    pub coverage: f64,
    pub inside: usize,
    pub total: usize,
}

pub struct CompareOutcome {
    pub stats_path: PathBuf,
    pub coverage_path: PathBuf,
    pub durations_path: Option<PathBuf>,
    pub coverage: Vec<CoverageRow>,
}

pub fn compare(ctx: &Context, args: &CompareArgs) -> CliResult<CompareOutcome> {
    let convention: StdConvention = args.std.into();
    let groups = ordered_groups(&args.groups, true)?;
    let mut inputs = Vec::new();
    let mut warnings = Vec::new();
    let mut stats = Vec::new();
    for (label, paths) in &groups {
        let mut profiles = Vec::new();
        for path in paths {
            inputs.push(display(path));
            for (id, p) in io::read_profiles(path)? {
                if p.len() != args.n {
                    let msg = format!(
                        "group `{label}` trial `{id}` has {} samples; interpolated onto {}",
                        p.len(),
                        args.n
                    );
                    warn!("{msg}");
                    warnings.push(msg);
                    profiles.push(regrid(&p, args.n)?);
                } else {
                    profiles.push(p);
                }
            }
        }
        if profiles.is_empty() {
            return Err(CliError::Input(format!("group `{label}` has no profiles")));
        }
        let s = aggregate(&profiles, convention).map_err(|e| CliError::Input(format!("group `{label}`: {e}")))?;
        stats.push((label.clone(), s));
    }

    let stats_path = ctx.output("stats.csv");
    {
        let mut w = io::writer(&stats_path)?;
        let err = io::write_err(&stats_path);
        w.write_record(io::STATS_HEADER).map_err(&err)?;
        for (label, s) in &stats {
            let n = s.trials().to_string();
            for i in 0..s.len() {
                let (mean, std, valid) = match (s.mean()[i], s.std()[i]) {
                    (Some(m), Some(d)) => (format_float(m), format_float(d), "1"),
                    _ => (String::new(), String::new(), "0"),
                };
                w.write_record([label.as_str(), &format_float(s.arc_fraction()[i]), &mean, &std, &n, valid])
                    .map_err(&err)?;
            }
        }
        w.flush().map_err(CliError::io(format!("writing {}", stats_path.display())))?;
    }

    let mut coverage = Vec::new();
    for (subject, ss) in &stats {
        for (reference, rs) in &stats {
            if subject == reference {
                continue;
            }
            for region in Region::ALL {
                let c = coverage_counts(ss, rs, region)
                    .map_err(|e| CliError::Input(format!("{subject} vs {reference}: {e}")))?;
                coverage.push(CoverageRow {
                    subject: subject.clone(),
                    reference: reference.clone(),
                    region: region.name(),
                    coverage: c.fraction(),
                    inside: c.inside,
                    total: c.total,
                });
            }
        }
    }
    let coverage_path = ctx.output("coverage.csv");
    {
        let mut w = io::writer(&coverage_path)?;
        let err = io::write_err(&coverage_path);
        w.write_record(io::COVERAGE_HEADER).map_err(&err)?;
        for row in &coverage {
            w.write_record([
                row.subject.as_str(),
                &row.reference,
                row.region,
                &format_float(row.coverage),
                &row.inside.to_string(),
                &row.total.to_string(),
            ])
            .map_err(&err)?;
        }
        w.flush().map_err(CliError::io(format!("writing {}", coverage_path.display())))?;
    }

    let mut outputs = vec![display(&stats_path), display(&coverage_path)];
    let durations_path = if args.durations.is_empty() {
        None
    } else {
        let path = ctx.output("durations.csv");
        let mut w = io::writer(&path)?;
        let err = io::write_err(&path);
        w.write_record(io::DURATION_SUMMARY_HEADER).map_err(&err)?;
        for (label, paths) in ordered_groups(&args.durations, false)? {
            let mut records = Vec::new();
            for p in &paths {
                inputs.push(display(p));
                records.extend(io::read_durations(p)?);
            }
            let d = duration_stats(&records, convention)
                .map_err(|e| CliError::Input(format!("durations `{label}`: {e}")))?;
            w.write_record([
                label.as_str(),
                &d.count.to_string(),
                &format_float(d.mean),
                &format_float(d.std),
                &format_float(d.min),
                &format_float(d.max),
            ])
            .map_err(&err)?;
        }
        w.flush().map_err(CliError::io(format!("writing {}", path.display())))?;
        outputs.push(display(&path));
        Some(path)
    };

    ctx.write_metadata(
        "compare",
        json!({
            "std": match convention { StdConvention::Population => "population", StdConvention::Sample => "sample" },
            "n": args.n,
            "groups": groups.iter().map(|(l, p)| json!({"label": l, "profiles": p.iter().map(|x| display(x)).collect::<Vec<_>>()})).collect::<Vec<_>>(),
            "regions": { "head": [0.0, Region::HEAD_END], "mid": [Region::HEAD_END, Region::MID_END], "tail": [Region::MID_END, 1.0] },
        }),
        inputs,
        outputs,
        warnings,
    )?;
    Ok(CompareOutcome {
        stats_path,
        coverage_path,
        durations_path,
        coverage,
    })
}
