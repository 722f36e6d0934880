//! The `ultra` command line: reads JSON (or CSV) inputs, runs one
//! operation, and prints a JSON report with verdicts.
//!
//! Exit codes: 0 success, 2 a verdict failed, 1 bad input, 64 usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use crate::amalgam::{
    amalgam_disjoint, copy_amalgam, family_amalgam, glue_over_intersection, key_amalgam, AmalgamResult,
};
use crate::embed::{embed_finite, submodule_svalued_sample, EmbeddingCertificate};
use crate::error::Error;
use crate::extend::{extend_from_subset, family_discrepancy, interpolate, ProblemJson};
use crate::generic::{
    anti_doubling_witness, doubling_check, genericity_perturb, t_approx, telescope_anti_doubling_witness,
    DoublingCheck, SearchMode,
};
use crate::random;
use crate::space::{
    d_distance, dlps_space, isosceles_witness, restrict, sup_product, truncate, ud_distance, FiniteUltrametricSpace,
    RawSpace,
};
use crate::telescope::{LazyUltrametric, Radii, SequenceSpace, TelescopeJson, TelescopeSpace};
use crate::values::{RangeSet, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "ultra", version, about = "Exact constructions on finite ultrametric spaces")]
struct Cli {
    /// Range set as inline JSON or a path to a JSON file.
    #[arg(long, global = true, value_name = "FILE|JSON")]
    range_set: Option<String>,
    /// Seed for every randomized certificate.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct Grid {
    /// Comma-separated C values.
    #[arg(long = "C", value_delimiter = ',', default_value = "1,10,100")]
    c: Vec<Value>,
    /// Comma-separated α values.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    alpha: Vec<Value>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a matrix against the strong triangle inequality and the range set.
    Validate { space: PathBuf },
    /// The canonical space d(x,y) = x ∨ y on a finite range set.
    Dlps,
    /// Pointwise min(d, eps).
    Truncate {
        space: PathBuf,
        #[arg(long)]
        eps: Value,
    },
    /// Sup-product of two spaces.
    Product { x: PathBuf, y: PathBuf },
    /// UD^S distance between two metrics on the same points.
    Ud { d: PathBuf, e: PathBuf },
    /// Largest absolute difference between two metrics.
    Dmax { d: PathBuf, e: PathBuf },
    /// Disjoint amalgam of two spaces, or the left fold of several.
    Amalgam {
        #[arg(required = true, num_args = 2..)]
        spaces: Vec<PathBuf>,
        #[arg(long)]
        r: Value,
    },
    /// Glue two spaces along their shared points.
    Glue {
        x: PathBuf,
        y: PathBuf,
        #[arg(long)]
        s: Value,
    },
    /// X with d glued to a copy of X with e.
    CopyAmalgam {
        d: PathBuf,
        e: PathBuf,
        #[arg(long)]
        r: Value,
    },
    /// The key amalgam of an interpolation problem.
    KeyAmalgam {
        problem: PathBuf,
        /// Defaults to round_up of the family's largest UD.
        #[arg(long)]
        eta: Option<Value>,
    },
    /// Lemin–Lemin embedding with isometry and support checks.
    Embed { space: PathBuf },
    /// Independence at the critical value plus submodule sampling.
    Independence {
        space: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        coeff_bound: i64,
    },
    /// Interpolate prescribed metrics on disjoint subsets.
    Interpolate { problem: PathBuf },
    /// Extend a metric given on a subset.
    Extend { space: PathBuf, subset_metric: PathBuf },
    /// Describe the first blocks of a telescope.
    Telescope {
        spec: PathBuf,
        #[arg(long, default_value_t = 4)]
        blocks: u64,
    },
    /// Materialize the first k blocks of a telescope plus its limit point.
    Prefix {
        spec: PathBuf,
        #[arg(long)]
        k: u64,
    },
    /// Search for a subset violating card(A) ≤ C(δ/α)^α.
    Doubling {
        space: PathBuf,
        #[arg(long = "C")]
        c: Value,
        #[arg(long)]
        alpha: Value,
        /// Enumerate every subset regardless of size.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Anti-doubling witnesses for a parameter grid (space or telescope).
    Witness {
        input: PathBuf,
        #[command(flatten)]
        grid: Grid,
    },
    /// Move a space into a target range set within eps.
    Approx {
        space: PathBuf,
        #[arg(long)]
        eps: Value,
        #[arg(long, value_name = "FILE|JSON")]
        target_range: String,
    },
    /// Replace a telescope's tail by an anti-doubling one.
    Perturb {
        /// Telescope spec; the standard telescope if omitted.
        spec: Option<PathBuf>,
        #[arg(long)]
        eps: Value,
        #[command(flatten)]
        grid: Grid,
    },
    /// Cauchy sequence without a limit in d(n,m) = a(n) ∨ a(m).
    DemoNiemytzki {
        #[arg(long)]
        tol: Value,
        /// "harmonic" or a grid ratio such as "1/2".
        #[arg(long, default_value = "harmonic")]
        radii: String,
    },
}

#[derive(Serialize, Debug)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Serialize, Debug)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub witness: Json,
}

/// Machine-readable outcome of one command.
#[derive(Serialize, Debug, Default)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub outputs: Json,
    pub verdicts: Vec<Verdict>,
    pub exact_values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    fn verdict(&mut self, name: &str, pass: bool, witness: Json) {
        self.verdicts.push(Verdict {
            name: name.to_string(),
            pass,
            witness,
        });
    }

    fn value(&mut self, name: &str, v: impl ToString) {
        self.exact_values.insert(name.to_string(), v.to_string());
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

struct Ctx {
    range_set: Option<RangeSet>,
    seed: u64,
    report: Report,
}

type R<T> = std::result::Result<T, Error>;

impl Ctx {
    fn read(&mut self, path: &PathBuf) -> R<String> {
        let bytes = if path.as_os_str() == "-" {
            let mut b = Vec::new();
            std::io::stdin().read_to_end(&mut b)?;
            b
        } else {
            std::fs::read(path)?
        };
        self.report.inputs.push(InputDigest {
            name: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    fn raw_space(&mut self, path: &PathBuf) -> R<RawSpace> {
        let text = self.read(path)?;
        if text.trim_start().starts_with('{') {
            Ok(serde_json::from_str(&text)?)
        } else {
            RawSpace::from_csv(&text)
        }
    }

    /// A flag range set overrides one embedded in the file.
    fn space(&mut self, path: &PathBuf) -> R<FiniteUltrametricSpace> {
        let mut raw = self.raw_space(path)?;
        if let Some(s) = &self.range_set {
            raw.range_set = Some(s.clone());
        }
        raw.into_space(None)
    }

    fn telescope(&mut self, path: &PathBuf) -> R<TelescopeSpace> {
        let text = self.read(path)?;
        let mut spec: TelescopeJson = serde_json::from_str(&text)?;
        if spec.range_set.is_none() {
            spec.range_set = self.range_set.clone();
        }
        spec.build()
    }

    fn required_range_set(&self) -> R<RangeSet> {
        self.range_set
            .clone()
            .ok_or_else(|| Error::InvalidArgument("--range-set is required".into()))
    }
}

fn parse_range_set(arg: &str) -> R<RangeSet> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)?
    };
    Ok(serde_json::from_str(&text)?)
}

/// Short name of an error, used as the verdict name for failed checks.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "Parse",
        Error::Json(_) => "Json",
        Error::Io(_) => "Io",
        Error::TriangleViolation { .. } => "TriangleViolation",
        Error::NotInRangeSet { .. } => "NotInRangeSet",
        Error::NotPositiveElement(_) => "NotPositiveElement",
        Error::ZeroOffDiagonal { .. } => "ZeroOffDiagonal",
        Error::Asymmetric { .. } => "Asymmetric",
        Error::NonZeroDiagonal(_) => "NonZeroDiagonal",
        Error::Shape { .. } => "Shape",
        Error::DuplicateLabel(_) => "DuplicateLabel",
        Error::UnknownPoint(_) => "UnknownPoint",
        Error::EmptySubset => "EmptySubset",
        Error::OutOfRange(_) => "OutOfRange",
        Error::NoCoinitiality => "NoCoinitiality",
        Error::NonPositive(_) => "NonPositive",
        Error::RangeSetMismatch => "RangeSetMismatch",
        Error::PointSetMismatch => "PointSetMismatch",
        Error::HypothesisViolation { .. } => "HypothesisViolation",
        Error::BoundViolation { .. } => "BoundViolation",
        Error::EmptyPositivePart => "EmptyPositivePart",
        Error::RankDeficient { .. } => "RankDeficient",
        Error::DisjointnessViolation(_) => "DisjointnessViolation",
        Error::TooSmall => "TooSmall",
        Error::NoWitnessFound => "NoWitnessFound",
        Error::ApproximationImpossible(_) => "ApproximationImpossible",
        Error::TailNotFound(_) => "TailNotFound",
        Error::DiameterViolation { .. } => "DiameterViolation",
        Error::InvalidStepFunction(_) => "InvalidStepFunction",
        Error::InvalidArgument(_) => "InvalidArgument",
        Error::VerificationFailed(_) => "VerificationFailed",
    }
}

fn violation_witness(e: &Error) -> Option<Json> {
    Some(match e {
        Error::TriangleViolation { x, y, z } => json!({"x": x, "y": y, "z": z}),
        Error::NotInRangeSet { x, y, value } => json!({"x": x, "y": y, "value": value}),
        Error::ZeroOffDiagonal { x, y } | Error::Asymmetric { x, y } => json!({"x": x, "y": y}),
        Error::NonZeroDiagonal(x) => json!({"x": x}),
        Error::DuplicateLabel(x) => json!({"label": x}),
        Error::Shape { expected } => json!({"expected": expected}),
        _ => return None,
    })
}

fn amalgam_outputs(ctx: &mut Ctx, h: &AmalgamResult, inputs: &[&FiniteUltrametricSpace]) -> Json {
    for (k, x) in inputs.iter().enumerate() {
        ctx.report
            .verdict(&format!("restriction_{k}"), h.restricts_to(k, x), Json::Null);
    }
    ctx.report.verdict("valid", h.space.revalidate().is_ok(), Json::Null);
    json!({"space": h.space, "embeddings": h.embeddings})
}

fn min_cross(h: &AmalgamResult, a: &FiniteUltrametricSpace, b: &FiniteUltrametricSpace) -> Option<Value> {
    a.labels()
        .flat_map(|x| b.labels().map(move |y| (x, y)))
        .filter_map(|(x, y)| h.space.distance(h.image(0, x)?, h.image(1, y)?).ok().cloned())
        .min()
}

fn embedding_verdicts(ctx: &mut Ctx, cert: &EmbeddingCertificate) {
    let iso = cert.isometry_defect();
    let sup = cert.support_defect();
    ctx.report.verdict("isometry", iso.is_none(), json!(iso));
    ctx.report.verdict("support_condition", sup.is_none(), json!(sup));
    ctx.report
        .verdict("independence_rank", cert.independence_rank == cert.images.len(), json!(cert.independence_rank));
    ctx.report.value("critical_value", &cert.critical_value);
    ctx.report.value("separation", &cert.separation);
}

fn run_command(cmd: Command, ctx: &mut Ctx) -> R<Json> {
    let seed = ctx.seed;
    Ok(match cmd {
        Command::Validate { space } => {
            let mut raw = ctx.raw_space(&space)?;
            if let Some(s) = &ctx.range_set {
                raw.range_set = Some(s.clone());
            }
            let iso = isosceles_witness(&raw.dist);
            match raw.clone().into_space(None) {
                Ok(x) => {
                    ctx.report.verdict("valid", true, Json::Null);
                    ctx.report.verdict("isosceles", iso.is_none(), Json::Null);
                    ctx.report.value("diameter", x.diameter());
                    json!({"space": x})
                }
                Err(e) => match violation_witness(&e) {
                    Some(w) => {
                        ctx.report.verdict(error_kind(&e), false, w);
                        if let Some((i, j, k)) = iso {
                            let l = |i: usize| raw.points.get(i).cloned().unwrap_or_default();
                            ctx.report.verdict("isosceles", false, json!([l(i), l(j), l(k)]));
                        }
                        json!({"error": e.to_string()})
                    }
                    None => return Err(e),
                },
            }
        }
        Command::Dlps => {
            let x = dlps_space(&ctx.required_range_set()?)?;
            ctx.report.verdict("valid", x.revalidate().is_ok(), Json::Null);
            json!({"space": x})
        }
        Command::Truncate { space, eps } => {
            let x = ctx.space(&space)?;
            let t = truncate(&x, &eps)?;
            ctx.report.verdict("valid", t.revalidate().is_ok(), Json::Null);
            json!({"space": t})
        }
        Command::Product { x, y } => {
            let (x, y) = (ctx.space(&x)?, ctx.space(&y)?);
            let p = sup_product(&x, &y)?;
            ctx.report.verdict("valid", p.revalidate().is_ok(), Json::Null);
            json!({"space": p})
        }
        Command::Ud { d, e } => {
            let (d, e) = (ctx.space(&d)?, ctx.space(&e)?);
            let ud = ud_distance(&d, &e)?;
            let dm = d_distance(&d, &e)?;
            ctx.report.value("ud", &ud);
            ctx.report
                .verdict("dmax_le_ud", ud.finite().is_none_or(|u| dm <= *u), json!(dm));
            json!({"ud": ud})
        }
        Command::Dmax { d, e } => {
            let (d, e) = (ctx.space(&d)?, ctx.space(&e)?);
            let dm = d_distance(&d, &e)?;
            ctx.report.value("dmax", &dm);
            json!({"dmax": dm})
        }
        Command::Amalgam { spaces, r } => {
            let xs = spaces.iter().map(|p| ctx.space(p)).collect::<R<Vec<_>>>()?;
            let h = if xs.len() == 2 {
                amalgam_disjoint(&xs[0], &xs[1], &r)?
            } else {
                family_amalgam(&xs, &r)?
            };
            let refs: Vec<&FiniteUltrametricSpace> = xs.iter().collect();
            if xs.len() == 2 {
                let m = min_cross(&h, &xs[0], &xs[1]);
                ctx.report
                    .verdict("separation", m.as_ref().is_none_or(|m| *m >= r), json!(m));
            }
            amalgam_outputs(ctx, &h, &refs)
        }
        Command::Glue { x, y, s } => {
            let (x, y) = (ctx.space(&x)?, ctx.space(&y)?);
            let h = glue_over_intersection(&x, &y, &s)?;
            amalgam_outputs(ctx, &h, &[&x, &y])
        }
        Command::CopyAmalgam { d, e, r } => {
            let (d, e) = (ctx.space(&d)?, ctx.space(&e)?);
            let h = copy_amalgam(&d, &e, &r)?;
            let copy_ok = d
                .labels()
                .all(|l| h.space.distance(l, h.image(1, l).unwrap()).is_ok_and(|x| *x == r));
            ctx.report.verdict("copy_distance", copy_ok, Json::Null);
            amalgam_outputs(ctx, &h, &[&d, &e])
        }
        Command::KeyAmalgam { problem, eta } => {
            let text = ctx.read(&problem)?;
            let p: ProblemJson = serde_json::from_str(&text)?;
            let p = p.into_problem(ctx.range_set.as_ref())?;
            let sup = family_discrepancy(&p.ambient, &p.family)?;
            let eta = match eta {
                Some(e) => e,
                None if sup.is_zero() => p.ambient.range_set().canonical_positive()?,
                None => p.ambient.range_set().round_up(&sup)?,
            };
            let h = key_amalgam(&p.ambient, &p.family, &eta)?;
            ctx.report.value("eta", &eta);
            let mut inputs = vec![&p.ambient];
            inputs.extend(p.family.iter().map(|q| &q.metric));
            amalgam_outputs(ctx, &h, &inputs)
        }
        Command::Embed { space } => {
            let x = ctx.space(&space)?;
            let cert = embed_finite(&x)?;
            embedding_verdicts(ctx, &cert);
            json!({"origin": cert.origin, "images": cert.images})
        }
        Command::Independence {
            space,
            trials,
            coeff_bound,
        } => {
            let x = ctx.space(&space)?;
            let cert = embed_finite(&x)?;
            embedding_verdicts(ctx, &cert);
            let rep = submodule_svalued_sample(&cert, trials, coeff_bound, &mut random::rng(seed));
            ctx.report
                .verdict("submodule_range_set", rep.all_in_range_set(), json!(rep.outside));
            json!({"critical_value": cert.critical_value, "rank": cert.independence_rank,
                   "norms": rep.norms.iter().map(|(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>()})
        }
        Command::Interpolate { problem } => {
            let text = ctx.read(&problem)?;
            let p: ProblemJson = serde_json::from_str(&text)?;
            let p = p.into_problem(ctx.range_set.as_ref())?;
            let res = interpolate(&p)?;
            for (k, q) in p.family.iter().enumerate() {
                let ok = restrict(&res.m, &q.subset)?.rows() == restrict(&q.metric, &q.subset)?.rows();
                ctx.report.verdict(&format!("prescription_{k}"), ok, json!(q.subset));
            }
            ctx.report.verdict("valid", res.m.revalidate().is_ok(), Json::Null);
            ctx.report
                .verdict("sandwich", res.lower <= res.ud && res.ud <= res.upper, Json::Null);
            if let Some(eta) = &res.eta {
                ctx.report.value("eta", eta);
            }
            ctx.report.value("lower", &res.lower);
            ctx.report.value("upper", &res.upper);
            ctx.report.value("ud", &res.ud);
            serde_json::to_value(&res)?
        }
        Command::Extend { space, subset_metric } => {
            let x = ctx.space(&space)?;
            let e = ctx.space(&subset_metric)?;
            let m = extend_from_subset(&x, &e)?;
            let labels: Vec<&str> = e.labels().collect();
            ctx.report
                .verdict("prescription", restrict(&m, &labels)?.rows() == e.rows(), Json::Null);
            ctx.report.verdict("valid", m.revalidate().is_ok(), Json::Null);
            let ud = ud_distance(&m, &x)?;
            ctx.report.value("ud", &ud);
            json!({"space": m})
        }
        Command::Telescope { spec, blocks } => {
            let t = ctx.telescope(&spec)?;
            let mut out = Vec::new();
            for i in 1..=blocks {
                let b = t.block(i)?;
                out.push(json!({"block": i, "size": b.len(), "radius": t.radius(i), "diameter": b.diameter()}));
            }
            let ok = t.finite_prefix(blocks).is_ok();
            ctx.report.verdict("prefix_valid", ok, json!(blocks));
            json!({"offset": t.offset(), "blocks": out})
        }
        Command::Prefix { spec, k } => {
            let t = ctx.telescope(&spec)?;
            let p = t.finite_prefix(k)?;
            ctx.report.verdict("valid", true, Json::Null);
            json!({"space": p})
        }
        Command::Doubling {
            space,
            c,
            alpha,
            exhaustive,
        } => {
            let x = ctx.space(&space)?;
            let q = DoublingCheck::new(c, alpha)?;
            let mode = if exhaustive { SearchMode::Exhaustive } else { SearchMode::Auto };
            let v = doubling_check(&x, &q, mode);
            ctx.report.verdict("doubling_bound", v.holds, json!(v.witness));
            serde_json::to_value(&v)?
        }
        Command::Witness { input, grid } => {
            let text = ctx.read(&input)?;
            let params = DoublingCheck::grid(&grid.c, &grid.alpha)?;
            let as_json: Json = serde_json::from_str(&text)?;
            let ws = if as_json.get("radii").is_some() {
                let mut spec: TelescopeJson = serde_json::from_value(as_json)?;
                if spec.range_set.is_none() {
                    spec.range_set = ctx.range_set.clone();
                }
                telescope_anti_doubling_witness(&spec.build()?, &params)?
            } else {
                let mut raw: RawSpace = serde_json::from_value(as_json)?;
                if let Some(s) = &ctx.range_set {
                    raw.range_set = Some(s.clone());
                }
                anti_doubling_witness(&raw.into_space(None)?, &params)?
            };
            for w in &ws {
                ctx.report.verdict(
                    &format!("witness C={} alpha={}", w.parameter.c, w.parameter.alpha),
                    w.recheck(),
                    json!(w.points),
                );
            }
            json!({"witnesses": ws, "grid_truncated": true})
        }
        Command::Approx {
            space,
            eps,
            target_range,
        } => {
            let x = ctx.space(&space)?;
            let t = parse_range_set(&target_range)?;
            let e = t_approx(&x, &t, &eps)?;
            let gap = d_distance(&x, &e)?;
            ctx.report.verdict("within_eps", gap < eps, json!(gap));
            ctx.report.verdict("valid", e.revalidate().is_ok(), Json::Null);
            ctx.report.value("dmax", &gap);
            json!({"space": e})
        }
        Command::Perturb { spec, eps, grid } => {
            let t = match spec {
                Some(p) => ctx.telescope(&p)?,
                None => TelescopeSpace::standard(),
            };
            let params = DoublingCheck::grid(&grid.c, &grid.alpha)?;
            let (_, cert) = genericity_perturb(&t, &eps, &params)?;
            ctx.report.verdict("prefix_ud_le_eps", cert.prefix_ud <= eps, json!(cert.prefix_ud));
            for w in &cert.witnesses {
                ctx.report.verdict(
                    &format!("witness C={} alpha={}", w.parameter.c, w.parameter.alpha),
                    w.recheck(),
                    json!(w.card),
                );
            }
            ctx.report.value("prefix_ud", &cert.prefix_ud);
            ctx.report.value("tail_diameter", &cert.tail_diameter);
            json!({
                "eps": cert.eps, "tail_block": cert.tail_block, "prefix_blocks": cert.prefix_blocks,
                "prefix_points": cert.prefix_points, "prefix_ud": cert.prefix_ud,
                "witnesses": cert.witnesses.iter().map(|w| json!({
                    "C": w.parameter.c, "alpha": w.parameter.alpha, "card": w.card,
                    "alpha_d": w.alpha, "delta": w.delta, "first": w.points.first(), "last": w.points.last(),
                })).collect::<Vec<_>>(),
                "grid_truncated": true,
            })
        }
        Command::DemoNiemytzki { tol, radii } => {
            let radii = if radii == "harmonic" {
                Radii::Harmonic
            } else {
                Radii::grid(radii.parse()?)?
            };
            let rep = SequenceSpace::new(radii).cauchy_no_limit_witness(&tol)?;
            ctx.report.verdict("tail_diameter_below_tol", rep.tail_diameter < tol, json!(rep.n));
            ctx.report.verdict(
                "positive_infima",
                rep.infima.iter().all(|(_, v)| v.is_positive()),
                Json::Null,
            );
            ctx.report.value("n", rep.n);
            serde_json::to_value(&rep)?
        }
    })
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Validate { .. } => "validate",
        Command::Dlps => "dlps",
        Command::Truncate { .. } => "truncate",
        Command::Product { .. } => "product",
        Command::Ud { .. } => "ud",
        Command::Dmax { .. } => "dmax",
        Command::Amalgam { .. } => "amalgam",
        Command::Glue { .. } => "glue",
        Command::CopyAmalgam { .. } => "copy-amalgam",
        Command::KeyAmalgam { .. } => "key-amalgam",
        Command::Embed { .. } => "embed",
        Command::Independence { .. } => "independence",
        Command::Interpolate { .. } => "interpolate",
        Command::Extend { .. } => "extend",
        Command::Telescope { .. } => "telescope",
        Command::Prefix { .. } => "prefix",
        Command::Doubling { .. } => "doubling",
        Command::Witness { .. } => "witness",
        Command::Approx { .. } => "approx",
        Command::Perturb { .. } => "perturb",
        Command::DemoNiemytzki { .. } => "demo-niemytzki",
    }
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut ctx = Ctx {
        range_set: None,
        seed: cli.seed,
        report: Report {
            command: command_name(&cli.cmd).to_string(),
            outputs: Json::Null,
            ..Report::default()
        },
    };
    let result = match cli.range_set.as_deref().map(parse_range_set).transpose() {
        Ok(s) => {
            ctx.range_set = s;
            run_command(cli.cmd, &mut ctx)
        }
        Err(e) => Err(e),
    };
    let code = match result {
        Ok(out) => {
            ctx.report.outputs = out;
            if ctx.report.all_pass() {
                EXIT_OK
            } else {
                EXIT_VERDICT
            }
        }
        Err(e) => {
            ctx.report.error = Some(format!("{}: {e}", error_kind(&e)));
            EXIT_INPUT
        }
    };
    let text = serde_json::to_string_pretty(&ctx.report).expect("report serializes");
    let written = match &cli.out {
        Some(path) => std::fs::write(path, format!("{text}\n")),
        None => writeln!(stdout, "{text}"),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "cannot write report: {e}");
        return EXIT_INPUT;
    }
    code
}
