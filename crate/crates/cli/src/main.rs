//! Command-line front end: builders, verifications and reports for the
//! mirror-symmetry workbench.
//!
//! Exit status: 0 when every requested check passes, 1 when a check fails
//! (the report carries the certificate), 2 on invalid configuration.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use hms_core::algebra::{DeformationMatrix, GradedSkewAlgebra};
use hms_core::bside::{
    exceptional_category, koszul_dual_category, q_invariant, realize_q, CollectionSpec,
};
use hms_core::checks;
use hms_core::cover::{arc_diagram_svg, build_cover};
use hms_core::dgcat::quadratic_dual;
use hms_core::fukaya::{
    blowup_table, hms_verify, line_category, line_matches_dual, plane_category, polygon_enumerate,
    product_category, subset_count, AreaWeights,
};
use hms_core::koszul::{cohomology_dim, koszul_build};
use hms_core::mutation::{
    corner_vanishing_check, dual_collection, hom_profile, mutate_collection_left,
    mutate_collection_right, ProjComplex, RationalAlgebra,
};
use hms_core::numlab::{
    critical_values_plane, hirzebruch_degeneration, hirzebruch_isotopy, hirzebruch_limits,
    line_vanishing_pair, merge_pair, track_monodromy_traced, LoopSpec, TrackConfig,
};
use hms_core::rng::SplitMix64;
use hms_core::scalar::UnitScalar;

#[derive(Parser)]
#[command(
    name = "hms",
    version,
    about = "Workbench for exceptional-collection algebras and combinatorial vanishing-cycle categories of weighted projective lines and planes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output path (stdout when omitted); relative paths resolve under
    /// $HMS_OUT_DIR when that is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format; csv covers numerical traces, svg the arc diagram.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaSource {
    /// All entries 1 (the undeformed algebra).
    Unit,
    /// Independent formal parameters off the diagonal.
    Formal,
}

#[derive(Clone, Copy, ValueEnum)]
enum AreaMode {
    /// Equal areas, trivial holonomy: the exact symmetric case.
    Symmetric,
    /// Independent formal parameters per triangle and holonomy.
    Formal,
}

#[derive(Clone, Copy, ValueEnum)]
enum BsideCheck {
    Hilbert,
    Koszul,
    Cohomology,
    QuadraticDual,
}

#[derive(Clone, Copy, ValueEnum)]
enum AsideCheck {
    Ranks,
    Gradings,
    Discs,
    Signs,
    Subsets,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutateCheck {
    Dual,
    Braid,
    Rl,
}

#[derive(Clone, Copy, ValueEnum)]
enum HirzebruchMode {
    Isotopy,
    Degeneration,
}

#[derive(Subcommand)]
enum Command {
    /// Build the collection-side categories and run exact checks.
    Bside {
        /// Comma-separated weights, e.g. 1,1,2.
        #[arg(long)]
        weights: String,
        /// Deformation matrix source; defaults to formal parameters.
        #[arg(long, value_enum, conflicts_with = "q_target")]
        theta: Option<ThetaSource>,
        /// Aim the unit invariant at this formal parameter name (plane
        /// weights only); exclusive with --theta.
        #[arg(long)]
        q_target: Option<String>,
        /// Window of twists, e.g. 0,1,4,5; defaults to the full window.
        #[arg(long)]
        window: Option<String>,
        #[arg(long, value_enum)]
        check: Option<BsideCheck>,
        /// Internal degree bound for the resolution check.
        #[arg(long, default_value_t = 10)]
        degree_bound: i64,
        /// Degree bound for the dimension check.
        #[arg(long, default_value_t = 30)]
        kmax: i64,
        /// Integer parameters a,b,c for the quadratic-dual check.
        #[arg(long, default_value = "3,5,7")]
        dual_params: String,
    },
    /// Build the vanishing-cycle side and run exact checks.
    Aside {
        #[arg(long)]
        weights: String,
        #[arg(long, value_enum)]
        check: Option<AsideCheck>,
        #[arg(long, default_value_t = 8)]
        max_corners: usize,
        #[arg(long, value_enum, default_value_t = AreaMode::Formal)]
        areas: AreaMode,
        /// Offset for the subset-count check.
        #[arg(long, default_value_t = 1)]
        offset: u32,
    },
    /// Mutations of exceptional collections over the undeformed algebra.
    Mutate {
        #[arg(long)]
        weights: String,
        #[arg(long, value_enum)]
        check: Option<MutateCheck>,
        /// Corner vanishing check `n,k` over weights (1,1,n).
        #[arg(long)]
        fn_check: Option<String>,
    },
    /// Floating-point monodromy and degeneration runs.
    Monodromy {
        /// Plane weights for loop tracking.
        #[arg(long)]
        weights: Option<String>,
        /// origin | branch:<m> | all
        #[arg(long = "loop", default_value = "all")]
        loop_spec: String,
        /// Track the line degeneration for the pair a,b.
        #[arg(long)]
        cp1: Option<String>,
        /// Track the merge pair toward critical value j.
        #[arg(long)]
        merge: Option<u32>,
        /// Degeneration family index n.
        #[arg(long)]
        hirzebruch: Option<u32>,
        #[arg(long, value_enum, default_value_t = HirzebruchMode::Isotopy)]
        mode: HirzebruchMode,
        /// Degeneration parameter.
        #[arg(long, default_value_t = 1e-8)]
        b_param: f64,
        /// Classification window around the limit values +-2.
        #[arg(long, default_value_t = 1e-3)]
        near_tol: f64,
        /// Escape threshold on the modulus of a critical value.
        #[arg(long, default_value_t = 1e3)]
        escape_bound: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol_newton: f64,
    },
    /// Product categories: the doubled line and the blow-up table.
    Product {
        /// Doubled-line product of two weight pairs a,b;c,d.
        #[arg(long, default_value = "1,1;1,1")]
        factors: String,
        /// Emit the four-object blow-up table instead.
        #[arg(long)]
        blowup: bool,
    },
    /// Match the vanishing-cycle category against the collection side.
    VerifyHms {
        /// Plane weights a,b,c or line weights a,b.
        #[arg(long)]
        weights: String,
        #[arg(long, value_enum, default_value_t = AreaMode::Formal)]
        areas: AreaMode,
        /// Double one structure constant after fixing the target; the
        /// match must fail with a certificate.
        #[arg(long)]
        perturb: bool,
        /// Number of random deformation matrices for the line case.
        #[arg(long, default_value_t = 20)]
        random_theta: u32,
    },
    /// Run acceptance criteria over the standard grids.
    ReportAll {
        /// Criterion number 1..=15; all when omitted.
        #[arg(long)]
        criterion: Option<u32>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn parse_weights(text: &str) -> anyhow::Result<Vec<u32>> {
    let weights: Vec<u32> = text
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<Result<_, _>>()?;
    if weights.is_empty() || weights.contains(&0) {
        anyhow::bail!("weights must be positive: {text}");
    }
    Ok(weights)
}

fn theta_of(source: ThetaSource, size: usize) -> DeformationMatrix {
    match source {
        ThetaSource::Unit => DeformationMatrix::identity(size),
        ThetaSource::Formal => {
            let mut t = DeformationMatrix::identity(size);
            for i in 0..size {
                for j in 0..size {
                    if i != j {
                        t.set(i, j, UnitScalar::param(&format!("t{i}{j}")));
                    }
                }
            }
            t
        }
    }
}

fn emit(cli_out: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match cli_out {
        None => {
            println!("{content}");
            Ok(())
        }
        Some(path) => {
            let resolved = if path.is_relative() {
                match std::env::var_os("HMS_OUT_DIR") {
                    Some(dir) => PathBuf::from(dir).join(path),
                    None => path.clone(),
                }
            } else {
                path.clone()
            };
            if let Some(parent) = resolved.parent() {
                std::fs::create_dir_all(parent)?;
            }
            let mut file = std::fs::File::create(&resolved)?;
            file.write_all(content.as_bytes())?;
            file.write_all(b"\n")?;
            Ok(())
        }
    }
}

fn wrap<R: Serialize>(command: &str, pass: bool, report: R) -> serde_json::Value {
    json!({
        "schema": 1,
        "command": command,
        "pass": pass,
        "report": report,
    })
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let out = cli.out.clone();
    let json_only = |format: Format| -> anyhow::Result<()> {
        if format != Format::Json {
            anyhow::bail!("this subcommand only supports --format json");
        }
        Ok(())
    };
    match cli.command {
        Command::Bside {
            weights,
            theta,
            q_target,
            window,
            check,
            degree_bound,
            kmax,
            dual_params,
        } => {
            json_only(cli.format)?;
            let weights = parse_weights(&weights)?;
            let size = weights.len();
            let theta = match &q_target {
                Some(name) => {
                    if size != 3 {
                        anyhow::bail!("--q-target applies to plane weights");
                    }
                    realize_q(&weights, &UnitScalar::param(name))?
                }
                None => theta_of(theta.unwrap_or(ThetaSource::Formal), size),
            };
            let spec = match window {
                Some(w) => {
                    let window = parse_weights(&w)?;
                    CollectionSpec::windowed(weights.clone(), theta.clone(), window)
                }
                None => CollectionSpec::full(weights.clone(), theta.clone()),
            };
            let collection = exceptional_category(&spec)?;
            let dual = koszul_dual_category(&weights, &theta)?;
            let mut pass = true;
            let mut findings = Vec::new();
            let mut extra: BTreeMap<String, serde_json::Value> = BTreeMap::new();
            match check {
                None => {}
                Some(BsideCheck::Hilbert) => {
                    let alg = GradedSkewAlgebra::polynomial(weights.clone(), theta.clone())?;
                    for k in 0..=kmax {
                        let basis = alg.graded_basis(k).len();
                        if basis != alg.graded_dim(k) {
                            pass = false;
                            findings.push(format!("degree {k}"));
                        }
                    }
                    findings.push(format!("dimensions checked to degree {kmax}"));
                }
                Some(BsideCheck::Koszul) => {
                    let alg = GradedSkewAlgebra::polynomial(weights.clone(), theta.clone())?;
                    let complex = koszul_build(&alg)?;
                    complex.check_contraction_compatible()?;
                    let report = complex.homology_check(degree_bound);
                    pass = report.pass;
                    findings.push(format!(
                        "square zero symbolically; homology checked to degree {degree_bound}"
                    ));
                    for f in &report.failures {
                        findings.push(format!(
                            "homology {} at position {} degree {}",
                            f.dim, f.position, f.degree
                        ));
                    }
                    extra.insert("koszul".to_string(), serde_json::to_value(&complex)?);
                }
                Some(BsideCheck::Cohomology) => {
                    let alg = GradedSkewAlgebra::polynomial(weights.clone(), theta.clone())?;
                    let l = alg.gorenstein_parameter() as i64;
                    let n = size - 1;
                    for k in (-2 * l)..=(2 * l) {
                        for p in 0..=n {
                            let v = cohomology_dim(&alg, p, k);
                            let expected = if p == 0 && k >= 0 {
                                alg.graded_dim(k)
                            } else if p == n && k <= -l {
                                alg.graded_dim(-k - l)
                            } else {
                                0
                            };
                            if v != expected {
                                pass = false;
                                findings.push(format!("p={p} k={k}"));
                            }
                        }
                    }
                    findings.push(format!("table checked for |k| <= {}", 2 * l));
                }
                Some(BsideCheck::QuadraticDual) => {
                    let params = dual_params
                        .split(',')
                        .map(|p| p.trim().parse::<i64>())
                        .collect::<Result<Vec<_>, _>>()?;
                    let [pa, pb, pc] = params.as_slice() else {
                        anyhow::bail!("--dual-params needs three integers");
                    };
                    let relations = quadratic_dual_of_cyclic_table(*pa, *pb, *pc)?;
                    findings.push(format!("{} relations extracted", relations.len()));
                    pass = relations.len() == 3;
                }
            }
            let q = if size == 3 {
                Some(q_invariant(&theta, &weights)?)
            } else {
                None
            };
            let report = wrap(
                "bside",
                pass,
                json!({
                    "weights": weights,
                    "theta": theta,
                    "q_invariant": q,
                    "collection": collection,
                    "dual": dual,
                    "findings": findings,
                    "extra": extra,
                }),
            );
            emit(&out, &serde_json::to_string_pretty(&report)?)?;
            Ok(pass)
        }
        Command::Aside {
            weights,
            check,
            max_corners,
            areas,
            offset,
        } => {
            let weights = parse_weights(&weights)?;
            if let Some(AsideCheck::Subsets) = check {
                json_only(cli.format)?;
                let count = subset_count(&weights, offset);
                let report = wrap(
                    "aside",
                    true,
                    json!({ "weights": weights, "offset": offset, "subset_count": count }),
                );
                emit(&out, &serde_json::to_string_pretty(&report)?)?;
                return Ok(true);
            }
            let [a, b, c] = weights.as_slice() else {
                anyhow::bail!("aside needs three weights");
            };
            let cover = build_cover([*a, *b, *c])?;
            if cli.format == Format::Svg {
                emit(&out, &arc_diagram_svg(&cover))?;
                return Ok(true);
            }
            json_only(cli.format)?;
            let area_weights = match areas {
                AreaMode::Symmetric => AreaWeights::symmetric(cover.n as usize),
                AreaMode::Formal => AreaWeights::formal(cover.n as usize),
            };
            let plane = plane_category(&cover, &area_weights)?;
            let polygons = polygon_enumerate(&cover, max_corners)?;
            let table = cover.intersection_table();
            let mut pass = true;
            let mut findings = Vec::new();
            match check {
                None | Some(AsideCheck::Subsets) => {}
                Some(AsideCheck::Ranks) => {
                    pass = table.total_rank == 3 * cover.n;
                    findings.push(format!("total rank {}", table.total_rank));
                }
                Some(AsideCheck::Gradings) => {
                    for g in plane.category.gen_refs() {
                        let gen = plane.category.generator(g);
                        let expected = if gen.name.contains("bar") { 2 } else { 1 };
                        if gen.degree != expected {
                            pass = false;
                            findings.push(format!("degree of {}", gen.name));
                        }
                    }
                }
                Some(AsideCheck::Discs) => {
                    pass = polygons.triangles.len() == 2 * cover.n as usize
                        && polygons.higher_products_vanish;
                    findings.push(format!(
                        "{} triangles, higher products vanish: {}",
                        polygons.triangles.len(),
                        polygons.higher_products_vanish
                    ));
                }
                Some(AsideCheck::Signs) => {
                    let symmetric = plane_category(&cover, &AreaWeights::symmetric(cover.n as usize))?;
                    let expected = if cover.n % 2 == 0 {
                        UnitScalar::one()
                    } else {
                        UnitScalar::minus_one()
                    };
                    pass = symmetric.invariant == expected;
                    findings.push(format!("symmetric invariant {}", symmetric.invariant));
                }
            }
            let report = wrap(
                "aside",
                pass,
                json!({
                    "weights": weights,
                    "intersections": table,
                    "triangles": polygons.triangles,
                    "higher_products_vanish": polygons.higher_products_vanish,
                    "category": plane.category,
                    "invariant": plane.invariant,
                    "findings": findings,
                }),
            );
            emit(&out, &serde_json::to_string_pretty(&report)?)?;
            Ok(pass)
        }
        Command::Mutate {
            weights,
            check,
            fn_check,
        } => {
            json_only(cli.format)?;
            let weights = parse_weights(&weights)?;
            let cat = exceptional_category(&CollectionSpec::full(
                weights.clone(),
                DeformationMatrix::identity(weights.len()),
            ))?;
            let alg = RationalAlgebra::from_category(&cat, &BTreeMap::new())?;
            let projectives: Vec<ProjComplex> = (0..alg.objects)
                .map(|i| ProjComplex::projective(alg.clone(), i))
                .collect::<Result<_, _>>()?;
            let mut pass = true;
            let mut findings = Vec::new();
            let mut payload = json!({ "weights": weights });
            if let Some(spec) = fn_check {
                let parts = parse_weights(&spec)?;
                let [n, k] = parts.as_slice() else {
                    anyhow::bail!("--fn-check needs n,k");
                };
                if weights != vec![1, 1, *n] {
                    anyhow::bail!("--fn-check n,k requires --weights 1,1,n");
                }
                let report = corner_vanishing_check(&alg, *n, *k)?;
                pass = report.pass;
                findings.push(format!("corner vanishing for (n,k)=({n},{k}): {}", report.pass));
                payload["fn_check"] = serde_json::to_value(&report)?;
            }
            match check {
                None => {}
                Some(MutateCheck::Dual) => {
                    let dual = dual_collection(&projectives)?;
                    let mut profiles = Vec::new();
                    for (kth, obj) in dual.iter().enumerate() {
                        let i = alg.objects - 1 - kth;
                        let profile = hom_profile(&obj.shift(i as i32))?;
                        let expected: BTreeMap<(usize, i32), usize> =
                            BTreeMap::from([((i, 0), 1)]);
                        if profile != expected {
                            pass = false;
                            findings.push(format!("dual object {i}"));
                        }
                        profiles.push(serde_json::to_value(obj)?);
                    }
                    payload["dual_collection"] = serde_json::Value::Array(profiles);
                }
                Some(MutateCheck::Braid) => {
                    if projectives.len() < 3 {
                        anyhow::bail!("braid check needs at least three objects");
                    }
                    let triple = [
                        projectives[0].clone(),
                        projectives[1].clone(),
                        projectives[2].clone(),
                    ];
                    let lhs = mutate_collection_left(
                        &mutate_collection_left(&mutate_collection_left(&triple, 0)?, 1)?,
                        0,
                    )?;
                    let rhs = mutate_collection_left(
                        &mutate_collection_left(&mutate_collection_left(&triple, 1)?, 0)?,
                        1,
                    )?;
                    for (x, y) in lhs.iter().zip(&rhs) {
                        if hom_profile(x)? != hom_profile(y)? {
                            pass = false;
                            findings.push("braid profiles differ".to_string());
                        }
                    }
                    findings.push("braid relation checked at profile level".to_string());
                }
                Some(MutateCheck::Rl) => {
                    let pair = [projectives[0].clone(), projectives[1].clone()];
                    let back = mutate_collection_right(&mutate_collection_left(&pair, 0)?, 0)?;
                    for (x, y) in pair.iter().zip(&back) {
                        if hom_profile(x)? != hom_profile(y)? {
                            pass = false;
                            findings.push("right-left round trip differs".to_string());
                        }
                    }
                    findings.push("right inverts left at profile level".to_string());
                }
            }
            payload["findings"] = serde_json::to_value(&findings)?;
            let report = wrap("mutate", pass, payload);
            emit(&out, &serde_json::to_string_pretty(&report)?)?;
            Ok(pass)
        }
        Command::Monodromy {
            weights,
            loop_spec,
            cp1,
            merge,
            hirzebruch,
            mode,
            b_param,
            near_tol,
            escape_bound,
            tol_newton,
        } => {
            let config = TrackConfig {
                newton_tol: tol_newton,
                ..TrackConfig::default()
            };
            let mut pass = true;
            let mut payload = json!({});
            let mut csv = String::new();
            if let Some(n) = hirzebruch {
                json_only(cli.format)?;
                match mode {
                    HirzebruchMode::Isotopy => {
                        let ok = hirzebruch_isotopy(n, 100, &config)?;
                        pass &= ok;
                        payload["isotopy"] = json!({ "n": n, "bounds_hold": ok });
                    }
                    HirzebruchMode::Degeneration => {
                        let report = hirzebruch_degeneration(n, b_param, near_tol, escape_bound, &config)?;
                        let limits = hirzebruch_limits(n, b_param, &config)?;
                        pass &= report.pass;
                        payload["degeneration"] = serde_json::to_value(&report)?;
                        payload["limits"] = json!(limits
                            .iter()
                            .map(|w| (w.re, w.im))
                            .collect::<Vec<_>>());
                    }
                }
            } else if let Some(pair) = cp1 {
                json_only(cli.format)?;
                let parts = parse_weights(&pair)?;
                let [a, b] = parts.as_slice() else {
                    anyhow::bail!("--cp1 needs a,b");
                };
                let found = line_vanishing_pair(*a, *b, &config)?;
                pass &= found == (0, *b as usize);
                payload["cp1_vanishing"] = json!({ "pair": found, "expected": (0, b) });
            } else if let Some(w) = weights {
                let weights = parse_weights(&w)?;
                let [a, b, c] = weights.as_slice() else {
                    anyhow::bail!("monodromy needs three weights");
                };
                let (a, b, c) = (*a, *b, *c);
                let cover = build_cover([a, b, c])?;
                if let Some(j) = merge {
                    json_only(cli.format)?;
                    let found = merge_pair(cover.a, cover.b, cover.c, j, &config)?;
                    let lift = cover.lift_cycle(j);
                    let mut expected = lift.endpoints;
                    expected.sort_unstable();
                    pass &= found == (expected[0], expected[1]);
                    payload["merge_pair"] = json!({ "j": j, "pair": found, "expected": expected });
                } else {
                    let loops: Vec<(String, LoopSpec)> = match loop_spec.as_str() {
                        "origin" => vec![("origin".to_string(), LoopSpec::Origin)],
                        "all" => {
                            let mut v = vec![("origin".to_string(), LoopSpec::Origin)];
                            for m in 0..cover.n {
                                v.push((format!("branch{m}"), LoopSpec::Branch(m)));
                            }
                            v
                        }
                        other => match other.strip_prefix("branch:") {
                            Some(m) => {
                                let m: u32 = m.parse()?;
                                vec![(format!("branch{m}"), LoopSpec::Branch(m))]
                            }
                            None => anyhow::bail!("--loop must be origin, all, or branch:<m>"),
                        },
                    };
                    let mut results = Vec::new();
                    for (name, spec) in loops {
                        let (result, trace) =
                            track_monodromy_traced(cover.a, cover.b, cover.c, spec, &config)?;
                        let sheets = (cover.b + cover.c) as usize;
                        let expected: Vec<usize> = match spec {
                            LoopSpec::Origin => (0..sheets)
                                .map(|q| cover.origin_monodromy(q as u32) as usize)
                                .collect(),
                            LoopSpec::Branch(m) => {
                                let pair = cover.branch_transposition(m as i64);
                                let mut p: Vec<usize> = (0..sheets).collect();
                                p.swap(pair.0 as usize, pair.1 as usize);
                                p
                            }
                            LoopSpec::Contractible => (0..sheets).collect(),
                        };
                        let ok =
                            result.permutation == expected && result.max_residual < 1e-9;
                        pass &= ok;
                        if cli.format == Format::Csv {
                            for row in &trace {
                                csv.push_str(&format!("{name},{:.6},{:.9},{:.9}", row.t, row.base.0, row.base.1));
                                for (re, im) in &row.roots {
                                    csv.push_str(&format!(",{re:.9},{im:.9}"));
                                }
                                csv.push_str(&format!(",{:.3e}\n", row.residual));
                            }
                        }
                        results.push(json!({
                            "loop": name,
                            "cycles": result.cycles(),
                            "permutation": result.permutation,
                            "expected": expected,
                            "max_residual": result.max_residual,
                            "pass": ok,
                        }));
                    }
                    payload["loops"] = serde_json::Value::Array(results);
                    payload["critical_values"] = json!(critical_values_plane(a, b, c)
                        .iter()
                        .map(|z| (z.re, z.im))
                        .collect::<Vec<_>>());
                }
            } else {
                anyhow::bail!("monodromy needs --weights, --cp1, or --hirzebruch");
            }
            if cli.format == Format::Csv {
                emit(&out, csv.trim_end())?;
            } else {
                let report = wrap("monodromy", pass, payload);
                emit(&out, &serde_json::to_string_pretty(&report)?)?;
            }
            Ok(pass)
        }
        Command::Product { factors, blowup } => {
            json_only(cli.format)?;
            if blowup {
                let cat = blowup_table(
                    &UnitScalar::param("alpha"),
                    &UnitScalar::param("alphap"),
                )?;
                let pass = cat.check_associativity().is_ok();
                let report = wrap("product", pass, json!({ "blowup": cat }));
                emit(&out, &serde_json::to_string_pretty(&report)?)?;
                return Ok(pass);
            }
            let halves: Vec<&str> = factors.split(';').collect();
            let [first, second] = halves.as_slice() else {
                anyhow::bail!("--factors needs a;b pairs like 1,1;1,1");
            };
            let parse_pair = |text: &str| -> anyhow::Result<(u32, u32)> {
                let v = parse_weights(text)?;
                let [a, b] = v.as_slice() else {
                    anyhow::bail!("each factor needs two weights");
                };
                Ok((*a, *b))
            };
            let (a1, b1) = parse_pair(first)?;
            let (a2, b2) = parse_pair(second)?;
            let c1 = line_category(a1, b1)?;
            let c2 = line_category(a2, b2)?;
            let prod = product_category(&c1, &c2)?;
            let pass = prod.check_associativity().is_ok();
            let report = wrap(
                "product",
                pass,
                json!({ "factors": [[a1, b1], [a2, b2]], "category": prod }),
            );
            emit(&out, &serde_json::to_string_pretty(&report)?)?;
            Ok(pass)
        }
        Command::VerifyHms {
            weights,
            areas,
            perturb,
            random_theta,
        } => {
            json_only(cli.format)?;
            let weights = parse_weights(&weights)?;
            match weights.as_slice() {
                [a, b] => {
                    let mut rng = SplitMix64::new(0x11ce);
                    let mut pass = true;
                    let mut runs = Vec::new();
                    for _ in 0..random_theta {
                        let mut theta = DeformationMatrix::identity(2);
                        for i in 0..2 {
                            for j in 0..2 {
                                if i != j {
                                    theta.set(
                                        i,
                                        j,
                                        UnitScalar::from_ratio(
                                            rng.nonzero(20),
                                            rng.range_i64(1, 20),
                                        ),
                                    );
                                }
                            }
                        }
                        let ok = line_matches_dual(*a, *b, &theta)?;
                        pass &= ok;
                        runs.push(json!({ "theta": theta, "pass": ok }));
                    }
                    let report = wrap(
                        "verify-hms",
                        pass,
                        json!({ "weights": weights, "line_runs": runs }),
                    );
                    emit(&out, &serde_json::to_string_pretty(&report)?)?;
                    Ok(pass)
                }
                [a, b, c] => {
                    let n = (a + b + c) as usize;
                    let area_weights = match areas {
                        AreaMode::Symmetric => AreaWeights::symmetric(n),
                        AreaMode::Formal => AreaWeights::formal(n),
                    };
                    let report = hms_verify([*a, *b, *c], &area_weights, perturb)?;
                    // A perturbed run is expected to fail with a
                    // certificate; the command passes when it does.
                    let pass = if perturb {
                        !report.pass && report.obstruction.is_some()
                    } else {
                        report.pass
                    };
                    let wrapped = wrap("verify-hms", pass, &report);
                    emit(&out, &serde_json::to_string_pretty(&wrapped)?)?;
                    Ok(pass)
                }
                _ => anyhow::bail!("verify-hms needs two or three weights"),
            }
        }
        Command::ReportAll { criterion } => {
            json_only(cli.format)?;
            let ids: Vec<u32> = match criterion {
                Some(id) => {
                    if !checks::CRITERIA.contains(&id) {
                        anyhow::bail!("criterion must be in 1..=15");
                    }
                    vec![id]
                }
                None => checks::CRITERIA.collect(),
            };
            let mut reports: Vec<checks::CheckReport> = ids
                .par_iter()
                .map(|&id| checks::run_criterion(id).expect("valid id"))
                .collect();
            reports.sort_by_key(|r| r.id);
            for report in &reports {
                eprintln!("{}", report.line());
            }
            let pass = reports.iter().all(|r| r.pass);
            let wrapped = wrap("report-all", pass, &reports);
            emit(&out, &serde_json::to_string_pretty(&wrapped)?)?;
            Ok(pass)
        }
    }
}

/// The cyclic three-parameter composition table and its quadratic dual.
fn quadratic_dual_of_cyclic_table(
    pa: i64,
    pb: i64,
    pc: i64,
) -> anyhow::Result<Vec<Vec<BigRational>>> {
    use hms_core::dgcat::DirectedCategory;
    let names = ["x", "y", "z"];
    let mut cat = DirectedCategory::new(vec!["l0".into(), "l1".into(), "l2".into()]);
    let v0: Vec<_> = names
        .iter()
        .map(|n| cat.add_generator(0, 1, n, 1))
        .collect::<Result<_, _>>()?;
    let v1: Vec<_> = names
        .iter()
        .map(|n| cat.add_generator(1, 2, n, 1))
        .collect::<Result<_, _>>()?;
    let wbar: Vec<_> = names
        .iter()
        .map(|n| cat.add_generator(0, 2, &format!("{n}bar"), 2))
        .collect::<Result<_, _>>()?;
    let table: [(usize, usize, usize, i64); 9] = [
        (0, 1, 2, pa),
        (0, 2, 1, pb),
        (0, 0, 0, pc),
        (1, 2, 0, pa),
        (1, 0, 2, pb),
        (1, 1, 1, pc),
        (2, 0, 1, pa),
        (2, 1, 0, pb),
        (2, 2, 2, pc),
    ];
    for (p, q, r, v) in table {
        if v != 0 {
            cat.set_m2_term(v0[p], v1[q], UnitScalar::from_integer(v), wbar[r])?;
        }
    }
    Ok(quadratic_dual(&cat, &BTreeMap::new())?)
}
