//! One function per subcommand, each producing its output text.

use std::fs;

use ibf_core::data::{parse_survival_csv, BernoulliSummary, PoissonObservation, SurvivalDataset};
use ibf_core::intrinsic::{jeffreys_censored_median_study, jeffreys_first_term_mass, IntrinsicFamily, IntrinsicPriorSpec};
use ibf_core::linear::{
    consistency_study, findley_ibf_truncated, gprior_bf, linear_ibf, FindleyCovariate,
    LinearComparison, SampleSource, StudyConfig, StudyKind, Weighting,
};
use ibf_core::marginals::{Family, ModelPair, NullSpec};
use ibf_core::selection::{
    bernoulli_ibf, bernoulli_intrinsic_bf, censored_bf, ohagan_ibf, poisson_ibf, poisson_intrinsic_bf,
    posterior_prob_m1_log, AverageMode, BayesFactorEstimate, BernoulliScheme, Combiner, OhaganScheme,
};
use ibf_core::training::{default_draws, SchemeSpec};
use nalgebra::DMatrix;
use serde_json::json;

use crate::args::{CombinerArg, Command, Common, CovariateArg, FamilyArg, Format, OhaganMode, SchemeArg, StudyArg};
use crate::report::{study_csv, study_json, Report};
use crate::CliError;

type Out = Result<String, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_data(c: &Common) -> Result<Option<(String, String)>, CliError> {
    match &c.data {
        None => Ok(None),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(Some((p.display().to_string(), text)))
        }
    }
}

fn emit(report: Report, c: &Common) -> Out {
    Ok(match c.format.unwrap_or(Format::Json) {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    })
}

fn fill(report: &mut Report, est: &BayesFactorEstimate, c: &Common) -> Result<(), CliError> {
    let post = posterior_prob_m1_log(est.log_bf10, c.prior_odds)?;
    report.set_bf(est.log_bf10, est.mc_std_error, post);
    report.l = est.l;
    report.skipped_samples = est.skipped;
    if est.skipped > 0 {
        report
            .warnings
            .push(format!("{} degenerate training samples skipped", est.skipped));
    }
    Ok(())
}

fn mode_of(comb: CombinerArg) -> Option<AverageMode> {
    match comb {
        CombinerArg::Arith => Some(AverageMode::Arithmetic),
        CombinerArg::Geom => Some(AverageMode::Geometric),
        CombinerArg::Median => Some(AverageMode::Median),
        _ => None,
    }
}

fn combiner_of(comb: CombinerArg) -> Combiner {
    match comb {
        CombinerArg::Arith => Combiner::Arithmetic,
        CombinerArg::Geom => Combiner::Geometric,
        CombinerArg::Median => Combiner::Median,
        CombinerArg::Ep => Combiner::Ep,
        CombinerArg::Intrinsic => Combiner::IntrinsicPrior,
    }
}

fn scheme_name(s: SchemeArg) -> &'static str {
    match s {
        SchemeArg::Mts => "mts",
        SchemeArg::RandomMts => "random-mts",
        SchemeArg::Smts => "smts",
        SchemeArg::InfoWeighted => "info-weighted",
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| usage(format!("invalid {what} {t:?}"))))
        .collect()
}

pub fn run(command: &Command, c: &Common) -> Out {
    match command {
        Command::Gehan => censored(c, "gehan", None),
        Command::OneSampleExp { group } => censored(c, "one-sample-exp", group.as_deref()),
        Command::Bernoulli { bits, epsilon } => bernoulli(c, bits.as_deref(), *epsilon),
        Command::Poisson { count, exposure } => poisson(c, *count, *exposure),
        Command::Ohagan { n, mode } => ohagan(c, *n, *mode),
        Command::Intrinsic {
            family,
            quantile,
            cdf,
            density,
            r,
        } => intrinsic(c, *family, *quantile, *cdf, *density, *r),
        Command::Linreg {
            response,
            simple,
            complex,
            no_intercept,
            truncate,
            g,
        } => linreg(c, response, simple, complex, *no_intercept, *truncate, *g),
        Command::Findley {
            theta,
            grid,
            covariate,
            truncate,
        } => findley(c, *theta, grid, *covariate, *truncate),
        Command::GpriorStudy {
            study,
            grid,
            delta,
            beta0,
            beta1,
        } => gprior_study(c, *study, grid.as_deref(), *delta, *beta0, *beta1),
        Command::Appendix { r } => appendix(c, *r),
    }
}

fn censored(c: &Common, name: &str, group: Option<&str>) -> Out {
    let (source, full) = match read_data(c)? {
        Some((path, text)) => (path, parse_survival_csv(&text)?),
        None => ("gehan".to_string(), SurvivalDataset::gehan()),
    };
    let one_sample = name == "one-sample-exp";
    let dataset = if one_sample {
        let label = match group {
            Some(g) => g.to_string(),
            None if full.num_groups() == 1 => full.group_labels()[0].to_string(),
            None => return Err(usage("the data hold several groups; choose one with --group")),
        };
        let obs = full
            .group(&label)
            .ok_or_else(|| usage(format!("no group {label:?} in the data")))?
            .to_vec();
        let mut d = SurvivalDataset::new();
        d.insert_group(&label, obs);
        d
    } else {
        full
    };
    let theta0 = if one_sample {
        Some(c.theta0.ok_or_else(|| usage("one-sample-exp needs --theta0"))?)
    } else {
        if c.theta0.is_some() {
            return Err(usage("the two-sample comparison tests equal rates; --theta0 does not apply"));
        }
        None
    };
    let comb = c.combiner.unwrap_or(CombinerArg::Arith);
    let scheme_arg = c.scheme.unwrap_or(SchemeArg::Smts);
    let n: usize = dataset.groups().map(|(_, g)| g.len()).sum();
    let minimal = dataset.num_groups();
    let l = c.l.unwrap_or_else(|| default_draws(minimal, n));
    let scheme = match scheme_arg {
        SchemeArg::Mts => SchemeSpec::ExhaustiveMts,
        SchemeArg::RandomMts => SchemeSpec::RandomMts { l },
        SchemeArg::Smts => SchemeSpec::Smts { l },
        SchemeArg::InfoWeighted => return Err(usage("info-weighted applies to linear models only")),
    };
    let est = censored_bf(&dataset, theta0, scheme, combiner_of(comb), c.seed, c.tol)?;
    let scheme_label = if comb == CombinerArg::Intrinsic {
        "intrinsic-prior"
    } else {
        scheme_name(scheme_arg)
    };
    let mut report = Report::new(name, scheme_label, c.seed)
        .param("data", source)
        .param("groups", json!(dataset.group_labels()))
        .param("combiner", combiner_of(comb).label());
    if let Some(t) = theta0 {
        report = report.param("theta0", t);
    }
    fill(&mut report, &est, c)?;
    emit(report, c)
}

fn bernoulli(c: &Common, bits: Option<&str>, epsilon: Option<f64>) -> Out {
    let text = match (bits, read_data(c)?) {
        (Some(b), None) => b.to_string(),
        (None, Some((_, t))) => t,
        _ => return Err(usage("give exactly one of --bits and --data")),
    };
    let bits: Vec<u8> = parse_list(&text, "bit")?;
    if bits.iter().any(|b| *b > 1) {
        return Err(usage("bits must be 0 or 1"));
    }
    let theta0 = c.theta0.ok_or_else(|| usage("bernoulli needs --theta0"))?;
    let mut pair = ModelPair::new(Family::Bernoulli, NullSpec::Point(theta0))?;
    if let Some(e) = epsilon {
        pair = pair.with_limit_epsilon(e)?;
    }
    let t0 = pair.effective_theta0()?;
    let summary = BernoulliSummary::new(bits.len(), bits.iter().filter(|b| **b == 1).count())?;
    let comb = c.combiner.unwrap_or(CombinerArg::Arith);
    let scheme_arg = c.scheme.unwrap_or(SchemeArg::Mts);
    let mut report = Report::new("bernoulli", "", c.seed)
        .param("n", summary.n)
        .param("ones", summary.ones)
        .param("theta0", theta0)
        .param("combiner", combiner_of(comb).label());
    if pair.violates_assumption0() {
        report.warnings.push(format!(
            "θ0 = {theta0} is on the boundary; no training sample is proper under the null; using θ0 = {t0}"
        ));
        report = report.param("epsilon", t0.min(1.0 - t0));
    }
    let est = if comb == CombinerArg::Intrinsic {
        report.scheme = "intrinsic-prior".into();
        bernoulli_intrinsic_bf(&summary, t0, c.tol)?
    } else {
        let mode = mode_of(comb).ok_or_else(|| usage("bernoulli supports arith, geom, median and intrinsic"))?;
        let scheme = match (scheme_arg, c.l) {
            (SchemeArg::Mts, _) => BernoulliScheme::Mts,
            (SchemeArg::Smts, None) => BernoulliScheme::SmtsExact,
            (SchemeArg::Smts, Some(l)) => BernoulliScheme::Smts { l },
            _ => return Err(usage("bernoulli supports the mts and smts schemes")),
        };
        report.scheme = match scheme {
            BernoulliScheme::SmtsExact => "smts-exact".into(),
            _ => scheme_name(scheme_arg).into(),
        };
        if !summary.has_mts() && scheme_arg == SchemeArg::Mts {
            report.warnings.push("the sequence has no {0, 1} pair; no minimal training sample exists".into());
        }
        bernoulli_ibf(&bits, t0, scheme, mode, c.seed)?
    };
    fill(&mut report, &est, c)?;
    emit(report, c)
}

fn poisson(c: &Common, count: u64, exposure: f64) -> Out {
    let obs = PoissonObservation::new(count, exposure)?;
    let theta0 = c.theta0.ok_or_else(|| usage("poisson needs --theta0"))?;
    let comb = c.combiner.unwrap_or(CombinerArg::Arith);
    if c.scheme.is_some() {
        return Err(usage("poisson uses imaginary training samples; --scheme does not apply"));
    }
    let l = c.l.unwrap_or(1000);
    let mut report = Report::new("poisson", "imaginary", c.seed)
        .param("count", count)
        .param("exposure", exposure)
        .param("theta0", theta0)
        .param("combiner", combiner_of(comb).label());
    let est = if comb == CombinerArg::Intrinsic {
        report.scheme = "intrinsic-prior".into();
        poisson_intrinsic_bf(&obs, theta0, c.tol)?
    } else {
        let mode = mode_of(comb).ok_or_else(|| usage("poisson supports arith, geom, median and intrinsic"))?;
        poisson_ibf(&obs, theta0, l, mode, c.seed)?
    };
    fill(&mut report, &est, c)?;
    emit(report, c)
}

fn ohagan(c: &Common, n: usize, mode: OhaganMode) -> Out {
    let theta0 = c.theta0.unwrap_or(1e-8);
    let (scheme, label) = match mode {
        OhaganMode::Mts => (OhaganScheme::Mts, "mts"),
        OhaganMode::SmtsExact => (OhaganScheme::SmtsExact, "smts-exact"),
    };
    let value = ohagan_ibf(n, theta0, scheme)?;
    let nf = n as f64;
    let limit = match mode {
        OhaganMode::Mts => (1.0 - theta0).powf(2.0 - nf) / (nf - 1.0),
        OhaganMode::SmtsExact => (nf * nf - nf + 2.0) / (2.0 * nf * (nf - 1.0)),
    };
    let mut report = Report::new("ohagan", label, c.seed).param("n", n).param("theta0", theta0);
    let log_bf = value.ln();
    report.set_bf(log_bf, 0.0, posterior_prob_m1_log(log_bf, c.prior_odds)?);
    report.l = match mode {
        OhaganMode::Mts => n - 1,
        OhaganMode::SmtsExact => 0,
    };
    report.value("ibf", value);
    report.value("limit", limit);
    emit(report, c)
}

fn family_of(f: FamilyArg) -> IntrinsicFamily {
    match f {
        FamilyArg::ExpSmts => IntrinsicFamily::ExpSmts,
        FamilyArg::ExpMtsImproper => IntrinsicFamily::ExpMtsImproper,
        FamilyArg::BernoulliHaldaneMts => IntrinsicFamily::BernoulliHaldaneMts,
        FamilyArg::BernoulliSmts => IntrinsicFamily::BernoulliSmts,
        FamilyArg::Poisson => IntrinsicFamily::PoissonImaginary,
    }
}

fn intrinsic(
    c: &Common,
    family: FamilyArg,
    quantile: Option<f64>,
    cdf: Option<f64>,
    density: Option<f64>,
    r: Option<f64>,
) -> Out {
    let theta0 = c.theta0.ok_or_else(|| usage("intrinsic needs --theta0"))?;
    let fam = family_of(family);
    let spec = IntrinsicPriorSpec::new(fam, theta0, r)?;
    let mut report = Report::new("intrinsic", "none", c.seed)
        .param("family", fam.label())
        .param("theta0", theta0);
    if let Some(r) = spec.r {
        report = report.param("r", r);
    }
    let diag = spec.truncated_mass_test()?;
    report.value("proper", spec.is_proper());
    report.value("truncated_masses", json!(diag.masses));
    if diag.improper {
        report
            .warnings
            .push(format!("the {} intrinsic prior is improper", fam.label()));
    }
    if spec.is_proper() {
        report.value("total_mass", spec.total_mass(c.tol)?);
    }
    if let Some(p) = quantile {
        report = report.param("quantile", p);
        report.value("quantile", spec.quantile(p)?);
    }
    if let Some(t) = cdf {
        report = report.param("cdf", t);
        report.value("cdf", spec.cdf(t)?);
    }
    if let Some(t) = density {
        report = report.param("density", t);
        report.value("density", spec.density(t)?);
    }
    emit(report, c)
}

fn linreg(
    c: &Common,
    response: &str,
    simple: &str,
    complex: &str,
    no_intercept: bool,
    truncate: Option<usize>,
    g: Option<f64>,
) -> Out {
    let (source, text) = read_data(c)?.ok_or_else(|| usage("linreg needs --data"))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Io(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Io(e.to_string()))?;
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::Domain(ibf_core::Error::Parse {
                    line: i + 2,
                    message: format!("invalid number {field:?}"),
                })
            })?;
            columns[j].push(v);
        }
    }
    let col = |name: &str| -> Result<&Vec<f64>, CliError> {
        headers
            .iter()
            .position(|h| h == name)
            .map(|j| &columns[j])
            .ok_or_else(|| usage(format!("no column {name:?}")))
    };
    let y = col(response)?.clone();
    let n = y.len();
    let design = |names: &str| -> Result<DMatrix<f64>, CliError> {
        let mut cols: Vec<Vec<f64>> = Vec::new();
        if !no_intercept {
            cols.push(vec![1.0; n]);
        }
        for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            cols.push(col(name)?.clone());
        }
        if cols.is_empty() {
            return Err(usage("a model has no columns"));
        }
        Ok(DMatrix::from_fn(n, cols.len(), |r, k| cols[k][r]))
    };
    let cmp = LinearComparison::new(y, design(simple)?, design(complex)?)?;
    let scheme_arg = c.scheme.unwrap_or(SchemeArg::Mts);
    let (weighting, source_kind) = match (scheme_arg, c.l) {
        (SchemeArg::Mts, _) => (Weighting::Uniform, SampleSource::Exhaustive),
        (SchemeArg::RandomMts, l) => (
            Weighting::Uniform,
            SampleSource::Sampled {
                l: l.unwrap_or_else(|| default_draws(cmp.k_complex() + 1, n)),
                seed: c.seed,
            },
        ),
        (SchemeArg::InfoWeighted, None) => (Weighting::Information, SampleSource::Exhaustive),
        (SchemeArg::InfoWeighted, Some(l)) => (Weighting::Information, SampleSource::Sampled { l, seed: c.seed }),
        (SchemeArg::Smts, _) => return Err(usage("linreg supports mts, random-mts and info-weighted")),
    };
    if !matches!(c.combiner, None | Some(CombinerArg::Arith)) {
        return Err(usage("linreg supports the arith combiner"));
    }
    let res = linear_ibf(&cmp, weighting, source_kind, truncate)?;
    let mut report = Report::new("linreg", scheme_name(scheme_arg), c.seed)
        .param("data", source)
        .param("response", response)
        .param("simple", simple)
        .param("complex", complex)
        .param("intercept", !no_intercept)
        .param("weighting", weighting.label());
    if let Some(t) = truncate {
        report = report.param("truncate", t);
    }
    fill(&mut report, &res.estimate, c)?;
    report.value("log_full_factor", res.log_full_factor);
    report.value("log_training_average", res.log_training_average);
    report.value("singular_subsets", res.singular);
    if let Some(g) = g {
        report = report.param("g", g);
        report.value("gprior_log_bf_complex_over_simple", gprior_bf(&cmp, g)?);
    }
    emit(report, c)
}

fn weighting_of(c: &Common) -> Result<Weighting, CliError> {
    match c.scheme.unwrap_or(SchemeArg::Mts) {
        SchemeArg::Mts => Ok(Weighting::Uniform),
        SchemeArg::InfoWeighted => Ok(Weighting::Information),
        _ => Err(usage("this command supports the mts and info-weighted schemes")),
    }
}

fn emit_study(rows: &[ibf_core::linear::StudyRow], c: &Common) -> Out {
    Ok(match c.format.unwrap_or(Format::Csv) {
        Format::Csv => study_csv(rows),
        Format::Json => study_json(rows),
    })
}

fn findley(c: &Common, theta: f64, grid: &str, covariate: CovariateArg, truncate: Option<usize>) -> Out {
    let weighting = weighting_of(c)?;
    let cov = match covariate {
        CovariateArg::InvSqrt => FindleyCovariate::InverseSqrt,
        CovariateArg::Linear => FindleyCovariate::Linear,
    };
    if let Some((source, text)) = read_data(c)? {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut x = Vec::new();
        let mut d = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| CliError::Io(e.to_string()))?;
            let parse = |k: usize| -> Result<f64, CliError> {
                rec.get(k).and_then(|f| f.parse().ok()).ok_or_else(|| {
                    CliError::Domain(ibf_core::Error::Parse {
                        line: i + 2,
                        message: "expected two numeric fields x,d".into(),
                    })
                })
            };
            x.push(parse(0)?);
            d.push(parse(1)?);
        }
        let res = findley_ibf_truncated(&x, &d, weighting, truncate)?;
        let mut report = Report::new("findley", c.scheme.map(scheme_name).unwrap_or("mts"), c.seed)
            .param("data", source)
            .param("weighting", weighting.label());
        fill(&mut report, &res.estimate, c)?;
        report.value("log_full", res.log_full);
        report.value("log_training_average", res.log_training_average);
        return emit(report, c);
    }
    let grid: Vec<usize> = parse_list(grid, "sample size")?;
    let cfg = StudyConfig {
        kind: StudyKind::Findley {
            covariate: cov,
            theta,
            weighting,
            truncate,
        },
        grid,
        seed: c.seed,
        replicates: c.l.unwrap_or(10),
    };
    emit_study(&consistency_study(&cfg)?, c)
}

fn gprior_study(c: &Common, study: StudyArg, grid: Option<&str>, delta: f64, beta0: f64, beta1: f64) -> Out {
    let (kind, default_grid) = match study {
        StudyArg::Gprior => (
            StudyKind::Gprior {
                beta: [beta0, beta1],
                delta,
            },
            "101,1001,10001",
        ),
        StudyArg::Example16 => (
            StudyKind::Example16 {
                beta: [beta0, beta1],
                delta,
                weighting: weighting_of(c)?,
                truncate: None,
            },
            "10,20,50",
        ),
    };
    let cfg = StudyConfig {
        kind,
        grid: parse_list(grid.unwrap_or(default_grid), "grid entry")?,
        seed: c.seed,
        replicates: c.l.unwrap_or(10),
    };
    emit_study(&consistency_study(&cfg)?, c)
}

fn appendix(c: &Common, r: f64) -> Out {
    let theta0 = c.theta0.unwrap_or(1.0);
    let study = jeffreys_censored_median_study(c.tol)?;
    let first = jeffreys_first_term_mass(r, theta0, c.tol)?;
    let mut report = Report::new("appendix", "none", c.seed)
        .param("r", r)
        .param("theta0", theta0);
    report.value("exponent", study.exponent);
    report.value("normalizer", study.normalizer);
    report.value("median_constant", study.c);
    report.value("median_constant_at_0.7907", study.c_at_fixed_target);
    report.value("negative_exponent_diverges", study.negative_exponent_diverges);
    report.value("first_term_mass", first);
    report.value("first_term_mass_expected", -(-theta0 * r).exp_m1());
    if study.negative_exponent_diverges {
        report
            .warnings
            .push("with exponent -1/2 the normalizing integral diverges at 0; exponent +1/2 is used".into());
    }
    emit(report, c)
}
