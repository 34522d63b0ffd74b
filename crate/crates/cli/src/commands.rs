use std::fs;
use std::path::PathBuf;

use kchains::chains::{count_chains_brute, count_chains_dp, neighbor_count, pair_count, restricted_two_chains};
use kchains::charsums::{
    binary_tuples, check_pair_lemma, check_rc, check_tsum_lemma, decompose, s_l2, s_sum, t_sum, term_structure,
    ComplexQ, Domain, LemmaCheck, LemmaKind,
};
use kchains::constructions::{
    axes_set, erratum_counterexample, erratum_family_set, line_points, max_distinct_line_intersection, shifted_lines_set,
};
use kchains::experiments::{
    smallset_report, threshold_for, threshold_sweep, CellSpec, SweepConfig, SWEEP_LEGEND,
};
use kchains::pointsets::sample_uniform;
use kchains::rng::{derive_seed, SplitMix64};
use kchains::scalar::ratio_to_f64;
use kchains::{ChainSpec, Element, Error, Int, Limits, Point, PointSet, Policy, Rational, Structure, StructureKind};
use num_rational::Ratio;
use serde_json::{json, Value};

use crate::report::{num, nums, Outcome, Summary, Table};

/// Errors that map to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

pub type CmdResult = std::result::Result<Outcome, UsageError>;

fn usage<T>(msg: impl Into<String>) -> std::result::Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

/// Global options after parsing.
#[derive(Debug, Clone)]
pub struct Globals {
    pub structure: Option<String>,
    pub d: Option<usize>,
    pub seed: u64,
    pub limits: Limits,
}

impl Globals {
    pub fn structure(&self) -> std::result::Result<Structure, UsageError> {
        match &self.structure {
            Some(lit) => Ok(lit.parse()?),
            None => usage("--structure is required (e.g. Fp:5, F:3^2, Z:3^2)"),
        }
    }

    pub fn dim(&self) -> usize {
        self.d.unwrap_or(2)
    }
}

/// Where the point set of a command comes from.
#[derive(Debug, Clone, Default)]
pub struct SetSource {
    pub path: Option<PathBuf>,
    pub random: Option<u64>,
}

pub fn load_set(g: &Globals, src: &SetSource) -> std::result::Result<PointSet, UsageError> {
    match (&src.path, src.random) {
        (Some(_), Some(_)) => usage("--set and --random are mutually exclusive"),
        (Some(path), None) => {
            let text =
                fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
            let parsed = PointSet::parse(&text)?;
            if let Some(lit) = &g.structure {
                let s: Structure = lit.parse()?;
                if &s != parsed.set.structure() {
                    return usage(format!("--structure {lit} does not match the file header {}", parsed.set.structure()));
                }
            }
            if let Some(d) = g.d {
                if d != parsed.set.dim() {
                    return usage(format!("--d {d} does not match the file dimension {}", parsed.set.dim()));
                }
            }
            if parsed.duplicates > 0 {
                eprintln!("note: {} duplicate rows ignored", parsed.duplicates);
            }
            Ok(parsed.set)
        }
        (None, Some(n)) => Ok(sample_uniform(&g.structure()?, g.dim(), n, g.seed, &g.limits)?),
        (None, None) => usage("a point set is required: --set FILE or --random N"),
    }
}

pub fn parse_alphas(s: &Structure, text: &str) -> std::result::Result<Vec<Element>, UsageError> {
    let alphas = text
        .split(',')
        .map(|t| {
            let v: u64 = t.trim().parse().map_err(|_| UsageError(format!("bad alpha component {t:?}")))?;
            Ok(s.element(v)?)
        })
        .collect::<std::result::Result<Vec<_>, UsageError>>()?;
    if alphas.is_empty() {
        return usage("alpha must have at least one component");
    }
    Ok(alphas)
}

fn alpha_strings(alphas: &[Element]) -> Value {
    nums(alphas.iter().map(|a| a.0))
}

fn alpha_text(alphas: &[Element]) -> String {
    alphas.iter().map(|a| a.0.to_string()).collect::<Vec<_>>().join(" ")
}

fn seeds_of(src: &SetSource, g: &Globals) -> Vec<u64> {
    if src.random.is_some() {
        vec![g.seed]
    } else {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Dp,
    Brute,
}

pub fn count(g: &Globals, src: &SetSource, alpha: &str, policy: Policy, method: Method) -> CmdResult {
    let e = load_set(g, src)?;
    let spec = ChainSpec::new(parse_alphas(e.structure(), alpha)?, policy)?;
    let use_brute = match method {
        Method::Brute => true,
        Method::Dp => false,
        Method::Auto => policy == Policy::PairwiseDistinct,
    };
    let report = if use_brute {
        count_chains_brute::<Int>(&e, &spec, g.limits.brute_budget)?
    } else {
        count_chains_dp::<Int>(&e, &spec)?
    };
    let method_name = if use_brute { "brute" } else { "dp" };
    let payload = json!({
        "count": num(report.count),
        "main_term": num(report.main_term),
        "relative_error": num(report.relative_error),
        "relative_error_approx": ratio_to_f64(&report.relative_error),
        "k": num(report.k),
        "alphas": alpha_strings(&report.alphas),
        "policy": report.policy.name(),
        "method": method_name,
        "set_size": num(e.len()),
        "dim": num(e.dim()),
    });
    let mut t = Table::new(&["structure", "d", "set_size", "k", "alphas", "policy", "count", "main_term", "relative_error"]);
    t.push(vec![
        e.structure().literal(),
        e.dim().to_string(),
        e.len().to_string(),
        report.k.to_string(),
        alpha_text(&report.alphas),
        report.policy.name().into(),
        report.count.to_string(),
        report.main_term.to_string(),
        report.relative_error.to_string(),
    ]);
    Ok(Outcome::new(payload, Summary::info())
        .structure(e.structure().literal())
        .seeds(seeds_of(src, g))
        .table(t))
}

pub fn decompose_cmd(g: &Globals, src: &SetSource, alpha: &str) -> CmdResult {
    let e = load_set(g, src)?;
    let spec = ChainSpec::new(parse_alphas(e.structure(), alpha)?, Policy::AllTuples)?;
    let r = decompose::<Int>(&e, &spec, &g.limits)?;
    let dp = count_chains_dp::<Int>(&e, &spec)?.count;
    let qk = (r.q as Int).pow(r.k as u32);
    let reconstructs = r.scaled_total == qk * dp && r.count == dp;
    let mut t = Table::new(&["support", "size", "scaled_term", "term"]);
    let terms: Vec<Value> = r
        .scaled_terms
        .iter()
        .map(|(&mask, v)| {
            let support: Vec<usize> = (0..r.k).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            let term = Ratio::new(*v, qk);
            t.push(vec![
                support.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" "),
                support.len().to_string(),
                v.to_string(),
                term.to_string(),
            ]);
            json!({ "support": nums(&support), "scaled_term": num(v), "term": num(term) })
        })
        .collect();
    let grouped: Vec<Value> = r.grouped.iter().enumerate().map(|(n, v)| json!({ "size": num(n), "term": num(v) })).collect();
    let payload = json!({
        "k": num(r.k),
        "q": num(r.q),
        "set_size": num(r.set_size),
        "alphas": alpha_strings(&r.alphas),
        "count": num(r.count),
        "main_term": num(r.main_term()),
        "scaled_main": num(&r.scaled_main),
        "scaled_total": num(&r.scaled_total),
        "terms": terms,
        "grouped": grouped,
        "recurrence_count": num(dp),
    });
    let summary = Summary::of_checks(1, u64::from(!reconstructs));
    Ok(Outcome::new(payload, summary).structure(e.structure().literal()).seeds(seeds_of(src, g)).table(t))
}

#[derive(Debug, Clone)]
pub enum CharsumKind {
    SSum { point: String, alpha: String },
    SL2 { alpha: String, whole_space: bool },
    TSum { alpha: String },
}

pub fn charsum(g: &Globals, src: &SetSource, kind: &CharsumKind) -> CmdResult {
    let e = load_set(g, src)?;
    let s = e.structure().clone();
    let (name, payload, value) = match kind {
        CharsumKind::SSum { point, alpha } => {
            let coords = parse_alphas(&s, point)?;
            let x = Point(coords);
            e.check_point(&x)?;
            let a = single(&s, alpha)?;
            let v: Int = s_sum(&e, &x, a)?;
            let n = neighbor_count(&e, &x, a)?;
            let p = json!({ "point": nums(x.reprs()), "alpha": num(a.0), "neighbors": num(n), "value": num(v) });
            ("s-sum", p, v.to_string())
        }
        CharsumKind::SL2 { alpha, whole_space } => {
            let a = single(&s, alpha)?;
            let domain = if *whole_space { Domain::WholeSpace } else { Domain::Set };
            let v: Int = s_l2(&e, a, domain, &g.limits)?;
            let p = json!({
                "alpha": num(a.0),
                "domain": if *whole_space { "space" } else { "set" },
                "value": num(v),
            });
            ("s-l2", p, v.to_string())
        }
        CharsumKind::TSum { alpha } => {
            let ab = parse_alphas(&s, alpha)?;
            if ab.len() != 2 {
                return usage("t-sum takes exactly two alpha components");
            }
            let v: Int = t_sum(&e, ab[0], ab[1])?;
            let p = json!({
                "alphas": alpha_strings(&ab),
                "pair_counts": nums([pair_count(&e, ab[0]), pair_count(&e, ab[1])]),
                "value": num(v),
            });
            ("t-sum", p, v.to_string())
        }
    };
    let mut t = Table::new(&["sum", "structure", "d", "set_size", "value"]);
    t.push(vec![name.into(), s.literal(), e.dim().to_string(), e.len().to_string(), value]);
    Ok(Outcome::new(payload, Summary::info()).structure(s.literal()).seeds(seeds_of(src, g)).table(t))
}

fn single(s: &Structure, text: &str) -> std::result::Result<Element, UsageError> {
    let v = parse_alphas(s, text)?;
    if v.len() != 1 {
        return usage(format!("expected a single element, got {text:?}"));
    }
    Ok(v[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaArg {
    OneDp,
    OneDpR,
    TwoDp,
    TwoDpR,
    Rc,
    Mn,
}

#[derive(Debug, Clone)]
pub struct LemmaOpts {
    pub kind: LemmaArg,
    pub src: SetSource,
    pub trials: u32,
    pub size: Option<u64>,
    pub gamma: Option<String>,
    pub constant: u32,
    pub max_k: usize,
    pub max_dim: u64,
}

struct LemmaRecord {
    trial: u32,
    seed: Option<u64>,
    size: usize,
    params: Vec<Element>,
    check: LemmaCheck,
}

pub fn lemma_check(g: &Globals, o: &LemmaOpts) -> CmdResult {
    match o.kind {
        LemmaArg::Rc => return rc_check(g, o),
        LemmaArg::Mn => return mn_check(o),
        _ => {}
    }
    let expected_kind = match o.kind {
        LemmaArg::OneDp => LemmaKind::PairField,
        LemmaArg::OneDpR => LemmaKind::PairRing,
        LemmaArg::TwoDp => LemmaKind::TsumField,
        _ => LemmaKind::TsumRing,
    };
    let ring = matches!(expected_kind, LemmaKind::PairRing | LemmaKind::TsumRing);
    let two = matches!(expected_kind, LemmaKind::TsumField | LemmaKind::TsumRing);

    // Sets: the given one, or `trials` random ones.
    let mut sets: Vec<(u32, Option<u64>, PointSet)> = Vec::new();
    if o.src.path.is_some() || o.src.random.is_some() {
        sets.push((0, seeds_of(&o.src, g).first().copied(), load_set(g, &o.src)?));
    } else {
        let s = g.structure()?;
        let d = g.dim();
        let space = (s.q() as u64).saturating_pow(d as u32);
        for trial in 0..o.trials {
            let seed = derive_seed(g.seed, 1, trial as u64);
            let n = match o.size {
                Some(n) => n,
                None => SplitMix64::new(derive_seed(g.seed, 0, trial as u64)).range_inclusive(1, space),
            };
            sets.push((trial, Some(seed), sample_uniform(&s, d, n, seed, &g.limits)?));
        }
    }
    let s = sets[0].2.structure().clone();
    if ring != (s.kind() == StructureKind::IntegerRing) {
        let want = if ring { "an integer ring Z:p^l" } else { "a field Fp:p or F:p^m" };
        return usage(format!("lemma {} needs {want}, got {}", expected_kind.name(), s.literal()));
    }
    let admissible: Vec<Element> = match &o.gamma {
        Some(text) => parse_alphas(&s, text)?,
        None if ring => s.elements().filter(|a| s.is_unit(*a)).collect(),
        None => s.elements().collect(),
    };
    if ring {
        if let Some(a) = admissible.iter().find(|a| !s.is_unit(**a)) {
            return usage(format!("ring lemmas need unit parameters; {} is not a unit in {}", a, s.literal()));
        }
    }
    let params: Vec<Vec<Element>> = if two {
        if o.gamma.is_some() && admissible.len() == 2 {
            vec![admissible.clone()]
        } else {
            admissible.iter().flat_map(|&a| admissible.iter().map(move |&b| vec![a, b])).collect()
        }
    } else {
        admissible.iter().map(|&a| vec![a]).collect()
    };

    let mut records = Vec::new();
    for (trial, seed, e) in &sets {
        for p in &params {
            let check = if two {
                check_tsum_lemma(e, p[0], p[1], o.constant, &g.limits)?
            } else {
                check_pair_lemma(e, p[0])?
            };
            records.push(LemmaRecord { trial: *trial, seed: *seed, size: e.len(), params: p.clone(), check });
        }
    }

    let failures = records.iter().filter(|r| !r.check.pass).count() as u64;
    let worst = records
        .iter()
        .max_by(|a, b| a.check.ratio.total_cmp(&b.check.ratio))
        .expect("at least one check");
    let mut t = Table::new(&["trial", "seed", "set_size", "params", "lhs_squared", "bound", "bound_squared", "ratio_approx", "pass"]);
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            t.push(vec![
                r.trial.to_string(),
                r.seed.map(|s| s.to_string()).unwrap_or_default(),
                r.size.to_string(),
                alpha_text(&r.params),
                r.check.lhs_squared.to_string(),
                r.check.bound.to_string(),
                r.check.bound.squared().to_string(),
                r.check.ratio.to_string(),
                r.check.pass.to_string(),
            ]);
            lemma_json(r)
        })
        .collect();
    let constant = worst.check.constant;
    let mut summary = Summary::of_checks(records.len() as u64, failures);
    if expected_kind == LemmaKind::TsumField {
        summary = summary.with_note(format!(
            "the bound holds up to an unstated constant; pass means ratio <= {constant}"
        ));
    }
    let payload = json!({
        "lemma": expected_kind.name(),
        "constant": num(constant),
        "sets": num(sets.len()),
        "checks": num(records.len()),
        "failures": num(failures),
        "max_ratio_approx": worst.check.ratio,
        "worst": lemma_json(worst),
        "records": rows,
    });
    let seeds = sets.iter().filter_map(|(_, s, _)| *s).collect();
    Ok(Outcome::new(payload, summary).structure(s.literal()).seeds(seeds).table(t))
}

fn lemma_json(r: &LemmaRecord) -> Value {
    json!({
        "trial": num(r.trial),
        "seed": r.seed.map(num),
        "set_size": num(r.size),
        "params": alpha_strings(&r.params),
        "lhs_signed": r.check.lhs_signed.as_ref().map(num),
        "lhs_squared": num(&r.check.lhs_squared),
        "bound": num(&r.check.bound),
        "bound_squared": num(r.check.bound.squared()),
        "ratio_approx": r.check.ratio,
        "pass": r.check.pass,
    })
}

fn random_rational(rng: &mut SplitMix64) -> Rational {
    let n = rng.below(21) as Int - 10;
    let d = rng.range_inclusive(1, 6) as Int;
    Ratio::new(n, d)
}

fn rc_check(g: &Globals, o: &LemmaOpts) -> CmdResult {
    let mut t = Table::new(&["trial", "seed", "m", "n", "lhs_squared", "norms_squared", "bound_approx", "pass", "certified"]);
    let mut failures = 0;
    let mut uncertified = 0;
    let mut seeds = Vec::new();
    for trial in 0..o.trials {
        let seed = derive_seed(g.seed, 2, trial as u64);
        seeds.push(seed);
        let mut rng = SplitMix64::new(seed);
        let m = rng.range_inclusive(1, o.max_dim) as usize;
        let n = rng.range_inclusive(1, o.max_dim) as usize;
        let entry = |rng: &mut SplitMix64| ComplexQ::new(random_rational(rng), random_rational(rng));
        let c: Vec<Vec<ComplexQ<Int>>> = (0..m).map(|_| (0..n).map(|_| entry(&mut rng)).collect()).collect();
        let z: Vec<ComplexQ<Int>> = (0..m).map(|_| entry(&mut rng)).collect();
        let y: Vec<ComplexQ<Int>> = (0..n).map(|_| entry(&mut rng)).collect();
        let r = check_rc(&c, &z, &y)?;
        failures += u64::from(!r.pass);
        uncertified += u64::from(!r.certified);
        t.push(vec![
            trial.to_string(),
            seed.to_string(),
            m.to_string(),
            n.to_string(),
            r.lhs_squared.to_string(),
            r.norms_squared.to_string(),
            r.bound.to_string(),
            r.pass.to_string(),
            r.certified.to_string(),
        ]);
    }
    let payload = json!({
        "lemma": "rc",
        "instances": num(o.trials),
        "max_dim": num(o.max_dim),
        "failures": num(failures),
        "uncertified": num(uncertified),
    });
    Ok(Outcome::new(payload, Summary::of_checks(o.trials as u64, failures)).seeds(seeds).table(t))
}

fn mn_check(o: &LemmaOpts) -> CmdResult {
    let mut checked = 0u64;
    let mut bound_failures = 0u64;
    let mut closed_form_failures = 0u64;
    let mut tight = 0u64;
    let mut t = Table::new(&["k", "tuples", "bound_failures", "closed_form_failures", "tight"]);
    for k in 1..=o.max_k {
        let (mut bf, mut cf, mut tk, mut n) = (0u64, 0u64, 0u64, 0u64);
        for j in binary_tuples(k) {
            let ts = term_structure(&j);
            n += 1;
            bf += u64::from(!ts.bound_holds());
            cf += u64::from(!ts.closed_form_holds());
            tk += u64::from(ts.z + ts.m == k + 1);
        }
        t.push(vec![k.to_string(), n.to_string(), bf.to_string(), cf.to_string(), tk.to_string()]);
        checked += n;
        bound_failures += bf;
        closed_form_failures += cf;
        tight += tk;
    }
    let payload = json!({
        "lemma": "mn",
        "max_k": num(o.max_k),
        "tuples": num(checked),
        "bound_failures": num(bound_failures),
        "closed_form_failures": num(closed_form_failures),
        "tight": num(tight),
    });
    Ok(Outcome::new(payload, Summary::of_checks(checked, bound_failures + closed_form_failures)).table(t))
}

#[derive(Debug, Clone)]
pub enum ConstructKind {
    Axes,
    Shifted { alpha: String },
    ErratumFamily { alpha: String, beta: String },
    Line { v: String, alpha: String },
}

fn points_json(pts: &[Point]) -> Value {
    Value::Array(pts.iter().map(|p| nums(p.reprs())).collect())
}

fn points_table(e: &PointSet) -> Table {
    let header: Vec<String> = (1..=e.dim()).map(|i| format!("x{i}")).collect();
    let mut t = Table { header, rows: Vec::new() };
    for p in e.iter() {
        t.push(p.iter().map(|c| c.to_string()).collect());
    }
    t
}

pub fn construct(g: &Globals, kind: &ConstructKind) -> CmdResult {
    let s = g.structure()?;
    let (name, e, extra, summary) = match kind {
        ConstructKind::Axes => ("axes", axes_set(&s, g.dim())?, json!({}), Summary::info()),
        ConstructKind::Shifted { alpha } => {
            if g.d.is_some_and(|d| d != 3) {
                return usage("shifted lines live in dimension 3");
            }
            let a = single(&s, alpha)?;
            ("shifted", shifted_lines_set(&s, a)?, json!({ "alpha": num(a.0) }), Summary::info())
        }
        ConstructKind::ErratumFamily { alpha, beta } => {
            if s.kind() != StructureKind::IntegerRing {
                return usage("erratum-family needs an integer ring Z:p^l");
            }
            let (a, b) = (single(&s, alpha)?, single(&s, beta)?);
            let fam = erratum_family_set(s.p() as u64, s.e(), a, b)?;
            let restricted = restricted_two_chains(&s, &fam.x, &fam.y, &fam.z, a, b);
            let p3 = (s.p() as u64).pow(3);
            let spec = ChainSpec::new(vec![a, b], Policy::PairwiseDistinct)?;
            let pairwise = count_chains_brute::<Int>(&fam.set, &spec, g.limits.brute_budget).ok().map(|r| r.count);
            let ok = restricted == p3 && pairwise.is_none_or(|c| c >= p3 as Int);
            let extra = json!({
                "alpha": num(a.0),
                "beta": num(b.0),
                "x": points_json(&fam.x),
                "y": points_json(&fam.y),
                "z": points_json(&fam.z),
                "restricted_count": num(restricted),
                "expected_restricted_count": num(p3),
                "pairwise_distinct_count": pairwise.map(num),
            });
            ("erratum-family", fam.set, extra, Summary::of_checks(1, u64::from(!ok)))
        }
        ConstructKind::Line { v, alpha } => {
            let v = Point(parse_alphas(&s, v)?);
            if v.len() != 2 {
                return usage("line takes a point v with two coordinates");
            }
            let a = single(&s, alpha)?;
            let line = line_points(&s, &v, a)?;
            let e = PointSet::new(s.clone(), 2, line.points)?;
            ("line", e, json!({ "v": nums(v.reprs()), "alpha": num(a.0) }), Summary::info())
        }
    };
    let mut payload = json!({
        "construction": name,
        "dim": num(e.dim()),
        "set_size": num(e.len()),
        "points": points_json(e.points()),
    });
    if let (Value::Object(p), Value::Object(x)) = (&mut payload, extra) {
        p.extend(x);
    }
    Ok(Outcome::new(payload, summary).structure(s.literal()).table(points_table(&e)).text(e.to_text()))
}

pub fn erratum_check() -> CmdResult {
    let r = erratum_counterexample();
    let f9 = Structure::extension_field(3, 2)?;
    let field_max = max_distinct_line_intersection(&f9)?;
    let field_ok = field_max <= 1;
    let rows = |v: &[Vec<u32>]| Value::Array(v.iter().map(nums).collect());
    let payload = json!({
        "ring": r.structure,
        "v": nums(&r.v),
        "alpha": num(r.alpha),
        "w": nums(&r.w),
        "beta": num(r.beta),
        "line_v": rows(&r.line_v),
        "line_w": rows(&r.line_w),
        "intersection": rows(&r.intersection),
        "intersection_size": num(r.intersection_size),
        "line_v_matches_listing": r.line_v_matches_listing,
        "line_w_matches_listing": r.line_w_matches_listing,
        "intersection_matches_listing": r.intersection_matches_listing,
        "lines_differ": r.lines_differ,
        "field_contrast": {
            "field": f9.literal(),
            "max_distinct_line_intersection": num(field_max),
            "pass": field_ok,
        },
    });
    let checks = [
        r.line_v_matches_listing,
        r.line_w_matches_listing,
        r.intersection_matches_listing,
        r.intersection_size == 3,
        r.lines_differ,
        field_ok,
    ];
    let failures = checks.iter().filter(|c| !**c).count() as u64;
    let mut t = Table::new(&["set", "points"]);
    for (name, pts) in [("line_v", &r.line_v), ("line_w", &r.line_w), ("intersection", &r.intersection)] {
        let text = pts.iter().map(|p| format!("({},{})", p[0], p[1])).collect::<Vec<_>>().join(" ");
        t.push(vec![name.into(), text]);
    }
    Ok(Outcome::new(payload, Summary::of_checks(checks.len() as u64, failures)).structure(r.structure).table(t))
}

#[derive(Debug, Clone)]
pub struct SweepOpts {
    pub alpha: String,
    pub sizes: Vec<u64>,
    pub multiples: Vec<f64>,
    pub trials: u32,
    pub tolerance: String,
    pub pairwise: bool,
    pub cell_budget: Option<u128>,
}

fn parse_ratio(text: &str) -> std::result::Result<Ratio<i64>, UsageError> {
    let bad = || UsageError(format!("bad ratio {text:?}; use a fraction like 1/10 or a decimal like 0.1"));
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d <= 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let den = 10i64.pow(frac.len() as u32);
    let digits = format!("{int}{frac}");
    let n: i64 = digits.parse().map_err(|_| bad())?;
    Ok(Ratio::new(n, den))
}

pub fn sweep(g: &Globals, o: &SweepOpts) -> CmdResult {
    let s = g.structure()?;
    let d = g.dim();
    let alphas = parse_alphas(&s, &o.alpha)?;
    let mut cells: Vec<CellSpec> =
        o.sizes.iter().map(|&n| CellSpec { structure: s.clone(), d, alphas: alphas.clone(), size: n }).collect();
    for &m in &o.multiples {
        cells.push(CellSpec::at_threshold_multiple(s.clone(), d, alphas.clone(), m)?);
    }
    if cells.is_empty() {
        return usage("give at least one --size or --multiple");
    }
    let mut config = SweepConfig {
        cells,
        trials: o.trials,
        master_seed: g.seed,
        tolerance: parse_ratio(&o.tolerance)?,
        pairwise: o.pairwise,
        limits: g.limits.clone(),
        ..SweepConfig::default()
    };
    if let Some(b) = o.cell_budget {
        config.cell_budget = b;
    }
    let report = threshold_sweep::<Int>(&config)?;
    let threshold = threshold_for(&s, d, &alphas).ok();
    let space = (s.q() as u64).saturating_pow(d as u32);
    let cells: Vec<Value> = report
        .cells
        .iter()
        .map(|c| {
            let trials: Vec<Value> = c
                .trials
                .iter()
                .map(|t| {
                    json!({
                        "trial": num(t.trial),
                        "seed": num(t.seed),
                        "count": num(t.count),
                        "main_term": num(t.main_term),
                        "relative_error": num(t.relative_error),
                        "pairwise_count": t.pairwise_count.map(num),
                        "pairwise_delta": t.pairwise_delta().map(num),
                    })
                })
                .collect();
            let summary = c.summary.as_ref().map(|s| {
                json!({
                    "mean_error": num(&s.mean_error),
                    "mean_abs_error": num(&s.mean_abs_error),
                    "mean_abs_error_approx": ratio_to_f64(&s.mean_abs_error),
                    "min_error": num(&s.min_error),
                    "max_error": num(&s.max_error),
                    "pass": s.pass,
                })
            });
            json!({
                "cell": num(c.index),
                "structure": c.structure,
                "q": num(c.q),
                "d": num(c.d),
                "k": num(c.k()),
                "alphas": alpha_strings(&c.alphas),
                "pattern": c.pattern.name(),
                "size": num(c.size),
                "saturated": c.size == space,
                "threshold_exponent": c.threshold_exponent.map(num),
                "trials": trials,
                "summary": summary,
                "skipped": c.skipped,
            })
        })
        .collect();
    let ran: Vec<_> = report.cells.iter().filter_map(|c| c.summary.as_ref()).collect();
    let failures = ran.iter().filter(|s| !s.pass).count() as u64;
    let skipped = report.cells.iter().filter(|c| c.skipped.is_some()).count();
    let payload = json!({
        "master_seed": num(report.master_seed),
        "trials": num(report.trials),
        "tolerance": num(report.tolerance),
        "threshold_exponent": threshold.map(|t| num(t.exponent)),
        "legend": SWEEP_LEGEND,
        "cells": cells,
        "skipped_cells": num(skipped),
    });
    let mut summary = Summary::of_checks(ran.len() as u64, failures);
    if report.cells.iter().any(|c| c.size == space && c.skipped.is_none()) {
        summary = summary.with_note("some cells use the full space; accuracy degrades near saturation");
    }
    let table = csv_table(&report.to_csv());
    let seeds = report.cells.iter().flat_map(|c| c.trials.iter().map(|t| t.seed)).collect();
    Ok(Outcome::new(payload, summary).structure(s.literal()).seeds(seeds).table(table))
}

fn csv_table(csv: &str) -> Table {
    let mut lines = csv.lines();
    let header = lines.next().unwrap_or("").split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    Table { header, rows }
}

#[derive(Debug, Clone)]
pub struct SmallsetOpts {
    pub alpha: String,
    pub size: u64,
    pub trials: u32,
    pub max_ratio: Option<f64>,
}

pub fn smallset(g: &Globals, o: &SmallsetOpts) -> CmdResult {
    let s = g.structure()?;
    if let Some(d) = g.d {
        if d != 2 {
            return usage("the small-set report is planar: use --d 2");
        }
    }
    let alphas = parse_alphas(&s, &o.alpha)?;
    if alphas.iter().any(|a| a.0 == 0) {
        return usage("the small-set bound assumes every alpha_j is nonzero");
    }
    let mut t = Table::new(&["trial", "seed", "set_size", "k", "count", "cap_exponent", "ratio", "ratio_approx"]);
    let mut rows = Vec::new();
    let mut seeds = Vec::new();
    let mut max_ratio: f64 = 0.0;
    let mut cap = 0;
    for trial in 0..o.trials {
        let seed = derive_seed(g.seed, 3, trial as u64);
        seeds.push(seed);
        let e = sample_uniform(&s, 2, o.size, seed, &g.limits)?;
        let r = smallset_report::<Int>(&e, &alphas)?;
        cap = r.cap_exponent;
        max_ratio = max_ratio.max(r.ratio_f64());
        t.push(vec![
            trial.to_string(),
            seed.to_string(),
            r.set_size.to_string(),
            r.k.to_string(),
            r.count.to_string(),
            r.cap_exponent.to_string(),
            r.ratio.to_string(),
            r.ratio_f64().to_string(),
        ]);
        rows.push(json!({
            "trial": num(trial),
            "seed": num(seed),
            "count": num(r.count),
            "ratio": num(r.ratio),
            "ratio_approx": r.ratio_f64(),
            "ratio_square": r.ratio_square.map(num),
        }));
    }
    let failures = match o.max_ratio {
        Some(m) => u64::from(max_ratio > m),
        None => 0,
    };
    let checks = u64::from(o.max_ratio.is_some());
    let payload = json!({
        "k": num(alphas.len()),
        "alphas": alpha_strings(&alphas),
        "set_size": num(o.size),
        "cap_exponent": num(cap),
        "max_ratio_approx": max_ratio,
        "guard_approx": o.max_ratio,
        "trials": rows,
    });
    let summary = Summary::of_checks(checks, failures)
        .with_note("ratios are reported only; the implied constant of the bound is not known");
    Ok(Outcome::new(payload, summary).structure(s.literal()).seeds(seeds).table(t))
}
