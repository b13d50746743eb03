use std::fmt;
use std::path::PathBuf;

use fracpk::conditions::{
    check_complement_density, check_ls, interval_union_lower_bound, necessary_upper_bound, BallMode, DirectionSet,
};
use fracpk::constants::{self, ConstantsTable};
use fracpk::counterexample::{quotient_sequence, CexParams};
use fracpk::eigen::{
    assemble_p0_1d, assemble_p0_2d, assemble_p1_1d, asymptotics_experiment, richardson, solve_eigs, Assembly, FormMode,
    GridSpec,
};
use fracpk::io::{read_domain, DomainSpec};
use fracpk::oracle::{random_kernel_cases, verify_kernel_case, McConfig};
use fracpk::seminorm::{loss_sloane_energy, seminorm_breakdown, IndicatorFunction};
use fracpk::{AxisBox, BoxUnionDomain, FracOrder, IntervalUnion};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::output::{csv_table, emit, envelope, Format};
use crate::{
    AsymptoticsArgs, CheckArgs, Cli, Command, Condition, ConstantsArgs, CounterexampleArgs, EigenArgs, ElementArg,
    ModeArg, SeminormArgs, VerifyKernelsArgs,
};

#[derive(Debug)]
pub enum CliError {
    Core(fracpk::Error),
    Usage(String),
    Io(std::io::Error),
    /// The computation ran but a verification did not pass.
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        use fracpk::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Failed(_) => 1,
            CliError::Core(e) => match e {
                E::InvalidArgument(_) | E::Domain(_) | E::OutOfRegime(_) | E::Io(_) | E::Parse(_) => 2,
                E::SingularArgument(_) | E::Divergent(_) | E::NonConvergence { .. } | E::Eigen(_) => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "writing output: {e}"),
        }
    }
}

impl From<fracpk::Error> for CliError {
    fn from(e: fracpk::Error) -> Self {
        CliError::Core(e)
    }
}

type Res<T> = Result<T, CliError>;

/// `--out csv` / `--out json` with no extension select the format.
fn target(cli: &Cli) -> (Option<PathBuf>, Option<Format>) {
    match cli.out.as_deref().and_then(|p| p.to_str()) {
        Some("csv") if cli.format.is_none() => (None, Some(Format::Csv)),
        Some("json") if cli.format.is_none() => (None, Some(Format::Json)),
        _ => (cli.out.clone(), cli.format),
    }
}

pub fn run(cli: &Cli) -> Res<()> {
    let (path, format) = target(cli);
    let text = match &cli.command {
        Command::VerifyKernels(a) => {
            json_only(format)?;
            return verify_kernels(cli, a, path);
        }
        Command::Seminorm(a) => {
            json_only(format)?;
            report("seminorm", cli.seed, a, &seminorm(a)?)
        }
        Command::Counterexample(a) => counterexample(cli.seed, a, format.unwrap_or(Format::Csv))?,
        Command::Check(a) => {
            json_only(format)?;
            report("check", cli.seed, a, &check(a)?)
        }
        Command::Eigen(a) => eigen(cli.seed, a, format.unwrap_or(Format::Json))?,
        Command::Asymptotics(a) => asymptotics(cli.seed, a, format.unwrap_or(Format::Csv))?,
        Command::Constants(a) => {
            json_only(format)?;
            constants_table(a)?
        }
    };
    emit(&text, path.as_deref()).map_err(CliError::Io)
}

fn json_only(format: Option<Format>) -> Res<()> {
    match format {
        Some(Format::Csv) => Err(CliError::Usage("this command only emits JSON".into())),
        _ => Ok(()),
    }
}

fn report<P: Serialize>(command: &str, seed: u64, params: &P, result: &Value) -> String {
    let params = serde_json::to_value(params).expect("arguments serialize");
    envelope(command, seed, &params, result)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn load(path: &std::path::Path) -> Res<DomainSpec> {
    Ok(read_domain(path)?)
}

fn order_of(flag: Option<FracOrder>, spec: &DomainSpec) -> Res<FracOrder> {
    flag.or(spec.s).ok_or_else(|| CliError::Usage("no --s given and the domain file has no \"s\"".into()))
}

fn verify_kernels(cli: &Cli, a: &VerifyKernelsArgs, path: Option<PathBuf>) -> Res<()> {
    if a.cases == 0 {
        return Err(CliError::Usage("--cases must be positive".into()));
    }
    McConfig::new(a.samples, cli.seed)?;
    let cases = random_kernel_cases(a.cases, cli.seed);
    let mut orders = Vec::new();
    let mut failed = 0usize;
    for (si, &s) in a.s.iter().enumerate() {
        let mut checks = Vec::with_capacity(cases.len());
        for (i, &case) in cases.iter().enumerate() {
            let cfg = McConfig::new(a.samples, cli.seed.wrapping_add(((si as u64) << 32) | i as u64))?;
            checks.push(verify_kernel_case(case, s, &cfg, a.quad_rtol, a.z_max)?);
        }
        let bad = checks.iter().filter(|c| !c.pass).count();
        failed += bad;
        orders.push(json!({ "s": s, "failed": bad, "checks": checks }));
    }
    let result = json!({ "all_pass": failed == 0, "orders": orders });
    emit(&report("verify-kernels", cli.seed, a, &result), path.as_deref()).map_err(CliError::Io)?;
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} kernel checks failed")));
    }
    Ok(())
}

fn seminorm(a: &SeminormArgs) -> Res<Value> {
    let spec = load(&a.domain)?;
    let s = order_of(a.s, &spec)?;
    let f = IndicatorFunction::new(spec.domain)?;
    let b = seminorm_breakdown(&f, s)?;
    let mut out = to_value(&b);
    if a.loss_sloane {
        let ls = loss_sloane_energy(&f, s, a.angles, a.spacing)?;
        out["loss_sloane"] = json!({
            "energy": ls,
            "rel_diff": (ls.value - b.total.value).abs() / b.total.value,
        });
    }
    Ok(out)
}

fn counterexample(seed: u64, a: &CounterexampleArgs, format: Format) -> Res<String> {
    let params = CexParams::new(a.s, a.beta, a.a, a.k.clone())?;
    let table = quotient_sequence(&params)?;
    match format {
        Format::Csv => csv_table("counterexample", &table.rows).map_err(CliError::Usage),
        Format::Json => Ok(report("counterexample", seed, a, &to_value(&table))),
    }
}

fn window(v: &[f64]) -> Res<AxisBox> {
    match *v {
        [x0, x1] => Ok(AxisBox::new_1d(x0, x1)?),
        [x0, x1, y0, y1] => Ok(AxisBox::new_2d((x0, x1), (y0, y1))?),
        [] => Err(CliError::Usage("this condition needs --window x0,x1,y0,y1".into())),
        _ => Err(CliError::Usage(format!("--window takes 2 or 4 numbers, got {}", v.len()))),
    }
}

fn intervals(domain: &BoxUnionDomain) -> Res<IntervalUnion> {
    if domain.dim() != 1 {
        return Err(CliError::Usage("this operation needs a 1D domain".into()));
    }
    Ok(IntervalUnion::from_open(domain.boxes().iter().map(|b| (b.lo(0), b.hi(0))).collect()))
}

fn check(a: &CheckArgs) -> Res<Value> {
    let spec = load(&a.domain)?;
    let s = order_of(a.s, &spec)?;
    let d = &spec.domain;
    let rep = match a.condition {
        Condition::Density => {
            let r = a.r.ok_or_else(|| CliError::Usage("--condition density needs --R".into()))?;
            check_complement_density(d, r, &window(&a.window)?, a.grid, s)?
        }
        Condition::Ls => {
            let spec = a.directions.ok_or_else(|| CliError::Usage("--condition ls needs --directions".into()))?;
            let dirs = DirectionSet::arc(spec.a, spec.b, spec.count)?;
            check_ls(d, &dirs, s, a.line_samples, &window(&a.window)?)?
        }
        Condition::Interval => interval_union_lower_bound(&intervals(d)?, s, constants::p1_unit(s)?)?,
        Condition::PlainBall => necessary_upper_bound(d, BallMode::PlainBall, &window(&a.window)?, s, a.resolution)?,
        Condition::ExtendedBall => {
            necessary_upper_bound(d, BallMode::ExtendedBall, &window(&a.window)?, s, a.resolution)?
        }
    };
    Ok(to_value(&rep))
}

#[derive(Serialize)]
struct EigenRow {
    k: usize,
    lambda: f64,
}

fn eigen_assembly(spec: &DomainSpec, s: FracOrder, a: &EigenArgs, factor: usize) -> Res<Assembly> {
    let mode = match a.mode {
        ModeArg::Full => FormMode::Full,
        ModeArg::Regional => FormMode::Regional,
    };
    let d = &spec.domain;
    let bbox = d
        .bounding_box()
        .filter(AxisBox::is_finite)
        .ok_or_else(|| CliError::Usage("eigen needs a bounded nonempty domain".into()))?;
    let n = [a.grid[0] * factor, a.grid[1] * factor];
    if d.dim() == 2 {
        if a.elements == ElementArg::P1 {
            return Err(CliError::Usage("2D grids use P0 elements only".into()));
        }
        return Ok(assemble_p0_2d(d, &GridSpec::p0(bbox, n)?, s, mode)?);
    }
    let u = intervals(d)?;
    Ok(match a.elements {
        ElementArg::P0 => assemble_p0_1d(&u, &GridSpec::p0(bbox, [n[0], 1])?, s, mode)?,
        ElementArg::P1 => assemble_p1_1d(&u, &GridSpec::p1(bbox, n[0])?, s, mode)?,
    })
}

fn eigen(seed: u64, a: &EigenArgs, format: Format) -> Res<String> {
    let spec = load(&a.domain)?;
    let s = order_of(a.s, &spec)?;
    if a.k == 0 {
        return Err(CliError::Usage("--k must be positive".into()));
    }
    if a.ladder.iter().any(|&m| m == 0) {
        return Err(CliError::Usage("--ladder factors must be positive".into()));
    }
    let eig = solve_eigs(&eigen_assembly(&spec, s, a, 1)?, a.k)?;
    match format {
        Format::Csv => {
            let rows: Vec<EigenRow> =
                eig.eigenvalues.iter().enumerate().map(|(i, &lambda)| EigenRow { k: i + 1, lambda }).collect();
            csv_table("eigen", &rows).map_err(CliError::Usage)
        }
        Format::Json => {
            let mut out = to_value(&eig);
            if !a.ladder.is_empty() {
                let values = a
                    .ladder
                    .iter()
                    .map(|&m| Ok(solve_eigs(&eigen_assembly(&spec, s, a, m)?, 1)?.eigenvalues[0]))
                    .collect::<Res<Vec<f64>>>()?;
                out["ladder"] = to_value(&richardson(a.ladder.clone(), values));
            }
            Ok(report("eigen", seed, a, &out))
        }
    }
}

#[derive(Serialize)]
struct AsymptoticsCsvRow {
    ell: f64,
    k: usize,
    lambda: f64,
    p2_omega: f64,
    gap: f64,
    fitted_exponent: f64,
}

fn asymptotics(seed: u64, a: &AsymptoticsArgs, format: Format) -> Res<String> {
    let [w0, w1] = a.omega[..] else {
        return Err(CliError::Usage("--omega takes two numbers a,b".into()));
    };
    let table = asymptotics_experiment(a.s, (w0, w1), &a.ells, a.k, a.cells_per_unit)?;
    match format {
        Format::Csv => {
            let rows: Vec<AsymptoticsCsvRow> = table
                .rows
                .iter()
                .map(|r| AsymptoticsCsvRow {
                    ell: r.ell,
                    k: r.k,
                    lambda: r.lambda,
                    p2_omega: r.p2_omega,
                    gap: r.gap,
                    fitted_exponent: table.fitted_exponent[r.k - 1],
                })
                .collect();
            csv_table("asymptotics", &rows).map_err(CliError::Usage)
        }
        Format::Json => Ok(report("asymptotics", seed, a, &to_value(&table))),
    }
}

/// SHA-256 over the recipes and tolerances in canonical JSON.
pub fn recipe_hash(t: &ConstantsTable) -> String {
    let canon = json!({
        "schema_version": t.schema_version,
        "lambda_ref_recipe": t.lambda_ref_recipe,
        "p1_unit_recipe": t.p1_unit_recipe,
        "tolerances": t.tolerances,
    });
    hex::encode(Sha256::digest(canon.to_string().as_bytes()))
}

fn constants_table(a: &ConstantsArgs) -> Res<String> {
    let shipped = ConstantsTable::shipped();
    let mut table = if a.regenerate {
        let orders = if a.orders.is_empty() {
            shipped.entries.iter().map(|e| FracOrder::new(e.s)).collect::<fracpk::Result<Vec<_>>>()?
        } else {
            a.orders.clone()
        };
        constants::generate_table(&orders)?
    } else {
        if !a.orders.is_empty() {
            return Err(CliError::Usage("--orders needs --regenerate".into()));
        }
        shipped.clone()
    };
    if table.tolerances.is_some() {
        table.recipe_hash = Some(recipe_hash(&table));
    }
    Ok(serde_json::to_string_pretty(&table).expect("tables serialize") + "\n")
}
