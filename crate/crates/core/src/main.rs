use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cylnogo_core::classical::ClassicalElement;
use cylnogo_core::operator::KetCombination;
use cylnogo_core::parse::{parse_classical, parse_operator, parse_operator_expr, parse_scalar, SchemeContext};
use cylnogo_core::quant::{extract_constraints, solve_linear, Bindings, QuantScheme, Rule, SchemeKind};
use cylnogo_core::scalar::{GaussRat, Param, Scalar};
use cylnogo_core::subalgebra::{alpha_assignment, b_complex, closure, walpha_generators, Cutoff, FilteredBasis, Membership};
use cylnogo_core::verify::{report_json, report_text, run_checks, Manifest};

#[derive(Parser)]
#[command(name = "cylnogo", version, about = "Exact quantization computations on the cylinder")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Poisson bracket of two classical expressions.
    Bracket { f: String, g: String },
    /// Product of two expressions.
    Mul {
        lhs: String,
        rhs: String,
        #[arg(long, value_enum, default_value = "operator")]
        kind: Kind,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Quantize a classical expression.
    Quantize {
        expr: String,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Commutator of two operator expressions.
    Comm {
        lhs: String,
        rhs: String,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Apply an operator to the basis ket |n>.
    Apply {
        op: String,
        #[arg(long, allow_hyphen_values = true)]
        ket: i64,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Matrix element <m|A|n>.
    Melem {
        op: String,
        #[arg(long, allow_hyphen_values = true)]
        bra: i64,
        #[arg(long, allow_hyphen_values = true)]
        ket: i64,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Solve `residual = 0` coefficientwise for the listed unknowns.
    Solve {
        residual: String,
        #[arg(long, value_delimiter = ',', required = true)]
        unknowns: Vec<String>,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Bracket closure of a generating set inside a cutoff box.
    Closure {
        #[command(flatten)]
        gens: GenArgs,
    },
    /// Membership of an expression in a closure.
    Member {
        #[arg(long)]
        expr: String,
        #[command(flatten)]
        gens: GenArgs,
    },
    /// Run the named checks.
    Verify {
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Classical,
    Operator,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct SchemeArgs {
    /// type-i, type-ii or pos-rep; also registered for `Q{name}(...)`.
    #[arg(long, default_value = "type-i")]
    scheme: String,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    bp: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    cp: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Von Neumann rules to install, e.g. `l2,ls,lc`.
    #[arg(long, value_delimiter = ',')]
    rules: Vec<String>,
}

#[derive(Args)]
struct GenArgs {
    /// A file with one classical expression per line, `preset:B` or `preset:Walpha`.
    #[arg(long)]
    gens: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, default_value_t = 3)]
    maxdeg: u32,
    #[arg(long, default_value_t = 5)]
    maxharm: i64,
}

fn exact(text: &str) -> Result<GaussRat, String> {
    parse_scalar(text)
        .map_err(|e| e.to_string())?
        .as_constant()
        .ok_or_else(|| format!("`{text}` is not an exact number"))
}

impl SchemeArgs {
    fn build(&self) -> Result<QuantScheme, String> {
        let kind: SchemeKind = self.scheme.parse().map_err(|e: cylnogo_core::quant::QuantError| e.to_string())?;
        let mut bindings = Bindings::new();
        let flags = [
            (Param::Nu, &self.nu),
            (Param::Eta, &self.eta),
            (Param::Mu, &self.mu),
            (Param::Alpha, &self.alpha),
            (Param::B, &self.b),
            (Param::C, &self.c),
            (Param::Bp, &self.bp),
            (Param::Cp, &self.cp),
            (Param::Lambda, &self.lambda),
        ];
        for (p, value) in flags {
            match value.as_deref() {
                None => {}
                Some("formal") => bindings.set_formal(p),
                Some(v) => bindings.set(p, Scalar::constant(exact(v)?)),
            }
        }
        let rules = self
            .rules
            .iter()
            .map(|r| r.parse::<Rule>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        QuantScheme::build(kind, bindings).with_rules(&rules).map_err(|e| e.to_string())
    }

    fn context(&self) -> Result<SchemeContext, String> {
        let mut ctx = SchemeContext::default();
        ctx.insert(self.build()?);
        Ok(ctx)
    }
}

impl GenArgs {
    fn generators(&self) -> Result<Vec<ClassicalElement>, String> {
        match self.gens.as_str() {
            "preset:B" => Ok(b_complex()),
            "preset:Walpha" => Ok(walpha_generators(self.maxharm)),
            path => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
                text.lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(|l| parse_classical(l).map_err(|e| format!("{l}: {e}")))
                    .collect()
            }
        }
    }

    fn run(&self) -> Result<FilteredBasis, String> {
        let assignment = match &self.alpha {
            Some(a) => alpha_assignment(exact(a)?),
            None => BTreeMap::new(),
        };
        closure(&self.generators()?, Cutoff::new(self.maxdeg, self.maxharm), &assignment).map_err(|e| e.to_string())
    }
}

fn describe(basis: &FilteredBasis) -> String {
    let pivots: Vec<String> = basis.pivots().iter().map(|m| m.to_string()).collect();
    format!(
        "dimension {} of {} at {}\npivots {}",
        basis.dim(),
        basis.cutoff().dimension(),
        basis.cutoff(),
        pivots.join(" ")
    )
}

fn run(cli: Cli) -> Result<bool, String> {
    let e = |x: &dyn std::fmt::Display| x.to_string();
    match cli.command {
        Command::Bracket { f, g } => {
            let f = parse_classical(&f).map_err(|x| e(&x))?;
            let g = parse_classical(&g).map_err(|x| e(&x))?;
            let h = f.bracket(&g);
            println!("{h}");
            println!("{}", h.to_trig_string());
        }
        Command::Mul { lhs: a, rhs: b, kind, scheme } => match kind {
            Kind::Classical => {
                let p = &parse_classical(&a).map_err(|x| e(&x))? * &parse_classical(&b).map_err(|x| e(&x))?;
                println!("{p}");
            }
            Kind::Operator => {
                let ctx = scheme.context()?;
                let a = parse_operator(&a, &ctx).map_err(|x| e(&x))?;
                let b = parse_operator(&b, &ctx).map_err(|x| e(&x))?;
                println!("{}", a.try_mul(&b).map_err(|x| e(&x))?);
            }
        },
        Command::Quantize { expr, scheme } => {
            let s = scheme.build()?;
            let f = parse_classical(&expr).map_err(|x| e(&x))?;
            println!("{}", s.quantize(&f).map_err(|x| e(&x))?);
        }
        Command::Comm { lhs: a, rhs: b, scheme } => {
            let ctx = scheme.context()?;
            let a = parse_operator(&a, &ctx).map_err(|x| e(&x))?;
            let b = parse_operator(&b, &ctx).map_err(|x| e(&x))?;
            println!("{}", a.try_commutator(&b).map_err(|x| e(&x))?);
        }
        Command::Apply { op, ket, scheme } => {
            let x = parse_operator_expr(&op, &scheme.context()?).map_err(|x| e(&x))?;
            println!("{}", x.apply_ket(&KetCombination::basis(ket)).map_err(|x| e(&x))?);
        }
        Command::Melem { op, bra, ket, scheme } => {
            let x = parse_operator_expr(&op, &scheme.context()?).map_err(|x| e(&x))?;
            println!("{}", x.matrix_element(bra, ket).map_err(|x| e(&x))?);
        }
        Command::Solve { residual, unknowns, scheme } => {
            let r = parse_operator(&residual, &scheme.context()?).map_err(|x| e(&x))?;
            let unknowns = unknowns
                .iter()
                .map(|u| Param::from_name(u).ok_or_else(|| format!("unknown parameter `{u}`")))
                .collect::<Result<Vec<_>, _>>()?;
            let set = extract_constraints(&r, &unknowns);
            for c in &set.constraints {
                println!("{c}");
            }
            let sol = solve_linear(&set).map_err(|x| e(&x))?;
            println!("{sol}");
        }
        Command::Closure { gens } => println!("{}", describe(&gens.run()?)),
        Command::Member { expr, gens } => {
            let basis = gens.run()?;
            let f = parse_classical(&expr).map_err(|x| e(&x))?;
            println!("{}", describe(&basis));
            match basis.member(&f).map_err(|x| e(&x))? {
                Membership::CertifiedIn(combo) => {
                    let parts: Vec<String> = combo.iter().map(|(i, c)| format!("({c})*v{i}")).collect();
                    println!("certified in: {}", parts.join(" + "));
                }
                Membership::NotFoundAtCutoff(rem) => {
                    println!("not found at cutoff; remainder {rem}");
                }
            }
        }
        Command::Verify { only, format, jobs } => {
            let manifest = Manifest::load().map_err(|x| e(&x))?;
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let results = run_checks(&manifest, &only, jobs).map_err(|x| e(&x))?;
            match format {
                Format::Text => print!("{}", report_text(&results)),
                Format::Json => println!("{}", report_json(&manifest, &results)),
            }
            return Ok(results.iter().all(|r| r.as_expected()));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
