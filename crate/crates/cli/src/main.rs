use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use asim_core::asimulation::Premise;
use asim_core::genmod::SchemaForm;
use asim_core::types::canonical_k_asimulation;
use asim_core::{
    canonical_asimulation, check_asimulation, check_generated, check_k_asimulation, distinguishing_formula, eval_fol,
    eval_modal, gen_conditions, gen_st, kappa_invariance_test, load_model, maximal_asimulation, modal_companion_search,
    parse_fol, parse_modal, run_suite, translate, AsimKind, Asimulation, Bounds, Condition, Env, KripkeStructure,
    ModalitySignature, ModelClassSpec, PoolFamily, SeqAsimulation, Signature, Suite, SuiteConfig, Var, Variant,
    Verdict, World,
};
use clap::{Args, Parser, Subcommand};

/// Asimulations and standard translations for intuitionistic modal logics.
#[derive(Parser)]
#[command(name = "asim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a modal formula into the correspondence language.
    Translate {
        #[arg(long)]
        variant: Variant,
        /// Name of the free point variable.
        #[arg(long, default_value = "x")]
        var: String,
        #[arg(long)]
        unicode: bool,
        formula: String,
    },
    /// Evaluate a modal formula (or, with --fol, a correspondence formula) at a world.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        world: String,
        #[arg(long, required_unless_present = "fol")]
        variant: Option<Variant>,
        /// Read the formula as first-order; the world is bound to --var.
        #[arg(long)]
        fol: bool,
        #[arg(long, default_value = "x")]
        var: String,
        formula: String,
    },
    /// Check a relation file against the asimulation conditions.
    CheckAsim {
        #[arg(long)]
        kind: AsimKind,
        #[command(flatten)]
        pair: ModelPair,
        #[arg(long)]
        relation: PathBuf,
    },
    /// Check a sequence relation file against the k-indexed conditions.
    CheckKasim {
        #[arg(long)]
        kind: AsimKind,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        pair: ModelPair,
        #[arg(long)]
        relation: PathBuf,
    },
    /// Print the maximal asimulation and whether it relates the roots.
    MaxAsim {
        /// `basic` or a variant `11|12|21|22`.
        #[arg(long, alias = "kind")]
        variant: AsimKind,
        #[command(flatten)]
        pair: ModelPair,
    },
    /// Search for a formula true at t and false at u.
    Distinguish {
        #[arg(long)]
        variant: Variant,
        #[command(flatten)]
        pair: ModelPair,
        #[arg(long, default_value_t = 6)]
        max_depth: usize,
        #[arg(long)]
        unicode: bool,
    },
    /// Type-inclusion relations: the sequence construction with --k, the
    /// unindexed one otherwise.
    Canonical {
        #[arg(long)]
        variant: Variant,
        #[command(flatten)]
        pair: ModelPair,
        #[arg(long, conflicts_with = "bound")]
        k: Option<usize>,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Translate `μI` for a generalized modality μ.
    GenSt {
        /// Guarded prefix, outermost first, e.g. `A:R;E:Rd`.
        #[arg(long)]
        sig: ModalitySignature,
        #[arg(long)]
        variant: Variant,
        #[arg(long, default_value = "x")]
        var: String,
        #[arg(long)]
        unicode: bool,
        formula: String,
    },
    /// Print the asimulation conditions a modality generates.
    GenConditions {
        #[arg(long)]
        sig: ModalitySignature,
    },
    /// Check a relation tuple against the generated conditions.
    CheckGen {
        #[arg(long)]
        sig: ModalitySignature,
        #[command(flatten)]
        pair: ModelPair,
        /// JSON array of relations, each a list of `{dir, from, to}` pairs.
        #[arg(long)]
        relations: PathBuf,
    },
    /// Look for asimulation pairs in a model class along which φ fails to transfer.
    KappaTest {
        #[command(flatten)]
        class: ClassArgs,
        formula: String,
    },
    /// Rank bounded modal formulas by agreement with φ on a model class.
    Companion {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 2)]
        bound: usize,
        #[arg(long, default_value_t = 5)]
        top: usize,
        #[arg(long)]
        unicode: bool,
        formula: String,
    },
    /// Run a randomized property suite.
    Suite {
        #[arg(long)]
        name: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        worlds: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        letters: Option<u32>,
        #[arg(long)]
        formulas: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ModelPair {
    #[arg(long)]
    m1: PathBuf,
    #[arg(long)]
    t: String,
    #[arg(long)]
    m2: PathBuf,
    #[arg(long)]
    u: String,
}

#[derive(Args)]
struct ClassArgs {
    #[arg(long)]
    variant: Variant,
    /// Shipped class: all, reflexive, transitive, preorder, box-eq-dia, composition.
    #[arg(long, default_value = "all", conflicts_with = "axioms")]
    class: String,
    /// File of axioms, one sentence per line.
    #[arg(long)]
    axioms: Option<PathBuf>,
    /// Model files of the corpus, comma separated or repeated.
    #[arg(long, value_delimiter = ',', required = true)]
    models: Vec<PathBuf>,
}

type Res<T> = Result<T, String>;

fn err(e: impl Display) -> String {
    e.to_string()
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn model(path: &Path) -> Res<KripkeStructure> {
    load_model(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

struct Loaded {
    m1: KripkeStructure,
    t: World,
    m2: KripkeStructure,
    u: World,
}

impl ModelPair {
    fn load(&self) -> Res<Loaded> {
        let m1 = model(&self.m1)?;
        let m2 = model(&self.m2)?;
        let t = m1.world_or_err(&self.t).map_err(err)?;
        let u = m2.world_or_err(&self.u).map_err(err)?;
        Ok(Loaded { m1, t, m2, u })
    }
}

impl ClassArgs {
    fn load(&self) -> Res<(ModelClassSpec, Vec<KripkeStructure>)> {
        let spec = match &self.axioms {
            Some(p) => ModelClassSpec::parse(p.display().to_string(), &read(p)?).map_err(err)?,
            None => ModelClassSpec::shipped(&self.class).map_err(err)?,
        };
        let corpus = self.models.iter().map(|p| model(p)).collect::<Res<Vec<_>>>()?;
        Ok((spec, corpus))
    }
}

fn show(f: &impl Display, unicode_form: impl Display, unicode: bool) -> String {
    if unicode {
        unicode_form.to_string()
    } else {
        f.to_string()
    }
}

fn print_verdict(v: &Verdict, describe: impl Fn(&asim_core::Violation) -> String) -> ExitCode {
    if v.ok {
        println!("ok");
        return ExitCode::SUCCESS;
    }
    println!("not ok: {} violations", v.violations.len());
    for x in &v.violations {
        println!("  {}", describe(x));
    }
    ExitCode::from(1)
}

fn run(cli: Cli) -> Res<ExitCode> {
    match cli.command {
        Command::Translate {
            variant,
            var,
            unicode,
            formula,
        } => {
            let f = parse_modal(&formula).map_err(err)?;
            let phi = translate(&f, variant, &Var::from(var.as_str()));
            println!("{}", show(&phi, phi.unicode(), unicode));
        }
        Command::Eval {
            model: path,
            world,
            variant,
            fol,
            var,
            formula,
        } => {
            let m = model(&path)?;
            let w = m.world_or_err(&world).map_err(err)?;
            let truth = if fol {
                let phi = parse_fol(&formula).map_err(err)?;
                eval_fol(&m, &Env::from([(Var::from(var.as_str()), w)]), &phi).map_err(err)?
            } else {
                let f = parse_modal(&formula).map_err(err)?;
                eval_modal(&m, w, &f, variant.expect("required without --fol")).map_err(err)?
            };
            println!("{truth}");
        }
        Command::CheckAsim {
            kind,
            pair,
            relation,
        } => {
            let l = pair.load()?;
            let rel = Asimulation::from_json(&read(&relation)?, &l.m1, &l.m2).map_err(err)?;
            let v = check_asimulation(&l.m1, l.t, &l.m2, l.u, kind, &rel).map_err(err)?;
            return Ok(print_verdict(&v, |x| x.describe(&l.m1, &l.m2)));
        }
        Command::CheckKasim {
            kind,
            k,
            pair,
            relation,
        } => {
            let l = pair.load()?;
            let rel = SeqAsimulation::from_json(&read(&relation)?, &l.m1, &l.m2).map_err(err)?;
            let v = check_k_asimulation(&l.m1, l.t, &l.m2, l.u, k, kind, &rel).map_err(err)?;
            return Ok(print_verdict(&v, |x| x.describe(&l.m1, &l.m2)));
        }
        Command::MaxAsim { variant, pair } => {
            let l = pair.load()?;
            let (rel, root) = maximal_asimulation(&l.m1, l.t, &l.m2, l.u, variant);
            println!("{}", rel.to_json(&l.m1, &l.m2));
            println!("contains_root {root}");
        }
        Command::Distinguish {
            variant,
            pair,
            max_depth,
            unicode,
        } => {
            let l = pair.load()?;
            match distinguishing_formula(&l.m1, l.t, &l.m2, l.u, variant, max_depth) {
                Some(f) => println!("{}", show(&f, f.unicode(), unicode)),
                None => println!("none"),
            }
        }
        Command::Canonical {
            variant,
            pair,
            k,
            bound,
        } => {
            let l = pair.load()?;
            match k {
                Some(k) => {
                    let sig = Signature::new(l.m1.letters().chain(l.m2.letters()));
                    let pools = PoolFamily::enumerate(&sig, variant, k + 2, &[&l.m1, &l.m2], usize::MAX).map_err(err)?;
                    let rel = canonical_k_asimulation(&l.m1, l.t, &l.m2, l.u, k, variant, &pools).map_err(err)?;
                    println!("{}", rel.to_json(&l.m1, &l.m2));
                }
                None => {
                    let c = canonical_asimulation(&l.m1, l.t, &l.m2, l.u, variant, bound).map_err(err)?;
                    println!("{}", c.relation.to_json(&l.m1, &l.m2));
                    println!("stabilized {}", c.stabilized);
                }
            }
        }
        Command::GenSt {
            sig,
            variant,
            var,
            unicode,
            formula,
        } => {
            let f = parse_modal(&formula).map_err(err)?;
            let phi = gen_st(&sig, &f, variant, &Var::from(var.as_str()));
            println!("{}", show(&phi, phi.unicode(), unicode));
        }
        Command::GenConditions { sig } => {
            let conds = gen_conditions(&sig);
            println!("k_mu {}", conds.len());
            for (i, c) in conds.iter().enumerate() {
                println!("r{}: {c}", i + 1);
            }
        }
        Command::CheckGen { sig, pair, relations } => {
            let l = pair.load()?;
            let doc: Vec<serde_json::Value> =
                serde_json::from_str(&read(&relations)?).map_err(|e| format!("{}: {e}", relations.display()))?;
            let tuple = doc
                .into_iter()
                .map(|pairs| {
                    let wrapped = serde_json::json!({ "relA": pairs }).to_string();
                    Asimulation::from_json(&wrapped, &l.m1, &l.m2).map(|r| r.rel_a)
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?;
            let v = check_generated(&l.m1, l.t, &l.m2, l.u, &sig, &tuple).map_err(err)?;
            let schemas = gen_conditions(&sig);
            return Ok(print_verdict(&v, |x| describe_generated(x, &schemas, &l)));
        }
        Command::KappaTest { class, formula } => {
            let (spec, corpus) = class.load()?;
            let phi = parse_fol(&formula).map_err(err)?;
            let found = kappa_invariance_test(&phi, &corpus, &spec, class.variant).map_err(err)?;
            if found.is_empty() {
                println!("invariant on {} corpus models", corpus.len());
                return Ok(ExitCode::SUCCESS);
            }
            println!("{} counterexamples", found.len());
            for c in &found {
                let (src, tgt) = (&corpus[c.source], &corpus[c.target]);
                println!(
                    "  {} {} -> {} {}",
                    class.models[c.source].display(),
                    src.name(c.from),
                    class.models[c.target].display(),
                    tgt.name(c.to)
                );
            }
            return Ok(ExitCode::from(1));
        }
        Command::Companion {
            class,
            bound,
            top,
            unicode,
            formula,
        } => {
            let (spec, corpus) = class.load()?;
            let phi = parse_fol(&formula).map_err(err)?;
            let sig = Signature::of_fol(&phi);
            let refs: Vec<&KripkeStructure> = corpus.iter().collect();
            let pools = PoolFamily::enumerate(&sig, class.variant, bound, &refs, usize::MAX).map_err(err)?;
            let pool = pools.get(bound).map_err(err)?;
            let ranked = modal_companion_search(&phi, &corpus, &spec, class.variant, pool).map_err(err)?;
            for c in ranked.iter().take(top) {
                println!("{}/{} {}", c.agree, c.total, show(&c.formula, c.formula.unicode(), unicode));
            }
        }
        Command::Suite {
            name,
            trials,
            seed,
            worlds,
            depth,
            letters,
            formulas,
            k,
            json,
        } => {
            let d = Bounds::default_for(name);
            let bounds = Bounds {
                worlds: worlds.unwrap_or(d.worlds),
                depth: depth.unwrap_or(d.depth),
                letters: letters.unwrap_or(d.letters),
                formulas: formulas.unwrap_or(d.formulas),
                k: k.unwrap_or(d.k),
            };
            let report = run_suite(&SuiteConfig {
                suite: name,
                trials,
                seed,
                bounds,
            });
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.text());
            }
            return Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Like `Violation::describe`, with the trigger named on the side its
/// schema walks.
fn describe_generated(
    x: &asim_core::Violation,
    schemas: &[asim_core::ConditionSchema],
    l: &Loaded,
) -> String {
    let Condition::Schema(i) = x.condition else {
        return x.describe(&l.m1, &l.m2);
    };
    let Some(Premise::Pair(p)) = &x.premise else {
        return x.describe(&l.m1, &l.m2);
    };
    let (src, tgt) = p.dir.models(&l.m1, &l.m2);
    let side = match schemas[i - 1].form {
        SchemaForm::TargetGuarded => tgt,
        SchemaForm::SourceGuarded => src,
    };
    let walk: Vec<&str> = x.trigger.iter().map(|&w| side.name(w)).collect();
    format!(
        "r{i} at {} {} -> {}: no witness for {}",
        p.dir,
        src.name(p.from),
        tgt.name(p.to),
        walk.join(",")
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
