//! Command-line front end for the `kripke` library.
//!
//! [`run`] parses arguments and returns the exit status with the report text, so the binary
//! and the tests share one code path.

pub mod document;

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kripke::amalgamation::{
    audit_amalgamability, coamalgamate, coamalgamate_bruteforce, coamalgamate_chain, coamalgamate_horn,
    coamalgamate_reflect, Coamalgamation,
};
use kripke::exactness::{fixture_by_name, non_effectiveness_witness, PairSelection, FIXTURE_NAMES};
use kripke::formula::{frame_validates, parse};
use kripke::limits::{cokernel_pair, coequalizer, dgrph_pullback, equalizer, pushout, Cospan, ParallelPair, Span};
use kripke::logic::{exact_entry, frame_in_logic, regular_entry, LogicSpec};
use kripke::pmorph::subreduces;
use kripke::presheaf::{verify_equivalence, FinCategory};
use kripke::product::{is_stable, mediate, product_levels, restrict_to_logic, Cone, ProductBudget, ProductLevel};
use kripke::{Budget, Error, Frame, PMorphism};

use document::{builtin_frame, dot, parse_frame_document, print_frame};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "kripke", version, about = "Finite Kripke frames and their categorical constructions")]
pub struct Cli {
    /// Largest apex tried by brute-force coamalgamation.
    #[arg(long, global = true, default_value_t = 6)]
    pub max_size: usize,
    /// Deepest product level built by `--until-stable`.
    #[arg(long, global = true, default_value_t = 4)]
    pub max_depth: usize,
    /// Step budget for every search.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_maps: u64,
    /// Also print resulting frames in Graphviz format.
    #[arg(long, global = true)]
    pub dot: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// A frame is a path to a frame document or a shorthand such as `chain:3` or `fork:2`.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide membership of a frame in a logic.
    Check {
        frame: String,
        #[arg(long)]
        logic: String,
    },
    /// Decide whether a frame validates a formula.
    Validate {
        frame: String,
        #[arg(long)]
        formula: String,
    },
    /// Equalizer of two p-morphisms `dom → cod`.
    Equalizer(PairArgs),
    /// Coequalizer of two p-morphisms `dom → cod`.
    Coequalizer(PairArgs),
    /// Cokernel pair of a p-morphism.
    CokernelPair {
        dom: String,
        cod: String,
        #[arg(long)]
        map: String,
    },
    /// Pushout of a span `a ← x → b`.
    Pushout {
        x: String,
        a: String,
        b: String,
        #[arg(long)]
        f0: String,
        #[arg(long)]
        f1: String,
    },
    /// Pullback of a cospan `a → c ← b` computed in directed graphs.
    Pullback(CospanArgs),
    /// Levels of the product of two preorders.
    Product {
        f0: String,
        f1: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long)]
        logic: Option<String>,
        #[arg(long)]
        until_stable: bool,
        /// Keep only fresh points with small stars.
        #[arg(long)]
        star_cap: Option<usize>,
    },
    /// Mediating morphism of a cone into the product levels.
    Mediate {
        apex: String,
        f0: String,
        f1: String,
        #[arg(long)]
        leg0: String,
        #[arg(long)]
        leg1: String,
        #[arg(long)]
        star_cap: Option<usize>,
    },
    /// Decide whether `w` subreduces to `v`.
    Subreduce { w: String, v: String },
    /// Coamalgamate a cospan of surjections.
    Coamalgamate {
        #[command(flatten)]
        cospan: CospanArgs,
        #[arg(long)]
        logic: String,
        #[arg(long, value_enum, default_value_t = Strategy::Auto)]
        strategy: Strategy,
    },
    /// Try to coamalgamate every rooted cospan up to a size bound.
    Audit {
        #[arg(long)]
        logic: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Check a non-effectiveness witness.
    Witness(WitnessArgs),
    /// Presheaf equivalence checks.
    Presheaf {
        #[command(subcommand)]
        command: PresheafCommand,
    },
    /// Print the regularity and exactness verdicts for a logic.
    Classify {
        #[arg(long)]
        logic: String,
    },
}

#[derive(Debug, Args)]
pub struct PairArgs {
    pub dom: String,
    pub cod: String,
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub g: String,
}

#[derive(Debug, Args)]
pub struct CospanArgs {
    pub a: String,
    pub b: String,
    pub c: String,
    #[arg(long)]
    pub f0: String,
    #[arg(long)]
    pub f1: String,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long, conflicts_with = "input")]
    pub fixture: Option<String>,
    /// The frames `U` and `W`.
    #[arg(long, num_args = 2, value_names = ["U", "W"])]
    pub input: Option<Vec<String>>,
    #[arg(long, requires = "input")]
    pub g0: Option<String>,
    #[arg(long, requires = "input")]
    pub g1: Option<String>,
    /// `full`, `diagonal`, or `perm:<p>;<q>...` with permutations written as `1 2 0`.
    #[arg(long, default_value = "full")]
    pub selection: String,
}

#[derive(Debug, Subcommand)]
pub enum PresheafCommand {
    /// Check that frames of elements give an equivalence with the logic's finite frames.
    Verify {
        #[arg(long)]
        category: String,
        #[arg(long)]
        logic: String,
        /// Largest frame size checked.
        #[arg(long, default_value_t = 4)]
        bound: usize,
        /// Largest total presheaf size checked.
        #[arg(long, default_value_t = 4)]
        presheaf_bound: usize,
        /// Use the irreflexive frames of elements.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Auto,
    Horn,
    Chain,
    Reflect,
    Bruteforce,
}

enum Failure {
    Input(String),
    Budget(String),
}

/// What a finished command prints, and its exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Holds,
    Fails,
    Truncated,
}

impl From<bool> for Status {
    fn from(ok: bool) -> Self {
        if ok {
            Status::Holds
        } else {
            Status::Fails
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(Status, String), Failure>;

/// Runs the command line.
pub fn run<I, T>(args: I) -> Report
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let report = |code, stdout: String, stderr: String| Report { code, stdout, stderr };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => return report(EXIT_INPUT, String::new(), e.to_string()),
        Err(e) => return report(EXIT_OK, e.to_string(), String::new()),
    };
    match execute(&cli) {
        Ok((Status::Holds, out)) => report(EXIT_OK, out, String::new()),
        Ok((Status::Fails, out)) => report(EXIT_FAILS, out, String::new()),
        Ok((Status::Truncated, out)) => report(EXIT_BUDGET, out, String::new()),
        Err(Failure::Input(m)) => report(EXIT_INPUT, String::new(), format!("error: {m}\n")),
        Err(Failure::Budget(m)) => report(EXIT_BUDGET, String::new(), format!("error: {m}\n")),
    }
}

fn load_frame(spec: &str) -> std::result::Result<Frame, Failure> {
    if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec).map_err(|e| Failure::Input(format!("{spec}: {e}")))?;
        return parse_frame_document(&text).map_err(|e| Failure::Input(format!("{spec}: {e}")));
    }
    builtin_frame(spec).ok_or_else(|| Failure::Input(format!("{spec}: no such file or frame shorthand")))
}

fn parse_map(text: &str) -> std::result::Result<Vec<usize>, Failure> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::Input(format!("`{t}` in map `{text}` is not a world"))))
        .collect()
}

fn load_morphism(dom: &Arc<Frame>, cod: &Arc<Frame>, map: &str) -> std::result::Result<PMorphism, Failure> {
    Ok(PMorphism::new(dom.clone(), cod.clone(), parse_map(map)?)?)
}

fn parse_logic(text: &str) -> std::result::Result<LogicSpec, Failure> {
    Ok(text.parse::<LogicSpec>()?)
}

fn show_map(f: &PMorphism) -> String {
    f.map().iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn frame_block(out: &mut String, title: &str, f: &Frame, with_dot: bool) {
    let _ = writeln!(out, "{title}:");
    out.push_str(&print_frame(f));
    if with_dot {
        out.push_str(&dot(f));
    }
}

fn execute(cli: &Cli) -> Outcome {
    let budget = Budget::new(cli.max_maps);
    let mut out = String::new();
    match &cli.command {
        Command::Check { frame, logic } => {
            let (f, l) = (load_frame(frame)?, parse_logic(logic)?);
            let ok = frame_in_logic(&l, &f);
            let _ = writeln!(out, "{l}: {}", if ok { "member" } else { "not a member" });
            Ok((ok.into(), out))
        }
        Command::Validate { frame, formula } => {
            let f = load_frame(frame)?;
            let phi = parse(formula)?;
            let ok = frame_validates(&f, &phi)?;
            let _ = writeln!(out, "valid: {}", yes(ok));
            Ok((ok.into(), out))
        }
        Command::Equalizer(p) => {
            let pair = load_pair(p)?;
            let (set, inc) = equalizer(&pair);
            let _ = writeln!(out, "worlds: {:?}", set.to_vec());
            frame_block(&mut out, "equalizer", inc.dom(), cli.dot);
            let _ = writeln!(out, "inclusion: {}", show_map(&inc));
            Ok((Status::Holds, out))
        }
        Command::Coequalizer(p) => {
            let pair = load_pair(p)?;
            let (q, map) = coequalizer(&pair)?;
            map.validate()?;
            frame_block(&mut out, "coequalizer", &q, cli.dot);
            let _ = writeln!(out, "quotient: {}", show_map(&map));
            Ok((Status::Holds, out))
        }
        Command::CokernelPair { dom, cod, map } => {
            let (d, c) = (Arc::new(load_frame(dom)?), Arc::new(load_frame(cod)?));
            let f = load_morphism(&d, &c, map)?;
            let (u, i0, i1) = cokernel_pair(&f);
            frame_block(&mut out, "cokernel pair", &u, cli.dot);
            let _ = writeln!(out, "i0: {}\ni1: {}", show_map(&i0), show_map(&i1));
            let _ = writeln!(out, "epimorphism: {}", yes(i0 == i1));
            Ok((Status::Holds, out))
        }
        Command::Pushout { x, a, b, f0, f1 } => {
            let (x, a, b) = (Arc::new(load_frame(x)?), Arc::new(load_frame(a)?), Arc::new(load_frame(b)?));
            let span = Span::new(load_morphism(&x, &a, f0)?, load_morphism(&x, &b, f1)?)?;
            let p = pushout(&span)?;
            frame_block(&mut out, "pushout", &p.frame, cli.dot);
            let _ = writeln!(out, "i0: {}\ni1: {}", show_map(&p.i0), show_map(&p.i1));
            Ok((Status::Holds, out))
        }
        Command::Pullback(c) => {
            let cospan = load_cospan(c)?;
            let (p, p0, p1) = dgrph_pullback(&cospan);
            frame_block(&mut out, "pullback in directed graphs", &p, cli.dot);
            let ok = p0.is_ok() && p1.is_ok();
            for (name, leg) in [("p0", &p0), ("p1", &p1)] {
                match leg {
                    Ok(m) => {
                        let _ = writeln!(out, "{name}: {}", show_map(m));
                    }
                    Err(e) => {
                        let _ = writeln!(out, "{name}: not a p-morphism ({e})");
                    }
                }
            }
            let _ = writeln!(out, "projections are p-morphisms: {}", yes(ok));
            Ok((ok.into(), out))
        }
        Command::Product { f0, f1, depth, logic, until_stable, star_cap } => {
            let (a, b) = (load_frame(f0)?, load_frame(f1)?);
            let pb = ProductBudget { max_candidates: cli.max_maps as usize, star_cap: *star_cap };
            let mut levels;
            let mut note = None;
            if *until_stable {
                let mut d = 1;
                loop {
                    levels = product_levels(&a, &b, d, pb)?;
                    if is_stable(&levels) {
                        let _ = writeln!(out, "stable at depth {d}");
                        break;
                    }
                    if d >= cli.max_depth {
                        note = Some(format!("truncated: not stable by depth {d} (raise --max-depth)"));
                        break;
                    }
                    d += 1;
                }
            } else {
                levels = product_levels(&a, &b, *depth, pb)?;
            }
            if let Some(l) = logic {
                levels = restrict_to_logic(&levels, &parse_logic(l)?)?;
            }
            report_levels(&mut out, &levels, cli.dot);
            if let Some(n) = &note {
                let _ = writeln!(out, "{n}");
            }
            Ok((if note.is_none() { Status::Holds } else { Status::Truncated }, out))
        }
        Command::Mediate { apex, f0, f1, leg0, leg1, star_cap } => {
            let (u, a, b) = (Arc::new(load_frame(apex)?), Arc::new(load_frame(f0)?), Arc::new(load_frame(f1)?));
            let cone = Cone::new(load_morphism(&u, &a, leg0)?, load_morphism(&u, &b, leg1)?)?;
            let depth = u.frame_depth()?;
            let pb = ProductBudget { max_candidates: cli.max_maps as usize, star_cap: *star_cap };
            let levels = product_levels(&a, &b, depth, pb)?;
            let m = mediate(&cone, &levels)?;
            let top = levels.last().expect("at least one level");
            let _ = writeln!(out, "levels built to depth {depth} ({} worlds)", top.size());
            let _ = writeln!(out, "mediator: {}", show_map(&m));
            for w in u.worlds() {
                let (x, y) = top.pair(m.apply(w));
                let _ = writeln!(out, "  {w} -> {} = ({x}, {y})", m.apply(w));
            }
            Ok((Status::Holds, out))
        }
        Command::Subreduce { w, v } => {
            let (w, v) = (load_frame(w)?, load_frame(v)?);
            match subreduces(&w, &v, budget)? {
                Some((set, f)) => {
                    let _ = writeln!(out, "subreduces: yes\nsubframe: {:?}\nmap: {}", set.to_vec(), show_map(&f));
                    Ok((Status::Holds, out))
                }
                None => {
                    let _ = writeln!(out, "subreduces: no");
                    Ok((Status::Fails, out))
                }
            }
        }
        Command::Coamalgamate { cospan, logic, strategy } => {
            let c = load_cospan(cospan)?;
            let l = parse_logic(logic)?;
            let found: Option<Coamalgamation> = match strategy {
                Strategy::Auto => coamalgamate(&c, &l, cli.max_size, budget)?,
                Strategy::Horn => coamalgamate_horn(&c, &l)?,
                Strategy::Chain => Some(coamalgamate_chain(&c.f0, &c.f1)?),
                Strategy::Reflect => coamalgamate_reflect(&c, &l, budget)?,
                Strategy::Bruteforce => coamalgamate_bruteforce(&c, &l, cli.max_size, budget)?,
            };
            match found {
                Some(s) => {
                    s.validate(&c, &l)?;
                    let _ = writeln!(out, "route: {}", s.route);
                    frame_block(&mut out, "apex", &s.apex, cli.dot);
                    let _ = writeln!(out, "g0: {}\ng1: {}", show_map(&s.g0), show_map(&s.g1));
                    Ok((Status::Holds, out))
                }
                None => {
                    let _ = writeln!(out, "no coamalgamation found with apex size at most {}", cli.max_size);
                    Ok((Status::Fails, out))
                }
            }
        }
        Command::Audit { logic, bound } => {
            let l = parse_logic(logic)?;
            let r = audit_amalgamability(&l, *bound, budget)?;
            let _ = writeln!(out, "{l}, bound {bound}: {r}");
            for c in &r.failures {
                let _ = writeln!(
                    out,
                    "unsolved: f0 = {} into {} worlds from {} worlds; f1 = {} from {} worlds",
                    show_map(&c.f0),
                    c.f0.cod().size(),
                    c.f0.dom().size(),
                    show_map(&c.f1),
                    c.f1.dom().size()
                );
            }
            if !r.over_budget.is_empty() {
                return Err(Failure::Budget(format!("{} cospans ran out of budget", r.over_budget.len())));
            }
            Ok((r.passed().into(), out))
        }
        Command::Witness(w) => witness(w, cli.dot),
        Command::Presheaf { command: PresheafCommand::Verify { category, logic, bound, presheaf_bound, strict } } => {
            let cat = FinCategory::builtin(category)?;
            let l = parse_logic(logic)?;
            let r = verify_equivalence(&cat, &l, *bound, *presheaf_bound, *strict, budget)?;
            let _ = writeln!(out, "{r}");
            Ok((r.passed().into(), out))
        }
        Command::Classify { logic } => {
            let l = parse_logic(logic)?;
            let (reg, ex) = (regular_entry(&l)?, exact_entry(&l)?);
            let _ = writeln!(out, "{}", classify_line(reg.is_some(), ex.is_some()));
            let _ = writeln!(out, "normal form: {}", l.normalize()?);
            if let Some(e) = reg {
                let _ = writeln!(out, "regular catalog: {}", e.label);
            }
            if let Some(e) = ex {
                let _ = writeln!(out, "exact catalog: {}", e.label);
            }
            Ok((Status::Holds, out))
        }
    }
}

pub fn classify_line(regular: bool, exact: bool) -> String {
    format!("regular: {}; barr-exact: {}", yes(regular), yes(exact))
}

fn load_pair(p: &PairArgs) -> std::result::Result<ParallelPair, Failure> {
    let (d, c) = (Arc::new(load_frame(&p.dom)?), Arc::new(load_frame(&p.cod)?));
    Ok(ParallelPair::new(load_morphism(&d, &c, &p.f)?, load_morphism(&d, &c, &p.g)?)?)
}

fn load_cospan(c: &CospanArgs) -> std::result::Result<Cospan, Failure> {
    let (a, b, v) = (Arc::new(load_frame(&c.a)?), Arc::new(load_frame(&c.b)?), Arc::new(load_frame(&c.c)?));
    Ok(Cospan::new(load_morphism(&a, &v, &c.f0)?, load_morphism(&b, &v, &c.f1)?)?)
}

fn report_levels(out: &mut String, levels: &[ProductLevel], with_dot: bool) {
    for level in levels {
        let _ = writeln!(out, "level {}: {} worlds ({} fresh)", level.n, level.size(), level.fresh_count());
    }
    if let Some(top) = levels.last() {
        frame_block(out, "top level", &top.frame, with_dot);
        let pairs: Vec<String> = top.frame.worlds().map(|w| format!("{:?}", top.pair(w))).collect();
        let _ = writeln!(out, "pairs: {}", pairs.join(" "));
    }
}

fn parse_selection(base: &Frame, text: &str) -> std::result::Result<PairSelection, Failure> {
    match text {
        "full" => Ok(PairSelection::full(base.clone())),
        "diagonal" => Ok(PairSelection::diagonal(base.clone())),
        _ => {
            let Some(perms) = text.strip_prefix("perm:") else {
                return Err(Failure::Input(format!("unknown selection `{text}`")));
            };
            let gens = perms.split(';').map(parse_map).collect::<std::result::Result<Vec<_>, _>>()?;
            for g in &gens {
                let mut sorted = g.clone();
                sorted.sort_unstable();
                if sorted != (0..base.size()).collect::<Vec<_>>() {
                    return Err(Failure::Input(format!("`{}` is not a permutation of the worlds", perms)));
                }
            }
            Ok(PairSelection::from_permutations(base.clone(), &gens))
        }
    }
}

fn witness(w: &WitnessArgs, with_dot: bool) -> Outcome {
    let mut out = String::new();
    let (g0, g1, sel) = match (&w.fixture, &w.input) {
        (Some(name), None) => {
            let fx = fixture_by_name(name)?;
            let _ = writeln!(out, "fixture {name}");
            (fx.g0, fx.g1, fx.selection)
        }
        (None, Some(files)) => {
            let (u, v) = (Arc::new(load_frame(&files[0])?), Arc::new(load_frame(&files[1])?));
            let need = |m: &Option<String>| m.clone().ok_or_else(|| Failure::Input("--input needs --g0 and --g1".into()));
            let g0 = load_morphism(&u, &v, &need(&w.g0)?)?;
            let g1 = load_morphism(&u, &v, &need(&w.g1)?)?;
            let sel = parse_selection(&v, &w.selection)?;
            (g0, g1, sel)
        }
        _ => {
            return Err(Failure::Input(format!("give --fixture ({}) or --input", FIXTURE_NAMES.join(", "))));
        }
    };
    if let Some(v) = sel.violation() {
        return Err(Failure::Input(format!("the pair selection is not valid: {v}")));
    }
    let r = non_effectiveness_witness(&g0, &g1, &sel)?;
    let _ = writeln!(out, "U_A: {:?}", r.u_a.to_vec());
    match r.outside {
        Some(x) => {
            let _ = writeln!(out, "outside U_A: {x}");
        }
        None => {
            let _ = writeln!(out, "outside U_A: none");
        }
    }
    frame_block(&mut out, "quotient", r.f_a.cod(), with_dot);
    let _ = writeln!(out, "f_A: {}", show_map(&r.f_a));
    let _ = writeln!(out, "f_A g0 = f_A g1: {}", yes(r.coequalizer_merges));
    let _ = writeln!(out, "verdict: {}", r.verdict);
    Ok((r.verdict.into(), out))
}
