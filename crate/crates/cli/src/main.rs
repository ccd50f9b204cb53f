//! Command-line front end: builds rings into a persistent registry and runs
//! the filtration, invariant, Euler-characteristic and identity checks on
//! them. Lines starting with '#' are prose; all other output lines are
//! structured (comma-separated) and stable.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tautrings::bps::{self, QSeries};
use tautrings::descendent::{DescCtx, ToppType};
use tautrings::filt::{
    compare_pt, gv_extract, gvpt_rhs, maulik_toda, omega, parse_pt_file,
    pc_check, perverse_filtration, stacky_perverse_numbers, vanishing_window_check, OmegaTable,
};
use tautrings::hrr::euler_characteristic;
use tautrings::pipeline::{
    build_ring, registry_load, registry_save, trim, BuildOptions, Kind, Registry,
};
use tautrings::rat::Rat;
use tautrings::relations::{falling_factorial_identity, quadratic_identity_check};
use tautrings::virasoro::Virasoro;

#[derive(Parser)]
#[command(name = "tautrings", version, about = "tautological rings of one-dimensional sheaves on the plane")]
struct Cli {
    /// Registry file to load before and save after ring-building commands.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RingArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    chi: i64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build one ring presentation and report its Hilbert data.
    Build {
        #[command(flatten)]
        ring: RingArgs,
        /// "stack" or "space".
        #[arg(long, default_value = "space")]
        kind: String,
        #[arg(long)]
        dmax: u32,
        /// Close with L_n instead of R_n.
        #[arg(long)]
        use_ln: bool,
        /// Also report the trimmed minimal presentation.
        #[arg(long)]
        trim: bool,
    },
    /// Stack Poincare series from BPS integrality plus its structural form.
    Bps {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        dmax: u32,
    },
    /// Perverse and Chern filtrations of a space ring and the P=C check.
    Pc {
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Omega tables, refined invariants and their genus-0 specialization.
    Gv {
        #[arg(long)]
        dmax: u32,
    },
    /// The pairs side of the GV/PT identity, optionally diffed against data.
    Gvpt {
        #[arg(long)]
        dmax: u32,
        #[arg(long)]
        pt_file: Option<PathBuf>,
    },
    /// Euler characteristics of multiples of the hyperplane class.
    Euler {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, default_value_t = 8)]
        mmax: i64,
    },
    /// Quadratic operator identity and the falling-factorial lemma.
    VerifyAppendix {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 4)]
        dmax: u32,
    },
    /// Load a registry file and re-verify every stored rank.
    RegistryVerify,
}

struct Report {
    lines: Vec<String>,
    failed: bool,
}

impl Report {
    fn new() -> Self {
        Report { lines: Vec::new(), failed: false }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.lines.push(format!("# {}", s.into()));
    }

    fn row(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn check(&mut self, ok: bool, what: &str) {
        self.row(format!("check,{},{}", what, if ok { "pass" } else { "fail" }));
        if !ok {
            self.failed = true;
        }
    }
}

fn load_registry(path: &Option<PathBuf>) -> tautrings::Result<Registry> {
    match path {
        Some(p) if p.exists() => registry_load(p),
        _ => Ok(Registry::new()),
    }
}

fn save_registry(reg: &Registry, path: &Option<PathBuf>) -> tautrings::Result<()> {
    if let Some(p) = path {
        registry_save(reg, p)?;
    }
    Ok(())
}

fn ensure_space(reg: &mut Registry, d: u32, chi: i64) -> tautrings::Result<()> {
    let alpha = ToppType::new(d, chi);
    reg.ensure_space(alpha, d * d + 1)
}

fn omegas_to(reg: &mut Registry, dmax: u32) -> tautrings::Result<Vec<OmegaTable>> {
    let mut out = Vec::new();
    for d in 1..=dmax {
        ensure_space(reg, d, 1)?;
        let pres = reg.get(d, 1, Kind::Space).unwrap();
        let perv = perverse_filtration(pres)?;
        out.push(omega(d, &perv)?);
    }
    Ok(out)
}

fn filtration_rows(rep: &mut Report, name: &str, table: &tautrings::filt::FiltrationTable) {
    for (&(k, m), &v) in &table.entries {
        rep.row(format!("{name},{k},{m},{v}"));
    }
}

fn run(cli: Cli) -> tautrings::Result<Report> {
    let mut rep = Report::new();
    let degree_of = |cmd: &Cmd| match cmd {
        Cmd::Build { ring, .. } | Cmd::Pc { ring } | Cmd::Euler { ring, .. } => Some(ring.d),
        Cmd::Bps { d, .. } => Some(*d),
        Cmd::Gv { dmax } | Cmd::Gvpt { dmax, .. } => Some(*dmax),
        _ => None,
    };
    if degree_of(&cli.cmd) == Some(0) {
        return Err(tautrings::Error::Parse("the degree d must be at least 1".into()));
    }
    match cli.cmd {
        Cmd::Build { ring, kind, dmax, use_ln, trim: do_trim } => {
            let kind = Kind::parse(&kind)?;
            let mut reg = load_registry(&cli.registry)?;
            let opts = BuildOptions { use_ln, ..BuildOptions::default() };
            let alpha = ToppType::new(ring.d, ring.chi);
            let pres = build_ring(&mut reg, alpha, kind, dmax, &opts)?;
            rep.note(format!(
                "{} ({},{}) built to degree {dmax}",
                kind.as_str(),
                ring.d,
                ring.chi
            ));
            let h: Vec<String> = pres.hilbert().iter().map(|x| x.to_string()).collect();
            rep.row(format!("hilbert,{}", h.join(",")));
            for (event, hilb) in &pres.trace {
                let hs: Vec<String> = hilb.iter().map(|x| x.to_string()).collect();
                rep.row(format!("trace,{event},{}", hs.join(",")));
            }
            if let Some(stuck) = &pres.stuck {
                rep.note(format!("build stuck in degree {}", stuck.degree));
                for (family, yield_count) in &stuck.evidence {
                    rep.row(format!("stuck,{family},{yield_count}"));
                }
            }
            rep.check(pres.complete, "complete");
            if do_trim {
                let t = trim(&pres)?;
                rep.row(format!("trim_generators,{}", t.generators.join(",")));
                let ds: Vec<String> =
                    t.relation_degrees.iter().map(|x| x.to_string()).collect();
                rep.row(format!("trim_relation_degrees,{}", ds.join(",")));
            }
            reg.insert(pres);
            save_registry(&reg, &cli.registry)?;
        }
        Cmd::Bps { d, dmax } => {
            let mut reg = load_registry(&cli.registry)?;
            let series = tautrings::pipeline::stack_target(&mut reg, ToppType::new(d, 0), dmax)?;
            let ss: Vec<String> = series.iter().map(|x| x.to_string()).collect();
            rep.row(format!("stack_series,{}", ss.join(",")));
            let m = ToppType::new(d, 0).multiplicity();
            let need = d * d + m * (m + 1) / 2;
            if dmax >= need {
                let ints: Vec<i64> = series.iter().map(|&x| x as i64).collect();
                let q = QSeries::from_ints(&ints, 2 * dmax as i64);
                let a = bps::structural_decompose(&q, d, m)?;
                let as_: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                rep.row(format!("structural_numerator,{}", as_.join(",")));
            } else {
                rep.note(format!(
                    "structural form needs dmax >= {need}; skipped at {dmax}"
                ));
            }
            save_registry(&reg, &cli.registry)?;
        }
        Cmd::Pc { ring } => {
            let mut reg = load_registry(&cli.registry)?;
            ensure_space(&mut reg, ring.d, ring.chi)?;
            let pres = reg.get(ring.d, ring.chi, Kind::Space).unwrap().clone();
            let r = pc_check(&pres, true)?;
            filtration_rows(&mut rep, "perverse", &r.perverse);
            filtration_rows(&mut rep, "chern", &r.chern);
            rep.check(r.pass && r.subspace_level, "p_equals_c");
            rep.check(vanishing_window_check(&pres, 2)?, "vanishing_window");
            save_registry(&reg, &cli.registry)?;
        }
        Cmd::Gv { dmax } => {
            let mut reg = load_registry(&cli.registry)?;
            let omegas = omegas_to(&mut reg, dmax)?;
            for (i, om) in omegas.iter().enumerate() {
                let d = i as u32 + 1;
                for (&(qe, te), &c) in &om.terms {
                    rep.row(format!("omega,{d},{qe},{te},{c}"));
                }
                rep.check(om.symmetric(), &format!("omega_{d}_symmetry"));
                let gv = gv_extract(om)?;
                for (&(jl2, jr2), &n) in &gv.entries {
                    rep.row(format!("refined,{d},{jl2},{jr2},{n}"));
                }
                for (k, n) in maulik_toda(om)? {
                    rep.row(format!("genus,{d},{k},{n}"));
                }
            }
            save_registry(&reg, &cli.registry)?;
        }
        Cmd::Gvpt { dmax, pt_file } => {
            let mut reg = load_registry(&cli.registry)?;
            let omegas = omegas_to(&mut reg, dmax)?;
            let data = match &pt_file {
                Some(p) => Some(parse_pt_file(&std::fs::read_to_string(p)?)?),
                None => None,
            };
            let qwin = data
                .as_ref()
                .and_then(|d| d.keys().map(|&(_, n)| n).max())
                .unwrap_or(10)
                .max(4);
            let rhs = gvpt_rhs(&omegas, dmax, qwin)?;
            for (dq, poly) in rhs.iter().enumerate() {
                for ((qe, te), c) in poly {
                    rep.row(format!("pairs,{dq},{qe},{te},{c}"));
                }
            }
            if let Some(data) = &data {
                match compare_pt(&rhs, data, qwin) {
                    None => rep.check(true, "matches_pt_data"),
                    Some((d, n)) => {
                        rep.note(format!("first mismatch at Q^{d} q^{n}"));
                        rep.check(false, "matches_pt_data");
                    }
                }
            }
            // the stacky perverse numbers from the same tables must be
            // nonnegative integers; print them for the top degree
            let stacky = stacky_perverse_numbers(&omegas, dmax, qwin.max(16))?;
            filtration_rows(&mut rep, "stacky", &stacky);
            save_registry(&reg, &cli.registry)?;
        }
        Cmd::Euler { ring, mmax } => {
            let mut reg = load_registry(&cli.registry)?;
            ensure_space(&mut reg, ring.d, ring.chi)?;
            let pres = reg.get(ring.d, ring.chi, Kind::Space).unwrap().clone();
            let mut all_int = true;
            for m in 0..=mmax {
                let chi_m = euler_characteristic(&pres, m)?;
                all_int &= chi_m.is_integer();
                rep.row(format!("euler,{},{},{m},{chi_m}", ring.d, ring.chi));
            }
            rep.check(all_int, "integral");
            save_registry(&reg, &cli.registry)?;
        }
        Cmd::VerifyAppendix { n, dmax } => {
            for (d, chi) in [(2u32, 1i64), (3, 1)] {
                // the check composes two operators, so intermediate degrees
                // reach dmax + 2n + 1
                let vl = Virasoro::new(DescCtx::new(ToppType::new(d, chi), dmax + 2 * n + 2, false));
                let vr = Virasoro::new(DescCtx::new(ToppType::new(1, 0), dmax + 2 * n + 2, false));
                for k in 0..=n {
                    let residual = quadratic_identity_check(&vl, &vr, k, dmax)?;
                    rep.check(
                        residual.is_zero(),
                        &format!("quadratic_identity_n{k}_{d}_{chi}"),
                    );
                }
            }
            let mut ok = true;
            let mut a = Rat::from_integer(3.into()) / Rat::from_integer(7.into());
            for i in 0..200u32 {
                let b = Rat::from_integer((i as i64 - 100).into())
                    / Rat::from_integer((1 + i as i64 % 7).into());
                for m in 0..=10u32 {
                    ok &= falling_factorial_identity(&a, &b, m);
                }
                a += Rat::from_integer(5.into()) / Rat::from_integer(9.into());
            }
            rep.check(ok, "falling_factorial_identity");
        }
        Cmd::RegistryVerify => {
            let Some(path) = &cli.registry else {
                return Err(tautrings::Error::Registry(
                    "registry-verify needs --registry".into(),
                ));
            };
            let reg = registry_load(path)?;
            for (d, chi, kind) in reg.keys() {
                let pres = reg.get(*d, *chi, *kind).unwrap();
                rep.row(format!(
                    "ring,{d},{chi},{},{},{}",
                    kind.as_str(),
                    u8::from(pres.complete),
                    u8::from(pres.gorenstein)
                ));
            }
            rep.note(format!("{} rings verified", reg.keys().count()));
            rep.check(true, "registry_ranks");
        }
    }
    Ok(rep)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(rep) => {
            let text = rep.lines.join("\n") + "\n";
            if let Some(p) = out {
                if let Err(e) = std::fs::write(&p, &text) {
                    eprintln!("cannot write {}: {e}", p.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            if rep.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                tautrings::Error::Parse(_) | tautrings::Error::Registry(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
