//! End-to-end acceptance suite. Each numbered check prints one PASS/FAIL
//! line; the test fails if any gating check fails. Rings are built once in a
//! shared registry and reused across checks.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tautrings::bps::{self, QSeries};
use tautrings::descendent::{DescCtx, ToppType};
use tautrings::filt::{
    chern_filtration, gv_extract, gv_reconstruct, gvpt_rhs, maulik_toda, omega, pc_check,
    perverse_filtration, stacky_perverse_numbers, vanishing_window_check, OmegaTable, QtPoly,
};
use tautrings::hrr::{euler_characteristic, normalize_integral};
use tautrings::linalg::GradedIdeal;
use tautrings::pipeline::{
    build_ring, minimal_generators, trim, BuildOptions, Kind, Registry, RingPresentation,
};
use tautrings::poly::monomials_of_degree;
use tautrings::rat::rat;
use tautrings::relations::{
    base_relations, falling_factorial_identity, gmr_relations, mumford_relations, primitive_br,
    primitive_gmr, primitive_mr, quadratic_identity_check, Sign,
};
use tautrings::virasoro::Virasoro;
use tautrings::{Polynomial, Rat};

const E20: [u64; 15] = [1, 2, 5, 8, 14, 18, 24, 27, 33, 36, 42, 45, 51, 54, 60];
const E30: [u64; 13] = [1, 3, 7, 13, 22, 35, 55, 79, 111, 147, 186, 228, 277];

struct Suite {
    reg: Registry,
    m32: Option<RingPresentation>,
    results: Vec<(u32, &'static str, Result<(), String>)>,
}

fn fail(msg: impl Into<String>) -> Result<(), String> {
    Err(msg.into())
}

fn err_str(e: tautrings::Error) -> String {
    e.to_string()
}

/// Pool all Mumford twists of one type into a graded ideal.
fn mr_pool(ctx: &DescCtx, dtarget: u32) -> Result<GradedIdeal, String> {
    let mut ideal = GradedIdeal::new(&ctx.table, dtarget);
    let d = ctx.alpha.d as i64;
    let g = ctx.alpha.g() as i64;
    for sign in [Sign::Plus, Sign::Minus] {
        let base = match sign {
            Sign::Plus => ctx.alpha.chi,
            Sign::Minus => -ctx.alpha.chi,
        };
        for k in -(2 * dtarget as i64)..=(2 * dtarget as i64) {
            let chi_t = base + k * d;
            if chi_t < g || chi_t >= dtarget as i64 {
                continue;
            }
            let batch = mumford_relations(ctx, sign, k, dtarget).map_err(err_str)?;
            ideal.add_generators(&batch.relations).map_err(err_str)?;
        }
    }
    Ok(ideal)
}

/// Smallest ideal containing `seeds` and closed under R_n, degreewise to dmax.
fn virasoro_closure_ideal(
    v: &Virasoro,
    seeds: &[Polynomial],
    dmax: u32,
) -> Result<GradedIdeal, String> {
    let mut ideal = GradedIdeal::new(&v.ctx.table, dmax);
    ideal.add_generators(seeds).map_err(err_str)?;
    let mut frontier: Vec<Polynomial> = seeds.to_vec();
    while !frontier.is_empty() {
        let new = v.closure(&frontier, &ideal, dmax, false).map_err(err_str)?;
        ideal.add_generators(&new).map_err(err_str)?;
        frontier = new;
    }
    Ok(ideal)
}

fn same_slices(a: &GradedIdeal, b: &GradedIdeal, dmax: u32, what: &str) -> Result<(), String> {
    for deg in 0..=dmax {
        if a.rank(deg) != b.rank(deg) {
            return fail(format!(
                "{what}: rank {} vs {} in degree {deg}",
                a.rank(deg),
                b.rank(deg)
            ));
        }
        for g in a.slice(deg) {
            if !b.contains(g).map_err(err_str)? {
                return fail(format!("{what}: slice mismatch in degree {deg}"));
            }
        }
    }
    Ok(())
}

fn random_homogeneous(ctx: &DescCtx, deg: u32, rng: &mut StdRng) -> Polynomial {
    let mut p = Polynomial::zero(&ctx.table);
    for m in monomials_of_degree(&ctx.table, deg) {
        let c: i64 = rng.gen_range(-3..=3);
        if c != 0 {
            p.add_term(m, rat(c));
        }
    }
    p
}

fn binom(n: u64, k: u64) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

impl Suite {
    fn space(&self, d: u32, chi: i64) -> &RingPresentation {
        self.reg.get(d, chi, Kind::Space).expect("space ring built")
    }

    fn stack(&self, d: u32, chi: i64) -> &RingPresentation {
        self.reg.get(d, chi, Kind::Stack).expect("stack ring built")
    }

    fn build_all(&mut self) -> Result<(), String> {
        let opts = BuildOptions::default();
        for (d, chi, kind, dmax) in [
            (1u32, 0i64, Kind::Space, 4u32),
            (2, 1, Kind::Space, 5),
            (3, 1, Kind::Space, 10),
            (1, 0, Kind::Stack, 6),
            (2, 0, Kind::Stack, 14),
            (3, 0, Kind::Stack, 12),
        ] {
            let pres = build_ring(&mut self.reg, ToppType::new(d, chi), kind, dmax, &opts)
                .map_err(err_str)?;
            if !pres.complete {
                return fail(format!("({d},{chi}) {} did not complete", kind.as_str()));
            }
            self.reg.insert(pres);
        }
        // chi = 2 is built geometrically, not transported, so the
        // chi-independence comparison below is a real check
        let mut side = Registry::new();
        let m32 =
            build_ring(&mut side, ToppType::new(3, 2), Kind::Space, 10, &opts).map_err(err_str)?;
        if !m32.complete {
            return fail("(3,2) space did not complete");
        }
        self.m32 = Some(m32);
        Ok(())
    }

    fn c1(&mut self) -> Result<(), String> {
        let pres = self.space(1, 0);
        if pres.hilbert() != vec![1, 1, 1, 0, 0] {
            return fail(format!("M(1,0) Hilbert {:?}", pres.hilbert()));
        }
        // one generator with a single cubic relation: Q[c]/c^3
        let t = trim(pres).map_err(err_str)?;
        if t.generators.len() != 1 || t.relation_degrees != vec![3] {
            return fail(format!("M(1,0) trim {:?} / {:?}", t.generators, t.relation_degrees));
        }
        // and c0(2) alone already generates: its powers span every degree
        let xi = Polynomial::var_by_label(&pres.ideal.table, "c0(2)").unwrap();
        for k in 0..=2u32 {
            let nf = pres.ideal.normal_form(&xi.pow(k)).map_err(err_str)?;
            if nf.is_zero() {
                return fail(format!("c0(2)^{k} vanishes in M(1,0)"));
            }
        }
        if !pres.ideal.contains(&xi.pow(3)).map_err(err_str)? {
            return fail("c0(2)^3 nonzero in M(1,0)");
        }
        // Mumford relations alone already force the cube of the hyperplane
        // class to vanish
        let ctx = DescCtx::new(ToppType::new(1, 0), 3, true);
        let ideal = mr_pool(&ctx, 3)?;
        if ideal.hilbert() != vec![1, 1, 1, 0] {
            return fail(format!("MR-only M(1,0) Hilbert {:?}", ideal.hilbert()));
        }
        let h3 = Polynomial::parse(&ctx.table, "c0(2)^3").map_err(err_str)?;
        if !ideal.contains(&h3).map_err(err_str)? {
            return fail("c0(2)^3 not in the MR-only ideal");
        }
        Ok(())
    }

    fn c2(&mut self) -> Result<(), String> {
        let pres = self.stack(2, 0);
        let h = pres.hilbert();
        if h[..15] != E20.map(|x| x as usize)[..] {
            return fail(format!("stack (2,0) series {:?}", &h[..15]));
        }
        // trace[0] is the free series before any relation
        if pres.trace.len() < 3 {
            return fail("stack (2,0) trace too short");
        }
        if pres.trace[1].1[..7] != [1, 2, 6, 10, 20, 30, 50] {
            return fail(format!("after first relation: {:?}", &pres.trace[1].1[..7]));
        }
        if pres.trace[2].1[..7] != [1, 2, 5, 8, 14, 20, 30] {
            return fail(format!("after second relation: {:?}", &pres.trace[2].1[..7]));
        }
        // the printed six relations generate the same ideal slices
        let gt = &pres.rewrite.gen_table;
        let r1 = Polynomial::parse(gt, "c2(0) - 1/8*c0(2)").map_err(err_str)?;
        let r2 = Polynomial::parse(gt, "-1/4*c1(2) + 2*c3(0)").map_err(err_str)?;
        let r3 = Polynomial::parse(gt, "c1(1)*c2(0)^4 - 2*c2(0)^3*c3(0)").map_err(err_str)?;
        let r4 = Polynomial::parse(
            gt,
            "c1(1)^2*c2(0)^3 + 16*c2(0)^5 + 2*c2(0)^3*c2(1) - 6*c1(1)*c2(0)^2*c3(0) + 6*c2(0)*c3(0)^2",
        )
        .map_err(err_str)?;
        let vira = Virasoro::new(pres.rewrite.ctx.clone());
        let lift = |p: &Polynomial| p.map_table(&pres.rewrite.ctx.table).map_err(err_str);
        let r5 = pres
            .rewrite
            .reduce(&vira.apply_ln(1, &lift(&r3)?).map_err(err_str)?)
            .map_err(err_str)?;
        let r6 = pres
            .rewrite
            .reduce(&vira.apply_ln(1, &lift(&r4)?).map_err(err_str)?)
            .map_err(err_str)?;
        let mut printed = GradedIdeal::new(gt, 7);
        printed.add_generators(&[r1, r2, r3, r4, r5, r6]).map_err(err_str)?;
        for deg in 0..=7u32 {
            if printed.rank(deg) != pres.ideal.rank(deg) {
                return fail(format!("printed ideal rank differs in degree {deg}"));
            }
            for g in printed.slice(deg) {
                if !pres.ideal.contains(g).map_err(err_str)? {
                    return fail(format!("printed relation escapes the ideal in degree {deg}"));
                }
            }
        }
        let t = trim(pres).map_err(err_str)?;
        if t.generators.len() != 4 || t.relation_degrees != vec![5, 5, 6, 6] {
            return fail(format!(
                "trim: {} generators, relation q-degrees {:?}",
                t.generators.len(),
                t.relation_degrees
            ));
        }
        Ok(())
    }

    fn c3(&mut self) -> Result<(), String> {
        let pres = self.stack(3, 0);
        let h = pres.hilbert();
        if h[..13] != E30.map(|x| x as usize)[..] {
            return fail(format!("stack (3,0) series {:?}", &h[..13]));
        }
        let t = trim(pres).map_err(err_str)?;
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for &deg in &t.relation_degrees {
            *counts.entry(deg).or_default() += 1;
        }
        let want: BTreeMap<u32, usize> =
            [(2, 1), (3, 2), (4, 2), (7, 2), (8, 3), (9, 4), (10, 2)].into_iter().collect();
        if t.generators.len() != 7 || counts != want {
            return fail(format!(
                "trim: {} generators, relation degree counts {:?}",
                t.generators.len(),
                counts
            ));
        }
        Ok(())
    }

    fn c5(&mut self) -> Result<(), String> {
        let s20 = tautrings::pipeline::stack_target(&mut self.reg, ToppType::new(2, 0), 14)
            .map_err(err_str)?;
        if s20[..15] != E20 {
            return fail(format!("BPS series for (2,0): {:?}", &s20[..15]));
        }
        let s30 = tautrings::pipeline::stack_target(&mut self.reg, ToppType::new(3, 0), 16)
            .map_err(err_str)?;
        if s30[..5] != E30[..5] {
            return fail(format!("BPS series for (3,0): {:?}", &s30[..5]));
        }
        for (d, m, dmax) in [(1u32, 1u32, 8u32), (2, 2, 14), (3, 3, 16)] {
            let e = tautrings::pipeline::stack_target(&mut self.reg, ToppType::new(d, 0), dmax)
                .map_err(err_str)?;
            let ints: Vec<i64> = e.iter().map(|&x| x as i64).collect();
            let series = QSeries::from_ints(&ints, 2 * dmax as i64);
            let a = bps::structural_decompose(&series, d, m).map_err(err_str)?;
            let n_deg = (d * d + m * (m + 1) / 2) as usize;
            let lead = if m % 2 == 1 { 1 } else { -1 };
            if a.len() != n_deg + 1 || a[0] != 1 || a[n_deg] != lead {
                return fail(format!("structural form for ({d},{m}): {a:?}"));
            }
        }
        Ok(())
    }

    fn c6(&mut self) -> Result<(), String> {
        let keys: Vec<(u32, i64, Kind)> = self.reg.keys().copied().collect();
        for (d, chi, kind) in keys {
            let pres = self.reg.get(d, chi, kind).unwrap();
            if !pres.complete {
                continue;
            }
            match kind {
                Kind::Stack => {
                    if !tautrings::pipeline::free_window_ok(pres) {
                        return fail(format!("stack ({d},{chi}) not free through degree d-2"));
                    }
                }
                Kind::Space => {
                    // minimal relations only start in degree d
                    let t = trim(pres).map_err(err_str)?;
                    if let Some(&min) = t.relation_degrees.iter().min() {
                        if min < d {
                            return fail(format!(
                                "space ({d},{chi}) has a minimal relation in degree {min}"
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn c7(&mut self) -> Result<(), String> {
        // bracket identity on random homogeneous inputs
        let ctx = DescCtx::new(ToppType::new(3, 1), 8, false);
        let v = Virasoro::new(ctx.clone());
        let mut rng = StdRng::seed_from_u64(42);
        let mut cases = 0;
        while cases < 110 {
            let n = rng.gen_range(-1..=3i64);
            let m = rng.gen_range(-1..=3i64);
            if n == m || n + m < -1 {
                continue;
            }
            let p = random_homogeneous(&ctx, rng.gen_range(1..=3u32), &mut rng);
            if p.is_zero() {
                continue;
            }
            let lhs = v
                .apply_rn(n, &v.apply_rn(m, &p).map_err(err_str)?)
                .map_err(err_str)?
                .sub(&v.apply_rn(m, &v.apply_rn(n, &p).map_err(err_str)?).map_err(err_str)?);
            let rhs = v.apply_rn(n + m, &p).map_err(err_str)?.scale(&rat(m - n));
            if lhs != rhs {
                return fail(format!("[R_{n}, R_{m}] failed on a random input"));
            }
            cases += 1;
        }

        // ideal preservation on every completed ring
        let keys: Vec<(u32, i64, Kind)> = self.reg.keys().copied().collect();
        for (d, chi, kind) in keys {
            let pres = self.reg.get(d, chi, kind).unwrap().clone();
            if !pres.complete {
                continue;
            }
            let vira = Virasoro::new(pres.rewrite.ctx.clone());
            let gens = minimal_generators(&pres.ideal).map_err(err_str)?;
            for g in &gens {
                let lifted = g.map_table(&pres.rewrite.ctx.table).map_err(err_str)?;
                for n in 1..=3u32 {
                    if g.homogeneous_degree().unwrap_or(0) + n > pres.dmax {
                        continue;
                    }
                    let img = match kind {
                        Kind::Stack => vira.apply_rn(n as i64, &lifted).map_err(err_str)?,
                        Kind::Space => vira.apply_rn_delta(n, &lifted).map_err(err_str)?,
                    };
                    let red = pres.rewrite.reduce(&img).map_err(err_str)?;
                    if !pres.ideal.contains(&red).map_err(err_str)? {
                        return fail(format!(
                            "R_{n} escapes the ideal of ({d},{chi}) {}",
                            kind.as_str()
                        ));
                    }
                }
            }
        }

        // MR recursion instances: R_n of a Mumford relation stays in the
        // pooled Mumford ideal
        // the GMR sweep realizes left classes up to total degree j, so the
        // context is deeper than the ideal it feeds
        let ctx20 = DescCtx::new(ToppType::new(2, 0), 9, false);
        let v20 = Virasoro::new(ctx20.clone());
        let mr_ideal = mr_pool(&ctx20, 7)?;
        let seed = mumford_relations(&ctx20, Sign::Plus, 0, 5).map_err(err_str)?;
        for r in &seed.relations {
            for n in 1..=2i64 {
                if r.homogeneous_degree().unwrap_or(0) + n as u32 > 7 {
                    continue;
                }
                let img = v20.apply_rn(n, r).map_err(err_str)?;
                if !mr_ideal.contains(&img).map_err(err_str)? {
                    return fail(format!("R_{n} of a Mumford relation escapes the MR ideal"));
                }
            }
        }

        // GMR family closed under R_n; the auxiliary type must sit in the
        // slope window of the target
        let prime = *tautrings::relations::admissible_primes(ToppType::new(2, 0))
            .iter()
            .find(|a| a.d == 1)
            .expect("degree-1 admissible prime");
        let ctx11 = DescCtx::new(prime, 9, true);
        let p2_ideal = mr_pool(&ctx11, 9)?;
        let mut gmr_ideal = GradedIdeal::new(&ctx20.table, 7);
        let mut low = Vec::new();
        for j in 3..=9u32 {
            let batch =
                gmr_relations(&ctx20, &ctx11, &p2_ideal, j, 7).map_err(err_str)?;
            if j <= 5 {
                low.extend(batch.relations.iter().cloned());
            }
            gmr_ideal.add_generators(&batch.relations).map_err(err_str)?;
        }
        for r in &low {
            for n in 1..=2i64 {
                if r.homogeneous_degree().unwrap_or(0) + n as u32 > 7 {
                    continue;
                }
                let img = v20.apply_rn(n, r).map_err(err_str)?;
                if !gmr_ideal.contains(&img).map_err(err_str)? {
                    return fail(format!("R_{n} of a GMR relation escapes the GMR ideal"));
                }
            }
        }

        // primitive closure regenerates the full families (MR, GMR, BR)
        for (d, dmax) in [(1u32, 4u32), (2, 6), (3, 5)] {
            let ctx = DescCtx::new(ToppType::new(d, 0), dmax, false);
            let v = Virasoro::new(ctx.clone());
            let full = mr_pool(&ctx, dmax)?;
            let prim = primitive_mr(&ctx, dmax).map_err(err_str)?;
            let closed = virasoro_closure_ideal(&v, &prim.relations, dmax)?;
            same_slices(&full, &closed, dmax, &format!("MR closure for d={d}"))?;
        }
        {
            let dmax = 6;
            let ctx = DescCtx::new(ToppType::new(2, 0), 8, false);
            let v = Virasoro::new(ctx.clone());
            let mut full = GradedIdeal::new(&ctx.table, dmax);
            for j in 3..=8u32 {
                let batch =
                    gmr_relations(&ctx, &ctx11, &p2_ideal, j, dmax).map_err(err_str)?;
                full.add_generators(&batch.relations).map_err(err_str)?;
            }
            let prim = primitive_gmr(&ctx, &ctx11, &p2_ideal, dmax).map_err(err_str)?;
            let closed = virasoro_closure_ideal(&v, &prim.relations, dmax)?;
            same_slices(&full, &closed, dmax, "GMR closure for (2,0) from (1,1)")?;
        }
        {
            let dmax = 6;
            let ctx = DescCtx::new(ToppType::new(2, 0), dmax, false);
            let v = Virasoro::new(ctx.clone());
            let full_batch = base_relations(&ctx, dmax).map_err(err_str)?;
            let mut full = GradedIdeal::new(&ctx.table, dmax);
            full.add_generators(&full_batch.relations).map_err(err_str)?;
            let prim = primitive_br(&ctx).map_err(err_str)?;
            let closed = virasoro_closure_ideal(&v, &[prim], dmax)?;
            same_slices(&full, &closed, dmax, "BR closure for (2,0)")?;
        }
        Ok(())
    }

    fn c8(&mut self) -> Result<(), String> {
        for (d, chi) in [(2u32, 1i64), (3, 1)] {
            let vl = Virasoro::new(DescCtx::new(ToppType::new(d, chi), 12, false));
            let vr = Virasoro::new(DescCtx::new(ToppType::new(1, 0), 12, false));
            for n in 0..=2u32 {
                let residual = quadratic_identity_check(&vl, &vr, n, 4).map_err(err_str)?;
                if !residual.is_zero() {
                    return fail(format!(
                        "quadratic identity residual nonzero for n={n} over (({d},{chi}),(1,0))"
                    ));
                }
            }
        }
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..200 {
            let a = Rat::new(rng.gen_range(-40..=40).into(), rng.gen_range(1..=9).into());
            let b = Rat::new(rng.gen_range(-40..=40).into(), rng.gen_range(1..=9).into());
            let m = rng.gen_range(0..=10u32);
            if !falling_factorial_identity(&a, &b, m) {
                return fail(format!("falling-factorial identity failed at a={a} b={b} m={m}"));
            }
        }
        Ok(())
    }

    fn c9(&mut self) -> Result<(), String> {
        for (d, chi) in [(1u32, 0i64), (2, 1), (3, 1)] {
            let rep = pc_check(self.space(d, chi), true).map_err(err_str)?;
            if !rep.pass || !rep.subspace_level {
                return fail(format!("P=C fails on M({d},{chi}): {:?}", rep.first_violation));
            }
        }
        let m32 = self.m32.as_ref().unwrap();
        let rep32 = pc_check(m32, true).map_err(err_str)?;
        if !rep32.pass || !rep32.subspace_level {
            return fail(format!("P=C fails on M(3,2): {:?}", rep32.first_violation));
        }
        let ch31 = chern_filtration(self.space(3, 1)).map_err(err_str)?;
        let ch32 = chern_filtration(m32).map_err(err_str)?;
        if ch31.entries != ch32.entries {
            return fail("Chern graded dimensions differ between M(3,1) and M(3,2)");
        }
        for (d, chi) in [(1u32, 0i64), (2, 1), (3, 1)] {
            if !vanishing_window_check(self.space(d, chi), 2).map_err(err_str)? {
                return fail(format!("vanishing window fails on M({d},{chi})"));
            }
        }
        // stacky numerical P=C against the Chern filtration of the stacks
        let omegas = self.omegas()?;
        for (d, qwin) in [(2u32, 16i64), (3, 30)] {
            let stacky = stacky_perverse_numbers(&omegas[..d as usize], d, qwin)
                .map_err(err_str)?;
            let chern = chern_filtration(self.stack(d, 0)).map_err(err_str)?;
            for (&(k, m), &v) in &chern.entries {
                if stacky.dim(k, m) != v {
                    return fail(format!(
                        "stacky perverse number differs from Chern at d={d} k={k} m={m}"
                    ));
                }
            }
        }
        Ok(())
    }

    fn omegas(&self) -> Result<Vec<OmegaTable>, String> {
        let mut out = Vec::new();
        for (d, chi) in [(1u32, 0i64), (2, 1), (3, 1)] {
            let perv = perverse_filtration(self.space(d, chi)).map_err(err_str)?;
            out.push(omega(d, &perv).map_err(err_str)?);
        }
        Ok(out)
    }

    fn c10(&mut self) -> Result<(), String> {
        let omegas = self.omegas()?;
        let om1 = &omegas[0];
        let want1: BTreeMap<(i64, i64), i64> =
            [((0, -2), 1), ((0, 0), 1), ((0, 2), 1)].into_iter().collect();
        if om1.terms != want1 {
            return fail(format!("Omega_1 = {:?}", om1.terms));
        }
        let gv1 = gv_extract(om1).map_err(err_str)?;
        if gv1.entries.len() != 1 || gv1.entries.get(&(0, 2)) != Some(&1) {
            return fail(format!("refined degree-1 invariants {:?}", gv1.entries));
        }
        let mt1 = maulik_toda(om1).map_err(err_str)?;
        if mt1.get(&0) != Some(&3) {
            return fail(format!("n_0 in degree 1 is {:?}", mt1.get(&0)));
        }
        for (d, om) in omegas.iter().enumerate().skip(1) {
            if !om.symmetric() {
                return fail(format!("Omega_{} fails a Lefschetz symmetry", d + 1));
            }
            let gv = gv_extract(om).map_err(err_str)?;
            if gv_reconstruct(&gv).terms != om.terms {
                return fail(format!("character decomposition of Omega_{} broken", d + 1));
            }
            maulik_toda(om).map_err(err_str)?;
        }
        // Q^1 coefficient against the closed form -q Omega_1 / ((1-qt)(1-q/t))
        let qwin = 12i64;
        let rhs = gvpt_rhs(&omegas[..1], 1, qwin).map_err(err_str)?;
        let mut want: QtPoly = BTreeMap::new();
        for (&(qe, te), &c) in &om1.terms {
            for a in 0..=qwin {
                for b in 0..=qwin {
                    let q = 1 + qe + a + b;
                    if q <= qwin {
                        *want.entry((q, te + a - b)).or_insert_with(|| rat(0)) -= rat(c as i64);
                    }
                }
            }
        }
        want.retain(|_, v| !num::traits::Zero::is_zero(v));
        let got: QtPoly = rhs[1]
            .iter()
            .filter(|(&(q, _), _)| q <= 8)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        let want: QtPoly = want
            .iter()
            .filter(|(&(q, _), _)| q <= 8)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        if got != want {
            return fail("Q^1 coefficient differs from the closed form");
        }
        Ok(())
    }

    fn c11(&mut self) -> Result<(), String> {
        for (d, chi, extra, mmax) in [(1u32, 0i64, 2u64, 6i64), (2, 1, 5, 6), (3, 1, 8, 8)] {
            for m in 0..=mmax {
                let chi_m = euler_characteristic(self.space(d, chi), m).map_err(err_str)?;
                let want = rat(binom(m as u64 + extra, m as u64));
                if chi_m != want {
                    return fail(format!("chi(M({d},{chi}), {m}) = {chi_m}, expected {want}"));
                }
            }
        }
        // integrals of L_n^delta images vanish; the identity lives on the
        // full polynomial ring including c1(1), so compute upstairs and set
        // c1(1) to zero only after applying the operator
        let mut rng = StdRng::seed_from_u64(17);
        for (d, chi) in [(1u32, 0i64), (2, 1)] {
            let pres = self.space(d, chi).clone();
            let functional = normalize_integral(&pres).map_err(err_str)?;
            let top = pres.top_degree();
            let sctx = DescCtx::new(ToppType::new(d, chi), pres.dmax + 1, false);
            let svira = Virasoro::new(sctx.clone());
            let c11 = sctx.table.index_of("c1(1)").expect("c1(1) upstairs");
            let zero = Polynomial::zero(&sctx.table);
            for _ in 0..50 {
                let n = rng.gen_range(0..=2u32);
                if top < n + 1 {
                    continue;
                }
                let p = random_homogeneous(&sctx, top - n, &mut rng);
                let img = svira.apply_ln_delta(n, &p).map_err(err_str)?;
                let down = img
                    .substitute(c11, &zero)
                    .map_table(&pres.rewrite.ctx.table)
                    .map_err(err_str)?;
                let red = pres.rewrite.reduce(&down).map_err(err_str)?;
                let val = functional.integrate_poly(&pres.ideal, &red, top).map_err(err_str)?;
                if !num::traits::Zero::is_zero(&val) {
                    return fail(format!(
                        "integral of L_{n}^delta image nonzero on M({d},{chi})"
                    ));
                }
            }
        }
        Ok(())
    }

    fn c12(&mut self) -> Result<(), String> {
        let opts = BuildOptions { use_ln: false, gmr_dprime_max: Some(1), pd: true };
        let mut side = Registry::new();
        let cheap =
            build_ring(&mut side, ToppType::new(3, 1), Kind::Space, 10, &opts).map_err(err_str)?;
        let full = self.space(3, 1);
        if cheap.hilbert() != full.hilbert() {
            return fail(format!(
                "duality-completed Hilbert {:?} vs geometric {:?}",
                cheap.hilbert(),
                full.hilbert()
            ));
        }
        same_slices(&cheap.ideal, &full.ideal, 10, "duality completion vs geometric ideal")
    }

    fn run(&mut self) {
        macro_rules! check {
            ($n:expr, $name:expr, $f:expr) => {
                let r = $f;
                self.results.push(($n, $name, r));
            };
        }
        check!(1, "M(1,0) ring and Mumford-only derivation", self.c1());
        check!(2, "stack (2,0) golden trace, relations, trim", self.c2());
        check!(3, "stack (3,0) series and trimmed presentation", self.c3());
        self.results.push((
            4,
            "stack (4,2)/(4,0) series and tables (stretch, not gating)",
            fail("skipped: d=4 builds exceed the desk-scale budget; run via the CLI"),
        ));
        check!(5, "BPS integrality series and structural form", self.c5());
        check!(6, "free-generation windows", self.c6());
        check!(7, "Virasoro property suite", self.c7());
        check!(8, "quadratic identity and falling factorials", self.c8());
        check!(9, "perverse = Chern filtrations", self.c9());
        check!(10, "refined invariants and GV/PT series", self.c10());
        check!(11, "Euler characteristics and vanishing integrals", self.c11());
        check!(12, "Poincare-duality completion cross-check", self.c12());
    }
}

#[test]
fn acceptance() {
    let mut suite = Suite { reg: Registry::new(), m32: None, results: Vec::new() };
    if let Err(e) = suite.build_all() {
        panic!("ring construction failed: {e}");
    }
    suite.run();
    let mut gating_failures = Vec::new();
    for (n, name, r) in &suite.results {
        match r {
            Ok(()) => println!("criterion {n:2}: PASS  {name}"),
            Err(msg) if *n == 4 => println!("criterion {n:2}: SKIP  {name} ({msg})"),
            Err(msg) => {
                println!("criterion {n:2}: FAIL  {name} ({msg})");
                gating_failures.push(*n);
            }
        }
    }
    assert!(gating_failures.is_empty(), "failing criteria: {gating_failures:?}");
}
