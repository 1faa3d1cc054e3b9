//! Acceptance criteria, shared by `norm1 selftest` and the acceptance test
//! target.  Each criterion runs in isolation and reports one pass/fail line.

use norm1_core::adjudicator::{Adjudicator, PlaceScenario, scenario_sweep};
use norm1_core::cochain::{self, cohomology};
use norm1_core::glattice::{self, perm_lattice, trivial_lattice};
use norm1_core::group::{HeisenbergGroup, PrimeParam, SubgroupLabel};
use norm1_core::linalg::{self, AbGroup, IntMatrix};
use norm1_core::pipeline::{self, Engine, KernelCell, Stabilizer};
use norm1_core::qz::{self, QZCochain};
use norm1_core::smallgroup::FiniteGroup;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

pub const GOLDEN_QZ_P3: &str = include_str!("../golden/qz_kernels_p3.md");
pub const GOLDEN_JG_P3_STAB1: &str = include_str!("../golden/jg_kernels_p3_stab1.md");
pub const GOLDEN_JG_P3_STABA: &str = include_str!("../golden/jg_kernels_p3_staba.md");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn parse(s: &str) -> Option<Level> {
        match s {
            "quick" => Some(Level::Quick),
            "full" => Some(Level::Full),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Level::Quick => "quick",
            Level::Full => "full",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub name: String,
    pub pass: bool,
    pub seconds: f64,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut out = format!("{verdict} {} ({:.1}s)", self.name, self.seconds);
        if !self.pass {
            out.push_str(&format!(": {}", self.detail));
        }
        out
    }
}

fn heis(p: u32) -> HeisenbergGroup {
    HeisenbergGroup::new(PrimeParam::new(p).unwrap())
}

fn ab(invs: &[u64]) -> AbGroup {
    AbGroup {
        invariants: invs.to_vec(),
        free_rank: 0,
    }
}

fn expect<T: PartialEq + std::fmt::Debug>(
    what: &str,
    got: T,
    want: T,
) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn run_one(name: &str, f: impl FnOnce() -> Result<String, String>) -> CriterionResult {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f));
    let seconds = start.elapsed().as_secs_f64();
    let (pass, detail) = match outcome {
        Ok(Ok(detail)) => (true, detail),
        Ok(Err(msg)) => (false, msg),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (false, format!("panic: {msg}"))
        }
    };
    CriterionResult {
        name: name.to_string(),
        pass,
        seconds,
        detail,
    }
}

fn criterion1() -> Result<String, String> {
    let g = heis(3);
    let table = pipeline::lemma25_table(&g).map_err(|e| e.to_string())?;
    if !table.same_cells(&pipeline::lemma25_closed_form(3)) {
        return Err("brute force table disagrees with the closed form".into());
    }
    expect("K0 row", table.cell(SubgroupLabel::K(0)), KernelCell::Line { l: 0, m: 1 })?;
    expect("K1 row", table.cell(SubgroupLabel::K(1)), KernelCell::Line { l: 1, m: 2 })?;
    expect("K2 row", table.cell(SubgroupLabel::K(2)), KernelCell::Line { l: 1, m: 1 })?;
    expect("K3 row", table.cell(SubgroupLabel::K(3)), KernelCell::Line { l: 1, m: 0 })?;
    expect("G row", table.cell(SubgroupLabel::Full), KernelCell::Zero)?;
    if table.to_markdown() != GOLDEN_QZ_P3 {
        return Err("markdown output differs from the golden file".into());
    }
    Ok("11 rows, byte-identical markdown".into())
}

fn criterion2() -> Result<String, String> {
    for p in [5u32, 7] {
        let g = heis(p);
        let table = pipeline::lemma25_table(&g).map_err(|e| e.to_string())?;
        if !table.same_cells(&pipeline::lemma25_closed_form(u64::from(p))) {
            return Err(format!("p={p}: brute force disagrees with the closed form"));
        }
    }
    Ok("p=5 and p=7 match, exponents included".into())
}

fn criterion3() -> Result<String, String> {
    let g = heis(3);
    for (stab, golden) in [
        (Stabilizer::Trivial, GOLDEN_JG_P3_STAB1),
        (Stabilizer::GenA, GOLDEN_JG_P3_STABA),
    ] {
        let both = pipeline::theorem_table(&g, stab, Engine::Both).map_err(|e| e.to_string())?;
        let red = pipeline::theorem_table(&g, stab, Engine::Reduction).map_err(|e| e.to_string())?;
        if !both.same_cells(&red) {
            return Err(format!("H={stab}: engines disagree"));
        }
        if red.to_markdown() != golden {
            return Err(format!("H={stab}: markdown differs from the golden file"));
        }
    }
    let table_a =
        pipeline::theorem_table(&g, Stabilizer::GenA, Engine::Reduction).map_err(|e| e.to_string())?;
    expect("H0 row for H=<a>", table_a.cell(SubgroupLabel::H(0)), KernelCell::Line { l: 0, m: 1 })?;
    expect("K0 row for H=<a>", table_a.cell(SubgroupLabel::K(0)), KernelCell::Zero)?;
    Ok("both stabilizers, direct and reduction engines agree on every cell".into())
}

fn criterion4() -> Result<String, String> {
    let g = heis(3);
    let report = pipeline::structural_suite(&g).map_err(|e| e.to_string())?;
    let failed: Vec<&str> = report
        .assertions
        .iter()
        .filter(|a| !a.pass)
        .map(|a| a.name.as_str())
        .collect();
    if !failed.is_empty() {
        return Err(format!("failed assertions: {}", failed.join(", ")));
    }
    Ok(format!("{} assertions pass", report.assertions.len()))
}

fn criterion5() -> Result<String, String> {
    for p in [3u32, 5] {
        let gr = qz::heisenberg_finite(&heis(p));
        let h2 = qz::h2_qz(&gr).map_err(|e| e.to_string())?;
        expect(&format!("H^2(E_{p}, Q/Z)"), h2.structure, ab(&[u64::from(p), u64::from(p)]))?;
    }
    for p in [2usize, 3, 5, 7, 11, 13] {
        let h2 = qz::h2_qz(&FiniteGroup::cyclic(p)).map_err(|e| e.to_string())?;
        if !h2.structure.is_trivial() {
            return Err(format!("H^2(C_{p}, Q/Z) = {}, want 0", h2.structure));
        }
    }
    for p in [2usize, 3, 5, 7] {
        let cp = FiniteGroup::cyclic(p);
        let sq = FiniteGroup::direct_product(&cp, &cp);
        let h2 = qz::h2_qz(&sq).map_err(|e| e.to_string())?;
        expect(&format!("H^2(C_{p} x C_{p}, Q/Z)"), h2.structure, ab(&[p as u64]))?;
    }
    Ok("Heisenberg, cyclic and rank-two elementary abelian multipliers all match".into())
}

fn criterion6() -> Result<String, String> {
    for n in 2..=6usize {
        let triv = trivial_lattice(FiniteGroup::cyclic(n));
        let h3 = cohomology(&triv, 3).map_err(|e| e.to_string())?;
        if !h3.structure.is_trivial() {
            return Err(format!("H^3(C_{n}, Z) = {}, want 0", h3.structure));
        }
    }
    let v4 = trivial_lattice(FiniteGroup::klein_four());
    expect(
        "H^3(V4, Z)",
        cohomology(&v4, 3).map_err(|e| e.to_string())?.structure,
        ab(&[2]),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..100 {
        let p = [3usize, 5, 7][trial % 3];
        let cp = FiniteGroup::cyclic(p);
        let cycles = rng.gen_range(0..3usize);
        let fixed = rng.gen_range(if cycles == 0 { 1 } else { 0 }..4usize);
        let npts = cycles * p + fixed;
        let mut perm: Vec<usize> = (0..npts).collect();
        for cy in 0..cycles {
            for i in 0..p {
                perm[cy * p + i] = cy * p + (i + 1) % p;
            }
        }
        let labels = (0..npts).map(|i| format!("x{i}")).collect();
        let lat = glattice::perm_lattice_abstract(cp, vec![(1, perm)], labels)
            .map_err(|e| e.to_string())?;
        let got = cochain::tate_h0_cyclic(&lat).map_err(|e| e.to_string())?;
        let want = AbGroup::from_orders(&vec![p as u64; fixed]);
        if got != want {
            return Err(format!(
                "trial {trial}: norm quotient {got}, want {want} ({cycles} cycles, {fixed} fixed)"
            ));
        }
    }
    Ok("cyclic and Klein-four oracles plus 100 random norm quotients match".into())
}

fn criterion7() -> Result<String, String> {
    let g = heis(3);
    let adj = Adjudicator::new(&g).map_err(|e| e.to_string())?;
    // the sweep itself asserts the numeric invariants on every subset
    let triv = scenario_sweep(&adj, Stabilizer::Trivial).map_err(|e| e.to_string())?;
    let gena = scenario_sweep(&adj, Stabilizer::GenA).map_err(|e| e.to_string())?;
    expect("subset count", (triv.total, gena.total), (2048, 2048))?;
    expect(
        "cyclic-only count H=1",
        triv.case_counts.get("1-III").copied().unwrap_or(0),
        64,
    )?;
    expect(
        "cyclic-only count H=<a>",
        gena.case_counts.get("2-II").copied().unwrap_or(0),
        64,
    )?;
    expect(
        "norm principle failures H=<a>",
        gena.case_counts.get("2-I").copied().unwrap_or(0),
        1984,
    )?;
    let rep = adj
        .adjudicate(&PlaceScenario::new(Stabilizer::GenA, vec![]))
        .map_err(|e| e.to_string())?;
    expect("unramified H=<a> sha", rep.sha, ab(&[3]))?;
    expect("unramified H=<a> tamagawa", rep.tamagawa, 1)?;
    expect("unramified H=<a> case", rep.case.clone(), "2-II".to_string())?;
    Ok("4096 scenarios adjudicated with all invariants holding".into())
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    let rows = rng.gen_range(1..=10usize);
    let cols = rng.gen_range(1..=5usize);
    let mut m = IntMatrix::zero(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, BigInt::from(rng.gen_range(-5i64..=5)));
        }
    }
    m
}

fn criterion8() -> Result<String, String> {
    let g = heis(3);
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    // d after d vanishes on every constructed complex
    let h0 = g.subgroup(SubgroupLabel::H(0));
    let k0 = g.subgroup(SubgroupLabel::K(0));
    let (p_lat, _) = perm_lattice(&g, &h0);
    let (j_lat, _) = glattice::chevalley_dual(&p_lat);
    let lattices = vec![
        trivial_lattice(FiniteGroup::cyclic(4)),
        trivial_lattice(FiniteGroup::klein_four()),
        p_lat.restrict(&g, &k0).map_err(|e| e.to_string())?,
        j_lat.restrict(&g, &k0).map_err(|e| e.to_string())?,
    ];
    for (i, lat) in lattices.iter().enumerate() {
        for n in 1..=2usize {
            let f: Vec<BigInt> = (0..cochain::cochain_dim(lat, n))
                .map(|_| BigInt::from(rng.gen_range(-4i64..5)))
                .collect();
            let ddf = cochain::apply_d(lat, n + 1, &cochain::apply_d(lat, n, &f));
            if !ddf.iter().all(|v| v.is_zero()) {
                return Err(format!("lattice {i}: d of d nonzero in degree {n}"));
            }
        }
    }

    // cocycle identity: exhaustive at p=3, randomized at p=5 and p=7
    let (f1, f2) = qz::make_f1_f2(&g);
    let fg3 = qz::heisenberg_finite(&g);
    if !qz::is_cocycle_qz(&fg3, &f1) || !qz::is_cocycle_qz(&fg3, &f2) {
        return Err("p=3: generator cochains are not cocycles".into());
    }
    for p in [5u32, 7] {
        let gp = heis(p);
        let (f1, f2) = qz::make_f1_f2(&gp);
        let size = f1.size;
        let q = f1.modulus();
        let fg = qz::heisenberg_finite(&gp);
        for f in [&f1, &f2] {
            for _ in 0..2000 {
                let a = rng.gen_range(0..size);
                let b = rng.gen_range(0..size);
                let c = rng.gen_range(0..size);
                let ab_idx = fg.mul(a, b);
                let bc_idx = fg.mul(b, c);
                let lhs = (f.get2(b, c) + f.get2(a, bc_idx)) % q;
                let rhs = (f.get2(ab_idx, c) + f.get2(a, b)) % q;
                if lhs != rhs {
                    return Err(format!("p={p}: cocycle identity fails at ({a},{b},{c})"));
                }
            }
        }
    }

    // kernel bases are saturated: compare against the dense SNF oracle
    for trial in 0..20 {
        let m = random_matrix(&mut rng);
        let k = linalg::kernel_lattice(&m);
        if k.rank() > 0 && !m.mul(&k.basis).is_zero() {
            return Err(format!("trial {trial}: kernel basis not in the kernel"));
        }
        let (diag, _, _) = linalg::snf(&m);
        let rank = diag.iter().filter(|d| !d.is_zero()).count();
        if k.rank() != m.cols() - rank {
            return Err(format!("trial {trial}: kernel rank mismatch"));
        }
        if k.rank() > 0 {
            let (kdiag, _, _) = linalg::snf(&k.basis);
            let sat = kdiag
                .iter()
                .filter(|d| !d.is_zero())
                .all(|d| d == &BigInt::from(1));
            if !sat {
                return Err(format!("trial {trial}: kernel basis not saturated"));
            }
        }
    }

    // coboundary verdicts are stable when the denominator exponent grows
    for class in g.subgroup_classes() {
        let (fg, back) = FiniteGroup::from_subgroup(&g, &class);
        for (l, m) in [(1u64, 0u64), (0, 1), (1, 1), (2, 1)] {
            let f = QZCochain::combine(l, &f1, m, &f2).restrict(&back);
            let at2 = qz::coboundary_test_qz(&fg, &f, 2)
                .map_err(|e| e.to_string())?
                .is_some();
            let at3 = qz::coboundary_test_qz(&fg, &f.rescale(3), 3)
                .map_err(|e| e.to_string())?
                .is_some();
            if at2 != at3 {
                return Err(format!(
                    "{}: verdict for ({l},{m}) changes between exponents 2 and 3",
                    class.label
                ));
            }
        }
    }

    // determinism: the kernel table does not depend on construction order
    let table = pipeline::lemma25_table(&g).map_err(|e| e.to_string())?;
    let again = pipeline::lemma25_table(&g).map_err(|e| e.to_string())?;
    if table.to_markdown() != again.to_markdown() {
        return Err("repeated construction changed the output".into());
    }
    for class in g.subgroup_classes().iter().rev() {
        let (fg, back) = FiniteGroup::from_subgroup(&g, class);
        let mut members = BTreeSet::new();
        for l in (0..3u64).rev() {
            for m in (0..3u64).rev() {
                let f = QZCochain::combine(l, &f1, m, &f2).restrict(&back);
                if qz::coboundary_test_qz(&fg, &f, 2)
                    .map_err(|e| e.to_string())?
                    .is_some()
                {
                    members.insert((l, m));
                }
            }
        }
        let cell = pipeline::KernelCell::from_members(3, &members);
        if cell != table.cell(class.label) {
            return Err(format!("{}: reversed construction changed the cell", class.label));
        }
    }

    Ok("all five property families hold".into())
}

pub fn run(level: Level) -> Vec<CriterionResult> {
    let mut results = Vec::new();
    results.push(run_one(
        "1. restriction kernels over Q/Z at p=3 match the closed form and golden table",
        criterion1,
    ));
    if level == Level::Full {
        results.push(run_one(
            "2. brute-force kernels at p=5 and p=7 match the closed form",
            criterion2,
        ));
        results.push(run_one(
            "3. lattice kernel tables at p=3: both stabilizers, engines agree",
            criterion3,
        ));
        results.push(run_one(
            "4. structural cohomology suite at p=3",
            criterion4,
        ));
    }
    results.push(run_one(
        "5. Schur multipliers: Heisenberg, cyclic, rank-two elementary abelian",
        criterion5,
    ));
    results.push(run_one(
        "6. integer cohomology oracles and random norm quotients",
        criterion6,
    ));
    results.push(run_one(
        "7. scenario sweep at p=3 over all ramified subsets, both stabilizers",
        criterion7,
    ));
    if level == Level::Full {
        results.push(run_one(
            "8. property suites: boundaries, cocycles, saturation, stability, determinism",
            criterion8,
        ));
    }
    results
}
