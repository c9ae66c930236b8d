use std::process::ExitCode;
use std::time::Instant;

use num_traits::Zero;
use polmod::closure::GradedSpan;
use polmod::exceptions::{build_matrix, det_identity_check, det_t, h_identity_check, MatrixKind};
use polmod::expr::Generator;
use polmod::frobenius::agrees_with;
use polmod::polyring::{factorial, polarization_up, restitution, Monomial};
use polmod::symfunc::{diag_power_sum, expand_basis, multi_elementary, schur_to_h};
use polmod::{
    classify, frobenius_series, hilbert_series, oracle_series, polarization_module, Basis, ClassTag, FrobeniusSeries,
    GeneratorFamily, MultiDegree, OracleKind, Partition, Permutation, Poly, Q,
};
use polmod_cli::verify::{self, Status, Verdict, Verifier};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion: failures are listed, report-only lines are kept apart.
#[derive(Default)]
struct Outcome {
    checks: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn verdicts(&mut self, vs: Vec<Verdict>) {
        for v in vs {
            let ell = v.ell.map(|l| format!(" ell={l}")).unwrap_or_default();
            let line = format!("{} n={}{ell}", v.id, v.n);
            match v.status {
                Status::Reported => self.notes.push(format!("{line}: {}", if v.agrees { "agrees" } else { "differs" })),
                s => self.check(s == Status::Pass, || line),
            }
        }
    }
}

fn qi(k: i64) -> Q {
    Q::from_integer(k.into())
}

fn rand_q(rng: &mut ChaCha8Rng) -> Q {
    Q::new(rng.gen_range(-30i64..=30).into(), rng.gen_range(1i64..=9).into())
}

/// Zero when the partition has more than `n` parts.
fn sym(basis: Basis, parts: &[usize], ell: usize, n: usize) -> Poly {
    if parts.len() > n {
        return Poly::zero(ell, n);
    }
    expand_basis(basis, &Partition::new(parts.to_vec()).unwrap(), 1, ell, n).unwrap()
}

fn series_of(family: &GeneratorFamily, ell: usize, n: usize) -> (GradedSpan, FrobeniusSeries) {
    let module = polarization_module(family, ell, n).expect("module");
    let series = frobenius_series(&module).expect("series");
    (module, series)
}

fn oracle_check(out: &mut Outcome, label: &str, f: Poly, kind: OracleKind, ell: usize, n: usize) {
    let (_, got) = series_of(&GeneratorFamily::orbit(vec![f]), ell, n);
    let want = oracle_series(kind, n).expect("oracle");
    out.check(agrees_with(&got, &want), || format!("{label} n={n} ell={ell}: engine {}", got.pretty()));
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::default();
    for d in 1..=5 {
        for n in 2..=6 {
            for ell in 1..=3 {
                let e1 = sym(Basis::Elementary, &[1], ell, n).pow(d as u32);
                oracle_check(&mut out, &format!("e[1]^{d}"), e1, OracleKind::E1Power(d), ell, n);
                oracle_check(
                    &mut out,
                    &format!("p[{d}]"),
                    sym(Basis::PowerSum, &[d], ell, n),
                    OracleKind::PowerSum(d),
                    ell,
                    n,
                );
                if d <= n {
                    let e = sym(Basis::Elementary, &[d], ell, n);
                    oracle_check(&mut out, &format!("e[{d}]"), e, OracleKind::Elementary(d), ell, n);
                }
            }
        }
    }
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::default();
    for d in 2..=4 {
        for n in 2..=5 {
            for ell in 1..=2 {
                for (name, kind) in [("A", OracleKind::FamilyA(d)), ("B", OracleKind::FamilyB(d))] {
                    let family = Generator::parse(&format!("family:{name}:{d}")).unwrap().family(ell, n).unwrap();
                    let (_, got) = series_of(&family, ell, n);
                    let want = oracle_series(kind, n).unwrap();
                    out.check(agrees_with(&got, &want), || format!("family:{name}:{d} n={n} ell={ell}"));
                }
            }
        }
    }
    out
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut points = vec![[qi(1), qi(2)], [qi(1), qi(0)], [qi(0), qi(1)]];
    while points.len() < 25 {
        let p = [rand_q(&mut rng), rand_q(&mut rng)];
        if !(p[0].is_zero() && p[1].is_zero()) {
            points.push(p);
        }
    }
    for n in 2..=4 {
        for ell in 1..=2 {
            for [a, b] in &points {
                let f = &sym(Basis::Monomial, &[2], ell, n).scale(a) + &sym(Basis::Monomial, &[1, 1], ell, n).scale(b);
                let tag = classify(2, &[a.clone(), b.clone()], n).unwrap();
                let (module, got) = series_of(&GeneratorFamily::orbit(vec![f]), ell, n);
                let want = oracle_series(OracleKind::Degree2(tag), n).unwrap();
                let label = format!("[{a}:{b}] n={n} ell={ell}");
                out.check(agrees_with(&got, &want), || format!("{label}: series {}", got.pretty()));
                let dim = if tag == ClassTag::P1Squared { binom(ell + 2, 2) } else { 1 + n * ell + binom(ell + 1, 2) };
                out.check(module.dimension() == dim, || format!("{label}: dimension {} != {dim}", module.dimension()));
            }
        }
    }
    out
}

fn criterion_4() -> Outcome {
    use ClassTag::*;
    let mut out = Outcome::default();
    for n in 2..=6 {
        let mut cases: Vec<([i64; 3], ClassTag)> =
            vec![([1, 3, 6], P1Cubed), ([1, 0, 0], P3), ([1, 1, 1], H3), ([0, 1, 0], H3)];
        // e_3 vanishes in two variables.
        if n >= 3 {
            cases.push(([0, 0, 1], P3));
        }
        match n {
            3 => cases.push(([2, -3, 12], P3)),
            4 => cases.push(([1, 1, 0], P3)),
            5 => cases.push(([4, -3, 4], P3)),
            6 => cases.push(([5, -3, 3], P3)),
            _ => {}
        }
        for (abc, want_tag) in cases {
            let c: Vec<Q> = abc.iter().map(|&v| qi(v)).collect();
            let label = format!("[{}:{}:{}] n={n}", abc[0], abc[1], abc[2]);
            let tag = classify(3, &c, n).unwrap();
            out.check(tag == want_tag, || format!("{label}: class {tag}, expected {want_tag}"));
            for ell in 1..=2 {
                let f = &(&sym(Basis::Monomial, &[3], ell, n).scale(&c[0])
                    + &sym(Basis::Monomial, &[2, 1], ell, n).scale(&c[1]))
                    + &sym(Basis::Monomial, &[1, 1, 1], ell, n).scale(&c[2]);
                let (_, got) = series_of(&GeneratorFamily::orbit(vec![f]), ell, n);
                let want = oracle_series(OracleKind::Degree3(tag), n).unwrap();
                out.check(agrees_with(&got, &want), || format!("{label} ell={ell}: series {}", got.pretty()));
            }
        }
    }
    out
}

fn selectors(list: &[&str]) -> Outcome {
    let mut out = Outcome::default();
    let mut verifier = Verifier::new(0);
    for sel in list {
        match verify::verdicts(sel, &mut verifier) {
            Ok(vs) => out.verdicts(vs),
            Err(e) => out.check(false, || format!("{sel}: {e}")),
        }
    }
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 2..=8 {
        for _ in 0..20 {
            let p: Vec<Q> = (0..5).map(|_| rand_q(&mut rng)).collect();
            let generic = build_matrix(MatrixKind::T, n, &p).unwrap().determinant();
            out.check(generic == det_t(&p[0], &p[1], &p[2], &p[3], &p[4], n), || format!("det T n={n}"));
        }
    }
    for kind in [MatrixKind::E, MatrixKind::D, MatrixKind::G] {
        for n in 3..=8 {
            let bad = (0..20)
                .filter(|_| {
                    let (a, b, c) = (rand_q(&mut rng), rand_q(&mut rng), rand_q(&mut rng));
                    !det_identity_check(kind, &a, &b, &c, n).unwrap()
                })
                .count();
            out.check(bad == 0, || format!("det {kind:?}ᵗ{kind:?} n={n}: closed form fails at {bad} of 20 points"));
        }
    }
    for n in 3..=8 {
        for _ in 0..20 {
            let (x, y, z) = (rand_q(&mut rng), rand_q(&mut rng), rand_q(&mut rng));
            out.check(h_identity_check(&x, &y, &z, n).unwrap(), || format!("HᵗH n={n}"));
        }
    }
    out
}

fn random_poly(rng: &mut ChaCha8Rng, ell: usize, n: usize, deg: usize) -> Poly {
    let mut f = Poly::zero(ell, n);
    for _ in 0..rng.gen_range(1..=4) {
        let mut e = vec![0u8; ell * n];
        for _ in 0..deg {
            e[rng.gen_range(0..ell * n)] += 1;
        }
        f.add_term(Monomial::from_exponents(&e), qi(rng.gen_range(-5..=5)));
    }
    f
}

/// Every term has `rows[i]` as its degree in row `i + 1`.
fn random_multihomogeneous(rng: &mut ChaCha8Rng, n: usize, rows: &[usize]) -> Poly {
    let mut f = Poly::zero(rows.len(), n);
    for _ in 0..rng.gen_range(1..=4) {
        let mut e = vec![0u8; rows.len() * n];
        for (i, &d) in rows.iter().enumerate() {
            for _ in 0..d {
                e[i * n + rng.gen_range(0..n)] += 1;
            }
        }
        f.add_term(Monomial::from_exponents(&e), qi(rng.gen_range(-5..=5)));
    }
    f
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut v: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        v.swap(i, rng.gen_range(0..=i));
    }
    Permutation::new(v).unwrap()
}

fn e1_power(d: &MultiDegree, n: usize) -> Poly {
    let ell = d.len();
    let mut out = Poly::one(ell, n);
    for (i, &di) in d.0.iter().enumerate() {
        let row = (1..=n).fold(Poly::zero(ell, n), |acc, j| &acc + &Poly::var(ell, n, i + 1, j));
        out = &out * &row.pow(di as u32);
    }
    out
}

fn criterion_10() -> Outcome {
    let mut out = Outcome::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..200 {
        let (ell, n) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let deg0 = rng.gen_range(0..=4);
        let f = random_poly(&mut rng, ell, n, deg0);
        let (i, k, al) = (rng.gen_range(1..=ell), rng.gen_range(1..=ell), rng.gen_range(1..=ell));
        let (be, j) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
        let p = rng.gen_range(1..=3);

        // [∂_{αβ}, E_{ik}^{(p)}] = δ_{αi} ∂_{kβ}^{(p)}
        let lhs = f.polarize(i, k, p).unwrap().derive(al, be, 1).unwrap();
        let mut rhs = f.derive(al, be, 1).unwrap().polarize(i, k, p).unwrap();
        if al == i {
            rhs = &rhs + &f.derive(k, be, p).unwrap();
        }
        out.check(lhs == rhs, || format!("case {case}: commutator"));

        let s = random_perm(&mut rng, n);
        out.check(
            f.polarize(i, k, p).unwrap().permute(&s).unwrap() == f.permute(&s).unwrap().polarize(i, k, p).unwrap(),
            || format!("case {case}: polarization commutes with permutations"),
        );
        out.check(
            f.derive(i, j, 1).unwrap().permute(&s).unwrap() == f.permute(&s).unwrap().derive(i, s.apply(j), 1).unwrap(),
            || format!("case {case}: derivatives are permuted"),
        );

        // E_{1,r} E_{r,1} g = deg(g) g on row-1 polynomials
        let ell2 = ell.max(2);
        let deg = rng.gen_range(1..=4);
        let g = random_poly(&mut rng, 1, n, deg).with_rows(ell2);
        let r = rng.gen_range(2..=ell2);
        let back = g.polarize(r, 1, 1).unwrap().polarize(1, r, 1).unwrap();
        out.check(back == g.scale(&qi(deg as i64)), || {
            format!("case {case}: E_(1,{r}) E_({r},1) is {deg} times the identity")
        });

        let d = MultiDegree((0..rng.gen_range(2..=3)).map(|_| rng.gen_range(0..=2)).collect());
        let m = d.total();
        let n3 = rng.gen_range(1..=3);
        if m > 0 {
            let l = d.len();
            let up = |h: &Poly| polarization_up(h, &d).unwrap();
            let down = |h: &Poly| restitution(h, &d).unwrap();
            let e1 = sym(Basis::Elementary, &[1], l, n3).pow(m as u32);
            let pm = sym(Basis::PowerSum, &[m], l, n3);
            out.check(up(&e1) == e1_power(&d, n3), || format!("case {case}: e1 polarized to {d:?}"));
            out.check(up(&pm) == diag_power_sum(&d, n3).unwrap(), || format!("case {case}: p polarized to {d:?}"));
            out.check(down(&e1_power(&d, n3)) == e1, || format!("case {case}: e1 restituted from {d:?}"));
            out.check(down(&diag_power_sum(&d, n3).unwrap()) == pm, || format!("case {case}: p restituted from {d:?}"));
            if m <= n3 {
                let em = sym(Basis::Elementary, &[m], l, n3);
                let ed = multi_elementary(&d, n3);
                let c = Q::new(d.factorial(), factorial(m));
                out.check(up(&em) == ed.scale(&c), || format!("case {case}: e polarized to {d:?}"));
                out.check(down(&ed) == em.scale(&c.recip()), || format!("case {case}: e restituted from {d:?}"));
            }
        }
    }
    out
}

fn criterion_11() -> Outcome {
    let mut out = Outcome::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut dims = Vec::new();
    for case in 0..20 {
        let n = rng.gen_range(1..=4);
        let deg = rng.gen_range(1..=4);
        let top = rng.gen_range(0..=deg);
        let mut f = Poly::zero(2, n);
        while f.is_zero() {
            f = random_multihomogeneous(&mut rng, n, &[top, deg - top]);
        }
        let mut span = GradedSpan::new(2, n);
        span.span_insert(&f).unwrap();
        let ed = span.derivative_closure().polarization_closure();
        let de = span.polarization_closure().derivative_closure();
        dims.push(ed.dimension());
        out.check(ed.dimension() == de.dimension() && ed.same_span(&de), || {
            format!("case {case} ({f}): dimensions {} and {}", ed.dimension(), de.dimension())
        });
    }
    out.notes.push(format!("module dimensions: {dims:?}"));
    out
}

fn criterion_12() -> Outcome {
    let mut out = Outcome::default();
    for (n, ell, want) in [(3, 1, 6), (3, 2, 16), (4, 1, 24)] {
        let family = Generator::Vandermonde.family(ell, n).unwrap();
        let module = polarization_module(&family, ell, n).unwrap();
        out.check(module.dimension() == want, || format!("vandermonde n={n} ell={ell}: {}", module.dimension()));
    }
    out
}

fn criterion_13() -> Outcome {
    let mut out = selectors(&["experiments"]);
    let mut negative = Vec::new();
    for d in 1..=5 {
        for n in 2..=6 {
            for ell in 1..=3 {
                let mut gens = vec![
                    (format!("e[1]^{d}"), sym(Basis::Elementary, &[1], ell, n).pow(d as u32)),
                    (format!("p[{d}]"), sym(Basis::PowerSum, &[d], ell, n)),
                ];
                if d <= n {
                    gens.push((format!("e[{d}]"), sym(Basis::Elementary, &[d], ell, n)));
                }
                for (name, f) in gens {
                    let module = polarization_module(&GeneratorFamily::orbit(vec![f]), ell, n).unwrap();
                    let h = schur_to_h(&hilbert_series(&module).unwrap()).unwrap();
                    if !h.is_nonnegative() {
                        negative.push(format!("{name} n={n} ell={ell}"));
                    }
                }
            }
        }
    }
    out.notes.push(if negative.is_empty() {
        "h-positivity: every Hilbert series on the grid has nonnegative h-coefficients".into()
    } else {
        format!("h-positivity fails for {}", negative.join(", "))
    });
    out
}

type Criterion = (usize, &'static str, Box<dyn Fn() -> Outcome>);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (1, "closed forms for e[1]^d, p[d], e[d]", Box::new(criterion_1)),
        (2, "families A and B", Box::new(criterion_2)),
        (3, "degree-2 classification", Box::new(criterion_3)),
        (4, "degree-3 classification", Box::new(criterion_4)),
        (5, "exception equations", Box::new(|| selectors(&["table:1", "table:7"]))),
        (6, "determinant identities", Box::new(criterion_6)),
        (7, "fast examples", Box::new(|| selectors(&["examples:fast"]))),
        (8, "degree-4 and degree-5 tables", Box::new(|| selectors(&["table:4", "table:5", "hilbert:4", "hilbert:5"]))),
        (9, "modules of complete homogeneous generators", Box::new(|| selectors(&["homog"]))),
        (10, "operator identities", Box::new(criterion_10)),
        (11, "closure order", Box::new(criterion_11)),
        (12, "harmonic dimensions", Box::new(criterion_12)),
        (13, "experiments (report only)", Box::new(criterion_13)),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (k, name, run) in &criteria {
        if !only.is_empty() && !only.contains(k) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        let pass = *k == 13 || o.failures.is_empty();
        let status = if pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2} {status} {name}: {} checks, {} failed ({secs:.1}s)", o.checks, o.failures.len());
        for f in &o.failures {
            println!("    failed: {f}");
        }
        for n in &o.notes {
            println!("    report: {n}");
        }
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
