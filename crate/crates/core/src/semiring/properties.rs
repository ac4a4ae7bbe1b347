use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Properties, SemiringError, SemiringSpec, Value};

/// Outcome of one sampled law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck {
    pub law: &'static str,
    pub samples: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub semiring: String,
    pub declared: Vec<&'static str>,
    pub laws: Vec<LawCheck>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.laws.iter().all(|l| l.passed)
    }

    pub fn law(&self, name: &str) -> Option<&LawCheck> {
        self.laws.iter().find(|l| l.law == name)
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "semiring\t{}", self.semiring)?;
        writeln!(f, "declared\t{}", self.declared.join(","))?;
        for law in &self.laws {
            let status = if law.passed { "pass" } else { "FAIL" };
            write!(f, "{status}\t{}\t{}", law.law, law.samples)?;
            if let Some(cx) = &law.counterexample {
                write!(f, "\t{cx}")?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "result\t{}",
            if self.all_passed() { "pass" } else { "FAIL" }
        )
    }
}

type Verdict = Result<Option<String>, SemiringError>;

struct Checker<'a> {
    spec: &'a SemiringSpec,
    rng: ChaCha8Rng,
    samples: usize,
    laws: Vec<LawCheck>,
}

impl Checker<'_> {
    fn run(&mut self, law: &'static str, mut f: impl FnMut(&SemiringSpec, [Value; 3]) -> Verdict) {
        let mut counterexample = None;
        for _ in 0..self.samples {
            let vals = [
                self.spec.sample(&mut self.rng),
                self.spec.sample(&mut self.rng),
                self.spec.sample(&mut self.rng),
            ];
            match f(self.spec, vals) {
                Ok(None) => {}
                Ok(Some(cx)) => {
                    counterexample = Some(cx);
                    break;
                }
                Err(e) => {
                    counterexample = Some(format!("error: {e}"));
                    break;
                }
            }
        }
        self.laws.push(LawCheck {
            law,
            samples: self.samples,
            passed: counterexample.is_none(),
            counterexample,
        });
    }

    fn fixed(&mut self, law: &'static str, counterexample: Option<String>) {
        self.laws.push(LawCheck {
            law,
            samples: 1,
            passed: counterexample.is_none(),
            counterexample,
        });
    }
}

fn show(s: &SemiringSpec, vals: &[&Value]) -> String {
    let parts: Vec<String> = vals.iter().map(|v| s.format_value(v)).collect();
    parts.join(", ")
}

fn expect(ok: bool, s: &SemiringSpec, vals: &[&Value]) -> Verdict {
    Ok((!ok).then(|| show(s, vals)))
}

/// Randomized self-check of the semiring axioms and of every declared
/// property. Failures are report entries carrying a counterexample.
pub fn check_properties(spec: &SemiringSpec, sample_count: usize, seed: u64) -> PropertyReport {
    let mut c = Checker {
        spec,
        rng: ChaCha8Rng::seed_from_u64(seed),
        samples: sample_count.max(1),
        laws: Vec::new(),
    };

    c.run("plus associative", |s, [a, b, d]| {
        let l = s.plus(&s.plus(&a, &b)?, &d)?;
        let r = s.plus(&a, &s.plus(&b, &d)?)?;
        expect(l == r, s, &[&a, &b, &d])
    });
    c.run("plus commutative", |s, [a, b, _]| {
        expect(s.plus(&a, &b)? == s.plus(&b, &a)?, s, &[&a, &b])
    });
    c.run("plus identity", |s, [a, _, _]| {
        let z = s.zero();
        expect(s.plus(&a, &z)? == a && s.plus(&z, &a)? == a, s, &[&a])
    });
    c.run("times associative", |s, [a, b, d]| {
        let l = s.times(&s.times(&a, &b)?, &d)?;
        let r = s.times(&a, &s.times(&b, &d)?)?;
        expect(l == r, s, &[&a, &b, &d])
    });
    c.run("times identity", |s, [a, _, _]| {
        let o = s.one();
        expect(s.times(&a, &o)? == a && s.times(&o, &a)? == a, s, &[&a])
    });
    c.run("annihilation", |s, [a, _, _]| {
        let z = s.zero();
        expect(s.times(&a, &z)? == z && s.times(&z, &a)? == z, s, &[&a])
    });
    c.run("left distributivity", |s, [a, b, d]| {
        let l = s.times(&a, &s.plus(&b, &d)?)?;
        let r = s.plus(&s.times(&a, &b)?, &s.times(&a, &d)?)?;
        expect(l == r, s, &[&a, &b, &d])
    });
    c.run("right distributivity", |s, [a, b, d]| {
        let l = s.times(&s.plus(&b, &d)?, &a)?;
        let r = s.plus(&s.times(&b, &a)?, &s.times(&d, &a)?)?;
        expect(l == r, s, &[&a, &b, &d])
    });

    if spec.has(Properties::COMMUTATIVE) {
        c.run("times commutative", |s, [a, b, _]| {
            expect(s.times(&a, &b)? == s.times(&b, &a)?, s, &[&a, &b])
        });
    }
    if spec.has(Properties::IDEMPOTENT) || spec.has(Properties::ZERO_CLOSED) {
        c.run("idempotence", |s, [a, _, _]| {
            expect(s.plus(&a, &a)? == a, s, &[&a])
        });
    }
    if spec.has(Properties::IDEMPOTENT) {
        c.run("monotonicity", |s, [a, b, d]| {
            // a ⊕ b ≤ b always holds, so the premise is never vacuous.
            let lo = s.plus(&a, &b)?;
            let plus_ok = s.natural_leq(&s.plus(&lo, &d)?, &s.plus(&b, &d)?)?;
            let times_ok = s.natural_leq(&s.times(&lo, &d)?, &s.times(&b, &d)?)?;
            expect(plus_ok && times_ok, s, &[&lo, &b, &d])
        });
    }
    if spec.has(Properties::ZERO_CLOSED) {
        c.run("zero-closedness", |s, [a, _, _]| {
            let o = s.one();
            expect(s.plus(&o, &a)? == o, s, &[&a])
        });
        c.run("superiority", |s, [a, b, _]| {
            let ab = s.times(&a, &b)?;
            // a ≤ a⊗b and b ≤ a⊗b, read through ⊕ so no idempotence is assumed.
            let ok = s.plus(&a, &ab)? == a && s.plus(&b, &ab)? == b;
            expect(ok, s, &[&a, &b])
        });
        c.run("bounds", |s, [a, _, _]| {
            let ok = s.plus(&s.one(), &a)? == s.one() && s.plus(&a, &s.zero())? == a;
            expect(ok, s, &[&a])
        });
    }
    if spec.has(Properties::TOTALLY_ORDERED) {
        c.run("total order", |s, [a, b, _]| {
            let ok = s.plus(&a, &b)? == a || s.plus(&a, &b)? == b;
            expect(ok, s, &[&a, &b])
        });
    }
    if spec.has(Properties::MULT_IDEMPOTENT) {
        c.run("times idempotent", |s, [a, _, _]| {
            expect(s.times(&a, &a)? == a, s, &[&a])
        });
    }
    if let Some(dims) = spec.lattice_dims() {
        let needed = Properties::MULT_IDEMPOTENT | Properties::ZERO_CLOSED;
        c.fixed(
            "lattice flags",
            (!spec.has(needed)).then(|| {
                "lattice_dims declared without zero_closed + multiplicatively_idempotent"
                    .to_string()
            }),
        );
        c.run("decompose round trip", |s, [a, _, _]| {
            let coords = s.decompose(&a)?;
            expect(coords.len() == dims && s.recompose(&coords)? == a, s, &[&a])
        });
        c.run("lattice homomorphism", |s, [a, b, _]| {
            let (da, db) = (s.decompose(&a)?, s.decompose(&b)?);
            let plus = s.decompose(&s.plus(&a, &b)?)?;
            let times = s.decompose(&s.times(&a, &b)?)?;
            for i in 0..dims {
                let d = s.dimension_spec(i)?;
                if plus[i] != d.plus(&da[i], &db[i])? || times[i] != d.times(&da[i], &db[i])? {
                    return Ok(Some(show(s, &[&a, &b])));
                }
            }
            Ok(None)
        });
    }

    PropertyReport {
        semiring: spec.header(),
        declared: spec.properties().names(),
        laws: c.laws,
    }
}
