//! Decision procedures for pairs of scales: orbit equivalence,
//! stabilized-automorphism-group isomorphism, and the certified-negative
//! check for continuous orbit equivalence. Every verdict ships with the
//! invariants it was decided on, and `Inconclusive` is a first-class
//! outcome whenever the inputs carry finite information only.

use crate::invariants::{
    min_generators, profinite_type, supernatural, supernatural_equal,
    supernatural_first_difference, Comparison, Exponent, ProfiniteType,
    SupernaturalNumber,
};
use crate::lattice::PrimeFactorization;
use crate::scale::{TrivialityCertificate, ZdScale};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Question {
    OrbitEquivalence,
    StabilizedIsomorphism,
    ContinuousOrbitEquivalence,
}

impl Question {
    pub fn as_str(&self) -> &'static str {
        match self {
            Question::OrbitEquivalence => "oe",
            Question::StabilizedIsomorphism => "stab-iso",
            Question::ContinuousOrbitEquivalence => "coe",
        }
    }

    pub fn parse(text: &str) -> Option<Question> {
        match text {
            "oe" => Some(Question::OrbitEquivalence),
            "stab-iso" => Some(Question::StabilizedIsomorphism),
            "coe" => Some(Question::ContinuousOrbitEquivalence),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// What separated the two scales on a `No`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Distinguishing {
    /// Free pro-p ranks differ at this prime.
    Rank { prime: u64, left: usize, right: usize },
    /// Torsion orders differ at a rank-0 prime (`p^exp` each side).
    TorsionOrder { prime: u64, left_exp: u32, right_exp: u32 },
    /// Supernatural exponents differ at this prime.
    Supernatural {
        prime: u64,
        left: Exponent,
        right: Exponent,
    },
}

impl Distinguishing {
    pub fn prime(&self) -> u64 {
        match self {
            Distinguishing::Rank { prime, .. }
            | Distinguishing::TorsionOrder { prime, .. }
            | Distinguishing::Supernatural { prime, .. } => *prime,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Distinguishing::Rank { prime, left, right } => json!({
                "prime": prime, "kind": "rank", "left": left, "right": right,
            }),
            Distinguishing::TorsionOrder { prime, left_exp, right_exp } => json!({
                "prime": prime, "kind": "torsion-order",
                "left": format!("{prime}^{left_exp}"),
                "right": format!("{prime}^{right_exp}"),
            }),
            Distinguishing::Supernatural { prime, left, right } => json!({
                "prime": prime, "kind": "supernatural",
                "left": left.to_string(), "right": right.to_string(),
            }),
        }
    }
}

/// A common clopen subgroup type and the common finite index realizing a
/// `Yes` for the stabilized-isomorphism question.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub witness_type: ProfiniteType,
    pub index: PrimeFactorization,
}

impl Witness {
    fn to_json(&self) -> Value {
        json!({
            "type": profinite_type_json(&self.witness_type),
            "type_rendered": self.witness_type.render(),
            "index": self.index.factors().iter().map(|(p, e)| {
                json!([big_to_value(p), e])
            }).collect::<Vec<_>>(),
            "index_value": big_to_value(&self.index.value()),
        })
    }
}

/// The invariants one side was judged on.
#[derive(Clone, Debug)]
pub struct InvariantBlock {
    pub name: String,
    pub triviality: Option<TrivialityCertificate>,
    pub supernatural: Option<SupernaturalNumber>,
    pub profinite_type: Option<ProfiniteType>,
    pub min_generators: Option<u32>,
    pub failure: Option<String>,
}

impl InvariantBlock {
    fn gather(scale: &ZdScale) -> Self {
        let triviality = scale.certify_trivial_intersection().ok();
        let sn = supernatural(scale);
        let ty = profinite_type(scale);
        let mut failure = None;
        if let Err(e) = &sn {
            failure = Some(e.to_string());
        }
        if let Err(e) = &ty {
            if failure.is_none() {
                failure = Some(e.to_string());
            }
        }
        let profinite_type = ty.ok();
        InvariantBlock {
            name: scale.name().to_string(),
            triviality,
            supernatural: sn.ok(),
            min_generators: profinite_type.as_ref().and_then(min_generators),
            profinite_type,
            failure,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "supernatural": match &self.supernatural {
                Some(sn) => Value::Array(
                    sn.factors()
                        .iter()
                        .map(|(p, e)| json!([p, exponent_json(e)]))
                        .collect(),
                ),
                None => Value::Null,
            },
            "profinite_type": match &self.profinite_type {
                Some(t) => profinite_type_json(t),
                None => Value::String("not-stabilized".into()),
            },
            "min_generators": match self.min_generators {
                Some(k) => json!(k),
                None => json!("unknown"),
            },
        })
    }
}

pub fn exponent_json(e: &Exponent) -> Value {
    match e {
        Exponent::Finite(k) => json!(k),
        Exponent::AtLeast(k) => json!(format!(">={k}")),
        Exponent::Infinite => json!("inf"),
    }
}

pub fn profinite_type_json(t: &ProfiniteType) -> Value {
    Value::Array(
        t.entries()
            .iter()
            .map(|(p, tuple)| {
                json!([p, tuple.iter().map(exponent_json).collect::<Vec<_>>()])
            })
            .collect(),
    )
}

fn big_to_value(n: &BigInt) -> Value {
    match n.to_u64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

pub fn triviality_json(cert: &TrivialityCertificate) -> Value {
    match cert {
        TrivialityCertificate::Certified => json!({"status": "certified"}),
        TrivialityCertificate::NotTrivial => json!({"status": "not-trivial"}),
        TrivialityCertificate::EvidenceOnly {
            depth,
            shortest_vector,
            norm_sq,
        } => json!({
            "status": "evidence-only",
            "depth": depth,
            "shortest_vector": shortest_vector.as_ref().map(|v| {
                v.iter().map(big_to_value).collect::<Vec<_>>()
            }),
            "shortest_vector_norm_sq": norm_sq.as_ref().map(big_to_value),
        }),
    }
}

#[derive(Clone, Debug)]
pub struct DecisionReport {
    pub question: Question,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub distinguishing: Option<Distinguishing>,
    pub left: InvariantBlock,
    pub right: InvariantBlock,
    pub notes: Vec<String>,
}

impl DecisionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "question": self.question.as_str(),
            "verdict": self.verdict.as_str(),
            "witness": self.witness.as_ref().map(Witness::to_json),
            "distinguishing": self.distinguishing.as_ref().map(Distinguishing::to_json),
            "invariants": {
                "s1": self.left.to_json(),
                "s2": self.right.to_json(),
            },
            "notes": self.notes,
        })
    }

    pub fn summary(&self) -> String {
        format!(
            "{}({}, {}) = {}{}",
            self.question.as_str(),
            self.left.name,
            self.right.name,
            self.verdict.as_str(),
            match &self.distinguishing {
                Some(d) => format!(" [distinguishing prime {}]", d.prime()),
                None => String::new(),
            }
        )
    }
}

/// Verdicts require certified trivial intersection on both sides; anything
/// weaker caps the outcome at `Inconclusive` with an explanatory note.
fn certification_gate(
    left: &InvariantBlock,
    right: &InvariantBlock,
    notes: &mut Vec<String>,
) -> bool {
    let mut ok = true;
    for block in [left, right] {
        match &block.triviality {
            Some(TrivialityCertificate::Certified) => {}
            Some(TrivialityCertificate::NotTrivial) => {
                notes.push(format!(
                    "scale '{}' has nontrivial chain intersection; it does not define a free odometer and the decision criteria do not apply",
                    block.name
                ));
                ok = false;
            }
            Some(TrivialityCertificate::EvidenceOnly { depth, .. }) => {
                notes.push(format!(
                    "scale '{}' is explicit (evidence to depth {depth} only); trivial intersection cannot be certified",
                    block.name
                ));
                ok = false;
            }
            None => {
                notes.push(format!(
                    "scale '{}': triviality certificate unavailable",
                    block.name
                ));
                ok = false;
            }
        }
        if let Some(f) = &block.failure {
            notes.push(format!("scale '{}': {f}", block.name));
            ok = false;
        }
    }
    ok
}

/// Orbit equivalence: decided by equality of the supernatural numbers of
/// the index sequences.
pub fn decide_oe(s1: &ZdScale, s2: &ZdScale) -> DecisionReport {
    let left = InvariantBlock::gather(s1);
    let right = InvariantBlock::gather(s2);
    let mut notes = Vec::new();
    let certified = certification_gate(&left, &right, &mut notes);

    let mut verdict = Verdict::Inconclusive;
    let mut distinguishing = None;
    if let (Some(a), Some(b)) = (&left.supernatural, &right.supernatural) {
        match supernatural_equal(a, b) {
            Comparison::Equal => {
                verdict = Verdict::Yes;
                notes.push(format!("index groups coincide: {a}"));
            }
            Comparison::NotEqual => {
                let (p, ea, eb, _) = supernatural_first_difference(a, b).expect("difference exists");
                verdict = Verdict::No;
                distinguishing = Some(Distinguishing::Supernatural {
                    prime: p,
                    left: ea,
                    right: eb,
                });
                notes.push(format!(
                    "supernatural numbers differ at prime {p}: {ea} vs {eb}"
                ));
            }
            Comparison::Inconclusive => {
                let (p, ea, eb, _) = supernatural_first_difference(a, b).expect("blocking prime");
                notes.push(format!(
                    "comparison blocked at prime {p} by lower-bound exponents: {ea} vs {eb}"
                ));
            }
        }
    }
    if !certified {
        if verdict != Verdict::Inconclusive {
            notes.push(format!(
                "invariant comparison suggests '{}' but certification is missing; verdict capped at inconclusive",
                verdict.as_str()
            ));
        }
        verdict = Verdict::Inconclusive;
        distinguishing = None;
    }
    DecisionReport {
        question: Question::OrbitEquivalence,
        verdict,
        witness: None,
        distinguishing,
        left,
        right,
        notes,
    }
}

/// Stabilized-automorphism-group isomorphism, decided through the clopen
/// subgroup criterion in closed form: isomorphic iff all free pro-p ranks
/// agree, and at every rank-0 prime the torsion orders agree. On `Yes` a
/// witness pair (common clopen type, common index) is emitted: per prime
/// the componentwise minimum of the descending torsion tuples, with index
/// exponent the larger torsion-order deficit.
pub fn decide_stab_iso(s1: &ZdScale, s2: &ZdScale) -> DecisionReport {
    let left = InvariantBlock::gather(s1);
    let right = InvariantBlock::gather(s2);
    let mut notes = Vec::new();
    let certified = certification_gate(&left, &right, &mut notes);

    let mut verdict = Verdict::Inconclusive;
    let mut witness = None;
    let mut distinguishing = None;

    if let (Some(ta), Some(tb)) = (&left.profinite_type, &right.profinite_type) {
        notes.push(format!("types: {} vs {}", ta.render(), tb.render()));
        if ta.has_at_least() || tb.has_at_least() {
            notes.push("types carry lower-bound exponents; comparison is inconclusive".into());
        } else {
            let primes: BTreeSet<u64> = ta.primes().chain(tb.primes()).collect();
            let mut separated = None;
            for &p in &primes {
                let (ra, rb) = (ta.rank(p), tb.rank(p));
                if ra != rb {
                    separated = Some(Distinguishing::Rank {
                        prime: p,
                        left: ra,
                        right: rb,
                    });
                    notes.push(format!("free pro-{p} ranks differ: {ra} vs {rb}"));
                    break;
                }
            }
            if separated.is_none() {
                for &p in &primes {
                    if ta.rank(p) == 0 {
                        let (oa, ob) = (ta.torsion_order_exponent(p), tb.torsion_order_exponent(p));
                        if oa != ob {
                            separated = Some(Distinguishing::TorsionOrder {
                                prime: p,
                                left_exp: oa,
                                right_exp: ob,
                            });
                            notes.push(format!(
                                "torsion orders at the rank-0 prime {p} differ: {p}^{oa} vs {p}^{ob}"
                            ));
                            break;
                        }
                    }
                }
            }
            match separated {
                Some(d) => {
                    verdict = Verdict::No;
                    distinguishing = Some(d);
                }
                None => {
                    verdict = Verdict::Yes;
                    let w = build_witness(ta, tb);
                    notes.push(format!(
                        "common clopen subgroup type {} of index {}",
                        w.witness_type.render(),
                        w.index.value()
                    ));
                    witness = Some(w);
                }
            }
        }
    }

    if !certified {
        if verdict != Verdict::Inconclusive {
            notes.push(format!(
                "invariant comparison suggests '{}' but certification is missing; verdict capped at inconclusive",
                verdict.as_str()
            ));
        }
        verdict = Verdict::Inconclusive;
        witness = None;
        distinguishing = None;
    }
    DecisionReport {
        question: Question::StabilizedIsomorphism,
        verdict,
        witness,
        distinguishing,
        left,
        right,
        notes,
    }
}

fn build_witness(ta: &ProfiniteType, tb: &ProfiniteType) -> Witness {
    let dim = ta.dim().max(tb.dim());
    let primes: BTreeSet<u64> = ta.primes().chain(tb.primes()).collect();
    let mut entries = Vec::new();
    let mut index_pairs = Vec::new();
    for p in primes {
        let rank = ta.rank(p);
        debug_assert_eq!(rank, tb.rank(p));
        let (da, db) = (ta.torsion_exponents(p), tb.torsion_exponents(p)); // descending
        let len = da.len().max(db.len());
        let meet: Vec<u32> = (0..len)
            .map(|i| {
                let a = da.get(i).copied().unwrap_or(0);
                let b = db.get(i).copied().unwrap_or(0);
                a.min(b)
            })
            .filter(|&k| k > 0)
            .collect();
        let meet_sum: u32 = meet.iter().sum();
        let deficit_a = ta.torsion_order_exponent(p) - meet_sum;
        let deficit_b = tb.torsion_order_exponent(p) - meet_sum;
        debug_assert!(
            rank >= 1 || deficit_a == deficit_b,
            "rank-0 primes have matching torsion orders on a Yes"
        );
        let k_p = deficit_a.max(deficit_b);
        if k_p > 0 {
            index_pairs.push((p, k_p));
        }
        let mut tuple: Vec<Exponent> = meet.into_iter().map(Exponent::Finite).collect();
        tuple.extend(std::iter::repeat_n(Exponent::Infinite, rank));
        while tuple.len() < dim {
            tuple.push(Exponent::Finite(0));
        }
        entries.push((p, tuple));
    }
    Witness {
        witness_type: ProfiniteType::new(dim, entries),
        index: PrimeFactorization::from_prime_powers(&index_pairs),
    }
}

/// Continuous orbit equivalence: only the necessary condition is
/// implemented. A certified `No` propagates from the stabilized-group
/// mismatch; everything else is `Inconclusive`.
pub fn decide_coe(s1: &ZdScale, s2: &ZdScale) -> DecisionReport {
    let stab = decide_stab_iso(s1, s2);
    let mut notes = stab.notes.clone();
    let verdict = match stab.verdict {
        Verdict::No => {
            notes.push(
                "continuous orbit equivalence would force isomorphic stabilized automorphism groups; they differ, so the answer is a certified no"
                    .into(),
            );
            Verdict::No
        }
        _ => {
            if s1 == s2 {
                notes.push(
                    "identical scales are trivially continuously orbit equivalent; the decision procedure still has no sufficient criterion and reports inconclusive"
                        .into(),
                );
            } else {
                notes.push(
                    "no sufficient criterion for continuous orbit equivalence is implemented; isomorphic stabilized groups are necessary but not known to suffice"
                        .into(),
                );
            }
            Verdict::Inconclusive
        }
    };
    DecisionReport {
        question: Question::ContinuousOrbitEquivalence,
        verdict,
        witness: None,
        distinguishing: if verdict == Verdict::No {
            stab.distinguishing.clone()
        } else {
            None
        },
        left: stab.left,
        right: stab.right,
        notes,
    }
}

pub fn decide(question: Question, s1: &ZdScale, s2: &ZdScale) -> DecisionReport {
    match question {
        Question::OrbitEquivalence => decide_oe(s1, s2),
        Question::StabilizedIsomorphism => decide_stab_iso(s1, s2),
        Question::ContinuousOrbitEquivalence => decide_coe(s1, s2),
    }
}

/// Result of sweeping the implication chain over a corpus of pairs:
/// stabilized-isomorphism `Yes` must imply orbit-equivalence `Yes`, and a
/// certified continuous-orbit-equivalence `No` must never meet a
/// stabilized `Yes`.
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub pairs_checked: usize,
    pub pairs_skipped_inconclusive: usize,
    pub violations: Vec<String>,
}

impl ChainReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn implication_chain_check(pairs: &[(ZdScale, ZdScale)]) -> ChainReport {
    let mut checked = 0;
    let mut skipped = 0;
    let mut violations = Vec::new();
    for (a, b) in pairs {
        let stab = decide_stab_iso(a, b);
        let oe = decide_oe(a, b);
        let coe = decide_coe(a, b);
        if stab.verdict == Verdict::Inconclusive || oe.verdict == Verdict::Inconclusive {
            skipped += 1;
            continue;
        }
        checked += 1;
        if stab.verdict == Verdict::Yes && oe.verdict == Verdict::No {
            violations.push(format!(
                "{} vs {}: stabilized groups isomorphic but not orbit equivalent",
                a.name(),
                b.name()
            ));
        }
        if coe.verdict == Verdict::No && stab.verdict == Verdict::Yes {
            violations.push(format!(
                "{} vs {}: certified not-COE despite isomorphic stabilized groups",
                a.name(),
                b.name()
            ));
        }
        if stab.verdict == Verdict::Yes {
            // derivable from the closed form; asserted corpus-wide
            if let (Some(sa), Some(sb)) = (&stab.left.supernatural, &stab.right.supernatural) {
                if supernatural_equal(sa, sb) != Comparison::Equal {
                    violations.push(format!(
                        "{} vs {}: stabilized yes with unequal supernaturals",
                        a.name(),
                        b.name()
                    ));
                }
            }
        }
    }
    ChainReport {
        pairs_checked: checked,
        pairs_skipped_inconclusive: skipped,
        violations,
    }
}
