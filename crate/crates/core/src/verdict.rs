//! Rules engine for Brauer-map verdicts on classifying stacks.
//!
//! Each rule is an axiom with machine-checked hypotheses. Evaluation runs the
//! registry in a fixed order once per [`Phase`]; the first rule to conclude in
//! the `Decide` phase is decisive.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elliptic::{CurveHandle, TorsionReport};
use crate::linalg::FgAbGroup;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VerdictError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("no Br' model for {0}")]
    Unsupported(String),
    #[error("replay diverged at step {step}: {reason}")]
    ReplayMismatch { step: usize, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Conclusion {
    BrEqualsBrPrime,
    BrNotEqual,
    SBMIHolds,
    SBMIFails,
    Unknown,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tristate {
    Yes,
    No,
    #[default]
    Unknown,
}

impl Tristate {
    pub fn is_yes(self) -> bool {
        self == Tristate::Yes
    }
}

impl From<bool> for Tristate {
    fn from(b: bool) -> Self {
        if b {
            Tristate::Yes
        } else {
            Tristate::No
        }
    }
}

/// Missing flags are `unknown`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Flags {
    pub noetherian_normal: Tristate,
    pub integral: Tristate,
    pub regular_codim1: Tristate,
    pub henselian_local_gms: Tristate,
    pub br_equals_br_prime: Tristate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchemeInvariants {
    pub pic: FgAbGroup,
    pub pic_torsion: FgAbGroup,
    pub br_prime: FgAbGroup,
    pub units_torsion: FgAbGroup,
    pub flags: Flags,
}

impl SchemeInvariants {
    pub fn new(pic: FgAbGroup, br_prime: FgAbGroup, units_torsion: FgAbGroup, flags: Flags) -> Self {
        SchemeInvariants {
            pic_torsion: pic.torsion_part(),
            pic,
            br_prime,
            units_torsion,
            flags,
        }
    }

    /// Trivial Picard, Brauer and unit-torsion groups, all flags unknown.
    pub fn blank() -> Self {
        Self::new(FgAbGroup::trivial(), FgAbGroup::trivial(), FgAbGroup::trivial(), Flags::default())
    }

    pub fn validate(&self) -> Result<(), VerdictError> {
        if self.pic_torsion != self.pic.torsion_part() {
            return Err(VerdictError::Malformed(format!(
                "pic_torsion {} is not the torsion of pic {}",
                self.pic_torsion, self.pic
            )));
        }
        if !self.units_torsion.is_finite() {
            return Err(VerdictError::Malformed("units_torsion must be finite".into()));
        }
        if !self.br_prime.is_finite() {
            return Err(VerdictError::Malformed("br_prime must be a torsion group".into()));
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for SchemeInvariants {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            #[serde(default = "FgAbGroup::trivial")]
            pic: FgAbGroup,
            pic_torsion: Option<FgAbGroup>,
            #[serde(default = "FgAbGroup::trivial")]
            br_prime: FgAbGroup,
            #[serde(default = "FgAbGroup::trivial")]
            units_torsion: FgAbGroup,
            #[serde(default)]
            flags: Flags,
        }
        let raw = Raw::deserialize(deserializer)?;
        Ok(SchemeInvariants {
            pic_torsion: raw.pic_torsion.unwrap_or_else(|| raw.pic.torsion_part()),
            pic: raw.pic,
            br_prime: raw.br_prime,
            units_torsion: raw.units_torsion,
            flags: raw.flags,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum StackDescriptor {
    /// `BG` for `G = H ⊕ ℤ^rank` with `H` finite.
    BDiscrete {
        #[serde(default = "FgAbGroup::trivial")]
        finite_part: FgAbGroup,
        rank: usize,
    },
    /// `BD(M)` for the diagonalizable group with characters `M`.
    BDiagonalizable { characters: FgAbGroup },
    BGLn { n: usize },
    /// `BE` for an elliptic curve over a field.
    BAbelianVariety { curve: CurveHandle },
    /// A quotient stack `[Spec A / G]` with good moduli space `Spec A^G`.
    QuotientGoodModuli,
}

impl StackDescriptor {
    pub fn label(&self) -> String {
        match self {
            StackDescriptor::BDiscrete { finite_part, rank } => {
                let lattice = FgAbGroup::free(*rank);
                format!("B({})_S", finite_part.direct_sum(&lattice))
            }
            StackDescriptor::BDiagonalizable { characters } => format!("BD({characters})_S"),
            StackDescriptor::BGLn { n } => format!("BGL_{n},S"),
            StackDescriptor::BAbelianVariety { curve } => format!("BE over {}, {}", curve.field, curve.equation()),
            StackDescriptor::QuotientGoodModuli => "[Spec A / G]".into(),
        }
    }

    fn has_section(&self) -> bool {
        matches!(
            self,
            StackDescriptor::BDiscrete { .. } | StackDescriptor::BDiagonalizable { .. } | StackDescriptor::BGLn { .. }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    T1,
    M1,
    M2,
    M3,
    M4,
}

pub struct RuleInfo {
    pub id: RuleId,
    pub anchor: &'static str,
    pub statement: &'static str,
}

pub const REGISTRY: [RuleInfo; 14] = [
    RuleInfo {
        id: RuleId::R1,
        anchor: "descent along finite flat covers",
        statement: "finite, flat, finitely presented, surjective X' -> X with Br = Br' on X' and X gives SBMI",
    },
    RuleInfo {
        id: RuleId::R2,
        anchor: "morphisms admitting a section",
        statement: "if X -> S admits a section, Br = Br' for X implies Br = Br' for S",
    },
    RuleInfo {
        id: RuleId::R3,
        anchor: "extensions with finite flat quotient",
        statement: "for 0 -> G1 -> G2 -> G3 -> 0 with G3 finite flat, SBMI for BG1 gives SBMI for BG2",
    },
    RuleInfo {
        id: RuleId::R4,
        anchor: "rank criterion for discrete abelian groups",
        statement: "BG_S is SBMI for all S iff the finitely generated abelian group G has rank at most 1",
    },
    RuleInfo {
        id: RuleId::R5,
        anchor: "diagonalizable groups",
        statement: "BD_S satisfies SBMI for every diagonalizable group D",
    },
    RuleInfo {
        id: RuleId::R6,
        anchor: "general linear groups over normal bases",
        statement: "for S noetherian and normal, Br = Br' for S iff Br = Br' for BGL_n,S",
    },
    RuleInfo {
        id: RuleId::R7,
        anchor: "Z^2 classifying stack over a base with trivial bundles",
        statement: "Br(BZ^2_A) = Br(A) and Br'(BZ^2_A) = Br'(A) + (A^x)_tors",
    },
    RuleInfo {
        id: RuleId::R8,
        anchor: "good moduli spaces with henselian local invariants",
        statement: "if A^G is henselian local then Br = Br' for [Spec A / G]",
    },
    RuleInfo {
        id: RuleId::R9,
        anchor: "abelian varieties over a field",
        statement: "Br = Br' for BA iff Pic^0_{A/k}(k) is torsion-free",
    },
    RuleInfo {
        id: RuleId::T1,
        anchor: "definition of SBMI",
        statement: "SBMI for X -> S and Br = Br' for S give Br = Br' for X",
    },
    RuleInfo {
        id: RuleId::M1,
        anchor: "split sequence for BZ",
        statement: "Br'(BZ_S) = Pic(S)_tors + Br'(S)",
    },
    RuleInfo {
        id: RuleId::M2,
        anchor: "bottom row acyclicity for tori",
        statement: "Br'(BT_S) = Br'(S) for a split torus over a normal base",
    },
    RuleInfo {
        id: RuleId::M3,
        anchor: "pullback along BT -> BGL_n",
        statement: "Br'(BGL_n,S) = Br'(S) over a normal integral base",
    },
    RuleInfo {
        id: RuleId::M4,
        anchor: "cohomology of BA over a field",
        statement: "H^2(BA) = Br(k) + Pic^0_{A/k}(k), so Br'(BA) = Br(k) + Pic^0(k)_tors",
    },
];

pub fn rule_info(id: RuleId) -> &'static RuleInfo {
    REGISTRY.iter().find(|r| r.id == id).expect("every rule is registered")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// SBMI or a Brauer verdict for the stack itself.
    Decide,
    /// Consequences of the decision under the base flags.
    Derive,
    /// A group model for `Br′` of the stack.
    Model,
}

const PHASES: [Phase; 3] = [Phase::Decide, Phase::Derive, Phase::Model];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Decisive,
    Corroborating,
    Supporting,
    Derived,
    Blocked,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Effect {
    Conclude(Conclusion),
    Derive(Conclusion),
    Model(FgAbGroup),
    Support,
    Unmet(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: RuleId,
    pub anchor: String,
    pub phase: Phase,
    pub role: Role,
    pub effect: Effect,
    pub inputs: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub stack: String,
    pub conclusion: Conclusion,
    /// Brauer-map verdicts that follow from the conclusion and the base flags.
    pub derived: Vec<Conclusion>,
    pub br_prime_model: Option<FgAbGroup>,
    pub unmet_hypothesis: Option<String>,
    pub trace: Vec<TraceStep>,
}

impl Verdict {
    fn empty(stack: String) -> Self {
        Verdict {
            stack,
            conclusion: Conclusion::Unknown,
            derived: Vec::new(),
            br_prime_model: None,
            unmet_hypothesis: None,
            trace: Vec::new(),
        }
    }

    fn decided(&self) -> bool {
        self.trace.iter().any(|s| s.role == Role::Decisive)
    }

    /// Whether `Br = Br′` holds for the stack, when settled.
    pub fn brauer_map_surjective(&self) -> Option<bool> {
        std::iter::once(&self.conclusion)
            .chain(&self.derived)
            .find_map(|c| match c {
                Conclusion::BrEqualsBrPrime => Some(true),
                Conclusion::BrNotEqual => Some(false),
                _ => None,
            })
    }

    pub fn rules(&self) -> Vec<RuleId> {
        self.trace.iter().map(|s| s.rule).collect()
    }
}

struct Context<'a> {
    d: &'a StackDescriptor,
    s: &'a SchemeInvariants,
    torsion: Option<TorsionReport>,
}

impl<'a> Context<'a> {
    fn new(d: &'a StackDescriptor, s: &'a SchemeInvariants) -> Result<Self, VerdictError> {
        s.validate()?;
        let torsion = match d {
            StackDescriptor::BDiscrete { finite_part, .. } if !finite_part.is_finite() => {
                return Err(VerdictError::Malformed("finite_part must be finite".into()))
            }
            StackDescriptor::BGLn { n } if *n == 0 => {
                return Err(VerdictError::Malformed("BGL_n needs n >= 1".into()))
            }
            StackDescriptor::BAbelianVariety { curve } => {
                Some(curve.torsion().map_err(|e| VerdictError::Malformed(e.to_string()))?)
            }
            _ => None,
        };
        Ok(Context { d, s, torsion })
    }
}

type Firing = (Effect, BTreeMap<String, String>);

fn inputs<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn fire(rule: RuleId, phase: Phase, ctx: &Context, partial: &Verdict) -> Option<Firing> {
    use Phase::*;
    use StackDescriptor as D;
    let s = ctx.s;
    let flags = s.flags;
    let base = flags.br_equals_br_prime;
    match (rule, phase, ctx.d) {
        (RuleId::R1, Decide, D::BDiscrete { finite_part, rank: 0 }) => Some((
            Effect::Conclude(Conclusion::SBMIHolds),
            inputs([
                ("G", finite_part.to_string()),
                ("cover", "S -> BG_S is finite flat of degree |G|".into()),
            ]),
        )),
        (RuleId::R2, Decide, D::BDiscrete { rank, .. }) if *rank <= 1 => {
            Some((Effect::Support, inputs([("section", "trivial torsor S -> BG_S".into())])))
        }
        (RuleId::R2, Decide, D::BDiagonalizable { .. }) => {
            Some((Effect::Support, inputs([("section", "trivial torsor S -> BD_S".into())])))
        }
        (RuleId::R2, Decide, D::BGLn { .. }) if flags.noetherian_normal.is_yes() => {
            Some((Effect::Support, inputs([("section", "trivial torsor S -> BGL_n,S".into())])))
        }
        (RuleId::R2, Derive, d) if d.has_section() && base == Tristate::No => Some((
            Effect::Derive(Conclusion::BrNotEqual),
            inputs([("base br_equals_br_prime", "no".into())]),
        )),
        (RuleId::R3, Decide, D::BDiscrete { finite_part, rank }) if *rank <= 1 && !finite_part.is_trivial() => Some((
            Effect::Support,
            inputs([
                ("extension", format!("0 -> Z^{rank} -> G -> {finite_part} -> 0")),
                ("finite quotient", finite_part.to_string()),
            ]),
        )),
        (RuleId::R3, Decide, D::BDiagonalizable { characters }) if !characters.is_torsion_free() => Some((
            Effect::Support,
            inputs([("finite quotient", format!("D({})", characters.torsion_part()))]),
        )),
        (RuleId::R4, Decide, D::BDiscrete { finite_part, rank }) => Some((
            Effect::Conclude(if *rank <= 1 {
                Conclusion::SBMIHolds
            } else {
                Conclusion::SBMIFails
            }),
            inputs([("rank", rank.to_string()), ("finite part", finite_part.to_string())]),
        )),
        (RuleId::R5, Decide, D::BDiagonalizable { characters }) => {
            let mut i = inputs([("characters", characters.to_string())]);
            if !flags.noetherian_normal.is_yes() {
                i.insert("unchecked axiom".into(), "H^1(X, M) is torsion-free".into());
            }
            Some((Effect::Conclude(Conclusion::SBMIHolds), i))
        }
        (RuleId::R6, Decide, D::BGLn { n }) => {
            if flags.noetherian_normal.is_yes() {
                Some((
                    Effect::Conclude(Conclusion::SBMIHolds),
                    inputs([("n", n.to_string()), ("noetherian_normal", "yes".into())]),
                ))
            } else {
                Some((Effect::Unmet("noetherian_normal".into()), inputs([("n", n.to_string())])))
            }
        }
        (RuleId::R7, Decide, D::BDiscrete { rank, .. }) if *rank >= 2 && s.pic.is_trivial() => Some((
            Effect::Support,
            inputs([
                ("pic", s.pic.to_string()),
                ("units_torsion", s.units_torsion.to_string()),
                ("assumption", "vector bundles on S are trivial".into()),
            ]),
        )),
        (RuleId::R7, Derive, D::BDiscrete { rank, .. })
            if *rank >= 2 && s.pic.is_trivial() && !s.units_torsion.is_trivial() =>
        {
            Some((
                Effect::Derive(Conclusion::BrNotEqual),
                inputs([
                    ("units_torsion", s.units_torsion.to_string()),
                    ("witness", "class of Br'(BZ^2_S) from (A^x)_tors, pulled back along G -> Z^2".into()),
                ]),
            ))
        }
        (RuleId::R7, Model, D::BDiscrete { finite_part, rank: 2 })
            if finite_part.is_trivial() && s.pic.is_trivial() =>
        {
            Some((
                Effect::Model(s.br_prime.direct_sum(&s.units_torsion)),
                inputs([("br_prime", s.br_prime.to_string()), ("units_torsion", s.units_torsion.to_string())]),
            ))
        }
        (RuleId::R8, Decide, D::QuotientGoodModuli) => {
            if flags.henselian_local_gms.is_yes() {
                Some((
                    Effect::Conclude(Conclusion::BrEqualsBrPrime),
                    inputs([("henselian_local_gms", "yes".into())]),
                ))
            } else {
                Some((Effect::Unmet("henselian_local_gms".into()), BTreeMap::new()))
            }
        }
        (RuleId::R9, Decide, D::BAbelianVariety { curve }) => {
            let t = ctx.torsion.as_ref().expect("computed with the context");
            let g = &t.structure.group;
            Some((
                Effect::Conclude(if g.is_trivial() {
                    Conclusion::BrEqualsBrPrime
                } else {
                    Conclusion::BrNotEqual
                }),
                inputs([
                    ("curve", curve.equation()),
                    ("field", curve.field.to_string()),
                    ("torsion of Pic0(E)(k)", g.to_string()),
                    ("identification", "Pic0(E)(k) = E(k)".into()),
                ]),
            ))
        }
        (RuleId::T1, Derive, _) if partial.conclusion == Conclusion::SBMIHolds && base.is_yes() => Some((
            Effect::Derive(Conclusion::BrEqualsBrPrime),
            inputs([("base br_equals_br_prime", "yes".into())]),
        )),
        (RuleId::M1, Model, D::BDiscrete { finite_part, rank }) if finite_part.is_trivial() && *rank <= 1 => {
            let model = if *rank == 1 {
                s.pic_torsion.direct_sum(&s.br_prime)
            } else {
                s.br_prime.clone()
            };
            Some((
                Effect::Model(model),
                inputs([
                    ("rank", rank.to_string()),
                    ("pic_torsion", s.pic_torsion.to_string()),
                    ("br_prime", s.br_prime.to_string()),
                ]),
            ))
        }
        (RuleId::M2, Model, D::BDiagonalizable { characters })
            if characters.is_torsion_free() && flags.noetherian_normal.is_yes() =>
        {
            Some((
                Effect::Model(s.br_prime.clone()),
                inputs([("torus rank", characters.rank().to_string()), ("br_prime", s.br_prime.to_string())]),
            ))
        }
        (RuleId::M3, Model, D::BGLn { n }) if flags.noetherian_normal.is_yes() && flags.integral.is_yes() => Some((
            Effect::Model(s.br_prime.clone()),
            inputs([("n", n.to_string()), ("br_prime", s.br_prime.to_string())]),
        )),
        (RuleId::M4, Model, D::BAbelianVariety { .. }) => {
            let t = &ctx.torsion.as_ref().expect("computed with the context").structure.group;
            Some((
                Effect::Model(s.br_prime.direct_sum(t)),
                inputs([("Br(k) slot", s.br_prime.to_string()), ("torsion of Pic0", t.to_string())]),
            ))
        }
        _ => None,
    }
}

fn apply(v: &mut Verdict, rule: RuleId, phase: Phase, (effect, inputs): Firing) {
    let role = match &effect {
        Effect::Conclude(c) => {
            if v.decided() {
                debug_assert_eq!(v.conclusion, *c, "rules disagree");
                Role::Corroborating
            } else {
                v.conclusion = *c;
                Role::Decisive
            }
        }
        Effect::Derive(c) => {
            if !v.derived.contains(c) {
                v.derived.push(*c);
            }
            Role::Derived
        }
        Effect::Model(g) => {
            v.br_prime_model.get_or_insert_with(|| g.clone());
            Role::Derived
        }
        Effect::Support => Role::Supporting,
        Effect::Unmet(h) => {
            v.unmet_hypothesis.get_or_insert_with(|| h.clone());
            Role::Blocked
        }
    };
    v.trace.push(TraceStep {
        rule,
        anchor: rule_info(rule).anchor.to_string(),
        phase,
        role,
        effect,
        inputs,
    });
}

fn close_phase(v: &mut Verdict, phase: Phase) {
    if phase == Phase::Decide {
        if v.decided() {
            v.unmet_hypothesis = None;
        } else {
            v.unmet_hypothesis.get_or_insert_with(|| "no applicable rule".into());
        }
    }
}

pub fn evaluate(d: &StackDescriptor, s: &SchemeInvariants) -> Result<Verdict, VerdictError> {
    let ctx = Context::new(d, s)?;
    let mut v = Verdict::empty(d.label());
    for phase in PHASES {
        for info in &REGISTRY {
            if let Some(f) = fire(info.id, phase, &ctx, &v) {
                apply(&mut v, info.id, phase, f);
            }
        }
        close_phase(&mut v, phase);
    }
    Ok(v)
}

/// Re-applies the rules named in `verdict.trace`, checking that each one
/// fires with the recorded effect and inputs, and that the result matches.
pub fn replay(d: &StackDescriptor, s: &SchemeInvariants, verdict: &Verdict) -> Result<Verdict, VerdictError> {
    let ctx = Context::new(d, s)?;
    let mut v = Verdict::empty(d.label());
    let mut steps = verdict.trace.iter().enumerate().peekable();
    for phase in PHASES {
        while let Some((i, step)) = steps.next_if(|(_, st)| st.phase == phase) {
            let mismatch = |reason: &str| VerdictError::ReplayMismatch {
                step: i,
                reason: reason.to_string(),
            };
            let firing = fire(step.rule, phase, &ctx, &v).ok_or_else(|| mismatch("rule does not fire"))?;
            if firing.0 != step.effect || firing.1 != step.inputs {
                return Err(mismatch("different effect or inputs"));
            }
            apply(&mut v, step.rule, phase, firing);
            if v.trace.last().map(|t| t.role) != Some(step.role) {
                return Err(mismatch("different role"));
            }
        }
        close_phase(&mut v, phase);
    }
    if let Some((i, _)) = steps.next() {
        return Err(VerdictError::ReplayMismatch {
            step: i,
            reason: "steps out of phase order".into(),
        });
    }
    if &v != verdict {
        return Err(VerdictError::ReplayMismatch {
            step: verdict.trace.len(),
            reason: "replayed verdict differs".into(),
        });
    }
    Ok(v)
}

/// `Br′` of the stack, for the kinds with a known model.
pub fn br_prime_of_classifying(
    d: &StackDescriptor,
    s: &SchemeInvariants,
) -> Result<(FgAbGroup, Vec<TraceStep>), VerdictError> {
    let v = evaluate(d, s)?;
    let trace: Vec<TraceStep> = v.trace.into_iter().filter(|t| t.phase == Phase::Model).collect();
    match v.br_prime_model {
        Some(g) => Ok((g, trace)),
        None => Err(VerdictError::Unsupported(d.label())),
    }
}

/// A stack descriptor together with invariants of the base, as read by the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictRequest {
    pub stack: StackDescriptor,
    #[serde(default = "SchemeInvariants::blank")]
    pub base: SchemeInvariants,
}
