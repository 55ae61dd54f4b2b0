use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};

use crate::boolfn::BooleanFunction;
use crate::error::{check_dim, Error, Result};
use crate::lindist::linear_distance;
use crate::limits::Limits;
use crate::Rational;

use super::channel::{Direction, Message, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Accept,
    Reject,
}

impl Outcome {
    pub fn from_accept(accept: bool) -> Outcome {
        if accept {
            Outcome::Accept
        } else {
            Outcome::Reject
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Accept => "accept",
            Outcome::Reject => "reject",
        }
    }
}

/// Which side of the promise an instance falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundTruth {
    /// `delta_L(f, g) <= epsilon`.
    Near,
    /// `delta_L(f, g) >= epsilon + omega`.
    Far,
    /// Not certified, or strictly between the two thresholds.
    Unknown,
}

/// Alice's `f`, Bob's `g`, and the promise parameters.
#[derive(Clone, Debug)]
pub struct PromiseInstance {
    pub f: BooleanFunction,
    pub g: BooleanFunction,
    pub epsilon: Rational,
    pub omega: Rational,
    pub ground_truth: GroundTruth,
    /// Exact `delta_L(f, g)` when it was computed.
    pub distance: Option<Rational>,
}

impl PromiseInstance {
    /// Labels the instance with the exact linear distance when `n` is within
    /// the GL guard, and as [`GroundTruth::Unknown`] otherwise.
    pub fn new(
        f: BooleanFunction,
        g: BooleanFunction,
        epsilon: Rational,
        omega: Rational,
        limits: &Limits,
    ) -> Result<Self> {
        check_dim(f.arity(), g.arity())?;
        if epsilon.is_negative() || !omega.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "need epsilon >= 0 and omega > 0, got {epsilon} and {omega}"
            )));
        }
        let distance = if f.arity() <= limits.gl_max_n {
            Some(linear_distance(&f, &g, limits)?.value)
        } else {
            None
        };
        let ground_truth = match &distance {
            Some(d) if *d <= epsilon => GroundTruth::Near,
            Some(d) if *d >= &epsilon + &omega => GroundTruth::Far,
            _ => GroundTruth::Unknown,
        };
        Ok(PromiseInstance {
            f,
            g,
            epsilon,
            omega,
            ground_truth,
            distance,
        })
    }

    /// An instance with a caller-supplied label and no distance check.
    pub fn labeled(
        f: BooleanFunction,
        g: BooleanFunction,
        epsilon: Rational,
        omega: Rational,
        ground_truth: GroundTruth,
    ) -> Result<Self> {
        check_dim(f.arity(), g.arity())?;
        Ok(PromiseInstance {
            f,
            g,
            epsilon,
            omega,
            ground_truth,
            distance: None,
        })
    }

    pub fn arity(&self) -> usize {
        self.f.arity()
    }

    pub fn input(&self, role: Role) -> &BooleanFunction {
        match role {
            Role::Alice => &self.f,
            Role::Bob => &self.g,
        }
    }

    pub fn expected(&self) -> Option<Outcome> {
        match self.ground_truth {
            GroundTruth::Near => Some(Outcome::Accept),
            GroundTruth::Far => Some(Outcome::Reject),
            GroundTruth::Unknown => None,
        }
    }
}

/// Per-run numbers; each party fills in what it knows.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Stats {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub promise: Option<GroundTruth>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ceiling_a: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ceiling_b: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub builder: Option<Role>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler_attempts: Option<u64>,
    /// `delta(f, F)` of the builder's certified sign representation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_distance: Option<String>,
    /// `delta_L(F, g)` computed by the receiver.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub received_distance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds_budget: Option<usize>,
}

impl Stats {
    /// Field-wise union; `self` wins where both are set.
    pub fn merge(self, other: Stats) -> Stats {
        Stats {
            promise: self.promise.or(other.promise),
            ceiling_a: self.ceiling_a.or(other.ceiling_a),
            ceiling_b: self.ceiling_b.or(other.ceiling_b),
            builder: self.builder.or(other.builder),
            ell: self.ell.or(other.ell),
            samples: self.samples.or(other.samples),
            sampler_attempts: self.sampler_attempts.or(other.sampler_attempts),
            sample_distance: self.sample_distance.or(other.sample_distance),
            received_distance: self.received_distance.or(other.received_distance),
            r: self.r.or(other.r),
            rounds: self.rounds.or(other.rounds),
            rounds_budget: self.rounds_budget.or(other.rounds_budget),
        }
    }
}

/// The audited record of one protocol execution.
#[derive(Clone, Debug, PartialEq)]
pub struct Transcript {
    pub protocol: &'static str,
    pub n: usize,
    pub epsilon: Rational,
    pub omega: Rational,
    /// `None` when the run faulted, or for a remote party that does not learn
    /// the decision.
    pub outcome: Option<Outcome>,
    pub messages: Vec<Message>,
    pub stats: Stats,
    /// Transport framing bits, reported apart from the protocol tally.
    pub framing_bits: u64,
    /// Set when the run ended in a stream fault.
    pub fault: Option<String>,
}

impl Transcript {
    pub fn total_bits(&self) -> u64 {
        self.messages.iter().map(|m| m.len() as u64).sum()
    }

    pub fn bits_in(&self, dir: Direction) -> u64 {
        self.messages
            .iter()
            .filter(|m| m.dir == dir)
            .map(|m| m.len() as u64)
            .sum()
    }

    pub fn bits_a_to_b(&self) -> u64 {
        self.bits_in(Direction::AliceToBob)
    }

    pub fn bits_b_to_a(&self) -> u64 {
        self.bits_in(Direction::BobToAlice)
    }

    pub fn is_valid(&self) -> bool {
        self.fault.is_none()
    }

    pub fn is_accept(&self) -> bool {
        self.outcome == Some(Outcome::Accept)
    }

    pub fn to_json(&self) -> Value {
        let messages: Vec<Value> = self
            .messages
            .iter()
            .map(|m| json!({"dir": m.dir.as_str(), "len": m.len(), "hex": m.hex()}))
            .collect();
        let mut v = json!({
            "protocol": self.protocol,
            "n": self.n,
            "epsilon": self.epsilon.to_string(),
            "omega": self.omega.to_string(),
            "outcome": self.outcome.map(Outcome::as_str),
            "total_bits": self.total_bits(),
            "bits_a_to_b": self.bits_a_to_b(),
            "bits_b_to_a": self.bits_b_to_a(),
            "stats": serde_json::to_value(&self.stats).expect("stats serialize"),
            "messages": messages,
        });
        if let Some(fault) = &self.fault {
            v["fault"] = json!(fault);
        }
        v
    }
}
