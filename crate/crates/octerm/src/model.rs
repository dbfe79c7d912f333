//! The one-counter game data model and its text format.
//!
//! A model is a list of named control states, each owned by Max, Min, or
//! chance, and a list of rules `(src, delta, dst)` with `delta` in
//! `{-1, 0, +1}`. Rules out of chance states carry a positive rational
//! probability; per state these probabilities must sum to exactly 1.
//!
//! Text format (UTF-8, line oriented, `#` comments):
//!
//! ```text
//! state <name> max|min|rand
//! rule <src> <+1|0|-1> <dst> [<num>/<den>]
//! ```
//!
//! Counter values are unbounded signed integers; a run terminates when the
//! counter reaches a value <= 0, and an initial counter of 0 counts as
//! already terminated. Declaration order of states and rules is kept and
//! every downstream iteration follows it, so all outputs are deterministic.

use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

pub type StateId = usize;
pub type RuleId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Max,
    Min,
    Random,
}

impl Owner {
    pub fn keyword(self) -> &'static str {
        match self {
            Owner::Max => "max",
            Owner::Min => "min",
            Owner::Random => "rand",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub owner: Owner,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub src: StateId,
    pub delta: i32,
    pub dst: StateId,
    /// Present exactly when `src` is a chance state.
    pub prob: Option<Rational>,
}

/// A one-counter simple stochastic game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OcSsg {
    pub states: Vec<State>,
    pub rules: Vec<Rule>,
    outgoing: Vec<Vec<RuleId>>,
}

/// A configuration: control state plus counter value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    pub state: StateId,
    pub counter: i64,
}

/// A pure strategy that looks only at the current control state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterlessStrategy {
    pub owner: Owner,
    pub choice: BTreeMap<StateId, RuleId>,
}

impl CounterlessStrategy {
    pub fn empty(owner: Owner) -> Self {
        CounterlessStrategy {
            owner,
            choice: BTreeMap::new(),
        }
    }

    pub fn rule_at(&self, state: StateId) -> Option<RuleId> {
        self.choice.get(&state).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid model: {0}")]
    Invalid(Diagnostic),
    #[error("unknown builtin example `{0}`")]
    UnknownExample(String),
}

impl OcSsg {
    /// Assembles a model without checking the validation invariants; call
    /// [`validate`] to obtain diagnostics.
    pub fn from_parts(states: Vec<State>, rules: Vec<Rule>) -> OcSsg {
        let mut outgoing = vec![Vec::new(); states.len()];
        for (id, rule) in rules.iter().enumerate() {
            if rule.src < states.len() {
                outgoing[rule.src].push(id);
            }
        }
        OcSsg {
            states,
            rules,
            outgoing,
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn owner(&self, q: StateId) -> Owner {
        self.states[q].owner
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.states[q].name
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name)
    }

    pub fn outgoing(&self, q: StateId) -> &[RuleId] {
        &self.outgoing[q]
    }

    pub fn states_with_owner(&self, owner: Owner) -> impl Iterator<Item = StateId> + '_ {
        self.states
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.owner == owner)
            .map(|(i, _)| i)
    }

    pub fn is_max_only(&self) -> bool {
        self.states.iter().all(|s| s.owner != Owner::Min)
    }

    pub fn is_min_only(&self) -> bool {
        self.states.iter().all(|s| s.owner != Owner::Max)
    }

    pub fn has_owner(&self, owner: Owner) -> bool {
        self.states.iter().any(|s| s.owner == owner)
    }

    /// Serializes back to the text format: states then rules, declaration order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for state in &self.states {
            out.push_str(&format!("state {} {}\n", state.name, state.owner.keyword()));
        }
        for rule in &self.rules {
            let delta = match rule.delta {
                1 => "+1",
                0 => "0",
                -1 => "-1",
                other => {
                    // Out-of-range deltas only exist in unvalidated models.
                    out.push_str(&format!(
                        "rule {} {} {}\n",
                        self.states[rule.src].name, other, self.states[rule.dst].name
                    ));
                    continue;
                }
            };
            match &rule.prob {
                Some(p) => out.push_str(&format!(
                    "rule {} {} {} {}\n",
                    self.states[rule.src].name,
                    delta,
                    self.states[rule.dst].name,
                    format_rational(p)
                )),
                None => out.push_str(&format!(
                    "rule {} {} {}\n",
                    self.states[rule.src].name, delta, self.states[rule.dst].name
                )),
            }
        }
        out
    }
}

/// Parses and validates a model; any diagnostic is promoted to an error.
pub fn parse_ocssg(text: &str) -> Result<OcSsg, ModelError> {
    let model = parse_syntax(text)?;
    let diagnostics = validate(&model);
    if let Some(first) = diagnostics.into_iter().next() {
        return Err(ModelError::Invalid(first));
    }
    Ok(model)
}

/// Parses the line syntax without semantic validation.
pub fn parse_syntax(text: &str) -> Result<OcSsg, ModelError> {
    let mut states: Vec<State> = Vec::new();
    let mut names: BTreeMap<String, StateId> = BTreeMap::new();
    let mut raw_rules: Vec<(usize, String, i32, String, Option<Rational>)> = Vec::new();

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let mut tokens = content.split_whitespace();
        let Some(head) = tokens.next() else { continue };
        let column = |token: &str| raw_line.find(token).map(|p| p + 1).unwrap_or(1);
        match head {
            "state" => {
                let name = tokens.next().ok_or_else(|| ModelError::Syntax {
                    line,
                    column: raw_line.len() + 1,
                    message: "missing state name".into(),
                })?;
                let owner_tok = tokens.next().ok_or_else(|| ModelError::Syntax {
                    line,
                    column: raw_line.len() + 1,
                    message: "missing owner (max|min|rand)".into(),
                })?;
                let owner = match owner_tok {
                    "max" => Owner::Max,
                    "min" => Owner::Min,
                    "rand" => Owner::Random,
                    other => {
                        return Err(ModelError::Syntax {
                            line,
                            column: column(other),
                            message: format!("unknown owner `{other}` (expected max|min|rand)"),
                        })
                    }
                };
                if let Some(extra) = tokens.next() {
                    return Err(ModelError::Syntax {
                        line,
                        column: column(extra),
                        message: format!("unexpected token `{extra}`"),
                    });
                }
                if names.contains_key(name) {
                    return Err(ModelError::Syntax {
                        line,
                        column: column(name),
                        message: format!("duplicate state `{name}`"),
                    });
                }
                names.insert(name.to_string(), states.len());
                states.push(State {
                    name: name.to_string(),
                    owner,
                });
            }
            "rule" => {
                let src = tokens.next().ok_or_else(|| ModelError::Syntax {
                    line,
                    column: raw_line.len() + 1,
                    message: "missing rule source state".into(),
                })?;
                let delta_tok = tokens.next().ok_or_else(|| ModelError::Syntax {
                    line,
                    column: raw_line.len() + 1,
                    message: "missing counter delta".into(),
                })?;
                let delta = match delta_tok {
                    "+1" => 1,
                    "0" => 0,
                    "-1" => -1,
                    other => {
                        return Err(ModelError::Syntax {
                            line,
                            column: column(other),
                            message: format!("delta out of range: `{other}` (expected +1|0|-1)"),
                        })
                    }
                };
                let dst = tokens.next().ok_or_else(|| ModelError::Syntax {
                    line,
                    column: raw_line.len() + 1,
                    message: "missing rule target state".into(),
                })?;
                let prob = match tokens.next() {
                    Some(tok) => Some(parse_rational(tok).map_err(|e| ModelError::Syntax {
                        line,
                        column: column(tok),
                        message: format!("bad probability: {e}"),
                    })?),
                    None => None,
                };
                if let Some(extra) = tokens.next() {
                    return Err(ModelError::Syntax {
                        line,
                        column: column(extra),
                        message: format!("unexpected token `{extra}`"),
                    });
                }
                raw_rules.push((line, src.to_string(), delta, dst.to_string(), prob));
            }
            other => {
                return Err(ModelError::Syntax {
                    line,
                    column: column(other),
                    message: format!("unknown directive `{other}`"),
                });
            }
        }
    }

    let mut rules = Vec::with_capacity(raw_rules.len());
    for (line, src, delta, dst, prob) in raw_rules {
        let src_id = *names.get(&src).ok_or_else(|| ModelError::Syntax {
            line,
            column: 1,
            message: format!("rule references undeclared state `{src}`"),
        })?;
        let dst_id = *names.get(&dst).ok_or_else(|| ModelError::Syntax {
            line,
            column: 1,
            message: format!("rule references undeclared state `{dst}`"),
        })?;
        rules.push(Rule {
            src: src_id,
            delta,
            dst: dst_id,
            prob,
        });
    }
    Ok(OcSsg::from_parts(states, rules))
}

/// Checks every model invariant; an empty list means the model is valid.
pub fn validate(model: &OcSsg) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (id, rule) in model.rules.iter().enumerate() {
        let subject = format!("rule #{id}");
        if rule.src >= model.states.len() || rule.dst >= model.states.len() {
            out.push(Diagnostic {
                subject,
                message: "rule references an undeclared state".into(),
            });
            continue;
        }
        if !(-1..=1).contains(&rule.delta) {
            out.push(Diagnostic {
                subject: subject.clone(),
                message: format!("delta out of range: {}", rule.delta),
            });
        }
        let owner = model.owner(rule.src);
        match (&rule.prob, owner) {
            (Some(p), Owner::Random) => {
                if !p.is_positive() {
                    out.push(Diagnostic {
                        subject,
                        message: format!("probability {} is not positive", format_rational(p)),
                    });
                }
            }
            (None, Owner::Random) => out.push(Diagnostic {
                subject,
                message: format!(
                    "rule out of chance state `{}` has no probability",
                    model.name(rule.src)
                ),
            }),
            (Some(_), _) => out.push(Diagnostic {
                subject,
                message: format!(
                    "rule out of {} state `{}` must not carry a probability",
                    owner.keyword(),
                    model.name(rule.src)
                ),
            }),
            (None, _) => {}
        }
    }
    // Duplicate (src, delta, dst) triples: the rule set is a set.
    let mut seen = BTreeMap::new();
    for (id, rule) in model.rules.iter().enumerate() {
        if rule.src >= model.states.len() || rule.dst >= model.states.len() {
            continue;
        }
        if let Some(prev) = seen.insert((rule.src, rule.delta, rule.dst), id) {
            out.push(Diagnostic {
                subject: format!("rule #{id}"),
                message: format!("duplicate of rule #{prev}"),
            });
        }
    }
    for (id, state) in model.states.iter().enumerate() {
        if model.outgoing(id).is_empty() {
            out.push(Diagnostic {
                subject: format!("state {}", state.name),
                message: "state has no outgoing rule".into(),
            });
        }
        if state.owner == Owner::Random {
            let sum: Rational = model
                .outgoing(id)
                .iter()
                .filter_map(|&r| model.rules[r].prob.clone())
                .sum();
            if !model.outgoing(id).is_empty() && !sum.is_one() {
                out.push(Diagnostic {
                    subject: format!("state {}", state.name),
                    message: format!("probabilities sum to {} != 1", format_rational(&sum)),
                });
            }
        }
    }
    out
}

/// The built-in models used throughout the test-suite and the docs.
///
/// * `fig2` - a five-state maximizing OC-MDP whose termination values from
///   state `s` are `(2^i+1)/2^(i+1)`; Max has no optimal strategy there.
/// * `fig2-no-st` - same model without the rule `(s,0,t)`; values `2^-i`.
/// * `biased-walk` - a single chance state stepping +1 w.p. 2/3 and -1
///   w.p. 1/3; gambler's-ruin value `(1/2)^i`.
/// * `idle-loop` - a single Max state with a zero-delta self-loop.
pub fn builtin_example(name: &str) -> Result<OcSsg, ModelError> {
    let text = match name {
        "fig2" => {
            "state s max\n\
             state r rand\n\
             state t rand\n\
             state g rand\n\
             state b rand\n\
             rule s 0 r\n\
             rule s 0 t\n\
             rule r +1 s 2/3\n\
             rule r -1 s 1/3\n\
             rule t 0 g 1/2\n\
             rule t 0 b 1/2\n\
             rule g -1 g 1/1\n\
             rule b +1 b 1/1\n"
        }
        "fig2-no-st" => {
            "state s max\n\
             state r rand\n\
             state t rand\n\
             state g rand\n\
             state b rand\n\
             rule s 0 r\n\
             rule r +1 s 2/3\n\
             rule r -1 s 1/3\n\
             rule t 0 g 1/2\n\
             rule t 0 b 1/2\n\
             rule g -1 g 1/1\n\
             rule b +1 b 1/1\n"
        }
        "biased-walk" => {
            "state q rand\n\
             rule q +1 q 2/3\n\
             rule q -1 q 1/3\n"
        }
        "idle-loop" => {
            "state q max\n\
             rule q 0 q\n"
        }
        other => return Err(ModelError::UnknownExample(other.to_string())),
    };
    parse_ocssg(text)
}

pub const BUILTIN_NAMES: &[&str] = &["fig2", "fig2-no-st", "biased-walk", "idle-loop"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn minimal_round_trip() {
        let text = "state q rand\nrule q +1 q 2/3\nrule q -1 q 1/3";
        let model = parse_ocssg(text).unwrap();
        assert_eq!(model.state_count(), 1);
        assert_eq!(model.rules.len(), 2);
        let reparsed = parse_ocssg(&model.to_text()).unwrap();
        assert_eq!(model, reparsed);
    }

    #[test]
    fn probability_sum_violation() {
        let text = "state q rand\nrule q +1 q 2/3\nrule q -1 q 1/2";
        let err = parse_ocssg(text).unwrap_err();
        match err {
            ModelError::Invalid(d) => assert!(d.message.contains("7/6"), "{d}"),
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn delta_out_of_range() {
        let err = parse_ocssg("state q rand\nrule q +2 q 1/1").unwrap_err();
        match err {
            ModelError::Syntax { message, .. } => {
                assert!(message.contains("delta out of range"), "{message}")
            }
            other => panic!("expected syntax error, got {other}"),
        }
    }

    #[test]
    fn dangling_state_rejected() {
        let err = parse_ocssg("state q rand\nrule q 0 z 1/1").unwrap_err();
        assert!(matches!(err, ModelError::Syntax { .. }));
    }

    #[test]
    fn fig2_is_valid() {
        let model = builtin_example("fig2").unwrap();
        assert_eq!(model.state_count(), 5);
        assert_eq!(model.rules.len(), 8);
        assert!(validate(&model).is_empty());
    }

    #[test]
    fn fig2_no_st_shape() {
        let model = builtin_example("fig2-no-st").unwrap();
        assert_eq!(model.state_count(), 5);
        assert_eq!(model.rules.len(), 7);
    }

    #[test]
    fn biased_walk_shape() {
        let model = builtin_example("biased-walk").unwrap();
        assert_eq!(model.state_count(), 1);
        assert_eq!(model.rules.len(), 2);
        assert_eq!(model.rules[0].prob, Some(rat(2, 3)));
    }

    #[test]
    fn unknown_example_errors() {
        assert!(builtin_example("zzz").is_err());
    }

    #[test]
    fn zero_rule_state_diagnosed() {
        let model = parse_syntax("state a max\nstate b rand\nrule b 0 b 1/1").unwrap();
        let diags = validate(&model);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].subject.contains('a'));
    }

    #[test]
    fn validate_flags_nine_tenths() {
        let model = parse_syntax("state q rand\nrule q 0 q 9/10").unwrap();
        let diags = validate(&model);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("9/10"));
    }
}
