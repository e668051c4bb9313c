//! A small neutral integer-program representation, an LP-format writer and an
//! exact evaluator for integral assignments.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Binary,
    Integer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        })
    }
}

/// `(variable index, coefficient)`
pub type Term = (usize, i64);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<Term>,
    pub relation: Relation,
    pub rhs: i64,
}

/// Minimization model over integral variables.
#[derive(Clone, Debug, Default)]
pub struct IpModel {
    name: String,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<Term>,
    index: HashMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub constraint: String,
    pub lhs: i64,
    pub relation: Relation,
    pub rhs: i64,
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    /// Values in model variable order.
    pub values: Vec<i64>,
    pub violations: Vec<Violation>,
    pub objective: i64,
}

impl IpModel {
    pub fn new(name: impl Into<String>) -> Self {
        IpModel { name: name.into(), ..Default::default() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn push_variable(&mut self, var: Variable) -> usize {
        let idx = self.variables.len();
        let previous = self.index.insert(var.name.clone(), idx);
        debug_assert!(previous.is_none(), "duplicate variable {}", var.name);
        self.variables.push(var);
        idx
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        self.push_variable(Variable { name: name.into(), kind: VarKind::Binary, lower: 0, upper: 1 })
    }

    pub fn add_integer(&mut self, name: impl Into<String>, lower: i64, upper: i64) -> usize {
        self.push_variable(Variable { name: name.into(), kind: VarKind::Integer, lower, upper })
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<Term>,
        relation: Relation,
        rhs: i64,
    ) -> Result<()> {
        let name = name.into();
        if let Some(&(bad, _)) = terms.iter().find(|(v, _)| *v >= self.variables.len()) {
            return Err(Error::Precondition(format!("constraint {name} references undeclared variable {bad}")));
        }
        self.constraints.push(Constraint { name, terms, relation, rhs });
        Ok(())
    }

    pub fn set_objective(&mut self, terms: Vec<Term>) {
        self.objective = terms;
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[Term] {
        &self.objective
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn count_kind(&self, kind: VarKind) -> usize {
        self.variables.iter().filter(|v| v.kind == kind).count()
    }

    pub fn count_relation(&self, relation: Relation) -> usize {
        self.constraints.iter().filter(|c| c.relation == relation).count()
    }

    pub fn constraint(&self, name: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    /// Checks bounds and every constraint. Bound violations are reported
    /// under the name `bound:<variable>`.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<Evaluation> {
        let unknown: Vec<String> = assignment.vars.keys().filter(|k| !self.index.contains_key(*k)).cloned().collect();
        if !unknown.is_empty() {
            return Err(Error::UnknownVariables(unknown));
        }
        let mut missing = Vec::new();
        let mut values = Vec::with_capacity(self.variables.len());
        for var in &self.variables {
            match assignment.vars.get(&var.name) {
                Some(&v) => values.push(v),
                None => {
                    missing.push(var.name.clone());
                    values.push(0);
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::MissingVariables(missing));
        }
        let mut violations = Vec::new();
        for (var, &v) in self.variables.iter().zip(&values) {
            if v < var.lower {
                violations.push(Violation {
                    constraint: format!("bound:{}", var.name),
                    lhs: v,
                    relation: Relation::Ge,
                    rhs: var.lower,
                });
            } else if v > var.upper {
                violations.push(Violation {
                    constraint: format!("bound:{}", var.name),
                    lhs: v,
                    relation: Relation::Le,
                    rhs: var.upper,
                });
            }
        }
        for c in &self.constraints {
            let lhs: i64 = c.terms.iter().map(|&(i, k)| k * values[i]).sum();
            if !c.relation.holds(lhs, c.rhs) {
                violations.push(Violation { constraint: c.name.clone(), lhs, relation: c.relation, rhs: c.rhs });
            }
        }
        let objective = self.objective.iter().map(|&(i, k)| k * values[i]).sum();
        Ok(Evaluation { values, violations, objective })
    }

    fn write_terms(&self, out: &mut String, terms: &[Term]) {
        for (n, &(i, k)) in terms.iter().enumerate() {
            let name = &self.variables[i].name;
            let sign = if k < 0 { "-" } else { "+" };
            let mag = k.unsigned_abs();
            if n == 0 {
                if k < 0 {
                    out.push_str("- ");
                }
            } else {
                let _ = write!(out, " {sign} ");
            }
            if mag != 1 {
                let _ = write!(out, "{mag} ");
            }
            out.push_str(name);
        }
    }

    /// CPLEX-style LP text; one constraint per line, in insertion order.
    pub fn to_lp_string(&self) -> Result<String> {
        if self.variables.is_empty() {
            return Err(Error::EmptyModel);
        }
        let mut out = String::new();
        let _ = writeln!(out, "\\ Problem: {}", self.name);
        let _ = writeln!(out, "\\ Binary variables: {}", self.count_kind(VarKind::Binary));
        let _ = writeln!(out, "\\ Integer variables: {}", self.count_kind(VarKind::Integer));
        let _ = writeln!(out, "\\ Constraints: {}", self.constraints.len());
        out.push_str("Minimize\n obj: ");
        if self.objective.is_empty() {
            let _ = write!(out, "0 {}", self.variables[0].name);
        } else {
            self.write_terms(&mut out, &self.objective);
        }
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}: ", c.name);
            self.write_terms(&mut out, &c.terms);
            let _ = writeln!(out, " {} {}", c.relation, c.rhs);
        }
        out.push_str("Bounds\n");
        for v in self.variables.iter().filter(|v| v.kind == VarKind::Integer) {
            let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
        }
        out.push_str("Binary\n");
        for v in self.variables.iter().filter(|v| v.kind == VarKind::Binary) {
            let _ = writeln!(out, " {}", v.name);
        }
        out.push_str("General\n");
        for v in self.variables.iter().filter(|v| v.kind == VarKind::Integer) {
            let _ = writeln!(out, " {}", v.name);
        }
        out.push_str("End\n");
        Ok(out)
    }

    pub fn write_lp(&self, path: &Path) -> Result<()> {
        let text = self.to_lp_string()?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Variable values by name; JSON form `{"vars": {"name": value}}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub vars: BTreeMap<String, i64>,
}

const INTEGRALITY_TOL: f64 = 1e-6;

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: i64) {
        self.vars.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.vars.get(name).copied()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "vars": self.vars })
    }

    /// Reads the `vars` object of a JSON document; other keys are ignored.
    /// Floating values within 1e-6 of an integer are rounded.
    pub fn from_json_value(doc: &serde_json::Value) -> Result<Self> {
        let vars = doc
            .get("vars")
            .and_then(|v| v.as_object())
            .ok_or_else(|| Error::Precondition("assignment needs a `vars` object".into()))?;
        let mut out = Assignment::new();
        for (name, value) in vars {
            let v = if let Some(i) = value.as_i64() {
                i
            } else if let Some(x) = value.as_f64() {
                let r = x.round();
                if (x - r).abs() > INTEGRALITY_TOL {
                    return Err(Error::NonIntegral { name: name.clone(), value: x });
                }
                r as i64
            } else {
                return Err(Error::Precondition(format!("value of `{name}` is not a number")));
            };
            out.set(name.clone(), v);
        }
        Ok(out)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_json_value(&serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> IpModel {
        let mut m = IpModel::new("toy");
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        let n = m.add_integer("n", 0, 5);
        m.add_constraint("pick", vec![(a, 1), (b, 1)], Relation::Eq, 1).unwrap();
        m.add_constraint("cap", vec![(n, 1), (a, -2)], Relation::Ge, 0).unwrap();
        m.set_objective(vec![(n, 1), (b, 3)]);
        m
    }

    #[test]
    fn lp_text_layout() {
        let text = toy().to_lp_string().unwrap();
        let expected = "\\ Problem: toy\n\\ Binary variables: 2\n\\ Integer variables: 1\n\\ Constraints: 2\n\
Minimize\n obj: n + 3 b\nSubject To\n pick: a + b = 1\n cap: n - 2 a >= 0\n\
Bounds\n 0 <= n <= 5\nBinary\n a\n b\nGeneral\n n\nEnd\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn empty_model_is_rejected() {
        assert!(matches!(IpModel::new("none").to_lp_string(), Err(Error::EmptyModel)));
    }

    #[test]
    fn undeclared_variable_rejected() {
        let mut m = toy();
        assert!(m.add_constraint("bad", vec![(7, 1)], Relation::Le, 0).is_err());
    }

    #[test]
    fn evaluation_reports_violations() {
        let m = toy();
        let mut asg = Assignment::new();
        asg.set("a", 1);
        asg.set("b", 1);
        asg.set("n", 9);
        let ev = m.evaluate(&asg).unwrap();
        let names: Vec<&str> = ev.violations.iter().map(|v| v.constraint.as_str()).collect();
        assert_eq!(names, vec!["bound:n", "pick"]);
        assert_eq!(ev.objective, 12);

        asg.vars.remove("n");
        assert!(matches!(m.evaluate(&asg), Err(Error::MissingVariables(v)) if v == vec!["n".to_string()]));
        asg.set("n", 0);
        asg.set("zzz", 0);
        assert!(matches!(m.evaluate(&asg), Err(Error::UnknownVariables(_))));
    }

    #[test]
    fn assignment_json_tolerates_solver_floats() {
        let a = Assignment::from_json_str(r#"{"vars":{"x":0.9999999,"y":0,"z":-2.0},"extra":1}"#).unwrap();
        assert_eq!(a.get("x"), Some(1));
        assert_eq!(a.get("z"), Some(-2));
        assert!(matches!(Assignment::from_json_str(r#"{"vars":{"x":0.5}}"#), Err(Error::NonIntegral { .. })));
        let round = Assignment::from_json_value(&a.to_json()).unwrap();
        assert_eq!(round, a);
    }
}
