//! The poset of fields `K = {K_i}` over a tree-shaped component poset.
//!
//! Each class `i` gets a formal variable `x_i`, and `K_i` is the field of
//! rational functions over ℚ in the variables of the chain `[i, i₀]`. So
//! `j ≤ i` gives `K_i ⊆ K_j` as a literal inclusion of variable sets.

pub mod poly;
pub mod ratfn;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::quiver::{ClassId, ComponentPoset, QuiverError};
pub use poly::{Monomial, Poly, Var};
pub use ratfn::{invert_matrix, rank, RatFn};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("classes `{0}` and `{1}` are incomparable")]
    IncomparableHomes(String, String),
    #[error("K_{from} is not a subfield of K_{to}")]
    NotASubfield { from: String, to: String },
    #[error("`{value}` does not lie in K_{class}")]
    NotInField { value: String, class: String },
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

/// An element of `K_home`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    value: RatFn,
    home: ClassId,
}

impl FieldScalar {
    pub fn value(&self) -> &RatFn {
        &self.value
    }

    pub fn home(&self) -> ClassId {
        self.home
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

/// The fields `K_i`, each described by its variable set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTower {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    root: ClassId,
    field_vars: Vec<BTreeSet<Var>>,
}

impl FieldTower {
    /// The tower with `K_i = ℚ(x_j : j ∈ [i, i₀])`. Requires a tree.
    pub fn new(p: &ComponentPoset) -> Result<Self, ScalarError> {
        let root = p.assert_tree()?;
        let field_vars = p
            .classes()
            .map(|i| p.upper_set(i).into_iter().map(|j| j as Var).collect())
            .collect();
        Ok(Self::build(p, root, field_vars))
    }

    /// The constant system: every class carries the same field `K`.
    pub fn constant(p: &ComponentPoset, vars: &BTreeSet<Var>) -> Result<Self, ScalarError> {
        let root = p.assert_tree()?;
        let field_vars = p.classes().map(|_| vars.clone()).collect();
        Ok(Self::build(p, root, field_vars))
    }

    fn build(p: &ComponentPoset, root: ClassId, field_vars: Vec<BTreeSet<Var>>) -> Self {
        FieldTower {
            names: p.classes().map(|i| p.name(i).to_string()).collect(),
            leq: p
                .classes()
                .map(|i| p.classes().map(|j| p.leq(i, j)).collect())
                .collect(),
            root,
            field_vars,
        }
    }

    pub fn root(&self) -> ClassId {
        self.root
    }

    pub fn num_classes(&self) -> usize {
        self.names.len()
    }

    pub fn class_name(&self, i: ClassId) -> &str {
        &self.names[i]
    }

    pub fn class_by_name(&self, name: &str) -> Option<ClassId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn leq(&self, i: ClassId, j: ClassId) -> bool {
        self.leq[i][j]
    }

    pub fn vars_of(&self, i: ClassId) -> &BTreeSet<Var> {
        &self.field_vars[i]
    }

    /// Whether `value ∈ K_i`.
    pub fn contains(&self, i: ClassId, value: &RatFn) -> bool {
        let vars = &self.field_vars[i];
        value.vars().iter().all(|v| vars.contains(v))
    }

    pub fn var_name(&self, v: Var) -> String {
        format!("x_{}", self.names[v as usize])
    }

    pub fn display(&self, value: &RatFn) -> String {
        value.display_with(&|v| self.var_name(v))
    }

    pub fn scalar(&self, value: RatFn, home: ClassId) -> Result<FieldScalar, ScalarError> {
        if !self.contains(home, &value) {
            return Err(ScalarError::NotInField {
                value: self.display(&value),
                class: self.names[home].clone(),
            });
        }
        Ok(FieldScalar { value, home })
    }

    /// The generator `x_i ∈ K_i`.
    pub fn var(&self, i: ClassId) -> FieldScalar {
        FieldScalar {
            value: RatFn::var(i as Var),
            home: i,
        }
    }

    /// A rational constant, living in `K_{i₀}`.
    pub fn rational(&self, n: i64) -> FieldScalar {
        FieldScalar {
            value: RatFn::from_i64(n),
            home: self.root,
        }
    }

    /// The deeper of two comparable classes.
    fn meet(&self, a: ClassId, b: ClassId) -> Result<ClassId, ScalarError> {
        if self.leq(a, b) {
            Ok(a)
        } else if self.leq(b, a) {
            Ok(b)
        } else {
            Err(ScalarError::IncomparableHomes(
                self.names[a].clone(),
                self.names[b].clone(),
            ))
        }
    }

    pub fn add(&self, a: &FieldScalar, b: &FieldScalar) -> Result<FieldScalar, ScalarError> {
        Ok(FieldScalar {
            home: self.meet(a.home, b.home)?,
            value: &a.value + &b.value,
        })
    }

    pub fn sub(&self, a: &FieldScalar, b: &FieldScalar) -> Result<FieldScalar, ScalarError> {
        Ok(FieldScalar {
            home: self.meet(a.home, b.home)?,
            value: &a.value - &b.value,
        })
    }

    pub fn mul(&self, a: &FieldScalar, b: &FieldScalar) -> Result<FieldScalar, ScalarError> {
        Ok(FieldScalar {
            home: self.meet(a.home, b.home)?,
            value: &a.value * &b.value,
        })
    }

    pub fn neg(&self, a: &FieldScalar) -> FieldScalar {
        FieldScalar {
            home: a.home,
            value: -&a.value,
        }
    }

    pub fn inv(&self, a: &FieldScalar) -> Result<FieldScalar, ScalarError> {
        Ok(FieldScalar {
            home: a.home,
            value: a.value.inv().ok_or(ScalarError::DivisionByZero)?,
        })
    }

    pub fn div(&self, a: &FieldScalar, b: &FieldScalar) -> Result<FieldScalar, ScalarError> {
        self.mul(a, &self.inv(b)?)
    }

    /// Views `s ∈ K_home` inside `K_i`; requires `i ≤ home`.
    pub fn coerce(&self, s: &FieldScalar, i: ClassId) -> Result<FieldScalar, ScalarError> {
        if !self.leq(i, s.home) {
            return Err(ScalarError::NotASubfield {
                from: self.names[s.home].clone(),
                to: self.names[i].clone(),
            });
        }
        Ok(FieldScalar {
            value: s.value.clone(),
            home: i,
        })
    }

    /// Embeds the poset of fields into a constant system, following the
    /// induction on depth: amalgamate each subtree below a lower cover of the
    /// root, then glue the results along their common copy of `K_{i₀}`.
    pub fn amalgamate(&self) -> Amalgamation {
        let mut embeddings = vec![BTreeMap::new(); self.num_classes()];
        let vars = self.amalgamate_below(self.root, &mut embeddings);
        Amalgamation { vars, embeddings }
    }

    fn lower_covers(&self, i: ClassId) -> Vec<ClassId> {
        let n = self.num_classes();
        let lt = |a: ClassId, b: ClassId| a != b && self.leq(a, b);
        (0..n)
            .filter(|&j| lt(j, i))
            .filter(|&j| !(0..n).any(|k| lt(j, k) && lt(k, i)))
            .collect()
    }

    fn amalgamate_below(
        &self,
        top: ClassId,
        embeddings: &mut [BTreeMap<Var, Var>],
    ) -> BTreeSet<Var> {
        let children = self.lower_covers(top);
        if children.is_empty() {
            embeddings[top] = self.field_vars[top].iter().map(|&v| (v, v)).collect();
            return self.field_vars[top].clone();
        }
        let mut field = BTreeSet::new();
        for &child in &children {
            // L_t, with embeddings ψ_{t,i} already recorded for i ≤ child;
            // δ_t: L_t → K is the inclusion of variable sets.
            let sub = self.amalgamate_below(child, embeddings);
            field.extend(sub);
        }
        // φ_top := δ_t ∘ ψ_{t, a_t} restricted to K_top, the same for every t
        let first = &embeddings[children[0]];
        embeddings[top] = self.field_vars[top]
            .iter()
            .map(|v| (*v, first[v]))
            .collect();
        field
    }
}

/// A common field `K = ℚ(vars)` with embeddings `φ_i: K_i → K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amalgamation {
    pub vars: BTreeSet<Var>,
    /// `embeddings[i]` sends each variable of `K_i` to a variable of `K`.
    pub embeddings: Vec<BTreeMap<Var, Var>>,
}

impl Amalgamation {
    /// `φ_i(value)` for `value ∈ K_i`.
    pub fn apply(&self, i: ClassId, value: &RatFn) -> RatFn {
        let map = &self.embeddings[i];
        value.rename(&|v| *map.get(&v).expect("value lies in K_i"))
    }

    pub fn apply_scalar(&self, s: &FieldScalar) -> RatFn {
        self.apply(s.home, &s.value)
    }

    /// The constant system `K` over the same poset.
    pub fn constant_tower(&self, p: &ComponentPoset) -> Result<FieldTower, ScalarError> {
        FieldTower::constant(p, &self.vars)
    }
}


/// Renders `Σ c·m` with monomials already in display order.
pub(crate) fn format_combination<'a>(
    tower: &FieldTower,
    items: impl IntoIterator<Item = (&'a RatFn, String)>,
) -> String {
    let mut out = String::new();
    for (k, (c, mono)) in items.into_iter().enumerate() {
        let compound = c.is_compound();
        let neg = !compound && c.numer().leading_is_negative();
        let abs = if neg { -c } else { c.clone() };
        let body = if abs.is_one() {
            mono
        } else if compound {
            format!("({})*{}", tower.display(&abs), mono)
        } else {
            format!("{}*{}", tower.display(&abs), mono)
        };
        match (k, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
