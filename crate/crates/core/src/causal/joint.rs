//! Exact joint distributions and conditional-independence checking.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::{all_canonical_statements, CausalError, CiStatement, Dag, VariableSpace};
use crate::rational::Rational;

/// An exact joint distribution over a [`VariableSpace`], stored as a dense
/// row-major table of rational masses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDistribution {
    space: VariableSpace,
    mass: Vec<Rational>,
}

impl JointDistribution {
    /// Validates non-negativity and exact normalization.
    pub fn new(space: VariableSpace, mass: Vec<Rational>) -> Result<Self, CausalError> {
        if mass.len() != space.cell_count() {
            return Err(CausalError::BadParameters(alloc::format!(
                "expected {} cells, got {}",
                space.cell_count(),
                mass.len()
            )));
        }
        if mass.iter().any(Rational::is_negative) {
            return Err(CausalError::BadParameters("negative mass".to_string()));
        }
        let total: Rational = mass.iter().cloned().sum();
        if !total.is_one() {
            return Err(CausalError::NotNormalized(total.to_string()));
        }
        Ok(JointDistribution { space, mass })
    }

    /// Builds the joint from a DAG-compatible factorization: for each
    /// variable (in space order), one conditional distribution per assignment
    /// of its DAG parents (row-major over the parents in space order), each a
    /// vector of masses over the variable's values.
    ///
    /// `conditionals[i][parent_flat][v] = p(var_i = v | parents = parent_flat)`.
    pub fn from_factorization(
        space: VariableSpace,
        dag: &Dag,
        conditionals: &[Vec<Vec<Rational>>],
    ) -> Result<Self, CausalError> {
        validate_conditionals(&space, dag, conditionals)?;
        let mut mass = Vec::with_capacity(space.cell_count());
        for assignment in space.assignments() {
            let mut cell = Rational::one();
            for i in 0..space.len() {
                let parent_flat = parent_flat_index(&space, dag, i, &assignment);
                cell = cell * conditionals[i][parent_flat][assignment[i]].clone();
            }
            mass.push(cell);
        }
        JointDistribution::new(space, mass)
    }

    pub fn space(&self) -> &VariableSpace {
        &self.space
    }

    /// Mass of a full assignment given as value indices.
    pub fn mass(&self, assignment: &[usize]) -> &Rational {
        &self.mass[self.space.flat_index(assignment)]
    }

    /// Mass of a full assignment given as `(variable, value)` names.
    pub fn mass_named(&self, assignment: &[(&str, &str)]) -> Result<Rational, CausalError> {
        let mut idx = alloc::vec![usize::MAX; self.space.len()];
        for (name, value) in assignment {
            let i = self
                .space
                .index_of(name)
                .ok_or_else(|| CausalError::UnknownVariable(name.to_string()))?;
            let v = self
                .space
                .values(i)
                .iter()
                .position(|x| x == value)
                .ok_or_else(|| {
                    CausalError::BadStatement(alloc::format!(
                        "unknown value `{value}` for `{name}`"
                    ))
                })?;
            idx[i] = v;
        }
        if idx.contains(&usize::MAX) {
            return Err(CausalError::BadStatement(
                "assignment does not cover every variable".to_string(),
            ));
        }
        Ok(self.mass(&idx).clone())
    }

    /// Marginal over the variables `vars` (indices, strictly increasing):
    /// maps each restricted assignment to its total mass.
    fn marginal(&self, vars: &[usize]) -> BTreeMap<Vec<usize>, Rational> {
        let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for assignment in self.space.assignments() {
            let m = self.mass(&assignment);
            if m.is_zero() {
                continue;
            }
            let key: Vec<usize> = vars.iter().map(|&i| assignment[i]).collect();
            let slot = out.entry(key).or_insert_with(Rational::zero);
            *slot = slot.clone() + m.clone();
        }
        out
    }

    /// Exact conditional-independence test of `stmt`: quantifies over every
    /// conditioning assignment of `rhs ∪ given` with strictly positive
    /// probability and compares `p(lhs | rhs, given)` with `p(lhs | given)`
    /// by cross-multiplication, so no division is performed.
    pub fn check_ci(&self, stmt: &CiStatement) -> Result<bool, CausalError> {
        let var = |name: &str| {
            self.space
                .index_of(name)
                .ok_or_else(|| CausalError::UnknownVariable(name.to_string()))
        };
        let lhs = var(&stmt.lhs)?;
        let mut rhs: Vec<usize> = stmt.rhs.iter().map(|n| var(n)).collect::<Result<_, _>>()?;
        let mut given: Vec<usize> = stmt
            .given
            .iter()
            .map(|n| var(n))
            .collect::<Result<_, _>>()?;
        rhs.sort_unstable();
        given.sort_unstable();

        let mut rg: Vec<usize> = rhs.iter().chain(given.iter()).copied().collect();
        rg.sort_unstable();
        let mut lg: Vec<usize> = given.clone();
        lg.push(lhs);
        lg.sort_unstable();
        let mut lrg: Vec<usize> = rg.clone();
        lrg.push(lhs);
        lrg.sort_unstable();

        let m_g = self.marginal(&given);
        let m_rg = self.marginal(&rg);
        let m_lg = self.marginal(&lg);
        let m_lrg = self.marginal(&lrg);
        let restrict = |assignment: &[usize], vars: &[usize]| -> Vec<usize> {
            vars.iter().map(|&i| assignment[i]).collect()
        };

        // Iterate conditioning cells with positive mass; for each, compare
        // across every lhs value: p(l,r,g)·p(g) = p(l,g)·p(r,g).
        for (rg_key, p_rg) in &m_rg {
            let mut partial = alloc::vec![0usize; self.space.len()];
            for (slot, &i) in rg.iter().enumerate() {
                partial[i] = rg_key[slot];
            }
            let g_key = restrict(&partial, &given);
            let p_g = m_g.get(&g_key).cloned().unwrap_or_else(Rational::one); // given = ∅ ⇒ p(g) = 1
            for v in 0..self.space.values(lhs).len() {
                partial[lhs] = v;
                let p_lrg = m_lrg
                    .get(&restrict(&partial, &lrg))
                    .cloned()
                    .unwrap_or_else(Rational::zero);
                let p_lg = m_lg
                    .get(&restrict(&partial, &lg))
                    .cloned()
                    .unwrap_or_else(Rational::zero);
                if p_lrg * p_g.clone() != p_lg * p_rg.clone() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Every canonical independence statement over the space that holds
    /// exactly, sorted.
    pub fn ci_report(&self) -> Vec<CiStatement> {
        let names = self.space.names();
        all_canonical_statements(&names)
            .into_iter()
            .filter(|s| self.check_ci(s).expect("statements range over the space"))
            .collect()
    }
}

pub(super) fn validate_conditionals(
    space: &VariableSpace,
    dag: &Dag,
    conditionals: &[Vec<Vec<Rational>>],
) -> Result<(), CausalError> {
    if dag.node_names() != space.names() {
        return Err(CausalError::BadParameters(
            "DAG nodes must match the variable space (same names, same order)".to_string(),
        ));
    }
    if conditionals.len() != space.len() {
        return Err(CausalError::BadParameters(
            "one conditional table per variable required".to_string(),
        ));
    }
    for (i, table) in conditionals.iter().enumerate() {
        let parent_cells: usize = dag
            .parents(i)
            .iter()
            .map(|&p| space.values(p).len())
            .product();
        if table.len() != parent_cells {
            return Err(CausalError::BadParameters(alloc::format!(
                "variable `{}` needs {} parent rows",
                space.name(i),
                parent_cells
            )));
        }
        for row in table {
            if row.len() != space.values(i).len() {
                return Err(CausalError::BadParameters(alloc::format!(
                    "row width mismatch on `{}`",
                    space.name(i)
                )));
            }
            if row.iter().any(Rational::is_negative) {
                return Err(CausalError::BadParameters("negative parameter".to_string()));
            }
            let total: Rational = row.iter().cloned().sum();
            if !total.is_one() {
                return Err(CausalError::BadParameters(alloc::format!(
                    "conditional row on `{}` sums to {}",
                    space.name(i),
                    total
                )));
            }
        }
    }
    Ok(())
}

/// Row-major index of variable `i`'s parent assignment inside `assignment`.
pub(super) fn parent_flat_index(
    space: &VariableSpace,
    dag: &Dag,
    i: usize,
    assignment: &[usize],
) -> usize {
    let mut flat = 0;
    for &p in dag.parents(i) {
        flat = flat * space.values(p).len() + assignment[p];
    }
    flat
}
