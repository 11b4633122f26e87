//! Transition operators `A_ε(α, β) = h(ε + Aα − β)` on finite admissible
//! index sets, invariant subspaces and restrictions.

use std::collections::{BTreeSet, VecDeque};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gaussian::GaussianRational as G;
use crate::linalg::{solve_in_basis, Echelon, GVec, QMatrix};
use crate::mask::Mask;
use crate::padic::{check_same, coset_representatives, IpElement};
use crate::subdivision::Sequence;

/// Sorted finite subset of `I_p`; its order fixes the basis `{δ_α : α ∈ K}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet {
    p: u64,
    elems: Vec<IpElement>,
}

impl IndexSet {
    pub fn new(p: u64, elems: impl IntoIterator<Item = IpElement>) -> Result<Self> {
        let set: BTreeSet<IpElement> = elems.into_iter().collect();
        for a in &set {
            check_same(p, a.prime())?;
        }
        Ok(Self {
            p,
            elems: set.into_iter().collect(),
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[IpElement] {
        &self.elems
    }

    pub fn index_of(&self, a: &IpElement) -> Option<usize> {
        self.elems.binary_search(a).ok()
    }

    pub fn contains(&self, a: &IpElement) -> bool {
        self.index_of(a).is_some()
    }

    /// Coordinate vector of a sequence supported in `K`.
    pub fn vector(&self, u: &Sequence) -> Result<GVec> {
        let mut v = vec![G::zero(); self.len()];
        for (a, x) in u.entries() {
            let i = self
                .index_of(a)
                .ok_or_else(|| Error::OutsideIndexSet(a.to_string()))?;
            v[i] = x.clone();
        }
        Ok(v)
    }

    pub fn sequence(&self, v: &[G]) -> Sequence {
        Sequence::from_entries(
            self.p,
            self.elems.iter().cloned().zip(v.iter().cloned()),
        )
        .expect("same prime")
    }
}

/// Candidates `A^{-1}(ω − ε + β)` that stay inside `I_p`.
fn successors<'a>(
    m: &'a Mask,
    eps: &'a [IpElement],
    b: &'a IpElement,
) -> impl Iterator<Item = IpElement> + 'a {
    m.support().flat_map(move |w| {
        eps.iter().filter_map(move |e| {
            let t = w.sub(e).add(b);
            (t.first_digit() == 0).then(|| t.dilate_up())
        })
    })
}

/// Smallest `K ⊇ G ∪ {0}` with `A^{-1}(supp h − ε + K) ∩ I_p ⊆ K` for all `ε ∈ E`.
pub fn admissible_closure(m: &Mask, gens: &[IpElement]) -> Result<IndexSet> {
    let p = m.prime();
    let eps = coset_representatives(p)?;
    let mut set: BTreeSet<IpElement> = BTreeSet::new();
    let mut queue: VecDeque<IpElement> = VecDeque::new();
    for g in gens.iter().cloned().chain([IpElement::zero(p)]) {
        check_same(p, g.prime())?;
        if set.insert(g.clone()) {
            queue.push_back(g);
        }
    }
    while let Some(b) = queue.pop_front() {
        for a in successors(m, &eps, &b) {
            if set.insert(a.clone()) {
                queue.push_back(a);
            }
        }
    }
    IndexSet::new(p, set)
}

/// Exact check of the admissibility condition.
pub fn is_admissible(m: &Mask, k: &IndexSet) -> bool {
    let Ok(eps) = coset_representatives(m.prime()) else {
        return false;
    };
    k.elements()
        .iter()
        .all(|b| successors(m, &eps, b).all(|a| k.contains(&a)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    pub eps: IpElement,
    pub index: IndexSet,
    pub matrix: QMatrix,
}

/// `M(α, β) = h(ε + Aα − β)` over `K × K`.
pub fn transition_matrix(m: &Mask, eps: &IpElement, k: &IndexSet) -> Result<TransitionMatrix> {
    check_same(m.prime(), eps.prime())?;
    check_same(m.prime(), k.prime())?;
    if eps.exponent() > 1 {
        return Err(Error::Precondition(format!("{eps} is not a coset representative")));
    }
    if !is_admissible(m, k) {
        return Err(Error::NotAdmissible(format!("{} elements", k.len())));
    }
    let n = k.len();
    let mut mat = QMatrix::zeros(n, n);
    for (i, a) in k.elements().iter().enumerate() {
        let base = eps.add(&a.dilate_down());
        for (j, b) in k.elements().iter().enumerate() {
            if let Some(v) = m.get_ref(&base.sub(b)) {
                mat.set(i, j, v.clone());
            }
        }
    }
    Ok(TransitionMatrix {
        eps: eps.clone(),
        index: k.clone(),
        matrix: mat,
    })
}

/// All `A_ε` for `ε ∈ E` in ascending order of `ε`.
pub fn transition_family(m: &Mask, k: &IndexSet) -> Result<Vec<TransitionMatrix>> {
    coset_representatives(m.prime())?
        .iter()
        .map(|e| transition_matrix(m, e, k))
        .collect()
}

/// Span of vectors over an index set, with a basis kept in discovery order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub index: IndexSet,
    pub basis: Vec<GVec>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[G]) -> bool {
        let mut e = Echelon::new(self.index.len());
        for b in &self.basis {
            e.insert(b);
        }
        e.contains(v)
    }
}

/// Breadth-first closure of the generators under the operators.
pub fn minimal_invariant_subspace(ops: &[TransitionMatrix], gens: &[Sequence]) -> Result<Subspace> {
    let index = match (ops.first(), gens.first()) {
        (Some(op), _) => op.index.clone(),
        (None, Some(g)) => IndexSet::new(g.prime(), gens.iter().flat_map(|g| g.support().cloned()))?,
        (None, None) => return Err(Error::Precondition("no operators and no generators".into())),
    };
    if ops.iter().any(|op| op.index != index) {
        return Err(Error::DimensionMismatch("operators on different index sets".into()));
    }
    let mut queue: VecDeque<GVec> = gens
        .iter()
        .map(|g| index.vector(g))
        .collect::<Result<_>>()?;
    let mut ech = Echelon::new(index.len());
    let mut basis = Vec::new();
    while let Some(v) = queue.pop_front() {
        if !ech.insert(&v) {
            continue;
        }
        for op in ops {
            queue.push_back(op.matrix.mul_vec(&v)?);
        }
        basis.push(v);
    }
    Ok(Subspace { index, basis })
}

/// Coordinates of `M` restricted to `W`: entry `(i, j)` is the coefficient of
/// `w_i` in `M w_j`.
pub fn restrict_matrix(mat: &QMatrix, w: &Subspace) -> Result<QMatrix> {
    let images: Vec<GVec> = w
        .basis
        .iter()
        .map(|b| mat.mul_vec(b))
        .collect::<Result<_>>()?;
    let coords = solve_in_basis(&w.basis, &images).ok_or(Error::NotInvariant)?;
    QMatrix::from_columns(&coords).map(|m| {
        if w.dim() == 0 {
            QMatrix::zeros(0, 0)
        } else {
            m
        }
    })
}

pub fn restrict(op: &TransitionMatrix, w: &Subspace) -> Result<QMatrix> {
    if op.index != w.index {
        return Err(Error::DimensionMismatch("operator and subspace index sets differ".into()));
    }
    restrict_matrix(&op.matrix, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::{delta, difference};

    fn ip(k: i64, s: u32, p: u64) -> IpElement {
        IpElement::new(k, s, p).unwrap()
    }

    fn quarter_mask() -> Mask {
        let a = G::from_parts((1, 2), (1, 2));
        let b = G::from_parts((1, 2), (-1, 2));
        Mask::new(2, 1, [(0, a.clone()), (1, b.clone()), (2, a), (3, b)]).unwrap()
    }

    fn gens(p: u64, gs: &[IpElement]) -> Vec<Sequence> {
        let d = delta(&IpElement::zero(p));
        gs.iter().map(|g| difference(&d, g)).collect()
    }

    fn strs(k: &IndexSet) -> Vec<String> {
        k.elements().iter().map(|a| a.to_string()).collect()
    }

    #[test]
    fn closures() {
        let m = quarter_mask();
        let s: Vec<_> = m.support().cloned().collect();
        let k = admissible_closure(&m, &s).unwrap();
        assert_eq!(strs(&k), ["0", "1/2", "1/4", "3/4"]);
        let h3 = Mask::haar(3).unwrap();
        let s: Vec<_> = h3.support().cloned().collect();
        assert_eq!(strs(&admissible_closure(&h3, &s).unwrap()), ["0", "1/3", "2/3"]);
        let h2 = Mask::haar(2).unwrap();
        let k = admissible_closure(&h2, &[ip(1, 1, 2)]).unwrap();
        assert_eq!(strs(&k), ["0", "1/2"]);
        assert!(is_admissible(&h2, &k));
        assert!(!is_admissible(&m, &IndexSet::new(2, [IpElement::zero(2)]).unwrap()));
    }

    #[test]
    fn haar3_matrices() {
        let h = Mask::haar(3).unwrap();
        let k = admissible_closure(&h, &[ip(1, 1, 3), ip(2, 1, 3)]).unwrap();
        let a0 = transition_matrix(&h, &IpElement::zero(3), &k).unwrap();
        let one = G::from_int(1);
        assert_eq!(a0.matrix.row(0), [one.clone(), one.clone(), one]);
        assert!(a0.matrix.row(1).iter().all(|x| x.is_zero()));
        assert!(a0.matrix.row(2).iter().all(|x| x.is_zero()));
        let fam = transition_family(&h, &k).unwrap();
        let w = minimal_invariant_subspace(&fam, &gens(3, &[ip(1, 1, 3), ip(2, 1, 3)])).unwrap();
        assert_eq!(w.dim(), 2);
        for op in &fam {
            assert!(restrict(op, &w).unwrap().is_zero());
        }
    }

    #[test]
    fn quarter_mask_matrices() {
        let m = quarter_mask();
        let s: Vec<_> = m.support().cloned().collect();
        let k = admissible_closure(&m, &s).unwrap();
        let a0 = transition_matrix(&m, &IpElement::zero(2), &k).unwrap();
        let a1 = transition_matrix(&m, &ip(1, 1, 2), &k).unwrap();
        let (i, j) = (k.index_of(&ip(1, 1, 2)).unwrap(), k.index_of(&ip(1, 2, 2)).unwrap());
        assert_eq!(*a0.matrix.get(i, j), G::from_parts((1, 2), (1, 2)));
        assert_eq!(a0.matrix, a1.matrix);
        let g = gens(2, &[ip(1, 2, 2), ip(2, 2, 2), ip(3, 2, 2)]);
        let w = minimal_invariant_subspace(&[a0.clone(), a1], &g).unwrap();
        assert_eq!(w.dim(), 3);
        let r = restrict(&a0, &w).unwrap();
        let z = G::zero();
        let want = QMatrix::from_rows(vec![
            vec![z.clone(), z.clone(), z.clone()],
            vec![G::i(), z.clone(), G::i()],
            vec![z.clone(), z.clone(), z],
        ])
        .unwrap();
        assert_eq!(r, want);
    }

    #[test]
    fn trivial_subspaces() {
        let h = Mask::haar(2).unwrap();
        assert_eq!(strs(&admissible_closure(&h, &[]).unwrap()), ["0"]);
        let k = admissible_closure(&h, &[ip(1, 1, 2)]).unwrap();
        let fam = transition_family(&h, &k).unwrap();
        let w = minimal_invariant_subspace(&fam, &[Sequence::zero(2)]).unwrap();
        assert_eq!(w.dim(), 0);
        let w = minimal_invariant_subspace(&fam, &gens(2, &[ip(1, 1, 2)])).unwrap();
        let id = QMatrix::identity(k.len());
        assert_eq!(restrict_matrix(&id, &w).unwrap(), QMatrix::identity(w.dim()));
        let outside = gens(2, &[ip(1, 3, 2)]);
        assert!(matches!(
            minimal_invariant_subspace(&fam, &outside),
            Err(Error::OutsideIndexSet(_))
        ));
    }

    #[test]
    fn non_invariant_restriction() {
        let h = Mask::haar(2).unwrap();
        let k = admissible_closure(&h, &[]).unwrap();
        let w = Subspace {
            index: k.clone(),
            basis: vec![vec![G::from_int(1), G::zero()]],
        };
        let swap = QMatrix::from_rows(vec![
            vec![G::zero(), G::from_int(1)],
            vec![G::from_int(1), G::zero()],
        ])
        .unwrap();
        assert!(matches!(restrict_matrix(&swap, &w), Err(Error::NotInvariant)));
    }
}
