//! Polynomial ideals with a reduced Gröbner basis under a lexicographic
//! order, giving canonical normal forms and membership tests.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::One;

use super::poly::{Monomial, Poly, Var, NVARS};

/// Pure lexicographic order; `priority[0]` is the heaviest variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexOrder {
    priority: [Var; NVARS],
}

impl LexOrder {
    /// Panics unless `priority` lists every variable once.
    pub fn new(priority: [Var; NVARS]) -> Self {
        let mut seen = [false; NVARS];
        for v in priority {
            assert!(!seen[v.index()], "variable {v} listed twice");
            seen[v.index()] = true;
        }
        LexOrder { priority }
    }

    /// Multiplier and constraint momenta first, then `z` and `p_z`, which the
    /// on-shell normal form eliminates.
    pub fn elimination() -> Self {
        Self::new([
            Var::Lambda,
            Var::PLambda,
            Var::Z,
            Var::Pz,
            Var::X,
            Var::Y,
            Var::Px,
            Var::Py,
            Var::A,
            Var::M,
        ])
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        for v in self.priority {
            match a.exp(v).cmp(&b.exp(v)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    pub fn leading(&self, p: &Poly) -> Option<(Monomial, BigRational)> {
        p.terms()
            .max_by(|(a, _), (b, _)| self.cmp(a, b))
            .map(|(m, c)| (*m, c.clone()))
    }
}

#[derive(Clone, Debug)]
struct Element {
    poly: Poly,
    lm: Monomial,
    lc: BigRational,
}

impl Element {
    fn new(poly: Poly, order: &LexOrder) -> Option<Self> {
        let (lm, lc) = order.leading(&poly)?;
        let poly = poly.scale(&lc.recip());
        Some(Element {
            poly,
            lm,
            lc: BigRational::one(),
        })
    }
}

/// An ideal of the polynomial ring together with its reduced Gröbner basis.
#[derive(Clone, Debug)]
pub struct Ideal {
    order: LexOrder,
    basis: Vec<Element>,
}

impl Ideal {
    /// Buchberger's algorithm followed by inter-reduction.
    pub fn new(generators: &[Poly], order: LexOrder) -> Self {
        let mut basis: Vec<Element> = generators
            .iter()
            .filter_map(|g| Element::new(g.clone(), &order))
            .collect();
        let mut pairs: Vec<(usize, usize)> = (0..basis.len())
            .flat_map(|j| (0..j).map(move |i| (i, j)))
            .collect();
        // Normal selection strategy: the pair with the smallest lcm first.
        while let Some(idx) = (0..pairs.len()).min_by(|&u, &v| {
            let lu = basis[pairs[u].0].lm.lcm(&basis[pairs[u].1].lm);
            let lv = basis[pairs[v].0].lm.lcm(&basis[pairs[v].1].lm);
            lu.degree().cmp(&lv.degree()).then_with(|| order.cmp(&lu, &lv))
        }) {
            let (i, j) = pairs.swap_remove(idx);
            let (gi, gj) = (&basis[i], &basis[j]);
            if gi.lm.is_coprime(&gj.lm) {
                continue;
            }
            let l = gi.lm.lcm(&gj.lm);
            let si = gi.poly.mul_term(&gi.lm.div(&l).unwrap(), &gj.lc);
            let sj = gj.poly.mul_term(&gj.lm.div(&l).unwrap(), &gi.lc);
            let s = &si - &sj;
            let r = reduce_with(&s, &basis, &order);
            if let Some(el) = Element::new(r, &order) {
                let k = basis.len();
                basis.push(el);
                pairs.extend((0..k).map(|i| (i, k)));
            }
        }

        // Minimal basis: drop elements whose leading monomial is divisible by
        // another's.
        let mut keep: Vec<Element> = Vec::new();
        for (i, g) in basis.iter().enumerate() {
            let redundant = basis.iter().enumerate().any(|(j, h)| {
                j != i && h.lm.divides(&g.lm) && (h.lm != g.lm || j < i)
            });
            if !redundant {
                keep.push(g.clone());
            }
        }
        // Reduced basis.
        let mut reduced = Vec::with_capacity(keep.len());
        for i in 0..keep.len() {
            let others: Vec<Element> = keep
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, e)| e.clone())
                .collect();
            let r = reduce_with(&keep[i].poly, &others, &order);
            reduced.push(Element::new(r, &order).expect("minimal basis element"));
        }
        reduced.sort_by(|a, b| order.cmp(&a.lm, &b.lm).reverse());
        Ideal {
            order,
            basis: reduced,
        }
    }

    pub fn basis(&self) -> impl Iterator<Item = &Poly> {
        self.basis.iter().map(|e| &e.poly)
    }

    pub fn order(&self) -> &LexOrder {
        &self.order
    }

    /// Canonical remainder of `p` modulo the ideal.
    pub fn normal_form(&self, p: &Poly) -> Poly {
        reduce_with(p, &self.basis, &self.order)
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.normal_form(p).is_zero()
    }
}

fn reduce_with(p: &Poly, basis: &[Element], order: &LexOrder) -> Poly {
    let mut p = p.clone();
    let mut rem = Poly::zero();
    while let Some((lm, lc)) = order.leading(&p) {
        match basis.iter().find(|g| g.lm.divides(&lm)) {
            Some(g) => {
                let t = g.lm.div(&lm).unwrap();
                let c = &lc / &g.lc;
                p = &p - &g.poly.mul_term(&t, &c);
            }
            None => {
                rem.add_term(lm, lc.clone());
                p.add_term(lm, -lc);
            }
        }
    }
    rem
}
