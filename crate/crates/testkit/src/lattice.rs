//! Quotient of a finitely generated free abelian group by a subgroup,
//! computed by integer row reduction (Hermite normal form).

use std::collections::BTreeMap;

use fti_core::{Generator, Interface, MotiveExpr, Polarity, Scope};

use crate::gen::Catalog;

pub struct Quotient {
    basis: Vec<Generator>,
    index: BTreeMap<Generator, usize>,
    /// Echelon rows with their pivot column.
    rows: Vec<(usize, Vec<i128>)>,
}

impl Quotient {
    /// `basis` fixes the column order: earlier columns are eliminated first.
    pub fn new(basis: Vec<Generator>, relations: &[Interface]) -> Self {
        let index: BTreeMap<Generator, usize> = basis.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let width = basis.len();
        let mut pending: Vec<Vec<i128>> = relations
            .iter()
            .map(|r| {
                let mut v = vec![0i128; width];
                for (g, n) in r.terms() {
                    v[index[g]] += n as i128;
                }
                v
            })
            .collect();
        let mut rows = Vec::new();
        for col in 0..width {
            loop {
                let nonzero: Vec<usize> = (0..pending.len()).filter(|&i| pending[i][col] != 0).collect();
                if nonzero.is_empty() {
                    break;
                }
                let p = *nonzero.iter().min_by_key(|&&i| pending[i][col].abs()).unwrap();
                let pivot = pending[p].clone();
                let mut done = true;
                for &i in &nonzero {
                    if i == p {
                        continue;
                    }
                    let q = pending[i][col].div_euclid(pivot[col]);
                    for (x, y) in pending[i].iter_mut().zip(&pivot) {
                        *x -= q * y;
                    }
                    if pending[i][col] != 0 {
                        done = false;
                    }
                }
                if done {
                    let mut row = pending.swap_remove(p);
                    if row[col] < 0 {
                        row.iter_mut().for_each(|x| *x = -*x);
                    }
                    rows.push((col, row));
                    break;
                }
            }
        }
        Quotient { basis, index, rows }
    }

    /// The reflector subgroup of a catalog: `f.a(m)@g + ~g.a(m)@f` for all
    /// `f, g, a, m`, plus every self-transfer on its own. Client elements and
    /// self-transfers come first in the column order.
    pub fn reflectors(catalog: &Catalog) -> Self {
        let all = catalog.all_generators(Scope::Global);
        let (first, rest): (Vec<Generator>, Vec<Generator>) = all
            .into_iter()
            .partition(|g| g.polarity == Polarity::Client || g.is_self_loop());
        let basis: Vec<Generator> = first.into_iter().chain(rest).collect();
        let mut relations = Vec::new();
        for f in &catalog.entities {
            for g in &catalog.entities {
                for a in &catalog.actions {
                    for m in &catalog.motives {
                        let out = Generator::new(Polarity::Service, *f, *a, MotiveExpr::atom(*m)).at(*g);
                        let inc = Generator::new(Polarity::Client, *g, *a, MotiveExpr::atom(*m)).at(*f);
                        relations.push(Interface::from_terms(Scope::Global, [(out.clone(), 1), (inc.clone(), 1)]).unwrap());
                        if f == g {
                            relations.push(Interface::from_generator(out));
                            relations.push(Interface::from_generator(inc));
                        }
                    }
                }
            }
        }
        Quotient::new(basis, &relations)
    }

    pub fn basis(&self) -> &[Generator] {
        &self.basis
    }

    pub fn relations_rank(&self) -> usize {
        self.rows.len()
    }

    fn vector(&self, x: &Interface) -> Vec<i128> {
        let mut v = vec![0i128; self.basis.len()];
        for (g, n) in x.terms() {
            let i = *self.index.get(g).unwrap_or_else(|| panic!("{g} is outside the basis"));
            v[i] += n as i128;
        }
        v
    }

    /// Remainder of `x` after eliminating every pivot column.
    pub fn reduce(&self, x: &Interface) -> Interface {
        let mut v = self.vector(x);
        for (col, row) in &self.rows {
            let q = v[*col].div_euclid(row[*col]);
            for (x, y) in v.iter_mut().zip(row) {
                *x -= q * y;
            }
        }
        Interface::from_terms(
            Scope::Global,
            self.basis
                .iter()
                .zip(v)
                .filter(|(_, n)| *n != 0)
                .map(|(g, n)| (g.clone(), i64::try_from(n).expect("small"))),
        )
        .unwrap()
    }

    pub fn contains(&self, x: &Interface) -> bool {
        self.reduce(x).is_zero()
    }
}
