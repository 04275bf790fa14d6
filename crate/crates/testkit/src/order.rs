//! The ordering on interfaces derived from its generating rules:
//!
//! 1. `0 <= p` for every generator `p`;
//! 2. `0 <= X` if and only if `-X <= 0`;
//! 3. `X <= X + Y` if and only if `0 <= Y`;
//!
//! closed under reflexivity and transitivity. Derivation is carried out by
//! saturation over every interface spanned by three generators with
//! coefficients in `[-bound, bound]`.

use fti_core::{Generator, Interface};

pub struct Derivation {
    generators: [Generator; 3],
    bound: i64,
    points: Vec<[i64; 3]>,
    facts: Vec<Vec<bool>>,
}

impl Derivation {
    pub fn saturate(generators: [Generator; 3], bound: i64) -> Self {
        let side = (2 * bound + 1) as usize;
        let range = || -bound..=bound;
        let points: Vec<[i64; 3]> = range()
            .flat_map(|x| range().flat_map(move |y| range().map(move |z| [x, y, z])))
            .collect();
        let n = points.len();
        let id = |p: [i64; 3]| -> Option<usize> {
            if p.iter().any(|c| c.abs() > bound) {
                return None;
            }
            let u = |c: i64| (c + bound) as usize;
            Some(u(p[0]) * side * side + u(p[1]) * side + u(p[2]))
        };
        let zero = id([0, 0, 0]).unwrap();
        let mut facts = vec![vec![false; n]; n];
        for (i, row) in facts.iter_mut().enumerate() {
            row[i] = true;
        }
        for k in 0..3 {
            let mut unit = [0; 3];
            unit[k] = 1;
            facts[zero][id(unit).unwrap()] = true;
        }
        loop {
            let before = facts.clone();
            for (i, p) in points.iter().enumerate() {
                let neg = id([-p[0], -p[1], -p[2]]).unwrap();
                if facts[zero][i] {
                    facts[neg][zero] = true;
                }
                if facts[neg][zero] {
                    facts[zero][i] = true;
                }
                for (j, q) in points.iter().enumerate() {
                    let Some(sum) = id([p[0] + q[0], p[1] + q[1], p[2] + q[2]]) else {
                        continue;
                    };
                    if facts[zero][j] {
                        facts[i][sum] = true;
                    }
                    if facts[i][sum] {
                        facts[zero][j] = true;
                    }
                }
            }
            for k in 0..n {
                for i in 0..n {
                    if facts[i][k] {
                        for j in 0..n {
                            if facts[k][j] {
                                facts[i][j] = true;
                            }
                        }
                    }
                }
            }
            if facts == before {
                break;
            }
        }
        Derivation {
            generators,
            bound,
            points,
            facts,
        }
    }

    pub fn interface(&self, p: [i64; 3]) -> Interface {
        let scope = self.generators[0].scope();
        Interface::from_terms(scope, self.generators.iter().cloned().zip(p)).unwrap()
    }

    /// Every pair `(X, Y)` with the verdict of the derivation for `X <= Y`.
    pub fn judgements(&self) -> impl Iterator<Item = (Interface, Interface, bool)> + '_ {
        let n = self.points.len();
        (0..n).flat_map(move |i| {
            (0..n).map(move |j| (self.interface(self.points[i]), self.interface(self.points[j]), self.facts[i][j]))
        })
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }
}
