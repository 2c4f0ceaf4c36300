//! Unweighted undirected `C(n; m_1, .., m_r)`: BFS distance matrices, the
//! determinant classifier and the odd-cycle inverse.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{det, Matrix};
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UndirectedError {
    #[error("need n >= 1, r >= 1 and every m_j >= 1 (got n = {n}, m = {m:?})")]
    Shape { n: usize, m: Vec<usize> },
    #[error("{vertices} vertices exceeds the oracle bound {bound}")]
    TooLarge { vertices: usize, bound: usize },
}

/// `C(n; m_1, .., m_r)` with `m` kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UndirectedShape {
    n: usize,
    m: Vec<usize>,
}

impl UndirectedShape {
    pub fn new(n: usize, mut m: Vec<usize>) -> Result<Self, UndirectedError> {
        if n == 0 || m.is_empty() || m.contains(&0) {
            return Err(UndirectedError::Shape { n, m });
        }
        m.sort_unstable();
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> &[usize] {
        &self.m
    }

    pub fn r(&self) -> usize {
        self.m.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.n + 1 + self.m.iter().sum::<usize>()
    }

    /// `u{i}` then `v{pos}.{j}`; `v1.j` is adjacent to `u_n`.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = (0..=self.n).map(|i| format!("u{i}")).collect();
        for (j, &mj) in self.m.iter().enumerate() {
            out.extend((1..=mj).map(|p| format!("v{p}.{}", j + 1)));
        }
        out
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let size = self.vertex_count();
        let mut adj = vec![Vec::new(); size];
        let mut link = |a: usize, b: usize| {
            adj[a].push(b);
            adj[b].push(a);
        };
        for i in 0..self.n {
            link(i, i + 1);
        }
        let mut at = self.n + 1;
        for &mj in &self.m {
            link(self.n, at);
            for p in 1..mj {
                link(at + p - 1, at + p);
            }
            link(at + mj - 1, 0);
            at += mj;
        }
        adj
    }
}

impl fmt::Display for UndirectedShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.m.iter().map(ToString::to_string).collect();
        write!(f, "C({};{})", self.n, m.join(","))
    }
}

/// Every shape with at most `max_vertices` vertices, `n` ascending and
/// `m` in lexicographic order.
pub fn shapes_up_to(max_vertices: usize) -> Vec<UndirectedShape> {
    fn parts(rem: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for m in min..=rem {
            cur.push(m);
            parts(rem - m, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for n in 1..max_vertices.saturating_sub(1) {
        let mut ms = Vec::new();
        parts(max_vertices - n - 1, 1, &mut Vec::new(), &mut ms);
        out.extend(ms.into_iter().map(|m| UndirectedShape { n, m }));
    }
    out
}

/// Hop distances by breadth-first search from every vertex.
pub fn undirected_distance_matrix<T: Scalar>(shape: &UndirectedShape) -> Matrix<T> {
    let adj = shape.adjacency();
    let size = adj.len();
    let mut out = Matrix::zeros(size, size);
    for src in 0..size {
        let mut dist = vec![usize::MAX; size];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        for (dst, d) in dist.into_iter().enumerate() {
            out.set(src, dst, T::from_int(d as i64));
        }
    }
    out.with_vertex_labels(shape.labels())
        .expect("one label per vertex")
}

/// Which determinant statement a verdict comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `r = 1`, cycle of even length.
    EvenCycle,
    /// `r = 1`, cycle of length `2k+1`: `k(k+1)`.
    OddCycle,
    /// `r >= 2`, `n` even and at least 4.
    EvenPath,
    /// `r >= 2`, `n` odd and at least 3.
    OddPath,
    /// `r >= 2`, `n = 2`.
    PathTwo,
    /// `r >= 2`, `n = 1`.
    PathOne,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::EvenCycle => "even-cycle",
            Rule::OddCycle => "odd-cycle",
            Rule::EvenPath => "even-n",
            Rule::OddPath => "odd-n",
            Rule::PathTwo => "n=2",
            Rule::PathOne => "n=1",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Closed(Rational),
    Zero,
    /// No closed form is known.
    Unknown,
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Closed(_) => "closed",
            Verdict::Zero => "zero",
            Verdict::Unknown => "unknown",
        }
    }

    /// The determinant the verdict predicts, if any.
    pub fn value(&self) -> Option<Rational> {
        match self {
            Verdict::Closed(v) => Some(v.clone()),
            Verdict::Zero => Some(Rational::zero()),
            Verdict::Unknown => None,
        }
    }
}

/// Columns whose signed sum vanishes, as `(label, coefficient)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dependence {
    pub columns: Vec<(String, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetVerdict {
    pub verdict: Verdict,
    pub rule: Rule,
    /// Present on every `Zero` verdict.
    pub dependence: Option<Dependence>,
}

fn int(v: BigInt) -> Rational {
    Rational::from_integer(v)
}

fn signed_pow2(negative: bool, e: usize) -> BigInt {
    let v = BigInt::one() << e;
    if negative {
        -v
    } else {
        v
    }
}

/// `(-2)^{r-1} [k(k+1) - (r-1)(3k^2 - k - 2)]`.
pub fn bracket_value(k: usize, r: usize) -> Rational {
    let (k, r1) = (BigInt::from(k), BigInt::from(r - 1));
    let inner = &k * (&k + 1) - r1 * (BigInt::from(3) * &k * &k - &k - 2);
    int(signed_pow2((r - 1) % 2 == 1, r - 1) * inner)
}

/// `(-1)^{r+1} 2^{r+2} (r-1)`.
pub fn complete_bipartite_value(r: usize) -> Rational {
    int(signed_pow2(r.is_multiple_of(2), r + 2) * BigInt::from(r - 1))
}

/// `(-1)^{r-1} 2^{r-2}` as stated for `T_r = C(1; 1, .., 1)`, `r >= 2`.
pub fn stated_t_r_value(r: usize) -> Rational {
    assert!(r >= 2, "T_r needs r >= 2");
    int(signed_pow2(r.is_multiple_of(2), r - 2))
}

fn closed(rule: Rule, v: Rational) -> DetVerdict {
    DetVerdict {
        verdict: Verdict::Closed(v),
        rule,
        dependence: None,
    }
}

fn zero(rule: Rule, columns: Vec<(String, i64)>) -> DetVerdict {
    DetVerdict {
        verdict: Verdict::Zero,
        rule,
        dependence: Some(Dependence { columns }),
    }
}

fn u(i: usize) -> String {
    format!("u{i}")
}

fn v(pos: usize, cycle: usize) -> String {
    format!("v{pos}.{}", cycle + 1)
}

/// Determinant verdict for `C(n; m)` from the known closed forms, with the
/// column dependence behind each zero.
pub fn classify_det(shape: &UndirectedShape) -> DetVerdict {
    let (n, m, r) = (shape.n, &shape.m, shape.r());
    let all_one = m.iter().all(|&x| x == 1);
    let even: Vec<usize> = (0..r).filter(|&s| m[s] % 2 == 0).collect();
    let odd3: Vec<usize> = (0..r).filter(|&s| m[s] % 2 == 1 && m[s] >= 3).collect();

    if r == 1 {
        let len = n + m[0] + 1;
        if len % 2 == 1 {
            let k = BigInt::from(len / 2);
            return closed(Rule::OddCycle, int(&k * (&k + 1)));
        }
        let k = len / 2;
        let cycle: Vec<String> = (0..=n).map(u).chain((1..=m[0]).map(|p| v(p, 0))).collect();
        return zero(
            Rule::EvenCycle,
            vec![
                (cycle[0].clone(), 1),
                (cycle[1].clone(), -1),
                (cycle[k].clone(), 1),
                (cycle[k + 1].clone(), -1),
            ],
        );
    }

    // two half-length columns on each of two branches
    let pair = |s: usize, t: usize, step: usize| {
        let (l, p) = (m[s] / 2, m[t] / 2);
        vec![
            (v(l, s), 1),
            (v(l + step, s), -1),
            (v(p, t), -1),
            (v(p + step, t), 1),
        ]
    };

    if n % 2 == 0 && n >= 4 {
        let k = n / 2;
        let cols = if let Some(&s) = odd3.first() {
            let l = m[s] / 2;
            vec![
                (u(k - 1), 1),
                (u(k + 1), -1),
                (v(l, s), 1),
                (v(l + 2, s), -1),
            ]
        } else if even.len() >= 2 {
            pair(even[0], even[1], 1)
        } else {
            vec![(u(0), 1), (u(k - 1), -1), (u(k + 1), 1), (u(n), -1)]
        };
        return zero(Rule::EvenPath, cols);
    }

    if n % 2 == 1 && n >= 3 {
        if all_one {
            return closed(Rule::OddPath, bracket_value(n.div_ceil(2), r));
        }
        let cols = if let Some(&s) = even.first() {
            let (k, l) = (n / 2, m[s] / 2);
            vec![(u(k), 1), (u(k + 1), -1), (v(l, s), 1), (v(l + 1, s), -1)]
        } else if odd3.len() >= 2 {
            pair(odd3[0], odd3[1], 2)
        } else {
            let s = odd3[0];
            let l = m[s] / 2;
            vec![(u(0), 1), (u(n), -1), (v(l, s), 1), (v(l + 2, s), -1)]
        };
        return zero(Rule::OddPath, cols);
    }

    if n == 2 {
        if all_one {
            return closed(Rule::PathTwo, complete_bipartite_value(r));
        }
        if let Some(&s) = odd3.first() {
            let l = m[s] / 2;
            return zero(
                Rule::PathTwo,
                vec![(u(0), 1), (u(2), -1), (v(l, s), 1), (v(l + 2, s), -1)],
            );
        }
        if even.len() >= 2 {
            return zero(Rule::PathTwo, pair(even[0], even[1], 1));
        }
        // m_1 = .. = m_{r-1} = 1, m_r = 2(k-1)
        return closed(Rule::PathTwo, bracket_value(m[r - 1] / 2 + 1, r));
    }

    if all_one {
        return closed(Rule::PathOne, stated_t_r_value(r));
    }
    if let Some(&s) = even.first() {
        let l = m[s] / 2;
        return zero(
            Rule::PathOne,
            vec![(u(1), 1), (u(0), -1), (v(l, s), -1), (v(l + 1, s), 1)],
        );
    }
    DetVerdict {
        verdict: Verdict::Unknown,
        rule: Rule::PathOne,
        dependence: None,
    }
}

/// Exact determinant of the BFS distance matrix.
pub fn det_oracle(
    shape: &UndirectedShape,
    max_vertices: usize,
) -> Result<Rational, UndirectedError> {
    let size = shape.vertex_count();
    if size > max_vertices {
        return Err(UndirectedError::TooLarge {
            vertices: size,
            bound: max_vertices,
        });
    }
    Ok(det(&undirected_distance_matrix::<Rational>(shape)).expect("distance matrix is square"))
}

/// Whether the signed column combination vanishes on the BFS matrix.
pub fn dependence_holds(shape: &UndirectedShape, dep: &Dependence) -> bool {
    let d = undirected_distance_matrix::<Rational>(shape);
    let labels = shape.labels();
    let Some(cols): Option<Vec<(usize, i64)>> = dep
        .columns
        .iter()
        .map(|(l, c)| labels.iter().position(|x| x == l).map(|i| (i, *c)))
        .collect()
    else {
        return false;
    };
    (0..d.rows()).all(|y| {
        cols.iter()
            .fold(Rational::zero(), |acc, &(x, c)| {
                acc + d.get(y, x) * Rational::from_integer(c.into())
            })
            .is_zero()
    })
}

/// A classifier verdict next to the brute-force determinant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub shape: UndirectedShape,
    pub verdict: DetVerdict,
    pub oracle: Rational,
    /// `None` for `Unknown` verdicts.
    pub agrees: Option<bool>,
}

impl Comparison {
    pub fn is_discrepancy(&self) -> bool {
        self.agrees == Some(false)
    }
}

pub fn classify_with_oracle(
    shape: &UndirectedShape,
    max_vertices: usize,
) -> Result<Comparison, UndirectedError> {
    let oracle = det_oracle(shape, max_vertices)?;
    let verdict = classify_det(shape);
    let agrees = verdict.verdict.value().map(|v| v == oracle);
    Ok(Comparison {
        shape: shape.clone(),
        verdict,
        oracle,
        agrees,
    })
}

/// Classifier against oracle for every shape with at most `max_vertices`
/// vertices, in [`shapes_up_to`] order.
pub fn sweep(max_vertices: usize) -> Vec<Comparison> {
    shapes_up_to(max_vertices)
        .par_iter()
        .map(|s| classify_with_oracle(s, max_vertices).expect("shape within bound"))
        .collect()
}

/// Distance matrix of the cycle `C_{2k+1}` on vertices `0..2k`.
pub fn odd_cycle_distance_matrix<T: Scalar>(k: usize) -> Matrix<T> {
    let len = 2 * k + 1;
    Matrix::from_fn(len, len, |i, j| {
        let d = i.abs_diff(j);
        T::from_int(d.min(len - d) as i64)
    })
}

/// `-2I - C^k - C^{k+1} + (2k+1)/(k(k+1)) J` with `C` the cyclic shift
/// `C_{i,i+1} = 1`.
pub fn odd_cycle_inverse<T: Scalar>(k: usize) -> Matrix<T> {
    assert!(k >= 1, "odd cycle needs k >= 1");
    let len = 2 * k + 1;
    let c = T::from_int(len as i64) / T::from_int((k * (k + 1)) as i64);
    Matrix::from_fn(len, len, |i, j| {
        let mut x = c.clone();
        if i == j {
            x = x - T::from_int(2);
        }
        if j == (i + k) % len || j == (i + k + 1) % len {
            x = x - T::one();
        }
        x
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_rational;

    type M = Matrix<Rational>;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn shape(n: usize, m: &[usize]) -> UndirectedShape {
        UndirectedShape::new(n, m.to_vec()).unwrap()
    }

    #[test]
    fn shape_sorts_and_validates() {
        let s = shape(2, &[3, 1, 2]);
        assert_eq!(s.m(), [1, 2, 3]);
        assert_eq!(s.vertex_count(), 9);
        assert_eq!(s.to_string(), "C(2;1,2,3)");
        assert!(UndirectedShape::new(0, vec![1]).is_err());
        assert!(UndirectedShape::new(1, vec![]).is_err());
        assert!(UndirectedShape::new(1, vec![0, 1]).is_err());
    }

    #[test]
    fn bfs_examples() {
        let tri = M::from_ints(&[[0, 1, 1], [1, 0, 1], [1, 1, 0]]).unwrap();
        assert!(undirected_distance_matrix::<Rational>(&shape(1, &[1])).same_entries(&tri));
        let k4e = M::from_ints(&[[0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 2], [1, 1, 2, 0]]).unwrap();
        assert!(undirected_distance_matrix::<Rational>(&shape(1, &[1, 1])).same_entries(&k4e));
        // K_{2,3}: parts {u0, u2} and {u1, v1.1, v1.2}
        let d = undirected_distance_matrix::<Rational>(&shape(2, &[1, 1]));
        let part = [0, 1, 0, 1, 1];
        for i in 0..5 {
            for j in 0..5 {
                let expected = if i == j {
                    0
                } else if part[i] == part[j] {
                    2
                } else {
                    1
                };
                assert_eq!(d.get(i, j), &Rational::from_integer(expected.into()));
            }
        }
    }

    #[test]
    fn classifier_examples() {
        assert_eq!(classify_det(&shape(4, &[1, 1])).verdict, Verdict::Zero);
        assert_eq!(
            classify_det(&shape(3, &[1, 1])).verdict,
            Verdict::Closed(q("4"))
        );
        assert_eq!(
            classify_det(&shape(2, &[1, 1])).verdict,
            Verdict::Closed(q("-16"))
        );
        assert_eq!(
            classify_det(&shape(1, &[3])).verdict,
            Verdict::Closed(q("6"))
        );
        let unknown = classify_det(&shape(1, &[1, 3]));
        assert_eq!(
            (unknown.verdict, unknown.rule),
            (Verdict::Unknown, Rule::PathOne)
        );
        assert_eq!(
            classify_det(&shape(1, &[1, 1])).verdict,
            Verdict::Closed(q("-1"))
        );
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(det_oracle(&shape(1, &[1]), 14).unwrap(), q("2"));
        assert_eq!(det_oracle(&shape(3, &[1, 1]), 14).unwrap(), q("4"));
        assert_eq!(det_oracle(&shape(2, &[1, 1]), 14).unwrap(), q("-16"));
        assert_eq!(det_oracle(&shape(5, &[2]), 14).unwrap(), q("0"));
        assert!(matches!(
            det_oracle(&shape(10, &[10]), 14),
            Err(UndirectedError::TooLarge {
                vertices: 21,
                bound: 14
            })
        ));
    }

    #[test]
    fn zero_verdicts_carry_a_valid_dependence() {
        for s in [
            shape(4, &[1, 1]),
            shape(3, &[2, 3]),
            shape(2, &[1, 3]),
            shape(1, &[2, 2]),
        ] {
            let v = classify_det(&s);
            assert_eq!(v.verdict, Verdict::Zero, "{s}");
            assert!(dependence_holds(&s, v.dependence.as_ref().unwrap()), "{s}");
        }
    }

    #[test]
    fn shapes_enumeration() {
        let all = shapes_up_to(5);
        let names: Vec<String> = all.iter().map(ToString::to_string).collect();
        assert_eq!(
            names,
            [
                "C(1;1)",
                "C(1;1,1)",
                "C(1;1,1,1)",
                "C(1;1,2)",
                "C(1;2)",
                "C(1;3)",
                "C(2;1)",
                "C(2;1,1)",
                "C(2;2)",
                "C(3;1)"
            ]
        );
        assert!(all.iter().all(|s| s.vertex_count() <= 5));
    }

    #[test]
    fn odd_cycle_inverse_small() {
        let expected = M::from_rows(vec![
            vec![q("-1/2"), q("1/2"), q("1/2")],
            vec![q("1/2"), q("-1/2"), q("1/2")],
            vec![q("1/2"), q("1/2"), q("-1/2")],
        ])
        .unwrap();
        assert!(odd_cycle_inverse::<Rational>(1).same_entries(&expected));
        for k in 1..=6 {
            let d = odd_cycle_distance_matrix::<Rational>(k);
            assert!((&odd_cycle_inverse(k) * &d).is_identity(), "k = {k}");
        }
    }
}
