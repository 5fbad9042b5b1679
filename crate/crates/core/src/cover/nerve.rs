//! Abstract covers given by their nonempty intersections, and their nerves.

use std::collections::BTreeSet;

use super::CoverError;

/// A simplex of the nerve: strictly increasing chart indices.
pub type Simplex = Vec<usize>;

/// Charts and the nonempty (declared contractible) intersections among
/// them. Single charts are always nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverDatum {
    pub charts: Vec<String>,
    pub nonempty: BTreeSet<Simplex>,
    /// Simplices above this dimension are ignored.
    pub max_dim: usize,
    /// User assertion that the base is simply connected.
    pub simply_connected: Option<bool>,
}

impl CoverDatum {
    pub fn new(charts: Vec<String>, intersections: impl IntoIterator<Item = Simplex>) -> Self {
        let mut nonempty: BTreeSet<Simplex> = (0..charts.len()).map(|i| vec![i]).collect();
        for mut s in intersections {
            s.sort_unstable();
            s.dedup();
            nonempty.insert(s);
        }
        CoverDatum { charts, nonempty, max_dim: 3, simply_connected: None }
    }

    fn numbered(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("U{i}")).collect()
    }

    pub fn single() -> Self {
        CoverDatum::new(Self::numbered(1), [])
    }

    /// `k` arcs around a circle, consecutive ones overlapping, no triple
    /// overlaps (`k >= 3`).
    pub fn circle(k: usize) -> Self {
        CoverDatum::new(Self::numbered(k), (0..k).map(|i| vec![i, (i + 1) % k]))
    }

    /// `k` consecutive intervals covering an interval.
    pub fn interval(k: usize) -> Self {
        CoverDatum::new(Self::numbered(k), (1..k).map(|i| vec![i - 1, i]))
    }

    pub fn with_max_dim(mut self, d: usize) -> Self {
        self.max_dim = d;
        self
    }

    pub fn with_simply_connected(mut self, flag: bool) -> Self {
        self.simply_connected = Some(flag);
        self
    }

    pub fn n_charts(&self) -> usize {
        self.charts.len()
    }

    pub fn format_simplex(&self, s: &[usize]) -> String {
        let names: Vec<&str> = s.iter().map(|&i| self.charts.get(i).map_or("?", String::as_str)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Simplices per dimension, each list sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nerve {
    pub simplices: Vec<Vec<Simplex>>,
}

impl Nerve {
    pub fn dim(&self) -> usize {
        self.simplices.len().saturating_sub(1)
    }

    pub fn count(&self, p: usize) -> usize {
        self.simplices.get(p).map_or(0, Vec::len)
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.simplices.get(s.len().checked_sub(1)?)?.binary_search_by(|t| t.as_slice().cmp(s)).ok()
    }

    /// `i`-th face of a simplex (vertex `i` removed).
    pub fn face(s: &[usize], i: usize) -> Simplex {
        s.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.count(0);
        if n == 0 {
            return false;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for e in self.simplices.get(1).into_iter().flatten() {
            let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..n).all(|v| find(&mut parent, v) == root)
    }

    /// Connected one-dimensional nerve without cycles.
    pub fn is_tree(&self) -> bool {
        self.count(2) == 0 && self.is_connected() && self.count(1) + 1 == self.count(0)
    }
}

/// Enumerates the nerve, checking downward closure.
pub fn nerve(c: &CoverDatum) -> Result<Nerve, CoverError> {
    let n = c.n_charts();
    let mut simplices: Vec<Vec<Simplex>> = Vec::new();
    for s in &c.nonempty {
        if s.is_empty() || s.len() > c.max_dim + 1 {
            continue;
        }
        if let Some(&bad) = s.iter().find(|&&v| v >= n) {
            return Err(CoverError::Structural(format!("intersection names chart {bad}, only {n} charts")));
        }
        if s.len() > 1 {
            for i in 0..s.len() {
                let f = Nerve::face(s, i);
                if !c.nonempty.contains(&f) {
                    return Err(CoverError::NotClosed {
                        simplex: c.format_simplex(s),
                        face: c.format_simplex(&f),
                    });
                }
            }
        }
        let d = s.len() - 1;
        if simplices.len() <= d {
            simplices.resize(d + 1, Vec::new());
        }
        simplices[d].push(s.clone());
    }
    for list in &mut simplices {
        list.sort();
    }
    Ok(Nerve { simplices })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_overlapping_charts() {
        let nv = nerve(&CoverDatum::interval(2)).unwrap();
        assert_eq!(nv.simplices, vec![vec![vec![0], vec![1]], vec![vec![0, 1]]]);
        assert!(nv.is_tree());
    }

    #[test]
    fn circle_of_three_arcs_is_a_triangle_boundary() {
        let nv = nerve(&CoverDatum::circle(3)).unwrap();
        assert_eq!(nv.simplices[1], vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(nv.count(2), 0);
        assert!(nv.is_connected() && !nv.is_tree());
    }

    #[test]
    fn single_chart_is_a_point() {
        let nv = nerve(&CoverDatum::single()).unwrap();
        assert_eq!(nv.simplices, vec![vec![vec![0]]]);
    }

    #[test]
    fn missing_face_is_reported() {
        let c = CoverDatum::new(CoverDatum::numbered(3), [vec![0, 1, 2], vec![0, 1], vec![1, 2]]);
        let err = nerve(&c).unwrap_err();
        assert_eq!(err, CoverError::NotClosed { simplex: "{U1,U2,U3}".into(), face: "{U1,U3}".into() });
    }
}
