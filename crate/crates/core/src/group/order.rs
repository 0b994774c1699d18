//! Canonical total order: word length in the family's standard generators, then
//! lexicographic on the normal form with integers ordered 0, 1, −1, 2, −2, …

use std::cmp::Ordering;
use std::sync::{Mutex, OnceLock};

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::element::GroupElement;

/// Sort key realising the canonical order. Compare keys, not elements, in hot loops.
pub type CanonKey = SmallVec<[u64; 6]>;

/// Heisenberg word lengths are exact up to this radius; beyond it a deterministic
/// lower bound offset past the radius is used so the order stays total and stable.
pub const HEIS_EXACT_RADIUS: u32 = 14;

pub fn zigzag(v: i64) -> u64 {
    if v >= 0 {
        2 * v as u64 - u64::from(v > 0)
    } else {
        2 * v.unsigned_abs()
    }
}

pub fn canonical_key(g: &GroupElement) -> CanonKey {
    let mut key = CanonKey::new();
    match g {
        GroupElement::Zd { d, v } => {
            let v = &v[..*d as usize];
            key.push(v.iter().map(|x| x.unsigned_abs()).sum());
            key.extend(v.iter().map(|&x| zigzag(x)));
        }
        GroupElement::Heis([x, y, z]) => {
            key.push(heis_length_key(*x, *y, *z));
            key.extend([zigzag(*x), zigzag(*y), zigzag(*z)]);
        }
        GroupElement::Lamp { pos, lamps } => {
            key.push(lamplighter_length(*pos, lamps));
            key.push(zigzag(*pos));
            key.extend(lamps.iter().map(|&l| zigzag(l)));
        }
    }
    key
}

pub fn canonical_cmp(a: &GroupElement, b: &GroupElement) -> Ordering {
    canonical_key(a).cmp(&canonical_key(b))
}

/// Word length for generators t (cursor step) and a (toggle at cursor).
pub fn lamplighter_length(pos: i64, lamps: &[i64]) -> u64 {
    let lo = lamps.first().copied().unwrap_or(0).min(0).min(pos);
    let hi = lamps.last().copied().unwrap_or(0).max(0).max(pos);
    let left_first = (-lo) + (hi - lo) + (hi - pos);
    let right_first = hi + (hi - lo) + (pos - lo);
    lamps.len() as u64 + left_first.min(right_first) as u64
}

struct HeisBall {
    dist: FxHashMap<[i64; 3], u32>,
    frontier: Vec<[i64; 3]>,
    radius: u32,
}

impl HeisBall {
    fn new() -> Self {
        let mut dist = FxHashMap::default();
        dist.insert([0, 0, 0], 0);
        HeisBall { dist, frontier: vec![[0, 0, 0]], radius: 0 }
    }

    fn grow(&mut self) {
        let gens = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]];
        let mut next = Vec::new();
        for &[x, y, z] in &self.frontier {
            for [a, b, c] in gens {
                let h = [x + a, y + b, z + c + x * b];
                if !self.dist.contains_key(&h) {
                    self.dist.insert(h, self.radius + 1);
                    next.push(h);
                }
            }
        }
        self.frontier = next;
        self.radius += 1;
    }
}

fn heis_ball() -> &'static Mutex<HeisBall> {
    static BALL: OnceLock<Mutex<HeisBall>> = OnceLock::new();
    BALL.get_or_init(|| Mutex::new(HeisBall::new()))
}

/// Rigorous lower bound on Heisenberg word length: |x|+|y| ≤ n and |z| ≤ n².
pub fn heis_length_lower_bound(x: i64, y: i64, z: i64) -> u64 {
    let a = x.unsigned_abs() + y.unsigned_abs();
    let zz = z.unsigned_abs();
    let mut r = (zz as f64).sqrt() as u64;
    while r * r < zz {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= zz {
        r -= 1;
    }
    a.max(r)
}

/// Exact Heisenberg word length when at most [`HEIS_EXACT_RADIUS`].
pub fn heis_word_length(x: i64, y: i64, z: i64) -> Option<u32> {
    if heis_length_lower_bound(x, y, z) > u64::from(HEIS_EXACT_RADIUS) {
        return None;
    }
    let mut ball = heis_ball().lock().expect("heisenberg length cache poisoned");
    loop {
        if let Some(&d) = ball.dist.get(&[x, y, z]) {
            return Some(d);
        }
        if ball.radius >= HEIS_EXACT_RADIUS {
            return None;
        }
        ball.grow();
    }
}

fn heis_length_key(x: i64, y: i64, z: i64) -> u64 {
    match heis_word_length(x, y, z) {
        Some(d) => u64::from(d),
        None => u64::from(HEIS_EXACT_RADIUS) + 1 + heis_length_lower_bound(x, y, z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_zigzag() {
        let order: Vec<i64> = vec![0, 1, -1, 2, -2, 3];
        let keys: Vec<u64> = order.iter().map(|&v| zigzag(v)).collect();
        assert_eq!(keys, vec![0, 1, 2, 3, 4, 5]);
        let mut v: Vec<GroupElement> = (-3..=3).map(GroupElement::z).collect();
        v.sort_by_key(canonical_key);
        let got: Vec<i64> = v.iter().map(|g| g.coords().unwrap()[0]).collect();
        assert_eq!(got, vec![0, 1, -1, 2, -2, 3, -3]);
    }

    #[test]
    fn lamplighter_lengths() {
        assert_eq!(lamplighter_length(0, &[]), 0);
        assert_eq!(lamplighter_length(1, &[]), 1);
        assert_eq!(lamplighter_length(0, &[0]), 1);
        // toggle at 2, return: t t a t⁻¹ t⁻¹
        assert_eq!(lamplighter_length(0, &[2]), 5);
        // lamps at −1 and 1, end at 0: left first costs 1+2+1
        assert_eq!(lamplighter_length(0, &[-1, 1]), 2 + 4);
    }

    #[test]
    fn heisenberg_lengths_small() {
        assert_eq!(heis_word_length(0, 0, 0), Some(0));
        assert_eq!(heis_word_length(1, 1, 1), Some(2));
        assert_eq!(heis_word_length(1, 1, 0), Some(2));
        // commutator [a,b] = (0,0,1) has length 4
        assert_eq!(heis_word_length(0, 0, 1), Some(4));
        assert_eq!(heis_word_length(0, 0, 10_000), None);
    }
}
