//! Memoized 3j, 6j and 9j symbols on doubled integer arguments.
//!
//! Lookups are keyed on a canonical representative of each symbol's
//! classical symmetry class, so permuted queries share one cache entry.

use std::collections::hash_map::RandomState;
use std::collections::HashMap;
use std::hash::{BuildHasher, Hash};

use parking_lot::RwLock;
use std::sync::LazyLock;

use super::exact;

const SHARDS: usize = 32;

struct ShardedCache<K> {
    hasher: RandomState,
    shards: Vec<RwLock<HashMap<K, f64>>>,
}

impl<K: Hash + Eq + Copy> ShardedCache<K> {
    fn new() -> Self {
        ShardedCache { hasher: RandomState::new(), shards: (0..SHARDS).map(|_| RwLock::new(HashMap::new())).collect() }
    }

    fn get_or_compute(&self, key: K, compute: impl FnOnce() -> f64) -> f64 {
        let shard = &self.shards[(self.hasher.hash_one(key) as usize) % SHARDS];
        if let Some(&v) = shard.read().get(&key) {
            return v;
        }
        let v = compute();
        *shard.write().entry(key).or_insert(v)
    }

    fn len(&self) -> usize {
        self.shards.iter().map(|s| s.read().len()).sum()
    }

    fn clear(&self) {
        for s in &self.shards {
            s.write().clear();
        }
    }
}

static CACHE_3J: LazyLock<ShardedCache<[i32; 6]>> = LazyLock::new(ShardedCache::new);
static CACHE_6J: LazyLock<ShardedCache<[i32; 6]>> = LazyLock::new(ShardedCache::new);
static CACHE_9J: LazyLock<ShardedCache<[i32; 9]>> = LazyLock::new(ShardedCache::new);

/// Number of cached (3j, 6j, 9j) entries.
pub fn cache_sizes() -> (usize, usize, usize) {
    (CACHE_3J.len(), CACHE_6J.len(), CACHE_9J.len())
}

/// Drops all memoized symbols.
pub fn clear_caches() {
    CACHE_3J.clear();
    CACHE_6J.clear();
    CACHE_9J.clear();
}

/// Triangle rule on doubled arguments, including integer perimeter.
#[inline]
pub fn triangle(a: i32, b: i32, c: i32) -> bool {
    a >= 0 && b >= 0 && c >= 0 && (a + b + c) % 2 == 0 && c >= (a - b).abs() && c <= a + b
}

#[inline]
fn projection_ok(j: i32, m: i32) -> bool {
    m.abs() <= j && (j - m) % 2 == 0
}

const PERMS: [([usize; 3], bool); 6] = [
    ([0, 1, 2], false),
    ([1, 2, 0], false),
    ([2, 0, 1], false),
    ([1, 0, 2], true),
    ([0, 2, 1], true),
    ([2, 1, 0], true),
];

fn canonical_3j(j: [i32; 3], m: [i32; 3]) -> ([i32; 6], bool) {
    let mut best: Option<([i32; 6], bool)> = None;
    for (p, odd) in PERMS {
        for flip in [false, true] {
            let s = if flip { -1 } else { 1 };
            let key = [j[p[0]], j[p[1]], j[p[2]], s * m[p[0]], s * m[p[1]], s * m[p[2]]];
            if best.is_none_or(|(b, _)| key > b) {
                best = Some((key, odd ^ flip));
            }
        }
    }
    best.unwrap()
}

/// Wigner 3j symbol with doubled arguments; zero when any selection rule fails.
pub fn three_j(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    if m1 + m2 + m3 != 0
        || !triangle(j1, j2, j3)
        || !projection_ok(j1, m1)
        || !projection_ok(j2, m2)
        || !projection_ok(j3, m3)
    {
        return 0.0;
    }
    let (key, odd) = canonical_3j([j1, j2, j3], [m1, m2, m3]);
    let v = CACHE_3J.get_or_compute(key, || {
        let [a, b, c, x, y, z] = key.map(i64::from);
        exact::three_j(a, b, c, x, y, z)
    });
    if odd && ((j1 + j2 + j3) / 2) % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Clebsch-Gordan coefficient `<j1 m1 j2 m2 | j m>` with doubled arguments.
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    let v = three_j(j1, j2, j, m1, m2, -m);
    if v == 0.0 {
        return 0.0;
    }
    let phase = if ((j1 - j2 + m) / 2).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    phase * f64::from(j + 1).sqrt() * v
}

fn canonical_6j(a: [i32; 6]) -> [i32; 6] {
    let cols = [(a[0], a[3]), (a[1], a[4]), (a[2], a[5])];
    let mut best = a;
    for (p, _) in PERMS {
        for swap in 0..4 {
            let mut c = [cols[p[0]], cols[p[1]], cols[p[2]]];
            // swapping rows within any two columns
            let pair = match swap {
                1 => Some((0, 1)),
                2 => Some((0, 2)),
                3 => Some((1, 2)),
                _ => None,
            };
            if let Some((x, y)) = pair {
                c[x] = (c[x].1, c[x].0);
                c[y] = (c[y].1, c[y].0);
            }
            let key = [c[0].0, c[1].0, c[2].0, c[0].1, c[1].1, c[2].1];
            if key < best {
                best = key;
            }
        }
    }
    best
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}` with doubled arguments.
pub fn six_j(j1: i32, j2: i32, j3: i32, j4: i32, j5: i32, j6: i32) -> f64 {
    if !(triangle(j1, j2, j3) && triangle(j1, j5, j6) && triangle(j4, j2, j6) && triangle(j4, j5, j3)) {
        return 0.0;
    }
    let key = canonical_6j([j1, j2, j3, j4, j5, j6]);
    CACHE_6J.get_or_compute(key, || {
        let [a, b, c, d, e, f] = key.map(i64::from);
        exact::six_j(a, b, c, d, e, f)
    })
}

fn canonical_9j(a: [i32; 9]) -> [i32; 9] {
    let mut best = a;
    for transpose in [false, true] {
        for r in 0..3 {
            for c in 0..3 {
                let mut key = [0; 9];
                for i in 0..3 {
                    for k in 0..3 {
                        let (si, sk) = ((i + r) % 3, (k + c) % 3);
                        let (si, sk) = if transpose { (sk, si) } else { (si, sk) };
                        key[3 * i + k] = a[3 * si + sk];
                    }
                }
                if key < best {
                    best = key;
                }
            }
        }
    }
    best
}

/// Wigner 9j symbol with doubled arguments, rows `(a b c) (d e f) (g h i)`,
/// evaluated as a single sum over products of three 6j symbols.
#[allow(clippy::too_many_arguments)]
pub fn nine_j(a: i32, b: i32, c: i32, d: i32, e: i32, f: i32, g: i32, h: i32, i: i32) -> f64 {
    if !(triangle(a, b, c)
        && triangle(d, e, f)
        && triangle(g, h, i)
        && triangle(a, d, g)
        && triangle(b, e, h)
        && triangle(c, f, i))
    {
        return 0.0;
    }
    let key = canonical_9j([a, b, c, d, e, f, g, h, i]);
    CACHE_9J.get_or_compute(key, || {
        let [a, b, c, d, e, f, g, h, i] = key;
        nine_j_sum(a, b, c, d, e, f, g, h, i)
    })
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn nine_j_sum(a: i32, b: i32, c: i32, d: i32, e: i32, f: i32, g: i32, h: i32, i: i32) -> f64 {
    let lo = (a - i).abs().max((d - h).abs()).max((b - f).abs());
    let hi = (a + i).min(d + h).min(b + f);
    let mut s = 0.0;
    let mut x = lo;
    while x <= hi {
        let t = six_j(a, b, c, f, i, x) * six_j(d, e, f, b, x, h) * six_j(g, h, i, x, a, d);
        let sign = if x % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * f64::from(x + 1) * t;
        x += 2;
    }
    s
}
