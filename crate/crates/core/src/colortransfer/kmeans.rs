use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) type Rgb = [f64; 3];

#[inline]
pub(crate) fn dist2(a: &Rgb, b: &Rgb) -> f64 {
    let dr = a[0] - b[0];
    let dg = a[1] - b[1];
    let db = a[2] - b[2];
    dr * dr + dg * dg + db * db
}

/// Index of the nearest centroid, lowest index on ties.
#[inline]
pub(crate) fn nearest(p: &Rgb, centroids: &[Rgb]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = dist2(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// k-means++ seeding: first centre uniform, then proportional to squared
/// distance from the nearest chosen centre.
fn seed_plus_plus(points: &[Rgb], k: usize, rng: &mut ChaCha8Rng) -> Vec<Rgb> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..points.len())]);
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(dist) => dist.sample(rng),
            // every point already coincides with a centre
            Err(_) => break,
        };
        let c = points[next];
        centroids.push(c);
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, &c));
        }
    }
    centroids
}

/// Lloyd iterations from k-means++ seeds. Returns centroids and the final
/// nearest-centroid assignment.
pub(crate) fn kmeans(
    points: &[Rgb],
    k: usize,
    seed: u64,
    max_iters: usize,
) -> (Vec<Rgb>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_plus_plus(points, k, &mut rng);
    let k = centroids.len();
    let mut assignment = vec![usize::MAX; points.len()];
    let mut sums = vec![[0.0; 3]; k];
    let mut counts = vec![0usize; k];

    for _ in 0..max_iters {
        let mut changed = false;
        for (a, p) in assignment.iter_mut().zip(points) {
            let (c, _) = nearest(p, &centroids);
            if *a != c {
                *a = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        sums.iter_mut().for_each(|s| *s = [0.0; 3]);
        counts.fill(0);
        for (&a, p) in assignment.iter().zip(points) {
            counts[a] += 1;
            for ch in 0..3 {
                sums[a][ch] += p[ch];
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                centroids[c] = [sums[c][0] * inv, sums[c][1] * inv, sums[c][2] * inv];
            }
        }
        // re-seed empty clusters at the point farthest from its centroid
        for c in 0..k {
            if counts[c] == 0 {
                let far = points
                    .iter()
                    .enumerate()
                    .map(|(idx, p)| (idx, dist2(p, &centroids[nearest(p, &centroids).0])))
                    .fold(
                        (0, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
                centroids[c] = points[far.0];
            }
        }
    }

    for (a, p) in assignment.iter_mut().zip(points) {
        *a = nearest(p, &centroids).0;
    }
    (centroids, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cluster_is_mean() {
        let pts = vec![[0.0, 0.0, 0.0], [1.0, 0.5, 0.0], [0.5, 1.0, 1.0]];
        let (c, a) = kmeans(&pts, 1, 3, 50);
        assert_eq!(a, vec![0, 0, 0]);
        for ch in 0..3 {
            let mean = pts.iter().map(|p| p[ch]).sum::<f64>() / 3.0;
            assert!((c[0][ch] - mean).abs() < 1e-15);
        }
    }

    #[test]
    fn seeding_stops_when_points_exhausted() {
        let pts = vec![[0.2, 0.2, 0.2]; 4];
        let (c, _) = kmeans(&pts, 3, 1, 10);
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn assignment_is_nearest() {
        let pts: Vec<Rgb> = (0..60)
            .map(|i| {
                let x = i as f64 / 59.0;
                [x, (x * 7.0).fract(), 1.0 - x]
            })
            .collect();
        let (c, a) = kmeans(&pts, 5, 9, 2);
        for (p, &ai) in pts.iter().zip(&a) {
            assert_eq!(nearest(p, &c).0, ai);
        }
    }
}
