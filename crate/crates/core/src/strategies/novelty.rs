use crate::maze::Vec2;

/// Final positions remembered across generations.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorArchive {
    points: Vec<Vec2>,
    threshold: f64,
    k: usize,
}

impl BehaviorArchive {
    pub const DEFAULT_K: usize = 15;
    pub const DEFAULT_THRESHOLD: f64 = 3.0;

    /// Panics if `k` is zero.
    pub fn new(k: usize, threshold: f64) -> Self {
        assert!(k >= 1, "novelty needs at least one neighbour");
        BehaviorArchive {
            points: Vec::new(),
            threshold,
            k,
        }
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Scores the population, then admits every agent whose novelty exceeds
    /// the threshold.
    pub fn score_and_update(&mut self, behaviors: &[Vec2]) -> Vec<f64> {
        let scores = novelty_scores(behaviors, &self.points, self.k);
        for (b, s) in behaviors.iter().zip(&scores) {
            if *s > self.threshold {
                self.points.push(*b);
            }
        }
        scores
    }
}

/// Mean distance from each behavior to its `k` nearest neighbours among
/// the other population members and the archive. With fewer than `k`
/// candidates the mean is over all of them; with none it is 0.
pub fn novelty_scores(behaviors: &[Vec2], archive: &[Vec2], k: usize) -> Vec<f64> {
    let mut dists = Vec::with_capacity(behaviors.len() + archive.len());
    behaviors
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            dists.clear();
            dists.extend(
                behaviors
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, &o)| b.distance(o)),
            );
            dists.extend(archive.iter().map(|&o| b.distance(o)));
            if dists.is_empty() {
                return 0.0;
            }
            let take = k.min(dists.len());
            if take < dists.len() {
                dists.select_nth_unstable_by(take - 1, f64::total_cmp);
            }
            let nearest = &mut dists[..take];
            // Fixed summation order keeps results independent of selection order.
            nearest.sort_unstable_by(f64::total_cmp);
            nearest.iter().sum::<f64>() / take as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_positions_score_zero() {
        let pts = vec![Vec2::new(3.0, 4.0); 5];
        assert_eq!(novelty_scores(&pts, &[], 15), vec![0.0; 5]);
    }

    #[test]
    fn fewer_candidates_than_k() {
        let pts = [Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0)];
        assert_eq!(novelty_scores(&pts, &[], 15), vec![10.0, 10.0]);
    }

    #[test]
    fn lone_agent_scores_zero() {
        assert_eq!(novelty_scores(&[Vec2::new(1.0, 1.0)], &[], 15), vec![0.0]);
        assert_eq!(
            novelty_scores(&[Vec2::new(0.0, 0.0)], &[Vec2::new(0.0, 2.0)], 15),
            vec![2.0]
        );
    }

    #[test]
    fn k_nearest_only() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(3.0, 0.0),
            Vec2::new(100.0, 0.0),
        ];
        let s = novelty_scores(&pts, &[], 2);
        assert_eq!(s[0], 2.0);
        assert_eq!(s[1], 1.5);
        assert_eq!(s[3], (97.0 + 99.0) / 2.0);
    }

    #[test]
    fn archive_admission() {
        let mut a = BehaviorArchive::new(1, 3.0);
        let s = a.score_and_update(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(20.0, 0.0),
        ]);
        assert_eq!(s, vec![2.0, 2.0, 18.0]);
        assert_eq!(a.points(), &[Vec2::new(20.0, 0.0)]);
        a.score_and_update(&[Vec2::new(20.0, 1.0)]);
        assert_eq!(a.len(), 1);
    }
}
