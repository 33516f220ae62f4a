use crate::imagecore::BinaryImage;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// One count per row.
    Horizontal,
    /// One count per column.
    Vertical,
}

/// Projection histogram of a mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub axis: Axis,
    pub counts: Vec<usize>,
}

impl Profile {
    pub fn of(mask: &BinaryImage, axis: Axis) -> Profile {
        let (w, h) = (mask.width(), mask.height());
        let mut counts = vec![0; if axis == Axis::Horizontal { h } else { w }];
        for y in 0..h {
            for x in 0..w {
                if mask.get(x, y) {
                    match axis {
                        Axis::Horizontal => counts[y] += 1,
                        Axis::Vertical => counts[x] += 1,
                    }
                }
            }
        }
        Profile { axis, counts }
    }

    pub fn horizontal(mask: &BinaryImage) -> Profile {
        Profile::of(mask, Axis::Horizontal)
    }

    pub fn vertical(mask: &BinaryImage) -> Profile {
        Profile::of(mask, Axis::Vertical)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Number of strict local maxima of the profile after a centered moving-sum
/// smoothing of width `window` (zero outside the profile). A plateau counts
/// once when both sides drop below it; zero-valued entries never count.
pub fn count_peaks(profile: &Profile, window: usize) -> usize {
    let window = window.max(1) | 1;
    let half = window / 2;
    let c = &profile.counts;
    let n = c.len();
    let mut prefix = vec![0usize; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + c[i];
    }
    let smooth: Vec<usize> = (0..n)
        .map(|i| prefix[(i + half + 1).min(n)] - prefix[i.saturating_sub(half)])
        .collect();

    let mut peaks = 0;
    let mut i = 0;
    while i < n {
        let v = smooth[i];
        let mut j = i;
        while j + 1 < n && smooth[j + 1] == v {
            j += 1;
        }
        let left_lower = i == 0 || smooth[i - 1] < v;
        let right_lower = j + 1 == n || smooth[j + 1] < v;
        if v > 0 && left_lower && right_lower {
            peaks += 1;
        }
        i = j + 1;
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(counts: &[usize]) -> Profile {
        Profile {
            axis: Axis::Horizontal,
            counts: counts.to_vec(),
        }
    }

    #[test]
    fn examples() {
        assert_eq!(count_peaks(&p(&[0, 2, 5, 2, 0]), 1), 1);
        assert_eq!(count_peaks(&p(&[0, 4, 1, 4, 0]), 1), 2);
        assert_eq!(count_peaks(&p(&[0, 4, 1, 4, 0]), 3), 1);
        assert_eq!(count_peaks(&p(&[3, 3, 3]), 1), 1);
        assert_eq!(count_peaks(&p(&[0, 0]), 1), 0);
        assert_eq!(count_peaks(&p(&[]), 1), 0);
    }

    #[test]
    fn profile_sums_to_foreground() {
        let m = BinaryImage::from_fn(9, 4, |x, y| (x + y) % 3 == 0).unwrap();
        for axis in [Axis::Horizontal, Axis::Vertical] {
            let pr = Profile::of(&m, axis);
            assert_eq!(pr.total(), m.foreground_count());
        }
        assert_eq!(Profile::horizontal(&m).counts.len(), 4);
        assert_eq!(Profile::vertical(&m).counts.len(), 9);
    }

    /// For each index, walk outwards over equal values and check whether the
    /// plateau it belongs to is bounded by strictly smaller values; count each
    /// plateau at its first index only.
    fn brute_force_peaks(c: &[usize]) -> usize {
        let n = c.len();
        (0..n)
            .filter(|&i| {
                if c[i] == 0 || (i > 0 && c[i - 1] == c[i]) {
                    return false;
                }
                let mut r = i;
                while r + 1 < n && c[r + 1] == c[i] {
                    r += 1;
                }
                (i == 0 || c[i - 1] < c[i]) && (r + 1 == n || c[r + 1] < c[i])
            })
            .count()
    }

    proptest! {
        #[test]
        fn unsmoothed_peaks_match_brute_force(c in proptest::collection::vec(0usize..6, 50)) {
            prop_assert_eq!(count_peaks(&p(&c), 1), brute_force_peaks(&c));
        }

        #[test]
        fn smoothed_peaks_match_brute_force_on_moving_sums(
            c in proptest::collection::vec(0usize..6, 50),
            half in 0usize..4,
        ) {
            let w = 2 * half + 1;
            let smoothed: Vec<usize> = (0..c.len())
                .map(|i| {
                    (i as isize - half as isize..=i as isize + half as isize)
                        .filter(|&j| j >= 0 && (j as usize) < c.len())
                        .map(|j| c[j as usize])
                        .sum()
                })
                .collect();
            prop_assert_eq!(count_peaks(&p(&c), w), brute_force_peaks(&smoothed));
        }
    }
}
