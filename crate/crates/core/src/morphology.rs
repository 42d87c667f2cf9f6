//! Binary morphology with disk structuring elements, plus hole filling.
//!
//! Pixels outside the grid never take part in a window: erosion only looks at
//! in-grid neighbours and dilation never grows from outside the frame.

use std::collections::VecDeque;

use crate::raster::BinaryMask;

/// Half-widths of a digital disk, indexed by `dy + radius`.
fn disk_half_widths(radius: usize) -> Vec<usize> {
    let r2 = (radius * radius) as i64;
    (-(radius as i64)..=radius as i64)
        .map(|dy| {
            let rem = r2 - dy * dy;
            (rem as f64).sqrt().floor() as usize
        })
        .collect()
}

/// Row-wise prefix sums of foreground counts; `prefix[row][k]` counts cols `< k`.
fn row_prefix(mask: &BinaryMask) -> Vec<Vec<u32>> {
    let w = mask.width();
    mask.bits()
        .chunks(w.max(1))
        .map(|row| {
            let mut acc = Vec::with_capacity(w + 1);
            acc.push(0u32);
            let mut s = 0u32;
            for &b in row {
                s += b as u32;
                acc.push(s);
            }
            acc
        })
        .collect()
}

fn disk_filter(mask: &BinaryMask, radius: usize, erode: bool) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    if radius == 0 || w == 0 || h == 0 {
        return mask.clone();
    }
    let half = disk_half_widths(radius);
    let prefix = row_prefix(mask);
    BinaryMask::from_fn(w, h, |r, c| {
        for (k, &hw) in half.iter().enumerate() {
            let rr = r as i64 + k as i64 - radius as i64;
            if rr < 0 || rr >= h as i64 {
                continue;
            }
            let lo = c.saturating_sub(hw);
            let hi = (c + hw).min(w - 1);
            let row = &prefix[rr as usize];
            let set = (row[hi + 1] - row[lo]) as usize;
            if erode && set < hi - lo + 1 {
                return false;
            }
            if !erode && set > 0 {
                return true;
            }
        }
        erode
    })
}

pub fn erode_disk(mask: &BinaryMask, radius: usize) -> BinaryMask {
    disk_filter(mask, radius, true)
}

pub fn dilate_disk(mask: &BinaryMask, radius: usize) -> BinaryMask {
    disk_filter(mask, radius, false)
}

pub fn open_disk(mask: &BinaryMask, radius: usize) -> BinaryMask {
    dilate_disk(&erode_disk(mask, radius), radius)
}

pub fn close_disk(mask: &BinaryMask, radius: usize) -> BinaryMask {
    erode_disk(&dilate_disk(mask, radius), radius)
}

/// Opening followed by closing with a disk of `radius`; radius 0 is the identity.
pub fn morph_smooth(mask: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    close_disk(&open_disk(mask, radius), radius)
}

/// Disk radius used for contour smoothing on a grid whose smaller side is `min_size`.
pub fn smoothing_radius(min_size: usize, fraction: f64) -> usize {
    ((fraction * min_size as f64).round() as usize).max(1)
}

/// Flip every background pixel that is not 4-connected to the frame.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let bits = mask.bits();
    let mut outside = vec![false; w * h];
    let mut queue = VecDeque::new();
    let seed = |i: usize, queue: &mut VecDeque<usize>, outside: &mut Vec<bool>| {
        if !bits[i] && !outside[i] {
            outside[i] = true;
            queue.push_back(i);
        }
    };
    for c in 0..w {
        seed(c, &mut queue, &mut outside);
        seed((h - 1) * w + c, &mut queue, &mut outside);
    }
    for r in 0..h {
        seed(r * w, &mut queue, &mut outside);
        seed(r * w + w - 1, &mut queue, &mut outside);
    }
    while let Some(i) = queue.pop_front() {
        let (r, c) = (i / w, i % w);
        let mut push = |j: usize| {
            if !bits[j] && !outside[j] {
                outside[j] = true;
                queue.push_back(j);
            }
        };
        if r > 0 {
            push(i - w);
        }
        if r + 1 < h {
            push(i + w);
        }
        if c > 0 {
            push(i - 1);
        }
        if c + 1 < w {
            push(i + 1);
        }
    }
    BinaryMask::new(w, h, outside.into_iter().map(|o| !o).collect())
        .expect("grid size preserved")
}
