use super::BinaryImage;
use crate::Rect;

/// Per-pixel component ids; 0 is background and components are numbered
/// `1..=count` in raster order of their first pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<u32>,
    pub count: u32,
}

impl LabelMap {
    pub fn label(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    /// Pixel count of each component, indexed by `label - 1`.
    pub fn areas(&self) -> Vec<u64> {
        let mut areas = vec![0u64; self.count as usize];
        for &l in &self.labels {
            if l > 0 {
                areas[l as usize - 1] += 1;
            }
        }
        areas
    }

    /// Tight bounding box of each component, indexed by `label - 1`.
    pub fn bounding_boxes(&self) -> Vec<Rect> {
        let mut ext = vec![(u32::MAX, u32::MAX, 0u32, 0u32); self.count as usize];
        for y in 0..self.height {
            for x in 0..self.width {
                let l = self.label(x, y);
                if l > 0 {
                    let e = &mut ext[l as usize - 1];
                    e.0 = e.0.min(x);
                    e.1 = e.1.min(y);
                    e.2 = e.2.max(x);
                    e.3 = e.3.max(y);
                }
            }
        }
        ext.into_iter()
            .map(|(x0, y0, x1, y1)| Rect::from_corners(x0, y0, x1, y1))
            .collect()
    }
}

pub(crate) const NEIGHBOURS_8: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// 8-connected labelling by breadth-first flood from each unlabelled
/// foreground pixel met in raster order.
pub fn connected_components(img: &BinaryImage) -> LabelMap {
    let (w, h) = img.dimensions();
    let mut labels = vec![0u32; w as usize * h as usize];
    let mut count = 0u32;
    let mut queue = std::collections::VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            let idx = y as usize * w as usize + x as usize;
            if !img.get(x, y) || labels[idx] != 0 {
                continue;
            }
            count += 1;
            labels[idx] = count;
            queue.push_back((x, y));
            while let Some((cx, cy)) = queue.pop_front() {
                for (dx, dy) in NEIGHBOURS_8 {
                    let nx = cx as i64 + dx;
                    let ny = cy as i64 + dy;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let nidx = ny as usize * w as usize + nx as usize;
                    if labels[nidx] == 0 && img.get(nx as u32, ny as u32) {
                        labels[nidx] = count;
                        queue.push_back((nx as u32, ny as u32));
                    }
                }
            }
        }
    }
    LabelMap {
        width: w,
        height: h,
        labels,
        count,
    }
}

/// Copy of `img` without the components smaller than `min_area` pixels.
pub fn remove_small_components(img: &BinaryImage, min_area: u64) -> BinaryImage {
    let lm = connected_components(img);
    let areas = lm.areas();
    let (w, h) = img.dimensions();
    BinaryImage::from_fn(w, h, |x, y| {
        let l = lm.label(x, y);
        l > 0 && areas[l as usize - 1] >= min_area
    })
}
