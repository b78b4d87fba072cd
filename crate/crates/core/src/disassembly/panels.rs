use super::DisassemblyParams;
use crate::imgproc::{
    connected_components, morphological_dilate, otsu_binarize, remove_small_components, GrayImage,
};
use crate::Rect;
use serde::{Deserialize, Serialize};

/// One chart panel of a page.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelBox {
    pub bbox: Rect,
}

/// Split a page into panels: Otsu foreground, specks dropped, dilated so the
/// parts of one chart touch, then one box per large component. Boxes that
/// overlap by more than the merge fraction of the smaller one are joined,
/// and small leftovers (detached titles, rotated labels) near a panel are
/// folded into the closest one. Boxes come back in reading order.
pub fn segment_panels(page: &GrayImage, params: &DisassemblyParams) -> Vec<PanelBox> {
    let (w, h) = page.dimensions();
    if w == 0 || h == 0 {
        return Vec::new();
    }
    let (fg, _) = otsu_binarize(page);
    let fg = remove_small_components(&fg, params.speck_area);
    if fg.count_ones() == 0 {
        return Vec::new();
    }
    let grown = morphological_dilate(&fg, 2 * params.panel_dilation + 1);
    let lm = connected_components(&grown);

    // tight boxes of the original ink under each dilated component
    let mut ext = vec![(u32::MAX, u32::MAX, 0u32, 0u32); lm.count as usize];
    for y in 0..h {
        for x in 0..w {
            if fg.get(x, y) {
                let e = &mut ext[lm.label(x, y) as usize - 1];
                e.0 = e.0.min(x);
                e.1 = e.1.min(y);
                e.2 = e.2.max(x);
                e.3 = e.3.max(y);
            }
        }
    }
    let boxes: Vec<Rect> = ext
        .into_iter()
        .filter(|e| e.0 != u32::MAX)
        .map(|(x0, y0, x1, y1)| Rect::from_corners(x0, y0, x1, y1))
        .collect();

    let floor = params.panel_min_fraction * w as f64 * h as f64;
    let (large, small): (Vec<Rect>, Vec<Rect>) =
        boxes.into_iter().partition(|b| b.area() as f64 >= floor);
    let mut panels = merge_overlapping(large, params.panel_merge_overlap);
    if panels.is_empty() {
        return Vec::new();
    }
    for piece in small {
        let nearest = panels
            .iter()
            .enumerate()
            .map(|(i, p)| (i, gap_distance(p, &piece)))
            .filter(|&(_, d)| d <= params.panel_attach_gap as f64)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((i, _)) = nearest {
            panels[i] = panels[i].union(&piece);
        }
    }
    let mut panels = merge_overlapping(panels, params.panel_merge_overlap);
    panels.sort_by_key(|r| (r.y, r.x));
    panels.into_iter().map(|bbox| PanelBox { bbox }).collect()
}

fn gap_distance(a: &Rect, b: &Rect) -> f64 {
    let (dx, dy) = (a.h_gap(b) as f64, a.v_gap(b) as f64);
    (dx * dx + dy * dy).sqrt()
}

fn merge_overlapping(mut boxes: Vec<Rect>, fraction: f64) -> Vec<Rect> {
    loop {
        let pair = (0..boxes.len()).find_map(|i| {
            (i + 1..boxes.len())
                .find(|&j| overlaps(&boxes[i], &boxes[j], fraction))
                .map(|j| (i, j))
        });
        match pair {
            Some((i, j)) => {
                let b = boxes.remove(j);
                boxes[i] = boxes[i].union(&b);
            }
            None => return boxes,
        }
    }
}

fn overlaps(a: &Rect, b: &Rect, fraction: f64) -> bool {
    let Some(i) = a.intersection(b) else {
        return false;
    };
    i.area() as f64 > fraction * a.area().min(b.area()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_rules() {
        let a = Rect::new(0, 0, 100, 100);
        let b = Rect::new(90, 0, 100, 100);
        assert_eq!(merge_overlapping(vec![a, b], 0.2).len(), 2);
        let c = Rect::new(50, 50, 100, 100);
        assert_eq!(
            merge_overlapping(vec![a, c], 0.2),
            vec![Rect::new(0, 0, 150, 150)]
        );
        let inner = Rect::new(10, 10, 5, 5);
        assert_eq!(merge_overlapping(vec![a, inner], 0.2), vec![a]);
    }
}
