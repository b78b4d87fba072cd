use super::SemanticsParams;
use crate::disassembly::Axes;
use crate::textscan::{TextBlock, TextRole};
use crate::Rect;

fn inside(r: &Rect, cx: f64, cy: f64) -> bool {
    cx >= r.x as f64 && cx < r.right() as f64 && cy >= r.y as f64 && cy < r.bottom() as f64
}

/// Mark as title the unassigned block in the top band whose centre is
/// closest to the top-middle of the panel. Blocks inside `plot_rect` are
/// skipped, so a value label over a tall bar never wins.
pub fn assign_title(
    blocks: &mut [TextBlock],
    panel_dims: (u32, u32),
    plot_rect: Option<Rect>,
    params: &SemanticsParams,
) -> Option<usize> {
    let (w, h) = (panel_dims.0 as f64, panel_dims.1 as f64);
    let band = params.title_band * h;
    let best = blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.role == TextRole::Unassigned)
        .filter_map(|(i, b)| {
            let (cx, cy) = b.bbox.center();
            let in_plot = plot_rect.is_some_and(|r| inside(&r, cx, cy));
            (cy < band && !in_plot).then(|| (i, (cx - w / 2.0).hypot(cy)))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)?;
    blocks[best].role = TextRole::Title;
    Some(best)
}

/// Give tick, axis-label and value-label roles to unassigned blocks.
///
/// Y ticks sit left of the y-axis within `tick_band` times the widest such
/// block, inside the axis' vertical span; x ticks sit below the x-axis within
/// `tick_band` times the tallest such block, inside its horizontal span. The
/// y label is picked among blocks left of every y tick and the x label among
/// blocks below every x tick. What remains above the x-axis and inside the
/// plot's columns becomes a value label.
pub fn classify_axis_text(blocks: &mut [TextBlock], axes: &Axes, params: &SemanticsParams) {
    let tol = params.span_tol as f64;
    let ox = axes.origin.x as f64;
    let oy = axes.origin.y as f64;
    let top = axes.y_axis.p0.y.min(axes.y_axis.p1.y) as f64;
    let right = axes.x_axis.p0.x.max(axes.x_axis.p1.x) as f64;
    let free = |b: &TextBlock| b.role == TextRole::Unassigned;

    let y_zone = |b: &TextBlock| {
        let (cx, cy) = b.bbox.center();
        cx < ox && cy >= top - tol && cy <= oy + tol
    };
    let widest = blocks
        .iter()
        .filter(|b| free(b) && y_zone(b))
        .map(|b| b.bbox.w)
        .max()
        .unwrap_or(0) as f64;
    for b in blocks.iter_mut().filter(|b| free(b) && y_zone(b)) {
        if ox - b.bbox.center().0 <= params.tick_band * widest && !b.vertical {
            b.role = TextRole::YTick;
        }
    }

    let x_zone = |b: &TextBlock| {
        let (cx, cy) = b.bbox.center();
        cy > oy && cx >= ox - tol && cx <= right + tol
    };
    let tallest = blocks
        .iter()
        .filter(|b| free(b) && x_zone(b))
        .map(|b| b.bbox.h)
        .max()
        .unwrap_or(0) as f64;
    for b in blocks.iter_mut().filter(|b| free(b) && x_zone(b)) {
        if b.bbox.center().1 - oy <= params.tick_band * tallest {
            b.role = TextRole::XTick;
        }
    }

    let y_ticks_left = blocks
        .iter()
        .filter(|b| b.role == TextRole::YTick)
        .map(|b| b.bbox.x)
        .min();
    if let Some(limit) = y_ticks_left {
        let pick = blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| free(b) && b.bbox.right() <= limit)
            .max_by_key(|(_, b)| (b.vertical, b.bbox.h, b.bbox.right()))
            .map(|(i, _)| i);
        if let Some(i) = pick {
            blocks[i].role = TextRole::YLabel;
        }
    }

    let x_ticks_bottom = blocks
        .iter()
        .filter(|b| b.role == TextRole::XTick)
        .map(|b| b.bbox.bottom())
        .max();
    if let Some(limit) = x_ticks_bottom {
        let mid = (ox + right) / 2.0;
        let pick = blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| free(b) && b.bbox.y >= limit)
            .min_by(|(_, a), (_, b)| {
                let key = |t: &TextBlock| (t.bbox.y, (t.bbox.center().0 - mid).abs());
                let (ka, kb) = (key(a), key(b));
                ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
            })
            .map(|(i, _)| i);
        if let Some(i) = pick {
            blocks[i].role = TextRole::XLabel;
        }
    }

    for b in blocks.iter_mut().filter(|b| free(b)) {
        let (cx, cy) = b.bbox.center();
        if cx > ox && cx <= right && cy < oy && !b.vertical {
            b.role = TextRole::BarValue;
        }
    }
}
