//! The 5x7 bitmap font shared by the chart renderer and the built-in
//! recogniser. Every glyph sits in a 5-column, 7-row cell with its lowest
//! ink on row 6 (except `-` and `+`); there are no descenders.

pub const CELL_W: u32 = 5;
pub const CELL_H: u32 = 7;
/// Horizontal advance in font units (cell plus one blank column).
pub const ADVANCE: u32 = 6;

const GLYPHS: &[(char, [&str; 7])] = &[
    (
        '0',
        [
            ".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###.",
        ],
    ),
    (
        '1',
        [
            "..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###.",
        ],
    ),
    (
        '2',
        [
            ".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####",
        ],
    ),
    (
        '3',
        [
            ".###.", "#...#", "....#", "..##.", "....#", "#...#", ".###.",
        ],
    ),
    (
        '4',
        [
            "...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#.",
        ],
    ),
    (
        '5',
        [
            "#####", "#....", "####.", "....#", "....#", "#...#", ".###.",
        ],
    ),
    (
        '6',
        [
            "..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###.",
        ],
    ),
    (
        '7',
        [
            "#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#...",
        ],
    ),
    (
        '8',
        [
            ".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###.",
        ],
    ),
    (
        '9',
        [
            ".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##..",
        ],
    ),
    (
        'A',
        [
            ".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#",
        ],
    ),
    (
        'B',
        [
            "####.", "#...#", "#...#", "####.", "#...#", "#...#", "####.",
        ],
    ),
    (
        'C',
        [
            ".###.", "#...#", "#....", "#....", "#....", "#...#", ".###.",
        ],
    ),
    (
        'D',
        [
            "####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####.",
        ],
    ),
    (
        'E',
        [
            "#####", "#....", "#....", "####.", "#....", "#....", "#####",
        ],
    ),
    (
        'F',
        [
            "#####", "#....", "#....", "####.", "#....", "#....", "#....",
        ],
    ),
    (
        'G',
        [
            ".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####",
        ],
    ),
    (
        'H',
        [
            "#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#",
        ],
    ),
    (
        'I',
        [
            ".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###.",
        ],
    ),
    (
        'J',
        [
            "..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##..",
        ],
    ),
    (
        'K',
        [
            "#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#",
        ],
    ),
    (
        'L',
        [
            "#....", "#....", "#....", "#....", "#....", "#....", "#####",
        ],
    ),
    (
        'M',
        [
            "#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#",
        ],
    ),
    (
        'N',
        [
            "#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#",
        ],
    ),
    (
        'O',
        [
            ".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###.",
        ],
    ),
    (
        'P',
        [
            "####.", "#...#", "#...#", "####.", "#....", "#....", "#....",
        ],
    ),
    (
        'Q',
        [
            ".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#",
        ],
    ),
    (
        'R',
        [
            "####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#",
        ],
    ),
    (
        'S',
        [
            ".####", "#....", "#....", ".###.", "....#", "....#", "####.",
        ],
    ),
    (
        'T',
        [
            "#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#..",
        ],
    ),
    (
        'U',
        [
            "#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###.",
        ],
    ),
    (
        'V',
        [
            "#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#..",
        ],
    ),
    (
        'W',
        [
            "#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#.",
        ],
    ),
    (
        'X',
        [
            "#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#",
        ],
    ),
    (
        'Y',
        [
            "#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#..",
        ],
    ),
    (
        'Z',
        [
            "#####", "....#", "...#.", "..#..", ".#...", "#....", "#####",
        ],
    ),
    (
        'a',
        [
            ".....", ".....", ".###.", "....#", ".####", "#...#", ".####",
        ],
    ),
    (
        'b',
        [
            "#....", "#....", "####.", "#...#", "#...#", "#...#", "####.",
        ],
    ),
    (
        'c',
        [
            ".....", ".....", ".###.", "#....", "#....", "#....", ".###.",
        ],
    ),
    (
        'd',
        [
            "....#", "....#", ".####", "#...#", "#...#", "#...#", ".####",
        ],
    ),
    (
        'e',
        [
            ".....", ".....", ".###.", "#...#", "#####", "#....", ".###.",
        ],
    ),
    (
        'f',
        [
            "..##.", ".#...", "####.", ".#...", ".#...", ".#...", ".#...",
        ],
    ),
    (
        'g',
        [
            ".....", ".....", ".####", "#...#", ".####", "....#", ".###.",
        ],
    ),
    (
        'h',
        [
            "#....", "#....", "####.", "#...#", "#...#", "#...#", "#...#",
        ],
    ),
    (
        'i',
        [
            "..#..", ".....", ".##..", "..#..", "..#..", "..#..", ".###.",
        ],
    ),
    (
        'j',
        [
            "...#.", ".....", "..##.", "...#.", "...#.", "#..#.", ".##..",
        ],
    ),
    (
        'k',
        [
            "#....", "#....", "#..#.", "#.#..", "##...", "#.#..", "#..#.",
        ],
    ),
    (
        'l',
        [
            ".##..", "..#..", "..#..", "..#..", "..#..", "..#..", ".###.",
        ],
    ),
    (
        'm',
        [
            ".....", ".....", "##.#.", "#.#.#", "#.#.#", "#...#", "#...#",
        ],
    ),
    (
        'n',
        [
            ".....", ".....", "####.", "#...#", "#...#", "#...#", "#...#",
        ],
    ),
    (
        'o',
        [
            ".....", ".....", ".###.", "#...#", "#...#", "#...#", ".###.",
        ],
    ),
    (
        'p',
        [
            ".....", ".....", "####.", "#...#", "####.", "#....", "#....",
        ],
    ),
    (
        'q',
        [
            ".....", ".....", ".####", "#...#", ".####", "....#", "....#",
        ],
    ),
    (
        'r',
        [
            ".....", ".....", "#.##.", "##..#", "#....", "#....", "#....",
        ],
    ),
    (
        's',
        [
            ".....", ".....", ".####", "#....", ".###.", "....#", "####.",
        ],
    ),
    (
        't',
        [
            ".#...", ".#...", "####.", ".#...", ".#...", ".#..#", "..##.",
        ],
    ),
    (
        'u',
        [
            ".....", ".....", "#...#", "#...#", "#...#", "#..##", ".##.#",
        ],
    ),
    (
        'v',
        [
            ".....", ".....", "#...#", "#...#", "#...#", ".#.#.", "..#..",
        ],
    ),
    (
        'w',
        [
            ".....", ".....", "#...#", "#...#", "#.#.#", "#.#.#", ".#.#.",
        ],
    ),
    (
        'x',
        [
            ".....", ".....", "#...#", ".#.#.", "..#..", ".#.#.", "#...#",
        ],
    ),
    (
        'y',
        [
            ".....", ".....", "#...#", "#...#", ".####", "....#", ".###.",
        ],
    ),
    (
        'z',
        [
            ".....", ".....", "#####", "...#.", "..#..", ".#...", "#####",
        ],
    ),
    (
        '%',
        [
            "##..#", "##..#", "...#.", "..#..", ".#...", "#..##", "#..##",
        ],
    ),
    (
        '.',
        [
            ".....", ".....", ".....", ".....", ".....", ".##..", ".##..",
        ],
    ),
    (
        '-',
        [
            ".....", ".....", ".....", "####.", ".....", ".....", ".....",
        ],
    ),
    (
        '+',
        [
            ".....", "..#..", "..#..", "#####", "..#..", "..#..", ".....",
        ],
    ),
    (
        '(',
        [
            "...#.", "..#..", ".#...", ".#...", ".#...", "..#..", "...#.",
        ],
    ),
    (
        ')',
        [
            ".#...", "..#..", "...#.", "...#.", "...#.", "..#..", ".#...",
        ],
    ),
    (
        '/',
        [
            "...#.", "...#.", "..#..", "..#..", "..#..", ".#...", ".#...",
        ],
    ),
];

/// A glyph cropped to its ink box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Glyph {
    pub ch: char,
    /// Ink-box origin inside the cell, in font units.
    pub left: u32,
    pub top: u32,
    pub width: u32,
    pub height: u32,
    /// Row-major ink bits of the ink box.
    pub bits: Vec<bool>,
}

impl Glyph {
    pub fn ink(&self, x: u32, y: u32) -> bool {
        self.bits[(y * self.width + x) as usize]
    }

    /// Last inked row within the cell.
    pub fn bottom(&self) -> u32 {
        self.top + self.height - 1
    }

    pub fn ink_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

fn cell_bit(rows: &[&str; 7], x: u32, y: u32) -> bool {
    rows[y as usize].as_bytes()[x as usize] == b'#'
}

/// Whether `ch` is drawable in the shipped font.
pub fn supports(ch: char) -> bool {
    GLYPHS.iter().any(|(c, _)| *c == ch)
}

pub fn charset() -> impl Iterator<Item = char> {
    GLYPHS.iter().map(|(c, _)| *c)
}

/// Full 5x7 cell bits of `ch`.
pub fn cell(ch: char) -> Option<[[bool; 5]; 7]> {
    let rows = GLYPHS.iter().find(|(c, _)| *c == ch)?.1;
    let mut out = [[false; 5]; 7];
    for (y, row) in out.iter_mut().enumerate() {
        for (x, b) in row.iter_mut().enumerate() {
            *b = cell_bit(&rows, x as u32, y as u32);
        }
    }
    Some(out)
}

/// Every glyph cropped to its ink box, in font order.
pub fn glyphs() -> Vec<Glyph> {
    GLYPHS
        .iter()
        .map(|(ch, rows)| {
            let inked: Vec<(u32, u32)> = (0..CELL_H)
                .flat_map(|y| (0..CELL_W).map(move |x| (x, y)))
                .filter(|&(x, y)| cell_bit(rows, x, y))
                .collect();
            let left = inked.iter().map(|p| p.0).min().unwrap_or(0);
            let right = inked.iter().map(|p| p.0).max().unwrap_or(0);
            let top = inked.iter().map(|p| p.1).min().unwrap_or(0);
            let bottom = inked.iter().map(|p| p.1).max().unwrap_or(0);
            let (width, height) = (right - left + 1, bottom - top + 1);
            let bits = (0..height)
                .flat_map(|y| (0..width).map(move |x| (x, y)))
                .map(|(x, y)| cell_bit(rows, left + x, top + y))
                .collect();
            Glyph {
                ch: *ch,
                left,
                top,
                width,
                height,
                bits,
            }
        })
        .collect()
}

/// Width in pixels of `text` rendered at integer `scale`.
pub fn text_width(text: &str, scale: u32) -> u32 {
    let n = text.chars().count() as u32;
    if n == 0 {
        0
    } else {
        (n * ADVANCE - 1) * scale
    }
}

pub fn text_height(scale: u32) -> u32 {
    CELL_H * scale
}

/// Rasterise `text` at `scale`, calling `plot(x, y)` for every ink pixel
/// relative to the top-left of the first cell. Unsupported characters
/// leave a blank cell.
pub fn rasterize(text: &str, scale: u32, mut plot: impl FnMut(u32, u32)) {
    for (i, ch) in text.chars().enumerate() {
        let Some(bits) = cell(ch) else { continue };
        let ox = i as u32 * ADVANCE * scale;
        for (y, row) in bits.iter().enumerate() {
            for (x, &on) in row.iter().enumerate() {
                if !on {
                    continue;
                }
                for dy in 0..scale {
                    for dx in 0..scale {
                        plot(ox + x as u32 * scale + dx, y as u32 * scale + dy);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgproc::{connected_components, BinaryImage};
    use std::collections::HashSet;

    #[test]
    fn charset_is_complete() {
        let expected: HashSet<char> = ('0'..='9')
            .chain('A'..='Z')
            .chain('a'..='z')
            .chain("%.-+()/".chars())
            .collect();
        let have: HashSet<char> = charset().collect();
        assert_eq!(have, expected);
        assert_eq!(GLYPHS.len(), expected.len());
    }

    #[test]
    fn rows_are_well_formed() {
        for (ch, rows) in GLYPHS {
            for r in rows {
                assert_eq!(r.len(), 5, "{ch}");
                assert!(r.bytes().all(|b| b == b'#' || b == b'.'), "{ch}");
            }
        }
    }

    #[test]
    fn ink_boxes_and_patterns_are_unique() {
        let gs = glyphs();
        for (i, a) in gs.iter().enumerate() {
            for b in &gs[i + 1..] {
                let same = a.width == b.width
                    && a.height == b.height
                    && a.bottom() == b.bottom()
                    && a.bits == b.bits;
                assert!(!same, "{} and {} are indistinguishable", a.ch, b.ch);
            }
        }
    }

    #[test]
    fn letters_and_digits_rest_on_the_baseline() {
        for g in glyphs() {
            if g.ch.is_ascii_alphanumeric() {
                assert_eq!(g.bottom(), 6, "{}", g.ch);
            }
        }
    }

    #[test]
    fn glyph_pieces_share_columns() {
        // sweeping pieces left to right must never leave a column gap inside a glyph
        for g in glyphs() {
            let img = BinaryImage::from_fn(g.width, g.height, |x, y| g.ink(x, y));
            let mut boxes = connected_components(&img).bounding_boxes();
            boxes.sort_by_key(|b| b.x);
            let mut reach = boxes[0].right();
            for b in &boxes[1..] {
                assert!(b.x <= reach, "{}", g.ch);
                reach = reach.max(b.right());
            }
        }
    }

    #[test]
    fn glyphs_are_dense_enough_to_detect() {
        for g in glyphs() {
            let fill = g.ink_count() as f64 / (g.width * g.height) as f64;
            assert!(fill >= 0.25, "{} {fill}", g.ch);
        }
    }

    #[test]
    fn rasterize_scales() {
        let mut px = Vec::new();
        rasterize(".", 3, |x, y| px.push((x, y)));
        assert_eq!(px.len(), 4 * 9);
        assert!(px
            .iter()
            .all(|&(x, y)| (3..9).contains(&x) && (15..21).contains(&y)));
        assert_eq!(text_width("100", 3), 51);
    }
}
