//! Basin-of-attraction rasters ("polynomiographs") and their PPM encoding.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{Complex, Polynomial};
use crate::rnm::{run_modified_rnm, run_rnm, StoppingCriteria, Termination, DEFAULT_REL_TOL};
use crate::roots::{solve_all, RootSet, SolveOptions};
use crate::smale::run_newton;

/// A rectangle of the complex plane sampled at pixel centres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub center: Complex,
    pub width: f64,
    pub height: f64,
    pub px_w: usize,
    pub px_h: usize,
}

impl Window {
    pub fn new(center: Complex, width: f64, height: f64, px_w: usize, px_h: usize) -> Result<Self> {
        let w = Window {
            center,
            width,
            height,
            px_w,
            px_h,
        };
        w.validate()?;
        Ok(w)
    }

    /// Square window of side `side` centred at `center`.
    pub fn square(center: Complex, side: f64, px: usize) -> Result<Self> {
        Window::new(center, side, side, px, px)
    }

    fn validate(&self) -> Result<()> {
        let finite = self.center.re.is_finite() && self.center.im.is_finite();
        if !finite
            || !(self.width > 0.0 && self.width.is_finite())
            || !(self.height > 0.0 && self.height.is_finite())
        {
            return Err(Error::InvalidInput(
                "window needs a finite center and positive finite extent".into(),
            ));
        }
        if self.px_w == 0 || self.px_h == 0 {
            return Err(Error::InvalidInput(
                "window needs at least one pixel".into(),
            ));
        }
        Ok(())
    }

    /// Seed of pixel `(i, j)`; `i` counts columns, `j` rows. Offsets are
    /// formed from exact integer numerators so that mirrored pixels map to
    /// exactly mirrored seeds.
    pub fn pixel(&self, i: usize, j: usize) -> Complex {
        let offset = |idx: usize, n: usize| (2.0 * idx as f64 + 1.0 - n as f64) / (2.0 * n as f64);
        self.center
            + Complex::new(
                offset(i, self.px_w) * self.width,
                offset(j, self.px_h) * self.height,
            )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderMethod {
    Rnm,
    ModifiedRnm,
    Newton,
}

impl FromStr for RenderMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rnm" | "plain" => Ok(RenderMethod::Rnm),
            "modified_rnm" | "modified" => Ok(RenderMethod::ModifiedRnm),
            "newton" => Ok(RenderMethod::Newton),
            other => Err(Error::Parse(format!("unknown render method `{other}`"))),
        }
    }
}

/// Per-pixel root index (`-1` when the orbit did not reach a root) and
/// iteration count, row-major, top row first.
#[derive(Clone, Debug, PartialEq)]
pub struct BasinGrid {
    pub width: usize,
    pub height: usize,
    pub root_index: Vec<i32>,
    pub iters: Vec<u32>,
    pub roots: RootSet,
    pub max_iters: usize,
}

impl BasinGrid {
    pub fn at(&self, i: usize, j: usize) -> (i32, u32) {
        let idx = j * self.width + i;
        (self.root_index[idx], self.iters[idx])
    }

    /// Distinct root indices present, `-1` excluded.
    pub fn basins(&self) -> Vec<i32> {
        let mut seen: Vec<i32> = self
            .root_index
            .iter()
            .copied()
            .filter(|&r| r >= 0)
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen
    }

    pub fn unconverged(&self) -> usize {
        self.root_index.iter().filter(|&&r| r < 0).count()
    }
}

fn classify(roots: &RootSet, z: Complex, radius: f64) -> i32 {
    match roots.nearest(z) {
        Some((idx, dist)) if dist <= radius => idx as i32,
        _ => -1,
    }
}

/// Runs `method` from every pixel centre and classifies converged orbits
/// against the roots found by [`solve_all`], within `10 sqrt(eps)`.
pub fn render_basins(
    p: &Polynomial,
    window: &Window,
    method: RenderMethod,
    eps: f64,
    max_iters: usize,
) -> Result<BasinGrid> {
    p.require_degree("render_basins", 2)?;
    window.validate()?;
    let roots = match solve_all(
        p,
        &SolveOptions {
            eps,
            max_iters,
            rel_tol: DEFAULT_REL_TOL,
        },
    ) {
        Ok(set) => set,
        Err(Error::ConvergenceFailure(partial)) => *partial,
        Err(e) => return Err(e),
    };
    let criteria = match method {
        RenderMethod::Rnm => Some(StoppingCriteria::plain(eps, max_iters)?),
        RenderMethod::ModifiedRnm => Some(StoppingCriteria::modified(eps, max_iters)?),
        RenderMethod::Newton => None,
    };
    let radius = 10.0 * eps.sqrt();
    let (w, h) = (window.px_w, window.px_h);

    let cells: Vec<(i32, u32)> = (0..w * h)
        .into_par_iter()
        .map(|idx| -> Result<(i32, u32)> {
            let seed = window.pixel(idx % w, idx / w);
            let orbit = match (method, &criteria) {
                (RenderMethod::Rnm, Some(c)) => run_rnm(p, seed, c)?,
                (RenderMethod::ModifiedRnm, Some(c)) => run_modified_rnm(p, seed, c)?,
                _ => run_newton(p, seed, eps, max_iters, DEFAULT_REL_TOL)?,
            };
            let iters = orbit.iterations() as u32;
            let index = if orbit.termination == Termination::RootTolerance {
                classify(&roots, orbit.final_point(), radius)
            } else {
                -1
            };
            Ok((index, iters))
        })
        .collect::<Result<_>>()?;

    let (root_index, iters) = cells.into_iter().unzip();
    Ok(BasinGrid {
        width: w,
        height: h,
        root_index,
        iters,
        roots,
        max_iters,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Palette {
    #[default]
    Classic,
    Grayscale,
}

impl Palette {
    const CLASSIC: [[u8; 3]; 8] = [
        [230, 25, 75],
        [60, 180, 75],
        [0, 130, 200],
        [255, 225, 25],
        [145, 30, 180],
        [70, 240, 240],
        [245, 130, 48],
        [240, 50, 230],
    ];
    const GRAYSCALE: [[u8; 3]; 4] = [
        [200, 200, 200],
        [150, 150, 150],
        [100, 100, 100],
        [50, 50, 50],
    ];

    pub fn color(self, root_index: i32) -> [u8; 3] {
        if root_index < 0 {
            return [255, 255, 255];
        }
        let i = root_index as usize;
        match self {
            Palette::Classic => Self::CLASSIC[i % Self::CLASSIC.len()],
            Palette::Grayscale => Self::GRAYSCALE[i % Self::GRAYSCALE.len()],
        }
    }
}

impl FromStr for Palette {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" => Ok(Palette::Classic),
            "grayscale" | "greyscale" => Ok(Palette::Grayscale),
            other => Err(Error::Parse(format!("unknown palette `{other}`"))),
        }
    }
}

impl fmt::Display for Palette {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Palette::Classic => "classic",
            Palette::Grayscale => "grayscale",
        })
    }
}

/// Darkest shade as a fraction of the base color.
const MIN_BRIGHTNESS: f64 = 0.2;

fn shade(color: [u8; 3], iters: u32, cap: usize) -> [u8; 3] {
    let t = if cap == 0 {
        0.0
    } else {
        (iters as f64).min(cap as f64) / cap as f64
    };
    let scale = 1.0 - (1.0 - MIN_BRIGHTNESS) * t;
    color.map(|c| (c as f64 * scale).round() as u8)
}

/// Iteration count mapped to the darkest shade: the slowest converged
/// pixel, never more than `max_iters`.
pub fn ramp_cap(grid: &BasinGrid) -> usize {
    grid.root_index
        .iter()
        .zip(&grid.iters)
        .filter(|(&index, _)| index >= 0)
        .map(|(_, &iters)| iters as usize)
        .max()
        .unwrap_or(0)
        .min(grid.max_iters)
}

/// Binary PPM (P6) bytes: hue from the root index, brightness falling
/// linearly with the iteration count; unconverged pixels are white.
pub fn encode_ppm(grid: &BasinGrid, palette: Palette) -> Vec<u8> {
    let cap = ramp_cap(grid);
    let mut out = format!("P6\n{} {}\n255\n", grid.width, grid.height).into_bytes();
    out.reserve(3 * grid.root_index.len());
    for (&index, &iters) in grid.root_index.iter().zip(&grid.iters) {
        let base = palette.color(index);
        let rgb = if index < 0 {
            base
        } else {
            shade(base, iters, cap)
        };
        out.extend_from_slice(&rgb);
    }
    out
}

pub fn write_image(grid: &BasinGrid, palette: Palette, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        context: format!("writing {}", path.display()),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    file.write_all(&encode_ppm(grid, palette)).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn unity_cubic() -> Polynomial {
        Polynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn grid(root_index: Vec<i32>, iters: Vec<u32>, w: usize, h: usize) -> BasinGrid {
        BasinGrid {
            width: w,
            height: h,
            root_index,
            iters,
            roots: RootSet::default(),
            max_iters: 100,
        }
    }

    #[test]
    fn pixel_mapping() {
        let w = Window::square(c(0.0, 0.0), 4.0, 4).unwrap();
        assert_eq!(w.pixel(0, 0), c(-1.5, -1.5));
        assert_eq!(w.pixel(3, 3), c(1.5, 1.5));
        for j in 0..4 {
            assert_eq!(w.pixel(1, j), w.pixel(1, 3 - j).conj());
        }
        assert_eq!(
            Window::square(c(1.0, 0.0), 1.0, 1).unwrap().pixel(0, 0),
            c(1.0, 0.0)
        );
        assert!(Window::square(c(0.0, 0.0), 0.0, 4).is_err());
        assert!(Window::square(c(0.0, 0.0), 1.0, 0).is_err());
    }

    #[test]
    fn pixel_on_exact_root() {
        let p = unity_cubic();
        let w = Window::square(c(1.0, 0.0), 4.0, 1).unwrap();
        let g = render_basins(&p, &w, RenderMethod::Rnm, 1e-10, 1000).unwrap();
        let (index, iters) = g.at(0, 0);
        assert_eq!(iters, 0);
        assert!((g.roots.roots[index as usize] - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn positive_real_axis_reaches_one() {
        let p = unity_cubic();
        let w = Window::new(c(0.0, 0.0), 4.0, 4.0, 64, 1).unwrap();
        let g = render_basins(&p, &w, RenderMethod::Rnm, 1e-10, 10_000).unwrap();
        let one = g.roots.nearest(c(1.0, 0.0)).unwrap().0 as i32;
        for i in 32..64 {
            assert_eq!(g.at(i, 0).0, one, "pixel {i}");
        }
    }

    #[test]
    fn newton_cycle_is_unclassified() {
        let p = Polynomial::from_real(&[2.0, -2.0, 0.0, 1.0]).unwrap();
        // Pixel centres at 0 and 1.
        let w = Window::new(c(0.5, 0.0), 2.0, 1.0, 2, 1).unwrap();
        assert_eq!(w.pixel(0, 0), c(0.0, 0.0));
        assert_eq!(w.pixel(1, 0), c(1.0, 0.0));
        let g = render_basins(&p, &w, RenderMethod::Newton, 1e-10, 500).unwrap();
        assert_eq!(g.root_index, vec![-1, -1]);
    }

    #[test]
    fn small_render_is_symmetric_and_open_around_roots() {
        let p = unity_cubic();
        let w = Window::square(c(0.0, 0.0), 4.0, 48).unwrap();
        let g = render_basins(&p, &w, RenderMethod::Rnm, 1e-10, 10_000).unwrap();
        assert_eq!(g.unconverged(), 0);
        assert_eq!(g.basins().len(), 3);
        let conj_index: Vec<i32> = g
            .roots
            .roots
            .iter()
            .map(|r| g.roots.nearest(r.conj()).unwrap().0 as i32)
            .collect();
        for j in 0..48 {
            for i in 0..48 {
                let mirrored = g.at(i, 47 - j).0;
                assert_eq!(g.at(i, j).0, conj_index[mirrored as usize]);
            }
        }
        for (idx, root) in g.roots.roots.iter().enumerate() {
            let i = ((root.re + 2.0) / 4.0 * 48.0) as usize;
            let j = ((root.im + 2.0) / 4.0 * 48.0) as usize;
            for dj in [-1i64, 0, 1] {
                for di in [-1i64, 0, 1] {
                    let (ii, jj) = ((i as i64 + di) as usize, (j as i64 + dj) as usize);
                    assert_eq!(g.at(ii, jj).0, idx as i32);
                }
            }
        }
    }

    #[test]
    fn ppm_examples() {
        let bytes = encode_ppm(&grid(vec![0], vec![0], 1, 1), Palette::Classic);
        let mut expected = b"P6\n1 1\n255\n".to_vec();
        expected.extend_from_slice(&Palette::CLASSIC[0]);
        assert_eq!(bytes, expected);

        let bytes = encode_ppm(&grid(vec![-1; 6], vec![7; 6], 3, 2), Palette::Grayscale);
        let header = b"P6\n3 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert!(bytes[header.len()..].iter().all(|&b| b == 255));
        assert_eq!(bytes.len(), header.len() + 18);

        let dark = encode_ppm(&grid(vec![1, 1], vec![0, 1000], 2, 1), Palette::Grayscale);
        assert_eq!(&dark[dark.len() - 6..], &[150, 150, 150, 30, 30, 30]);
        let half = encode_ppm(
            &grid(vec![0, 0, -1], vec![0, 50, 90], 3, 1),
            Palette::Grayscale,
        );
        assert_eq!(
            &half[half.len() - 9..],
            &[200, 200, 200, 40, 40, 40, 255, 255, 255]
        );
    }

    #[test]
    fn write_image_reports_path() {
        let g = grid(vec![0], vec![0], 1, 1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.ppm");
        write_image(&g, Palette::Classic, &path).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            encode_ppm(&g, Palette::Classic)
        );
        let err =
            write_image(&g, Palette::Classic, &dir.path().join("missing/out.ppm")).unwrap_err();
        assert!(err.to_string().contains("missing"));
    }
}
