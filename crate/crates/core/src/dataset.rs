//! Discovery of image/ground-truth pairs and image file I/O.
//!
//! Three layouts are understood:
//! - `ph2`: files named `IMD<digits>.<ext>` paired with `IMD<digits>_lesion.<ext>`
//!   anywhere below the root (covers the nested per-case folders);
//! - `isic`: `ISIC_<id>.<ext>` paired with `ISIC_<id>_Segmentation.<ext>`;
//! - `csv`: an explicit manifest with header `id,image,gt` where `gt` may be empty.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::raster::{check_grid, BinaryMask, RgbImage};

const IMAGE_EXTENSIONS: [&str; 6] = ["png", "jpg", "jpeg", "bmp", "tif", "tiff"];

/// Gray level above which a ground-truth pixel is foreground.
pub const MASK_THRESHOLD: u8 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layout {
    Ph2,
    Isic,
    Csv,
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ph2" => Ok(Layout::Ph2),
            "isic" => Ok(Layout::Isic),
            "csv" => Ok(Layout::Csv),
            other => Err(Error::InvalidInput(format!(
                "unknown layout `{other}` (expected ph2, isic or csv)"
            ))),
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::Ph2 => "ph2",
            Layout::Isic => "isic",
            Layout::Csv => "csv",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplePair {
    pub id: String,
    pub image_path: PathBuf,
    pub gt_path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub layout: Layout,
    /// Sorted by id; ids are unique.
    pub pairs: Vec<SamplePair>,
}

impl Manifest {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

enum Role {
    Image(String),
    Truth(String),
}

fn classify_ph2(stem: &str) -> Option<Role> {
    let digits_after = |s: &str| s.strip_prefix("IMD").filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit())).is_some();
    if let Some(base) = stem.strip_suffix("_lesion") {
        return digits_after(base).then(|| Role::Truth(base.to_string()));
    }
    digits_after(stem).then(|| Role::Image(stem.to_string()))
}

fn classify_isic(stem: &str) -> Option<Role> {
    if !stem.starts_with("ISIC_") {
        return None;
    }
    if let Some(base) = stem.strip_suffix("_Segmentation") {
        return (base.len() > "ISIC_".len()).then(|| Role::Truth(base.to_string()));
    }
    (!stem["ISIC_".len()..].contains('_')).then(|| Role::Image(stem.to_string()))
}

fn discover_tree(root: &Path, layout: Layout, classify: fn(&str) -> Option<Role>) -> Result<Manifest> {
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in WalkDir::new(root).follow_links(true) {
        let entry = entry.map_err(|e| Error::Discovery(format!("cannot read {}: {e}", root.display())))?;
        if entry.file_type().is_file() && is_image(entry.path()) {
            files.push(entry.into_path());
        }
    }
    files.sort();
    let mut images: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut truths: BTreeMap<String, PathBuf> = BTreeMap::new();
    for path in files {
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else { continue };
        match classify(stem) {
            Some(Role::Image(id)) => {
                images.entry(id).or_insert(path);
            }
            Some(Role::Truth(id)) => {
                truths.entry(id).or_insert(path);
            }
            None => {}
        }
    }
    if images.is_empty() {
        let pattern = match layout {
            Layout::Ph2 => "IMD<digits>.{png,jpg,bmp,..} with IMD<digits>_lesion masks",
            _ => "ISIC_<id>.{png,jpg,..} with ISIC_<id>_Segmentation masks",
        };
        return Err(Error::Discovery(format!(
            "no {layout} images found under {} (searched recursively for {pattern})",
            root.display()
        )));
    }
    let pairs = images
        .into_iter()
        .map(|(id, image_path)| SamplePair {
            gt_path: truths.remove(&id),
            id,
            image_path,
        })
        .collect();
    Ok(Manifest { layout, pairs })
}

fn discover_csv(root: &Path) -> Result<Manifest> {
    let csv_path = if root.is_dir() { root.join("manifest.csv") } else { root.to_path_buf() };
    let base = csv_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut reader = csv::Reader::from_path(&csv_path)
        .map_err(|e| Error::Discovery(format!("cannot read manifest {}: {e}", csv_path.display())))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Discovery(format!("manifest {} lacks an `{name}` column", csv_path.display())))
    };
    let (id_col, image_col, gt_col) = (col("id")?, col("image")?, col("gt")?);
    let resolve = |p: &str| {
        let p = PathBuf::from(p.trim());
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    };
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let id = field(id_col).to_string();
        if id.is_empty() {
            return Err(Error::Discovery(format!("empty id in manifest {}", csv_path.display())));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::Discovery(format!("duplicate id `{id}` in manifest {}", csv_path.display())));
        }
        let gt = field(gt_col);
        pairs.push(SamplePair {
            image_path: resolve(field(image_col)),
            gt_path: (!gt.is_empty()).then(|| resolve(gt)),
            id,
        });
    }
    if pairs.is_empty() {
        return Err(Error::Discovery(format!("manifest {} lists no images", csv_path.display())));
    }
    pairs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(Manifest {
        layout: Layout::Csv,
        pairs,
    })
}

/// Enumerate the samples below `root` for the given layout.
pub fn discover(root: impl AsRef<Path>, layout: Layout) -> Result<Manifest> {
    let root = root.as_ref();
    if !root.exists() {
        return Err(Error::Discovery(format!("{} does not exist", root.display())));
    }
    match layout {
        Layout::Ph2 => discover_tree(root, layout, classify_ph2),
        Layout::Isic => discover_tree(root, layout, classify_isic),
        Layout::Csv => discover_csv(root),
    }
}

fn open(path: &Path) -> Result<image::DynamicImage> {
    image::ImageReader::open(path)
        .map_err(Error::Io)?
        .with_guessed_format()
        .map_err(Error::Io)?
        .decode()
        .map_err(|source| Error::Load {
            path: path.to_path_buf(),
            source,
        })
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let img = open(path.as_ref())?.to_rgb8();
    RgbImage::from_image(&img)
}

/// Load a ground-truth mask; a pixel is foreground when its gray level exceeds 128.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let gray = open(path.as_ref())?.to_luma8();
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    BinaryMask::new(w, h, gray.as_raw().iter().map(|&v| v > MASK_THRESHOLD).collect())
}

/// Load a sample's image and, when present, its mask; grids must agree.
pub fn load_pair(pair: &SamplePair) -> Result<(RgbImage, Option<BinaryMask>)> {
    let image = load_image(&pair.image_path)?;
    let gt = match &pair.gt_path {
        Some(p) => {
            let mask = load_mask(p)?;
            check_grid(&image, &mask).map_err(|e| Error::InvalidInput(format!("{}: {e}", pair.id)))?;
            Some(mask)
        }
        None => None,
    };
    Ok((image, gt))
}

/// Write a mask as an 8-bit grayscale PNG with values 0 and 255.
pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    mask.to_gray_image()
        .save_with_format(path.as_ref(), image::ImageFormat::Png)?;
    Ok(())
}

pub fn save_image(image: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    image.to_image().save_with_format(path.as_ref(), image::ImageFormat::Png)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_png(path: &Path, w: u32, h: u32, value: impl Fn(u32, u32) -> u8) {
        image::GrayImage::from_fn(w, h, |x, y| image::Luma([value(x, y)])).save(path).unwrap();
    }

    #[test]
    fn empty_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        for layout in [Layout::Ph2, Layout::Isic] {
            let err = discover(dir.path(), layout).unwrap_err();
            assert!(matches!(err, Error::Discovery(_)), "{err}");
        }
    }

    #[test]
    fn isic_pairs_and_unmatched_image() {
        let dir = tempfile::tempdir().unwrap();
        for id in ["0000003", "0000001", "0000002"] {
            write_png(&dir.path().join(format!("ISIC_{id}.png")), 4, 4, |_, _| 90);
            write_png(&dir.path().join(format!("ISIC_{id}_Segmentation.png")), 4, 4, |x, _| if x < 2 { 255 } else { 0 });
        }
        write_png(&dir.path().join("ISIC_0000009.png"), 4, 4, |_, _| 90);
        fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let m = discover(dir.path(), Layout::Isic).unwrap();
        assert_eq!(m.len(), 4);
        let ids: Vec<_> = m.pairs.iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["ISIC_0000001", "ISIC_0000002", "ISIC_0000003", "ISIC_0000009"]);
        assert_eq!(m.pairs.iter().filter(|p| p.gt_path.is_none()).count(), 1);
        assert_eq!(discover(dir.path(), Layout::Isic).unwrap(), m);
    }

    #[test]
    fn ph2_nested_layout() {
        let dir = tempfile::tempdir().unwrap();
        for id in ["IMD002", "IMD010"] {
            let case = dir.path().join(id);
            fs::create_dir_all(case.join(format!("{id}_Dermoscopic_Image"))).unwrap();
            fs::create_dir_all(case.join(format!("{id}_lesion"))).unwrap();
            write_png(&case.join(format!("{id}_Dermoscopic_Image/{id}.bmp")), 3, 3, |_, _| 10);
            write_png(&case.join(format!("{id}_lesion/{id}_lesion.bmp")), 3, 3, |_, _| 255);
        }
        let m = discover(dir.path(), Layout::Ph2).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.pairs.iter().all(|p| p.gt_path.is_some()));
        let (img, gt) = load_pair(&m.pairs[0]).unwrap();
        assert_eq!((img.width(), img.height()), (3, 3));
        assert_eq!(gt.unwrap().count(), 9);
    }

    #[test]
    fn csv_manifest_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        write_png(&dir.path().join("a.png"), 2, 2, |_, _| 0);
        fs::write(dir.path().join("ok.csv"), "id,image,gt\nb,a.png,\na,a.png,a.png\n").unwrap();
        let m = discover(dir.path().join("ok.csv"), Layout::Csv).unwrap();
        assert_eq!(m.pairs[0].id, "a");
        assert_eq!(m.pairs[0].gt_path.as_deref(), Some(dir.path().join("a.png").as_path()));
        assert!(m.pairs[1].gt_path.is_none());

        fs::write(dir.path().join("dup.csv"), "id,image,gt\nx,a.png,\nx,a.png,\n").unwrap();
        let err = discover(dir.path().join("dup.csv"), Layout::Csv).unwrap_err().to_string();
        assert!(err.contains("`x`"), "{err}");
    }

    #[test]
    fn mask_threshold_is_strict() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.png");
        write_png(&p, 3, 1, |x, _| [0, 128, 255][x as usize]);
        assert_eq!(load_mask(&p).unwrap().bits(), &[false, false, true]);

        let rgb = dir.path().join("rgb.png");
        image::RgbImage::from_fn(2, 1, |x, _| image::Rgb(if x == 0 { [255; 3] } else { [0; 3] }))
            .save(&rgb)
            .unwrap();
        assert_eq!(load_mask(&rgb).unwrap().bits(), &[true, false]);
    }

    #[test]
    fn dimension_mismatch_names_the_id() {
        let dir = tempfile::tempdir().unwrap();
        write_png(&dir.path().join("i.png"), 4, 4, |_, _| 0);
        write_png(&dir.path().join("g.png"), 5, 4, |_, _| 0);
        let pair = SamplePair {
            id: "case7".into(),
            image_path: dir.path().join("i.png"),
            gt_path: Some(dir.path().join("g.png")),
        };
        let err = load_pair(&pair).unwrap_err().to_string();
        assert!(err.contains("case7") && err.contains("4x4") && err.contains("5x4"), "{err}");
    }

    #[test]
    fn undecodable_file_is_a_load_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.png");
        fs::write(&p, b"\x89PNG\r\n\x1a\ntruncated").unwrap();
        assert!(load_image(&p).is_err());
        assert!(load_mask(&p).is_err());
    }
}
