//! Annotation parsing (VOC XML, INRIA text), training patch extraction and
//! corpus statistics.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pixel::{resize, GrayImage, Rect};
use crate::{Error, Result, WINDOW_H, WINDOW_W};

/// Labelled person box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthBox {
    pub image_id: String,
    pub rect: Rect,
    /// VOC `difficult` flag; always false for INRIA.
    pub difficult: bool,
}

/// Boxes of one image plus its declared size, when the format records it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ImageAnnotation {
    pub image_id: String,
    pub size: Option<(usize, usize)>,
    pub boxes: Vec<GroundTruthBox>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VocOptions {
    pub include_difficult: bool,
}

impl Default for VocOptions {
    fn default() -> Self {
        VocOptions {
            include_difficult: true,
        }
    }
}

fn child<'a, 'i>(node: roxmltree::Node<'a, 'i>, name: &str) -> Option<roxmltree::Node<'a, 'i>> {
    node.children().find(|c| c.has_tag_name(name))
}

fn child_text<'a>(node: roxmltree::Node<'a, '_>, name: &str) -> Option<&'a str> {
    child(node, name).and_then(|c| c.text()).map(str::trim)
}

fn num(node: roxmltree::Node<'_, '_>, name: &str) -> Result<f64> {
    let t = child_text(node, name).ok_or_else(|| Error::Annotation(format!("missing <{name}>")))?;
    t.parse::<f64>()
        .map_err(|_| Error::Annotation(format!("<{name}> is not a number: {t:?}")))
}

/// Person boxes of a VOC annotation, converted from 1-based inclusive corners
/// and clamped to the declared image size.
pub fn parse_voc_annotation(xml: &str) -> Result<Vec<GroundTruthBox>> {
    parse_voc(xml, VocOptions::default()).map(|a| a.boxes)
}

pub fn parse_voc(xml: &str, opts: VocOptions) -> Result<ImageAnnotation> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| Error::Annotation(format!("XML: {e}")))?;
    let root = doc.root_element();
    let size = child(root, "size").ok_or_else(|| Error::Annotation("missing <size>".into()))?;
    let (iw, ih) = (num(size, "width")? as usize, num(size, "height")? as usize);
    let image_id = child_text(root, "filename")
        .map(|f| {
            Path::new(f)
                .file_stem()
                .map_or(f.to_string(), |s| s.to_string_lossy().into_owned())
        })
        .unwrap_or_default();

    let mut boxes = Vec::new();
    for obj in root.children().filter(|c| c.has_tag_name("object")) {
        if child_text(obj, "name") != Some("person") {
            continue;
        }
        let difficult = child_text(obj, "difficult") == Some("1");
        if difficult && !opts.include_difficult {
            continue;
        }
        let bb = child(obj, "bndbox").ok_or_else(|| Error::Annotation("person without <bndbox>".into()))?;
        let (xmin, ymin, xmax, ymax) = (num(bb, "xmin")?, num(bb, "ymin")?, num(bb, "xmax")?, num(bb, "ymax")?);
        if xmax <= xmin || ymax <= ymin {
            return Err(Error::Annotation(format!(
                "degenerate box ({xmin}, {ymin}) - ({xmax}, {ymax})"
            )));
        }
        let x0 = (xmin.round() as i64 - 1).max(0) as usize;
        let y0 = (ymin.round() as i64 - 1).max(0) as usize;
        let x1 = (xmax.round() as usize).min(iw.max(1));
        let y1 = (ymax.round() as usize).min(ih.max(1));
        if x1 <= x0 || y1 <= y0 {
            return Err(Error::Annotation(format!("box outside {iw}x{ih} image")));
        }
        boxes.push(GroundTruthBox {
            image_id: image_id.clone(),
            rect: Rect::new(x0, y0, x1 - x0, y1 - y0),
            difficult,
        });
    }
    Ok(ImageAnnotation {
        image_id,
        size: Some((iw, ih)),
        boxes,
    })
}

fn parse_corner(s: &str) -> Option<(usize, usize)> {
    let s = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Person boxes of an INRIA annotation file, in file order. Corners are
/// 0-based and inclusive.
pub fn parse_inria_annotation(text: &str) -> Result<Vec<GroundTruthBox>> {
    parse_inria(text).map(|a| a.boxes)
}

pub fn parse_inria(text: &str) -> Result<ImageAnnotation> {
    let mut ann = ImageAnnotation::default();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with("Image filename") {
            if let Some((_, v)) = line.split_once(':') {
                let f = v.trim().trim_matches('"');
                ann.image_id = Path::new(f)
                    .file_stem()
                    .map_or(f.to_string(), |s| s.to_string_lossy().into_owned());
            }
        } else if line.starts_with("Image size") {
            if let Some((_, v)) = line.rsplit_once(':') {
                let dims: Vec<usize> = v.split('x').filter_map(|p| p.trim().parse().ok()).collect();
                if dims.len() >= 2 {
                    ann.size = Some((dims[0], dims[1]));
                }
            }
        } else if line.starts_with("Bounding box for object") {
            if !line.contains("\"PASperson\"") {
                continue;
            }
            let bad = || Error::Annotation(format!("unparseable bounding box line: {line}"));
            let (_, coords) = line.rsplit_once(':').ok_or_else(bad)?;
            let (a, b) = coords.split_once('-').ok_or_else(bad)?;
            let (x0, y0) = parse_corner(a).ok_or_else(bad)?;
            let (x1, y1) = parse_corner(b).ok_or_else(bad)?;
            if x1 < x0 || y1 < y0 {
                return Err(bad());
            }
            ann.boxes.push(GroundTruthBox {
                image_id: String::new(),
                rect: Rect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1),
                difficult: false,
            });
        }
    }
    let id = ann.image_id.clone();
    for b in &mut ann.boxes {
        b.image_id = id.clone();
    }
    Ok(ann)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnotationFormat {
    Voc,
    Inria,
}

impl AnnotationFormat {
    /// `.xml` files are VOC, anything else INRIA.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("xml") => AnnotationFormat::Voc,
            _ => AnnotationFormat::Inria,
        }
    }
}

pub fn parse_annotation(text: &str, format: AnnotationFormat, voc: VocOptions) -> Result<ImageAnnotation> {
    match format {
        AnnotationFormat::Voc => parse_voc(text, voc),
        AnnotationFormat::Inria => parse_inria(text),
    }
}

/// Crops each box and resizes it to the 32x64 window, ignoring aspect ratio.
pub fn extract_positives(img: &GrayImage, boxes: &[GroundTruthBox]) -> Result<Vec<GrayImage>> {
    boxes
        .iter()
        .map(|b| resize(&img.crop(&b.rect)?, WINDOW_W, WINDOW_H))
        .collect()
}

/// Largest tolerated overlap between a negative window and any person box, as
/// a fraction of the window area.
pub const NEGATIVE_MAX_OVERLAP: f64 = 0.2;
const MIN_SCALE: f64 = 0.5;
const MAX_SCALE: f64 = 2.0;
const MAX_ATTEMPTS_PER_SAMPLE: usize = 1000;

/// Uniformly placed windows of random scale in `[0.5, 2]` x 32x64 whose
/// overlap with every person box is below 20% of the window area, resized to
/// 32x64. Deterministic in `seed`.
pub fn sample_negatives(
    images: &[GrayImage],
    boxes_per_image: &[Vec<Rect>],
    count: usize,
    seed: u64,
) -> Result<Vec<GrayImage>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let min_w = (WINDOW_W as f64 * MIN_SCALE).round() as usize;
    let min_h = (WINDOW_H as f64 * MIN_SCALE).round() as usize;
    let hosts: Vec<usize> = (0..images.len())
        .filter(|&i| images[i].width() >= min_w && images[i].height() >= min_h)
        .collect();
    if hosts.is_empty() {
        let (w, h) = images.first().map_or((0, 0), |i| (i.width(), i.height()));
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min_w,
            min_h,
        });
    }
    let no_boxes: Vec<Rect> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > MAX_ATTEMPTS_PER_SAMPLE * count {
            return Err(Error::Training(format!(
                "could only place {} of {count} person-free windows",
                out.len()
            )));
        }
        let i = hosts[rng.gen_range(0..hosts.len())];
        let img = &images[i];
        let max_fit = (img.width() as f64 / WINDOW_W as f64).min(img.height() as f64 / WINDOW_H as f64);
        let scale = rng.gen_range(MIN_SCALE..=MAX_SCALE).min(max_fit);
        let w = ((WINDOW_W as f64 * scale).round() as usize).clamp(1, img.width());
        let h = ((WINDOW_H as f64 * scale).round() as usize).clamp(1, img.height());
        let x = rng.gen_range(0..=img.width() - w);
        let y = rng.gen_range(0..=img.height() - h);
        let win = Rect::new(x, y, w, h);
        let boxes = boxes_per_image.get(i).unwrap_or(&no_boxes);
        let limit = NEGATIVE_MAX_OVERLAP * win.area() as f64;
        if boxes.iter().all(|b| (win.intersection_area(b) as f64) < limit) {
            out.push(resize(&img.crop(&win)?, WINDOW_W, WINDOW_H)?);
        }
    }
    Ok(out)
}

/// Image and label counts of a train/test split. `n_total` counts labels
/// across both splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DatasetStats {
    pub n_train_images: usize,
    pub n_train_labels: usize,
    pub n_test_images: usize,
    pub n_test_labels: usize,
    pub n_total: usize,
}

pub fn stats(train: &[ImageAnnotation], test: &[ImageAnnotation]) -> DatasetStats {
    let labels = |s: &[ImageAnnotation]| s.iter().map(|a| a.boxes.len()).sum::<usize>();
    let (trl, tel) = (labels(train), labels(test));
    DatasetStats {
        n_train_images: train.len(),
        n_train_labels: trl,
        n_test_images: test.len(),
        n_test_labels: tel,
        n_total: trl + tel,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub split: Split,
    pub image_path: PathBuf,
    /// `None` for person-free images (written as `-`).
    pub annotation_path: Option<PathBuf>,
}

impl ManifestEntry {
    pub fn image_id(&self) -> String {
        self.image_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }
}

/// Parses `<split>\t<image-path>\t<annotation-path>` lines. Relative paths are
/// resolved against `base`; blank lines and `#` comments are skipped.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: &str| Error::Manifest {
            line: n + 1,
            reason: reason.into(),
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(err("expected 3 tab-separated fields"));
        }
        let split = match fields[0] {
            "train" => Split::Train,
            "test" => Split::Test,
            _ => return Err(err("split must be train or test")),
        };
        if fields[1].is_empty() {
            return Err(err("empty image path"));
        }
        let resolve = |p: &str| {
            let p = Path::new(p);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        out.push(ManifestEntry {
            split,
            image_path: resolve(fields[1]),
            annotation_path: match fields[2] {
                "" | "-" => None,
                a => Some(resolve(a)),
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const VOC: &str = r#"<annotation>
  <folder>VOC2007</folder>
  <filename>000005.jpg</filename>
  <size><width>500</width><height>375</height><depth>3</depth></size>
  <object><name>person</name><difficult>0</difficult>
    <bndbox><xmin>1</xmin><ymin>1</ymin><xmax>33</xmax><ymax>65</ymax></bndbox></object>
  <object><name>dog</name><difficult>0</difficult>
    <bndbox><xmin>100</xmin><ymin>100</ymin><xmax>200</xmax><ymax>200</ymax></bndbox></object>
  <object><name>person</name><difficult>1</difficult>
    <bndbox><xmin>200</xmin><ymin>50</ymin><xmax>260</xmax><ymax>190.5</ymax></bndbox></object>
</annotation>"#;

    const INRIA: &str = "# PASCAL Annotation Version 1.00\n\
Image filename : \"Train/pos/crop001001.png\"\n\
Image size (X x Y x C) : 818 x 958 x 3\n\
Database : \"The INRIA Rhone-Alpes Annotated Person Database\"\n\
Objects with ground truth : 2 { \"PASperson\" \"PASperson\" }\n\
# Details for pedestrian 1 (\"PASperson\")\n\
Original label for object 1 \"PASperson\" : \"UprightPerson\"\n\
Center point on object 1 \"PASperson\" (X, Y) : (26, 52)\n\
Bounding box for object 1 \"PASperson\" (Xmin, Ymin) - (Xmax, Ymax) : (10, 20) - (42, 84)\n\
\n\
# Details for pedestrian 2 (\"PASperson\")\n\
Bounding box for object 2 \"PASperson\" (Xmin, Ymin) - (Xmax, Ymax) : (300, 100) - (399, 299)\n";

    #[test]
    fn voc_person_filter() {
        let boxes = parse_voc_annotation(VOC).unwrap();
        assert_eq!(boxes.len(), 2);
        assert_eq!(boxes[0].rect, Rect::new(0, 0, 33, 65));
        assert_eq!(boxes[0].image_id, "000005");
        assert!(boxes[1].difficult);
        let strict = parse_voc(
            VOC,
            VocOptions {
                include_difficult: false,
            },
        )
        .unwrap();
        assert_eq!(strict.boxes.len(), 1);
        assert_eq!(strict.size, Some((500, 375)));
    }

    #[test]
    fn voc_no_person_and_errors() {
        let none = VOC.replace("<name>person</name>", "<name>cat</name>");
        assert!(parse_voc_annotation(&none).unwrap().is_empty());
        assert!(parse_voc_annotation("<annotation><object>").is_err());
        let nosize = VOC.replace(
            "<size><width>500</width><height>375</height><depth>3</depth></size>",
            "",
        );
        assert!(parse_voc_annotation(&nosize).is_err());
        let degenerate = VOC.replace("<xmax>33</xmax>", "<xmax>1</xmax>");
        assert!(parse_voc_annotation(&degenerate).is_err());
    }

    #[test]
    fn inria_boxes() {
        let a = parse_inria(INRIA).unwrap();
        assert_eq!(a.image_id, "crop001001");
        assert_eq!(a.size, Some((818, 958)));
        assert_eq!(a.boxes.len(), 2);
        assert_eq!(a.boxes[0].rect, Rect::new(10, 20, 33, 65));
        assert_eq!(a.boxes[1].rect, Rect::new(300, 100, 100, 200));
        assert!(parse_inria_annotation("Image filename : \"x.png\"\n")
            .unwrap()
            .is_empty());
        let bad = "Bounding box for object 1 \"PASperson\" (Xmin, Ymin) - (Xmax, Ymax) : (10, 20) - (4x2, 84)";
        assert!(parse_inria_annotation(bad).is_err());
    }

    #[test]
    fn positives_are_window_sized() {
        let img = GrayImage::from_fn(200, 200, |x, y| (x + y) as u8);
        let b = |r: Rect| GroundTruthBox {
            image_id: String::new(),
            rect: r,
            difficult: false,
        };
        let p = extract_positives(&img, &[b(Rect::new(10, 10, 96, 160)), b(Rect::new(0, 0, 64, 64))]).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|i| (i.width(), i.height()) == (32, 64)));
        assert!(extract_positives(&img, &[]).unwrap().is_empty());
        assert!(extract_positives(&img, &[b(Rect::new(150, 0, 96, 160))]).is_err());
    }

    #[test]
    fn negatives_sampling() {
        let imgs = vec![GrayImage::from_fn(640, 480, |x, y| ((x * 3 + y * 5) % 256) as u8)];
        assert!(sample_negatives(&imgs, &[vec![]], 0, 1).unwrap().is_empty());
        let a = sample_negatives(&imgs, &[vec![]], 10, 42).unwrap();
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|p| (p.width(), p.height()) == (32, 64)));
        assert_eq!(a, sample_negatives(&imgs, &[vec![]], 10, 42).unwrap());
        assert!(sample_negatives(&[GrayImage::filled(10, 10, 0)], &[], 1, 0).is_err());
    }

    #[test]
    fn stats_counts() {
        let ann = |n: usize| ImageAnnotation {
            image_id: String::new(),
            size: None,
            boxes: vec![
                GroundTruthBox {
                    image_id: String::new(),
                    rect: Rect::new(0, 0, 1, 1),
                    difficult: false
                };
                n
            ],
        };
        assert_eq!(stats(&[], &[]), DatasetStats::default());
        let s = stats(&[ann(2), ann(0)], &[ann(3)]);
        assert_eq!(
            s,
            DatasetStats {
                n_train_images: 2,
                n_train_labels: 2,
                n_test_images: 1,
                n_test_labels: 3,
                n_total: 5
            }
        );
    }

    #[test]
    fn manifest_lines() {
        let text = "train\timgs/a.png\tann/a.txt\n# c\n\ntest\t/abs/b.jpg\t-\n";
        let m = parse_manifest(text, Path::new("/data")).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].image_path, PathBuf::from("/data/imgs/a.png"));
        assert_eq!(m[0].annotation_path, Some(PathBuf::from("/data/ann/a.txt")));
        assert_eq!(m[0].image_id(), "a");
        assert_eq!(m[1].split, Split::Test);
        assert_eq!(m[1].annotation_path, None);
        assert!(parse_manifest("val\ta\tb\n", Path::new(".")).is_err());
        assert!(parse_manifest("train a b\n", Path::new(".")).is_err());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(AnnotationFormat::from_path(Path::new("a/b.XML")), AnnotationFormat::Voc);
        assert_eq!(
            AnnotationFormat::from_path(Path::new("a/b.txt")),
            AnnotationFormat::Inria
        );
    }
}
